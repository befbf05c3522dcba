use std::fmt::Write as _;

use super::{extract_relation, BucketPartition, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeStyle {
    Directed,
    /// Directed edge out of a focal bucket with no alternative mixed
    /// directed path.
    DirectedMarked,
    Undirected,
}

/// Edge between bucket indices. Undirected edges have `from < to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OgEdge {
    pub from: usize,
    pub to: usize,
    pub style: EdgeStyle,
}

impl OgEdge {
    pub fn is_directed(&self) -> bool {
        self.style != EdgeStyle::Undirected
    }
}

/// Order graph over buckets; a marked order graph once [`mark_edges`] ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedOrderGraph {
    partition: BucketPartition,
    edges: Vec<OgEdge>,
}

impl MarkedOrderGraph {
    pub fn partition(&self) -> &BucketPartition {
        &self.partition
    }

    pub fn edges(&self) -> &[OgEdge] {
        &self.edges
    }

    /// Edge between two buckets in either orientation.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<&OgEdge> {
        self.edges
            .iter()
            .find(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
    }

    /// Whether a path from `from` to `to` exists that follows directed
    /// edges forward and undirected edges either way, optionally skipping
    /// one edge (by index).
    pub fn mixed_path_exists(&self, from: usize, to: usize, skip: Option<usize>) -> bool {
        let m = self.partition.len();
        let mut adj = vec![Vec::new(); m];
        for (idx, e) in self.edges.iter().enumerate() {
            if Some(idx) == skip {
                continue;
            }
            adj[e.from].push(e.to);
            if !e.is_directed() {
                adj[e.to].push(e.from);
            }
        }
        let mut seen = vec![false; m];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if w == to {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// Graphviz rendering. Focal buckets list their (1-based) transitions,
    /// marked edges are bold with a `*` label, undirected edges have no
    /// arrowhead.
    pub fn to_dot(&self, names: &[&str]) -> String {
        let mut out = String::from("digraph mog {\n  node [shape=box];\n");
        for (i, b) in self.partition.buckets().iter().enumerate() {
            let mut label = b.label(names);
            if b.is_focal() {
                let ts: Vec<String> = b.focal_for.iter().map(|t| (t + 1).to_string()).collect();
                let _ = write!(label, "\\nfocal: {}", ts.join(","));
                let _ = writeln!(out, "  b{i} [label=\"{label}\", peripheries=2];");
            } else {
                let _ = writeln!(out, "  b{i} [label=\"{label}\"];");
            }
        }
        for e in &self.edges {
            let attrs = match e.style {
                EdgeStyle::Directed => "",
                EdgeStyle::DirectedMarked => " [style=bold, label=\"*\", marked=true]",
                EdgeStyle::Undirected => " [dir=none]",
            };
            let _ = writeln!(out, "  b{} -> b{}{attrs};", e.from, e.to);
        }
        out.push_str("}\n");
        out
    }
}

/// Pairwise relations become edges: `<` a directed edge, unknown an
/// undirected edge, NDP nothing.
pub fn build_order_graph(partition: &BucketPartition) -> MarkedOrderGraph {
    let m = partition.len();
    let mut edges = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let style = EdgeStyle::Directed;
            match extract_relation(partition.bucket(a), partition.bucket(b)) {
                Relation::Precedes(_) => edges.push(OgEdge { from: a, to: b, style }),
                Relation::Follows(_) => edges.push(OgEdge { from: b, to: a, style }),
                Relation::Unknown => edges.push(OgEdge {
                    from: a,
                    to: b,
                    style: EdgeStyle::Undirected,
                }),
                Relation::Ndp => {}
            }
        }
    }
    MarkedOrderGraph {
        partition: partition.clone(),
        edges,
    }
}

/// Marks every directed edge out of a focal bucket whose endpoints are not
/// otherwise joined by a mixed directed path.
pub fn mark_edges(og: &MarkedOrderGraph) -> MarkedOrderGraph {
    let mut out = og.clone();
    for (idx, e) in og.edges.iter().enumerate() {
        if e.style != EdgeStyle::Directed || !og.partition.bucket(e.from).is_focal() {
            continue;
        }
        if !og.mixed_path_exists(e.from, e.to, Some(idx)) {
            out.edges[idx].style = EdgeStyle::DirectedMarked;
        }
    }
    out
}

pub fn build_marked_order_graph(partition: &BucketPartition) -> MarkedOrderGraph {
    mark_edges(&build_order_graph(partition))
}
