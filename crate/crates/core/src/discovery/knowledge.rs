use std::collections::BTreeSet;
use std::fmt;

use super::{EdgeStyle, MarkedOrderGraph, NoninfluentialRelations};
use crate::error::{Error, Result};

/// Structural constraints handed to constraint-based learning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BackgroundKnowledge {
    /// `(x, y)`: `y` is never an ancestor of `x`.
    pub order_constraints: BTreeSet<(usize, usize)>,
    /// Unordered pairs stored `(min, max)`.
    pub forbidden_edges: BTreeSet<(usize, usize)>,
    pub required_edges: BTreeSet<(usize, usize)>,
    /// `(x, y)`: a directed path `x ~> y` exists.
    pub required_paths: BTreeSet<(usize, usize)>,
}

impl BackgroundKnowledge {
    pub fn is_empty(&self) -> bool {
        self.order_constraints.is_empty()
            && self.forbidden_edges.is_empty()
            && self.required_edges.is_empty()
            && self.required_paths.is_empty()
    }

    pub fn forbid(&mut self, a: usize, b: usize) {
        self.forbidden_edges.insert((a.min(b), a.max(b)));
    }

    pub fn is_forbidden(&self, a: usize, b: usize) -> bool {
        self.forbidden_edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_required(&self, a: usize, b: usize) -> bool {
        self.required_edges.contains(&(a, b)) || self.required_edges.contains(&(b, a))
    }

    /// Whether `x` is known to precede `y`: an order constraint, a
    /// required edge or a required path.
    pub fn ordered_before(&self, x: usize, y: usize) -> bool {
        self.order_constraints.contains(&(x, y))
            || self.required_edges.contains(&(x, y))
            || self.required_paths.contains(&(x, y))
    }

    /// Checks that no required edge is forbidden and the ordering
    /// constraints contain no cycle.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(&(a, b)) = self.required_edges.iter().find(|&&(a, b)| self.is_forbidden(a, b)) {
            return Err(Error::InvalidArgument(format!(
                "edge {a} -> {b} is both required and forbidden"
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in self
            .order_constraints
            .iter()
            .chain(&self.required_edges)
            .chain(&self.required_paths)
        {
            if a >= n || b >= n {
                return Err(Error::VariableOutOfRange(a.max(b)));
            }
            adj[a].push(b);
        }
        // iterative three-colour DFS
        let mut state = vec![0u8; n];
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            let mut stack = vec![(s, 0usize)];
            state[s] = 1;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if *next < adj[u].len() {
                    let w = adj[u][*next];
                    *next += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return Err(Error::InvalidArgument("ordering constraints contain a cycle".into())),
                        _ => {}
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Knowledge implied by the non-influential descendant claims: the
    /// focal variable precedes and reaches each descendant.
    pub fn from_noninfluential(rel: &NoninfluentialRelations) -> Self {
        let mut k = Self::default();
        for (x, y) in rel.descendant_pairs() {
            k.order_constraints.insert((x, y));
            k.required_paths.insert((x, y));
        }
        k
    }
}

/// Translates a marked order graph:
/// * a marked edge between singleton buckets is a required edge;
/// * every other directed edge orders all members of its source before
///   all members of its target;
/// * a marked edge from a focal singleton into a larger bucket also
///   requires a path from the focal variable to each member;
/// * bucket pairs without an edge forbid every member-pair edge.
///
/// Undirected (unknown) edges contribute nothing.
pub fn mog_to_background_knowledge(mog: &MarkedOrderGraph) -> BackgroundKnowledge {
    let p = mog.partition();
    let mut k = BackgroundKnowledge::default();
    for e in mog.edges() {
        let from = p.bucket(e.from);
        let to = p.bucket(e.to);
        match e.style {
            EdgeStyle::Undirected => {}
            EdgeStyle::DirectedMarked if from.members.len() == 1 && to.members.len() == 1 => {
                let x = *from.members.iter().next().expect("singleton");
                let y = *to.members.iter().next().expect("singleton");
                k.required_edges.insert((x, y));
            }
            style => {
                for &x in &from.members {
                    for &y in &to.members {
                        k.order_constraints.insert((x, y));
                    }
                }
                if style == EdgeStyle::DirectedMarked {
                    if let Some(f) = from.focal_variable() {
                        for &y in &to.members {
                            k.required_paths.insert((f, y));
                        }
                    }
                }
            }
        }
    }
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if mog.edge_between(a, b).is_none() {
                for &x in &p.bucket(a).members {
                    for &y in &p.bucket(b).members {
                        k.forbid(x, y);
                    }
                }
            }
        }
    }
    k
}

/// A variable-pair claim read off a marked order graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    /// `x` can be ordered before `y`.
    Order(usize, usize),
    /// No directed path between `x` and `y` (hence no edge).
    Ndp(usize, usize),
    /// The edge `x -> y` exists.
    Edge(usize, usize),
    /// A directed path `x ~> y` exists.
    Path(usize, usize),
    /// Conflicting evidence about `x` and `y`.
    Unknown(usize, usize),
}

impl Claim {
    /// `KIND x y` with variable names.
    pub fn render(&self, names: &[&str]) -> String {
        let (kind, x, y) = match *self {
            Claim::Order(x, y) => ("ORDER", x, y),
            Claim::Ndp(x, y) => ("NDP", x, y),
            Claim::Edge(x, y) => ("EDGE", x, y),
            Claim::Path(x, y) => ("PATH", x, y),
            Claim::Unknown(x, y) => ("UNKNOWN", x, y),
        };
        format!("{kind} {} {}", names[x], names[y])
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Every variable-pair claim of the graph, counted between variables
/// rather than buckets. Each directed edge yields an order claim per
/// member pair (marked edges additionally an edge or path claim); absent
/// edges yield NDP claims; undirected edges unknown claims.
pub fn mog_claims(mog: &MarkedOrderGraph) -> Vec<Claim> {
    let p = mog.partition();
    let mut claims = Vec::new();
    for e in mog.edges() {
        let from = p.bucket(e.from);
        let to = p.bucket(e.to);
        for &x in &from.members {
            for &y in &to.members {
                match e.style {
                    EdgeStyle::Undirected => claims.push(Claim::Unknown(x.min(y), x.max(y))),
                    EdgeStyle::Directed => claims.push(Claim::Order(x, y)),
                    EdgeStyle::DirectedMarked => claims.push(Claim::Order(x, y)),
                }
            }
        }
        if e.style == EdgeStyle::DirectedMarked {
            if from.members.len() == 1 && to.members.len() == 1 {
                let x = *from.members.iter().next().expect("singleton");
                let y = *to.members.iter().next().expect("singleton");
                claims.push(Claim::Edge(x, y));
            } else if let Some(f) = from.focal_variable() {
                claims.extend(to.members.iter().map(|&y| Claim::Path(f, y)));
            }
        }
    }
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if mog.edge_between(a, b).is_none() {
                for &x in &p.bucket(a).members {
                    for &y in &p.bucket(b).members {
                        claims.push(Claim::Ndp(x.min(y), x.max(y)));
                    }
                }
            }
        }
    }
    claims.sort();
    claims
}

/// Claims of the non-influential analysis: a path from each focal
/// variable to its established descendants, and unknown for bucket pairs
/// ordered both ways.
pub fn noninfluential_claims(rel: &NoninfluentialRelations) -> Vec<Claim> {
    let mut claims: Vec<Claim> = rel
        .descendant_pairs()
        .into_iter()
        .map(|(x, y)| Claim::Path(x, y))
        .collect();
    for &(a, b) in &rel.unknown {
        for &x in &rel.partition.bucket(a).members {
            for &y in &rel.partition.bucket(b).members {
                claims.push(Claim::Unknown(x.min(y), x.max(y)));
            }
        }
    }
    claims.sort();
    claims
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::TagMatrix;
    use crate::discovery::{build_marked_order_graph, partition_variables};

    // X=0, Y=1, Z=2, W=3, Q=4
    fn example() -> MarkedOrderGraph {
        let tags = TagMatrix::from_bits(&["10", "01", "11", "11", "10"]).unwrap();
        build_marked_order_graph(&partition_variables(&tags, Some(&[0, 1])).unwrap())
    }

    #[test]
    fn change_example_knowledge() {
        let k = mog_to_background_knowledge(&example());
        assert_eq!(k.required_edges, BTreeSet::from([(0, 4)]));
        let order: BTreeSet<_> = [0, 1, 4].iter().flat_map(|&x| [(x, 2), (x, 3)]).collect();
        assert_eq!(k.order_constraints, order);
        assert_eq!(k.forbidden_edges, BTreeSet::from([(0, 1), (1, 4)]));
        assert_eq!(k.required_paths, BTreeSet::from([(1, 2), (1, 3)]));
        assert!(k.validate(5).is_ok());
    }

    #[test]
    fn single_bucket_gives_nothing() {
        let tags = TagMatrix::from_bits(&["1", "1", "1"]).unwrap();
        let mog = build_marked_order_graph(&partition_variables(&tags, None).unwrap());
        assert!(mog_to_background_knowledge(&mog).is_empty());
    }

    #[test]
    fn ndp_singletons_forbid_edge() {
        let tags = TagMatrix::from_bits(&["10", "01"]).unwrap();
        let mog = build_marked_order_graph(&partition_variables(&tags, None).unwrap());
        let k = mog_to_background_knowledge(&mog);
        assert_eq!(k.forbidden_edges, BTreeSet::from([(0, 1)]));
        assert!(k.order_constraints.is_empty());
    }

    #[test]
    fn claims_render() {
        let names = ["X", "Y", "Z", "W", "Q"];
        let lines: Vec<String> = mog_claims(&example()).iter().map(|c| c.render(&names)).collect();
        assert!(lines.contains(&"EDGE X Q".to_string()));
        assert!(lines.contains(&"PATH Y Z".to_string()));
        assert!(lines.contains(&"NDP X Y".to_string()));
        assert!(lines.contains(&"ORDER Q W".to_string()));
        // 3 sources x {Z, W} + X -> Q order claims, 2 NDP, 1 edge, 2 paths
        assert_eq!(lines.len(), 7 + 2 + 1 + 2);
    }

    #[test]
    fn validation_detects_conflicts() {
        let mut k = BackgroundKnowledge::default();
        k.required_edges.insert((0, 1));
        k.forbid(1, 0);
        assert!(k.validate(2).is_err());
        let mut k = BackgroundKnowledge::default();
        k.order_constraints.insert((0, 1));
        k.order_constraints.insert((1, 2));
        k.order_constraints.insert((2, 0));
        assert!(k.validate(3).is_err());
    }
}
