use std::collections::BTreeSet;
use std::fmt::Write;

use super::order_closure;
use super::skeleton::Skeleton;
use crate::discovery::BackgroundKnowledge;
use crate::error::{Error, Result};
use crate::model::{CausalDiagram, VariableSpec};

/// Most undirected edges [`Cpdag::consistent_extensions`] will enumerate.
pub const MAX_EXTENSION_EDGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Conflict {
    pub a: usize,
    pub b: usize,
    pub reason: String,
}

/// Partially directed graph: directed edges, undirected edges stored
/// `(min, max)`, and the pairs left undirected because of a conflict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    n: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
    flagged: BTreeSet<(usize, usize)>,
    conflicts: Vec<Conflict>,
    knowledge_oriented: BTreeSet<(usize, usize)>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Cpdag {
    /// All edges of the skeleton undirected.
    pub fn from_skeleton(sk: &Skeleton) -> Self {
        Self {
            n: sk.len(),
            directed: BTreeSet::new(),
            undirected: sk.edges().into_iter().collect(),
            flagged: BTreeSet::new(),
            conflicts: Vec::new(),
            knowledge_oriented: BTreeSet::new(),
        }
    }

    /// Every edge of `g`, directed.
    pub fn from_diagram(g: &CausalDiagram) -> Self {
        Self {
            n: g.len(),
            directed: g.edges().into_iter().collect(),
            undirected: BTreeSet::new(),
            flagged: BTreeSet::new(),
            conflicts: Vec::new(),
            knowledge_oriented: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn directed_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn is_flagged(&self, a: usize, b: usize) -> bool {
        self.flagged.contains(&key(a, b))
    }

    /// Orientations made by background knowledge.
    pub fn knowledge_oriented(&self) -> &BTreeSet<(usize, usize)> {
        &self.knowledge_oriented
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&key(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_undirected(a, b) || self.has_directed(a, b) || self.has_directed(b, a)
    }

    /// Skeleton pairs `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.directed
            .iter()
            .map(|&(a, b)| key(a, b))
            .chain(self.undirected.iter().copied())
            .collect()
    }

    fn orient(&mut self, a: usize, b: usize) {
        self.undirected.remove(&key(a, b));
        self.directed.insert((a, b));
    }

    fn flag(&mut self, a: usize, b: usize, reason: String) {
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        self.undirected.insert(key(a, b));
        if self.flagged.insert(key(a, b)) {
            self.conflicts.push(Conflict { a, b, reason });
        }
    }

    /// Directed reachability (reflexive).
    fn reach(&self) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; self.n]; self.n];
        for (v, row) in r.iter_mut().enumerate() {
            row[v] = true;
        }
        for &(a, b) in &self.directed {
            r[a][b] = true;
        }
        for via in 0..self.n {
            for a in 0..self.n {
                if r[a][via] {
                    for b in 0..self.n {
                        if r[via][b] {
                            r[a][b] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// Whether orienting `a -> b` would close a directed cycle or create a
    /// directed path against a knowledge ordering.
    fn vetoed(&self, a: usize, b: usize, before: &[Vec<bool>]) -> bool {
        let r = self.reach();
        if r[b][a] {
            return true;
        }
        // new paths run y ~> a -> b ~> x
        (0..self.n).any(|y| r[y][a] && (0..self.n).any(|x| r[b][x] && before[x][y]))
    }

    /// Applies knowledge orientations, then the four Meek rules to a
    /// fixed point. Running it again on its own output changes nothing.
    pub fn close(&mut self, knowledge: &BackgroundKnowledge) -> Result<()> {
        knowledge.validate(self.n)?;
        let before = order_closure(knowledge, self.n);
        self.apply_knowledge(knowledge, &before);
        self.apply_meek(&before);
        Ok(())
    }

    fn apply_knowledge(&mut self, knowledge: &BackgroundKnowledge, before: &[Vec<bool>]) {
        for (a, b) in self.skeleton() {
            let (x, y) = if knowledge.required_edges.contains(&(a, b)) || before[a][b] {
                (a, b)
            } else if knowledge.required_edges.contains(&(b, a)) || before[b][a] {
                (b, a)
            } else {
                continue;
            };
            if self.has_directed(y, x) {
                self.flag(
                    x,
                    y,
                    format!("knowledge orders {x} before {y} but the data orient {y} -> {x}"),
                );
            } else if self.has_undirected(x, y) && !self.is_flagged(x, y) {
                self.orient(x, y);
                self.knowledge_oriented.insert((x, y));
            }
        }
    }

    fn neighbors_undirected(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&w| w != v && self.has_undirected(v, w))
    }

    fn meek_applies(&self, u: usize, v: usize) -> bool {
        let n = self.n;
        // R1: w -> u - v, w and v nonadjacent
        if (0..n).any(|w| self.has_directed(w, u) && w != v && !self.adjacent(w, v)) {
            return true;
        }
        // R2: u -> w -> v
        if (0..n).any(|w| self.has_directed(u, w) && self.has_directed(w, v)) {
            return true;
        }
        let und: Vec<usize> = self.neighbors_undirected(u).filter(|&w| w != v).collect();
        // R3: u - w1 -> v, u - w2 -> v, w1 and w2 nonadjacent
        for (i, &w1) in und.iter().enumerate() {
            for &w2 in &und[i + 1..] {
                if self.has_directed(w1, v) && self.has_directed(w2, v) && !self.adjacent(w1, w2) {
                    return true;
                }
            }
        }
        // R4: u - c -> d -> v, u adjacent d, c and v nonadjacent
        und.iter().any(|&c| {
            !self.adjacent(c, v)
                && (0..n).any(|d| d != u && self.has_directed(c, d) && self.has_directed(d, v) && self.adjacent(u, d))
        })
    }

    fn apply_meek(&mut self, before: &[Vec<bool>]) {
        loop {
            let mut changed = false;
            let pending: Vec<(usize, usize)> = self.undirected.difference(&self.flagged).copied().collect();
            for (a, b) in pending {
                for (u, v) in [(a, b), (b, a)] {
                    if self.has_undirected(u, v) && self.meek_applies(u, v) && !self.vetoed(u, v, before) {
                        self.orient(u, v);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Colliders `a -> c <- b` with `a`, `b` nonadjacent, `a < b`.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.n {
            let pa: Vec<usize> = (0..self.n).filter(|&p| self.has_directed(p, c)).collect();
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.insert((a, c, b));
                    }
                }
            }
        }
        out
    }

    /// DAGs that keep every directed edge, orient every undirected one and
    /// introduce no new v-structure.
    pub fn consistent_extensions(&self, variables: &[VariableSpec]) -> Result<Vec<CausalDiagram>> {
        if variables.len() != self.n {
            return Err(Error::VariableMismatch);
        }
        let und: Vec<(usize, usize)> = self.undirected.iter().copied().collect();
        if und.len() > MAX_EXTENSION_EDGES {
            return Err(Error::InvalidArgument(format!(
                "{} undirected edges exceed the enumeration limit {MAX_EXTENSION_EDGES}",
                und.len()
            )));
        }
        let target = self.v_structures();
        let mut out = Vec::new();
        for mask in 0u32..(1 << und.len()) {
            let mut edges: Vec<(usize, usize)> = self.directed.iter().copied().collect();
            for (i, &(a, b)) in und.iter().enumerate() {
                edges.push(if mask >> i & 1 == 1 { (b, a) } else { (a, b) });
            }
            if let Ok(g) = CausalDiagram::from_edges(variables.to_vec(), &edges) {
                if g.v_structures() == target {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }

    /// Graphviz rendering with a leading comment block listing knowledge
    /// orientations and conflicts.
    pub fn to_dot(&self, names: &[&str]) -> String {
        let mut out = String::new();
        for &(a, b) in &self.knowledge_oriented {
            let _ = writeln!(out, "// knowledge: {} -> {}", names[a], names[b]);
        }
        for c in &self.conflicts {
            let _ = writeln!(out, "// conflict: {} - {}: {}", names[c.a], names[c.b], c.reason);
        }
        out.push_str("digraph cpdag {\n");
        for (i, name) in names.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{name}\"];");
        }
        for &(a, b) in &self.directed {
            let _ = writeln!(out, "  v{a} -> v{b};");
        }
        for &(a, b) in &self.undirected {
            let attrs = if self.flagged.contains(&(a, b)) {
                "dir=none, color=red, conflict=true"
            } else {
                "dir=none"
            };
            let _ = writeln!(out, "  v{a} -> v{b} [{attrs}];");
        }
        out.push_str("}\n");
        out
    }
}

/// Orients a learned skeleton: v-structures from the separating sets,
/// then knowledge, then the Meek rules. Pairs removed without a
/// separating set never form colliders. Two colliders disagreeing on an
/// edge, or knowledge contradicting a collider, leave that edge
/// undirected and recorded as a conflict.
pub fn orient_edges(sk: &Skeleton, knowledge: &BackgroundKnowledge) -> Result<Cpdag> {
    let n = sk.len();
    knowledge.validate(n)?;
    let mut c = Cpdag::from_skeleton(sk);
    let mut proposals = BTreeSet::new();
    for z in 0..n {
        let nb: Vec<usize> = sk.neighbors(z).iter().copied().collect();
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                if sk.adjacent(x, y) {
                    continue;
                }
                if let Some(s) = sk.sepset(x, y) {
                    if !s.contains(&z) {
                        proposals.insert((x, z));
                        proposals.insert((y, z));
                    }
                }
            }
        }
    }
    for &(a, b) in &proposals {
        if proposals.contains(&(b, a)) {
            c.flag(a.min(b), a.max(b), "colliders disagree on this edge".into());
        } else {
            c.orient(a, b);
        }
    }
    c.close(knowledge)?;
    Ok(c)
}
