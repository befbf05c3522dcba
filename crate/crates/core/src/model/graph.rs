//! Graph algorithms over causal diagrams.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use super::{CausalDiagram, VariableSpec};
use crate::error::{Error, Result};

/// Largest variable count accepted by [`enumerate_dags`].
pub const MAX_ENUMERATION_VARIABLES: usize = 5;

impl CausalDiagram {
    /// Kahn's algorithm; the smallest ready index goes first.
    pub(crate) fn try_topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parent_lists().iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (c, pa) in self.parent_lists().iter().enumerate() {
            for &p in pa {
                children[p].push(c);
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Parents-before-children ordering, ties broken by variable index.
    pub fn topological_order(&self) -> Vec<usize> {
        self.try_topological_order().expect("diagram is acyclic")
    }

    /// Every variable reachable from `v` by a directed path, excluding `v`.
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let children: Vec<Vec<usize>> = (0..self.len()).map(|i| self.children(i)).collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// Every variable with a directed path into `v`, excluding `v`.
    pub fn ancestors(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &p in self.parents(u) {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// `reach[i][j]` is true iff a directed path of length >= 1 leads from
    /// `i` to `j`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut reach = vec![vec![false; n]; n];
        // reverse topological order so children are complete first
        for &v in self.topological_order().iter().rev() {
            for c in self.children(v) {
                reach[v][c] = true;
                for j in 0..n {
                    if reach[c][j] {
                        reach[v][j] = true;
                    }
                }
            }
        }
        reach
    }

    pub fn has_directed_path(&self, from: usize, to: usize) -> bool {
        from != to && self.descendants(from).contains(&to)
    }

    /// Unordered adjacent pairs, each stored as `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()
    }

    /// Unshielded colliders `a -> c <- b`, stored with `a < b`.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.len() {
            let pa = self.parents(c);
            for (x, &a) in pa.iter().enumerate() {
                for &b in &pa[x + 1..] {
                    if !self.adjacent(a, b) {
                        out.insert((a.min(b), c, a.max(b)));
                    }
                }
            }
        }
        out
    }

    /// Edge `i -> j` for every directed path `i ~> j`.
    pub fn transitive_closure(&self) -> CausalDiagram {
        let reach = self.reachability();
        let n = self.len();
        let parents = (0..n).map(|j| (0..n).filter(|&i| reach[i][j]).collect()).collect();
        CausalDiagram::new(self.variables().to_vec(), parents).expect("closure of a DAG is a DAG")
    }

    /// Drops `i -> j` whenever a path of two or more steps also leads from
    /// `i` to `j`. Unique for DAGs.
    pub fn transitive_reduction(&self) -> CausalDiagram {
        let reach = self.reachability();
        let n = self.len();
        let parents = (0..n)
            .map(|j| {
                let mut kept: Vec<usize> = self
                    .parents(j)
                    .iter()
                    .copied()
                    .filter(|&i| !self.children(i).iter().any(|&c| c != j && reach[c][j]))
                    .collect();
                kept.sort_unstable();
                kept
            })
            .collect();
        CausalDiagram::new(self.variables().to_vec(), parents).expect("subgraph of a DAG is a DAG")
    }

    /// d-separation of `x` and `y` given `z`, by the reachable-trail search.
    pub fn d_separated(&self, x: usize, y: usize, z: &[usize]) -> bool {
        let n = self.len();
        let in_z: Vec<bool> = (0..n).map(|i| z.contains(&i)).collect();
        if in_z[x] || in_z[y] {
            return true;
        }
        // ancestors of the conditioning set, including itself
        let mut anc_z = in_z.clone();
        let mut stack: Vec<usize> = z.to_vec();
        while let Some(u) = stack.pop() {
            for &p in self.parents(u) {
                if !anc_z[p] {
                    anc_z[p] = true;
                    stack.push(p);
                }
            }
        }
        let children: Vec<Vec<usize>> = (0..n).map(|i| self.children(i)).collect();
        // direction: true = arrived from a child (moving up)
        let mut visited = vec![[false; 2]; n];
        let mut queue = VecDeque::from([(x, true)]);
        while let Some((v, up)) = queue.pop_front() {
            let slot = usize::from(up);
            if visited[v][slot] {
                continue;
            }
            visited[v][slot] = true;
            if v == y && !in_z[v] {
                return false;
            }
            if up {
                if !in_z[v] {
                    queue.extend(self.parents(v).iter().map(|&p| (p, true)));
                    queue.extend(children[v].iter().map(|&c| (c, false)));
                }
            } else {
                if !in_z[v] {
                    queue.extend(children[v].iter().map(|&c| (c, false)));
                }
                if anc_z[v] {
                    queue.extend(self.parents(v).iter().map(|&p| (p, true)));
                }
            }
        }
        true
    }
}

/// Every DAG over `variables`, in a fixed order. Limited to
/// [`MAX_ENUMERATION_VARIABLES`] variables (29281 DAGs at n = 5).
pub fn enumerate_dags(variables: &[VariableSpec]) -> Result<Vec<CausalDiagram>> {
    let n = variables.len();
    if n > MAX_ENUMERATION_VARIABLES {
        return Err(Error::TooManyVariables {
            n,
            max: MAX_ENUMERATION_VARIABLES,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    let mut parents = vec![Vec::new(); n];
    for code in 0..total {
        for pa in parents.iter_mut() {
            pa.clear();
        }
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => parents[b].push(a),
                2 => parents[a].push(b),
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(&parents) {
            for pa in parents.iter_mut() {
                pa.sort_unstable();
            }
            out.push(CausalDiagram::new(variables.to_vec(), parents.clone()).expect("acyclic by check"));
        }
    }
    Ok(out)
}

fn is_acyclic(parents: &[Vec<usize>]) -> bool {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for (c, pa) in parents.iter().enumerate() {
            if pa.contains(&v) {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
    }
    seen == n
}
