use std::collections::{BTreeMap, BTreeSet};

use super::ci::CiOracle;
use super::order_closure;
use crate::discovery::BackgroundKnowledge;
use crate::error::Result;

/// Undirected adjacency plus the separating set found for each removed
/// pair. A pair missing from `sepsets` was removed without one (it was
/// forbidden and no separating set was found afterwards).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    adjacency: Vec<BTreeSet<usize>>,
    sepsets: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Skeleton {
    pub fn complete(n: usize) -> Self {
        Self {
            adjacency: (0..n).map(|v| (0..n).filter(|&w| w != v).collect()).collect(),
            sepsets: BTreeMap::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], sepsets: BTreeMap<(usize, usize), Vec<usize>>) -> Self {
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Self { adjacency, sepsets }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    /// Edges as `(min, max)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.adjacency[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    pub fn sepset(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.sepsets.get(&(a.min(b), a.max(b))).map(Vec::as_slice)
    }

    fn remove(&mut self, a: usize, b: usize) {
        self.adjacency[a].remove(&b);
        self.adjacency[b].remove(&a);
    }
}

/// All `size`-subsets of `pool`, in lexicographic order.
fn subsets(pool: &[usize], size: usize) -> Vec<Vec<usize>> {
    let n = pool.len();
    if size > n {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        let Some(i) = (0..size).rev().find(|&i| idx[i] != i + n - size) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// PC-style edge removal. Forbidden pairs start removed; required edges
/// are never tested. Candidate conditioning variables exclude anything
/// the knowledge orders after both endpoints. Adjacencies are frozen per
/// depth, so the result does not depend on pair order.
pub fn learn_skeleton(oracle: &dyn CiOracle, knowledge: &BackgroundKnowledge, max_cond: usize) -> Result<Skeleton> {
    let n = oracle.num_variables();
    knowledge.validate(n)?;
    let before = order_closure(knowledge, n);
    let mut sk = Skeleton::complete(n);
    for &(a, b) in &knowledge.forbidden_edges {
        sk.remove(a, b);
    }
    let candidates = |sk: &Skeleton, x: usize, y: usize| -> Vec<usize> {
        sk.neighbors(x)
            .iter()
            .copied()
            .filter(|&c| c != y && !(before[x][c] && before[y][c]))
            .collect()
    };

    for depth in 0..=max_cond {
        let frozen = sk.clone();
        let mut any_tested = false;
        for (x, y) in frozen.edges() {
            if knowledge.is_required(x, y) || !sk.adjacent(x, y) {
                continue;
            }
            'sides: for (a, b) in [(x, y), (y, x)] {
                let pool = candidates(&frozen, a, b);
                if pool.len() < depth {
                    continue;
                }
                any_tested = true;
                for z in subsets(&pool, depth) {
                    if oracle.test(a, b, &z)?.independent {
                        sk.remove(x, y);
                        sk.sepsets.insert((x, y), z);
                        break 'sides;
                    }
                }
            }
        }
        if !any_tested {
            break;
        }
    }

    // separating sets for pairs removed by knowledge alone
    for &(x, y) in &knowledge.forbidden_edges {
        if let Some(z) = find_sepset(oracle, &sk, &before, x, y, max_cond)? {
            sk.sepsets.insert((x, y), z);
        }
    }
    Ok(sk)
}

fn find_sepset(
    oracle: &dyn CiOracle,
    sk: &Skeleton,
    before: &[Vec<bool>],
    x: usize,
    y: usize,
    max_cond: usize,
) -> Result<Option<Vec<usize>>> {
    for depth in 0..=max_cond {
        for (a, b) in [(x, y), (y, x)] {
            let pool: Vec<usize> = sk
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&c| c != b && !(before[x][c] && before[y][c]))
                .collect();
            for z in subsets(&pool, depth) {
                if oracle.test(a, b, &z)?.independent {
                    return Ok(Some(z));
                }
            }
        }
    }
    Ok(None)
}
