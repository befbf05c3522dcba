use std::collections::BTreeSet;

use super::{partition_variables, BucketPartition};
use crate::detect::TagMatrix;
use crate::error::{Error, Result};

/// Descendant claims that survive without the influentiality assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoninfluentialRelations {
    pub partition: BucketPartition,
    /// Bucket pairs `(b, b2)` with `b <* b2`: every member of `b2`
    /// descends from the focal variable of `b`.
    pub precedes: BTreeSet<(usize, usize)>,
    /// Bucket pairs ordered both ways by the closure, stored `(min, max)`.
    pub unknown: BTreeSet<(usize, usize)>,
}

impl NoninfluentialRelations {
    /// `(focal variable, descendant)` pairs implied by `<*`.
    pub fn descendant_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.precedes {
            let from = self.partition.bucket(a);
            for &x in &from.members {
                for &y in &self.partition.bucket(b).members {
                    out.insert((x, y));
                }
            }
        }
        out
    }
}

/// The focal bucket of transition `i` precedes every bucket whose bit `i`
/// is set; the relation is then closed transitively and pairs ordered both
/// ways become unknown.
pub fn noninfluential_relations(tags: &TagMatrix, focal_ids: &[usize]) -> Result<NoninfluentialRelations> {
    if focal_ids.len() != tags.k() {
        return Err(Error::InvalidArgument(
            "focal identities are required for every transition".into(),
        ));
    }
    let partition = partition_variables(tags, Some(focal_ids))?;
    let m = partition.len();
    let mut less = vec![vec![false; m]; m];
    for (i, &f) in focal_ids.iter().enumerate() {
        let fb = partition.bucket_of(f);
        for b in 0..m {
            if b != fb && partition.bucket(b).tag[i] {
                less[fb][b] = true;
            }
        }
    }
    for via in 0..m {
        for a in 0..m {
            if less[a][via] {
                for b in 0..m {
                    if less[via][b] {
                        less[a][b] = true;
                    }
                }
            }
        }
    }
    let mut precedes = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    for a in 0..m {
        for b in 0..m {
            if a == b || !less[a][b] {
                continue;
            }
            if less[b][a] {
                unknown.insert((a.min(b), a.max(b)));
            } else {
                precedes.insert((a, b));
            }
        }
    }
    Ok(NoninfluentialRelations {
        partition,
        precedes,
        unknown,
    })
}
