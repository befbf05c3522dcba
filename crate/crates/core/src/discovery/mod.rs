//! Bucket partitioning, bucket relations, (marked) order graphs, focal
//! bucket identification and the non-influential fallback.
//!
//! A variable's tag records, per transition, whether its marginal changed.
//! Variables with equal tags share a bucket unless they are focal; focal
//! variables get singleton buckets that remember the transitions they were
//! focal for.

mod focal;
mod knowledge;
mod noninfluential;
mod order_graph;
mod partition;
mod relation;

pub use focal::identify_focal_buckets;
pub use knowledge::{mog_claims, mog_to_background_knowledge, noninfluential_claims, BackgroundKnowledge, Claim};
pub use noninfluential::{noninfluential_relations, NoninfluentialRelations};
pub use order_graph::{build_marked_order_graph, build_order_graph, mark_edges, EdgeStyle, MarkedOrderGraph, OgEdge};
pub use partition::partition_variables;
pub use relation::{extract_relation, Relation, Strength};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bucket {
    pub tag: Vec<bool>,
    pub members: BTreeSet<usize>,
    /// Transitions this bucket is focal for; empty for ordinary buckets.
    pub focal_for: BTreeSet<usize>,
}

impl Bucket {
    pub fn is_focal(&self) -> bool {
        !self.focal_for.is_empty()
    }

    /// The focal variable, when the bucket is a focal singleton.
    pub fn focal_variable(&self) -> Option<usize> {
        if self.is_focal() && self.members.len() == 1 {
            self.members.iter().next().copied()
        } else {
            None
        }
    }

    pub fn tag_bits(&self) -> String {
        self.tag.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// `B_10{X,Q}` or `B^f_10{X}` style label.
    pub fn label(&self, names: &[&str]) -> String {
        let members: Vec<&str> = self.members.iter().map(|&m| names[m]).collect();
        let focal = if self.is_focal() { "^f" } else { "" };
        format!("B{focal}_{}{{{}}}", self.tag_bits(), members.join(","))
    }
}

/// Buckets covering every variable exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketPartition {
    buckets: Vec<Bucket>,
    k: usize,
    bucket_of: Vec<usize>,
}

impl BucketPartition {
    pub fn new(mut buckets: Vec<Bucket>, k: usize) -> Result<Self> {
        if buckets.iter().any(|b| b.tag.len() != k) {
            return Err(Error::InvalidArgument("bucket tag length differs from k".into()));
        }
        if buckets.iter().any(|b| b.members.is_empty()) {
            return Err(Error::InvalidArgument("empty bucket".into()));
        }
        if buckets.iter().any(|b| b.focal_for.iter().any(|&l| l >= k)) {
            return Err(Error::InvalidArgument("focal transition index out of range".into()));
        }
        buckets.sort_by(|a, b| {
            b.tag
                .cmp(&a.tag)
                .then(b.is_focal().cmp(&a.is_focal()))
                .then(a.members.cmp(&b.members))
        });
        let n = buckets.iter().map(|b| b.members.len()).sum();
        let mut bucket_of = vec![usize::MAX; n];
        for (i, b) in buckets.iter().enumerate() {
            for &m in &b.members {
                if m >= n || bucket_of[m] != usize::MAX {
                    return Err(Error::InvalidArgument("buckets do not partition the variables".into()));
                }
                bucket_of[m] = i;
            }
        }
        Ok(Self { buckets, k, bucket_of })
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn bucket(&self, i: usize) -> &Bucket {
        &self.buckets[i]
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_variables(&self) -> usize {
        self.bucket_of.len()
    }

    /// Index of the bucket holding variable `v`.
    pub fn bucket_of(&self, v: usize) -> usize {
        self.bucket_of[v]
    }

    /// Index of the bucket whose member set equals `members`.
    pub fn find(&self, members: &[usize]) -> Option<usize> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        self.buckets.iter().position(|b| b.members == set)
    }

    /// Copy in which bucket `ids[j]` (when present) is focal for
    /// transition `j`.
    pub fn with_focal_assignments(&self, ids: &[Option<usize>]) -> Result<Self> {
        if ids.len() != self.k {
            return Err(Error::InvalidArgument("one entry per transition required".into()));
        }
        let mut buckets = self.buckets.clone();
        for (j, id) in ids.iter().enumerate() {
            if let Some(b) = *id {
                if b >= buckets.len() {
                    return Err(Error::InvalidArgument(format!("bucket {b} does not exist")));
                }
                buckets[b].focal_for.insert(j);
            }
        }
        Self::new(buckets, self.k)
    }
}
