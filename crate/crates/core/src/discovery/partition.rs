use std::collections::BTreeSet;

use super::{Bucket, BucketPartition};
use crate::detect::TagMatrix;
use crate::error::{Error, Result};

/// Iterative refinement over the transitions. At step `i` the `i`-th focal
/// variable (when known) leaves its bucket for a singleton focal bucket
/// whose new bit is 1; every other bucket splits into changed and
/// unchanged parts. A focal singleton keeps its bucket and only grows its
/// tag. Without focal identities no focal buckets are created.
pub fn partition_variables(tags: &TagMatrix, focal_ids: Option<&[usize]>) -> Result<BucketPartition> {
    let n = tags.num_variables();
    let k = tags.k();
    if let Some(f) = focal_ids {
        if f.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} focal variables for {k} transitions",
                f.len()
            )));
        }
        if let Some(&bad) = f.iter().find(|&&v| v >= n) {
            return Err(Error::VariableOutOfRange(bad));
        }
    }
    let mut buckets = vec![Bucket {
        tag: Vec::new(),
        members: (0..n).collect(),
        focal_for: BTreeSet::new(),
    }];
    if n == 0 {
        buckets.clear();
    }
    for i in 0..k {
        let focal = focal_ids.map(|f| f[i]);
        let mut next = Vec::with_capacity(buckets.len() + 2);
        for mut bucket in buckets {
            if bucket.is_focal() {
                let v = *bucket.members.iter().next().expect("focal bucket is a singleton");
                if focal == Some(v) {
                    bucket.tag.push(true);
                    bucket.focal_for.insert(i);
                } else {
                    bucket.tag.push(tags.get(v, i));
                }
                next.push(bucket);
                continue;
            }
            if let Some(f) = focal.filter(|f| bucket.members.contains(f)) {
                bucket.members.remove(&f);
                let mut tag = bucket.tag.clone();
                tag.push(true);
                next.push(Bucket {
                    tag,
                    members: BTreeSet::from([f]),
                    focal_for: BTreeSet::from([i]),
                });
            }
            let (changed, unchanged): (BTreeSet<usize>, BTreeSet<usize>) =
                bucket.members.iter().partition(|&&v| tags.get(v, i));
            for (members, bit) in [(changed, true), (unchanged, false)] {
                if !members.is_empty() {
                    let mut tag = bucket.tag.clone();
                    tag.push(bit);
                    next.push(Bucket {
                        tag,
                        members,
                        focal_for: BTreeSet::new(),
                    });
                }
            }
        }
        buckets = next;
    }
    BucketPartition::new(buckets, k)
}
