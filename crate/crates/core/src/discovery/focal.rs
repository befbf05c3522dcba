use super::{extract_relation, BucketPartition};

/// For each transition `j`, the unique bucket among those whose bit `j`
/// is set that precedes every other such bucket; `None` when no unique
/// such bucket exists or no bucket changed.
pub fn identify_focal_buckets(partition: &BucketPartition) -> Vec<Option<usize>> {
    (0..partition.k())
        .map(|j| {
            let changed: Vec<usize> = (0..partition.len()).filter(|&b| partition.bucket(b).tag[j]).collect();
            let minimal: Vec<usize> = changed
                .iter()
                .copied()
                .filter(|&b| {
                    changed.iter().all(|&other| {
                        other == b || extract_relation(partition.bucket(b), partition.bucket(other)).is_less()
                    })
                })
                .collect();
            match minimal.as_slice() {
                [only] => Some(*only),
                _ => None,
            }
        })
        .collect()
}
