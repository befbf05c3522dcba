use super::ci::{CiOracle, PooledG2Test};
use super::orient::{orient_edges, Cpdag};
use super::skeleton::{learn_skeleton, Skeleton};
use crate::detect::{build_tag_matrix, TagMatrix};
use crate::discovery::{
    build_marked_order_graph, identify_focal_buckets, mog_claims, mog_to_background_knowledge, noninfluential_claims,
    noninfluential_relations, partition_variables, BackgroundKnowledge, BucketPartition, Claim, MarkedOrderGraph,
    NoninfluentialRelations,
};
use crate::error::{Error, Result};
use crate::simulate::TransitionDatasets;

pub const DEFAULT_MAX_COND: usize = 3;

/// Where focal identities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FocalMode {
    /// Taken from the datasets.
    #[default]
    Known,
    /// Recovered from the tags where a unique minimal changed bucket exists.
    Identify,
    /// Not used at all.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoverOptions {
    pub focal: FocalMode,
    /// Assume every change reaches all descendants of its focal variable.
    pub influential: bool,
    pub max_cond: usize,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        Self {
            focal: FocalMode::Known,
            influential: true,
            max_cond: DEFAULT_MAX_COND,
        }
    }
}

/// Every intermediate product of a run.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub tags: TagMatrix,
    pub partition: BucketPartition,
    /// Bucket identified per transition (identify mode only).
    pub identified: Vec<Option<usize>>,
    pub mog: Option<MarkedOrderGraph>,
    pub noninfluential: Option<NoninfluentialRelations>,
    pub claims: Vec<Claim>,
    pub knowledge: BackgroundKnowledge,
    pub skeleton: Skeleton,
    pub cpdag: Cpdag,
}

/// Tags from chi-square change detection, independence from pooled G²
/// tests, both at level `alpha`.
pub fn discover(ts: &TransitionDatasets, alpha: f64, options: &DiscoverOptions) -> Result<Discovery> {
    if ts.k() == 0 {
        return Err(Error::InvalidArgument(
            "no transitions: change-based discovery needs at least two datasets; use plain constraint-based learning"
                .into(),
        ));
    }
    let tags = build_tag_matrix(ts, alpha)?;
    let oracle = PooledG2Test { data: ts, alpha };
    discover_with(tags, ts.focal_ids(), &oracle, options)
}

/// Buckets under the chosen focal mode, plus the bucket identified for
/// each transition in identify mode (empty otherwise).
pub fn focal_partition(
    tags: &TagMatrix,
    focal_ids: Option<&[usize]>,
    mode: FocalMode,
) -> Result<(BucketPartition, Vec<Option<usize>>)> {
    match mode {
        FocalMode::Known => {
            let f = focal_ids.ok_or_else(|| {
                Error::InvalidArgument("focal variables are not known; identify them or run without".into())
            })?;
            Ok((partition_variables(tags, Some(f))?, Vec::new()))
        }
        FocalMode::Identify => {
            let plain = partition_variables(tags, None)?;
            let ids = identify_focal_buckets(&plain);
            Ok((plain.with_focal_assignments(&ids)?, ids))
        }
        FocalMode::Unknown => Ok((partition_variables(tags, None)?, Vec::new())),
    }
}

/// Runs the pipeline on given tags and an arbitrary independence oracle.
pub fn discover_with(
    tags: TagMatrix,
    focal_ids: Option<&[usize]>,
    oracle: &dyn CiOracle,
    options: &DiscoverOptions,
) -> Result<Discovery> {
    if tags.k() == 0 {
        return Err(Error::InvalidArgument("no transitions in the tag matrix".into()));
    }
    if tags.num_variables() != oracle.num_variables() {
        return Err(Error::VariableMismatch);
    }
    let (partition, identified) = focal_partition(&tags, focal_ids, options.focal)?;
    let known = if options.focal == FocalMode::Known {
        focal_ids
    } else {
        None
    };

    let (mog, noninfluential, claims, knowledge) = if options.influential {
        let mog = build_marked_order_graph(&partition);
        let claims = mog_claims(&mog);
        let knowledge = mog_to_background_knowledge(&mog);
        (Some(mog), None, claims, knowledge)
    } else {
        let focal: Vec<usize> = match known {
            Some(f) => f.to_vec(),
            None => identified
                .iter()
                .map(|id| {
                    id.and_then(|b| partition.bucket(b).focal_variable()).ok_or_else(|| {
                        Error::InvalidArgument(
                            "the non-influential analysis needs a focal variable for every transition".into(),
                        )
                    })
                })
                .collect::<Result<_>>()?,
        };
        let rel = noninfluential_relations(&tags, &focal)?;
        let claims = noninfluential_claims(&rel);
        let knowledge = BackgroundKnowledge::from_noninfluential(&rel);
        (None, Some(rel), claims, knowledge)
    };

    let skeleton = learn_skeleton(oracle, &knowledge, options.max_cond)?;
    let cpdag = orient_edges(&skeleton, &knowledge)?;
    Ok(Discovery {
        tags,
        partition,
        identified,
        mog,
        noninfluential,
        claims,
        knowledge,
        skeleton,
        cpdag,
    })
}
