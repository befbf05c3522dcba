//! File-level operations behind the command-line subcommands.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::data::{load_manifest, write_dataset, LoadedManifest, Manifest};
use super::network::{load_network, write_network};
use crate::detect::{build_tag_matrix, exact_tag_matrix, TagMatrix};
use crate::error::{Error, Result};
use crate::hybrid::{discover_with, CiOracle, DSeparationOracle, DiscoverOptions, Discovery, FocalMode, PooledG2Test};
use crate::model::{enumerate_dags, CausalDiagram, VariableSpec};
use crate::score::{posterior_over, GraphPrior};
use crate::simulate::{forward_sample, generate_transition_sequence, TransitionScenario, INFLUENCE_TOLERANCE};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    pub network: PathBuf,
    /// Focal variable names; when empty, `k` random distinct variables.
    pub focal: Vec<String>,
    pub k: usize,
    pub delta: f64,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Writes `network.net`, `data_<j>.csv`, `truth_<j>.net` and
/// `manifest.toml` into `out`; returns the manifest path.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<PathBuf> {
    let model = load_network(&args.network)?;
    let g = model.diagram();
    let focal: Vec<usize> = if args.focal.is_empty() {
        if args.k > g.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds the {} variables",
                args.k,
                g.len()
            )));
        }
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(args.seed));
        order.truncate(args.k);
        order
    } else {
        args.focal
            .iter()
            .map(|n| g.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?
    };
    if args.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (datasets, models) = if focal.is_empty() {
        (vec![forward_sample(&model, args.n, args.seed)], vec![model.clone()])
    } else {
        let (ts, sc) = generate_transition_sequence(&model, &focal, args.delta, args.n, args.seed)?;
        (ts.datasets().to_vec(), sc.models().to_vec())
    };
    create_dir(&args.out)?;
    write_file(&args.out.join("network.net"), &write_network(&model))?;
    let mut manifest = Manifest {
        datasets: Vec::new(),
        focal: (!focal.is_empty()).then(|| focal.iter().map(|&f| g.name(f).to_string()).collect()),
        delta: (!focal.is_empty()).then_some(args.delta),
        seed: Some(args.seed),
        n: Some(args.n),
        network: Some("network.net".into()),
        truth: Vec::new(),
    };
    for (j, (d, m)) in datasets.iter().zip(&models).enumerate() {
        let data_name = format!("data_{j}.csv");
        let truth_name = format!("truth_{j}.net");
        write_file(&args.out.join(&data_name), &write_dataset(d))?;
        write_file(&args.out.join(&truth_name), &write_network(m))?;
        manifest.datasets.push(data_name.into());
        manifest.truth.push(truth_name.into());
    }
    let path = args.out.join("manifest.toml");
    write_file(&path, &manifest.to_toml())?;
    Ok(path)
}

/// Tag matrix of a manifest's datasets.
pub fn cmd_detect(manifest: &Path, alpha: f64) -> Result<String> {
    let m = load_manifest(manifest)?;
    let tags = build_tag_matrix(&m.data, alpha)?;
    Ok(tags.to_tsv(&m.names()))
}

/// Ground truth of a simulated manifest: the scenario's tags and the
/// generating diagram.
fn oracle_inputs(m: &LoadedManifest) -> Result<(TagMatrix, CausalDiagram)> {
    if m.manifest.truth.len() != m.data.datasets().len() {
        return Err(Error::InvalidArgument(
            "oracle mode needs one ground-truth model per dataset in the manifest".into(),
        ));
    }
    let focal = m
        .data
        .focal_ids()
        .ok_or_else(|| Error::InvalidArgument("oracle mode needs focal names in the manifest".into()))?;
    let models = m
        .manifest
        .truth
        .iter()
        .map(|p| load_network(&m.resolve(p)))
        .collect::<Result<Vec<_>>>()?;
    let base = models[0].clone();
    let scenario = TransitionScenario::from_models(models, focal.to_vec())?;
    Ok((
        exact_tag_matrix(&scenario, INFLUENCE_TOLERANCE)?,
        base.diagram().clone(),
    ))
}

#[derive(Debug, Clone)]
pub struct DiscoverArgs {
    pub manifest: PathBuf,
    pub alpha: f64,
    pub options: DiscoverOptions,
    /// Exact tags and d-separation from the manifest's ground truth.
    pub oracle: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct DiscoverOutput {
    pub discovery: Discovery,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

impl DiscoverOutput {
    pub fn conflicts(&self) -> usize {
        self.discovery.cpdag.conflicts().len()
    }
}

/// Runs the full pipeline and writes `tags.tsv`, `mog.dot` (influential
/// mode), `claims.txt`, `cpdag.dot` and `summary.txt`.
pub fn cmd_discover(args: &DiscoverArgs) -> Result<DiscoverOutput> {
    let m = load_manifest(&args.manifest)?;
    if m.data.k() == 0 {
        return Err(Error::InvalidArgument(
            "the manifest has a single dataset; change-based discovery needs transitions".into(),
        ));
    }
    let names = m.names();
    let truth;
    let (tags, oracle): (TagMatrix, Box<dyn CiOracle + '_>) = if args.oracle {
        let (tags, g) = oracle_inputs(&m)?;
        truth = g;
        (tags, Box::new(DSeparationOracle { diagram: &truth }))
    } else {
        let pooled = PooledG2Test {
            data: &m.data,
            alpha: args.alpha,
        };
        (build_tag_matrix(&m.data, args.alpha)?, Box::new(pooled))
    };
    let mut options = args.options;
    if options.focal == FocalMode::Known && m.data.focal_ids().is_none() {
        // no names in the manifest: buckets without focal identities
        options.focal = FocalMode::Unknown;
    }
    let d = discover_with(tags, m.data.focal_ids(), oracle.as_ref(), &options)?;

    create_dir(&args.out)?;
    let mut files = Vec::new();
    let mut emit = |name: &str, text: &str| -> Result<()> {
        let p = args.out.join(name);
        write_file(&p, text)?;
        files.push(p);
        Ok(())
    };
    emit("tags.tsv", &d.tags.to_tsv(&names))?;
    if let Some(mog) = &d.mog {
        emit("mog.dot", &mog.to_dot(&names))?;
    }
    let claims: String = d.claims.iter().map(|c| c.render(&names) + "\n").collect();
    emit("claims.txt", &claims)?;
    emit("cpdag.dot", &d.cpdag.to_dot(&names))?;
    let summary = summarize(&d, &names, options.focal);
    emit("summary.txt", &summary)?;
    Ok(DiscoverOutput {
        discovery: d,
        files,
        summary,
    })
}

fn summarize(d: &Discovery, names: &[&str], mode: FocalMode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "buckets: {}", d.partition.len());
    for b in d.partition.buckets() {
        let _ = writeln!(s, "  {}", b.label(names));
    }
    if mode == FocalMode::Identify {
        for (j, id) in d.identified.iter().enumerate() {
            match id {
                Some(b) => {
                    let _ = writeln!(
                        s,
                        "transition {}: focal bucket {}",
                        j + 1,
                        d.partition.bucket(*b).label(names)
                    );
                }
                None => {
                    let _ = writeln!(s, "transition {}: focal bucket not identifiable", j + 1);
                }
            }
        }
    }
    let _ = writeln!(
        s,
        "claims: {}\ndirected edges: {}\nundirected edges: {}\nconflicts: {}",
        d.claims.len(),
        d.cpdag.directed_edges().len(),
        d.cpdag.undirected_edges().len(),
        d.cpdag.conflicts().len()
    );
    for c in d.cpdag.conflicts() {
        let _ = writeln!(s, "  {} - {}: {}", names[c.a], names[c.b], c.reason);
    }
    s
}

/// Parses one diagram per line in the score report's id format
/// (`A:;B:A;C:A,B`). Blank lines and `#` comments are skipped.
pub fn parse_diagram_list(text: &str, variables: &[VariableSpec]) -> Result<Vec<CausalDiagram>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: no + 1, message };
        let mut parents = vec![None; variables.len()];
        for family in line.split(';') {
            let (child, pa) = family
                .split_once(':')
                .ok_or_else(|| err(format!("expected `name:parents` in `{family}`")))?;
            let idx = |n: &str| {
                variables
                    .iter()
                    .position(|v| v.name() == n.trim())
                    .ok_or_else(|| err(format!("unknown variable `{}`", n.trim())))
            };
            let c = idx(child)?;
            let list = pa
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(idx)
                .collect::<Result<Vec<usize>>>()?;
            if parents[c].replace(list).is_some() {
                return Err(err(format!("`{}` listed twice", child.trim())));
            }
        }
        let parents: Vec<Vec<usize>> = parents.into_iter().map(Option::unwrap_or_default).collect();
        out.push(CausalDiagram::new(variables.to_vec(), parents).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

/// Score report for listed diagrams or, with `diagrams = None`, every DAG
/// on the manifest's variables.
pub fn cmd_score(manifest: &Path, diagrams: Option<&Path>, ess: f64) -> Result<String> {
    let m = load_manifest(manifest)?;
    let focal: Vec<usize> = match m.data.focal_ids() {
        Some(f) => f.to_vec(),
        None if m.data.k() == 0 => Vec::new(),
        None => {
            return Err(Error::InvalidArgument(
                "scoring a transition sequence needs focal names in the manifest".into(),
            ))
        }
    };
    let list = match diagrams {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            parse_diagram_list(&text, &m.variables)?
        }
        None => enumerate_dags(&m.variables)?,
    };
    if list.is_empty() {
        return Err(Error::EmptyData("no diagrams to score".into()));
    }
    Ok(posterior_over(&m.data, list, &focal, ess, &GraphPrior::Uniform)?.to_report())
}
