//! Dataset files (CSV of state labels) and run manifests (TOML).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::network::load_network;
use crate::error::{Error, Result};
use crate::model::VariableSpec;
use crate::simulate::{Dataset, TransitionDatasets};

fn csv_err(path: &str, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::Parse {
            line: pos.line() as usize,
            message: format!("{path}: {e}"),
        },
        None => Error::Io(format!("{path}: {e}")),
    }
}

/// Header of variable names, then one case per row of state labels.
pub fn write_dataset(data: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let vars = data.variables();
    w.write_record(vars.iter().map(VariableSpec::name))
        .expect("in-memory write");
    for case in data.cases() {
        w.write_record(case.iter().zip(vars).map(|(&s, v)| v.states()[s].as_str()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("labels are UTF-8")
}

fn read_records(text: &str, source: &str) -> Result<(Vec<String>, Vec<(usize, Vec<String>)>)> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(source, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            message: format!("{source}: missing header row"),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(source, e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok((header, rows))
}

/// Parses a dataset over known variables. Columns may come in any order
/// but must name every variable exactly once.
pub fn parse_dataset(text: &str, variables: &[VariableSpec], source: &str) -> Result<Dataset> {
    let (header, rows) = read_records(text, source)?;
    let mut column_of = vec![None; variables.len()];
    for (c, name) in header.iter().enumerate() {
        let v = variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        if column_of[v].replace(c).is_some() {
            return Err(Error::Parse {
                line: 1,
                message: format!("{source}: column `{name}` repeated"),
            });
        }
    }
    if let Some(v) = column_of.iter().position(Option::is_none) {
        return Err(Error::Parse {
            line: 1,
            message: format!("{source}: no column for `{}`", variables[v].name()),
        });
    }
    let mut cases = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let case = variables
            .iter()
            .zip(&column_of)
            .map(|(v, c)| {
                let label = &row[c.expect("checked")];
                v.state_index(label).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("{source}: `{label}` is not a state of `{}`", v.name()),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        cases.push(case);
    }
    Dataset::new(variables.to_vec(), cases)
}

/// Variables inferred from data files alone: the header of the first file
/// fixes names and order, states are the sorted union of labels seen.
pub fn infer_variables(texts: &[(String, String)]) -> Result<Vec<VariableSpec>> {
    let mut names: Option<Vec<String>> = None;
    let mut states: Vec<BTreeSet<String>> = Vec::new();
    for (source, text) in texts {
        let (header, rows) = read_records(text, source)?;
        let order: Vec<usize> = match &names {
            None => {
                states = vec![BTreeSet::new(); header.len()];
                let order = (0..header.len()).collect();
                names = Some(header);
                order
            }
            Some(n) => {
                let mut sorted_a = n.clone();
                let mut sorted_b = header.clone();
                sorted_a.sort();
                sorted_b.sort();
                if sorted_a != sorted_b {
                    return Err(Error::VariableMismatch);
                }
                header
                    .iter()
                    .map(|h| n.iter().position(|x| x == h).expect("same names"))
                    .collect()
            }
        };
        for (_, row) in rows {
            for (c, label) in row.into_iter().enumerate() {
                states[order[c]].insert(label);
            }
        }
    }
    let names = names.ok_or_else(|| Error::EmptyData("no dataset files".into()))?;
    names
        .into_iter()
        .zip(states)
        .map(|(n, s)| {
            let mut s: Vec<String> = s.into_iter().collect();
            if s.is_empty() {
                s.push("unobserved".into());
            }
            VariableSpec::new(n, s)
        })
        .collect()
}

/// Description of a transition sequence on disk. Relative paths resolve
/// against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// `D^0..D^k`, in transition order.
    pub datasets: Vec<PathBuf>,
    /// Focal variable names, one per transition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Network that fixes variable domains (and generated the data).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    /// Ground-truth models `M^0..M^k`, when known.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub truth: Vec<PathBuf>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// A manifest with its data read and resolved.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: Manifest,
    pub variables: Vec<VariableSpec>,
    /// Datasets with focal identities when the manifest names them.
    pub data: TransitionDatasets,
    pub base: PathBuf,
}

impl LoadedManifest {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(VariableSpec::name).collect()
    }
}

/// Reads a manifest and every dataset it lists. Empty datasets are
/// rejected.
pub fn load_manifest(path: &Path) -> Result<LoadedManifest> {
    let manifest = Manifest::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    if manifest.datasets.is_empty() {
        return Err(Error::EmptyData("manifest lists no datasets".into()));
    }
    let texts = manifest
        .datasets
        .iter()
        .map(|p| {
            let full = base.join(p);
            std::fs::read_to_string(&full)
                .map(|t| (full.display().to_string(), t))
                .map_err(|e| Error::Io(format!("{}: {e}", full.display())))
        })
        .collect::<Result<Vec<(String, String)>>>()?;
    let variables = match &manifest.network {
        Some(net) => load_network(&base.join(net))?.diagram().variables().to_vec(),
        None => infer_variables(&texts)?,
    };
    let datasets = texts
        .iter()
        .map(|(src, text)| {
            let d = parse_dataset(text, &variables, src)?;
            if d.is_empty() {
                return Err(Error::EmptyData(format!("{src} has no cases")));
            }
            Ok(d)
        })
        .collect::<Result<Vec<Dataset>>>()?;
    let focal = match &manifest.focal {
        Some(names) => Some(
            names
                .iter()
                .map(|n| {
                    variables
                        .iter()
                        .position(|v| v.name() == n)
                        .ok_or_else(|| Error::UnknownVariable(n.clone()))
                })
                .collect::<Result<Vec<usize>>>()?,
        ),
        None => None,
    };
    let data = TransitionDatasets::new(datasets, focal)?;
    Ok(LoadedManifest {
        manifest,
        variables,
        data,
        base,
    })
}
