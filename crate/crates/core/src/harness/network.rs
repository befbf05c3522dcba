//! Text format for causal Bayesian networks.
//!
//! ```text
//! # comment
//! variable Rain { states: no, yes }
//! variable Wet { states: dry, wet }
//! parents Wet: Rain
//! cpt Rain: 0.8, 0.2
//! cpt Wet | no: 0.9, 0.1
//! cpt Wet | yes: 0.2, 0.8
//! ```
//!
//! A `cpt` line is keyed by the parent states in declared parent order;
//! a root's key is empty (`cpt Rain | : ...` is also accepted). Every
//! parent configuration must appear exactly once. Written files list rows
//! row-major with the last parent varying fastest.

use std::collections::HashMap;
use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CausalDiagram, CausalModel, Cpt, VariableSpec};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
}

fn split_list(s: &str, line: usize, what: &str) -> Result<Vec<String>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let item = item.trim();
            if is_identifier(item) {
                Ok(item.to_string())
            } else {
                Err(parse_err(line, format!("invalid {what} `{item}`")))
            }
        })
        .collect()
}

/// Parses the network text format.
pub fn parse_network(text: &str) -> Result<CausalModel<f64>> {
    let mut variables: Vec<VariableSpec> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut parents: Vec<(usize, Vec<String>)> = Vec::new();
    let mut cpts: Vec<(usize, String, Vec<String>, Vec<f64>)> = Vec::new();

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((no, raw)) = lines.next() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "variable" => {
                // a block may span several lines
                let mut block = rest.to_string();
                while !block.contains('}') {
                    let (_, more) = lines
                        .next()
                        .ok_or_else(|| parse_err(no, "unterminated variable block"))?;
                    block.push(' ');
                    block.push_str(more.split('#').next().unwrap_or(""));
                }
                let (head, body) = block
                    .split_once('{')
                    .ok_or_else(|| parse_err(no, "expected `{` after the variable name"))?;
                let name = head.trim();
                if !is_identifier(name) {
                    return Err(parse_err(no, format!("invalid variable name `{name}`")));
                }
                let (body, tail) = body.split_once('}').expect("checked above");
                if !tail.trim().is_empty() {
                    return Err(parse_err(no, "unexpected text after `}`"));
                }
                let states = body
                    .trim()
                    .strip_prefix("states")
                    .and_then(|s| s.trim_start().strip_prefix(':'))
                    .ok_or_else(|| parse_err(no, "expected `states:` inside the variable block"))?;
                let states = split_list(states, no, "state")?;
                let spec = VariableSpec::new(name, states).map_err(|e| parse_err(no, e.to_string()))?;
                if index.insert(name.to_string(), variables.len()).is_some() {
                    return Err(parse_err(no, format!("variable `{name}` declared twice")));
                }
                variables.push(spec);
            }
            "parents" => {
                let (name, list) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(no, "expected `parents <name>: <list>`"))?;
                let mut names = vec![name.trim().to_string()];
                names.extend(split_list(list, no, "parent name")?);
                parents.push((no, names));
            }
            "cpt" => {
                let (head, values) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(no, "expected `cpt <name> | <config>: <probabilities>`"))?;
                let (name, key) = match head.split_once('|') {
                    Some((n, k)) => (n.trim(), split_list(k, no, "state")?),
                    None => (head.trim(), Vec::new()),
                };
                let probs = values
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| parse_err(no, format!("invalid probability `{}`", v.trim())))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                cpts.push((no, name.to_string(), key, probs));
            }
            other => return Err(parse_err(no, format!("unknown keyword `{other}`"))),
        }
    }
    if variables.is_empty() {
        return Err(parse_err(1, "no variables declared"));
    }

    let lookup = |name: &str, line: usize| -> Result<usize> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| parse_err(line, format!("unknown variable `{name}`")))
    };
    let n = variables.len();
    let mut parent_lists: Vec<Option<Vec<usize>>> = vec![None; n];
    for (line, names) in &parents {
        let child = lookup(&names[0], *line)?;
        if parent_lists[child].is_some() {
            return Err(parse_err(*line, format!("parents of `{}` declared twice", names[0])));
        }
        let list = names[1..]
            .iter()
            .map(|p| lookup(p, *line))
            .collect::<Result<Vec<usize>>>()?;
        parent_lists[child] = Some(list);
    }
    let parent_lists: Vec<Vec<usize>> = parent_lists.into_iter().map(Option::unwrap_or_default).collect();
    let first_parents_line = parents.first().map_or(1, |p| p.0);
    let diagram =
        CausalDiagram::new(variables, parent_lists).map_err(|e| parse_err(first_parents_line, e.to_string()))?;

    let mut rows: Vec<Vec<Option<(usize, Vec<f64>)>>> =
        (0..n).map(|v| vec![None; diagram.parent_configurations(v)]).collect();
    for (line, name, key, probs) in cpts {
        let v = lookup(&name, line)?;
        let pa = diagram.parents(v);
        if key.len() != pa.len() {
            return Err(parse_err(
                line,
                format!(
                    "`{name}` has {} parents but the row key has {} states",
                    pa.len(),
                    key.len()
                ),
            ));
        }
        let mut config = 0;
        for (&p, label) in pa.iter().zip(&key) {
            let s = diagram
                .variable(p)
                .state_index(label)
                .ok_or_else(|| parse_err(line, format!("`{label}` is not a state of `{}`", diagram.name(p))))?;
            config = config * diagram.cardinality(p) + s;
        }
        if probs.len() != diagram.cardinality(v) {
            return Err(parse_err(
                line,
                format!(
                    "`{name}` has {} states but the row has {} values",
                    diagram.cardinality(v),
                    probs.len()
                ),
            ));
        }
        if rows[v][config].replace((line, probs)).is_some() {
            return Err(parse_err(line, format!("duplicate CPT row for `{name}`")));
        }
    }
    let mut tables = Vec::with_capacity(n);
    for (v, table) in rows.into_iter().enumerate() {
        let missing = table.iter().filter(|r| r.is_none()).count();
        if missing > 0 {
            return Err(parse_err(
                text.lines().count().max(1),
                format!("`{}` is missing {missing} CPT row(s)", diagram.name(v)),
            ));
        }
        let first_line = table.iter().flatten().map(|r| r.0).min().unwrap_or(1);
        let table: Vec<Vec<f64>> = table.into_iter().flatten().map(|r| r.1).collect();
        let expected = table.len();
        let cpt = Cpt::new(diagram.name(v), diagram.cardinality(v), expected, table)
            .map_err(|e| parse_err(first_line, e.to_string()))?;
        tables.push(cpt);
    }
    CausalModel::new(diagram, tables)
}

pub fn load_network(path: &Path) -> Result<CausalModel<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

/// Renders a model in the text format; parsing the output reproduces the
/// model exactly.
pub fn write_network(model: &CausalModel<f64>) -> String {
    let g = model.diagram();
    let mut out = String::new();
    for v in g.variables() {
        let _ = writeln!(out, "variable {} {{ states: {} }}", v.name(), v.states().join(", "));
    }
    for i in 0..g.len() {
        if !g.parents(i).is_empty() {
            let names: Vec<&str> = g.parents(i).iter().map(|&p| g.name(p)).collect();
            let _ = writeln!(out, "parents {}: {}", g.name(i), names.join(", "));
        }
    }
    for i in 0..g.len() {
        let pa = g.parents(i);
        let cards: Vec<usize> = pa.iter().map(|&p| g.cardinality(p)).collect();
        for config in 0..g.parent_configurations(i) {
            let mut rem = config;
            let mut labels = vec![""; pa.len()];
            for j in (0..pa.len()).rev() {
                labels[j] = &g.variable(pa[j]).states()[rem % cards[j]];
                rem /= cards[j];
            }
            let probs: Vec<String> = model.cpt(i).row(config).iter().map(|p| format!("{p}")).collect();
            let _ = writeln!(out, "cpt {} | {}: {}", g.name(i), labels.join(", "), probs.join(", "));
        }
    }
    out
}

/// Built-in ten-variable benchmark network.
pub fn benchmark_network() -> CausalModel<f64> {
    parse_network(include_str!("../../data/benchmark10.net")).expect("bundled network parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# rain and a wet lawn
variable Rain { states: no, yes }
variable Sprinkler { states: off, on }
variable Wet {
  states: dry, wet
}
parents Wet: Rain, Sprinkler
cpt Rain: 0.8, 0.2
cpt Sprinkler | : 0.6, 0.4
cpt Wet | no, off: 0.95, 0.05
cpt Wet | no, on: 0.2, 0.8
cpt Wet | yes, off: 0.1, 0.9
cpt Wet | yes, on: 0.01, 0.99
";

    #[test]
    fn parses_and_round_trips() {
        let m = parse_network(SMALL).unwrap();
        assert_eq!(m.diagram().parents(2), &[0, 1]);
        assert_eq!(m.cpt(2).row(1), &[0.2, 0.8]);
        let again = parse_network(&write_network(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = SMALL.replace("cpt Wet | yes, on: 0.01, 0.99", "cpt Wet | yes, maybe: 0.01, 0.99");
        match parse_network(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 13),
            other => panic!("{other:?}"),
        }
        let bad = SMALL.replace("parents Wet: Rain, Sprinkler", "parents Wet: Rain, Hose");
        assert!(matches!(parse_network(&bad), Err(Error::Parse { line: 7, .. })));
        let missing: String = SMALL
            .lines()
            .filter(|l| !l.contains("no, on"))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(parse_network(&missing).is_err());
        assert!(matches!(parse_network("bogus line"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = SMALL.replace("cpt Rain: 0.8, 0.2", "cpt Rain: 0.8, 0.3");
        assert!(parse_network(&bad).is_err());
        let bad = SMALL.replace("cpt Rain: 0.8, 0.2", "cpt Rain: 0.8, 0.1, 0.1");
        assert!(matches!(parse_network(&bad), Err(Error::Parse { line: 7.., .. })));
    }

    #[test]
    fn benchmark_is_valid() {
        let m = benchmark_network();
        assert_eq!(m.len(), 10);
        for cpt in m.cpts() {
            assert!(cpt.rows().all(|r| r[0] <= 0.45));
        }
    }
}
