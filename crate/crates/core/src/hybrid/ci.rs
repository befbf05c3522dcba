use crate::error::{Error, Result};
use crate::model::CausalDiagram;
use crate::simulate::{Dataset, TransitionDatasets};
use crate::special::chi_square_sf;

/// Per-dataset likelihood-ratio statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiStatistic {
    pub g2: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiDecision {
    pub x: usize,
    pub y: usize,
    pub z: Vec<usize>,
    pub independent: bool,
    /// Empty for oracle decisions.
    pub statistics: Vec<CiStatistic>,
}

/// Source of conditional-independence decisions.
pub trait CiOracle: Sync {
    fn num_variables(&self) -> usize;
    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<CiDecision>;
}

fn check_query(n: usize, x: usize, y: usize, z: &[usize]) -> Result<()> {
    if let Some(&bad) = [x, y].iter().chain(z).find(|&&v| v >= n) {
        return Err(Error::VariableOutOfRange(bad));
    }
    if x == y || z.contains(&x) || z.contains(&y) {
        return Err(Error::InvalidArgument(
            "conditioning set must exclude both tested variables".into(),
        ));
    }
    Ok(())
}

/// G² statistic of `x ⟂ y | z` in one dataset. Empty strata are dropped;
/// dof is `(r_x - 1)(r_y - 1)` per nonempty stratum.
pub fn g2_statistic(data: &Dataset, x: usize, y: usize, z: &[usize]) -> CiStatistic {
    let vars = data.variables();
    let rx = vars[x].cardinality();
    let ry = vars[y].cardinality();
    let strata: usize = z.iter().map(|&v| vars[v].cardinality()).product();
    let mut n = vec![0u64; strata * rx * ry];
    for case in data.cases() {
        let s = z.iter().fold(0, |acc, &v| acc * vars[v].cardinality() + case[v]);
        n[(s * rx + case[x]) * ry + case[y]] += 1;
    }
    let mut g2 = 0.0;
    let mut nonempty = 0;
    for table in n.chunks(rx * ry) {
        let total: u64 = table.iter().sum();
        if total == 0 {
            continue;
        }
        nonempty += 1;
        let row: Vec<u64> = table.chunks(ry).map(|r| r.iter().sum()).collect();
        let col: Vec<u64> = (0..ry).map(|b| (0..rx).map(|a| table[a * ry + b]).sum()).collect();
        for a in 0..rx {
            for b in 0..ry {
                let o = table[a * ry + b];
                if o > 0 {
                    let e = row[a] as f64 * col[b] as f64 / total as f64;
                    g2 += o as f64 * (o as f64 / e).ln();
                }
            }
        }
    }
    let g2 = (2.0 * g2).max(0.0);
    let dof = (rx - 1) * (ry - 1) * nonempty;
    let p_value = if dof == 0 { 1.0 } else { chi_square_sf(g2, dof) };
    CiStatistic { g2, dof, p_value }
}

/// Tests `x ⟂ y | z` in every dataset at level `alpha / (k + 1)`; the
/// verdict is independent only when every dataset accepts.
pub fn pooled_ci_test(ts: &TransitionDatasets, x: usize, y: usize, z: &[usize], alpha: f64) -> Result<CiDecision> {
    check_query(ts.variables().len(), x, y, z)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if ts.datasets().iter().any(Dataset::is_empty) {
        return Err(Error::EmptyData("independence tests need non-empty datasets".into()));
    }
    let level = alpha / ts.datasets().len() as f64;
    let statistics: Vec<CiStatistic> = ts.datasets().iter().map(|d| g2_statistic(d, x, y, z)).collect();
    Ok(CiDecision {
        x,
        y,
        z: z.to_vec(),
        independent: statistics.iter().all(|s| s.p_value > level),
        statistics,
    })
}

/// Statistical oracle over a transition sequence.
#[derive(Debug, Clone, Copy)]
pub struct PooledG2Test<'a> {
    pub data: &'a TransitionDatasets,
    pub alpha: f64,
}

impl CiOracle for PooledG2Test<'_> {
    fn num_variables(&self) -> usize {
        self.data.variables().len()
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<CiDecision> {
        pooled_ci_test(self.data, x, y, z, self.alpha)
    }
}

/// Exact answers read off a known diagram.
#[derive(Debug, Clone, Copy)]
pub struct DSeparationOracle<'a> {
    pub diagram: &'a CausalDiagram,
}

impl CiOracle for DSeparationOracle<'_> {
    fn num_variables(&self) -> usize {
        self.diagram.len()
    }

    fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<CiDecision> {
        check_query(self.diagram.len(), x, y, z)?;
        Ok(CiDecision {
            x,
            y,
            z: z.to_vec(),
            independent: self.diagram.d_separated(x, y, z),
            statistics: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableSpec;

    #[test]
    fn g2_matches_hand_value() {
        // 2x2 table [[10, 20], [30, 40]]
        let vars = vec![VariableSpec::binary("X"), VariableSpec::binary("Y")];
        let mut cases = Vec::new();
        for (x, y, c) in [(0, 0, 10), (0, 1, 20), (1, 0, 30), (1, 1, 40)] {
            cases.extend(std::iter::repeat(vec![x, y]).take(c));
        }
        let d = Dataset::new(vars, cases).unwrap();
        let s = g2_statistic(&d, 0, 1, &[]);
        let expected = {
            let o = [10.0, 20.0, 30.0, 40.0];
            let e = [
                30.0 * 40.0 / 100.0,
                30.0 * 60.0 / 100.0,
                70.0 * 40.0 / 100.0,
                70.0 * 60.0 / 100.0,
            ];
            2.0 * o.iter().zip(e).map(|(o, e): (&f64, f64)| o * (o / e).ln()).sum::<f64>()
        };
        assert!((s.g2 - expected).abs() < 1e-12);
        assert_eq!(s.dof, 1);
    }

    #[test]
    fn empty_strata_are_dropped() {
        let vars = vec![
            VariableSpec::binary("X"),
            VariableSpec::binary("Y"),
            VariableSpec::binary("Z"),
        ];
        let d = Dataset::new(vars, vec![vec![0, 0, 0], vec![1, 1, 0]]).unwrap();
        assert_eq!(g2_statistic(&d, 0, 1, &[2]).dof, 1);
    }

    #[test]
    fn dseparation_oracle_rejects_bad_queries() {
        let g = CausalDiagram::binary(&["A", "B"], &[(0, 1)]).unwrap();
        let o = DSeparationOracle { diagram: &g };
        assert!(o.test(0, 0, &[]).is_err());
        assert!(!o.test(0, 1, &[]).unwrap().independent);
    }
}
