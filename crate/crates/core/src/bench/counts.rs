//! Operation-count verification by finite differences over N and K.

use serde::Serialize;

use super::system::build_bench_system;
use super::BenchScenario;
use crate::error::{Error, Result};
use crate::solvers::band::{pd_lu_kernel, pd_modified_kernel, thomas_kernel};
use crate::solvers::SolverId;

/// Contact counts compared for the MNPDM K-slope.
pub const K_PAIR: (usize, usize) = (5, 12);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub solver: SolverId,
    /// `(N, count)` at the scenario's K.
    pub counts: Vec<(usize, u64)>,
    /// Count increase per node between consecutive N.
    pub slopes: Vec<f64>,
    pub expected_slope: u64,
    /// `count - slope N` (minus `7 K` for MNPDM) at the first N.
    pub constant: i64,
    /// Constant of the reference affine formula.
    pub reference_constant: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSlopeCheck {
    pub n: usize,
    pub k_low: usize,
    pub k_high: usize,
    pub mnpdm_diff: i64,
    pub expected_diff: i64,
    pub npdm_diff: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub k: usize,
    pub checks: Vec<SlopeCheck>,
    pub k_slope: KSlopeCheck,
    pub pass: bool,
}

impl CountReport {
    pub fn check(&self, solver: SolverId) -> Option<&SlopeCheck> {
        self.checks.iter().find(|c| c.solver == solver)
    }
}

/// Op count of one numerical solver on the benchmark system of size `n`.
pub fn op_count(solver: SolverId, n: usize, k: usize, seed: u64) -> Result<u64> {
    let sys = build_bench_system::<f64>(n, k, seed)?;
    let count = match solver {
        SolverId::Npdm => pd_lu_kernel(&sys.pd.matrix, &sys.pd.rhs)?.1,
        SolverId::Mnpdm => pd_modified_kernel(&sys.pd.matrix, &sys.pd.rhs)?.1,
        SolverId::Ntdm => {
            let m = &sys.td.matrix;
            thomas_kernel(&m.sub, &m.diag, &m.sup, &sys.td.rhs)?.1
        }
        other => return Err(Error::Config(format!("{other} has no operation count"))),
    };
    Ok(count.total())
}

fn expected(solver: SolverId) -> (u64, i64) {
    match solver {
        SolverId::Npdm => (19, -29),
        SolverId::Mnpdm => (13, -14),
        SolverId::Ntdm => (9, 2),
        _ => unreachable!("exact solvers are filtered out"),
    }
}

/// Checks the N-slopes 19, 13 and 9, the MNPDM K-slope 7 and that NPDM
/// ignores K. Exact solvers in the scenario are ignored.
pub fn verify_op_counts(scenario: &BenchScenario) -> Result<CountReport> {
    let mut ns = scenario.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::Config("slope verification needs at least two N values".into()));
    }
    let k = scenario.k;
    let mut checks = Vec::new();
    for solver in SolverId::NUMERICAL {
        if !scenario.solvers.contains(&solver) {
            continue;
        }
        let counts = ns
            .iter()
            .map(|&n| Ok((n, op_count(solver, n, k, scenario.seed)?)))
            .collect::<Result<Vec<_>>>()?;
        let slopes: Vec<f64> = counts
            .windows(2)
            .map(|w| (w[1].1 as f64 - w[0].1 as f64) / (w[1].0 - w[0].0) as f64)
            .collect();
        let (slope, reference_constant) = expected(solver);
        let contact_part = if solver == SolverId::Mnpdm { 7 * k as i64 } else { 0 };
        let (n0, c0) = counts[0];
        let constant = c0 as i64 - (slope * n0 as u64) as i64 - contact_part;
        let pass = slopes.iter().all(|&s| s == slope as f64);
        checks.push(SlopeCheck {
            solver,
            counts,
            slopes,
            expected_slope: slope,
            constant,
            reference_constant,
            pass,
        });
    }

    let n = ns[0];
    let (k_low, k_high) = K_PAIR;
    let diff = |solver| -> Result<i64> {
        Ok(op_count(solver, n, k_high, scenario.seed)? as i64 - op_count(solver, n, k_low, scenario.seed)? as i64)
    };
    let mnpdm_diff = diff(SolverId::Mnpdm)?;
    let npdm_diff = diff(SolverId::Npdm)?;
    let expected_diff = 7 * (k_high - k_low) as i64;
    let k_slope = KSlopeCheck {
        n,
        k_low,
        k_high,
        mnpdm_diff,
        expected_diff,
        npdm_diff,
        pass: mnpdm_diff == expected_diff && npdm_diff == 0,
    };
    let pass = k_slope.pass && checks.iter().all(|c| c.pass);
    Ok(CountReport {
        k,
        checks,
        k_slope,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_and_constants() {
        let scenario = BenchScenario {
            n_values: vec![1000, 2000, 4000],
            ..BenchScenario::default()
        };
        let report = verify_op_counts(&scenario).unwrap();
        assert!(report.pass, "{report:?}");
        let c = |s| report.check(s).unwrap().constant;
        assert_eq!(c(SolverId::Npdm), -29);
        assert_eq!(c(SolverId::Mnpdm), -8);
        assert_eq!(c(SolverId::Ntdm), -7);
        assert_eq!(report.k_slope.mnpdm_diff, 49);
    }
}
