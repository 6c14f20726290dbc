//! Benchmark harness: solver timing and accuracy on constructed-solution
//! systems, operation-count verification and the spatial convergence study.

use std::time::Duration;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::band::{PentaSystem, TriSystem};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::{solve_pd_exact, solve_pd_lu, solve_pd_modified, solve_td_exact, solve_td_thomas, SolveReport, SolverId};

pub mod convergence;
pub mod counts;
pub mod emit;
pub mod system;

pub use convergence::{convergence_study, ConvergenceCase, ConvergenceReport};
pub use counts::{verify_op_counts, CountReport};
pub use emit::{emit, format_table, RunMetadata};
pub use system::{build_bench_system, BenchSystem, ConditioningPath};

/// Largest N assembled in exact arithmetic; beyond it the systems are built
/// in `f64` and `b = M ȳ` is rounded per operation.
pub const EXACT_ASSEMBLY_LIMIT: usize = 1_000_000;
/// N above this needs `allow_huge`.
pub const HUGE_N: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchScenario {
    pub n_values: Vec<usize>,
    pub k: usize,
    pub solvers: Vec<SolverId>,
    pub reps: usize,
    pub seed: u64,
    pub exact_cap: usize,
    pub allow_huge: bool,
}

impl Default for BenchScenario {
    fn default() -> Self {
        Self {
            n_values: vec![1_000, 10_000, 100_000],
            k: 11,
            solvers: SolverId::ALL.to_vec(),
            reps: 5,
            seed: 1,
            exact_cap: 20_000,
            allow_huge: false,
        }
    }
}

impl BenchScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.solvers.is_empty() {
            return Err(Error::Config("scenario needs at least one N and one solver".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n > HUGE_N && !self.allow_huge) {
            return Err(Error::Config(format!("N = {n} exceeds {HUGE_N}; pass --allow-huge")));
        }
        for &n in &self.n_values {
            system::bench_layers(n, self.k)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    /// Exact solver above the configured cap.
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub solver: SolverId,
    pub path: ConditioningPath,
    /// Median wall-clock seconds over the repetitions.
    pub wall_s: Option<f64>,
    pub op_count: Option<u64>,
    pub err_inf: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub scenario: BenchScenario,
    pub rows: Vec<BenchRow>,
    /// Rows the reduced shift extended beyond `{0, N-1} ∪ I*`, per N.
    pub extended_rows: Vec<(usize, usize)>,
}

impl BenchReport {
    pub fn row(&self, n: usize, solver: SolverId) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.n == n && r.solver == solver)
    }
}

pub fn path_of(solver: SolverId) -> ConditioningPath {
    if solver.is_tridiagonal() {
        ConditioningPath::ReducedTdShift
    } else {
        ConditioningPath::PdShift
    }
}

enum Reference {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Reference {
    fn err_inf(&self, y: &[f64]) -> f64 {
        match self {
            Reference::Exact(r) => y
                .iter()
                .zip(r)
                .map(|(v, e)| (BigRational::from_f64_exact(*v) - e).abs())
                .max()
                .map_or(0.0, |m| m.to_f64_lossy()),
            Reference::Float(r) => y.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        }
    }
}

struct Prepared {
    pd: PentaSystem<f64>,
    td: TriSystem<f64>,
    reference: Reference,
    exact: Option<BenchSystem<BigRational>>,
    extended: usize,
}

fn prepare(n: usize, k: usize, seed: u64) -> Result<Prepared> {
    if n <= EXACT_ASSEMBLY_LIMIT {
        let exact = build_bench_system::<BigRational>(n, k, seed)?;
        Ok(Prepared {
            pd: exact.pd.map(Scalar::to_f64_lossy),
            td: exact.td.map(Scalar::to_f64_lossy),
            reference: Reference::Exact(exact.y_bar.clone()),
            extended: exact.extended_rows.len(),
            exact: Some(exact),
        })
    } else {
        let sys = build_bench_system::<f64>(n, k, seed)?;
        Ok(Prepared {
            extended: sys.extended_rows.len(),
            reference: Reference::Float(sys.y_bar),
            pd: sys.pd,
            td: sys.td,
            exact: None,
        })
    }
}

fn median(mut v: Vec<Duration>) -> f64 {
    v.sort();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m].as_secs_f64()
    } else {
        (v[m - 1].as_secs_f64() + v[m].as_secs_f64()) / 2.0
    }
}

/// One solve, returning the report and the error against `ȳ`.
fn solve_once(solver: SolverId, p: &Prepared) -> Result<(SolveReport, f64)> {
    match solver {
        SolverId::Npdm => solve_pd_lu(&p.pd).map(|r| with_err(r, &p.reference)),
        SolverId::Mnpdm => solve_pd_modified(&p.pd).map(|r| with_err(r, &p.reference)),
        SolverId::Ntdm => solve_td_thomas(&p.td).map(|r| with_err(r, &p.reference)),
        SolverId::Spdm | SolverId::Stdm => {
            let exact = p
                .exact
                .as_ref()
                .ok_or_else(|| Error::Precondition("exact system not assembled".into()))?;
            let (rep, sol) = if solver == SolverId::Spdm {
                solve_pd_exact(&exact.pd)?
            } else {
                solve_td_exact(&exact.td)?
            };
            let err = sol
                .values
                .iter()
                .zip(&exact.y_bar)
                .map(|(a, b)| (a - b).abs())
                .max()
                .map_or(0.0, |m| m.to_f64_lossy());
            Ok((rep, err))
        }
    }
}

fn with_err(r: SolveReport, reference: &Reference) -> (SolveReport, f64) {
    let e = reference.err_inf(&r.solution);
    (r, e)
}

fn bench_cell(solver: SolverId, n: usize, reps: usize, p: &Prepared) -> BenchRow {
    let mut row = BenchRow {
        n,
        solver,
        path: path_of(solver),
        wall_s: None,
        op_count: None,
        err_inf: None,
        status: RowStatus::Ok,
    };
    // Warm-up, discarded.
    let (first, err) = match solve_once(solver, p) {
        Ok(v) => v,
        Err(e) => {
            row.status = RowStatus::Failed(e.to_string());
            return row;
        }
    };
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        match solve_once(solver, p) {
            Ok((r, _)) => times.push(r.wall_time),
            Err(e) => {
                row.status = RowStatus::Failed(e.to_string());
                return row;
            }
        }
    }
    row.wall_s = Some(median(times));
    row.op_count = first.op_count.map(|c| c.total());
    row.err_inf = Some(err);
    row
}

/// Runs every `(N, solver)` cell of the scenario sequentially.
pub fn bench(scenario: &BenchScenario) -> Result<BenchReport> {
    scenario.validate()?;
    let mut rows = Vec::new();
    let mut extended_rows = Vec::new();
    for &n in &scenario.n_values {
        let prepared = prepare(n, scenario.k, scenario.seed)?;
        extended_rows.push((n, prepared.extended));
        for &solver in &scenario.solvers {
            if solver.is_exact() && (n > scenario.exact_cap || prepared.exact.is_none()) {
                rows.push(BenchRow {
                    n,
                    solver,
                    path: path_of(solver),
                    wall_s: None,
                    op_count: None,
                    err_inf: None,
                    status: RowStatus::Skipped(format!("N above exact cap {}", scenario.exact_cap)),
                });
                continue;
            }
            rows.push(bench_cell(solver, n, scenario.reps, &prepared));
        }
    }
    Ok(BenchReport {
        scenario: scenario.clone(),
        rows,
        extended_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_rows() {
        let scenario = BenchScenario {
            n_values: vec![100, 200],
            reps: 1,
            exact_cap: 150,
            ..BenchScenario::default()
        };
        let report = bench(&scenario).unwrap();
        assert_eq!(report.rows.len(), 10);
        for row in &report.rows {
            match row.status {
                RowStatus::Ok => {
                    let err = row.err_inf.unwrap();
                    if row.solver.is_exact() {
                        assert_eq!(err, 0.0);
                    } else {
                        assert!(err <= 5e-15, "{row:?}");
                    }
                }
                RowStatus::Skipped(_) => assert!(row.solver.is_exact() && row.n == 200),
                RowStatus::Failed(ref m) => panic!("{m}"),
            }
        }
    }

    #[test]
    fn scenario_validation() {
        let mut s = BenchScenario {
            n_values: vec![100_000_000],
            ..BenchScenario::default()
        };
        assert!(s.validate().is_err());
        s.allow_huge = true;
        assert!(s.validate().is_ok());
        s.reps = 0;
        assert!(s.validate().is_err());
    }
}
