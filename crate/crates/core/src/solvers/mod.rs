//! Linear solvers for the assembled band systems.
//!
//! | id    | system          | arithmetic                    |
//! |-------|-----------------|-------------------------------|
//! | NPDM  | pentadiagonal   | `f64`, LU over all diagonals  |
//! | MNPDM | pentadiagonal   | `f64`, LU using `full_rows`   |
//! | NTDM  | tridiagonal     | `f64`, Thomas                 |
//! | SPDM  | pentadiagonal   | exact rational, deferred zero |
//! | STDM  | tridiagonal     | exact rational, deferred zero |

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::band::{PentaSystem, TriSystem};
use crate::conditioning::pd_to_td;
use crate::error::{Error, Result};
use crate::scalar::{to_lossy, Scalar};

pub mod band;
pub mod deferred;
pub mod exact;
mod fraction_free;

pub use band::{solve_pd_lu, solve_pd_modified, solve_td_thomas};
pub use exact::{exact_solve_pd, exact_solve_td, solve_pd_exact, solve_td_exact, ExactSolution};

/// A pivot whose magnitude is below this fraction of its row's largest
/// entry is treated as zero by the numerical solvers.
pub const BREAKDOWN_RTOL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolverId {
    #[serde(alias = "npdm")]
    Npdm,
    #[serde(alias = "mnpdm")]
    Mnpdm,
    #[serde(alias = "spdm")]
    Spdm,
    #[serde(alias = "ntdm")]
    Ntdm,
    #[serde(alias = "stdm")]
    Stdm,
}

impl SolverId {
    /// Column order of the benchmark table.
    pub const ALL: [SolverId; 5] = [SolverId::Npdm, SolverId::Mnpdm, SolverId::Spdm, SolverId::Ntdm, SolverId::Stdm];

    pub const NUMERICAL: [SolverId; 3] = [SolverId::Npdm, SolverId::Mnpdm, SolverId::Ntdm];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Npdm => "NPDM",
            SolverId::Mnpdm => "MNPDM",
            SolverId::Spdm => "SPDM",
            SolverId::Ntdm => "NTDM",
            SolverId::Stdm => "STDM",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SolverId::Spdm | SolverId::Stdm)
    }

    /// Whether the solver consumes the reduced tridiagonal system.
    pub fn is_tridiagonal(self) -> bool {
        matches!(self, SolverId::Ntdm | SolverId::Stdm)
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "NPDM" => Ok(SolverId::Npdm),
            "MNPDM" => Ok(SolverId::Mnpdm),
            "SPDM" => Ok(SolverId::Spdm),
            "NTDM" => Ok(SolverId::Ntdm),
            "STDM" => Ok(SolverId::Stdm),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

/// Counted floating-point work of one solve.
///
/// `arithmetic` counts additions, subtractions, multiplications and
/// divisions on matrix/vector scalars. `checks` counts the per-row type
/// tests of the sparsity-aware solver; they are part of its complexity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub arithmetic: u64,
    pub checks: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.arithmetic + self.checks
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solver: SolverId,
    pub solution: Vec<f64>,
    /// `None` for the exact solvers, whose cost is not a flop count.
    pub op_count: Option<OpCount>,
    pub wall_time: Duration,
    /// `‖A x - b‖_∞` against the system that was actually solved.
    pub residual_inf: f64,
}

/// Solves a pentadiagonal `f64` system with any solver. Tridiagonal solvers
/// reduce it with [`pd_to_td`] first; exact solvers work on the exact values
/// of the entries and round the solution.
pub fn solve_penta_f64(solver: SolverId, system: &PentaSystem<f64>) -> Result<Vec<f64>> {
    match solver {
        SolverId::Npdm => Ok(solve_pd_lu(system)?.solution),
        SolverId::Mnpdm => Ok(solve_pd_modified(system)?.solution),
        SolverId::Spdm => {
            let exact = system.map(|v| BigRational::from_f64_exact(*v));
            Ok(to_lossy(&exact_solve_pd(&exact)?.values))
        }
        SolverId::Ntdm | SolverId::Stdm => solve_tri_f64(solver, &pd_to_td(system)?),
    }
}

/// Solves a tridiagonal `f64` system with NTDM or STDM.
pub fn solve_tri_f64(solver: SolverId, system: &TriSystem<f64>) -> Result<Vec<f64>> {
    match solver {
        SolverId::Ntdm => Ok(solve_td_thomas(system)?.solution),
        SolverId::Stdm => {
            let exact = system.map(|v| BigRational::from_f64_exact(*v));
            Ok(to_lossy(&exact_solve_td(&exact)?.values))
        }
        other => Err(Error::Config(format!("{other} does not solve tridiagonal systems"))),
    }
}
