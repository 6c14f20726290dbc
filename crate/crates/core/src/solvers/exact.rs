//! Exact rational band solvers (SPDM, STDM).
//!
//! Regular systems (no vanishing leading principal minor) go through the
//! integer elimination in [`super::fraction_free`]. Otherwise the solvers run
//! the same recurrences as their floating-point counterparts over
//! [`DeferredScalar`]: an exact zero pivot is replaced by `ε` and the solution
//! is the limit `ε → 0`. The system is singular when the product of the
//! `ε`-dependent pivots vanishes in that limit or a component has a pole.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;

use super::deferred::DeferredScalar;
use super::fraction_free::IntegerBand;
use super::{SolveReport, SolverId};
use crate::band::{PentaSystem, TriSystem};
use crate::error::{Error, Result};
use crate::scalar::{to_lossy, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub values: Vec<BigRational>,
    /// Rows whose pivot was an exact zero and was replaced by `ε`.
    pub deferred_zeros: Vec<usize>,
}

#[derive(Default)]
struct PivotLog {
    rows: Vec<usize>,
    product: Option<DeferredScalar>,
}

impl PivotLog {
    /// Returns the pivot to divide by, substituting `ε` for an exact zero.
    fn admit(&mut self, row: usize, mu: DeferredScalar) -> DeferredScalar {
        let mu = if mu.is_zero() {
            self.rows.push(row);
            DeferredScalar::epsilon()
        } else {
            mu
        };
        if mu.has_epsilon() {
            self.product = Some(match self.product.take() {
                Some(p) => &p * &mu,
                None => mu.clone(),
            });
        }
        mu
    }

    fn singular(&self) -> bool {
        self.product.as_ref().is_some_and(DeferredScalar::vanishes_at_zero)
    }
}

fn check_dims(n: usize, rhs: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("empty system".into()));
    }
    if n != rhs {
        return Err(Error::DimensionMismatch { expected: n, found: rhs });
    }
    Ok(())
}

fn finish(solver: SolverId, log: PivotLog, x: Vec<DeferredScalar>) -> Result<ExactSolution> {
    if log.singular() {
        return Err(Error::Singular { solver });
    }
    let values = x
        .iter()
        .map(DeferredScalar::finalize)
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Singular { solver })?;
    Ok(ExactSolution {
        values,
        deferred_zeros: log.rows,
    })
}

fn lift(v: &[BigRational]) -> Vec<DeferredScalar> {
    v.iter().cloned().map(DeferredScalar::Exact).collect()
}

fn regular(values: Vec<BigRational>) -> ExactSolution {
    ExactSolution {
        values,
        deferred_zeros: Vec::new(),
    }
}

/// Exact pentadiagonal solve (SPDM).
pub fn exact_solve_pd(system: &PentaSystem<BigRational>) -> Result<ExactSolution> {
    let a = &system.matrix;
    check_dims(a.diag.len(), system.rhs.len())?;
    match IntegerBand::new(&a.sub2, &a.sub1, &a.diag, &a.sup1, &a.sup2, &system.rhs).solve() {
        Some(values) => Ok(regular(values)),
        None => deferred_solve_pd(system),
    }
}

/// Exact tridiagonal solve (STDM).
pub fn exact_solve_td(system: &TriSystem<BigRational>) -> Result<ExactSolution> {
    let a = &system.matrix;
    check_dims(a.diag.len(), system.rhs.len())?;
    match IntegerBand::new(&[], &a.sub, &a.diag, &a.sup, &[], &system.rhs).solve() {
        Some(values) => Ok(regular(values)),
        None => deferred_solve_td(system),
    }
}

/// Pentadiagonal LU over [`DeferredScalar`], valid for any nonsingular input.
pub fn deferred_solve_pd(system: &PentaSystem<BigRational>) -> Result<ExactSolution> {
    let a = &system.matrix;
    let n = a.diag.len();
    check_dims(n, system.rhs.len())?;
    let (l2, l1, d, u1, u2) = (lift(&a.sub2), lift(&a.sub1), lift(&a.diag), lift(&a.sup1), lift(&a.sup2));
    let b = lift(&system.rhs);
    let zero = DeferredScalar::zero();
    let mut al = vec![zero.clone(); n];
    let mut be = vec![zero.clone(); n];
    let mut ze = vec![zero.clone(); n];
    let mut log = PivotLog::default();

    for i in 0..n {
        let mut ga = l1[i].clone();
        let mut mu = d[i].clone();
        let mut z = b[i].clone();
        if i >= 2 && !l2[i].is_zero() {
            ga = &ga - &(&al[i - 2] * &l2[i]);
            mu = &mu - &(&be[i - 2] * &l2[i]);
            z = &z - &(&ze[i - 2] * &l2[i]);
        }
        if i >= 1 && !ga.is_zero() {
            mu = &mu - &(&al[i - 1] * &ga);
            z = &z - &(&ze[i - 1] * &ga);
        }
        let mu = log.admit(i, mu);
        if i + 1 < n {
            let mut s = u1[i].clone();
            if i >= 1 && !ga.is_zero() {
                s = &s - &(&be[i - 1] * &ga);
            }
            al[i] = &s / &mu;
        }
        if i + 2 < n {
            be[i] = &u2[i] / &mu;
        }
        ze[i] = &z / &mu;
    }

    let mut x = ze;
    for i in (0..n.saturating_sub(1)).rev() {
        let mut v = &x[i] - &(&al[i] * &x[i + 1]);
        if i + 2 < n && !be[i].is_zero() {
            v = &v - &(&be[i] * &x[i + 2]);
        }
        x[i] = v;
    }
    finish(SolverId::Spdm, log, x)
}

/// Thomas elimination over [`DeferredScalar`], valid for any nonsingular input.
pub fn deferred_solve_td(system: &TriSystem<BigRational>) -> Result<ExactSolution> {
    let a = &system.matrix;
    let n = a.diag.len();
    check_dims(n, system.rhs.len())?;
    let (l, d, u) = (lift(&a.sub), lift(&a.diag), lift(&a.sup));
    let b = lift(&system.rhs);
    let mut cp = vec![DeferredScalar::zero(); n];
    let mut dp = vec![DeferredScalar::zero(); n];
    let mut log = PivotLog::default();

    for i in 0..n {
        let (mu, z) = if i == 0 || l[i].is_zero() {
            (d[i].clone(), b[i].clone())
        } else {
            (&d[i] - &(&l[i] * &cp[i - 1]), &b[i] - &(&l[i] * &dp[i - 1]))
        };
        let mu = log.admit(i, mu);
        if i + 1 < n {
            cp[i] = &u[i] / &mu;
        }
        dp[i] = &z / &mu;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        dp[i] = &dp[i] - &(&cp[i] * &dp[i + 1]);
    }
    finish(SolverId::Stdm, log, dp)
}

/// Whether `A x = b` holds exactly.
pub fn residual_is_zero_pd(system: &PentaSystem<BigRational>, x: &[BigRational]) -> bool {
    system.residual(x).iter().all(Zero::is_zero)
}

pub fn residual_is_zero_td(system: &TriSystem<BigRational>, x: &[BigRational]) -> bool {
    system.residual(x).iter().all(Zero::is_zero)
}

fn report(solver: SolverId, solution: &ExactSolution, wall_time: Duration, residual: &BigRational) -> SolveReport {
    SolveReport {
        solver,
        solution: to_lossy(&solution.values),
        op_count: None,
        wall_time,
        residual_inf: residual.to_f64_lossy(),
    }
}

/// SPDM with timing; returns the exact values alongside the report.
pub fn solve_pd_exact(system: &PentaSystem<BigRational>) -> Result<(SolveReport, ExactSolution)> {
    let start = Instant::now();
    let sol = exact_solve_pd(system)?;
    let elapsed = start.elapsed();
    let rep = report(SolverId::Spdm, &sol, elapsed, &system.residual_inf(&sol.values));
    Ok((rep, sol))
}

/// STDM with timing; returns the exact values alongside the report.
pub fn solve_td_exact(system: &TriSystem<BigRational>) -> Result<(SolveReport, ExactSolution)> {
    let start = Instant::now();
    let sol = exact_solve_td(system)?;
    let elapsed = start.elapsed();
    let rep = report(SolverId::Stdm, &sol, elapsed, &system.residual_inf(&sol.values));
    Ok((rep, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{BandMatrix, LinearSystem, PentaMatrix, TriMatrix};
    use crate::scalar::ratio;

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| ratio(x, 1)).collect()
    }

    #[test]
    fn tridiagonal_exact() {
        let t = TriMatrix::from_diagonals(r(&[0, 1, 1]), r(&[3, 3, 3]), r(&[1, 1, 0])).unwrap();
        let sys = LinearSystem::new(t, r(&[1, 0, 0])).unwrap();
        let sol = exact_solve_td(&sys).unwrap();
        assert!(residual_is_zero_td(&sys, &sol.values));
        assert_eq!(sol.values[0], ratio(8, 21));
        assert!(sol.deferred_zeros.is_empty());
    }

    #[test]
    fn zero_leading_pivot_is_deferred() {
        // [[0,1],[1,0]] x = (2,3) → x = (3,2)
        let t = TriMatrix::from_diagonals(r(&[0, 1]), r(&[0, 0]), r(&[1, 0])).unwrap();
        let sys = LinearSystem::new(t, r(&[2, 3])).unwrap();
        let sol = exact_solve_td(&sys).unwrap();
        assert_eq!(sol.values, r(&[3, 2]));
        assert_eq!(sol.deferred_zeros, vec![0]);

        let p = PentaMatrix::from_diagonals(r(&[0, 0]), r(&[0, 1]), r(&[0, 0]), r(&[1, 0]), r(&[0, 0]), vec![]).unwrap();
        let sys = LinearSystem::new(p, r(&[2, 3])).unwrap();
        let sol = exact_solve_pd(&sys).unwrap();
        assert_eq!(sol.values, r(&[3, 2]));
        assert!(residual_is_zero_pd(&sys, &sol.values));
    }

    #[test]
    fn interior_zero_pivot_is_deferred() {
        // Leading 2x2 block [[1,1],[1,1]] is singular, the whole matrix is not.
        let p = PentaMatrix::from_diagonals(
            r(&[0, 0, 1, 0]),
            r(&[0, 1, 0, 1]),
            r(&[1, 1, 0, 1]),
            r(&[1, 0, 1, 0]),
            r(&[1, 1, 0, 0]),
            vec![0, 1, 2, 3],
        )
        .unwrap();
        let x = r(&[1, -2, 3, 5]);
        let b = p.apply(&x);
        let sys = LinearSystem::new(p, b).unwrap();
        let sol = exact_solve_pd(&sys).unwrap();
        assert_eq!(sol.values, x);
        assert_eq!(sol.deferred_zeros, vec![1]);
    }

    #[test]
    fn singular_is_reported() {
        let t = TriMatrix::from_diagonals(r(&[0, 1]), r(&[1, 1]), r(&[1, 0])).unwrap();
        let sys = LinearSystem::new(t, r(&[1, 2])).unwrap();
        assert!(matches!(exact_solve_td(&sys), Err(Error::Singular { solver: SolverId::Stdm })));
        let t = TriMatrix::from_diagonals(r(&[0, 0]), r(&[0, 1]), r(&[1, 0])).unwrap();
        let sys = LinearSystem::new(t, r(&[1, 2])).unwrap();
        assert!(matches!(exact_solve_td(&sys), Err(Error::Singular { .. })));
    }

}
