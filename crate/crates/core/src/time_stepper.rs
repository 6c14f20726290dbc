//! Implicit time integration with a Picard loop.
//!
//! Each step iterates `û ← û + δ` with `(A(û) + P(û)) δ = φ(û) - A(û) û`,
//! starting from `û = u_old`, until the estimated distance to the fixed point
//! is at most `picard_tol · max(1, |û|∞)`. With the observed contraction
//! `q = |δ_k| / |δ_{k-1}| < 1` the estimate is `|δ_k| max(1, q / (1 - q))`,
//! otherwise `|δ_k|`. This
//! is the same iteration as `(A + P) û⁺ = φ + P û`, written in correction form.
//! Coefficients and the shift `P` are both rebuilt from the current iterate,
//! so a single loop resolves the nonlinearity and the shift feedback together.
//!
//! The residual is formed as `b_i - c_i u_i - Σ_{j≠i} a_ij (u_j - u_i)` where
//! `c_i` is the analytic row sum, so a constant field in a source-free problem
//! has a residual of exactly zero and stays constant to the last bit.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_with_capacity, contact_conductivities};
use crate::band::{inf_norm, PentaMatrix, PentaSystem};
use crate::conditioning::{build_pd_shift, build_td_shift, pd_to_td};
use crate::error::{Error, Result};
use crate::materials::MaterialSet;
use crate::mesh::RadialMesh;
use crate::solvers::{solve_penta_f64, solve_tri_f64, SolverId};

/// Volumetric source `f(r, t)` added to interior rows, evaluated at the new
/// time level.
pub type SourceFn<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftMode {
    #[default]
    None,
    /// Shift the pentadiagonal system at boundary and contact rows.
    #[serde(alias = "pd", alias = "pd-shift")]
    Pentadiagonal,
    /// Reduce to tridiagonal form, then shift the reduced system.
    #[serde(alias = "td", alias = "td-shift")]
    Tridiagonal,
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ShiftMode::None),
            "pd" | "pd-shift" | "pentadiagonal" => Ok(ShiftMode::Pentadiagonal),
            "td" | "td-shift" | "tridiagonal" => Ok(ShiftMode::Tridiagonal),
            other => Err(Error::Config(format!("unknown shift mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub tau: f64,
    pub picard_tol: f64,
    pub max_picard: usize,
    pub solver: SolverId,
    pub shift: ShiftMode,
}

impl StepConfig {
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_PICARD: usize = 100;

    pub fn new(tau: f64, solver: SolverId) -> Self {
        Self {
            tau,
            picard_tol: Self::DEFAULT_TOL,
            max_picard: Self::DEFAULT_MAX_PICARD,
            solver,
            shift: ShiftMode::None,
        }
    }

    pub fn with_shift(mut self, shift: ShiftMode) -> Self {
        self.shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Config(format!("picard_tol must be positive, got {}", self.picard_tol)));
        }
        if self.max_picard == 0 {
            return Err(Error::Config("max_picard must be at least 1".into()));
        }
        if self.shift == ShiftMode::Tridiagonal && !self.solver.is_tridiagonal() {
            return Err(Error::Config(format!(
                "tridiagonal shift requires a tridiagonal solver, got {}",
                self.solver
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureField {
    pub values: Vec<f64>,
    pub time: f64,
}

impl TemperatureField {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        Self { values, time }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::new(vec![value; n], 0.0)
    }
}

fn check_field(mesh: &RadialMesh, field: &TemperatureField) -> Result<()> {
    if field.values.len() != mesh.len() {
        return Err(Error::DimensionMismatch {
            expected: mesh.len(),
            found: field.values.len(),
        });
    }
    Ok(())
}

/// `b - A u` with the diagonal taken as `capacity - Σ off-diagonals`.
fn residual(system: &PentaSystem<f64>, capacity: &[f64], u: &[f64]) -> Vec<f64> {
    let PentaMatrix {
        sub2, sub1, sup1, sup2, ..
    } = &system.matrix;
    let n = u.len();
    (0..n)
        .map(|i| {
            let ui = u[i];
            let mut flow = 0.0;
            if i >= 2 && sub2[i] != 0.0 {
                flow += sub2[i] * (u[i - 2] - ui);
            }
            if i >= 1 {
                flow += sub1[i] * (u[i - 1] - ui);
            }
            if i + 1 < n {
                flow += sup1[i] * (u[i + 1] - ui);
            }
            if i + 2 < n && sup2[i] != 0.0 {
                flow += sup2[i] * (u[i + 2] - ui);
            }
            system.rhs[i] - capacity[i] * ui - flow
        })
        .collect()
}

/// One linearized correction: `(A + P) δ = r` with `A` frozen at `guess`,
/// conditioned as `cfg` asks, solved with `cfg.solver`.
fn solve_correction(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    mut system: PentaSystem<f64>,
    guess: &[f64],
    cfg: &StepConfig,
) -> Result<Vec<f64>> {
    if cfg.shift == ShiftMode::Pentadiagonal {
        let lambdas = contact_conductivities(mesh, materials, guess)?;
        build_pd_shift(mesh, &lambdas)?.shift_penta(&mut system.matrix);
    }
    if !cfg.solver.is_tridiagonal() {
        return solve_penta_f64(cfg.solver, &system);
    }
    let mut td = pd_to_td(&system)?;
    if cfg.shift == ShiftMode::Tridiagonal {
        build_td_shift(&td.matrix).shift_tri(&mut td.matrix);
    }
    solve_tri_f64(cfg.solver, &td)
}

/// The Picard correction `δ` at iterate `guess` for the step from `u_old`.
/// A fixed point of the step gives `δ = 0` up to rounding, for every shift
/// mode.
pub fn picard_correction(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    u_old: &TemperatureField,
    guess: &[f64],
    cfg: &StepConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_field(mesh, u_old)?;
    if guess.len() != mesh.len() {
        return Err(Error::DimensionMismatch {
            expected: mesh.len(),
            found: guess.len(),
        });
    }
    let (mut system, capacity) = assemble_with_capacity(mesh, materials, guess, &u_old.values, &cfg.tau, None)?;
    system.rhs = residual(&system, &capacity, guess);
    solve_correction(mesh, materials, system, guess, cfg)
}

/// Advances one time step of length `cfg.tau`; returns the new field and the
/// number of Picard iterations used.
pub fn advance(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    u_old: &TemperatureField,
    cfg: &StepConfig,
) -> Result<(TemperatureField, usize)> {
    advance_with_source(mesh, materials, u_old, cfg, None)
}

pub fn advance_with_source(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    u_old: &TemperatureField,
    cfg: &StepConfig,
    source: Option<SourceFn<'_>>,
) -> Result<(TemperatureField, usize)> {
    cfg.validate()?;
    check_field(mesh, u_old)?;
    let time = u_old.time + cfg.tau;
    let extra: Option<Vec<f64>> = source.map(|f| mesh.nodes().iter().map(|&r| f(r, time)).collect());
    let single_solve = materials.is_linear() && cfg.shift == ShiftMode::None;

    let mut guess = u_old.values.clone();
    let mut change = f64::INFINITY;
    let mut previous = f64::INFINITY;
    for k in 1..=cfg.max_picard {
        let (mut system, capacity) =
            assemble_with_capacity(mesh, materials, &guess, &u_old.values, &cfg.tau, extra.as_deref())?;
        system.rhs = residual(&system, &capacity, &guess);
        let delta = solve_correction(mesh, materials, system, &guess, cfg)?;
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence {
                iterations: k,
                last_change: f64::NAN,
            });
        }
        for (u, d) in guess.iter_mut().zip(&delta) {
            *u += d;
        }
        change = inf_norm(&delta);
        let q = change / previous;
        let estimate = if q < 1.0 { change * (q / (1.0 - q)).max(1.0) } else { change };
        previous = change;
        let scale = inf_norm(&guess).max(1.0);
        if single_solve || estimate <= cfg.picard_tol * scale {
            return Ok((TemperatureField::new(guess, time), k));
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_picard,
        last_change: change,
    })
}

/// Runs `steps` time steps and records the initial field and every
/// `stride`-th step (the final step is always recorded).
pub fn run(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    u0: &TemperatureField,
    cfg: &StepConfig,
    steps: usize,
    stride: usize,
) -> Result<Vec<TemperatureField>> {
    run_with_source(mesh, materials, u0, cfg, steps, stride, None)
}

pub fn run_with_source(
    mesh: &RadialMesh,
    materials: &MaterialSet,
    u0: &TemperatureField,
    cfg: &StepConfig,
    steps: usize,
    stride: usize,
    source: Option<SourceFn<'_>>,
) -> Result<Vec<TemperatureField>> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    if stride == 0 {
        return Err(Error::Precondition("stride must be at least 1".into()));
    }
    check_field(mesh, u0)?;
    let mut trajectory = vec![u0.clone()];
    let mut current = u0.clone();
    for s in 1..=steps {
        current = advance_with_source(mesh, materials, &current, cfg, source)?.0;
        if s % stride == 0 || s == steps {
            trajectory.push(current.clone());
        }
    }
    Ok(trajectory)
}
