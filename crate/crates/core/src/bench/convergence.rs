//! Spatial convergence study with a manufactured solution.
//!
//! `u(r, t) = a + b t g(r)` with `g = w / λ_m + c_m` on layer `m` and
//! `w = ((r - r_0)(r - r_1))^2 / W`. The flux `λ u_r = b t w'` is continuous
//! across contacts and vanishes at both ends, so the insulated boundary and
//! ideal contact conditions hold exactly; `c_m` makes `u` continuous. Backward
//! Euler is exact for a solution linear in `t`, so the measured error is
//! purely spatial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{MaterialModel, MaterialSet};
use crate::mesh::{LayerSpec, RadialMesh};
use crate::solvers::SolverId;
use crate::time_stepper::{run_with_source, StepConfig, TemperatureField};

/// Mesh refinement factors applied to every layer's cell count.
pub const REFINEMENTS: [usize; 4] = [1, 2, 4, 8];
/// Largest relative jitter of an interior node in a randomized mesh, in
/// units of the local uniform step.
pub const JITTER: f64 = 0.4;
/// Smallest pairwise order accepted on piecewise-uniform meshes.
pub const MIN_UNIFORM_ORDER: f64 = 1.9;
/// Largest fitted order expected from the randomized-step control.
pub const MAX_RANDOMIZED_ORDER: f64 = 1.4;

#[derive(Debug, Clone)]
pub struct ManufacturedSolution {
    pub a: f64,
    pub b: f64,
    r0: f64,
    r1: f64,
    scale: f64,
    /// Right edge of each layer.
    edges: Vec<f64>,
    lambda: Vec<f64>,
    rho_c: Vec<f64>,
    phi: Vec<f64>,
    offset: Vec<f64>,
}

impl ManufacturedSolution {
    /// Requires temperature-independent materials.
    pub fn new(layers: &[LayerSpec], materials: &MaterialSet, a: f64, b: f64) -> Result<Self> {
        let (first, last) = match (layers.first(), layers.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Structure("at least one layer is required".into())),
        };
        let (r0, r1) = (first.r_start, last.r_end);
        let mut lambda = Vec::new();
        let mut rho_c = Vec::new();
        let mut phi = Vec::new();
        for layer in layers {
            let m = materials.get(&layer.material_id)?;
            if !m.is_linear() {
                return Err(Error::Precondition(format!(
                    "manufactured solution needs constant coefficients, material '{}' is not",
                    layer.material_id
                )));
            }
            let at = |p: &crate::materials::Polynomial| p.eval(&0.0);
            lambda.push(at(&m.lambda));
            rho_c.push(at(&m.rho) * at(&m.cv));
            phi.push(at(&m.phi));
        }
        let mut sol = Self {
            a,
            b,
            r0,
            r1,
            scale: ((r1 - r0) / 2.0).powi(4),
            edges: layers.iter().map(|l| l.r_end).collect(),
            lambda,
            rho_c,
            phi,
            offset: vec![0.0; layers.len()],
        };
        for m in 1..layers.len() {
            let w = sol.w(sol.edges[m - 1]);
            sol.offset[m] = sol.offset[m - 1] + w * (1.0 / sol.lambda[m - 1] - 1.0 / sol.lambda[m]);
        }
        Ok(sol)
    }

    fn layer(&self, r: f64) -> usize {
        self.edges.iter().position(|&e| r <= e).unwrap_or(self.edges.len() - 1)
    }

    fn w(&self, r: f64) -> f64 {
        ((r - self.r0) * (r - self.r1)).powi(2) / self.scale
    }

    fn dw(&self, r: f64) -> f64 {
        let (p, q) = (r - self.r0, r - self.r1);
        2.0 * p * q * (p + q) / self.scale
    }

    fn d2w(&self, r: f64) -> f64 {
        let (p, q) = (r - self.r0, r - self.r1);
        2.0 * (q * (p + q) + p * (p + q) + 2.0 * p * q) / self.scale
    }

    fn g(&self, r: f64) -> f64 {
        let m = self.layer(r);
        self.w(r) / self.lambda[m] + self.offset[m]
    }

    pub fn value(&self, r: f64, t: f64) -> f64 {
        self.a + self.b * t * self.g(r)
    }

    /// Source that makes `value` satisfy the heat equation on its layer.
    pub fn source(&self, r: f64, t: f64) -> f64 {
        let m = self.layer(r);
        let du_dt = self.b * self.g(r);
        let div_flux = self.b * t * (self.d2w(r) + self.dw(r) / r);
        self.rho_c[m] * du_dt - div_flux - self.phi[m]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshKind {
    /// Constant step inside every layer.
    PiecewiseUniform,
    /// Interior nodes of every layer jittered by up to `JITTER` steps.
    Randomized { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub solver: SolverId,
    pub mesh: MeshKind,
    /// Final time.
    pub t_end: f64,
    /// Steps on the coarsest mesh; multiplied by `factor^2` on refinement.
    pub base_steps: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            solver: SolverId::Ntdm,
            mesh: MeshKind::PiecewiseUniform,
            t_end: 0.5,
            base_steps: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub factor: usize,
    pub n: usize,
    pub h_max: f64,
    pub tau: f64,
    pub steps: usize,
    pub err_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<Level>,
    /// Observed order between consecutive levels.
    pub pair_orders: Vec<f64>,
    /// Least-squares slope of `log err` against `log h_max`.
    pub fitted_order: f64,
    /// False when the error sequence is not strictly decreasing.
    pub conclusive: bool,
}

impl ConvergenceReport {
    /// Smallest pairwise order, the quantity compared with 2.
    pub fn min_order(&self) -> f64 {
        self.pair_orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn refined_mesh(layers: &[LayerSpec], factor: usize, kind: MeshKind, level: usize) -> Result<RadialMesh> {
    let refined: Vec<LayerSpec> = layers
        .iter()
        .map(|l| LayerSpec::new(l.r_start, l.r_end, l.material_id.clone(), l.cells * factor))
        .collect();
    let uniform = RadialMesh::from_layers(&refined)?;
    let seed = match kind {
        MeshKind::PiecewiseUniform => return Ok(uniform),
        MeshKind::Randomized { seed } => seed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(level as u64));
    let mut nodes = uniform.nodes().to_vec();
    let mut idx = 0;
    for l in &refined {
        let h = (l.r_end - l.r_start) / l.cells as f64;
        for j in 1..l.cells {
            nodes[idx + j] += rng.gen_range(-JITTER..=JITTER) * h;
        }
        idx += l.cells;
    }
    let materials: Vec<String> = refined.iter().map(|l| l.material_id.clone()).collect();
    RadialMesh::from_nodes(nodes, uniform.contacts(), &materials)
}

fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Solves the manufactured problem on meshes refined by [`REFINEMENTS`] with
/// `τ ∝ h²` and reports the observed spatial order.
pub fn convergence_study(
    layers: &[LayerSpec],
    materials: &MaterialSet,
    solution: &ManufacturedSolution,
    cfg: &StudyConfig,
) -> Result<ConvergenceReport> {
    if cfg.base_steps == 0 || !(cfg.t_end > 0.0) {
        return Err(Error::Config("convergence study needs t_end > 0 and base_steps >= 1".into()));
    }
    let source = |r: f64, t: f64| solution.source(r, t);
    let mut levels = Vec::with_capacity(REFINEMENTS.len());
    for (level, &factor) in REFINEMENTS.iter().enumerate() {
        let mesh = refined_mesh(layers, factor, cfg.mesh, level)?;
        let steps = cfg.base_steps * factor * factor;
        let tau = cfg.t_end / steps as f64;
        let u0 = TemperatureField::new(mesh.nodes().iter().map(|&r| solution.value(r, 0.0)).collect(), 0.0);
        let step = StepConfig::new(tau, cfg.solver);
        let trajectory = run_with_source(&mesh, materials, &u0, &step, steps, steps, Some(&source))?;
        let last = trajectory.last().expect("run records the final step");
        let err_inf = mesh
            .nodes()
            .iter()
            .zip(&last.values)
            .map(|(&r, &u)| (u - solution.value(r, last.time)).abs())
            .fold(0.0, f64::max);
        let h_max = mesh.steps().into_iter().skip(1).fold(0.0, f64::max);
        levels.push(Level {
            factor,
            n: mesh.len(),
            h_max,
            tau,
            steps,
            err_inf,
        });
    }
    let pair_orders = levels
        .windows(2)
        .map(|w| (w[0].err_inf / w[1].err_inf).ln() / (w[0].h_max / w[1].h_max).ln())
        .collect();
    let xs: Vec<f64> = levels.iter().map(|l| l.h_max.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.err_inf.ln()).collect();
    let conclusive = levels.windows(2).all(|w| w[1].err_inf < w[0].err_inf);
    Ok(ConvergenceReport {
        fitted_order: fitted_slope(&xs, &ys),
        pair_orders,
        levels,
        conclusive,
    })
}

/// Built-in manufactured-solution cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceCase {
    SingleLayer,
    TwoLayer,
    /// Two layers on randomized meshes.
    Randomized,
}

impl ConvergenceCase {
    pub const ALL: [ConvergenceCase; 3] = [
        ConvergenceCase::SingleLayer,
        ConvergenceCase::TwoLayer,
        ConvergenceCase::Randomized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConvergenceCase::SingleLayer => "single-layer",
            ConvergenceCase::TwoLayer => "two-layer",
            ConvergenceCase::Randomized => "randomized",
        }
    }

    pub fn setup(self) -> (Vec<LayerSpec>, MaterialSet) {
        match self {
            ConvergenceCase::SingleLayer => (
                vec![LayerSpec::new(1.0, 2.0, "inner", 8)],
                MaterialSet::new().with("inner", MaterialModel::constant(1.0, 1.0, 1.0, 0.0)),
            ),
            ConvergenceCase::TwoLayer | ConvergenceCase::Randomized => (
                vec![LayerSpec::new(1.0, 1.5, "inner", 8), LayerSpec::new(1.5, 2.0, "outer", 8)],
                MaterialSet::new()
                    .with("inner", MaterialModel::constant(1.0, 1.0, 1.0, 0.0))
                    .with("outer", MaterialModel::constant(2.0, 1.0, 4.0, 0.0)),
            ),
        }
    }

    /// Piecewise-uniform cases need every pairwise order at least
    /// [`MIN_UNIFORM_ORDER`]; the randomized control needs a fitted order of
    /// at most [`MAX_RANDOMIZED_ORDER`].
    pub fn meets_expectation(self, report: &ConvergenceReport) -> bool {
        match self {
            ConvergenceCase::Randomized => report.fitted_order <= MAX_RANDOMIZED_ORDER,
            _ => report.conclusive && report.min_order() >= MIN_UNIFORM_ORDER,
        }
    }

    pub fn run(self, solver: SolverId, seed: u64) -> Result<ConvergenceReport> {
        let (layers, materials) = self.setup();
        let solution = ManufacturedSolution::new(&layers, &materials, 1.0, 1.0)?;
        let mesh = match self {
            ConvergenceCase::Randomized => MeshKind::Randomized { seed },
            _ => MeshKind::PiecewiseUniform,
        };
        let cfg = StudyConfig {
            solver,
            mesh,
            ..StudyConfig::default()
        };
        convergence_study(&layers, &materials, &solution, &cfg)
    }
}
