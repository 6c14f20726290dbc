//! Constructed-solution test systems.
//!
//! The geometry is `K + 1` layers on the integer radii `1, 2, ..., N` (unit
//! steps, contacts on integer radii), conductivity alternating between 1 and 2,
//! `ρ c = 1` and `τ = 1`. Entries stay small rationals, which keeps the exact
//! solvers' number growth modest. A profile `ȳ` is chosen and `b := M ȳ` for
//! the conditioned matrix `M` that each solver family consumes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::{assemble_system, contact_conductivities};
use crate::band::{BandMatrix, LinearSystem, PentaSystem, TriSystem};
use crate::conditioning::{build_pd_shift, build_td_shift, pd_to_td};
use crate::error::{Error, Result};
use crate::materials::{MaterialModel, MaterialSet};
use crate::mesh::{LayerSpec, RadialMesh, MIN_CELLS_PER_LAYER};
use crate::scalar::Scalar;

pub const LAMBDA_ODD: f64 = 1.0;
pub const LAMBDA_EVEN: f64 = 2.0;

/// How the solved matrix was made weakly diagonally dominant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditioningPath {
    /// `A + P` on the pentadiagonal system.
    PdShift,
    /// `reduce(A) + P̃` on the tridiagonal system.
    ReducedTdShift,
}

impl ConditioningPath {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditioningPath::PdShift => "pd-shift",
            ConditioningPath::ReducedTdShift => "reduced-td-shift",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSystem<T: Scalar> {
    pub mesh: RadialMesh<T>,
    pub pd: PentaSystem<T>,
    pub td: TriSystem<T>,
    pub y_bar: Vec<T>,
    /// Rows outside `{0, N-1} ∪ I*` that the reduced shift had to cover.
    pub extended_rows: Vec<usize>,
}

/// Layers of the benchmark geometry: `N - 1` unit cells split as evenly as
/// possible over `K + 1` layers.
pub fn bench_layers(n: usize, k: usize) -> Result<Vec<LayerSpec>> {
    let layers = k + 1;
    if n < 1 + layers * MIN_CELLS_PER_LAYER {
        return Err(Error::Precondition(format!(
            "N = {n} is too small for {k} contacts (need at least {})",
            1 + layers * MIN_CELLS_PER_LAYER
        )));
    }
    let cells = n - 1;
    let (base, extra) = (cells / layers, cells % layers);
    let mut start = 1usize;
    Ok((0..layers)
        .map(|m| {
            let c = base + usize::from(m < extra);
            let spec = LayerSpec::new(start as f64, (start + c) as f64, material_name(m), c);
            start += c;
            spec
        })
        .collect())
}

fn material_name(layer: usize) -> &'static str {
    if layer % 2 == 0 {
        "odd"
    } else {
        "even"
    }
}

pub fn bench_materials() -> MaterialSet {
    MaterialSet::new()
        .with("odd", MaterialModel::constant(1.0, 1.0, LAMBDA_ODD, 0.0))
        .with("even", MaterialModel::constant(1.0, 1.0, LAMBDA_EVEN, 0.0))
}

/// Coefficients `(a, b)` of `ȳ(x) = 1 + a x + b x²`, multiples of 1/8 in
/// `[-1/2, 1/2]`.
pub fn profile_coefficients(seed: u64) -> (i64, i64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (rng.gen_range(-4..=4), rng.gen_range(-4..=4))
}

/// `ȳ_i = 1 + a x_i + b x_i²` with `x_i = i / (N - 1)`.
pub fn profile<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let (a, b) = profile_coefficients(seed);
    let (a, b) = (T::from_f64_exact(a as f64 / 8.0), T::from_f64_exact(b as f64 / 8.0));
    let last = T::from_usize(n - 1);
    (0..n)
        .map(|i| {
            let x = T::from_usize(i) / last.clone();
            T::one() + a.clone() * x.clone() + b.clone() * x.clone() * x
        })
        .collect()
}

/// Builds both conditioned systems in arithmetic `T`.
pub fn build_bench_system<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<BenchSystem<T>> {
    let mesh = RadialMesh::<T>::from_layers(&bench_layers(n, k)?)?;
    let materials = bench_materials();
    let zeros = vec![T::zero(); n];
    let tau = T::one();
    let a = assemble_system(&mesh, &materials, &zeros, &zeros, &tau, None)?;
    let y_bar = profile::<T>(n, seed);

    let mut pd_matrix = a.matrix.clone();
    let lambdas = contact_conductivities(&mesh, &materials, &zeros)?;
    build_pd_shift(&mesh, &lambdas)?.shift_penta(&mut pd_matrix);
    let pd_rhs = pd_matrix.apply(&y_bar);
    let pd = LinearSystem::new(pd_matrix, pd_rhs)?;

    let reduced = pd_to_td(&a)?;
    let mut td_matrix = reduced.matrix;
    let shift = build_td_shift(&td_matrix);
    shift.shift_tri(&mut td_matrix);
    let td_rhs = td_matrix.apply(&y_bar);
    let td = LinearSystem::new(td_matrix, td_rhs)?;

    Ok(BenchSystem {
        mesh,
        pd,
        td,
        y_bar,
        extended_rows: shift.extended_rows,
    })
}
