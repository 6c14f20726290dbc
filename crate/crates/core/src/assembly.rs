//! Pentadiagonal system for one implicit time level.
//!
//! Interior nodes carry the conservative three-point balance with the
//! time-derivative term, the two boundary nodes carry second-order one-sided
//! homogeneous Neumann conditions, and each contact node carries the
//! five-point flux continuity condition. All unknowns sit on the left and
//! every main-diagonal entry is positive.
//!
//! Boundary rows are scaled by their stencil denominator `h1 h2 (h1 + h2)`;
//! with that scaling the dominance deficit of the row is exactly `2 h1^2`,
//! which is the boundary entry of the pentadiagonal shift. Contact rows keep
//! the divided form, whose deficit is the contact shift entry.

use crate::band::{LinearSystem, PentaMatrix, PentaSystem};
use crate::error::{Error, Result};
use crate::materials::{CoefficientSample, MaterialModel, MaterialSet};
use crate::mesh::RadialMesh;
use crate::scalar::{two, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorRow<T> {
    pub lower: T,
    pub diag: T,
    pub upper: T,
    pub rhs: T,
    /// `ρc / τ`, the exact row sum `lower + diag + upper`.
    pub capacity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannRows<T> {
    /// Row 0 over columns `0, 1, 2`.
    pub first: [T; 3],
    /// Row `N-1` over columns `N-3, N-2, N-1`.
    pub last: [T; 3],
}

pub fn assemble_interior_row<T: Scalar>(
    mesh: &RadialMesh<T>,
    sample: &CoefficientSample<T>,
    i: usize,
    tau: &T,
    u_old_i: &T,
) -> Result<InteriorRow<T>> {
    if i == 0 || i + 1 >= mesh.len() || mesh.is_contact(i) {
        return Err(Error::StencilSelection {
            row: i,
            reason: "interior stencil requested for a boundary or contact node".into(),
        });
    }
    if !(*tau > T::zero()) {
        return Err(Error::Domain("time step must be positive".into()));
    }
    let (hbar, r_minus, r_plus) = mesh.geometry(i)?;
    let r_i = mesh.node(i).clone();
    let scale = r_i * hbar;
    let lower = -(r_minus * sample.lambda_half_minus.clone()) / (scale.clone() * mesh.step(i));
    let upper = -(r_plus * sample.lambda_half_plus.clone()) / (scale * mesh.step(i + 1));
    let capacity = sample.rho_c.clone() / tau.clone();
    let diag = capacity.clone() - lower.clone() - upper.clone();
    let rhs = capacity.clone() * u_old_i.clone() + sample.phi.clone();
    Ok(InteriorRow {
        lower,
        diag,
        upper,
        rhs,
        capacity,
    })
}

/// Second-order one-sided derivative stencil at a node, scaled by its
/// denominator: `near` is the step adjacent to the node, `far` the next one.
/// Returns the coefficients of `(u_node, u_near, u_far)`.
fn one_sided<T: Scalar>(near: T, far: T) -> [T; 3] {
    let sum = near.clone() + far.clone();
    [
        far.clone() * (two::<T>() * near.clone() + far),
        -(sum.clone() * sum),
        near.clone() * near,
    ]
}

pub fn assemble_neumann_rows<T: Scalar>(mesh: &RadialMesh<T>) -> NeumannRows<T> {
    let n = mesh.len();
    let [a0, a1, a2] = one_sided(mesh.step(1), mesh.step(2));
    let [b0, b1, b2] = one_sided(mesh.step(n - 1), mesh.step(n - 2));
    NeumannRows {
        first: [a0, a1, a2],
        last: [b2, b1, b0],
    }
}

/// Five-point contact row over columns `i*-2 ..= i*+2`.
pub fn assemble_contact_row<T: Scalar>(
    mesh: &RadialMesh<T>,
    lam_left: &T,
    lam_right: &T,
    contact: usize,
) -> Result<[T; 5]> {
    if !mesh.is_contact(contact) {
        return Err(Error::StencilSelection {
            row: contact,
            reason: "contact stencil requested for a node that is not an interface".into(),
        });
    }
    let (ha, hb) = (mesh.step(contact), mesh.step(contact - 1));
    let (ha_r, hb_r) = (mesh.step(contact + 1), mesh.step(contact + 2));
    let den_l = ha.clone() * hb.clone() * (ha.clone() + hb.clone());
    let den_r = ha_r.clone() * hb_r.clone() * (ha_r.clone() + hb_r.clone());
    let [l_node, l_near, l_far] = one_sided(ha, hb);
    let [r_node, r_near, r_far] = one_sided(ha_r, hb_r);
    let wl = lam_left.clone() / den_l;
    let wr = lam_right.clone() / den_r;
    Ok([
        wl.clone() * l_far,
        wl.clone() * l_near,
        wl * l_node + wr.clone() * r_node,
        wr.clone() * r_near,
        wr * r_far,
    ])
}

/// Material model of every layer, resolved once.
pub fn layer_models<'a, T: Scalar>(mesh: &RadialMesh<T>, materials: &'a MaterialSet) -> Result<Vec<&'a MaterialModel>> {
    (0..mesh.layer_count())
        .map(|k| materials.get(mesh.material_of_layer(k)))
        .collect()
}

/// `(λ^m(u_{i*}), λ^{m+1}(u_{i*}))` for every contact node, in contact order.
pub fn contact_conductivities<T: Scalar>(
    mesh: &RadialMesh<T>,
    materials: &MaterialSet,
    u: &[T],
) -> Result<Vec<(T, T)>> {
    let models = layer_models(mesh, materials)?;
    mesh.contacts()
        .iter()
        .map(|&c| {
            let (left, right) = mesh.layers_at_node(c);
            Ok((models[left].conductivity(&u[c])?, models[right].conductivity(&u[c])?))
        })
        .collect()
}

/// Assembles `A û = φ(û)` with coefficients frozen at `u_guess`.
///
/// `source`, when given, is an extra per-node volumetric source added to the
/// interior right-hand side (used for manufactured solutions).
pub fn assemble_system<T: Scalar>(
    mesh: &RadialMesh<T>,
    materials: &MaterialSet,
    u_guess: &[T],
    u_old: &[T],
    tau: &T,
    source: Option<&[T]>,
) -> Result<PentaSystem<T>> {
    assemble_with_capacity(mesh, materials, u_guess, u_old, tau, source).map(|(system, _)| system)
}

/// [`assemble_system`] plus the exact row sums: `ρc/τ` on interior rows and
/// zero on boundary and contact rows.
pub fn assemble_with_capacity<T: Scalar>(
    mesh: &RadialMesh<T>,
    materials: &MaterialSet,
    u_guess: &[T],
    u_old: &[T],
    tau: &T,
    source: Option<&[T]>,
) -> Result<(PentaSystem<T>, Vec<T>)> {
    let n = mesh.len();
    for len in [u_guess.len(), u_old.len()].into_iter().chain(source.map(<[T]>::len)) {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    let models = layer_models(mesh, materials)?;
    let mut a = PentaMatrix::zeros(n);
    let mut rhs = vec![T::zero(); n];
    let mut capacity = vec![T::zero(); n];

    let neumann = assemble_neumann_rows(mesh);
    a.set_row(0, 0, &neumann.first);
    a.set_row(n - 1, n - 3, &neumann.last);

    for i in 1..n - 1 {
        let (left, right) = mesh.layers_at_node(i);
        if mesh.is_contact(i) {
            let lam_left = models[left].conductivity(&u_guess[i])?;
            let lam_right = models[right].conductivity(&u_guess[i])?;
            let row = assemble_contact_row(mesh, &lam_left, &lam_right, i)?;
            a.set_row(i, i - 2, &row);
        } else {
            let sample = models[left].sample(&u_guess[i], &u_guess[i - 1], &u_guess[i + 1])?;
            let row = assemble_interior_row(mesh, &sample, i, tau, &u_old[i])?;
            a.set_row(i, i - 1, &[row.lower, row.diag, row.upper]);
            rhs[i] = match source {
                Some(s) => row.rhs + s[i].clone(),
                None => row.rhs,
            };
            capacity[i] = row.capacity;
        }
    }

    let mut full_rows = Vec::with_capacity(mesh.contact_count() + 2);
    full_rows.push(0);
    full_rows.extend_from_slice(mesh.contacts());
    full_rows.push(n - 1);
    a.set_full_rows(full_rows)?;
    Ok((LinearSystem::new(a, rhs)?, capacity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::BandMatrix;
    use crate::materials::MaterialModel;
    use crate::mesh::{build_mesh, LayerSpec};
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn uniform_mesh(r0: f64, n: usize) -> RadialMesh<f64> {
        let nodes = (0..n).map(|k| r0 + k as f64).collect();
        RadialMesh::from_nodes(nodes, &[], &["a".into()]).unwrap()
    }

    fn unit_sample(lambda: f64) -> CoefficientSample<f64> {
        CoefficientSample {
            rho_c: 1.0,
            lambda_half_minus: lambda,
            lambda_half_plus: lambda,
            phi: 0.0,
        }
    }

    #[test]
    fn interior_row_direct_substitution() {
        let mesh = uniform_mesh(97.0, 7);
        let row = assemble_interior_row(&mesh, &unit_sample(1.0), 3, &1.0, &0.7).unwrap();
        assert!((row.lower + 0.995).abs() < 1e-15);
        assert!((row.upper + 1.005).abs() < 1e-15);
        assert!((row.diag - 3.0).abs() < 1e-15);
        assert_eq!(row.rhs, 0.7);

        let row = assemble_interior_row(&mesh, &unit_sample(0.0), 3, &0.5, &1.0).unwrap();
        assert_eq!((row.lower, row.diag, row.upper), (0.0, 2.0, 0.0));
    }

    #[test]
    fn interior_row_rejects_contact_and_boundary() {
        let mesh = build_mesh(&[LayerSpec::new(1.0, 2.0, "a", 4), LayerSpec::new(2.0, 3.0, "a", 4)]).unwrap();
        let s = unit_sample(1.0);
        for i in [0, 4, 8] {
            assert!(matches!(
                assemble_interior_row(&mesh, &s, i, &1.0, &0.0),
                Err(Error::StencilSelection { .. })
            ));
        }
        assert!(matches!(
            assemble_contact_row(&mesh, &1.0, &1.0, 3),
            Err(Error::StencilSelection { .. })
        ));
    }

    #[test]
    fn interior_row_preserves_constants_exactly() {
        let mesh = build_mesh(&[LayerSpec::new(1.0, 3.0, "a", 6)]).unwrap().to_exact();
        let s = CoefficientSample {
            rho_c: ratio(3, 2),
            lambda_half_minus: ratio(7, 5),
            lambda_half_plus: ratio(2, 3),
            phi: ratio(0, 1),
        };
        let c = ratio(5, 4);
        let row = assemble_interior_row(&mesh, &s, 2, &ratio(1, 10), &c).unwrap();
        let applied = (row.lower + row.diag + row.upper) * c;
        assert_eq!(applied, row.rhs);
    }

    #[test]
    fn neumann_rows() {
        let mesh = uniform_mesh(1.0, 5);
        let rows = assemble_neumann_rows(&mesh);
        assert_eq!(rows.first, [3.0, -4.0, 1.0]);
        assert_eq!(rows.last, [1.0, -4.0, 3.0]);

        let mesh = RadialMesh::from_nodes(vec![1.0, 2.0, 4.0, 5.0, 6.0], &[], &["a".into()]).unwrap();
        let rows = assemble_neumann_rows(&mesh);
        // (8 u0 - 9 u1 + u2) / 6, scaled by the denominator 6.
        assert_eq!(rows.first, [8.0, -9.0, 1.0]);
        assert_eq!(rows.first.iter().sum::<f64>(), 0.0);
        assert_eq!(rows.last.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn contact_row_unit_steps() {
        let nodes = (0..9).map(|k| 1.0 + k as f64).collect();
        let mesh = RadialMesh::from_nodes(nodes, &[4], &["a".into(), "b".into()]).unwrap();
        let row = assemble_contact_row(&mesh, &1.0, &1.0, 4).unwrap();
        // (u2 - 4u3 + 3u4)/2 + (3u4 - 4u5 + u6)/2
        assert_eq!(row, [0.5, -2.0, 3.0, -2.0, 0.5]);

        let row = assemble_contact_row(&mesh, &0.0, &1.0, 4).unwrap();
        assert_eq!(row, [0.0, 0.0, 1.5, -2.0, 0.5]);
    }

    #[test]
    fn contact_row_sums_to_zero_exactly() {
        let layers = [LayerSpec::new(1.0, 2.0, "a", 5), LayerSpec::new(2.0, 4.5, "b", 7)];
        let mesh = build_mesh(&layers).unwrap().to_exact();
        let row = assemble_contact_row(&mesh, &ratio(3, 7), &ratio(11, 2), 5).unwrap();
        let sum = row.iter().cloned().fold(ratio(0, 1), |a, b| a + b);
        assert_eq!(sum, ratio(0, 1));
    }

    #[test]
    fn assembled_structure_and_constant_solution() {
        let layers = [LayerSpec::new(1.0, 2.0, "a", 4), LayerSpec::new(2.0, 4.0, "b", 4)];
        let mesh = build_mesh(&layers).unwrap();
        let materials = MaterialSet::new()
            .with("a", MaterialModel::constant(2.0, 3.0, 1.5, 0.0))
            .with("b", MaterialModel::constant(1.0, 1.0, 4.0, 0.0));
        let c = vec![0.8; 9];
        let sys = assemble_system(&mesh, &materials, &c, &c, &0.01, None).unwrap();
        assert_eq!(sys.matrix.full_rows(), &[0, 4, 8]);
        assert!(sys.residual_inf(&c) < 1e-12);

        let exact = mesh.to_exact();
        let c: Vec<BigRational> = vec![ratio(4, 5); 9];
        let sys = assemble_system(&exact, &materials, &c, &c, &ratio(1, 100), None).unwrap();
        assert!(sys.residual(&c).iter().all(|r| *r == ratio(0, 1)));
    }

    #[test]
    fn single_layer_is_sparse_off_boundary() {
        let mesh = build_mesh(&[LayerSpec::new(1.0, 2.0, "a", 10)]).unwrap();
        let materials = MaterialSet::new().with("a", MaterialModel::constant(1.0, 1.0, 1.0, 0.0));
        let u = vec![1.0; 11];
        let sys = assemble_system(&mesh, &materials, &u, &u, &1.0, None).unwrap();
        for i in 0..11 {
            let outer = sys.matrix.sub2[i] != 0.0 || sys.matrix.sup2[i] != 0.0;
            assert_eq!(outer, i == 0 || i == 10, "row {i}");
        }
        assert_eq!(sys.matrix.full_rows(), &[0, 10]);
        for i in 1..10 {
            assert!(sys.matrix.is_weakly_dominant_row(i));
        }
    }
}
