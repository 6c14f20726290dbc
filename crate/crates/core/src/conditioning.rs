//! Diagonal dominantization and the pivot-free pentadiagonal → tridiagonal
//! reduction.
//!
//! A shift `P` is a nonnegative diagonal added to the matrix; the same
//! `P û` is fed back on the right-hand side, so the fixed point of
//! `(A + P) û = b + P û` is the solution of `A û = b`.

use crate::band::{BandMatrix, LinearSystem, PentaMatrix, PentaSystem, TriMatrix, TriSystem};
use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::scalar::{two, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    Pentadiagonal,
    Tridiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDiag<T> {
    pub entries: Vec<T>,
    pub kind: ShiftKind,
    /// Rows outside `{0, N-1} ∪ I*` that needed a shift after reduction.
    pub extended_rows: Vec<usize>,
}

impl<T: Scalar> ShiftDiag<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nonzero_rows(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|&i| !self.entries[i].is_zero()).collect()
    }

    /// `P v`.
    pub fn feedback(&self, v: &[T]) -> Vec<T> {
        self.entries.iter().zip(v).map(|(p, x)| p.clone() * x.clone()).collect()
    }

    pub fn shift_penta(&self, matrix: &mut PentaMatrix<T>) {
        for (d, p) in matrix.diag.iter_mut().zip(&self.entries) {
            if !p.is_zero() {
                *d = d.clone() + p.clone();
            }
        }
    }

    pub fn shift_tri(&self, matrix: &mut TriMatrix<T>) {
        for (d, p) in matrix.diag.iter_mut().zip(&self.entries) {
            if !p.is_zero() {
                *d = d.clone() + p.clone();
            }
        }
    }

    /// Shifts the system matrix and adds `P feedback` to the right-hand side.
    pub fn apply_penta(&self, system: &mut PentaSystem<T>, feedback: &[T]) {
        self.shift_penta(&mut system.matrix);
        add_feedback(&mut system.rhs, &self.entries, feedback);
    }

    pub fn apply_tri(&self, system: &mut TriSystem<T>, feedback: &[T]) {
        self.shift_tri(&mut system.matrix);
        add_feedback(&mut system.rhs, &self.entries, feedback);
    }
}

fn add_feedback<T: Scalar>(rhs: &mut [T], entries: &[T], feedback: &[T]) {
    for ((b, p), x) in rhs.iter_mut().zip(entries).zip(feedback) {
        if !p.is_zero() {
            *b = b.clone() + p.clone() * x.clone();
        }
    }
}

/// Boundary entries `2 h_1^2`, `2 h_{N-1}^2` and, at every contact,
/// `2 λ^m h_{i*} / (h_{i*-1}(h_{i*} + h_{i*-1})) + 2 λ^{m+1} h_{i*+1} / (h_{i*+2}(h_{i*+1} + h_{i*+2}))`.
///
/// `contact_lambdas[k]` holds the left/right conductivities of the `k`-th contact.
pub fn build_pd_shift<T: Scalar>(mesh: &RadialMesh<T>, contact_lambdas: &[(T, T)]) -> Result<ShiftDiag<T>> {
    let n = mesh.len();
    if contact_lambdas.len() != mesh.contact_count() {
        return Err(Error::DimensionMismatch {
            expected: mesh.contact_count(),
            found: contact_lambdas.len(),
        });
    }
    let mut entries = vec![T::zero(); n];
    let h1 = mesh.step(1);
    let hl = mesh.step(n - 1);
    entries[0] = two::<T>() * h1.clone() * h1;
    entries[n - 1] = two::<T>() * hl.clone() * hl;
    for (&c, (lam_l, lam_r)) in mesh.contacts().iter().zip(contact_lambdas) {
        let (ha, hb) = (mesh.step(c), mesh.step(c - 1));
        let (ha_r, hb_r) = (mesh.step(c + 1), mesh.step(c + 2));
        let left = two::<T>() * lam_l.clone() * ha.clone() / (hb.clone() * (ha + hb));
        let right = two::<T>() * lam_r.clone() * ha_r.clone() / (hb_r.clone() * (ha_r + hb_r));
        entries[c] = left + right;
    }
    Ok(ShiftDiag {
        entries,
        kind: ShiftKind::Pentadiagonal,
        extended_rows: Vec::new(),
    })
}

/// Eliminates the outer entries of every full row with the adjacent
/// tridiagonal row: `sub2[r]` with row `r-1`, `sup2[r]` with row `r+1`.
/// Row operations are applied to the right-hand side as well.
pub fn pd_to_td<T: Scalar>(system: &PentaSystem<T>) -> Result<TriSystem<T>> {
    let a = &system.matrix;
    let n = a.dim();
    let full = a.full_rows();
    let is_full = |r: usize| full.binary_search(&r).is_ok();
    let mut sub = a.sub1.clone();
    let mut diag = a.diag.clone();
    let mut sup = a.sup1.clone();
    let mut rhs = system.rhs.clone();

    for &r in full {
        if r >= 2 && !a.sub2[r].is_zero() {
            let p = r - 1;
            if is_full(p) {
                return Err(Error::Precondition(format!(
                    "row {r} needs row {p} to be tridiagonal for the reduction"
                )));
            }
            // Row p covers columns r-2, r-1, r.
            if a.sub1[p].is_zero() {
                return Err(Error::ReductionBreakdown { row: r });
            }
            let m = a.sub2[r].clone() / a.sub1[p].clone();
            sub[r] = sub[r].clone() - m.clone() * a.diag[p].clone();
            diag[r] = diag[r].clone() - m.clone() * a.sup1[p].clone();
            rhs[r] = rhs[r].clone() - m * system.rhs[p].clone();
        }
        if r + 2 < n && !a.sup2[r].is_zero() {
            let q = r + 1;
            if is_full(q) {
                return Err(Error::Precondition(format!(
                    "row {r} needs row {q} to be tridiagonal for the reduction"
                )));
            }
            // Row q covers columns r, r+1, r+2.
            if a.sup1[q].is_zero() {
                return Err(Error::ReductionBreakdown { row: r });
            }
            let m = a.sup2[r].clone() / a.sup1[q].clone();
            diag[r] = diag[r].clone() - m.clone() * a.sub1[q].clone();
            sup[r] = sup[r].clone() - m.clone() * a.diag[q].clone();
            rhs[r] = rhs[r].clone() - m * system.rhs[q].clone();
        }
    }
    let matrix = TriMatrix::from_diagonals(sub, diag, sup)?.with_reduced_rows(full.to_vec());
    LinearSystem::new(matrix, rhs)
}

/// `|Ã_{0,1}|` at row 0, `|Ã_{N-1,N-2}|` at row `N-1` and the sum of both
/// off-diagonal magnitudes at every other reduced row. Any remaining row that
/// is not weakly dominant after this is shifted as well and listed in
/// [`ShiftDiag::extended_rows`].
pub fn build_td_shift<T: Scalar>(td: &TriMatrix<T>) -> ShiftDiag<T> {
    let n = td.dim();
    let mut entries = vec![T::zero(); n];
    let mut designated: Vec<usize> = td.reduced_rows().to_vec();
    if n > 0 {
        designated.push(0);
        designated.push(n - 1);
    }
    designated.sort_unstable();
    designated.dedup();
    for &r in &designated {
        entries[r] = td.sub[r].abs() + td.sup[r].abs();
    }

    let mut extended_rows = Vec::new();
    for i in 0..n {
        let off = td.sub[i].abs() + td.sup[i].abs();
        let shifted = td.diag[i].clone() + entries[i].clone();
        if shifted.abs() >= off {
            continue;
        }
        let mut extra = off.clone() - shifted.clone();
        if (shifted.clone() + extra.clone()).abs() < off {
            extra = two::<T>() * off - shifted;
        }
        entries[i] = entries[i].clone() + extra;
        if designated.binary_search(&i).is_err() {
            extended_rows.push(i);
        }
    }
    ShiftDiag {
        entries,
        kind: ShiftKind::Tridiagonal,
        extended_rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_system, contact_conductivities};
    use crate::materials::{MaterialModel, MaterialSet};
    use crate::mesh::{build_mesh, LayerSpec};
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn two_layer_exact() -> (RadialMesh<BigRational>, PentaSystem<BigRational>) {
        let layers = [LayerSpec::new(1.0, 2.0, "a", 4), LayerSpec::new(2.0, 4.0, "b", 4)];
        let mesh = build_mesh(&layers).unwrap().to_exact();
        let materials = MaterialSet::new()
            .with("a", MaterialModel::constant(1.0, 1.0, 3.0, 0.0))
            .with("b", MaterialModel::constant(2.0, 1.0, 0.5, 0.0));
        let u: Vec<BigRational> = (0..9).map(|k| ratio(k * k, 7)).collect();
        let sys = assemble_system(&mesh, &materials, &u, &u, &ratio(1, 8), None).unwrap();
        (mesh, sys)
    }

    #[test]
    fn pd_shift_values() {
        let mesh = build_mesh(&[LayerSpec::new(1.0, 2.0, "a", 4)]).unwrap();
        let p = build_pd_shift(&mesh, &[]).unwrap();
        assert_eq!(p.entries[0], 0.125);
        assert_eq!(p.entries[4], 0.125);
        assert_eq!(p.nonzero_rows(), vec![0, 4]);

        let nodes = (0..9).map(|k| 1.0 + k as f64).collect();
        let mesh = RadialMesh::from_nodes(nodes, &[4], &["a".into(), "b".into()]).unwrap();
        let p = build_pd_shift(&mesh, &[(1.0, 1.0)]).unwrap();
        assert_eq!(p.entries[4], 2.0);
    }

    #[test]
    fn pd_shift_makes_assembled_system_dominant() {
        let (mesh, mut sys) = two_layer_exact();
        let u: Vec<BigRational> = (0..9).map(|k| ratio(k * k, 7)).collect();
        let materials = MaterialSet::new()
            .with("a", MaterialModel::constant(1.0, 1.0, 3.0, 0.0))
            .with("b", MaterialModel::constant(2.0, 1.0, 0.5, 0.0));
        let lams = contact_conductivities(&mesh, &materials, &u).unwrap();
        let p = build_pd_shift(&mesh, &lams).unwrap();
        let unshifted = sys.matrix.clone();
        for i in [0, 4, 8] {
            assert!(!unshifted.is_weakly_dominant_row(i));
        }
        p.shift_penta(&mut sys.matrix);
        for i in 0..9 {
            let (d, off) = sys.matrix.row_dominance(i);
            assert!(d >= off, "row {i}");
            if [0, 4, 8].contains(&i) {
                assert_eq!(d, off, "shift is the minimum for row {i}");
            }
        }
        assert_eq!(sys.matrix.sup1, unshifted.sup1);
        assert_eq!(sys.matrix.sub2, unshifted.sub2);
    }

    #[test]
    fn already_tridiagonal_passes_through() {
        let m = PentaMatrix::from_diagonals(
            vec![0.0; 4],
            vec![0.0, 1.0, 1.0, 1.0],
            vec![4.0; 4],
            vec![1.0, 1.0, 1.0, 0.0],
            vec![0.0; 4],
            vec![],
        )
        .unwrap();
        let sys = LinearSystem::new(m.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let td = pd_to_td(&sys).unwrap();
        assert_eq!(td.matrix.sub, m.sub1);
        assert_eq!(td.matrix.diag, m.diag);
        assert_eq!(td.matrix.sup, m.sup1);
        assert_eq!(td.rhs, sys.rhs);
    }

    #[test]
    fn reduction_breakdown_names_row() {
        let m = PentaMatrix::from_diagonals(
            vec![0.0; 4],
            vec![0.0, 1.0, 1.0, 1.0],
            vec![4.0; 4],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0],
        )
        .unwrap();
        let sys = LinearSystem::new(m, vec![0.0; 4]).unwrap();
        assert!(matches!(pd_to_td(&sys), Err(Error::ReductionBreakdown { row: 0 })));
    }

    #[test]
    fn reduction_preserves_exact_solution() {
        let (_, sys) = two_layer_exact();
        let td = pd_to_td(&sys).unwrap();
        let x: Vec<BigRational> = (0..9).map(|k| ratio(2 * k + 1, 3)).collect();
        // Same row operations on A x: residual of x against (A x) is preserved.
        let b = sys.matrix.apply(&x);
        let sys_b = LinearSystem::new(sys.matrix.clone(), b).unwrap();
        let td_b = pd_to_td(&sys_b).unwrap();
        assert!(td_b.residual(&x).iter().all(|r| *r == ratio(0, 1)));
        assert_eq!(td.matrix.reduced_rows(), &[0, 4, 8]);
    }

    #[test]
    fn td_shift_values() {
        let t = TriMatrix::from_diagonals(vec![0.0, 1.0, 0.0], vec![1.0, 5.0, 3.0], vec![-2.0, 1.0, 0.0]).unwrap();
        let p = build_td_shift(&t);
        assert_eq!(p.entries[0], 2.0);
        assert_eq!(p.entries[2], 0.0);

        let t = TriMatrix::from_diagonals(
            vec![0.0, 1.0, -1.5, 1.0, 1.0],
            vec![4.0, 4.0, 1.0, 4.0, 4.0],
            vec![1.0, 1.0, 0.5, 1.0, 0.0],
            )
        .unwrap()
        .with_reduced_rows(vec![0, 2, 4]);
        let p = build_td_shift(&t);
        assert_eq!(p.entries[2], 2.0);
        assert!(p.extended_rows.is_empty());
    }

    #[test]
    fn td_shift_extends_to_non_dominant_rows() {
        let t = TriMatrix::from_diagonals(
            vec![0.0, 1.0, 3.0, 1.0],
            vec![4.0, -1.0, 4.0, 4.0],
            vec![1.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        let p = build_td_shift(&t);
        assert_eq!(p.extended_rows, vec![1]);
        let mut shifted = t.clone();
        p.shift_tri(&mut shifted);
        assert!(shifted.is_weakly_diagonally_dominant());
        assert!(p.entries.iter().all(|e| *e >= 0.0));
    }

    #[test]
    fn td_shift_dominates_reduced_assembled_rows() {
        let (_, sys) = two_layer_exact();
        let td = pd_to_td(&sys).unwrap();
        let p = build_td_shift(&td.matrix);
        let mut shifted = td.matrix.clone();
        p.shift_tri(&mut shifted);
        for &r in &[0, 4, 8] {
            assert!(shifted.is_weakly_dominant_row(r), "row {r}");
        }
        assert!(shifted.is_weakly_diagonally_dominant());
    }
}
