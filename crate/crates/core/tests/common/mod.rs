//! Test-only oracles and random system generators.
#![allow(dead_code)]

use multilayer_heat::band::{BandMatrix, LinearSystem, PentaMatrix, PentaSystem, TriMatrix, TriSystem};
use multilayer_heat::mesh::{LayerSpec, RadialMesh};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense Gaussian elimination with partial pivoting. Zero multipliers are
/// skipped, which keeps banded inputs cheap without assuming a band.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        assert!(a[p][k] != 0.0, "oracle: singular matrix");
        a.swap(k, p);
        b.swap(k, p);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for (off, row) in rest.iter_mut().enumerate() {
            let m = row[k] / pivot_row[k];
            if m == 0.0 {
                continue;
            }
            for j in k..n {
                if pivot_row[j] != 0.0 {
                    row[j] -= m * pivot_row[j];
                }
            }
            b[k + 1 + off] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).filter(|&j| a[i][j] != 0.0).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Exact dense elimination; pivots on the first nonzero entry of the column.
/// `None` when the matrix is singular.
pub fn dense_solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let m = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &m * &a[k][j];
                a[i][j] -= t;
            }
            let t = &m * &b[k];
            b[i] -= t;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            s -= &a[i][j] * &x[j];
        }
        x[i] = s / &a[i][i];
    }
    Some(x)
}

pub fn oracle<M: BandMatrix<Elem = f64>>(system: &LinearSystem<M>) -> Vec<f64> {
    dense_solve(system.matrix.to_dense(), system.rhs.clone())
}

pub fn exact_oracle<M: BandMatrix<Elem = BigRational>>(system: &LinearSystem<M>) -> Option<Vec<BigRational>> {
    dense_solve_exact(system.matrix.to_dense(), system.rhs.clone())
}

pub fn rel_err(x: &[f64], reference: &[f64]) -> f64 {
    let num = x.iter().zip(reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let den = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
    num / den.max(f64::MIN_POSITIVE)
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `k` interior full rows spread over `1..n-1`, at least two rows apart from
/// each other and from the ends.
pub fn contact_rows(n: usize, k: usize) -> Vec<usize> {
    let mut rows = Vec::with_capacity(k);
    for j in 0..k {
        let r = (2 + (2 * j + 1) * (n - 4) / (2 * k)).max(rows.last().map_or(2, |&p| p + 2));
        rows.push(r);
    }
    assert!(rows.last().is_none_or(|&r| r + 2 < n), "no room for {k} separated rows in {n}");
    rows
}

fn off(rng: &mut ChaCha8Rng) -> f64 {
    let m: f64 = rng.gen_range(0.1..1.0);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Random weakly dominant pentadiagonal system with outer entries in rows
/// `{0, n-1}` and `k` separated interior rows; `b = A x` for random `x`.
pub fn random_penta(rng: &mut ChaCha8Rng, n: usize, k: usize) -> PentaSystem<f64> {
    let mut full = contact_rows(n, k);
    full.push(0);
    full.push(n - 1);
    full.sort_unstable();
    let mut m = PentaMatrix::<f64>::zeros(n);
    for i in 0..n {
        let is_full = full.binary_search(&i).is_ok();
        if i >= 1 {
            m.sub1[i] = off(rng);
        }
        if i + 1 < n {
            m.sup1[i] = off(rng);
        }
        if is_full && i >= 2 {
            m.sub2[i] = off(rng);
        }
        if is_full && i + 2 < n {
            m.sup2[i] = off(rng);
        }
        let s = m.sub2[i].abs() + m.sub1[i].abs() + m.sup1[i].abs() + m.sup2[i].abs();
        let d = s * rng.gen_range(1.0..2.0);
        m.diag[i] = if rng.gen_bool(0.5) { d } else { -d };
    }
    m.set_full_rows(full).unwrap();
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = m.apply(&x);
    LinearSystem::new(m, b).unwrap()
}

/// Random weakly dominant tridiagonal system.
pub fn random_tri(rng: &mut ChaCha8Rng, n: usize) -> TriSystem<f64> {
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for i in 0..n {
        if i >= 1 {
            sub[i] = off(rng);
        }
        if i + 1 < n {
            sup[i] = off(rng);
        }
        diag[i] = (sub[i].abs() + sup[i].abs()) * rng.gen_range(1.0..2.0);
    }
    let m = TriMatrix::from_diagonals(sub, diag, sup).unwrap();
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = m.apply(&x);
    LinearSystem::new(m, b).unwrap()
}

fn small_int(rng: &mut ChaCha8Rng) -> i64 {
    let v = rng.gen_range(1..=9);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Integer pentadiagonal system, strictly dominant, same row pattern as
/// [`random_penta`].
pub fn random_int_penta(rng: &mut ChaCha8Rng, n: usize, k: usize) -> PentaSystem<BigRational> {
    let mut full = contact_rows(n, k);
    full.push(0);
    full.push(n - 1);
    full.sort_unstable();
    let mut m = PentaMatrix::<BigRational>::zeros(n);
    for i in 0..n {
        let is_full = full.binary_search(&i).is_ok();
        if i >= 1 {
            m.sub1[i] = q(small_int(rng));
        }
        if i + 1 < n {
            m.sup1[i] = q(small_int(rng));
        }
        if is_full && i >= 2 {
            m.sub2[i] = q(small_int(rng));
        }
        if is_full && i + 2 < n {
            m.sup2[i] = q(small_int(rng));
        }
        let s = m.sub2[i].abs() + m.sub1[i].abs() + m.sup1[i].abs() + m.sup2[i].abs();
        m.diag[i] = s + q(rng.gen_range(1..=5));
    }
    m.set_full_rows(full).unwrap();
    let b = (0..n).map(|_| q(rng.gen_range(-20..=20))).collect();
    LinearSystem::new(m, b).unwrap()
}

/// Integer tridiagonal system whose leading 2x2 block is singular while the
/// whole matrix stays regular, so Thomas meets an exact zero pivot at row 1.
pub fn zero_minor_tri(rng: &mut ChaCha8Rng, n: usize) -> TriSystem<BigRational> {
    loop {
        let mut sub = vec![q(0); n];
        let mut diag = vec![q(0); n];
        let mut sup = vec![q(0); n];
        for i in 0..n {
            if i >= 1 {
                sub[i] = q(small_int(rng));
            }
            if i + 1 < n {
                sup[i] = q(small_int(rng));
            }
            diag[i] = q(small_int(rng));
        }
        // det [[d0, u0], [l1, d1]] = 0.
        let (a, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        diag[0] = q(a);
        sup[0] = q(c);
        sub[1] = q(a * 2);
        diag[1] = q(c * 2);
        let m = TriMatrix::from_diagonals(sub, diag, sup).unwrap();
        let b: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(-9..=9))).collect();
        let system = LinearSystem::new(m, b).unwrap();
        if exact_oracle(&system).is_some() {
            return system;
        }
    }
}

/// Valid layered mesh with random radii and cell counts.
pub fn random_layers(rng: &mut ChaCha8Rng, layers: usize) -> Vec<LayerSpec> {
    let mut r = rng.gen_range(0.5..2.0);
    (0..layers)
        .map(|l| {
            let width = rng.gen_range(0.1..1.0);
            let spec = LayerSpec::new(r, r + width, format!("m{}", l % 2), rng.gen_range(4..12));
            r += width;
            spec
        })
        .collect()
}

pub fn mesh_of(layers: &[LayerSpec]) -> RadialMesh {
    RadialMesh::from_layers(layers).unwrap()
}
