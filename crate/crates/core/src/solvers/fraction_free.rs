//! Integer (fraction-free) band elimination.
//!
//! Every row is scaled to integers, then the LU recurrences are carried on
//! numerators over the leading principal minors `D_k`:
//!
//! ```text
//! D_{i+1} = mu_i D_i     AL_i = al_i D_{i+1}     ZE_i = ze_i D_{i+1}
//! GA_i    = ga_i D_{i-1} = l1_i D_{i-1} - AL_{i-2} l2_i
//! AL_i    = u1_i D_i - u2_{i-1} GA_i
//! D_{i+1} = (d_i D_i D_{i-1} - u2_{i-2} l2_i D_{i-2} D_i - AL_{i-1} GA_i) / D_{i-1}
//! ZE_i    = (b_i D_i D_{i-1} - ZE_{i-2} l2_i D_i     - ZE_{i-1} GA_i) / D_{i-1}
//! ```
//!
//! In rows without a second subdiagonal entry `GA_i = l1_i D_{i-1}` and the
//! division cancels, so those rows only multiply big integers by row entries.
//! A zero leading minor stops the sweep; the caller then falls back to the
//! deferred-zero path.
//!
//! Back substitution first assumes small solution heights, as on the
//! intended systems: each component is recovered from the leading bits of its
//! numerator and denominator and verified exactly. If one component is not
//! of that kind, the pass restarts over the common denominator `D_N`, where
//! Cramer's rule makes every numerator an integer and each step an exact
//! division, and the components are reduced once at the end.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Row-scaled integer band. `l2`/`u2` are empty for tridiagonal input.
pub(crate) struct IntegerBand {
    l2: Vec<BigInt>,
    l1: Vec<BigInt>,
    d: Vec<BigInt>,
    u1: Vec<BigInt>,
    u2: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl IntegerBand {
    /// Multiplies each row (and its right-hand side) by the lcm of its
    /// denominators. `l2`/`u2` may be empty.
    pub(crate) fn new(
        l2: &[BigRational],
        l1: &[BigRational],
        d: &[BigRational],
        u1: &[BigRational],
        u2: &[BigRational],
        b: &[BigRational],
    ) -> Self {
        let n = d.len();
        let penta = !l2.is_empty();
        let mut out = IntegerBand {
            l2: Vec::with_capacity(if penta { n } else { 0 }),
            l1: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
            u1: Vec::with_capacity(n),
            u2: Vec::with_capacity(if penta { n } else { 0 }),
            b: Vec::with_capacity(n),
        };
        for i in 0..n {
            let row: Vec<&BigRational> = if penta {
                vec![&l2[i], &l1[i], &d[i], &u1[i], &u2[i], &b[i]]
            } else {
                vec![&l1[i], &d[i], &u1[i], &b[i]]
            };
            let scale = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let mut ints = row.into_iter().map(|q| q.numer() * (&scale / q.denom()));
            if penta {
                out.l2.push(ints.next().unwrap());
            }
            out.l1.push(ints.next().unwrap());
            out.d.push(ints.next().unwrap());
            out.u1.push(ints.next().unwrap());
            if penta {
                out.u2.push(ints.next().unwrap());
            }
            out.b.push(ints.next().unwrap());
        }
        out
    }

    fn l2(&self, i: usize) -> Option<&BigInt> {
        self.l2.get(i).filter(|v| !v.is_zero())
    }

    fn u2(&self, i: usize) -> Option<&BigInt> {
        self.u2.get(i).filter(|v| !v.is_zero())
    }

    /// Exact solution, or `None` when a leading principal minor vanishes.
    ///
    /// The forward sweep keeps a checkpoint every `stride` rows; back
    /// substitution replays one block at a time, so only `O(sqrt N)` big
    /// integers are alive at once.
    pub(crate) fn solve(&self) -> Option<Vec<BigRational>> {
        let n = self.d.len();
        let stride = ((2 * n) as f64).sqrt().ceil().max(16.0) as usize;
        let mut state = Sweep::start();
        let mut checkpoints = Vec::with_capacity(n / stride + 1);
        for i in 0..n {
            if i % stride == 0 {
                checkpoints.push(state.clone());
            }
            state.row(self, i)?;
        }
        let det = state.minors[2].clone();

        let unit = (BigInt::zero(), BigInt::one());
        let small = self.back_substitute(&checkpoints, stride, unit, |i, f, x| self.back_row_small(i, f, x));
        if let Some(x) = small {
            return Some(x.into_iter().map(|(p, q)| BigRational::new_raw(p, q)).collect());
        }
        let numerators = self.back_substitute(&checkpoints, stride, BigInt::zero(), |i, f, x| {
            Some(self.back_row_common(i, f, x, &det))
        })?;
        Some(
            numerators
                .into_iter()
                .map(|p| {
                    let (p, q) = reduce(p, det.clone());
                    BigRational::new_raw(p, q)
                })
                .collect(),
        )
    }

    /// Replays the sweep block by block from the last checkpoint and fills
    /// `x` from the bottom up with `step`; stops at the first `None`.
    fn back_substitute<X: Clone>(
        &self,
        checkpoints: &[Sweep],
        stride: usize,
        zero: X,
        step: impl Fn(usize, &RowFactors, &[X]) -> Option<X>,
    ) -> Option<Vec<X>> {
        let n = self.d.len();
        let mut x = vec![zero; n];
        let mut block = Vec::with_capacity(stride);
        for (k, checkpoint) in checkpoints.iter().enumerate().rev() {
            let first = k * stride;
            let last = (first + stride).min(n);
            let mut state = checkpoint.clone();
            block.clear();
            for i in first..last {
                state.row(self, i)?;
                block.push(state.factors());
            }
            for i in (first..last).rev() {
                x[i] = step(i, &block[i - first], &x)?;
            }
        }
        Some(x)
    }

    /// `x_i = (ZE_i - AL_i x_{i+1} - u2_i D_i x_{i+2}) / D_{i+1}` with every
    /// `x` in lowest terms; `None` when the result is not of small height.
    fn back_row_small(&self, i: usize, f: &RowFactors, x: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
        let n = x.len();
        let unit = (BigInt::zero(), BigInt::one());
        let (p1, q1) = if i + 1 < n { &x[i + 1] } else { &unit };
        let (p2, q2) = if i + 2 < n { &x[i + 2] } else { &unit };
        let q12 = q1 * q2;
        let mut num = &f.ze * &q12;
        if !p1.is_zero() {
            num -= &f.al * (p1 * q2);
        }
        if let (Some(u2), false) = (self.u2(i), p2.is_zero()) {
            num -= u2 * &f.minor * (p2 * q1);
        }
        small_ratio(&num, &(&f.next_minor * q12))
    }

    /// The same step on numerators over `det = D_N`:
    /// `X_i = (ZE_i det - AL_i X_{i+1} - u2_i D_i X_{i+2}) / D_{i+1}`, exact.
    fn back_row_common(&self, i: usize, f: &RowFactors, x: &[BigInt], det: &BigInt) -> BigInt {
        let n = x.len();
        let mut num = &f.ze * det;
        if i + 1 < n && !x[i + 1].is_zero() {
            num -= &f.al * &x[i + 1];
        }
        if i + 2 < n && !x[i + 2].is_zero() {
            if let Some(u2) = self.u2(i) {
                num -= u2 * &f.minor * &x[i + 2];
            }
        }
        num / &f.next_minor
    }
}

/// Per-row quantities needed by back substitution.
struct RowFactors {
    al: BigInt,
    ze: BigInt,
    minor: BigInt,
    next_minor: BigInt,
}

/// Forward-sweep state before row `i`: `D_{i-2}, D_{i-1}, D_i`,
/// `AL_{i-2}, AL_{i-1}` and `ZE_{i-2}, ZE_{i-1}`.
#[derive(Clone)]
struct Sweep {
    minors: [BigInt; 3],
    al: [BigInt; 2],
    ze: [BigInt; 2],
}

impl Sweep {
    fn start() -> Self {
        Self {
            minors: [BigInt::one(), BigInt::one(), BigInt::one()],
            al: [BigInt::zero(), BigInt::zero()],
            ze: [BigInt::zero(), BigInt::zero()],
        }
    }

    /// Advances over row `i`; `None` when `D_{i+1}` vanishes.
    fn row(&mut self, band: &IntegerBand, i: usize) -> Option<()> {
        let [d_im2, d_im1, d_i] = &self.minors;
        let [al_im2, al_im1] = &self.al;
        let [ze_im2, ze_im1] = &self.ze;
        let l2 = if i >= 2 { band.l2(i) } else { None };
        let ga = if i == 0 {
            BigInt::zero()
        } else {
            let mut g = &band.l1[i] * d_im1;
            if let Some(l2) = l2 {
                g -= al_im2 * l2;
            }
            g
        };
        let (minor, z) = match (i, l2) {
            (0, _) => (band.d[0].clone(), band.b[0].clone()),
            (_, None) => (
                &band.d[i] * d_i - al_im1 * &band.l1[i],
                &band.b[i] * d_i - ze_im1 * &band.l1[i],
            ),
            (_, Some(l2)) => {
                let mut m = &band.d[i] * d_i * d_im1 - al_im1 * &ga;
                if let Some(u2) = band.u2(i - 2) {
                    m -= u2 * l2 * d_im2 * d_i;
                }
                let z = &band.b[i] * d_i * d_im1 - ze_im2 * l2 * d_i - ze_im1 * &ga;
                (m / d_im1, z / d_im1)
            }
        };
        if minor.is_zero() {
            return None;
        }
        let mut a = &band.u1[i] * d_i;
        if i >= 1 {
            if let Some(u2) = band.u2(i - 1) {
                a -= u2 * &ga;
            }
        }
        self.minors.rotate_left(1);
        self.minors[2] = minor;
        self.al.rotate_left(1);
        self.al[1] = a;
        self.ze.rotate_left(1);
        self.ze[1] = z;
        Some(())
    }

    /// Factors of the row just processed.
    fn factors(&self) -> RowFactors {
        RowFactors {
            al: self.al[1].clone(),
            ze: self.ze[1].clone(),
            minor: self.minors[1].clone(),
            next_minor: self.minors[2].clone(),
        }
    }
}

/// `p / q` in lowest terms with `q > 0`.
fn reduce(p: BigInt, q: BigInt) -> (BigInt, BigInt) {
    if let Some(r) = small_ratio(&p, &q) {
        return r;
    }
    let g = p.gcd(&q);
    let (mut p, mut q) = if g.is_one() { (p, q) } else { (p / &g, q / &g) };
    if q.sign() == Sign::Minus {
        p = -p;
        q = -q;
    }
    (p, q)
}

/// Finds `p / q` when the reduced fraction has a denominator below `2^48`,
/// from the continued fraction of the leading bits; every candidate is
/// checked exactly.
fn small_ratio(p: &BigInt, q: &BigInt) -> Option<(BigInt, BigInt)> {
    const KEEP: u64 = 120;
    const LIMIT: u128 = 1 << 48;
    if p.is_zero() {
        return Some((BigInt::zero(), BigInt::one()));
    }
    let negative = (p.sign() == Sign::Minus) != (q.sign() == Sign::Minus);
    let (pa, qa) = (p.magnitude(), q.magnitude());
    let shift = pa.bits().max(qa.bits()).saturating_sub(KEEP);
    let mut a = (pa >> shift).to_u128()?;
    let mut b = (qa >> shift).to_u128()?;
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    while b != 0 {
        let t = a / b;
        let h = t.checked_mul(h1)?.checked_add(h0)?;
        let k = t.checked_mul(k1)?.checked_add(k0)?;
        if k >= LIMIT {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        (a, b) = (b, a - t * b);
        // A very large next quotient (or an exact end) marks the candidate.
        if b == 0 || a / b > 1 << 20 {
            let (hh, kk) = (BigInt::from(h1), BigInt::from(k1));
            if pa * kk.magnitude() == qa * hh.magnitude() {
                return Some((if negative { -hh } else { hh }, kk));
            }
        }
    }
    None
}
