//! Two-level (Givens) factorisation of packet-basis unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::ManifoldSpec;

/// Entries below this magnitude are treated as already eliminated.
pub const ELIMINATION_THRESHOLD: f64 = 1e-14;

/// Unitarity tolerance accepted by [`decompose_unitary`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

pub type Mat2 = [[Complex64; 2]; 2];

/// A 2×2 unitary acting on packet slots (k, k2); slot k is the first row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelOp {
    pub k: i64,
    pub k2: i64,
    pub u2: Mat2,
}

impl TwoLevelOp {
    pub fn new(k: i64, k2: i64, u2: Mat2) -> Result<Self> {
        if k == k2 {
            return Err(Error::InvalidManifold(format!("two-level op needs distinct slots, got ({k}, {k2})")));
        }
        let dev = unitarity_error2(&u2);
        if dev > 1e-12 {
            return Err(Error::NonUnitary(dev));
        }
        Ok(Self { k, k2, u2 })
    }

    /// The same operation with the slot roles exchanged.
    pub fn swapped(&self) -> Self {
        let u = self.u2;
        Self {
            k: self.k2,
            k2: self.k,
            u2: [[u[1][1], u[1][0]], [u[0][1], u[0][0]]],
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.u2[0][1].norm() < ELIMINATION_THRESHOLD && self.u2[1][0].norm() < ELIMINATION_THRESHOLD
    }

    pub fn touches(&self, k: i64) -> bool {
        self.k == k || self.k2 == k
    }

    /// Embed into a d×d matrix (rows and columns in storage order).
    pub fn embed(&self, spec: &ManifoldSpec) -> Result<DMatrix<Complex64>> {
        let (a, b) = (spec.position(self.k)?, spec.position(self.k2)?);
        let mut m = DMatrix::identity(spec.d(), spec.d());
        m[(a, a)] = self.u2[0][0];
        m[(a, b)] = self.u2[0][1];
        m[(b, a)] = self.u2[1][0];
        m[(b, b)] = self.u2[1][1];
        Ok(m)
    }

    /// Apply in place to packet amplitudes in storage order.
    pub fn apply(&self, spec: &ManifoldSpec, v: &mut [Complex64]) -> Result<()> {
        let (a, b) = (spec.position(self.k)?, spec.position(self.k2)?);
        let (x, y) = (v[a], v[b]);
        v[a] = self.u2[0][0] * x + self.u2[0][1] * y;
        v[b] = self.u2[1][0] * x + self.u2[1][1] * y;
        Ok(())
    }
}

fn unitarity_error2(u: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let dot = u[0][r].conj() * u[0][c] + u[1][r].conj() * u[1][c];
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// max |U†U − I|.
pub fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for r in 0..p.nrows() {
        for c in 0..p.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((p[(r, c)] - target).norm());
        }
    }
    worst
}

/// Factor U into two-level operations.
///
/// Rows and columns of `u` are packet slots in storage order (k = j_min
/// first). The returned list is in application order: applying the ops one
/// after another to a vector reproduces U·v. It holds at most d(d−1)/2
/// rotations followed by at most ⌈d/2⌉ diagonal phase ops, which come
/// first in application order.
pub fn decompose_unitary(u: &DMatrix<Complex64>, spec: &ManifoldSpec) -> Result<Vec<TwoLevelOp>> {
    let d = spec.d();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.nrows().max(u.ncols()),
        });
    }
    let dev = unitarity_error(u);
    if dev > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary(dev));
    }

    let mut w = u.clone();
    // Givens rotations G with G_m ⋯ G_1 U = D, stored as (row c, row r, G).
    let mut rotations: Vec<(usize, usize, Mat2)> = Vec::new();
    for c in 0..d {
        for r in c + 1..d {
            let b = w[(r, c)];
            if b.norm() < ELIMINATION_THRESHOLD {
                continue;
            }
            let a = w[(c, c)];
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let g: Mat2 = [[a.conj() / n, b.conj() / n], [-b / n, a / n]];
            for col in 0..d {
                let (x, y) = (w[(c, col)], w[(r, col)]);
                w[(c, col)] = g[0][0] * x + g[0][1] * y;
                w[(r, col)] = g[1][0] * x + g[1][1] * y;
            }
            rotations.push((c, r, g));
        }
    }

    let mut ops = Vec::with_capacity(rotations.len() + d / 2 + 1);
    let phased: Vec<usize> = (0..d)
        .filter(|&i| (w[(i, i)] - Complex64::new(1.0, 0.0)).norm() > ELIMINATION_THRESHOLD)
        .collect();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for pair in phased.chunks(2) {
        let a = pair[0];
        let (b, pb) = match pair.get(1) {
            Some(&b) => (b, w[(b, b)] / w[(b, b)].norm()),
            None => (if a == 0 { 1 } else { 0 }, one),
        };
        let pa = w[(a, a)] / w[(a, a)].norm();
        ops.push(TwoLevelOp {
            k: spec.index_at(a),
            k2: spec.index_at(b),
            u2: [[pa, zero], [zero, pb]],
        });
    }
    for &(c, r, g) in rotations.iter().rev() {
        // G† acting on rows (c, r)
        let gd: Mat2 = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
        ops.push(TwoLevelOp {
            k: spec.index_at(c),
            k2: spec.index_at(r),
            u2: gd,
        });
    }
    Ok(ops)
}

/// Fold diagonal phase ops into the first later rotation on the same slots.
///
/// A phase op diag(p_a, p_b) followed (in application order) by rotations
/// touching a and b becomes part of those rotations: u2 ← u2 · diag(p, q).
/// Phase factors no later rotation touches stay as phase ops at the end.
pub fn fuse_phases(ops: &[TwoLevelOp]) -> Vec<TwoLevelOp> {
    let mut pending: Vec<(i64, Complex64)> = Vec::new();
    let mut out: Vec<TwoLevelOp> = Vec::new();
    for op in ops {
        if op.is_diagonal() {
            for (k, p) in [(op.k, op.u2[0][0]), (op.k2, op.u2[1][1])] {
                match pending.iter_mut().find(|(q, _)| *q == k) {
                    Some(slot) => slot.1 *= p,
                    None => pending.push((k, p)),
                }
            }
            continue;
        }
        let mut fused = *op;
        for (col, k) in [(0usize, op.k), (1usize, op.k2)] {
            if let Some(i) = pending.iter().position(|(q, _)| *q == k) {
                let p = pending.remove(i).1;
                fused.u2[0][col] *= p;
                fused.u2[1][col] *= p;
            }
        }
        out.push(fused);
    }
    let residual: Vec<(i64, Complex64)> = pending
        .into_iter()
        .filter(|(_, p)| (p - Complex64::new(1.0, 0.0)).norm() > ELIMINATION_THRESHOLD)
        .collect();
    let mut phases = Vec::new();
    let zero = Complex64::new(0.0, 0.0);
    for pair in residual.chunks(2) {
        let (a, pa) = pair[0];
        let (b, pb) = match pair.get(1) {
            Some(&x) => x,
            None => (if a == 0 { 1 } else { 0 }, Complex64::new(1.0, 0.0)),
        };
        phases.push(TwoLevelOp {
            k: a,
            k2: b,
            u2: [[pa, zero], [zero, pb]],
        });
    }
    // No later rotation touches a residual slot, so the phases go last.
    out.extend(phases);
    out
}

/// Product of the ops in application order, as a d×d matrix.
pub fn reconstruct(ops: &[TwoLevelOp], spec: &ManifoldSpec) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::identity(spec.d(), spec.d());
    for op in ops {
        m = op.embed(spec)? * m;
    }
    Ok(m)
}

/// Maximum entry-wise distance between two matrices.
pub fn max_entry_error(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Unitary that shifts packet amplitudes by n slots: (S v)_{k+n} = v_k.
pub fn shift_matrix(spec: &ManifoldSpec, n: i64) -> DMatrix<Complex64> {
    let d = spec.d();
    let mut m = DMatrix::zeros(d, d);
    for pos in 0..d {
        let k = spec.index_at(pos);
        m[(spec.wrap(k + n), pos)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// If `u` is a pure shift (up to 1e-12), the shift amount in 0..d.
pub fn as_shift(u: &DMatrix<Complex64>, spec: &ManifoldSpec) -> Option<usize> {
    (0..spec.d()).find(|&n| max_entry_error(u, &shift_matrix(spec, n as i64)) < 1e-12)
}
