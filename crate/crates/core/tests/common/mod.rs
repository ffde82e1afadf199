//! Reference computations for the integration tests.
//!
//! Everything here is written against plain `Vec`s from the textbook
//! definitions (ladder matrix elements, expectation values, Taylor series,
//! central differences) and does not call the library routines it is used
//! to check.
#![allow(dead_code)]

use kahler_qm::fock::CVector;
use kahler_qm::{Operator, Space, StateVector, C64};
use proptest::prelude::*;

pub type Dense = Vec<Vec<C64>>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> Dense {
    vec![vec![c(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n);
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = c(1.0, 0.0);
    }
    m
}

/// Single-mode lowering operator on `levels` levels: `a|n> = sqrt(n)|n-1>`.
pub fn lowering(levels: usize) -> Dense {
    let mut a = zeros(levels);
    for n in 1..levels {
        a[n - 1][n] = c((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn lin(a: &Dense, ca: C64, b: &Dense, cb: C64) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| ca * x + cb * y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: C64) -> Dense {
    a.iter().map(|r| r.iter().map(|x| s * x).collect()).collect()
}

/// Kronecker product with the first factor on the more significant index.
pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Lowering operator of `mode` on `modes` modes with `levels` levels each.
pub fn mode_lowering(modes: usize, levels: usize, mode: usize) -> Dense {
    let mut out = if mode == 0 { lowering(levels) } else { identity(levels) };
    for m in 1..modes {
        let factor = if m == mode { lowering(levels) } else { identity(levels) };
        out = kron(&out, &factor);
    }
    out
}

/// `x = sqrt(hbar/2)(a + a^dag)`.
pub fn position(a: &Dense, hbar: f64) -> Dense {
    let s = c((hbar / 2.0).sqrt(), 0.0);
    lin(a, s, &dagger(a), s)
}

/// `p = -i sqrt(hbar/2)(a - a^dag)`.
pub fn momentum(a: &Dense, hbar: f64) -> Dense {
    let s = c(0.0, -(hbar / 2.0).sqrt());
    lin(a, s, &dagger(a), -s)
}

pub fn to_dense(op: &Operator) -> Dense {
    let m = op.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

pub fn apply(m: &Dense, z: &[C64]) -> Vec<C64> {
    m.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect()
}

pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum()
}

/// `<z|m|z>`.
pub fn expectation(m: &Dense, z: &[C64]) -> C64 {
    dotc(z, &apply(m, z))
}

/// `exp(s M)` by scaling, a 30-term Taylor series and squaring.
pub fn expm(m: &Dense, s: C64) -> Dense {
    let n = m.len();
    let size = m.iter().flatten().map(|x| x.norm()).sum::<f64>() * s.norm();
    let squarings = size.max(1.0).log2().ceil() as i32 + 1;
    let a = scale(m, s / 2f64.powi(squarings));
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..30 {
        term = scale(&mul(&term, &a), c(1.0 / k as f64, 0.0));
        sum = lin(&sum, c(1.0, 0.0), &term, c(1.0, 0.0));
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Fubini–Study geodesic distance `sqrt(2 hbar) arccos(|<a|b>| / |a||b|)`.
pub fn fs_distance(a: &[C64], b: &[C64], hbar: f64) -> f64 {
    let cos = dotc(a, b).norm() / (norm_sqr(a) * norm_sqr(b)).sqrt();
    (2.0 * hbar).sqrt() * cos.min(1.0).acos()
}

/// Central-difference Wirtinger derivatives `(d f/d z_k, d f/d zbar_k)`.
pub fn wirtinger<F: Fn(&[C64]) -> C64>(f: F, z: &[C64], h: f64) -> (Vec<C64>, Vec<C64>) {
    let mut holo = Vec::with_capacity(z.len());
    let mut anti = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        let shifted = |d: C64| {
            let mut w = z.to_vec();
            w[k] += d;
            f(&w)
        };
        let dx = (shifted(c(h, 0.0)) - shifted(c(-h, 0.0))) / (2.0 * h);
        let dy = (shifted(c(0.0, h)) - shifted(c(0.0, -h))) / (2.0 * h);
        holo.push((dx - c(0.0, 1.0) * dy) / 2.0);
        anti.push((dx + c(0.0, 1.0) * dy) / 2.0);
    }
    (holo, anti)
}

pub fn state(space: &Space, z: &[C64]) -> StateVector {
    StateVector::new(space, CVector::from_column_slice(z)).expect("nonzero amplitudes")
}

pub fn from_dense(space: &Space, m: &Dense) -> Operator {
    let n = m.len();
    let matrix = kahler_qm::fock::CMatrix::from_fn(n, n, |i, j| m[i][j]);
    Operator::new(space, matrix).expect("matching dimension")
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

/// Amplitude vectors of length `dim` whose first `support` entries are
/// random and well away from zero in norm; the rest vanish.
pub fn amplitudes(dim: usize, support: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), support)
        .prop_filter("norm bounded away from zero", |v| norm_sqr(v) > 0.05)
        .prop_map(move |mut v| {
            v.resize(dim, c(0.0, 0.0));
            v
        })
}

/// Amplitudes with `|z^[0]| >= 0.2`, so that the affine chart is defined.
pub fn chart_amplitudes(dim: usize, support: usize) -> impl Strategy<Value = Vec<C64>> {
    amplitudes(dim, support).prop_filter("ground amplitude in the chart", |v| v[0].norm() >= 0.2)
}

/// Random Hermitian matrices with entries of modulus at most about one.
pub fn hermitian(dim: usize) -> impl Strategy<Value = Dense> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| {
        let m: Dense = v.chunks(dim).map(|r| r.to_vec()).collect();
        lin(&m, c(0.5, 0.0), &dagger(&m), c(0.5, 0.0))
    })
}

/// Random square matrices with entries in the unit box.
pub fn matrix(dim: usize) -> impl Strategy<Value = Dense> {
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| v.chunks(dim).map(|r| r.to_vec()).collect())
}
