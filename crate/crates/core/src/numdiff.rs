//! Central finite differences for Wirtinger derivatives.
//!
//! For a function of complex coordinates `z^m = x^m + i y^m` the holomorphic
//! and antiholomorphic derivatives are `d/dz = (d/dx - i d/dy)/2` and
//! `d/dz_bar = (d/dx + i d/dy)/2`.

use crate::fock::{C64, CMatrix, CVector};

/// Default step `1e-5 * max(1, |z|)`.
pub fn default_step(z: &CVector) -> f64 {
    1e-5 * z.norm().max(1.0)
}

/// Wirtinger gradients `(d f / d z^m, d f / d z_bar^m)` of a scalar function.
pub fn wirtinger<F>(f: F, z: &CVector, h: f64) -> (CVector, CVector)
where
    F: Fn(&CVector) -> C64,
{
    let n = z.len();
    let mut holo = CVector::zeros(n);
    let mut anti = CVector::zeros(n);
    let mut probe = z.clone();
    for m in 0..n {
        let [xp, xm, yp, ym] = probe4(&f, &mut probe, m, h);
        let dx = (xp - xm) / (2.0 * h);
        let dy = (yp - ym) / (2.0 * h);
        holo[m] = (dx - C64::i() * dy) * 0.5;
        anti[m] = (dx + C64::i() * dy) * 0.5;
    }
    (holo, anti)
}

/// Wirtinger Jacobians of a vector-valued function: entry `(k, m)` holds
/// `d F_k / d z^m` (first matrix) and `d F_k / d z_bar^m` (second matrix).
pub fn wirtinger_jacobian<F>(f: F, z: &CVector, h: f64) -> (CMatrix, CMatrix)
where
    F: Fn(&CVector) -> CVector,
{
    let n = z.len();
    let rows = f(z).len();
    let mut holo = CMatrix::zeros(rows, n);
    let mut anti = CMatrix::zeros(rows, n);
    let mut probe = z.clone();
    for m in 0..n {
        let [xp, xm, yp, ym] = probe4(&f, &mut probe, m, h);
        let scale = C64::new(1.0 / (2.0 * h), 0.0);
        let dx = (xp - xm) * scale;
        let dy = (yp - ym) * scale;
        let i = C64::i();
        holo.set_column(m, &((&dx - &dy * i) * C64::new(0.5, 0.0)));
        anti.set_column(m, &((&dx + &dy * i) * C64::new(0.5, 0.0)));
    }
    (holo, anti)
}

fn probe4<T, F>(f: &F, probe: &mut CVector, m: usize, h: f64) -> [T; 4]
where
    F: Fn(&CVector) -> T,
{
    let base = probe[m];
    probe[m] = base + C64::new(h, 0.0);
    let xp = f(probe);
    probe[m] = base - C64::new(h, 0.0);
    let xm = f(probe);
    probe[m] = base + C64::new(0.0, h);
    let yp = f(probe);
    probe[m] = base - C64::new(0.0, h);
    let ym = f(probe);
    probe[m] = base;
    [xp, xm, yp, ym]
}
