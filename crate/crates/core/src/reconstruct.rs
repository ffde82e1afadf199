//! Recovering a state from the components of a Hamiltonian covector.
//!
//! The antiholomorphic components of the covector of `alpha_bar_j` are
//! shifted amplitudes. In the Hilbert picture they are
//! `X_[n] = -i sqrt(n_j / (2 hbar)) z_{[n] - e_j}`, so the state is read off
//! by dividing out the constants (the direct route). In the homogeneous
//! picture they are
//! `X_[n] = -(i / |z|^2) (sqrt(2 hbar n_j) z_{[n] - e_j} - z_[n] f)` with
//! `f = f_{alpha_bar_j}`, which is solved for `y = z / |z|^2` by ascending
//! `n_j` and then inverted with `z = y / |y|^2` (the recursive route).

use crate::error::{Error, Result};
use crate::fields::{explicit_alpha_fields, FieldKind, Ladder};
use crate::fock::{CMatrix, CVector, Space, StateVector, C64};
use crate::kahler::Picture;

/// Threshold on `|f_{alpha_bar_j}|` below which the recursion is refused.
pub const SINGULAR_SEED_TOL: f64 = 1e-12;

/// Relative disagreement tolerated between overlapping determinations of
/// one amplitude from different modes.
pub const CONSISTENCY_TOL: f64 = 1e-8;

fn check_mode(space: &Space, mode: usize) -> Result<()> {
    if mode < space.modes() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            space.modes()
        )))
    }
}

/// Antiholomorphic Hilbert-picture covector components of `alpha_bar_j`
/// at `phi`, one per flat index.
pub fn forward_direct(phi: &StateVector, mode: usize) -> Result<CVector> {
    Ok(explicit_alpha_fields(mode, Ladder::AlphaBar, phi, Picture::Hilbert, FieldKind::Covector)?.anti)
}

/// Covector data for the recursive route.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeData {
    /// Antiholomorphic homogeneous-picture covector components of
    /// `alpha_bar_j`, one per flat index.
    pub components: CVector,
    /// `f_{alpha_bar_j}` at the source state.
    pub f_value: C64,
    pub mode: usize,
}

/// Homogeneous-picture covector data of `alpha_bar_j` at `phi`.
pub fn forward_recursive(phi: &StateVector, mode: usize) -> Result<TildeData> {
    let space = phi.space();
    check_mode(space, mode)?;
    let z = phi.amplitudes();
    let hbar = space.hbar();
    let f_alpha: C64 = (0..space.dim())
        .filter_map(|k| {
            let n = space.multi_index(k)[mode] as f64;
            space
                .shift(k, mode, -1)
                .map(|down| z[down].conj() * z[k] * (2.0 * hbar * n).sqrt())
        })
        .sum::<C64>()
        / phi.norm_sqr();
    let components = explicit_alpha_fields(mode, Ladder::AlphaBar, phi, Picture::Homogeneous, FieldKind::Covector)?.anti;
    Ok(TildeData {
        components,
        f_value: f_alpha.conj(),
        mode,
    })
}

/// Rebuilds amplitudes from Hilbert-picture covector data of one or more
/// modes, given as `(mode, components)` pairs.
///
/// Amplitudes that no supplied mode can raise into the space (those at the
/// cutoff in every supplied mode) are set to zero. When several modes
/// determine the same amplitude, their values must agree to a relative
/// [`CONSISTENCY_TOL`].
pub fn reconstruct_direct(space: &Space, data: &[(usize, CVector)]) -> Result<StateVector> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("no covector data supplied".into()));
    }
    let hbar = space.hbar();
    let dim = space.dim();
    let mut z = CVector::zeros(dim);
    let mut known = vec![false; dim];
    for (mode, comps) in data {
        check_mode(space, *mode)?;
        crate::fock::ensure_len(dim, comps.len())?;
        for k in 0..dim {
            let Some(up) = space.shift(k, *mode, 1) else {
                continue;
            };
            let m = space.multi_index(k)[*mode] as f64;
            let value = C64::new(0.0, (2.0 * hbar / (m + 1.0)).sqrt()) * comps[up];
            if known[k] {
                let scale = value.norm().max(z[k].norm()).max(f64::MIN_POSITIVE);
                let disagreement = (value - z[k]).norm() / scale;
                if disagreement > CONSISTENCY_TOL {
                    return Err(Error::Inconsistent {
                        index: k,
                        disagreement,
                    });
                }
            } else {
                z[k] = value;
                known[k] = true;
            }
        }
    }
    StateVector::new(space, z)
}

/// Rebuilds a state from homogeneous-picture covector data by the
/// ascending recursion in `n_j`.
pub fn reconstruct_recursive(space: &Space, data: &TildeData) -> Result<StateVector> {
    check_mode(space, data.mode)?;
    crate::fock::ensure_len(space.dim(), data.components.len())?;
    let f = data.f_value;
    if f.norm() < SINGULAR_SEED_TOL {
        return Err(Error::SingularSeed(f.norm()));
    }
    let hbar = space.hbar();
    let i = C64::i();
    let mut y = CVector::zeros(space.dim());
    // Lexicographic order visits [n] - e_j before [n].
    for k in 0..space.dim() {
        let n = space.multi_index(k)[data.mode] as f64;
        let lower = space
            .shift(k, data.mode, -1)
            .map_or(C64::new(0.0, 0.0), |down| y[down] * (2.0 * hbar * n).sqrt());
        y[k] = (lower - i * data.components[k]) / f;
    }
    let ny = y.norm_squared();
    if ny == 0.0 {
        return Err(Error::UndefinedState("recursion produced the zero vector".into()));
    }
    StateVector::new(space, y / C64::new(ny, 0.0))
}

/// One-norm condition number of the triangular system solved by
/// [`reconstruct_recursive`], `|L|_1 |L^-1|_1` with
/// `L = f I - sqrt(2 hbar) a_j^dagger`.
///
/// The relative error of the recovered amplitudes is bounded by roughly
/// this number times the relative rounding error of the input data. It
/// grows like `sqrt((2 hbar)^n n!) / |f|^n` with the cutoff `n`.
pub fn recursion_condition(space: &Space, data: &TildeData) -> Result<f64> {
    check_mode(space, data.mode)?;
    let f = data.f_value;
    if f.norm() < SINGULAR_SEED_TOL {
        return Err(Error::SingularSeed(f.norm()));
    }
    let dim = space.dim();
    let hbar = space.hbar();
    let mut l = CMatrix::from_diagonal_element(dim, dim, f);
    for k in 0..dim {
        if let Some(down) = space.shift(k, data.mode, -1) {
            let n = space.multi_index(k)[data.mode] as f64;
            l[(k, down)] = C64::new(-(2.0 * hbar * n).sqrt(), 0.0);
        }
    }
    let inverse = l
        .solve_lower_triangular(&CMatrix::identity(dim, dim))
        .ok_or_else(|| Error::SingularSeed(f.norm()))?;
    let one_norm = |m: &CMatrix| {
        m.column_iter()
            .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0f64, f64::max)
    };
    Ok(one_norm(&l) * one_norm(&inverse))
}

/// Representative of the ray of `phi`: the first nonzero amplitude in
/// index order made real positive, and `|z|^2 = 2 hbar`.
pub fn canonical_form(phi: &StateVector) -> Result<StateVector> {
    let z = phi.amplitudes();
    let peak = z.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let first = z
        .iter()
        .find(|c| c.norm() > 1e-14 * peak)
        .copied()
        .ok_or_else(|| Error::UndefinedState("zero vector".into()))?;
    let phase = first.conj() / first.norm();
    phi.scaled(phase)?.with_norm_sqr(2.0 * phi.space().hbar())
}

/// Relative distance `|a - b| / |b|` between the canonical forms of two
/// states.
pub fn ray_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ca = canonical_form(a)?;
    let cb = canonical_form(b)?;
    Ok((ca.amplitudes() - cb.amplitudes()).norm() / cb.radius())
}
