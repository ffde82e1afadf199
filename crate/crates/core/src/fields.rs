//! Hamiltonian vector fields and covectors of Kählerian functions.
//!
//! For a function `F` with gradients `(dF, dbarF)` and contravariant metric
//! block `A` of the picture, the Hamiltonian vector has components
//! `X^m = -i A[m][k] dbar_k F` and `X^mbar = i A[k][m] d_k F`, and the
//! covector has components `i d_n F` and `-i dbar_n F`. The Hilbert picture
//! uses `H_beta` with the flat metric, the homogeneous picture uses
//! `f_beta` with the Killing-reduced inverse metric, and the affine picture
//! uses `f_beta` in the chart `w = z / z^[0]`.

use crate::error::{Error, Result};
use crate::fock::{ensure_len, ensure_same, C64, CVector, MaxModulus, Operator, StateVector};
use crate::kahler::{contravariant_block, eval, eval_f, eval_f_affine, KahlerEval, Picture};

/// Vector or covector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Vector,
    Covector,
}

/// Holomorphic and antiholomorphic components of a vector or covector at
/// a state. Affine components are indexed by flat positions `1..dim`.
#[derive(Debug, Clone)]
pub struct TangentData {
    pub holo: CVector,
    pub anti: CVector,
    pub kind: FieldKind,
    pub picture: Picture,
    pub base_point: StateVector,
}

impl TangentData {
    /// Largest component difference with another field of the same shape.
    pub fn max_difference(&self, other: &TangentData) -> Result<f64> {
        ensure_len(self.holo.len(), other.holo.len())?;
        let h = (&self.holo - &other.holo).max_modulus();
        let a = (&self.anti - &other.anti).max_modulus();
        Ok(h.max(a))
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.holo.max_modulus().max(self.anti.max_modulus())
    }

    /// Swaps holomorphic and antiholomorphic components and conjugates
    /// them, which maps the field of `beta` to the field of `beta^dagger`.
    pub fn conjugate_swap(&self) -> TangentData {
        TangentData {
            holo: self.anti.conjugate(),
            anti: self.holo.conjugate(),
            kind: self.kind,
            picture: self.picture,
            base_point: self.base_point.clone(),
        }
    }
}

/// Natural pairing `zeta_m X^m + zeta_mbar X^mbar` of a covector with a
/// vector.
pub fn pairing(covector: &TangentData, vector: &TangentData) -> Result<C64> {
    if covector.kind != FieldKind::Covector || vector.kind != FieldKind::Vector {
        return Err(Error::InvalidParameter(
            "pairing expects a covector and a vector".into(),
        ));
    }
    ensure_len(covector.holo.len(), vector.holo.len())?;
    Ok(covector.holo.dot(&vector.holo) + covector.anti.dot(&vector.anti))
}

/// Vector or covector components of the Hamiltonian field of a jet.
pub fn components_from_eval(
    e: &KahlerEval,
    block: &nalgebra::DMatrix<C64>,
    kind: FieldKind,
) -> (CVector, CVector) {
    let i = C64::i();
    match kind {
        FieldKind::Vector => (block * &e.grad_anti * -i, block.tr_mul(&e.grad_holo) * i),
        FieldKind::Covector => (&e.grad_holo * i, &e.grad_anti * -i),
    }
}

/// Hamiltonian field of `beta` in the requested picture.
pub fn hamiltonian_field(
    beta: &Operator,
    phi: &StateVector,
    picture: Picture,
    kind: FieldKind,
) -> Result<TangentData> {
    let e = eval(beta, phi, picture)?;
    let block = contravariant_block(picture, phi)?;
    let (holo, anti) = components_from_eval(&e, &block, kind);
    Ok(TangentData {
        holo,
        anti,
        kind,
        picture,
        base_point: phi.clone(),
    })
}

/// Which coordinate observable of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    /// `alpha_j`.
    Alpha,
    /// `alpha_bar_j`.
    AlphaBar,
}

fn shifted(phi: &StateVector, v: &CVector, flat: usize, mode: usize, delta: isize) -> C64 {
    phi.space()
        .shift(flat, mode, delta)
        .map_or(C64::new(0.0, 0.0), |k| v[k])
}

/// Closed-form field components of `alpha_j` (or `alpha_bar_j`), built from
/// shifted amplitudes rather than matrices and metric blocks.
pub fn explicit_alpha_fields(
    mode: usize,
    ladder: Ladder,
    phi: &StateVector,
    picture: Picture,
    kind: FieldKind,
) -> Result<TangentData> {
    let space = phi.space();
    if mode >= space.modes() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            space.modes()
        )));
    }
    let hbar = space.hbar();
    let dim = space.dim();
    let i = C64::i();
    let re = |x: f64| C64::new(x, 0.0);
    let n_of = |k: usize| space.multi_index(k)[mode] as f64;

    // Coordinates used by the formulas: homogeneous z, or (1, w) in the chart.
    let (v, first) = match picture {
        Picture::Affine => {
            let w = phi.affine()?;
            let mut big = CVector::zeros(dim);
            big[0] = re(1.0);
            big.rows_mut(1, dim - 1).copy_from(&w);
            (big, 1)
        }
        _ => (phi.amplitudes().clone(), 0),
    };
    let vbar = v.conjugate();
    let norm = v.norm_squared();
    // f_alpha = sum sqrt(2 hbar n_j) conj(v_{[n]j-}) v_[n] / |v|^2
    let f_alpha = (0..dim)
        .map(|k| re((2.0 * hbar * n_of(k)).sqrt()) * shifted(phi, &vbar, k, mode, -1) * v[k])
        .sum::<C64>()
        / norm;

    let mut holo = CVector::zeros(dim - first);
    let mut anti = CVector::zeros(dim - first);
    let e_j = space.shift(0, mode, 1).map_or(C64::new(0.0, 0.0), |k| v[k]);
    for k in first..dim {
        let n = n_of(k);
        let down_bar = shifted(phi, &vbar, k, mode, -1);
        let up = shifted(phi, &v, k, mode, 1);
        let (h, a) = match (picture, kind) {
            (Picture::Hilbert, FieldKind::Covector) => (
                i * (n / (2.0 * hbar)).sqrt() * down_bar,
                -i * ((n + 1.0) / (2.0 * hbar)).sqrt() * up,
            ),
            (Picture::Hilbert, FieldKind::Vector) => (
                -i * (2.0 * (n + 1.0) / hbar).sqrt() * up,
                i * (2.0 * n / hbar).sqrt() * down_bar,
            ),
            (_, FieldKind::Covector) => (
                i / norm * ((2.0 * hbar * n).sqrt() * down_bar - vbar[k] * f_alpha),
                -i / norm * ((2.0 * hbar * (n + 1.0)).sqrt() * up - v[k] * f_alpha),
            ),
            (Picture::Homogeneous, FieldKind::Vector) => (
                -i * (2.0 * (n + 1.0) / hbar).sqrt() * up + i / hbar * v[k] * f_alpha,
                i * (2.0 * n / hbar).sqrt() * down_bar - i / hbar * vbar[k] * f_alpha,
            ),
            (Picture::Affine, FieldKind::Vector) => (
                -i * (2.0 * (n + 1.0) / hbar).sqrt() * up + i * (2.0 / hbar).sqrt() * e_j * v[k],
                i * (2.0 * n / hbar).sqrt() * down_bar,
            ),
        };
        holo[k - first] = h;
        anti[k - first] = a;
    }
    let alpha = TangentData {
        holo,
        anti,
        kind,
        picture,
        base_point: phi.clone(),
    };
    Ok(match ladder {
        Ladder::Alpha => alpha,
        Ladder::AlphaBar => alpha.conjugate_swap(),
    })
}

/// Decomposition of the Hilbert-space Hamiltonian field of `H_beta` into
/// the horizontal field of `f_beta` plus a multiple of the phase rotation.
#[derive(Debug, Clone)]
pub struct XhfDecomposition {
    /// Hilbert-picture vector of `H_beta`.
    pub lhs: TangentData,
    /// Homogeneous-picture vector of `f_beta`.
    pub horizontal: TangentData,
    /// `(f_beta / 2 hbar)` times the Hilbert vector of `2 hbar I`.
    pub r2_term: TangentData,
    /// Coefficient of `d_theta` in `r2_term`, equal to `-f_beta / hbar`.
    pub theta_term: C64,
    /// `d theta` applied to the horizontal field, from its components.
    pub theta_component: C64,
    /// Closed form `-(|z|^2 / 2 hbar)(dbar_0 f / z^0 + d_0 f / z_bar^0)`.
    pub theta_closed_form: C64,
    /// Chart form `((1 + |w|^2) / 2 hbar)(w d_w f + w_bar d_wbar f)`.
    pub theta_affine_form: C64,
    /// Largest component of `lhs - horizontal - r2_term`.
    pub decomposition_residual: f64,
    /// Largest distance between the three θ-component evaluations.
    pub theta_residual: f64,
    /// Distance between the chart components of `horizontal` and the
    /// affine-picture vector of `f_beta`.
    pub affine_residual: f64,
}

/// Evaluates the decomposition at `phi` (requires `z^[0] != 0`).
pub fn xhf_decomposition(beta: &Operator, phi: &StateVector) -> Result<XhfDecomposition> {
    ensure_same(beta.space(), phi.space())?;
    let w = phi.affine()?;
    let hbar = phi.space().hbar();
    let z = phi.amplitudes();
    let i = C64::i();
    let lhs = hamiltonian_field(beta, phi, Picture::Hilbert, FieldKind::Vector)?;
    let horizontal = hamiltonian_field(beta, phi, Picture::Homogeneous, FieldKind::Vector)?;
    let two_hbar = Operator::identity(phi.space()).scale(C64::new(2.0 * hbar, 0.0));
    let rotation = hamiltonian_field(&two_hbar, phi, Picture::Hilbert, FieldKind::Vector)?;
    let e = eval_f(beta, phi)?;
    let c = e.value / (2.0 * hbar);
    let r2_term = TangentData {
        holo: &rotation.holo * c,
        anti: &rotation.anti * c,
        kind: FieldKind::Vector,
        picture: Picture::Hilbert,
        base_point: phi.clone(),
    };
    let decomposition_residual = (&lhs.holo - &horizontal.holo - &r2_term.holo)
        .max_modulus()
        .max((&lhs.anti - &horizontal.anti - &r2_term.anti).max_modulus());

    let z0 = z[0];
    let theta_component =
        horizontal.holo[0] / (2.0 * i * z0) - horizontal.anti[0] / (2.0 * i * z0.conj());
    let d = phi.norm_sqr();
    let theta_closed_form =
        -(d / (2.0 * hbar)) * (e.grad_anti[0] / z0 + e.grad_holo[0] / z0.conj());
    let ea = eval_f_affine(beta, phi)?;
    let s = 1.0 + w.norm_squared();
    let theta_affine_form =
        (s / (2.0 * hbar)) * (w.dot(&ea.grad_holo) + w.conjugate().dot(&ea.grad_anti));
    let theta_residual = (theta_component - theta_closed_form)
        .norm()
        .max((theta_component - theta_affine_form).norm());

    let affine = hamiltonian_field(beta, phi, Picture::Affine, FieldKind::Vector)?;
    let n = w.len();
    let chart_holo = CVector::from_fn(n, |k, _| {
        horizontal.holo[k + 1] / z0 - z[k + 1] * horizontal.holo[0] / (z0 * z0)
    });
    let chart_anti = CVector::from_fn(n, |k, _| {
        horizontal.anti[k + 1] / z0.conj()
            - z[k + 1].conj() * horizontal.anti[0] / (z0.conj() * z0.conj())
    });
    let affine_residual = (&chart_holo - &affine.holo)
        .max_modulus()
        .max((&chart_anti - &affine.anti).max_modulus());

    Ok(XhfDecomposition {
        lhs,
        horizontal,
        r2_term,
        theta_term: -e.value / hbar,
        theta_component,
        theta_closed_form,
        theta_affine_form,
        decomposition_residual,
        theta_residual,
        affine_residual,
    })
}

/// Pairing of a homogeneous or Hilbert vector with the radial covector
/// `dr = (z_bar dz + z dz_bar) / (2r)`.
pub fn radial_pairing(vector: &TangentData) -> Result<C64> {
    if vector.kind != FieldKind::Vector || vector.picture == Picture::Affine {
        return Err(Error::InvalidParameter(
            "radial pairing needs a vector in homogeneous coordinates".into(),
        ));
    }
    let z = vector.base_point.amplitudes();
    let r = vector.base_point.radius();
    Ok((z.conjugate().dot(&vector.holo) + z.dot(&vector.anti)) / (2.0 * r))
}

/// Pairing of a homogeneous or Hilbert covector with the phase rotation
/// `d_theta = i z d_z - i z_bar d_zbar`.
pub fn theta_pairing(covector: &TangentData) -> Result<C64> {
    if covector.kind != FieldKind::Covector || covector.picture == Picture::Affine {
        return Err(Error::InvalidParameter(
            "phase pairing needs a covector in homogeneous coordinates".into(),
        ));
    }
    let z = covector.base_point.amplitudes();
    let i = C64::i();
    Ok(covector.holo.dot(&(z * i)) + covector.anti.dot(&(z.conjugate() * -i)))
}
