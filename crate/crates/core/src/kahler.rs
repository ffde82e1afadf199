//! Kählerian functions of operators, their gradients, the Kähler product
//! and the Poisson, Riemann and Jordan brackets.
//!
//! On the Hilbert space an operator `beta` becomes
//! `H_beta(z) = <z|beta|z> / (2 hbar)`; on the projective space it becomes
//! `f_beta(z) = <z|beta|z> / <z|z>`, either in homogeneous coordinates or in
//! the affine chart `w = z / z^[0]`. Gradients are analytic.
//!
//! With the contravariant metric block `A = g^{m nbar}` of the picture:
//! * Kähler product: `hbar dF A dbarG` plus the pointwise `F G` on the
//!   projective pictures,
//! * Poisson: `-i (dF A dbarG - dG A dbarF)`,
//! * Riemann: `dF A dbarG + dG A dbarF`.

use crate::error::{Error, Result};
use crate::fock::{ensure_same, C64, CMatrix, CVector, Operator, StateVector};
use crate::geometry::{metric, Variance};

/// Where a Kählerian function lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Picture {
    /// `H_beta` on the Hilbert space with the flat metric.
    Hilbert,
    /// `f_beta` on the projective space, homogeneous coordinates.
    Homogeneous,
    /// `f_beta` on the projective space, affine chart.
    Affine,
}

impl Picture {
    /// All three pictures.
    pub const ALL: [Picture; 3] = [Picture::Hilbert, Picture::Homogeneous, Picture::Affine];

    /// Short lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Picture::Hilbert => "hilbert",
            Picture::Homogeneous => "homogeneous",
            Picture::Affine => "affine",
        }
    }

    /// True for the projective pictures.
    pub fn is_projective(self) -> bool {
        !matches!(self, Picture::Hilbert)
    }
}

/// Value and first derivatives of a function at a state.
///
/// Besides holding Kählerian functions, values of this type form a small
/// algebra (sum, scalar multiple, pointwise product with the Leibniz rule)
/// so that polynomial expressions in Kählerian functions can be carried
/// together with their gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerEval {
    pub value: C64,
    pub grad_holo: CVector,
    pub grad_anti: CVector,
    pub picture: Picture,
}

impl KahlerEval {
    /// A constant function.
    pub fn constant(value: C64, len: usize, picture: Picture) -> Self {
        KahlerEval {
            value,
            grad_holo: CVector::zeros(len),
            grad_anti: CVector::zeros(len),
            picture,
        }
    }

    fn check(&self, other: &KahlerEval) -> Result<()> {
        if self.picture != other.picture {
            return Err(Error::InvalidParameter(format!(
                "picture mismatch: {:?} vs {:?}",
                self.picture, other.picture
            )));
        }
        crate::fock::ensure_len(self.grad_holo.len(), other.grad_holo.len())
    }

    /// Sum of two functions.
    pub fn add(&self, other: &KahlerEval) -> Result<Self> {
        self.check(other)?;
        Ok(KahlerEval {
            value: self.value + other.value,
            grad_holo: &self.grad_holo + &other.grad_holo,
            grad_anti: &self.grad_anti + &other.grad_anti,
            picture: self.picture,
        })
    }

    /// Constant multiple.
    pub fn scale(&self, c: C64) -> Self {
        KahlerEval {
            value: self.value * c,
            grad_holo: &self.grad_holo * c,
            grad_anti: &self.grad_anti * c,
            picture: self.picture,
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &KahlerEval) -> Result<Self> {
        self.check(other)?;
        Ok(KahlerEval {
            value: self.value * other.value,
            grad_holo: &self.grad_holo * other.value + &other.grad_holo * self.value,
            grad_anti: &self.grad_anti * other.value + &other.grad_anti * self.value,
            picture: self.picture,
        })
    }
}

/// `H_beta = <z|beta|z> / (2 hbar)` with gradients
/// `d_m H = (z_bar beta)_m / (2 hbar)` and `d_mbar H = (beta z)_m / (2 hbar)`.
pub fn eval_h(beta: &Operator, phi: &StateVector) -> Result<KahlerEval> {
    ensure_same(beta.space(), phi.space())?;
    let c = C64::new(0.5 / phi.space().hbar(), 0.0);
    let bz = beta.apply(phi)?;
    let zb = beta.matrix().tr_mul(&phi.amplitudes().conjugate());
    Ok(KahlerEval {
        value: phi.amplitudes().dotc(&bz) * c,
        grad_holo: zb * c,
        grad_anti: bz * c,
        picture: Picture::Hilbert,
    })
}

/// `f_beta = <z|beta|z> / <z|z>` in homogeneous coordinates, with
/// `d_m f = ((z_bar beta)_m - f z_bar_m) / |z|^2` and
/// `d_mbar f = ((beta z)_m - f z_m) / |z|^2`.
pub fn eval_f(beta: &Operator, phi: &StateVector) -> Result<KahlerEval> {
    ensure_same(beta.space(), phi.space())?;
    let z = phi.amplitudes();
    Ok(quotient(beta.matrix(), z, Picture::Homogeneous))
}

/// `f_beta` in the affine chart, with gradients with respect to
/// `w^[n]`, `[n] != [0]` (entry `k - 1` for flat index `k`).
pub fn eval_f_affine(beta: &Operator, phi: &StateVector) -> Result<KahlerEval> {
    ensure_same(beta.space(), phi.space())?;
    let w = phi.affine()?;
    let mut big_w = CVector::zeros(w.len() + 1);
    big_w[0] = C64::new(1.0, 0.0);
    big_w.rows_mut(1, w.len()).copy_from(&w);
    let full = quotient(beta.matrix(), &big_w, Picture::Affine);
    let n = w.len();
    Ok(KahlerEval {
        value: full.value,
        grad_holo: full.grad_holo.rows(1, n).into_owned(),
        grad_anti: full.grad_anti.rows(1, n).into_owned(),
        picture: Picture::Affine,
    })
}

fn quotient(beta: &CMatrix, z: &CVector, picture: Picture) -> KahlerEval {
    let d = z.norm_squared();
    let zbar = z.conjugate();
    let bz = beta * z;
    let zb = beta.tr_mul(&zbar);
    let f = zbar.dot(&bz) / d;
    KahlerEval {
        value: f,
        grad_holo: (zb - &zbar * f) / C64::new(d, 0.0),
        grad_anti: (bz - z * f) / C64::new(d, 0.0),
        picture,
    }
}

/// Evaluates `beta` in the requested picture.
pub fn eval(beta: &Operator, phi: &StateVector, picture: Picture) -> Result<KahlerEval> {
    match picture {
        Picture::Hilbert => eval_h(beta, phi),
        Picture::Homogeneous => eval_f(beta, phi),
        Picture::Affine => eval_f_affine(beta, phi),
    }
}

/// Contravariant metric block `g^{m nbar}` of a picture at `phi`.
pub fn contravariant_block(picture: Picture, phi: &StateVector) -> Result<CMatrix> {
    Ok(metric(picture.into(), phi, Variance::Contravariant)?
        .block()
        .clone())
}

fn contract(a: &CVector, block: &CMatrix, b: &CVector) -> C64 {
    (a.transpose() * block * b)[(0, 0)]
}

/// Kähler product of two function jets with contravariant block `block`.
pub fn star(a: &KahlerEval, b: &KahlerEval, block: &CMatrix, hbar: f64) -> Result<C64> {
    a.check(b)?;
    let gradient_term = contract(&a.grad_holo, block, &b.grad_anti) * hbar;
    Ok(if a.picture.is_projective() {
        a.value * b.value + gradient_term
    } else {
        gradient_term
    })
}

/// Poisson bracket `-i (dF A dbarG - dG A dbarF)` of two jets.
pub fn poisson_geometric(a: &KahlerEval, b: &KahlerEval, block: &CMatrix) -> C64 {
    -C64::i()
        * (contract(&a.grad_holo, block, &b.grad_anti) - contract(&b.grad_holo, block, &a.grad_anti))
}

/// Riemann bracket `dF A dbarG + dG A dbarF` of two jets.
pub fn riemann_geometric(a: &KahlerEval, b: &KahlerEval, block: &CMatrix) -> C64 {
    contract(&a.grad_holo, block, &b.grad_anti) + contract(&b.grad_holo, block, &a.grad_anti)
}

/// Kähler product of the functions of `beta` and `gamma`, which equals the
/// function of the operator product `beta gamma`.
pub fn kahler_product(
    beta: &Operator,
    gamma: &Operator,
    phi: &StateVector,
    picture: Picture,
) -> Result<C64> {
    let a = eval(beta, phi, picture)?;
    let b = eval(gamma, phi, picture)?;
    let block = contravariant_block(picture, phi)?;
    star(&a, &b, &block, phi.space().hbar())
}

/// Which bracket to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BracketKind {
    Poisson,
    Riemann,
    Jordan,
}

/// A bracket computed from gradients and tensors (`geometric`) and from
/// the operator algebra (`algebraic`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketValue {
    pub geometric: C64,
    pub algebraic: C64,
}

impl BracketValue {
    /// `|geometric - algebraic|`.
    pub fn residual(&self) -> f64 {
        (self.geometric - self.algebraic).norm()
    }
}

/// Evaluates a bracket along both routes.
///
/// Algebraic forms: Poisson is `(1/(i hbar)) eval([beta, gamma])`; Riemann
/// is `(1/hbar) H_{[beta,gamma]_+}` on the Hilbert space and
/// `(1/hbar) f_{[beta,gamma]_+} - (2/hbar) f_beta f_gamma` on the projective
/// space; Jordan is `eval((beta gamma + gamma beta)/2)`.
pub fn bracket(
    beta: &Operator,
    gamma: &Operator,
    phi: &StateVector,
    kind: BracketKind,
    picture: Picture,
) -> Result<BracketValue> {
    let hbar = phi.space().hbar();
    let a = eval(beta, phi, picture)?;
    let b = eval(gamma, phi, picture)?;
    let block = contravariant_block(picture, phi)?;
    let riemann = riemann_geometric(&a, &b, &block);
    let pointwise = if picture.is_projective() {
        a.value * b.value
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(match kind {
        BracketKind::Poisson => BracketValue {
            geometric: poisson_geometric(&a, &b, &block),
            algebraic: eval(&beta.commutator(gamma)?, phi, picture)?.value / C64::new(0.0, hbar),
        },
        BracketKind::Riemann => BracketValue {
            geometric: riemann,
            algebraic: eval(&beta.anticommutator(gamma)?, phi, picture)?.value / hbar
                - pointwise * (2.0 / hbar),
        },
        BracketKind::Jordan => BracketValue {
            geometric: pointwise + riemann * (hbar / 2.0),
            algebraic: eval(&beta.jordan(gamma)?, phi, picture)?.value,
        },
    })
}

/// Relative tolerance scale `max(1, |value|, |beta| |gamma|)` with
/// Frobenius norms.
pub fn relative_scale(value: C64, beta: &Operator, gamma: &Operator) -> f64 {
    1f64.max(value.norm()).max(beta.norm() * gamma.norm())
}

/// Covariance and the two sides of the strengthened uncertainty relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    /// `(hbar/2) {f_beta, f_gamma}_g`.
    pub cov: f64,
    /// Standard deviation of `beta`.
    pub delta_beta: f64,
    /// Standard deviation of `gamma`.
    pub delta_gamma: f64,
    /// `(Delta beta)^2 (Delta gamma)^2`.
    pub lhs: f64,
    /// `((hbar/2) {f,f}_omega)^2 + ((hbar/2) {f,f}_g)^2`.
    pub rhs: f64,
}

/// Covariance and uncertainty terms for Hermitian `beta`, `gamma`.
pub fn covariance_and_uncertainty(
    beta: &Operator,
    gamma: &Operator,
    phi: &StateVector,
) -> Result<Uncertainty> {
    beta.require_hermitian()?;
    gamma.require_hermitian()?;
    let hbar = phi.space().hbar();
    let a = eval_f(beta, phi)?;
    let b = eval_f(gamma, phi)?;
    let block = contravariant_block(Picture::Homogeneous, phi)?;
    let half = hbar / 2.0;
    let var_beta = riemann_geometric(&a, &a, &block).re * half;
    let var_gamma = riemann_geometric(&b, &b, &block).re * half;
    let cov = riemann_geometric(&a, &b, &block).re * half;
    let sym = poisson_geometric(&a, &b, &block).re * half;
    Ok(Uncertainty {
        cov,
        delta_beta: var_beta.max(0.0).sqrt(),
        delta_gamma: var_gamma.max(0.0).sqrt(),
        lhs: var_beta * var_gamma,
        rhs: sym * sym + cov * cov,
    })
}
