//! Metric and symplectic tensors of the Hilbert space and of its
//! projectivisation, the Fubini–Study distance, and the Killing-reduction
//! machinery relating the conformal Hilbert metric to the projective one.
//!
//! A [`Tensor2`] stores the mixed-holomorphic block only:
//! * covariant: `block[(m, n)] = g_{m nbar}` with `ds^2 = 2 g_{m nbar} dz^m dz_bar^n`;
//! * contravariant: `block[(m, n)] = g^{m nbar}`, contracted as
//!   `dF_m g^{m nbar} dG_nbar`;
//! * mixed: `block = cov * contra^T`, the identity on a non-degenerate
//!   metric and the horizontal projector for the homogeneous one.
//!
//! Affine blocks are indexed by the flat positions `1..dim` (entry `k - 1`
//! belongs to flat index `k`).

use crate::error::{Error, Result};
use crate::fock::{max_abs, C64, CMatrix, CVector, Operator, StateVector};
use crate::kahler::{eval_f, Picture};
use crate::numdiff;

/// Geometry in which a tensor lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricPicture {
    /// Flat Hilbert-space metric `G = delta / 2`.
    Hilbert,
    /// Conformally rescaled Hilbert metric `(2 hbar / |z|^2) G`.
    HilbertConformal,
    /// Fubini–Study metric in homogeneous coordinates (degenerate).
    Homogeneous,
    /// Fubini–Study metric in the affine chart `w = z / z^[0]`.
    Affine,
}

impl From<Picture> for MetricPicture {
    fn from(p: Picture) -> Self {
        match p {
            Picture::Hilbert => MetricPicture::Hilbert,
            Picture::Homogeneous => MetricPicture::Homogeneous,
            Picture::Affine => MetricPicture::Affine,
        }
    }
}

/// Index placement of a two-index tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Covariant,
    Contravariant,
    Mixed,
}

/// A metric-type tensor evaluated at a point.
#[derive(Debug, Clone)]
pub struct Tensor2 {
    block: CMatrix,
    variance: Variance,
    picture: MetricPicture,
    degenerate: bool,
}

impl Tensor2 {
    /// Mixed-holomorphic block.
    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    /// Index placement.
    pub fn variance(&self) -> Variance {
        self.variance
    }

    /// Geometry of the tensor.
    pub fn picture(&self) -> MetricPicture {
        self.picture
    }

    /// True for the homogeneous Fubini–Study tensors, which annihilate the
    /// vertical directions and have no true inverse.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// The associated symplectic block: `omega_{m nbar} = i g_{m nbar}` for a
    /// covariant metric and `omega^{m nbar} = -i g^{m nbar}` for its inverse.
    /// Mixed tensors have no symplectic partner.
    pub fn symplectic_partner(&self) -> Option<CMatrix> {
        match self.variance {
            Variance::Covariant => Some(&self.block * C64::i()),
            Variance::Contravariant => Some(&self.block * -C64::i()),
            Variance::Mixed => None,
        }
    }

    /// Max-entry distance between the block and its conjugate transpose.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.block - self.block.adjoint()))
    }
}

fn outer(a: &CVector, b: &CVector) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}

/// Closed-form metric tensor of `picture` at `phi`.
pub fn metric(picture: MetricPicture, phi: &StateVector, variance: Variance) -> Result<Tensor2> {
    let hbar = phi.space().hbar();
    let z = phi.amplitudes();
    let dim = z.len();
    let d = phi.norm_sqr();
    let eye = CMatrix::identity(dim, dim);
    let real = |x: f64| C64::new(x, 0.0);
    let (block, degenerate) = match picture {
        MetricPicture::Hilbert => {
            let s = match variance {
                Variance::Covariant => 0.5,
                Variance::Contravariant => 2.0,
                Variance::Mixed => 1.0,
            };
            (eye * real(s), false)
        }
        MetricPicture::HilbertConformal => {
            let s = match variance {
                Variance::Covariant => hbar / d,
                Variance::Contravariant => d / hbar,
                Variance::Mixed => 1.0,
            };
            (eye * real(s), false)
        }
        MetricPicture::Homogeneous => {
            let zbar = z.conjugate();
            let block = match variance {
                Variance::Covariant => (eye - outer(&zbar, z) / real(d)) * real(hbar / d),
                Variance::Contravariant => (eye * real(d) - outer(z, &zbar)) / real(hbar),
                Variance::Mixed => eye - outer(&zbar, z) / real(d),
            };
            (block, true)
        }
        MetricPicture::Affine => {
            let w = phi.affine()?;
            let wbar = w.conjugate();
            let s = 1.0 + w.norm_squared();
            let eye = CMatrix::identity(dim - 1, dim - 1);
            let block = match variance {
                Variance::Covariant => (eye - outer(&wbar, &w) / real(s)) * real(hbar / s),
                Variance::Contravariant => (eye + outer(&w, &wbar)) * real(s / hbar),
                Variance::Mixed => eye,
            };
            (block, false)
        }
    };
    Ok(Tensor2 {
        block,
        variance,
        picture,
        degenerate,
    })
}

/// Converts a homogeneous displacement `dz` at `phi` into the affine
/// displacement `dw^k = (dz^k - w^k dz^0) / z^0`.
pub fn affine_displacement(phi: &StateVector, dz: &CVector) -> Result<CVector> {
    crate::fock::ensure_len(phi.space().dim(), dz.len())?;
    let w = phi.affine()?;
    let z0 = phi.amplitudes()[0];
    Ok(CVector::from_fn(w.len(), |k, _| (dz[k + 1] - w[k] * dz[0]) / z0))
}

/// Squared line element `2 g_{m nbar} dz^m dz_bar^n` of the covariant
/// metric of `picture`, for a displacement given in homogeneous
/// coordinates (converted to the chart for the affine picture).
pub fn line_element(picture: MetricPicture, phi: &StateVector, dz: &CVector) -> Result<f64> {
    crate::fock::ensure_len(phi.space().dim(), dz.len())?;
    let g = metric(picture, phi, Variance::Covariant)?;
    let v = match picture {
        MetricPicture::Affine => affine_displacement(phi, dz)?,
        _ => dz.clone(),
    };
    let value = v.transpose() * g.block() * v.conjugate();
    Ok(2.0 * value[(0, 0)].re)
}

/// Fubini–Study line element from overlaps,
/// `2 hbar (<dz|dz>/<z|z> - |<z|dz>|^2 / <z|z>^2)`.
pub fn line_element_braket(phi: &StateVector, dz: &CVector) -> Result<f64> {
    crate::fock::ensure_len(phi.space().dim(), dz.len())?;
    let z = phi.amplitudes();
    let d = phi.norm_sqr();
    let overlap = z.dotc(dz);
    Ok(2.0 * phi.space().hbar() * (dz.norm_squared() / d - overlap.norm_sqr() / (d * d)))
}

/// Geodesic Fubini–Study distance
/// `sqrt(2 hbar) arccos sqrt(|<phi|psi>|^2 / (<phi|phi><psi|psi>))`.
pub fn fs_distance(phi: &StateVector, psi: &StateVector) -> Result<f64> {
    let overlap = phi.inner(psi)?;
    let ratio = (overlap.norm_sqr() / (phi.norm_sqr() * psi.norm_sqr())).clamp(0.0, 1.0);
    Ok((2.0 * phi.space().hbar()).sqrt() * ratio.sqrt().acos())
}

/// A Killing vector of the conformal metric: vector components and the
/// covector obtained by lowering with the conformal metric.
#[derive(Debug, Clone)]
pub struct KillingField {
    pub holo: CVector,
    pub anti: CVector,
    pub cov_holo: CVector,
    pub cov_anti: CVector,
}

impl KillingField {
    /// Holomorphic contraction `K_l K^l`.
    pub fn half_norm(&self) -> C64 {
        self.cov_holo.dot(&self.holo)
    }
}

/// The radial-log field `d_tau = z d_z + z_bar d_zbar` and the phase field
/// `d_theta = i z d_z - i z_bar d_zbar` at `phi`.
pub fn vertical_fields(phi: &StateVector) -> [KillingField; 2] {
    let hbar = phi.space().hbar();
    let z = phi.amplitudes().clone();
    let zbar = z.conjugate();
    let c = C64::new(hbar / phi.norm_sqr(), 0.0);
    let i = C64::i();
    let tau = KillingField {
        cov_holo: &zbar * c,
        cov_anti: &z * c,
        holo: z.clone(),
        anti: zbar.clone(),
    };
    let theta = KillingField {
        cov_holo: &zbar * (-i * c),
        cov_anti: &z * (i * c),
        holo: &z * i,
        anti: &zbar * -i,
    };
    [tau, theta]
}

/// Removes the components along the two vertical Killing fields from a
/// tensor of the conformal Hilbert geometry, giving the corresponding
/// homogeneous Fubini–Study tensor.
pub fn killing_reduce(t: &Tensor2, phi: &StateVector) -> Result<Tensor2> {
    if t.picture != MetricPicture::HilbertConformal {
        return Err(Error::InvalidParameter(
            "Killing reduction expects a conformal Hilbert tensor".into(),
        ));
    }
    crate::fock::ensure_len(phi.space().dim(), t.block.nrows())?;
    let mut block = t.block.clone();
    for k in vertical_fields(phi) {
        let norm = k.half_norm() * 2.0;
        let term = match t.variance {
            Variance::Covariant => outer(&k.cov_holo, &k.cov_anti),
            Variance::Contravariant => outer(&k.holo, &k.anti),
            Variance::Mixed => outer(&k.cov_holo, &k.holo),
        };
        block -= term / norm;
    }
    Ok(Tensor2 {
        block,
        variance: t.variance,
        picture: MetricPicture::Homogeneous,
        degenerate: true,
    })
}

/// Christoffel symbols of the conformal Hilbert metric at a point.
///
/// The nonvanishing blocks are `Gamma^l_{mn}`, `Gamma^l_{m nbar}` and
/// `Gamma^l_{mbar n}`; the barred-upper-index blocks are their conjugates.
#[derive(Debug, Clone)]
pub struct Christoffel {
    dim: usize,
    holo: Vec<C64>,
    holo_anti: Vec<C64>,
    anti_holo: Vec<C64>,
}

impl Christoffel {
    fn at(&self, l: usize, m: usize, n: usize) -> usize {
        (l * self.dim + m) * self.dim + n
    }

    /// Number of homogeneous coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Gamma^l_{m n}`.
    pub fn holo(&self, l: usize, m: usize, n: usize) -> C64 {
        self.holo[self.at(l, m, n)]
    }

    /// `Gamma^l_{m nbar}`.
    pub fn holo_anti(&self, l: usize, m: usize, n: usize) -> C64 {
        self.holo_anti[self.at(l, m, n)]
    }

    /// `Gamma^l_{mbar n}`.
    pub fn anti_holo(&self, l: usize, m: usize, n: usize) -> C64 {
        self.anti_holo[self.at(l, m, n)]
    }

    /// `Gamma^lbar_{mbar nbar}`.
    pub fn conj_holo(&self, l: usize, m: usize, n: usize) -> C64 {
        self.holo(l, m, n).conj()
    }

    /// `Gamma^lbar_{mbar n}`.
    pub fn conj_holo_anti(&self, l: usize, m: usize, n: usize) -> C64 {
        self.holo_anti(l, m, n).conj()
    }

    /// `Gamma^lbar_{m nbar}`.
    pub fn conj_anti_holo(&self, l: usize, m: usize, n: usize) -> C64 {
        self.anti_holo(l, m, n).conj()
    }

    /// Largest entrywise distance to another set of symbols.
    pub fn max_difference(&self, other: &Christoffel) -> f64 {
        self.holo
            .iter()
            .zip(&other.holo)
            .chain(self.holo_anti.iter().zip(&other.holo_anti))
            .chain(self.anti_holo.iter().zip(&other.anti_holo))
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

/// Closed-form Christoffel symbols of the conformal Hilbert metric:
/// * `Gamma^l_{mn} = -(delta^l_m z_bar_n + delta^l_n z_bar_m) / (2|z|^2)`,
/// * `Gamma^l_{m nbar} = -(delta^l_m z_n - delta_{mn} z^l) / (2|z|^2)`,
/// * `Gamma^l_{mbar n} = -(delta^l_n z_m - delta_{mn} z^l) / (2|z|^2)`.
pub fn christoffel(phi: &StateVector) -> Christoffel {
    let z = phi.amplitudes();
    let dim = z.len();
    let c = -0.5 / phi.norm_sqr();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = Christoffel {
        dim,
        holo: vec![C64::new(0.0, 0.0); dim * dim * dim],
        holo_anti: vec![C64::new(0.0, 0.0); dim * dim * dim],
        anti_holo: vec![C64::new(0.0, 0.0); dim * dim * dim],
    };
    for l in 0..dim {
        for m in 0..dim {
            for n in 0..dim {
                let k = out.at(l, m, n);
                out.holo[k] = (z[n].conj() * delta(l, m) + z[m].conj() * delta(l, n)) * c;
                out.holo_anti[k] = (z[n] * delta(l, m) - z[l] * delta(m, n)) * c;
                out.anti_holo[k] = (z[m] * delta(l, n) - z[l] * delta(m, n)) * c;
            }
        }
    }
    out
}

/// Levi-Civita symbols of the conformal Hilbert metric rebuilt from central
/// differences of the metric block with step `h`.
pub fn christoffel_fd(phi: &StateVector, h: f64) -> Result<Christoffel> {
    let space = phi.space().clone();
    let dim = space.dim();
    let flat_metric = |z: &CVector| -> CVector {
        let p = StateVector::new(&space, z.clone()).expect("probe stays nonzero");
        let g = metric(MetricPicture::HilbertConformal, &p, Variance::Covariant)
            .expect("conformal metric is total");
        CVector::from_iterator(dim * dim, g.block().iter().copied())
    };
    let (dg, dgbar) = numdiff::wirtinger_jacobian(flat_metric, phi.amplitudes(), h);
    // Column-major flattening: entry (m, n) of the block is row m + n * dim.
    let d = |m: usize, n: usize, a: usize| dg[(m + n * dim, a)];
    let dbar = |m: usize, n: usize, a: usize| dgbar[(m + n * dim, a)];
    let ginv = metric(MetricPicture::HilbertConformal, phi, Variance::Contravariant)?;
    let ginv = ginv.block();
    let mut out = Christoffel {
        dim,
        holo: vec![C64::new(0.0, 0.0); dim * dim * dim],
        holo_anti: vec![C64::new(0.0, 0.0); dim * dim * dim],
        anti_holo: vec![C64::new(0.0, 0.0); dim * dim * dim],
    };
    for l in 0..dim {
        for m in 0..dim {
            for n in 0..dim {
                let mut hh = C64::new(0.0, 0.0);
                let mut ha = C64::new(0.0, 0.0);
                let mut ah = C64::new(0.0, 0.0);
                for e in 0..dim {
                    hh += ginv[(l, e)] * (d(n, e, m) + d(m, e, n));
                    ha += ginv[(l, e)] * (dbar(m, e, n) - dbar(m, n, e));
                    ah += ginv[(l, e)] * (dbar(n, e, m) - dbar(n, m, e));
                }
                let k = out.at(l, m, n);
                out.holo[k] = hh * 0.5;
                out.holo_anti[k] = ha * 0.5;
                out.anti_holo[k] = ah * 0.5;
            }
        }
    }
    Ok(out)
}

/// Residuals of the horizontality conditions for a covector `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizontality {
    /// `|z^n zeta_n|`.
    pub contraction: f64,
    /// `|zeta(d_tau)|`.
    pub tau_pairing: f64,
    /// `|zeta(d_theta)|`.
    pub theta_pairing: f64,
}

impl Horizontality {
    /// Largest of the three residuals.
    pub fn max(&self) -> f64 {
        self.contraction.max(self.tau_pairing).max(self.theta_pairing)
    }
}

/// Horizontality residuals of the covector `(holo, anti)` at `phi`.
pub fn horizontality(phi: &StateVector, holo: &CVector, anti: &CVector) -> Horizontality {
    let z = phi.amplitudes();
    let [tau, theta] = vertical_fields(phi);
    Horizontality {
        contraction: z.dot(holo).norm(),
        tau_pairing: (holo.dot(&tau.holo) + anti.dot(&tau.anti)).norm(),
        theta_pairing: (holo.dot(&theta.holo) + anti.dot(&theta.anti)).norm(),
    }
}

/// Second derivatives of `f_beta = <z|beta|z>/<z|z>`:
/// `(d_m d_n f, d_m d_nbar f, d_mbar d_nbar f)`.
pub fn hessians_f(beta: &Operator, phi: &StateVector) -> Result<(CMatrix, CMatrix, CMatrix)> {
    let e = eval_f(beta, phi)?;
    let z = phi.amplitudes();
    let zbar = z.conjugate();
    let d = phi.norm_sqr();
    let dim = z.len();
    let bz = beta.apply(phi)?;
    let zb = beta.matrix().tr_mul(&zbar);
    let f = e.value;
    let hh = CMatrix::from_fn(dim, dim, |m, n| {
        -(e.grad_holo[m] * zbar[n] + e.grad_holo[n] * zbar[m]) / d
    });
    let aa = CMatrix::from_fn(dim, dim, |m, n| {
        -(e.grad_anti[m] * z[n] + e.grad_anti[n] * z[m]) / d
    });
    let mixed = CMatrix::from_fn(dim, dim, |l, o| {
        let delta = if l == o { f } else { C64::new(0.0, 0.0) };
        (beta.matrix()[(o, l)] - delta) / d - (bz[o] * zbar[l] + zb[l] * z[o]) / (d * d)
            + f * z[o] * zbar[l] * 2.0 / (d * d)
    });
    Ok((hh, mixed, aa))
}

/// Outcome of the covariant-derivative identity for the covector of the
/// Hamiltonian field of `f_beta`, `zeta = (i d f, -i dbar f)`.
#[derive(Debug, Clone)]
pub struct CovariantDerivativeCheck {
    /// Projected partial derivative `P (d_l zeta_obar) P^dagger`.
    pub lhs: CMatrix,
    /// `-i d_m d_nbar f_beta`.
    pub rhs: CMatrix,
    /// Projected covariant derivative `P (nabla_l zeta_obar) P^dagger`.
    pub covariant: CMatrix,
    /// Largest entry of the projected `(m, n)` block.
    pub holo_block: f64,
    /// Largest entry of the projected `(mbar, nbar)` block.
    pub anti_block: f64,
    /// Largest `|nabla_m zeta_nbar + nabla_nbar zeta_m|` after projection.
    pub antisymmetry: f64,
    /// Horizontality of `zeta`.
    pub horizontal: Horizontality,
}

impl CovariantDerivativeCheck {
    /// Largest residual of the identity along both routes.
    pub fn max_residual(&self) -> f64 {
        max_abs(&(&self.lhs - &self.rhs))
            .max(max_abs(&(&self.covariant - &self.rhs)))
            .max(self.holo_block)
            .max(self.anti_block)
            .max(self.antisymmetry)
    }
}

fn projector(phi: &StateVector) -> CMatrix {
    let z = phi.amplitudes();
    let d = C64::new(phi.norm_sqr(), 0.0);
    CMatrix::identity(z.len(), z.len()) - outer(&z.conjugate(), z) / d
}

/// Checks that the horizontally projected derivative of the covector of
/// `f_beta` reduces to `-i d d_bar f_beta`, with and without the
/// Christoffel terms of the conformal metric.
pub fn covariant_derivative_check(
    beta: &Operator,
    phi: &StateVector,
) -> Result<CovariantDerivativeCheck> {
    let e = eval_f(beta, phi)?;
    let (hh, mixed, aa) = hessians_f(beta, phi)?;
    let i = C64::i();
    let dim = phi.space().dim();
    let zeta_h = &e.grad_holo * i;
    let zeta_a = &e.grad_anti * -i;
    let gamma = christoffel(phi);

    let d_mixed = &mixed * -i; // d_l zeta_obar, index [l][o]
    let d_hh = &hh * i; // d_l zeta_o
    let d_aa = &aa * -i; // d_lbar zeta_obar
    let d_rev = mixed.transpose() * i; // d_obar zeta_l, index [o][l]

    let mut nab_mixed = d_mixed.clone();
    let mut nab_hh = d_hh;
    let mut nab_aa = d_aa;
    let mut nab_rev = d_rev;
    for a in 0..dim {
        for b in 0..dim {
            for k in 0..dim {
                nab_mixed[(a, b)] -=
                    gamma.holo_anti(k, a, b) * zeta_h[k] + gamma.conj_anti_holo(k, a, b) * zeta_a[k];
                nab_hh[(a, b)] -= gamma.holo(k, a, b) * zeta_h[k];
                nab_aa[(a, b)] -= gamma.conj_holo(k, a, b) * zeta_a[k];
                nab_rev[(a, b)] -=
                    gamma.anti_holo(k, a, b) * zeta_h[k] + gamma.conj_holo_anti(k, a, b) * zeta_a[k];
            }
        }
    }

    let p = projector(phi);
    let pbar = p.conjugate();
    let lhs = &p * &d_mixed * p.adjoint();
    let covariant = &p * &nab_mixed * p.adjoint();
    let holo_block = max_abs(&(&p * &nab_hh * p.transpose()));
    let anti_block = max_abs(&(&pbar * &nab_aa * p.adjoint()));
    let rev = &pbar * &nab_rev * p.transpose();
    let antisymmetry = max_abs(&(&covariant + rev.transpose()));
    Ok(CovariantDerivativeCheck {
        lhs,
        rhs: d_mixed,
        covariant,
        holo_block,
        anti_block,
        antisymmetry,
        horizontal: horizontality(phi, &zeta_h, &zeta_a),
    })
}

/// Projected derivative `P (d_l zeta_obar) P^dagger` with the derivative
/// taken by central differences of the analytic covector.
pub fn projected_derivative_fd(beta: &Operator, phi: &StateVector, h: f64) -> Result<CMatrix> {
    let space = phi.space().clone();
    let zeta_anti = |z: &CVector| -> CVector {
        let p = StateVector::new(&space, z.clone()).expect("probe stays nonzero");
        let e = eval_f(beta, &p).expect("same space");
        e.grad_anti * -C64::i()
    };
    let (jac, _) = numdiff::wirtinger_jacobian(zeta_anti, phi.amplitudes(), h);
    let p = projector(phi);
    Ok(&p * jac.transpose() * p.adjoint())
}

/// Berry connection one-form `(1/hbar) Im <z|dz>`, as the components
/// `(z_bar_n / (2 i hbar), -z_n / (2 i hbar))`.
pub fn berry_connection(phi: &StateVector) -> (CVector, CVector) {
    let z = phi.amplitudes();
    let c = C64::new(0.0, 2.0 * phi.space().hbar()).inv();
    (z.conjugate() * c, z * -c)
}
