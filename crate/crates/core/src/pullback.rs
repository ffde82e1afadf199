//! Coordinate maps from state space to the observable algebra.
//!
//! The map sends a state to the values of the coordinate observables
//! `(alpha^1..alpha^d, alpha_bar^1..alpha_bar^d)`. Its Jacobian `J` holds the
//! gradients of those functions, and the left inverse `Jinv` is built from
//! the Hamiltonian vectors: `Jinv_i = -(1/2i) X_{alpha_bar^i}` and
//! `Jinv_ibar = (1/2i) X_{alpha^i}`. Symplectic tensors pulled back through
//! these matrices reproduce the constant components of the algebra side,
//! while the analogous construction with the Riemann bracket does not
//! compose to the identity.

use crate::error::{Error, Result};
use crate::fields::{explicit_alpha_fields, FieldKind, Ladder, TangentData};
use crate::fock::{ensure_same, max_abs, CMatrix, CVector, CoordinateOperators, C64, Operator, StateVector};
use crate::geometry::{metric, Variance};
use crate::kahler::{contravariant_block, eval, eval_f, eval_h, star, KahlerEval, Picture};

/// Jacobian of the coordinate map and its left inverse at a state.
///
/// `j` has `2n` rows (holomorphic derivatives, then antiholomorphic ones)
/// and `2d` columns (`alpha^1..alpha^d`, then `alpha_bar^1..alpha_bar^d`).
/// `jinv` has the transposed shape; its rows are vector components.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub j: CMatrix,
    pub jinv: CMatrix,
    pub picture: Picture,
    pub base_point: StateVector,
}

impl Jacobian {
    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.j.ncols() / 2
    }

    /// Number of holomorphic coordinates of the picture.
    pub fn coordinates(&self) -> usize {
        self.j.nrows() / 2
    }

    /// The product `Jinv J`.
    pub fn left_inverse(&self) -> CMatrix {
        &self.jinv * &self.j
    }

    /// Expected value of `Jinv J`: the identity, scaled by `|z|^2 / (2 hbar)`
    /// in the Hilbert picture.
    pub fn expected_left_inverse(&self) -> CMatrix {
        let d2 = 2 * self.modes();
        CMatrix::identity(d2, d2) * C64::new(picture_scale(self.picture, &self.base_point), 0.0)
    }

    /// Max-entry residual of the left-inverse identity.
    pub fn left_inverse_residual(&self) -> f64 {
        max_abs(&(self.left_inverse() - self.expected_left_inverse()))
    }

    /// Largest antiholomorphic derivative of an `alpha` coordinate function,
    /// which is nonzero whenever the map fails to be holomorphic.
    pub fn non_holomorphy(&self) -> f64 {
        let n = self.coordinates();
        let d = self.modes();
        max_abs(&self.j.view((n, 0), (n, d)).into_owned())
    }
}

/// Scale `|z|^2 / (2 hbar)` carried by Hilbert-picture identities, one for
/// the projective pictures.
pub fn picture_scale(picture: Picture, phi: &StateVector) -> f64 {
    match picture {
        Picture::Hilbert => phi.norm_sqr() / (2.0 * phi.space().hbar()),
        _ => 1.0,
    }
}

fn coordinate_field(mode: usize, ladder: Ladder, phi: &StateVector, picture: Picture, kind: FieldKind) -> Result<TangentData> {
    explicit_alpha_fields(mode, ladder, phi, picture, kind)
}

/// Jacobian and left inverse of the coordinate map at `phi`.
pub fn jacobian(phi: &StateVector, picture: Picture) -> Result<Jacobian> {
    let d = phi.space().modes();
    let i = C64::i();
    let probe = coordinate_field(0, Ladder::Alpha, phi, picture, FieldKind::Covector)?;
    let n = probe.holo.len();
    let mut j = CMatrix::zeros(2 * n, 2 * d);
    let mut jinv = CMatrix::zeros(2 * d, 2 * n);
    let half_i = C64::new(0.0, 0.5);
    for (col, ladder) in [(0, Ladder::Alpha), (d, Ladder::AlphaBar)] {
        for m in 0..d {
            // The covector is (i dF, -i dbarF), so the gradient is (-i cov, i cov_bar).
            let cov = coordinate_field(m, ladder, phi, picture, FieldKind::Covector)?;
            j.view_mut((0, col + m), (n, 1)).copy_from(&(&cov.holo * -i));
            j.view_mut((n, col + m), (n, 1)).copy_from(&(&cov.anti * i));
        }
    }
    for m in 0..d {
        // Jinv_i = -(1/2i) X_{alpha_bar^i} = (i/2) X_{alpha_bar^i}.
        let xb = coordinate_field(m, Ladder::AlphaBar, phi, picture, FieldKind::Vector)?;
        let xa = coordinate_field(m, Ladder::Alpha, phi, picture, FieldKind::Vector)?;
        set_row(&mut jinv, m, &xb, half_i);
        set_row(&mut jinv, d + m, &xa, -half_i);
    }
    Ok(Jacobian {
        j,
        jinv,
        picture,
        base_point: phi.clone(),
    })
}

fn set_row(m: &mut CMatrix, row: usize, field: &TangentData, c: C64) {
    let n = field.holo.len();
    for k in 0..n {
        m[(row, k)] = field.holo[k] * c;
        m[(row, n + k)] = field.anti[k] * c;
    }
}

/// Two-form and bivector matrices on `(holo, anti)` component vectors.
///
/// `omega` satisfies `omega(X, Y) = X^T W Y`, `riemann` is the symmetric
/// metric form built from the same block, and `poisson` satisfies
/// `{F, G} = dF^T P dG` on gradient vectors.
struct Forms {
    omega: CMatrix,
    riemann: CMatrix,
    poisson: CMatrix,
}

fn forms(phi: &StateVector, picture: Picture) -> Result<Forms> {
    let cov = metric(picture.into(), phi, Variance::Covariant)?.block().clone();
    let contra = contravariant_block(picture, phi)?;
    let n = cov.nrows();
    let i = C64::i();
    let mut omega = CMatrix::zeros(2 * n, 2 * n);
    let mut riemann = CMatrix::zeros(2 * n, 2 * n);
    let mut poisson = CMatrix::zeros(2 * n, 2 * n);
    omega.view_mut((0, n), (n, n)).copy_from(&(&cov * i));
    omega.view_mut((n, 0), (n, n)).copy_from(&(cov.transpose() * -i));
    riemann.view_mut((0, n), (n, n)).copy_from(&cov);
    riemann.view_mut((n, 0), (n, n)).copy_from(&cov.transpose());
    poisson.view_mut((0, n), (n, n)).copy_from(&(&contra * -i));
    poisson.view_mut((n, 0), (n, n)).copy_from(&(contra.transpose() * i));
    Ok(Forms {
        omega,
        riemann,
        poisson,
    })
}

/// Symplectic tensors pulled back through the coordinate map.
///
/// Rows and columns run over `alpha^1..alpha^d, alpha_bar^1..alpha_bar^d`.
#[derive(Debug, Clone)]
pub struct OmegaPullback {
    /// `omega(Jinv_a, Jinv_b)`.
    pub covariant: CMatrix,
    /// `{f_a, f_b}` from `J^T P J`.
    pub contravariant: CMatrix,
    /// `|z|^2 / (2 hbar)` in the Hilbert picture, one otherwise.
    pub scale: f64,
}

impl OmegaPullback {
    /// Expected covariant matrix: `(i/2) delta` on the `(i, jbar)` block and
    /// `-(i/2) delta` on `(ibar, j)`, times the picture scale.
    pub fn expected_covariant(&self) -> CMatrix {
        constant_blocks(self.covariant.nrows() / 2, C64::new(0.0, 0.5) * self.scale)
    }

    /// Expected contravariant matrix: `-2i delta` on `(j, ibar)` and
    /// `2i delta` on `(jbar, i)`, times the picture scale.
    pub fn expected_contravariant(&self) -> CMatrix {
        constant_blocks(self.contravariant.nrows() / 2, C64::new(0.0, -2.0) * self.scale)
    }

    /// Largest deviation from the expected constants.
    pub fn residual(&self) -> f64 {
        max_abs(&(&self.covariant - self.expected_covariant()))
            .max(max_abs(&(&self.contravariant - self.expected_contravariant())))
    }
}

fn constant_blocks(d: usize, c: C64) -> CMatrix {
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        m[(k, d + k)] = c;
        m[(d + k, k)] = -c;
    }
    m
}

/// Pulls the symplectic form and its inverse back through the coordinate
/// map at `phi`.
pub fn omega_pullback(phi: &StateVector, picture: Picture) -> Result<OmegaPullback> {
    let jac = jacobian(phi, picture)?;
    let f = forms(phi, picture)?;
    Ok(OmegaPullback {
        covariant: &jac.jinv * &f.omega * jac.jinv.transpose(),
        contravariant: jac.j.transpose() * &f.poisson * &jac.j,
        scale: picture_scale(picture, phi),
    })
}

/// Pairings `<dF_a, X_b>` between coordinate differentials and coordinate
/// Hamiltonian vectors, as `2d x 2d` matrices over
/// `alpha^1..alpha^d, alpha_bar^1..alpha_bar^d`.
#[derive(Debug, Clone)]
pub struct PairingTable {
    /// Affine-chart pairings.
    pub affine: CMatrix,
    /// Hilbert-picture pairings at the given state.
    pub hilbert: CMatrix,
    /// Hilbert-picture pairings at the same ray with `|z|^2 = 2 hbar`.
    pub hilbert_on_sphere: CMatrix,
    /// `|z|^2` of the given state.
    pub norm_sqr: f64,
    pub hbar: f64,
}

impl PairingTable {
    /// Expected affine table: `<df_alpha, X_alpha_bar> = -2i delta`,
    /// `<df_alpha_bar, X_alpha> = 2i delta`, zero otherwise.
    pub fn expected_affine(&self) -> CMatrix {
        constant_blocks(self.affine.nrows() / 2, C64::new(0.0, -2.0))
    }

    /// Expected Hilbert table at the given state, `(-i |z|^2 / hbar) delta`
    /// on the mixed blocks.
    pub fn expected_hilbert(&self) -> CMatrix {
        constant_blocks(self.hilbert.nrows() / 2, C64::new(0.0, -self.norm_sqr / self.hbar))
    }

    /// Largest deviation among the three tables.
    pub fn residual(&self) -> f64 {
        let e = self.expected_affine();
        max_abs(&(&self.affine - &e))
            .max(max_abs(&(&self.hilbert - self.expected_hilbert())))
            .max(max_abs(&(&self.hilbert_on_sphere - &e)))
    }
}

fn pairing_matrix(phi: &StateVector, picture: Picture) -> Result<CMatrix> {
    let jac = jacobian(phi, picture)?;
    // Jinv rows are (i/2) X_{alpha_bar} and -(i/2) X_alpha; undo the factors.
    let d = jac.modes();
    let mut vectors = jac.jinv.clone();
    for m in 0..d {
        vectors.row_mut(m).scale_mut(2.0);
        vectors.row_mut(d + m).scale_mut(2.0);
        let a = vectors.row(m) * -C64::i();
        let b = vectors.row(d + m) * C64::i();
        // Columns of the result are ordered alpha then alpha_bar.
        vectors.set_row(m, &b);
        vectors.set_row(d + m, &a);
    }
    Ok((vectors * &jac.j).transpose())
}

/// Evaluates the pairing table at `phi`.
pub fn pairing_pullback(phi: &StateVector) -> Result<PairingTable> {
    let hbar = phi.space().hbar();
    let sphere = phi.with_norm_sqr(2.0 * hbar)?;
    Ok(PairingTable {
        affine: pairing_matrix(phi, Picture::Affine)?,
        hilbert: pairing_matrix(phi, Picture::Hilbert)?,
        hilbert_on_sphere: pairing_matrix(&sphere, Picture::Hilbert)?,
        norm_sqr: phi.norm_sqr(),
        hbar,
    })
}

/// Candidate metric pull-backs built from Riemann brackets, and their
/// composition.
#[derive(Debug, Clone)]
pub struct MetricFailure {
    /// `C_ik = sum_j G_ij * G^jk + G_ijbar * G^jbar k` (affine route).
    pub composition: CMatrix,
    /// `max |C - delta|`.
    pub deviation_from_delta: f64,
    /// The same composition from Hilbert-space functions.
    pub hilbert_composition: CMatrix,
    /// Largest difference between affine and Hilbert candidate values.
    pub candidate_gap: f64,
    /// Largest difference between `G_ijbar = {f_alpha_bar^i, f_alpha^j}_g / 4`
    /// and the metric sandwiched between left-inverse rows.
    pub sandwich_gap: f64,
}

fn riemann_jet(
    a: &Operator,
    b: &Operator,
    ja: &KahlerEval,
    jb: &KahlerEval,
    phi: &StateVector,
    picture: Picture,
) -> Result<KahlerEval> {
    let hbar = phi.space().hbar();
    let anti = a.anticommutator(b)?;
    let base = eval(&anti, phi, picture)?.scale(C64::new(1.0 / hbar, 0.0));
    if picture.is_projective() {
        base.add(&ja.mul(jb)?.scale(C64::new(-2.0 / hbar, 0.0)))
    } else {
        Ok(base)
    }
}

struct Candidates {
    cov: CMatrix,
    cov_mixed: CMatrix,
    contra: Vec<Vec<KahlerEval>>,
    contra_mixed: Vec<Vec<KahlerEval>>,
    cov_jets: Vec<Vec<KahlerEval>>,
    cov_mixed_jets: Vec<Vec<KahlerEval>>,
}

fn candidates(coords: &CoordinateOperators, phi: &StateVector, picture: Picture) -> Result<Candidates> {
    let d = coords.modes();
    let jets_a: Vec<KahlerEval> = (0..d).map(|m| eval(coords.alpha(m), phi, picture)).collect::<Result<_>>()?;
    let jets_b: Vec<KahlerEval> = (0..d).map(|m| eval(coords.alpha_bar(m), phi, picture)).collect::<Result<_>>()?;
    let quarter = C64::new(0.25, 0.0);
    let mut cov_jets = Vec::with_capacity(d);
    let mut cov_mixed_jets = Vec::with_capacity(d);
    let mut contra = Vec::with_capacity(d);
    let mut contra_mixed = Vec::with_capacity(d);
    for i in 0..d {
        let mut r1 = Vec::with_capacity(d);
        let mut r2 = Vec::with_capacity(d);
        let mut r3 = Vec::with_capacity(d);
        let mut r4 = Vec::with_capacity(d);
        for j in 0..d {
            let (ab_i, ab_j, a_i, a_j) = (coords.alpha_bar(i), coords.alpha_bar(j), coords.alpha(i), coords.alpha(j));
            r1.push(riemann_jet(ab_i, ab_j, &jets_b[i], &jets_b[j], phi, picture)?.scale(-quarter));
            r2.push(riemann_jet(ab_i, a_j, &jets_b[i], &jets_a[j], phi, picture)?.scale(quarter));
            r3.push(riemann_jet(a_i, a_j, &jets_a[i], &jets_a[j], phi, picture)?);
            r4.push(riemann_jet(ab_i, a_j, &jets_b[i], &jets_a[j], phi, picture)?);
        }
        cov_jets.push(r1);
        cov_mixed_jets.push(r2);
        contra.push(r3);
        contra_mixed.push(r4);
    }
    let values = |jets: &Vec<Vec<KahlerEval>>| CMatrix::from_fn(d, d, |i, j| jets[i][j].value);
    Ok(Candidates {
        cov: values(&cov_jets),
        cov_mixed: values(&cov_mixed_jets),
        contra,
        contra_mixed,
        cov_jets,
        cov_mixed_jets,
    })
}

fn compose(c: &Candidates, phi: &StateVector, picture: Picture) -> Result<CMatrix> {
    let d = c.contra.len();
    let block = contravariant_block(picture, phi)?;
    let hbar = phi.space().hbar();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..d {
                acc += star(&c.cov_jets[i][j], &c.contra[j][k], &block, hbar)?;
                acc += star(&c.cov_mixed_jets[i][j], &c.contra_mixed[j][k], &block, hbar)?;
            }
            out[(i, k)] = acc;
        }
    }
    Ok(out)
}

/// Builds the Riemann-bracket candidates for a pulled-back metric and
/// measures how far their composition is from the identity.
pub fn metric_pullback_failure(coords: &CoordinateOperators, phi: &StateVector) -> Result<MetricFailure> {
    ensure_same(coords.space(), phi.space())?;
    let d = coords.modes();
    let affine = candidates(coords, phi, Picture::Affine)?;
    let hilbert = candidates(coords, phi, Picture::Hilbert)?;
    let composition = compose(&affine, phi, Picture::Affine)?;
    let hilbert_composition = compose(&hilbert, phi, Picture::Hilbert)?;
    let deviation_from_delta = max_abs(&(&composition - CMatrix::identity(d, d)));
    let mut candidate_gap = max_abs(&(&affine.cov - &hilbert.cov)).max(max_abs(&(&affine.cov_mixed - &hilbert.cov_mixed)));
    for j in 0..d {
        for k in 0..d {
            candidate_gap = candidate_gap
                .max((affine.contra[j][k].value - hilbert.contra[j][k].value).norm())
                .max((affine.contra_mixed[j][k].value - hilbert.contra_mixed[j][k].value).norm());
        }
    }
    let jac = jacobian(phi, Picture::Affine)?;
    let f = forms(phi, Picture::Affine)?;
    let sandwich = &jac.jinv * &f.riemann * jac.jinv.transpose();
    let sandwich_block = sandwich.view((0, d), (d, d)).into_owned();
    let sandwich_gap = max_abs(&(&sandwich_block - &affine.cov_mixed));
    Ok(MetricFailure {
        composition,
        deviation_from_delta,
        hilbert_composition,
        candidate_gap,
        sandwich_gap,
    })
}

/// Removes the radial part of a displacement so that it is tangent to the
/// sphere through `phi`: `dz - z Re<z|dz> / |z|^2`.
pub fn project_to_sphere_tangent(phi: &StateVector, dz: &CVector) -> Result<CVector> {
    crate::fock::ensure_len(phi.space().dim(), dz.len())?;
    let z = phi.amplitudes();
    let radial = z.dotc(dz).re / phi.norm_sqr();
    Ok(dz - z * C64::new(radial, 0.0))
}

/// Directional derivatives of `H_beta` and `f_beta` along a displacement,
/// each computed from gradients and from matrix elements of `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneFormConsistency {
    /// `dH_beta(dz)` from the gradient of `H_beta`.
    pub dh_route: C64,
    /// `(<dz|beta|z> + <z|beta|dz>) / (2 hbar)`.
    pub h_dbeta_route: C64,
    /// `df_beta(dz)` from the gradient of `f_beta`.
    pub df_route: C64,
    /// `(<dz|beta|z> + <z|beta|dz>) / |z|^2 - f_beta (<dz|z> + <z|dz>) / |z|^2`.
    pub f_dbeta_route: C64,
    /// `2 Re<z|dz>`, the change of `|z|^2`.
    pub radial_change: f64,
    /// `|z|^2 - 2 hbar`.
    pub sphere_offset: f64,
}

impl OneFormConsistency {
    /// Disagreement between the two routes for each function.
    pub fn route_residual(&self) -> f64 {
        (self.dh_route - self.h_dbeta_route)
            .norm()
            .max((self.df_route - self.f_dbeta_route).norm())
    }

    /// `|dH - df|`, which vanishes on the sphere `|z|^2 = 2 hbar` for
    /// tangent displacements.
    pub fn sphere_gap(&self) -> f64 {
        (self.dh_route - self.df_route).norm()
    }
}

/// Evaluates the one-form routes for `beta` at `phi` along `dz`.
pub fn one_form_consistency(beta: &Operator, phi: &StateVector, dz: &CVector) -> Result<OneFormConsistency> {
    ensure_same(beta.space(), phi.space())?;
    crate::fock::ensure_len(phi.space().dim(), dz.len())?;
    if dz.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite displacement".into()));
    }
    let hbar = phi.space().hbar();
    let z = phi.amplitudes();
    let d = phi.norm_sqr();
    let directional = |e: &KahlerEval| e.grad_holo.dot(dz) + e.grad_anti.dot(&dz.conjugate());
    let h = eval_h(beta, phi)?;
    let f = eval_f(beta, phi)?;
    let bz = beta.apply(phi)?;
    let bdz = beta.matrix() * dz;
    let matrix_term = dz.dotc(&bz) + z.dotc(&bdz);
    let radial = dz.dotc(z) + z.dotc(dz);
    Ok(OneFormConsistency {
        dh_route: directional(&h),
        h_dbeta_route: matrix_term / (2.0 * hbar),
        df_route: directional(&f),
        f_dbeta_route: (matrix_term - f.value * radial) / d,
        radial_change: radial.re,
        sphere_offset: d - 2.0 * hbar,
    })
}

/// One row of the cross-picture comparison: the same algebraic quantity
/// evaluated in the Hilbert, homogeneous and affine pictures.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub name: String,
    pub values: [C64; 3],
}

impl TableRow {
    /// Largest pairwise difference among the three pictures.
    pub fn spread(&self) -> f64 {
        let v = &self.values;
        (v[0] - v[1]).norm().max((v[0] - v[2]).norm()).max((v[1] - v[2]).norm())
    }
}

/// Evaluates coordinate functions, Kähler products, Poisson brackets,
/// field pairings and Jacobian diagonals in all three pictures on the ray
/// of `phi` rescaled to `|z|^2 = 2 hbar`.
pub fn table_consistency(coords: &CoordinateOperators, phi: &StateVector) -> Result<Vec<TableRow>> {
    ensure_same(coords.space(), phi.space())?;
    let hbar = phi.space().hbar();
    let phi = phi.with_norm_sqr(2.0 * hbar)?;
    let d = coords.modes();
    let mut rows = Vec::new();
    let per_picture = |f: &dyn Fn(Picture) -> Result<C64>| -> Result<[C64; 3]> {
        Ok([f(Picture::Hilbert)?, f(Picture::Homogeneous)?, f(Picture::Affine)?])
    };
    let jacobians = [
        jacobian(&phi, Picture::Hilbert)?,
        jacobian(&phi, Picture::Homogeneous)?,
        jacobian(&phi, Picture::Affine)?,
    ];
    let pairings = [
        pairing_matrix(&phi, Picture::Hilbert)?,
        pairing_matrix(&phi, Picture::Homogeneous)?,
        pairing_matrix(&phi, Picture::Affine)?,
    ];
    for i in 0..d {
        let a = coords.alpha(i);
        rows.push(TableRow {
            name: format!("coordinate alpha_{}", i + 1),
            values: per_picture(&|p| Ok(eval(a, &phi, p)?.value))?,
        });
        for j in 0..d {
            let b = coords.alpha_bar(j);
            rows.push(TableRow {
                name: format!("product alpha_{} alpha_bar_{}", i + 1, j + 1),
                values: per_picture(&|p| crate::kahler::kahler_product(a, b, &phi, p))?,
            });
            rows.push(TableRow {
                name: format!("poisson alpha_{} alpha_bar_{}", i + 1, j + 1),
                values: per_picture(&|p| {
                    let block = contravariant_block(p, &phi)?;
                    Ok(crate::kahler::poisson_geometric(&eval(a, &phi, p)?, &eval(b, &phi, p)?, &block))
                })?,
            });
            rows.push(TableRow {
                name: format!("pairing d alpha_{} on X alpha_bar_{}", i + 1, j + 1),
                values: [pairings[0][(i, d + j)], pairings[1][(i, d + j)], pairings[2][(i, d + j)]],
            });
        }
        let diag = |k: usize| [0, 1, 2].map(|p| jacobians[p].left_inverse()[(k, k)]);
        rows.push(TableRow {
            name: format!("left inverse alpha_{}", i + 1),
            values: diag(i),
        });
        rows.push(TableRow {
            name: format!("left inverse alpha_bar_{}", i + 1),
            values: diag(d + i),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_coordinate_operators, c64, FockSpace};

    fn state(d: usize, n: usize) -> StateVector {
        let s = FockSpace::new(d, n, 0.8).unwrap();
        let z = CVector::from_fn(s.dim(), |k, _| {
            if s.occupation(k) + 2 <= n {
                c64(0.3 + 0.1 * k as f64, 0.2 - 0.07 * k as f64)
            } else {
                c64(0.0, 0.0)
            }
        });
        StateVector::new(&s, z).unwrap()
    }

    #[test]
    fn left_inverse_in_every_picture() {
        let phi = state(2, 4);
        for p in Picture::ALL {
            let jac = jacobian(&phi, p).unwrap();
            assert!(jac.left_inverse_residual() < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn hilbert_left_inverse_scales_with_norm() {
        let phi = state(1, 6).with_norm_sqr(4.0 * 0.8).unwrap();
        let li = jacobian(&phi, Picture::Hilbert).unwrap().left_inverse();
        assert!(max_abs(&(li - CMatrix::identity(2, 2) * c64(2.0, 0.0))) < 1e-10);
    }

    #[test]
    fn omega_constants() {
        let phi = state(2, 4);
        for p in Picture::ALL {
            let o = omega_pullback(&phi, p).unwrap();
            assert!(o.residual() < 1e-10, "{p:?} {}", o.residual());
        }
    }

    #[test]
    fn pairing_table_values() {
        let phi = state(1, 6).with_norm_sqr(6.0 * 0.8).unwrap();
        let t = pairing_pullback(&phi).unwrap();
        assert!(t.residual() < 1e-10);
        assert!((t.hilbert[(0, 1)] - c64(0.0, -6.0)).norm() < 1e-10);
    }

    #[test]
    fn metric_candidates_do_not_compose() {
        let phi = state(1, 6);
        let c = build_coordinate_operators(phi.space());
        let m = metric_pullback_failure(&c, &phi).unwrap();
        assert!(m.deviation_from_delta > 1e-3);
        assert!(m.sandwich_gap < 1e-10);
        assert!(m.candidate_gap > 1e-3);
    }

    #[test]
    fn one_form_routes() {
        let phi = state(1, 6).with_norm_sqr(1.6).unwrap();
        let c = build_coordinate_operators(phi.space());
        let beta = &(c.x(0) * c.p(0)) + &(c.p(0) * c.x(0));
        let raw = CVector::from_fn(7, |k, _| c64(0.1 * k as f64, 0.3 - 0.05 * k as f64));
        let dz = project_to_sphere_tangent(&phi, &raw).unwrap();
        let r = one_form_consistency(&beta, &phi, &dz).unwrap();
        assert!(r.route_residual() < 1e-12);
        assert!(r.radial_change.abs() < 1e-14);
        assert!(r.sphere_gap() < 1e-12);
        let radial = phi.amplitudes() * c64(1e-3, 0.0);
        let r = one_form_consistency(&beta, &phi, &radial).unwrap();
        assert!(r.df_route.norm() < 1e-14);
        assert!(r.dh_route.norm() > 1e-6);
    }

    #[test]
    fn table_rows_agree() {
        let phi = state(2, 4);
        let c = build_coordinate_operators(phi.space());
        for row in table_consistency(&c, &phi).unwrap() {
            assert!(row.spread() < 1e-10, "{} {:?}", row.name, row.values);
        }
    }
}
