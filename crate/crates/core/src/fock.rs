//! Truncated multi-mode Fock space, state vectors and the operator algebra.
//!
//! A space with `d` modes and per-mode cutoff `n_cut` has the basis
//! `|n_1, ..., n_d>` with `0 <= n_i <= n_cut`. Flat positions enumerate
//! multi-indices lexicographically with mode 0 most significant, so the
//! ground state `[0]` sits at flat index 0.
//!
//! The coordinate observables use the scaled ladder operator
//! `alpha_i = sqrt(2 hbar) a_i`, which gives `[x_i, p_j] = i hbar delta_ij`
//! and `[alpha_i, alpha_bar_j] = 2 hbar delta_ij` below the cutoff.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 4096;

/// Tolerance used when an operator is declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Shared handle to a Fock space.
pub type Space = Arc<FockSpace>;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Truncated multi-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    modes: usize,
    cutoff: usize,
    hbar: f64,
    table: Vec<Vec<usize>>,
}

impl FockSpace {
    /// Builds the space with `modes` modes (1 to 3), per-mode cutoff
    /// `cutoff` (at least 2) and action unit `hbar > 0`.
    pub fn new(modes: usize, cutoff: usize, hbar: f64) -> Result<Space> {
        if !(1..=3).contains(&modes) {
            return Err(Error::InvalidSpace(format!(
                "mode count must be 1..=3, got {modes}"
            )));
        }
        if cutoff < 2 {
            return Err(Error::InvalidSpace(format!(
                "cutoff must be at least 2, got {cutoff}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidSpace(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        let dim = (cutoff + 1)
            .checked_pow(modes as u32)
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| {
                Error::InvalidSpace(format!(
                    "dimension (cutoff+1)^modes exceeds {MAX_DIM}"
                ))
            })?;
        let table = (0..dim)
            .map(|flat| {
                let mut rest = flat;
                let mut idx = vec![0; modes];
                for slot in idx.iter_mut().rev() {
                    *slot = rest % (cutoff + 1);
                    rest /= cutoff + 1;
                }
                idx
            })
            .collect();
        Ok(Arc::new(FockSpace {
            modes,
            cutoff,
            hbar,
            table,
        }))
    }

    /// Number of modes `d`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Per-mode occupation cutoff.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Action unit.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Hilbert-space dimension `(cutoff + 1)^modes`.
    pub fn dim(&self) -> usize {
        self.table.len()
    }

    /// Multi-index of a flat basis position.
    ///
    /// # Panics
    /// Panics if `flat >= dim()`.
    pub fn multi_index(&self, flat: usize) -> &[usize] {
        &self.table[flat]
    }

    /// Flat position of a multi-index, or `None` when it lies outside the
    /// truncated basis.
    pub fn flat_index(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.modes || idx.iter().any(|&n| n > self.cutoff) {
            return None;
        }
        Some(idx.iter().fold(0, |acc, &n| acc * (self.cutoff + 1) + n))
    }

    /// Flat position of `[n]` with mode `mode` shifted by `delta`, or `None`
    /// when the shifted index leaves the truncated basis.
    pub fn shift(&self, flat: usize, mode: usize, delta: isize) -> Option<usize> {
        let n = self.table.get(flat)?.get(mode)?;
        let shifted = *n as isize + delta;
        if shifted < 0 || shifted > self.cutoff as isize {
            return None;
        }
        let stride = (self.cutoff + 1).pow((self.modes - 1 - mode) as u32) as isize;
        Some((flat as isize + delta * stride) as usize)
    }

    /// Total occupation `n_1 + ... + n_d` of a basis state.
    pub fn occupation(&self, flat: usize) -> usize {
        self.table[flat].iter().sum()
    }

    /// Flat positions whose total occupation is at most `cutoff - degree`.
    ///
    /// Identities between operator polynomials of ladder degree `degree`
    /// hold exactly on these basis states. Empty when `degree > cutoff`.
    pub fn faithful(&self, degree: usize) -> Vec<usize> {
        if degree > self.cutoff {
            return Vec::new();
        }
        let budget = self.cutoff - degree;
        (0..self.dim())
            .filter(|&k| self.occupation(k) <= budget)
            .collect()
    }

    /// Human-readable label `|n_1,...,n_d>` for a flat position.
    pub fn label(&self, flat: usize) -> String {
        let parts: Vec<String> = self.table[flat].iter().map(|n| n.to_string()).collect();
        parts.join("_")
    }
}

pub(crate) fn ensure_same(a: &Space, b: &Space) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "(d={}, cutoff={}, hbar={}) vs (d={}, cutoff={}, hbar={})",
            a.modes, a.cutoff, a.hbar, b.modes, b.cutoff, b.hbar
        )))
    }
}

pub(crate) fn ensure_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Homogeneous coordinates `z^[n]` of a nonzero point of the Hilbert space.
#[derive(Debug, Clone)]
pub struct StateVector {
    space: Space,
    z: CVector,
}

impl StateVector {
    /// Wraps an amplitude vector. Rejects wrong lengths, non-finite
    /// entries and the zero vector.
    pub fn new(space: &Space, z: CVector) -> Result<Self> {
        ensure_len(space.dim(), z.len())?;
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::UndefinedState("non-finite amplitude".into()));
        }
        if z.norm_squared() == 0.0 {
            return Err(Error::UndefinedState("zero vector".into()));
        }
        Ok(StateVector {
            space: Arc::clone(space),
            z,
        })
    }

    /// Builds a state from a slice of amplitudes.
    pub fn from_slice(space: &Space, z: &[C64]) -> Result<Self> {
        Self::new(space, CVector::from_column_slice(z))
    }

    /// Basis state `|[n]>` with unit amplitude.
    pub fn basis(space: &Space, idx: &[usize]) -> Result<Self> {
        let flat = space.flat_index(idx).ok_or_else(|| {
            Error::InvalidParameter(format!("multi-index {idx:?} outside the basis"))
        })?;
        let mut z = CVector::zeros(space.dim());
        z[flat] = C64::new(1.0, 0.0);
        Self::new(space, z)
    }

    /// Owning space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Amplitudes `z^[n]`.
    pub fn amplitudes(&self) -> &CVector {
        &self.z
    }

    /// Consumes the state and returns its amplitudes.
    pub fn into_amplitudes(self) -> CVector {
        self.z
    }

    /// Squared norm `|z|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_squared()
    }

    /// Radius `r = |z|`.
    pub fn radius(&self) -> f64 {
        self.z.norm()
    }

    /// Phase of the ground-state amplitude `z^[0]`.
    pub fn phase(&self) -> f64 {
        self.z[0].arg()
    }

    /// Largest total occupation carrying a nonzero amplitude.
    pub fn support_cut(&self) -> usize {
        (0..self.z.len())
            .filter(|&k| self.z[k] != C64::new(0.0, 0.0))
            .map(|k| self.space.occupation(k))
            .max()
            .unwrap_or(0)
    }

    /// The state multiplied by a nonzero complex constant.
    pub fn scaled(&self, c: C64) -> Result<Self> {
        Self::new(&self.space, &self.z * c)
    }

    /// The same ray rescaled to `|z|^2 = norm_sqr`.
    pub fn with_norm_sqr(&self, norm_sqr: f64) -> Result<Self> {
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target squared norm must be positive, got {norm_sqr}"
            )));
        }
        self.scaled(C64::new((norm_sqr / self.norm_sqr()).sqrt(), 0.0))
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        ensure_same(&self.space, &other.space)?;
        Ok(self.z.dotc(&other.z))
    }

    /// Affine coordinates `w^[n] = z^[n] / z^[0]` for `[n] != [0]`.
    ///
    /// Entry `k - 1` of the result belongs to flat index `k`.
    pub fn affine(&self) -> Result<CVector> {
        let z0 = self.z[0];
        if z0.norm() <= 1e-14 * self.radius() {
            return Err(Error::Chart(z0.norm()));
        }
        Ok(self.z.rows(1, self.z.len() - 1) / z0)
    }

    /// Rebuilds homogeneous coordinates `(1, w)` from affine coordinates.
    pub fn from_affine(space: &Space, w: &CVector) -> Result<Self> {
        ensure_len(space.dim() - 1, w.len())?;
        let mut z = CVector::zeros(space.dim());
        z[0] = C64::new(1.0, 0.0);
        z.rows_mut(1, w.len()).copy_from(w);
        Self::new(space, z)
    }
}

/// Complex matrix acting on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct Operator {
    space: Space,
    matrix: CMatrix,
    hermitian_hint: Option<bool>,
}

impl Operator {
    /// Wraps a square matrix of the space's dimension.
    pub fn new(space: &Space, matrix: CMatrix) -> Result<Self> {
        ensure_len(space.dim(), matrix.nrows())?;
        ensure_len(space.dim(), matrix.ncols())?;
        Ok(Operator {
            space: Arc::clone(space),
            matrix,
            hermitian_hint: None,
        })
    }

    /// Wraps a matrix and records that it is Hermitian, checking the claim.
    pub fn hermitian(space: &Space, matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(space, matrix)?;
        let residual = op.hermiticity_residual();
        if residual > HERMITIAN_TOL * op.max_abs().max(1.0) {
            return Err(Error::NotHermitian(residual));
        }
        op.hermitian_hint = Some(true);
        Ok(op)
    }

    /// Identity operator.
    pub fn identity(space: &Space) -> Self {
        Operator {
            space: Arc::clone(space),
            matrix: CMatrix::identity(space.dim(), space.dim()),
            hermitian_hint: Some(true),
        }
    }

    /// Zero operator.
    pub fn zero(space: &Space) -> Self {
        Operator {
            space: Arc::clone(space),
            matrix: CMatrix::zeros(space.dim(), space.dim()),
            hermitian_hint: Some(true),
        }
    }

    /// Owning space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Whether the operator was declared Hermitian (`None` if unknown).
    pub fn hermitian_hint(&self) -> Option<bool> {
        self.hermitian_hint
    }

    /// Max-entry distance between the matrix and its adjoint.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Hermitian up to `tol` relative to the largest entry.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_hint == Some(true)
            || self.hermiticity_residual() <= tol * self.max_abs().max(1.0)
    }

    /// Returns `Err(NotHermitian)` unless the operator is Hermitian.
    pub fn require_hermitian(&self) -> Result<()> {
        if self.is_hermitian(HERMITIAN_TOL) {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.hermiticity_residual()))
        }
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    fn derived(&self, matrix: CMatrix, hint: Option<bool>) -> Self {
        Operator {
            space: Arc::clone(&self.space),
            matrix,
            hermitian_hint: hint,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.derived(self.matrix.adjoint(), self.hermitian_hint)
    }

    /// Multiplies by a complex scalar.
    pub fn scale(&self, c: C64) -> Self {
        let hint = match self.hermitian_hint {
            Some(true) if c.im == 0.0 => Some(true),
            _ => None,
        };
        self.derived(&self.matrix * c, hint)
    }

    /// Sum of two operators.
    pub fn try_add(&self, other: &Operator) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let hint = both_hermitian(self, other);
        Ok(self.derived(&self.matrix + &other.matrix, hint))
    }

    /// Difference of two operators.
    pub fn try_sub(&self, other: &Operator) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let hint = both_hermitian(self, other);
        Ok(self.derived(&self.matrix - &other.matrix, hint))
    }

    /// Matrix product `self * other`.
    pub fn product(&self, other: &Operator) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        Ok(self.derived(&self.matrix * &other.matrix, None))
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(self.derived(m, None))
    }

    /// Anticommutator `[self, other]_+`.
    pub fn anticommutator(&self, other: &Operator) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let m = &self.matrix * &other.matrix + &other.matrix * &self.matrix;
        Ok(self.derived(m, both_hermitian(self, other)))
    }

    /// Jordan product `(self other + other self) / 2`.
    pub fn jordan(&self, other: &Operator) -> Result<Self> {
        Ok(self.anticommutator(other)?.scale(C64::new(0.5, 0.0)))
    }

    /// Integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = CMatrix::identity(self.space.dim(), self.space.dim());
        for _ in 0..n {
            acc = &acc * &self.matrix;
        }
        self.derived(acc, self.hermitian_hint)
    }

    /// Matrix-vector product on a state's amplitudes.
    pub fn apply(&self, phi: &StateVector) -> Result<CVector> {
        ensure_same(&self.space, phi.space())?;
        Ok(&self.matrix * phi.amplitudes())
    }

    /// Unnormalised expectation `<phi|self|phi>`.
    pub fn sandwich(&self, phi: &StateVector) -> Result<C64> {
        Ok(phi.amplitudes().dotc(&self.apply(phi)?))
    }

    /// Normalised expectation `<phi|self|phi> / <phi|phi>`.
    pub fn expectation(&self, phi: &StateVector) -> Result<C64> {
        Ok(self.sandwich(phi)? / phi.norm_sqr())
    }

    /// Max-entry difference with `other` over the columns of basis states
    /// in the faithful subspace for ladder degree `degree`.
    pub fn faithful_residual(&self, other: &Operator, degree: usize) -> Result<f64> {
        ensure_same(&self.space, &other.space)?;
        let mut worst = 0.0f64;
        for col in self.space.faithful(degree) {
            for row in 0..self.space.dim() {
                worst = worst.max((self.matrix[(row, col)] - other.matrix[(row, col)]).norm());
            }
        }
        Ok(worst)
    }

    /// Best scalar `c` with `self ~ c I` on the faithful subspace for
    /// `degree`, together with the max-entry residual of that fit.
    pub fn scalar_on_faithful(&self, degree: usize) -> (C64, f64) {
        let cols = self.space.faithful(degree);
        if cols.is_empty() {
            return (C64::new(0.0, 0.0), 0.0);
        }
        let c = cols.iter().map(|&k| self.matrix[(k, k)]).sum::<C64>() / cols.len() as f64;
        let mut worst = 0.0f64;
        for &col in &cols {
            for row in 0..self.space.dim() {
                let target = if row == col { c } else { C64::new(0.0, 0.0) };
                worst = worst.max((self.matrix[(row, col)] - target).norm());
            }
        }
        (c, worst)
    }
}

fn both_hermitian(a: &Operator, b: &Operator) -> Option<bool> {
    (a.hermitian_hint == Some(true) && b.hermitian_hint == Some(true)).then_some(true)
}

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, c| acc.max(c.norm()))
}

/// Largest modulus among the entries of a complex vector or matrix.
pub trait MaxModulus {
    fn max_modulus(&self) -> f64;
}

impl MaxModulus for CMatrix {
    fn max_modulus(&self) -> f64 {
        max_abs(self)
    }
}

impl MaxModulus for CVector {
    fn max_modulus(&self) -> f64 {
        self.iter().fold(0.0f64, |acc, c| acc.max(c.norm()))
    }
}

/// Binary (or unary) operation of the operator algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraOp {
    Product,
    Commutator,
    Anticommutator,
    Jordan,
    /// Conjugate transpose of the first operand; the second is ignored.
    Adjoint,
}

/// Applies one operation of the operator algebra.
pub fn op_algebra(a: &Operator, b: &Operator, kind: AlgebraOp) -> Result<Operator> {
    match kind {
        AlgebraOp::Product => a.product(b),
        AlgebraOp::Commutator => a.commutator(b),
        AlgebraOp::Anticommutator => a.anticommutator(b),
        AlgebraOp::Jordan => a.jordan(b),
        AlgebraOp::Adjoint => Ok(a.adjoint()),
    }
}

/// Arithmetic between operators of different spaces panics; use the
/// `try_*` methods for fallible combination.
impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator addition across spaces")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator subtraction across spaces")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.product(rhs).expect("operator product across spaces")
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(dim={})", self.space.dim())
    }
}

/// The coordinate observables of every mode.
#[derive(Debug, Clone)]
pub struct CoordinateOperators {
    space: Space,
    lowering: Vec<Operator>,
    alpha: Vec<Operator>,
    alpha_bar: Vec<Operator>,
    x: Vec<Operator>,
    p: Vec<Operator>,
    number: Vec<Operator>,
    identity: Operator,
}

/// Builds `a_i`, `alpha_i`, `alpha_bar_i`, `x_i`, `p_i`, `N_i` and `I`.
pub fn build_coordinate_operators(space: &Space) -> CoordinateOperators {
    let dim = space.dim();
    let hbar = space.hbar();
    let half = C64::new(0.5, 0.0);
    let mut out = CoordinateOperators {
        space: Arc::clone(space),
        lowering: Vec::new(),
        alpha: Vec::new(),
        alpha_bar: Vec::new(),
        x: Vec::new(),
        p: Vec::new(),
        number: Vec::new(),
        identity: Operator::identity(space),
    };
    for mode in 0..space.modes() {
        let mut a = CMatrix::zeros(dim, dim);
        let mut n = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let nj = space.multi_index(col)[mode];
            n[(col, col)] = C64::new(nj as f64, 0.0);
            if let Some(row) = space.shift(col, mode, -1) {
                a[(row, col)] = C64::new((nj as f64).sqrt(), 0.0);
            }
        }
        let alpha = &a * C64::new((2.0 * hbar).sqrt(), 0.0);
        let alpha_bar = alpha.adjoint();
        let x = (&alpha + &alpha_bar) * half;
        let p = (&alpha - &alpha_bar) * C64::new(0.0, -0.5);
        let wrap = |m: CMatrix, herm: bool| Operator {
            space: Arc::clone(space),
            matrix: m,
            hermitian_hint: Some(herm),
        };
        out.lowering.push(wrap(a, false));
        out.alpha.push(wrap(alpha, false));
        out.alpha_bar.push(wrap(alpha_bar, false));
        out.x.push(wrap(x, true));
        out.p.push(wrap(p, true));
        out.number.push(wrap(n, true));
    }
    out
}

impl CoordinateOperators {
    /// Owning space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.space.modes()
    }

    /// Annihilation operator `a_i` (0-based mode).
    pub fn lowering(&self, mode: usize) -> &Operator {
        &self.lowering[mode]
    }

    /// `alpha_i = x_i + i p_i`.
    pub fn alpha(&self, mode: usize) -> &Operator {
        &self.alpha[mode]
    }

    /// `alpha_bar_i = alpha_i^dagger`.
    pub fn alpha_bar(&self, mode: usize) -> &Operator {
        &self.alpha_bar[mode]
    }

    /// Position `x_i`.
    pub fn x(&self, mode: usize) -> &Operator {
        &self.x[mode]
    }

    /// Momentum `p_i`.
    pub fn p(&self, mode: usize) -> &Operator {
        &self.p[mode]
    }

    /// Number operator `N_i`.
    pub fn number(&self, mode: usize) -> &Operator {
        &self.number[mode]
    }

    /// Identity.
    pub fn identity(&self) -> &Operator {
        &self.identity
    }

    /// All operators keyed by name: `a_1`, `alpha_1`, `alpha_bar_1`, `x_1`,
    /// `p_1`, `N_1`, ... (1-based mode labels) and `I`.
    pub fn named(&self) -> BTreeMap<String, Operator> {
        let mut map = BTreeMap::new();
        for i in 0..self.modes() {
            let k = i + 1;
            map.insert(format!("a_{k}"), self.lowering[i].clone());
            map.insert(format!("alpha_{k}"), self.alpha[i].clone());
            map.insert(format!("alpha_bar_{k}"), self.alpha_bar[i].clone());
            map.insert(format!("x_{k}"), self.x[i].clone());
            map.insert(format!("p_{k}"), self.p[i].clone());
            map.insert(format!("N_{k}"), self.number[i].clone());
        }
        map.insert("I".to_string(), self.identity.clone());
        map
    }

    fn check_ordering_args(&self, mode: usize, a: usize, b: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(Error::InvalidParameter(format!(
                "mode {mode} out of range for {} modes",
                self.modes()
            )));
        }
        if a + b > self.space.cutoff() {
            return Err(Error::Truncation {
                degree: a + b,
                cutoff: self.space.cutoff(),
            });
        }
        Ok(())
    }

    /// Born–Jordan ordered monomial `(1/(a+1)) sum_k x^(a-k) p^b x^k` of
    /// one mode.
    pub fn born_jordan(&self, mode: usize, a: usize, b: usize) -> Result<Operator> {
        self.check_ordering_args(mode, a, b)?;
        let x = &self.x[mode];
        let pb = self.p[mode].pow(b as u32);
        let mut acc = CMatrix::zeros(self.space.dim(), self.space.dim());
        for k in 0..=a {
            acc += x.pow((a - k) as u32).matrix() * pb.matrix() * x.pow(k as u32).matrix();
        }
        Operator::hermitian(&self.space, acc / C64::new((a + 1) as f64, 0.0))
    }

    /// The same ordering summed over momentum insertions,
    /// `(1/(b+1)) sum_k p^k x^a p^(b-k)`; equal to [`Self::born_jordan`] on
    /// the faithful subspace.
    pub fn born_jordan_p_form(&self, mode: usize, a: usize, b: usize) -> Result<Operator> {
        self.check_ordering_args(mode, a, b)?;
        let p = &self.p[mode];
        let xa = self.x[mode].pow(a as u32);
        let mut acc = CMatrix::zeros(self.space.dim(), self.space.dim());
        for k in 0..=b {
            acc += p.pow(k as u32).matrix() * xa.matrix() * p.pow((b - k) as u32).matrix();
        }
        Operator::hermitian(&self.space, acc / C64::new((b + 1) as f64, 0.0))
    }
}
