//! Calculus on the observable algebra with the coordinate observables as
//! noncommutative coordinates.
//!
//! Coordinate derivatives are inner derivations:
//! `d_x = -(1/(i hbar)) [p, .]`, `d_p = (1/(i hbar)) [x, .]`,
//! `d_alpha = -(1/(2 hbar)) [alpha_bar, .]` and
//! `d_alpha_bar = (1/(2 hbar)) [alpha, .]`. The Poisson bracket is
//! `{beta, gamma} = (1/(i hbar)) [beta, gamma]`.
//!
//! [`Poly`] builds operator polynomials as explicitly ordered words in the
//! coordinates, and differentiates them formally: every inner derivation
//! sends a single coordinate letter to a constant, so the derivative of a
//! word is a sum over letter positions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{ensure_same, C64, CoordinateOperators, Operator};

/// A coordinate observable of one mode (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NcCoordinate {
    X(usize),
    P(usize),
    Alpha(usize),
    AlphaBar(usize),
}

impl NcCoordinate {
    /// Mode of the coordinate.
    pub fn mode(self) -> usize {
        match self {
            NcCoordinate::X(m)
            | NcCoordinate::P(m)
            | NcCoordinate::Alpha(m)
            | NcCoordinate::AlphaBar(m) => m,
        }
    }

    /// Operator of the coordinate.
    pub fn operator(self, coords: &CoordinateOperators) -> Result<Operator> {
        check_mode(coords, self.mode())?;
        Ok(match self {
            NcCoordinate::X(m) => coords.x(m).clone(),
            NcCoordinate::P(m) => coords.p(m).clone(),
            NcCoordinate::Alpha(m) => coords.alpha(m).clone(),
            NcCoordinate::AlphaBar(m) => coords.alpha_bar(m).clone(),
        })
    }
}

fn check_mode(coords: &CoordinateOperators, mode: usize) -> Result<()> {
    if mode < coords.modes() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            coords.modes()
        )))
    }
}

/// The derivation `beta -> scale [conjugate, beta]` along one coordinate.
#[derive(Debug, Clone)]
pub struct NcDerivation {
    wrt: NcCoordinate,
    scale: C64,
    conjugate: Operator,
}

impl NcDerivation {
    /// Derivation with respect to `wrt`.
    pub fn new(coords: &CoordinateOperators, wrt: NcCoordinate) -> Result<Self> {
        check_mode(coords, wrt.mode())?;
        let hbar = coords.space().hbar();
        let (scale, conjugate) = match wrt {
            NcCoordinate::X(m) => (C64::new(0.0, 1.0 / hbar), coords.p(m).clone()),
            NcCoordinate::P(m) => (C64::new(0.0, -1.0 / hbar), coords.x(m).clone()),
            NcCoordinate::Alpha(m) => (C64::new(-0.5 / hbar, 0.0), coords.alpha_bar(m).clone()),
            NcCoordinate::AlphaBar(m) => (C64::new(0.5 / hbar, 0.0), coords.alpha(m).clone()),
        };
        Ok(NcDerivation {
            wrt,
            scale,
            conjugate,
        })
    }

    /// Coordinate of the derivation.
    pub fn wrt(&self) -> NcCoordinate {
        self.wrt
    }

    /// Applies the derivation.
    pub fn apply(&self, beta: &Operator) -> Result<Operator> {
        Ok(self.conjugate.commutator(beta)?.scale(self.scale))
    }
}

/// Derivative of `beta` along a coordinate.
pub fn nc_partial(coords: &CoordinateOperators, beta: &Operator, wrt: NcCoordinate) -> Result<Operator> {
    NcDerivation::new(coords, wrt)?.apply(beta)
}

/// Poisson bracket `(1/(i hbar)) [beta, gamma]`.
pub fn nc_poisson(beta: &Operator, gamma: &Operator) -> Result<Operator> {
    let hbar = beta.space().hbar();
    Ok(beta.commutator(gamma)?.scale(C64::new(0.0, -1.0 / hbar)))
}

/// Hamiltonian derivation of `beta` applied to `gamma`,
/// `-(1/(i hbar)) [beta, gamma] = {gamma, beta}`.
pub fn nc_hamiltonian(beta: &Operator, gamma: &Operator) -> Result<Operator> {
    nc_poisson(gamma, beta)
}

/// Index placement of the symplectic tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OmegaVariance {
    Covariant,
    Contravariant,
}

/// Whether an index refers to `alpha` (unbarred) or `alpha_bar` (barred).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bar {
    Holo,
    Anti,
}

/// Constant components of the symplectic tensor in the coordinates
/// `(alpha, alpha_bar)`: `Omega_{i jbar} = (i/2) delta`,
/// `Omega_{ibar j} = -(i/2) delta`, `Omega^{i jbar} = -2i delta`,
/// `Omega^{ibar j} = 2i delta`, zero on equal-bar blocks.
/// Mode indices are 0-based and must be below `modes`.
pub fn omega_components(
    variance: OmegaVariance,
    i: usize,
    j: usize,
    bars: (Bar, Bar),
    modes: usize,
) -> Result<C64> {
    if i >= modes || j >= modes {
        return Err(Error::InvalidParameter(format!(
            "indices ({i}, {j}) out of range for {modes} modes"
        )));
    }
    if i != j {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(match (variance, bars) {
        (OmegaVariance::Covariant, (Bar::Holo, Bar::Anti)) => C64::new(0.0, 0.5),
        (OmegaVariance::Covariant, (Bar::Anti, Bar::Holo)) => C64::new(0.0, -0.5),
        (OmegaVariance::Contravariant, (Bar::Holo, Bar::Anti)) => C64::new(0.0, -2.0),
        (OmegaVariance::Contravariant, (Bar::Anti, Bar::Holo)) => C64::new(0.0, 2.0),
        _ => C64::new(0.0, 0.0),
    })
}

fn coordinate(coords: &CoordinateOperators, i: usize, bar: Bar) -> &Operator {
    match bar {
        Bar::Holo => coords.alpha(i),
        Bar::Anti => coords.alpha_bar(i),
    }
}

/// Component of the symplectic tensor rebuilt from the operator algebra,
/// with the max-entry residual of the scalar fit on the faithful subspace.
///
/// Contravariant components are brackets of the coordinates. Covariant
/// components evaluate the symplectic form on the coordinate vector fields
/// `d_i = (i/2) X_{alpha_bar_i}` and `d_ibar = -(i/2) X_{alpha_i}`, using
/// `Omega(X_beta, X_gamma) = {beta, gamma}`.
pub fn omega_from_brackets(
    coords: &CoordinateOperators,
    variance: OmegaVariance,
    i: usize,
    j: usize,
    bars: (Bar, Bar),
) -> Result<(C64, f64)> {
    check_mode(coords, i)?;
    check_mode(coords, j)?;
    let op = match variance {
        OmegaVariance::Contravariant => {
            nc_poisson(coordinate(coords, i, bars.0), coordinate(coords, j, bars.1))?
        }
        OmegaVariance::Covariant => {
            let generator = |k: usize, bar: Bar| match bar {
                Bar::Holo => (C64::new(0.0, 0.5), coords.alpha_bar(k)),
                Bar::Anti => (C64::new(0.0, -0.5), coords.alpha(k)),
            };
            let (ca, ga) = generator(i, bars.0);
            let (cb, gb) = generator(j, bars.1);
            nc_poisson(ga, gb)?.scale(ca * cb)
        }
    };
    Ok(op.scalar_on_faithful(1))
}

/// Coordinate one-form `d alpha^i` (or `d alpha_bar^i`) evaluated on the
/// Hamiltonian derivation of `beta`: `{alpha^i, beta}`.
pub fn one_form_pairing(
    coords: &CoordinateOperators,
    i: usize,
    bar: Bar,
    beta: &Operator,
) -> Result<Operator> {
    check_mode(coords, i)?;
    nc_hamiltonian(beta, coordinate(coords, i, bar))
}

/// The true bracket of two operators against the "classical" expression
/// `sum_i (d_x beta d_p gamma - d_p beta d_x gamma)`.
#[derive(Debug, Clone)]
pub struct ClassicalFormDeviation {
    pub true_bracket: Operator,
    pub classical_form: Operator,
    pub deviation: Operator,
}

/// Computes the classical-form expression and its deviation.
pub fn classical_form_counterexample(
    coords: &CoordinateOperators,
    beta: &Operator,
    gamma: &Operator,
) -> Result<ClassicalFormDeviation> {
    ensure_same(coords.space(), beta.space())?;
    let true_bracket = nc_poisson(beta, gamma)?;
    let mut classical = Operator::zero(coords.space());
    for m in 0..coords.modes() {
        let bx = nc_partial(coords, beta, NcCoordinate::X(m))?;
        let bp = nc_partial(coords, beta, NcCoordinate::P(m))?;
        let gx = nc_partial(coords, gamma, NcCoordinate::X(m))?;
        let gp = nc_partial(coords, gamma, NcCoordinate::P(m))?;
        classical = classical.try_add(&bx.product(&gp)?.try_sub(&bp.product(&gx)?)?)?;
    }
    let deviation = true_bracket.try_sub(&classical)?;
    Ok(ClassicalFormDeviation {
        true_bracket,
        classical_form: classical,
        deviation,
    })
}

/// Max-entry residual of `(1/(i hbar)) [x^m, p^n] = m n BJ(x^(m-1) p^(n-1))`
/// on the faithful subspace for degree `m + n`, relative to
/// `max(1, largest entry of the bracket)`.
pub fn born_jordan_identity(coords: &CoordinateOperators, mode: usize, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("exponents must be at least 1".into()));
    }
    if m + n > coords.space().cutoff() {
        return Err(Error::Truncation {
            degree: m + n,
            cutoff: coords.space().cutoff(),
        });
    }
    check_mode(coords, mode)?;
    let lhs = nc_poisson(&coords.x(mode).pow(m as u32), &coords.p(mode).pow(n as u32))?;
    let rhs = coords
        .born_jordan(mode, m - 1, n - 1)?
        .scale(C64::new((m * n) as f64, 0.0));
    let scale = lhs.max_abs().max(1.0);
    Ok(lhs.faithful_residual(&rhs, m + n)? / scale)
}

/// One letter of an ordered operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    X(usize),
    P(usize),
    Alpha(usize),
    AlphaBar(usize),
}

impl Letter {
    fn mode(self) -> usize {
        match self {
            Letter::X(m) | Letter::P(m) | Letter::Alpha(m) | Letter::AlphaBar(m) => m,
        }
    }

    /// Constant value of a coordinate derivation on this letter.
    fn derivative(self, wrt: NcCoordinate) -> C64 {
        if self.mode() != wrt.mode() {
            return C64::new(0.0, 0.0);
        }
        let (re, im) = match (wrt, self) {
            (NcCoordinate::X(_), Letter::X(_)) => (1.0, 0.0),
            (NcCoordinate::X(_), Letter::P(_)) => (0.0, 0.0),
            (NcCoordinate::X(_), Letter::Alpha(_)) => (1.0, 0.0),
            (NcCoordinate::X(_), Letter::AlphaBar(_)) => (1.0, 0.0),
            (NcCoordinate::P(_), Letter::X(_)) => (0.0, 0.0),
            (NcCoordinate::P(_), Letter::P(_)) => (1.0, 0.0),
            (NcCoordinate::P(_), Letter::Alpha(_)) => (0.0, 1.0),
            (NcCoordinate::P(_), Letter::AlphaBar(_)) => (0.0, -1.0),
            (NcCoordinate::Alpha(_), Letter::X(_)) => (0.5, 0.0),
            (NcCoordinate::Alpha(_), Letter::P(_)) => (0.0, -0.5),
            (NcCoordinate::Alpha(_), Letter::Alpha(_)) => (1.0, 0.0),
            (NcCoordinate::Alpha(_), Letter::AlphaBar(_)) => (0.0, 0.0),
            (NcCoordinate::AlphaBar(_), Letter::X(_)) => (0.5, 0.0),
            (NcCoordinate::AlphaBar(_), Letter::P(_)) => (0.0, 0.5),
            (NcCoordinate::AlphaBar(_), Letter::Alpha(_)) => (0.0, 0.0),
            (NcCoordinate::AlphaBar(_), Letter::AlphaBar(_)) => (1.0, 0.0),
        };
        C64::new(re, im)
    }
}

/// Operator polynomial as a sum of coefficient-weighted ordered words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: Vec<(C64, Vec<Letter>)>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly::default()
    }

    /// A constant multiple of the identity.
    pub fn constant(c: C64) -> Self {
        Poly {
            terms: vec![(c, Vec::new())],
        }
    }

    /// A single letter.
    pub fn letter(l: Letter) -> Self {
        Poly {
            terms: vec![(C64::new(1.0, 0.0), vec![l])],
        }
    }

    /// `x_mode`.
    pub fn x(mode: usize) -> Self {
        Self::letter(Letter::X(mode))
    }

    /// `p_mode`.
    pub fn p(mode: usize) -> Self {
        Self::letter(Letter::P(mode))
    }

    /// `alpha_mode`.
    pub fn alpha(mode: usize) -> Self {
        Self::letter(Letter::Alpha(mode))
    }

    /// `alpha_bar_mode`.
    pub fn alpha_bar(mode: usize) -> Self {
        Self::letter(Letter::AlphaBar(mode))
    }

    /// Terms of the polynomial.
    pub fn terms(&self) -> &[(C64, Vec<Letter>)] {
        &self.terms
    }

    /// Sum.
    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly { terms }
    }

    /// Difference.
    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Constant multiple.
    pub fn scale(&self, c: C64) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, w)| (k * c, w.clone())).collect(),
        }
    }

    /// Ordered product `self * other` (words are concatenated).
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                terms.push((a * b, w));
            }
        }
        Poly { terms }
    }

    /// Integer power.
    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(C64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// Longest word length (ladder degree).
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    /// Matrix of the polynomial.
    pub fn to_operator(&self, coords: &CoordinateOperators) -> Result<Operator> {
        let mut acc = Operator::zero(coords.space());
        for (c, word) in &self.terms {
            let mut m = coords.identity().clone();
            for l in word {
                check_mode(coords, l.mode())?;
                let op = match *l {
                    Letter::X(k) => coords.x(k),
                    Letter::P(k) => coords.p(k),
                    Letter::Alpha(k) => coords.alpha(k),
                    Letter::AlphaBar(k) => coords.alpha_bar(k),
                };
                m = m.product(op)?;
            }
            acc = acc.try_add(&m.scale(*c))?;
        }
        Ok(acc)
    }

    /// Formal derivative: each letter in turn is replaced by the constant
    /// value of the derivation on it.
    pub fn formal_partial(&self, wrt: NcCoordinate) -> Poly {
        let mut terms = Vec::new();
        for (c, word) in &self.terms {
            for (pos, l) in word.iter().enumerate() {
                let d = l.derivative(wrt);
                if d != C64::new(0.0, 0.0) {
                    let mut w = word.clone();
                    w.remove(pos);
                    terms.push((c * d, w));
                }
            }
        }
        Poly { terms }
    }

    /// Random polynomial with `terms` words of length `1..=max_degree`
    /// over the letters of `modes` modes, with Gaussian-like coefficients.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, modes: usize, max_degree: usize, terms: usize) -> Poly {
        let mut out = Vec::with_capacity(terms);
        for _ in 0..terms {
            let len = rng.random_range(1..=max_degree.max(1));
            let word = (0..len)
                .map(|_| {
                    let m = rng.random_range(0..modes);
                    match rng.random_range(0..4) {
                        0 => Letter::X(m),
                        1 => Letter::P(m),
                        2 => Letter::Alpha(m),
                        _ => Letter::AlphaBar(m),
                    }
                })
                .collect();
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            out.push((c, word));
        }
        Poly { terms: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_coordinate_operators, c64, FockSpace};

    fn coords(d: usize, n: usize, hbar: f64) -> CoordinateOperators {
        build_coordinate_operators(&FockSpace::new(d, n, hbar).unwrap())
    }

    #[test]
    fn coordinate_derivatives_of_coordinates() {
        let c = coords(2, 4, 0.7);
        for i in 0..2 {
            for j in 0..2 {
                let d = nc_partial(&c, c.alpha(j), NcCoordinate::Alpha(i)).unwrap();
                let (s, r) = d.scalar_on_faithful(1);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s - c64(expected, 0.0)).norm() < 1e-13 && r < 1e-13);
            }
        }
        let x2 = c.x(0).pow(2);
        let d = nc_partial(&c, &x2, NcCoordinate::X(0)).unwrap();
        assert!(d.faithful_residual(&c.x(0).scale(c64(2.0, 0.0)), 2).unwrap() < 1e-13);
        let d = nc_partial(&c, c.x(0), NcCoordinate::P(0)).unwrap();
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn omega_constants_and_range() {
        use Bar::*;
        assert_eq!(omega_components(OmegaVariance::Covariant, 0, 0, (Holo, Anti), 1).unwrap(), c64(0.0, 0.5));
        assert_eq!(omega_components(OmegaVariance::Contravariant, 1, 1, (Anti, Holo), 2).unwrap(), c64(0.0, 2.0));
        assert_eq!(omega_components(OmegaVariance::Contravariant, 0, 0, (Holo, Holo), 1).unwrap(), c64(0.0, 0.0));
        assert!(omega_components(OmegaVariance::Covariant, 2, 0, (Holo, Anti), 2).is_err());
    }

    #[test]
    fn omega_matches_brackets() {
        use Bar::*;
        let c = coords(2, 4, 1.3);
        for var in [OmegaVariance::Covariant, OmegaVariance::Contravariant] {
            for bars in [(Holo, Holo), (Holo, Anti), (Anti, Holo), (Anti, Anti)] {
                for i in 0..2 {
                    for j in 0..2 {
                        let (s, r) = omega_from_brackets(&c, var, i, j, bars).unwrap();
                        let k = omega_components(var, i, j, bars, 2).unwrap();
                        assert!((s - k).norm() < 1e-13 && r < 1e-13, "{var:?} {bars:?} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn classical_form_fails_for_squares() {
        let c = coords(1, 8, 0.9);
        let dev = classical_form_counterexample(&c, &c.x(0).pow(2), &c.p(0).pow(2)).unwrap();
        let target = c.identity().scale(c64(0.0, -2.0 * 0.9));
        assert!(dev.deviation.faithful_residual(&target, 4).unwrap() < 1e-12);
        let lin = classical_form_counterexample(&c, c.x(0), c.p(0)).unwrap();
        assert!(lin.true_bracket.faithful_residual(&lin.classical_form, 2).unwrap() < 1e-13);
    }

    #[test]
    fn formal_derivative_matches_commutator() {
        let c = coords(1, 10, 1.0);
        let poly = Poly::x(0).mul(&Poly::p(0)).mul(&Poly::alpha(0)).add(&Poly::alpha_bar(0).pow(2));
        for wrt in [NcCoordinate::X(0), NcCoordinate::P(0), NcCoordinate::Alpha(0), NcCoordinate::AlphaBar(0)] {
            let formal = poly.formal_partial(wrt).to_operator(&c).unwrap();
            let exact = nc_partial(&c, &poly.to_operator(&c).unwrap(), wrt).unwrap();
            assert!(formal.faithful_residual(&exact, poly.degree() + 1).unwrap() < 1e-11, "{wrt:?}");
        }
    }

    #[test]
    fn born_jordan_bracket_identity() {
        let c = coords(1, 16, 1.0);
        for m in 1..=4 {
            for n in 1..=4 {
                assert!(born_jordan_identity(&c, 0, m, n).unwrap() < 1e-12, "{m} {n}");
            }
        }
        assert!(born_jordan_identity(&coords(1, 4, 1.0), 0, 3, 3).is_err());
    }
}
