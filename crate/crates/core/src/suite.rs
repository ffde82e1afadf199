//! Seeded verification suite behind the `verify` command.
//!
//! Every entry evaluates one identity over random inputs and reports its
//! largest residual. Entries carry a fixed position in [`ENTRIES`]; the
//! random generator of an entry is seeded with `seed + position`, so a
//! report depends only on the configuration, whichever suite subset is
//! selected and however many threads run it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{explicit_alpha_fields, hamiltonian_field, xhf_decomposition, FieldKind, Ladder};
use crate::flow::{harmonic_hamiltonian, heisenberg_check, integrate, Integrator};
use crate::fock::{
    build_coordinate_operators, max_abs, CVector, CoordinateOperators, C64, FockSpace, Space, StateVector,
};
use crate::geometry::{
    christoffel, christoffel_fd, covariant_derivative_check, fs_distance, killing_reduce, metric,
    projected_derivative_fd, MetricPicture, Variance,
};
use crate::kahler::{
    bracket, covariance_and_uncertainty, eval, eval_f, kahler_product, relative_scale, BracketKind, Picture,
};
use crate::nc::{
    born_jordan_identity, classical_form_counterexample, nc_partial, nc_poisson, omega_components,
    omega_from_brackets, Bar, NcCoordinate, OmegaVariance, Poly,
};
use crate::pullback::{
    jacobian, metric_pullback_failure, omega_pullback, one_form_consistency, pairing_pullback, picture_scale,
    project_to_sphere_tangent, table_consistency,
};
use crate::reconstruct::{
    forward_direct, forward_recursive, reconstruct_direct, reconstruct_recursive, ray_distance, recursion_condition,
};
use crate::{numdiff, random};

/// Parameters of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Number of modes `d`.
    pub modes: usize,
    /// Per-mode occupation cutoff.
    pub cutoff: usize,
    pub hbar: f64,
    pub seed: u64,
    /// Random cases per entry.
    pub cases: usize,
    /// Threshold of the entries whose identities hold to rounding error.
    pub tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            modes: 1,
            cutoff: 8,
            hbar: 1.0,
            seed: 42,
            cases: 100,
            tolerance: 1e-10,
        }
    }
}

impl SuiteConfig {
    /// Rejects parameters outside the supported ranges.
    pub fn validate(&self) -> Result<()> {
        FockSpace::new(self.modes, self.cutoff, self.hbar)?;
        if self.cases == 0 {
            return Err(Error::InvalidParameter("cases must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Outcome of one entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// A negative control whose deviation exceeds its threshold as expected.
    #[serde(rename = "EXPECTED-NONZERO")]
    ExpectedNonzero,
}

impl Status {
    /// Label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedNonzero => "EXPECTED-NONZERO",
        }
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    /// The identity being checked.
    pub paper_ref: String,
    /// Largest residual (or, for negative controls, the deviation);
    /// `null` when the entry raised an error.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A full verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: SuiteConfig,
    pub entries: Vec<Entry>,
}

impl Report {
    /// True when no entry failed.
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    /// Entries with status FAIL.
    pub fn failures(&self) -> Vec<&Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail).collect()
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV with columns `suite,name,paper_ref,residual,threshold,status`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["suite", "name", "paper_ref", "residual", "threshold", "status"])
            .map_err(io)?;
        for e in &self.entries {
            let residual = e.residual.map_or_else(|| "".to_string(), |r| format!("{r:e}"));
            w.write_record([
                self.suite.as_str(),
                &e.name,
                &e.paper_ref,
                &residual,
                &format!("{:e}", e.threshold),
                e.status.label(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// How an entry's residual is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Expect {
    /// Passes when `residual <= threshold`.
    AtMost(f64),
    /// Passes when `residual <= tolerance` from the configuration.
    AtMostTolerance,
    /// Negative control: expected when `residual > threshold`.
    Exceeds(f64),
}

struct Ctx {
    cfg: SuiteConfig,
    space: Space,
    coords: CoordinateOperators,
}

impl Ctx {
    /// Support for random states that keeps products of two ladder
    /// operators faithful.
    fn support(&self) -> usize {
        self.cfg.cutoff.saturating_sub(2)
    }

    fn state(&self, rng: &mut ChaCha8Rng) -> StateVector {
        random::state(&self.space, rng, self.support())
    }

    fn unit_state(&self, rng: &mut ChaCha8Rng) -> StateVector {
        self.state(rng).with_norm_sqr(1.0).expect("positive norm")
    }
}

type Check = fn(&Ctx, &mut ChaCha8Rng) -> Result<f64>;

struct Spec {
    group: &'static str,
    name: &'static str,
    identity: &'static str,
    expect: Expect,
    run: Check,
}

/// Names of the selectable suites; `all` runs every entry.
pub const SUITES: [&str; 9] = [
    "all",
    "kahler-functions",
    "geometry",
    "hamiltonian-fields",
    "nc-calculus",
    "pullback",
    "flow",
    "reconstruct",
    "negative-controls",
];

const ENTRIES: &[Spec] = &[
    Spec { group: "kahler-functions", name: "product-hilbert", identity: "hbar dH_b G^{-1} dbarH_g = H_(b g)", expect: Expect::AtMostTolerance, run: product_hilbert },
    Spec { group: "kahler-functions", name: "product-homogeneous", identity: "f_b f_g + hbar df_b g^{-1} dbarf_g = f_(b g), homogeneous coordinates", expect: Expect::AtMostTolerance, run: product_homogeneous },
    Spec { group: "kahler-functions", name: "product-affine", identity: "f_b f_g + hbar df_b g^{-1} dbarf_g = f_(b g), affine chart", expect: Expect::AtMostTolerance, run: product_affine },
    Spec { group: "kahler-functions", name: "poisson", identity: "{F_b, F_g} = (1/i hbar) F_[b,g] in every picture", expect: Expect::AtMostTolerance, run: poisson },
    Spec { group: "kahler-functions", name: "riemann", identity: "{F_b, F_g}_g = (1/hbar) F_[b,g]+ (- (2/hbar) f_b f_g projectively)", expect: Expect::AtMostTolerance, run: riemann },
    Spec { group: "kahler-functions", name: "splitting", identity: "F_b * F_g = F_(b o g) + (i hbar/2) {F_b, F_g}", expect: Expect::AtMost(1e-12), run: splitting },
    Spec { group: "kahler-functions", name: "uncertainty", identity: "(Db)^2 (Dg)^2 >= ((hbar/2){f_b,f_g})^2 + ((hbar/2){f_b,f_g}_g)^2", expect: Expect::AtMostTolerance, run: uncertainty },
    Spec { group: "kahler-functions", name: "uncertainty-saturation", identity: "equality for (x, p) at the ground state", expect: Expect::AtMost(1e-12), run: uncertainty_saturation },
    Spec { group: "geometry", name: "fs-orthogonal", identity: "d_FS(orthogonal states) = pi sqrt(hbar/2)", expect: Expect::AtMost(1e-12), run: fs_orthogonal },
    Spec { group: "geometry", name: "fs-triangle", identity: "d_FS(a,c) <= d_FS(a,b) + d_FS(b,c)", expect: Expect::AtMost(1e-12), run: fs_triangle },
    Spec { group: "geometry", name: "killing-reduction", identity: "conformal tensor minus vertical Killing terms = Fubini-Study tensor", expect: Expect::AtMost(1e-12), run: killing_reduction },
    Spec { group: "geometry", name: "projector-idempotent", identity: "mixed Fubini-Study tensor P satisfies P P = P", expect: Expect::AtMost(1e-12), run: projector_idempotent },
    Spec { group: "geometry", name: "christoffel-fd", identity: "closed-form Christoffel symbols = Levi-Civita from metric derivatives", expect: Expect::AtMost(1e-6), run: christoffel_check },
    Spec { group: "geometry", name: "covariant-derivative", identity: "projected nabla_l zeta_obar = -i d_l dbar_o f_b (analytic)", expect: Expect::AtMostTolerance, run: covariant_analytic },
    Spec { group: "geometry", name: "covariant-derivative-fd", identity: "projected d_l zeta_obar = -i d_l dbar_o f_b (finite differences)", expect: Expect::AtMost(1e-6), run: covariant_fd },
    Spec { group: "hamiltonian-fields", name: "explicit-alpha-fields", identity: "closed-form alpha, alpha_bar fields = omega-contraction of gradients", expect: Expect::AtMost(1e-12), run: explicit_fields },
    Spec { group: "hamiltonian-fields", name: "xhf-decomposition", identity: "X_H = X_f + (f/2hbar) X_(r^2)", expect: Expect::AtMostTolerance, run: xhf },
    Spec { group: "hamiltonian-fields", name: "theta-component", identity: "d theta (X_f) from components = closed form = chart form", expect: Expect::AtMostTolerance, run: theta },
    Spec { group: "nc-calculus", name: "omega-components", identity: "Omega^{i jbar} = -2i delta, Omega_{i jbar} = (i/2) delta from brackets", expect: Expect::AtMostTolerance, run: omega_nc },
    Spec { group: "nc-calculus", name: "poisson-consistency", identity: "f_{(1/i hbar)[b,g]} = {f_b, f_g}", expect: Expect::AtMostTolerance, run: nc_consistency },
    Spec { group: "nc-calculus", name: "born-jordan", identity: "(1/i hbar)[x^m, p^n] = m n BJ(x^(m-1) p^(n-1))", expect: Expect::AtMost(1e-12), run: born_jordan },
    Spec { group: "nc-calculus", name: "formal-derivative", identity: "formal word derivative = inner derivation", expect: Expect::AtMostTolerance, run: formal_derivative },
    Spec { group: "pullback", name: "left-inverse", identity: "Jinv J = delta (|z|^2/2hbar delta on the Hilbert space)", expect: Expect::AtMostTolerance, run: left_inverse },
    Spec { group: "pullback", name: "omega-pullback", identity: "f*(Omega_{i jbar}) = (i/2) delta, f*(Omega^{jbar i}) = 2i delta", expect: Expect::AtMostTolerance, run: omega_pull },
    Spec { group: "pullback", name: "pairings", identity: "<df_alpha, X_alpha_bar> = -2i delta, Hilbert (-i|z|^2/hbar) delta", expect: Expect::AtMostTolerance, run: pairings },
    Spec { group: "pullback", name: "table-consistency", identity: "Hilbert, homogeneous and affine pictures agree on |z|^2 = 2 hbar", expect: Expect::AtMostTolerance, run: table },
    Spec { group: "pullback", name: "one-form", identity: "dH_b = H_db = df_b on |z|^2 = 2 hbar for tangent displacements", expect: Expect::AtMostTolerance, run: one_form },
    Spec { group: "pullback", name: "metric-sandwich", identity: "(1/4){f_alpha_bar, f_alpha}_g = g(Jinv_i, Jinv_jbar)", expect: Expect::AtMostTolerance, run: metric_sandwich },
    Spec { group: "flow", name: "harmonic-phases", identity: "z^n(t) = exp(-i omega (n + 1/2) t) z^n(0) over one period", expect: Expect::AtMost(1e-8), run: harmonic },
    Spec { group: "flow", name: "rk4-vs-propagator", identity: "Runge-Kutta flow = exp(-i H t/hbar), random 6-level H", expect: Expect::AtMost(1e-6), run: rk4_exact },
    Spec { group: "flow", name: "heisenberg", identity: "d H_K/dt = (1/2i hbar^2) <[K, H]>", expect: Expect::AtMost(1e-6), run: heisenberg },
    Spec { group: "reconstruct", name: "direct-round-trip", identity: "z from Hilbert covector of alpha_bar_j", expect: Expect::AtMostTolerance, run: direct },
    Spec { group: "reconstruct", name: "recursive-round-trip", identity: "z from homogeneous covector of alpha_bar_j and f_alpha_bar_j", expect: Expect::AtMostTolerance, run: recursive },
    Spec { group: "reconstruct", name: "recursive-data-round-trip", identity: "forward(reconstruct(data)) = data for the homogeneous covector", expect: Expect::AtMostTolerance, run: recursive_data },
    Spec { group: "reconstruct", name: "recursive-conditioning", identity: "recursive state and data round-trip errors / (condition number * machine epsilon)", expect: Expect::AtMost(1.0), run: recursive_conditioning },
    Spec { group: "reconstruct", name: "singular-seed", identity: "recursion refused exactly when f_alpha_bar_j = 0", expect: Expect::AtMost(0.0), run: singular_seed },
    Spec { group: "negative-controls", name: "classical-form", identity: "{x^2, p^2} - classical form = -2i hbar I", expect: Expect::AtMost(1e-12), run: classical_form },
    Spec { group: "negative-controls", name: "classical-form-deviation", identity: "|{x^2, p^2} - classical form| is nonzero", expect: Expect::Exceeds(1e-3), run: classical_form_deviation },
    Spec { group: "negative-controls", name: "metric-pullback", identity: "Riemann-bracket metric candidates compose to delta (5th percentile of |C - delta|)", expect: Expect::Exceeds(1e-3), run: metric_failure },
    Spec { group: "negative-controls", name: "metric-routes", identity: "Hilbert and affine metric candidates agree (5th percentile of the gap)", expect: Expect::Exceeds(1e-3), run: metric_routes },
    Spec { group: "negative-controls", name: "non-holomorphy", identity: "dbar f_alpha vanishes (smallest max |J_[nbar]^i|)", expect: Expect::Exceeds(1e-3), run: non_holomorphy },
];

/// Entry names of a suite, in report order.
pub fn entry_names(suite: &str) -> Result<Vec<String>> {
    let mut names: Vec<String> = selected(suite)?
        .map(|(_, s)| format!("{}/{}", s.group, s.name))
        .collect();
    names.sort();
    Ok(names)
}

fn selected(suite: &str) -> Result<impl Iterator<Item = (usize, &'static Spec)> + '_> {
    if !SUITES.contains(&suite) {
        return Err(Error::InvalidParameter(format!(
            "unknown suite '{suite}', expected one of {}",
            SUITES.join(", ")
        )));
    }
    Ok(ENTRIES
        .iter()
        .enumerate()
        .filter(move |(_, s)| suite == "all" || s.group == suite))
}

/// Runs the entries of `suite` concurrently and assembles the report in
/// name order.
pub fn run_suite(suite: &str, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let space = FockSpace::new(cfg.modes, cfg.cutoff, cfg.hbar)?;
    let ctx = Ctx {
        cfg: cfg.clone(),
        coords: build_coordinate_operators(&space),
        space,
    };
    let specs: Vec<(usize, &Spec)> = selected(suite)?.collect();
    let mut entries: Vec<Entry> = specs
        .par_iter()
        .map(|&(index, spec)| run_entry(&ctx, index, spec))
        .collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        suite: suite.to_string(),
        config: cfg.clone(),
        entries,
    })
}

fn run_entry(ctx: &Ctx, index: usize, spec: &Spec) -> Entry {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed.wrapping_add(index as u64));
    let outcome = (spec.run)(ctx, &mut rng);
    let threshold = match spec.expect {
        Expect::AtMost(t) | Expect::Exceeds(t) => t,
        Expect::AtMostTolerance => ctx.cfg.tolerance,
    };
    let (residual, status, error) = match outcome {
        Ok(r) => {
            let ok = match spec.expect {
                Expect::Exceeds(_) => r > threshold,
                _ => r <= threshold,
            };
            let status = match (ok, spec.expect) {
                (false, _) => Status::Fail,
                (true, Expect::Exceeds(_)) => Status::ExpectedNonzero,
                (true, _) => Status::Pass,
            };
            (Some(r), status, None)
        }
        Err(e) => (None, Status::Fail, Some(e.to_string())),
    };
    Entry {
        name: format!("{}/{}", spec.group, spec.name),
        paper_ref: spec.identity.to_string(),
        residual,
        threshold,
        status,
        error,
    }
}

fn max_over<F>(ctx: &Ctx, rng: &mut ChaCha8Rng, cases: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&Ctx, &mut ChaCha8Rng) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let r = f(ctx, rng)?;
        if r.is_nan() {
            return Err(Error::InvalidParameter("residual is NaN".into()));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

fn percentile_low(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 20]
}

fn product_case(ctx: &Ctx, rng: &mut ChaCha8Rng, picture: Picture) -> Result<f64> {
    let b = random::operator(&ctx.space, rng);
    let g = random::operator(&ctx.space, rng);
    let phi = ctx.state(rng);
    let lhs = kahler_product(&b, &g, &phi, picture)?;
    let rhs = eval(&b.product(&g)?, &phi, picture)?.value;
    Ok((lhs - rhs).norm() / relative_scale(rhs, &b, &g))
}

fn product_hilbert(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| product_case(c, r, Picture::Hilbert))
}

fn product_homogeneous(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| product_case(c, r, Picture::Homogeneous))
}

fn product_affine(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| product_case(c, r, Picture::Affine))
}

fn bracket_case(ctx: &Ctx, rng: &mut ChaCha8Rng, kind: BracketKind) -> Result<f64> {
    let b = random::operator(&ctx.space, rng);
    let g = random::operator(&ctx.space, rng);
    let phi = ctx.state(rng);
    let mut worst = 0.0f64;
    for p in Picture::ALL {
        let v = bracket(&b, &g, &phi, kind, p)?;
        worst = worst.max(v.residual() / relative_scale(v.algebraic, &b, &g));
    }
    Ok(worst)
}

fn poisson(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| bracket_case(c, r, BracketKind::Poisson))
}

fn riemann(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| bracket_case(c, r, BracketKind::Riemann))
}

fn splitting(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let b = random::operator(&c.space, r);
        let g = random::operator(&c.space, r);
        let phi = c.state(r);
        let mut worst = 0.0f64;
        for p in Picture::ALL {
            let product = kahler_product(&b, &g, &phi, p)?;
            let jordan = bracket(&b, &g, &phi, BracketKind::Jordan, p)?.geometric;
            let pb = bracket(&b, &g, &phi, BracketKind::Poisson, p)?.geometric;
            let split = jordan + C64::new(0.0, c.cfg.hbar / 2.0) * pb;
            worst = worst.max((product - split).norm() / relative_scale(product, &b, &g));
        }
        Ok(worst)
    })
}

fn uncertainty(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, 2 * ctx.cfg.cases, |c, r| {
        let b = random::hermitian(&c.space, r);
        let g = random::hermitian(&c.space, r);
        let phi = random::state(&c.space, r, c.cfg.cutoff);
        let u = covariance_and_uncertainty(&b, &g, &phi)?;
        Ok((u.rhs - u.lhs).max(0.0) / u.lhs.max(1.0))
    })
}

fn uncertainty_saturation(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<f64> {
    let ground = StateVector::basis(&ctx.space, &vec![0; ctx.cfg.modes])?;
    let mut worst = 0.0f64;
    for m in 0..ctx.cfg.modes {
        let u = covariance_and_uncertainty(ctx.coords.x(m), ctx.coords.p(m), &ground)?;
        worst = worst.max((u.lhs - u.rhs).abs());
    }
    Ok(worst)
}

fn fs_orthogonal(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let target = PI * (ctx.cfg.hbar / 2.0).sqrt();
    let dim = ctx.space.dim();
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let a = r.random_range(0..dim);
        let b = (a + r.random_range(1..dim)) % dim;
        let scale_a = C64::new(r.random_range(0.1..3.0), r.random_range(-1.0..1.0));
        let scale_b = C64::new(r.random_range(0.1..3.0), r.random_range(-1.0..1.0));
        let pa = StateVector::basis(&c.space, c.space.multi_index(a))?.scaled(scale_a)?;
        let pb = StateVector::basis(&c.space, c.space.multi_index(b))?.scaled(scale_b)?;
        Ok((fs_distance(&pa, &pb)? - target).abs())
    })
}

fn fs_triangle(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, 10 * ctx.cfg.cases, |c, r| {
        let a = random::state(&c.space, r, c.cfg.cutoff);
        let b = random::state(&c.space, r, c.cfg.cutoff);
        let d = random::state(&c.space, r, c.cfg.cutoff);
        Ok((fs_distance(&a, &d)? - fs_distance(&a, &b)? - fs_distance(&b, &d)?).max(0.0))
    })
}

fn killing_reduction(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = c.state(r);
        let mut worst = 0.0f64;
        for v in [Variance::Covariant, Variance::Contravariant, Variance::Mixed] {
            let reduced = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, v)?, &phi)?;
            let closed = metric(MetricPicture::Homogeneous, &phi, v)?;
            let scale = max_abs(closed.block()).max(1.0);
            worst = worst.max(max_abs(&(reduced.block() - closed.block())) / scale);
        }
        Ok(worst)
    })
}

fn projector_idempotent(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = c.state(r);
        let reduced = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, Variance::Mixed)?, &phi)?;
        let p = reduced.block();
        Ok(max_abs(&(p * p - p)))
    })
}

fn christoffel_check(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(10), |c, r| {
        let phi = c.state(r).with_norm_sqr(1.0)?;
        let fd = christoffel_fd(&phi, numdiff::default_step(phi.amplitudes()))?;
        Ok(christoffel(&phi).max_difference(&fd))
    })
}

fn covariant_analytic(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(20), |c, r| {
        let b = random::hermitian(&c.space, r);
        let phi = c.unit_state(r);
        Ok(covariant_derivative_check(&b, &phi)?.max_residual() / b.norm().max(1.0))
    })
}

fn covariant_fd(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(10), |c, r| {
        let b = random::hermitian(&c.space, r);
        let phi = c.unit_state(r);
        let check = covariant_derivative_check(&b, &phi)?;
        let fd = projected_derivative_fd(&b, &phi, numdiff::default_step(phi.amplitudes()))?;
        Ok(max_abs(&(fd - &check.rhs)) / b.norm().max(1.0))
    })
}

fn explicit_fields(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(20), |c, r| {
        let phi = c.state(r);
        let mut worst = 0.0f64;
        for m in 0..c.cfg.modes {
            for (ladder, op) in [(Ladder::Alpha, c.coords.alpha(m)), (Ladder::AlphaBar, c.coords.alpha_bar(m))] {
                for p in Picture::ALL {
                    for kind in [FieldKind::Vector, FieldKind::Covector] {
                        let closed = explicit_alpha_fields(m, ladder, &phi, p, kind)?;
                        let generic = hamiltonian_field(op, &phi, p, kind)?;
                        let scale = generic.max_abs().max(1.0);
                        worst = worst.max(closed.max_difference(&generic)? / scale);
                    }
                }
            }
        }
        Ok(worst)
    })
}

fn xhf(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let b = random::hermitian(&c.space, r);
        let phi = c.state(r);
        Ok(xhf_decomposition(&b, &phi)?.decomposition_residual / b.norm().max(1.0))
    })
}

fn theta(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let b = random::hermitian(&c.space, r);
        let phi = c.state(r);
        let x = xhf_decomposition(&b, &phi)?;
        Ok(x.theta_residual.max(x.affine_residual) / b.norm().max(1.0))
    })
}

fn omega_nc(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = ctx.cfg.modes;
    let mut worst = 0.0f64;
    for var in [OmegaVariance::Covariant, OmegaVariance::Contravariant] {
        for bars in [(Bar::Holo, Bar::Holo), (Bar::Holo, Bar::Anti), (Bar::Anti, Bar::Holo), (Bar::Anti, Bar::Anti)] {
            for i in 0..d {
                for j in 0..d {
                    let (s, fit) = omega_from_brackets(&ctx.coords, var, i, j, bars)?;
                    let k = omega_components(var, i, j, bars, d)?;
                    worst = worst.max((s - k).norm()).max(fit);
                }
            }
        }
    }
    Ok(worst)
}

fn nc_consistency(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let b = random::operator(&c.space, r);
        let g = random::operator(&c.space, r);
        let phi = c.state(r);
        let lhs = eval_f(&nc_poisson(&b, &g)?, &phi)?.value;
        let rhs = bracket(&b, &g, &phi, BracketKind::Poisson, Picture::Homogeneous)?.geometric;
        Ok((lhs - rhs).norm() / relative_scale(rhs, &b, &g))
    })
}

fn born_jordan(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<f64> {
    let space = FockSpace::new(1, 16, ctx.cfg.hbar)?;
    let coords = build_coordinate_operators(&space);
    let mut worst = 0.0f64;
    for m in 1..=4 {
        for n in 1..=4 {
            worst = worst.max(born_jordan_identity(&coords, 0, m, n)?);
        }
    }
    Ok(worst)
}

fn formal_derivative(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let max_degree = ctx.cfg.cutoff.saturating_sub(1).clamp(1, 3);
    max_over(ctx, rng, ctx.cfg.cases.min(20), |c, r| {
        let poly = Poly::random(r, c.cfg.modes, max_degree, 4);
        let op = poly.to_operator(&c.coords)?;
        let mut worst = 0.0f64;
        for m in 0..c.cfg.modes {
            for wrt in [NcCoordinate::X(m), NcCoordinate::P(m), NcCoordinate::Alpha(m), NcCoordinate::AlphaBar(m)] {
                let formal = poly.formal_partial(wrt).to_operator(&c.coords)?;
                let exact = nc_partial(&c.coords, &op, wrt)?;
                let res = formal.faithful_residual(&exact, poly.degree() + 1)?;
                worst = worst.max(res / op.max_abs().max(1.0));
            }
        }
        Ok(worst)
    })
}

fn pullback_state(ctx: &Ctx, rng: &mut ChaCha8Rng) -> StateVector {
    random::state(&ctx.space, rng, ctx.cfg.cutoff - 1)
}

fn left_inverse(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = pullback_state(c, r);
        let mut worst = 0.0f64;
        for p in Picture::ALL {
            let j = jacobian(&phi, p)?;
            worst = worst.max(j.left_inverse_residual() / picture_scale(p, &phi).max(1.0));
        }
        Ok(worst)
    })
}

fn omega_pull(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = pullback_state(c, r);
        let mut worst = 0.0f64;
        for p in Picture::ALL {
            let o = omega_pullback(&phi, p)?;
            worst = worst.max(o.residual() / o.scale.max(1.0));
        }
        Ok(worst)
    })
}

fn pairings(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = pullback_state(c, r);
        let t = pairing_pullback(&phi)?;
        Ok(t.residual() / (phi.norm_sqr() / c.cfg.hbar).max(1.0))
    })
}

fn table(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(20), |c, r| {
        let phi = c.state(r);
        Ok(table_consistency(&c.coords, &phi)?
            .iter()
            .map(|row| row.spread())
            .fold(0.0, f64::max))
    })
}

fn one_form(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let b = random::hermitian(&c.space, r);
        let phi = c.state(r).with_norm_sqr(2.0 * c.cfg.hbar)?;
        let dz = project_to_sphere_tangent(&phi, &random::displacement(&c.space, r))?;
        let res = one_form_consistency(&b, &phi, &dz)?;
        Ok(res.route_residual().max(res.sphere_gap()) / (b.norm() * dz.norm()).max(1.0))
    })
}

fn metric_sandwich(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases.min(20), |c, r| {
        let phi = c.state(r);
        Ok(metric_pullback_failure(&c.coords, &phi)?.sandwich_gap)
    })
}

fn harmonic(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let omega = 1.0;
    let h = harmonic_hamiltonian(&ctx.coords, omega);
    let phi = random::state(&ctx.space, rng, ctx.cfg.cutoff).with_norm_sqr(1.0)?;
    let t_end = 2.0 * PI / omega;
    let traj = integrate(&h, &phi, t_end, 1e-3, Integrator::Rk4)?;
    let mut worst = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(97) {
        worst = worst.max(harmonic_error(&ctx.space, &phi, s, omega, *t));
    }
    Ok(worst.max(harmonic_error(&ctx.space, &phi, traj.final_state(), omega, t_end)))
}

fn harmonic_error(space: &Space, phi: &StateVector, s: &StateVector, omega: f64, t: f64) -> f64 {
    (0..space.dim())
        .map(|k| {
            let n = space.occupation(k) as f64 + 0.5 * space.modes() as f64;
            let expected = phi.amplitudes()[k] * C64::from_polar(1.0, -omega * n * t);
            (s.amplitudes()[k] - expected).norm()
        })
        .fold(0.0, f64::max)
}

fn rk4_exact(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let space = FockSpace::new(1, 5, ctx.cfg.hbar)?;
    max_over(ctx, rng, ctx.cfg.cases.min(5), |_, r| {
        let h = random::hermitian(&space, r);
        let phi = random::state(&space, r, 5).with_norm_sqr(1.0)?;
        let a = integrate(&h, &phi, 1.0, 1e-3, Integrator::Rk4)?;
        let b = integrate(&h, &phi, 1.0, a.step, Integrator::SplitExact)?;
        a.max_state_error(&b)
    })
}

fn heisenberg(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let h = harmonic_hamiltonian(&ctx.coords, 1.0);
    let phi = random::state(&ctx.space, rng, ctx.cfg.cutoff).with_norm_sqr(1.0)?;
    let traj = integrate(&h, &phi, 1.0, 1e-3, Integrator::Rk4)?;
    let mut worst = 0.0f64;
    for k in [ctx.coords.identity().clone(), h.clone(), ctx.coords.x(0).clone(), random::hermitian(&ctx.space, rng)] {
        worst = worst.max(heisenberg_check(&k, &traj)?.max_residual);
    }
    Ok(worst)
}

fn direct(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = pullback_state(c, r);
        let data: Vec<(usize, CVector)> = (0..c.cfg.modes)
            .map(|m| Ok((m, forward_direct(&phi, m)?)))
            .collect::<Result<_>>()?;
        let back = reconstruct_direct(&c.space, &data)?;
        Ok((back.amplitudes() - phi.amplitudes()).norm() / phi.radius())
    })
}

fn recursive(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = random::state(&c.space, r, c.cfg.cutoff);
        let mut worst = 0.0f64;
        for m in 0..c.cfg.modes {
            let back = reconstruct_recursive(&c.space, &forward_recursive(&phi, m)?)?;
            worst = worst.max((back.amplitudes() - phi.amplitudes()).norm() / phi.radius());
            let data: Vec<(usize, CVector)> = vec![(m, forward_direct(&phi, m)?)];
            if phi.support_cut() < c.cfg.cutoff {
                worst = worst.max(ray_distance(&reconstruct_direct(&c.space, &data)?, &back)?);
            }
        }
        Ok(worst)
    })
}

fn recursive_data(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = random::state(&c.space, r, c.cfg.cutoff);
        let mut worst = 0.0f64;
        for m in 0..c.cfg.modes {
            let data = forward_recursive(&phi, m)?;
            let again = forward_recursive(&reconstruct_recursive(&c.space, &data)?, m)?;
            let scale = data.components.norm().max(data.f_value.norm());
            let gap = (again.components - &data.components).norm() + (again.f_value - data.f_value).norm();
            worst = worst.max(gap / scale);
        }
        Ok(worst)
    })
}

fn recursive_conditioning(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    max_over(ctx, rng, ctx.cfg.cases, |c, r| {
        let phi = random::state(&c.space, r, c.cfg.cutoff);
        let mut worst = 0.0f64;
        for m in 0..c.cfg.modes {
            let data = forward_recursive(&phi, m)?;
            let back = reconstruct_recursive(&c.space, &data)?;
            let again = forward_recursive(&back, m)?;
            let state_error = (back.amplitudes() - phi.amplitudes()).norm() / phi.radius();
            let data_error = ((again.components - &data.components).norm() + (again.f_value - data.f_value).norm())
                / data.components.norm().max(data.f_value.norm());
            let bound = recursion_condition(&c.space, &data)? * f64::EPSILON;
            worst = worst.max(state_error.max(data_error) / bound);
        }
        Ok(worst)
    })
}

fn singular_seed(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut misses = 0usize;
    let ground = StateVector::basis(&ctx.space, &vec![0; ctx.cfg.modes])?;
    let mut gapped = vec![0; ctx.cfg.modes];
    gapped[0] = 2;
    let gapped = StateVector::new(
        &ctx.space,
        ground.amplitudes() + StateVector::basis(&ctx.space, &gapped)?.amplitudes(),
    )?;
    for phi in [ground, gapped] {
        let refused = matches!(
            reconstruct_recursive(&ctx.space, &forward_recursive(&phi, 0)?),
            Err(Error::SingularSeed(_))
        );
        misses += usize::from(!refused);
    }
    for _ in 0..ctx.cfg.cases {
        let phi = random::state(&ctx.space, rng, ctx.cfg.cutoff);
        let data = forward_recursive(&phi, 0)?;
        let refused = matches!(reconstruct_recursive(&ctx.space, &data), Err(Error::SingularSeed(_)));
        misses += usize::from(refused != (data.f_value.norm() < 1e-12));
    }
    Ok(misses as f64)
}

fn squares_space(ctx: &Ctx) -> Result<CoordinateOperators> {
    Ok(build_coordinate_operators(&FockSpace::new(1, ctx.cfg.cutoff.max(4), ctx.cfg.hbar)?))
}

fn classical_form(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<f64> {
    let c = squares_space(ctx)?;
    let dev = classical_form_counterexample(&c, &c.x(0).pow(2), &c.p(0).pow(2))?;
    let target = c.identity().scale(C64::new(0.0, -2.0 * ctx.cfg.hbar));
    dev.deviation.faithful_residual(&target, 4)
}

fn classical_form_deviation(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<f64> {
    let c = squares_space(ctx)?;
    let dev = classical_form_counterexample(&c, &c.x(0).pow(2), &c.p(0).pow(2))?;
    Ok(dev.deviation.scalar_on_faithful(4).0.norm())
}

fn metric_failure(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let values = (0..ctx.cfg.cases)
        .map(|_| Ok(metric_pullback_failure(&ctx.coords, &ctx.state(rng))?.deviation_from_delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(percentile_low(values))
}

fn metric_routes(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let values = (0..ctx.cfg.cases)
        .map(|_| Ok(metric_pullback_failure(&ctx.coords, &ctx.state(rng))?.candidate_gap))
        .collect::<Result<Vec<_>>>()?;
    Ok(percentile_low(values))
}

fn non_holomorphy(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut least = f64::INFINITY;
    for _ in 0..ctx.cfg.cases {
        let phi = ctx.state(rng);
        least = least.min(jacobian(&phi, Picture::Affine)?.non_holomorphy());
    }
    Ok(least)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            cases: 4,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn entry_names_are_unique() {
        let names = entry_names("all").unwrap();
        let mut dedup = names.clone();
        dedup.dedup();
        assert_eq!(names, dedup);
        assert!(entry_names("nope").is_err());
    }

    #[test]
    fn suites_partition_entries() {
        let total: usize = SUITES[1..].iter().map(|s| entry_names(s).unwrap().len()).sum();
        assert_eq!(total, ENTRIES.len());
    }

    #[test]
    fn negative_controls_are_expected() {
        let r = run_suite("negative-controls", &small()).unwrap();
        assert!(r.all_passed(), "{}", r.to_json());
        assert!(r.entries.iter().any(|e| e.status == Status::ExpectedNonzero));
    }

    #[test]
    fn report_is_deterministic() {
        let a = run_suite("kahler-functions", &small()).unwrap().to_json();
        let b = run_suite("kahler-functions", &small()).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = run_suite("reconstruct", &small()).unwrap();
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("suite,name,paper_ref,residual,threshold,status\n"));
        assert_eq!(csv.lines().count(), 1 + r.entries.len());
    }
}
