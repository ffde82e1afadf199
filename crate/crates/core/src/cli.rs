//! Command-line front end.
//!
//! Settings are resolved in the order flags, then `KAHLER_QM_*`
//! environment variables, then a TOML configuration file (`--config`),
//! then built-in defaults. Exit status is 0 when every check passes, 1
//! when a check fails and 2 for usage or input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::flow::{harmonic_hamiltonian, integrate, return_error, Integrator, NORM_DRIFT_TOL};
use crate::fock::{build_coordinate_operators, max_abs, CMatrix, FockSpace, Operator, Space, StateVector};
use crate::geometry::{christoffel, christoffel_fd, killing_reduce, metric, MetricPicture, Variance};
use crate::kahler::Picture;
use crate::pullback::{jacobian, omega_pullback, pairing_pullback};
use crate::reconstruct::{
    forward_direct, forward_recursive, ray_distance, reconstruct_direct, reconstruct_recursive,
};
use crate::suite::{run_suite, Entry, Status, SuiteConfig, SUITES};
use crate::{numdiff, random};

/// Exit status for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a check fails.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Generator of the `flow` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    /// `hbar omega (N + 1/2)` summed over modes.
    Harmonic,
    /// Seeded random Hermitian matrix.
    Random,
}

#[derive(Debug, Parser)]
#[command(name = "kahler-qm", version, about = "Kähler geometry of truncated Fock spaces: identity checks, flows and reconstructions")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true, env = "KAHLER_QM_CONFIG")]
    config: Option<PathBuf>,
    /// Number of modes (1 to 3).
    #[arg(long, global = true, env = "KAHLER_QM_DIM")]
    dim: Option<usize>,
    /// Per-mode occupation cutoff.
    #[arg(long, global = true, env = "KAHLER_QM_CUTOFF")]
    cutoff: Option<usize>,
    /// Value of hbar.
    #[arg(long, global = true, env = "KAHLER_QM_HBAR")]
    hbar: Option<f64>,
    /// Seed of the random inputs.
    #[arg(long, global = true, env = "KAHLER_QM_SEED")]
    seed: Option<u64>,
    /// Report format.
    #[arg(long, global = true, value_enum, env = "KAHLER_QM_OUTPUT")]
    output: Option<OutputFormat>,
    /// Directory for report files; standard output when absent.
    #[arg(long, global = true, env = "KAHLER_QM_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// Integrate the Hamiltonian flow and export the trajectory.
    Flow(FlowArgs),
    /// Recover a state from covector components along both routes.
    Reconstruct,
    /// Jacobian, symplectic pull-back and pairing report.
    Pullback,
    /// Metric, Christoffel and Killing-reduction report.
    Geometry,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Random cases per entry.
    #[arg(long, env = "KAHLER_QM_CASES")]
    cases: Option<usize>,
    /// Threshold of the rounding-level identities.
    #[arg(long, env = "KAHLER_QM_TOLERANCE")]
    tolerance: Option<f64>,
    /// Suite to run.
    #[arg(long, env = "KAHLER_QM_SUITE")]
    suite: Option<String>,
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Generator of the flow.
    #[arg(long, value_enum, env = "KAHLER_QM_HAMILTONIAN")]
    hamiltonian: Option<HamiltonianKind>,
    /// Angular frequency of the harmonic generator.
    #[arg(long, env = "KAHLER_QM_OMEGA")]
    omega: Option<f64>,
    /// End time.
    #[arg(long, env = "KAHLER_QM_T_END")]
    t_end: Option<f64>,
    /// Initial time step.
    #[arg(long, env = "KAHLER_QM_STEP")]
    step: Option<f64>,
    /// Integration scheme.
    #[arg(long, value_enum, env = "KAHLER_QM_INTEGRATOR")]
    integrator: Option<IntegratorArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum IntegratorArg {
    Rk4,
    SplitExact,
}

impl From<IntegratorArg> for Integrator {
    fn from(a: IntegratorArg) -> Self {
        match a {
            IntegratorArg::Rk4 => Integrator::Rk4,
            IntegratorArg::SplitExact => Integrator::SplitExact,
        }
    }
}

/// Contents of the TOML configuration file. Every key is optional.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub space: SpaceSection,
    pub verify: VerifySection,
    pub flow: FlowSection,
    pub report: ReportSection,
}

/// `[space]` section.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceSection {
    pub dim: Option<usize>,
    pub cutoff: Option<usize>,
    pub hbar: Option<f64>,
    pub seed: Option<u64>,
}

/// `[verify]` section.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub cases: Option<usize>,
    pub tolerance: Option<f64>,
    pub suite: Option<String>,
}

/// `[flow]` section.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    pub hamiltonian: Option<HamiltonianKind>,
    pub omega: Option<f64>,
    pub t_end: Option<f64>,
    pub step: Option<f64>,
    pub integrator: Option<String>,
}

/// `[report]` section.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub output: Option<OutputFormat>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    /// Parses a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
    }
}

struct Resolved {
    space: SpaceSection,
    output: OutputFormat,
    out_dir: Option<PathBuf>,
    file: FileConfig,
}

impl Resolved {
    fn new(common: &CommonArgs) -> Result<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = SuiteConfig::default();
        let space = SpaceSection {
            dim: Some(common.dim.or(file.space.dim).unwrap_or(d.modes)),
            cutoff: Some(common.cutoff.or(file.space.cutoff).unwrap_or(d.cutoff)),
            hbar: Some(common.hbar.or(file.space.hbar).unwrap_or(d.hbar)),
            seed: Some(common.seed.or(file.space.seed).unwrap_or(d.seed)),
        };
        Ok(Resolved {
            space,
            output: common.output.or(file.report.output).unwrap_or(OutputFormat::Json),
            out_dir: common.out_dir.clone().or_else(|| file.report.out_dir.clone()),
            file,
        })
    }

    fn dim(&self) -> usize {
        self.space.dim.unwrap_or(1)
    }

    fn cutoff(&self) -> usize {
        self.space.cutoff.unwrap_or(8)
    }

    fn hbar(&self) -> f64 {
        self.space.hbar.unwrap_or(1.0)
    }

    fn seed(&self) -> u64 {
        self.space.seed.unwrap_or(42)
    }

    fn fock(&self) -> Result<Space> {
        FockSpace::new(self.dim(), self.cutoff(), self.hbar())
    }

    fn emit(&self, stdout: &mut dyn Write, file_name: &str, text: &str) -> Result<()> {
        match &self.out_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(file_name), text)?;
            }
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let resolved = Resolved::new(&cli.common)?;
    match &cli.command {
        Command::Verify(a) => verify(&resolved, a, stdout, stderr),
        Command::Flow(a) => flow(&resolved, a, stdout, stderr),
        Command::Reconstruct => reconstruct(&resolved, stdout, stderr),
        Command::Pullback => pullback(&resolved, stdout, stderr),
        Command::Geometry => geometry(&resolved, stdout, stderr),
    }
}

fn verify(r: &Resolved, a: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let d = SuiteConfig::default();
    let cfg = SuiteConfig {
        modes: r.dim(),
        cutoff: r.cutoff(),
        hbar: r.hbar(),
        seed: r.seed(),
        cases: a.cases.or(r.file.verify.cases).unwrap_or(d.cases),
        tolerance: a.tolerance.or(r.file.verify.tolerance).unwrap_or(d.tolerance),
    };
    let suite = a
        .suite
        .clone()
        .or_else(|| r.file.verify.suite.clone())
        .unwrap_or_else(|| "all".to_string());
    if !SUITES.contains(&suite.as_str()) {
        return Err(Error::InvalidParameter(format!(
            "unknown suite '{suite}', expected one of {}",
            SUITES.join(", ")
        )));
    }
    let report = run_suite(&suite, &cfg)?;
    match r.output {
        OutputFormat::Json => r.emit(stdout, "report.json", &report.to_json())?,
        OutputFormat::Csv => r.emit(stdout, "report.csv", &report.to_csv()?)?,
    }
    for e in report.failures() {
        write_failure(stderr, e)?;
    }
    Ok(report.all_passed())
}

fn write_failure(stderr: &mut dyn Write, e: &Entry) -> Result<()> {
    let residual = e.residual.map_or_else(|| "error".to_string(), |r| format!("{r:e}"));
    writeln!(
        stderr,
        "FAIL {}: {} (residual {residual}, threshold {:e}){}",
        e.name,
        e.paper_ref,
        e.threshold,
        e.error.as_deref().map(|m| format!(": {m}")).unwrap_or_default()
    )?;
    Ok(())
}

/// A single named check of the demonstration commands.
fn check(name: &str, identity: &str, residual: f64, threshold: f64) -> Entry {
    Entry {
        name: name.to_string(),
        paper_ref: identity.to_string(),
        residual: Some(residual),
        threshold,
        status: if residual <= threshold { Status::Pass } else { Status::Fail },
        error: None,
    }
}

fn emit_demo(
    r: &Resolved,
    command: &str,
    mut entries: Vec<Entry>,
    details: serde_json::Value,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<bool> {
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let config = json!({
        "dim": r.dim(),
        "cutoff": r.cutoff(),
        "hbar": r.hbar(),
        "seed": r.seed(),
    });
    match r.output {
        OutputFormat::Json => {
            let doc = json!({ "suite": command, "config": config, "entries": entries, "details": details });
            let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
            text.push('\n');
            r.emit(stdout, &format!("{command}.json"), &text)?;
        }
        OutputFormat::Csv => {
            let report = crate::suite::Report {
                suite: command.to_string(),
                config: SuiteConfig {
                    modes: r.dim(),
                    cutoff: r.cutoff(),
                    hbar: r.hbar(),
                    seed: r.seed(),
                    ..SuiteConfig::default()
                },
                entries: entries.clone(),
            };
            r.emit(stdout, &format!("{command}.csv"), &report.to_csv()?)?;
        }
    }
    let mut ok = true;
    for e in entries.iter().filter(|e| e.status == Status::Fail) {
        write_failure(stderr, e)?;
        ok = false;
    }
    Ok(ok)
}

fn seeded_state(r: &Resolved, space: &Space, support: usize) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed());
    random::state(space, &mut rng, support).with_norm_sqr(2.0 * space.hbar())
}

fn flow(r: &Resolved, a: &FlowArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let fs_ = &r.file.flow;
    let kind = a.hamiltonian.or(fs_.hamiltonian).unwrap_or(HamiltonianKind::Harmonic);
    let omega = a.omega.or(fs_.omega).unwrap_or(1.0);
    let t_end = a.t_end.or(fs_.t_end).unwrap_or(2.0 * std::f64::consts::PI / omega);
    let step = a.step.or(fs_.step).unwrap_or(1e-3);
    let integrator = match (a.integrator, &fs_.integrator) {
        (Some(i), _) => i.into(),
        (None, Some(s)) => match s.as_str() {
            "rk4" => Integrator::Rk4,
            "split-exact" => Integrator::SplitExact,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown integrator '{other}', expected rk4 or split-exact"
                )))
            }
        },
        (None, None) => Integrator::Rk4,
    };
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let space = r.fock()?;
    let coords = build_coordinate_operators(&space);
    let h: Operator = match kind {
        HamiltonianKind::Harmonic => harmonic_hamiltonian(&coords, omega),
        HamiltonianKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed().wrapping_add(1));
            random::hermitian(&space, &mut rng)
        }
    };
    let phi = seeded_state(r, &space, space.cutoff())?;
    let traj = integrate(&h, &phi, t_end, step, integrator)?;
    let mut entries = vec![check(
        "norm-drift",
        "|z|^2 conserved along the flow",
        traj.norm_drift(),
        NORM_DRIFT_TOL,
    )];
    let mut period_error = None;
    if kind == HamiltonianKind::Harmonic {
        let period = 2.0 * std::f64::consts::PI / omega;
        let one = integrate(&h, &phi, period, step, integrator)?;
        let err = return_error(&one);
        period_error = Some(err);
        entries.push(check(
            "period-return",
            "state returns after t = 2 pi / omega up to a global phase",
            err,
            1e-6,
        ));
    }
    match r.output {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            r.emit(stdout, "trajectory.csv", &String::from_utf8_lossy(&buf))?;
            let ok = entries.iter().all(|e| e.status == Status::Pass);
            for e in entries.iter().filter(|e| e.status == Status::Fail) {
                write_failure(stderr, e)?;
            }
            writeln!(
                stderr,
                "flow: {} samples, step {:e}, norm drift {:e}{}",
                traj.times.len(),
                traj.step,
                traj.norm_drift(),
                period_error.map(|e| format!(", period return error {e:e}")).unwrap_or_default()
            )?;
            Ok(ok)
        }
        OutputFormat::Json => {
            let details = json!({
                "hamiltonian": kind,
                "omega": omega,
                "t_end": t_end,
                "step": traj.step,
                "integrator": integrator,
                "samples": traj.times.len(),
                "energy_drift": traj.energy_drift(),
                "final_state": complex_list(traj.final_state().amplitudes().iter()),
            });
            emit_demo(r, "flow", entries, details, stdout, stderr)
        }
    }
}

fn complex_list<'a>(it: impl Iterator<Item = &'a crate::fock::C64>) -> serde_json::Value {
    serde_json::Value::Array(it.map(|c| json!([c.re, c.im])).collect())
}

fn matrix_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| complex_list(m.row(i).iter()))
            .collect(),
    )
}

fn reconstruct(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let space = r.fock()?;
    let phi = seeded_state(r, &space, space.cutoff() - 1)?;
    let data: Vec<_> = (0..space.modes())
        .map(|m| Ok((m, forward_direct(&phi, m)?)))
        .collect::<Result<_>>()?;
    let direct = reconstruct_direct(&space, &data)?;
    let tilde = forward_recursive(&phi, 0)?;
    let recursive = reconstruct_recursive(&space, &tilde)?;
    let rel = |s: &StateVector| (s.amplitudes() - phi.amplitudes()).norm() / phi.radius();
    let entries = vec![
        check("direct-round-trip", "z from Hilbert covector of alpha_bar_j", rel(&direct), 1e-10),
        check(
            "recursive-round-trip",
            "z from homogeneous covector of alpha_bar_j and f_alpha_bar_j",
            rel(&recursive),
            1e-10,
        ),
        check(
            "routes-agree",
            "direct and recursive routes give the same ray",
            ray_distance(&direct, &recursive)?,
            1e-10,
        ),
    ];
    let details = json!({
        "source": complex_list(phi.amplitudes().iter()),
        "f_alpha_bar": [tilde.f_value.re, tilde.f_value.im],
        "direct": complex_list(direct.amplitudes().iter()),
        "recursive": complex_list(recursive.amplitudes().iter()),
    });
    emit_demo(r, "reconstruct", entries, details, stdout, stderr)
}

fn pullback(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let space = r.fock()?;
    let phi = seeded_state(r, &space, space.cutoff() - 1)?;
    let mut entries = Vec::new();
    let mut details = serde_json::Map::new();
    for p in Picture::ALL {
        let jac = jacobian(&phi, p)?;
        let omega = omega_pullback(&phi, p)?;
        entries.push(check(
            &format!("left-inverse-{}", p.name()),
            "Jinv J = delta (|z|^2/2hbar delta on the Hilbert space)",
            jac.left_inverse_residual(),
            1e-10,
        ));
        entries.push(check(
            &format!("omega-pullback-{}", p.name()),
            "f*(Omega_{i jbar}) = (i/2) delta, f*(Omega^{jbar i}) = 2i delta",
            omega.residual(),
            1e-10,
        ));
        details.insert(
            p.name().to_string(),
            json!({
                "left_inverse": matrix_json(&jac.left_inverse()),
                "omega_covariant": matrix_json(&omega.covariant),
                "omega_contravariant": matrix_json(&omega.contravariant),
                "non_holomorphy": jac.non_holomorphy(),
            }),
        );
    }
    let table = pairing_pullback(&phi)?;
    entries.push(check(
        "pairings",
        "<df_alpha, X_alpha_bar> = -2i delta, Hilbert (-i|z|^2/hbar) delta",
        table.residual(),
        1e-10,
    ));
    details.insert("pairings_affine".into(), matrix_json(&table.affine));
    details.insert("pairings_hilbert".into(), matrix_json(&table.hilbert));
    emit_demo(r, "pullback", entries, serde_json::Value::Object(details), stdout, stderr)
}

fn geometry(r: &Resolved, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let space = r.fock()?;
    let phi = seeded_state(r, &space, space.cutoff())?;
    let mut entries = Vec::new();
    let mut worst = 0.0f64;
    for v in [Variance::Covariant, Variance::Contravariant, Variance::Mixed] {
        let reduced = killing_reduce(&metric(MetricPicture::HilbertConformal, &phi, v)?, &phi)?;
        let closed = metric(MetricPicture::Homogeneous, &phi, v)?;
        worst = worst.max(max_abs(&(reduced.block() - closed.block())));
    }
    entries.push(check(
        "killing-reduction",
        "conformal tensor minus vertical Killing terms = Fubini-Study tensor",
        worst,
        1e-12,
    ));
    let mixed = metric(MetricPicture::Homogeneous, &phi, Variance::Mixed)?;
    let p = mixed.block();
    entries.push(check(
        "projector-idempotent",
        "mixed Fubini-Study tensor P satisfies P P = P",
        max_abs(&(p * p - p)),
        1e-12,
    ));
    let gamma = christoffel(&phi);
    let fd = christoffel_fd(&phi, numdiff::default_step(phi.amplitudes()))?;
    entries.push(check(
        "christoffel-fd",
        "closed-form Christoffel symbols = Levi-Civita from metric derivatives",
        gamma.max_difference(&fd),
        1e-6,
    ));
    let details = json!({
        "state": complex_list(phi.amplitudes().iter()),
        "metric_covariant": matrix_json(metric(MetricPicture::Homogeneous, &phi, Variance::Covariant)?.block()),
        "metric_contravariant": matrix_json(metric(MetricPicture::Homogeneous, &phi, Variance::Contravariant)?.block()),
    });
    emit_demo(r, "geometry", entries, details, stdout, stderr)
}
