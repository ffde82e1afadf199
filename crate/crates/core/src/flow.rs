//! Hamiltonian flow of the Schrödinger equation on state space.
//!
//! With `H = <z|H|z> / (2 hbar)` the Hamiltonian vector field gives
//! `dz^m/dt = -2i dbar_m H = -(i/hbar) (H z)^m`. The default integrator is
//! classical fourth-order Runge–Kutta on these equations, with the step
//! halved until the drift of `|z|^2` over the run falls below
//! [`NORM_DRIFT_TOL`]. The spectral propagator `exp(-i H t / hbar)` is
//! available as an exact reference.

use std::io::Write;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ensure_same, CMatrix, CVector, CoordinateOperators, C64, Operator, StateVector};
use crate::kahler::eval_f;

/// Largest accepted drift of `|z|^2` for the adaptive Runge–Kutta run.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// Number of times the step may be halved before giving up.
const MAX_HALVINGS: u32 = 12;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Classical Runge–Kutta on the Hamiltonian equations, adaptive halving.
    Rk4,
    /// Spectral propagator applied at every sample time.
    SplitExact,
}

/// Sampled solution of the flow.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub generator: Operator,
    pub integrator: Integrator,
    /// Uniform spacing of the samples actually used.
    pub step: f64,
}

impl Trajectory {
    /// Last sampled state.
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectories hold at least one state")
    }

    /// Largest change of `|z|^2` relative to its initial value.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.states[0].norm_sqr();
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - n0).abs() / n0)
            .fold(0.0, f64::max)
    }

    /// Largest change of the energy `<z|H|z> / (2 hbar)`.
    pub fn energy_drift(&self) -> f64 {
        let e = self.energies();
        e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max)
    }

    /// Energy `<z|H|z> / (2 hbar)` at every sample.
    pub fn energies(&self) -> Vec<f64> {
        let hbar = self.generator.space().hbar();
        self.states
            .iter()
            .map(|s| self.generator.sandwich(s).map_or(f64::NAN, |v| v.re / (2.0 * hbar)))
            .collect()
    }

    /// Largest amplitude distance to another trajectory sampled at the
    /// same times.
    pub fn max_state_error(&self, other: &Trajectory) -> Result<f64> {
        if self.states.len() != other.states.len() {
            return Err(Error::DimensionMismatch {
                expected: self.states.len(),
                found: other.states.len(),
            });
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a.amplitudes() - b.amplitudes()).norm())
            .fold(0.0, f64::max))
    }

    /// Writes the trajectory as CSV with columns `t`, `norm2`, `energy`,
    /// then `re_z_k`, `im_z_k` for every flat index `k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let dim = self.generator.space().dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string(), "norm2".to_string(), "energy".to_string()];
        for k in 0..dim {
            header.push(format!("re_z_{k}"));
            header.push(format!("im_z_{k}"));
        }
        w.write_record(&header).map_err(csv_error)?;
        let energies = self.energies();
        for ((t, s), e) in self.times.iter().zip(&self.states).zip(energies) {
            let mut row = vec![format!("{t:.12e}"), format!("{:.12e}", s.norm_sqr()), format!("{e:.12e}")];
            for c in s.amplitudes().iter() {
                row.push(format!("{:.12e}", c.re));
                row.push(format!("{:.12e}", c.im));
            }
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `H = hbar omega sum_m (N_m + 1/2)`.
pub fn harmonic_hamiltonian(coords: &CoordinateOperators, omega: f64) -> Operator {
    let hbar = coords.space().hbar();
    let mut h = coords.identity().scale(C64::new(0.5 * coords.modes() as f64, 0.0));
    for m in 0..coords.modes() {
        h = &h + coords.number(m);
    }
    let h = h.scale(C64::new(hbar * omega, 0.0));
    Operator::hermitian(coords.space(), h.matrix().clone()).expect("number operators are Hermitian")
}

/// Integrates the flow of `h` from `phi0` up to `t_end`.
///
/// The samples are uniformly spaced with `ceil(t_end / step)` intervals.
pub fn integrate(
    h: &Operator,
    phi0: &StateVector,
    t_end: f64,
    step: f64,
    integrator: Integrator,
) -> Result<Trajectory> {
    ensure_same(h.space(), phi0.space())?;
    h.require_hermitian()?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!("end time must be non-negative, got {t_end}")));
    }
    match integrator {
        Integrator::SplitExact => {
            let (n, dt) = grid(t_end, step);
            let prop = Propagator::new(h);
            let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
            let states = times
                .iter()
                .map(|&t| prop.evolve(phi0, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory {
                times,
                states,
                generator: h.clone(),
                integrator,
                step: dt,
            })
        }
        Integrator::Rk4 => {
            let mut current = step;
            for _ in 0..=MAX_HALVINGS {
                let traj = rk4_run(h, phi0, t_end, current)?;
                if traj.norm_drift() < NORM_DRIFT_TOL {
                    return Ok(traj);
                }
                current *= 0.5;
            }
            Err(Error::InvalidParameter(format!(
                "norm drift stays above {NORM_DRIFT_TOL:e} down to step {current:e}"
            )))
        }
    }
}

fn grid(t_end: f64, step: f64) -> (usize, f64) {
    if t_end == 0.0 {
        return (0, step);
    }
    let n = ((t_end / step) - 1e-9).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}

fn rk4_run(h: &Operator, phi0: &StateVector, t_end: f64, step: f64) -> Result<Trajectory> {
    let (n, dt) = grid(t_end, step);
    let hbar = h.space().hbar();
    let gen: CMatrix = h.matrix() * C64::new(0.0, -1.0 / hbar);
    let rhs = |z: &CVector| &gen * z;
    let space = phi0.space();
    let mut z = phi0.amplitudes().clone();
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(phi0.clone());
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    for k in 1..=n {
        let k1 = rhs(&z);
        let k2 = rhs(&(&z + &k1 * half));
        let k3 = rhs(&(&z + &k2 * half));
        let k4 = rhs(&(&z + &k3 * full));
        z += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * sixth;
        times.push(k as f64 * dt);
        states.push(StateVector::new(space, z.clone())?);
    }
    Ok(Trajectory {
        times,
        states,
        generator: h.clone(),
        integrator: Integrator::Rk4,
        step: dt,
    })
}

/// Exact propagator `exp(-i H t / hbar)` from the spectral decomposition
/// of a Hermitian generator.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    hbar: f64,
}

impl Propagator {
    /// Diagonalizes `h`.
    pub fn new(h: &Operator) -> Self {
        let eig = SymmetricEigen::new(h.matrix().clone());
        Propagator {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
            hbar: h.space().hbar(),
        }
    }

    /// The state `exp(-i H t / hbar) phi`.
    pub fn evolve(&self, phi: &StateVector, t: f64) -> Result<StateVector> {
        let mut c = self.eigenvectors.ad_mul(phi.amplitudes());
        for (k, e) in self.eigenvalues.iter().enumerate() {
            c[k] *= C64::from_polar(1.0, -e * t / self.hbar);
        }
        StateVector::new(phi.space(), &self.eigenvectors * c)
    }
}

/// Result of comparing the sampled flow with the Heisenberg equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergCheck {
    pub max_residual: f64,
    pub samples: usize,
}

/// Compares `d/dt H_K` along the trajectory (finite differences of the
/// samples) with `(1/(2 i hbar^2)) <[K, H]>`.
///
/// Samples with two neighbours on each side use the five-point stencil.
/// Trajectories shorter than five samples fall back to the central
/// three-point stencil. End points are skipped.
pub fn heisenberg_check(k: &Operator, traj: &Trajectory) -> Result<HeisenbergCheck> {
    ensure_same(k.space(), traj.generator.space())?;
    let n = traj.states.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples, trajectory has {n}"
        )));
    }
    let hbar = k.space().hbar();
    let dt = traj.step;
    let values: Vec<C64> = traj
        .states
        .iter()
        .map(|s| k.sandwich(s).map(|v| v / (2.0 * hbar)))
        .collect::<Result<_>>()?;
    let comm = k.commutator(&traj.generator)?;
    let factor = C64::new(0.0, -1.0 / (2.0 * hbar * hbar));
    let mut worst = 0.0f64;
    let points = if n >= 5 { 2..n - 2 } else { 1..n - 1 };
    for t in points {
        let derivative = if n >= 5 {
            (values[t - 2] - values[t - 1] * 8.0 + values[t + 1] * 8.0 - values[t + 2]) / (12.0 * dt)
        } else {
            (values[t + 1] - values[t - 1]) / (2.0 * dt)
        };
        let exact = comm.sandwich(&traj.states[t])? * factor;
        worst = worst.max((derivative - exact).norm());
    }
    Ok(HeisenbergCheck {
        max_residual: worst,
        samples: n,
    })
}

/// Largest distance between the final and initial state after removing a
/// global phase, `min_theta |z(T) - e^{i theta} z(0)|`.
pub fn return_error(traj: &Trajectory) -> f64 {
    let z0 = traj.states[0].amplitudes();
    let z1 = traj.final_state().amplitudes();
    let overlap = z0.dotc(z1);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (z1 - z0 * phase).norm()
}

/// Values of `f_beta` along the trajectory.
pub fn projected_observable(beta: &Operator, traj: &Trajectory) -> Result<Vec<C64>> {
    traj.states.iter().map(|s| Ok(eval_f(beta, s)?.value)).collect()
}
