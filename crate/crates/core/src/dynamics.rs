//! Unitary time evolution under a fixed k-point Hamiltonian.
//!
//! Times are in ħ/µeV. Every requested time is evaluated directly from the
//! spectral form Σ_j e^{−iE_j t} P_j, so trajectories carry no stepping error
//! and points can be computed in any order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::entanglement::{chsh_beta, concurrence};
use crate::error::{Error, Result};
use crate::linalg::{self, mat_vec, Mat4, Vec4, C64, ZERO};
use crate::model::{build_hamiltonian, eigensystem, EigenSystem, ModelParams};
use crate::state::{bloch_vectors, SpinorState};

/// Relative tolerance for grouping degenerate energies into one projector.
const DEGENERACY_TOL: f64 = 1e-9;

/// U(t) = Σ_g exp(−iE_g t) P_g over the distinct energies E_g.
#[derive(Clone, Debug)]
pub struct Propagator {
    params: ModelParams,
    eigensystem: EigenSystem,
    projectors: Vec<(f64, Mat4)>,
}

pub fn make_propagator(params: &ModelParams) -> Result<Propagator> {
    let eigensystem = eigensystem(params)?;
    let projectors = eigensystem.eigenspace_projectors(DEGENERACY_TOL);
    Ok(Propagator {
        params: *params,
        eigensystem,
        projectors,
    })
}

impl Propagator {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eigensystem
    }

    /// (energy, projector) per eigenspace, ascending in energy.
    pub fn projectors(&self) -> &[(f64, Mat4)] {
        &self.projectors
    }

    /// Splits `state` into its eigenspace components.
    pub fn expand(&self, state: &SpinorState) -> ModeExpansion {
        ModeExpansion {
            modes: self
                .projectors
                .iter()
                .map(|(e, p)| (*e, mat_vec(p, state.amplitudes())))
                .collect(),
        }
    }

    /// Smallest non-zero gap between eigenspace energies (µeV).
    pub fn slowest_frequency(&self) -> Option<f64> {
        let scale = self.projectors.iter().map(|(e, _)| e.abs()).fold(0.0, f64::max);
        let mut slowest: Option<f64> = None;
        for (i, (a, _)) in self.projectors.iter().enumerate() {
            for (b, _) in &self.projectors[i + 1..] {
                let gap = (a - b).abs();
                if gap > 1e-8 * scale {
                    slowest = Some(slowest.map_or(gap, |s| s.min(gap)));
                }
            }
        }
        slowest
    }
}

/// A state written as Σ_g v_g with v_g = P_g|ψ⟩.
#[derive(Clone, Debug)]
pub struct ModeExpansion {
    modes: Vec<(f64, Vec4)>,
}

impl ModeExpansion {
    pub fn at(&self, t: f64) -> Vec4 {
        let mut out = [ZERO; 4];
        for (energy, v) in &self.modes {
            let phase = C64::from_polar(1.0, -energy * t);
            for (o, x) in out.iter_mut().zip(v) {
                *o += phase * x;
            }
        }
        out
    }
}

pub fn evolve(p: &Propagator, state: &SpinorState, t: f64) -> SpinorState {
    SpinorState::from_raw(p.expand(state).at(t))
}

/// Uniform grid of `n_samples` times from `t_start` to `t_end` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::config(format!("time grid needs at least 2 samples, got {n_samples}")));
        }
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::config(format!("time grid needs t_end > t_start, got [{t_start}, {t_end}]")));
        }
        Ok(Self {
            t_start,
            t_end,
            n_samples,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_start + k as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

/// Observable recorded along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Concurrence,
    Beta,
    Norm,
    SpinX,
    SpinY,
    SpinZ,
    PseudospinX,
    PseudospinY,
    PseudospinZ,
}

impl Channel {
    pub const ALL: [Channel; 9] = [
        Channel::Concurrence,
        Channel::Beta,
        Channel::Norm,
        Channel::SpinX,
        Channel::SpinY,
        Channel::SpinZ,
        Channel::PseudospinX,
        Channel::PseudospinY,
        Channel::PseudospinZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Concurrence => "C",
            Channel::Beta => "beta",
            Channel::Norm => "norm",
            Channel::SpinX => "sx",
            Channel::SpinY => "sy",
            Channel::SpinZ => "sz",
            Channel::PseudospinX => "sigma_x",
            Channel::PseudospinY => "sigma_y",
            Channel::PseudospinZ => "sigma_z",
        }
    }

    fn needs_bloch(self) -> bool {
        !matches!(self, Channel::Concurrence | Channel::Beta | Channel::Norm)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let valid: Vec<_> = Channel::ALL.iter().map(|c| c.name()).collect();
            Error::config(format!("unknown channel `{s}`; valid channels: {}", valid.join(", ")))
        })
    }
}

#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub channels: Vec<(Channel, Vec<f64>)>,
}

impl TimeSeries {
    pub fn get(&self, channel: Channel) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(c, _)| *c == channel)
            .map(|(_, v)| v.as_slice())
    }
}

fn observe(state: &SpinorState, channels: &[Channel]) -> Vec<f64> {
    let bloch = channels.iter().any(|c| c.needs_bloch()).then(|| bloch_vectors(state));
    let c = concurrence(state).value();
    channels
        .iter()
        .map(|ch| match ch {
            Channel::Concurrence => c,
            Channel::Beta => chsh_beta(c),
            Channel::Norm => state.norm(),
            Channel::SpinX => bloch.unwrap().spin[0],
            Channel::SpinY => bloch.unwrap().spin[1],
            Channel::SpinZ => bloch.unwrap().spin[2],
            Channel::PseudospinX => bloch.unwrap().pseudospin[0],
            Channel::PseudospinY => bloch.unwrap().pseudospin[1],
            Channel::PseudospinZ => bloch.unwrap().pseudospin[2],
        })
        .collect()
}

/// Samples `channels` of the evolved state at every grid point.
pub fn trajectory(p: &Propagator, state: &SpinorState, grid: &TimeGrid, channels: &[Channel]) -> TimeSeries {
    let modes = p.expand(state);
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| observe(&SpinorState::from_raw(modes.at(grid.time(k))), channels))
        .collect();
    let channels = channels
        .iter()
        .enumerate()
        .map(|(i, ch)| (*ch, rows.iter().map(|r| r[i]).collect()))
        .collect();
    TimeSeries { grid: *grid, channels }
}

/// Same as [`trajectory`] with channel names resolved first.
pub fn trajectory_by_name(
    p: &Propagator,
    state: &SpinorState,
    grid: &TimeGrid,
    names: &[&str],
) -> Result<TimeSeries> {
    let channels = names.iter().map(|n| n.parse()).collect::<Result<Vec<Channel>>>()?;
    Ok(trajectory(p, state, grid, &channels))
}

/// Upper bound on oracle integration steps.
pub const MAX_ORACLE_STEPS: u64 = 1_000_000_000;

/// Default oracle step 10⁻³ ħ/ε₊.
pub fn default_oracle_step(params: &ModelParams) -> f64 {
    1e-3 / params.band_energies().0
}

/// Fixed-step classical RK4 integration of i dψ/dt = Hψ, without renormalization.
///
/// Test oracle for [`evolve`].
pub fn integrate_schrodinger_oracle(params: &ModelParams, state: &SpinorState, t: f64, dt_max: f64) -> Result<SpinorState> {
    if !(dt_max > 0.0) {
        return Err(Error::Parameter(format!("dt_max must be > 0, got {dt_max}")));
    }
    let steps = (t.abs() / dt_max).ceil();
    if steps > MAX_ORACLE_STEPS as f64 {
        return Err(Error::StepLimit {
            steps,
            limit: MAX_ORACLE_STEPS,
        });
    }
    let steps = steps as u64;
    if steps == 0 {
        return Ok(*state);
    }
    let dt = t / steps as f64;
    let h = *build_hamiltonian(params).entries();
    // −i H
    let gen = linalg::scale(&h, C64::new(0.0, -1.0));
    let deriv = |v: &Vec4| mat_vec(&gen, v);
    let axpy = |a: &Vec4, s: f64, b: &Vec4| -> Vec4 {
        let mut out = *a;
        for (o, x) in out.iter_mut().zip(b) {
            *o += x * s;
        }
        out
    };

    let mut psi = *state.amplitudes();
    for _ in 0..steps {
        let k1 = deriv(&psi);
        let k2 = deriv(&axpy(&psi, dt / 2.0, &k1));
        let k3 = deriv(&axpy(&psi, dt / 2.0, &k2));
        let k4 = deriv(&axpy(&psi, dt, &k3));
        for i in 0..4 {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    Ok(SpinorState::from_raw(psi))
}

/// Mean-field precession fields acting on spin and pseudospin (µeV).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveFields {
    pub spin: [f64; 3],
    pub pseudospin: [f64; 3],
}

/// Fields felt by spin and pseudospin for transport along x:
/// B_s = λ_R(−⟨σy⟩, τ⟨σx⟩, 0) and B_σ = (τ(ε + λ_R⟨sy⟩), −λ_R⟨sx⟩, 0).
/// For τ = +1 these are the usual B_s = λ_R(−⟨σy⟩, ⟨σx⟩, 0),
/// B_σ = λ_R(⟨sy⟩, −⟨sx⟩, 0) + ε(1, 0, 0).
pub fn effective_fields(state: &SpinorState, params: &ModelParams) -> Result<EffectiveFields> {
    if params.theta() != 0.0 {
        return Err(Error::UnsupportedGeometry { theta: params.theta() });
    }
    let b = bloch_vectors(state);
    let tau = params.tau() as f64;
    let lam = params.lambda_r();
    Ok(EffectiveFields {
        spin: [-lam * b.pseudospin[1], tau * lam * b.pseudospin[0], 0.0],
        pseudospin: [tau * (params.epsilon() + lam * b.spin[1]), -lam * b.spin[0], 0.0],
    })
}
