//! Graphene–Rashba Hamiltonian at a single k-point.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use crate::basis::{pseudo_spin, SIGMA_0, SIGMA_X, SIGMA_Y};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_deviation, jacobi_eigh, Mat4, C64, I, ONE, ZERO};
use crate::state::SpinorState;
use crate::units;

/// Kinetic energies below this (µeV) use the charge-neutrality closed forms.
pub const NEUTRALITY_THRESHOLD_UEV: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valley {
    K,
    KPrime,
}

impl Valley {
    pub fn tau(self) -> i8 {
        match self {
            Valley::K => 1,
            Valley::KPrime => -1,
        }
    }

    pub fn from_tau(tau: i8) -> Result<Self> {
        match tau {
            1 => Ok(Valley::K),
            -1 => Ok(Valley::KPrime),
            other => Err(Error::Parameter(format!("valley index tau must be ±1, got {other}"))),
        }
    }
}

/// One k-point of the model: ε = ħv_F|k| and θ = atan2(k_y, k_x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    epsilon: f64,
    theta: f64,
    lambda_r: f64,
    valley: Valley,
}

fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to exactly TAU
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

impl ModelParams {
    /// `epsilon` and `lambda_r` in µeV, `theta` in radians (wrapped to [−π, π)).
    pub fn new(epsilon: f64, theta: f64, lambda_r: f64, tau: i8) -> Result<Self> {
        let valley = Valley::from_tau(tau)?;
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        if !(lambda_r > 0.0 && lambda_r.is_finite()) {
            return Err(Error::Parameter(format!("lambda_R must be finite and > 0, got {lambda_r}")));
        }
        if !theta.is_finite() {
            return Err(Error::Parameter(format!("theta must be finite, got {theta}")));
        }
        Ok(Self {
            epsilon,
            theta: wrap_angle(theta),
            lambda_r,
            valley,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda_r(&self) -> f64 {
        self.lambda_r
    }

    pub fn valley(&self) -> Valley {
        self.valley
    }

    pub fn tau(&self) -> i8 {
        self.valley.tau()
    }

    /// √(ε² + λ_R²)
    pub fn radius(&self) -> f64 {
        self.epsilon.hypot(self.lambda_r)
    }

    /// (ε₊, ε₋) = √(ε²+λ_R²) ± λ_R
    pub fn band_energies(&self) -> (f64, f64) {
        let r = self.radius();
        // ε₋ written as ε²/(r + λ) to avoid cancellation at small ε
        (r + self.lambda_r, self.epsilon * self.epsilon / (r + self.lambda_r))
    }

    /// Eigenstate concurrence λ_R/√(ε² + λ_R²).
    pub fn eigenstate_concurrence(&self) -> f64 {
        self.lambda_r / self.radius()
    }

    /// Spin and pseudospin Bloch length of every eigenstate, |ε|/√(ε² + λ_R²).
    pub fn eigenstate_bloch_magnitude(&self) -> f64 {
        self.epsilon / self.radius()
    }
}

/// Builds parameters from Fermi velocity (m/s) and wave vector (1/m).
pub fn kpoint_from_cartesian(fermi_velocity: f64, kx: f64, ky: f64, lambda_r: f64, tau: i8) -> Result<ModelParams> {
    if !(fermi_velocity > 0.0 && fermi_velocity.is_finite()) {
        return Err(Error::Parameter(format!("v_F must be > 0, got {fermi_velocity}")));
    }
    let epsilon = units::kinetic_energy_uev(fermi_velocity, kx.hypot(ky));
    ModelParams::new(epsilon, ky.atan2(kx), lambda_r, tau)
}

/// 4×4 Hamiltonian in µeV on {A↑, B↑, A↓, B↓}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    entries: Mat4,
}

impl HamiltonianMatrix {
    /// Wraps an arbitrary matrix; Hermiticity is checked where it matters.
    pub fn from_entries(entries: Mat4) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.entries)
    }
}

/// ε(τ cosθ σ̂x + sinθ σ̂y)⊗ŝ₀ + λ_R(τ σ̂x⊗ŝy − σ̂y⊗ŝx)
pub fn build_hamiltonian(params: &ModelParams) -> HamiltonianMatrix {
    let tau = params.tau() as f64;
    let (sin_t, cos_t) = params.theta.sin_cos();
    let mut kinetic_sigma = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            kinetic_sigma[r][c] = SIGMA_X[r][c] * (tau * cos_t) + SIGMA_Y[r][c] * sin_t;
        }
    }
    let kinetic = linalg::scale(&pseudo_spin(&kinetic_sigma, &SIGMA_0), C64::new(params.epsilon, 0.0));
    let rashba = linalg::sub(
        &linalg::scale(&pseudo_spin(&SIGMA_X, &SIGMA_Y), C64::new(tau, 0.0)),
        &pseudo_spin(&SIGMA_Y, &SIGMA_X),
    );
    let rashba = linalg::scale(&rashba, C64::new(params.lambda_r, 0.0));
    HamiltonianMatrix {
        entries: linalg::add(&kinetic, &rashba),
    }
}

/// Band label: electron/hole (ν = ±1) and outer/inner branch (ε₊ / ε₋).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    ElectronPlus,
    ElectronMinus,
    HolePlus,
    HoleMinus,
}

impl Band {
    pub fn nu(self) -> f64 {
        match self {
            Band::ElectronPlus | Band::ElectronMinus => 1.0,
            Band::HolePlus | Band::HoleMinus => -1.0,
        }
    }

    fn is_outer(self) -> bool {
        matches!(self, Band::ElectronPlus | Band::HolePlus)
    }

    /// Ascending-energy order: h+, h−, e−, e+.
    pub const ASCENDING: [Band; 4] = [Band::HolePlus, Band::HoleMinus, Band::ElectronMinus, Band::ElectronPlus];
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::ElectronPlus => "e+",
            Band::ElectronMinus => "e-",
            Band::HolePlus => "h+",
            Band::HoleMinus => "h-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub state: SpinorState,
    pub label: Band,
}

/// Four eigenpairs sorted by ascending energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    levels: [Level; 4],
}

impl EigenSystem {
    pub fn levels(&self) -> &[Level; 4] {
        &self.levels
    }

    pub fn energies(&self) -> [f64; 4] {
        self.levels.map(|l| l.energy)
    }

    /// Groups levels whose energies agree within `tol` (relative to the spread).
    pub fn degenerate_groups(&self, tol: f64) -> Vec<Vec<usize>> {
        let scale = self
            .levels
            .iter()
            .map(|l| l.energy.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if (level.energy - self.levels[g[0]].energy).abs() <= tol * scale => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        groups
    }

    /// Spectral projector onto each degenerate eigenspace, paired with its energy.
    pub fn eigenspace_projectors(&self, tol: f64) -> Vec<(f64, Mat4)> {
        self.degenerate_groups(tol)
            .into_iter()
            .map(|g| {
                let energy = g.iter().map(|&k| self.levels[k].energy).sum::<f64>() / g.len() as f64;
                let proj = g.iter().fold(linalg::zeros(), |acc, &k| {
                    linalg::add(&acc, &linalg::outer(self.levels[k].state.amplitudes()))
                });
                (energy, proj)
            })
            .collect()
    }
}

fn analytic_state(params: &ModelParams, band: Band) -> (f64, SpinorState) {
    let nu = band.nu();
    let pm = if band.is_outer() { 1.0 } else { -1.0 };
    let (e_plus, e_minus) = params.band_energies();
    let branch_energy = if band.is_outer() { e_plus } else { e_minus };
    let energy = nu * branch_energy;

    if params.epsilon < NEUTRALITY_THRESHOLD_UEV {
        let h = FRAC_1_SQRT_2;
        let amps = if band.is_outer() {
            // (0, ν, i, 0)/√2 at ±2λ_R
            [ZERO, C64::new(nu * h, 0.0), I * h, ZERO]
        } else {
            // (1, 0, 0, −iν)/√2 at 0
            [C64::new(h, 0.0), ZERO, ZERO, I * (-nu * h)]
        };
        return (energy, SpinorState::from_raw(amps));
    }

    let gamma = branch_energy / params.epsilon;
    let norm = (2.0 * (1.0 + gamma * gamma)).sqrt();
    let amps = [
        C64::from_polar(1.0, -params.theta),
        C64::new(nu * gamma, 0.0),
        I * (pm * gamma),
        I * C64::from_polar(pm * nu, params.theta),
    ]
    .map(|a| a / norm);
    (energy, SpinorState::from_raw(amps))
}

/// Closed-form eigensystem (valley K only).
pub fn analytic_eigensystem(params: &ModelParams) -> Result<EigenSystem> {
    if params.valley != Valley::K {
        return Err(Error::UnsupportedAnalyticBranch { tau: params.tau() });
    }
    let levels = Band::ASCENDING.map(|band| {
        let (energy, state) = analytic_state(params, band);
        Level {
            energy,
            state,
            label: band,
        }
    });
    Ok(EigenSystem { levels })
}

/// Iterative (Jacobi) eigensystem of any Hermitian 4×4 matrix.
///
/// Labels follow ascending order; degenerate subspaces come back in an
/// arbitrary orthonormal basis.
pub fn numeric_eigensystem(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    let deviation = hermitian_deviation(&h.entries);
    if deviation > HERMITIAN_TOL * h.norm().max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    let (vals, vecs) = jacobi_eigh(&h.entries);
    let mut levels = [Level {
        energy: 0.0,
        state: SpinorState::from_raw([ONE, ZERO, ZERO, ZERO]),
        label: Band::HolePlus,
    }; 4];
    for k in 0..4 {
        levels[k] = Level {
            energy: vals[k],
            state: SpinorState::from_raw(vecs[k]),
            label: Band::ASCENDING[k],
        };
    }
    Ok(EigenSystem { levels })
}

/// Analytic system for valley K, numeric otherwise.
pub fn eigensystem(params: &ModelParams) -> Result<EigenSystem> {
    match params.valley {
        Valley::K => analytic_eigensystem(params),
        Valley::KPrime => numeric_eigensystem(&build_hamiltonian(params)),
    }
}
