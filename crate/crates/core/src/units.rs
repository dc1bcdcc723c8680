//! Unit conventions.
//!
//! Energies are in µeV and ħ = 1, so the internal time unit is ħ/µeV.

/// Reduced Planck constant in µeV·s (CODATA 2018, exact in SI).
pub const HBAR_UEV_S: f64 = 6.582_119_569e-10;

/// Internal time unit ħ/µeV expressed in nanoseconds.
pub const HBAR_PER_UEV_NS: f64 = HBAR_UEV_S * 1e9;

/// Reference Rashba strength λ = 37.5 µeV (graphene on SiO₂ or hBN).
pub const LAMBDA_REF_UEV: f64 = 37.5;

pub fn time_to_ns(t: f64) -> f64 {
    t * HBAR_PER_UEV_NS
}

/// Converts a time in units of ħ/λ_R to the internal ħ/µeV unit.
pub fn time_from_rashba_units(t_over_hbar_lambda: f64, lambda_r: f64) -> f64 {
    t_over_hbar_lambda / lambda_r
}

pub fn time_to_rashba_units(t: f64, lambda_r: f64) -> f64 {
    t * lambda_r
}

/// ħ v k in µeV for v in m/s and k in 1/m.
pub fn kinetic_energy_uev(fermi_velocity: f64, k: f64) -> f64 {
    HBAR_UEV_S * fermi_velocity * k
}
