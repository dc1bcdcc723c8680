//! Spin–pseudospin entanglement measures and their time/ensemble averages.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::state::{ensemble_rng, random_haar_state, random_separable_state, AngleSampling, SpinorState};

/// Concurrence of a pure two-qubit state, in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    /// Clamps rounding dust into [0, 1].
    pub fn new(value: f64) -> Result<Self> {
        if !(-1e-14..=1.0 + 1e-14).contains(&value) {
            return Err(Error::Parameter(format!("concurrence {value} outside [0, 1]")));
        }
        Ok(Self(value.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// C = 2|ad − bc|
pub fn concurrence(state: &SpinorState) -> Concurrence {
    let [a, b, c, d] = *state.amplitudes();
    Concurrence((2.0 * (a * d - b * c).norm()).min(1.0))
}

/// Concurrence from the purity of the reduced spin state: √(2(1 − Tr ρ_s²)).
pub fn concurrence_oracle(state: &SpinorState) -> Concurrence {
    use crate::basis::index;
    let psi = state.amplitudes();
    // ρ_s[s][s'] = Σ_p ψ(p, s) ψ*(p, s')
    let mut rho = [[crate::linalg::ZERO; 2]; 2];
    for (s, row) in rho.iter_mut().enumerate() {
        for (s2, entry) in row.iter_mut().enumerate() {
            *entry = (0..2).map(|p| psi[index(p, s)] * psi[index(p, s2)].conj()).sum();
        }
    }
    let purity: f64 = rho.iter().flatten().map(|x| x.norm_sqr()).sum();
    Concurrence((2.0 * (1.0 - purity)).max(0.0).sqrt().min(1.0))
}

/// Maximal CHSH value √(1 + C²) normalized to the classical bound.
pub fn chsh_beta(c: f64) -> f64 {
    (1.0 + c * c).sqrt()
}

/// Uniform time sampling used for ⟨C(t)⟩.
///
/// `horizon` is in units of ħ/λ_R. At evaluation time the horizon is extended
/// when needed so that it spans at least [`MIN_SLOW_PERIODS`] periods of the
/// slowest frequency present in the propagator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingSpec {
    pub horizon: f64,
    pub n_samples: usize,
}

pub const MIN_SLOW_PERIODS: f64 = 50.0;
pub const MIN_AVERAGING_SAMPLES: usize = 4096;

impl Default for AveragingSpec {
    fn default() -> Self {
        Self {
            horizon: 200.0 * PI,
            n_samples: 32768,
        }
    }
}

impl AveragingSpec {
    pub fn new(horizon: f64, n_samples: usize) -> Result<Self> {
        let spec = Self { horizon, n_samples };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_AVERAGING_SAMPLES {
            return Err(Error::config(format!(
                "averaging needs at least {MIN_AVERAGING_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        // 50 Rashba periods π ħ/λ_R
        if !(self.horizon >= MIN_SLOW_PERIODS * PI) || !self.horizon.is_finite() {
            return Err(Error::config(format!(
                "averaging horizon must be at least 50π ħ/λ_R, got {}",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Horizon in ħ/µeV actually used for `p`.
    pub fn effective_horizon(&self, p: &Propagator) -> f64 {
        let base = self.horizon / p.params().lambda_r();
        match p.slowest_frequency() {
            Some(w) => base.max(MIN_SLOW_PERIODS * 2.0 * PI / w),
            None => base,
        }
    }
}

/// Mean of C(ψ(t)) over `spec.n_samples` uniform times t_k = k·T/n in [0, T).
pub fn time_averaged_concurrence(p: &Propagator, state: &SpinorState, spec: &AveragingSpec) -> f64 {
    let horizon = spec.effective_horizon(p);
    let dt = horizon / spec.n_samples as f64;
    let modes = p.expand(state);
    let sum: f64 = (0..spec.n_samples)
        .map(|k| {
            let [a, b, c, d] = modes.at(k as f64 * dt);
            (2.0 * (a * d - b * c).norm()).min(1.0)
        })
        .sum();
    sum / spec.n_samples as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Haar,
    Separable(AngleSampling),
}

impl EnsembleKind {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::Haar => "haar",
            EnsembleKind::Separable(AngleSampling::Sphere) => "separable",
            EnsembleKind::Separable(AngleSampling::UniformTheta) => "separable_uniform_theta",
        }
    }

    /// Member `member` of the ensemble keyed by `seed`.
    pub fn member(self, seed: u64, member: u64) -> SpinorState {
        let mut rng = ensemble_rng(seed, member);
        match self {
            EnsembleKind::Haar => random_haar_state(&mut rng),
            EnsembleKind::Separable(sampling) => random_separable_state(&mut rng, sampling),
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub label: String,
}

impl EnsembleStats {
    /// Mean and standard error (sample std / √n), summed in index order.
    pub fn from_samples(label: impl Into<String>, samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n,
            label: label.into(),
        }
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("ensemble size must be at least 1"));
    }
    Ok(())
}

/// Per-member values computed in parallel and returned in member order.
fn per_member<F>(kind: EnsembleKind, n: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&SpinorState) -> f64 + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|m| f(&kind.member(seed, m)))
        .collect()
}

/// ⟨⟨C⟩⟩ over `n` seeded members of `kind`.
pub fn ensemble_average(
    params: &ModelParams,
    kind: EnsembleKind,
    n: usize,
    spec: &AveragingSpec,
    seed: u64,
) -> Result<EnsembleStats> {
    check_count(n)?;
    let p = crate::dynamics::make_propagator(params)?;
    let values = per_member(kind, n, seed, |s| time_averaged_concurrence(&p, s, spec));
    Ok(EnsembleStats::from_samples(kind.label(), &values))
}

/// Ensemble statistics of the instantaneous concurrence C(ψ_n(t)).
pub fn ensemble_concurrence_at(p: &Propagator, kind: EnsembleKind, n: usize, seed: u64, t: f64) -> Result<EnsembleStats> {
    check_count(n)?;
    let values = per_member(kind, n, seed, |s| {
        concurrence(&crate::dynamics::evolve(p, s, t)).value()
    });
    Ok(EnsembleStats::from_samples(kind.label(), &values))
}

/// Ensemble statistics of the initial concurrence C(ψ_n(0)).
pub fn ensemble_initial_concurrence(kind: EnsembleKind, n: usize, seed: u64) -> Result<EnsembleStats> {
    check_count(n)?;
    let values = per_member(kind, n, seed, |s| concurrence(s).value());
    Ok(EnsembleStats::from_samples(kind.label(), &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::make_propagator;
    use crate::linalg::{C64, ZERO};
    use crate::model::analytic_eigensystem;
    use crate::state::{bloch_vectors, named_state, product_state, BlochAngles, NamedState};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    const LAM: f64 = 37.5;

    fn prop(eps_over_lambda: f64) -> Propagator {
        make_propagator(&ModelParams::new(eps_over_lambda * LAM, 0.0, LAM, 1).unwrap()).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&named_state(NamedState::Bell1)).value() - 1.0).abs() < 1e-15);
        let s = SpinorState::new([C64::new(0.5, 0.0), C64::new(0.0, -0.5), C64::new(-0.5, 0.0), C64::new(0.0, 0.5)]).unwrap();
        assert!(concurrence(&s).value() < 1e-15);
        let p = ModelParams::new(LAM, 0.0, LAM, 1).unwrap();
        for level in analytic_eigensystem(&p).unwrap().levels() {
            assert!((concurrence(&level.state).value() - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_examples() {
        assert!((concurrence_oracle(&named_state(NamedState::Bell1)).value() - 1.0).abs() < 1e-12);
        let s = product_state(&BlochAngles::new(1.0, 2.0, 0.3, 5.0).unwrap());
        assert!(concurrence_oracle(&s).value() < 1e-7);
        assert!(concurrence(&s).value() < 1e-13);
    }

    #[test]
    fn beta_examples() {
        assert!((chsh_beta(1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chsh_beta(0.0), 1.0);
        assert!((chsh_beta(0.5) - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((chsh_beta(0.5) - 1.1180).abs() < 1e-4);
    }

    #[test]
    fn concurrence_bounds() {
        assert!(Concurrence::new(-1e-15).is_ok());
        assert_eq!(Concurrence::new(-1e-15).unwrap().value(), 0.0);
        assert!(Concurrence::new(-1e-3).is_err());
        assert!(Concurrence::new(1.5).is_err());
    }

    #[test]
    fn bloch_length_equals_one_minus_concurrence_squared() {
        for m in 0..200 {
            let s = EnsembleKind::Haar.member(3, m);
            let b = bloch_vectors(&s);
            let c = concurrence(&s).value();
            assert!((b.spin_magnitude().powi(2) - (1.0 - c * c)).abs() < 1e-10);
            assert!((b.pseudospin_magnitude().powi(2) - (1.0 - c * c)).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_1_average_at_neutrality_is_one() {
        let avg = time_averaged_concurrence(&prop(0.0), &named_state(NamedState::Bell1), &AveragingSpec::default());
        assert!((avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_y_up_high_energy_average() {
        let avg = time_averaged_concurrence(&prop(100.0), &named_state(NamedState::PsiYUp), &AveragingSpec::default());
        assert!((avg - 2.0 / PI).abs() < 0.01, "{avg}");
    }

    #[test]
    fn psi_x_up_neutrality_average() {
        let avg = time_averaged_concurrence(&prop(0.0), &named_state(NamedState::PsiXUp), &AveragingSpec::default());
        assert!((avg - 1.0 / PI).abs() < 0.01, "{avg}");
    }

    #[test]
    fn horizon_extends_for_slow_modes() {
        let spec = AveragingSpec::default();
        let fast = prop(1.0);
        assert_eq!(spec.effective_horizon(&fast), spec.horizon / LAM);
        let slow = prop(1e-3);
        // slowest gap 2ε₋ ≈ ε²/λ_R
        let (_, em) = slow.params().band_energies();
        let want = MIN_SLOW_PERIODS * 2.0 * PI / (2.0 * em);
        assert!((spec.effective_horizon(&slow) / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(AveragingSpec::new(200.0 * PI, 4095).is_err());
        assert!(AveragingSpec::new(10.0, 8192).is_err());
        assert!(AveragingSpec::new(60.0 * PI, 4096).is_ok());
    }

    #[test]
    fn single_member_ensemble_matches_direct_average() {
        let params = ModelParams::new(2.0 * LAM, 0.0, LAM, 1).unwrap();
        let spec = AveragingSpec::new(100.0 * PI, 4096).unwrap();
        let stats = ensemble_average(&params, EnsembleKind::Haar, 1, &spec, 99).unwrap();
        let direct = time_averaged_concurrence(&make_propagator(&params).unwrap(), &EnsembleKind::Haar.member(99, 0), &spec);
        assert_eq!(stats.mean, direct);
        assert_eq!(stats.std_error, 0.0);
        assert_eq!(stats.n, 1);
        assert!(ensemble_average(&params, EnsembleKind::Haar, 0, &spec, 99).is_err());
    }

    #[test]
    fn haar_initial_concurrence_near_three_pi_over_sixteen() {
        let stats = ensemble_initial_concurrence(EnsembleKind::Haar, 1000, 2024).unwrap();
        assert!((stats.mean - 3.0 * PI / 16.0).abs() < 3.0 * stats.std_error, "{stats:?}");
        assert!((stats.mean - 0.589).abs() < 0.02);
    }

    #[test]
    fn separable_members_have_zero_concurrence() {
        for sampling in [AngleSampling::Sphere, AngleSampling::UniformTheta] {
            for m in 0..100 {
                assert!(concurrence(&EnsembleKind::Separable(sampling).member(1, m)).value() < 1e-14);
            }
        }
    }

    #[test]
    fn product_of_polar_states_is_separable() {
        let s = product_state(&BlochAngles::new(FRAC_PI_2, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(s.amplitudes()[2], ZERO);
        assert_eq!(concurrence(&s).value(), 0.0);
    }
}
