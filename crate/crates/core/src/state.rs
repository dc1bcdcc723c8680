//! Pure spin-pseudospin states and their constructors.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::basis::{index, pseudo_spin, PAULI_XYZ, SIGMA_0};
use crate::error::{Error, Result};
use crate::linalg::{inner, mat_vec, vec_norm, Mat4, Vec4, C64, I, ZERO};

const NORM_TOL: f64 = 1e-12;

/// Normalized amplitudes (a, b, c, d) on {A↑, B↑, A↓, B↓}.
///
/// No global phase convention is imposed; compare states with
/// [`SpinorState::fidelity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorState {
    amps: Vec4,
}

impl SpinorState {
    /// Wraps amplitudes that are already normalized to 1e-12.
    pub fn new(amps: Vec4) -> Result<Self> {
        let n = vec_norm(&amps);
        if (n * n - 1.0).abs() > NORM_TOL {
            return Err(Error::Parameter(format!(
                "state norm² is {} (expected 1)",
                n * n
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: Vec4) -> Result<Self> {
        let n = vec_norm(&amps);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Parameter("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self {
            amps: amps.map(|x| x / n),
        })
    }

    pub(crate) fn from_raw(amps: Vec4) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &Vec4 {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amps)
    }

    /// |⟨self|other⟩|
    pub fn fidelity(&self, other: &SpinorState) -> f64 {
        inner(&self.amps, &other.amps).norm()
    }

    pub fn apply(&self, op: &Mat4) -> Vec4 {
        mat_vec(op, &self.amps)
    }

    /// ⟨ψ|O|ψ⟩ for Hermitian O.
    pub fn expectation(&self, op: &Mat4) -> f64 {
        inner(&self.amps, &self.apply(op)).re
    }
}

/// The four reference initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    PsiXUp,
    PsiYUp,
    Bell1,
    Bell2,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [
        NamedState::PsiXUp,
        NamedState::PsiYUp,
        NamedState::Bell1,
        NamedState::Bell2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::PsiXUp => "psi_x_up",
            NamedState::PsiYUp => "psi_y_up",
            NamedState::Bell1 => "bell_1",
            NamedState::Bell2 => "bell_2",
        }
    }

    pub fn state(self) -> SpinorState {
        named_state(self)
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedState::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = NamedState::ALL.iter().map(|n| n.name()).collect();
                Error::config(format!("unknown state `{s}`; valid names: {}", valid.join(", ")))
            })
    }
}

pub fn named_state(which: NamedState) -> SpinorState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    let amps = match which {
        NamedState::PsiXUp => [r(h), r(h), ZERO, ZERO],
        NamedState::PsiYUp => [r(h), I * h, ZERO, ZERO],
        NamedState::Bell1 => [r(h), ZERO, ZERO, r(h)],
        NamedState::Bell2 => [ZERO, r(h), r(h), ZERO],
    };
    SpinorState::from_raw(amps)
}

/// Bloch-sphere angles of the pseudospin (`_p`) and spin (`_s`) qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAngles {
    pub theta_p: f64,
    pub phi_p: f64,
    pub theta_s: f64,
    pub phi_s: f64,
}

impl BlochAngles {
    pub fn new(theta_p: f64, phi_p: f64, theta_s: f64, phi_s: f64) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        for (name, th) in [("theta_p", theta_p), ("theta_s", theta_s)] {
            if !(0.0..=PI).contains(&th) {
                return Err(Error::Parameter(format!("{name} = {th} outside [0, π]")));
            }
        }
        for (name, ph) in [("phi_p", phi_p), ("phi_s", phi_s)] {
            if !(0.0..TAU).contains(&ph) {
                return Err(Error::Parameter(format!("{name} = {ph} outside [0, 2π)")));
            }
        }
        Ok(Self {
            theta_p,
            phi_p,
            theta_s,
            phi_s,
        })
    }
}

fn bloch_spinor(theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [C64::new(c, 0.0), C64::from_polar(s, phi)]
}

/// Pseudospin spinor ⊗ spin spinor.
pub fn product_state(angles: &BlochAngles) -> SpinorState {
    let pseudo = bloch_spinor(angles.theta_p, angles.phi_p);
    let spin = bloch_spinor(angles.theta_s, angles.phi_s);
    let mut amps = [ZERO; 4];
    for (p, ap) in pseudo.iter().enumerate() {
        for (s, as_) in spin.iter().enumerate() {
            amps[index(p, s)] = ap * as_;
        }
    }
    SpinorState::from_raw(amps)
}

/// How the Bloch angles of the separable ensemble are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSampling {
    /// cos θ uniform in [−1, 1], φ uniform in [0, 2π).
    #[default]
    Sphere,
    /// θ uniform in [0, π], φ uniform in [0, 2π).
    UniformTheta,
}

/// Generator for ensemble member `member` of the stream keyed by `seed`.
///
/// Each member owns an independent ChaCha stream, so member states do not
/// depend on how work is split across threads.
pub fn ensemble_rng(seed: u64, member: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    rng
}

/// Normalized vector of i.i.d. standard complex Gaussians (Haar-uniform).
pub fn random_haar_state<R: Rng + ?Sized>(rng: &mut R) -> SpinorState {
    loop {
        let mut amps = [ZERO; 4];
        for a in amps.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *a = C64::new(re, im);
        }
        if let Ok(s) = SpinorState::normalized(amps) {
            return s;
        }
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R, sampling: AngleSampling) -> (f64, f64) {
    use std::f64::consts::{PI, TAU};
    let theta = match sampling {
        AngleSampling::Sphere => rng.random_range(-1.0f64..=1.0).acos(),
        AngleSampling::UniformTheta => rng.random_range(0.0..=PI),
    };
    let phi = rng.random_range(0.0..TAU);
    (theta, phi)
}

/// Product state with independently random pseudospin and spin directions.
pub fn random_separable_state<R: Rng + ?Sized>(rng: &mut R, sampling: AngleSampling) -> SpinorState {
    let (theta_p, phi_p) = random_direction(rng, sampling);
    let (theta_s, phi_s) = random_direction(rng, sampling);
    product_state(&BlochAngles {
        theta_p,
        phi_p,
        theta_s,
        phi_s,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVectors {
    pub spin: [f64; 3],
    pub pseudospin: [f64; 3],
}

fn magnitude(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl BlochVectors {
    pub fn spin_magnitude(&self) -> f64 {
        magnitude(&self.spin)
    }

    pub fn pseudospin_magnitude(&self) -> f64 {
        magnitude(&self.pseudospin)
    }
}

struct BlochOperators {
    spin: [Mat4; 3],
    pseudospin: [Mat4; 3],
}

static BLOCH_OPS: LazyLock<BlochOperators> = LazyLock::new(|| BlochOperators {
    spin: PAULI_XYZ.map(|s| pseudo_spin(&SIGMA_0, &s)),
    pseudospin: PAULI_XYZ.map(|sigma| pseudo_spin(&sigma, &SIGMA_0)),
});

/// ⟨σ₀⊗ŝᵢ⟩ and ⟨σ̂ᵢ⊗s₀⟩ for i = x, y, z.
pub fn bloch_vectors(state: &SpinorState) -> BlochVectors {
    let ops = &*BLOCH_OPS;
    BlochVectors {
        spin: ops.spin.each_ref().map(|o| state.expectation(o)),
        pseudospin: ops.pseudospin.each_ref().map(|o| state.expectation(o)),
    }
}

/// Parses a JSON array of four `[re, im]` pairs.
///
/// Input that is off unit norm by more than 1e-6 is normalized with a warning.
pub fn parse_state_literal(text: &str) -> Result<SpinorState> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("state literal `{text}` is not four [re, im] pairs: {e}")))?;
    let pairs: [[f64; 2]; 4] = pairs
        .try_into()
        .map_err(|v: Vec<_>| Error::config(format!("state literal has {} amplitudes, expected 4", v.len())))?;
    let amps = pairs.map(|[re, im]| C64::new(re, im));
    let n = vec_norm(&amps);
    if (n - 1.0).abs() > 1e-6 {
        log::warn!("state literal {text} has norm {n}; normalizing");
    }
    SpinorState::normalized(amps).map_err(|_| Error::config("state literal is the zero vector"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn close(a: &[f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn named_states_match_literals() {
        let h = FRAC_1_SQRT_2;
        let x = named_state(NamedState::PsiXUp);
        assert_eq!(x.amplitudes()[0], C64::new(h, 0.0));
        assert_eq!(x.amplitudes()[1], C64::new(h, 0.0));
        let y = named_state(NamedState::PsiYUp);
        assert_eq!(y.amplitudes()[1], C64::new(0.0, h));
        let b2 = named_state(NamedState::Bell2);
        assert_eq!(b2.amplitudes()[0], ZERO);
        assert_eq!(b2.amplitudes()[2], C64::new(h, 0.0));
        for n in NamedState::ALL {
            assert!((n.state().norm() - 1.0).abs() < 1e-15);
            assert_eq!(n.name().parse::<NamedState>().unwrap(), n);
        }
    }

    #[test]
    fn unknown_state_lists_valid_names() {
        let err = "psi_z".parse::<NamedState>().unwrap_err().to_string();
        assert!(err.contains("psi_x_up") && err.contains("bell_2"), "{err}");
    }

    #[test]
    fn named_state_bloch_vectors() {
        let b = bloch_vectors(&named_state(NamedState::PsiXUp));
        assert!(close(&b.pseudospin, [1.0, 0.0, 0.0], 1e-15));
        assert!(close(&b.spin, [0.0, 0.0, 1.0], 1e-15));
        let b = bloch_vectors(&named_state(NamedState::PsiYUp));
        assert!(close(&b.pseudospin, [0.0, 1.0, 0.0], 1e-15));
        assert!(close(&b.spin, [0.0, 0.0, 1.0], 1e-15));
        let b = bloch_vectors(&named_state(NamedState::Bell1));
        assert!(close(&b.pseudospin, [0.0; 3], 1e-15));
        assert!(close(&b.spin, [0.0; 3], 1e-15));
    }

    #[test]
    fn product_state_examples() {
        let s = product_state(&BlochAngles::new(FRAC_PI_2, 0.0, 0.0, 0.0).unwrap());
        assert!((s.fidelity(&named_state(NamedState::PsiXUp)) - 1.0).abs() < 1e-15);

        let s = product_state(&BlochAngles::new(FRAC_PI_2, 1.5 * PI, FRAC_PI_2, PI).unwrap());
        let expect = [
            C64::new(0.5, 0.0),
            C64::new(0.0, -0.5),
            C64::new(-0.5, 0.0),
            C64::new(0.0, 0.5),
        ];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a - e).norm() < 1e-15);
        }
        let b = bloch_vectors(&s);
        assert!(close(&b.pseudospin, [0.0, -1.0, 0.0], 1e-15));
        assert!(close(&b.spin, [-1.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn angle_domain_is_checked() {
        assert!(BlochAngles::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(BlochAngles::new(0.0, 2.0 * PI, 0.0, 0.0).is_err());
        assert!(BlochAngles::new(PI, 0.0, PI, 6.0).is_ok());
    }

    #[test]
    fn seeded_streams_are_reproducible_and_distinct() {
        let a = random_haar_state(&mut ensemble_rng(7, 3));
        let b = random_haar_state(&mut ensemble_rng(7, 3));
        let c = random_haar_state(&mut ensemble_rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        let s1 = random_separable_state(&mut ensemble_rng(9, 0), AngleSampling::Sphere);
        let s2 = random_separable_state(&mut ensemble_rng(9, 0), AngleSampling::Sphere);
        assert_eq!(s1, s2);
    }

    #[test]
    fn haar_bloch_vectors_are_isotropic() {
        let n = 1000;
        let vecs: Vec<_> = (0..n)
            .map(|m| bloch_vectors(&random_haar_state(&mut ensemble_rng(11, m))))
            .collect();
        for k in 0..3 {
            for pick in [|b: &BlochVectors, k: usize| b.spin[k], |b: &BlochVectors, k: usize| b.pseudospin[k]] {
                let xs: Vec<f64> = vecs.iter().map(|b| pick(b, k)).collect();
                let mean = xs.iter().sum::<f64>() / n as f64;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                // six comparisons per seed, so 4σ keeps the family-wise false alarm rate small
                assert!(mean.abs() < 4.0 * (var / n as f64).sqrt(), "component {k}: {mean}");
            }
        }
    }

    #[test]
    fn separable_spin_z_mean_vanishes() {
        for sampling in [AngleSampling::Sphere, AngleSampling::UniformTheta] {
            let n = 1000;
            let zs: Vec<f64> = (0..n)
                .map(|m| bloch_vectors(&random_separable_state(&mut ensemble_rng(5, m), sampling)).spin[2])
                .collect();
            let mean = zs.iter().sum::<f64>() / n as f64;
            let var = zs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!(mean.abs() < 3.0 * (var / n as f64).sqrt());
        }
    }

    #[test]
    fn sphere_sampling_has_uniform_cos_theta() {
        // ⟨z²⟩ = 1/3 on the sphere; uniform θ gives 1/2.
        let n = 4000;
        let mean_sq = |sampling| {
            (0..n)
                .map(|m| bloch_vectors(&random_separable_state(&mut ensemble_rng(21, m), sampling)).pseudospin[2].powi(2))
                .sum::<f64>()
                / n as f64
        };
        assert!((mean_sq(AngleSampling::Sphere) - 1.0 / 3.0).abs() < 0.02);
        assert!((mean_sq(AngleSampling::UniformTheta) - 0.5).abs() < 0.02);
    }

    #[test]
    fn literal_parsing() {
        let s = parse_state_literal("[[1,0],[0,0],[0,0],[1,0]]").unwrap();
        assert!((s.fidelity(&named_state(NamedState::Bell1)) - 1.0).abs() < 1e-15);
        assert!(parse_state_literal("[[1,0],[0,0]]").is_err());
        assert!(parse_state_literal("[[0,0],[0,0],[0,0],[0,0]]").is_err());
        assert!(parse_state_literal("nope").is_err());
    }

    #[test]
    fn new_rejects_unnormalized() {
        assert!(SpinorState::new([C64::new(1.0, 0.0), C64::new(1.0, 0.0), ZERO, ZERO]).is_err());
        assert!(SpinorState::normalized([ZERO; 4]).is_err());
    }
}
