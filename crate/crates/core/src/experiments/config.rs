//! Run configuration: JSON config file merged with command-line overrides,
//! then resolved into a validated plan per command.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Channel, TimeGrid};
use crate::entanglement::AveragingSpec;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::state::{parse_state_literal, AngleSampling, NamedState, SpinorState};
use crate::units::LAMBDA_REF_UEV;

pub const DEFAULT_SEED: u64 = 20_200_721;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EigenSweep,
    Dynamics,
    AvgSweep,
    EnsembleSweep,
    Chsh,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::EigenSweep,
        Command::Dynamics,
        Command::AvgSweep,
        Command::EnsembleSweep,
        Command::Chsh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::EigenSweep => "eigen-sweep",
            Command::Dynamics => "dynamics",
            Command::AvgSweep => "avg-sweep",
            Command::EnsembleSweep => "ensemble-sweep",
            Command::Chsh => "chsh",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config(format!("unknown format `{other}`; expected csv or json"))),
        }
    }
}

/// A named initial state or a literal list of four `[re, im]` amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Name(String),
    Amplitudes(Vec<[f64; 2]>),
}

impl StateSpec {
    /// Accepts a state name or a JSON literal.
    pub fn parse_arg(arg: &str) -> Self {
        if arg.trim_start().starts_with('[') {
            match serde_json::from_str::<Vec<[f64; 2]>>(arg) {
                Ok(a) => StateSpec::Amplitudes(a),
                Err(_) => StateSpec::Name(arg.to_string()),
            }
        } else {
            StateSpec::Name(arg.to_string())
        }
    }

    fn resolve(&self) -> Result<(String, SpinorState)> {
        match self {
            StateSpec::Name(n) => {
                let named: NamedState = n.parse()?;
                Ok((named.name().to_string(), named.state()))
            }
            StateSpec::Amplitudes(a) => {
                let text = serde_json::to_string(a).expect("amplitudes serialize");
                let state = parse_state_literal(&text)?;
                Ok((format!("literal{text}").replace(',', ";"), state))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonRange {
    /// µeV
    pub min: f64,
    /// µeV
    pub max: f64,
    pub points: usize,
}

/// Log-spaced magnitudes mirrored to both signs of ε, in units of λ_R.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSymmetricSweep {
    pub min_over_lambda_r: f64,
    pub max_over_lambda_r: f64,
    pub points: usize,
}

impl Default for LogSymmetricSweep {
    fn default() -> Self {
        Self {
            min_over_lambda_r: 1e-3,
            max_over_lambda_r: 1e3,
            points: 401,
        }
    }
}

impl LogSymmetricSweep {
    /// Grid values ε/λ_R in ascending order.
    ///
    /// `points / 2` magnitudes per sign; an odd count adds ε = 0 at the centre.
    pub fn values(&self) -> Result<Vec<f64>> {
        let (lo, hi) = (self.min_over_lambda_r, self.max_over_lambda_r);
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::config(format!("log sweep needs 0 < min < max, got [{lo}, {hi}]")));
        }
        let per_side = self.points / 2;
        if per_side < 2 {
            return Err(Error::config(format!("log sweep needs at least 4 points, got {}", self.points)));
        }
        let (llo, lhi) = (lo.log10(), hi.log10());
        let mags: Vec<f64> = (0..per_side)
            .map(|k| {
                if k + 1 == per_side {
                    hi
                } else if k == 0 {
                    lo
                } else {
                    10f64.powf(llo + (lhi - llo) * k as f64 / (per_side - 1) as f64)
                }
            })
            .collect();
        let mut out: Vec<f64> = mags.iter().rev().map(|m| -m).collect();
        if self.points % 2 == 1 {
            out.push(0.0);
        }
        out.extend(mags);
        Ok(out)
    }
}

/// Everything a run can be configured with. All fields are optional; each
/// command fills in its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Rashba strengths, µeV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_r: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<i8>,
    /// Momentum direction, radians.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Explicit kinetic energies, µeV (negative values denote the hole axis).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    /// Kinetic energies in units of λ_R.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_over_lambda_r: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_range: Option<EpsilonRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<LogSymmetricSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateSpec>>,
    /// End of the time window in ħ/λ_R.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_times: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averaging: Option<AveragingSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_sampling: Option<AngleSampling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn for_command(command: Command) -> Self {
        Self {
            command: Some(command),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| Error::config("no command given"))
    }

    /// Hex SHA-256 of the settings that determine numeric output (excludes
    /// output path, format and thread count).
    pub fn content_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        canonical.format = None;
        canonical.threads = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn threads(&self) -> Result<Option<usize>> {
        match self.threads {
            Some(0) => Err(Error::config("threads must be at least 1")),
            t => Ok(t),
        }
    }

    fn lambdas(&self, default: &[f64]) -> Result<Vec<f64>> {
        let l = self.lambda_r.clone().unwrap_or_else(|| default.to_vec());
        if l.is_empty() {
            return Err(Error::config("lambda_r list is empty"));
        }
        for &x in &l {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::config(format!("lambda_r must be > 0, got {x}")));
            }
        }
        Ok(l)
    }

    fn tau(&self) -> Result<i8> {
        let tau = self.tau.unwrap_or(1);
        if tau != 1 && tau != -1 {
            return Err(Error::config(format!("tau must be +1 or -1, got {tau}")));
        }
        Ok(tau)
    }

    fn theta(&self) -> Result<f64> {
        let theta = self.theta.unwrap_or(0.0);
        if !theta.is_finite() {
            return Err(Error::config("theta must be finite"));
        }
        Ok(theta)
    }

    /// Energies for one λ_R: explicit µeV values win over multiples of λ_R.
    fn energies(&self, lambda_r: f64, default_multiples: &[f64]) -> Result<Vec<f64>> {
        if self.epsilon.is_some() && self.epsilon_over_lambda_r.is_some() {
            return Err(Error::config("give either epsilon or epsilon_over_lambda_r, not both"));
        }
        let eps = match (&self.epsilon, &self.epsilon_over_lambda_r) {
            (Some(e), _) => e.clone(),
            (None, Some(m)) => m.iter().map(|x| x * lambda_r).collect(),
            (None, None) => default_multiples.iter().map(|x| x * lambda_r).collect(),
        };
        if eps.is_empty() {
            return Err(Error::config("energy list is empty"));
        }
        if let Some(bad) = eps.iter().find(|e| !e.is_finite()) {
            return Err(Error::config(format!("energy {bad} is not finite")));
        }
        Ok(eps)
    }

    fn states(&self, default: &[NamedState]) -> Result<Vec<(String, SpinorState)>> {
        match &self.states {
            Some(list) if list.is_empty() => Err(Error::config("state list is empty")),
            Some(list) => list.iter().map(StateSpec::resolve).collect(),
            None => Ok(default.iter().map(|n| (n.name().to_string(), n.state())).collect()),
        }
    }

    fn averaging(&self) -> Result<AveragingSpec> {
        let spec = self.averaging.unwrap_or_default();
        spec.validate()?;
        Ok(spec)
    }

    fn time_grid(&self, default_end: f64, default_n: usize) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.t_end.unwrap_or(default_end), self.n_times.unwrap_or(default_n))
    }

    /// Validates everything the command needs and returns the resolved plan.
    pub fn plan(&self) -> Result<Plan> {
        self.threads()?;
        let cmd = self.command()?;
        let tau = self.tau()?;
        let theta = self.theta()?;
        let model = |eps: f64, lambda_r: f64| {
            ModelParams::new(eps.abs(), theta, lambda_r, tau).map_err(|e| Error::config(e.to_string()))
        };
        Ok(match cmd {
            Command::EigenSweep => {
                let lambdas = self.lambdas(&[LAMBDA_REF_UEV, 10.0 * LAMBDA_REF_UEV, 100.0 * LAMBDA_REF_UEV])?;
                let energies = if let Some(e) = &self.epsilon {
                    if self.epsilon_range.is_some() {
                        return Err(Error::config("give either epsilon or epsilon_range, not both"));
                    }
                    e.clone()
                } else {
                    let r = self.epsilon_range.unwrap_or(EpsilonRange {
                        min: -300.0,
                        max: 300.0,
                        points: 1201,
                    });
                    if r.points < 2 || !(r.max > r.min) {
                        return Err(Error::config("epsilon_range needs max > min and at least 2 points"));
                    }
                    (0..r.points)
                        .map(|k| r.min + (r.max - r.min) * k as f64 / (r.points - 1) as f64)
                        .collect()
                };
                let mut points = Vec::new();
                for &l in &lambdas {
                    for &e in &energies {
                        points.push((e, model(e, l)?));
                    }
                }
                Plan::EigenSweep(EigenSweepPlan { points })
            }
            Command::Dynamics => {
                let lambdas = self.lambdas(&[LAMBDA_REF_UEV])?;
                let states = self.states(&NamedState::ALL)?;
                let mut extra = Vec::new();
                for name in self.channels.iter().flatten() {
                    let ch: Channel = name.parse()?;
                    if !matches!(ch, Channel::Concurrence | Channel::Beta) && !extra.contains(&ch) {
                        extra.push(ch);
                    }
                }
                let grid = self.time_grid(4.0 * PI, 2001)?;
                let mut runs = Vec::new();
                for &l in &lambdas {
                    for e in self.energies(l, &[0.0, 1.0, 10.0])? {
                        runs.push((e, model(e, l)?));
                    }
                }
                Plan::Dynamics(DynamicsPlan {
                    runs,
                    states,
                    grid,
                    extra_channels: extra,
                })
            }
            Command::AvgSweep => {
                let lambdas = self.lambdas(&[LAMBDA_REF_UEV, 10.0 * LAMBDA_REF_UEV, 100.0 * LAMBDA_REF_UEV])?;
                let states = self.states(&NamedState::ALL)?;
                let multiples = match (&self.epsilon, &self.epsilon_over_lambda_r) {
                    (None, None) => self.sweep.unwrap_or_default().values()?,
                    _ => {
                        if self.sweep.is_some() {
                            return Err(Error::config("give either an explicit energy list or sweep, not both"));
                        }
                        Vec::new()
                    }
                };
                let mut curves = Vec::new();
                for &l in &lambdas {
                    let eps = if multiples.is_empty() {
                        self.energies(l, &[])?
                    } else {
                        multiples.iter().map(|m| m * l).collect()
                    };
                    let models = eps.iter().map(|&e| model(e, l)).collect::<Result<Vec<_>>>()?;
                    curves.push(AvgCurve {
                        lambda_r: l,
                        points: eps.into_iter().zip(models).collect(),
                    });
                }
                Plan::AvgSweep(AvgSweepPlan {
                    curves,
                    states,
                    averaging: self.averaging()?,
                })
            }
            Command::EnsembleSweep => {
                let lambdas = self.lambdas(&[LAMBDA_REF_UEV])?;
                let n = self.n.unwrap_or(1000);
                if n < 2 {
                    return Err(Error::config(format!("ensemble-sweep needs n ≥ 2, got {n}")));
                }
                let mut points = Vec::new();
                for &l in &lambdas {
                    for e in self.energies(l, &DEFAULT_ENSEMBLE_SWEEP)? {
                        points.push((e, model(e, l)?));
                    }
                }
                Plan::EnsembleSweep(EnsemblePlan {
                    points,
                    n,
                    seed: self.seed(),
                    sampling: self.angle_sampling.unwrap_or_default(),
                    averaging: self.averaging()?,
                })
            }
            Command::Chsh => {
                let lambdas = self.lambdas(&[LAMBDA_REF_UEV])?;
                if lambdas.len() != 1 {
                    return Err(Error::config("chsh takes a single lambda_r"));
                }
                let l = lambdas[0];
                let eps = match (&self.epsilon, &self.epsilon_over_lambda_r) {
                    (None, None) => vec![CHSH_EPSILON_UEV],
                    _ => self.energies(l, &[])?,
                };
                if eps.len() != 1 {
                    return Err(Error::config("chsh takes a single energy"));
                }
                let states = self.states(&[NamedState::Bell1])?;
                // two ω_R periods: 2 · 2π/(2λ_R) = 2π ħ/λ_R
                let grid = self.time_grid(2.0 * PI, 2001)?;
                Plan::Chsh(ChshPlan {
                    epsilon: eps[0],
                    params: model(eps[0], l)?,
                    states,
                    seed: self.seed(),
                    sampling: self.angle_sampling.unwrap_or_default(),
                    grid,
                })
            }
        })
    }
}

/// ε/λ_R values of the default ensemble sweep.
pub const DEFAULT_ENSEMBLE_SWEEP: [f64; 9] = [0.0, 0.1, 0.3, 2.0 / 3.0, 1.0, 3.0, 10.0, 30.0, 100.0];

/// 25 meV
pub const CHSH_EPSILON_UEV: f64 = 25_000.0;

#[derive(Clone, Debug)]
pub enum Plan {
    EigenSweep(EigenSweepPlan),
    Dynamics(DynamicsPlan),
    AvgSweep(AvgSweepPlan),
    EnsembleSweep(EnsemblePlan),
    Chsh(ChshPlan),
}

/// (signed ε in µeV, model at |ε|)
pub type EnergyPoint = (f64, ModelParams);

#[derive(Clone, Debug)]
pub struct EigenSweepPlan {
    pub points: Vec<EnergyPoint>,
}

#[derive(Clone, Debug)]
pub struct DynamicsPlan {
    pub runs: Vec<EnergyPoint>,
    pub states: Vec<(String, SpinorState)>,
    pub grid: TimeGrid,
    pub extra_channels: Vec<Channel>,
}

#[derive(Clone, Debug)]
pub struct AvgCurve {
    pub lambda_r: f64,
    pub points: Vec<EnergyPoint>,
}

#[derive(Clone, Debug)]
pub struct AvgSweepPlan {
    pub curves: Vec<AvgCurve>,
    pub states: Vec<(String, SpinorState)>,
    pub averaging: AveragingSpec,
}

#[derive(Clone, Debug)]
pub struct EnsemblePlan {
    pub points: Vec<EnergyPoint>,
    pub n: usize,
    pub seed: u64,
    pub sampling: AngleSampling,
    pub averaging: AveragingSpec,
}

#[derive(Clone, Debug)]
pub struct ChshPlan {
    pub epsilon: f64,
    pub params: ModelParams,
    pub states: Vec<(String, SpinorState)>,
    pub seed: u64,
    pub sampling: AngleSampling,
    /// In ħ/λ_R.
    pub grid: TimeGrid,
}
