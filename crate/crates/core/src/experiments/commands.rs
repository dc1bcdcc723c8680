//! The five figure-reproduction commands.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::{
    AvgSweepPlan, ChshPlan, Command, DynamicsPlan, EigenSweepPlan, EnsemblePlan, Plan, RunConfig,
};
use super::table::{Cell, Column, ResultTable};
use crate::analysis::interior_extrema;
use crate::dynamics::{make_propagator, trajectory, Channel, TimeGrid};
use crate::entanglement::{
    concurrence, ensemble_average, ensemble_initial_concurrence, time_averaged_concurrence, EnsembleKind,
};
use crate::error::{Error, Result};
use crate::model::eigensystem;
use crate::state::bloch_vectors;
use crate::units::{time_from_rashba_units, time_to_ns};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Prominence an averaged curve needs before an interior extremum is marked.
pub const EXTREMUM_PROMINENCE: f64 = 0.02;

/// Validates `cfg`, then runs its command on a pool of `cfg.threads` workers
/// (rayon's default pool when unset).
pub fn run(cfg: &RunConfig) -> Result<ResultTable> {
    let plan = cfg.plan()?;
    let mut table = match cfg.threads()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("cannot start {n} worker threads: {e}")))?
            .install(|| execute(&plan))?,
        None => execute(&plan)?,
    };
    table.set_provenance("tool", format!("dirac-entangle {VERSION}"));
    table.set_provenance("command", cfg.command()?.name());
    table.set_provenance("seed", cfg.seed().to_string());
    table.set_provenance("config_sha256", cfg.content_hash());
    table.set_provenance("float_mode", "IEEE-754 binary64, no fast-math or FMA contraction");
    Ok(table)
}

fn execute(plan: &Plan) -> Result<ResultTable> {
    match plan {
        Plan::EigenSweep(p) => eigen_sweep(p),
        Plan::Dynamics(p) => dynamics(p),
        Plan::AvgSweep(p) => avg_sweep(p),
        Plan::EnsembleSweep(p) => ensemble_sweep(p),
        Plan::Chsh(p) => chsh(p),
    }
}

fn with_command(cfg: &RunConfig, command: Command) -> RunConfig {
    let mut c = cfg.clone();
    c.command = Some(command);
    c
}

pub fn cmd_eigen_sweep(cfg: &RunConfig) -> Result<ResultTable> {
    run(&with_command(cfg, Command::EigenSweep))
}

pub fn cmd_dynamics(cfg: &RunConfig) -> Result<ResultTable> {
    run(&with_command(cfg, Command::Dynamics))
}

pub fn cmd_avg_sweep(cfg: &RunConfig) -> Result<ResultTable> {
    run(&with_command(cfg, Command::AvgSweep))
}

pub fn cmd_ensemble_sweep(cfg: &RunConfig) -> Result<ResultTable> {
    run(&with_command(cfg, Command::EnsembleSweep))
}

pub fn cmd_chsh(cfg: &RunConfig) -> Result<ResultTable> {
    run(&with_command(cfg, Command::Chsh))
}

fn eigen_sweep(plan: &EigenSweepPlan) -> Result<ResultTable> {
    let rows = plan
        .points
        .par_iter()
        .map(|(eps, params)| {
            let es = eigensystem(params)?;
            // e+ for ε ≥ 0, h+ on the hole side of the axis
            let level = if *eps < 0.0 { &es.levels()[0] } else { &es.levels()[3] };
            let c = concurrence(&level.state).value();
            let b = bloch_vectors(&level.state);
            Ok(vec![
                Cell::Num(*eps),
                Cell::Num(params.lambda_r()),
                Cell::Num(c),
                Cell::Num(0.5 * (b.spin_magnitude() + b.pseudospin_magnitude())),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(vec![
        Column::new("epsilon", "ueV"),
        Column::new("lambda_R", "ueV"),
        Column::new("concurrence", "1"),
        Column::new("bloch_magnitude", "1"),
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn dynamics(plan: &DynamicsPlan) -> Result<ResultTable> {
    let mut channels = vec![Channel::Concurrence, Channel::Beta];
    channels.extend(plan.extra_channels.iter().copied());
    let mut columns = vec![
        Column::new("state", "-"),
        Column::new("lambda_R", "ueV"),
        Column::new("epsilon", "ueV"),
        Column::new("t_over_hbar_lambdaR", "1"),
        Column::new("t_ns", "ns"),
    ];
    columns.extend(channels.iter().map(|c| Column::new(c.name(), "1")));
    let mut t = ResultTable::new(columns);

    for (eps, params) in &plan.runs {
        let lambda = params.lambda_r();
        let p = make_propagator(params)?;
        let grid = TimeGrid::new(
            time_from_rashba_units(plan.grid.t_start(), lambda),
            time_from_rashba_units(plan.grid.t_end(), lambda),
            plan.grid.len(),
        )?;
        for (name, state) in &plan.states {
            let series = trajectory(&p, state, &grid, &channels);
            for k in 0..grid.len() {
                let mut row = vec![
                    Cell::Text(name.clone()),
                    Cell::Num(lambda),
                    Cell::Num(*eps),
                    Cell::Num(plan.grid.time(k)),
                    Cell::Num(time_to_ns(grid.time(k))),
                ];
                row.extend(series.channels.iter().map(|(_, v)| Cell::Num(v[k])));
                t.push(row);
            }
        }
    }
    Ok(t)
}

fn avg_sweep(plan: &AvgSweepPlan) -> Result<ResultTable> {
    let mut t = ResultTable::new(vec![
        Column::new("state", "-"),
        Column::new("lambda_R", "ueV"),
        Column::new("epsilon", "ueV"),
        Column::new("epsilon_over_lambdaR", "1"),
        Column::new("avg_C", "1"),
        Column::new("extremum", "-"),
    ]);
    for curve in &plan.curves {
        // the average is even in ε: compute each |ε| once
        let mut unique: BTreeMap<u64, usize> = BTreeMap::new();
        let mut models = Vec::new();
        for (_, m) in &curve.points {
            unique.entry(m.epsilon().to_bits()).or_insert_with(|| {
                models.push(*m);
                models.len() - 1
            });
        }
        let props = models.iter().map(make_propagator).collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(usize, usize)> = (0..plan.states.len())
            .flat_map(|s| (0..props.len()).map(move |m| (s, m)))
            .collect();
        let values: Vec<f64> = jobs
            .par_iter()
            .map(|&(s, m)| time_averaged_concurrence(&props[m], &plan.states[s].1, &plan.averaging))
            .collect();
        let value = |s: usize, eps_abs: f64| values[s * props.len() + unique[&eps_abs.to_bits()]];

        for (s, (name, _)) in plan.states.iter().enumerate() {
            let avg: Vec<f64> = curve.points.iter().map(|(_, m)| value(s, m.epsilon())).collect();
            let marks = extremum_marks(&curve.points.iter().map(|(e, _)| *e).collect::<Vec<_>>(), &avg);
            for (k, (eps, _)) in curve.points.iter().enumerate() {
                t.push(vec![
                    Cell::Text(name.clone()),
                    Cell::Num(curve.lambda_r),
                    Cell::Num(*eps),
                    Cell::Num(eps / curve.lambda_r),
                    Cell::Num(avg[k]),
                    Cell::Text(marks[k].to_string()),
                ]);
            }
        }
    }
    Ok(t)
}

/// Interior extrema of the ε > 0 branch, mirrored onto matching ε < 0 points.
fn extremum_marks(eps: &[f64], avg: &[f64]) -> Vec<&'static str> {
    let mut marks = vec!["none"; eps.len()];
    let mut positive: Vec<usize> = (0..eps.len()).filter(|&k| eps[k] > 0.0).collect();
    positive.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
    let branch: Vec<f64> = positive.iter().map(|&k| avg[k]).collect();
    for (i, kind) in interior_extrema(&branch, EXTREMUM_PROMINENCE) {
        let k = positive[i];
        marks[k] = kind.label();
        if let Some(mirror) = (0..eps.len()).find(|&j| eps[j] == -eps[k]) {
            marks[mirror] = kind.label();
        }
    }
    marks
}

fn ensemble_sweep(plan: &EnsemblePlan) -> Result<ResultTable> {
    let mut t = ResultTable::new(vec![
        Column::new("lambda_R", "ueV"),
        Column::new("epsilon", "ueV"),
        Column::new("epsilon_over_lambdaR", "1"),
        Column::new("ensemble", "-"),
        Column::new("mean", "1"),
        Column::new("std_error", "1"),
        Column::new("n", "1"),
    ]);
    let kinds = [EnsembleKind::Haar, EnsembleKind::Separable(plan.sampling)];
    let reference = ensemble_initial_concurrence(EnsembleKind::Haar, plan.n, plan.seed)?;
    for (eps, params) in &plan.points {
        let lambda = params.lambda_r();
        let mut push = |label: &str, mean: f64, se: f64, n: usize| {
            t.push(vec![
                Cell::Num(lambda),
                Cell::Num(*eps),
                Cell::Num(eps / lambda),
                Cell::Text(label.to_string()),
                Cell::Num(mean),
                Cell::Num(se),
                Cell::Num(n as f64),
            ])
        };
        for kind in kinds {
            let s = ensemble_average(params, kind, plan.n, &plan.averaging, plan.seed)?;
            push(&s.label, s.mean, s.std_error, s.n);
        }
        push("haar_t0", reference.mean, reference.std_error, reference.n);
    }
    Ok(t)
}

fn chsh(plan: &ChshPlan) -> Result<ResultTable> {
    let lambda = plan.params.lambda_r();
    let p = make_propagator(&plan.params)?;
    let grid = TimeGrid::new(
        time_from_rashba_units(plan.grid.t_start(), lambda),
        time_from_rashba_units(plan.grid.t_end(), lambda),
        plan.grid.len(),
    )?;
    let mut states = plan.states.clone();
    for kind in [EnsembleKind::Haar, EnsembleKind::Separable(plan.sampling)] {
        states.push((kind.label().to_string(), kind.member(plan.seed, 0)));
    }
    let mut columns = vec![Column::new("t_over_hbar_lambdaR", "1"), Column::new("t_ns", "ns")];
    columns.extend(states.iter().map(|(n, _)| Column::new(&format!("beta_{n}"), "1")));
    let betas: Vec<Vec<f64>> = states
        .iter()
        .map(|(_, s)| {
            let series = trajectory(&p, s, &grid, &[Channel::Beta]);
            series.channels[0].1.clone()
        })
        .collect();
    let mut t = ResultTable::new(columns);
    for k in 0..grid.len() {
        let mut row = vec![Cell::Num(plan.grid.time(k)), Cell::Num(time_to_ns(grid.time(k)))];
        row.extend(betas.iter().map(|b| Cell::Num(b[k])));
        t.push(row);
    }
    t.set_provenance("epsilon_ueV", format!("{}", plan.epsilon));
    t.set_provenance("lambda_R_ueV", format!("{lambda}"));
    Ok(t)
}

#[cfg(test)]
#[allow(clippy::field_reassign_with_default)]
mod tests {
    use super::*;
    use crate::entanglement::AveragingSpec;
    use crate::experiments::config::{EpsilonRange, LogSymmetricSweep, StateSpec};

    fn col(t: &ResultTable, name: &str) -> Vec<f64> {
        t.numeric_column(name).unwrap()
    }

    #[test]
    fn eigen_sweep_follows_closed_forms() {
        let mut cfg = RunConfig::default();
        cfg.lambda_r = Some(vec![37.5]);
        cfg.epsilon = Some(vec![-300.0, 0.0, 37.5, 300.0]);
        let t = cmd_eigen_sweep(&cfg).unwrap();
        let c = col(&t, "concurrence");
        let b = col(&t, "bloch_magnitude");
        assert!((c[1] - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12);
        assert!((c[2] - 0.5f64.sqrt()).abs() < 1e-12 && (b[2] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((c[3] - 0.12403).abs() < 1e-5);
        assert!((c[0] - c[3]).abs() < 1e-12);
    }

    #[test]
    fn default_eigen_sweep_spacing() {
        let mut cfg = RunConfig::default();
        cfg.lambda_r = Some(vec![37.5]);
        cfg.epsilon_range = Some(EpsilonRange {
            min: -300.0,
            max: 300.0,
            points: 1201,
        });
        let t = cmd_eigen_sweep(&cfg).unwrap();
        let e = col(&t, "epsilon");
        assert_eq!(e.len(), 1201);
        assert_eq!(e[600], 0.0);
        assert_eq!(e[601], 0.5);
    }

    #[test]
    fn dynamics_bell_2_at_neutrality() {
        let mut cfg = RunConfig::default();
        cfg.states = Some(vec![StateSpec::Name("bell_2".into())]);
        cfg.epsilon = Some(vec![0.0]);
        cfg.channels = Some(vec!["sz".into()]);
        let t = cmd_dynamics(&cfg).unwrap();
        let tr = col(&t, "t_over_hbar_lambdaR");
        let c = col(&t, "C");
        let beta = col(&t, "beta");
        assert_eq!(c.len(), 2001);
        assert!(t.column_index("sz").is_some());
        for k in 0..c.len() {
            assert!((c[k] - (4.0 * tr[k]).cos().abs()).abs() < 1e-10);
            assert!((beta[k] - (1.0 + c[k] * c[k]).sqrt()).abs() < 1e-14);
        }
        let ns = col(&t, "t_ns");
        assert!((ns[2000] / tr[2000] - 0.6582119569 / 37.5).abs() < 1e-12);
    }

    #[test]
    fn dynamics_psi_x_high_energy_stays_weakly_entangled() {
        let mut cfg = RunConfig::default();
        cfg.states = Some(vec![StateSpec::Name("psi_x_up".into())]);
        cfg.epsilon_over_lambda_r = Some(vec![10.0]);
        let t = cmd_dynamics(&cfg).unwrap();
        let max = col(&t, "C").into_iter().fold(0.0, f64::max);
        assert!(max < 0.2, "max C = {max}");
    }

    #[test]
    fn unknown_state_lists_names() {
        let mut cfg = RunConfig::default();
        cfg.states = Some(vec![StateSpec::Name("psi_z".into())]);
        let err = cmd_dynamics(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        for n in ["psi_x_up", "psi_y_up", "bell_1", "bell_2"] {
            assert!(err.to_string().contains(n));
        }
    }

    #[test]
    fn avg_sweep_is_mirror_symmetric() {
        let mut cfg = RunConfig::default();
        cfg.lambda_r = Some(vec![37.5]);
        cfg.states = Some(vec![StateSpec::Name("psi_x_up".into())]);
        cfg.sweep = Some(LogSymmetricSweep {
            min_over_lambda_r: 0.05,
            max_over_lambda_r: 20.0,
            points: 41,
        });
        cfg.averaging = Some(AveragingSpec::new(200.0 * std::f64::consts::PI, 4096).unwrap());
        let t = cmd_avg_sweep(&cfg).unwrap();
        let a = col(&t, "avg_C");
        assert_eq!(a.len(), 41);
        for k in 0..20 {
            assert_eq!(a[k], a[40 - k]);
        }
        let marks = t.text_column("extremum").unwrap();
        let maxes: Vec<usize> = (0..41).filter(|&k| marks[k] == "max").collect();
        assert_eq!(maxes.len(), 2);
        assert_eq!(maxes[0], 40 - maxes[1]);
    }

    #[test]
    fn extremum_marks_mirror() {
        let eps = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let avg = [0.1, 0.5, 0.3, 0.5, 0.1, 0.05];
        let m = extremum_marks(&eps, &avg);
        assert_eq!(m, vec!["none", "none", "none", "none", "none", "none"]);
        let avg = [0.1, 0.5, 0.3, 0.3, 0.5, 0.1];
        let eps = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let m = extremum_marks(&eps, &avg);
        assert_eq!(m[4], "max");
        assert_eq!(m[0], "max");
    }

    #[test]
    fn ensemble_sweep_rows() {
        let mut cfg = RunConfig::default();
        cfg.n = Some(16);
        cfg.epsilon_over_lambda_r = Some(vec![0.0, 1.0]);
        cfg.averaging = Some(AveragingSpec::new(200.0 * std::f64::consts::PI, 4096).unwrap());
        let t = cmd_ensemble_sweep(&cfg).unwrap();
        assert_eq!(t.rows.len(), 6);
        let labels = t.text_column("ensemble").unwrap();
        assert_eq!(labels[..3], ["haar", "separable", "haar_t0"]);
        assert_eq!(t.provenance("seed"), Some("20200721"));
    }

    #[test]
    fn chsh_bounds_and_columns() {
        let mut cfg = RunConfig::default();
        cfg.n_times = Some(401);
        let t = cmd_chsh(&cfg).unwrap();
        for name in ["beta_bell_1", "beta_haar", "beta_separable"] {
            for b in col(&t, name) {
                assert!((1.0 - 1e-15..=2f64.sqrt() + 1e-15).contains(&b));
            }
        }
    }

    #[test]
    fn provenance_footer() {
        let mut cfg = RunConfig::default();
        cfg.lambda_r = Some(vec![37.5]);
        cfg.epsilon = Some(vec![1.0]);
        let t = cmd_eigen_sweep(&cfg).unwrap();
        assert!(t.provenance("tool").unwrap().contains(VERSION));
        assert_eq!(t.provenance("config_sha256").unwrap().len(), 64);
        assert_eq!(t.provenance("command"), Some("eigen-sweep"));
    }
}
