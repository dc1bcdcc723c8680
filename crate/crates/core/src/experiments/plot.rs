//! Gnuplot scripts for the three figures.
//!
//! Scripts reference the data file by the path given (normally relative to
//! the script) and select rows by comparing columns against literal values
//! written with the same shortest round-trip formatting as the CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use super::config::Command;
use super::table::ResultTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    /// Figure drawn from a command's output.
    pub fn for_command(cmd: Command) -> Figure {
        match cmd {
            Command::EigenSweep => Figure::Fig1,
            Command::Dynamics | Command::Chsh => Figure::Fig2,
            Command::AvgSweep | Command::EnsembleSweep => Figure::Fig3,
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(Error::config(format!("unknown figure `{other}`; expected fig1, fig2 or fig3"))),
        }
    }
}

/// 1-based gnuplot column numbers for `names`, or a schema error naming the
/// first one that is missing.
fn require(table: &ResultTable, figure: Figure, names: &[&str]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            table.column_index(n).map(|i| i + 1).ok_or_else(|| Error::Schema {
                figure: figure.name().to_string(),
                column: n.to_string(),
            })
        })
        .collect()
}

/// Distinct values of a column in order of first appearance.
fn distinct_numbers(table: &ResultTable, name: &str) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in table.numeric_column(name).unwrap_or_default() {
        if !out.iter().any(|x| x.to_bits() == v.to_bits()) {
            out.push(v);
        }
    }
    out
}

fn distinct_text(table: &ResultTable, name: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in table.text_column(name).unwrap_or_default() {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn preamble(data: &str, title: &str) -> String {
    format!(
        "# {title}\n\
         set datafile separator comma\n\
         set datafile commentschars '#'\n\
         data = '{data}'\n\
         set key top right\n"
    )
}

pub fn emit_plot_script(table: &ResultTable, figure: Figure, data_file: &str) -> Result<String> {
    match figure {
        Figure::Fig1 => fig1(table, data_file),
        Figure::Fig2 if table.column_index("state").is_none() && table.columns.iter().any(|c| c.name.starts_with("beta_")) => {
            fig2_chsh(table, data_file)
        }
        Figure::Fig2 => fig2(table, data_file),
        Figure::Fig3 if table.column_index("ensemble").is_some() => fig3_ensemble(table, data_file),
        Figure::Fig3 => fig3_average(table, data_file),
    }
}

fn fig1(table: &ResultTable, data: &str) -> Result<String> {
    let c = require(table, Figure::Fig1, &["epsilon", "lambda_R", "concurrence", "bloch_magnitude"])?;
    let (e, l, conc, bloch) = (c[0], c[1], c[2], c[3]);
    let lambdas = distinct_numbers(table, "lambda_R");
    let mut s = preamble(data, "Eigenstate concurrence and Bloch-vector magnitude versus energy");
    s.push_str("set multiplot layout 1,2\nset xlabel 'ε (µeV)'\nset yrange [0:1.05]\n");
    for (col, ylabel) in [(conc, "C"), (bloch, "|s|, |σ|")] {
        let _ = writeln!(s, "set ylabel '{ylabel}'");
        let curves: Vec<String> = lambdas
            .iter()
            .map(|lam| {
                format!(
                    "data skip 1 using {e}:(${l} == {lam} ? ${col} : 1/0) with lines title 'λ_R = {lam} µeV'"
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    }
    s.push_str("unset multiplot\n");
    Ok(s)
}

fn fig2(table: &ResultTable, data: &str) -> Result<String> {
    let c = require(table, Figure::Fig2, &["state", "epsilon", "t_over_hbar_lambdaR", "C", "beta"])?;
    let (st, e, t, conc, beta) = (c[0], c[1], c[2], c[3], c[4]);
    let energies = distinct_numbers(table, "epsilon");
    let states = distinct_text(table, "state");
    let mut s = preamble(data, "Concurrence and CHSH parameter versus time");
    s.push_str("set multiplot layout 4,1\nset xlabel 't (ħ/λ_R)'\n");
    let panel = |s: &mut String, eps: f64, col: usize, ylabel: &str, yrange: &str| {
        let _ = writeln!(s, "set ylabel '{ylabel}'\nset yrange {yrange}\nset title 'ε = {eps} µeV'");
        let curves: Vec<String> = states
            .iter()
            .map(|name| {
                format!(
                    "data skip 1 using {t}:(strcol({st}) eq '{name}' && ${e} == {eps} ? ${col} : 1/0) with lines title '{name}'"
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    };
    for &eps in energies.iter().take(3) {
        panel(&mut s, eps, conc, "C", "[0:1.05]");
    }
    if let Some(&eps) = energies.last() {
        panel(&mut s, eps, beta, "β", "[0.95:1.45]");
    }
    s.push_str("unset multiplot\n");
    Ok(s)
}

fn fig2_chsh(table: &ResultTable, data: &str) -> Result<String> {
    let t = require(table, Figure::Fig2, &["t_over_hbar_lambdaR"])?[0];
    let mut s = preamble(data, "CHSH parameter versus time");
    s.push_str("set xlabel 't (ħ/λ_R)'\nset ylabel 'β'\nset yrange [0.95:1.45]\n");
    let curves: Vec<String> = table
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.name.starts_with("beta_"))
        .map(|(i, c)| {
            format!(
                "data skip 1 using {t}:{} with lines title '{}'",
                i + 1,
                c.name.trim_start_matches("beta_")
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    Ok(s)
}

fn fig3_average(table: &ResultTable, data: &str) -> Result<String> {
    let c = require(table, Figure::Fig3, &["state", "lambda_R", "epsilon", "avg_C"])?;
    let (st, l, e, avg) = (c[0], c[1], c[2], c[3]);
    let lambdas = distinct_numbers(table, "lambda_R");
    let states = distinct_text(table, "state");
    let mut s = preamble(data, "Time-averaged concurrence versus energy");
    s.push_str("set multiplot layout 2,1\nset xlabel 'ε (meV)'\nset ylabel '⟨C⟩'\nset yrange [0:1.05]\n");
    for lam in &lambdas {
        for (x, style) in [(2.0 / 3.0, 2), (1.0, 3)] {
            for sign in [-1.0, 1.0] {
                let _ = writeln!(
                    s,
                    "set arrow from {}, graph 0 to {}, graph 1 nohead dashtype {style}",
                    sign * x * lam / 1000.0,
                    sign * x * lam / 1000.0
                );
            }
        }
    }
    let groups: [&[&str]; 2] = [&["psi_x_up", "psi_y_up"], &["bell_1", "bell_2"]];
    for group in groups {
        let mut curves = Vec::new();
        for name in states.iter().filter(|n| group.contains(&n.as_str())) {
            for lam in &lambdas {
                curves.push(format!(
                    "data skip 1 using (${e}/1000):(strcol({st}) eq '{name}' && ${l} == {lam} ? ${avg} : 1/0) with lines title '{name}, λ_R = {lam} µeV'"
                ));
            }
        }
        if !curves.is_empty() {
            let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
        }
    }
    s.push_str("unset multiplot\n");
    Ok(s)
}

fn fig3_ensemble(table: &ResultTable, data: &str) -> Result<String> {
    let c = require(table, Figure::Fig3, &["epsilon", "ensemble", "mean", "std_error"])?;
    let (e, ens, mean, se) = (c[0], c[1], c[2], c[3]);
    let mut s = preamble(data, "Ensemble-averaged concurrence versus energy");
    s.push_str("set xlabel 'ε (µeV)'\nset ylabel '⟨⟨C⟩⟩'\nset yrange [0:1]\n");
    let mut curves = Vec::new();
    for label in distinct_text(table, "ensemble") {
        let style = if label == "haar_t0" {
            "lines dashtype 2".to_string()
        } else {
            "yerrorlines".to_string()
        };
        let using = if label == "haar_t0" {
            format!("{e}:(strcol({ens}) eq '{label}' ? ${mean} : 1/0)")
        } else {
            format!("{e}:(strcol({ens}) eq '{label}' ? ${mean} : 1/0):{se}")
        };
        curves.push(format!("data skip 1 using {using} with {style} title '{label}'"));
    }
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    Ok(s)
}
