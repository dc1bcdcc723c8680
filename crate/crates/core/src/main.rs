use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac_entangle::experiments::{emit_plot_script, run, Command, Figure, Format, RunConfig, StateSpec};
use dirac_entangle::{Error, Result};

/// Spin-pseudospin entanglement dynamics in graphene with Rashba coupling.
#[derive(Parser)]
#[command(name = "dirac-entangle", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenstate concurrence and Bloch magnitude versus energy (figure 1).
    EigenSweep(Common),
    /// Concurrence and β time series for named or literal states (figure 2).
    Dynamics(Common),
    /// Time-averaged concurrence versus energy (figure 3a,b).
    AvgSweep(Common),
    /// Ensemble-averaged concurrence of random states versus energy (figure 3c).
    EnsembleSweep(Common),
    /// β(t) of a Bell state and one random instance of each ensemble (figure 2, bottom).
    Chsh(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rashba strength in µeV.
    #[arg(long = "lambda-r")]
    lambda_r: Option<f64>,
    /// Kinetic energy in µeV.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Initial state: psi_x_up, psi_y_up, bell_1, bell_2 or a JSON list of four [re, im] pairs.
    /// Repeatable.
    #[arg(long)]
    state: Vec<String>,
    /// Ensemble size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write a gnuplot script for the matching figure to this path (needs --out and CSV).
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl Cmd {
    fn split(self) -> (Command, Common) {
        match self {
            Cmd::EigenSweep(c) => (Command::EigenSweep, c),
            Cmd::Dynamics(c) => (Command::Dynamics, c),
            Cmd::AvgSweep(c) => (Command::AvgSweep, c),
            Cmd::EnsembleSweep(c) => (Command::EnsembleSweep, c),
            Cmd::Chsh(c) => (Command::Chsh, c),
        }
    }
}

fn build_config(command: Command, args: &Common) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Error::config(format!("config file is for `{c}`, but `{command}` was requested")));
        }
    }
    cfg.command = Some(command);
    if let Some(l) = args.lambda_r {
        cfg.lambda_r = Some(vec![l]);
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = Some(vec![e]);
        cfg.epsilon_over_lambda_r = None;
        cfg.epsilon_range = None;
        cfg.sweep = None;
    }
    if !args.state.is_empty() {
        cfg.states = Some(args.state.iter().map(|s| StateSpec::parse_arg(s)).collect());
    }
    if args.n.is_some() {
        cfg.n = args.n;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if let Some(f) = &args.format {
        cfg.format = Some(f.parse()?);
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    Ok(cfg)
}

/// Path of `data` as seen from the directory holding `script`.
fn relative_to_script(data: &Path, script: &Path) -> String {
    let data_dir = data.parent().unwrap_or(Path::new(""));
    let script_dir = script.parent().unwrap_or(Path::new(""));
    match (data_dir == script_dir, data.file_name()) {
        (true, Some(name)) => name.to_string_lossy().into_owned(),
        _ => std::path::absolute(data)
            .unwrap_or_else(|_| data.to_path_buf())
            .to_string_lossy()
            .into_owned(),
    }
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    let cfg = build_config(command, &args)?;
    if args.plot.is_some() && (cfg.out.is_none() || cfg.format() != Format::Csv) {
        return Err(Error::config("--plot needs --out with CSV output"));
    }
    let table = run(&cfg)?;
    table.write(cfg.out.as_deref(), cfg.format())?;
    if let (Some(script), Some(out)) = (&args.plot, &cfg.out) {
        let text = emit_plot_script(&table, Figure::for_command(command), &relative_to_script(out, script))?;
        std::fs::write(script, text).map_err(|e| Error::io(script, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
