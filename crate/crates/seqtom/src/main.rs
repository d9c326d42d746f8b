//! Command-line front end for the sequential-measurement estimation
//! experiments. Exit codes: 0 on success, 1 on a configuration error,
//! 2 on a runtime error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seqtom::harness::{parse_config, run_experiment, ExperimentSummary, RunConfig, Scenario};
use seqtom::Error;

#[derive(Parser)]
#[command(name = "seqtom", version, about = "Qubit state monitoring and process tomography from sequential unsharp measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write the aggregated metrics as CSV.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario: "frequency" or "process". Required unless the config file
    /// provides it.
    #[arg(long)]
    scenario: Option<String>,

    /// TOML config file; unset fields fall back to the scenario defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Number of Monte-Carlo runs.
    #[arg(long)]
    runs: Option<usize>,

    /// Number of measurements per run.
    #[arg(long)]
    measurements: Option<usize>,

    /// Individual measurement strength in (0, 1].
    #[arg(long = "delta-p")]
    delta_p: Option<f64>,

    /// Measurement period as a fraction of the nominal period 2π/Ω₀.
    #[arg(long = "tau-frac")]
    tau_frac: Option<f64>,

    /// Master seed for the whole experiment.
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Dump run 0's posterior every K steps (to `<out>.posteriors.csv`
    /// unless the config names a path).
    #[arg(long = "dump-posteriors", value_name = "EVERY_K")]
    dump_posteriors: Option<usize>,

    /// Worker threads (0 = auto). Env var SEQTOM_THREADS is used when the
    /// flag is absent.
    #[arg(long)]
    threads: Option<usize>,
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let scenario_flag = args
        .scenario
        .as_deref()
        .map(str::parse::<Scenario>)
        .transpose()?;

    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::ConfigValidation {
            field: "config",
            message: format!("cannot read {}: {e}", path.display()),
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, scenario_flag)?;

    if let Some(v) = args.runs {
        cfg.n_runs = v;
    }
    if let Some(v) = args.measurements {
        cfg.n_measurements = v;
    }
    if let Some(v) = args.delta_p {
        cfg.delta_p = v;
    }
    if let Some(v) = args.tau_frac {
        cfg.tau_fraction = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(path) = &args.out {
        cfg.output.csv = Some(path.clone());
    }
    if let Some(every) = args.dump_posteriors {
        cfg.output.posterior_every = Some(every);
        if cfg.output.posterior_csv.is_none() {
            let base = cfg.output.csv.as_ref().ok_or(Error::ConfigValidation {
                field: "output.posterior_csv",
                message: "--dump-posteriors needs --out (or output.posterior_csv in the config)"
                    .into(),
            })?;
            let mut p = base.clone().into_os_string();
            p.push(".posteriors.csv");
            cfg.output.posterior_csv = Some(PathBuf::from(p));
        }
    }
    if let Some(v) = args.threads {
        cfg.threads = Some(v);
    } else if cfg.threads.is_none() {
        if let Ok(env) = std::env::var("SEQTOM_THREADS") {
            let v = env.parse::<usize>().map_err(|_| Error::ConfigValidation {
                field: "threads",
                message: format!("SEQTOM_THREADS must be an integer, got \"{env}\""),
            })?;
            cfg.threads = Some(v);
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

fn print_summary<W: Write>(w: &mut W, cfg: &RunConfig, s: &ExperimentSummary) -> std::io::Result<()> {
    writeln!(
        w,
        "scenario: {}",
        match cfg.scenario {
            Scenario::Frequency => "frequency",
            Scenario::Process => "process",
        }
    )?;
    writeln!(
        w,
        "runs: {}   measurements: {}   seed: {}",
        s.n_runs, s.n_measurements, cfg.master_seed
    )?;
    writeln!(
        w,
        "true parameter: omega={:.6} theta={:.6} phi={:.6}",
        s.truth.omega, s.truth.theta, s.truth.phi
    )?;
    writeln!(
        w,
        "MAP parameter:  omega={:.6} theta={:.6} phi={:.6}   (hit rate {:.3})",
        s.map_point.omega, s.map_point.theta, s.map_point.phi, s.map_hit_rate
    )?;
    writeln!(
        w,
        "final classical fidelity: {:.6}   final quantum fidelity: {:.6}",
        s.final_classical_fidelity, s.final_quantum_fidelity
    )?;
    writeln!(w, "wall time: {:.2} s", s.wall_time.as_secs_f64())
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let cfg = build_config(args)?;
    let summary = run_experiment(&cfg)?;

    if cfg.output.csv.is_some() {
        let mut out = std::io::stdout().lock();
        print_summary(&mut out, &cfg, &summary)?;
    } else {
        // CSV goes to stdout, summary to stderr
        let mut out = std::io::stdout().lock();
        summary.aggregate.write_csv(&mut out)?;
        out.flush()?;
        let mut err = std::io::stderr().lock();
        print_summary(&mut err, &cfg, &summary)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(1);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };

    let Command::Run(args) = &cli.command;
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
