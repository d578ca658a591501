//! Command-line front end: run scenarios and sweeps, emit plot scripts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optosync::scenario::{
    defaults_document, emit_plot_scripts, parse_config, run_scenario, run_sweep, Config,
    RunManifest, PRESET_NAMES,
};
use optosync::{Error, Result};

#[derive(Parser)]
#[command(
    name = "optosync",
    version,
    about = "Synchronisation of Coulomb-coupled optomechanical resonators"
)]
struct Cli {
    /// Print every configuration key with its default value and exit.
    #[arg(long)]
    print_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (TOML). Optional when `--preset` is given.
    config: Option<PathBuf>,
    /// Start from a named preset; keys in the config file override it.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps, overriding `workers`.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario.
    Run(RunArgs),
    /// Run a parameter sweep.
    Sweep(RunArgs),
    /// Write gnuplot scripts for the run described by a manifest.
    Plot {
        /// `manifest.json`, or the directory containing it.
        manifest: PathBuf,
    },
}

fn resolve(args: &RunArgs) -> Result<Config> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.clone()),
            _ => Error::Io(e),
        })?,
        None if args.preset.is_some() => String::new(),
        None => {
            return Err(Error::Config(
                "give a config file or `--preset <name>`".into(),
            ))
        }
    };
    if let Some(name) = &args.preset {
        if !PRESET_NAMES.contains(&name.as_str()) {
            return Err(Error::Config(format!(
                "unknown preset `{name}`; available: {}",
                PRESET_NAMES.join(", ")
            )));
        }
        text.push_str(&format!("\npreset = {name:?}\n"));
    }
    if let Some(w) = args.workers {
        text.push_str(&format!("\nworkers = {w}\n"));
    }
    let mut config = parse_config(&text).map_err(|e| match (&args.config, e) {
        (Some(path), Error::Config(msg)) => Error::Config(format!("{}: {msg}", path.display())),
        (_, e) => e,
    })?;
    if let Some(out) = &args.out {
        config.set_output_dir(out.clone());
    }
    Ok(config)
}

fn report(m: &RunManifest) {
    println!("output: {}", m.output_dir.display());
    if let Some(l) = &m.phase_locking {
        println!(
            "phase locking: locked={} circular_std={:.4} drift={:.4}",
            l.locked, l.circular_std, l.drift
        );
    }
    if let Some(s) = &m.steady {
        println!(
            "steady means: S_c={:.6} S_phi={:.6} S_p={:.6}",
            s.s_c.mean, s.s_phi.mean, s.s_p.mean
        );
    }
    for p in &m.points {
        let status = if p.failed { "FAILED" } else { "ok" };
        println!("{}: {status}", p.dir.display());
    }
    let d = &m.diagnostics;
    if d.physicality_warnings > 0 {
        eprintln!(
            "warning: {} snapshots below the physicality bound",
            d.physicality_warnings
        );
    }
    if let Some(tau) = d.divergence_tau {
        eprintln!("error: integration diverged at tau = {tau}; partial output kept");
    }
    for e in &d.errors {
        eprintln!("warning: {e}");
    }
}

fn execute(cli: Cli) -> Result<bool> {
    if cli.print_defaults {
        print!("{}", defaults_document());
        return Ok(true);
    }
    let Some(command) = cli.command else {
        return Err(Error::Config(
            "no command given; see `optosync --help`".into(),
        ));
    };
    match command {
        Command::Run(args) => match resolve(&args)? {
            Config::Scenario(c) => {
                let m = run_scenario(&c)?;
                report(&m);
                Ok(!m.failed())
            }
            Config::Sweep(_) => Err(Error::Config(
                "this configuration is a sweep; use `optosync sweep`".into(),
            )),
        },
        Command::Sweep(args) => match resolve(&args)? {
            Config::Sweep(s) => {
                let m = run_sweep(&s)?;
                report(&m);
                Ok(!m.failed())
            }
            Config::Scenario(_) => Err(Error::Config(
                "no swept parameter; set `sweep_param` and `sweep_values`".into(),
            )),
        },
        Command::Plot { manifest } => {
            for path in emit_plot_scripts(&manifest)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
