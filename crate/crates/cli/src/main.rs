//! `fracent`: figure presets, custom configs and spot checks from the shell.
//!
//! Exit codes: 0 within tolerance, 1 tolerance failure, 2 usage or config
//! error, 3 numerical error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracent::experiment::{run_custom, run_figure, ExperimentConfig, OutputBundle, RunOptions};
use fracent::fractal::approximate_dimension;
use fracent::oracle::run_oracle_suite;
use fracent::su2::{SchmidtTable, SpinS};
use fracent::Error;

#[derive(Parser, Debug)]
#[command(name = "fracent", version, about = "Entanglement entropy of fractal-supported ferromagnetic ground states")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Symmetric trim fraction of the fit window, in [0, 0.5).
    #[arg(long, global = true)]
    trim: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce a figure preset (fig1a ... fig8, nb-su2, nb-so4, nb-su3).
    Figure { id: String },
    /// Run a TOML experiment config.
    Run { config: PathBuf },
    /// Find a Cantor spec whose dimension is within eps of target.
    DenseDim { target: f64, eps: f64 },
    /// Compare the pipeline against the dense oracle on random small cases.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Print the Schmidt coefficients λ(L, n, κ, M) for all κ.
    Schmidt {
        l: usize,
        n: usize,
        m: usize,
        #[arg(long = "two-s", default_value_t = 1)]
        two_s: u32,
    },
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::Domain(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn report(bundle: &OutputBundle, out_dir: &Path) -> Result<ExitCode, Error> {
    let files = bundle.write(out_dir)?;
    for run in &bundle.runs {
        let s = &run.summary;
        let target = s.target.map_or("-".to_string(), |t| format!("{t:.5}"));
        let err = s.rel_err.map_or("-".to_string(), |e| format!("{:.2}%", 100.0 * e));
        let tol = s.tolerance.map_or("-".to_string(), |t| format!("{:.1}%", 100.0 * t));
        println!(
            "{} {} d_f={:.5} target={target} rel_err={err} tol={tol} {} ({:.1}s)",
            bundle.id,
            s.tag,
            s.d_f,
            if s.pass { "PASS" } else { "FAIL" },
            s.runtime_s
        );
    }
    if let Some(note) = &bundle.note {
        println!("note: {note}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(if bundle.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn load_config(path: &Path, cli: &Cli) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.trim.is_some() {
        cfg.trim = cli.trim;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    if let Some(t) = cli.trim {
        if !(0.0..0.5).contains(&t) {
            return Err(Error::Config(format!("--trim must lie in [0, 0.5), got {t}")));
        }
    }
    match &cli.command {
        Command::Figure { id } => {
            let bundle = run_figure(id, RunOptions { seed: cli.seed, trim: cli.trim })?;
            report(&bundle, &cli.out_dir)
        }
        Command::Run { config } => {
            let cfg = load_config(config, cli)?;
            let mut bundle = run_custom(&cfg)?;
            if let Some(stem) = config.file_stem().and_then(|s| s.to_str()) {
                bundle.id = stem.to_string();
            }
            report(&bundle, &cli.out_dir)
        }
        Command::DenseDim { target, eps } => {
            let spec = approximate_dimension(*target, *eps)?;
            println!(
                "{{\"N\": {}, \"inv_r\": {}, \"dimension\": {:.17e}, \"target\": {target}, \"eps\": {eps}}}",
                spec.n(),
                spec.inv_r(),
                spec.dimension()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { cases } => {
            let rep = run_oracle_suite(*cases, cli.seed.unwrap_or(0))?;
            println!("{}", serde_json::to_string_pretty(&rep).map_err(|e| Error::Numerical(e.to_string()))?);
            Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Schmidt { l, n, m, two_s } => {
            let spin = SpinS::new(*two_s)?;
            if *n == 0 || n >= l || *m > spin.max_m(*l) {
                return Err(Error::Domain(format!(
                    "need 1 <= n < L and M <= 2sL, got L = {l}, n = {n}, M = {m}"
                )));
            }
            let table = SchmidtTable::new(*l, *n, spin)?;
            println!("kappa,lambda");
            for kappa in 0..=spin.max_m(*n) {
                println!("{kappa},{:.17e}", table.lambda(kappa, *m));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // A second initialization only happens in tests; the first pool wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
