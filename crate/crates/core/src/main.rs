use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ldg_core::config::{ParamEntry, SweepConfig};
use ldg_core::output::{csv_row, CSV_HEADER};
use ldg_core::sweep::{run_single, run_sweep, SweepOutcome};
use ldg_core::tensor::{s_star, MaterialParams};
use ldg_core::Error;

/// Landau-de Gennes Q-tensor minimizer and temperature sweep driver.
#[derive(Parser, Debug)]
#[command(name = "ldg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimize a single (t, seed) configuration.
    Run(CommonArgs),
    /// Sweep all temperatures and seeds of a configuration.
    Sweep(CommonArgs),
    /// Print the reduced parameters of a configuration.
    Info(InfoArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Start every temperature from the configured initial field.
    #[arg(long)]
    no_warm_start: bool,
    /// Dump the field of every run, not only the best per temperature.
    #[arg(long)]
    dump_all: bool,
    /// Worker threads for energy evaluation and seeds.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct InfoArgs {
    #[arg(long)]
    config: PathBuf,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Input(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::NumericalFailure { .. } => EXIT_NUMERICAL,
        Error::Io { .. } => EXIT_IO,
    }
}

fn load(args: &CommonArgs) -> Result<SweepConfig, Error> {
    let mut cfg = SweepConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if args.no_warm_start {
        cfg.warm_start = false;
    }
    if args.dump_all {
        cfg.dump_all = true;
    }
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| Error::Input(format!("cannot size thread pool: {e}")))?;
    }
    Ok(cfg)
}

fn print_outcome(outcome: &SweepOutcome) {
    println!("{CSV_HEADER}");
    for r in &outcome.best {
        println!("{}", csv_row(&r.record));
    }
    for t in &outcome.distinct_basins {
        eprintln!("note: seeds at t = {t} reached different energies; all rows kept in summary.csv");
    }
    for r in &outcome.records {
        if r.class == "failed" {
            eprintln!("error: numerical failure at t = {}, seed {}", r.t, r.seed);
        } else if !r.converged {
            eprintln!(
                "warning: t = {}, seed {} stopped after {} iterations with residual {:.3e}",
                r.t, r.seed, r.iterations, r.residual
            );
        }
    }
}

fn info(args: &InfoArgs) -> Result<(), Error> {
    let cfg = SweepConfig::load(&args.config)?;
    let points = cfg.points()?;
    match &cfg.params {
        ParamEntry::Physical {
            alpha,
            b,
            c,
            l,
            t_star,
            temperatures,
        } => {
            println!("T,t,Ltilde,lambda,s_star,qscale");
            for (temp, rp) in temperatures.iter().zip(&points) {
                let s = s_star(&MaterialParams {
                    alpha: *alpha,
                    b: *b,
                    c: *c,
                    l: *l,
                    t: *temp,
                    t_star: *t_star,
                })?;
                println!(
                    "{temp:e},{:e},{:e},{:e},{s:e},{:e}",
                    rp.t, rp.l_tilde, rp.lambda, rp.qscale
                );
            }
        }
        ParamEntry::Reduced { .. } => {
            println!("t,Ltilde,lambda");
            for rp in &points {
                println!("{:e},{:e},{:e}", rp.t, rp.l_tilde, rp.lambda);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Info(args) => info(args).map(|_| 0),
        Command::Run(args) | Command::Sweep(args) => {
            let single = matches!(cli.command, Command::Run(_));
            load(args).and_then(|cfg| {
                let outcome = if single {
                    run_single(&cfg, &cfg.out_dir)?
                } else {
                    run_sweep(&cfg, &cfg.out_dir)?
                };
                print_outcome(&outcome);
                let failed = outcome.any_failed || (single && outcome.any_unconverged);
                Ok(if failed { EXIT_NUMERICAL } else { 0 })
            })
        }
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
