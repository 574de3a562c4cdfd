use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mcasim::cli::{
    self, check_default_ratio, exit_code, ground_state_report, oracle_check, shot_demo, Recipe,
    RunConfig, EXIT_CONFIG, EXIT_FAILURE, EXIT_NOT_CONVERGED,
};
use mcasim::solver::optimize_ground_state;
use mcasim::{Error, FieldSpec, Result};

#[derive(Parser)]
#[command(name = "mcasim", version, about = "Ground states, magnetization and torque of a four-site anisotropic spin cluster")]
struct Cli {
    /// Optimizer seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    A,
    B,
    C,
    Bc,
}

#[derive(Subcommand)]
enum Command {
    /// Run a field or angle sweep described by a TOML file.
    Sweep {
        config: PathBuf,
        /// Replace the [sweep] section by a built-in recipe (fig3, fig4, fig5a, fig5b, figS4).
        #[arg(long)]
        recipe: Option<String>,
    },
    /// Solve a single field point and print the energy breakdown.
    GroundState {
        /// Take [model] and [optimizer] from this file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field magnitude in tesla.
        #[arg(long, default_value_t = 0.0)]
        field: f64,
        #[arg(long, value_enum, default_value = "b")]
        axis: Axis,
        /// Field angle from b toward c in degrees (with --axis bc).
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Cross-check the solver and engine against independent references.
    OracleCheck,
    /// Compare sampled exchange and anisotropy energies with their shot noise.
    ShotDemo {
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 100)]
        reps: usize,
    },
}

fn execute(cli: Cli) -> Result<i32> {
    check_default_ratio()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invariant(e.to_string()))?;
    }
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Sweep { config, recipe } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(r) = recipe {
                cfg.apply_recipe(r.parse::<Recipe>()?);
            }
            if let Some(s) = cli.seed {
                cfg.optimizer.seed = s;
            }
            if let Some(d) = cli.output_dir {
                cfg.output_dir = d;
            }
            cfg.validate()?;
            let out = cli::run(&cfg)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            let r = &out.report;
            for (name, v) in [("h_flop", r.h_flop), ("h1", r.h1), ("h2", r.h2)] {
                if let Some(h) = v {
                    println!("{name} = {h:.4} T");
                }
            }
            if !out.all_converged {
                eprintln!("warning: some sweep points did not converge");
                return Ok(EXIT_NOT_CONVERGED);
            }
            Ok(0)
        }
        Command::GroundState { config, field, axis, alpha } => {
            let cfg = match config {
                Some(p) => RunConfig::load(&p)?,
                None => RunConfig::shipped_default(),
            };
            let mut opt = cfg.optimizer;
            if let Some(s) = cli.seed {
                opt.seed = s;
            }
            let f = match axis {
                Axis::A => FieldSpec::along_a(field),
                Axis::B => FieldSpec::along_b(field),
                Axis::C => FieldSpec::along_c(field),
                Axis::Bc => FieldSpec::in_bc(field, alpha.to_radians()),
            };
            let result = optimize_ground_state(&cfg.model, &f, &opt, None)?;
            print!("{}", ground_state_report(&cfg.model, &f, &result)?);
            Ok(if result.converged { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::OracleCheck => {
            let mut stdout = std::io::stdout().lock();
            let ok = oracle_check(seed, &mut stdout)?;
            stdout.flush()?;
            Ok(if ok { 0 } else { EXIT_FAILURE })
        }
        Command::ShotDemo { shots, reps } => {
            if shots == 0 {
                return Err(Error::Usage("--shots must be >= 1".into()));
            }
            print!("{}", shot_demo(shots, reps, seed)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
