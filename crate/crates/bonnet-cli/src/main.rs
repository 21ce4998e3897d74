//! Command-line front end for constructing compact Bonnet pairs: tori with
//! one family of planar curvature lines, their mates f⁺/f⁻, verification
//! reports, and the discrete-net optimizer.

mod config;
mod pipeline;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use bonnet_core::Result;
use config::{Mode, ProfileCoeffs, RunConfig};

#[derive(Parser)]
#[command(
    name = "bonnet",
    version,
    about = "Builds isothermic tori with planar curvature lines and their compact Bonnet pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: solve, build meshes for f and f±, verify, write artifacts
    Gen(GenArgs),
    /// Solve the closing conditions and print the parameters
    Solve(SolveArgs),
    /// Re-run the pipeline behind a report.json and check its invariants
    Verify(VerifyArgs),
    /// Optimize a coarse torus net into an exactly isothermic one
    Discrete(DiscreteArgs),
    /// Evaluate a theta function and its derivatives (debugging aid)
    Theta(ThetaArgs),
}

/// Flags shared by the verbs that build a configuration. Explicit flags
/// override fields of `--config`.
#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file ("schema": 1)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Imaginary part of the lattice modulus τ = ½ + iλ
    #[arg(long)]
    imtau: Option<f64>,
    /// Profile mode: spherical (solved), fourier (fixed profile), discrete
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// k-fold symmetry target (monodromy angle 2π/k)
    #[arg(long)]
    symmetry: Option<u32>,
    /// First pole parameter of the spherical profile
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<f64>,
    /// Harmonic profile coefficients c,a,b (fourier mode)
    #[arg(long, value_delimiter = ',', num_args = 3, allow_hyphen_values = true)]
    profile: Option<Vec<f64>>,
    /// Pair offset parameter ε
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Grid points around the planar curves
    #[arg(long)]
    nu: Option<usize>,
    /// Grid points along the sweep (all symmetry periods)
    #[arg(long)]
    nv: Option<usize>,
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::read(path)?,
            None => RunConfig::template(),
        };
        if let Some(lambda) = self.imtau {
            config.lambda = lambda;
        }
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
        if let Some(k) = self.symmetry {
            config.symmetry = Some(k);
            config.theta_target = None;
        }
        if let Some(s1) = self.s1 {
            config.s1 = Some(s1);
        }
        if let Some(coeffs) = &self.profile {
            config.profile = Some(ProfileCoeffs { c: coeffs[0], a: coeffs[1], b: coeffs[2] });
        }
        if let Some(epsilon) = self.epsilon {
            config.epsilon = epsilon;
        }
        if let Some(nu) = self.nu {
            config.nu = nu;
        }
        if let Some(nv) = self.nv {
            config.nv = nv;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for meshes and report.json
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write binary PLY meshes next to the OBJ files
    #[arg(long)]
    ply: bool,
    /// Print the full report JSON to stdout
    #[arg(long)]
    json_report: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Print the result as JSON (default prints a short summary)
    #[arg(long)]
    json_report: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// report.json written by `gen`
    #[arg(long)]
    report: PathBuf,
    /// Override the verification grid
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
}

#[derive(Args)]
struct DiscreteArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Optimize a net loaded from this JSON file instead of sampling one
    #[arg(long)]
    net: Option<PathBuf>,
    /// Net vertices around the planar curves (when sampling)
    #[arg(long, default_value_t = 9)]
    n: usize,
    /// Net vertices along the sweep (when sampling)
    #[arg(long, default_value_t = 12)]
    m: usize,
    /// Levenberg–Marquardt iteration cap
    #[arg(long, default_value_t = 250)]
    max_iterations: usize,
    /// Residual norm at which the optimization counts as converged
    #[arg(long, default_value_t = 1e-10)]
    target: f64,
    /// Output directory for nets and discrete_report.json
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Print the full report JSON to stdout
    #[arg(long)]
    json_report: bool,
}

#[derive(Args)]
struct ThetaArgs {
    /// Imaginary part of the lattice modulus τ = ½ + iλ
    #[arg(long)]
    imtau: f64,
    /// Which theta function, 1 to 4
    #[arg(long, default_value_t = 1)]
    kind: u8,
    /// Real part of the argument
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    re: f64,
    /// Imaginary part of the argument
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    im: f64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let config = args.config.build()?;
            let report = pipeline::run_gen(&config, &args.out_dir, args.ply)?;
            if args.json_report {
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
        }
        Command::Solve(args) => {
            let config = args.config.build()?;
            let report = match config.mode {
                Mode::Spherical | Mode::Discrete => pipeline::solve_report(&config)?,
                Mode::Fourier => {
                    let (surface, solved) = pipeline::build_surface(&config)?;
                    let periodicity = bonnet_core::periodicity::monodromy_report(&surface)?;
                    serde_json::json!({ "solved": solved, "periodicity": periodicity })
                }
            };
            if args.json_report {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
        }
        Command::Verify(args) => pipeline::run_verify(&args.report, args.nu, args.nv)?,
        Command::Discrete(args) => {
            let config = if args.net.is_some() {
                None
            } else {
                let mut config = args.config.build()?;
                config.mode = Mode::Discrete;
                config.validate()?;
                Some(config)
            };
            let epsilon = config
                .as_ref()
                .map(|c| c.epsilon)
                .or(args.config.epsilon)
                .unwrap_or(1.0);
            let run = pipeline::DiscreteRun {
                seed_path: args.net.clone(),
                n: args.n,
                m: args.m,
                max_iterations: args.max_iterations,
                target: args.target,
            };
            let report = pipeline::run_discrete(config.as_ref(), epsilon, &run, args.out_dir.as_deref())?;
            if args.json_report {
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
        }
        Command::Theta(args) => {
            let report = pipeline::run_theta(args.imtau, args.kind, args.re, args.im)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error[{}]: {error}", error.code());
        std::process::exit(1);
    }
}
