//! `qchaos`: chaos-game and repeated-interaction simulations from the command line.

mod config;
mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qchaos::boson::{classify_regime, effective_weight, run_boson, BosonConfig, PiMultiple};
use qchaos::fermion::{run_fermion, QuantumConfig};
use qchaos::ifs::{run_game, vertex_stream};
use qchaos::io::{
    write_boson_csv, write_classical_csv, write_density_csv, write_fermion_csv, write_json,
    write_moments_csv, EntropyReport, RegimeReport,
};
use qchaos::measure::{
    average_entropy_mc, closed_form_density, entropy_truncation, moment_table, sample_density,
    small_x_exponent, stationary_density, ChainSpec, McOptions,
};
use qchaos::oracle::{boson_simulate, fermion_simulate, OracleReport};
use qchaos::{ClassicalConfig, Error, Point, VertexSet};

use crate::parse::{Amplitudes, Floats};

const SUBCOMMANDS: [&str; 5] = ["classical", "fermion", "density", "boson", "oracle"];

#[derive(Parser, Debug)]
#[command(name = "qchaos", version, about, args_override_self = true)]
#[command(after_help = "Any flag may also be set in a file passed with --config FILE, one \
`key = value` per line (keys are flag names). Flags on the command line take precedence.\n\n\
Exit codes: 0 success, 2 invalid input, 3 resource limit, 4 oracle mismatch, 1 I/O failure.")]
struct Cli {
    /// Worker threads for Monte Carlo (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Read `key = value` defaults from FILE.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical chaos game on the unit interval or a regular polygon; CSV `n,gamma,x,y`.
    Classical(ClassicalArgs),
    /// Fermionic occupation game; CSV `n,gamma,N,S`.
    Fermion(FermionArgs),
    /// Stationary density, moments, small-x exponent and entropy of the 1d game.
    Density(DensityArgs),
    /// Bosonic coherent-state game; CSV `n,gamma,re_chi,im_chi` plus a regime report.
    Boson(BosonArgs),
    /// Exact state-vector check of the closed forms; JSON report, exit 4 on mismatch.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output file (stdout if omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Seeding {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args, Debug)]
struct ClassicalArgs {
    /// 1: vertices {0, 1}; 2: regular polygon.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    /// Polygon vertex count (dim 2).
    #[arg(long, default_value_t = 3)]
    vertices: usize,
    /// Weight `w` in (0, 1); `wc` and `golden` are accepted.
    #[arg(long, value_parser = parse::weight)]
    w: f64,
    #[arg(long)]
    steps: usize,
    /// Start point `x` or `x,y`.
    #[arg(long, value_parser = parse::point, default_value = "0,0")]
    x0: Point,
    #[command(flatten)]
    seeding: Seeding,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FermionArgs {
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long)]
    steps: usize,
    #[command(flatten)]
    seeding: Seeding,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DensityMode {
    /// Histogram of sharded Monte Carlo chains.
    Simulate,
    /// Fixed point of the exact density iteration.
    Iterate,
    /// Exact densities at w = 1/2 and w = wc.
    ClosedForm,
    /// Exact moments <x^n>, n = 0..=K.
    Moments,
    /// Small-x exponent of the density (JSON).
    Alpha,
    /// Truncated-series bounds and a Monte Carlo estimate of the mean entropy (JSON).
    Entropy,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long, value_enum)]
    mode: DensityMode,
    /// Weight `w`; `wc` and `golden` are accepted.
    #[arg(long, value_parser = parse::weight)]
    w: f64,
    /// Bins, moment order, or truncation order depending on the mode.
    #[arg(long = "K", default_value_t = 200)]
    k: usize,
    /// Monte Carlo steps (simulate, entropy).
    #[arg(long, default_value_t = 10_000_000)]
    steps: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    /// Convergence tolerance on the L1 change (iterate).
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    #[command(flatten)]
    seeding: Seeding,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct BosonArgs {
    /// `Ω = ωτ`: `r/s:pi`, `p:pi`, or a float (always treated as irrational).
    #[arg(long, allow_hyphen_values = true)]
    omega: PiMultiple,
    /// `Λ = λτ`, same syntax as --omega.
    #[arg(long, allow_hyphen_values = true)]
    lambda: PiMultiple,
    /// `roots<M>`, `shifted-roots<M>`, or `re,im;re,im;…`.
    #[arg(long, value_parser = parse::amplitudes, default_value = "roots3")]
    betas: Amplitudes,
    /// Initial eigenvalue `re,im`.
    #[arg(long, value_parser = parse::complex, default_value = "0,0", allow_hyphen_values = true)]
    chi0: Complex64,
    #[arg(long)]
    steps: usize,
    /// Write the regime report here (it always goes to stderr as well).
    #[arg(long, value_name = "PATH")]
    regime_out: Option<PathBuf>,
    #[command(flatten)]
    seeding: Seeding,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OracleKind {
    Fermion,
    Boson,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum)]
    kind: OracleKind,
    /// Bath modes, one per interaction.
    #[arg(long, default_value_t = 6)]
    modes: usize,
    /// Fock cutoff per bosonic mode.
    #[arg(long, default_value_t = 24)]
    trunc: usize,
    /// Fermion: ω as a float. Boson: `Ω` in --omega syntax of `boson`.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Fermion: λ as a float. Boson: `Λ` in --lambda syntax of `boson`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Fermion interaction time.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Fermion: per-mode frequencies `ω_0,ω_1,…` (system first).
    #[arg(long, value_parser = parse::floats)]
    mode_omegas: Option<Floats>,
    /// Boson amplitudes, as for `boson`.
    #[arg(long, value_parser = parse::amplitudes, default_value = "roots3")]
    betas: Amplitudes,
    #[arg(long, value_parser = parse::complex, default_value = "0.5,-0.3", allow_hyphen_values = true)]
    chi0: Complex64,
    #[command(flatten)]
    seeding: Seeding,
    #[command(flatten)]
    output: Output,
}

/// Error plus the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource { .. } => 3,
            Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(
    out: &Option<PathBuf>,
    write: impl FnOnce(&mut dyn Write) -> qchaos::Result<()>,
) -> Outcome {
    let mut sink = open_output(out)?;
    write(&mut sink)?;
    sink.flush()?;
    Ok(())
}

fn classical(a: ClassicalArgs) -> Outcome {
    let (vertices, x0) = if a.dim == 1 {
        (VertexSet::unit_interval(), Point::on_line(a.x0.x))
    } else {
        (VertexSet::regular_polygon(a.vertices)?, a.x0)
    };
    let cfg = ClassicalConfig {
        vertices,
        w: a.w,
        x0,
        seed: a.seeding.seed,
        stream: a.seeding.stream,
    };
    let traj = run_game(&cfg, a.steps)?;
    emit(&a.output.out, |w| write_classical_csv(w, &traj))
}

fn fermion(a: FermionArgs) -> Outcome {
    let cfg = QuantumConfig::new(a.omega, a.lambda, a.tau).with_seed(a.seeding.seed, a.seeding.stream);
    let traj = run_fermion(&cfg, a.steps, None)?;
    emit(&a.output.out, |w| write_fermion_csv(w, &traj))
}

fn density(a: DensityArgs) -> Outcome {
    let chain = ChainSpec::new(a.w, a.seeding.seed, a.seeding.stream);
    let opts = McOptions::default();
    match a.mode {
        DensityMode::Simulate => {
            let grid = sample_density(&chain, a.k, a.steps, a.burn_in, &opts)?;
            emit(&a.output.out, |w| write_density_csv(w, &grid))
        }
        DensityMode::Iterate => {
            let st = stationary_density(a.w, a.k, a.tol, a.max_iter)?;
            eprintln!(
                "{} after {} iterations (last L1 change {:e})",
                if st.converged { "converged" } else { "NOT converged" },
                st.iterations,
                st.last_change
            );
            emit(&a.output.out, |w| write_density_csv(w, &st.grid))
        }
        DensityMode::ClosedForm => {
            let grid = closed_form_density(a.w, a.k)?;
            emit(&a.output.out, |w| write_density_csv(w, &grid))
        }
        DensityMode::Moments => {
            let table = moment_table(a.w, a.k)?;
            emit(&a.output.out, |w| write_moments_csv(w, &table))
        }
        DensityMode::Alpha => {
            let alpha = small_x_exponent(a.w)?;
            let v = serde_json::json!({ "w": a.w, "alpha": alpha });
            emit(&a.output.out, |w| write_json(w, &v))
        }
        DensityMode::Entropy => {
            let bounds = entropy_truncation(a.w, a.k)?;
            let mc = average_entropy_mc(&chain, a.steps, a.burn_in, &opts)?;
            let report = EntropyReport::new(a.w, bounds, &mc);
            emit(&a.output.out, |w| write_json(w, &report))
        }
    }
}

fn boson(a: BosonArgs) -> Outcome {
    let mut cfg = BosonConfig::new(a.omega, a.lambda, a.betas.0);
    cfg.chi0 = a.chi0;
    cfg.seed = a.seeding.seed;
    cfg.stream = a.seeding.stream;
    cfg.validate()?;
    let report = RegimeReport::new(classify_regime(&cfg), effective_weight(&cfg));
    eprintln!("{}", serde_json::to_string(&report).map_err(Error::from)?);
    if let Some(path) = &a.regime_out {
        emit(&Some(path.clone()), |w| write_json(w, &report))?;
    }
    let traj = run_boson(&cfg, a.steps, None)?;
    emit(&a.output.out, |w| write_boson_csv(w, &traj))
}

fn oracle(a: OracleArgs) -> Outcome {
    let report: OracleReport = match a.kind {
        OracleKind::Fermion => {
            let num = |s: &Option<String>, default: f64| -> Result<f64, Error> {
                s.as_deref().map_or(Ok(default), |v| {
                    v.parse().map_err(|_| Error::InvalidConfig(format!("expected a number, got '{v}'")))
                })
            };
            let mut cfg = QuantumConfig::new(
                num(&a.omega, 1.0)?,
                num(&a.lambda, std::f64::consts::FRAC_PI_3)?,
                a.tau,
            )
            .with_seed(a.seeding.seed, a.seeding.stream);
            cfg.mode_omegas = a.mode_omegas.map(|f| f.0);
            let gammas = vertex_stream(cfg.seed, cfg.stream, 2, a.modes)?;
            fermion_simulate(&cfg, &gammas)?
        }
        OracleKind::Boson => {
            let angle = |s: &Option<String>, default: &str| -> Result<PiMultiple, Error> {
                s.as_deref().unwrap_or(default).parse()
            };
            let mut cfg = BosonConfig::new(angle(&a.omega, "1.0")?, angle(&a.lambda, "1/3:pi")?, a.betas.0);
            cfg.chi0 = a.chi0;
            cfg.seed = a.seeding.seed;
            cfg.stream = a.seeding.stream;
            cfg.validate()?;
            let gammas = vertex_stream(cfg.seed, cfg.stream, cfg.m(), a.modes)?;
            boson_simulate(&cfg, &gammas, a.trunc)?
        }
    };
    emit(&a.output.out, |w| write_json(w, &report))?;
    let checks = report.checks();
    for c in &checks {
        eprintln!(
            "{} {}: {:e} (bound {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound
        );
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure {
            code: 4,
            message: "oracle and closed form disagree".into(),
        })
    }
}

fn run() -> Outcome {
    let args = config::splice_config(std::env::args().collect(), &SUBCOMMANDS)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            e.print()?;
            return if code == 0 {
                Ok(())
            } else {
                Err(Failure {
                    code: 2,
                    message: String::new(),
                })
            };
        }
    };
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: 2,
                message: format!("cannot start {n} threads: {e}"),
            })?;
    }
    match cli.command {
        Command::Classical(a) => classical(a),
        Command::Fermion(a) => fermion(a),
        Command::Density(a) => density(a),
        Command::Boson(a) => boson(a),
        Command::Oracle(a) => oracle(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
