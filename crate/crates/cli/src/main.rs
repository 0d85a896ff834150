mod commands;
mod grid;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use foliate::foliation::DEFAULT_TOL;
use foliate::holonomy::IntegratorSettings;
use foliate::io::parse_field_str;
use foliate::moduli::{FiberSearchConfig, RANK_REL_TOL};
use foliate::sampling::random_field;
use foliate::Error;

use commands::{Input, Output};
use report::{CommandEcho, Report};

#[derive(Parser)]
#[command(name = "foliate", version, about = "Singular points, indices, moduli and holonomy of polynomial foliations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// JSON field file.
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Use seeded random fields instead of a file.
    #[arg(long)]
    random: bool,
    /// First seed; a batch uses seeds S, S+1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random fields.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Degree of random fields.
    #[arg(long, default_value_t = 2)]
    degree: usize,
}

#[derive(Args, Clone, Copy)]
struct OutputArgs {
    /// Print a CSV table instead of the JSON report.
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// Print the JSON report (default).
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the singular points with their eigenvalues and indices.
    Singular {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Root and residual tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Labeled index vector.
    Indices {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the index sum and the ratio sum along the line at infinity.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Largest accepted residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Numerical rank of the moduli Jacobian at the regular representative.
    Rank {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Relative singular value cutoff.
        #[arg(long, default_value_t = RANK_REL_TOL)]
        tol: f64,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
    },
    /// Moduli along the family with first integral (xy + x + y)(x - k y)^alpha.
    DarbouxScan {
        #[command(flatten)]
        output: OutputArgs,
        /// Exponent as RE,IM.
        #[arg(long, default_value = "2,0")]
        alpha: String,
        /// Either START:STOP:N or a ';'-separated list of RE or RE,IM.
        #[arg(long, default_value = "0.5:3:6")]
        k_grid: String,
    },
    /// Regular representatives sharing the input's index vector.
    FiberSearch {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Convergence tolerance on the matched moduli distance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Size of the perturbation around the input's own representative.
        #[arg(long, default_value_t = 0.3)]
        perturbation: f64,
        /// Start from random representatives instead of perturbing the input's.
        #[arg(long)]
        random_starts: bool,
    },
    /// Holonomy multipliers at infinity and the generator product check.
    Holonomy {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Only this point at infinity.
        #[arg(long)]
        point: Option<usize>,
        /// Relative integration tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Dimension count of the source and target of the moduli map.
    Dims {
        #[command(flatten)]
        output: OutputArgs,
        /// Degrees to report.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        degree: Vec<usize>,
    },
}

/// Resolved inputs plus the digest identifying them.
fn load(args: &InputArgs) -> Result<(Vec<Input>, String), String> {
    if let Some(path) = &args.input {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        let field = match std::str::from_utf8(&bytes) {
            Ok(text) => parse_field_str(text).and_then(|f| f.to_field()),
            Err(e) => Err(Error::InvalidInput(format!("not UTF-8: {e}"))),
        };
        let source = path.display().to_string();
        return Ok((vec![Input { source, field }], digest));
    }
    if !args.random {
        return Err("one of --input or --random is required".into());
    }
    if args.degree < 1 {
        return Err("--degree must be at least 1".into());
    }
    let desc = format!("random seed={} count={} degree={}", args.seed, args.count, args.degree);
    let digest = hex::encode(Sha256::digest(desc.as_bytes()));
    let inputs = (0..args.count)
        .map(|i| {
            let seed = args.seed + i;
            Input { source: format!("seed {seed}"), field: Ok(random_field(seed, args.degree)) }
        })
        .collect();
    Ok((inputs, digest))
}

fn static_digest(desc: &str) -> String {
    hex::encode(Sha256::digest(desc.as_bytes()))
}

/// 0 on success, 2 when the input itself is rejected (every item, for a batch),
/// 1 for internal failures and failed checks.
fn exit_code(out: &Output) -> u8 {
    let rejected = out.errors.iter().filter(|e| e.rejected).count();
    let internal = out.errors.len() - rejected;
    if internal > 0 || out.failed_checks > 0 {
        1
    } else if rejected > 0 && rejected >= out.attempted {
        2
    } else {
        0
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(Report, Output, OutputArgs), String> {
    let start = Instant::now();
    let (name, output, out, digest) = match cli.command {
        Command::Singular { input, output, tol } => {
            let (inputs, d) = load(&input)?;
            ("singular", output, commands::singular(&inputs, tol), d)
        }
        Command::Indices { input, output } => {
            let (inputs, d) = load(&input)?;
            ("indices", output, commands::indices(&inputs), d)
        }
        Command::Verify { input, output, tol } => {
            let (inputs, d) = load(&input)?;
            ("verify", output, commands::verify(&inputs, tol), d)
        }
        Command::Rank { input, output, tol, step } => {
            let (inputs, d) = load(&input)?;
            ("rank", output, commands::rank(&inputs, step, tol), d)
        }
        Command::DarbouxScan { output, alpha, k_grid } => {
            let alpha = grid::parse_complex(&alpha)?;
            let ks = grid::parse_grid(&k_grid)?;
            let d = static_digest(&format!("darboux alpha={alpha} k-grid={k_grid}"));
            ("darboux-scan", output, commands::darboux_scan(alpha, &ks), d)
        }
        Command::FiberSearch { input, output, restarts, tol, perturbation, random_starts } => {
            let (inputs, d) = load(&input)?;
            let cfg = FiberSearchConfig {
                restarts,
                seed: input.seed,
                tol,
                perturbation,
                ..Default::default()
            };
            ("fiber-search", output, commands::fiber(&inputs, cfg, random_starts), d)
        }
        Command::Holonomy { input, output, point, tol } => {
            let (inputs, d) = load(&input)?;
            let settings = IntegratorSettings { rtol: tol, ..Default::default() };
            ("holonomy", output, commands::holonomy(&inputs, point, settings), d)
        }
        Command::Dims { output, degree } => {
            let d = static_digest(&format!("dims degrees={degree:?}"));
            ("dims", output, commands::dims(&degree), d)
        }
    };
    let report = Report {
        command: CommandEcho { name: name.to_string(), args: argv },
        input_digest: digest,
        results: out.results.clone(),
        errors: out.errors.clone(),
        failed_checks: out.failed_checks,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((report, out, output))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, argv) {
        Ok((report, out, output)) => {
            if output.csv {
                print!("{}", out.table.render());
                for e in &out.errors {
                    eprintln!("{}: {} ({})", e.source, e.message, e.code);
                }
            } else {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            }
            ExitCode::from(exit_code(&out))
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
