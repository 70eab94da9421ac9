// flag guards are written !(x > y) so that NaN inputs fail them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symb_cli::{crossover, rigidity_verdict, sweep, to_csv, to_json, CliError, SweepProblem};
use symb_core::domain::{Accuracy, Ellipsoid, Polydisc, Shape, TargetFamily};
use symb_core::packing::{self, ProblemKind};
use symb_core::{capacities, lagrangian};

/// Tables and point queries for symplectic embedding bounds of ellipsoids
/// and polydiscs into balls and cubes. All quantities are in units of pi.
#[derive(Parser)]
#[command(name = "symb", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a parameter range and emit one row of bounds per grid point
    Bounds(BoundsArgs),
    /// First Ekeland-Hofer capacities of an ellipsoid or polydisc
    Capacities(CapacitiesArgs),
    /// Rigidity verdict for an ellipsoid against a ball or cube
    Rigidity(RigidityArgs),
    /// Lagrangian folding bounds for explicit k-vectors
    Lagrangian(LagrangianArgs),
    /// Locate where one bound function overtakes another
    Crossover(CrossoverArgs),
    /// Packing numbers: ruled surfaces, torus products, bound ratios
    #[command(subcommand)]
    Packing(PackingCommand),
}

#[derive(Args)]
struct BoundsArgs {
    /// One of EB, EC, PB, PC, PC2n
    #[arg(long)]
    problem: String,
    #[arg(long)]
    a_from: f64,
    #[arg(long)]
    a_to: f64,
    #[arg(long)]
    step: f64,
    /// Bisection tolerance for the folding optimizers
    #[arg(long, default_value_t = 1e-9)]
    acc: f64,
    /// Half-dimension, required for PC2n
    #[arg(long)]
    n: Option<u32>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads for the sweep; defaults to available parallelism
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CapacitiesArgs {
    /// Ellipsoid radii, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with = "polydisc")]
    ellipsoid: Option<Vec<f64>>,
    /// Polydisc areas, comma separated
    #[arg(long, value_delimiter = ',')]
    polydisc: Option<Vec<f64>>,
    #[arg(long)]
    count: usize,
}

#[derive(Args)]
struct RigidityArgs {
    /// Source shape, e.g. E:1,1.8
    #[arg(long)]
    source: String,
    /// Target, e.g. B:1.7 or C:2
    #[arg(long)]
    target: String,
}

#[derive(Args)]
struct LagrangianArgs {
    /// One of i-e, i-p, ii-e, ii-p
    mode: String,
    #[arg(long, value_delimiter = ',')]
    ks: Vec<u64>,
    /// Scalar a for mode i-*, list a_2,...,a_n for mode ii-*
    #[arg(long, value_delimiter = ',')]
    a: Vec<f64>,
}

#[derive(Args)]
struct CrossoverArgs {
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    #[arg(long)]
    lo: f64,
    #[arg(long)]
    hi: f64,
    #[arg(long)]
    tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    acc: f64,
}

#[derive(Subcommand)]
enum PackingCommand {
    /// Packing number of a ruled surface
    Ruled {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        twisted: bool,
    },
    /// Torus-product lower bound
    Jiang {
        #[arg(long)]
        a: f64,
    },
    /// Volume fraction achieved by the best upper bound of a problem
    Ratio {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1e-9)]
        acc: f64,
    },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn accuracy(acc: f64) -> Result<Accuracy, CliError> {
    Accuracy::from_acc(acc).map_err(|e| usage(e.to_string()))
}

fn parse_shape(spec: &str) -> Result<Shape, CliError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("expected KIND:values, got {spec:?}")))?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad number in {spec:?}: {e}")))?;
    match kind {
        "E" => Ok(Shape::Ellipsoid(
            Ellipsoid::new(&values).map_err(|e| usage(e.to_string()))?,
        )),
        "P" => Ok(Shape::Polydisc(
            Polydisc::new(&values).map_err(|e| usage(e.to_string()))?,
        )),
        _ => Err(usage(format!("unknown shape kind {kind:?} (expected E or P)"))),
    }
}

fn parse_target(spec: &str, half_dimension: usize) -> Result<(TargetFamily, f64), CliError> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("expected B:A or C:A, got {spec:?}")))?;
    let capacity: f64 = rest
        .trim()
        .parse()
        .map_err(|e| usage(format!("bad capacity in {spec:?}: {e}")))?;
    if !(capacity > 0.0) {
        return Err(usage(format!("target capacity must be positive, got {capacity}")));
    }
    let family = match kind {
        "B" => TargetFamily::ball(half_dimension),
        "C" => TargetFamily::cube(half_dimension),
        _ => return Err(usage(format!("unknown target kind {kind:?} (expected B or C)"))),
    };
    Ok((family.map_err(|e| usage(e.to_string()))?, capacity))
}

fn join_values(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Bounds(args) => {
            let problem = SweepProblem::parse(&args.problem, args.n).map_err(usage)?;
            let acc = accuracy(args.acc)?;
            let threads = args.threads.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let rows = sweep(problem, args.a_from, args.a_to, args.step, &acc, threads)?;
            let out = match args.format.as_str() {
                "csv" => to_csv(&rows),
                "json" => to_json(&rows),
                other => return Err(usage(format!("unknown format {other:?}"))),
            };
            std::io::stdout()
                .write_all(out.as_bytes())
                .map_err(|e| CliError::Numeric(e.to_string()))?;
        }
        Command::Capacities(args) => {
            if args.count == 0 {
                return Err(usage("--count must be at least 1"));
            }
            let shape = match (args.ellipsoid, args.polydisc) {
                (Some(radii), None) => {
                    Shape::Ellipsoid(Ellipsoid::new(&radii).map_err(|e| usage(e.to_string()))?)
                }
                (None, Some(areas)) => {
                    Shape::Polydisc(Polydisc::new(&areas).map_err(|e| usage(e.to_string()))?)
                }
                _ => return Err(usage("pass exactly one of --ellipsoid or --polydisc")),
            };
            let values: Vec<f64> = (1..=args.count)
                .map(|k| capacities::eh_capacity(&shape, k))
                .collect();
            println!("{}", join_values(&values));
        }
        Command::Rigidity(args) => {
            let shape = parse_shape(&args.source)?;
            let Shape::Ellipsoid(e) = &shape else {
                return Err(usage("rigidity verdicts are for ellipsoid sources (E:...)"));
            };
            let (target, capacity) = parse_target(&args.target, e.half_dimension())?;
            println!("{}", rigidity_verdict(e.radii(), &target, capacity)?);
        }
        Command::Lagrangian(args) => {
            let scalar_a = || -> Result<f64, CliError> {
                if args.a.len() != 1 {
                    return Err(usage("modes i-e and i-p take a single --a value"));
                }
                Ok(args.a[0])
            };
            match args.mode.as_str() {
                "i-e" => {
                    let b = lagrangian::ball_bound_m(&args.ks, scalar_a()?)
                        .map_err(|e| usage(e.to_string()))?;
                    println!("A = {}", b.value);
                }
                "i-p" => {
                    let b = lagrangian::cube_bound_m(&args.ks, scalar_a()?)
                        .map_err(|e| usage(e.to_string()))?;
                    println!("A = {}", b.value);
                }
                "ii-e" => {
                    let b = lagrangian::ball_bound_n(&args.ks, &args.a)
                        .map_err(|e| usage(e.to_string()))?;
                    println!("A = {}", b.value);
                }
                "ii-p" => {
                    let factors = lagrangian::polydisc_bound_n(&args.ks, &args.a)
                        .map_err(|e| usage(e.to_string()))?;
                    let max = factors.iter().fold(0.0f64, |m, &x| m.max(x));
                    println!("A = {} (factors {})", max, join_values(&factors));
                }
                other => return Err(usage(format!("unknown mode {other:?}"))),
            }
        }
        Command::Crossover(args) => {
            let acc = accuracy(args.acc)?;
            let root = crossover(&args.left, &args.right, args.lo, args.hi, args.tol, &acc)?;
            println!("{root}");
        }
        Command::Packing(cmd) => match cmd {
            PackingCommand::Ruled { genus, a, b, twisted } => {
                if !(a > 0.0 && b > 0.0) {
                    return Err(usage("--a and --b must be positive"));
                }
                let p = packing::ruled_surface_packing(genus, a, b, twisted)
                    .map_err(|e| usage(e.to_string()))?;
                println!("{p}");
            }
            PackingCommand::Jiang { a } => {
                if !(a >= 1.0) {
                    return Err(usage("--a must be at least 1"));
                }
                println!("{}", packing::jiang_lower_bound(a));
            }
            PackingCommand::Ratio { problem, a, acc } => {
                let kind = ProblemKind::parse(&problem)
                    .ok_or_else(|| usage(format!("unknown problem {problem:?}")))?;
                let acc = accuracy(acc)?;
                let r = packing::asymptotic_ratio(kind, a, &acc)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                println!("{r}");
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
