use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mris_core::bench::{run_bench, write_bench_csv, BenchConfig};
use mris_core::exact::DEFAULT_EXACT_CAP;
use mris_core::gen::{generate, GenSpec, LengthDist};
use mris_core::geometry::DEFAULT_FP_TOLERANCE;
use mris_core::io::{emit_instance, emit_labeling, read_instance, read_labeling, write_atomic};
use mris_core::model::validate_labeling_with;
use mris_core::render::render_svg;
use mris_core::{solve, Algorithm, AnchorModel, Error, SolveOptions, Validation};

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mris",
    version,
    about = "Maximum rotating independent set solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the labeling.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_FP_TOLERANCE)]
        fp_tolerance: f64,
        /// Largest instance the exact solver accepts (at most 64).
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
        /// Labeling file; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_model)]
        model: AnchorModel,
        #[arg(long = "box", num_args = 2, value_names = ["W", "H"], default_values_t = [10.0, 10.0])]
        bbox: Vec<f64>,
        /// uniform:a,b or fixed:v
        #[arg(long, value_parser = parse_lengths, default_value = "uniform:0.5,3")]
        length_dist: LengthDist,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check that a labeling is proper. Exit status 1 names a violating pair.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FP_TOLERANCE)]
        fp_tolerance: f64,
    },
    /// Draw an instance as SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every solver over a suite and write a CSV report.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0 / 3.0])]
        epsilons: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_model(s: &str) -> Result<AnchorModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_lengths(s: &str) -> Result<LengthDist, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TooLarge { .. }
        | Error::EpsilonOutOfRange(_)
        | Error::EnumerationLimit { .. }
        | Error::InvalidK(_)
        | Error::NonPositive { .. } => EXIT_CAPABILITY,
        _ => EXIT_USAGE,
    }
}

fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::TooLarge { .. } => {
            Some("use --algo ptas or greedy, or raise --exact-cap (at most 64)")
        }
        Error::EpsilonOutOfRange(_) => Some("pass --epsilon with a value such as 0.5 or 0.25"),
        Error::EnumerationLimit { .. } => Some("use a larger --epsilon or a smaller instance"),
        _ => None,
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Solve {
            input,
            algo,
            epsilon,
            fp_tolerance,
            exact_cap,
            output,
        } => {
            let instance = read_instance(&input)?;
            let options = SolveOptions {
                epsilon,
                fp_tolerance,
                exact_cap,
            };
            let solution = solve(&instance, algo, &options)?;
            eprintln!(
                "algo={} model={} n={} size={} time_ms={:.3}{}",
                algo,
                instance.model(),
                instance.len(),
                solution.labeling.len(),
                solution.elapsed.as_secs_f64() * 1e3,
                solution
                    .k
                    .map(|k| format!(" epsilon={epsilon} k={k}"))
                    .unwrap_or_default()
            );
            for s in &solution.shifts {
                eprintln!(
                    "  shift={:.6} aligned={} nodes={} dp_entries={} subsets={} best={}",
                    s.shift, s.aligned, s.nodes, s.dp.entries, s.dp.enumerated_subsets, s.best_size
                );
            }
            write_or_print(
                output.as_deref(),
                &emit_labeling(&solution.labeling, instance.id())?,
            )?;
            Ok(0)
        }
        Command::Gen {
            n,
            model,
            bbox,
            length_dist,
            seed,
            output,
        } => {
            let spec = GenSpec {
                n,
                model,
                width: bbox[0],
                height: bbox[1],
                lengths: length_dist,
                seed,
            };
            write_or_print(output.as_deref(), &emit_instance(&generate(&spec)?)?)?;
            Ok(0)
        }
        Command::Check {
            input,
            labeling,
            fp_tolerance,
        } => {
            let instance = read_instance(&input)?;
            let labeling = read_labeling(&labeling)?;
            match validate_labeling_with(&instance, &labeling, fp_tolerance)? {
                Validation::Proper => {
                    println!("proper: {} labels", labeling.len());
                    Ok(0)
                }
                Validation::Violated(i, j) => {
                    println!("violated: {i} {j}");
                    Ok(EXIT_INVALID)
                }
            }
        }
        Command::Render {
            input,
            labeling,
            out,
        } => {
            let instance = read_instance(&input)?;
            let labeling = labeling.map(|p| read_labeling(&p)).transpose()?;
            write_atomic(&out, render_svg(&instance, labeling.as_ref()).as_bytes())?;
            Ok(0)
        }
        Command::Bench {
            suite,
            epsilons,
            out,
            repeats,
            exact_cap,
        } => {
            if let Some(&bad) = epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
                return Err(Error::EpsilonOutOfRange(bad));
            }
            let config = BenchConfig {
                epsilons,
                repeats,
                exact_cap,
                fp_tolerance: DEFAULT_FP_TOLERANCE,
            };
            let rows = run_bench(&suite, &config)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            eprintln!(
                "bench: {} rows, {} with errors or notes",
                rows.len(),
                failed
            );
            write_bench_csv(&rows, &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = hint(&e) {
                eprintln!("hint: {h}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
