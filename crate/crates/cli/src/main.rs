use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use intercept_core::geo::{self, Axis, GeoPoint};
use intercept_core::report;
use intercept_core::scenario;
use intercept_core::solver::{self, SolveMode, SolverSettings};
use intercept_core::validate::{self, ReplayMode};
use intercept_core::{PathSolution, ScenarioConfig, SolutionSource};

const EXIT_INFEASIBLE: u8 = 2;

/// Shortest curvature–straight paths that tour circular obstacles and
/// intercept a target moving in a straight line.
#[derive(Parser)]
#[command(name = "intercept", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and optionally write report files.
    Plan {
        /// Scenario JSON file, or the name of a bundled scenario.
        scenario: String,
        /// pattern | nlp | both
        #[arg(long, default_value = "both")]
        mode: SolveMode,
        #[arg(long)]
        seed: Option<u64>,
        /// Multistart count per solve.
        #[arg(long)]
        starts: Option<usize>,
        /// Output directory for segments.csv, summary.csv, path.svg, report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run everything on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Replay the lengths in a segments.csv under the kinematics.
    Validate {
        scenario: String,
        solution_csv: PathBuf,
        /// Integration step; defaults to a thousandth of the shortest segment.
        #[arg(long)]
        dt: Option<f64>,
        /// Do not pin to obstacle entry points between blocks.
        #[arg(long)]
        continuous: bool,
        /// Miss distance above which the exit code is 2.
        #[arg(long, default_value_t = 0.05)]
        miss_tol: f64,
    },
    /// Brute-force grid search (slow; meant for up to two obstacles).
    Oracle {
        scenario: String,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
    },
    /// Project a latitude/longitude to planar kilometres.
    Project {
        /// Decimal degrees or DMS, e.g. 22°44'15.66"N
        lat: String,
        lon: String,
        #[arg(long, default_value_t = geo::EARTH_RADIUS_KM)]
        radius: f64,
    },
    /// Print the canonical planar JSON of a scenario.
    Dump { scenario: String },
    /// List the bundled scenarios.
    List,
}

fn load(spec: &str) -> Result<ScenarioConfig> {
    let path = Path::new(spec);
    if path.exists() {
        return scenario::load_scenario(path).with_context(|| format!("loading {spec}"));
    }
    let name = spec.strip_prefix("bundled:").unwrap_or(spec);
    if scenario::bundled_text(name).is_some() {
        return Ok(scenario::bundled(name)?);
    }
    anyhow::bail!("`{spec}` is neither a file nor a bundled scenario (see `intercept list`)")
}

fn print_solution(sol: &PathSolution) {
    println!("pattern    {}", sol.pattern.label());
    println!("f          {:.6}", sol.objective());
    println!("intercept  ({:.6}, {:.6})", sol.intercept.x, sol.intercept.y);
    println!("time       {:.6}", sol.total_time());
    let lens: Vec<String> = sol.lengths.iter().map(|l| format!("{l:.4}")).collect();
    println!("lengths    {}", lens.join(" "));
    if !sol.mixed_circles.is_empty() {
        println!("note       both arcs active on circles {:?}", sol.mixed_circles);
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Plan { scenario, mode, seed, starts, out, sequential } => {
            let config = load(&scenario)?;
            let mut settings = SolverSettings::default().with_mode(mode);
            if let Some(seed) = seed {
                settings.seed = seed;
            }
            if let Some(starts) = starts {
                settings.multistart_count = starts;
            }
            settings.parallel = !sequential;
            let plan = solver::plan(&config, &settings)?;
            let validation = match &plan.best {
                Some(best) => Some(validate::validate(&config, best)?),
                None => None,
            };
            match &plan.best {
                Some(best) => {
                    print_solution(best);
                    if let Some(v) = &validation {
                        println!("miss       {:.3e}", v.miss_distance);
                    }
                }
                None => println!("INFEASIBLE: no pattern converged to a feasible path"),
            }
            if let Some(dir) = out {
                for path in report::emit_report(&config, &plan, validation.as_ref(), &dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(if plan.best.is_some() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_INFEASIBLE) })
        }
        Command::Validate { scenario, solution_csv, dt, continuous, miss_tol } => {
            let config = load(&scenario)?;
            let text = std::fs::read_to_string(&solution_csv)
                .with_context(|| format!("reading {}", solution_csv.display()))?;
            let lengths = report::read_segments_csv(&config, &text)?;
            let sol = PathSolution::from_lengths(
                &config,
                PathSolution::dominant_pattern(&lengths),
                lengths,
                SolutionSource::Given,
            )?;
            let mode = if continuous { ReplayMode::Continuous } else { ReplayMode::PaperExact };
            let v = validate::validate_with(&config, &sol, dt, mode)?;
            println!("residual       {:.3e}", sol.residual_norm);
            println!("miss distance  {:.6e}", v.miss_distance);
            println!("length error   {:.6e}", v.length_error);
            println!("time error     {:.6e}", v.time_error);
            println!("tangency gap   {:.6e}", v.tangency_gap);
            println!("max pin jump   {:.6e}", v.max_pin_jump);
            for c in &v.clearance_violations {
                println!("penetration    obstacle {} depth {:.6e}", c.obstacle + 1, c.depth);
            }
            Ok(if v.miss_distance <= miss_tol { ExitCode::SUCCESS } else { ExitCode::from(EXIT_INFEASIBLE) })
        }
        Command::Oracle { scenario, resolution } => {
            let config = load(&scenario)?;
            match solver::grid_oracle(&config, resolution)? {
                Some(sol) => {
                    print_solution(&sol);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("INFEASIBLE: no near-feasible grid point");
                    Ok(ExitCode::from(EXIT_INFEASIBLE))
                }
            }
        }
        Command::Project { lat, lon, radius } => {
            let lat = geo::parse_angle(&lat, Axis::Lat)?;
            let lon = geo::parse_angle(&lon, Axis::Lon)?;
            let p = geo::project(&GeoPoint::with_radius(lat, lon, radius)?);
            println!("{:.6},{:.6}", p.x, p.y);
            Ok(ExitCode::SUCCESS)
        }
        Command::Dump { scenario } => {
            let config = load(&scenario)?;
            print!("{}", scenario::dump_scenario(&config, None));
            Ok(ExitCode::SUCCESS)
        }
        Command::List => {
            for name in scenario::bundled_names() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
