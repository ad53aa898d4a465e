//! `conewit`: run golden scenarios, config-driven checks, witness searches,
//! property suites and the full self-test from the command line.
//!
//! Exit status is 0 when every assertion passes, 1 when one fails and 2 on
//! usage, config or construction errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use conewit::operators::LinearMap;
use conewit::text::{parse_cone, parse_config, Config};
use conewit::verify::{
    run_example, run_paper_examples, run_property_suite, run_scenario, run_selftest, Expectation, OutputFormat,
    Report, DEFAULT_BUDGET, DEFAULT_SEED, DEFAULT_TOL, EXAMPLE_NAMES,
};
use conewit::witnesses::{nonpositive_inverse_witness, WitnessReport};
use conewit::{Error, RngStream};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "conewit", version, about = "Verify rank-one perturbations of cone automorphisms")]
struct Cli {
    /// Seed for every sampled check [default: 0, or the config's seed]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Attempt budget of witness searches [default: 10000]
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Membership tolerance of positivity checks [default: 1e-9]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format [default: json]
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Also write (scenario, assertion, expected, measured, pass) rows here
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the golden scenarios, or one of them
    Examples {
        #[arg(long)]
        name: Option<String>,
    },
    /// Check the expectations of a scenario file
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Search for a point of the cone whose preimage leaves the cone
    Witness {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the property suite on one cone, e.g. `psd:3`
    Properties {
        #[arg(long)]
        cone: String,
    },
    /// Run the full default suite
    Selftest,
}

/// Anything that stops a run before assertions are checked. Exits 2.
struct Fatal(String);

impl From<Error> for Fatal {
    fn from(e: Error) -> Self {
        Fatal(format!("{}: {e}", e.code()))
    }
}

struct Outcome {
    stdout: String,
    csv: Option<(PathBuf, String)>,
    passed: bool,
}

const DEFAULT_FORMAT: OutputFormat = OutputFormat::Json;

fn load(path: &Path) -> Result<Config, Fatal> {
    let text = std::fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

struct Settings {
    seed: u64,
    format: OutputFormat,
    csv: Option<PathBuf>,
}

/// Flags win over config values, which win over defaults.
fn settings(cli: &Cli, config: Option<&mut Config>) -> Result<Settings, Fatal> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Fatal(format!("--tol must be positive, got {tol}")));
        }
    }
    let mut s = Settings {
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        format: cli.format.map(Into::into).unwrap_or(DEFAULT_FORMAT),
        csv: cli.csv.clone(),
    };
    if let Some(c) = config {
        s.seed = cli.seed.or(c.seed).unwrap_or(DEFAULT_SEED);
        s.format = cli.format.map(Into::into).or(c.format).unwrap_or(DEFAULT_FORMAT);
        s.csv = cli.csv.clone().or_else(|| c.csv.as_ref().map(PathBuf::from));
        c.scenario.budget = cli.budget.or(c.budget).unwrap_or(DEFAULT_BUDGET);
        c.scenario.tol = cli.tol.or(c.tol).unwrap_or(DEFAULT_TOL);
    }
    Ok(s)
}

fn report_outcome(report: &Report, s: &Settings) -> Outcome {
    Outcome {
        stdout: report.render(s.format),
        csv: s.csv.clone().map(|p| (p, report.to_csv())),
        passed: report.passed(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn witness_text(w: &WitnessReport) -> String {
    let mut out = String::new();
    writeln!(out, "found: {}", w.found).unwrap();
    writeln!(out, "strategy: {}", w.strategy.map_or("-", |s| s.name())).unwrap();
    if let (Some(y), Some(x)) = (&w.witness_y, &w.preimage_x) {
        writeln!(out, "y: {y}").unwrap();
        writeln!(out, "x: {x}").unwrap();
    }
    writeln!(out, "y_margin: {}", opt(w.y_margin)).unwrap();
    writeln!(out, "x_margin: {}", opt(w.x_margin)).unwrap();
    writeln!(out, "residual: {}", opt(w.residual)).unwrap();
    let a = &w.attempts_by_strategy;
    writeln!(
        out,
        "attempts: {} (direct {}, boundary_functional {}, extremal {}, scaling {})",
        w.attempts, a.direct, a.boundary_functional, a.extremal, a.scaling
    )
    .unwrap();
    for n in &w.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    out
}

fn witness(cli: &Cli, path: &Path) -> Result<Outcome, Fatal> {
    let mut config = load(path)?;
    let s = settings(cli, Some(&mut config))?;
    let sc = &config.scenario;
    let (t, _): (LinearMap, _) = sc.build(s.seed)?;
    let mut rng = RngStream::new(s.seed).split_named(&sc.name).split_named("witness");
    let w = nonpositive_inverse_witness(&t, &sc.cone, &mut rng, sc.budget)?;
    let want = sc
        .expectations
        .iter()
        .find_map(|e| match e {
            Expectation::Witness { found } => Some(*found),
            _ => None,
        })
        .unwrap_or(true);
    let stdout = match s.format {
        OutputFormat::Json => serde_json::to_string_pretty(&w).expect("witness report serializes") + "\n",
        OutputFormat::Text => witness_text(&w),
    };
    if s.csv.is_some() {
        return Err(Fatal("--csv applies to reports, not to `witness`".into()));
    }
    Ok(Outcome {
        stdout,
        csv: None,
        passed: w.found == want && w.is_sound(&t, &sc.cone),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Fatal> {
    match &cli.command {
        Command::Examples { name } => {
            let s = settings(cli, None)?;
            let report = match name {
                Some(n) => run_example(n, s.seed).ok_or_else(|| {
                    Fatal(format!("unknown example `{n}`; known: {}", EXAMPLE_NAMES.join(", ")))
                })?,
                None => run_paper_examples(s.seed),
            };
            Ok(report_outcome(&report, &s))
        }
        Command::Verify { config } => {
            let mut config = load(config)?;
            let s = settings(cli, Some(&mut config))?;
            // Construction errors are configuration errors here, not failed assertions.
            config.scenario.build(s.seed)?;
            Ok(report_outcome(&run_scenario(&config.scenario, s.seed), &s))
        }
        Command::Witness { config } => witness(cli, config),
        Command::Properties { cone } => {
            let s = settings(cli, None)?;
            let cone = parse_cone(cone).map_err(|e| Fatal(format!("--cone: {e}")))?;
            Ok(report_outcome(&run_property_suite(&cone, s.seed), &s))
        }
        Command::Selftest => {
            let s = settings(cli, None)?;
            Ok(report_outcome(&run_selftest(s.seed), &s))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some((path, csv)) = &out.csv {
                if let Err(e) = std::fs::write(path, csv) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            eprintln!("finished in {:.2} s", start.elapsed().as_secs_f64());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
