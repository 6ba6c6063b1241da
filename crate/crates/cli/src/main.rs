use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use higgs_ks::builtin::Example;
use higgs_ks::cech::{DegreeWindow, MThetaSign};
use higgs_ks::report::Report;
use higgs_ks::scenario::{run_scenario, RunOptions, Scenario};
use higgs_ks::verify::{verify_paper, Proposition, VerifyOptions, DEFAULT_SEED};
use higgs_ks::Error;

#[derive(Parser)]
#[command(
    name = "higgs-ks",
    version,
    about = "Exact Čech and Kodaira-Spencer computations on Higgs bundles"
)]
struct Cli {
    /// Degree window LO:HI for cohomology solves.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<DegreeWindow>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Load a built-in example.
    #[arg(long, global = true, value_parser = parse_example)]
    example: Option<Example>,
    /// Show task timings in text output.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files, or the built-in scenario of --example.
    Check {
        /// Scenario TOML files.
        files: Vec<PathBuf>,
    },
    /// Deform a Higgs bundle along a tangent cocycle.
    Deform {
        /// The coefficient c of c d/dx on the overlap, e.g. "u^2".
        #[arg(long, conflicts_with = "cocycle")]
        chi: Option<String>,
        /// A tangent cocycle declared in --scenario.
        #[arg(long, requires = "scenario")]
        cocycle: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Also check gradedness at this scalar.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Čech (hyper)cohomology of a sheaf on the example or scenario cover.
    Cohomology {
        /// O(d), E, end, end-omega, tangent or higgs.
        #[arg(long, default_value = "higgs")]
        sheaf: String,
        /// A single degree; all degrees when omitted.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Run the seeded property suite.
    VerifyPaper {
        /// Run only these propositions.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Use the opposite sign of m_theta (negative control).
        #[arg(long, hide = true)]
        debug_flip_sign: bool,
    },
    /// List the built-in examples.
    Examples,
}

fn parse_window(s: &str) -> Result<DegreeWindow, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_example(s: &str) -> Result<Example, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// An input problem: exit status 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

fn load(path: &PathBuf, fallback: Option<Example>) -> Result<Scenario, InputError> {
    let src = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Scenario::from_toml(&path.display().to_string(), &src, fallback)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn table(pairs: &[(&str, &str)]) -> toml::Table {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), toml::Value::String(v.to_string())))
        .collect()
}

fn emit(cli: &Cli, reports: &[Report]) {
    match cli.format {
        Format::Text => {
            for r in reports {
                print!("{}", r.to_text(cli.timing));
            }
        }
        Format::Structured if reports.len() == 1 => print!("{}", reports[0].to_structured()),
        Format::Structured => {
            let joined: Vec<String> = reports
                .iter()
                .map(|r| r.to_structured().trim_end().to_string())
                .collect();
            println!("[\n{}\n]", joined.join(",\n"));
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<Report>, InputError> {
    let opts = RunOptions {
        seed: cli.seed,
        window: cli.window,
    };
    match &cli.command {
        Command::Check { files } => {
            if files.is_empty() {
                let ex = cli
                    .example
                    .ok_or_else(|| InputError("give scenario files or --example NAME".into()))?;
                return Ok(vec![run_scenario(&Scenario::builtin_default(ex), &opts)]);
            }
            let scenarios = files
                .iter()
                .map(|f| load(f, cli.example))
                .collect::<Result<Vec<_>, _>>()?;
            // independent scenarios run concurrently; reports keep argument order
            Ok(std::thread::scope(|s| {
                let handles: Vec<_> = scenarios.iter().map(|sc| s.spawn(|| run_scenario(sc, &opts))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("scenario thread"))
                    .collect()
            }))
        }
        Command::Deform {
            chi,
            cocycle,
            scenario,
            t,
        } => {
            let mut sc = match scenario {
                Some(p) => load(p, cli.example)?,
                None => Scenario::builtin(cli.example.unwrap_or(Example::P1Nilpotent)),
            };
            sc.tasks.clear();
            let name = match (chi, cocycle) {
                (Some(lit), None) => {
                    sc.add_tangent_literal("chi", lit)?;
                    "chi".to_string()
                }
                (None, Some(n)) => n.clone(),
                _ => return Err(InputError("give --chi LITERAL or --cocycle NAME".into())),
            };
            sc.push_task(&table(&[("id", "ks"), ("op", "ks_cocycle"), ("cocycle", &name)]))?;
            sc.push_task(&table(&[
                ("id", "deform"),
                ("op", "build_deformation"),
                ("cocycle", &name),
            ]))?;
            if let Some(t) = t {
                sc.push_task(&table(&[
                    ("id", "graded"),
                    ("op", "gradedness"),
                    ("cocycle", &name),
                    ("t", t),
                ]))?;
            }
            Ok(vec![run_scenario(&sc, &opts)])
        }
        Command::Cohomology {
            sheaf,
            degree,
            scenario,
        } => {
            let mut sc = match scenario {
                Some(p) => load(p, cli.example)?,
                None => Scenario::builtin(cli.example.unwrap_or(Example::P1Nilpotent)),
            };
            sc.tasks.clear();
            match degree {
                Some(d) => {
                    let mut t = table(&[("id", "cohomology"), ("op", "cohomology"), ("sheaf", sheaf)]);
                    t.insert("degree".into(), toml::Value::Integer(*d as i64));
                    sc.push_task(&t)?;
                }
                None => sc.push_task(&table(&[
                    ("id", "cohomology"),
                    ("op", "euler_characteristic"),
                    ("sheaf", sheaf),
                ]))?,
            }
            Ok(vec![run_scenario(&sc, &opts)])
        }
        Command::VerifyPaper { only, debug_flip_sign } => {
            let vo = VerifyOptions {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                sign: if *debug_flip_sign {
                    MThetaSign::Flipped
                } else {
                    MThetaSign::Standard
                },
            };
            if only.is_empty() {
                return Ok(vec![verify_paper(&vo)]);
            }
            let mut report = verify_paper_subset(&vo, only)?;
            report.source = format!("verify-paper (subset {only:?})");
            Ok(vec![report])
        }
        Command::Examples => {
            for e in Example::ALL {
                println!("{:<14} {}", e.name(), e.summary());
            }
            Ok(vec![])
        }
    }
}

fn verify_paper_subset(vo: &VerifyOptions, only: &[u8]) -> Result<Report, InputError> {
    let mut report = Report::new("verify-paper", vo.seed);
    for id in only {
        let p = Proposition::by_id(*id).ok_or_else(|| InputError(format!("no proposition {id} (1 to 10)")))?;
        report.tasks.push(p.run(vo));
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(reports) => {
            emit(&cli, &reports);
            let code = reports.iter().map(Report::exit_code).max().unwrap_or(0);
            ExitCode::from(code as u8)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
