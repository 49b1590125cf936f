use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use polycalc_cli::scenario::{CheckSuite, Generate, Kind};
use polycalc_cli::{
    generate_instance, parse_scenario, run_scenario, to_canonical, Report, Scenario,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Run a full `{"command", "payload"}` scenario file.
    Run,
    Lp,
    RiPoint,
    Separate,
    NormalCone,
    IntersectionRule,
    Subdiff,
    SubdiffSum,
    SubdiffChain,
    Coderivative,
    CoderivSum,
    CoderivChain,
    Conjugate,
    Support,
    ConjSum,
    ConjChain,
    Infconv,
    Fenchel,
    CheckSuite,
    Generate,
}

/// Exact polyhedral convex analysis on JSON scenarios.
#[derive(Parser, Debug)]
#[command(name = "polycalc", version)]
struct Cli {
    command: Command,
    /// Payload or scenario file; stdin when omitted.
    file: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    /// Coefficient bound for `generate`.
    #[arg(long, default_value_t = 5)]
    bound: i64,
    /// Instance kind for `generate`.
    #[arg(long, value_enum, default_value_t = KindArg::PolyhedronPairWithCommonPoint)]
    kind: KindArg,
    /// Criteria for `check-suite`, e.g. `--criteria 1,4`.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    /// Run `check-suite` without the thread pool.
    #[arg(long)]
    sequential: bool,
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Lp,
    Polyhedron,
    PolyhedronPair,
    PolyhedronPairWithCommonPoint,
    Function,
    FunctionPair,
    QualifiedFenchel,
    MapPair,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Lp => Kind::Lp,
            KindArg::Polyhedron => Kind::Polyhedron,
            KindArg::PolyhedronPair => Kind::PolyhedronPair,
            KindArg::PolyhedronPairWithCommonPoint => Kind::PolyhedronPairWithCommonPoint,
            KindArg::Function => Kind::Function,
            KindArg::FunctionPair => Kind::FunctionPair,
            KindArg::QualifiedFenchel => Kind::QualifiedFenchel,
            KindArg::MapPair => Kind::MapPair,
        }
    }
}

fn command_name(c: Command) -> String {
    c.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn read_input(file: &Option<PathBuf>) -> Result<String, String> {
    match file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display())),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(text)
        }
    }
}

fn scenario(cli: &Cli) -> Result<Scenario, String> {
    match cli.command {
        Command::CheckSuite => Ok(Scenario::CheckSuite(CheckSuite {
            seed: cli.seed,
            count: cli.count,
            dims: cli.dims,
            rows: cli.rows,
            criteria: cli.criteria.clone(),
            sequential: cli.sequential,
        })),
        Command::Generate => Ok(Scenario::Generate(Generate {
            seed: cli.seed.unwrap_or(1),
            kind: cli.kind.into(),
            dims: cli.dims.unwrap_or(3),
            rows: cli.rows.unwrap_or(6),
            bound: cli.bound,
        })),
        c => parse_scenario(&command_name(c), &read_input(&cli.file)?),
    }
}

fn render(value: &impl serde::Serialize, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        serde_json::to_string(value).expect("serializable")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(cli.command);
    let report = match scenario(&cli) {
        Err(message) => Report::invalid(&name, message),
        Ok(Scenario::Generate(g)) => match generate_instance(&g) {
            Ok(s) => {
                print!(
                    "{}",
                    if cli.pretty {
                        to_canonical(&s)
                    } else {
                        render(&s, false) + "\n"
                    }
                );
                return ExitCode::SUCCESS;
            }
            Err(message) => Report::invalid(&name, message),
        },
        Ok(s) => run_scenario(&s),
    };
    if let Some(m) = &report.message {
        eprintln!("polycalc {name}: {m}");
    }
    println!("{}", render(&report, cli.pretty));
    ExitCode::from(report.exit_code())
}
