use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::Value;

use sullivan::abelian::ledger::{self, Counterfactual, Ledger, Outcome};
use sullivan::classifier::classify;
use sullivan::invariants::Multidegree;
use sullivan::literal::{parse_multidegree, ParseError};
use sullivan::record;
use sullivan::search::{find_collisions, SearchError, SearchSpec, DEFAULT_LIMIT};

mod table;

const LITERAL_HELP: &str = "Multidegree literal: comma-separated degrees, where d^m means m copies \
     of the degree d (multiplicity, NOT exponentiation). Example: 3^150,7^89,15";

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sullivan",
    version,
    about = "Invariants and diffeomorphism verdicts for complete intersections",
    long_about = "Invariants and diffeomorphism verdicts for complete intersections.\n\n\
        Multidegrees are written as comma-separated degrees. In d^m the caret \
        means multiplicity: 3^150 is 150 copies of the degree 3, not 3 to the \
        power 150.\n\n\
        Exit codes: 0 computed, 1 usage or parse error, 2 enumeration limit or \
        failed internal check."
)]
struct Cli {
    /// Output format. JSON is the stable interface.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Sullivan data (d, p_i, chi), plus the Wu profile when n = 4.
    Sd {
        /// Complex dimension.
        n: u32,
        #[arg(help = LITERAL_HELP)]
        multidegree: String,
        /// Also print the Pontryagin numbers in the classical sign convention.
        #[arg(long)]
        classical_signs: bool,
    },
    /// Compare two complete intersections of the same dimension.
    Classify {
        n: u32,
        #[arg(help = LITERAL_HELP)]
        a: String,
        #[arg(help = LITERAL_HELP)]
        b: String,
    },
    /// Theta-rigidity row of a 4-dimensional complete intersection.
    Rigidity {
        #[arg(help = LITERAL_HELP)]
        multidegree: String,
    },
    /// Search a box of multidegrees for distinct ones with equal Sullivan data.
    Search {
        n: u32,
        /// Largest degree considered.
        #[arg(long, required_unless_present = "total_degree")]
        max_degree: Option<u64>,
        /// Largest number of degrees (not counting 1s).
        #[arg(long)]
        max_k: usize,
        /// Only multidegrees with this total degree.
        #[arg(long, value_parser = parse_bigint)]
        total_degree: Option<BigInt>,
        /// Number of parallel shards. Does not affect the output.
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Abort when more multidegrees than this would be enumerated.
        #[arg(long, env = "SULLIVAN_ENUM_LIMIT", default_value_t = DEFAULT_LIMIT)]
        limit: u64,
        /// List every enumerated multidegree (always on with --total-degree).
        #[arg(long)]
        list: bool,
    },
    /// Replay the recorded stable-stem computation.
    Ledger {
        #[command(subcommand)]
        action: LedgerAction,
    },
}

#[derive(Subcommand)]
enum LedgerAction {
    /// Check every derivation step against the ledger.
    Verify {
        /// Run with a deliberately altered input.
        #[arg(long, value_enum)]
        counterfactual: Option<CounterfactualArg>,
        /// Ledger file to use instead of the built-in one.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterfactualArg {
    SplitBracket,
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("expected a positive decimal integer".into());
    }
    s.parse().map_err(|e| format!("{e}"))
}

/// What a subcommand produced: a record to print (if any) and an exit code.
struct Reply {
    record: Option<Value>,
    code: u8,
}

fn ok(record: Value) -> Reply {
    Reply {
        record: Some(record),
        code: EXIT_OK,
    }
}

fn usage(message: String) -> Reply {
    eprintln!("error: {message}");
    Reply {
        record: None,
        code: EXIT_USAGE,
    }
}

fn literal(text: &str) -> Result<Multidegree, Reply> {
    parse_multidegree(text).map_err(|e| literal_error(text, &e))
}

fn literal_error(text: &str, e: &ParseError) -> Reply {
    let mut message = format!("{e}\n  {text}\n  ");
    // caret under the offending character
    let col = text[..e.position.min(text.len())].chars().count();
    message.push_str(&" ".repeat(col));
    message.push('^');
    usage(message)
}

fn run(command: Command) -> Reply {
    match command {
        Command::Sd {
            n,
            multidegree,
            classical_signs,
        } => {
            if n < 1 {
                return usage("dimension must be at least 1".into());
            }
            match literal(&multidegree) {
                Ok(md) => ok(record::sd_record(n, &md, classical_signs)),
                Err(out) => out,
            }
        }
        Command::Classify { n, a, b } => {
            let (a, b) = match (literal(&a), literal(&b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(out), _) | (_, Err(out)) => return out,
            };
            match classify(n, &a, &b) {
                Ok(verdict) => ok(record::classify_record(n, &a, &b, &verdict)),
                Err(e) => usage(e.to_string()),
            }
        }
        Command::Rigidity { multidegree } => match literal(&multidegree) {
            Ok(md) => ok(record::rigidity_record(&md)),
            Err(out) => out,
        },
        Command::Search {
            n,
            max_degree,
            max_k,
            total_degree,
            shards,
            limit,
            list,
        } => {
            let list = list || total_degree.is_some();
            let spec = SearchSpec {
                n,
                max_degree,
                max_k,
                total_degree_target: total_degree,
                shard_count: shards,
                limit,
            };
            match find_collisions(&spec) {
                Ok(report) => {
                    eprintln!("search finished in {:.3} s", report.elapsed.as_secs_f64());
                    ok(record::search_record(&report, list))
                }
                Err(e @ SearchError::DegreeOverflow(_)) => usage(e.to_string()),
                Err(SearchError::InvalidSpec(m)) => usage(m),
                Err(e) => {
                    eprintln!("error: {e}");
                    Reply {
                        record: Some(record::search_error_record(&spec, &e)),
                        code: EXIT_INTERNAL,
                    }
                }
            }
        }
        Command::Ledger {
            action: LedgerAction::Verify {
                counterfactual,
                ledger: path,
            },
        } => {
            let loaded = match &path {
                None => Ok(Ledger::shipped()),
                Some(p) => match fs::read_to_string(p) {
                    Ok(text) => Ledger::from_toml(&text),
                    Err(e) => return usage(format!("cannot read {}: {e}", p.display())),
                },
            };
            let report = match loaded {
                Ok(l) => ledger::replay(
                    &l,
                    counterfactual.map(|CounterfactualArg::SplitBracket| Counterfactual::SplitBracket),
                ),
                Err(e) => ledger::load_failure(&e),
            };
            let failed = report.steps.iter().any(|s| s.outcome == Outcome::Fail);
            if let Some(step) = report.failed_step() {
                eprintln!("error: step {} failed: {}", step.id, step.detail);
            }
            Reply {
                record: Some(record::ledger_record(&report)),
                code: if failed { EXIT_INTERNAL } else { EXIT_OK },
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = run(cli.command);
    if let Some(record) = out.record {
        match cli.format {
            Format::Json => {
                println!("{}", serde_json::to_string_pretty(&record).expect("serializable"));
            }
            Format::Table => print!("{}", table::render(&record)),
        }
    }
    ExitCode::from(out.code)
}
