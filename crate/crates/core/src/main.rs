use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trivalent::cli::{cmd_check, cmd_oracle, Format, Outcome, PropertySource, RunConfig, EXIT_INTERNAL, EXIT_OK};
use trivalent::fixtures::verify_fixture;
use trivalent::pks::DEFAULT_COMPLETION_CAP;

#[derive(Parser)]
#[command(name = "trivalent", version, about = "Three-valued LTL model checking of partial Kripke structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property and print the verdict with its evidence.
    Check {
        #[command(flatten)]
        common: Common,
        /// Use this automaton for the negated property instead of translating it.
        #[arg(long, value_name = "PATH")]
        automaton: Option<PathBuf>,
        #[arg(long)]
        emit_proof: bool,
        #[arg(long)]
        emit_counterexample: bool,
        #[arg(long)]
        emit_product: bool,
    },
    /// Check every completion classically and compare with the verdict.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Maximum number of unknown values to enumerate.
        #[arg(long, default_value_t = DEFAULT_COMPLETION_CAP)]
        cap: usize,
    },
    /// Replay the bundled stereoacuity example.
    Replay,
}

#[derive(Args)]
struct Common {
    /// Model document (JSON).
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Property in LTL syntax.
    #[arg(long, conflicts_with = "property_file", required_unless_present = "property_file")]
    property: Option<String>,
    /// File holding the property.
    #[arg(long, value_name = "PATH")]
    property_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Also reject warnings (undeclared atoms, unreachable states).
    #[arg(long)]
    strict_validate: bool,
    /// Reserved; results do not depend on it.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Markdown,
    Plain,
}

impl Common {
    fn config(self) -> RunConfig {
        let property = match (self.property, self.property_file) {
            (Some(text), _) => PropertySource::Text(text),
            (None, Some(path)) => PropertySource::File(path),
            (None, None) => unreachable!("clap requires one property source"),
        };
        let mut cfg = RunConfig::new(self.model, property);
        cfg.format = match self.format {
            OutputFormat::Json => Format::Json,
            OutputFormat::Markdown => Format::Markdown,
            OutputFormat::Plain => Format::Plain,
        };
        cfg.strict_validate = self.strict_validate;
        cfg.seed = self.seed;
        cfg
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Check { common, automaton, emit_proof, emit_counterexample, emit_product } => {
            let mut cfg = common.config();
            cfg.automaton = automaton;
            cfg.emit_proof = emit_proof;
            cfg.emit_counterexample = emit_counterexample;
            cfg.emit_product = emit_product;
            cmd_check(&cfg)
        }
        Command::Oracle { common, cap } => {
            let mut cfg = common.config();
            cfg.completion_cap = cap;
            cmd_oracle(&cfg)
        }
        Command::Replay => {
            let report = verify_fixture();
            let document = serde_json::to_string_pretty(&report).expect("report serializes");
            Outcome { status: if report.all_passed() { EXIT_OK } else { EXIT_INTERNAL }, document }
        }
    };
    if outcome.status == EXIT_OK {
        println!("{}", outcome.document.trim_end());
    } else {
        eprintln!("{}", outcome.document.trim_end());
    }
    ExitCode::from(outcome.status as u8)
}
