//! The `relcausal` command line. [`run`] does all the work so that it can
//! be driven from tests; the binary only forwards its arguments and exit
//! code.
//!
//! Exit codes: `0` success, `2` manifest, input or precondition errors,
//! `3` resource bounds exceeded, `4` no valid matching group. `validate`
//! reports problems instead of failing and always exits `0`.

mod commands;
mod manifest;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{Options, Report};
pub use manifest::{
    AnalysisConfig, AnalysisSource, BoundsEntry, CutEntry, EmvdEntry, MatchingEntry, MatchingMethod, Project,
    ProjectManifest, RelationEntry, ResolvedJoin, TreatmentEntry,
};
pub use table::render_table;

use crate::error::Error;
use crate::gaxioms::Mode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NO_GROUPS: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Semigraphoid,
    Graphoid,
}

#[derive(Debug, Parser)]
#[command(name = "relcausal", version, about = "Conditional independence and causal estimation over joined relations")]
struct Cli {
    /// Project manifest (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Attach empirical checks against instance (or generated) data.
    #[arg(long, global = true)]
    audit: bool,
    /// Largest attribute set a closure may range over.
    #[arg(long, global = true, value_name = "N")]
    max_universe: Option<usize>,
    /// Largest number of statements a closure may derive.
    #[arg(long, global = true, value_name = "N")]
    max_statements: Option<usize>,
    /// Seed for generated test data.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CI statements that hold in the join of the declared relations.
    Infer,
    /// Union I-map of two relations' perfect maps.
    Imap,
    /// Average treatment effect by exact or coarsened matching.
    Ate,
    /// Key, foreign-key, assertion and SUTVA checks.
    Validate,
    /// Closure of the asserted statements, or a derivation of one goal.
    Closure {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Statement to derive, e.g. "A _|_ B | C @ R".
        #[arg(long)]
        goal: Option<String>,
    },
    /// EMVD checks on the base relations and their propagation to the join.
    Emvd,
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        Error::Estimation(_) => EXIT_NO_GROUPS,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_INPUT
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let opts = Options {
        audit: cli.audit,
        max_universe: cli.max_universe,
        max_statements: cli.max_statements,
        seed: cli.seed,
    };
    let result = match (&cli.command, &cli.manifest) {
        (Command::Validate, Some(path)) => Ok(commands::validate(path)),
        (_, None) => Err(Error::Argument("--manifest PATH is required".into())),
        (cmd, Some(path)) => Project::load(path).and_then(|p| match cmd {
            Command::Infer => commands::infer(&p, &opts),
            Command::Imap => commands::imap(&p, &opts),
            Command::Ate => commands::ate(&p, &opts),
            Command::Emvd => commands::emvd(&p, &opts),
            Command::Closure { mode, goal } => {
                let mode = mode.map(|m| match m {
                    ModeArg::Semigraphoid => Mode::Semigraphoid,
                    ModeArg::Graphoid => Mode::Graphoid,
                });
                commands::closure_cmd(&p, &opts, mode, goal.as_deref())
            }
            Command::Validate => unreachable!("handled above"),
        }),
    };
    match result {
        Ok(report) => {
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report.json).expect("JSON values serialize") + "\n",
                Format::Table => report.table,
            };
            let _ = out.write_all(body.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(cli.command, Command::Validate) {
                EXIT_OK
            } else {
                exit_code(&e)
            }
        }
    }
}
