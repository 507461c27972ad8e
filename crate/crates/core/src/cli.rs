//! Command-line front end.
//!
//! Exit codes: 0 when the data conforms (or the shapes dataset is clean, or
//! every test case passes), 1 when violations or failures were found, 2 on
//! any error. Diagnostics go to the error stream; only the report or the
//! test listing goes to the output stream.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::harness::{run_suite, CaseOutcome};
use crate::io::{parse_dataset, serialize_graph, RdfFormat};
use crate::model::Dataset;
use crate::shapes_dataset::check_wellformed;
use crate::validate::{validate_dataset, ValidationError, ValidationOptions};
use crate::vocab::{report_prefixes, Vocabulary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shaclds", version, about = "Validate RDF datasets against SHACL shapes datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a data dataset against a shapes dataset and print the report.
    Validate(ValidateArgs),
    /// Check the target declarations of a shapes dataset.
    CheckShapes(CheckShapesArgs),
    /// Run a conformance corpus.
    Test(TestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Trig,
    Nquads,
}

impl From<InputFormat> for RdfFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Trig => RdfFormat::TriG,
            InputFormat::Nquads => RdfFormat::NQuads,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Turtle,
    Trig,
}

impl From<OutputFormat> for RdfFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Turtle => RdfFormat::Turtle,
            OutputFormat::Trig => RdfFormat::TriG,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Data dataset file.
    #[arg(long)]
    pub data: PathBuf,
    /// Shapes dataset file.
    #[arg(long)]
    pub shapes: PathBuf,
    /// Format of the data file; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub data_format: Option<InputFormat>,
    /// Format of the shapes file; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub shapes_format: Option<InputFormat>,
    /// Write the report to this file instead of the output stream.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "turtle")]
    pub output_format: OutputFormat,
    /// Stop after the first focus graph that produced a violation.
    #[arg(long)]
    pub fail_fast: bool,
    /// Stop after this many results.
    #[arg(long, value_name = "N")]
    pub max_results: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckShapesArgs {
    /// Shapes dataset file.
    #[arg(long)]
    pub shapes: PathBuf,
    #[arg(long, value_enum)]
    pub shapes_format: Option<InputFormat>,
    /// Also require plain target graph IRIs to name graphs of this dataset.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub data_format: Option<InputFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Corpus directory, one sub-directory per case.
    pub manifest_dir: PathBuf,
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_ERROR
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match &cli.command {
        Command::Validate(a) => cmd_validate(a, out, err),
        Command::CheckShapes(a) => cmd_check_shapes(a, out, err),
        Command::Test(a) => cmd_test(&a.manifest_dir, out, err),
    }
}

fn load(path: &Path, format: Option<InputFormat>) -> Result<Dataset, String> {
    let format = match format {
        Some(f) => f.into(),
        None => RdfFormat::from_extension(path).unwrap_or(RdfFormat::TriG),
    };
    let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_dataset(&bytes, format).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let vocab = Vocabulary::from_env();
    let inputs = load(&args.data, args.data_format).and_then(|d| Ok((d, load(&args.shapes, args.shapes_format)?)));
    let (data, shapes) = match inputs {
        Ok(pair) => pair,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_ERROR;
        }
    };
    let options = ValidationOptions { fail_fast: args.fail_fast, max_results: args.max_results, vocab: vocab.clone() };
    let outcome = match validate_dataset(&shapes, &data, &options) {
        Ok(o) => o,
        Err(ValidationError::IllFormed(violations)) => {
            for v in &violations {
                let _ = writeln!(err, "error: {v}");
            }
            return EXIT_ERROR;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if outcome.truncated {
        let _ = writeln!(err, "warning: validation stopped early; the report is partial");
    }
    let text = serialize_graph(&outcome.report, args.output_format.into(), &report_prefixes(&vocab));
    let written = match &args.output {
        Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| format!("cannot write report: {e}")),
    };
    if let Err(message) = written {
        let _ = writeln!(err, "error: {message}");
        return EXIT_ERROR;
    }
    if outcome.conforms {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    }
}

pub fn cmd_check_shapes(args: &CheckShapesArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let vocab = Vocabulary::from_env();
    let loaded = load(&args.shapes, args.shapes_format).and_then(|s| {
        let data = args.data.as_ref().map(|p| load(p, args.data_format)).transpose()?;
        Ok((s, data))
    });
    let (shapes, data) = match loaded {
        Ok(pair) => pair,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_ERROR;
        }
    };
    let violations = check_wellformed(&shapes, data.as_ref(), &vocab);
    for v in &violations {
        let _ = writeln!(out, "{v}");
    }
    if violations.is_empty() {
        let _ = writeln!(out, "shapes dataset is well-formed");
        EXIT_OK
    } else {
        let _ = writeln!(out, "{} well-formedness violation(s)", violations.len());
        EXIT_VIOLATIONS
    }
}

pub fn cmd_test(manifest_dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let summary = match run_suite(manifest_dir, &Vocabulary::from_env()) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    for r in &summary.results {
        let status = match &r.outcome {
            CaseOutcome::Pass => "PASS",
            CaseOutcome::Fail { .. } => "FAIL",
            CaseOutcome::Error(_) => "ERROR",
        };
        let _ = writeln!(out, "{status} {} [category {}]", r.case.id, r.case.category.number());
        match &r.outcome {
            CaseOutcome::Pass => {}
            CaseOutcome::Fail { produced } => {
                let _ = writeln!(err, "{}: produced report is not isomorphic to the expected one:\n{produced}", r.case.id);
            }
            CaseOutcome::Error(message) => {
                let _ = writeln!(err, "{}: {message}", r.case.id);
            }
        }
    }
    for (category, (passed, total)) in summary.by_category() {
        let _ = writeln!(out, "{category}: {passed}/{total} passed");
    }
    let _ = writeln!(out, "{} passed, {} failed", summary.passed(), summary.failed());
    if summary.failed() == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    }
}
