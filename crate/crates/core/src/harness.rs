//! Manifest-driven conformance runner.
//!
//! A corpus is a directory with one sub-directory per case. Each case holds
//! `data.trig`, `shapes.trig`, `expected-report.ttl` and a `meta.toml` with
//! an `id` and a `category` between 1 and 5. A case passes when the report
//! produced for its data and shapes is isomorphic to the expected report,
//! provenance annotations included.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::io::{parse_dataset, parse_graph, RdfFormat};
use crate::model::{graph_isomorphic, Graph};
use crate::validate::{validate_dataset, ValidationOptions};
use crate::vocab::Vocabulary;

pub const DATA_FILE: &str = "data.trig";
pub const SHAPES_FILE: &str = "shapes.trig";
pub const EXPECTED_FILE: &str = "expected-report.ttl";
pub const META_FILE: &str = "meta.toml";

/// The five kinds of conformance cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    SimpleTargets = 1,
    Exclusions = 2,
    Combinations = 3,
    NestedCombinations = 4,
    Sparql = 5,
}

impl Category {
    pub const ALL: [Category; 5] =
        [Category::SimpleTargets, Category::Exclusions, Category::Combinations, Category::NestedCombinations, Category::Sparql];

    pub fn from_number(n: i64) -> Option<Self> {
        Self::ALL.into_iter().find(|c| *c as i64 == n)
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn description(self) -> &'static str {
        match self {
            Category::SimpleTargets => "simple targets and predefined IRIs",
            Category::Exclusions => "exclusions",
            Category::Combinations => "simple combinations",
            Category::NestedCombinations => "nested combinations with predefined IRIs",
            Category::Sparql => "SPARQL with dataset-level keywords",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "category {} ({})", self.number(), self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub dir: PathBuf,
    pub data_path: PathBuf,
    pub shapes_path: PathBuf,
    pub expected_report_path: PathBuf,
    pub category: Category,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Meta { path: PathBuf, message: String },
    #[error("duplicate case id {0:?}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    Pass,
    /// The produced report differs from the expected one.
    Fail { produced: String },
    /// The case could not be run.
    Error(String),
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CaseOutcome::Pass)
    }
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub case: TestCase,
    pub outcome: CaseOutcome,
    /// The produced report serialized as Turtle, when validation succeeded.
    pub report: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteSummary {
    pub results: Vec<CaseResult>,
}

impl SuiteSummary {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.outcome.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    /// (passed, total) for every category, including empty ones.
    pub fn by_category(&self) -> BTreeMap<Category, (usize, usize)> {
        let mut counts: BTreeMap<Category, (usize, usize)> = Category::ALL.into_iter().map(|c| (c, (0, 0))).collect();
        for r in &self.results {
            let entry = counts.entry(r.case.category).or_default();
            entry.1 += 1;
            if r.outcome.passed() {
                entry.0 += 1;
            }
        }
        counts
    }
}

fn read_meta(path: &Path) -> Result<(String, Category), HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })?;
    let meta_err = |message: String| HarnessError::Meta { path: path.to_owned(), message };
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| meta_err(e.message().to_owned()))?;
    let id = table.get("id").and_then(toml::Value::as_str).ok_or_else(|| meta_err("missing string key `id`".into()))?;
    let n = table.get("category").and_then(toml::Value::as_integer).ok_or_else(|| meta_err("missing integer key `category`".into()))?;
    let category = Category::from_number(n).ok_or_else(|| meta_err(format!("category must be between 1 and 5, got {n}")))?;
    Ok((id.to_owned(), category))
}

/// Loads every case below `dir`, sorted by id.
pub fn load_cases(dir: &Path) -> Result<Vec<TestCase>, HarnessError> {
    let entries = fs::read_dir(dir).map_err(|source| HarnessError::Io { path: dir.to_owned(), source })?;
    let mut cases = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| HarnessError::Io { path: dir.to_owned(), source })?;
        let case_dir = entry.path();
        let meta = case_dir.join(META_FILE);
        if !case_dir.is_dir() || !meta.is_file() {
            continue;
        }
        let (id, category) = read_meta(&meta)?;
        cases.push(TestCase {
            id,
            data_path: case_dir.join(DATA_FILE),
            shapes_path: case_dir.join(SHAPES_FILE),
            expected_report_path: case_dir.join(EXPECTED_FILE),
            dir: case_dir,
            category,
        });
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = cases.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(HarnessError::DuplicateId(w[0].id.clone()));
    }
    Ok(cases)
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn produce(case: &TestCase, options: &ValidationOptions) -> Result<(Graph, Graph), String> {
    let data = parse_dataset(&read(&case.data_path)?, RdfFormat::TriG).map_err(|e| format!("{}: {e}", case.data_path.display()))?;
    let shapes = parse_dataset(&read(&case.shapes_path)?, RdfFormat::TriG).map_err(|e| format!("{}: {e}", case.shapes_path.display()))?;
    let expected = parse_graph(&read(&case.expected_report_path)?, RdfFormat::Turtle)
        .map_err(|e| format!("{}: {e}", case.expected_report_path.display()))?;
    let outcome = validate_dataset(&shapes, &data, options).map_err(|e| e.to_string())?;
    Ok((outcome.report, expected))
}

/// Runs one case.
pub fn run_case(case: &TestCase, vocab: &Vocabulary) -> CaseResult {
    let options = ValidationOptions { vocab: vocab.clone(), ..ValidationOptions::default() };
    match produce(case, &options) {
        Ok((report, expected)) => {
            let text = crate::io::serialize_graph(&report, RdfFormat::Turtle, &crate::vocab::report_prefixes(vocab));
            let outcome = if graph_isomorphic(&report, &expected) {
                CaseOutcome::Pass
            } else {
                CaseOutcome::Fail { produced: text.clone() }
            };
            CaseResult { case: case.clone(), outcome, report: Some(text) }
        }
        Err(message) => CaseResult { case: case.clone(), outcome: CaseOutcome::Error(message), report: None },
    }
}

/// Runs every case of the corpus in id order.
pub fn run_suite(dir: &Path, vocab: &Vocabulary) -> Result<SuiteSummary, HarnessError> {
    let cases = load_cases(dir)?;
    Ok(SuiteSummary { results: cases.iter().map(|c| run_case(c, vocab)).collect() })
}
