//! Command implementations behind the `trivalent` binary.
//!
//! Commands return an [`Outcome`] instead of printing, so they can be
//! driven from tests and the C interface. Exit statuses never encode the
//! verdict: 0 means the analysis completed, whatever its answer.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::automata::Buchi;
use crate::engine::{check, check_with_automaton, Approximation, EngineError, Verdict, VerdictValue};
use crate::ltl::{parse, Formula};
use crate::oracle::{check_completions, CompletionRow, OracleError};
use crate::pks::{PartialKripke, Severity, DEFAULT_COMPLETION_CAP};
use crate::product::{NodeRef, ProductDoc};
use crate::proof::{render_proof, Claim, Proof, ProofFormat, StepKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Markdown,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertySource {
    Text(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub model: PathBuf,
    pub property: PropertySource,
    /// Replaces the automaton built from the property.
    pub automaton: Option<PathBuf>,
    pub format: Format,
    pub emit_proof: bool,
    pub emit_counterexample: bool,
    pub emit_product: bool,
    pub strict_validate: bool,
    /// Reserved; the core is deterministic.
    pub seed: Option<u64>,
    pub completion_cap: usize,
}

impl RunConfig {
    pub fn new(model: impl Into<PathBuf>, property: PropertySource) -> Self {
        RunConfig {
            model: model.into(),
            property,
            automaton: None,
            format: Format::Json,
            emit_proof: false,
            emit_counterexample: false,
            emit_product: false,
            strict_validate: false,
            seed: None,
            completion_cap: DEFAULT_COMPLETION_CAP,
        }
    }

    /// Without any emit flag, both kinds of evidence are emitted.
    fn emits(&self) -> Emit {
        if !(self.emit_proof || self.emit_counterexample || self.emit_product) {
            Emit::default()
        } else {
            Emit { proof: self.emit_proof, counterexample: self.emit_counterexample, product: self.emit_product }
        }
    }
}

/// Which evidence a result document carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub proof: bool,
    pub counterexample: bool,
    pub product: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Emit { proof: true, counterexample: true, product: false }
    }
}

/// Exit status plus the document to print (stdout on success, stderr
/// otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub document: String,
}

#[derive(Debug, Serialize)]
struct ErrorDoc<'a> {
    status: &'a str,
    diagnostics: Vec<String>,
}

/// A rejected run: exit status plus one line per diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub status: i32,
    pub diagnostics: Vec<String>,
}

impl Failure {
    fn input(d: impl Into<String>) -> Self {
        Failure { status: EXIT_INPUT, diagnostics: vec![d.into()] }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL };
        let diagnostics = match e {
            EngineError::Model(crate::pks::PksError::Invalid(vs)) => {
                vs.iter().map(|v| format!("error: {v}")).collect()
            }
            other => vec![other.to_string()],
        };
        Failure { status, diagnostics }
    }
}

fn failure_outcome(f: Failure, format: Format) -> Outcome {
    let document = match format {
        Format::Json => {
            let label = if f.status == EXIT_INPUT { "input-error" } else { "internal-error" };
            serde_json::to_string_pretty(&ErrorDoc { status: label, diagnostics: f.diagnostics })
                .expect("error document serializes")
        }
        Format::Markdown | Format::Plain => f.diagnostics.join("\n"),
    };
    Outcome { status: f.status, document }
}

fn read(path: &Path, what: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {what} {}: {e}", path.display())))
}

/// In-memory inputs of a check. `model_name` prefixes model diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Sources<'a> {
    pub model_name: &'a str,
    pub model: &'a str,
    pub property: &'a str,
    pub automaton: Option<&'a str>,
    pub strict_validate: bool,
}

struct Inputs {
    model: PartialKripke,
    property: Formula,
    warnings: Vec<String>,
}

fn prepare(src: &Sources) -> Result<Inputs, Failure> {
    let name = src.model_name;
    let model = PartialKripke::from_json(src.model).map_err(|e| Failure::input(format!("{name}: {e}")))?;
    let violations = model.validate();
    let rejected: Vec<String> = violations
        .iter()
        .filter(|v| src.strict_validate || v.severity() == Severity::Error)
        .map(|v| format!("{name}: {}: {v}", severity_name(v.severity())))
        .collect();
    if !rejected.is_empty() {
        return Err(Failure { status: EXIT_INPUT, diagnostics: rejected });
    }
    let warnings = violations.iter().map(|v| format!("warning: {v}")).collect();
    let property = parse(src.property.trim()).map_err(|e| Failure::input(format!("property: {e}")))?;
    Ok(Inputs { model, property, warnings })
}

/// Parses, validates and checks; the library entry point behind `check`.
pub fn check_sources(src: &Sources, emit: Emit) -> Result<CheckDoc, Failure> {
    let Inputs { model, property, warnings } = prepare(src)?;
    let verdict = match src.automaton {
        Some(text) => {
            let automaton = Buchi::from_json(text).map_err(|e| Failure::input(format!("automaton: {e}")))?;
            check_with_automaton(&model, &property, &automaton)?
        }
        None => check(&model, &property)?,
    };
    Ok(check_document(verdict, warnings, emit))
}

fn severity_name(s: Severity) -> &'static str {
    match s {
        Severity::Error => "error",
        Severity::Warning => "warning",
    }
}

/// Result document of `check`.
#[derive(Debug, Serialize)]
pub struct CheckDoc {
    pub verdict: VerdictValue,
    pub property: String,
    pub closed_property: String,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<ProofDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub products: Option<Vec<ProductEntry>>,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleDoc {
    pub approximation: Approximation,
    pub path: String,
    pub states: LassoStates,
    pub trace: String,
    pub prefix: Vec<NodeRef>,
    pub cycle: Vec<NodeRef>,
}

#[derive(Debug, Serialize)]
pub struct LassoStates {
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ProofDoc {
    pub approximation: Approximation,
    #[serde(flatten)]
    pub proof: Proof,
}

#[derive(Debug, Serialize)]
pub struct ProductEntry {
    pub approximation: Approximation,
    pub empty: bool,
    #[serde(flatten)]
    pub product: ProductDoc,
}

/// Builds the result document of a verdict.
pub fn check_document(verdict: Verdict, warnings: Vec<String>, emit: Emit) -> CheckDoc {
    let Emit { proof: emit_proof, counterexample: emit_cex, product: emit_product } = emit;
    CheckDoc {
        verdict: verdict.value,
        property: verdict.property,
        closed_property: verdict.closed_property,
        warnings,
        counterexample: verdict.counterexample.filter(|_| emit_cex).map(|c| {
            let (model_prefix, model_cycle) = c.lasso.model_projection();
            let (prefix, cycle) = c.lasso.canonical_trace();
            CounterexampleDoc {
                approximation: c.approximation,
                path: c.path,
                states: LassoStates { prefix: model_prefix, cycle: model_cycle },
                trace: c.trace,
                prefix,
                cycle,
            }
        }),
        proof: verdict
            .proof
            .filter(|_| emit_proof)
            .map(|p| ProofDoc { approximation: p.approximation, proof: p.proof }),
        products: emit_product.then(|| {
            verdict
                .runs
                .into_iter()
                .map(|r| ProductEntry { approximation: r.approximation, empty: r.empty, product: r.product })
                .collect()
        }),
    }
}

/// `trivalent check`: the three-valued verdict with its evidence.
pub fn cmd_check(cfg: &RunConfig) -> Outcome {
    match run_check(cfg) {
        Ok(doc) => Outcome { status: EXIT_OK, document: render_check(&doc, cfg.format) },
        Err(f) => failure_outcome(f, cfg.format),
    }
}

fn run_check(cfg: &RunConfig) -> Result<CheckDoc, Failure> {
    let texts = Texts::read(cfg)?;
    let automaton = match &cfg.automaton {
        Some(path) => Some(read(path, "automaton")?),
        None => None,
    };
    let mut src = texts.sources(cfg);
    src.automaton = automaton.as_deref();
    check_sources(&src, cfg.emits())
}

/// File contents named by a run configuration.
struct Texts {
    model_name: String,
    model: String,
    property: String,
}

impl Texts {
    fn read(cfg: &RunConfig) -> Result<Self, Failure> {
        let property = match &cfg.property {
            PropertySource::Text(t) => t.clone(),
            PropertySource::File(p) => read(p, "property")?,
        };
        Ok(Texts { model_name: cfg.model.display().to_string(), model: read(&cfg.model, "model")?, property })
    }

    fn sources(&self, cfg: &RunConfig) -> Sources<'_> {
        Sources {
            model_name: &self.model_name,
            model: &self.model,
            property: &self.property,
            automaton: None,
            strict_validate: cfg.strict_validate,
        }
    }
}

pub fn render_check(doc: &CheckDoc, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("result serializes"),
        Format::Markdown => check_markdown(doc),
        Format::Plain => check_plain(doc),
    }
}

fn check_markdown(doc: &CheckDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Verdict: {}\n", doc.verdict);
    let _ = writeln!(out, "- Property: `{}`", doc.property);
    let _ = writeln!(out, "- Closed property: `{}`", doc.closed_property);
    for w in &doc.warnings {
        let _ = writeln!(out, "- {w}");
    }
    if let Some(c) = &doc.counterexample {
        let _ = writeln!(out, "\n## Counterexample ({} approximation)\n", c.approximation);
        let _ = writeln!(out, "- Path: {}", c.path);
        let _ = writeln!(out, "- Product trace: {}", c.trace.replace('<', "⟨").replace('>', "⟩"));
    }
    if let Some(p) = &doc.proof {
        let _ = writeln!(out, "\n## Proof ({} approximation)\n", p.approximation);
        out.push_str(&render_proof(&p.proof, ProofFormat::Markdown));
    }
    if let Some(products) = &doc.products {
        for p in products {
            let _ = writeln!(
                out,
                "\n## Product ({})\n\n{} nodes, {} edges, {}",
                p.approximation,
                p.product.nodes.len(),
                p.product.edges.len(),
                if p.empty { "empty" } else { "nonempty" }
            );
        }
    }
    out
}

fn check_plain(doc: &CheckDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", doc.verdict);
    let _ = writeln!(out, "property: {}", doc.property);
    for w in &doc.warnings {
        let _ = writeln!(out, "{w}");
    }
    if let Some(c) = &doc.counterexample {
        let _ = writeln!(out, "counterexample ({}): {}", c.approximation, c.path);
        let _ = writeln!(out, "trace: {}", c.trace);
    }
    if let Some(p) = &doc.proof {
        let _ = writeln!(out, "proof ({}): {} steps", p.approximation, p.proof.steps.len());
        for (i, step) in p.proof.steps.iter().enumerate() {
            let what = match step.kind {
                StepKind::Conclusion => step
                    .conclusions
                    .iter()
                    .map(Claim::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
                _ => step.component.iter().map(NodeRef::to_string).collect::<Vec<_>>().join(" "),
            };
            let _ = writeln!(out, "  {:>2}. {} {}", i + 1, step.kind, what);
        }
    }
    if let Some(products) = &doc.products {
        for p in products {
            let _ = writeln!(
                out,
                "product ({}): {} nodes, {}",
                p.approximation,
                p.product.nodes.len(),
                if p.empty { "empty" } else { "nonempty" }
            );
        }
    }
    out
}

/// Result document of `oracle`.
#[derive(Debug, Serialize)]
pub struct OracleDoc {
    pub verdict: VerdictValue,
    pub property: String,
    pub unknowns: usize,
    pub completions: Vec<CompletionRow>,
    pub satisfied: usize,
    pub violated: usize,
    pub consistent: bool,
}

/// `trivalent oracle`: checks every completion classically and compares
/// with the three-valued verdict. A definite verdict contradicted by some
/// completion is an internal error.
pub fn cmd_oracle(cfg: &RunConfig) -> Outcome {
    match run_oracle(cfg) {
        Ok(doc) => {
            let status = if doc.consistent { EXIT_OK } else { EXIT_INTERNAL };
            Outcome { status, document: render_oracle(&doc, cfg.format) }
        }
        Err(f) => failure_outcome(f, cfg.format),
    }
}

fn run_oracle(cfg: &RunConfig) -> Result<OracleDoc, Failure> {
    let texts = Texts::read(cfg)?;
    let inputs = prepare(&texts.sources(cfg))?;
    let rows = check_completions(&inputs.model, &inputs.property, cfg.completion_cap).map_err(|e| match e {
        OracleError::Model(m) => Failure::input(m.to_string()),
        other => Failure::input(other.to_string()),
    })?;
    let verdict = check(&inputs.model, &inputs.property)?;
    let satisfied = rows.iter().filter(|r| r.satisfies).count();
    let violated = rows.len() - satisfied;
    let consistent = match verdict.value {
        VerdictValue::True => violated == 0,
        VerdictValue::False => satisfied == 0,
        VerdictValue::Maybe => true,
    };
    Ok(OracleDoc {
        verdict: verdict.value,
        property: verdict.property,
        unknowns: inputs.model.unknowns().len(),
        completions: rows,
        satisfied,
        violated,
        consistent,
    })
}

pub fn render_oracle(doc: &OracleDoc, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("oracle document serializes"),
        Format::Markdown => {
            let mut out = format!(
                "# Completions of `{}`\n\n| # | Assignment | Outcome |\n|---|---|---|\n",
                doc.property
            );
            for (i, row) in doc.completions.iter().enumerate() {
                let outcome = if row.satisfies { "satisfy" } else { "violate" };
                let _ = writeln!(out, "| {} | {} | {outcome} |", i + 1, row.assignment.join(", "));
            }
            let _ = writeln!(
                out,
                "\nVerdict {}; {} satisfy, {} violate; {}.",
                doc.verdict,
                doc.satisfied,
                doc.violated,
                if doc.consistent { "consistent" } else { "INCONSISTENT" }
            );
            out
        }
        Format::Plain => {
            let mut out = String::new();
            for row in &doc.completions {
                let outcome = if row.satisfies { "satisfy" } else { "violate" };
                let _ = writeln!(out, "{outcome}: {}", row.assignment.join(", "));
            }
            let _ = writeln!(
                out,
                "verdict {}: {} satisfy, {} violate, {}",
                doc.verdict,
                doc.satisfied,
                doc.violated,
                if doc.consistent { "consistent" } else { "inconsistent" }
            );
            out
        }
    }
}
