//! Command dispatch: one report per verb.

use std::fmt;

use ontolab::gallery::{chsh_value, AlphabetSizes};
use ontolab::independence::default_tolerance;
use ontolab::lab::{derivation_trace, penalized_search, verify_implication_sweep, SearchConfig, SearchMode};
use ontolab::{
    assumption_deviation, ci_deviation, Assignment, AssumptionId, Backend, ConditionalKernel,
    JointTable, Prob, Rational, ViolationReport,
};

use crate::doc::{check_variables, Check, DocError, GalleryDoc, GalleryName, ScenarioDoc};
use crate::model::{build_gallery, build_joint};
use crate::report::{format_float, format_value, ReportDoc, ReportRow, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Verb {
    Check,
    Sweep,
    Trace,
    Search,
    Gallery,
}

impl Verb {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verb::Check => "check",
            Verb::Sweep => "sweep",
            Verb::Trace => "trace",
            Verb::Search => "search",
            Verb::Gallery => "gallery",
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error("{0}")]
    Module(#[from] ontolab::Error),
}

/// Command-line overrides; unset fields fall back to the document options.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunFlags {
    pub backend: Option<Backend>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub mode: Option<SearchMode>,
    /// Number of sweep models.
    pub n: Option<usize>,
    /// Uniform alphabet size for sweeps.
    pub size: Option<usize>,
    pub penalty: Option<f64>,
    /// Gallery model for `gallery` without a document.
    pub name: Option<GalleryName>,
}

struct Settings {
    backend: Backend,
    tolerance: f64,
    seed: Option<u64>,
}

impl Settings {
    fn resolve(flags: &RunFlags, doc: Option<&ScenarioDoc>, fallback: Backend) -> Result<Self, CliError> {
        let options = doc.map(|d| d.options).unwrap_or_default();
        let backend = flags.backend.or(doc.and_then(ScenarioDoc::backend)).unwrap_or(fallback);
        let tolerance = flags
            .tolerance
            .or(options.tolerance)
            .unwrap_or_else(|| default_tolerance(backend));
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(CliError::Usage(format!("--tolerance must be finite and nonnegative, got {tolerance}")));
        }
        Ok(Settings {
            backend,
            tolerance,
            seed: flags.seed.or(options.seed),
        })
    }

    fn report(&self, verb: Verb, rows: Vec<ReportRow>) -> ReportDoc {
        ReportDoc {
            command: verb.to_string(),
            backend: self.backend,
            seed: self.seed,
            tolerance: self.tolerance,
            version: env!("CARGO_PKG_VERSION").to_string(),
            rows,
        }
    }
}

pub fn run_command(verb: Verb, scenario: Option<&ScenarioDoc>, flags: &RunFlags) -> Result<ReportDoc, CliError> {
    let need_doc = || scenario.ok_or_else(|| CliError::Usage(format!("`{verb}` needs a scenario document")));
    match verb {
        Verb::Check => {
            let doc = need_doc()?;
            let s = Settings::resolve(flags, Some(doc), Backend::Float)?;
            let rows = match s.backend {
                Backend::Exact => check_rows::<Rational>(doc, s.tolerance)?,
                Backend::Float => check_rows::<f64>(doc, s.tolerance)?,
            };
            Ok(s.report(verb, rows))
        }
        Verb::Trace => {
            let doc = need_doc()?;
            let s = Settings::resolve(flags, Some(doc), Backend::Float)?;
            let rows = match s.backend {
                Backend::Exact => trace_rows(&build_joint::<Rational>(doc)?, s.tolerance)?,
                Backend::Float => trace_rows(&build_joint::<f64>(doc)?, s.tolerance)?,
            };
            Ok(s.report(verb, rows))
        }
        Verb::Gallery => {
            let s = Settings::resolve(flags, scenario, Backend::Float)?;
            let rows = match s.backend {
                Backend::Exact => gallery_rows(&gallery_joint::<Rational>(scenario, flags)?, s.tolerance)?,
                Backend::Float => gallery_rows(&gallery_joint::<f64>(scenario, flags)?, s.tolerance)?,
            };
            Ok(s.report(verb, rows))
        }
        Verb::Sweep => {
            let mut s = Settings::resolve(flags, scenario, Backend::Float)?;
            s.seed = Some(s.seed.unwrap_or(0));
            let n = flags.n.ok_or_else(|| CliError::Usage("`sweep` needs --n".into()))?;
            let size = flags.size.unwrap_or(2);
            if size == 0 {
                return Err(CliError::Usage("--size must be at least 1".into()));
            }
            let seed = s.seed.unwrap_or(0);
            let rows = match s.backend {
                Backend::Exact => sweep_rows::<Rational>(n, size, seed, s.tolerance)?,
                Backend::Float => sweep_rows::<f64>(n, size, seed, s.tolerance)?,
            };
            Ok(s.report(verb, rows))
        }
        Verb::Search => {
            let mut s = Settings::resolve(flags, scenario, Backend::Float)?;
            if s.backend != Backend::Float {
                return Err(CliError::Usage("`search` runs on the float backend".into()));
            }
            s.seed = Some(s.seed.unwrap_or(0));
            let mode = flags.mode.ok_or_else(|| CliError::Usage("`search` needs --mode".into()))?;
            let budget = flags.budget.ok_or_else(|| CliError::Usage("`search` needs --budget".into()))?;
            let mut config = SearchConfig::new(mode, budget, s.seed.unwrap_or(0));
            if let Some(w) = flags.penalty {
                config.penalty_weight = w;
            }
            Ok(s.report(verb, search_rows(&config, s.tolerance)?))
        }
    }
}

fn violation_row<P: Prob>(check: String, report: &ViolationReport<P>, tolerance: f64) -> ReportRow {
    ReportRow {
        check,
        component: report.worst_component().map(|c| c.label.clone()).unwrap_or_default(),
        value: format_value(&report.deviation),
        witness: report.witness.as_ref().map(Assignment::to_string).unwrap_or_default(),
        vacuous_events: Some(report.vacuous_events),
        status: Status::from_pass(report.passes(tolerance)),
        note: if report.is_degenerate() { "degenerate".into() } else { String::new() },
    }
}

fn check_rows<P: Prob>(doc: &ScenarioDoc, tolerance: f64) -> Result<Vec<ReportRow>, CliError> {
    let joint = build_joint::<P>(doc)?;
    let mut checks = doc.checks()?;
    if checks.is_empty() {
        checks = applicable(&joint);
    }
    if checks.is_empty() {
        return Err(CliError::Usage("the document lists no checks and no assumption applies".into()));
    }
    checks
        .iter()
        .map(|c| {
            Ok(match c {
                Check::Assumption(id) => violation_row(id.to_string(), &assumption_deviation(&joint, *id)?, tolerance),
                Check::Query(q) => violation_row(q.to_string(), &ci_deviation(&joint, q)?, tolerance),
            })
        })
        .collect()
}

/// Assumptions whose variables all exist in the joint.
fn applicable<P: Prob>(joint: &JointTable<P>) -> Vec<Check> {
    AssumptionId::ALL
        .iter()
        .map(|id| Check::Assumption(*id))
        .filter(|c| check_variables(c).iter().all(|v| joint.scenario().contains(v)))
        .collect()
}

fn trace_rows<P: Prob>(joint: &JointTable<P>, tolerance: f64) -> Result<Vec<ReportRow>, CliError> {
    let trace = derivation_trace(joint)?;
    let mut rows: Vec<ReportRow> = trace
        .steps()
        .iter()
        .map(|(name, r)| ReportRow {
            check: format!("residual_{name}"),
            component: String::new(),
            value: format_value(&r.value),
            witness: r.witness.as_ref().map(Assignment::to_string).unwrap_or_default(),
            vacuous_events: None,
            status: Status::from_pass(r.value.to_f64() <= tolerance),
            note: String::new(),
        })
        .collect();
    let broken = match trace.broken_step(tolerance) {
        Some(step) => step.as_str().to_string(),
        None => "none".into(),
    };
    rows.push(ReportRow::info("broken_step", broken));
    Ok(rows)
}

fn gallery_joint<P: Prob>(doc: Option<&ScenarioDoc>, flags: &RunFlags) -> Result<JointTable<P>, CliError> {
    match (doc, flags.name) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either a document or --name, not both".into())),
        (Some(doc), None) => Ok(build_joint(doc)?),
        (None, Some(name)) => Ok(build_gallery(&GalleryDoc::new(name))?),
        (None, None) => Err(CliError::Usage("`gallery` needs --name or a document".into())),
    }
}

/// `P(X, Y | A, B)` read off a joint, when all four are binary and every
/// setting pair has mass.
fn box_kernel<P: Prob>(joint: &JointTable<P>) -> Option<ConditionalKernel<P>> {
    let sc = joint.scenario();
    for v in ["A", "B", "X", "Y"] {
        if sc.variable(v).ok()?.alphabet_size != 2 {
            return None;
        }
    }
    let mut rows = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let given = Assignment::new().with("A", a).with("B", b);
            rows.push(joint.condition(&["X", "Y"], &given).ok()?.probs().to_vec());
        }
    }
    ConditionalKernel::new(sc.restrict(&["X", "Y"]).ok()?, sc.restrict(&["A", "B"]).ok()?, rows).ok()
}

fn gallery_rows<P: Prob>(joint: &JointTable<P>, tolerance: f64) -> Result<Vec<ReportRow>, CliError> {
    let mut rows = Vec::new();
    for c in applicable(joint) {
        if let Check::Assumption(id) = c {
            rows.push(violation_row(id.to_string(), &assumption_deviation(joint, id)?, tolerance));
        }
    }
    if let Some(kernel) = box_kernel(joint) {
        rows.push(ReportRow::info("CHSH", format_value(&chsh_value(&kernel)?)));
    }
    Ok(rows)
}

fn sweep_rows<P: Prob>(n: usize, size: usize, seed: u64, tolerance: f64) -> Result<Vec<ReportRow>, CliError> {
    let r = verify_implication_sweep::<P>(n, AlphabetSizes::uniform(size), seed)?;
    let within = |v: &P| v.to_f64() <= tolerance;
    let q = r.fr_quantiles;
    Ok(vec![
        ReportRow::info("n_models", r.n_models.to_string()),
        ReportRow::info("alphabet_size", size.to_string()),
        ReportRow::info("premise_failures", r.premise_failures.to_string())
            .with_status(Status::from_pass(r.premise_failures == 0)),
        ReportRow::info("max_premise_deviation", format_value(&r.max_premise_deviation))
            .with_status(Status::from_pass(within(&r.max_premise_deviation))),
        ReportRow::info("max_fr_deviation", format_value(&r.max_fr_deviation))
            .with_status(Status::from_pass(within(&r.max_fr_deviation)))
            .with_note(r.argmax_seed.map(|s| format!("model_seed={s}")).unwrap_or_default()),
        ReportRow::info("fr_median", format_float(q.median)),
        ReportRow::info("fr_p90", format_float(q.p90)),
        ReportRow::info("fr_p99", format_float(q.p99)),
    ])
}

fn search_rows(config: &SearchConfig, tolerance: f64) -> Result<Vec<ReportRow>, CliError> {
    let result = penalized_search(config)?;
    let mode = config.mode;
    let mut rows = vec![
        ReportRow::info("mode", mode.as_str()),
        ReportRow::info("objective", format_float(result.objective_value)),
    ];
    for id in AssumptionId::ALL {
        let report = assumption_deviation(&result.best_model, id)?;
        let mut row = violation_row(id.to_string(), &report, tolerance);
        if id == mode.target() {
            row = row.with_status(Status::Info).with_note("target");
        } else if mode.premises().contains(&id) {
            row = row.with_note("premise");
        } else {
            row = row.with_status(Status::Info);
        }
        rows.push(row);
    }
    rows.push(ReportRow::info("evaluations_used", result.evaluations_used.to_string()));
    rows.push(ReportRow::info("restarts", result.restarts.to_string()));
    rows.push(ReportRow::info("final_penalty_weight", format_float(result.final_penalty_weight)));
    Ok(rows)
}
