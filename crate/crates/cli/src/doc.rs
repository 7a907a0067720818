//! Scenario documents: the JSON input format.
//!
//! See `docs/scenario-format.md` for the grammar. Parsing validates the whole
//! document, including building the model once on its declared backend, so a
//! parsed [`ScenarioDoc`] is known to run.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use ontolab::{AssumptionId, Backend, CiQuery, Role, Scenario, VariableSpec};

use crate::model;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema {
        path: String,
        message: String,
        source: Option<ontolab::Error>,
    },
    #[error("reference error at `{path}`: undeclared variable `{name}`")]
    Reference { path: String, name: String },
}

impl DocError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Schema {
            path: path.into(),
            message: message.into(),
            source: None,
        }
    }

    pub(crate) fn wrap(path: impl Into<String>, err: ontolab::Error) -> Self {
        DocError::Schema {
            path: path.into(),
            message: err.to_string(),
            source: Some(err),
        }
    }

    pub(crate) fn reference(path: impl Into<String>, name: impl Into<String>) -> Self {
        DocError::Reference {
            path: path.into(),
            name: name.into(),
        }
    }

    /// The document path the diagnostic points at (`None` for syntax errors).
    pub fn path(&self) -> Option<&str> {
        match self {
            DocError::Syntax { .. } => None,
            DocError::Schema { path, .. } | DocError::Reference { path, .. } => Some(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub ontolab_schema: u32,
    pub variables: Vec<VariableDoc>,
    pub model: ModelDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckDoc>,
    #[serde(default, skip_serializing_if = "OptionsDoc::is_empty")]
    pub options: OptionsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub role: RoleName,
    pub alphabet_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias_of: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleName {
    Setting,
    Outcome,
    Ontic,
}

impl From<RoleName> for Role {
    fn from(r: RoleName) -> Role {
        match r {
            RoleName::Setting => Role::Setting,
            RoleName::Outcome => Role::Outcome,
            RoleName::Ontic => Role::Ontic,
        }
    }
}

impl From<Role> for RoleName {
    fn from(r: Role) -> RoleName {
        match r {
            Role::Setting => RoleName::Setting,
            Role::Outcome => RoleName::Outcome,
            Role::Ontic => RoleName::Ontic,
        }
    }
}

/// Exactly one of the three model forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDoc {
    Table(Vec<TableEntry>),
    Factorization(Vec<FactorDoc>),
    Gallery(GalleryDoc),
}

/// One support point; unlisted assignments have probability 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub assignment: BTreeMap<String, usize>,
    pub p: String,
}

/// `P(targets | givens)`, one row per givens assignment in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub givens: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryDoc {
    pub name: GalleryName,
    #[serde(default, skip_serializing_if = "GalleryParams::is_empty")]
    pub params: GalleryParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GalleryName {
    PrBox,
    Singlet,
    AdaptiveC,
    OutcomeRevealing,
    PremiseRandom,
    LocalDeterministic,
}

impl GalleryName {
    pub fn as_str(&self) -> &'static str {
        match self {
            GalleryName::PrBox => "pr_box",
            GalleryName::Singlet => "singlet",
            GalleryName::AdaptiveC => "adaptive_c",
            GalleryName::OutcomeRevealing => "outcome_revealing",
            GalleryName::PremiseRandom => "premise_random",
            GalleryName::LocalDeterministic => "local_deterministic",
        }
    }

    fn accepts(&self, param: &str) -> bool {
        matches!(
            (self, param),
            (GalleryName::AdaptiveC, "p_copy")
                | (GalleryName::OutcomeRevealing, "response")
                | (GalleryName::PremiseRandom, "seed" | "alphabet_size")
                | (GalleryName::LocalDeterministic, "x_response" | "y_response" | "z_response")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_copy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<ResponseName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_response: Option<ResponseName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_response: Option<ResponseName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_response: Option<ResponseName>,
}

impl GalleryParams {
    fn is_empty(&self) -> bool {
        *self == GalleryParams::default()
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.p_copy.is_some() {
            out.push("p_copy");
        }
        if self.response.is_some() {
            out.push("response");
        }
        if self.seed.is_some() {
            out.push("seed");
        }
        if self.alphabet_size.is_some() {
            out.push("alphabet_size");
        }
        if self.x_response.is_some() {
            out.push("x_response");
        }
        if self.y_response.is_some() {
            out.push("y_response");
        }
        if self.z_response.is_some() {
            out.push("z_response");
        }
        out
    }
}

/// Binary response tables `outcome = f(setting, ontic)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseName {
    Constant0,
    Constant1,
    Lambda,
    Setting,
    And,
    Xor,
}

impl ResponseName {
    pub fn response(&self) -> ontolab::gallery::ResponseFunction {
        use ontolab::gallery::ResponseFunction as R;
        match self {
            ResponseName::Constant0 => R::constant(0),
            ResponseName::Constant1 => R::constant(1),
            ResponseName::Lambda => R::copy_ontic(),
            ResponseName::Setting => R::from_fn(2, 2, 2, |s, _| s).expect("binary table"),
            ResponseName::And => R::and_gate(),
            ResponseName::Xor => R::from_fn(2, 2, 2, |s, l| s ^ l).expect("binary table"),
        }
    }
}

/// An assumption id (`"FR"`, `"FRprime"`, `"NS"`, `"ST"`, `"FACT"`) or a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckDoc {
    Assumption(String),
    Query(QueryDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDoc {
    pub target: Vec<String>,
    pub independent_of: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub given: Vec<String>,
}

/// A validated check.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Assumption(AssumptionId),
    Query(CiQuery),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl OptionsDoc {
    fn is_empty(&self) -> bool {
        *self == OptionsDoc::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendName {
    Exact,
    Float,
}

impl From<BackendName> for Backend {
    fn from(b: BackendName) -> Backend {
        match b {
            BackendName::Exact => Backend::Exact,
            BackendName::Float => Backend::Float,
        }
    }
}

impl ScenarioDoc {
    /// The declared variables as a library scenario.
    pub fn scenario(&self) -> Result<Scenario, DocError> {
        for (i, v) in self.variables.iter().enumerate() {
            if let Some(target) = &v.alias_of {
                if !self.variables.iter().any(|w| &w.name == target) {
                    return Err(DocError::reference(format!("variables[{i}].alias_of"), target.clone()));
                }
            }
        }
        let specs = self
            .variables
            .iter()
            .map(|v| {
                let spec = VariableSpec::new(v.name.clone(), v.role.into(), v.alphabet_size);
                match &v.alias_of {
                    Some(t) => spec.alias_of(t.clone()),
                    None => spec,
                }
            })
            .collect();
        Scenario::new(specs).map_err(|e| DocError::wrap("variables", e))
    }

    pub fn declares(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v.name == name)
    }

    /// Validated checks, in document order.
    pub fn checks(&self) -> Result<Vec<Check>, DocError> {
        self.checks
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("checks[{i}]");
                let check = match c {
                    CheckDoc::Assumption(id) => {
                        Check::Assumption(AssumptionId::from_str(id).map_err(|m| DocError::schema(&path, m))?)
                    }
                    CheckDoc::Query(q) => Check::Query(
                        CiQuery::conditional(&q.target, &q.independent_of, &q.given)
                            .map_err(|e| DocError::wrap(&path, e))?,
                    ),
                };
                for name in check_variables(&check) {
                    if !self.declares(&name) {
                        return Err(DocError::reference(&path, name));
                    }
                }
                Ok(check)
            })
            .collect()
    }

    pub fn backend(&self) -> Option<Backend> {
        self.options.backend.map(Backend::from)
    }
}

/// Every variable a check reads.
pub fn check_variables(check: &Check) -> Vec<String> {
    match check {
        Check::Query(q) => q.variables().map(str::to_string).collect(),
        Check::Assumption(id) => {
            let mut out: Vec<String> = Vec::new();
            for c in id.components() {
                let vars: Vec<String> = match c {
                    ontolab::Component::Ci(q) => q.variables().map(str::to_string).collect(),
                    ontolab::Component::Factorization(v) => v,
                };
                for v in vars {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            out
        }
    }
}

/// Parse and fully validate a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<ScenarioDoc, DocError> {
    let syntax = |e: &serde_json::Error| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: ScenarioDoc = match serde_path_to_error::deserialize(&mut de) {
        Ok(doc) => doc,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            return Err(match inner.classify() {
                Category::Data => DocError::schema(path, inner.to_string()),
                Category::Io | Category::Syntax | Category::Eof => syntax(&inner),
            });
        }
    };
    de.end().map_err(|e| syntax(&e))?;
    validate(&doc)?;
    Ok(doc)
}

fn validate(doc: &ScenarioDoc) -> Result<(), DocError> {
    if doc.ontolab_schema != SCHEMA_VERSION {
        return Err(DocError::schema(
            "ontolab_schema",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.ontolab_schema),
        ));
    }
    doc.scenario()?;
    doc.checks()?;
    if let Some(t) = doc.options.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(DocError::schema("options.tolerance", format!("tolerance must be finite and nonnegative, got {t}")));
        }
    }
    if let ModelDoc::Gallery(g) = &doc.model {
        g.check_params()?;
    }
    match doc.backend().unwrap_or(Backend::Float) {
        Backend::Exact => model::build_joint::<ontolab::Rational>(doc).map(drop),
        Backend::Float => model::build_joint::<f64>(doc).map(drop),
    }
}

/// Pretty JSON that [`parse_scenario`] reads back to an equal document.
pub fn emit_scenario(doc: &ScenarioDoc) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documents always serialize");
    out.push('\n');
    out
}

impl GalleryDoc {
    pub fn new(name: GalleryName) -> Self {
        GalleryDoc {
            name,
            params: GalleryParams::default(),
        }
    }

    pub(crate) fn check_params(&self) -> Result<(), DocError> {
        match self.params.present().into_iter().find(|p| !self.name.accepts(p)) {
            Some(p) => Err(DocError::schema(
                format!("model.gallery.params.{p}"),
                format!("parameter `{p}` does not apply to gallery model `{}`", self.name.as_str()),
            )),
            None => Ok(()),
        }
    }
}
