//! Turning a validated document into a joint table.

use std::collections::BTreeSet;

use ontolab::gallery::{
    adaptive_c_model, chsh_settings, local_deterministic_model, outcome_revealing_model,
    pr_box_kernel, premise_model_random, two_qubit_kernel, with_uniform_settings, AlphabetSizes,
    OntModelSpec, TwoQubitState,
};
use ontolab::{compose_product, Assignment, Backend, ConditionalKernel, JointTable, Prob, Scenario};

use crate::doc::{DocError, GalleryDoc, GalleryName, ModelDoc, ResponseName, ScenarioDoc};

fn literal<P: Prob>(path: &str, text: &str) -> Result<P, DocError> {
    P::parse_literal(text).ok_or_else(|| {
        let hint = match P::BACKEND {
            Backend::Exact => "the exact backend needs a \"p/q\" or integer literal",
            Backend::Float => "expected a decimal or \"p/q\" literal",
        };
        DocError::schema(path, format!("bad probability `{text}`: {hint}"))
    })
}

/// Build the document's model over its declared variables, in declared order.
pub fn build_joint<P: Prob>(doc: &ScenarioDoc) -> Result<JointTable<P>, DocError> {
    let scenario = doc.scenario()?;
    match &doc.model {
        ModelDoc::Table(entries) => {
            let mut parsed = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let path = format!("model.table[{i}]");
                if let Some(name) = e.assignment.keys().find(|n| !doc.declares(n)) {
                    return Err(DocError::reference(format!("{path}.assignment"), name.clone()));
                }
                let assignment = Assignment::from_pairs(e.assignment.iter().map(|(k, v)| (k.clone(), *v)));
                scenario
                    .index_of(&assignment)
                    .map_err(|err| DocError::wrap(format!("{path}.assignment"), err))?;
                parsed.push((assignment, literal::<P>(&format!("{path}.p"), &e.p)?));
            }
            JointTable::build(scenario, parsed).map_err(|e| DocError::wrap("model.table", e))
        }
        ModelDoc::Factorization(factors) => {
            let mut kernels = Vec::with_capacity(factors.len());
            for (i, f) in factors.iter().enumerate() {
                let path = format!("model.factorization[{i}]");
                for (field, list) in [("targets", &f.targets), ("givens", &f.givens)] {
                    if let Some(name) = list.iter().find(|n| !doc.declares(n)) {
                        return Err(DocError::reference(format!("{path}.{field}"), name.clone()));
                    }
                }
                let targets = scenario.restrict(&f.targets).map_err(|e| DocError::wrap(&path, e))?;
                let givens = scenario.restrict(&f.givens).map_err(|e| DocError::wrap(&path, e))?;
                let mut rows = Vec::with_capacity(f.rows.len());
                for (r, row) in f.rows.iter().enumerate() {
                    let row = row
                        .iter()
                        .enumerate()
                        .map(|(c, t)| literal::<P>(&format!("{path}.rows[{r}][{c}]"), t))
                        .collect::<Result<Vec<P>, _>>()?;
                    rows.push(row);
                }
                kernels.push(ConditionalKernel::new(targets, givens, rows).map_err(|e| DocError::wrap(&path, e))?);
            }
            compose_product(&scenario, &kernels).map_err(|e| DocError::wrap("model.factorization", e))
        }
        ModelDoc::Gallery(g) => {
            let joint = build_gallery::<P>(g)?;
            let dims = |s: &Scenario| -> BTreeSet<(String, usize)> {
                s.variables().iter().map(|v| (v.name.clone(), v.alphabet_size)).collect()
            };
            if dims(joint.scenario()) != dims(&scenario) {
                let list = |s: &Scenario| {
                    s.variables()
                        .iter()
                        .map(|v| format!("{}:{}", v.name, v.alphabet_size))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                return Err(DocError::schema(
                    "variables",
                    format!(
                        "gallery model `{}` has variables {}; the document declares {}",
                        g.name.as_str(),
                        list(joint.scenario()),
                        list(&scenario)
                    ),
                ));
            }
            let order: Vec<&str> = scenario.names().collect();
            joint.reorder(&order).map_err(|e| DocError::wrap("variables", e))
        }
    }
}

/// Build a gallery model over its own variables.
pub fn build_gallery<P: Prob>(g: &GalleryDoc) -> Result<JointTable<P>, DocError> {
    g.check_params()?;
    let path = "model.gallery";
    let wrap = |e| DocError::wrap(path, e);
    let params = &g.params;
    match g.name {
        GalleryName::PrBox => with_uniform_settings(&pr_box_kernel::<P>()).map_err(wrap),
        GalleryName::Singlet => {
            if P::BACKEND == Backend::Exact {
                return Err(DocError::schema(path, "gallery model `singlet` needs the float backend"));
            }
            let (a, b) = chsh_settings();
            let kernel = two_qubit_kernel(&TwoQubitState::singlet(), &a, &b).map_err(wrap)?;
            let joint = with_uniform_settings(&kernel).map_err(wrap)?;
            let probs = joint
                .probs()
                .iter()
                .map(|p| P::from_f64(*p).expect("float backend takes any f64"))
                .collect();
            JointTable::from_dense(joint.scenario().clone(), probs).map_err(wrap)
        }
        GalleryName::AdaptiveC => {
            let p = match &params.p_copy {
                Some(t) => literal::<P>("model.gallery.params.p_copy", t)?,
                None => P::one(),
            };
            adaptive_c_model(p).map_err(|e| DocError::wrap("model.gallery.params.p_copy", e))
        }
        GalleryName::OutcomeRevealing => {
            let f = params.response.unwrap_or(ResponseName::And).response();
            outcome_revealing_model(&f).map_err(wrap)
        }
        GalleryName::PremiseRandom => {
            let k = params.alphabet_size.unwrap_or(2);
            premise_model_random(params.seed.unwrap_or(0), AlphabetSizes::uniform(k))
                .map_err(|e| DocError::wrap("model.gallery.params.alphabet_size", e))
        }
        GalleryName::LocalDeterministic => {
            let pick = |r: Option<ResponseName>| r.unwrap_or(ResponseName::Lambda).response();
            let spec = OntModelSpec::<P>::binary(
                pick(params.x_response),
                pick(params.y_response),
                pick(params.z_response),
            );
            local_deterministic_model(&spec).map_err(wrap)
        }
    }
}
