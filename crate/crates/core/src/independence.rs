//! Sup-norm deviations from conditional-independence statements and from the
//! named assumptions FR, FR′, NS, ST and the FR′ factorization identity.

use std::fmt;
use std::str::FromStr;

use crate::dist::{names, Assignment, JointTable, Scenario};
use crate::error::{Error, Result};
use crate::prob::{Backend, Prob};

/// Default pass threshold on the float backend.
pub const FLOAT_PASS_TOL: f64 = 1e-9;

/// Pass threshold used when none is given: exact zero, or [`FLOAT_PASS_TOL`].
pub fn default_tolerance(backend: Backend) -> f64 {
    match backend {
        Backend::Exact => 0.0,
        Backend::Float => FLOAT_PASS_TOL,
    }
}

/// `target ⊥ independent_of | given`.
///
/// With an empty `given` this is the plain statement `P(target | independent_of) = P(target)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CiQuery {
    pub target: Vec<String>,
    pub independent_of: Vec<String>,
    pub given: Vec<String>,
}

impl CiQuery {
    pub fn new<S: AsRef<str>>(target: &[S], independent_of: &[S]) -> Result<Self> {
        CiQuery::conditional(target, independent_of, &[])
    }

    pub fn conditional<S: AsRef<str>>(target: &[S], independent_of: &[S], given: &[S]) -> Result<Self> {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let query = CiQuery {
            target: own(target),
            independent_of: own(independent_of),
            given: own(given),
        };
        query.validate()?;
        Ok(query)
    }

    fn validate(&self) -> Result<()> {
        if self.target.is_empty() || self.independent_of.is_empty() {
            return Err(Error::InvalidQuery("both sides must be nonempty".into()));
        }
        let all: Vec<&String> = self
            .target
            .iter()
            .chain(&self.independent_of)
            .chain(&self.given)
            .collect();
        for (i, name) in all.iter().enumerate() {
            if all[..i].contains(name) {
                return Err(Error::OverlappingVariables(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.target
            .iter()
            .chain(&self.independent_of)
            .chain(&self.given)
            .map(String::as_str)
    }
}

impl fmt::Display for CiQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {}", self.target.join(","), self.independent_of.join(","))?;
        if !self.given.is_empty() {
            write!(f, " | {}", self.given.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssumptionId {
    Fr,
    FrPrime,
    Ns,
    St,
    Fact,
}

/// One constituent statement of an assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    Ci(CiQuery),
    /// `P(vars) = Π P(var)`.
    Factorization(Vec<String>),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Ci(q) => q.fmt(f),
            Component::Factorization(vars) => {
                write!(f, "P({}) = ", vars.join(","))?;
                let parts: Vec<String> = vars.iter().map(|v| format!("P({v})")).collect();
                f.write_str(&parts.join("*"))
            }
        }
    }
}

impl AssumptionId {
    pub const ALL: [AssumptionId; 5] = [
        AssumptionId::Fr,
        AssumptionId::FrPrime,
        AssumptionId::Ns,
        AssumptionId::St,
        AssumptionId::Fact,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AssumptionId::Fr => "FR",
            AssumptionId::FrPrime => "FRprime",
            AssumptionId::Ns => "NS",
            AssumptionId::St => "ST",
            AssumptionId::Fact => "FACT",
        }
    }

    /// The fixed expansion into constituent statements.
    pub fn components(&self) -> Vec<Component> {
        use names::*;
        let ci = |t: &[&str], s: &[&str], g: &[&str]| {
            Component::Ci(CiQuery::conditional(t, s, g).expect("fixed expansion is well formed"))
        };
        match self {
            AssumptionId::Fr => vec![
                ci(&[A], &[B, C, Y, Z], &[]),
                ci(&[B], &[A, C, X, Z], &[]),
                ci(&[C], &[A, B, X, Y], &[]),
            ],
            AssumptionId::FrPrime => vec![ci(&[A], &[B, LAMBDA], &[]), ci(&[B], &[A, LAMBDA], &[])],
            // P(X|A,B) = P(X|A) is X ⊥ B given A.
            AssumptionId::Ns => vec![ci(&[X], &[B], &[A]), ci(&[Y], &[A], &[B])],
            AssumptionId::St => vec![ci(&[C, Z], &[A, B, X, Y], &[])],
            AssumptionId::Fact => vec![Component::Factorization(vec![
                A.to_string(),
                B.to_string(),
                LAMBDA.to_string(),
            ])],
        }
    }
}

impl fmt::Display for AssumptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssumptionId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "FR" => Ok(AssumptionId::Fr),
            "FRprime" | "FR'" | "FR′" => Ok(AssumptionId::FrPrime),
            "NS" => Ok(AssumptionId::Ns),
            "ST" => Ok(AssumptionId::St),
            "FACT" => Ok(AssumptionId::Fact),
            other => Err(format!("unknown assumption `{other}` (expected FR|FRprime|NS|ST|FACT)")),
        }
    }
}

/// Deviation of a single constituent statement.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport<P> {
    pub label: String,
    pub deviation: P,
    pub witness: Option<Assignment>,
    pub vacuous_events: usize,
    pub conditioning_events: usize,
    /// Largest total-variation distance between a conditional and its reference.
    pub total_variation: P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport<P> {
    pub subject: String,
    /// Max over `per_component`.
    pub deviation: P,
    /// Assignment achieving `deviation`; absent when it is zero.
    pub witness: Option<Assignment>,
    pub vacuous_events: usize,
    pub conditioning_events: usize,
    pub total_variation: P,
    pub per_component: Vec<ComponentReport<P>>,
}

impl<P: Prob> ViolationReport<P> {
    fn merge(subject: String, per_component: Vec<ComponentReport<P>>) -> Self {
        let mut deviation = P::zero();
        let mut witness = None;
        let mut total_variation = P::zero();
        for c in &per_component {
            // Strict comparison keeps the first component on ties.
            if c.deviation > deviation {
                deviation = c.deviation.clone();
                witness = c.witness.clone();
            }
            total_variation = P::max_of(total_variation, c.total_variation.clone());
        }
        ViolationReport {
            subject,
            deviation,
            witness,
            vacuous_events: per_component.iter().map(|c| c.vacuous_events).sum(),
            conditioning_events: per_component.iter().map(|c| c.conditioning_events).sum(),
            total_variation,
            per_component,
        }
    }

    /// More than half of the conditioning events carry no mass.
    pub fn is_degenerate(&self) -> bool {
        self.vacuous_events * 2 > self.conditioning_events
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        match P::BACKEND {
            Backend::Exact => match P::from_f64(tolerance) {
                Some(tol) => self.deviation <= tol,
                None => false,
            },
            Backend::Float => self.deviation.to_f64() <= tolerance,
        }
    }

    /// Index of the component whose deviation is reported at the top level.
    pub fn worst_component(&self) -> Option<&ComponentReport<P>> {
        self.per_component
            .iter()
            .find(|c| c.witness.is_some() && c.deviation == self.deviation)
    }
}

/// Sup-norm deviation of a conditional-independence statement:
/// `max |P(t | s, g) − P(t | g)|` over `(s, g)` with positive mass.
pub fn ci_deviation<P: Prob>(joint: &JointTable<P>, query: &CiQuery) -> Result<ViolationReport<P>> {
    query.validate()?;
    let report = ci_component(joint, query)?;
    Ok(ViolationReport::merge(query.to_string(), vec![report]))
}

pub fn assumption_deviation<P: Prob>(
    joint: &JointTable<P>,
    which: AssumptionId,
) -> Result<ViolationReport<P>> {
    let reports = which
        .components()
        .iter()
        .map(|c| component_deviation(joint, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(ViolationReport::merge(which.to_string(), reports))
}

pub fn component_deviation<P: Prob>(
    joint: &JointTable<P>,
    component: &Component,
) -> Result<ComponentReport<P>> {
    match component {
        Component::Ci(q) => ci_component(joint, q),
        Component::Factorization(vars) => factorization_component(joint, vars),
    }
}

/// Recompute the deviation of a component at a single witness assignment,
/// going through [`JointTable::condition`] rather than the bulk scan.
pub fn deviation_at<P: Prob>(
    joint: &JointTable<P>,
    component: &Component,
    witness: &Assignment,
) -> Result<P> {
    match component {
        Component::Ci(q) => {
            let pick = |names: &[String]| {
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                witness.restrict(&refs)
            };
            let t = pick(&q.target);
            let conditioning: Vec<String> = q.independent_of.iter().chain(&q.given).cloned().collect();
            let sg = pick(&conditioning);
            let g = pick(&q.given);
            let conditional = joint.condition(&q.target, &sg)?.prob(&t)?;
            let reference = joint.condition(&q.target, &g)?.prob(&t)?;
            Ok(conditional.abs_diff(&reference))
        }
        Component::Factorization(vars) => {
            let joint_p = joint.marginalize(vars)?.prob(&witness.restrict(&vars.iter().map(String::as_str).collect::<Vec<_>>()))?;
            let mut product = P::one();
            for v in vars {
                let single = witness.restrict(&[v.as_str()]);
                product = product * joint.marginalize(&[v])?.prob(&single)?;
            }
            Ok(joint_p.abs_diff(&product))
        }
    }
}

fn ci_component<P: Prob>(joint: &JointTable<P>, query: &CiQuery) -> Result<ComponentReport<P>> {
    let scenario = joint.scenario();
    let t_pos = scenario.positions(&query.target)?;
    let s_pos = scenario.positions(&query.independent_of)?;
    let g_pos = scenario.positions(&query.given)?;

    // Work on the marginal over the union, in scenario order, so witnesses are
    // scanned in lexicographic order whatever order the query lists.
    let mut union: Vec<usize> = t_pos.iter().chain(&s_pos).chain(&g_pos).copied().collect();
    union.sort_unstable();
    let m_u = joint.marginalize_positions(&union);
    let local = |global: &[usize]| -> Vec<usize> {
        let mut l: Vec<usize> = global
            .iter()
            .map(|p| union.iter().position(|u| u == p).expect("member of union"))
            .collect();
        l.sort_unstable();
        l
    };
    let t_loc = local(&t_pos);
    let g_loc = local(&g_pos);
    let mut sg_loc = local(&s_pos);
    sg_loc.extend(&g_loc);
    sg_loc.sort_unstable();
    let mut tg_loc = t_loc.clone();
    tg_loc.extend(&g_loc);
    tg_loc.sort_unstable();

    let u_scen = m_u.scenario();
    let m_sg = m_u.marginalize_positions(&sg_loc);
    let m_tg = m_u.marginalize_positions(&tg_loc);
    let m_g = m_u.marginalize_positions(&g_loc);
    let proj_sg = u_scen.projection(&sg_loc);
    let proj_tg = u_scen.projection(&tg_loc);
    let proj_g = u_scen.projection(&g_loc);

    let mut deviation = P::zero();
    let mut witness_index = None;
    let mut tv = vec![P::zero(); m_sg.probs().len()];
    for (u, p_u) in m_u.probs().iter().enumerate() {
        let p_sg = &m_sg.probs()[proj_sg[u]];
        if p_sg.is_zero() {
            continue;
        }
        let conditional = p_u.clone() / p_sg.clone();
        let reference = m_tg.probs()[proj_tg[u]].clone() / m_g.probs()[proj_g[u]].clone();
        let d = conditional.abs_diff(&reference);
        tv[proj_sg[u]] = tv[proj_sg[u]].clone() + d.clone();
        if d > deviation {
            deviation = d;
            witness_index = Some(u);
        }
    }
    let half = P::from_ratio(1, 2);
    let total_variation = tv
        .into_iter()
        .fold(P::zero(), |acc, x| P::max_of(acc, x * half.clone()));
    let vacuous_events = m_sg.probs().iter().filter(|p| p.is_zero()).count();
    Ok(ComponentReport {
        label: query.to_string(),
        deviation,
        witness: witness_index.map(|u| u_scen.assignment_at(u)),
        vacuous_events,
        conditioning_events: m_sg.probs().len(),
        total_variation,
    })
}

fn factorization_component<P: Prob>(joint: &JointTable<P>, vars: &[String]) -> Result<ComponentReport<P>> {
    let scenario = joint.scenario();
    let mut positions = scenario.positions(vars)?;
    positions.sort_unstable();
    let m = joint.marginalize_positions(&positions);
    let singles: Vec<JointTable<P>> = (0..positions.len())
        .map(|i| m.marginalize_positions(&[i]))
        .collect();
    let sub: &Scenario = m.scenario();
    let mut deviation = P::zero();
    let mut witness_index = None;
    let mut l1 = P::zero();
    for (u, p_u) in m.probs().iter().enumerate() {
        let digits = sub.digits_at(u);
        let product = singles
            .iter()
            .zip(&digits)
            .fold(P::one(), |acc, (single, &d)| acc * single.probs()[d].clone());
        let d = p_u.abs_diff(&product);
        l1 = l1 + d.clone();
        if d > deviation {
            deviation = d;
            witness_index = Some(u);
        }
    }
    let label = Component::Factorization(vars.to_vec()).to_string();
    Ok(ComponentReport {
        label,
        deviation,
        witness: witness_index.map(|u| sub.assignment_at(u)),
        vacuous_events: 0,
        conditioning_events: 0,
        total_variation: l1 * P::from_ratio(1, 2),
    })
}
