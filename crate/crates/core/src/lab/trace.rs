use crate::dist::{names, Assignment, JointTable};
use crate::error::Result;
use crate::prob::Prob;

/// Sup-norm residual of one step of the derivation, with the assignment that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResidual<P> {
    pub value: P,
    pub witness: Option<Assignment>,
}

impl<P: Prob> StepResidual<P> {
    fn zero() -> Self {
        StepResidual {
            value: P::zero(),
            witness: None,
        }
    }

    fn offer(&mut self, value: P, at: impl FnOnce() -> Assignment) {
        if value > self.value {
            self.value = value;
            self.witness = Some(at());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStep {
    ChainRule,
    Static,
    NoSignallingFreeChoice,
}

impl TraceStep {
    /// Same names as [`DerivationTrace::steps`].
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceStep::ChainRule => "chain_rule",
            TraceStep::Static => "st_step",
            TraceStep::NoSignallingFreeChoice => "ns_frprime_step",
        }
    }
}

/// Residuals of the derivation of `P(A | B,Y,C,Z) = P(A)`:
///
/// * chain rule: `P(a,b,y | c,z) = P(a | b,y,c,z) · P(b,y | c,z)`
/// * static step: `P(a | b,y,c,z) = P(a | b,y)`, i.e. `P(a,b,y | c,z) = P(a | b,y,c,z) · P(b,y)` divided by `P(b,y)`
/// * no-signalling/free-choice step: `P(a | b,y) = P(a)`, i.e. `P(a,b,y) = P(a) · P(b,y)` divided by `P(b,y)`
/// * conclusion: `P(a | b,y,c,z) = P(a)`
///
/// The conclusion residual is bounded by the sum of the static and
/// no-signalling residuals at every assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationTrace<P> {
    pub residual_chain_rule: StepResidual<P>,
    pub residual_st_step: StepResidual<P>,
    pub residual_ns_frprime_step: StepResidual<P>,
    pub residual_conclusion: StepResidual<P>,
}

impl<P: Prob> DerivationTrace<P> {
    /// First premise step whose residual exceeds `tolerance`.
    pub fn broken_step(&self, tolerance: f64) -> Option<TraceStep> {
        let over = |r: &StepResidual<P>| r.value.to_f64() > tolerance;
        if over(&self.residual_chain_rule) {
            Some(TraceStep::ChainRule)
        } else if over(&self.residual_st_step) {
            Some(TraceStep::Static)
        } else if over(&self.residual_ns_frprime_step) {
            Some(TraceStep::NoSignallingFreeChoice)
        } else {
            None
        }
    }

    pub fn steps(&self) -> [(&'static str, &StepResidual<P>); 4] {
        [
            ("chain_rule", &self.residual_chain_rule),
            ("st_step", &self.residual_st_step),
            ("ns_frprime_step", &self.residual_ns_frprime_step),
            ("conclusion", &self.residual_conclusion),
        ]
    }
}

pub fn derivation_trace<P: Prob>(joint: &JointTable<P>) -> Result<DerivationTrace<P>> {
    use names::*;
    // Layout (A, B, Y, C, Z).
    let m = joint.marginalize(&[A, B, Y, C, Z])?;
    let scen = m.scenario();
    let m_bycz = m.marginalize_positions(&[1, 2, 3, 4]);
    let m_cz = m.marginalize_positions(&[3, 4]);
    let m_aby = m.marginalize_positions(&[0, 1, 2]);
    let m_by = m.marginalize_positions(&[1, 2]);
    let m_a = m.marginalize_positions(&[0]);
    let proj_bycz = scen.projection(&[1, 2, 3, 4]);
    let proj_cz = scen.projection(&[3, 4]);
    let proj_aby = scen.projection(&[0, 1, 2]);
    let proj_by = scen.projection(&[1, 2]);
    let proj_a = scen.projection(&[0]);

    let mut chain = StepResidual::zero();
    let mut st = StepResidual::zero();
    let mut conclusion = StepResidual::zero();
    for (u, p) in m.probs().iter().enumerate() {
        let p_bycz = &m_bycz.probs()[proj_bycz[u]];
        if p_bycz.is_zero() {
            continue;
        }
        let p_cz = m_cz.probs()[proj_cz[u]].clone();
        let p_by = m_by.probs()[proj_by[u]].clone();
        let p_a = m_a.probs()[proj_a[u]].clone();
        let a_given_bycz = p.clone() / p_bycz.clone();

        let lhs = p.clone() / p_cz.clone();
        let rhs = a_given_bycz.clone() * (p_bycz.clone() / p_cz);
        chain.offer(lhs.abs_diff(&rhs), || scen.assignment_at(u));

        let a_given_by = m_aby.probs()[proj_aby[u]].clone() / p_by;
        st.offer(a_given_bycz.abs_diff(&a_given_by), || scen.assignment_at(u));
        conclusion.offer(a_given_bycz.abs_diff(&p_a), || scen.assignment_at(u));
    }

    let mut ns = StepResidual::zero();
    let aby_scen = m_aby.scenario();
    let proj_by_from_aby = aby_scen.projection(&[1, 2]);
    for (u, p) in m_aby.probs().iter().enumerate() {
        let p_by = &m_by.probs()[proj_by_from_aby[u]];
        if p_by.is_zero() {
            continue;
        }
        let p_a = &m_a.probs()[aby_scen.digits_at(u)[0]];
        let a_given_by = p.clone() / p_by.clone();
        ns.offer(a_given_by.abs_diff(p_a), || aby_scen.assignment_at(u));
    }

    Ok(DerivationTrace {
        residual_chain_rule: chain,
        residual_st_step: st,
        residual_ns_frprime_step: ns,
        residual_conclusion: conclusion,
    })
}
