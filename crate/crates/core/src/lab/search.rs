//! Penalized derivative-free search over factorized binary models.
//!
//! Models are parameterized by simplex blocks (setting distributions, response
//! kernels, adaptive `C`, and a mixture choosing where `Z` reads from). FR′
//! and, outside `fr_implies_ns`, NS hold by construction, so the penalty only
//! has to fight the remaining premises. The optimizer is a seeded multi-start
//! coordinate pattern search on the simplex coordinates.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{compose_product, names, ConditionalKernel, JointTable, Scenario};
use crate::error::{Error, Result};
use crate::independence::{assumption_deviation, AssumptionId};
use crate::prob::Prob;

pub const DEFAULT_PENALTY_WEIGHT: f64 = 1e3;
/// Factor applied to the penalty weight once half the budget is spent.
pub const PENALTY_ESCALATION: f64 = 10.0;
/// Minimum probability of every setting symbol, ontic symbol and noise-readout
/// symbol. Keeps conditioning events away from zero mass, where sup-norm
/// conditional deviations are discontinuous.
pub const DEFAULT_MASS_FLOOR: f64 = 0.05;

const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    /// Maximize FR deviation subject to FR′ and NS.
    NoSt,
    /// Maximize FR deviation subject to FR′, NS and ST.
    FullPremises,
    /// Maximize NS deviation subject to FR.
    FrImpliesNs,
}

impl SearchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMode::NoSt => "no_st",
            SearchMode::FullPremises => "full_premises",
            SearchMode::FrImpliesNs => "fr_implies_ns",
        }
    }

    pub fn target(&self) -> AssumptionId {
        match self {
            SearchMode::NoSt | SearchMode::FullPremises => AssumptionId::Fr,
            SearchMode::FrImpliesNs => AssumptionId::Ns,
        }
    }

    pub fn premises(&self) -> &'static [AssumptionId] {
        match self {
            SearchMode::NoSt => &[AssumptionId::FrPrime, AssumptionId::Ns],
            SearchMode::FullPremises => &[AssumptionId::FrPrime, AssumptionId::Ns, AssumptionId::St],
            SearchMode::FrImpliesNs => &[AssumptionId::Fr],
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "no_st" => Ok(SearchMode::NoSt),
            "full_premises" => Ok(SearchMode::FullPremises),
            "fr_implies_ns" => Ok(SearchMode::FrImpliesNs),
            other => Err(format!(
                "unknown mode `{other}` (expected no_st|full_premises|fr_implies_ns)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Number of model evaluations.
    pub budget: u64,
    pub penalty_weight: f64,
    pub seed: u64,
    pub mass_floor: f64,
}

impl SearchConfig {
    pub fn new(mode: SearchMode, budget: u64, seed: u64) -> Self {
        SearchConfig {
            mode,
            budget,
            penalty_weight: DEFAULT_PENALTY_WEIGHT,
            seed,
            mass_floor: DEFAULT_MASS_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeviationProfile {
    pub fr: f64,
    pub fr_prime: f64,
    pub ns: f64,
    pub st: f64,
    pub fact: f64,
}

impl DeviationProfile {
    pub fn of(joint: &JointTable<f64>) -> Result<Self> {
        let dev = |id| assumption_deviation(joint, id).map(|r| r.deviation);
        Ok(DeviationProfile {
            fr: dev(AssumptionId::Fr)?,
            fr_prime: dev(AssumptionId::FrPrime)?,
            ns: dev(AssumptionId::Ns)?,
            st: dev(AssumptionId::St)?,
            fact: dev(AssumptionId::Fact)?,
        })
    }

    pub fn get(&self, id: AssumptionId) -> f64 {
        match id {
            AssumptionId::Fr => self.fr,
            AssumptionId::FrPrime => self.fr_prime,
            AssumptionId::Ns => self.ns,
            AssumptionId::St => self.st,
            AssumptionId::Fact => self.fact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub mode: SearchMode,
    pub best_model: JointTable<f64>,
    /// Target deviation minus the final penalty weight times the premise deviations.
    pub objective_value: f64,
    pub deviation_profile: DeviationProfile,
    pub evaluations_used: u64,
    pub restarts: u64,
    pub final_penalty_weight: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    target: f64,
    premises: f64,
}

impl Eval {
    fn objective(&self, weight: f64) -> f64 {
        self.target - weight * self.premises
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    /// Setting, `lambda` or readout-noise distribution; floored.
    Floored(usize),
    Free(usize),
}

impl Block {
    fn len(&self) -> usize {
        match *self {
            Block::Floored(n) | Block::Free(n) => n,
        }
    }
}

/// Simplex-block layout and model builder for one search mode.
struct Parameterization {
    mode: SearchMode,
    blocks: Vec<Block>,
    floor: f64,
    scenario: Scenario,
}

impl Parameterization {
    fn new(mode: SearchMode, floor: f64) -> Self {
        use Block::*;
        // lambda, A, B, then C (prior or adaptive rows), X rows, Y rows,
        // Z noise rows, Z source mixture.
        let mut blocks = vec![Floored(2), Floored(2), Floored(2)];
        let (c_rows, outcome_rows) = match mode {
            SearchMode::NoSt | SearchMode::FullPremises => (2, 4),
            SearchMode::FrImpliesNs => (1, 8),
        };
        blocks.extend(std::iter::repeat(Floored(2)).take(c_rows));
        blocks.extend(std::iter::repeat(Free(2)).take(2 * outcome_rows));
        blocks.extend([Floored(2), Floored(2), Free(3)]);
        Parameterization {
            mode,
            blocks,
            floor,
            scenario: Scenario::canonical(),
        }
    }

    fn probabilities(&self, block: Block, y: &[f64]) -> Vec<f64> {
        match block {
            Block::Floored(n) => {
                let scale = 1.0 - n as f64 * self.floor;
                y.iter().map(|v| self.floor + scale * v).collect()
            }
            Block::Free(_) => y.to_vec(),
        }
    }

    fn build(&self, params: &[Vec<f64>]) -> Result<JointTable<f64>> {
        use names::*;
        let probs: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .zip(params)
            .map(|(&b, y)| self.probabilities(b, y))
            .collect();
        let mut next = probs.into_iter();
        let mut take = |n: usize| -> Vec<Vec<f64>> { (&mut next).take(n).collect() };
        let dims = |d: &[(&str, usize)]| Scenario::from_dims(d);

        let lambda = take(1).remove(0);
        let a = take(1).remove(0);
        let b = take(1).remove(0);
        let mut factors = vec![
            ConditionalKernel::prior(LAMBDA, lambda)?,
            ConditionalKernel::prior(A, a)?,
            ConditionalKernel::prior(B, b)?,
        ];
        match self.mode {
            SearchMode::NoSt | SearchMode::FullPremises => {
                factors.push(ConditionalKernel::new(dims(&[(C, 2)])?, dims(&[(A, 2)])?, take(2))?);
                factors.push(ConditionalKernel::new(
                    dims(&[(X, 2)])?,
                    dims(&[(A, 2), (LAMBDA, 2)])?,
                    take(4),
                )?);
                factors.push(ConditionalKernel::new(
                    dims(&[(Y, 2)])?,
                    dims(&[(B, 2), (LAMBDA, 2)])?,
                    take(4),
                )?);
            }
            SearchMode::FrImpliesNs => {
                factors.push(ConditionalKernel::prior(C, take(1).remove(0))?);
                factors.push(ConditionalKernel::new(
                    dims(&[(X, 2)])?,
                    dims(&[(A, 2), (B, 2), (LAMBDA, 2)])?,
                    take(8),
                )?);
                factors.push(ConditionalKernel::new(
                    dims(&[(Y, 2)])?,
                    dims(&[(A, 2), (B, 2), (LAMBDA, 2)])?,
                    take(8),
                )?);
            }
        }
        // Z = noise(C) with weight w0, X with weight w1, lambda with weight w2.
        let noise = take(2);
        let w = take(1).remove(0);
        let mut z_rows = Vec::with_capacity(8);
        for c in 0..2 {
            for x in 0..2 {
                for l in 0..2 {
                    let row: Vec<f64> = (0..2)
                        .map(|z| {
                            w[0] * noise[c][z]
                                + if z == x { w[1] } else { 0.0 }
                                + if z == l { w[2] } else { 0.0 }
                        })
                        .collect();
                    z_rows.push(row);
                }
            }
        }
        factors.push(ConditionalKernel::new(
            dims(&[(Z, 2)])?,
            dims(&[(C, 2), (X, 2), (LAMBDA, 2)])?,
            z_rows,
        )?);
        compose_product(&self.scenario, &factors)
    }

    fn evaluate(&self, joint: &JointTable<f64>) -> Result<Eval> {
        let target = assumption_deviation(joint, self.mode.target())?.deviation;
        let mut premises = 0.0;
        for &p in self.mode.premises() {
            premises += assumption_deviation(joint, p)?.deviation;
        }
        Ok(Eval { target, premises })
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|b| f64::sample_simplex(rng, b.len()))
            .collect()
    }
}

struct Budgeted<'a> {
    param: &'a Parameterization,
    budget: u64,
    used: u64,
    weight: f64,
    escalated: bool,
}

impl Budgeted<'_> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn eval(&mut self, params: &[Vec<f64>]) -> Result<Eval> {
        let joint = self.param.build(params)?;
        let e = self.param.evaluate(&joint)?;
        self.used += 1;
        if !self.escalated && self.used * 2 >= self.budget {
            self.weight *= PENALTY_ESCALATION;
            self.escalated = true;
        }
        Ok(e)
    }
}

/// Seeded penalized search; identical configs give identical results.
pub fn penalized_search(config: &SearchConfig) -> Result<SearchResult> {
    if config.budget == 0 {
        return Err(Error::InvalidBudget);
    }
    if !(config.penalty_weight > 0.0) || !config.penalty_weight.is_finite() {
        return Err(Error::InvalidPenalty(config.penalty_weight));
    }
    if !(0.0..0.5).contains(&config.mass_floor) {
        return Err(Error::InvalidProbability(format!("mass floor {}", config.mass_floor)));
    }
    let param = Parameterization::new(config.mode, config.mass_floor);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut run = Budgeted {
        param: &param,
        budget: config.budget,
        used: 0,
        weight: config.penalty_weight,
        escalated: false,
    };

    let mut best: Option<(Vec<Vec<f64>>, Eval)> = None;
    let mut restarts = 0u64;
    while !run.exhausted() {
        restarts += 1;
        let mut current = param.random_point(&mut rng);
        let mut current_eval = run.eval(&current)?;
        consider(&mut best, &current, current_eval, run.weight);

        let mut step = INITIAL_STEP;
        'descent: while step >= MIN_STEP {
            let mut improved = false;
            for block in 0..param.blocks.len() {
                let n = param.blocks[block].len();
                for coord in 0..n {
                    for dir in [1.0, -1.0] {
                        if run.exhausted() {
                            break 'descent;
                        }
                        let Some(candidate) = moved(&current, block, coord, dir * step) else {
                            continue;
                        };
                        let e = run.eval(&candidate)?;
                        if e.objective(run.weight) > current_eval.objective(run.weight) {
                            current = candidate;
                            current_eval = e;
                            improved = true;
                            consider(&mut best, &current, current_eval, run.weight);
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }

    let (params, eval) = best.expect("budget >= 1 evaluates at least one model");
    let best_model = param.build(&params)?;
    Ok(SearchResult {
        mode: config.mode,
        deviation_profile: DeviationProfile::of(&best_model)?,
        best_model,
        objective_value: eval.objective(run.weight),
        evaluations_used: run.used,
        restarts,
        final_penalty_weight: run.weight,
        seed: config.seed,
    })
}

fn consider(best: &mut Option<(Vec<Vec<f64>>, Eval)>, params: &[Vec<f64>], e: Eval, weight: f64) {
    let better = match best {
        None => true,
        Some((_, b)) => e.objective(weight) > b.objective(weight),
    };
    if better {
        *best = Some((params.to_vec(), e));
    }
}

/// Shift one simplex coordinate by `delta`, clamp at zero, and renormalize the block.
fn moved(params: &[Vec<f64>], block: usize, coord: usize, delta: f64) -> Option<Vec<Vec<f64>>> {
    let old = params[block][coord];
    let new = (old + delta).max(0.0);
    if new == old {
        return None;
    }
    let mut out = params.to_vec();
    let row = &mut out[block];
    row[coord] = new;
    let total: f64 = row.iter().sum();
    if total <= 0.0 {
        return None;
    }
    row.iter_mut().for_each(|v| *v /= total);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let mut c = SearchConfig::new(SearchMode::NoSt, 0, 1);
        assert!(matches!(penalized_search(&c), Err(Error::InvalidBudget)));
        c.budget = 10;
        c.penalty_weight = 0.0;
        assert!(matches!(penalized_search(&c), Err(Error::InvalidPenalty(_))));
    }

    #[test]
    fn budget_is_respected() {
        for budget in [1, 7, 150] {
            let r = penalized_search(&SearchConfig::new(SearchMode::FullPremises, budget, 3)).unwrap();
            assert_eq!(r.evaluations_used, budget);
            assert_eq!(r.final_penalty_weight, DEFAULT_PENALTY_WEIGHT * PENALTY_ESCALATION);
        }
    }

    #[test]
    fn no_st_structure_holds_premises() {
        let param = Parameterization::new(SearchMode::NoSt, DEFAULT_MASS_FLOOR);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let joint = param.build(&param.random_point(&mut rng)).unwrap();
            let e = param.evaluate(&joint).unwrap();
            assert!(e.premises < 1e-12, "premises {}", e.premises);
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [SearchMode::NoSt, SearchMode::FullPremises, SearchMode::FrImpliesNs] {
            assert_eq!(m.as_str().parse::<SearchMode>().unwrap(), m);
        }
    }
}
