use rand::RngCore;
use rayon::prelude::*;

use crate::dist::{names, task_rng, Scenario};
use crate::error::Result;
use crate::gallery::{premise_model_random, AlphabetSizes};
use crate::independence::{assumption_deviation, default_tolerance, AssumptionId};
use crate::prob::{Backend, Prob};

/// Distribution summary of per-model FR deviations (nearest-rank quantiles).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quantiles {
    pub min: f64,
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

impl Quantiles {
    fn of(mut values: Vec<f64>) -> Self {
        if values.is_empty() {
            return Quantiles::default();
        }
        values.sort_by(f64::total_cmp);
        let rank = |q: f64| {
            let idx = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
            values[idx]
        };
        Quantiles {
            min: values[0],
            median: rank(0.5),
            p90: rank(0.9),
            p99: rank(0.99),
            max: values[values.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<P> {
    pub n_models: usize,
    pub sizes: AlphabetSizes,
    pub seed: u64,
    pub backend: Backend,
    pub max_fr_deviation: P,
    /// Seed that regenerates the worst model via `premise_model_random`.
    pub argmax_seed: Option<u64>,
    /// Largest FR′/NS/ST deviation seen while certifying premises.
    pub max_premise_deviation: P,
    /// Models whose premises failed certification; their FR is not counted.
    pub premise_failures: usize,
    pub fr_quantiles: Quantiles,
}

/// Seed of the `index`-th model of a sweep.
pub fn sweep_model_seed(seed: u64, index: u64) -> u64 {
    task_rng(seed, index).next_u64()
}

struct ModelOutcome<P> {
    seed: u64,
    premise: P,
    certified: bool,
    fr: Option<P>,
}

/// Draw `n` premise-satisfying models, certify FR′, NS and ST on each, then
/// record its FR deviation.
pub fn verify_implication_sweep<P: Prob>(n: usize, sizes: AlphabetSizes, seed: u64) -> Result<SweepReport<P>> {
    // Surface cap errors before spawning work.
    Scenario::from_dims(&[
        (names::A, sizes.a),
        (names::B, sizes.b),
        (names::C, sizes.c),
        (names::X, sizes.x),
        (names::Y, sizes.y),
        (names::Z, sizes.z),
        (names::LAMBDA, sizes.lambda),
        (names::MU, sizes.mu),
    ])?;
    let tolerance = default_tolerance(P::BACKEND);

    let outcomes: Vec<ModelOutcome<P>> = (0..n as u64)
        .into_par_iter()
        .map(|i| -> Result<ModelOutcome<P>> {
            let model_seed = sweep_model_seed(seed, i);
            let joint = premise_model_random::<P>(model_seed, sizes)?;
            let mut premise = P::zero();
            let mut certified = true;
            for which in [AssumptionId::FrPrime, AssumptionId::Ns, AssumptionId::St] {
                let report = assumption_deviation(&joint, which)?;
                certified &= report.passes(tolerance);
                premise = P::max_of(premise, report.deviation);
            }
            let fr = if certified {
                Some(assumption_deviation(&joint, AssumptionId::Fr)?.deviation)
            } else {
                None
            };
            Ok(ModelOutcome {
                seed: model_seed,
                premise,
                certified,
                fr,
            })
        })
        .collect::<Result<_>>()?;

    // Ordered reduction: first index wins ties.
    let mut max_fr = P::zero();
    let mut argmax_seed = None;
    let mut max_premise = P::zero();
    let mut fr_values = Vec::with_capacity(n);
    for o in &outcomes {
        max_premise = P::max_of(max_premise, o.premise.clone());
        if let Some(fr) = &o.fr {
            fr_values.push(fr.to_f64());
            if argmax_seed.is_none() || *fr > max_fr {
                max_fr = fr.clone();
                argmax_seed = Some(o.seed);
            }
        }
    }
    Ok(SweepReport {
        n_models: n,
        sizes,
        seed,
        backend: P::BACKEND,
        max_fr_deviation: max_fr,
        argmax_seed,
        max_premise_deviation: max_premise,
        premise_failures: outcomes.iter().filter(|o| !o.certified).count(),
        fr_quantiles: Quantiles::of(fr_values),
    })
}
