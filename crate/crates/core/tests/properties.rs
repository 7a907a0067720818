mod common;

use common::Oracle;
use ontolab::{
    assumption_deviation, ci_deviation, compose_product, random_kernel, Assignment, AssumptionId,
    CiQuery, JointTable, Prob, Rational, Scenario,
};
use num::Zero;
use ontolab::independence::{deviation_at, Component};
use ontolab::gallery::{premise_model_random, AlphabetSizes};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

/// Exact joint with up to 4 variables of alphabet up to 3; weights in 0..5.
fn joint() -> impl Strategy<Value = JointTable<Rational>> {
    prop::collection::vec(1usize..=3, 2..=4).prop_flat_map(|sizes| {
        let len: usize = sizes.iter().product();
        prop::collection::vec(0i64..5, len).prop_filter_map("all-zero weights", move |w| {
            let total: i64 = w.iter().sum();
            if total == 0 {
                return None;
            }
            let probs: Vec<Rational> = w.iter().map(|&x| Rational::from_ratio(x, total)).collect();
            Some(Oracle::new(&NAMES[..sizes.len()], &sizes, &probs).table())
        })
    })
}

fn names_of(j: &JointTable<Rational>) -> Vec<String> {
    j.scenario().names().map(str::to_string).collect()
}

fn first_pair_query(j: &JointTable<Rational>) -> CiQuery {
    let n = names_of(j);
    let given: Vec<String> = n[2..].to_vec();
    CiQuery::conditional(&n[..1], &n[1..2], &given).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn marginals_are_consistent(j in joint()) {
        let n = names_of(&j);
        let partial = j.marginalize(&n[1..]).unwrap();
        let direct = j.marginalize(&n[2..]).unwrap();
        let nested = partial.marginalize(&n[2..]).unwrap();
        prop_assert_eq!(direct.probs(), nested.probs());
        prop_assert_eq!(partial.total(), Rational::from_ratio(1, 1));
    }

    #[test]
    fn chain_rule_holds_pointwise(j in joint()) {
        let n = names_of(&j);
        let g_name = n[n.len() - 1].clone();
        let t_names = &n[..n.len() - 1];
        let p_g = j.marginalize(&[&g_name]).unwrap();
        for (g, pg) in p_g.iter() {
            if pg.is_zero() {
                continue;
            }
            let cond = j.condition(t_names, &g).unwrap();
            for (t, pt) in cond.iter() {
                let mut full = t.clone();
                full.0.extend(g.0.iter().cloned());
                prop_assert_eq!(j.prob(&full).unwrap(), pt.clone() * pg.clone());
            }
        }
    }

    #[test]
    fn symbol_relabeling_leaves_deviation(j in joint(), shift in 1usize..3) {
        let q = first_pair_query(&j);
        let before = ci_deviation(&j, &q).unwrap();
        // Cyclically relabel the symbols of the first variable.
        let sc = j.scenario().clone();
        let k = sc.alphabet_sizes()[0];
        let entries: Vec<(Assignment, Rational)> = j
            .iter()
            .map(|(mut a, p)| {
                a.0[0].1 = (a.0[0].1 + shift) % k;
                (a, p.clone())
            })
            .collect();
        let relabeled = JointTable::build(sc, entries).unwrap();
        let after = ci_deviation(&relabeled, &q).unwrap();
        prop_assert_eq!(before.deviation, after.deviation);
        prop_assert_eq!(before.vacuous_events, after.vacuous_events);
    }

    #[test]
    fn variable_order_is_irrelevant(j in joint()) {
        let q = first_pair_query(&j);
        let mut order = names_of(&j);
        order.reverse();
        let reordered = j.reorder(&order).unwrap();
        let a = ci_deviation(&j, &q).unwrap();
        let b = ci_deviation(&reordered, &q).unwrap();
        prop_assert_eq!(&a.deviation, &b.deviation);
        prop_assert_eq!(a.vacuous_events, b.vacuous_events);
        // Ties may resolve differently, but each witness attains the maximum.
        let component = Component::Ci(q.clone());
        if let Some(w) = &b.witness {
            prop_assert_eq!(deviation_at(&j, &component, w).unwrap(), a.deviation.clone());
        }
        if let Some(w) = &a.witness {
            prop_assert_eq!(deviation_at(&reordered, &component, w).unwrap(), b.deviation);
        }
    }

    #[test]
    fn independence_vanishes_symmetrically(j in joint()) {
        let n = names_of(&j);
        let ab = ci_deviation(&j, &CiQuery::new(&n[..1], &n[1..2]).unwrap()).unwrap();
        let ba = ci_deviation(&j, &CiQuery::new(&n[1..2], &n[..1]).unwrap()).unwrap();
        prop_assert_eq!(ab.deviation.is_zero(), ba.deviation.is_zero());
    }

    #[test]
    fn float_tracks_exact(j in joint()) {
        let q = first_pair_query(&j);
        let exact = ci_deviation(&j, &q).unwrap();
        let float = ci_deviation(&j.to_float(), &q).unwrap();
        prop_assert!((exact.deviation.to_f64() - float.deviation).abs() <= 1e-12);
    }

    #[test]
    fn compose_then_condition_recovers_kernels(seed in any::<u64>(), ka in 1usize..4, kb in 1usize..4) {
        let fa = random_kernel::<Rational>(&[("A", ka)], &[], seed).unwrap();
        let fb = random_kernel::<Rational>(&[("B", kb)], &[("A", ka)], seed ^ 1).unwrap();
        let joint = compose_product(&Scenario::from_dims(&[("A", ka), ("B", kb)]).unwrap(), &[fa.clone(), fb.clone()]).unwrap();
        let p_a = joint.marginalize(&["A"]).unwrap();
        prop_assert_eq!(p_a.probs(), &fa.rows()[0][..]);
        for a in 0..ka {
            if fa.rows()[0][a].is_zero() {
                continue;
            }
            let cond = joint.condition(&["B"], &Assignment::new().with("A", a)).unwrap();
            prop_assert_eq!(cond.probs(), &fb.rows()[a][..]);
        }
    }

    #[test]
    fn premise_models_factorize(seed in any::<u64>()) {
        let j = premise_model_random::<Rational>(seed, AlphabetSizes::binary()).unwrap();
        prop_assert!(assumption_deviation(&j, AssumptionId::FrPrime).unwrap().deviation.is_zero());
        prop_assert!(assumption_deviation(&j, AssumptionId::Fact).unwrap().deviation.is_zero());
    }
}
