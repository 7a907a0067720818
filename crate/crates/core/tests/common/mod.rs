//! Brute-force reference implementations. They work on explicit lists of
//! `(assignment, probability)` points and never touch the table layout.

#![allow(dead_code)]

use ontolab::{Assignment, JointTable, Prob, Rational, Scenario};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// Every assignment of `sizes`, first coordinate slowest.
pub fn enumerate(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in sizes {
        let mut next = Vec::with_capacity(out.len() * k);
        for prefix in &out {
            for s in 0..k {
                let mut v = prefix.clone();
                v.push(s);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone)]
pub struct Oracle<P> {
    pub names: Vec<String>,
    pub sizes: Vec<usize>,
    pub points: Vec<(Vec<usize>, P)>,
}

impl<P: Prob> Oracle<P> {
    pub fn new(names: &[&str], sizes: &[usize], weights: &[P]) -> Self {
        let points: Vec<(Vec<usize>, P)> = enumerate(sizes).into_iter().zip(weights.iter().cloned()).collect();
        assert_eq!(points.len(), weights.len());
        Oracle {
            names: names.iter().map(|s| s.to_string()).collect(),
            sizes: sizes.to_vec(),
            points,
        }
    }

    pub fn pos(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).expect("known variable")
    }

    pub fn size_of(&self, name: &str) -> usize {
        self.sizes[self.pos(name)]
    }

    /// Total probability of the points agreeing with `fixed`.
    pub fn mass(&self, fixed: &[(&str, usize)]) -> P {
        let fixed: Vec<(usize, usize)> = fixed.iter().map(|(n, s)| (self.pos(n), *s)).collect();
        self.points
            .iter()
            .filter(|(a, _)| fixed.iter().all(|&(i, s)| a[i] == s))
            .fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn table(&self) -> JointTable<P> {
        let dims: Vec<(&str, usize)> = self.names.iter().map(String::as_str).zip(self.sizes.iter().copied()).collect();
        let scenario = Scenario::from_dims(&dims).unwrap();
        let entries = self.points.iter().map(|(a, p)| {
            (
                Assignment::from_pairs(self.names.iter().cloned().zip(a.iter().copied())),
                p.clone(),
            )
        });
        JointTable::build(scenario, entries).unwrap()
    }

    /// Assignments of `vars` (in the given order), as name/symbol pairs.
    pub fn assignments_of<'a>(&self, vars: &[&'a str]) -> Vec<Vec<(&'a str, usize)>> {
        let sizes: Vec<usize> = vars.iter().map(|v| self.size_of(v)).collect();
        enumerate(&sizes)
            .into_iter()
            .map(|a| vars.iter().copied().zip(a).collect())
            .collect()
    }

    /// `(deviation, witness, vacuous events)` of `target ⊥ indep | given`,
    /// scanning the union of the variables in declaration order and keeping
    /// the first strict maximum.
    pub fn ci(&self, target: &[&str], indep: &[&str], given: &[&str]) -> (P, Option<Vec<(String, usize)>>, usize) {
        let mut union: Vec<&str> = target.iter().chain(indep).chain(given).copied().collect();
        union.sort_by_key(|n| self.pos(n));
        let mut best = P::zero();
        let mut witness = None;
        for a in self.assignments_of(&union) {
            let sg: Vec<&str> = indep.iter().chain(given).copied().collect();
            let tg: Vec<&str> = target.iter().chain(given).copied().collect();
            let p_sg = self.mass(&pick(&a, &sg));
            if p_sg.is_zero() {
                continue;
            }
            let lhs = self.mass(&a) / p_sg;
            let rhs = self.mass(&pick(&a, &tg)) / self.mass(&pick(&a, given));
            let d = lhs.abs_diff(&rhs);
            if d > best {
                best = d;
                witness = Some(a.iter().map(|(n, s)| (n.to_string(), *s)).collect());
            }
        }
        let mut sg_vars: Vec<&str> = indep.iter().chain(given).copied().collect();
        sg_vars.sort_by_key(|n| self.pos(n));
        let vacuous = self
            .assignments_of(&sg_vars)
            .iter()
            .filter(|a| self.mass(a).is_zero())
            .count();
        (best, witness, vacuous)
    }
}

fn pick<'a>(a: &[(&'a str, usize)], vars: &[&str]) -> Vec<(&'a str, usize)> {
    a.iter().filter(|(n, _)| vars.contains(n)).copied().collect()
}

/// Random shape with at most `max_vars` variables of alphabet at most `max_size`.
pub fn random_shape(rng: &mut StdRng, max_vars: usize, max_size: usize) -> (Vec<&'static str>, Vec<usize>) {
    const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
    let n = rng.gen_range(1..=max_vars);
    let sizes = (0..n).map(|_| rng.gen_range(1..=max_size)).collect();
    (NAMES[..n].to_vec(), sizes)
}

/// Integer weights in `0..=4` with roughly a third zeros, normalized.
/// Returns exact and float versions of the same distribution.
pub fn random_weights(rng: &mut StdRng, len: usize) -> (Vec<Rational>, Vec<f64>) {
    let mut w: Vec<i64> = (0..len)
        .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=4) })
        .collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.gen_range(0..len)] = 1;
    }
    let total: i64 = w.iter().sum();
    let exact = w.iter().map(|&x| Rational::from_ratio(x, total)).collect();
    let float = w.iter().map(|&x| x as f64 / total as f64).collect();
    (exact, float)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random nonempty subset of `names` in random order.
pub fn random_subset<'a>(rng: &mut StdRng, names: &[&'a str]) -> Vec<&'a str> {
    let mut out: Vec<&str> = names.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if out.is_empty() {
        out.push(names[rng.gen_range(0..names.len())]);
    }
    out.shuffle(rng);
    out
}

fn compare<P: Prob>(label: &str, got: &P, want: &P, tol: f64) -> Result<(), String> {
    let ok = match P::BACKEND {
        ontolab::Backend::Exact => got == want,
        ontolab::Backend::Float => got.abs_diff(want).to_f64() <= tol,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{label}: engine {got}, oracle {want}"))
    }
}

/// Marginals, conditionals and CI deviations of one joint against the oracle.
/// Witnesses are compared on the exact backend only, where ties are real ties.
pub fn check_joint<P: Prob>(oracle: &Oracle<P>, rng: &mut StdRng, tol: f64) -> Result<(), String> {
    let table = oracle.table();
    let names: Vec<&str> = oracle.names.iter().map(String::as_str).collect();

    let keep = random_subset(rng, &names);
    let marginal = table.marginalize(&keep).map_err(|e| e.to_string())?;
    for a in oracle.assignments_of(&keep) {
        let got = marginal.prob(&Assignment::from_pairs(a.iter().copied())).map_err(|e| e.to_string())?;
        compare(&format!("marginal {a:?}"), &got, &oracle.mass(&a), tol)?;
    }

    let targets = random_subset(rng, &names);
    let rest: Vec<&str> = names.iter().copied().filter(|n| !targets.contains(n)).collect();
    let given_vars: Vec<&str> = rest.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let given: Vec<(&str, usize)> = given_vars.iter().map(|&v| (v, rng.gen_range(0..oracle.size_of(v)))).collect();
    let p_given = oracle.mass(&given);
    match table.condition(&targets, &Assignment::from_pairs(given.iter().copied())) {
        Err(ontolab::Error::ZeroProbabilityEvent(_)) if p_given.is_zero() => {}
        Err(e) => return Err(format!("condition on {given:?}: {e}")),
        Ok(_) if p_given.is_zero() => return Err(format!("conditioning on null event {given:?} succeeded")),
        Ok(cond) => {
            for t in oracle.assignments_of(&targets) {
                let mut joint = t.clone();
                joint.extend(given.iter().copied());
                let want = oracle.mass(&joint) / p_given.clone();
                let got = cond.prob(&Assignment::from_pairs(t.iter().copied())).map_err(|e| e.to_string())?;
                compare(&format!("P({t:?} | {given:?})"), &got, &want, tol)?;
            }
        }
    }

    if names.len() >= 2 {
        let mut shuffled = names.clone();
        shuffled.shuffle(rng);
        let split = rng.gen_range(1..shuffled.len());
        let target = &shuffled[..split];
        let others = &shuffled[split..];
        let cut = rng.gen_range(1..=others.len());
        let (indep, given) = others.split_at(cut);
        let query = ontolab::CiQuery::conditional(target, indep, given).map_err(|e| e.to_string())?;
        let report = ontolab::ci_deviation(&table, &query).map_err(|e| e.to_string())?;
        let (dev, witness, vacuous) = oracle.ci(target, indep, given);
        compare(&format!("deviation of {query}"), &report.deviation, &dev, tol)?;
        if report.vacuous_events != vacuous {
            return Err(format!("{query}: {} vacuous events, oracle {vacuous}", report.vacuous_events));
        }
        if P::BACKEND == ontolab::Backend::Exact {
            let got = report.witness.map(|w| w.0);
            if got != witness {
                return Err(format!("{query}: witness {got:?}, oracle {witness:?}"));
            }
        }
    }
    Ok(())
}

/// `count` random joints with at most 4 variables and alphabets at most 4, on
/// both backends.
pub fn oracle_suite(count: usize, seed: u64, float_tol: f64) -> Result<(), String> {
    let mut r = rng(seed);
    for i in 0..count {
        let (names, sizes) = random_shape(&mut r, 4, 4);
        let len: usize = sizes.iter().product();
        let (exact, float) = random_weights(&mut r, len);
        let case_seed: u64 = r.gen();
        check_joint(&Oracle::new(&names, &sizes, &exact), &mut rng(case_seed), 0.0)
            .map_err(|e| format!("joint {i} (exact): {e}"))?;
        check_joint(&Oracle::new(&names, &sizes, &float), &mut rng(case_seed), float_tol)
            .map_err(|e| format!("joint {i} (float): {e}"))?;
    }
    Ok(())
}

impl<P: Prob> Oracle<P> {
    /// Read the points of an engine table; everything after that is brute force.
    pub fn from_table(table: &JointTable<P>) -> Self {
        let sc = table.scenario();
        Oracle {
            names: sc.names().map(str::to_string).collect(),
            sizes: sc.alphabet_sizes(),
            points: table
                .iter()
                .map(|(a, p)| (a.iter().map(|(_, s)| s).collect(), p.clone()))
                .collect(),
        }
    }

    /// Largest `|P(a,b,l) - P(a) P(b) P(l)|` over the named triple.
    pub fn factorization(&self, vars: [&str; 3]) -> P {
        let mut best = P::zero();
        for a in self.assignments_of(&vars) {
            let product = a.iter().fold(P::one(), |acc, single| acc * self.mass(std::slice::from_ref(single)));
            best = P::max_of(best, self.mass(&a).abs_diff(&product));
        }
        best
    }

    /// Deviation of a named assumption, expanded by hand.
    pub fn assumption(&self, id: &str) -> P {
        let ci = |t: &[&str], s: &[&str], g: &[&str]| self.ci(t, s, g).0;
        let max = |v: Vec<P>| v.into_iter().fold(P::zero(), P::max_of);
        match id {
            "FR" => max(vec![
                ci(&["A"], &["B", "C", "Y", "Z"], &[]),
                ci(&["B"], &["A", "C", "X", "Z"], &[]),
                ci(&["C"], &["A", "B", "X", "Y"], &[]),
            ]),
            "FRprime" => max(vec![ci(&["A"], &["B", "lambda"], &[]), ci(&["B"], &["A", "lambda"], &[])]),
            "NS" => max(vec![ci(&["X"], &["B"], &["A"]), ci(&["Y"], &["A"], &["B"])]),
            "ST" => ci(&["C", "Z"], &["A", "B", "X", "Y"], &[]),
            "FACT" => self.factorization(["A", "B", "lambda"]),
            other => panic!("no expansion for {other}"),
        }
    }
}
