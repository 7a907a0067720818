use num::complex::Complex64;
use ontolab::gallery::{
    chsh_settings, chsh_value, local_deterministic_model, pr_box_kernel, two_qubit_kernel,
    with_uniform_settings, BlochSetting, OntModelSpec, ResponseFunction, TwoQubitState,
};
use ontolab::{assumption_deviation, AssumptionId, ConditionalKernel, Prob, Rational, Scenario};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type M2 = [[Complex64; 2]; 2];
type M4 = [[Complex64; 4]; 4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(I + s n·σ)/2` from the Pauli matrices.
fn projector(n: [f64; 3], outcome: usize) -> M2 {
    let s = if outcome == 0 { 1.0 } else { -1.0 };
    let paulis: [M2; 3] = [
        [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
    ];
    let mut m = [[c(0.5, 0.), c(0., 0.)], [c(0., 0.), c(0.5, 0.)]];
    for (k, p) in paulis.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += p[i][j] * (0.5 * s * n[k]);
            }
        }
    }
    m
}

fn kron(a: &M2, b: &M2) -> M4 {
    let mut m = [[c(0., 0.); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    m
}

/// `⟨ψ| Π_x^a ⊗ Π_y^b |ψ⟩`.
fn born(psi: &[Complex64; 4], a: [f64; 3], b: [f64; 3], x: usize, y: usize) -> f64 {
    let m = kron(&projector(a, x), &projector(b, y));
    let mut total = c(0., 0.);
    for i in 0..4 {
        for j in 0..4 {
            total += psi[i].conj() * m[i][j] * psi[j];
        }
    }
    total.re
}

fn random_unit(rng: &mut StdRng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn random_state(rng: &mut StdRng) -> TwoQubitState {
    let raw: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    TwoQubitState::new([raw[0] / norm, raw[1] / norm, raw[2] / norm, raw[3] / norm]).unwrap()
}

fn setting(n: [f64; 3]) -> BlochSetting {
    BlochSetting::normalized(n).unwrap()
}

#[test]
fn kernel_matches_kronecker_oracle_on_random_states() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..1000 {
        let state = random_state(&mut rng);
        let a = setting(random_unit(&mut rng));
        let b = setting(random_unit(&mut rng));
        let k = two_qubit_kernel(&state, &[a], &[b]).unwrap();
        let row = &k.rows()[0];
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for x in 0..2 {
            for y in 0..2 {
                let want = born(state.amplitudes(), a.vector(), b.vector(), x, y);
                assert!((k.entry(&[x, y], &[0, 0]) - want).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn singlet_closed_form_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(12);
    let sign = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    for _ in 0..1000 {
        let a = setting(random_unit(&mut rng));
        let b = setting(random_unit(&mut rng));
        let k = two_qubit_kernel(&TwoQubitState::singlet(), &[a], &[b]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let want = (1.0 - sign(x) * sign(y) * a.dot(&b)) / 4.0;
                assert!((k.entry(&[x, y], &[0, 0]) - want).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn singlet_examples() {
    let z = BlochSetting::z();
    let k = two_qubit_kernel(&TwoQubitState::singlet(), &[z], &[z]).unwrap();
    assert!(k.entry(&[0, 0], &[0, 0]).abs() <= 1e-12);
    assert!((k.entry(&[0, 1], &[0, 0]) - 0.5).abs() <= 1e-12);

    let k = two_qubit_kernel(&TwoQubitState::singlet(), &[z], &[BlochSetting::x()]).unwrap();
    let equal = k.entry(&[0, 0], &[0, 0]) + k.entry(&[1, 1], &[0, 0]);
    assert!((equal - 0.5).abs() <= 1e-12);

    let k = two_qubit_kernel(&TwoQubitState::zero_zero(), &[z], &[z]).unwrap();
    assert!((k.entry(&[0, 0], &[0, 0]) - 1.0).abs() <= 1e-12);
}

#[test]
fn singlet_reaches_tsirelson_bound() {
    let (a, b) = chsh_settings();
    let k = two_qubit_kernel(&TwoQubitState::singlet(), &a, &b).unwrap();
    assert!((chsh_value(&k).unwrap() - 2.0 * 2f64.sqrt()).abs() <= 1e-9);
    let joint = with_uniform_settings(&k).unwrap();
    assert!(assumption_deviation(&joint, AssumptionId::Ns).unwrap().deviation <= 1e-12);
}

#[test]
fn pr_box() {
    let k = pr_box_kernel::<Rational>();
    assert_eq!(chsh_value(&k).unwrap(), Rational::from_ratio(4, 1));
    let joint = with_uniform_settings(&k).unwrap();
    assert_eq!(assumption_deviation(&joint, AssumptionId::Ns).unwrap().deviation, Rational::from_ratio(0, 1));
    for ab in 0..4 {
        let row = &k.rows()[ab];
        assert_eq!(row[0].clone() + row[1].clone(), Rational::from_ratio(1, 2));
        assert_eq!(row[0].clone() + row[2].clone(), Rational::from_ratio(1, 2));
    }
}

/// All 16 x 16 pairs of binary response tables `(setting, ontic) -> outcome`,
/// averaged over a uniform binary ontic state.
#[test]
fn local_deterministic_chsh_never_exceeds_two() {
    let two = Rational::from_ratio(2, 1);
    let mut best = Rational::from_ratio(0, 1);
    for f in 0..16usize {
        for g in 0..16usize {
            let bit = |table: usize, s: usize, l: usize| (table >> (2 * s + l)) & 1;
            let mut rows = Vec::new();
            for a in 0..2 {
                for b in 0..2 {
                    let mut row = vec![Rational::from_ratio(0, 1); 4];
                    for l in 0..2 {
                        let xy = 2 * bit(f, a, l) + bit(g, b, l);
                        row[xy] = row[xy].clone() + Rational::from_ratio(1, 2);
                    }
                    rows.push(row);
                }
            }
            let k = ConditionalKernel::new(
                Scenario::from_dims(&[("X", 2), ("Y", 2)]).unwrap(),
                Scenario::from_dims(&[("A", 2), ("B", 2)]).unwrap(),
                rows,
            )
            .unwrap();
            let v = chsh_value(&k).unwrap();
            assert!(v <= two, "f={f} g={g} gives {v}");
            best = Rational::max_of(best, v);
        }
    }
    assert_eq!(best, two);
}

#[test]
fn composed_local_models_respect_the_bound() {
    let responses = [
        ResponseFunction::constant(0),
        ResponseFunction::constant(1),
        ResponseFunction::copy_ontic(),
        ResponseFunction::and_gate(),
        ResponseFunction::from_fn(2, 2, 2, |s, l| s ^ l).unwrap(),
    ];
    for x in &responses {
        for y in &responses {
            let spec = OntModelSpec::<f64>::binary(x.clone(), y.clone(), ResponseFunction::copy_ontic());
            let joint = local_deterministic_model(&spec).unwrap();
            let mut rows = Vec::new();
            for a in 0..2 {
                for b in 0..2 {
                    let given = ontolab::Assignment::new().with("A", a).with("B", b);
                    rows.push(joint.condition(&["X", "Y"], &given).unwrap().probs().to_vec());
                }
            }
            let k = ConditionalKernel::new(
                Scenario::from_dims(&[("X", 2), ("Y", 2)]).unwrap(),
                Scenario::from_dims(&[("A", 2), ("B", 2)]).unwrap(),
                rows,
            )
            .unwrap();
            assert!(chsh_value(&k).unwrap() <= 2.0 + 1e-12);
        }
    }
}

#[test]
fn invalid_inputs() {
    let bad = [c(1., 0.), c(1., 0.), c(0., 0.), c(0., 0.)];
    assert!(matches!(TwoQubitState::new(bad), Err(ontolab::Error::NotNormalizedState { .. })));
    assert!(matches!(BlochSetting::new([1.0, 1.0, 0.0]), Err(ontolab::Error::NotUnitSetting { .. })));
    let k = two_qubit_kernel(&TwoQubitState::singlet(), &[BlochSetting::z()], &[BlochSetting::z()]).unwrap();
    assert!(matches!(chsh_value(&k), Err(ontolab::Error::ShapeMismatch(_))));
}
