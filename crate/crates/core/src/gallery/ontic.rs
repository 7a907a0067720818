//! Ontological models over `{A, B, C, X, Y, Z, lambda}` built from factorized
//! kernels: local deterministic models, random premise-satisfying models, and
//! the non-static readout models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{
    compose_product, names, random_kernel_with, ConditionalKernel, JointTable, Scenario,
    VariableSpec,
};
use crate::error::{Error, Result};
use crate::prob::Prob;

/// Deterministic outcome table indexed by `(setting symbol, ontic symbol)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseFunction {
    setting_size: usize,
    ontic_size: usize,
    outcome_size: usize,
    table: Vec<usize>,
}

impl ResponseFunction {
    /// `table[setting * ontic_size + ontic]` is the outcome.
    pub fn new(setting_size: usize, ontic_size: usize, outcome_size: usize, table: Vec<usize>) -> Result<Self> {
        if setting_size == 0 || ontic_size == 0 || outcome_size == 0 {
            return Err(Error::InconsistentSpec("response alphabets must be nonempty".into()));
        }
        if table.len() != setting_size * ontic_size {
            return Err(Error::InconsistentSpec(format!(
                "response table has {} entries, domain has {}",
                table.len(),
                setting_size * ontic_size
            )));
        }
        if let Some(&bad) = table.iter().find(|&&o| o >= outcome_size) {
            return Err(Error::InconsistentSpec(format!(
                "response outcome {bad} outside alphabet of size {outcome_size}"
            )));
        }
        Ok(ResponseFunction {
            setting_size,
            ontic_size,
            outcome_size,
            table,
        })
    }

    pub fn from_fn(
        setting_size: usize,
        ontic_size: usize,
        outcome_size: usize,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let table = (0..setting_size)
            .flat_map(|s| (0..ontic_size).map(move |l| (s, l)))
            .map(|(s, l)| f(s, l))
            .collect();
        ResponseFunction::new(setting_size, ontic_size, outcome_size, table)
    }

    /// Binary response that always outputs `value`.
    pub fn constant(value: usize) -> Self {
        ResponseFunction::from_fn(2, 2, 2, |_, _| value).expect("binary constant")
    }

    /// Binary response `outcome = ontic`.
    pub fn copy_ontic() -> Self {
        ResponseFunction::from_fn(2, 2, 2, |_, l| l).expect("binary copy")
    }

    /// Binary response `outcome = setting ∧ ontic`.
    pub fn and_gate() -> Self {
        ResponseFunction::from_fn(2, 2, 2, |s, l| s & l).expect("binary and")
    }

    pub fn apply(&self, setting: usize, ontic: usize) -> usize {
        self.table[setting * self.ontic_size + ontic]
    }

    pub fn setting_size(&self) -> usize {
        self.setting_size
    }

    pub fn ontic_size(&self) -> usize {
        self.ontic_size
    }

    pub fn outcome_size(&self) -> usize {
        self.outcome_size
    }

    pub fn is_constant(&self) -> bool {
        self.table.windows(2).all(|w| w[0] == w[1])
    }

    fn kernel<P: Prob>(&self, target: &str, setting: &str, ontic: &str) -> Result<ConditionalKernel<P>> {
        ConditionalKernel::deterministic(
            (target, self.outcome_size),
            &[(setting, self.setting_size), (ontic, self.ontic_size)],
            |g| self.apply(g[0], g[1]),
        )
    }
}

/// Where the readout `Z` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZSource {
    /// `Z = h(C, lambda)` through the Z response table.
    FromCAndLambda,
    /// `Z = h(C, mu)` with fresh noise `mu`, independent of everything else.
    FromCAndNoise,
    /// `Z = X`: the readout reveals an outcome.
    CopyX,
    /// `Z = lambda`, declared as an alias in the scenario.
    CopyLambda,
}

/// Factorized model: independent `A, B, lambda` (and `mu`), `C` either free or
/// adaptive on `A`, and deterministic responses for `X, Y, Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct OntModelSpec<P> {
    pub p_a: Vec<P>,
    pub p_b: Vec<P>,
    pub p_c: Vec<P>,
    pub p_lambda: Vec<P>,
    pub p_mu: Option<Vec<P>>,
    pub x_response: ResponseFunction,
    pub y_response: ResponseFunction,
    /// Used by [`ZSource::FromCAndLambda`] and [`ZSource::FromCAndNoise`].
    pub z_response: Option<ResponseFunction>,
    /// Rows `P(C | A = a)`; replaces `p_c` when present.
    pub adaptive_c: Option<Vec<Vec<P>>>,
    pub z_source: ZSource,
}

fn uniform<P: Prob>(size: usize) -> Vec<P> {
    vec![P::from_ratio(1, size as i64); size]
}

impl<P: Prob> OntModelSpec<P> {
    /// Uniform binary settings and ontic state with the given responses.
    pub fn binary(x: ResponseFunction, y: ResponseFunction, z: ResponseFunction) -> Self {
        OntModelSpec {
            p_a: uniform(2),
            p_b: uniform(2),
            p_c: uniform(2),
            p_lambda: uniform(2),
            p_mu: None,
            x_response: x,
            y_response: y,
            z_response: Some(z),
            adaptive_c: None,
            z_source: ZSource::FromCAndLambda,
        }
    }

    fn c_size(&self) -> usize {
        match &self.adaptive_c {
            Some(rows) => rows.first().map_or(0, Vec::len),
            None => self.p_c.len(),
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentSpec(msg));
        let (na, nb, nl) = (self.p_a.len(), self.p_b.len(), self.p_lambda.len());
        if self.x_response.setting_size != na || self.x_response.ontic_size != nl {
            return bad(format!(
                "X response domain {}x{} does not match |A|={na}, |lambda|={nl}",
                self.x_response.setting_size, self.x_response.ontic_size
            ));
        }
        if self.y_response.setting_size != nb || self.y_response.ontic_size != nl {
            return bad(format!(
                "Y response domain {}x{} does not match |B|={nb}, |lambda|={nl}",
                self.y_response.setting_size, self.y_response.ontic_size
            ));
        }
        if let Some(rows) = &self.adaptive_c {
            if rows.len() != na {
                return bad(format!("adaptive C has {} rows for |A|={na}", rows.len()));
            }
            if rows.iter().any(|r| r.len() != self.c_size()) {
                return bad("adaptive C rows differ in length".into());
            }
        }
        let nc = self.c_size();
        match self.z_source {
            ZSource::FromCAndLambda | ZSource::FromCAndNoise => {
                let Some(z) = &self.z_response else {
                    return bad("Z source needs a Z response table".into());
                };
                let noise = match (&self.z_source, &self.p_mu) {
                    (ZSource::FromCAndNoise, Some(mu)) => mu.len(),
                    (ZSource::FromCAndNoise, None) => return bad("Z from noise needs P(mu)".into()),
                    _ => nl,
                };
                if z.setting_size != nc || z.ontic_size != noise {
                    return bad(format!(
                        "Z response domain {}x{} does not match |C|={nc} and source size {noise}",
                        z.setting_size, z.ontic_size
                    ));
                }
            }
            ZSource::CopyX | ZSource::CopyLambda => {}
        }
        Ok(())
    }

    fn z_size(&self) -> usize {
        match self.z_source {
            ZSource::CopyX => self.x_response.outcome_size,
            ZSource::CopyLambda => self.p_lambda.len(),
            _ => self.z_response.as_ref().map_or(0, |z| z.outcome_size),
        }
    }
}

/// Compose any [`OntModelSpec`] into a joint over the canonical variables.
pub fn ontic_model<P: Prob>(spec: &OntModelSpec<P>) -> Result<JointTable<P>> {
    use names::*;
    spec.check()?;
    let with_mu = spec.z_source == ZSource::FromCAndNoise;
    let nl = spec.p_lambda.len();
    let mut vars = vec![
        VariableSpec::named(A, spec.p_a.len()),
        VariableSpec::named(B, spec.p_b.len()),
        VariableSpec::named(C, spec.c_size()),
        VariableSpec::named(X, spec.x_response.outcome_size),
        VariableSpec::named(Y, spec.y_response.outcome_size),
        VariableSpec::named(Z, spec.z_size()),
        VariableSpec::named(LAMBDA, nl),
    ];
    if spec.z_source == ZSource::CopyLambda {
        vars[5] = vars[5].clone().alias_of(LAMBDA);
    }
    let mut factors = vec![ConditionalKernel::prior(LAMBDA, spec.p_lambda.clone())?];
    if with_mu {
        let mu = spec.p_mu.clone().expect("checked");
        vars.push(VariableSpec::named(MU, mu.len()));
        factors.push(ConditionalKernel::prior(MU, mu)?);
    }
    let scenario = Scenario::new(vars)?;
    factors.push(ConditionalKernel::prior(A, spec.p_a.clone())?);
    factors.push(ConditionalKernel::prior(B, spec.p_b.clone())?);
    factors.push(match &spec.adaptive_c {
        Some(rows) => ConditionalKernel::new(
            Scenario::from_dims(&[(C, spec.c_size())])?,
            Scenario::from_dims(&[(A, spec.p_a.len())])?,
            rows.clone(),
        )?,
        None => ConditionalKernel::prior(C, spec.p_c.clone())?,
    });
    factors.push(spec.x_response.kernel(X, A, LAMBDA)?);
    factors.push(spec.y_response.kernel(Y, B, LAMBDA)?);
    factors.push(match spec.z_source {
        ZSource::FromCAndLambda => spec.z_response.as_ref().expect("checked").kernel(Z, C, LAMBDA)?,
        ZSource::FromCAndNoise => spec.z_response.as_ref().expect("checked").kernel(Z, C, MU)?,
        ZSource::CopyX => {
            let n = spec.x_response.outcome_size;
            ConditionalKernel::deterministic((Z, n), &[(X, n)], |g| g[0])?
        }
        ZSource::CopyLambda => ConditionalKernel::deterministic((Z, nl), &[(LAMBDA, nl)], |g| g[0])?,
    });
    let joint = compose_product(&scenario, &factors)?;
    if with_mu {
        joint.marginalize(&CANONICAL)
    } else {
        Ok(joint)
    }
}

/// `X = f(A, lambda)`, `Y = g(B, lambda)`, `Z = h(C, lambda)` with mutually
/// independent settings that are independent of `lambda`.
pub fn local_deterministic_model<P: Prob>(spec: &OntModelSpec<P>) -> Result<JointTable<P>> {
    if spec.adaptive_c.is_some() {
        return Err(Error::InconsistentSpec(
            "local deterministic models take no adaptive C".into(),
        ));
    }
    if !matches!(spec.z_source, ZSource::FromCAndLambda | ZSource::CopyLambda) {
        return Err(Error::InconsistentSpec(
            "local deterministic models read Z from C and lambda".into(),
        ));
    }
    ontic_model(spec)
}

/// Alphabet sizes for the random premise family; `mu` is the internal noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphabetSizes {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl AlphabetSizes {
    pub fn uniform(k: usize) -> Self {
        AlphabetSizes {
            a: k,
            b: k,
            c: k,
            x: k,
            y: k,
            z: k,
            lambda: k,
            mu: k,
        }
    }

    pub fn binary() -> Self {
        AlphabetSizes::uniform(2)
    }
}

impl Default for AlphabetSizes {
    fn default() -> Self {
        AlphabetSizes::binary()
    }
}

/// `P(λ)P(μ)P(A)P(B)P(C)·P(X|A,λ)·P(Y|B,λ)·P(Z|C,μ)` with flat random kernels,
/// reported over the canonical variables.
pub fn premise_model_random<P: Prob>(seed: u64, sizes: AlphabetSizes) -> Result<JointTable<P>> {
    use names::*;
    let scenario = Scenario::from_dims(&[
        (A, sizes.a),
        (B, sizes.b),
        (C, sizes.c),
        (X, sizes.x),
        (Y, sizes.y),
        (Z, sizes.z),
        (LAMBDA, sizes.lambda),
        (MU, sizes.mu),
    ])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<ConditionalKernel<P>> = vec![
        random_kernel_with(&[(LAMBDA, sizes.lambda)], &[], &mut rng)?,
        random_kernel_with(&[(MU, sizes.mu)], &[], &mut rng)?,
        random_kernel_with(&[(A, sizes.a)], &[], &mut rng)?,
        random_kernel_with(&[(B, sizes.b)], &[], &mut rng)?,
        random_kernel_with(&[(C, sizes.c)], &[], &mut rng)?,
        random_kernel_with(&[(X, sizes.x)], &[(A, sizes.a), (LAMBDA, sizes.lambda)], &mut rng)?,
        random_kernel_with(&[(Y, sizes.y)], &[(B, sizes.b), (LAMBDA, sizes.lambda)], &mut rng)?,
        random_kernel_with(&[(Z, sizes.z)], &[(C, sizes.c), (MU, sizes.mu)], &mut rng)?,
    ];
    compose_product(&scenario, &factors)?.marginalize(&CANONICAL)
}

/// Uniform binary `A, B, lambda`; `C = A` with probability `p_copy`, otherwise
/// uniform; `X = Y = lambda` and the readout `Z = lambda`.
pub fn adaptive_c_model<P: Prob>(p_copy: P) -> Result<JointTable<P>> {
    if p_copy.is_negative() || p_copy > P::one() {
        return Err(Error::InvalidProbability(p_copy.to_string()));
    }
    let half = P::from_ratio(1, 2);
    let stay = p_copy.clone() + (P::one() - p_copy.clone()) * half.clone();
    let flip = (P::one() - p_copy) * half;
    let spec = OntModelSpec {
        adaptive_c: Some(vec![vec![stay.clone(), flip.clone()], vec![flip, stay]]),
        z_source: ZSource::CopyLambda,
        z_response: None,
        ..OntModelSpec::binary(
            ResponseFunction::copy_ontic(),
            ResponseFunction::copy_ontic(),
            ResponseFunction::copy_ontic(),
        )
    };
    ontic_model(&spec)
}

/// Readout that copies Alice's outcome: `X = f(A, lambda)`, `Y = lambda`,
/// `Z = X`, with a single fixed readout setting `C`.
pub fn outcome_revealing_model<P: Prob>(f: &ResponseFunction) -> Result<JointTable<P>> {
    let nl = f.ontic_size();
    let spec = OntModelSpec {
        p_a: uniform(f.setting_size()),
        p_b: uniform(2),
        p_c: uniform(1),
        p_lambda: uniform(nl),
        p_mu: None,
        x_response: f.clone(),
        y_response: ResponseFunction::from_fn(2, nl, nl, |_, l| l)?,
        z_response: None,
        adaptive_c: None,
        z_source: ZSource::CopyX,
    };
    ontic_model(&spec)
}
