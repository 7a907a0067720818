//! Born-rule correlations of two-qubit states and the PR box.
//!
//! Outcome index 0 is the `+1` eigenvalue, index 1 is `−1`.

use num::complex::Complex64;

use crate::dist::{compose_product, names, ConditionalKernel, JointTable, Scenario};
use crate::error::{Error, Result};
use crate::prob::Prob;

const UNIT_TOL: f64 = 1e-12;

/// Pure state in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (first qubit most significant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalizedState { norm });
        }
        Ok(TwoQubitState { amps })
    }

    /// `(|01⟩ − |10⟩)/√2`
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoQubitState {
            amps: [
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        }
    }

    /// `|00⟩`
    pub fn zero_zero() -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[0] = Complex64::new(1.0, 0.0);
        TwoQubitState { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }
}

/// Unit Bloch vector labelling a projective qubit measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSetting([f64; 3]);

impl BlochSetting {
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitSetting { norm });
        }
        Ok(BlochSetting(direction))
    }

    /// Rescale a nonzero vector to unit length.
    pub fn normalized(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitSetting { norm });
        }
        Ok(BlochSetting(direction.map(|c| c / norm)))
    }

    pub fn x() -> Self {
        BlochSetting([1.0, 0.0, 0.0])
    }

    pub fn z() -> Self {
        BlochSetting([0.0, 0.0, 1.0])
    }

    /// Direction at angle `theta` from ẑ towards x̂.
    pub fn in_xz_plane(theta: f64) -> Self {
        BlochSetting([theta.sin(), 0.0, theta.cos()])
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &BlochSetting) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `(I + s n·σ)/2` with `s = +1` for outcome index 0.
    fn projector(&self, outcome: usize) -> [[Complex64; 2]; 2] {
        let [nx, ny, nz] = self.0;
        let s = if outcome == 0 { 0.5 } else { -0.5 };
        [
            [Complex64::new(0.5 + s * nz, 0.0), Complex64::new(s * nx, -s * ny)],
            [Complex64::new(s * nx, s * ny), Complex64::new(0.5 - s * nz, 0.0)],
        ]
    }
}

/// Standard CHSH settings: Alice ẑ, x̂; Bob (ẑ+x̂)/√2, (ẑ−x̂)/√2.
pub fn chsh_settings() -> (Vec<BlochSetting>, Vec<BlochSetting>) {
    use std::f64::consts::FRAC_PI_4;
    (
        vec![BlochSetting::z(), BlochSetting::x()],
        vec![
            BlochSetting::in_xz_plane(FRAC_PI_4),
            BlochSetting::in_xz_plane(-FRAC_PI_4),
        ],
    )
}

/// `P(X, Y | A, B) = ‖(Π_x^a ⊗ Π_y^b) ψ‖²`.
pub fn two_qubit_kernel(
    state: &TwoQubitState,
    a_settings: &[BlochSetting],
    b_settings: &[BlochSetting],
) -> Result<ConditionalKernel<f64>> {
    let state = TwoQubitState::new(state.amps)?;
    for s in a_settings.iter().chain(b_settings) {
        BlochSetting::new(s.0)?;
    }
    let psi = state.amps;
    let mut rows = Vec::with_capacity(a_settings.len() * b_settings.len());
    for a in a_settings {
        for b in b_settings {
            let mut row = Vec::with_capacity(4);
            for x in 0..2 {
                let pa = a.projector(x);
                for y in 0..2 {
                    let pb = b.projector(y);
                    let mut norm = 0.0;
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut amp = Complex64::new(0.0, 0.0);
                            for k in 0..2 {
                                for l in 0..2 {
                                    amp += pa[i][k] * pb[j][l] * psi[2 * k + l];
                                }
                            }
                            norm += amp.norm_sqr();
                        }
                    }
                    row.push(norm);
                }
            }
            rows.push(row);
        }
    }
    ConditionalKernel::new(
        Scenario::from_dims(&[(names::X, 2), (names::Y, 2)])?,
        Scenario::from_dims(&[(names::A, a_settings.len()), (names::B, b_settings.len())])?,
        rows,
    )
}

/// `P(x, y | a, b) = 1/2` when `x ⊕ y = a·b`, else 0.
pub fn pr_box_kernel<P: Prob>() -> ConditionalKernel<P> {
    let mut rows = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let row = (0..4)
                .map(|xy| {
                    let (x, y) = (xy / 2, xy % 2);
                    if x ^ y == a & b {
                        P::from_ratio(1, 2)
                    } else {
                        P::zero()
                    }
                })
                .collect();
            rows.push(row);
        }
    }
    ConditionalKernel::new(
        Scenario::from_dims(&[(names::X, 2), (names::Y, 2)]).expect("static"),
        Scenario::from_dims(&[(names::A, 2), (names::B, 2)]).expect("static"),
        rows,
    )
    .expect("PR box rows are normalized")
}

/// Signed correlator `E(0,0) + E(0,1) + E(1,0) − E(1,1)`.
pub fn chsh_correlator<P: Prob>(kernel: &ConditionalKernel<P>) -> Result<P> {
    let binary = |s: &Scenario| s.len() == 2 && s.alphabet_sizes() == [2, 2];
    if !binary(kernel.targets()) || !binary(kernel.givens()) {
        return Err(Error::ShapeMismatch(
            "CHSH needs two binary settings and two binary outcomes".into(),
        ));
    }
    let correlation = |a: usize, b: usize| {
        let row = &kernel.rows()[2 * a + b];
        // E = P(x = y) − P(x ≠ y)
        (row[0].clone() + row[3].clone()) - (row[1].clone() + row[2].clone())
    };
    Ok(correlation(0, 0) + correlation(0, 1) + correlation(1, 0) - correlation(1, 1))
}

/// `|E(0,0) + E(0,1) + E(1,0) − E(1,1)|`; at most 2 for local models.
pub fn chsh_value<P: Prob>(kernel: &ConditionalKernel<P>) -> Result<P> {
    let s = chsh_correlator(kernel)?;
    Ok(s.abs_diff(&P::zero()))
}

/// Joint over `{A, B, X, Y}` with independent uniform settings.
pub fn with_uniform_settings<P: Prob>(kernel: &ConditionalKernel<P>) -> Result<JointTable<P>> {
    let mut dims: Vec<(&str, usize)> = kernel
        .givens()
        .variables()
        .iter()
        .map(|v| (v.name.as_str(), v.alphabet_size))
        .collect();
    dims.extend(
        kernel
            .targets()
            .variables()
            .iter()
            .map(|v| (v.name.as_str(), v.alphabet_size)),
    );
    let scenario = Scenario::from_dims(&dims)?;
    let mut factors: Vec<ConditionalKernel<P>> = kernel
        .givens()
        .variables()
        .iter()
        .map(|v| ConditionalKernel::uniform(&v.name, v.alphabet_size))
        .collect::<Result<_>>()?;
    factors.push(kernel.clone());
    compose_product(&scenario, &factors)
}
