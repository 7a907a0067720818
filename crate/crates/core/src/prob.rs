//! Numeric backends for probability values.
//!
//! Everything downstream is generic over [`Prob`]. `f64` is the fast backend
//! used by sweeps and searches; [`Rational`] keeps every entry exact so that
//! identities can be certified with `==` instead of a tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// Arbitrary-precision rational probability.
pub type Rational = BigRational;

/// Normalization tolerance applied to float tables on construction.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-9;

/// Grid resolution used when sampling exact simplex points.
const EXACT_GRID: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected exact|float)")),
        }
    }
}

/// A probability value on one of the two backends.
pub trait Prob:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    const BACKEND: Backend;

    fn to_f64(&self) -> f64;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn abs_diff(&self, other: &Self) -> Self;

    fn is_negative(&self) -> bool;

    /// Whether a computed total counts as 1 on this backend.
    fn is_unit_sum(sum: &Self) -> bool;

    /// Draw a point from the flat distribution on the `(len - 1)`-simplex.
    ///
    /// The exact backend samples the uniform spacing of `len - 1` sorted grid
    /// points on `{0, 1/2^20, ..., 1}`, so rows sum to exactly one.
    fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Self>;

    /// Parse a probability literal (`"p/q"`, an integer, or a decimal on the
    /// float backend).
    fn parse_literal(text: &str) -> Option<Self>;

    /// Convert from f64, if this backend can represent the value faithfully.
    fn from_f64(value: f64) -> Option<Self>;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Prob for f64 {
    const BACKEND: Backend = Backend::Float;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn is_unit_sum(sum: &Self) -> bool {
        (sum - 1.0).abs() <= FLOAT_NORMALIZATION_TOL
    }

    fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Self> {
        // Normalized unit exponentials are Dirichlet(1, ..., 1).
        let mut draws: Vec<f64> = (0..len)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            draws.iter_mut().for_each(|d| *d /= total);
        } else {
            draws.iter_mut().for_each(|d| *d = 1.0 / len as f64);
        }
        draws
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            Some(num / den)
        } else {
            text.parse().ok().filter(|v: &f64| v.is_finite())
        }
    }

    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }
}

impl Prob for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn is_unit_sum(sum: &Self) -> bool {
        sum.is_one()
    }

    fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Self> {
        let mut cuts: Vec<u64> = (1..len).map(|_| rng.gen_range(0..=EXACT_GRID)).collect();
        cuts.sort_unstable();
        let mut prev = 0u64;
        let mut row = Vec::with_capacity(len);
        for cut in cuts.into_iter().chain(std::iter::once(EXACT_GRID)) {
            row.push(Rational::new(
                BigInt::from(cut - prev),
                BigInt::from(EXACT_GRID),
            ));
            prev = cut;
        }
        row
    }

    fn parse_literal(text: &str) -> Option<Self> {
        Rational::from_str(text.trim()).ok()
    }

    fn from_f64(value: f64) -> Option<Self> {
        Rational::from_float(value)
    }
}
