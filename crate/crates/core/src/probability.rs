//! Exact probabilities of the form `numerator / base^exponent`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive};
use serde::Serialize;

/// `numerator / base^exponent`, exact.
///
/// Every probability in a walk simulation is a count of branches times a
/// common power of the degree, so this form never loses precision.
#[derive(Debug, Clone, Serialize)]
pub struct ExactProbability {
    #[serde(rename = "num")]
    numerator: u128,
    #[serde(rename = "den_base")]
    base: u32,
    #[serde(rename = "den_exp")]
    exponent: u32,
}

impl ExactProbability {
    pub fn new(numerator: u128, base: u32, exponent: u32) -> Self {
        assert!(base >= 1, "denominator base must be positive");
        ExactProbability {
            numerator,
            base,
            exponent,
        }
    }

    pub fn zero(base: u32) -> Self {
        Self::new(0, base, 0)
    }

    pub fn one(base: u32) -> Self {
        Self::new(1, base, 0)
    }

    /// Sum of `base^{-k}` over the given exponents, over the largest exponent.
    /// Returns `None` if the numerator does not fit in 128 bits.
    pub fn sum_of_inverse_powers(
        base: u32,
        exponents: impl IntoIterator<Item = u32> + Clone,
    ) -> Option<Self> {
        let top = exponents.clone().into_iter().max().unwrap_or(0);
        let mut numerator: u128 = 0;
        for k in exponents {
            let term = (base as u128).checked_pow(top - k)?;
            numerator = numerator.checked_add(term)?;
        }
        Some(Self::new(numerator, base, top))
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.base).pow(self.exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// The value as a reduced big rational.
    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            BigUint::from(self.numerator).into(),
            self.denominator().into(),
        )
    }

    /// Nearest floating-point value in any float type.
    pub fn to_float<F: Float>(&self) -> F {
        let r = self.to_ratio();
        let num = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
        if den.is_infinite() {
            // Scale down by a common power of two before dividing.
            let shift = r.denom().bits().saturating_sub(1000);
            let num = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let den = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            return F::from(num / den).unwrap();
        }
        F::from(num / den).unwrap()
    }

    /// Decimal rendering with 12 significant digits.
    pub fn decimal(&self) -> String {
        let v: f64 = self.to_float();
        if v == 0.0 {
            return "0".to_string();
        }
        let magnitude = v.abs().log10().floor() as i32;
        if (-5..12).contains(&magnitude) {
            let decimals = (11 - magnitude).max(0) as usize;
            format!("{v:.decimals$}")
        } else {
            format!("{v:.11e}")
        }
    }
}

impl PartialEq for ExactProbability {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactProbability {}

impl PartialOrd for ExactProbability {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactProbability {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = BigUint::from(self.numerator) * other.denominator();
        let rhs = BigUint::from(other.numerator) * self.denominator();
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.numerator, self.base, self.exponent)
    }
}

impl From<&ExactProbability> for BigRational {
    fn from(p: &ExactProbability) -> Self {
        p.to_ratio()
    }
}
