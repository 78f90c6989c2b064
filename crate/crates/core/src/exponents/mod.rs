//! Exact-arithmetic construction and verification of Strichartz-type
//! exponent systems for the power nonlinearity `u|u|^alpha` on `R^d x T`.
//!
//! Every exponent is carried as a [`BigRational`]; no floating point is used
//! anywhere in this module. Exponents are stored through their reciprocals
//! (`1/q`, `1/r`, ...) because every admissibility condition is linear in the
//! reciprocals and a reciprocal of zero encodes the endpoint `q = infinity`.

mod report;
mod tuples;
mod verify;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{Comparator, Constraint, ConstraintReport};
pub use tuples::{
    auxiliary_pair, critical_tuple, feasible_r_interval, max_feasible_theta, perturbed_tuple,
    subcritical_pair, theta_tuple, AuxPair, Bound, RInterval, StrichartzTuple, Strictness,
    SubcriticalPair, ThetaTuple,
};
pub use verify::{verify_tuple, TupleClaim};

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("dimension d must be a positive integer, got {0}")]
    Dimension(u32),
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(String),
    #[error("alpha = {alpha} violates the energy-subcritical bound alpha < 4/(d-1) = {bound} for d = {d}")]
    EnergySupercritical {
        d: u32,
        alpha: String,
        bound: String,
    },
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("base tuple is infeasible: {0}")]
    InfeasibleBase(String),
}

/// Position of `alpha` relative to the mass-critical power `4/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `0 < alpha < 4/d`
    Subcritical,
    /// `alpha = 4/d`
    Boundary,
    /// `4/d < alpha < 4/(d-1)`
    Scattering,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Boundary => "boundary",
            Regime::Scattering => "scattering",
        };
        f.write_str(s)
    }
}

/// Dimension, power and the derived regime.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    d: u32,
    alpha: Rational,
    regime: Regime,
}

impl ProblemParams {
    /// Validates `d >= 1`, `0 < alpha < 4/(d-1)` and classifies the regime.
    pub fn new(d: u32, alpha: Rational) -> Result<Self, ExponentError> {
        if d == 0 {
            return Err(ExponentError::Dimension(d));
        }
        if !alpha.is_positive() {
            return Err(ExponentError::NonPositiveAlpha(alpha.to_string()));
        }
        if d >= 2 {
            let bound = rat(4, d as i64 - 1);
            if alpha >= bound {
                return Err(ExponentError::EnergySupercritical {
                    d,
                    alpha: alpha.to_string(),
                    bound: bound.to_string(),
                });
            }
        }
        let critical = rat(4, d as i64);
        let regime = match alpha.cmp(&critical) {
            std::cmp::Ordering::Less => Regime::Subcritical,
            std::cmp::Ordering::Equal => Regime::Boundary,
            std::cmp::Ordering::Greater => Regime::Scattering,
        };
        Ok(Self { d, alpha, regime })
    }

    pub fn parse(d: u32, alpha: &str) -> Result<Self, ExponentError> {
        Self::new(d, parse_rational(alpha)?)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub(crate) fn dr(&self) -> Rational {
        ri(self.d as i64)
    }

    /// `s = (alpha d - 4) / (2 alpha)`, the critical regularity.
    pub fn critical_regularity(&self) -> Rational {
        (&self.alpha * self.dr() - ri(4)) / (ri(2) * &self.alpha)
    }
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational, ExponentError> {
    let t = text.trim();
    if let Ok(r) = BigRational::from_str(t) {
        return Ok(r);
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let num: BigInt = digits
                .parse()
                .map_err(|_| ExponentError::Parse(text.into()))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let r = BigRational::new(num, den);
            return Ok(if neg { -r } else { r });
        }
    }
    Err(ExponentError::Parse(text.into()))
}

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn ri(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent from its reciprocal; `None` encodes infinity (or a non-positive
/// reciprocal, which has no exponent).
pub fn from_reciprocal(inv: &Rational) -> Option<Rational> {
    if inv.is_positive() {
        Some(inv.recip())
    } else {
        None
    }
}

/// Hölder conjugate reciprocal: `1/p' = 1 - 1/p`.
pub fn conjugate(inv: &Rational) -> Rational {
    Rational::one() - inv
}

/// Lossy image used only at the boundary with floating-point modules.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(
            ProblemParams::parse(2, "1").unwrap().regime(),
            Regime::Subcritical
        );
        assert_eq!(
            ProblemParams::parse(1, "4").unwrap().regime(),
            Regime::Boundary
        );
        assert_eq!(
            ProblemParams::parse(1, "5").unwrap().regime(),
            Regime::Scattering
        );
        assert_eq!(
            ProblemParams::parse(3, "3/2").unwrap().regime(),
            Regime::Scattering
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            ProblemParams::parse(3, "2"),
            Err(ExponentError::EnergySupercritical { .. })
        ));
        assert!(ProblemParams::parse(0, "1").is_err());
        assert!(ProblemParams::parse(1, "-1").is_err());
        assert!(ProblemParams::parse(1, "0").is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("5").unwrap(), ri(5));
        assert_eq!(parse_rational("4/3").unwrap(), rat(4, 3));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn critical_regularity_values() {
        assert_eq!(
            ProblemParams::parse(1, "5").unwrap().critical_regularity(),
            rat(1, 10)
        );
        assert_eq!(
            ProblemParams::parse(2, "3").unwrap().critical_regularity(),
            rat(1, 3)
        );
        assert!(ProblemParams::parse(1, "4")
            .unwrap()
            .critical_regularity()
            .is_zero());
    }
}
