//! Scalar arithmetic in the max-plus semiring.
//!
//! The carrier is the reals extended by the null element `eps` = -oo.
//! Semiring addition `oplus` is `max` (idempotent, with `eps` neutral) and
//! multiplication `otimes` is ordinary `+` (with `eps` absorbing and 0 as
//! the identity).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A max-plus scalar: a finite real or the null element `eps` = -oo.
///
/// `+oo` and NaN are never representable: constructors reject them and no
/// operation produces them, so `max`/`+` on the underlying float are always
/// well defined.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MaxPlusScalar(f64);

impl MaxPlusScalar {
    /// The null element `eps` = -oo: neutral for `oplus`, absorbing for `otimes`.
    pub const EPS: Self = Self(f64::NEG_INFINITY);
    /// The multiplicative identity 0.
    pub const ONE: Self = Self(0.0);

    /// Wraps a finite value or -oo; rejects NaN and +oo.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::INFINITY {
            return Err(Error::Domain(format!(
                "max-plus scalar must be finite or eps, got {value}"
            )));
        }
        Ok(Self(value))
    }

    /// Wraps a value known to be finite.
    ///
    /// Panics on non-finite input; use [`MaxPlusScalar::new`] for untrusted data.
    pub fn finite(value: f64) -> Self {
        assert!(
            value.is_finite(),
            "max-plus scalar must be finite, got {value}"
        );
        Self(value)
    }

    pub fn is_eps(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Underlying value; `eps` maps to `f64::NEG_INFINITY`.
    pub fn as_f64(self) -> f64 {
        self.0
    }

    /// Semiring addition: `max(x, y)`.
    pub fn oplus(self, other: Self) -> Self {
        Self(self.0.max(other.0))
    }

    /// Semiring multiplication: `x + y`, with `eps` absorbing.
    pub fn otimes(self, other: Self) -> Self {
        // -oo + finite and -oo + -oo are both -oo, so plain addition is safe.
        Self(self.0 + other.0)
    }

    /// Multiplicative inverse: `-x` for finite `x`; `eps` maps to itself.
    pub fn inverse(self) -> Self {
        if self.is_eps() {
            Self::EPS
        } else {
            Self(-self.0)
        }
    }

    /// Power with a real exponent, read as the arithmetic product `a * x`.
    ///
    /// `eps` is preserved under a positive exponent; a non-positive exponent
    /// of `eps` has no reading in the carrier and is a domain error.
    pub fn power(self, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("exponent must be finite, got {a}")));
        }
        if self.is_eps() {
            return if a > 0.0 {
                Ok(Self::EPS)
            } else {
                Err(Error::Domain(format!(
                    "eps^a is undefined for a <= 0 (a = {a})"
                )))
            };
        }
        let product = a * self.0;
        if !product.is_finite() {
            return Err(Error::Domain(format!(
                "power overflowed: {a} * {} is not finite",
                self.0
            )));
        }
        Ok(Self(product))
    }
}

impl fmt::Display for MaxPlusScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_eps() {
            f.write_str("eps")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for MaxPlusScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim();
        if token == "eps" {
            return Ok(Self::EPS);
        }
        let value: f64 = token
            .parse()
            .map_err(|_| Error::Parse(format!("invalid max-plus scalar {token:?}")))?;
        Self::new(value).map_err(|_| Error::Parse(format!("non-finite scalar {token:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: MaxPlusScalar = MaxPlusScalar::EPS;

    fn s(v: f64) -> MaxPlusScalar {
        MaxPlusScalar::finite(v)
    }

    #[test]
    fn oplus_matches_max_with_neutral_eps() {
        assert_eq!(EPS.oplus(s(5.0)), s(5.0));
        assert_eq!(s(3.0).oplus(s(7.0)), s(7.0));
        assert_eq!(s(2.0).oplus(s(2.0)), s(2.0));
        assert!(EPS.oplus(EPS).is_eps());
    }

    #[test]
    fn otimes_adds_with_absorbing_eps() {
        assert!(EPS.otimes(s(5.0)).is_eps());
        assert_eq!(s(3.0).otimes(s(7.0)), s(10.0));
        assert_eq!(MaxPlusScalar::ONE.otimes(s(9.0)), s(9.0));
    }

    #[test]
    fn inverse_negates_and_fixes_eps() {
        assert_eq!(s(4.0).inverse(), s(-4.0));
        assert!(EPS.inverse().is_eps());
        assert_eq!(MaxPlusScalar::ONE.inverse(), MaxPlusScalar::ONE);
    }

    #[test]
    fn power_is_arithmetic_product() {
        assert_eq!(s(3.0).power(2.0).unwrap(), s(6.0));
        let third = s(5.6422).power(1.0 / 3.0).unwrap();
        assert!((third.as_f64() - 1.8807).abs() < 5e-5);
        assert!(EPS.power(0.5).unwrap().is_eps());
    }

    #[test]
    fn power_of_eps_needs_positive_exponent() {
        assert!(EPS.power(0.0).is_err());
        assert!(EPS.power(-1.0).is_err());
    }

    #[test]
    fn constructors_reject_nan_and_plus_infinity() {
        assert!(MaxPlusScalar::new(f64::NAN).is_err());
        assert!(MaxPlusScalar::new(f64::INFINITY).is_err());
        assert!(MaxPlusScalar::new(f64::NEG_INFINITY).unwrap().is_eps());
    }

    #[test]
    fn parse_and_print_round_trip() {
        for text in ["eps", "1.5", "-3.25", "0"] {
            let v: MaxPlusScalar = text.parse().unwrap();
            let back: MaxPlusScalar = v.to_string().parse().unwrap();
            assert_eq!(v, back);
        }
        assert!("nan".parse::<MaxPlusScalar>().is_err());
        assert!("inf".parse::<MaxPlusScalar>().is_err());
    }
}
