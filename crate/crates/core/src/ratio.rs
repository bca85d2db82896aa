//! Exact reduction ratios.
//!
//! A [`GearRatio`] keeps the numerator and denominator exactly as the
//! tooth-count formula produced them (`7560/39`, not `2520/13`), so reports
//! can print the familiar unreduced form. Equality and ordering compare the
//! rational values, so `126/39 == 42/13`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GearRatio {
    numer: u64,
    denom: u64,
}

impl GearRatio {
    /// # Panics
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "gear ratio denominator must be nonzero");
        Self { numer, denom }
    }

    pub fn integer(value: u64) -> Self {
        Self::new(value, 1)
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// Value in lowest terms.
    pub fn reduced(&self) -> Ratio<u64> {
        Ratio::new(self.numer, self.denom)
    }

    pub fn to_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// `"7560/39 (≈193.85)"`: the exact form followed by a two-decimal value.
    pub fn display_approx(&self) -> String {
        format!("{self} (≈{:.2})", self.to_f64())
    }
}

impl PartialEq for GearRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for GearRatio {}

impl PartialOrd for GearRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GearRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.numer) * u128::from(other.denom);
        let rhs = u128::from(other.numer) * u128::from(self.denom);
        lhs.cmp(&rhs)
    }
}

impl Mul for GearRatio {
    type Output = GearRatio;

    fn mul(self, rhs: GearRatio) -> GearRatio {
        GearRatio::new(self.numer * rhs.numer, self.denom * rhs.denom)
    }
}

impl From<GearRatio> for Ratio<u64> {
    fn from(r: GearRatio) -> Self {
        r.reduced()
    }
}

impl fmt::Display for GearRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse gear ratio from {0:?}")]
pub struct ParseRatioError(String);

impl FromStr for GearRatio {
    type Err = ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatioError(s.to_owned());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let numer = n.parse().map_err(|_| err())?;
        let denom: u64 = d.parse().map_err(|_| err())?;
        if denom == 0 {
            return Err(err());
        }
        Ok(GearRatio::new(numer, denom))
    }
}

impl From<GearRatio> for String {
    fn from(r: GearRatio) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for GearRatio {
    type Error = ParseRatioError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_by_value() {
        assert_eq!(GearRatio::new(126, 39), GearRatio::new(42, 13));
        assert_ne!(GearRatio::new(126, 39), GearRatio::new(127, 39));
        assert!(GearRatio::new(1, 3) < GearRatio::new(1, 2));
    }

    #[test]
    fn display_keeps_unreduced_form() {
        let r = GearRatio::new(126, 39) * GearRatio::integer(60);
        assert_eq!(r.to_string(), "7560/39");
        assert_eq!(r.display_approx(), "7560/39 (≈193.85)");
        assert_eq!(GearRatio::integer(60).to_string(), "60");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["7560/39", "60", "1/2"] {
            let r: GearRatio = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("3/0".parse::<GearRatio>().is_err());
        assert!("x/2".parse::<GearRatio>().is_err());
    }
}
