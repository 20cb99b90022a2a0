//! Exact quantities normalised by the secret size, with an explicit infinity.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Units {
    Finite(BigRational),
    Infinite,
}

impl Units {
    pub fn ratio(num: i64, den: i64) -> Self {
        Units::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(v: i64) -> Self {
        Self::ratio(v, 1)
    }

    pub fn zero() -> Self {
        Units::Finite(BigRational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Units::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Units::Finite(r) => Some(r),
            Units::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Units::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Units::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<BigRational> for Units {
    fn from(r: BigRational) -> Self {
        Units::Finite(r)
    }
}

impl Add for Units {
    type Output = Units;
    fn add(self, rhs: Units) -> Units {
        match (self, rhs) {
            (Units::Finite(a), Units::Finite(b)) => Units::Finite(a + b),
            _ => Units::Infinite,
        }
    }
}

impl Sum for Units {
    fn sum<I: Iterator<Item = Units>>(iter: I) -> Units {
        iter.fold(Units::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Units::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Units::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Units::Infinite => f.write_str("inf"),
        }
    }
}

/// Serialised as `{"exact": "49/6", "approx": 8.1666}`.
impl Serialize for Units {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Units", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        match self {
            Units::Finite(_) => st.serialize_field("approx", &self.to_f64())?,
            Units::Infinite => st.serialize_field("approx", &Option::<f64>::None)?,
        }
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_sums_and_orders_last() {
        let total: Units = [Units::int(2), Units::ratio(4, 3), Units::Infinite].into_iter().sum();
        assert_eq!(total, Units::Infinite);
        assert!(Units::int(1_000_000) < Units::Infinite);
        assert_eq!(Units::Infinite.min(Units::int(3)), Units::int(3));
    }

    #[test]
    fn display_and_json() {
        assert_eq!(Units::ratio(49, 6).to_string(), "49/6");
        assert_eq!(Units::ratio(24, 2).to_string(), "12");
        let j = serde_json::to_string(&Units::Infinite).unwrap();
        assert_eq!(j, r#"{"exact":"inf","approx":null}"#);
    }
}
