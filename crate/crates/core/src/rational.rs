//! Exact rational arithmetic for boundary-sensitive parameters.
//!
//! Several classifications in this crate are discontinuous at rational
//! thresholds: the damping coefficient μ against μ₀(n), the nonlinearity
//! exponent p against 5/3 and 2 in the weight system. Comparing floats there
//! would misclassify the delicate equality cases, so those parameters are
//! carried as exact rationals and converted to `f64` only for evaluation.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A rational number with `i64` numerator and denominator, kept normalized
/// (positive denominator, reduced by gcd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    /// Creates `num/den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_positive(self) -> bool {
        self.num > 0
    }

    /// Parses either `a/b` or a (finite) decimal such as `1.5`.
    ///
    /// Decimal literals are exact: `"1.5"` becomes 3/2, not the nearest f64,
    /// so `p = 5/3` can be written `5/3` and `p = 2` survives round-trips
    /// through config files without losing its criticality.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num: i64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
            let den: i64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
            if den == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Ratio::new(num, den));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int_part: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse()
                    .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal {s:?}")));
            }
            if frac.len() > 15 {
                return Err(Error::Parse(format!("decimal too long in {s:?}")));
            }
            let frac_num: i64 = frac.parse().unwrap();
            let den = 10_i64.pow(frac.len() as u32);
            let magnitude = int_part.abs() * den + frac_num;
            let num = if neg { -magnitude } else { magnitude };
            return Ok(Ratio::new(num, den));
        }
        let num: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        Ok(Ratio::new(num, 1))
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Self {
        Ratio::new(n, 1)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators are positive, so cross-multiplication preserves order.
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ratio::parse(s)
    }
}
