//! Exact rational helpers shared by the solver, the semantics and the file
//! formats.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn nat(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n`, `n/m` or a finite decimal such as `4.5`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = Rational::new(whole.abs() * &scale + frac, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}
