//! Exact arithmetic kernel: Laurent polynomials in two positive variables,
//! rational functions with tropical face limits, univariate restrictions and
//! exact log-linear numbers.

mod logvalue;
mod poly1;
mod poly2;
mod ratfunc;

pub use logvalue::{LogValue, Weight};
pub use poly1::{Poly1, Rat1, Root, Limit};
pub use poly2::{Exp, Poly2};
pub use ratfunc::{Divergent, RatFunc2};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"0.25"`.
pub fn parse_q(src: &str) -> Option<Q> {
    let src = src.trim();
    if let Some((a, b)) = src.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = src.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    let n: BigInt = src.parse().ok()?;
    Some(Q::from_integer(n))
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`,
/// found by walking the Stern–Brocot tree with continued fractions.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi, "empty interval");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo and hi share an integer part; recurse on reciprocals of fractional parts
    let a = lo.clone() - fl.clone();
    let b = hi.clone() - fl.clone();
    let inner = simplest_between(&b.recip(), &a.recip());
    fl + inner.recip()
}

/// Rational approximation of `x` within relative distance `rel`.
pub fn rationalize(x: f64, rel: f64) -> Q {
    let lo = from_f64(x - x.abs() * rel).expect("finite");
    let hi = from_f64(x + x.abs() * rel).expect("finite");
    simplest_between(&lo, &hi)
}

/// Sign of an exact rational as -1, 0 or 1.
pub fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// `n/d` display with the denominator omitted when it is one.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/6"), Some(q(1, 2)));
        assert_eq!(parse_q("-2"), Some(qi(-2)));
        assert_eq!(parse_q("0.25"), Some(q(1, 4)));
        assert_eq!(parse_q("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_between(&q(-4, 10), &q(-3, 10)), q(-1, 3));
        assert_eq!(simplest_between(&q(5, 2), &q(5, 2)), q(5, 2));
        assert_eq!(rationalize(0.3333333333, 1e-6), q(1, 3));
    }
}
