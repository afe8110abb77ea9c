use std::fmt;

use num_traits::{Signed, Zero};

use super::poly1::Rat1;
use super::poly2::Poly2;
use super::Q;

/// Signal that a face limit is unbounded: the numerator outgrows the
/// denominator by `excess` units of weighted degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("divergent limit (excess degree {excess})")]
pub struct Divergent {
    pub excess: i64,
}

/// Rational function `num / den` in `(s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc2 {
    num: Poly2,
    den: Poly2,
}

impl RatFunc2 {
    /// Build and normalise: common monomial factors removed, denominator
    /// scaled to coprime integer coefficients with positive leading term.
    pub fn new(num: Poly2, den: Poly2) -> Self {
        assert!(!den.is_zero(), "denominator is identically zero");
        if num.is_zero() {
            return Self { num, den: Poly2::one() };
        }
        let (a, b) = (num.min_exp().unwrap(), den.min_exp().unwrap());
        let m = (-(a.0.min(b.0)), -(a.1.min(b.1)));
        let (num, den) = (num.shift(m), den.shift(m));
        let mut k = den.content();
        if den.leading_coeff().is_some_and(|c| c.is_negative()) {
            k = -k;
        }
        let inv = k.recip();
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Poly2) -> Self {
        Self::new(p, Poly2::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly2::zero())
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    pub fn den(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by an identically zero function");
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.num.scale(k), self.den.clone())
    }

    /// Euler derivative `s ∂f/∂s` (j = 0) or `t ∂f/∂t` (j = 1).
    pub fn delta(&self, j: usize) -> Self {
        let n = self.num.delta(j).mul(&self.den).sub(&self.num.mul(&self.den.delta(j)));
        Self::new(n, self.den.mul(&self.den))
    }

    /// Logarithmic Euler derivative `s ∂_s f / f` (j = 0) or `t ∂_t f / f`.
    pub fn log_deriv(&self, j: usize) -> Self {
        assert!(!self.is_zero(), "log derivative of zero");
        let n = self.num.delta(j).mul(&self.den).sub(&self.num.mul(&self.den.delta(j)));
        Self::new(n, self.num.mul(&self.den))
    }

    pub fn log_deriv_s(&self) -> Self {
        self.log_deriv(0)
    }

    pub fn log_deriv_t(&self) -> Self {
        self.log_deriv(1)
    }

    /// Exact value at a point, or `None` where the denominator vanishes.
    pub fn eval(&self, s: &Q, t: &Q) -> Option<Q> {
        let d = self.den.eval(s, t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(s, t) / d)
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        self.num.eval_f64(s, t) / self.den.eval_f64(s, t)
    }

    /// Leading-order behaviour under `(s, t) = (S ε^{-w1}, T ε^{-w2})`,
    /// `ε → 0`, expressed again in the variables `(S, T)`.
    pub fn tropical_limit(&self, w: (i64, i64)) -> Result<RatFunc2, Divergent> {
        assert!(w != (0, 0), "zero direction");
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (hn, ln) = self.num.leading(w);
        let (hd, ld) = self.den.leading(w);
        let (hn, hd) = (hn.unwrap(), hd.unwrap());
        match hn.cmp(&hd) {
            std::cmp::Ordering::Greater => Err(Divergent { excess: hn - hd }),
            std::cmp::Ordering::Less => Ok(Self::zero()),
            std::cmp::Ordering::Equal => Ok(Self::new(ln, ld)),
        }
    }

    /// Restriction to the face with primitive outer normal `n`, as a
    /// function of `τ = S^{-n2} T^{n1}`.
    pub fn restrict(&self, n: (i64, i64)) -> Result<Rat1, Divergent> {
        if self.is_zero() {
            return Ok(Rat1::zero());
        }
        let (hn, kn, pn) = self.num.face_part(n).unwrap();
        let (hd, kd, pd) = self.den.face_part(n).unwrap();
        match hn.cmp(&hd) {
            std::cmp::Ordering::Greater => Err(Divergent { excess: hn - hd }),
            std::cmp::Ordering::Less => Ok(Rat1::zero()),
            std::cmp::Ordering::Equal => Ok(Rat1::laurent(kn - kd, pn, pd)),
        }
    }
}

impl fmt::Display for RatFunc2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly2::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
