use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly1::Poly1;
use super::{to_f64, Q};

/// Exponent pair `(m1, m2)` of the monomial `s^m1 t^m2`.
pub type Exp = (i32, i32);

/// Laurent polynomial in `(s, t)` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<Exp, Q>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial((0, 0), c)
    }

    pub fn monomial(e: Exp, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn s() -> Self {
        Self::monomial((1, 0), Q::one())
    }

    pub fn t() -> Self {
        Self::monomial((0, 1), Q::one())
    }

    /// Posynomial with coefficient one on every listed exponent.
    pub fn posynomial(points: &[Exp]) -> Self {
        let mut p = Self::zero();
        for &e in points {
            p.add_term(e, Q::one());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Q)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exp, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exp) -> Q {
        self.terms.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                r.add_term((ea.0 + eb.0, ea.1 + eb.1), ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Multiply by the monomial `s^e.0 t^e.1`.
    pub fn shift(&self, e: Exp) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| ((m.0 + e.0, m.1 + e.1), c.clone())).collect() }
    }

    /// Euler operator `s ∂/∂s`.
    pub fn delta_s(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * Q::from_integer(e.0.into()))))
    }

    /// Euler operator `t ∂/∂t`.
    pub fn delta_t(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * Q::from_integer(e.1.into()))))
    }

    /// Euler operator along coordinate `j` (0 for `s`, 1 for `t`).
    pub fn delta(&self, j: usize) -> Self {
        if j == 0 {
            self.delta_s()
        } else {
            self.delta_t()
        }
    }

    /// Componentwise minimum exponent, or `None` for the zero polynomial.
    pub fn min_exp(&self) -> Option<Exp> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |a, e| (a.0.min(e.0), a.1.min(e.1))))
    }

    /// Positive rational `g` with `self / g` having coprime integer coefficients.
    pub fn content(&self) -> Q {
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Q::one()
        } else {
            Q::new(num, den)
        }
    }

    /// Coefficient of the largest exponent in lexicographic order.
    pub fn leading_coeff(&self) -> Option<&Q> {
        self.terms.values().next_back()
    }

    pub fn eval(&self, s: &Q, t: &Q) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            acc += c * pow_q(s, e.0) * pow_q(t, e.1);
        }
        acc
    }

    pub fn eval_f64(&self, s: f64, t: f64) -> f64 {
        self.terms.iter().map(|(e, c)| to_f64(c) * s.powi(e.0) * t.powi(e.1)).sum()
    }

    /// Maximal weighted degree `⟨m, w⟩` over the support.
    pub fn degree_along(&self, w: (i64, i64)) -> Option<i64> {
        self.terms.keys().map(|e| dot(*e, w)).max()
    }

    /// Terms of maximal weighted degree along `w`.
    pub fn leading(&self, w: (i64, i64)) -> (Option<i64>, Poly2) {
        let Some(h) = self.degree_along(w) else {
            return (None, Self::zero());
        };
        let lead = self.terms.iter().filter(|(e, _)| dot(**e, w) == h).map(|(e, c)| (*e, c.clone()));
        (Some(h), Self::from_terms(lead))
    }

    /// Leading part along the primitive direction `n`, written as a
    /// polynomial in `τ = S^{d1} T^{d2}` with `d = (-n2, n1)` and divided by
    /// the base monomial of weight `h`. Returns `(h, k, p)` meaning the
    /// leading part equals `base_h · τ^k · p(τ)`.
    pub fn face_part(&self, n: (i64, i64)) -> Option<(i64, i64, Poly1)> {
        let (h, lead) = self.leading(n);
        let h = h?;
        let d = (-n.1, n.0);
        let base = face_base(n, h);
        let mut js: Vec<(i64, Q)> = Vec::with_capacity(lead.len());
        for (e, c) in &lead.terms {
            let diff = (e.0 as i64 - base.0, e.1 as i64 - base.1);
            let dd = d.0 * d.0 + d.1 * d.1;
            let j = (diff.0 * d.0 + diff.1 * d.1) / dd;
            debug_assert_eq!((j * d.0, j * d.1), diff);
            js.push((j, c.clone()));
        }
        let k = js.iter().map(|(j, _)| *j).min().unwrap_or(0);
        let deg = js.iter().map(|(j, _)| (*j - k) as usize).max().unwrap_or(0);
        let mut coeffs = vec![Q::zero(); deg + 1];
        for (j, c) in js {
            coeffs[(j - k) as usize] += c;
        }
        Some((h, k, Poly1::new(coeffs)))
    }
}

/// A fixed lattice point `b` with `⟨b, n⟩ = h`, shared by numerator and
/// denominator so their face parts are expressed in the same `τ`.
fn face_base(n: (i64, i64), h: i64) -> (i64, i64) {
    let g = num_integer::Integer::extended_gcd(&n.0, &n.1);
    debug_assert_eq!(g.gcd.abs(), 1, "direction must be primitive");
    let sgn = g.gcd.signum();
    (g.x * h * sgn, g.y * h * sgn)
}

pub(crate) fn dot(e: Exp, w: (i64, i64)) -> i64 {
    e.0 as i64 * w.0 + e.1 as i64 * w.1
}

fn pow_q(x: &Q, k: i32) -> Q {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match *e {
                (0, 0) => String::new(),
                _ => {
                    let mut m = String::new();
                    for (v, k) in [("s", e.0), ("t", e.1)] {
                        match k {
                            0 => {}
                            1 => m.push_str(v),
                            _ => m.push_str(&format!("{v}^{k}")),
                        }
                    }
                    m
                }
            };
            if mono.is_empty() {
                write!(f, "{}", super::fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}{mono}", super::fmt_q(&a))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{q, qi};

    #[test]
    fn arithmetic_and_euler() {
        let a = Poly2::posynomial(&[(0, 0), (1, 0), (0, 1)]);
        let b = Poly2::posynomial(&[(0, 0), (1, 0)]);
        let p = a.mul(&b);
        assert_eq!(p.coeff((1, 0)), qi(2));
        assert_eq!(p.coeff((1, 1)), qi(1));
        assert_eq!(a.delta_s(), Poly2::s());
        assert_eq!(p.sub(&p), Poly2::zero());
        assert_eq!(a.eval(&qi(1), &qi(1)), qi(3));
        assert_eq!(Poly2::monomial((-1, 2), qi(1)).eval(&qi(2), &qi(3)), q(9, 2));
        assert_eq!(a.to_string(), "1 + t + s");
    }

    #[test]
    fn face_parts() {
        let a = Poly2::posynomial(&[(0, 0), (1, 0), (0, 1)]);
        let (h, k, p) = a.face_part((1, 1)).unwrap();
        assert_eq!(h, 1);
        // leading part s + t = base · τ^k · p(τ)
        assert_eq!(p.degree(), Some(1));
        assert!(k == 0 || k == -1 || k == 1);
        let (h0, _, p0) = a.face_part((-1, 0)).unwrap();
        assert_eq!(h0, 0);
        assert_eq!(p0.degree(), Some(1));
    }
}
