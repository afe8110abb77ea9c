use num_traits::{One, Signed, Zero};

use super::{sign, simplest_between, to_f64, Q};

/// Dense univariate polynomial in `τ` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly1 {
    c: Vec<Q>,
}

/// A positive real root located either exactly or by an isolating interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact(Q),
    Approx { value: f64, lo: Q, hi: Q },
}

impl Root {
    pub fn value(&self) -> f64 {
        match self {
            Root::Exact(r) => to_f64(r),
            Root::Approx { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Root::Exact(r) => Some(r),
            Root::Approx { .. } => None,
        }
    }
}

/// One-sided limit of a univariate rational function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(Q),
    /// Unbounded, with the sign of the blow-up.
    Infinite(i32),
}

impl Poly1 {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(vec![Q::one()])
    }

    pub fn constant(k: Q) -> Self {
        Self::new(vec![k])
    }

    /// `k · τ^e`.
    pub fn monomial(e: usize, k: Q) -> Self {
        let mut c = vec![Q::zero(); e + 1];
        c[e] = k;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn low(&self) -> Q {
        self.order().map(|k| self.c[k].clone()).unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut c = vec![Q::zero(); n];
        for (i, x) in self.c.iter().enumerate() {
            c[i] += x;
        }
        for (i, x) in o.c.iter().enumerate() {
            c[i] += x;
        }
        Self::new(c)
    }

    pub fn neg(&self) -> Self {
        Self { c: self.c.iter().map(|x| -x.clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Multiply by `τ^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Q::zero(); k];
        c.extend(self.c.iter().cloned());
        Self::new(c)
    }

    /// Divide by `τ^k`; the low coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.c.iter().take(k).all(|x| x.is_zero()));
        Self::new(self.c.iter().skip(k).cloned().collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, x)| x * Q::from_integer((i as i64).into())).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lc = d.lead();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for i in (0..quo.len()).rev() {
            let k = &r[i + dd] / &lc;
            if !k.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[i + j] -= &k * dj;
                }
            }
            quo[i] = k;
        }
        r.truncate(dd);
        (Self::new(quo), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Scale to coprime integer coefficients with positive leading term.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let p = content_of(&self.c);
        let k = if self.lead().is_negative() { -p } else { p };
        self.scale(&k.recip())
    }

    pub fn square_free(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.primitive()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.c.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    /// `p(x) / x^deg` evaluated via the reversed polynomial in `1/x`; avoids
    /// overflow for large `x`.
    fn eval_scaled_f64(&self, x: f64) -> f64 {
        let y = 1.0 / x;
        let mut acc = 0.0;
        for c in self.c.iter() {
            acc = acc * y + to_f64(c);
        }
        acc
    }

    /// Sturm sequence of a square-free polynomial.
    fn sturm(&self) -> Vec<Poly1> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    fn variations(seq: &[Poly1], x: &Q) -> usize {
        let signs: Vec<i32> = seq.iter().map(|p| sign(&p.eval(x))).filter(|s| *s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Cauchy bound: every root has absolute value below the result.
    fn root_bound(&self) -> Q {
        let lc = self.lead().abs();
        let m = self.c.iter().map(|x| x.abs() / &lc).fold(Q::zero(), |a, b| if b > a { b } else { a });
        m + Q::one()
    }

    /// All distinct roots in `(0, ∞)`, in increasing order. Rational roots
    /// are detected exactly; the others are refined to about 1e-15 relative.
    pub fn positive_roots(&self) -> Vec<Root> {
        if self.is_zero() {
            return Vec::new();
        }
        let k = self.order().unwrap();
        let p = self.shift_down(k).square_free();
        if p.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let seq = p.sturm();
        let count = |a: &Q, b: &Q| Self::variations(&seq, a) - Self::variations(&seq, b);
        let zero = Q::zero();
        let hi = p.root_bound();
        let mut stack = vec![(zero, hi)];
        let mut isolated = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let n = count(&a, &b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                isolated.push((a, b));
                continue;
            }
            let m = (&a + &b) / Q::from_integer(2.into());
            stack.push((a, m.clone()));
            stack.push((m, b));
        }
        isolated.sort_by(|x, y| x.0.cmp(&y.0));
        isolated.into_iter().map(|(a, b)| p.refine(a, b)).collect()
    }

    /// Refine an isolating interval `(a, b]` of a square-free polynomial.
    fn refine(&self, mut a: Q, mut b: Q) -> Root {
        if self.eval(&b).is_zero() {
            return Root::Exact(b);
        }
        let two = Q::from_integer(2.into());
        // one simple root in (a, b) and b is not a root
        let sa = -sign(&self.eval(&b));
        for step in 0..400 {
            if step % 4 == 0 {
                let cand = simplest_between(&a, &b);
                if cand > a && self.eval(&cand).is_zero() {
                    return Root::Exact(cand);
                }
            }
            let m = (&a + &b) / &two;
            let sm = sign(&self.eval(&m));
            if sm == 0 {
                return Root::Exact(m);
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
            let width = to_f64(&(&b - &a));
            if width < 1e-18 * to_f64(&b).max(1e-300) && step > 60 {
                break;
            }
        }
        let value = to_f64(&((&a + &b) / &two));
        Root::Approx { value, lo: a, hi: b }
    }
}

/// Positive rational whose quotient has coprime integer coefficients.
fn content_of(c: &[Q]) -> Q {
    use num_integer::Integer;
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::one();
    for x in c {
        num = num.gcd(x.numer());
        den = den.lcm(x.denom());
    }
    if num.is_zero() {
        Q::one()
    } else {
        Q::new(num, den)
    }
}

/// Univariate rational function `num(τ) / den(τ)` with `den ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat1 {
    pub num: Poly1,
    pub den: Poly1,
}

impl Rat1 {
    pub fn new(num: Poly1, den: Poly1) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Self { num, den };
        r.strip_tau();
        r
    }

    /// `τ^k · num / den` for a signed power `k`.
    pub fn laurent(k: i64, num: Poly1, den: Poly1) -> Self {
        if k >= 0 {
            Self::new(num.shift_up(k as usize), den)
        } else {
            Self::new(num, den.shift_up((-k) as usize))
        }
    }

    pub fn constant(k: Q) -> Self {
        Self::new(Poly1::constant(k), Poly1::one())
    }

    pub fn zero() -> Self {
        Self::constant(Q::zero())
    }

    fn strip_tau(&mut self) {
        if self.num.is_zero() {
            self.den = Poly1::one();
            return;
        }
        let k = self.num.order().unwrap().min(self.den.order().unwrap());
        if k > 0 {
            self.num = self.num.shift_down(k);
            self.den = self.den.shift_down(k);
        }
    }

    /// Cancel the polynomial gcd and normalise the denominator to monic.
    pub fn reduced(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let g = self.num.gcd(&self.den);
        let n = self.num.div_rem(&g).0;
        let d = self.den.div_rem(&g).0;
        let lc = d.lead();
        Self::new(n.scale(&lc.recip()), d.scale(&lc.recip()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).sub(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.num.scale(k), self.den.clone())
    }

    /// `τ d/dτ` applied to the function.
    pub fn tau_derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Self::new(n.shift_up(1), self.den.mul(&self.den))
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// Float evaluation that stays finite for very small and very large `τ`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return self.num.eval_f64(x) / self.den.eval_f64(x);
        }
        let (Some(dn), Some(dd)) = (self.num.degree(), self.den.degree()) else {
            return 0.0;
        };
        let ratio = self.num.eval_scaled_f64(x) / self.den.eval_scaled_f64(x);
        ratio * x.powi(dn as i32 - dd as i32)
    }

    /// Limit as `τ → 0+`.
    pub fn limit_zero(&self) -> Limit {
        let Some(kn) = self.num.order() else {
            return Limit::Finite(Q::zero());
        };
        let kd = self.den.order().unwrap();
        let ratio = self.num.low() / self.den.low();
        match kn.cmp(&kd) {
            std::cmp::Ordering::Greater => Limit::Finite(Q::zero()),
            std::cmp::Ordering::Equal => Limit::Finite(ratio),
            std::cmp::Ordering::Less => Limit::Infinite(sign(&ratio)),
        }
    }

    /// Limit as `τ → ∞`.
    pub fn limit_inf(&self) -> Limit {
        let Some(dn) = self.num.degree() else {
            return Limit::Finite(Q::zero());
        };
        let dd = self.den.degree().unwrap();
        let ratio = self.num.lead() / self.den.lead();
        match dn.cmp(&dd) {
            std::cmp::Ordering::Less => Limit::Finite(Q::zero()),
            std::cmp::Ordering::Equal => Limit::Finite(ratio),
            std::cmp::Ordering::Greater => Limit::Infinite(sign(&ratio)),
        }
    }

    /// Limit at an end of `(0, ∞)`: `at_inf = false` for `τ → 0`.
    pub fn limit(&self, at_inf: bool) -> Limit {
        if at_inf {
            self.limit_inf()
        } else {
            self.limit_zero()
        }
    }
}
