use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{fmt_q, to_f64, Q};

/// Exact number `Σ q_p · log p + λ` with primes `p`, rational `q_p` and a
/// rational linear part `λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LogValue {
    logs: BTreeMap<BigUint, Q>,
    lin: Q,
}

impl LogValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(lin: Q) -> Self {
        Self { logs: BTreeMap::new(), lin }
    }

    /// `coef · log r` for a positive rational `r`.
    pub fn log(coef: Q, r: &Q) -> Result<Self, NonPositive> {
        if !r.is_positive() {
            return Err(NonPositive(fmt_q(r)));
        }
        let mut v = Self::zero();
        if coef.is_zero() {
            return Ok(v);
        }
        for (p, e) in factor(&r.numer().to_biguint().unwrap()) {
            v.push(p, &coef * Q::from_integer(BigInt::from(e)));
        }
        for (p, e) in factor(&r.denom().to_biguint().unwrap()) {
            v.push(p, -&coef * Q::from_integer(BigInt::from(e)));
        }
        Ok(v)
    }

    fn push(&mut self, p: BigUint, c: Q) {
        let slot = self.logs.entry(p.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.logs.remove(&p);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (p, c) in &o.logs {
            r.push(p.clone(), c.clone());
        }
        r.lin += &o.lin;
        r
    }

    pub fn neg(&self) -> Self {
        Self { logs: self.logs.iter().map(|(p, c)| (p.clone(), -c.clone())).collect(), lin: -self.lin.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { logs: self.logs.iter().map(|(p, c)| (p.clone(), c * k)).collect(), lin: &self.lin * k }
    }

    pub fn is_zero(&self) -> bool {
        self.logs.is_empty() && self.lin.is_zero()
    }

    pub fn linear_part(&self) -> &Q {
        &self.lin
    }

    /// `(q, p)` pairs with `p` prime.
    pub fn terms(&self) -> impl Iterator<Item = (&Q, &BigUint)> {
        self.logs.iter().map(|(p, c)| (c, p))
    }

    /// Rational enclosure `[lo, hi]` of the value, of width below `2^-bits`
    /// times the number of terms.
    pub fn enclose(&self, bits: u32) -> (Q, Q) {
        let mut lo = self.lin.clone();
        let mut hi = self.lin.clone();
        for (p, c) in &self.logs {
            let (a, b) = ln_enclosure(p, bits + 8);
            if c.is_positive() {
                lo += c * &a;
                hi += c * &b;
            } else {
                lo += c * &b;
                hi += c * &a;
            }
        }
        (lo, hi)
    }

    /// Float value taken from the midpoint of a 96-bit enclosure.
    pub fn to_f64(&self) -> f64 {
        if self.logs.is_empty() {
            return to_f64(&self.lin);
        }
        let (lo, hi) = self.enclose(96);
        to_f64(&((lo + hi) / Q::from_integer(2.into())))
    }

    /// Exact sign by refining enclosures; `None` only for values that are
    /// nonzero yet within `2^-512` of zero.
    pub fn signum(&self) -> Option<i32> {
        if self.is_zero() {
            return Some(0);
        }
        let mut bits = 64;
        while bits <= 512 {
            let (lo, hi) = self.enclose(bits);
            if lo.is_positive() {
                return Some(1);
            }
            if hi.is_negative() {
                return Some(-1);
            }
            bits *= 2;
        }
        None
    }

    /// `exp(-self)` as a product of rational powers of primes.
    pub fn weight(&self) -> Weight {
        Weight { powers: self.logs.iter().map(|(p, c)| (p.clone(), -c.clone())).collect(), exp_lin: -self.lin.clone() }
    }
}

/// Error for a logarithm of a non-positive rational.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("log of non-positive value {0}")]
pub struct NonPositive(pub String);

/// Exact positive number `Π p^{e_p} · exp(μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    powers: BTreeMap<BigUint, Q>,
    exp_lin: Q,
}

impl Weight {
    /// The rational value when every exponent is an integer and `μ = 0`.
    pub fn as_rational(&self) -> Option<Q> {
        if !self.exp_lin.is_zero() {
            return None;
        }
        let mut acc = Q::one();
        for (p, e) in &self.powers {
            if !e.is_integer() {
                return None;
            }
            let k = e.numer().to_i64()?;
            let base = Q::from_integer(BigInt::from(p.clone()));
            let pw = num_traits::pow(base, k.unsigned_abs() as usize);
            acc *= if k >= 0 { pw } else { pw.recip() };
        }
        Some(acc)
    }

    pub fn to_f64(&self) -> f64 {
        let l: f64 = self.powers.iter().map(|(p, e)| to_f64(e) * p.to_f64().unwrap().ln()).sum();
        (l + to_f64(&self.exp_lin)).exp()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", fmt_q(&r));
        }
        let mut parts: Vec<String> = self.powers.iter().map(|(p, e)| format!("{p}^({})", fmt_q(e))).collect();
        if !self.exp_lin.is_zero() {
            parts.push(format!("exp({})", fmt_q(&self.exp_lin)));
        }
        write!(f, "{}", parts.join("·"))
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.logs {
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
            if a.is_one() {
                write!(f, "log {p}")?;
            } else {
                write!(f, "{} log {p}", fmt_q(&a))?;
            }
        }
        if !self.lin.is_zero() {
            let neg = self.lin.is_negative();
            if first {
                write!(f, "{}", fmt_q(&self.lin))?;
            } else {
                write!(f, " {} {}", if neg { "-" } else { "+" }, fmt_q(&self.lin.abs()))?;
            }
        }
        Ok(())
    }
}

/// Prime factorisation by trial division; a cofactor left after 2^20 is
/// kept as a single key.
fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    if n.is_one() || n.is_zero() {
        return out;
    }
    let mut d = 2u64;
    while d < (1 << 20) {
        let bd = BigUint::from(d);
        if &bd * &bd > n {
            break;
        }
        let mut e = 0;
        while (&n % &bd).is_zero() {
            n /= &bd;
            e += 1;
        }
        if e > 0 {
            out.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

/// `2·atanh(z)` enclosure for `0 ≤ z ≤ 1/3`, to `bits` bits.
fn two_atanh(z: &Q, bits: u32) -> (Q, Q) {
    let tol = Q::new(BigInt::one(), BigInt::one() << bits);
    let z2 = z * z;
    let mut pow = z.clone();
    let mut sum = Q::zero();
    let mut k = 1i64;
    loop {
        sum += &pow / Q::from_integer(k.into());
        pow *= &z2;
        k += 2;
        // tail ≤ z^k / (k (1 - z²))
        let tail = &pow / (Q::from_integer(k.into()) * (Q::one() - &z2));
        if tail < tol {
            let two = Q::from_integer(2.into());
            return (&sum * &two, (sum + tail) * two);
        }
    }
}

/// Rational enclosure of `ln p`.
fn ln_enclosure(p: &BigUint, bits: u32) -> (Q, Q) {
    let k = p.bits() - 1;
    let m = Q::new(BigInt::from(p.clone()), BigInt::one() << k);
    let one = Q::one();
    let (l2a, l2b) = two_atanh(&Q::new(1.into(), 3.into()), bits + 8);
    let z = (&m - &one) / (&m + &one);
    let (ma, mb) = two_atanh(&z, bits + 2);
    let kq = Q::from_integer(BigInt::from(k));
    (&kq * l2a + ma, kq * l2b + mb)
}
