//! The cyclotomic field `Q(ζ_N)`.
//!
//! An element is a rational polynomial in `ζ_N` reduced modulo the cyclotomic
//! polynomial `Φ_N`, so its coefficient vector (of length `< φ(N)`) is a
//! canonical form. Operands of different orders are lifted to the least
//! common multiple of the orders before combining.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::complex::rational::{parse_rational, QPoly};
use crate::complex::{Field, C64};
use crate::error::{Error, Result};

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<QPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<QPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Φ_N`, computed as `(x^N − 1) / Π_{d | N, d < N} Φ_d`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<QPoly> {
    assert!(n >= 1, "root of unity order must be positive");
    if let Some(p) = cyclotomic_cache().lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    let mut num = QPoly::monomial(n as usize, BigRational::one());
    num = num.sub(&QPoly::one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            let (q, r) = num.div_rem(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    let p = Arc::new(num);
    cyclotomic_cache().lock().expect("cache lock").insert(n, p.clone());
    p
}

/// Element of `Q(ζ_N)`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    poly: QPoly,
}

impl Cyclotomic {
    pub fn new(order: u32, poly: QPoly) -> Self {
        let poly = poly.rem(&cyclotomic_polynomial(order));
        Self { order, poly }
    }

    pub fn rational(q: BigRational) -> Self {
        Self { order: 1, poly: QPoly::new(vec![q]) }
    }

    /// `ζ_N^k`
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        Self::new(order, QPoly::monomial(e, BigRational::one()))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[BigRational] {
        self.poly.coeffs()
    }

    /// Re-expresses the element in `Q(ζ_M)` for a multiple `M` of its order.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.order), "lift target must be a multiple of the order");
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut coeffs = vec![BigRational::zero(); self.poly.coeffs().len().saturating_sub(1) * step + 1];
        for (k, c) in self.poly.coeffs().iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        Self::new(m, QPoly::new(coeffs))
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        if self.order == o.order {
            return (self.clone(), o.clone());
        }
        let l = self.order.lcm(&o.order);
        (self.lift(l), o.lift(l))
    }

    /// Parses `"1/2"`, `"zeta"`, `"-zeta^3"`, `"1 + 2*zeta^2"` as an element of
    /// `Q(ζ_N)`. An integer or rational literal is also accepted.
    pub fn parse(s: &str, order: u32) -> Result<Self> {
        let src = s.replace(' ', "");
        if src.is_empty() {
            return Err(Error::Parse("empty cyclotomic literal".into()));
        }
        let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); order as usize];
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in src.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, power) = if let Some(pos) = body.find("zeta") {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() { BigRational::one() } else { parse_rational(c)? };
                let rest = &body[pos + 4..];
                let p: i64 = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| Error::Parse(format!("bad term `{t}`")))?
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{t}`")))?
                };
                (c, p.rem_euclid(order as i64) as usize)
            } else {
                (parse_rational(body)?, 0)
            };
            coeffs[power] += if neg { -coef } else { coef };
        }
        Ok(Self::new(order, QPoly::new(coeffs)))
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.align(o);
        a.poly == b.poly
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{sign}{a}")?,
                (1, true) => write!(f, "{sign}zeta")?,
                (1, false) => write!(f, "{sign}{a}*zeta")?,
                (_, true) => write!(f, "{sign}zeta^{k}")?,
                (_, false) => write!(f, "{sign}{a}*zeta^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Field for Cyclotomic {
    fn zero() -> Self {
        Self::rational(BigRational::zero())
    }
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self { order: a.order, poly: a.poly.add(&b.poly) }
    }
    fn minus(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self { order: a.order, poly: a.poly.sub(&b.poly) }
    }
    fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let (a, b) = self.align(o);
        Self::new(a.order, a.poly.mul(&b.poly))
    }
    fn negate(&self) -> Self {
        Self { order: self.order, poly: self.poly.scale(&-BigRational::one()) }
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let inv = self.poly.inverse_mod(&cyclotomic_polynomial(self.order))?;
        Some(Self::new(self.order, inv))
    }
    fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut coeffs = vec![BigRational::zero(); n.max(1)];
        for (k, c) in self.poly.coeffs().iter().enumerate() {
            coeffs[(n - k % n) % n] += c;
        }
        Self::new(self.order, QPoly::new(coeffs))
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::rational(q.clone())
    }
    fn to_c64(&self) -> C64 {
        let z = C64::from_polar(1.0, 2.0 * PI / self.order as f64);
        self.poly.eval_c64(z)
    }
    fn is_exact() -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), QPoly::from_ints(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(3), QPoly::from_ints(&[1, 1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), QPoly::from_ints(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(12), QPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let w = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(w.pow(3), Cyclotomic::one());
        let i = Cyclotomic::root_of_unity(4, 1);
        assert_eq!(i.times(&i), Cyclotomic::from_i64(-1));
        // ω = ζ_12^4 and i = ζ_12^3 combine in Q(ζ_12)
        let p = w.times(&i);
        assert_eq!(p, Cyclotomic::root_of_unity(12, 7));
        assert!((p.to_c64() - C64::from_polar(1.0, 2.0 * PI * 7.0 / 12.0)).norm() < 1e-14);
    }

    #[test]
    fn conj_and_inverse() {
        let w = Cyclotomic::root_of_unity(5, 2);
        assert_eq!(w.conj(), Cyclotomic::root_of_unity(5, 3));
        assert_eq!(w.times(&w.conj()), Cyclotomic::one());
        let x = Cyclotomic::one().plus(&w);
        assert_eq!(x.times(&x.inverse().unwrap()), Cyclotomic::one());
        assert!(Cyclotomic::zero().inverse().is_none());
    }

    #[test]
    fn parse_literals() {
        assert_eq!(Cyclotomic::parse("zeta", 4).unwrap(), Cyclotomic::root_of_unity(4, 1));
        assert_eq!(Cyclotomic::parse("-zeta^2", 4).unwrap(), Cyclotomic::one());
        assert_eq!(Cyclotomic::parse("1/2", 4).unwrap(), Cyclotomic::rational(crate::complex::rational::rat(1, 2)));
        let w = Cyclotomic::parse("1 + 2*zeta - zeta^2", 6).unwrap();
        let z = Cyclotomic::root_of_unity(6, 1);
        assert_eq!(w, Cyclotomic::one().plus(&z.times(&Cyclotomic::from_i64(2))).minus(&z.pow(2)));
        assert_eq!(Cyclotomic::parse(&w.to_string(), 6).unwrap(), w);
        assert!(Cyclotomic::parse("zeta^x", 4).is_err());
    }
}
