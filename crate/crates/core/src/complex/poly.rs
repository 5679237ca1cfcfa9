//! Sparse polynomials in `(z, z̄)`.
//!
//! A [`HermitianPolynomial`] stores terms `c · z^a · z̄^b`. Evaluation is
//! polarized: `p(z, w̄) = Σ c · z^a · conj(w)^b`, which reduces to the ordinary
//! value on the diagonal `w = z`. Holomorphic polynomials are the special case
//! where every antiholomorphic index vanishes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use super::field::{Field, C64};
use super::rational::{parse_rational, GaussianRational};
use crate::error::{check_dim, Error, Result};

/// Exponent vector `α = (α_1, …, α_n)`.
///
/// Ordered graded-lexicographically: lower total degree first, and within a
/// degree the index with the larger leading exponent first, so that
/// `z_1² < z_1 z_2 < z_2²`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `e_i` in dimension `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// All indices of total degree exactly `d` in `n` variables, in
    /// graded-lexicographic order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=d).rev() {
                prefix.push(e);
                rec(n, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// All indices of total degree at most `d`.
    pub fn all_up_to_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::all_of_degree(n, k)).collect()
    }

    /// `x^α` for a vector of field elements.
    pub fn eval<F: Field>(&self, x: &[F]) -> F {
        let mut acc = F::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc = acc.times(&xi.pow(e));
            }
        }
        acc
    }

    pub fn eval_c64(&self, x: &[C64]) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc *= xi.powu(e);
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type TermKey = (MultiIndex, MultiIndex);

/// Polynomial in `z` and `z̄` with sparse coefficient storage.
#[derive(Clone, PartialEq, Debug)]
pub struct HermitianPolynomial<F: Field> {
    dim: usize,
    terms: BTreeMap<TermKey, F>,
}

/// Polynomial with exact Gaussian-rational coefficients.
pub type ExactPolynomial = HermitianPolynomial<GaussianRational>;

impl<F: Field> HermitianPolynomial<F> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: F) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, F::one())
    }

    /// The coordinate function `z_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(dim, MultiIndex::unit(dim, i), MultiIndex::zero(dim), F::one())
    }

    /// The conjugate coordinate `z̄_i`.
    pub fn conj_var(dim: usize, i: usize) -> Self {
        Self::monomial(dim, MultiIndex::zero(dim), MultiIndex::unit(dim, i), F::one())
    }

    /// `|z_i|²`
    pub fn abs_sq(dim: usize, i: usize) -> Self {
        Self::monomial(dim, MultiIndex::unit(dim, i), MultiIndex::unit(dim, i), F::one())
    }

    pub fn monomial(dim: usize, a: MultiIndex, b: MultiIndex, c: F) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(a, b, c);
        p
    }

    /// Holomorphic monomial `c · z^a`.
    pub fn holomorphic_monomial(a: MultiIndex, c: F) -> Self {
        let dim = a.len();
        Self::monomial(dim, a, MultiIndex::zero(dim), c)
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, F)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (a, b, c) in terms {
            check_dim(dim, a.len())?;
            check_dim(dim, b.len())?;
            p.add_term(a, b, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, &F)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, a: &MultiIndex, b: &MultiIndex) -> F {
        self.terms
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · z^a z̄^b`, dropping the term if it cancels.
    pub fn add_term(&mut self, a: MultiIndex, b: MultiIndex, c: F) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.plus(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Total degree in `(z, z̄)`; zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| a.degree() + b.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn holomorphic_degree(&self) -> u32 {
        self.terms.keys().map(|(a, _)| a.degree()).max().unwrap_or(0)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|(_, b)| b.is_zero())
    }

    /// Every term has the same holomorphic degree `d` and no antiholomorphic part.
    pub fn is_homogeneous_holomorphic(&self) -> Option<u32> {
        let mut deg = None;
        for (a, b) in self.terms.keys() {
            if !b.is_zero() {
                return None;
            }
            match deg {
                None => deg = Some(a.degree()),
                Some(d) if d != a.degree() => return None,
                _ => {}
            }
        }
        deg
    }

    /// Coefficient of `(a, b)` equals the conjugate of the coefficient of `(b, a)`.
    pub fn is_real_valued(&self) -> bool {
        self.terms.iter().all(|((a, b), c)| {
            self.terms
                .get(&(b.clone(), a.clone()))
                .is_some_and(|d| *d == c.conj())
        })
    }

    /// Exchanges holomorphic and antiholomorphic indices and conjugates
    /// coefficients. Real-valued polynomials are fixed by this map.
    pub fn conj_swap(&self) -> Self {
        let mut p = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            p.add_term(b.clone(), a.clone(), c.conj());
        }
        p
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut p = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            p.add_term(a.clone(), b.clone(), c.times(s));
        }
        p
    }

    pub fn map_coefficients<G: Field>(&self, f: impl Fn(&F) -> G) -> HermitianPolynomial<G> {
        let mut p = HermitianPolynomial::zero(self.dim);
        for ((a, b), c) in &self.terms {
            p.add_term(a.clone(), b.clone(), f(c));
        }
        p
    }

    pub fn to_c64(&self) -> HermitianPolynomial<C64> {
        self.map_coefficients(|c| c.to_c64())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        let mut p = self.clone();
        for ((a, b), c) in &o.terms {
            p.add_term(a.clone(), b.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        let mut p = self.clone();
        for ((a, b), c) in &o.terms {
            p.add_term(a.clone(), b.clone(), c.negate());
        }
        Ok(p)
    }

    /// Product with exact coefficient arithmetic (for exact fields).
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        let mut p = Self::zero(self.dim);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                p.add_term(a1.add(a2), b1.add(b2), c1.times(c2));
            }
        }
        Ok(p)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Polarized value `Σ c · z^a · conj(w)^b`.
    pub fn eval(&self, z: &[F], w: &[F]) -> Result<F> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, w.len())?;
        let wbar: Vec<F> = w.iter().map(Field::conj).collect();
        let mut acc = F::zero();
        for ((a, b), c) in &self.terms {
            acc = acc.plus(&c.times(&a.eval(z)).times(&b.eval(&wbar)));
        }
        Ok(acc)
    }

    /// Value on the diagonal `w = z`.
    pub fn eval_diag(&self, z: &[F]) -> Result<F> {
        self.eval(z, z)
    }

    /// Floating evaluation regardless of the coefficient field.
    pub fn eval_c64(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, w.len())?;
        let wbar: Vec<C64> = w.iter().map(|c| c.conj()).collect();
        Ok(self
            .terms
            .iter()
            .map(|((a, b), c)| c.to_c64() * a.eval_c64(z) * b.eval_c64(&wbar))
            .sum())
    }

    /// Holomorphic value `Σ c · z^a` (antiholomorphic indices must be absent).
    pub fn eval_holomorphic_c64(&self, z: &[C64]) -> Result<C64> {
        let zero = vec![C64::new(0.0, 0.0); self.dim];
        if !self.is_holomorphic() {
            return Err(Error::Unsupported("polynomial has antiholomorphic terms".into()));
        }
        self.eval_c64(z, &zero)
    }

    /// `∂/∂z_i`
    pub fn d_holo(&self, i: usize) -> Self {
        let mut p = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            let e = a.entries()[i];
            if e == 0 {
                continue;
            }
            let mut a2 = a.0.clone();
            a2[i] -= 1;
            p.add_term(MultiIndex(a2), b.clone(), c.times(&F::from_i64(e as i64)));
        }
        p
    }

    /// `∂/∂z̄_j`
    pub fn d_anti(&self, j: usize) -> Self {
        self.conj_swap().d_holo(j).conj_swap()
    }

    /// Substitutes `z ↦ M z` (and correspondingly `z̄ ↦ conj(M) z̄`), so the
    /// result is `p ∘ M`.
    pub fn compose_linear(&self, m: &[Vec<F>]) -> Result<Self> {
        check_dim(self.dim, m.len())?;
        let images: Vec<Self> = (0..self.dim)
            .map(|i| {
                let mut p = Self::zero(self.dim);
                for (j, mij) in m[i].iter().enumerate() {
                    p.add_term(MultiIndex::unit(self.dim, j), MultiIndex::zero(self.dim), mij.clone());
                }
                p
            })
            .collect();
        self.compose(&images)
    }

    /// Substitutes `z_i ↦ subs[i]` and `z̄_i ↦ conj_swap(subs[i])`.
    ///
    /// The substituted polynomials may live in a different dimension.
    pub fn compose(&self, subs: &[Self]) -> Result<Self> {
        check_dim(self.dim, subs.len())?;
        let target = subs.first().map(|s| s.dim).unwrap_or(0);
        for s in subs {
            check_dim(target, s.dim)?;
        }
        let conj_subs: Vec<Self> = subs.iter().map(|s| s.conj_swap()).collect();
        // cache powers per variable
        let mut hol_pows: Vec<Vec<Self>> = vec![vec![Self::one(target)]; self.dim];
        let mut anti_pows: Vec<Vec<Self>> = vec![vec![Self::one(target)]; self.dim];
        let mut out = Self::zero(target);
        for ((a, b), c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for i in 0..self.dim {
                let (ea, eb) = (a.0[i] as usize, b.0[i] as usize);
                while hol_pows[i].len() <= ea {
                    let next = hol_pows[i].last().unwrap() * &subs[i];
                    hol_pows[i].push(next);
                }
                while anti_pows[i].len() <= eb {
                    let next = anti_pows[i].last().unwrap() * &conj_subs[i];
                    anti_pows[i].push(next);
                }
                if ea > 0 {
                    term = &term * &hol_pows[i][ea];
                }
                if eb > 0 {
                    term = &term * &anti_pows[i][eb];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl<F: Field> Add for &HermitianPolynomial<F> {
    type Output = HermitianPolynomial<F>;
    fn add(self, o: Self) -> HermitianPolynomial<F> {
        self.try_add(o).expect("polynomial dimension mismatch")
    }
}

impl<F: Field> Sub for &HermitianPolynomial<F> {
    type Output = HermitianPolynomial<F>;
    fn sub(self, o: Self) -> HermitianPolynomial<F> {
        self.try_sub(o).expect("polynomial dimension mismatch")
    }
}

impl<F: Field> Mul for &HermitianPolynomial<F> {
    type Output = HermitianPolynomial<F>;
    fn mul(self, o: Self) -> HermitianPolynomial<F> {
        self.try_mul(o).expect("polynomial dimension mismatch")
    }
}

impl<F: Field> Neg for &HermitianPolynomial<F> {
    type Output = HermitianPolynomial<F>;
    fn neg(self) -> HermitianPolynomial<F> {
        self.scale(&F::one().negate())
    }
}

impl<F: Field> Add for HermitianPolynomial<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<F: Field> Sub for HermitianPolynomial<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<F: Field> Mul for HermitianPolynomial<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, a: &MultiIndex, b: &MultiIndex) -> fmt::Result {
    let mut first = true;
    for (idx, sym) in [(a, "z"), (b, "zb")] {
        for (i, &e) in idx.entries().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                1 => write!(f, "{sym}{}", i + 1)?,
                _ => write!(f, "{sym}{}^{e}", i + 1)?,
            }
        }
    }
    Ok(())
}

/// Terms as `(c)*z1^2*zb1`, constant terms as `(c)`, unit coefficients omitted.
impl<F: Field + fmt::Display> fmt::Display for HermitianPolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let constant = a.is_zero() && b.is_zero();
            if constant {
                write!(f, "({c})")?;
            } else if *c == F::one() {
                fmt_monomial(f, a, b)?;
            } else {
                write!(f, "({c})*")?;
                fmt_monomial(f, a, b)?;
            }
        }
        Ok(())
    }
}

/// Coefficients that round-trip through the `{dim, terms: [[a, b, re, im]]}`
/// record.
pub trait JsonCoefficient: Field {
    fn to_json_parts(&self) -> (Value, Value);
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self>;
}

fn json_to_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => parse_rational(s).map(|q| super::rational::rational_to_f64(&q)),
        other => Err(Error::Parse(format!("expected number, got {other}"))),
    }
}

impl JsonCoefficient for C64 {
    fn to_json_parts(&self) -> (Value, Value) {
        (json!(self.re), json!(self.im))
    }
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self> {
        Ok(C64::new(json_to_f64(re)?, json_to_f64(im)?))
    }
}

impl JsonCoefficient for GaussianRational {
    fn to_json_parts(&self) -> (Value, Value) {
        (json!(self.re.to_string()), json!(self.im.to_string()))
    }
    fn from_json_parts(re: &Value, im: &Value) -> Result<Self> {
        let part = |v: &Value| -> Result<num_rational::BigRational> {
            match v {
                Value::String(s) => parse_rational(s),
                Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::Parse(format!("expected rational, got {other}"))),
            }
        };
        Ok(GaussianRational::new(part(re)?, part(im)?))
    }
}

impl<F: JsonCoefficient> HermitianPolynomial<F> {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((a, b), c)| {
                let (re, im) = c.to_json_parts();
                json!([a.entries(), b.entries(), re, im])
            })
            .collect();
        json!({ "dim": self.dim, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing `dim`".into()))? as usize;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing `terms`".into()))?;
        let index = |v: &Value| -> Result<MultiIndex> {
            let arr = v.as_array().ok_or_else(|| Error::Parse("index must be an array".into()))?;
            let entries = arr
                .iter()
                .map(|e| {
                    e.as_u64()
                        .map(|x| x as u32)
                        .ok_or_else(|| Error::Parse("exponents must be nonnegative integers".into()))
                })
                .collect::<Result<Vec<u32>>>()?;
            Ok(MultiIndex::new(entries))
        };
        let mut p = Self::zero(dim);
        for t in terms {
            let t = t
                .as_array()
                .filter(|t| t.len() == 4)
                .ok_or_else(|| Error::Parse("term must be [a, b, re, im]".into()))?;
            let (a, b) = (index(&t[0])?, index(&t[1])?);
            check_dim(dim, a.len())?;
            check_dim(dim, b.len())?;
            p.add_term(a, b, F::from_json_parts(&t[2], &t[3])?);
        }
        Ok(p)
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// Maximum of `|P(x_i, y_i)|` over real samples for a candidate relation
/// `P(x, y)` in `n + 1` variables (the last one is `y`).
pub fn minimal_poly_check<F: Field>(samples: &[(Vec<f64>, f64)], candidate: &HermitianPolynomial<F>) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if candidate.is_zero() {
        return Err(Error::ZeroCandidate);
    }
    let p = candidate.to_c64();
    let mut worst: f64 = 0.0;
    for (x, y) in samples {
        let pt: Vec<C64> = x.iter().chain(std::iter::once(y)).map(|&v| C64::new(v, 0.0)).collect();
        worst = worst.max(p.eval_c64(&pt, &pt)?.norm());
    }
    Ok(worst)
}

/// Convenience: the exact weight `h(z) = Π (1 + |z_i|²)`.
pub fn product_weight(dim: usize) -> ExactPolynomial {
    (0..dim).fold(ExactPolynomial::one(dim), |acc, i| {
        &acc * &(&ExactPolynomial::one(dim) + &ExactPolynomial::abs_sq(dim, i))
    })
}
