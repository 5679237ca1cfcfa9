//! Hartogs domains `{|λ|² h(z) < 1}` and the domain
//! `Ω = {|λ|²(1 + |z_1|²)(1 + |z_2|²) < 1}`.
//!
//! Points of `Ω` are written `(z_1, z_2, λ)`. Norms use the measure
//! `Π i dζ∧dζ̄ = 2³ dV`, so `‖λ‖²_Ω = (2π)³/2`. The space splits by the power
//! of `λ` into `A²_m`, whose reproducing kernel is
//! `K_m = (m+1)m²/(2π)³ · (λτ̄)^m ((1 + z_1w̄_1)(1 + z_2w̄_2))^{m−1}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::linalg::solve;
use crate::complex::rational::{binomial, factorial, int, rat};
use crate::complex::{ExactPolynomial, Field, GaussianRational, HermitianPolynomial, MultiIndex, PiScaled, QPoly, C64, FLOAT_ZERO_TOL};
use crate::error::{check_dim, Error, Result};

/// `(2π)³`
pub const TWO_PI_CUBED: f64 = 8.0 * PI * PI * PI;

/// Default truncation of [`kernel_series`].
pub const DEFAULT_SERIES_TERMS: usize = 300;

/// Default Gauss–Legendre nodes per axis for weighted norms.
pub const DEFAULT_QUADRATURE_NODES: usize = 256;

/// `∫₀^∞ r^p (1 + r)^{−q} dr = (q − p − 2)! p! / (q − 1)!` for `q ≥ p + 2`.
pub fn factorial_moment(p: u64, q: i64) -> Result<BigRational> {
    if q < p as i64 + 2 {
        return Err(Error::Divergent(format!("r^{p} (1+r)^-{q} is not integrable on [0, inf)")));
    }
    let q = q as u64;
    Ok(BigRational::new(factorial(q - p - 2) * factorial(p), factorial(q - 1)))
}

/// Squared norm, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormValue {
    Finite(PiScaled),
    Infinite,
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Finite(v) => v.to_c64().re,
            NormValue::Infinite => f64::INFINITY,
        }
    }

    /// Rational factor of `(2π)³`, when finite.
    pub fn over_two_pi_cubed(&self) -> Option<BigRational> {
        match self {
            NormValue::Finite(v) => Some(&v.coeff.re / int(8)),
            NormValue::Infinite => None,
        }
    }
}

/// `‖λ^m z^α‖²_Ω = (2π)³/(m+1) · (m−α_1−1)!(m−α_2−1)! α_1! α_2! / (m!)²`
/// when `α_1, α_2 ≤ m − 1`, and `+∞` otherwise.
pub fn monomial_norm(m: u32, alpha: &MultiIndex) -> Result<NormValue> {
    check_dim(2, alpha.len())?;
    let q = m as i64 + 1;
    let mut r = rat(1, m as i64 + 1);
    for &a in alpha.entries() {
        match factorial_moment(a as u64, q) {
            Ok(v) => r *= v,
            Err(_) => return Ok(NormValue::Infinite),
        }
    }
    Ok(NormValue::Finite(PiScaled::rational(r * int(8), 3)))
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n from the Tricomi initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Weighted norm `‖λ^m z^α‖²` with a Reinhardt weight `h(|z_1|², …)` given as a
/// polynomial in `(z, z̄)` whose terms all have equal holomorphic and
/// antiholomorphic indices.
#[derive(Clone, Debug)]
pub struct HartogsDomainSpec {
    weight: HermitianPolynomial<C64>,
    omega_standard: bool,
}

/// Quadrature value with a node-halving error proxy.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

impl HartogsDomainSpec {
    pub fn new(weight: HermitianPolynomial<C64>) -> Result<Self> {
        if weight.terms().any(|(a, b, c)| a != b || c.im.abs() > FLOAT_ZERO_TOL) {
            return Err(Error::Unsupported("weight must be a real polynomial in |z_i|^2".into()));
        }
        let omega_standard = weight == crate::complex::product_weight(weight.dim()).to_c64() && weight.dim() == 2;
        Ok(Self { weight, omega_standard })
    }

    /// `h(z) = (1 + |z_1|²)(1 + |z_2|²)`
    pub fn omega() -> Self {
        Self::new(crate::complex::product_weight(2).to_c64()).expect("product weight is radial")
    }

    pub fn base_dim(&self) -> usize {
        self.weight.dim()
    }

    pub fn is_omega_standard(&self) -> bool {
        self.omega_standard
    }

    pub fn weight(&self) -> &HermitianPolynomial<C64> {
        &self.weight
    }

    /// `h` at `|z_i|² = r_i`.
    pub fn weight_radial(&self, r: &[f64]) -> f64 {
        self.weight
            .terms()
            .map(|(a, _, c)| c.re * a.entries().iter().zip(r).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    /// `2π/(m+1) · (2π)^{n_z} ∫_{[0,∞)^{n_z}} r^α h(r)^{−(m+1)} dr` by tensor
    /// Gauss–Legendre quadrature after `r = u/(1 − u)`.
    pub fn norm_numeric(&self, m: u32, alpha: &MultiIndex, nodes: usize) -> Result<QuadratureEstimate> {
        check_dim(self.base_dim(), alpha.len())?;
        let full = self.tensor_integral(m, alpha, nodes);
        let half = self.tensor_integral(m, alpha, nodes / 2);
        let scale = 2.0 * PI / (m as f64 + 1.0) * (2.0 * PI).powi(self.base_dim() as i32);
        Ok(QuadratureEstimate { value: scale * full, error_estimate: scale * (full - half).abs() })
    }

    fn tensor_integral(&self, m: u32, alpha: &MultiIndex, nodes: usize) -> f64 {
        let gl = gauss_legendre(nodes.max(1));
        let n = self.base_dim();
        let mut idx = vec![0usize; n];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            let mut r = vec![0.0; n];
            let mut mono = 1.0;
            for k in 0..n {
                let (u, wk) = gl[idx[k]];
                r[k] = u / (1.0 - u);
                w *= wk / ((1.0 - u) * (1.0 - u));
                mono *= r[k].powi(alpha.entries()[k] as i32);
            }
            total += w * mono * self.weight_radial(&r).powi(-(m as i32 + 1));
            // odometer
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < gl.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        total
    }
}

/// Table of `‖λ^m z^α‖²_Ω`, exact and numeric.
#[derive(Clone, Debug, Default)]
pub struct MomentTable {
    entries: BTreeMap<(u32, Vec<u32>), (NormValue, f64)>,
}

impl MomentTable {
    /// All `m ≤ max_m` and `α_i ≤ max_alpha`.
    pub fn build(max_m: u32, max_alpha: u32) -> Self {
        let mut entries = BTreeMap::new();
        for m in 0..=max_m {
            for a1 in 0..=max_alpha {
                for a2 in 0..=max_alpha {
                    let v = monomial_norm(m, &MultiIndex::new(vec![a1, a2])).expect("two-dimensional index");
                    let f = v.to_f64();
                    entries.insert((m, vec![a1, a2]), (v, f));
                }
            }
        }
        Self { entries }
    }

    pub fn get(&self, m: u32, alpha: &MultiIndex) -> Option<&(NormValue, f64)> {
        self.entries.get(&(m, alpha.entries().to_vec()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u32], &NormValue, f64)> {
        self.entries.iter().map(|((m, a), (v, f))| (*m, a.as_slice(), v, *f))
    }
}

/// A point `(z_1, z_2, λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaPoint {
    pub z: [C64; 2],
    pub lambda: C64,
}

impl OmegaPoint {
    pub fn new(z1: C64, z2: C64, lambda: C64) -> Self {
        Self { z: [z1, z2], lambda }
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        check_dim(3, v.len())?;
        Ok(Self::new(v[0], v[1], v[2]))
    }

    pub fn to_vec(&self) -> Vec<C64> {
        vec![self.z[0], self.z[1], self.lambda]
    }

    /// `(1 + |z_1|²)(1 + |z_2|²)`
    pub fn weight(&self) -> f64 {
        (1.0 + self.z[0].norm_sqr()) * (1.0 + self.z[1].norm_sqr())
    }

    /// `|λ|² h(z) − 1`
    pub fn rho(&self) -> f64 {
        self.lambda.norm_sqr() * self.weight() - 1.0
    }

    pub fn in_omega(&self) -> bool {
        self.rho() < 0.0
    }
}

/// `ρ(z, λ, w̄, τ̄) = λτ̄(1 + z_1w̄_1)(1 + z_2w̄_2) − 1`
pub fn complexified_rho(p: &OmegaPoint, q: &OmegaPoint) -> C64 {
    p.lambda * q.lambda.conj() * (1.0 + p.z[0] * q.z[0].conj()) * (1.0 + p.z[1] * q.z[1].conj()) - 1.0
}

/// Partial sum of the `A²_m` kernels with a geometric tail bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeriesValue {
    pub re: f64,
    pub im: f64,
    pub terms: usize,
    /// Bound on `|Σ_{m > M} K_m|`; infinite if the bound is unavailable.
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// `Σ_{m=1}^{M} (m+1)m²/(2π)³ (λτ̄)^m ((1 + z_1w̄_1)(1 + z_2w̄_2))^{m−1}`.
pub fn kernel_series(p: &OmegaPoint, q: &OmegaPoint, terms: usize) -> Result<SeriesValue> {
    let lt = p.lambda * q.lambda.conj();
    let ab = (1.0 + p.z[0] * q.z[0].conj()) * (1.0 + p.z[1] * q.z[1].conj());
    let ratio = lt.norm() * ab.norm();
    if ratio >= 1.0 {
        return Err(Error::NonConvergent(ratio));
    }
    let x = lt * ab;
    let mut t = 2.0 * lt / TWO_PI_CUBED;
    let mut acc = C64::new(0.0, 0.0);
    for m in 1..=terms {
        acc += t;
        let mf = m as f64;
        t *= (mf + 2.0) * (mf + 1.0) / (mf * mf) * x;
    }
    // t now holds term M+1; successive ratios are at most (k+2)(k+1)/k² · ratio
    let k = terms as f64 + 1.0;
    let r = (k + 2.0) * (k + 1.0) / (k * k) * ratio;
    let tail_bound = if lt == C64::new(0.0, 0.0) {
        0.0
    } else if r < 1.0 {
        t.norm() / (1.0 - r)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue { re: acc.re, im: acc.im, terms, tail_bound })
}

/// Coefficients `a_j` with `p(m) = Σ_j a_j C(m + j, j)`, so that
/// `Σ_m p(m) x^m = Σ_j a_j (1 − x)^{−(j+1)}`.
pub fn resum_polynomial_series(p: &QPoly) -> Vec<BigRational> {
    let Some(d) = p.degree() else { return Vec::new() };
    let to_g = |q: BigRational| GaussianRational::real(q);
    let rows: Vec<Vec<GaussianRational>> = (0..=d as u64)
        .map(|m| (0..=d as u64).map(|j| to_g(BigRational::from_integer(binomial(m + j, j)))).collect())
        .collect();
    let rhs: Vec<GaussianRational> = (0..=d as i64).map(|m| to_g(p.eval(&int(m)))).collect();
    solve(&rows, &rhs)
        .expect("binomial basis matrix is invertible")
        .into_iter()
        .map(|g| g.re)
        .collect()
}

/// `C(m + j, j)` as a polynomial in `m`.
pub fn binomial_basis(j: usize) -> QPoly {
    (1..=j as i64).fold(QPoly::one(), |acc, i| acc.mul(&QPoly::new(vec![rat(i, i), rat(1, i)])))
}

/// `p(m) − Σ_j a_j C(m + j, j)` as a polynomial in `m`.
pub fn resummation_remainder(p: &QPoly, a: &[BigRational]) -> QPoly {
    a.iter()
        .enumerate()
        .fold(p.clone(), |acc, (j, aj)| acc.sub(&binomial_basis(j).scale(aj)))
}

/// `K*(z, λ, w̄, τ̄) = (1/(2π)³)(4λτ̄/ρ³ + 6λτ̄/ρ⁴)`
pub fn omega_closed_kernel(p: &OmegaPoint, q: &OmegaPoint) -> Result<C64> {
    let rho = complexified_rho(p, q);
    if rho.norm() <= FLOAT_ZERO_TOL {
        return Err(Error::SingularKernel(format!("rho = {rho}")));
    }
    let lt = p.lambda * q.lambda.conj();
    Ok((4.0 * lt / rho.powi(3) + 6.0 * lt / rho.powi(4)) / TWO_PI_CUBED)
}

/// Exact closed form for Gaussian-rational points `[z_1, z_2, λ]`.
pub fn omega_closed_kernel_exact(p: &[GaussianRational], q: &[GaussianRational]) -> Result<PiScaled> {
    let k = omega_rational_kernel();
    let (num, den) = (k.numerator.eval(p, q)?, k.denominator.eval(p, q)?);
    let inv = den.inverse().ok_or_else(|| Error::SingularKernel("rho = 0".into()))?;
    Ok(PiScaled::new(num.times(&inv), k.pi_power))
}

/// `numerator / denominator · π^{pi_power}` with polarized polynomial parts.
#[derive(Clone, Debug)]
pub struct RationalKernel {
    pub numerator: ExactPolynomial,
    pub denominator: ExactPolynomial,
    pub pi_power: i32,
}

impl RationalKernel {
    pub fn eval(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        let d = self.denominator.eval_c64(z, w)?;
        if d.norm() <= FLOAT_ZERO_TOL {
            return Err(Error::SingularKernel("denominator vanishes".into()));
        }
        Ok(self.numerator.eval_c64(z, w)? / d * PI.powi(self.pi_power))
    }

    /// Swap-and-conjugate symmetry of both parts.
    pub fn is_hermitian(&self) -> bool {
        self.numerator.conj_swap() == self.numerator && self.denominator.conj_swap() == self.denominator
    }
}

/// `ρ = |λ|²(1 + |z_1|²)(1 + |z_2|²) − 1` in variables `(z_1, z_2, λ)`.
pub fn omega_defining_function() -> ExactPolynomial {
    let one = ExactPolynomial::one(3);
    let h = &(&one + &ExactPolynomial::abs_sq(3, 0)) * &(&one + &ExactPolynomial::abs_sq(3, 1));
    &(&ExactPolynomial::abs_sq(3, 2) * &h) - &one
}

/// `K* = λλ̄(4ρ + 6) / (8 ρ⁴) · π^{−3}` in polarized form.
pub fn omega_rational_kernel() -> RationalKernel {
    let rho = omega_defining_function();
    let lam = ExactPolynomial::abs_sq(3, 2);
    let g = |v: i64| GaussianRational::from_ints(v, 0);
    let numerator = (&lam * &(&rho.scale(&g(4)) + &ExactPolynomial::constant(3, g(6)))).scale(&GaussianRational::real(rat(1, 8)));
    RationalKernel { numerator, denominator: rho.pow(4), pi_power: -3 }
}

/// `F(λ, z_1, z_2) = (λ, λz_1, λz_2, λz_1z_2)`
pub fn embed_f<F: Field>(lambda: &F, z1: &F, z2: &F) -> [F; 4] {
    let a = lambda.times(z1);
    [lambda.clone(), a.clone(), lambda.times(z2), a.times(z2)]
}

/// `F` as polynomials in `(λ, z_1, z_2)`.
pub fn embed_f_polynomials() -> Vec<ExactPolynomial> {
    let m = |e: [u32; 3]| ExactPolynomial::holomorphic_monomial(MultiIndex::new(e.to_vec()), GaussianRational::one());
    vec![m([1, 0, 0]), m([1, 1, 0]), m([1, 0, 1]), m([1, 1, 1])]
}

/// `ρ_U = |w_1|⁴ + |w_1|²(|w_2|² + |w_3|²) + |w_2w_3|² − |w_1|²`
pub fn u_defining_function() -> ExactPolynomial {
    let a = |i| ExactPolynomial::abs_sq(3, i);
    let quartic = &a(0) * &a(0);
    let mixed = &a(0) * &(&a(1) + &a(2));
    &(&(&quartic + &mixed) + &(&a(1) * &a(2))) - &a(0)
}

/// `ρ_U` at a floating point.
pub fn u_rho(x: &[C64]) -> f64 {
    let (a, b, c) = (x[0].norm_sqr(), x[1].norm_sqr(), x[2].norm_sqr());
    a * a + a * (b + c) + b * c - a
}

/// `Φ^{-1}(x) = (x_2/x_1, x_3/x_1, x_1)` as a point `(z_1, z_2, λ)` of `Ω`.
pub fn u_chart_inverse(x: &[C64]) -> Result<OmegaPoint> {
    check_dim(3, x.len())?;
    if x[0].norm() <= FLOAT_ZERO_TOL {
        return Err(Error::ChartSingular(format!("first coordinate {} vanishes", x[0])));
    }
    Ok(OmegaPoint::new(x[1] / x[0], x[2] / x[0], x[0]))
}

/// `Φ(z_1, z_2, λ) = (λ, λz_1, λz_2)`
pub fn u_chart(p: &OmegaPoint) -> [C64; 3] {
    [p.lambda, p.lambda * p.z[0], p.lambda * p.z[1]]
}

/// Kernel of `U = π(F(Ω))`: `K_Ω(Φ⁻¹x, Φ⁻¹y) / (x_1² conj(y_1)²)`.
pub fn u_kernel(x: &[C64], y: &[C64]) -> Result<C64> {
    let p = u_chart_inverse(x)?;
    let q = u_chart_inverse(y)?;
    for (v, pt) in [(x, &p), (y, &q)] {
        if !pt.in_omega() {
            return Err(Error::OutsideDomain(format!("{v:?} is not in U")));
        }
    }
    Ok(omega_closed_kernel(&p, &q)? / (x[0] * x[0] * (y[0] * y[0]).conj()))
}

/// Diagonal relation `(2π)³ρ⁴K − |λ|²(4ρ + 6)` on `Ω` in `(z_1, z_2, λ)`,
/// as coefficients of `K⁰` and `K¹` (over `π³`-free rationals times `8π³`).
pub fn omega_diagonal_relation() -> [ExactPolynomial; 2] {
    let rho = omega_defining_function();
    let lam = ExactPolynomial::abs_sq(3, 2);
    let g = |v: i64| GaussianRational::from_ints(v, 0);
    let a0 = (&lam * &(&rho.scale(&g(4)) + &ExactPolynomial::constant(3, g(6)))).scale(&g(-1));
    [a0, rho.pow(4)]
}

/// Diagonal relation on `U`: `(2π)³ρ_U⁴K − |x_1|⁴(4ρ_U + 6|x_1|²)`.
pub fn u_diagonal_relation() -> [ExactPolynomial; 2] {
    let rho = u_defining_function();
    let a = ExactPolynomial::abs_sq(3, 0);
    let g = |v: i64| GaussianRational::from_ints(v, 0);
    let inner = &rho.scale(&g(4)) + &a.scale(&g(6));
    let a0 = (&(&a * &a) * &inner).scale(&g(-1));
    [a0, rho.pow(4)]
}

/// Zero helper for callers building exact points.
pub fn exact_zero() -> GaussianRational {
    GaussianRational::real(BigRational::zero())
}

/// One helper for callers building exact points.
pub fn exact_one() -> GaussianRational {
    GaussianRational::real(BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rational::rational_to_f64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn idx(a: u32, b: u32) -> MultiIndex {
        MultiIndex::new(vec![a, b])
    }

    #[test]
    fn factorial_moment_examples() {
        assert_eq!(factorial_moment(0, 2).unwrap(), int(1));
        assert_eq!(factorial_moment(1, 4).unwrap(), rat(1, 6));
        assert!(matches!(factorial_moment(2, 3), Err(Error::Divergent(_))));
    }

    #[test]
    fn factorial_moment_matches_quadrature() {
        let gl = gauss_legendre(64);
        for (p, q) in [(0u64, 2i64), (1, 4), (2, 5), (3, 9)] {
            let v: f64 = gl
                .iter()
                .map(|&(u, w)| {
                    let r = u / (1.0 - u);
                    w * r.powi(p as i32) * (1.0 + r).powi(-(q as i32)) / ((1.0 - u) * (1.0 - u))
                })
                .sum();
            let exact = rational_to_f64(&factorial_moment(p, q).unwrap());
            assert!((v - exact).abs() < 1e-12 * exact, "p={p} q={q}: {v} vs {exact}");
        }
    }

    #[test]
    fn monomial_norm_examples() {
        assert_eq!(monomial_norm(1, &idx(0, 0)).unwrap().over_two_pi_cubed().unwrap(), rat(1, 2));
        assert_eq!(monomial_norm(1, &idx(1, 0)).unwrap(), NormValue::Infinite);
        assert_eq!(monomial_norm(2, &idx(1, 1)).unwrap().over_two_pi_cubed().unwrap(), rat(1, 12));
        assert_eq!(monomial_norm(3, &idx(2, 0)).unwrap().over_two_pi_cubed().unwrap(), rat(1, 36));
        assert_eq!(monomial_norm(0, &idx(0, 0)).unwrap(), NormValue::Infinite);
    }

    #[test]
    fn monomial_norm_matches_double_quadrature() {
        let spec = HartogsDomainSpec::omega();
        assert!(spec.is_omega_standard());
        for (m, a) in [(2, idx(1, 1)), (1, idx(0, 0)), (4, idx(2, 1))] {
            let exact = monomial_norm(m, &a).unwrap().to_f64();
            let q = spec.norm_numeric(m, &a, DEFAULT_QUADRATURE_NODES).unwrap();
            assert!((q.value - exact).abs() <= 1e-6 * exact, "{q:?} vs {exact}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(5);
        let s: f64 = gl.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-15);
        assert!((gl.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moment_table_is_symmetric() {
        let t = MomentTable::build(5, 5);
        assert_eq!(t.len(), 6 * 36);
        for (m, a, v, f) in t.iter() {
            let (w, g) = t.get(m, &idx(a[1], a[0])).unwrap();
            assert_eq!(v, w);
            assert!(f == *g);
            assert!(f > 0.0);
        }
    }

    #[test]
    fn series_at_lambda_zero_is_zero() {
        let p = OmegaPoint::new(c(0.3, 0.1), c(-0.2, 0.0), c(0.0, 0.0));
        let s = kernel_series(&p, &p, 50).unwrap();
        assert_eq!(s.value(), c(0.0, 0.0));
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn series_matches_closed_form_at_half() {
        let p = OmegaPoint::new(c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        let s = kernel_series(&p, &p, DEFAULT_SERIES_TERMS).unwrap().value();
        let k = omega_closed_kernel(&p, &p).unwrap();
        let by_hand = (4.0 * 0.25 / (-0.75f64).powi(3) + 6.0 * 0.25 / (0.75f64).powi(4)) / TWO_PI_CUBED;
        assert!((k.re - by_hand).abs() < 1e-15 * by_hand);
        assert!((s - k).norm() < 1e-10 * k.norm());
    }

    #[test]
    fn series_rejects_divergent_configuration() {
        let p = OmegaPoint::new(c(1.0, 0.0), c(1.0, 0.0), c(0.6, 0.0));
        assert!(matches!(kernel_series(&p, &p, 10), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn resummation_examples() {
        let p = QPoly::from_ints(&[2, 5, 4, 1]); // (m+2)(m+1)^2
        let a = resum_polynomial_series(&p);
        assert_eq!(a, vec![int(0), int(0), int(-4), int(6)]);
        assert!(resummation_remainder(&p, &a).is_zero());
        assert_eq!(resum_polynomial_series(&QPoly::one()), vec![int(1)]);
        assert_eq!(resum_polynomial_series(&QPoly::from_ints(&[1, 1])), vec![int(0), int(1)]);
    }

    #[test]
    fn rational_kernel_agrees_with_closed_form() {
        let k = omega_rational_kernel();
        assert!(k.is_hermitian());
        let p = OmegaPoint::new(c(0.2, 0.1), c(-0.3, 0.2), c(0.4, -0.1));
        let q = OmegaPoint::new(c(0.1, -0.4), c(0.2, 0.0), c(0.3, 0.3));
        let a = k.eval(&p.to_vec(), &q.to_vec()).unwrap();
        let b = omega_closed_kernel(&p, &q).unwrap();
        assert!((a - b).norm() < 1e-13 * b.norm());
    }

    #[test]
    fn exact_closed_form_at_half() {
        let h = GaussianRational::real(rat(1, 2));
        let p = [exact_zero(), exact_zero(), h];
        let v = omega_closed_kernel_exact(&p, &p).unwrap();
        // (1/8)(4·(1/4)/(-3/4)^3 + 6·(1/4)/(3/4)^4) = (1/8)(-64/27 + 128/27) = 8/27
        assert_eq!(v.coeff, GaussianRational::real(rat(8, 27)));
        assert_eq!(v.pi_power, -3);
    }

    #[test]
    fn embedding_lands_on_segre_quadric() {
        let g = |a: i64, b: i64| GaussianRational::new(rat(a, 7), rat(b, 5));
        let w = embed_f(&g(1, 2), &g(-3, 1), &g(4, -2));
        assert!(w[0].times(&w[3]).minus(&w[1].times(&w[2])).is_zero());
        let o = embed_f(&exact_zero(), &g(2, 1), &g(1, 1));
        assert!(o.iter().all(|x| x.is_zero()));
        let b = embed_f(&c(0.5, 0.0), &c(1.0, 0.0), &c(1.0, 0.0));
        assert!((b.iter().map(|x| x.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn u_kernel_examples() {
        let x = [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let p = OmegaPoint::new(c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        let expected = omega_closed_kernel(&p, &p).unwrap() / 0.5f64.powi(4);
        assert!((u_kernel(&x, &x).unwrap() - expected).norm() < 1e-14 * expected.norm());
        assert!(matches!(u_kernel(&[c(0.0, 0.0), c(0.1, 0.0), c(0.0, 0.0)], &x), Err(Error::ChartSingular(_))));
        assert!(u_kernel(&[c(0.9, 0.0), c(0.9, 0.0), c(0.0, 0.0)], &x).is_err());
    }

    #[test]
    fn u_defining_function_vanishes_at_boundary_points() {
        let r = u_defining_function();
        let g = |v: i64| GaussianRational::from_ints(v, 0);
        assert!(r.eval_diag(&[g(1), g(0), g(0)]).unwrap().is_zero());
        assert!(r.eval_diag(&[g(0), g(1), g(0)]).unwrap().is_zero());
        assert!(r.is_real_valued());
    }

    #[test]
    fn diagonal_relations_vanish() {
        let [a0, a1] = omega_diagonal_relation();
        let p = OmegaPoint::new(c(0.3, -0.2), c(0.5, 0.1), c(0.4, 0.2));
        let k = omega_closed_kernel(&p, &p).unwrap().re * TWO_PI_CUBED;
        let v = a0.eval_c64(&p.to_vec(), &p.to_vec()).unwrap() + a1.eval_c64(&p.to_vec(), &p.to_vec()).unwrap() * k;
        assert!(v.norm() < 1e-13);

        let [b0, b1] = u_diagonal_relation();
        let x = u_chart(&p);
        let ku = u_kernel(&x, &x).unwrap().re * TWO_PI_CUBED;
        let v = b0.eval_c64(&x, &x).unwrap() + b1.eval_c64(&x, &x).unwrap() * ku;
        assert!(v.norm() < 1e-12, "{v}");
    }

    fn omega_point(max_rho: f64) -> impl Strategy<Value = OmegaPoint> {
        (0.0f64..1.0, 0.0f64..6.3, 0.0f64..1.0, 0.0f64..6.3, 0.0f64..1.0, 0.0f64..6.3).prop_map(
            move |(r1, t1, r2, t2, s, t3)| {
                let z1 = C64::from_polar(r1, t1);
                let z2 = C64::from_polar(r2, t2);
                let h = (1.0 + r1 * r1) * (1.0 + r2 * r2);
                let lam = C64::from_polar((s * max_rho / h).sqrt(), t3);
                OmegaPoint::new(z1, z2, lam)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_form_is_hermitian(p in omega_point(0.9), q in omega_point(0.9)) {
            let a = omega_closed_kernel(&p, &q).unwrap();
            let b = omega_closed_kernel(&q, &p).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-12));
        }

        #[test]
        fn closed_form_positive_on_diagonal(p in omega_point(0.99)) {
            prop_assume!(p.lambda.norm() > 1e-6);
            let k = omega_closed_kernel(&p, &p).unwrap();
            prop_assert!(k.re > 0.0 && k.im.abs() <= 1e-12 * k.re);
        }

        #[test]
        fn u_kernel_hermitian_and_positive(p in omega_point(0.9), q in omega_point(0.9)) {
            prop_assume!(p.lambda.norm() > 1e-3 && q.lambda.norm() > 1e-3);
            let (x, y) = (u_chart(&p), u_chart(&q));
            let a = u_kernel(&x, &y).unwrap();
            let b = u_kernel(&y, &x).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-11 * a.norm().max(1e-12));
            prop_assert!(u_kernel(&x, &x).unwrap().re > 0.0);
        }

        #[test]
        fn doubling_terms_shrinks_error_geometrically(p in omega_point(0.8)) {
            prop_assume!(p.lambda.norm() > 1e-3);
            let k = omega_closed_kernel(&p, &p).unwrap();
            let s1 = kernel_series(&p, &p, 20).unwrap();
            let s2 = kernel_series(&p, &p, 40).unwrap();
            let (e1, e2) = ((s1.value() - k).norm(), (s2.value() - k).norm());
            prop_assert!(e1 <= s1.tail_bound * (1.0 + 1e-9) + 1e-13 * k.norm());
            prop_assert!(e2 <= s2.tail_bound * (1.0 + 1e-9) + 1e-13 * k.norm());
            // predicted reduction over 20 extra terms is at least q^20 up to polynomial factors
            let q = p.lambda.norm_sqr() * p.weight();
            prop_assert!(e2 <= e1 * q.powi(20) * 8.0 + 1e-13 * k.norm());
        }

        #[test]
        fn resummation_is_exact(c0 in -20i64..20, c1 in -20i64..20, c2 in -20i64..20, c3 in -20i64..20) {
            let p = QPoly::from_ints(&[c0, c1, c2, c3]);
            let a = resum_polynomial_series(&p);
            prop_assert!(resummation_remainder(&p, &a).is_zero());
        }
    }
}
