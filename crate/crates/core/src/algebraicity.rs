//! Polynomial relations `Σ_j a_j(z, z̄) K(z, z̄)^j = 0` satisfied by sampled
//! kernels, boundary behavior of the leading coefficient, the annulus kernel
//! used as a non-algebraic control, and recovery of a ball biholomorphism from
//! the logarithmic derivative of its kernel.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::{ball_kernel_constant, ball_kernel_raw, DefiningFunction, BOUNDARY_TOL};
use crate::complex::linalg::least_singular_vector;
use crate::complex::{HermitianPolynomial, MultiIndex, C64, FLOAT_ZERO_TOL};
use crate::error::{check_dim, Error, Result};
use crate::hartogs::{omega_closed_kernel, u_chart, u_kernel, OmegaPoint};

/// Finite-difference step for `∂_{w̄}K`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Coefficient-space monomials for `a_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelationBasis {
    /// `z^a z̄^b` with `|a| + |b| ≤ degree`.
    Hermitian { degree: u32 },
    /// `Π |z_i|^{2e_i}` with `Σ e_i ≤ max_total` and `e_i ≤ max_per_var`.
    Radial { max_total: u32, max_per_var: u32 },
}

impl RelationBasis {
    pub fn monomials(&self, n: usize) -> Vec<(MultiIndex, MultiIndex)> {
        match *self {
            RelationBasis::Hermitian { degree } => {
                let all = MultiIndex::all_up_to_degree(2 * n, degree);
                all.into_iter()
                    .map(|m| {
                        let e = m.entries();
                        (MultiIndex::new(e[..n].to_vec()), MultiIndex::new(e[n..].to_vec()))
                    })
                    .collect()
            }
            RelationBasis::Radial { max_total, max_per_var } => MultiIndex::all_up_to_degree(n, max_total)
                .into_iter()
                .filter(|m| m.entries().iter().all(|&e| e <= max_per_var))
                .map(|m| (m.clone(), m))
                .collect(),
        }
    }
}

/// Fitted relation `Σ_{j=0}^{q} a_j K^j ≈ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicRelation {
    #[serde(skip)]
    pub coefficients: Vec<HermitianPolynomial<C64>>,
    pub k_degree: usize,
    pub basis: RelationBasis,
    /// `max_i |Σ_k v_k Ã_{ik}|` for the unit vector `v` in column-scaled
    /// coordinates.
    pub residual: f64,
    /// Smallest singular value of the scaled evaluation matrix.
    pub sigma_min: f64,
    pub normalization: &'static str,
}

const NORMALIZATION: &str = "unit coefficient vector, largest coefficient real positive";

impl AlgebraicRelation {
    pub fn leading(&self) -> &HermitianPolynomial<C64> {
        &self.coefficients[self.k_degree]
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    /// `Σ_j a_j(z, z̄) K^j`
    pub fn eval(&self, z: &[C64], k: f64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        let mut kp = 1.0;
        for a in &self.coefficients {
            acc += a.eval_c64(z, z)? * kp;
            kp *= k;
        }
        Ok(acc)
    }

    /// Same relation with `a_q` replaced by the constant `1`.
    pub fn with_unit_leading(&self) -> Self {
        let mut r = self.clone();
        r.coefficients[self.k_degree] = HermitianPolynomial::one(self.dim());
        r
    }

    pub fn coefficients_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coefficients.iter().map(|a| a.to_json()).collect())
    }
}

/// Least-squares relation from the smallest singular direction of the
/// column-scaled matrix of `z^a z̄^b K^j`.
pub fn fit_relation(samples: &[(Vec<C64>, f64)], basis: RelationBasis, q: usize) -> Result<AlgebraicRelation> {
    let Some(first) = samples.first() else { return Err(Error::EmptySamples) };
    let n = first.0.len();
    for (z, _) in samples {
        check_dim(n, z.len())?;
    }
    if samples.iter().all(|(_, k)| *k == 0.0) {
        return Err(Error::ZeroSamples);
    }
    let monos = basis.monomials(n);
    let unknowns = monos.len() * (q + 1);
    if samples.len() < 2 * unknowns {
        return Err(Error::Underdetermined { samples: samples.len(), unknowns });
    }
    let rows = samples.len();
    let mut a = DMatrix::<C64>::zeros(rows, unknowns);
    for (i, (z, k)) in samples.iter().enumerate() {
        let zc: Vec<C64> = z.iter().map(|x| x.conj()).collect();
        let vals: Vec<C64> = monos.iter().map(|(p, r)| p.eval_c64(z) * r.eval_c64(&zc)).collect();
        let mut kp = 1.0;
        for j in 0..=q {
            for (l, v) in vals.iter().enumerate() {
                a[(i, j * monos.len() + l)] = v * kp;
            }
            kp *= k;
        }
    }
    let scales: Vec<f64> = (0..unknowns)
        .map(|c| {
            let rms = (a.column(c).iter().map(|x| x.norm_sqr()).sum::<f64>() / rows as f64).sqrt();
            if rms > 0.0 { rms } else { 1.0 }
        })
        .collect();
    for (c, s) in scales.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let (sigma_min, v) = least_singular_vector(&a);
    let residual = (&a * DMatrix::from_column_slice(unknowns, 1, &v)).iter().map(|x| x.norm()).fold(0.0, f64::max);

    let mut raw: Vec<C64> = v.iter().zip(&scales).map(|(x, s)| x / s).collect();
    let norm = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let pivot = raw.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / (pivot.norm() * norm);
    for x in raw.iter_mut() {
        *x *= phase;
    }

    let coefficients: Vec<HermitianPolynomial<C64>> = (0..=q)
        .map(|j| {
            let mut p = HermitianPolynomial::zero(n);
            for (l, (ai, bi)) in monos.iter().enumerate() {
                let c = raw[j * monos.len() + l];
                if c.norm() > 0.0 {
                    p.add_term(ai.clone(), bi.clone(), c);
                }
            }
            p
        })
        .collect();
    Ok(AlgebraicRelation { coefficients, k_degree: q, basis, residual, sigma_min, normalization: NORMALIZATION })
}

/// Smallest fit residual over `1 ≤ q ≤ q_max` and bases from `bases`.
#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub best_residual: f64,
    pub best_q: usize,
    pub best_basis: RelationBasis,
    /// `(q, basis, residual)` for every admissible combination.
    pub tried: Vec<(usize, RelationBasis, f64)>,
}

/// Lowest residual over a grid of relation shapes. Shapes with too few samples
/// are skipped.
pub fn best_relation_search(
    samples: &[(Vec<C64>, f64)],
    q_max: usize,
    bases: &[RelationBasis],
) -> Result<SearchOutcome> {
    let mut tried = Vec::new();
    for q in 1..=q_max {
        for &b in bases {
            match fit_relation(samples, b, q) {
                Ok(r) => tried.push((q, b, r.residual)),
                Err(Error::Underdetermined { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let &(best_q, best_basis, best_residual) = tried
        .iter()
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .ok_or(Error::Underdetermined { samples: samples.len(), unknowns: usize::MAX })?;
    Ok(SearchOutcome { best_residual, best_q, best_basis, tried })
}

/// Result of evaluating `a_q` on boundary points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundaryCheck {
    pub max_abs: f64,
    pub tolerance: f64,
    pub flagged: bool,
}

/// `max |a_q|` over boundary samples; `flagged` when it exceeds `tolerance`.
pub fn boundary_leading_coefficient(
    relation: &AlgebraicRelation,
    rho: &DefiningFunction,
    boundary: &[Vec<C64>],
    tolerance: f64,
) -> Result<BoundaryCheck> {
    let mut max_abs: f64 = 0.0;
    for p in boundary {
        let r = rho.value(p)?;
        if r.abs() > BOUNDARY_TOL {
            return Err(Error::NotOnBoundary(r.abs()));
        }
        max_abs = max_abs.max(relation.leading().eval_c64(p, p)?.norm());
    }
    Ok(BoundaryCheck { max_abs, tolerance, flagged: max_abs > tolerance })
}

/// `‖z^k‖²` on `{r0 < |z| < 1}`; `None` when infinite.
pub fn annulus_norm(r0: f64, k: i64) -> Option<f64> {
    if k == -1 {
        return (r0 > 0.0).then(|| 2.0 * PI * (1.0 / r0).ln());
    }
    if k < -1 && r0 == 0.0 {
        return None;
    }
    Some(PI * (1.0 - r0.powi(2 * k as i32 + 2)) / (k as f64 + 1.0))
}

/// `Σ_{k=−M}^{M} z^k w̄^k / ‖z^k‖²`
pub fn annulus_kernel(r0: f64, z: C64, w: C64, terms: usize) -> Result<C64> {
    if !(0.0..1.0).contains(&r0) {
        return Err(Error::OutsideDomain(format!("inner radius {r0} not in [0, 1)")));
    }
    for p in [z, w] {
        if p.norm() <= r0 || p.norm() >= 1.0 {
            return Err(Error::OutsideDomain(format!("{p} not in the annulus {r0} < |z| < 1")));
        }
    }
    let x = z * w.conj();
    let mut acc = C64::new(0.0, 0.0);
    let mut xp = C64::new(1.0, 0.0);
    for k in 0..=terms {
        let kf = k as f64;
        acc += xp * (kf + 1.0) / (PI * (1.0 - r0.powi(2 * k as i32 + 2)));
        xp *= x;
    }
    if r0 > 0.0 && terms >= 1 {
        acc += 1.0 / (x * 2.0 * PI * (1.0 / r0).ln());
        // 1/‖z^{-j}‖² x^{-j} = (r0²/x)^j (j − 1) / (π r0² (1 − r0^{2j−2}))
        let y = r0 * r0 / x;
        let mut yp = y;
        for j in 2..=terms {
            yp *= y;
            let jf = j as f64;
            acc += yp * (jf - 1.0) / (PI * r0 * r0 * (1.0 - r0.powi(2 * j as i32 - 2)));
        }
    }
    Ok(acc)
}

/// A kernel `K(z, w)` with a sampler for interior points.
pub trait KernelSampler {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64>;

    /// `∂_{w̄_j} K(z, w)` at `w = 0`, when known in closed form.
    fn exact_d_wbar_at_origin(&self, _z: &[C64], _j: usize) -> Option<Result<C64>> {
        None
    }

    /// One interior point.
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64>;
}

/// `count` samples `(z, K(z, z))` from a seeded stream.
pub fn diagonal_samples(s: &dyn KernelSampler, count: usize, seed: u64) -> Result<Vec<(Vec<C64>, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = s.random_point(&mut rng);
            let k = s.kernel(&z, &z)?;
            Ok((z, k.re))
        })
        .collect()
}

fn random_in_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let r2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if r2 < 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// Kernel of `𝔹ⁿ`; samples have `|z| ≤ radius`.
#[derive(Clone, Debug)]
pub struct BallSampler {
    pub n: usize,
    pub radius: f64,
    pub scale: f64,
}

impl BallSampler {
    pub fn new(n: usize) -> Self {
        Self { n, radius: 0.9, scale: 1.0 }
    }

    /// Kernel multiplied by `scale`.
    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

impl KernelSampler for BallSampler {
    fn name(&self) -> &str {
        if self.n == 1 { "disk" } else { "ball" }
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        check_dim(self.n, z.len())?;
        Ok(ball_kernel_raw(z, w)? * self.scale)
    }

    fn exact_d_wbar_at_origin(&self, z: &[C64], j: usize) -> Option<Result<C64>> {
        Some(check_dim(self.n, z.len()).map(|_| self.scale * ball_kernel_constant(self.n) * (self.n as f64 + 1.0) * z[j]))
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        random_in_ball(rng, self.n, self.radius)
    }
}

/// Annulus kernel truncated at `terms`.
#[derive(Clone, Debug)]
pub struct AnnulusSampler {
    pub r0: f64,
    pub terms: usize,
    /// Samples have `r0 + margin ≤ |z| ≤ 1 − margin`.
    pub margin: f64,
}

impl AnnulusSampler {
    pub fn new(r0: f64) -> Self {
        Self { r0, terms: 200, margin: 0.05 }
    }
}

impl KernelSampler for AnnulusSampler {
    fn name(&self) -> &str {
        "annulus"
    }

    fn dim(&self) -> usize {
        1
    }

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        check_dim(1, z.len())?;
        check_dim(1, w.len())?;
        annulus_kernel(self.r0, z[0], w[0], self.terms)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        let r = rng.random_range(self.r0 + self.margin..1.0 - self.margin);
        vec![C64::from_polar(r, rng.random_range(0.0..2.0 * PI))]
    }
}

/// Closed-form kernel of `Ω` at points `(z_1, z_2, λ)`; samples have
/// `|z_i| ≤ z_radius` and `|λ|²h(z) ≤ max_level`.
#[derive(Clone, Debug)]
pub struct OmegaSampler {
    pub z_radius: f64,
    pub max_level: f64,
}

impl Default for OmegaSampler {
    fn default() -> Self {
        Self { z_radius: 1.5, max_level: 0.8 }
    }
}

impl OmegaSampler {
    fn point(&self, rng: &mut ChaCha8Rng) -> OmegaPoint {
        let z = random_in_ball(rng, 1, self.z_radius)[0];
        let z2 = random_in_ball(rng, 1, self.z_radius)[0];
        let h = (1.0 + z.norm_sqr()) * (1.0 + z2.norm_sqr());
        let level = rng.random_range(0.05..self.max_level);
        let lam = C64::from_polar((level / h).sqrt(), rng.random_range(0.0..2.0 * PI));
        OmegaPoint::new(z, z2, lam)
    }
}

impl KernelSampler for OmegaSampler {
    fn name(&self) -> &str {
        "omega"
    }

    fn dim(&self) -> usize {
        3
    }

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        let p = OmegaPoint::from_slice(z)?;
        let q = OmegaPoint::from_slice(w)?;
        for pt in [&p, &q] {
            if !pt.in_omega() {
                return Err(Error::OutsideDomain(format!("{:?}", pt.to_vec())));
            }
        }
        omega_closed_kernel(&p, &q)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        self.point(rng).to_vec()
    }
}

/// Kernel of `U` in the chart `w_1 ≠ 0`, sampled as images of `Ω` points.
#[derive(Clone, Debug, Default)]
pub struct USampler {
    pub omega: OmegaSampler,
}

impl KernelSampler for USampler {
    fn name(&self) -> &str {
        "u"
    }

    fn dim(&self) -> usize {
        3
    }

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        u_kernel(z, w)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        u_chart(&self.omega.point(rng)).to_vec()
    }
}

/// Any closure `K(z, w)` with a point generator.
pub struct FnSampler<K, P> {
    pub name: String,
    pub dim: usize,
    pub kernel: K,
    pub point: P,
}

impl<K, P> KernelSampler for FnSampler<K, P>
where
    K: Fn(&[C64], &[C64]) -> Result<C64>,
    P: Fn(&mut ChaCha8Rng) -> Vec<C64>,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        (self.kernel)(z, w)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        (self.point)(rng)
    }
}

/// How `∂_{w̄_j}K(z, 0)` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DerivativeMode {
    /// Closed form from the sampler; errors if none is registered.
    Exact,
    /// `(K(z, h e_j) − K(z, −h e_j)) / 2h`.
    CentralDifference { step: f64 },
}

impl Default for DerivativeMode {
    fn default() -> Self {
        DerivativeMode::CentralDifference { step: DEFAULT_FD_STEP }
    }
}

fn d_wbar(k: &dyn KernelSampler, z: &[C64], j: usize, mode: DerivativeMode) -> Result<C64> {
    match mode {
        DerivativeMode::Exact => k
            .exact_d_wbar_at_origin(z, j)
            .unwrap_or_else(|| Err(Error::Derivative(format!("no closed-form derivative for `{}`", k.name())))),
        DerivativeMode::CentralDifference { step } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::Derivative(format!("invalid step {step}")));
            }
            let n = k.dim();
            let mut w = vec![C64::new(0.0, 0.0); n];
            w[j] = C64::new(step, 0.0);
            let plus = k.kernel(z, &w)?;
            w[j] = C64::new(-step, 0.0);
            let minus = k.kernel(z, &w)?;
            let d = (plus - minus) / (2.0 * step);
            if d.re.is_finite() && d.im.is_finite() {
                Ok(d)
            } else {
                Err(Error::Derivative(format!("non-finite difference quotient at {z:?}")))
            }
        }
    }
}

/// `g(z) = conj(Jf(0))ᵀ f(z)` for a biholomorphism `f` onto `𝔹ⁿ` with
/// `f(0) = 0`, from
/// `g_j(z) = (K(z,0)^{-1}∂_{w̄_j}K(z,0) − K(0,0)^{-1}∂_{w̄_j}K(0,0)) / (n + 1)`.
pub struct RecoveredMap<'a> {
    kernel: &'a dyn KernelSampler,
    mode: DerivativeMode,
    base: Vec<C64>,
}

impl<'a> RecoveredMap<'a> {
    pub fn new(kernel: &'a dyn KernelSampler, mode: DerivativeMode) -> Result<Self> {
        let n = kernel.dim();
        let origin = vec![C64::new(0.0, 0.0); n];
        let base = log_derivatives(kernel, &origin, mode)?;
        Ok(Self { kernel, mode, base })
    }

    pub fn eval(&self, z: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.kernel.dim(), z.len())?;
        let n1 = self.kernel.dim() as f64 + 1.0;
        let l = log_derivatives(self.kernel, z, self.mode)?;
        Ok(l.iter().zip(&self.base).map(|(a, b)| (a - b) / n1).collect())
    }
}

fn log_derivatives(k: &dyn KernelSampler, z: &[C64], mode: DerivativeMode) -> Result<Vec<C64>> {
    let n = k.dim();
    let zero = vec![C64::new(0.0, 0.0); n];
    let kz = k.kernel(z, &zero)?;
    if kz.norm() <= FLOAT_ZERO_TOL {
        return Err(Error::SingularKernel(format!("K(z, 0) vanishes at {z:?}")));
    }
    (0..n).map(|j| Ok(d_wbar(k, z, j, mode)? / kz)).collect()
}

/// `g` evaluated at each point.
pub fn recover_map_from_kernel(
    kernel: &dyn KernelSampler,
    points: &[Vec<C64>],
    mode: DerivativeMode,
) -> Result<Vec<Vec<C64>>> {
    let g = RecoveredMap::new(kernel, mode)?;
    points.iter().map(|z| g.eval(z)).collect()
}
