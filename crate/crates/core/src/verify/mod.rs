//! Reproducing-property, orthogonality, isometry and transformation-law checks.

pub mod report;
pub mod sampling;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::ball::ball_kernel_raw;
use crate::complex::rational::{int, rat};
use crate::complex::{MultiIndex, PiScaled, C64};
use crate::error::{check_dim, Error, Result};
use crate::hartogs::{monomial_norm, NormValue};
use crate::algebraicity::annulus_norm;
use crate::quotient::{disk_power_pullback, CoveringSpec, IsotypicSeries, BRANCH_TOL};

pub use report::{Outcome, VerificationReport, REL_STDERR_CAP, SIGMA_MULTIPLIER};
pub use sampling::{integrate, Domain, Estimate, IntegrationSpec, Method};

/// A kernel evaluated at a pair of points.
pub type PairKernel<'a> = dyn Fn(&[C64], &[C64]) -> Result<C64> + 'a;

/// Relative residual tolerance for the transformation law.
pub const TRANSFORMATION_TOL: f64 = 1e-12;

fn monomial(p: &[C64], e: &MultiIndex) -> C64 {
    e.eval_c64(p)
}

fn c2(v: C64) -> [f64; 2] {
    [v.re, v.im]
}

/// `‖z^e‖²` on the domain, or an error if it is infinite or unknown.
pub fn monomial_norm_on(domain: &Domain, e: &MultiIndex) -> Result<f64> {
    check_dim(domain.dim(), e.len())?;
    let ent = e.entries();
    match domain {
        Domain::Disk | Domain::Ball { .. } => {
            let n = e.len() as u32;
            let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
            let num: f64 = ent.iter().map(|&a| fact(a)).product();
            Ok(std::f64::consts::PI.powi(n as i32) * num / fact(n + e.degree()))
        }
        Domain::Annulus { r0 } => {
            annulus_norm(*r0, ent[0] as i64).ok_or_else(|| Error::NotSquareIntegrable(format!("z^{}", ent[0])))
        }
        Domain::Omega => omega_norm(e),
        Domain::Hartogs(h) if h.is_omega_standard() => omega_norm(e),
        Domain::Hartogs(_) => Err(Error::Unsupported("monomial norms need the standard Omega weight".into())),
    }
}

fn omega_norm(e: &MultiIndex) -> Result<f64> {
    let ent = e.entries();
    match monomial_norm(ent[2], &MultiIndex::new(ent[..2].to_vec()))? {
        NormValue::Finite(v) => Ok(v.to_c64().re),
        NormValue::Infinite => Err(Error::NotSquareIntegrable(format!("lambda^{} z^({}, {})", ent[2], ent[0], ent[1]))),
    }
}

fn stochastic(
    check: &str,
    inputs: serde_json::Value,
    spec: &IntegrationSpec,
    target: C64,
    f: &(dyn Fn(&[C64]) -> C64 + Sync),
) -> Result<VerificationReport> {
    let est = integrate(spec, f)?;
    let outcome = Outcome::Stochastic { estimate: c2(est.value()), target: c2(target), stderr: est.stderr, samples: est.samples };
    Ok(VerificationReport::new(check, inputs, outcome))
}

/// Estimates `∫ f(ζ) K(z0, ζ) dμ(ζ)` and compares it with `f(z0)`.
pub fn check_reproducing(f: &MultiIndex, z0: &[C64], spec: &IntegrationSpec) -> Result<VerificationReport> {
    let d = &spec.domain;
    check_dim(d.dim(), z0.len())?;
    if !d.contains(z0) {
        return Err(Error::OutsideDomain(format!("{z0:?}")));
    }
    monomial_norm_on(d, f)?;
    d.kernel(z0, z0)?;
    let integrand = |p: &[C64]| monomial(p, f) * d.kernel(z0, p).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let inputs = json!({"spec": spec, "f": f.entries(), "z0": z0.iter().map(|x| c2(*x)).collect::<Vec<_>>()});
    stochastic("reproducing", inputs, spec, monomial(z0, f), &integrand)
}

/// Estimates `⟨f, g⟩ = ∫ f ḡ dμ` against its exact value (zero for distinct
/// monomials).
pub fn check_orthogonality(f: &MultiIndex, g: &MultiIndex, spec: &IntegrationSpec) -> Result<VerificationReport> {
    let d = &spec.domain;
    let nf = monomial_norm_on(d, f)?;
    monomial_norm_on(d, g)?;
    let target = if f == g { nf } else { 0.0 };
    let integrand = |p: &[C64]| monomial(p, f) * monomial(p, g).conj();
    let inputs = json!({"spec": spec, "f": f.entries(), "g": g.entries()});
    stochastic("orthogonality", inputs, spec, C64::new(target, 0.0), &integrand)
}

/// Both sides of `‖f^*φ‖² = k ‖φ‖²` for `f(z) = z^k` and `φ = w^d dw` on the
/// disk, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryCheck {
    pub lhs: PiScaled,
    pub rhs: PiScaled,
}

impl IsometryCheck {
    pub fn holds(&self) -> bool {
        self.lhs.exact_eq(&self.rhs)
    }
}

/// `f^*φ = k z^{k(d+1)−1} dz`, so `‖f^*φ‖² = k² π / (k(d + 1))`; the right
/// side uses `‖w^d‖² = π/(d + 1)`.
pub fn pullback_isometry(k: u32, d: u32) -> Result<IsometryCheck> {
    if k == 0 {
        return Err(Error::Unsupported("cover degree must be positive".into()));
    }
    let disk_norm = |j: u32| rat(1, j as i64 + 1);
    let j = k * (d + 1) - 1;
    let lhs = PiScaled::rational(int(k as i64 * k as i64) * disk_norm(j), 1);
    let rhs = PiScaled::rational(int(k as i64) * disk_norm(d), 1);
    Ok(IsometryCheck { lhs, rhs })
}

pub fn check_pullback_isometry(k: u32, d: u32) -> Result<VerificationReport> {
    let c = pullback_isometry(k, d)?;
    Ok(VerificationReport::new(
        "isometry",
        json!({"k": k, "d": d}),
        Outcome::Exact { lhs: c.lhs.to_string(), rhs: c.rhs.to_string() },
    ))
}

/// Right side of the transformation law evaluated independently of the deck
/// sum: `(f, f)^*K_disk` for `z ↦ z^k`, otherwise the isotypic monomial series
/// of a diagonal group.
pub fn independent_rhs(cover: &CoveringSpec) -> Result<Box<PairKernel<'_>>> {
    if cover.dim() == 1 {
        let p = &cover.map()[0];
        if let Some(k) = p.is_homogeneous_holomorphic() {
            let (_, _, c) = p.terms().next().expect("homogeneous map has a term");
            if p.num_terms() == 1 && (c - 1.0).norm() == 0.0 && k as usize == cover.sheets() {
                return Ok(Box::new(move |z: &[C64], w: &[C64]| disk_power_pullback(k, z[0], w[0])));
            }
        }
    }
    let s = IsotypicSeries::new(cover.group())?;
    Ok(Box::new(move |z: &[C64], w: &[C64]| s.eval(z, w)))
}

/// `max |lhs − rhs| / max(1, |lhs|)` over pairs, with
/// `lhs = Σ_γ K(γz, w) det γ`.
pub fn transformation_residual(
    cover: &CoveringSpec,
    pairs: &[(Vec<C64>, Vec<C64>)],
    rhs: &PairKernel<'_>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, w) in pairs {
        for p in [z, w] {
            if cover.jacobian_determinant(p)?.norm() <= BRANCH_TOL {
                return Err(Error::BranchPoint(format!("{p:?}")));
            }
        }
        let lhs = cover.deck_sum(z, w)?;
        let r = rhs(z, w)?;
        worst = worst.max((lhs - r).norm() / lhs.norm().max(1.0));
    }
    Ok(worst)
}

pub fn check_transformation_law(
    cover: &CoveringSpec,
    pairs: &[(Vec<C64>, Vec<C64>)],
    tolerance: f64,
) -> Result<VerificationReport> {
    let rhs = independent_rhs(cover)?;
    let residual = transformation_residual(cover, pairs, &*rhs)?;
    Ok(VerificationReport::new(
        "transformation",
        json!({"sheets": cover.sheets(), "dim": cover.dim(), "pairs": pairs.len()}),
        Outcome::Deterministic { residual, tolerance },
    ))
}

/// Pairs in `{|z| ≤ radius}²` away from the branch locus of `cover`.
pub fn random_pairs(cover: &CoveringSpec, count: usize, radius: f64, seed: u64) -> Result<Vec<(Vec<C64>, Vec<C64>)>> {
    let n = cover.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Result<Vec<C64>> {
        loop {
            let v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let r2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if r2 >= 1.0 {
                continue;
            }
            let v: Vec<C64> = v.into_iter().map(|x| x * radius).collect();
            if cover.jacobian_determinant(&v)?.norm() > 1e-6 {
                return Ok(v);
            }
        }
    };
    (0..count).map(|_| Ok((point(&mut rng)?, point(&mut rng)?))).collect()
}

/// Runs `f` and records its wall time on the report.
pub fn timed(f: impl FnOnce() -> Result<VerificationReport>) -> Result<VerificationReport> {
    let t = Instant::now();
    let r = f()?;
    Ok(r.with_runtime(t.elapsed().as_secs_f64() * 1e3))
}

/// Ball kernel on the disk, exposed for callers comparing against `K_disk`.
pub fn disk_kernel(z: C64, w: C64) -> Result<C64> {
    ball_kernel_raw(&[z], &[w])
}
