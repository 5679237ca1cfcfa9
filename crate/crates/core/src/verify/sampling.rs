//! Seeded integration over the registered domains.
//!
//! Monte Carlo work is split into a fixed number of chunks, each drawing from
//! its own ChaCha stream, so estimates do not depend on the thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebraicity::annulus_kernel;
use crate::ball::ball_kernel_raw;
use crate::complex::C64;
use crate::error::{check_dim, Error, Result};
use crate::hartogs::{gauss_legendre, omega_closed_kernel, HartogsDomainSpec, OmegaPoint};

/// Independent RNG streams per estimate.
pub const MC_CHUNKS: usize = 64;

/// Integration domains. Hartogs points are `(z_1, …, z_n, λ)`.
#[derive(Clone, Debug)]
pub enum Domain {
    Disk,
    Ball { n: usize },
    Annulus { r0: f64 },
    Omega,
    Hartogs(HartogsDomainSpec),
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            Domain::Disk => m.serialize_entry("kind", "disk")?,
            Domain::Ball { n } => {
                m.serialize_entry("kind", "ball")?;
                m.serialize_entry("n", n)?;
            }
            Domain::Annulus { r0 } => {
                m.serialize_entry("kind", "annulus")?;
                m.serialize_entry("r0", r0)?;
            }
            Domain::Omega => m.serialize_entry("kind", "omega")?,
            Domain::Hartogs(h) => {
                m.serialize_entry("kind", "hartogs")?;
                m.serialize_entry("weight", &h.weight().to_json())?;
            }
        }
        m.end()
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    /// `disk`, `ball-N`, `omega`, `annulus` (inner radius 1/2) or `annulus:R`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownDomain(s.to_string());
        match s {
            "disk" => Ok(Domain::Disk),
            "omega" => Ok(Domain::Omega),
            "annulus" => Ok(Domain::Annulus { r0: 0.5 }),
            _ => {
                if let Some(n) = s.strip_prefix("ball-").or_else(|| s.strip_prefix("ball")) {
                    let n: usize = n.parse().map_err(|_| bad())?;
                    if n == 0 {
                        return Err(bad());
                    }
                    Ok(Domain::Ball { n })
                } else if let Some(r) = s.strip_prefix("annulus:") {
                    let r0: f64 = r.parse().map_err(|_| bad())?;
                    if !(0.0..1.0).contains(&r0) {
                        return Err(bad());
                    }
                    Ok(Domain::Annulus { r0 })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Disk | Domain::Annulus { .. } => 1,
            Domain::Ball { n } => *n,
            Domain::Omega => 3,
            Domain::Hartogs(h) => h.base_dim() + 1,
        }
    }

    pub fn contains(&self, p: &[C64]) -> bool {
        match self {
            Domain::Disk | Domain::Ball { .. } => p.iter().map(|x| x.norm_sqr()).sum::<f64>() < 1.0,
            Domain::Annulus { r0 } => p[0].norm() > *r0 && p[0].norm() < 1.0,
            Domain::Omega => OmegaPoint::new(p[0], p[1], p[2]).in_omega(),
            Domain::Hartogs(h) => {
                let (z, lam) = p.split_at(p.len() - 1);
                let r: Vec<f64> = z.iter().map(|x| x.norm_sqr()).collect();
                lam[0].norm_sqr() * h.weight_radial(&r) < 1.0
            }
        }
    }

    /// Bergman kernel `K(z, w)` for this domain's measure.
    pub fn kernel(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        check_dim(self.dim(), z.len())?;
        check_dim(self.dim(), w.len())?;
        match self {
            Domain::Disk | Domain::Ball { .. } => ball_kernel_raw(z, w),
            Domain::Annulus { r0 } => annulus_kernel(*r0, z[0], w[0], 400),
            Domain::Omega => omega_closed_kernel(&OmegaPoint::from_slice(z)?, &OmegaPoint::from_slice(w)?),
            Domain::Hartogs(h) if h.is_omega_standard() => {
                omega_closed_kernel(&OmegaPoint::from_slice(z)?, &OmegaPoint::from_slice(w)?)
            }
            Domain::Hartogs(_) => Err(Error::Unsupported("no closed-form kernel for this Hartogs weight".into())),
        }
    }

    /// Points drawn by `sample` together with the factor turning `f(p)` into
    /// an unbiased estimate of `∫ f`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> (Vec<C64>, f64) {
        match self {
            Domain::Disk | Domain::Ball { .. } | Domain::Annulus { .. } => {
                let n = self.dim();
                let p: Vec<C64> =
                    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                let weight = if self.contains(&p) { 4f64.powi(n as i32) } else { 0.0 };
                (p, weight)
            }
            Domain::Omega => hartogs_sample(&HartogsDomainSpec::omega(), rng),
            Domain::Hartogs(h) => hartogs_sample(h, rng),
        }
    }
}

/// `z_i` with density `(1/π)(1 + |z_i|²)^{−2}`, then `λ` uniform in the fiber
/// disk; the returned factor includes the form-measure constant `2^{n+1}`.
fn hartogs_sample(h: &HartogsDomainSpec, rng: &mut ChaCha8Rng) -> (Vec<C64>, f64) {
    let n = h.base_dim();
    let mut p = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n);
    let mut inv_density = PI.powi(n as i32 + 1) * 2f64.powi(n as i32 + 1);
    for _ in 0..n {
        let u: f64 = rng.random_range(0.0..1.0);
        let s = u / (1.0 - u);
        p.push(C64::from_polar(s.sqrt(), rng.random_range(0.0..2.0 * PI)));
        r.push(s);
        inv_density *= (1.0 + s) * (1.0 + s);
    }
    let hz = h.weight_radial(&r);
    let rad = (rng.random_range(0.0..1.0f64) / hz).sqrt();
    p.push(C64::from_polar(rad, rng.random_range(0.0..2.0 * PI)));
    (p, inv_density / hz)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    TensorQuadrature,
}

/// What to integrate over and how.
#[derive(Clone, Debug, Serialize)]
pub struct IntegrationSpec {
    pub domain: Domain,
    pub method: Method,
    /// Monte Carlo samples, or quadrature nodes per radial axis.
    pub samples: usize,
    pub seed: u64,
}

impl IntegrationSpec {
    pub fn monte_carlo(domain: Domain, samples: usize, seed: u64) -> Self {
        Self { domain, method: Method::MonteCarlo, samples, seed }
    }
}

/// `value ± stderr`; for quadrature `stderr` is the node-halving difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    re: Compensated,
    im: Compensated,
    sq: Compensated,
}

pub fn integrate(spec: &IntegrationSpec, f: &(dyn Fn(&[C64]) -> C64 + Sync)) -> Result<Estimate> {
    if spec.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    match spec.method {
        Method::MonteCarlo => Ok(monte_carlo(spec, f)),
        Method::TensorQuadrature => quadrature(spec, f),
    }
}

fn monte_carlo(spec: &IntegrationSpec, f: &(dyn Fn(&[C64]) -> C64 + Sync)) -> Estimate {
    let n = spec.samples;
    let chunks: Vec<Moments> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = n / MC_CHUNKS + usize::from(c < n % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let mut m = Moments::default();
            for _ in 0..count {
                let (p, w) = spec.domain.sample(&mut rng);
                if w == 0.0 {
                    continue;
                }
                let v = f(&p) * w;
                m.re.add(v.re);
                m.im.add(v.im);
                m.sq.add(v.norm_sqr());
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for m in &chunks {
        total.re.add(m.re.value());
        total.im.add(m.im.value());
        total.sq.add(m.sq.value());
    }
    let nf = n as f64;
    let mean = C64::new(total.re.value() / nf, total.im.value() / nf);
    let var = if n > 1 { ((total.sq.value() / nf - mean.norm_sqr()) * nf / (nf - 1.0)).max(0.0) } else { f64::INFINITY };
    Estimate { re: mean.re, im: mean.im, stderr: (var / nf).sqrt(), samples: n }
}

fn quadrature(spec: &IntegrationSpec, f: &(dyn Fn(&[C64]) -> C64 + Sync)) -> Result<Estimate> {
    let (inner, outer) = match spec.domain {
        Domain::Disk => (0.0, 1.0),
        Domain::Annulus { r0 } => (r0, 1.0),
        _ => return Err(Error::Unsupported("tensor quadrature is available for disk and annulus".into())),
    };
    let rule = |nodes: usize| -> C64 {
        let gl = gauss_legendre(nodes);
        let angles = 2 * nodes;
        let mut acc = C64::new(0.0, 0.0);
        for &(u, w) in &gl {
            let r = inner + (outer - inner) * u;
            for k in 0..angles {
                let t = 2.0 * PI * k as f64 / angles as f64;
                acc += f(&[C64::from_polar(r, t)]) * (w * r);
            }
        }
        acc * ((outer - inner) * 2.0 * PI / angles as f64)
    };
    let full = rule(spec.samples);
    let half = rule((spec.samples / 2).max(1));
    Ok(Estimate { re: full.re, im: full.im, stderr: (full - half).norm(), samples: spec.samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: &[C64]) -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn domain_ids_parse() {
        assert!(matches!("disk".parse::<Domain>(), Ok(Domain::Disk)));
        assert!(matches!("ball-2".parse::<Domain>(), Ok(Domain::Ball { n: 2 })));
        assert!(matches!("annulus:0.25".parse::<Domain>(), Ok(Domain::Annulus { r0 }) if r0 == 0.25));
        assert!(matches!("torus".parse::<Domain>(), Err(Error::UnknownDomain(_))));
        assert!(matches!("ball-0".parse::<Domain>(), Err(Error::UnknownDomain(_))));
    }

    #[test]
    fn disk_area() {
        let e = integrate(&IntegrationSpec::monte_carlo(Domain::Disk, 200_000, 1), &one).unwrap();
        assert!((e.re - PI).abs() <= 3.0 * e.stderr, "{e:?}");
        let q = IntegrationSpec { method: Method::TensorQuadrature, ..IntegrationSpec::monte_carlo(Domain::Disk, 32, 0) };
        let e = integrate(&q, &one).unwrap();
        assert!((e.re - PI).abs() < 1e-13);
    }

    #[test]
    fn annulus_area_by_quadrature() {
        let q = IntegrationSpec { method: Method::TensorQuadrature, ..IntegrationSpec::monte_carlo(Domain::Annulus { r0: 0.5 }, 16, 0) };
        let e = integrate(&q, &|p: &[C64]| C64::new(p[0].norm_sqr(), 0.0)).unwrap();
        // 2π ∫_{1/2}^1 r³ dr
        assert!((e.re - PI / 2.0 * (1.0 - 1.0 / 16.0)).abs() < 1e-13);
    }

    #[test]
    fn replay_is_bit_identical() {
        let s = IntegrationSpec::monte_carlo(Domain::Omega, 10_000, 42);
        let f = |p: &[C64]| p[2] * p[2].conj();
        assert_eq!(integrate(&s, &f).unwrap(), integrate(&s, &f).unwrap());
        let t = IntegrationSpec { seed: 43, ..s.clone() };
        assert_ne!(integrate(&s, &f).unwrap(), integrate(&t, &f).unwrap());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(matches!(integrate(&IntegrationSpec::monte_carlo(Domain::Disk, 0, 1), &one), Err(Error::ZeroSamples)));
    }

    #[test]
    fn compensated_sum() {
        let mut c = Compensated::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            c.add(x);
        }
        assert_eq!(c.value(), 2.0);
    }

    #[test]
    fn hartogs_samples_lie_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let (p, w) = Domain::Omega.sample(&mut rng);
            assert!(Domain::Omega.contains(&p) && w > 0.0);
        }
    }
}
