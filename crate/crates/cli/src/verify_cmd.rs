use anyhow::{bail, Result};
use berg_core::complex::MultiIndex;
use berg_core::quotient::CoveringSpec;
use berg_core::verify::{
    check_orthogonality, check_pullback_isometry, check_reproducing, check_transformation_law, random_pairs, timed,
    Domain, IntegrationSpec, VerificationReport, TRANSFORMATION_TOL,
};
use berg_core::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    Repro,
    Transform,
    Isometry,
    Orthogonality,
}

pub struct VerifyArgs {
    pub check: Check,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub domain: Option<Domain>,
    pub f: Option<Vec<u32>>,
    pub g: Option<Vec<u32>>,
    pub z0: Option<Vec<C64>>,
    pub k: Option<u32>,
    pub d_max: u32,
    pub pairs: usize,
    pub timing: bool,
}

fn default_repro(d: &Domain) -> Result<(Vec<u32>, Vec<C64>)> {
    let z = |v: f64| C64::new(v, 0.0);
    Ok(match d {
        Domain::Disk => (vec![1], vec![z(0.3)]),
        Domain::Ball { n } => {
            let mut e = vec![0; *n];
            e[0] = 1;
            let mut p = vec![z(0.0); *n];
            p[0] = z(0.3);
            (e, p)
        }
        Domain::Annulus { r0 } => (vec![1], vec![z((1.0 + r0) / 2.0)]),
        Domain::Omega | Domain::Hartogs(_) => (vec![0, 0, 1], vec![z(0.0), z(0.0), z(0.4)]),
    })
}

fn default_orthogonal(d: &Domain) -> (Vec<u32>, Vec<u32>) {
    match d {
        Domain::Omega | Domain::Hartogs(_) => (vec![0, 0, 1], vec![0, 0, 2]),
        _ => {
            let n = d.dim();
            let mut a = vec![0; n];
            let mut b = vec![0; n];
            a[0] = 1;
            b[0] = 2;
            (a, b)
        }
    }
}

pub fn run(a: &VerifyArgs) -> Result<Vec<VerificationReport>> {
    let wrap = |f: &dyn Fn() -> berg_core::Result<VerificationReport>| -> Result<VerificationReport> {
        Ok(if a.timing { timed(f)? } else { f()? })
    };
    let domains = match &a.domain {
        Some(d) => vec![d.clone()],
        None => vec![Domain::Disk, Domain::Omega],
    };
    let mut out = Vec::new();
    match a.check {
        Check::Repro => {
            for d in domains {
                let (f0, z00) = default_repro(&d)?;
                let f = MultiIndex::new(a.f.clone().unwrap_or(f0));
                let z0 = a.z0.clone().unwrap_or(z00);
                let spec = IntegrationSpec::monte_carlo(d, a.samples, a.seed);
                out.push(wrap(&|| check_reproducing(&f, &z0, &spec))?);
            }
        }
        Check::Orthogonality => {
            for d in domains {
                let (f0, g0) = default_orthogonal(&d);
                let f = MultiIndex::new(a.f.clone().unwrap_or(f0));
                let g = MultiIndex::new(a.g.clone().unwrap_or(g0));
                let spec = IntegrationSpec::monte_carlo(d, a.samples, a.seed);
                out.push(wrap(&|| check_orthogonality(&f, &g, &spec))?);
            }
        }
        Check::Isometry => {
            let k = a.k.unwrap_or(2);
            for d in 0..=a.d_max {
                out.push(wrap(&|| check_pullback_isometry(k, d))?);
            }
        }
        Check::Transform => {
            let tol = a.tol.unwrap_or(TRANSFORMATION_TOL);
            let mut covers: Vec<CoveringSpec> = match a.k {
                Some(0) => bail!("--k must be positive"),
                Some(k) => vec![CoveringSpec::disk_power(k)],
                None => (2..=5).map(CoveringSpec::disk_power).collect(),
            };
            if a.k.is_none() {
                covers.push(CoveringSpec::scalar_ball_quotient(2)?);
                covers.push(CoveringSpec::scalar_ball_quotient(4)?);
            }
            for (i, c) in covers.iter().enumerate() {
                let pairs = random_pairs(c, a.pairs, 0.75, a.seed.wrapping_add(i as u64))?;
                out.push(wrap(&|| check_transformation_law(c, &pairs, tol))?);
            }
        }
    }
    Ok(out)
}
