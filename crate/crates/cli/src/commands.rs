use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Result};
use berg_core::algebraicity::{
    boundary_leading_coefficient, diagonal_samples, fit_relation, AnnulusSampler, BallSampler, KernelSampler,
    OmegaSampler, RelationBasis,
};
use berg_core::ball::{ball_kernel_raw, levi_form, DefiningFunction};
use berg_core::cache::Cache;
use berg_core::complex::{HermitianPolynomial, MultiIndex};
use berg_core::hartogs::{
    kernel_series, monomial_norm, omega_closed_kernel, omega_defining_function, HartogsDomainSpec, NormValue,
    OmegaPoint, DEFAULT_QUADRATURE_NODES,
};
use berg_core::invariants::{compute_basic_map, find_syzygies};
use berg_core::quotient::{deck_sum_kernel, pushforward_kernel, CoveringSpec};
use berg_core::unitary::io::{matrix_to_json, parse_group_value, AnyGroup, DEFAULT_MAX_ORDER};
use berg_core::unitary::{is_fixed_point_free, reflections};
use berg_core::C64;
use serde_json::{json, Value};

use crate::input::{fmt_point, json_pairs, json_samples, read_json};

pub fn print_json(v: &Value) {
    println!("{v}");
}

pub fn ball_kernel(dim: usize, z: &[C64], w: &[C64]) -> Result<Value> {
    if z.len() != dim || w.len() != dim {
        bail!("points must have {dim} coordinates");
    }
    let k = ball_kernel_raw(z, w)?;
    Ok(json!({"re": k.re, "im": k.im}))
}

pub fn levi(rho_path: &Path, point: &[C64]) -> Result<Value> {
    let rho = DefiningFunction::new(HermitianPolynomial::<C64>::from_json(&read_json(rho_path)?)?)?;
    Ok(serde_json::to_value(levi_form(&rho, point)?)?)
}

fn load_group(path: &Path) -> Result<AnyGroup> {
    Ok(parse_group_value(&read_json(path)?)?.generate(DEFAULT_MAX_ORDER)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupCheck {
    Fpf,
    Reflections,
}

pub fn group(path: &Path, check: Option<GroupCheck>) -> Result<Value> {
    let g = load_group(path)?;
    let mut out = json!({"order": g.order(), "dim": g.dim(), "exact": matches!(g, AnyGroup::Exact(_))});
    match (check, &g) {
        (None, _) => {}
        (Some(GroupCheck::Fpf), AnyGroup::Exact(e)) => {
            let c = is_fixed_point_free(e);
            out["fixed_point_free"] = json!(c.fixed_point_free);
            if let Some((m, v)) = c.witness {
                out["witness"] = json!({"element": matrix_to_json(&m), "vector": v.iter().map(|x| x.to_string()).collect::<Vec<_>>()});
            }
        }
        (Some(GroupCheck::Fpf), AnyGroup::Float(f)) => {
            let c = is_fixed_point_free(f);
            out["fixed_point_free"] = json!(c.fixed_point_free);
            if let Some((m, v)) = c.witness {
                out["witness"] = json!({"element": matrix_to_json(&m), "vector": v.iter().map(|x| [x.re, x.im]).collect::<Vec<_>>()});
            }
        }
        (Some(GroupCheck::Reflections), AnyGroup::Exact(e)) => {
            out["reflections"] = Value::Array(reflections(e).iter().map(matrix_to_json).collect());
        }
        (Some(GroupCheck::Reflections), AnyGroup::Float(f)) => {
            out["reflections"] = Value::Array(reflections(f).iter().map(matrix_to_json).collect());
        }
    }
    Ok(out)
}

pub fn basic_map(path: &Path, syzygy_bound: Option<u32>) -> Result<Value> {
    let AnyGroup::Exact(g) = load_group(path)? else {
        bail!("basic-map needs an exact group file with `root_order`");
    };
    let cache = Cache::from_env();
    let mut parts = g.canonical_keys();
    parts.push(format!("syzygies={syzygy_bound:?}"));
    let key = Cache::key("basic-map", &parts);
    if let Some(v) = cache.as_ref().and_then(|c| c.load::<Value>("basic-map", &key)) {
        return Ok(v);
    }
    let map = compute_basic_map(&g)?;
    let syz = match syzygy_bound {
        Some(d) => find_syzygies(&map, d)?.iter().map(|s| json!(s.relation.to_string())).collect(),
        None => Vec::new(),
    };
    let out = json!({
        "generators": map.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "degrees": map.degrees(),
        "syzygies": syz,
    });
    if let Some(c) = cache {
        c.store("basic-map", &key, &out)?;
    }
    Ok(out)
}

fn write_csv(rows: impl IntoIterator<Item = [String; 4]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["z", "w", "re", "im"])?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn quotient_sum(group_path: &Path, dim: usize, pairs_path: &Path) -> Result<()> {
    let g = load_group(group_path)?.to_c64();
    if g.dim() != dim {
        bail!("group acts on C^{}, not C^{dim}", g.dim());
    }
    let pairs = json_pairs(&read_json(pairs_path)?)?;
    let rows = pairs
        .iter()
        .map(|(z, w)| {
            let k = deck_sum_kernel(&g, dim, z, w)?;
            Ok([fmt_point(z), fmt_point(w), k.re.to_string(), k.im.to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(rows)
}

/// Cover file: a group file object with an extra `map` list of polynomial
/// records `{dim, terms}`.
pub fn quotient_push(cover_path: &Path, pairs_path: &Path) -> Result<()> {
    let v = read_json(cover_path)?;
    let g = parse_group_value(&v)?.generate(DEFAULT_MAX_ORDER)?.to_c64();
    let map = v
        .get("map")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("cover file needs a `map` list"))?
        .iter()
        .map(HermitianPolynomial::<C64>::from_json)
        .collect::<berg_core::Result<Vec<_>>>()?;
    let cover = CoveringSpec::new(g, map)?;
    let pairs = json_pairs(&read_json(pairs_path)?)?;
    let rows = pairs
        .iter()
        .map(|(z, w)| {
            let k = pushforward_kernel(&cover, z, w)?;
            Ok([fmt_point(z), fmt_point(w), k.re.to_string(), k.im.to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(rows)
}

pub fn omega_kernel(p: OmegaPoint, q: OmegaPoint, series: Option<usize>) -> Result<Value> {
    Ok(match series {
        Some(m) => {
            let s = kernel_series(&p, &q, m)?;
            json!({"re": s.re, "im": s.im, "terms": s.terms, "tail_bound": s.tail_bound})
        }
        None => {
            let k = omega_closed_kernel(&p, &q)?;
            json!({"re": k.re, "im": k.im})
        }
    })
}

pub fn moments(m: u32, alpha: &[u32], exact: bool, numeric: bool) -> Result<Value> {
    if alpha.len() != 2 {
        bail!("alpha needs two entries");
    }
    let (exact, numeric) = if !exact && !numeric { (true, true) } else { (exact, numeric) };
    let cache = Cache::from_env();
    let key = Cache::key("moments", &[format!("{m}"), format!("{alpha:?}"), format!("{exact}/{numeric}")]);
    if let Some(v) = cache.as_ref().and_then(|c| c.load::<Value>("moments", &key)) {
        return Ok(v);
    }
    let a = MultiIndex::new(alpha.to_vec());
    let norm = monomial_norm(m, &a)?;
    let mut out = json!({"m": m, "alpha": alpha});
    if exact {
        match &norm {
            NormValue::Finite(v) => {
                out["exact"] = json!(v.to_string());
                out["value"] = json!(v.to_c64().re);
            }
            NormValue::Infinite => {
                out["exact"] = json!("inf");
                out["value"] = Value::Null;
            }
        }
    }
    if numeric {
        // quadrature of a divergent integral returns a meaningless finite number
        let q = match norm {
            NormValue::Infinite => None,
            NormValue::Finite(_) => Some(HartogsDomainSpec::omega().norm_numeric(m, &a, DEFAULT_QUADRATURE_NODES)?),
        };
        match q {
            Some(q) if q.value.is_finite() => {
                out["numeric"] = json!(q.value);
                out["error_estimate"] = json!(q.error_estimate);
            }
            _ => out["numeric"] = json!("inf"),
        }
    }
    if let Some(c) = cache {
        c.store("moments", &key, &out)?;
    }
    Ok(out)
}

/// Diagonal values on `z_2 = 0`, `z_1 = r ≥ 0`, `λ = s/√h ≥ 0` over
/// `r ∈ [0, z_max]` and `s² ∈ (0, max_level]`.
pub fn omega_grid(steps: usize, z_max: f64, max_level: f64) -> Result<()> {
    if steps < 2 {
        bail!("need at least two steps");
    }
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["z1", "lambda", "level", "k"])?;
    for i in 0..steps {
        let r = z_max * i as f64 / (steps - 1) as f64;
        for j in 1..=steps {
            let level = max_level * j as f64 / steps as f64;
            let lam = (level / (1.0 + r * r)).sqrt();
            let p = OmegaPoint::new(C64::new(r, 0.0), C64::new(0.0, 0.0), C64::new(lam, 0.0));
            let k = omega_closed_kernel(&p, &p)?;
            w.write_record([r.to_string(), lam.to_string(), level.to_string(), k.re.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelKind {
    Disk,
    Ball2,
    Omega,
    Annulus,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BasisKind {
    Hermitian,
    Radial,
}

pub struct FitArgs<'a> {
    pub kernel: KernelKind,
    pub dz: u32,
    pub dk: usize,
    pub basis: Option<BasisKind>,
    pub per_var: Option<u32>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub boundary_check: bool,
    pub file: Option<&'a Path>,
    pub r0: f64,
}

fn boundary_points(kind: KernelKind, r0: f64, count: usize) -> Vec<Vec<C64>> {
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            let e = C64::from_polar(1.0, t);
            match kind {
                KernelKind::Disk => vec![e],
                KernelKind::Ball2 => vec![e * (t * 0.5).cos(), C64::from_polar((t * 0.5).sin(), 2.0 * t)],
                KernelKind::Annulus if i % 2 == 1 => vec![e * r0],
                KernelKind::Annulus => vec![e],
                KernelKind::Omega | KernelKind::File => {
                    let (z1, z2) = (C64::from_polar(0.3 + t / 10.0, t), C64::from_polar(1.2 - t / 10.0, -t));
                    let h = (1.0 + z1.norm_sqr()) * (1.0 + z2.norm_sqr());
                    vec![z1, z2, C64::from_polar(h.sqrt().recip(), 3.0 * t)]
                }
            }
        })
        .collect()
}

fn annulus_rho(r0: f64) -> Result<DefiningFunction> {
    let a = HermitianPolynomial::abs_sq(1, 0);
    let one = HermitianPolynomial::one(1);
    let outer = &a - &one;
    let inner = &a - &one.scale(&C64::new(r0 * r0, 0.0));
    Ok(DefiningFunction::new(&outer * &inner)?)
}

pub fn fit(args: &FitArgs) -> Result<Value> {
    let sampler: Option<Box<dyn KernelSampler>> = match args.kernel {
        KernelKind::Disk => Some(Box::new(BallSampler::new(1))),
        KernelKind::Ball2 => Some(Box::new(BallSampler::new(2))),
        KernelKind::Omega => Some(Box::new(OmegaSampler::default())),
        KernelKind::Annulus => Some(Box::new(AnnulusSampler::new(args.r0))),
        KernelKind::File => None,
    };
    let basis_kind = args.basis.unwrap_or(if args.kernel == KernelKind::Omega { BasisKind::Radial } else { BasisKind::Hermitian });
    let basis = match basis_kind {
        BasisKind::Hermitian => RelationBasis::Hermitian { degree: args.dz },
        BasisKind::Radial => {
            RelationBasis::Radial { max_total: args.dz / 2, max_per_var: args.per_var.unwrap_or(args.dz / 2) }
        }
    };
    let samples = match (&sampler, args.file) {
        (Some(s), _) => {
            let unknowns = basis.monomials(s.dim()).len() * (args.dk + 1);
            diagonal_samples(s.as_ref(), args.samples.unwrap_or(3 * unknowns), args.seed)?
        }
        (None, Some(path)) => json_samples(&read_json(path)?)?,
        (None, None) => bail!("--kernel file needs --file"),
    };
    let rel = fit_relation(&samples, basis, args.dk)?;
    let mut out = json!({
        "coefficients": rel.coefficients_json(),
        "residual": rel.residual,
        "k_degree": rel.k_degree,
        "basis": rel.basis,
        "samples": samples.len(),
    });
    if args.boundary_check {
        let rho = match args.kernel {
            KernelKind::Disk => DefiningFunction::sphere(1),
            KernelKind::Ball2 => DefiningFunction::sphere(2),
            KernelKind::Omega => DefiningFunction::from_exact(&omega_defining_function())?,
            KernelKind::Annulus => annulus_rho(args.r0)?,
            KernelKind::File => bail!("--boundary-check is not available for sample files"),
        };
        let pts = boundary_points(args.kernel, args.r0, 50);
        let b = boundary_leading_coefficient(&rel, &rho, &pts, 1e-8)?;
        out["boundary_max"] = json!(b.max_abs);
        out["boundary_flagged"] = json!(b.flagged);
    }
    Ok(out)
}

pub fn flush() {
    let _ = std::io::stdout().flush();
}
