//! The unit ball, its Bergman kernel, and Levi forms of real hypersurfaces.
//!
//! Kernels are coefficient functions with respect to Lebesgue measure:
//! `K(z, w̄) = n!/πⁿ · (1 − ⟨z, w⟩)^{-(n+1)}`.

use serde::Serialize;

use crate::complex::linalg::hermitian_eigenvalues;
use crate::complex::rational::factorial;
use crate::complex::{hermitian_dot, norm_sqr, Field, GaussianRational, HermitianPolynomial, PiScaled, C64, FLOAT_ZERO_TOL};
use crate::error::{check_dim, Error, Result};

/// `|ρ(p)|` allowed for a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Gradient norm below which a boundary point is treated as non-smooth.
pub const GRADIENT_TOL: f64 = 1e-9;

/// A point of `𝔹ⁿ` or of its boundary sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<C64>,
    boundary: bool,
}

impl BallPoint {
    /// Interior point; requires `|z|² < 1`.
    pub fn interior(coords: Vec<C64>) -> Result<Self> {
        let r = norm_sqr(&coords);
        if r >= 1.0 {
            return Err(Error::OutsideDomain(format!("|z|^2 = {r} >= 1")));
        }
        Ok(Self { coords, boundary: false })
    }

    /// Boundary point; requires `||z|² − 1| ≤ BOUNDARY_TOL`.
    pub fn boundary(coords: Vec<C64>) -> Result<Self> {
        let r = norm_sqr(&coords) - 1.0;
        if r.abs() > BOUNDARY_TOL {
            return Err(Error::NotOnBoundary(r.abs()));
        }
        Ok(Self { coords, boundary: true })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary
    }
}

/// `n!/πⁿ`
pub fn ball_kernel_constant(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>() / std::f64::consts::PI.powi(n as i32)
}

/// Ball kernel coefficient `n!/πⁿ (1 − ⟨z, w⟩)^{-(n+1)}` at raw coordinates.
pub fn ball_kernel_raw(z: &[C64], w: &[C64]) -> Result<C64> {
    check_dim(z.len(), w.len())?;
    let n = z.len();
    let d = C64::new(1.0, 0.0) - hermitian_dot(z, w);
    if d.norm() <= FLOAT_ZERO_TOL {
        return Err(Error::SingularKernel(format!("1 - <z,w> = {d}")));
    }
    Ok(ball_kernel_constant(n) * d.powi(-(n as i32 + 1)))
}

/// Bergman kernel of `𝔹ⁿ`.
pub fn ball_kernel(n: usize, z: &BallPoint, w: &BallPoint) -> Result<C64> {
    check_dim(n, z.dim())?;
    check_dim(n, w.dim())?;
    ball_kernel_raw(z.coords(), w.coords())
}

/// Rational part `n!/(1 − ⟨z, w⟩)^{n+1}` of the ball kernel over any field;
/// the kernel itself is this value times `π^{-n}`.
pub fn ball_kernel_coefficient<F: Field>(z: &[F], w: &[F]) -> Result<F> {
    check_dim(z.len(), w.len())?;
    let n = z.len();
    let dot = z.iter().zip(w).fold(F::zero(), |acc, (a, b)| acc.plus(&a.times(&b.conj())));
    let d = F::one().minus(&dot);
    if d.is_negligible() {
        return Err(Error::SingularKernel("1 - <z,w> = 0".into()));
    }
    let inv = d.inverse().ok_or_else(|| Error::SingularKernel("1 - <z,w> = 0".into()))?;
    let nf = F::from_rational(&num_rational::BigRational::from_integer(factorial(n as u64)));
    Ok(nf.times(&inv.pow(n as u32 + 1)))
}

/// Exact ball kernel as a Gaussian rational times `π^{-n}`.
pub fn ball_kernel_exact(z: &[GaussianRational], w: &[GaussianRational]) -> Result<PiScaled> {
    let c = ball_kernel_coefficient(z, w)?;
    Ok(PiScaled::new(c, -(z.len() as i32)))
}

/// Real-valued polynomial `ρ` cutting out a hypersurface `{ρ = 0}`.
#[derive(Clone, Debug)]
pub struct DefiningFunction {
    rho: HermitianPolynomial<C64>,
}

impl DefiningFunction {
    /// Accepts `ρ` if it is real-valued up to rounding in its coefficients.
    pub fn new(rho: HermitianPolynomial<C64>) -> Result<Self> {
        let scale = rho.terms().map(|(_, _, c)| c.norm()).fold(1.0, f64::max);
        for (a, b, c) in rho.terms() {
            let mirror = rho.coefficient(b, a);
            if (c - mirror.conj()).norm() > FLOAT_ZERO_TOL * scale {
                return Err(Error::Unsupported("defining function is not real-valued".into()));
            }
        }
        Ok(Self { rho })
    }

    pub fn from_exact(rho: &HermitianPolynomial<GaussianRational>) -> Result<Self> {
        if !rho.is_real_valued() {
            return Err(Error::Unsupported("defining function is not real-valued".into()));
        }
        Ok(Self { rho: rho.to_c64() })
    }

    /// `|z|² − 1`
    pub fn sphere(n: usize) -> Self {
        let mut p = HermitianPolynomial::constant(n, C64::new(-1.0, 0.0));
        for i in 0..n {
            p = &p + &HermitianPolynomial::abs_sq(n, i);
        }
        Self { rho: p }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn polynomial(&self) -> &HermitianPolynomial<C64> {
        &self.rho
    }

    pub fn value(&self, p: &[C64]) -> Result<f64> {
        Ok(self.rho.eval_c64(p, p)?.re)
    }

    /// Multiplies `ρ` by a constant.
    pub fn scaled(&self, s: f64) -> Self {
        Self { rho: self.rho.scale(&C64::new(s, 0.0)) }
    }
}

/// Levi form at a boundary point.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LeviForm {
    /// `n − 1` eigenvalues of the normalized Levi form, ascending.
    Eigenvalues { values: Vec<f64> },
    /// `∂ρ` vanishes; the hypersurface is not smooth at the point.
    VanishingGradient { gradient_norm: f64 },
}

impl LeviForm {
    pub fn is_strictly_pseudoconvex(&self) -> bool {
        matches!(self, LeviForm::Eigenvalues { values } if values.iter().all(|&v| v > 0.0))
    }

    pub fn eigenvalues(&self) -> Option<&[f64]> {
        match self {
            LeviForm::Eigenvalues { values } => Some(values),
            LeviForm::VanishingGradient { .. } => None,
        }
    }
}

/// Eigenvalues of `∂∂̄ρ` restricted to the complex tangent space
/// `{v : Σ ∂ρ/∂z_i · v_i = 0}`, divided by `|∂ρ|`.
pub fn levi_form(rho: &DefiningFunction, p: &[C64]) -> Result<LeviForm> {
    let n = rho.dim();
    check_dim(n, p.len())?;
    let r = rho.value(p)?;
    if r.abs() > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary(r.abs()));
    }
    let poly = rho.polynomial();
    let grad: Vec<C64> = (0..n)
        .map(|i| poly.d_holo(i).eval_c64(p, p))
        .collect::<Result<_>>()?;
    let gnorm = norm_sqr(&grad).sqrt();
    if gnorm <= GRADIENT_TOL {
        return Ok(LeviForm::VanishingGradient { gradient_norm: gnorm });
    }
    let hess: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let di = poly.d_holo(i);
            (0..n).map(|j| di.d_anti(j).eval_c64(p, p)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let basis = tangent_basis(&grad);
    let k = basis.len();
    let mut m = vec![vec![C64::new(0.0, 0.0); k]; k];
    for a in 0..k {
        for b in 0..k {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    s += hess[i][j] * basis[a][i].conj() * basis[b][j];
                }
            }
            m[a][b] = s / gnorm;
        }
    }
    Ok(LeviForm::Eigenvalues { values: hermitian_eigenvalues(&m) })
}

/// Orthonormal basis of `conj(g)^⊥`, by Gram–Schmidt on the standard basis.
fn tangent_basis(g: &[C64]) -> Vec<Vec<C64>> {
    let n = g.len();
    let gn = norm_sqr(g).sqrt();
    let normal: Vec<C64> = g.iter().map(|c| c.conj() / gn).collect();
    let mut basis: Vec<Vec<C64>> = vec![normal];
    let mut candidates: Vec<(f64, Vec<C64>)> = Vec::new();
    for e in 0..n {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[e] = C64::new(1.0, 0.0);
        candidates.push((basis[0][e].norm(), v));
    }
    // least aligned with the normal first
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, mut v) in candidates {
        if basis.len() == n {
            break;
        }
        for b in &basis {
            let proj = hermitian_dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
        let vn = norm_sqr(&v).sqrt();
        if vn > 1e-8 {
            basis.push(v.into_iter().map(|x| x / vn).collect());
        }
    }
    basis.remove(0);
    basis
}
