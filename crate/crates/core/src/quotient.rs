//! Deck sums of the ball kernel and their push-forward to a quotient chart.
//!
//! For a finite group `Γ ⊂ U(n)` and a holomorphic `F: 𝔹ⁿ → Cⁿ` with
//! `F∘γ = F`, the coefficient identity
//!
//! ```text
//! Σ_γ K_𝔹(γz, w̄) det γ = K_base(F(z), conj F(w)) · J_F(z) · conj(J_F(w))
//! ```
//!
//! determines the base kernel off the branch locus `{J_F = 0}`.

use crate::ball::ball_kernel_raw;
use crate::complex::linalg::determinant;
use crate::complex::{Field, HermitianPolynomial, MultiIndex, C64};
use crate::error::{check_dim, Error, Result};
use crate::unitary::{cyclic_diagonal_group, Cyclotomic, FiniteUnitaryGroup};

/// `|J_F|` at or below this value is a branch point.
pub const BRANCH_TOL: f64 = 1e-12;

/// Tolerance for the numerical check `F∘γ = F` on floating input.
pub const INVARIANCE_TOL: f64 = 1e-12;

/// `Σ_γ K_𝔹(γz, w̄) det γ`
pub fn deck_sum_kernel(g: &FiniteUnitaryGroup<C64>, n: usize, z: &[C64], w: &[C64]) -> Result<C64> {
    check_dim(n, g.dim())?;
    check_dim(n, z.len())?;
    check_dim(n, w.len())?;
    let mut acc = C64::new(0.0, 0.0);
    for e in g.elements() {
        acc += ball_kernel_raw(&e.apply(z), w)? * e.determinant();
    }
    Ok(acc)
}

/// `Σ_γ K_𝔹(z, conj(γw)) conj(det γ)`, the same sum with the group acting on
/// the second argument.
pub fn dual_deck_sum_kernel(g: &FiniteUnitaryGroup<C64>, n: usize, z: &[C64], w: &[C64]) -> Result<C64> {
    check_dim(n, g.dim())?;
    check_dim(n, z.len())?;
    check_dim(n, w.len())?;
    let mut acc = C64::new(0.0, 0.0);
    for e in g.elements() {
        acc += ball_kernel_raw(z, &e.apply(w))? * e.determinant().conj();
    }
    Ok(acc)
}

/// Max over pairs of `|deck_sum − dual_deck_sum|`.
pub fn check_deck_sum_symmetry(g: &FiniteUnitaryGroup<C64>, n: usize, pairs: &[(Vec<C64>, Vec<C64>)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, w) in pairs {
        let a = deck_sum_kernel(g, n, z, w)?;
        let b = dual_deck_sum_kernel(g, n, z, w)?;
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}

/// A branched cover `F: 𝔹ⁿ → Cⁿ` invariant under a finite group.
#[derive(Clone, Debug)]
pub struct CoveringSpec {
    group: FiniteUnitaryGroup<C64>,
    map: Vec<HermitianPolynomial<C64>>,
    jacobian: Vec<Vec<HermitianPolynomial<C64>>>,
}

impl CoveringSpec {
    /// Checks `F∘γ = F` within [`INVARIANCE_TOL`] per coefficient.
    pub fn new(group: FiniteUnitaryGroup<C64>, map: Vec<HermitianPolynomial<C64>>) -> Result<Self> {
        let n = group.dim();
        check_dim(n, map.len())?;
        for p in &map {
            check_dim(n, p.dim())?;
            if !p.is_holomorphic() {
                return Err(Error::Unsupported("cover map must be holomorphic".into()));
            }
            for e in group.elements() {
                let diff = p.compose_linear(e.rows())?.try_sub(p)?;
                if diff.terms().any(|(_, _, c)| c.norm() > INVARIANCE_TOL) {
                    return Err(Error::Unsupported("cover map is not invariant under the group".into()));
                }
            }
        }
        let jacobian = map.iter().map(|p| (0..n).map(|j| p.d_holo(j)).collect()).collect();
        Ok(Self { group, map, jacobian })
    }

    /// Exact invariance check, then conversion to floating point.
    pub fn exact(group: &FiniteUnitaryGroup<Cyclotomic>, map: &[HermitianPolynomial<Cyclotomic>]) -> Result<Self> {
        for p in map {
            for e in group.elements() {
                if p.compose_linear(e.rows())? != *p {
                    return Err(Error::Unsupported("cover map is not invariant under the group".into()));
                }
            }
        }
        Self::new(group.to_c64(), map.iter().map(HermitianPolynomial::to_c64).collect())
    }

    /// `z ↦ z^k` on the disk with deck group `Z/k`.
    pub fn disk_power(k: u32) -> Self {
        let group = cyclic_diagonal_group(k, &[1]);
        let map = HermitianPolynomial::holomorphic_monomial(MultiIndex::new(vec![k]), Cyclotomic::one());
        Self::exact(&group, &[map]).expect("z^k is invariant under k-th roots of unity")
    }

    /// `(z_1, z_2) ↦ (z_1^k, z_1^{k−1} z_2)`, invariant under `⟨e^{2πi/k} I⟩`
    /// and locally biholomorphic off `z_1 = 0`.
    pub fn scalar_ball_quotient(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Unsupported("group order must be positive".into()));
        }
        let g = cyclic_diagonal_group(k, &[1, 1]);
        let m = |e: [u32; 2]| HermitianPolynomial::holomorphic_monomial(MultiIndex::new(e.to_vec()), Cyclotomic::one());
        Self::exact(&g, &[m([k, 0]), m([k - 1, 1])])
    }

    /// Identity cover of `𝔹ⁿ`.
    pub fn trivial(n: usize) -> Self {
        let map = (0..n).map(|i| HermitianPolynomial::var(n, i)).collect();
        Self::new(FiniteUnitaryGroup::trivial(n), map).expect("identity map is invariant")
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn group(&self) -> &FiniteUnitaryGroup<C64> {
        &self.group
    }

    pub fn sheets(&self) -> usize {
        self.group.order()
    }

    pub fn map(&self) -> &[HermitianPolynomial<C64>] {
        &self.map
    }

    pub fn apply(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.map.iter().map(|p| p.eval_holomorphic_c64(z)).collect()
    }

    /// `det (∂F_i/∂z_j)(z)`
    pub fn jacobian_determinant(&self, z: &[C64]) -> Result<C64> {
        let m: Vec<Vec<C64>> = self
            .jacobian
            .iter()
            .map(|row| row.iter().map(|p| p.eval_holomorphic_c64(z)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(determinant(&m))
    }

    fn nonbranch_jacobian(&self, z: &[C64]) -> Result<C64> {
        let j = self.jacobian_determinant(z)?;
        if j.norm() <= BRANCH_TOL {
            return Err(Error::BranchPoint(format!("J_F = {j:e} at {z:?}")));
        }
        Ok(j)
    }

    pub fn deck_sum(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        deck_sum_kernel(&self.group, self.dim(), z, w)
    }
}

/// Base kernel `K(F(z), conj F(w))` in the chart given by `F`.
pub fn pushforward_kernel(c: &CoveringSpec, z: &[C64], w: &[C64]) -> Result<C64> {
    let jz = c.nonbranch_jacobian(z)?;
    let jw = c.nonbranch_jacobian(w)?;
    Ok(c.deck_sum(z, w)? / (jz * jw.conj()))
}

/// `m · Σ_α z^α w̄^α / ‖z^α‖²` over multi-indices with `λ^α det γ = 1` for
/// every `γ = diag(λ)` in a diagonal group.
///
/// This equals the deck sum for diagonal groups and is computed from the
/// monomial norms `‖z^α‖² = πⁿ α!/(n + |α|)!` alone.
#[derive(Clone, Debug)]
pub struct IsotypicSeries {
    n: usize,
    order: usize,
    /// Per element: diagonal eigenvalues and determinant.
    diagonals: Vec<(Vec<C64>, C64)>,
}

/// Terms beyond this relative size are dropped once the tail bound is met.
const SERIES_REL_TOL: f64 = 1e-17;

impl IsotypicSeries {
    pub fn new(g: &FiniteUnitaryGroup<C64>) -> Result<Self> {
        let n = g.dim();
        let mut diagonals = Vec::new();
        for e in g.elements() {
            for i in 0..n {
                for j in 0..n {
                    if i != j && e.entry(i, j).norm() > 1e-14 {
                        return Err(Error::Unsupported("isotypic series needs a diagonal group".into()));
                    }
                }
            }
            diagonals.push(((0..n).map(|i| *e.entry(i, i)).collect(), e.determinant()));
        }
        Ok(Self { n, order: g.order(), diagonals })
    }

    fn admissible(&self, a: &MultiIndex) -> bool {
        self.diagonals.iter().all(|(lam, det)| {
            let v = lam.iter().zip(a.entries()).fold(*det, |acc, (l, &e)| acc * l.powu(e));
            (v - 1.0).norm() < 1e-9
        })
    }

    /// Evaluates the series; terms are summed by total degree until the
    /// geometric tail falls below `1e-17` relative.
    pub fn eval(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        check_dim(self.n, z.len())?;
        check_dim(self.n, w.len())?;
        let s: Vec<C64> = z.iter().zip(w).map(|(a, b)| a * b.conj()).collect();
        let q: f64 = s.iter().map(|x| x.norm()).sum();
        if q >= 1.0 {
            return Err(Error::NonConvergent(q));
        }
        let n = self.n;
        let ln_pi_n = n as f64 * std::f64::consts::PI.ln();
        let mut ln_fact = vec![0.0f64];
        let mut acc = C64::new(0.0, 0.0);
        let mut d: u32 = 0;
        loop {
            while ln_fact.len() <= n + d as usize {
                let k = ln_fact.len() as f64;
                ln_fact.push(ln_fact.last().unwrap() + k.ln());
            }
            let mut layer = C64::new(0.0, 0.0);
            for a in MultiIndex::all_of_degree(n, d) {
                if !self.admissible(&a) {
                    continue;
                }
                let mut ln_mag = ln_fact[n + d as usize] - ln_pi_n;
                let mut phase = 0.0;
                let mut zero = false;
                for (x, &e) in s.iter().zip(a.entries()) {
                    if e == 0 {
                        continue;
                    }
                    if x.norm() == 0.0 {
                        zero = true;
                        break;
                    }
                    ln_mag += e as f64 * x.norm().ln() - ln_fact[e as usize];
                    phase += e as f64 * x.arg();
                }
                if !zero {
                    layer += C64::from_polar(ln_mag.exp(), phase);
                }
            }
            acc += layer;
            // layer d+1 is bounded by C(n+d+1, n) q^{d+1} n!/πⁿ-scale terms; stop once
            // that bound and the geometric remainder are negligible
            let next = ((ln_fact[n + d as usize] + ((n + d as usize + 1) as f64).ln() - ln_fact[d as usize + 1])
                + (d as f64 + 1.0) * q.ln()
                - ln_pi_n)
                .exp();
            let ratio = q * (n as f64 + d as f64 + 2.0) / (d as f64 + 2.0);
            if ratio < 1.0 && next / (1.0 - ratio) <= SERIES_REL_TOL * acc.norm().max(1e-300) {
                break;
            }
            if d > 20_000 {
                return Err(Error::NonConvergent(q));
            }
            d += 1;
        }
        Ok(acc * self.order as f64)
    }
}

/// `(f, f)^*K_disk` for `f(z) = z^k`: `k² z^{k−1} w̄^{k−1} / (π (1 − zᵏ w̄ᵏ)²)`.
pub fn disk_power_pullback(k: u32, z: C64, w: C64) -> Result<C64> {
    let base = ball_kernel_raw(&[z.powu(k)], &[w.powu(k)])?;
    let jz = z.powu(k - 1) * k as f64;
    let jw = w.powu(k - 1) * k as f64;
    Ok(base * jz * jw.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::hermitian_dot;
    use crate::unitary::cyclic_diagonal_group;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn minus_identity_cover() -> CoveringSpec {
        CoveringSpec::scalar_ball_quotient(2).unwrap()
    }

    #[test]
    fn trivial_group_is_ball_kernel() {
        let g = FiniteUnitaryGroup::<Cyclotomic>::trivial(2).to_c64();
        let (z, w) = ([c(0.1, 0.2), c(-0.3, 0.0)], [c(0.0, 0.5), c(0.2, -0.1)]);
        assert_eq!(deck_sum_kernel(&g, 2, &z, &w).unwrap(), ball_kernel_raw(&z, &w).unwrap());
        assert_eq!(check_deck_sum_symmetry(&g, 2, &[(z.to_vec(), w.to_vec())]).unwrap(), 0.0);
        let t = CoveringSpec::trivial(2);
        assert!((pushforward_kernel(&t, &z, &w).unwrap() - ball_kernel_raw(&z, &w).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn disk_sign_group_closed_form() {
        let g = cyclic_diagonal_group(2, &[1]).to_c64();
        let (z, w) = (c(0.3, 0.4), c(-0.2, 0.5));
        let s = z * w.conj();
        let expected = 4.0 * s / (PI * (1.0 - s * s).powi(2));
        assert!((deck_sum_kernel(&g, 1, &[z], &[w]).unwrap() - expected).norm() < 1e-14);
        assert_eq!(deck_sum_kernel(&g, 1, &[c(0.0, 0.0)], &[w]).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn square_map_pushes_to_disk_kernel() {
        let cov = CoveringSpec::disk_power(2);
        let (z, w) = (c(0.3, -0.4), c(0.6, 0.1));
        let expected = 1.0 / (PI * (1.0 - z * z * (w * w).conj()).powi(2));
        assert!((pushforward_kernel(&cov, &[z], &[w]).unwrap() - expected).norm() < 1e-13);
        assert!(matches!(pushforward_kernel(&cov, &[c(0.0, 0.0)], &[w]), Err(Error::BranchPoint(_))));
    }

    #[test]
    fn minus_identity_chart() {
        let cov = minus_identity_cover();
        let (z, w) = ([c(0.3, 0.1), c(-0.2, 0.4)], [c(0.1, -0.5), c(0.3, 0.2)]);
        let s = hermitian_dot(&z, &w);
        let lhs = 2.0 / (PI * PI) * ((1.0 - s).powi(-3) + (1.0 + s).powi(-3));
        let jz = 2.0 * z[0] * z[0];
        let jw = 2.0 * w[0] * w[0];
        let push = pushforward_kernel(&cov, &z, &w).unwrap();
        assert!((push - lhs / (jz * jw.conj())).norm() < 1e-12 * push.norm());
    }

    #[test]
    fn non_invariant_map_rejected() {
        let g = cyclic_diagonal_group(2, &[1]);
        let m = HermitianPolynomial::holomorphic_monomial(MultiIndex::new(vec![1]), Cyclotomic::one());
        assert!(CoveringSpec::exact(&g, &[m]).is_err());
    }

    #[test]
    fn isotypic_series_matches_deck_sum() {
        for g in [cyclic_diagonal_group(2, &[1, 1]), cyclic_diagonal_group(4, &[1, 1]), cyclic_diagonal_group(3, &[1, 2])] {
            let g = g.to_c64();
            let iso = IsotypicSeries::new(&g).unwrap();
            let (z, w) = ([c(0.3, 0.1), c(-0.2, 0.4)], [c(0.1, -0.5), c(0.3, 0.2)]);
            let a = deck_sum_kernel(&g, 2, &z, &w).unwrap();
            let b = iso.eval(&z, &w).unwrap();
            assert!((a - b).norm() < 1e-13 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn disk_power_pullback_matches_deck_sum() {
        for k in 2..=5 {
            let cov = CoveringSpec::disk_power(k);
            let (z, w) = (c(0.5, 0.2), c(-0.1, 0.6));
            let a = cov.deck_sum(&[z], &[w]).unwrap();
            let b = disk_power_pullback(k, z, w).unwrap();
            assert!((a - b).norm() < 1e-13, "k = {k}");
        }
    }

    fn pt() -> impl Strategy<Value = Vec<C64>> {
        (0.05f64..0.65, 0.0f64..6.3, 0.05f64..0.65, 0.0f64..6.3)
            .prop_map(|(r1, t1, r2, t2)| vec![C64::from_polar(r1, t1), C64::from_polar(r2, t2)])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deck_sum_is_equivariant(z in pt(), w in pt()) {
            let g = cyclic_diagonal_group(4, &[1, 1]).to_c64();
            let base = deck_sum_kernel(&g, 2, &z, &w).unwrap();
            for e in g.elements() {
                let v = deck_sum_kernel(&g, 2, &e.apply(&z), &w).unwrap() * e.determinant();
                prop_assert!((v - base).norm() <= 1e-12 * base.norm().max(1.0));
            }
        }

        #[test]
        fn pushforward_is_well_defined_and_hermitian(z in pt(), w in pt()) {
            let cov = minus_identity_cover();
            let a = pushforward_kernel(&cov, &z, &w).unwrap();
            let b = pushforward_kernel(&cov, &w, &z).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
            let mz: Vec<C64> = z.iter().map(|x| -x).collect();
            let c2 = pushforward_kernel(&cov, &mz, &w).unwrap();
            prop_assert!((a - c2).norm() <= 1e-10 * a.norm().max(1.0));
        }

        #[test]
        fn pushforward_gram_is_psd(pts in prop::collection::vec(pt(), 2..5)) {
            let cov = minus_identity_cover();
            let g: Vec<Vec<C64>> = pts.iter()
                .map(|z| pts.iter().map(|w| pushforward_kernel(&cov, z, w).unwrap()).collect())
                .collect();
            let scale = g.iter().flatten().map(|x| x.norm()).fold(1.0, f64::max);
            let ev = crate::complex::linalg::hermitian_eigenvalues(&g);
            prop_assert!(ev[0] >= -1e-10 * scale);
        }
    }
}
