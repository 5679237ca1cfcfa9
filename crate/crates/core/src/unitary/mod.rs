//! Finite subgroups of `U(n)`.
//!
//! Matrices are generic over a [`GroupScalar`]: exact cyclotomic entries are
//! preferred, with a floating fallback for input that is only known
//! numerically.

pub mod cyclotomic;
pub mod io;

use std::collections::HashMap;
use std::fmt;

use crate::complex::linalg::{determinant, nullspace, rank};
use crate::complex::{Field, GaussianRational, C64};
use crate::error::{check_dim, Error, Result};

pub use cyclotomic::Cyclotomic;

/// Entry-wise tolerance for floating matrix comparison.
pub const FLOAT_DEDUP_TOL: f64 = 1e-10;

/// Allowed `max |U†U − I|` for floating input.
pub const UNITARY_TOL: f64 = 1e-12;

/// Scalars usable as matrix entries of a finite group.
pub trait GroupScalar: Field {
    /// Canonical text form for exact scalars; `None` for floating ones.
    fn exact_key(&self) -> Option<String>;

    /// Entry-wise equality used to deduplicate group elements.
    fn same(&self, o: &Self) -> bool {
        self == o
    }

    /// Brings a set of entries to a common representation before closure.
    fn unify(_entries: &mut [Self]) {}
}

impl GroupScalar for C64 {
    fn exact_key(&self) -> Option<String> {
        None
    }
    fn same(&self, o: &Self) -> bool {
        (self - o).norm() <= FLOAT_DEDUP_TOL
    }
}

impl GroupScalar for GaussianRational {
    fn exact_key(&self) -> Option<String> {
        Some(self.to_string())
    }
}

impl GroupScalar for Cyclotomic {
    fn exact_key(&self) -> Option<String> {
        // constants print alike in every order; other entries share the group's order
        Some(self.to_string())
    }
    fn unify(entries: &mut [Self]) {
        use num_integer::Integer;
        let l = entries.iter().fold(1u32, |acc, e| acc.lcm(&e.order()));
        for e in entries.iter_mut() {
            *e = e.lift(l);
        }
    }
}

/// Square matrix over `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    rows: Vec<Vec<F>>,
}

impl<F: GroupScalar> Matrix<F> {
    pub fn new(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            check_dim(n, r.len())?;
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n)
                .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
                .collect(),
        }
    }

    pub fn diagonal(d: Vec<F>) -> Self {
        let n = d.len();
        let mut m = Self::identity(n);
        for (i, x) in d.into_iter().enumerate() {
            m.rows[i][i] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &F {
        &self.rows[i][j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(F::zero(), |acc, k| {
                            if self.rows[i][k].is_zero() || o.rows[k][j].is_zero() {
                                acc
                            } else {
                                acc.plus(&self.rows[i][k].times(&o.rows[k][j]))
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// `M v`
    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc.plus(&a.times(b))))
            .collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.dim();
        Self { rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].conj()).collect()).collect() }
    }

    pub fn determinant(&self) -> F {
        determinant(&self.rows)
    }

    pub fn same(&self, o: &Self) -> bool {
        self.rows
            .iter()
            .flatten()
            .zip(o.rows.iter().flatten())
            .all(|(a, b)| a.same(b))
    }

    pub fn is_identity(&self) -> bool {
        self.same(&Self::identity(self.dim()))
    }

    /// `max |(U†U − I)_{ij}|`
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.conj_transpose().mul(self);
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.rows[i][j].to_c64() - target).norm());
            }
        }
        worst
    }

    /// Exact unitarity for exact entries; within [`UNITARY_TOL`] otherwise.
    pub fn check_unitary(&self) -> Result<()> {
        let ok = if F::is_exact() {
            self.conj_transpose().mul(self) == Self::identity(self.dim())
        } else {
            self.unitarity_defect() <= UNITARY_TOL
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotUnitary(self.unitarity_defect()))
        }
    }

    /// Smallest `k ≥ 1` with `Mᵏ = I`.
    pub fn order(&self, bound: u32) -> Result<u32> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Ok(k);
            }
            p = p.mul(self);
        }
        Err(Error::OrderBoundExceeded(bound))
    }

    pub fn to_c64(&self) -> Matrix<C64> {
        Matrix { rows: self.rows.iter().map(|r| r.iter().map(Field::to_c64).collect()).collect() }
    }

    fn key(&self) -> Option<String> {
        let parts: Option<Vec<String>> = self.rows.iter().flatten().map(GroupScalar::exact_key).collect();
        parts.map(|p| p.join(","))
    }

    /// `M − I`
    fn minus_identity(&self) -> Vec<Vec<F>> {
        let mut rows = self.rows.clone();
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = r[i].minus(&F::one());
        }
        rows
    }
}

impl<F: GroupScalar + fmt::Display> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

/// A finite group of unitary matrices, identity first.
#[derive(Clone, Debug)]
pub struct FiniteUnitaryGroup<F: GroupScalar> {
    dim: usize,
    elements: Vec<Matrix<F>>,
}

impl<F: GroupScalar> FiniteUnitaryGroup<F> {
    pub fn trivial(n: usize) -> Self {
        Self { dim: n, elements: vec![Matrix::identity(n)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix<F>] {
        &self.elements
    }

    pub fn position(&self, m: &Matrix<F>) -> Option<usize> {
        self.elements.iter().position(|e| e.same(m))
    }

    pub fn contains(&self, m: &Matrix<F>) -> bool {
        self.position(m).is_some()
    }

    /// Closure under products and inverses.
    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.contains(&a.conj_transpose())
                && self.elements.iter().all(|b| self.contains(&a.mul(b)))
        })
    }

    pub fn to_c64(&self) -> FiniteUnitaryGroup<C64> {
        FiniteUnitaryGroup { dim: self.dim, elements: self.elements.iter().map(Matrix::to_c64).collect() }
    }

    /// Sorted element keys; order-independent fingerprint of the group.
    pub fn canonical_keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self
            .elements
            .iter()
            .map(|m| {
                m.key().unwrap_or_else(|| {
                    m.rows
                        .iter()
                        .flatten()
                        .map(|x| {
                            let c = x.to_c64();
                            format!("{:.9}:{:.9}", c.re + 0.0, c.im + 0.0)
                        })
                        .collect::<Vec<_>>()
                        .join(",")
                })
            })
            .collect();
        keys.sort();
        keys
    }
}

/// Closure of `generators` under multiplication.
///
/// Fails if a generator is not unitary or the closure grows beyond
/// `max_order` elements.
pub fn generate_group<F: GroupScalar>(generators: &[Matrix<F>], max_order: usize) -> Result<FiniteUnitaryGroup<F>> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Unsupported("at least one generator is required".into()))?;
    let n = first.dim();
    let mut gens = Vec::with_capacity(generators.len());
    for g in generators {
        check_dim(n, g.dim())?;
        g.check_unitary()?;
        gens.push(g.clone());
    }
    // common representation across generators
    if F::is_exact() {
        let mut flat: Vec<F> = gens.iter().flat_map(|g| g.rows.iter().flatten().cloned()).collect();
        F::unify(&mut flat);
        let per = n * n;
        for (g, chunk) in gens.iter_mut().zip(flat.chunks(per)) {
            g.rows = chunk.chunks(n).map(<[F]>::to_vec).collect();
        }
    }
    let mut elements = vec![Matrix::identity(n)];
    let mut index: HashMap<String, usize> = HashMap::new();
    if let Some(k) = elements[0].key() {
        index.insert(k, 0);
    }
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in &gens {
            let p = g.mul(&current);
            let known = match p.key() {
                Some(k) => index.contains_key(&k),
                None => elements.iter().any(|e| e.same(&p)),
            };
            if known {
                continue;
            }
            if elements.len() == max_order {
                return Err(Error::GroupOverflow(max_order));
            }
            if let Some(k) = p.key() {
                index.insert(k, elements.len());
            }
            elements.push(p);
        }
    }
    Ok(FiniteUnitaryGroup { dim: n, elements })
}

/// Outcome of the fixed-point test.
#[derive(Clone, Debug)]
pub struct FixedPointCheck<F: GroupScalar> {
    pub fixed_point_free: bool,
    /// A non-identity element with eigenvalue 1 and a corresponding eigenvector.
    pub witness: Option<(Matrix<F>, Vec<F>)>,
}

/// True iff no non-identity element has eigenvalue 1, i.e. `Γ` acts freely on
/// the unit sphere.
pub fn is_fixed_point_free<F: GroupScalar>(g: &FiniteUnitaryGroup<F>) -> FixedPointCheck<F> {
    for e in g.elements() {
        if e.is_identity() {
            continue;
        }
        let ns = nullspace(&e.minus_identity(), g.dim());
        if let Some(v) = ns.into_iter().next() {
            return FixedPointCheck { fixed_point_free: false, witness: Some((e.clone(), v)) };
        }
    }
    FixedPointCheck { fixed_point_free: true, witness: None }
}

/// True iff `γ ≠ I` and the eigenvalue 1 has multiplicity `n − 1`.
///
/// Finite order is checked first, up to `order_bound`.
pub fn is_reflection<F: GroupScalar>(gamma: &Matrix<F>, order_bound: u32) -> Result<bool> {
    gamma.order(order_bound)?;
    if gamma.is_identity() {
        return Ok(false);
    }
    // finite order implies diagonalizable, so rank(γ − I) counts non-unit eigenvalues
    Ok(rank(&gamma.minus_identity()) == 1)
}

/// Elements of `Γ` that are reflections.
pub fn reflections<F: GroupScalar>(g: &FiniteUnitaryGroup<F>) -> Vec<Matrix<F>> {
    let bound = g.order() as u32;
    g.elements()
        .iter()
        .filter(|e| is_reflection(*e, bound).unwrap_or(false))
        .cloned()
        .collect()
}

/// `diag(ζ_N^{k_1}, …, ζ_N^{k_n})`
pub fn diagonal_roots(order: u32, exponents: &[i64]) -> Matrix<Cyclotomic> {
    Matrix::diagonal(exponents.iter().map(|&k| Cyclotomic::root_of_unity(order, k)).collect())
}

/// `⟨diag(ζ_N^{k_1}, …, ζ_N^{k_n})⟩`
pub fn cyclic_diagonal_group(order: u32, exponents: &[i64]) -> FiniteUnitaryGroup<Cyclotomic> {
    generate_group(&[diagonal_roots(order, exponents)], order as usize).expect("diagonal root-of-unity matrices are unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn orders_of_listed_groups() {
        assert_eq!(cyclic_diagonal_group(4, &[1, 1]).order(), 4);
        assert_eq!(cyclic_diagonal_group(3, &[1, 2]).order(), 3);
        let klein = generate_group(&[diagonal_roots(2, &[1, 0]), diagonal_roots(2, &[0, 1])], 16).unwrap();
        assert_eq!(klein.order(), 4);
        assert!(klein.is_closed());
    }

    #[test]
    fn mixed_root_orders_unify() {
        // diag(i, 1) and diag(1, ω) generate a cyclic group of order 12
        let g = generate_group(&[diagonal_roots(4, &[1, 0]), diagonal_roots(3, &[0, 1])], 64).unwrap();
        assert_eq!(g.order(), 12);
        assert!(g.is_closed());
    }

    #[test]
    fn overflow_and_non_unitary() {
        let g = cyclic_diagonal_group(5, &[1, 1]);
        assert!(matches!(generate_group(&[g.elements()[1].clone()], 3), Err(Error::GroupOverflow(3))));
        let bad = Matrix::diagonal(vec![Cyclotomic::from_i64(2), Cyclotomic::one()]);
        assert!(matches!(generate_group(&[bad], 8), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn float_fallback_matches_exact() {
        let exact = cyclic_diagonal_group(6, &[1, 5]);
        let gen = exact.elements()[1].to_c64();
        let float = generate_group(&[gen], 64).unwrap();
        assert_eq!(float.order(), 6);
        assert!(float.is_closed());
    }

    #[test]
    fn fixed_point_free_examples() {
        assert!(is_fixed_point_free(&cyclic_diagonal_group(4, &[1, 1])).fixed_point_free);
        let r = is_fixed_point_free(&cyclic_diagonal_group(2, &[1, 0]));
        assert!(!r.fixed_point_free);
        let (_, v) = r.witness.unwrap();
        assert!(v[0].is_zero() && !v[1].is_zero());
        assert!(is_fixed_point_free(&FiniteUnitaryGroup::<Cyclotomic>::trivial(2)).fixed_point_free);
    }

    #[test]
    fn reflection_examples() {
        assert!(is_reflection(&diagonal_roots(2, &[1, 0]), 8).unwrap());
        assert!(!is_reflection(&diagonal_roots(4, &[1, 1]), 8).unwrap());
        assert!(!is_reflection(&Matrix::<Cyclotomic>::identity(2), 8).unwrap());
        assert!(matches!(is_reflection(&diagonal_roots(7, &[1, 0]), 3), Err(Error::OrderBoundExceeded(3))));
    }

    #[test]
    fn determinants_are_exact() {
        let g = diagonal_roots(4, &[1, 1]);
        assert_eq!(g.determinant(), Cyclotomic::from_i64(-1));
    }

    fn unit_vector() -> impl Strategy<Value = [C64; 2]> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |t| t.0.abs() + t.1.abs() + t.2.abs() + t.3.abs() > 1e-3)
            .prop_map(|(a, b, c, d)| {
                let v = [C64::new(a, b), C64::new(c, d)];
                let r = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                [v[0] / r, v[1] / r]
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn fixed_point_free_groups_move_every_sphere_point(v in unit_vector(), which in 0usize..3) {
            let g = [cyclic_diagonal_group(4, &[1, 1]), cyclic_diagonal_group(3, &[1, 1]), cyclic_diagonal_group(5, &[1, 2])][which].clone();
            prop_assert!(is_fixed_point_free(&g).fixed_point_free);
            for e in g.to_c64().elements().iter().skip(1) {
                let w = e.apply(&v);
                let d = ((w[0] - v[0]).norm_sqr() + (w[1] - v[1]).norm_sqr()).sqrt();
                prop_assert!(d > 0.0);
            }
        }

        #[test]
        fn fixed_point_free_groups_have_no_reflections(order in 2u32..7, k in 1i64..6) {
            let g = cyclic_diagonal_group(order, &[k, 1]);
            if is_fixed_point_free(&g).fixed_point_free && g.order() > 1 {
                prop_assert!(reflections(&g).is_empty());
            }
        }
    }
}
