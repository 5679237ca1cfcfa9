//! Invariant polynomials of a finite unitary group.
//!
//! The basic map is assembled degree by degree: at degree `d` the invariant
//! space is spanned by Reynolds images of the degree-`d` monomials, and a new
//! generator is kept only if it lies outside the span of products of the
//! generators already found. Generation stops at the Noether bound `|Γ|`; the
//! spanning claim is then re-checked up to `2|Γ|`.

use crate::complex::linalg::{nullspace, rank, row_reduce};
use crate::complex::{Field, HermitianPolynomial, MultiIndex};
use crate::error::{Error, Result};
use crate::unitary::{FiniteUnitaryGroup, GroupScalar};

type Poly<F> = HermitianPolynomial<F>;

/// `(1/|Γ|) Σ_γ f∘γ`
pub fn reynolds<F: GroupScalar>(f: &Poly<F>, g: &FiniteUnitaryGroup<F>) -> Result<Poly<F>> {
    if !f.is_holomorphic() {
        return Err(Error::Unsupported("Reynolds averaging expects a holomorphic polynomial".into()));
    }
    let mut acc = Poly::zero(f.dim());
    for e in g.elements() {
        acc = acc.try_add(&f.compose_linear(e.rows())?)?;
    }
    let inv = F::from_i64(g.order() as i64).inverse().expect("group order is positive");
    Ok(acc.scale(&inv))
}

/// True iff `p∘γ = p` for every `γ ∈ Γ`.
pub fn is_invariant<F: GroupScalar>(p: &Poly<F>, g: &FiniteUnitaryGroup<F>) -> Result<bool> {
    for e in g.elements() {
        if p.compose_linear(e.rows())? != *p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal homogeneous generators of the invariant algebra.
#[derive(Clone, Debug)]
pub struct BasicMap<F: Field> {
    dim: usize,
    generators: Vec<Poly<F>>,
    degrees: Vec<u32>,
}

impl<F: Field> BasicMap<F> {
    /// Wraps a given list of polynomials (homogeneity is not required).
    pub fn from_polynomials(dim: usize, generators: Vec<Poly<F>>) -> Result<Self> {
        for p in &generators {
            crate::error::check_dim(dim, p.dim())?;
        }
        let degrees = generators.iter().map(Poly::holomorphic_degree).collect();
        Ok(Self { dim, generators, degrees })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Poly<F>] {
        &self.generators
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `Q(z) = (p_1(z), …, p_N(z))` in floating point.
    pub fn eval_c64(&self, z: &[crate::C64]) -> Result<Vec<crate::C64>> {
        self.generators.iter().map(|p| p.to_c64().eval_holomorphic_c64(z)).collect()
    }

    fn all_homogeneous(&self) -> bool {
        self.generators.iter().all(|p| p.is_homogeneous_holomorphic().is_some())
    }
}

/// Coefficient vector of a homogeneous polynomial against a monomial list.
fn coefficients<F: Field>(p: &Poly<F>, monomials: &[MultiIndex]) -> Vec<F> {
    let zero = MultiIndex::zero(p.dim());
    monomials.iter().map(|a| p.coefficient(a, &zero)).collect()
}

/// Rescales so the graded-lex earliest coefficient is 1.
fn normalize<F: Field>(p: Poly<F>) -> Poly<F> {
    let lead = p.terms().next().map(|(_, _, c)| c.inverse().expect("stored coefficients are nonzero"));
    match lead {
        Some(inv) => p.scale(&inv),
        None => p,
    }
}

/// Graded pieces of the invariant algebra, computed lazily.
struct InvariantSpaces<'a, F: GroupScalar> {
    group: &'a FiniteUnitaryGroup<F>,
    /// `bases[d]`: a basis of degree-`d` invariants (Reynolds images in RREF).
    bases: Vec<Vec<Poly<F>>>,
}

impl<'a, F: GroupScalar> InvariantSpaces<'a, F> {
    fn new(group: &'a FiniteUnitaryGroup<F>) -> Self {
        let n = group.dim();
        Self { group, bases: vec![vec![Poly::one(n)]] }
    }

    /// Reynolds images of the degree-`d` monomials, graded-lex order.
    fn candidates(&self, d: u32) -> Result<Vec<Poly<F>>> {
        let n = self.group.dim();
        MultiIndex::all_of_degree(n, d)
            .into_iter()
            .map(|a| reynolds(&Poly::holomorphic_monomial(a, F::one()), self.group))
            .collect()
    }

    fn basis(&mut self, d: u32) -> Result<&[Poly<F>]> {
        while self.bases.len() <= d as usize {
            let k = self.bases.len() as u32;
            let monos = MultiIndex::all_of_degree(self.group.dim(), k);
            let mut rows: Vec<Vec<F>> = self.candidates(k)?.iter().map(|p| coefficients(p, &monos)).collect();
            let piv = row_reduce(&mut rows);
            let basis = rows
                .into_iter()
                .take(piv.len())
                .map(|r| {
                    let terms = monos.iter().zip(r).map(|(a, c)| (a.clone(), MultiIndex::zero(a.len()), c));
                    Poly::from_terms(self.group.dim(), terms).expect("dimensions agree")
                })
                .collect();
            self.bases.push(basis);
        }
        Ok(&self.bases[d as usize])
    }
}

/// Degree-`d` products `g · b` with `g` a generator and `b` a degree-`(d − deg g)` invariant.
fn decomposables<F: GroupScalar>(
    spaces: &mut InvariantSpaces<'_, F>,
    gens: &[(Poly<F>, u32)],
    d: u32,
) -> Result<Vec<Poly<F>>> {
    let mut out = Vec::new();
    for (g, k) in gens {
        if *k >= d {
            continue;
        }
        let basis = spaces.basis(d - k)?.to_vec();
        for b in basis {
            out.push(g.try_mul(&b)?);
        }
    }
    Ok(out)
}

/// Cartan's basic map for `Γ`.
///
/// Generators are selected greedily in increasing degree, graded-lex order
/// within a degree, up to the Noether bound `|Γ|`. The result is then checked
/// to span every invariant space up to degree `2|Γ|`.
pub fn compute_basic_map<F: GroupScalar>(g: &FiniteUnitaryGroup<F>) -> Result<BasicMap<F>> {
    let n = g.dim();
    let bound = g.order() as u32;
    let mut spaces = InvariantSpaces::new(g);
    let mut gens: Vec<(Poly<F>, u32)> = Vec::new();
    for d in 1..=bound {
        let monos = MultiIndex::all_of_degree(n, d);
        let mut span: Vec<Vec<F>> = decomposables(&mut spaces, &gens, d)?
            .iter()
            .map(|p| coefficients(p, &monos))
            .collect();
        let mut r = rank(&span);
        for cand in spaces.candidates(d)? {
            if cand.is_zero() {
                continue;
            }
            span.push(coefficients(&cand, &monos));
            let r2 = rank(&span);
            if r2 > r {
                r = r2;
                gens.push((normalize(cand), d));
            } else {
                span.pop();
            }
        }
    }
    let map = BasicMap {
        dim: n,
        degrees: gens.iter().map(|(_, d)| *d).collect(),
        generators: gens.into_iter().map(|(p, _)| p).collect(),
    };
    if let Some(d) = spanning_failure(&map, g, 2 * bound)? {
        return Err(Error::Unsupported(format!("basic map fails to span invariants of degree {d}")));
    }
    Ok(map)
}

/// First degree `≤ max_degree` where products of the generators fail to span
/// the invariants, if any.
pub fn spanning_failure<F: GroupScalar>(
    map: &BasicMap<F>,
    g: &FiniteUnitaryGroup<F>,
    max_degree: u32,
) -> Result<Option<u32>> {
    let mut spaces = InvariantSpaces::new(g);
    let gens: Vec<(Poly<F>, u32)> = map.generators.iter().cloned().zip(map.degrees.iter().copied()).collect();
    for d in 1..=max_degree {
        let monos = MultiIndex::all_of_degree(g.dim(), d);
        let mut span: Vec<Vec<F>> = decomposables(&mut spaces, &gens, d)?
            .iter()
            .map(|p| coefficients(p, &monos))
            .collect();
        for (p, k) in &gens {
            if *k == d {
                span.push(coefficients(p, &monos));
            }
        }
        let target = spaces.basis(d)?.len();
        if rank(&span) < target {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// `dim` of the degree-`d` invariants by averaging traces of `γ` on degree-`d`
/// polynomials. Independent of the Reynolds-image rank used elsewhere.
pub fn invariant_dimension_by_traces<F: GroupScalar>(g: &FiniteUnitaryGroup<F>, d: u32) -> Result<usize> {
    let n = g.dim();
    let zero = MultiIndex::zero(n);
    let monos = MultiIndex::all_of_degree(n, d);
    let mut total = F::zero();
    for e in g.elements() {
        for a in &monos {
            let image = Poly::holomorphic_monomial(a.clone(), F::one()).compose_linear(e.rows())?;
            total = total.plus(&image.coefficient(a, &zero));
        }
    }
    let avg = total.times(&F::from_i64(g.order() as i64).inverse().expect("nonzero order"));
    let v = avg.to_c64();
    if v.im.abs() > 1e-9 || (v.re - v.re.round()).abs() > 1e-9 {
        return Err(Error::Unsupported(format!("trace average {v} is not an integer")));
    }
    if F::is_exact() && avg != F::from_i64(v.re.round() as i64) {
        return Err(Error::Unsupported("trace average is not an exact integer".into()));
    }
    Ok(v.re.round() as usize)
}

/// Degree-`d` invariant dimension from the rank of Reynolds images.
pub fn invariant_dimension<F: GroupScalar>(g: &FiniteUnitaryGroup<F>, d: u32) -> Result<usize> {
    let mut spaces = InvariantSpaces::new(g);
    Ok(spaces.basis(d)?.len())
}

/// A polynomial relation `q(w_1, …, w_N)` with `q(p_1, …, p_N) ≡ 0`.
#[derive(Clone, Debug)]
pub struct Syzygy<F: Field> {
    pub relation: Poly<F>,
    /// Degree in `z` after substitution (weighted degree of `q`).
    pub weighted_degree: u32,
}

/// Substitutes the generators into `q` exactly.
pub fn substitute<F: Field>(q: &Poly<F>, map: &BasicMap<F>) -> Result<Poly<F>> {
    q.compose(map.generators())
}

/// Relations among the components of `map` with ordinary degree in `w` at
/// most `degree_bound`.
///
/// For homogeneous components the relations are graded by weighted degree and
/// only minimal generators of the relation ideal are returned: at each
/// weighted degree, relations already implied by multiplying earlier ones by
/// monomials are discarded. Each returned relation is verified exactly by
/// substitution.
pub fn find_syzygies<F: Field>(map: &BasicMap<F>, degree_bound: u32) -> Result<Vec<Syzygy<F>>> {
    if degree_bound < 2 {
        return Err(Error::Unsupported("syzygy degree bound must be at least 2".into()));
    }
    let nw = map.len();
    if nw == 0 {
        return Ok(Vec::new());
    }
    let all_w: Vec<MultiIndex> = MultiIndex::all_up_to_degree(nw, degree_bound)
        .into_iter()
        .filter(|b| !b.is_zero())
        .collect();
    let weight = |b: &MultiIndex| -> u32 { b.entries().iter().zip(&map.degrees).map(|(e, d)| e * d).sum() };

    // w-monomial images, cached
    let images: Vec<Poly<F>> = all_w
        .iter()
        .map(|b| substitute(&Poly::holomorphic_monomial(b.clone(), F::one()), map))
        .collect::<Result<_>>()?;

    let groups: Vec<(u32, Vec<usize>)> = if map.all_homogeneous() {
        let max_w = all_w.iter().map(&weight).max().unwrap_or(0);
        (1..=max_w)
            .map(|t| (t, (0..all_w.len()).filter(|&i| weight(&all_w[i]) == t).collect()))
            .filter(|(_, v): &(u32, Vec<usize>)| v.len() > 1)
            .collect()
    } else {
        vec![(0, (0..all_w.len()).collect())]
    };

    let mut found: Vec<Syzygy<F>> = Vec::new();
    for (t, idx) in groups {
        // columns: w-monomials; rows: z-monomials of the images
        let mut zmonos: Vec<MultiIndex> = idx
            .iter()
            .flat_map(|&i| images[i].terms().map(|(a, _, _)| a.clone()).collect::<Vec<_>>())
            .collect();
        zmonos.sort();
        zmonos.dedup();
        let rows: Vec<Vec<F>> = zmonos
            .iter()
            .map(|a| idx.iter().map(|&i| images[i].coefficient(a, &MultiIndex::zero(map.dim))).collect())
            .collect();
        let ns = nullspace(&rows, idx.len());
        if ns.is_empty() {
            continue;
        }
        let as_poly = |v: &[F]| -> Poly<F> {
            let mut q = Poly::zero(nw);
            for (c, &i) in v.iter().zip(&idx) {
                q.add_term(all_w[i].clone(), MultiIndex::zero(nw), c.clone());
            }
            q
        };
        let local = |q: &Poly<F>| -> Vec<F> {
            idx.iter().map(|&i| q.coefficient(&all_w[i], &MultiIndex::zero(nw))).collect()
        };
        // span of ideal multiples of earlier relations landing in this group
        let mut span: Vec<Vec<F>> = Vec::new();
        for s in &found {
            for b in MultiIndex::all_up_to_degree(nw, degree_bound) {
                if weight(&b) + s.weighted_degree != t && map.all_homogeneous() {
                    continue;
                }
                let prod = s.relation.try_mul(&Poly::holomorphic_monomial(b, F::one()))?;
                if prod.holomorphic_degree() > degree_bound {
                    continue;
                }
                span.push(local(&prod));
            }
        }
        let mut r = rank(&span);
        for v in ns {
            span.push(v.clone());
            let r2 = rank(&span);
            if r2 == r {
                span.pop();
                continue;
            }
            r = r2;
            let q = normalize(as_poly(&v));
            if !substitute(&q, map)?.is_zero() {
                return Err(Error::Unsupported("relation failed exact verification".into()));
            }
            found.push(Syzygy { weighted_degree: t, relation: q });
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::{cyclic_diagonal_group, generate_group, Cyclotomic, Matrix};

    type P = Poly<Cyclotomic>;

    fn z(n: usize, i: usize) -> P {
        P::var(n, i)
    }

    fn mono(e: &[u32]) -> P {
        P::holomorphic_monomial(MultiIndex::new(e.to_vec()), Cyclotomic::one())
    }

    #[test]
    fn reynolds_examples() {
        let minus = cyclic_diagonal_group(2, &[1, 1]);
        assert!(reynolds(&z(2, 0), &minus).unwrap().is_zero());
        assert_eq!(reynolds(&mono(&[2, 0]), &minus).unwrap(), mono(&[2, 0]));
        let g = cyclic_diagonal_group(4, &[1, 3]);
        assert_eq!(reynolds(&mono(&[1, 1]), &g).unwrap(), mono(&[1, 1]));
    }

    #[test]
    fn basic_map_minus_identity() {
        let m = compute_basic_map(&cyclic_diagonal_group(2, &[1, 1])).unwrap();
        assert_eq!(m.degrees(), &[2, 2, 2]);
        assert_eq!(m.generators(), &[mono(&[2, 0]), mono(&[1, 1]), mono(&[0, 2])]);
    }

    #[test]
    fn basic_map_order_three_scalar() {
        let m = compute_basic_map(&cyclic_diagonal_group(3, &[1, 1])).unwrap();
        assert_eq!(m.degrees(), &[3, 3, 3, 3]);
        assert_eq!(m.generators()[1], mono(&[2, 1]));
    }

    #[test]
    fn basic_map_trivial_group() {
        let m = compute_basic_map(&crate::unitary::FiniteUnitaryGroup::<Cyclotomic>::trivial(3)).unwrap();
        assert_eq!(m.generators(), &[z(3, 0), z(3, 1), z(3, 2)]);
    }

    #[test]
    fn basic_map_is_minimal() {
        for g in [cyclic_diagonal_group(2, &[1, 1]), cyclic_diagonal_group(4, &[1, 3]), cyclic_diagonal_group(5, &[1, 2])] {
            let m = compute_basic_map(&g).unwrap();
            for i in 0..m.len() {
                let mut gens = m.generators().to_vec();
                gens.remove(i);
                let reduced = BasicMap::from_polynomials(2, gens).unwrap();
                assert_eq!(spanning_failure(&reduced, &g, m.degrees()[i]).unwrap(), Some(m.degrees()[i]));
            }
        }
    }

    #[test]
    fn basic_map_non_diagonal_group() {
        // swap of coordinates: invariants generated by z1 + z2 and z1^2 + z2^2 (or equivalents)
        let o = Cyclotomic::zero;
        let l = Cyclotomic::one;
        let swap = Matrix::new(vec![vec![o(), l()], vec![l(), o()]]).unwrap();
        let g = generate_group(&[swap], 8).unwrap();
        let m = compute_basic_map(&g).unwrap();
        assert_eq!(m.degrees(), &[1, 2]);
        for p in m.generators() {
            assert!(is_invariant(p, &g).unwrap());
        }
    }

    #[test]
    fn trace_count_matches_rank() {
        for g in [cyclic_diagonal_group(2, &[1, 1]), cyclic_diagonal_group(3, &[1, 1]), cyclic_diagonal_group(4, &[1, 1]), cyclic_diagonal_group(6, &[1, 5])] {
            for d in 0..=2 * g.order() as u32 {
                assert_eq!(invariant_dimension_by_traces(&g, d).unwrap(), invariant_dimension(&g, d).unwrap(), "degree {d}");
            }
        }
    }

    #[test]
    fn syzygy_of_quadrics() {
        let m = compute_basic_map(&cyclic_diagonal_group(2, &[1, 1])).unwrap();
        let s = find_syzygies(&m, 2).unwrap();
        assert_eq!(s.len(), 1);
        let expected = &mono(&[1, 0, 1]) - &mono(&[0, 2, 0]);
        assert_eq!(s[0].relation, expected);
        // higher bounds add no new minimal relations
        assert_eq!(find_syzygies(&m, 4).unwrap().len(), 1);
    }

    #[test]
    fn syzygy_of_segre_map() {
        // (λ, λ z1, λ z2, λ z1 z2) in variables (λ, z1, z2)
        let f = vec![mono(&[1, 0, 0]), mono(&[1, 1, 0]), mono(&[1, 0, 1]), mono(&[1, 1, 1])];
        let m = BasicMap::from_polynomials(3, f).unwrap();
        let s = find_syzygies(&m, 2).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].relation, &mono(&[1, 0, 0, 1]) - &mono(&[0, 1, 1, 0]));
    }

    #[test]
    fn identity_map_has_no_relations() {
        let m = BasicMap::from_polynomials(2, vec![z(2, 0), z(2, 1)]).unwrap();
        assert!(find_syzygies(&m, 4).unwrap().is_empty());
    }

    #[test]
    fn fixed_point_free_groups_need_more_generators() {
        for (o, e) in [(2u32, [1i64, 1]), (3, [1, 1]), (5, [1, 2]), (4, [1, 1])] {
            let g = cyclic_diagonal_group(o, &e);
            assert!(compute_basic_map(&g).unwrap().len() > 2);
        }
    }

    #[test]
    fn generators_are_invariant_and_projection_is_idempotent() {
        let g = cyclic_diagonal_group(5, &[1, 2]);
        for p in compute_basic_map(&g).unwrap().generators() {
            assert!(is_invariant(p, &g).unwrap());
        }
        let f = &(&mono(&[3, 1]) + &mono(&[1, 2])) + &mono(&[0, 5]);
        let r = reynolds(&f, &g).unwrap();
        assert_eq!(reynolds(&r, &g).unwrap(), r);
    }
}
