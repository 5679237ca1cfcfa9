//! Cross-module paths: group files to basic maps and covers, Hartogs
//! embeddings to syzygies, kernel samples to fitted relations.

use berg_core::algebraicity::{diagonal_samples, fit_relation, RelationBasis, USampler};
use berg_core::cache::Cache;
use berg_core::complex::{ExactPolynomial, Field, HermitianPolynomial, MultiIndex};
use berg_core::hartogs::{embed_f_polynomials, u_diagonal_relation, TWO_PI_CUBED};
use berg_core::invariants::{compute_basic_map, find_syzygies, BasicMap};
use berg_core::quotient::CoveringSpec;
use berg_core::unitary::io::{parse_group_str, AnyGroup, DEFAULT_MAX_ORDER};
use berg_core::unitary::{is_fixed_point_free, reflections};
use berg_core::verify::{check_transformation_law, random_pairs, TRANSFORMATION_TOL};

const DIAG_I: &str = r#"{"root_order": 4, "generators": [[["zeta", "0"], ["0", "zeta"]]]}"#;

fn exact_group(src: &str) -> berg_core::unitary::FiniteUnitaryGroup<berg_core::unitary::Cyclotomic> {
    match parse_group_str(src).unwrap().generate(DEFAULT_MAX_ORDER).unwrap() {
        AnyGroup::Exact(g) => g,
        AnyGroup::Float(_) => panic!("expected an exact group"),
    }
}

#[test]
fn group_file_to_cover_to_transformation_law() {
    let g = exact_group(DIAG_I);
    assert_eq!(g.order(), 4);
    assert!(is_fixed_point_free(&g).fixed_point_free);
    assert!(reflections(&g).is_empty());
    let q = compute_basic_map(&g).unwrap();
    assert_eq!(q.degrees(), [4, 4, 4, 4, 4]);
    let cover = CoveringSpec::exact(&g, &q.generators()[..2]).unwrap();
    let pairs = random_pairs(&cover, 20, 0.7, 1).unwrap();
    assert!(check_transformation_law(&cover, &pairs, TRANSFORMATION_TOL).unwrap().passed);
}

#[test]
fn embedding_image_is_the_segre_quadric() {
    let map = BasicMap::from_polynomials(3, embed_f_polynomials()).unwrap();
    let syz = find_syzygies(&map, 2).unwrap();
    assert_eq!(syz.len(), 1);
    let w = |i: usize| ExactPolynomial::var(4, i);
    let quadric = &(&w(0) * &w(3)) - &(&w(1) * &w(2));
    let r = &syz[0].relation;
    assert!((r - &quadric).is_zero() || (r + &quadric).is_zero(), "{r}");
}

#[test]
fn fitted_u_relation_matches_the_closed_relation() {
    let samples = diagonal_samples(&USampler::default(), 900, 2).unwrap();
    let rel = fit_relation(&samples, RelationBasis::Radial { max_total: 8, max_per_var: 8 }, 1).unwrap();
    assert!(rel.residual <= 1e-8, "residual {}", rel.residual);
    // the closed relation a0 + a1 (2π)³K also vanishes on the samples
    let [a0, a1] = u_diagonal_relation().map(|p| p.to_c64());
    for (z, k) in samples.iter().take(50) {
        let v = a0.eval_c64(z, z).unwrap() + a1.eval_c64(z, z).unwrap() * (*k * TWO_PI_CUBED);
        let scale = a0.eval_c64(z, z).unwrap().norm().max(1.0);
        assert!(v.norm() <= 1e-9 * scale, "{v}");
    }
    // fitted and closed leading coefficients are proportional
    let probe = [[0.5, 0.1, 0.2], [0.7, -0.3, 0.1], [0.4, 0.4, -0.2]];
    let ratios: Vec<f64> = probe
        .iter()
        .map(|p| {
            let z: Vec<_> = p.iter().map(|&x| berg_core::C64::new(x, 0.0)).collect();
            (rel.leading().eval_c64(&z, &z).unwrap() / a1.eval_c64(&z, &z).unwrap()).re
        })
        .collect();
    for r in &ratios[1..] {
        assert!((r - ratios[0]).abs() <= 1e-6 * ratios[0].abs(), "{ratios:?}");
    }
}

#[test]
fn cached_basic_map_round_trips() {
    let dir = std::env::temp_dir().join(format!("berg-pipeline-{}", std::process::id()));
    let cache = Cache::new(&dir);
    let g = exact_group(DIAG_I);
    let q = compute_basic_map(&g).unwrap();
    let key = Cache::key("basic-map", &g.canonical_keys());
    let json: Vec<String> = q.generators().iter().map(|p| p.to_c64().to_json_string()).collect();
    cache.store("basic-map", &key, &json).unwrap();
    let back: Vec<String> = cache.load("basic-map", &key).unwrap();
    assert_eq!(back, json);
    let p = HermitianPolynomial::<berg_core::C64>::from_json_str(&back[0]).unwrap();
    assert_eq!(p.holomorphic_degree(), 4);
    assert_eq!(p.coefficient(&MultiIndex::new(vec![4, 0]), &MultiIndex::zero(2)), berg_core::C64::one());
    std::fs::remove_dir_all(dir).unwrap();
}
