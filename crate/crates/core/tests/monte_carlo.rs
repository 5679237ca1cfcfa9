//! Monte Carlo estimator behaviour and report replay.

use berg_core::complex::MultiIndex;
use berg_core::verify::{
    check_orthogonality, check_reproducing, integrate, Domain, IntegrationSpec, VerificationReport,
};
use berg_core::C64;

fn stderr_at(domain: Domain, n: usize, f: &(dyn Fn(&[C64]) -> C64 + Sync)) -> f64 {
    integrate(&IntegrationSpec::monte_carlo(domain, n, 5), f).unwrap().stderr
}

#[test]
fn stderr_scales_as_inverse_square_root() {
    // the last coordinate is λ on Ω, where |z_1|² is not integrable
    let f = |p: &[C64]| C64::new(p[p.len() - 1].norm_sqr(), 0.0);
    for domain in [Domain::Disk, Domain::Omega, Domain::Ball { n: 2 }] {
        let s: Vec<f64> = [10_000, 100_000, 1_000_000].iter().map(|&n| stderr_at(domain.clone(), n, &f)).collect();
        for w in s.windows(2) {
            let ratio = w[0] / w[1];
            let expected = 10f64.sqrt();
            assert!(ratio > expected / 2.0 && ratio < expected * 2.0, "{domain:?}: ratio {ratio}");
        }
    }
}

#[test]
fn identical_spec_and_seed_replay_bytes() {
    let spec = IntegrationSpec::monte_carlo(Domain::Omega, 50_000, 17);
    let f = MultiIndex::new(vec![0, 0, 1]);
    let z0 = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.4, 0.0)];
    let a = check_reproducing(&f, &z0, &spec).unwrap().to_json_line();
    let b = check_reproducing(&f, &z0, &spec).unwrap().to_json_line();
    assert_eq!(a, b);
    let other = IntegrationSpec::monte_carlo(Domain::Omega, 50_000, 18);
    assert_ne!(a, check_reproducing(&f, &z0, &other).unwrap().to_json_line());
}

#[test]
fn verdicts_recompute_from_persisted_reports() {
    let spec = IntegrationSpec::monte_carlo(Domain::Disk, 20_000, 3);
    let reports = [
        check_reproducing(&MultiIndex::new(vec![1]), &[C64::new(0.3, 0.0)], &spec).unwrap(),
        check_orthogonality(&MultiIndex::new(vec![1]), &MultiIndex::new(vec![3]), &spec).unwrap(),
        check_orthogonality(&MultiIndex::new(vec![2]), &MultiIndex::new(vec![2]), &spec).unwrap(),
    ];
    for r in reports {
        let back: VerificationReport = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(back.recompute_verdict(), r.passed);
        assert_eq!(back, r);
    }
}

#[test]
fn omega_fibers_of_different_degree_are_orthogonal() {
    let spec = IntegrationSpec::monte_carlo(Domain::Omega, 200_000, 9);
    for (f, g) in [([0, 0, 1], [1, 0, 2]), ([1, 1, 2], [0, 0, 3]), ([0, 0, 2], [0, 1, 4])] {
        let r = check_orthogonality(&MultiIndex::new(f.to_vec()), &MultiIndex::new(g.to_vec()), &spec).unwrap();
        assert!(r.passed, "{f:?} vs {g:?}: {}", r.to_json_line());
    }
}

#[test]
fn ball_reproduces_coordinate_functions() {
    let spec = IntegrationSpec::monte_carlo(Domain::Ball { n: 2 }, 400_000, 4);
    let z0 = [C64::new(0.2, 0.1), C64::new(-0.3, 0.0)];
    let r = check_reproducing(&MultiIndex::new(vec![0, 1]), &z0, &spec).unwrap();
    assert!(r.passed, "{}", r.to_json_line());
}
