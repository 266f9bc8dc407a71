use std::f64::consts::PI;

use gammasect_core::geometry::*;
use gammasect_core::sections::*;

#[test]
fn full_dimensional_estimates_reproduce_volumes() {
    for n in 2..=5 {
        for p in [0.5, 1.0, 1.5, 2.0] {
            let b = PBall::new(n, p).unwrap();
            let e = haar_subspace(n, n, 100 + n as u64).unwrap();
            let est = section_volume_mc(&b, &e, 1_000_000, 1).unwrap();
            let v = volume(&b).unwrap();
            assert!((est.value - v).abs() <= (4.0 * est.std_error).max(1e-12 * v), "n = {n}, p = {p}: {est:?} vs {v}");
        }
    }
}

#[test]
fn diagonal_sections_match_closed_form() {
    for n in 2..=6 {
        for p in [0.5, 1.0, 1.5, 2.0] {
            let b = PBall::new(n, p).unwrap();
            let e = Subspace::block_diagonal(n, 1).unwrap();
            let est = section_volume_mc(&b, &e, 1000, 0).unwrap();
            let expected = diagonal_section_ratio(&b).unwrap() * volume(&b).unwrap().powf(1.0 / n as f64);
            assert!((est.value - expected).abs() <= 3.0 * est.std_error + 1e-12 * expected);
        }
    }
}

#[test]
fn rotation_within_the_subspace_is_invisible() {
    let b = PBall::new(5, 0.7).unwrap();
    let e = haar_subspace(5, 2, 3).unwrap();
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let f = e.rotated(&[c, -s, s, c]).unwrap();
    let x = section_volume_mc(&b, &e, 200_000, 1).unwrap();
    let y = section_volume_mc(&b, &f, 200_000, 2).unwrap();
    let se = (x.std_error.powi(2) + y.std_error.powi(2)).sqrt();
    assert!((x.value - y.value).abs() <= 4.0 * se);
}

#[test]
fn scaling_law_is_exact() {
    for k in 1..=4 {
        let b = PBall::new(4, 1.2).unwrap();
        let e = haar_subspace(4, k, k as u64).unwrap();
        let base = section_volume(&b, &e, 5000, 9).unwrap();
        let t = 0.6;
        let scaled = section_volume(&Scaled { body: b, factor: t }, &e, 5000, 9).unwrap();
        assert!((scaled.value / base.value / t.powi(k as i32) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn identical_seeds_give_identical_bits() {
    let k = PSumBody::new(vec![(2, InnerNorm::Euclidean), (2, InnerNorm::Ell1)], 0.8).unwrap();
    let e = haar_subspace(4, 3, 77).unwrap();
    let a = section_volume_mc_psum(&k, &e, 50_000, 5).unwrap();
    let b = section_volume_mc_psum(&k, &e, 50_000, 5).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = section_volume_mc_psum(&k, &e, 50_000, 6).unwrap();
    assert_ne!(a.value.to_bits(), c.value.to_bits());
}

#[test]
fn psum_examples() {
    let euclid = PSumBody::new(vec![(2, InnerNorm::Euclidean), (3, InnerNorm::Euclidean)], 2.0).unwrap();
    for k in 1..=5 {
        let e = haar_subspace(5, k, k as u64).unwrap();
        let est = section_volume_mc_psum(&euclid, &e, 1000, 0).unwrap();
        let ball = log_volume_euclidean(k).unwrap().exp();
        assert!((est.value / ball - 1.0).abs() < 1e-12);
    }
    let k = PSumBody::new(vec![(2, InnerNorm::Euclidean), (2, InnerNorm::Euclidean)], 1.0).unwrap();
    let plane = section_volume_mc_psum(&k, &Subspace::axis_aligned(4, 2).unwrap(), 1000, 0).unwrap();
    assert!((plane.value - PI).abs() < 1e-12);
    let full = section_volume_mc_psum(&k, &Subspace::axis_aligned(4, 4).unwrap(), 1_000_000, 0).unwrap();
    assert!((full.value - PI * PI / 6.0).abs() <= 3.0 * full.std_error);
}

#[test]
fn euclidean_scan_is_flat() {
    let b = PBall::new(6, 2.0).unwrap();
    for k in 1..=6 {
        let r = min_section_scan(&b, k, 10, 1000, 4).unwrap();
        let ball = log_volume_euclidean(k).unwrap().exp();
        assert!((r.min.value / ball - 1.0).abs() < 1e-12);
        assert_eq!(r.evaluated, 12);
    }
}

#[test]
fn small_scans_respect_the_volume_bound() {
    for (n, p, k) in [(5, 1.5, 2), (3, 1.5, 2)] {
        let b = PBall::new(n, p).unwrap();
        let r = min_section_scan(&b, k, 20, 100_000, 1).unwrap();
        let (root, se) = r.min.root(k);
        assert!(root >= volume(&b).unwrap().powf(1.0 / n as f64) - 3.0 * se);
        assert!(r.argmin.orthonormality_residual() <= ORTHONORMAL_TOL);
    }
}

#[test]
fn haar_subspaces_are_rotation_invariant_in_law() {
    // E|<u, e_1>|^2 = k / n for the projection onto a Haar k-subspace.
    let (n, k, m) = (6, 2, 4000);
    let mean: f64 = (0..m)
        .map(|s| {
            let e = haar_subspace(n, k, s).unwrap();
            (0..k).map(|i| e.row(i)[0].powi(2)).sum::<f64>()
        })
        .sum::<f64>()
        / m as f64;
    assert!((mean - k as f64 / n as f64).abs() < 0.02);
}
