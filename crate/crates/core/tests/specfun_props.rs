use gammasect_core::specfun::*;
use gammasect_core::Interval;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn cfg() -> StirlingConfig {
    StirlingConfig::default()
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
}

#[test]
fn stirling_agrees_with_reference() {
    for x in log_spaced(0.5, 100.0, 1000) {
        let s = log_gamma_stirling(x, &cfg()).unwrap();
        let r = log_gamma_ref(1.0 + x).unwrap();
        assert!((s - r).abs() <= 1e-10, "x = {x}: {s} vs {r}");
    }
}

#[test]
fn mu_at_one_is_closed_form() {
    let m = mu(1.0, &cfg()).unwrap();
    assert!((m - (1.0 - 0.5 * (2.0 * std::f64::consts::PI).ln())).abs() <= 1e-12);
}

#[test]
fn reference_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let z = 0.1 + 499.9 * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let d = log_gamma_ref(z + 1.0).unwrap() - log_gamma_ref(z).unwrap();
        let scale = z.ln().abs().max(log_gamma_ref(z).unwrap().abs()).max(1.0);
        assert!((d - z.ln()).abs() <= 1e-12 * scale, "z = {z}");
    }
}

#[test]
fn mu_decreasing_and_positive() {
    let xs: Vec<f64> = (0..1000).map(|i| 1.0 + 199.0 * i as f64 / 999.0).collect();
    let ms: Vec<f64> = xs.iter().map(|&x| mu(x, &cfg()).unwrap()).collect();
    for (w, x) in ms.windows(2).zip(&xs) {
        assert!(w[0] > 0.0 && w[1] > 0.0);
        assert!(w[1] < w[0], "not decreasing after x = {x}");
    }
}

/// `ψ'(z)` from `sum_{j<N} 1/(z+j)^2` plus the asymptotic series at `z+N`.
fn trigamma_oracle(z: f64) -> f64 {
    const N: usize = 20;
    let head: f64 = (0..N).map(|j| 1.0 / ((z + j as f64) * (z + j as f64))).sum();
    let w = z + N as f64;
    let tail = 1.0 / w + 1.0 / (2.0 * w * w) + 1.0 / (6.0 * w.powi(3)) - 1.0 / (30.0 * w.powi(5))
        + 1.0 / (42.0 * w.powi(7))
        - 1.0 / (30.0 * w.powi(9));
    head + tail
}

#[test]
fn trigamma_envelope_brackets() {
    for z in log_spaced(0.5, 50.0, 1000) {
        let (lo, hi) = trigamma_envelope(z).unwrap();
        let t = trigamma_oracle(z);
        let slack = 4.0 * f64::EPSILON * t;
        assert!(lo - slack <= t && t <= hi + slack, "z = {z}: {t} not in [{lo}, {hi}]");
        // Central difference of the reference digamma; truncation h^2 |ψ'''| / 6
        // plus cancellation of the two evaluations.
        let h = 1e-4 * z;
        let fd = (digamma_ref(z + h).unwrap() - digamma_ref(z - h).unwrap()) / (2.0 * h);
        let psi3 = 2.0 / (z - h).powi(3) + 3.0 / (z - h).powi(4) + 2.0 / (z - h).powi(5);
        let psi_mag = (digamma_ref(z).unwrap().abs() + 1.0 / z).max(1.0);
        let fd_err = h * h * psi3 / 6.0 + 1e-14 * psi_mag / h;
        assert!(lo - fd_err <= fd && fd <= hi + fd_err, "z = {z}: fd {fd} not in [{lo}, {hi}] ± {fd_err}");
    }
}

#[test]
fn envelope_width_is_exact() {
    for z in [0.5, 1.0, 2.0, 7.5] {
        let (lo, hi) = trigamma_envelope(z).unwrap();
        assert!(((hi - lo) - 1.0 / (30.0 * z.powi(5))).abs() <= 4.0 * f64::EPSILON * hi);
    }
}

#[test]
fn special_values() {
    assert_eq!(p3(0.5).unwrap(), 0.0);
    assert_eq!(p3(0.0).unwrap(), 0.0);
    assert_eq!(p3(1.0).unwrap(), 0.0);
    assert!(p3(-0.1).is_err());
    assert!(log_gamma_stirling(1.0, &cfg()).unwrap().abs() < 1e-13);
    assert!((log_gamma_stirling(5.0, &cfg()).unwrap() - 120f64.ln()).abs() < 1e-12);
    let half = (std::f64::consts::PI.sqrt() / 2.0).ln();
    assert!((log_gamma_stirling(0.5, &cfg()).unwrap() - half).abs() < 1e-12);
    assert!(log_gamma_ref(2.0).unwrap().abs() < 1e-15);
    assert!((log_gamma_ref(11.0).unwrap() - 3628800f64.ln()).abs() < 1e-12);
    assert!((log_gamma_ref(0.5).unwrap() - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    assert!(log_gamma_ref(0.0).is_err());
    assert!((gamma_pow(2.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
    assert!((gamma_pow(4.0, 0.5).unwrap() - 24f64.sqrt()).abs() < 1e-13);
    let euler = 0.577_215_664_901_532_9;
    assert!(digamma_upper(1.0).unwrap() > 1.0 - euler);
    assert!(digamma_upper(0.0).unwrap() > -euler);
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    let (lo, hi) = trigamma_envelope(1.0).unwrap();
    assert!(lo <= z2 && z2 <= hi);
    let (lo, hi) = trigamma_envelope(2.0).unwrap();
    assert!(lo <= z2 - 1.0 && z2 - 1.0 <= hi);
}

#[test]
fn p3_bounded_by_a_twentieth() {
    for i in 0..=1_000_000 {
        let t = i as f64 * 1e-6;
        assert!(p3(t).unwrap().abs() <= 0.05);
    }
    let t = (3.0 - 3f64.sqrt()) / 6.0;
    assert!((p3(t).unwrap().abs() - P3_MAX_ABS).abs() < 1e-15);
}

#[test]
fn mu_crude_bound() {
    for x in log_spaced(1.0, 1000.0, 200) {
        let m = mu(x, &cfg()).unwrap();
        assert!(m <= 1.0 / (12.0 * x) + 1.0 / (120.0 * x * x));
    }
}

proptest! {
    #[test]
    fn mu_enclosure_contains_point_value(x in 0.05f64..500.0) {
        let m = mu(x, &cfg()).unwrap();
        let e = mu_enclosure(x, &cfg()).unwrap();
        prop_assert!(e.contains(m));
        prop_assert!(e.width() <= 4.0 * cfg().quad_tol() + 1e-15);
    }

    #[test]
    fn stirling_interval_contains_reference(lo in 0.1f64..50.0, w in 0.0f64..2.0) {
        let x = Interval::new(lo, lo + w).unwrap();
        let e = log_gamma_stirling_interval(x, &cfg()).unwrap();
        for t in [x.lo(), x.mid(), x.hi()] {
            let r = log_gamma_ref(1.0 + t).unwrap();
            prop_assert!(e.lo() - 1e-12 <= r && r <= e.hi() + 1e-12, "{} not in {}", r, e);
        }
    }

    #[test]
    fn digamma_enclosure_contains_reference(z in 0.1f64..300.0) {
        let e = digamma_enclosure(z).unwrap();
        let r = digamma_ref(z).unwrap();
        prop_assert!(e.lo() - 1e-12 <= r && r <= e.hi() + 1e-12);
        prop_assert!(digamma_upper(z - 1.0).unwrap() > e.lo());
    }
}
