use gammasect_core::certify::*;
use gammasect_core::specfun::StirlingConfig;
use gammasect_core::Interval;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn case(id: &str) -> InequalityCase {
    catalog().into_iter().find(|c| c.id == id).unwrap()
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform point of a random region of the case (lattice axes uniform
/// over their indices), or `None` if it violates a lattice constraint.
fn random_point(c: &InequalityCase, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let r = &c.regions[(rng.next_u64() % c.regions.len() as u64) as usize];
    let pt: Vec<f64> = r
        .ranges
        .iter()
        .zip(&c.axes)
        .map(|(range, axis)| match range {
            Range::Continuous(iv) => (iv.lo() + unit(rng) * iv.width()).min(iv.hi()),
            Range::Lattice { first, last } => {
                axis.lattice_value(first + (rng.next_u64() % (last - first + 1) as u64) as usize)
            }
        })
        .collect();
    c.admissible(&pt).then_some(pt)
}

#[test]
fn catalog_has_the_sixteen_ids() {
    let ids: Vec<&str> = catalog().iter().map(|c| c.id).collect();
    let mut expected = CASE_IDS.to_vec();
    expected.sort();
    assert_eq!(ids, expected);
    assert_eq!(ids.len(), 16);
    for id in [
        "P1.1-1", "P1.1-2", "P1.1-3", "P1.1-4", "P1.2", "P1.3-1", "P1.3-2", "P1.4", "P1.4-a", "P1.4-b", "P2.1-core",
        "P2.2/Eq.(5)", "P2.2-aux", "R1/Eq.(7)", "P2.4-core", "P2.5-const",
    ] {
        assert!(ids.contains(&id), "{id}");
    }
}

#[test]
fn equality_points() {
    let t = case("P1.1-1").point(&[2.0], 0).unwrap();
    assert!(t.gap().abs() <= t.equality_tolerance());
    let t = case("P1.2").point(&[1.0, 2.0], 0).unwrap();
    assert!(t.gap().abs() <= t.equality_tolerance());
    // Γ(3)^2/Γ(5) = 1/6 = Γ(2)^3/Γ(4).
    assert!((t.upper - (1.0f64 / 6.0).ln()).abs() < 1e-14 || (t.lower - (1.0f64 / 6.0).ln()).abs() < 1e-14);
}

#[test]
fn lower_e2_bound_is_certified_with_margin() {
    let c = case("P1.1-4");
    let cert = certify_case(&c, &VerifyConfig::default());
    assert_eq!(cert.status, Status::Certified);
    // At x = 1 the ratio of the two sides is 1 - 6/e^2 away from equality.
    let t = c.point(&[1.0], 0).unwrap();
    let ratio = 1.0 - 6.0 / std::f64::consts::E.powi(2);
    assert!((1.0 - (-t.gap()).exp() - ratio).abs() < 1e-12);
    let grid_min = (0..=100_000)
        .map(|i| c.point(&[1.0 + 99.0 * i as f64 / 100_000.0], 0).unwrap().gap())
        .fold(f64::INFINITY, f64::min);
    assert!(grid_min > 0.0);
}

#[test]
fn replaced_constant_is_refuted() {
    // 1/6 replaced by 1/7 multiplies the right side by 6/7.
    let c = case("P1.1-1");
    let cfg = VerifyConfig { mutation: 6.0 / 7.0 - 1.0, ..VerifyConfig::default() };
    let cert = certify_box(&c, &[Interval::new(2.0, 3.0).unwrap()], &cfg).unwrap();
    assert_eq!(cert.status, Status::Counterexample);
    let w = cert.witness.unwrap();
    let t = c.point(&w.point, 0).unwrap();
    assert!(t.gap() + (6.0f64 / 7.0).ln() < 0.0);
}

#[test]
fn degenerate_equality_box_is_inconclusive() {
    let c = case("P1.1-1");
    let cert = certify_box(&c, &[Interval::point(2.0)], &VerifyConfig::default()).unwrap();
    assert_eq!(cert.status, Status::Inconclusive);
    assert_eq!(cert.unresolved_total, 1);
}

#[test]
fn certify_box_rejects_boxes_outside_the_domain() {
    let c = case("P1.1-1");
    assert!(certify_box(&c, &[Interval::new(1.0, 3.0).unwrap()], &VerifyConfig::default()).is_err());
    assert!(certify_box(&c, &[], &VerifyConfig::default()).is_err());
}

#[test]
fn tight_cases_reject_small_mutations() {
    for (id, at) in [("P1.1-1", vec![2.0]), ("P1.2", vec![1.0, 2.0])] {
        let c = case(id);
        let cfg = VerifyConfig { mutation: -1e-3, ..VerifyConfig::default() };
        let cert = certify_case(&c, &cfg);
        assert_eq!(cert.status, Status::Counterexample, "{id}");
        let w = cert.witness.unwrap();
        let dist = w.point.iter().zip(&at).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dist <= 1e-2, "{id}: witness {:?}", w.point);
        let (g, _) = c.point_min(&w.point).unwrap();
        assert!(g + (1.0f64 - 1e-3).ln() < 0.0);
    }
}

#[test]
fn point_and_interval_forms_agree() {
    let cfg = StirlingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for c in catalog() {
        let mut done = 0;
        while done < 1000 {
            let Some(pt) = random_point(&c, &mut rng) else { continue };
            done += 1;
            let args: Vec<Interval> = pt.iter().map(|&v| Interval::point(v)).collect();
            for comp in 0..c.components() {
                let iv = c.eval(&args, comp, &cfg).unwrap();
                let t = c.point(&pt, comp).unwrap();
                let e = t.eval_error();
                assert!(
                    iv.lo() - e <= t.gap() && t.gap() <= iv.hi() + e,
                    "{} at {pt:?} component {comp}: point {} vs interval {iv}",
                    c.id,
                    t.gap()
                );
            }
        }
    }
}

#[test]
fn certified_cases_are_sound_at_random_points() {
    let cfg = VerifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for cert in verify_all(&cfg).unwrap() {
        assert_eq!(cert.status, Status::Certified, "{}: {:?}", cert.case_id, cert.notes);
        let c = case(&cert.case_id);
        let mut done = 0;
        while done < 10_000 {
            let Some(pt) = random_point(&c, &mut rng) else { continue };
            done += 1;
            let (g, t) = c.point_min(&pt).unwrap();
            assert!(g >= -t.eval_error(), "{} at {pt:?}: gap {g}", c.id);
        }
        for eq in &cert.equalities {
            assert!(eq.holds && eq.max_abs_gap <= 1e-9, "{}", cert.case_id);
        }
    }
}

#[test]
fn smaller_caps_still_certify() {
    let cfg = VerifyConfig { caps: Caps { x_max: 2.5, ..Caps::default() }, ..VerifyConfig::default() };
    let certs = verify_all(&cfg).unwrap();
    assert!(!certs.is_empty());
    for c in &certs {
        assert_eq!(c.status, Status::Certified, "{}", c.case_id);
    }
    // Cases whose domain starts beyond 2.5 drop out.
    assert!(certs.iter().all(|c| c.case_id != "P1.1-3"));
}

/// A 1% adverse mutation refutes every claim whose gap comes within about
/// `ln(1/0.99)` of zero; claims with more slack stay certified.
#[test]
fn one_percent_mutation_separates_tight_claims() {
    let caps = Caps { x_max: 10.0, y_max: 10.0, n_max: 20 };
    let cfg = VerifyConfig { caps, mutation: -0.01, ..VerifyConfig::default() };
    let shift = -(0.99f64.ln());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in catalog_with(&caps).into_iter().filter(|c| !c.is_empty()) {
        let mut min_gap = f64::INFINITY;
        for eq in &c.equalities {
            let pt: Vec<f64> = eq
                .ranges
                .iter()
                .zip(&c.axes)
                .map(|(r, a)| match r {
                    Range::Continuous(iv) => iv.lo(),
                    Range::Lattice { first, .. } => a.lattice_value(*first),
                })
                .collect();
            min_gap = min_gap.min(c.point_min(&pt).unwrap().0);
        }
        for _ in 0..20_000 {
            if let Some(pt) = random_point(&c, &mut rng) {
                min_gap = min_gap.min(c.point_min(&pt).unwrap().0);
            }
        }
        let cert = certify_case(&c, &cfg);
        if min_gap < 0.5 * shift {
            assert_eq!(cert.status, Status::Counterexample, "{} (sampled min gap {min_gap})", c.id);
        } else if min_gap > 2.0 * shift {
            assert_eq!(cert.status, Status::Certified, "{} (sampled min gap {min_gap})", c.id);
        }
    }
}

#[test]
fn g_func_examples() {
    for y in [2.0, 5.0, 17.3] {
        assert!((g_func(1.0, y).unwrap() - 1.0).abs() < 1e-12);
    }
    let v = g_func(0.5, 2.0).unwrap();
    assert!((v - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
    let mut prev_hi = f64::INFINITY;
    let mut prev_lo = 0.0;
    for y in 2..=50 {
        let a = g_func(2.0, y as f64).unwrap();
        let b = g_func(0.7, y as f64).unwrap();
        assert!(a <= prev_hi * (1.0 + 1e-14));
        assert!(b >= prev_lo * (1.0 - 1e-14));
        prev_hi = a;
        prev_lo = b;
    }
}

#[test]
fn verify_is_deterministic() {
    let cfg = VerifyConfig { caps: Caps { x_max: 5.0, y_max: 5.0, n_max: 12 }, ..VerifyConfig::default() };
    let strip = |mut v: Vec<Certificate>| {
        v.iter_mut().for_each(|c| c.stats.elapsed = None);
        v
    };
    assert_eq!(strip(verify_all(&cfg).unwrap()), strip(verify_all(&cfg).unwrap()));
}

#[test]
fn config_validation() {
    let bad = [
        VerifyConfig { mutation: -1.0, ..VerifyConfig::default() },
        VerifyConfig { depth_limit: 0, ..VerifyConfig::default() },
        VerifyConfig { caps: Caps { x_max: f64::NAN, ..Caps::default() }, ..VerifyConfig::default() },
    ];
    for cfg in bad {
        assert!(verify_all(&cfg).is_err());
    }
}
