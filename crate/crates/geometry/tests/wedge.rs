use nlqc_geometry::*;
use proptest::prelude::*;

#[test]
fn wedge_inequality_on_grid() {
    for (k, cfg) in config_grid().iter().enumerate() {
        let r = verify_connected_wedge(cfg, 1 << 12, 1e-3).unwrap();

        assert!(r.region_nonempty);
        assert!(r.wedge_holds, "config {k}: {r:?}");
    }
}

#[test]
fn ridge_grows_with_delay() {
    let lens: Vec<f64> =
        [0.05, 0.1, 0.2, 0.4].iter().map(|&d| ridge_curve(&ScatteringConfig::delayed(d), 1 << 12).unwrap().length).collect();
    assert!(lens.windows(2).all(|w| w[1] > w[0]), "{lens:?}");
}

#[test]
fn delayed_ridge_is_reflection_symmetric() {
    let r = ridge_curve(&ScatteringConfig::delayed(0.2), 1 << 12).unwrap();
    let n = r.points.len();
    for (p, q) in r.points.iter().zip(r.points.iter().rev()).take(n / 2) {
        let (a, b) = (p.disk(), q.disk());
        assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] + b[1]).abs() < 1e-9);
    }
}

fn same(a: &GeometryReport, b: &GeometryReport) {
    assert_eq!(a.region_nonempty, b.region_nonempty);
    for (x, y) in [(a.ridge_length, b.ridge_length), (a.mutual_information, b.mutual_information), (a.region_margin, b.region_margin)] {
        assert!((x - y).abs() < 1e-9, "{x} {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn reflection_and_translation_invariance(k in 0usize..20, dt in -3.0f64..3.0) {
        let cfg = config_grid()[k];
        let base = verify_connected_wedge(&cfg, 1 << 10, 1e-3).unwrap();
        same(&base, &verify_connected_wedge(&cfg.map(|p| p.reflected()), 1 << 10, 1e-3).unwrap());
        same(&base, &verify_connected_wedge(&cfg.map(|p| p.shifted(dt)), 1 << 10, 1e-3).unwrap());
    }

    #[test]
    fn mutual_information_ignores_cutoff(k in 0usize..20, e in -6.0f64..-2.0) {
        let cfg = config_grid()[k];
        let a = mutual_information(&cfg, 1e-3).unwrap();
        let b = mutual_information(&cfg, 10f64.powf(e)).unwrap();
        prop_assert!(a >= 0.0 && (a - b).abs() < 1e-9);
    }
}
