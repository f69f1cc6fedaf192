use mahonian::analysis::{self, CurveReport};
use mahonian::Curve;

#[test]
fn clt_curve_decreases() {
    let c: Curve = analysis::clt_curve(2, &[16, 32, 64]).unwrap();
    let k = c.column("kolmogorov");
    assert!(k[2] < 0.05);
    assert!(k.windows(2).all(|w| w[1] < w[0]), "{k:?}");
}

#[test]
fn llt_curve_rows_and_decay() {
    let c: Curve = analysis::llt_curve(&[2, 3, 10], &[16, 32, 64]).unwrap();
    assert_eq!(c.rows.len(), 9);
    let exact = c.column("residual_exact");
    let approx = c.column("residual_approx");
    for m in 0..3 {
        let e = &exact[3 * m..3 * m + 3];
        let a = &approx[3 * m..3 * m + 3];
        assert!(e[0] > e[1] && e[1] > e[2]);
        assert!(a[0] > a[1] && a[1] > a[2]);
        assert!(e[2] < 0.01);
    }
}

#[test]
fn cf_probe_is_positive_on_both_regimes() {
    for (n, m) in [(8, 2), (16, 3), (32, 2)] {
        let p = analysis::cf_probe::<f64>(n, m, 256).unwrap();
        assert!(p.c_hat_small > 0.005 && p.c_hat_large > 0.005, "{p:?}");
        assert!(p.theta_small > 0.0);
    }
    assert!(analysis::cf_probe::<f64>(8, 2, 4).is_err());
    assert!(analysis::cf_probe::<f64>(1, 2, 64).is_err());
}

#[test]
fn tv_curve_within_bound() {
    let c: Curve = analysis::tv_curve(10, &[2, 5, 50]).unwrap();
    let (tv, bound) = (c.column("tv"), c.column("bound"));
    assert!(tv.iter().zip(&bound).all(|(t, b)| t <= b));
}

#[test]
fn reports_round_trip_and_serialize_deterministically() {
    let c: Curve = analysis::llt_curve(&[2, 3], &[16, 32]).unwrap();
    let json = serde_json::to_string(&c).unwrap();
    let back: CurveReport<f64> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c);
    let again: Curve = analysis::llt_curve(&[2, 3], &[16, 32]).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), json);
    assert_eq!(again.to_csv(), c.to_csv());
}
