use num_complex::Complex64;
use parabola_core::circle::{a_map, build_source_config, triple_sum, triple_sum_circle, verify_circle_identity};
use parabola_core::discretized::{build_ap_set, lift_to_parabola};
use parabola_core::hyperbolic::{cayley, circle_to_chord, disc_to_klein, g_transform, line_metric, phi_map, Line};
use proptest::prelude::*;

fn line_strategy() -> impl Strategy<Value = Line> {
    (0.0f64..std::f64::consts::PI, -3.0f64..3.0).prop_map(|(a, c)| {
        let d = [a.cos(), a.sin()];
        Line::new(d, [-c * d[1], c * d[0]]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn circle_identity_and_discriminant(x in -1.0f64..=1.0, y in -1.0f64..=1.0, z in -1.0f64..=1.0) {
        let (a, b) = triple_sum(x, y, z);
        prop_assert!(verify_circle_identity(x, y, z) <= 1e-9 * (1.0 + a * a + b * b));
        prop_assert!(triple_sum_circle(a, b).is_ok());
    }

    #[test]
    fn a_map_lipschitz(u in prop::array::uniform2(-5.0f64..5.0), v in prop::array::uniform2(-5.0f64..5.0)) {
        let d = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2)).sqrt();
        let (p, q) = (a_map(u[0], u[1]), a_map(v[0], v[1]));
        let image = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        // Singular values of A are 3√2 and √6.
        prop_assert!(image <= 3.0 * 2f64.sqrt() * d * (1.0 + 1e-12) + 1e-15);
        if d > 0.0 {
            prop_assert!(image > 0.0);
        }
    }

    #[test]
    fn cayley_maps_reals_to_circle(xi in -1e3f64..1e3) {
        prop_assert!((cayley(Complex64::new(xi, 0.0)).unwrap().norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn klein_fixes_circle_and_disc(phi in 0.0f64..std::f64::consts::TAU, r in 0.0f64..1.0) {
        let z = Complex64::from_polar(1.0, phi);
        prop_assert!((disc_to_klein(z) - z).norm() <= 1e-12);
        prop_assert!(disc_to_klein(Complex64::from_polar(r, phi)).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn g_lands_in_closed_disc(x in -10.0f64..10.0, y in 0.0f64..10.0) {
        prop_assert!(g_transform(Complex64::new(x, y)).unwrap().norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn phi_matches_circle_crossings(s1 in -3.0f64..3.0, s2 in -3.0f64..3.0) {
        prop_assume!(6.0 * s2 - 2.0 * s1 * s1 >= 0.0625);
        let c = triple_sum_circle(s1, s2).unwrap();
        let p = phi_map([s1, s2], 0.25).unwrap();
        prop_assert_eq!(p, [c.xi1, c.xi2]);
    }

    #[test]
    fn upper_arc_maps_to_chord(cx in -5.0f64..5.0, r in 0.05f64..5.0) {
        let c = parabola_core::circle::Circle::new(cx, r).unwrap();
        let chord = circle_to_chord(&c).unwrap();
        for k in 0..=64 {
            let q = c.point_at(std::f64::consts::PI * k as f64 / 64.0);
            let w = g_transform(Complex64::new(q[0], q[1].max(0.0))).unwrap();
            prop_assert!(chord.line.distance([w.re, w.im]) <= 1e-9);
        }
    }

    #[test]
    fn line_metric_axioms(a in line_strategy(), b in line_strategy(), c in line_strategy()) {
        prop_assert_eq!(line_metric(&a, &b), line_metric(&b, &a));
        prop_assert_eq!(line_metric(&a, &a), 0.0);
        prop_assert!(line_metric(&a, &c) <= line_metric(&a, &b) + line_metric(&b, &c) + 1e-12);
    }
}

#[test]
fn a_map_on_basis_vectors() {
    let norm = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
    assert!((norm(a_map(1.0, 0.0)) - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    assert!((norm(a_map(0.0, 1.0)) - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    let diag = std::f64::consts::FRAC_1_SQRT_2;
    assert!((norm(a_map(diag, diag)) - 3.0 * 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn source_config_structure() {
    let delta = 1.0 / 256.0;
    let p = lift_to_parabola(&build_ap_set(0.5, delta).unwrap(), true).unwrap();
    let cfg = build_source_config(&p, p.points()[3], usize::MAX).unwrap();
    let n = p.len();
    assert!(cfg.f_points.len() <= n * n);
    for i in 0..n {
        for j in 0..n {
            let expect = a_map(p.points()[i][0], p.points()[j][0]);
            assert_eq!(cfg.f_points[i * n + j], expect);
        }
    }
}
