use parabola_core::discretized::{build_ap_set, lift_to_parabola};
use parabola_core::furstenberg::{incidence_count, run_pipeline, LineFamily, PipelineLimits};
use parabola_core::hyperbolic::{line_metric, Line};
use parabola_core::Point;
use proptest::prelude::*;

fn rigid(angle: f64, shift: Point) -> impl Fn(Point) -> Point {
    let (s, c) = angle.sin_cos();
    move |p| [c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]]
}

/// Distance from `p` to the line through `a` with direction `d`, by the
/// cross product.
fn cross_distance(line: &Line, p: Point) -> f64 {
    let [dx, dy] = line.direction;
    let (vx, vy) = (p[0] - line.offset[0], p[1] - line.offset[1]);
    (vx * dy - vy * dx).abs() / (dx * dx + dy * dy).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incidences_invariant_under_rigid_motion(
        pts in prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), 0..80),
        lines in prop::collection::vec((0.0f64..std::f64::consts::PI, -1.0f64..1.0), 1..6),
        angle in 0.0f64..std::f64::consts::TAU,
        shift in prop::array::uniform2(-3.0f64..3.0),
        width in 1.0f64..8.0,
    ) {
        let delta = 1.0 / 64.0;
        let mut family: Vec<Line> = Vec::new();
        for (a, c) in lines {
            let d = [a.cos(), a.sin()];
            let l = Line::new(d, [-c * d[1], c * d[0]]).unwrap();
            if family.iter().all(|m| line_metric(m, &l) >= 2.0 * delta) {
                family.push(l);
            }
        }
        let fam = LineFamily::new(family.clone(), delta).unwrap();
        let moved = LineFamily::new(family.iter().map(|l| l.moved(angle, shift)).collect(), delta).unwrap();
        let motion = rigid(angle, shift);
        let moved_pts: Vec<Point> = pts.iter().map(|&p| motion(p)).collect();
        prop_assert_eq!(incidence_count(&pts, &fam, width), incidence_count(&moved_pts, &moved, width));
    }
}

#[test]
fn pipeline_structure_on_ap_instance() {
    let delta = libm::pow(2.0, -10.0);
    let p = lift_to_parabola(&build_ap_set(0.5, delta).unwrap(), true).unwrap();
    let limits = PipelineLimits::default();
    let (cand, report) = run_pipeline(&p, p.points()[0], 0.5, &limits).unwrap();

    let (again, report_again) = run_pipeline(&p, p.points()[0], 0.5, &limits).unwrap();
    assert_eq!(serde_json::to_string(&(&cand, &report)).unwrap(), serde_json::to_string(&(&again, &report_again)).unwrap());

    assert!(report.f_prime_covering <= p.len() * p.len());
    assert!(report.diagnostic.verdict.is_consistent());
    let lines = &cand.lines.lines;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            assert!(line_metric(&lines[i], &lines[j]) >= delta);
        }
    }
    for sl in &cand.per_line {
        assert!(!sl.members.is_empty());
        let line = &lines[sl.line as usize];
        for &m in &sl.members {
            assert!(cross_distance(line, cand.points[m as usize]) <= sl.width * delta * (1.0 + 1e-9));
        }
    }

    // Each line sees at least the images of the circle lists merged into it.
    let counts = incidence_count(&cand.points, &cand.lines, report.max_width);
    for (sl, &count) in cand.per_line.iter().zip(&counts) {
        assert!(count >= sl.members.len());
    }
}
