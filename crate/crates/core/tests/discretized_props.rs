use parabola_core::discretized::{
    build_ap_set, covering_number_1d, delta_set_constant, level_split, whitney_decomposition, Atom, DiscretizedSet,
    FrostmanMeasure,
};
use proptest::prelude::*;

/// Distinct integer multiples of `delta` in `[-1, 1]`.
fn grid_set(ks: &[i32], delta: f64) -> Vec<f64> {
    let mut ks: Vec<i32> = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter().map(|k| k as f64 * delta).collect()
}

fn parabola_measure(ts: &[(i32, u32)], delta: f64) -> FrostmanMeasure {
    let atoms = ts
        .iter()
        .map(|&(k, w)| {
            let t = k as f64 * delta;
            Atom { point: [t, t * t], weight: w as f64 / 64.0 }
        })
        .collect();
    FrostmanMeasure::new(atoms, delta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn set_constant_grows_with_points(ks in prop::collection::vec(-64i32..=64, 1..24), extra in -64i32..=64, s in 0.0f64..=1.0) {
        let delta = 1.0 / 64.0;
        let xs = grid_set(&ks, delta);
        prop_assume!(!xs.contains(&(extra as f64 * delta)));
        let set = DiscretizedSet::on_line(&xs, delta).unwrap();
        let bigger = set.with_point([extra as f64 * delta, 0.0]).unwrap();
        prop_assert!(delta_set_constant(&bigger, s).unwrap() >= delta_set_constant(&set, s).unwrap());
    }

    #[test]
    fn covering_1d_monotone_in_radius(xs in prop::collection::vec(-10.0f64..10.0, 0..60), r in 0.01f64..2.0, grow in 1.0f64..4.0) {
        prop_assert!(covering_number_1d(&xs, r * grow) <= covering_number_1d(&xs, r));
    }

    #[test]
    fn covering_1d_subadditive(a in prop::collection::vec(-10.0f64..10.0, 0..40), b in prop::collection::vec(-10.0f64..10.0, 0..40), r in 0.01f64..2.0) {
        let union: Vec<f64> = a.iter().chain(&b).copied().collect();
        prop_assert!(covering_number_1d(&union, r) <= covering_number_1d(&a, r) + covering_number_1d(&b, r));
    }

    #[test]
    fn level_pieces_reassemble(ts in prop::collection::vec((-256i32..=256, 0u32..=64), 1..40)) {
        let delta = 1.0 / 256.0;
        let mut seen = std::collections::BTreeSet::new();
        let ts: Vec<(i32, u32)> = ts.into_iter().filter(|&(k, _)| seen.insert(k)).collect();
        let mu = parabola_measure(&ts, delta);
        let split = level_split(&mu);
        let mut parts: Vec<(u64, u64, u64)> = split
            .pieces
            .iter()
            .flat_map(|p| p.measure.atoms().iter())
            .chain(split.dust.atoms())
            .map(|a| (a.point[0].to_bits(), a.point[1].to_bits(), a.weight.to_bits()))
            .collect();
        let mut whole: Vec<(u64, u64, u64)> =
            mu.atoms().iter().map(|a| (a.point[0].to_bits(), a.point[1].to_bits(), a.weight.to_bits())).collect();
        parts.sort_unstable();
        whole.sort_unstable();
        prop_assert_eq!(parts, whole);
        for piece in &split.pieces {
            let mut arcs = std::collections::BTreeMap::<i64, f64>::new();
            for a in piece.measure.atoms() {
                *arcs.entry((a.point[0] / delta).floor() as i64).or_default() += a.weight;
            }
            for m in arcs.values() {
                prop_assert!(piece.kappa <= *m && *m <= 2.0 * piece.kappa, "{} not within [{}, {}]", m, piece.kappa, 2.0 * piece.kappa);
            }
        }
    }
}

#[test]
fn ap_sets_are_four_bounded() {
    for s in [0.3, 0.5, 0.7] {
        for m in 8..=14 {
            let delta = libm::pow(2.0, -(m as f64));
            let a = build_ap_set(s, delta).unwrap();
            let c = delta_set_constant(&a, s).unwrap();
            assert!(c <= 4.0, "s={s} delta=2^-{m}: C*={c}");
        }
    }
}

#[test]
fn whitney_multiplicity_one() {
    let delta = 1.0 / 64.0;
    let squares = whitney_decomposition(delta).unwrap();
    // Midpoints of the δ/2-grid cells, so no sample sits on a square edge.
    let n = (4.0 / delta) as i64;
    for a in 0..n {
        for b in 0..n {
            let x = -1.0 + (a as f64 + 0.5) * delta / 2.0;
            let y = -1.0 + (b as f64 + 0.5) * delta / 2.0;
            if (x - y).abs() < 4.0 * delta {
                continue;
            }
            let hits = squares.iter().filter(|q| q.i_interval.contains(x) && q.j_interval.contains(y)).count();
            assert_eq!(hits, 1, "({x}, {y})");
        }
    }
    for q in whitney_decomposition(1.0 / 256.0).unwrap() {
        let d = q.i_interval.dist(&q.j_interval);
        assert!(d > 0.0 && q.side / d >= 0.25 && q.side / d <= 4.0);
    }
}
