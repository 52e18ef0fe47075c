use kleinian_core::moebius::{Circle, SpherePoint};
use kleinian_core::schottky::{
    boundary_curve_count, build_schottky, copy_count, enumerate_words, exhaustion_stats, limit_set, pairing_map,
    reduced_word_count, GroupWord, Letter, LimitSetStop, SchottkyData, Validity,
};
use kleinian_core::Complex64;
use proptest::prelude::*;

fn word(genus: usize, max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(0..2 * genus, 0..=max_len)
        .prop_map(|idx| GroupWord::from_letters(idx.into_iter().map(Letter::from_index).collect()).free_reduce())
}

/// Random classical genus-2 data: four disks at random heights on
/// well-separated vertical strips, random twists.
fn random_classical() -> impl Strategy<Value = SchottkyData> {
    (
        prop::collection::vec((-1.0f64..1.0, 0.15f64..0.45), 4),
        prop::collection::vec(-3.1f64..3.1, 2),
    )
        .prop_map(|(pos, twists)| {
            let xs = [-4.5, 4.5, -1.5, 1.5];
            let disks: Vec<Circle> =
                pos.iter().zip(xs).map(|((y, r), x)| Circle::disk(Complex64::new(x, *y), *r).unwrap()).collect();
            let gens = (0..2).map(|i| pairing_map(&disks[2 * i], &disks[2 * i + 1], twists[i]).unwrap()).collect();
            build_schottky(disks, gens).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn word_action_matches_product(w in word(2, 5), z in ((-2.0f64..2.0), (-2.0f64..2.0))) {
        let s = SchottkyData::two_pair_example().unwrap();
        let m = w.evaluate(s.generators());
        for p in [Complex64::new(z.0, z.1), Complex64::new(0.1, 2.5), Complex64::new(-7.0, 0.3)] {
            let a = m.apply(SpherePoint::Finite(p));
            let b = w.apply_letterwise(s.generators(), SpherePoint::Finite(p));
            prop_assert!(a.chordal_distance(&b) < 1e-8, "{} at {}", w, p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_classical_trees_nest(s in random_classical()) {
        prop_assert_eq!(s.validity(), Validity::Classical);
        let t = limit_set(&s, LimitSetStop::depth(5)).unwrap();
        prop_assert!(t.min_margin() >= -1e-9);
        prop_assert!(t.radii_strictly_decreasing());
        for depth in 2..=5 {
            for child in t.level(depth) {
                let parent = &t.level(depth - 1)[child.parent().unwrap()];
                let d = (child.center().unwrap() - parent.center().unwrap()).norm();
                prop_assert!(d + child.radius() <= parent.radius() + 1e-9);
            }
        }
    }
}

#[test]
fn exact_counts_for_small_genus() {
    for g in 2..=4 {
        let s = SchottkyData::standard(g).unwrap();
        let stats = exhaustion_stats(&s, 4).unwrap();
        for n in 0..=6 {
            let words = enumerate_words(g, n, 5_000_000).unwrap();
            let expected = if n == 0 { 1 } else { 2 * g as u128 * (2 * g as u128 - 1).pow(n as u32 - 1) };
            assert_eq!(words.len() as u128, expected);
            assert_eq!(reduced_word_count(g, n), Some(expected));
            // boundary curves of W_n are the images γ(C), |γ| = n: one per word of length n+1
            assert_eq!(boundary_curve_count(g, n), reduced_word_count(g, n + 1));
            let copies: u128 = (0..=n).map(|k| reduced_word_count(g, k).unwrap()).sum();
            assert_eq!(copy_count(g, n), Some(copies));
        }
        let tree = limit_set(&s, LimitSetStop::depth(5)).unwrap();
        for level in &stats.levels {
            assert_eq!(level.boundary_curves, tree.count_at_depth(level.n + 1) as u128);
        }
    }
}
