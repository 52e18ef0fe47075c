use kleinian_core::cantor::{circle, interval, CircleId};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A valid `(k, i)` with `1 ≤ k ≤ 30`.
fn circle_id() -> impl Strategy<Value = CircleId> {
    (1u32..=30, any::<u64>(), any::<bool>()).prop_map(|(k, r, neg)| {
        let i = (r % (1u64 << (k - 1))) as i64 + 1;
        CircleId::new(k, if neg { -i } else { i })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn circle_geometry_is_exact(id in circle_id()) {
        let iv = interval(id.level, id.index).unwrap();
        let c = circle(id.level, id.index).unwrap();
        let len = iv.right() - iv.left();
        let third = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(3), id.level as usize));
        prop_assert_eq!(&len, &(q(2, 1) * &third));
        prop_assert_eq!(c.center().unwrap(), &((iv.left() + iv.right()) / q(2, 1)));
        prop_assert_eq!(c.radius().unwrap(), &(len * q(5, 6)));
        // stays on its side of the imaginary axis
        let (lo, hi) = c.shadow().unwrap();
        let same_side = if id.index > 0 { lo.is_positive() } else { hi.is_negative() };
        prop_assert!(same_side);
    }

    #[test]
    fn children_nest_strictly_and_are_disjoint(id in circle_id().prop_filter("below the level cap", |c| c.level < 30)) {
        let (lo, hi) = circle(id.level, id.index).unwrap().shadow().unwrap();
        let kids: Vec<(BigRational, BigRational)> =
            id.children().iter().map(|c| circle(c.level, c.index).unwrap().shadow().unwrap()).collect();
        for (l, h) in &kids {
            prop_assert!(*l > lo && *h < hi);
        }
        let (a, b) = if kids[0].0 < kids[1].0 { (&kids[0], &kids[1]) } else { (&kids[1], &kids[0]) };
        prop_assert!(b.0 > a.1);
    }

    #[test]
    fn children_are_affine_images_of_level_one(id in circle_id().prop_filter("below the level cap", |c| c.level < 30)) {
        let iv = interval(id.level, id.index).unwrap();
        let m = (iv.left() + iv.right()) / q(2, 1);
        let h = (iv.right() - iv.left()) / q(2, 1);
        let image = |x: &BigRational| &m + &h * x;
        let mut expected: Vec<(BigRational, BigRational)> =
            [interval(1, -1).unwrap(), interval(1, 1).unwrap()].iter().map(|j| (image(j.left()), image(j.right()))).collect();
        let mut got: Vec<(BigRational, BigRational)> = id
            .children()
            .iter()
            .map(|c| {
                let j = interval(c.level, c.index).unwrap();
                (j.left().clone(), j.right().clone())
            })
            .collect();
        expected.sort();
        got.sort();
        prop_assert_eq!(got, expected);
        prop_assert!(!h.is_zero());
    }
}
