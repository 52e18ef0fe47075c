use std::f64::consts::PI;

use kleinian_core::moebius::{Moebius, SpherePoint};
use kleinian_core::qc::{
    annulus_moduli, annulus_modulus, douady_earle, extend_equivariant, qs_constants, qs_ratio, quotient_modulus,
    BoundaryMap, DeOptions, ExtensionOptions, QsGrid,
};
use kleinian_core::Complex64;
use proptest::prelude::*;

fn random_map() -> impl Strategy<Value = BoundaryMap> {
    (1.5f64..4.0, 1.2f64..6.0, 3usize..24, any::<u64>())
        .prop_map(|(k, kappa, nodes, seed)| BoundaryMap::random(k, kappa, nodes, seed).unwrap())
}

fn ap(g: &Moebius, z: Complex64) -> Complex64 {
    g.apply(SpherePoint::Finite(z)).as_finite().unwrap()
}

/// Smooth circle homeomorphism `e^{iθ} ↦ e^{i(θ + a sin θ)}`, `|a| < 1`.
fn wobble(a: f64) -> impl Fn(Complex64) -> Complex64 {
    move |z: Complex64| {
        let t = z.arg();
        Complex64::from_polar(1.0, t + a * t.sin())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_reduction_is_exact(
        psi in random_map(),
        pairs in prop::collection::vec((-1.0f64..1.0, -2.0f64..2.0), 160),
    ) {
        let k = psi.k();
        for (u, e) in pairs {
            let (x, t) = (u * k * k, k.powf(e));
            let (a, b) = (qs_ratio(&psi, k * x, k * t), qs_ratio(&psi, x, t));
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "x={x} t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn ratio_at_zero_is_bounded_by_kappa(psi in random_map()) {
        let rep = qs_constants(&psi, &QsGrid { x_nodes: 64, t_nodes: 512, t_exponent: 6 }).unwrap();
        let iv = rep.case("iv").unwrap();
        let kappa = psi.kappa();
        prop_assert!(iv.min.value >= 1.0 / kappa - 1e-9 && iv.max.value <= kappa + 1e-9);
        prop_assert!(rep.case_iv_holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn extension_fixes_disk_automorphisms(
        p in (0.0f64..0.8, -PI..PI),
        theta in -PI..PI,
        zs in prop::collection::vec((0.0f64..0.9, -PI..PI), 20),
    ) {
        let g = Moebius::disk_automorphism(Complex64::from_polar(p.0, p.1), theta).unwrap();
        let phi = |z: Complex64| ap(&g, z);
        for (r, a) in zs {
            let z = Complex64::from_polar(r, a);
            let e = douady_earle(&phi, z, &DeOptions::default()).unwrap();
            prop_assert!((e.value - ap(&g, z)).norm() < 1e-6, "{z}: {} vs {}", e.value, ap(&g, z));
        }
    }

    #[test]
    fn barycenter_is_stable_under_node_doubling(
        a in -0.6f64..0.6,
        zs in prop::collection::vec((0.0f64..0.8, -PI..PI), 8),
    ) {
        let phi = wobble(a);
        let opts = DeOptions::default();
        for (r, t) in zs {
            let z = Complex64::from_polar(r, t);
            let e = douady_earle(&phi, z, &opts).unwrap();
            prop_assert!(e.residual < opts.tol);
            let fine = douady_earle(&phi, z, &DeOptions { nodes: 2 * opts.nodes, ..opts }).unwrap();
            prop_assert!((e.value - fine.value).norm() < 10.0 * opts.tol);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn annulus_pairing(x in 1.2f64..1e4) {
        let y = annulus_moduli(x).unwrap();
        prop_assert!((x.ln() * y.ln() - 2.0 * PI * PI).abs() < 1e-12 * 2.0 * PI * PI);
        prop_assert!((annulus_moduli(y).unwrap() - x).abs() < 1e-12 * x * x.ln().max(1.0));
        prop_assert!((annulus_modulus(y) - quotient_modulus(x)).abs() < 1e-12 * quotient_modulus(x));
    }
}

/// Power maps are self-similar, so a finer grid resamples the same `|μ|`
/// landscape and the supremum can only creep up towards its true value.
#[test]
fn sup_mu_settles_under_refinement() {
    for (alpha, coarse) in [(0.7, 32), (1.5, 32), (2.0, 32), (0.5, 64)] {
        let psi = BoundaryMap::power(2.0, alpha).unwrap();
        let sup = |grid| extend_equivariant(&psi, &ExtensionOptions { grid, ..Default::default() }).unwrap().sup_mu;
        let (a, b) = (sup(coarse), sup(2 * coarse));
        assert!(b - a <= 1e-3, "alpha {alpha}: {a} -> {b}");
        assert!(b < 1.0 - 1e-3);
    }
}
