use proptest::prelude::*;
use viscodyn::kinematics::{build_deformation, project_deviatoric};
use viscodyn::{Tensor2, Tensor4};

fn arb_grad() -> impl Strategy<Value = Tensor2> {
    prop::collection::vec(-0.4f64..0.4, 9)
        .prop_map(|v| Tensor2::from_fn(|i, j| v[3 * i + j]))
        .prop_filter("admissible", |g| (Tensor2::identity() + *g).det() > 0.2)
}

fn arb_sym() -> impl Strategy<Value = Tensor2> {
    prop::collection::vec(-1.0f64..1.0, 9).prop_map(|v| Tensor2::from_fn(|i, j| v[3 * i + j]).symmetrize())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_annihilates_inverse_metric(g in arb_grad(), a in -1e3f64..1e3) {
        let s = build_deformation(&g).unwrap();
        let r = s.proj.ddot2(&s.c_inv.scale(a));
        prop_assert!(r.norm() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn deviatoric_result_is_orthogonal_to_c(g in arb_grad(), st in arb_sym()) {
        let s = build_deformation(&g).unwrap();
        let d = project_deviatoric(&s, &st);
        prop_assert!(d.ddot(&s.c).abs() <= 1e-10 * (1.0 + d.norm() * s.c.norm()));
        let via_p = s.proj.ddot2(&st).scale(s.j.powf(-2.0 / 3.0));
        prop_assert!((via_p - d).norm() <= 1e-12 * (1.0 + d.norm()));
    }

    #[test]
    fn isochoric_metric_has_unit_determinant(g in arb_grad()) {
        let s = build_deformation(&g).unwrap();
        prop_assert!((s.c_tilde.det() - 1.0).abs() <= 1e-10);
        prop_assert!((s.c - s.c.transpose()).norm() == 0.0);
    }

    #[test]
    fn inverse_round_trip(g in arb_grad()) {
        let f = Tensor2::identity() + g;
        let (_, inv) = f.det_inv().unwrap();
        prop_assert!((inv.dot(&f) - Tensor2::identity()).norm() <= 1e-12 * f.norm() * inv.norm());
    }

    #[test]
    fn symdyad_component_formula(a in arb_sym(), s in arb_sym()) {
        let t = Tensor4::symdyad(&a, &a);
        let lhs = t.ddot2(&s);
        let rhs = a.dot(&s).dot(&a.transpose());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        prop_assert!((lhs - lhs.transpose()).norm() <= 1e-14 * (1.0 + lhs.norm()));
        for (i, j, k, l) in [(0, 1, 2, 0), (1, 1, 0, 2), (2, 0, 1, 1)] {
            let c = 0.5 * (a[(i, k)] * a[(j, l)] + a[(i, l)] * a[(j, k)]);
            prop_assert!((t.get(i, j, k, l) - c).abs() < 1e-15);
        }
    }

    #[test]
    fn contractions_are_bilinear(a in arb_sym(), b in arb_sym(), x in -3.0f64..3.0) {
        let d = Tensor4::dyad(&a, &b);
        let lhs = d.ddot2(&(a.scale(x) + b));
        let rhs = d.ddot2(&a).scale(x) + d.ddot2(&b);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        prop_assert!((a.scale(x) + b).ddot(&b) - (x * a.ddot(&b) + b.ddot(&b)) < 1e-12);
        prop_assert!((a.magnitude_sq() - a.0.iter().flatten().map(|v| v * v).sum::<f64>()).abs() < 1e-14);
        prop_assert!((d.ddot4(&Tensor4::sym_identity()).ddot2(&a) - d.ddot2(&a)).norm() <= 1e-12 * (1.0 + d.norm()));
    }
}
