use std::f64::consts::PI;

use horopack::analysis::{slope_length, CuspBasis, Slope};
use horopack::decor::{
    check_geometric, corner_to_edge, cusp_areas, edge_to_corner, paper_decoration,
    recursion_sequence, target_length, CornerDecoration, DecorationParams, EdgeLengths,
    DEFAULT_RELATIVE_TOL,
};
use horopack::develop::{develop, DevelopOptions};
use horopack::optimize::density;
use horopack::{family_member, icosahedron, Triangulation};
use num_complex::Complex64;
use proptest::prelude::*;

fn thrice_punctured() -> Triangulation {
    Triangulation::from_triangles(3, vec![[0, 1, 2], [0, 2, 1]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_corner_round_trip(xs in prop::collection::vec(-2.0f64..2.0, 120)) {
        let t = family_member(1);
        let lengths = EdgeLengths { lengths: xs.clone() };
        let dec = edge_to_corner(&t, &lengths).unwrap();
        let back = corner_to_edge(&t, &dec, DEFAULT_RELATIVE_TOL).unwrap();
        for (a, b) in back.lengths.iter().zip(&xs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let again = edge_to_corner(&t, &back).unwrap();
        for (r, s) in again.areas().iter().zip(dec.areas()) {
            for k in 0..3 {
                prop_assert!((r[k] - s[k]).abs() <= 1e-12 * s[k]);
            }
        }
    }

    #[test]
    fn recursion_decreases_between_fixed_points(c1 in 1.1548f64..1.732) {
        let lo = 2.0 / 3f64.sqrt();
        let seq = recursion_sequence(target_length(), c1, 30).unwrap();
        for w in seq.windows(2) {
            prop_assert!(w[1] < w[0]);
            prop_assert!(w[1] > lo);
        }
    }

    #[test]
    fn closed_forms_for_random_admissible_c(
        m in 1u32..=3,
        raw in prop::collection::vec(1.0f64..=2.0, 3),
    ) {
        let p = DecorationParams::new(raw[..m as usize].to_vec()).unwrap();
        prop_assume!(p.admissible());
        let t = family_member(m);
        let dec = paper_decoration(&t, &p).unwrap();
        let rep = cusp_areas(&t, &dec, Some(&p)).unwrap();
        let err = rep.max_closed_form_error().unwrap();
        prop_assert!(err < 1e-9, "closed form error {err}");
    }

    #[test]
    fn random_admissible_c_complete(raw in prop::collection::vec(1.0f64..=2.0, 2)) {
        let p = DecorationParams::new(raw).unwrap();
        let t = family_member(2);
        let dec = paper_decoration(&t, &p).unwrap();
        let geo = check_geometric(&t, &dec, DEFAULT_RELATIVE_TOL).unwrap();
        let opts = DevelopOptions { require_geometric: geo.is_geometric(), ..DevelopOptions::default() };
        let dev = develop(&t, &dec, &opts).unwrap();
        for h in dev.holonomies() {
            prop_assert!((h.scaling - 1.0).abs() < 1e-9, "cusp {}: {}", h.vertex, h.scaling);
        }
    }

    #[test]
    fn slope_length_homogeneous(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0,
        p in -6i64..=6, q in -6i64..=6, k in 1i64..5, s in 0.1f64..10.0,
    ) {
        let (t1, t2) = (Complex64::new(a, b), Complex64::new(c, d));
        prop_assume!((t1.conj() * t2).im.abs() > 1e-3);
        let base = CuspBasis::new(t1, t2).unwrap();
        let scaled = CuspBasis::new(t1 * s, t2 * s).unwrap();
        let l = base.lattice_length(p, q);
        prop_assert!((base.lattice_length(k * p, k * q) - k as f64 * l).abs() <= 1e-12 * (1.0 + l) * k as f64);
        prop_assert!((scaled.lattice_length(p, q) - s * l).abs() <= 1e-12 * (1.0 + l) * s);
        prop_assert!((base.lattice_length(-p, -q) - l).abs() <= 1e-12 * (1.0 + l));
        if let Ok(sl) = Slope::new(p, q) {
            prop_assert_eq!(slope_length(&base, sl), l);
        }
    }

    #[test]
    fn uniform_scaling_keeps_c(x in 0.2f64..2.0) {
        // all corners equal satisfy (C) for any value
        let t = icosahedron();
        let dec = CornerDecoration::uniform(&t, x).unwrap();
        prop_assert!(corner_to_edge(&t, &dec, DEFAULT_RELATIVE_TOL).is_ok());
        let d = density(&t, &dec).unwrap();
        prop_assert!((d - 3.0 / PI * x).abs() < 1e-12);
    }
}

#[test]
fn all_ones_density() {
    for t in [icosahedron(), thrice_punctured()] {
        let dec = CornerDecoration::uniform(&t, 1.0).unwrap();
        assert!((density(&t, &dec).unwrap() - 3.0 / PI).abs() < 1e-12);
    }
}
