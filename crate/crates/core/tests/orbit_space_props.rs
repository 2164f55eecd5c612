mod common;

use common::{apply, case, pool};
use proptest::prelude::*;
use torus_orbits::lattice::{determinant, gcd_slice, IntMatrix};
use torus_orbits::orbit_space::{
    are_equivalent, canonicalize, canonicalize_with, ensure_legal, is_legal, pi1_bound, Orientation,
    WeightedOrbitSpace,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn legality_and_pi1_bound_are_invariant_rank2((s, m) in case(2)) {
        let t = apply(&s, &m);
        prop_assert!(ensure_legal(&t).is_ok());
        prop_assert_eq!(pi1_bound(&t).unwrap(), pi1_bound(&s).unwrap());
    }

    #[test]
    fn legality_and_pi1_bound_are_invariant_rank3((s, m) in case(3)) {
        let t = apply(&s, &m);
        prop_assert!(ensure_legal(&t).is_ok());
        prop_assert_eq!(pi1_bound(&t).unwrap(), pi1_bound(&s).unwrap());
    }

    #[test]
    fn canonical_form_is_a_class_invariant_rank2((s, m) in case(2)) {
        let t = apply(&s, &m);
        prop_assert_eq!(canonicalize(&t).unwrap().space, canonicalize(&s).unwrap().space);
        prop_assert!(are_equivalent(&s, &t).unwrap());
    }

    #[test]
    fn canonical_form_is_a_class_invariant_rank3((s, m) in case(3)) {
        let t = apply(&s, &m);
        prop_assert_eq!(canonicalize(&t).unwrap().space, canonicalize(&s).unwrap().space);
        prop_assert!(are_equivalent(&s, &t).unwrap());
    }

    #[test]
    fn canonical_certificate_reproduces_the_form((s, m) in case(3)) {
        let t = apply(&s, &m);
        for orientation in [Orientation::Unoriented, Orientation::Oriented] {
            let c = canonicalize_with(&t, orientation).unwrap();
            prop_assert_eq!(determinant(&c.transform).unwrap().abs(), 1);
            prop_assert_eq!(c.arrange(&t).transformed(&c.transform).unwrap(), c.space.clone());
            let w = c.space.slopes();
            prop_assert_eq!(&w[0], &vec![1, 0, 0]);
            prop_assert_eq!(&w[1], &vec![0, 1, 0]);
        }
    }

    #[test]
    fn oriented_form_survives_rotation_only((s, m) in case(2)) {
        let t = s.transformed(&m.transform).unwrap().rotated(m.rotation % s.len());
        prop_assert_eq!(
            canonicalize_with(&t, Orientation::Oriented).unwrap().space,
            canonicalize_with(&s, Orientation::Oriented).unwrap().space
        );
    }

    #[test]
    fn rank2_legality_is_unit_determinant(raw in prop::collection::vec((-6i64..=6, -6i64..=6), 2..7)) {
        let slopes: Vec<Vec<i64>> = raw.into_iter().map(|(a, b)| vec![a, b]).filter(|w| gcd_slice(w) == 1).collect();
        prop_assume!(slopes.len() >= 2);
        let s = WeightedOrbitSpace::new(2, slopes.clone()).unwrap();
        let n = slopes.len();
        let unit = (0..n).all(|i| {
            let (x, y) = (&slopes[i], &slopes[(i + 1) % n]);
            (x[0] * y[1] - x[1] * y[0]).abs() == 1
        });
        prop_assert_eq!(is_legal(&s).unwrap().legal, unit);
        prop_assert_eq!(ensure_legal(&s).is_ok(), unit);
    }
}

#[test]
fn equivalence_matches_brute_force_on_small_rank2_cycles() {
    // oracle: two sequences are equivalent iff some dihedral arrangement of one
    // maps onto the other by the unique linear map fixed on the first two weights
    let spaces: Vec<WeightedOrbitSpace> = pool(2).iter().filter(|s| s.len() == 4).take(60).cloned().collect();
    let related = |a: &WeightedOrbitSpace, b: &WeightedOrbitSpace| {
        let target = b.slopes();
        let signs = [1i64, -1];
        [a.clone(), a.reversed()].iter().any(|base| {
            (0..a.len()).any(|r| {
                let w = base.rotated(r).slopes();
                signs.iter().any(|&s0| {
                    signs.iter().any(|&s1| {
                        // rows x0, x1 map to s0 y0, s1 y1
                        let src = IntMatrix::from_rows(&[w[0].clone(), w[1].clone()]).unwrap();
                        let dst = IntMatrix::from_rows(&[
                            target[0].iter().map(|v| s0 * v).collect::<Vec<_>>(),
                            target[1].iter().map(|v| s1 * v).collect(),
                        ])
                        .unwrap();
                        let det = determinant(&src).unwrap();
                        let adj = IntMatrix::from_rows(&[
                            [det * src.get(1, 1), -det * src.get(0, 1)],
                            [-det * src.get(1, 0), det * src.get(0, 0)],
                        ])
                        .unwrap();
                        let a_map = adj.mul(&dst).unwrap();
                        base.rotated(r).transformed(&a_map).map(|t| t == *b).unwrap_or(false)
                    })
                })
            })
        })
    };
    let mut pairs = 0;
    for a in &spaces {
        for b in &spaces {
            let r = related(a, b);
            assert_eq!(are_equivalent(a, b).unwrap(), r, "{a} vs {b}");
            pairs += usize::from(r);
        }
    }
    assert!(pairs > spaces.len(), "only trivial pairs");
}
