mod common;

use common::{apply, case};
use proptest::prelude::*;
use torus_orbits::census::primitive_slopes;
use torus_orbits::classify::{
    classify_dim4, classify_dim5, extract_dim5_params, pi1_dim5_exact, ClassifyError, Dim5Params, GcdCondition,
    ManifoldType,
};
use torus_orbits::lattice::{gcd, gcd_ext, gcd_slice};
use torus_orbits::orbit_space::{ensure_legal, normalize_sign, pi1_bound, WeightedOrbitSpace};

/// Valid parameters: `a, c` coprime, a Bezout pair shifted along its family,
/// and `b, d` drawn until the cross gcds hold.
fn dim5_params() -> impl Strategy<Value = Dim5Params> {
    (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6, -3i64..=3, -4i64..=4, -4i64..=4)
        .prop_filter_map("cross gcds", |(a, b, c, d, shift, k, l)| {
            if gcd(a, c) != 1 {
                return None;
            }
            let (_, n0, m0) = gcd_ext(c, a);
            let (m, n) = (m0 - c * shift, n0 + a * shift);
            let p = Dim5Params { a, b, c, d, k, l, m, n };
            p.validate().ok().map(|_| p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dim4_type_is_a_class_invariant((s, m) in case(2)) {
        prop_assert_eq!(classify_dim4(&apply(&s, &m)).unwrap(), classify_dim4(&s).unwrap());
    }

    #[test]
    fn dim5_type_is_a_class_invariant((s, m) in case(3)) {
        prop_assert_eq!(classify_dim5(&apply(&s, &m)).unwrap(), classify_dim5(&s).unwrap());
    }

    #[test]
    fn extraction_inverts_the_weight_formulas(p in dim5_params()) {
        let space = p.orbit_space().unwrap();
        prop_assert!(ensure_legal(&space).is_ok());
        let q = extract_dim5_params(&space).unwrap();
        prop_assert_eq!(q.orbit_space().unwrap(), space.clone());
        let [_, _, x3, x4] = p.weight_vectors();
        // sign normalization of a weight flips the recovered exponents
        if normalize_sign(x3.clone()) == x3 && normalize_sign(x4.clone()) == x4 {
            prop_assert_eq!((q.a, q.b, q.c, q.d), (p.a, p.b, p.c, p.d));
            // the Bezout pair differs from p's by a multiple of (-c, a)
            prop_assert_eq!((q.m - p.m) * p.a + (q.n - p.n) * p.c, 0);
        }
        prop_assert_eq!(pi1_dim5_exact(&space).unwrap(), pi1_bound(&space).unwrap());
        let expected = if p.sum().rem_euclid(2) == 1 { ManifoldType::S3TwistS2 } else { ManifoldType::S3xS2 };
        prop_assert_eq!(classify_dim5(&space).unwrap(), expected);
    }
}

#[test]
fn coprime_cross_product_forces_coprime_b_d() {
    let slopes = primitive_slopes(3, 3);
    let mut checked = 0;
    for x3 in &slopes {
        for x4 in &slopes {
            let s = WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], x3.clone(), x4.clone()]).unwrap();
            if ensure_legal(&s).is_err() {
                continue;
            }
            let ([p, q, r], [x, y, z]) = ([x3[0], x3[1], x3[2]], [x4[0], x4[1], x4[2]]);
            if gcd(r, z) != 1 || gcd(p, r) != 1 || gcd(y, z) != 1 {
                continue;
            }
            let (b, d) = (p * z - r * x, q * z - r * y);
            if gcd_slice(&[b, d, p * y - q * x]) == 1 {
                assert_eq!(gcd(b, d), 1, "{s}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn dim5_examples() {
    let s = WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2], vec![1, 1, 3]]).unwrap();
    let p = extract_dim5_params(&s).unwrap();
    assert_eq!(p, Dim5Params { a: 3, b: 1, c: 2, d: 1, k: 0, l: 0, m: 1, n: -1 });
    assert_eq!(classify_dim5(&s).unwrap(), ManifoldType::S3TwistS2);
    assert!(pi1_dim5_exact(&s).unwrap().is_trivial());

    // gcd(r, z) = 2
    let s = WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 2], vec![0, 1, 2]]).unwrap();
    assert_eq!(extract_dim5_params(&s), Err(ClassifyError::GcdConditionViolated(GcdCondition::RZ)));

    let three = WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    assert_eq!(classify_dim5(&three).unwrap(), ManifoldType::S5);
}

#[test]
fn dim4_examples() {
    let space = |w: &[[i64; 2]]| WeightedOrbitSpace::new(2, w.iter().map(|x| x.to_vec()).collect()).unwrap();
    for k in -5..=5 {
        let expected = if k % 2 == 0 { ManifoldType::S2xS2 } else { ManifoldType::CP2SharpMinusCP2 };
        assert_eq!(classify_dim4(&space(&[[1, 0], [0, 1], [1, 0], [k, 1]])).unwrap(), expected, "k = {k}");
    }
    assert_eq!(classify_dim4(&space(&[[1, 0], [0, 1], [1, 1], [2, 1]])).unwrap(), ManifoldType::CP2SharpCP2);
    assert_eq!(classify_dim4(&space(&[[1, 0], [0, 1], [1, 1]])).unwrap(), ManifoldType::CP2);
    assert_eq!(classify_dim4(&space(&[[1, 0], [0, 1]])).unwrap(), ManifoldType::S4);
}
