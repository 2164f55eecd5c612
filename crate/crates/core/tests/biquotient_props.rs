use torus_orbits::biquotient::{
    classify_t2_quotient, default_extension_bound, extend_circle_to_t2, is_free_circle, is_free_t2, realize_dim4,
    realize_dim5, s1act_condition, t2_orbit_space, CircleActionParams, Extension, NoExtensionReason, T2ActionParams,
    T2Freeness,
};
use torus_orbits::census::{census_with_threads, round_trip};
use torus_orbits::classify::{Dim5Params, ManifoldType};
use torus_orbits::orbit_space::{are_equivalent, WeightedOrbitSpace};

fn det2(x: &[i64], y: &[i64]) -> i64 {
    x[0] * y[1] - x[1] * y[0]
}

/// Free `T^2` parameters with all entries in `[-bound, bound]`.
fn free_t2(bound: i64) -> Vec<T2ActionParams> {
    let range = || -bound..=bound;
    let mut out = Vec::new();
    for a in range() {
        for c in range() {
            for m in range() {
                for n in range() {
                    if a * m + c * n != 1 {
                        continue;
                    }
                    for b in range() {
                        for d in range() {
                            for k in range() {
                                for l in range() {
                                    let p = T2ActionParams::new(a, b, c, d, n, k, m, l);
                                    if is_free_t2(&p).is_free() {
                                        out.push(p);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn t2_quotients_follow_the_intersection_parity() {
    // oracle: for a legal 4-cycle, x_{i+1} = +-x_{i-1} + c_i x_i and the form is
    // even iff every c_i is even; c_i has the parity of det(x_{i-1}, x_{i+1})
    let params = free_t2(4);
    assert!(params.len() > 5_000, "{}", params.len());
    let mut seen = [0usize; 3];
    for p in &params {
        let kind = classify_t2_quotient(p).unwrap();
        let T2Freeness::Free { eps } = is_free_t2(p) else { unreachable!() };
        let w = t2_orbit_space(p).unwrap().slopes();
        assert_eq!(w.len(), 4, "{p}");
        let even = (0..4).all(|i| det2(&w[(i + 3) % 4], &w[(i + 1) % 4]) % 2 == 0);
        let expected = match (even, eps.0 * eps.1 * eps.2) {
            (true, _) => ManifoldType::S2xS2,
            (false, -1) => ManifoldType::CP2SharpCP2,
            (false, _) => ManifoldType::CP2SharpMinusCP2,
        };
        assert_eq!(kind, expected, "{p}");
        seen[match kind {
            ManifoldType::S2xS2 => 0,
            ManifoldType::CP2SharpCP2 => 1,
            _ => 2,
        }] += 1;
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
}

#[test]
fn normal_families() {
    for r in -3..=3 {
        for lambda in [0, 1] {
            let p = T2ActionParams::inffree(r, lambda);
            assert_eq!(is_free_t2(&p), T2Freeness::Free { eps: (1, 1, 1) });
            let expected = if lambda == 0 { ManifoldType::S2xS2 } else { ManifoldType::CP2SharpMinusCP2 };
            assert_eq!(classify_t2_quotient(&p).unwrap(), expected);
            let target =
                WeightedOrbitSpace::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 0], vec![2 * r + lambda, 1]]).unwrap();
            assert!(are_equivalent(&t2_orbit_space(&p).unwrap(), &target).unwrap());
        }
    }
    let u = T2ActionParams::unifree();
    assert_eq!(is_free_t2(&u), T2Freeness::Free { eps: (1, 1, -1) });
    assert_eq!(classify_t2_quotient(&u).unwrap(), ManifoldType::CP2SharpCP2);
}

#[test]
fn extension_witnesses_are_free() {
    let mut witnesses = 0;
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            for c in -3i64..=3 {
                for d in -3i64..=3 {
                    let p = CircleActionParams::new(a, b, c, d);
                    if (a, b, c, d) == (0, 0, 0, 0) || !is_free_circle(&p).unwrap() {
                        continue;
                    }
                    match extend_circle_to_t2(&p, default_extension_bound(&p)).unwrap() {
                        Extension::Witness(w) => {
                            assert!(s1act_condition(&p), "{p}");
                            assert!(is_free_t2(&w.t2).is_free(), "{p}");
                            assert_eq!(w.t2.z_exponents(), p.exponents());
                            witnesses += 1;
                        }
                        Extension::NoExtension(NoExtensionReason::NecessaryConditionFails) => {
                            assert!(!s1act_condition(&p), "{p}");
                        }
                        Extension::NoExtension(NoExtensionReason::SearchExhausted { .. }) => {}
                    }
                }
            }
        }
    }
    assert!(witnesses > 100, "{witnesses}");
}

#[test]
fn trivial_factor_extends() {
    let p = CircleActionParams::new(1, 1, 0, 0);
    let Extension::Witness(w) = extend_circle_to_t2(&p, 4).unwrap() else { panic!("no witness") };
    assert!(is_free_t2(&w.t2).is_free());
}

#[test]
fn dim4_realizations() {
    let space = |w: &[[i64; 2]]| WeightedOrbitSpace::new(2, w.iter().map(|x| x.to_vec()).collect()).unwrap();
    assert_eq!(realize_dim4(&space(&[[1, 0], [0, 1], [1, 0], [4, 1]])).unwrap(), T2ActionParams::inffree(2, 0));
    assert_eq!(realize_dim4(&space(&[[1, 0], [0, 1], [1, 0], [3, 1]])).unwrap(), T2ActionParams::inffree(1, 1));
    assert_eq!(realize_dim4(&space(&[[1, 0], [0, 1], [1, 1], [2, 1]])).unwrap(), T2ActionParams::unifree());
    assert!(realize_dim4(&space(&[[1, 0], [0, 1], [1, 1]])).is_err());
}

#[test]
fn dim5_realizations() {
    let space = |x3: [i64; 3], x4: [i64; 3]| {
        WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], x3.to_vec(), x4.to_vec()]).unwrap()
    };
    assert_eq!(
        realize_dim5(&space([1, 1, 2], [1, 1, 3])).unwrap(),
        Dim5Params { a: 3, b: 1, c: 2, d: 1, k: 0, l: 0, m: 1, n: -1 }
    );
    assert_eq!(
        realize_dim5(&space([1, 1, 1], [0, 0, 1])).unwrap(),
        Dim5Params { a: 1, b: 1, c: 1, d: 1, k: 0, l: 0, m: 1, n: 0 }
    );
}

#[test]
fn census_rows_do_not_depend_on_thread_count() {
    let one = census_with_threads(2, 3, 1).unwrap();
    let four = census_with_threads(2, 3, 4).unwrap();
    assert_eq!(one.len(), four.len());
    for (x, y) in one.iter().zip(&four) {
        assert_eq!(x.canonical, y.canonical);
        assert_eq!(x.manifold, y.manifold);
        assert_eq!(x.class_size, y.class_size);
        assert!(x.verified && y.verified, "{}", x.canonical);
        if let Some(r) = &x.realization {
            assert!(round_trip(&x.canonical, r).unwrap());
        }
    }
}
