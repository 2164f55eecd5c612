#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use torus_orbits::census::legal_cycles;
use torus_orbits::lattice::IntMatrix;
use torus_orbits::orbit_space::WeightedOrbitSpace;

pub fn pool(rank: usize) -> &'static [WeightedOrbitSpace] {
    static RANK2: OnceLock<Vec<WeightedOrbitSpace>> = OnceLock::new();
    static RANK3: OnceLock<Vec<WeightedOrbitSpace>> = OnceLock::new();
    let (cell, bound) = if rank == 2 { (&RANK2, 3) } else { (&RANK3, 1) };
    cell.get_or_init(|| {
        let cycles = legal_cycles(rank, bound, true).unwrap();
        (0..cycles.len()).map(|i| cycles.space(i)).collect()
    })
}

/// Product of elementary shears `e_i += k e_j` with `|k| <= 3`, then a signed transposition.
pub fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    let op = (0..n, 0..n, -3i64..=3);
    (prop::collection::vec(op, 0..5), 0..n, 0..n, any::<bool>()).prop_map(move |(ops, p, q, flip)| {
        let mut m = IntMatrix::identity(n);
        for (i, j, k) in ops {
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e.set(i, j, k);
            m = m.mul(&e).unwrap();
        }
        let mut swap = IntMatrix::zeros(n, n);
        for i in 0..n {
            let to = if i == p { q } else if i == q { p } else { i };
            swap.set(i, to, if flip && i == 0 { -1 } else { 1 });
        }
        m.mul(&swap).unwrap()
    })
}

#[derive(Debug, Clone)]
pub struct Moves {
    pub transform: IntMatrix,
    pub rotation: usize,
    pub reverse: bool,
    pub negate: Vec<bool>,
}

pub fn moves(n: usize) -> impl Strategy<Value = Moves> {
    (unimodular(n), 0usize..8, any::<bool>(), prop::collection::vec(any::<bool>(), 8))
        .prop_map(|(transform, rotation, reverse, negate)| Moves { transform, rotation, reverse, negate })
}

pub fn apply(s: &WeightedOrbitSpace, m: &Moves) -> WeightedOrbitSpace {
    let t = s.transformed(&m.transform).unwrap();
    let t = if m.reverse { t.reversed() } else { t };
    let t = t.rotated(m.rotation % t.len());
    let slopes = t
        .slopes()
        .into_iter()
        .zip(&m.negate)
        .map(|(w, &neg)| if neg { w.into_iter().map(|x| -x).collect() } else { w })
        .collect();
    WeightedOrbitSpace::new(t.rank(), slopes).unwrap()
}

pub fn case(rank: usize) -> impl Strategy<Value = (WeightedOrbitSpace, Moves)> {
    let spaces = pool(rank);
    (0..spaces.len(), moves(rank)).prop_map(move |(i, m)| (spaces[i].clone(), m))
}
