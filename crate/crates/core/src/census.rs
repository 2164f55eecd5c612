//! Exhaustive tables of legal, simply connected orbit spaces with four
//! weights, one row per equivalence class.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::biquotient::{dim5_orbit_space, realize_dim4, realize_dim5, t2_orbit_space, BiquotientError, T2ActionParams};
use crate::classify::{classify_dim4, classify_dim5, pi1_dim5_exact, ClassifyError, Dim5Params, ManifoldType};
use crate::lattice::{gcd_slice, smith_normal_form, AbelianGroup, IntMatrix, LatticeError};
use crate::orbit_space::{are_equivalent, canonicalize, pi1_bound, OrbitSpaceError, WeightedOrbitSpace};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census supports rank 2 or 3, got {0}")]
    UnsupportedRank(usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    OrbitSpace(#[from] OrbitSpaceError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

impl From<LatticeError> for CensusError {
    fn from(e: LatticeError) -> Self {
        CensusError::OrbitSpace(e.into())
    }
}

pub type Result<T> = std::result::Result<T, CensusError>;

/// The action realizing a class: a free `T^2` (rank 2) or a free circle with
/// its complementary `T^3` shears (rank 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Realization {
    T2(T2ActionParams),
    Circle(Dim5Params),
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realization::T2(p) => write!(f, "t2 {p}"),
            Realization::Circle(p) => write!(f, "circle {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub canonical: WeightedOrbitSpace,
    pub manifold: ManifoldType,
    pub pi1: AbelianGroup,
    pub realization: Option<Realization>,
    /// The realizing action induces an orbit space equivalent to `canonical`.
    pub verified: bool,
    /// Number of enumerated sequences (up to rotation and reversal) in the class.
    pub class_size: usize,
}

/// Primitive vectors with entries in `[-bound, bound]` and first nonzero entry positive.
pub fn primitive_slopes(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(rank as u32);
    (0..total)
        .map(|mut code| {
            (0..rank)
                .map(|_| {
                    let x = (code % side) as i64 - bound;
                    code /= side;
                    x
                })
                .collect::<Vec<i64>>()
        })
        .filter(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) && gcd_slice(v) == 1)
        .collect()
}

fn pair_legal(x: &[i64], y: &[i64]) -> bool {
    match x.len() {
        2 => (x[0] * y[1] - x[1] * y[0]).abs() == 1,
        _ => smith_normal_form(&IntMatrix::from_rows(&[x, y]).expect("same length"))
            .map(|s| s.diagonal() == vec![1, 1])
            .unwrap_or(false),
    }
}

/// Index tuple that is minimal among its rotations and reversals.
fn is_dihedral_min(t: [u16; 4]) -> bool {
    (0..4).all(|r| {
        let rot = [t[r], t[(r + 1) % 4], t[(r + 2) % 4], t[(r + 3) % 4]];
        let rev = [rot[3], rot[2], rot[1], rot[0]];
        t <= rot && t <= rev
    })
}

fn det3(a: &[i64], b: &[i64], c: &[i64]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `Z^n / <weights>` is trivial iff the maximal minors have gcd 1. For
/// rank 2 a legal adjacent pair is already unimodular.
fn quotient_trivial(w: [&[i64]; 4]) -> bool {
    match w[0].len() {
        2 => true,
        _ => gcd_slice(&[det3(w[0], w[1], w[2]), det3(w[0], w[1], w[3]), det3(w[0], w[2], w[3]), det3(w[1], w[2], w[3])]) == 1,
    }
}

/// Legal, simply connected four-weight sequences as index cycles into `slopes`.
pub struct LegalCycles {
    pub rank: usize,
    pub slopes: Vec<Vec<i64>>,
    pub cycles: Vec<[u16; 4]>,
}

impl LegalCycles {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn space(&self, i: usize) -> WeightedOrbitSpace {
        let w = self.cycles[i].iter().map(|&j| self.slopes[j as usize].clone()).collect();
        WeightedOrbitSpace::new(self.rank, w).expect("primitive slopes")
    }
}

/// All legal, simply connected four-weight sequences with entries in
/// `[-bound, bound]` (weights up to sign), optionally reduced to one per
/// rotation/reversal orbit.
pub fn legal_cycles(rank: usize, bound: i64, dihedral_reduced: bool) -> Result<LegalCycles> {
    if !(2..=3).contains(&rank) {
        return Err(CensusError::UnsupportedRank(rank));
    }
    let slopes = if bound < 1 { Vec::new() } else { primitive_slopes(rank, bound) };
    let v = slopes.len();
    assert!(v <= u16::MAX as usize, "too many slopes for the index type");
    let legal: Vec<Vec<bool>> =
        (0..v).into_par_iter().map(|i| (0..v).map(|j| pair_legal(&slopes[i], &slopes[j])).collect()).collect();
    let neighbours: Vec<Vec<u16>> =
        legal.iter().map(|row| (0..v).filter(|&j| row[j]).map(|j| j as u16).collect()).collect();
    let per_start: Vec<Vec<[u16; 4]>> = (0..v)
        .into_par_iter()
        .map(|i0| {
            let mut out = Vec::new();
            for &i1 in &neighbours[i0] {
                for &i2 in &neighbours[i1 as usize] {
                    for &i3 in &neighbours[i2 as usize] {
                        if !legal[i3 as usize][i0] {
                            continue;
                        }
                        let t = [i0 as u16, i1, i2, i3];
                        if dihedral_reduced && !is_dihedral_min(t) {
                            continue;
                        }
                        if quotient_trivial(t.map(|j| slopes[j as usize].as_slice())) {
                            out.push(t);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(LegalCycles { rank, slopes, cycles: per_start.into_iter().flatten().collect() })
}

/// [`legal_cycles`] materialized as orbit spaces.
pub fn enumerate_sequences(rank: usize, bound: i64, dihedral_reduced: bool) -> Result<Vec<WeightedOrbitSpace>> {
    let cycles = legal_cycles(rank, bound, dihedral_reduced)?;
    Ok((0..cycles.len()).map(|i| cycles.space(i)).collect())
}

/// One row per canonical class, sorted by canonical form.
pub fn census(rank: usize, bound: i64) -> Result<Vec<CensusRow>> {
    let sequences = enumerate_sequences(rank, bound, true)?;
    let canon: Vec<WeightedOrbitSpace> = sequences
        .par_iter()
        .map(|s| canonicalize(s).map(|c| c.space))
        .collect::<std::result::Result<_, _>>()?;
    let mut classes: BTreeMap<WeightedOrbitSpace, usize> = BTreeMap::new();
    for c in canon {
        *classes.entry(c).or_default() += 1;
    }
    let classes: Vec<(WeightedOrbitSpace, usize)> = classes.into_iter().collect();
    classes.into_par_iter().map(|(space, size)| census_row(space, size)).collect()
}

/// [`census`] on a dedicated pool of `threads` workers.
pub fn census_with_threads(rank: usize, bound: i64, threads: usize) -> Result<Vec<CensusRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CensusError::ThreadPool(e.to_string()))?;
    pool.install(|| census(rank, bound))
}

fn census_row(canonical: WeightedOrbitSpace, class_size: usize) -> Result<CensusRow> {
    let (manifold, pi1) = match canonical.rank() {
        2 => (classify_dim4(&canonical)?, pi1_bound(&canonical)?),
        _ => (classify_dim5(&canonical)?, pi1_dim5_exact(&canonical)?),
    };
    let realization = match canonical.rank() {
        2 => realize_dim4(&canonical).map(Realization::T2),
        _ => realize_dim5(&canonical).map(Realization::Circle),
    }
    .ok();
    let verified = match realization {
        Some(r) => round_trip(&canonical, &r).unwrap_or(false),
        None => false,
    };
    Ok(CensusRow { canonical, manifold, pi1, realization, verified, class_size })
}

/// Whether the orbit space induced by `r` is equivalent to `target`.
pub fn round_trip(target: &WeightedOrbitSpace, r: &Realization) -> std::result::Result<bool, BiquotientError> {
    let induced = match r {
        Realization::T2(p) => t2_orbit_space(p)?,
        Realization::Circle(p) => dim5_orbit_space(p)?,
    };
    Ok(are_equivalent(&induced, target)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank2_bound1() {
        let rows = census(2, 1).unwrap();
        assert!(!rows.is_empty());
        for row in &rows {
            assert!(matches!(
                row.manifold,
                ManifoldType::S2xS2 | ManifoldType::CP2SharpMinusCP2 | ManifoldType::CP2SharpCP2
            ));
            assert!(row.verified, "{row:?}");
        }
        let types: std::collections::BTreeSet<String> = rows.iter().map(|r| r.manifold.to_string()).collect();
        assert_eq!(types.len(), 3);
    }

    #[test]
    fn rank3_bound1_contains_product() {
        let rows = census(3, 1).unwrap();
        let target = canonicalize(
            &WeightedOrbitSpace::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1], vec![0, 0, 1]]).unwrap(),
        )
        .unwrap()
        .space;
        let row = rows.iter().find(|r| r.canonical == target).expect("class present");
        assert_eq!(row.manifold, ManifoldType::S3xS2);
        assert!(rows.iter().all(|r| r.verified));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(census(2, 0).unwrap().is_empty());
        assert!(matches!(census(4, 1), Err(CensusError::UnsupportedRank(4))));
    }
}
