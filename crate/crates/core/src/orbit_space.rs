//! Weighted orbit spaces: a disk whose boundary arcs carry the slopes of
//! their circle isotropy groups in `T^n`.
//!
//! Slopes are row vectors. A reparametrization of the torus by a unimodular
//! matrix `A` acts on all slopes simultaneously as `x -> x * A`.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    determinant, format_vector, gcd_ext, gcd_slice, quotient_group, AbelianGroup, IntMatrix,
    LatticeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitSpaceError {
    #[error("torus rank {0} is too small (need at least 2)")]
    RankTooSmall(usize),
    #[error("rank {0} is not supported here")]
    UnsupportedRank(usize),
    #[error("ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("{weights} weights for a rank {rank} torus (need at least {rank})")]
    TooFewWeights { rank: usize, weights: usize },
    #[error("weight {weight} has length {len}, expected {rank}")]
    WrongLength { weight: String, len: usize, rank: usize },
    #[error("weight {0} is not primitive")]
    NotPrimitive(String),
    #[error("orbit space is not legally weighted (failing adjacent pairs {0:?})")]
    IllegalOrbitSpace(Vec<(usize, usize)>),
    #[error("cannot parse weights: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, OrbitSpaceError>;

/// Flips `v` so that its first nonzero entry is positive.
pub fn normalize_sign(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in &mut v {
            *x = -*x;
        }
    }
    v
}

/// Slope of a circle subgroup: primitive, first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(slope: Vec<i64>) -> Result<Self> {
        if gcd_slice(&slope) != 1 {
            return Err(OrbitSpaceError::NotPrimitive(format_vector(&slope)));
        }
        Ok(Self(normalize_sign(slope)))
    }

    pub fn slope(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.0))
    }
}

/// Total order on integers used for canonical forms: `0 < 1 < -1 < 2 < -2 < ...`.
fn entry_key(x: i64) -> (u64, bool) {
    (x.unsigned_abs(), x < 0)
}

/// Total order on weight sequences: length first, then entries under `0 < 1 < -1 < 2 < -2 < ...`.
pub fn compare_sequences(a: &[Vec<i64>], b: &[Vec<i64>]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .flatten()
            .map(|&x| entry_key(x))
            .cmp(b.iter().flatten().map(|&x| entry_key(x)))
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OrbitSpaceFile", into = "OrbitSpaceFile")]
pub struct WeightedOrbitSpace {
    rank: usize,
    weights: Vec<Weight>,
}

/// On-disk form: `{"rank": 2, "weights": [[1,0],[0,1],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitSpaceFile {
    pub rank: usize,
    pub weights: Vec<Vec<i64>>,
}

impl TryFrom<OrbitSpaceFile> for WeightedOrbitSpace {
    type Error = OrbitSpaceError;

    fn try_from(f: OrbitSpaceFile) -> Result<Self> {
        WeightedOrbitSpace::new(f.rank, f.weights)
    }
}

impl From<WeightedOrbitSpace> for OrbitSpaceFile {
    fn from(s: WeightedOrbitSpace) -> Self {
        OrbitSpaceFile { rank: s.rank, weights: s.slopes() }
    }
}

impl WeightedOrbitSpace {
    /// Validates and sign-normalizes the weights.
    pub fn new(rank: usize, weights: Vec<Vec<i64>>) -> Result<Self> {
        if rank < 2 {
            return Err(OrbitSpaceError::RankTooSmall(rank));
        }
        if weights.len() < rank {
            return Err(OrbitSpaceError::TooFewWeights { rank, weights: weights.len() });
        }
        let weights = weights
            .into_iter()
            .map(|w| {
                if w.len() != rank {
                    return Err(OrbitSpaceError::WrongLength { weight: format_vector(&w), len: w.len(), rank });
                }
                Weight::new(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rank, weights })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn slopes(&self) -> Vec<Vec<i64>> {
        self.weights.iter().map(|w| w.0.clone()).collect()
    }

    /// N x n matrix with the slopes as rows.
    pub fn weight_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.slopes()).expect("weights share the rank")
    }

    /// Cyclic rotation: weight `i` of the result is weight `i + k` of `self`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.weights.len();
        let weights = (0..n).map(|i| self.weights[(i + k) % n].clone()).collect();
        Self { rank: self.rank, weights }
    }

    /// Same arcs traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        Self { rank: self.rank, weights }
    }

    /// Reparametrizes the torus by `a` (must be unimodular): `x -> x * a`.
    pub fn transformed(&self, a: &IntMatrix) -> Result<Self> {
        if a.rows() != self.rank || !a.is_square() {
            return Err(LatticeError::DimensionMismatch(format!(
                "transform is {}x{} for rank {}",
                a.rows(),
                a.cols(),
                self.rank
            ))
            .into());
        }
        if determinant(a)?.abs() != 1 {
            return Err(LatticeError::DimensionMismatch("transform is not unimodular".into()).into());
        }
        let slopes = self.weights.iter().map(|w| a.left_apply(&w.0)).collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(self.rank, slopes)
    }

    /// The pair extends to a basis iff its 2x2 minors are coprime.
    fn pair_is_legal(&self, i: usize, j: usize) -> Result<bool> {
        let (x, y) = (&self.weights[i].0, &self.weights[j].0);
        let mut g: i128 = 0;
        for a in 0..x.len() {
            for b in a + 1..x.len() {
                let minor = x[a] as i128 * y[b] as i128 - x[b] as i128 * y[a] as i128;
                g = gcd_i128(g, minor);
            }
        }
        Ok(g == 1)
    }
}

impl Ord for WeightedOrbitSpace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank.cmp(&other.rank).then_with(|| compare_sequences(&self.slopes(), &other.slopes()))
    }
}

impl PartialOrd for WeightedOrbitSpace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for WeightedOrbitSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightedOrbitSpace(rank {}, {})", self.rank, self)
    }
}

impl fmt::Display for WeightedOrbitSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.weights.iter().map(|w| w.to_string()).join(","))
    }
}

/// Parses `"(1,0),(0,1),(1,0),(2,1)"` (whitespace and `[]` brackets are accepted too).
pub fn parse_tuple_list(text: &str) -> Result<Vec<Vec<i64>>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).map(|c| match c {
        '[' => '(',
        ']' => ')',
        c => c,
    }).collect();
    let mut out = Vec::new();
    let mut rest = cleaned.as_str();
    // tolerate one pair of outer brackets around the whole list
    if rest.starts_with("((") && rest.ends_with("))") {
        rest = &rest[1..rest.len() - 1];
    }
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('(') else {
            return Err(OrbitSpaceError::Parse(format!("expected '(' at {rest:?}")));
        };
        let close = body.find(')').ok_or_else(|| OrbitSpaceError::Parse("unbalanced parenthesis".into()))?;
        let tuple = body[..close]
            .split(',')
            .map(|t| t.parse::<i64>().map_err(|e| OrbitSpaceError::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(tuple);
        rest = &body[close + 1..];
        rest = rest.strip_prefix(',').unwrap_or(rest);
    }
    if out.is_empty() {
        return Err(OrbitSpaceError::Parse("no tuples given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegalityReport {
    pub legal: bool,
    /// Cyclically adjacent index pairs `(i, i+1 mod N)` that fail to extend to a basis.
    pub failing_pairs: Vec<(usize, usize)>,
    /// Some n weights have nonzero determinant.
    pub spans: bool,
    /// Some n weights with determinant +-1.
    pub simply_connected_certificate: Option<Vec<usize>>,
}

/// Adjacent slopes must extend to a unimodular matrix; for rank 2 this is `|det| = 1`.
pub fn is_legal(s: &WeightedOrbitSpace) -> Result<LegalityReport> {
    let n = s.len();
    let mut failing_pairs = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        if !s.pair_is_legal(i, j)? {
            failing_pairs.push((i, j));
        }
    }
    let witness = simply_connected_witness(s)?;
    Ok(LegalityReport {
        legal: failing_pairs.is_empty(),
        failing_pairs,
        spans: witness.spans,
        simply_connected_certificate: witness.certificate,
    })
}

pub fn ensure_legal(s: &WeightedOrbitSpace) -> Result<()> {
    let n = s.len();
    let mut failing_pairs = Vec::new();
    for i in 0..n {
        if !s.pair_is_legal(i, (i + 1) % n)? {
            failing_pairs.push((i, (i + 1) % n));
        }
    }
    if failing_pairs.is_empty() {
        Ok(())
    } else {
        Err(OrbitSpaceError::IllegalOrbitSpace(failing_pairs))
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// `Z^n / <x_1, ..., x_N>`, which bounds the fundamental group.
pub fn pi1_bound(s: &WeightedOrbitSpace) -> Result<AbelianGroup> {
    Ok(quotient_group(&s.weight_matrix())?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplyConnectedWitness {
    /// First n-subset (lexicographic in the indices) with determinant +-1.
    pub certificate: Option<Vec<usize>>,
    pub spans: bool,
}

impl SimplyConnectedWitness {
    /// No n weights span: the manifold splits off a circle factor.
    pub fn splits_off_circle(&self) -> bool {
        !self.spans
    }

    /// Spanning without a unimodular subset: the fundamental group is finite.
    pub fn finite_pi1_only(&self) -> bool {
        self.spans && self.certificate.is_none()
    }
}

pub fn simply_connected_witness(s: &WeightedOrbitSpace) -> Result<SimplyConnectedWitness> {
    let m = s.weight_matrix();
    let mut spans = false;
    for idx in (0..s.len()).combinations(s.rank()) {
        let det = determinant(&m.select_rows(&idx))?;
        if det != 0 {
            spans = true;
        }
        if det.abs() == 1 {
            return Ok(SimplyConnectedWitness { certificate: Some(idx), spans });
        }
    }
    Ok(SimplyConnectedWitness { certificate: None, spans })
}

/// Whether disk reflections count as symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Rotations and reflections of the boundary cycle.
    #[default]
    Unoriented,
    /// Rotations only.
    Oriented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub space: WeightedOrbitSpace,
    /// `A` with `canonical_i = +-(x_{sigma(i)} * A)` for the rotation/reflection `sigma` used.
    pub transform: IntMatrix,
    /// Whether the cycle was traversed backwards, and the start offset into
    /// that (possibly reversed) cycle.
    pub reversed: bool,
    pub rotation: usize,
}

impl Canonical {
    /// The input reordered as used here, before the change of coordinates.
    pub fn arrange(&self, s: &WeightedOrbitSpace) -> WeightedOrbitSpace {
        let base = if self.reversed { s.reversed() } else { s.clone() };
        base.rotated(self.rotation)
    }
}

/// Minimal representative, under the fixed order on weight sequences, of
/// all sequences equivalent to `s` whose first two weights are `e_1, e_2`.
///
/// Moves: a common unimodular change of torus coordinates, rotation,
/// reflection (unless `Oriented`) and per-weight sign. Once the first two
/// weights sit on `e_1, e_2` the remaining freedom is the stabilizer of
/// that pair: sign changes, plus for rank 3 the shears
/// `(p, q, r) -> (p + k r, q + l r, r)`. The shear is pinned by the first
/// weight with `r != 0`: only shears minimizing `|p + k r|` and
/// `|q + l r|` there can win, which leaves at most four candidates.
pub fn canonicalize(s: &WeightedOrbitSpace) -> Result<Canonical> {
    canonicalize_with(s, Orientation::Unoriented)
}

pub fn canonicalize_with(s: &WeightedOrbitSpace, orientation: Orientation) -> Result<Canonical> {
    let n = s.rank();
    if n > 3 {
        return Err(OrbitSpaceError::UnsupportedRank(n));
    }
    ensure_legal(s)?;

    let reversals: &[bool] = match orientation {
        Orientation::Unoriented => &[false, true],
        Orientation::Oriented => &[false],
    };
    let slopes: Vec<[i64; 3]> = s.weights.iter().map(|w| pad(&w.0)).collect();
    let len = slopes.len();
    let mut best: Option<Best> = None;
    let mut scratch: Vec<[i64; 3]> = Vec::with_capacity(len);

    for &rev in reversals {
        for rot in 0..len {
            let at = |i: usize| if rev { slopes[(2 * len - 1 - rot - i) % len] } else { slopes[(rot + i) % len] };
            let to_frame = frame_inverse(n, at(0), at(1))?;
            let framed: Vec<[i64; 3]> = (0..len).map(|i| apply3(&at(i), &to_frame)).collect::<Result<_>>()?;
            let pivot = framed.iter().find(|x| x[2] != 0).copied();

            for mask in 0..1u32 << n {
                let sign = |i: usize| if i < n && mask >> (n - 1 - i) & 1 == 1 { -1 } else { 1 };
                let (ks, ls) = match pivot {
                    Some(p) if n == 3 => (nearest_shears(sign(0) * p[0], p[2]), nearest_shears(sign(1) * p[1], p[2])),
                    _ => (Shears::one(0), Shears::one(0)),
                };
                for &k in ks.as_slice() {
                    for &l in ls.as_slice() {
                        let residual = Residual { signs: [sign(0), sign(1), sign(2)], k, l };
                        if residual.build_if_better(&framed, best.as_ref().map(|b| b.slopes.as_slice()), &mut scratch)? {
                            best = Some(Best { slopes: scratch.clone(), to_frame, residual, rot, rev });
                        }
                    }
                }
            }
        }
    }
    let b = best.expect("at least one rotation");
    let transform = IntMatrix::from_rows(&b.to_frame.map(|r| r[..n].to_vec())[..n])?
        .mul(&b.residual.matrix(n))?;
    let slopes = b.slopes.iter().map(|x| x[..n].to_vec()).collect();
    Ok(Canonical { space: WeightedOrbitSpace::new(n, slopes)?, transform, rotation: b.rot, reversed: b.rev })
}

struct Best {
    slopes: Vec<[i64; 3]>,
    to_frame: [[i64; 3]; 3],
    residual: Residual,
    rot: usize,
    rev: bool,
}

/// `diag(signs)` plus, in rank 3, the shear `(p, q, r) -> (p + k r, q + l r, r)`.
#[derive(Clone, Copy)]
struct Residual {
    signs: [i64; 3],
    k: i64,
    l: i64,
}

impl Residual {
    fn apply(&self, x: &[i64; 3]) -> Result<[i64; 3]> {
        let shear = |s: i64, v: i64, c: i64| {
            c.checked_mul(x[2]).and_then(|t| (s * v).checked_add(t)).ok_or(LatticeError::Overflow)
        };
        Ok([shear(self.signs[0], x[0], self.k)?, shear(self.signs[1], x[1], self.l)?, self.signs[2] * x[2]])
    }

    fn matrix(&self, n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, self.signs[i]);
        }
        if n == 3 {
            m.set(2, 0, self.k);
            m.set(2, 1, self.l);
        }
        m
    }

    /// Writes the transformed, sign-normalized sequence into `out` and
    /// reports whether it beats `best`; stops early once it cannot.
    fn build_if_better(&self, framed: &[[i64; 3]], best: Option<&[[i64; 3]]>, out: &mut Vec<[i64; 3]>) -> Result<bool> {
        out.clear();
        let mut decided = best.is_none();
        for (i, x) in framed.iter().enumerate() {
            let mut y = self.apply(x)?;
            if y.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
                y = y.map(|v| -v);
            }
            if !decided {
                let b = &best.expect("checked")[i];
                match y.iter().map(|&v| entry_key(v)).cmp(b.iter().map(|&v| entry_key(v))) {
                    Ordering::Less => decided = true,
                    Ordering::Greater => return Ok(false),
                    Ordering::Equal => {}
                }
            }
            out.push(y);
        }
        Ok(decided)
    }
}

fn pad(v: &[i64]) -> [i64; 3] {
    let mut out = [0; 3];
    out[..v.len()].copy_from_slice(v);
    out
}

fn apply3(x: &[i64; 3], m: &[[i64; 3]; 3]) -> Result<[i64; 3]> {
    let mut out = [0i64; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let v: i128 = (0..3).map(|i| x[i] as i128 * m[i][j] as i128).sum();
        *o = i64::try_from(v).map_err(|_| LatticeError::Overflow)?;
    }
    Ok(out)
}

/// Inverse of a unimodular matrix whose first rows are the legal pair
/// `x, y`; for rank 3 the last row solves `det = 1` by Bezout on the
/// cross product.
fn frame_inverse(n: usize, x: [i64; 3], y: [i64; 3]) -> Result<[[i64; 3]; 3]> {
    let wide = |v: [i64; 3]| v.map(|e| e as i128);
    let (x, y) = (wide(x), wide(y));
    let narrow = |m: [[i128; 3]; 3]| -> Result<[[i64; 3]; 3]> {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = i64::try_from(m[i][j]).map_err(|_| LatticeError::Overflow)?;
            }
        }
        Ok(out)
    };
    if n == 2 {
        let det = x[0] * y[1] - x[1] * y[0];
        debug_assert_eq!(det.abs(), 1);
        return narrow([[y[1] * det, -x[1] * det, 0], [-y[0] * det, x[0] * det, 0], [0, 0, 1]]);
    }
    let c = [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
    let small = |v: i128| i64::try_from(v).map_err(|_| LatticeError::Overflow);
    let (g01, s, t) = gcd_ext(small(c[0])?, small(c[1])?);
    let (g, u, w) = gcd_ext(g01, small(c[2])?);
    if g != 1 {
        return Err(LatticeError::NotCompletable { factors: vec![1, g] }.into());
    }
    let z = [(u * s) as i128, (u * t) as i128, w as i128];
    let f = [x, y, z];
    // det f = z . (x cross y) = 1, so the inverse is the adjugate
    let inv = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            f[r0][c0] * f[r1][c1] - f[r0][c1] * f[r1][c0]
        })
    });
    narrow(inv)
}

/// All `k` minimizing `|x + k r|` (one or two values), `r != 0`.
fn nearest_shears(x: i64, r: i64) -> Shears {
    let r_abs = r.abs();
    let rem = x.rem_euclid(r_abs);
    // x + k r hits rem and rem - |r|
    let k_low = (rem - x) / r;
    let k_high = (rem - r_abs - x) / r;
    match (2 * rem).cmp(&r_abs) {
        Ordering::Less => Shears::one(k_low),
        Ordering::Greater => Shears::one(k_high),
        Ordering::Equal => Shears { ks: [k_low, k_high], len: 2 },
    }
}

struct Shears {
    ks: [i64; 2],
    len: usize,
}

impl Shears {
    fn one(k: i64) -> Self {
        Shears { ks: [k, 0], len: 1 }
    }

    fn as_slice(&self) -> &[i64] {
        &self.ks[..self.len]
    }
}

pub fn are_equivalent(a: &WeightedOrbitSpace, b: &WeightedOrbitSpace) -> Result<bool> {
    are_equivalent_with(a, b, Orientation::Unoriented)
}

pub fn are_equivalent_with(a: &WeightedOrbitSpace, b: &WeightedOrbitSpace, orientation: Orientation) -> Result<bool> {
    if a.rank() != b.rank() {
        return Err(OrbitSpaceError::RankMismatch(a.rank(), b.rank()));
    }
    let ca = canonicalize_with(a, orientation)?;
    let cb = canonicalize_with(b, orientation)?;
    Ok(ca.space == cb.space)
}
