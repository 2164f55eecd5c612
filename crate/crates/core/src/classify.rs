//! Manifold type and fundamental group of the manifold encoded by a legally
//! weighted orbit space: `T^2` on 4-manifolds and `T^3` on 5-manifolds.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{gcd, gcd_ext, gcd_slice, AbelianGroup, LatticeError};
use crate::orbit_space::{
    canonicalize, ensure_legal, pi1_bound, simply_connected_witness, OrbitSpaceError, WeightedOrbitSpace,
};
use crate::lattice::{unimodular_complete, unimodular_inverse};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ManifoldType {
    S4,
    /// Orientation is not tracked, so `CP2` stands for either `+-CP2`.
    CP2,
    S2xS2,
    CP2SharpCP2,
    CP2SharpMinusCP2,
    S5,
    S3xS2,
    S3TwistS2,
    /// Simply connected 4-manifold with `count + 2` fixed points; only `b_2 = count` is reported.
    ConnectedSumDim4(usize),
    ProductWithCircle,
    NotSimplyConnected(AbelianGroup),
}

impl fmt::Display for ManifoldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldType::S4 => write!(f, "S4"),
            ManifoldType::CP2 => write!(f, "CP2"),
            ManifoldType::S2xS2 => write!(f, "S2xS2"),
            ManifoldType::CP2SharpCP2 => write!(f, "CP2#CP2"),
            ManifoldType::CP2SharpMinusCP2 => write!(f, "CP2#-CP2"),
            ManifoldType::S5 => write!(f, "S5"),
            ManifoldType::S3xS2 => write!(f, "S3xS2"),
            ManifoldType::S3TwistS2 => write!(f, "S3twistS2"),
            ManifoldType::ConnectedSumDim4(k) => write!(f, "ConnectedSumDim4({k})"),
            ManifoldType::ProductWithCircle => write!(f, "ProductWithCircle"),
            ManifoldType::NotSimplyConnected(g) => write!(f, "NotSimplyConnected({g})"),
        }
    }
}

impl Serialize for ManifoldType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The individual conditions of the dim-5 gcd criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcdCondition {
    /// `gcd(r, z) = 1`
    RZ,
    /// `gcd(p, r) = 1`
    PR,
    /// `gcd(y, z) = 1`
    YZ,
    /// `gcd(py - qx, rx - pz, qz - ry) = 1`
    CrossProduct,
    /// `gcd(b, d) = 1` for the extracted parameters
    BD,
}

impl fmt::Display for GcdCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GcdCondition::RZ => "gcd(r,z) = 1",
            GcdCondition::PR => "gcd(p,r) = 1",
            GcdCondition::YZ => "gcd(y,z) = 1",
            GcdCondition::CrossProduct => "gcd(py-qx, rx-pz, qz-ry) = 1",
            GcdCondition::BD => "gcd(b,d) = 1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    OrbitSpace(#[from] OrbitSpaceError),
    #[error("expected a rank {expected} orbit space, got rank {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("{0} weights are not supported for rank 3 (only 3 or 4)")]
    UnsupportedWeightCount(usize),
    #[error("gcd condition violated: {0}")]
    GcdConditionViolated(GcdCondition),
    #[error("shear parameters are inconsistent for {0}")]
    InconsistentShear(String),
    #[error("orbit space is not in canonical position (need 4 weights starting (1,0,0),(0,1,0))")]
    NotCanonicalPosition,
    #[error("classification depends on the traversal: {0} vs {1}")]
    OrientationDiscrepancy(ManifoldType, ManifoldType),
    #[error("normal form (b,c) = ({0},{1}) matches no legal case")]
    UnexpectedNormalForm(i64, i64),
}

impl From<LatticeError> for ClassifyError {
    fn from(e: LatticeError) -> Self {
        ClassifyError::OrbitSpace(e.into())
    }
}

pub type Result<T> = std::result::Result<T, ClassifyError>;

fn require_rank(s: &WeightedOrbitSpace, rank: usize) -> Result<()> {
    if s.rank() != rank {
        return Err(ClassifyError::WrongRank { expected: rank, got: s.rank() });
    }
    Ok(())
}

/// Type of the simply connected 4-manifold, or the obstruction.
pub fn classify_dim4(s: &WeightedOrbitSpace) -> Result<ManifoldType> {
    require_rank(s, 2)?;
    ensure_legal(s)?;
    let witness = simply_connected_witness(s)?;
    if witness.certificate.is_none() {
        return Ok(if witness.splits_off_circle() {
            ManifoldType::ProductWithCircle
        } else {
            ManifoldType::NotSimplyConnected(pi1_bound(s)?)
        });
    }
    match s.len() {
        2 => Ok(ManifoldType::S4),
        3 => Ok(ManifoldType::CP2),
        4 => classify_four_fixed_points(s),
        n => Ok(ManifoldType::ConnectedSumDim4(n - 2)),
    }
}

/// Put `x_1, x_2` on `e_1, e_2` and read `x_3 = (a,b)`, `x_4 = (c,d)`.
/// Legality forces `|a| = |d| = 1` and `bc in {0, +-2}`: `|bc| = 2` is
/// `CP2#CP2`, otherwise the parity of the nonzero one of `b, c` decides
/// between `S2xS2` and `CP2#-CP2`. Every starting arc and both traversal
/// directions are tried and must agree.
fn classify_four_fixed_points(s: &WeightedOrbitSpace) -> Result<ManifoldType> {
    let mut verdict: Option<ManifoldType> = None;
    for base in [s.clone(), s.reversed()] {
        for rot in 0..4 {
            let seq = base.rotated(rot).slopes();
            let frame = unimodular_complete(&[seq[0].clone(), seq[1].clone()])?;
            let to_frame = unimodular_inverse(&frame)?;
            let x3 = to_frame.left_apply(&seq[2])?;
            let x4 = to_frame.left_apply(&seq[3])?;
            let (b, c) = (x3[1], x4[0]);
            let t = match b * c {
                2 | -2 => ManifoldType::CP2SharpCP2,
                0 if (b + c) % 2 == 0 => ManifoldType::S2xS2,
                0 => ManifoldType::CP2SharpMinusCP2,
                _ => return Err(ClassifyError::UnexpectedNormalForm(b, c)),
            };
            match &verdict {
                None => verdict = Some(t),
                Some(v) if *v != t => return Err(ClassifyError::OrientationDiscrepancy(v.clone(), t)),
                Some(_) => {}
            }
        }
    }
    Ok(verdict.expect("four rotations"))
}

/// Exponent data of the circle action on `S3xS3` together with the
/// reparametrization `(k, l, m, n)` of the complementary 3-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dim5Params {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub k: i64,
    pub l: i64,
    pub m: i64,
    pub n: i64,
}

impl Dim5Params {
    /// Checks `am + cn = 1` and the four cross gcds.
    pub fn validate(&self) -> Result<()> {
        let Dim5Params { a, b, c, d, m, n, .. } = *self;
        if a * m + c * n != 1 {
            return Err(ClassifyError::InconsistentShear(format!("am + cn = {} != 1", a * m + c * n)));
        }
        if gcd(a, c) != 1 || gcd(a, d) != 1 || gcd(b, c) != 1 {
            return Err(ClassifyError::GcdConditionViolated(GcdCondition::CrossProduct));
        }
        if gcd(b, d) != 1 {
            return Err(ClassifyError::GcdConditionViolated(GcdCondition::BD));
        }
        Ok(())
    }

    /// The four arc weights `(1,0,0), (0,1,0), (bm-ck, dm-cl, c), (-bn-ak, -dn-al, a)`.
    pub fn weight_vectors(&self) -> [Vec<i64>; 4] {
        let Dim5Params { a, b, c, d, k, l, m, n } = *self;
        [
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![b * m - c * k, d * m - c * l, c],
            vec![-b * n - a * k, -d * n - a * l, a],
        ]
    }

    pub fn orbit_space(&self) -> Result<WeightedOrbitSpace> {
        Ok(WeightedOrbitSpace::new(3, self.weight_vectors().to_vec())?)
    }

    pub fn sum(&self) -> i64 {
        self.a + self.b + self.c + self.d
    }
}

impl fmt::Display for Dim5Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Dim5Params { a, b, c, d, k, l, m, n } = *self;
        write!(f, "(a,b,c,d,k,l,m,n)=({a},{b},{c},{d},{k},{l},{m},{n})")
    }
}

/// The slopes `(p,q,r)` and `(x,y,z)` of a rank-3, four-weight space whose
/// first two weights are exactly `e_1, e_2`.
fn canonical_position(s: &WeightedOrbitSpace) -> Result<([i64; 3], [i64; 3])> {
    require_rank(s, 3)?;
    let w = s.slopes();
    if w.len() != 4 || w[0] != [1, 0, 0] || w[1] != [0, 1, 0] {
        return Err(ClassifyError::NotCanonicalPosition);
    }
    Ok(([w[2][0], w[2][1], w[2][2]], [w[3][0], w[3][1], w[3][2]]))
}

fn exact_quotient(num: i64, den: i64, what: &str) -> Result<i64> {
    if den == 0 || num % den != 0 {
        return Err(ClassifyError::InconsistentShear(what.to_string()));
    }
    Ok(num / den)
}

/// Recovers `(a,b,c,d,k,l,m,n)` from a canonical-position orbit space.
///
/// `a = z`, `b = pz - rx`, `c = r`, `d = qz - ry`; `(m, n)` is the Bezout
/// pair of `a m + c n = 1` with minimal `|n|`; `k` and `l` are solved from
/// both weight formulas and must agree.
pub fn extract_dim5_params(s: &WeightedOrbitSpace) -> Result<Dim5Params> {
    let ([p, q, r], [x, y, z]) = canonical_position(s)?;
    let checks = [
        (gcd(r, z), GcdCondition::RZ),
        (gcd(p, r), GcdCondition::PR),
        (gcd(y, z), GcdCondition::YZ),
        (gcd_slice(&[p * y - q * x, r * x - p * z, q * z - r * y]), GcdCondition::CrossProduct),
    ];
    if let Some(&(_, cond)) = checks.iter().find(|(g, _)| *g != 1) {
        return Err(ClassifyError::GcdConditionViolated(cond));
    }
    let (a, b, c, d) = (z, p * z - r * x, r, q * z - r * y);
    let (_, n, m) = gcd_ext(c, a);

    // x = -bn - ak, p = bm - ck
    let k = if a != 0 { exact_quotient(-b * n - x, a, "k")? } else { exact_quotient(b * m - p, c, "k")? };
    let l = if a != 0 { exact_quotient(-d * n - y, a, "l")? } else { exact_quotient(d * m - q, c, "l")? };
    let params = Dim5Params { a, b, c, d, k, l, m, n };
    let [_, _, x3, x4] = params.weight_vectors();
    if x3 != [p, q, r] || x4 != [x, y, z] {
        return Err(ClassifyError::InconsistentShear(format!("{params} does not reproduce the weights")));
    }
    params.validate()?;
    Ok(params)
}

/// `S5` for three arcs, otherwise `S3xS2` or the twisted bundle by the parity of `a+b+c+d`.
pub fn classify_dim5(s: &WeightedOrbitSpace) -> Result<ManifoldType> {
    require_rank(s, 3)?;
    ensure_legal(s)?;
    match s.len() {
        3 => {
            let g = pi1_bound(s)?;
            if g.is_trivial() {
                Ok(ManifoldType::S5)
            } else {
                Ok(ManifoldType::NotSimplyConnected(g))
            }
        }
        4 => {
            let canon = canonicalize(s)?;
            let g = pi1_dim5_exact(&canon.space)?;
            if !g.is_trivial() {
                return Ok(if simply_connected_witness(s)?.splits_off_circle() {
                    ManifoldType::ProductWithCircle
                } else {
                    ManifoldType::NotSimplyConnected(g)
                });
            }
            let params = extract_dim5_params(&canon.space)?;
            Ok(twisting_class(&params))
        }
        n => Err(ClassifyError::UnsupportedWeightCount(n)),
    }
}

fn twisting_class(p: &Dim5Params) -> ManifoldType {
    let odd_sum = p.sum().rem_euclid(2) == 1;
    let evens = [p.a, p.b, p.c, p.d].iter().filter(|&&v| v % 2 == 0).count();
    debug_assert_eq!(odd_sum, evens == 1, "parity rule disagrees for {p}");
    if odd_sum {
        ManifoldType::S3TwistS2
    } else {
        ManifoldType::S3xS2
    }
}

/// `Z_gcd(r,z)` for a canonical-position input.
pub fn pi1_dim5_exact(s: &WeightedOrbitSpace) -> Result<AbelianGroup> {
    let ([_, _, r], [_, _, z]) = canonical_position(s)?;
    Ok(AbelianGroup::cyclic(gcd(r, z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LensKind {
    /// order 1
    Sphere,
    /// order 0
    S2xS1,
    Lens,
}

/// `L(order; twist)`; the twist is reported as computed, not reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LensSpace {
    pub order: u64,
    pub twist: i64,
    pub kind: LensKind,
}

impl LensSpace {
    pub fn new(order: i64, twist: i64) -> Self {
        let order = order.unsigned_abs();
        let kind = match order {
            0 => LensKind::S2xS1,
            1 => LensKind::Sphere,
            _ => LensKind::Lens,
        };
        Self { order, twist, kind }
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LensKind::Sphere => write!(f, "S3"),
            LensKind::S2xS1 => write!(f, "S2xS1"),
            LensKind::Lens => write!(f, "L({};{})", self.order, self.twist),
        }
    }
}

/// Pre-images of the arcs with weights `(0,1,0)` and `(x,y,z)`:
/// `L(r; p)` and `L(qz - ry; p - (lambda q + mu r) x)` with `lambda y + mu z = 1`.
pub fn boundary_lens_spaces(s: &WeightedOrbitSpace) -> Result<(LensSpace, LensSpace)> {
    let ([p, q, r], [x, y, z]) = canonical_position(s)?;
    let (g, lambda, mu) = gcd_ext(y, z);
    if g != 1 {
        return Err(ClassifyError::GcdConditionViolated(GcdCondition::YZ));
    }
    Ok((LensSpace::new(r, p), LensSpace::new(q * z - r * y, p - (lambda * q + mu * r) * x)))
}
