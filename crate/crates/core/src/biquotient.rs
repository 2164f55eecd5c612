//! Isometric torus actions on `S3 x S3` and the weighted orbit spaces they
//! induce on the biquotients `S3 x S3 // H`.
//!
//! A point of `S3 x S3` is `(alpha_1 + beta_1 j, alpha_2 + beta_2 j)`; a torus
//! `T^t` acts by multiplying each of the four complex coordinates by a
//! character, recorded as a row of a [`TorusWeightMatrix`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_dim4, extract_dim5_params, ClassifyError, Dim5Params, ManifoldType};
use crate::lattice::{
    gcd, gcd_ext, kernel_basis, smith_normal_form, unimodular_complete, AbelianGroup, IntMatrix, LatticeError,
};
use crate::orbit_space::{are_equivalent, canonicalize, OrbitSpaceError, WeightedOrbitSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiquotientError {
    #[error("degenerate action: all exponents are zero")]
    DegenerateAction,
    #[error("action is not free")]
    NotFree,
    #[error("weight matrix is not effective (invariant factors {0:?})")]
    NotEffective(Vec<i64>),
    #[error("subtorus does not act freely on points with support {0}")]
    NotFreeSubtorus(SupportPattern),
    #[error("support {0} is not realizable (each factor needs a nonzero coordinate)")]
    UnrealizableSupport(SupportPattern),
    #[error("stabilizer of support {support} is {got}, expected {expected}")]
    StabilizerRankUnexpected { support: SupportPattern, expected: String, got: AbelianGroup },
    #[error("epsilon product {product} contradicts quotient type {kind}")]
    EpsilonClassMismatch { product: i64, kind: ManifoldType },
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("slope ({0},{1}) is not primitive")]
    SlopesNotCoprime(i64, i64),
    #[error("bad subtorus: {0}")]
    BadSubtorus(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

impl From<OrbitSpaceError> for BiquotientError {
    fn from(e: OrbitSpaceError) -> Self {
        BiquotientError::Classify(e.into())
    }
}

impl From<LatticeError> for BiquotientError {
    fn from(e: LatticeError) -> Self {
        BiquotientError::Classify(e.into())
    }
}

pub type Result<T> = std::result::Result<T, BiquotientError>;

/// `z` acting by `z^a alpha_1 + z^b beta_1 j`, `z^c alpha_2 + z^d beta_2 j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircleActionParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CircleActionParams {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn exponents(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl fmt::Display for CircleActionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// `(w, z)` acting with `z`-exponents `(a,b,c,d)` and `w`-exponents
/// `(-n, k, m, l)` on `(alpha_1, beta_1, alpha_2, beta_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct T2ActionParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub n: i64,
    pub k: i64,
    pub m: i64,
    pub l: i64,
}

impl T2ActionParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: i64, b: i64, c: i64, d: i64, n: i64, k: i64, m: i64, l: i64) -> Self {
        Self { a, b, c, d, n, k, m, l }
    }

    /// `z alpha_1 w^-r + z beta_1 w^(r+lambda)`, `w alpha_2 + w beta_2`:
    /// `S2 x S2` for even `lambda`, `CP2#-CP2` for odd.
    pub fn inffree(r: i64, lambda: i64) -> Self {
        Self::new(1, 1, 0, 0, r, r + lambda, 1, 1)
    }

    /// The free action with quotient `CP2#CP2`.
    pub fn unifree() -> Self {
        Self::new(1, 0, -1, 1, 0, 1, 1, 1)
    }

    pub fn z_exponents(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn w_exponents(&self) -> [i64; 4] {
        [-self.n, self.k, self.m, self.l]
    }

    /// The circle `z -> (w, z) = (z^p, z^q)`.
    pub fn sub_circle(&self, p: i64, q: i64) -> CircleActionParams {
        let z = self.z_exponents();
        let w = self.w_exponents();
        CircleActionParams::new(q * z[0] + p * w[0], q * z[1] + p * w[1], q * z[2] + p * w[2], q * z[3] + p * w[3])
    }
}

impl fmt::Display for T2ActionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let T2ActionParams { a, b, c, d, n, k, m, l } = *self;
        write!(f, "(a,b,c,d,n,k,m,l)=({a},{b},{c},{d},{n},{k},{m},{l})")
    }
}

/// Action parameters as read from the command line or a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActionParams {
    Circle(CircleActionParams),
    T2(T2ActionParams),
}

/// Coordinates of `S3 x S3` in the fixed order `alpha_1, beta_1, alpha_2, beta_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    Alpha1 = 0,
    Beta1 = 1,
    Alpha2 = 2,
    Beta2 = 3,
}

impl Coordinate {
    pub const ALL: [Coordinate; 4] = [Coordinate::Alpha1, Coordinate::Beta1, Coordinate::Alpha2, Coordinate::Beta2];

    fn name(self) -> &'static str {
        match self {
            Coordinate::Alpha1 => "a1",
            Coordinate::Beta1 => "b1",
            Coordinate::Alpha2 => "a2",
            Coordinate::Beta2 => "b2",
        }
    }
}

/// The set of nonzero coordinates of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportPattern(u8);

impl SupportPattern {
    pub fn new(coords: &[Coordinate]) -> Self {
        Self(coords.iter().fold(0, |acc, &c| acc | 1 << c as u8))
    }

    pub fn all() -> Self {
        Self(0b1111)
    }

    pub fn contains(self, c: Coordinate) -> bool {
        self.0 & (1 << c as u8) != 0
    }

    pub fn coordinates(self) -> Vec<Coordinate> {
        Coordinate::ALL.into_iter().filter(|&c| self.contains(c)).collect()
    }

    pub fn indices(self) -> Vec<usize> {
        self.coordinates().into_iter().map(|c| c as usize).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Each unit quaternion needs at least one nonzero coordinate.
    pub fn is_realizable(self) -> bool {
        (self.contains(Coordinate::Alpha1) || self.contains(Coordinate::Beta1))
            && (self.contains(Coordinate::Alpha2) || self.contains(Coordinate::Beta2))
    }

    /// All nine realizable supports, ordered by bitmask.
    pub fn realizable() -> Vec<SupportPattern> {
        (1u8..16).map(SupportPattern).filter(|s| s.is_realizable()).collect()
    }

    /// Stratum name such as `[S1xS1_j]` or `[S3xS1]`.
    pub fn stratum(self) -> String {
        let factor = |alpha, beta| match (self.contains(alpha), self.contains(beta)) {
            (true, true) => "S3",
            (true, false) => "S1",
            (false, true) => "S1_j",
            (false, false) => "{}",
        };
        format!(
            "[{}x{}]",
            factor(Coordinate::Alpha1, Coordinate::Beta1),
            factor(Coordinate::Alpha2, Coordinate::Beta2)
        )
    }
}

impl Serialize for SupportPattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for SupportPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.coordinates().into_iter().map(Coordinate::name).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Arc supports in diagram order: drop `beta_1`, `beta_2`, `alpha_1`, `alpha_2`.
pub fn arc_supports() -> [SupportPattern; 4] {
    use Coordinate::*;
    [
        SupportPattern::new(&[Alpha1, Alpha2, Beta2]),
        SupportPattern::new(&[Alpha1, Beta1, Alpha2]),
        SupportPattern::new(&[Beta1, Alpha2, Beta2]),
        SupportPattern::new(&[Alpha1, Beta1, Beta2]),
    ]
}

/// Vertex `i` joins arcs `i` and `i + 1`: `[S1xS1]`, `[S1_jxS1]`, `[S1_jxS1_j]`, `[S1xS1_j]`.
pub fn vertex_supports() -> [SupportPattern; 4] {
    use Coordinate::*;
    [
        SupportPattern::new(&[Alpha1, Alpha2]),
        SupportPattern::new(&[Beta1, Alpha2]),
        SupportPattern::new(&[Beta1, Beta2]),
        SupportPattern::new(&[Alpha1, Beta2]),
    ]
}

/// Characters of an effective `T^t` action on `S3 x S3`: a 4 x t matrix
/// whose row `i` is the character on coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusWeightMatrix {
    matrix: IntMatrix,
}

impl TorusWeightMatrix {
    /// Effectiveness: `T^t -> T^4` is injective, i.e. all invariant factors are 1.
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() == 0 || matrix.cols() > 4 {
            return Err(LatticeError::DimensionMismatch(format!(
                "weight matrix must be 4 x t with 1 <= t <= 4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            ))
            .into());
        }
        let diag = smith_normal_form(&matrix)?.diagonal();
        if diag.len() != matrix.cols() || diag.iter().any(|&x| x != 1) {
            return Err(BiquotientError::NotEffective(diag));
        }
        Ok(Self { matrix })
    }

    /// The `T^4_{uvwz}` action: rows `(0,0,-n,a)`, `(1,0,k,b)`, `(0,0,m,c)`, `(0,1,l,d)`.
    #[allow(clippy::too_many_arguments)]
    pub fn eff_t4(a: i64, b: i64, c: i64, d: i64, n: i64, k: i64, m: i64, l: i64) -> Result<Self> {
        let rows = [[0, 0, -n, a], [1, 0, k, b], [0, 0, m, c], [0, 1, l, d]];
        Self::new(IntMatrix::from_rows(&rows)?)
    }

    pub fn from_t2(p: &T2ActionParams) -> Result<Self> {
        Self::eff_t4(p.a, p.b, p.c, p.d, p.n, p.k, p.m, p.l)
    }

    pub fn from_dim5(p: &Dim5Params) -> Result<Self> {
        Self::eff_t4(p.a, p.b, p.c, p.d, p.n, p.k, p.m, p.l)
    }

    /// `T^3_{uwz}` acting by `z w^-r u^-s alpha_1 + z w^(r+1) u^s beta_1 j`,
    /// `w u^-1 alpha_2 + w u beta_2 j`; columns `(u, w, z)`.
    pub fn orbifold_family(r: i64, s: i64) -> Result<Self> {
        let rows = [[-s, -r, 1], [s, r + 1, 1], [-1, 1, 0], [1, 1, 0]];
        Self::new(IntMatrix::from_rows(&rows)?)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn torus_rank(&self) -> usize {
        self.matrix.cols()
    }
}

/// A subtorus of `T^t`, given by the rows of its embedding `Z^h -> Z^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subtorus {
    rows: IntMatrix,
}

impl Subtorus {
    pub fn new(rows: IntMatrix) -> Result<Self> {
        if rows.rows() == 0 || rows.rows() >= rows.cols() {
            return Err(BiquotientError::BadSubtorus(format!(
                "need 1 <= h < t, got {}x{}",
                rows.rows(),
                rows.cols()
            )));
        }
        let diag = smith_normal_form(&rows)?.diagonal();
        if diag.len() != rows.rows() || diag.iter().any(|&x| x != 1) {
            return Err(BiquotientError::BadSubtorus(format!("embedding has invariant factors {diag:?}")));
        }
        Ok(Self { rows })
    }

    /// The coordinate subtorus spanned by the given columns of `T^t`.
    pub fn coordinates(t: usize, idx: &[usize]) -> Result<Self> {
        let mut rows = IntMatrix::zeros(idx.len(), t);
        for (i, &j) in idx.iter().enumerate() {
            rows.set(i, j, 1);
        }
        Self::new(rows)
    }

    /// `T^2_{wz}` inside `T^4_{uvwz}`.
    pub fn t2_wz() -> Self {
        Self::coordinates(4, &[2, 3]).expect("coordinate subtorus")
    }

    /// The `z`-circle inside `T^4_{uvwz}`.
    pub fn z_circle() -> Self {
        Self::coordinates(4, &[3]).expect("coordinate subtorus")
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.rows()
    }

    /// Rows of a complementary torus `C`, so that `[H; C]` is unimodular.
    pub fn complement(&self) -> Result<IntMatrix> {
        let full = unimodular_complete(&self.rows.to_rows())?;
        let h = self.dim();
        Ok(full.select_rows(&(h..full.rows()).collect::<Vec<_>>()))
    }
}

/// Stabilizer in the residual torus `T^t / H`, written in complement coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    pub group: AbelianGroup,
    /// Primitive generators of the identity component.
    pub slopes: Vec<Vec<i64>>,
    /// Nonzero invariant factors of the defining relations `N mu in Z^*`.
    pub factors: Vec<i64>,
}

impl Stabilizer {
    /// Number of points of order dividing `modulus` in the stabilizer.
    pub fn order_mod(&self, modulus: i64) -> i64 {
        let finite: i64 = self.factors.iter().map(|&d| gcd(d, modulus)).product();
        finite * modulus.pow(self.group.free_rank as u32)
    }
}

/// Generic stabilizer of points with support `s` for the residual action of
/// `T^t / H`, expressed in the complement returned by [`Subtorus::complement`].
///
/// With `M_H = W_S H^T` and `M_C = W_S C^T`, a residual element `mu` fixes the
/// `H`-orbit iff `M_H lambda + M_C mu` is integral for some `lambda`. Row
/// reducing `M_H` by its Smith form eliminates `lambda` and leaves the
/// relations `N mu` integral.
pub fn induced_stabilizer(w: &TorusWeightMatrix, h: &Subtorus, s: SupportPattern) -> Result<Stabilizer> {
    if h.rows.cols() != w.torus_rank() {
        return Err(BiquotientError::BadSubtorus(format!(
            "subtorus lives in T^{}, action is by T^{}",
            h.rows.cols(),
            w.torus_rank()
        )));
    }
    if !s.is_realizable() {
        return Err(BiquotientError::UnrealizableSupport(s));
    }
    ensure_free_subtorus(w, h)?;
    let c = h.complement()?;
    stabilizer_in(w, h, &c, s)
}

/// Freeness on the four minimal supports implies freeness everywhere.
fn ensure_free_subtorus(w: &TorusWeightMatrix, h: &Subtorus) -> Result<()> {
    for s in vertex_supports() {
        let mh = w.matrix.select_rows(&s.indices()).mul(&h.rows.transpose())?;
        let diag = smith_normal_form(&mh)?.diagonal();
        if diag.len() != h.dim() || diag.iter().any(|&x| x != 1) {
            return Err(BiquotientError::NotFreeSubtorus(s));
        }
    }
    Ok(())
}

fn stabilizer_in(w: &TorusWeightMatrix, h: &Subtorus, c: &IntMatrix, s: SupportPattern) -> Result<Stabilizer> {
    let ws = w.matrix.select_rows(&s.indices());
    let mh = ws.mul(&h.rows.transpose())?;
    let mc = ws.mul(&c.transpose())?;
    let snf = smith_normal_form(&mh)?;
    let rank = snf.rank();
    if rank != h.dim() || snf.diagonal().iter().any(|&x| x != 1) {
        return Err(BiquotientError::NotFreeSubtorus(s));
    }
    let reduced = snf.u.mul(&mc)?;
    let residual = c.rows();
    if reduced.rows() == rank {
        return Ok(Stabilizer {
            group: AbelianGroup { free_rank: residual, torsion: Vec::new() },
            slopes: IntMatrix::identity(residual).to_rows(),
            factors: Vec::new(),
        });
    }
    let relations = reduced.select_rows(&(rank..reduced.rows()).collect::<Vec<_>>());
    let rsnf = smith_normal_form(&relations)?;
    let factors: Vec<i64> = rsnf.diagonal()[..rsnf.rank()].to_vec();
    Ok(Stabilizer {
        group: AbelianGroup {
            free_rank: residual - rsnf.rank(),
            torsion: factors.iter().copied().filter(|&d| d > 1).collect(),
        },
        slopes: kernel_basis(&rsnf, relations.cols())?,
        factors,
    })
}

/// Stabilizers of the four vertex and four arc strata, in diagram order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsotropyData {
    pub vertices: Vec<(SupportPattern, Stabilizer)>,
    pub arcs: Vec<(SupportPattern, Stabilizer)>,
}

/// Vertex supports come first, so a non-free subtorus is reported there.
pub fn induced_isotropy(w: &TorusWeightMatrix, h: &Subtorus) -> Result<IsotropyData> {
    let c = h.complement()?;
    let collect = |supports: [SupportPattern; 4]| -> Result<Vec<_>> {
        supports.into_iter().map(|s| Ok((s, stabilizer_in(w, h, &c, s)?))).collect()
    };
    Ok(IsotropyData { vertices: collect(vertex_supports())?, arcs: collect(arc_supports())? })
}

/// Weighted orbit space of the residual torus action, with its strata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyDiagram {
    pub space: WeightedOrbitSpace,
    pub arcs: Vec<SupportPattern>,
    pub vertices: Vec<SupportPattern>,
}

/// Requires `T^4`: vertices must have connected rank-2 stabilizers and arcs circles.
pub fn induced_orbit_space(w: &TorusWeightMatrix, h: &Subtorus) -> Result<IsotropyDiagram> {
    let data = induced_isotropy(w, h)?;
    let residual = w.torus_rank() - h.dim();
    if w.torus_rank() != 4 || !(2..=3).contains(&residual) {
        return Err(BiquotientError::BadSubtorus(format!(
            "need T^4 with residual rank 2 or 3, got T^{} / T^{}",
            w.torus_rank(),
            h.dim()
        )));
    }
    let expect = |list: &[(SupportPattern, Stabilizer)], rank: usize, what: &str| -> Result<()> {
        for (s, stab) in list {
            if stab.group.free_rank != rank || !stab.group.torsion.is_empty() {
                return Err(BiquotientError::StabilizerRankUnexpected {
                    support: *s,
                    expected: what.to_string(),
                    got: stab.group.clone(),
                });
            }
        }
        Ok(())
    };
    expect(&data.vertices, 2, "a 2-torus")?;
    expect(&data.arcs, 1, "a circle")?;
    let slopes = data.arcs.iter().map(|(_, st)| st.slopes[0].clone()).collect();
    Ok(IsotropyDiagram {
        space: WeightedOrbitSpace::new(residual, slopes)?,
        arcs: data.arcs.iter().map(|(s, _)| *s).collect(),
        vertices: data.vertices.iter().map(|(s, _)| *s).collect(),
    })
}

/// True iff all four pairwise gcds `(a,c), (a,d), (b,c), (b,d)` are 1.
///
/// One factor may be acted on trivially: `(1,1,0,0)` is free.
pub fn is_free_circle(p: &CircleActionParams) -> Result<bool> {
    let CircleActionParams { a, b, c, d } = *p;
    if (a, b, c, d) == (0, 0, 0, 0) {
        return Err(BiquotientError::DegenerateAction);
    }
    Ok(gcd(a, c) == 1 && gcd(a, d) == 1 && gcd(b, c) == 1 && gcd(b, d) == 1)
}

/// `S3twistS2` iff `a+b+c+d` is odd.
pub fn w2_class(p: &CircleActionParams) -> Result<ManifoldType> {
    if !is_free_circle(p)? {
        return Err(BiquotientError::NotFree);
    }
    let odd = (p.a + p.b + p.c + p.d).rem_euclid(2) == 1;
    let evens = p.exponents().iter().filter(|&&x| x % 2 == 0).count();
    assert_eq!(odd, evens == 1, "parity of {p} disagrees with its count of even entries");
    Ok(if odd { ManifoldType::S3TwistS2 } else { ManifoldType::S3xS2 })
}

/// Which of the four freeness conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum T2Condition {
    /// `am + cn = 1`
    Determinant,
    /// `al + dn = +-1`
    Eps2,
    /// `bm - ck = +-1`
    Eps3,
    /// `bl - dk = +-1`
    Eps4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum T2Freeness {
    Free { eps: (i64, i64, i64) },
    NotFree { failing: T2Condition, value: i64 },
}

impl T2Freeness {
    pub fn is_free(&self) -> bool {
        matches!(self, T2Freeness::Free { .. })
    }
}

pub fn is_free_t2(p: &T2ActionParams) -> T2Freeness {
    let T2ActionParams { a, b, c, d, n, k, m, l } = *p;
    let det = a * m + c * n;
    if det != 1 {
        return T2Freeness::NotFree { failing: T2Condition::Determinant, value: det };
    }
    let checks = [(a * l + d * n, T2Condition::Eps2), (b * m - c * k, T2Condition::Eps3), (b * l - d * k, T2Condition::Eps4)];
    if let Some(&(value, failing)) = checks.iter().find(|(v, _)| v.abs() != 1) {
        return T2Freeness::NotFree { failing, value };
    }
    T2Freeness::Free { eps: (checks[0].0, checks[1].0, checks[2].0) }
}

/// Quotient type of a free `T^2_{wz}` action, read off the orbit space of
/// the residual `T^2_{uv}` and cross-checked against `eps_2 eps_3 eps_4`.
pub fn classify_t2_quotient(p: &T2ActionParams) -> Result<ManifoldType> {
    let T2Freeness::Free { eps } = is_free_t2(p) else {
        return Err(BiquotientError::NotFree);
    };
    let diagram = induced_orbit_space(&TorusWeightMatrix::from_t2(p)?, &Subtorus::t2_wz())?;
    let kind = classify_dim4(&diagram.space)?;
    let product = eps.0 * eps.1 * eps.2;
    let consistent = match kind {
        ManifoldType::CP2SharpCP2 => product == -1,
        ManifoldType::S2xS2 | ManifoldType::CP2SharpMinusCP2 => product == 1,
        _ => false,
    };
    if !consistent {
        return Err(BiquotientError::EpsilonClassMismatch { product, kind });
    }
    Ok(kind)
}

/// Orbit space of the residual `T^2_{uv}` on `S3 x S3 // T^2_{wz}`.
pub fn t2_orbit_space(p: &T2ActionParams) -> Result<WeightedOrbitSpace> {
    Ok(induced_orbit_space(&TorusWeightMatrix::from_t2(p)?, &Subtorus::t2_wz())?.space)
}

/// Orbit space of `T^3_{uvw}` on `S3 x S3 // S1_z`.
pub fn dim5_orbit_space(p: &Dim5Params) -> Result<WeightedOrbitSpace> {
    Ok(induced_orbit_space(&TorusWeightMatrix::from_dim5(p)?, &Subtorus::z_circle())?.space)
}

/// A free `T^2` action on `S3 x S3` whose residual `T^2_{uv}` action realizes `target`.
///
/// The `S2xS2` and `CP2#-CP2` classes are brought to `(1,0),(0,1),(1,0),(k,1)`
/// and realized by `inffree(r, lambda)` with `2r + lambda = k`; `CP2#CP2` has
/// a single class, realized by `unifree`.
pub fn realize_dim4(target: &WeightedOrbitSpace) -> Result<T2ActionParams> {
    if target.rank() != 2 || target.len() != 4 {
        return Err(BiquotientError::NotRealizable(format!(
            "need rank 2 with 4 weights, got rank {} with {}",
            target.rank(),
            target.len()
        )));
    }
    let kind = classify_dim4(target)?;
    let params = match kind {
        ManifoldType::CP2SharpCP2 => T2ActionParams::unifree(),
        ManifoldType::S2xS2 | ManifoldType::CP2SharpMinusCP2 => {
            let k = shear_parameter(target)?;
            T2ActionParams::inffree(k.div_euclid(2), k.rem_euclid(2))
        }
        other => return Err(BiquotientError::NotRealizable(format!("{other} has no biquotient realization here"))),
    };
    if !are_equivalent(&t2_orbit_space(&params)?, target)? {
        return Err(BiquotientError::NotRealizable(format!("{params} does not reproduce {target}")));
    }
    Ok(params)
}

/// `k` with `target ~ (1,0),(0,1),(1,0),(k,1)`.
fn shear_parameter(target: &WeightedOrbitSpace) -> Result<i64> {
    let canon = canonicalize(target)?;
    for base in [canon.space.clone(), canon.space.reversed()] {
        for rot in 0..4 {
            let w = base.rotated(rot).slopes();
            let frame = unimodular_complete(&[w[0].clone(), w[1].clone()])?;
            let to_frame = crate::lattice::unimodular_inverse(&frame)?;
            let x3 = to_frame.left_apply(&w[2])?;
            let x4 = to_frame.left_apply(&w[3])?;
            if x3[1] == 0 && x4[1].abs() == 1 {
                return Ok(x4[0] * x4[1]);
            }
        }
    }
    Err(BiquotientError::NotRealizable(format!("{target} has no (k,1) normal form")))
}

/// Realizing parameters together with an equivalence certificate:
/// `arrange(target).transformed(&transform)` is the orbit space induced by `params`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim5Realization {
    pub params: Dim5Params,
    pub reversed: bool,
    pub rotation: usize,
    pub transform: IntMatrix,
}

impl Dim5Realization {
    pub fn arrange(&self, s: &WeightedOrbitSpace) -> WeightedOrbitSpace {
        let base = if self.reversed { s.reversed() } else { s.clone() };
        base.rotated(self.rotation)
    }
}

/// Reads off parameters for `target`. If some traversal already starts
/// `(1,0,0),(0,1,0)` the least such traversal is used as is; otherwise the
/// canonical form is used, so the result depends only on the class. The
/// result is not verified.
pub fn realize_dim5_certified(target: &WeightedOrbitSpace) -> Result<Dim5Realization> {
    if target.rank() != 3 || target.len() != 4 {
        return Err(BiquotientError::NotRealizable(format!(
            "need rank 3 with 4 weights, got rank {} with {}",
            target.rank(),
            target.len()
        )));
    }
    crate::orbit_space::ensure_legal(target)?;
    let in_position = |s: &WeightedOrbitSpace| {
        let w = s.weights();
        w[0].slope() == [1, 0, 0] && w[1].slope() == [0, 1, 0]
    };
    let mut best: Option<(WeightedOrbitSpace, bool, usize)> = None;
    for reversed in [false, true] {
        let base = if reversed { target.reversed() } else { target.clone() };
        for rotation in 0..4 {
            let cand = base.rotated(rotation);
            if in_position(&cand) && best.as_ref().is_none_or(|(b, _, _)| cand < *b) {
                best = Some((cand, reversed, rotation));
            }
        }
    }
    if let Some((arranged, reversed, rotation)) = best {
        let params = extract_dim5_params(&arranged)?;
        return Ok(Dim5Realization { params, reversed, rotation, transform: IntMatrix::identity(3) });
    }
    let c = canonicalize(target)?;
    let params = extract_dim5_params(&c.space)?;
    Ok(Dim5Realization { params, reversed: c.reversed, rotation: c.rotation, transform: c.transform })
}

/// The circle action whose residual `T^3_{uvw}` action realizes `target`.
pub fn realize_dim5(target: &WeightedOrbitSpace) -> Result<Dim5Params> {
    let r = realize_dim5_certified(target)?;
    let induced = dim5_orbit_space(&r.params)?;
    if induced == r.arrange(target).transformed(&r.transform)? || are_equivalent(&induced, target)? {
        Ok(r.params)
    } else {
        Err(BiquotientError::NotRealizable(format!("{} does not reproduce {target}", r.params)))
    }
}

/// Whether `bd +- ac +- ad +- bc = 0` for some choice of signs.
pub fn s1act_condition(p: &CircleActionParams) -> bool {
    let CircleActionParams { a, b, c, d } = *p;
    let signs = [1, -1];
    signs.iter().any(|&s1| signs.iter().any(|&s2| signs.iter().any(|&s3| b * d + s1 * a * c + s2 * a * d + s3 * b * c == 0)))
}

pub fn default_extension_bound(p: &CircleActionParams) -> i64 {
    4 * (p.a.abs() + p.b.abs() + p.c.abs() + p.d.abs()) + 4
}

/// Free circle `u -> (u^p, u^q, u)` in `T^3_{uvw}` for the shears `(k,l,m,n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtensionWitness {
    pub p: i64,
    pub q: i64,
    pub k: i64,
    pub l: i64,
    pub m: i64,
    pub n: i64,
    /// The resulting free `T^2` action.
    pub t2: T2ActionParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoExtensionReason {
    /// The necessary condition fails for all sign choices: a proof.
    NecessaryConditionFails,
    /// No witness within the search radius: inconclusive.
    SearchExhausted { bound: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extension {
    Witness(ExtensionWitness),
    NoExtension(NoExtensionReason),
}

/// `0, 1, -1, 2, -2, ...` up to `bound`.
fn centered(bound: i64) -> impl Iterator<Item = i64> {
    (0..=bound).flat_map(|i| if i == 0 { vec![0] } else { vec![i, -i] })
}

/// Solutions `v` of `coef * v + rest = +-1`, searching `|v| <= bound` when `coef = 0`.
fn unit_solutions(coef: i64, rest: i64, bound: i64) -> Vec<i64> {
    if coef == 0 {
        return if rest.abs() == 1 { centered(bound).collect() } else { Vec::new() };
    }
    [1, -1].iter().filter(|&&t| (t - rest) % coef == 0).map(|&t| (t - rest) / coef).collect()
}

/// Extends a free circle action to a free `T^2` action by a free circle in
/// the residual `T^3_{uvw}`, or reports why none was found.
///
/// Walks the Bezout family `(m, n) = (m_0 - cx, n_0 + ax)` for `|x| <= bound`,
/// solves `a Q + d n = +-1` and `c P - b m = +-1` for `Q = q + l`, `P = p + k`,
/// and checks `b Q - d P = +-1`.
pub fn extend_circle_to_t2(p: &CircleActionParams, bound: i64) -> Result<Extension> {
    if !is_free_circle(p)? {
        return Err(BiquotientError::NotFree);
    }
    if !s1act_condition(p) {
        return Ok(Extension::NoExtension(NoExtensionReason::NecessaryConditionFails));
    }
    let CircleActionParams { a, b, c, d } = *p;
    let (_, n0, m0) = gcd_ext(c, a);
    for x in centered(bound) {
        let (m, n) = (m0 - c * x, n0 + a * x);
        for big_q in unit_solutions(a, d * n, bound) {
            for big_p in unit_solutions(c, -b * m, bound) {
                if (b * big_q - d * big_p).abs() != 1 {
                    continue;
                }
                let t2 = T2ActionParams::new(a, b, c, d, n, big_p, m, big_q);
                if !is_free_t2(&t2).is_free() {
                    continue;
                }
                return Ok(Extension::Witness(ExtensionWitness { p: big_p, q: big_q, k: 0, l: 0, m, n, t2 }));
            }
        }
    }
    Ok(Extension::NoExtension(NoExtensionReason::SearchExhausted { bound }))
}

/// Total space of the principal circle bundle `S3 x S3 // S1_{p,q} -> S3 x S3 // T^2`.
pub fn circle_bundle_total_space(base: &T2ActionParams, p: i64, q: i64) -> Result<ManifoldType> {
    if gcd(p, q) != 1 {
        return Err(BiquotientError::SlopesNotCoprime(p, q));
    }
    if !is_free_t2(base).is_free() {
        return Err(BiquotientError::NotFree);
    }
    let circle = base.sub_circle(p, q);
    if !is_free_circle(&circle)? {
        return Err(BiquotientError::NotFree);
    }
    w2_class(&circle)
}
