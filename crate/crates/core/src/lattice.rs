//! Vectors, primitive vectors, lines (unit orbits of primitive vectors),
//! and the partial-frame / augmented-frame predicates in O^n for small n.

use crate::quadring::{FieldElement, RingDescriptor, RingElement, RingError};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum supported ambient rank.
pub const MAX_RANK: usize = 4;

/// Default unit window half-width for augmented-frame searches over real
/// quadratic rings.
pub const DEFAULT_UNIT_WINDOW: u32 = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("ring d = {0} is not norm-Euclidean; frame tests need Euclidean division")]
    RingNotEuclidean(i64),
    #[error("simplex has two associate lines")]
    DegenerateSimplex,
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A vector in O^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vector {
    pub coords: Vec<RingElement>,
}

impl Vector {
    pub fn new(coords: Vec<RingElement>) -> Self {
        Vector { coords }
    }

    /// Vector from (x, y) coordinate pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Vector { coords: pairs.iter().map(|&(x, y)| RingElement::new(x, y)).collect() }
    }

    /// The i-th standard basis vector of O^n.
    pub fn standard(n: usize, i: usize) -> Self {
        let mut coords = vec![RingElement::zero(); n];
        coords[i] = RingElement::one();
        Vector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Vector { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        Vector { coords: self.coords.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, ring: &RingDescriptor, s: &RingElement) -> Self {
        Vector { coords: self.coords.iter().map(|c| ring.mul(s, c)).collect() }
    }

    pub fn last(&self) -> &RingElement {
        self.coords.last().expect("vectors are nonempty")
    }
}

/// A line: the unit orbit of a primitive vector, held by a canonical
/// representative with a deterministic hashable key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    rep: Vector,
    key: String,
}

impl PartialOrd for Line {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Line {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl Line {
    pub fn rep(&self) -> &Vector {
        &self.rep
    }

    pub fn key(&self) -> &str {
        &self.key
    }
}

impl Serialize for Line {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Line", 2)?;
        st.serialize_field("coords", &self.rep.coords)?;
        st.serialize_field("key", &self.key)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Line {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            coords: Vec<RingElement>,
            key: String,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Line { rep: Vector::new(raw.coords), key: raw.key })
    }
}

fn hex_key(rep: &Vector) -> String {
    let plain: Vec<String> = rep.coords.iter().map(|c| format!("{},{}", c.x, c.y)).collect();
    let plain = plain.join(";");
    let mut out = String::with_capacity(plain.len() * 2);
    for b in plain.as_bytes() {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Content gcd of the coordinates (canonical associate), requiring a
/// norm-Euclidean ring.
pub fn content(ring: &RingDescriptor, v: &Vector) -> Result<RingElement, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let mut acc = RingElement::zero();
    for c in &v.coords {
        if c.is_zero() {
            continue;
        }
        acc = if acc.is_zero() { c.clone() } else { ring.gcd(&acc, c)? };
    }
    Ok(acc)
}

/// True iff the coordinate gcd is a unit; over a Euclidean domain this is
/// equivalent to the span being a direct summand.
pub fn is_primitive(ring: &RingDescriptor, v: &Vector) -> Result<bool, LatticeError> {
    if !ring.norm_euclidean {
        return Err(LatticeError::RingNotEuclidean(ring.d));
    }
    let g = content(ring, v)?;
    Ok(ring.is_unit(&g))
}

/// Canonical representative of the unit orbit of a primitive vector.
///
/// Finite unit groups: the coordinate tuple that is lexicographically least
/// among all unit multiples. d > 0: the first nonzero coordinate c is scaled
/// by powers of the fundamental unit into the embedding-ratio window
/// 1 <= |s1(c)/s2(c)| < eps^2 (an exact sign computation on trace and
/// delta-coordinate data), then the sign is fixed so s1(c) > 0. Two
/// representatives of the same line always map to the same vector.
pub fn canonical_line(ring: &RingDescriptor, v: &Vector) -> Result<Line, LatticeError> {
    if !is_primitive(ring, v)? {
        return Err(LatticeError::NotPrimitive);
    }
    let rep = if ring.units_finite {
        ring.torsion_units()
            .iter()
            .map(|u| v.scale(ring, u))
            .min_by(|a, b| coord_tuple(a).cmp(&coord_tuple(b)))
            .expect("unit list is nonempty")
    } else {
        canonical_rep_real(ring, v)?
    };
    let key = hex_key(&rep);
    Ok(Line { rep, key })
}

fn coord_tuple(v: &Vector) -> Vec<(BigInt, BigInt)> {
    v.coords.iter().map(|c| (c.x.clone(), c.y.clone())).collect()
}

/// Inverse of a unit: up to sign its Galois conjugate.
pub(crate) fn unit_inverse(ring: &RingDescriptor, u: &RingElement) -> RingElement {
    let c = ring.conj(u);
    if ring.mul(u, &c) == RingElement::one() {
        c
    } else {
        c.neg()
    }
}

/// Window reduction for d > 0. The absolute embedding ratio
/// |s1(c)| / |s2(c)| is multiplied by eps^2 whenever the vector is scaled by
/// the fundamental unit eps, so a unique power lands it in [1, eps^2);
/// the ratio comparison against 1 reduces to the sign of y * Tr(c).
fn canonical_rep_real(ring: &RingDescriptor, v: &Vector) -> Result<Vector, LatticeError> {
    let units = ring.unit_group(crate::quadring::DEFAULT_UNIT_SEARCH_BOUND)?;
    let eps = units.fundamental.expect("d > 0 has a fundamental unit");
    let eps_inv = unit_inverse(ring, &eps);
    let ratio_ge_one = |w: &Vector| -> bool {
        let c = w.coords.iter().find(|c| !c.is_zero()).expect("primitive vector is nonzero");
        !(c.y.clone() * ring.trace(c)).is_negative()
    };
    let mut w = v.clone();
    while !ratio_ge_one(&w) {
        w = w.scale(ring, &eps);
    }
    while ratio_ge_one(&w.scale(ring, &eps_inv)) {
        w = w.scale(ring, &eps_inv);
    }
    let first = w.coords.iter().find(|c| !c.is_zero()).expect("nonzero");
    if ring.real_embedding_sign(first) < 0 {
        w = w.neg();
    }
    Ok(w)
}

/// F = |N(last coordinate)|; constant on unit orbits by norm
/// multiplicativity.
pub fn f_value(ring: &RingDescriptor, v: &Vector) -> BigInt {
    ring.norm_abs(v.last())
}

pub fn f_last(v: &Vector) -> RingElement {
    v.last().clone()
}

/// 2x2 determinant of the matrix with columns v, w.
pub fn det2(ring: &RingDescriptor, v: &Vector, w: &Vector) -> RingElement {
    debug_assert!(v.dim() == 2 && w.dim() == 2);
    ring.mul(&v.coords[0], &w.coords[1]).sub(&ring.mul(&v.coords[1], &w.coords[0]))
}

/// Tests whether the given primitive vectors span a partial frame, i.e.
/// extend to a direct-sum decomposition of O^n. Over a norm-Euclidean ring
/// this holds exactly when Euclidean elimination of the coordinate matrix
/// produces unit pivots only.
#[allow(clippy::needless_range_loop)] // row ops touch two rows at once
pub fn is_partial_frame(ring: &RingDescriptor, vs: &[Vector]) -> Result<bool, LatticeError> {
    if vs.is_empty() {
        return Ok(true);
    }
    let n = vs[0].dim();
    if n > MAX_RANK {
        return Err(LatticeError::RankTooLarge(n));
    }
    for v in vs {
        if !is_primitive(ring, v)? {
            return Err(LatticeError::NotPrimitive);
        }
    }
    if vs.len() > n {
        return Ok(false);
    }
    // columns = vectors, rows = coordinates
    let mut m: Vec<Vec<RingElement>> =
        (0..n).map(|i| vs.iter().map(|v| v.coords[i].clone()).collect()).collect();
    let k = vs.len();
    for t in 0..k {
        loop {
            let mut pivot: Option<(usize, usize, BigInt)> = None;
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, entry) in row.iter().enumerate().skip(t) {
                    if entry.is_zero() {
                        continue;
                    }
                    let nn = ring.norm_abs(entry);
                    match &pivot {
                        Some((_, _, best)) if *best <= nn => {}
                        _ => pivot = Some((i, j, nn)),
                    }
                }
            }
            let Some((pi, pj, _)) = pivot else {
                // remaining block vanishes: rank < k
                return Ok(false);
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            let pivot_entry = m[t][t].clone();
            for i in (t + 1)..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, _) = ring.euclidean_divide(&m[i][t], &pivot_entry)?;
                for j in t..k {
                    let sub = ring.mul(&q, &m[t][j]);
                    m[i][j] = m[i][j].sub(&sub);
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            let pivot_entry = m[t][t].clone();
            for j in (t + 1)..k {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, _) = ring.euclidean_divide(&m[t][j], &pivot_entry)?;
                for i in t..n {
                    let sub = ring.mul(&q, &m[i][t]);
                    m[i][j] = m[i][j].sub(&sub);
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            let col_clean = ((t + 1)..n).all(|i| m[i][t].is_zero());
            if clean && col_clean {
                break;
            }
        }
        if !ring.is_unit(&m[t][t]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// If `w` spans the same line as `v`, returns the unit u with w = u * v.
pub fn unit_multiple_of(ring: &RingDescriptor, w: &Vector, v: &Vector) -> Option<RingElement> {
    let idx = v.coords.iter().position(|c| !c.is_zero())?;
    if w.coords[idx].is_zero() {
        return None;
    }
    // u = w_idx / v_idx must be integral and a unit
    let denom_norm = ring.norm(&v.coords[idx]);
    let prod = ring.mul(&w.coords[idx], &ring.conj(&v.coords[idx]));
    if !(&prod.x % &denom_norm).is_zero() || !(&prod.y % &denom_norm).is_zero() {
        return None;
    }
    let u = RingElement { x: &prod.x / &denom_norm, y: &prod.y / &denom_norm };
    if !ring.is_unit(&u) {
        return None;
    }
    if (0..v.dim()).all(|i| ring.mul(&u, &v.coords[i]) == w.coords[i]) {
        Some(u)
    } else {
        None
    }
}

/// Kind of simplex in an (augmented) frame complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplexKind {
    Standard,
    Additive,
}

/// Exact witness for an additive simplex: u0 * rep(additive) equals
/// u1 * rep(left) + u2 * rep(right) on the canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveWitness {
    pub additive: usize,
    pub left: usize,
    pub right: usize,
    pub u0: RingElement,
    pub u1: RingElement,
    pub u2: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSimplex {
    pub lines: Vec<Line>,
    pub kind: SimplexKind,
    pub witness: Option<AdditiveWitness>,
    /// True when the unit-pair enumeration was truncated to a finite window
    /// (d > 0), so a negative answer may be incomplete.
    pub windowed: bool,
}

impl FrameSimplex {
    /// Re-verifies the stored additive witness against the canonical reps.
    pub fn witness_verifies(&self, ring: &RingDescriptor) -> bool {
        match (&self.kind, &self.witness) {
            (SimplexKind::Standard, None) => true,
            (SimplexKind::Additive, Some(w)) => {
                let lhs = self.lines[w.additive].rep().scale(ring, &w.u0);
                let rhs = self.lines[w.left]
                    .rep()
                    .scale(ring, &w.u1)
                    .add(&self.lines[w.right].rep().scale(ring, &w.u2));
                ring.is_unit(&w.u0) && ring.is_unit(&w.u1) && ring.is_unit(&w.u2) && lhs == rhs
            }
            _ => false,
        }
    }
}

/// The unit set enumerated in augmented-frame searches: the whole (finite)
/// unit group for d < 0, and {+-eps^k : |k| <= window} for d > 0.
pub fn unit_window(ring: &RingDescriptor, window: u32) -> Result<Vec<RingElement>, LatticeError> {
    if ring.units_finite {
        return Ok(ring.torsion_units());
    }
    let ug = ring.unit_group(crate::quadring::DEFAULT_UNIT_SEARCH_BOUND)?;
    let eps = ug.fundamental.expect("d > 0 has a fundamental unit");
    let eps_inv = unit_inverse(ring, &eps);
    let mut units = vec![RingElement::one()];
    let mut pos = RingElement::one();
    let mut neg = RingElement::one();
    for _ in 0..window {
        pos = ring.mul(&pos, &eps);
        neg = ring.mul(&neg, &eps_inv);
        units.push(pos.clone());
        units.push(neg.clone());
    }
    let mut out = Vec::with_capacity(units.len() * 2);
    for u in units {
        out.push(u.clone());
        out.push(u.neg());
    }
    Ok(out)
}

/// Decides whether the given lines form a partial frame or an augmented
/// partial frame; `None` when neither.
///
/// Augmented means: one member is a two-term unit combination of two others,
/// and the rest form a partial frame. The exact witness (with the unit
/// scaling u0 matching the canonical representative) is returned for
/// re-verification.
pub fn is_augmented_frame(
    ring: &RingDescriptor,
    vs: &[Vector],
    window: u32,
) -> Result<Option<FrameSimplex>, LatticeError> {
    let lines: Vec<Line> = vs.iter().map(|v| canonical_line(ring, v)).collect::<Result<_, _>>()?;
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            if lines[i].key() == lines[j].key() {
                return Err(LatticeError::DegenerateSimplex);
            }
        }
    }
    let windowed = !ring.units_finite;
    if is_partial_frame(ring, vs)? {
        return Ok(Some(FrameSimplex { lines, kind: SimplexKind::Standard, witness: None, windowed }));
    }
    if vs.len() < 3 {
        return Ok(None);
    }
    let units = unit_window(ring, window)?;
    for add_idx in 0..lines.len() {
        let rest: Vec<Vector> = (0..lines.len())
            .filter(|&t| t != add_idx)
            .map(|t| lines[t].rep().clone())
            .collect();
        if !is_partial_frame(ring, &rest)? {
            continue;
        }
        let others: Vec<usize> = (0..lines.len()).filter(|&t| t != add_idx).collect();
        for (a, &left) in others.iter().enumerate() {
            for &right in others.iter().skip(a + 1) {
                for u1 in &units {
                    for u2 in &units {
                        let combo = lines[left]
                            .rep()
                            .scale(ring, u1)
                            .add(&lines[right].rep().scale(ring, u2));
                        if combo.is_zero() {
                            continue;
                        }
                        if let Some(u0) = unit_multiple_of(ring, &combo, lines[add_idx].rep()) {
                            let witness = AdditiveWitness {
                                additive: add_idx,
                                left,
                                right,
                                u0,
                                u1: u1.clone(),
                                u2: u2.clone(),
                            };
                            return Ok(Some(FrameSimplex {
                                lines,
                                kind: SimplexKind::Additive,
                                witness: Some(witness),
                                windowed,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// True iff the line's representative lies in the K-span of the given
/// vectors (solved by exact Gaussian elimination over the fraction field).
pub fn line_in_span(ring: &RingDescriptor, v: &Line, basis: &[Vector]) -> bool {
    vector_in_span(ring, v.rep(), basis)
}

pub fn vector_in_span(ring: &RingDescriptor, v: &Vector, basis: &[Vector]) -> bool {
    if basis.is_empty() {
        return v.is_zero();
    }
    let cols: Vec<Vec<FieldElement>> = basis
        .iter()
        .map(|b| b.coords.iter().map(FieldElement::from_ring).collect())
        .collect();
    let rank_basis = field_rank(ring, cols.clone());
    let mut extended = cols;
    extended.push(v.coords.iter().map(FieldElement::from_ring).collect());
    rank_basis == field_rank(ring, extended)
}

/// Column rank over the fraction field.
#[allow(clippy::needless_range_loop)] // row ops touch two rows at once
fn field_rank(ring: &RingDescriptor, cols: Vec<Vec<FieldElement>>) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let n = cols[0].len();
    let k = cols.len();
    // row-major matrix, rows are coordinates
    let mut m: Vec<Vec<FieldElement>> =
        (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let mut rank = 0;
    for col in 0..k {
        let Some(pivot_row) = (rank..n).find(|&r| !is_field_zero(&m[r][col])) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let inv = ring.finv(&m[rank][col].clone()).expect("pivot is nonzero");
        for c in col..k {
            m[rank][c] = ring.fmul(&m[rank][c], &inv);
        }
        for r in 0..n {
            if r != rank && !is_field_zero(&m[r][col]) {
                let factor = m[r][col].clone();
                for c in col..k {
                    let sub = ring.fmul(&factor, &m[rank][c]);
                    m[r][c] = m[r][c].sub(&sub);
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

fn is_field_zero(f: &FieldElement) -> bool {
    f.x.is_zero() && f.y.is_zero()
}
