//! Detour search and verification, Bykovskii symbol algebra, the apartment
//! map at rank 2, and end-to-end non-injectivity certificates.
//!
//! Certificates are self-verifying JSON: every arithmetic claim
//! (determinants, unit-span classes, apartment images) is recomputed by the
//! checker from the serialized data, never trusted.

use crate::lattice::{self, canonical_line, det2, Line, Vector};
use crate::quadring::{
    generated_by_units, RingDescriptor, RingElement, RingError, DEFAULT_UNIT_SEARCH_BOUND,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("no path found within coordinate bound {0} (bound exhausted, not impossibility)")]
    PathNotFound(u32),
    #[error("d = {0} is additively generated by units; no detour is expected")]
    NoDetourExpected(i64),
    #[error("symbol vectors are not a basis (determinant is not a unit)")]
    NotABasis,
    #[error("slot {0} out of range for rank {1}")]
    SlotOutOfRange(usize, usize),
    #[error("operation requires rank-2 symbols")]
    RankMismatch,
    #[error("loop passes through the base line {0} times; need exactly one passage")]
    MultiplePassages(usize),
    #[error("not a loop: {0}")]
    NotALoop(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error("bad certificate: {0}")]
    BadCertificate(String),
}

// -- unit-span classes -------------------------------------------------------

/// The residue of a ring element modulo the additive span of all units.
///
/// span_modulus g = 1: the span is the whole ring, every class trivial.
/// g = 0: the span is Z, the class is the full delta-coordinate.
/// g > 1: the span is Z + Z g delta, the class is the delta-coordinate
/// modulo g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitSpanClass {
    Trivial,
    Integer {
        #[serde(with = "crate::digits")]
        value: BigInt,
    },
    Residue {
        #[serde(with = "crate::digits")]
        value: BigInt,
        #[serde(with = "crate::digits")]
        modulus: BigInt,
    },
}

pub fn span_modulus(ring: &RingDescriptor) -> Result<BigInt, RingError> {
    Ok(ring.unit_group(DEFAULT_UNIT_SEARCH_BOUND)?.span_modulus)
}

pub fn unit_span_class(ring: &RingDescriptor, x: &RingElement) -> Result<UnitSpanClass, CertifyError> {
    if !ring.norm_euclidean {
        return Err(CertifyError::Ring(RingError::NotEuclidean(ring.d)));
    }
    let g = span_modulus(ring)?;
    Ok(if g.is_one() {
        UnitSpanClass::Trivial
    } else if g.is_zero() {
        UnitSpanClass::Integer { value: x.y.clone() }
    } else {
        UnitSpanClass::Residue { value: x.y.mod_floor(&g), modulus: g }
    })
}

// -- modular symbols and the Bykovskii relations ------------------------------

/// An ordered basis of O^n with a bookkeeping sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularSymbol {
    pub vectors: Vec<Vector>,
    pub sign: i8,
}

impl ModularSymbol {
    pub fn new(vectors: Vec<Vector>) -> Self {
        ModularSymbol { vectors, sign: 1 }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn determinant(&self, ring: &RingDescriptor) -> Result<RingElement, CertifyError> {
        let n = self.rank();
        if n == 0 || self.vectors.iter().any(|v| v.dim() != n) || n > 3 {
            return Err(CertifyError::RankMismatch);
        }
        let a = |i: usize, j: usize| &self.vectors[j].coords[i];
        Ok(match n {
            1 => a(0, 0).clone(),
            2 => ring.mul(a(0, 0), a(1, 1)).sub(&ring.mul(a(1, 0), a(0, 1))),
            _ => {
                let mut det = RingElement::zero();
                for (j, sign_pos) in [(0usize, true), (1, false), (2, true)] {
                    let (c1, c2) = match j {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let minor =
                        ring.mul(a(1, c1), a(2, c2)).sub(&ring.mul(a(2, c1), a(1, c2)));
                    let term = ring.mul(a(0, j), &minor);
                    det = if sign_pos { det.add(&term) } else { det.sub(&term) };
                }
                det
            }
        })
    }

    /// Canonical form: vectors replaced by canonical line representatives
    /// (free, by the unit-scaling relation), sorted by key with the
    /// permutation parity folded into the sign. Idempotent.
    pub fn normalize(&self, ring: &RingDescriptor) -> Result<ModularSymbol, CertifyError> {
        let det = self.determinant(ring)?;
        if !ring.is_unit(&det) {
            return Err(CertifyError::NotABasis);
        }
        let mut keyed: Vec<(String, Vector)> = self
            .vectors
            .iter()
            .map(|v| {
                let line = canonical_line(ring, v)?;
                Ok((line.key().to_string(), line.rep().clone()))
            })
            .collect::<Result<_, CertifyError>>()?;
        // insertion sort, counting transpositions for the parity
        let mut sign = self.sign;
        for i in 1..keyed.len() {
            let mut j = i;
            while j > 0 && keyed[j - 1].0 > keyed[j].0 {
                keyed.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        Ok(ModularSymbol { vectors: keyed.into_iter().map(|(_, v)| v).collect(), sign })
    }
}

/// An integer combination of modular symbols in normalized form: canonical
/// representatives, sorted vector lists, signs folded into coefficients,
/// like terms merged, zero terms dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolChain {
    pub terms: Vec<ChainTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    #[serde(with = "crate::digits")]
    pub coeff: BigInt,
    pub vectors: Vec<Vector>,
}

impl SymbolChain {
    pub fn from_symbols(symbols: Vec<(BigInt, ModularSymbol)>) -> Self {
        SymbolChain {
            terms: symbols
                .into_iter()
                .map(|(coeff, s)| {
                    let folded = if s.sign >= 0 { coeff } else { -coeff };
                    ChainTerm { coeff: folded, vectors: s.vectors }
                })
                .collect(),
        }
    }

    pub fn normalize(&self, ring: &RingDescriptor) -> Result<SymbolChain, CertifyError> {
        let mut merged: BTreeMap<Vec<Vector>, BigInt> = BTreeMap::new();
        for term in &self.terms {
            let sym = ModularSymbol::new(term.vectors.clone()).normalize(ring)?;
            let signed = if sym.sign >= 0 { term.coeff.clone() } else { -term.coeff.clone() };
            *merged.entry(sym.vectors).or_insert_with(BigInt::zero) += signed;
        }
        Ok(SymbolChain {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(vectors, coeff)| ChainTerm { coeff, vectors })
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }

    pub fn negated(&self) -> SymbolChain {
        SymbolChain {
            terms: self
                .terms
                .iter()
                .map(|t| ChainTerm { coeff: -t.coeff.clone(), vectors: t.vectors.clone() })
                .collect(),
        }
    }
}

/// Rewrites slot `i` of the symbol by the three-term additive relation
/// against slot `j`: the result is the two-term chain equal to the symbol
/// modulo the relation, with w = v_i + v_j:
/// [.., v_i, .., v_j, ..] = [.., w, .., v_j, ..] - [.., w, .., v_i, ..].
pub fn apply_relation3(
    s: &ModularSymbol,
    slot_i: usize,
    slot_j: usize,
) -> Result<SymbolChain, CertifyError> {
    let n = s.rank();
    if slot_i >= n || slot_j >= n || slot_i == slot_j {
        return Err(CertifyError::SlotOutOfRange(slot_i.max(slot_j), n));
    }
    if !(2..=3).contains(&n) {
        return Err(CertifyError::RankMismatch);
    }
    let w = s.vectors[slot_i].add(&s.vectors[slot_j]);
    let mut first = s.clone();
    first.vectors[slot_i] = w.clone();
    let mut second = s.clone();
    second.vectors[slot_i] = w;
    second.vectors[slot_j] = s.vectors[slot_i].clone();
    Ok(SymbolChain::from_symbols(vec![(BigInt::one(), first), (BigInt::from(-1), second)]))
}

/// A finite formal sum of lines of K^2; the ambient group of the rank-2
/// Steinberg module (the augmentation kernel on lines).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalLineSum {
    pub coeffs: BTreeMap<Line, BigInt>,
}

impl FormalLineSum {
    pub fn add(&mut self, line: Line, c: BigInt) {
        let entry = self.coeffs.entry(line).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            let dead: Vec<Line> =
                self.coeffs.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in dead {
                self.coeffs.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Sum of coefficients; zero exactly when the sum lies in the
    /// augmentation kernel.
    pub fn augmentation(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn to_terms(&self) -> Vec<ImageTerm> {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(line, coeff)| ImageTerm { coeff: coeff.clone(), line: line.clone() })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageTerm {
    #[serde(with = "crate::digits")]
    pub coeff: BigInt,
    pub line: Line,
}

/// The apartment map at rank 2: [[v1, v2]] goes to <line(v1)> - <line(v2)>,
/// extended linearly. Images always lie in the augmentation kernel.
pub fn apartment_image_2(
    ring: &RingDescriptor,
    chain: &SymbolChain,
) -> Result<FormalLineSum, CertifyError> {
    let mut image = FormalLineSum::default();
    for term in &chain.terms {
        if term.vectors.len() != 2 {
            return Err(CertifyError::RankMismatch);
        }
        let sym = ModularSymbol::new(term.vectors.clone());
        let det = sym.determinant(ring)?;
        if !ring.is_unit(&det) {
            return Err(CertifyError::NotABasis);
        }
        let l1 = canonical_line(ring, &term.vectors[0])?;
        let l2 = canonical_line(ring, &term.vectors[1])?;
        image.add(l1, term.coeff.clone());
        image.add(l2, -term.coeff.clone());
    }
    Ok(image)
}

// -- Farey graph paths over Z -------------------------------------------------

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), if a >= 0 { 1 } else { -1 }, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn farey_normalize(p: i64, q: i64) -> (i64, i64) {
    if q < 0 || (q == 0 && p < 0) {
        (-p, -q)
    } else {
        (p, q)
    }
}

fn farey_primitive(p: i64, q: i64) -> bool {
    !(p == 0 && q == 0) && egcd(p, q).0 == 1
}

/// Neighbors of (p, q) in the Farey graph within the coordinate bound:
/// normalized primitive pairs (p', q') with p q' - q p' = +-1, in sorted
/// order.
fn farey_neighbors(p: i64, q: i64, bound: i64) -> Vec<(i64, i64)> {
    // particular solution of p*y - q*x = 1; general solution adds t*(p, q)
    let (g, a, b) = egcd(p, q);
    debug_assert_eq!(g, 1);
    let (x0, y0) = (-b, a);
    let mut out: Vec<(i64, i64)> = Vec::new();
    let t_range = |base: i64, step: i64| -> (i64, i64) {
        // t with |base + t*step| <= bound
        if step == 0 {
            if base.abs() <= bound {
                (i64::MIN / 2, i64::MAX / 2)
            } else {
                (1, 0)
            }
        } else {
            let lo = (-bound - base) as f64 / step as f64;
            let hi = (bound - base) as f64 / step as f64;
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            (lo.ceil() as i64, hi.floor() as i64)
        }
    };
    let (lo1, hi1) = t_range(x0, p);
    let (lo2, hi2) = t_range(y0, q);
    let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
    for t in lo..=hi {
        let cand = farey_normalize(x0 + t * p, y0 + t * q);
        if cand.0.abs() <= bound && cand.1.abs() <= bound {
            out.push(cand);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// BFS path in the Farey graph on primitive pairs up to sign, avoiding one
/// vertex, with the truncation bound doubling from 8 up to `max_bound`.
/// Consecutive determinants of the result are +-1; the avoided line never
/// appears. Equal endpoints yield the empty path.
pub fn path_b2z(
    from: (i64, i64),
    to: (i64, i64),
    avoid: (i64, i64),
    max_bound: u32,
) -> Result<Vec<(i64, i64)>, CertifyError> {
    for v in [from, to, avoid] {
        if !farey_primitive(v.0, v.1) {
            return Err(CertifyError::MalformedPath(format!("{v:?} is not primitive")));
        }
    }
    let from = farey_normalize(from.0, from.1);
    let to = farey_normalize(to.0, to.1);
    let avoid = farey_normalize(avoid.0, avoid.1);
    if from == avoid || to == avoid {
        return Err(CertifyError::MalformedPath("endpoint equals avoided vertex".into()));
    }
    if from == to {
        return Ok(Vec::new());
    }
    let needed = from.0.abs().max(from.1.abs()).max(to.0.abs()).max(to.1.abs());
    let mut bound = 8i64;
    loop {
        if bound >= needed {
            if let Some(path) = farey_bfs(from, to, avoid, bound) {
                for w in path.windows(2) {
                    let det = w[0].0 * w[1].1 - w[0].1 * w[1].0;
                    assert!(det.abs() == 1, "BFS returned a non-edge");
                }
                return Ok(path);
            }
        }
        if bound as u64 >= max_bound as u64 {
            return Err(CertifyError::PathNotFound(max_bound));
        }
        bound *= 2;
    }
}

fn farey_bfs(
    from: (i64, i64),
    to: (i64, i64),
    avoid: (i64, i64),
    bound: i64,
) -> Option<Vec<(i64, i64)>> {
    let mut parent: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(from, from);
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![v];
            let mut cur = v;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in farey_neighbors(v.0, v.1, bound) {
            if w == avoid || parent.contains_key(&w) {
                continue;
            }
            parent.insert(w, v);
            queue.push_back(w);
        }
    }
    None
}

// -- detour certificates -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetourChecks {
    pub edges_unit_determinant: bool,
    pub avoids_base_line: bool,
    pub endpoints_match: bool,
    pub class_separation: bool,
    pub class_r1: UnitSpanClass,
    pub class_r2: UnitSpanClass,
}

/// A certified path in B_2(O) from span(r1, 1) to span(r2, 1) avoiding
/// span(1, 0), with r1 - r2 not a sum of units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetourCertificate {
    #[serde(rename = "type")]
    pub cert_type: String,
    pub ring: String,
    pub r1: RingElement,
    pub r2: RingElement,
    pub path: Vec<Line>,
    pub checks: DetourChecks,
    pub valid: bool,
}

/// Evaluates the four detour checks on the given path. The result records
/// each check; `valid` is their conjunction.
pub fn detour_verify(
    ring: &RingDescriptor,
    path: &[Vector],
    r1: &RingElement,
    r2: &RingElement,
) -> Result<DetourCertificate, CertifyError> {
    if path.is_empty() {
        return Err(CertifyError::MalformedPath("empty path".into()));
    }
    let lines: Vec<Line> = path
        .iter()
        .map(|v| {
            canonical_line(ring, v)
                .map_err(|e| CertifyError::MalformedPath(format!("vertex {v:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    for w in lines.windows(2) {
        if w[0].key() == w[1].key() {
            return Err(CertifyError::MalformedPath("adjacent duplicate vertices".into()));
        }
    }
    let edges_unit_determinant = lines
        .windows(2)
        .all(|w| ring.is_unit(&det2(ring, w[0].rep(), w[1].rep())));
    let e1 = canonical_line(ring, &Vector::standard(2, 0))?;
    let avoids_base_line = lines.iter().all(|l| l.key() != e1.key());
    let want_first = canonical_line(
        ring,
        &Vector::new(vec![r1.clone(), RingElement::one()]),
    )?;
    let want_last = canonical_line(
        ring,
        &Vector::new(vec![r2.clone(), RingElement::one()]),
    )?;
    let endpoints_match = lines.first().map(|l| l.key()) == Some(want_first.key())
        && lines.last().map(|l| l.key()) == Some(want_last.key());
    let class_r1 = unit_span_class(ring, r1)?;
    let class_r2 = unit_span_class(ring, r2)?;
    let class_separation = class_r1 != class_r2;
    let valid = edges_unit_determinant && avoids_base_line && endpoints_match && class_separation;
    Ok(DetourCertificate {
        cert_type: "detour".into(),
        ring: ring.spec_string(),
        r1: r1.clone(),
        r2: r2.clone(),
        path: lines,
        checks: DetourChecks {
            edges_unit_determinant,
            avoids_base_line,
            endpoints_match,
            class_separation,
            class_r1,
            class_r2,
        },
        valid,
    })
}

/// A concrete detour path before verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetourPath {
    pub path: Vec<Vector>,
    pub r1: RingElement,
    pub r2: RingElement,
}

/// Built-in imaginary detours, exactly the published vertex data for
/// d = -2, -7, -11.
pub fn builtin_detour(d: i64) -> Option<DetourPath> {
    let delta = RingElement::delta();
    let path = match d {
        -2 => vec![
            Vector::from_pairs(&[(0, 1), (1, 0)]),
            Vector::from_pairs(&[(1, 0), (0, -1)]),
            Vector::from_pairs(&[(0, 0), (1, 0)]),
        ],
        -7 => vec![
            Vector::from_pairs(&[(0, 1), (1, 0)]),
            Vector::from_pairs(&[(3, -1), (0, -1)]),
            Vector::from_pairs(&[(-1, 2), (1, 0)]),
        ],
        -11 => vec![
            Vector::from_pairs(&[(0, 1), (1, 0)]),
            Vector::from_pairs(&[(2, 0), (1, -1)]),
            Vector::from_pairs(&[(0, 1), (2, 0)]),
            Vector::from_pairs(&[(1, 0), (1, -1)]),
            Vector::from_pairs(&[(0, 0), (1, 0)]),
        ],
        _ => return None,
    };
    let r2 = match d {
        -7 => RingElement::new(-1, 2),
        _ => RingElement::zero(),
    };
    Some(DetourPath { path, r1: delta, r2 })
}

/// Constructs a detour for a norm-Euclidean ring that is not additively
/// generated by units.
///
/// Imaginary rings use the built-in paths. Real rings start with the edge
/// from span(delta, 1) to span(a, -b) given by a fundamental unit
/// eps = a + b delta; when (+-1 - a)/b is integral the path closes in one
/// more step at span(x, 1), otherwise it continues through the rational
/// Farey graph to span(0, 1).
pub fn detour_construct(ring: &RingDescriptor) -> Result<DetourPath, CertifyError> {
    if !ring.norm_euclidean {
        return Err(CertifyError::Ring(RingError::NotEuclidean(ring.d)));
    }
    if generated_by_units(ring.d) {
        return Err(CertifyError::NoDetourExpected(ring.d));
    }
    if ring.d < 0 {
        return Ok(builtin_detour(ring.d).expect("non-unit-generated imaginary Euclidean d"));
    }
    let eps = ring
        .unit_group(DEFAULT_UNIT_SEARCH_BOUND)?
        .fundamental
        .expect("d > 0 has a fundamental unit");
    let (a, b) = (eps.x.clone(), eps.y.clone());
    let start = Vector::new(vec![RingElement::delta(), RingElement::one()]);
    let bridge = Vector::new(vec![
        RingElement { x: a.clone(), y: BigInt::zero() },
        RingElement { x: -b.clone(), y: BigInt::zero() },
    ]);
    // short completion: span(x, 1) with a + b x = +-1
    for s in [1i64, -1] {
        let num = BigInt::from(s) - &a;
        if (&num % &b).is_zero() {
            let x = num / &b;
            let end = Vector::new(vec![
                RingElement { x: x.clone(), y: BigInt::zero() },
                RingElement::one(),
            ]);
            return Ok(DetourPath {
                path: vec![start, bridge, end],
                r1: RingElement::delta(),
                r2: RingElement { x, y: BigInt::zero() },
            });
        }
    }
    // general route: Farey path from (a, -b) to (0, 1) avoiding (1, 0)
    let a_small = i64::try_from(&a).map_err(|_| CertifyError::PathNotFound(1024))?;
    let b_small = i64::try_from(&b).map_err(|_| CertifyError::PathNotFound(1024))?;
    let zpath = path_b2z((a_small, -b_small), (0, 1), (1, 0), 1024)?;
    let mut path = vec![start];
    path.extend(zpath.iter().map(|&(p, q)| Vector::from_pairs(&[(p, 0), (q, 0)])));
    Ok(DetourPath { path, r1: RingElement::delta(), r2: RingElement::zero() })
}

// -- loop certificates ----------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopChecks {
    pub edges_unit_determinant: bool,
    pub single_base_passage: bool,
    pub class_left: UnitSpanClass,
    pub class_right: UnitSpanClass,
    pub classes_differ: bool,
}

/// A cycle in truncated BA_2(O) through span(1, 0) exactly once whose two
/// neighbor classes differ, certifying a nonzero class in H_1 of the full
/// complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCertificate {
    #[serde(rename = "type")]
    pub cert_type: String,
    pub ring: String,
    #[serde(rename = "loop")]
    pub loop_lines: Vec<Line>,
    pub checks: LoopChecks,
    pub valid: bool,
}

/// Verifies a loop given as a cyclic vertex list (first vertex = the base
/// line span(1, 0); the closing edge is implicit).
pub fn loop_nontrivial_certificate(
    ring: &RingDescriptor,
    loop_vertices: &[Vector],
) -> Result<LoopCertificate, CertifyError> {
    if loop_vertices.len() < 3 {
        return Err(CertifyError::NotALoop("need at least three vertices".into()));
    }
    let lines: Vec<Line> = loop_vertices
        .iter()
        .map(|v| {
            canonical_line(ring, v)
                .map_err(|e| CertifyError::NotALoop(format!("vertex {v:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let e1 = canonical_line(ring, &Vector::standard(2, 0))?;
    let passages = lines.iter().filter(|l| l.key() == e1.key()).count();
    if passages != 1 {
        return Err(CertifyError::MultiplePassages(passages));
    }
    let base = lines.iter().position(|l| l.key() == e1.key()).expect("one passage");
    let rotated: Vec<Line> =
        lines[base..].iter().chain(lines[..base].iter()).cloned().collect();
    for w in rotated.windows(2) {
        if w[0].key() == w[1].key() {
            return Err(CertifyError::NotALoop("adjacent duplicate vertices".into()));
        }
    }
    let mut edges_ok = true;
    for i in 0..rotated.len() {
        let a = &rotated[i];
        let b = &rotated[(i + 1) % rotated.len()];
        if !ring.is_unit(&det2(ring, a.rep(), b.rep())) {
            edges_ok = false;
        }
    }
    let left = neighbor_first_coordinate(ring, &rotated[1])?;
    let right = neighbor_first_coordinate(ring, rotated.last().expect("len >= 3"))?;
    let class_left = unit_span_class(ring, &left)?;
    let class_right = unit_span_class(ring, &right)?;
    let classes_differ = class_left != class_right;
    let valid = edges_ok && classes_differ;
    Ok(LoopCertificate {
        cert_type: "loop".into(),
        ring: ring.spec_string(),
        loop_lines: rotated,
        checks: LoopChecks {
            edges_unit_determinant: edges_ok,
            single_base_passage: true,
            class_left,
            class_right,
            classes_differ,
        },
        valid,
    })
}

/// A neighbor of span(1, 0) has a unit second coordinate; rescaling the
/// representative to (x, 1) gives the well-defined first coordinate x.
fn neighbor_first_coordinate(
    ring: &RingDescriptor,
    line: &Line,
) -> Result<RingElement, CertifyError> {
    let rep = line.rep();
    if rep.dim() != 2 {
        return Err(CertifyError::RankMismatch);
    }
    let second = &rep.coords[1];
    if !ring.is_unit(second) {
        return Err(CertifyError::NotALoop(
            "a base-line neighbor must have unit second coordinate".into(),
        ));
    }
    let inv = lattice::unit_inverse(ring, second);
    Ok(ring.mul(&rep.coords[0], &inv))
}

// -- non-injectivity bundles -------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoninjChecks {
    pub detour_valid: bool,
    pub loop_valid: bool,
    pub apartment_image_zero: bool,
    pub class_separation: bool,
}

/// A kernel-element certificate: a detour, the loop it closes through the
/// base line, the symbol chain of the loop's edges, and its (zero)
/// apartment image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoninjBundle {
    pub detour: DetourCertificate,
    #[serde(rename = "loop")]
    pub loop_cert: LoopCertificate,
    pub symbol_chain: SymbolChain,
    pub apartment_image: Vec<ImageTerm>,
    pub checks: NoninjChecks,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoninjReport {
    #[serde(rename = "type")]
    pub cert_type: String,
    pub ring: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<NoninjBundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_certificate: Option<String>,
    pub valid: bool,
}

/// The loop closed from a detour path by passing through the base line.
pub fn loop_from_detour(detour: &DetourPath) -> Vec<Vector> {
    let mut vertices = vec![Vector::standard(2, 0)];
    vertices.extend(detour.path.iter().cloned());
    vertices
}

/// The symbol chain of a cyclic loop: one rank-2 symbol per edge.
pub fn loop_symbol_chain(loop_vertices: &[Vector]) -> SymbolChain {
    let mut terms = Vec::new();
    for i in 0..loop_vertices.len() {
        let a = loop_vertices[i].clone();
        let b = loop_vertices[(i + 1) % loop_vertices.len()].clone();
        terms.push((BigInt::one(), ModularSymbol::new(vec![a, b])));
    }
    SymbolChain::from_symbols(terms)
}

/// For a norm-Euclidean ring not generated by units: an explicit nonzero
/// kernel element of the rank-2 Bykovskii symbol map, bundled with all its
/// verification data. Unit-generated rings report NoCertificate.
pub fn noninjectivity_report(ring: &RingDescriptor) -> Result<NoninjReport, CertifyError> {
    if !ring.norm_euclidean {
        return Err(CertifyError::Ring(RingError::NotEuclidean(ring.d)));
    }
    if generated_by_units(ring.d) {
        return Ok(NoninjReport {
            cert_type: "noninjectivity".into(),
            ring: ring.spec_string(),
            certificate: None,
            no_certificate: Some(format!(
                "d = {} is additively generated by units; the rank-2 presentation gives no kernel witness here",
                ring.d
            )),
            valid: true,
        });
    }
    let detour_path = detour_construct(ring)?;
    let detour = detour_verify(ring, &detour_path.path, &detour_path.r1, &detour_path.r2)?;
    let loop_vertices = loop_from_detour(&detour_path);
    let loop_cert = loop_nontrivial_certificate(ring, &loop_vertices)?;
    let chain = loop_symbol_chain(&loop_vertices).normalize(ring)?;
    let image = apartment_image_2(ring, &chain)?;
    let checks = NoninjChecks {
        detour_valid: detour.valid,
        loop_valid: loop_cert.valid,
        apartment_image_zero: image.is_zero(),
        class_separation: detour.checks.class_separation,
    };
    let valid =
        checks.detour_valid && checks.loop_valid && checks.apartment_image_zero && checks.class_separation;
    Ok(NoninjReport {
        cert_type: "noninjectivity".into(),
        ring: ring.spec_string(),
        certificate: Some(NoninjBundle {
            detour,
            loop_cert,
            symbol_chain: chain,
            apartment_image: image.to_terms(),
            checks,
            valid,
        }),
        no_certificate: None,
        valid,
    })
}

// -- self-verification from JSON ------------------------------------------------

fn ring_from_spec(spec: &str) -> Result<RingDescriptor, CertifyError> {
    crate::complexes::parse_ring_spec(spec)
        .ok_or_else(|| CertifyError::BadCertificate(format!("bad ring spec {spec:?}")))
}

/// Recomputes every check of a serialized certificate from its own data and
/// returns the recomputed validity. Stored check values are not trusted;
/// a certificate whose stored `valid` disagrees with the recomputation is
/// rejected as bad.
pub fn verify_certificate_json(text: &str) -> Result<bool, CertifyError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CertifyError::BadCertificate(format!("bad JSON: {e}")))?;
    let cert_type = value
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| CertifyError::BadCertificate("missing type".into()))?;
    match cert_type {
        "detour" => {
            let cert: DetourCertificate = serde_json::from_value(value)
                .map_err(|e| CertifyError::BadCertificate(e.to_string()))?;
            let ring = ring_from_spec(&cert.ring)?;
            let path: Vec<Vector> = cert.path.iter().map(|l| l.rep().clone()).collect();
            let recomputed = detour_verify(&ring, &path, &cert.r1, &cert.r2)?;
            if recomputed.valid != cert.valid || recomputed.checks != cert.checks {
                return Err(CertifyError::BadCertificate(
                    "stored checks disagree with recomputation".into(),
                ));
            }
            Ok(recomputed.valid)
        }
        "loop" => {
            let cert: LoopCertificate = serde_json::from_value(value)
                .map_err(|e| CertifyError::BadCertificate(e.to_string()))?;
            let ring = ring_from_spec(&cert.ring)?;
            let vertices: Vec<Vector> =
                cert.loop_lines.iter().map(|l| l.rep().clone()).collect();
            let recomputed = loop_nontrivial_certificate(&ring, &vertices)?;
            if recomputed.valid != cert.valid || recomputed.checks != cert.checks {
                return Err(CertifyError::BadCertificate(
                    "stored checks disagree with recomputation".into(),
                ));
            }
            Ok(recomputed.valid)
        }
        "noninjectivity" => {
            let report: NoninjReport = serde_json::from_value(value)
                .map_err(|e| CertifyError::BadCertificate(e.to_string()))?;
            let ring = ring_from_spec(&report.ring)?;
            let Some(bundle) = &report.certificate else {
                // NoCertificate is right exactly for unit-generated rings
                return Ok(report.no_certificate.is_some() && generated_by_units(ring.d));
            };
            let path: Vec<Vector> = bundle.detour.path.iter().map(|l| l.rep().clone()).collect();
            let detour = detour_verify(&ring, &path, &bundle.detour.r1, &bundle.detour.r2)?;
            let vertices: Vec<Vector> =
                bundle.loop_cert.loop_lines.iter().map(|l| l.rep().clone()).collect();
            let loop_cert = loop_nontrivial_certificate(&ring, &vertices)?;
            let chain_direct = loop_symbol_chain(&vertices).normalize(&ring)?;
            let stored_chain = bundle.symbol_chain.normalize(&ring)?;
            let chain_matches = stored_chain == chain_direct;
            let image = apartment_image_2(&ring, &stored_chain)?;
            let valid = detour.valid && loop_cert.valid && image.is_zero() && chain_matches;
            if valid != bundle.valid || valid != report.valid {
                return Err(CertifyError::BadCertificate(
                    "stored validity disagrees with recomputation".into(),
                ));
            }
            Ok(valid)
        }
        other => Err(CertifyError::BadCertificate(format!("unknown type {other:?}"))),
    }
}
