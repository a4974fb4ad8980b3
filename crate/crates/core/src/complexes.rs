//! Finite truncations of the complexes of partial frames B_n^m and
//! augmented partial frames BA_n^m over a quadratic integer ring, their
//! link subcomplexes, and order complexes of proper subspaces of F_q^n as
//! small exactly-known oracles for the homology engine.

use crate::homology::SimplicialData;
use crate::lattice::{
    self, is_augmented_frame, is_partial_frame, vector_in_span, FrameSimplex, LatticeError, Line,
    Vector,
};
use crate::quadring::{make_ring, RingDescriptor};
use crate::unionfind::UnionFind;
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Hard cap on the vertex list of a built complex.
pub const DEFAULT_VERTEX_CAP: usize = 50_000;

const CANDIDATE_CAP: u128 = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("rank n + m = {0} out of range (need 1 <= n + m <= 3)")]
    RankTooLarge(usize),
    #[error("bound produces more than {0} candidate vertices")]
    BoundTooLarge(usize),
    #[error("the given lines do not form a simplex of the complex")]
    NotASimplex,
    #[error("vertex not present in the complex")]
    VertexAbsent,
    #[error("q = {0} out of range (need a prime q <= 7)")]
    QTooLarge(u32),
    #[error("flag complexes are built only for n = 2 or 3, got {0}")]
    FlagRankUnsupported(u32),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    B,
    BA,
}

impl ComplexKind {
    pub fn wire_name(self) -> &'static str {
        match self {
            ComplexKind::B => "B",
            ComplexKind::BA => "BA",
        }
    }

    pub fn from_wire(s: &str) -> Option<Self> {
        match s {
            "B" => Some(ComplexKind::B),
            "BA" => Some(ComplexKind::BA),
            _ => None,
        }
    }
}

/// Which vertices a link keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkVariant {
    /// Simplices disjoint from sigma that join with it.
    Plain,
    /// Plain, minus vertices inside the span of the fixed lines and sigma.
    Hat,
    /// Hat, restricted to vertices v with F(v) < F(w) for some w in sigma.
    Lt,
}

/// A finite truncation of B_n^m or BA_n^m.
///
/// Vertices are the lines of O^{n+m} outside the span of the first m
/// standard lines whose canonical representative has all coordinate norms
/// at most `bound`; simplices are found by exhaustive frame and
/// augmented-frame tests against the fixed standard lines. For d > 0 the
/// vertex alphabet is additionally clipped to a trace window derived from
/// `unit_window` (recorded by `windowed`), since norm balls are infinite
/// there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameComplex {
    pub ring: RingDescriptor,
    pub n: usize,
    pub m: usize,
    pub bound: u64,
    pub kind: ComplexKind,
    pub unit_window: u32,
    pub windowed: bool,
    pub vertices: Vec<Line>,
    /// dimension (>= 1) -> sorted list of sorted vertex-index tuples.
    pub simplices: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl FrameComplex {
    pub fn rank(&self) -> usize {
        self.n + self.m
    }

    pub fn fixed_lines(&self) -> Vec<Vector> {
        (0..self.m).map(|i| Vector::standard(self.rank(), i)).collect()
    }

    pub fn edge_list(&self) -> &[Vec<usize>] {
        self.simplices.get(&1).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn vertex_index(&self, line: &Line) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.key().cmp(line.key())).ok()
    }

    pub fn contains_simplex(&self, sorted_indices: &[usize]) -> bool {
        match sorted_indices.len() {
            0 => true,
            1 => sorted_indices[0] < self.vertices.len(),
            len => self
                .simplices
                .get(&(len - 1))
                .is_some_and(|list| list.binary_search(&sorted_indices.to_vec()).is_ok()),
        }
    }

    pub fn chain_data(&self) -> SimplicialData {
        SimplicialData { vertex_count: self.vertices.len(), simplices: self.simplices.clone() }
    }

    /// Union-find partition of the 1-skeleton, components ordered by their
    /// least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in self.edge_list() {
            uf.union(e[0], e[1]);
        }
        uf.partition()
    }

    pub fn component_of(&self, line: &Line) -> Result<Vec<usize>, ComplexError> {
        let idx = self.vertex_index(line).ok_or(ComplexError::VertexAbsent)?;
        Ok(self
            .components()
            .into_iter()
            .find(|comp| comp.contains(&idx))
            .expect("every vertex lies in a component"))
    }

    /// Re-runs the defining simplex test on a stored tuple, returning the
    /// witnessing FrameSimplex.
    pub fn simplex_certificate(
        &self,
        sorted_indices: &[usize],
    ) -> Result<Option<FrameSimplex>, ComplexError> {
        let mut members = self.fixed_lines();
        members.extend(sorted_indices.iter().map(|&i| self.vertices[i].rep().clone()));
        Ok(is_augmented_frame(&self.ring, &members, self.unit_window)?)
    }

    /// Downward closure plus the span condition on vertices; used by tests
    /// and by the loader.
    pub fn verify_structure(&self) -> Result<(), ComplexError> {
        self.chain_data().validate().map_err(|_| ComplexError::NotASimplex)?;
        let fixed = self.fixed_lines();
        for v in &self.vertices {
            if !fixed.is_empty() && vector_in_span(&self.ring, v.rep(), &fixed) {
                return Err(ComplexError::NotASimplex);
            }
        }
        Ok(())
    }
}

/// Coordinate alphabet for vertex enumeration. Imaginary rings use the
/// exact norm ball. Real rings clip to |N| <= bound together with a trace
/// box spanned by unit powers up to the window, which makes the truncation
/// finite and deterministic.
fn coordinate_alphabet(
    ring: &RingDescriptor,
    bound: u64,
    window: u32,
) -> Result<Vec<crate::quadring::RingElement>, ComplexError> {
    if ring.d < 0 {
        return Ok(ring.elements_of_norm_up_to(bound));
    }
    let units = lattice::unit_window(ring, window)?;
    let trace_max: BigInt = units
        .iter()
        .map(|u| ring.trace(u).abs())
        .max()
        .expect("window contains 1");
    let sqrt_b = BigInt::from(bound.sqrt() + 1);
    let tr_bound: BigInt = (trace_max + 1) * 2 * &sqrt_b;
    let n_bound = BigInt::from(bound);
    // |y| from sigma1 - sigma2 = k * y * sqrt(d), k in {1, 2}
    let y_bound: i64 = {
        let num: BigInt = &tr_bound * &tr_bound / BigInt::from(ring.d);
        i64::try_from(&num.sqrt()).map_err(|_| ComplexError::BoundTooLarge(0))? + 2
    };
    let x_bound: i64 = {
        let t: BigInt = &tr_bound / 2 + 1;
        i64::try_from(&t).map_err(|_| ComplexError::BoundTooLarge(0))? + y_bound
    };
    let mut out = Vec::new();
    for y in -y_bound..=y_bound {
        for x in -x_bound..=x_bound {
            let c = ring.el(x, y);
            if ring.norm_abs(&c) <= n_bound && ring.trace(&c).abs() <= tr_bound {
                out.push(c);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Builds the truncated complex of (augmented) partial frames relative to
/// the first m standard lines of O^{n+m}.
pub fn build_complex(
    ring: &RingDescriptor,
    n: usize,
    m: usize,
    bound: u64,
    kind: ComplexKind,
    unit_window: u32,
) -> Result<FrameComplex, ComplexError> {
    build_complex_capped(ring, n, m, bound, kind, unit_window, DEFAULT_VERTEX_CAP)
}

pub fn build_complex_capped(
    ring: &RingDescriptor,
    n: usize,
    m: usize,
    bound: u64,
    kind: ComplexKind,
    unit_window: u32,
    vertex_cap: usize,
) -> Result<FrameComplex, ComplexError> {
    let rank = n + m;
    if n == 0 || rank == 0 || rank > 3 {
        return Err(ComplexError::RankTooLarge(rank));
    }
    let alphabet = coordinate_alphabet(ring, bound, unit_window)?;
    let candidates = (alphabet.len() as u128).pow(rank as u32);
    if candidates > CANDIDATE_CAP {
        return Err(ComplexError::BoundTooLarge(vertex_cap));
    }
    let fixed: Vec<Vector> = (0..m).map(|i| Vector::standard(rank, i)).collect();
    let n_bound = BigInt::from(bound);

    let mut lines: std::collections::BTreeSet<Line> = Default::default();
    let mut indices = vec![0usize; rank];
    'outer: loop {
        let v = Vector::new(indices.iter().map(|&i| alphabet[i].clone()).collect());
        if let Some(line) = admissible_vertex(ring, &v, m, &fixed, &alphabet, &n_bound)? {
            lines.insert(line);
            if lines.len() > vertex_cap {
                return Err(ComplexError::BoundTooLarge(vertex_cap));
            }
        }
        for slot in (0..rank).rev() {
            indices[slot] += 1;
            if indices[slot] < alphabet.len() {
                continue 'outer;
            }
            indices[slot] = 0;
            if slot == 0 {
                break 'outer;
            }
        }
    }
    let vertices: Vec<Line> = lines.into_iter().collect();

    let mut simplices: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let max_card = match kind {
        ComplexKind::B => n,
        ComplexKind::BA => n + 1,
    };
    // edges
    let mut current: Vec<Vec<usize>> = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            if simplex_test(ring, kind, &fixed, &vertices, &[i, j], unit_window)? {
                current.push(vec![i, j]);
            }
        }
    }
    if !current.is_empty() {
        simplices.insert(1, current.clone());
    }
    // higher dimensions by extension with face pruning
    let mut card = 3;
    while card <= max_card && !current.is_empty() {
        let prev_set: std::collections::BTreeSet<Vec<usize>> = current.iter().cloned().collect();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for s in &current {
            let last = *s.last().expect("nonempty");
            for v in (last + 1)..vertices.len() {
                let mut candidate = s.clone();
                candidate.push(v);
                let closed = (0..candidate.len()).all(|drop| {
                    let mut face = candidate.clone();
                    face.remove(drop);
                    prev_set.contains(&face)
                });
                if closed && simplex_test(ring, kind, &fixed, &vertices, &candidate, unit_window)? {
                    next.push(candidate);
                }
            }
        }
        next.sort();
        next.dedup();
        if !next.is_empty() {
            simplices.insert(card - 1, next.clone());
        }
        current = next;
        card += 1;
    }

    Ok(FrameComplex {
        ring: ring.clone(),
        n,
        m,
        bound,
        kind,
        unit_window,
        windowed: ring.d > 0,
        vertices,
        simplices,
    })
}

/// Admits a candidate vector as a vertex: primitive, not inside the span of
/// the fixed lines, forming a frame with them, and with all canonical-rep
/// coordinates inside the alphabet and norm bound.
fn admissible_vertex(
    ring: &RingDescriptor,
    v: &Vector,
    m: usize,
    fixed: &[Vector],
    alphabet: &[crate::quadring::RingElement],
    n_bound: &BigInt,
) -> Result<Option<Line>, ComplexError> {
    if v.is_zero() {
        return Ok(None);
    }
    if v.coords.iter().skip(m).all(|c| c.is_zero()) {
        return Ok(None); // inside span(e_1..e_m)
    }
    if !lattice::is_primitive(ring, v)? {
        return Ok(None);
    }
    let mut members: Vec<Vector> = fixed.to_vec();
    members.push(v.clone());
    if !is_partial_frame(ring, &members)? {
        return Ok(None);
    }
    let line = lattice::canonical_line(ring, v)?;
    let rep_ok = line
        .rep()
        .coords
        .iter()
        .all(|c| ring.norm_abs(c) <= *n_bound && (ring.d < 0 || alphabet.contains(c)));
    Ok(rep_ok.then_some(line))
}

/// The defining test for a simplex of the truncated complex: the chosen
/// vertex representatives together with the fixed standard lines must form
/// a partial frame (kind B) or a partial/augmented partial frame (kind BA).
fn simplex_test(
    ring: &RingDescriptor,
    kind: ComplexKind,
    fixed: &[Vector],
    vertices: &[Line],
    tuple: &[usize],
    unit_window: u32,
) -> Result<bool, ComplexError> {
    let mut members: Vec<Vector> = fixed.to_vec();
    members.extend(tuple.iter().map(|&i| vertices[i].rep().clone()));
    match kind {
        ComplexKind::B => Ok(is_partial_frame(ring, &members)?),
        ComplexKind::BA => Ok(is_augmented_frame(ring, &members, unit_window)?.is_some()),
    }
}

/// Link of a simplex, in the requested variant, as an induced complex.
pub fn link(
    cx: &FrameComplex,
    sigma: &[Line],
    variant: LinkVariant,
) -> Result<FrameComplex, ComplexError> {
    if sigma.is_empty() || sigma.len() > cx.n + 1 {
        return Err(ComplexError::NotASimplex);
    }
    let mut sigma_idx: Vec<usize> = sigma
        .iter()
        .map(|l| cx.vertex_index(l).ok_or(ComplexError::VertexAbsent))
        .collect::<Result<_, _>>()?;
    sigma_idx.sort();
    sigma_idx.dedup();
    if sigma_idx.len() != sigma.len() || !cx.contains_simplex(&sigma_idx) {
        return Err(ComplexError::NotASimplex);
    }

    let mut span_basis: Vec<Vector> = cx.fixed_lines();
    span_basis.extend(sigma_idx.iter().map(|&i| cx.vertices[i].rep().clone()));
    let f_max = sigma_idx
        .iter()
        .map(|&i| lattice::f_value(&cx.ring, cx.vertices[i].rep()))
        .max()
        .expect("sigma nonempty");

    let keep = |v: usize| -> bool {
        if sigma_idx.contains(&v) {
            return false;
        }
        let mut joined = sigma_idx.clone();
        joined.push(v);
        joined.sort();
        if !cx.contains_simplex(&joined) {
            return false;
        }
        match variant {
            LinkVariant::Plain => true,
            LinkVariant::Hat => !vector_in_span(&cx.ring, cx.vertices[v].rep(), &span_basis),
            LinkVariant::Lt => {
                !vector_in_span(&cx.ring, cx.vertices[v].rep(), &span_basis)
                    && lattice::f_value(&cx.ring, cx.vertices[v].rep()) < f_max
            }
        }
    };
    let kept: Vec<usize> = (0..cx.vertices.len()).filter(|&v| keep(v)).collect();
    let reindex: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let vertices: Vec<Line> = kept.iter().map(|&v| cx.vertices[v].clone()).collect();

    let mut simplices: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for list in cx.simplices.values() {
        for tuple in list {
            if tuple.iter().any(|t| !reindex.contains_key(t)) {
                continue;
            }
            let mut joined: Vec<usize> = tuple.clone();
            joined.extend_from_slice(&sigma_idx);
            joined.sort();
            if !cx.contains_simplex(&joined) {
                continue;
            }
            let renamed: Vec<usize> = tuple.iter().map(|t| reindex[t]).collect();
            simplices.entry(renamed.len() - 1).or_default().push(renamed);
        }
    }
    for list in simplices.values_mut() {
        list.sort();
        list.dedup();
    }

    Ok(FrameComplex {
        ring: cx.ring.clone(),
        n: cx.n - sigma.len().min(cx.n),
        m: cx.m + sigma.len(),
        bound: cx.bound,
        kind: cx.kind,
        unit_window: cx.unit_window,
        windowed: cx.windowed,
        vertices,
        simplices,
    })
}

// -- order complexes of proper subspaces of F_q^n ---------------------------

/// A proper nonzero subspace of F_q^n, named by a normalized spanning
/// vector (dim 1) or a normalized normal covector (dim n-1 = 2).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqSubspace {
    pub dim: u32,
    pub coords: Vec<u32>,
}

/// The order complex of the poset of proper nonzero subspaces of F_q^n:
/// for n = 2 a discrete set of q+1 points, for n = 3 the bipartite
/// point-plane incidence graph of the projective plane over F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagComplexFq {
    pub q: u32,
    pub n: u32,
    pub vertices: Vec<FqSubspace>,
    pub edges: Vec<Vec<usize>>,
}

impl FlagComplexFq {
    pub fn chain_data(&self) -> SimplicialData {
        SimplicialData::graph(self.vertices.len(), self.edges.clone())
    }
}

fn projective_points(q: u32, n: u32) -> Vec<Vec<u32>> {
    // normalized: first nonzero coordinate equals 1
    let mut pts = Vec::new();
    let total = (q as u64).pow(n);
    for code in 1..total {
        let mut v = Vec::with_capacity(n as usize);
        let mut c = code;
        for _ in 0..n {
            v.push((c % q as u64) as u32);
            c /= q as u64;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            pts.push(v);
        }
    }
    pts.sort();
    pts
}

pub fn build_tits_fq(q: u32, n: u32) -> Result<FlagComplexFq, ComplexError> {
    let is_prime = q >= 2 && (2..q).all(|p| !q.is_multiple_of(p));
    if q > 7 || !is_prime {
        return Err(ComplexError::QTooLarge(q));
    }
    if n != 2 && n != 3 {
        return Err(ComplexError::FlagRankUnsupported(n));
    }
    let points = projective_points(q, n);
    let mut vertices: Vec<FqSubspace> =
        points.iter().map(|p| FqSubspace { dim: 1, coords: p.clone() }).collect();
    let mut edges = Vec::new();
    if n == 3 {
        let planes = projective_points(q, n); // dual coordinates
        let offset = vertices.len();
        vertices
            .extend(planes.iter().map(|h| FqSubspace { dim: 2, coords: h.clone() }));
        for (i, p) in points.iter().enumerate() {
            for (j, h) in planes.iter().enumerate() {
                let dot: u32 =
                    p.iter().zip(h).map(|(a, b)| a * b).sum::<u32>() % q;
                if dot == 0 {
                    edges.push(vec![i, offset + j]);
                }
            }
        }
        edges.sort();
    }
    Ok(FlagComplexFq { q, n, vertices, edges })
}

// -- JSON dump / load --------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ComplexDump {
    ring: String,
    n: usize,
    m: usize,
    bound: u64,
    kind: String,
    unit_window: u32,
    windowed: bool,
    vertices: Vec<Line>,
    simplices: BTreeMap<String, Vec<Vec<usize>>>,
}

pub fn dump_json(cx: &FrameComplex) -> String {
    let dump = ComplexDump {
        ring: cx.ring.spec_string(),
        n: cx.n,
        m: cx.m,
        bound: cx.bound,
        kind: cx.kind.wire_name().to_string(),
        unit_window: cx.unit_window,
        windowed: cx.windowed,
        vertices: cx.vertices.clone(),
        simplices: cx.simplices.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    };
    serde_json::to_string_pretty(&dump).expect("dump serialization cannot fail")
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad ring spec {0:?} (expected \"d=<integer>\")")]
    RingSpec(String),
    #[error("bad complex kind {0:?}")]
    Kind(String),
    #[error("vertex {0} has a key that does not match its coordinates")]
    KeyMismatch(usize),
    #[error("simplex index out of range")]
    IndexRange,
    #[error("bad dimension key {0:?}")]
    DimKey(String),
}

pub fn parse_ring_spec(spec: &str) -> Option<RingDescriptor> {
    let rest = spec.trim().strip_prefix("d=")?;
    let d: i64 = rest.parse().ok()?;
    make_ring(d).ok()
}

pub fn load_json(text: &str) -> Result<FrameComplex, LoadError> {
    let dump: ComplexDump = serde_json::from_str(text)?;
    let ring = parse_ring_spec(&dump.ring).ok_or_else(|| LoadError::RingSpec(dump.ring.clone()))?;
    let kind = ComplexKind::from_wire(&dump.kind).ok_or_else(|| LoadError::Kind(dump.kind.clone()))?;
    for (i, line) in dump.vertices.iter().enumerate() {
        let recomputed = lattice::canonical_line(&ring, line.rep())
            .map_err(|_| LoadError::KeyMismatch(i))?;
        if recomputed.key() != line.key() || recomputed.rep() != line.rep() {
            return Err(LoadError::KeyMismatch(i));
        }
    }
    let mut simplices = BTreeMap::new();
    for (k, list) in dump.simplices {
        let dim: usize = k.parse().map_err(|_| LoadError::DimKey(k.clone()))?;
        for tuple in &list {
            if tuple.iter().any(|&t| t >= dump.vertices.len()) {
                return Err(LoadError::IndexRange);
            }
        }
        simplices.insert(dim, list);
    }
    Ok(FrameComplex {
        ring,
        n: dump.n,
        m: dump.m,
        bound: dump.bound,
        kind,
        unit_window: dump.unit_window,
        windowed: dump.windowed,
        vertices: dump.vertices,
        simplices,
    })
}
