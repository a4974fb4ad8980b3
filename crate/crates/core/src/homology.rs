//! Integer simplicial homology via Smith normal form.
//!
//! Boundary matrices carry entries in {-1, 0, 1} from the alternating-sign
//! convention on sorted vertex tuples; the Smith reduction itself works on
//! arbitrary-precision integers with pivoting on minimal absolute value.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("empty complex: reduced homology is Z in degree -1 and nothing else")]
    EmptyComplex,
    #[error("simplex {0:?} in dimension {1} is malformed")]
    MalformedSimplex(Vec<usize>, usize),
    #[error("missing face {0:?}")]
    MissingFace(Vec<usize>),
}

/// Abstract simplicial data: a vertex count plus, per dimension >= 1, the
/// sorted list of sorted vertex-index tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialData {
    pub vertex_count: usize,
    pub simplices: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl SimplicialData {
    pub fn graph(vertex_count: usize, edges: Vec<Vec<usize>>) -> Self {
        let mut simplices = BTreeMap::new();
        if !edges.is_empty() {
            simplices.insert(1, edges);
        }
        SimplicialData { vertex_count, simplices }
    }

    pub fn dimension(&self) -> usize {
        self.simplices.keys().max().copied().unwrap_or(0)
    }

    pub fn simplices_of_dim(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(&k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Checks sortedness, vertex bounds, and downward closure.
    pub fn validate(&self) -> Result<(), HomologyError> {
        for (&k, list) in &self.simplices {
            for s in list {
                let ok = s.len() == k + 1
                    && s.windows(2).all(|w| w[0] < w[1])
                    && s.iter().all(|&v| v < self.vertex_count);
                if !ok {
                    return Err(HomologyError::MalformedSimplex(s.clone(), k));
                }
                if k >= 2 {
                    for face in faces(s) {
                        if !self.simplices_of_dim(k - 1).contains(&face) {
                            return Err(HomologyError::MissingFace(face));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn faces(simplex: &[usize]) -> Vec<Vec<usize>> {
    (0..simplex.len())
        .map(|i| {
            let mut f = simplex.to_vec();
            f.remove(i);
            f
        })
        .collect()
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    if !add.is_zero() {
                        let cur = out.get(i, j) + add;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] -= q * row[source]`
    pub fn row_op(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(target, j) - q * self.get(source, j);
            self.set(target, j, v);
        }
    }

    /// `col[target] -= q * col[source]`
    pub fn col_op(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, target) - q * self.get(i, source);
            self.set(i, target, v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithResult {
    /// d_1 | d_2 | ... | d_r, all positive.
    pub factors: Vec<BigInt>,
    pub rank: usize,
}

/// Smith normal form by row/column elimination with pivoting on minimal
/// absolute value, which keeps entry growth in check.
pub fn smith_normal_form(input: &IntMatrix) -> SmithResult {
    let mut m = input.clone();
    let steps = m.rows.min(m.cols);
    let mut factors: Vec<BigInt> = Vec::new();
    for t in 0..steps {
        'pivot: loop {
            let mut pivot: Option<(usize, usize, BigInt)> = None;
            for i in t..m.rows {
                for j in t..m.cols {
                    let v = m.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    let a = v.abs();
                    match &pivot {
                        Some((_, _, best)) if *best <= a => {}
                        _ => pivot = Some((i, j, a)),
                    }
                }
            }
            let Some((pi, pj, _)) = pivot else {
                // trailing block vanished: done
                let rank = factors.len();
                return SmithResult { factors, rank };
            };
            m.swap_rows(t, pi);
            m.swap_cols(t, pj);
            let pivot_val = m.get(t, t).clone();
            let mut clean = true;
            for i in (t + 1)..m.rows {
                if m.get(i, t).is_zero() {
                    continue;
                }
                let q = div_round(m.get(i, t), &pivot_val);
                m.row_op(i, t, &q);
                if !m.get(i, t).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            for j in (t + 1)..m.cols {
                if m.get(t, j).is_zero() {
                    continue;
                }
                let q = div_round(m.get(t, j), &pivot_val);
                m.col_op(j, t, &q);
                if !m.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // the pivot must divide the trailing block; fold an offending
            // row into the pivot row and retry
            for i in (t + 1)..m.rows {
                for j in (t + 1)..m.cols {
                    if !(m.get(i, j) % &pivot_val).is_zero() {
                        let minus_one = BigInt::from(-1);
                        m.row_op(t, i, &minus_one);
                        continue 'pivot;
                    }
                }
            }
            factors.push(pivot_val.abs());
            break;
        }
    }
    let rank = factors.len();
    SmithResult { factors, rank }
}

/// Rounded division: remainder magnitude at most |divisor|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a / b;
    let r = a - &q * b;
    if r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// The boundary matrix from k-simplices (columns) to (k-1)-simplices
/// (rows). For k = 0 this is the reduced augmentation row.
pub fn boundary_matrix(data: &SimplicialData, k: usize) -> IntMatrix {
    if k == 0 {
        let mut m = IntMatrix::zero(1, data.vertex_count);
        for j in 0..data.vertex_count {
            m.set(0, j, BigInt::from(1));
        }
        return m;
    }
    let cols_list = data.simplices_of_dim(k);
    let (rows_len, row_index): (usize, HashMap<&[usize], usize>) = if k == 1 {
        (data.vertex_count, HashMap::new())
    } else {
        let rows_list = data.simplices_of_dim(k - 1);
        let map: HashMap<&[usize], usize> =
            rows_list.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        (rows_list.len(), map)
    };
    let mut m = IntMatrix::zero(rows_len, cols_list.len());
    for (j, simplex) in cols_list.iter().enumerate() {
        for (drop, face) in faces(simplex).into_iter().enumerate() {
            let i = if k == 1 {
                face[0]
            } else {
                *row_index.get(face.as_slice()).expect("downward closure")
            };
            let sign = if drop % 2 == 0 { 1 } else { -1 };
            m.set(i, j, BigInt::from(sign));
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHomology {
    pub betti: usize,
    #[serde(with = "torsion_digits")]
    pub torsion: Vec<BigInt>,
}

mod torsion_digits {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|x| BigInt::from_str(x).map_err(serde::de::Error::custom)).collect()
    }
}

/// Reduced Betti numbers and torsion per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub reduced: bool,
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyProfile {
    pub fn betti(&self, k: usize) -> usize {
        self.degrees.get(k).map(|d| d.betti).unwrap_or(0)
    }

    pub fn torsion(&self, k: usize) -> &[BigInt] {
        self.degrees.get(k).map(|d| d.torsion.as_slice()).unwrap_or(&[])
    }

    /// True when the only nonzero reduced homology sits in `degree` and
    /// there is no torsion anywhere.
    pub fn concentrated_in(&self, degree: usize) -> bool {
        self.degrees
            .iter()
            .enumerate()
            .all(|(k, d)| (d.betti == 0 || k == degree) && d.torsion.is_empty())
    }
}

/// Reduced integer homology: in degree k the Betti number is
/// dim C_k - rank d_k - rank d_{k+1} (d_0 = augmentation), and the torsion
/// is the list of invariant factors of d_{k+1} exceeding 1.
pub fn reduced_homology(data: &SimplicialData) -> Result<HomologyProfile, HomologyError> {
    if data.vertex_count == 0 {
        return Err(HomologyError::EmptyComplex);
    }
    let top = data.dimension();
    let mut snf: Vec<SmithResult> = Vec::new();
    for k in 0..=(top + 1) {
        let chain_dim = if k == 0 { data.vertex_count } else { data.simplices_of_dim(k).len() };
        if chain_dim == 0 {
            snf.push(SmithResult { factors: vec![], rank: 0 });
        } else {
            snf.push(smith_normal_form(&boundary_matrix(data, k)));
        }
    }
    let mut degrees = Vec::new();
    for k in 0..=top {
        let chain_dim = if k == 0 { data.vertex_count } else { data.simplices_of_dim(k).len() };
        let rank_out = snf[k].rank;
        let rank_in = snf.get(k + 1).map(|s| s.rank).unwrap_or(0);
        let betti = chain_dim - rank_out - rank_in;
        let torsion: Vec<BigInt> = snf
            .get(k + 1)
            .map(|s| s.factors.iter().filter(|f| **f > BigInt::from(1)).cloned().collect())
            .unwrap_or_default();
        degrees.push(DegreeHomology { betti, torsion });
    }
    Ok(HomologyProfile { reduced: true, degrees })
}

/// d_{k-1} . d_k = 0 for every valid chain complex.
pub fn boundary_composition_is_zero(data: &SimplicialData, k: usize) -> bool {
    if k < 1 {
        return true;
    }
    let dk = boundary_matrix(data, k);
    let dk1 = boundary_matrix(data, k - 1);
    if dk.cols == 0 || dk1.cols == 0 {
        return true;
    }
    dk1.mul(&dk).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_diagonal_merge() {
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.factors, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn snf_zero_and_identity() {
        let z = IntMatrix::zero(3, 2);
        let s = smith_normal_form(&z);
        assert!(s.factors.is_empty());
        assert_eq!(s.rank, 0);

        let id = IntMatrix::identity(3);
        let s = smith_normal_form(&id);
        assert_eq!(s.factors, vec![BigInt::from(1); 3]);
    }

    #[test]
    fn snf_divisibility_chain() {
        let rows = [[2i64, 4, 4], [-6, 6, 12], [10, 4, 16]];
        let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        let m = IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect());
        let s = smith_normal_form(&m);
        assert_eq!(s.factors.len(), 3);
        for w in s.factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "chain broken: {:?}", s.factors);
        }
        // product of invariant factors = |det|
        let prod: BigInt = s.factors.iter().product();
        assert_eq!(prod, BigInt::from(det.abs()));
    }

    #[test]
    fn snf_known_4x4() {
        let m = IntMatrix::from_rows(vec![
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let s = smith_normal_form(&m);
        assert_eq!(s.factors, vec![BigInt::from(1), BigInt::from(3), BigInt::from(21)]);
        assert_eq!(s.rank, 3);
    }

    fn hollow_triangle() -> SimplicialData {
        SimplicialData::graph(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]])
    }

    #[test]
    fn circle_homology() {
        let h = reduced_homology(&hollow_triangle()).unwrap();
        assert_eq!(h.betti(0), 0);
        assert_eq!(h.betti(1), 1);
        assert!(h.torsion(0).is_empty());
    }

    #[test]
    fn filled_triangle_is_contractible() {
        let mut data = hollow_triangle();
        data.simplices.insert(2, vec![vec![0, 1, 2]]);
        data.validate().unwrap();
        let h = reduced_homology(&data).unwrap();
        assert_eq!(h.betti(0), 0);
        assert_eq!(h.betti(1), 0);
        assert_eq!(h.betti(2), 0);
    }

    #[test]
    fn projective_plane_torsion() {
        // minimal 6-vertex triangulation of the real projective plane:
        // 15 edges, 10 triangles, and Z/2 torsion in degree 1
        let triangles = [
            [0usize, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 1, 5],
            [1, 2, 4],
            [2, 4, 5],
            [2, 3, 5],
            [1, 3, 5],
            [1, 3, 4],
        ];
        let mut tris: Vec<Vec<usize>> = triangles.iter().map(|t| t.to_vec()).collect();
        tris.sort();
        let mut edges: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for t in &tris {
            for f in faces(t) {
                edges.insert(f);
            }
        }
        let mut simplices = BTreeMap::new();
        simplices.insert(1, edges.into_iter().collect::<Vec<_>>());
        simplices.insert(2, tris);
        let data = SimplicialData { vertex_count: 6, simplices };
        data.validate().unwrap();
        assert_eq!(data.simplices_of_dim(1).len(), 15);
        assert!(boundary_composition_is_zero(&data, 2));
        let h = reduced_homology(&data).unwrap();
        assert_eq!(h.betti(0), 0);
        assert_eq!(h.betti(1), 0);
        assert_eq!(h.betti(2), 0);
        assert_eq!(h.torsion(1), &[BigInt::from(2)]);
    }

    #[test]
    fn discrete_points() {
        let data = SimplicialData::graph(4, vec![]);
        let h = reduced_homology(&data).unwrap();
        assert_eq!(h.betti(0), 3);
    }

    #[test]
    fn empty_complex_err() {
        let data = SimplicialData::graph(0, vec![]);
        assert_eq!(reduced_homology(&data).unwrap_err(), HomologyError::EmptyComplex);
    }

    #[test]
    fn boundary_squared_zero_tetrahedron() {
        let mut simplices = BTreeMap::new();
        simplices.insert(
            1,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]],
        );
        simplices.insert(2, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        simplices.insert(3, vec![vec![0, 1, 2, 3]]);
        let data = SimplicialData { vertex_count: 4, simplices };
        data.validate().unwrap();
        for k in 1..=3 {
            assert!(boundary_composition_is_zero(&data, k));
        }
        let h = reduced_homology(&data).unwrap();
        assert!(h.degrees.iter().all(|d| d.betti == 0 && d.torsion.is_empty()));
    }

    #[test]
    fn validate_catches_missing_face() {
        let mut simplices = BTreeMap::new();
        simplices.insert(1, vec![vec![0, 1]]);
        simplices.insert(2, vec![vec![0, 1, 2]]);
        let data = SimplicialData { vertex_count: 3, simplices };
        assert!(matches!(data.validate(), Err(HomologyError::MissingFace(_))));
    }
}
