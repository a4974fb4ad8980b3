//! Exact arithmetic in the ring of integers of `Q(sqrt(d))` and its fraction
//! field: norms, Euclidean division, gcds, unit groups, and the
//! unit-generation classification.
//!
//! Elements are written on the integral basis `{1, delta}` where
//! `delta = (1 + sqrt(d))/2` when `d = 1 (mod 4)` and `delta = sqrt(d)`
//! otherwise, so the ring is always `Z[delta]`. The field norm is the binary
//! quadratic form `N(x + y*delta) = A x^2 + B x y + C y^2` recorded on the
//! descriptor.

use crate::digits;
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// The squarefree d for which the absolute field norm is a Euclidean
/// function on the ring of integers of Q(sqrt(d)). This classification is
/// complete.
pub const NORM_EUCLIDEAN_D: [i64; 21] = [
    -11, -7, -3, -2, -1, 2, 3, 5, 6, 7, 11, 13, 17, 19, 21, 29, 33, 37, 41, 57, 73,
];

/// Default |y| bound for the brute-force fundamental-unit search.
pub const DEFAULT_UNIT_SEARCH_BOUND: u64 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("d = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("d = {0} does not define a quadratic field")]
    DegenerateD(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the norm is not a Euclidean function for d = {0}")]
    NotEuclidean(i64),
    #[error("quotient sheet search exhausted (internal error for norm-Euclidean d)")]
    SearchExhausted,
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("no fundamental unit with |y| <= {bound} for d = {d}")]
    FundamentalUnitNotFound { d: i64, bound: u64 },
}

/// Which integral basis {1, delta} the ring uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisMode {
    /// d = 1 (mod 4): delta = (1 + sqrt(d))/2.
    Rem1,
    /// otherwise: delta = sqrt(d).
    Other,
}

/// Derived data for the ring of integers of Q(sqrt(d)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingDescriptor {
    pub d: i64,
    pub mode: BasisMode,
    /// delta^2 = p + q*delta.
    pub delta_sq: (i64, i64),
    /// N(x + y*delta) = A x^2 + B x y + C y^2.
    pub norm_form: (i64, i64, i64),
    pub norm_euclidean: bool,
    /// True iff d < 0 (the unit group is then finite torsion).
    pub units_finite: bool,
}

/// An element x + y*delta with arbitrary-precision integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElement {
    #[serde(with = "crate::digits")]
    pub x: BigInt,
    #[serde(with = "crate::digits")]
    pub y: BigInt,
}

/// An element of the fraction field, same basis, rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldElement {
    #[serde(with = "digits::ratio")]
    pub x: BigRational,
    #[serde(with = "digits::ratio")]
    pub y: BigRational,
}

/// The unit group data used by the certification pipeline.
///
/// `span_modulus` g records the additive span of all units as
/// `Z*1 + Z*g*delta`, with g = 0 meaning the span is just `Z` (no unit has a
/// delta part) and g = 1 meaning the span is the whole ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    pub torsion: Vec<RingElement>,
    pub fundamental: Option<RingElement>,
    pub span_modulus: BigInt,
}

impl RingElement {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        RingElement { x: x.into(), y: y.into() }
    }

    pub fn zero() -> Self {
        RingElement::new(0, 0)
    }

    pub fn one() -> Self {
        RingElement::new(1, 0)
    }

    pub fn delta() -> Self {
        RingElement::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        RingElement { x: &self.x + &other.x, y: &self.y + &other.y }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RingElement { x: &self.x - &other.x, y: &self.y - &other.y }
    }

    pub fn neg(&self) -> Self {
        RingElement { x: -&self.x, y: -&self.y }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}d", self.x, self.y)
    }
}

impl FieldElement {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        FieldElement { x, y }
    }

    pub fn from_ring(a: &RingElement) -> Self {
        FieldElement {
            x: BigRational::from_integer(a.x.clone()),
            y: BigRational::from_integer(a.y.clone()),
        }
    }

    /// (p + q*delta) / den, handy for grid points.
    pub fn from_fraction(p: i64, q: i64, den: i64) -> Self {
        FieldElement {
            x: BigRational::new(BigInt::from(p), BigInt::from(den)),
            y: BigRational::new(BigInt::from(q), BigInt::from(den)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        FieldElement { x: &self.x + &other.x, y: &self.y + &other.y }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FieldElement { x: &self.x - &other.x, y: &self.y - &other.y }
    }
}

/// Sign of p + q*sqrt(d) for d > 0 squarefree, computed exactly.
pub(crate) fn surd_sign(p: &BigInt, q: &BigInt, d: i64) -> i32 {
    debug_assert!(d > 1);
    let sp = if p.is_zero() { 0 } else if p.is_positive() { 1 } else { -1 };
    let sq = if q.is_zero() { 0 } else if q.is_positive() { 1 } else { -1 };
    match (sp, sq) {
        (0, s) | (s, 0) => s,
        (1, 1) => 1,
        (-1, -1) => -1,
        _ => {
            // opposite signs: compare p^2 against d*q^2; sqrt(d) is
            // irrational so equality cannot occur.
            let lhs = p * p;
            let rhs = q * q * BigInt::from(d);
            if lhs > rhs {
                sp
            } else {
                sq
            }
        }
    }
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        while n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Builds the descriptor for the ring of integers of Q(sqrt(d)).
pub fn make_ring(d: i64) -> Result<RingDescriptor, RingError> {
    if d == 0 || d == 1 {
        return Err(RingError::DegenerateD(d));
    }
    if !is_squarefree(d) {
        return Err(RingError::NotSquarefree(d));
    }
    let rem1 = d.rem_euclid(4) == 1;
    let (mode, delta_sq, norm_form) = if rem1 {
        (BasisMode::Rem1, ((d - 1) / 4, 1), (1, 1, (1 - d) / 4))
    } else {
        (BasisMode::Other, (d, 0), (1, 0, -d))
    };
    Ok(RingDescriptor {
        d,
        mode,
        delta_sq,
        norm_form,
        norm_euclidean: NORM_EUCLIDEAN_D.contains(&d),
        units_finite: d < 0,
    })
}

impl RingDescriptor {
    pub fn spec_string(&self) -> String {
        format!("d={}", self.d)
    }

    pub fn el(&self, x: i64, y: i64) -> RingElement {
        RingElement::new(x, y)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let (p, q) = (BigInt::from(self.delta_sq.0), BigInt::from(self.delta_sq.1));
        let cross = &a.x * &b.y + &a.y * &b.x;
        let yy = &a.y * &b.y;
        RingElement { x: &a.x * &b.x + &yy * &p, y: cross + &yy * &q }
    }

    pub fn norm(&self, a: &RingElement) -> BigInt {
        let (fa, fb, fc) = self.norm_form;
        &a.x * &a.x * fa + &a.x * &a.y * fb + &a.y * &a.y * fc
    }

    pub fn norm_abs(&self, a: &RingElement) -> BigInt {
        self.norm(a).abs()
    }

    pub fn trace(&self, a: &RingElement) -> BigInt {
        match self.mode {
            BasisMode::Rem1 => &a.x * 2 + &a.y,
            BasisMode::Other => &a.x * 2,
        }
    }

    /// Galois conjugate (sqrt(d) -> -sqrt(d)) on integral coordinates.
    pub fn conj(&self, a: &RingElement) -> RingElement {
        match self.mode {
            BasisMode::Rem1 => RingElement { x: &a.x + &a.y, y: -&a.y },
            BasisMode::Other => RingElement { x: a.x.clone(), y: -&a.y },
        }
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        self.norm_abs(a).is_one()
    }

    /// Sign of the image of `a` under the embedding sending sqrt(d) to the
    /// positive square root (d > 0 only).
    pub(crate) fn real_embedding_sign(&self, a: &RingElement) -> i32 {
        debug_assert!(self.d > 0);
        match self.mode {
            BasisMode::Other => surd_sign(&a.x, &a.y, self.d),
            BasisMode::Rem1 => surd_sign(&(&a.x * 2 + &a.y), &a.y, self.d),
        }
    }

    /// Exact test for sigma_1(a) > 1 with sigma_1 the positive embedding.
    fn real_embedding_gt_one(&self, a: &RingElement) -> bool {
        let shifted = a.sub(&RingElement::one());
        if shifted.is_zero() {
            return false;
        }
        self.real_embedding_sign(&shifted) > 0
    }

    // -- field arithmetic ---------------------------------------------------

    pub fn fmul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = BigRational::from_integer(BigInt::from(self.delta_sq.0));
        let q = BigRational::from_integer(BigInt::from(self.delta_sq.1));
        let cross = &a.x * &b.y + &a.y * &b.x;
        let yy = &a.y * &b.y;
        FieldElement { x: &a.x * &b.x + &yy * &p, y: cross + &yy * &q }
    }

    pub fn fnorm(&self, a: &FieldElement) -> BigRational {
        let (fa, fb, fc) = self.norm_form;
        let fa = BigRational::from_integer(BigInt::from(fa));
        let fb = BigRational::from_integer(BigInt::from(fb));
        let fc = BigRational::from_integer(BigInt::from(fc));
        &a.x * &a.x * fa + &a.x * &a.y * fb + &a.y * &a.y * fc
    }

    pub fn fconj(&self, a: &FieldElement) -> FieldElement {
        match self.mode {
            BasisMode::Rem1 => FieldElement { x: &a.x + &a.y, y: -&a.y },
            BasisMode::Other => FieldElement { x: a.x.clone(), y: -&a.y },
        }
    }

    pub fn finv(&self, a: &FieldElement) -> Result<FieldElement, RingError> {
        let n = self.fnorm(a);
        if n.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let c = self.fconj(a);
        Ok(FieldElement { x: c.x / n.clone(), y: c.y / n })
    }

    /// Exact quotient a/b in the fraction field.
    pub fn fdiv(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, RingError> {
        Ok(self.fmul(a, &self.finv(b)?))
    }

    // -- Euclidean structure ------------------------------------------------

    /// Division with small remainder: a = q*b + r and |N(r)| < |N(b)|.
    ///
    /// The quotient search rounds the exact field quotient coordinate-wise
    /// and then walks delta-offsets dy outward from it. For each dy the
    /// remainder norm is an integer quadratic in the rational offset dx, so
    /// the admissible dx are isolated exactly by integer square roots; for
    /// indefinite norm forms (d > 0) the solutions hug two narrow hyperbola
    /// sheets and may sit far from the rounded quotient, which a fixed
    /// scan box cannot reach.
    pub fn euclidean_divide(
        &self,
        a: &RingElement,
        b: &RingElement,
    ) -> Result<(RingElement, RingElement), RingError> {
        if b.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if !self.norm_euclidean {
            return Err(RingError::NotEuclidean(self.d));
        }
        let exact = self.fdiv(&FieldElement::from_ring(a), &FieldElement::from_ring(b))?;
        let x0 = round_nearest(&exact.x);
        let y0 = round_nearest(&exact.y);
        let target = self.norm_abs(b);

        const SHEET_CAP: i64 = 4096;
        for step in 0..=SHEET_CAP {
            for dy in [step, -step] {
                let qy = &y0 + dy;
                // with dx = 0: r0 = a - (x0 + qy*delta) * b, and then
                // N(r0 - dx*b) = N(b) dx^2 - B(r0, b) dx + N(r0)
                let q_base = RingElement { x: x0.clone(), y: qy.clone() };
                let r0 = a.sub(&self.mul(&q_base, b));
                let n_r0 = self.norm(&r0);
                let n_b = self.norm(b);
                let bilinear = self.norm(&r0.add(b)) - &n_r0 - &n_b;
                for dx in quadratic_band_candidates(&n_b, &(-bilinear), &n_r0) {
                    let q = RingElement { x: &x0 + &dx, y: qy.clone() };
                    let r = a.sub(&self.mul(&q, b));
                    if self.norm_abs(&r) < target {
                        return Ok((q, r));
                    }
                }
                if step == 0 {
                    break;
                }
            }
        }
        Err(RingError::SearchExhausted)
    }

    /// Euclidean gcd, returned as the canonical associate.
    pub fn gcd(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
        if a.is_zero() && b.is_zero() {
            return Err(RingError::BothZero);
        }
        if !self.norm_euclidean {
            return Err(RingError::NotEuclidean(self.d));
        }
        let mut u = a.clone();
        let mut v = b.clone();
        while !v.is_zero() {
            let (_, r) = self.euclidean_divide(&u, &v)?;
            u = v;
            v = r;
        }
        Ok(self.canonical_associate(&u))
    }

    /// Deterministic representative of the unit orbit of `a`.
    ///
    /// Finite unit group: the (x, y) pair that is lexicographically maximal
    /// among all unit multiples. d > 0: sign normalization only; the full
    /// orbit reduction lives with line canonicalization.
    pub fn canonical_associate(&self, a: &RingElement) -> RingElement {
        if a.is_zero() {
            return a.clone();
        }
        if self.units_finite {
            self.torsion_units()
                .iter()
                .map(|u| self.mul(u, a))
                .max_by(|p, q| (&p.x, &p.y).cmp(&(&q.x, &q.y)))
                .expect("unit list is nonempty")
        } else if a.x.is_negative() || (a.x.is_zero() && a.y.is_negative()) {
            a.neg()
        } else {
            a.clone()
        }
    }

    /// The torsion units: the full unit group when d < 0, otherwise {1, -1}.
    pub fn torsion_units(&self) -> Vec<RingElement> {
        match self.d {
            -1 => vec![
                RingElement::new(1, 0),
                RingElement::new(0, 1),
                RingElement::new(-1, 0),
                RingElement::new(0, -1),
            ],
            // powers of the sixth root of unity delta: delta^2 = delta - 1.
            -3 => vec![
                RingElement::new(1, 0),
                RingElement::new(0, 1),
                RingElement::new(-1, 1),
                RingElement::new(-1, 0),
                RingElement::new(0, -1),
                RingElement::new(1, -1),
            ],
            _ => vec![RingElement::new(1, 0), RingElement::new(-1, 0)],
        }
    }

    /// Unit group with fundamental unit found by brute force on the norm
    /// form equation N = +-1 over 0 < y <= search_bound.
    pub fn unit_group(&self, search_bound: u64) -> Result<UnitGroup, RingError> {
        let torsion = self.torsion_units();
        if self.units_finite {
            let span = if self.d == -1 || self.d == -3 { 1 } else { 0 };
            return Ok(UnitGroup {
                torsion,
                fundamental: None,
                span_modulus: BigInt::from(span),
            });
        }
        let d = BigInt::from(self.d);
        for y in 1..=search_bound {
            let y_big = BigInt::from(y);
            let mut candidates: Vec<RingElement> = Vec::new();
            for target_sign in [1i64, -1] {
                // discriminant of the norm form equation in x:
                //   Other: x^2 = d y^2 + s      -> roots +-sqrt
                //   Rem1:  x = (-y +- sqrt(d y^2 + 4 s)) / 2
                let disc = match self.mode {
                    BasisMode::Other => &d * &y_big * &y_big + target_sign,
                    BasisMode::Rem1 => &d * &y_big * &y_big + 4 * target_sign,
                };
                if disc.is_negative() {
                    continue;
                }
                let s = disc.sqrt();
                if &s * &s != disc {
                    continue;
                }
                let roots = match self.mode {
                    BasisMode::Other => vec![s.clone(), -s],
                    BasisMode::Rem1 => vec![(&s - &y_big) / 2, (-&s - &y_big) / 2],
                };
                for x in roots {
                    let c = RingElement { x, y: y_big.clone() };
                    if self.is_unit(&c) {
                        candidates.push(c);
                    }
                }
            }
            // fundamental = the unit > 1 of minimal trace at the least y.
            let fundamental = candidates
                .into_iter()
                .filter(|c| self.real_embedding_gt_one(c))
                .min_by_key(|c| self.trace(c));
            if let Some(eps) = fundamental {
                let span_modulus = eps.y.abs();
                return Ok(UnitGroup { torsion, fundamental: Some(eps), span_modulus });
            }
        }
        Err(RingError::FundamentalUnitNotFound { d: self.d, bound: search_bound })
    }

    /// All ring elements with |N| <= bound, for d < 0 (finite disc).
    /// Sorted by (x, y).
    pub fn elements_of_norm_up_to(&self, bound: u64) -> Vec<RingElement> {
        assert!(self.d < 0, "norm balls are finite only for imaginary rings");
        let (_, fb, _) = self.norm_form;
        let n = BigInt::from(bound);
        // A = 1 in both modes: (x + B y/2)^2 <= n, and the y-range comes
        // from the (positive) discriminant of the form.
        let disc = match self.mode {
            BasisMode::Rem1 => -self.d,
            BasisMode::Other => -4 * self.d,
        };
        let y_max = (4 * bound as i64 / disc).sqrt() + 1;
        let x_pad = bound.sqrt() as i64 + 1;
        let mut out = Vec::new();
        for y in -y_max..=y_max {
            let mid = -fb * y / 2;
            for x in (mid - x_pad - 2)..=(mid + x_pad + 2) {
                let c = self.el(x, y);
                if self.norm_abs(&c) <= n {
                    out.push(c);
                }
            }
        }
        out.sort();
        out
    }
}

/// Nearest integer to an exact rational, ties rounded up.
pub(crate) fn round_nearest(v: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (v + half).floor().to_integer()
}

/// Integer t with |a2 t^2 + a1 t + a0| < |a2|, a2 nonzero: the solutions
/// fill at most two short intervals pinched between the parabola shifted by
/// +-|a2|. Returns a deduplicated ascending candidate list with one unit of
/// slack on each side; callers re-verify exactly.
fn quadratic_band_candidates(a2: &BigInt, a1: &BigInt, a0: &BigInt) -> Vec<BigInt> {
    use num_integer::Integer;
    let sign = if a2.is_negative() { BigInt::from(-1) } else { BigInt::one() };
    let (a2, a1, a0) = (a2 * &sign, a1 * &sign, a0 * &sign);
    let disc_outer = &a1 * &a1 - BigInt::from(4) * &a2 * (&a0 - &a2);
    if !disc_outer.is_positive() {
        return Vec::new();
    }
    let s_outer = disc_outer.sqrt();
    let two_a2 = &a2 * 2;
    let outer_lo = (-&a1 - &s_outer).div_floor(&two_a2);
    let outer_hi = (-&a1 + &s_outer).div_floor(&two_a2);
    let disc_inner = &a1 * &a1 - BigInt::from(4) * &a2 * (&a0 + &a2);
    let mut out: Vec<BigInt> = Vec::new();
    let mut push_range = |lo: &BigInt, hi: &BigInt| {
        let mut t: BigInt = lo - 1;
        let stop: BigInt = hi + 1;
        while t <= stop {
            out.push(t.clone());
            t += 1;
        }
    };
    if disc_inner.is_positive() {
        // an excluded middle where the value drops below -|a2|
        let s_inner = disc_inner.sqrt();
        let inner_lo = (-&a1 - &s_inner).div_floor(&two_a2);
        let inner_hi = (-&a1 + &s_inner).div_floor(&two_a2);
        push_range(&outer_lo, &inner_lo);
        push_range(&inner_hi, &outer_hi);
    } else {
        push_range(&outer_lo, &outer_hi);
    }
    out.sort();
    out.dedup();
    out
}

/// Ashrafi-Vamos criterion: is the ring of integers of Q(sqrt(d))
/// additively generated by its units?
///
/// d < 0: exactly d in {-3, -1}. d > 0 with d = 1 (mod 4): d = a^2 +- 4 for
/// some integer a; otherwise d = a^2 +- 1.
pub fn generated_by_units(d: i64) -> bool {
    if d < 0 {
        return d == -1 || d == -3;
    }
    let offset = if d.rem_euclid(4) == 1 { 4 } else { 1 };
    let mut a = 0i64;
    while a * a <= d + offset {
        if a * a + offset == d || a * a - offset == d {
            return true;
        }
        a += 1;
    }
    false
}

/// One classification row per squarefree d in the range.
pub fn norm_euclidean_classification(dmin: i64, dmax: i64) -> Vec<(i64, bool, bool)> {
    let mut rows = Vec::new();
    for d in dmin..=dmax {
        if d == 0 || d == 1 || !is_squarefree(d) {
            continue;
        }
        rows.push((d, NORM_EUCLIDEAN_D.contains(&d), generated_by_units(d)));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(d: i64) -> RingDescriptor {
        make_ring(d).unwrap()
    }

    #[test]
    fn descriptor_gaussian() {
        let g = ring(-1);
        assert_eq!(g.mode, BasisMode::Other);
        assert_eq!(g.delta_sq, (-1, 0));
        assert_eq!(g.norm_form, (1, 0, 1));
        assert!(g.norm_euclidean);
        assert!(g.units_finite);
    }

    #[test]
    fn descriptor_eisenstein() {
        let e = ring(-3);
        assert_eq!(e.mode, BasisMode::Rem1);
        // delta^2 = delta - 1 for the sixth root of unity.
        assert_eq!(e.delta_sq, (-1, 1));
        assert_eq!(e.norm_form, (1, 1, 1));
        assert!(e.norm_euclidean);
    }

    #[test]
    fn descriptor_rejects_bad_d() {
        assert_eq!(make_ring(12).unwrap_err(), RingError::NotSquarefree(12));
        assert_eq!(make_ring(0).unwrap_err(), RingError::DegenerateD(0));
        assert_eq!(make_ring(1).unwrap_err(), RingError::DegenerateD(1));
        assert_eq!(make_ring(-4).unwrap_err(), RingError::NotSquarefree(-4));
    }

    #[test]
    fn norms() {
        let g = ring(-1);
        assert_eq!(g.norm(&g.el(3, 4)), BigInt::from(25));
        let e = ring(-3);
        assert_eq!(e.norm(&e.el(0, 1)), BigInt::from(1));
        let r7 = ring(7);
        assert_eq!(r7.norm(&r7.el(8, 3)), BigInt::from(1));
    }

    #[test]
    fn multiplication_rewrites_delta_squared() {
        let e = ring(-3);
        let rho = e.el(0, 1);
        // rho^2 = rho - 1, rho^3 = -1, rho^6 = 1.
        let rho2 = e.mul(&rho, &rho);
        assert_eq!(rho2, e.el(-1, 1));
        let rho3 = e.mul(&rho2, &rho);
        assert_eq!(rho3, e.el(-1, 0));
        let rho6 = e.mul(&rho3, &rho3);
        assert_eq!(rho6, e.el(1, 0));
    }

    #[test]
    fn euclidean_divide_exact() {
        let g = ring(-1);
        let (q, r) = g.euclidean_divide(&g.el(5, 0), &g.el(1, 2)).unwrap();
        assert!(r.is_zero());
        assert_eq!(g.mul(&q, &g.el(1, 2)), g.el(5, 0));
        assert_eq!(q, g.el(1, -2));
    }

    #[test]
    fn euclidean_divide_contract_7_by_2() {
        let g = ring(-1);
        let a = g.el(7, 0);
        let b = g.el(2, 0);
        let (q, r) = g.euclidean_divide(&a, &b).unwrap();
        assert_eq!(a, g.mul(&q, &b).add(&r));
        assert!(g.norm_abs(&r) < g.norm_abs(&b));
        assert!(q == g.el(3, 0) || q == g.el(4, 0));
    }

    #[test]
    fn euclidean_divide_by_unit() {
        let e = ring(-3);
        let (q, r) = e.euclidean_divide(&e.el(2, 0), &e.el(0, 1)).unwrap();
        assert!(r.is_zero());
        assert_eq!(e.mul(&q, &e.el(0, 1)), e.el(2, 0));
    }

    #[test]
    fn euclidean_divide_rejects() {
        let g = ring(-1);
        assert_eq!(
            g.euclidean_divide(&g.el(1, 0), &RingElement::zero()).unwrap_err(),
            RingError::DivisionByZero
        );
        let bad = ring(-5);
        assert_eq!(
            bad.euclidean_divide(&bad.el(7, 1), &bad.el(2, 0)).unwrap_err(),
            RingError::NotEuclidean(-5)
        );
    }

    #[test]
    fn gcd_examples() {
        let g = ring(-1);
        // 2 = -i (1+i)^2, so gcd(1+i, 2) is the class of 1+i.
        let got = g.gcd(&g.el(1, 1), &g.el(2, 0)).unwrap();
        assert_eq!(got, g.el(1, 1));
        // gcd(a, 0) = canonical associate of a.
        assert_eq!(g.gcd(&g.el(0, -3), &RingElement::zero()).unwrap(), g.el(3, 0));
        // coprime rational integers stay coprime.
        let one = g.gcd(&g.el(3, 0), &g.el(7, 0)).unwrap();
        assert!(g.is_unit(&one));
        assert_eq!(g.gcd(&RingElement::zero(), &RingElement::zero()).unwrap_err(), RingError::BothZero);
    }

    #[test]
    fn unit_tests() {
        let g = ring(-1);
        assert!(g.is_unit(&g.el(0, 1)));
        assert!(!g.is_unit(&g.el(2, 0)));
        let e = ring(-3);
        assert!(e.is_unit(&e.el(1, -1))); // rho^5 = 1 - rho
    }

    #[test]
    fn unit_group_imag() {
        let g = ring(-1);
        let ug = g.unit_group(10).unwrap();
        assert_eq!(ug.torsion.len(), 4);
        assert_eq!(ug.span_modulus, BigInt::from(1));
        assert!(ug.fundamental.is_none());

        let m2 = ring(-2);
        let ug = m2.unit_group(10).unwrap();
        assert_eq!(ug.torsion, vec![m2.el(1, 0), m2.el(-1, 0)]);
        assert_eq!(ug.span_modulus, BigInt::from(0));

        let e = ring(-3);
        assert_eq!(e.unit_group(10).unwrap().torsion.len(), 6);
    }

    #[test]
    fn fundamental_unit_d7() {
        let r7 = ring(7);
        // exhaustive check below the found y: no unit with 0 < y < 3.
        for y in 1..3i64 {
            for x in -30..=30i64 {
                assert!(!r7.is_unit(&r7.el(x, y)), "unexpected unit {x}+{y}d");
            }
        }
        let ug = r7.unit_group(10).unwrap();
        assert_eq!(ug.fundamental.unwrap(), r7.el(8, 3));
        assert_eq!(ug.span_modulus, BigInt::from(3));
    }

    #[test]
    fn fundamental_unit_d5_is_golden_ratio() {
        let r5 = ring(5);
        let ug = r5.unit_group(10).unwrap();
        assert_eq!(ug.fundamental.unwrap(), r5.el(0, 1));
        assert_eq!(ug.span_modulus, BigInt::from(1));
    }

    #[test]
    fn unit_search_bound_exhausts() {
        let r73 = ring(73);
        assert_eq!(
            r73.unit_group(5).unwrap_err(),
            RingError::FundamentalUnitNotFound { d: 73, bound: 5 }
        );
        let ug = r73.unit_group(DEFAULT_UNIT_SEARCH_BOUND).unwrap();
        assert_eq!(ug.fundamental.unwrap(), r73.el(943, 250));
    }

    #[test]
    fn generated_by_units_examples() {
        assert!(generated_by_units(2)); // 1^2 + 1
        assert!(generated_by_units(5)); // 1^2 + 4
        assert!(!generated_by_units(7));
        assert!(!generated_by_units(-2));
        assert!(generated_by_units(-1));
        assert!(generated_by_units(-3));
        assert!(!generated_by_units(17));
        assert!(generated_by_units(21)); // 5^2 - 4
    }

    #[test]
    fn classification_ranges() {
        let rows = norm_euclidean_classification(-11, -1);
        let euclid: Vec<i64> = rows.iter().filter(|r| r.1).map(|r| r.0).collect();
        assert_eq!(euclid, vec![-11, -7, -3, -2, -1]);
        let unit_gen: Vec<i64> = rows.iter().filter(|r| r.1 && r.2).map(|r| r.0).collect();
        assert_eq!(unit_gen, vec![-3, -1]);

        let rows = norm_euclidean_classification(56, 74);
        let euclid: Vec<i64> = rows.iter().filter(|r| r.1).map(|r| r.0).collect();
        assert_eq!(euclid, vec![57, 73]);
        assert!(rows.iter().filter(|r| r.1).all(|r| !r.2));

        assert!(norm_euclidean_classification(4, 4).is_empty());
    }

    #[test]
    fn norm_ball_enumeration() {
        let g = ring(-1);
        let pts = g.elements_of_norm_up_to(2);
        assert_eq!(pts.len(), 9);
        assert!(pts.contains(&g.el(1, 1)));
        assert!(!pts.contains(&g.el(2, 1)));
        let e = ring(-3);
        assert_eq!(e.elements_of_norm_up_to(1).len(), 7); // 0 and six units
    }

    #[test]
    fn surd_sign_cases() {
        use num_bigint::BigInt as B;
        assert_eq!(surd_sign(&B::from(-2), &B::from(1), 7), 1); // sqrt(7) > 2
        assert_eq!(surd_sign(&B::from(-3), &B::from(1), 7), -1); // sqrt(7) < 3
        assert_eq!(surd_sign(&B::from(3), &B::from(-1), 7), 1);
        assert_eq!(surd_sign(&B::from(0), &B::from(-2), 7), -1);
    }

    #[test]
    fn ring_element_json_uses_digit_strings() {
        let a = RingElement::new(BigInt::from(10).pow(30), -1);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"x":"1000000000000000000000000000000","y":"-1"}"#);
        let back: RingElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
