//! Exterior algebra over a finite-dimensional real inner-product space.
//!
//! Basis p-vectors are [`Blade`]s: index sets stored as a bitmask of a
//! machine word, so dimensions up to 63 are supported. Every Λ^p carries a
//! canonical ordering of its `C(d, p)` blades, lexicographic on the
//! increasing index sequence (`e0∧e1, e0∧e2, …`); matrices of operators on
//! Λ^p are always written in that ordering.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const MAX_DIM: usize = 63;

/// A basis p-vector `e_{i1} ∧ … ∧ e_{ip}` with `i1 < … < ip`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u64);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    /// Builds a blade from strictly increasing indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        let mut last = None;
        for &i in indices {
            if i >= MAX_DIM {
                return Err(Error::DegreeOverflow { degree: i + 1, dim: MAX_DIM });
            }
            if last.is_some_and(|l| l >= i) {
                return Err(Error::invalid(format!("blade indices must be strictly increasing: {indices:?}")));
            }
            last = Some(i);
            mask |= 1 << i;
        }
        Ok(Blade(mask))
    }

    /// Sorts an arbitrary index list, returning the sign of the sorting
    /// permutation with the blade, or `None` if an index repeats.
    pub fn from_unsorted(indices: &[usize]) -> Option<(i32, Blade)> {
        let mut acc = (1, Blade::SCALAR);
        for &i in indices {
            let e = Blade(1 << i);
            let s = acc.1.wedge_sign(e)?;
            acc = (acc.0 * s, Blade(acc.1 .0 | e.0));
        }
        Some(acc)
    }

    pub const fn from_mask(mask: u64) -> Self {
        Blade(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub const fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut m = self.0;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }

    /// The blade on the complementary index set in dimension `d`.
    pub fn complement(self, d: usize) -> Blade {
        Blade(!self.0 & full_mask(d))
    }

    /// Sign of `self ∧ other` relative to the sorted blade, `None` when the
    /// index sets overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<i32> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each index j of `other` must move past the indices of `self` above j.
        let mut swaps = 0u32;
        let mut m = other.0;
        while m != 0 {
            let j = m.trailing_zeros();
            swaps += (self.0 >> j).count_ones();
            m &= m - 1;
        }
        Some(if swaps % 2 == 0 { 1 } else { -1 })
    }
}

/// Lexicographic order on the increasing index sequence, lower degree first.
impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("e{i}")).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

pub(crate) fn full_mask(d: usize) -> u64 {
    if d >= 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of a permutation given as a sequence of distinct integers.
pub fn permutation_sign(seq: &[usize]) -> i32 {
    let inversions = (0..seq.len()).flat_map(|i| (i + 1..seq.len()).map(move |j| (i, j))).filter(|&(i, j)| seq[i] > seq[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Canonically ordered blades of Λ^p(ℝ^d) with a reverse lookup table.
#[derive(Clone, Debug)]
pub struct BladeBasis {
    dim: usize,
    degree: usize,
    blades: Vec<Blade>,
    index: HashMap<Blade, usize>,
}

impl BladeBasis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DegreeOverflow { degree: dim, dim: MAX_DIM });
        }
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let blades: Vec<Blade> = (0..dim)
            .combinations(degree)
            .map(|c| Blade(c.iter().fold(0u64, |m, &i| m | 1 << i)))
            .collect();
        let index = blades.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Ok(BladeBasis { dim, degree, blades, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.blades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blades.is_empty()
    }

    pub fn blades(&self) -> &[Blade] {
        &self.blades
    }

    pub fn blade(&self, i: usize) -> Blade {
        self.blades[i]
    }

    pub fn position(&self, b: Blade) -> Option<usize> {
        self.index.get(&b).copied()
    }
}

/// Position of `e_i ∧ e_j` (`i < j`) in the canonical ordering of Λ²(ℝ^d).
pub fn pair_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * (2 * d - i - 1) / 2 + (j - i - 1)
}

/// A homogeneous p-vector: a sparse combination of degree-p blades.
#[derive(Clone, PartialEq)]
pub struct PVector<S> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Blade, S>,
}

impl<S: Scalar> PVector<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PVector { dim, degree, terms: BTreeMap::new() }
    }

    /// The degree-0 unit.
    pub fn unit(dim: usize) -> Self {
        Self::blade(dim, Blade::SCALAR, S::one())
    }

    pub fn blade(dim: usize, blade: Blade, coeff: S) -> Self {
        let mut v = Self::zero(dim, blade.degree());
        v.add_term(blade, coeff);
        v
    }

    /// Basis blade from strictly increasing indices.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let b = Blade::from_indices(indices)?;
        if indices.last().is_some_and(|&i| i >= dim) {
            return Err(Error::DegreeOverflow { degree: indices.len(), dim });
        }
        Ok(Self::blade(dim, b, S::one()))
    }

    /// A 1-vector from its coordinates.
    pub fn from_vector(coords: &[S]) -> Self {
        let dim = coords.len();
        let mut v = Self::zero(dim, 1);
        for (i, c) in coords.iter().enumerate() {
            v.add_term(Blade(1 << i), c.clone());
        }
        v
    }

    /// `v1 ∧ … ∧ vk` for coordinate vectors of a common dimension.
    pub fn wedge_of(dim: usize, vectors: &[Vec<S>]) -> Result<Self> {
        let mut acc = Self::unit(dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            acc = wedge(&acc, &Self::from_vector(v))?;
        }
        Ok(acc)
    }

    pub fn from_coefficients(basis: &BladeBasis, coeffs: &[S]) -> Self {
        let mut v = Self::zero(basis.dim(), basis.degree());
        for (b, c) in basis.blades().iter().zip(coeffs) {
            v.add_term(*b, c.clone());
        }
        v
    }

    /// Dense coefficients in the canonical ordering of `basis`.
    pub fn coefficients(&self, basis: &BladeBasis) -> Vec<S> {
        debug_assert_eq!(basis.degree(), self.degree);
        let mut out = vec![S::zero(); basis.len()];
        for (b, c) in &self.terms {
            out[basis.position(*b).expect("blade outside basis")] = c.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, b: Blade) -> S {
        self.terms.get(&b).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, b: Blade, coeff: S) {
        debug_assert_eq!(b.degree(), self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&b) {
            Some(c) => {
                let sum = c.clone() + coeff;
                if sum.is_zero() {
                    self.terms.remove(&b);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(b, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, c.clone() * k.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.degree == other.degree
            && self.terms.keys().chain(other.terms.keys()).all(|b| self.get(*b).approx_eq(&other.get(*b), tol))
    }

    pub fn to_f64(&self) -> PVector<f64> {
        PVector {
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|(b, c)| (*b, c.to_f64())).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: other.degree });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for PVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("{}·{b}", c.to_repr())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exterior product. Fails when the degrees add up past the dimension.
pub fn wedge<S: Scalar>(a: &PVector<S>, b: &PVector<S>) -> Result<PVector<S>> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Err(Error::DegreeOverflow { degree, dim: a.dim });
    }
    let mut out = PVector::zero(a.dim, degree);
    for (ba, ca) in &a.terms {
        for (bb, cb) in &b.terms {
            if let Some(s) = ba.wedge_sign(*bb) {
                let c = ca.clone() * cb.clone();
                out.add_term(Blade(ba.0 | bb.0), if s > 0 { c } else { -c });
            }
        }
    }
    Ok(out)
}

/// A metric on ℝ^d together with an orientation sign.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricFrame<S> {
    dim: usize,
    metric: Matrix<S>,
    orientation: i8,
    /// Diagonal signs when the metric is diagonal with entries ±1.
    signs: Option<Vec<i8>>,
}

impl<S: Scalar> MetricFrame<S> {
    /// Validates symmetry and nondegeneracy.
    pub fn new(metric: Matrix<S>, orientation: i8) -> Result<Self> {
        if !metric.is_square() {
            return Err(Error::invalid("metric must be square"));
        }
        if metric.nrows() > MAX_DIM {
            return Err(Error::DegreeOverflow { degree: metric.nrows(), dim: MAX_DIM });
        }
        if !metric.is_symmetric(1e-12) {
            return Err(Error::invalid("metric must be symmetric"));
        }
        if metric.determinant()?.is_negligible(1e-12) {
            return Err(Error::DegenerateMetric);
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::invalid("orientation must be +1 or -1"));
        }
        let d = metric.nrows();
        let diag_pm1 = (0..d).all(|i| {
            (0..d).all(|j| {
                let v = &metric[(i, j)];
                if i == j {
                    *v == S::one() || *v == -S::one()
                } else {
                    v.is_zero()
                }
            })
        });
        let signs = diag_pm1.then(|| (0..d).map(|i| if metric[(i, i)] == S::one() { 1 } else { -1 }).collect());
        Ok(MetricFrame { dim: d, metric, orientation, signs })
    }

    /// The standard oriented Euclidean frame on ℝ^d.
    pub fn euclidean(d: usize) -> Self {
        Self::new(Matrix::identity(d), 1).expect("identity metric is valid")
    }

    /// Diagonal metric with entries ±1.
    pub fn diagonal_signs(signs: &[i8]) -> Result<Self> {
        let d = signs.len();
        let m = Matrix::from_fn(d, d, |i, j| if i == j { S::from_i64(signs[i] as i64) } else { S::zero() });
        Self::new(m, 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Matrix<S> {
        &self.metric
    }

    pub fn g(&self, i: usize, j: usize) -> &S {
        &self.metric[(i, j)]
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn is_orthonormal_diagonal(&self) -> bool {
        self.signs.is_some()
    }

    /// Orthonormal, positive definite, positively oriented.
    pub fn is_euclidean(&self) -> bool {
        self.orientation == 1 && self.signs.as_ref().is_some_and(|s| s.iter().all(|&x| x == 1))
    }

    pub fn require_euclidean(&self, what: &str) -> Result<()> {
        if self.is_euclidean() {
            Ok(())
        } else {
            Err(Error::unsupported(format!("{what} requires an oriented Euclidean orthonormal frame")))
        }
    }

    pub fn inverse_metric(&self) -> Result<Matrix<S>> {
        self.metric.inverse()
    }

    /// The metric scaled by a constant factor (orientation kept).
    pub fn scaled(&self, k: &S) -> Result<Self> {
        Self::new(self.metric.scale(k), self.orientation)
    }

    pub fn to_f64(&self) -> MetricFrame<f64> {
        MetricFrame::new(self.metric.to_f64(), self.orientation).expect("valid metric stays valid")
    }

    /// `⟨e_I, e_J⟩ = det[g(e_i, e_j)]_{i∈I, j∈J}`.
    pub fn blade_gram(&self, a: Blade, b: Blade) -> S {
        if a.degree() != b.degree() {
            return S::zero();
        }
        if let Some(signs) = &self.signs {
            if a != b {
                return S::zero();
            }
            let neg = a.indices().iter().filter(|&&i| signs[i] < 0).count();
            return if neg % 2 == 0 { S::one() } else { -S::one() };
        }
        let (ia, ib) = (a.indices(), b.indices());
        let sub = Matrix::from_fn(ia.len(), ib.len(), |r, c| self.metric[(ia[r], ib[c])].clone());
        sub.determinant().expect("square minor")
    }

    /// Gram matrix of Λ^p in the canonical blade ordering.
    pub fn gram_matrix(&self, basis: &BladeBasis) -> Matrix<S> {
        let n = basis.len();
        Matrix::from_fn(n, n, |i, j| self.blade_gram(basis.blade(i), basis.blade(j)))
    }
}

/// The metric-induced inner product on Λ^p.
pub fn gram_inner<S: Scalar>(a: &PVector<S>, b: &PVector<S>, mf: &MetricFrame<S>) -> Result<S> {
    if a.degree != b.degree {
        return Err(Error::DegreeMismatch { left: a.degree, right: b.degree });
    }
    if a.dim != mf.dim || b.dim != mf.dim {
        return Err(Error::DimensionMismatch { expected: mf.dim, found: a.dim.max(b.dim) });
    }
    let mut acc = S::zero();
    for (ba, ca) in &a.terms {
        for (bb, cb) in &b.terms {
            let g = mf.blade_gram(*ba, *bb);
            if !g.is_zero() {
                acc = acc + ca.clone() * cb.clone() * g;
            }
        }
    }
    Ok(acc)
}

/// Sign with which `*e_I = sign · e_{I^c}` on an oriented Euclidean frame.
pub fn star_sign(b: Blade, d: usize) -> i32 {
    b.wedge_sign(b.complement(d)).expect("disjoint by construction")
}

/// Hodge star on an oriented Euclidean orthonormal frame, defined by
/// `ξ ∧ *η = ⟨ξ, η⟩ e0∧…∧e(d-1)`.
pub fn hodge_star<S: Scalar>(a: &PVector<S>, mf: &MetricFrame<S>) -> Result<PVector<S>> {
    mf.require_euclidean("the Hodge star")?;
    if a.dim != mf.dim {
        return Err(Error::DimensionMismatch { expected: mf.dim, found: a.dim });
    }
    let d = mf.dim;
    let mut out = PVector::zero(d, d - a.degree);
    for (b, c) in &a.terms {
        let s = star_sign(*b, d);
        out.add_term(b.complement(d), if s > 0 { c.clone() } else { -c.clone() });
    }
    Ok(out)
}

/// The star as a signed permutation of the canonical blades of Λ^p:
/// `*basis[i] = sign[i] · basis'[target[i]]` where `basis'` is Λ^(d-p).
#[derive(Clone, Debug)]
pub struct StarPairing {
    pub target: Vec<usize>,
    pub sign: Vec<i32>,
}

pub fn star_pairing(d: usize, p: usize) -> Result<StarPairing> {
    let from = BladeBasis::new(d, p)?;
    let to = BladeBasis::new(d, d - p)?;
    let (target, sign) = from
        .blades()
        .iter()
        .map(|b| (to.position(b.complement(d)).expect("complement exists"), star_sign(*b, d)))
        .unzip();
    Ok(StarPairing { target, sign })
}

/// Matrix of `*: Λ^p → Λ^(d-p)` in the canonical orderings (Euclidean frame).
pub fn hodge_matrix<S: Scalar>(d: usize, p: usize) -> Result<Matrix<S>> {
    let pairing = star_pairing(d, p)?;
    let mut m = Matrix::zeros(binomial(d, d - p), binomial(d, p));
    for (col, (&row, &s)) in pairing.target.iter().zip(&pairing.sign).enumerate() {
        m[(row, col)] = S::from_i64(s as i64);
    }
    Ok(m)
}

/// Middle-degree Hodge star matrix in the canonical blade ordering.
///
/// In lexicographic order the complement of the k-th blade is the
/// (N-1-k)-th, so the matrix is a signed antidiagonal. Reordering to the
/// adapted basis of [`adapted_middle_basis`] turns it into `[[0, I], [I, 0]]`.
pub fn star_matrix<S: Scalar>(d: usize, p: usize) -> Result<Matrix<S>> {
    if 2 * p != d {
        return Err(Error::invalid(format!("star_matrix needs p = d/2, got d={d}, p={p}")));
    }
    hodge_matrix(d, p)
}

/// Adapted middle-degree basis: the blades containing `e0` (in canonical
/// order) followed by their stars. Returned as the change-of-basis matrix
/// whose columns are the new basis vectors in canonical coordinates.
pub fn adapted_middle_basis<S: Scalar>(d: usize) -> Result<Matrix<S>> {
    if d % 2 != 0 {
        return Err(Error::invalid("middle degree needs even dimension"));
    }
    let p = d / 2;
    let basis = BladeBasis::new(d, p)?;
    let n = basis.len();
    let half = n / 2;
    let mut q = Matrix::zeros(n, n);
    for (k, b) in basis.blades().iter().take(half).enumerate() {
        debug_assert!(b.contains(0));
        q[(k, k)] = S::one();
        let c = basis.position(b.complement(d)).expect("complement");
        q[(c, k + half)] = S::from_i64(star_sign(*b, d) as i64);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn e(d: usize, idx: &[usize]) -> PVector<Q> {
        PVector::basis(d, idx).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(4, &[0, 1]), &e(4, &[2, 3])).unwrap(), e(4, &[0, 1, 2, 3]));
        assert_eq!(wedge(&e(4, &[1]), &e(4, &[0])).unwrap(), e(4, &[0, 1]).scale(&q(-1)));
        assert!(wedge(&e(4, &[0, 1]), &e(4, &[1, 2])).unwrap().is_zero());
        assert!(matches!(wedge(&e(4, &[0, 1, 2]), &e(4, &[2, 3])), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn gram_inner_examples() {
        let mf = MetricFrame::<Q>::euclidean(4);
        assert_eq!(gram_inner(&e(4, &[0, 1]), &e(4, &[0, 1]), &mf).unwrap(), q(1));
        assert_eq!(gram_inner(&e(4, &[0, 1]), &e(4, &[0, 2]), &mf).unwrap(), q(0));
        let u = PVector::from_vector(&[q(1), q(1), q(0), q(0)]);
        let v = PVector::from_vector(&[q(0), q(1), q(1), q(0)]);
        let uv = wedge(&u, &v).unwrap();
        assert_eq!(gram_inner(&uv, &uv, &mf).unwrap(), q(3));
        assert!(matches!(gram_inner(&e(4, &[0]), &uv, &mf), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn hodge_star_examples() {
        let mf4 = MetricFrame::<Q>::euclidean(4);
        assert_eq!(hodge_star(&e(4, &[0, 1]), &mf4).unwrap(), e(4, &[2, 3]));
        let s = hodge_star(&e(4, &[0, 2]), &mf4).unwrap();
        assert_eq!(s, e(4, &[1, 3]).scale(&q(-1)));
        assert_eq!(hodge_star(&s, &mf4).unwrap(), e(4, &[0, 2]));
        let mf8 = MetricFrame::<Q>::euclidean(8);
        assert_eq!(hodge_star(&e(8, &[0, 1, 2, 3]), &mf8).unwrap(), e(8, &[4, 5, 6, 7]));
    }

    #[test]
    fn hodge_star_rejects_lorentzian() {
        let mf = MetricFrame::<Q>::diagonal_signs(&[-1, 1, 1, 1]).unwrap();
        assert!(matches!(hodge_star(&e(4, &[0, 1]), &mf), Err(Error::Unsupported(_))));
    }

    #[test]
    fn star_matrix_d4() {
        let s: Matrix<Q> = star_matrix(4, 2).unwrap();
        // canonical order: 01 02 03 12 13 23
        let expected = [(0, 5, 1), (1, 4, -1), (2, 3, 1), (3, 2, 1), (4, 1, -1), (5, 0, 1)];
        for (col, row, sign) in expected {
            assert_eq!(s[(row, col)], q(sign));
        }
        assert_eq!(s.transpose(), s);
        assert!(star_matrix::<Q>(4, 1).is_err());
    }

    #[test]
    fn star_matrix_squares_to_identity() {
        for d in [4, 8, 12] {
            let s: Matrix<Q> = star_matrix(d, d / 2).unwrap();
            assert_eq!(s.mul(&s).unwrap(), Matrix::identity(s.nrows()), "d={d}");
            assert_eq!(s.transpose(), s);
        }
    }

    #[test]
    fn adapted_basis_block_form() {
        for d in [4, 8] {
            let s: Matrix<Q> = star_matrix(d, d / 2).unwrap();
            let qm: Matrix<Q> = adapted_middle_basis(d).unwrap();
            let block = qm.transpose().mul(&s).unwrap().mul(&qm).unwrap();
            let n = block.nrows();
            let h = n / 2;
            let expected = Matrix::from_fn(n, n, |i, j| if (i + h == j) || (j + h == i) { q(1) } else { q(0) });
            assert_eq!(block, expected, "d={d}");
        }
    }

    #[test]
    fn wedge_with_star_gives_inner_product_volume() {
        for d in [4, 6] {
            let mf = MetricFrame::<Q>::euclidean(d);
            let basis = BladeBasis::new(d, d / 2).unwrap();
            let vol = PVector::basis(d, &(0..d).collect::<Vec<_>>()).unwrap();
            for &a in basis.blades() {
                for &b in basis.blades() {
                    let xi = PVector::blade(d, a, q(1));
                    let eta = PVector::blade(d, b, q(1));
                    let lhs = wedge(&xi, &hodge_star(&eta, &mf).unwrap()).unwrap();
                    let rhs = vol.scale(&gram_inner(&xi, &eta, &mf).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn blade_order_is_lexicographic() {
        let basis = BladeBasis::new(5, 3).unwrap();
        let mut sorted = basis.blades().to_vec();
        sorted.sort();
        assert_eq!(sorted, basis.blades());
        assert_eq!(basis.blade(0).indices(), vec![0, 1, 2]);
        assert_eq!(basis.blade(9).indices(), vec![2, 3, 4]);
        for i in 0..5 {
            for j in i + 1..5 {
                let b = BladeBasis::new(5, 2).unwrap();
                assert_eq!(b.position(Blade::from_indices(&[i, j]).unwrap()), Some(pair_index(5, i, j)));
            }
        }
    }

    #[test]
    fn unsorted_sign() {
        assert_eq!(Blade::from_unsorted(&[2, 0, 1]).unwrap().0, 1);
        assert_eq!(Blade::from_unsorted(&[1, 0]).unwrap().0, -1);
        assert!(Blade::from_unsorted(&[1, 1]).is_none());
    }

    #[test]
    fn lorentzian_blade_gram() {
        let mf = MetricFrame::<Q>::diagonal_signs(&[-1, 1, 1]).unwrap();
        assert_eq!(mf.blade_gram(Blade::from_indices(&[0, 1]).unwrap(), Blade::from_indices(&[0, 1]).unwrap()), q(-1));
        let g = Matrix::from_rows(vec![vec![q(0), q(1), q(0)], vec![q(1), q(0), q(0)], vec![q(0), q(0), q(1)]]).unwrap();
        let mf = MetricFrame::new(g, 1).unwrap();
        assert!(!mf.is_orthonormal_diagonal());
        assert_eq!(mf.blade_gram(Blade::from_indices(&[0, 1]).unwrap(), Blade::from_indices(&[0, 1]).unwrap()), q(-1));
    }
}
