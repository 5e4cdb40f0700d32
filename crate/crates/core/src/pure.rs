//! Pure curvature operators, i.e. operators diagonal on the blades
//! `e_i∧e_j` of an orthonormal frame, described by their eigenvalue table
//! `λ_ij`.
//!
//! On such a tensor `Ĉ_{2n}(e_I) = haf(λ|_I)/(2n−1)!! · e_I`, so star
//! commutation in dimension `4n` reduces to `haf(I) = haf(I^c)` over the
//! complementary pairs of `2n`-subsets.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::curvature::{kulkarni_nomizu, ricci, CurvatureTensor, SymmetricTwoTensor};
use crate::error::{Error, Result};
use crate::exterior::{binomial, wedge, Blade, BladeBasis, MetricFrame, PVector};
use crate::matrix::{rank_f64, Matrix};
use crate::scalar::Scalar;
use crate::thorpe::{commutes_with_star, thorpe_operator};

/// Symmetric table `λ_ij` with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTable<S> {
    values: Matrix<S>,
}

impl<S: Scalar> LambdaTable<S> {
    pub fn new(values: Matrix<S>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::invalid("λ-table must be square"));
        }
        if !values.is_symmetric(0.0) {
            return Err(Error::invalid("λ-table must be symmetric"));
        }
        if let Some(i) = (0..values.nrows()).find(|&i| !values[(i, i)].is_zero()) {
            return Err(Error::invalid(format!("λ-table diagonal entry {i} must be zero")));
        }
        Ok(LambdaTable { values })
    }

    /// Builds the table from `f(i, j)` for `i < j`.
    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut values = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i + 1..d {
                let v = f(i, j);
                values[(i, j)] = v.clone();
                values[(j, i)] = v;
            }
        }
        LambdaTable { values }
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.values[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.values
    }

    /// The pure tensor on the Euclidean frame with `R(e_i,e_j,e_i,e_j) = λ_ij`.
    pub fn to_tensor(&self) -> CurvatureTensor<S> {
        let d = self.dim();
        let basis = BladeBasis::new(d, 2).expect("valid dimension");
        let n = basis.len();
        let diag: Vec<S> = basis.blades().iter().map(|b| {
            let ix = b.indices();
            self.values[(ix[0], ix[1])].clone()
        }).collect();
        let m = Matrix::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { S::zero() });
        CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(d), m).expect("diagonal is symmetric")
    }

    /// Reads the table off a tensor that is pure in its (orthonormal) frame.
    pub fn from_pure_tensor(rm: &CurvatureTensor<S>) -> Result<Self> {
        if !is_pure_in_frame(rm)? {
            return Err(Error::invalid("tensor is not pure in its frame"));
        }
        Ok(Self::from_fn(rm.dim(), |i, j| rm.get(i, j, i, j)))
    }
}

/// Hafnians of principal submatrices, memoized by index bitmask.
pub struct Hafnian<'a, S> {
    table: &'a LambdaTable<S>,
    memo: HashMap<u64, S>,
}

impl<'a, S: Scalar> Hafnian<'a, S> {
    pub fn new(table: &'a LambdaTable<S>) -> Self {
        Hafnian { table, memo: HashMap::new() }
    }

    pub fn of_blade(&mut self, b: Blade) -> Result<S> {
        if b.degree() % 2 != 0 {
            return Err(Error::invalid(format!("hafnian needs an even index set, got {} indices", b.degree())));
        }
        if b.indices().last().is_some_and(|&i| i >= self.table.dim()) {
            return Err(Error::DimensionMismatch { expected: self.table.dim(), found: b.indices().len() });
        }
        Ok(self.of_mask(b.mask()))
    }

    fn of_mask(&mut self, mask: u64) -> S {
        if mask == 0 {
            return S::one();
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut acc = S::zero();
        let mut m = rest;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            let lij = self.table.get(i, j).clone();
            if !lij.is_zero() {
                acc = acc + lij * self.of_mask(rest & !(1 << j));
            }
        }
        self.memo.insert(mask, acc.clone());
        acc
    }
}

/// Sum over the perfect matchings of `indices` of the products of matched
/// table entries.
pub fn hafnian<S: Scalar>(table: &LambdaTable<S>, indices: &[usize]) -> Result<S> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let b = Blade::from_indices(&sorted)?;
    Hafnian::new(table).of_blade(b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairEntry<S> {
    pub subset: Vec<usize>,
    pub complement: Vec<usize>,
    pub value: S,
    pub complement_value: S,
    pub pass: bool,
}

/// Outcome of a criterion evaluated on every complementary pair of
/// half-size subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport<S> {
    pub dim: usize,
    pub pairs: Vec<PairEntry<S>>,
    pub pass: bool,
}

impl<S: Scalar> CriterionReport<S> {
    pub fn failures(&self) -> impl Iterator<Item = &PairEntry<S>> {
        self.pairs.iter().filter(|p| !p.pass)
    }
}

/// The half-size subsets containing index 0, in canonical order. Each is
/// lexicographically smaller than its complement, so every complementary
/// pair appears exactly once.
pub fn complementary_subsets(d: usize) -> Result<Vec<Blade>> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::invalid(format!("complementary pairs need positive even dimension, got {d}")));
    }
    let basis = BladeBasis::new(d, d / 2)?;
    Ok(basis.blades()[..basis.len() / 2].to_vec())
}

fn criterion_report<S: Scalar>(d: usize, tol: f64, eval: impl Fn(Blade) -> S + Sync) -> Result<CriterionReport<S>> {
    let subsets = complementary_subsets(d)?;
    let pairs: Vec<PairEntry<S>> = subsets
        .par_iter()
        .map(|&b| {
            let c = b.complement(d);
            let (value, complement_value) = (eval(b), eval(c));
            let pass = value.approx_eq(&complement_value, tol);
            PairEntry { subset: b.indices(), complement: c.indices(), value, complement_value, pass }
        })
        .collect();
    let pass = pairs.iter().all(|p| p.pass);
    Ok(CriterionReport { dim: d, pairs, pass })
}

fn require_multiple_of_four(d: usize) -> Result<()> {
    if d == 0 || d % 4 != 0 {
        return Err(Error::invalid(format!("dimension must be a positive multiple of 4, got {d}")));
    }
    Ok(())
}

/// `haf(I) = haf(I^c)` for every `2n`-subset `I`, `d = 4n`.
pub fn pure_commute_check<S: Scalar>(table: &LambdaTable<S>, tol: f64) -> Result<CriterionReport<S>> {
    let d = table.dim();
    require_multiple_of_four(d)?;
    criterion_report(d, tol, |b| Hafnian::new(table).of_blade(b).expect("even subset"))
}

/// `λ_ij = a_i + a_j`.
pub fn additive_table<S: Scalar>(a: &[S]) -> LambdaTable<S> {
    LambdaTable::from_fn(a.len(), |i, j| a[i].clone() + a[j].clone())
}

/// `λ_ij = a_i·a_j`.
pub fn multiplicative_table<S: Scalar>(a: &[S]) -> LambdaTable<S> {
    LambdaTable::from_fn(a.len(), |i, j| a[i].clone() * a[j].clone())
}

/// `P⧄g` with `P = diag(−a)`: a Weyl-free tensor whose Λ²-eigenvalues are
/// `a_i + a_j`.
pub fn lcf_curvature<S: Scalar>(a: &[S]) -> Result<CurvatureTensor<S>> {
    let d = a.len();
    if d < 4 {
        return Err(Error::invalid(format!("conformally flat model needs dimension ≥ 4, got {d}")));
    }
    let frame = MetricFrame::euclidean(d);
    let neg: Vec<S> = a.iter().map(|x| -x.clone()).collect();
    kulkarni_nomizu(&SymmetricTwoTensor::diagonal(&frame, &neg)?, &SymmetricTwoTensor::metric(&frame))
}

/// Sum of all products of `k` distinct entries.
pub fn elementary_symmetric<S: Scalar>(k: usize, values: &[S]) -> Result<S> {
    if k > values.len() {
        return Err(Error::invalid(format!("degree {k} exceeds the {} values", values.len())));
    }
    let mut e = vec![S::zero(); k + 1];
    e[0] = S::one();
    for x in values {
        for j in (1..=k).rev() {
            e[j] = e[j].clone() + e[j - 1].clone() * x.clone();
        }
    }
    Ok(e.swap_remove(k))
}

fn pick<S: Scalar>(a: &[S], b: Blade) -> Vec<S> {
    b.indices().into_iter().map(|i| a[i].clone()).collect()
}

/// `s_n(a_I) = s_n(a_{I^c})` for every complementary partition, `|a| = 4n`.
pub fn lcf_partition_check<S: Scalar>(a: &[S], tol: f64) -> Result<CriterionReport<S>> {
    let d = a.len();
    require_multiple_of_four(d)?;
    let n = d / 4;
    criterion_report(d, tol, |b| elementary_symmetric(n, &pick(a, b)).expect("n ≤ 2n"))
}

/// 0/1 matrix with rows the `r`-subsets and columns the `c`-subsets of
/// `{0..N-1}` (canonical order); entry 1 iff the column subset is contained
/// in the row subset.
pub fn incidence_matrix(n: usize, r: usize, c: usize) -> Result<Vec<Vec<u8>>> {
    if !(c <= r && r <= n) {
        return Err(Error::invalid(format!("incidence matrix needs c ≤ r ≤ N, got N={n}, r={r}, c={c}")));
    }
    let rows = BladeBasis::new(n, r)?;
    let cols = BladeBasis::new(n, c)?;
    Ok(rows
        .blades()
        .iter()
        .map(|rb| cols.blades().iter().map(|cb| u8::from(cb.mask() & !rb.mask() == 0)).collect())
        .collect())
}

/// Reports for the class `c·S⧄S` with `S = diag(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeReport {
    pub zeros: usize,
    /// At least `2n+1` of the `a_i` vanish.
    pub threshold_met: bool,
    /// `Ĉ_{2n} = 0`.
    pub vanishes: bool,
    /// `Π_I a = Π_{I^c} a` for every complementary pair.
    pub product_condition: bool,
    /// `Ĉ_{2n}` commutes with the star.
    pub commutes: bool,
}

impl MultiplicativeReport {
    /// Vanishing matches the zero-count threshold, and the product
    /// condition implies commutation.
    pub fn consistent(&self) -> bool {
        self.vanishes == self.threshold_met && (!self.product_condition || self.commutes)
    }
}

pub fn multiplicative_tensor<S: Scalar>(a: &[S], c: &S) -> Result<CurvatureTensor<S>> {
    let frame = MetricFrame::euclidean(a.len());
    let s = SymmetricTwoTensor::diagonal(&frame, a)?;
    Ok(kulkarni_nomizu(&s, &s)?.scale(c))
}

pub fn multiplicative_zero_check<S: Scalar>(a: &[S], c: &S) -> Result<MultiplicativeReport> {
    let d = a.len();
    require_multiple_of_four(d)?;
    let n = d / 4;
    let zeros = a.iter().filter(|x| x.is_zero()).count();
    let op = thorpe_operator(&multiplicative_tensor(a, c)?, 2 * n)?;
    let product = |b: Blade| pick(a, b).into_iter().fold(S::one(), |acc, x| acc * x);
    let product_condition = complementary_subsets(d)?.into_iter().all(|b| product(b) == product(b.complement(d)));
    Ok(MultiplicativeReport {
        zeros,
        threshold_met: zeros > 2 * n,
        vanishes: op.is_zero_within(0.0),
        product_condition,
        commutes: commutes_with_star(&op, 0.0)?.commutes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinReport {
    /// Ricci tensor is a multiple of the metric.
    pub einstein: bool,
    /// `(p₊−1)s₊ + (p₋−1)s₋ = 0`.
    pub balance_holds: bool,
    /// The characterization: balance, equal eigenvalues, an empty block or `c = 0`.
    pub predicted: bool,
    /// Star commutation of `Ĉ_{d/2}` when `d ≡ 0 mod 4`.
    pub commutes: Option<bool>,
}

/// `c·S⧄S` for `S` with eigenvalue `s₊` of multiplicity `p₊` and `s₋` of
/// multiplicity `p₋`.
pub fn two_eigenvalue_tensor<S: Scalar>(
    s_plus: &S,
    s_minus: &S,
    p_plus: usize,
    p_minus: usize,
    c: &S,
) -> Result<CurvatureTensor<S>> {
    let diag: Vec<S> = std::iter::repeat(s_plus.clone())
        .take(p_plus)
        .chain(std::iter::repeat(s_minus.clone()).take(p_minus))
        .collect();
    multiplicative_tensor(&diag, c)
}

pub fn einstein_two_eigenvalue<S: Scalar>(
    s_plus: &S,
    s_minus: &S,
    p_plus: usize,
    p_minus: usize,
    c: &S,
) -> Result<EinsteinReport> {
    let d = p_plus + p_minus;
    if d < 2 {
        return Err(Error::invalid("need at least two dimensions"));
    }
    let rm = two_eigenvalue_tensor(s_plus, s_minus, p_plus, p_minus, c)?;
    let einstein = ricci(&rm)?.metric_multiple(0.0).is_some();
    let balance = S::from_i64(p_plus as i64 - 1) * s_plus.clone() + S::from_i64(p_minus as i64 - 1) * s_minus.clone();
    let balance_holds = balance.is_zero();
    let predicted = balance_holds || s_plus == s_minus || p_plus == 0 || p_minus == 0 || c.is_zero();
    let commutes = if d % 4 == 0 {
        Some(commutes_with_star(&thorpe_operator(&rm, d / 2)?, 0.0)?.commutes)
    } else {
        None
    };
    Ok(EinsteinReport { einstein, balance_holds, predicted, commutes })
}

/// Table of a product of two `2n`-dimensional space forms with sectional
/// curvatures `c1`, `c2`: `λ = −c` within each factor, zero across.
pub fn product_space_form_table<S: Scalar>(c1: &S, c2: &S, n: usize) -> LambdaTable<S> {
    let h = 2 * n;
    LambdaTable::from_fn(4 * n, |i, j| match (i < h, j < h) {
        (true, true) => -c1.clone(),
        (false, false) => -c2.clone(),
        _ => S::zero(),
    })
}

pub fn product_space_form_commute<S: Scalar>(c1: &S, c2: &S, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    Ok(pure_commute_check(&product_space_form_table(c1, c2, n), 0.0)?.pass)
}

/// The expected answer for nonzero curvatures: `c1 = c2` for odd `n`,
/// `c1 = ±c2` for even `n`.
pub fn product_parity_rule<S: Scalar>(c1: &S, c2: &S, n: usize) -> bool {
    c1 == c2 || (n % 2 == 0 && *c1 == -c2.clone())
}

/// Solves `a1·b1 = c1`, `a2·b2 = c2`, `a1·b2 + a2·b1 = 0`, returning
/// `(a1, a2, b1, b2)`. There is no solution when `c1·c2 > 0`.
pub fn st_factorization(c1: f64, c2: f64) -> Option<(f64, f64, f64, f64)> {
    if c1 == 0.0 {
        Some((0.0, 1.0, 0.0, c2))
    } else if c2 == 0.0 {
        Some((1.0, 0.0, c1, 0.0))
    } else if c1 * c2 < 0.0 {
        let k = (-c2 / c1).sqrt();
        Some((c1, c1 * k, 1.0, -k))
    } else {
        None
    }
}

/// Is every off-pattern component `R(e_i,e_j,e_k,e_l)`, `{i,j} ≠ {k,l}`, zero?
pub fn is_pure_in_frame<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<bool> {
    if !rm.frame().is_orthonormal_diagonal() {
        return Err(Error::unsupported("purity test needs an orthonormal frame"));
    }
    let m = rm.lambda2_matrix();
    Ok((0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].is_zero())))
}

const ALIGN_TOL: f64 = 1e-8;

fn plane_projector(xi: &PVector<f64>, d: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(d, d);
    for (b, c) in xi.terms() {
        let ix = b.indices();
        a[(ix[0], ix[1])] = *c;
        a[(ix[1], ix[0])] = -*c;
    }
    let norm2: f64 = xi.terms().map(|(_, c)| c * c).sum();
    -(&a * &a) / norm2
}

/// Looks for an orthonormal frame `{w_i}` in which every given 2-vector is
/// `±w_i∧w_j`. The input must be `C(d,2)` linearly independent decomposable
/// 2-vectors; the result holds the frame vectors as columns.
///
/// Each frame vector is the common line of two planes from the set and lies
/// in `d−1` of them, so candidate lines are the pairwise plane
/// intersections that meet at least `d−1` planes; mutually orthogonal
/// candidates are then tested against every input.
pub fn frame_alignable(blades: &[PVector<f64>]) -> Result<Option<Matrix<f64>>> {
    let Some(first) = blades.first() else {
        return Err(Error::invalid("no 2-vectors given"));
    };
    let d = first.dim();
    if d < 3 {
        return Err(Error::invalid("frame alignment needs dimension ≥ 3"));
    }
    let n = binomial(d, 2);
    if blades.len() != n {
        return Err(Error::invalid(format!("expected {n} 2-vectors, got {}", blades.len())));
    }
    let basis = BladeBasis::new(d, 2)?;
    for (k, xi) in blades.iter().enumerate() {
        if xi.degree() != 2 || xi.dim() != d {
            return Err(Error::invalid(format!("input {k} is not a 2-vector on ℝ^{d}")));
        }
        if d >= 4 && !wedge(xi, xi)?.is_negligible(ALIGN_TOL) {
            return Err(Error::invalid(format!("input {k} is not decomposable")));
        }
    }
    let coeffs = Matrix::from_fn(n, n, |r, c| blades[r].get(basis.blade(c)));
    if rank_f64(&coeffs, ALIGN_TOL) < n {
        return Err(Error::invalid("2-vectors are not linearly independent"));
    }

    let projectors: Vec<DMatrix<f64>> = blades.iter().map(|xi| plane_projector(xi, d)).collect();
    let mut lines: Vec<Vec<f64>> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let eig = SymmetricEigen::new(&projectors[a] + &projectors[b]);
            let hits: Vec<usize> = (0..d).filter(|&i| (eig.eigenvalues[i] - 2.0).abs() < 1e-6).collect();
            if hits.len() != 1 {
                continue;
            }
            let w: Vec<f64> = eig.eigenvectors.column(hits[0]).iter().copied().collect();
            if !lines.iter().any(|l| dot(l, &w).abs() > 1.0 - 1e-6) {
                lines.push(w);
            }
        }
    }
    let in_plane = |w: &[f64], proj: &DMatrix<f64>| {
        let v = DMatrix::from_column_slice(d, 1, w);
        (proj * &v - &v).norm() < 1e-6
    };
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for w in lines {
        let count = projectors.iter().filter(|p| in_plane(&w, p)).count();
        if count + 1 >= d && frame.iter().all(|f| dot(f, &w).abs() < 1e-6) {
            frame.push(w);
        }
    }
    if frame.len() != d {
        return Ok(None);
    }
    for f in &mut frame {
        let lead = f.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
    }
    frame.sort_by_key(|f| f.iter().map(|x| x.abs()).enumerate().fold((0, 0.0), |m, (i, x)| if x > m.1 + 1e-9 { (i, x) } else { m }).0);
    let pairs: Vec<PVector<f64>> = basis
        .blades()
        .iter()
        .map(|b| {
            let ix = b.indices();
            wedge(&PVector::from_vector(&frame[ix[0]]), &PVector::from_vector(&frame[ix[1]])).expect("2 ≤ d")
        })
        .collect();
    let mut used = vec![false; n];
    for xi in blades {
        let mut matched = false;
        for (k, w) in pairs.iter().enumerate() {
            if used[k] {
                continue;
            }
            if xi.approx_eq(w, 1e-6) || xi.approx_eq(&w.scale(&-1.0), 1e-6) {
                used[k] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(None);
        }
    }
    Ok(Some(Matrix::from_fn(d, d, |r, c| frame[c][r])))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A basis of Λ²(ℝ^d) made of unit decomposable 2-vectors that is not
/// `{w_i∧w_j}` for any orthonormal frame: `e0∧e_i` for `i ≥ 1` together
/// with `v_i∧v_j` for `1 ≤ i < j`, where `v1 = (e1+e2)/√2`,
/// `v2 = (e1−e2)/√2` and `v_k = e_k` otherwise.
pub fn non_frame_plane_basis(d: usize) -> Result<Vec<PVector<f64>>> {
    if d < 3 {
        return Err(Error::invalid("needs dimension ≥ 3"));
    }
    let e = |i: usize| (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = |i: usize| -> Vec<f64> {
        match i {
            1 => (0..d).map(|k| if k == 1 || k == 2 { s } else { 0.0 }).collect(),
            2 => (0..d).map(|k| if k == 1 { s } else if k == 2 { -s } else { 0.0 }).collect(),
            _ => e(i),
        }
    };
    let mut out = Vec::with_capacity(binomial(d, 2));
    for i in 1..d {
        out.push(PVector::wedge_of(d, &[e(0), e(i)])?);
    }
    for i in 1..d {
        for j in i + 1..d {
            out.push(PVector::wedge_of(d, &[v(i), v(j)])?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{decompose, raise_to_lambda2, scalar_curvature};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    /// Independent matching enumerator: lists every perfect matching.
    fn matchings(ix: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if ix.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for k in 1..ix.len() {
            let rest: Vec<usize> = ix[1..].iter().copied().filter(|&x| x != ix[k]).collect();
            for mut m in matchings(&rest) {
                m.push((ix[0], ix[k]));
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn hafnian_small_cases() {
        let t = LambdaTable::from_fn(4, |i, j| q([[0, 1, 2, 3], [0, 0, 4, 5], [0, 0, 0, 6], [0; 4]][i][j]));
        assert_eq!(hafnian(&t, &[1, 3]).unwrap(), q(5));
        assert_eq!(hafnian(&t, &[0, 1, 2, 3]).unwrap(), q(28));
        assert!(hafnian(&t, &[0, 1, 2]).is_err());
        assert_eq!(matchings(&[0, 1, 2, 3, 4, 5]).len(), 15);
    }

    #[test]
    fn commute_check_d4_is_three_equations() {
        let t = LambdaTable::from_fn(4, |i, j| q((i * 4 + j) as i64));
        let rep = pure_commute_check(&t, 0.0).unwrap();
        assert_eq!(rep.pairs.len(), 3);
        assert_eq!(rep.pairs[0].subset, vec![0, 1]);
        assert_eq!(rep.pairs[0].complement, vec![2, 3]);
        assert_eq!(rep.pairs[1].subset, vec![0, 2]);
        assert_eq!(rep.pairs[2].subset, vec![0, 3]);
        assert!(!rep.pass);
        let mult = multiplicative_table(&qs(&[1, 1, -1, -1]));
        assert_eq!(
            [mult.get(0, 1), mult.get(2, 3), mult.get(0, 2), mult.get(1, 3), mult.get(0, 3), mult.get(1, 2)],
            [&q(1), &q(1), &q(-1), &q(-1), &q(-1), &q(-1)]
        );
        assert!(pure_commute_check(&mult, 0.0).unwrap().pass);
        let add = additive_table(&qs(&[1, 2, 3, 4]));
        assert_eq!((add.get(0, 1), add.get(2, 3)), (&q(3), &q(7)));
        assert!(!pure_commute_check(&add, 0.0).unwrap().pass);
        assert!(pure_commute_check(&LambdaTable::from_fn(6, |_, _| q(1)), 0.0).is_err());
    }

    #[test]
    fn additive_witness_at_d8() {
        // A single nonzero a_i leaves every hafnian at zero.
        let mut a = vec![q(0); 8];
        a[0] = q(1);
        let rep = pure_commute_check(&additive_table(&a), 0.0).unwrap();
        assert_eq!(rep.pairs.len(), 35);
        assert!(rep.pass);
        a[1] = q(1);
        let rep = pure_commute_check(&additive_table(&a), 0.0).unwrap();
        assert!(!rep.pass);
        let w = rep.failures().next().unwrap();
        assert_eq!(w.subset, vec![0, 1, 2, 3]);
        assert_eq!((w.value.clone(), w.complement_value.clone()), (q(2), q(0)));
    }

    #[test]
    fn elementary_symmetric_values() {
        assert_eq!(elementary_symmetric(1, &qs(&[3, 4])).unwrap(), q(7));
        assert_eq!(elementary_symmetric(3, &qs(&[1; 6])).unwrap(), q(20));
        assert_eq!(elementary_symmetric(2, &qs(&[1, 2, 3, 4])).unwrap(), q(35));
        assert_eq!(elementary_symmetric(0, &qs(&[5])).unwrap(), q(1));
        assert!(elementary_symmetric(3, &qs(&[1, 2])).is_err());
    }

    #[test]
    fn partition_checks() {
        assert!(lcf_partition_check(&qs(&[2, 2, 2, 2]), 0.0).unwrap().pass);
        // At n = 1 only constant a passes: {0,2}|{1,3} forces t = −1, {0,3}|{1,2} forces t = 1.
        for t in [-3, -1, 0, 1, 5] {
            let rep = lcf_partition_check(&qs(&[1, -1, t, -t]), 0.0).unwrap();
            assert!(rep.pairs[0].pass && !rep.pass);
        }
        let rep = lcf_partition_check(&qs(&[1, 0, 0, 0]), 0.0).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.pairs[0].value, q(1));
        assert_eq!(rep.pairs[0].complement_value, q(0));
        assert!(lcf_partition_check(&qs(&[1, 2, 3]), 0.0).is_err());
    }

    #[test]
    fn incidence_examples() {
        let a = incidence_matrix(4, 2, 1).unwrap();
        let shown = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]];
        assert_eq!(a, shown.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(crate::matrix::rank_binary(&a), 4);
        let b = incidence_matrix(8, 4, 2).unwrap();
        assert_eq!((b.len(), b[0].len()), (70, 28));
        assert_eq!(crate::matrix::rank_binary(&b), 28);
        assert!(incidence_matrix(4, 1, 2).is_err());
    }

    #[test]
    fn lcf_model_properties() {
        let a = qs(&[1, -2, 3, 5]);
        let rm = lcf_curvature(&a).unwrap();
        assert!(decompose(&rm).unwrap().weyl.is_zero_within(0.0));
        assert!(is_pure_in_frame(&rm).unwrap());
        assert_eq!(LambdaTable::from_pure_tensor(&rm).unwrap(), additive_table(&a));
        let op = raise_to_lambda2(&rm).unwrap();
        assert_eq!(op.get(0, 0), &q(-1));
        assert_eq!(scalar_curvature(&rm).unwrap(), q(-2 * 3 * 7));
        let half = lcf_curvature(&qs(&[3, 3, 3, 3])).unwrap();
        assert_eq!(half, crate::curvature::constant_curvature(&MetricFrame::euclidean(4), &q(6)).unwrap());
        assert!(lcf_curvature(&qs(&[1, 2, 3])).is_err());
    }

    #[test]
    fn multiplicative_examples() {
        let r = multiplicative_zero_check(&qs(&[1, 0, 0, 0]), &q(1)).unwrap();
        assert!(r.threshold_met && r.vanishes && r.consistent());
        let r = multiplicative_zero_check(&qs(&[1, 1, 0, 0]), &q(1)).unwrap();
        assert!(!r.threshold_met && !r.vanishes && !r.product_condition && r.consistent());
        let r = multiplicative_zero_check(&qs(&[0, 0, 0, 0]), &q(1)).unwrap();
        assert!(r.vanishes && r.consistent());
        // The KN square of diag(a) has eigenvalues −2·a_i·a_j.
        let rm = multiplicative_tensor(&qs(&[1, 2, 3, 4]), &q(1)).unwrap();
        assert_eq!(rm.get(1, 2, 1, 2), q(-12));
    }

    #[test]
    fn einstein_examples() {
        let r = einstein_two_eigenvalue(&q(3), &q(-3), 4, 4, &q(1)).unwrap();
        assert!(r.einstein && r.balance_holds && r.commutes == Some(true));
        let r = einstein_two_eigenvalue(&q(1), &q(-2), 5, 3, &q(1)).unwrap();
        assert!(r.einstein && r.balance_holds);
        let r = einstein_two_eigenvalue(&q(2), &q(2), 3, 3, &q(1)).unwrap();
        assert!(r.einstein && r.predicted);
        let r = einstein_two_eigenvalue(&q(1), &q(2), 3, 3, &q(1)).unwrap();
        assert!(!r.einstein && !r.predicted);
    }

    #[test]
    fn product_space_forms_parity() {
        assert!(product_space_form_commute(&q(1), &q(1), 1).unwrap());
        assert!(!product_space_form_commute(&q(1), &q(-1), 1).unwrap());
        assert!(product_space_form_commute(&q(1), &q(-1), 2).unwrap());
        assert!(!product_space_form_commute(&q(1), &q(2), 2).unwrap());
    }

    #[test]
    fn st_factorization_cases() {
        assert_eq!(st_factorization(1.0, -1.0), Some((1.0, 1.0, 1.0, -1.0)));
        assert_eq!(st_factorization(1.0, 1.0), None);
        let (a1, a2, b1, b2) = st_factorization(0.0, 5.0).unwrap();
        assert_eq!(a1, 0.0);
        assert_eq!((a1 * b1, a2 * b2, a1 * b2 + a2 * b1), (0.0, 5.0, 0.0));
        let (a1, a2, b1, b2) = st_factorization(-3.0, 0.5).unwrap();
        assert!((a1 * b1 + 3.0).abs() < 1e-12 && (a2 * b2 - 0.5).abs() < 1e-12 && (a1 * b2 + a2 * b1).abs() < 1e-12);
    }

    #[test]
    fn frame_alignment() {
        let d = 4;
        let basis = BladeBasis::new(d, 2).unwrap();
        let std: Vec<PVector<f64>> = basis.blades().iter().map(|b| PVector::blade(d, *b, 1.0)).collect();
        let f = frame_alignable(&std).unwrap().unwrap();
        assert!(f.approx_eq(&Matrix::identity(d), 1e-9));
        assert_eq!(frame_alignable(&non_frame_plane_basis(4).unwrap()).unwrap(), None);
        assert_eq!(frame_alignable(&non_frame_plane_basis(6).unwrap()).unwrap(), None);
        let mut dup = std.clone();
        dup[1] = dup[0].clone();
        assert!(frame_alignable(&dup).is_err());
        let mut nd = std.clone();
        nd[0] = nd[0].add(&nd[5]).unwrap();
        assert!(frame_alignable(&nd).is_err());
    }

    #[test]
    fn purity_of_simple_tensors() {
        let g = crate::curvature::constant_curvature(&MetricFrame::<Q>::euclidean(5), &q(2)).unwrap();
        assert!(is_pure_in_frame(&g).unwrap());
        let mixed = CurvatureTensor::from_components(MetricFrame::euclidean(4), &[([0, 1, 0, 2], q(1))]).unwrap();
        assert!(!is_pure_in_frame(&mixed).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn hafnian_matches_enumeration(vals in prop::collection::vec(-6i64..=6, 15), size in prop::sample::select(vec![2usize, 4, 6])) {
            let mut it = vals.iter();
            let t = LambdaTable::from_fn(6, |_, _| q(*it.next().unwrap()));
            let ix: Vec<usize> = (0..size).collect();
            let brute = matchings(&ix).iter().fold(q(0), |acc, m| {
                acc + m.iter().fold(q(1), |p, &(i, j)| p * t.get(i, j).clone())
            });
            prop_assert_eq!(hafnian(&t, &ix).unwrap(), brute);
        }

        #[test]
        fn additive_criteria_agree(a in prop::collection::vec(-3i64..=3, 4)) {
            let a = qs(&a);
            prop_assert_eq!(
                pure_commute_check(&additive_table(&a), 0.0).unwrap().pass,
                lcf_partition_check(&a, 0.0).unwrap().pass
            );
        }

        #[test]
        fn table_criterion_matches_operator(vals in prop::collection::vec(-2i64..=2, 6)) {
            let mut it = vals.iter();
            let t = LambdaTable::from_fn(4, |_, _| q(*it.next().unwrap()));
            let op = thorpe_operator(&t.to_tensor(), 2).unwrap();
            prop_assert_eq!(pure_commute_check(&t, 0.0).unwrap().pass, commutes_with_star(&op, 0.0).unwrap().commutes);
        }
    }
}
