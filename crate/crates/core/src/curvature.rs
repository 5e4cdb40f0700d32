//! Algebraic curvature tensors at a point.
//!
//! A tensor is stored as the symmetric matrix `R(e_i∧e_j; e_k∧e_l)` over the
//! canonical Λ² blades (`i < j`, `k < l`), which builds in antisymmetry in
//! each pair and pair symmetry. The first Bianchi identity is a separate
//! check.
//!
//! Sign conventions used throughout the crate:
//!
//! * `(S⧄T)_ijkl = S_il T_jk + S_jk T_il − S_ik T_jl − S_jl T_ik`, so
//!   `(g⧄g)_ijij = −2` on an orthonormal frame.
//! * `λ_ij = R(e_i, e_j, e_i, e_j)` is the Λ²-eigenvalue of a pure tensor and
//!   sectional curvature is `−λ_ij`.
//! * `Ric(e_j, e_k) = −Σ g^{ab} R(e_a, e_j, e_b, e_k)`.
//! * `R = W + P⧄g` with Schouten `P = (Ric − scal/(2(d−1)) g)/(d−2)`.

use crate::error::{Error, Result};
use crate::exterior::{binomial, pair_index, BladeBasis, MetricFrame};
use crate::matrix::Matrix;
use crate::operator::{induced_matrix, OperatorMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor<S> {
    frame: MetricFrame<S>,
    rmat: Matrix<S>,
}

/// Sorts `(i, j)` to `i < j`, returning the sign, or `None` when `i == j`.
fn ordered(i: usize, j: usize) -> Option<(bool, usize, usize)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Some((false, i, j)),
        std::cmp::Ordering::Greater => Some((true, j, i)),
        std::cmp::Ordering::Equal => None,
    }
}

impl<S: Scalar> CurvatureTensor<S> {
    pub fn zero(frame: MetricFrame<S>) -> Self {
        let n = binomial(frame.dim(), 2);
        CurvatureTensor { frame, rmat: Matrix::zeros(n, n) }
    }

    /// From the symmetric matrix `R(B_i; B_j)` over canonical 2-blades.
    pub fn from_lambda2_matrix(frame: MetricFrame<S>, rmat: Matrix<S>) -> Result<Self> {
        let n = binomial(frame.dim(), 2);
        if rmat.nrows() != n || rmat.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rmat.nrows() });
        }
        if !rmat.is_symmetric(0.0) {
            return Err(Error::Inconsistent("curvature matrix on Λ² must be symmetric".into()));
        }
        Ok(CurvatureTensor { frame, rmat })
    }

    /// Builds a tensor from a list of components, completing by symmetry.
    /// Components that disagree with an earlier one under the symmetries are
    /// rejected.
    pub fn from_components(frame: MetricFrame<S>, comps: &[([usize; 4], S)]) -> Result<Self> {
        let d = frame.dim();
        let n = binomial(d, 2);
        let mut rmat = Matrix::zeros(n, n);
        let mut seen = vec![None::<[usize; 4]>; n * n];
        for (idx, v) in comps {
            let [i, j, k, l] = *idx;
            if let Some(&bad) = idx.iter().find(|&&x| x >= d) {
                return Err(Error::invalid(format!("component index {bad} out of range for dimension {d}")));
            }
            let (Some((s1, a, b)), Some((s2, c, e))) = (ordered(i, j), ordered(k, l)) else {
                if v.is_zero() {
                    continue;
                }
                return Err(Error::Inconsistent(format!("component {idx:?} must vanish by antisymmetry")));
            };
            let val = if s1 != s2 { -v.clone() } else { v.clone() };
            let (r, c) = (pair_index(d, a, b), pair_index(d, c, e));
            let (r, c) = (r.min(c), r.max(c));
            match seen[r * n + c] {
                Some(prev) if rmat[(r, c)] != val => {
                    return Err(Error::Inconsistent(format!(
                        "component {idx:?} conflicts with {prev:?} under the curvature symmetries"
                    )));
                }
                _ => {
                    seen[r * n + c] = Some(*idx);
                    rmat[(r, c)] = val.clone();
                    rmat[(c, r)] = val;
                }
            }
        }
        Ok(CurvatureTensor { frame, rmat })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn frame(&self) -> &MetricFrame<S> {
        &self.frame
    }

    /// `R(e_i∧e_j; e_k∧e_l)` over canonical 2-blades.
    pub fn lambda2_matrix(&self) -> &Matrix<S> {
        &self.rmat
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> S {
        let d = self.dim();
        match (ordered(i, j), ordered(k, l)) {
            (Some((s1, a, b)), Some((s2, c, e))) => {
                let v = self.rmat[(pair_index(d, a, b), pair_index(d, c, e))].clone();
                if s1 != s2 {
                    -v
                } else {
                    v
                }
            }
            _ => S::zero(),
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: S) {
        let d = self.dim();
        let (Some((s1, a, b)), Some((s2, c, e))) = (ordered(i, j), ordered(k, l)) else {
            panic!("set on a diagonal pair");
        };
        let v = if s1 != s2 { -v } else { v };
        let (r, c) = (pair_index(d, a, b), pair_index(d, c, e));
        self.rmat[(r, c)] = v.clone();
        self.rmat[(c, r)] = v;
    }

    /// `R(u, v, w, x)` on coordinate vectors.
    pub fn eval(&self, u: &[S], v: &[S], w: &[S], x: &[S]) -> S {
        let left = bivector(u, v);
        let right = bivector(w, x);
        let mut acc = S::zero();
        for (r, a) in left.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (c, b) in right.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let m = &self.rmat[(r, c)];
                if !m.is_zero() {
                    acc = acc + a.clone() * b.clone() * m.clone();
                }
            }
        }
        acc
    }

    /// Nonzero components in canonical form `i<j, k<l, (i,j) ≤ (k,l)`.
    pub fn components(&self) -> Vec<([usize; 4], S)> {
        let basis = BladeBasis::new(self.dim(), 2).expect("d ≥ 2");
        let pairs: Vec<Vec<usize>> = basis.blades().iter().map(|b| b.indices()).collect();
        let n = pairs.len();
        let mut out = Vec::new();
        for r in 0..n {
            for c in r..n {
                let v = &self.rmat[(r, c)];
                if !v.is_zero() {
                    out.push(([pairs[r][0], pairs[r][1], pairs[c][0], pairs[c][1]], v.clone()));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_frame(other.frame())?;
        Ok(CurvatureTensor { frame: self.frame.clone(), rmat: self.rmat.add(&other.rmat)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_frame(other.frame())?;
        Ok(CurvatureTensor { frame: self.frame.clone(), rmat: self.rmat.sub(&other.rmat)? })
    }

    pub fn scale(&self, k: &S) -> Self {
        CurvatureTensor { frame: self.frame.clone(), rmat: self.rmat.scale(k) }
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.rmat.is_zero_within(tol)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.frame.metric().approx_eq(other.frame.metric(), tol) && self.rmat.approx_eq(&other.rmat, tol)
    }

    pub fn to_f64(&self) -> CurvatureTensor<f64> {
        CurvatureTensor { frame: self.frame.to_f64(), rmat: self.rmat.to_f64() }
    }

    /// Same components over a different metric.
    pub fn with_frame(&self, frame: MetricFrame<S>) -> Result<Self> {
        if frame.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: frame.dim() });
        }
        Ok(CurvatureTensor { frame, rmat: self.rmat.clone() })
    }

    /// Pullback along a linear map `q`: `R'(u,v,w,x) = R(qu, qv, qw, qx)`,
    /// with metric `qᵀ g q`.
    pub fn pullback(&self, q: &Matrix<S>) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: q.nrows() });
        }
        let l2 = induced_matrix(q, 2)?;
        let rmat = l2.transpose().mul(&self.rmat)?.mul(&l2)?;
        let metric = q.transpose().mul(self.frame.metric())?.mul(q)?;
        let frame = MetricFrame::new(metric, self.frame.orientation())?;
        Ok(CurvatureTensor { frame, rmat })
    }

    /// Orthogonal direct sum; mixed components vanish.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (d1, d2) = (self.dim(), other.dim());
        let d = d1 + d2;
        let metric = Matrix::from_fn(d, d, |i, j| match (i < d1, j < d1) {
            (true, true) => self.frame.g(i, j).clone(),
            (false, false) => other.frame.g(i - d1, j - d1).clone(),
            _ => S::zero(),
        });
        let frame = MetricFrame::new(metric, self.frame.orientation() * other.frame.orientation())?;
        let mut out = CurvatureTensor::zero(frame);
        for ([i, j, k, l], v) in self.components() {
            out.set(i, j, k, l, v);
        }
        for ([i, j, k, l], v) in other.components() {
            out.set(i + d1, j + d1, k + d1, l + d1, v);
        }
        Ok(out)
    }

    fn check_frame(&self, other: &MetricFrame<S>) -> Result<()> {
        if self.frame.metric() != other.metric() {
            return Err(Error::invalid("tensors live over different metrics"));
        }
        Ok(())
    }
}

/// Canonical Λ² coefficients of `u ∧ v`.
fn bivector<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    let d = u.len();
    let mut out = Vec::with_capacity(binomial(d, 2));
    for i in 0..d {
        for j in i + 1..d {
            out.push(u[i].clone() * v[j].clone() - u[j].clone() * v[i].clone());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTwoTensor<S> {
    frame: MetricFrame<S>,
    matrix: Matrix<S>,
}

impl<S: Scalar> SymmetricTwoTensor<S> {
    pub fn new(frame: MetricFrame<S>, matrix: Matrix<S>) -> Result<Self> {
        if matrix.nrows() != frame.dim() || matrix.ncols() != frame.dim() {
            return Err(Error::DimensionMismatch { expected: frame.dim(), found: matrix.nrows() });
        }
        if !matrix.is_symmetric(0.0) {
            return Err(Error::invalid("two-tensor must be symmetric"));
        }
        Ok(SymmetricTwoTensor { frame, matrix })
    }

    /// The metric itself.
    pub fn metric(frame: &MetricFrame<S>) -> Self {
        SymmetricTwoTensor { frame: frame.clone(), matrix: frame.metric().clone() }
    }

    pub fn diagonal(frame: &MetricFrame<S>, values: &[S]) -> Result<Self> {
        let d = frame.dim();
        if values.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: values.len() });
        }
        let m = Matrix::from_fn(d, d, |i, j| if i == j { values[i].clone() } else { S::zero() });
        Ok(SymmetricTwoTensor { frame: frame.clone(), matrix: m })
    }

    pub fn frame(&self) -> &MetricFrame<S> {
        &self.frame
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.matrix[(i, j)]
    }

    /// `Σ g^{ab} S_ab`.
    pub fn trace(&self) -> Result<S> {
        let ginv = self.frame.inverse_metric()?;
        let d = self.frame.dim();
        let mut acc = S::zero();
        for a in 0..d {
            for b in 0..d {
                acc = acc + ginv[(a, b)].clone() * self.matrix[(a, b)].clone();
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, k: &S) -> Self {
        SymmetricTwoTensor { frame: self.frame.clone(), matrix: self.matrix.scale(k) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(SymmetricTwoTensor { frame: self.frame.clone(), matrix: self.matrix.add(&other.matrix)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(SymmetricTwoTensor { frame: self.frame.clone(), matrix: self.matrix.sub(&other.matrix)? })
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.matrix.is_zero_within(tol)
    }

    /// The factor `c` with `S = c·g`, if there is one.
    pub fn metric_multiple(&self, tol: f64) -> Option<S> {
        let d = self.frame.dim();
        let (i, _) = (0..d).map(|i| (i, self.frame.g(i, i))).find(|(_, g)| !g.is_zero())?;
        let c = self.matrix[(i, i)].clone() / self.frame.g(i, i).clone();
        let resid = self.matrix.sub(&self.frame.metric().scale(&c)).ok()?;
        resid.is_zero_within(tol * 1f64.max(self.matrix.max_abs())).then_some(c)
    }
}

/// Kulkarni–Nomizu product `S⧄T`.
///
/// The four-term formula is already symmetric in `(S, T)`, so no explicit
/// symmetrization is needed.
pub fn kulkarni_nomizu<S: Scalar>(s: &SymmetricTwoTensor<S>, t: &SymmetricTwoTensor<S>) -> Result<CurvatureTensor<S>> {
    if s.frame.metric() != t.frame.metric() {
        return Err(Error::invalid("Kulkarni–Nomizu factors live over different metrics"));
    }
    let d = s.frame.dim();
    let (a, b) = (&s.matrix, &t.matrix);
    let mut out = CurvatureTensor::zero(s.frame.clone());
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                for l in k + 1..d {
                    if pair_index(d, k, l) < pair_index(d, i, j) {
                        continue;
                    }
                    let v = a[(i, l)].clone() * b[(j, k)].clone() + a[(j, k)].clone() * b[(i, l)].clone()
                        - a[(i, k)].clone() * b[(j, l)].clone()
                        - a[(j, l)].clone() * b[(i, k)].clone();
                    if !v.is_zero() {
                        out.set(i, j, k, l, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The constant-curvature tensor `−(λ/2)·g⧄g`, whose curvature operator is
/// `λ` times the identity on Λ².
pub fn constant_curvature<S: Scalar>(frame: &MetricFrame<S>, lambda: &S) -> Result<CurvatureTensor<S>> {
    let g = SymmetricTwoTensor::metric(frame);
    Ok(kulkarni_nomizu(&g, &g)?.scale(&(-lambda.clone() / S::from_i64(2))))
}

/// `Ric_jk = −Σ g^{ab} R_{a j b k}`.
pub fn ricci<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<SymmetricTwoTensor<S>> {
    let d = rm.dim();
    let ginv = rm.frame.inverse_metric()?;
    let terms: Vec<(usize, usize, S)> = (0..d)
        .flat_map(|a| (0..d).map(move |b| (a, b)))
        .filter(|&(a, b)| !ginv[(a, b)].is_zero())
        .map(|(a, b)| (a, b, ginv[(a, b)].clone()))
        .collect();
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let mut acc = S::zero();
            for (a, b, g) in &terms {
                let r = rm.get(*a, j, *b, k);
                if !r.is_zero() {
                    acc = acc - g.clone() * r;
                }
            }
            m[(j, k)] = acc.clone();
            m[(k, j)] = acc;
        }
    }
    SymmetricTwoTensor::new(rm.frame.clone(), m)
}

pub fn scalar_curvature<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<S> {
    ricci(rm)?.trace()
}

#[derive(Clone, Debug)]
pub struct Decomposition<S> {
    pub weyl: CurvatureTensor<S>,
    pub ricci: SymmetricTwoTensor<S>,
    pub scalar: S,
    pub schouten: SymmetricTwoTensor<S>,
    pub traceless_ricci: SymmetricTwoTensor<S>,
}

impl<S: Scalar> Decomposition<S> {
    /// `W + (1/(d−2))·Ric°⧄g + scal/(2d(d−1))·g⧄g`.
    pub fn reassemble(&self) -> Result<CurvatureTensor<S>> {
        let frame = self.weyl.frame();
        let d = S::from_i64(frame.dim() as i64);
        let g = SymmetricTwoTensor::metric(frame);
        let two = S::from_i64(2);
        let one = S::one();
        let ric_part = kulkarni_nomizu(&self.traceless_ricci, &g)?.scale(&(one.clone() / (d.clone() - two.clone())));
        let scal_part = kulkarni_nomizu(&g, &g)?.scale(&(self.scalar.clone() / (two * d.clone() * (d - one))));
        self.weyl.add(&ric_part)?.add(&scal_part)
    }
}

/// Splits a tensor into Weyl, Ricci and scalar parts (`d ≥ 4`).
pub fn decompose<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<Decomposition<S>> {
    let n = rm.dim();
    if n < 4 {
        return Err(Error::unsupported(format!("Weyl decomposition needs dimension ≥ 4, got {n}")));
    }
    let d = S::from_i64(n as i64);
    let one = S::one();
    let two = S::from_i64(2);
    let ric = ricci(rm)?;
    let scal = ric.trace()?;
    let g = SymmetricTwoTensor::metric(rm.frame());
    let traceless = ric.sub(&g.scale(&(scal.clone() / d.clone())))?;
    let schouten = ric
        .sub(&g.scale(&(scal.clone() / (two * (d.clone() - one.clone())))))?
        .scale(&(one / (d - S::from_i64(2))));
    let weyl = rm.sub(&kulkarni_nomizu(&schouten, &g)?)?;
    Ok(Decomposition { weyl, ricci: ric, scalar: scal, schouten, traceless_ricci: traceless })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BianchiReport {
    pub holds: bool,
    pub max_violation: f64,
    /// Quadruple `(i,j,k,l)` with the largest cyclic sum.
    pub witness: Option<[usize; 4]>,
}

fn cyclic_sum<S: Scalar>(rm: &CurvatureTensor<S>, i: usize, j: usize, k: usize, l: usize) -> S {
    rm.get(i, j, k, l) + rm.get(i, k, l, j) + rm.get(i, l, j, k)
}

/// Checks `R_ijkl + R_iklj + R_iljk = 0`. Quadruples with a repeated index
/// satisfy it by the pair symmetries, so only distinct indices are visited.
pub fn validate_bianchi<S: Scalar>(rm: &CurvatureTensor<S>, tol: f64) -> BianchiReport {
    let d = rm.dim();
    let scale = 1f64.max(rm.rmat.max_abs());
    let mut report = BianchiReport { holds: true, max_violation: 0.0, witness: None };
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                for l in k + 1..d {
                    let s = cyclic_sum(rm, i, j, k, l);
                    if s.is_negligible(tol * scale) {
                        continue;
                    }
                    report.holds = false;
                    let v = s.to_f64().abs();
                    if v > report.max_violation || report.witness.is_none() {
                        report.max_violation = v;
                        report.witness = Some([i, j, k, l]);
                    }
                }
            }
        }
    }
    report
}

/// Removes the totally antisymmetric part, `R − b(R)` with
/// `b(R)_ijkl = (R_ijkl + R_iklj + R_iljk)/3`, so the result satisfies the
/// first Bianchi identity.
pub fn bianchi_project<S: Scalar>(rm: &CurvatureTensor<S>) -> CurvatureTensor<S> {
    let d = rm.dim();
    let third = S::from_ratio(1, 3);
    let mut out = rm.clone();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                for l in k + 1..d {
                    let b = cyclic_sum(rm, i, j, k, l) * third.clone();
                    if b.is_zero() {
                        continue;
                    }
                    for (a, bb, c, e) in [(i, j, k, l), (i, k, l, j), (i, l, j, k)] {
                        let v = rm.get(a, bb, c, e) - b.clone();
                        out.set(a, bb, c, e, v);
                    }
                }
            }
        }
    }
    out
}

/// The curvature operator `Ĉ: Λ² → Λ²` with `⟨Ĉ(ξ), η⟩ = R(ξ; η)`.
///
/// Indices are raised with the inverse Gram matrix of Λ², so any
/// nondegenerate metric is accepted.
pub fn raise_to_lambda2<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<OperatorMatrix<S>> {
    let d = rm.dim();
    let basis = BladeBasis::new(d, 2)?;
    let m = if rm.frame.is_orthonormal_diagonal() {
        // The Gram matrix is a diagonal of signs and is its own inverse.
        let signs: Vec<S> = basis.blades().iter().map(|b| rm.frame.blade_gram(*b, *b)).collect();
        Matrix::from_fn(basis.len(), basis.len(), |i, j| signs[i].clone() * rm.rmat[(i, j)].clone())
    } else {
        rm.frame.gram_matrix(&basis).inverse()?.mul(&rm.rmat)?
    };
    OperatorMatrix::new(d, 2, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn euclid(d: usize) -> MetricFrame<Q> {
        MetricFrame::euclidean(d)
    }

    fn random_tensor(d: usize, entries: &[i64]) -> CurvatureTensor<Q> {
        let n = binomial(d, 2);
        let mut m = Matrix::zeros(n, n);
        let mut it = entries.iter().cycle();
        for r in 0..n {
            for c in r..n {
                let v = q(*it.next().unwrap());
                m[(r, c)] = v.clone();
                m[(c, r)] = v;
            }
        }
        bianchi_project(&CurvatureTensor::from_lambda2_matrix(euclid(d), m).unwrap())
    }

    #[test]
    fn metric_kn_square() {
        let g = SymmetricTwoTensor::metric(&euclid(4));
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(gg.get(i, j, i, j), q(-2));
                }
            }
        }
    }

    #[test]
    fn diagonal_kn_metric() {
        let f = euclid(4);
        let a: Vec<Q> = [1, 2, 3, 5].iter().map(|&x| q(x)).collect();
        let s = SymmetricTwoTensor::diagonal(&f, &a).unwrap();
        let r = kulkarni_nomizu(&s, &SymmetricTwoTensor::metric(&f)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(r.get(i, j, i, j), -(a[i].clone() + a[j].clone()));
                }
            }
        }
        // Only {i,j} = {k,l} components survive for diagonal factors.
        for ([i, j, k, l], _) in r.components() {
            assert_eq!((i, j), (k, l));
        }
    }

    #[test]
    fn kn_symmetrization_is_redundant() {
        let f = euclid(4);
        let s = SymmetricTwoTensor::new(f.clone(), Matrix::from_fn(4, 4, |i, j| q((i * j + i + j) as i64))).unwrap();
        let t = SymmetricTwoTensor::new(f, Matrix::from_fn(4, 4, |i, j| q((i as i64 - j as i64).pow(2)))).unwrap();
        assert_eq!(kulkarni_nomizu(&s, &t).unwrap(), kulkarni_nomizu(&t, &s).unwrap());
        assert!(validate_bianchi(&kulkarni_nomizu(&s, &t).unwrap(), 0.0).holds);
    }

    #[test]
    fn bianchi_violation_detected() {
        let r = CurvatureTensor::from_components(euclid(4), &[([0, 1, 2, 3], q(1))]).unwrap();
        let rep = validate_bianchi(&r, 0.0);
        assert!(!rep.holds);
        assert_eq!(rep.witness, Some([0, 1, 2, 3]));
        assert!(validate_bianchi(&bianchi_project(&r), 0.0).holds);
    }

    #[test]
    fn conflicting_components_rejected() {
        let err = CurvatureTensor::from_components(euclid(4), &[([0, 1, 0, 2], q(1)), ([1, 0, 2, 0], q(2))]);
        assert!(matches!(err, Err(Error::Inconsistent(_))));
        let ok = CurvatureTensor::from_components(euclid(4), &[([0, 1, 0, 2], q(1)), ([1, 0, 2, 0], q(1))]);
        assert!(ok.is_ok());
        let bad = CurvatureTensor::from_components(euclid(4), &[([0, 0, 1, 2], q(1))]);
        assert!(bad.is_err());
    }

    #[test]
    fn schouten_sign_reproduces_lcf_identity() {
        let f = euclid(5);
        let a: Vec<Q> = [1, -2, 3, 0, 4].iter().map(|&x| q(x)).collect();
        let p = SymmetricTwoTensor::diagonal(&f, &a.iter().map(|x| -x.clone()).collect::<Vec<_>>()).unwrap();
        let rm = kulkarni_nomizu(&p, &SymmetricTwoTensor::metric(&f)).unwrap();
        let dec = decompose(&rm).unwrap();
        assert_eq!(dec.schouten, p);
        assert!(dec.weyl.is_zero_within(0.0));
        let sum: Q = a.iter().cloned().fold(q(0), |x, y| x + y);
        assert_eq!(dec.scalar, q(-2 * 4) * sum);
    }

    #[test]
    fn space_form_is_weyl_free() {
        let f = euclid(6);
        let g = SymmetricTwoTensor::metric(&f);
        let rm = kulkarni_nomizu(&g, &g).unwrap().scale(&Q::from_ratio(3, 7));
        assert!(decompose(&rm).unwrap().weyl.is_zero_within(0.0));
    }

    #[test]
    fn weyl_is_totally_trace_free() {
        let rm = random_tensor(4, &[3, -1, 0, 2, 5, -4, 1, 0, 0, 7, -2]);
        let w = decompose(&rm).unwrap().weyl;
        for pos in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            for x in 0..4 {
                for y in 0..4 {
                    let mut acc = q(0);
                    for a in 0..4 {
                        let mut free = [x, y].into_iter();
                        let mut full = [0usize; 4];
                        for (p, slot) in full.iter_mut().enumerate() {
                            *slot = if p == pos.0 || p == pos.1 { a } else { free.next().unwrap() };
                        }
                        acc += w.get(full[0], full[1], full[2], full[3]);
                    }
                    assert_eq!(acc, q(0), "trace over {pos:?}");
                }
            }
        }
    }

    #[test]
    fn raise_on_pure_tensor_is_diagonal() {
        let rm = CurvatureTensor::from_components(euclid(4), &[([0, 1, 0, 1], q(3)), ([1, 3, 1, 3], q(-2))]).unwrap();
        let op = raise_to_lambda2(&rm).unwrap();
        assert_eq!(op.get(0, 0), &q(3));
        assert_eq!(op.get(4, 4), &q(-2));
        assert!(raise_to_lambda2(&CurvatureTensor::zero(euclid(4))).unwrap().is_zero_within(0.0));
    }

    #[test]
    fn space_form_operator_is_scalar() {
        for d in [4, 6, 8] {
            let f = euclid(d);
            let g = SymmetricTwoTensor::metric(&f);
            let op = raise_to_lambda2(&kulkarni_nomizu(&g, &g).unwrap()).unwrap();
            assert_eq!(op, OperatorMatrix::identity(d, 2).scale(&q(-2)));
        }
    }

    #[test]
    fn operator_is_gram_self_adjoint_on_general_metric() {
        let g = Matrix::from_rows(vec![
            vec![q(0), q(1), q(0), q(0)],
            vec![q(1), q(-2), q(0), q(0)],
            vec![q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(1)],
        ])
        .unwrap();
        let frame = MetricFrame::new(g, 1).unwrap();
        let rm = random_tensor(4, &[1, 2, -3, 0, 4]).with_frame(frame.clone()).unwrap();
        let op = raise_to_lambda2(&rm).unwrap();
        assert!(op.is_self_adjoint(&frame, 0.0).unwrap());
        let basis = BladeBasis::new(4, 2).unwrap();
        let gram = frame.gram_matrix(&basis);
        assert_eq!(&op.matrix().transpose().mul(&gram).unwrap(), rm.lambda2_matrix());
    }

    #[test]
    fn pullback_matches_eval() {
        let rm = random_tensor(4, &[2, -1, 3, 0, 1]);
        let qm = Matrix::from_fn(4, 4, |i, j| q(((i + 2 * j) % 5) as i64 - 2));
        let pb = rm.pullback(&qm).unwrap();
        let col = |j: usize| qm.column(j);
        for [i, j, k, l] in [[0, 1, 2, 3], [0, 2, 0, 2], [1, 3, 0, 3]] {
            assert_eq!(pb.get(i, j, k, l), rm.eval(&col(i), &col(j), &col(k), &col(l)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decomposition_reassembles(d in prop::sample::select(vec![4usize, 6]), entries in prop::collection::vec(-5i64..=5, 8..30)) {
            let rm = random_tensor(d, &entries);
            let dec = decompose(&rm).unwrap();
            prop_assert_eq!(dec.reassemble().unwrap(), rm);
            prop_assert!(ricci(&dec.weyl).unwrap().is_zero_within(0.0));
        }

        #[test]
        fn projected_tensors_satisfy_bianchi(entries in prop::collection::vec(-9i64..=9, 5..40)) {
            prop_assert!(validate_bianchi(&random_tensor(5, &entries), 0.0).holds);
        }
    }
}
