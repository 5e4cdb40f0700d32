//! Higher curvature operators `Ĉ_p: Λ^p → Λ^p` for even `p`.
//!
//! `Ĉ_p(e_B)` is the alternating sum of wedge chains
//! `Ĉ(e_a1∧e_b1) ∧ … ∧ Ĉ(e_ak∧e_bk)` over the perfect matchings of `B`,
//! divided by `(p−1)!!`. The matchings of `B` are generated by pairing its
//! smallest index with each other index in turn, so the chain sums for all
//! blades of degree `p` are built from those of degree `p−2`. Each layer is
//! assembled in parallel over its blades and collected in canonical order.

use std::f64::consts::FRAC_1_SQRT_2;

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curvature::{constant_curvature, decompose, raise_to_lambda2, CurvatureTensor};
use crate::error::{Error, Result};
use crate::exterior::{
    gram_inner, hodge_matrix, pair_index, permutation_sign, star_pairing, wedge, Blade, BladeBasis,
    MetricFrame, PVector,
};
use crate::matrix::Matrix;
use crate::operator::OperatorMatrix;
use crate::scalar::Scalar;

/// `(n)!! = n·(n−2)·…`, with `(−1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> i64 {
    (1..=n).rev().step_by(2).product()
}

fn check_degree(d: usize, p: usize) -> Result<()> {
    if p % 2 != 0 {
        return Err(Error::invalid(format!("curvature operators need even degree, got p={p}")));
    }
    if p > d {
        return Err(Error::DegreeOverflow { degree: p, dim: d });
    }
    Ok(())
}

/// Extends `Ĉ` on Λ² to `Ĉ_p` on Λ^p.
pub fn extend_operator<S: Scalar>(c2: &OperatorMatrix<S>, p: usize) -> Result<OperatorMatrix<S>> {
    if c2.degree() != 2 {
        return Err(Error::DegreeMismatch { left: 2, right: c2.degree() });
    }
    let d = c2.dim();
    check_degree(d, p)?;
    let b2 = BladeBasis::new(d, 2)?;
    let images: Vec<PVector<S>> = (0..b2.len()).map(|j| c2.column(j, &b2)).collect();

    // `prev` holds the matching sums for every blade of the previous degree.
    let mut prev_basis = BladeBasis::new(d, 0)?;
    let mut prev: Vec<PVector<S>> = vec![PVector::unit(d)];
    for k in 1..=p / 2 {
        let basis = BladeBasis::new(d, 2 * k)?;
        let next: Vec<PVector<S>> = basis
            .blades()
            .par_iter()
            .map(|b| {
                let idx = b.indices();
                let first = idx[0];
                let mut acc = PVector::zero(d, 2 * k);
                for (m, &j) in idx[1..].iter().enumerate() {
                    let rest = Blade::from_mask(b.mask() & !(1 << first) & !(1 << j));
                    let tail = &prev[prev_basis.position(rest).expect("sub-blade")];
                    if tail.is_zero() {
                        continue;
                    }
                    let head = &images[pair_index(d, first, j)];
                    let term = wedge(head, tail).expect("degrees fit");
                    acc = if m % 2 == 0 { acc.add(&term) } else { acc.sub(&term) }.expect("same degree");
                }
                acc
            })
            .collect();
        prev = next;
        prev_basis = basis;
    }

    let norm = S::one() / S::from_i64(double_factorial(p as i64 - 1));
    let n = prev_basis.len();
    let mut m = Matrix::zeros(n, n);
    for (col, v) in prev.iter().enumerate() {
        for (blade, c) in v.terms() {
            m[(prev_basis.position(blade).expect("same degree"), col)] = c.clone() * norm.clone();
        }
    }
    OperatorMatrix::new(d, p, m)
}

/// The `p`-th curvature operator of a tensor (any nondegenerate metric).
pub fn thorpe_operator<S: Scalar>(rm: &CurvatureTensor<S>, p: usize) -> Result<OperatorMatrix<S>> {
    check_degree(rm.dim(), p)?;
    extend_operator(&raise_to_lambda2(rm)?, p)
}

/// The same construction applied to the Weyl part of the tensor.
pub fn weyl_operator<S: Scalar>(rm: &CurvatureTensor<S>, p: usize) -> Result<OperatorMatrix<S>> {
    check_degree(rm.dim(), p)?;
    let w = decompose(rm)?.weyl;
    extend_operator(&raise_to_lambda2(&w)?, p)
}

/// `R_p(u_1..u_p, v_1..v_p)` by the full double sum over `S_p × S_p`,
/// scaled by `1/(2^{p/2} p!)`.
pub fn thorpe_tensor_entry<S: Scalar>(rm: &CurvatureTensor<S>, p: usize, u: &[Vec<S>], v: &[Vec<S>]) -> Result<S> {
    let d = rm.dim();
    check_degree(d, p)?;
    if p == 0 {
        return Err(Error::invalid("degree must be at least 2"));
    }
    if u.len() != p || v.len() != p {
        return Err(Error::invalid(format!("need {p} vectors on each side")));
    }
    if let Some(bad) = u.iter().chain(v).find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    // R(u_a, u_b, v_c, v_e) for every index quadruple.
    let mut table = vec![S::zero(); p * p * p * p];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for e in 0..p {
                    table[((a * p + b) * p + c) * p + e] = rm.eval(&u[a], &u[b], &v[c], &v[e]);
                }
            }
        }
    }
    let perms: Vec<(i32, Vec<usize>)> = (0..p).permutations(p).map(|s| (permutation_sign(&s), s)).collect();
    let mut acc = S::zero();
    for (ss, s) in &perms {
        for (st, t) in &perms {
            let mut prod = S::one();
            for k in 0..p / 2 {
                let x = &table[((s[2 * k] * p + s[2 * k + 1]) * p + t[2 * k]) * p + t[2 * k + 1]];
                if x.is_zero() {
                    prod = S::zero();
                    break;
                }
                prod = prod * x.clone();
            }
            if !prod.is_zero() {
                acc = if ss * st > 0 { acc + prod } else { acc - prod };
            }
        }
    }
    let fact: i64 = (1..=p as i64).product();
    Ok(acc / S::from_i64((1i64 << (p / 2)) * fact))
}

/// `sec_p(P) = ⟨Ĉ_p(P), P⟩` for a unit p-vector `P`.
pub fn sec_p<S: Scalar>(rm: &CurvatureTensor<S>, p: usize, plane: &PVector<S>, tol: f64) -> Result<S> {
    if plane.degree() != p {
        return Err(Error::DegreeMismatch { left: p, right: plane.degree() });
    }
    let norm = gram_inner(plane, plane, rm.frame())?;
    if !norm.approx_eq(&S::one(), tol) {
        return Err(Error::invalid(format!("p-vector must have unit norm, got {}", norm.to_repr())));
    }
    let op = thorpe_operator(rm, p)?;
    gram_inner(&op.apply(plane)?, plane, rm.frame())
}

/// The scalar `K` with `Ĉ_d(vol) = K·vol`; on an orthonormal frame this is
/// the top sectional curvature of the volume element.
pub fn lipschitz_killing<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<S> {
    let d = rm.dim();
    if d % 2 != 0 {
        return Err(Error::invalid(format!("top curvature needs even dimension, got {d}")));
    }
    Ok(thorpe_operator(rm, d)?.get(0, 0).clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarCommutation {
    pub commutes: bool,
    pub max_violation: f64,
    /// `(input blade, output blade)` of the largest commutator entry.
    pub witness: Option<(Blade, Blade)>,
}

/// Tests `*Op = Op*` for a middle-degree operator on an oriented Euclidean
/// frame. Exact backends require an exact zero commutator; floats compare
/// against `tol·max(1, |Op|)`.
pub fn commutes_with_star<S: Scalar>(op: &OperatorMatrix<S>, tol: f64) -> Result<StarCommutation> {
    let (d, p) = (op.dim(), op.degree());
    if 2 * p != d {
        return Err(Error::invalid(format!("star commutation needs p = d/2, got d={d}, p={p}")));
    }
    let pairing = star_pairing(d, p)?;
    let (pi, sg) = (&pairing.target, &pairing.sign);
    let n = op.size();
    let threshold = tol * 1f64.max(op.matrix().max_abs());
    let mut report = StarCommutation { commutes: true, max_violation: 0.0, witness: None };
    let basis = op.basis();
    for c in 0..n {
        for r in 0..n {
            let lhs = op.get(pi[r], c).clone();
            let rhs = op.get(r, pi[c]).clone();
            let lhs = if sg[r] > 0 { lhs } else { -lhs };
            let rhs = if sg[c] > 0 { rhs } else { -rhs };
            let v = lhs - rhs;
            if v.is_negligible(threshold) {
                continue;
            }
            report.commutes = false;
            let mag = v.to_f64().abs();
            if report.witness.is_none() || mag > report.max_violation {
                report.max_violation = mag;
                report.witness = Some((basis.blade(c), basis.blade(r)));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Duality {
    /// `B = A`: the operator vanishes on the anti-self-dual part.
    SelfDual,
    /// `B = −A`: the operator vanishes on the self-dual part.
    AntiSelfDual,
    Neither,
    /// `A = B = 0`.
    Vanishing,
}

/// Middle-degree operator written as `[[A, B], [B, A]]` in an orthonormal
/// basis `{β_i, *β_i}`.
#[derive(Clone, Debug)]
pub struct BlockForm {
    /// Diagonal of `A`.
    pub a: Vec<f64>,
    /// Diagonal of `B`.
    pub b: Vec<f64>,
    /// Eigenvalues on the `+1` and `−1` eigenspaces of the star.
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Columns `β_1..β_h, *β_1..*β_h` in canonical blade coordinates.
    pub basis: Matrix<f64>,
    pub duality: Duality,
}

impl BlockForm {
    pub fn a_matrix(&self) -> Matrix<f64> {
        diag(&self.a)
    }

    pub fn b_matrix(&self) -> Matrix<f64> {
        diag(&self.b)
    }

    /// `[[A, B], [B, A]]`.
    pub fn assembled(&self) -> Matrix<f64> {
        let h = self.a.len();
        Matrix::from_fn(2 * h, 2 * h, |i, j| {
            if i % h != j % h {
                0.0
            } else if (i < h) == (j < h) {
                self.a[i % h]
            } else {
                self.b[i % h]
            }
        })
    }
}

fn diag(v: &[f64]) -> Matrix<f64> {
    Matrix::from_fn(v.len(), v.len(), |i, j| if i == j { v[i] } else { 0.0 })
}

fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Block normal form of a star-commuting symmetric operator on Λ^{d/2},
/// `d ≡ 0 mod 4`. Computed in floating point.
pub fn block_form<S: Scalar>(op: &OperatorMatrix<S>, tol: f64) -> Result<BlockForm> {
    let (d, p) = (op.dim(), op.degree());
    if 2 * p != d || p % 2 != 0 {
        return Err(Error::unsupported(format!("block form needs d ≡ 0 mod 4 and p = d/2, got d={d}, p={p}")));
    }
    let star = commutes_with_star(op, tol)?;
    if !star.commutes {
        return Err(Error::NotCommuting { max_violation: star.max_violation });
    }
    let m = op.matrix().to_f64();
    let scale = 1f64.max(m.max_abs());
    if !m.is_symmetric(tol * scale) {
        return Err(Error::invalid("block form needs a symmetric operator"));
    }
    let pairing = star_pairing(d, p)?;
    let n = m.nrows();
    let h = n / 2;
    // Orthonormal eigenbases of the star: (e_k ± *e_k)/√2 over the blades
    // containing e0, which are the first half in canonical order.
    let half_basis = |sign: f64| {
        DMatrix::from_fn(n, h, |r, k| {
            if r == k {
                FRAC_1_SQRT_2
            } else if r == pairing.target[k] {
                sign * pairing.sign[k] as f64 * FRAC_1_SQRT_2
            } else {
                0.0
            }
        })
    };
    let (xp, xm) = (half_basis(1.0), half_basis(-1.0));
    let md = to_dmatrix(&m);
    let restrict = |x: &DMatrix<f64>| {
        let r = x.transpose() * &md * x;
        (&r + r.transpose()) * 0.5
    };
    let (plus, up) = sorted_eigen(restrict(&xp));
    let (minus, um) = sorted_eigen(restrict(&xm));
    if plus.iter().chain(&minus).any(|x| !x.is_finite()) {
        return Err(Error::Numerical("eigendecomposition produced non-finite values".into()));
    }
    let xi = &xp * up;
    let eta = &xm * um;
    let beta = (&xi + &eta) * FRAC_1_SQRT_2;
    let star_beta = (&xi - &eta) * FRAC_1_SQRT_2;
    let basis = Matrix::from_fn(n, n, |r, c| if c < h { beta[(r, c)] } else { star_beta[(r, c - h)] });
    let a: Vec<f64> = plus.iter().zip(&minus).map(|(x, y)| (x + y) / 2.0).collect();
    let b: Vec<f64> = plus.iter().zip(&minus).map(|(x, y)| (x - y) / 2.0).collect();
    let zero = |v: &[f64]| v.iter().all(|x| x.abs() <= 1e-8 * scale);
    let duality = match (zero(&plus), zero(&minus)) {
        (true, true) => Duality::Vanishing,
        (false, true) => Duality::SelfDual,
        (true, false) => Duality::AntiSelfDual,
        (false, false) => Duality::Neither,
    };
    let form = BlockForm { a, b, plus, minus, basis, duality };
    let conj = form.basis.transpose().mul(&m)?.mul(&form.basis)?;
    let err = conj.max_abs_diff(&form.assembled());
    if err > 1e-8 * scale * n as f64 {
        return Err(Error::Numerical(format!("block form does not reproduce the operator (error {err:e})")));
    }
    Ok(form)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PConstantReport {
    pub p: usize,
    pub samples: usize,
    pub seed: u64,
    /// Whether all sampled values agree within tolerance. This is a sampling
    /// test over random decomposable p-vectors, not a proof.
    pub constant: bool,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

/// Random unit decomposable p-vector from a Gram–Schmidt p-frame.
pub fn random_unit_blade(rng: &mut impl Rng, d: usize, p: usize) -> PVector<f64> {
    loop {
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(p);
        for _ in 0..p {
            let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for w in &frame {
                let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(w).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm < 1e-3 {
                break;
            }
            frame.push(v.into_iter().map(|a| a / norm).collect());
        }
        if frame.len() == p {
            return PVector::wedge_of(d, &frame).expect("p ≤ d");
        }
    }
}

/// Samples `sec_p` on random unit decomposable p-vectors (Euclidean frames).
pub fn p_constant_check<S: Scalar>(
    rm: &CurvatureTensor<S>,
    p: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PConstantReport> {
    rm.frame().require_euclidean("p-constancy sampling")?;
    let d = rm.dim();
    let op = thorpe_operator(rm, p)?.to_f64();
    let basis = BladeBasis::new(d, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = random_unit_blade(&mut rng, d, p).coefficients(&basis);
        let y = op.matrix().mul_vec(&x);
        values.push(x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>());
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let value = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / values.len() as f64 };
    let constant = values.is_empty() || max - min <= tol * 1f64.max(min.abs()).max(max.abs());
    Ok(PConstantReport { p, samples, seed, constant, value, min, max })
}

/// Checks `*Ĉ_{d−p}* = λ^{d/2−p} Ĉ_p` entrywise for the constant-curvature
/// tensor with `Ĉ = λ·I`. When `d/2 < p` the equivalent form
/// `λ^{p−d/2}·(*Ĉ_{d−p}*) = Ĉ_p` is tested instead.
pub fn space_form_duality_check<S: Scalar>(lambda: &S, d: usize, p: usize) -> Result<bool> {
    if d % 2 != 0 {
        return Err(Error::invalid(format!("duality check needs even dimension, got {d}")));
    }
    check_degree(d, p)?;
    let rm = constant_curvature(&MetricFrame::euclidean(d), lambda)?;
    let cp = thorpe_operator(&rm, p)?;
    let cq = thorpe_operator(&rm, d - p)?;
    let to_q: Matrix<S> = hodge_matrix(d, p)?;
    let to_p: Matrix<S> = hodge_matrix(d, d - p)?;
    let lhs = to_p.mul(cq.matrix())?.mul(&to_q)?;
    let n = d / 2;
    Ok(if n >= p {
        lhs == cp.matrix().scale(&lambda.powi((n - p) as u32))
    } else {
        lhs.scale(&lambda.powi((p - n) as u32)) == *cp.matrix()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{bianchi_project, kulkarni_nomizu, SymmetricTwoTensor};
    use crate::exterior::binomial;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn sparse_tensor(d: usize, seed: u64) -> CurvatureTensor<Q> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = binomial(d, 2);
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                if rng.gen_bool(0.4) {
                    let v = q(rng.gen_range(-3..=3));
                    m[(r, c)] = v.clone();
                    m[(c, r)] = v;
                }
            }
        }
        bianchi_project(&CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(d), m).unwrap())
    }

    fn basis_vectors(d: usize, b: Blade) -> Vec<Vec<Q>> {
        b.indices().iter().map(|&i| (0..d).map(|k| if k == i { q(1) } else { q(0) }).collect()).collect()
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1), 1);
        assert_eq!(double_factorial(1), 1);
        assert_eq!(double_factorial(5), 15);
        assert_eq!(double_factorial(6), 48);
    }

    #[test]
    fn degree_two_is_the_curvature_operator() {
        let rm = sparse_tensor(5, 1);
        assert_eq!(thorpe_operator(&rm, 2).unwrap(), raise_to_lambda2(&rm).unwrap());
        assert!(thorpe_operator(&rm, 3).is_err());
        assert!(thorpe_operator(&rm, 6).is_err());
    }

    #[test]
    fn tensor_entry_degree_two_is_rm() {
        let rm = sparse_tensor(4, 2);
        let e = |i: usize| (0..4).map(|k| if k == i { q(1) } else { q(0) }).collect::<Vec<_>>();
        let u = vec![vec![q(1), q(2), q(0), q(-1)], e(2)];
        let v = vec![e(0), vec![q(0), q(1), q(1), q(3)]];
        assert_eq!(thorpe_tensor_entry(&rm, 2, &u, &v).unwrap(), rm.eval(&u[0], &u[1], &v[0], &v[1]));
    }

    #[test]
    fn tensor_entry_degree_four_matches_eighteen_terms() {
        let rm = sparse_tensor(4, 3);
        let uu: Vec<Vec<Q>> = [[1, 0, 2, -1], [0, 1, 1, 0], [3, -1, 0, 1], [0, 0, 1, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        let vv: Vec<Vec<Q>> = [[0, 2, 1, 0], [1, 1, 0, -2], [1, 0, 0, 1], [-1, 3, 2, 0]]
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        let r = |a: usize, b: usize, c: usize, d: usize| rm.eval(&uu[a], &uu[b], &vv[c], &vv[d]);
        // The 18-term expansion with prefactor 1/3.
        let (u1, u2, u3, u4) = (0, 1, 2, 3);
        let (v1, v2, v3, v4) = (0, 1, 2, 3);
        let expected = (r(u1, u2, v1, v2) * r(u3, u4, v3, v4) - r(u1, u2, v1, v3) * r(u3, u4, v2, v4)
            + r(u1, u2, v1, v4) * r(u3, u4, v2, v3)
            + r(u1, u2, v2, v3) * r(u3, u4, v1, v4)
            - r(u1, u2, v2, v4) * r(u3, u4, v1, v3)
            + r(u1, u2, v3, v4) * r(u3, u4, v1, v2)
            - r(u1, u3, v1, v2) * r(u2, u4, v3, v4)
            + r(u1, u3, v1, v3) * r(u2, u4, v2, v4)
            - r(u1, u3, v1, v4) * r(u2, u4, v2, v3)
            - r(u1, u3, v2, v3) * r(u2, u4, v1, v4)
            + r(u1, u3, v2, v4) * r(u2, u4, v1, v3)
            - r(u1, u3, v3, v4) * r(u2, u4, v1, v2)
            + r(u1, u4, v1, v2) * r(u2, u3, v3, v4)
            - r(u1, u4, v1, v3) * r(u2, u3, v2, v4)
            + r(u1, u4, v1, v4) * r(u2, u3, v2, v3)
            + r(u1, u4, v2, v3) * r(u2, u3, v1, v4)
            - r(u1, u4, v2, v4) * r(u2, u3, v1, v3)
            + r(u1, u4, v3, v4) * r(u2, u3, v1, v2))
            * Q::from_ratio(1, 3);
        assert_ne!(expected, q(0));
        assert_eq!(thorpe_tensor_entry(&rm, 4, &uu, &vv).unwrap(), expected);
    }

    #[test]
    fn operator_matches_definition_on_all_pairs() {
        for (d, p, seed) in [(4, 2, 5), (4, 4, 6), (5, 4, 7)] {
            let rm = sparse_tensor(d, seed);
            let op = thorpe_operator(&rm, p).unwrap();
            let basis = op.basis();
            let paired = op.matrix().transpose();
            for (i, &bi) in basis.blades().iter().enumerate() {
                for (j, &bj) in basis.blades().iter().enumerate() {
                    let e = thorpe_tensor_entry(&rm, p, &basis_vectors(d, bi), &basis_vectors(d, bj)).unwrap();
                    assert_eq!(paired[(i, j)], e, "d={d} p={p} {bi} {bj}");
                }
            }
        }
    }

    #[test]
    fn flat_gives_zero() {
        let rm = CurvatureTensor::<Q>::zero(MetricFrame::euclidean(6));
        for p in [2, 4, 6] {
            assert!(thorpe_operator(&rm, p).unwrap().is_zero_within(0.0));
        }
        assert_eq!(lipschitz_killing(&rm).unwrap(), q(0));
    }

    #[test]
    fn space_form_powers() {
        for (d, lambda) in [(4, q(3)), (6, Q::from_ratio(-1, 2)), (8, q(2))] {
            let rm = constant_curvature(&MetricFrame::euclidean(d), &lambda).unwrap();
            for p in (2..=d).step_by(2) {
                let expected = OperatorMatrix::identity(d, p).scale(&lambda.powi(p as u32 / 2));
                assert_eq!(thorpe_operator(&rm, p).unwrap(), expected, "d={d} p={p}");
            }
        }
        let rm = constant_curvature(&MetricFrame::euclidean(4), &q(3)).unwrap();
        assert_eq!(lipschitz_killing(&rm).unwrap(), q(9));
    }

    #[test]
    fn sec_p_on_space_form() {
        let rm = constant_curvature(&MetricFrame::euclidean(6), &q(-2)).unwrap();
        let plane = PVector::basis(6, &[0, 2, 3, 5]).unwrap();
        assert_eq!(sec_p(&rm, 4, &plane, 0.0).unwrap(), q(4));
        let long = plane.scale(&q(2));
        assert!(sec_p(&rm, 4, &long, 0.0).is_err());
        let rm4 = constant_curvature(&MetricFrame::euclidean(4), &q(5)).unwrap();
        let vol = PVector::basis(4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(sec_p(&rm4, 4, &vol, 0.0).unwrap(), lipschitz_killing(&rm4).unwrap());
    }

    #[test]
    fn zero_operator_commutes() {
        let rep = commutes_with_star(&OperatorMatrix::<Q>::zero(4, 2), 0.0).unwrap();
        assert!(rep.commutes);
        assert!(rep.witness.is_none());
        assert!(commutes_with_star(&OperatorMatrix::<Q>::zero(4, 1), 0.0).is_err());
    }

    #[test]
    fn non_einstein_fails_with_witness() {
        let f = MetricFrame::<Q>::euclidean(4);
        let s = SymmetricTwoTensor::diagonal(&f, &[q(1), q(0), q(0), q(0)]).unwrap();
        let rm = kulkarni_nomizu(&s, &SymmetricTwoTensor::metric(&f)).unwrap();
        let rep = commutes_with_star(&raise_to_lambda2(&rm).unwrap(), 0.0).unwrap();
        assert!(!rep.commutes);
        assert_eq!(rep.max_violation, 1.0);
        let (input, output) = rep.witness.unwrap();
        assert_eq!(input, Blade::from_indices(&[0, 1]).unwrap());
        assert_eq!(output, Blade::from_indices(&[2, 3]).unwrap());
    }

    #[test]
    fn block_form_space_form_and_zero() {
        let rm = constant_curvature(&MetricFrame::euclidean(4), &q(3)).unwrap();
        let bf = block_form(&raise_to_lambda2(&rm).unwrap(), 1e-9).unwrap();
        assert!(bf.a.iter().all(|x| (x - 3.0).abs() < 1e-12));
        assert!(bf.b.iter().all(|x| x.abs() < 1e-12));
        assert_eq!(bf.duality, Duality::Neither);
        let z = block_form(&OperatorMatrix::<Q>::zero(4, 2), 1e-9).unwrap();
        assert_eq!(z.duality, Duality::Vanishing);
        assert!(z.a.iter().chain(&z.b).all(|x| *x == 0.0));
    }

    #[test]
    fn block_form_rejects_non_commuting() {
        let f = MetricFrame::<Q>::euclidean(4);
        let s = SymmetricTwoTensor::diagonal(&f, &[q(1), q(0), q(0), q(0)]).unwrap();
        let rm = kulkarni_nomizu(&s, &SymmetricTwoTensor::metric(&f)).unwrap();
        assert!(matches!(block_form(&raise_to_lambda2(&rm).unwrap(), 1e-9), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn duality_identity_small_cases() {
        assert!(space_form_duality_check(&q(-2), 6, 2).unwrap());
        assert!(space_form_duality_check(&q(0), 6, 4).unwrap());
        assert!(space_form_duality_check(&q(3), 4, 4).unwrap());
        assert!(space_form_duality_check(&q(2), 6, 6).unwrap());
    }

    #[test]
    fn p_constant_sampler() {
        let rm = constant_curvature(&MetricFrame::euclidean(6), &q(3)).unwrap();
        let rep = p_constant_check(&rm, 4, 40, 11, 1e-9).unwrap();
        assert!(rep.constant);
        assert!((rep.value - 9.0).abs() < 1e-9);
        let rep2 = p_constant_check(&sparse_tensor(6, 4), 2, 40, 11, 1e-9).unwrap();
        assert!(!rep2.constant);
    }

    #[test]
    fn assembly_independent_of_worker_count() {
        let rm = sparse_tensor(8, 9);
        let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let one = pool(1).install(|| thorpe_operator(&rm, 4).unwrap());
        let four = pool(4).install(|| thorpe_operator(&rm, 4).unwrap());
        assert_eq!(one, four);
    }
}
