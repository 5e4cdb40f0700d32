//! Sectional curvature near a critical 2-plane in dimension 4, and recovery
//! of the whole tensor from data at a critical pair `P`, `*P`.
//!
//! Indices are 0-based in an oriented orthonormal frame `f0..f3`, with
//! `P = f2∧f3` and `*P = f0∧f1`. The chart around `P` is
//!
//! ```text
//! φ(x) = (f2 + x2·f0 + x3·f1) ∧ (f3 + x0·f0 + x1·f1) / √(1 + |x|² + (x0·x3 − x1·x2)²)
//! ```
//!
//! and `sec(ξ) = R(ξ; ξ)` for unit `ξ` (the Λ²-eigenvalue convention of the
//! crate). With `D = H/2` for the Hessian `H` of `sec ∘ φ` at 0:
//!
//! | component        | value                        |
//! |------------------|------------------------------|
//! | `R(0,2,0,2)`     | `D00 + sec(P)`               |
//! | `R(1,2,1,2)`     | `D11 + sec(P)`               |
//! | `R(0,3,0,3)`     | `D22 + sec(P)`               |
//! | `R(1,3,1,3)`     | `D33 + sec(P)`               |
//! | `R(0,2,1,2)`     | `D01`                        |
//! | `R(2,0,0,3)`     | `D02`                        |
//! | `R(2,1,1,3)`     | `D13`                        |
//! | `R(0,3,1,3)`     | `D23`                        |
//! | `R(2,1,3,0)`     | `−(a + 2b)/3`                |
//! | `R(2,0,1,3)`     | `(2a + b)/3`                 |
//! | `R(2,3,0,1)`     | `R(2,0,1,3) − a`             |
//!
//! where `a = D03 = R(2,0,1,3) − R(2,3,0,1)` and
//! `b = D12 = R(2,1,0,3) + R(2,3,0,1)`; the last three rows use the first
//! Bianchi identity. Criticality of `P` and `*P` zeroes the remaining
//! eight components.

use crate::curvature::{validate_bianchi, CurvatureTensor};
use crate::error::{Error, Result};
use crate::exterior::{wedge, BladeBasis, MetricFrame, PVector};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// The reconstruction formulas as `(component, expression)` rows.
pub const RECONSTRUCTION_TABLE: &[(&str, &str)] = &[
    ("R(2,3,2,3)", "sec(P)"),
    ("R(0,1,0,1)", "sec(*P)"),
    ("R(0,2,0,2)", "H00/2 + sec(P)"),
    ("R(1,2,1,2)", "H11/2 + sec(P)"),
    ("R(0,3,0,3)", "H22/2 + sec(P)"),
    ("R(1,3,1,3)", "H33/2 + sec(P)"),
    ("R(0,2,1,2)", "H01/2"),
    ("R(2,0,0,3)", "H02/2"),
    ("R(2,1,1,3)", "H13/2"),
    ("R(0,3,1,3)", "H23/2"),
    ("R(2,1,3,0)", "-(a+2b)/3, a = H03/2, b = H12/2"),
    ("R(2,0,1,3)", "(2a+b)/3"),
    ("R(2,3,0,1)", "R(2,0,1,3) - a"),
    ("R(2,3,2,k), R(2,3,k,3), k in {0,1}", "0 (P critical)"),
    ("R(0,1,0,k), R(0,1,1,k), k in {2,3}", "0 (*P critical)"),
];

/// Data at a critical pair `P = f2∧f3`, `*P = f0∧f1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalData<S> {
    /// Frame vectors as columns.
    pub frame: Matrix<S>,
    pub sec_p: S,
    pub sec_star_p: S,
    /// Hessian of `sec ∘ φ` at 0.
    pub hessian: Matrix<S>,
    /// Gradients at `P` and `*P`, when known; reconstruction requires them
    /// to vanish.
    pub gradient: Option<[S; 4]>,
    pub gradient_star: Option<[S; 4]>,
}

fn require_dim4<S: Scalar>(rm: &CurvatureTensor<S>) -> Result<()> {
    if rm.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rm.dim() });
    }
    rm.frame().require_euclidean("normal forms")
}

/// Checks that `frame` is 4×4, orthonormal and positively oriented.
pub fn check_frame<S: Scalar>(frame: &Matrix<S>, tol: f64) -> Result<()> {
    if frame.nrows() != 4 || frame.ncols() != 4 {
        return Err(Error::invalid(format!("frame must be 4×4, got {}×{}", frame.nrows(), frame.ncols())));
    }
    let gram = frame.transpose().mul(frame)?;
    if !gram.approx_eq(&Matrix::identity(4), tol) {
        return Err(Error::Inconsistent("frame is not orthonormal".into()));
    }
    if frame.determinant()?.to_f64() < 0.0 {
        return Err(Error::Inconsistent("frame is not positively oriented".into()));
    }
    Ok(())
}

/// The tensor written in the frame: `R_f(i,j,k,l) = R(f_i,f_j,f_k,f_l)`.
fn in_frame<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>) -> Result<CurvatureTensor<S>> {
    rm.pullback(frame)?.with_frame(MetricFrame::euclidean(4))
}

/// The same frame with `*P` moved into the `P` slot.
pub fn star_frame<S: Scalar>(frame: &Matrix<S>) -> Matrix<S> {
    Matrix::from_fn(4, 4, |r, c| frame[(r, [2, 3, 0, 1][c])].clone())
}

fn chart_factors<S: Scalar>(x: &[S; 4], frame: &Matrix<S>) -> (Vec<S>, Vec<S>) {
    let col = |c: usize| frame.column(c);
    let (f0, f1, f2, f3) = (col(0), col(1), col(2), col(3));
    let u = (0..4).map(|i| f2[i].clone() + x[2].clone() * f0[i].clone() + x[3].clone() * f1[i].clone()).collect();
    let w = (0..4).map(|i| f3[i].clone() + x[0].clone() * f0[i].clone() + x[1].clone() * f1[i].clone()).collect();
    (u, w)
}

fn chart_norm2<S: Scalar>(x: &[S; 4]) -> S {
    let sq = x.iter().fold(S::zero(), |acc, v| acc + v.clone() * v.clone());
    let cross = x[0].clone() * x[3].clone() - x[1].clone() * x[2].clone();
    S::one() + sq + cross.clone() * cross
}

/// The unit 2-vector `φ(x)`. Exact backends need `1 + |x|² + (x0x3 − x1x2)²`
/// to be a perfect square.
pub fn chart_phi<S: Scalar>(x: &[S; 4], frame: &Matrix<S>) -> Result<PVector<S>> {
    let (u, w) = chart_factors(x, frame);
    let norm = chart_norm2(x)
        .sqrt_checked()
        .ok_or_else(|| Error::Numerical("chart normalizer has no square root in this backend".into()))?;
    Ok(wedge(&PVector::from_vector(&u), &PVector::from_vector(&w))?.scale(&(S::one() / norm)))
}

/// `sec(φ(x))`, computed without square roots.
pub fn sec_in_chart<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>, x: &[S; 4]) -> S {
    let (u, w) = chart_factors(x, frame);
    rm.eval(&u, &w, &u, &w) / chart_norm2(x)
}

/// `R_ijkj = R_ijik = 0` for every `k ∉ {i, j}`, in frame coordinates.
pub fn critical_check<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>, pair: (usize, usize)) -> Result<bool> {
    require_dim4(rm)?;
    let (i, j) = pair;
    if i == j || i > 3 || j > 3 {
        return Err(Error::invalid(format!("invalid index pair ({i}, {j})")));
    }
    let rf = in_frame(rm, frame)?;
    Ok((0..4).filter(|&k| k != i && k != j).all(|k| rf.get(i, j, k, j).is_zero() && rf.get(i, j, i, k).is_zero()))
}

fn gradient_in<S: Scalar>(rf: &CurvatureTensor<S>) -> [S; 4] {
    let two = S::from_i64(2);
    [rf.get(2, 3, 2, 0), rf.get(2, 3, 2, 1), rf.get(2, 3, 0, 3), rf.get(2, 3, 1, 3)].map(|v| two.clone() * v)
}

/// Gradient of `sec ∘ φ` at 0:
/// `2·(R(2,3,2,0), R(2,3,2,1), R(2,3,0,3), R(2,3,1,3))`.
pub fn sec_gradient_closed<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>) -> Result<[S; 4]> {
    require_dim4(rm)?;
    Ok(gradient_in(&in_frame(rm, frame)?))
}

fn hessian_in<S: Scalar>(rf: &CurvatureTensor<S>) -> Matrix<S> {
    let sp = rf.get(2, 3, 2, 3);
    let r = |i, j, k, l| rf.get(i, j, k, l);
    let a = r(2, 0, 1, 3) - r(2, 3, 0, 1);
    let b = r(2, 1, 0, 3) + r(2, 3, 0, 1);
    let half = [
        [r(0, 2, 0, 2) - sp.clone(), r(0, 2, 1, 2), r(2, 0, 0, 3), a],
        [r(0, 2, 1, 2), r(1, 2, 1, 2) - sp.clone(), b, r(2, 1, 1, 3)],
        [r(2, 0, 0, 3), r(2, 1, 0, 3) + r(2, 3, 0, 1), r(0, 3, 0, 3) - sp.clone(), r(0, 3, 1, 3)],
        [r(2, 0, 1, 3) - r(2, 3, 0, 1), r(2, 1, 1, 3), r(0, 3, 1, 3), r(1, 3, 1, 3) - sp],
    ];
    let two = S::from_i64(2);
    Matrix::from_fn(4, 4, |i, j| two.clone() * half[i][j].clone())
}

/// Hessian of `sec ∘ φ` at 0. It is twice the matrix of the table above,
/// whether or not `P` is critical.
pub fn sec_hessian_closed<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>) -> Result<Matrix<S>> {
    require_dim4(rm)?;
    Ok(hessian_in(&in_frame(rm, frame)?))
}

/// Central differences of `sec ∘ φ` at 0 with step `h`.
pub fn finite_diff(rm: &CurvatureTensor<f64>, frame: &Matrix<f64>, h: f64) -> Result<([f64; 4], Matrix<f64>)> {
    require_dim4(rm)?;
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::invalid(format!("step must lie in [1e-6, 1e-3], got {h}")));
    }
    let basis = BladeBasis::new(4, 2)?;
    let sec = |x: [f64; 4]| -> Result<f64> {
        let c = chart_phi(&x, frame)?.coefficients(&basis);
        let y = rm.lambda2_matrix().mul_vec(&c);
        Ok(c.iter().zip(&y).map(|(a, b)| a * b).sum())
    };
    let shifted = |moves: &[(usize, f64)]| {
        let mut x = [0.0; 4];
        for &(i, s) in moves {
            x[i] += s * h;
        }
        sec(x)
    };
    let mut grad = [0.0; 4];
    for (i, g) in grad.iter_mut().enumerate() {
        *g = (shifted(&[(i, 1.0)])? - shifted(&[(i, -1.0)])?) / (2.0 * h);
    }
    let f0 = sec([0.0; 4])?;
    let mut hess = Matrix::zeros(4, 4);
    for i in 0..4 {
        hess[(i, i)] = (shifted(&[(i, 1.0)])? - 2.0 * f0 + shifted(&[(i, -1.0)])?) / (h * h);
        for j in i + 1..4 {
            let v = (shifted(&[(i, 1.0), (j, 1.0)])? - shifted(&[(i, 1.0), (j, -1.0)])?
                - shifted(&[(i, -1.0), (j, 1.0)])?
                + shifted(&[(i, -1.0), (j, -1.0)])?)
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((grad, hess))
}

/// Reads the critical data of `rm` in `frame`.
pub fn extract<S: Scalar>(rm: &CurvatureTensor<S>, frame: &Matrix<S>, tol: f64) -> Result<CriticalData<S>> {
    require_dim4(rm)?;
    check_frame(frame, tol)?;
    let rf = in_frame(rm, frame)?;
    let rs = in_frame(rm, &star_frame(frame))?;
    Ok(CriticalData {
        frame: frame.clone(),
        sec_p: rf.get(2, 3, 2, 3),
        sec_star_p: rf.get(0, 1, 0, 1),
        hessian: hessian_in(&rf),
        gradient: Some(gradient_in(&rf)),
        gradient_star: Some(gradient_in(&rs)),
    })
}

fn require_zero_gradient<S: Scalar>(g: &Option<[S; 4]>, what: &str, tol: f64) -> Result<()> {
    if let Some(g) = g {
        if let Some(k) = g.iter().position(|v| !v.is_negligible(tol)) {
            return Err(Error::Inconsistent(format!(
                "{what} is not critical: gradient component {k} is {}",
                g[k].to_repr()
            )));
        }
    }
    Ok(())
}

/// Recovers the full tensor from critical data at `P` and `*P`.
pub fn reconstruct<S: Scalar>(data: &CriticalData<S>, tol: f64) -> Result<CurvatureTensor<S>> {
    check_frame(&data.frame, tol)?;
    let h = &data.hessian;
    if h.nrows() != 4 || h.ncols() != 4 {
        return Err(Error::invalid(format!("Hessian must be 4×4, got {}×{}", h.nrows(), h.ncols())));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if !h[(i, j)].approx_eq(&h[(j, i)], tol) {
                return Err(Error::Inconsistent(format!("Hessian is not symmetric at ({i}, {j})")));
            }
        }
    }
    require_zero_gradient(&data.gradient, "P", tol)?;
    require_zero_gradient(&data.gradient_star, "*P", tol)?;

    let half = S::from_ratio(1, 2);
    let d = |i: usize, j: usize| h[(i, j)].clone() * half.clone();
    let sp = data.sec_p.clone();
    let (a, b) = (d(0, 3), d(1, 2));
    let third = S::from_ratio(1, 3);
    let r2013 = (S::from_i64(2) * a.clone() + b.clone()) * third.clone();
    let r2130 = -(a.clone() + S::from_i64(2) * b) * third;
    let r2301 = r2013.clone() - a;
    let comps = vec![
        ([2, 3, 2, 3], sp.clone()),
        ([0, 1, 0, 1], data.sec_star_p.clone()),
        ([0, 2, 0, 2], d(0, 0) + sp.clone()),
        ([1, 2, 1, 2], d(1, 1) + sp.clone()),
        ([0, 3, 0, 3], d(2, 2) + sp.clone()),
        ([1, 3, 1, 3], d(3, 3) + sp),
        ([0, 2, 1, 2], d(0, 1)),
        ([2, 0, 0, 3], d(0, 2)),
        ([2, 1, 1, 3], d(1, 3)),
        ([0, 3, 1, 3], d(2, 3)),
        ([2, 1, 3, 0], r2130),
        ([2, 0, 1, 3], r2013),
        ([2, 3, 0, 1], r2301),
    ];
    let rf = CurvatureTensor::from_components(MetricFrame::euclidean(4), &comps)?;
    debug_assert!(validate_bianchi(&rf, tol.max(1e-9)).holds);
    // Back to standard coordinates: R(x,..) = R_f(Fᵀx,..).
    rf.pullback(&data.frame.transpose())?.with_frame(MetricFrame::euclidean(4))
}

/// A seeded 4-dimensional tensor for which `e2∧e3` and `e0∧e1` are both
/// critical.
pub fn random_critical_tensor<S: Scalar>(seed: u64) -> Result<CurvatureTensor<S>> {
    let rm = crate::zoo::random_tensor::<S>(4, seed, 0.2)?.tensor;
    let mut m = rm.lambda2_matrix().clone();
    let basis = BladeBasis::new(4, 2)?;
    let pos = |i: usize, j: usize| basis.position(crate::exterior::Blade::from_indices(&[i, j]).expect("sorted")).expect("2-blade");
    for (p, q) in [((2, 3), (0, 2)), ((2, 3), (1, 2)), ((2, 3), (0, 3)), ((2, 3), (1, 3))]
        .into_iter()
        .chain([((0, 1), (0, 2)), ((0, 1), (0, 3)), ((0, 1), (1, 2)), ((0, 1), (1, 3))])
    {
        let (r, c) = (pos(p.0, p.1), pos(q.0, q.1));
        m[(r, c)] = S::zero();
        m[(c, r)] = S::zero();
    }
    CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(4), m)
}
