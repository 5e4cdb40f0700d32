//! Named curvature models with machine-checkable property tags.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{
    constant_curvature, decompose, kulkarni_nomizu, ricci, validate_bianchi, CurvatureTensor, SymmetricTwoTensor,
    bianchi_project,
};
use crate::error::{Error, Result};
use crate::exterior::{binomial, BladeBasis, MetricFrame};
use crate::matrix::Matrix;
use crate::pure::{is_pure_in_frame, LambdaTable};
use crate::scalar::{Rational, Scalar};
use crate::thorpe::{commutes_with_star, thorpe_operator, weyl_operator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        })
    }
}

/// A claim about a model that [`Tag::verify`] can decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Flat,
    Einstein,
    NotEinstein,
    Pure,
    NotPure,
    /// Weyl part vanishes.
    ConformallyFlat,
    /// Ricci tensor vanishes.
    TraceFree,
    /// `Ĉ_p` commutes with the star.
    Commutes(usize),
    FailsToCommute(usize),
    /// The Weyl operator `Ŵ_p` commutes with the star.
    WeylCommutes(usize),
    WeylFailsToCommute(usize),
    /// `Ĉ_p = 0`.
    Vanishes(usize),
    NonVanishing(usize),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Flat => write!(f, "flat"),
            Tag::Einstein => write!(f, "Einstein"),
            Tag::NotEinstein => write!(f, "non-Einstein"),
            Tag::Pure => write!(f, "pure"),
            Tag::NotPure => write!(f, "non-pure"),
            Tag::ConformallyFlat => write!(f, "W=0"),
            Tag::TraceFree => write!(f, "Ric=0"),
            Tag::Commutes(p) => write!(f, "commutes@p={p}"),
            Tag::FailsToCommute(p) => write!(f, "fails@p={p}"),
            Tag::WeylCommutes(p) => write!(f, "W-commutes@p={p}"),
            Tag::WeylFailsToCommute(p) => write!(f, "W-fails@p={p}"),
            Tag::Vanishes(p) => write!(f, "C{p}=0"),
            Tag::NonVanishing(p) => write!(f, "C{p}!=0"),
        }
    }
}

impl Tag {
    pub fn verify<S: Scalar>(&self, rm: &CurvatureTensor<S>, tol: f64) -> Result<bool> {
        let einstein = || -> Result<bool> { Ok(ricci(rm)?.metric_multiple(tol).is_some()) };
        let star = |weyl: bool, p: usize| -> Result<bool> {
            let op = if weyl { weyl_operator(rm, p)? } else { thorpe_operator(rm, p)? };
            Ok(commutes_with_star(&op, tol)?.commutes)
        };
        Ok(match *self {
            Tag::Flat => rm.is_zero_within(tol),
            Tag::Einstein => einstein()?,
            Tag::NotEinstein => !einstein()?,
            Tag::Pure => is_pure_in_frame(rm)?,
            Tag::NotPure => !is_pure_in_frame(rm)?,
            Tag::ConformallyFlat => decompose(rm)?.weyl.is_zero_within(tol),
            Tag::TraceFree => ricci(rm)?.is_zero_within(tol),
            Tag::Commutes(p) => star(false, p)?,
            Tag::FailsToCommute(p) => !star(false, p)?,
            Tag::WeylCommutes(p) => star(true, p)?,
            Tag::WeylFailsToCommute(p) => !star(true, p)?,
            Tag::Vanishes(p) => thorpe_operator(rm, p)?.is_zero_within(tol),
            Tag::NonVanishing(p) => !thorpe_operator(rm, p)?.is_zero_within(tol),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ZooEntry<S> {
    pub name: String,
    pub signature: Signature,
    pub params: Vec<(String, String)>,
    pub tensor: CurvatureTensor<S>,
    pub tags: Vec<Tag>,
}

impl<S: Scalar> ZooEntry<S> {
    fn new(name: &str, tensor: CurvatureTensor<S>, params: Vec<(&str, String)>, tags: Vec<Tag>) -> Self {
        let signature =
            if tensor.frame().is_euclidean() { Signature::Riemannian } else { Signature::Lorentzian };
        ZooEntry {
            name: name.to_string(),
            signature,
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            tensor,
            tags,
        }
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    /// Evaluates every tag, plus the first Bianchi identity.
    pub fn verify_tags(&self, tol: f64) -> Result<Vec<(String, bool)>> {
        let mut out = vec![("bianchi".to_string(), validate_bianchi(&self.tensor, tol).holds)];
        for t in &self.tags {
            out.push((t.to_string(), t.verify(&self.tensor, tol)?));
        }
        Ok(out)
    }
}

/// Constant curvature: every 2-blade is a `λ`-eigenvector of `Ĉ`.
pub fn space_form<S: Scalar>(d: usize, lambda: &S) -> Result<ZooEntry<S>> {
    if d < 2 {
        return Err(Error::invalid("space form needs dimension ≥ 2"));
    }
    let rm = constant_curvature(&MetricFrame::euclidean(d), lambda)?;
    let mut tags = vec![Tag::Einstein, Tag::Pure];
    if lambda.is_zero() {
        tags.push(Tag::Flat);
    }
    if d >= 4 {
        tags.push(Tag::ConformallyFlat);
    }
    if d % 4 == 0 {
        tags.push(Tag::Commutes(d / 2));
    }
    Ok(ZooEntry::new("space_form", rm, vec![("dim", d.to_string()), ("lambda", lambda.to_repr())], tags))
}

/// Product of space forms with sectional curvatures `c1`, `c2`.
pub fn product_space_forms<S: Scalar>(d1: usize, c1: &S, d2: usize, c2: &S) -> Result<ZooEntry<S>> {
    if d1 % 2 != 0 || d2 % 2 != 0 || d1 == 0 || d2 == 0 {
        return Err(Error::invalid(format!("factor dimensions must be positive and even, got {d1} and {d2}")));
    }
    let d = d1 + d2;
    let table = LambdaTable::from_fn(d, |i, j| match (i < d1, j < d1) {
        (true, true) => -c1.clone(),
        (false, false) => -c2.clone(),
        _ => S::zero(),
    });
    let rm = table.to_tensor();
    let mut tags = vec![Tag::Pure];
    if d % 4 == 0 && d1 == d2 {
        let n = d / 4;
        let commutes = c1 == c2 || (n % 2 == 0 && *c1 == -c2.clone()) || (c1.is_zero() && c2.is_zero());
        tags.push(if commutes { Tag::Commutes(d / 2) } else { Tag::FailsToCommute(d / 2) });
    }
    // A 4-subset needs two disjoint in-factor planes, so a flat factor of
    // dimension ≥ 4 next to a 2-dimensional one kills `Ĉ_4`.
    if d >= 6 && ((d1 == 2 && c2.is_zero()) || (d2 == 2 && c1.is_zero())) {
        tags.push(Tag::Vanishes(4));
    }
    if !(c1.is_zero() && c2.is_zero()) {
        tags.push(Tag::NonVanishing(2));
    }
    let params = vec![("d1", d1.to_string()), ("c1", c1.to_repr()), ("d2", d2.to_string()), ("c2", c2.to_repr())];
    Ok(ZooEntry::new("product_space_forms", rm, params, tags))
}

/// Holomorphic sectional curvature `c` on `ℝ^{2m}` with `J e_{2k} = e_{2k+1}`:
/// `(c/4)[g(X,Z)g(Y,W) − g(X,W)g(Y,Z) + ω(X,Z)ω(Y,W) − ω(X,W)ω(Y,Z) + 2ω(X,Y)ω(Z,W)]`.
pub fn complex_space_form<S: Scalar>(m: usize, c: &S) -> Result<ZooEntry<S>> {
    if m == 0 {
        return Err(Error::invalid("complex dimension must be positive"));
    }
    let d = 2 * m;
    let g = |i: usize, j: usize| i64::from(i == j);
    let w = |i: usize, j: usize| {
        if i / 2 != j / 2 || i == j {
            0
        } else if i % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let r = |x, y, z, v| g(x, z) * g(y, v) - g(x, v) * g(y, z) + w(x, z) * w(y, v) - w(x, v) * w(y, z) + 2 * w(x, y) * w(z, v);
    let basis = BladeBasis::new(d, 2)?;
    let ix: Vec<Vec<usize>> = basis.blades().iter().map(|b| b.indices()).collect();
    let quarter = c.clone() / S::from_i64(4);
    let rmat = Matrix::from_fn(basis.len(), basis.len(), |a, b| {
        quarter.clone() * S::from_i64(r(ix[a][0], ix[a][1], ix[b][0], ix[b][1]))
    });
    let rm = CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(d), rmat)?;
    let mut tags = vec![Tag::Einstein];
    if m >= 2 && !c.is_zero() {
        tags.push(Tag::NotPure);
    }
    if m % 2 == 0 {
        tags.push(Tag::Commutes(m));
        tags.push(Tag::WeylCommutes(m));
    }
    Ok(ZooEntry::new("complex_space_form", rm, vec![("m", m.to_string()), ("c", c.to_repr())], tags))
}

/// Trace-free tensor on ℝ⁴ acting on the self-dual 2-forms
/// `e01+e23, e02−e13, e03+e12` with eigenvalues `2, −1, −1` and
/// annihilating the anti-self-dual ones.
pub fn self_dual_weyl_r4<S: Scalar>() -> CurvatureTensor<S> {
    // Canonical order: e01, e02, e03, e12, e13, e23.
    let vs: [([i64; 6], i64); 3] =
        [([1, 0, 0, 0, 0, 1], 2), ([0, 1, 0, 0, -1, 0], -1), ([0, 0, 1, 1, 0, 0], -1)];
    let half = S::from_ratio(1, 2);
    let rmat = Matrix::from_fn(6, 6, |i, j| {
        half.clone() * S::from_i64(vs.iter().map(|(v, mu)| mu * v[i] * v[j]).sum())
    });
    CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(4), rmat).expect("symmetric")
}

/// `W₁ ⊕ 0` on `ℝ⁸ = ℝ⁴ ⊕ ℝ⁴`, zero on mixed planes.
pub fn weyl_counterexample_r8<S: Scalar>() -> Result<ZooEntry<S>> {
    let w1 = self_dual_weyl_r4::<S>();
    let rm = w1.direct_sum(&CurvatureTensor::zero(MetricFrame::euclidean(4)))?;
    let tags = vec![Tag::TraceFree, Tag::WeylFailsToCommute(4), Tag::NonVanishing(4)];
    Ok(ZooEntry::new("weyl_counterexample_r8", rm, vec![], tags))
}

/// The warped product `S¹ × S^{n−1}` with `f(t) = 1 + ε cos t` at one `t`.
#[derive(Clone, Debug)]
pub struct WarpedModel {
    pub entry: ZooEntry<f64>,
    /// `s₁ = −f''/√(2(1−f'²))` on `dt`, `s₂ = √((1−f'²)/(2f²))` on the sphere.
    pub s: SymmetricTwoTensor<f64>,
    pub s1: f64,
    pub s2: f64,
    /// `Rm = sign · S⧄S`.
    pub sign: f64,
}

pub fn warped_circle_sphere(n: usize, eps: f64, t: f64) -> Result<WarpedModel> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("ε must lie in (0, 1), got {eps}")));
    }
    if n < 3 {
        return Err(Error::invalid("warped product needs dimension ≥ 3"));
    }
    let f = 1.0 + eps * t.cos();
    let f1 = -eps * t.sin();
    let f2 = -eps * t.cos();
    let radial = -f2 / f;
    let fiber = (1.0 - f1 * f1) / (f * f);
    let table = LambdaTable::from_fn(n, |i, _| if i == 0 { radial } else { fiber });
    let rm = table.to_tensor();
    let s1 = -f2 / (2.0 * (1.0 - f1 * f1)).sqrt();
    let s2 = ((1.0 - f1 * f1) / (2.0 * f * f)).sqrt();
    let frame = MetricFrame::euclidean(n);
    let diag: Vec<f64> = (0..n).map(|i| if i == 0 { s1 } else { s2 }).collect();
    let s = SymmetricTwoTensor::diagonal(&frame, &diag)?;
    let params = vec![("n", n.to_string()), ("eps", eps.to_string()), ("t", t.to_string())];
    let entry = ZooEntry::new("warped_circle_sphere", rm, params, vec![Tag::Pure]);
    Ok(WarpedModel { entry, s, s1, s2, sign: -1.0 })
}

impl WarpedModel {
    /// Largest deviation of `Rm` from `sign · S⧄S`.
    pub fn kn_residual(&self) -> Result<f64> {
        let kn = kulkarni_nomizu(&self.s, &self.s)?.scale(&self.sign);
        Ok(self.entry.tensor.lambda2_matrix().max_abs_diff(kn.lambda2_matrix()))
    }
}

/// Lorentzian model on coordinates `(v, u, x…)` with
/// `g = dv⊗du + du⊗dv − 2V du⊗du + Σ dx⊗dx` and only
/// `R(∂_i, ∂_u, ∂_u, ∂_j) = V_ij` nonzero.
pub fn pp_wave<S: Scalar>(hessian: &Matrix<S>, potential: &S) -> Result<ZooEntry<S>> {
    let k = hessian.nrows();
    let d = k + 2;
    if !hessian.is_square() || d < 4 || d % 2 != 0 {
        return Err(Error::invalid(format!("pp-wave needs a square Hessian of even size ≥ 2, got {k}×{}", hessian.ncols())));
    }
    if !hessian.is_symmetric(0.0) {
        return Err(Error::invalid("pp-wave Hessian must be symmetric"));
    }
    let metric = Matrix::from_fn(d, d, |i, j| match (i, j) {
        (0, 1) | (1, 0) => S::one(),
        (1, 1) => S::from_i64(-2) * potential.clone(),
        (i, j) if i == j && i >= 2 => S::one(),
        _ => S::zero(),
    });
    let frame = MetricFrame::new(metric, 1)?;
    let mut comps = Vec::new();
    for i in 0..k {
        for j in i..k {
            if !hessian[(i, j)].is_zero() {
                comps.push(([i + 2, 1, 1, j + 2], hessian[(i, j)].clone()));
            }
        }
    }
    let rm = CurvatureTensor::from_components(frame, &comps)?;
    let mut tags: Vec<Tag> = (4..=d).step_by(2).map(Tag::Vanishes).collect();
    tags.push(if hessian.is_zero_within(0.0) { Tag::Flat } else { Tag::NonVanishing(2) });
    let params = vec![("dim", d.to_string()), ("potential", potential.to_repr())];
    Ok(ZooEntry::new("pp_wave", rm, params, tags))
}

/// Nonzero random symmetric integer Hessian in `[-3, 3]`.
pub fn random_pp_hessian<S: Scalar>(d: usize, seed: u64) -> Result<Matrix<S>> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::invalid(format!("pp-wave dimension must be even and ≥ 4, got {d}")));
    }
    let k = d - 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = S::from_i64(rng.gen_range(-3..=3));
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        if !m.is_zero_within(0.0) {
            return Ok(m);
        }
    }
}

/// Symmetric integer Λ² matrix in `[-3, 3]` with each entry zeroed with
/// probability `sparsity`, projected onto the Bianchi subspace.
pub fn random_tensor<S: Scalar>(d: usize, seed: u64, sparsity: f64) -> Result<ZooEntry<S>> {
    if d < 2 {
        return Err(Error::invalid("random tensor needs dimension ≥ 2"));
    }
    if !(0.0..=1.0).contains(&sparsity) {
        return Err(Error::invalid(format!("sparsity must lie in [0, 1], got {sparsity}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = binomial(d, 2);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: i64 = rng.gen_range(-3..=3);
            if rng.gen_bool(sparsity) {
                continue;
            }
            m[(i, j)] = S::from_i64(v);
            m[(j, i)] = S::from_i64(v);
        }
    }
    let rm = bianchi_project(&CurvatureTensor::from_lambda2_matrix(MetricFrame::euclidean(d), m)?);
    let params = vec![("dim", d.to_string()), ("seed", seed.to_string()), ("sparsity", sparsity.to_string())];
    Ok(ZooEntry::new("random_tensor", rm, params, vec![]))
}

/// Random Weyl part plus a random multiple of `g⧄g`.
pub fn random_einstein_4d<S: Scalar>(seed: u64) -> Result<ZooEntry<S>> {
    let w = decompose(&random_tensor::<S>(4, seed, 0.0)?.tensor)?.weyl;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let lambda = S::from_i64(rng.gen_range(-3..=3));
    let rm = w.add(&constant_curvature(w.frame(), &lambda)?)?;
    let tags = vec![Tag::Einstein, Tag::Commutes(2)];
    Ok(ZooEntry::new("random_einstein_4d", rm, vec![("seed", seed.to_string())], tags))
}

/// The Weyl part of a random tensor.
pub fn random_tracefree_weyl_4d<S: Scalar>(seed: u64) -> Result<ZooEntry<S>> {
    let w = decompose(&random_tensor::<S>(4, seed, 0.0)?.tensor)?.weyl;
    let tags = vec![Tag::TraceFree, Tag::WeylCommutes(2), Tag::Commutes(2)];
    Ok(ZooEntry::new("random_tracefree_weyl_4d", w, vec![("seed", seed.to_string())], tags))
}

/// String parameters for [`build`], with defaults filled in per model.
#[derive(Clone, Debug, Default)]
pub struct ZooParams(BTreeMap<String, String>);

impl ZooParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<&mut Self> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("parameter `{pair}` is not of the form key=value")))?;
        Ok(self.set(k.trim(), v.trim()))
    }

    fn raw<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.0.get(key).map(String::as_str).unwrap_or(default)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: &str) -> Result<T> {
        let raw = self.raw(key, default);
        raw.parse().map_err(|_| Error::Parse(format!("parameter `{key}`: cannot parse `{raw}`")))
    }

    fn scalar<S: Scalar>(&self, key: &str, default: &str) -> Result<S> {
        S::parse_scalar(self.raw(key, default)).map_err(|e| Error::Parse(format!("parameter `{key}`: {e}")))
    }

    fn check_known(&self, known: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!("unknown parameter `{k}`; expected one of: {}", known.join(", ")))),
            None => Ok(()),
        }
    }
}

/// A built model, exact or floating point.
#[derive(Clone, Debug)]
pub enum Generated {
    Exact(ZooEntry<Rational>),
    Float(ZooEntry<f64>),
}

impl Generated {
    pub fn name(&self) -> &str {
        match self {
            Generated::Exact(e) => &e.name,
            Generated::Float(e) => &e.name,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Generated::Exact(e) => e.dim(),
            Generated::Float(e) => e.dim(),
        }
    }

    pub fn signature(&self) -> Signature {
        match self {
            Generated::Exact(e) => e.signature,
            Generated::Float(e) => e.signature,
        }
    }

    pub fn tags(&self) -> &[Tag] {
        match self {
            Generated::Exact(e) => &e.tags,
            Generated::Float(e) => &e.tags,
        }
    }

    pub fn verify_tags(&self, tol: f64) -> Result<Vec<(String, bool)>> {
        match self {
            Generated::Exact(e) => e.verify_tags(tol),
            Generated::Float(e) => e.verify_tags(tol),
        }
    }
}

pub struct CatalogItem {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names with default values.
    pub params: &'static [(&'static str, &'static str)],
}

pub const CATALOG: &[CatalogItem] = &[
    CatalogItem { name: "space_form", summary: "constant curvature, Ĉ = λ·I", params: &[("dim", "4"), ("lambda", "1")] },
    CatalogItem {
        name: "product_space_forms",
        summary: "product of two space forms",
        params: &[("d1", "2"), ("c1", "1"), ("d2", "2"), ("c2", "1")],
    },
    CatalogItem { name: "s2xs2", summary: "product of two unit 2-spheres", params: &[] },
    CatalogItem { name: "s2xt4", summary: "unit 2-sphere times a flat 4-torus", params: &[] },
    CatalogItem {
        name: "complex_space_form",
        summary: "constant holomorphic sectional curvature c",
        params: &[("m", "2"), ("c", "1")],
    },
    CatalogItem { name: "weyl_counterexample_r8", summary: "self-dual Weyl tensor on ℝ⁴ ⊕ 0", params: &[] },
    CatalogItem {
        name: "warped_circle_sphere",
        summary: "S¹ × S^{n−1} warped by 1 + ε cos t (float)",
        params: &[("n", "4"), ("eps", "0.5"), ("t", "1.5707963267948966")],
    },
    CatalogItem {
        name: "pp_wave",
        summary: "Lorentzian pp-wave with a seeded constant Hessian",
        params: &[("dim", "6"), ("seed", "0"), ("potential", "0")],
    },
    CatalogItem { name: "random_einstein_4d", summary: "random Einstein tensor", params: &[("seed", "0")] },
    CatalogItem { name: "random_tracefree_weyl_4d", summary: "random Weyl tensor", params: &[("seed", "0")] },
    CatalogItem {
        name: "random_tensor",
        summary: "random algebraic curvature tensor",
        params: &[("dim", "4"), ("seed", "0"), ("sparsity", "0.5")],
    },
];

pub fn catalog_item(name: &str) -> Option<&'static CatalogItem> {
    CATALOG.iter().find(|c| c.name == name)
}

/// Builds a catalog model by name.
pub fn build(name: &str, params: &ZooParams) -> Result<Generated> {
    let item = catalog_item(name).ok_or_else(|| Error::invalid(format!("unknown model `{name}`")))?;
    let known: Vec<&str> = item.params.iter().map(|(k, _)| *k).collect();
    params.check_known(&known)?;
    let def = |k: &str| item.params.iter().find(|(n, _)| *n == k).map(|(_, v)| *v).unwrap_or("");
    type Q = Rational;
    let q = |n: i64| Q::from_i64(n);
    Ok(match name {
        "space_form" => Generated::Exact(space_form(params.parse("dim", def("dim"))?, &params.scalar::<Q>("lambda", def("lambda"))?)?),
        "product_space_forms" => Generated::Exact(product_space_forms(
            params.parse("d1", def("d1"))?,
            &params.scalar::<Q>("c1", def("c1"))?,
            params.parse("d2", def("d2"))?,
            &params.scalar::<Q>("c2", def("c2"))?,
        )?),
        "s2xs2" => Generated::Exact(renamed(product_space_forms(2, &q(1), 2, &q(1))?, "s2xs2")),
        "s2xt4" => Generated::Exact(renamed(product_space_forms(2, &q(1), 4, &q(0))?, "s2xt4")),
        "complex_space_form" => {
            Generated::Exact(complex_space_form(params.parse("m", def("m"))?, &params.scalar::<Q>("c", def("c"))?)?)
        }
        "weyl_counterexample_r8" => Generated::Exact(weyl_counterexample_r8()?),
        "warped_circle_sphere" => Generated::Float(
            warped_circle_sphere(params.parse("n", def("n"))?, params.parse("eps", def("eps"))?, params.parse("t", def("t"))?)?
                .entry,
        ),
        "pp_wave" => {
            let d: usize = params.parse("dim", def("dim"))?;
            let seed: u64 = params.parse("seed", def("seed"))?;
            let mut e = pp_wave(&random_pp_hessian::<Q>(d, seed)?, &params.scalar::<Q>("potential", def("potential"))?)?;
            e.params.push(("seed".into(), seed.to_string()));
            Generated::Exact(e)
        }
        "random_einstein_4d" => Generated::Exact(random_einstein_4d(params.parse("seed", def("seed"))?)?),
        "random_tracefree_weyl_4d" => Generated::Exact(random_tracefree_weyl_4d(params.parse("seed", def("seed"))?)?),
        "random_tensor" => Generated::Exact(random_tensor(
            params.parse("dim", def("dim"))?,
            params.parse("seed", def("seed"))?,
            params.parse("sparsity", def("sparsity"))?,
        )?),
        _ => unreachable!("catalog and builder agree"),
    })
}

fn renamed<S>(mut e: ZooEntry<S>, name: &str) -> ZooEntry<S> {
    e.name = name.to_string();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::raise_to_lambda2;
    use crate::exterior::{Blade, PVector};
    use crate::operator::OperatorMatrix;
    use num_traits::Zero;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn all_tags_hold(e: &Generated) {
        for (tag, ok) in e.verify_tags(1e-9).unwrap() {
            assert!(ok, "{}: tag {tag} failed", e.name());
        }
    }

    #[test]
    fn every_catalog_model_satisfies_its_tags() {
        assert!(CATALOG.len() >= 9);
        for item in CATALOG {
            all_tags_hold(&build(item.name, &ZooParams::new()).unwrap());
        }
    }

    #[test]
    fn space_form_powers() {
        let e = space_form(8, &q(2)).unwrap();
        let c4 = thorpe_operator(&e.tensor, 4).unwrap();
        assert_eq!(c4, OperatorMatrix::identity(8, 4).scale(&q(4)));
        assert!(space_form(4, &q(0)).unwrap().tensor.is_zero_within(0.0));
    }

    #[test]
    fn product_examples() {
        for (d1, c1, d2, c2) in [(2, 1, 2, 1), (4, 1, 4, -1), (2, 1, 4, 0), (2, 1, 2, -1), (4, 1, 4, 2)] {
            let e = product_space_forms(d1, &q(c1), d2, &q(c2)).unwrap();
            for (tag, ok) in e.verify_tags(0.0).unwrap() {
                assert!(ok, "({d1},{c1},{d2},{c2}) {tag}");
            }
        }
        let e = product_space_forms(4, &q(1), 4, &q(-1)).unwrap();
        assert!(e.tags.contains(&Tag::Commutes(4)));
        let e = product_space_forms(2, &q(1), 2, &q(-1)).unwrap();
        assert!(e.tags.contains(&Tag::FailsToCommute(2)));
        assert!(product_space_forms(3, &q(1), 3, &q(1)).is_err());
    }

    #[test]
    fn cp2_kahler_form_is_an_eigenvector() {
        let e = complex_space_form(2, &q(1)).unwrap();
        let op = raise_to_lambda2(&e.tensor).unwrap();
        let d = 4;
        let mut omega = PVector::zero(d, 2);
        omega.add_term(Blade::from_indices(&[0, 1]).unwrap(), q(1));
        omega.add_term(Blade::from_indices(&[2, 3]).unwrap(), q(1));
        let image = op.apply(&omega).unwrap();
        let mu = image.get(Blade::from_indices(&[0, 1]).unwrap());
        assert!(!mu.is_zero());
        assert_eq!(image, omega.scale(&mu));
        assert!(!crate::exterior::wedge(&omega, &omega).unwrap().is_zero());
        // Holomorphic planes have λ = c.
        assert_eq!(e.tensor.get(0, 1, 0, 1), q(1));
        assert_eq!(e.tensor.get(0, 2, 0, 2), Q::new(1.into(), 4.into()));
    }

    #[test]
    fn cp4_commutes_in_middle_degree() {
        let e = complex_space_form(4, &q(1)).unwrap();
        for t in [Tag::Commutes(4), Tag::WeylCommutes(4), Tag::Einstein] {
            assert!(t.verify(&e.tensor, 0.0).unwrap(), "{t}");
        }
    }

    #[test]
    fn weyl_counterexample_witness() {
        let w1 = self_dual_weyl_r4::<Q>();
        assert!(decompose(&w1).unwrap().weyl == w1);
        assert!(commutes_with_star(&raise_to_lambda2(&w1).unwrap(), 0.0).unwrap().commutes);
        let e = weyl_counterexample_r8::<Q>().unwrap();
        let w4 = weyl_operator(&e.tensor, 4).unwrap();
        let basis = w4.basis();
        let e0123 = basis.position(Blade::from_indices(&[0, 1, 2, 3]).unwrap()).unwrap();
        let e4567 = basis.position(Blade::from_indices(&[4, 5, 6, 7]).unwrap()).unwrap();
        // Ŵ₄ applied to *(e0123) = e4567 vanishes, but Ŵ₄(e0123) does not.
        assert!(w4.column(e4567, &basis).is_zero());
        assert!(!w4.get(e0123, e0123).is_zero());
        let rep = commutes_with_star(&w4, 0.0).unwrap();
        assert!(!rep.commutes);
        assert_eq!(rep.witness.unwrap().0, basis.blade(e0123));
        assert_eq!(rep.witness.unwrap().1, basis.blade(e4567));
    }

    #[test]
    fn warped_values_at_quarter_turn() {
        let w = warped_circle_sphere(4, 0.5, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(w.entry.tensor.get(0, 1, 0, 1).abs() < 1e-15);
        assert!((w.entry.tensor.get(1, 2, 1, 2) - 0.75).abs() < 1e-15);
        assert!(w.s1.abs() < 1e-15);
        assert!(w.kn_residual().unwrap() < 1e-12);
        let w = warped_circle_sphere(5, 1.0 / 3.0, 1.0).unwrap();
        assert!(w.kn_residual().unwrap() < 1e-12);
        assert!(warped_circle_sphere(4, 1.0, 0.0).is_err());
        assert!(warped_circle_sphere(4, 0.0, 0.0).is_err());
    }

    #[test]
    fn pp_wave_operators() {
        let v = random_pp_hessian::<Q>(6, 3).unwrap();
        let e = pp_wave(&v, &q(0)).unwrap();
        assert_eq!(e.signature, Signature::Lorentzian);
        all_tags_hold(&Generated::Exact(e.clone()));
        // The image of Ĉ is spanned by the blades ∂_i∧∂_v.
        let op = raise_to_lambda2(&e.tensor).unwrap();
        let basis = op.basis();
        for r in 0..op.size() {
            let b = basis.blade(r);
            if !(b.contains(0) && !b.contains(1)) {
                assert!((0..op.size()).all(|c| op.get(r, c).is_zero()));
            }
        }
        assert!(pp_wave(&Matrix::<Q>::zeros(4, 4), &q(1)).unwrap().tensor.is_zero_within(0.0));
        let asym = Matrix::from_fn(2, 2, |i, j| q((i * 2 + j) as i64));
        assert!(pp_wave(&asym, &q(0)).is_err());
    }

    #[test]
    fn random_generators() {
        assert!(Tag::Commutes(2).verify(&random_einstein_4d::<Q>(1).unwrap().tensor, 0.0).unwrap());
        assert!(Tag::WeylCommutes(2).verify(&random_tracefree_weyl_4d::<Q>(7).unwrap().tensor, 0.0).unwrap());
        let r = random_tensor::<Q>(4, 3, 0.5).unwrap();
        assert!(validate_bianchi(&r.tensor, 0.0).holds);
        let traceless = decompose(&r.tensor).unwrap().traceless_ricci;
        assert!(!traceless.is_zero_within(0.0));
        assert!(Tag::FailsToCommute(2).verify(&r.tensor, 0.0).unwrap());
        assert_eq!(random_tensor::<Q>(5, 9, 0.3).unwrap().tensor, random_tensor::<Q>(5, 9, 0.3).unwrap().tensor);
    }

    #[test]
    fn params_are_checked() {
        let mut p = ZooParams::new();
        p.set("bogus", "1");
        assert!(build("space_form", &p).is_err());
        assert!(build("nope", &ZooParams::new()).is_err());
        let mut p = ZooParams::new();
        p.set_pair("lambda=-3/2").unwrap().set("dim", "6");
        let Generated::Exact(e) = build("space_form", &p).unwrap() else { panic!("exact model") };
        assert_eq!(e.tensor.get(0, 1, 0, 1), Q::new((-3).into(), 2.into()));
    }
}
