//! The acceptance criteria as a runnable suite.
//!
//! Each criterion returns a deterministic detail line. Timing is measured
//! but kept out of [`render_report`], so the report text depends only on
//! the seed.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{decompose, ricci, CurvatureTensor};
use crate::error::Result;
use crate::exterior::{Blade, BladeBasis};
use crate::matrix::{rank_binary, Matrix};
use crate::normalform4::{
    extract, finite_diff, random_critical_tensor, reconstruct, sec_gradient_closed, sec_hessian_closed,
};
use crate::oracle::matching_hafnian;
use crate::pure::{
    complementary_subsets, incidence_matrix, lcf_curvature, multiplicative_tensor,
    product_parity_rule, product_space_form_table, pure_commute_check, LambdaTable,
};
use crate::scalar::{Rational, Scalar};
use crate::thorpe::{
    commutes_with_star, p_constant_check, space_form_duality_check, thorpe_operator, thorpe_tensor_entry,
    weyl_operator,
};
use crate::zoo;

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_i64(n)
}

#[derive(Clone, Debug, Default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Keep only criteria whose name or tags contain this string.
    pub filter: Option<String>,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub limit: Duration,
    run: fn(u64) -> Result<Check>,
}

/// Outcome of the checks inside one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub within_limit: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.pass && self.within_limit
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "dim-4 Einstein equivalence", tags: &["einstein", "d4"], limit: secs(5), run: einstein_equivalence },
    Criterion { id: 2, name: "space-form duality identity", tags: &["space-form"], limit: secs(30), run: space_form_duality },
    Criterion { id: 3, name: "S2 x T4 kills C4", tags: &["product", "p-constant"], limit: secs(60), run: s2_t4 },
    Criterion { id: 4, name: "product space-form parity rule", tags: &["product", "parity"], limit: secs(60), run: parity_rule },
    Criterion { id: 5, name: "Weyl counterexample on R8", tags: &["weyl"], limit: secs(60), run: weyl_counterexample },
    Criterion { id: 6, name: "hafnian criterion equivalence", tags: &["hafnian", "pure"], limit: secs(120), run: hafnian_equivalence },
    Criterion { id: 7, name: "sign patterns at d=8", tags: &["hafnian", "pure", "einstein"], limit: secs(60), run: sign_patterns },
    Criterion { id: 8, name: "vanishing biconditionals", tags: &["lcf", "multiplicative"], limit: secs(120), run: vanishing_biconditionals },
    Criterion { id: 9, name: "incidence matrix rank", tags: &["lcf", "incidence"], limit: secs(10), run: incidence_ranks },
    Criterion { id: 10, name: "pp-waves", tags: &["pp", "lorentzian"], limit: secs(60), run: pp_waves },
    Criterion { id: 11, name: "warped product", tags: &["warped", "float"], limit: secs(10), run: warped_product },
    Criterion { id: 12, name: "dim-4 normal-form round trip", tags: &["normalform", "d4"], limit: secs(60), run: normal_form },
    Criterion { id: 13, name: "complex space forms", tags: &["complex"], limit: secs(300), run: complex_space_forms },
    Criterion { id: 14, name: "definitional oracle", tags: &["oracle"], limit: secs(600), run: definitional_oracle },
];

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        self.name.contains(filter) || self.tags.iter().any(|t| t.contains(filter)) || self.id.to_string() == filter
    }

    pub fn run(&self, seed: u64) -> Outcome {
        let start = Instant::now();
        let check = (self.run)(seed).unwrap_or_else(|e| Check::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        Outcome {
            id: self.id,
            name: self.name,
            pass: check.pass,
            within_limit: elapsed <= self.limit,
            detail: check.detail,
            elapsed,
            limit: self.limit,
        }
    }
}

pub fn selected(cfg: &SuiteConfig) -> Vec<&'static Criterion> {
    CRITERIA.iter().filter(|c| cfg.filter.as_deref().map_or(true, |f| c.matches(f))).collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<Outcome> {
    selected(cfg).into_iter().map(|c| c.run(cfg.seed)).collect()
}

/// One line per criterion; timings are reported separately.
pub fn render_report(outcomes: &[Outcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} [{:>2}] {}: {}\n", o.id, o.name, o.detail));
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    out
}

pub fn render_timings(outcomes: &[Outcome]) -> String {
    outcomes
        .iter()
        .map(|o| {
            let flag = if o.within_limit { "" } else { "  OVER LIMIT" };
            format!("[{:>2}] {:>9.3}s / {:>4}s{flag}\n", o.id, o.elapsed.as_secs_f64(), o.limit.as_secs())
        })
        .collect()
}

fn commutes<S: Scalar>(rm: &CurvatureTensor<S>, p: usize) -> Result<bool> {
    Ok(commutes_with_star(&thorpe_operator(rm, p)?, 0.0)?.commutes)
}

fn einstein_equivalence(seed: u64) -> Result<Check> {
    let mut einstein_ok = 0;
    for i in 0..100 {
        let rm = zoo::random_einstein_4d::<Q>(seed.wrapping_add(i))?.tensor;
        if ricci(&rm)?.metric_multiple(0.0).is_some() && commutes(&rm, 2)? {
            einstein_ok += 1;
        }
    }
    let (mut generic, mut generic_fail, mut s) = (0, 0, seed);
    while generic < 100 {
        let rm = zoo::random_tensor::<Q>(4, s, 0.3)?.tensor;
        s = s.wrapping_add(1);
        if decompose(&rm)?.traceless_ricci.is_zero_within(0.0) {
            continue;
        }
        generic += 1;
        if !commutes(&rm, 2)? {
            generic_fail += 1;
        }
    }
    Ok(Check::new(
        einstein_ok == 100 && generic_fail == 100,
        format!("{einstein_ok}/100 Einstein commute; {generic_fail}/100 non-Einstein fail"),
    ))
}

fn space_form_duality(_seed: u64) -> Result<Check> {
    let cases = [(4, 2, 1), (4, 2, -1), (6, 2, 2), (8, 2, 1), (8, 4, -1)];
    let mut good = 0;
    for (d, p, l) in cases {
        if space_form_duality_check(&q(l), d, p)? {
            good += 1;
        }
    }
    Ok(Check::new(good == cases.len(), format!("{good}/{} (d,p,λ) cases hold entrywise", cases.len())))
}

fn s2_t4(seed: u64) -> Result<Check> {
    let rm = zoo::product_space_forms::<Q>(2, &q(1), 4, &q(0))?.tensor;
    let c4_zero = thorpe_operator(&rm, 4)?.is_zero_within(0.0);
    let c2_nonzero = !thorpe_operator(&rm, 2)?.is_zero_within(0.0);
    let sampled = p_constant_check(&rm, 4, 200, seed, 1e-12)?;
    let sampled_zero = sampled.constant && sampled.max.abs() < 1e-12 && sampled.min.abs() < 1e-12;
    Ok(Check::new(
        c4_zero && c2_nonzero && sampled_zero,
        format!("C4=0: {c4_zero}; C2!=0: {c2_nonzero}; 200 samples constant 0: {sampled_zero}"),
    ))
}

fn parity_rule(_seed: u64) -> Result<Check> {
    let grid = [-2, -1, 1, 2];
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in [1usize, 2] {
        for &c1 in &grid {
            for &c2 in &grid {
                cases += 1;
                let rm = zoo::product_space_forms::<Q>(2 * n, &q(c1), 2 * n, &q(c2))?.tensor;
                let by_operator = commutes(&rm, 2 * n)?;
                let by_table = pure_commute_check(&product_space_form_table(&q(c1), &q(c2), n), 0.0)?.pass;
                let rule = product_parity_rule(&q(c1), &q(c2), n);
                if by_operator != rule || by_table != rule {
                    mismatches.push(format!("n={n} c=({c1},{c2})"));
                }
            }
        }
    }
    Ok(Check::new(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{cases}/{cases} grid points match the rule")
        } else {
            format!("mismatches: {}", mismatches.join(", "))
        },
    ))
}

fn weyl_counterexample(seed: u64) -> Result<Check> {
    let rm = zoo::weyl_counterexample_r8::<Q>()?.tensor;
    let w4 = weyl_operator(&rm, 4)?;
    let basis = w4.basis();
    let pos = |ix: &[usize]| basis.position(Blade::from_indices(ix).expect("sorted")).expect("4-blade");
    let (front, back) = (pos(&[0, 1, 2, 3]), pos(&[4, 5, 6, 7]));
    // *(e0123) = e4567, and * maps e0123-components to e4567-components.
    let w_after_star = w4.column(back, &basis).is_zero();
    let star_after_w = !w4.column(front, &basis).is_zero();
    let mut tracefree = 0;
    for i in 0..50 {
        let w = zoo::random_tracefree_weyl_4d::<Q>(seed.wrapping_add(i))?.tensor;
        if commutes_with_star(&weyl_operator(&w, 2)?, 0.0)?.commutes {
            tracefree += 1;
        }
    }
    Ok(Check::new(
        w_after_star && star_after_w && tracefree == 50,
        format!("W4*(e0123)=0: {w_after_star}; *W4(e0123)!=0: {star_after_w}; {tracefree}/50 trace-free d=4 commute"),
    ))
}

fn random_table(rng: &mut ChaCha8Rng, d: usize, structured: bool) -> LambdaTable<Q> {
    if structured {
        let eps: Vec<i64> = (0..d).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let c = rng.gen_range(1..=3);
        LambdaTable::from_fn(d, |i, j| q(c * eps[i] * eps[j]))
    } else {
        LambdaTable::from_fn(d, |_, _| q(rng.gen_range(-1..=1)))
    }
}

fn hafnian_equivalence(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut total, mut passing, mut oracle_ok) = (0, 0, 0, true);
    for (d, count) in [(4usize, 50), (8, 10)] {
        for k in 0..count {
            let t = random_table(&mut rng, d, k % 2 == 1);
            let report = pure_commute_check(&t, 0.0)?;
            let matrix_level = commutes(&t.to_tensor(), d / 2)?;
            total += 1;
            if report.pass == matrix_level {
                agree += 1;
            }
            passing += usize::from(report.pass);
            for p in &report.pairs {
                oracle_ok &= matching_hafnian(&t, &p.subset) == p.value
                    && matching_hafnian(&t, &p.complement) == p.complement_value;
            }
        }
    }
    Ok(Check::new(
        agree == total && oracle_ok,
        format!("{agree}/{total} agree ({passing} commuting); hafnians match the matching oracle: {oracle_ok}"),
    ))
}

fn sign_patterns(_seed: u64) -> Result<Check> {
    let mut pass = 0;
    for bits in 0u32..128 {
        let mut eps: Vec<i64> = (0..7).map(|k| if bits >> k & 1 == 1 { -1 } else { 1 }).collect();
        eps.push(eps.iter().product());
        let t = LambdaTable::from_fn(8, |i, j| q(eps[i] * eps[j]));
        if pure_commute_check(&t, 0.0)?.pass {
            pass += 1;
        }
    }
    let eps = [1, 1, 1, 1, -1, -1, -1, -1];
    let rm = LambdaTable::from_fn(8, |i, j| q(eps[i] * eps[j])).to_tensor();
    let einstein = ricci(&rm)?.metric_multiple(0.0).is_some();
    Ok(Check::new(pass == 128 && einstein, format!("{pass}/128 admissible patterns pass; 4+4 pattern Einstein: {einstein}")))
}

fn vanishing_biconditionals(seed: u64) -> Result<Check> {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut check = |a: &[Q], n: usize| -> Result<()> {
        let zeros = a.iter().filter(|x| x.is_zero()).count();
        let nonzero = a.len() - zeros;
        let mult = thorpe_operator(&multiplicative_tensor(a, &q(1))?, 2 * n)?.is_zero_within(0.0);
        let add = thorpe_operator(&lcf_curvature(a)?, 2 * n)?.is_zero_within(0.0);
        checked += 1;
        if mult != (zeros > 2 * n) || add != (nonzero < n) {
            failures.push(format!("{:?}", a.iter().map(|x| x.to_repr()).collect::<Vec<_>>()));
        }
        Ok(())
    };
    for code in 0..81 {
        let a: Vec<Q> = (0..4).map(|k| q((code / 3i64.pow(k)) % 3 - 1)).collect();
        check(&a, 1)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        // Spread the zero count evenly so both sides of each threshold occur.
        let zeros = rng.gen_range(0..=8);
        let mut a: Vec<Q> = (0..8).map(|k| if k < zeros { q(0) } else { q(if rng.gen_bool(0.5) { 1 } else { -1 }) }).collect();
        for i in (1..8).rev() {
            a.swap(i, rng.gen_range(0..=i));
        }
        check(&a, 2)?;
    }
    Ok(Check::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked}/{checked} vectors obey both thresholds")
        } else {
            format!("{} violations, first {}", failures.len(), failures[0])
        },
    ))
}

fn incidence_ranks(_seed: u64) -> Result<Check> {
    let a = incidence_matrix(4, 2, 1)?;
    let shown: Vec<Vec<u8>> =
        ["1100", "1010", "1001", "0110", "0101", "0011"].iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect();
    let b = incidence_matrix(8, 4, 2)?;
    let (ra, rb) = (rank_binary(&a), rank_binary(&b));
    let ok = a == shown && ra == 4 && rb == 28;
    Ok(Check::new(ok, format!("A(4;2,1) as displayed: {}; ranks {ra} and {rb}", a == shown)))
}

fn pp_waves(seed: u64) -> Result<Check> {
    let mut good = 0;
    let mut total = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in [4usize, 6] {
        for i in 0..20 {
            let v = zoo::random_pp_hessian::<Q>(d, seed.wrapping_add(i))?;
            let potential = q(rng.gen_range(-2..=2));
            let rm = zoo::pp_wave(&v, &potential)?.tensor;
            let higher_zero = (4..=d).step_by(2).try_fold(true, |acc, p| Ok::<_, crate::error::Error>(acc && thorpe_operator(&rm, p)?.is_zero_within(0.0)))?;
            let c2_nonzero = !thorpe_operator(&rm, 2)?.is_zero_within(0.0);
            total += 1;
            if higher_zero && c2_nonzero {
                good += 1;
            }
        }
    }
    Ok(Check::new(good == total, format!("{good}/{total} seeded waves have C2!=0 and C_p=0 for p>=4")))
}

fn warped_product(_seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (eps, t) in [(0.5, std::f64::consts::FRAC_PI_2), (1.0 / 3.0, 1.0)] {
        let w = zoo::warped_circle_sphere(4, eps, t)?;
        let f = 1.0 + eps * t.cos();
        let (f1, f2) = (-eps * t.sin(), -eps * t.cos());
        let rm = &w.entry.tensor;
        worst = worst.max((rm.get(0, 1, 0, 1) + f2 / f).abs());
        worst = worst.max((rm.get(1, 2, 1, 2) - (1.0 - f1 * f1) / (f * f)).abs());
        worst = worst.max((w.s1 + f2 / (2.0 * (1.0 - f1 * f1)).sqrt()).abs());
        worst = worst.max((w.s2 - ((1.0 - f1 * f1) / (2.0 * f * f)).sqrt()).abs());
        worst = worst.max(w.kn_residual()?);
    }
    Ok(Check::new(worst < 1e-10, format!("max deviation from the closed forms and from -S⧄S: {worst:.1e}")))
}

fn normal_form(seed: u64) -> Result<Check> {
    let id = Matrix::<Q>::identity(4);
    let mut exact = 0;
    for i in 0..100 {
        let rm = random_critical_tensor::<Q>(seed.wrapping_add(i))?;
        if reconstruct(&extract(&rm, &id, 0.0)?, 0.0)? == rm {
            exact += 1;
        }
    }
    let idf = Matrix::<f64>::identity(4);
    let (mut gerr, mut herr): (f64, f64) = (0.0, 0.0);
    for i in 0..20 {
        let rm = zoo::random_tensor::<f64>(4, seed.wrapping_add(1000 + i), 0.0)?.tensor;
        let scale = rm.lambda2_matrix().max_abs().max(1.0);
        let (g, h) = finite_diff(&rm, &idf, 1e-4)?;
        let gc = sec_gradient_closed(&rm, &idf)?;
        gerr = gerr.max(g.iter().zip(&gc).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);
        herr = herr.max(h.max_abs_diff(&sec_hessian_closed(&rm, &idf)?) / scale);
    }
    let mut inversion = 0;
    for i in 0..100 {
        let rm = zoo::random_tensor::<Q>(4, seed.wrapping_add(2000 + i), 0.0)?.tensor;
        let a = rm.get(2, 0, 1, 3) - rm.get(2, 3, 0, 1);
        let b = rm.get(2, 1, 0, 3) + rm.get(2, 3, 0, 1);
        if rm.get(2, 1, 3, 0) == -(a.clone() + q(2) * b.clone()) / q(3) && rm.get(2, 0, 1, 3) == (q(2) * a + b) / q(3) {
            inversion += 1;
        }
    }
    Ok(Check::new(
        exact == 100 && gerr < 1e-6 && herr < 1e-4 && inversion == 100,
        format!(
            "{exact}/100 exact round trips; gradient err {gerr:.1e}, Hessian err {herr:.1e}; Bianchi inversion {inversion}/100"
        ),
    ))
}

fn complex_space_forms(_seed: u64) -> Result<Check> {
    let cp2 = zoo::complex_space_form::<Q>(2, &q(1))?.tensor;
    let cp4 = zoo::complex_space_form::<Q>(4, &q(1))?.tensor;
    let c2 = commutes(&cp2, 2)?;
    let c4 = commutes(&cp4, 4)?;
    let w4 = commutes_with_star(&weyl_operator(&cp4, 4)?, 0.0)?.commutes;
    Ok(Check::new(c2 && c4 && w4, format!("CP2 C2: {c2}; CP4 C4: {c4}; CP4 W4: {w4}")))
}

fn basis_vectors(d: usize, b: Blade) -> Vec<Vec<Q>> {
    b.indices().into_iter().map(|i| (0..d).map(|k| q(i64::from(k == i))).collect()).collect()
}

fn definitional_oracle(seed: u64) -> Result<Check> {
    let (mut agree, mut total) = (0, 0);
    let mut entry_matches = |rm: &CurvatureTensor<Q>, p: usize, pairs: &[(usize, usize)]| -> Result<()> {
        let d = rm.dim();
        let op = thorpe_operator(rm, p)?;
        let basis = BladeBasis::new(d, p)?;
        for &(i, j) in pairs {
            let e = thorpe_tensor_entry(rm, p, &basis_vectors(d, basis.blade(i)), &basis_vectors(d, basis.blade(j)))?;
            total += 1;
            // R_p(e_I, e_J) = ⟨Ĉ_p e_I, e_J⟩ on an orthonormal frame.
            if *op.get(j, i) == e {
                agree += 1;
            }
        }
        Ok(())
    };
    for (k, (d, p)) in [(4usize, 2usize), (4, 4), (6, 4)].into_iter().enumerate() {
        let rm = zoo::random_tensor::<Q>(d, seed.wrapping_add(k as u64), 0.3)?.tensor;
        let n = BladeBasis::new(d, p)?.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        entry_matches(&rm, p, &pairs)?;
    }
    let rm = zoo::random_tensor::<Q>(8, seed.wrapping_add(3), 0.3)?.tensor;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = BladeBasis::new(8, 4)?.len();
    let pairs: Vec<(usize, usize)> = (0..50).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    entry_matches(&rm, 4, &pairs)?;
    Ok(Check::new(agree == total, format!("{agree}/{total} blade pairs agree")))
}

/// The complementary subsets used by the 4n-dimensional criteria.
pub fn pair_count(d: usize) -> Result<usize> {
    Ok(complementary_subsets(d)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_are_numbered_and_filterable() {
        let ids: Vec<u8> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=14).collect::<Vec<_>>());
        let pp = selected(&SuiteConfig { seed: 0, filter: Some("pp".into()) });
        assert_eq!(pp.len(), 1);
        assert_eq!(pp[0].id, 10);
        assert_eq!(pair_count(8).unwrap(), 35);
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [2, 7, 9, 11] {
            let o = CRITERIA[id - 1].run(0);
            assert!(o.pass, "{}: {}", o.name, o.detail);
        }
    }

    #[test]
    fn report_has_one_line_per_criterion() {
        let outs: Vec<Outcome> = [9u8, 11].iter().map(|&i| CRITERIA[i as usize - 1].run(0)).collect();
        let text = render_report(&outs);
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("PASS [ 9]"));
    }
}
