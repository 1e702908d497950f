//! Batch checks over characters: identities, functional equation, zero
//! scans and pre-image structure, each folded into a [`VerificationSummary`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::characters::{enumerate_characters, verify_axioms, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lfunction::{
    conjugation_check, eval, eval_euler, eval_hurwitz_sum, eval_series, euler_factor, functional_equation_check,
    Target,
};
use crate::preimage::{check_intertwining, find_strips, fundamental_domains, gamma_prime_curves, CurveKind, Window};
use crate::report::{VerificationSummary, Worst};
use crate::zeros::{find_zeros, verify_rh, verify_simple, Zero};

/// Default seed for the random evaluation points.
pub const DEFAULT_SEED: u64 = 20_240_501;
pub const FACTORIZATION_TOL: f64 = 1e-9;
pub const FE_TOL: f64 = 1e-7;
pub const ROOT_NUMBER_TOL: f64 = 1e-10;
/// Conjugation residuals are scaled by `max(1, |L|)`.
pub const CONJUGATION_TOL: f64 = 1e-10;
pub const RH_TOL: f64 = 1e-8;
pub const SIMPLE_THRESHOLD: f64 = 1e-6;
/// Window used for strip and intertwining checks.
pub const STRIP_SIGMA: (f64, f64) = (-2.0, 6.0);
pub const STRIP_T_MIN: f64 = 0.5;

fn params(chi: &DirichletCharacter) -> serde_json::Value {
    json!({ "q": chi.modulus(), "index": chi.index() })
}

fn with_params(mut s: VerificationSummary, chi: &DirichletCharacter) -> VerificationSummary {
    if let serde_json::Value::Object(map) = &mut s.parameters {
        map.insert("q".into(), chi.modulus().into());
        map.insert("index".into(), chi.index().into());
    }
    s
}

/// A failed check that could not be run at all.
pub fn errored(check: &str, chi: &DirichletCharacter, e: &Error) -> VerificationSummary {
    VerificationSummary::upper_bound(check, f64::NAN, None, 0.0, 0, params(chi)).fail(e.to_string())
}

pub fn check_axioms(chi: &DirichletCharacter) -> VerificationSummary {
    let r = verify_axioms(chi);
    let s = VerificationSummary::upper_bound(
        "axioms",
        if r.is_ok() { 0.0 } else { 1.0 },
        None,
        0.5,
        chi.modulus() as usize,
        params(chi),
    );
    match r {
        Ok(()) => s,
        Err(why) => s.fail(why),
    }
}

/// 20 points: `Re s` in `{-1, 0.5, 2, 3}` times five heights.
pub fn factorization_grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for sigma in [-1.0, 0.5, 2.0, 3.0] {
        for t in [-13.7, -2.9, 0.6, 7.3, 18.1] {
            out.push(Complex64::new(sigma, t));
        }
    }
    out
}

/// `L(s; chi) = L(s; chi*) prod_{p | q} (1 - chi*(p) p^{-s})`, the left side
/// summed over Hurwitz zeta values mod `q` and the right side evaluated mod
/// the conductor. For principal characters this is `zeta(s) prod (1 - p^{-s})`.
pub fn check_factorization(chi: &DirichletCharacter, points: &[Complex64]) -> VerificationSummary {
    let star = chi.primitive_inducer();
    let mut worst = Worst::max();
    for &s in points {
        let r = (|| -> Result<f64> {
            let lhs = eval_hurwitz_sum(chi, s)?.value;
            let rhs = eval(&star, s)?.value * euler_factor(&star, chi.modulus(), s);
            Ok((lhs - rhs).norm())
        })();
        worst.push_max(r.unwrap_or(f64::NAN), s);
    }
    let s = VerificationSummary::upper_bound(
        "factor",
        worst.value,
        worst.location,
        FACTORIZATION_TOL,
        worst.count,
        json!({ "conductor": star.modulus() }),
    );
    with_params(s, chi)
}

/// `n` seeded points uniform in `sigma_range x t_range`.
pub fn random_points(seed: u64, n: usize, sigma: (f64, f64), t: (f64, f64)) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(sigma.0..=sigma.1), rng.gen_range(t.0..=t.1)))
        .collect()
}

/// The 25 functional-equation points: `-2 <= Re s <= 3`, `|Im s| <= 30`.
pub fn fe_points(seed: u64) -> Vec<Complex64> {
    random_points(seed, 25, (-2.0, 3.0), (-30.0, 30.0))
}

/// Functional-equation residual at each point, plus `||eps| - 1|`.
pub fn check_functional_equation(chi: &DirichletCharacter, points: &[Complex64]) -> VerificationSummary {
    let mut worst = Worst::max();
    let mut eps_dev = f64::NAN;
    for &s in points {
        match functional_equation_check(chi, s) {
            Ok(r) => {
                worst.push_max(r.residual, s);
                eps_dev = (r.epsilon_chi.norm() - 1.0).abs();
            }
            Err(e) => return errored("fe", chi, &e),
        }
    }
    let s = VerificationSummary::upper_bound(
        "fe",
        worst.value,
        worst.location,
        FE_TOL,
        worst.count,
        json!({ "root_number_deviation": eps_dev, "root_number_tol": ROOT_NUMBER_TOL }),
    );
    let s = with_params(s, chi);
    if s.status.is_pass() && !(eps_dev < ROOT_NUMBER_TOL) {
        s.fail(format!("||eps| - 1| = {eps_dev:e}"))
    } else {
        s
    }
}

pub fn check_conjugation(chi: &DirichletCharacter, points: &[Complex64]) -> VerificationSummary {
    let mut worst = Worst::max();
    for &s in points {
        let r = conjugation_check(chi, s)
            .and_then(|d| Ok(d / eval(chi, s.conj())?.value.norm().max(1.0)))
            .unwrap_or(f64::NAN);
        worst.push_max(r, s);
    }
    let s = VerificationSummary::upper_bound(
        "conj",
        worst.value,
        worst.location,
        CONJUGATION_TOL,
        worst.count,
        json!({ "scaled_by": "max(1, |L|)" }),
    );
    with_params(s, chi)
}

/// Points in the region of absolute convergence.
pub fn convergence_grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for sigma in [1.5, 2.0, 3.0] {
        for t in [0.0, 5.0, -12.5, 30.0] {
            out.push(Complex64::new(sigma, t));
        }
    }
    out
}

/// `eval`, `eval_series` and `eval_euler` agree pairwise within the sum of
/// their error estimates. Worst value: `|a - b| / (err_a + err_b)`.
pub fn check_oracles(chi: &DirichletCharacter, points: &[Complex64], terms: usize) -> VerificationSummary {
    let mut worst = Worst::max();
    for &s in points {
        let r = (|| -> Result<f64> {
            let a = eval(chi, s)?;
            let b = eval_series(chi, s, terms)?;
            let c = eval_euler(chi, s, terms as u64)?;
            let ratio = |x: &crate::lfunction::EvalResult, y: &crate::lfunction::EvalResult| {
                (x.value - y.value).norm() / (x.est_error + y.est_error)
            };
            Ok(ratio(&a, &b).max(ratio(&a, &c)).max(ratio(&b, &c)))
        })();
        worst.push_max(r.unwrap_or(f64::NAN), s);
    }
    let s = VerificationSummary::upper_bound(
        "oracles",
        worst.value,
        worst.location,
        1.0,
        worst.count,
        json!({ "terms": terms, "prime_bound": terms }),
    );
    with_params(s, chi)
}

/// Zeros of `L` and `L'` with `0 <= t <= t_max` and their checks.
#[derive(Debug, Clone)]
pub struct ZeroChecks {
    pub zeros: Vec<Zero>,
    pub derivative_zeros: Vec<Zero>,
    pub rh: VerificationSummary,
    pub simple: VerificationSummary,
    pub simple_derivative: VerificationSummary,
}

pub fn check_zeros(chi: &DirichletCharacter, t_max: f64) -> Result<ZeroChecks> {
    let (zeros, derivative_zeros) = if t_max > 0.0 {
        (
            find_zeros(chi, 0.0, t_max, Target::L)?,
            find_zeros(chi, 0.0, t_max, Target::LPrime)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let rh = with_params(verify_rh(&zeros, RH_TOL, Some(chi)), chi);
    let simple = with_params(verify_simple(&zeros, SIMPLE_THRESHOLD), chi);
    let mut simple_derivative = with_params(verify_simple(&derivative_zeros, SIMPLE_THRESHOLD), chi);
    simple_derivative.check = "simple_lprime".into();
    Ok(ZeroChecks {
        zeros,
        derivative_zeros,
        rh,
        simple,
        simple_derivative,
    })
}

pub fn strip_window(t_max: f64) -> Window {
    Window::new(STRIP_SIGMA.0, STRIP_SIGMA.1, STRIP_T_MIN, t_max)
}

/// For every strip fully inside the window: at least one zero, one branch
/// point fewer than zeros, a unique `Gamma_{k,0}`; with `domains`, also as
/// many fundamental domains as zeros, one zero in each, each injective on
/// its witness mesh. Worst value: the number of violations.
pub fn check_strips(chi: &DirichletCharacter, window: Window, domains: bool) -> VerificationSummary {
    let strips = match find_strips(chi, window) {
        Ok(s) => s,
        Err(Error::WindowTooSmall) => Vec::new(),
        Err(e) => return errored("strips", chi, &e),
    };
    let mut violations = 0usize;
    let mut first: Option<String> = None;
    let mut report = Vec::new();
    for s in strips.iter().filter(|s| s.complete) {
        let j = s.zeros_inside.len();
        let b = s.branch_points_inside.len();
        let g0 = s.gamma_zero_count();
        let mut problems = Vec::new();
        if j == 0 {
            problems.push("no zero".to_string());
        }
        if b + 1 != j {
            problems.push(format!("{j} zeros but {b} branch points"));
        }
        if g0 != 1 {
            problems.push(format!("{g0} gamma_zero curves"));
        }
        let mut n_domains = None;
        if domains && j > 0 {
            match fundamental_domains(chi, s, window) {
                Ok(d) => {
                    n_domains = Some(d.len());
                    if d.len() != j {
                        problems.push(format!("{} domains for {j} zeros", d.len()));
                    }
                    if d.iter().any(|d| d.zeros_inside.len() != 1) {
                        problems.push("a domain without exactly one zero".into());
                    }
                    if d.iter().any(|d| !d.injective) {
                        problems.push("injectivity witness failed".into());
                    }
                }
                Err(e) => problems.push(e.to_string()),
            }
        }
        let zeros: Vec<[f64; 2]> = s.zeros_inside.iter().map(|z| [z.location.re, z.location.im]).collect();
        report.push(json!({
            "zeros": zeros,
            "branch_points": b,
            "gamma_zero": g0,
            "domains": n_domains,
            "problems": problems,
        }));
        if !problems.is_empty() {
            violations += 1;
            first.get_or_insert_with(|| problems.join("; "));
        }
    }
    let s = VerificationSummary::upper_bound(
        if domains { "domains" } else { "strips" },
        violations as f64,
        None,
        0.5,
        report.len(),
        json!({
            "window": [window.sigma_min, window.sigma_max, window.t_min, window.t_max],
            "complete_strips": report,
        }),
    );
    let s = with_params(s, chi);
    match first {
        Some(why) => s.fail(why),
        None => s,
    }
}

/// Intertwining on every `Gamma'` component crossing the window.
pub fn check_intertwining_all(chi: &DirichletCharacter, window: Window) -> VerificationSummary {
    let curves = match gamma_prime_curves(chi, window) {
        Ok(c) => c,
        Err(e) => return errored("intertwine", chi, &e),
    };
    let mut worst = Worst::max();
    let mut failure = None;
    let mut tangents = 0;
    for c in curves.iter().filter(|c| c.kind == CurveKind::GammaPrime) {
        match check_intertwining(chi, c, window) {
            Ok(r) => {
                tangents += r.count;
                if let Some(at) = r.worst_location {
                    worst.push_max(r.worst_value, at);
                }
                if !r.status.is_pass() && failure.is_none() {
                    failure = r.detail.clone().or(Some("intertwining failed".into()));
                }
            }
            Err(e) => {
                failure.get_or_insert(e.to_string());
            }
        }
    }
    let s = VerificationSummary::upper_bound(
        "intertwine",
        worst.value,
        worst.location,
        1e-6,
        tangents,
        json!({
            "curves": curves.len(),
            "window": [window.sigma_min, window.sigma_max, window.t_min, window.t_max],
        }),
    );
    let s = with_params(s, chi);
    match failure {
        Some(why) => s.fail(why),
        None => s,
    }
}

/// Every check for every character of every modulus `q <= q_max`, zeros up
/// to `t_max`. Failures are recorded, never abort the run.
pub fn report_suite(q_max: u64, t_max: f64, seed: u64) -> Result<Vec<VerificationSummary>> {
    if !(1..=100).contains(&q_max) {
        return Err(Error::InvalidArgument(format!("q_max = {q_max} must be in 1..=100")));
    }
    if !(0.0..=200.0).contains(&t_max) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be in [0, 200]")));
    }
    let grid = factorization_grid();
    let fe = fe_points(seed);
    let mut out = Vec::new();
    for q in 1..=q_max {
        for chi in enumerate_characters(q) {
            out.push(check_axioms(&chi));
            out.push(check_factorization(&chi, &grid));
            if chi.is_primitive() && q > 1 {
                out.push(check_functional_equation(&chi, &fe));
            }
            out.push(check_conjugation(&chi, &fe));
            match check_zeros(&chi, t_max) {
                Ok(z) => out.extend([z.rh, z.simple, z.simple_derivative]),
                Err(e) => out.push(errored("zeros", &chi, &e)),
            }
            if t_max > STRIP_T_MIN + 1.0 {
                let w = strip_window(t_max);
                out.push(check_strips(&chi, w, true));
                out.push(check_intertwining_all(&chi, w));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_are_reproducible() {
        assert_eq!(fe_points(7), fe_points(7));
        assert_ne!(fe_points(7), fe_points(8));
        for p in fe_points(DEFAULT_SEED) {
            assert!((-2.0..=3.0).contains(&p.re) && p.im.abs() <= 30.0);
        }
    }

    #[test]
    fn grid_has_twenty_points_with_continuation() {
        let g = factorization_grid();
        assert_eq!(g.len(), 20);
        assert!(g.iter().any(|s| s.re == -1.0) && g.iter().any(|s| s.re == 0.5));
    }

    #[test]
    fn zeta_only_suite_without_zeros() {
        let r = report_suite(1, 0.0, DEFAULT_SEED).unwrap();
        assert!(r.iter().all(|s| s.status.is_pass()), "{r:?}");
        let rh = r.iter().find(|s| s.check == "rh").unwrap();
        assert_eq!(rh.count, 0);
    }

    #[test]
    fn suite_rejects_out_of_range() {
        assert!(report_suite(101, 10.0, 1).is_err());
        assert!(report_suite(5, 250.0, 1).is_err());
    }

    #[test]
    fn factorization_catches_a_wrong_factor() {
        let chi = DirichletCharacter::new(14, 4).unwrap();
        assert!(check_factorization(&chi, &factorization_grid()).status.is_pass());
        // pretending chi mod 7 needs no Euler factor must fail
        let star = chi.primitive_inducer();
        let s = Complex64::new(0.5, 7.3);
        let wrong = (eval_hurwitz_sum(&chi, s).unwrap().value - eval(&star, s).unwrap().value).norm();
        assert!(wrong > 1e-3);
    }
}
