//! Evaluation of `L(s; chi)`, `L'(s; chi)`, `zeta(s)` and the Hurwitz zeta
//! function.
//!
//! The continuation everywhere is the Hurwitz decomposition
//! `L(s; chi) = q^{-s} sum_a chi(a) zeta(s, a/q)` with an Euler–Maclaurin
//! tail (`N = max(20, |Im s|)` direct terms, 12 Bernoulli corrections).
//! Principal characters with `q > 1` go through
//! `L(s; chi_0) = zeta(s) prod_{p | q} (1 - p^{-s})`.
//!
//! For non-principal characters the `1/(s-1)` tails of the individual
//! Hurwitz terms cancel because `sum_a chi(a) = 0`; they are replaced by the
//! regular function `(x^{1-s} - 1)/(s - 1)`, which keeps `s = 1` finite.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{prime_divisors, primes_up_to};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::special::{bernoulli_over_factorial, digamma, gamma, gamma_sine_factor};

/// Number of Bernoulli correction terms in the Euler–Maclaurin tail.
pub const EM_CORRECTIONS: usize = 12;

const POLE_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    EulerProduct,
    EulerMaclaurin,
    Factorization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// Heuristic absolute error bound.
    pub est_error: f64,
    pub method: Method,
}

/// Which function a scan, trace or render works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    L,
    #[serde(rename = "Lprime")]
    LPrime,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Target> {
        match s {
            "L" | "l" => Ok(Target::L),
            "Lprime" | "lprime" | "L'" => Ok(Target::LPrime),
            other => Err(Error::InvalidArgument(format!("unknown target {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEquationReport {
    pub s: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub epsilon_chi: Complex64,
    pub kappa: u8,
}

fn bernoulli() -> &'static [f64; 13] {
    static TABLE: OnceLock<[f64; 13]> = OnceLock::new();
    TABLE.get_or_init(bernoulli_over_factorial)
}

/// Default Euler–Maclaurin truncation for a given `s`. With 12 corrections
/// the tail is already below rounding at `N = |Im s|`; going further only
/// inflates the direct terms when `Re s < 0`.
pub fn default_truncation(s: Complex64) -> usize {
    20usize.max(s.im.abs().ceil() as usize)
}

/// `(e^w - 1) / w` and its derivative, stable near `w = 0`.
fn phi1(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 0.5 {
        // sum_k w^k / (k+1)!, derivative sum_k k w^{k-1} / (k+1)!
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut wk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..20 {
            fact *= (k + 1) as f64;
            value += wk / fact;
            if k + 1 < 20 {
                deriv += (k + 1) as f64 * wk / (fact * (k + 2) as f64);
            }
            wk *= w;
        }
        (value, deriv)
    } else {
        let e = w.exp();
        ((e - 1.0) / w, (e * (w - 1.0) + 1.0) / (w * w))
    }
}

#[derive(Debug, Clone, Copy)]
struct Parts {
    value: Complex64,
    deriv: Complex64,
    err: f64,
}

/// Euler–Maclaurin evaluation of `zeta(s, a)` and `d/ds zeta(s, a)` with
/// `n` direct terms. With `regularized`, the pole term `x^{1-s}/(s-1)` is
/// replaced by `(x^{1-s} - 1)/(s-1)`.
fn hurwitz_parts(s: Complex64, a: f64, n: usize, regularized: bool) -> Parts {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for k in 0..n {
        let lx = (k as f64 + a).ln();
        let p = (-s * lx).exp();
        value += p;
        deriv -= lx * p;
        magnitude += p.norm() * (1.0 + lx.abs());
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let px = (-s * lx).exp();

    let (pole, dpole) = if regularized {
        let (g, dg) = phi1((1.0 - s) * lx);
        (-lx * g, lx * lx * dg)
    } else {
        let sm1 = s - 1.0;
        let p1 = x * px / sm1;
        (p1, -lx * p1 - p1 / sm1)
    };
    value += pole + 0.5 * px;
    deriv += dpole - 0.5 * lx * px;
    magnitude += pole.norm() + dpole.norm() + px.norm() * (1.0 + lx);

    let coeffs = bernoulli();
    // P_k(s) = s (s+1) ... (s + 2k - 2), with derivative tracked alongside
    let mut poch = s;
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut xpow = px / x; // x^{-s-1}
    let inv_x2 = 1.0 / (x * x);
    let mut err = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let term = c * poch * xpow;
        let dterm = c * (dpoch - lx * poch) * xpow;
        if k < EM_CORRECTIONS {
            value += term;
            deriv += dterm;
            magnitude += term.norm();
        } else {
            err = term.norm().max(dterm.norm());
        }
        let j = (2 * k + 1) as f64;
        // advance to P_{k+1} = P_k (s + 2k + 1)(s + 2k + 2) in the 0-based loop
        let f1 = s + j;
        let f2 = s + j + 1.0;
        dpoch = dpoch * f1 * f2 + poch * (f1 + f2);
        poch = poch * f1 * f2;
        xpow *= inv_x2;
    }
    Parts {
        value,
        deriv,
        err: err + 4.0 * f64::EPSILON * magnitude,
    }
}

fn check_pole(s: Complex64) -> Result<()> {
    if (s - 1.0).norm() < POLE_RADIUS {
        Err(Error::PoleAtOne)
    } else {
        Ok(())
    }
}

/// Hurwitz zeta `zeta(s, a)` for `0 < a <= 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<EvalResult> {
    hurwitz_zeta_truncated(s, a, default_truncation(s))
}

pub fn hurwitz_zeta_truncated(s: Complex64, a: f64, terms: usize) -> Result<EvalResult> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidArgument(format!("Hurwitz parameter a = {a} not in (0, 1]")));
    }
    check_pole(s)?;
    let p = hurwitz_parts(s, a, terms.max(1), false);
    Ok(EvalResult {
        value: p.value,
        est_error: p.err,
        method: Method::EulerMaclaurin,
    })
}

/// Riemann zeta.
pub fn zeta(s: Complex64) -> Result<EvalResult> {
    hurwitz_zeta(s, 1.0)
}

#[derive(Debug, Clone, Copy)]
struct Both {
    value: Complex64,
    deriv: Complex64,
    err: f64,
    method: Method,
}

fn direct_both(chi: &DirichletCharacter, s: Complex64, terms: usize) -> Result<Both> {
    let q = chi.modulus();
    if chi.is_principal() {
        check_pole(s)?;
        let z = hurwitz_parts(s, 1.0, terms, false);
        if q == 1 {
            return Ok(Both {
                value: z.value,
                deriv: z.deriv,
                err: z.err,
                method: Method::EulerMaclaurin,
            });
        }
        // E(s) = prod (1 - p^{-s}), E' by the product rule
        let mut e = Complex64::new(1.0, 0.0);
        let mut de = Complex64::new(0.0, 0.0);
        for p in prime_divisors(q) {
            let lp = (p as f64).ln();
            let ps = (-s * lp).exp();
            let f = 1.0 - ps;
            let df = lp * ps;
            de = de * f + e * df;
            e *= f;
        }
        return Ok(Both {
            value: z.value * e,
            deriv: z.deriv * e + z.value * de,
            err: z.err * e.norm().max(de.norm()),
            method: Method::Factorization,
        });
    }
    let qf = q as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for &(a, v) in chi.support() {
        let p = hurwitz_parts(s, a as f64 / qf, terms, true);
        sum += v * p.value;
        dsum += v * p.deriv;
        err += p.err;
    }
    let lq = qf.ln();
    let qs = (-s * lq).exp();
    let value = qs * sum;
    Ok(Both {
        value,
        deriv: qs * dsum - lq * value,
        err: err * qs.norm() * (1.0 + lq),
        method: Method::EulerMaclaurin,
    })
}

/// Left of this abscissa the direct terms `n^{-s}` grow too fast for double
/// precision and values come from the reflection formula instead.
pub const REFLECTION_ABSCISSA: f64 = -0.5;

/// Heights beyond this are refused: the truncation grows like `|t|`.
pub const MAX_HEIGHT: f64 = 1e6;

fn eval_both(chi: &DirichletCharacter, s: Complex64) -> Result<Both> {
    if !(s.im.abs() <= MAX_HEIGHT) || !s.re.is_finite() {
        return Err(Error::InvalidArgument(format!("s = {s} is outside |Im s| <= {MAX_HEIGHT:e}")));
    }
    if s.re < REFLECTION_ABSCISSA {
        reflected_both(chi, s)
    } else {
        direct_both(chi, s, default_truncation(s))
    }
}

/// `L` and `L'` at `Re s < 0` from the primitive inducer `chi*` (mod `d`):
/// `L(s; chi) = E(s) eps(chi*) F(s) G(s) L(1-s; conj chi*)` with
/// `F = 2^s pi^{s-1} d^{1/2-s}`, `G = Gamma(1-s) sin(pi (s+kappa)/2)` and the
/// Euler factor `E(s) = prod_{p | q} (1 - chi*(p) p^{-s})`.
fn reflected_both(chi: &DirichletCharacter, s: Complex64) -> Result<Both> {
    let star = chi.primitive_inducer();
    let d = star.modulus() as f64;
    let kappa = star.parity() as f64;
    let dual = direct_both(&star.conjugate(), 1.0 - s, default_truncation(s))?;

    let log_f_slope = 2f64.ln() + PI.ln() - d.ln();
    let f = root_number(&star) * (s * 2f64.ln() + (s - 1.0) * PI.ln() + (0.5 - s) * d.ln()).exp();
    let g1 = gamma(1.0 - s);
    let angle = 0.5 * PI * (s + kappa);
    let g = g1 * angle.sin();
    let dg = g1 * (0.5 * PI * angle.cos() - digamma(1.0 - s) * angle.sin());

    let prim = f * g * dual.value;
    let dprim = f * (log_f_slope * g * dual.value + dg * dual.value - g * dual.deriv);

    let mut e = Complex64::new(1.0, 0.0);
    let mut de = Complex64::new(0.0, 0.0);
    for p in prime_divisors(chi.modulus()) {
        let c = star.value_u(p);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let lp = (p as f64).ln();
        let cps = c * (-s * lp).exp();
        de = de * (1.0 - cps) + e * lp * cps;
        e *= 1.0 - cps;
    }
    let value = prim * e;
    let deriv = dprim * e + prim * de;
    let scale = (f * g).norm() * e.norm().max(de.norm()) * (1.0 + log_f_slope.abs());
    let rounding = 64.0 * f64::EPSILON * (1.0 + s.norm()) * (value.norm() + deriv.norm());
    Ok(Both {
        value,
        deriv,
        err: scale * dual.err + rounding,
        method: if chi.is_principal() && chi.modulus() > 1 {
            Method::Factorization
        } else {
            Method::EulerMaclaurin
        },
    })
}

/// `L(s; chi)` anywhere except the pole of principal characters at `s = 1`.
pub fn eval(chi: &DirichletCharacter, s: Complex64) -> Result<EvalResult> {
    let b = eval_both(chi, s)?;
    Ok(EvalResult {
        value: b.value,
        est_error: b.err,
        method: b.method,
    })
}

/// `q^{-s} sum_a chi(a) zeta(s, a/q)` term by term: no factorization, no
/// reflection and no pole regularization. An independent route for the
/// factorization identities, accurate for `Re s >= -1` away from `s = 1`.
pub fn eval_hurwitz_sum(chi: &DirichletCharacter, s: Complex64) -> Result<EvalResult> {
    check_pole(s)?;
    let qf = chi.modulus() as f64;
    let n = default_truncation(s);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for &(a, v) in chi.support() {
        // residue 0 only occurs for q = 1, where it stands for a = q
        let a = if a == 0 { chi.modulus() } else { a };
        let p = hurwitz_parts(s, a as f64 / qf, n, false);
        sum += v * p.value;
        err += p.err;
    }
    let qs = (-s * qf.ln()).exp();
    Ok(EvalResult {
        value: qs * sum,
        est_error: err * qs.norm(),
        method: Method::EulerMaclaurin,
    })
}

/// `L(s; chi)` through the Hurwitz decomposition alone (no reflection) with
/// an explicit Euler–Maclaurin truncation.
pub fn eval_truncated(chi: &DirichletCharacter, s: Complex64, terms: usize) -> Result<EvalResult> {
    let b = direct_both(chi, s, terms.max(1))?;
    Ok(EvalResult {
        value: b.value,
        est_error: b.err,
        method: b.method,
    })
}

/// `L'(s; chi)` by term-wise differentiation of the continuation.
pub fn eval_derivative(chi: &DirichletCharacter, s: Complex64) -> Result<EvalResult> {
    let b = eval_both(chi, s)?;
    Ok(EvalResult {
        value: b.deriv,
        est_error: b.err,
        method: b.method,
    })
}

/// `L` and `L'` from one pass.
pub fn eval_with_derivative(
    chi: &DirichletCharacter,
    s: Complex64,
) -> Result<(EvalResult, EvalResult)> {
    let b = eval_both(chi, s)?;
    Ok((
        EvalResult {
            value: b.value,
            est_error: b.err,
            method: b.method,
        },
        EvalResult {
            value: b.deriv,
            est_error: b.err,
            method: b.method,
        },
    ))
}

fn require_convergent(s: Complex64) -> Result<()> {
    if s.re > 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideConvergence(s.re))
    }
}

/// Partial sum `sum_{n <= terms} chi(n) n^{-s}`, `Re s > 1`.
pub fn eval_series(chi: &DirichletCharacter, s: Complex64, terms: usize) -> Result<EvalResult> {
    require_convergent(s)?;
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be positive".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for n in 1..=terms as u64 {
        let v = chi.value_u(n);
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        // Kahan-compensated accumulation
        let term = v * (-s * (n as f64).ln()).exp() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    let sigma = s.re;
    let tail = (terms as f64).powf(1.0 - sigma) / (sigma - 1.0);
    Ok(EvalResult {
        value: sum,
        est_error: tail + 4.0 * f64::EPSILON * sum.norm(),
        method: Method::Series,
    })
}

/// Derivative series `-sum_{n <= terms} chi(n) ln(n) n^{-s}`, `Re s > 1`.
pub fn eval_derivative_series(
    chi: &DirichletCharacter,
    s: Complex64,
    terms: usize,
) -> Result<EvalResult> {
    require_convergent(s)?;
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be positive".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 2..=terms as u64 {
        let v = chi.value_u(n);
        let ln = (n as f64).ln();
        sum -= v * ln * (-s * ln).exp();
    }
    let sigma = s.re;
    let n = (terms as f64).max(3.0);
    // integral of ln(x) x^{-sigma} over (n, inf)
    let tail = n.powf(1.0 - sigma) * (n.ln() / (sigma - 1.0) + 1.0 / (sigma - 1.0).powi(2));
    Ok(EvalResult {
        value: sum,
        est_error: tail,
        method: Method::Series,
    })
}

/// Truncated Euler product over primes `p <= prime_bound`, `Re s > 1`.
pub fn eval_euler(chi: &DirichletCharacter, s: Complex64, prime_bound: u64) -> Result<EvalResult> {
    require_convergent(s)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for p in primes_up_to(prime_bound) {
        let v = chi.value_u(p);
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        prod /= 1.0 - v * (-s * (p as f64).ln()).exp();
    }
    let sigma = s.re;
    let b = prime_bound.max(1) as f64 + 1.0;
    let log_tail = (b.powf(-sigma) + b.powf(1.0 - sigma) / (sigma - 1.0)) / (1.0 - 2f64.powf(-sigma));
    Ok(EvalResult {
        value: prod,
        est_error: prod.norm() * log_tail.exp_m1() + 4.0 * f64::EPSILON * prod.norm(),
        method: Method::EulerProduct,
    })
}

/// `epsilon(chi) = tau(chi) / (i^kappa sqrt(q))`.
pub fn root_number(chi: &DirichletCharacter) -> Complex64 {
    let i_kappa = if chi.parity() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    chi.gauss_sum() / (i_kappa * (chi.modulus() as f64).sqrt())
}

/// Both sides of the functional-equation check go through the Hurwitz
/// route so that the check never feeds on the reflection it is testing.
fn eval_direct(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    Ok(direct_both(chi, s, default_truncation(s))?.value)
}

/// Right-hand side of the functional equation
/// `eps L(1-s; conj chi) 2^s pi^{s-1} q^{1/2-s} Gamma(1-s) sin(pi (s+kappa)/2)`.
pub fn functional_equation_rhs(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    require_primitive(chi)?;
    let q = chi.modulus() as f64;
    let kappa = chi.parity();
    let dual = eval_direct(&chi.conjugate(), 1.0 - s)?;
    let factor = (s * 2f64.ln() + (s - 1.0) * PI.ln() + (0.5 - s) * q.ln()).exp();
    Ok(root_number(chi) * dual * factor * gamma_sine_factor(s, kappa))
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if chi.modulus() == 1 || !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            modulus: chi.modulus(),
            conductor: chi.conductor(),
        });
    }
    Ok(())
}

pub fn functional_equation_check(
    chi: &DirichletCharacter,
    s: Complex64,
) -> Result<FunctionalEquationReport> {
    require_primitive(chi)?;
    let lhs = eval_direct(chi, s)?;
    let rhs = functional_equation_rhs(chi, s)?;
    Ok(FunctionalEquationReport {
        s,
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        epsilon_chi: root_number(chi),
        kappa: chi.parity(),
    })
}

/// `|L(conj s; chi) - conj L(s; conj chi)|`.
pub fn conjugation_check(chi: &DirichletCharacter, s: Complex64) -> Result<f64> {
    let left = eval(chi, s.conj())?.value;
    let right = eval(&chi.conjugate(), s)?.value.conj();
    Ok((left - right).norm())
}

/// `prod_{p | q} (1 - chi(p) p^{-s})` for the character `chi` (mod `d`) and
/// the primes dividing `q`.
pub fn euler_factor(chi: &DirichletCharacter, q: u64, s: Complex64) -> Complex64 {
    prime_divisors(q)
        .into_iter()
        .map(|p| 1.0 - chi.value_u(p) * (-s * (p as f64).ln()).exp())
        .product()
}

/// Value of the scanned function at `s`.
pub fn eval_target(chi: &DirichletCharacter, target: Target, s: Complex64) -> Result<Complex64> {
    let b = eval_both(chi, s)?;
    Ok(match target {
        Target::L => b.value,
        Target::LPrime => b.deriv,
    })
}

/// Step for the central difference of `L'` that stands in for `L''`.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-6;

/// The scanned function and its derivative. For `L'` the second derivative
/// is a central difference of `L'` with step `1e-6`.
pub fn eval_target_with_derivative(
    chi: &DirichletCharacter,
    target: Target,
    s: Complex64,
) -> Result<(Complex64, Complex64)> {
    let b = eval_both(chi, s)?;
    match target {
        Target::L => Ok((b.value, b.deriv)),
        Target::LPrime => {
            let h = SECOND_DERIVATIVE_STEP;
            let plus = eval_both(chi, s + h)?.deriv;
            let minus = eval_both(chi, s - h)?.deriv;
            Ok((b.deriv, (plus - minus) / (2.0 * h)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ZETA2: f64 = 1.644_934_066_848_226_4;

    /// Independent oracle: direct sum over n < M plus the integral and
    /// half-term tail, no Bernoulli corrections, large M.
    fn direct_tail_zeta(s: f64, a: f64) -> f64 {
        let m = 200_000;
        let mut sum = 0.0;
        for k in (0..m).rev() {
            sum += (k as f64 + a).powf(-s);
        }
        let x = m as f64 + a;
        sum + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s) + s / 12.0 * x.powf(-s - 1.0)
    }

    #[test]
    fn hurwitz_against_direct_oracle() {
        let z = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z.value.re - direct_tail_zeta(2.0, 1.0)).abs() < 1e-12);
        assert!((z.value.re - ZETA2).abs() < 1e-13);
        let h = hurwitz_zeta(c(2.0, 0.0), 0.5).unwrap();
        assert!((h.value.re - direct_tail_zeta(2.0, 0.5)).abs() < 1e-12);
        assert!((h.value.re - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_at_negative_integers() {
        // zeta(-n, 1) = -B_{n+1}/(n+1)
        let z = hurwitz_zeta(c(-1.0, 0.0), 1.0).unwrap();
        assert!((z.value - c(-1.0 / 12.0, 0.0)).norm() < 1e-10);
        let z = hurwitz_zeta(c(-3.0, 0.0), 1.0).unwrap();
        assert!((z.value - c(1.0 / 120.0, 0.0)).norm() < 1e-10);
        // zeta(0, a) = 1/2 - a
        let z = hurwitz_zeta(c(0.0, 0.0), 0.25).unwrap();
        assert!((z.value - c(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hurwitz_pole_and_domain() {
        assert!(matches!(hurwitz_zeta(c(1.0, 0.0), 1.0), Err(Error::PoleAtOne)));
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
        assert!(hurwitz_zeta(c(2.0, 0.0), 1.5).is_err());
    }

    #[test]
    fn zeta_special_values() {
        let z0 = zeta(c(0.0, 0.0)).unwrap();
        assert!((z0.value - c(-0.5, 0.0)).norm() < 1e-10);
        let z = zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.value.norm() < 1e-9);
    }

    #[test]
    fn series_examples() {
        let zeta1 = &enumerate_characters(1)[0];
        let r = eval_series(zeta1, c(2.0, 0.0), 1_000_000).unwrap();
        assert!((r.value.re - ZETA2).abs() < 1e-6);
        assert!(r.value.re < ZETA2);
        let one = eval_series(zeta1, c(2.0, 0.0), 1).unwrap();
        assert_eq!(one.value, c(1.0, 0.0));
        assert!(eval_series(zeta1, c(1.0, 0.0), 10).is_err());
        for q in 1..=20 {
            for chi in enumerate_characters(q) {
                let r = eval_series(&chi, c(20.0, 5.0), 1000).unwrap();
                assert!((r.value - 1.0).norm() < 3e-6);
            }
        }
    }

    #[test]
    fn euler_examples() {
        let zeta1 = &enumerate_characters(1)[0];
        let e = eval_euler(zeta1, c(2.0, 0.0), 1).unwrap();
        assert_eq!(e.value, c(1.0, 0.0));
        let e = eval_euler(zeta1, c(2.0, 0.0), 100_000).unwrap();
        let s = eval_series(zeta1, c(2.0, 0.0), 10_000_000).unwrap();
        assert!((e.value - s.value).norm() < 1e-5);
        let chi4 = &enumerate_characters(4)[1];
        let e = eval_euler(chi4, c(3.0, 0.0), 100_000).unwrap();
        let s = eval_series(chi4, c(3.0, 0.0), 100_000).unwrap();
        assert!((e.value - s.value).norm() < 1e-8);
        assert!(eval_euler(chi4, c(0.5, 0.0), 10).is_err());
    }

    #[test]
    fn eval_examples() {
        let chi4 = &enumerate_characters(4)[1];
        let v = eval(chi4, c(1.0, 0.0)).unwrap();
        assert!((v.value - c(PI / 4.0, 0.0)).norm() < 1e-9);
        let chi0_2 = &enumerate_characters(2)[0];
        let v = eval(chi0_2, c(2.0, 0.0)).unwrap();
        assert_eq!(v.method, Method::Factorization);
        assert!((v.value.re - ZETA2 * 0.75).abs() < 1e-12);
        assert!((v.value.re - 1.233_700_550_1).abs() < 1e-10);
        let zeta1 = &enumerate_characters(1)[0];
        assert!(matches!(eval(zeta1, c(1.0, 0.0)), Err(Error::PoleAtOne)));
        assert!(matches!(eval(chi0_2, c(1.0, 0.0)), Err(Error::PoleAtOne)));
    }

    /// pi/4 through the Euler-transformed alternating series, an oracle
    /// independent of the Hurwitz route.
    #[test]
    fn leibniz_oracle() {
        // average of consecutive partial sums converges like 1/n^2
        let n = 200_000;
        let mut s = 0.0;
        let mut prev = 0.0;
        for k in 0..n {
            prev = s;
            s += if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64;
        }
        let oracle = 0.5 * (s + prev);
        let chi4 = &enumerate_characters(4)[1];
        let v = eval(chi4, c(1.0, 0.0)).unwrap().value.re;
        assert!((v - oracle).abs() < 1e-9);
    }

    #[test]
    fn derivative_examples() {
        let zeta1 = &enumerate_characters(1)[0];
        let h = 1e-5;
        let fd = |chi: &DirichletCharacter, s: Complex64| {
            (eval(chi, s + h).unwrap().value - eval(chi, s - h).unwrap().value) / (2.0 * h)
        };
        let d = eval_derivative(zeta1, c(2.0, 0.0)).unwrap().value;
        assert!((d - fd(zeta1, c(2.0, 0.0))).norm() < 1e-8);
        assert!((d.re + 0.937_548_254_3).abs() < 1e-8);
        let chi4 = &enumerate_characters(4)[1];
        let d = eval_derivative(chi4, c(1.0, 0.0)).unwrap().value;
        assert!((d - fd(chi4, c(1.0, 0.0))).norm() < 1e-7);
        for q in 1..=10 {
            for chi in enumerate_characters(q) {
                let d = eval_derivative(&chi, c(25.0, 0.0)).unwrap().value;
                assert!(d.norm() < 1e-6);
            }
        }
        let series = eval_derivative_series(zeta1, c(3.0, 1.0), 100_000).unwrap();
        let em = eval_derivative(zeta1, c(3.0, 1.0)).unwrap();
        assert!((series.value - em.value).norm() < series.est_error + em.est_error);
    }

    #[test]
    fn functional_equation_examples() {
        let chi4 = &enumerate_characters(4)[1];
        let r = functional_equation_check(chi4, c(0.3, 2.0)).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert!((r.epsilon_chi.norm() - 1.0).abs() < 1e-10);
        let r = functional_equation_check(chi4, c(0.5, 0.0)).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        for chi in enumerate_characters(7).iter().filter(|c| c.is_primitive()) {
            let r = functional_equation_check(chi, c(0.2, 5.0)).unwrap();
            assert!(r.residual < 1e-7, "{r:?}");
        }
        let chi14 = &enumerate_characters(14)[1];
        assert!(matches!(
            functional_equation_check(chi14, c(0.3, 1.0)),
            Err(Error::NotPrimitive { .. })
        ));
        let zeta1 = &enumerate_characters(1)[0];
        assert!(functional_equation_check(zeta1, c(0.3, 1.0)).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let chi4 = &enumerate_characters(4)[1];
        assert!(conjugation_check(chi4, c(2.0, 3.0)).unwrap() < 1e-10);
        for chi in enumerate_characters(7) {
            assert!(conjugation_check(&chi, c(0.7, 0.0)).unwrap() < 1e-10);
            assert!(conjugation_check(&chi, c(0.3, 10.0)).unwrap() < 1e-9);
        }
        let zeta1 = &enumerate_characters(1)[0];
        assert!(matches!(conjugation_check(zeta1, c(1.0, 0.0)), Err(Error::PoleAtOne)));
    }

    #[test]
    fn phi1_is_continuous_across_branch() {
        for &w in &[c(0.49, 0.0), c(0.0, 0.499), c(-0.3, 0.35)] {
            let (a, da) = phi1(w);
            let e = w.exp();
            assert!((a - (e - 1.0) / w).norm() < 1e-14);
            assert!((da - (e * (w - 1.0) + 1.0) / (w * w)).norm() < 1e-12);
        }
    }

    #[test]
    fn target_parsing() {
        assert_eq!("L".parse::<Target>().unwrap(), Target::L);
        assert_eq!("Lprime".parse::<Target>().unwrap(), Target::LPrime);
        assert!("M".parse::<Target>().is_err());
    }

    #[test]
    fn truncation_error_estimate_is_honest() {
        for q in [1u64, 4, 7, 12] {
            for chi in enumerate_characters(q) {
                for &s in &[c(0.5, 14.0), c(-2.0, 30.0), c(3.0, -7.0), c(0.1, 80.0), c(-1.5, 0.3)] {
                    if chi.is_principal() && (s - 1.0).norm() < 1e-3 {
                        continue;
                    }
                    let n = default_truncation(s);
                    let fine = eval_truncated(&chi, s, n).unwrap();
                    let coarse = eval_truncated(&chi, s, n / 2).unwrap();
                    let change = (fine.value - coarse.value).norm();
                    assert!(change < 2.0 * coarse.est_error.max(fine.est_error), "q={q} s={s} {change:e} {:e}", coarse.est_error);
                }
            }
        }
    }

    #[test]
    fn functional_equation_far_from_axis() {
        for q in [5u64, 11, 19, 20] {
            for chi in enumerate_characters(q).iter().filter(|c| c.is_primitive()) {
                for &s in &[c(-2.0, 30.0), c(3.0, -30.0), c(-2.0, -0.5), c(2.9, 29.0)] {
                    let r = functional_equation_check(chi, s).unwrap();
                    assert!(r.residual < 1e-7, "q={q} s={s} {r:?}");
                }
            }
        }
    }

    #[test]
    fn reflection_route_matches_direct_route() {
        let zeta1 = &enumerate_characters(1)[0];
        assert!((eval(zeta1, c(-3.0, 0.0)).unwrap().value - 1.0 / 120.0).norm() < 1e-15);
        assert!(eval(zeta1, c(-2.0, 0.0)).unwrap().value.norm() < 1e-15);
        for q in [1u64, 5, 12, 14] {
            for chi in enumerate_characters(q) {
                for &s in &[c(-2.0, 30.0), c(-0.6, 3.0), c(-1.0, -7.5)] {
                    let reflected = eval_with_derivative(&chi, s).unwrap();
                    let direct = direct_both(&chi, s, default_truncation(s)).unwrap();
                    let scale = 1.0 + direct.value.norm();
                    assert!((reflected.0.value - direct.value).norm() < 1e-11 * scale, "q={q} s={s}");
                    assert!((reflected.1.value - direct.deriv).norm() < 1e-11 * (1.0 + direct.deriv.norm()));
                }
            }
        }
    }
}
