//! Zeros of `L(s; chi)` and `L'(s; chi)`: argument-principle counts on
//! rectangles, adaptive subdivision, Newton refinement, classification and
//! the simplicity / critical-line checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::prime_divisors;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunction::{eval, eval_target, eval_target_with_derivative, Target};
use crate::report::{VerificationSummary, Worst};

/// Smallest `|f|` tolerated on a counting contour.
pub const BOUNDARY_MIN_ABS: f64 = 1e-8;
/// Newton stops once `|f| <` this.
pub const NEWTON_TOL: f64 = 1e-11;
pub const NEWTON_MAX_ITER: usize = 60;
/// Cells are not split below this side length; a winding above one there is
/// a multiple zero.
pub const MIN_CELL: f64 = 1e-6;
/// Cells with one zero and sides at most this size go to Newton.
const NEWTON_CELL: f64 = 0.5;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
const PERTURB_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    TrivialReal,
    TrivialImaginary,
    Nontrivial,
}

impl ZeroKind {
    /// Classification by location. The imaginary-axis and negative-real-axis
    /// families are trivial; everything else is nontrivial.
    pub fn classify(s: Complex64) -> ZeroKind {
        if s.im.abs() < 1e-9 && s.re <= 1e-9 {
            ZeroKind::TrivialReal
        } else if s.re.abs() < 1e-9 {
            ZeroKind::TrivialImaginary
        } else {
            ZeroKind::Nontrivial
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: Complex64,
    pub kind: ZeroKind,
    pub target: Target,
    /// `|f(location)|`.
    pub residual: f64,
    /// `|f'(location)|`.
    pub deriv_abs: f64,
    pub q: u64,
    pub index: usize,
}

/// Flat JSON form of a zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub q: u64,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub kind: ZeroKind,
    pub residual: f64,
    pub deriv_abs: f64,
}

impl Zero {
    pub fn record(&self) -> ZeroRecord {
        ZeroRecord {
            q: self.q,
            index: self.index,
            re: self.location.re,
            im: self.location.im,
            kind: self.kind,
            residual: self.residual,
            deriv_abs: self.deriv_abs,
        }
    }

    pub fn from_record(r: &ZeroRecord, target: Target) -> Zero {
        Zero {
            location: Complex64::new(r.re, r.im),
            kind: r.kind,
            target,
            residual: r.residual,
            deriv_abs: r.deriv_abs,
            q: r.q,
            index: r.index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Rect {
    pub fn new(sigma_min: f64, sigma_max: f64, t_min: f64, t_max: f64) -> Rect {
        Rect {
            sigma_min,
            sigma_max,
            t_min,
            t_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }

    pub fn height(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_min + self.sigma_max),
            0.5 * (self.t_min + self.t_max),
        )
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    pub fn contains(&self, s: Complex64, margin: f64) -> bool {
        s.re >= self.sigma_min - margin
            && s.re <= self.sigma_max + margin
            && s.im >= self.t_min - margin
            && s.im <= self.t_max + margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectCount {
    /// The rectangle actually integrated over (after any perturbation).
    pub rect: Rect,
    pub winding: i64,
    pub boundary_min_abs: f64,
}

/// Function whose zeros are counted. For principal characters the pole at
/// `s = 1` is removed: `(s-1) L` for `L`, `(s-1)^2 L'` for `L'`.
fn counting_value(chi: &DirichletCharacter, target: Target, s: Complex64) -> Result<Complex64> {
    if chi.is_principal() {
        if (s - 1.0).norm() < 1e-12 {
            // limits: residue and minus residue
            let residue: f64 = prime_divisors(chi.modulus())
                .into_iter()
                .map(|p| 1.0 - 1.0 / p as f64)
                .product();
            return Ok(Complex64::new(
                if target == Target::L { residue } else { -residue },
                0.0,
            ));
        }
        let f = eval_target(chi, target, s)?;
        Ok(match target {
            Target::L => (s - 1.0) * f,
            Target::LPrime => (s - 1.0) * (s - 1.0) * f,
        })
    } else {
        eval_target(chi, target, s)
    }
}

/// Total change of `arg f` along the segment `a -> b`, and the smallest `|f|`.
fn edge_phase(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    a: Complex64,
    b: Complex64,
    h0: f64,
) -> Result<(f64, f64)> {
    let len = (b - a).norm();
    let mut fa = f(a)?;
    let mut min_abs = fa.norm();
    if min_abs < BOUNDARY_MIN_ABS {
        return Err(Error::BoundaryTooClose {
            location: a,
            min_abs,
        });
    }
    if len == 0.0 {
        return Ok((0.0, min_abs));
    }
    let dir = (b - a) / len;
    let mut u = 0.0;
    let mut h = h0;
    let mut total = 0.0;
    let probe = |at: Complex64| -> Result<Complex64> {
        let v = f(at)?;
        if !(v.norm() >= BOUNDARY_MIN_ABS) {
            return Err(Error::BoundaryTooClose {
                location: at,
                min_abs: v.norm(),
            });
        }
        Ok(v)
    };
    while u < len {
        let step = h.min(len - u);
        let at = if u + step >= len { b } else { a + dir * (u + step) };
        let fb = probe(at)?;
        let fm = probe(a + dir * (u + 0.5 * step))?;
        // the two halves must agree with the whole step; otherwise a nearby
        // zero may have wrapped the phase by a full turn
        let d = (fb / fa).arg();
        let d1 = (fm / fa).arg();
        let d2 = (fb / fm).arg();
        let consistent = d.abs() < 0.5 * PI && d1.abs() < 0.5 * PI && d2.abs() < 0.5 * PI && (d1 + d2 - d).abs() < 1e-6;
        if !consistent && step > 1e-13 {
            h = 0.5 * step;
            continue;
        }
        min_abs = min_abs.min(fb.norm()).min(fm.norm());
        total += d;
        u += step;
        fa = fb;
        h = (2.0 * step).min(h0);
    }
    Ok((total, min_abs))
}

fn winding_of(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    rect: &Rect,
) -> Result<RectCount> {
    if rect.is_degenerate() {
        return Ok(RectCount {
            rect: *rect,
            winding: 0,
            boundary_min_abs: f64::INFINITY,
        });
    }
    let side = rect.width().min(rect.height());
    let h0 = 0.05f64.min(side / 16.0);
    let c = [
        Complex64::new(rect.sigma_min, rect.t_min),
        Complex64::new(rect.sigma_max, rect.t_min),
        Complex64::new(rect.sigma_max, rect.t_max),
        Complex64::new(rect.sigma_min, rect.t_max),
    ];
    let mut total = 0.0;
    let mut min_abs = f64::INFINITY;
    for k in 0..4 {
        let (d, m) = edge_phase(f, c[k], c[(k + 1) % 4], h0)?;
        total += d;
        min_abs = min_abs.min(m);
    }
    let turns = total / (2.0 * PI);
    Ok(RectCount {
        rect: *rect,
        winding: turns.round() as i64,
        boundary_min_abs: min_abs,
    })
}

/// Which edge of `rect` the point `at` sits on: 0 bottom, 1 right, 2 top,
/// 3 left.
fn offending_edge(rect: &Rect, at: Complex64) -> usize {
    let d = [
        (at.im - rect.t_min).abs(),
        (at.re - rect.sigma_max).abs(),
        (at.im - rect.t_max).abs(),
        (at.re - rect.sigma_min).abs(),
    ];
    (0..4).min_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap()
}

/// Moves one edge by `k (phi - 1) 1e-3`, inward on odd attempts and outward
/// on even ones.
fn perturb(rect: &Rect, edge: usize, attempt: usize) -> Rect {
    let k = ((attempt + 1) / 2) as f64;
    let inward = attempt % 2 == 1;
    let delta = k * GOLDEN * 1e-3 * if inward { 1.0 } else { -1.0 };
    let mut r = *rect;
    match edge {
        0 => r.t_min += delta,
        1 => r.sigma_max -= delta,
        2 => r.t_max -= delta,
        _ => r.sigma_min += delta,
    }
    r
}

fn count_with_perturbation(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    rect: &Rect,
) -> Result<RectCount> {
    let mut current = *rect;
    let mut attempt = 0;
    loop {
        match winding_of(f, &current) {
            Err(Error::BoundaryTooClose { location, min_abs }) => {
                attempt += 1;
                if attempt > PERTURB_ATTEMPTS {
                    return Err(Error::BoundaryTooClose { location, min_abs });
                }
                let edge = offending_edge(&current, location);
                current = perturb(&current, edge, attempt);
            }
            other => return other,
        }
    }
}

/// Number of zeros of the target function inside `rect`, with multiplicity.
pub fn count_zeros_rect(chi: &DirichletCharacter, rect: Rect, target: Target) -> Result<RectCount> {
    let f = |s: Complex64| counting_value(chi, target, s);
    count_with_perturbation(&f, &rect)
}

fn make_zero(chi: &DirichletCharacter, target: Target, s: Complex64, residual: f64, deriv: f64) -> Zero {
    let kind = match target {
        Target::L => ZeroKind::classify(s),
        // zeros of L' are trivial only on the negative real axis
        Target::LPrime if s.im.abs() < 1e-9 && s.re < 0.0 => ZeroKind::TrivialReal,
        Target::LPrime => ZeroKind::Nontrivial,
    };
    Zero {
        location: s,
        kind,
        target,
        residual,
        deriv_abs: deriv,
        q: chi.modulus(),
        index: chi.index(),
    }
}

/// Newton iteration `s <- s - f(s)/f'(s)` from `s0`.
pub fn refine_zero(chi: &DirichletCharacter, s0: Complex64, target: Target) -> Result<Zero> {
    let mut s = s0;
    let mut stalled = 0;
    for _ in 0..=NEWTON_MAX_ITER {
        let (f, df) = eval_target_with_derivative(chi, target, s)?;
        let r = f.norm();
        if r < NEWTON_TOL {
            return Ok(make_zero(chi, target, s, r, df.norm()));
        }
        if !(df.norm() > 0.0) || !r.is_finite() {
            break;
        }
        let step = f / df;
        // a step below rounding means we sit at the attainable accuracy
        if step.norm() < 4.0 * f64::EPSILON * (1.0 + s.norm()) {
            stalled += 1;
            if stalled >= 2 && r < 1e-9 {
                return Ok(make_zero(chi, target, s, r, df.norm()));
            }
        }
        s -= step;
    }
    Err(Error::NonConvergent { start: s0 })
}

/// Zeros found in a rectangle together with the completeness ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroScan {
    pub zeros: Vec<Zero>,
    /// Winding of the whole (possibly perturbed) rectangle.
    pub total_winding: i64,
    /// Sum of the windings of the leaf cells.
    pub cell_winding_sum: i64,
    pub rect: Rect,
}

const SPLIT_FRACTIONS: [f64; 6] = [GOLDEN, 1.0 - GOLDEN, 0.5, 0.559, 0.441, 0.7];

fn split(rect: &Rect, frac: f64) -> (Rect, Rect) {
    let mut a = *rect;
    let mut b = *rect;
    if rect.width() >= rect.height() {
        let x = rect.sigma_min + frac * rect.width();
        a.sigma_max = x;
        b.sigma_min = x;
    } else {
        let y = rect.t_min + frac * rect.height();
        a.t_max = y;
        b.t_min = y;
    }
    (a, b)
}

struct Scanner<'a> {
    chi: &'a DirichletCharacter,
    target: Target,
}

impl Scanner<'_> {
    fn count(&self, rect: &Rect) -> Result<RectCount> {
        let f = |s: Complex64| counting_value(self.chi, self.target, s);
        winding_of(&f, rect)
    }

    fn newton_in(&self, rect: &Rect) -> Option<Zero> {
        let margin = 1e-9;
        let c = rect.center();
        let mut starts = vec![c];
        for k in 0..8 {
            let theta = 2.0 * PI * k as f64 / 8.0 + GOLDEN;
            starts.push(c + Complex64::new(0.3 * rect.width() * theta.cos(), 0.3 * rect.height() * theta.sin()));
        }
        starts
            .into_iter()
            .filter_map(|s0| refine_zero(self.chi, s0, self.target).ok())
            .find(|z| rect.contains(z.location, margin))
    }

    /// Returns the zeros inside `rect` (known to hold `winding` of them) and
    /// the sum of leaf windings.
    fn scan(&self, rect: Rect, winding: i64) -> Result<(Vec<Zero>, i64)> {
        if winding <= 0 {
            return Ok((Vec::new(), winding));
        }
        let side = rect.width().max(rect.height());
        if winding == 1 && side <= NEWTON_CELL {
            if let Some(z) = self.newton_in(&rect) {
                return Ok((vec![z], 1));
            }
        }
        if side < MIN_CELL {
            // a multiple zero (or one Newton cannot reach): one entry per multiplicity
            let z = self.newton_in(&rect).ok_or(Error::NonConvergent { start: rect.center() })?;
            return Ok((vec![z; winding as usize], winding));
        }
        let mut last_err = None;
        for &frac in &SPLIT_FRACTIONS {
            let (a, b) = split(&rect, frac);
            let (ca, cb) = match (self.count(&a), self.count(&b)) {
                (Ok(ca), Ok(cb)) => (ca, cb),
                (Err(e), _) | (_, Err(e)) => {
                    last_err = Some(e);
                    continue;
                }
            };
            if ca.winding + cb.winding != winding {
                last_err = Some(Error::BoundaryTooClose {
                    location: rect.center(),
                    min_abs: ca.boundary_min_abs.min(cb.boundary_min_abs),
                });
                continue;
            }
            let (ra, rb) = rayon::join(|| self.scan(a, ca.winding), || self.scan(b, cb.winding));
            let (mut za, sa) = ra?;
            let (zb, sb) = rb?;
            za.extend(zb);
            return Ok((za, sa + sb));
        }
        Err(last_err.unwrap_or(Error::NonConvergent { start: rect.center() }))
    }
}

fn sort_zeros(zeros: &mut [Zero]) {
    zeros.sort_by(|a, b| {
        a.location
            .im
            .total_cmp(&b.location.im)
            .then(a.location.re.total_cmp(&b.location.re))
    });
}

/// All zeros of the target function in `rect`, with the completeness ledger.
pub fn scan_rect(chi: &DirichletCharacter, rect: Rect, target: Target) -> Result<ZeroScan> {
    if rect.is_degenerate() {
        return Ok(ZeroScan {
            zeros: Vec::new(),
            total_winding: 0,
            cell_winding_sum: 0,
            rect,
        });
    }
    let whole = count_zeros_rect(chi, rect, target)?;
    let scanner = Scanner { chi, target };
    let (mut zeros, sum) = scanner.scan(whole.rect, whole.winding)?;
    sort_zeros(&mut zeros);
    Ok(ZeroScan {
        zeros,
        total_winding: whole.winding,
        cell_winding_sum: sum,
        rect: whole.rect,
    })
}

/// Horizontal extent scanned for the given target.
pub fn scan_sigma_range(chi: &DirichletCharacter, target: Target) -> (f64, f64) {
    match target {
        Target::L => (-1.0, 2.0),
        Target::LPrime => (-1.0, lprime_zero_free_abscissa(chi)),
    }
}

/// Smallest `sigma >= 2` (on a quarter grid) where the first nonzero term
/// `chi(m) ln(m) m^{-s}` of the series for `L'` dominates the sum of all the
/// others in absolute value, so that `L'` has no zeros with `Re s >= sigma`.
pub fn lprime_zero_free_abscissa(chi: &DirichletCharacter) -> f64 {
    let m = (2..)
        .find(|&n: &u64| chi.value_u(n).norm() > 0.5)
        .expect("some n >= 2 is coprime to q");
    let cutoff = 2000u64;
    let mut sigma = 2.0f64;
    loop {
        let lead = (m as f64).ln() * (m as f64).powf(-sigma);
        let mut rest = 0.0;
        for n in m + 1..=cutoff {
            if chi.value_u(n).norm() > 0.5 {
                rest += (n as f64).ln() * (n as f64).powf(-sigma);
            }
        }
        let x = cutoff as f64;
        rest += x.powf(1.0 - sigma) * (x.ln() / (sigma - 1.0) + 1.0 / (sigma - 1.0).powi(2));
        if lead > rest {
            return sigma;
        }
        sigma += 0.25;
    }
}

/// Zeros with `t_min <= Im s <= t_max` across the scanning strip.
pub fn find_zeros(chi: &DirichletCharacter, t_min: f64, t_max: f64, target: Target) -> Result<Vec<Zero>> {
    Ok(find_zeros_scan(chi, t_min, t_max, target)?.zeros)
}

pub fn find_zeros_scan(chi: &DirichletCharacter, t_min: f64, t_max: f64, target: Target) -> Result<ZeroScan> {
    if t_max.abs().max(t_min.abs()) > 200.0 {
        return Err(Error::InvalidArgument("zero scans are limited to |t| <= 200".into()));
    }
    if t_min > t_max {
        return Err(Error::InvalidArgument("t_min exceeds t_max".into()));
    }
    let (lo, hi) = scan_sigma_range(chi, target);
    scan_rect(chi, Rect::new(lo, hi, t_min, t_max), target)
}

/// Zeros forced by the gamma/sine factors and by the Euler factors of
/// imprimitive characters, ordered by modulus (ties by `Im`), first `count`.
pub fn trivial_zeros(chi: &DirichletCharacter, count: usize) -> Vec<Zero> {
    let star = chi.primitive_inducer();
    let kappa = star.parity() as f64;
    let mut cand: Vec<Complex64> = Vec::new();
    // zeta's sine zero at 0 is cancelled by the pole of zeta(1 - s)
    let first = if star.modulus() == 1 { 2.0 } else { kappa };
    for k in 0..count {
        cand.push(Complex64::new(-(first + 2.0 * k as f64), 0.0));
    }
    for p in prime_divisors(chi.modulus()) {
        let c = star.value_u(p);
        if c.norm() < 0.5 {
            continue;
        }
        let lp = (p as f64).ln();
        let k_max = count as i64 + 1;
        for k in -k_max..=k_max {
            cand.push(Complex64::new(0.0, (c.arg() + 2.0 * PI * k as f64) / lp));
        }
    }
    cand.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    cand.truncate(count);
    cand.into_iter()
        .map(|s| {
            let (residual, deriv) = match eval_target_with_derivative(chi, Target::L, s) {
                Ok((f, df)) => (f.norm(), df.norm()),
                Err(_) => (f64::NAN, f64::NAN),
            };
            let mut z = make_zero(chi, Target::L, s, residual, deriv);
            // s = 0 sits on both axes; it comes from the Euler factor or the sine
            if s.norm() == 0.0 {
                z.kind = ZeroKind::TrivialReal;
            }
            z
        })
        .collect()
}

/// PASS iff every zero has `deriv_abs > threshold`.
pub fn verify_simple(zeros: &[Zero], threshold: f64) -> VerificationSummary {
    let mut worst = Worst::min();
    for z in zeros {
        worst.push_min(z.deriv_abs, z.location);
    }
    let summary = VerificationSummary::lower_bound(
        "simple",
        worst.value,
        worst.location,
        threshold,
        zeros.len(),
        serde_json::json!({ "threshold": threshold }),
    );
    match (summary.status.is_pass(), worst.location) {
        (false, Some(at)) => summary.fail(format!("zero at {at} has |f'| = {:e}", worst.value)),
        _ => summary,
    }
}

/// PASS iff every nontrivial zero of `L` has `|Re - 1/2| < tol` and, when
/// `chi` is given, the functional-equation partner vanishes:
/// `|L(1 - rho; conj chi*)| < 1e-7` with `chi*` the primitive inducer (whose
/// nontrivial zeros are those of `chi`).
pub fn verify_rh(zeros: &[Zero], tol: f64, chi: Option<&DirichletCharacter>) -> VerificationSummary {
    let pairing_tol = 1e-7;
    let mut dev = Worst::max();
    let mut pair = Worst::max();
    let dual = chi.map(|c| c.primitive_inducer().conjugate());
    for z in zeros
        .iter()
        .filter(|z| z.kind == ZeroKind::Nontrivial && z.target == Target::L)
    {
        dev.push_max((z.location.re - 0.5).abs(), z.location);
        if let Some(d) = &dual {
            let partner = 1.0 - z.location;
            let r = eval(d, partner).map(|v| v.value.norm()).unwrap_or(f64::NAN);
            pair.push_max(r, partner);
        }
    }
    let mut summary = VerificationSummary::upper_bound(
        "rh",
        dev.value,
        dev.location,
        tol,
        dev.count,
        serde_json::json!({
            "tol": tol,
            "pairing_tol": pairing_tol,
            "pairing_checked": dual.is_some(),
            "pairing_worst": pair.value,
        }),
    );
    if !summary.status.is_pass() {
        summary = summary.fail(format!("|Re rho - 1/2| = {:e} at {:?}", dev.value, dev.location));
    } else if dual.is_some() && !(pair.value < pairing_tol) {
        summary = summary.fail(format!(
            "pairing residual {:e} at {:?}",
            pair.value, pair.location
        ));
    }
    summary
}
