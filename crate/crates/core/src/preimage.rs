//! Pre-images of the real axis and of circles under `L` (or `L'`): curve
//! tracing, strips between consecutive `Gamma'` curves, fundamental domains
//! and the intertwining / color-alternation checks.
//!
//! Every trace follows `f(s(tau)) = z(tau)` for a straight path
//! `z = z0 + tau w` or a circle `z = r e^{i tau}`: Euler predictor
//! `ds/dtau = z'(tau) / f'(s)`, Newton corrector onto `z(tau)`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunction::{eval, eval_target, eval_target_with_derivative, Target, SECOND_DERIVATIVE_STEP};
use crate::report::{VerificationSummary, Worst};
use crate::zeros::{find_zeros, refine_zero, trivial_zeros, Rect, Zero};

/// A rectangle of the `s`-plane, `(sigma_min, sigma_max, t_min, t_max)`.
pub type Window = Rect;

/// Largest distance between consecutive vertices.
pub const MAX_STEP: f64 = 0.02;
/// `|f'|` below this stops a trace at a branch point.
pub const BRANCH_TOL: f64 = 1e-6;
/// `|f'|` below this shrinks the step.
const SLOW_TOL: f64 = 1e-3;
const POLE_ABS: f64 = 1e10;
/// Principal characters: a trace this close to `s = 1` has hit the pole.
const POLE_RADIUS: f64 = 1e-5;
const MAX_VERTICES: usize = 200_000;
/// Seeds with `|f|` below this are snapped to the nearby zero.
const SNAP_RADIUS: f64 = 1e-3;
/// Seeds with `|Im f|` above this are rejected.
const ON_CURVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Mapped into `(1, +inf)`.
    GammaPrime,
    /// Through a zero, mapped into `(-inf, 1)`.
    GammaZero,
    /// Through a zero, mapped onto all of the real axis.
    GammaFull,
    /// Pre-image of the real axis under `L'`.
    Upsilon,
    /// Pre-image of a circle `|z| = r`.
    Circle,
    /// Pre-image of a segment `[L(v), 1]` from a branch point `v`.
    Cut,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::GammaPrime => "gamma_prime",
            CurveKind::GammaZero => "gamma_zero",
            CurveKind::GammaFull => "gamma_full",
            CurveKind::Upsilon => "upsilon",
            CurveKind::Circle => "circle",
            CurveKind::Cut => "cut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    WindowLeft,
    WindowRight,
    WindowBottom,
    WindowTop,
    Pole,
    Closed,
    BranchPoint,
    /// The image path reached its prescribed end.
    PathEnd,
    MaxVertices,
    Stalled,
}

impl EndReason {
    pub fn is_window(self) -> bool {
        matches!(
            self,
            EndReason::WindowLeft | EndReason::WindowRight | EndReason::WindowBottom | EndReason::WindowTop
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComponent {
    pub kind: CurveKind,
    pub target: Target,
    pub vertices: Vec<Complex64>,
    /// `f` at each vertex.
    pub values: Vec<Complex64>,
    /// `f'` at each vertex.
    pub derivs: Vec<Complex64>,
    /// Sign of `Re f` at each vertex: the two colors.
    pub colors: Vec<i8>,
    /// The zero, branch point or seed the trace started from.
    pub anchor: Complex64,
    pub anchor_vertex: usize,
    /// How the first and the last vertex came about.
    pub ends: [EndReason; 2],
    pub closed: bool,
    /// Branch points met by the trace.
    pub branch_points: Vec<Complex64>,
}

impl CurveComponent {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.vertices.len() == 1 {
            return (self.vertices[0] - p).norm();
        }
        self.vertices
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Heights at which the polyline crosses the vertical line `Re s = x`.
    pub fn crossings_at(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.re <= x && x < b.re) || (b.re <= x && x < a.re) {
                let u = (x - a.re) / (b.re - a.re);
                out.push(a.im + u * (b.im - a.im));
            }
        }
        out
    }

    /// Whether the polyline passes below `p` an odd number of times.
    pub fn is_below(&self, p: Complex64) -> bool {
        self.crossings_at(p.re).into_iter().filter(|&t| t < p.im).count() % 2 == 1
    }

    /// Height of the first crossing with `Re s = x`, if any.
    pub fn height_at(&self, x: f64) -> Option<f64> {
        self.crossings_at(x).into_iter().reduce(f64::min)
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let u = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (a + d * u - p).norm()
}

/// The image path `z(tau)`.
#[derive(Debug, Clone, Copy)]
enum Path {
    Line { z0: Complex64, w: Complex64 },
    Circle { r: f64 },
}

impl Path {
    fn at(&self, tau: f64) -> Complex64 {
        match *self {
            Path::Line { z0, w } => z0 + tau * w,
            Path::Circle { r } => Complex64::from_polar(r, tau),
        }
    }

    fn velocity(&self, tau: f64) -> Complex64 {
        match *self {
            Path::Line { w, .. } => w,
            Path::Circle { r } => Complex64::new(0.0, 1.0) * Complex64::from_polar(r, tau),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    s: Complex64,
    tau: f64,
    f: Complex64,
    df: Complex64,
}

struct Arm {
    points: Vec<Point>,
    end: EndReason,
    branch: Option<Complex64>,
}

struct Tracer<'a> {
    chi: &'a DirichletCharacter,
    target: Target,
    window: Window,
    path: Path,
}

impl Tracer<'_> {
    fn eval(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        eval_target_with_derivative(self.chi, self.target, s)
    }

    /// Newton onto `f(s) = z(tau)`.
    fn correct(&self, mut s: Complex64, tau: f64) -> Option<Point> {
        let start = s;
        let z = self.path.at(tau);
        let tol = 1e-12 * z.norm().max(1.0);
        for _ in 0..8 {
            let (f, df) = self.eval(s).ok()?;
            let r = f - z;
            if r.norm() <= tol {
                return Some(Point { s, tau, f, df });
            }
            if !(df.norm() > 0.0) || !f.norm().is_finite() {
                return None;
            }
            s -= r / df;
            // a long Newton jump has left the local branch
            if (s - start).norm() > 0.5 {
                return None;
            }
        }
        let (f, df) = self.eval(s).ok()?;
        ((f - z).norm() <= 100.0 * tol).then_some(Point { s, tau, f, df })
    }

    fn exit_side(&self, s: Complex64) -> Option<EndReason> {
        let w = &self.window;
        if s.re < w.sigma_min {
            Some(EndReason::WindowLeft)
        } else if s.re > w.sigma_max {
            Some(EndReason::WindowRight)
        } else if s.im < w.t_min {
            Some(EndReason::WindowBottom)
        } else if s.im > w.t_max {
            Some(EndReason::WindowTop)
        } else {
            None
        }
    }

    /// Follows the curve from `start` with `tau` moving in direction `dir`.
    /// `tau_end` stops the trace when reached; `closing` enables loop
    /// detection (circle paths, where `tau` wraps by multiples of `2 pi`).
    fn arm(&self, start: Point, dir: f64, tau_end: Option<f64>, closing: bool) -> Arm {
        let mut points = vec![start];
        let mut cur = start;
        let mut h = MAX_STEP;
        let mut prev_dir: Option<Complex64> = None;
        let mut next_turn = if closing {
            Some(start.tau + dir * 2.0 * PI)
        } else {
            None
        };
        loop {
            if points.len() >= MAX_VERTICES {
                return Arm { points, end: EndReason::MaxVertices, branch: None };
            }
            if cur.df.norm() < BRANCH_TOL {
                return Arm { points, end: EndReason::BranchPoint, branch: Some(cur.s) };
            }
            let max_step = if cur.df.norm() < SLOW_TOL { MAX_STEP / 4.0 } else { MAX_STEP };
            let slope = self.path.velocity(cur.tau) / cur.df;
            let mut dtau = dir * h.min(max_step) / slope.norm();
            let mut stop_at_end = false;
            if let Some(end) = tau_end {
                if (cur.tau + dtau - end) * dir >= 0.0 {
                    dtau = end - cur.tau;
                    stop_at_end = true;
                }
            }
            let mut at_turn = false;
            if let Some(turn) = next_turn {
                if (cur.tau + dtau - turn) * dir >= 0.0 {
                    dtau = turn - cur.tau;
                    at_turn = true;
                }
            }
            let pred = cur.s + dtau * slope;
            let step_len = (pred - cur.s).norm();
            let accepted = self.correct(pred, cur.tau + dtau).filter(|p| {
                let chord = p.s - cur.s;
                let ok_len = chord.norm() < 1.5 * max_step && (p.s - pred).norm() < 0.3 * step_len + 1e-12;
                let ok_dir = match prev_dir {
                    Some(d) => (chord * d.conj()).re > 0.5 * chord.norm() * d.norm(),
                    None => true,
                };
                ok_len && ok_dir
            });
            let Some(next) = accepted else {
                h = 0.5 * step_len.min(h);
                if h < 1e-10 {
                    return Arm { points, end: EndReason::Stalled, branch: None };
                }
                continue;
            };
            if let Some(side) = self.exit_side(next.s) {
                if let Some(edge) = self.clip(&cur, &next) {
                    points.push(edge);
                }
                return Arm { points, end: side, branch: None };
            }
            if next.f.norm() > POLE_ABS || self.chi.is_principal() && (next.s - 1.0).norm() < POLE_RADIUS {
                return Arm { points, end: EndReason::Pole, branch: None };
            }
            prev_dir = Some(next.s - cur.s);
            points.push(next);
            cur = next;
            h = (2.0 * h).min(MAX_STEP);
            if stop_at_end {
                return Arm { points, end: EndReason::PathEnd, branch: None };
            }
            if at_turn {
                if (cur.s - start.s).norm() < 1e-6 {
                    let last = points.len() - 1;
                    points[last].s = start.s;
                    return Arm { points, end: EndReason::Closed, branch: None };
                }
                next_turn = next_turn.map(|t| t + dir * 2.0 * PI);
            }
        }
    }

    /// The on-curve point where the chord `a -> b` leaves the window.
    fn clip(&self, a: &Point, b: &Point) -> Option<Point> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut best = None;
        for _ in 0..12 {
            let mid = 0.5 * (lo + hi);
            let tau = a.tau + mid * (b.tau - a.tau);
            let guess = a.s + mid * (b.s - a.s);
            match self.correct(guess, tau) {
                Some(p) if self.exit_side(p.s).is_none() => {
                    lo = mid;
                    best = Some(p);
                }
                Some(_) => hi = mid,
                None => break,
            }
        }
        best
    }
}

fn assemble(
    kind: CurveKind,
    target: Target,
    anchor: Complex64,
    backward: Arm,
    forward: Arm,
) -> CurveComponent {
    let mut pts: Vec<Point> = backward.points.iter().rev().copied().collect();
    let anchor_vertex = pts.len().saturating_sub(1);
    pts.extend(forward.points.iter().skip(1).copied());
    let mut branch_points = Vec::new();
    branch_points.extend(backward.branch);
    branch_points.extend(forward.branch);
    CurveComponent {
        kind,
        target,
        vertices: pts.iter().map(|p| p.s).collect(),
        values: pts.iter().map(|p| p.f).collect(),
        derivs: pts.iter().map(|p| p.df).collect(),
        colors: pts.iter().map(|p| if p.f.re >= 0.0 { 1 } else { -1 }).collect(),
        anchor,
        anchor_vertex,
        ends: [backward.end, forward.end],
        closed: false,
        branch_points,
    }
}

fn one_arm(kind: CurveKind, target: Target, anchor: Complex64, arm: Arm) -> CurveComponent {
    let start = Arm {
        points: vec![arm.points[0]],
        end: EndReason::PathEnd,
        branch: None,
    };
    let mut c = assemble(kind, target, anchor, start, arm);
    c.ends[0] = EndReason::PathEnd;
    c
}

/// Kind of a traced real-axis pre-image from its image values and ends.
fn classify_real(target: Target, values: &[Complex64], forward_end: EndReason, through_zero: bool) -> CurveKind {
    if target == Target::LPrime {
        return CurveKind::Upsilon;
    }
    let min = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let max = values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    if min > 1.0 {
        CurveKind::GammaPrime
    } else if through_zero || min <= 0.0 {
        // the arm with growing values either tends to 1 (exits right) or
        // passes 1 and runs off to the left
        if max < 1.0 && forward_end == EndReason::WindowRight {
            CurveKind::GammaZero
        } else if max < 1.0 {
            // truncated before the behaviour at the far end is visible
            CurveKind::GammaZero
        } else {
            CurveKind::GammaFull
        }
    } else if max < 1.0 {
        CurveKind::GammaZero
    } else {
        CurveKind::GammaFull
    }
}

fn check_window(window: &Window) -> Result<()> {
    if window.is_degenerate() {
        return Err(Error::InvalidArgument("window must have positive width and height".into()));
    }
    Ok(())
}

/// Traces the pre-image of the real axis through `seed`, without turning
/// branch points into errors.
fn trace_real_raw(chi: &DirichletCharacter, seed: Complex64, target: Target, window: Window) -> Result<CurveComponent> {
    check_window(&window)?;
    if !window.contains(seed, 0.0) {
        return Err(Error::InvalidArgument(format!("seed {seed} is outside the window")));
    }
    let tracer = Tracer {
        chi,
        target,
        window,
        path: Path::Line {
            z0: Complex64::new(0.0, 0.0),
            w: Complex64::new(1.0, 0.0),
        },
    };
    let f0 = eval_target(chi, target, seed)?;
    let (start, through_zero) = if f0.norm() < SNAP_RADIUS {
        let z = refine_zero(chi, seed, target)?;
        let (f, df) = tracer.eval(z.location)?;
        (Point { s: z.location, tau: 0.0, f, df }, true)
    } else {
        if f0.im.abs() > ON_CURVE_TOL {
            return Err(Error::SeedNotOnCurve { seed, im_abs: f0.im.abs() });
        }
        let p = tracer
            .correct(seed, f0.re)
            .ok_or(Error::NonConvergent { start: seed })?;
        (p, false)
    };
    let (fwd, bwd) = rayon::join(|| tracer.arm(start, 1.0, None, false), || tracer.arm(start, -1.0, None, false));
    let through_zero = through_zero
        || fwd.points.iter().chain(&bwd.points).any(|p| p.f.re <= 0.0)
            && fwd.points.iter().chain(&bwd.points).any(|p| p.f.re >= 0.0);
    let fwd_end = fwd.end;
    let mut c = assemble(CurveKind::GammaZero, target, start.s, bwd, fwd);
    c.kind = classify_real(target, &c.values, fwd_end, through_zero);
    Ok(c)
}

/// Traces the component of `Im f = 0` through `seed` (`f = L` or `L'`).
/// A seed within `1e-3` (in `|f|`) of a zero is first moved onto the zero.
pub fn trace_real_preimage(
    chi: &DirichletCharacter,
    seed: Complex64,
    target: Target,
    window: Window,
) -> Result<CurveComponent> {
    let c = trace_real_raw(chi, seed, target, window)?;
    if let Some(&location) = c.branch_points.first() {
        return Err(Error::BranchPointEncountered {
            location,
            partial: Box::new(c),
        });
    }
    Ok(c)
}

/// Heights on `Re s = sigma` where `Im L = 0` and `Re L > 1`: sign scan
/// with step `0.05`, then bisection.
pub fn gamma_prime_seeds(chi: &DirichletCharacter, sigma: f64, t_min: f64, t_max: f64) -> Result<Vec<Complex64>> {
    let steps = ((t_max - t_min) / 0.05).ceil().max(1.0) as usize;
    let ts: Vec<f64> = (0..=steps)
        .map(|k| (t_min + k as f64 * 0.05).min(t_max))
        .collect();
    let vals: Vec<Complex64> = ts
        .par_iter()
        .map(|&t| eval(chi, Complex64::new(sigma, t)).map(|r| r.value))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..steps {
        let (a, b) = (vals[k].im, vals[k + 1].im);
        if a == 0.0 {
            if vals[k].re > 1.0 {
                out.push(Complex64::new(sigma, ts[k]));
            }
            continue;
        }
        if a * b >= 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (ts[k], ts[k + 1], a);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = eval(chi, Complex64::new(sigma, mid))?.value.im;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let p = Complex64::new(sigma, 0.5 * (lo + hi));
        if eval(chi, p)?.value.re > 1.0 {
            out.push(p);
        }
    }
    Ok(out)
}

/// Default abscissa of the `Gamma'` seed line.
pub const SEED_SIGMA: f64 = 4.0;

/// All `Gamma'` components crossing the seed line `Re s = 4` (clamped into
/// the window), ordered by height there.
pub fn gamma_prime_curves(chi: &DirichletCharacter, window: Window) -> Result<Vec<CurveComponent>> {
    check_window(&window)?;
    let sigma = SEED_SIGMA.clamp(
        window.sigma_min + 0.25 * window.width().min(1.0),
        window.sigma_max - 0.25 * window.width().min(1.0),
    );
    let seeds = gamma_prime_seeds(chi, sigma, window.t_min, window.t_max)?;
    let traced: Vec<Result<CurveComponent>> = seeds
        .par_iter()
        .map(|&s| trace_real_raw(chi, s, Target::L, window))
        .collect();
    let mut curves: Vec<CurveComponent> = Vec::new();
    for (seed, c) in seeds.iter().zip(traced) {
        let c = c?;
        if c.kind != CurveKind::GammaPrime {
            continue;
        }
        if curves.iter().any(|o| o.distance_to(*seed) < 1e-6) {
            continue;
        }
        curves.push(c);
    }
    Ok(curves)
}

/// Every traced real-axis pre-image in the window: for `L` the `Gamma'`
/// curves plus the curves through each zero (trivial ones included), for
/// `L'` the curves through the zeros of `L'`. Curves that meet a branch point
/// are kept as traced (their `branch_points` is nonempty).
pub fn real_preimage_components(chi: &DirichletCharacter, target: Target, window: Window) -> Result<Vec<CurveComponent>> {
    check_window(&window)?;
    let mut curves = match target {
        Target::L => gamma_prime_curves(chi, window)?,
        Target::LPrime => Vec::new(),
    };
    let mut seeds: Vec<Complex64> = find_zeros(chi, window.t_min, window.t_max, target)?
        .into_iter()
        .map(|z| z.location)
        .collect();
    if target == Target::L {
        seeds.extend(trivial_zeros(chi, 64).into_iter().map(|z| z.location));
    }
    seeds.retain(|s| window.contains(*s, 0.0));
    seeds.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    seeds.dedup_by(|a, b| (*a - *b).norm() < 1e-9);
    let traced: Vec<Result<CurveComponent>> = seeds
        .par_iter()
        .map(|&s| trace_real_raw(chi, s, target, window))
        .collect();
    for (seed, c) in seeds.iter().zip(traced) {
        let c = c?;
        if curves.iter().any(|o| o.distance_to(*seed) < 1e-6) {
            continue;
        }
        curves.push(c);
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub lower_boundary: CurveComponent,
    pub upper_boundary: CurveComponent,
    pub zeros_inside: Vec<Zero>,
    pub branch_points_inside: Vec<Zero>,
    /// Real-axis pre-images through the zeros inside.
    pub interior_curves: Vec<CurveComponent>,
    /// Both boundaries run from the left to the right window edge.
    pub complete: bool,
}

impl Strip {
    pub fn contains(&self, p: Complex64) -> bool {
        self.lower_boundary.is_below(p) && !self.upper_boundary.is_below(p)
    }

    pub fn gamma_zero_count(&self) -> usize {
        self.interior_curves
            .iter()
            .filter(|c| c.kind == CurveKind::GammaZero)
            .count()
    }
}

fn spans_window(c: &CurveComponent) -> bool {
    let mut ends = c.ends;
    ends.sort_by_key(|e| *e as u8);
    matches!(ends, [EndReason::WindowLeft, EndReason::WindowRight] | [EndReason::WindowRight, EndReason::WindowLeft])
}

/// The strips between consecutive `Gamma'` components in the window, with
/// their zeros, branch points and zero curves.
pub fn find_strips(chi: &DirichletCharacter, window: Window) -> Result<Vec<Strip>> {
    let curves = gamma_prime_curves(chi, window)?;
    if curves.is_empty() {
        return Err(Error::WindowTooSmall);
    }
    if curves.len() < 2 {
        return Ok(Vec::new());
    }
    let zeros = find_zeros(chi, window.t_min, window.t_max, Target::L)?;
    let branch = find_zeros(chi, window.t_min, window.t_max, Target::LPrime)?;
    let inside = |p: Complex64| window.contains(p, 0.0);
    let mut strips = Vec::new();
    for pair in curves.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        let member = |p: Complex64| lo.is_below(p) && !hi.is_below(p);
        let zs: Vec<Zero> = zeros.iter().filter(|z| inside(z.location) && member(z.location)).cloned().collect();
        let bs: Vec<Zero> = branch.iter().filter(|z| inside(z.location) && member(z.location)).cloned().collect();
        let interior: Vec<CurveComponent> = zs
            .par_iter()
            .map(|z| trace_real_raw(chi, z.location, Target::L, window))
            .collect::<Result<_>>()?;
        strips.push(Strip {
            lower_boundary: lo.clone(),
            upper_boundary: hi.clone(),
            zeros_inside: zs,
            branch_points_inside: bs,
            interior_curves: interior,
            complete: spans_window(lo) && spans_window(hi),
        });
    }
    Ok(strips)
}

/// Traces the two arcs of the pre-image of the segment `[L(v), 1]` leaving
/// the branch point `v` of `L`.
pub fn branch_cut(chi: &DirichletCharacter, v: Complex64, window: Window) -> Result<Vec<CurveComponent>> {
    let lv = eval(chi, v)?.value;
    let h = SECOND_DERIVATIVE_STEP;
    let l2 = (eval_target(chi, Target::LPrime, v + h)? - eval_target(chi, Target::LPrime, v - h)?) / (2.0 * h);
    let c = 0.5 * l2;
    let w = Complex64::new(1.0, 0.0) - lv;
    let tracer = Tracer {
        chi,
        target: Target::L,
        window,
        path: Path::Line { z0: lv, w },
    };
    // start a distance 1e-3 from v: (s - v)^2 = eps (1 - L(v)) / c
    let delta: f64 = 1e-3;
    let eps = delta * delta * c.norm() / w.norm();
    let root = (eps * w / c).sqrt();
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let start = tracer
            .correct(v + sign * root, eps)
            .ok_or(Error::NonConvergent { start: v })?;
        let arm = tracer.arm(start, 1.0, Some(1.0), false);
        let mut comp = one_arm(CurveKind::Cut, Target::L, v, arm);
        // the arc starts at v itself
        comp.vertices.insert(0, v);
        comp.values.insert(0, lv);
        comp.derivs.insert(0, Complex64::new(0.0, 0.0));
        comp.colors.insert(0, if lv.re >= 0.0 { 1 } else { -1 });
        out.push(comp);
    }
    Ok(out)
}

/// The part of a real-axis curve where `f >= 1`: the pre-image of the slit.
fn slit_part(c: &CurveComponent) -> Option<CurveComponent> {
    let idx: Vec<usize> = (0..c.len()).filter(|&i| c.values[i].re >= 1.0).collect();
    if idx.len() < 2 {
        return None;
    }
    let (a, b) = (idx[0], *idx.last().unwrap());
    let mut part = c.clone();
    part.vertices = c.vertices[a..=b].to_vec();
    part.values = c.values[a..=b].to_vec();
    part.derivs = c.derivs[a..=b].to_vec();
    part.colors = c.colors[a..=b].to_vec();
    part.anchor_vertex = 0;
    Some(part)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalDomain {
    /// Curves bounding the domain (strip boundaries, slit pre-images, cuts).
    pub boundary: Vec<CurveComponent>,
    /// An interior sample point.
    pub witness: Complex64,
    pub zeros_inside: Vec<Complex64>,
    /// Grid cells in the domain.
    pub area_cells: usize,
    /// Samples used for the injectivity witness.
    pub samples: usize,
    /// Smallest pairwise distance between sample images.
    pub min_image_separation: f64,
    pub injective: bool,
}

/// Grid over the strip used to separate the domains.
struct Grid {
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x0 + (i as f64 + 0.5) * self.dx, self.y0 + (j as f64 + 0.5) * self.dy)
    }

    fn cell(&self, p: Complex64) -> Option<(usize, usize)> {
        let i = ((p.re - self.x0) / self.dx).floor();
        let j = ((p.im - self.y0) / self.dy).floor();
        (i >= 0.0 && j >= 0.0 && (i as usize) < self.nx && (j as usize) < self.ny).then(|| (i as usize, j as usize))
    }
}

/// Marks the cells on the polyline (8-connected, so 4-connected fills
/// cannot cross it).
fn rasterize(grid: &Grid, c: &CurveComponent, mark: &mut dyn FnMut(usize, usize)) {
    let to_cell = |p: Complex64| -> (i64, i64) {
        (
            ((p.re - grid.x0) / grid.dx).floor() as i64,
            ((p.im - grid.y0) / grid.dy).floor() as i64,
        )
    };
    let mut put = |i: i64, j: i64| {
        if i >= 0 && j >= 0 && (i as usize) < grid.nx && (j as usize) < grid.ny {
            mark(i as usize, j as usize);
        }
    };
    for w in c.vertices.windows(2) {
        let (mut x0, mut y0) = to_cell(w[0]);
        let (x1, y1) = to_cell(w[1]);
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            put(x0, y0);
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }
}

/// Side of the injectivity witness mesh.
pub const WITNESS_MESH: usize = 50;

/// Cuts a strip into fundamental domains: the pre-images of `[1, +inf)`
/// (parts of the zero curves) and of the segments `[L(v), 1]` from each
/// branch point `v` separate the strip; the pieces are found on a grid.
pub fn fundamental_domains(chi: &DirichletCharacter, strip: &Strip, window: Window) -> Result<Vec<FundamentalDomain>> {
    if !strip.complete {
        return Err(Error::IncompleteStrip("a strip boundary leaves the window through its top or bottom".into()));
    }
    let j = strip.zeros_inside.len();
    if strip.branch_points_inside.len() + 1 < j {
        return Err(Error::IncompleteStrip(format!(
            "{} zeros but only {} branch points inside the window",
            j,
            strip.branch_points_inside.len()
        )));
    }
    let cuts: Vec<Vec<CurveComponent>> = strip
        .branch_points_inside
        .par_iter()
        .map(|b| branch_cut(chi, b.location, window))
        .collect::<Result<_>>()?;
    let mut barriers: Vec<CurveComponent> = vec![strip.lower_boundary.clone(), strip.upper_boundary.clone()];
    barriers.extend(strip.interior_curves.iter().filter_map(slit_part));
    barriers.extend(cuts.into_iter().flatten());

    // grid over the strip's vertical extent inside the window
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in [&strip.lower_boundary, &strip.upper_boundary] {
        for v in &c.vertices {
            lo = lo.min(v.im);
            hi = hi.max(v.im);
        }
    }
    let cell = 0.02;
    let grid = Grid {
        x0: window.sigma_min,
        y0: lo - cell,
        dx: cell,
        dy: cell,
        nx: (window.width() / cell).ceil() as usize,
        ny: ((hi - lo) / cell).ceil() as usize + 2,
    };
    let n = grid.nx * grid.ny;
    let mut blocked = vec![false; n];
    let mut owner = vec![usize::MAX; n];
    for (k, c) in barriers.iter().enumerate() {
        rasterize(&grid, c, &mut |i, j| {
            blocked[j * grid.nx + i] = true;
            owner[j * grid.nx + i] = k;
        });
    }
    // strip membership column by column
    for i in 0..grid.nx {
        let x = grid.point(i, 0).re;
        let below = |c: &CurveComponent, y: f64| c.crossings_at(x).into_iter().filter(|&t| t < y).count() % 2 == 1;
        for jj in 0..grid.ny {
            let p = grid.point(i, jj);
            if !(below(&strip.lower_boundary, p.im) && !below(&strip.upper_boundary, p.im)) {
                blocked[jj * grid.nx + i] = true;
            }
        }
    }
    // 4-connected components
    let mut label = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if blocked[start] || label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        while let Some(c) = queue.pop_front() {
            members.push(c);
            let (i, jj) = (c % grid.nx, c / grid.nx);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(c - 1);
            }
            if i + 1 < grid.nx {
                nb.push(c + 1);
            }
            if jj > 0 {
                nb.push(c - grid.nx);
            }
            if jj + 1 < grid.ny {
                nb.push(c + grid.nx);
            }
            for m in nb {
                if !blocked[m] && label[m] == usize::MAX {
                    label[m] = id;
                    queue.push_back(m);
                }
            }
        }
        comps.push(members);
    }
    let total: usize = comps.iter().map(Vec::len).sum();
    // slivers between nearly touching curves are not domains
    let min_cells = (total / 200).max(20);
    let zero_cells: Vec<(Complex64, Option<usize>)> = strip
        .zeros_inside
        .iter()
        .map(|z| (z.location, grid.cell(z.location).map(|(i, jj)| jj * grid.nx + i)))
        .collect();

    let mut domains = Vec::new();
    for (id, members) in comps.iter().enumerate() {
        let zeros_here: Vec<Complex64> = zero_cells
            .iter()
            .filter(|(_, c)| c.is_some_and(|c| label[c] == id))
            .map(|(z, _)| *z)
            .collect();
        if members.len() < min_cells && zeros_here.is_empty() {
            continue;
        }
        // boundary curves: barrier owners adjacent to the component
        let mut touching: Vec<usize> = Vec::new();
        for &c in members {
            let (i, jj) = (c % grid.nx, c / grid.nx);
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (a, b) = (i as i64 + di, jj as i64 + dj);
                if a < 0 || b < 0 || a as usize >= grid.nx || b as usize >= grid.ny {
                    continue;
                }
                let o = owner[b as usize * grid.nx + a as usize];
                if o != usize::MAX && !touching.contains(&o) {
                    touching.push(o);
                }
            }
        }
        touching.sort_unstable();
        // interior samples: cells of a 50 x 50 mesh over the bounding box
        // whose 4-neighbours all belong to the component
        let (mut imin, mut imax, mut jmin, mut jmax) = (usize::MAX, 0, usize::MAX, 0);
        for &c in members {
            let (i, jj) = (c % grid.nx, c / grid.nx);
            imin = imin.min(i);
            imax = imax.max(i);
            jmin = jmin.min(jj);
            jmax = jmax.max(jj);
        }
        let interior = |i: usize, jj: usize| -> bool {
            if i == 0 || jj == 0 || i + 1 >= grid.nx || jj + 1 >= grid.ny {
                return false;
            }
            [(i, jj), (i - 1, jj), (i + 1, jj), (i, jj - 1), (i, jj + 1)]
                .iter()
                .all(|&(a, b)| label[b * grid.nx + a] == id)
        };
        let mut sample_pts = Vec::new();
        for a in 0..WITNESS_MESH {
            for b in 0..WITNESS_MESH {
                let i = imin + ((imax - imin) as f64 * (a as f64 + 0.5) / WITNESS_MESH as f64) as usize;
                let jj = jmin + ((jmax - jmin) as f64 * (b as f64 + 0.5) / WITNESS_MESH as f64) as usize;
                if interior(i, jj) {
                    let p = grid.point(i, jj);
                    if !sample_pts.contains(&p) {
                        sample_pts.push(p);
                    }
                }
            }
        }
        let images: Vec<Complex64> = sample_pts
            .par_iter()
            .map(|&p| eval(chi, p).map(|r| r.value))
            .collect::<Result<_>>()?;
        let min_sep = min_pairwise_distance(&images);
        let witness = sample_pts
            .get(sample_pts.len() / 2)
            .copied()
            .unwrap_or_else(|| grid.point(members[0] % grid.nx, members[0] / grid.nx));
        domains.push(FundamentalDomain {
            boundary: touching.iter().map(|&k| barriers[k].clone()).collect(),
            witness,
            zeros_inside: zeros_here,
            area_cells: members.len(),
            samples: sample_pts.len(),
            min_image_separation: min_sep,
            injective: min_sep > 1e-8,
        });
    }
    domains.sort_by(|a, b| a.witness.im.total_cmp(&b.witness.im));
    Ok(domains)
}

/// Smallest distance between two entries, by a sweep over real parts.
pub fn min_pairwise_distance(points: &[Complex64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut best = f64::INFINITY;
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if sorted[j].re - sorted[i].re >= best {
                break;
            }
            best = best.min((sorted[j] - sorted[i]).norm());
        }
    }
    best
}

/// Traces the components of `|L| = r` meeting the window: one loop around
/// each zero, plus the components through points of the real-axis curves
/// where `L = +-r`.
pub fn circle_preimage(chi: &DirichletCharacter, r: f64, window: Window) -> Result<Vec<CurveComponent>> {
    check_window(&window)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let zeros: Vec<Zero> = find_zeros(chi, window.t_min, window.t_max, Target::L)?
        .into_iter()
        .filter(|z| window.contains(z.location, 0.0))
        .collect();
    // keep r away from the critical values |L(v)| at branch points
    let branch = find_zeros(chi, window.t_min, window.t_max, Target::LPrime)?;
    let mut r = r;
    for b in &branch {
        if let Ok(v) = eval(chi, b.location) {
            if (v.value.norm() - r).abs() < 1e-6 {
                r += 1e-6;
            }
        }
    }
    let tracer = Tracer {
        chi,
        target: Target::L,
        window,
        path: Path::Circle { r },
    };
    let mut seeds: Vec<Point> = Vec::new();
    for z in &zeros {
        if let Some(p) = circle_seed_near_zero(&tracer, z.location, r) {
            seeds.push(p);
        }
    }
    let mut real_curves = gamma_prime_curves(chi, window).unwrap_or_default();
    for z in &zeros {
        if let Ok(c) = trace_real_raw(chi, z.location, Target::L, window) {
            real_curves.push(c);
        }
    }
    for c in &real_curves {
        for k in 1..c.len() {
            for (level, theta) in [(r, 0.0), (-r, PI)] {
                let (a, b) = (c.values[k - 1].re - level, c.values[k].re - level);
                if a * b <= 0.0 && a != b {
                    let u = a / (a - b);
                    let guess = c.vertices[k - 1] + u * (c.vertices[k] - c.vertices[k - 1]);
                    if let Some(p) = tracer.correct(guess, theta) {
                        if window.contains(p.s, 0.0) {
                            seeds.push(p);
                        }
                    }
                }
            }
        }
    }
    let mut comps: Vec<CurveComponent> = Vec::new();
    for seed in seeds {
        // chords of a loop of radius >= 0.02 sag by less than MAX_STEP / 4
        if comps.iter().any(|c| c.distance_to(seed.s) < 0.25 * MAX_STEP) {
            continue;
        }
        let fwd = tracer.arm(seed, 1.0, None, true);
        let comp = if fwd.end == EndReason::Closed {
            let mut c = one_arm(CurveKind::Circle, Target::L, seed.s, fwd);
            c.ends = [EndReason::Closed, EndReason::Closed];
            c.closed = true;
            c
        } else {
            let bwd = tracer.arm(seed, -1.0, None, false);
            assemble(CurveKind::Circle, Target::L, seed.s, bwd, fwd)
        };
        comps.push(comp);
    }
    Ok(comps)
}

/// A point with `L = r` (exactly, `tau = 0`) on the small loop around `rho`.
fn circle_seed_near_zero(tracer: &Tracer, rho: Complex64, r: f64) -> Option<Point> {
    let (_, d) = tracer.eval(rho).ok()?;
    if d.norm() < BRANCH_TOL {
        return None;
    }
    // march along the direction where L grows along the positive axis
    let dir = (1.0 / d) / (1.0 / d).norm();
    let mut delta = (r / d.norm()).min(0.05);
    let mut s = rho + dir * delta;
    for _ in 0..200 {
        if let Some(p) = tracer.correct(s, 0.0) {
            return Some(p);
        }
        delta *= 0.7;
        s = rho + dir * delta;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPoint {
    pub s: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
}

/// Horizontal-tangent points of a real-axis curve of `L`, refined by
/// bisection on the sign of `Im L'` along the curve.
pub fn horizontal_tangents(chi: &DirichletCharacter, curve: &CurveComponent, window: Window) -> Result<Vec<TangentPoint>> {
    if curve.target != Target::L {
        return Err(Error::InvalidArgument("horizontal tangents need a pre-image under L".into()));
    }
    let tracer = Tracer {
        chi,
        target: Target::L,
        window,
        path: Path::Line {
            z0: Complex64::new(0.0, 0.0),
            w: Complex64::new(1.0, 0.0),
        },
    };
    let mut out = Vec::new();
    for k in 1..curve.len() {
        let (da, db) = (curve.derivs[k - 1], curve.derivs[k]);
        if da.norm() == 0.0 || db.norm() == 0.0 || da.im * db.im > 0.0 {
            continue;
        }
        if da.im == 0.0 && k > 1 {
            continue; // counted at the previous interval
        }
        let (mut lo, mut hi) = (curve.values[k - 1].re, curve.values[k].re);
        let (mut s_lo, s_hi) = (curve.vertices[k - 1], curve.vertices[k]);
        let mut sign_lo = da.im;
        let mut best = Point {
            s: s_lo,
            tau: lo,
            f: curve.values[k - 1],
            df: da,
        };
        let _ = s_hi;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let Some(p) = tracer.correct(s_lo, mid) else { break };
            best = p;
            if p.df.im == 0.0 {
                break;
            }
            if (p.df.im > 0.0) == (sign_lo > 0.0) {
                lo = mid;
                s_lo = p.s;
                sign_lo = p.df.im;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() < 1e-15 * (1.0 + lo.abs()) {
                break;
            }
        }
        out.push(TangentPoint {
            s: best.s,
            value: best.f,
            derivative: best.df,
        });
    }
    Ok(out)
}

/// At every horizontal-tangent point of `curve`, `|Im L'| < 1e-6`; on
/// `Gamma'` curves additionally `Re L' < 0`.
pub fn check_intertwining(chi: &DirichletCharacter, curve: &CurveComponent, window: Window) -> Result<VerificationSummary> {
    let points = horizontal_tangents(chi, curve, window)?;
    let tol = 1e-6;
    let mut worst = Worst::max();
    let mut wrong_color: Vec<Complex64> = Vec::new();
    for p in &points {
        worst.push_max(p.derivative.im.abs(), p.s);
        if curve.kind == CurveKind::GammaPrime && !(p.derivative.re < 0.0) {
            wrong_color.push(p.s);
        }
    }
    let mut summary = VerificationSummary::upper_bound(
        "intertwine",
        worst.value,
        worst.location,
        tol,
        points.len(),
        serde_json::json!({
            "kind": curve.kind.as_str(),
            "color_rule": curve.kind == CurveKind::GammaPrime,
            "tangent_points": points.iter().map(|p| [p.s.re, p.s.im]).collect::<Vec<_>>(),
        }),
    );
    if !summary.status.is_pass() {
        summary = summary.fail(format!("|Im L'| = {:e} at a horizontal tangent", worst.value));
    } else if let Some(at) = wrong_color.first() {
        summary = summary.fail(format!("Re L' >= 0 at horizontal tangent {at}"));
    }
    Ok(summary)
}

/// Walks a circle pre-image and checks that the signs of `Re L` at the
/// successive crossings of `Im L = 0` alternate.
pub fn check_color_alternation(curve: &CurveComponent) -> VerificationSummary {
    let mut crossings: Vec<(Complex64, i8)> = Vec::new();
    let n = curve.len();
    let limit = if curve.closed { n } else { n.saturating_sub(1) };
    for k in 0..limit {
        let (a, b) = (k, (k + 1) % n);
        if a == b {
            continue;
        }
        let (ia, ib) = (curve.values[a].im, curve.values[b].im);
        if ia == 0.0 || ia * ib < 0.0 {
            let u = if ia == ib { 0.0 } else { ia / (ia - ib) };
            let re = curve.values[a].re + u * (curve.values[b].re - curve.values[a].re);
            let at = curve.vertices[a] + u * (curve.vertices[b] - curve.vertices[a]);
            crossings.push((at, if re >= 0.0 { 1 } else { -1 }));
        }
    }
    let mut bad = None;
    let m = crossings.len();
    let pairs = if curve.closed { m } else { m.saturating_sub(1) };
    for k in 0..pairs {
        let (a, b) = (crossings[k], crossings[(k + 1) % m]);
        if m > 1 && a.1 == b.1 {
            bad = Some(b.0);
            break;
        }
    }
    let summary = VerificationSummary::upper_bound(
        "alternation",
        if bad.is_some() { 1.0 } else { 0.0 },
        bad,
        0.5,
        m,
        serde_json::json!({ "crossings": m, "closed": curve.closed }),
    );
    match bad {
        Some(at) => summary.fail(format!("two crossings of the same color in a row near {at}")),
        None => summary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zeta() -> DirichletCharacter {
        enumerate_characters(1).remove(0)
    }

    fn assert_on_real_preimage(curve: &CurveComponent) {
        for v in &curve.values {
            assert!(v.im.abs() < 1e-8 * v.norm().max(1.0), "Im f = {}", v.im);
        }
        for w in curve.vertices.windows(2) {
            assert!((w[1] - w[0]).norm() <= 1.5 * MAX_STEP + 1e-12);
        }
    }

    #[test]
    fn first_zero_lies_on_a_curve_tending_to_one() {
        let w = Window::new(-2.0, 6.0, 5.0, 25.0);
        let curve = trace_real_preimage(&zeta(), c(0.5, 14.134725), Target::L, w).unwrap();
        assert_on_real_preimage(&curve);
        assert!((curve.anchor - c(0.5, 14.134_725_141_734_7)).norm() < 1e-9);
        // one arm runs right with values below 1, the other left to -inf
        assert_eq!(curve.kind, CurveKind::GammaZero);
        assert_eq!(curve.ends, [EndReason::WindowLeft, EndReason::WindowRight]);
        assert!(curve.values.iter().all(|v| v.re < 1.0));
    }

    #[test]
    fn real_axis_of_zeta() {
        let w = Window::new(-2.0, 6.0, -1.0, 1.0);
        let curve = trace_real_preimage(&zeta(), c(3.0, 0.0), Target::L, w).unwrap();
        assert_eq!(curve.kind, CurveKind::GammaPrime);
        assert!(curve.vertices.iter().all(|v| v.im.abs() < 1e-12));
        assert_eq!(curve.ends, [EndReason::WindowRight, EndReason::Pole]);
    }

    #[test]
    fn seed_off_curve_is_rejected() {
        let s = c(2.0, 1.0);
        assert!(eval(&zeta(), s).unwrap().value.im.abs() > 1e-3);
        assert!(matches!(
            trace_real_preimage(&zeta(), s, Target::L, Window::new(-2.0, 6.0, -5.0, 5.0)),
            Err(Error::SeedNotOnCurve { .. })
        ));
    }

    #[test]
    fn upsilon_curves_are_real_for_the_derivative() {
        // a zeta' zero is a zero of the L' target
        let w = Window::new(-1.0, 5.0, 20.0, 27.0);
        let curve = trace_real_preimage(&zeta(), c(2.463162, 23.298320), Target::LPrime, w).unwrap();
        assert_eq!(curve.kind, CurveKind::Upsilon);
        assert_on_real_preimage(&curve);
    }

    #[test]
    fn gamma_prime_heights_for_zeta() {
        let w = Window::new(-2.0, 6.0, 1.0, 60.0);
        let curves = gamma_prime_curves(&zeta(), w).unwrap();
        let h: Vec<f64> = curves.iter().map(|c| c.height_at(SEED_SIGMA).unwrap()).collect();
        let expect = [9.217006, 17.946903, 27.444021, 35.958832, 45.437223, 54.438571];
        assert_eq!(h.len(), expect.len());
        for (a, b) in h.iter().zip(expect) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
        for c in &curves {
            assert!(c.values.iter().all(|v| v.re > 1.0));
            assert_on_real_preimage(c);
        }
        for p in curves.windows(2) {
            let d = p[0].vertices.iter().map(|&v| p[1].distance_to(v)).fold(f64::INFINITY, f64::min);
            assert!(d > 1e-4);
        }
    }

    #[test]
    fn strip_around_fifty() {
        let w = Window::new(-2.0, 6.0, 40.0, 60.0);
        let strips = find_strips(&zeta(), w).unwrap();
        let full: Vec<&Strip> = strips.iter().filter(|s| s.complete).collect();
        assert_eq!(full.len(), 1);
        let s = full[0];
        let ims: Vec<f64> = s.zeros_inside.iter().map(|z| z.location.im).collect();
        for (a, b) in ims.iter().zip([48.005150881, 49.773832478, 52.970321478]) {
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(s.branch_points_inside.len(), 2);
        assert_eq!(s.gamma_zero_count(), 1);
        let domains = fundamental_domains(&zeta(), s, w).unwrap();
        assert_eq!(domains.len(), 3);
        for d in &domains {
            assert_eq!(d.zeros_inside.len(), 1);
            assert!(d.injective);
        }
    }

    #[test]
    fn window_far_right_has_no_boundary_curves() {
        let w = Window::new(7.0, 9.0, 3.0, 5.0);
        assert!(matches!(find_strips(&zeta(), w), Err(Error::WindowTooSmall)));
    }

    #[test]
    fn small_circle_around_first_zero() {
        let w = Window::new(0.0, 1.0, 13.5, 14.8);
        let loops = circle_preimage(&zeta(), 0.05, w).unwrap();
        assert_eq!(loops.len(), 1);
        let lp = &loops[0];
        assert!(lp.closed);
        for v in &lp.values {
            assert!((v.norm() - 0.05).abs() < 1e-8);
        }
        let alt = check_color_alternation(lp);
        assert!(alt.status.is_pass());
        assert_eq!(alt.count, 2);
    }

    #[test]
    fn loops_fuse_past_the_branch_value() {
        // |zeta(v)| at the branch point v = 2.463162 + 23.298320i
        let r_v = 0.929_606_950;
        let w = Window::new(-1.0, 4.0, 19.0, 27.0);
        let below = circle_preimage(&zeta(), 0.98 * r_v, w).unwrap();
        assert_eq!(below.len(), 2);
        let above = circle_preimage(&zeta(), 1.02 * r_v, w).unwrap();
        assert_eq!(above.len(), 1);
        assert!(above[0].closed);
        let alt = check_color_alternation(&above[0]);
        assert!(alt.status.is_pass());
        assert_eq!(alt.count, 4);
    }

    #[test]
    fn unbounded_circle_component_alternates() {
        let w = Window::new(-2.0, 6.0, 0.0, 30.0);
        let comps = circle_preimage(&zeta(), 1.2, w).unwrap();
        assert!(comps.iter().all(|c| !c.closed));
        let long = comps.iter().max_by_key(|c| c.len()).unwrap();
        // crosses the boundary curves at heights ~9.2, ~17.9 and ~27.4
        let g = gamma_prime_curves(&zeta(), w).unwrap();
        for gp in g.iter().filter(|gp| gp.height_at(SEED_SIGMA).unwrap() > 1.0) {
            assert!(long.vertices.iter().any(|&v| gp.distance_to(v) < MAX_STEP));
        }
        for c in &comps {
            assert!(check_color_alternation(c).status.is_pass());
        }
    }

    #[test]
    fn intertwining_on_zeta_boundaries() {
        let w = Window::new(-2.0, 6.0, 5.0, 40.0);
        let curves = gamma_prime_curves(&zeta(), w).unwrap();
        let mut tangents = 0;
        for g in &curves {
            let r = check_intertwining(&zeta(), g, w).unwrap();
            assert!(r.status.is_pass(), "{r:?}");
            tangents += r.count;
        }
        assert_eq!(tangents, 2);
    }

    #[test]
    fn pairwise_distance_sweep() {
        let pts = [c(0.0, 0.0), c(3.0, 0.0), c(0.1, 5.0), c(2.9, 0.05)];
        assert!((min_pairwise_distance(&pts) - (0.1f64 * 0.1 + 0.05 * 0.05).sqrt()).abs() < 1e-15);
    }
}
