//! Phase classification of the cubic model over the complex t plane:
//! boundary curves Re G_k(-beta_k(t)) = 0, region labeling by the S-curve
//! pipeline, and the transition catalogue (splitting/merging and
//! birth/death of a cut at a distance).

use std::sync::Mutex;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::onecut::{cubic_potential, g_cubic_at_minus_beta, solve_cubic_branch, OneCutSolution};
use crate::stokes::{
    embed_s_curve, short_between, validate_cuts, ReG, Rect, StokesLine, TracerConfig,
};
use crate::twocut::{continue_in_t, newton_solve, split_seeds, TwoCutSolution};

/// Opening half-angle of each convergence sector of exp(-n W).
pub const SECTOR_HALF_OPENING: f64 = std::f64::consts::PI / 6.0;

/// Bisection tolerance (in |t|) for critical points on rays.
pub const TOL_CRITICAL: f64 = 1e-8;

/// Central angle of convergence sector k (k = 0, 1, 2).
pub fn sector_angle(k: usize) -> f64 {
    2.0 * std::f64::consts::PI * (k % 3) as f64 / 3.0
}

/// A traced solution curve of Re G_k(-beta_k(t)) = 0 in the t plane.
#[derive(Clone, Debug)]
pub struct PhaseBoundary {
    pub branch_k: usize,
    pub polyline: Vec<Complex64>,
    pub closed: bool,
}

/// Phase label for a single t and contour pair.
#[derive(Clone, Debug)]
pub struct PhaseLabel {
    pub t: Complex64,
    pub contour_pair: (usize, usize),
    pub label: Label,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    OneCut(usize),
    TwoCut,
    Boundary,
}

/// What the classification pipeline actually solved.
#[derive(Clone, Debug)]
pub enum Evidence {
    None,
    OneCut { sol: OneCutSolution, short: StokesLine },
    TwoCut { sol: TwoCutSolution },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransitionKind {
    /// The double root meets the cut: one cut splits in two (or two merge).
    Split,
    Merge,
    /// A new endpoint pair appears (vanishes) away from the existing cuts.
    Birth,
    Death,
    /// One-cut branch relabeling across a boundary between one-cut regions.
    BranchChange,
}

#[derive(Clone, Debug)]
pub struct TransitionEvent {
    pub kind: TransitionKind,
    pub t_before: Complex64,
    pub t_after: Complex64,
    pub from: Label,
    pub to: Label,
}

/// Bisection along the ray t = u e^(i theta) for the critical value where
/// Re G_k(-beta_k) changes sign.
pub fn critical_t_on_ray(k: usize, theta: f64, bracket: (f64, f64)) -> Result<Complex64> {
    let dir = Complex64::from_polar(1.0, theta);
    let f = |u: f64| -> Result<f64> { Ok(g_cubic_at_minus_beta(u * dir, k)?.re) };
    let (mut lo, mut hi) = bracket;
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo * dir);
    }
    if fhi == 0.0 {
        return Ok(hi * dir);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while (hi - lo).abs() > TOL_CRITICAL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid * dir);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) * dir)
}

fn boundary_indicator(k: usize, t: Complex64) -> f64 {
    g_cubic_at_minus_beta(t, k).map(|g| g.re).unwrap_or(f64::NAN)
}

fn indicator_gradient(k: usize, t: Complex64) -> Complex64 {
    let h = 1e-6 * (1.0 + t.norm());
    let dx = (boundary_indicator(k, t + h) - boundary_indicator(k, t - h)) / (2.0 * h);
    let dy = (boundary_indicator(k, t + Complex64::new(0.0, h))
        - boundary_indicator(k, t - Complex64::new(0.0, h)))
        / (2.0 * h);
    Complex64::new(dx, dy)
}

/// Pseudo-arclength continuation of the implicit curve
/// Re G_k(-beta_k(t)) = 0, stopping at the dashed surface cuts
/// (|t| > 3*2^(-2/3), arg t in {0, +-2pi/3}), on closing a loop, or on
/// leaving |t| <= 4.
pub fn trace_boundary(k: usize, seed_t: Complex64) -> Result<PhaseBoundary> {
    let step = 0.02;
    let seed = newton_to_boundary(k, seed_t)?;
    // trace both directions and join
    let fwd = trace_direction(k, seed, step, 1.0)?;
    if fwd.closed {
        return Ok(fwd);
    }
    let bwd = trace_direction(k, seed, step, -1.0)?;
    let mut polyline: Vec<Complex64> = bwd.polyline.iter().rev().copied().collect();
    polyline.extend(fwd.polyline.iter().skip(1));
    Ok(PhaseBoundary { branch_k: k, polyline, closed: false })
}

fn newton_to_boundary(k: usize, mut t: Complex64) -> Result<Complex64> {
    for _ in 0..50 {
        let f = boundary_indicator(k, t);
        if !f.is_finite() {
            return Err(Error::ContinuationStalled { at: t, min_step: 0.0 });
        }
        if f.abs() < 1e-12 {
            return Ok(t);
        }
        let g = indicator_gradient(k, t);
        if g.norm() == 0.0 {
            return Err(Error::ContinuationStalled { at: t, min_step: 0.0 });
        }
        t -= f * g / g.norm_sqr();
    }
    if boundary_indicator(k, t).abs() < 1e-8 {
        Ok(t)
    } else {
        Err(Error::NoConvergence { iters: 50, residual: boundary_indicator(k, t).abs() })
    }
}

fn near_surface_cut(t: Complex64, margin: f64) -> bool {
    if t.norm() <= 3.0 * 2f64.powf(-2.0 / 3.0) {
        return false;
    }
    for cut in [0.0, 2.0 * std::f64::consts::PI / 3.0, -2.0 * std::f64::consts::PI / 3.0] {
        let d = t.norm() * (t.arg() - cut).sin().abs();
        if (t.arg() - cut).cos() > 0.0 && d < margin {
            return true;
        }
    }
    false
}

fn trace_direction(k: usize, seed: Complex64, step: f64, orientation: f64) -> Result<PhaseBoundary> {
    let mut polyline = vec![seed];
    let mut t = seed;
    let mut dir_prev: Option<Complex64> = None;
    for iter in 0..4000 {
        let grad = indicator_gradient(k, t);
        if grad.norm() == 0.0 {
            break;
        }
        let mut tangent = Complex64::new(0.0, 1.0) * grad / grad.norm();
        match dir_prev {
            None => tangent *= orientation,
            Some(d) => {
                if (tangent * d.conj()).re < 0.0 {
                    tangent = -tangent;
                }
            }
        }
        let mut t_next = t + step * tangent;
        t_next = newton_to_boundary(k, t_next)?;
        polyline.push(t_next);
        dir_prev = Some(tangent);
        if near_surface_cut(t_next, step) || t_next.norm() > 4.0 {
            return Ok(PhaseBoundary { branch_k: k, polyline, closed: false });
        }
        if iter > 10 && (t_next - seed).norm() < 0.75 * step {
            polyline.push(seed);
            return Ok(PhaseBoundary { branch_k: k, polyline, closed: true });
        }
        t = t_next;
    }
    Err(Error::ContinuationStalled { at: t, min_step: step })
}

/// Shared classification context: resolution settings plus a lazily grown
/// catalogue of two-cut anchor solutions used to seed Newton.
pub struct PhaseContext {
    pub embed_resolution: usize,
    pub tracer: TracerConfig,
    catalogue: Mutex<Vec<(Complex64, TwoCutSolution)>>,
}

impl Default for PhaseContext {
    fn default() -> Self {
        PhaseContext {
            embed_resolution: 64,
            tracer: TracerConfig::default(),
            catalogue: Mutex::new(Vec::new()),
        }
    }
}

impl PhaseContext {
    /// Seed the catalogue from the real-axis splitting and a few vertical
    /// continuations. Errors here are not fatal: classification falls back
    /// to fresh seeding.
    pub fn ensure_catalogue(&self) {
        {
            let cat = self.catalogue.lock().unwrap();
            if !cat.is_empty() {
                return;
            }
        }
        let mut anchors = Vec::new();
        let t0 = Complex64::new(-1.02, 0.0);
        if let Ok(onecut) = solve_cubic_branch(t0, 0) {
            if let Some(first) = split_seeds(&onecut, 1e-3)
                .iter()
                .find_map(|s| newton_solve(t0, s).ok())
            {
                anchors.push((t0, first));
                // walk outward along the negative real axis
                let mut current = first;
                let mut t_prev = t0;
                for t_re in [-1.1, -1.25, -1.4, -1.6, -1.85, -2.1, -2.4, -2.7, -2.95] {
                    let target = Complex64::new(t_re, 0.0);
                    let steps = ((target - t_prev).norm() / 0.05).ceil() as usize;
                    let path: Vec<Complex64> = (1..=steps)
                        .map(|j| t_prev + (target - t_prev) * j as f64 / steps as f64)
                        .collect();
                    match continue_in_t(&path, &current) {
                        Ok(sols) => {
                            current = *sols.last().unwrap();
                            anchors.push((target, current));
                            t_prev = target;
                        }
                        Err(_) => break,
                    }
                }
                // vertical branches off a few real anchors
                let vertical_offsets = [0.3, 0.6, 0.9];
                let bases: Vec<(Complex64, TwoCutSolution)> = anchors.clone();
                for (tb, sb) in bases {
                    for sign in [1.0, -1.0] {
                        let mut current = sb;
                        let mut t_prev = tb;
                        for &off in &vertical_offsets {
                            let target = tb + Complex64::new(0.0, sign * off);
                            let steps = ((target - t_prev).norm() / 0.05).ceil() as usize;
                            let path: Vec<Complex64> = (1..=steps)
                                .map(|j| t_prev + (target - t_prev) * j as f64 / steps as f64)
                                .collect();
                            match continue_in_t(&path, &current) {
                                Ok(sols) => {
                                    current = *sols.last().unwrap();
                                    anchors.push((target, current));
                                    t_prev = target;
                                }
                                Err(_) => break,
                            }
                        }
                    }
                }
            }
        }
        *self.catalogue.lock().unwrap() = anchors;
    }

    fn nearest_anchors(&self, t: Complex64, n: usize) -> Vec<(Complex64, TwoCutSolution)> {
        let cat = self.catalogue.lock().unwrap();
        let mut v: Vec<(Complex64, TwoCutSolution)> = cat.clone();
        v.sort_by(|x, y| (x.0 - t).norm().partial_cmp(&(y.0 - t).norm()).unwrap());
        v.truncate(n);
        v
    }

    pub fn register_anchor(&self, t: Complex64, sol: TwoCutSolution) {
        self.catalogue.lock().unwrap().push((t, sol));
    }
}

fn embed_bbox(scale: f64) -> Rect {
    Rect::centered((3.5f64).max(1.8 * scale))
}

/// Try the one-cut pipeline on branch k: solve, find a short line joining
/// the endpoints, require positive density and S-curve embeddability.
pub fn try_one_cut(
    t: Complex64,
    k: usize,
    pair: (usize, usize),
    ctx: &PhaseContext,
) -> Result<Option<(OneCutSolution, StokesLine)>> {
    let sol = match solve_cubic_branch(t, k) {
        Ok(s) => s,
        Err(Error::BranchCollision { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let w = cubic_potential(t);
    let curve = sol.curve(&w)?;
    let line = match short_between(&curve, sol.a, sol.b, &ctx.tracer)? {
        Some(l) => l,
        None => return Ok(None),
    };
    if validate_cuts(&curve, std::slice::from_ref(&line)).is_none() {
        return Ok(None);
    }
    let re_g = ReG::OneCut { potential: w, sol };
    let report = match embed_s_curve(
        &|z| re_g.eval(z),
        embed_bbox(curve.scale()),
        ctx.embed_resolution,
        &[(sol.a, sol.b)],
        (sector_angle(pair.0), sector_angle(pair.1)),
        SECTOR_HALF_OPENING,
        1e-9,
    ) {
        Ok(r) => r,
        Err(Error::InconclusiveResolution) => return Ok(None),
        Err(e) => return Err(e),
    };
    if report.embeddable {
        Ok(Some((sol, line)))
    } else {
        Ok(None)
    }
}

/// Try the two-cut pipeline: continuation from the nearest catalogued
/// anchors, then density positivity and embedding of both cuts.
pub fn try_two_cut(
    t: Complex64,
    pair: (usize, usize),
    ctx: &PhaseContext,
) -> Result<Option<TwoCutSolution>> {
    ctx.ensure_catalogue();
    let mut solution = None;
    for (ta, anchor) in ctx.nearest_anchors(t, 3) {
        let dist = (t - ta).norm();
        if dist > 2.5 {
            continue;
        }
        let steps = (dist / 0.08).ceil().max(1.0) as usize;
        let path: Vec<Complex64> = (1..=steps)
            .map(|j| ta + (t - ta) * j as f64 / steps as f64)
            .collect();
        if let Ok(sols) = continue_in_t(&path, &anchor) {
            solution = Some(*sols.last().unwrap());
            break;
        }
    }
    let sol = match solution {
        Some(s) => s,
        None => return Ok(None),
    };
    let w = cubic_potential(t);
    let rad = sol.radical()?;
    let curve = crate::algebra::SpectralCurve::from_potential(&w, rad);
    let mut lines = Vec::new();
    for &(p, q) in curve.radical().pairs() {
        let line = match short_between(&curve, p, q, &ctx.tracer)? {
            Some(l) => l,
            None => return Ok(None),
        };
        lines.push(line);
    }
    if validate_cuts(&curve, &lines).is_none() {
        return Ok(None);
    }
    let re_g = ReG::Path { curve };
    let endpoints = [(sol.a, sol.b), (sol.c, sol.d)];
    let report = match embed_s_curve(
        &|z| re_g.eval(z),
        embed_bbox(1.0 + sol.endpoints().iter().map(|e| e.norm()).fold(0.0, f64::max)),
        ctx.embed_resolution,
        &endpoints,
        (sector_angle(pair.0), sector_angle(pair.1)),
        SECTOR_HALF_OPENING,
        1e-9,
    ) {
        Ok(r) => r,
        Err(Error::InconclusiveResolution) => return Ok(None),
        Err(e) => return Err(e),
    };
    if report.embeddable {
        Ok(Some(sol))
    } else {
        Ok(None)
    }
}

/// Classify a point of the t plane for the given contour pair: one-cut
/// branches first (0, 1, 2), then the two-cut pipeline.
///
/// Pairs other than (1, 2) reduce to it by the exact covariance of the
/// model: substituting z -> w^-1 z with w = e^(2 pi i/3) maps the problem
/// at (t, (i, j)) onto (w^-1 t, (i+1, j+1)); contour orientation is
/// immaterial, so (j, i) classifies like (i, j). Evidence is rotated back
/// to the requested frame.
pub fn classify_t(t: Complex64, pair: (usize, usize), ctx: &PhaseContext) -> Result<PhaseLabel> {
    if pair.0 > 2 || pair.1 > 2 || pair.0 == pair.1 {
        return Err(Error::InvalidInput(format!("invalid contour pair {pair:?}")));
    }
    // normalize orientation to j - i = 1 (mod 3), then rotate onto (1, 2)
    let (i, _j) = if (pair.1 + 3 - pair.0) % 3 == 1 { pair } else { (pair.1, pair.0) };
    let m = (i + 3 - 1) % 3; // (i, j) = (1 + m, 2 + m) mod 3
    // substituting z = w^m u maps (t, (1+m, 2+m)) onto (t w^m, (1, 2))
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let rot = omega.powi(m as i32);
    let back = rot; // z-frame evidence = w^m * u-frame evidence
    let t_std = t * rot;

    let mut label = None;
    for k in 0..3 {
        if let Some((sol, short)) = try_one_cut(t_std, k, (1, 2), ctx)? {
            label = Some(PhaseLabel {
                t,
                contour_pair: pair,
                label: Label::OneCut(k),
                evidence: Evidence::OneCut {
                    sol: rotate_one_cut(&sol, back),
                    short: rotate_line(&short, back),
                },
            });
            break;
        }
    }
    if label.is_none() {
        if let Some(sol) = try_two_cut(t_std, (1, 2), ctx)? {
            ctx.register_anchor(t_std, sol);
            label = Some(PhaseLabel {
                t,
                contour_pair: pair,
                label: Label::TwoCut,
                evidence: Evidence::TwoCut { sol: rotate_two_cut(&sol, back) },
            });
        }
    }
    label.ok_or(Error::Unclassified { t, i: pair.0, j: pair.1 })
}

fn rotate_one_cut(sol: &OneCutSolution, w: Complex64) -> OneCutSolution {
    let mut out = *sol;
    out.beta *= w;
    out.delta2 *= w * w;
    out.a *= w;
    out.b *= w;
    out
}

fn rotate_two_cut(sol: &TwoCutSolution, w: Complex64) -> TwoCutSolution {
    let mut out = TwoCutSolution::new(sol.a * w, sol.b * w, sol.c * w, sol.d * w).canonicalize();
    out.r = sol.r;
    out.residual_norm = sol.residual_norm;
    out
}

fn rotate_line(line: &StokesLine, w: Complex64) -> StokesLine {
    let mut out = line.clone();
    out.origin *= w;
    for z in out.samples.iter_mut() {
        *z *= w;
    }
    out
}

/// Distance from a point to a polyline.
fn dist_to_polyline(p: Complex64, poly: &[Complex64]) -> f64 {
    poly.windows(2)
        .map(|w| {
            let ab = w[1] - w[0];
            let denom = ab.norm_sqr();
            let s = if denom == 0.0 {
                0.0
            } else {
                (((p - w[0]) * ab.conj()).re / denom).clamp(0.0, 1.0)
            };
            (p - (w[0] + s * ab)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Classify the points of a path and name every label change. Brackets are
/// refined by bisection to `refine_tol` in |t| before the kinematic test.
pub fn transition_report(
    path: &[Complex64],
    pair: (usize, usize),
    refine_tol: f64,
    ctx: &PhaseContext,
) -> Result<Vec<TransitionEvent>> {
    let mut labels: Vec<PhaseLabel> = Vec::with_capacity(path.len());
    for &t in path {
        labels.push(classify_t(t, pair, ctx)?);
    }
    let mut events = Vec::new();
    for w in 0..labels.len() - 1 {
        if labels[w].label == labels[w + 1].label {
            continue;
        }
        // bisect the bracket; an unclassifiable midpoint IS the boundary
        let mut lo = labels[w].clone();
        let mut hi = labels[w + 1].clone();
        while (hi.t - lo.t).norm() > refine_tol {
            let mid_t = 0.5 * (lo.t + hi.t);
            match classify_t(mid_t, pair, ctx) {
                Ok(mid) if mid.label == lo.label => lo = mid,
                Ok(mid) => hi = mid,
                Err(Error::Unclassified { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        events.push(name_transition(&lo, &hi));
    }
    Ok(events)
}

fn name_transition(lo: &PhaseLabel, hi: &PhaseLabel) -> TransitionEvent {
    let kind = match (&lo.label, &hi.label, &lo.evidence, &hi.evidence) {
        (Label::OneCut(_), Label::TwoCut, Evidence::OneCut { sol, short }, _) => {
            one_to_two_kind(sol, short)
        }
        (Label::TwoCut, Label::OneCut(_), _, Evidence::OneCut { sol, short }) => {
            match one_to_two_kind(sol, short) {
                TransitionKind::Split => TransitionKind::Merge,
                TransitionKind::Birth => TransitionKind::Death,
                k => k,
            }
        }
        (Label::OneCut(_), Label::OneCut(_), _, _) => TransitionKind::BranchChange,
        _ => TransitionKind::BranchChange,
    };
    // name by crossing direction: entering the two-cut region splits or
    // births a cut; leaving it merges or kills one
    let kind = match (&lo.label, kind) {
        (Label::OneCut(_), TransitionKind::Merge) => TransitionKind::Split,
        (Label::OneCut(_), TransitionKind::Death) => TransitionKind::Birth,
        (Label::TwoCut, TransitionKind::Split) => TransitionKind::Merge,
        (Label::TwoCut, TransitionKind::Birth) => TransitionKind::Death,
        (_, k) => k,
    };
    TransitionEvent {
        kind,
        t_before: lo.t,
        t_after: hi.t,
        from: lo.label,
        to: hi.label,
    }
}

/// Kinematics at a one-cut/two-cut boundary: if the double root alpha =
/// -beta sits on the traced cut it is a splitting; if it sits away from the
/// cut a new pair is being born at a distance.
fn one_to_two_kind(sol: &OneCutSolution, short: &StokesLine) -> TransitionKind {
    let alpha = -sol.beta;
    let scale = 1.0 + sol.a.norm().max(sol.b.norm()).max(alpha.norm());
    let d = dist_to_polyline(alpha, &short.samples);
    if d < 0.05 * scale {
        TransitionKind::Split
    } else {
        TransitionKind::Birth
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point_on_negative_real_axis() {
        let tc = critical_t_on_ray(0, std::f64::consts::PI, (0.9, 1.1)).unwrap();
        assert!((tc.re + 1.00054).abs() < 5e-4, "t_c = {tc}");
        assert!(tc.im.abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let err = critical_t_on_ray(0, std::f64::consts::PI, (0.1, 0.5));
        assert!(matches!(err, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn rotated_ray_critical_modulus_matches() {
        // the boundary family is covariant under t -> e^(2 pi i/3) t with
        // branch relabeling, and conjugation-symmetric for branch 0;
        // the theta = pi/3 ray therefore carries a critical point at the
        // same modulus as theta = pi for one of the branches
        let t_pi = critical_t_on_ray(0, std::f64::consts::PI, (0.9, 1.1)).unwrap();
        let target = t_pi.norm();
        let found = (0..3).find_map(|k| {
            critical_t_on_ray(k, std::f64::consts::PI / 3.0, (0.9, 1.1))
                .ok()
                .map(|t| (k, t.norm()))
        });
        let (k, modulus) = found.expect("no branch has a critical point on theta = pi/3");
        assert!(
            (modulus - target).abs() < 1e-6,
            "critical modulus mismatch: branch {k} gives {modulus} vs {target}"
        );
    }

    #[test]
    fn boundary_trace_through_tc() {
        let tc = critical_t_on_ray(0, std::f64::consts::PI, (0.9, 1.1)).unwrap();
        let boundary = trace_boundary(0, tc).unwrap();
        assert!(boundary.polyline.len() > 20);
        for v in &boundary.polyline {
            let f = boundary_indicator(0, *v);
            assert!(f.abs() < 1e-8, "vertex {v} off the boundary: {f}");
            // conjugation equivariance: the mirrored vertex is on the curve
            let fc = boundary_indicator(0, v.conj());
            assert!(fc.abs() < 1e-8, "conjugate of {v} off the boundary: {fc}");
        }
    }

    #[test]
    fn rotation_maps_boundaries_onto_each_other() {
        let tc = critical_t_on_ray(0, std::f64::consts::PI, (0.9, 1.1)).unwrap();
        let boundary = trace_boundary(0, tc).unwrap();
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let stride = (boundary.polyline.len() / 20).max(1);
        for v in boundary.polyline.iter().step_by(stride) {
            let rotated = omega * v;
            let ok = (0..3).any(|k| boundary_indicator(k, rotated).abs() < 1e-6);
            assert!(ok, "rotated vertex {rotated} not on any branch boundary");
        }
    }
}
