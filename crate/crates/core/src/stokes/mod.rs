//! Stokes lines of the quadratic differential y^2 (dz)^2: level-set tracing,
//! short/leg classification, density positivity along cut candidates, sign
//! maps of Re G, and S-curve embeddability between convergence sectors.

mod map;
mod tracer;

pub use map::{embed_s_curve, sign_map, EmbeddingReport, ReG, Rect, SignMap};
pub use tracer::{trace_line, TracerConfig};

use num_complex::Complex64;

use crate::abelian::cut_integral_times_w;
use crate::algebra::SpectralCurve;
use crate::error::Result;
use crate::quad::TOL_QUAD;

/// How a traced Stokes line terminates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Terminal {
    /// Ends at another simple root of y^2 (a short line).
    Short { root: Complex64 },
    /// Runs to infinity with the given asymptotic angle.
    Leg { angle: f64 },
    /// Runs into a zero of y that is not a cut endpoint (critical
    /// configuration, e.g. at a phase transition).
    Critical { zero: Complex64 },
}

/// A traced level-set arc of Re int y dz emanating from a root.
#[derive(Clone, Debug)]
pub struct StokesLine {
    pub origin: Complex64,
    pub direction_index: usize,
    pub samples: Vec<Complex64>,
    /// Accumulated G = int_origin^z y dz' at each sample.
    pub g_samples: Vec<Complex64>,
    pub terminal: Terminal,
}

impl StokesLine {
    pub fn is_short(&self) -> bool {
        matches!(self.terminal, Terminal::Short { .. })
    }

    pub fn endpoint(&self) -> Option<Complex64> {
        match self.terminal {
            Terminal::Short { root } => Some(root),
            _ => None,
        }
    }

    pub fn arc_length(&self) -> f64 {
        self.samples.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// A short line together with the density it would carry as a cut.
#[derive(Clone, Debug)]
pub struct CutCandidate {
    pub line: StokesLine,
    /// (sample point, density value) along the line, orientation fixed so
    /// the density is nonnegative where the candidate is valid.
    pub density_samples: Vec<(Complex64, f64)>,
    pub positive: bool,
    /// Total charge on the candidate.
    pub charge: f64,
}

/// The m+2 outgoing Stokes directions at a root of y^2 of multiplicity m:
/// equally spaced, rotated so Re int y dz vanishes to leading order.
pub fn initial_directions(curve: &SpectralCurve, root: Complex64, multiplicity: usize) -> Vec<f64> {
    let m = multiplicity;
    // leading coefficient of y^2 ~ q (z - root)^m
    let mut p = curve.y_squared();
    for _ in 0..m {
        p = p.derivative();
    }
    let mut fact = 1.0;
    for j in 2..=m {
        fact *= j as f64;
    }
    let q = p.eval(root) / fact;
    let psi = 0.5 * q.arg();
    let denom = (m + 2) as f64;
    (0..m + 2)
        .map(|j| {
            let phi = (std::f64::consts::PI * (1.0 + 2.0 * j as f64) - 2.0 * psi) / denom;
            normalize_angle(phi)
        })
        .collect()
}

fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

/// Trace all Stokes lines from every simple root (the set X_0).
pub fn trace_from_simple_roots(curve: &SpectralCurve, cfg: &TracerConfig) -> Result<Vec<StokesLine>> {
    let mut out = Vec::new();
    for e in curve.radical().endpoints() {
        for (idx, phi) in initial_directions(curve, e, 1).into_iter().enumerate() {
            let mut line = trace_line(curve, e, phi, cfg)?;
            line.direction_index = idx;
            out.push(line);
        }
    }
    Ok(out)
}

/// Find a short line joining the two given roots, if any direction from
/// `from` produces one.
pub fn short_between(
    curve: &SpectralCurve,
    from: Complex64,
    to: Complex64,
    cfg: &TracerConfig,
) -> Result<Option<StokesLine>> {
    let eps = cfg.eps_hit(curve);
    for (idx, phi) in initial_directions(curve, from, 1).into_iter().enumerate() {
        let mut line = trace_line(curve, from, phi, cfg)?;
        line.direction_index = idx;
        if let Terminal::Short { root } = line.terminal {
            if (root - to).norm() < 2.0 * eps {
                return Ok(Some(line));
            }
        }
    }
    Ok(None)
}

/// Density rho |dz| = y(z_+) dz/(2 pi i) sampled along a short line in the
/// canonical chord orientation (a -> b of the matching endpoint pair; the
/// traced direction if the line joins roots of different pairs).
///
/// No per-cut sign fixing happens here: the inherited orientation couples
/// the cuts globally. Use [`validate_cuts`] to decide positivity of a full
/// configuration.
pub fn density_on_line(curve: &SpectralCurve, line: &StokesLine) -> CutCandidate {
    assert!(line.is_short(), "density is defined on short lines only");
    let n = line.samples.len();
    // orientation: follow the chord order of the matching pair if any
    let flip = matching_pair(curve, line)
        .map(|(_, reversed)| reversed)
        .unwrap_or(false);
    let mut density_samples: Vec<(Complex64, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let z = line.samples[k];
        let tangent = if k == 0 {
            line.samples[1] - line.samples[0]
        } else if k == n - 1 {
            line.samples[n - 1] - line.samples[n - 2]
        } else {
            line.samples[k + 1] - line.samples[k - 1]
        };
        let t_unit = tangent / tangent.norm();
        let y = curve.y_unchecked(z);
        // y tau is purely imaginary on the level line; rho = y tau/(2 pi i)
        let mut rho = (y * t_unit / Complex64::new(0.0, 2.0 * std::f64::consts::PI)).re;
        if flip {
            rho = -rho;
        }
        density_samples.push((z, rho));
    }
    // signed trapezoid along the polyline
    let mut trap = 0.0;
    for k in 1..n {
        let ds = (line.samples[k] - line.samples[k - 1]).norm();
        trap += 0.5 * (density_samples[k].1 + density_samples[k - 1].1) * ds;
    }
    // The chord-branch evaluation of y sees the second sheet between the
    // chord and the arc, which can flip the sampled sign wholesale; the
    // exact chord integral is deformation-invariant and fixes it.
    let charge = match charge_of_line(curve, line) {
        Ok(q) => {
            if q * trap < 0.0 {
                for s in density_samples.iter_mut() {
                    s.1 = -s.1;
                }
            }
            q
        }
        Err(_) => trap,
    };
    let positive = density_samples
        .iter()
        .skip(1)
        .take(n.saturating_sub(2))
        .all(|(_, r)| *r > 0.0);
    CutCandidate { line: line.clone(), density_samples, positive, charge }
}

/// Matching endpoint pair index for a short line and whether the line runs
/// against the stored pair order.
fn matching_pair(curve: &SpectralCurve, line: &StokesLine) -> Option<(usize, bool)> {
    let rad = curve.radical();
    let target = line.endpoint()?;
    let eps = 1e-5 * (1.0 + rad.scale());
    for (m, &(a, b)) in rad.pairs().iter().enumerate() {
        if (line.origin - a).norm() < eps && (target - b).norm() < eps {
            return Some((m, false));
        }
        if (line.origin - b).norm() < eps && (target - a).norm() < eps {
            return Some((m, true));
        }
    }
    None
}

/// Signed charge of the cut joining the line's two roots in the canonical
/// chord orientation, by the exact boundary integral over the chord (path
/// independence within the homology class).
fn charge_of_line(curve: &SpectralCurve, line: &StokesLine) -> Result<f64> {
    let rad = curve.radical();
    let (m, _) = matching_pair(curve, line).ok_or_else(|| {
        crate::error::Error::InvalidInput("line does not join an endpoint pair".into())
    })?;
    let h = curve.h().clone();
    let val = cut_integral_times_w(rad, m, &|z| h.eval(z), TOL_QUAD)?;
    Ok((val / Complex64::new(0.0, 2.0 * std::f64::consts::PI)).re)
}

/// Decide whether a set of short lines carries a valid equilibrium density:
/// the charges (in a single global orientation) must sum to +1 and each cut
/// must be positive throughout. Returns the candidates in the global
/// orientation, or None if no orientation works.
pub fn validate_cuts(curve: &SpectralCurve, lines: &[StokesLine]) -> Option<Vec<CutCandidate>> {
    let mut cands: Vec<CutCandidate> =
        lines.iter().map(|l| density_on_line(curve, l)).collect();
    let total: f64 = cands.iter().map(|c| c.charge).sum();
    let sigma = if (total - 1.0).abs() < 1e-4 {
        1.0
    } else if (total + 1.0).abs() < 1e-4 {
        -1.0
    } else {
        return None; // charges do not sum to a unit measure
    };
    if sigma < 0.0 {
        for c in cands.iter_mut() {
            c.charge = -c.charge;
            for s in c.density_samples.iter_mut() {
                s.1 = -s.1;
            }
            let n = c.density_samples.len();
            c.positive = c
                .density_samples
                .iter()
                .skip(1)
                .take(n.saturating_sub(2))
                .all(|(_, r)| *r > 0.0);
        }
    }
    if cands.iter().all(|c| c.positive && c.charge > 0.0) {
        Some(cands)
    } else {
        None
    }
}

/// Density on the chord of pair m at parameter x in (-1, 1):
/// rho = y(z_+) (dz/|dz|) / (2 pi i).
pub fn chord_density(curve: &SpectralCurve, m: usize, x: f64) -> f64 {
    let delta = curve.radical().delta(m);
    let unit = delta / delta.norm();
    (curve.y_plus(m, x) * unit / Complex64::new(0.0, 2.0 * std::f64::consts::PI)).re
}
