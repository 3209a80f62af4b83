use num_complex::Complex64;

use super::{StokesLine, Terminal};
use crate::algebra::SpectralCurve;
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_segment_singular};

/// Tuning of the level-set tracer. Lengths are relative to the curve scale
/// (1 + max |root|).
#[derive(Clone, Copy, Debug)]
pub struct TracerConfig {
    pub ds_min_rel: f64,
    pub ds_max_rel: f64,
    /// Root-arrival radius (relative).
    pub eps_hit_rel: f64,
    /// Escape radius factor: a line is a leg once |z| > r_inf_factor * scale.
    pub r_inf_factor: f64,
    pub max_steps: usize,
}

impl Default for TracerConfig {
    fn default() -> Self {
        TracerConfig {
            ds_min_rel: 1e-5,
            ds_max_rel: 0.05,
            eps_hit_rel: 1e-4,
            r_inf_factor: 8.0,
            max_steps: 40_000,
        }
    }
}

impl TracerConfig {
    pub fn eps_hit(&self, curve: &SpectralCurve) -> f64 {
        self.eps_hit_rel * curve.scale()
    }

    pub fn r_inf(&self, curve: &SpectralCurve) -> f64 {
        self.r_inf_factor * curve.scale()
    }
}

/// Predictor-corrector tracing of the level set Re int_origin^z y dz' = 0
/// leaving a simple root along the given initial direction.
///
/// The tangent is i conj(y)/|y| with the sign carried along the line; one
/// Newton correction per step pulls the point back onto the level set of the
/// accumulated G.
pub fn trace_line(
    curve: &SpectralCurve,
    origin: Complex64,
    direction: f64,
    cfg: &TracerConfig,
) -> Result<StokesLine> {
    let scale = curve.scale();
    let eps_hit = cfg.eps_hit(curve);
    let r_inf = cfg.r_inf(curve);
    let ds_min = cfg.ds_min_rel * scale;
    let ds_max = cfg.ds_max_rel * scale;

    let roots = curve.roots_with_multiplicity();
    let e_dir = Complex64::from_polar(1.0, direction);

    // first hop off the singular origin, G by endpoint-regularized quadrature
    let hop = (10.0 * eps_hit).min(0.5 * ds_max);
    let z1 = origin + hop * e_dir;
    let mut g = integrate_segment_singular(
        &|z| curve.y_unchecked(z),
        origin,
        z1,
        true,
        false,
        1e-12,
    )?;
    let mut z = z1;
    let mut tau_prev = e_dir;
    let mut samples = vec![origin, z];
    let mut g_samples = vec![Complex64::default(), g];
    let mut ds = (4.0 * hop).min(ds_max);

    let rule = gauss_legendre(6);

    for _ in 0..cfg.max_steps {
        // termination checks
        for &(root, mult) in &roots {
            if (root - origin).norm() < eps_hit && samples.len() < 8 {
                continue; // still leaving the origin
            }
            if (z - root).norm() < eps_hit {
                samples.push(root);
                g_samples.push(g);
                let terminal = if mult == 1 {
                    if (root - origin).norm() < eps_hit {
                        return Err(Error::StepCollapse { at: z, min_ds: ds_min });
                    }
                    Terminal::Short { root }
                } else {
                    Terminal::Critical { zero: root }
                };
                return Ok(StokesLine { origin, direction_index: 0, samples, g_samples, terminal });
            }
        }
        if z.norm() > r_inf {
            return Ok(StokesLine {
                origin,
                direction_index: 0,
                samples,
                g_samples,
                terminal: Terminal::Leg { angle: z.arg() },
            });
        }

        // adaptive step: cap the chord sagitta (~ |y'/y| ds^2/8) so the
        // stored polyline stays within ~1e-5 of the arc, and do not
        // overshoot the nearest root
        let logd = curve.log_derivative(z).norm();
        let sagitta_cap = (5e-5 * scale / logd.max(1e-12)).sqrt();
        let mut step = sagitta_cap.clamp(ds_min, ds_max).min(ds);
        let nearest = roots
            .iter()
            .map(|(r, _)| (z - r).norm())
            .fold(f64::INFINITY, f64::min);
        step = step.min((0.5 * nearest).max(0.5 * eps_hit));

        let y0 = curve.y_unchecked(z);
        if y0.norm() == 0.0 {
            return Err(Error::StepCollapse { at: z, min_ds: ds_min });
        }
        let mut tau0 = Complex64::new(0.0, 1.0) * y0.conj() / y0.norm();
        if (tau0 * tau_prev.conj()).re < 0.0 {
            tau0 = -tau0;
        }

        // midpoint predictor
        let zm = z + 0.5 * step * tau0;
        let ym = curve.y_unchecked(zm);
        if ym.norm() == 0.0 {
            ds = step * 0.5;
            if ds < ds_min {
                return Err(Error::StepCollapse { at: z, min_ds: ds_min });
            }
            continue;
        }
        let mut tau_m = Complex64::new(0.0, 1.0) * ym.conj() / ym.norm();
        if (tau_m * tau0.conj()).re < 0.0 {
            tau_m = -tau_m;
        }
        let z_pred = z + step * tau_m;

        // G increment by 6-point Gauss-Legendre along the chord, with the
        // tangent-consistent branch of y
        let mut dg = Complex64::default();
        let seg = z_pred - z;
        for &(x, wgt) in rule.iter() {
            let zq = z + 0.5 * (x + 1.0) * seg;
            let mut yq = curve.y_unchecked(zq);
            // keep y on the branch moving with the line
            if (yq * ym.conj()).re < 0.0 && (yq * y0.conj()).re < 0.0 {
                yq = -yq;
            }
            dg += wgt * yq;
        }
        dg *= 0.5 * seg;
        let mut g_new = g + dg;
        let mut z_new = z_pred;

        // Newton correction back to Re G = 0, trapezoid update of G
        for _ in 0..3 {
            let yc = curve.y_unchecked(z_new);
            if yc.norm() == 0.0 {
                break;
            }
            let corr = -g_new.re * yc.conj() / yc.norm_sqr();
            if corr.norm() > 0.5 * step {
                break;
            }
            let z_next = z_new + corr;
            let mut y_next = curve.y_unchecked(z_next);
            if (y_next * yc.conj()).re < 0.0 {
                y_next = -y_next;
            }
            g_new += 0.5 * (yc + y_next) * corr;
            z_new = z_next;
            if g_new.re.abs() < 1e-13 * (1.0 + g_new.norm()) {
                break;
            }
        }

        // reject wild steps
        if (z_new - z).norm() > 2.0 * step {
            ds = step * 0.5;
            if ds < ds_min {
                return Err(Error::StepCollapse { at: z, min_ds: ds_min });
            }
            continue;
        }

        tau_prev = tau_m;
        z = z_new;
        g = g_new;
        samples.push(z);
        g_samples.push(g);
        ds = (step * 1.5).min(ds_max);
    }
    Err(Error::StepCollapse { at: z, min_ds: ds_min })
}
