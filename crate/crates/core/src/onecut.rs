//! One-cut endpoint equations: closed forms for the cubic model, a Newton
//! solver for general potentials, and the explicit one-cut G-function.

use num_complex::Complex64;

use crate::algebra::{oplus_part, BranchedRadical, Polynomial, SpectralCurve};
use crate::error::{Error, Result};

pub const TOL_ONECUT: f64 = 1e-10;
const MAX_ITER: usize = 50;

/// A solved one-cut configuration. The endpoints are `a = beta - delta`,
/// `b = beta + delta` where `delta` is the canonical square root of `delta2`
/// (Im delta >= 0; for real delta2 >= 0, Re delta >= 0). Every exported
/// quantity is invariant under delta -> -delta with a and b swapped.
#[derive(Clone, Copy, Debug)]
pub struct OneCutSolution {
    pub beta: Complex64,
    pub delta2: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub branch_k: Option<u8>,
    pub residual: f64,
}

impl OneCutSolution {
    fn from_beta_delta2(beta: Complex64, delta2: Complex64, branch_k: Option<u8>, residual: f64) -> Self {
        let delta = canonical_delta(delta2);
        OneCutSolution { beta, delta2, a: beta - delta, b: beta + delta, branch_k, residual }
    }

    pub fn radical(&self) -> Result<BranchedRadical> {
        BranchedRadical::one_cut(self.a, self.b)
    }

    pub fn curve(&self, potential: &Polynomial) -> Result<SpectralCurve> {
        Ok(SpectralCurve::from_potential(potential, self.radical()?))
    }
}

/// Square root with Im >= 0 (and Re >= 0 on the nonnegative real axis).
pub fn canonical_delta(delta2: Complex64) -> Complex64 {
    let d = delta2.sqrt();
    if d.im > 0.0 || (d.im == 0.0 && d.re >= 0.0) {
        d
    } else {
        -d
    }
}

/// The cubic potential W(z) = z^3/3 - t z.
pub fn cubic_potential(t: Complex64) -> Polynomial {
    Polynomial::from_coeffs(vec![
        Complex64::default(),
        -t,
        Complex64::default(),
        Complex64::new(1.0 / 3.0, 0.0),
    ])
}

/// The three finite branch points t^(k) = 3 * 2^(-2/3) e^(2 pi i k/3) of the
/// beta(t) surface.
pub fn cubic_branch_points() -> [Complex64; 3] {
    let r = 3.0 * 2f64.powf(-2.0 / 3.0);
    [0, 1, 2].map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
}

/// Nudge t off the dashed cuts of the beta(t) surface
/// (|t| > 3 * 2^(-2/3), arg t in {0, +-2pi/3}), approaching from below in
/// arg t as the branch assignment convention.
fn nudge_off_surface_cuts(t: Complex64) -> Complex64 {
    let r = t.norm();
    if r <= 3.0 * 2f64.powf(-2.0 / 3.0) {
        return t;
    }
    let arg = t.arg();
    for cut in [0.0, 2.0 * std::f64::consts::PI / 3.0, -2.0 * std::f64::consts::PI / 3.0] {
        if (arg - cut).abs() < 1e-13 {
            return t * Complex64::from_polar(1.0, -1e-14);
        }
    }
    t
}

/// The three branches beta_k(t) of beta^3 - t beta + 1 = 0, by the principal
/// cube and square roots.
pub fn beta_branches(t: Complex64) -> [Complex64; 3] {
    let t = nudge_off_surface_cuts(t);
    let t3 = t / 3.0;
    let disc = (Complex64::new(0.25, 0.0) - t3 * t3 * t3).sqrt();
    let base = (Complex64::new(0.5, 0.0) + disc).cbrt();
    [0, 1, 2].map(|k| {
        let delta_k = base * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
        -t / (3.0 * delta_k) - delta_k
    })
}

/// Closed-form one-cut solution for the cubic model on branch k.
pub fn solve_cubic_branch(t: Complex64, k: usize) -> Result<OneCutSolution> {
    assert!(k < 3, "branch index must be 0, 1 or 2");
    let betas = beta_branches(t);
    for j in 0..3 {
        if j != k && (betas[j] - betas[k]).norm() < 1e-10 {
            return Err(Error::BranchCollision { t });
        }
    }
    let beta = betas[k];
    let delta2 = 2.0 / beta;
    let residual = (beta * beta * beta - t * beta + 1.0).norm();
    Ok(OneCutSolution::from_beta_delta2(beta, delta2, Some(k as u8), residual))
}

/// Residual of the one-cut endpoint equations for a general potential:
/// the z^0 coefficient of (y - W') and the z^-1 coefficient shifted by +2,
/// where y = (W'/w)_+ w.
fn onecut_residual(potential: &Polynomial, beta: Complex64, delta2: Complex64) -> Result<(Complex64, Complex64)> {
    let delta = canonical_delta(delta2);
    let rad = BranchedRadical::one_cut(beta - delta, beta + delta)?;
    let wp = potential.derivative();
    let ratio = crate::algebra::laurent_at_infinity(&wp, &rad, wp.degree().unwrap_or(0) + 3);
    let w_series = rad.series(-3);
    // y = (ratio)_+ * w ; subtract W'
    let h = ratio.oplus();
    let y_series = crate::algebra::LaurentSeries::from_polynomial(&h, -4).mul(&w_series);
    let w_poly_series = crate::algebra::LaurentSeries::from_polynomial(&wp, -2);
    let diff = y_series.sub(&w_poly_series);
    Ok((diff.coeff(0), diff.coeff(-1) + 2.0))
}

/// Newton solution of the one-cut equations in the unknowns (beta, delta^2).
pub fn solve_onecut_general(potential: &Polynomial, initial: &OneCutSolution) -> Result<OneCutSolution> {
    let deg = potential.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::InvalidInput("potential degree must be >= 2".into()));
    }
    let mut beta = initial.beta;
    let mut delta2 = initial.delta2;
    for iter in 0..MAX_ITER {
        let (r0, r1) = onecut_residual(potential, beta, delta2)?;
        let residual = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
        if residual < TOL_ONECUT {
            return Ok(OneCutSolution::from_beta_delta2(beta, delta2, initial.branch_k, residual));
        }
        let hb = 1e-7 * (1.0 + beta.norm());
        let hd = 1e-7 * (1.0 + delta2.norm());
        let (r0_bp, r1_bp) = onecut_residual(potential, beta + hb, delta2)?;
        let (r0_bm, r1_bm) = onecut_residual(potential, beta - hb, delta2)?;
        let (r0_dp, r1_dp) = onecut_residual(potential, beta, delta2 + hd)?;
        let (r0_dm, r1_dm) = onecut_residual(potential, beta, delta2 - hd)?;
        // complex 2x2 Jacobian (the residuals are holomorphic in beta, delta2)
        let j00 = (r0_bp - r0_bm) / (2.0 * hb);
        let j01 = (r0_dp - r0_dm) / (2.0 * hd);
        let j10 = (r1_bp - r1_bm) / (2.0 * hb);
        let j11 = (r1_dp - r1_dm) / (2.0 * hd);
        let det = j00 * j11 - j01 * j10;
        if det.norm() < 1e-18 {
            return Err(Error::SingularJacobian);
        }
        let db = (r0 * j11 - r1 * j01) / det;
        let dd = (j00 * r1 - j10 * r0) / det;
        // damped update
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let nb = beta - lambda * db;
            let nd = delta2 - lambda * dd;
            if let Ok((n0, n1)) = onecut_residual(potential, nb, nd) {
                let nres = (n0.norm_sqr() + n1.norm_sqr()).sqrt();
                if nres < residual || nres < TOL_ONECUT {
                    beta = nb;
                    delta2 = nd;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iters: iter + 1, residual });
        }
    }
    let (r0, r1) = onecut_residual(potential, beta, delta2)?;
    let res = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
    if res < TOL_ONECUT {
        Ok(OneCutSolution::from_beta_delta2(beta, delta2, initial.branch_k, res))
    } else {
        Err(Error::NoConvergence { iters: MAX_ITER, residual: res })
    }
}

/// The one-cut G-function
/// `G(z) = (W/w)_+ w(z) - log(((z - beta + w)/(a - b))^2) - log 4`.
///
/// The logarithm is taken on the principal branch: Re G is single-valued,
/// Im G may differ from a continued value by multiples of 2 pi.
pub fn g_onecut(z: Complex64, potential: &Polynomial, sol: &OneCutSolution) -> Result<Complex64> {
    let rad = sol.radical()?;
    let w = rad.eval(z)?;
    let q = oplus_part(potential, &rad);
    let ratio = (z - sol.beta + w) / (sol.a - sol.b);
    Ok(q.eval(z) * w - (ratio * ratio).ln() - Complex64::new(4f64.ln(), 0.0))
}

/// Closed form of G_k evaluated at the double root -beta_k of the cubic
/// model. Its real part is the phase-boundary indicator.
pub fn g_cubic_at_minus_beta(t: Complex64, k: usize) -> Result<Complex64> {
    let sol = match solve_cubic_branch(t, k) {
        Ok(s) => s,
        Err(Error::BranchCollision { .. }) => {
            // evaluate on the requested sheet anyway; the indicator stays finite
            let beta = beta_branches(t)[k];
            OneCutSolution::from_beta_delta2(beta, 2.0 / beta, Some(k as u8), 0.0)
        }
        Err(e) => return Err(e),
    };
    let rad = sol.radical()?;
    let beta = sol.beta;
    let delta = canonical_delta(sol.delta2);
    let wm = rad.eval(-beta)?;
    let log_arg = (2.0 * beta - wm) / delta;
    Ok(-wm * (2.0 * beta * beta + sol.delta2) / 3.0 - (log_arg * log_arg).ln())
}
