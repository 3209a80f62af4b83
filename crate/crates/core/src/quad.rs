//! Composite Gauss-Legendre quadrature with adaptive bisection and
//! square-root endpoint substitutions.
//!
//! Integrands with an integrable `1/sqrt(z - e)` singularity (or a factor
//! vanishing like `sqrt(z - e)`) at a segment endpoint are regularized by the
//! substitution `z = e + u^2 ec`, after which composite Gauss-Legendre
//! converges spectrally.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default quadrature tolerance for period integrals.
pub const TOL_QUAD: f64 = 1e-10;

const GL_ORDER: usize = 16;
const MAX_DEPTH: usize = 32;

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&n) {
        return Arc::clone(v);
    }
    let v = Arc::new(compute_gauss_legendre(n));
    cache.write().unwrap().insert(n, Arc::clone(&v));
    v
}

fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gl_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, rule: &[(f64, f64)]) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::default();
    for &(x, w) in rule {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive integration of a complex-valued function over a real parameter
/// interval.
pub fn integrate_param<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let rule = gauss_legendre(GL_ORDER);
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: usize,
        rule: &[(f64, f64)],
    ) -> Result<Complex64> {
        let mid = 0.5 * (a + b);
        let left = gl_panel(f, a, mid, rule);
        let right = gl_panel(f, mid, b, rule);
        let refined = left + right;
        let err = (refined - whole).norm();
        if err <= tol {
            return Ok(refined);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::QuadratureFailure { tol, estimate: err });
        }
        let l = recurse(f, a, mid, left, 0.5 * tol, depth + 1, rule)?;
        let r = recurse(f, mid, b, right, 0.5 * tol, depth + 1, rule)?;
        Ok(l + r)
    }
    let whole = gl_panel(f, a, b, &rule);
    recurse(f, a, b, whole, tol, 0, &rule)
}

/// Integrate f along the straight segment from z0 to z1.
pub fn integrate_segment<F: Fn(Complex64) -> Complex64>(
    f: &F,
    z0: Complex64,
    z1: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let dir = z1 - z0;
    integrate_param(&|t: f64| f(z0 + t * dir) * dir, 0.0, 1.0, tol)
}

/// Integrate f along [z0, z1] where f may carry a square-root singularity
/// (or square-root vanishing factor) at either endpoint.
///
/// With `sing0`, the half near z0 is mapped through `z = z0 + u^2 e` which
/// turns `f ~ (z - z0)^(±1/2)` into an analytic integrand; likewise `sing1`.
pub fn integrate_segment_singular<F: Fn(Complex64) -> Complex64>(
    f: &F,
    z0: Complex64,
    z1: Complex64,
    sing0: bool,
    sing1: bool,
    tol: f64,
) -> Result<Complex64> {
    match (sing0, sing1) {
        (false, false) => integrate_segment(f, z0, z1, tol),
        (true, false) => integrate_from_singular_end(f, z0, z1, tol),
        (false, true) => Ok(-(integrate_from_singular_end(f, z1, z0, tol)?)),
        (true, true) => {
            let mid = 0.5 * (z0 + z1);
            let a = integrate_from_singular_end(f, z0, mid, tol * 0.5)?;
            let b = integrate_from_singular_end(f, z1, mid, tol * 0.5)?;
            Ok(a - b)
        }
    }
}

/// Integral from a singular endpoint e toward z1 via z = e + u^2 dir.
fn integrate_from_singular_end<F: Fn(Complex64) -> Complex64>(
    f: &F,
    e: Complex64,
    z1: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let span = z1 - e;
    let len = span.norm();
    let dir = span / len;
    let umax = len.sqrt();
    integrate_param(
        &|u: f64| f(e + u * u * dir) * (2.0 * u) * dir,
        0.0,
        umax,
        tol,
    )
}
