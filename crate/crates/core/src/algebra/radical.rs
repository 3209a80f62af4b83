use num_complex::Complex64;

use super::poly::Polynomial;
use super::series::LaurentSeries;
use crate::error::{Error, Result};

/// The square root `w(z) = sqrt(prod_m (z - a_m)(z - b_m))` on the branch
/// with `w(z)/z^s -> 1` at infinity.
///
/// Endpoints are stored as ordered pairs `(a_m, b_m)`; the branch cut of the
/// default evaluation lies exactly on the straight chord of each pair. This
/// global branch exists whenever the chords are disjoint, which covers every
/// configuration this crate solves; for arbitrary paths use
/// [`BranchedRadical::continue_along`].
#[derive(Clone, Debug)]
pub struct BranchedRadical {
    pairs: Vec<(Complex64, Complex64)>,
}

impl BranchedRadical {
    pub fn new(pairs: Vec<(Complex64, Complex64)>) -> Result<Self> {
        let flat: Vec<Complex64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        for i in 0..flat.len() {
            for j in (i + 1)..flat.len() {
                if (flat[i] - flat[j]).norm() == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "coincident branch points at {}",
                        flat[i]
                    )));
                }
            }
        }
        Ok(BranchedRadical { pairs })
    }

    pub fn one_cut(a: Complex64, b: Complex64) -> Result<Self> {
        BranchedRadical::new(vec![(a, b)])
    }

    /// Number of cuts s.
    pub fn num_cuts(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Complex64, Complex64)] {
        &self.pairs
    }

    pub fn endpoints(&self) -> Vec<Complex64> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Midpoint of pair m.
    pub fn beta(&self, m: usize) -> Complex64 {
        0.5 * (self.pairs[m].0 + self.pairs[m].1)
    }

    /// Half-width of pair m, delta = (b - a)/2.
    pub fn delta(&self, m: usize) -> Complex64 {
        0.5 * (self.pairs[m].1 - self.pairs[m].0)
    }

    pub fn scale(&self) -> f64 {
        self.endpoints().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Scale-aware guard radius around branch points.
    pub fn eps_root(&self) -> f64 {
        1e-9 * (1.0 + self.scale())
    }

    /// One quadratic factor: `delta * sqrt(u-1) * sqrt(u+1)` with
    /// `u = (z - beta)/delta`. Branch cut on the chord, ~ (z - beta) at
    /// infinity.
    pub fn pair_factor(&self, m: usize, z: Complex64) -> Complex64 {
        let beta = self.beta(m);
        let delta = self.delta(m);
        let u = (z - beta) / delta;
        delta
            * (u - Complex64::new(1.0, 0.0)).sqrt()
            * (u + Complex64::new(1.0, 0.0)).sqrt()
    }

    /// Default (chord-cut) branch evaluation.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let eps = self.eps_root();
        for e in self.endpoints() {
            if (z - e).norm() < eps {
                return Err(Error::EvaluationAtBranchPoint { point: e, eps });
            }
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.pairs
            .iter()
            .enumerate()
            .map(|(m, _)| self.pair_factor(m, z))
            .product()
    }

    /// Point on the chord of pair m at parameter x in (-1, 1).
    pub fn chord_point(&self, m: usize, x: f64) -> Complex64 {
        self.beta(m) + x * self.delta(m)
    }

    /// Boundary value w(z_+) on the chord of pair m, + side relative to the
    /// orientation a -> b.
    pub fn eval_plus(&self, m: usize, x: f64) -> Complex64 {
        let z = self.chord_point(m, x);
        let rest: Complex64 = (0..self.pairs.len())
            .filter(|&k| k != m)
            .map(|k| self.pair_factor(k, z))
            .product();
        Complex64::new(0.0, 1.0) * self.delta(m) * (1.0 - x * x).sqrt() * rest
    }

    /// Analytic continuation along a polyline, sign-tracked against the
    /// chord-branch evaluation. The value at `path[0]` seeds the branch.
    pub fn continue_along(&self, path: &[Complex64]) -> Result<Complex64> {
        assert!(path.len() >= 2, "continuation path needs at least two points");
        let mut z = path[0];
        let mut w = self.eval(z)?;
        for &target in &path[1..] {
            let total = target - z;
            if total.norm() == 0.0 {
                continue;
            }
            let mut t = 0.0f64;
            let mut h = 1.0f64;
            while t < 1.0 {
                let tn = (t + h).min(1.0);
                let zn = z + total * tn;
                let accepted = match self.eval(zn) {
                    Ok(cand) => {
                        let pick = if (cand - w).norm() <= (cand + w).norm() { cand } else { -cand };
                        // argument jump above pi/2 means the step outran the branch
                        if (pick * w.conj()).re > 0.0 {
                            w = pick;
                            t = tn;
                            true
                        } else {
                            false
                        }
                    }
                    Err(_) => false,
                };
                if accepted {
                    h = (h * 2.0).min(1.0);
                } else {
                    h *= 0.5;
                    if h < 1e-12 {
                        return Err(Error::StepCollapse { at: zn, min_ds: 1e-12 });
                    }
                }
            }
            z = target;
        }
        Ok(w)
    }

    /// Laurent series of w at infinity, valid down to power `bottom`.
    pub fn series(&self, bottom: i64) -> LaurentSeries {
        let s = self.pairs.len() as i64;
        let n = (s - bottom + 1).max(2) as usize;
        let q = self.endpoint_product_series(n);
        let sq = sqrt_series(&q, n);
        LaurentSeries::new(s, sq)
    }

    /// Laurent series of 1/w at infinity, valid down to power `bottom`.
    pub fn series_inv(&self, bottom: i64) -> LaurentSeries {
        let s = self.pairs.len() as i64;
        let n = (-s - bottom + 1).max(2) as usize;
        let q = self.endpoint_product_series(n);
        let sq = sqrt_series(&q, n);
        let inv = invert_series(&sq, n);
        LaurentSeries::new(-s, inv)
    }

    /// Coefficients of Q(v) = prod (1 - a v)(1 - b v), padded to len n.
    fn endpoint_product_series(&self, n: usize) -> Vec<Complex64> {
        let mut q = vec![Complex64::default(); n];
        q[0] = Complex64::new(1.0, 0.0);
        let mut deg = 0usize;
        for e in self.endpoints() {
            deg = (deg + 1).min(n - 1);
            for k in (0..=deg).rev() {
                let lower = if k > 0 { q[k - 1] } else { Complex64::default() };
                q[k] -= e * lower;
                // q_new[k] = q[k] - e*q[k-1]; in-place going downward
            }
        }
        q
    }
}

/// Power-series square root with s_0 = 1: s such that s*s = q.
fn sqrt_series(q: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut s = vec![Complex64::default(); n];
    s[0] = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let mut acc = q.get(k).copied().unwrap_or_default();
        for i in 1..k {
            acc -= s[i] * s[k - i];
        }
        s[k] = acc / 2.0;
    }
    s
}

/// Power-series inverse with t_0 = 1 (input must have s_0 = 1).
fn invert_series(s: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::default(); n];
    t[0] = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let mut acc = Complex64::default();
        for i in 1..=k {
            acc -= s.get(i).copied().unwrap_or_default() * t[k - i];
        }
        t[k] = acc;
    }
    t
}

/// Branch-consistent evaluation of w with an optional continuation hint.
///
/// Without a hint this is the chord-cut global branch. With a hint the value
/// is the analytic continuation along `reference -> hint points -> z`, where
/// the reference sits at `10 (1 + max|endpoint|) e^(i pi/7)`.
pub fn eval_w(rad: &BranchedRadical, z: Complex64, path_hint: Option<&[Complex64]>) -> Result<Complex64> {
    match path_hint {
        None => rad.eval(z),
        Some(hint) => {
            let r = 10.0 * (1.0 + rad.scale());
            let theta = std::f64::consts::PI / 7.0;
            let mut path = vec![Complex64::from_polar(r, theta)];
            path.extend_from_slice(hint);
            if path.last().map(|&p| (p - z).norm() > 0.0).unwrap_or(true) {
                path.push(z);
            }
            rad.continue_along(&path)
        }
    }
}

/// Laurent expansion of num(z)/w(z) at infinity with `depth + 1` exact
/// coefficients below the top power.
pub fn laurent_at_infinity(num: &Polynomial, rad: &BranchedRadical, depth: usize) -> LaurentSeries {
    let s = rad.num_cuts() as i64;
    if num.is_zero() {
        return LaurentSeries::zero_to(-(depth as i64) - s);
    }
    let dn = num.degree().unwrap_or(0) as i64;
    let top = dn - s;
    let bottom = top - depth as i64;
    let num_series = LaurentSeries::from_polynomial(num, bottom + s - dn - 1);
    let inv = rad.series_inv(bottom - dn - 1);
    num_series.mul(&inv)
}

/// The projection (num/w)_+ : nonnegative powers of the expansion at
/// infinity. This is h(z) when num = W'.
pub fn oplus_part(num: &Polynomial, rad: &BranchedRadical) -> Polynomial {
    laurent_at_infinity(num, rad, (num.degree().unwrap_or(0) + 2).max(4)).oplus()
}
