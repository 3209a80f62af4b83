//! High-precision construction of the orthogonal polynomials p_n for the
//! weight exp(-n W(z)) on a contour between convergence sectors: moment
//! table by arbitrary-precision contour quadrature, three-term recurrence by
//! the moment (Chebyshev) algorithm, zeros by simultaneous iteration with
//! Newton polishing, and comparison of the zeros against predicted cuts.

use num_complex::Complex64;
use rayon::prelude::*;
use scurve_mp::{digits_to_bits, BigFloat, MpComplex};

use crate::algebra::Polynomial;
use crate::error::{Error, Result};

/// Piecewise-linear integration contour: in along angle `in_angle` toward
/// the hinge, out along `out_angle`.
#[derive(Clone, Copy, Debug)]
pub struct Contour {
    pub hinge: Complex64,
    pub in_angle: f64,
    pub out_angle: f64,
}

impl Contour {
    /// Contour between the convergence sectors i and j of the cubic weight,
    /// entering and leaving along the sector bisectors 2 pi k/3.
    pub fn cubic_sectors(i: usize, j: usize) -> Self {
        Contour {
            hinge: Complex64::default(),
            in_angle: 2.0 * std::f64::consts::PI * (i % 3) as f64 / 3.0,
            out_angle: 2.0 * std::f64::consts::PI * (j % 3) as f64 / 3.0,
        }
    }

    /// The real line (hermitian case), oriented left to right.
    pub fn real_line() -> Self {
        Contour { hinge: Complex64::default(), in_angle: std::f64::consts::PI, out_angle: 0.0 }
    }
}

/// Moments mu_k = int_Gamma z^k exp(-n W(z)) dz, k = 0..2n.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub n: u32,
    pub moments: Vec<MpComplex>,
    pub precision_digits: u32,
    pub contour: Contour,
}

/// Three-term recurrence p_{j+1} = (z - alpha_j) p_j - beta_j p_{j-1}.
#[derive(Clone, Debug)]
pub struct RecurrenceCoefficients {
    /// alpha_0 .. alpha_{n-1}
    pub alpha: Vec<MpComplex>,
    /// beta_1 .. beta_{n-1} (all nonzero when the family exists)
    pub beta: Vec<MpComplex>,
    /// mu_0 (the 0th "beta", kept for normalization checks)
    pub mu0: MpComplex,
}

/// Zeros of p_n with the residual bound after Newton polishing.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    pub max_residual: f64,
}

/// Distances of zeros to predicted cuts.
#[derive(Clone, Debug)]
pub struct ZeroCutReport {
    /// per-zero (distance to nearest cut, index of that cut)
    pub nearest: Vec<(f64, usize)>,
    /// number of zeros assigned to each cut
    pub counts: Vec<usize>,
    /// one-sided Hausdorff distance from the zeros to the cut system
    pub hausdorff: f64,
}

// ---- arbitrary-precision Gauss-Legendre rule ----

fn legendre_pair_mp(p: usize, x: &BigFloat, prec: u32) -> (BigFloat, BigFloat) {
    let one = BigFloat::one(prec);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 2..=p {
        let kf = BigFloat::from_u64(k as u64, prec);
        let a = BigFloat::from_u64(2 * k as u64 - 1, prec);
        let b = BigFloat::from_u64(k as u64 - 1, prec);
        let p2 = a.mul(x).mul(&p1).sub(&b.mul(&p0)).div(&kf);
        p0 = p1;
        p1 = p2;
    }
    // P'_p = p (x P_p - P_{p-1}) / (x^2 - 1)
    let num = BigFloat::from_u64(p as u64, prec).mul(&x.mul(&p1).sub(&p0));
    let den = x.mul(x).sub(&one);
    (p1, num.div(&den))
}

/// Gauss-Legendre nodes and weights on [-1, 1] at the given precision.
fn gauss_legendre_mp(p: usize, prec: u32) -> Vec<(BigFloat, BigFloat)> {
    let f64_rule = crate::quad::gauss_legendre(p);
    let two = BigFloat::from_u64(2, prec);
    let one = BigFloat::one(prec);
    f64_rule
        .iter()
        .map(|&(x0, _)| {
            let mut x = BigFloat::from_f64(x0, prec);
            let mut dp = BigFloat::one(prec);
            for _ in 0..6 {
                let (pv, dv) = legendre_pair_mp(p, &x, prec);
                dp = dv.clone();
                x = x.sub(&pv.div(&dv));
            }
            let w = two.div(&one.sub(&x.mul(&x)).mul(&dp).mul(&dp));
            (x, w)
        })
        .collect()
}

// ---- moment computation ----

fn potential_to_mp(potential: &Polynomial, prec: u32) -> Vec<MpComplex> {
    potential
        .coeffs()
        .iter()
        .map(|c| MpComplex::from_f64(c.re, c.im, prec))
        .collect()
}

fn eval_poly_mp(coeffs: &[MpComplex], z: &MpComplex, prec: u32) -> MpComplex {
    let mut acc = MpComplex::zero(prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

fn ray_re_nw(potential: &Polynomial, n: u32, hinge: Complex64, angle: f64, u: f64) -> f64 {
    let z = hinge + u * Complex64::from_polar(1.0, angle);
    n as f64 * potential.eval(z).re
}

/// Truncation radius: Re(n W) >= target from this radius on.
fn truncation_radius(potential: &Polynomial, n: u32, hinge: Complex64, angle: f64, target: f64) -> Result<f64> {
    let mut hi = 1.0f64;
    let mut guard = 0;
    while ray_re_nw(potential, n, hinge, angle, hi) < target
        || ray_re_nw(potential, n, hinge, angle, 1.3 * hi) < target
    {
        hi *= 1.3;
        guard += 1;
        if guard > 200 {
            return Err(Error::InvalidInput(format!(
                "ray at angle {angle} never reaches the decay target; not a convergence sector"
            )));
        }
    }
    Ok(1.1 * hi)
}

/// Largest growth of |exp(-n W)| along the two rays (decimal digits).
fn amplitude_digits(potential: &Polynomial, n: u32, contour: &Contour, u_in: f64, u_out: f64) -> u32 {
    let mut min_re = 0.0f64;
    for (angle, umax) in [(contour.in_angle, u_in), (contour.out_angle, u_out)] {
        for k in 0..400 {
            let u = umax * (k as f64 + 0.5) / 400.0;
            min_re = min_re.min(ray_re_nw(potential, n, contour.hinge, angle, u));
        }
    }
    ((-min_re) * std::f64::consts::LOG10_E).max(0.0).ceil() as u32
}

/// Moments of z^k exp(-n W(z)) for k = 0..2n on the contour at a fixed
/// panel multiplier.
fn compute_moments_fixed(
    potential: &Polynomial,
    n: u32,
    contour: &Contour,
    precision_digits: u32,
    panel_mult: usize,
) -> Result<MomentTable> {
    let target = (precision_digits as f64 + 20.0) * std::f64::consts::LN_10;
    let u_in = truncation_radius(potential, n, contour.hinge, contour.in_angle, target)?;
    let u_out = truncation_radius(potential, n, contour.hinge, contour.out_angle, target)?;
    let amp = amplitude_digits(potential, n, contour, u_in, u_out);
    let prec = digits_to_bits(precision_digits + amp + 25);
    let coeffs = potential_to_mp(potential, prec);
    let n_moments = 2 * n as usize + 1;
    let order = 32usize;
    let rule = gauss_legendre_mp(order, prec);
    let mut acc = vec![MpComplex::zero(prec); n_moments];
    for (angle, umax, sign) in [
        (contour.in_angle, u_in, -1.0f64),
        (contour.out_angle, u_out, 1.0),
    ] {
        // oscillation estimate fixes the base panel count for this ray
        let zend = contour.hinge + umax * Complex64::from_polar(1.0, angle);
        let phase = n as f64 * potential.eval(zend).norm();
        let panels = panel_mult * ((phase / 3.0).ceil() as usize).clamp(8, 4000);
        let dir = Complex64::from_polar(1.0, angle);
        let dir_mp = MpComplex::from_f64(dir.re, dir.im, prec);
        let hinge_mp = MpComplex::from_f64(contour.hinge.re, contour.hinge.im, prec);
        // exact panel arithmetic: du = umax/panels in working precision
        let du_mp = BigFloat::from_f64(umax, prec).div_u64(panels as u64);
        let partials: Vec<Vec<MpComplex>> = (0..panels)
            .into_par_iter()
            .map(|ip| {
                let half = du_mp.scale2(-1);
                let mid = du_mp
                    .mul_u64(ip as u64)
                    .add(&half);
                let mut local = vec![MpComplex::zero(prec); n_moments];
                for (x, wgt) in &rule {
                    let u = mid.add(&half.mul(x));
                    let z = hinge_mp.add(&dir_mp.mul_real(&u));
                    let w_val = eval_poly_mp(&coeffs, &z, prec);
                    let exponent = w_val.mul_real(&BigFloat::from_i64(-(n as i64), prec));
                    let weight = exponent.exp();
                    // quadrature factor: wgt * half * dir * sign
                    let factor = weight
                        .mul_real(&wgt.mul(&half))
                        .mul(&dir_mp)
                        .mul_real(&BigFloat::from_f64(sign, prec));
                    let mut pow = factor;
                    for m in local.iter_mut() {
                        *m = m.add(&pow);
                        pow = pow.mul(&z);
                    }
                }
                local
            })
            .collect();
        for part in partials {
            for (m, p) in acc.iter_mut().zip(part) {
                *m = m.add(&p);
            }
        }
    }
    Ok(MomentTable { n, moments: acc, precision_digits, contour: *contour })
}

/// Moments of z^k exp(-n W(z)) for k = 0..2n on the contour, by composite
/// Gauss-Legendre in arbitrary precision with self-validating panel
/// doubling: node doubling must move every moment by less than
/// 10^(-precision_digits/2) relative.
pub fn compute_moments(
    potential: &Polynomial,
    n: u32,
    contour: &Contour,
    precision_digits: u32,
) -> Result<MomentTable> {
    if precision_digits < 50 {
        return Err(Error::InvalidInput("precision_digits must be >= 50".into()));
    }
    let tol = 10f64.powi(-((precision_digits / 2) as i32));
    let mut mult = 1usize;
    let mut current = compute_moments_fixed(potential, n, contour, precision_digits, mult)?;
    for doubling in 0..4 {
        let refined = compute_moments_fixed(potential, n, contour, precision_digits, 2 * mult)?;
        // the moment scale is shared: high moments legitimately dwarf low
        // ones, so compare against the largest magnitude
        let scale = refined
            .moments
            .iter()
            .map(|m| m.abs().to_f64())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let ok = current
            .moments
            .iter()
            .zip(&refined.moments)
            .all(|(c, r)| c.sub(r).abs().to_f64() / scale <= tol);
        if ok {
            return Ok(refined);
        }
        current = refined;
        mult *= 2;
        if doubling == 3 {
            return Err(Error::PrecisionExhausted { doublings: 4 });
        }
    }
    unreachable!()
}

// ---- recurrence from moments (Chebyshev algorithm) ----

/// Monic three-term recurrence coefficients from the moment table.
pub fn recurrence_from_moments(table: &MomentTable) -> Result<RecurrenceCoefficients> {
    let n = table.n as usize;
    let mu = &table.moments;
    let prec = mu[0].re.prec();
    let len = 2 * n;
    if mu.len() < len {
        return Err(Error::InvalidInput("moment table too short".into()));
    }
    let mu0_scale = mu[0].abs().to_f64();
    if mu0_scale == 0.0 {
        return Err(Error::DegenerateHankelMinor { degree: 0 });
    }
    // sigma_{k,l} stored at index l - k; sigma_0 = moments
    let mut sigma_prev: Vec<MpComplex> = Vec::new(); // sigma_{k-2}
    let mut sigma: Vec<MpComplex> = mu[..len].to_vec(); // sigma_{k-1}
    let mut alpha = vec![mu[1].div(&mu[0])];
    let mut beta: Vec<MpComplex> = Vec::new();
    // degeneracy threshold relative to the moment scale
    let tiny = 10f64.powf(-(0.8 * table.precision_digits as f64));
    for k in 1..n {
        // sigma_{k,l} = sigma_{k-1,l+1} - alpha_{k-1} sigma_{k-1,l}
        //             - beta_{k-1} sigma_{k-2,l},  l = k..=2n-1-k
        let width = len - 2 * k;
        let mut next = vec![MpComplex::zero(prec); width];
        for l in k..(len - k) {
            let mut v = sigma[l - k + 2].sub(&alpha[k - 1].mul(&sigma[l - k + 1]));
            if k >= 2 {
                v = v.sub(&beta[k - 2].mul(&sigma_prev[l - k + 2]));
            }
            next[l - k] = v;
        }
        let skk = next[0].clone();
        if skk.abs().to_f64() < tiny * mu0_scale {
            return Err(Error::DegenerateHankelMinor { degree: k });
        }
        // alpha_k = s_{k,k+1}/s_{k,k} - s_{k-1,k}/s_{k-1,k-1}
        alpha.push(next[1].div(&skk).sub(&sigma[1].div(&sigma[0])));
        beta.push(skk.div(&sigma[0]));
        sigma_prev = sigma;
        sigma = next;
    }
    Ok(RecurrenceCoefficients { alpha, beta, mu0: mu[0].clone() })
}

/// Monic p_m coefficients (ascending) from the recurrence, in working
/// precision.
pub fn polynomial_from_recurrence(rc: &RecurrenceCoefficients, m: usize) -> Vec<MpComplex> {
    let prec = rc.mu0.re.prec();
    let mut p_prev = vec![MpComplex::one(prec)]; // p_0 = 1
    if m == 0 {
        return p_prev;
    }
    let mut p = vec![rc.alpha[0].neg(), MpComplex::one(prec)]; // p_1 = z - alpha_0
    for j in 1..m {
        // p_{j+1} = (z - alpha_j) p_j - beta_j p_{j-1}
        let mut next = vec![MpComplex::zero(prec); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&rc.alpha[j].mul(c));
        }
        for (i, c) in p_prev.iter().enumerate() {
            next[i] = next[i].sub(&rc.beta[j - 1].mul(c));
        }
        p_prev = p;
        p = next;
    }
    p
}

/// Orthogonality spot check: |int p_j p_k e^{-nW}| computed from the moment
/// table, relative to mu_0.
pub fn orthogonality_residual(
    table: &MomentTable,
    rc: &RecurrenceCoefficients,
    j: usize,
    k: usize,
) -> f64 {
    let pj = polynomial_from_recurrence(rc, j);
    let pk = polynomial_from_recurrence(rc, k);
    let prec = rc.mu0.re.prec();
    let mut acc = MpComplex::zero(prec);
    for (a, ca) in pj.iter().enumerate() {
        for (b, cb) in pk.iter().enumerate() {
            acc = acc.add(&ca.mul(cb).mul(&table.moments[a + b]));
        }
    }
    acc.abs().to_f64() / table.moments[0].abs().to_f64()
}


/// |int p_m(z) z^k e^{-nW} dz| relative to the absolute-sum bound of the
/// defining moments (the orthogonality defect of the final polynomial).
pub fn monomial_orthogonality_defect(
    table: &MomentTable,
    rc: &RecurrenceCoefficients,
    m: usize,
    k: usize,
) -> f64 {
    let pm = polynomial_from_recurrence(rc, m);
    let prec = rc.mu0.re.prec();
    let mut acc = MpComplex::zero(prec);
    let mut scale = 0.0f64;
    for (a, ca) in pm.iter().enumerate() {
        let term = ca.mul(&table.moments[a + k]);
        scale += term.abs().to_f64();
        acc = acc.add(&term);
    }
    acc.abs().to_f64() / scale.max(1e-300)
}

// ---- zeros ----

/// All zeros of p_n: Durand-Kerner at f64 for separation, then Newton
/// polishing in working precision.
pub fn zeros_of_pn(rc: &RecurrenceCoefficients, n: usize) -> Result<ZeroSet> {
    if n == 0 {
        return Ok(ZeroSet { zeros: Vec::new(), max_residual: 0.0 });
    }
    if rc.alpha.len() < n || rc.beta.len() < n - 1 {
        return Err(Error::InvalidInput("recurrence does not cover the requested degree".into()));
    }
    let coeffs_mp = polynomial_from_recurrence(rc, n);
    let prec = rc.mu0.re.prec();
    // f64 stage
    let coeffs_f64: Vec<Complex64> = coeffs_mp
        .iter()
        .map(|c| {
            let (re, im) = c.to_c64();
            Complex64::new(re, im)
        })
        .collect();
    let poly = Polynomial::from_coeffs(coeffs_f64);
    let mut zeros64 = poly.roots();
    if zeros64.len() != n {
        return Err(Error::RootFindingStalled { iters: 0 });
    }
    zeros64.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    // MP Newton polishing
    let deriv_mp: Vec<MpComplex> = coeffs_mp
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_real(&BigFloat::from_u64(k as u64, prec)))
        .collect();
    let mut max_residual = 0.0f64;
    let zeros: Vec<Complex64> = zeros64
        .iter()
        .map(|&z0| {
            let mut z = MpComplex::from_f64(z0.re, z0.im, prec);
            for _ in 0..8 {
                let pv = eval_poly_mp(&coeffs_mp, &z, prec);
                let dv = eval_poly_mp(&deriv_mp, &z, prec);
                if dv.abs().to_f64() == 0.0 {
                    break;
                }
                z = z.sub(&pv.div(&dv));
            }
            let res = eval_poly_mp(&coeffs_mp, &z, prec).abs().to_f64();
            max_residual = max_residual.max(res);
            let (re, im) = z.to_c64();
            Complex64::new(re, im)
        })
        .collect();
    Ok(ZeroSet { zeros, max_residual })
}

/// Per-zero distances to the nearest cut polyline, per-cut counts, and the
/// one-sided Hausdorff distance of the zero set to the cut system.
pub fn zeros_vs_cuts(zs: &ZeroSet, cuts: &[Vec<Complex64>]) -> ZeroCutReport {
    let mut nearest = Vec::with_capacity(zs.zeros.len());
    let mut counts = vec![0usize; cuts.len()];
    let mut hausdorff = 0.0f64;
    for &z in &zs.zeros {
        let mut best = (f64::INFINITY, usize::MAX);
        for (ci, cut) in cuts.iter().enumerate() {
            let d = dist_to_polyline(z, cut);
            if d < best.0 {
                best = (d, ci);
            }
        }
        if best.1 != usize::MAX {
            counts[best.1] += 1;
        }
        hausdorff = hausdorff.max(best.0);
        nearest.push(best);
    }
    ZeroCutReport { nearest, counts, hausdorff }
}

fn dist_to_polyline(p: Complex64, poly: &[Complex64]) -> f64 {
    if poly.is_empty() {
        return f64::INFINITY;
    }
    if poly.len() == 1 {
        return (p - poly[0]).norm();
    }
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
