//! Newton solution and parameter continuation of the two-cut endpoint system
//! for the cubic model, including the period constant r.
//!
//! Endpoint labels: cut 1 is (a, b), cut 2 is (c, d); cuts are relabeled
//! canonically by ascending imaginary part of the chord midpoint (then
//! ascending real part), endpoints within a pair likewise. The gap segment
//! used for the A-cycle runs from b to c.

use num_complex::Complex64;

use crate::abelian::{cut_integral_over_w, cut_integral_times_w, gap_integral_over_w, gap_integral_times_w};
use crate::algebra::BranchedRadical;
use crate::error::{Error, Result};
use crate::onecut::OneCutSolution;
use crate::quad::TOL_QUAD;

pub const TOL_NEWTON: f64 = 1e-10;
const MAX_ITER: usize = 60;
const MIN_STEP: f64 = 1e-5;
const COLLISION_DIST: f64 = 1e-6;

/// A solved (or trial) two-cut configuration of the cubic model.
#[derive(Clone, Copy, Debug)]
pub struct TwoCutSolution {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub r: f64,
    pub residual_norm: f64,
}

impl TwoCutSolution {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        TwoCutSolution { a, b, c, d, r: 0.0, residual_norm: f64::NAN }
    }

    pub fn endpoints(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn radical(&self) -> Result<BranchedRadical> {
        BranchedRadical::new(vec![(self.a, self.b), (self.c, self.d)])
    }

    /// Relabel cuts by ascending Im of the chord midpoint and endpoints
    /// within each pair by ascending Im (ties by Re).
    pub fn canonicalize(&self) -> Self {
        let order = |p: Complex64, q: Complex64| -> (Complex64, Complex64) {
            if (p.im, p.re) <= (q.im, q.re) {
                (p, q)
            } else {
                (q, p)
            }
        };
        let (a, b) = order(self.a, self.b);
        let (c, d) = order(self.c, self.d);
        let m1 = 0.5 * (a + b);
        let m2 = 0.5 * (c + d);
        let mut out = *self;
        if (m1.im, m1.re) <= (m2.im, m2.re) {
            out.a = a;
            out.b = b;
            out.c = c;
            out.d = d;
        } else {
            out.a = c;
            out.b = d;
            out.c = a;
            out.d = b;
        }
        out
    }

    pub fn min_pair_distance(&self) -> f64 {
        let e = self.endpoints();
        let mut m = f64::INFINITY;
        for i in 0..4 {
            for j in (i + 1)..4 {
                m = m.min((e[i] - e[j]).norm());
            }
        }
        m
    }

    fn scale(&self) -> f64 {
        1.0 + self.endpoints().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

fn elementary_symmetric(e: &[Complex64; 4]) -> (Complex64, Complex64, Complex64, Complex64) {
    let e1 = e[0] + e[1] + e[2] + e[3];
    let e2 = e[0] * e[1]
        + e[0] * e[2]
        + e[0] * e[3]
        + e[1] * e[2]
        + e[1] * e[3]
        + e[2] * e[3];
    let e3 = e[0] * e[1] * e[2] + e[0] * e[1] * e[3] + e[0] * e[2] * e[3] + e[1] * e[2] * e[3];
    let e4 = e[0] * e[1] * e[2] * e[3];
    (e1, e2, e3, e4)
}

/// The integrals A_n = int_b^c z^n/y(z_+) dz (gap segment) and
/// B_n = int_a^b z^n/y(z_+) dz (cut 1, plus-side branch).
pub fn cubic_periods(sol: &TwoCutSolution, n: usize) -> Result<(Complex64, Complex64)> {
    if n > 4 {
        return Err(Error::InvalidInput(format!("period exponent {n} out of range 0..=4")));
    }
    let rad = sol.radical()?;
    let g = |z: Complex64| z.powi(n as i32);
    let a_n = gap_integral_over_w(&rad, 0, &g, TOL_QUAD)?;
    let b_n = cut_integral_over_w(&rad, 0, &g, TOL_QUAD)?;
    Ok((a_n, b_n))
}

/// The real period constant
/// `r = Re(B4 - 2t B2 - 4 B1 + C B0) / Im(B0/A0)` with
/// `C = (-A4 + 2t A2 + 4 A1)/A0`.
pub fn compute_r(sol: &TwoCutSolution, t: Complex64) -> Result<f64> {
    let rad = sol.radical()?;
    let mut a = [Complex64::default(); 5];
    let mut b = [Complex64::default(); 5];
    for (n, (an, bn)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
        if n == 3 {
            continue;
        }
        let g = move |z: Complex64| z.powi(n as i32);
        *an = gap_integral_over_w(&rad, 0, &g, TOL_QUAD)?;
        *bn = cut_integral_over_w(&rad, 0, &g, TOL_QUAD)?;
    }
    if a[0].norm() == 0.0 {
        return Err(Error::DegeneratePeriodRatio { value: 0.0 });
    }
    let ratio = b[0] / a[0];
    if ratio.im.abs() < 1e-12 {
        return Err(Error::DegeneratePeriodRatio { value: ratio.im });
    }
    let c_const = (-a[4] + 2.0 * t * a[2] + 4.0 * a[1]) / a[0];
    let num = b[4] - 2.0 * t * b[2] - 4.0 * b[1] + c_const * b[0];
    Ok(num.re / ratio.im)
}

/// int_b^c y(z_+) dz over the gap segment (y = w for the cubic two-cut
/// curve; the integrand vanishes like a square root at both ends).
pub fn gap_y_integral(sol: &TwoCutSolution) -> Result<Complex64> {
    let rad = sol.radical()?;
    gap_integral_times_w(&rad, 0, &|_| Complex64::new(1.0, 0.0), TOL_QUAD)
}

/// Charge carried by each cut: int_cut y(z_+) dz / (2 pi i).
pub fn cut_charges(sol: &TwoCutSolution) -> Result<[f64; 2]> {
    let rad = sol.radical()?;
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let one = |_: Complex64| Complex64::new(1.0, 0.0);
    let q1 = cut_integral_times_w(&rad, 0, &one, TOL_QUAD)? / two_pi_i;
    let q2 = cut_integral_times_w(&rad, 1, &one, TOL_QUAD)? / two_pi_i;
    Ok([q1.re, q2.re])
}

/// The eight real residuals of the system: Re/Im of (e3 - 4), (e2 + 2t),
/// e1, and (int_b^c y dz - i r) with r from the period formula.
pub fn residual(t: Complex64, sol: &TwoCutSolution) -> Result<[f64; 8]> {
    let (e1, e2, e3, _) = elementary_symmetric(&sol.endpoints());
    let r = compute_r(sol, t)?;
    let gap = gap_y_integral(sol)?;
    let period = gap - Complex64::new(0.0, r);
    Ok([
        (e3 - 4.0).re,
        (e3 - 4.0).im,
        (e2 + 2.0 * t).re,
        (e2 + 2.0 * t).im,
        e1.re,
        e1.im,
        period.re,
        period.im,
    ])
}

/// The six-dimensional residual used by Newton (d = -a-b-c eliminates e1).
fn newton_residual(t: Complex64, x: &[f64; 6]) -> Result<[f64; 6]> {
    let a = Complex64::new(x[0], x[1]);
    let b = Complex64::new(x[2], x[3]);
    let c = Complex64::new(x[4], x[5]);
    let d = -a - b - c;
    let sol = TwoCutSolution::new(a, b, c, d);
    if sol.min_pair_distance() < COLLISION_DIST * sol.scale() {
        let e = sol.endpoints();
        let (mut pi_, mut pj) = (e[0], e[1]);
        let mut best = f64::INFINITY;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dd = (e[i] - e[j]).norm();
                if dd < best {
                    best = dd;
                    pi_ = e[i];
                    pj = e[j];
                }
            }
        }
        return Err(Error::EndpointCollision { a: pi_, b: pj, dist: best });
    }
    let (e1, e2, e3, _) = elementary_symmetric(&sol.endpoints());
    debug_assert!(e1.norm() < 1e-12);
    let r = compute_r(&sol, t)?;
    let gap = gap_y_integral(&sol)?;
    Ok([
        (e3 - 4.0).re,
        (e3 - 4.0).im,
        (e2 + 2.0 * t).re,
        (e2 + 2.0 * t).im,
        gap.re,
        gap.im - r,
    ])
}

fn norm6(v: &[f64; 6]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration on (a, b, c) with central finite-difference
/// Jacobian; d = -a-b-c.
pub fn newton_solve(t: Complex64, initial: &TwoCutSolution) -> Result<TwoCutSolution> {
    let init = initial.canonicalize();
    let mut x = [
        init.a.re, init.a.im, init.b.re, init.b.im, init.c.re, init.c.im,
    ];
    let mut f = newton_residual(t, &x)?;
    let mut fnorm = norm6(&f);
    for iter in 0..MAX_ITER {
        if fnorm < TOL_NEWTON {
            return finish_solution(t, &x, fnorm);
        }
        // central finite differences, step scaled to the configuration
        let scale = 1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let h = 1e-7 * scale;
        let mut jac = [[0.0f64; 6]; 6];
        for j in 0..6 {
            let mut xp = x;
            xp[j] += h;
            let mut xm = x;
            xm[j] -= h;
            let (fp, fm) = match (newton_residual(t, &xp), newton_residual(t, &xm)) {
                (Ok(p), Ok(m)) => (p, m),
                _ => return Err(Error::NoConvergence { iters: iter + 1, residual: fnorm }),
            };
            for i in 0..6 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let step = solve6(&jac, &f).ok_or(Error::SingularJacobian)?;
        let mut lambda = 1.0f64;
        let mut accepted = false;
        for _ in 0..10 {
            let mut xn = x;
            for j in 0..6 {
                xn[j] -= lambda * step[j];
            }
            match newton_residual(t, &xn) {
                Ok(fn_) => {
                    let nn = norm6(&fn_);
                    if nn < fnorm || nn < TOL_NEWTON {
                        x = xn;
                        f = fn_;
                        fnorm = nn;
                        accepted = true;
                        break;
                    }
                }
                // recoverable trial-point failures: reject the step
                Err(Error::EndpointCollision { .. })
                | Err(Error::QuadratureFailure { .. })
                | Err(Error::DegeneratePeriodRatio { .. }) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iters: iter + 1, residual: fnorm });
        }
    }
    if fnorm < TOL_NEWTON {
        finish_solution(t, &x, fnorm)
    } else {
        Err(Error::NoConvergence { iters: MAX_ITER, residual: fnorm })
    }
}

fn finish_solution(t: Complex64, x: &[f64; 6], fnorm: f64) -> Result<TwoCutSolution> {
    let a = Complex64::new(x[0], x[1]);
    let b = Complex64::new(x[2], x[3]);
    let c = Complex64::new(x[4], x[5]);
    let d = -a - b - c;
    let mut sol = TwoCutSolution::new(a, b, c, d).canonicalize();
    sol.r = compute_r(&sol, t)?;
    sol.residual_norm = fnorm;
    Ok(sol)
}

fn solve6(a: &[[f64; 6]; 6], rhs: &[f64; 6]) -> Option<[f64; 6]> {
    let mut m = *a;
    let mut b = *rhs;
    for col in 0..6 {
        let piv = (col..6).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(piv, col);
        b.swap(piv, col);
        for row in (col + 1)..6 {
            let f = m[row][col] / m[col][col];
            for c in col..6 {
                m[row][c] -= f * m[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 6];
    for row in (0..6).rev() {
        let mut acc = b[row];
        for c in (row + 1)..6 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Candidate two-cut initial guesses for a cut that splits at the double
/// root alpha = -beta of a one-cut solution: the old endpoints keep their
/// cuts and the nascent pair opens across alpha along a level-line axis.
///
/// Candidates come in a ladder of gap widths: the nominal eps first, then
/// wider openings (the true nascent gap right after a splitting is O(0.1)
/// and the period system is log-stiff below it).
pub fn split_seeds(onecut: &OneCutSolution, eps: f64) -> Vec<TwoCutSolution> {
    let alpha = -onecut.beta;
    let mut dirs = vec![(onecut.b - onecut.a).arg()];
    dirs.push(dirs[0] + std::f64::consts::FRAC_PI_2);
    let mut out = Vec::new();
    for width in seed_widths(eps) {
        for &theta in &dirs {
            let off = width * Complex64::from_polar(1.0, theta);
            // nascent gap along the old cut axis: (a, alpha-off), (alpha+off, b)
            out.push(TwoCutSolution::new(onecut.a, alpha - off, alpha + off, onecut.b));
            out.push(TwoCutSolution::new(onecut.a, alpha + off, alpha - off, onecut.b));
        }
    }
    out
}

/// Candidate guesses for a cut born at a distance: the existing cut stays
/// (a, b) and a conjugate-style pair opens around alpha away from it.
pub fn birth_seeds(onecut: &OneCutSolution, eps: f64) -> Vec<TwoCutSolution> {
    let alpha = -onecut.beta;
    let base = (onecut.b - onecut.a).arg();
    let mut out = Vec::new();
    for width in seed_widths(eps) {
        for theta in [base, base + std::f64::consts::FRAC_PI_2] {
            let off = width * Complex64::from_polar(1.0, theta);
            out.push(TwoCutSolution::new(onecut.a, onecut.b, alpha - off, alpha + off));
        }
    }
    out
}

fn seed_widths(eps: f64) -> Vec<f64> {
    let mut widths = vec![eps];
    for w in [0.03, 0.08, 0.15] {
        if (w - eps).abs() > 1e-12 {
            widths.push(w);
        }
    }
    widths
}

/// Continuation along a list of t values, each step seeded by the previous
/// solution, with adaptive step halving on failure.
pub fn continue_in_t(path: &[Complex64], seed: &TwoCutSolution) -> Result<Vec<TwoCutSolution>> {
    if path.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(path.len());
    let mut current = *seed;
    let mut t_prev: Option<Complex64> = None;
    for &t_target in path {
        match t_prev {
            None => {
                current = newton_solve(t_target, &current)?;
            }
            Some(t0) => {
                current = continue_step(t0, t_target, &current)?;
            }
        }
        out.push(current);
        t_prev = Some(t_target);
    }
    Ok(out)
}

fn continue_step(t0: Complex64, t1: Complex64, seed: &TwoCutSolution) -> Result<TwoCutSolution> {
    let mut t_cur = t0;
    let mut sol = *seed;
    let mut frac = 1.0f64;
    while (t_cur - t1).norm() > 0.0 {
        let t_try = t_cur + (t1 - t_cur) * frac.min(1.0);
        match newton_solve(t_try, &sol) {
            Ok(next) => {
                sol = next;
                t_cur = t_try;
                frac = (frac * 2.0).min(1.0);
            }
            Err(Error::NoConvergence { .. })
            | Err(Error::EndpointCollision { .. })
            | Err(Error::QuadratureFailure { .. })
            | Err(Error::DegeneratePeriodRatio { .. })
            | Err(Error::SingularJacobian) => {
                frac *= 0.5;
                if frac * (t1 - t_cur).norm() < MIN_STEP {
                    return Err(Error::ContinuationStalled { at: t_cur, min_step: MIN_STEP });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onecut::solve_cubic_branch;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Solve the first two-cut configuration past the real-axis splitting.
    fn solved_at(t_re: f64) -> TwoCutSolution {
        let onecut = solve_cubic_branch(c64(-1.02, 0.0), 0).unwrap();
        let seeds = split_seeds(&onecut, 1e-3);
        let first = seeds
            .iter()
            .find_map(|s| newton_solve(c64(-1.02, 0.0), s).ok())
            .expect("no split seed converged at t = -1.02");
        if (t_re + 1.02).abs() < 1e-12 {
            return first;
        }
        let mut path = Vec::new();
        let steps = ((t_re + 1.02).abs() / 0.04).ceil() as usize;
        for k in 1..=steps {
            path.push(c64(-1.02 + (t_re + 1.02) * k as f64 / steps as f64, 0.0));
        }
        let sols = continue_in_t(&path, &first).unwrap();
        *sols.last().unwrap()
    }

    #[test]
    fn splitting_seed_converges_symmetric() {
        let sol = solved_at(-1.02);
        assert!(sol.residual_norm < TOL_NEWTON);
        // conjugate-closed endpoint set
        let eps = 1e-8;
        for e in sol.endpoints() {
            let has_conj = sol.endpoints().iter().any(|f| (f.conj() - e).norm() < eps);
            assert!(has_conj, "endpoint {e} has no conjugate partner");
        }
        // e1 = 0
        let (e1, ..) = elementary_symmetric(&sol.endpoints());
        assert!(e1.norm() < 1e-10);
    }

    #[test]
    fn continuation_to_minus_one_point_five() {
        let sol = solved_at(-1.5);
        assert!(sol.residual_norm < TOL_NEWTON);
        let res = residual(c64(-1.5, 0.0), &sol).unwrap();
        let norm: f64 = res.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm < 1e-9, "full residual at t=-1.5: {norm}");
        // endpoint motion along the path stays continuous
        let again = solved_at(-1.46);
        for (p, q) in sol.endpoints().iter().zip(again.endpoints()) {
            assert!((p - q).norm() < 0.4, "endpoint jumped: {p} vs {q}");
        }
    }

    #[test]
    fn residual_vanishes_at_one_cut_limit_algebraically() {
        // with c = d = -beta and a, b = beta -+ delta the three algebraic
        // equations reduce to the one-cut system
        let t = c64(-0.7, 0.0);
        let oc = solve_cubic_branch(t, 0).unwrap();
        let e = [oc.a, oc.b, -oc.beta, -oc.beta];
        let (e1, e2, e3, _) = elementary_symmetric(&e);
        assert!(e1.norm() < 1e-12);
        assert!((e2 + 2.0 * t).norm() < 1e-12);
        assert!((e3 - 4.0).norm() < 1e-12);
    }

    #[test]
    fn residual_perturbation_is_linear() {
        let sol = solved_at(-1.1);
        let t = c64(-1.1, 0.0);
        let base = residual(t, &sol).unwrap();
        let h = 1e-6;
        let mut pert = sol;
        pert.a += c64(h, 0.0);
        let shifted = residual(t, &pert).unwrap();
        // d(e3)/da = bc + bd + cd
        let slope = (sol.b * sol.c + sol.b * sol.d + sol.c * sol.d).norm();
        let de3 = c64(shifted[0] - base[0], shifted[1] - base[1]).norm();
        assert!(
            (de3 / h / slope - 1.0).abs() < 1e-3,
            "observed slope {} vs |de3/da| {}",
            de3 / h,
            slope
        );
    }

    #[test]
    fn hermitian_real_configuration_gives_zero_r() {
        // real endpoints, real t: the period formula must return r = 0
        let s5 = 5f64.sqrt();
        let sol = TwoCutSolution::new(c64(-s5, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(s5, 0.0));
        let r = compute_r(&sol, c64(-1.0, 0.0)).unwrap();
        assert!(r.abs() < 1e-8, "hermitian r = {r}");
    }

    #[test]
    fn r_agrees_with_period_system_route() {
        // (monster2) against the general linear-system route at t = -1.1
        let t = c64(-1.1, 0.0);
        let sol = solved_at(-1.1);
        let rad = sol.radical().unwrap();
        let w = crate::onecut::cubic_potential(t);
        let r_system = crate::abelian::solve_r(&rad, &w).unwrap();
        assert_eq!(r_system.len(), 1);
        assert!(
            (sol.r - r_system[0]).abs() < 1e-6,
            "period-constant routes disagree: {} vs {}",
            sol.r,
            r_system[0]
        );
        // and the intrinsic endpoint equations hold with that r
        let ce = crate::abelian::ce_residual(&rad, &w, &[sol.r]).unwrap();
        for (i, v) in ce.iter().enumerate() {
            assert!(v.norm() < 1e-6, "ce residual {i}: {v}");
        }
    }

    #[test]
    fn charges_sum_to_unity() {
        let sol = solved_at(-1.1);
        let q = cut_charges(&sol).unwrap();
        assert!((q[0] + q[1] - 1.0).abs() < 1e-6, "charges {q:?}");
        assert!(q[0] > 0.0 && q[1] > 0.0);
    }

    #[test]
    fn gap_period_is_purely_imaginary_at_solution() {
        let sol = solved_at(-1.2);
        let gap = gap_y_integral(&sol).unwrap();
        assert!(gap.re.abs() < 1e-9, "Re int_b^c y = {}", gap.re);
        assert!((gap.im - sol.r).abs() < 1e-9);
    }

    #[test]
    fn symmetric_a_period_has_definite_type() {
        // conjugate-closed configuration: A0 is purely real or purely
        // imaginary (conjugation maps the discretized sum onto +-itself)
        let sol = solved_at(-1.1);
        let (a0, _) = cubic_periods(&sol, 0).unwrap();
        let re_small = a0.re.abs() < 1e-8 * a0.norm();
        let im_small = a0.im.abs() < 1e-8 * a0.norm();
        assert!(re_small || im_small, "A0 = {a0} is neither purely real nor imaginary");
    }

    #[test]
    fn nearly_merged_pair_grows_logarithmically() {
        // |A0| ~ -log(gap) as c and d merge: successive halvings of the gap
        // change |A0| by a constant increment
        let mut increments = Vec::new();
        let mut prev: Option<f64> = None;
        for k in 0..5 {
            let kappa = 0.02 / 2f64.powi(k);
            let sol = TwoCutSolution::new(
                c64(-1.8, -0.9),
                c64(-0.3, -0.05),
                c64(0.7, -kappa),
                c64(0.7, kappa),
            );
            let (a0, _) = cubic_periods(&sol, 0).unwrap();
            if let Some(p) = prev {
                increments.push(a0.norm() - p);
            }
            prev = Some(a0.norm());
        }
        let mean: f64 = increments.iter().sum::<f64>() / increments.len() as f64;
        for inc in &increments {
            assert!(
                (inc - mean).abs() < 0.05 * mean.abs().max(0.1),
                "increments not constant: {increments:?}"
            );
        }
    }

    #[test]
    fn periods_converge_under_tolerance_refinement() {
        let sol = solved_at(-1.1);
        let rad = sol.radical().unwrap();
        let one = |_: Complex64| c64(1.0, 0.0);
        let coarse = gap_integral_over_w(&rad, 0, &one, 1e-9).unwrap();
        let fine = gap_integral_over_w(&rad, 0, &one, 1e-12).unwrap();
        assert!((coarse - fine).norm() < 1e-9);
        let r1 = compute_r(&sol, c64(-1.1, 0.0)).unwrap();
        let r2 = compute_r(&sol, c64(-1.1, 0.0)).unwrap();
        assert!((r1 - r2).abs() < 1e-12, "r not deterministic");
    }


    #[test]
    fn solved_curve_asymptotics_and_surface_identity() {
        let t = c64(-1.1, 0.0);
        let sol = solved_at(-1.1);
        let w = crate::onecut::cubic_potential(t);
        let rad = sol.radical().unwrap();
        let curve = crate::algebra::SpectralCurve::from_potential(&w, rad.clone());
        // y = z^2 - t - 2/z + O(z^-2): cancellation-free residual decays ~1/z
        let r3 = curve.asymptotic_residual(&w, c64(0.7e3, 0.7e3)).norm();
        let r4 = curve.asymptotic_residual(&w, c64(0.7e4, 0.7e4)).norm();
        assert!(r4 < 1e-3, "asymptotic residual at 1e4: {r4}");
        assert!((r3 / r4 / 10.0 - 1.0).abs() < 0.05, "decay ratio {}", r3 / r4);
        // y(z) w(z) = 2 sum t_n P_n + 2 i r p_1 at sample points
        for z in [c64(2.5, 1.0), c64(-1.8, 0.6), c64(0.3, -2.2)] {
            let d = crate::abelian::eep_defect(&rad, &w, &[sol.r], z).unwrap();
            let scale = curve.y_squared().eval(z).norm().sqrt().max(1.0);
            assert!(d.norm() < 1e-6 * scale, "surface identity defect {d} at {z}");
        }
    }

    #[test]
    fn closed_loop_returns_to_start() {
        let start = solved_at(-1.2);
        let n = 8;
        let mut path = Vec::new();
        for k in 1..=4 * n {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / (4 * n) as f64;
            path.push(c64(-1.2, 0.0) + 0.06 * c64(ang.cos(), ang.sin()));
        }
        path.push(c64(-1.2, 0.0));
        let sols = continue_in_t(&path, &start).unwrap();
        let last = sols.last().unwrap();
        for (p, q) in last.endpoints().iter().zip(start.endpoints()) {
            assert!((p - q).norm() < 1e-6, "loop did not close: {p} vs {q}");
        }
    }
}
