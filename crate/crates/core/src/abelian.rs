//! Canonical Abelian differentials on the hyperelliptic surface
//! `w^2 = prod (z - a_m)(z - b_m)`, their A/B periods, the linear system for
//! the real constants r_j, and the intrinsic endpoint-equation residuals.
//!
//! Cycle realization: cuts are the chords of the endpoint pairs (in stored
//! order), A_i runs around the gap between cut i and cut i+1, and B_i crosses
//! cuts 1..=i. Periods reduce to segment integrals:
//! `A_i(dw) = 2 int_gap_i`, `B_i(dw) = -2 sum_{j<=i} int_cut_j` with the
//! plus-side boundary branch on cuts. Exact differentials (the polynomial
//! parts of the second-kind differentials) drop from closed-cycle periods.

use num_complex::Complex64;

use crate::algebra::{BranchedRadical, Polynomial};
use crate::error::{Error, Result};
use crate::quad::{integrate_param, integrate_segment_singular, TOL_QUAD};

/// First-, second- and third-kind differential data: dphi_j = p_j/w dz,
/// dOmega_k = (k/2 z^(k-1) + P_k/w) dz, dOmega_0 = P_0/w dz.
#[derive(Clone, Debug)]
pub struct DifferentialBasis {
    rad: BranchedRadical,
    /// p_j for j = 1..s-1 (degree <= s-2), A_i(dphi_j) = delta_ij.
    pub first_kind: Vec<Polynomial>,
    /// P_k for k = 1..n_max, A_i(dOmega_k) = 0.
    pub second_kind: Vec<Polynomial>,
    /// P_0, A_i(dOmega_0) = 0.
    pub third_kind: Polynomial,
}

/// B-periods of the basis differentials.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    /// B_i(dphi_j), (s-1) x (s-1).
    pub b_first_kind: Vec<Vec<Complex64>>,
    /// B_i(dOmega_n) for n = 0..n_max, row per cycle i.
    pub b_second_third: Vec<Vec<Complex64>>,
}

impl PeriodMatrix {
    /// Positive definiteness of Im B_i(dphi_j) (checked for the genus <= 1
    /// configurations in scope: every leading minor positive).
    pub fn im_b_positive_definite(&self) -> bool {
        let n = self.b_first_kind.len();
        for k in 1..=n {
            if leading_minor_det(&self.b_first_kind, k) <= 0.0 {
                return false;
            }
        }
        true
    }
}

fn leading_minor_det(m: &[Vec<Complex64>], k: usize) -> f64 {
    // real determinant of the Im part, tiny k only
    let mut a: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| m[i][j].im).collect()).collect();
    let mut det = 1.0;
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Integral of g(z)/w(z_+) along the chord of cut m, by the substitution
/// z = beta - delta cos(theta) which removes both endpoint singularities.
pub fn cut_integral_over_w<F: Fn(Complex64) -> Complex64>(
    rad: &BranchedRadical,
    m: usize,
    g: &F,
    tol: f64,
) -> Result<Complex64> {
    let beta = rad.beta(m);
    let delta = rad.delta(m);
    let i_unit = Complex64::new(0.0, 1.0);
    integrate_param(
        &|theta: f64| {
            let z = beta - delta * theta.cos();
            let rest: Complex64 = (0..rad.num_cuts())
                .filter(|&k| k != m)
                .map(|k| rad.pair_factor(k, z))
                .product();
            g(z) / (i_unit * rest)
        },
        0.0,
        std::f64::consts::PI,
        tol,
    )
}

/// Integral of g(z) w(z_+) along the chord of cut m (same substitution).
pub fn cut_integral_times_w<F: Fn(Complex64) -> Complex64>(
    rad: &BranchedRadical,
    m: usize,
    g: &F,
    tol: f64,
) -> Result<Complex64> {
    let beta = rad.beta(m);
    let delta = rad.delta(m);
    let i_unit = Complex64::new(0.0, 1.0);
    integrate_param(
        &|theta: f64| {
            let z = beta - delta * theta.cos();
            let rest: Complex64 = (0..rad.num_cuts())
                .filter(|&k| k != m)
                .map(|k| rad.pair_factor(k, z))
                .product();
            let s = theta.sin();
            g(z) * i_unit * delta * delta * s * s * rest
        },
        0.0,
        std::f64::consts::PI,
        tol,
    )
}

/// Straight gap segment between cut i and cut i+1 (0-based i).
pub fn gap_segment(rad: &BranchedRadical, i: usize) -> (Complex64, Complex64) {
    (rad.pairs()[i].1, rad.pairs()[i + 1].0)
}

/// Integral of g(z)/w(z) along gap i (w is continuous there; endpoint
/// square-root singularities are regularized).
pub fn gap_integral_over_w<F: Fn(Complex64) -> Complex64>(
    rad: &BranchedRadical,
    i: usize,
    g: &F,
    tol: f64,
) -> Result<Complex64> {
    let (z0, z1) = gap_segment(rad, i);
    integrate_segment_singular(&|z| g(z) / rad.eval_unchecked(z), z0, z1, true, true, tol)
}

/// Integral of g(z) w(z) along gap i (w vanishes like a square root at both
/// segment ends).
pub fn gap_integral_times_w<F: Fn(Complex64) -> Complex64>(
    rad: &BranchedRadical,
    i: usize,
    g: &F,
    tol: f64,
) -> Result<Complex64> {
    let (z0, z1) = gap_segment(rad, i);
    integrate_segment_singular(&|z| g(z) * rad.eval_unchecked(z), z0, z1, true, true, tol)
}

/// A-period of num(z)/w(z) dz over cycle i (1-based, 1 <= i <= s-1).
pub fn a_period(rad: &BranchedRadical, num: &Polynomial, cycle_index: usize) -> Result<Complex64> {
    let s = rad.num_cuts();
    if cycle_index == 0 || cycle_index >= s {
        return Err(Error::InvalidInput(format!(
            "cycle index {cycle_index} out of range 1..={}",
            s - 1
        )));
    }
    Ok(2.0 * gap_integral_over_w(rad, cycle_index - 1, &|z| num.eval(z), TOL_QUAD)?)
}

/// B-period of num(z)/w(z) dz over cycle i: -2 sum_{j<=i} cut integrals.
pub fn b_period(rad: &BranchedRadical, num: &Polynomial, cycle_index: usize) -> Result<Complex64> {
    let s = rad.num_cuts();
    if cycle_index == 0 || cycle_index > s {
        return Err(Error::InvalidInput(format!(
            "cycle index {cycle_index} out of range 1..={s}"
        )));
    }
    let mut acc = Complex64::default();
    for j in 0..cycle_index {
        acc += cut_integral_over_w(rad, j, &|z| num.eval(z), TOL_QUAD)?;
    }
    Ok(-2.0 * acc)
}

/// (z^(k-1) w)_+ as a polynomial, from the exact series of w.
fn shifted_w_oplus(rad: &BranchedRadical, k_minus_1: i64) -> Polynomial {
    let w_series = rad.series(-(k_minus_1.abs()) - 2);
    w_series.shift(k_minus_1).oplus()
}

/// Build the canonical differential basis for the given endpoints, with
/// second-kind differentials up to k = n_max.
pub fn build_basis(rad: &BranchedRadical, n_max: usize) -> Result<DifferentialBasis> {
    let s = rad.num_cuts();
    let g = s - 1; // genus
    // Gram matrix of A-periods of the monomial differentials z^j/w dz
    let mut gram = vec![vec![Complex64::default(); g]; g];
    for (i, row) in gram.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a_period(rad, &Polynomial::monomial(j), i + 1)?;
        }
    }
    let solve = |rhs: &[Complex64]| -> Result<Vec<Complex64>> {
        solve_complex_system(&gram, rhs)
    };
    // first kind: A_i(dphi_j) = delta_ij
    let mut first_kind = Vec::with_capacity(g);
    for j in 0..g {
        let mut rhs = vec![Complex64::default(); g];
        rhs[j] = Complex64::new(1.0, 0.0);
        let c = solve(&rhs)?;
        first_kind.push(Polynomial::from_coeffs(c));
    }
    // second kind: P_k = (k/2)(z^(k-1) w)_+ + sum c_ki z^i with A_i(dOmega_k) = 0
    let mut second_kind = Vec::with_capacity(n_max);
    for k in 1..=n_max {
        let base = shifted_w_oplus(rad, k as i64 - 1).scale(Complex64::new(k as f64 / 2.0, 0.0));
        let p = normalize_against_a_periods(rad, base, &solve)?;
        second_kind.push(p);
    }
    // third kind: P_0 = (z^-1 w)_+ + sum c_0i z^i
    let base0 = shifted_w_oplus(rad, -1);
    let third_kind = normalize_against_a_periods(rad, base0, &solve)?;
    Ok(DifferentialBasis {
        rad: rad.clone(),
        first_kind,
        second_kind,
        third_kind,
    })
}

fn normalize_against_a_periods(
    rad: &BranchedRadical,
    base: Polynomial,
    solve: &dyn Fn(&[Complex64]) -> Result<Vec<Complex64>>,
) -> Result<Polynomial> {
    let g = rad.num_cuts() - 1;
    if g == 0 {
        return Ok(base);
    }
    let mut rhs = vec![Complex64::default(); g];
    for (i, r) in rhs.iter_mut().enumerate() {
        *r = -a_period(rad, &base, i + 1)?;
    }
    let c = solve(&rhs)?;
    Ok(base.add(&Polynomial::from_coeffs(c)))
}

/// Gaussian elimination for the small complex Gram systems, with a crude
/// condition estimate from the pivot ratio.
fn solve_complex_system(a: &[Vec<Complex64>], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m: Vec<Vec<Complex64>> = a.iter().map(|r| r.clone()).collect();
    let mut b = rhs.to_vec();
    let mut piv_max = 0.0f64;
    let mut piv_min = f64::INFINITY;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        let pval = m[piv][col].norm();
        piv_max = piv_max.max(pval);
        piv_min = piv_min.min(pval);
        if pval == 0.0 || piv_max / pval > 1e12 {
            return Err(Error::IllConditionedPeriods { cond: if pval == 0.0 { f64::INFINITY } else { piv_max / pval } });
        }
        m.swap(piv, col);
        b.swap(piv, col);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                let sub = f * m[col][c];
                m[row][c] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let _ = piv_min;
    let mut x = vec![Complex64::default(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

impl DifferentialBasis {
    pub fn radical(&self) -> &BranchedRadical {
        &self.rad
    }

    /// B-periods of all basis differentials. Polynomial (exact) parts of the
    /// second-kind differentials have zero period over closed cycles and are
    /// omitted.
    pub fn period_matrix(&self) -> Result<PeriodMatrix> {
        let g = self.rad.num_cuts() - 1;
        let mut b_first_kind = Vec::with_capacity(g);
        let mut b_second_third = Vec::with_capacity(g);
        for i in 1..=g {
            let row_f: Result<Vec<Complex64>> = self
                .first_kind
                .iter()
                .map(|p| b_period(&self.rad, p, i))
                .collect();
            b_first_kind.push(row_f?);
            let mut row_o = vec![b_period(&self.rad, &self.third_kind, i)?];
            for p in &self.second_kind {
                row_o.push(b_period(&self.rad, p, i)?);
            }
            b_second_third.push(row_o);
        }
        Ok(PeriodMatrix { b_first_kind, b_second_third })
    }
}

/// Solve the linear system
/// `sum_j r_j Im B_i(dphi_j) = Re(sum_n t_n B_i(dOmega_n))` for the real
/// constants r_j, with t_0 = -1 and t_n the coefficients of W.
pub fn solve_r(rad: &BranchedRadical, potential: &Polynomial) -> Result<Vec<f64>> {
    let s = rad.num_cuts();
    if s <= 1 {
        return Ok(Vec::new());
    }
    let n_max = potential.degree().unwrap_or(0);
    let basis = build_basis(rad, n_max)?;
    let pm = basis.period_matrix()?;
    let g = s - 1;
    let mut m = vec![vec![0.0f64; g]; g];
    let mut rhs = vec![0.0f64; g];
    for i in 0..g {
        for j in 0..g {
            m[i][j] = pm.b_first_kind[i][j].im;
        }
        let mut acc = -pm.b_second_third[i][0]; // t_0 = -1 against dOmega_0
        for n in 1..=n_max {
            acc += potential.coeff(n) * pm.b_second_third[i][n];
        }
        rhs[i] = acc.re;
    }
    solve_real_system(&m, &rhs)
}

fn solve_real_system(a: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut b = rhs.to_vec();
    let mut piv_max = 0.0f64;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        let pval = m[piv][col].abs();
        piv_max = piv_max.max(pval);
        if pval == 0.0 || piv_max / pval > 1e12 {
            return Err(Error::IllConditionedPeriods {
                cond: if pval == 0.0 { f64::INFINITY } else { piv_max / pval },
            });
        }
        m.swap(piv, col);
        b.swap(piv, col);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Residuals of the intrinsic endpoint equations
/// `sum_n t_n P_n(a_j^+-) + i sum_i r_i p_i(a_j^+-)` at all 2s endpoints
/// (pair order, a before b), with t_0 = -1.
pub fn ce_residual(rad: &BranchedRadical, potential: &Polynomial, r: &[f64]) -> Result<Vec<Complex64>> {
    let n_max = potential.degree().unwrap_or(0);
    let basis = build_basis(rad, n_max)?;
    let mut out = Vec::with_capacity(2 * rad.num_cuts());
    for e in rad.endpoints() {
        let mut acc = -basis.third_kind.eval(e); // t_0 = -1
        for n in 1..=n_max {
            acc += potential.coeff(n) * basis.second_kind[n - 1].eval(e);
        }
        for (i, p) in basis.first_kind.iter().enumerate() {
            acc += Complex64::new(0.0, r[i]) * p.eval(e);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Left side minus right side of the identity
/// `y(z) w(z) = 2 sum_n t_n P_n(z) + 2 i sum_i r_i p_i(z)`, for checks.
pub fn eep_defect(
    rad: &BranchedRadical,
    potential: &Polynomial,
    r: &[f64],
    z: Complex64,
) -> Result<Complex64> {
    let n_max = potential.degree().unwrap_or(0);
    let basis = build_basis(rad, n_max)?;
    let h = crate::algebra::oplus_part(&potential.derivative(), rad);
    let w = rad.eval(z)?;
    let lhs = h.eval(z) * w * w;
    let mut rhs = -basis.third_kind.eval(z) * 2.0;
    for n in 1..=n_max {
        rhs += 2.0 * potential.coeff(n) * basis.second_kind[n - 1].eval(z);
    }
    for (i, p) in basis.first_kind.iter().enumerate() {
        rhs += 2.0 * Complex64::new(0.0, r[i]) * p.eval(z);
    }
    Ok(lhs - rhs)
}
