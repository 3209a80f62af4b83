//! Complex-polynomial arithmetic, branch-consistent square roots, Laurent
//! expansion at infinity, and the nonnegative-power projection that underlies
//! the endpoint equations.

mod curve;
mod poly;
mod radical;
mod series;

pub use curve::SpectralCurve;
pub use poly::Polynomial;
pub use radical::{eval_w, laurent_at_infinity, oplus_part, BranchedRadical};
pub use series::LaurentSeries;

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Small deterministic generator for sample points.
    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn next_complex(&mut self, scale: f64) -> Complex64 {
            c(
                (self.next_f64() * 2.0 - 1.0) * scale,
                (self.next_f64() * 2.0 - 1.0) * scale,
            )
        }
    }

    #[test]
    fn gaussian_branch_values() {
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        // real z beyond the cut: positive square root of z^2 - 4
        let w3 = rad.eval(c(3.0, 0.0)).unwrap();
        assert!((w3 - c(5f64.sqrt(), 0.0)).norm() < 1e-14);
        // midpoint approached from above: w = 2i, so y(z_+) = i |z^2 - 4|^(1/2)
        let w0 = rad.eval(c(0.0, 1e-9)).unwrap();
        assert!((w0 - c(0.0, 2.0)).norm() < 1e-8);
        assert!((rad.eval_plus(0, 0.0) - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn eval_near_branch_point_errors() {
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!(rad.eval(c(2.0, 1e-12)).is_err());
    }

    /// Independent oracle: truncated binomial series of
    /// sqrt((z-beta)^2 - delta^2) at infinity.
    fn binomial_series_oracle(beta: Complex64, delta2: Complex64, z: Complex64) -> Complex64 {
        let zb = z - beta;
        let ratio = delta2 / (zb * zb);
        let mut term = c(1.0, 0.0);
        let mut sum = c(1.0, 0.0);
        for k in 0..60u32 {
            // C(1/2, k+1)/C(1/2, k) = (1/2 - k)/(k + 1)
            let factor = (0.5 - k as f64) / (k as f64 + 1.0);
            term = term * factor * (-ratio);
            sum += term;
        }
        zb * sum
    }

    #[test]
    fn conjugate_pair_matches_series_oracle() {
        let a = c(-1.0, -2f64.sqrt());
        let b = c(-1.0, 2f64.sqrt());
        let rad = BranchedRadical::one_cut(a, b).unwrap();
        let beta = c(-1.0, 0.0);
        let delta2 = (b - a) / 2.0 * ((b - a) / 2.0);
        let z = c(10.0, 0.0);
        let got = rad.eval(z).unwrap();
        let want = binomial_series_oracle(beta, delta2, z);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn eval_squares_back_to_product() {
        let rad = BranchedRadical::new(vec![
            (c(-2.0, 0.1), c(-0.5, 0.3)),
            (c(0.8, -0.4), c(2.0, 0.2)),
        ])
        .unwrap();
        let prod_poly = Polynomial::from_roots(&rad.endpoints());
        let mut gen = Lcg(7);
        let mut checked = 0;
        while checked < 100 {
            let z = gen.next_complex(4.0);
            let w = match rad.eval(z) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let want = prod_poly.eval(z);
            assert!(
                (w * w - want).norm() <= 1e-12 * want.norm().max(1.0),
                "w^2 mismatch at {z}"
            );
            checked += 1;
        }
    }

    #[test]
    fn branch_continuity_on_even_loops() {
        let rad = BranchedRadical::new(vec![
            (c(-2.0, 0.0), c(-1.0, 0.0)),
            (c(1.0, 0.0), c(2.0, 0.0)),
        ])
        .unwrap();
        // loop enclosing both endpoints of pair 2 (even count): w returns
        let n = 200;
        let center = c(1.5, 0.0);
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + 0.8 * c(ang.cos(), ang.sin())
            })
            .collect();
        let start = rad.eval(path[0]).unwrap();
        let looped = rad.continue_along(&path).unwrap();
        assert!((looped - start).norm() < 1e-10);
        // loop enclosing a single endpoint (odd): w flips sign
        let center = c(2.0, 0.0);
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + 0.5 * c(ang.cos(), ang.sin())
            })
            .collect();
        let start = rad.eval(path[0]).unwrap();
        let looped = rad.continue_along(&path).unwrap();
        assert!((looped + start).norm() < 1e-10);
    }

    #[test]
    fn eval_with_hint_agrees_off_the_cuts() {
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        let z = c(0.5, 1.5);
        let direct = rad.eval(z).unwrap();
        let hinted = eval_w(&rad, z, Some(&[c(5.0, 5.0)])).unwrap();
        assert!((direct - hinted).norm() < 1e-10);
    }

    #[test]
    fn laurent_of_z_over_gaussian_w() {
        // z/w = 1 + 2 z^-2 + 6 z^-4 + 20 z^-6 + ... (central binomials)
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        let s = laurent_at_infinity(&Polynomial::monomial(1), &rad, 8);
        assert!((s.coeff(0) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(s.coeff(-1).norm() < 1e-14);
        assert!((s.coeff(-2) - c(2.0, 0.0)).norm() < 1e-13);
        assert!((s.coeff(-4) - c(6.0, 0.0)).norm() < 1e-13);
        assert!((s.coeff(-6) - c(20.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn laurent_of_cubic_numerator() {
        // (z^2 - t)/w over one cut: z + beta + (beta^2 + delta^2/2 - t) z^-1 + ...
        let beta = c(0.3, -0.2);
        let delta = c(0.9, 0.4);
        let t = c(0.25, 0.75);
        let rad = BranchedRadical::one_cut(beta - delta, beta + delta).unwrap();
        let num = Polynomial::from_coeffs(vec![-t, c(0.0, 0.0), c(1.0, 0.0)]);
        let s = laurent_at_infinity(&num, &rad, 6);
        assert!((s.coeff(1) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((s.coeff(0) - beta).norm() < 1e-13);
        let want = beta * beta + delta * delta / 2.0 - t;
        assert!((s.coeff(-1) - want).norm() < 1e-13);
    }

    #[test]
    fn laurent_of_zero_numerator() {
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        let s = laurent_at_infinity(&Polynomial::zero(), &rad, 5);
        for p in (-5..=0).rev() {
            assert_eq!(s.coeff(p), c(0.0, 0.0));
        }
    }

    #[test]
    fn oplus_projections() {
        // Gaussian: (z/w)_+ = 1
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        let h = oplus_part(&Polynomial::monomial(1), &rad);
        assert_eq!(h.degree(), Some(0));
        assert!((h.coeff(0) - c(1.0, 0.0)).norm() < 1e-14);

        // cubic one-cut: ((z^2 - t)/w)_+ = z + beta
        let beta = c(-1.0, 0.0);
        let delta = c(0.0, 2f64.sqrt());
        let t = c(0.0, 0.0);
        let rad = BranchedRadical::one_cut(beta - delta, beta + delta).unwrap();
        let num = Polynomial::from_coeffs(vec![-t, c(0.0, 0.0), c(1.0, 0.0)]);
        let h = oplus_part(&num, &rad);
        assert_eq!(h.degree(), Some(1));
        assert!((h.coeff(1) - c(1.0, 0.0)).norm() < 1e-13);
        assert!((h.coeff(0) - beta).norm() < 1e-13);

        // two cuts: the same numerator projects to the constant 1
        let rad = BranchedRadical::new(vec![
            (c(-1.5, -0.2), c(-0.5, -0.1)),
            (c(0.5, 0.1), c(1.5, 0.2)),
        ])
        .unwrap();
        let h = oplus_part(&num, &rad);
        assert_eq!(h.degree(), Some(0));
        assert!((h.coeff(0) - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn oplus_remainder_decays_like_one_over_z() {
        let rad = BranchedRadical::new(vec![
            (c(-2.0, 0.3), c(-1.0, 0.0)),
            (c(1.0, -0.3), c(2.2, 0.1)),
        ])
        .unwrap();
        let num = Polynomial::from_coeffs(vec![c(0.5, 0.5), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]);
        let proj = oplus_part(&num, &rad);
        let rem = |z: Complex64| num.eval(z) / rad.eval_unchecked(z) - proj.eval(z);
        let r3 = rem(c(1e3, 0.4e3)).norm();
        let r4 = rem(c(1e4, 0.4e4)).norm();
        assert!(r3 < 1e-2, "remainder not small at 1e3: {r3}");
        let decay = r3 / r4;
        assert!((decay / 10.0 - 1.0).abs() < 0.05, "decay ratio {decay} not ~ 10");
    }

    #[test]
    fn spectral_curve_gaussian() {
        let w = Polynomial::from_real_coeffs(&[0.0, 0.0, 0.5]); // z^2/2
        let rad = BranchedRadical::one_cut(c(-2.0, 0.0), c(2.0, 0.0)).unwrap();
        let curve = SpectralCurve::from_potential(&w, rad);
        assert_eq!(curve.h().degree(), Some(0));
        // y ~ W' - 2/z at infinity
        let z = c(1e4, 1e3);
        let asy = z * (curve.y(z).unwrap() - w.derivative().eval(z)) + c(2.0, 0.0);
        assert!(asy.norm() < 1e-6, "asymptotics violated: {asy}");
    }
}
