use num_complex::Complex64;

use super::poly::Polynomial;
use super::radical::{oplus_part, BranchedRadical};
use crate::error::Result;

/// The spectral curve y(z) = h(z) w(z) built from a potential W and a set of
/// cut endpoints, with h = (W'/w)_+ so that y ~ W' at infinity.
#[derive(Clone, Debug)]
pub struct SpectralCurve {
    rad: BranchedRadical,
    h: Polynomial,
    w_poly: Polynomial,
}

impl SpectralCurve {
    pub fn from_potential(potential: &Polynomial, rad: BranchedRadical) -> Self {
        let h = oplus_part(&potential.derivative(), &rad);
        let w_poly = Polynomial::from_roots(&rad.endpoints());
        SpectralCurve { rad, h, w_poly }
    }

    /// Directly supply the polynomial prefactor h.
    pub fn with_h(rad: BranchedRadical, h: Polynomial) -> Self {
        let w_poly = Polynomial::from_roots(&rad.endpoints());
        SpectralCurve { rad, h, w_poly }
    }

    pub fn radical(&self) -> &BranchedRadical {
        &self.rad
    }

    pub fn h(&self) -> &Polynomial {
        &self.h
    }

    /// w(z)^2 as a polynomial.
    pub fn w_squared(&self) -> &Polynomial {
        &self.w_poly
    }

    /// y^2 = h^2 w^2 as a polynomial.
    pub fn y_squared(&self) -> Polynomial {
        self.h.mul(&self.h).mul(&self.w_poly)
    }

    pub fn y(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.eval(z) * self.rad.eval(z)?)
    }

    pub fn y_unchecked(&self, z: Complex64) -> Complex64 {
        self.h.eval(z) * self.rad.eval_unchecked(z)
    }

    /// Boundary value y(z_+) on the chord of pair m at parameter x.
    pub fn y_plus(&self, m: usize, x: f64) -> Complex64 {
        self.h.eval(self.rad.chord_point(m, x)) * self.rad.eval_plus(m, x)
    }

    /// Logarithmic derivative y'/y = h'/h + (1/2) sum_e 1/(z - e).
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        let hz = self.h.eval(z);
        if hz.norm() > 0.0 {
            acc += self.h.derivative().eval(z) / hz;
        }
        for e in self.rad.endpoints() {
            acc += 0.5 / (z - e);
        }
        acc
    }

    /// Roots of y^2 with multiplicities: simple at the branch points, double
    /// at the zeros of h.
    pub fn roots_with_multiplicity(&self) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> =
            self.rad.endpoints().into_iter().map(|e| (e, 1)).collect();
        for r in self.h.roots() {
            out.push((r, 2));
        }
        out
    }

    /// Zeros of h (double roots of y^2).
    pub fn double_roots(&self) -> Vec<Complex64> {
        self.h.roots()
    }

    pub fn scale(&self) -> f64 {
        let root_scale = self
            .roots_with_multiplicity()
            .iter()
            .map(|(r, _)| r.norm())
            .fold(0.0, f64::max);
        1.0 + root_scale
    }

    /// f = y^2 - W'^2 as exact polynomial arithmetic.
    pub fn f_polynomial(&self, potential: &Polynomial) -> Polynomial {
        let wp = potential.derivative();
        self.y_squared().sub(&wp.mul(&wp))
    }

    /// z (y - W') + 2, evaluated cancellation-free through
    /// y - W' = f / (y + W'). At a solved configuration this is O(1/z).
    pub fn asymptotic_residual(&self, potential: &Polynomial, z: Complex64) -> Complex64 {
        let f = self.f_polynomial(potential);
        let y = self.y_unchecked(z);
        let wp = potential.derivative().eval(z);
        z * f.eval(z) / (y + wp) + 2.0
    }
}
