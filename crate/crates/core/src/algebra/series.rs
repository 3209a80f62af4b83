use num_complex::Complex64;

use super::poly::Polynomial;

/// Truncated Laurent expansion at infinity.
///
/// `coeffs[i]` is the coefficient of `z^(top - i)`; the expansion is valid
/// down to power `bottom() = top - (len - 1)`. Truncation depth is tracked
/// through arithmetic so that a requested coefficient is either exact or a
/// panic, never silently wrong.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    top: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    pub fn new(top: i64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "empty Laurent series");
        LaurentSeries { top, coeffs }
    }

    /// Zero series carrying coefficients down to `bottom`.
    pub fn zero_to(bottom: i64) -> Self {
        LaurentSeries { top: 0, coeffs: vec![Complex64::default(); (1 - bottom).max(1) as usize] }
    }

    pub fn from_polynomial(p: &Polynomial, bottom: i64) -> Self {
        let top = p.degree().map(|d| d as i64).unwrap_or(0);
        assert!(bottom <= top);
        let len = (top - bottom + 1) as usize;
        let coeffs = (0..len)
            .map(|i| {
                let power = top - i as i64;
                if power >= 0 {
                    p.coeff(power as usize)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        LaurentSeries { top, coeffs }
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn bottom(&self) -> i64 {
        self.top - (self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of z^power. Panics if the power is below the truncation.
    pub fn coeff(&self, power: i64) -> Complex64 {
        assert!(power >= self.bottom(), "coefficient below truncation depth");
        if power > self.top {
            return Complex64::default();
        }
        self.coeffs[(self.top - power) as usize]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let top = self.top + other.top;
        // product exact down to where one factor's truncation starts to bite
        let bottom = (self.bottom() + other.top).max(other.bottom() + self.top);
        let len = (top - bottom + 1) as usize;
        let mut coeffs = vec![Complex64::default(); len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            let pa = self.top - i as i64;
            for (j, &b) in other.coeffs.iter().enumerate() {
                let p = pa + other.top - j as i64;
                if p < bottom {
                    break;
                }
                coeffs[(top - p) as usize] += a * b;
            }
        }
        LaurentSeries { top, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let top = self.top.max(other.top);
        let bottom = self.bottom().max(other.bottom());
        assert!(bottom <= top);
        let len = (top - bottom + 1) as usize;
        let coeffs = (0..len)
            .map(|i| {
                let p = top - i as i64;
                let a = if p <= self.top && p >= self.bottom() { self.coeff(p) } else { Complex64::default() };
                let b = if p <= other.top && p >= other.bottom() { other.coeff(p) } else { Complex64::default() };
                a + b
            })
            .collect();
        LaurentSeries { top, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LaurentSeries { top: self.top, coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Multiply by z^d (exact power shift).
    pub fn shift(&self, d: i64) -> Self {
        LaurentSeries { top: self.top + d, coeffs: self.coeffs.clone() }
    }

    /// The nonnegative-power part as a polynomial.
    pub fn oplus(&self) -> Polynomial {
        if self.top < 0 {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Complex64::default(); self.top as usize + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let p = k as i64;
            if p <= self.top && p >= self.bottom() {
                *c = self.coeff(p);
            }
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// Numerical evaluation of the truncated series at z.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner in 1/z over ascending powers of 1/z, then scale by z^top
        let mut acc = Complex64::default();
        let zi = 1.0 / z;
        for &c in self.coeffs.iter().rev() {
            acc = acc * zi + c;
        }
        acc * z.powi(self.top as i32)
    }
}
