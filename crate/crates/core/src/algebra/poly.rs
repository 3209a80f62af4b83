use num_complex::Complex64;

/// Polynomial with complex coefficients, stored in ascending degree.
///
/// The coefficient list is kept trimmed: the leading coefficient is nonzero
/// unless the polynomial is identically zero (empty list).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(Complex64::new(1.0, 0.0))
    }

    /// x^k
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        while let Some(c) = coeffs.last() {
            if c.norm() == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial { coeffs }
    }

    pub fn from_real_coeffs(coeffs: &[f64]) -> Self {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Polynomial::one();
        for &r in roots {
            p = p.mul(&Polynomial::from_coeffs(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Polynomial::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Polynomial::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Polynomial::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Polynomial::from_coeffs(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// Coefficient-wise complex conjugation (matches p(conj z) = conj(p(z))).
    pub fn conj(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All roots (with multiplicity) by Durand-Kerner iteration with Newton
    /// polish. Intended for the low-degree polynomials of this crate.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        if deg == 1 {
            return vec![-monic[0]];
        }
        if deg == 2 {
            let (c, b) = (monic[0], monic[1]);
            let disc = (b * b - 4.0 * c).sqrt();
            return vec![(-b + disc) / 2.0, (-b - disc) / 2.0];
        }
        // root-radius estimate: all roots lie within 2 max_k |c_{d-k}|^(1/k)
        let radius = (1..=deg)
            .map(|k| monic[deg - k].norm().powf(1.0 / k as f64))
            .fold(0.0, f64::max)
            .max(0.5)
            * 2.0;
        let mut zs: Vec<Complex64> = (0..deg)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
                0.7 * radius * Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        let eval_monic = |z: Complex64| -> Complex64 {
            let mut acc = Complex64::new(1.0, 0.0);
            for &c in monic.iter().take(deg).rev() {
                acc = acc * z + c;
            }
            acc
        };
        for _ in 0..600 {
            let mut max_step = 0.0f64;
            for i in 0..deg {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..deg {
                    if i != j {
                        den *= zs[i] - zs[j];
                    }
                }
                if den.norm() == 0.0 {
                    continue;
                }
                let step = eval_monic(zs[i]) / den;
                zs[i] -= step;
                max_step = max_step.max(step.norm());
            }
            if max_step < 1e-13 * radius {
                break;
            }
        }
        // Newton polish
        let deriv = self.derivative();
        for z in zs.iter_mut() {
            for _ in 0..3 {
                let d = deriv.eval(*z);
                if d.norm() > 0.0 {
                    *z -= self.eval(*z) / d;
                }
            }
        }
        zs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_leading_zeros() {
        let p = Polynomial::from_coeffs(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Polynomial::from_coeffs(vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn mul_and_eval_agree() {
        let p = Polynomial::from_coeffs(vec![c(1.0, 0.0), c(2.0, -1.0)]);
        let q = Polynomial::from_coeffs(vec![c(-3.0, 0.5), c(0.0, 0.0), c(1.0, 0.0)]);
        let z = c(0.7, -0.3);
        assert!((p.mul(&q).eval(z) - p.eval(z) * q.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn roots_of_cubic() {
        let roots = [c(1.0, 0.0), c(-2.0, 0.5), c(0.0, -1.0)];
        let p = Polynomial::from_roots(&roots);
        let mut found = p.roots();
        for r in roots {
            let i = found
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - r).norm().partial_cmp(&(b.1 - r).norm()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            assert!((found[i] - r).norm() < 1e-10);
            found.remove(i);
        }
    }
}
