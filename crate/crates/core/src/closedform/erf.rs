//! Error function by power series, real and complex.
//!
//! Both series are summed with Neumaier's compensated summation. Arguments
//! are limited to `|x| <= 6`, where the series stay well conditioned.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported `|x|`.
pub const ERF_MAX_ARG: f64 = 6.0;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_TERMS: usize = 1000;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// `erf(x)` for real `|x| <= 6`, absolute error below `1e-14`.
///
/// Uses `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum 2^n x^(2n+1) / (2n+1)!!`,
/// whose terms share one sign, so there is no cancellation to compensate.
pub fn erf_real(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > ERF_MAX_ARG {
        return Err(Error::OutOfRange(x));
    }
    if x < 0.0 {
        return erf_real(-x).map(|v| -v);
    }
    let x2 = x * x;
    let mut term = x;
    let mut acc = Neumaier::default();
    for n in 0..MAX_TERMS {
        acc.add(term);
        term *= 2.0 * x2 / (2 * n + 3) as f64;
        if term <= f64::EPSILON * 1e-2 * acc.total() {
            break;
        }
    }
    Ok(FRAC_2_SQRT_PI * (-x2).exp() * acc.total())
}

/// `erf(z)` for complex `|z| <= 6`.
///
/// When `Re z^2 >= 0` the scaled series of [`erf_real`] is used; otherwise
/// the Maclaurin series, which then loses fewer digits to cancellation.
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > ERF_MAX_ARG {
        return Err(Error::OutOfRange(z.norm()));
    }
    let z2 = z * z;
    let mut acc = ComplexNeumaier::default();
    if z2.re >= 0.0 {
        let mut term = z;
        for n in 0..MAX_TERMS {
            acc.add(term);
            term *= 2.0 * z2 / (2 * n + 3) as f64;
            if n as f64 > 2.0 * z2.norm() && term.norm() <= f64::EPSILON * 1e-2 * acc.total().norm() {
                break;
            }
        }
        Ok(FRAC_2_SQRT_PI * (-z2).exp() * acc.total())
    } else {
        // z^(2n+1) (-1)^n / n!, divided by (2n+1) when added.
        let mut power = z;
        for n in 0..MAX_TERMS {
            let term = power / (2 * n + 1) as f64;
            acc.add(term);
            power *= -z2 / (n + 1) as f64;
            if n as f64 > z2.norm() && term.norm() <= f64::EPSILON * 1e-2 * acc.total().norm() {
                break;
            }
        }
        Ok(FRAC_2_SQRT_PI * acc.total())
    }
}

/// `erf'(z) = 2/sqrt(pi) * exp(-z^2)`.
pub fn erf_derivative(z: Complex64) -> Complex64 {
    FRAC_2_SQRT_PI * (-z * z).exp()
}
