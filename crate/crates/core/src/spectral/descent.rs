//! One-variable reduction of the transfer operator for descent-closed sets.
//!
//! When `S` consists of every pattern whose descent word lies in `U`, the
//! operator maps functions that depend only on `x_1` and on the descent word
//! of `(x_1, .., x_m)` to functions of the same kind. Such a function is a
//! family `p_w(x_1)` indexed by words `w` of length `m - 1`, and the integral
//! over `[0,1]^m` reduces to `Σ_w ∫ h(w; x) p_w(x) dx` where `h(w; ·)` is the
//! slice volume of the descent polytope of `w`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::eigen::LinearOperator;
use crate::error::{Error, Result};
use crate::pattern::{DescentSet, DescentWord, Letter};

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut c = vec![BigRational::zero()];
        for (k, a) in self.coeffs.iter().enumerate() {
            c.push(a / BigRational::from_integer(BigInt::from(k + 1)));
        }
        Poly::new(c)
    }

    /// `∫_0^1`.
    pub fn integral(&self) -> BigRational {
        self.antiderivative().eval(&BigRational::one())
    }

    fn constant_minus(&self, c: BigRational) -> Poly {
        let mut coeffs: Vec<BigRational> = self.coeffs.iter().map(|a| -a).collect();
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        coeffs[0] += c;
        Poly::new(coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigRational::zero();
            let mag = if neg { -c } else { c.clone() };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                _ if unit => write!(f, "x")?,
                _ => write!(f, "{mag}*x")?,
            }
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

/// `h(u; x)`: volume of the slice `x_1 = x` of the polytope of points whose
/// consecutive comparisons follow `u` (`a` up, `b` down).
pub fn descent_h_polynomial(u: &DescentWord) -> Poly {
    let mut h = Poly::one();
    for letter in u.letters().iter().rev() {
        let g = h.antiderivative();
        h = match letter {
            Letter::A => g.constant_minus(g.eval(&BigRational::one())),
            Letter::B => g,
        };
    }
    h
}

/// A function on the invariant subspace: one grid of `N` midpoint samples
/// per descent word of length `m - 1`, together with the weights `h(w; x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentProfile {
    m: usize,
    n: usize,
    values: Vec<Complex64>,
    h: Vec<f64>,
}

fn h_samples(m: usize, n: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n << (m - 1));
    for w in DescentWord::all(m - 1) {
        let p = descent_h_polynomial(&w);
        h.extend((0..n).map(|i| p.eval_f64((2 * i + 1) as f64 / (2 * n) as f64)));
    }
    h
}

impl DescentProfile {
    pub fn new(m: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("descent profiles need m >= 2, got {m}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let len = n << (m - 1);
        if values.len() != len {
            return Err(Error::ArityMismatch { expected: len, found: values.len() });
        }
        Ok(DescentProfile { m, n, values, h: h_samples(m, n) })
    }

    /// The constant function 𝟏 lifted to every polytope.
    pub fn ones(m: usize, n: usize) -> Result<Self> {
        DescentProfile::new(m, n, vec![Complex64::new(1.0, 0.0); n << m.saturating_sub(1)])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `h(w; x_i)` in the same layout as [`values`](Self::values).
    pub fn weights(&self) -> &[f64] {
        &self.h
    }

    /// `p_w(x_i)`.
    pub fn get(&self, w: &DescentWord, i: usize) -> Complex64 {
        self.values[w.index() * self.n + i]
    }

    /// `Σ_w (1/N) Σ_i h(w; x_i) f_w(x_i) conj(g_w(x_i))`.
    pub fn inner(&self, other: &DescentProfile) -> Complex64 {
        let s: Complex64 =
            self.values.iter().zip(&other.values).zip(&self.h).map(|((a, b), h)| a * b.conj() * *h).sum();
        s / self.n as f64
    }
}

/// The transfer operator restricted to the invariant subspace, for the set
/// `S(U)` with `U` a set of words of length `m`.
#[derive(Debug, Clone)]
pub struct DescentOperator {
    m: usize,
    n: usize,
    /// `allowed[i]`: the window word of index `i` is not in `U`.
    allowed: Vec<bool>,
    h: Vec<f64>,
}

impl DescentOperator {
    pub fn new(u: &DescentSet, n: usize) -> Result<Self> {
        let m = u.m();
        if m < 2 {
            return Err(Error::InvalidParameter(format!("descent operator needs words of length >= 2, got {m}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let allowed = DescentWord::all(m).map(|w| !u.contains(&w)).collect();
        Ok(DescentOperator { m, n, allowed, h: h_samples(m, n) })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn blocks(&self) -> usize {
        1 << (self.m - 1)
    }

    pub fn apply_profile(&self, p: &DescentProfile) -> Result<DescentProfile> {
        self.check(p)?;
        let mut out = vec![Complex64::default(); p.values.len()];
        self.apply(&p.values, &mut out);
        Ok(DescentProfile { m: self.m, n: self.n, values: out, h: self.h.clone() })
    }

    pub fn apply_adjoint_profile(&self, p: &DescentProfile) -> Result<DescentProfile> {
        self.check(p)?;
        let mut out = vec![Complex64::default(); p.values.len()];
        self.apply_adjoint(&p.values, &mut out);
        Ok(DescentProfile { m: self.m, n: self.n, values: out, h: self.h.clone() })
    }

    fn check(&self, p: &DescentProfile) -> Result<()> {
        if p.m != self.m {
            return Err(Error::ArityMismatch { expected: self.m, found: p.m });
        }
        if p.n != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: p.n });
        }
        Ok(())
    }

    pub fn to_profile(&self, values: Vec<Complex64>) -> DescentProfile {
        DescentProfile { m: self.m, n: self.n, values, h: self.h.clone() }
    }
}

/// Midpoint cumulative sums with half weight on the own cell:
/// `lower[i] ≈ ∫_0^{x_i}`, `upper[i] ≈ ∫_{x_i}^1`.
fn cumulative(p: &[Complex64], lower: &mut [Complex64], upper: &mut [Complex64]) {
    let n = p.len();
    let inv = 1.0 / n as f64;
    let mut acc = Complex64::default();
    for i in 0..n {
        lower[i] = (acc + p[i] * 0.5) * inv;
        acc += p[i];
    }
    let mut acc = Complex64::default();
    for i in (0..n).rev() {
        upper[i] = (acc + p[i] * 0.5) * inv;
        acc += p[i];
    }
}

impl LinearOperator for DescentOperator {
    fn dim(&self) -> usize {
        self.n * self.blocks()
    }

    fn weight(&self, i: usize) -> f64 {
        self.h[i] / self.n as f64
    }

    /// `T f |_{P_{uy}}(x) = χ(a u y) ∫_0^x p_{au} + χ(b u y) ∫_x^1 p_{bu}`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        let blocks = self.blocks();
        let half = blocks / 2;
        let mut lower = vec![Complex64::default(); n * blocks];
        let mut upper = vec![Complex64::default(); n * blocks];
        for w in 0..blocks {
            let r = w * n..(w + 1) * n;
            cumulative(&x[r.clone()], &mut lower[r.clone()], &mut upper[r]);
        }
        for target in 0..blocks {
            // target = u·y; sources a·u and b·u drop y and prepend a letter.
            let u = target >> 1;
            let from_a = u;
            let from_b = half + u;
            let ok_a = self.allowed[target];
            let ok_b = self.allowed[blocks + target];
            for i in 0..n {
                let mut v = Complex64::default();
                if ok_a {
                    v += lower[from_a * n + i];
                }
                if ok_b {
                    v += upper[from_b * n + i];
                }
                y[target * n + i] = v;
            }
        }
    }

    /// Adjoint for the `h`-weighted inner product.
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        let blocks = self.blocks();
        let half = blocks / 2;
        let weighted: Vec<Complex64> = x.iter().zip(&self.h).map(|(a, h)| a * *h).collect();
        let mut lower = vec![Complex64::default(); n * blocks];
        let mut upper = vec![Complex64::default(); n * blocks];
        for w in 0..blocks {
            let r = w * n..(w + 1) * n;
            cumulative(&weighted[r.clone()], &mut lower[r.clone()], &mut upper[r]);
        }
        for source in 0..blocks {
            // source = z·u; it feeds targets u·y for both letters y.
            let z_is_b = source >= half;
            let u = source % half;
            for i in 0..n {
                let mut v = Complex64::default();
                for ylet in 0..2 {
                    let target = (u << 1) | ylet;
                    let window = if z_is_b { blocks + target } else { target };
                    if !self.allowed[window] {
                        continue;
                    }
                    // ∫_0^x pairs with ∫_x^1 under transposition and vice versa.
                    v += if z_is_b { lower[target * n + i] } else { upper[target * n + i] };
                }
                y[source * n + i] = v / self.h[source * n + i];
            }
        }
    }
}

/// One application of the restricted operator.
pub fn descent_subspace_apply(u: &DescentSet, profile: &DescentProfile) -> Result<DescentProfile> {
    if u.m() != profile.m() {
        return Err(Error::ArityMismatch { expected: u.m(), found: profile.m() });
    }
    DescentOperator::new(u, profile.n())?.apply_profile(profile)
}
