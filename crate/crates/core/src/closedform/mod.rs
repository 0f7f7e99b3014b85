//! Exact eigenvalue ladders and asymptotic expansions for the pattern sets
//! whose transfer operator can be diagonalized by hand.
//!
//! Every expansion is a list of [`ExpansionTerm`]s, each carrying the power
//! convention it was derived in. The generic spectral expansion is
//! `alpha_n/n! ~ sum c * lambda^(n-m)`; the hand-derived ones for `{123}` and
//! `{213}` are stated with `lambda^(n+1)`, and the cyclic triple with
//! `lambda^n`. [`ExpansionTerm::rebase`] converts between them.

pub mod erf;
pub mod euler;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::PatternSet;

pub use erf::{erf_complex, erf_derivative, erf_real, ERF_MAX_ARG};
pub use euler::{euler_expansion, euler_numbers, EulerTable};

/// One term `coefficient * lambda^(n + offset)` of an eigenvalue expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub lambda: Complex64,
    pub coefficient: Complex64,
    pub offset: i32,
}

impl ExpansionTerm {
    pub fn new(lambda: Complex64, coefficient: Complex64, offset: i32) -> Self {
        Self { lambda, coefficient, offset }
    }

    pub fn value(&self, n: usize) -> Complex64 {
        self.coefficient * self.lambda.powi(n as i32 + self.offset)
    }

    /// The same term written with a different exponent offset.
    pub fn rebase(&self, offset: i32) -> Self {
        let coefficient = self.coefficient * self.lambda.powi(self.offset - offset);
        Self { lambda: self.lambda, coefficient, offset }
    }
}

/// Real part of the sum of the terms at `n`.
pub fn expansion_value(terms: &[ExpansionTerm], n: usize) -> f64 {
    terms.iter().map(|t| t.value(n)).sum::<Complex64>().re
}

// ---------------------------------------------------------------- {123}

/// `lambda_k = sqrt(3) / (2 pi (k + 1/3))`, the eigenvalues for `{123}`.
pub fn eigenvalues_123(k: i64) -> f64 {
    3f64.sqrt() / (2.0 * PI * (k as f64 + 1.0 / 3.0))
}

/// Coefficient of `lambda_k^(n+1)`: `(-1)^k exp(1/(2 lambda_k))`.
pub fn coefficient_123(k: i64) -> f64 {
    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (0.5 / eigenvalues_123(k)).exp()
}

/// The `2K+1` terms with `|k| <= K`, in the `lambda^(n+1)` convention,
/// ordered by decreasing modulus.
pub fn expansion_123(big_k: usize) -> Vec<ExpansionTerm> {
    let big_k = big_k as i64;
    let mut ks = vec![0i64];
    for j in 1..=big_k {
        ks.push(-j);
        ks.push(j);
    }
    ks.into_iter().map(|k| ExpansionTerm::new(eigenvalues_123(k).into(), coefficient_123(k).into(), 1)).collect()
}

/// `sum_{|k| <= K} (-1)^k exp(1/(2 lambda_k)) lambda_k^(n+1)`.
pub fn asymptotic_123(n: usize, big_k: usize) -> f64 {
    expansion_value(&expansion_123(big_k), n)
}

/// `r_k = |lambda_{-k}|`, the modulus of the first omitted eigenvalue.
pub fn remainder_rate_123(k: usize) -> f64 {
    eigenvalues_123(-(k as i64)).abs()
}

/// Eigenfunction for `lambda_k`. It depends on the first coordinate and on
/// whether the pair ascends.
pub fn eigenfunction_123(k: i64, x: f64, y: f64) -> f64 {
    let l = eigenvalues_123(k);
    let phase = 3f64.sqrt() / 2.0 * x / l;
    let damp = (-x / (2.0 * l)).exp();
    if x <= y {
        damp * (PI / 6.0 + phase).cos()
    } else {
        damp * (PI / 3.0 + phase).sin()
    }
}

/// Adjoint eigenfunction for `lambda_k`: the eigenfunction composed with
/// `(x, y) -> (1-y, 1-x)`.
pub fn adjoint_eigenfunction_123(k: i64, x: f64, y: f64) -> f64 {
    eigenfunction_123(k, 1.0 - y, 1.0 - x)
}

// ---------------------------------------------------------------- {213}

/// Real root of the `{213}` eigenvalue equation.
pub const LAMBDA0_213: f64 = 0.7839769312;

/// Published starting points for the two leading complex pairs.
pub const SEEDS_213: [Complex64; 2] =
    [Complex64::new(0.2141426360, 0.2085807022), Complex64::new(-0.1677323922, 0.2418627350)];

fn erf_argument(lambda: Complex64) -> Complex64 {
    1.0 / (std::f64::consts::SQRT_2 * lambda)
}

/// `g(lambda) = erf(1/(sqrt(2) lambda)) - sqrt(2/pi)`; the non-zero
/// eigenvalues for `{213}` are its roots.
pub fn eigen_equation_213(lambda: Complex64) -> Result<Complex64> {
    Ok(erf_complex(erf_argument(lambda))? - (2.0 / PI).sqrt())
}

fn eigen_equation_213_real(lambda: f64) -> f64 {
    // The bracket keeps the argument inside erf's range.
    erf_real(1.0 / (std::f64::consts::SQRT_2 * lambda)).expect("argument within range") - (2.0 / PI).sqrt()
}

/// The unique real root of `g` by bisection on `[0.3, 1.5]`, where `g` is
/// decreasing. `tol` is clamped to at least `1e-12`.
pub fn solve_213_dominant(tol: f64) -> f64 {
    let tol = if tol.is_finite() { tol.max(1e-12) } else { 1e-12 };
    let (mut lo, mut hi) = (0.3f64, 1.5f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eigen_equation_213_real(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton refinement of a complex root of `g` from `seed`.
pub fn polish_213_complex_root(seed: Complex64, tol: f64) -> Result<Complex64> {
    const MAX_STEPS: usize = 100;
    if seed.norm() == 0.0 || erf_argument(seed).norm() > ERF_MAX_ARG {
        return Err(Error::OutOfRange(erf_argument(seed).norm()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut lambda = seed;
    for _ in 0..MAX_STEPS {
        let z = erf_argument(lambda);
        let g = eigen_equation_213(lambda)?;
        let dg = erf_derivative(z) * (-1.0 / (std::f64::consts::SQRT_2 * lambda * lambda));
        let step = g / dg;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        lambda -= step;
        if step.norm() <= tol {
            return Ok(lambda);
        }
    }
    Err(Error::NoConvergence(MAX_STEPS))
}

/// Coefficient of `lambda^(n+1)` for an eigenvalue of `{213}`:
/// `exp(1/(2 lambda^2))`.
pub fn coefficient_213(lambda: Complex64) -> Complex64 {
    (1.0 / (2.0 * lambda * lambda)).exp()
}

/// `exp(1/(2 lambda_0^2)) lambda_0^(n+1)`.
pub fn asymptotic_213(n: usize) -> f64 {
    let l = dominant_213();
    coefficient_213(l.into()).re * l.powi(n as i32 + 1)
}

/// Constants of the oscillating correction
/// `2 A r^(n+1) cos(phi + (n+1) theta)` contributed by the leading pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub amplitude: f64,
    pub phase: f64,
    pub frequency: f64,
    pub modulus: f64,
}

impl Oscillation {
    /// Derived from a root in the upper half plane.
    pub fn from_root(lambda: Complex64) -> Self {
        let c = coefficient_213(lambda);
        Self {
            amplitude: c.norm(),
            phase: (1.0 / (2.0 * lambda * lambda)).im,
            frequency: lambda.arg(),
            modulus: lambda.norm(),
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        let e = (n + 1) as f64;
        2.0 * self.amplitude * self.modulus.powf(e) * (self.phase + e * self.frequency).cos()
    }
}

struct Roots213 {
    dominant: f64,
    pairs: [Complex64; 2],
}

fn roots_213() -> &'static Roots213 {
    static ROOTS: OnceLock<Roots213> = OnceLock::new();
    ROOTS.get_or_init(|| Roots213 {
        dominant: solve_213_dominant(1e-12),
        pairs: SEEDS_213.map(|s| polish_213_complex_root(s, 1e-13).expect("fixed seed converges")),
    })
}

fn dominant_213() -> f64 {
    roots_213().dominant
}

/// The leading pair `lambda_{1,2}` as a root in the upper half plane.
pub fn leading_pair_213() -> Complex64 {
    roots_213().pairs[0]
}

/// Constants of the next term, recomputed from the polished root.
pub fn next_term_213_constants() -> Oscillation {
    Oscillation::from_root(leading_pair_213())
}

/// `2 A r^(n+1) cos(phi + (n+1) theta)` from the leading complex pair.
pub fn next_term_213(n: usize) -> f64 {
    next_term_213_constants().value(n)
}

/// The real root followed by both complex pairs, upper member first.
pub fn roots_213_list() -> Vec<Complex64> {
    let r = roots_213();
    let mut out = vec![Complex64::from(r.dominant)];
    for p in r.pairs {
        out.push(p);
        out.push(p.conj());
    }
    out
}

/// Terms for the five known roots in the `lambda^(n+1)` convention.
pub fn expansion_213() -> Vec<ExpansionTerm> {
    roots_213_list().into_iter().map(|l| ExpansionTerm::new(l, coefficient_213(l), 1)).collect()
}

/// `|exp(-1/(2 lambda^2)) - (lambda - 1)|`; zero exactly when `lambda`
/// could be an eigenvalue of index two or more.
pub fn index_residual_213(lambda: Complex64) -> f64 {
    ((-1.0 / (2.0 * lambda * lambda)).exp() - (lambda - 1.0)).norm()
}

/// True when `lambda` satisfies the index equation to `1e-8`.
pub fn check_213_index(lambda: Complex64) -> bool {
    index_residual_213(lambda) <= 1e-8
}

// ------------------------------------------------------- {123,231,312}

/// `lambda_j = (-1)^((j-1)/2) 2/(pi j)` for odd `j >= 1`.
pub fn eigenvalues_triple(j: i64) -> Result<f64> {
    if j < 1 || j % 2 == 0 {
        return Err(Error::NotOdd(j));
    }
    let sign = if ((j - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * 2.0 / (PI * j as f64))
}

/// Coefficient in the generic `lambda^(n-2)` convention: `2 lambda^2`.
pub fn coefficient_triple(j: i64) -> Result<f64> {
    let l = eigenvalues_triple(j)?;
    Ok(2.0 * l * l)
}

/// `n E_{n-1}` for `n >= 2`.
pub fn exact_count_triple(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("exact_count_triple needs n >= 2, got {n}")));
    }
    Ok(euler_numbers(n - 1).values()[n - 1].clone() * n)
}

/// Terms `2 lambda_j^n` for odd `j <= j_max`.
pub fn expansion_triple(j_max: usize) -> Vec<ExpansionTerm> {
    (1..=j_max as i64)
        .step_by(2)
        .map(|j| ExpansionTerm::new(eigenvalues_triple(j).unwrap().into(), 2.0.into(), 0))
        .collect()
}

/// `2 sum_{j odd <= j_max} lambda_j^n`, summed smallest first.
pub fn triple_series(n: usize, j_max: usize) -> f64 {
    let mut acc = erf::Neumaier::default();
    for j in (1..=j_max as i64).rev().filter(|j| j % 2 == 1) {
        acc.add(eigenvalues_triple(j).unwrap().powi(n as i32));
    }
    2.0 * acc.total()
}

// ------------------------------------------------------------ {123,321}

/// Terms for `alpha_n/n! = 2 E_n/n! = 4 sum_j lambda_j^(n+1)` with the
/// triple's ladder.
pub fn expansion_up_down(j_max: usize) -> Vec<ExpansionTerm> {
    (1..=j_max as i64)
        .step_by(2)
        .map(|j| ExpansionTerm::new(eigenvalues_triple(j).unwrap().into(), 4.0.into(), 1))
        .collect()
}

// ------------------------------------------------------ known pattern sets

/// Pattern sets of length three with a closed form, up to the symmetries
/// that preserve `alpha_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnownCase {
    /// `{123}` or `{321}`.
    Monotone,
    /// `{213}` and its images `{231}`, `{312}`, `{132}`.
    Single213,
    /// `{123,231,312}` or `{132,213,321}`.
    CyclicTriple,
    /// `{123,321}`, counted by twice the Euler numbers.
    UpDown,
    /// `{132,231}` or `{213,312}`, counted by `2^(n-1)`.
    Peaks,
}

impl KnownCase {
    pub fn detect(set: &PatternSet) -> Option<Self> {
        if set.m() != 2 {
            return None;
        }
        let mut ranks: Vec<String> = set.members().map(|p| p.to_string()).collect();
        ranks.sort();
        let r: Vec<&str> = ranks.iter().map(String::as_str).collect();
        match r.as_slice() {
            ["123"] | ["321"] => Some(Self::Monotone),
            ["213"] | ["231"] | ["312"] | ["132"] => Some(Self::Single213),
            ["123", "231", "312"] | ["132", "213", "321"] => Some(Self::CyclicTriple),
            ["123", "321"] => Some(Self::UpDown),
            ["132", "231"] | ["213", "312"] => Some(Self::Peaks),
            _ => None,
        }
    }

    /// Exact count when a formula is known.
    pub fn exact_count(self, n: usize) -> Option<BigUint> {
        match self {
            Self::CyclicTriple if n >= 2 => exact_count_triple(n).ok(),
            Self::UpDown if n >= 2 => Some(euler_numbers(n).values()[n].clone() * 2u32),
            Self::Peaks if n >= 1 => Some(BigUint::one() << (n - 1)),
            _ => None,
        }
    }

    /// Expansion terms, `size` controlling how many are kept.
    pub fn expansion(self, size: usize) -> Vec<ExpansionTerm> {
        match self {
            Self::Monotone => expansion_123(size),
            Self::Single213 => expansion_213(),
            Self::CyclicTriple => expansion_triple(2 * size + 1),
            Self::UpDown => expansion_up_down(2 * size + 1),
            Self::Peaks => Vec::new(),
        }
    }

    fn exact_formula(self) -> Option<&'static str> {
        match self {
            Self::CyclicTriple => Some("n*E(n-1)"),
            Self::UpDown => Some("2*E(n)"),
            Self::Peaks => Some("2^(n-1)"),
            _ => None,
        }
    }
}

/// An eigenvalue in a closed-form report, with its defining-equation
/// residual where the value was found numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderValue {
    pub re: f64,
    pub im: f64,
    pub residual: Option<f64>,
    pub index_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub case: KnownCase,
    pub pattern_set: String,
    pub convention: String,
    pub ladder: Vec<LadderValue>,
    pub terms: Vec<ExpansionTerm>,
    pub exact: Option<String>,
}

/// Closed-form data for `set`, or `None` when no formula is known.
/// `size` is `K` for `{123}` and the number of extra pairs for the Euler
/// ladders.
pub fn closed_form_report(set: &PatternSet, size: usize) -> Option<ClosedFormReport> {
    let case = KnownCase::detect(set)?;
    let terms = case.expansion(size);
    let plain = |l: Complex64| LadderValue { re: l.re, im: l.im, residual: None, index_residual: None };
    let ladder = match case {
        KnownCase::Single213 => terms
            .iter()
            .map(|t| LadderValue {
                re: t.lambda.re,
                im: t.lambda.im,
                residual: eigen_equation_213(t.lambda).ok().map(|g| g.norm()),
                index_residual: Some(index_residual_213(t.lambda)),
            })
            .collect(),
        KnownCase::UpDown => terms.iter().flat_map(|t| [plain(t.lambda), plain(-t.lambda)]).collect(),
        _ => terms.iter().map(|t| plain(t.lambda)).collect(),
    };
    Some(ClosedFormReport {
        case,
        pattern_set: set.to_string(),
        convention: "coefficient * lambda^(n + offset)".into(),
        ladder,
        terms,
        exact: case.exact_formula().map(str::to_string),
    })
}
