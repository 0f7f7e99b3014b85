//! Discretized transfer operator, its adjoint and leading spectrum.
//!
//! The operator acts on functions on the midpoint grid of `[0,1]^m`. Each
//! kernel entry is the average of the indicator over the grid cell, so the
//! discrete operator is the piecewise-constant Galerkin projection of the
//! continuous one: it maps 𝟏 to 𝟏 when nothing is forbidden, its adjoint is
//! an exact transpose, and it inherits every symmetry of the indicator.

mod descent;
mod eigen;
mod grid;
mod operator;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use descent::{descent_h_polynomial, descent_subspace_apply, DescentOperator, DescentProfile, Poly};
pub use eigen::{
    arnoldi_op, bilinear, expansion_coefficient, hessenberg_eigenvalues, inner, norm, power_iteration_op, residual,
    Adjoint, ArnoldiOutput, LinearOperator, PowerOptions, RawPair, CHANGE_TOL, MAX_KRYLOV, TIE_GAP,
};
pub use grid::{inner_product, involution_j, involution_r, GridFunction, GridSpec, MAX_GRID_POINTS};
pub use operator::{apply_t, apply_t_adjoint, CellKernel, TransferOperator, MAX_GRID_ORDER};

use crate::enumerate::{factorial_big, pyramid_count, Pyramid};
use crate::error::{Error, Result};
use crate::pattern::{DescentSet, PatternSet};

impl LinearOperator for TransferOperator {
    fn dim(&self) -> usize {
        self.spec().len()
    }

    fn weight(&self, _: usize) -> f64 {
        1.0 / self.spec().len() as f64
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.apply_slice(x, y, false)
    }

    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.apply_slice(x, y, true)
    }
}

/// An eigenvalue with right and adjoint eigenfunctions.
///
/// `coefficient` is `⟨φ,𝟏⟩⟨𝟏,ψ̄⟩ / ⟨φ,ψ̄⟩`, so that
/// `α_n/n! ≈ Σ coefficient · λ^{n−m}`.
#[derive(Debug, Clone)]
pub struct EigenPair<F = GridFunction> {
    pub eigenvalue: Complex64,
    pub phi: F,
    pub psi: F,
    pub coefficient: Complex64,
    /// `‖Tφ − λφ‖` with `‖φ‖ = 1`.
    pub residual: f64,
}

fn grid_pair(spec: GridSpec, p: RawPair) -> EigenPair {
    EigenPair {
        eigenvalue: p.eigenvalue,
        phi: GridFunction::from_vec_unchecked(spec, p.phi),
        psi: GridFunction::from_vec_unchecked(spec, p.psi),
        coefficient: p.coefficient,
        residual: p.residual,
    }
}

fn descent_pair(op: &DescentOperator, p: RawPair) -> EigenPair<DescentProfile> {
    EigenPair {
        eigenvalue: p.eigenvalue,
        phi: op.to_profile(p.phi),
        psi: op.to_profile(p.psi),
        coefficient: p.coefficient,
        residual: p.residual,
    }
}

/// Dominant eigenpair of the grid operator by power iteration.
pub fn power_iteration(set: &PatternSet, spec: GridSpec, opts: &PowerOptions) -> Result<EigenPair> {
    let op = TransferOperator::new(set, spec)?;
    Ok(grid_pair(spec, power_iteration_op(&op, opts)?))
}

/// Leading Ritz pairs of the grid operator.
#[derive(Debug, Clone)]
pub struct ArnoldiEigs<F = GridFunction> {
    pub pairs: Vec<EigenPair<F>>,
    pub breakdown: bool,
}

pub fn arnoldi_eigs(set: &PatternSet, spec: GridSpec, k: usize, krylov_dim: usize, seed: u64) -> Result<ArnoldiEigs> {
    let op = TransferOperator::new(set, spec)?;
    let out = arnoldi_op(&op, k, krylov_dim, seed)?;
    Ok(ArnoldiEigs { pairs: out.pairs.into_iter().map(|p| grid_pair(spec, p)).collect(), breakdown: out.breakdown })
}

/// Dominant eigenpair on the descent subspace with `n` points.
pub fn descent_power_iteration(u: &DescentSet, n: usize, opts: &PowerOptions) -> Result<EigenPair<DescentProfile>> {
    let op = DescentOperator::new(u, n)?;
    let raw = power_iteration_op(&op, opts)?;
    Ok(descent_pair(&op, raw))
}

pub fn descent_arnoldi(
    u: &DescentSet,
    n: usize,
    k: usize,
    krylov_dim: usize,
    seed: u64,
) -> Result<ArnoldiEigs<DescentProfile>> {
    let op = DescentOperator::new(u, n)?;
    let out = arnoldi_op(&op, k, krylov_dim, seed)?;
    Ok(ArnoldiEigs { pairs: out.pairs.into_iter().map(|p| descent_pair(&op, p)).collect(), breakdown: out.breakdown })
}

/// Eliminates the `O(1/N)` error term: `2 λ_{2N} − λ_N`.
pub fn richardson(lambda_n: f64, lambda_2n: f64) -> f64 {
    2.0 * lambda_2n - lambda_n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyIdentityRow {
    pub k: usize,
    /// `⟨T^k 𝟏, 𝟏⟩` on the grid.
    pub grid_value: f64,
    /// `α_{m+k} / (m+k)!`.
    pub exact_value: f64,
    /// `grid_value − exact_value`.
    pub gap: f64,
}

impl KeyIdentityRow {
    pub fn relative_gap(&self) -> f64 {
        self.gap.abs() / self.exact_value.abs()
    }
}

/// Compares `⟨T^k 𝟏, 𝟏⟩` with `α_{m+k}/(m+k)!` for `k = 0..=k_max`.
pub fn verify_key_identity(set: &PatternSet, spec: GridSpec, k_max: usize) -> Result<Vec<KeyIdentityRow>> {
    let op = TransferOperator::new(set, spec)?;
    let m = set.m();
    let counts = pyramid_count(set, m + k_max);
    let one = GridFunction::ones(spec);
    let mut f = one.clone();
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            f = op.apply(&f)?;
        }
        let grid_value = inner_product(&f, &one)?.re;
        let exact_value = counts.probability(m + k).expect("table covers m + k_max");
        rows.push(KeyIdentityRow { k, grid_value, exact_value, gap: grid_value - exact_value });
    }
    Ok(rows)
}

/// One pyramid entry next to the grid iterate `f_n = T^{n−m} 𝟏` at the same
/// point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PyramidPoint {
    pub tuple: Vec<usize>,
    /// `α_n^{i_1..i_m}` as a decimal string.
    pub pyramid: String,
    /// `f_n(i_1/n, .., i_m/n)` read off the grid cell containing the point.
    pub grid_value: f64,
    /// `n! f_n(i/n) / n^m`, on the scale of a single pyramid entry.
    pub scaled: f64,
}

/// Side-by-side values of the pyramid at level `n` and the grid iterate.
/// Exploratory: no tolerance is attached to the comparison.
pub fn pyramid_vs_grid(set: &PatternSet, n: usize, spec: GridSpec) -> Result<Vec<PyramidPoint>> {
    let m = set.m();
    if n < m {
        return Err(Error::InvalidParameter(format!("level {n} is below the window order {m}")));
    }
    let op = TransferOperator::new(set, spec)?;
    let mut f = GridFunction::ones(spec);
    for _ in m..n {
        f = op.apply(&f)?;
    }
    let level = Pyramid::new(set).nth(n - m).expect("pyramid is infinite");
    let nfact = num_traits::ToPrimitive::to_f64(&factorial_big(n)).unwrap_or(f64::INFINITY);
    let cells = spec.n();
    let mut idx = vec![0; m];
    Ok(level
        .entries()
        .map(|(tuple, count)| {
            for (c, &i) in idx.iter_mut().zip(&tuple) {
                *c = ((i as f64 / n as f64 * cells as f64) as usize).min(cells - 1);
            }
            let grid_value = f.get(&idx).re;
            PyramidPoint {
                pyramid: count.to_string(),
                scaled: nfact * grid_value / (n as f64).powi(m as i32),
                grid_value,
                tuple,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub coefficient_re: f64,
    pub coefficient_im: f64,
}

/// Machine-readable summary of the leading spectrum on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub pattern_set: String,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenvalues: Vec<EigenEntry>,
    /// Richardson value of the largest real eigenvalue from grids `N/2`, `N`.
    pub extrapolated_dominant: Option<f64>,
    /// Coefficients multiply `λ^(n-m)` in the expansion of `α_n/n!`.
    pub coefficient_exponent: String,
    pub breakdown: bool,
}

fn largest_real(pairs: &[EigenPair]) -> Option<f64> {
    pairs.iter().filter(|p| p.eigenvalue.im == 0.0).map(|p| p.eigenvalue.re).reduce(f64::max)
}

/// Arnoldi on grid `N`, plus the extrapolated dominant eigenvalue from a
/// second run on grid `N/2`.
pub fn eigen_report(set: &PatternSet, spec: GridSpec, top: usize, krylov_dim: usize, seed: u64) -> Result<EigenReport> {
    let fine = arnoldi_eigs(set, spec, top, krylov_dim, seed)?;
    let extrapolated_dominant = if spec.n() >= 4 {
        let coarse_spec = GridSpec::new(spec.m(), spec.n() / 2)?;
        let coarse = arnoldi_eigs(set, coarse_spec, top, krylov_dim, seed)?;
        match (largest_real(&coarse.pairs), largest_real(&fine.pairs)) {
            (Some(a), Some(b)) => Some(richardson(a, b)),
            _ => None,
        }
    } else {
        None
    };
    Ok(EigenReport {
        pattern_set: set.to_string(),
        m: set.m(),
        n: spec.n(),
        eigenvalues: fine
            .pairs
            .iter()
            .map(|p| EigenEntry {
                re: p.eigenvalue.re,
                im: p.eigenvalue.im,
                residual: p.residual,
                coefficient_re: p.coefficient.re,
                coefficient_im: p.coefficient.im,
            })
            .collect(),
        extrapolated_dominant,
        coefficient_exponent: "n-m".into(),
        breakdown: fine.breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> PatternSet {
        s.parse().unwrap()
    }

    const L123: f64 = 0.826_993_343_132_688_1;

    #[test]
    fn richardson_arithmetic() {
        assert!((richardson(0.8300, 0.8285) - 0.8270).abs() < 1e-12);
        assert_eq!(richardson(0.5, 0.5), 0.5);
    }

    #[test]
    fn power_123() {
        let spec = GridSpec::new(2, 64).unwrap();
        let p = power_iteration(&set("{123}"), spec, &PowerOptions::default()).unwrap();
        assert!((p.eigenvalue.re - L123).abs() < 1e-2);
        assert!(p.residual <= 1e-9 * p.eigenvalue.norm() * 1.01);
        assert!((p.phi.norm() - 1.0).abs() < 1e-12);
        // Coefficient of λ^{n−2}: exp(1/(2λ)) λ^3 in the continuum.
        let c = (1.0 / (2.0 * L123)).exp() * L123.powi(3);
        assert!((p.coefficient.re - c).abs() < 2e-2, "{}", p.coefficient);
    }

    #[test]
    fn power_fails_on_symmetric_pair() {
        let spec = GridSpec::new(2, 256).unwrap();
        let err = power_iteration(&set("{123,321}"), spec, &PowerOptions::default()).unwrap_err();
        assert_eq!(err, Error::NotDominated);
        let err = power_iteration(&PatternSet::full(2).unwrap(), spec, &PowerOptions::default()).unwrap_err();
        assert_eq!(err, Error::DegenerateOperator);
    }

    #[test]
    fn arnoldi_123_ladder() {
        let spec = GridSpec::new(2, 64).unwrap();
        let out = arnoldi_eigs(&set("{123}"), spec, 3, 40, 0).unwrap();
        let v: Vec<f64> = out.pairs.iter().map(|p| p.eigenvalue.re).collect();
        let ladder = |k: f64| 3f64.sqrt() / (2.0 * std::f64::consts::PI * (k + 1.0 / 3.0));
        assert!((v[0] - ladder(0.0)).abs() < 1e-2, "{v:?}");
        assert!((v[1] - ladder(-1.0)).abs() < 1e-2, "{v:?}");
        assert!((v[2] - ladder(1.0)).abs() < 1e-2, "{v:?}");
        for p in &out.pairs {
            assert!(p.residual < 1e-6, "{}", p.residual);
        }
    }

    #[test]
    fn key_identity_small() {
        let spec = GridSpec::new(2, 32).unwrap();
        let rows = verify_key_identity(&set("{123}"), spec, 3).unwrap();
        assert_eq!(rows[0].grid_value, 1.0);
        assert_eq!(rows[0].exact_value, 1.0);
        assert_eq!(rows[1].exact_value, 5.0 / 6.0);
        assert!(rows.iter().all(|r| r.relative_gap() < 0.05));
    }

    #[test]
    fn descent_fast_path_123() {
        let u: DescentSet = DescentSet::from_words(["aa".parse().unwrap()]).unwrap();
        let p = descent_power_iteration(&u, 1024, &PowerOptions::default()).unwrap();
        assert!((p.eigenvalue.re - L123).abs() < 1e-3);
        let c = (1.0 / (2.0 * L123)).exp() * L123.powi(3);
        assert!((p.coefficient.re - c).abs() < 1e-3, "{}", p.coefficient);
    }

    #[test]
    fn pyramid_comparison_is_exploratory_but_consistent() {
        let spec = GridSpec::new(2, 64).unwrap();
        let rows = pyramid_vs_grid(&set("{123}"), 6, spec).unwrap();
        assert!(rows.len() < 30);
        let total: f64 = rows.iter().map(|r| r.pyramid.parse::<f64>().unwrap()).sum();
        assert_eq!(total, 349.0);
        assert!(rows.iter().all(|r| r.grid_value >= 0.0));
    }

    #[test]
    fn report_json_keys() {
        let spec = GridSpec::new(2, 16).unwrap();
        let r = eigen_report(&set("{123}"), spec, 2, 20, 0).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["pattern_set", "m", "N", "eigenvalues", "extrapolated_dominant"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["eigenvalues"][0].as_object().unwrap().len(), 5);
        let back: EigenReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
