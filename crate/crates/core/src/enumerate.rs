//! Exact counting of permutations that avoid a set of consecutive patterns.
//!
//! [`brute_force_count`] scans the symmetric group and serves as the oracle;
//! [`pyramid_count`] is the level-by-level dynamic program over the values of
//! the last `m` entries, whose transition is the discrete counterpart of the
//! transfer operator.

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pattern::{avoids, PatternSet};

/// Largest `n` accepted by [`brute_force_count`].
pub const BRUTE_FORCE_LIMIT: usize = 11;

/// Visits every permutation of `1..=n` by Heap's single-swap generator.
pub(crate) fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Number of permutations of length `n` avoiding `set`, by exhaustive scan.
pub fn brute_force_count(set: &PatternSet, n: usize) -> Result<BigUint> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut count = 0u64;
    for_each_permutation(n, |p| {
        if avoids(p, set) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// One level of the pyramid: counts of avoiders of length `n` indexed by the
/// values `(i_1, ..., i_m)` of their last `m` entries.
///
/// Storage is dense over `[1, n]^m`; tuples with repeated values hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidLevel {
    n: usize,
    m: usize,
    values: Vec<BigUint>,
}

impl PyramidLevel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &v| acc * self.n + (v - 1))
    }

    fn tuple(n: usize, m: usize, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; m];
        for slot in t.iter_mut().rev() {
            *slot = index % n + 1;
            index /= n;
        }
        t
    }

    /// The entry for a tuple of values in `1..=n`; zero for invalid tuples.
    pub fn get(&self, tuple: &[usize]) -> BigUint {
        if tuple.len() != self.m || tuple.iter().any(|&v| v == 0 || v > self.n) {
            return BigUint::zero();
        }
        self.values[self.index(tuple)].clone()
    }

    /// Nonzero entries with their tuples, in lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &BigUint)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (PyramidLevel::tuple(self.n, self.m, i), v))
    }

    pub fn total(&self) -> BigUint {
        self.values.iter().sum()
    }
}

fn distinct(t: &[usize]) -> bool {
    t.iter().enumerate().all(|(i, a)| !t[..i].contains(a))
}

/// Iterator over pyramid levels `m, m+1, ...`.
pub struct Pyramid<'a> {
    set: &'a PatternSet,
    current: Option<PyramidLevel>,
}

impl<'a> Pyramid<'a> {
    pub fn new(set: &'a PatternSet) -> Self {
        Pyramid { set, current: None }
    }

    fn base(&self) -> PyramidLevel {
        let m = self.set.m();
        let values = (0..m.pow(m as u32))
            .map(|i| if distinct(&PyramidLevel::tuple(m, m, i)) { BigUint::one() } else { BigUint::zero() })
            .collect();
        PyramidLevel { n: m, m, values }
    }

    fn step(&self, prev: &PyramidLevel) -> PyramidLevel {
        let m = prev.m;
        let n = prev.n + 1;
        let set = self.set;
        let values = (0..n.pow(m as u32))
            .into_par_iter()
            .map(|idx| {
                let target = PyramidLevel::tuple(n, m, idx);
                if !distinct(&target) {
                    return BigUint::zero();
                }
                let removed = target[m - 1];
                let relabel = |v: usize| if v > removed { v - 1 } else { v };
                let mut window = Vec::with_capacity(m + 1);
                let mut source = Vec::with_capacity(m);
                let mut sum = BigUint::zero();
                for j in (1..=n).filter(|j| !target.contains(j)) {
                    window.clear();
                    window.push(j);
                    window.extend_from_slice(&target);
                    if set.forbids_window(&window) {
                        continue;
                    }
                    source.clear();
                    source.push(relabel(j));
                    source.extend(target[..m - 1].iter().map(|&v| relabel(v)));
                    sum += &prev.values[prev.index(&source)];
                }
                sum
            })
            .collect();
        PyramidLevel { n, m, values }
    }
}

impl Iterator for Pyramid<'_> {
    type Item = PyramidLevel;

    fn next(&mut self) -> Option<PyramidLevel> {
        let next = match &self.current {
            None => self.base(),
            Some(prev) => self.step(prev),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Exact counts `α_n(S)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pattern_set: PatternSet,
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn new(pattern_set: PatternSet, counts: Vec<BigUint>) -> Self {
        CountTable { pattern_set, counts }
    }

    pub fn pattern_set(&self) -> &PatternSet {
        &self.pattern_set
    }

    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.counts.get(n)
    }

    /// `α_n / n!` rounded to the nearest double.
    pub fn probability(&self, n: usize) -> Option<f64> {
        self.exact_probability(n).map(|r| r.to_f64().unwrap_or(0.0))
    }

    /// `α_n / n!` as an exact rational.
    pub fn exact_probability(&self, n: usize) -> Option<BigRational> {
        let a = self.counts.get(n)?;
        Some(BigRational::new(BigInt::from(a.clone()), BigInt::from(factorial_big(n))))
    }

    /// CSV with header `n,alpha_n,alpha_n_over_nfact,root_est,ratio_est`.
    pub fn to_csv(&self) -> String {
        let estimates = growth_rows(self);
        let mut out = String::from("n,alpha_n,alpha_n_over_nfact,root_est,ratio_est\n");
        for (n, a) in self.counts.iter().enumerate() {
            let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            let (root, ratio) = estimates
                .iter()
                .find(|g| g.n == n)
                .map(|g| (g.root_estimate, g.ratio_estimate))
                .unwrap_or((None, None));
            out.push_str(&format!("{n},{a},{},{},{}\n", fmt(self.probability(n)), fmt(root), fmt(ratio)));
        }
        out
    }
}

impl Serialize for CountTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let counts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        let mut st = s.serialize_struct("CountTable", 3)?;
        st.serialize_field("pattern_set", &self.pattern_set)?;
        st.serialize_field("m", &self.pattern_set.m())?;
        st.serialize_field("counts", &counts)?;
        st.end()
    }
}

/// Big integers as a JSON array of decimal strings.
pub(crate) fn serialize_decimal<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

pub fn factorial_big(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Counts `α_n(S)` for `n <= n_max` with the pyramid recurrence; levels below
/// `m` are filled with `n!`.
pub fn pyramid_count(set: &PatternSet, n_max: usize) -> CountTable {
    let m = set.m();
    let mut counts: Vec<BigUint> = (0..m.min(n_max + 1)).map(factorial_big).collect();
    if n_max >= m {
        counts.extend(Pyramid::new(set).take(n_max - m + 1).map(|level| level.total()));
    }
    CountTable::new(set.clone(), counts)
}

/// Growth-rate estimates at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub n: usize,
    /// `(α_n / n!)^{1/n}`.
    pub root_estimate: Option<f64>,
    /// `α_{n+1} / ((n+1) α_n)`; undefined when `α_n = 0` or `n = n_max`.
    pub ratio_estimate: Option<f64>,
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map_or(f64::NEG_INFINITY, f64::ln)
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn growth_rows(t: &CountTable) -> Vec<GrowthEstimate> {
    let n_max = t.n_max();
    (1..=n_max)
        .map(|n| {
            let a = &t.counts[n];
            let root_estimate =
                if a.is_zero() { Some(0.0) } else { Some(((ln_big(a) - ln_big(&factorial_big(n))) / n as f64).exp()) };
            let ratio_estimate = (n < n_max && !a.is_zero()).then(|| {
                let num = BigInt::from(t.counts[n + 1].clone());
                let den = BigInt::from(a.clone()) * BigInt::from(n + 1);
                BigRational::new(num, den).to_f64().unwrap_or(f64::NAN)
            });
            GrowthEstimate { n, root_estimate, ratio_estimate }
        })
        .collect()
}

/// Root and ratio estimates of the spectral radius for `n = 1..=n_max`.
pub fn growth_estimates(t: &CountTable) -> Result<Vec<GrowthEstimate>> {
    let needed = t.pattern_set.m() + 2;
    if t.n_max() < needed {
        return Err(Error::MissingCounts { needed, available: t.n_max() });
    }
    Ok(growth_rows(t))
}

/// Least-squares fit of `α_n/n! ≈ c·λ^n` over a window of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingFit {
    pub coefficient: f64,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
    /// Residual norm divided by the norm of the data.
    pub relative_residual: f64,
}

pub fn fit_leading_coefficient(t: &CountTable, lambda: f64, window: RangeInclusive<usize>) -> Result<LeadingFit> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if *window.end() > t.n_max() {
        return Err(Error::MissingCounts { needed: *window.end(), available: t.n_max() });
    }
    let data: Vec<(f64, f64)> =
        window.map(|n| (lambda.powi(n as i32), t.probability(n).expect("inside table"))).collect();
    let sxy: f64 = data.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = data.iter().map(|(x, _)| x * x).sum();
    let coefficient = sxy / sxx;
    let residual = data.iter().map(|(x, y)| (y - coefficient * x).powi(2)).sum::<f64>().sqrt();
    let norm = data.iter().map(|(_, y)| y * y).sum::<f64>().sqrt();
    Ok(LeadingFit { coefficient, residual, relative_residual: residual / norm })
}
