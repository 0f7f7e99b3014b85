//! Euler (zigzag) numbers and their classical trigonometric expansion.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `E_0 ..= E_n`, the number of alternating permutations of each length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerTable {
    #[serde(serialize_with = "crate::enumerate::serialize_decimal")]
    values: Vec<BigUint>,
}

impl EulerTable {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.values.get(n)
    }

    /// `E_n / n!` in floating point.
    pub fn ratio(&self, n: usize) -> Option<f64> {
        let e = self.values.get(n)?;
        let q = num_rational::BigRational::new(e.clone().into(), crate::enumerate::factorial_big(n).into());
        q.to_f64()
    }
}

/// Euler numbers through `n_max` from the Seidel boustrophedon triangle.
pub fn euler_numbers(n_max: usize) -> EulerTable {
    let mut values = Vec::with_capacity(n_max + 1);
    let mut row = vec![BigUint::from(1u32)];
    values.push(BigUint::from(1u32));
    for _ in 1..=n_max {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::zero());
        for v in row.iter().rev() {
            let s = next.last().unwrap() + v;
            next.push(s);
        }
        values.push(next.last().unwrap().clone());
        row = next;
    }
    EulerTable { values }
}

/// Partial sum of `E_n/n! = 2 sum_{j odd} (-1)^((j-1)(n+1)/2) (pi j/2)^(-n-1)`
/// over `j = 1, 3, ..., j_max`.
pub fn euler_expansion(n: usize, j_max: usize) -> Result<f64> {
    if j_max % 2 == 0 {
        return Err(Error::NotOdd(j_max as i64));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("euler_expansion needs n >= 1".into()));
    }
    let mut acc = super::erf::Neumaier::default();
    // Smallest terms first.
    for j in (1..=j_max).rev().step_by(2) {
        let sign_exp = ((j - 1) / 2) * (n + 1);
        let sign = if sign_exp % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * (FRAC_PI_2 * j as f64).powi(-(n as i32) - 1));
    }
    Ok(2.0 * acc.total())
}
