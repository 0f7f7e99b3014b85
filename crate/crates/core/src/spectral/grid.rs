use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported number of grid points, `N^m`.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// Midpoint grid on `[0,1]^m` with `N` nodes `(2i+1)/(2N)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    m: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {n}")));
        }
        match n.checked_pow(m as u32) {
            Some(len) if len <= MAX_GRID_POINTS => Ok(GridSpec { m, n }),
            _ => Err(Error::InvalidGrid(format!("{n}^{m} points exceed the limit {MAX_GRID_POINTS}"))),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        (2 * i + 1) as f64 / (2 * self.n) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Flat index of a multi-index, first coordinate most significant.
    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn multi(&self, mut flat: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
    }

    /// The same grid refined to `2N` points per axis.
    pub fn refined(&self) -> Result<GridSpec> {
        GridSpec::new(self.m, 2 * self.n)
    }
}

/// Complex samples of a function on a [`GridSpec`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::ArityMismatch { expected: spec.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        Ok(GridFunction { spec, values })
    }

    pub(crate) fn from_vec_unchecked(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        GridFunction { spec, values }
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        GridFunction { spec, values: vec![c; spec.len()] }
    }

    pub fn ones(spec: GridSpec) -> Self {
        GridFunction::constant(spec, Complex64::new(1.0, 0.0))
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction::constant(spec, Complex64::new(0.0, 0.0))
    }

    /// Samples `f` at every node; `f` receives the node coordinates.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let nodes = spec.nodes();
        let mut idx = vec![0; spec.m];
        let mut x = vec![0.0; spec.m];
        let values = (0..spec.len())
            .map(|k| {
                spec.multi(k, &mut idx);
                for (xi, &i) in x.iter_mut().zip(&idx) {
                    *xi = nodes[i];
                }
                f(&x)
            })
            .collect();
        GridFunction { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.values[self.spec.flat(idx)]
    }

    pub fn conj(&self) -> GridFunction {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }

    /// `self - other`.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        check_same(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction { spec: self.spec, values })
    }

    /// Grid norm `sqrt(<f,f>)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s / self.values.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes the 16-byte header `(m, N)` as little-endian `u64` followed by
    /// the real parts as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.spec.m as u64).to_le_bytes())?;
        w.write_all(&(self.spec.n as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<GridFunction> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let m = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        let spec = GridSpec::new(m, n)?;
        let mut values = Vec::with_capacity(spec.len());
        for _ in 0..spec.len() {
            r.read_exact(&mut word)?;
            values.push(Complex64::new(f64::from_le_bytes(word), 0.0));
        }
        GridFunction::new(spec, values)
    }
}

pub(crate) fn check_same(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.spec.m != g.spec.m {
        return Err(Error::ArityMismatch { expected: f.spec.m, found: g.spec.m });
    }
    if f.spec.n != g.spec.n {
        return Err(Error::InvalidGrid(format!("grid sizes differ: {} and {}", f.spec.n, g.spec.n)));
    }
    Ok(())
}

/// `(1/N^m) Σ f·conj(g)`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    check_same(f, g)?;
    let s: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum();
    Ok(s / f.values.len() as f64)
}

/// `(J f)(x_1..x_m) = f(1-x_m, .., 1-x_1)`.
pub fn involution_j(f: &GridFunction) -> GridFunction {
    permute_axes(f, true)
}

/// `(R f)(x_1..x_m) = f(x_m, .., x_1)`.
pub fn involution_r(f: &GridFunction) -> GridFunction {
    permute_axes(f, false)
}

fn permute_axes(f: &GridFunction, reflect: bool) -> GridFunction {
    let spec = f.spec;
    let n = spec.n;
    let mut idx = vec![0; spec.m];
    let mut src = vec![0; spec.m];
    let values = (0..spec.len())
        .map(|k| {
            spec.multi(k, &mut idx);
            for (s, &i) in src.iter_mut().zip(idx.iter().rev()) {
                *s = if reflect { n - 1 - i } else { i };
            }
            f.values[spec.flat(&src)]
        })
        .collect();
    GridFunction { spec, values }
}
