use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{GridFunction, GridSpec};
use crate::error::{Error, Result};
use crate::pattern::{permutations, PatternSet};

/// Largest window order `m` supported on the full grid.
pub const MAX_GRID_ORDER: usize = 4;

/// Cell-averaged indicator: for a tuple of grid indices, the fraction of the
/// orderings of the underlying points (ties broken uniformly) whose
/// standardization lies outside `S`.
///
/// The value only depends on the weak order of the indices, so it is
/// tabulated once per weak order and stored as an exact fraction.
#[derive(Debug, Clone)]
pub struct CellKernel {
    width: usize,
    numerator: Vec<u32>,
    denominator: Vec<u32>,
    weight: Vec<f64>,
}

impl CellKernel {
    pub fn new(set: &PatternSet) -> Result<Self> {
        let m = set.m();
        if m > MAX_GRID_ORDER {
            return Err(Error::InvalidGrid(format!("window order {m} exceeds {MAX_GRID_ORDER}")));
        }
        let width = m + 1;
        let size = width.pow(width as u32);
        let perms: Vec<_> = permutations(width).collect();
        let mut numerator = vec![0u32; size];
        let mut denominator = vec![0u32; size];
        let mut ranks = vec![0usize; width];
        for code in 0..size {
            decode(code, width, &mut ranks);
            if !is_dense(&ranks) {
                continue;
            }
            for p in &perms {
                let e = p.entries();
                let consistent = (0..width).all(|i| {
                    (i + 1..width).all(|j| match ranks[i].cmp(&ranks[j]) {
                        std::cmp::Ordering::Less => e[i] < e[j],
                        std::cmp::Ordering::Greater => e[i] > e[j],
                        std::cmp::Ordering::Equal => true,
                    })
                });
                if consistent {
                    denominator[code] += 1;
                    if !set.forbids_rank(p.rank()) {
                        numerator[code] += 1;
                    }
                }
            }
        }
        let weight =
            numerator.iter().zip(&denominator).map(|(&a, &b)| if b == 0 { 0.0 } else { a as f64 / b as f64 }).collect();
        Ok(CellKernel { width, numerator, denominator, weight })
    }

    /// Number of coordinates in a window, `m + 1`.
    pub fn width(&self) -> usize {
        self.width
    }

    fn code_of(&self, indices: &[usize]) -> usize {
        let mut ranks = [0usize; MAX_GRID_ORDER + 1];
        dense_ranks(indices, &mut ranks[..indices.len()]);
        encode(&ranks[..indices.len()], self.width)
    }

    /// Exact kernel value `(numerator, denominator)` for a window of indices.
    pub fn fraction(&self, indices: &[usize]) -> Result<(u32, u32)> {
        if indices.len() != self.width {
            return Err(Error::ArityMismatch { expected: self.width, found: indices.len() });
        }
        let code = self.code_of(indices);
        Ok((self.numerator[code], self.denominator[code]))
    }

    pub fn weight(&self, indices: &[usize]) -> Result<f64> {
        let (a, b) = self.fraction(indices)?;
        Ok(a as f64 / b as f64)
    }

    /// A weak order (as dense ranks) whose kernel value differs from that of
    /// its reversed complement, or `None` when the kernel is invariant.
    ///
    /// Invariance is equivalent to `T* = J T J` holding exactly on every grid.
    pub fn j_symmetry_witness(&self) -> Option<Vec<usize>> {
        let w = self.width;
        let mut ranks = vec![0; w];
        let mut mirrored = vec![0; w];
        for code in 0..self.numerator.len() {
            decode(code, w, &mut ranks);
            if !is_dense(&ranks) {
                continue;
            }
            let top = *ranks.iter().max().unwrap();
            for (dst, &r) in mirrored.iter_mut().zip(ranks.iter().rev()) {
                *dst = top - r;
            }
            let other = encode(&mirrored, w);
            if (self.numerator[code], self.denominator[code]) != (self.numerator[other], self.denominator[other]) {
                return Some(ranks);
            }
        }
        None
    }
}

fn decode(mut code: usize, width: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = code % width;
        code /= width;
    }
}

fn encode(ranks: &[usize], width: usize) -> usize {
    ranks.iter().fold(0, |acc, &r| acc * width + r)
}

fn is_dense(ranks: &[usize]) -> bool {
    let top = *ranks.iter().max().unwrap();
    (0..=top).all(|r| ranks.contains(&r))
}

fn dense_ranks(values: &[usize], out: &mut [usize]) {
    for (i, &v) in values.iter().enumerate() {
        let mut r = 0;
        for (j, &u) in values.iter().enumerate() {
            if u < v && !values[..j].contains(&u) {
                r += 1;
            }
        }
        out[i] = r;
    }
}

/// Midpoint-grid discretization of the transfer operator
/// `(Tf)(x) = ∫ χ(t, x_1..x_m) f(t, x_1..x_{m-1}) dt`, using the cell-averaged
/// indicator. Applications are matrix-free.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    spec: GridSpec,
    kernel: CellKernel,
}

/// A run of free-coordinate indices `lo..hi` sharing one kernel value.
#[derive(Clone, Copy)]
struct Slot {
    lo: usize,
    hi: usize,
    weight: f64,
}

impl TransferOperator {
    pub fn new(set: &PatternSet, spec: GridSpec) -> Result<Self> {
        if spec.m() != set.m() {
            return Err(Error::ArityMismatch { expected: set.m(), found: spec.m() });
        }
        Ok(TransferOperator { spec, kernel: CellKernel::new(set)? })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn kernel(&self) -> &CellKernel {
        &self.kernel
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        let mut out = vec![Complex64::default(); self.spec.len()];
        self.apply_slice(f.values(), &mut out, false);
        Ok(GridFunction::from_vec_unchecked(self.spec, out))
    }

    pub fn apply_adjoint(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        let mut out = vec![Complex64::default(); self.spec.len()];
        self.apply_slice(f.values(), &mut out, true);
        Ok(GridFunction::from_vec_unchecked(self.spec, out))
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        let s = f.spec();
        if s.m() != self.spec.m() {
            return Err(Error::ArityMismatch { expected: self.spec.m(), found: s.m() });
        }
        if s.n() != self.spec.n() {
            return Err(Error::InvalidGrid(format!("expected N = {}, got {}", self.spec.n(), s.n())));
        }
        Ok(())
    }

    /// Splits the free coordinate's range into runs of constant kernel value.
    fn slots(&self, others: &[usize], free_first: bool, out: &mut Vec<Slot>) {
        let m = others.len();
        let n = self.spec.n();
        let mut sorted = [0usize; MAX_GRID_ORDER];
        sorted[..m].copy_from_slice(others);
        let sorted = &mut sorted[..m];
        sorted.sort_unstable();
        let mut d = 0;
        for i in 0..m {
            if i == 0 || sorted[i] != sorted[i - 1] {
                sorted[d] = sorted[i];
                d += 1;
            }
        }
        let distinct = &sorted[..d];
        let mut base = [0usize; MAX_GRID_ORDER];
        for (b, v) in base.iter_mut().zip(others) {
            *b = distinct.iter().position(|u| u == v).unwrap();
        }
        let width = m + 1;
        let mut ranks = [0usize; MAX_GRID_ORDER + 1];
        let mut code = |t_rank: usize, shift_from: Option<usize>| {
            let (t_pos, off) = if free_first { (0, 1) } else { (m, 0) };
            ranks[t_pos] = t_rank;
            for j in 0..m {
                let r = base[j];
                ranks[j + off] = match shift_from {
                    Some(k) if r >= k => r + 1,
                    _ => r,
                };
            }
            encode(&ranks[..width], width)
        };
        out.clear();
        for k in 0..=d {
            let lo = if k == 0 { 0 } else { distinct[k - 1] + 1 };
            let hi = if k == d { n } else { distinct[k] };
            if lo < hi {
                let w = self.kernel.weight[code(k, Some(k))];
                if w != 0.0 {
                    out.push(Slot { lo, hi, weight: w });
                }
            }
            if k < d {
                let w = self.kernel.weight[code(k, None)];
                if w != 0.0 {
                    out.push(Slot { lo: distinct[k], hi: distinct[k] + 1, weight: w });
                }
            }
        }
    }

    /// `y = T x` or `y = T* x` on raw row-major slices.
    pub(crate) fn apply_slice(&self, x: &[Complex64], y: &mut [Complex64], adjoint: bool) {
        let n = self.spec.n();
        let m = self.spec.m();
        let stride = n.pow(m as u32 - 1);
        // Running sums of the input along the integrated coordinate, one row
        // of length N+1 per fixed value of the remaining coordinates.
        let mut prefix = vec![Complex64::default(); stride * (n + 1)];
        prefix.par_chunks_mut(n + 1).enumerate().for_each(|(p, row)| {
            let mut acc = Complex64::default();
            for t in 0..n {
                acc += if adjoint { x[p * n + t] } else { x[t * stride + p] };
                row[t + 1] = acc;
            }
        });
        let scale = 1.0 / n as f64;
        y.par_chunks_mut(n).enumerate().for_each_init(
            || (Vec::with_capacity(2 * MAX_GRID_ORDER + 1), vec![0usize; m]),
            |(slots, idx), (row_index, row)| {
                for (last, out) in row.iter_mut().enumerate() {
                    let flat = row_index * n + last;
                    self.spec.multi(flat, idx);
                    let p = if adjoint { flat % stride } else { flat / n };
                    self.slots(idx, !adjoint, slots);
                    let base = p * (n + 1);
                    let mut acc = Complex64::default();
                    for s in slots.iter() {
                        let sum = if s.hi - s.lo == 1 {
                            if adjoint {
                                x[p * n + s.lo]
                            } else {
                                x[s.lo * stride + p]
                            }
                        } else {
                            prefix[base + s.hi] - prefix[base + s.lo]
                        };
                        acc += sum * s.weight;
                    }
                    *out = acc * scale;
                }
            },
        );
    }
}

/// `T f` on the grid of `f`.
pub fn apply_t(set: &PatternSet, f: &GridFunction) -> Result<GridFunction> {
    TransferOperator::new(set, f.spec())?.apply(f)
}

/// `T* f` on the grid of `f`.
pub fn apply_t_adjoint(set: &PatternSet, f: &GridFunction) -> Result<GridFunction> {
    TransferOperator::new(set, f.spec())?.apply_adjoint(f)
}
