//! Matrix-free eigensolvers for real-kernel operators on weighted spaces.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

type C = Complex64;

/// A linear operator with a real kernel acting on vectors of quadrature
/// samples. `weight(i)` is the quadrature weight of sample `i`; the inner
/// product is `Σ w_i a_i conj(b_i)` and `apply_adjoint` must be the adjoint
/// with respect to it.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn weight(&self, i: usize) -> f64;
    fn apply(&self, x: &[C], y: &mut [C]);
    fn apply_adjoint(&self, x: &[C], y: &mut [C]);
}

/// The adjoint of an operator, itself an operator.
pub struct Adjoint<'a, O: ?Sized>(pub &'a O);

impl<O: LinearOperator + ?Sized> LinearOperator for Adjoint<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn weight(&self, i: usize) -> f64 {
        self.0.weight(i)
    }
    fn apply(&self, x: &[C], y: &mut [C]) {
        self.0.apply_adjoint(x, y)
    }
    fn apply_adjoint(&self, x: &[C], y: &mut [C]) {
        self.0.apply(x, y)
    }
}

pub fn inner<O: LinearOperator + ?Sized>(op: &O, a: &[C], b: &[C]) -> C {
    a.iter().zip(b).enumerate().map(|(i, (x, y))| x * y.conj() * op.weight(i)).sum()
}

/// `Σ w_i a_i b_i`, the pairing under which `apply_adjoint` is a transpose.
pub fn bilinear<O: LinearOperator + ?Sized>(op: &O, a: &[C], b: &[C]) -> C {
    a.iter().zip(b).enumerate().map(|(i, (x, y))| x * y * op.weight(i)).sum()
}

pub fn norm<O: LinearOperator + ?Sized>(op: &O, a: &[C]) -> f64 {
    a.iter().enumerate().map(|(i, x)| x.norm_sqr() * op.weight(i)).sum::<f64>().sqrt()
}

fn unit<O: LinearOperator + ?Sized>(op: &O) -> Vec<C> {
    vec![C::new(1.0, 0.0); op.dim()]
}

/// Scales to unit norm and rotates the first significant entry onto the
/// positive real axis.
fn normalize<O: LinearOperator + ?Sized>(op: &O, v: &mut [C]) {
    let nv = norm(op, v);
    if nv == 0.0 {
        return;
    }
    let big = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let lead = v.iter().find(|x| x.norm() > 1e-8 * big).copied().unwrap_or(C::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    for x in v.iter_mut() {
        *x *= phase / nv;
    }
}

/// Constant function plus a seeded perturbation, so that no invariant
/// subspace (such as the functions even under a symmetry) traps the start.
fn start_vector<O: LinearOperator + ?Sized>(op: &O, seed: u64, amplitude: f64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..op.dim()).map(|_| C::new(1.0 + amplitude * rng.gen_range(-1.0..1.0), 0.0)).collect()
}

/// `‖T v − λ v‖` for a given pair.
pub fn residual<O: LinearOperator + ?Sized>(op: &O, lambda: C, v: &[C]) -> f64 {
    let mut w = vec![C::default(); op.dim()];
    op.apply(v, &mut w);
    for (a, b) in w.iter_mut().zip(v) {
        *a -= lambda * b;
    }
    norm(op, &w) / norm(op, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerOptions {
    /// Required relative residual `‖Tφ − λφ‖ / |λ|`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions { tol: 1e-9, max_iter: 10_000, seed: 0 }
    }
}

/// Relative eigenvalue change below which the estimate counts as settled.
pub const CHANGE_TOL: f64 = 1e-10;
const WINDOW: usize = 50;
/// Relative modulus gap below which two leading eigenvalues count as tied.
pub const TIE_GAP: f64 = 0.01;
const START_AMPLITUDE: f64 = 0.1;

/// An eigenpair as raw sample vectors.
#[derive(Debug, Clone)]
pub struct RawPair {
    pub eigenvalue: C,
    pub phi: Vec<C>,
    pub psi: Vec<C>,
    pub coefficient: C,
    pub residual: f64,
}

fn dominant_vector<O: LinearOperator + ?Sized>(op: &O, opts: &PowerOptions) -> Result<(C, Vec<C>, f64)> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut v = start_vector(op, opts.seed, START_AMPLITUDE);
    normalize_plain(op, &mut v)?;
    let mut w = vec![C::default(); op.dim()];
    let mut lambdas: Vec<C> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for it in 0..opts.max_iter {
        op.apply(&v, &mut w);
        let nw = norm(op, &w);
        if nw == 0.0 || !nw.is_finite() {
            return Err(Error::DegenerateOperator);
        }
        let lambda = inner(op, &w, &v);
        let r = w
            .iter()
            .zip(&v)
            .enumerate()
            .map(|(i, (a, b))| (a - lambda * b).norm_sqr() * op.weight(i))
            .sum::<f64>()
            .sqrt();
        if r <= opts.tol * lambda.norm() {
            return Ok((lambda, v, r));
        }
        lambdas.push(lambda);
        residuals.push(r / lambda.norm().max(f64::MIN_POSITIVE));
        if it + 1 >= WINDOW && stalled(&lambdas, &residuals) {
            return Err(Error::NotDominated);
        }
        for (a, b) in v.iter_mut().zip(&w) {
            *a = b / nw;
        }
    }
    Err(Error::NotDominated)
}

fn normalize_plain<O: LinearOperator + ?Sized>(op: &O, v: &mut [C]) -> Result<()> {
    let nv = norm(op, v);
    if nv == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Ok(())
}

/// True when the Rayleigh estimate keeps oscillating by more than
/// `100·CHANGE_TOL` over the last window without decaying (a complex pair),
/// or when the residual contracts so slowly that the two leading moduli are
/// within `TIE_GAP` of each other.
fn stalled(lambdas: &[C], residuals: &[f64]) -> bool {
    let k = lambdas.len();
    let scale = lambdas[k - 1].norm().max(f64::MIN_POSITIVE);
    let spread = |w: &[C]| {
        let mean: C = w.iter().sum::<C>() / w.len() as f64;
        w.iter().map(|x| (x - mean).norm()).fold(0.0, f64::max)
    };
    let recent = &lambdas[k - WINDOW..];
    let amplitude = spread(recent);
    // Only increments above the settling threshold count, so rounding noise
    // after convergence is not mistaken for oscillation.
    let steps: Vec<f64> =
        recent.windows(2).map(|w| (w[1] - w[0]).re).filter(|d| d.abs() > CHANGE_TOL * scale).collect();
    let sign_changes = steps.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let persistent = spread(&recent[WINDOW / 2..]) >= 0.5 * spread(&recent[..WINDOW / 2]);
    let oscillating = amplitude > 100.0 * CHANGE_TOL * scale && sign_changes >= 4 && persistent;
    // Residual contraction per step estimates |λ_2/λ_1|; a ratio this close
    // to 1 is a tie the grid cannot separate.
    let tied = k > WINDOW && (residuals[k - 1] / residuals[k - 1 - WINDOW]).powf(1.0 / WINDOW as f64) > 1.0 - TIE_GAP;
    oscillating || tied
}

/// `⟨φ,𝟏⟩⟨𝟏,ψ̄⟩ / ⟨φ,ψ̄⟩`, the weight of `λ^j` in `⟨T^j 𝟏, 𝟏⟩`.
pub fn expansion_coefficient<O: LinearOperator + ?Sized>(op: &O, phi: &[C], psi: &[C]) -> C {
    let one = unit(op);
    bilinear(op, phi, &one) * bilinear(op, &one, psi) / bilinear(op, phi, psi)
}

/// Dominant eigenpair by power iteration on `T` and on `T*`.
pub fn power_iteration_op<O: LinearOperator + ?Sized>(op: &O, opts: &PowerOptions) -> Result<RawPair> {
    let (eigenvalue, mut phi, _) = dominant_vector(op, opts)?;
    let (_, mut psi, _) = dominant_vector(&Adjoint(op), opts)?;
    normalize(op, &mut phi);
    normalize(op, &mut psi);
    let coefficient = expansion_coefficient(op, &phi, &psi);
    let residual = residual(op, eigenvalue, &phi);
    Ok(RawPair { eigenvalue, phi, psi, coefficient, residual })
}

/// Ritz pairs from one Arnoldi cycle.
#[derive(Debug, Clone)]
pub struct ArnoldiOutput {
    pub pairs: Vec<RawPair>,
    /// The Krylov space became invariant before reaching the requested size.
    pub breakdown: bool,
    pub krylov_used: usize,
}

pub const MAX_KRYLOV: usize = 64;

struct Krylov {
    basis: Vec<Vec<C>>,
    h: Vec<Vec<C>>,
    breakdown: bool,
}

fn krylov<O: LinearOperator + ?Sized>(op: &O, dim: usize, seed: u64) -> Result<Krylov> {
    let mut v0 = start_vector(op, seed, START_AMPLITUDE);
    normalize_plain(op, &mut v0)?;
    let mut basis = vec![v0];
    let mut h = vec![vec![C::default(); dim]; dim + 1];
    let mut breakdown = false;
    let mut scale = 0.0f64;
    for j in 0..dim {
        let mut w = vec![C::default(); op.dim()];
        op.apply(&basis[j], &mut w);
        scale = scale.max(norm(op, &w));
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = inner(op, &w, b);
                h[i][j] += c;
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nw = norm(op, &w);
        h[j + 1][j] = C::new(nw, 0.0);
        if nw <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            breakdown = true;
            break;
        }
        if j + 1 < dim {
            w.iter_mut().for_each(|x| *x /= nw);
            basis.push(w);
        }
    }
    if scale == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    let size = basis.len();
    h.truncate(size);
    h.iter_mut().for_each(|row| row.truncate(size));
    Ok(Krylov { basis, h, breakdown })
}

/// Ritz values, nearly real ones snapped to the real axis and complex ones
/// made exact conjugate pairs, as they must be for a real kernel. Sorted by
/// modulus, positive imaginary part first within a pair.
fn ritz_values(h: &[Vec<C>]) -> Result<Vec<C>> {
    const SNAP: f64 = 1e-9;
    let mut values = hessenberg_eigenvalues(h.to_vec())?;
    for v in values.iter_mut() {
        if v.im.abs() <= SNAP * v.norm() {
            v.im = 0.0;
        }
    }
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] || values[i].im <= 0.0 {
            continue;
        }
        let target = values[i].conj();
        let partner = (0..values.len())
            .filter(|&j| !used[j] && values[j].im < 0.0)
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        if let Some(j) = partner {
            let avg = (values[i] + values[j].conj()) / 2.0;
            values[i] = avg;
            values[j] = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    Ok(values)
}

/// Ritz vector `V y` for a Ritz value, with `y` from inverse iteration on `H`.
fn ritz_vector<O: LinearOperator + ?Sized>(op: &O, kr: &Krylov, mu: C) -> Vec<C> {
    let y = inverse_iteration(&kr.h, mu);
    let mut x = vec![C::default(); op.dim()];
    for (b, c) in kr.basis.iter().zip(&y) {
        x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += c * bi);
    }
    if mu.im == 0.0 {
        normalize(op, &mut x);
        x.iter_mut().for_each(|v| v.im = 0.0);
    }
    normalize(op, &mut x);
    x
}

/// Top `k` eigenpairs by modulus from a Krylov space of dimension
/// `krylov_dim` built from the (perturbed) constant function.
pub fn arnoldi_op<O: LinearOperator + ?Sized>(op: &O, k: usize, krylov_dim: usize, seed: u64) -> Result<ArnoldiOutput> {
    if k == 0 || k >= krylov_dim || krylov_dim > MAX_KRYLOV {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < krylov_dim <= {MAX_KRYLOV}, got k = {k}, krylov_dim = {krylov_dim}"
        )));
    }
    let dim = krylov_dim.min(op.dim());
    let right = krylov(op, dim, seed)?;
    let left = krylov(&Adjoint(op), dim, seed)?;
    let right_values = ritz_values(&right.h)?;
    let left_values = ritz_values(&left.h)?;
    let mut pairs: Vec<RawPair> = Vec::with_capacity(k);
    for &mu in right_values.iter().take(k) {
        // The second member of a conjugate pair reuses the first.
        if let Some(first) = pairs.iter().find(|p| mu.im < 0.0 && p.eigenvalue == mu.conj()) {
            let phi: Vec<C> = first.phi.iter().map(|x| x.conj()).collect();
            let psi: Vec<C> = first.psi.iter().map(|x| x.conj()).collect();
            let coefficient = first.coefficient.conj();
            let residual = residual(op, mu, &phi);
            pairs.push(RawPair { eigenvalue: mu, phi, psi, coefficient, residual });
            continue;
        }
        let phi = ritz_vector(op, &right, mu);
        let nearest =
            left_values.iter().copied().min_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm())).unwrap_or(mu);
        let psi = ritz_vector(op, &left, nearest);
        let coefficient = expansion_coefficient(op, &phi, &psi);
        let residual = residual(op, mu, &phi);
        pairs.push(RawPair { eigenvalue: mu, phi, psi, coefficient, residual });
    }
    Ok(ArnoldiOutput { pairs, breakdown: right.breakdown, krylov_used: right.basis.len() })
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with Givens
/// rotations and Wilkinson shifts.
pub fn hessenberg_eigenvalues(mut h: Vec<Vec<C>>) -> Result<Vec<C>> {
    let n = h.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let eps = f64::EPSILON;
    loop {
        if hi == 0 {
            out.push(h[0][0]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[l][l].norm() + h[l - 1][l - 1].norm();
            if h[l][l - 1].norm() <= eps * s.max(f64::MIN_POSITIVE) {
                h[l][l - 1] = C::default();
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NoConvergence(total));
        }
        let a = h[hi - 1][hi - 1];
        let b = h[hi - 1][hi];
        let c = h[hi][hi - 1];
        let d = h[hi][hi];
        let mu = if iter % 11 == 10 {
            d + h[hi][hi - 1].norm() * 0.75
        } else {
            let tr = a + d;
            let disc = ((a - d) * (a - d) / 4.0 + b * c).sqrt();
            let m1 = tr / 2.0 + disc;
            let m2 = tr / 2.0 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 { (C::new(1.0, 0.0), C::default()) } else { (x / r, y / r) };
            for j in k..=hi {
                let p = h[k][j];
                let q = h[k + 1][j];
                h[k][j] = cs.conj() * p + sn.conj() * q;
                h[k + 1][j] = -sn * p + cs * q;
            }
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(l) {
                let p = row[k];
                let q = row[k + 1];
                row[k] = p * cs + q * sn;
                row[k + 1] = -p * sn.conj() + q * cs.conj();
            }
        }
        for k in l..=hi {
            h[k][k] += mu;
        }
    }
    Ok(out)
}

/// Eigenvector of a small dense matrix for an approximate eigenvalue.
fn inverse_iteration(h: &[Vec<C>], mu: C) -> Vec<C> {
    let n = h.len();
    let scale = h.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    let shift = mu + C::new(scale * 1e-12, 0.0);
    let mut a: Vec<Vec<C>> = h.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    let lu = lu_factor(a, scale * 1e-14);
    let mut y = vec![C::new(1.0, 0.0); n];
    for _ in 0..3 {
        y = lu_solve(&lu, &y);
        let ny = y.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        y.iter_mut().for_each(|x| *x /= ny);
    }
    y
}

struct Lu {
    a: Vec<Vec<C>>,
    perm: Vec<usize>,
}

fn lu_factor(mut a: Vec<Vec<C>>, floor: f64) -> Lu {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        a.swap(k, p);
        perm.swap(k, p);
        if a[k][k].norm() < floor {
            a[k][k] = C::new(floor, 0.0);
        }
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            a[i][k] = f;
            for j in k + 1..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    Lu { a, perm }
}

fn lu_solve(lu: &Lu, b: &[C]) -> Vec<C> {
    let n = b.len();
    let mut y: Vec<C> = lu.perm.iter().map(|&i| b[i]).collect();
    for i in 0..n {
        for j in 0..i {
            let t = lu.a[i][j] * y[j];
            y[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = lu.a[i][j] * y[j];
            y[i] -= t;
        }
        y[i] /= lu.a[i][i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense real matrix with unit weights.
    struct Dense {
        a: Vec<Vec<f64>>,
    }

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.a.len()
        }
        fn weight(&self, _: usize) -> f64 {
            1.0
        }
        fn apply(&self, x: &[C], y: &mut [C]) {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.a[i].iter().zip(x).map(|(a, b)| b * *a).sum();
            }
        }
        fn apply_adjoint(&self, x: &[C], y: &mut [C]) {
            for (j, yj) in y.iter_mut().enumerate() {
                *yj = self.a.iter().zip(x).map(|(row, b)| b * row[j]).sum();
            }
        }
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn qr_on_small_matrices() {
        let h = vec![vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]];
        let mut e = hessenberg_eigenvalues(h).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] - c(-1.0, 0.0)).norm() < 1e-14 && (e[1] - c(2.0, 0.0)).norm() < 1e-14);

        // Rotation by 90 degrees scaled by 1/2: eigenvalues ±i/2.
        let h = vec![vec![c(0.0, 0.0), c(-0.5, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)]];
        let mut e = hessenberg_eigenvalues(h).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - c(0.0, -0.5)).norm() < 1e-14 && (e[1] - c(0.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn qr_matches_companion_roots() {
        // Companion matrix of (x-1)(x-2)(x-3)(x^2+1) in Hessenberg form.
        let coeffs = [-6.0, 11.0, -12.0, 12.0, -6.0]; // x^5 - 6x^4 + 12x^3 - 12x^2 + 11x - 6
        let n = 5;
        let mut h = vec![vec![c(0.0, 0.0); n]; n];
        for i in 1..n {
            h[i][i - 1] = c(1.0, 0.0);
        }
        for (i, &a) in coeffs.iter().enumerate() {
            h[i][n - 1] = c(-a, 0.0);
        }
        let e = hessenberg_eigenvalues(h).unwrap();
        for root in [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(e.iter().any(|x| (x - root).norm() < 1e-9), "{root} not in {e:?}");
        }
    }

    #[test]
    fn power_iteration_dense() {
        let op = Dense { a: vec![vec![0.5, 0.2, 0.0], vec![0.1, 0.3, 0.1], vec![0.0, 0.2, 0.4]] };
        let p = power_iteration_op(&op, &PowerOptions::default()).unwrap();
        assert!(p.residual <= 1e-9 * p.eigenvalue.norm());
        // Reference from the characteristic polynomial by bisection.
        let det = |l: f64| {
            let a = &op.a;
            (a[0][0] - l) * ((a[1][1] - l) * (a[2][2] - l) - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * (a[2][2] - l) - a[1][2] * a[2][0])
        };
        let (mut lo, mut hi) = (0.55, 1.0);
        for _ in 0..100 {
            let mid = (lo + hi) / 2.0;
            if det(lo) * det(mid) <= 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        assert!((p.eigenvalue.re - lo).abs() < 1e-9, "{} vs {lo}", p.eigenvalue);
        // Coefficient equals the limit of <A^j 1, 1> / λ^j.
        let mut v = vec![c(1.0, 0.0); 3];
        let mut w = vec![C::default(); 3];
        for _ in 0..200 {
            op.apply(&v, &mut w);
            v.copy_from_slice(&w);
        }
        let direct = v.iter().sum::<C>() / p.eigenvalue.powi(200);
        assert!((direct - p.coefficient).norm() < 1e-7, "{direct} {}", p.coefficient);
    }

    #[test]
    fn power_iteration_failures() {
        let flip = Dense { a: vec![vec![0.0, 1.0], vec![1.0, 0.0]] };
        assert_eq!(power_iteration_op(&flip, &PowerOptions::default()).unwrap_err(), Error::NotDominated);
        let rot = Dense { a: vec![vec![0.6, -0.8], vec![0.8, 0.6]] };
        assert_eq!(power_iteration_op(&rot, &PowerOptions::default()).unwrap_err(), Error::NotDominated);
        let zero = Dense { a: vec![vec![0.0, 0.0], vec![0.0, 0.0]] };
        assert_eq!(power_iteration_op(&zero, &PowerOptions::default()).unwrap_err(), Error::DegenerateOperator);
        let opts = PowerOptions { tol: 0.0, ..Default::default() };
        assert!(power_iteration_op(&flip, &opts).is_err());
    }

    #[test]
    fn arnoldi_dense() {
        // Block diagonal: a rotation-scaling block with eigenvalues 0.3 ± 0.4i
        // and a diagonal tail.
        let n = 8;
        let mut a = vec![vec![0.0; n]; n];
        a[0][0] = 0.3;
        a[0][1] = -0.4;
        a[1][0] = 0.4;
        a[1][1] = 0.3;
        for (i, d) in [0.9, -0.7, 0.2, 0.1, 0.05, -0.01].iter().enumerate() {
            a[i + 2][i + 2] = *d;
        }
        let op = Dense { a };
        let out = arnoldi_op(&op, 4, 8, 3).unwrap();
        let vals: Vec<C> = out.pairs.iter().map(|p| p.eigenvalue).collect();
        assert!((vals[0] - c(0.9, 0.0)).norm() < 1e-10);
        assert!((vals[1] - c(-0.7, 0.0)).norm() < 1e-10);
        assert!((vals[2] - c(0.3, 0.4)).norm() < 1e-10);
        assert_eq!(vals[3], vals[2].conj());
        for p in &out.pairs {
            assert!(p.residual < 1e-9);
        }
        assert!(arnoldi_op(&op, 4, 4, 0).is_err());
        assert!(arnoldi_op(&op, 2, 65, 0).is_err());
    }

    #[test]
    fn arnoldi_breakdown_is_flagged() {
        let op = Dense { a: vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.25, 0.0], vec![0.0, 0.0, 0.125]] };
        let out = arnoldi_op(&op, 2, 10, 0).unwrap();
        assert!(out.breakdown);
        assert!((out.pairs[0].eigenvalue - c(0.5, 0.0)).norm() < 1e-12);
    }
}
