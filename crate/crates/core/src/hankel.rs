//! Finite sections of Hankel matrices `(h(j+k))_{j,k<N}` and their singular values.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::C64;

/// Largest `N` accepted by [`singular_values_dense`].
pub const DENSE_LIMIT: usize = 2048;
pub const DEFAULT_SEED: u64 = 0x5eed_1e55;
pub const DEFAULT_TOL: f64 = 1e-10;

/// `N x N` corner of the Hankel matrix of `h`.
#[derive(Clone)]
pub struct HankelOperator {
    h: Vec<C64>,
    n: usize,
    /// FFT of `h(0..2N-1)` zero-padded to length `2N`.
    symbol_hat: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for HankelOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HankelOperator").field("n", &self.n).finish_non_exhaustive()
    }
}

impl HankelOperator {
    /// Uses `h(0..2N-1)`; the series must have at least `2N - 1` entries.
    pub fn build(series: &FourierSeries, n: usize) -> Result<Self> {
        Self::from_values(&series.values, n)
    }

    pub fn from_values(h: &[C64], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("compression size must be at least 1".into()));
        }
        let required = 2 * n - 1;
        if h.len() < required {
            return Err(Error::SeriesTooShort {
                required,
                actual: h.len(),
            });
        }
        let h = h[..required].to_vec();
        let len = 2 * n;
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut symbol_hat = vec![C64::new(0.0, 0.0); len];
        symbol_hat[..required].copy_from_slice(&h);
        forward.process(&mut symbol_hat);
        Ok(Self {
            h,
            n,
            symbol_hat,
            forward,
            inverse,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `h(j + k)`.
    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.h[j + k]
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.h
    }

    /// `y(j) = sum_k h(j+k) x(k)` through a circulant embedding of size `2N`.
    pub fn matvec_fast(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n, "vector length must equal N");
        let n = self.n;
        let mut buf = vec![C64::new(0.0, 0.0); 2 * n];
        for (k, v) in x.iter().enumerate() {
            buf[n - 1 - k] = *v;
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol_hat) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / (2 * n) as f64;
        buf[n - 1..2 * n - 1].iter().map(|z| z * scale).collect()
    }

    /// `O(N^2)` reference product.
    pub fn matvec_naive(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n, "vector length must equal N");
        (0..self.n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| self.h[j + k] * v)
                    .sum()
            })
            .collect()
    }

    /// `A^* x`; the matrix is complex symmetric so `A^* x = conj(A conj(x))`.
    pub fn adjoint_matvec_fast(&self, x: &[C64]) -> Vec<C64> {
        let xc: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        self.matvec_fast(&xc).into_iter().map(|z| z.conj()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |j, k| self.h[j + k])
    }
}

/// Non-increasing singular values with accuracy data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValues {
    pub values: Vec<f64>,
    /// Leading entries whose residual met the tolerance.
    pub converged_count: usize,
    pub residual_estimates: Vec<f64>,
}

/// Full spectrum from a dense SVD.
pub fn singular_values_dense(op: &HankelOperator) -> Result<SingularValues> {
    if op.n > DENSE_LIMIT {
        return Err(Error::DenseTooLarge {
            n: op.n,
            limit: DENSE_LIMIT,
        });
    }
    let m = op.to_dense();
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let s0 = values.first().copied().unwrap_or(0.0);
    let res = f64::EPSILON * op.n as f64 * s0;
    let n = values.len();
    Ok(SingularValues {
        values,
        converged_count: n,
        residual_estimates: vec![res; n],
    })
}

/// Settings for [`singular_values_iterative`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub seed: u64,
    /// Maximum Krylov dimension; `None` picks `min(N, 6k + 150)`.
    pub max_steps: Option<usize>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_steps: None,
        }
    }
}

/// Top `k` singular values by Golub–Kahan–Lanczos bidiagonalization with
/// full reorthogonalization.
pub fn singular_values_iterative(op: &HankelOperator, k: usize, tol: f64) -> Result<SingularValues> {
    singular_values_iterative_with(op, k, tol, &LanczosOptions::default())
}

pub fn singular_values_iterative_with(
    op: &HankelOperator,
    k: usize,
    tol: f64,
    opts: &LanczosOptions,
) -> Result<SingularValues> {
    let n = op.size();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= N = {n}, got k = {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let max_steps = opts.max_steps.unwrap_or(6 * k + 150).clamp(k, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lz = Bidiagonalization::new(n, random_unit(n, &mut rng, &[]));
    let mut target = (2 * k + 10).min(max_steps);
    loop {
        while lz.steps() < target {
            lz.step(op, &mut rng);
        }
        let (values, residuals) = lz.ritz();
        let s0 = values.first().copied().unwrap_or(0.0);
        let thresh = tol * s0.max(f64::MIN_POSITIVE);
        let converged = residuals.iter().take(k).take_while(|r| **r <= thresh).count();
        if converged >= k || lz.steps() >= max_steps || s0 == 0.0 {
            let converged = if s0 == 0.0 { k } else { converged };
            return Ok(SingularValues {
                values: values[..k].to_vec(),
                converged_count: converged,
                residual_estimates: residuals[..k].to_vec(),
            });
        }
        target = (target + (target / 4).max(10)).min(max_steps);
    }
}

/// State of the bidiagonalization `A V = U B`, `A^* U = V B^T + beta v e^T`.
struct Bidiagonalization {
    n: usize,
    u: Vec<Vec<C64>>,
    v: Vec<Vec<C64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    /// Scale used to detect breakdown.
    norm_est: f64,
}

impl Bidiagonalization {
    fn new(n: usize, v0: Vec<C64>) -> Self {
        Self {
            n,
            u: Vec::new(),
            v: vec![v0],
            alphas: Vec::new(),
            betas: Vec::new(),
            norm_est: 0.0,
        }
    }

    fn steps(&self) -> usize {
        self.alphas.len()
    }

    fn step(&mut self, op: &HankelOperator, rng: &mut ChaCha8Rng) {
        let i = self.alphas.len();
        let vi = &self.v[i];
        let mut w = op.matvec_fast(vi);
        if i > 0 {
            let b = self.betas[i - 1];
            axpy(&mut w, -b, &self.u[i - 1]);
        }
        reorthogonalize(&mut w, &self.u);
        let mut alpha = norm(&w);
        self.norm_est = self.norm_est.max(alpha);
        if alpha <= breakdown(self.norm_est) {
            alpha = 0.0;
            w = random_unit(self.n, rng, &self.u);
        } else {
            scale(&mut w, 1.0 / alpha);
        }
        self.alphas.push(alpha);
        self.u.push(w);

        if self.v.len() >= self.n {
            // the right space is exhausted; the bidiagonal is exact
            self.betas.push(0.0);
            return;
        }
        let ui = &self.u[i];
        let mut z = op.adjoint_matvec_fast(ui);
        axpy(&mut z, -alpha, &self.v[i]);
        reorthogonalize(&mut z, &self.v);
        let mut beta = norm(&z);
        self.norm_est = self.norm_est.max(beta);
        if beta <= breakdown(self.norm_est) {
            beta = 0.0;
            z = random_unit(self.n, rng, &self.v);
        } else {
            scale(&mut z, 1.0 / beta);
        }
        self.betas.push(beta);
        self.v.push(z);
    }

    /// Ritz values in descending order with residual norms.
    fn ritz(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.alphas.len();
        let mut b = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            b[(i, i)] = self.alphas[i];
            if i + 1 < m {
                b[(i, i + 1)] = self.betas[i];
            }
        }
        let beta_next = self.betas.get(m - 1).copied().unwrap_or(0.0);
        let svd = b.svd(true, false);
        let uu = svd.u.expect("left vectors requested");
        let mut pairs: Vec<(f64, f64)> = svd
            .singular_values
            .iter()
            .enumerate()
            .map(|(c, s)| (*s, beta_next * uu[(m - 1, c)].abs()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs.into_iter().unzip()
    }
}

/// Below this a new direction carries no information, only rounding.
fn breakdown(norm_est: f64) -> f64 {
    norm_est * f64::EPSILON * 1e-3
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, against: &[Vec<C64>]) -> Vec<C64> {
    let mut x: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    reorthogonalize(&mut x, against);
    let nr = norm(&x);
    scale(&mut x, 1.0 / nr);
    x
}

/// Classical Gram–Schmidt, repeated once if the first pass lost too much.
fn reorthogonalize(x: &mut [C64], basis: &[Vec<C64>]) {
    if basis.is_empty() {
        return;
    }
    for _ in 0..2 {
        let before = norm(x);
        let coeffs: Vec<C64> = basis.iter().map(|q| dot(q, x)).collect();
        for (q, c) in basis.iter().zip(&coeffs) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
        if norm(x) > 0.7 * before {
            break;
        }
    }
}

/// `sum conj(a_i) b_i`.
fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(x: &mut [C64], s: f64) {
    x.iter_mut().for_each(|z| *z *= s);
}

fn axpy(y: &mut [C64], a: f64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

/// `s_0` of the Hankel operator of the shifted sequence `j -> h(j + N)` at
/// size `N`; entries beyond the series are taken as zero.
pub fn tail_norm_estimate(series: &FourierSeries, n: usize) -> Result<f64> {
    if series.len() < 2 * n - 1 {
        return Err(Error::SeriesTooShort {
            required: 2 * n - 1,
            actual: series.len(),
        });
    }
    let tail: Vec<C64> = (0..2 * n - 1)
        .map(|j| series.values.get(j + n).copied().unwrap_or_default())
        .collect();
    if tail.iter().all(|z| z.norm() == 0.0) {
        return Ok(0.0);
    }
    let op = HankelOperator::from_values(&tail, n)?;
    let sv = singular_values_iterative(&op, 1, 1e-8)?;
    Ok(sv.values[0])
}
