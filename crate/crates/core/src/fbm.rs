//! Exact sampling and covariance of real-valued fractional Brownian motion.
//!
//! The covariance convention is
//! `r(s,t) = ½(s^{2H} + t^{2H} − |s−t|^{2H})`,
//! the standard one with exponent `2H`; it is the unique choice consistent
//! with `θ_H(s,t) = H(2H−1)|s−t|^{2H−2} = ∂²r/∂s∂t` and with
//! `Var b^H(t) = t^{2H}`.
//!
//! Sampling is exact in distribution: circulant embedding of the increment
//! autocovariance (Davies-Harte, `O(n log n)`) with a dense Cholesky
//! fallback should the embedding fail to be nonnegative definite.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::stream_rng;

/// Hurst parameter, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Domain(format!(
                "Hurst parameter must lie in (0,1), got {h}"
            )));
        }
        Ok(Self(h))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `H = 1/2`, ordinary Brownian motion.
    pub fn is_brownian(&self) -> bool {
        self.0 == 0.5
    }
}

/// fBm covariance `r(s,t) = ½(s^{2H} + t^{2H} − |s−t|^{2H})` for `s, t ≥ 0`.
pub fn fbm_covariance(s: f64, t: f64, hurst: HurstParameter) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return Err(Error::Domain(format!(
            "fbm_covariance needs nonnegative times, got ({s}, {t})"
        )));
    }
    let h2 = 2.0 * hurst.value();
    Ok(0.5 * (s.powf(h2) + t.powf(h2) - (s - t).abs().powf(h2)))
}

/// `θ_H(s,t) = H(2H−1)|s−t|^{2H−2}`, the mixed second derivative of the
/// covariance; defined for `H > 1/2` and `s ≠ t`.
pub fn theta_h(s: f64, t: f64, hurst: HurstParameter) -> Result<f64> {
    let h = hurst.value();
    if h <= 0.5 {
        return Err(Error::Domain(format!(
            "theta_H requires H > 1/2, got H = {h}"
        )));
    }
    if s == t {
        return Err(Error::Singularity(format!(
            "theta_H diverges on the diagonal (s = t = {s})"
        )));
    }
    Ok(h * (2.0 * h - 1.0) * (s - t).abs().powf(2.0 * h - 2.0))
}

/// Which exact sampling route produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMethod {
    CirculantEmbedding,
    DenseCholesky,
}

/// One sampled fBm trajectory on a grid; `values[0] = 0`.
#[derive(Debug, Clone)]
pub struct FbmPath {
    grid: TimeGrid,
    values: Vec<f64>,
    hurst: HurstParameter,
    seed: u64,
    method: SamplerMethod,
}

impl FbmPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn method(&self) -> SamplerMethod {
        self.method
    }
}

enum SamplerState {
    Circulant {
        // √(λ_j / m), λ = circulant eigenvalues, m = 2n
        scaled_sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky {
        // lower factor of the n×n increment covariance
        lower: DMatrix<f64>,
    },
}

/// Reusable exact sampler for one `(grid, H)` pair.
///
/// Construction precomputes either the circulant spectrum or the Cholesky
/// factor; `sample_stream` then draws one path per `(seed, stream)` pair,
/// deterministically and independently across streams.
pub struct FbmSampler {
    grid: TimeGrid,
    hurst: HurstParameter,
    state: SamplerState,
}

/// Relative tolerance on negative circulant eigenvalues before falling back.
const CIRCULANT_TOL: f64 = 1e-12;

impl FbmSampler {
    pub fn new(grid: TimeGrid, hurst: HurstParameter) -> Result<Self> {
        let n = grid.steps();
        let gamma = increment_autocov(n, hurst, grid.dt());
        match circulant_sqrt_eigs(&gamma) {
            Some(scaled_sqrt_eigs) => {
                let fft = FftPlanner::new().plan_fft_forward(2 * n);
                Ok(Self {
                    grid,
                    hurst,
                    state: SamplerState::Circulant {
                        scaled_sqrt_eigs,
                        fft,
                    },
                })
            }
            None => {
                let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
                let radius = gamma[0] * n as f64;
                let lower = nalgebra::Cholesky::new(cov)
                    .ok_or(Error::NotPsd {
                        min_eig: f64::NAN,
                        radius,
                    })?
                    .unpack();
                Ok(Self {
                    grid,
                    hurst,
                    state: SamplerState::Cholesky { lower },
                })
            }
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn method(&self) -> SamplerMethod {
        match self.state {
            SamplerState::Circulant { .. } => SamplerMethod::CirculantEmbedding,
            SamplerState::Cholesky { .. } => SamplerMethod::DenseCholesky,
        }
    }

    /// Draw the path for `(seed, stream 0)`.
    pub fn sample(&self, seed: u64) -> FbmPath {
        self.sample_stream(seed, 0)
    }

    /// Draw one exact path; `(seed, stream)` fully determines the result.
    pub fn sample_stream(&self, seed: u64, stream: u64) -> FbmPath {
        let mut rng = stream_rng(seed, stream);
        let n = self.grid.steps();
        let increments = match &self.state {
            SamplerState::Circulant {
                scaled_sqrt_eigs,
                fft,
            } => circulant_increments(scaled_sqrt_eigs, fft.as_ref(), n, &mut rng),
            SamplerState::Cholesky { lower } => {
                let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                (0..n)
                    .map(|i| (0..=i).map(|j| lower[(i, j)] * z[j]).sum())
                    .collect()
            }
        };
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for dx in increments {
            acc += dx;
            values.push(acc);
        }
        FbmPath {
            grid: self.grid,
            values,
            hurst: self.hurst,
            seed,
            method: self.method(),
        }
    }
}

/// One exact fBm sample; convenience wrapper over [`FbmSampler`].
pub fn sample_fbm(grid: TimeGrid, hurst: HurstParameter, seed: u64) -> Result<FbmPath> {
    Ok(FbmSampler::new(grid, hurst)?.sample(seed))
}

/// Autocovariance of the fractional Gaussian noise increments:
/// `γ(k) = ½ dt^{2H} (|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`, k = 0..=n.
fn increment_autocov(n: usize, hurst: HurstParameter, dt: f64) -> Vec<f64> {
    let h2 = 2.0 * hurst.value();
    let scale = 0.5 * dt.powf(h2);
    (0..=n)
        .map(|k| {
            let k = k as f64;
            scale * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
        })
        .collect()
}

/// Eigenvalues of the circulant extension `[γ_0..γ_n, γ_{n−1}..γ_1]`,
/// prescaled to `√(λ_j/m)`; `None` if any eigenvalue is negative beyond
/// tolerance.
fn circulant_sqrt_eigs(gamma: &[f64]) -> Option<Vec<f64>> {
    let n = gamma.len() - 1;
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
    row.extend(gamma.iter().map(|&g| Complex::new(g, 0.0)));
    row.extend(gamma[1..n].iter().rev().map(|&g| Complex::new(g, 0.0)));
    debug_assert_eq!(row.len(), m);

    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut row);
    let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
    let max = eigs.iter().cloned().fold(0.0_f64, f64::max);
    if eigs.iter().any(|&e| e < -CIRCULANT_TOL * max) {
        return None;
    }
    Some(
        eigs.iter()
            .map(|&e| (e.max(0.0) / m as f64).sqrt())
            .collect(),
    )
}

/// Davies-Harte synthesis: fill a Hermitian-symmetric complex Gaussian
/// vector, scale by `√(λ/m)`, and FFT; the first `n` (real) outputs are one
/// exact fGn sample.
fn circulant_increments(
    scaled_sqrt_eigs: &[f64],
    fft: &dyn Fft<f64>,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Vec<f64> {
    let m = 2 * n;
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    let sq2 = std::f64::consts::SQRT_2;
    buf[0] = Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0) * scaled_sqrt_eigs[0];
    for j in 1..n {
        let u: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        buf[j] = Complex::new(u / sq2, v / sq2) * scaled_sqrt_eigs[j];
        buf[m - j] = Complex::new(u / sq2, -v / sq2) * scaled_sqrt_eigs[m - j];
    }
    buf[n] = Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0) * scaled_sqrt_eigs[n];
    fft.process(&mut buf);
    buf[..n].iter().map(|c| c.re).collect()
}
