//! Quadrature support: Gauss rules for weakly singular kernels and the
//! product-integration weights shared by the fractional-integral and
//! resolvent code.
//!
//! `GaussRule::power_weight(n, p)` integrates `∫₀¹ v^p g(v) dv` exactly for
//! polynomial `g` up to degree `2n−1`; the nodes and weights come from the
//! Golub-Welsch eigenvalue method applied to the Jacobi(0, p) recurrence.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Number of points for smooth-cell Gauss-Legendre quadrature.
pub(crate) const GL_POINTS: usize = 12;
/// Number of points for singular-cell Gauss-Jacobi quadrature.
pub(crate) const GJ_POINTS: usize = 10;

/// Nodes in `(0,1)` and weights such that `Σ wᵢ g(vᵢ) ≈ ∫₀¹ w(v) g(v) dv`
/// with the weight function absorbed into the weights.
#[derive(Debug, Clone)]
pub(crate) struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Rule for the weight `v^p` on `[0,1]`, `p > -1`. `p = 0` is Gauss-Legendre.
    pub fn power_weight(n: usize, p: f64) -> Result<Self> {
        if !(p > -1.0) {
            return Err(Error::Domain(format!(
                "Gauss-Jacobi weight exponent must exceed -1, got {p}"
            )));
        }
        // Jacobi(a=0, b=p) monic recurrence on [-1,1], Gautschi's coefficients.
        let b = p;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        diag[0] = b / (b + 2.0);
        for (k, d) in diag.iter_mut().enumerate().skip(1) {
            let k = k as f64;
            *d = b * b / ((2.0 * k + b) * (2.0 * k + b + 2.0));
        }
        for (k, o) in off.iter_mut().enumerate() {
            let k = (k + 1) as f64; // beta_k, k >= 1
            let beta = if k == 1.0 {
                4.0 * (b + 1.0) / ((b + 2.0) * (b + 2.0) * (b + 3.0))
            } else {
                let s = 2.0 * k + b;
                4.0 * k * k * (k + b) * (k + b) / (s * s * (s * s - 1.0))
            };
            *o = beta.sqrt();
        }
        let mu0 = 2f64.powf(b + 1.0) / (b + 1.0);

        let jm = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j || j + 1 == i {
                off[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                (x, mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        // Map [-1,1] with weight (1+x)^p onto [0,1] with weight v^p.
        let scale = 2f64.powf(-(p + 1.0));
        Ok(Self {
            nodes: pairs.iter().map(|(x, _)| (1.0 + x) / 2.0).collect(),
            weights: pairs.iter().map(|(_, w)| w * scale).collect(),
        })
    }

    pub fn legendre(n: usize) -> Self {
        Self::power_weight(n, 0.0).expect("p = 0 always valid")
    }

    /// `∫₀^L v^p g(v) dv` using this rule (built with exponent `p`).
    pub fn integrate_power_cell(&self, p: f64, len: f64, g: impl Fn(f64) -> f64) -> f64 {
        let scale = len.powf(p + 1.0);
        let mut acc = 0.0;
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(len * v);
        }
        scale * acc
    }

    /// `∫_a^b g(u) du` for smooth `g` (rule must be Legendre).
    pub fn integrate_cell(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(a + len * v);
        }
        len * acc
    }
}

/// Product-integration weights for the convolution `∫₀^{t_m} k(t_m−y) f(y) dy`
/// with the power kernel `k(v) = v^{α−1}/Γ(α)` and piecewise-linear `f`.
///
/// Returns `(a, b)` indexed by the cell distance `d = m − c ≥ 1`:
/// the cell `[t_c, t_{c+1}]` contributes `f_c·a[d−1] + f_{c+1}·b[d−1]`.
/// The kernel moments are exact, so the rule integrates the interpolant
/// exactly even across the `α < 1` endpoint singularity.
pub(crate) fn power_pl_weights(alpha: f64, grid: &TimeGrid) -> (Vec<f64>, Vec<f64>) {
    let n = grid.steps();
    let h = grid.dt();
    let g1 = statrs::function::gamma::gamma(alpha + 1.0);
    let g0 = statrs::function::gamma::gamma(alpha);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for d in 1..=n {
        let lo = grid.node(d - 1);
        let hi = grid.node(d);
        // p0 = ∫ v^{α−1}/Γ(α) dv, p1 = ∫ v^α/Γ(α) dv over [lo, hi]
        let p0 = (hi.powf(alpha) - lo.powf(alpha)) / g1;
        let p1 = (hi.powf(alpha + 1.0) - lo.powf(alpha + 1.0)) / ((alpha + 1.0) * g0);
        a.push((p1 - lo * p0) / h);
        b.push((hi * p0 - p1) / h);
    }
    (a, b)
}
