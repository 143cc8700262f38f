//! Riemann-Liouville fractional integrals and derivatives of arbitrary real
//! order on uniformly sampled functions.
//!
//! Integrals use product integration: the function is replaced by its
//! piecewise-linear interpolant and the weakly singular kernel
//! `(x−y)^{α−1}/Γ(α)` is integrated exactly on every subinterval. Derivatives
//! follow the defining composition `D^α = (d/dx)^{⌈α⌉} I^{⌈α⌉−α}`, with
//! central finite differences inside and one-sided second-order differences
//! at the endpoints (endpoint nodes of derivatives are low-accuracy by
//! construction). Right-sided operators are the mirror image of the left
//! ones about the grid midpoint, which for derivatives carries the sign
//! `(−1)^{⌈α⌉}` on the outer differentiation.
//!
//! [`isometry_kernel`] is the weighted right-sided operator
//! `s ↦ (D_{t−}^{1/2−H} u^{H−1/2} f(u))(s)` from the fractional Itô
//! isometry. Its endpoint behavior is genuinely singular for `H < 1/2`
//! (both at `s = 0` and `s = t`), so it gets a sharper treatment than the
//! composition above: the boundary term of the right derivative is carried
//! analytically and every cell is integrated with a singularity-matched
//! Gauss rule against the interpolated smooth factor. Downstream quadrature
//! must exclude the endpoint nodes for `H < 1/2`; they are set to zero.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fbm::HurstParameter;
use crate::grid::TimeGrid;
use crate::quad::{power_pl_weights, GaussRule, GJ_POINTS, GL_POINTS};

/// A real-valued function sampled on a uniform grid, interpreted between
/// nodes by piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "sampled function has {} values for {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: TimeGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.num_nodes()])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// Piecewise-linear evaluation at `u ∈ [0, horizon]`.
    pub fn interp(&self, u: f64) -> f64 {
        let x = u / self.grid.dt();
        if x <= 0.0 {
            return self.values[0];
        }
        let last = self.grid.steps();
        if x >= last as f64 {
            return self.values[last];
        }
        let j = x.floor() as usize;
        let w = x - j as f64;
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// Values mirrored about the grid midpoint.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Which endpoint anchors the fractional operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn require_positive_order(alpha: f64, what: &str) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "{what} requires order alpha > 0, got {alpha}"
        )));
    }
    Ok(())
}

/// Left Riemann-Liouville fractional integral `(I_{0+}^α f)(t_j)` at every
/// node, exact against the piecewise-linear interpolant of `f`. Node 0 is 0.
pub fn frac_integral_left(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    require_positive_order(alpha, "frac_integral_left")?;
    let grid = f.grid;
    let (wa, wb) = power_pl_weights(alpha, &grid);
    let n = grid.steps();
    let mut out = vec![0.0; n + 1];
    for (m, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for c in 0..m {
            let d = m - c;
            acc += f.values[c] * wa[d - 1] + f.values[c + 1] * wb[d - 1];
        }
        *o = acc;
    }
    SampledFunction::new(grid, out)
}

/// Right Riemann-Liouville fractional integral `(I_{b−}^α f)(t_j)`; the
/// mirror image of [`frac_integral_left`] with identical weights. Node n is 0.
pub fn frac_integral_right(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    Ok(frac_integral_left(&f.reversed(), alpha)?.reversed())
}

/// Left fractional derivative `D_{0+}^α f = (d/dx)^{⌈α⌉} I^{⌈α⌉−α} f`.
///
/// Endpoint nodes use one-sided differences and carry lower accuracy;
/// functions with endpoint singularities degrade further for `α ∈ (0,1)`.
pub fn frac_derivative_left(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    require_positive_order(alpha, "frac_derivative_left")?;
    if f.grid.steps() < 2 {
        return Err(Error::Domain(
            "fractional derivatives need at least two grid steps".into(),
        ));
    }
    let p = alpha.ceil() as usize;
    let frac = p as f64 - alpha;
    let mut g = if frac > 0.0 {
        frac_integral_left(f, frac)?
    } else {
        f.clone()
    };
    let h = f.grid.dt();
    for _ in 0..p {
        g = SampledFunction::new(f.grid, fd_derivative(&g.values, h))?;
    }
    Ok(g)
}

/// Right fractional derivative, the mirror image of
/// [`frac_derivative_left`]; reflection flips `d/dx`, so the outer
/// differentiation carries the sign `(−1)^{⌈α⌉}` relative to the left form.
pub fn frac_derivative_right(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    Ok(frac_derivative_left(&f.reversed(), alpha)?.reversed())
}

/// Signed-order dispatcher: `frac_op(f, side, α)` is `D^α` for `α > 0`,
/// `I^{−α}` for `α < 0` (the convention `D^{−α} = I^α`), and the identity
/// for `α = 0`.
pub fn frac_op(f: &SampledFunction, side: Side, alpha: f64) -> Result<SampledFunction> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite order {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    match (side, alpha > 0.0) {
        (Side::Left, true) => frac_derivative_left(f, alpha),
        (Side::Left, false) => frac_integral_left(f, -alpha),
        (Side::Right, true) => frac_derivative_right(f, alpha),
        (Side::Right, false) => frac_integral_right(f, -alpha),
    }
}

/// Componentwise application of [`frac_op`] to a vector-valued function.
pub fn frac_op_vector(
    components: &[SampledFunction],
    side: Side,
    alpha: f64,
) -> Result<Vec<SampledFunction>> {
    components.iter().map(|f| frac_op(f, side, alpha)).collect()
}

/// Second-order finite differences on a uniform grid: central inside,
/// one-sided at the endpoints.
pub(crate) fn fd_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let mut d = vec![0.0; n + 1];
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for j in 1..n {
        d[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h);
    d
}

/// The isometry kernel `s ↦ (D_{t−}^{1/2−H} u^{H−1/2} f(u))(s)` on the grid
/// of `f` (so `t` is the grid horizon).
///
/// - `H = 1/2`: identity (zero-order operator, unit weight).
/// - `H > 1/2`: right fractional integral of order `H−1/2` of
///   `u^{H−1/2} f(u)`, by cell-wise Gauss quadrature with the kernel
///   singularity absorbed into a Gauss-Jacobi weight on the adjacent cell.
/// - `H < 1/2`: genuine right derivative of order `1/2−H`, computed from
///   the integrated-by-parts representation
///   `(D_{t−}^β w)(s) = [w(t)(t−s)^{−β} − ∫_s^t (u−s)^{−β} w'(u) du]/Γ(1−β)`
///   so that the endpoint-singular boundary term is exact. The true kernel
///   diverges at both `s = 0` and `s = t`; those two nodes are set to zero
///   and must be excluded by downstream quadrature (open rule).
pub fn isometry_kernel(f: &SampledFunction, hurst: HurstParameter) -> Result<SampledFunction> {
    let h_val = hurst.value();
    if h_val == 0.5 {
        return Ok(f.clone());
    }
    let grid = f.grid;
    let n = grid.steps();
    if n < 2 {
        return Err(Error::Domain(
            "isometry kernel needs at least two grid steps".into(),
        ));
    }
    let t = grid.horizon();
    let step = grid.dt();
    let q = h_val - 0.5;
    let gl = GaussRule::legendre(GL_POINTS);

    let mut out = vec![0.0; n + 1];
    if h_val > 0.5 {
        let ord = h_val - 0.5; // integral order
        let p = ord - 1.0;
        let adj = GaussRule::power_weight(GJ_POINTS, p)?;
        let adj0 = GaussRule::power_weight(GJ_POINTS, p + q)?;
        let cells = cache_cells(&gl, &grid, |u| u.powf(q) * f.interp(u));
        let norm = gamma(ord);
        for (j, o) in out.iter_mut().enumerate().take(n) {
            let s = grid.node(j);
            let mut acc = if j == 0 {
                // combined power (u−0)^p · u^q on the first cell
                adj0.integrate_power_cell(p + q, step, |v| f.interp(v))
            } else {
                adj.integrate_power_cell(p, step, |v| {
                    let u = s + v;
                    u.powf(q) * f.interp(u)
                })
            };
            for cell in &cells[j + 1..] {
                acc += cell.sum_against(&gl, s, p);
            }
            *o = acc / norm;
        }
        // a right integral vanishes at the right endpoint; out[n] stays 0
    } else {
        let beta = 0.5 - h_val; // derivative order
        let p = -beta;
        let adj = GaussRule::power_weight(GJ_POINTS, p)?;
        let fprime = SampledFunction::new(grid, fd_derivative(&f.values, step))?;
        let wprime = |u: f64| u.powf(q) * fprime.interp(u) + q * u.powf(q - 1.0) * f.interp(u);
        let cells = cache_cells(&gl, &grid, wprime);
        let boundary = t.powf(q) * f.values[n];
        let norm = gamma(1.0 - beta);
        for (j, o) in out.iter_mut().enumerate().take(n).skip(1) {
            let s = grid.node(j);
            let mut acc = adj.integrate_power_cell(p, step, |v| wprime(s + v));
            for cell in &cells[j + 1..] {
                acc += cell.sum_against(&gl, s, p);
            }
            *o = (boundary * (t - s).powf(-beta) - acc) / norm;
        }
        // the kernel diverges at s = 0 and s = t for H < 1/2; nodes stay 0
    }
    SampledFunction::new(grid, out)
}

/// Per-cell cache of the smooth evaluand at Gauss-Legendre nodes.
struct CellCache {
    us: [f64; GL_POINTS],
    vals: [f64; GL_POINTS],
    len: f64,
}

impl CellCache {
    /// `∫_cell (u−s)^p · evaluand(u) du` via the cached values.
    fn sum_against(&self, gl: &GaussRule, s: f64, p: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..GL_POINTS {
            acc += gl.weights[i] * (self.us[i] - s).powf(p) * self.vals[i];
        }
        self.len * acc
    }
}

fn cache_cells(gl: &GaussRule, grid: &TimeGrid, eval: impl Fn(f64) -> f64) -> Vec<CellCache> {
    let step = grid.dt();
    (0..grid.steps())
        .map(|c| {
            let a = grid.node(c);
            let mut us = [0.0; GL_POINTS];
            let mut vals = [0.0; GL_POINTS];
            for i in 0..GL_POINTS {
                us[i] = a + step * gl.nodes[i];
                vals[i] = eval(us[i]);
            }
            CellCache {
                us,
                vals,
                len: step,
            }
        })
        .collect()
}
