//! Uniform time grid shared by all sampled functions and paths.

use crate::error::{Error, Result};

/// Uniform discretization of `[0, T]` with nodes `t_j = j·dt`, `j = 0..=steps`.
///
/// The step is stored directly so that prefix grids share bitwise-identical
/// nodes with their parent. Nonuniform grids are not supported: both the
/// fractional quadrature weights and the circulant fBm embedding assume
/// uniformity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    /// Grid on `[0, horizon]` with `steps` uniform steps.
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Domain(format!(
                "grid horizon must be finite and positive, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::Domain("grid needs at least one step".into()));
        }
        Ok(Self {
            dt: horizon / steps as f64,
            steps,
        })
    }

    /// Grid defined by its step size.
    pub fn from_step(dt: f64, steps: usize) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::Domain(format!(
                "grid step must be finite and positive, got {dt}"
            )));
        }
        if steps == 0 {
            return Err(Error::Domain("grid needs at least one step".into()));
        }
        Ok(Self { dt, steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `steps + 1`.
    pub fn num_nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn horizon(&self) -> f64 {
        self.node(self.steps)
    }

    /// Node `t_j = j·dt`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|j| self.node(j))
    }

    /// The grid `[0, t_m]` sharing this grid's nodes.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.steps {
            return Err(Error::Domain(format!(
                "prefix length {m} outside 1..={}",
                self.steps
            )));
        }
        Ok(Self {
            dt: self.dt,
            steps: m,
        })
    }

    /// Index of the node equal to `t`, if `t` lies on the grid.
    pub fn node_index(&self, t: f64) -> Result<usize> {
        let x = t / self.dt;
        let j = x.round();
        if (x - j).abs() > 1e-9 * (1.0 + x.abs()) || j < 0.0 || j > self.steps as f64 {
            return Err(Error::Domain(format!(
                "t = {t} is not a node of the grid (dt = {}, steps = {})",
                self.dt, self.steps
            )));
        }
        Ok(j as usize)
    }

    pub(crate) fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {:?} vs {:?}",
                self, other
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_uniform_and_increasing() {
        let g = TimeGrid::new(2.0, 8).unwrap();
        assert_eq!(g.num_nodes(), 9);
        assert_eq!(g.node(0), 0.0);
        assert!((g.horizon() - 2.0).abs() < 1e-15);
        let nodes: Vec<f64> = g.nodes().collect();
        for w in nodes.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn prefix_shares_nodes_bitwise() {
        let g = TimeGrid::new(1.0, 7).unwrap();
        let p = g.prefix(5).unwrap();
        for j in 0..=5 {
            assert_eq!(g.node(j).to_bits(), p.node(j).to_bits());
        }
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(-1.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(f64::NAN, 4).is_err());
    }

    #[test]
    fn node_index_roundtrip_and_offgrid() {
        let g = TimeGrid::new(1.0, 64).unwrap();
        assert_eq!(g.node_index(g.node(17)).unwrap(), 17);
        assert!(g.node_index(0.013).is_err());
        assert!(g.node_index(2.0).is_err());
    }
}
