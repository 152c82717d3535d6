//! Log-uniform evaluation grids on the positive half-line.
//!
//! Every sup-type condition in this crate is a supremum over t > 0, so the
//! evaluation grid has to span many decades on both sides of 1. The default
//! covers [1e-8, 1e8] at 32 points per decade (513 nodes).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A geometric (log-uniform) grid on `[t_min, t_max]`.
///
/// Nodes satisfy `nodes[i+1]/nodes[i] = const`; the first and last node are
/// exactly `t_min` and `t_max`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometricGrid {
    t_min: f64,
    t_max: f64,
    points_per_decade: u32,
    nodes: Vec<f64>,
}

impl GeometricGrid {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite()) || t_min <= 0.0 || t_max <= t_min {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy 0 < t_min < t_max (got {t_min}, {t_max})"
            )));
        }
        if points_per_decade == 0 {
            return Err(Error::invalid("points_per_decade must be >= 1"));
        }
        let decades = (t_max / t_min).log10();
        let cells = ((decades * points_per_decade as f64).round() as usize).max(1);
        let (lo, hi) = (t_min.ln(), t_max.ln());
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| (lo + (hi - lo) * i as f64 / cells as f64).exp())
            .collect();
        nodes[0] = t_min;
        nodes[cells] = t_max;
        Ok(Self { t_min, t_max, points_per_decade, nodes })
    }

    /// The default 16-decade grid, `[1e-8, 1e8]` at 32 points per decade.
    pub fn default_grid() -> Self {
        Self::new(1e-8, 1e8, 32).expect("default grid parameters are valid")
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn points_per_decade(&self) -> u32 {
        self.points_per_decade
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Constant node ratio `nodes[i+1]/nodes[i]`.
    pub fn ratio(&self) -> f64 {
        (self.nodes[1] / self.nodes[0]).max(1.0 + f64::EPSILON)
    }

    /// Natural-log width of one grid cell.
    pub fn ln_step(&self) -> f64 {
        (self.t_max / self.t_min).ln() / (self.nodes.len() - 1) as f64
    }

    /// A grid with the same density whose range also covers `[lo, hi]`.
    /// Used when an integrand has structure outside the evaluation range,
    /// e.g. norms of functions supported beyond `t_max`.
    pub fn covering(&self, lo: f64, hi: f64) -> Self {
        let t_min = if lo.is_finite() && lo > 0.0 { self.t_min.min(lo) } else { self.t_min };
        let t_max = if hi.is_finite() && hi > 0.0 { self.t_max.max(hi) } else { self.t_max };
        Self::new(t_min, t_max, self.points_per_decade).expect("covering range is valid")
    }
}

impl Default for GeometricGrid {
    fn default() -> Self {
        Self::default_grid()
    }
}
