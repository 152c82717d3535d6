//! Right-continuous nonnegative step functions with finite support, the
//! nonincreasing rearrangement f*, the level average f**, and the
//! Hardy-Littlewood-Polya prefix comparison.
//!
//! A [`StepFunction`] takes the value `values[i]` on `[knots[i-1], knots[i])`
//! (with `knots[-1] = 0`) and vanishes beyond the last knot. Rearrangement is
//! a sort of `(value, cell length)` pairs, so every identity here is exact up
//! to float roundoff in sums.

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Build from breakpoints and cell values; validates shape, positivity and
    /// strict monotonicity of the knots, then merges equal adjacent cells.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::invalid(format!(
                "knot/value length mismatch: {} vs {}",
                knots.len(),
                values.len()
            )));
        }
        let mut prev = 0.0;
        for &k in &knots {
            if !k.is_finite() || k <= prev {
                return Err(Error::invalid(format!(
                    "knots must be finite, positive and strictly increasing (offending knot {k})"
                )));
            }
            prev = k;
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("values must be finite and nonnegative"));
        }
        let mut f = Self { knots, values };
        f.canonicalize();
        Ok(f)
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self { knots: Vec::new(), values: Vec::new() }
    }

    /// Indicator multiple: `height` on `[0, width)`.
    pub fn block(height: f64, width: f64) -> Result<Self> {
        Self::new(vec![width], vec![height])
    }

    /// Merge adjacent cells with equal values and drop trailing zeros.
    fn canonicalize(&mut self) {
        let mut knots = Vec::with_capacity(self.knots.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.values.len());
        for i in 0..self.knots.len() {
            if let Some(last) = values.last() {
                if *last == self.values[i] {
                    *knots.last_mut().unwrap() = self.knots[i];
                    continue;
                }
            }
            knots.push(self.knots[i]);
            values.push(self.values[i]);
        }
        while values.last() == Some(&0.0) {
            values.pop();
            knots.pop();
        }
        self.knots = knots;
        self.values = values;
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Measure of the support interval, i.e. the last knot.
    pub fn support_end(&self) -> f64 {
        self.knots.last().copied().unwrap_or(0.0)
    }

    /// Cells as `(left, right, value)` triples.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |i| {
            let l = if i == 0 { 0.0 } else { self.knots[i - 1] };
            (l, self.knots[i], self.values[i])
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self.knots.iter().position(|&k| t < k) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    /// `int_0^inf f`, exact block sum.
    pub fn total_mass(&self) -> f64 {
        self.cells().map(|(l, r, v)| v * (r - l)).sum()
    }

    /// `int_0^t f`, exact.
    pub fn prefix_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.cells() {
            if t <= l {
                break;
            }
            acc += v * (t.min(r) - l);
        }
        acc
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.knots.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// True when the values are nonincreasing (i.e. the function equals its
    /// own rearrangement).
    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// The nonincreasing rearrangement f*: the same multiset of
    /// `(value, cell length)` pairs laid out from 0 in decreasing value order.
    /// Sorting is stable, so the result does not depend on tie order.
    /// Monotone inputs are returned unchanged, which makes idempotence hold
    /// bitwise.
    pub fn rearranged(&self) -> Self {
        if self.is_nonincreasing() {
            return self.clone();
        }
        let mut pairs: Vec<(f64, f64)> = self
            .cells()
            .filter(|(_, _, v)| *v > 0.0)
            .map(|(l, r, v)| (v, r - l))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut knots = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        let mut pos = 0.0;
        for (v, len) in pairs {
            pos += len;
            knots.push(pos);
            values.push(v);
        }
        let mut f = Self { knots, values };
        f.canonicalize();
        f
    }

    /// Measure of the level set `{f > lambda}`.
    pub fn level_measure(&self, lambda: f64) -> f64 {
        let mut lens: Vec<f64> = self
            .cells()
            .filter(|(_, _, v)| *v > lambda)
            .map(|(l, r, _)| r - l)
            .collect();
        // summing in sorted order makes the result independent of cell order
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lens.iter().sum()
    }

    /// f**(t) = t^{-1} int_0^t f*(s) ds. Nonincreasing, and >= f*(t).
    /// The limit value as t -> 0+ is f*(0+), the largest value of f.
    pub fn double_star(&self, t: f64) -> f64 {
        self.rearranged().double_star_monotone(t)
    }

    /// Level average assuming `self` is already nonincreasing.
    pub fn double_star_monotone(&self, t: f64) -> f64 {
        debug_assert!(self.is_nonincreasing());
        if self.values.is_empty() {
            return 0.0;
        }
        if t <= 0.0 {
            return self.values[0];
        }
        self.prefix_integral(t) / t
    }
}

/// Prefix-integral domination of rearrangements:
/// `int_0^t f* <= int_0^t g*` for all `t > 0`.
///
/// Both prefix integrals are piecewise linear, so checking at the union of
/// their knots decides the comparison; grid nodes are included as well.
/// Comparison allows relative slack 1e-12 against float roundoff.
pub fn hlp_dominates(f: &StepFunction, g: &StepFunction, grid: &GeometricGrid) -> bool {
    let fs = f.rearranged();
    let gs = g.rearranged();
    let mut points: Vec<f64> = fs
        .knots()
        .iter()
        .chain(gs.knots().iter())
        .copied()
        .chain(grid.nodes().iter().copied())
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    points.iter().all(|&t| {
        let (a, b) = (fs.prefix_integral(t), gs.prefix_integral(t));
        a <= b * (1.0 + 1e-12) + f64::MIN_POSITIVE
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn step(knots: &[f64], values: &[f64]) -> StepFunction {
        StepFunction::new(knots.to_vec(), values.to_vec()).unwrap()
    }

    /// Independent oracle: f*(t) = sup { lambda in value set : |{f > lambda}| > t }.
    fn rearranged_oracle_at(f: &StepFunction, t: f64) -> f64 {
        let mut best = 0.0f64;
        for &v in f.values() {
            if f.level_measure(v * (1.0 - 1e-12)) > t {
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn two_block_swap() {
        let f = step(&[1.0, 2.0], &[2.0, 5.0]);
        let fs = f.rearranged();
        assert_eq!(fs.knots(), &[1.0, 2.0]);
        assert_eq!(fs.values(), &[5.0, 2.0]);
    }

    #[test]
    fn monotone_input_is_fixed_point() {
        let f = step(&[0.5, 2.0, 3.0], &[4.0, 2.5, 1.0]);
        assert_eq!(f.rearranged(), f);
    }

    #[test]
    fn merges_equal_values() {
        let f = step(&[1.0, 2.0, 3.0], &[1.0, 3.0, 1.0]);
        let fs = f.rearranged();
        assert_eq!(fs.knots(), &[1.0, 3.0]);
        assert_eq!(fs.values(), &[3.0, 1.0]);
    }

    #[test]
    fn rearrangement_matches_level_set_oracle() {
        let f = step(&[0.3, 1.1, 1.5, 2.0, 6.0], &[2.0, 7.0, 1.0, 7.0, 3.0]);
        let fs = f.rearranged();
        for t in [0.0, 0.1, 0.35, 0.9, 1.2, 2.4, 5.0, 7.0] {
            assert_eq!(fs.eval(t), rearranged_oracle_at(&f, t), "t = {t}");
        }
    }

    #[test]
    fn double_star_examples() {
        let f = step(&[1.0], &[1.0]);
        assert_relative_eq!(f.double_star(2.0), 0.5);
        let f = step(&[1.0, 2.0], &[5.0, 2.0]);
        assert_relative_eq!(f.double_star(2.0), 3.5);
        assert_relative_eq!(f.double_star(1e-300), 5.0);
        assert_eq!(StepFunction::zero().double_star(1.0), 0.0);
    }

    #[test]
    fn double_star_dominates_and_decreases() {
        let f = step(&[0.2, 1.0, 4.0], &[6.0, 3.0, 0.5]);
        let fs = f.rearranged();
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let t = 0.05 * i as f64;
            let ds = f.double_star(t);
            assert!(ds >= fs.eval(t) - 1e-14);
            assert!(ds <= prev + 1e-14);
            prev = ds;
        }
    }

    #[test]
    fn hlp_examples() {
        let grid = GeometricGrid::default_grid();
        let f = step(&[2.0], &[1.0]);
        let g = step(&[1.0], &[2.0]);
        assert!(hlp_dominates(&f, &f, &grid));
        assert!(hlp_dominates(&f, &g, &grid));
        assert!(!hlp_dominates(&g, &f, &grid));
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        let cell = (1e-3..2.0f64, 0.0..5.0f64);
        proptest::collection::vec(cell, 1..12).prop_map(|cells| {
            let mut knots = Vec::new();
            let mut values = Vec::new();
            let mut pos = 0.0;
            for (len, v) in cells {
                pos += len;
                knots.push(pos);
                // quantize so equal values and ties actually occur
                values.push((v * 4.0).round() / 4.0);
            }
            StepFunction::new(knots, values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn equimeasurable_and_idempotent(f in arb_step()) {
            let fs = f.rearranged();
            // level measures agree to the last few ulps: rearranged cell
            // lengths are recovered from cumulative knots
            for &v in f.values() {
                for lambda in [v * 0.999, v] {
                    let (a, b) = (f.level_measure(lambda), fs.level_measure(lambda));
                    prop_assert!((a - b).abs() <= 8.0 * f64::EPSILON * a.max(1.0),
                        "level {lambda}: {a} vs {b}");
                }
            }
            prop_assert_eq!(fs.rearranged(), fs.clone());
            prop_assert!(fs.is_nonincreasing());
            let (ma, mb) = (f.total_mass(), fs.total_mass());
            prop_assert!((ma - mb).abs() <= 8.0 * f64::EPSILON * ma.max(1.0));
        }
    }

    #[test]
    fn prefix_integral_is_exact() {
        let f = step(&[1.0, 3.0], &[2.0, 0.5]);
        assert_relative_eq!(f.prefix_integral(0.5), 1.0);
        assert_relative_eq!(f.prefix_integral(2.0), 2.5);
        assert_relative_eq!(f.prefix_integral(10.0), 3.0);
        assert_relative_eq!(f.total_mass(), 3.0);
    }
}
