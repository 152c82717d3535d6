//! Two-variable kernels: piecewise-constant sampled kernels on a finite
//! window, their iterated rearrangement (rearrange each row in the second
//! variable, then rearrange in the first), and kernels given directly in
//! iterated-rearranged form as evaluators.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;
use crate::operators::apply_tk;
use crate::quad::TailSpec;
use crate::step::StepFunction;

/// A nonnegative kernel constant on the product cells of two partitions of
/// intervals `[0, X)` and `[0, Y)`. Cells are described by their measures;
/// cell `(i, j)` occupies the product of the i-th x-interval and j-th
/// y-interval laid out from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledKernel {
    x_measures: Vec<f64>,
    y_measures: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl SampledKernel {
    pub fn new(x_measures: Vec<f64>, y_measures: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if x_measures.is_empty() || y_measures.is_empty() {
            return Err(Error::invalid("kernel needs at least one cell per axis"));
        }
        for m in x_measures.iter().chain(y_measures.iter()) {
            if !m.is_finite() || *m <= 0.0 {
                return Err(Error::invalid(format!("cell measures must be positive (got {m})")));
            }
        }
        if values.len() != x_measures.len()
            || values.iter().any(|row| row.len() != y_measures.len())
        {
            return Err(Error::invalid("kernel value matrix shape does not match cell counts"));
        }
        if values.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("kernel values must be finite and nonnegative"));
        }
        Ok(Self { x_measures, y_measures, values })
    }

    /// Constant kernel `c` on the window spanned by the given measures.
    pub fn constant(c: f64, x_measures: Vec<f64>, y_measures: Vec<f64>) -> Result<Self> {
        let values = vec![vec![c; y_measures.len()]; x_measures.len()];
        Self::new(x_measures, y_measures, values)
    }

    /// Sample a kernel function at cell midpoints over the given partitions
    /// (boundaries starting at 0).
    pub fn from_function<F: Fn(f64, f64) -> f64>(
        f: F,
        x_breaks: &[f64],
        y_breaks: &[f64],
    ) -> Result<Self> {
        let mids = |b: &[f64]| -> Vec<f64> {
            let mut prev = 0.0;
            b.iter()
                .map(|&x| {
                    let m = 0.5 * (prev + x);
                    prev = x;
                    m
                })
                .collect()
        };
        let (xm, ym) = (mids(x_breaks), mids(y_breaks));
        let values = xm
            .iter()
            .map(|&x| ym.iter().map(|&y| f(x, y)).collect())
            .collect();
        let diffs = |b: &[f64]| -> Vec<f64> {
            let mut prev = 0.0;
            b.iter()
                .map(|&x| {
                    let d = x - prev;
                    prev = x;
                    d
                })
                .collect()
        };
        Self::new(diffs(x_breaks), diffs(y_breaks), values)
    }

    pub fn x_measures(&self) -> &[f64] {
        &self.x_measures
    }

    pub fn y_measures(&self) -> &[f64] {
        &self.y_measures
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Cumulative x-boundaries `[0, c_1, ..., X]`.
    pub fn x_breaks(&self) -> Vec<f64> {
        cumulative(&self.x_measures)
    }

    pub fn y_breaks(&self) -> Vec<f64> {
        cumulative(&self.y_measures)
    }

    /// Pointwise evaluation; zero outside the window.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let xi = match locate(&self.x_breaks(), x) {
            Some(i) => i,
            None => return 0.0,
        };
        let yj = match locate(&self.y_breaks(), y) {
            Some(j) => j,
            None => return 0.0,
        };
        self.values[xi][yj]
    }

    /// Nonincreasing along every row and every column?
    pub fn is_monotone(&self) -> bool {
        let rows = self
            .values
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] >= w[1]));
        let cols = (0..self.y_measures.len()).all(|j| {
            self.values
                .windows(2)
                .all(|w| w[0][j] >= w[1][j])
        });
        rows && cols
    }
}

fn cumulative(measures: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(measures.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for m in measures {
        acc += m;
        out.push(acc);
    }
    out
}

fn locate(breaks: &[f64], t: f64) -> Option<usize> {
    if t < 0.0 || t >= *breaks.last().unwrap() {
        return None;
    }
    // first boundary strictly greater than t, minus one
    let i = breaks.partition_point(|&b| b <= t);
    Some(i - 1)
}

/// A one-variable step function over a measure axis: `values[k]` on
/// `[bounds[k-1], bounds[k])` with `bounds[-1] = 0`.
struct MeasureStep {
    bounds: Vec<f64>,
    values: Vec<f64>,
}

/// Sort `(value, measure)` pairs by value descending (stable) and lay them
/// out from 0. Zero values are kept so the partition covers the full window.
fn rearrange_pairs(pairs: Vec<(f64, f64)>) -> MeasureStep {
    let mut pairs = pairs;
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut bounds = Vec::with_capacity(pairs.len());
    let mut values = Vec::with_capacity(pairs.len());
    let mut pos = 0.0;
    for (v, m) in pairs {
        pos += m;
        bounds.push(pos);
        values.push(v);
    }
    MeasureStep { bounds, values }
}

/// Union of boundary sets, deduplicated with relative tolerance: cumulative
/// sums of the same measure multiset in different orders can differ in the
/// last ulps.
fn refine_bounds<I: IntoIterator<Item = f64>>(all: I, total: f64) -> Vec<f64> {
    let tol = total * 1e-12;
    let mut b: Vec<f64> = all.into_iter().collect();
    b.push(total);
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(b.len());
    for x in b {
        match out.last() {
            Some(&last) if x - last <= tol => {}
            _ => out.push(x),
        }
    }
    // the last boundary is the window end exactly
    *out.last_mut().unwrap() = total;
    out
}

/// Value of `step` on each refined cell; the refined boundaries contain the
/// step's own boundaries, so values are constant within refined cells.
fn resample(step: &MeasureStep, refined: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    refined
        .iter()
        .map(|&b| {
            let mid = 0.5 * (prev + b);
            prev = b;
            let k = step.bounds.partition_point(|&c| c <= mid);
            step.values[k.min(step.values.len() - 1)]
        })
        .collect()
}

/// The iterated rearrangement of a sampled kernel: each row is rearranged in
/// the y variable, the row results are aligned on a common refinement of
/// their partitions, and then for every refined y-cell the x-section is
/// rearranged in x. The output is nonincreasing in each variable.
pub fn iterated_rearrangement(k: &SampledKernel) -> SampledKernel {
    let y_total: f64 = k.y_measures.iter().sum();
    let x_total: f64 = k.x_measures.iter().sum();
    let nx = k.x_measures.len();

    // stage 1: rearrange each row in y
    let rows: Vec<MeasureStep> = (0..nx)
        .map(|i| {
            rearrange_pairs(
                k.values[i]
                    .iter()
                    .zip(&k.y_measures)
                    .map(|(&v, &m)| (v, m))
                    .collect(),
            )
        })
        .collect();
    let y_bounds = refine_bounds(rows.iter().flat_map(|r| r.bounds.iter().copied()), y_total);
    let row_vals: Vec<Vec<f64>> = rows.iter().map(|r| resample(r, &y_bounds)).collect();

    // stage 2: for each refined y-cell, rearrange the x-section
    let ny = y_bounds.len();
    let cols: Vec<MeasureStep> = (0..ny)
        .map(|r| {
            rearrange_pairs(
                (0..nx)
                    .map(|i| (row_vals[i][r], k.x_measures[i]))
                    .collect(),
            )
        })
        .collect();
    let x_bounds = refine_bounds(cols.iter().flat_map(|c| c.bounds.iter().copied()), x_total);
    let col_vals: Vec<Vec<f64>> = cols.iter().map(|c| resample(c, &x_bounds)).collect();

    let values: Vec<Vec<f64>> = (0..x_bounds.len())
        .map(|q| (0..ny).map(|r| col_vals[r][q]).collect())
        .collect();
    let diffs = |b: &[f64]| -> Vec<f64> {
        let mut prev = 0.0;
        b.iter()
            .map(|&x| {
                let d = x - prev;
                prev = x;
                d
            })
            .collect()
    };
    SampledKernel {
        x_measures: diffs(&x_bounds),
        y_measures: diffs(&y_bounds),
        values,
    }
}

/// Check the rearrangement reduction inequality
/// `int_0^t (T_K f)* <= int_0^t T_L f*` at the knots of both sides and at the
/// grid nodes, with relative slack 1e-9.
pub fn verify_reduction(k: &SampledKernel, f: &StepFunction, grid: &GeometricGrid) -> bool {
    let lhs = apply_tk(k, f).rearranged();
    let l = iterated_rearrangement(k);
    let rhs = apply_tk(&l, &f.rearranged());
    let mut points: Vec<f64> = lhs
        .knots()
        .iter()
        .chain(rhs.knots().iter())
        .copied()
        .chain(grid.nodes().iter().copied())
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    points.iter().all(|&t| {
        let (a, b) = (lhs.prefix_integral(t), rhs.prefix_integral(t));
        a <= b * (1.0 + 1e-9) + f64::MIN_POSITIVE
    })
}

/// A kernel in iterated-rearranged form, given as an evaluator `(t, s) -> v`
/// that is nonincreasing in each variable, together with declared power
/// tails in each variable (quadrature needs them; they are never inferred).
#[derive(Clone)]
pub struct IteratedKernel {
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    s_tail: TailSpec,
    t_tail: TailSpec,
    monotone_certified: bool,
}

impl fmt::Debug for IteratedKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IteratedKernel")
            .field("s_tail", &self.s_tail)
            .field("t_tail", &self.t_tail)
            .field("monotone_certified", &self.monotone_certified)
            .finish_non_exhaustive()
    }
}

impl IteratedKernel {
    /// Wrap an evaluator without certifying monotonicity.
    pub fn new<F>(eval: F, s_tail: TailSpec, t_tail: TailSpec) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(eval), s_tail, t_tail, monotone_certified: false }
    }

    /// Wrap an evaluator and spot-check that it is nonincreasing in each
    /// variable on a subsample of the grid.
    pub fn certified<F>(
        eval: F,
        s_tail: TailSpec,
        t_tail: TailSpec,
        grid: &GeometricGrid,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let probes: Vec<f64> = grid.nodes().iter().copied().step_by(16).collect();
        for &s in &probes {
            for w in probes.windows(2) {
                if eval(w[1], s) > eval(w[0], s) * (1.0 + 1e-9) {
                    return Err(Error::invalid(format!(
                        "kernel increases in t at (t, s) = ({}, {s})",
                        w[1]
                    )));
                }
                if eval(s, w[1]) > eval(s, w[0]) * (1.0 + 1e-9) {
                    return Err(Error::invalid(format!(
                        "kernel increases in s at (t, s) = ({s}, {})",
                        w[1]
                    )));
                }
            }
        }
        let mut k = Self::new(eval, s_tail, t_tail);
        k.monotone_certified = true;
        Ok(k)
    }

    /// The kernel `1/(t + s)`.
    pub fn reciprocal_sum() -> Self {
        let mut k = Self::new(|t, s| 1.0 / (t + s), TailSpec::new(0.0, -1.0), TailSpec::new(0.0, -1.0));
        k.monotone_certified = true;
        k
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        (self.eval)(t, s)
    }

    /// Declared power behaviour in `s` for fixed `t`.
    pub fn s_tail(&self) -> &TailSpec {
        &self.s_tail
    }

    /// Declared power behaviour in `t` for fixed `s`.
    pub fn t_tail(&self) -> &TailSpec {
        &self.t_tail
    }

    pub fn monotone_certified(&self) -> bool {
        self.monotone_certified
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_kernel(values: Vec<Vec<f64>>) -> SampledKernel {
        let nx = values.len();
        let ny = values[0].len();
        SampledKernel::new(vec![1.0; nx], vec![1.0; ny], values).unwrap()
    }

    /// Pointwise two-stage oracle straight from the definition, using
    /// `f*(t) = max { v : |{f >= v}| > t }` per stage.
    fn iterated_oracle(k: &SampledKernel, t: f64, s: f64) -> f64 {
        let row_star = |i: usize, s: f64| -> f64 {
            let mut best = 0.0f64;
            for &v in &k.values()[i] {
                if v <= best {
                    continue;
                }
                let meas: f64 = k.values()[i]
                    .iter()
                    .zip(k.y_measures())
                    .filter(|(&u, _)| u >= v)
                    .map(|(_, &m)| m)
                    .sum();
                if meas > s {
                    best = v;
                }
            }
            best
        };
        let section: Vec<f64> = (0..k.x_measures().len()).map(|i| row_star(i, s)).collect();
        let mut best = 0.0f64;
        for &v in &section {
            if v <= best {
                continue;
            }
            let meas: f64 = section
                .iter()
                .zip(k.x_measures())
                .filter(|(&u, _)| u >= v)
                .map(|(_, &m)| m)
                .sum();
            if meas > t {
                best = v;
            }
        }
        best
    }

    #[test]
    fn hand_checked_two_by_two() {
        let k = unit_kernel(vec![vec![1.0, 4.0], vec![3.0, 2.0]]);
        let l = iterated_rearrangement(&k);
        assert_eq!(l.values(), &[vec![4.0, 2.0], vec![3.0, 1.0]]);
        assert!(l.is_monotone());
    }

    #[test]
    fn constant_kernel_is_fixed() {
        let k = SampledKernel::constant(2.5, vec![1.0], vec![1.0]).unwrap();
        let l = iterated_rearrangement(&k);
        assert_eq!(l.values(), &[vec![2.5]]);
        assert_eq!(l.x_measures(), &[1.0]);
    }

    #[test]
    fn product_kernel_factors() {
        // K(x, y) = g(x) h(y) => L = g* (x) h*
        let g = [2.0, 5.0, 1.0];
        let h = [1.0, 3.0];
        let gm = [0.5, 1.0, 2.0];
        let hm = [1.5, 0.5];
        let values: Vec<Vec<f64>> = g.iter().map(|a| h.iter().map(|b| a * b).collect()).collect();
        let k = SampledKernel::new(gm.to_vec(), hm.to_vec(), values).unwrap();
        let l = iterated_rearrangement(&k);

        let gs = StepFunction::new(vec![0.5, 1.5, 3.5], g.to_vec()).unwrap().rearranged();
        let hs = StepFunction::new(vec![1.5, 2.0], h.to_vec()).unwrap().rearranged();
        for (t, s) in [(0.1, 0.2), (0.9, 0.4), (1.4, 0.6), (3.0, 1.9), (0.6, 1.2)] {
            let expect = gs.eval(t) * hs.eval(s);
            assert!(
                (l.eval(t, s) - expect).abs() <= 1e-12 * expect.max(1.0),
                "mismatch at ({t}, {s}): {} vs {expect}",
                l.eval(t, s)
            );
        }
    }

    #[test]
    fn matches_pointwise_oracle_on_random_kernels() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let nx = rng.gen_range(1..5usize);
            let ny = rng.gen_range(1..5usize);
            let xm: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.2..2.0)).collect();
            let ym: Vec<f64> = (0..ny).map(|_| rng.gen_range(0.2..2.0)).collect();
            let values: Vec<Vec<f64>> = (0..nx)
                .map(|_| (0..ny).map(|_| (rng.gen_range(0.0..4.0f64) * 2.0).round() / 2.0).collect())
                .collect();
            let k = SampledKernel::new(xm.clone(), ym.clone(), values).unwrap();
            let l = iterated_rearrangement(&k);
            assert!(l.is_monotone());
            let xt: f64 = xm.iter().sum();
            let yt: f64 = ym.iter().sum();
            for i in 0..6 {
                for j in 0..6 {
                    let t = xt * (0.05 + 0.16 * i as f64);
                    let s = yt * (0.05 + 0.16 * j as f64);
                    let expect = iterated_oracle(&k, t, s);
                    assert!(
                        (l.eval(t, s) - expect).abs() <= 1e-9 * expect.max(1.0),
                        "oracle mismatch at ({t}, {s}): {} vs {expect}",
                        l.eval(t, s)
                    );
                }
            }
        }
    }

    #[test]
    fn reduction_holds_for_product_and_constant_kernels() {
        let grid = GeometricGrid::default_grid();
        let f = StepFunction::new(vec![0.4, 1.0, 2.0], vec![1.0, 4.0, 0.5]).unwrap();

        let k = SampledKernel::constant(1.5, vec![1.0, 1.0], vec![0.5, 1.0, 0.7]).unwrap();
        assert!(verify_reduction(&k, &f, &grid));

        let g = [2.0, 5.0];
        let h = [1.0, 3.0, 0.5];
        let values: Vec<Vec<f64>> = g.iter().map(|a| h.iter().map(|b| a * b).collect()).collect();
        let k = SampledKernel::new(vec![1.0, 0.5], vec![0.7, 1.1, 0.4], values).unwrap();
        assert!(verify_reduction(&k, &f, &grid));
    }

    #[test]
    fn certification_rejects_increasing_kernels() {
        let grid = GeometricGrid::default_grid();
        let bad = IteratedKernel::certified(
            |t, s| t / (1.0 + s),
            TailSpec::new(0.0, -1.0),
            TailSpec::new(0.0, 0.0),
            &grid,
        );
        assert!(bad.is_err());
        assert!(IteratedKernel::reciprocal_sum().monotone_certified());
    }
}
