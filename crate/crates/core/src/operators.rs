//! Positive integral operators: `T_K` for sampled kernels, the Stieltjes
//! transform `S`, the kernel `M(t, s) = int L(t, y)/(s + y) dy` of the
//! composition `T_L S`, and the iterated-Stieltjes forms (exact kernel and
//! the two-term logarithmic form).
//!
//! Step-function inputs are handled by exact per-cell antiderivatives; dense
//! evaluation reuses prefix sums ([`S2LogEvaluator`]), which keeps a full
//! grid sweep at O(log m) per output node instead of O(m).

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;
use crate::kernel::{IteratedKernel, SampledKernel};
use crate::quad::{
    integrate_0_to_inf, integrate_0_to_t, integrate_interval, integrate_t_to_inf, TailSpec,
};
use crate::step::StepFunction;

/// Which operator a norm-ratio experiment drives.
#[derive(Debug, Clone)]
pub enum OperatorSpec {
    /// `T_K` with a sampled kernel; maps step functions to step functions.
    Sampled(SampledKernel),
    /// `T_L` with an iterated-rearranged kernel evaluator.
    Iterated(IteratedKernel),
    /// The Stieltjes transform `S`.
    Stieltjes,
    /// `S^2` through its exact kernel `ln(t/s)/(t-s)`.
    S2Exact,
    /// `S^2` through the two-term logarithmic form.
    S2LogForm,
    /// The composition `T_L S` evaluated through its kernel `M`.
    Composed(IteratedKernel),
}

/// `(T_K f)(x) = int K(x, y) f(y) dy` by exact block summation: the output is
/// piecewise constant on the kernel's x-cells, with values
/// `sum_j K(x_i, y_j) * int_{cell j} f`.
pub fn apply_tk(k: &SampledKernel, f: &StepFunction) -> StepFunction {
    let y_breaks = k.y_breaks();
    let masses: Vec<f64> = y_breaks
        .windows(2)
        .map(|w| f.prefix_integral(w[1]) - f.prefix_integral(w[0]))
        .collect();
    let values: Vec<f64> = k
        .values()
        .iter()
        .map(|row| row.iter().zip(&masses).map(|(v, m)| v * m).sum())
        .collect();
    let knots = k.x_breaks()[1..].to_vec();
    StepFunction::new(knots, values).expect("kernel geometry yields a valid step function")
}

/// `(T_L f)(t)` for an evaluator kernel and a step input, by per-cell
/// quadrature in the second variable.
pub fn apply_iterated(l: &IteratedKernel, f: &StepFunction, t: f64, grid: &GeometricGrid) -> Result<f64> {
    let mut acc = 0.0;
    for (lo, hi, v) in f.cells() {
        if v == 0.0 {
            continue;
        }
        let piece = if lo == 0.0 {
            integrate_0_to_t(|y| l.eval(t, y), hi, l.s_tail(), grid)?
        } else {
            integrate_interval(|y| l.eval(t, y), lo, hi, grid)?
        };
        acc += v * piece;
    }
    Ok(acc)
}

/// Exact Stieltjes transform of a step function:
/// `(S f)(t) = sum_i v_i ln((t + k_i)/(t + k_{i-1}))`.
pub fn stieltjes_step(f: &StepFunction, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    f.cells()
        .map(|(l, r, v)| v * ((r - l) / (t + l)).ln_1p())
        .sum()
}

/// Stieltjes transform of an arbitrary integrand with declared tails.
/// Requires decay at infinity (`b < 0`) and integrability at 0 (`a > -1`).
pub fn stieltjes_fn<F: Fn(f64) -> f64>(
    f: F,
    f_tail: &TailSpec,
    t: f64,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("evaluation point {t} must be positive")));
    }
    let tail = TailSpec::new(f_tail.exponent_at_zero, f_tail.exponent_at_infinity - 1.0);
    integrate_0_to_inf(|s| f(s) / (t + s), &tail, grid)
}

/// Evaluation mode for the composed kernel `M(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelEvalMode {
    /// The defining integral `int L(t, y)/(s + y) dy`.
    Exact,
    /// The two-term equivalent `(1/s) int_0^s L(t, y) dy + int_s^inf L(t, y) dy/y`,
    /// which brackets the exact integral within a factor of 2.
    Split,
}

/// Kernel of `T_L S`: `M(t, s) = int_0^inf L(t, y)/(s + y) dy`.
/// Nonincreasing in both `t` and `s`.
pub fn tls_kernel(
    l: &IteratedKernel,
    t: f64,
    s: f64,
    mode: KernelEvalMode,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(t > 0.0 && s > 0.0) {
        return Err(Error::invalid("kernel arguments must be positive"));
    }
    let (a, b) = (l.s_tail().exponent_at_zero, l.s_tail().exponent_at_infinity);
    match mode {
        KernelEvalMode::Exact => {
            // split at y = s, where 1/(s + y) turns over; each piece is then
            // power-like at its unresolved end
            let near =
                integrate_0_to_t(|y| l.eval(t, y) / (s + y), s, &TailSpec::new(a, b), grid)?;
            let far = integrate_t_to_inf(
                |y| l.eval(t, y) / (s + y),
                s,
                &TailSpec::new(a, b - 1.0),
                grid,
            )?;
            Ok(near + far)
        }
        KernelEvalMode::Split => {
            let near = integrate_0_to_t(|y| l.eval(t, y), s, &TailSpec::new(a, b), grid)?;
            let far =
                integrate_t_to_inf(|y| l.eval(t, y) / y, s, &TailSpec::new(a, b - 1.0), grid)?;
            Ok(near / s + far)
        }
    }
}

/// Exact kernel of `S^2`: `ln(t/s)/(t - s)`, continued by `1/t` across the
/// diagonal. Written as `2 atanh(u)/((t+s) u)` with `u = (t-s)/(t+s)`, which
/// is stable arbitrarily close to the diagonal.
pub fn s2_kernel(t: f64, s: f64) -> f64 {
    debug_assert!(t > 0.0 && s > 0.0);
    if t == s {
        return 1.0 / t;
    }
    let u = (t - s) / (t + s);
    2.0 / (t + s) * (u.atanh() / u)
}

/// `int_0^inf s2_kernel(t, s) f(s) ds` for a step input, by per-cell
/// quadrature (the kernel is smooth across the diagonal in this form).
pub fn s2_apply_exact(f: &StepFunction, t: f64, grid: &GeometricGrid) -> Result<f64> {
    let mut acc = 0.0;
    for (lo, hi, v) in f.cells() {
        if v == 0.0 {
            continue;
        }
        let piece = if lo == 0.0 {
            integrate_0_to_t(|s| s2_kernel(t, s), hi, &TailSpec::new(-0.1, 0.0), grid)?
        } else {
            integrate_interval(|s| s2_kernel(t, s), lo, hi, grid)?
        };
        acc += v * piece;
    }
    Ok(acc)
}

fn nu(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * s.ln() - s
    }
}

/// Two-term logarithmic form of `S^2` on a step function, evaluated by exact
/// per-cell antiderivatives:
/// `(1/t) int_0^t f(s) ln(t/s) ds + int_t^inf f(s) ln(s/t) ds/s`.
pub fn s2_log_form(f: &StepFunction, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("evaluation point {t} must be positive")));
    }
    Ok(S2LogEvaluator::new(f).eval(t))
}

/// Prefix-sum accelerated evaluator for [`s2_log_form`] over many points.
///
/// Precomputes, at every knot, the mass `int_0^k f`, the log moment
/// `int_0^k f ln s ds`, and the suffix integrals `int_k f ln s ds/s`,
/// `int_k f ds/s`; a query then costs one cell lookup.
pub struct S2LogEvaluator {
    bounds: Vec<f64>,
    values: Vec<f64>,
    pre_mass: Vec<f64>,
    pre_logm: Vec<f64>,
    suf_logsq: Vec<f64>,
    suf_log: Vec<f64>,
}

impl S2LogEvaluator {
    pub fn new(f: &StepFunction) -> Self {
        let m = f.values().len();
        let mut bounds = Vec::with_capacity(m + 1);
        bounds.push(0.0);
        bounds.extend_from_slice(f.knots());
        let values = f.values().to_vec();

        let mut pre_mass = vec![0.0; m + 1];
        let mut pre_logm = vec![0.0; m + 1];
        for i in 0..m {
            pre_mass[i + 1] = pre_mass[i] + values[i] * (bounds[i + 1] - bounds[i]);
            pre_logm[i + 1] = pre_logm[i] + values[i] * (nu(bounds[i + 1]) - nu(bounds[i]));
        }
        // suffix integrals against ds/s are finite only from positive left
        // endpoints; index 0 (the origin) is never dereferenced.
        let mut suf_logsq = vec![0.0; m + 1];
        let mut suf_log = vec![0.0; m + 1];
        if m > 0 {
            suf_logsq[0] = f64::INFINITY;
            suf_log[0] = f64::INFINITY;
            for i in (1..m).rev() {
                let lam = 0.5 * (bounds[i + 1].ln().powi(2) - bounds[i].ln().powi(2));
                let lin = (bounds[i + 1] / bounds[i]).ln();
                suf_logsq[i] = suf_logsq[i + 1] + values[i] * lam;
                suf_log[i] = suf_log[i + 1] + values[i] * lin;
            }
        }
        Self { bounds, values, pre_mass, pre_logm, suf_logsq, suf_log }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = self.values.len();
        if m == 0 {
            return 0.0;
        }
        let support = self.bounds[m];
        // cell index containing t
        let c = self.bounds.partition_point(|&b| b <= t) - 1;

        let (mass, logm) = if t >= support {
            (self.pre_mass[m], self.pre_logm[m])
        } else {
            (
                self.pre_mass[c] + self.values[c] * (t - self.bounds[c]),
                self.pre_logm[c] + self.values[c] * (nu(t) - nu(self.bounds[c])),
            )
        };
        let inner = (t.ln() * mass - logm) / t;

        let outer = if t >= support {
            0.0
        } else {
            let right = self.bounds[c + 1];
            let part_sq = 0.5 * (right.ln().powi(2) - t.ln().powi(2));
            let part_ln = (right / t).ln();
            let sq = self.values[c] * part_sq
                + if c < m - 1 { self.suf_logsq[c + 1] } else { 0.0 };
            let ln = self.values[c] * part_ln
                + if c < m - 1 { self.suf_log[c + 1] } else { 0.0 };
            sq - t.ln() * ln
        };
        inner + outer
    }
}

/// `(T_L S) h (t) = int h(y) M(t, y) dy` for a step input `h`, using the
/// exact composed kernel and nested quadrature.
pub fn apply_tls(
    l: &IteratedKernel,
    h: &StepFunction,
    t: f64,
    grid: &GeometricGrid,
) -> Result<f64> {
    let (a, b) = (l.s_tail().exponent_at_zero, l.s_tail().exponent_at_infinity);
    if a <= -1.0 {
        return Err(Error::NonIntegrableAtZero { exponent: a });
    }
    if b >= 0.0 {
        return Err(Error::NonIntegrableAtInfinity { exponent: b });
    }
    let m = |y: f64| tls_kernel(l, t, y, KernelEvalMode::Exact, grid).unwrap_or(f64::NAN);
    let mut acc = 0.0;
    for (lo, hi, v) in h.cells() {
        if v == 0.0 {
            continue;
        }
        // M has at worst a logarithmic singularity as y -> 0
        let piece = if lo == 0.0 {
            integrate_0_to_t(m, hi, &TailSpec::new(-0.1, 0.0), grid)?
        } else {
            integrate_interval(m, lo, hi, grid)?
        };
        acc += v * piece;
    }
    Ok(acc)
}

/// Same operator in the other integration order:
/// `int L(t, s) (S h)(s) ds`. Used as a Fubini consistency check.
pub fn apply_tls_fubini(
    l: &IteratedKernel,
    h: &StepFunction,
    t: f64,
    grid: &GeometricGrid,
) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    let (a, b) = (l.s_tail().exponent_at_zero, l.s_tail().exponent_at_infinity);
    // S h decays like 1/s, so the product gains one power of decay
    let tail = TailSpec::new(a - 0.1, b - 1.0);
    integrate_0_to_inf(|s| l.eval(t, s) * stieltjes_step(h, s), &tail, grid)
}
