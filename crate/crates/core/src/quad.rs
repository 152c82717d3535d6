//! Quadrature for semi-infinite integrals with power-law tails.
//!
//! Integrands in this crate are smooth in log coordinates away from the
//! endpoints and behave like `C t^a` as `t -> 0` and `C t^b` as `t -> inf`,
//! possibly with logarithmic corrections. The scheme is:
//!
//! * composite 8-point Gauss-Legendre in `ln t` over geometric cells for the
//!   resolved range;
//! * an analytic power cell on `[0, t_lo]`, with the local power fitted at the
//!   two innermost nodes (the declared exponent is the integrability guard and
//!   the fallback);
//! * an analytic power tail on `[t_hi, inf)`, fitted at the two outermost
//!   nodes the same way.
//!
//! Tail exponents are always declared by the caller; they are never inferred
//! silently. Callers with symbolic weights derive them exactly.

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;

/// Declared power behaviour of an integrand at both ends of the half-line:
/// `f(t) ~ C t^a` as `t -> 0` and `f(t) ~ C t^b` as `t -> inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSpec {
    pub exponent_at_zero: f64,
    pub exponent_at_infinity: f64,
}

impl TailSpec {
    pub fn new(exponent_at_zero: f64, exponent_at_infinity: f64) -> Self {
        Self { exponent_at_zero, exponent_at_infinity }
    }

    /// A pure power `t^a`: the same exponent at both ends.
    pub fn power(a: f64) -> Self {
        Self::new(a, a)
    }

    /// Integrable on `(0, 1]`?
    pub fn integrable_at_zero(&self) -> bool {
        self.exponent_at_zero > -1.0
    }

    /// Integrable on `[1, inf)`?
    pub fn integrable_at_infinity(&self) -> bool {
        self.exponent_at_infinity < -1.0
    }
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// One Gauss-Legendre cell in log coordinates: `int f(t) dt` over
/// `[e^{u0}, e^{u1}]`.
fn gl8_log_cell<F: Fn(f64) -> f64>(f: &F, u0: f64, u1: f64) -> Result<f64> {
    let c = 0.5 * (u1 + u0);
    let h = 0.5 * (u1 - u0);
    let mut acc = 0.0;
    for k in 0..8 {
        let t = (c + h * GL8_X[k]).exp();
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { t });
        }
        acc += GL8_W[k] * v * t;
    }
    Ok(acc * h)
}

/// Local power exponent through two samples, `None` when not defined.
fn fit_exponent(x0: f64, y0: f64, x1: f64, y1: f64) -> Option<f64> {
    if y0 > 0.0 && y1 > 0.0 && y0.is_finite() && y1.is_finite() {
        let a = (y1 / y0).ln() / (x1 / x0).ln();
        a.is_finite().then_some(a)
    } else {
        None
    }
}

/// Analytic `int_0^{t_lo} f`, modelling `f = C t^a` with `a` fitted at
/// `t_lo` and `t_lo * r` and `declared` as guard/fallback.
fn near_zero_piece<F: Fn(f64) -> f64>(f: &F, t_lo: f64, r: f64, declared: f64) -> Result<f64> {
    let y0 = f(t_lo);
    let y1 = f(t_lo * r);
    if !y0.is_finite() {
        return Err(Error::NonFinite { t: t_lo });
    }
    if !y1.is_finite() {
        return Err(Error::NonFinite { t: t_lo * r });
    }
    if y0 <= 0.0 {
        return Ok(0.0);
    }
    let a = match fit_exponent(t_lo, y0, t_lo * r, y1) {
        Some(a) if a > -1.0 => a,
        _ => declared,
    };
    Ok(y0 * t_lo / (a + 1.0))
}

/// Analytic `int_{t_hi}^inf f`, power model fitted at `t_hi / r` and `t_hi`.
fn tail_piece<F: Fn(f64) -> f64>(f: &F, t_hi: f64, r: f64, declared: f64) -> Result<f64> {
    let y0 = f(t_hi / r);
    let y1 = f(t_hi);
    if !y0.is_finite() {
        return Err(Error::NonFinite { t: t_hi / r });
    }
    if !y1.is_finite() {
        return Err(Error::NonFinite { t: t_hi });
    }
    if y1 <= 0.0 {
        return Ok(0.0);
    }
    let b = match fit_exponent(t_hi / r, y0, t_hi, y1) {
        Some(b) if b < -1.0 => b,
        _ => declared,
    };
    Ok(y1 * t_hi / (-(b + 1.0)))
}

/// Composite Gauss-Legendre integral of `f` over a finite interval
/// `[lo, hi]`, `0 < lo <= hi`, with the cell density taken from `grid`.
///
/// Cells are anchored to the grid (boundaries at `t_min * ratio^k`), not to
/// the interval ends, so integrands with jumps at grid nodes are integrated
/// consistently no matter where the interval is cut.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 {
        return Err(Error::invalid(format!("integration interval [{lo}, {hi}] invalid")));
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let (u0, u1) = (lo.ln(), hi.ln());
    let step = grid.ln_step();
    let anchor = grid.t_min().ln();
    let mut acc = 0.0;
    let mut a = u0;
    let mut k = ((u0 - anchor) / step).floor() + 1.0;
    loop {
        let b = anchor + k * step;
        if b >= u1 {
            break;
        }
        if b > a {
            acc += gl8_log_cell(&f, a, b)?;
            a = b;
        }
        k += 1.0;
    }
    acc += gl8_log_cell(&f, a, u1)?;
    Ok(acc)
}

/// `int_0^T f`, handling the power behaviour at 0 analytically.
pub fn integrate_0_to_t<F: Fn(f64) -> f64>(
    f: F,
    t_end: f64,
    tail: &TailSpec,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid(format!("upper limit {t_end} must be positive and finite")));
    }
    let a = tail.exponent_at_zero;
    if a <= -1.0 {
        return Err(Error::NonIntegrableAtZero { exponent: a });
    }
    let t_lo = grid.t_min().min(t_end * 1e-6);
    let r = grid.ln_step().exp();
    let head = near_zero_piece(&f, t_lo, r, a)?;
    let main = integrate_interval(&f, t_lo, t_end, grid)?;
    Ok(head + main)
}

/// `int_T^inf f`, handling the power tail analytically. `t_start = 0` is
/// allowed; the zero-end exponent of `tail` then guards integrability at 0.
pub fn integrate_t_to_inf<F: Fn(f64) -> f64>(
    f: F,
    t_start: f64,
    tail: &TailSpec,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(t_start.is_finite() && t_start >= 0.0) {
        return Err(Error::invalid(format!("lower limit {t_start} must be nonnegative")));
    }
    let b = tail.exponent_at_infinity;
    if b >= -1.0 {
        return Err(Error::NonIntegrableAtInfinity { exponent: b });
    }
    let t_hi = grid.t_max().max(t_start * 1e6);
    let r = grid.ln_step().exp();
    let tail_part = tail_piece(&f, t_hi, r, b)?;
    let main = if t_start == 0.0 {
        let a = tail.exponent_at_zero;
        if a <= -1.0 {
            return Err(Error::NonIntegrableAtZero { exponent: a });
        }
        let t_lo = grid.t_min();
        near_zero_piece(&f, t_lo, r, a)? + integrate_interval(&f, t_lo, t_hi, grid)?
    } else {
        integrate_interval(&f, t_start, t_hi, grid)?
    };
    Ok(main + tail_part)
}

/// `int_0^inf f` with both endpoint behaviours declared.
pub fn integrate_0_to_inf<F: Fn(f64) -> f64>(
    f: F,
    tail: &TailSpec,
    grid: &GeometricGrid,
) -> Result<f64> {
    let split = 1.0;
    Ok(integrate_0_to_t(&f, split, tail, grid)? + integrate_t_to_inf(&f, split, tail, grid)?)
}

/// Which of the two logarithmic convolutions to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogKernelMode {
    /// `(1/t) int_0^t f(s) ln(t/s) ds`
    Inner,
    /// `int_t^inf f(s) ln(s/t) ds / s`
    Outer,
}

/// Logarithmic-kernel integrals against a smooth integrand.
///
/// The substitutions `s = t e^{-u}` (inner) and `s = t e^{u}` (outer) remove
/// the logarithm: both integrals become `int_0^inf f(..) u e^{..} du` with a
/// smooth, exponentially decaying integrand. `f_tail` declares the power
/// behaviour of `f` itself; the inner mode needs `f` integrable at 0, the
/// outer mode needs `f` decaying at infinity.
pub fn integrate_log_kernel<F: Fn(f64) -> f64>(
    f: F,
    t: f64,
    mode: LogKernelMode,
    f_tail: &TailSpec,
    grid: &GeometricGrid,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("evaluation point {t} must be positive")));
    }
    // The substituted integrand vanishes linearly at u = 0 and decays at
    // least exponentially; -2 is a safe declared bound for the fitted tail.
    let sub_tail = TailSpec::new(1.0, -2.0);
    match mode {
        LogKernelMode::Inner => {
            let a = f_tail.exponent_at_zero;
            if a <= -1.0 {
                return Err(Error::NonIntegrableAtZero { exponent: a });
            }
            let g = |u: f64| f(t * (-u).exp()) * u * (-u).exp();
            integrate_0_to_inf(g, &sub_tail, grid)
        }
        LogKernelMode::Outer => {
            let b = f_tail.exponent_at_infinity;
            if b >= 0.0 {
                return Err(Error::NonIntegrableAtInfinity { exponent: b });
            }
            let g = |u: f64| f(t * u.exp()) * u;
            integrate_0_to_inf(g, &sub_tail, grid)
        }
    }
}

/// Prefix and suffix integrals of one integrand over all grid nodes,
/// computed with a single pass of per-cell quadrature plus the analytic end
/// pieces. `prefix[i] = int_0^{node_i} f`, `suffix[i] = int_{node_i}^inf f`.
#[derive(Debug, Clone)]
pub struct CumulativeIntegrals {
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl CumulativeIntegrals {
    pub fn new<F: Fn(f64) -> f64>(f: F, tail: &TailSpec, grid: &GeometricGrid) -> Result<Self> {
        if tail.exponent_at_zero <= -1.0 {
            return Err(Error::NonIntegrableAtZero { exponent: tail.exponent_at_zero });
        }
        if tail.exponent_at_infinity >= -1.0 {
            return Err(Error::NonIntegrableAtInfinity { exponent: tail.exponent_at_infinity });
        }
        Self::build(f, tail, grid)
    }

    /// Like [`CumulativeIntegrals::new`], but a divergent end saturates the
    /// affected array to `f64::INFINITY` instead of failing: the prefix when
    /// `f` is not integrable at 0, the suffix when not integrable at
    /// infinity. The other array stays valid. Condition checkers use this to
    /// turn non-integrable configurations into "unbounded" verdicts, and the
    /// weight algebra uses it when only one side is needed.
    pub fn new_saturating<F: Fn(f64) -> f64>(
        f: F,
        tail: &TailSpec,
        grid: &GeometricGrid,
    ) -> Result<Self> {
        let n = grid.len();
        let zero_divergent = tail.exponent_at_zero <= -1.0;
        let inf_divergent = tail.exponent_at_infinity >= -1.0;
        let safe = TailSpec::new(
            if zero_divergent { 0.0 } else { tail.exponent_at_zero },
            if inf_divergent { -2.0 } else { tail.exponent_at_infinity },
        );
        let mut c = Self::build(&f, &safe, grid)?;
        if zero_divergent {
            c.prefix = vec![f64::INFINITY; n];
        }
        if inf_divergent {
            c.suffix = vec![f64::INFINITY; n];
        }
        Ok(c)
    }

    fn build<F: Fn(f64) -> f64>(f: F, tail: &TailSpec, grid: &GeometricGrid) -> Result<Self> {
        let nodes = grid.nodes();
        let n = nodes.len();
        let r = grid.ln_step().exp();
        let mut cell = Vec::with_capacity(n - 1);
        for w in nodes.windows(2) {
            cell.push(gl8_log_cell(&f, w[0].ln(), w[1].ln())?);
        }
        let head = near_zero_piece(&f, nodes[0], r, tail.exponent_at_zero)?;
        let tail_part = tail_piece(&f, nodes[n - 1], r, tail.exponent_at_infinity)?;

        let mut prefix = Vec::with_capacity(n);
        prefix.push(head);
        for c in &cell {
            prefix.push(prefix.last().unwrap() + c);
        }
        let mut suffix = vec![0.0; n];
        suffix[n - 1] = tail_part;
        for i in (0..n - 1).rev() {
            suffix[i] = suffix[i + 1] + cell[i];
        }
        Ok(Self { prefix, suffix })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn suffix(&self) -> &[f64] {
        &self.suffix
    }

    /// Total integral over the half-line.
    pub fn total(&self) -> f64 {
        self.prefix[0] + self.suffix[0]
    }
}
