//! Executable boundedness tests: the exact prefix-comparison condition for
//! passing between `f**`- and `f*`-weighted norms, the two-condition
//! Bloom-Kerman test for Hardy-type operators with monotone kernels, and
//! the four-condition test for the iterated Stieltjes operator between
//! Lorentz-Gamma spaces.
//!
//! Every condition function is evaluated on the full grid. "Bounded by an
//! absolute constant" is operationalized as: every sup is finite, below an
//! overflow threshold, and the outward log-log slopes at both boundary
//! decades stay within [`SLOPE_TOL`]. Power-type divergences show up as a
//! definite positive outward slope, which is far more reliable over 16
//! decades than any magnitude cutoff. A slope inside the tolerance band
//! whose sup still sits at the boundary is reported as inconclusive:
//! logarithmic growth genuinely needs a wider grid than desk scale.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;
use crate::quad::{integrate_0_to_t, integrate_t_to_inf, CumulativeIntegrals, TailSpec};
use crate::weights::{associated_weight, dual_weight, require_admissible, Weight};

/// Outward log-log slope above which a condition is declared divergent.
pub const SLOPE_TOL: f64 = 0.02;
/// Magnitude above which a sup is treated as divergent regardless of slope.
pub const SUP_OVERFLOW: f64 = 1e12;
/// Tolerance for the exact constant-1 prefix comparison.
const NEUGEBAUER_TOL: f64 = 1e-6;
/// Guardrail for the sampled growth-condition constant.
const GROWTH_D_CAP: f64 = 8.0;
/// Fraction of [`SLOPE_TOL`] above which a boundary-seated sup is flagged
/// as possibly log-growing rather than saturating.
const LOG_SUSPECT_FRACTION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

/// Diagnostics for one condition function over the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    /// Supremum over the grid; infinite when some value diverged.
    pub sup: f64,
    /// Node where the supremum is attained.
    pub argmax_t: f64,
    /// Outward log-log slope over the first decade (positive = growing as t -> 0).
    pub slope_lo: f64,
    /// Outward log-log slope over the last decade (positive = growing as t -> inf).
    pub slope_hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub conditions: Vec<ConditionEntry>,
    pub params: BTreeMap<String, String>,
}

struct Analyzed {
    entry: ConditionEntry,
    divergent: bool,
    log_suspect: bool,
}

/// Least-squares slope of `ln v` against `ln t` over the positive, finite
/// samples; 0 when fewer than two remain.
fn ls_slope(ts: &[f64], vs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(vs)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn analyze_condition(name: &str, grid: &GeometricGrid, values: &[f64]) -> Analyzed {
    let nodes = grid.nodes();
    let n = nodes.len();
    let mut sup = 0.0f64;
    let mut argmax = nodes[0];
    let mut nonfinite = false;
    for (&t, &v) in nodes.iter().zip(values) {
        if !v.is_finite() {
            nonfinite = true;
        } else if v > sup {
            sup = v;
            argmax = t;
        }
    }
    let k = (grid.points_per_decade() as usize).min(n - 1);
    let slope_lo = -ls_slope(&nodes[..=k], &values[..=k]);
    let slope_hi = ls_slope(&nodes[n - 1 - k..], &values[n - 1 - k..]);
    let sup_out = if nonfinite { f64::INFINITY } else { sup };
    let divergent =
        nonfinite || sup_out > SUP_OVERFLOW || slope_lo > SLOPE_TOL || slope_hi > SLOPE_TOL;
    let at_lo = argmax <= nodes[k];
    let at_hi = argmax >= nodes[n - 1 - k];
    let log_suspect = !divergent
        && ((slope_lo > LOG_SUSPECT_FRACTION * SLOPE_TOL && at_lo)
            || (slope_hi > LOG_SUSPECT_FRACTION * SLOPE_TOL && at_hi));
    Analyzed {
        entry: ConditionEntry {
            name: name.to_string(),
            sup: sup_out,
            argmax_t: argmax,
            slope_lo,
            slope_hi,
        },
        divergent,
        log_suspect,
    }
}

fn assemble(analyzed: Vec<Analyzed>, params: BTreeMap<String, String>) -> ConditionReport {
    let verdict = if analyzed.iter().any(|a| a.divergent) {
        Verdict::Unbounded
    } else if analyzed.iter().any(|a| a.log_suspect) {
        Verdict::Inconclusive
    } else {
        Verdict::Bounded
    };
    ConditionReport {
        verdict,
        conditions: analyzed.into_iter().map(|a| a.entry).collect(),
        params,
    }
}

/// Exact prefix comparison deciding `int f**^q u <= int f*^q v` for all f:
/// evaluates
///
/// ```text
/// B(t) = [int_0^t u + t^q int_t^inf s^-q u(s) ds] / int_0^t v
/// ```
///
/// on the grid. The characterization holds with constant exactly 1, so the
/// verdict is bounded iff `sup B <= 1 + 1e-6` (and no boundary divergence);
/// the raw sup is reported for callers accepting finite-constant variants.
pub fn neugebauer_check(
    u: &Weight,
    v: &Weight,
    q: f64,
    grid: &GeometricGrid,
) -> Result<ConditionReport> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q = {q} must lie in (1, inf)")));
    }
    let (ut, vt) = (u.tail(), v.tail());
    if ut.exponent_at_zero <= -1.0 {
        return Err(Error::NonIntegrableAtZero { exponent: ut.exponent_at_zero });
    }
    if vt.exponent_at_zero <= -1.0 {
        return Err(Error::NonIntegrableAtZero { exponent: vt.exponent_at_zero });
    }
    if ut.exponent_at_infinity >= q - 1.0 {
        return Err(Error::NonIntegrableTail(format!(
            "t^q int_t^inf s^-q u diverges: exponent {} >= q-1 = {}",
            ut.exponent_at_infinity,
            q - 1.0
        )));
    }
    let pre_u = CumulativeIntegrals::new_saturating(|s| u.eval(s), &ut, grid)?;
    let suf_u = CumulativeIntegrals::new_saturating(
        |s| s.powf(-q) * u.eval(s),
        &TailSpec::new(ut.exponent_at_zero - q, ut.exponent_at_infinity - q),
        grid,
    )?;
    let pre_v = CumulativeIntegrals::new_saturating(|s| v.eval(s), &vt, grid)?;
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            (pre_u.prefix()[i] + t.powf(q) * suf_u.suffix()[i]) / pre_v.prefix()[i]
        })
        .collect();
    let analyzed = analyze_condition("B", grid, &values);
    let sup = analyzed.entry.sup;
    let mut params = BTreeMap::new();
    params.insert("check".into(), "neugebauer".into());
    params.insert("q".into(), q.to_string());
    params.insert("u".into(), u.to_string());
    params.insert("v".into(), v.to_string());
    let mut report = assemble(vec![analyzed], params);
    if report.verdict == Verdict::Bounded && sup > 1.0 + NEUGEBAUER_TOL {
        report.verdict = Verdict::Unbounded;
    }
    Ok(report)
}

/// `int_0^x ln(x/y)^e y^power w(y) dy` at every grid node; `INFINITY`
/// throughout when the 0-end diverges.
fn factor_prefix(
    grid: &GeometricGrid,
    log_exp: f64,
    power: f64,
    w: &Weight,
) -> Result<Vec<f64>> {
    let a0 = power + w.tail().exponent_at_zero;
    if a0 <= -1.0 {
        return Ok(vec![f64::INFINITY; grid.len()]);
    }
    let tail = TailSpec::new(a0, 0.0);
    if log_exp == 0.0 {
        let cum = CumulativeIntegrals::new_saturating(
            |y| y.powf(power) * w.eval(y),
            &TailSpec::new(a0, -2.0),
            grid,
        )?;
        return Ok(cum.prefix().to_vec());
    }
    grid.nodes()
        .iter()
        .map(|&x| {
            integrate_0_to_t(|y| (x / y).ln().powf(log_exp) * y.powf(power) * w.eval(y), x, &tail, grid)
        })
        .collect()
}

/// `int_x^inf ln(y/x)^e y^power w(y) dy` at every grid node; `INFINITY`
/// throughout when the integral diverges at infinity.
fn factor_suffix(
    grid: &GeometricGrid,
    log_exp: f64,
    power: f64,
    w: &Weight,
) -> Result<Vec<f64>> {
    let b = power + w.tail().exponent_at_infinity;
    if b >= -1.0 {
        return Ok(vec![f64::INFINITY; grid.len()]);
    }
    let tail = TailSpec::new(0.0, b);
    if log_exp == 0.0 {
        let cum = CumulativeIntegrals::new_saturating(
            |y| y.powf(power) * w.eval(y),
            &TailSpec::new(0.0, b),
            grid,
        )?;
        return Ok(cum.suffix().to_vec());
    }
    grid.nodes()
        .iter()
        .map(|&x| {
            integrate_t_to_inf(|y| (y / x).ln().powf(log_exp) * y.powf(power) * w.eval(y), x, &tail, grid)
        })
        .collect()
}

/// `pre^rp * suf^rs` with the conventions of positive operators: a zero
/// factor wins over an infinite one (a vanishing kernel side makes the
/// condition trivially satisfied at that point).
fn combine(pre: &[f64], rp: f64, suf: &[f64], rs: f64) -> Vec<f64> {
    pre.iter()
        .zip(suf)
        .map(|(&a, &b)| {
            if a == 0.0 || b == 0.0 {
                0.0
            } else if a.is_infinite() || b.is_infinite() {
                f64::INFINITY
            } else {
                a.powf(rp) * b.powf(rs)
            }
        })
        .collect()
}

/// The four condition functions for the iterated Stieltjes operator between
/// the derived weights `phi1q = phi1^(q)` and `psi2 = dual of phi2`, in
/// order C1..C4. Exposed so the generic Bloom-Kerman path can be checked
/// against it factor by factor.
///
/// The operator splits into the lower-triangle part
/// `(1/t) int_0^t ln(t/y) g(y) dy` and its reflection; applying the
/// Bloom-Kerman test to each part (the second through its adjoint, whose
/// source/target densities are again `phi1q` and `psi2` thanks to
/// `(1-p)(1-p') = 1`) gives, with `p' = p/(p-1)`:
///
/// ```text
/// C1(x) = (int_0^x ln(x/y)^p' psi2)^{1/p'}      (int_x^inf y^-q  phi1q)^{1/q}
/// C2(x) = (int_0^x psi2)^{1/p'}                 (int_x^inf ln(y/x)^q  y^-q  phi1q)^{1/q}
/// C3(x) = (int_0^x ln(x/y)^q phi1q)^{1/q}       (int_x^inf y^-p' psi2)^{1/p'}
/// C4(x) = (int_0^x phi1q)^{1/q}                 (int_x^inf ln(y/x)^p' y^-p' psi2)^{1/p'}
/// ```
pub fn corollary_s2_conditions(
    phi1q: &Weight,
    psi2: &Weight,
    p: f64,
    q: f64,
    grid: &GeometricGrid,
) -> Result<[Vec<f64>; 4]> {
    let pp = p / (p - 1.0);
    let c1 = combine(
        &factor_prefix(grid, pp, 0.0, psi2)?,
        1.0 / pp,
        &factor_suffix(grid, 0.0, -q, phi1q)?,
        1.0 / q,
    );
    let c2 = combine(
        &factor_prefix(grid, 0.0, 0.0, psi2)?,
        1.0 / pp,
        &factor_suffix(grid, q, -q, phi1q)?,
        1.0 / q,
    );
    let c3 = combine(
        &factor_prefix(grid, q, 0.0, phi1q)?,
        1.0 / q,
        &factor_suffix(grid, 0.0, -pp, psi2)?,
        1.0 / pp,
    );
    let c4 = combine(
        &factor_prefix(grid, 0.0, 0.0, phi1q)?,
        1.0 / q,
        &factor_suffix(grid, pp, -pp, psi2)?,
        1.0 / pp,
    );
    Ok([c1, c2, c3, c4])
}

/// Boundedness test for the iterated Stieltjes operator from
/// `Gamma_{p, phi2}` data to `Gamma_{q, phi1}` data, through the four
/// Muckenhoupt-type conditions of [`corollary_s2_conditions`].
///
/// Preconditions (checked): `1 < p <= q`, `phi2` admissible for `p`, the
/// associated weight `phi1^(q)` exists and is admissible for `q`.
pub fn corollary_s2_check(
    phi1: &Weight,
    phi2: &Weight,
    p: f64,
    q: f64,
    grid: &GeometricGrid,
) -> Result<ConditionReport> {
    if !(1.0 < p && p <= q && q.is_finite()) {
        return Err(Error::invalid(format!("need 1 < p <= q < inf, got p={p}, q={q}")));
    }
    require_admissible(phi2, p, "phi2")?;
    let phi1q = associated_weight(phi1, q, grid)?;
    require_admissible(&phi1q, q, "phi1^(q)")?;
    let psi2 = dual_weight(phi2, p, grid)?;
    let conds = corollary_s2_conditions(&phi1q, &psi2, p, q, grid)?;
    let names = ["C1", "C2", "C3", "C4"];
    let analyzed = names
        .iter()
        .zip(conds.iter())
        .map(|(name, values)| analyze_condition(name, grid, values))
        .collect();
    let mut params = BTreeMap::new();
    params.insert("check".into(), "s2-corollary".into());
    params.insert("p".into(), p.to_string());
    params.insert("q".into(), q.to_string());
    params.insert("phi1".into(), phi1.to_string());
    params.insert("phi2".into(), phi2.to_string());
    Ok(assemble(analyzed, params))
}

/// A kernel for the Bloom-Kerman test: nonnegative on `y < x`, nondecreasing
/// in `x`, nonincreasing in `y`, satisfying the growth condition
/// `K(x,y) <= D [K(x,z) + K(z,y)]` for `y < z < x`.
pub struct BkKernel {
    eval: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    name: String,
}

impl std::fmt::Debug for BkKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BkKernel({})", self.name)
    }
}

impl BkKernel {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Box::new(eval), name: name.into() }
    }

    /// `K(x, y) = ln(x/y)`, the kernel behind the iterated Stieltjes forms.
    pub fn log() -> Self {
        Self::new("log", |x: f64, y: f64| (x / y).ln())
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_, _| c)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Spot-check kernel shape on random triples `y < z < x` from the grid
/// range (fixed seed, 10^4 samples). The growth constant is estimated, not
/// proved; kernels in scope satisfy it with D <= 1.
fn check_kernel_shape(k: &BkKernel, grid: &GeometricGrid) -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x424b);
    let (lo, hi) = (grid.t_min().ln(), grid.t_max().ln());
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| (lo + (hi - lo) * rng.gen::<f64>()).exp();
    for _ in 0..10_000 {
        let mut tri = [draw(&mut rng), draw(&mut rng), draw(&mut rng)];
        tri.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let [y, z, x] = tri;
        if y == z || z == x {
            continue;
        }
        let kxy = k.eval(x, y);
        if !kxy.is_finite() || kxy < 0.0 {
            return Err(Error::invalid(format!(
                "kernel {} is not finite and nonnegative at (x, y) = ({x}, {y})",
                k.name
            )));
        }
        if kxy > 0.0 {
            let ratio = kxy / (k.eval(x, z) + k.eval(z, y));
            if ratio.is_nan() || ratio > GROWTH_D_CAP {
                return Err(Error::GrowthConditionViolated { x, y, z, ratio });
            }
        }
        if k.eval(z, y) > kxy * (1.0 + 1e-9) {
            return Err(Error::invalid(format!(
                "kernel {} is not nondecreasing in x at y = {y}",
                k.name
            )));
        }
        if k.eval(x, z) > kxy * (1.0 + 1e-9) {
            return Err(Error::invalid(format!(
                "kernel {} is not nonincreasing in y at x = {x}",
                k.name
            )));
        }
    }
    Ok(())
}

/// Bloom-Kerman two-condition test for
///
/// ```text
/// (int (w(x) int_0^x K(x,y) f(y) dy)^q t(x) dx)^{1/q} <= C (int (u f)^p v)^{1/p}
/// ```
///
/// with `1 < p <= q`. Writing `U = u^{-p'} v^{1-p'}` (the source density,
/// which depends only on `u^p v`) and `W = w^q t` (the target density), the
/// two conditions are
///
/// ```text
/// BK-1(x) = (int_0^x K(x,y)^{p'} U dy)^{1/p'} (int_x^inf W dy)^{1/q}
/// BK-2(x) = (int_0^x U dy)^{1/p'}             (int_x^inf K(y,x)^q W dy)^{1/q}
/// ```
#[allow(clippy::too_many_arguments)]
pub fn bloom_kerman_check(
    kernel: &BkKernel,
    w: &Weight,
    t: &Weight,
    u: &Weight,
    v: &Weight,
    p: f64,
    q: f64,
    grid: &GeometricGrid,
) -> Result<ConditionReport> {
    if !(1.0 < p && p <= q && q.is_finite()) {
        return Err(Error::invalid(format!("need 1 < p <= q < inf, got p={p}, q={q}")));
    }
    check_kernel_shape(kernel, grid)?;
    // an identically-zero kernel is the zero operator: both conditions vanish
    let probes: Vec<f64> = grid.nodes().iter().copied().step_by(8).collect();
    if probes
        .iter()
        .all(|&x| probes.iter().all(|&y| y >= x || kernel.eval(x, y) == 0.0))
    {
        let zeros = vec![0.0; grid.len()];
        let analyzed = vec![
            analyze_condition("BK-1", grid, &zeros),
            analyze_condition("BK-2", grid, &zeros),
        ];
        let mut params = BTreeMap::new();
        params.insert("check".into(), "bloom-kerman".into());
        params.insert("kernel".into(), kernel.name.clone());
        params.insert("p".into(), p.to_string());
        params.insert("q".into(), q.to_string());
        return Ok(assemble(analyzed, params));
    }
    let pp = p / (p - 1.0);
    let source = |y: f64| u.eval(y).powf(-pp) * v.eval(y).powf(1.0 - pp);
    let source_tail = TailSpec::new(
        -pp * u.tail().exponent_at_zero + (1.0 - pp) * v.tail().exponent_at_zero,
        -pp * u.tail().exponent_at_infinity + (1.0 - pp) * v.tail().exponent_at_infinity,
    );
    let target = |y: f64| w.eval(y).powf(q) * t.eval(y);
    let target_tail = TailSpec::new(
        q * w.tail().exponent_at_zero + t.tail().exponent_at_zero,
        q * w.tail().exponent_at_infinity + t.tail().exponent_at_infinity,
    );
    let nodes = grid.nodes();

    let pre_plain: Vec<f64> = if source_tail.exponent_at_zero <= -1.0 {
        vec![f64::INFINITY; nodes.len()]
    } else {
        CumulativeIntegrals::new_saturating(
            source,
            &TailSpec::new(source_tail.exponent_at_zero, -2.0),
            grid,
        )?
        .prefix()
        .to_vec()
    };
    let suf_plain: Vec<f64> = if target_tail.exponent_at_infinity >= -1.0 {
        vec![f64::INFINITY; nodes.len()]
    } else {
        CumulativeIntegrals::new_saturating(
            target,
            &TailSpec::new(0.0, target_tail.exponent_at_infinity),
            grid,
        )?
        .suffix()
        .to_vec()
    };
    let pre_kernel: Vec<f64> = if source_tail.exponent_at_zero <= -1.0 {
        vec![f64::INFINITY; nodes.len()]
    } else {
        nodes
            .iter()
            .map(|&x| {
                integrate_0_to_t(
                    |y| kernel.eval(x, y).powf(pp) * source(y),
                    x,
                    &TailSpec::new(source_tail.exponent_at_zero, 0.0),
                    grid,
                )
            })
            .collect::<Result<_>>()?
    };
    let suf_kernel: Vec<f64> = if target_tail.exponent_at_infinity >= -1.0 {
        vec![f64::INFINITY; nodes.len()]
    } else {
        nodes
            .iter()
            .map(|&x| {
                integrate_t_to_inf(
                    |y| kernel.eval(y, x).powf(q) * target(y),
                    x,
                    &TailSpec::new(0.0, target_tail.exponent_at_infinity),
                    grid,
                )
            })
            .collect::<Result<_>>()?
    };

    let bk1 = combine(&pre_kernel, 1.0 / pp, &suf_plain, 1.0 / q);
    let bk2 = combine(&pre_plain, 1.0 / pp, &suf_kernel, 1.0 / q);
    let analyzed = vec![
        analyze_condition("BK-1", grid, &bk1),
        analyze_condition("BK-2", grid, &bk2),
    ];
    let mut params = BTreeMap::new();
    params.insert("check".into(), "bloom-kerman".into());
    params.insert("kernel".into(), kernel.name.clone());
    params.insert("p".into(), p.to_string());
    params.insert("q".into(), q.to_string());
    params.insert("w".into(), w.to_string());
    params.insert("t".into(), t.to_string());
    params.insert("u".into(), u.to_string());
    params.insert("v".into(), v.to_string());
    Ok(assemble(analyzed, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> GeometricGrid {
        GeometricGrid::default_grid()
    }

    #[test]
    fn minimal_associated_weight_gives_unit_ratio() {
        let g = grid();
        let u = Weight::power(1.0, -0.5);
        let v = associated_weight(&u, 2.0, &g).unwrap();
        let report = neugebauer_check(&u, &v, 2.0, &g).unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        let b = &report.conditions[0];
        assert!((b.sup - 1.0).abs() < 1e-6, "sup = {}", b.sup);
    }

    #[test]
    fn scaled_weights_shift_the_ratio() {
        let g = grid();
        let u = Weight::one();
        let v = associated_weight(&u, 2.0, &g).unwrap();
        let up = neugebauer_check(&u, &v.scale(2.0).unwrap(), 2.0, &g).unwrap();
        assert_eq!(up.verdict, Verdict::Bounded);
        assert_relative_eq!(up.conditions[0].sup, 0.5, max_relative = 1e-9);
        let down = neugebauer_check(&u, &v.scale(0.9).unwrap(), 2.0, &g).unwrap();
        assert_eq!(down.verdict, Verdict::Unbounded);
        assert_relative_eq!(down.conditions[0].sup, 1.0 / 0.9, max_relative = 1e-9);
    }

    #[test]
    fn neugebauer_rejects_divergent_tail() {
        let g = grid();
        let u = Weight::power(1.0, 1.5);
        let v = Weight::one();
        assert!(matches!(
            neugebauer_check(&u, &v, 2.0, &g),
            Err(Error::NonIntegrableTail(_))
        ));
    }

    #[test]
    fn hardy_without_weights_is_unbounded() {
        let g = grid();
        let one = Weight::one();
        let report = bloom_kerman_check(
            &BkKernel::constant(1.0),
            &one,
            &one,
            &one,
            &one,
            2.0,
            2.0,
            &g,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Unbounded);
        assert!(report.conditions[0].sup.is_infinite());
    }

    #[test]
    fn hardy_with_classical_weights_is_bounded() {
        // w = 1/y on the target side turns BK-1 into x^{1/2} x^{-1/2} = 1
        let g = grid();
        let one = Weight::one();
        let report = bloom_kerman_check(
            &BkKernel::constant(1.0),
            &Weight::power(1.0, -1.0),
            &one,
            &one,
            &one,
            2.0,
            2.0,
            &g,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        assert_relative_eq!(report.conditions[0].sup, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn zero_kernel_is_bounded_with_zero_sup() {
        let g = grid();
        let one = Weight::one();
        let report = bloom_kerman_check(
            &BkKernel::constant(0.0),
            &one,
            &one,
            &one,
            &one,
            2.0,
            2.0,
            &g,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        assert_eq!(report.conditions[0].sup, 0.0);
        assert_eq!(report.conditions[1].sup, 0.0);
    }

    #[test]
    fn growth_condition_violation_is_detected() {
        let g = grid();
        let one = Weight::one();
        let multiplicative = BkKernel::new("ratio", |x: f64, y: f64| (1.0 + x) / (1.0 + y));
        let err = bloom_kerman_check(&multiplicative, &one, &one, &one, &one, 2.0, 2.0, &g);
        assert!(matches!(err, Err(Error::GrowthConditionViolated { .. })));
    }

    #[test]
    fn lebesgue_case_is_bounded_with_constant_conditions() {
        let g = grid();
        let report = corollary_s2_check(&Weight::one(), &Weight::one(), 2.0, 2.0, &g).unwrap();
        assert_eq!(report.verdict, Verdict::Bounded, "report: {report:?}");
        // all four conditions are the constant 1/sqrt(2) in this case
        for c in &report.conditions {
            assert_relative_eq!(c.sup, 0.5f64.sqrt(), max_relative = 1e-6);
            assert!(c.slope_lo.abs() < 1e-4 && c.slope_hi.abs() < 1e-4);
        }
    }

    #[test]
    fn imbalanced_powers_are_unbounded() {
        let g = grid();
        // scaling balance requires (1+b1)/q == (1+b2)/p
        let report =
            corollary_s2_check(&Weight::power(1.0, 0.6), &Weight::one(), 2.0, 2.0, &g).unwrap();
        assert_eq!(report.verdict, Verdict::Unbounded);
        let report =
            corollary_s2_check(&Weight::one(), &Weight::power(1.0, 0.6), 2.0, 2.0, &g).unwrap();
        assert_eq!(report.verdict, Verdict::Unbounded);
    }

    #[test]
    fn balanced_powers_are_bounded_across_exponent_pairs() {
        let g = grid();
        for (p, q, b1, b2) in [(2.0, 2.0, 0.5, 0.5), (1.5, 3.0, 1.0, 0.0), (2.0, 4.0, 1.4, 0.2)] {
            let report = corollary_s2_check(
                &Weight::power(1.0, b1),
                &Weight::power(1.0, b2),
                p,
                q,
                &g,
            )
            .unwrap();
            assert_eq!(
                report.verdict,
                Verdict::Bounded,
                "(p,q,b1,b2) = ({p},{q},{b1},{b2}): {report:?}"
            );
        }
    }

    #[test]
    fn reflected_conditions_match_for_symmetric_data() {
        // for p = q and phi1 = phi2 the pair (C3, C4) is the adjoint image of
        // (C1, C2); all four must then agree on the verdict side
        let g = grid();
        let w = Weight::power(1.0, 0.3);
        let report = corollary_s2_check(&w, &w, 2.0, 2.0, &g).unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        let sups: Vec<f64> = report.conditions.iter().map(|c| c.sup).collect();
        for s in &sups {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn scaling_covariance_of_condition_one() {
        let g = grid();
        let (p, q) = (2.0, 2.0);
        let phi1q = associated_weight(&Weight::one(), q, &g).unwrap();
        let psi2 = dual_weight(&Weight::one(), p, &g).unwrap();
        let base = corollary_s2_conditions(&phi1q, &psi2, p, q, &g).unwrap();
        let lam = 3.0;
        let scaled = corollary_s2_conditions(&phi1q, &psi2.scale(lam).unwrap(), p, q, &g).unwrap();
        let pp = p / (p - 1.0);
        let factor = lam.powf(1.0 / pp);
        for (a, b) in base[0].iter().zip(scaled[0].iter()) {
            assert_relative_eq!(b, &(a * factor), max_relative = 1e-10);
        }
    }

    #[test]
    fn bloom_kerman_reproduces_the_first_condition_pair() {
        // feeding the substitution behind C1/C2 into the generic path must
        // reproduce the same sups: kernel ln(x/y), outer weight w = 1/x,
        // target measure t = phi1^(q), source u = 1, v = psi2^{1-p}
        let g = grid();
        let (p, q) = (2.0, 2.0);
        let phi1q = associated_weight(&Weight::one(), q, &g).unwrap();
        let psi2 = dual_weight(&Weight::one(), p, &g).unwrap();
        let direct = corollary_s2_conditions(&phi1q, &psi2, p, q, &g).unwrap();

        let report = bloom_kerman_check(
            &BkKernel::log(),
            &Weight::power(1.0, -1.0),
            &phi1q,
            &Weight::one(),
            &psi2.pow(1.0 - p),
            p,
            q,
            &g,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Bounded);
        let sup_c1 = direct[0].iter().cloned().fold(0.0f64, f64::max);
        let sup_c2 = direct[1].iter().cloned().fold(0.0f64, f64::max);
        assert_relative_eq!(report.conditions[0].sup, sup_c1, max_relative = 1e-8);
        assert_relative_eq!(report.conditions[1].sup, sup_c2, max_relative = 1e-8);
    }
}
