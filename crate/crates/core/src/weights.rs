//! Weights on the half-line and the weight algebra behind the norm
//! inequalities: admissibility, the associated weight
//! `w^(q)(t) = q t^{q-1} int_t^inf s^{-q} w(s) ds`, and the explicit
//! Koethe-dual weight of a Lorentz-Gamma norm.
//!
//! Two representations are supported. The symbolic two-regime family
//!
//! ```text
//! w(t) = C * t^a0 * (1 + t)^(a_inf - a0) * ln(e + t)^c_log
//! ```
//!
//! is closed under the tail calculus used here and covers the Lebesgue,
//! Lorentz and log-refined cases; everything else is tabulated on a grid
//! with declared tail exponents and evaluated by log-log interpolation.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::GeometricGrid;
use crate::quad::{CumulativeIntegrals, TailSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicWeight {
    pub c: f64,
    pub a0: f64,
    pub a_inf: f64,
    pub c_log: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeight {
    ts: Vec<f64>,
    values: Vec<f64>,
    tail: TailSpec,
}

impl TabulatedWeight {
    pub fn new(ts: Vec<f64>, values: Vec<f64>, tail: TailSpec) -> Result<Self> {
        if ts.len() != values.len() || ts.len() < 2 {
            return Err(Error::invalid("tabulated weight needs >= 2 matching samples"));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) || ts[0] <= 0.0 {
            return Err(Error::invalid("tabulation points must be positive and increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid("tabulated weight values must be positive"));
        }
        Ok(Self { ts, values, tail })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Symbolic(SymbolicWeight),
    Tabulated(TabulatedWeight),
}

impl Weight {
    /// `w(t) = C t^a` globally.
    pub fn power(c: f64, a: f64) -> Self {
        Weight::Symbolic(SymbolicWeight { c, a0: a, a_inf: a, c_log: 0.0 })
    }

    /// The constant weight 1.
    pub fn one() -> Self {
        Weight::power(1.0, 0.0)
    }

    pub fn symbolic(c: f64, a0: f64, a_inf: f64, c_log: f64) -> Self {
        Weight::Symbolic(SymbolicWeight { c, a0, a_inf, c_log })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Symbolic(s) => {
                s.c * t.powf(s.a0)
                    * (1.0 + t).powf(s.a_inf - s.a0)
                    * (std::f64::consts::E + t).ln().powf(s.c_log)
            }
            Weight::Tabulated(tab) => {
                let ts = &tab.ts;
                let vs = &tab.values;
                if t <= ts[0] {
                    return vs[0] * (t / ts[0]).powf(tab.tail.exponent_at_zero);
                }
                let n = ts.len();
                if t >= ts[n - 1] {
                    return vs[n - 1] * (t / ts[n - 1]).powf(tab.tail.exponent_at_infinity);
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                let w = (t / ts[i]).ln() / (ts[i + 1] / ts[i]).ln();
                (vs[i].ln() * (1.0 - w) + vs[i + 1].ln() * w).exp()
            }
        }
    }

    /// Declared power exponents at both ends (log factors not included).
    pub fn tail(&self) -> TailSpec {
        match self {
            Weight::Symbolic(s) => TailSpec::new(s.a0, s.a_inf),
            Weight::Tabulated(t) => t.tail,
        }
    }

    /// Power of the logarithmic factor at infinity (0 for tabulated weights).
    fn log_power(&self) -> f64 {
        match self {
            Weight::Symbolic(s) => s.c_log,
            Weight::Tabulated(_) => 0.0,
        }
    }

    /// Multiply by a positive constant.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive (got {c})")));
        }
        Ok(match self {
            Weight::Symbolic(s) => {
                Weight::Symbolic(SymbolicWeight { c: s.c * c, ..s.clone() })
            }
            Weight::Tabulated(t) => Weight::Tabulated(TabulatedWeight {
                ts: t.ts.clone(),
                values: t.values.iter().map(|v| v * c).collect(),
                tail: t.tail,
            }),
        })
    }

    /// Pointwise power `w(t)^r`; exact on both representations.
    pub fn pow(&self, r: f64) -> Self {
        match self {
            Weight::Symbolic(s) => Weight::Symbolic(SymbolicWeight {
                c: s.c.powf(r),
                a0: s.a0 * r,
                a_inf: s.a_inf * r,
                c_log: s.c_log * r,
            }),
            Weight::Tabulated(t) => Weight::Tabulated(TabulatedWeight {
                ts: t.ts.clone(),
                values: t.values.iter().map(|v| v.powf(r)).collect(),
                tail: TailSpec::new(
                    t.tail.exponent_at_zero * r,
                    t.tail.exponent_at_infinity * r,
                ),
            }),
        }
    }

    /// A pure global power `C t^a`?
    pub fn as_pure_power(&self) -> Option<(f64, f64)> {
        match self {
            Weight::Symbolic(s) if s.a0 == s.a_inf && s.c_log == 0.0 => Some((s.c, s.a0)),
            _ => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Symbolic(s) => {
                write!(f, "pow(a0={},ainf={},log={},C={})", s.a0, s.a_inf, s.c_log, s.c)
            }
            Weight::Tabulated(t) => write!(
                f,
                "table(n={},a0={},ainf={})",
                t.ts.len(),
                t.tail.exponent_at_zero,
                t.tail.exponent_at_infinity
            ),
        }
    }
}

/// Admissibility of `(w, p)`: `int w(t)/(1+t^p) dt < inf` and `int w = inf`.
///
/// Decided by exponent arithmetic: the first integral is finite iff
/// `a0 > -1` and `a_inf < p-1` (at equality a log power below -1 still
/// converges); the second diverges iff `a_inf >= -1` (at -1, unless the log
/// power drops below -1).
pub fn check_admissible(w: &Weight, p: f64) -> bool {
    if !(p > 1.0 && p.is_finite()) {
        return false;
    }
    let t = w.tail();
    let lg = w.log_power();
    let first = t.exponent_at_zero > -1.0
        && (t.exponent_at_infinity < p - 1.0
            || (t.exponent_at_infinity == p - 1.0 && lg < -1.0));
    let second = t.exponent_at_infinity > -1.0
        || (t.exponent_at_infinity == -1.0 && lg >= -1.0);
    first && second
}

/// Like [`check_admissible`] but explains which hypothesis fails.
pub fn require_admissible(w: &Weight, p: f64, name: &str) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::AdmissibilityFailed(format!("{name}: exponent p={p} not in (1, inf)")));
    }
    let t = w.tail();
    let lg = w.log_power();
    if t.exponent_at_zero <= -1.0 {
        return Err(Error::AdmissibilityFailed(format!(
            "{name}: int {name}/(1+t^p) diverges at 0 (exponent {} <= -1)",
            t.exponent_at_zero
        )));
    }
    if !(t.exponent_at_infinity < p - 1.0
        || (t.exponent_at_infinity == p - 1.0 && lg < -1.0))
    {
        return Err(Error::AdmissibilityFailed(format!(
            "{name}: int {name}/(1+t^p) diverges at infinity (exponent {} >= p-1 = {})",
            t.exponent_at_infinity,
            p - 1.0
        )));
    }
    if !(t.exponent_at_infinity > -1.0 || (t.exponent_at_infinity == -1.0 && lg >= -1.0)) {
        return Err(Error::AdmissibilityFailed(format!(
            "{name}: int {name} is finite (exponent {} < -1 at infinity)",
            t.exponent_at_infinity
        )));
    }
    Ok(())
}

/// A Lorentz-Gamma space `(p, w)` with the admissibility invariant enforced.
#[derive(Debug, Clone)]
pub struct LgSpace {
    pub p: f64,
    pub weight: Weight,
}

impl LgSpace {
    pub fn new(p: f64, weight: Weight) -> Result<Self> {
        require_admissible(&weight, p, "weight")?;
        Ok(Self { p, weight })
    }
}

/// The associated weight `w^(q)(t) = q t^{q-1} int_t^inf s^{-q} w(s) ds`:
/// the minimal weight `v` with `int f**^q w <= int f*^q v` for all f.
///
/// Pure powers stay symbolic: for `w = C t^a`, `w^(q) = (q/(q-1-a)) C t^a`.
/// Everything else is tabulated on the grid.
pub fn associated_weight(w: &Weight, q: f64, grid: &GeometricGrid) -> Result<Weight> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q = {q} must lie in (1, inf)")));
    }
    let a_inf = w.tail().exponent_at_infinity;
    if a_inf >= q - 1.0 {
        return Err(Error::NonIntegrableTail(format!(
            "int_t^inf s^-q w diverges: weight exponent {a_inf} >= q-1 = {}",
            q - 1.0
        )));
    }
    if let Some((c, a)) = w.as_pure_power() {
        return Ok(Weight::power(c * q / (q - 1.0 - a), a));
    }
    let a0 = w.tail().exponent_at_zero;
    let sq = CumulativeIntegrals::new_saturating(
        |s| s.powf(-q) * w.eval(s),
        &TailSpec::new(a0 - q, a_inf - q),
        grid,
    )?;
    let nodes = grid.nodes();
    let values: Vec<f64> = nodes
        .iter()
        .zip(sq.suffix())
        .map(|(&t, &s)| q * t.powf(q - 1.0) * s)
        .collect();
    let tail = TailSpec::new(a0.min(q - 1.0), a_inf);
    Ok(Weight::Tabulated(TabulatedWeight::new(nodes.to_vec(), values, tail)?))
}

fn dual_exponents(a0: f64, a_inf: f64, p: f64, pp: f64) -> TailSpec {
    let at0 = if a0 <= p - 1.0 { a0 * (1.0 - pp) } else { a0 - p };
    let at_inf = a_inf * (1.0 - pp);
    TailSpec::new(at0, at_inf)
}

/// Koethe-dual weight of the Lorentz-Gamma norm with weight `w` and exponent
/// `p` (`p' = p/(p-1)` throughout):
///
/// ```text
///            t^{p'+p-1} (int_0^t w) (int_t^inf s^-p w(s) ds)
/// psi(t) = -------------------------------------------------
///            (int_0^t w + t^p int_t^inf s^-p w(s) ds)^{p'+1}
/// ```
///
/// Pure powers yield the symbolic closed form; general weights are
/// tabulated via the two cumulative integrals. See [`dual_weight_numeric`]
/// for the always-tabulated route.
pub fn dual_weight(w: &Weight, p: f64, grid: &GeometricGrid) -> Result<Weight> {
    require_admissible(w, p, "weight")?;
    let pp = p / (p - 1.0);
    if let Some((c, a)) = w.as_pure_power() {
        let c_out = c.powf(1.0 - pp) * ((a + 1.0) * (p - 1.0 - a)).powf(pp) / p.powf(pp + 1.0);
        return Ok(Weight::power(c_out, a * (1.0 - pp)));
    }
    dual_weight_numeric(w, p, grid)
}

/// Tabulated dual weight, regardless of representation. The symbolic
/// shortcut in [`dual_weight`] must agree with this on pure powers.
pub fn dual_weight_numeric(w: &Weight, p: f64, grid: &GeometricGrid) -> Result<Weight> {
    require_admissible(w, p, "weight")?;
    let pp = p / (p - 1.0);
    let tail = w.tail();
    // int w = inf is admissible, so the suffix side of `a` saturates; only
    // the prefix is used. Same in reverse for `b`.
    let a = CumulativeIntegrals::new_saturating(|s| w.eval(s), &tail, grid)?;
    let b = CumulativeIntegrals::new_saturating(
        |s| s.powf(-p) * w.eval(s),
        &TailSpec::new(tail.exponent_at_zero - p, tail.exponent_at_infinity - p),
        grid,
    )?;
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    for (i, &t) in nodes.iter().enumerate() {
        let (ai, bi) = (a.prefix()[i], b.suffix()[i]);
        let num = t.powf(pp + p - 1.0) * ai * bi;
        let den = (ai + t.powf(p) * bi).powf(pp + 1.0);
        values.push(num / den);
    }
    let out_tail = dual_exponents(tail.exponent_at_zero, tail.exponent_at_infinity, p, pp);
    Ok(Weight::Tabulated(TabulatedWeight::new(nodes.to_vec(), values, out_tail)?))
}

/// Parse a compact weight literal:
/// `pow(a0=..,ainf=..[,log=..][,C=..])` or
/// `table(file=<csv>,a0=..,ainf=..)` where the CSV has header `t,value`.
pub fn parse_weight(s: &str) -> Result<Weight> {
    let s = s.trim();
    let (kind, inner) = s
        .find('(')
        .and_then(|i| s.strip_suffix(')').map(|body| (&s[..i], &body[i + 1..])))
        .ok_or_else(|| Error::Parse(format!("weight literal `{s}` is not of form name(...)")))?;
    let mut fields = std::collections::BTreeMap::new();
    for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let num = |key: &str| -> Result<Option<f64>> {
        fields
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("`{key}={v}` is not a number")))
            })
            .transpose()
    };
    match kind.trim() {
        "pow" => {
            let a0 = num("a0")?
                .ok_or_else(|| Error::Parse("pow(...) requires a0=".into()))?;
            let a_inf = num("ainf")?
                .ok_or_else(|| Error::Parse("pow(...) requires ainf=".into()))?;
            let c_log = num("log")?.unwrap_or(0.0);
            let c = num("C")?.unwrap_or(1.0);
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::Parse(format!("weight constant C={c} must be positive")));
            }
            Ok(Weight::symbolic(c, a0, a_inf, c_log))
        }
        "table" => {
            let file = fields
                .get("file")
                .ok_or_else(|| Error::Parse("table(...) requires file=".into()))?;
            let a0 = num("a0")?
                .ok_or_else(|| Error::Parse("table(...) requires tail exponent a0=".into()))?;
            let a_inf = num("ainf")?
                .ok_or_else(|| Error::Parse("table(...) requires tail exponent ainf=".into()))?;
            let text = std::fs::read_to_string(file)?;
            let (ts, values) = crate::io::parse_weight_table_csv(&text)?;
            Ok(Weight::Tabulated(TabulatedWeight::new(
                ts,
                values,
                TailSpec::new(a0, a_inf),
            )?))
        }
        other => Err(Error::Parse(format!("unknown weight kind `{other}`"))),
    }
}
