//! CSV formats for step functions, sampled kernels and weight tables.
//!
//! * step function: header `knot,value`, knots strictly increasing;
//! * sampled kernel: first row is the y-cell measures (corner field empty),
//!   each following row is an x-cell measure followed by that row's values;
//! * weight table: header `t,value`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::SampledKernel;
use crate::step::StepFunction;

fn parse_num(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what}: `{field}` is not a number")))
}

pub fn parse_step_csv(text: &str) -> Result<StepFunction> {
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 {
            if line != "knot,value" {
                return Err(Error::Parse(format!(
                    "step CSV must start with header `knot,value`, got `{line}`"
                )));
            }
            continue;
        }
        let (k, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `knot,value`", lineno + 1)))?;
        knots.push(parse_num(k, "knot")?);
        values.push(parse_num(v, "value")?);
    }
    StepFunction::new(knots, values)
}

pub fn step_to_csv(f: &StepFunction) -> String {
    let mut out = String::from("knot,value\n");
    for (k, v) in f.knots().iter().zip(f.values()) {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

pub fn read_step_csv(path: impl AsRef<Path>) -> Result<StepFunction> {
    parse_step_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_kernel_csv(text: &str) -> Result<SampledKernel> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("kernel CSV is empty".into()))?;
    let y_measures: Vec<f64> = header
        .split(',')
        .skip(1)
        .map(|f| parse_num(f, "y-cell measure"))
        .collect::<Result<_>>()?;
    let mut x_measures = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let mut fields = line.split(',');
        let m = fields
            .next()
            .ok_or_else(|| Error::Parse("kernel row missing x-cell measure".into()))?;
        x_measures.push(parse_num(m, "x-cell measure")?);
        let row: Vec<f64> = fields.map(|f| parse_num(f, "kernel value")).collect::<Result<_>>()?;
        values.push(row);
    }
    SampledKernel::new(x_measures, y_measures, values)
}

pub fn kernel_to_csv(k: &SampledKernel) -> String {
    let mut out = String::new();
    for m in k.y_measures() {
        out.push(',');
        out.push_str(&format!("{m}"));
    }
    out.push('\n');
    for (m, row) in k.x_measures().iter().zip(k.values()) {
        out.push_str(&format!("{m}"));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn read_kernel_csv(path: impl AsRef<Path>) -> Result<SampledKernel> {
    parse_kernel_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_weight_table_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 {
            if line != "t,value" {
                return Err(Error::Parse(format!(
                    "weight table must start with header `t,value`, got `{line}`"
                )));
            }
            continue;
        }
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `t,value`", lineno + 1)))?;
        ts.push(parse_num(t, "t")?);
        values.push(parse_num(v, "value")?);
    }
    Ok((ts, values))
}
