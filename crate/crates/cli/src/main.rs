//! `lgt` - rearrangements, Lorentz-Gamma norms, Stieltjes-type operators and
//! weighted boundedness checks from the command line.
//!
//! Exit codes: for `check`, 0 = bounded, 1 = unbounded, 2 = inconclusive;
//! all other commands exit 0 on success. Usage errors exit 64, data errors
//! (unreadable files, inadmissible parameters) exit 65.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lgt_core::{
    bloom_kerman_check, corollary_s2_check, estimate_norm_ratio, lg_norm, neugebauer_check,
    parse_weight, verify_norm_chain, BkKernel, ConditionReport, GeometricGrid, InequalityId,
    LgSpace, OperatorSpec, Space, Verdict, Weight,
};

const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;

#[derive(Parser)]
#[command(name = "lgt", version, about = "Weighted norm inequalities toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputOpts {
    /// Output file; stdout when omitted. Files are written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Grid override "t_min,t_max,points_per_decade"
    /// (also via env LGT_GRID; default 1e-8,1e8,32).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a boundedness decision procedure; the exit code is the verdict.
    Check {
        #[command(subcommand)]
        set: CheckSet,
    },
    /// Lorentz-Gamma norm of a step function read from CSV.
    Norm {
        #[arg(long)]
        p: f64,
        /// Weight literal, e.g. "pow(a0=0,ainf=0)".
        #[arg(long)]
        phi: String,
        /// Step function CSV with header knot,value.
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Empirical operator-norm ratios over random test functions.
    Estimate {
        /// Operator: stieltjes | s2 | s2log | kernel:<csv>.
        #[arg(long)]
        op: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: Option<f64>,
        /// Target-side weight literal (enables the weighted forms).
        #[arg(long)]
        phi1: Option<String>,
        /// Source-side weight literal.
        #[arg(long)]
        phi2: Option<String>,
        /// Which inequality shape to instantiate.
        #[arg(long, value_enum, default_value = "i11")]
        inequality: CliInequality,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Nonincreasing rearrangement of a step function.
    Rearrange {
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Check the reduction/passage/inequality norm chain on random samples.
    Chain {
        /// Sampled kernel CSV (first row y-measures, first column x-measures).
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        phi1: String,
        #[arg(long)]
        phi2: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliInequality {
    I11,
    I12,
    I34,
}

#[derive(Subcommand)]
enum CheckSet {
    /// Exact constant-1 prefix comparison between f**- and f*-weighted norms.
    Neugebauer {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        u: String,
        /// Weight literal for v; or derive the minimal v with --v-from-u.
        #[arg(long, conflicts_with = "v_from_u")]
        v: Option<String>,
        /// Use the associated weight u^(q) as v.
        #[arg(long)]
        v_from_u: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Two-condition test for Hardy-type operators with monotone kernels.
    BloomKerman {
        /// Kernel: log | const | const:<c>.
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Outer multiplier weight on the target side.
        #[arg(long)]
        w: String,
        /// Target measure weight.
        #[arg(long)]
        t: String,
        /// Inner multiplier weight on the source side.
        #[arg(long)]
        u: String,
        /// Source measure weight.
        #[arg(long)]
        v: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Four-condition test for the iterated Stieltjes operator.
    S2Corollary {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        phi1: String,
        #[arg(long)]
        phi2: String,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(EXIT_DATA);
        }
    }
}

fn parse_grid_spec(spec: &str) -> anyhow::Result<GeometricGrid> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(anyhow!("grid spec `{spec}` must be t_min,t_max,points_per_decade"));
    }
    let t_min: f64 = parts[0].parse().context("grid t_min")?;
    let t_max: f64 = parts[1].parse().context("grid t_max")?;
    let ppd: u32 = parts[2].parse().context("grid points_per_decade")?;
    Ok(GeometricGrid::new(t_min, t_max, ppd)?)
}

fn grid_from(opts: &OutputOpts) -> anyhow::Result<GeometricGrid> {
    if let Some(spec) = &opts.grid {
        return parse_grid_spec(spec);
    }
    if let Ok(spec) = std::env::var("LGT_GRID") {
        return parse_grid_spec(&spec);
    }
    Ok(GeometricGrid::default_grid())
}

fn atomic_write(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(output: &OutputOpts, text: &str) -> anyhow::Result<()> {
    match &output.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => atomic_write(path, text),
    }
}

fn report_text(report: &ConditionReport, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => {
            let mut s = String::from("name,sup,argmax_t,slope_lo,slope_hi\n");
            for c in &report.conditions {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name, c.sup, c.argmax_t, c.slope_lo, c.slope_hi
                ));
            }
            s
        }
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Bounded => 0,
        Verdict::Unbounded => 1,
        Verdict::Inconclusive => 2,
    }
}

fn parse_bk_kernel(spec: &str) -> anyhow::Result<BkKernel> {
    if spec == "log" {
        return Ok(BkKernel::log());
    }
    if spec == "const" {
        return Ok(BkKernel::constant(1.0));
    }
    if let Some(c) = spec.strip_prefix("const:") {
        let c: f64 = c.parse().context("const kernel value")?;
        return Ok(BkKernel::constant(c));
    }
    Err(anyhow!("unknown kernel `{spec}` (expected log | const | const:<c>)"))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check { set } => run_check(set),
        Command::Norm { p, phi, f, output } => {
            let grid = grid_from(&output)?;
            let weight = parse_weight(&phi)?;
            let step = lgt_core::io::read_step_csv(&f)
                .with_context(|| format!("reading {}", f.display()))?;
            let space = LgSpace::new(p, weight)?;
            let norm = lg_norm(&step, &space, &grid)?;
            let text = match output.format {
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "norm": norm,
                        "p": p,
                        "phi": phi,
                        "f": f.display().to_string(),
                    }))? + "\n"
                }
                Format::Csv => format!("norm\n{norm}\n"),
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::Estimate { op, p, q, phi1, phi2, inequality, samples, seed, output } => {
            let grid = grid_from(&output)?;
            let q = q.unwrap_or(p);
            let op = parse_operator(&op)?;
            let id = match inequality {
                CliInequality::I11 => InequalityId::I11,
                CliInequality::I12 => InequalityId::I12,
                CliInequality::I34 => InequalityId::I34,
            };
            let (source, target) = build_spaces(p, q, phi1.as_deref(), phi2.as_deref(), id, &grid)?;
            let est = estimate_norm_ratio(&op, &source, &target, id, samples, seed, &grid)?;
            let text = match output.format {
                Format::Json => serde_json::to_string_pretty(&est)? + "\n",
                Format::Csv => {
                    let mut s = String::from("scale,max_ratio\n");
                    for r in &est.ratio_by_scale {
                        s.push_str(&format!("{},{}\n", r.scale, r.max_ratio));
                    }
                    s
                }
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::Rearrange { f, output } => {
            let step = lgt_core::io::read_step_csv(&f)
                .with_context(|| format!("reading {}", f.display()))?;
            let rearranged = step.rearranged();
            let text = match output.format {
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "knots": rearranged.knots(),
                        "values": rearranged.values(),
                    }))? + "\n"
                }
                Format::Csv => lgt_core::io::step_to_csv(&rearranged),
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::Chain { kernel, p, q, phi1, phi2, samples, seed, output } => {
            let grid = grid_from(&output)?;
            let k = lgt_core::io::read_kernel_csv(&kernel)
                .with_context(|| format!("reading {}", kernel.display()))?;
            let w1 = parse_weight(&phi1)?;
            let w2 = parse_weight(&phi2)?;
            let report = verify_norm_chain(&k, &w1, &w2, p, q, samples, seed, &grid)?;
            let text = match output.format {
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
                Format::Csv => {
                    let mut s = String::from("metric,value\n");
                    s.push_str(&format!("samples,{}\n", report.samples));
                    s.push_str(&format!("violations,{}\n", report.violations.len()));
                    s.push_str(&format!("max_reduction_ratio,{}\n", report.max_reduction_ratio));
                    s.push_str(&format!("max_passage_ratio,{}\n", report.max_passage_ratio));
                    s.push_str(&format!(
                        "max_inequality_ratio,{}\n",
                        report.max_inequality_ratio
                    ));
                    s
                }
            };
            emit(&output, &text)?;
            Ok(0)
        }
    }
}

fn parse_operator(spec: &str) -> anyhow::Result<OperatorSpec> {
    match spec {
        "stieltjes" => Ok(OperatorSpec::Stieltjes),
        "s2" => Ok(OperatorSpec::S2Exact),
        "s2log" => Ok(OperatorSpec::S2LogForm),
        other => {
            if let Some(path) = other.strip_prefix("kernel:") {
                let k = lgt_core::io::read_kernel_csv(path)
                    .with_context(|| format!("reading {path}"))?;
                Ok(OperatorSpec::Sampled(k))
            } else {
                Err(anyhow!("unknown operator `{other}` (stieltjes | s2 | s2log | kernel:<csv>)"))
            }
        }
    }
}

/// Derive the source/target spaces for an estimate run. Without weights,
/// both sides are unweighted Lp. With weights: the direct form uses the
/// Lorentz-Gamma spaces; the rearranged form puts the associated weight on
/// the target; the composed form uses the derived weighted-Lp densities.
fn build_spaces(
    p: f64,
    q: f64,
    phi1: Option<&str>,
    phi2: Option<&str>,
    id: InequalityId,
    grid: &GeometricGrid,
) -> anyhow::Result<(Space, Space)> {
    match (phi1, phi2) {
        (None, None) => {
            let w = Weight::one();
            Ok((Space::Lp { p, weight: w.clone() }, Space::Lp { p: q, weight: w }))
        }
        (Some(p1), Some(p2)) => {
            let w1 = parse_weight(p1)?;
            let w2 = parse_weight(p2)?;
            match id {
                InequalityId::I11 => Ok((
                    Space::Gamma(LgSpace::new(p, w2)?),
                    Space::Gamma(LgSpace::new(q, w1)?),
                )),
                InequalityId::I12 => {
                    let w1q = lgt_core::associated_weight(&w1, q, grid)?;
                    Ok((
                        Space::Gamma(LgSpace::new(p, w2)?),
                        Space::Gamma(LgSpace::new(q, w1q)?),
                    ))
                }
                InequalityId::I34 => {
                    let w1q = lgt_core::associated_weight(&w1, q, grid)?;
                    let psi2 = lgt_core::dual_weight(&w2, p, grid)?;
                    Ok((
                        Space::Lp { p, weight: psi2.pow(1.0 - p) },
                        Space::Lp { p: q, weight: w1q },
                    ))
                }
            }
        }
        _ => Err(anyhow!("provide both --phi1 and --phi2, or neither")),
    }
}

fn run_check(set: CheckSet) -> anyhow::Result<i32> {
    let (report, output) = match set {
        CheckSet::Neugebauer { q, u, v, v_from_u, output } => {
            let grid = grid_from(&output)?;
            let uw = parse_weight(&u)?;
            let vw = if v_from_u {
                lgt_core::associated_weight(&uw, q, &grid)?
            } else {
                let lit = v.ok_or_else(|| anyhow!("either --v or --v-from-u is required"))?;
                parse_weight(&lit)?
            };
            (neugebauer_check(&uw, &vw, q, &grid)?, output)
        }
        CheckSet::BloomKerman { kernel, p, q, w, t, u, v, output } => {
            let grid = grid_from(&output)?;
            let kern = parse_bk_kernel(&kernel)?;
            let report = bloom_kerman_check(
                &kern,
                &parse_weight(&w)?,
                &parse_weight(&t)?,
                &parse_weight(&u)?,
                &parse_weight(&v)?,
                p,
                q,
                &grid,
            )?;
            (report, output)
        }
        CheckSet::S2Corollary { p, q, phi1, phi2, output } => {
            let grid = grid_from(&output)?;
            let report =
                corollary_s2_check(&parse_weight(&phi1)?, &parse_weight(&phi2)?, p, q, &grid)?;
            (report, output)
        }
    };
    let text = report_text(&report, output.format)?;
    emit(&output, &text)?;
    Ok(verdict_code(report.verdict))
}
