//! Command-line surface for the Orlicz functional library: `compute` for a
//! single quantity on explicit bodies, `verify` to run an inequality suite,
//! `sweep` to emit plot-ready CSV along a parameter axis.
//!
//! Exit codes are a stable contract: 0 success, 1 error, 2 success with a
//! degenerate or diverging flag.

use clap::{Args, Parser, Subcommand, ValueEnum};
use orlicz_core::bodies::{random_body, BodyClass, ConvexBody};
use orlicz_core::error::{Error, Result};
use orlicz_core::functionals::{
    affine_orlicz, affine_orlicz_multi, geominimal_orlicz, ith_mixed, lp_affine_closed_form,
    FunctionalResult, LpWhich, OptimizerOpts,
};
use orlicz_core::grid::SphereGrid;
use orlicz_core::harness::{equality_witness, regrid, run_suite, CaseStatus, SuiteReport, SUITE_NAMES};
use orlicz_core::mixed;
use orlicz_core::orlicz::{OrliczFunction, PhiSpec};
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "orlicz", about = "Orlicz mixed volumes, affine/geominimal surface areas, and inequality verification", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    VPhi,
    SPhi,
    Affine,
    Geominimal,
    Multi,
    IthMixed,
    LpClosedForm,
}

#[derive(Args)]
struct CommonOpts {
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Grid resolution (even, >= 8).
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Tolerance (optimizer convergence for compute/sweep, margin for verify).
    #[arg(long)]
    tol: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one quantity for explicit bodies and a phi.
    Compute {
        /// Body JSON path or inline spec (ball:R, random:smooth:SEED,
        /// random:polytope:SEED). Repeat for two-body quantities.
        #[arg(long, required = true)]
        body: Vec<String>,
        /// Phi spec (power:P, constant:A, arctan_inv_n, log1p_inv_n,
        /// exp_neg_inv_n) or a JSON file path. Repeat for multi/ith_mixed.
        #[arg(long, required = true)]
        phi: Vec<String>,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Mixing index for ith_mixed.
        #[arg(long)]
        index: Option<f64>,
        /// Exponent for lp_closed_form.
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run an inequality suite and report per-case certification status.
    Verify {
        #[arg(long)]
        suite: String,
        /// Check the equality ("if") direction on the ellipsoid corpus
        /// instead of the inequality corpus.
        #[arg(long, default_value_t = false)]
        equality: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sweep a parameter axis and emit CSV rows for plotting.
    Sweep {
        #[arg(long, required = true)]
        body: Vec<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Axis spec: `p=0.5,1,2,4` or `resolution=128,256,512,1024`.
        #[arg(long)]
        axis: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Effective configuration echoed into every JSON artifact so runs can be
/// reproduced from their outputs alone.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    dim: usize,
    grid: usize,
    seed: u64,
    restarts: usize,
    tol: f64,
    threads: usize,
}

#[derive(Serialize)]
struct ComputeArtifact {
    config: RunConfig,
    quantity: String,
    bodies: Vec<String>,
    phis: Vec<String>,
    result: serde_json::Value,
}

fn threads_cap() -> usize {
    std::env::var("ORLICZ_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn parse_body(spec: &str, dim: usize) -> Result<ConvexBody> {
    if let Some(rest) = spec.strip_prefix("ball:") {
        let r: f64 = rest
            .parse()
            .map_err(|_| Error::ParseError(format!("bad ball radius: {rest}")))?;
        return Ok(ConvexBody::ball(r));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let (class, seed) = rest
            .split_once(':')
            .ok_or_else(|| Error::ParseError(format!("bad random body spec: {spec}")))?;
        let class = match class {
            "smooth" => BodyClass::Smooth,
            "polytope" => BodyClass::Polytope,
            other => return Err(Error::ParseError(format!("unknown body class: {other}"))),
        };
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::ParseError(format!("bad seed: {seed}")))?;
        return random_body(dim, seed, class);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::ParseError(format!("cannot read body file {spec}: {e}")))?;
    let body: ConvexBody =
        serde_json::from_str(&text).map_err(|e| Error::ParseError(format!("{spec}: {e}")))?;
    body.validate()?;
    Ok(body)
}

fn parse_phi(spec: &str, dim: usize) -> Result<OrliczFunction> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::ParseError(format!("cannot read phi file {spec}: {e}")))?;
        let ps: PhiSpec =
            serde_json::from_str(&text).map_err(|e| Error::ParseError(format!("{spec}: {e}")))?;
        return ps.into_function(dim);
    }
    PhiSpec::parse(spec)?.into_function(dim)
}

/// Write atomically: a temp file in the target directory, then rename.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let tmp = dir
                .map(|d| d.join(".orlicz-tmp"))
                .unwrap_or_else(|| PathBuf::from(".orlicz-tmp"));
            let write = |p: &Path| -> std::io::Result<()> {
                let mut f = std::fs::File::create(p)?;
                f.write_all(content.as_bytes())?;
                f.sync_all()
            };
            write(&tmp)
                .and_then(|_| std::fs::rename(&tmp, path))
                .map_err(|e| Error::ParseError(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn config_for(name: &str, c: &CommonOpts, default_tol: f64) -> Result<(RunConfig, SphereGrid, OptimizerOpts)> {
    if c.grid < 8 || c.grid % 2 != 0 {
        return Err(Error::InvalidResolution(c.grid));
    }
    let grid = SphereGrid::build(c.dim, c.grid)?;
    let tol = c.tol.unwrap_or(default_tol);
    let opts = OptimizerOpts {
        restarts: c.restarts,
        seed: c.seed,
        ..Default::default()
    };
    let config = RunConfig {
        command: name.to_string(),
        dim: c.dim,
        grid: c.grid,
        seed: c.seed,
        restarts: c.restarts,
        tol,
        threads: threads_cap(),
    };
    Ok((config, grid, opts))
}

/// Resample smooth bodies onto the run grid; other kinds are grid-free.
fn align(bodies: &[ConvexBody], grid: &SphereGrid) -> Result<Vec<ConvexBody>> {
    bodies
        .iter()
        .map(|k| match k {
            ConvexBody::Smooth { .. } => regrid(k, grid),
            other => Ok(other.clone()),
        })
        .collect()
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::VPhi => "v_phi",
        Quantity::SPhi => "s_phi",
        Quantity::Affine => "affine",
        Quantity::Geominimal => "geominimal",
        Quantity::Multi => "multi",
        Quantity::IthMixed => "ith_mixed",
        Quantity::LpClosedForm => "lp_closed_form",
    }
}

fn need_bodies(bodies: &[ConvexBody], n: usize, q: Quantity) -> Result<()> {
    if bodies.len() != n {
        return Err(Error::ParseError(format!(
            "{} expects {n} --body argument(s), got {}",
            quantity_name(q),
            bodies.len()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_quantity(
    q: Quantity,
    bodies: &[ConvexBody],
    phis: &[OrliczFunction],
    index: Option<f64>,
    p: Option<f64>,
    grid: &SphereGrid,
    opts: &OptimizerOpts,
) -> Result<(serde_json::Value, bool)> {
    let first_phi = || -> Result<&OrliczFunction> {
        phis.first()
            .ok_or_else(|| Error::ParseError("a --phi argument is required".into()))
    };
    let flagged = |r: &FunctionalResult| r.degenerate;
    let to_json = |r: FunctionalResult| -> Result<(serde_json::Value, bool)> {
        let f = flagged(&r);
        Ok((
            serde_json::to_value(&r).map_err(|e| Error::ParseError(e.to_string()))?,
            f,
        ))
    };
    match q {
        Quantity::VPhi => {
            need_bodies(bodies, 2, q)?;
            let r = mixed::v_phi(&bodies[0], &bodies[1], first_phi()?, Some(grid))?;
            Ok((
                serde_json::to_value(&r).map_err(|e| Error::ParseError(e.to_string()))?,
                false,
            ))
        }
        Quantity::SPhi => {
            need_bodies(bodies, 1, q)?;
            let v = mixed::s_phi(&bodies[0], first_phi()?, Some(grid))?;
            Ok((serde_json::json!({ "value": v }), false))
        }
        Quantity::Affine => {
            need_bodies(bodies, 1, q)?;
            to_json(affine_orlicz(&bodies[0], first_phi()?, grid, opts)?)
        }
        Quantity::Geominimal => {
            need_bodies(bodies, 1, q)?;
            to_json(geominimal_orlicz(&bodies[0], first_phi()?, grid, opts)?)
        }
        Quantity::Multi => {
            if bodies.len() < 2 || phis.len() != bodies.len() {
                return Err(Error::ParseError(
                    "multi expects >= 2 bodies and one --phi per body".into(),
                ));
            }
            let ks: Vec<&ConvexBody> = bodies.iter().collect();
            let ps: Vec<&OrliczFunction> = phis.iter().collect();
            to_json(affine_orlicz_multi(&ks, &ps, grid, opts)?)
        }
        Quantity::IthMixed => {
            need_bodies(bodies, 2, q)?;
            if phis.len() != 2 {
                return Err(Error::ParseError("ith_mixed expects two --phi arguments".into()));
            }
            let i = index
                .ok_or_else(|| Error::ParseError("ith_mixed requires --index".into()))?;
            to_json(ith_mixed(
                &bodies[0], &bodies[1], &phis[0], &phis[1], i, LpWhich::Affine, grid, opts,
            )?)
        }
        Quantity::LpClosedForm => {
            need_bodies(bodies, 1, q)?;
            let p = p.ok_or_else(|| Error::ParseError("lp_closed_form requires --p".into()))?;
            let v = lp_affine_closed_form(&bodies[0], p, grid)?;
            Ok((serde_json::json!({ "value": v, "p": p }), false))
        }
    }
}

fn cmd_compute(
    body: Vec<String>,
    phi: Vec<String>,
    quantity: Quantity,
    index: Option<f64>,
    p: Option<f64>,
    common: CommonOpts,
) -> Result<u8> {
    let (config, grid, mut opts) = config_for("compute", &common, 1e-6)?;
    opts.tol = config.tol;
    let bodies: Vec<ConvexBody> = body
        .iter()
        .map(|s| parse_body(s, common.dim))
        .collect::<Result<_>>()?;
    let phis: Vec<OrliczFunction> = phi
        .iter()
        .map(|s| parse_phi(s, common.dim))
        .collect::<Result<_>>()?;
    let bodies = align(&bodies, &grid)?;
    let (result, flagged) = run_quantity(quantity, &bodies, &phis, index, p, &grid, &opts)?;
    let artifact = ComputeArtifact {
        config,
        quantity: quantity_name(quantity).to_string(),
        bodies: body,
        phis: phi,
        result,
    };
    let text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::ParseError(e.to_string()))?
        + "\n";
    emit(&common.out, &text)?;
    Ok(if flagged { 2 } else { 0 })
}

fn cmd_verify(suite: String, equality: bool, common: CommonOpts) -> Result<u8> {
    let (config, grid, opts) = config_for("verify", &common, 0.01)?;
    let report: SuiteReport = if equality {
        equality_witness(&suite, &grid, common.seed, config.tol, &opts)?
    } else {
        run_suite(&suite, &grid, common.seed, config.tol, &opts, None)?
    };
    let violated = report.count(CaseStatus::Violated);
    let text = match common.format {
        Format::Csv => report.to_csv(),
        Format::Json => {
            let wrapped = serde_json::json!({
                "config": config,
                "report": report,
                "summary": {
                    "certified": report.count(CaseStatus::Certified),
                    "inconclusive": report.count(CaseStatus::Inconclusive),
                    "violated": violated,
                },
            });
            serde_json::to_string_pretty(&wrapped)
                .map_err(|e| Error::ParseError(e.to_string()))?
                + "\n"
        }
    };
    emit(&common.out, &text)?;
    Ok(if violated == 0 { 0 } else { 1 })
}

fn parse_axis(axis: Option<String>) -> Result<(String, Vec<f64>)> {
    let axis = axis.ok_or_else(|| {
        Error::ParseError("sweep requires --axis (e.g. p=0.5,1,2 or resolution=128,256)".into())
    })?;
    let (name, vals) = axis
        .split_once('=')
        .ok_or_else(|| Error::ParseError(format!("bad axis spec: {axis}")))?;
    if !matches!(name, "p" | "resolution") {
        return Err(Error::ParseError(format!("unknown axis: {name}")));
    }
    let vals = vals
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::ParseError(format!("bad axis value: {v}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return Err(Error::ParseError("axis has no values".into()));
    }
    Ok((name.to_string(), vals))
}

fn cmd_sweep(
    body: Vec<String>,
    phi: Option<String>,
    quantity: Quantity,
    axis: Option<String>,
    common: CommonOpts,
) -> Result<u8> {
    let (axis_name, values) = parse_axis(axis)?;
    if common.grid < 8 || common.grid % 2 != 0 {
        return Err(Error::InvalidResolution(common.grid));
    }
    let opts = OptimizerOpts {
        restarts: common.restarts,
        seed: common.seed,
        ..Default::default()
    };
    let bodies: Vec<ConvexBody> = body
        .iter()
        .map(|s| parse_body(s, common.dim))
        .collect::<Result<_>>()?;
    let mut rows = String::from("param,value,certified_side,runtime_ms,monotone_refinement\n");
    let mut prev_gap: Option<f64> = None;
    for &v in &values {
        let start = std::time::Instant::now();
        let (grid, phi_fn) = match axis_name.as_str() {
            "p" => (
                SphereGrid::build(common.dim, common.grid)?,
                OrliczFunction::power(v, common.dim)?,
            ),
            "resolution" => {
                let res = v as usize;
                if res < 8 || res % 2 != 0 || (v - res as f64).abs() > 0.0 {
                    return Err(Error::InvalidResolution(res));
                }
                let spec = phi.as_deref().unwrap_or("power:2");
                (
                    SphereGrid::build(common.dim, res)?,
                    parse_phi(spec, common.dim)?,
                )
            }
            _ => unreachable!(),
        };
        let aligned = align(&bodies, &grid)?;
        let (result, _) = run_quantity(quantity, &aligned, &[phi_fn], None, Some(v), &grid, &opts)?;
        let value = result
            .get("value")
            .and_then(|x| x.as_f64())
            .ok_or_else(|| Error::ParseError("quantity produced no scalar value".into()))?;
        let side = result
            .get("certified_side")
            .and_then(|x| x.as_str())
            .unwrap_or("exact")
            .to_string();
        let ms = start.elapsed().as_millis();
        // For grid sweeps, report whether refinement still moves the value
        // monotonically toward the limit (gap vs previous resolution).
        let mono = if axis_name == "resolution" {
            let gap = prev_gap.map(|g| (value - g).abs());
            prev_gap = Some(value);
            match gap {
                Some(g) => format!("{g:.6e}"),
                None => "".to_string(),
            }
        } else {
            "".to_string()
        };
        rows.push_str(&format!("{v},{value:.12e},{side},{ms},{mono}\n"));
    }
    emit(&common.out, &rows)?;
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compute {
            body,
            phi,
            quantity,
            index,
            p,
            common,
        } => cmd_compute(body, phi, quantity, index, p, common),
        Command::Verify {
            suite,
            equality,
            common,
        } => cmd_verify(suite, equality, common),
        Command::Sweep {
            body,
            phi,
            quantity,
            axis,
            common,
        } => cmd_sweep(body, phi, quantity, axis, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            if matches!(e, Error::UnknownSuite(_)) {
                eprintln!("known suites: {}", SUITE_NAMES.join(", "));
            }
            ExitCode::from(1)
        }
    }
}
