use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use enorm_core::linalg::{derive_seed, rng_from_seed};
use enorm_core::oscillator::{DEFAULT_DMAX, DEFAULT_LADDER_TOL, DEFAULT_SCHEDULE};
use enorm_core::{
    enorm_curve, enorm_from_gamma, enorm_oracle, extension_inequality_check, gamma_frontier,
    gamma_membership, gbound_fixed, gbound_ladder, sample_constrained_pair, y_phi, BoundEstimate,
    ENormCurve, Error as CoreError, GammaPoint, KrausMap, Membership, OperatorPair, Tolerances,
    TruncationLadder,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{emit, ResultRecord, Table};
use crate::plot::render_file;
use crate::source::{read_kraus, OperatorArgs};
use crate::CliError;

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Master seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base path: writes <out>.json and <out>.csv. JSON goes to stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn checked_grid(grid: &[f64]) -> Result<Vec<f64>, CliError> {
    if grid.is_empty()
        || grid.iter().any(|e| !e.is_finite())
        || grid.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(CliError::Config(format!(
            "--grid must be a non-empty, strictly increasing list of finite energies, got {grid:?}"
        )));
    }
    Ok(grid.to_vec())
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!(
            "--{name} must be positive, got {x}"
        )))
    }
}

fn finish<C: Serialize>(
    command: &'static str,
    config: &C,
    results: Value,
    start: Instant,
    tables: &[(&str, &Table)],
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let record = ResultRecord {
        tool: "enorm",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    emit(&record, tables, out)
}

fn curve_points(curve: &ENormCurve) -> Value {
    curve
        .points
        .iter()
        .map(
            |p| json!({ "energy": p.energy, "value": p.value, "mu_star": p.mu_star, "gap": p.gap }),
        )
        .collect()
}

#[derive(Args, Debug, Serialize)]
pub struct EnormArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Comma-separated energies.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub grid: Vec<f64>,
    /// Cross-check every point against the sampling oracle.
    #[arg(long)]
    pub verify: bool,
    /// Largest accepted distance between the dual value and the oracle bracket.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Random states drawn by the oracle.
    #[arg(long, default_value_t = 2000)]
    pub oracle_budget: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn enorm(args: &EnormArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let grid = checked_grid(&args.grid)?;
    let tol = positive("tol", args.tol)?;
    let pair = args.op.load(args.common.seed)?;
    let curve = enorm_curve(&pair, &grid)?;

    let mut header = vec!["E", "value", "mu_star", "gap"];
    if args.verify {
        header.extend(["oracle_lower", "oracle_upper"]);
    }
    let mut table = Table::new(&header);
    let mut points = Vec::new();
    let mut worst = 0.0f64;
    for (k, p) in curve.points.iter().enumerate() {
        let mut row = vec![p.energy, p.value, p.mu_star, p.gap];
        let mut entry =
            json!({ "energy": p.energy, "value": p.value, "mu_star": p.mu_star, "gap": p.gap });
        if args.verify {
            let seed = derive_seed(args.common.seed, k as u64);
            let o = enorm_oracle(&pair, p.energy, args.oracle_budget, seed)?;
            let mismatch = (o.lower - p.value).max(p.value - o.upper).max(0.0);
            worst = worst.max(mismatch);
            row.extend([o.lower, o.upper]);
            entry["oracle"] = json!({ "lower": o.lower, "upper": o.upper, "mismatch": mismatch });
        }
        table.push(row);
        points.push(entry);
    }
    let verified = args.verify.then_some(worst <= tol);
    let results = json!({ "points": points, "verify": { "enabled": args.verify, "max_mismatch": worst, "passed": verified } });
    finish(
        "enorm",
        args,
        results,
        start,
        &[("", &table)],
        args.common.out.as_deref(),
    )?;
    if verified == Some(false) {
        return Err(CliError::Verify(format!(
            "oracle mismatch {worst:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3,3.5,4")]
    pub grid: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn curve(args: &CurveArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let grid = checked_grid(&args.grid)?;
    let pair = args.op.load(args.common.seed)?;
    let curve = enorm_curve(&pair, &grid)?;
    curve.validate(&Tolerances::DEFAULT)?;

    let bracket_op = args
        .op
        .oscillator()
        .filter(|op| op.enorm_bracket(args.op.omega, 1.0).is_some());
    let mut header = vec!["E", "value", "ratio", "mu_star", "gap"];
    if bracket_op.is_some() {
        header.extend(["bracket_lower", "bracket_upper"]);
    }
    let mut table = Table::new(&header);
    for p in &curve.points {
        let mut row = vec![
            p.energy,
            p.value,
            p.value / p.energy.sqrt(),
            p.mu_star,
            p.gap,
        ];
        if let Some((lo, hi)) = bracket_op.and_then(|op| op.enorm_bracket(args.op.omega, p.energy))
        {
            row.extend([lo, hi]);
        }
        table.push(row);
    }
    let results = json!({ "points": curve_points(&curve), "shape_validated": true });
    finish(
        "curve",
        args,
        results,
        start,
        &[("", &table)],
        args.common.out.as_deref(),
    )
}

#[derive(Args, Debug, Serialize)]
pub struct GboundArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Energy schedule (ladder) or grid (fixed matrix).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Ladder convergence tolerance between successive dimensions.
    #[arg(long, default_value_t = DEFAULT_LADDER_TOL)]
    pub tol: f64,
    /// Largest truncation dimension on the ladder.
    #[arg(long, default_value_t = DEFAULT_DMAX)]
    pub dmax: usize,
    #[command(flatten)]
    pub common: Common,
}

fn estimate_json(b: &BoundEstimate) -> Value {
    json!({
        "value": b.value,
        "uncertainty": b.uncertainty,
        "method": b.method.name(),
        "sequence": b.sequence.iter().map(|(e, r)| json!({ "energy": e, "ratio": r })).collect::<Vec<_>>(),
        "warning": b.warning,
    })
}

fn ladder_json(l: &TruncationLadder) -> Value {
    json!({
        "op": l.op.symbol(),
        "omega": l.omega,
        "dims": l.dims,
        "records": l.records.iter().map(|r| json!({ "energy": r.energy, "dim": r.dim, "value": r.value })).collect::<Vec<_>>(),
        "converged": l.converged.iter().map(|c| json!({
            "energy": c.energy, "value": c.value, "dim_used": c.dim_used, "achieved_tol": c.achieved_tol,
        })).collect::<Vec<_>>(),
    })
}

fn ladder_table(l: &TruncationLadder) -> Table {
    let mut t = Table::new(&["E", "dim", "value"]);
    for r in &l.records {
        t.push(vec![r.energy, r.dim as f64, r.value]);
    }
    t
}

fn ratio_table(b: &BoundEstimate) -> Table {
    let mut t = Table::new(&["E", "ratio"]);
    for &(e, r) in &b.sequence {
        t.push(vec![e, r]);
    }
    t
}

pub fn gbound(args: &GboundArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let out = args.common.out.as_deref();
    if let Some(op) = args.op.oscillator() {
        let tol = positive("tol", args.tol)?;
        let schedule = checked_grid(args.grid.as_deref().unwrap_or(&DEFAULT_SCHEDULE))?;
        return match gbound_ladder(op, args.op.omega, &schedule, tol, args.dmax) {
            Ok((b, ladder)) => {
                let results =
                    json!({ "estimate": estimate_json(&b), "ladder": ladder_json(&ladder) });
                let (rt, lt) = (ratio_table(&b), ladder_table(&ladder));
                finish(
                    "gbound",
                    args,
                    results,
                    start,
                    &[("", &rt), (".ladder", &lt)],
                    out,
                )
            }
            Err(err) => {
                let partial = match &err {
                    CoreError::Convergence { ladder, .. } => {
                        json!({ "partial_ladder": ladder_json(ladder) })
                    }
                    CoreError::Divergent { axis, ratios } => json!({
                        "axis": axis,
                        "ratios": ratios.iter().map(|(x, r)| json!({ *axis: x, "ratio": r })).collect::<Vec<_>>(),
                    }),
                    _ => return Err(err.into()),
                };
                let results = json!({ "status": "convergence_failure", "error": err.to_string(), "diagnostics": partial });
                let lt = match &err {
                    CoreError::Convergence { ladder, .. } => ladder_table(ladder),
                    _ => Table::new(&["E", "dim", "value"]),
                };
                finish("gbound", args, results, start, &[(".ladder", &lt)], out)?;
                Err(err.into())
            }
        };
    }
    let pair = args.op.load(args.common.seed)?;
    let grid = match &args.grid {
        Some(g) => checked_grid(g)?,
        None => default_fixed_grid(&pair),
    };
    let curve = enorm_curve(&pair, &grid)?;
    let b = gbound_fixed(&curve);
    let results = json!({ "estimate": estimate_json(&b), "points": curve_points(&curve) });
    finish(
        "gbound",
        args,
        results,
        start,
        &[("", &ratio_table(&b))],
        out,
    )
}

/// `λ_max(G)·2^k`, k = −3..=10: reaches far past saturation of bounded `A`.
fn default_fixed_grid(pair: &OperatorPair) -> Vec<f64> {
    let top = pair.max_energy().max(1.0);
    (-3..=10)
        .map(|k| top * 2f64.powi(k))
        .filter(|&e| e > pair.ground_energy() + 1e-9)
        .collect()
}

#[derive(Args, Debug, Serialize)]
pub struct GammaArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4,8")]
    pub grid: Vec<f64>,
    /// Candidate pair `a,b`; repeatable.
    #[arg(long = "candidate", value_name = "A,B")]
    pub candidates: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

fn parse_candidate(s: &str) -> Result<GammaPoint, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || {
        CliError::Config(format!(
            "--candidate expects `a,b` with a, b >= 0, got {s:?}"
        ))
    };
    let [a, b] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    GammaPoint::new(a, b).map_err(|_| bad())
}

pub fn gamma(args: &GammaArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let grid = checked_grid(&args.grid)?;
    let candidates = args
        .candidates
        .iter()
        .map(|s| parse_candidate(s))
        .collect::<Result<Vec<_>, _>>()?;
    let pair = args.op.load(args.common.seed)?;
    let curve = enorm_curve(&pair, &grid)?;
    let frontier = gamma_frontier(&curve)?;

    let mut ft = Table::new(&["a", "b"]);
    for p in &frontier.points {
        ft.push(vec![p.a, p.b]);
    }
    let mut rt = Table::new(&["E", "value", "from_gamma", "residual"]);
    let mut max_residual = 0.0f64;
    for p in &curve.points {
        let v = enorm_from_gamma(&frontier, p.energy);
        let r = (v - p.value).abs() / (1.0 + p.value);
        max_residual = max_residual.max(r);
        rt.push(vec![p.energy, p.value, v, r]);
    }
    let verdicts: Vec<Value> = candidates
        .iter()
        .map(|&c| {
            let mut v = json!({ "a": c.a, "b": c.b });
            match gamma_membership(&curve, c) {
                Membership::Member => v["verdict"] = json!("member"),
                Membership::Undecided => v["verdict"] = json!("undecided"),
                Membership::NonMember { energy, excess } => {
                    v["verdict"] = json!("non_member");
                    v["witness"] = json!({ "energy": energy, "excess": excess });
                }
            }
            v
        })
        .collect();
    let results = json!({
        "frontier": frontier.points.iter().map(|p| json!({ "a": p.a, "b": p.b })).collect::<Vec<_>>(),
        "candidates": verdicts,
        "max_round_trip_residual": max_residual,
        "points": curve_points(&curve),
    });
    finish(
        "gamma",
        args,
        results,
        start,
        &[("", &ft), (".roundtrip", &rt)],
        args.common.out.as_deref(),
    )
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Identity,
    GroundCollapse,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct ChannelArgs {
    /// Source of `G` (its `A` is ignored).
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Kraus file: JSON list of matrices. Overrides --channel.
    #[arg(long)]
    pub kraus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "identity")]
    pub channel: ChannelKind,
    /// Number of Kraus operators of the random channel.
    #[arg(long, default_value_t = 2)]
    pub kraus_count: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub grid: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn channel(args: &ChannelArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let grid = checked_grid(&args.grid)?;
    let g = args.op.load_g(args.common.seed)?;
    let map = match (&args.kraus, args.channel) {
        (Some(path), _) => read_kraus(path)?,
        (None, ChannelKind::Identity) => KrausMap::identity(g.dim()),
        (None, ChannelKind::GroundCollapse) => KrausMap::ground_collapse(g.dim()),
        (None, ChannelKind::Random) => {
            KrausMap::random(g.dim(), args.kraus_count, args.common.seed)?
        }
    };
    let ys = grid
        .iter()
        .map(|&e| y_phi(&map, &g, e))
        .collect::<Result<Vec<_>, _>>()?;

    let scale = 1.0 + ys.iter().copied().fold(0.0, f64::max);
    let monotone_excess = ys.windows(2).map(|w| w[0] - w[1]).fold(0.0f64, f64::max);
    let concavity_excess = (1..grid.len().saturating_sub(1))
        .map(|i| {
            let (e0, e1, e2) = (grid[i - 1], grid[i], grid[i + 1]);
            ys[i - 1] + (ys[i + 1] - ys[i - 1]) * (e1 - e0) / (e2 - e0) - ys[i]
        })
        .fold(0.0f64, f64::max);
    let slack = 1e-9 * scale;
    let mut table = Table::new(&["E", "Y"]);
    for (&e, &y) in grid.iter().zip(&ys) {
        table.push(vec![e, y]);
    }
    let results = json!({
        "points": grid.iter().zip(&ys).map(|(e, y)| json!({ "energy": e, "y": y })).collect::<Vec<_>>(),
        "kraus_count": map.kraus_ops().len(),
        "lambda_max_g": g.max_eigenvalue(),
        "concavity": {
            "monotone": monotone_excess <= slack,
            "concave": concavity_excess <= slack,
            "max_monotone_excess": monotone_excess,
            "max_concavity_excess": concavity_excess,
        },
    });
    finish(
        "channel",
        args,
        results,
        start,
        &[("", &table)],
        args.common.out.as_deref(),
    )
}

#[derive(Args, Debug, Serialize)]
pub struct ExtensionArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Ancilla dimensions cycled through.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub k_dims: Vec<usize>,
    /// Largest distance ε; ε is drawn uniformly from (0.01·eps_max, eps_max).
    #[arg(long, default_value_t = 1.0)]
    pub eps_max: f64,
    /// Relative slack applied to every sample.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn extension(args: &ExtensionArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let eps_max = positive("eps-max", args.eps_max)?;
    let tol = positive("tol", args.tol)?;
    if args.k_dims.is_empty() || args.k_dims.contains(&0) {
        return Err(CliError::Config(
            "--k-dims must list positive dimensions".into(),
        ));
    }
    let pair = args.op.load(args.common.seed)?;
    let (lo, hi) = (pair.ground_energy().max(0.0), pair.max_energy());
    // One derived seed per sample index: order-independent, so parallel runs stay deterministic.
    let checks = (0..args.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(args.common.seed, i as u64));
            let k = args.k_dims[i % args.k_dims.len()];
            let e = lo + (hi - lo) * rng.random_range(0.05..1.0);
            let eps = eps_max * rng.random_range(0.01..1.0);
            let s = sample_constrained_pair(&pair, k, e, eps, rng.random())?;
            Ok((e, eps, k, extension_inequality_check(&pair, &s)?))
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    let mut table = Table::new(&["E", "eps", "k_dim", "lhs", "rhs", "margin"]);
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;
    for (e, eps, k, c) in checks {
        if !c.holds(tol) {
            violations += 1;
        }
        worst = worst.min(c.margin / (1.0 + c.rhs));
        table.push(vec![e, eps, k as f64, c.lhs, c.rhs, c.margin]);
    }
    let results = json!({
        "samples": args.samples,
        "violations": violations,
        "min_relative_margin": if worst.is_finite() { json!(worst) } else { Value::Null },
    });
    finish(
        "extension",
        args,
        results,
        start,
        &[("", &table)],
        args.common.out.as_deref(),
    )?;
    if violations > 0 {
        return Err(CliError::Verify(format!(
            "{violations} samples violate the extension inequality"
        )));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct PlotArgs {
    /// CSV files produced by other commands.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory; SVGs go next to their inputs if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn plot(args: &PlotArgs) -> Result<(), CliError> {
    for input in &args.inputs {
        let target = match &args.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
                dir.join(
                    input
                        .with_extension("svg")
                        .file_name()
                        .expect("input file name"),
                )
            }
            None => input.with_extension("svg"),
        };
        render_file(input, &target)?;
        println!("{}", target.display());
    }
    Ok(())
}
