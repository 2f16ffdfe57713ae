//! geopart: generate instances, build partitioning tuples and query
//! structures, run queries, and audit everything from the command line.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 verification mismatch,
//! 3 retry exhaustion (no tuple met the target ratio).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use geopart_core::bench::{run_bench, BenchSuite};
use geopart_core::instance::{gen_instance, Instance, GENERATORS};
use geopart_core::locate::{LocateConfig, LocationTree};
use geopart_core::num::{format_rational, parse_rational, Rational};
use geopart_core::partition::{
    alpha_target, build_partition, verify_partition, PartitionConfig, PartitionTuple,
};
use geopart_core::range::{build_range_structure, DualFamilySpec};
use geopart_core::rayshoot::{build_rayshoot, RayShootStructure};
use geopart_core::render::render_svg;
use geopart_core::sampler::sample_sign_conditions;
use geopart_core::semialg::{BoolFormula, SemiAlgSet};
use geopart_core::semigroup::{BoolOr, Counting, MinId, Semigroup, SumRational};
use geopart_core::{Error, MultiPoly, SamplePoint, YCoord};

#[derive(Parser)]
#[command(name = "geopart", version, about = "Exact partitioning and query structures for planar semi-algebraic sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Sample one exact point per realized sign condition of an instance's atoms.
    Signcond(SigncondArgs),
    /// Build a partitioning tuple for an instance (exit 3 if no attempt met the target).
    Partition(PartitionArgs),
    /// Re-verify a stored tuple against an instance (exit 2 on mismatch).
    Verify(VerifyArgs),
    /// Build a point-location tree over an instance.
    LocateBuild(LocateBuildArgs),
    /// Query a stored location tree at a point.
    LocateQuery(QueryArgs),
    /// Build a range-searching structure over a point instance.
    RangeBuild(RangeBuildArgs),
    /// Query a stored range structure at query parameters (a, b).
    RangeQuery(QueryArgs),
    /// Build a vertical ray-shooting structure over an instance.
    RayshootBuild(RayshootBuildArgs),
    /// Shoot a vertical ray upward from a point.
    RayshootQuery(QueryArgs),
    /// Build location trees over a size grid and record query statistics.
    Bench(BenchArgs),
    /// Render an instance (and optionally a tuple's zero sets) to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenArgs {
    /// One of: points, disks, circles, arcs, segments, conic-arcs.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-width of the coordinate box, in integer units.
    #[arg(long = "box", default_value_t = 8)]
    half: i64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SigncondArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Acceptance constant C0': the target ratio is D^(2-delta)/c0.
    #[arg(long, default_value = "4")]
    c0: String,
    #[arg(long, default_value_t = 10)]
    retries: u32,
    #[arg(long = "solver-budget", default_value_t = 12)]
    solver_budget: u32,
    #[arg(long = "sample-size")]
    sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Tuple file, or a partition output whose top-level "tuple" field is used.
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long, default_value = "4")]
    c0: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TreeOpts {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value = "4/3")]
    c0: String,
    /// Families of at most this size become leaves.
    #[arg(long, default_value_t = 16)]
    n0: usize,
    #[arg(long, default_value_t = 10)]
    retries: u32,
    #[arg(long = "solver-budget", default_value_t = 12)]
    solver_budget: u32,
    #[arg(long = "sample-size")]
    sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl TreeOpts {
    fn config(&self) -> Result<LocateConfig> {
        Ok(LocateConfig {
            k: self.k,
            c0: parse_rational(&self.c0).context("--c0")?,
            n0: self.n0,
            max_retries: self.retries,
            solver_budget: self.solver_budget,
            sample_size: self.sample_size,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct LocateBuildArgs {
    #[arg(long)]
    input: PathBuf,
    /// One of: counting, sum, bool-or, min-id.
    #[arg(long, default_value = "counting")]
    semigroup: String,
    #[command(flatten)]
    tree: TreeOpts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    input: PathBuf,
    /// Query point as two comma-separated rationals, e.g. --at 3/2,-1/4.
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    at: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RangeBuildArgs {
    #[arg(long)]
    input: PathBuf,
    /// halfplane, disk-translate, or custom:<file> with {name, dim, polys, formula}.
    #[arg(long, default_value = "halfplane")]
    family: String,
    #[arg(long, default_value = "counting")]
    semigroup: String,
    #[command(flatten)]
    tree: TreeOpts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RayshootBuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    tree: TreeOpts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "disks")]
    kind: String,
    /// Comma-separated instance sizes, e.g. --ns 128,256,512.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    queries: usize,
    #[arg(long = "box", default_value_t = 8)]
    half: i64,
    #[command(flatten)]
    tree: TreeOpts,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Optional tuple whose zero sets are overlaid.
    #[arg(long)]
    tuple: Option<PathBuf>,
    /// svg writes the image; json wraps it as {"svg": ...}.
    #[arg(long, default_value = "svg")]
    format: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::RetriesExhausted { .. }) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Signcond(a) => cmd_signcond(a),
        Cmd::Partition(a) => cmd_partition(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::LocateBuild(a) => cmd_locate_build(a),
        Cmd::LocateQuery(a) => cmd_locate_query(a),
        Cmd::RangeBuild(a) => cmd_range_build(a),
        Cmd::RangeQuery(a) => cmd_locate_query(a), // range trees are location trees in the dual plane
        Cmd::RayshootBuild(a) => cmd_rayshoot_build(a),
        Cmd::RayshootQuery(a) => cmd_rayshoot_query(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Render(a) => cmd_render(a),
    }
}

// --- plumbing ---------------------------------------------------------------

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read_json(path)?).with_context(|| format!("loading {}", path.display()))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn emit_json(output: &Option<PathBuf>, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(output, &text)
}

fn parse_at(at: &str) -> Result<(Rational, Rational)> {
    let (x, y) = at
        .split_once(',')
        .with_context(|| format!("--at wants X,Y, got {at:?}"))?;
    Ok((
        parse_rational(x.trim()).context("--at x")?,
        parse_rational(y.trim()).context("--at y")?,
    ))
}

// --- commands ---------------------------------------------------------------

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let inst = gen_instance(&a.kind, a.n, a.seed, a.half)
        .with_context(|| format!("known kinds: {}", GENERATORS.join(", ")))?;
    emit_json(&a.output, &inst.to_json())?;
    Ok(0)
}

fn coord_json(sp: &SamplePoint) -> (Value, Value) {
    let pair = |lo: &Rational, hi: &Rational| json!([format_rational(lo), format_rational(hi)]);
    match sp {
        SamplePoint::Plain(pt) => (
            Value::String(format_rational(&pt.x)),
            match &pt.y {
                YCoord::Rat(r) => Value::String(format_rational(r)),
                YCoord::Root(root) => pair(root.lo(), root.hi()),
            },
        ),
        SamplePoint::CritBand { x, y } => (pair(x.lo(), x.hi()), Value::String(format_rational(y))),
        SamplePoint::CritSection { x, ylo, yhi, .. } => (pair(x.lo(), x.hi()), pair(ylo, yhi)),
    }
}

fn cmd_signcond(a: SigncondArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let polys: Vec<MultiPoly> = inst
        .sets
        .iter()
        .flat_map(|s| s.polys.iter().cloned())
        .collect();
    if polys.is_empty() {
        bail!("instance has no polynomials to sample");
    }
    let cells = sample_sign_conditions(&polys)?;
    let rows: Vec<Value> = cells
        .iter()
        .map(|c| {
            let (x, y) = coord_json(&c.point);
            json!({
                "signs": c.signs.to_string(),
                "x": x,
                "y": y,
                "slab": c.slab,
                "stack": c.stack,
            })
        })
        .collect();
    emit_json(
        &a.output,
        &json!({ "polys": polys.len(), "cells": rows }),
    )?;
    Ok(0)
}

fn cmd_partition(a: PartitionArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let config = PartitionConfig {
        k: a.k,
        c0: parse_rational(&a.c0).context("--c0")?,
        sample_size: a.sample_size,
        max_retries: a.retries,
        solver_budget: a.solver_budget,
        seed: a.seed,
    };
    let outcome = build_partition(&inst.sets, &config)?;
    emit_json(
        &a.output,
        &json!({
            "tuple": outcome.tuple,
            "report": outcome.report,
            "accepted": outcome.accepted,
            "attempts": outcome.attempts,
            "alpha_target": format_rational(&outcome.alpha_target),
            "theoretical_sample": outcome.theoretical_sample,
        }),
    )?;
    if outcome.accepted {
        Ok(0)
    } else {
        eprintln!(
            "no tuple met the target after {} attempts (best achieved: {})",
            outcome.attempts,
            outcome.report.alpha_string()
        );
        Ok(3)
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let v = read_json(&a.tuple)?;
    let tuple_value = v.get("tuple").unwrap_or(&v);
    let tuple: PartitionTuple = serde_json::from_value(tuple_value.clone())
        .with_context(|| format!("loading {}", a.tuple.display()))?;
    let report = verify_partition(&tuple, &inst.sets)?;
    let target = alpha_target(tuple.k(), &parse_rational(&a.c0).context("--c0")?, &inst.sets)?;
    let ok = report.alpha_ok(&target);
    emit_json(
        &a.output,
        &json!({
            "report": report,
            "alpha_target": format_rational(&target),
            "accepted": ok,
        }),
    )?;
    if ok {
        Ok(0)
    } else {
        eprintln!(
            "verification mismatch: achieved {} < target {}",
            report.alpha_string(),
            format_rational(&target)
        );
        Ok(2)
    }
}

fn build_tree<G: Semigroup>(sets: Vec<SemiAlgSet>, g: G, config: LocateConfig) -> Result<Value> {
    Ok(LocationTree::build(sets, g, config)?.to_json())
}

fn cmd_locate_build(a: LocateBuildArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let config = a.tree.config()?;
    let tree = match a.semigroup.as_str() {
        "counting" => build_tree(inst.sets, Counting, config)?,
        "sum" => build_tree(inst.sets, SumRational, config)?,
        "bool-or" => build_tree(inst.sets, BoolOr, config)?,
        "min-id" => build_tree(inst.sets, MinId, config)?,
        other => bail!("unknown semigroup {other:?} (counting, sum, bool-or, min-id)"),
    };
    emit_json(&a.output, &tree)?;
    Ok(0)
}

fn query_tree<G: Semigroup>(v: &Value, g: G, x: &Rational, y: &Rational) -> Result<Value> {
    let tree = LocationTree::from_json(v, g)?;
    let ans = tree.query_traced(x, y)?;
    Ok(json!({
        "weight": tree.semigroup().format(&ans.weight),
        "visits": ans.visits,
        "degenerate": ans.degenerate,
    }))
}

fn cmd_locate_query(a: QueryArgs) -> Result<u8> {
    let v = read_json(&a.input)?;
    let (x, y) = parse_at(&a.at)?;
    let name = v
        .get("semigroup")
        .and_then(Value::as_str)
        .context("input is not a serialized tree (missing semigroup)")?;
    let ans = match name {
        "counting" => query_tree(&v, Counting, &x, &y)?,
        "sum" => query_tree(&v, SumRational, &x, &y)?,
        "bool-or" => query_tree(&v, BoolOr, &x, &y)?,
        "min-id" => query_tree(&v, MinId, &x, &y)?,
        other => bail!("tree uses unsupported semigroup {other:?}"),
    };
    emit_json(&a.output, &ans)?;
    Ok(0)
}

#[derive(Deserialize)]
struct CustomFamily {
    name: String,
    dim: u8,
    polys: Vec<MultiPoly>,
    formula: BoolFormula,
}

fn family_from_flag(flag: &str) -> Result<DualFamilySpec> {
    if let Some(path) = flag.strip_prefix("custom:") {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading family file {path}"))?;
        let f: CustomFamily =
            serde_json::from_str(&text).with_context(|| format!("parsing family file {path}"))?;
        Ok(DualFamilySpec::new(f.name, f.polys, f.formula, f.dim)?)
    } else {
        Ok(DualFamilySpec::by_name(flag)?)
    }
}

fn cmd_range_build(a: RangeBuildArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let family = family_from_flag(&a.family)?;
    let config = a.tree.config()?;
    let tree = match a.semigroup.as_str() {
        "counting" => build_range_structure(&inst.sets, &family, Counting, config)?.to_json(),
        "sum" => build_range_structure(&inst.sets, &family, SumRational, config)?.to_json(),
        "bool-or" => build_range_structure(&inst.sets, &family, BoolOr, config)?.to_json(),
        "min-id" => build_range_structure(&inst.sets, &family, MinId, config)?.to_json(),
        other => bail!("unknown semigroup {other:?} (counting, sum, bool-or, min-id)"),
    };
    emit_json(&a.output, &tree)?;
    Ok(0)
}

fn cmd_rayshoot_build(a: RayshootBuildArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let rs = build_rayshoot(inst.sets, a.tree.config()?)?;
    emit_json(&a.output, &rs.to_json())?;
    Ok(0)
}

fn cmd_rayshoot_query(a: QueryArgs) -> Result<u8> {
    let rs = RayShootStructure::from_json(&read_json(&a.input)?)?;
    let (x, y) = parse_at(&a.at)?;
    let hit = rs.shoot(&x, &y)?;
    emit_json(
        &a.output,
        &json!({ "hit": hit.as_ref().map(|h| h.to_json()) }),
    )?;
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let suite = BenchSuite {
        kind: a.kind,
        ns: a.ns,
        queries: a.queries,
        seed: a.tree.seed,
        half: a.half,
        config: a.tree.config()?,
    };
    let records = run_bench(&suite)?;
    for r in &records {
        eprintln!("n={} built in {} ms", r.n, r.build_ms);
    }
    emit_json(&a.output, &serde_json::to_value(&records)?)?;
    Ok(0)
}

fn cmd_render(a: RenderArgs) -> Result<u8> {
    let inst = read_instance(&a.input)?;
    let tuple = match &a.tuple {
        Some(path) => {
            let v = read_json(path)?;
            let tv = v.get("tuple").unwrap_or(&v);
            Some(
                serde_json::from_value::<PartitionTuple>(tv.clone())
                    .with_context(|| format!("loading {}", path.display()))?,
            )
        }
        None => None,
    };
    let svg = render_svg(&inst, tuple.as_ref());
    match a.format.as_str() {
        "svg" => emit(&a.output, &svg)?,
        "json" => emit_json(&a.output, &json!({ "svg": svg }))?,
        other => bail!("unknown format {other:?} (svg, json)"),
    }
    Ok(0)
}
