use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nupack::harness::{gen_instance, gen_radii, ExperimentConfig, Family, GeneratorSpec, RadiusMode, RadiusSpec};
use nupack::{
    assign_edges, conflict_graph, ddim_upper, is_r_separated, max_separated_subset_exact,
    max_separated_subset_greedy, minimum_spanning_tree, packing_number, radius_edge_check,
    root_min_radius, talwar_check, verify_theorem1_with, DimensionMode, InstanceDoc, Norm,
    RadiusAssignment, Verdict, VerifyOptions,
};
use serde_json::json;

/// Exit code for a failed bound verdict.
const VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "nupack", version, about = "Non-uniform packings of finite metric spaces")]
struct Cli {
    /// Comparison tolerance for metric validation and verdicts. A negative
    /// value demands that much margin instead.
    #[arg(long, global = true, default_value_t = 1e-9, allow_negative_numbers = true)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (optionally with radii) as JSON.
    Gen(GenArgs),
    /// Maximum R-separated subset of an instance.
    Pack(PackArgs),
    /// Doubling-dimension estimate.
    Ddim(DdimArgs),
    /// Minimum spanning tree, edge assignment and its checks.
    Mst(IoArgs),
    /// Full bound verification on one instance.
    Verify(VerifyArgs),
    /// Batch experiment from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// uniform_cube | unit_ball | equidistant | grid | random_metric
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Grid side length.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value = "l2")]
    norm: Norm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radius spec: constant:R | uniform:LO,HI | nn:BETA | pareto:ALPHA,SCALE,CAP
    #[arg(long)]
    radii: Option<RadiusMode>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PackArgs {
    #[command(flatten)]
    io: IoArgs,
    /// exact | greedy
    #[arg(long, default_value = "exact")]
    mode: DimensionMode,
    /// Use the uniform radius R for every point (packing number M(R)).
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args)]
struct DdimArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value = "exact")]
    mode: DimensionMode,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value = "exact")]
    mode: DimensionMode,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    input: PathBuf,
    /// Override the seed offset of every trial group.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<DimensionMode>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let tol = cli.tolerance;
    match cli.command {
        Command::Gen(a) => {
            let family = match a.family.as_str() {
                "uniform_cube" => Family::UniformCube { n: a.n, d: a.d, norm: a.norm },
                "unit_ball" => Family::UnitBall { n: a.n, d: a.d, norm: a.norm },
                "equidistant" => Family::Equidistant { n: a.n },
                "grid" => Family::Grid { k: a.k, d: a.d, norm: a.norm },
                "random_metric" => Family::RandomMetric { n: a.n },
                other => bail!("unknown family `{other}`"),
            };
            let inst = gen_instance(&GeneratorSpec::new(family, a.seed))?;
            let radii = match a.radii {
                Some(mode) => Some(gen_radii(&inst, &inst.all_points(), &RadiusSpec::new(mode, a.seed))?),
                None => None,
            };
            emit(&InstanceDoc::new(inst, radii).to_json(), a.output)?;
            Ok(0)
        }
        Command::Pack(a) => {
            let doc = InstanceDoc::read(&a.io.input, tol)?;
            let inst = &doc.instance;
            let all = inst.all_points();
            let out = if let Some(r) = a.radius {
                let (count, witness) = packing_number(inst, &all, r)?;
                json!({ "r": r, "packing_number": count, "witness": witness })
            } else {
                let radii = radii_of(&doc)?;
                let witness = match a.mode {
                    DimensionMode::Exact => max_separated_subset_exact(inst, &all, radii)?,
                    DimensionMode::Greedy => max_separated_subset_greedy(inst, &all, radii)?,
                };
                let graph = conflict_graph(inst, &all, radii)?;
                json!({
                    "mode": a.mode,
                    "size": witness.len(),
                    "witness": witness,
                    "conflict_edges": graph.edges(),
                })
            };
            emit(&serde_json::to_string_pretty(&out)?, a.io.output)?;
            Ok(0)
        }
        Command::Ddim(a) => {
            let doc = InstanceDoc::read(&a.io.input, tol)?;
            let est = ddim_upper(&doc.instance, &doc.instance.all_points(), a.mode)?;
            emit(&serde_json::to_string_pretty(&est)?, a.io.output)?;
            Ok(0)
        }
        Command::Mst(a) => {
            let doc = InstanceDoc::read(&a.input, tol)?;
            let inst = &doc.instance;
            let all = inst.all_points();
            let tree = minimum_spanning_tree(inst, &all)?;
            let mut out = json!({
                "total_length": tree.total_length,
                "edges": tree.edges.iter().map(|e| (e.u, e.v, e.length)).collect::<Vec<_>>(),
            });
            let root = match &doc.radii {
                Some(r) => root_min_radius(&tree, r)?,
                None => 0,
            };
            let assignment = assign_edges(&tree, root)?;
            out["root"] = json!(root);
            out["assignment"] = json!(assignment
                .assigned
                .iter()
                .map(|(p, e)| (*p, e.edge))
                .collect::<std::collections::BTreeMap<_, _>>());
            if let Some(r) = &doc.radii {
                let (holds, violations) = radius_edge_check(&assignment, r)?;
                out["radius_edge_check"] = json!({
                    "separated": is_r_separated(inst, &all, r)?,
                    "holds": holds,
                    "violations": violations,
                });
            }
            if all.len() >= 2 {
                match ddim_upper(inst, &all, DimensionMode::Exact) {
                    Ok(est) => {
                        let t = talwar_check(inst, &all, est.ddim_upper)?;
                        out["talwar"] = json!({ "ddim": est.ddim_upper, "check": t });
                    }
                    Err(e) => out["talwar"] = json!({ "skipped": e.to_string() }),
                }
            }
            emit(&serde_json::to_string_pretty(&out)?, a.output)?;
            Ok(0)
        }
        Command::Verify(a) => {
            let doc = InstanceDoc::read(&a.io.input, tol)?;
            let inst = &doc.instance;
            let radii = radii_of(&doc)?;
            let all = inst.all_points();
            let subset = if is_r_separated(inst, &all, radii)? {
                all
            } else if all.len() <= nupack::packing::EXACT_CAP {
                max_separated_subset_exact(inst, &all, radii)?
            } else {
                max_separated_subset_greedy(inst, &all, radii)?
            };
            let report = verify_theorem1_with(
                inst,
                &subset,
                radii,
                VerifyOptions { mode: a.mode, tolerance: tol },
            )?;
            let text = serde_json::to_string_pretty(&report)?;
            if report.verdict == Verdict::Fail {
                eprintln!("bound violated; full report follows");
                eprintln!("{text}");
                return Ok(VIOLATION);
            }
            emit(&text, a.io.output)?;
            Ok(0)
        }
        Command::Experiment(a) => {
            let mut cfg = ExperimentConfig::read(&a.input)
                .with_context(|| format!("reading config {}", a.input.display()))?;
            if let Some(seed) = a.seed {
                for g in &mut cfg.trials {
                    g.generator.seed = seed;
                    g.radii.seed = seed;
                }
            }
            if let Some(mode) = a.mode {
                cfg.mode = mode;
            }
            let summary = nupack::harness::run_experiment(&cfg)?;
            print!("{summary}");
            if summary.asserted_failures > 0 {
                eprintln!("{} asserted check(s) failed", summary.asserted_failures);
                return Ok(VIOLATION);
            }
            Ok(0)
        }
    }
}

fn radii_of(doc: &InstanceDoc) -> Result<&RadiusAssignment> {
    doc.radii
        .as_ref()
        .context("instance has no \"radii\"; add them or pass --radius")
}

fn emit(text: &str, output: Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(&path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                // reader went away (e.g. `| head`): not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.context("writing to stdout")?,
            }
        }
    }
    Ok(())
}
