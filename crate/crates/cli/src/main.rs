//! `flowplan` — plan, verify, and inspect collision-free swarm paths.
//!
//! Exit codes: 0 success, 1 input/validation error, 2 infeasible scenario or
//! failed verification.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flowplan_core::error::Error;
use flowplan_core::format;
use flowplan_core::geometry::LocalPoint;
use flowplan_core::patterns::{self, FormationKind, FormationSpec};
use flowplan_core::planner::{self, Plan, Scenario};
use flowplan_core::verifier;

#[derive(Parser)]
#[command(name = "flowplan", version, about = "Collision-free path planning for agent formations")]
struct Cli {
    /// Reserved for randomized corpus tooling; planning itself is deterministic.
    #[arg(long, global = true, env = "FLOWPLAN_SEED")]
    seed: Option<u64>,
    /// Per-augmentation trace on stderr.
    #[arg(long, global = true, env = "FLOWPLAN_VERBOSE")]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a scenario file into a plan file.
    Plan(PlanArgs),
    /// Check a plan file against its scenario.
    Verify(VerifyArgs),
    /// Generate a formation points file.
    Pattern(PatternArgs),
    /// Export plan waypoints as plotting-friendly records.
    ExportPlot(ExportPlotArgs),
    /// Time the planning phases of a scenario.
    Bench(BenchArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Output plan path (default: scenario name with .plan.json).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the scenario's grid cell size in meters.
    #[arg(long, env = "FLOWPLAN_CELL_SIZE")]
    cell_size: Option<f64>,
    /// Override the vertical movement cost multiplier.
    #[arg(long, env = "FLOWPLAN_VERTICAL_MULTIPLIER")]
    vertical_multiplier: Option<u32>,
    /// Override the grid padding in cells per side.
    #[arg(long, env = "FLOWPLAN_PADDING")]
    padding: Option<usize>,
    /// Override the waypoint count per path.
    #[arg(long, env = "FLOWPLAN_WAYPOINTS")]
    waypoints: Option<usize>,
    /// Keep the padded grid from extending below z = 0.
    #[arg(long, env = "FLOWPLAN_CLAMP_GROUND")]
    clamp_ground: bool,
    /// Write the flow network as an edge list for inspection.
    #[arg(long)]
    dump_state_graph: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Plan JSON file.
    plan: PathBuf,
    /// Scenario JSON file the plan was produced from.
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text, env = "FLOWPLAN_FORMAT")]
    format: Format,
}

#[derive(Args)]
struct PatternArgs {
    #[command(subcommand)]
    kind: PatternKind,
}

#[derive(Subcommand)]
enum PatternKind {
    /// rows x cols launch lattice on the XY plane.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 2.0)]
        spacing: f64,
        #[arg(long, default_value_t = 0.0)]
        altitude: f64,
        #[arg(long, value_parser = parse_offset, default_value = "0,0,0")]
        offset: LocalPoint,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// side^3 cubic lattice.
    Cube {
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = 2.0)]
        spacing: f64,
        #[arg(long, default_value_t = 0.0)]
        base_altitude: f64,
        #[arg(long, value_parser = parse_offset, default_value = "0,0,0")]
        offset: LocalPoint,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Copy points from an existing file, applying the offset.
    FromFile {
        path: PathBuf,
        #[arg(long, value_parser = parse_offset, default_value = "0,0,0")]
        offset: LocalPoint,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExportPlotArgs {
    /// Plan JSON file.
    plan: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, env = "FLOWPLAN_FORMAT")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Number of timed runs.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, value_enum, default_value_t = Format::Text, env = "FLOWPLAN_FORMAT")]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn parse_offset(text: &str) -> Result<LocalPoint, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err("offset must be x,y,z".into());
    }
    let mut v = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.trim().parse().map_err(|_| format!("bad offset component '{p}'"))?;
    }
    Ok(LocalPoint::new(v[0], v[1], v[2]))
}

/// A failed command: exit code plus the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn from_error(err: Error) -> Self {
        let code = match err {
            Error::Infeasible { .. } => 2,
            _ => 1,
        };
        Self { code, message: err.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::from_error(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(args) => cmd_plan(args, cli.verbose),
        Command::Verify(args) => cmd_verify(args),
        Command::Pattern(args) => cmd_pattern(args),
        Command::ExportPlot(args) => cmd_export_plot(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn write_output(target: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match target {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_scenario(path: &Path, args: Option<&PlanArgs>) -> Result<Scenario, Failure> {
    let text = read_file(path)?;
    let mut scenario = format::scenario_from_json(&text)?;
    if let Some(args) = args {
        if let Some(d) = args.cell_size {
            scenario.cell_size = d;
        }
        if let Some(h) = args.vertical_multiplier {
            scenario.vertical_multiplier = h;
        }
        if let Some(p) = args.padding {
            scenario.padding = p;
        }
        if let Some(w) = args.waypoints {
            scenario.waypoint_count = w;
        }
        if args.clamp_ground {
            scenario.clamp_ground = true;
        }
    }
    Ok(scenario)
}

fn cmd_plan(args: &PlanArgs, verbose: bool) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario, Some(args))?;

    if let Some(dump) = &args.dump_state_graph {
        let prep = planner::prepare(&scenario)?;
        let mut buf = Vec::new();
        prep.state
            .write_edge_list(&mut buf)
            .map_err(|e| Failure::input(format!("cannot format edge list: {e}")))?;
        write_file(dump, &String::from_utf8(buf).expect("edge list is ascii"))?;
    }

    let plan = if verbose {
        planner::solve_traced(&scenario, &mut |report| {
            eprintln!(
                "augmentation {}: path cost {}, value {}",
                report.iteration, report.path_cost, report.value
            );
        })?
    } else {
        planner::solve(&scenario)?
    };

    let output = args.output.clone().unwrap_or_else(|| default_plan_path(&args.scenario));
    write_file(&output, &format::plan_to_json(&plan))?;
    eprintln!(
        "wrote {} ({} agents, total cost {}, {} augmentations, {:.1} ms)",
        output.display(),
        plan.agents.len(),
        plan.stats.total_cost,
        plan.stats.iterations,
        plan.timings.total_ms,
    );
    Ok(())
}

fn default_plan_path(scenario: &Path) -> PathBuf {
    let stem = scenario.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    scenario.with_file_name(format!("{stem}.plan.json"))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let plan = format::plan_from_json(&read_file(&args.plan)?)?;
    let scenario = load_scenario(&args.scenario, None)?;
    let report = verifier::check_plan(&plan, &scenario)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialization")
        ),
        _ => print!("{report}"),
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: format!("verification failed: {}", report.failed_names().join(", ")),
        })
    }
}

fn cmd_pattern(args: &PatternArgs) -> Result<(), Failure> {
    let (spec, output) = match &args.kind {
        PatternKind::Grid { rows, cols, spacing, altitude, offset, output } => (
            FormationSpec {
                kind: FormationKind::Grid {
                    rows: *rows,
                    cols: *cols,
                    spacing: *spacing,
                    altitude: *altitude,
                },
                offset: *offset,
            },
            output,
        ),
        PatternKind::Cube { side, spacing, base_altitude, offset, output } => (
            FormationSpec {
                kind: FormationKind::Cube {
                    side: *side,
                    spacing: *spacing,
                    base_altitude: *base_altitude,
                },
                offset: *offset,
            },
            output,
        ),
        PatternKind::FromFile { path, offset, output } => (
            FormationSpec { kind: FormationKind::File(path.clone()), offset: *offset },
            output,
        ),
    };
    let points = patterns::generate(&spec)?;
    write_output(output.as_ref(), &patterns::format_points(&points))
}

fn cmd_export_plot(args: &ExportPlotArgs) -> Result<(), Failure> {
    let plan = format::plan_from_json(&read_file(&args.plan)?)?;
    if plan.agents.is_empty() {
        return Err(Failure::input("plan contains no agents"));
    }
    let content = match args.format {
        Format::Json => export_json(&plan),
        _ => export_csv(&plan),
    };
    write_output(args.output.as_ref(), &content)
}

fn export_csv(plan: &Plan) -> String {
    let mut out = String::from("agent,seq,x,y,z\n");
    for agent in &plan.agents {
        for (seq, w) in agent.waypoints.iter().enumerate() {
            out.push_str(&format!("{},{},{},{},{}\n", agent.index, seq, w.x, w.y, w.z));
        }
    }
    out
}

fn export_json(plan: &Plan) -> String {
    let records: Vec<serde_json::Value> = plan
        .agents
        .iter()
        .flat_map(|a| {
            a.waypoints.iter().enumerate().map(|(seq, w)| {
                serde_json::json!({"agent": a.index, "seq": seq, "x": w.x, "y": w.y, "z": w.z})
            })
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&records).expect("record serialization");
    out.push('\n');
    out
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.repeats < 1 {
        return Err(Failure::input("repeats must be at least 1"));
    }
    let scenario = load_scenario(&args.scenario, None)?;
    let mut runs = Vec::with_capacity(args.repeats);
    let mut last_plan: Option<Plan> = None;
    for _ in 0..args.repeats {
        let plan = planner::solve(&scenario)?;
        runs.push(plan.timings);
        last_plan = Some(plan);
    }
    let plan = last_plan.expect("at least one run");

    let mut totals: Vec<f64> = runs.iter().map(|t| t.total_ms).collect();
    totals.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let min = totals[0];
    let median = totals[totals.len() / 2];

    match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "state_nodes": plan.stats.state_nodes,
                "state_edges": plan.stats.state_edges,
                "flow_value": plan.stats.flow_value,
                "total_cost": plan.stats.total_cost,
                "iterations": plan.stats.iterations,
                "repeats": args.repeats,
                "min_total_ms": min,
                "median_total_ms": median,
                "runs": runs.iter().map(|t| serde_json::json!({
                    "build_ms": t.build_ms,
                    "solve_ms": t.solve_ms,
                    "decompose_ms": t.decompose_ms,
                    "total_ms": t.total_ms,
                })).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("bench serialization"));
        }
        _ => {
            println!(
                "state graph: {} nodes, {} edges; flow value {}; {} augmentations",
                plan.stats.state_nodes,
                plan.stats.state_edges,
                plan.stats.flow_value,
                plan.stats.iterations
            );
            for (i, t) in runs.iter().enumerate() {
                println!(
                    "run {}: build {:.1} ms, solve {:.1} ms, decompose {:.1} ms, total {:.1} ms",
                    i + 1,
                    t.build_ms,
                    t.solve_ms,
                    t.decompose_ms,
                    t.total_ms
                );
            }
            println!("total over {} runs: min {:.1} ms, median {:.1} ms", args.repeats, min, median);
        }
    }
    Ok(())
}
