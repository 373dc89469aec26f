//! Command-line front end: preset catalog, space reports, flow runs,
//! Einstein solving, ancient-solution construction and trajectory analysis.
//! Every run writes a manifest next to its outputs; identical manifests
//! reproduce identical bytes.

use clap::{Args, Parser, Subcommand};
use homflow::analysis::{
    collapsing_detect, main_estimate_check, monotone_nonincreasing_report, type_one_check,
    CollapseThresholds,
};
use homflow::curvature::SpaceData;
use homflow::flow::{
    ancient_construct, einstein_solve, integrate, DiagCtx, FlowDirection, FlowSpec, Normalization,
    Trajectory,
};
use homflow::io as hio;
use homflow::nr::{check_nr, check_strongly_nice, verify_nr_identities, NormalizerData};
use homflow::presets::{aloff_wallach, build_preset, preset_names};
use homflow::roots::RootDatum;
use homflow::specfile::{build_from_spec, SpaceSpecFile};
use homflow::submersion::SubmersionSplit;
use homflow::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "homflow", version, about = "Homogeneous Ricci flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Space construction and structure reports.
    Space {
        #[command(subcommand)]
        sub: SpaceCmd,
    },
    /// Flow integration.
    Flow {
        #[command(subcommand)]
        sub: FlowCmd,
    },
    /// Einstein metrics.
    Einstein {
        #[command(subcommand)]
        sub: EinsteinCmd,
    },
    /// Collapsed ancient solutions.
    Ancient {
        #[command(subcommand)]
        sub: AncientCmd,
    },
    /// Trajectory analysis.
    Analyze {
        #[command(subcommand)]
        sub: AnalyzeCmd,
    },
    /// Reproduction pipelines for the worked examples.
    Repro {
        /// Example id, e.g. aloff-wallach-11.
        id: String,
        /// Output directory.
        #[arg(long, default_value = "repro-out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lists the preset catalog.
    Presets,
}

#[derive(Args)]
struct SpaceArgs {
    /// Preset name (see `homflow presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Custom space spec JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Aloff-Wallach parameters (with --preset aloff-wallach).
    #[arg(long)]
    p: Option<i64>,
    #[arg(long)]
    q: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Builds the space and exports the algebra and root data.
    Build(SpaceArgs),
    /// Computes the decomposition and structure tensor.
    Constants(SpaceArgs),
    /// Checks the NR property and reports the coefficient identities.
    CheckNr(SpaceArgs),
    /// Checks the nice / strongly nice conditions.
    CheckNice(SpaceArgs),
}

#[derive(Subcommand)]
enum FlowCmd {
    Run {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Initial diagonal metric as JSON (array of positive reals).
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long, default_value = "backward")]
        direction: String,
        #[arg(long, default_value = "none")]
        normalization: String,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Comma-separated toral module indices for diagnostics.
        #[arg(long)]
        torus: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-11)]
        abs_tol: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum EinsteinCmd {
    Solve {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AncientCmd {
    Construct {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Comma-separated toral module indices.
        #[arg(long, default_value = "0")]
        torus: String,
        #[arg(long, default_value_t = 1e-6)]
        eta: f64,
        #[arg(long, default_value_t = 1e4)]
        tau_max: f64,
        /// Index into the base Einstein catalog (default: first).
        #[arg(long, default_value_t = 0)]
        base_index: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    Report {
        /// Trajectory CSV produced by `flow run` or `ancient construct`.
        #[arg(long)]
        traj: PathBuf,
        /// Space report JSON produced by `space build` (for the preset
        /// name), or pass --preset directly.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value = "0")]
        torus: String,
        #[arg(long, default_value_t = 1e-3)]
        eps_c: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    preset: Option<String>,
    spec_path: Option<String>,
    seed: u64,
    thresholds: serde_json::Value,
    tolerances: serde_json::Value,
    tool_version: String,
    outputs: Vec<String>,
}

fn effective_seed(cli_seed: Option<u64>) -> u64 {
    if let Ok(v) = std::env::var("HOMFLOW_SEED") {
        if let Ok(n) = v.parse() {
            return n;
        }
    }
    cli_seed.unwrap_or(0)
}

fn write_manifest(manifest: &RunManifest, out: &Path) -> Result<(), Error> {
    let path = out.with_extension(format!(
        "{}manifest.json",
        out.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::config(format!("manifest serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| Error::config(format!("write {path:?}: {e}")))?;
    Ok(())
}

/// Builds a SpaceData (plus optional root datum and preset name) from the
/// common --preset/--spec arguments.
fn load_space(
    preset: &Option<String>,
    spec: &Option<PathBuf>,
    p: Option<i64>,
    q: Option<i64>,
    seed: u64,
) -> Result<(SpaceData, Option<RootDatum>, String), Error> {
    match (preset, spec) {
        (Some(name), None) => {
            let ps = if name == "aloff-wallach" {
                aloff_wallach(p.unwrap_or(1), q.unwrap_or(1))?
            } else {
                build_preset(name)?
            };
            let name = ps.name.clone();
            let datum = ps.datum;
            let sd = SpaceData::new(ps.space, ps.dec)?;
            Ok((sd, datum, name))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("missing spec file {path:?}: {e}")))?;
            let file: SpaceSpecFile = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("malformed spec JSON: {e}")))?;
            let (sd, datum) = build_from_spec(&file, seed)?;
            Ok((sd, Some(datum), format!("spec:{}", path.display())))
        }
        _ => Err(Error::config(
            "exactly one of --preset or --spec must be given",
        )),
    }
}

fn parse_torus(s: &str) -> Result<Vec<usize>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::config(format!("bad torus index '{t}': {e}")))
        })
        .collect()
}

fn space_report(
    sd: &SpaceData,
    name: &str,
) -> Result<hio::SpaceReportJson, Error> {
    let verdict = check_nr(&sd.space, &sd.dec, &sd.st);
    let strongly = check_strongly_nice(&sd.space, &sd.dec).holds();
    let (normalizer, identity_residuals) = if verdict.normalizer_adapted {
        let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st)?;
        let rep = verify_nr_identities(&sd.dec, &sd.st, &nd);
        (
            Some(hio::normalizer_json(&nd)),
            Some(hio::identity_residuals_json(&rep)),
        )
    } else {
        (None, None)
    };
    Ok(hio::SpaceReportJson {
        name: name.to_string(),
        dim_m: sd.dim_m(),
        decomposition: hio::decomposition_json(&sd.dec),
        structure: hio::structure_json(&sd.st),
        normalizer,
        verdicts: hio::verdicts_json(&verdict, strongly),
        identity_residuals,
    })
}

fn write_json<T: Serialize>(value: &T, out: &Path) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::config(format!("serialization: {e}")))?;
    std::fs::write(out, text).map_err(|e| Error::config(format!("write {out:?}: {e}")))
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for n in preset_names() {
                println!("{n}");
            }
            Ok(())
        }
        Command::Space { sub } => {
            let (args, kind) = match &sub {
                SpaceCmd::Build(a) => (a, "build"),
                SpaceCmd::Constants(a) => (a, "constants"),
                SpaceCmd::CheckNr(a) => (a, "check-nr"),
                SpaceCmd::CheckNice(a) => (a, "check-nice"),
            };
            let seed = effective_seed(args.seed);
            let (sd, datum, name) = load_space(&args.preset, &args.spec, args.p, args.q, seed)?;
            let report = space_report(&sd, &name)?;
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{name}.{kind}.json")));
            match kind {
                "build" => {
                    #[derive(Serialize)]
                    struct BuildOut {
                        report: hio::SpaceReportJson,
                        algebra: hio::AlgebraJson,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        root_datum: Option<hio::RootDatumJson>,
                    }
                    let payload = BuildOut {
                        algebra: hio::algebra_json(&sd.space.algebra),
                        root_datum: datum.as_ref().map(|d| hio::root_datum_json(&sd.space.algebra, d)),
                        report,
                    };
                    write_json(&payload, &out)?;
                }
                _ => {
                    write_json(&report, &out)?;
                    if kind == "check-nr" {
                        println!(
                            "NR = {}",
                            serde_json::json!(report.verdicts.nr)
                        );
                    }
                    if kind == "check-nice" {
                        println!(
                            "nice = {}, strongly nice = {}",
                            report.verdicts.stably_ricci_diagonal, report.verdicts.strongly_nice
                        );
                    }
                }
            }
            let manifest = RunManifest {
                command: format!("space {kind}"),
                preset: Some(name),
                spec_path: args.spec.as_ref().map(|p| p.display().to_string()),
                seed,
                thresholds: serde_json::json!({}),
                tolerances: serde_json::json!({}),
                tool_version: VERSION.into(),
                outputs: vec![out.display().to_string()],
            };
            write_manifest(&manifest, &out)
        }
        Command::Flow { sub } => match sub {
            FlowCmd::Run {
                preset,
                spec,
                metric,
                direction,
                normalization,
                t_end,
                torus,
                rel_tol,
                abs_tol,
                seed,
                out,
            } => {
                let seed = effective_seed(seed);
                let (sd, _, name) = load_space(&preset, &spec, None, None, seed)?;
                let x0: Vec<f64> = match &metric {
                    Some(path) => {
                        let text = std::fs::read_to_string(path).map_err(|e| {
                            Error::config(format!("missing metric file {path:?}: {e}"))
                        })?;
                        serde_json::from_str(&text)
                            .map_err(|e| Error::config(format!("malformed metric JSON: {e}")))?
                    }
                    None => vec![1.0; sd.ell()],
                };
                let dir = match direction.as_str() {
                    "forward" => FlowDirection::Forward,
                    "backward" => FlowDirection::Backward,
                    _ => return Err(Error::config("direction must be forward|backward")),
                };
                let norm = match normalization.as_str() {
                    "none" => Normalization::None,
                    "volume" => Normalization::Volume,
                    _ => return Err(Error::config("normalization must be none|volume")),
                };
                let fspec = FlowSpec {
                    direction: dir,
                    normalization: norm,
                    t_end,
                    rel_tol,
                    abs_tol,
                    ..Default::default()
                };
                let toral = match &torus {
                    Some(t) => parse_torus(t)?,
                    None => default_torus(&sd),
                };
                let traj = if toral.is_empty() {
                    integrate(&sd, &x0, &fspec, None)?
                } else {
                    let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st)?;
                    let split = SubmersionSplit::new(&sd, &nd, &toral)?;
                    let ctx = DiagCtx {
                        nd: &nd,
                        split: &split,
                    };
                    integrate(&sd, &x0, &fspec, Some(&ctx))?
                };
                std::fs::write(&out, hio::trajectory_to_csv(&traj))
                    .map_err(|e| Error::config(format!("write {out:?}: {e}")))?;
                let manifest = RunManifest {
                    command: "flow run".into(),
                    preset: Some(name),
                    spec_path: spec.map(|p| p.display().to_string()),
                    seed,
                    thresholds: serde_json::json!({"torus": toral}),
                    tolerances: serde_json::json!({"rel_tol": rel_tol, "abs_tol": abs_tol, "t_end": t_end}),
                    tool_version: VERSION.into(),
                    outputs: vec![out.display().to_string()],
                };
                write_manifest(&manifest, &out)
            }
        },
        Command::Einstein { sub } => match sub {
            EinsteinCmd::Solve {
                preset,
                spec,
                starts,
                seed,
                out,
            } => {
                let seed = effective_seed(seed);
                let (sd, _, name) = load_space(&preset, &spec, None, None, seed)?;
                let sols = einstein_solve(&sd, starts, seed);
                write_json(&sols, &out)?;
                println!("{} Einstein metrics (up to scale)", sols.len());
                let manifest = RunManifest {
                    command: "einstein solve".into(),
                    preset: Some(name),
                    spec_path: spec.map(|p| p.display().to_string()),
                    seed,
                    thresholds: serde_json::json!({"starts": starts}),
                    tolerances: serde_json::json!({"certificate": 1e-10}),
                    tool_version: VERSION.into(),
                    outputs: vec![out.display().to_string()],
                };
                write_manifest(&manifest, &out)
            }
        },
        Command::Ancient { sub } => match sub {
            AncientCmd::Construct {
                preset,
                spec,
                torus,
                eta,
                tau_max,
                base_index,
                seed,
                out,
            } => {
                let seed = effective_seed(seed);
                let (sd, _, name) = load_space(&preset, &spec, None, None, seed)?;
                let toral = parse_torus(&torus)?;
                let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st)?;
                let split = SubmersionSplit::new(&sd, &nd, &toral)?;
                let sols = einstein_solve(&split.base, 64, seed);
                if sols.is_empty() {
                    return Err(Error::numerical(
                        "base admits no diagonal Einstein metric in this decomposition",
                    ));
                }
                let base = sols.get(base_index).ok_or_else(|| {
                    Error::config(format!(
                        "base catalog has {} entries, index {base_index} out of range",
                        sols.len()
                    ))
                })?;
                let traj = ancient_construct(&sd, &nd, &split, base, eta, tau_max)?;
                std::fs::write(&out, hio::trajectory_to_csv(&traj))
                    .map_err(|e| Error::config(format!("write {out:?}: {e}")))?;
                let manifest = RunManifest {
                    command: "ancient construct".into(),
                    preset: Some(name),
                    spec_path: spec.map(|p| p.display().to_string()),
                    seed,
                    thresholds: serde_json::json!({"torus": toral, "eta": eta, "base_index": base_index}),
                    tolerances: serde_json::json!({"tau_max": tau_max}),
                    tool_version: VERSION.into(),
                    outputs: vec![out.display().to_string()],
                };
                write_manifest(&manifest, &out)
            }
        },
        Command::Analyze { sub } => match sub {
            AnalyzeCmd::Report {
                traj,
                space,
                preset,
                torus,
                eps_c,
                seed,
                out,
            } => {
                let seed = effective_seed(seed);
                let preset_name = match (&preset, &space) {
                    (Some(p), _) => p.clone(),
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path).map_err(|e| {
                            Error::config(format!("missing space file {path:?}: {e}"))
                        })?;
                        let v: serde_json::Value = serde_json::from_str(&text)
                            .map_err(|e| Error::config(format!("malformed space JSON: {e}")))?;
                        v.get("name")
                            .or_else(|| v.get("report").and_then(|r| r.get("name")))
                            .and_then(|n| n.as_str())
                            .ok_or_else(|| Error::config("space JSON lacks a name field"))?
                            .to_string()
                    }
                    _ => return Err(Error::config("pass --preset or --space")),
                };
                let (sd, _, name) = load_space(&Some(preset_name), &None, None, None, seed)?;
                let text = std::fs::read_to_string(&traj)
                    .map_err(|e| Error::config(format!("missing trajectory {traj:?}: {e}")))?;
                let trajectory = hio::trajectory_from_csv(&text)?;
                let toral = parse_torus(&torus)?;
                let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st)?;
                let report = analyze_trajectory(&sd, &nd, &trajectory, &toral, eps_c)?;
                write_json(&report, &out)?;
                let manifest = RunManifest {
                    command: "analyze report".into(),
                    preset: Some(name),
                    spec_path: None,
                    seed,
                    thresholds: serde_json::json!({"eps_c": eps_c, "torus": toral}),
                    tolerances: serde_json::json!({}),
                    tool_version: VERSION.into(),
                    outputs: vec![out.display().to_string()],
                };
                write_manifest(&manifest, &out)
            }
        },
        Command::Repro { id, out, seed } => repro(&id, &out, effective_seed(seed)),
    }
}

fn default_torus(sd: &SpaceData) -> Vec<usize> {
    // largest abelian prefix of the trivial modules
    let nd = match NormalizerData::compute(&sd.space, &sd.dec, &sd.st) {
        Ok(nd) => nd,
        Err(_) => return Vec::new(),
    };
    let mut toral = Vec::new();
    for p in 0..sd.dec.trivial_count {
        if toral.iter().all(|&q: &usize| nd.commuting[p][q]) && nd.commuting[p][p] {
            toral.push(p);
        }
    }
    toral
}

#[derive(Serialize)]
struct AnalysisReport {
    tau_span: (f64, f64),
    termination: String,
    type_one_band: Option<(f64, f64)>,
    f_monotone: MonotoneJson,
    a2_tail: f64,
    collapse: Option<CollapseJson>,
    estimate_rows: Vec<EstimateJson>,
    thresholds: serde_json::Value,
}

#[derive(Serialize)]
struct MonotoneJson {
    settle_index: Option<usize>,
    max_violation_after_settle: f64,
}

#[derive(Serialize)]
struct CollapseJson {
    collapsing: Vec<usize>,
    abelian_span: bool,
    phi_ratio_ok: bool,
    ratio_bounds: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct EstimateJson {
    index: usize,
    p: usize,
    preconditions_hold: bool,
    lhs: f64,
    rhs: f64,
    margin: f64,
}

fn analyze_trajectory(
    sd: &SpaceData,
    nd: &NormalizerData,
    traj: &Trajectory,
    toral: &[usize],
    eps_c: f64,
) -> Result<AnalysisReport, Error> {
    let thresholds = CollapseThresholds {
        eps_c,
        ..Default::default()
    };
    let type_one_band = type_one_check(traj).ok();
    let f_values: Vec<f64> = traj.diags.iter().map(|d| d.f).collect();
    let f_rep = monotone_nonincreasing_report("F", &f_values, 1e-8);
    let a2_tail = traj
        .diags
        .last()
        .map(|d| d.a2 * traj.times.last().unwrap())
        .unwrap_or(0.0);
    let collapse = collapsing_detect(sd, nd, traj, &thresholds).ok().map(|c| CollapseJson {
        collapsing: c.collapsing,
        abelian_span: c.abelian_span,
        phi_ratio_ok: c.phi_ratio_ok,
        ratio_bounds: c.ratio_bounds,
    });
    let mut estimate_rows = Vec::new();
    if !toral.is_empty() {
        let split = SubmersionSplit::new(sd, nd, toral)?;
        for (idx, x) in traj.states.iter().enumerate().step_by(64.max(traj.states.len() / 64)) {
            for &p in &split.toral {
                let row = main_estimate_check(sd, nd, &split, x, p)?;
                estimate_rows.push(EstimateJson {
                    index: idx,
                    p,
                    preconditions_hold: row.preconditions_hold,
                    lhs: row.lhs,
                    rhs: row.rhs,
                    margin: row.margin,
                });
            }
        }
    }
    Ok(AnalysisReport {
        tau_span: (
            *traj.times.first().unwrap_or(&0.0),
            *traj.times.last().unwrap_or(&0.0),
        ),
        termination: hio::term_flag(traj.termination).to_string(),
        type_one_band,
        f_monotone: MonotoneJson {
            settle_index: f_rep.settle_index,
            max_violation_after_settle: f_rep.max_violation_after_settle,
        },
        a2_tail,
        collapse,
        estimate_rows,
        thresholds: serde_json::json!({"eps_c": eps_c}),
    })
}

/// End-to-end pipeline on the Aloff-Wallach space: constructs the ancient
/// solution, writes the trajectory, the analysis report and the Einstein
/// catalog of the base.
fn repro(id: &str, out_dir: &Path, seed: u64) -> Result<(), Error> {
    if id != "aloff-wallach-11" {
        return Err(Error::config(format!(
            "unknown repro id '{id}' (available: aloff-wallach-11)"
        )));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::config(format!("create {out_dir:?}: {e}")))?;
    let (sd, _, _) = load_space(&Some(id.to_string()), &None, None, None, seed)?;
    let nd = NormalizerData::compute(&sd.space, &sd.dec, &sd.st)?;
    let split = SubmersionSplit::new(&sd, &nd, &[0])?;
    let sols = einstein_solve(&split.base, 64, seed);
    write_json(&sols, &out_dir.join("flag-einstein.json"))?;
    let traj = ancient_construct(&sd, &nd, &split, &sols[0], 1e-6, 1e4)?;
    std::fs::write(out_dir.join("ancient.csv"), hio::trajectory_to_csv(&traj))
        .map_err(|e| Error::config(format!("write trajectory: {e}")))?;
    let report = analyze_trajectory(&sd, &nd, &traj, &[0], 1e-3)?;
    write_json(&report, &out_dir.join("report.json"))?;
    println!(
        "ancient trajectory: tau in [0, {}], termination {}",
        traj.times.last().unwrap(),
        hio::term_flag(traj.termination)
    );
    if let Some(band) = report.type_one_band {
        println!("tau*scal band: [{:.4}, {:.4}]", band.0, band.1);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Structure(_) => ExitCode::from(2),
                Error::Numerical(_) => ExitCode::from(3),
            }
        }
    }
}
