use std::fmt;
use std::fs;
use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde_json::{Map, Value};

use crate::config::parse_config;
use crate::{BenchArgs, BenchCommand, Cli, Command, DatasetCommand, ExportArgs, PlanArgs, PlannerArgs};
use cnrrt::bench::{
    convergence_trace, curves_csv, iterations_to_within, records_csv, records_json, robustness_csv, robustness_study,
    run_suite, sensitivity_sweep, stats_csv, svg_line_plot, svg_map_paths, sweep_csv, with_jobs, write_text,
    PlannerSpec, SuiteMap, SuiteSpec,
};
use cnrrt::gridworld::{extract_convex_corners, generate_map_with, inflate, load_map, load_mask_for, save_map, MapGenConfig};
use cnrrt::guidance::{dataset_export, DatasetConfig};
use cnrrt::planners::run_planner;
use cnrrt::rng::derive_seed;
use cnrrt::{Error, PlannerConfig, PlannerKind};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Io { .. } | Error::Format(_)) => 3,
            CliError::Core(Error::NoPath | Error::Generation { .. }) => 1,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: Cli, matches: &ArgMatches) -> CliResult<u8> {
    let sub = |name: &str| matches.subcommand_matches(name).expect("subcommand matched");
    match cli.command {
        Command::Genmaps(a) => {
            let gen = MapGenConfig {
                safety_margin: a.rc,
                ..MapGenConfig::new(a.difficulty, a.width, a.height)
            };
            fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
            for i in 0..a.count {
                let seed = derive_seed(a.seed, &["map", a.difficulty.as_str(), &i.to_string()]);
                let map = generate_map_with(seed, &gen)?;
                save_map(&map, a.out.join(format!("{}_{i}.ppm", a.difficulty)))?;
            }
            Ok(0)
        }
        Command::Corners(a) => {
            let map = inflate(&load_map(&a.map)?, checked_rc(a.rc)?);
            let mut csv = String::from("row,col\n");
            for (r, c) in extract_convex_corners(&map).iter() {
                csv.push_str(&format!("{r},{c}\n"));
            }
            emit(a.out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Inflate(a) => {
            let map = inflate(&load_map(&a.map)?, checked_rc(a.rc)?);
            save_map(&map, &a.out)?;
            Ok(0)
        }
        Command::Plan(a) => plan(&a, sub("plan")),
        Command::Dataset(DatasetCommand::Export(a)) => export(&a),
        Command::Bench(b) => match b {
            BenchCommand::Run(a) => bench_run(&a),
            BenchCommand::Sweep(a) => bench_sweep(&a),
            BenchCommand::Converge(a) => bench_converge(&a),
            BenchCommand::Noise(a) => bench_noise(&a),
        },
    }
}

fn checked_rc(rc: f64) -> CliResult<f64> {
    if rc.is_finite() && rc >= 0.0 {
        Ok(rc)
    } else {
        Err(CliError::Usage("--rc must be non-negative".into()))
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_config(path: &Path) -> CliResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// File values, then explicitly given flags, over the defaults.
fn planner_config(a: &PlanArgs, m: &ArgMatches) -> CliResult<(PlannerConfig, f64)> {
    let mut obj = match &a.config {
        Some(p) => read_config(p)?,
        None => Map::new(),
    };
    let mut rc = a.rc;
    if let Some(v) = obj.remove("rc") {
        rc = v
            .as_f64()
            .ok_or_else(|| CliError::Usage("config key `rc` must be a number".into()))?;
    }
    let explicit = |id: &str| m.value_source(id) == Some(ValueSource::CommandLine);
    if explicit("rc") {
        rc = a.rc;
    }
    let p: &PlannerArgs = &a.params;
    let flags: [(&str, Value); 13] = [
        ("step", p.step.into()),
        ("near_radius", p.near_radius.into()),
        ("max_iters", p.max_iters.into()),
        ("alpha", p.alpha.into()),
        ("alpha_pred", p.alpha_pred.into()),
        ("alpha_explore", p.alpha_explore.into()),
        ("stall_window", p.stall_window.into()),
        ("stall_eps", p.stall_eps.into()),
        ("early_stop", p.early_stop.into()),
        ("goal_tol", p.goal_tol.into()),
        ("goal_bias", p.goal_bias.into()),
        ("corner_radius", p.corner_radius.into()),
        ("seed", p.seed.into()),
    ];
    for (id, v) in flags {
        if explicit(id) {
            obj.insert(id.to_string(), v);
        }
    }
    let cfg: PlannerConfig =
        serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Usage(format!("planner config: {e}")))?;
    cfg.validate()?;
    Ok((cfg, checked_rc(rc)?))
}

fn plan(a: &PlanArgs, m: &ArgMatches) -> CliResult<u8> {
    let (cfg, rc) = planner_config(a, m)?;
    if a.planner.needs_guidance() && a.mask.is_none() && !a.oracle {
        return Err(CliError::Usage(format!(
            "planner `{}` needs --mask or --oracle",
            a.planner
        )));
    }
    let raw = load_map(&a.map)?;
    let map = inflate(&raw, rc);
    if !map.query_is_free() {
        return Err(CliError::Usage("start or goal lies inside the inflated obstacles".into()));
    }
    let suite_map = if let Some(path) = &a.mask {
        let mask = load_mask_for(&map, path)?;
        Some(SuiteMap::with_mask("plan", "plan", map.clone(), mask))
    } else if a.oracle && a.planner.needs_guidance() {
        Some(SuiteMap::with_oracle("plan", "plan", map.clone())?)
    } else {
        None
    };
    let guidance = suite_map.as_ref().and_then(|s| s.mask_for(a.planner));
    let rec = run_planner(a.planner, &map, guidance, &cfg)?;
    let json = serde_json::to_string_pretty(&rec).map_err(Error::from)? + "\n";
    emit(a.out.as_deref(), &json)?;
    if let Some(svg_path) = &a.svg {
        let paths: Vec<(&str, &cnrrt::PathPlan)> = rec.path.iter().map(|p| (a.planner.as_str(), p)).collect();
        write_text(svg_path, &svg_map_paths(&map, &paths))?;
    }
    Ok(if rec.success { 0 } else { 1 })
}

fn export(a: &ExportArgs) -> CliResult<u8> {
    let cfg = DatasetConfig {
        seed: a.seed,
        count: a.count,
        difficulty: a.difficulty,
        pairs_per_map: a.pairs,
        width: a.width,
        height: a.height,
        safety_margin: checked_rc(a.rc)?,
        ..DatasetConfig::default()
    };
    let recs = with_jobs(1, || dataset_export(&cfg, &a.out))?;
    eprintln!("wrote {} samples to {}", recs.len(), a.out.display());
    Ok(0)
}

fn load_suite(a: &BenchArgs) -> CliResult<SuiteSpec> {
    let obj = match &a.suite {
        Some(p) => read_config(p)?,
        None => Map::new(),
    };
    let spec: SuiteSpec =
        serde_json::from_value(Value::Object(obj)).map_err(|e| CliError::Usage(format!("suite config: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::from)? + "\n")
}

fn bench_run(a: &BenchArgs) -> CliResult<u8> {
    let spec = load_suite(a)?;
    let suite = spec.build(a.jobs)?;
    let res = run_suite(&suite, a.jobs)?;
    write_text(&a.out.join("records.csv"), &records_csv(&res.records))?;
    write_text(&a.out.join("records.json"), &records_json(&res.records)?)?;
    write_text(&a.out.join("stats.csv"), &stats_csv(&res.stats))?;
    write_text(&a.out.join("stats.json"), &to_json(&res.stats)?)?;
    for m in &suite.maps {
        let paths: Vec<(&str, &cnrrt::PathPlan)> = res
            .records
            .iter()
            .filter(|r| r.map == m.id && r.trial == 0)
            .filter_map(|r| r.record.path.as_ref().map(|p| (r.planner.as_str(), p)))
            .collect();
        write_text(&a.out.join("paths").join(format!("{}.svg", m.id)), &svg_map_paths(&m.map, &paths))?;
    }
    eprintln!("{} trials written to {}", res.records.len(), a.out.display());
    Ok(0)
}

fn bench_sweep(a: &BenchArgs) -> CliResult<u8> {
    let spec = load_suite(a)?;
    let maps = spec.build_maps(a.jobs)?;
    let grid: Vec<(f64, f64)> = spec
        .sweep_alpha_pred
        .iter()
        .flat_map(|&p| spec.sweep_alpha_explore.iter().map(move |&e| (p, e)))
        .collect();
    let rows = sensitivity_sweep(&maps, &spec.planner, &grid, spec.trials, spec.seed, a.jobs)?;
    write_text(&a.out.join("sweep.csv"), &sweep_csv(&rows))?;
    write_text(&a.out.join("sweep.json"), &to_json(&rows)?)?;
    Ok(0)
}

fn bench_converge(a: &BenchArgs) -> CliResult<u8> {
    let spec = load_suite(a)?;
    let maps = spec.build_maps(a.jobs)?;
    let planners: Vec<PlannerSpec> = spec
        .planner_specs()
        .into_iter()
        .filter(|p| p.kind != PlannerKind::Visibility)
        .collect();
    let mut all = Vec::new();
    let mut summary = String::from("map,planner,iters_within_5pct\n");
    for m in &maps {
        let seeds: Vec<u64> = (0..spec.converge_seeds)
            .map(|t| derive_seed(spec.seed, &["converge", &m.id, &t.to_string()]))
            .collect();
        let curves = convergence_trace(m, &planners, &seeds, a.jobs)?;
        let series: Vec<(&str, &[Option<f64>])> =
            curves.iter().map(|c| (c.planner.as_str(), c.costs.as_slice())).collect();
        write_text(
            &a.out.join("curves").join(format!("{}.svg", m.id)),
            &svg_line_plot(&format!("best cost, {}", m.id), &series),
        )?;
        for c in &curves {
            let k = iterations_to_within(c, 0.05).map(|k| k.to_string()).unwrap_or_default();
            summary.push_str(&format!("{},{},{k}\n", c.map, c.planner));
        }
        all.extend(curves);
    }
    write_text(&a.out.join("curves.csv"), &curves_csv(&all))?;
    write_text(&a.out.join("curves.json"), &to_json(&all)?)?;
    write_text(&a.out.join("converge_summary.csv"), &summary)?;
    Ok(0)
}

fn bench_noise(a: &BenchArgs) -> CliResult<u8> {
    let spec = load_suite(a)?;
    let maps = spec.build_maps(a.jobs)?;
    let rows = robustness_study(&maps, &spec.planner, &spec.noise, spec.trials, spec.seed, a.jobs)?;
    write_text(&a.out.join("robustness.csv"), &robustness_csv(&rows))?;
    write_text(&a.out.join("robustness.json"), &to_json(&rows)?)?;
    Ok(0)
}
