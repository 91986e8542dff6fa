//! `cnrrt` command-line tool.
//!
//! Exit codes: 0 success, 1 planning or generation failure, 2 usage or
//! configuration error, 3 I/O or file-format error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use cnrrt::gridworld::DEFAULT_SAFETY_MARGIN;
use cnrrt::{Difficulty, PlannerConfig, PlannerKind};

#[derive(Debug, Parser)]
#[command(name = "cnrrt", version, about = "Grid motion planning with convex-corner guided RRT*")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random maps as PPM files.
    Genmaps(GenmapsArgs),
    /// Write the convex corners of an inflated map as CSV.
    Corners(CornersArgs),
    /// Inflate a map by a safety margin.
    Inflate(InflateArgs),
    /// Plan on one map and print the run record as JSON.
    Plan(PlanArgs),
    /// Training-data export.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Experiment protocols driven by a suite config.
    #[command(subcommand)]
    Bench(BenchCommand),
}

fn parse_difficulty(s: &str) -> Result<Difficulty, String> {
    s.parse().map_err(|e: cnrrt::Error| e.to_string())
}

fn parse_planner(s: &str) -> Result<PlannerKind, String> {
    s.parse().map_err(|e: cnrrt::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct GenmapsArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// sparse, medium or hard
    #[arg(long, default_value = "medium", value_parser = parse_difficulty)]
    pub difficulty: Difficulty,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 224)]
    pub width: usize,
    #[arg(long, default_value_t = 224)]
    pub height: usize,
    /// Safety margin used to check query feasibility.
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    pub rc: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CornersArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    pub rc: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InflateArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    pub rc: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Planner parameters. Values given here override the config file.
#[derive(Debug, Args)]
pub struct PlannerArgs {
    /// Steering step length.
    #[arg(long, default_value_t = PlannerConfig::default().step)]
    pub step: f64,
    /// Neighbour radius for parent choice and rewiring.
    #[arg(long, default_value_t = PlannerConfig::default().near_radius)]
    pub near_radius: f64,
    #[arg(long, default_value_t = PlannerConfig::default().max_iters)]
    pub max_iters: usize,
    /// Guided-sample probability of the mask-mixing planners.
    #[arg(long, default_value_t = PlannerConfig::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = PlannerConfig::default().alpha_pred)]
    pub alpha_pred: f64,
    #[arg(long, default_value_t = PlannerConfig::default().alpha_explore)]
    pub alpha_explore: f64,
    /// Early-stop window in iterations.
    #[arg(long, default_value_t = PlannerConfig::default().stall_window)]
    pub stall_window: usize,
    /// Early-stop cost tolerance.
    #[arg(long, default_value_t = PlannerConfig::default().stall_eps)]
    pub stall_eps: f64,
    /// Early stopping of the convex-corner planner.
    #[arg(long, default_value_t = PlannerConfig::default().early_stop, action = clap::ArgAction::Set)]
    pub early_stop: bool,
    #[arg(long, default_value_t = PlannerConfig::default().goal_tol)]
    pub goal_tol: f64,
    #[arg(long, default_value_t = PlannerConfig::default().goal_bias)]
    pub goal_bias: f64,
    /// Jitter radius around predicted corners.
    #[arg(long, default_value_t = PlannerConfig::default().corner_radius)]
    pub corner_radius: f64,
    #[arg(long, default_value_t = PlannerConfig::default().seed)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Raw map PPM; its start and goal define the query.
    #[arg(long)]
    pub map: PathBuf,
    /// rrt_star, neural, neural_informed, convex_neural or visibility
    #[arg(long, value_parser = parse_planner)]
    pub planner: PlannerKind,
    /// Guidance mask PGM.
    #[arg(long, conflicts_with = "oracle")]
    pub mask: Option<PathBuf>,
    /// Use the visibility-path oracle as guidance.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    pub rc: f64,
    /// Planner config file (JSON or key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Draw the path over the map.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub params: PlannerArgs,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Write map inputs, oracle labels and a JSON-lines manifest.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of maps.
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    /// Query pairs per map.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, default_value = "medium", value_parser = parse_difficulty)]
    pub difficulty: Difficulty,
    #[arg(long, default_value_t = 224)]
    pub width: usize,
    #[arg(long, default_value_t = 224)]
    pub height: usize,
    #[arg(long, default_value_t = DEFAULT_SAFETY_MARGIN)]
    pub rc: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Repeated trials of every planner on every map.
    Run(BenchArgs),
    /// Sweep of alpha_pred and alpha_explore for the convex-corner planner.
    Sweep(BenchArgs),
    /// Mean best-cost curves per planner.
    Converge(BenchArgs),
    /// Corner-noise robustness of the convex-corner planner.
    Noise(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Suite config file (JSON or key = value); built-in defaults otherwise.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    match commands::run(cli, &matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
