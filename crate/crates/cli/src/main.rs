mod commands;
mod config;
mod decimal;
mod envelope;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AnalyzeArgs, BuildBoxArgs, FindSegmentArgs, OverlapArgs, RenderArgs, VerifyArgs, WitnessArgs};

#[derive(Parser)]
#[command(name = "toral", version, about = "Exact boxes, tubes and witness points for hyperbolic toral automorphisms")]
struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for artifacts without an explicit --out.
    #[arg(long, global = true, env = "TORAL_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigen-data of a unimodular matrix.
    Analyze(AnalyzeArgs),
    /// Construct the box B and its certificate.
    BuildBox(BuildBoxArgs),
    /// Scan tube pairs for proper overlaps and check the slice lemmas.
    VerifyOverlaps(OverlapArgs),
    /// Find a contracting segment of the truncated fractal near a center.
    FindSegment(FindSegmentArgs),
    /// Build a witness point and its certificate.
    Witness(WitnessArgs),
    /// Replay the checks recorded in an artifact.
    Verify(VerifyArgs),
    /// Draw a box, its tubes and optional segment/witness layers as SVG.
    Render(RenderArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<bool> {
        let cfg = config::ConfigFile::load(cli.config.as_deref())?;
        let out_dir = cli.out_dir.clone().or_else(|| cfg.out_dir()).unwrap_or_else(|| PathBuf::from("."));
        let ctx = commands::Ctx { cfg, out_dir };
        match &cli.cmd {
            Cmd::Analyze(a) => commands::analyze(&ctx, a),
            Cmd::BuildBox(a) => commands::build_box(&ctx, a),
            Cmd::VerifyOverlaps(a) => commands::verify_overlaps(&ctx, a),
            Cmd::FindSegment(a) => commands::find_segment(&ctx, a),
            Cmd::Witness(a) => commands::witness(&ctx, a),
            Cmd::Verify(a) => commands::verify(&ctx, a),
            Cmd::Render(a) => commands::render(&ctx, a),
        }
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
