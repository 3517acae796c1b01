//! Command-line entry point for the aeropose pipeline.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aeropose::error::{Error, Result};
use aeropose::pipeline::{emit_reports, run_pipeline, PipelineConfig};
use aeropose::synth::{generate_synthetic_scene, SyntheticSceneSpec};

#[derive(Parser)]
#[command(
    name = "aeropose",
    version,
    about = "Vehicle positioning from nadir drone video: registration, rotated-box extraction, relief correction and benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene (inputs plus ground truth) on disk.
    Synth {
        /// Scene specification (TOML). Omit to use built-in defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output directory for the generated scene.
        #[arg(long, short)]
        out: PathBuf,
        /// Override the scene RNG seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate per-frame registration transforms and write registration.jsonl.
    Register {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Extract canonical rotated boxes from detections and write boxes.jsonl.
    Extract {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Map detections to LTP trajectory rows (no benchmark) and write trajectory.csv.
    Map {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Run registration, extraction and relief correction; write trajectory.csv.
    Correct {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Benchmark a corrected trajectory against the reference; write stats reports.
    Bench {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Run the full pipeline end to end and write every report.
    Run {
        #[arg(long, short)]
        config: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    cfg.resolve_inputs(&base)?;
    Ok(cfg)
}

fn cmd_synth(spec: Option<&Path>, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut scene_spec = match spec {
        Some(path) => {
            if !path.exists() {
                return Err(Error::MissingFile(path.to_path_buf()));
            }
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<SyntheticSceneSpec>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SyntheticSceneSpec::default(),
    };
    if let Some(seed) = seed {
        scene_spec.seed = seed;
    }
    let scene = generate_synthetic_scene(&scene_spec, out)?;
    println!("scene written to {}", out.display());
    println!("pipeline config: {}", scene.config_path.display());
    Ok(())
}

/// Run the pipeline and emit the subset of reports a stage verb asks for.
fn cmd_stage(config_path: &Path, stage: &str) -> Result<()> {
    let mut cfg = load_config(config_path)?;
    match stage {
        // `map` skips both registration and correction; `correct` and the
        // full run use the configuration as-is.
        "map" => {
            cfg.run.registration = false;
            cfg.correction.mode = aeropose::pipeline::CorrectionMode::None;
            cfg.inputs.reference = None;
        }
        "register" | "extract" => {
            cfg.correction.mode = aeropose::pipeline::CorrectionMode::None;
            cfg.inputs.reference = None;
        }
        "correct" => {
            cfg.inputs.reference = None;
        }
        _ => {}
    }
    let output = run_pipeline(&cfg)?;
    let outdir = cfg.run.output_dir.clone();
    std::fs::create_dir_all(&outdir)?;

    match stage {
        "register" => {
            aeropose::io::write_registration_report(
                &outdir.join("registration.jsonl"),
                &output.registrations,
            )?;
            let failed = output.registrations.iter().filter(|r| r.failed()).count();
            println!(
                "registered {} frames ({} failed) -> {}",
                output.registrations.len(),
                failed,
                outdir.join("registration.jsonl").display()
            );
        }
        "extract" => {
            // Re-derive the canonical boxes for the report.
            let detections = aeropose::io::read_detections(&cfg.inputs.detections)?;
            let mut boxes = Vec::new();
            for d in &detections {
                if let Ok(b) = aeropose::shape::min_area_rect(&d.points) {
                    let canon = aeropose::shape::canonicalize_corners(&b, &output.georeference);
                    boxes.push((d.frame_id, d.confidence, canon));
                }
            }
            aeropose::io::write_boxes(&outdir.join("boxes.jsonl"), &boxes)?;
            println!(
                "extracted {} boxes -> {}",
                boxes.len(),
                outdir.join("boxes.jsonl").display()
            );
        }
        "bench" => {
            let warnings = emit_reports(&output, &outdir)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            match &output.stats {
                Some(s) => println!(
                    "benchmark over {} frames: mean {:.3} px / {:.3} m -> {}",
                    s.n,
                    s.mean_px,
                    s.mean_m,
                    outdir.join("stats.json").display()
                ),
                None => println!("benchmark produced no statistics"),
            }
        }
        _ => {
            let warnings = emit_reports(&output, &outdir)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{} trajectory rows -> {}",
                output.records.len(),
                outdir.join("trajectory.csv").display()
            );
            if let Some(s) = &output.stats {
                println!(
                    "mean error {:.3} px / {:.3} m over {} frames",
                    s.mean_px, s.mean_m, s.n
                );
            }
        }
    }
    Ok(())
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Synth { spec, out, seed } => cmd_synth(spec.as_deref(), out, *seed),
        Command::Register { config } => cmd_stage(config, "register"),
        Command::Extract { config } => cmd_stage(config, "extract"),
        Command::Map { config } => cmd_stage(config, "map"),
        Command::Correct { config } => cmd_stage(config, "correct"),
        Command::Bench { config } => cmd_stage(config, "bench"),
        Command::Run { config } => cmd_stage(config, "run"),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
