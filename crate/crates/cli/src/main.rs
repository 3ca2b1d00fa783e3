use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use p2c_core::config::{DetectorKind, StyleOracleKind};
use p2c_core::lint::detector_for;
use p2c_core::pipeline::{self, features_json, load_config, load_inputs, oracle_for, verify_dir, write_outputs};
use p2c_core::recognition::evaluate_classifier;
use p2c_core::verify::{similarity, RasterImage};
use p2c_core::{PipelineConfig, PipelineError, Rect};

#[derive(Parser)]
#[command(name = "p2c", version, about = "Compile UI design prototypes to HTML and CSS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Annotation file with merge sets and perceptual groups.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    detector: Option<Detector>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Detector {
    Passthrough,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Rules,
    Llm,
}

#[derive(Clone, Copy, ValueEnum)]
enum InspectStage {
    Hierarchy,
    Layout,
    Features,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild the hierarchy and report merge sets and groups.
    Lint {
        proto: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full pipeline and write index.html, style.css and the asset manifest.
    Build {
        proto: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        style_oracle: Option<Oracle>,
        /// Also write layout-tree.json to the output directory.
        #[arg(long)]
        dump_layout_tree: bool,
    },
    /// Dump an intermediate stage as JSON.
    Inspect {
        proto: PathBuf,
        #[arg(long, value_enum, default_value = "layout")]
        stage: InspectStage,
        #[command(flatten)]
        common: Common,
    },
    /// Replay emitted code and report per-node deviation from the prototype.
    Verify {
        outdir: PathBuf,
        #[arg(long)]
        proto: PathBuf,
        /// Viewport as WIDTHxHEIGHT; defaults to the canvas.
        #[arg(long, value_parser = parse_viewport)]
        viewport: Option<Rect>,
        #[command(flatten)]
        common: Common,
    },
    /// SSIM, PSNR and MSE between two PNG images.
    Eval {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        render: PathBuf,
    },
    /// Precision, recall and F1 of predicted element types.
    EvalTypes {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config {
        #[arg(long)]
        show: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_viewport(s: &str) -> Result<Rect, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: f64 = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: f64 = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err("viewport must be positive".into());
    }
    Ok(Rect::new(0.0, 0.0, w, h))
}

/// Failure with its exit code: 1 internal, 2 input.
struct Failure {
    code: u8,
    message: String,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn config_with(common: &Common) -> Result<PipelineConfig, Failure> {
    let mut cfg = load_config(common.config.as_deref())?;
    if let Some(d) = common.detector {
        cfg.detector = match d {
            Detector::Passthrough => DetectorKind::Passthrough,
            Detector::Heuristic => DetectorKind::Heuristic,
        };
    }
    cfg.validate().map_err(PipelineError::from)?;
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn read_label_map(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let bytes = fs::read(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_png(path: &Path) -> Result<RasterImage, Failure> {
    RasterImage::load_png(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Lint { proto, common } => {
            let cfg = config_with(&common)?;
            let (doc, ann) = load_inputs(&proto, common.annotations.as_deref())?;
            let detector = detector_for(&cfg);
            let outcome = p2c_core::lint::lint(&doc, &ann, detector.as_ref(), &cfg);
            for w in &outcome.warnings {
                warn!("{w}");
            }
            print_json(&outcome.report(detector.name()));
        }
        Command::Build {
            proto,
            out,
            common,
            style_oracle,
            dump_layout_tree,
        } => {
            let mut cfg = config_with(&common)?;
            if let Some(o) = style_oracle {
                cfg.style_oracle = match o {
                    Oracle::Rules => StyleOracleKind::Rules,
                    Oracle::Llm => StyleOracleKind::Llm,
                };
            }
            let oracle = oracle_for(&cfg)?;
            let (doc, ann) = load_inputs(&proto, common.annotations.as_deref())?;
            let built = pipeline::build(&doc, &ann, &cfg, oracle.as_ref())?;
            write_outputs(&out, &built.emitted)?;
            if dump_layout_tree {
                let p = out.join("layout-tree.json");
                fs::write(&p, built.analysis.tree.to_json() + "\n")
                    .map_err(|e| input_error(format!("{}: {e}", p.display())))?;
            }
            for w in &built.report.warnings {
                warn!("{w}");
            }
            info!("wrote {}", out.display());
            print_json(&built.report);
        }
        Command::Inspect { proto, stage, common } => {
            let cfg = config_with(&common)?;
            let (doc, ann) = load_inputs(&proto, common.annotations.as_deref())?;
            match stage {
                InspectStage::Hierarchy => {
                    let detector = detector_for(&cfg);
                    let outcome = p2c_core::lint::lint(&doc, &ann, detector.as_ref(), &cfg);
                    print_json(&outcome.hierarchy);
                }
                InspectStage::Layout => {
                    let a = pipeline::analyze(&doc, &ann, &cfg)?;
                    println!("{}", a.tree.to_json());
                }
                InspectStage::Features => {
                    let a = pipeline::analyze(&doc, &ann, &cfg)?;
                    println!("{}", features_json(&a.tree, &doc, cfg.encoding_frequencies)?);
                }
            }
        }
        Command::Verify {
            outdir,
            proto,
            viewport,
            common,
        } => {
            let cfg = config_with(&common)?;
            let (doc, ann) = load_inputs(&proto, common.annotations.as_deref())?;
            let report = verify_dir(&outdir, &doc, &ann, &cfg, viewport)?;
            if !report.missing.is_empty() {
                warn!("{} nodes have no replayed box", report.missing.len());
            }
            print_json(&report);
        }
        Command::Eval { reference, render } => {
            let a = load_png(&reference)?;
            let b = load_png(&render)?;
            let r = similarity(&a, &b).map_err(|e| input_error(e.to_string()))?;
            print_json(&r);
        }
        Command::EvalTypes {
            pred,
            truth,
            format,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let pred = read_label_map(&pred)?;
            let truth = read_label_map(&truth)?;
            let r = evaluate_classifier(&pred, &truth, &cfg.taxonomy).map_err(|e| input_error(e.to_string()))?;
            match format {
                Format::Json => print_json(&r),
                Format::Table => print!("{}", r.to_table()),
                Format::Both => {
                    print_json(&r);
                    println!();
                    print!("{}", r.to_table());
                }
            }
        }
        Command::Config { show, config } => {
            let cfg = load_config(config.as_deref())?;
            if show {
                print!("{}", cfg.show());
            } else {
                cfg.validate().map_err(PipelineError::from)?;
                println!("config ok");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
