//! End-to-end orchestration: lint, layout, recognize, emit.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::annotations::{parse_annotations, AnnotationError, AnnotationSet};
use crate::codegen::{emit_all, label_tree, CodegenError, Emitted, RulesOracle, StyleOracle};
use crate::config::{ConfigError, PipelineConfig, StyleOracleKind};
use crate::geometry::Rect;
use crate::layout::{build_layout_tree, LayoutKind, LayoutTree};
use crate::lint::{detector_for, lint, LintOutcome};
use crate::model::{parse_prototype, ModelError, PrototypeDoc};
use crate::recognition::{classify_heuristic, spatial_encode, TypeMap};
use crate::verify::{deviation_report, parse_css, parse_html, replay_layout, DeviationReport, ParseError, ReplayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Lint,
    Layout,
    Recognize,
    Emit,
    Verify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Lint => "lint",
            Stage::Layout => "layout",
            Stage::Recognize => "recognize",
            Stage::Emit => "emit",
            Stage::Verify => "verify",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("{path}: {source}")]
    Annotations { path: PathBuf, source: AnnotationError },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage} failed at `{node}`: {message}")]
    Stage { stage: Stage, node: String, message: String },
    #[error("{path}: {source}")]
    Artifact { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

impl PipelineError {
    /// Whether the error comes from bad user input rather than a bug.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, PipelineError::Stage { .. })
    }
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a prototype and its optional annotation file.
pub fn load_inputs(proto: &Path, annotations: Option<&Path>) -> Result<(PrototypeDoc, AnnotationSet), PipelineError> {
    let doc = parse_prototype(&read(proto)?).map_err(|source| PipelineError::Model {
        path: proto.to_path_buf(),
        source,
    })?;
    let ann = match annotations {
        Some(p) => parse_annotations(&read(p)?, &doc).map_err(|source| PipelineError::Annotations {
            path: p.to_path_buf(),
            source,
        })?,
        None => AnnotationSet::default(),
    };
    Ok((doc, ann))
}

pub fn load_config(path: Option<&Path>) -> Result<PipelineConfig, PipelineError> {
    match path {
        Some(p) => {
            let src = String::from_utf8_lossy(&read(p)?).into_owned();
            Ok(PipelineConfig::from_toml(&src)?)
        }
        None => Ok(PipelineConfig::default()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunCounts {
    pub layers: usize,
    pub merges: usize,
    pub groups: usize,
    pub nodes: usize,
    pub rules: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub timings_ms: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub counts: RunCounts,
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }

    fn lap(&mut self, report: &mut RunReport, stage: Stage) {
        let now = Instant::now();
        report
            .timings_ms
            .insert(stage.to_string(), (now - self.0).as_secs_f64() * 1000.0);
        self.0 = now;
    }
}

/// Lint and layout only, with a labeled tree.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub lint: LintOutcome,
    pub tree: LayoutTree,
    pub types: TypeMap,
}

/// Runs lint, layout and recognition; the tree comes back labeled.
pub fn analyze(doc: &PrototypeDoc, ann: &AnnotationSet, config: &PipelineConfig) -> Result<Analysis, PipelineError> {
    analyze_timed(doc, ann, config, &mut RunReport::default())
}

fn analyze_timed(
    doc: &PrototypeDoc,
    ann: &AnnotationSet,
    config: &PipelineConfig,
    report: &mut RunReport,
) -> Result<Analysis, PipelineError> {
    config.validate()?;
    let mut timer = Timer::start();
    let detector = detector_for(config);
    let outcome = lint(doc, ann, detector.as_ref(), config);
    timer.lap(report, Stage::Lint);

    let mut tree = build_layout_tree(&outcome.hierarchy, config.eps_containment, config.overlap_eps);
    timer.lap(report, Stage::Layout);

    let types = classify_heuristic(&tree, doc, config.max_icon_px, config.eps_containment);
    if let Some((id, label)) = types.iter().find(|(_, l)| !config.taxonomy.contains(l)) {
        return Err(PipelineError::Stage {
            stage: Stage::Recognize,
            node: id.clone(),
            message: format!("label `{label}` is not in the configured taxonomy"),
        });
    }
    label_tree(&mut tree, &types).map_err(|e| codegen_error(Stage::Recognize, e))?;
    timer.lap(report, Stage::Recognize);
    Ok(Analysis {
        lint: outcome,
        tree,
        types,
    })
}

fn codegen_error(stage: Stage, e: CodegenError) -> PipelineError {
    let node = match &e {
        CodegenError::UntypedNode(id) => id.clone(),
        CodegenError::Oracle { node, .. } => node.clone(),
    };
    PipelineError::Stage {
        stage,
        node,
        message: e.to_string(),
    }
}

/// Resolves the configured style oracle. The language-model oracle needs
/// its key in the environment; a missing key fails here, before any request.
pub fn oracle_for(config: &PipelineConfig) -> Result<Box<dyn StyleOracle>, PipelineError> {
    match config.style_oracle {
        StyleOracleKind::Rules => Ok(Box::new(RulesOracle)),
        StyleOracleKind::Llm => llm_oracle(),
    }
}

#[cfg(feature = "llm-http")]
fn llm_oracle() -> Result<Box<dyn StyleOracle>, PipelineError> {
    use crate::codegen::{default_field_docs, HttpLlmClient, LlmOracle};
    let client = HttpLlmClient::from_env().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(Box::new(LlmOracle {
        client,
        docs: default_field_docs(),
    }))
}

#[cfg(not(feature = "llm-http"))]
fn llm_oracle() -> Result<Box<dyn StyleOracle>, PipelineError> {
    Err(ConfigError::Invalid("built without the `llm-http` feature".into()).into())
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub analysis: Analysis,
    pub emitted: Emitted,
    pub report: RunReport,
}

/// The whole pipeline, in memory.
pub fn build(
    doc: &PrototypeDoc,
    ann: &AnnotationSet,
    config: &PipelineConfig,
    oracle: &dyn StyleOracle,
) -> Result<BuildOutput, PipelineError> {
    let mut report = RunReport::default();
    let analysis = analyze_timed(doc, ann, config, &mut report)?;
    let mut timer = Timer::start();
    let emitted = emit_all(&analysis.tree, doc, oracle).map_err(|e| codegen_error(Stage::Emit, e))?;
    timer.lap(&mut report, Stage::Emit);

    report.warnings.extend(analysis.lint.warnings.iter().cloned());
    report.warnings.extend(emitted.warnings.iter().cloned());
    let mut groups = 0;
    analysis.tree.root.visit(&mut |n| {
        if matches!(n.kind, LayoutKind::Group(_)) {
            groups += 1;
        }
    });
    report.counts = RunCounts {
        layers: doc.all_layers().len(),
        merges: analysis.lint.merge_groups.len(),
        groups,
        nodes: analysis.tree.node_count(),
        rules: emitted.rules,
    };
    Ok(BuildOutput {
        analysis,
        emitted,
        report,
    })
}

pub const HTML_FILE: &str = "index.html";
pub const CSS_FILE: &str = "style.css";
pub const MANIFEST_FILE: &str = "assets-manifest.json";

/// Writes `index.html`, `style.css` and `assets-manifest.json`.
pub fn write_outputs(out_dir: &Path, emitted: &Emitted) -> Result<(), PipelineError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    for (name, body) in [
        (HTML_FILE, &emitted.html),
        (CSS_FILE, &emitted.css),
        (MANIFEST_FILE, &emitted.manifest),
    ] {
        let p = out_dir.join(name);
        fs::write(&p, body).map_err(io(&p))?;
    }
    Ok(())
}

/// `(node id, classname, rect)` for every node of a labeled tree.
pub fn expected_boxes(tree: &LayoutTree) -> Vec<(String, String, Rect)> {
    tree.nodes()
        .into_iter()
        .map(|n| (n.id.clone(), n.classname.clone().unwrap_or_default(), n.rect))
        .collect()
}

/// Replays emitted HTML/CSS and compares against the rebuilt tree.
pub fn verify_emitted(
    html: &str,
    css: &str,
    tree: &LayoutTree,
    viewport: Rect,
) -> Result<DeviationReport, PipelineError> {
    let html_doc = parse_html(html).map_err(|source| PipelineError::Artifact {
        path: HTML_FILE.into(),
        source,
    })?;
    let rules = parse_css(css).map_err(|source| PipelineError::Artifact {
        path: CSS_FILE.into(),
        source,
    })?;
    let boxes = replay_layout(&html_doc, &rules, viewport)?;
    Ok(deviation_report(&boxes, &expected_boxes(tree)))
}

/// Verifies an output directory against the prototype it was built from.
pub fn verify_dir(
    out_dir: &Path,
    doc: &PrototypeDoc,
    ann: &AnnotationSet,
    config: &PipelineConfig,
    viewport: Option<Rect>,
) -> Result<DeviationReport, PipelineError> {
    let html = String::from_utf8_lossy(&read(&out_dir.join(HTML_FILE))?).into_owned();
    let css = String::from_utf8_lossy(&read(&out_dir.join(CSS_FILE))?).into_owned();
    let analysis = analyze(doc, ann, config)?;
    verify_emitted(&html, &css, &analysis.tree, viewport.unwrap_or(doc.canvas))
}

#[derive(Debug, Serialize)]
struct FeatureRow<'a> {
    id: &'a str,
    element_type: Option<&'a str>,
    rect: Rect,
    source: [f64; 4],
    encoding: Vec<f64>,
}

/// Spatial encodings of every layout node, as JSON.
pub fn features_json(tree: &LayoutTree, doc: &PrototypeDoc, frequencies: usize) -> Result<String, PipelineError> {
    let mut rows = Vec::new();
    for n in tree.nodes() {
        let e = spatial_encode(&n.rect, &doc.canvas, frequencies).map_err(|e| PipelineError::Stage {
            stage: Stage::Recognize,
            node: n.id.clone(),
            message: e.to_string(),
        })?;
        rows.push(FeatureRow {
            id: &n.id,
            element_type: n.element_type.as_deref(),
            rect: n.rect,
            source: e.source,
            encoding: e.vector,
        });
    }
    Ok(serde_json::to_string_pretty(&rows).expect("features serialize"))
}
