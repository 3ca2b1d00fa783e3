//! Element-type recognition: the spatial encoding fed to typed classifiers,
//! a deterministic reference classifier, and precision/recall/F1 evaluation.

mod classify;
mod encoding;
mod metrics;

pub use classify::{classify_heuristic, Classifier, HeuristicClassifier, STATUS_BAR_MAX_HEIGHT};
pub use encoding::{spatial_encode, EncodingError, SpatialEncoding, DEFAULT_FREQUENCIES};
pub use metrics::{evaluate_classifier, Averages, ClassificationReport, LabelMetrics, MetricsError};

/// Labels used when no taxonomy is configured.
pub const DEFAULT_TAXONOMY: [&str; 12] = [
    "text",
    "image",
    "icon",
    "button",
    "text-button",
    "toolbar",
    "navigation-bar",
    "card",
    "list-item",
    "container",
    "status-bar",
    "input",
];

/// Node id to element-type label.
pub type TypeMap = std::collections::BTreeMap<String, String>;
