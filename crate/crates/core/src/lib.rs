//! Compiles UI design prototypes into HTML and flexbox CSS.
//!
//! A prototype is a tree of layers with geometry and style. The pipeline
//! repairs its hierarchy ([`lint`]), builds a layout tree of rows, columns
//! and absolute clusters ([`layout`]), labels every node with an element
//! type ([`recognition`]) and emits code ([`codegen`]). [`verify`] replays
//! the emitted CSS without a browser and scores rendered images.
//!
//! ```
//! use p2c_core::{build, AnnotationSet, Layer, PipelineConfig, PrototypeDoc, Rect, RulesOracle};
//!
//! let doc = PrototypeDoc::new(
//!     320.0,
//!     100.0,
//!     vec![
//!         Layer::text("price", Rect::new(16.0, 40.0, 60.0, 20.0), "$12"),
//!         Layer::text("hours", Rect::new(200.0, 40.0, 90.0, 20.0), "9am-5pm"),
//!     ],
//! );
//! let out = build(&doc, &AnnotationSet::default(), &PipelineConfig::default(), &RulesOracle).unwrap();
//! assert!(out.emitted.css.contains("flex-direction: row"));
//! ```

pub mod annotations;
pub mod codegen;
pub mod config;
pub mod geometry;
pub mod layout;
pub mod lint;
pub mod model;
pub mod pipeline;
pub mod recognition;
pub mod verify;

pub use annotations::{parse_annotations, AnnotationSet, GroupType};
pub use codegen::{RulesOracle, StyleOracle};
pub use config::PipelineConfig;
pub use geometry::Rect;
pub use layout::{build_layout_tree, LayoutTree};
pub use model::{parse_prototype, Layer, LayerKind, PrototypeDoc, StyleProps};
pub use pipeline::{analyze, build, BuildOutput, PipelineError, RunReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/prototypes.md")]
    mod prototypes {}
    #[doc = include_str!("../../../book/src/hierarchy.md")]
    mod hierarchy {}
    #[doc = include_str!("../../../book/src/layout.md")]
    mod layout {}
    #[doc = include_str!("../../../book/src/recognition.md")]
    mod recognition {}
    #[doc = include_str!("../../../book/src/codegen.md")]
    mod codegen {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
