mod common;

use std::collections::{BTreeSet, HashMap};

use common::*;
use p2c_core::codegen::{
    emit_all, emit_html, emit_layout_css, is_layout_property, Declaration, OracleOutput, StyleOracle, Tag,
};
use p2c_core::layout::LayoutNode;
use p2c_core::model::StyleProps;
use p2c_core::verify::{check_tag_balance, parse_css, parse_html};
use p2c_core::{analyze, AnnotationSet, PipelineConfig, RulesOracle};
use proptest::prelude::*;

/// Tries to take over layout; the emitter must refuse.
struct GrabbyOracle;

impl StyleOracle for GrabbyOracle {
    fn name(&self) -> &'static str {
        "grabby"
    }

    fn declarations(&self, _node: &LayoutNode, _style: &StyleProps) -> Result<OracleOutput, String> {
        Ok(OracleOutput {
            declarations: vec![
                Declaration::new("width", "1px"),
                Declaration::new("position", "fixed"),
                Declaration::new("margin-left", "-5px"),
                Declaration::new("color", "#123456"),
            ],
            warnings: Vec::new(),
        })
    }
}

fn doc_for(seed: u64) -> p2c_core::PrototypeDoc {
    match seed % 3 {
        0 => overlap_free_doc(&mut rng(seed), 20),
        1 => nested_doc(&mut rng(seed), 25),
        _ => random_doc(&mut rng(seed), 30),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn html_mirrors_the_tree(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let a = analyze(&doc, &AnnotationSet::default(), &PipelineConfig::default()).unwrap();
        let html = emit_html(&a.tree, &doc).unwrap();
        let text = html.to_html();
        check_tag_balance(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let reparsed = parse_html(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&reparsed.root, &html.root);

        let nodes = a.tree.nodes();
        let non_leaf = nodes.iter().filter(|n| !n.is_leaf()).count();
        let root_leaf = usize::from(a.tree.root.is_leaf());
        prop_assert_eq!(html.count(Tag::Div), non_leaf + root_leaf);

        let classes = html.classnames();
        let unique: BTreeSet<_> = classes.iter().collect();
        prop_assert_eq!(unique.len(), classes.len());
    }

    #[test]
    fn selectors_match_one_classname_each(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let a = analyze(&doc, &AnnotationSet::default(), &PipelineConfig::default()).unwrap();
        let out = emit_all(&a.tree, &doc, &RulesOracle).unwrap();
        let html = parse_html(&out.html).unwrap();
        let mut uses: HashMap<&str, usize> = HashMap::new();
        for c in html.classnames() {
            *uses.entry(c).or_default() += 1;
        }
        let rules = parse_css(&out.css).unwrap();
        prop_assert_eq!(rules.len(), out.rules);
        for r in &rules {
            let class = r.selector.strip_prefix('.').unwrap();
            prop_assert_eq!(uses.get(class).copied(), Some(1), "selector {}", &r.selector);
        }
    }

    #[test]
    fn oracle_never_touches_layout(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let a = analyze(&doc, &AnnotationSet::default(), &PipelineConfig::default()).unwrap();
        let layout: HashMap<String, Vec<Declaration>> = emit_layout_css(&a.tree)
            .into_iter()
            .map(|r| (r.selector, r.declarations))
            .collect();
        for oracle in [&RulesOracle as &dyn StyleOracle, &GrabbyOracle] {
            let out = emit_all(&a.tree, &doc, oracle).unwrap();
            for rule in parse_css(&out.css).unwrap() {
                let mut seen = BTreeSet::new();
                for d in &rule.declarations {
                    prop_assert!(seen.insert(d.property.clone()), "{} repeats {}", &rule.selector, &d.property);
                }
                let own = &layout[&rule.selector];
                let (lay, vis): (Vec<_>, Vec<_>) = rule.declarations.iter().partition(|d| is_layout_property(&d.property));
                prop_assert_eq!(lay.len(), own.len());
                for (got, want) in lay.iter().zip(own) {
                    prop_assert_eq!(*got, want);
                }
                prop_assert!(vis.iter().all(|d| !own.iter().any(|o| o.property == d.property)));
            }
        }
    }

    #[test]
    fn emission_is_deterministic(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let cfg = PipelineConfig::default();
        let a = analyze(&doc, &AnnotationSet::default(), &cfg).unwrap();
        let b = analyze(&doc, &AnnotationSet::default(), &cfg).unwrap();
        let x = emit_all(&a.tree, &doc, &RulesOracle).unwrap();
        let y = emit_all(&b.tree, &doc, &RulesOracle).unwrap();
        prop_assert_eq!(x.html, y.html);
        prop_assert_eq!(x.css, y.css);
        prop_assert_eq!(x.manifest, y.manifest);
    }
}

#[test]
fn grabby_oracle_is_reported() {
    let doc = load_fixture("login");
    let a = analyze(&doc, &AnnotationSet::default(), &PipelineConfig::default()).unwrap();
    let out = emit_all(&a.tree, &doc, &GrabbyOracle).unwrap();
    assert!(out.warnings.iter().any(|w| w.contains("position")));
    assert!(!out.css.contains("fixed"));
    assert!(!out.css.contains("-5px"));
}
