mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use p2c_core::geometry::Rect;
use p2c_core::recognition::{evaluate_classifier, spatial_encode, Classifier, HeuristicClassifier, DEFAULT_FREQUENCIES};
use p2c_core::{analyze, AnnotationSet, PipelineConfig};
use proptest::prelude::*;

const CANVAS: Rect = Rect::new(0.0, 0.0, 375.0, 812.0);

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn label_maps() -> impl Strategy<Value = (BTreeMap<String, String>, BTreeMap<String, String>)> {
    prop::collection::vec((0..TAXONOMY.len(), 0..TAXONOMY.len()), 0..60).prop_map(|pairs| {
        let mut pred = BTreeMap::new();
        let mut truth = BTreeMap::new();
        for (i, (p, t)) in pairs.into_iter().enumerate() {
            pred.insert(format!("n{i}"), TAXONOMY[p].to_string());
            truth.insert(format!("n{i}"), TAXONOMY[t].to_string());
        }
        (pred, truth)
    })
}

proptest! {
    #[test]
    fn encoding_is_bounded_with_fixed_length(x in unit(), y in unit(), w in unit(), h in unit(), l in 1usize..=20) {
        let rect = Rect::new(x * CANVAS.w, y * CANVAS.h, w * CANVAS.w, h * CANVAS.h);
        let e = spatial_encode(&rect, &CANVAS, l).unwrap();
        prop_assert_eq!(e.vector.len(), 8 * l);
        prop_assert!(e.vector.iter().all(|c| c.abs() <= 1.0));
    }

    #[test]
    fn classifier_is_total_and_deterministic(seed in any::<u64>()) {
        let doc = random_doc(&mut rng(seed), 30);
        let a = analyze(&doc, &AnnotationSet::default(), &PipelineConfig::default()).unwrap();
        let c = HeuristicClassifier::default();
        let first = c.classify(&a.tree, &doc);
        prop_assert_eq!(&first, &c.classify(&a.tree, &doc));
        let ids: BTreeSet<&String> = a.tree.nodes().into_iter().map(|n| &n.id).collect();
        prop_assert_eq!(ids, first.keys().collect::<BTreeSet<_>>());
        prop_assert!(first.values().all(|l| TAXONOMY.contains(&l.as_str())));
    }

    #[test]
    fn reports_agree_with_counting((pred, truth) in label_maps()) {
        let r = evaluate_classifier(&pred, &truth, &taxonomy()).unwrap();
        let counted: Vec<_> = r.labels.iter().filter(|l| !l.empty_support).collect();
        if let Some(max) = counted.iter().map(|l| l.f1).reduce(f64::max) {
            prop_assert!(r.macro_avg.f1 <= max + 1e-12);
        }
        let n = truth.len();
        if n > 0 {
            let correct = truth.iter().filter(|(k, t)| &pred[*k] == *t).count();
            // Support-weighted recall is accuracy.
            prop_assert!((r.weighted_avg.recall - correct as f64 / n as f64).abs() < 1e-12);
            let (mut wp, mut wf) = (0.0, 0.0);
            for label in TAXONOMY {
                let (tp, fp, fn_) = count_confusions(&pred, &truth, label);
                let support = (tp + fn_) as f64;
                if tp + fp + fn_ == 0 {
                    continue;
                }
                let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
                let rc = if tp + fn_ == 0 { 0.0 } else { tp as f64 / support };
                let f = if p + rc == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
                wp += p * support;
                wf += f * support;
                let m = r.labels.iter().find(|m| m.label == label).unwrap();
                prop_assert_eq!((m.tp, m.fp, m.fn_), (tp, fp, fn_));
            }
            prop_assert!((r.weighted_avg.precision - wp / n as f64).abs() < 1e-12);
            prop_assert!((r.weighted_avg.f1 - wf / n as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn encoding_separates_every_grid_point() {
    // One scalar at a time over z = k / 1000, 0 < z < 1.
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    for slot in 0..4 {
        let vectors: Vec<Vec<f64>> = grid
            .iter()
            .map(|&z| {
                let mut v = [0.5; 4];
                v[slot] = z;
                let r = Rect::new(v[0] * CANVAS.w, v[1] * CANVAS.h, v[2] * CANVAS.w, v[3] * CANVAS.h);
                let e = spatial_encode(&r, &CANVAS, DEFAULT_FREQUENCIES).unwrap().vector;
                let l = 2 * DEFAULT_FREQUENCIES;
                e[slot * l..(slot + 1) * l].to_vec()
            })
            .collect();
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let d: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(d > 1e-6, "slot {slot}: z={} and z={} collide", grid[i], grid[j]);
            }
        }
    }
}

#[test]
fn lowest_frequency_alone_is_injective() {
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    let enc: Vec<(f64, f64)> = grid
        .iter()
        .map(|&z| {
            let r = Rect::new(z * CANVAS.w, 0.0, 1.0, 1.0);
            let v = spatial_encode(&r, &CANVAS, 1).unwrap().vector;
            (v[0], v[1])
        })
        .collect();
    for i in 0..enc.len() {
        for j in i + 1..enc.len() {
            assert_ne!(enc[i], enc[j]);
        }
    }
}
