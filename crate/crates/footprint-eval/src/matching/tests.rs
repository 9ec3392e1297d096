use super::*;
use crate::geometry::Rect;
use crate::ingest::{Feature, FeatureSet};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn square_set(source: Source, squares: &[(&str, f64, f64, f64)]) -> FeatureSet {
    let mut set = FeatureSet::new(source, "planar-meters");
    for (id, x, y, size) in squares {
        set.push(Feature {
            id: id.to_string(),
            geometry: Polygon::rect(*x, *y, x + size, y + size).unwrap(),
            source,
            tags: BTreeMap::new(),
        })
        .unwrap();
    }
    set
}

fn random_square_set(rng: &mut ChaCha8Rng, source: Source, n: usize, extent: f64) -> FeatureSet {
    let mut set = FeatureSet::new(source, "planar-meters");
    for i in 0..n {
        let x = rng.gen_range(0.0..extent);
        let y = rng.gen_range(0.0..extent);
        let size = rng.gen_range(4.0..14.0);
        set.push(Feature {
            id: format!("{}-{i}", source.as_str()),
            geometry: Polygon::rect(x, y, x + size, y + size).unwrap(),
            source,
            tags: BTreeMap::new(),
        })
        .unwrap();
    }
    set
}

/// All-pairs reference implementation: no index, no shortcuts.
fn brute_force(pred: &FeatureSet, gt: &FeatureSet, criterion: &MatchCriterion) -> MatchOutcome {
    let mut gt_status = BTreeMap::new();
    let mut pred_status = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut pred_matched = vec![false; pred.len()];
    let mut n_gt_matched = 0;
    for g in gt.iter() {
        let mut detected = false;
        for (pi, p) in pred.iter().enumerate() {
            if criterion.matches(&p.geometry, &g.geometry) {
                detected = true;
                pred_matched[pi] = true;
                pairs.push((p.id.clone(), g.id.clone()));
            }
        }
        if detected {
            n_gt_matched += 1;
        }
        gt_status.insert(
            g.id.clone(),
            if detected {
                GtStatus::Detected
            } else {
                GtStatus::Missed
            },
        );
    }
    for (p, matched) in pred.iter().zip(&pred_matched) {
        pred_status.insert(
            p.id.clone(),
            if *matched {
                PredStatus::Matched
            } else {
                PredStatus::Spurious
            },
        );
    }
    pairs.sort();
    let n_pred_matched = pred_matched.iter().filter(|m| **m).count();
    MatchOutcome {
        counts: tally_counts(gt.len(), pred.len(), n_gt_matched, n_pred_matched).unwrap(),
        gt_status,
        pred_status,
        pairs,
    }
}

fn assert_outcomes_equal(a: &MatchOutcome, b: &MatchOutcome) {
    assert_eq!(a.counts, b.counts);
    assert_eq!(a.gt_status, b.gt_status);
    assert_eq!(a.pred_status, b.pred_status);
    assert_eq!(a.pairs, b.pairs);
}

#[test]
fn identity_match() {
    let pred = square_set(Source::Prediction, &[("p0", 0.0, 0.0, 10.0)]);
    let gt = square_set(Source::GroundTruth, &[("g0", 0.0, 0.0, 10.0)]);
    let out = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();
    assert_eq!(out.counts.tp, 1);
    assert_eq!(out.counts.fp, 0);
    assert_eq!(out.counts.fn_, 0);
}

#[test]
fn split_prediction_counts_both_segments() {
    // Two predictions over one ground-truth square plus one disjoint
    // prediction; checked by hand against the 3x1 pair table.
    let pred = square_set(
        Source::Prediction,
        &[
            ("p0", 0.0, 0.0, 6.0),
            ("p1", 4.0, 0.0, 6.0),
            ("p2", 100.0, 100.0, 5.0),
        ],
    );
    let gt = square_set(Source::GroundTruth, &[("g0", 0.0, 0.0, 10.0)]);
    let out = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();
    assert_eq!(out.counts.n_gt_matched, 1);
    assert_eq!(out.counts.n_pred_matched, 2);
    assert_eq!(out.counts.tp, 1);
    assert_eq!(out.counts.fp, 1);
    assert_eq!(out.counts.fn_, 0);
    assert_eq!(
        out.pairs,
        vec![
            ("p0".to_string(), "g0".to_string()),
            ("p1".to_string(), "g0".to_string())
        ]
    );
}

#[test]
fn empty_predictions_all_missed() {
    let pred = square_set(Source::Prediction, &[]);
    let gt = square_set(
        Source::GroundTruth,
        &[("a", 0.0, 0.0, 5.0), ("b", 10.0, 0.0, 5.0), ("c", 20.0, 0.0, 5.0)],
    );
    let out = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();
    assert_eq!(out.counts.tp, 0);
    assert_eq!(out.counts.fp, 0);
    assert_eq!(out.counts.fn_, 3);
    assert!(out.gt_status.values().all(|s| *s == GtStatus::Missed));
}

#[test]
fn source_mismatch_is_usage_error() {
    let gt = square_set(Source::GroundTruth, &[("g0", 0.0, 0.0, 10.0)]);
    let err = match_features(&gt.clone(), &gt, &MatchCriterion::any_overlap()).unwrap_err();
    assert!(matches!(err, Error::SourceMismatch { .. }));
}

#[test]
fn tally_first_test_counts() {
    let c = tally_counts(320, 604, 319, 488).unwrap();
    assert_eq!((c.tp, c.fp, c.fn_), (319, 116, 1));
}

#[test]
fn tally_second_test_counts() {
    let c = tally_counts(320, 498, 320, 402).unwrap();
    assert_eq!((c.tp, c.fp, c.fn_), (320, 96, 0));
}

#[test]
fn tally_all_zero() {
    let c = tally_counts(0, 0, 0, 0).unwrap();
    assert_eq!((c.tp, c.fp, c.fn_), (0, 0, 0));
}

#[test]
fn tally_rejects_matched_above_total() {
    assert!(matches!(
        tally_counts(10, 10, 11, 5),
        Err(Error::InconsistentCounts(_))
    ));
    assert!(matches!(
        tally_counts(10, 10, 5, 11),
        Err(Error::InconsistentCounts(_))
    ));
}

#[test]
fn counts_identities_hold_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let pred = random_square_set(&mut rng, Source::Prediction, 60, 300.0);
        let gt = random_square_set(&mut rng, Source::GroundTruth, 50, 300.0);
        let out = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();
        let c = out.counts;
        assert_eq!(c.tp + c.fn_, c.n_gt);
        assert_eq!(c.fp + c.n_pred_matched, c.n_pred);
        assert_eq!(c.tp, c.n_gt_matched);
        assert_eq!(
            out.gt_status
                .values()
                .filter(|s| **s == GtStatus::Detected)
                .count(),
            c.n_gt_matched
        );
        assert_eq!(
            out.pred_status
                .values()
                .filter(|s| **s == PredStatus::Spurious)
                .count(),
            c.fp
        );
    }
}

#[test]
fn matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..25 {
        let np = rng.gen_range(0..80);
        let ng = rng.gen_range(0..80);
        let pred = random_square_set(&mut rng, Source::Prediction, np, 250.0);
        let gt = random_square_set(&mut rng, Source::GroundTruth, ng, 250.0);
        let criterion = if round % 2 == 0 {
            MatchCriterion::any_overlap()
        } else {
            MatchCriterion::iou_threshold(0.3).unwrap()
        };
        let fast = match_features(&pred, &gt, &criterion).unwrap();
        let slow = brute_force(&pred, &gt, &criterion);
        assert_outcomes_equal(&fast, &slow);
    }
}

#[test]
fn order_permutation_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let pred = random_square_set(&mut rng, Source::Prediction, 40, 200.0);
    let gt = random_square_set(&mut rng, Source::GroundTruth, 40, 200.0);
    let baseline = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();

    let mut pred_features: Vec<Feature> = pred.features().to_vec();
    let mut gt_features: Vec<Feature> = gt.features().to_vec();
    pred_features.reverse();
    gt_features.rotate_left(13);
    let mut pred_shuffled = FeatureSet::new(Source::Prediction, "planar-meters");
    for f in pred_features {
        pred_shuffled.push(f).unwrap();
    }
    let mut gt_shuffled = FeatureSet::new(Source::GroundTruth, "planar-meters");
    for f in gt_features {
        gt_shuffled.push(f).unwrap();
    }
    let shuffled = match_features(&pred_shuffled, &gt_shuffled, &MatchCriterion::any_overlap())
        .unwrap();
    assert_outcomes_equal(&baseline, &shuffled);
}

#[test]
fn iou_threshold_is_monotone_restriction() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..10 {
        let pred = random_square_set(&mut rng, Source::Prediction, 50, 250.0);
        let gt = random_square_set(&mut rng, Source::GroundTruth, 50, 250.0);
        let loose = match_features(&pred, &gt, &MatchCriterion::any_overlap()).unwrap();
        for tau in [0.05, 0.25, 0.5, 0.9] {
            let tight =
                match_features(&pred, &gt, &MatchCriterion::iou_threshold(tau).unwrap()).unwrap();
            assert!(tight.counts.n_gt_matched <= loose.counts.n_gt_matched);
            assert!(tight.counts.n_pred_matched <= loose.counts.n_pred_matched);
            assert!(tight.pairs.iter().all(|p| loose.pairs.contains(p)));
        }
    }
}

#[test]
fn iou_threshold_rejects_bad_tau() {
    assert!(MatchCriterion::iou_threshold(0.0).is_err());
    assert!(MatchCriterion::iou_threshold(1.5).is_err());
    assert!(MatchCriterion::iou_threshold(1.0).is_ok());
}

#[test]
fn grid_index_covers_all_and_none() {
    let boxes: Vec<Rect> = (0..20)
        .map(|i| Rect::new(i as f64 * 10.0, 0.0, i as f64 * 10.0 + 5.0, 5.0).unwrap())
        .collect();
    let index = GridIndex::build(&boxes);
    let all = index.query(&Rect::new(-10.0, -10.0, 500.0, 500.0).unwrap());
    assert_eq!(all.len(), 20);
    let none = index.query(&Rect::new(1000.0, 1000.0, 1100.0, 1100.0).unwrap());
    assert!(none.is_empty());
}

#[test]
fn grid_index_agrees_with_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let boxes: Vec<Rect> = (0..1000)
        .map(|_| {
            let x = rng.gen_range(0.0..1000.0);
            let y = rng.gen_range(0.0..1000.0);
            let w = rng.gen_range(1.0..20.0);
            let h = rng.gen_range(1.0..20.0);
            Rect::new(x, y, x + w, y + h).unwrap()
        })
        .collect();
    let index = GridIndex::build(&boxes);
    for _ in 0..100 {
        let x = rng.gen_range(-50.0..1050.0);
        let y = rng.gen_range(-50.0..1050.0);
        let w = rng.gen_range(1.0..120.0);
        let h = rng.gen_range(1.0..120.0);
        let query = Rect::new(x, y, x + w, y + h).unwrap();
        let expected: Vec<u32> = boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.intersects(&query))
            .map(|(i, _)| i as u32)
            .collect();
        let got = index.query(&query);
        // Superset with no false negatives; exactness after filtering.
        for e in &expected {
            assert!(got.contains(e));
        }
        let filtered: Vec<u32> = got
            .into_iter()
            .filter(|&i| boxes[i as usize].intersects(&query))
            .collect();
        assert_eq!(filtered, expected);
    }
}
