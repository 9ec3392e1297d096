//! Prediction vs ground-truth matching.
//!
//! The counting is asymmetric, not an assignment problem: a ground-truth
//! building is *detected* when at least one prediction satisfies the
//! criterion against it, and a prediction is *matched* when it satisfies
//! the criterion against at least one ground-truth building. Many-to-one
//! relations are allowed in both directions and never deduplicated, so a
//! building digitized as two segments counts both segments as matched.
//! TP counts detected ground-truth buildings; FP counts unmatched
//! predictions; FN counts missed ground-truth buildings.

mod grid;

pub use grid::GridIndex;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    bounding_box, intersection_area, polygon_area, Polygon, EPS_AREA,
};
use crate::ingest::{FeatureSet, Source};

/// How a prediction/ground-truth pair qualifies as overlapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchCriterion {
    /// Positive shared area above the sliver threshold. This is the
    /// default and matches plain map-overlay counting.
    AnyOverlap { min_area_m2: f64 },
    /// Intersection-over-union at or above `tau`, on top of the positive
    /// overlap requirement (so tightening never adds matches).
    IouThreshold { tau: f64 },
}

impl MatchCriterion {
    pub fn any_overlap() -> MatchCriterion {
        MatchCriterion::AnyOverlap {
            min_area_m2: EPS_AREA,
        }
    }

    pub fn iou_threshold(tau: f64) -> Result<MatchCriterion> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Config(format!("iou threshold {tau} outside (0, 1]")));
        }
        Ok(MatchCriterion::IouThreshold { tau })
    }

    pub fn matches(&self, a: &Polygon, b: &Polygon) -> bool {
        let inter = intersection_area(a, b);
        match self {
            MatchCriterion::AnyOverlap { min_area_m2 } => inter > *min_area_m2,
            MatchCriterion::IouThreshold { tau } => {
                if inter <= EPS_AREA {
                    return false;
                }
                let union = polygon_area(a) + polygon_area(b) - inter;
                union > 0.0 && inter / union >= *tau
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MatchCriterion::AnyOverlap { .. } => "any-overlap".to_string(),
            MatchCriterion::IouThreshold { tau } => format!("iou:{tau}"),
        }
    }
}

impl Default for MatchCriterion {
    fn default() -> Self {
        MatchCriterion::any_overlap()
    }
}

/// The four tallies behind the metrics, plus the raw totals they came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub n_gt: usize,
    pub n_pred: usize,
    pub n_gt_matched: usize,
    pub n_pred_matched: usize,
}

/// Derive [`Counts`] from the four raw totals: TP = detected ground-truth
/// buildings, FN = the rest of the ground truth, FP = unmatched predictions.
pub fn tally_counts(
    n_gt: usize,
    n_pred: usize,
    n_gt_matched: usize,
    n_pred_matched: usize,
) -> Result<Counts> {
    if n_gt_matched > n_gt {
        return Err(Error::InconsistentCounts(format!(
            "matched ground-truth count {n_gt_matched} exceeds total {n_gt}"
        )));
    }
    if n_pred_matched > n_pred {
        return Err(Error::InconsistentCounts(format!(
            "matched prediction count {n_pred_matched} exceeds total {n_pred}"
        )));
    }
    Ok(Counts {
        tp: n_gt_matched,
        fp: n_pred - n_pred_matched,
        fn_: n_gt - n_gt_matched,
        n_gt,
        n_pred,
        n_gt_matched,
        n_pred_matched,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtStatus {
    Detected,
    Missed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredStatus {
    Matched,
    Spurious,
}

/// Full matching result: tallies, per-feature statuses, and the qualifying
/// (prediction id, ground-truth id) pairs sorted canonically.
#[derive(Debug, Clone)]
pub struct MatchOutcome {
    pub counts: Counts,
    pub gt_status: BTreeMap<String, GtStatus>,
    pub pred_status: BTreeMap<String, PredStatus>,
    pub pairs: Vec<(String, String)>,
}

/// Classify every prediction and ground-truth feature under `criterion`.
/// Deterministic and independent of feature order in either input.
pub fn match_features(
    pred: &FeatureSet,
    gt: &FeatureSet,
    criterion: &MatchCriterion,
) -> Result<MatchOutcome> {
    if pred.source() != Source::Prediction {
        return Err(Error::SourceMismatch {
            expected: Source::Prediction.to_string(),
            found: pred.source().to_string(),
        });
    }
    if gt.source() != Source::GroundTruth {
        return Err(Error::SourceMismatch {
            expected: Source::GroundTruth.to_string(),
            found: gt.source().to_string(),
        });
    }

    let pred_boxes: Vec<_> = pred
        .iter()
        .map(|f| bounding_box(&f.geometry))
        .collect();
    let index = GridIndex::build(&pred_boxes);

    // Per-ground-truth candidate checks are independent; collect keeps
    // input order so the merge below is deterministic.
    let per_gt: Vec<Vec<u32>> = gt
        .features()
        .par_iter()
        .map(|g| {
            let candidates = index.query(&bounding_box(&g.geometry));
            candidates
                .into_iter()
                .filter(|&i| {
                    criterion.matches(&pred.features()[i as usize].geometry, &g.geometry)
                })
                .collect()
        })
        .collect();

    let mut pred_matched = vec![false; pred.len()];
    let mut gt_status = BTreeMap::new();
    let mut pred_status = BTreeMap::new();
    let mut pairs = Vec::new();
    for (g, matched_preds) in gt.iter().zip(&per_gt) {
        let status = if matched_preds.is_empty() {
            GtStatus::Missed
        } else {
            GtStatus::Detected
        };
        gt_status.insert(g.id.clone(), status);
        for &p in matched_preds {
            pred_matched[p as usize] = true;
            pairs.push((pred.features()[p as usize].id.clone(), g.id.clone()));
        }
    }
    for (f, matched) in pred.iter().zip(&pred_matched) {
        let status = if *matched {
            PredStatus::Matched
        } else {
            PredStatus::Spurious
        };
        pred_status.insert(f.id.clone(), status);
    }
    pairs.sort();

    let n_gt_matched = gt_status
        .values()
        .filter(|s| **s == GtStatus::Detected)
        .count();
    let n_pred_matched = pred_matched.iter().filter(|m| **m).count();
    let counts = tally_counts(gt.len(), pred.len(), n_gt_matched, n_pred_matched)?;
    Ok(MatchOutcome {
        counts,
        gt_status,
        pred_status,
        pairs,
    })
}

#[cfg(test)]
mod tests;
