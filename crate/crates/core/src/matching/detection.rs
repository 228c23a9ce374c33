use std::cmp::Ordering;

use super::iou::iou_matrix;
use crate::model::{BBox, SignPrediction};
use crate::scalar::Scalar;

/// Result of assigning predicted boxes to ground-truth boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMatching<S = f64> {
    /// `(pred_index, gt_index, iou)`, ascending by prediction index.
    pub assignments: Vec<(usize, usize, S)>,
    pub unmatched_pred: Vec<usize>,
    pub unmatched_gt: Vec<usize>,
}

/// Prediction indices by descending confidence; equal scores keep input order.
pub fn rank_by_confidence(confidences: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..confidences.len()).collect();
    order.sort_by(|&a, &b| confidences[b].partial_cmp(&confidences[a]).unwrap_or(Ordering::Equal));
    order
}

/// Total order on boxes used to break exact IoU ties independently of
/// the order ground truth was listed in.
fn box_order<S: Scalar>(a: &BBox<S>, b: &BBox<S>) -> Ordering {
    let ka = [a.x_min(), a.y_min(), a.x_max(), a.y_max()];
    let kb = [b.x_min(), b.y_min(), b.x_max(), b.y_max()];
    for (x, y) in ka.iter().zip(kb.iter()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Greedy assignment over a precomputed IoU matrix (`ious[pred][gt]`).
///
/// Predictions are visited in `order`. Each takes the still-free ground
/// truth with IoU at or above `threshold`, preferring non-ignored ground
/// truth, then higher IoU. Returns the chosen gt per prediction.
pub fn greedy_assign<S: Scalar>(
    ious: &[Vec<S>],
    order: &[usize],
    gt_boxes: &[BBox<S>],
    gt_ignore: &[bool],
    threshold: &S,
) -> Vec<Option<usize>> {
    let mut taken = vec![false; gt_boxes.len()];
    let mut result = vec![None; ious.len()];
    for &p in order {
        let mut best: Option<usize> = None;
        for g in 0..gt_boxes.len() {
            if taken[g] || ious[p][g] < *threshold {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => match (gt_ignore[b], gt_ignore[g]) {
                    (false, true) => false,
                    (true, false) => true,
                    _ => match ious[p][g].partial_cmp(&ious[p][b]) {
                        Some(Ordering::Greater) => true,
                        Some(Ordering::Equal) => box_order(&gt_boxes[g], &gt_boxes[b]) == Ordering::Less,
                        _ => false,
                    },
                },
            };
            if better {
                best = Some(g);
            }
        }
        if let Some(g) = best {
            taken[g] = true;
            result[p] = Some(g);
        }
    }
    result
}

/// COCO-style greedy matching: predictions by descending confidence each
/// claim the free ground-truth box of highest IoU, if at least `iou_threshold`.
pub fn match_detections<S: Scalar>(
    gt_boxes: &[BBox],
    preds: &[SignPrediction],
    iou_threshold: f64,
) -> DetectionMatching<S> {
    let gts: Vec<BBox<S>> = gt_boxes.iter().map(|b| b.cast()).collect();
    let pboxes: Vec<BBox<S>> = preds.iter().map(|p| p.bbox.cast()).collect();
    let ious = iou_matrix(&pboxes, &gts);
    let confidences: Vec<f64> = preds.iter().map(|p| p.confidence).collect();
    let order = rank_by_confidence(&confidences);
    let ignore = vec![false; gts.len()];
    let chosen = greedy_assign(&ious, &order, &gts, &ignore, &S::from_decimal(iou_threshold));

    let mut assignments = Vec::new();
    let mut unmatched_pred = Vec::new();
    let mut gt_used = vec![false; gts.len()];
    for (p, g) in chosen.iter().enumerate() {
        match g {
            Some(g) => {
                gt_used[*g] = true;
                assignments.push((p, *g, ious[p][*g].clone()));
            }
            None => unmatched_pred.push(p),
        }
    }
    let unmatched_gt = (0..gts.len()).filter(|g| !gt_used[*g]).collect();
    DetectionMatching {
        assignments,
        unmatched_pred,
        unmatched_gt,
    }
}
