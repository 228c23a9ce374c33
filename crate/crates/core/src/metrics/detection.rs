use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::{Dataset, PredictionSet};
use crate::matching::{greedy_assign, iou_matrix, rank_by_confidence};
use crate::model::{BBox, EvalConfig, SignPrediction, SizeBucket, SizeBuckets};
use crate::scalar::{mean, Exact, Scalar};

/// Number of recall points in the interpolated precision average.
const RECALL_POINTS: u64 = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetMetric {
    #[serde(rename = "AP")]
    Ap,
    #[serde(rename = "AR")]
    Ar,
}

impl fmt::Display for DetMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetMetric::Ap => "AP",
            DetMetric::Ar => "AR",
        })
    }
}

/// A single IoU threshold or an evenly spaced inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IouSetting {
    Single { threshold: f64 },
    Range { start: f64, end: f64, step: f64 },
}

impl IouSetting {
    pub fn thresholds(&self) -> Vec<f64> {
        match *self {
            IouSetting::Single { threshold } => vec![threshold],
            IouSetting::Range { start, end, step } => EvalConfig {
                iou_range_start: start,
                iou_range_end: end,
                iou_range_step: step,
                ..EvalConfig::default()
            }
            .iou_thresholds(),
        }
    }

    /// `0.50` or `0.25:0.75`.
    pub fn label(&self) -> String {
        match *self {
            IouSetting::Single { threshold } => format!("{threshold:.2}"),
            IouSetting::Range { start, end, .. } => format!("{start:.2}:{end:.2}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRow<S = Exact> {
    pub metric: DetMetric,
    pub iou: IouSetting,
    pub bucket: SizeBucket,
    pub max_dets: usize,
    /// `None` when the bucket holds no ground truth.
    pub value: Option<S>,
}

impl<S> DetectionRow<S> {
    /// Row name in the usual `AP@[IoU=0.50]` form.
    pub fn label(&self) -> String {
        format!("{}@[IoU={}]", self.metric, self.iou.label())
    }
}

/// AP/AR grid over IoU settings, size buckets and detection caps.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport<S = Exact> {
    pub rows: Vec<DetectionRow<S>>,
    pub images: usize,
    pub ground_truth: usize,
    pub predictions: usize,
    /// Predictions on images missing from the ground truth (scored as false positives).
    pub predictions_on_unknown_images: usize,
}

impl<S> DetectionReport<S> {
    pub fn get(
        &self,
        metric: DetMetric,
        iou: &IouSetting,
        bucket: SizeBucket,
        max_dets: usize,
    ) -> Option<&DetectionRow<S>> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.iou == *iou && r.bucket == bucket && r.max_dets == max_dets)
    }
}

#[derive(Serialize, Deserialize)]
struct RowRepr {
    metric: DetMetric,
    label: String,
    iou: IouSetting,
    area: SizeBucket,
    max_dets: usize,
    value: Option<f64>,
    exact: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    images: usize,
    ground_truth: usize,
    predictions: usize,
    predictions_on_unknown_images: usize,
    rows: Vec<RowRepr>,
}

impl Serialize for DetectionReport<Exact> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        ReportRepr {
            images: self.images,
            ground_truth: self.ground_truth,
            predictions: self.predictions,
            predictions_on_unknown_images: self.predictions_on_unknown_images,
            rows: self
                .rows
                .iter()
                .map(|r| RowRepr {
                    metric: r.metric,
                    label: r.label(),
                    iou: r.iou,
                    area: r.bucket,
                    max_dets: r.max_dets,
                    value: r.value.as_ref().map(|v| v.to_real()),
                    exact: r.value.as_ref().map(|v| v.to_string()),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DetectionReport<Exact> {
    /// Values are restored from their exact text; the float field is derived.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ReportRepr::deserialize(deserializer)?;
        let rows = repr
            .rows
            .into_iter()
            .map(|r| {
                let value = r
                    .exact
                    .map(|s| {
                        s.parse::<Exact>()
                            .map_err(|e| serde::de::Error::custom(format!("bad exact value {s:?}: {e}")))
                    })
                    .transpose()?;
                Ok(DetectionRow {
                    metric: r.metric,
                    iou: r.iou,
                    bucket: r.area,
                    max_dets: r.max_dets,
                    value,
                })
            })
            .collect::<Result<_, D::Error>>()?;
        Ok(DetectionReport {
            rows,
            images: repr.images,
            ground_truth: repr.ground_truth,
            predictions: repr.predictions,
            predictions_on_unknown_images: repr.predictions_on_unknown_images,
        })
    }
}

/// Outcome at one IoU threshold, bucket and cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEval<S> {
    /// 101-point interpolated average precision.
    pub ap: Option<S>,
    /// Final recall of the pooled ranking.
    pub recall: Option<S>,
    pub true_positives: u64,
    pub false_positives: u64,
    pub ground_truth: u64,
}

struct PreparedImage<S> {
    gt_boxes: Vec<BBox<S>>,
    gt_areas: Vec<f64>,
    /// Predictions in confidence order.
    confidences: Vec<f64>,
    pred_areas: Vec<f64>,
    ious: Vec<Vec<S>>,
}

struct Prepared<S> {
    images: Vec<PreparedImage<S>>,
    ground_truth: usize,
    predictions: usize,
    unknown: usize,
}

impl<S: Scalar> Prepared<S> {
    fn new(dataset: &Dataset, predictions: &PredictionSet) -> Self {
        let mut by_id: BTreeMap<&str, (&[_], &[SignPrediction])> = BTreeMap::new();
        for img in &dataset.entries {
            by_id.insert(img.image_id.as_str(), (img.signs.as_slice(), &[]));
        }
        let mut unknown = 0;
        for entry in &predictions.entries {
            let slot = by_id.entry(entry.image_id.as_str()).or_insert_with(|| {
                log::warn!(
                    "predictions for unannotated image {:?} count as false positives",
                    entry.image_id
                );
                (&[], &[])
            });
            if slot.0.is_empty() && dataset.image(&entry.image_id).is_none() {
                unknown += entry.signs.len();
            }
            slot.1 = entry.signs.as_slice();
        }

        let images = by_id
            .values()
            .map(|(gt, preds)| {
                let order = rank_by_confidence(&preds.iter().map(|p| p.confidence).collect::<Vec<_>>());
                let sorted: Vec<&SignPrediction> = order.iter().map(|i| &preds[*i]).collect();
                let gt_boxes: Vec<BBox<S>> = gt.iter().map(|s| s.bbox.cast()).collect();
                let pred_boxes: Vec<BBox<S>> = sorted.iter().map(|p| p.bbox.cast()).collect();
                PreparedImage {
                    ious: iou_matrix(&pred_boxes, &gt_boxes),
                    gt_areas: gt.iter().map(|s| s.bbox.area()).collect(),
                    gt_boxes,
                    confidences: sorted.iter().map(|p| p.confidence).collect(),
                    pred_areas: sorted.iter().map(|p| p.bbox.area()).collect(),
                }
            })
            .collect();
        Prepared {
            images,
            ground_truth: dataset.sign_count(),
            predictions: predictions.entries.iter().map(|e| e.signs.len()).sum(),
            unknown,
        }
    }

    fn eval(&self, threshold: &S, bucket: SizeBucket, sizes: &SizeBuckets, max_dets: usize) -> ThresholdEval<S> {
        let mut scored: Vec<(f64, bool)> = Vec::new();
        let mut n_gt = 0u64;
        for img in &self.images {
            let ignore: Vec<bool> = img.gt_areas.iter().map(|a| !sizes.contains(bucket, *a)).collect();
            n_gt += ignore.iter().filter(|i| !**i).count() as u64;
            let k = img.confidences.len().min(max_dets);
            let order: Vec<usize> = (0..k).collect();
            let chosen = greedy_assign(&img.ious[..k], &order, &img.gt_boxes, &ignore, threshold);
            for (d, g) in chosen.iter().enumerate() {
                let counted = match g {
                    Some(g) => !ignore[*g],
                    None => sizes.contains(bucket, img.pred_areas[d]),
                };
                if counted {
                    scored.push((img.confidences[d], g.is_some()));
                }
            }
        }
        // stable: equal scores keep image-id order, then rank within the image
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let flags: Vec<bool> = scored.iter().map(|s| s.1).collect();
        pr_summary(&flags, n_gt)
    }
}

/// AP and final recall of a ranked list of true/false positive flags
/// against `n_gt` ground-truth boxes.
fn pr_summary<S: Scalar>(flags: &[bool], n_gt: u64) -> ThresholdEval<S> {
    let tp_total = flags.iter().filter(|f| **f).count() as u64;
    let fp_total = flags.len() as u64 - tp_total;
    if n_gt == 0 {
        return ThresholdEval {
            ap: None,
            recall: None,
            true_positives: tp_total,
            false_positives: fp_total,
            ground_truth: 0,
        };
    }
    let mut cum_tp = Vec::with_capacity(flags.len());
    let mut tp = 0u64;
    for f in flags {
        tp += *f as u64;
        cum_tp.push(tp);
    }
    let mut precision: Vec<S> = cum_tp
        .iter()
        .enumerate()
        .map(|(i, t)| S::ratio(*t, i as u64 + 1))
        .collect();
    for i in (0..precision.len().saturating_sub(1)).rev() {
        if precision[i + 1] > precision[i] {
            precision[i] = precision[i + 1].clone();
        }
    }
    let mut sum = S::zero();
    for k in 0..RECALL_POINTS {
        // first rank whose recall tp/n_gt reaches k/100
        let idx = cum_tp.partition_point(|t| t * (RECALL_POINTS - 1) < k * n_gt);
        if idx < precision.len() {
            sum = sum + precision[idx].clone();
        }
    }
    ThresholdEval {
        ap: Some(sum / S::ratio(RECALL_POINTS, 1)),
        recall: Some(S::ratio(tp_total, n_gt)),
        true_positives: tp_total,
        false_positives: fp_total,
        ground_truth: n_gt,
    }
}

/// Evaluates one IoU threshold, bucket and per-image cap.
pub fn evaluate_detection<S: Scalar>(
    dataset: &Dataset,
    predictions: &PredictionSet,
    threshold: f64,
    bucket: SizeBucket,
    sizes: &SizeBuckets,
    max_dets: usize,
) -> ThresholdEval<S> {
    Prepared::<S>::new(dataset, predictions).eval(&S::from_decimal(threshold), bucket, sizes, max_dets)
}

/// Interpolated AP, averaged over the thresholds of `iou`.
pub fn detection_ap<S: Scalar>(
    dataset: &Dataset,
    predictions: &PredictionSet,
    iou: &IouSetting,
    bucket: SizeBucket,
    sizes: &SizeBuckets,
    max_dets: usize,
) -> Option<S> {
    let prepared = Prepared::<S>::new(dataset, predictions);
    let aps: Option<Vec<S>> = iou
        .thresholds()
        .iter()
        .map(|t| prepared.eval(&S::from_decimal(*t), bucket, sizes, max_dets).ap)
        .collect();
    mean(&aps?)
}

/// Recall with at most `max_dets` predictions per image, averaged over
/// the thresholds of `iou`.
pub fn detection_ar<S: Scalar>(
    dataset: &Dataset,
    predictions: &PredictionSet,
    iou: &IouSetting,
    bucket: SizeBucket,
    sizes: &SizeBuckets,
    max_dets: usize,
) -> Option<S> {
    let prepared = Prepared::<S>::new(dataset, predictions);
    let ars: Option<Vec<S>> = iou
        .thresholds()
        .iter()
        .map(|t| prepared.eval(&S::from_decimal(*t), bucket, sizes, max_dets).recall)
        .collect();
    mean(&ars?)
}

/// Full grid: AP for every configured single threshold and the range, AR
/// for the range; each over all size buckets and detection caps.
pub fn detection_report<S: Scalar>(
    dataset: &Dataset,
    predictions: &PredictionSet,
    cfg: &EvalConfig,
) -> DetectionReport<S> {
    let prepared = Prepared::<S>::new(dataset, predictions);
    let mut cache: HashMap<(i64, SizeBucket, usize), ThresholdEval<S>> = HashMap::new();
    let mut lookup = |t: f64, bucket: SizeBucket, m: usize| -> ThresholdEval<S> {
        let key = ((t * 1e6).round() as i64, bucket, m);
        cache
            .entry(key)
            .or_insert_with(|| prepared.eval(&S::from_decimal(t), bucket, &cfg.size_buckets, m))
            .clone()
    };

    let range = IouSetting::Range {
        start: cfg.iou_range_start,
        end: cfg.iou_range_end,
        step: cfg.iou_range_step,
    };
    let mut settings: Vec<IouSetting> = cfg
        .ap_thresholds
        .iter()
        .map(|t| IouSetting::Single { threshold: *t })
        .collect();
    settings.push(range);

    let mut rows = Vec::new();
    let mut push = |metric: DetMetric, iou: IouSetting, rows: &mut Vec<DetectionRow<S>>| {
        for bucket in SizeBucket::ALL {
            for &m in &cfg.max_dets {
                let values: Option<Vec<S>> = iou
                    .thresholds()
                    .iter()
                    .map(|t| {
                        let e = lookup(*t, bucket, m);
                        match metric {
                            DetMetric::Ap => e.ap,
                            DetMetric::Ar => e.recall,
                        }
                    })
                    .collect();
                rows.push(DetectionRow {
                    metric,
                    iou,
                    bucket,
                    max_dets: m,
                    value: values.and_then(|v| mean(&v)),
                });
            }
        }
    };
    for s in &settings {
        push(DetMetric::Ap, *s, &mut rows);
    }
    push(DetMetric::Ar, range, &mut rows);

    DetectionReport {
        rows,
        images: prepared.images.len(),
        ground_truth: prepared.ground_truth,
        predictions: prepared.predictions,
        predictions_on_unknown_images: prepared.unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ImageEntry, PredictionEntry};
    use crate::model::{SignAnnotation, SignPrediction};
    use crate::scalar::exact_ratio;
    use proptest::prelude::*;

    fn bbox(b: [f64; 4]) -> BBox {
        BBox::from_array(b).unwrap()
    }

    fn gt_image(id: &str, boxes: &[[f64; 4]]) -> ImageEntry {
        ImageEntry {
            image_id: id.into(),
            file: format!("{id}.png"),
            width: 1000,
            height: 1000,
            signs: boxes
                .iter()
                .enumerate()
                .map(|(i, b)| SignAnnotation {
                    sign_id: format!("s{i}"),
                    bbox: bbox(*b),
                    readable: true,
                    cues: vec![],
                })
                .collect(),
        }
    }

    fn preds(id: &str, boxes: &[([f64; 4], f64)]) -> PredictionEntry {
        PredictionEntry {
            image_id: id.into(),
            signs: boxes
                .iter()
                .map(|(b, c)| SignPrediction::new(bbox(*b), Some(*c)).unwrap())
                .collect(),
        }
    }

    fn single(t: f64) -> IouSetting {
        IouSetting::Single { threshold: t }
    }

    fn range() -> IouSetting {
        IouSetting::Range {
            start: 0.25,
            end: 0.75,
            step: 0.05,
        }
    }

    const SIZES: SizeBuckets = SizeBuckets {
        small_below: 1024.0,
        large_from: 9216.0,
    };

    // Independent 101-point AP: linear scans, float recall grid built as k/100.
    fn ap_oracle(flags: &[bool], n_gt: usize) -> f64 {
        let mut prec = Vec::new();
        let mut rec = Vec::new();
        let mut tp = 0;
        for (i, f) in flags.iter().enumerate() {
            if *f {
                tp += 1;
            }
            prec.push(tp as f64 / (i + 1) as f64);
            rec.push(tp as f64 / n_gt as f64);
        }
        let mut total = 0.0;
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            // interpolated precision: best precision at any recall >= r
            let best = (0..prec.len())
                .filter(|i| rec[*i] >= r - 1e-12)
                .map(|i| prec[i])
                .fold(0.0, f64::max);
            total += best;
        }
        total / 101.0
    }

    #[test]
    fn identical_prediction_is_perfect() {
        let ds = Dataset::new(vec![gt_image("a", &[[10.0, 10.0, 50.0, 50.0]])]);
        let ps = PredictionSet {
            entries: vec![preds("a", &[([10.0, 10.0, 50.0, 50.0], 0.9)])],
        };
        for iou in [single(0.5), single(0.75), range()] {
            let ap = detection_ap::<Exact>(&ds, &ps, &iou, SizeBucket::All, &SIZES, 100);
            assert_eq!(ap, Some(exact_ratio(1, 1)));
        }
        let ar = detection_ar::<Exact>(&ds, &ps, &range(), SizeBucket::All, &SIZES, 1);
        assert_eq!(ar, Some(exact_ratio(1, 1)));
    }

    #[test]
    fn trailing_false_positive_does_not_hurt_ap() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0]])]);
        let ps = PredictionSet {
            entries: vec![preds(
                "a",
                &[([0.0, 0.0, 10.0, 9.0], 0.9), ([100.0, 100.0, 110.0, 110.0], 0.8)],
            )],
        };
        let ap = detection_ap::<Exact>(&ds, &ps, &single(0.5), SizeBucket::All, &SIZES, 100);
        assert_eq!(ap, Some(exact_ratio(1, 1)));
    }

    #[test]
    fn no_predictions_is_zero_and_no_gt_is_undefined() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0]])]);
        let empty = PredictionSet::default();
        assert_eq!(
            detection_ap::<Exact>(&ds, &empty, &single(0.5), SizeBucket::All, &SIZES, 100),
            Some(exact_ratio(0, 1))
        );
        // the only box is small, so the large bucket is empty
        assert_eq!(
            detection_ap::<Exact>(&ds, &empty, &single(0.5), SizeBucket::Large, &SIZES, 100),
            None
        );
    }

    #[test]
    fn half_recall_across_range() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0], [50.0, 50.0, 60.0, 60.0]])]);
        let ps = PredictionSet {
            entries: vec![preds("a", &[([0.0, 0.0, 10.0, 9.0], 0.9)])],
        };
        let ar = detection_ar::<Exact>(&ds, &ps, &range(), SizeBucket::All, &SIZES, 100);
        assert_eq!(ar, Some(exact_ratio(1, 2)));
    }

    #[test]
    fn cap_applies_before_matching() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0]])]);
        let ps = PredictionSet {
            entries: vec![preds(
                "a",
                &[([200.0, 200.0, 210.0, 210.0], 0.9), ([0.0, 0.0, 10.0, 10.0], 0.5)],
            )],
        };
        let ar1 = detection_ar::<Exact>(&ds, &ps, &range(), SizeBucket::All, &SIZES, 1);
        let ar10 = detection_ar::<Exact>(&ds, &ps, &range(), SizeBucket::All, &SIZES, 10);
        assert_eq!(ar1, Some(exact_ratio(0, 1)));
        assert_eq!(ar10, Some(exact_ratio(1, 1)));
    }

    #[test]
    fn unknown_image_predictions_are_false_positives() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0]])]);
        let ps = PredictionSet {
            entries: vec![
                preds("a", &[([0.0, 0.0, 10.0, 10.0], 0.5)]),
                preds("zzz", &[([0.0, 0.0, 10.0, 10.0], 0.9)]),
            ],
        };
        let e = evaluate_detection::<Exact>(&ds, &ps, 0.5, SizeBucket::All, &SIZES, 100);
        assert_eq!((e.true_positives, e.false_positives), (1, 1));
        // ranking FP then TP: precision 1/2 at recall 1 everywhere
        assert_eq!(e.ap, Some(exact_ratio(1, 2)));
        let report = detection_report::<Exact>(&ds, &ps, &EvalConfig::default());
        assert_eq!(report.predictions_on_unknown_images, 1);
    }

    #[test]
    fn matches_to_out_of_bucket_gt_are_ignored() {
        // one small GT (area 100) and one medium GT (area 40*40 = 1600)
        let ds = Dataset::new(vec![gt_image(
            "a",
            &[[0.0, 0.0, 10.0, 10.0], [100.0, 100.0, 140.0, 140.0]],
        )]);
        let ps = PredictionSet {
            entries: vec![preds(
                "a",
                &[([0.0, 0.0, 10.0, 10.0], 0.9), ([100.0, 100.0, 140.0, 140.0], 0.8)],
            )],
        };
        let e = evaluate_detection::<Exact>(&ds, &ps, 0.5, SizeBucket::Medium, &SIZES, 100);
        assert_eq!((e.true_positives, e.false_positives, e.ground_truth), (1, 0, 1));
        assert_eq!(e.ap, Some(exact_ratio(1, 1)));
    }

    #[test]
    fn report_grid_shape_and_json_round_trip() {
        let ds = Dataset::new(vec![gt_image("a", &[[0.0, 0.0, 10.0, 10.0]])]);
        let ps = PredictionSet {
            entries: vec![preds("a", &[([0.0, 0.0, 10.0, 8.0], 0.9)])],
        };
        let r = detection_report::<Exact>(&ds, &ps, &EvalConfig::default());
        assert_eq!(r.rows.len(), (3 + 1) * 4 * 3);
        // IoU 0.8 passes every threshold up to 0.75
        let row = r.get(DetMetric::Ap, &range(), SizeBucket::All, 100).unwrap();
        assert_eq!(row.label(), "AP@[IoU=0.25:0.75]");
        assert_eq!(row.value, Some(exact_ratio(1, 1)));
        let text = serde_json::to_string(&r).unwrap();
        let back: DetectionReport<Exact> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn float_and_exact_agree() {
        let ds = Dataset::new(vec![
            gt_image("a", &[[0.0, 0.0, 10.0, 10.0], [20.0, 20.0, 30.0, 33.0]]),
            gt_image("b", &[[5.0, 5.0, 40.0, 40.0]]),
        ]);
        let ps = PredictionSet {
            entries: vec![
                preds("a", &[([1.0, 0.0, 10.0, 10.0], 0.3), ([20.0, 21.0, 30.0, 30.0], 0.7)]),
                preds("b", &[([5.0, 5.0, 30.0, 40.0], 0.6), ([0.0, 0.0, 3.0, 3.0], 0.65)]),
            ],
        };
        let cfg = EvalConfig::default();
        let exact = detection_report::<Exact>(&ds, &ps, &cfg);
        let float = detection_report::<f64>(&ds, &ps, &cfg);
        for (e, f) in exact.rows.iter().zip(&float.rows) {
            let (e, f) = (e.value.as_ref().map(|v| v.to_real()), f.value);
            assert!(e
                .zip(f)
                .map_or(e.is_none() && f.is_none(), |(e, f)| (e - f).abs() < 1e-9));
        }
    }

    proptest! {
        #[test]
        fn pr_summary_matches_oracle(flags in proptest::collection::vec(any::<bool>(), 0..30), extra in 0usize..5) {
            let n_gt = flags.iter().filter(|f| **f).count() + extra;
            prop_assume!(n_gt > 0);
            let got: ThresholdEval<Exact> = pr_summary(&flags, n_gt as u64);
            let got = got.ap.unwrap().to_real();
            prop_assert!((got - ap_oracle(&flags, n_gt)).abs() < 1e-9);
        }

        #[test]
        fn values_bounded_and_ar_monotone(
            gt in proptest::collection::vec((0u32..60, 0u32..60, 5u32..40, 5u32..40), 0..5),
            pr in proptest::collection::vec((0u32..60, 0u32..60, 5u32..40, 5u32..40, 1u32..100), 0..8),
        ) {
            let b = |(x, y, w, h): (u32, u32, u32, u32)| [x as f64, y as f64, (x + w) as f64, (y + h) as f64];
            let ds = Dataset::new(vec![gt_image("a", &gt.iter().map(|g| b(*g)).collect::<Vec<_>>())]);
            let ps = PredictionSet {
                entries: vec![preds("a", &pr.iter().map(|(x, y, w, h, c)| (b((*x, *y, *w, *h)), *c as f64 / 100.0)).collect::<Vec<_>>())],
            };
            let cfg = EvalConfig::default();
            let r = detection_report::<Exact>(&ds, &ps, &cfg);
            let zero = Exact::from_decimal(0.0);
            let one = Exact::from_decimal(1.0);
            for row in &r.rows {
                if let Some(v) = &row.value {
                    prop_assert!(*v >= zero && *v <= one);
                }
            }
            for bucket in SizeBucket::ALL {
                let ars: Vec<_> = cfg.max_dets.iter()
                    .map(|m| r.get(DetMetric::Ar, &range(), bucket, *m).unwrap().value.clone())
                    .collect();
                for w in ars.windows(2) {
                    if let (Some(a), Some(b)) = (&w[0], &w[1]) {
                        prop_assert!(a <= b);
                    }
                }
            }
        }

        #[test]
        fn ap_invariant_under_image_duplication(
            gt in proptest::collection::vec((0u32..60, 0u32..60, 5u32..40, 5u32..40), 1..4),
            pr in proptest::collection::vec((0u32..60, 0u32..60, 5u32..40, 5u32..40), 0..5),
        ) {
            let b = |(x, y, w, h): (u32, u32, u32, u32)| [x as f64, y as f64, (x + w) as f64, (y + h) as f64];
            let gtb: Vec<_> = gt.iter().map(|g| b(*g)).collect();
            // distinct confidences; the copy sits just below each original
            let p1: Vec<_> = pr.iter().enumerate().map(|(i, p)| (b(*p), 0.9 - i as f64 * 0.1)).collect();
            let p2: Vec<_> = pr.iter().enumerate().map(|(i, p)| (b(*p), 0.9 - i as f64 * 0.1 - 0.01)).collect();
            let one = Dataset::new(vec![gt_image("a", &gtb)]);
            let two = Dataset::new(vec![gt_image("a", &gtb), gt_image("b", &gtb)]);
            let ps1 = PredictionSet { entries: vec![preds("a", &p1)] };
            let ps2 = PredictionSet { entries: vec![preds("a", &p1), preds("b", &p2)] };
            let a1 = detection_ap::<Exact>(&one, &ps1, &single(0.5), SizeBucket::All, &SIZES, 100);
            let a2 = detection_ap::<Exact>(&two, &ps2, &single(0.5), SizeBucket::All, &SIZES, 100);
            prop_assert_eq!(a1, a2);
        }
    }
}
