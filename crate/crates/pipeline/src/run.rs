use std::fs;
use std::io::Cursor;
use std::sync::atomic::{AtomicU64, Ordering};

use image::{DynamicImage, ImageFormat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use signeval_core::dataset::{crop_sign, Dataset, DatasetError, ImageEntry, PredictionEntry, PredictionSet};
use signeval_core::model::{check_confidence, SignPrediction, DEFAULT_CONFIDENCE, SYNONYM_TABLE_VERSION};
use signeval_core::BBox;

use crate::backend::{BackendError, DetectorBackend, RecognizerBackend};
use crate::cache::{cache_key, ResponseCache};
use crate::parse::{parse_recognition_response, ParseDiagnostics};
use crate::prompt::{build_recognition_prompt, PROMPT_VERSION};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Concurrent backend calls.
    pub parallelism: usize,
    /// Detections below this confidence are not recognized.
    pub min_confidence: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            parallelism: 4,
            min_confidence: None,
        }
    }
}

/// Call counters; kept out of the manifest so replays stay byte-identical.
#[derive(Debug, Default)]
pub struct CallStats {
    detector_calls: AtomicU64,
    detector_cache_hits: AtomicU64,
    recognizer_calls: AtomicU64,
    recognizer_cache_hits: AtomicU64,
    failures: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub detector_calls: u64,
    pub detector_cache_hits: u64,
    pub recognizer_calls: u64,
    pub recognizer_cache_hits: u64,
    pub failed_calls: u64,
}

impl RunStats {
    /// True when backends were contacted and none answered usefully.
    pub fn all_backend_calls_failed(&self) -> bool {
        let calls = self.detector_calls + self.recognizer_calls;
        calls > 0 && self.failed_calls == calls
    }
}

impl CallStats {
    pub fn snapshot(&self) -> RunStats {
        RunStats {
            detector_calls: self.detector_calls.load(Ordering::Relaxed),
            detector_cache_hits: self.detector_cache_hits.load(Ordering::Relaxed),
            recognizer_calls: self.recognizer_calls.load(Ordering::Relaxed),
            recognizer_cache_hits: self.recognizer_cache_hits.load(Ordering::Relaxed),
            failed_calls: self.failures.load(Ordering::Relaxed),
        }
    }
}

#[derive(Deserialize)]
struct DetectorResponse {
    boxes: Vec<[f64; 4]>,
    #[serde(default)]
    scores: Option<Vec<f64>>,
}

/// Turns a detector response body into predictions: boxes clipped to the
/// image, missing scores defaulted, sorted by confidence (stable).
pub fn parse_detector_response(raw: &str, width: u32, height: u32) -> Result<Vec<SignPrediction>, BackendError> {
    let resp: DetectorResponse =
        serde_json::from_str(raw).map_err(|e| BackendError::Malformed(format!("detector response: {e}")))?;
    if let Some(s) = &resp.scores {
        if s.len() != resp.boxes.len() {
            return Err(BackendError::Malformed(format!(
                "{} boxes but {} scores",
                resp.boxes.len(),
                s.len()
            )));
        }
    }
    let mut preds = Vec::new();
    for (i, b) in resp.boxes.iter().enumerate() {
        let score = resp.scores.as_ref().map_or(DEFAULT_CONFIDENCE, |s| s[i]);
        let confidence = check_confidence(score).map_err(|e| BackendError::Malformed(e.to_string()))?;
        let clipped = [
            b[0].clamp(0.0, width as f64),
            b[1].clamp(0.0, height as f64),
            b[2].clamp(0.0, width as f64),
            b[3].clamp(0.0, height as f64),
        ];
        if b.iter().any(|v| !v.is_finite()) {
            return Err(BackendError::Malformed(format!("box {i} has non-finite coordinates")));
        }
        if clipped != *b {
            log::warn!("detector box {b:?} clipped to {width}x{height} image");
        }
        match BBox::from_array(clipped) {
            Ok(bbox) => preds.push(SignPrediction {
                sign_id: None,
                bbox,
                confidence,
                cues: Vec::new(),
            }),
            Err(_) => log::warn!("detector box {b:?} has no area inside the image; dropped"),
        }
    }
    // sort_by is stable, so equal confidences keep detector order
    preds.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    Ok(preds)
}

/// Which counters a cached call feeds.
#[derive(Clone, Copy)]
enum Stage {
    Detector,
    Recognizer,
}

fn cached_call(
    cache: Option<&ResponseCache>,
    key: &str,
    stats: &CallStats,
    stage: Stage,
    call: impl FnOnce() -> Result<String, BackendError>,
    accept: impl Fn(&str) -> Result<(), BackendError>,
) -> Result<String, BackendError> {
    let (calls, hits) = match stage {
        Stage::Detector => (&stats.detector_calls, &stats.detector_cache_hits),
        Stage::Recognizer => (&stats.recognizer_calls, &stats.recognizer_cache_hits),
    };
    if let Some(c) = cache {
        match c.get(key) {
            Ok(Some(hit)) => {
                hits.fetch_add(1, Ordering::Relaxed);
                return Ok(hit);
            }
            Ok(None) => {}
            Err(e) => log::warn!("cache read {key} failed: {e}"),
        }
    }
    calls.fetch_add(1, Ordering::Relaxed);
    let result = call().and_then(|r| accept(&r).map(|_| r));
    match &result {
        Ok(r) => {
            if let Some(c) = cache {
                if let Err(e) = c.put(key, r) {
                    log::warn!("cache write {key} failed: {e}");
                }
            }
        }
        Err(_) => {
            stats.failures.fetch_add(1, Ordering::Relaxed);
        }
    }
    result
}

/// Runs the detector on one encoded image, without caching.
pub fn detect(
    backend: &dyn DetectorBackend,
    image_bytes: &[u8],
    width: u32,
    height: u32,
) -> Result<Vec<SignPrediction>, BackendError> {
    parse_detector_response(&backend.detect_raw(image_bytes)?, width, height)
}

/// PNG encoding used for crops sent to recognizers and for cache keys.
pub fn encode_png(image: &DynamicImage) -> Vec<u8> {
    let mut buf = Vec::new();
    image
        .write_to(&mut Cursor::new(&mut buf), ImageFormat::Png)
        .expect("in-memory PNG encoding");
    buf
}

/// Sends one crop with the pinned prompt; returns the text verbatim.
pub fn recognize(backend: &dyn RecognizerBackend, crop: &DynamicImage) -> Result<String, BackendError> {
    if crop.width() == 0 || crop.height() == 0 {
        return Err(BackendError::Malformed("empty crop".into()));
    }
    backend.recognize_raw(&encode_png(crop), &build_recognition_prompt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackendInfo {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignRecord {
    pub sign_id: String,
    pub cache_key: String,
    pub cues: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<ParseDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageRecord {
    pub image_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector_cache_key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub signs: Vec<SignRecord>,
}

/// Provenance of a run. Contains nothing that differs between a live run
/// and its cache replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub mode: String,
    pub prompt_version: String,
    pub synonym_table_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector: Option<BackendInfo>,
    pub recognizer: BackendInfo,
    pub options: RunOptions,
    pub images: Vec<ImageRecord>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub predictions: PredictionSet,
    pub manifest: RunManifest,
    pub stats: RunStats,
}

struct Ctx<'a> {
    dataset: &'a Dataset,
    recognizer: &'a dyn RecognizerBackend,
    cache: Option<&'a ResponseCache>,
    stats: CallStats,
    prompt: String,
}

impl Ctx<'_> {
    fn load(&self, entry: &ImageEntry) -> Result<(Vec<u8>, DynamicImage), DatasetError> {
        let path = self.dataset.image_path(entry);
        let bytes = fs::read(&path).map_err(|source| DatasetError::Io {
            path: path.clone(),
            source,
        })?;
        let img = image::load_from_memory(&bytes).map_err(|e| DatasetError::Image {
            path,
            message: e.to_string(),
        })?;
        if (img.width(), img.height()) != (entry.width, entry.height) {
            log::warn!(
                "image {} is {}x{} but annotated as {}x{}",
                entry.image_id,
                img.width(),
                img.height(),
                entry.width,
                entry.height
            );
        }
        Ok((bytes, img))
    }

    /// Crop, recognize (cache first) and parse one sign.
    fn recognize_sign(
        &self,
        img: &DynamicImage,
        sign_id: String,
        mut pred: SignPrediction,
    ) -> (SignPrediction, SignRecord) {
        let crop = match crop_sign(img, &pred.bbox) {
            Ok((c, _)) => c,
            Err(e) => {
                let record = SignRecord {
                    sign_id: sign_id.clone(),
                    cache_key: String::new(),
                    cues: 0,
                    error: Some(e.to_string()),
                    diagnostics: None,
                };
                pred.sign_id = Some(sign_id);
                return (pred, record);
            }
        };
        let png = encode_png(&crop);
        let key = cache_key(&png, &self.prompt, self.recognizer.model_id());
        let result = cached_call(
            self.cache,
            &key,
            &self.stats,
            Stage::Recognizer,
            || self.recognizer.recognize_raw(&png, &self.prompt),
            |_| Ok(()),
        );
        let (cues, diagnostics, error) = match result {
            Ok(raw) => {
                let (cues, diag) = parse_recognition_response(&raw);
                (cues, Some(diag), None)
            }
            Err(e) => {
                log::warn!("recognition of {sign_id} failed: {e}");
                (Vec::new(), None, Some(e.to_string()))
            }
        };
        let record = SignRecord {
            sign_id: sign_id.clone(),
            cache_key: key,
            cues: cues.len(),
            error,
            diagnostics,
        };
        pred.sign_id = Some(sign_id);
        pred.cues = cues;
        (pred, record)
    }

    fn finish(self, mut results: Vec<(PredictionEntry, ImageRecord)>, manifest: RunManifest) -> RunOutput {
        results.sort_by(|a, b| a.0.image_id.cmp(&b.0.image_id));
        let (entries, images): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        RunOutput {
            predictions: PredictionSet { entries },
            manifest: RunManifest { images, ..manifest },
            stats: self.stats.snapshot(),
        }
    }
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))
}

fn recognizer_info(r: &dyn RecognizerBackend) -> BackendInfo {
    BackendInfo {
        model: r.model_id().to_string(),
        query: None,
        temperature: Some(r.temperature()),
    }
}

/// Detect, crop, recognize and parse every image. Backend failures are
/// recorded per image or sign; only dataset I/O aborts the run.
pub fn run_end_to_end(
    dataset: &Dataset,
    detector: &dyn DetectorBackend,
    recognizer: &dyn RecognizerBackend,
    cache: Option<&ResponseCache>,
    options: RunOptions,
) -> Result<RunOutput, RunError> {
    let ctx = Ctx {
        dataset,
        recognizer,
        cache,
        stats: CallStats::default(),
        prompt: build_recognition_prompt(),
    };
    let per_image = |entry: &ImageEntry| -> Result<(PredictionEntry, ImageRecord), RunError> {
        let (bytes, img) = ctx.load(entry)?;
        let key = cache_key(&bytes, detector.query(), detector.model_id());
        let (w, h) = (img.width(), img.height());
        let raw = cached_call(
            ctx.cache,
            &key,
            &ctx.stats,
            Stage::Detector,
            || detector.detect_raw(&bytes),
            |r| parse_detector_response(r, w, h).map(|_| ()),
        );
        let detections = raw.and_then(|r| parse_detector_response(&r, w, h));
        let mut record = ImageRecord {
            image_id: entry.image_id.clone(),
            detector_cache_key: Some(key),
            error: None,
            signs: Vec::new(),
        };
        let preds = match detections {
            Ok(p) => p,
            Err(e) => {
                log::warn!("detection on {} failed: {e}", entry.image_id);
                record.error = Some(e.to_string());
                Vec::new()
            }
        };
        let kept: Vec<SignPrediction> = preds
            .into_iter()
            .filter(|p| options.min_confidence.is_none_or(|t| p.confidence >= t))
            .collect();
        let (signs, records): (Vec<_>, Vec<_>) = kept
            .into_par_iter()
            .enumerate()
            .map(|(rank, p)| ctx.recognize_sign(&img, format!("det-{rank}"), p))
            .unzip();
        record.signs = records;
        Ok((
            PredictionEntry {
                image_id: entry.image_id.clone(),
                signs,
            },
            record,
        ))
    };
    let results = pool(options.parallelism)?
        .install(|| dataset.entries.par_iter().map(per_image).collect::<Result<Vec<_>, _>>())?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        mode: "end-to-end".into(),
        prompt_version: PROMPT_VERSION.into(),
        synonym_table_version: SYNONYM_TABLE_VERSION.into(),
        detector: Some(BackendInfo {
            model: detector.model_id().to_string(),
            query: Some(detector.query().to_string()),
            temperature: None,
        }),
        recognizer: recognizer_info(recognizer),
        options,
        images: Vec::new(),
    };
    Ok(ctx.finish(results, manifest))
}

/// Recognition on annotated crops: every readable sign's ground-truth box
/// is cropped and parsed, and the prediction keeps the annotated sign id.
pub fn run_recognition(
    dataset: &Dataset,
    recognizer: &dyn RecognizerBackend,
    cache: Option<&ResponseCache>,
    options: RunOptions,
) -> Result<RunOutput, RunError> {
    let ctx = Ctx {
        dataset,
        recognizer,
        cache,
        stats: CallStats::default(),
        prompt: build_recognition_prompt(),
    };
    let per_image = |entry: &ImageEntry| -> Result<(PredictionEntry, ImageRecord), RunError> {
        let (_, img) = ctx.load(entry)?;
        let (signs, records): (Vec<_>, Vec<_>) = entry
            .signs
            .par_iter()
            .filter(|s| s.readable)
            .map(|s| {
                let pred = SignPrediction {
                    sign_id: None,
                    bbox: s.bbox.clone(),
                    confidence: DEFAULT_CONFIDENCE,
                    cues: Vec::new(),
                };
                ctx.recognize_sign(&img, s.sign_id.clone(), pred)
            })
            .unzip();
        Ok((
            PredictionEntry {
                image_id: entry.image_id.clone(),
                signs,
            },
            ImageRecord {
                image_id: entry.image_id.clone(),
                detector_cache_key: None,
                error: None,
                signs: records,
            },
        ))
    };
    let results = pool(options.parallelism)?
        .install(|| dataset.entries.par_iter().map(per_image).collect::<Result<Vec<_>, _>>())?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        mode: "recognition".into(),
        prompt_version: PROMPT_VERSION.into(),
        synonym_table_version: SYNONYM_TABLE_VERSION.into(),
        detector: None,
        recognizer: recognizer_info(recognizer),
        options,
        images: Vec::new(),
    };
    Ok(ctx.finish(results, manifest))
}
