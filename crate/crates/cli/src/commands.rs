use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};

use signeval_core::dataset::{
    load_ground_truth, load_ground_truth_lenient, load_predictions, validate_dataset, write_predictions, Dataset,
    PredictionSet, ValidationReport,
};
use signeval_core::matching::{EmbeddingProvider, MockBigramEmbedder, MOCK_EMBEDDER_ID};
use signeval_core::metrics::{detection_report, e2e_sign_metrics, evaluate_recognition};
use signeval_core::model::EvalConfig;
use signeval_core::report::{render_json, render_report, Format, RunResult};
use signeval_core::{EmbedError, Exact};
use signeval_pipeline::{
    run_end_to_end, run_recognition, HttpDetector, HttpEmbeddingProvider, HttpRecognizer, ResponseCache, RunError,
    RunOptions, RunOutput, DEFAULT_DETECTION_QUERY,
};

use crate::config::FileConfig;
use crate::{Cli, Command, CueArgs, EvalInputs, RunMode};

pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_UNAVAILABLE: u8 = 3;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }

    fn unavailable(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_UNAVAILABLE,
            error: error.into(),
        }
    }
}

impl From<EmbedError> for Failure {
    fn from(e: EmbedError) -> Self {
        Failure::unavailable(e)
    }
}

type Outcome = Result<u8, Failure>;

pub fn dispatch(cli: &Cli) -> Outcome {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::input)?,
        None => FileConfig::default(),
    };
    let format = Format::from(cli.format);
    match &cli.command {
        Command::Validate { dataset } => validate(dataset, format),
        Command::EvalDet { inputs } => {
            let cfg = checked(file.eval.clone())?;
            let (gt, pred) = load_inputs(inputs)?;
            let mut result = RunResult::new(cfg);
            result.detection = Some(detection_report::<Exact>(&gt, &pred, &result.config));
            emit(&result, inputs.out.as_deref(), format)
        }
        Command::EvalRec { inputs, cues } => {
            let cfg = checked(apply_cue_args(file.eval.clone(), cues))?;
            let provider = embedder(&cfg, &file, cues)?;
            let (gt, pred) = load_inputs(inputs)?;
            let mut result = RunResult::new(cfg);
            let report = evaluate_recognition(&gt, &pred, &result.config, provider.as_ref())?;
            if report.predictions_excluded > 0 {
                result.diagnostics.push(format!(
                    "{} prediction(s) did not name a readable annotated sign and were ignored",
                    report.predictions_excluded
                ));
            }
            result.recognition = Some(report);
            emit(&result, inputs.out.as_deref(), format)
        }
        Command::EvalE2e {
            inputs,
            cues,
            iou,
            count_unmatched,
        } => {
            let mut cfg = apply_cue_args(file.eval.clone(), cues);
            if let Some(t) = iou {
                cfg.e2e_iou = *t;
            }
            cfg.e2e_count_unmatched |= *count_unmatched;
            let cfg = checked(cfg)?;
            let provider = embedder(&cfg, &file, cues)?;
            let (gt, pred) = load_inputs(inputs)?;
            let mut result = RunResult::new(cfg);
            result.e2e = Some(e2e_sign_metrics(&gt, &pred, &result.config, provider.as_ref())?);
            emit(&result, inputs.out.as_deref(), format)
        }
        Command::Run { .. } => run(cli, &file),
        Command::Report { result } => {
            let text = fs::read_to_string(result)
                .with_context(|| format!("cannot read {}", result.display()))
                .map_err(Failure::input)?;
            let parsed: RunResult = serde_json::from_str(&text)
                .with_context(|| format!("{} is not a result file", result.display()))
                .map_err(Failure::input)?;
            print!("{}", render_report(&parsed, format));
            Ok(0)
        }
    }
}

fn checked(cfg: EvalConfig) -> Result<EvalConfig, Failure> {
    cfg.validate()
        .map_err(|e| Failure::input(anyhow!("invalid configuration: {e}")))?;
    Ok(cfg)
}

fn apply_cue_args(mut cfg: EvalConfig, cues: &CueArgs) -> EvalConfig {
    if let Some(m) = cues.mode {
        cfg.text_mode = m.into();
    }
    if let Some(t) = cues.symbol_threshold {
        cfg.symbol_threshold = t;
    }
    if let Some(e) = &cues.embedder {
        cfg.embedder = e.clone();
    }
    cfg
}

fn embedder(cfg: &EvalConfig, file: &FileConfig, cues: &CueArgs) -> Result<Box<dyn EmbeddingProvider>, Failure> {
    if cfg.embedder == MOCK_EMBEDDER_ID {
        return Ok(Box::new(MockBigramEmbedder));
    }
    let url = cues
        .embedder_url
        .as_deref()
        .or(file.embedder.endpoint.as_deref())
        .ok_or_else(|| {
            Failure::unavailable(anyhow!(
                "embedder {:?} has no endpoint; pass --embedder-url or set [embedder] endpoint",
                cfg.embedder
            ))
        })?;
    Ok(Box::new(HttpEmbeddingProvider::new(url, &cfg.embedder)))
}

fn load_inputs(inputs: &EvalInputs) -> Result<(Dataset, PredictionSet), Failure> {
    let gt = load_ground_truth(&inputs.gt).map_err(Failure::input)?;
    let pred = load_predictions(&inputs.pred).map_err(Failure::input)?;
    Ok((gt, pred))
}

fn emit(result: &RunResult, out: Option<&Path>, format: Format) -> Outcome {
    if let Some(path) = out {
        fs::write(path, render_json(result))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::input)?;
    }
    for d in &result.diagnostics {
        log::warn!("{d}");
    }
    print!("{}", render_report(result, format));
    Ok(0)
}

fn validate(path: &Path, format: Format) -> Outcome {
    let (dataset, mut violations) = load_ground_truth_lenient(path).map_err(Failure::input)?;
    let mut report = validate_dataset(&dataset);
    violations.append(&mut report.violations);
    violations.sort_by(|a, b| a.pointer.cmp(&b.pointer));
    violations.dedup();
    report.violations = violations;
    print!("{}", render_validation(&report, format));
    Ok(if report.is_clean() { 0 } else { EXIT_FINDINGS })
}

fn render_validation(report: &ValidationReport, format: Format) -> String {
    let s = &report.summary;
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
        }
        Format::Csv => {
            out.push_str("pointer,code,message\n");
            for v in &report.violations {
                let code = serde_json::to_value(v.code).expect("code serializes");
                let _ = writeln!(
                    out,
                    "{},{},\"{}\"",
                    v.pointer,
                    code.as_str().unwrap_or_default(),
                    v.message.replace('"', "\"\"")
                );
            }
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "images {}  signs {}  readable {}  cues {}",
                s.images, s.signs, s.readable_signs, s.cues
            );
            let kinds: Vec<String> = s.cues_by_kind.iter().map(|(k, n)| format!("{k}={n}")).collect();
            let _ = writeln!(out, "by kind: {}", kinds.join(" "));
            let dirs: Vec<String> = s.cues_by_direction.iter().map(|(k, n)| format!("{k}={n}")).collect();
            let _ = writeln!(out, "by direction: {}", dirs.join(" "));
            if report.is_clean() {
                out.push_str("no violations\n");
            } else {
                let _ = writeln!(out, "{} violation(s):", report.violations.len());
                for v in &report.violations {
                    let _ = writeln!(out, "  {}: {}", v.pointer, v.message);
                }
            }
        }
    }
    out
}

fn run(cli: &Cli, file: &FileConfig) -> Outcome {
    let Command::Run {
        dataset,
        out,
        mode,
        cache,
        parallelism,
        min_confidence,
        detector_url,
        detector_model,
        detector_query,
        recognizer_url,
        recognizer_model,
    } = &cli.command
    else {
        unreachable!("run called for another command");
    };
    let ds = load_ground_truth(dataset).map_err(Failure::input)?;
    let mut options = RunOptions::default();
    if let Some(p) = parallelism.or(file.run.parallelism) {
        options.parallelism = p;
    }
    options.min_confidence = min_confidence.or(file.run.min_confidence);
    let cache_dir: Option<PathBuf> = cache.clone().or_else(|| file.run.cache_dir.clone());
    let cache = cache_dir
        .map(|d| ResponseCache::open(&d).with_context(|| format!("cannot open cache {}", d.display())))
        .transpose()
        .map_err(Failure::input)?;

    let required = |flag: Option<&String>, conf: Option<&String>, what: &str| {
        flag.or(conf)
            .cloned()
            .ok_or_else(|| Failure::input(anyhow!("{what} is required (flag or config file)")))
    };
    let mut recognizer = HttpRecognizer::new(
        &required(
            recognizer_url.as_ref(),
            file.recognizer.endpoint.as_ref(),
            "--recognizer-url",
        )?,
        &required(
            recognizer_model.as_ref(),
            file.recognizer.model.as_ref(),
            "--recognizer-model",
        )?,
    );
    if let Some(t) = file.recognizer.temperature {
        recognizer = recognizer.with_temperature(t);
    }

    let output = match mode {
        RunMode::EndToEnd => {
            let query = detector_query
                .clone()
                .or_else(|| file.detector.query.clone())
                .unwrap_or_else(|| DEFAULT_DETECTION_QUERY.to_string());
            let detector = HttpDetector::new(
                &required(detector_url.as_ref(), file.detector.endpoint.as_ref(), "--detector-url")?,
                &required(
                    detector_model.as_ref(),
                    file.detector.model.as_ref(),
                    "--detector-model",
                )?,
                &query,
            );
            run_end_to_end(&ds, &detector, &recognizer, cache.as_ref(), options)
        }
        RunMode::Recognition => run_recognition(&ds, &recognizer, cache.as_ref(), options),
    }
    .map_err(|e: RunError| Failure::input(e))?;

    write_run(out, &output)?;
    let s = &output.stats;
    let signs: usize = output.predictions.entries.iter().map(|e| e.signs.len()).sum();
    if !cli.quiet {
        eprintln!(
            "{} image(s), {signs} sign(s); detector {} call(s) {} cached, recognizer {} call(s) {} cached, {} failed",
            output.predictions.entries.len(),
            s.detector_calls,
            s.detector_cache_hits,
            s.recognizer_calls,
            s.recognizer_cache_hits,
            s.failed_calls
        );
    }
    if s.all_backend_calls_failed() {
        return Err(Failure::unavailable(anyhow!(
            "all {} backend call(s) failed; predictions were still written to {}",
            s.failed_calls,
            out.display()
        )));
    }
    Ok(0)
}

fn write_run(out: &Path, output: &RunOutput) -> Result<(), Failure> {
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(Failure::input)?;
    write_predictions(out, &output.predictions).map_err(Failure::input)?;
    let write = |name: &str, body: String| {
        let path = dir.join(name);
        fs::write(&path, body)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::input)
    };
    write("manifest.json", output.manifest.to_json())?;
    let mut stats = serde_json::to_string_pretty(&output.stats).expect("stats serialize");
    stats.push('\n');
    write("run_stats.json", stats)
}
