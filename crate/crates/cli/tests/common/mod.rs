//! Synthetic dataset and HTTP stubs that answer with its ground truth.
#![allow(dead_code)]

use std::collections::HashMap;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use image::{Rgb, RgbImage};
use serde_json::{json, Value};

pub struct SignSpec {
    pub bbox: [u32; 4],
    pub readable: bool,
    pub cues: Value,
}

pub struct ImageSpec {
    pub id: &'static str,
    pub width: u32,
    pub height: u32,
    pub signs: Vec<SignSpec>,
}

fn sign(bbox: [u32; 4], readable: bool, cues: Value) -> SignSpec {
    SignSpec { bbox, readable, cues }
}

/// Four images of distinct sizes; boxes cover the S, M and L buckets,
/// text and symbol cues, and one unreadable sign.
pub fn specs() -> Vec<ImageSpec> {
    vec![
        ImageSpec {
            id: "atrium",
            width: 320,
            height: 240,
            signs: vec![
                sign(
                    [10, 10, 130, 110],
                    true,
                    json!([
                        {"place": "Ward 63", "kind": "text", "direction": "left"},
                        {"place": "Pharmacy", "kind": "text", "direction": "left"},
                        {"place": "Lift", "kind": "symbol", "direction": "straight"}
                    ]),
                ),
                sign(
                    [200, 150, 220, 170],
                    true,
                    json!([{"place": "Exit", "kind": "text", "direction": "right"}]),
                ),
            ],
        },
        ImageSpec {
            id: "concourse",
            width: 300,
            height: 200,
            signs: vec![
                sign(
                    [20, 20, 80, 60],
                    true,
                    json!([
                        {"place": "Gate 4", "kind": "text", "direction": "straight-left"},
                        {"place": "Toilets", "kind": "symbol", "direction": "back-right"}
                    ]),
                ),
                sign([150, 40, 190, 70], false, json!([])),
            ],
        },
        ImageSpec {
            id: "lobby",
            width: 256,
            height: 256,
            signs: vec![sign(
                [30, 30, 140, 140],
                true,
                json!([{"place": "Reception", "kind": "text", "direction": "no-direction"}]),
            )],
        },
        ImageSpec {
            id: "platform",
            width: 240,
            height: 180,
            signs: vec![
                sign(
                    [5, 5, 45, 35],
                    true,
                    json!([{"place": "Taxi", "kind": "symbol", "direction": "back"}]),
                ),
                sign(
                    [100, 60, 160, 120],
                    true,
                    json!([
                        {"place": "Platform 2", "kind": "text", "direction": "straight-right"},
                        {"place": "Platform 3", "kind": "text", "direction": "straight-right"}
                    ]),
                ),
            ],
        },
    ]
}

fn color(index: usize) -> [u8; 3] {
    [(index * 23 % 200) as u8, (60 + index * 31) as u8, 128]
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub gt: PathBuf,
    pub images: Vec<ImageSpec>,
}

impl Fixture {
    pub fn build() -> Fixture {
        let dir = tempfile::tempdir().unwrap();
        let images = specs();
        let mut entries = Vec::new();
        let mut index = 0;
        for spec in &images {
            let mut img = RgbImage::from_pixel(spec.width, spec.height, Rgb([250, 250, 250]));
            let mut signs = Vec::new();
            for s in &spec.signs {
                let [x0, y0, x1, y1] = s.bbox;
                for y in y0..y1 {
                    for x in x0..x1 {
                        img.put_pixel(x, y, Rgb(color(index)));
                    }
                }
                signs.push(json!({
                    "sign_id": format!("{}-{index}", spec.id),
                    "bbox": s.bbox,
                    "readable": s.readable,
                    "cues": s.cues,
                }));
                index += 1;
            }
            let file = format!("{}.png", spec.id);
            img.save(dir.path().join(&file)).unwrap();
            entries.push(json!({
                "image_id": spec.id,
                "file": file,
                "width": spec.width,
                "height": spec.height,
                "signs": signs,
            }));
        }
        let gt = dir.path().join("ground_truth.json");
        std::fs::write(
            &gt,
            serde_json::to_string_pretty(&json!({ "images": entries })).unwrap(),
        )
        .unwrap();
        Fixture { dir, gt, images }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Detector replies keyed by image dimensions.
    fn detector_answers(&self) -> HashMap<(u32, u32), String> {
        self.images
            .iter()
            .map(|s| {
                let boxes: Vec<_> = s.signs.iter().map(|g| g.bbox).collect();
                let scores: Vec<f64> = (0..boxes.len()).map(|i| 0.9 - 0.1 * i as f64).collect();
                (
                    (s.width, s.height),
                    json!({ "boxes": boxes, "scores": scores }).to_string(),
                )
            })
            .collect()
    }

    /// Recognizer replies keyed by the sign's fill colour.
    fn recognizer_answers(&self) -> HashMap<[u8; 3], String> {
        self.images
            .iter()
            .flat_map(|s| &s.signs)
            .enumerate()
            .map(|(i, s)| {
                let text = format!(
                    "Reading the sign:\n```json\n{}\n```",
                    serde_json::to_string_pretty(&s.cues).unwrap()
                );
                (color(i), text)
            })
            .collect()
    }

    pub fn detector_stub(&self) -> Stub {
        let answers = self.detector_answers();
        Stub::spawn(move |body| {
            let img = decode(&body)?;
            answers.get(&(img.width(), img.height())).cloned()
        })
    }

    pub fn recognizer_stub(&self) -> Stub {
        let answers = self.recognizer_answers();
        Stub::spawn(move |body| {
            let img = decode(&body)?.to_rgb8();
            let c = img.get_pixel(img.width() / 2, img.height() / 2).0;
            answers.get(&c).map(|t| json!({ "text": t }).to_string())
        })
    }
}

fn decode(body: &Value) -> Option<image::DynamicImage> {
    let bytes = B64.decode(body["image_b64"].as_str()?).ok()?;
    image::load_from_memory(&bytes).ok()
}

/// Minimal JSON endpoint on localhost. Unknown inputs get a 404.
pub struct Stub {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
    server: Arc<tiny_http::Server>,
    worker: Option<JoinHandle<()>>,
}

impl Stub {
    pub fn spawn(answer: impl Fn(Value) -> Option<String> + Send + 'static) -> Stub {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let port = server.server_addr().to_ip().unwrap().port();
        let hits = Arc::new(AtomicUsize::new(0));
        let (srv, counter) = (server.clone(), hits.clone());
        let worker = std::thread::spawn(move || {
            for mut req in srv.incoming_requests() {
                counter.fetch_add(1, Ordering::SeqCst);
                let mut text = String::new();
                let _ = req.as_reader().read_to_string(&mut text);
                let reply = serde_json::from_str(&text).ok().and_then(&answer);
                let resp = match reply {
                    Some(body) => tiny_http::Response::from_string(body).with_status_code(200),
                    None => tiny_http::Response::from_string("unknown input").with_status_code(404),
                };
                let _ = req.respond(resp);
            }
        });
        Stub {
            url: format!("http://127.0.0.1:{port}/"),
            hits,
            server,
            worker: Some(worker),
        }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

impl Drop for Stub {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

/// A localhost URL with nothing listening behind it.
pub fn dead_url() -> String {
    let l = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = l.local_addr().unwrap().port();
    drop(l);
    format!("http://127.0.0.1:{port}/")
}

pub fn signeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signeval"))
        .args(args)
        .env_remove("SIGNEVAL_DETECTOR_KEY")
        .env_remove("SIGNEVAL_RECOGNIZER_KEY")
        .env_remove("SIGNEVAL_EMBEDDER_KEY")
        .output()
        .expect("signeval binary runs")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// `signeval run` against the given endpoints, writing into `out`.
pub fn run_cli(fx: &Fixture, out: &Path, cache: &Path, mode: &str, det: &str, rec: &str) -> Output {
    signeval(&[
        "run",
        "--dataset",
        s(&fx.gt),
        "--out",
        s(out),
        "--cache",
        s(cache),
        "--mode",
        mode,
        "--detector-url",
        det,
        "--detector-model",
        "stub-detector",
        "--recognizer-url",
        rec,
        "--recognizer-model",
        "stub-vlm",
    ])
}

fn fraction_is_one(v: &Value) -> bool {
    v["num"] == v["den"] && v["den"].as_u64().unwrap_or(0) > 0
}

/// Every defined fraction under `v` equals one; returns how many were checked.
fn all_defined_fractions_one(v: &Value, path: &str, failures: &mut Vec<String>) -> usize {
    match v {
        Value::Object(map) if map.contains_key("num") && map.contains_key("den") => {
            if map["den"].as_u64() == Some(0) {
                0
            } else {
                if !fraction_is_one(v) {
                    failures.push(format!("{path} = {}/{}", map["num"], map["den"]));
                }
                1
            }
        }
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| all_defined_fractions_one(x, &format!("{path}.{k}"), failures))
            .sum(),
        _ => 0,
    }
}

/// Drives `run` against echoing stubs, then scores the output with the
/// three evaluation commands. Returns a one-line summary.
pub fn closed_loop() -> Result<String, String> {
    let fx = Fixture::build();
    let (det, rec) = (fx.detector_stub(), fx.recognizer_stub());
    let e2e_pred = fx.path("e2e/predictions.json");
    let rec_pred = fx.path("rec/predictions.json");
    for (out, mode) in [(&e2e_pred, "end-to-end"), (&rec_pred, "recognition")] {
        let o = run_cli(&fx, out, &fx.path("cache"), mode, &det.url, &rec.url);
        if !o.status.success() {
            return Err(format!("run {mode} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    let gt = s(&fx.gt);

    let det_json = stdout_json(&signeval(&[
        "eval-det",
        "--gt",
        gt,
        "--pred",
        s(&e2e_pred),
        "--format",
        "json",
    ]));
    // A cap below the number of signs in an image cannot reach full recall,
    // so only caps that can hold every sign are required to score 1.
    let per_image = fx.images.iter().map(|i| i.signs.len()).max().unwrap_or(0) as u64;
    let rows: Vec<&Value> = det_json["detection"]["rows"]
        .as_array()
        .ok_or("no detection rows")?
        .iter()
        .filter(|r| r["max_dets"].as_u64().unwrap_or(0) >= per_image)
        .collect();
    let defined: Vec<&Value> = rows.iter().copied().filter(|r| !r["value"].is_null()).collect();
    if defined.len() != rows.len() {
        return Err(format!("{} detection rows undefined", rows.len() - defined.len()));
    }
    if let Some(r) = defined.iter().find(|r| r["exact"] != "1") {
        return Err(format!(
            "detection row {} {} max_dets {} = {}",
            r["label"], r["area"], r["max_dets"], r["exact"]
        ));
    }

    let rec_json = stdout_json(&signeval(&[
        "eval-rec",
        "--gt",
        gt,
        "--pred",
        s(&rec_pred),
        "--format",
        "json",
    ]));
    let mut failures = Vec::new();
    let rec_checked = all_defined_fractions_one(&rec_json["recognition"], "recognition", &mut failures);
    if rec_json["recognition"]["signs_without_prediction"] != 0 {
        failures.push("recognition has signs without prediction".into());
    }

    let e2e_json = stdout_json(&signeval(&[
        "eval-e2e",
        "--gt",
        gt,
        "--pred",
        s(&e2e_pred),
        "--format",
        "json",
    ]));
    for key in ["precision_sign", "recall_sign"] {
        if !fraction_is_one(&e2e_json["e2e"][key]) {
            failures.push(format!("e2e {key} = {}", e2e_json["e2e"][key]));
        }
    }
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    Ok(format!(
        "{} detection rows = 1, {rec_checked} recognition ratios = 1, Precision_sign = Recall_sign = {}",
        rows.len(),
        e2e_json["e2e"]["precision_sign"]["value"]
    ))
}

/// Cold run against live stubs, then a warm run against dead endpoints.
pub fn replay() -> Result<String, String> {
    let fx = Fixture::build();
    let cache = fx.path("cache");
    let (first, second) = (fx.path("first/predictions.json"), fx.path("second/predictions.json"));
    let calls = {
        let (det, rec) = (fx.detector_stub(), fx.recognizer_stub());
        let o = run_cli(&fx, &first, &cache, "end-to-end", &det.url, &rec.url);
        if !o.status.success() {
            return Err(format!("cold run failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        det.hits() + rec.hits()
    };
    let o = run_cli(&fx, &second, &cache, "end-to-end", &dead_url(), &dead_url());
    if !o.status.success() {
        return Err(format!("warm run failed: {}", String::from_utf8_lossy(&o.stderr)));
    }
    let read = |p: PathBuf| std::fs::read(&p).map_err(|e| format!("{}: {e}", p.display()));
    let same_pred = read(first.clone())? == read(second.clone())?;
    let same_manifest = read(fx.path("first/manifest.json"))? == read(fx.path("second/manifest.json"))?;
    let stats: Value = serde_json::from_slice(&read(fx.path("second/run_stats.json"))?).map_err(|e| e.to_string())?;
    if !same_pred || !same_manifest {
        return Err(format!(
            "predictions identical: {same_pred}, manifests identical: {same_manifest}"
        ));
    }
    if stats["detector_calls"] != 0 || stats["recognizer_calls"] != 0 {
        return Err(format!("warm run contacted backends: {stats}"));
    }
    Ok(format!(
        "{calls} cold calls, 0 warm calls, predictions and manifest byte-identical"
    ))
}
