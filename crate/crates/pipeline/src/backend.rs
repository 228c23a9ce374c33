use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use signeval_core::matching::EmbeddingProvider;
use signeval_core::EmbedError;

pub const DETECTOR_KEY_ENV: &str = "SIGNEVAL_DETECTOR_KEY";
pub const RECOGNIZER_KEY_ENV: &str = "SIGNEVAL_RECOGNIZER_KEY";
pub const EMBEDDER_KEY_ENV: &str = "SIGNEVAL_EMBEDDER_KEY";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("backend unavailable: {0}")]
    Unavailable(String),
    #[error("malformed backend response: {0}")]
    Malformed(String),
}

/// Exponential backoff for transient transport failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_delay: Duration,
    pub factor: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            initial_delay: Duration::from_millis(500),
            factor: 2,
        }
    }
}

enum Failure {
    Transient(String),
    Permanent(String),
}

impl RetryPolicy {
    fn run<T>(&self, mut call: impl FnMut() -> Result<T, Failure>) -> Result<T, BackendError> {
        let mut delay = self.initial_delay;
        let mut last = String::new();
        for attempt in 1..=self.attempts.max(1) {
            match call() {
                Ok(v) => return Ok(v),
                Err(Failure::Permanent(msg)) => return Err(BackendError::Unavailable(msg)),
                Err(Failure::Transient(msg)) => {
                    log::warn!("attempt {attempt}/{} failed: {msg}", self.attempts);
                    last = msg;
                    if attempt < self.attempts {
                        std::thread::sleep(delay);
                        delay *= self.factor;
                    }
                }
            }
        }
        Err(BackendError::Unavailable(format!(
            "{last} (after {} attempts)",
            self.attempts
        )))
    }
}

/// JSON-over-HTTP POST with bearer credentials and retries.
#[derive(Debug, Clone)]
struct JsonEndpoint {
    url: String,
    key: Option<String>,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
}

impl JsonEndpoint {
    fn new(url: &str, key_env: &str, timeout: Duration) -> Self {
        Self {
            url: url.to_string(),
            key: std::env::var(key_env).ok().filter(|k| !k.is_empty()),
            client: reqwest::blocking::Client::builder()
                .timeout(timeout)
                .build()
                .expect("HTTP client builds"),
            retry: RetryPolicy::default(),
        }
    }

    /// Response body text of a successful POST.
    fn post(&self, body: &serde_json::Value) -> Result<String, BackendError> {
        self.retry.run(|| {
            let mut req = self.client.post(&self.url).json(body);
            if let Some(k) = &self.key {
                req = req.bearer_auth(k);
            }
            let resp = req
                .send()
                .map_err(|e| Failure::Transient(format!("{}: {e}", self.url)))?;
            let status = resp.status();
            let text = resp
                .text()
                .map_err(|e| Failure::Transient(format!("{}: {e}", self.url)))?;
            if status.is_success() {
                Ok(text)
            } else if status.is_server_error() || status.as_u16() == 429 {
                Err(Failure::Transient(format!("{} returned {status}", self.url)))
            } else {
                Err(Failure::Permanent(format!(
                    "{} returned {status}: {}",
                    self.url,
                    truncate(&text, 200)
                )))
            }
        })
    }
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Open-vocabulary detector returning raw response bodies.
pub trait DetectorBackend: Send + Sync {
    fn model_id(&self) -> &str;
    fn query(&self) -> &str;
    /// Raw response body for one encoded image.
    fn detect_raw(&self, image_bytes: &[u8]) -> Result<String, BackendError>;
}

/// Vision-language model answering one prompt about one image crop.
pub trait RecognizerBackend: Send + Sync {
    fn model_id(&self) -> &str;
    /// Decoding temperature requested from the endpoint.
    fn temperature(&self) -> f64 {
        0.0
    }
    /// The model's text answer, verbatim.
    fn recognize_raw(&self, crop_png: &[u8], prompt: &str) -> Result<String, BackendError>;
}

/// Detector speaking `{"model","query","image_b64"}` -> `{"boxes","scores"?}`.
#[derive(Debug, Clone)]
pub struct HttpDetector {
    endpoint: JsonEndpoint,
    model: String,
    query: String,
}

impl HttpDetector {
    /// Credentials come from `SIGNEVAL_DETECTOR_KEY` when set.
    pub fn new(url: &str, model: &str, query: &str) -> Self {
        Self {
            endpoint: JsonEndpoint::new(url, DETECTOR_KEY_ENV, Duration::from_secs(120)),
            model: model.to_string(),
            query: query.to_string(),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.endpoint.retry = retry;
        self
    }
}

impl DetectorBackend for HttpDetector {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn query(&self) -> &str {
        &self.query
    }

    fn detect_raw(&self, image_bytes: &[u8]) -> Result<String, BackendError> {
        self.endpoint.post(&json!({
            "model": self.model,
            "query": self.query,
            "image_b64": B64.encode(image_bytes),
        }))
    }
}

/// Recognizer speaking `{"model","prompt","image_b64","temperature"}` -> `{"text"}`.
#[derive(Debug, Clone)]
pub struct HttpRecognizer {
    endpoint: JsonEndpoint,
    model: String,
    temperature: f64,
}

impl HttpRecognizer {
    /// Credentials come from `SIGNEVAL_RECOGNIZER_KEY` when set.
    pub fn new(url: &str, model: &str) -> Self {
        Self {
            endpoint: JsonEndpoint::new(url, RECOGNIZER_KEY_ENV, Duration::from_secs(300)),
            model: model.to_string(),
            temperature: 0.0,
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.endpoint.retry = retry;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }
}

#[derive(Deserialize)]
struct TextResponse {
    text: String,
}

impl RecognizerBackend for HttpRecognizer {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn temperature(&self) -> f64 {
        self.temperature
    }

    fn recognize_raw(&self, crop_png: &[u8], prompt: &str) -> Result<String, BackendError> {
        let body = self.endpoint.post(&json!({
            "model": self.model,
            "prompt": prompt,
            "image_b64": B64.encode(crop_png),
            "temperature": self.temperature,
        }))?;
        serde_json::from_str::<TextResponse>(&body)
            .map(|r| r.text)
            .map_err(|e| BackendError::Malformed(format!("recognizer response: {e}")))
    }
}

/// Remote text embedder: `{"model","input":[text]}` -> `{"vectors":[[..]]}`.
/// Vectors are memoized so repeated places embed identically.
#[derive(Debug)]
pub struct HttpEmbeddingProvider {
    endpoint: JsonEndpoint,
    model: String,
    memo: Mutex<HashMap<String, Vec<f64>>>,
}

impl HttpEmbeddingProvider {
    /// Credentials come from `SIGNEVAL_EMBEDDER_KEY` when set.
    pub fn new(url: &str, model: &str) -> Self {
        Self {
            endpoint: JsonEndpoint::new(url, EMBEDDER_KEY_ENV, Duration::from_secs(60)),
            model: model.to_string(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.endpoint.retry = retry;
        self
    }
}

#[derive(Deserialize)]
struct VectorsResponse {
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn embed_text(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        if let Some(v) = self.memo.lock().expect("memo lock").get(text) {
            return Ok(v.clone());
        }
        let body = self
            .endpoint
            .post(&json!({"model": self.model, "input": [text]}))
            .map_err(|e| EmbedError::ProviderUnavailable(e.to_string()))?;
        let mut resp: VectorsResponse = serde_json::from_str(&body)
            .map_err(|e| EmbedError::ProviderUnavailable(format!("malformed embedding response: {e}")))?;
        if resp.vectors.len() != 1 {
            return Err(EmbedError::ProviderUnavailable(format!(
                "expected 1 vector, got {}",
                resp.vectors.len()
            )));
        }
        let v = resp.vectors.remove(0);
        self.memo.lock().expect("memo lock").insert(text.to_string(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn fast() -> RetryPolicy {
        RetryPolicy {
            attempts: 3,
            initial_delay: Duration::from_millis(1),
            factor: 2,
        }
    }

    /// Serves `responses` in order (status, body), repeating the last.
    fn stub(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>, Arc<Mutex<Vec<String>>>) {
        let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", server.server_addr().to_ip().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let (h, b) = (hits.clone(), bodies.clone());
        std::thread::spawn(move || {
            for mut req in server.incoming_requests() {
                let n = h.fetch_add(1, Ordering::SeqCst);
                let mut body = String::new();
                req.as_reader().read_to_string(&mut body).unwrap();
                let auth = req
                    .headers()
                    .iter()
                    .find(|x| x.field.equiv("Authorization"))
                    .map(|x| x.value.to_string());
                b.lock().unwrap().push(format!("{}|{body}", auth.unwrap_or_default()));
                let (status, text) = responses[n.min(responses.len() - 1)].clone();
                let _ = req.respond(tiny_http::Response::from_string(text).with_status_code(status));
            }
        });
        (url, hits, bodies)
    }

    #[test]
    fn recognizer_echoes_text_and_sends_contract() {
        let (url, _, bodies) = stub(vec![(200, r#"{"text":"[1]"}"#.into())]);
        let r = HttpRecognizer::new(&url, "vlm-x").with_retry(fast());
        assert_eq!(r.recognize_raw(b"png", "read it").unwrap(), "[1]");
        let sent = bodies.lock().unwrap()[0].clone();
        let json: serde_json::Value = serde_json::from_str(sent.split_once('|').unwrap().1).unwrap();
        assert_eq!(json["model"], "vlm-x");
        assert_eq!(json["prompt"], "read it");
        assert_eq!(json["image_b64"], B64.encode(b"png"));
        assert_eq!(json["temperature"], 0.0);
    }

    #[test]
    fn retries_transient_failures() {
        let (url, hits, _) = stub(vec![
            (503, "busy".into()),
            (500, "oops".into()),
            (200, r#"{"text":"ok"}"#.into()),
        ]);
        let r = HttpRecognizer::new(&url, "m").with_retry(fast());
        assert_eq!(r.recognize_raw(b"x", "p").unwrap(), "ok");
        assert_eq!(hits.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn gives_up_after_three_attempts() {
        let (url, hits, _) = stub(vec![(503, "busy".into())]);
        let r = HttpRecognizer::new(&url, "m").with_retry(fast());
        assert!(matches!(r.recognize_raw(b"x", "p"), Err(BackendError::Unavailable(_))));
        assert_eq!(hits.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (url, hits, _) = stub(vec![(400, "bad request".into())]);
        let r = HttpRecognizer::new(&url, "m").with_retry(fast());
        assert!(matches!(r.recognize_raw(b"x", "p"), Err(BackendError::Unavailable(_))));
        assert_eq!(hits.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn unreachable_endpoint_is_unavailable() {
        let r = HttpRecognizer::new("http://127.0.0.1:9/", "m").with_retry(fast());
        assert!(matches!(r.recognize_raw(b"x", "p"), Err(BackendError::Unavailable(_))));
    }

    #[test]
    fn malformed_recognizer_body() {
        let (url, _, _) = stub(vec![(200, "not json".into())]);
        let r = HttpRecognizer::new(&url, "m").with_retry(fast());
        assert!(matches!(r.recognize_raw(b"x", "p"), Err(BackendError::Malformed(_))));
    }

    #[test]
    fn detector_sends_query() {
        let (url, _, bodies) = stub(vec![(200, r#"{"boxes":[]}"#.into())]);
        let d = HttpDetector::new(&url, "det", "navigational signs").with_retry(fast());
        assert_eq!(d.detect_raw(b"img").unwrap(), r#"{"boxes":[]}"#);
        let sent = bodies.lock().unwrap()[0].clone();
        assert!(sent.contains(r#""query":"navigational signs""#));
    }

    #[test]
    fn embedder_memoizes() {
        let (url, hits, _) = stub(vec![(200, r#"{"vectors":[[0.6,0.8]]}"#.into())]);
        let e = HttpEmbeddingProvider::new(&url, "emb").with_retry(fast());
        assert_eq!(e.embed_text("lift").unwrap(), vec![0.6, 0.8]);
        assert_eq!(e.embed_text("lift").unwrap(), vec![0.6, 0.8]);
        assert_eq!(hits.load(Ordering::SeqCst), 1);
        let down = HttpEmbeddingProvider::new("http://127.0.0.1:9/", "emb").with_retry(fast());
        assert!(matches!(
            down.embed_text("lift"),
            Err(EmbedError::ProviderUnavailable(_))
        ));
    }
}
