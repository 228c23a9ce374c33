use std::path::PathBuf;

use serde::Deserialize;

use signeval_core::model::NavCue;
use signeval_pipeline::parse_recognition_response;

#[derive(Deserialize)]
struct Corpus {
    cases: Vec<Case>,
}

#[derive(Deserialize)]
struct Case {
    id: String,
    raw: String,
    expected: Expected,
}

#[derive(Deserialize)]
struct Expected {
    cues: Vec<NavCue>,
    dropped: Vec<String>,
    span: bool,
    synonym_mapped: usize,
}

fn corpus() -> Corpus {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/parser/corpus.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn corpus_outcomes_match() {
    let corpus = corpus();
    assert_eq!(corpus.cases.len(), 200);
    for case in &corpus.cases {
        let (cues, diag) = parse_recognition_response(&case.raw);
        assert_eq!(cues, case.expected.cues, "{}", case.id);
        let reasons: Vec<String> = diag
            .dropped_items
            .iter()
            .map(|d| serde_json::to_value(d.reason).unwrap().as_str().unwrap().to_string())
            .collect();
        assert_eq!(reasons, case.expected.dropped, "{}", case.id);
        assert_eq!(diag.extracted_json_span.is_some(), case.expected.span, "{}", case.id);
        assert_eq!(diag.synonym_mapped, case.expected.synonym_mapped, "{}", case.id);
        if let Some((a, b)) = diag.extracted_json_span {
            let slice: serde_json::Value = serde_json::from_str(&case.raw[a..b]).unwrap();
            assert!(slice.is_array(), "{}", case.id);
        }
    }
}
