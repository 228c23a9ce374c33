use signeval_core::model::{Direction, LabelKind};

/// Bumped whenever the prompt text changes; recorded in run manifests.
pub const PROMPT_VERSION: &str = "nav-sign-v1";

/// Text query sent to open-vocabulary detectors.
pub const DEFAULT_DETECTION_QUERY: &str = "navigational signs";

/// The pinned recognition prompt. Deterministic: no inputs, no state.
pub fn build_recognition_prompt() -> String {
    let mut p = String::from(
        "You are reading a single navigational sign cropped from a photo.\n\
         Follow these steps:\n\
         1. Extract all location and place-related text from the sign.\n\
         2. Extract all directional symbols (arrows) and all pictograms that stand for a place, \
         such as a lift, toilet or taxi; describe each pictogram with a short noun phrase.\n\
         3. Associate each location with the direction that leads to it. One arrow may serve \
         several locations, so several locations can share the same direction. Give each location \
         exactly one direction; use no-direction when the sign only names the current or nearby place.\n\
         4. Output the associated navigational cues as a list of (place, kind, direction) tuples.\n\
         \n\
         Allowed direction values:\n",
    );
    for d in Direction::ALL {
        p.push_str("- ");
        p.push_str(d.as_str());
        p.push('\n');
    }
    p.push_str("\nAllowed kind values:\n");
    for k in LabelKind::ALL {
        p.push_str("- ");
        p.push_str(k.as_str());
        p.push('\n');
    }
    p.push_str(
        "\nUse kind text when the place is written as words on the sign and kind symbol when it \
         is shown as a pictogram.\n\
         Respond with a JSON array of objects with the keys \"place\", \"kind\" and \"direction\" \
         and nothing else. Example:\n\
         [{\"place\": \"Platform 2\", \"kind\": \"text\", \"direction\": \"left\"}]\n",
    );
    p
}
