"""Regenerates corpus.json: model-style responses with the cues and drops
each one must produce. Expected outcomes are derived here from how each
case is built, not by running the Rust parser."""

import json
import random

rng = random.Random(20240601)

CANONICAL = ["straight", "back", "left", "right", "straight-left", "straight-right",
             "back-left", "back-right", "no-direction"]
SYNONYMS = {
    "forward": "straight", "ahead": "straight", "up": "straight", "down": "back",
    "behind": "back", "none": "no-direction", "here": "no-direction",
    "upper-right": "straight-right", "front-left": "straight-left",
    "lower-left": "back-left", "down-right": "back-right",
}
UNMAPPED = ["slight left", "north", "diagonal", "u-turn", "left then right", "???"]
PLACES = ["Ward 63", "Pharmacy", "Gate 4", "Lift", "Toilets", "Exit", "Car Park B",
          "Baggage Claim", "Platform 2", "Reception", "Café", "Level 3", "Taxi",
          "Emergency", "Radiology", "Food Court"]
PROSE_BEFORE = ["Here is what I see on the sign:", "Sure! Parsing the sign now.",
                "The sign lists these destinations.", "Answer:", "Based on the image,"]
PROSE_AFTER = ["Let me know if you need more.", "Hope this helps [note: arrows approximate].",
               "", "That is all I can read.", "(confidence is moderate)"]


def spaced(place):
    return rng.choice(["", " ", "  "]) + place.replace(" ", rng.choice([" ", "  ", "\t"])) + rng.choice(["", " "])


def vary_token(tok):
    style = rng.randrange(4)
    if style == 0:
        return tok
    if style == 1:
        return tok.upper()
    if style == 2:
        return tok.replace("-", " ").title()
    return tok.replace("-", "_")


def valid_item(synonym=False):
    place = rng.choice(PLACES)
    kind = rng.choice(["text", "symbol"])
    if synonym:
        raw_dir = rng.choice(sorted(SYNONYMS))
        direction = SYNONYMS[raw_dir]
        raw_dir = vary_token(raw_dir)
    else:
        direction = rng.choice(CANONICAL)
        raw_dir = vary_token(direction)
    raw_kind = rng.choice([kind, kind.title(), " " + kind + " "])
    item = {"place": spaced(place), "kind": raw_kind, "direction": raw_dir}
    if rng.random() < 0.2:
        item["confidence"] = round(rng.random(), 2)
    cue = {"place": place, "kind": kind, "direction": direction}
    return item, cue, synonym


def invalid_item():
    reason = rng.choice(["UnmappedDirection", "EmptyPlace", "BadKind", "NotAnObject"])
    if reason == "NotAnObject":
        return rng.choice([1, "Exit left", None, ["Lift", "up"]]), reason
    item = {"place": rng.choice(PLACES), "kind": rng.choice(["text", "symbol"]),
            "direction": rng.choice(CANONICAL)}
    if reason == "UnmappedDirection":
        item["direction"] = rng.choice(UNMAPPED)
    elif reason == "EmptyPlace":
        item["place"] = rng.choice(["", "   ", "\t", 42])
    else:
        item["kind"] = rng.choice(["logo", "icon", "", 7])
    return item, reason


def build_items(n_valid, n_invalid, synonym_rate=0.0):
    slots = [("v", None)] * n_valid + [("x", None)] * n_invalid
    rng.shuffle(slots)
    items, cues, dropped, synonyms = [], [], [], 0
    for tag, _ in slots:
        if tag == "v":
            item, cue, syn = valid_item(rng.random() < synonym_rate)
            items.append(item)
            cues.append(cue)
            synonyms += syn
        else:
            item, reason = invalid_item()
            items.append(item)
            dropped.append(reason)
    return items, {"cues": cues, "dropped": dropped, "span": True, "synonym_mapped": synonyms}


def dump(items):
    return json.dumps(items, ensure_ascii=False, indent=rng.choice([None, 2]))


cases = []


def add(category, raw, expected):
    cases.append({"id": f"{category}-{len(cases):03d}", "category": category, "raw": raw, "expected": expected})


for _ in range(40):
    items, exp = build_items(rng.randint(1, 5), 0)
    add("valid", dump(items), exp)

add("valid", "[]", {"cues": [], "dropped": [], "span": True, "synonym_mapped": 0})

for _ in range(20):
    items, exp = build_items(rng.randint(1, 4), 0, synonym_rate=1.0)
    add("synonym", dump(items), exp)

for _ in range(35):
    items, exp = build_items(rng.randint(0, 4), rng.randint(0, 2), synonym_rate=0.2)
    lang = rng.choice(["json", "", "JSON"])
    raw = f"{rng.choice(PROSE_BEFORE)}\n```{lang}\n{dump(items)}\n```\n{rng.choice(PROSE_AFTER)}"
    add("fenced", raw, exp)

for _ in range(35):
    items, exp = build_items(rng.randint(1, 4), rng.randint(0, 1), synonym_rate=0.2)
    raw = f"{rng.choice(PROSE_BEFORE)} {dump(items)} {rng.choice(PROSE_AFTER)}"
    add("prose", raw, exp)

for _ in range(30):
    items, exp = build_items(rng.randint(0, 3), rng.randint(1, 4))
    add("drops", dump(items), exp)

NONE = {"cues": [], "dropped": [], "span": False, "synonym_mapped": 0}

for _ in range(20):
    items, _ = build_items(rng.randint(1, 4), 0)
    text = json.dumps(items, ensure_ascii=False)
    cut = rng.randrange(1, len(text) - 1)
    raw = text[:cut]
    if rng.random() < 0.5:
        raw = f"{rng.choice(PROSE_BEFORE)}\n```json\n{raw}"
    add("truncated", raw, NONE)

GARBAGE = ["", "I cannot read this sign.", "{}", "{\"place\": \"Exit\"}", "null", "[not json",
           "]]][[[", "```\n```", "```json\n{\"cues\": 3}\n```", "The arrow [left] points to the lift.",
           "[[", "[1, 2,", "\u0000\u0001", "```json", "Sign unreadable: [blurred]"]
for g in GARBAGE:
    add("garbage", g, NONE)
for _ in range(200 - len(cases)):
    alphabet = "abcxyz {}:,\"'`\n-_.!?"
    add("garbage", "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60))), NONE)

assert len(cases) == 200, len(cases)
with open("corpus.json", "w", encoding="utf-8") as f:
    json.dump({"cases": cases}, f, ensure_ascii=False, indent=1)
    f.write("\n")
