#!/usr/bin/env python3
"""Generate the fixture corpus: one .json catalog + one .dialect sidecar each.

Deterministic by construction (fixed seed, fixed pools). Regenerating
overwrites tests/fixtures/ in place.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

VERBS = ["search", "create", "delete", "update", "list", "fetch", "sync", "merge",
         "export", "import", "validate", "archive", "restore", "publish", "annotate",
         "schedule", "cancel", "inspect", "rotate", "resolve"]
NOUNS = ["files", "tickets", "users", "branches", "reports", "invoices", "sessions",
         "datasets", "webhooks", "snapshots", "queues", "indexes", "alerts", "licenses",
         "clusters", "pipelines", "reviews", "domains", "tokens", "budgets"]

FILLERS = ["Please note that", "in order to", "It is important to note that",
           "basically", "this tool", "feel free to", "as a matter of fact",
           "it should be noted that", "for all intents and purposes", "needless to say"]

PHRASES = ["corresponds to", "maps to", "is defined as", "greater than or equal to",
           "less than or equal to", "consists of", "the following", "is one of",
           "results in", "is not equal to"]

PARAM_POOL = [
    ("query", {"type": "string", "description": "The free text query string to match against"}),
    ("limit", {"type": "integer", "minimum": 1, "maximum": 500,
               "description": "Maximum number of results that the call returns"}),
    ("offset", {"type": "integer", "minimum": 0,
                "description": "Optional number of leading results to skip"}),
    ("format", {"enum": ["json", "csv", "table"],
                "description": "Output format that the response body uses"}),
    ("verbose", {"type": "boolean",
                 "description": "Optional switch that enables extended diagnostics"}),
    ("tags", {"type": "array", "description": "List of tag strings attached to the result"}),
    ("threshold", {"type": "number", "minimum": 0.0, "maximum": 1.0,
                   "description": "Score cutoff; results below it are dropped"}),
    ("path", {"type": "string", "description": "Optional directory path to search in"}),
    ("mode", {"enum": ["fast", "safe", "dry-run"],
              "description": "Execution mode that the operation runs under"}),
    ("payload", {"type": "object", "description": "Raw body forwarded to the backend"}),
]


def make_description(rng, name):
    verb, noun = name.split("_", 1)
    bits = [rng.choice(FILLERS), f"{verb} the {noun} collection;",
            f"the input {rng.choice(PHRASES)} the stored record",
            "and each entry", rng.choice(PHRASES), "a canonical form."]
    if rng.random() < 0.3:
        bits.insert(2, "the key -> value mapping is preserved and")
    return " ".join(bits)


def make_schema(rng, n_params):
    picks = rng.sample(PARAM_POOL, n_params)
    props = {k: dict(v) for k, v in picks}
    required = [k for k, v in picks
                if not v.get("description", "").startswith("Optional") and rng.random() < 0.8]
    schema = {"type": "object", "properties": props}
    if required:
        schema["required"] = required
    return schema


def synthetic_catalog(count, seed):
    rng = random.Random(seed)
    names = []
    for verb in VERBS:
        for noun in NOUNS:
            names.append(f"{verb}_{noun}")
    rng.shuffle(names)
    tools = []
    for name in names[:count]:
        tools.append({
            "name": name,
            "description": make_description(rng, name),
            "schema": make_schema(rng, rng.randint(2, 5)),
        })
    return tools


def as_openai(tools):
    return [{"type": "function",
             "function": {"name": t["name"], "description": t["description"],
                          "parameters": t["schema"]}} for t in tools]


def as_anthropic(tools):
    return {"tools": [{"name": t["name"], "description": t["description"],
                       "input_schema": t["schema"]} for t in tools]}


def as_mcp(tools):
    return {"tools": [{"name": t["name"], "description": t["description"],
                       "inputSchema": t["schema"]} for t in tools]}


def write(name, dialect, doc):
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n")
    (OUT / f"{name}.dialect").write_text(dialect + "\n")


def transcript_lines():
    """Recorded-run fixture: 15 tasks x 3 conditions with hand-set outcomes.

    tscg: 13/15 exact tool sets, 16 of 19 pooled param triples.
    natural-fc: 10/15. natural-text: 8/15.
    """
    def gold_for(i):
        if i <= 11:
            return [{"tool": "search", "params": {"query": f"alpha{i}"}}]
        return [{"tool": "lookup", "params": {"key": f"k{i}", "mode": "fast"}}]

    lines = []

    def record(i, cond, predicted):
        lines.append({"task_id": f"t{i:02d}", "condition": cond, "seed": 0,
                      "predicted": predicted, "gold": gold_for(i)})

    for i in range(1, 16):
        if i == 10:
            pred = [{"tool": "search", "params": {"query": "beta10"}}]
        elif i == 14:
            pred = [{"tool": "wrong_tool", "params": {"a": "1", "b": "2"}}]
        elif i == 15:
            pred = gold_for(i) + [{"tool": "extra_tool"}]
        else:
            pred = gold_for(i)
        record(i, "tscg", pred)
        miss = [{"tool": "misfire", "params": {"x": "0"}}]
        record(i, "natural-fc", gold_for(i) if i <= 10 else miss)
        record(i, "natural-text", gold_for(i) if i <= 8 else miss)
    return "\n".join(json.dumps(line, ensure_ascii=False) for line in lines) + "\n"


def main():
    fig2 = {
        "name": "search_files",
        "description": "Search project files by content or filename pattern",
        "parameters": {
            "type": "object",
            "properties": {
                "query": {"type": "string", "description": "The search query string"},
                "path": {"type": "string",
                         "description": "Optional directory path to search in"},
            },
        },
    }
    write("fig2", "openai-fc", fig2)

    tri_tools = [
        {"name": "weather_lookup",
         "description": "Please note that this tool fetches the current weather; "
                        "the city name corresponds to the station record.",
         "schema": {"type": "object",
                    "properties": {
                        "city": {"type": "string", "description": "City name to resolve"},
                        "units": {"enum": ["metric", "imperial"],
                                  "description": "Unit system for the response"},
                        "days": {"type": "integer", "minimum": 1, "maximum": 14,
                                 "description": "Optional forecast horizon in days"}},
                    "required": ["city", "units"]}},
        {"name": "create_ticket",
         "description": "Creates a support ticket; the priority is one of the fixed tiers "
                        "and basically maps to the queue position.",
         "schema": {"type": "object",
                    "properties": {
                        "title": {"type": "string", "description": "Short summary line"},
                        "priority": {"enum": ["low", "normal", "high", "urgent"],
                                     "description": "Queue tier for triage"},
                        "body": {"type": "string",
                                 "description": "Optional long form problem report"}},
                    "required": ["title", "priority"]}},
        {"name": "send_email",
         "description": "In order to notify a user this tool sends an email; "
                        "the subject consists of plain text.",
         "schema": {"type": "object",
                    "properties": {
                        "to": {"type": "string", "description": "Recipient address"},
                        "subject": {"type": "string", "description": "Subject line"},
                        "cc": {"type": "array",
                               "description": "Optional list of carbon copy addresses"}},
                    "required": ["to", "subject"]}},
        {"name": "query_database",
         "description": "Runs a read only query; the row budget is greater than or equal to "
                        "one and less than or equal to the page size.",
         "schema": {"type": "object",
                    "properties": {
                        "sql": {"type": "string", "description": "Statement to execute"},
                        "rows": {"type": "integer", "minimum": 1, "maximum": 1000,
                                 "description": "Row budget for the result set"},
                        "dry_run": {"type": "boolean",
                                    "description": "Optional plan only switch"}},
                    "required": ["sql"]}},
        {"name": "convert_units",
         "description": "Converts a value between unit systems; the result is defined as "
                        "value times the conversion factor.",
         "schema": {"type": "object",
                    "properties": {
                        "value": {"type": "number", "description": "Quantity to convert"},
                        "from_unit": {"type": "string", "description": "Source unit symbol"},
                        "to_unit": {"type": "string", "description": "Target unit symbol"}},
                    "required": ["value", "from_unit", "to_unit"]}},
    ]
    for tool in tri_tools:
        base = f"tri_{tool['name']}"
        write(f"{base}_openai-fc", "openai-fc", as_openai([tool]))
        write(f"{base}_anthropic-tool-use", "anthropic-tool-use", as_anthropic([tool]))
        write(f"{base}_mcp", "mcp", as_mcp([tool]))

    write("synthetic_16", "mcp", as_mcp(synthetic_catalog(16, seed=16)))
    write("synthetic_43", "openai-fc", as_openai(synthetic_catalog(43, seed=43)))
    write("synthetic_100", "mcp", as_mcp(synthetic_catalog(100, seed=100)))

    write("empty", "mcp", {"tools": []})

    enums_bounds = [{
        "type": "function",
        "function": {
            "name": "resize_image",
            "description": "Resize an image; the scale factor is greater than or equal to "
                           "zero and the quality is one of the presets.",
            "parameters": {
                "type": "object",
                "properties": {
                    "width": {"type": "integer", "minimum": 1, "maximum": 8192,
                              "description": "Target width in pixels"},
                    "height": {"type": "integer", "maximum": 8192,
                               "description": "Optional target height in pixels"},
                    "scale": {"type": "number", "minimum": 0.0,
                              "description": "Uniform scale factor"},
                    "quality": {"enum": ["draft", "standard", "best"],
                                "description": "Encoder preset"},
                    "dpi": {"type": "integer", "default": 72,
                            "description": "Dots per inch for print output"},
                },
                "required": ["width", "scale", "quality"],
            },
        },
    }]
    write("enums_bounds", "openai-fc", enums_bounds)

    nested = [{
        "type": "function",
        "function": {
            "name": "deploy_service",
            "description": "Deploys a service; the config consists of a nested block.",
            "parameters": {
                "type": "object",
                "properties": {
                    "service": {"type": "string", "description": "Service identifier"},
                    "config": {"type": "object",
                               "properties": {
                                   "replicas": {"type": "integer", "minimum": 1,
                                                "description": "Desired replica count"},
                                   "region": {"type": "string",
                                              "description": "Deployment region code"},
                                   "limits": {"type": "object",
                                              "properties": {
                                                  "cpu": {"type": "number"}}}},
                               "required": ["replicas"]},
                },
                "required": ["service", "config"],
            },
        },
    }]
    write("nested", "openai-fc", nested)

    fillers_heavy = {"tools": [
        {"name": "summarize_document",
         "description": "Please note that it is important to note that this tool, "
                        "in order to help, basically summarizes a document. "
                        "Needless to say, feel free to call it at your convenience. "
                        "As a matter of fact it is worth noting that the summary "
                        "is concise.",
         "input_schema": {"type": "object",
                          "properties": {
                              "text": {"type": "string", "description": "Document body"},
                              "length": {"enum": ["short", "medium", "long"],
                                         "description": "Target summary size"}},
                          "required": ["text"]}},
        {"name": "translate_text",
         "description": "It should be noted that for all intents and purposes this tool "
                        "translates text; please be aware that the target language "
                        "corresponds to an ISO code.",
         "input_schema": {"type": "object",
                          "properties": {
                              "text": {"type": "string", "description": "Text to translate"},
                              "target": {"type": "string", "description": "ISO language code"}},
                          "required": ["text", "target"]}},
    ]}
    write("fillers_heavy", "anthropic-tool-use", fillers_heavy)

    deps = {"tools": [
        {"name": "build_report",
         "description": "Builds the quarterly report. Run after aggregate_metrics "
                        "so the totals exist.",
         "inputSchema": {"type": "object",
                         "properties": {"quarter": {"type": "string",
                                                    "description": "Quarter tag like Q3"}},
                         "required": ["quarter"]}},
        {"name": "publish_report",
         "description": "Publishes the report; requires build_report to have finished.",
         "inputSchema": {"type": "object",
                         "properties": {"channel": {"type": "string",
                                                    "description": "Distribution channel"}},
                         "required": ["channel"]}},
        {"name": "aggregate_metrics",
         "description": "Aggregates raw metrics into totals for downstream steps.",
         "inputSchema": {"type": "object",
                         "properties": {"window": {"enum": ["day", "week", "month"],
                                                   "description": "Aggregation window"}},
                         "required": ["window"]}},
        {"name": "notify_team",
         "description": "Notifies the team channel. Run after publish_report completes.",
         "inputSchema": {"type": "object",
                         "properties": {"message": {"type": "string",
                                                    "description": "Optional extra context"}}}},
    ]}
    write("deps", "mcp", deps)

    unicode_fixture = {"tools": [
        {"name": "lookup_café",
         "description": "Recherche naïve de cafés — the résumé maps to 中文 labels; "
                        "prices are greater than or equal to €1.",
         "inputSchema": {"type": "object",
                         "properties": {
                             "ville": {"type": "string", "description": "Nom de la ville"},
                             "note": {"type": "number", "minimum": 0, "maximum": 5,
                                      "description": "Note minimale étoilée"}},
                         "required": ["ville"]}},
    ]}
    write("unicode", "mcp", unicode_fixture)

    (OUT / "transcript_main.jsonl").write_text(transcript_lines())

    names = sorted(p.stem for p in OUT.glob("*.json"))
    print(f"{len(names)} fixtures: {', '.join(names)}")


if __name__ == "__main__":
    main()
