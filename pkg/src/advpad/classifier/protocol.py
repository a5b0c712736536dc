"""Remote-oracle wire protocol: schemas, reference handler, contract suite.

The protocol is plain HTTP + JSON:

    POST /v1/predict        {"bytes_hex": str, "want_distribution": bool,
                             "want_embedding": bool}
        -> 200 {"label": int, "distribution": [float]?, "embedding": [float]?}

    POST /v1/predict_batch  {"bytes_hex": [str], ...same flags}
        -> 200 {"labels": [int], "distributions": [[float]]?,
                "embeddings": [[float]]?}

Failures: 400 malformed request, 501 capability unsupported, 503 model not
ready — always {"error": str}.

`run_golden_suite` drives any transport (in-process or HTTP) through the
golden request/response cases and reports per-case pass/fail. A transport
is a callable (path, payload_bytes) -> (status, response_bytes).
"""

from __future__ import annotations

import json
from importlib import resources

from ..errors import OracleUnavailable
from .oracle import Oracle

PREDICT_PATH = "/v1/predict"
PREDICT_BATCH_PATH = "/v1/predict_batch"

GOLDEN_RESOURCE = "golden_cases.json"


# --- reference request handling -------------------------------------------

def _decode_hex(value) -> bytes:
    if not isinstance(value, str):
        raise ValueError("bytes_hex must be a hex string")
    data = bytes.fromhex(value)  # ValueError on bad/odd hex
    if not data:
        raise ValueError("bytes_hex must decode to at least one byte")
    return data


def _want_flags(body: dict) -> tuple[bool, bool]:
    wd = body.get("want_distribution", False)
    we = body.get("want_embedding", False)
    if not isinstance(wd, bool) or not isinstance(we, bool):
        raise ValueError("want_distribution/want_embedding must be booleans")
    return wd, we


def handle_request(oracle: Oracle, path: str, payload: bytes) -> tuple[int, dict]:
    """Reference protocol semantics over any Oracle. Returns (status, body)."""
    try:
        body = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return 400, {"error": "request body is not valid JSON"}
    if not isinstance(body, dict):
        return 400, {"error": "request body must be a JSON object"}

    try:
        wd, we = _want_flags(body)
        if path == PREDICT_PATH:
            data = _decode_hex(body.get("bytes_hex"))
            items = [data]
        elif path == PREDICT_BATCH_PATH:
            raw = body.get("bytes_hex")
            if not isinstance(raw, list) or not raw:
                raise ValueError("bytes_hex must be a non-empty array of hex strings")
            items = [_decode_hex(v) for v in raw]
        else:
            return 404, {"error": "unknown path %s" % path}
    except ValueError as exc:
        return 400, {"error": str(exc)}

    caps = oracle.capabilities
    if (wd and not caps.has_distribution) or (we and not caps.has_embedding):
        return 501, {"error": "oracle does not support the requested capability"}

    try:
        preds = oracle.predict_batch(items)
    except OracleUnavailable as exc:
        return 503, {"error": str(exc)}

    if path == PREDICT_PATH:
        out: dict = {"label": int(preds[0].label)}
        if wd:
            out["distribution"] = [float(x) for x in preds[0].distribution]
        if we:
            out["embedding"] = [float(x) for x in preds[0].embedding]
        return 200, out
    out = {"labels": [int(p.label) for p in preds]}
    if wd:
        out["distributions"] = [[float(x) for x in p.distribution] for p in preds]
    if we:
        out["embeddings"] = [[float(x) for x in p.embedding] for p in preds]
    return 200, out


def local_transport(oracle: Oracle):
    """In-process transport with deterministic serialization."""

    def transport(path: str, payload: bytes) -> tuple[int, bytes]:
        status, body = handle_request(oracle, path, payload)
        return status, json.dumps(body, sort_keys=True).encode("utf-8")

    return transport


# --- golden contract suite --------------------------------------------------

def load_golden_cases() -> list[dict]:
    text = resources.files(__package__).joinpath(GOLDEN_RESOURCE).read_text("utf-8")
    return json.loads(text)


def _case_payload(case: dict) -> bytes:
    if "body_raw" in case:
        return case["body_raw"].encode("utf-8")
    return json.dumps(case["body"], sort_keys=True).encode("utf-8")


def _check_distribution(dist) -> str | None:
    if not isinstance(dist, list) or not dist:
        return "distribution missing or empty"
    if any(x < 0 for x in dist):
        return "distribution has negative entries"
    if abs(sum(dist) - 1.0) > 1e-6:
        return "distribution sums to %r" % sum(dist)
    return None


def _run_case(case: dict, transport, has_distribution: bool, has_embedding: bool) -> str | None:
    """Returns None on pass, otherwise a failure description."""
    path = case["path"]
    payload = _case_payload(case)
    expect = dict(case["expect"])

    needs = case.get("requires_capability")
    degraded = (needs == "distribution" and not has_distribution) or (
        needs == "embedding" and not has_embedding
    )
    if degraded:
        expect = {"status": 501, "require": [], "forbid": [], "checks": ["error_message"]}

    status, raw = transport(path, payload)
    try:
        body = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return "response is not valid JSON"
    if status != expect["status"]:
        return "status %d, expected %d (%r)" % (status, expect["status"], body)
    for field in expect.get("require", []):
        if field not in body:
            return "missing field %r" % field
    for field in expect.get("forbid", []):
        if field in body:
            return "unexpected field %r" % field

    for check in expect.get("checks", []):
        if check == "label_int":
            if not isinstance(body.get("label"), int):
                return "label is not an integer"
        elif check == "error_message":
            if not isinstance(body.get("error"), str) or not body["error"]:
                return "error responses must carry a non-empty error string"
        elif check == "deterministic":
            status2, raw2 = transport(path, payload)
            if status2 != status or raw2 != raw:
                return "same request twice produced different responses"
        elif check == "dist_valid":
            msg = _check_distribution(body.get("distribution"))
            if msg:
                return msg
        elif check == "argmax_label":
            dist = body["distribution"]
            if dist.index(max(dist)) != body["label"]:
                return "label != argmax(distribution)"
        elif check == "embedding_floats":
            emb = body.get("embedding")
            if not isinstance(emb, list) or not emb or not all(
                isinstance(x, (int, float)) for x in emb
            ):
                return "embedding missing or not numeric"
        elif check == "labels_len":
            if len(body.get("labels", [])) != len(case["body"]["bytes_hex"]):
                return "labels length != request batch length"
        elif check == "batch_dists_valid":
            dists = body.get("distributions")
            if not isinstance(dists, list) or len(dists) != len(case["body"]["bytes_hex"]):
                return "distributions length != request batch length"
            for d in dists:
                msg = _check_distribution(d)
                if msg:
                    return msg
        elif check == "batch_matches_single":
            for i, item in enumerate(case["body"]["bytes_hex"]):
                single = json.dumps({"bytes_hex": item}, sort_keys=True).encode("utf-8")
                s_status, s_raw = transport(PREDICT_PATH, single)
                if s_status != 200:
                    return "single prediction for batch item %d failed" % i
                if json.loads(s_raw)["label"] != body["labels"][i]:
                    return "batch label %d disagrees with single prediction" % i
        elif check == "cross_case_consistent":
            twin = json.dumps(
                {"bytes_hex": case["body"]["bytes_hex"].lower()}, sort_keys=True
            ).encode("utf-8")
            t_status, t_raw = transport(PREDICT_PATH, twin)
            if t_status != 200 or json.loads(t_raw)["label"] != body["label"]:
                return "uppercase hex classified differently from lowercase"
        else:
            return "unknown check %r in golden case" % check
    return None


def run_golden_suite(
    transport,
    has_distribution: bool,
    has_embedding: bool,
    cases: list[dict] | None = None,
) -> list[tuple[str, str | None]]:
    """Run every golden case. Returns [(case name, failure or None)]."""
    if cases is None:
        cases = load_golden_cases()
    results = []
    for case in cases:
        failure = _run_case(case, transport, has_distribution, has_embedding)
        results.append((case["name"], failure))
    return results
