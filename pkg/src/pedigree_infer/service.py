"""Stateless HTTP JSON API for the pedigree explorer UI.

Endpoints: POST /api/validate, /api/smooth, /api/predict; GET /api/health.
Every response body comes from the same workflow + canonical serializer the
CLI uses, so responses are byte-identical to CLI --json output for identical
inputs and seeds. Impossible evidence is a 200 with the "-inf" sentinel (a
first-class answer, not a failure); malformed requests are 400 and domain
violations 422 with a violations list.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .engine import EvidenceError
from .jsonio import canonical_json_bytes
from .mendel import Pattern, SimulationError
from .pedigree import PedigreeError, pedigree_from_document
from .workflows import (
    evidence_from_spec,
    predict_document,
    smooth_document,
    violations_document,
)

MAX_SAMPLES = 10_000
MAX_PERSONS = 200


class RequestProblem(Exception):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload)
        self.status = status
        self.payload = payload


def _bad_request(message: str) -> RequestProblem:
    return RequestProblem(400, {"error": message})


def _domain_error(message: str, rule: str = "request") -> RequestProblem:
    return RequestProblem(422, {"violations": [
        {"rule": rule, "ids": [], "message": message, "severity": "error"}]})


def _parse_body(raw: bytes) -> dict:
    try:
        body = json.loads(raw)
    except ValueError as exc:
        raise _bad_request(f"malformed JSON body: {exc}")
    if not isinstance(body, dict):
        raise _bad_request("request body must be a JSON object")
    return body


def _get_pedigree(body: dict):
    doc = body.get("pedigree")
    if doc is None:
        raise _bad_request("missing 'pedigree'")
    try:
        pedigree = pedigree_from_document(doc)
    except PedigreeError as exc:
        raise _domain_error(str(exc), rule="malformed-document")
    if len(pedigree.persons) > MAX_PERSONS:
        raise _domain_error(
            f"pedigree exceeds the {MAX_PERSONS}-person request cap")
    return pedigree


def _get_int(body: dict, key: str, default: int, lo: int, hi: int) -> int:
    value = body.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise _bad_request(f"'{key}' must be an integer")
    if not lo <= value <= hi:
        raise _domain_error(f"'{key}' must lie in [{lo}, {hi}]")
    return value


def _get_number(body: dict, key: str, default: float) -> float:
    value = body.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise _bad_request(f"'{key}' must be a number")
    return float(value)


def _get_pattern(body: dict, key: str = "pattern", required: bool = True) -> Pattern | None:
    value = body.get(key)
    if value is None:
        if required:
            raise _bad_request(f"missing '{key}'")
        return None
    try:
        return Pattern(value)
    except ValueError:
        raise _domain_error(f"unknown pattern {value!r}")


def handle_validate(body: dict) -> tuple[int, dict]:
    pedigree = _get_pedigree(body)
    payload, has_errors = violations_document(pedigree)
    return (422 if has_errors else 200), payload


def handle_smooth(body: dict) -> tuple[int, dict]:
    pedigree = _get_pedigree(body)
    _require_valid(pedigree)
    pattern = _get_pattern(body)
    samples = _get_int(body, "samples", 1, 1, MAX_SAMPLES)
    seed = _get_int(body, "seed", 0, -2**62, 2**62)
    strength = _get_number(body, "strength", 1_000_000.0)
    carrier = bool(body.get("carrier_evidence", True))
    pairwise = bool(body.get("pairwise", False))
    try:
        evidence = evidence_from_spec(pedigree, pattern, body.get("evidence"))
        doc = smooth_document(pedigree, pattern, evidence, samples=samples,
                              strength=strength, seed=seed,
                              carrier_evidence=carrier, pairwise=pairwise)
    except (EvidenceError, ValueError) as exc:
        raise _domain_error(str(exc), rule="evidence")
    return 200, doc


def handle_predict(body: dict) -> tuple[int, dict]:
    pedigree = _get_pedigree(body)
    _require_valid(pedigree)
    samples = _get_int(body, "samples", 100, 1, MAX_SAMPLES)
    seed = _get_int(body, "seed", 0, -2**62, 2**62)
    strength = _get_number(body, "strength", 1_000_000.0)
    threshold = _get_number(body, "threshold", 0.8)
    carrier = bool(body.get("carrier_evidence", True))
    evidence_pattern = _get_pattern(body, "evidence_pattern", required=False)
    try:
        doc, _possible = predict_document(
            pedigree, body.get("evidence"), evidence_pattern,
            samples=samples, strength=strength, threshold=threshold,
            seed=seed, carrier_evidence=carrier)
    except (EvidenceError, SimulationError, ValueError) as exc:
        raise _domain_error(str(exc), rule="evidence")
    return 200, doc


def _require_valid(pedigree) -> None:
    payload, has_errors = violations_document(pedigree)
    if has_errors:
        raise RequestProblem(422, payload)


_ROUTES = {
    "/api/validate": handle_validate,
    "/api/smooth": handle_smooth,
    "/api/predict": handle_predict,
}


class Handler(BaseHTTPRequestHandler):
    server_version = "pedigree-infer"

    def _send(self, status: int, payload: dict | bytes) -> None:
        body = payload if isinstance(payload, bytes) else canonical_json_bytes(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:  # noqa: N802 (stdlib naming)
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self) -> None:  # noqa: N802
        if self.path == "/api/health":
            self._send(200, {"status": "ok"})
        else:
            self._send(404, {"error": f"no such endpoint {self.path!r}"})

    def do_POST(self) -> None:  # noqa: N802
        handler = _ROUTES.get(self.path)
        if handler is None:
            self._send(404, {"error": f"no such endpoint {self.path!r}"})
            return
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        try:
            body = _parse_body(raw)
            status, payload = handler(body)
        except RequestProblem as problem:
            self._send(problem.status, problem.payload)
            return
        except PedigreeError as exc:
            self._send(422, {"violations": [
                {"rule": "pedigree", "ids": [], "message": str(exc),
                 "severity": "error"}]})
            return
        self._send(status, payload)

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        pass


def make_server(host: str = "127.0.0.1", port: int = 8000) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), Handler)


def run_server(host: str = "127.0.0.1", port: int = 8000) -> None:
    server = make_server(host, port)
    print(f"pedigree-infer API listening on http://{host}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


def start_background(host: str = "127.0.0.1", port: int = 0) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Run the server on a daemon thread (port 0 picks a free port)."""
    server = make_server(host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
