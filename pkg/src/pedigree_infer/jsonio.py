"""Canonical JSON output shared by the CLI and the HTTP service.

One serialization path keeps the two byte-identical: keys sorted, compact
separators, UTF-8, and non-finite floats replaced by string sentinels
("-inf" marks an impossible hypothesis and is rendered as a first-class
answer downstream, not an error).
"""

from __future__ import annotations

import json
import math
from typing import Any

NEG_INF_SENTINEL = "-inf"


def jsonable(value: Any) -> Any:
    """Recursively convert floats and containers to JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, float):
        if value == float("-inf"):
            return NEG_INF_SENTINEL
        if value == float("inf"):
            return "inf"
        if math.isnan(value):
            return "nan"
        return value
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return jsonable(value.item())
    return value


def canonical_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def canonical_json_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")
