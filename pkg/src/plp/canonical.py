"""Canonical serialization and hashing helpers.

Every byte that is compared, digested, or served comes through here: one
serializer, one hash, no per-module variants. Canonical JSON is compact
(no whitespace) with lexicographically sorted keys, so identical structures
produce identical bytes on every run and platform.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from typing import Any

UTC_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def canonical_bytes(value: Any) -> bytes:
    return canonical_json(value).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_of(value: Any) -> str:
    return sha256_hex(canonical_bytes(value))


def is_sha256_hex(text: str) -> bool:
    return len(text) == 64 and all(c in "0123456789abcdef" for c in text)


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime(UTC_FORMAT)


def parse_instant(text: str) -> datetime:
    return datetime.strptime(text, UTC_FORMAT).replace(tzinfo=timezone.utc)


def write_jsonl_line(handle, record: Any) -> None:
    handle.write(canonical_json(record) + "\n")


def read_jsonl(path) -> list:
    """Load every record of a line-delimited JSON file; missing file → []."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
    except FileNotFoundError:
        return []
