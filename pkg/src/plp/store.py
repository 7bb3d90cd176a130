"""Immutable, versioned document repository with a complete audit trail.

Two storage planes:

* a content-addressed blob plane (``blobs/<first2>/<sha256>``) holding raw
  documents and any derived artifacts, never rewritten;
* an append-only event log (``store/events.jsonl``) that is the *only*
  metadata authority — opening a store replays the log to rebuild all
  document state, which makes "the audit trail reconstructs everything"
  a structural fact rather than an aspiration.

Documents progress through four maturity stages (RAW → CLEANED → STRUCTURED
→ CURATED), one step at a time. The RAW bytes are retained verbatim forever;
promotion may attach a derived artifact stored under its own checksum.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Optional

from plp.canonical import (
    canonical_json,
    is_sha256_hex,
    read_jsonl,
    sha256_hex,
    utc_now,
)
from plp.errors import (
    BackwardPromotion,
    DuplicateVersionConflict,
    EmptyDocument,
    SkippedStage,
    UnknownDocument,
)

DOC_KINDS = (
    "patient_insert",
    "professional_insert",
    "monograph",
    "smpc",
    "protocol",
    "normative_act",
)

EVENT_KINDS = ("ingested", "promoted", "marked_current", "integrity_checked")


class MaturityStage(IntEnum):
    RAW = 0
    CLEANED = 1
    STRUCTURED = 2
    CURATED = 3

    @classmethod
    def parse(cls, name: str) -> "MaturityStage":
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown maturity stage: {name!r}")


@dataclass(frozen=True)
class LineageKey:
    """Identity of one document lineage across all its versions."""

    source: str
    registration_id: str
    doc_kind: str
    medication_name: str

    def __post_init__(self):
        for name in ("source", "registration_id", "doc_kind", "medication_name"):
            if not getattr(self, name):
                raise ValueError(f"lineage field {name} must be non-empty")
        if self.doc_kind not in DOC_KINDS:
            raise ValueError(f"unknown doc_kind: {self.doc_kind!r}")

    def as_tuple(self) -> tuple:
        return (self.source, self.registration_id, self.doc_kind, self.medication_name)

    def as_payload(self) -> dict:
        return {
            "source": self.source,
            "registration_id": self.registration_id,
            "doc_kind": self.doc_kind,
            "medication_name": self.medication_name,
        }


@dataclass
class DocumentRef:
    doc_id: str
    lineage: LineageKey
    version_label: str
    checksum: str
    format: str
    capture_date: str
    is_current: bool
    maturity: MaturityStage
    active_ingredient: str
    artifacts: dict = field(default_factory=dict)  # stage name -> artifact checksum

    def as_payload(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "lineage": self.lineage.as_payload(),
            "version_label": self.version_label,
            "checksum": self.checksum,
            "format": self.format,
            "capture_date": self.capture_date,
            "is_current": self.is_current,
            "maturity": self.maturity.name,
            "active_ingredient": self.active_ingredient,
            "artifacts": dict(sorted(self.artifacts.items())),
        }


@dataclass(frozen=True)
class ProvenanceEvent:
    event_id: str
    doc_id: str
    kind: str
    timestamp: str
    detail: dict

    def as_payload(self) -> dict:
        return {
            "event_id": self.event_id,
            "doc_id": self.doc_id,
            "kind": self.kind,
            "timestamp": self.timestamp,
            "detail": self.detail,
        }


def compute_doc_id(lineage: LineageKey, version_label: str, checksum: str) -> str:
    """Deterministic id: same lineage + label + content always yields the same id."""
    seed = canonical_json(list(lineage.as_tuple()) + [version_label, checksum])
    return "DOC-" + sha256_hex(seed.encode("utf-8"))[:16]


class _LineageState:
    __slots__ = ("doc_ids", "current_doc_id")

    def __init__(self):
        self.doc_ids: list[str] = []  # in ingestion order
        self.current_doc_id: Optional[str] = None


class DocumentStore:
    """File-backed store; all mutations append to the event log first."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.blob_dir = self.root / "blobs"
        self.events_path = self.root / "store" / "events.jsonl"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self.events_path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._docs: dict[str, DocumentRef] = {}
        self._lineages: dict[tuple, _LineageState] = {}
        self._events: list[ProvenanceEvent] = []
        self._events_by_doc: dict[str, list[ProvenanceEvent]] = {}
        self._replay()

    # Event log ---------------------------------------------------------------

    def _replay(self) -> None:
        for record in read_jsonl(self.events_path):
            event = ProvenanceEvent(
                event_id=record["event_id"],
                doc_id=record["doc_id"],
                kind=record["kind"],
                timestamp=record["timestamp"],
                detail=record["detail"],
            )
            self._apply(event)
            self._track(event)

    def _track(self, event: ProvenanceEvent) -> None:
        self._events.append(event)
        self._events_by_doc.setdefault(event.doc_id, []).append(event)

    def _append(self, doc_id: str, kind: str, detail: dict, at: Optional[str]) -> ProvenanceEvent:
        event = ProvenanceEvent(
            event_id=f"EVT-{len(self._events) + 1:08d}",
            doc_id=doc_id,
            kind=kind,
            timestamp=at or utc_now(),
            detail=detail,
        )
        with open(self.events_path, "a", encoding="utf-8") as fh:
            fh.write(canonical_json(event.as_payload()) + "\n")
        self._apply(event)
        self._track(event)
        return event

    def _apply(self, event: ProvenanceEvent) -> None:
        """Fold one event into in-memory state (used live and during replay)."""
        if event.kind == "ingested":
            d = event.detail
            lineage = LineageKey(
                source=d["source"],
                registration_id=d["registration_id"],
                doc_kind=d["doc_kind"],
                medication_name=d["medication_name"],
            )
            ref = DocumentRef(
                doc_id=event.doc_id,
                lineage=lineage,
                version_label=d["version_label"],
                checksum=d["checksum"],
                format=d["format"],
                capture_date=d["capture_date"],
                is_current=False,
                maturity=MaturityStage.RAW,
                active_ingredient=d.get("active_ingredient", ""),
            )
            self._docs[event.doc_id] = ref
            state = self._lineages.setdefault(lineage.as_tuple(), _LineageState())
            state.doc_ids.append(event.doc_id)
            if state.current_doc_id is None:
                self._set_current(state, event.doc_id)
        elif event.kind == "marked_current":
            ref = self._docs[event.doc_id]
            state = self._lineages[ref.lineage.as_tuple()]
            self._set_current(state, event.doc_id)
        elif event.kind == "promoted":
            ref = self._docs[event.doc_id]
            ref.maturity = MaturityStage.parse(event.detail["to"])
            artifact = event.detail.get("artifact_checksum")
            if artifact:
                ref.artifacts[event.detail["to"]] = artifact
        elif event.kind == "integrity_checked":
            pass  # audit-only
        else:
            raise ValueError(f"unknown event kind in log: {event.kind!r}")

    def _set_current(self, state: _LineageState, doc_id: str) -> None:
        for other in state.doc_ids:
            self._docs[other].is_current = other == doc_id
        state.current_doc_id = doc_id

    # Blob plane ----------------------------------------------------------------

    def _blob_path(self, checksum: str) -> Path:
        return self.blob_dir / checksum[:2] / checksum

    def _write_blob(self, data: bytes) -> str:
        checksum = sha256_hex(data)
        path = self._blob_path(checksum)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        return checksum

    def get_blob(self, checksum: str) -> bytes:
        path = self._blob_path(checksum)
        if not path.exists():
            raise UnknownDocument(f"no blob stored for checksum {checksum}")
        return path.read_bytes()

    # Operations -----------------------------------------------------------------

    def ingest_document(
        self,
        data: bytes,
        lineage: LineageKey,
        version_label: str,
        format: str,
        capture_date: str,
        active_ingredient: str = "",
        at: Optional[str] = None,
    ) -> DocumentRef:
        if not data:
            raise EmptyDocument("refusing to ingest an empty document")
        if not version_label:
            raise ValueError("version_label must be non-empty")
        checksum = sha256_hex(data)
        doc_id = compute_doc_id(lineage, version_label, checksum)
        with self._lock:
            existing = self._docs.get(doc_id)
            if existing is not None:
                return existing  # identical (lineage, label, bytes): idempotent
            state = self._lineages.get(lineage.as_tuple())
            if state is not None:
                for other_id in state.doc_ids:
                    other = self._docs[other_id]
                    if other.version_label == version_label:
                        raise DuplicateVersionConflict(
                            f"version {version_label!r} of this lineage already exists "
                            "with different content",
                            detail={"existing_doc_id": other_id},
                        )
            self._write_blob(data)
            self._append(
                doc_id,
                "ingested",
                {
                    **lineage.as_payload(),
                    "version_label": version_label,
                    "checksum": checksum,
                    "format": format,
                    "capture_date": capture_date,
                    "active_ingredient": active_ingredient or lineage.medication_name,
                },
                at,
            )
            return self._docs[doc_id]

    def get_document(self, doc_id: str) -> DocumentRef:
        ref = self._docs.get(doc_id)
        if ref is None:
            raise UnknownDocument(f"unknown document: {doc_id}")
        return ref

    def has_document(self, doc_id: str) -> bool:
        return doc_id in self._docs

    def get_bytes(self, doc_id: str) -> bytes:
        return self.get_blob(self.get_document(doc_id).checksum)

    def get_text_artifact(self, doc_id: str) -> bytes:
        """Best text representation: latest derived artifact, else the raw bytes."""
        ref = self.get_document(doc_id)
        for stage in ("CURATED", "STRUCTURED", "CLEANED"):
            if stage in ref.artifacts:
                return self.get_blob(ref.artifacts[stage])
        return self.get_blob(ref.checksum)

    def verify_integrity(self, doc_id: str, at: Optional[str] = None) -> dict:
        ref = self.get_document(doc_id)
        path = self._blob_path(ref.checksum)
        if not path.exists():
            result = "corrupted"
        else:
            result = "ok" if sha256_hex(path.read_bytes()) == ref.checksum else "corrupted"
        with self._lock:
            self._append(doc_id, "integrity_checked", {"result": result}, at)
        return {"doc_id": doc_id, "checksum": ref.checksum, "result": result}

    def list_versions(self, lineage: LineageKey) -> list[DocumentRef]:
        state = self._lineages.get(lineage.as_tuple())
        if state is None:
            return []
        refs = [self._docs[doc_id] for doc_id in state.doc_ids]
        order = {doc_id: i for i, doc_id in enumerate(state.doc_ids)}
        refs.sort(key=lambda r: (r.capture_date, order[r.doc_id]))
        return refs

    def mark_current(self, doc_id: str, at: Optional[str] = None) -> DocumentRef:
        with self._lock:
            ref = self.get_document(doc_id)
            if ref.is_current:
                return ref  # no-op, nothing to audit
            self._append(doc_id, "marked_current", {}, at)
            return ref

    def promote_maturity(
        self,
        doc_id: str,
        target: MaturityStage,
        derived_artifact: Optional[bytes] = None,
        at: Optional[str] = None,
    ) -> DocumentRef:
        with self._lock:
            ref = self.get_document(doc_id)
            if target <= ref.maturity:
                raise BackwardPromotion(
                    f"cannot move {ref.maturity.name} document back/sideways to {target.name}"
                )
            if target != ref.maturity + 1:
                raise SkippedStage(
                    f"promotion must advance one stage: {ref.maturity.name} -> {target.name}"
                )
            detail = {"from": ref.maturity.name, "to": target.name}
            if derived_artifact is not None:
                if not derived_artifact:
                    raise EmptyDocument("derived artifact must be non-empty when supplied")
                detail["artifact_checksum"] = self._write_blob(derived_artifact)
            self._append(doc_id, "promoted", detail, at)
            return ref

    def get_audit_trail(self, doc_id: str) -> list[ProvenanceEvent]:
        self.get_document(doc_id)  # raises UnknownDocument
        return list(self._events_by_doc.get(doc_id, []))

    # Introspection ----------------------------------------------------------------

    def all_documents(self) -> list[DocumentRef]:
        return [self._docs[doc_id] for doc_id in sorted(self._docs)]

    def document_count(self) -> int:
        return len(self._docs)

    def last_event_timestamp(self) -> Optional[str]:
        return self._events[-1].timestamp if self._events else None


def parse_manifest_record(record: dict) -> tuple[LineageKey, dict]:
    """Validate one import-manifest line into (lineage, remaining fields)."""
    required = (
        "source",
        "registration_id",
        "doc_kind",
        "medication_name",
        "version_label",
        "format",
        "capture_date",
        "path",
    )
    missing = [name for name in required if not record.get(name)]
    if missing:
        raise ValueError(f"manifest record missing fields: {', '.join(missing)}")
    lineage = LineageKey(
        source=record["source"],
        registration_id=record["registration_id"],
        doc_kind=record["doc_kind"],
        medication_name=record["medication_name"],
    )
    return lineage, {
        "version_label": record["version_label"],
        "format": record["format"],
        "capture_date": record["capture_date"],
        "path": record["path"],
        "active_ingredient": record.get("active_ingredient", ""),
    }


def checksum_is_plausible(checksum: str) -> bool:
    return is_sha256_hex(checksum)
