"""One handle over the whole stack, bound to a single data directory.

Layout under the data dir::

    blobs/            content-addressed document + artifact bytes
    store/            append-only document event log
    lector/           packs, curatorial decisions, page-index trees
    ontology/         entity/identifier/synonym/org/link logs
    graphs/           materialized context graphs + manifest

The CLI and the HTTP service both operate exclusively through this class, so
their outputs are the same bytes by construction.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from plp.lector import (
    EpistemicLimits,
    GroundedResponse,
    LectorEngine,
    ProvenanceChainEntry,
    QualifiedQuestion,
)
from plp.ontology import OntologyStore
from plp.refraction import RefractionEngine
from plp.store import DocumentStore, LineageKey, parse_manifest_record


class Corpus:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.store = DocumentStore(self.root)
        self.lector = LectorEngine(self.root, self.store)
        self.ontology = OntologyStore(self.root, pack_state=self._pack_state)
        self.refraction = RefractionEngine(self.root, self.ontology, self.lector, self.store)

    def _pack_state(self, pack_id: str) -> Optional[str]:
        if not self.lector.has_pack(pack_id):
            return None
        return self.lector.get_pack(pack_id).status.state

    def snapshot_instant(self) -> str:
        return self.refraction.snapshot_instant()

    # Manifest-driven ingestion ------------------------------------------------------

    def ingest_manifest(self, manifest_path) -> dict:
        manifest_path = Path(manifest_path)
        base = manifest_path.parent
        ingested = []
        with open(manifest_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"manifest line {line_no} is not valid JSON: {exc}")
                lineage, fields = parse_manifest_record(record)
                doc_path = Path(fields["path"])
                if not doc_path.is_absolute():
                    doc_path = base / doc_path
                ref = self.store.ingest_document(
                    doc_path.read_bytes(),
                    lineage,
                    version_label=fields["version_label"],
                    format=fields["format"],
                    capture_date=fields["capture_date"],
                    active_ingredient=fields["active_ingredient"],
                )
                ingested.append(ref)
        return {"ingested": len(ingested), "doc_ids": [ref.doc_id for ref in ingested]}


# Request-payload parsing shared by the CLI and the service ------------------------------

def parse_pack_inputs(payload: dict) -> dict:
    """Turn a serialized pack request into constructor arguments.

    Deliberately tolerant of missing pieces: the structural validator is the
    single authority on what is malformed, so absent fields become values it
    will flag rather than parse errors here.
    """
    question_payload = payload.get("question") or {}
    response_payload = payload.get("response") or {}
    limits_payload = payload.get("limits")
    question = QualifiedQuestion(
        text=question_payload.get("text", ""),
        assertion_type=question_payload.get("assertion_type", ""),
    )
    response = GroundedResponse(
        assertion=response_payload.get("assertion", ""),
        validity_conditions=tuple(response_payload.get("validity_conditions", ())),
        invalidity_conditions=tuple(response_payload.get("invalidity_conditions", ())),
    )
    provenance = [
        ProvenanceChainEntry(
            doc_id=entry.get("doc_id", ""),
            version_label=entry.get("version_label", ""),
            checksum=entry.get("checksum", ""),
            node_ids=tuple(entry.get("node_ids", ())),
        )
        for entry in payload.get("provenance", [])
    ]
    if isinstance(limits_payload, dict) and all(
        isinstance(limits_payload.get(key), list)
        for key in ("divergences", "gaps", "dependencies", "silences")
    ):
        limits = EpistemicLimits(
            divergences=tuple(limits_payload["divergences"]),
            gaps=tuple(limits_payload["gaps"]),
            dependencies=tuple(limits_payload["dependencies"]),
            silences=tuple(limits_payload["silences"]),
        )
    else:
        # Missing or partial limits: EpistemicLimits cannot represent
        # "absent", so the caller validates the raw payload instead.
        limits = None
    return {
        "question": question,
        "response": response,
        "provenance": provenance,
        "limits": limits,
        "focus": payload.get("focus", ""),
        "pack_id": payload.get("pack_id"),
    }


def lineage_from_payload(payload: dict) -> LineageKey:
    return LineageKey(
        source=payload.get("source", ""),
        registration_id=payload.get("registration_id", ""),
        doc_kind=payload.get("doc_kind", ""),
        medication_name=payload.get("medication_name", ""),
    )
