"""HTTP service over a corpus.

Response bodies for validate, refract, trace, and metrics are the exact
canonical bytes the core modules produce, so they are byte-diffable against
structured CLI output on the same data directory.

Configuration is a JSON file with ``{data_dir, listen_addr, fixture_path}``;
each field can be overridden by the ``PLP_DATA_DIR``, ``PLP_LISTEN_ADDR``,
and ``PLP_FIXTURE_PATH`` environment variables. ``fixture_path`` may be the
builtin name ``dipyrone`` (loads the golden corpus into an empty data dir)
or a path to a line-delimited document manifest.

Curator identity is taken verbatim from the ``X-Curator`` request header;
there is no authentication. Mutating endpoints honor an ``Idempotency-Key``
header: a replayed key returns the stored prior response.
"""

from __future__ import annotations

import base64
import errno
import json
import os
import socket
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from plp.canonical import canonical_json
from plp.corpus import Corpus, lineage_from_payload, parse_pack_inputs
from plp.errors import AddressInUse, ConfigInvalid, MissingCurator, PlpError
from plp.lector import PACK_STATES, validate_well_formed
from plp.metrics import compute_metrics

ENV_PREFIX = "PLP_"

# Domain error code -> HTTP status. Anything unlisted is a semantic 422.
_STATUS_BY_CODE = {
    "unknown_document": 404,
    "unknown_pack": 404,
    "unknown_entity": 404,
    "unknown_organization": 404,
    "unknown_graph": 404,
    "unknown_parent": 404,
    "not_found": 404,
    "duplicate_version_conflict": 409,
    "duplicate_pack": 409,
    "duplicate_link": 409,
    "ambiguous_identifier": 409,
    "illegal_transition": 409,
}


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: str
    listen_addr: str = "127.0.0.1:8641"
    fixture_path: Optional[str] = None

    @classmethod
    def load(cls, config_file: Optional[str] = None, overrides: Optional[dict] = None) -> "ServiceConfig":
        values = {"data_dir": "./plp-data", "listen_addr": "127.0.0.1:8641", "fixture_path": None}
        if config_file:
            try:
                raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigInvalid(f"cannot read config file {config_file}: {exc}")
            if not isinstance(raw, dict):
                raise ConfigInvalid("config file must hold a JSON object")
            unknown = set(raw) - set(values)
            if unknown:
                raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)
        for key in values:
            env = os.environ.get(ENV_PREFIX + key.upper())
            if env:
                values[key] = env
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        config = cls(**values)
        config.split_addr()  # validate early
        return config

    def split_addr(self) -> tuple:
        host, sep, port = self.listen_addr.rpartition(":")
        if not sep or not host or not port.isdigit():
            raise ConfigInvalid(f"listen_addr must be host:port, got {self.listen_addr!r}")
        return host, int(port)


def load_fixture(corpus: Corpus, fixture_path: str) -> None:
    if fixture_path == "dipyrone":
        if corpus.store.document_count() == 0:
            from plp.fixtures import load_dipyrone

            load_dipyrone(corpus)
        return
    corpus.ingest_manifest(fixture_path)


def _canonical_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(corpus: Corpus) -> FastAPI:
    app = FastAPI(title="plp", docs_url=None, redoc_url=None)
    app.state.corpus = corpus
    idempotency_cache: dict = {}
    idempotency_lock = threading.Lock()

    @app.exception_handler(PlpError)
    async def plp_error_handler(_request: Request, exc: PlpError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 422),
            content=exc.as_payload(),
        )

    @app.middleware("http")
    async def idempotency_replay(request: Request, call_next):
        key = request.headers.get("Idempotency-Key")
        if not key or request.method not in ("POST", "PUT", "DELETE"):
            return await call_next(request)
        cache_key = (request.method, request.url.path, key)
        with idempotency_lock:
            hit = idempotency_cache.get(cache_key)
        if hit is not None:
            status, body, headers = hit
            return Response(content=body, status_code=status, headers=headers)
        response = await call_next(request)
        body = b""
        async for chunk in response.body_iterator:
            body += chunk
        headers = {
            k: v for k, v in response.headers.items() if k.lower() != "content-length"
        }
        if response.status_code < 300:  # replay only successes; failures may be retried
            with idempotency_lock:
                idempotency_cache[cache_key] = (response.status_code, body, headers)
        return Response(content=body, status_code=response.status_code, headers=headers)

    async def body_of(request: Request) -> dict:
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            raise ValueError("request body must be valid JSON")
        if not isinstance(payload, dict):
            raise ValueError("request body must be a JSON object")
        return payload

    # Documents ------------------------------------------------------------------

    @app.post("/documents")
    async def ingest_document(request: Request):
        payload = await body_of(request)
        if "content_base64" in payload:
            data = base64.b64decode(payload["content_base64"])
        else:
            data = str(payload.get("text", "")).encode("utf-8")
        ref = corpus.store.ingest_document(
            data,
            lineage_from_payload(payload),
            version_label=payload.get("version_label", ""),
            format=payload.get("format", "txt"),
            capture_date=payload.get("capture_date", ""),
            active_ingredient=payload.get("active_ingredient", ""),
        )
        return _canonical_response(ref.as_payload(), status_code=201)

    @app.get("/documents/{doc_id}/versions")
    async def document_versions(doc_id: str):
        ref = corpus.store.get_document(doc_id)
        versions = corpus.store.list_versions(ref.lineage)
        return _canonical_response({"versions": [v.as_payload() for v in versions]})

    @app.post("/documents/{doc_id}/verify")
    async def verify_document(doc_id: str):
        return _canonical_response(corpus.store.verify_integrity(doc_id))

    @app.get("/documents/{doc_id}/audit")
    async def document_audit(doc_id: str):
        events = corpus.store.get_audit_trail(doc_id)
        return _canonical_response({"events": [e.as_payload() for e in events]})

    # Evidence packs --------------------------------------------------------------

    @app.post("/packs")
    async def create_pack(request: Request):
        payload = await body_of(request)
        inputs = parse_pack_inputs(payload)
        derived_from = payload.get("derived_from")
        if derived_from:
            pack = corpus.lector.derive_pack(
                derived_from,
                inputs["question"],
                inputs["response"],
                inputs["provenance"],
                inputs["limits"],
                inputs["focus"],
                pack_id=inputs["pack_id"],
            )
        else:
            pack = corpus.lector.create_pack(
                inputs["question"],
                inputs["response"],
                inputs["provenance"],
                inputs["limits"],
                inputs["focus"],
                pack_id=inputs["pack_id"],
            )
        return _canonical_response(pack.as_payload(), status_code=201)

    @app.get("/packs")
    async def list_packs(state: Optional[str] = None):
        if state is not None and state not in PACK_STATES:
            raise ValueError(f"unknown pack state: {state!r}")
        packs = corpus.lector.all_packs()
        if state is not None:
            packs = [p for p in packs if p.status.state == state]
        return _canonical_response({"packs": [p.as_payload() for p in packs]})

    @app.get("/packs/{pack_id}")
    async def get_pack(pack_id: str):
        return _canonical_response(corpus.lector.get_pack(pack_id).as_payload())

    @app.post("/packs/{pack_id}/submit")
    async def submit_pack(pack_id: str):
        return _canonical_response(corpus.lector.submit_for_review(pack_id).as_payload())

    @app.post("/packs/{pack_id}/curate")
    async def curate_pack(pack_id: str, request: Request):
        payload = await body_of(request)
        curator = request.headers.get("X-Curator", "")
        if not curator.strip():
            raise MissingCurator("provide the curator identity in the X-Curator header")
        pack, decision = corpus.lector.curate(
            pack_id,
            payload.get("verdict", ""),
            curator,
            payload.get("justification", ""),
        )
        return _canonical_response({"pack": pack.as_payload(), "decision": decision.as_payload()})

    @app.get("/packs/{pack_id}/validate")
    async def validate_pack(pack_id: str):
        pack = corpus.lector.get_pack(pack_id)
        return _canonical_response(validate_well_formed(pack, corpus.store))

    @app.get("/packs/{pack_id}/decisions")
    async def pack_decisions(pack_id: str):
        corpus.lector.get_pack(pack_id)
        decisions = corpus.lector.decisions_for(pack_id)
        return _canonical_response({"decisions": [d.as_payload() for d in decisions]})

    # Ontology and links ----------------------------------------------------------

    @app.post("/links")
    async def create_link(request: Request):
        payload = await body_of(request)
        link = corpus.ontology.link_evidence(
            payload.get("pack_id", ""), payload.get("entity_id", "")
        )
        return _canonical_response(link.as_payload(), status_code=201)

    @app.get("/entities/{entity_id}")
    async def get_entity(entity_id: str):
        entity = corpus.ontology.get_entity(entity_id)
        payload = entity.as_payload()
        payload["links"] = corpus.ontology.packs_linked_to([entity_id])
        return _canonical_response(payload)

    @app.get("/entities/{entity_id}/views/{view}")
    async def entity_view(entity_id: str, view: str):
        graph = corpus.refraction.refract(entity_id, view)
        return Response(content=graph.file_str.encode("utf-8"), media_type="application/json")

    # Graphs ----------------------------------------------------------------------

    @app.get("/graphs")
    async def list_graphs():
        return _canonical_response({"graphs": corpus.refraction.manifest_entries()})

    @app.get("/graphs/{graph_id}")
    async def get_graph(graph_id: str):
        return Response(
            content=corpus.refraction.load_graph_bytes(graph_id),
            media_type="application/json",
        )

    @app.get("/graphs/{graph_id}/trace/{node_id}")
    async def trace_graph(graph_id: str, node_id: str):
        return _canonical_response(corpus.refraction.trace(graph_id, node_id))

    @app.post("/refract-all")
    async def refract_all():
        return _canonical_response(corpus.refraction.refract_all())

    # Metrics -----------------------------------------------------------------------

    @app.get("/metrics")
    async def metrics():
        return _canonical_response(compute_metrics(corpus))

    @app.exception_handler(ValueError)
    async def value_error_handler(_request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_request", "message": str(exc), "detail": None},
        )

    return app


def serve(config: ServiceConfig):
    """Run the service until interrupted. Raises AddressInUse when the
    configured address is already bound."""
    import uvicorn

    corpus = Corpus(config.data_dir)
    if config.fixture_path:
        load_fixture(corpus, config.fixture_path)
    host, port = config.split_addr()
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise AddressInUse(f"{config.listen_addr} is already bound")
        raise ConfigInvalid(f"cannot bind {config.listen_addr}: {exc}")
    finally:
        probe.close()
    app = create_app(corpus)
    uvicorn.run(app, host=host, port=port, log_level="warning")
