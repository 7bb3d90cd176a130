"""Context-graph materialization and trace reconstruction.

One informational core, four contextual projections:

=====================  =========  =============================================
view                   level      attribute selection (fixed allowlist)
=====================  =========  =============================================
CTX_MPP_REGULATORY     AMPP       registration, status, label, storage, ean
CTX_VMP_COMPLETE       VMP        substance, concentration, atc, ddd, form,
                                  form_taxonomy, composition
CTX_DISPENSATION       VMPP       prescribable_unit, packaging, trade_product
CTX_SUBSTANCE_PROFILE  SUBSTANCE  identifier, synonym, vtm_mapping, vmp_mapping
=====================  =========  =============================================

Graphs are pure functions of the corpus snapshot: canonical JSON with sorted
keys, node arrays sorted by id, and a content digest over the serialization
with ``generated_at``/``content_digest`` excluded. Assertions enter a graph
only through accepted Evidence Packs reached by each view's scope rule, and
every assertion connects to its evidence-pack qualifier node, which mediates
the contextual dimensions (authority, scope, population, clinical context).

Population vs clinical-context tagging convention: validity/invalidity
condition strings prefixed ``population:`` become population nodes; strings
prefixed ``context:`` or untagged become clinical-context nodes.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from plp.canonical import canonical_json, sha256_hex
from plp.errors import (
    LevelViewMismatch,
    NotAnAssertionNode,
    PackNotAccepted,
    UnknownEntity,
    UnknownGraph,
    UnknownView,
)
from plp.lector import LectorEngine, illocutionary_class
from plp.ontology import OntologyStore
from plp.store import DocumentStore

VIEW_KINDS = (
    "CTX_MPP_REGULATORY",
    "CTX_VMP_COMPLETE",
    "CTX_DISPENSATION",
    "CTX_SUBSTANCE_PROFILE",
)

VIEW_LEVELS = {
    "CTX_MPP_REGULATORY": "AMPP",
    "CTX_VMP_COMPLETE": "VMP",
    "CTX_DISPENSATION": "VMPP",
    "CTX_SUBSTANCE_PROFILE": "SUBSTANCE",
}

VIEW_ATTRIBUTE_ALLOWLISTS = {
    "CTX_MPP_REGULATORY": frozenset({"registration", "status", "label", "storage", "ean"}),
    "CTX_VMP_COMPLETE": frozenset(
        {"substance", "concentration", "atc", "ddd", "form", "form_taxonomy", "composition"}
    ),
    "CTX_DISPENSATION": frozenset({"prescribable_unit", "packaging", "trade_product"}),
    "CTX_SUBSTANCE_PROFILE": frozenset({"identifier", "synonym", "vtm_mapping", "vmp_mapping"}),
}

EPOCH = "1970-01-01T00:00:00Z"


def _slug(text: str) -> str:
    return sha256_hex(text.encode("utf-8"))[:12]


@dataclass
class ContextGraph:
    graph_id: str
    view: str
    root_entity_id: str
    nodes: list
    edges: list
    generated_at: str
    content_digest: str
    file_str: str

    def as_payload(self) -> dict:
        return json.loads(self.file_str)


def graph_id_for(view: str, entity_id: str) -> str:
    return f"{view}--{entity_id}"


def finalize_graph(view: str, root_entity_id: str, nodes: list, edges: list, generated_at: str) -> ContextGraph:
    """Digest and serialize in one pass.

    The digest covers the canonical serialization *without* generated_at and
    content_digest. The full file form is produced by string splice rather
    than a second dump; the splice points are provable because sorted key
    order puts content_digest first and generated_at immediately before
    graph_id, and the edges array (the only content before that point)
    contains machine ids only. test_refraction pins splice == re-dump.
    """
    nodes = sorted(nodes, key=lambda n: n["node_id"])
    edges = sorted(edges, key=lambda e: (e["src"], e["rel"], e["dst"]))
    gid = graph_id_for(view, root_entity_id)
    core = {
        "edges": edges,
        "graph_id": gid,
        "nodes": nodes,
        "root_entity_id": root_entity_id,
        "view": view,
    }
    payload = canonical_json(core)
    digest = sha256_hex(payload.encode("utf-8"))
    idx = payload.index('"graph_id"')
    file_str = (
        '{"content_digest":"' + digest + '",'
        + payload[1:idx]
        + '"generated_at":"' + generated_at + '",'
        + payload[idx:]
    )
    return ContextGraph(
        graph_id=gid,
        view=view,
        root_entity_id=root_entity_id,
        nodes=nodes,
        edges=edges,
        generated_at=generated_at,
        content_digest=digest,
        file_str=file_str,
    )


class RefractionEngine:
    def __init__(self, root: Path, ontology: OntologyStore, lector: LectorEngine, store: DocumentStore):
        self.root = Path(root)
        self.graphs_dir = self.root / "graphs"
        self.graphs_dir.mkdir(parents=True, exist_ok=True)
        self.ontology = ontology
        self.lector = lector
        self.store = store

    # Snapshot ------------------------------------------------------------------

    def snapshot_instant(self) -> str:
        candidates = [
            self.store.last_event_timestamp(),
            self.lector.last_decision_timestamp(),
            self.ontology.last_mutation_timestamp(),
        ]
        stamps = [c for c in candidates if c]
        return max(stamps) if stamps else EPOCH

    # Scope rules ----------------------------------------------------------------

    def _scope_entity_ids(self, view: str, root_id: str) -> list:
        if view == "CTX_MPP_REGULATORY" or view == "CTX_DISPENSATION":
            scope = {root_id}
            for descendant in self.ontology.descendants(root_id):
                if self.ontology.get_entity(descendant).level in ("AMP", "AMPP"):
                    scope.add(descendant)
            return sorted(scope)
        if view == "CTX_VMP_COMPLETE":
            return sorted(
                {root_id}
                | set(self.ontology.ancestors(root_id))
                | set(self.ontology.descendants(root_id))
            )
        if view == "CTX_SUBSTANCE_PROFILE":
            scope = {root_id}
            for child in self.ontology.children_of(root_id):
                if child.level == "VTM":
                    scope.add(child.entity_id)
            return sorted(scope)
        raise UnknownView(f"unknown view kind: {view!r}")

    # Attribute nodes ---------------------------------------------------------------

    def _attribute_nodes(self, view: str, entity) -> list:
        nodes = []
        allow = VIEW_ATTRIBUTE_ALLOWLISTS[view]

        def plain(key: str, value: str, discriminator: str = "", extra: Optional[dict] = None):
            node_id = f"attr:{key}" + (f":{discriminator}" if discriminator else "")
            props = {"key": key, "value": value}
            if extra:
                props.update(extra)
            nodes.append({"node_id": node_id, "kind": "attribute", "label": key, "props": props})

        if view == "CTX_MPP_REGULATORY":
            merged = {}
            for parent in self.ontology.parents_of(entity.entity_id):
                if parent.level == "AMP":
                    merged.update(parent.attributes)
            merged.update(entity.attributes)
            for key in sorted(merged):
                if key in allow:
                    plain(key, merged[key])
        elif view == "CTX_VMP_COMPLETE":
            for key in sorted(entity.attributes):
                if key in allow:
                    plain(key, entity.attributes[key])
        elif view == "CTX_DISPENSATION":
            for key in sorted(entity.attributes):
                if key in allow:
                    plain(key, entity.attributes[key])
            for descendant_id in self.ontology.descendants(entity.entity_id):
                descendant = self.ontology.get_entity(descendant_id)
                if descendant.level != "AMPP":
                    continue
                amp = next(
                    (p for p in self.ontology.parents_of(descendant_id) if p.level == "AMP"),
                    None,
                )
                extra = {
                    "brand": amp.display_name if amp else "",
                    "manufacturer": (amp.attributes.get("manufacturer", "") if amp else ""),
                    "ean": descendant.attributes.get("ean", ""),
                    "label": descendant.attributes.get("label", ""),
                    "status": descendant.attributes.get("status", ""),
                }
                plain("trade_product", descendant.display_name, descendant_id, extra)
        elif view == "CTX_SUBSTANCE_PROFILE":
            for ident in sorted(
                self.ontology.identifiers_of(entity.entity_id), key=lambda i: (i.scheme, i.value)
            ):
                plain(
                    "identifier",
                    f"{ident.scheme}: {ident.value}",
                    f"{ident.scheme}:{_slug(ident.value)}",
                    {"scheme": ident.scheme, "identifier_value": ident.value},
                )
            for synonym in sorted(
                self.ontology.synonyms_of(entity.entity_id), key=lambda s: (s.text, s.language or "")
            ):
                plain("synonym", synonym.text, _slug(synonym.text), {"language": synonym.language or ""})
            for vtm in self.ontology.children_of(entity.entity_id):
                if vtm.level != "VTM":
                    continue
                plain("vtm_mapping", vtm.display_name, vtm.entity_id, {"entity_id": vtm.entity_id})
                for vmp in self.ontology.children_of(vtm.entity_id):
                    if vmp.level == "VMP":
                        plain("vmp_mapping", vmp.display_name, vmp.entity_id, {"entity_id": vmp.entity_id})
        return nodes

    # Assertion clusters ---------------------------------------------------------------

    def _pack_cluster(self, pack, scope_node_id: str) -> tuple:
        """Nodes and edges for one accepted pack's assertion neighborhood."""
        if pack.status.state != "accepted":
            raise PackNotAccepted(
                f"graph would expose pack {pack.pack_id} in state {pack.status.state}; "
                "only curated-and-accepted evidence may be presented"
            )
        pid = pack.pack_id
        assertion_id = f"assertion:{pid}"
        qual_ep = f"qualifier:evidence_pack:{pid}"
        qual_type = f"qualifier:assertion_type:{pid}"
        qual_limits = f"qualifier:epistemic_limits:{pid}"
        qual_decision = f"qualifier:curatorial_decision:{pid}"
        nodes = [
            {
                "node_id": assertion_id,
                "kind": "assertion",
                "label": pack.response.assertion,
                "props": {
                    "pack_id": pid,
                    "assertion_type": pack.question.assertion_type,
                    "question": pack.question.text,
                    "focus": pack.focus,
                    "illocutionary_class": illocutionary_class(pack.question.assertion_type),
                },
            },
            {
                "node_id": qual_ep,
                "kind": "qualifier",
                "label": pid,
                "props": {
                    "qualifier_type": "evidence_pack",
                    "pack_id": pid,
                    "derived_from": pack.derived_from,
                },
            },
            {
                "node_id": qual_type,
                "kind": "qualifier",
                "label": pack.question.assertion_type,
                "props": {
                    "qualifier_type": "assertion_type",
                    "assertion_type": pack.question.assertion_type,
                    "illocutionary_class": illocutionary_class(pack.question.assertion_type),
                },
            },
            {
                "node_id": qual_limits,
                "kind": "qualifier",
                "label": "epistemic limits",
                "props": {"qualifier_type": "epistemic_limits", **pack.limits.as_payload()},
            },
            {
                "node_id": qual_decision,
                "kind": "qualifier",
                "label": "curatorial decision",
                "props": {
                    "qualifier_type": "curatorial_decision",
                    "state": pack.status.state,
                    "curator": pack.status.curator,
                    "justification": pack.status.justification,
                    "decided_at": pack.status.decided_at,
                },
            },
        ]
        edges = [
            {"src": scope_node_id, "dst": assertion_id, "rel": "presents"},
            {"src": assertion_id, "dst": qual_ep, "rel": "evidenced_by"},
            {"src": assertion_id, "dst": qual_type, "rel": "typed_as"},
            {"src": assertion_id, "dst": qual_limits, "rel": "bounded_by"},
            {"src": assertion_id, "dst": qual_decision, "rel": "validated_by"},
            {"src": qual_ep, "dst": scope_node_id, "rel": "scoped_to"},
        ]
        sources = []
        for entry in pack.provenance:
            source = "unknown"
            if self.store.has_document(entry.doc_id):
                source = self.store.get_document(entry.doc_id).lineage.source
            if source not in sources:
                sources.append(source)
        for source in sources:
            authority_id = f"authority:{_slug(source)}"
            nodes.append(
                {
                    "node_id": authority_id,
                    "kind": "authority",
                    "label": source,
                    "props": {"source": source},
                }
            )
            edges.append({"src": qual_ep, "dst": authority_id, "rel": "anchored_in"})
        for text, rel in [(t, "applies_when") for t in pack.response.validity_conditions] + [
            (t, "invalid_when") for t in pack.response.invalidity_conditions
        ]:
            if text.startswith("population:"):
                kind, label = "population", text[len("population:"):].strip()
            elif text.startswith("context:"):
                kind, label = "clinical_context", text[len("context:"):].strip()
            else:
                kind, label = "clinical_context", text
            node_id = f"{kind}:{_slug(text)}"
            nodes.append({"node_id": node_id, "kind": kind, "label": label, "props": {"condition": text}})
            edges.append({"src": qual_ep, "dst": node_id, "rel": rel})
        return nodes, edges

    # Refraction -------------------------------------------------------------------------

    def refract(self, entity_id: str, view: str, generated_at: Optional[str] = None) -> ContextGraph:
        if view not in VIEW_LEVELS:
            raise UnknownView(f"unknown view kind: {view!r}")
        entity = self.ontology.get_entity(entity_id)
        if entity.level != VIEW_LEVELS[view]:
            raise LevelViewMismatch(
                f"{view} applies to {VIEW_LEVELS[view]} entities; {entity_id} is {entity.level}"
            )
        return self._refract_checked(entity, view, generated_at or self.snapshot_instant())

    def _refract_checked(self, entity, view: str, generated_at: str) -> ContextGraph:
        scope_node_id = f"scope:{entity.entity_id}"
        nodes = [
            {
                "node_id": scope_node_id,
                "kind": "scope",
                "label": entity.display_name,
                "props": {"entity_id": entity.entity_id, "level": entity.level},
            }
        ]
        edges = []
        for attr_node in self._attribute_nodes(view, entity):
            nodes.append(attr_node)
            edges.append({"src": scope_node_id, "dst": attr_node["node_id"], "rel": "has_attribute"})
        seen_nodes = {node["node_id"] for node in nodes}
        for pack_id in self.ontology.packs_linked_to(self._scope_entity_ids(view, entity.entity_id)):
            pack = self.lector.get_pack(pack_id)
            cluster_nodes, cluster_edges = self._pack_cluster(pack, scope_node_id)
            for node in cluster_nodes:
                if node["node_id"] not in seen_nodes:
                    seen_nodes.add(node["node_id"])
                    nodes.append(node)
            edges.extend(cluster_edges)
        return finalize_graph(view, entity.entity_id, nodes, edges, generated_at)

    def refract_all(self, view_set: Optional[list] = None) -> dict:
        views = list(view_set) if view_set else list(VIEW_KINDS)
        for view in views:
            if view not in VIEW_LEVELS:
                raise UnknownView(f"unknown view kind: {view!r}")
        generated_at = self.snapshot_instant()
        # Rematerialization replaces the store wholesale; stale graphs from
        # entities that no longer exist must not survive. Expected files are
        # rewritten in place (mass unlink+recreate is pathological on some
        # filesystems); only orphans are unlinked. Not timed.
        expected = {
            f"{graph_id_for(view, entity.entity_id)}.json"
            for view in views
            for entity in self.ontology.entities_at_level(VIEW_LEVELS[view])
        }
        for existing in self.graphs_dir.glob("*.json"):
            if existing.name not in expected:
                existing.unlink()
        manifest: list[tuple] = []
        errors: list[dict] = []
        started = time.perf_counter()
        for view in sorted(views):
            for entity in self.ontology.entities_at_level(VIEW_LEVELS[view]):
                try:
                    graph = self._refract_checked(entity, view, generated_at)
                except Exception as exc:  # per-entity failures are reported, never fatal
                    errors.append(
                        {
                            "entity_id": entity.entity_id,
                            "view": view,
                            "code": getattr(exc, "code", "error"),
                            "message": str(exc),
                        }
                    )
                    leftover = self.graphs_dir / f"{graph_id_for(view, entity.entity_id)}.json"
                    if leftover.exists():
                        leftover.unlink()
                    continue
                path = self.graphs_dir / f"{graph.graph_id}.json"
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(graph.file_str)
                manifest.append((graph.graph_id, graph.view, graph.root_entity_id, graph.content_digest))
        elapsed = time.perf_counter() - started
        manifest.sort()
        with open(self.graphs_dir / "manifest.jsonl", "w", encoding="utf-8") as fh:
            for gid, view, root, digest in manifest:
                fh.write(
                    canonical_json(
                        {"graph_id": gid, "view": view, "root_entity_id": root, "digest": digest}
                    )
                    + "\n"
                )
        return {
            "graph_count": len(manifest),
            "elapsed_seconds": round(elapsed, 6),
            "views": sorted({view for _, view, _, _ in manifest}),
            "errors": errors,
        }

    # Materialized-store access ------------------------------------------------------------

    def manifest_entries(self) -> list:
        from plp.canonical import read_jsonl

        return read_jsonl(self.graphs_dir / "manifest.jsonl")

    def load_graph_payload(self, graph_id: str) -> dict:
        path = self.graphs_dir / f"{graph_id}.json"
        if not path.exists():
            raise UnknownGraph(f"no materialized graph named {graph_id}")
        return json.loads(path.read_text(encoding="utf-8"))

    def load_graph_bytes(self, graph_id: str) -> bytes:
        path = self.graphs_dir / f"{graph_id}.json"
        if not path.exists():
            raise UnknownGraph(f"no materialized graph named {graph_id}")
        return path.read_bytes()

    # Trace ---------------------------------------------------------------------------------

    def trace(self, graph_id: str, assertion_node_id: str) -> dict:
        payload = self.load_graph_payload(graph_id)
        node = next((n for n in payload["nodes"] if n["node_id"] == assertion_node_id), None)
        if node is None:
            raise NotAnAssertionNode(f"graph {graph_id} has no node {assertion_node_id}")
        if node["kind"] != "assertion":
            raise NotAnAssertionNode(
                f"{assertion_node_id} is a {node['kind']} node; traces start at assertions"
            )
        pack = self.lector.get_pack(node["props"]["pack_id"])
        entries = []
        complete = True
        for entry in pack.provenance:
            result = "verified"
            source = ""
            if not self.store.has_document(entry.doc_id):
                result = "missing"
            else:
                ref = self.store.get_document(entry.doc_id)
                source = ref.lineage.source
                if ref.checksum != entry.checksum or ref.version_label != entry.version_label:
                    result = "corrupted"
                else:
                    try:
                        blob = self.store.get_blob(ref.checksum)
                    except Exception:
                        result = "missing"
                    else:
                        if sha256_hex(blob) != entry.checksum:
                            result = "corrupted"
            if result != "verified":
                complete = False
            entries.append(
                {
                    "doc_id": entry.doc_id,
                    "version_label": entry.version_label,
                    "checksum": entry.checksum,
                    "node_ids": sorted(entry.node_ids),
                    "source": source,
                    "result": result,
                }
            )
        return {
            "graph_id": graph_id,
            "assertion_node_id": assertion_node_id,
            "pack_id": pack.pack_id,
            "assertion": pack.response.assertion,
            "assertion_type": pack.question.assertion_type,
            "question": pack.question.text,
            "curator": pack.status.curator,
            "justification": pack.status.justification,
            "decided_at": pack.status.decided_at,
            "derived_from": pack.derived_from,
            "entries": entries,
            "complete": complete,
        }

    def verify_pack_chain(self, pack) -> bool:
        """True iff every provenance entry of the pack verifies against the store."""
        for entry in pack.provenance:
            if not self.store.has_document(entry.doc_id):
                return False
            ref = self.store.get_document(entry.doc_id)
            if ref.checksum != entry.checksum or ref.version_label != entry.version_label:
                return False
            try:
                blob = self.store.get_blob(ref.checksum)
            except Exception:
                return False
            if sha256_hex(blob) != entry.checksum:
                return False
        return True


def filter_assertions(payload: dict, types) -> dict:
    """Sub-graph keeping only assertions of the given types.

    The graph skeleton (scope root and attribute nodes) survives; assertion
    clusters of other types are removed along with their qualifier nodes and
    any dimension nodes left unreferenced. The input payload is not mutated.
    """
    wanted = set(types)
    keep_packs = {
        node["props"]["pack_id"]
        for node in payload["nodes"]
        if node["kind"] == "assertion" and node["props"]["assertion_type"] in wanted
    }

    def node_pack(node) -> Optional[str]:
        if node["kind"] in ("assertion", "qualifier"):
            return node["props"].get("pack_id") or node["node_id"].rsplit(":", 1)[-1]
        return None

    kept_nodes = []
    for node in payload["nodes"]:
        if node["kind"] in ("assertion", "qualifier"):
            if node_pack(node) in keep_packs:
                kept_nodes.append(node)
        elif node["kind"] in ("population", "clinical_context", "authority"):
            continue  # re-added below if still referenced
        else:
            kept_nodes.append(node)
    kept_ids = {node["node_id"] for node in kept_nodes}
    kept_edges = [
        edge
        for edge in payload["edges"]
        if edge["src"] in kept_ids or edge["dst"] in kept_ids
    ]
    referenced = {edge["src"] for edge in kept_edges} | {edge["dst"] for edge in kept_edges}
    for node in payload["nodes"]:
        if node["kind"] in ("population", "clinical_context", "authority") and node["node_id"] in referenced:
            kept_nodes.append(node)
            kept_ids.add(node["node_id"])
    kept_edges = [
        edge for edge in kept_edges if edge["src"] in kept_ids and edge["dst"] in kept_ids
    ]
    graph = finalize_graph(
        payload["view"],
        payload["root_entity_id"],
        kept_nodes,
        kept_edges,
        payload["generated_at"],
    )
    return graph.as_payload()
