"""Reading artifacts and the Evidence Pack engine.

An Evidence Pack is the unit of accountable assertion: a qualified question,
a grounded response, a provenance chain into exact document versions, an
explicit statement of epistemic limits, and a curatorial status. Packs move
through a strictly forward lifecycle (draft → under_review → accepted |
rejected); terminal packs are frozen and can only be *derived from*, never
edited.

Well-formedness is checked against six numbered conditions:

1. the question carries a type from the closed taxonomy;
2. at least one provenance record exists;
3. every cited (doc, version, checksum) matches the document store — this one
   needs store access and is reported "unverifiable" without it;
4. every provenance record names at least one document node;
5. the four epistemic-limit lists are explicitly present (empty is fine,
   absent is not);
6. accepted/rejected packs carry a curator and a justification.

The validator never raises: it reports condition ids.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from plp.canonical import canonical_json, read_jsonl, utc_now
from plp.errors import (
    DocumentNotCleaned,
    DuplicatePack,
    IllegalTransition,
    MissingCurator,
    MissingJustification,
    MissingSilenceEntry,
    ReaderFailure,
    StructuralViolation,
    UnknownPack,
    UnknownReader,
)
from plp.store import DocumentStore, MaturityStage

ASSERTION_TYPES = (
    "INDICATION",
    "CONTRAINDICATION",
    "DOSING",
    "INTERACTION",
    "ADVERSE_REACTION",
    "WARNING",
    "PRECAUTION",
    "SPECIAL_POPULATION",
    "NORMATIVE_SILENCE",
)

# Illocutionary classification of each assertion type, after Searle's
# taxonomy of speech acts. The force strings are what the UI shows curators.
ILLOCUTIONARY_TABLE = {
    "INDICATION": ("assertive", "Commits to truth of therapeutic applicability"),
    "CONTRAINDICATION": ("directive", "Instructs the professional to avoid"),
    "DOSING": ("directive+assertive", "Prescribes conduct with factual basis"),
    "INTERACTION": ("assertive+directive", "States a fact and warns about consequences"),
    "ADVERSE_REACTION": ("assertive", "Reports observed or documented effects"),
    "WARNING": ("directive", "Urges caution under specified conditions"),
    "PRECAUTION": ("directive", "Recommends monitoring or adjusted use"),
    "SPECIAL_POPULATION": ("assertive+directive", "Qualifies applicability to a subgroup"),
    "NORMATIVE_SILENCE": ("non-commitment", "Signals absence of regulatory pronouncement"),
}

PACK_STATES = ("draft", "under_review", "accepted", "rejected")

# The complete set of legal lifecycle moves. Everything else is illegal,
# including every backward arrow and every self-loop.
LEGAL_TRANSITIONS = frozenset(
    {
        ("draft", "under_review"),
        ("under_review", "accepted"),
        ("under_review", "rejected"),
    }
)

TERMINAL_STATES = frozenset({"accepted", "rejected"})


def illocutionary_class(assertion_type: str) -> str:
    try:
        return ILLOCUTIONARY_TABLE[assertion_type][0]
    except KeyError:
        raise ValueError(f"not a taxonomy member: {assertion_type!r}")


def illocutionary_force(assertion_type: str) -> str:
    try:
        return ILLOCUTIONARY_TABLE[assertion_type][1]
    except KeyError:
        raise ValueError(f"not a taxonomy member: {assertion_type!r}")


def transition_allowed(current: str, target: str) -> bool:
    return (current, target) in LEGAL_TRANSITIONS


# PageIndex -------------------------------------------------------------------

@dataclass
class PageIndexNode:
    node_id: str
    title: str
    summary: str
    children: list = field(default_factory=list)

    def as_payload(self) -> dict:
        return {
            "node_id": self.node_id,
            "title": self.title,
            "summary": self.summary,
            "children": [child.as_payload() for child in self.children],
        }


@dataclass
class PageIndexTree:
    doc_id: str
    doc_checksum: str
    reader_id: str
    roots: list

    def as_payload(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "doc_checksum": self.doc_checksum,
            "reader_id": self.reader_id,
            "roots": [root.as_payload() for root in self.roots],
        }

    def node_ids(self) -> set:
        found = set()

        def walk(nodes):
            for node in nodes:
                found.add(node.node_id)
                walk(node.children)

        walk(self.roots)
        return found


_HEADING_RE = re.compile(r"^(\d+(?:\.\d+)*)[.)]?\s+(.*\S)\s*$")


class StubReader:
    """Deterministic reader: numbered headings become nodes, the first
    sentence after a heading becomes its summary. No model involved."""

    reader_id = "stub"

    def read(self, text: str) -> list:
        roots: list[PageIndexNode] = []
        stack: list[PageIndexNode] = []
        pending: Optional[PageIndexNode] = None
        for line in text.splitlines():
            match = _HEADING_RE.match(line.strip())
            if match:
                node = PageIndexNode(node_id=match.group(1), title=match.group(2), summary="")
                depth = node.node_id.count(".")
                while stack and stack[-1].node_id.count(".") >= depth:
                    stack.pop()
                if stack and node.node_id.startswith(stack[-1].node_id + "."):
                    stack[-1].children.append(node)
                else:
                    stack.clear()
                    roots.append(node)
                stack.append(node)
                pending = node
            elif pending is not None and line.strip():
                sentence = line.strip().split(". ")[0].rstrip(".")
                pending.summary = sentence
                pending = None
        return roots


READERS = {"stub": StubReader()}


def get_reader(reader_id: str):
    try:
        return READERS[reader_id]
    except KeyError:
        raise UnknownReader(f"no reader registered under {reader_id!r}")


# Evidence Pack types -----------------------------------------------------------

@dataclass(frozen=True)
class QualifiedQuestion:
    text: str
    assertion_type: str

    def as_payload(self) -> dict:
        return {"text": self.text, "assertion_type": self.assertion_type}


@dataclass(frozen=True)
class GroundedResponse:
    assertion: str
    validity_conditions: tuple = ()
    invalidity_conditions: tuple = ()

    def as_payload(self) -> dict:
        return {
            "assertion": self.assertion,
            "validity_conditions": list(self.validity_conditions),
            "invalidity_conditions": list(self.invalidity_conditions),
        }


@dataclass(frozen=True)
class ProvenanceChainEntry:
    doc_id: str
    version_label: str
    checksum: str
    node_ids: tuple

    def as_payload(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "version_label": self.version_label,
            "checksum": self.checksum,
            "node_ids": sorted(self.node_ids),
        }


@dataclass(frozen=True)
class EpistemicLimits:
    divergences: tuple = ()
    gaps: tuple = ()
    dependencies: tuple = ()
    silences: tuple = ()

    def as_payload(self) -> dict:
        return {
            "divergences": list(self.divergences),
            "gaps": list(self.gaps),
            "dependencies": list(self.dependencies),
            "silences": list(self.silences),
        }


@dataclass(frozen=True)
class CuratorialStatus:
    state: str = "draft"
    curator: Optional[str] = None
    justification: Optional[str] = None
    decided_at: Optional[str] = None

    def as_payload(self) -> dict:
        return {
            "state": self.state,
            "curator": self.curator,
            "justification": self.justification,
            "decided_at": self.decided_at,
        }


@dataclass(frozen=True)
class EvidencePack:
    pack_id: str
    question: QualifiedQuestion
    response: GroundedResponse
    provenance: tuple
    limits: EpistemicLimits
    status: CuratorialStatus
    focus: str
    derived_from: Optional[str] = None

    def as_payload(self) -> dict:
        return {
            "pack_id": self.pack_id,
            "question": self.question.as_payload(),
            "response": self.response.as_payload(),
            "provenance": [entry.as_payload() for entry in self.provenance],
            "limits": self.limits.as_payload(),
            "status": self.status.as_payload(),
            "focus": self.focus,
            "derived_from": self.derived_from,
        }

    def canonical(self) -> str:
        return canonical_json(self.as_payload())


@dataclass(frozen=True)
class CuratorialDecision:
    decision_id: str
    pack_id: str
    verdict: str
    curator: str
    justification: str
    timestamp: str

    def as_payload(self) -> dict:
        return {
            "decision_id": self.decision_id,
            "pack_id": self.pack_id,
            "verdict": self.verdict,
            "curator": self.curator,
            "justification": self.justification,
            "timestamp": self.timestamp,
        }


def pack_from_payload(payload: dict) -> EvidencePack:
    return EvidencePack(
        pack_id=payload["pack_id"],
        question=QualifiedQuestion(
            text=payload["question"]["text"],
            assertion_type=payload["question"]["assertion_type"],
        ),
        response=GroundedResponse(
            assertion=payload["response"]["assertion"],
            validity_conditions=tuple(payload["response"]["validity_conditions"]),
            invalidity_conditions=tuple(payload["response"]["invalidity_conditions"]),
        ),
        provenance=tuple(
            ProvenanceChainEntry(
                doc_id=entry["doc_id"],
                version_label=entry["version_label"],
                checksum=entry["checksum"],
                node_ids=tuple(entry["node_ids"]),
            )
            for entry in payload["provenance"]
        ),
        limits=EpistemicLimits(
            divergences=tuple(payload["limits"]["divergences"]),
            gaps=tuple(payload["limits"]["gaps"]),
            dependencies=tuple(payload["limits"]["dependencies"]),
            silences=tuple(payload["limits"]["silences"]),
        ),
        status=CuratorialStatus(
            state=payload["status"]["state"],
            curator=payload["status"]["curator"],
            justification=payload["status"]["justification"],
            decided_at=payload["status"]["decided_at"],
        ),
        focus=payload["focus"],
        derived_from=payload.get("derived_from"),
    )


# Well-formedness ---------------------------------------------------------------

LIMIT_KEYS = ("divergences", "gaps", "dependencies", "silences")


def validate_well_formed(
    pack: Union[EvidencePack, dict], store: Optional[DocumentStore] = None
) -> dict:
    """Check the six conditions against a pack (object or serialized form).

    Returns {"violations": [...], "unverifiable": [...], "well_formed": bool}.
    Working on the serialized form is deliberate: condition 5 distinguishes
    "empty list" from "list not present", which only the serialization shows.
    """
    payload = pack.as_payload() if isinstance(pack, EvidencePack) else pack
    violations = set()
    unverifiable = []

    # 1: typed question from the closed taxonomy
    question = payload.get("question") or {}
    if not question.get("text") or question.get("assertion_type") not in ASSERTION_TYPES:
        violations.add(1)

    # 2: at least one provenance record
    provenance = payload.get("provenance")
    if not isinstance(provenance, list) or len(provenance) == 0:
        violations.add(2)
        provenance = []

    # 3: every cited (doc, version, checksum) matches the store
    if store is None:
        if 2 not in violations:
            unverifiable.append(3)
    else:
        for entry in provenance:
            doc_id = entry.get("doc_id")
            if not doc_id or not store.has_document(doc_id):
                violations.add(3)
                continue
            ref = store.get_document(doc_id)
            if entry.get("checksum") != ref.checksum or entry.get("version_label") != ref.version_label:
                violations.add(3)

    # 4: every provenance record names at least one node
    for entry in provenance:
        node_ids = entry.get("node_ids")
        if not isinstance(node_ids, list) or len(node_ids) == 0 or not all(node_ids):
            violations.add(4)

    # 5: all four limit lists explicitly present
    limits = payload.get("limits")
    if not isinstance(limits, dict) or any(
        not isinstance(limits.get(key), list) for key in LIMIT_KEYS
    ):
        violations.add(5)

    # 6: terminal states carry curator and justification
    status = payload.get("status") or {}
    if status.get("state") in TERMINAL_STATES:
        if not status.get("curator") or not status.get("justification"):
            violations.add(6)

    return {
        "violations": sorted(violations),
        "unverifiable": unverifiable,
        "well_formed": not violations and not unverifiable,
    }


# Engine --------------------------------------------------------------------------

class LectorEngine:
    """Persistent pack registry + curatorial log + PageIndex store.

    Layout under the data root:
      lector/packs/<pack_id>.json   current canonical form of each pack
      lector/decisions.jsonl        append-only curatorial decision log
      lector/trees/<doc>__<reader>.json  persisted PageIndex trees
    """

    def __init__(self, root: Path, store: DocumentStore):
        self.root = Path(root)
        self.store = store
        self.packs_dir = self.root / "lector" / "packs"
        self.trees_dir = self.root / "lector" / "trees"
        self.decisions_path = self.root / "lector" / "decisions.jsonl"
        self.packs_dir.mkdir(parents=True, exist_ok=True)
        self.trees_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._packs: dict[str, EvidencePack] = {}
        self._decisions: list[CuratorialDecision] = []
        self._trees: dict[tuple, PageIndexTree] = {}
        self._load()

    def _load(self) -> None:
        import json

        for path in sorted(self.packs_dir.glob("*.json")):
            payload = json.loads(path.read_text(encoding="utf-8"))
            self._packs[payload["pack_id"]] = pack_from_payload(payload)
        for record in read_jsonl(self.decisions_path):
            self._decisions.append(
                CuratorialDecision(
                    decision_id=record["decision_id"],
                    pack_id=record["pack_id"],
                    verdict=record["verdict"],
                    curator=record["curator"],
                    justification=record["justification"],
                    timestamp=record["timestamp"],
                )
            )
        for path in sorted(self.trees_dir.glob("*.json")):
            payload = json.loads(path.read_text(encoding="utf-8"))
            tree = _tree_from_payload(payload)
            self._trees[(tree.doc_id, tree.reader_id)] = tree

    def _persist_pack(self, pack: EvidencePack) -> None:
        path = self.packs_dir / f"{pack.pack_id}.json"
        path.write_text(pack.canonical() + "\n", encoding="utf-8")

    # PageIndex -----------------------------------------------------------------

    def build_page_index(self, doc_id: str, reader_id: str = "stub") -> PageIndexTree:
        ref = self.store.get_document(doc_id)
        if ref.maturity < MaturityStage.CLEANED:
            raise DocumentNotCleaned(
                f"document {doc_id} is at {ref.maturity.name}; reading requires CLEANED or later"
            )
        reader = get_reader(reader_id)
        text = self.store.get_text_artifact(doc_id).decode("utf-8", errors="replace")
        try:
            roots = reader.read(text)
        except Exception as exc:  # a reader is third-party code behind a contract
            raise ReaderFailure(f"reader {reader_id!r} failed on {doc_id}: {exc}")
        tree = PageIndexTree(
            doc_id=doc_id, doc_checksum=ref.checksum, reader_id=reader_id, roots=roots
        )
        with self._lock:
            self._trees[(doc_id, reader_id)] = tree
            path = self.trees_dir / f"{doc_id}__{reader_id}.json"
            path.write_text(canonical_json(tree.as_payload()) + "\n", encoding="utf-8")
        return tree

    def get_tree(self, doc_id: str, reader_id: str = "stub") -> Optional[PageIndexTree]:
        return self._trees.get((doc_id, reader_id))

    def trees_for_doc(self, doc_id: str) -> list:
        return [tree for (tid, _), tree in self._trees.items() if tid == doc_id]

    def tree_count(self) -> int:
        return len(self._trees)

    # Pack construction ----------------------------------------------------------

    def _allocate_pack_id(self) -> str:
        n = len(self._packs) + 1
        while f"EP-{n:03d}" in self._packs:
            n += 1
        return f"EP-{n:03d}"

    def create_pack(
        self,
        question: QualifiedQuestion,
        response: GroundedResponse,
        provenance: list,
        limits: EpistemicLimits,
        focus: str,
        derived_from: Optional[str] = None,
        pack_id: Optional[str] = None,
    ) -> EvidencePack:
        if limits is None:
            # EpistemicLimits cannot represent "not specified"; receiving no
            # structure at all is exactly what condition 5 forbids.
            raise StructuralViolation(
                "pack violates structural conditions [5]", detail={"violations": [5]}
            )
        with self._lock:
            if pack_id is not None:
                if pack_id in self._packs:
                    raise DuplicatePack(f"pack id already allocated: {pack_id}")
            else:
                pack_id = self._allocate_pack_id()
            pack = EvidencePack(
                pack_id=pack_id,
                question=question,
                response=response,
                provenance=tuple(provenance),
                limits=limits,
                status=CuratorialStatus(),
                focus=focus,
                derived_from=derived_from,
            )
            report = validate_well_formed(pack, store=None)
            structural = [v for v in report["violations"] if v in (1, 2, 4, 5)]
            if structural:
                raise StructuralViolation(
                    f"pack violates structural conditions {structural}",
                    detail={"violations": structural},
                )
            self._packs[pack_id] = pack
            self._persist_pack(pack)
            return pack

    def derive_pack(
        self,
        source_pack_id: str,
        question: QualifiedQuestion,
        response: GroundedResponse,
        provenance: list,
        limits: EpistemicLimits,
        focus: str,
        pack_id: Optional[str] = None,
    ) -> EvidencePack:
        with self._lock:
            if source_pack_id not in self._packs:
                raise UnknownPack(f"cannot derive from unknown pack {source_pack_id}")
            return self.create_pack(
                question=question,
                response=response,
                provenance=provenance,
                limits=limits,
                focus=focus,
                derived_from=source_pack_id,
                pack_id=pack_id,
            )

    def record_normative_silence(
        self,
        question_text: str,
        focus: str,
        sections_reviewed: list,
        limits: EpistemicLimits,
        pack_id: Optional[str] = None,
    ) -> EvidencePack:
        if not limits.silences:
            raise MissingSilenceEntry(
                "a normative-silence pack must name the silenced question in limits.silences"
            )
        return self.create_pack(
            question=QualifiedQuestion(text=question_text, assertion_type="NORMATIVE_SILENCE"),
            response=GroundedResponse(
                assertion="No regulatory pronouncement identified",
                validity_conditions=(),
                invalidity_conditions=(
                    "Silence does NOT equate to safety or permission",
                ),
            ),
            provenance=sections_reviewed,
            limits=limits,
            focus=focus,
            pack_id=pack_id,
        )

    # Lifecycle -------------------------------------------------------------------

    def get_pack(self, pack_id: str) -> EvidencePack:
        pack = self._packs.get(pack_id)
        if pack is None:
            raise UnknownPack(f"unknown pack: {pack_id}")
        return pack

    def has_pack(self, pack_id: str) -> bool:
        return pack_id in self._packs

    def _transition(self, pack: EvidencePack, target: str) -> None:
        if not transition_allowed(pack.status.state, target):
            raise IllegalTransition(
                f"{pack.status.state} -> {target} is not a legal lifecycle move",
                detail={"from": pack.status.state, "to": target},
            )

    def submit_for_review(self, pack_id: str) -> EvidencePack:
        with self._lock:
            pack = self.get_pack(pack_id)
            self._transition(pack, "under_review")
            updated = replace(pack, status=replace(pack.status, state="under_review"))
            self._packs[pack_id] = updated
            self._persist_pack(updated)
            return updated

    def curate(
        self,
        pack_id: str,
        verdict: str,
        curator: str,
        justification: str,
        at: Optional[str] = None,
    ) -> tuple:
        if verdict not in ("accept", "reject"):
            raise ValueError(f"verdict must be accept or reject, got {verdict!r}")
        if not curator or not curator.strip():
            raise MissingCurator("curatorial decisions require an identified curator")
        if not justification or not justification.strip():
            raise MissingJustification("curatorial decisions require a documented justification")
        target = "accepted" if verdict == "accept" else "rejected"
        with self._lock:
            pack = self.get_pack(pack_id)
            self._transition(pack, target)
            decided_at = at or utc_now()
            updated = replace(
                pack,
                status=CuratorialStatus(
                    state=target,
                    curator=curator,
                    justification=justification,
                    decided_at=decided_at,
                ),
            )
            decision = CuratorialDecision(
                decision_id=f"CD-{len(self._decisions) + 1:06d}",
                pack_id=pack_id,
                verdict=verdict,
                curator=curator,
                justification=justification,
                timestamp=decided_at,
            )
            self._packs[pack_id] = updated
            self._persist_pack(updated)
            with open(self.decisions_path, "a", encoding="utf-8") as fh:
                fh.write(canonical_json(decision.as_payload()) + "\n")
            self._decisions.append(decision)
            return updated, decision

    # Introspection -----------------------------------------------------------------

    def all_packs(self) -> list:
        return [self._packs[pid] for pid in sorted(self._packs)]

    def packs_in_state(self, state: str) -> list:
        return [p for p in self.all_packs() if p.status.state == state]

    def accepted_packs(self) -> list:
        return self.packs_in_state("accepted")

    def decisions_for(self, pack_id: str) -> list:
        return [d for d in self._decisions if d.pack_id == pack_id]

    def all_decisions(self) -> list:
        return list(self._decisions)

    def derivation_chain(self, pack_id: str) -> list:
        """Walk derived_from links back to the original pack (inclusive)."""
        chain = []
        current: Optional[str] = pack_id
        while current is not None:
            pack = self.get_pack(current)
            chain.append(pack)
            current = pack.derived_from
        return chain

    def last_decision_timestamp(self) -> Optional[str]:
        return self._decisions[-1].timestamp if self._decisions else None


def _tree_from_payload(payload: dict) -> PageIndexTree:
    def node(rec: dict) -> PageIndexNode:
        return PageIndexNode(
            node_id=rec["node_id"],
            title=rec["title"],
            summary=rec["summary"],
            children=[node(child) for child in rec["children"]],
        )

    return PageIndexTree(
        doc_id=payload["doc_id"],
        doc_checksum=payload["doc_checksum"],
        reader_id=payload["reader_id"],
        roots=[node(rec) for rec in payload["roots"]],
    )
