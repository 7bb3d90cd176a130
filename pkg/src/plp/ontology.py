"""Canonical medication hierarchy and the links binding evidence to it.

Six levels, strictly ordered SUBSTANCE → VTM → VMP → VMPP → AMP → AMPP. The
structure is a level-ordered DAG, not a tree: one substance may appear in
many compositions, so an entity may carry several parents — but every parent
sits exactly one level above its child.

Persistence is a set of append-only record logs (entities are last-write-wins
on replay); the whole registry is held in memory, which is comfortably within
scope for corpus sizes in the tens of thousands of entities.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from plp.canonical import canonical_json, read_jsonl, utc_now
from plp.errors import (
    AmbiguousIdentifier,
    DuplicateLink,
    IllegalParentLevel,
    LevelMismatch,
    NotFound,
    PackNotAccepted,
    UnknownEntity,
    UnknownParent,
)

LEVELS = ("SUBSTANCE", "VTM", "VMP", "VMPP", "AMP", "AMPP")
LEVEL_INDEX = {name: i for i, name in enumerate(LEVELS)}
LEVEL_PREFIX = {
    "SUBSTANCE": "SUB-",
    "VTM": "VTM-",
    "VMP": "VMP-",
    "VMPP": "VMPP-",
    "AMP": "AMP-",
    "AMPP": "AMPP-",
}

ORG_ROLES = ("manufacturer", "regulator", "hospital", "database")

# Correspondence of the six canonical levels with the NHS DM+D model and the
# IDMP (ISO 11615/11616) concept set. Two levels have no IDMP equivalent.
EXTERNAL_LEVEL_MAP = {
    "SUBSTANCE": {"functional": "Substance", "dmd": "Substance", "idmp": "Substance"},
    "VTM": {"functional": "Qualitative Composition", "dmd": "Virtual Therapeutic Moiety", "idmp": None},
    "VMP": {"functional": "Formulation", "dmd": "Virtual Medicinal Product", "idmp": "Pharmaceutical Product"},
    "VMPP": {"functional": "Pack", "dmd": "Virtual Medicinal Product Pack", "idmp": None},
    "AMP": {"functional": "Product", "dmd": "Actual Medicinal Product", "idmp": "Medicinal Product"},
    "AMPP": {"functional": "Trade Presentation", "dmd": "Actual Medicinal Product Pack", "idmp": "Packaged Medicinal Product"},
}


def map_external_level(level: str) -> dict:
    try:
        return dict(EXTERNAL_LEVEL_MAP[level])
    except KeyError:
        raise ValueError(f"unknown canonical level: {level!r}")


def level_of_prefix(entity_id: str) -> Optional[str]:
    # VMPP-/AMPP- must win over VMP-/AMP-, so test longest prefixes first.
    for level in sorted(LEVEL_PREFIX, key=lambda lv: -len(LEVEL_PREFIX[lv])):
        if entity_id.startswith(LEVEL_PREFIX[level]):
            return level
    return None


@dataclass
class CanonicalEntity:
    entity_id: str
    level: str
    display_name: str
    parent_ids: list = field(default_factory=list)
    attributes: dict = field(default_factory=dict)

    def as_payload(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "level": self.level,
            "display_name": self.display_name,
            "parent_ids": sorted(self.parent_ids),
            "attributes": dict(sorted(self.attributes.items())),
        }


@dataclass(frozen=True)
class ExternalIdentifier:
    scheme: str
    value: str
    entity_id: str

    def as_payload(self) -> dict:
        return {"scheme": self.scheme, "value": self.value, "entity_id": self.entity_id}


@dataclass(frozen=True)
class Synonym:
    entity_id: str
    text: str
    language: Optional[str] = None

    def as_payload(self) -> dict:
        return {"entity_id": self.entity_id, "text": self.text, "language": self.language}


@dataclass(frozen=True)
class Organization:
    org_id: str
    name: str
    role: str

    def as_payload(self) -> dict:
        return {"org_id": self.org_id, "name": self.name, "role": self.role}


@dataclass(frozen=True)
class CanonicalLink:
    link_id: str
    pack_id: str
    entity_id: str
    created_at: str

    def as_payload(self) -> dict:
        return {
            "link_id": self.link_id,
            "pack_id": self.pack_id,
            "entity_id": self.entity_id,
            "created_at": self.created_at,
        }


class OntologyStore:
    """In-memory registry over append-only logs under ``ontology/``."""

    def __init__(self, root: Path, pack_state: Optional[Callable[[str], Optional[str]]] = None):
        self.root = Path(root)
        self.dir = self.root / "ontology"
        self.dir.mkdir(parents=True, exist_ok=True)
        # pack_state(pack_id) -> lifecycle state or None; wired by the corpus
        # so this layer can refuse links to anything not accepted.
        self._pack_state = pack_state or (lambda pack_id: None)
        self._lock = threading.RLock()
        self._entities: dict[str, CanonicalEntity] = {}
        self._children: dict[str, list[str]] = {}
        self._identifiers: dict[tuple, str] = {}
        self._identifiers_by_entity: dict[str, list[ExternalIdentifier]] = {}
        self._synonyms: dict[str, list[Synonym]] = {}
        self._orgs: dict[str, Organization] = {}
        self._links: list[CanonicalLink] = []
        self._link_pairs: set[tuple] = set()
        self._links_by_pack: dict[str, list[CanonicalLink]] = {}
        self._links_by_entity: dict[str, list[CanonicalLink]] = {}
        self._last_mutation: Optional[str] = None
        self._replay()

    # Persistence ---------------------------------------------------------------

    def _log(self, name: str, record: dict, at: str) -> None:
        record = dict(record)
        record["at"] = at
        with open(self.dir / name, "a", encoding="utf-8") as fh:
            fh.write(canonical_json(record) + "\n")
        if self._last_mutation is None or at > self._last_mutation:
            self._last_mutation = at

    def _replay(self) -> None:
        for record in read_jsonl(self.dir / "entities.jsonl"):
            self._apply_entity(record)
            self._bump(record["at"])
        for record in read_jsonl(self.dir / "identifiers.jsonl"):
            ident = ExternalIdentifier(record["scheme"], record["value"], record["entity_id"])
            self._identifiers[(ident.scheme, ident.value)] = ident.entity_id
            self._identifiers_by_entity.setdefault(ident.entity_id, []).append(ident)
            self._bump(record["at"])
        for record in read_jsonl(self.dir / "synonyms.jsonl"):
            synonym = Synonym(record["entity_id"], record["text"], record.get("language"))
            self._synonyms.setdefault(synonym.entity_id, []).append(synonym)
            self._bump(record["at"])
        for record in read_jsonl(self.dir / "organizations.jsonl"):
            org = Organization(record["org_id"], record["name"], record["role"])
            self._orgs[org.org_id] = org
            self._bump(record["at"])
        for record in read_jsonl(self.dir / "links.jsonl"):
            link = CanonicalLink(
                record["link_id"], record["pack_id"], record["entity_id"], record["created_at"]
            )
            self._register_link(link)
            self._bump(record["at"])

    def _bump(self, at: str) -> None:
        if self._last_mutation is None or at > self._last_mutation:
            self._last_mutation = at

    def _apply_entity(self, record: dict) -> None:
        entity = CanonicalEntity(
            entity_id=record["entity_id"],
            level=record["level"],
            display_name=record["display_name"],
            parent_ids=list(record["parent_ids"]),
            attributes=dict(record["attributes"]),
        )
        previous = self._entities.get(entity.entity_id)
        if previous is not None:
            for parent in previous.parent_ids:
                if parent in self._children and entity.entity_id in self._children[parent]:
                    self._children[parent].remove(entity.entity_id)
        self._entities[entity.entity_id] = entity
        for parent in entity.parent_ids:
            siblings = self._children.setdefault(parent, [])
            if entity.entity_id not in siblings:
                siblings.append(entity.entity_id)

    def _register_link(self, link: CanonicalLink) -> None:
        self._links.append(link)
        self._link_pairs.add((link.pack_id, link.entity_id))
        self._links_by_pack.setdefault(link.pack_id, []).append(link)
        self._links_by_entity.setdefault(link.entity_id, []).append(link)

    # Entities --------------------------------------------------------------------

    def upsert_entity(
        self,
        entity_id: str,
        level: str,
        display_name: str,
        parent_ids: Optional[list] = None,
        attributes: Optional[dict] = None,
        at: Optional[str] = None,
    ) -> str:
        if level not in LEVEL_INDEX:
            raise LevelMismatch(f"unknown canonical level: {level!r}")
        if level_of_prefix(entity_id) != level:
            raise LevelMismatch(
                f"entity id {entity_id!r} does not carry the {LEVEL_PREFIX[level]} prefix"
            )
        parent_ids = list(parent_ids or [])
        with self._lock:
            existing = self._entities.get(entity_id)
            if existing is not None and existing.level != level:
                raise LevelMismatch(
                    f"{entity_id} is registered at {existing.level}; level is immutable"
                )
            for parent_id in parent_ids:
                parent = self._entities.get(parent_id)
                if parent is None:
                    raise UnknownParent(f"parent entity not found: {parent_id}")
                if LEVEL_INDEX[level] != LEVEL_INDEX[parent.level] + 1:
                    raise IllegalParentLevel(
                        f"{parent_id} ({parent.level}) cannot parent {entity_id} ({level}); "
                        "parents sit exactly one level above"
                    )
            merged = CanonicalEntity(
                entity_id=entity_id,
                level=level,
                display_name=display_name or (existing.display_name if existing else ""),
                parent_ids=sorted(set((existing.parent_ids if existing else [])) | set(parent_ids)),
                attributes={**(existing.attributes if existing else {}), **(attributes or {})},
            )
            record = merged.as_payload()
            self._apply_entity(record)
            self._log("entities.jsonl", record, at or utc_now())
            return entity_id

    def get_entity(self, entity_id: str) -> CanonicalEntity:
        entity = self._entities.get(entity_id)
        if entity is None:
            raise UnknownEntity(f"unknown entity: {entity_id}")
        return entity

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def children_of(self, entity_id: str) -> list:
        return [self._entities[cid] for cid in sorted(self._children.get(entity_id, []))]

    def parents_of(self, entity_id: str) -> list:
        return [self._entities[pid] for pid in self.get_entity(entity_id).parent_ids]

    def entities_at_level(self, level: str) -> list:
        return [e for _, e in sorted(self._entities.items()) if e.level == level]

    def entity_count_by_level(self) -> dict:
        counts = {level: 0 for level in LEVELS}
        for entity in self._entities.values():
            counts[entity.level] += 1
        return counts

    # Identifiers / synonyms / organizations ------------------------------------------

    def add_identifier(self, entity_id: str, scheme: str, value: str, at: Optional[str] = None) -> None:
        with self._lock:
            self.get_entity(entity_id)
            holder = self._identifiers.get((scheme, value))
            if holder == entity_id:
                return  # idempotent
            if holder is not None:
                raise AmbiguousIdentifier(
                    f"({scheme}, {value}) already resolves to {holder}",
                    detail={"scheme": scheme, "value": value, "holder": holder},
                )
            ident = ExternalIdentifier(scheme=scheme, value=value, entity_id=entity_id)
            self._identifiers[(scheme, value)] = entity_id
            self._identifiers_by_entity.setdefault(entity_id, []).append(ident)
            self._log("identifiers.jsonl", ident.as_payload(), at or utc_now())

    def resolve_identifier(self, scheme: str, value: str) -> CanonicalEntity:
        entity_id = self._identifiers.get((scheme, value))
        if entity_id is None:
            raise NotFound(f"no entity carries ({scheme}, {value})")
        return self.get_entity(entity_id)

    def identifiers_of(self, entity_id: str) -> list:
        return list(self._identifiers_by_entity.get(entity_id, []))

    def add_synonym(self, entity_id: str, text: str, language: Optional[str] = None, at: Optional[str] = None) -> None:
        if not text:
            raise ValueError("synonym text must be non-empty")
        with self._lock:
            self.get_entity(entity_id)
            synonym = Synonym(entity_id=entity_id, text=text, language=language)
            if synonym in self._synonyms.get(entity_id, []):
                return
            self._synonyms.setdefault(entity_id, []).append(synonym)
            self._log("synonyms.jsonl", synonym.as_payload(), at or utc_now())

    def synonyms_of(self, entity_id: str) -> list:
        return list(self._synonyms.get(entity_id, []))

    def upsert_organization(self, org_id: str, name: str, role: str, at: Optional[str] = None) -> Organization:
        if role not in ORG_ROLES:
            raise ValueError(f"unknown organization role: {role!r}")
        with self._lock:
            org = Organization(org_id=org_id, name=name, role=role)
            if self._orgs.get(org_id) == org:
                return org
            self._orgs[org_id] = org
            self._log("organizations.jsonl", org.as_payload(), at or utc_now())
            return org

    def get_organization(self, org_id: str) -> Optional[Organization]:
        return self._orgs.get(org_id)

    def organizations(self) -> list:
        return [self._orgs[oid] for oid in sorted(self._orgs)]

    # Hierarchy walks ------------------------------------------------------------------

    def hierarchy_walk(self, entity_id: str, direction: str = "descend") -> dict:
        if direction not in ("ascend", "descend"):
            raise ValueError("direction must be ascend or descend")
        entity = self.get_entity(entity_id)

        def expand(current: CanonicalEntity) -> dict:
            if direction == "descend":
                nxt = self.children_of(current.entity_id)
            else:
                nxt = self.parents_of(current.entity_id)
            return {
                "entity_id": current.entity_id,
                "level": current.level,
                "display_name": current.display_name,
                "children": [expand(child) for child in nxt],
            }

        return expand(entity)

    def descendants(self, entity_id: str) -> list:
        """Transitive closure below an entity (ids, deterministic order)."""
        seen: list[str] = []
        frontier = [entity_id]
        visited = {entity_id}
        while frontier:
            current = frontier.pop(0)
            for child in self._children.get(current, []):
                if child not in visited:
                    visited.add(child)
                    seen.append(child)
                    frontier.append(child)
        return sorted(seen)

    def ancestors(self, entity_id: str) -> list:
        seen: list[str] = []
        frontier = [entity_id]
        visited = {entity_id}
        while frontier:
            current = frontier.pop(0)
            for parent_id in self.get_entity(current).parent_ids:
                if parent_id not in visited:
                    visited.add(parent_id)
                    seen.append(parent_id)
                    frontier.append(parent_id)
        return sorted(seen)

    # Links -----------------------------------------------------------------------------

    def link_evidence(self, pack_id: str, entity_id: str, at: Optional[str] = None) -> CanonicalLink:
        with self._lock:
            if not self.has_entity(entity_id):
                raise UnknownEntity(f"unknown entity: {entity_id}")
            state = self._pack_state(pack_id)
            if state != "accepted":
                raise PackNotAccepted(
                    f"pack {pack_id} is {state or 'unknown'}; only accepted packs may be linked"
                )
            if (pack_id, entity_id) in self._link_pairs:
                raise DuplicateLink(f"{pack_id} is already linked to {entity_id}")
            created_at = at or utc_now()
            link = CanonicalLink(
                link_id=f"LNK-{len(self._links) + 1:06d}",
                pack_id=pack_id,
                entity_id=entity_id,
                created_at=created_at,
            )
            self._register_link(link)
            self._log("links.jsonl", link.as_payload(), created_at)
            return link

    def links_for_entity(self, entity_id: str) -> list:
        return list(self._links_by_entity.get(entity_id, []))

    def links_for_pack(self, pack_id: str) -> list:
        return list(self._links_by_pack.get(pack_id, []))

    def all_links(self) -> list:
        return list(self._links)

    def link_count(self) -> int:
        return len(self._links)

    def packs_linked_to(self, entity_ids) -> list:
        """Distinct pack ids linked to any of the given entities, sorted."""
        found = set()
        for entity_id in entity_ids:
            for link in self._links_by_entity.get(entity_id, []):
                found.add(link.pack_id)
        return sorted(found)

    # Bulk load / export -----------------------------------------------------------------

    def export_records(self) -> list:
        """Full dump as ordered records; loading them into an empty store

        reproduces the registry (parents always precede children)."""
        records = []
        for level in LEVELS:
            for entity in self.entities_at_level(level):
                records.append({"kind": "entity", **entity.as_payload()})
        for org in self.organizations():
            records.append({"kind": "organization", **org.as_payload()})
        for entity_id in sorted(self._identifiers_by_entity):
            for ident in self._identifiers_by_entity[entity_id]:
                records.append({"kind": "identifier", **ident.as_payload()})
        for entity_id in sorted(self._synonyms):
            for synonym in self._synonyms[entity_id]:
                records.append({"kind": "synonym", **synonym.as_payload()})
        for link in self._links:
            records.append({"kind": "link", **link.as_payload()})
        return records

    def load_records(self, records, at: Optional[str] = None) -> dict:
        counts = {"entity": 0, "organization": 0, "identifier": 0, "synonym": 0, "link": 0}
        for record in records:
            kind = record.get("kind")
            if kind == "entity":
                self.upsert_entity(
                    entity_id=record["entity_id"],
                    level=record["level"],
                    display_name=record["display_name"],
                    parent_ids=record.get("parent_ids", []),
                    attributes=record.get("attributes", {}),
                    at=at,
                )
            elif kind == "organization":
                self.upsert_organization(record["org_id"], record["name"], record["role"], at=at)
            elif kind == "identifier":
                self.add_identifier(record["entity_id"], record["scheme"], record["value"], at=at)
            elif kind == "synonym":
                self.add_synonym(record["entity_id"], record["text"], record.get("language"), at=at)
            elif kind == "link":
                self.link_evidence(record["pack_id"], record["entity_id"], at=record.get("created_at", at))
            else:
                raise ValueError(f"unknown record kind: {kind!r}")
            counts[kind] += 1
        return counts

    def last_mutation_timestamp(self) -> Optional[str]:
        return self._last_mutation
