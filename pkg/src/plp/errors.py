"""Error hierarchy shared by every layer.

Each error carries a stable machine-readable ``code`` (snake_case, 1:1 with the
exception class) plus a human message and an optional structured ``detail``
payload. The HTTP layer serializes these verbatim into its error envelope; the
CLI prints the code and exits nonzero.
"""

from __future__ import annotations

from typing import Any, Optional


class PlpError(Exception):
    """Base class; subclasses set ``code``."""

    code = "internal_error"

    def __init__(self, message: str, detail: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def as_payload(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


# Document store ------------------------------------------------------------

class EmptyDocument(PlpError):
    code = "empty_document"


class DuplicateVersionConflict(PlpError):
    code = "duplicate_version_conflict"


class UnknownDocument(PlpError):
    code = "unknown_document"


class SkippedStage(PlpError):
    code = "skipped_stage"


class BackwardPromotion(PlpError):
    code = "backward_promotion"


# Reading / Evidence Packs ----------------------------------------------------

class DocumentNotCleaned(PlpError):
    code = "document_not_cleaned"


class ReaderFailure(PlpError):
    code = "reader_failure"


class UnknownReader(PlpError):
    code = "unknown_reader"


class StructuralViolation(PlpError):
    code = "structural_violation"


class IllegalTransition(PlpError):
    code = "illegal_transition"


class MissingCurator(PlpError):
    code = "missing_curator"


class MissingJustification(PlpError):
    code = "missing_justification"


class UnknownPack(PlpError):
    code = "unknown_pack"


class DuplicatePack(PlpError):
    code = "duplicate_pack"


class MissingSilenceEntry(PlpError):
    code = "missing_silence_entry"


# Ontology --------------------------------------------------------------------

class LevelMismatch(PlpError):
    code = "level_mismatch"


class UnknownParent(PlpError):
    code = "unknown_parent"


class IllegalParentLevel(PlpError):
    code = "illegal_parent_level"


class NotFound(PlpError):
    code = "not_found"


class AmbiguousIdentifier(PlpError):
    code = "ambiguous_identifier"


class PackNotAccepted(PlpError):
    code = "pack_not_accepted"


class UnknownEntity(PlpError):
    code = "unknown_entity"


class DuplicateLink(PlpError):
    code = "duplicate_link"


class UnknownOrganization(PlpError):
    code = "unknown_organization"


# Refraction ------------------------------------------------------------------

class LevelViewMismatch(PlpError):
    code = "level_view_mismatch"


class UnknownView(PlpError):
    code = "unknown_view"


class UnknownGraph(PlpError):
    code = "unknown_graph"


class NotAnAssertionNode(PlpError):
    code = "not_an_assertion_node"


# Service ---------------------------------------------------------------------

class ConfigInvalid(PlpError):
    code = "config_invalid"


class AddressInUse(PlpError):
    code = "address_in_use"
