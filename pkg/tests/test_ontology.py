"""Canonical hierarchy, identifiers, synonyms, links, and the external
terminology-level mapping."""

import pytest

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
from plp.ontology import (
    EXTERNAL_LEVEL_MAP,
    LEVELS,
    OntologyStore,
    map_external_level,
)


@pytest.fixture
def ontology(tmp_path):
    states = {}
    store = OntologyStore(tmp_path / "data", pack_state=states.get)
    store._test_states = states  # noqa: SLF001 - test-only handle
    return store


def seed_chain(ontology):
    ontology.upsert_entity("SUB-000000001", "SUBSTANCE", "testol")
    ontology.upsert_entity("VTM-000000001", "VTM", "testol", parent_ids=["SUB-000000001"])
    ontology.upsert_entity("VMP-000000001", "VMP", "testol 10 mg tablet",
                           parent_ids=["VTM-000000001"], attributes={"atc": "A00AA00"})
    ontology.upsert_entity("VMPP-000000001", "VMPP", "testol 10 mg x 10",
                           parent_ids=["VMP-000000001"])
    ontology.upsert_entity("AMP-000000001", "AMP", "TESTOMAX", parent_ids=["VMPP-000000001"])
    ontology.upsert_entity("AMPP-000000001", "AMPP", "TESTOMAX box x 10",
                           parent_ids=["AMP-000000001"])


# Levels and the external mapping --------------------------------------------------------


def test_levels_order():
    assert LEVELS == ("SUBSTANCE", "VTM", "VMP", "VMPP", "AMP", "AMPP")


def test_external_level_mapping_exact():
    assert EXTERNAL_LEVEL_MAP == {
        "SUBSTANCE": {"functional": "Substance", "dmd": "Substance", "idmp": "Substance"},
        "VTM": {"functional": "Qualitative Composition", "dmd": "Virtual Therapeutic Moiety", "idmp": None},
        "VMP": {"functional": "Formulation", "dmd": "Virtual Medicinal Product", "idmp": "Pharmaceutical Product"},
        "VMPP": {"functional": "Pack", "dmd": "Virtual Medicinal Product Pack", "idmp": None},
        "AMP": {"functional": "Product", "dmd": "Actual Medicinal Product", "idmp": "Medicinal Product"},
        "AMPP": {"functional": "Trade Presentation", "dmd": "Actual Medicinal Product Pack", "idmp": "Packaged Medicinal Product"},
    }


def test_map_external_level_lookups():
    assert map_external_level("VTM") == {
        "functional": "Qualitative Composition",
        "dmd": "Virtual Therapeutic Moiety",
        "idmp": None,
    }
    with pytest.raises(ValueError):
        map_external_level("SKU")


# Entity validation ----------------------------------------------------------------------


def test_prefix_must_match_level(ontology):
    with pytest.raises(LevelMismatch):
        ontology.upsert_entity("VMP-000000001", "SUBSTANCE", "wrong prefix")


def test_ampp_prefix_not_confused_with_amp(ontology):
    seed_chain(ontology)
    assert ontology.get_entity("AMPP-000000001").level == "AMPP"
    assert ontology.get_entity("AMP-000000001").level == "AMP"


def test_parent_must_exist(ontology):
    with pytest.raises(UnknownParent):
        ontology.upsert_entity("VTM-000000009", "VTM", "orphan", parent_ids=["SUB-000000404"])


def test_parent_must_be_exactly_one_level_above(ontology):
    ontology.upsert_entity("SUB-000000001", "SUBSTANCE", "testol")
    ontology.upsert_entity("VTM-000000001", "VTM", "testol", parent_ids=["SUB-000000001"])
    with pytest.raises(IllegalParentLevel):
        ontology.upsert_entity("VMPP-000000009", "VMPP", "skip", parent_ids=["VTM-000000001"])
    with pytest.raises(IllegalParentLevel):
        ontology.upsert_entity("SUB-000000002", "SUBSTANCE", "up", parent_ids=["VTM-000000001"])


def test_level_change_on_existing_entity_rejected(ontology):
    seed_chain(ontology)
    with pytest.raises(LevelMismatch):
        ontology.upsert_entity("VMP-000000001", "VMPP", "testol 10 mg tablet")


def test_upsert_merges_parents_and_attributes(ontology):
    seed_chain(ontology)
    ontology.upsert_entity("VTM-000000002", "VTM", "testol variant", parent_ids=["SUB-000000001"])
    ontology.upsert_entity(
        "VMP-000000001", "VMP", "testol 10 mg tablet",
        parent_ids=["VTM-000000002"], attributes={"ddd": "0.5", "atc": "A00AA01"},
    )
    entity = ontology.get_entity("VMP-000000001")
    assert entity.parent_ids == ["VTM-000000001", "VTM-000000002"]
    assert entity.attributes["atc"] == "A00AA01"  # overwritten
    assert entity.attributes["ddd"] == "0.5"  # added


def test_hierarchy_walks(ontology):
    seed_chain(ontology)
    down = ontology.hierarchy_walk("SUB-000000001", "descend")
    assert down["entity_id"] == "SUB-000000001"
    assert down["children"][0]["entity_id"] == "VTM-000000001"
    up = ontology.hierarchy_walk("AMPP-000000001", "ascend")
    assert up["children"][0]["entity_id"] == "AMP-000000001"
    assert ontology.descendants("SUB-000000001") == [
        "AMP-000000001", "AMPP-000000001", "VMP-000000001", "VMPP-000000001", "VTM-000000001",
    ]
    assert ontology.ancestors("AMPP-000000001") == [
        "AMP-000000001", "SUB-000000001", "VMP-000000001", "VMPP-000000001", "VTM-000000001",
    ]


# Identifiers and synonyms ----------------------------------------------------------------


def test_identifier_resolution(ontology):
    seed_chain(ontology)
    ontology.add_identifier("SUB-000000001", "CAS", "123-45-6")
    assert ontology.resolve_identifier("CAS", "123-45-6").entity_id == "SUB-000000001"
    ontology.add_identifier("SUB-000000001", "CAS", "123-45-6")  # idempotent
    with pytest.raises(AmbiguousIdentifier):
        ontology.add_identifier("VTM-000000001", "CAS", "123-45-6")
    with pytest.raises(NotFound):
        ontology.resolve_identifier("CAS", "999-99-9")


def test_synonyms_accumulate(ontology):
    seed_chain(ontology)
    ontology.add_synonym("SUB-000000001", "testolum", "la")
    ontology.add_synonym("SUB-000000001", "testolum", "la")  # deduplicated
    ontology.add_synonym("SUB-000000001", "testolo", "it")
    assert len(ontology.synonyms_of("SUB-000000001")) == 2


def test_organization_role_validation(ontology):
    with pytest.raises(ValueError):
        ontology.upsert_organization("ORG-000000001", "X", "influencer")


# Links ----------------------------------------------------------------------------------


def test_link_requires_accepted_pack(ontology):
    seed_chain(ontology)
    ontology._test_states["EP-001"] = "draft"
    with pytest.raises(PackNotAccepted):
        ontology.link_evidence("EP-001", "VMP-000000001")
    ontology._test_states["EP-001"] = "accepted"
    link = ontology.link_evidence("EP-001", "VMP-000000001")
    assert link.pack_id == "EP-001"
    with pytest.raises(DuplicateLink):
        ontology.link_evidence("EP-001", "VMP-000000001")


def test_link_requires_known_entity(ontology):
    ontology._test_states["EP-001"] = "accepted"
    with pytest.raises(UnknownEntity):
        ontology.link_evidence("EP-001", "VMP-000000404")


def test_packs_linked_to_is_distinct_and_sorted(ontology):
    seed_chain(ontology)
    for pack_id in ("EP-002", "EP-001"):
        ontology._test_states[pack_id] = "accepted"
        ontology.link_evidence(pack_id, "VMP-000000001")
    ontology.link_evidence("EP-001", "VMPP-000000001")
    assert ontology.packs_linked_to(["VMP-000000001", "VMPP-000000001"]) == ["EP-001", "EP-002"]


# Persistence and bulk I/O ----------------------------------------------------------------


def test_state_survives_reopen(ontology, tmp_path):
    seed_chain(ontology)
    ontology.add_identifier("SUB-000000001", "CAS", "123-45-6")
    ontology.add_synonym("SUB-000000001", "testolum", "la")
    ontology.upsert_organization("ORG-000000001", "Maker", "manufacturer")
    ontology._test_states["EP-001"] = "accepted"
    ontology.link_evidence("EP-001", "VMP-000000001")

    reopened = OntologyStore(tmp_path / "data", pack_state=lambda _pid: "accepted")
    assert reopened.get_entity("VMP-000000001").attributes == {"atc": "A00AA00"}
    assert reopened.resolve_identifier("CAS", "123-45-6").entity_id == "SUB-000000001"
    assert len(reopened.synonyms_of("SUB-000000001")) == 1
    assert reopened.link_count() == 1
    assert reopened.entity_count_by_level()["AMPP"] == 1


def test_export_load_round_trip(ontology, tmp_path):
    seed_chain(ontology)
    ontology.add_identifier("SUB-000000001", "CAS", "123-45-6")
    ontology.add_synonym("SUB-000000001", "testolum", "la")
    ontology.upsert_organization("ORG-000000001", "Maker", "manufacturer")
    ontology._test_states["EP-001"] = "accepted"
    ontology.link_evidence("EP-001", "VMP-000000001")
    records = ontology.export_records()

    fresh = OntologyStore(tmp_path / "fresh", pack_state=lambda _pid: "accepted")
    report = fresh.load_records(records)
    assert report["entity"] == 6
    assert report["link"] == 1
    assert fresh.export_records() == records
