"""End-to-end acceptance suite.

Covers the structural-condition property families, the lifecycle matrix,
version immutability, golden-corpus parity, the canonical hierarchy chain,
trace totality with an exact corruption oracle, the bulk-refraction
benchmark, byte-level CLI/service parity, and the external level mapping.
"""

import json
import time
from fractions import Fraction

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from plp.canonical import canonical_json
from plp.cli import main as cli_main
from plp.corpus import Corpus, parse_pack_inputs
from plp.errors import IllegalTransition
from plp.fixtures import (
    AMPP_NOVALGINA,
    BENCH_COUNTS,
    SUB_ID,
    VMP_ID,
    VMPP_ID,
    VTM_ID,
    build_benchmark_ontology,
)
from plp.lector import LEGAL_TRANSITIONS, validate_well_formed
from plp.metrics import compute_metrics
from plp.ontology import EXTERNAL_LEVEL_MAP, map_external_level
from plp.refraction import graph_id_for
from plp.service import create_app

from conftest import make_lineage

# --- Structural-condition property families -------------------------------------------

PROP_STATS = {"packs": 0, "started": None}

FILLER = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz ", min_size=1, max_size=60
).map(str.strip).filter(bool)

PROP_SETTINGS = settings(
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)


@pytest.fixture(scope="module")
def prop_env(tmp_path_factory):
    corpus = Corpus(tmp_path_factory.mktemp("prop") / "data")
    ref = corpus.store.ingest_document(
        b"1. DOSAGE\nOne tablet up to four times daily.\n",
        make_lineage(),
        version_label="v1",
        format="txt",
        capture_date="2026-01-01",
        active_ingredient="propdrug",
    )
    return corpus.store, ref


def valid_payload(ref, question_text, assertion_text):
    return {
        "pack_id": "EP-PROP",
        "focus": "propdrug 500 mg tablet",
        "derived_from": None,
        "question": {"text": question_text, "assertion_type": "DOSING"},
        "response": {
            "assertion": assertion_text,
            "validity_conditions": ["population: adults"],
            "invalidity_conditions": [],
        },
        "provenance": [
            {
                "doc_id": ref.doc_id,
                "version_label": ref.version_label,
                "checksum": ref.checksum,
                "node_ids": ["1"],
            }
        ],
        "limits": {"divergences": [], "gaps": [], "dependencies": [], "silences": []},
        "status": {"state": "draft", "curator": "", "justification": "", "decided_at": None},
    }


def check_family(store, payload, mutate, condition):
    if PROP_STATS["started"] is None:
        PROP_STATS["started"] = time.monotonic()
    clean = validate_well_formed(payload, store)
    assert clean == {"unverifiable": [], "violations": [], "well_formed": True}
    mutate(payload)
    report = validate_well_formed(payload, store)
    assert report["violations"] == [condition]
    assert report["well_formed"] is False
    PROP_STATS["packs"] += 2


@given(variant=st.sampled_from(["blank", "missing_text", "bad_type", "missing_type"]),
       q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_1_typed_question(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        if variant == "blank":
            p["question"]["text"] = ""
        elif variant == "missing_text":
            del p["question"]["text"]
        elif variant == "bad_type":
            p["question"]["assertion_type"] = "VIBES"
        else:
            del p["question"]["assertion_type"]

    check_family(store, payload, mutate, 1)


@given(variant=st.sampled_from(["empty", "missing", "not_a_list"]), q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_2_provenance_present(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        if variant == "empty":
            p["provenance"] = []
        elif variant == "missing":
            del p["provenance"]
        else:
            p["provenance"] = "not a list"

    check_family(store, payload, mutate, 2)


@given(variant=st.sampled_from(["bad_checksum", "bad_version", "unknown_doc"]),
       q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_3_store_verification(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        entry = p["provenance"][0]
        if variant == "bad_checksum":
            entry["checksum"] = "0" * 64
        elif variant == "bad_version":
            entry["version_label"] = "v999"
        else:
            entry["doc_id"] = "DOC-does-not-exist"

    check_family(store, payload, mutate, 3)


@given(variant=st.sampled_from(["empty", "blank_member", "missing", "not_a_list"]),
       q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_4_node_anchoring(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        entry = p["provenance"][0]
        if variant == "empty":
            entry["node_ids"] = []
        elif variant == "blank_member":
            entry["node_ids"] = ["1", ""]
        elif variant == "missing":
            del entry["node_ids"]
        else:
            entry["node_ids"] = "1"

    check_family(store, payload, mutate, 4)


@given(variant=st.sampled_from(
    ["drop_divergences", "drop_gaps", "drop_dependencies", "drop_silences",
     "not_a_dict", "missing", "scalar_member"]),
    q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_5_explicit_limits(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        if variant.startswith("drop_"):
            del p["limits"][variant.removeprefix("drop_")]
        elif variant == "not_a_dict":
            p["limits"] = []
        elif variant == "missing":
            del p["limits"]
        else:
            p["limits"]["gaps"] = "none"

    check_family(store, payload, mutate, 5)


@given(variant=st.sampled_from(
    ["accepted_no_curator", "accepted_no_justification", "rejected_blank_both"]),
    q=FILLER, a=FILLER)
@PROP_SETTINGS
def test_condition_6_terminal_accountability(prop_env, variant, q, a):
    store, ref = prop_env
    payload = valid_payload(ref, q, a)

    def mutate(p):
        if variant == "accepted_no_curator":
            p["status"] = {"state": "accepted", "curator": "", "justification": "fine"}
        elif variant == "accepted_no_justification":
            p["status"] = {"state": "accepted", "curator": "Reviewer", "justification": ""}
        else:
            p["status"] = {"state": "rejected", "curator": "", "justification": ""}

    check_family(store, payload, mutate, 6)


def test_property_volume_and_runtime():
    assert PROP_STATS["packs"] >= 200
    assert time.monotonic() - PROP_STATS["started"] < 10.0


# --- Lifecycle matrix -------------------------------------------------------------------


def test_lifecycle_matrix_exactly_three_legal(corpus):
    ref = corpus.store.ingest_document(
        b"1. SECTION\nBody.\n", make_lineage(), version_label="v1",
        format="txt", capture_date="2026-01-01",
    )
    counter = {"n": 0}

    def fresh(state):
        counter["n"] += 1
        inputs = parse_pack_inputs(valid_payload(ref, "Q?", "A."))
        pack = corpus.lector.create_pack(
            inputs["question"], inputs["response"], inputs["provenance"],
            inputs["limits"], inputs["focus"], pack_id=f"EP-M{counter['n']:03d}",
        )
        if state == "draft":
            return pack.pack_id
        corpus.lector.submit_for_review(pack.pack_id)
        if state == "under_review":
            return pack.pack_id
        verdict = "accept" if state == "accepted" else "reject"
        corpus.lector.curate(pack.pack_id, verdict, "Reviewer", "matrix setup")
        return pack.pack_id

    states = ("draft", "under_review", "accepted", "rejected")
    observed_legal = set()
    attempted = 0
    for src in states:
        for dst in states:
            attempted += 1
            if dst == "draft":
                continue  # no operation produces a draft from an existing pack
            pack_id = fresh(src)
            try:
                if dst == "under_review":
                    corpus.lector.submit_for_review(pack_id)
                else:
                    corpus.lector.curate(
                        pack_id, "accept" if dst == "accepted" else "reject",
                        "Reviewer", "matrix probe",
                    )
                observed_legal.add((src, dst))
            except IllegalTransition:
                pass

    assert attempted == 16
    assert observed_legal == {
        ("draft", "under_review"),
        ("under_review", "accepted"),
        ("under_review", "rejected"),
    }
    assert ("rejected", "accepted") not in observed_legal
    assert LEGAL_TRANSITIONS == frozenset(observed_legal)


# --- Version immutability and corruption detection --------------------------------------


def test_five_version_lineage_immutable_and_verifiable(corpus):
    refs = []
    for i in range(1, 6):
        refs.append(corpus.store.ingest_document(
            f"1. SECTION\nRevision {i} body.\n".encode(),
            make_lineage(),
            version_label=f"2026011{i}",
            format="txt",
            capture_date=f"2026-01-1{i}",
        ))
    corpus.store.mark_current(refs[-1].doc_id)

    versions = corpus.store.list_versions(refs[0].lineage)
    assert len(versions) == 5
    assert [v.version_label for v in versions] == [f"2026011{i}" for i in range(1, 6)]
    assert sum(1 for v in versions if v.is_current) == 1
    assert versions[-1].is_current

    for ref in refs:
        assert corpus.store.verify_integrity(ref.doc_id)["result"] == "ok"

    for ref in refs:
        blob = corpus.store._blob_path(ref.checksum)
        original = blob.read_bytes()
        tampered = bytearray(original)
        tampered[len(tampered) // 2] ^= 0x01
        blob.write_bytes(bytes(tampered))
        assert corpus.store.verify_integrity(ref.doc_id)["result"] == "corrupted"
        blob.write_bytes(original)
        assert corpus.store.verify_integrity(ref.doc_id)["result"] == "ok"


# --- Golden corpus parity ----------------------------------------------------------------


def test_golden_corpus_inventory(golden):
    counts = compute_metrics(golden)["counts"]
    assert counts["packs_total"] == 38
    assert counts["packs_accepted"] == 37
    assert counts["packs_rejected"] == 1
    assert counts["links_total"] == 119
    assert counts["pageindex_trees"] == 31
    assert counts["assertion_types_used"] >= 7
    assert counts["view_kinds_materialized"] == 4
    # the focus chain has all four of its views materialized
    expected = {
        ("CTX_SUBSTANCE_PROFILE", SUB_ID),
        ("CTX_VMP_COMPLETE", VMP_ID),
        ("CTX_DISPENSATION", VMPP_ID),
        ("CTX_MPP_REGULATORY", AMPP_NOVALGINA),
    }
    materialized = {entry["graph_id"] for entry in golden.refraction.manifest_entries()}
    for view, entity_id in expected:
        assert graph_id_for(view, entity_id) in materialized


def test_golden_corpus_scores_are_perfect(golden):
    report = compute_metrics(golden)
    assert report["provenance_completeness"] == 1.0
    assert report["interpretive_traceability"] == 1.0
    assert report["accountability"] == 1.0
    assert report["curatorial_coverage"] == 37 / 38


# --- Canonical hierarchy chain ------------------------------------------------------------


def test_hierarchy_chain_from_substance_to_package(golden):
    ontology = golden.ontology

    assert ontology.resolve_identifier("CAS", "5907-38-0").entity_id == SUB_ID
    assert ontology.resolve_identifier("EAN", "7891058008635").entity_id == AMPP_NOVALGINA

    assert SUB_ID in ontology.get_entity(VTM_ID).parent_ids
    assert VTM_ID in ontology.get_entity(VMP_ID).parent_ids
    assert VMP_ID in ontology.get_entity(VMPP_ID).parent_ids

    descendants = ontology.descendants(SUB_ID)
    for entity_id in (VTM_ID, VMP_ID, VMPP_ID, AMPP_NOVALGINA):
        assert entity_id in descendants
    assert SUB_ID in ontology.ancestors(AMPP_NOVALGINA)

    vmp = ontology.get_entity(VMP_ID)
    assert vmp.attributes["atc"] == "N02BB02"
    assert vmp.attributes["ddd"] == "0.167"

    assert len(ontology.entities_at_level("VTM")) == 16
    assert len(ontology.entities_at_level("VMP")) == 36
    assert len(ontology.entities_at_level("VMPP")) == 13
    assert len(ontology.entities_at_level("AMP")) == 92
    assert len(ontology.entities_at_level("AMPP")) == 92
    under_golden = [
        amp for amp in ontology.entities_at_level("AMP")
        if VMPP_ID in amp.parent_ids
    ]
    assert len(under_golden) == 17


# --- Trace totality and the corruption oracle ----------------------------------------------


def test_every_assertion_node_traces_verified(golden):
    traced = 0
    for entry in golden.refraction.manifest_entries():
        payload = golden.refraction.load_graph_payload(entry["graph_id"])
        for node in payload["nodes"]:
            if node["kind"] != "assertion":
                continue
            chain = golden.refraction.trace(entry["graph_id"], node["node_id"])
            assert chain["complete"] is True, (entry["graph_id"], node["node_id"])
            assert all(e["result"] == "verified" for e in chain["entries"])
            traced += 1
    assert traced == 892


def test_corruption_reduces_completeness_by_citation_fraction(golden_copy):
    target = golden_copy.lector.get_pack("EP-001").provenance[0]
    blob = golden_copy.store._blob_path(target.checksum)
    data = bytearray(blob.read_bytes())
    data[3] ^= 0x10
    blob.write_bytes(bytes(data))

    citing = {
        pack.pack_id
        for pack in golden_copy.lector.all_packs()
        if any(entry.checksum == target.checksum for entry in pack.provenance)
    }
    total = broken = 0
    for entry in golden_copy.refraction.manifest_entries():
        payload = golden_copy.refraction.load_graph_payload(entry["graph_id"])
        for node in payload["nodes"]:
            if node["kind"] == "assertion":
                total += 1
                broken += node["props"]["pack_id"] in citing
    assert broken > 0

    expected = 1 - Fraction(broken, total)
    report = compute_metrics(golden_copy)
    assert report["provenance_completeness"] == float(expected)


# --- Bulk refraction benchmark --------------------------------------------------------------


def test_bulk_refraction_benchmark(tmp_path):
    wall_start = time.monotonic()
    corpus = Corpus(tmp_path / "bench")
    build_benchmark_ontology(corpus)
    assert sum(corpus.ontology.entity_count_by_level().values()) == sum(BENCH_COUNTS.values())

    first = corpus.refraction.refract_all()
    assert first["graph_count"] == 55555
    assert first["errors"] == []
    assert first["elapsed_seconds"] <= 5.0
    digests_first = {
        entry["graph_id"]: entry["digest"]
        for entry in corpus.refraction.manifest_entries()
    }

    second = corpus.refraction.refract_all()
    assert second["graph_count"] == 55555
    assert second["elapsed_seconds"] <= 5.0
    digests_second = {
        entry["graph_id"]: entry["digest"]
        for entry in corpus.refraction.manifest_entries()
    }
    assert digests_first == digests_second

    corpus.ontology.upsert_entity(
        "AMPP-999999999", "AMPP", "synthetic extra package",
        parent_ids=["AMP-900000000"], attributes={"status": "active"},
    )
    third = corpus.refraction.refract_all()
    assert third["graph_count"] == 55556

    assert time.monotonic() - wall_start <= 120.0


# --- CLI / service byte parity ---------------------------------------------------------------


def test_cli_and_service_emit_identical_bytes(golden, golden_dir):
    runner = CliRunner()
    client = TestClient(create_app(golden))
    graph_id = graph_id_for("CTX_VMP_COMPLETE", VMP_ID)
    cases = [
        (["refract", VMP_ID, "CTX_VMP_COMPLETE"], f"/entities/{VMP_ID}/views/CTX_VMP_COMPLETE", "GET"),
        (["pack", "validate", "EP-001"], "/packs/EP-001/validate", "GET"),
        (["trace", graph_id, "assertion:EP-001"], f"/graphs/{graph_id}/trace/assertion:EP-001", "GET"),
        (["metrics"], "/metrics", "GET"),
    ]
    for cli_args, route, _method in cases:
        cli = runner.invoke(
            cli_main, ["--data-dir", str(golden_dir), "--output", "structured", *cli_args]
        )
        assert cli.exit_code == 0, cli.output
        http = client.get(route)
        assert http.status_code == 200
        assert cli.output.encode("utf-8") == http.content, cli_args


def test_pack_and_graph_serializations_are_stable(golden, golden_dir):
    pack_bytes = golden.lector.get_pack("EP-001").canonical()
    graph_bytes = golden.refraction.refract(VMP_ID, "CTX_VMP_COMPLETE").file_str

    reopened = Corpus(golden_dir)
    assert reopened.lector.get_pack("EP-001").canonical() == pack_bytes
    assert reopened.refraction.refract(VMP_ID, "CTX_VMP_COMPLETE").file_str == graph_bytes
    assert json.loads(graph_bytes) == json.loads(canonical_json(json.loads(graph_bytes)))


# --- External level mapping -------------------------------------------------------------------


def test_external_level_rows_exact():
    assert EXTERNAL_LEVEL_MAP == {
        "SUBSTANCE": {"functional": "Substance", "dmd": "Substance", "idmp": "Substance"},
        "VTM": {"functional": "Qualitative Composition", "dmd": "Virtual Therapeutic Moiety", "idmp": None},
        "VMP": {"functional": "Formulation", "dmd": "Virtual Medicinal Product", "idmp": "Pharmaceutical Product"},
        "VMPP": {"functional": "Pack", "dmd": "Virtual Medicinal Product Pack", "idmp": None},
        "AMP": {"functional": "Product", "dmd": "Actual Medicinal Product", "idmp": "Medicinal Product"},
        "AMPP": {"functional": "Trade Presentation", "dmd": "Actual Medicinal Product Pack", "idmp": "Packaged Medicinal Product"},
    }
    for level, row in EXTERNAL_LEVEL_MAP.items():
        assert map_external_level(level) == row
    with pytest.raises(ValueError):
        map_external_level("SKU")
