"""Page indexing, Evidence Pack structure, lifecycle, and curation."""

import pytest

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
from plp.lector import (
    ASSERTION_TYPES,
    ILLOCUTIONARY_TABLE,
    LEGAL_TRANSITIONS,
    PACK_STATES,
    READERS,
    EpistemicLimits,
    GroundedResponse,
    LectorEngine,
    ProvenanceChainEntry,
    QualifiedQuestion,
    illocutionary_class,
    illocutionary_force,
    transition_allowed,
    validate_well_formed,
)
from plp.store import MaturityStage

from conftest import make_lineage

STRUCTURED_TEXT = """TESTDRUG summary document
1 GENERAL
Top-level section body. Second sentence ignored.
1.1 Usage
Usage details here. More prose.
1.1.1 Usage in adults
Adults paragraph.
1.2 Storage
Keep dry.
2 APPENDIX
Appendix body.
"""


def ingest_cleaned(corpus, text=STRUCTURED_TEXT, label="v1", **overrides):
    ref = corpus.store.ingest_document(
        text.encode(), make_lineage(**overrides), version_label=label,
        format="txt", capture_date="2026-01-01",
    )
    corpus.store.promote_maturity(ref.doc_id, MaturityStage.CLEANED)
    return ref


def well_formed_inputs(ref):
    return dict(
        question=QualifiedQuestion("Is it used in adults?", "INDICATION"),
        response=GroundedResponse("Used in adults", ("context: adults",), ()),
        provenance=[
            ProvenanceChainEntry(ref.doc_id, ref.version_label, ref.checksum, ("1.1.1",))
        ],
        limits=EpistemicLimits(gaps=("No pediatric data",)),
        focus="testdrug 10 mg tablet",
    )


# PageIndex -------------------------------------------------------------------------


def test_stub_reader_builds_hierarchy(corpus):
    ref = ingest_cleaned(corpus)
    tree = corpus.lector.build_page_index(ref.doc_id)
    assert tree.node_ids() == {"1", "1.1", "1.1.1", "1.2", "2"}
    general = tree.roots[0]
    assert general.node_id == "1"
    assert general.title == "GENERAL"
    assert general.summary == "Top-level section body"
    assert [c.node_id for c in general.children] == ["1.1", "1.2"]
    assert general.children[0].children[0].node_id == "1.1.1"


def test_indexing_requires_cleaned_document(corpus):
    ref = corpus.store.ingest_document(
        STRUCTURED_TEXT.encode(), make_lineage(), version_label="v1",
        format="txt", capture_date="2026-01-01",
    )
    with pytest.raises(DocumentNotCleaned):
        corpus.lector.build_page_index(ref.doc_id)


def test_unknown_reader(corpus):
    ref = ingest_cleaned(corpus)
    with pytest.raises(UnknownReader):
        corpus.lector.build_page_index(ref.doc_id, reader_id="nonexistent")


def test_reader_exceptions_wrapped(corpus):
    class Exploding:
        reader_id = "exploding"

        def read(self, text):
            raise RuntimeError("boom")

    READERS["exploding"] = Exploding()
    try:
        ref = ingest_cleaned(corpus)
        with pytest.raises(ReaderFailure):
            corpus.lector.build_page_index(ref.doc_id, reader_id="exploding")
    finally:
        del READERS["exploding"]


def test_trees_persist_across_reopen(corpus):
    ref = ingest_cleaned(corpus)
    built = corpus.lector.build_page_index(ref.doc_id)
    reopened = LectorEngine(corpus.root, corpus.store)
    assert reopened.get_tree(ref.doc_id, "stub").as_payload() == built.as_payload()


# Illocutionary typing -----------------------------------------------------------------


def test_taxonomy_is_closed_and_complete():
    assert set(ASSERTION_TYPES) == {
        "INDICATION", "CONTRAINDICATION", "DOSING", "INTERACTION",
        "ADVERSE_REACTION", "WARNING", "PRECAUTION", "SPECIAL_POPULATION",
        "NORMATIVE_SILENCE",
    }
    assert set(ILLOCUTIONARY_TABLE) == set(ASSERTION_TYPES)


@pytest.mark.parametrize(
    "assertion_type,expected_class,expected_force",
    [
        ("INDICATION", "assertive", "Commits to truth of therapeutic applicability"),
        ("CONTRAINDICATION", "directive", "Instructs the professional to avoid"),
        ("DOSING", "directive+assertive", "Prescribes conduct with factual basis"),
        ("INTERACTION", "assertive+directive", "States a fact and warns about consequences"),
        ("ADVERSE_REACTION", "assertive", "Reports observed or documented effects"),
        ("WARNING", "directive", "Urges caution under specified conditions"),
        ("PRECAUTION", "directive", "Recommends monitoring or adjusted use"),
        ("SPECIAL_POPULATION", "assertive+directive", "Qualifies applicability to a subgroup"),
        ("NORMATIVE_SILENCE", "non-commitment", "Signals absence of regulatory pronouncement"),
    ],
)
def test_illocutionary_rows(assertion_type, expected_class, expected_force):
    assert illocutionary_class(assertion_type) == expected_class
    assert illocutionary_force(assertion_type) == expected_force


# Well-formedness ------------------------------------------------------------------------


def test_well_formed_pack_validates_clean(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    report = validate_well_formed(pack, corpus.store)
    assert report == {"violations": [], "unverifiable": [], "well_formed": True}


def test_untyped_question_is_condition_1(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["question"]["assertion_type"] = "OPINION"
    assert validate_well_formed(pack, corpus.store)["violations"] == [1]
    pack["question"]["assertion_type"] = "INDICATION"
    pack["question"]["text"] = ""
    assert validate_well_formed(pack, corpus.store)["violations"] == [1]


def test_empty_provenance_is_condition_2(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["provenance"] = []
    assert validate_well_formed(pack, corpus.store)["violations"] == [2]


def test_checksum_mismatch_is_condition_3(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["provenance"][0]["checksum"] = "0" * 64
    assert validate_well_formed(pack, corpus.store)["violations"] == [3]


def test_version_label_mismatch_is_condition_3(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["provenance"][0]["version_label"] = "v999"
    assert validate_well_formed(pack, corpus.store)["violations"] == [3]


def test_missing_node_ids_is_condition_4(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["provenance"][0]["node_ids"] = []
    assert validate_well_formed(pack, corpus.store)["violations"] == [4]


def test_absent_limit_list_is_condition_5(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    del pack["limits"]["gaps"]
    assert validate_well_formed(pack, corpus.store)["violations"] == [5]


def test_empty_limit_lists_are_not_a_violation(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["limits"] = {"divergences": [], "gaps": [], "dependencies": [], "silences": []}
    assert validate_well_formed(pack, corpus.store)["well_formed"] is True


def test_terminal_without_justification_is_condition_6(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref)).as_payload()
    pack["status"] = {"state": "accepted", "curator": "c", "justification": None,
                      "decided_at": "2026-01-01T00:00:00Z"}
    assert validate_well_formed(pack, corpus.store)["violations"] == [6]


def test_validation_without_store_is_unverifiable(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    report = validate_well_formed(pack, store=None)
    assert report["violations"] == []
    assert report["unverifiable"] == [3]
    assert report["well_formed"] is False


def test_validator_never_raises_on_garbage():
    report = validate_well_formed({}, store=None)
    assert report["well_formed"] is False
    assert set(report["violations"]) == {1, 2, 5}


def test_create_pack_without_limits_structure_is_rejected(corpus):
    ref = ingest_cleaned(corpus)
    inputs = well_formed_inputs(ref)
    inputs["limits"] = None
    with pytest.raises(StructuralViolation) as err:
        corpus.lector.create_pack(**inputs)
    assert err.value.detail["violations"] == [5]


# Lifecycle ------------------------------------------------------------------------------


def test_exactly_three_legal_transitions():
    assert LEGAL_TRANSITIONS == frozenset(
        {("draft", "under_review"), ("under_review", "accepted"), ("under_review", "rejected")}
    )
    legal = [(a, b) for a in PACK_STATES for b in PACK_STATES if transition_allowed(a, b)]
    assert len(legal) == 3


def test_lifecycle_walk(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    assert pack.status.state == "draft"
    with pytest.raises(IllegalTransition):
        corpus.lector.curate(pack.pack_id, "accept", "c", "too early")
    submitted = corpus.lector.submit_for_review(pack.pack_id)
    assert submitted.status.state == "under_review"
    with pytest.raises(IllegalTransition):
        corpus.lector.submit_for_review(pack.pack_id)
    accepted, decision = corpus.lector.curate(pack.pack_id, "accept", "curator-x", "verified")
    assert accepted.status.state == "accepted"
    assert accepted.status.curator == "curator-x"
    assert decision.verdict == "accept"
    with pytest.raises(IllegalTransition):
        corpus.lector.curate(pack.pack_id, "reject", "c", "cannot leave terminal state")


def test_curate_requires_curator_and_justification(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    corpus.lector.submit_for_review(pack.pack_id)
    with pytest.raises(MissingCurator):
        corpus.lector.curate(pack.pack_id, "accept", "  ", "fine")
    with pytest.raises(MissingJustification):
        corpus.lector.curate(pack.pack_id, "accept", "curator-x", "   ")
    # the failed attempts must not have moved the state
    assert corpus.lector.get_pack(pack.pack_id).status.state == "under_review"


def test_rejection_and_derivation_chain(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    corpus.lector.submit_for_review(pack.pack_id)
    rejected, _ = corpus.lector.curate(pack.pack_id, "reject", "curator-x", "outdated text")
    assert rejected.status.state == "rejected"

    inputs = well_formed_inputs(ref)
    derived = corpus.lector.derive_pack(pack.pack_id, **inputs)
    assert derived.derived_from == pack.pack_id
    assert derived.status.state == "draft"
    chain = corpus.lector.derivation_chain(derived.pack_id)
    assert [p.pack_id for p in chain] == [derived.pack_id, pack.pack_id]

    with pytest.raises(UnknownPack):
        corpus.lector.derive_pack("EP-999", **well_formed_inputs(ref))


def test_explicit_pack_id_collision(corpus):
    ref = ingest_cleaned(corpus)
    corpus.lector.create_pack(**well_formed_inputs(ref), pack_id="EP-777")
    with pytest.raises(DuplicatePack):
        corpus.lector.create_pack(**well_formed_inputs(ref), pack_id="EP-777")


def test_packs_and_decisions_persist_across_reopen(corpus):
    ref = ingest_cleaned(corpus)
    pack = corpus.lector.create_pack(**well_formed_inputs(ref))
    corpus.lector.submit_for_review(pack.pack_id)
    corpus.lector.curate(pack.pack_id, "accept", "curator-x", "verified", at="2026-02-02T00:00:00Z")

    reopened = LectorEngine(corpus.root, corpus.store)
    loaded = reopened.get_pack(pack.pack_id)
    assert loaded.status.state == "accepted"
    decisions = reopened.decisions_for(pack.pack_id)
    assert len(decisions) == 1
    assert decisions[0].justification == "verified"
    assert decisions[0].timestamp == "2026-02-02T00:00:00Z"


# Normative silence ------------------------------------------------------------------------


def test_normative_silence_requires_silence_entry(corpus):
    ref = ingest_cleaned(corpus)
    with pytest.raises(MissingSilenceEntry):
        corpus.lector.record_normative_silence(
            question_text="Silent question?",
            focus="testdrug",
            sections_reviewed=[
                ProvenanceChainEntry(ref.doc_id, ref.version_label, ref.checksum, ("1.1",))
            ],
            limits=EpistemicLimits(),
        )


def test_normative_silence_pack_shape(corpus):
    ref = ingest_cleaned(corpus)
    question = "Is testdrug safe in G6PD deficiency?"
    pack = corpus.lector.record_normative_silence(
        question_text=question,
        focus="testdrug",
        sections_reviewed=[
            ProvenanceChainEntry(ref.doc_id, ref.version_label, ref.checksum, ("1.1", "1.2"))
        ],
        limits=EpistemicLimits(silences=(question,), dependencies=("Consult literature",)),
    )
    assert pack.question.assertion_type == "NORMATIVE_SILENCE"
    assert pack.response.assertion == "No regulatory pronouncement identified"
    assert "Silence does NOT equate to safety or permission" in pack.response.invalidity_conditions
    assert validate_well_formed(pack, corpus.store)["well_formed"] is True
