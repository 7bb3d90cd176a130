"""Deterministic corpora: the golden dipyrone fixture and the synthetic
benchmark ontology.

Everything here is synthetic but self-consistent: checksums are computed
from the actual fixture bytes, provenance entries cite real ingested
versions, and every timestamp is fixed so that repeated loads produce
byte-identical state (and therefore byte-identical graphs).

Golden corpus shape:

* 192 documents from 4 sources — 12 regulator inserts (two five-version
  Novalgina lineages, professional + patient, plus two generics), 12
  hospital monographs, 168 public-database records;
* 31 page-index trees (every document any pack cites is indexed);
* 38 Evidence Packs: 37 accepted, 1 rejected (EP-012, superseded dosing
  guidance; EP-013 is its accepted derivation). Pack id EP-038 is
  deliberately unallocated — ids are assigned, not recycled;
* 119 canonical links across the dipyrone hierarchy;
* ontology: 1 substance (17 external identifiers, 24 synonyms), 16 VTMs,
  36 VMPs (7 under the reference VTM), 13 VMPPs under the reference VMP,
  92 AMP/AMPP pairs from 24 manufacturers (17 under the reference VMPP).
"""

from __future__ import annotations

from plp.corpus import Corpus
from plp.lector import (
    EpistemicLimits,
    GroundedResponse,
    ProvenanceChainEntry,
    QualifiedQuestion,
)
from plp.store import LineageKey, MaturityStage

FIXTURE_INSTANT = "2026-02-01T09:00:00Z"
DECISION_INSTANT = "2026-02-03T15:30:00Z"
LINK_INSTANT = "2026-02-04T10:00:00Z"

SOURCE_REGULATOR = "ANVISA"
SOURCE_HOSPITAL_A = "Hospital Sirio-Libanes"
SOURCE_HOSPITAL_B = "Hospital Albert Einstein"
SOURCE_DATABASE = "Public Pharmaceutical Database"

REGISTRATION = "186200018"
VERSIONS = (
    ("20240212", "2024-02-20"),
    ("20240805", "2024-08-12"),
    ("20250210", "2025-02-17"),
    ("20250818", "2025-08-25"),
    ("20260116", "2026-01-28"),
)

MEDICATIONS = ("dipyrone", "ceftriaxone", "clonazepam", "warfarin", "adalimumab")

SUB_ID = "SUB-000033943"
VTM_ID = "VTM-000010750"
VMP_ID = "VMP-000051605"
VMPP_ID = "VMPP-000103766"
AMP_NOVALGINA = "AMP-000000001"
AMPP_NOVALGINA = "AMPP-000000001"
NOVALGINA_EAN = "7891058008635"
SANOFI_ORG = "ORG-000000032"


def professional_insert_text(version_label: str) -> str:
    return f"""NOVALGINA (dipyrone monohydrate) professional package insert
Registration {REGISTRATION} - revision {version_label}
1 PRODUCT INFORMATION
General information for healthcare professionals. Revision {version_label}.
1.1 What is this medication indicated for?
Indicated as an analgesic and antipyretic for adults and adolescents over 15 years. Use for mild to moderate pain and fever refractory to other measures.
1.2 How does this medication work?
Dipyrone inhibits cyclooxygenase pathways producing analgesic and antipyretic effect. Onset within 30 to 60 minutes.
1.3 When should I not use this medication?
Contraindicated in hypersensitivity to dipyrone or other pyrazolones, bone marrow suppression, and known agranulocytosis history. Do not use during the last trimester of pregnancy.
1.4 What should I know before using this medication?
Warning: agranulocytosis is a rare but serious reaction; discontinue at the first sign of fever, sore throat or mucosal lesions. Caution in patients with pre-existing hypotension.
1.5 How should I use this medication?
Adults: 500 mg to 1000 mg up to four times daily. Maximum daily dose 4000 mg in revision {version_label}. Take tablets with water.
1.6 What should I do when I forget to use this medication?
Take the next dose at the usual time; do not double doses.
1.7 What adverse effects may this medication cause?
Possible adverse reactions include hypotension, skin reactions, and rarely agranulocytosis. Report suspected reactions to pharmacovigilance.
1.8 Drug interactions
Dipyrone may reduce the effect of acetylsalicylic acid on platelet aggregation. Concomitant use with warfarin may alter anticoagulant response; monitor INR.
1.9 Use in special populations
Not recommended during the first trimester of pregnancy and in children under 3 months. Hepatic and renal impairment require dose review.
2 TECHNICAL CHARACTERISTICS
Technical data for the dispensing pharmacist follows.
2.1 Composition
Each tablet contains 500 mg dipyrone monohydrate and excipients. Tablet weight 580 mg.
2.2 Storage and shelf life
Store at 15 to 30 degrees Celsius. Shelf life 24 months from manufacturing date.
"""


def patient_insert_text(version_label: str) -> str:
    return f"""NOVALGINA (dipyrone monohydrate) patient package insert
Registration {REGISTRATION} - revision {version_label}
1 INFORMATION FOR THE PATIENT
Read this leaflet carefully before taking the medicine. Revision {version_label}.
1.1 What is this medication indicated for?
This medicine is used to treat pain and fever. Ask a pharmacist when in doubt.
1.2 How does this medication work?
It blocks substances that cause pain and fever. Effect starts in about half an hour.
1.3 When should I not use this medication?
Do not take it if you are allergic to dipyrone. Do not take it in late pregnancy.
1.4 What should I know before using this medication?
Stop taking it and seek care if fever or sore throat appears. It may lower blood pressure.
1.5 How should I use this medication?
Take one or two tablets with water up to four times a day. Never exceed eight tablets per day.
1.6 What should I do when I forget to use this medication?
Just take the next dose at the usual time.
1.7 What adverse effects may this medication cause?
It can rarely cause serious blood problems. Skin reactions are possible.
"""


def monograph_text(source: str, medication: str, code: str) -> str:
    return f"""{medication.upper()} clinical monograph - {source}
Internal code {code}. Prepared by the hospital pharmacy service.
1 CLINICAL SUMMARY
Monograph for institutional use covering {medication}. Reviewed annually.
1.1 Therapeutic class and indications
Approved institutional indications for {medication} per the hospital formulary. Restricted uses require board clearance.
1.2 Dosing and administration
Institutional dosing guidance for {medication}. Adjust for renal function where applicable.
1.3 Contraindications and precautions
Summary of contraindications for {medication} used by the clinical staff. See the national insert for the binding text.
1.4 Monitoring
Recommended monitoring parameters during therapy with {medication}. Record deviations in the patient chart.
"""


def database_entry_text(medication: str, index: int) -> str:
    return f"""PRODUCT RECORD {index:06d} - {medication}
Aggregated public registry data snapshot for {medication}. Entry {index:06d}.
1 PRODUCT DATA
Summary record from the public pharmaceutical database. Commercial presentation {index:06d}.
1.1 Identification
Active ingredient {medication}; presentation code {index:06d}. Data aggregated from public registries.
1.2 Marketing status
Status active at snapshot time. Manufacturer identifiers recorded in the registry entry.
"""


# Document loading ------------------------------------------------------------------


def _load_documents(corpus: Corpus) -> dict:
    """Ingest the 192 fixture documents; returns the refs packs will cite."""
    refs = {}
    stamp = iter(range(100000))

    def when() -> str:
        return f"2026-02-01T09:{next(stamp) // 60:02d}:{next(stamp) % 60:02d}Z"

    prof_lineage = LineageKey(SOURCE_REGULATOR, REGISTRATION, "professional_insert", "novalgina")
    pac_lineage = LineageKey(SOURCE_REGULATOR, REGISTRATION, "patient_insert", "novalgina")
    for label, captured in VERSIONS:
        ref = corpus.store.ingest_document(
            professional_insert_text(label).encode("utf-8"),
            prof_lineage,
            version_label=label,
            format="txt",
            capture_date=captured,
            active_ingredient="dipyrone monohydrate",
            at=when(),
        )
        refs[f"prof_{label}"] = ref
        ref = corpus.store.ingest_document(
            patient_insert_text(label).encode("utf-8"),
            pac_lineage,
            version_label=label,
            format="txt",
            capture_date=captured,
            active_ingredient="dipyrone monohydrate",
            at=when(),
        )
        refs[f"pac_{label}"] = ref
    current_label = VERSIONS[-1][0]
    corpus.store.mark_current(refs[f"prof_{current_label}"].doc_id, at=when())
    corpus.store.mark_current(refs[f"pac_{current_label}"].doc_id, at=when())

    for suffix, (registration, kind) in {
        "generic_a": ("104230278", "professional_insert"),
        "generic_b": ("157110042", "patient_insert"),
    }.items():
        lineage = LineageKey(SOURCE_REGULATOR, registration, kind, "dipyrone (generic)")
        refs[suffix] = corpus.store.ingest_document(
            professional_insert_text("20250501").replace(REGISTRATION, registration).encode("utf-8"),
            lineage,
            version_label="20250501",
            format="txt",
            capture_date="2025-05-10",
            active_ingredient="dipyrone monohydrate",
            at=when(),
        )

    hospital_meds = list(MEDICATIONS) + ["dipyrone (injectable)"]
    for source, prefix in ((SOURCE_HOSPITAL_A, "HSL"), (SOURCE_HOSPITAL_B, "HAE")):
        for i, medication in enumerate(hospital_meds, start=1):
            code = f"{prefix}-MONO-{i:03d}"
            lineage = LineageKey(source, code, "monograph", medication)
            refs[f"{prefix.lower()}_{i}"] = corpus.store.ingest_document(
                monograph_text(source, medication, code).encode("utf-8"),
                lineage,
                version_label="2025-edition",
                format="txt",
                capture_date="2025-03-01",
                active_ingredient=medication.split(" ")[0],
                at=when(),
            )

    for i in range(1, 169):
        medication = MEDICATIONS[i % len(MEDICATIONS)]
        lineage = LineageKey(SOURCE_DATABASE, f"PUB-{i:06d}", "smpc", medication)
        refs[f"pub_{i}"] = corpus.store.ingest_document(
            database_entry_text(medication, i).encode("utf-8"),
            lineage,
            version_label="snapshot-2026-01",
            format="txt",
            capture_date="2026-01-15",
            active_ingredient=medication,
            at=when(),
        )
    return refs


def _index_documents(corpus: Corpus, refs: dict) -> list:
    """Promote and index 31 documents: all inserts, all monographs, 7 public."""
    keys = (
        [f"prof_{label}" for label, _ in VERSIONS]
        + [f"pac_{label}" for label, _ in VERSIONS]
        + ["generic_a", "generic_b"]
        + [f"hsl_{i}" for i in range(1, 7)]
        + [f"hae_{i}" for i in range(1, 7)]
        + [f"pub_{i}" for i in range(1, 8)]
    )
    promote_at = "2026-02-02T08:00:00Z"
    trees = []
    for key in keys:
        doc_id = refs[key].doc_id
        corpus.store.promote_maturity(doc_id, MaturityStage.CLEANED, at=promote_at)
        trees.append(corpus.lector.build_page_index(doc_id, reader_id="stub"))
    # Exercise a deeper maturity chain on the binding professional insert: a
    # structured artifact is stored under its own checksum, RAW stays put.
    current = refs[f"prof_{VERSIONS[-1][0]}"]
    corpus.store.promote_maturity(
        current.doc_id,
        MaturityStage.STRUCTURED,
        derived_artifact=professional_insert_text(VERSIONS[-1][0]).encode("utf-8"),
        at="2026-02-02T08:30:00Z",
    )
    return trees


# Ontology ----------------------------------------------------------------------------

IDENTIFIER_SCHEMES = (
    ("CAS", "5907-38-0"),
    ("UNII", "6429L0L52Y"),
    ("DCB", "9564"),
    ("ChEMBL", "CHEMBL-D33943"),
    ("DrugBank", "DB-D33943"),
    ("PubChem", "PC-3111"),
    ("MeSH", "MSH-D004177"),
    ("KEGG", "KG-D01762"),
    ("ChEBI", "CHEBI-59033"),
    ("INN", "metamizole"),
    ("EINECS", "227-522-1"),
    ("RxNorm", "RX-6916"),
    ("SNOMED", "SCT-387321007"),
    ("NDF-RT", "NDF-33943"),
    ("USAN", "dipyrone"),
    ("JAN", "sulpyrine"),
    ("ECHA", "ECHA-100-025-021"),
)

SYNONYMS = (
    ("dipyrone", "en"),
    ("dipirona", "pt"),
    ("metamizole", "en"),
    ("metamizol", "es"),
    ("metamizol sodico", "es"),
    ("analgin", "en"),
    ("analginum", "la"),
    ("novaminsulfon", "de"),
    ("metamizolo", "it"),
    ("metamizol sodique", "fr"),
    ("dipyrone monohydrate", "en"),
    ("metamizole sodium monohydrate", "en"),
    ("sulpyrine", "ja-Latn"),
    ("noramidopyrine methanesulfonate", "en"),
    ("methampyrone", "en"),
    ("dipyron", "de"),
    ("analgine", "fr"),
    ("dipirona monohidratada", "pt"),
    ("metamizol monohidrat", "tr"),
    ("optalgin", "he-Latn"),
    ("algocalmin", "ro"),
    ("nolotil", "es"),
    ("piralgin", "pl"),
    ("dipyrone sodium", "en"),
)

MANUFACTURERS = ["Sanofi Medley"] + [f"Laboratorio Farmaceutico {i:02d} Ltda" for i in range(1, 24)]

PACK_SIZES = (10, 20, 30, 50, 100, 120, 144, 200, 240, 256, 500, 5, 60)


def _load_ontology(corpus: Corpus) -> None:
    at = "2026-02-02T12:00:00Z"
    ontology = corpus.ontology

    ontology.upsert_organization("ORG-000000001", SOURCE_REGULATOR, "regulator", at=at)
    ontology.upsert_organization("ORG-000000002", SOURCE_HOSPITAL_A, "hospital", at=at)
    ontology.upsert_organization("ORG-000000003", SOURCE_HOSPITAL_B, "hospital", at=at)
    ontology.upsert_organization("ORG-000000004", SOURCE_DATABASE, "database", at=at)
    org_ids = {}
    for i, name in enumerate(MANUFACTURERS):
        org_id = SANOFI_ORG if name == "Sanofi Medley" else f"ORG-{33 + i:09d}"
        org_ids[name] = org_id
        ontology.upsert_organization(org_id, name, "manufacturer", at=at)

    ontology.upsert_entity(
        SUB_ID,
        "SUBSTANCE",
        "dipyrone monohydrate",
        attributes={"dcb": "9564", "molecular_formula": "C13H18N3NaO5S"},
        at=at,
    )
    for scheme, value in IDENTIFIER_SCHEMES:
        ontology.add_identifier(SUB_ID, scheme, value, at=at)
    for text, language in SYNONYMS:
        ontology.add_synonym(SUB_ID, text, language, at=at)

    combo_partners = (
        "caffeine", "orphenadrine", "hyoscine", "promethazine", "adiphenine",
        "papaverine", "atropine", "homatropine", "isometheptene", "pitofenone",
        "fenpiverinium", "butylscopolamine", "caffeine + orphenadrine",
        "simethicone", "dexamethasone",
    )
    vtm_ids = [VTM_ID]
    ontology.upsert_entity(VTM_ID, "VTM", "dipyrone monohydrate", parent_ids=[SUB_ID], at=at)
    for i, partner in enumerate(combo_partners, start=1):
        vtm_id = f"VTM-{1000000 + i:09d}"
        vtm_ids.append(vtm_id)
        ontology.upsert_entity(
            vtm_id, "VTM", f"dipyrone monohydrate + {partner}", parent_ids=[SUB_ID], at=at
        )

    reference_vmps = (
        (VMP_ID, "dipyrone monohydrate 500 mg tablet", {
            "substance": "dipyrone monohydrate",
            "concentration": "500 mg",
            "atc": "N02BB02",
            "ddd": "0.167",
            "form": "tablet (PDF-000002766)",
            "form_taxonomy": "oral / solid / ingestion / conventional release",
            "composition": "500 mg dipyrone monohydrate",
        }),
        ("VMP-000051610", "dipyrone monohydrate 1 g tablet", {
            "substance": "dipyrone monohydrate", "concentration": "1 g", "atc": "N02BB02",
            "form": "tablet (PDF-000002766)",
            "form_taxonomy": "oral / solid / ingestion / conventional release",
            "composition": "1 g dipyrone monohydrate",
        }),
        ("VMP-000051611", "dipyrone monohydrate 500 mg/ml oral drops", {
            "substance": "dipyrone monohydrate", "concentration": "500 mg/ml", "atc": "N02BB02",
            "form": "oral drops (PDF-000002801)",
            "form_taxonomy": "oral / liquid / ingestion / conventional release",
            "composition": "500 mg/ml dipyrone monohydrate",
        }),
        ("VMP-000051612", "dipyrone monohydrate 50 mg/ml oral solution", {
            "substance": "dipyrone monohydrate", "concentration": "50 mg/ml", "atc": "N02BB02",
            "form": "oral solution (PDF-000002802)",
            "form_taxonomy": "oral / liquid / ingestion / conventional release",
            "composition": "50 mg/ml dipyrone monohydrate",
        }),
        ("VMP-000051613", "dipyrone monohydrate 500 mg/ml solution for injection", {
            "substance": "dipyrone monohydrate", "concentration": "500 mg/ml", "atc": "N02BB02",
            "form": "solution for injection (PDF-000002850)",
            "form_taxonomy": "parenteral / liquid / injection / conventional release",
            "composition": "500 mg/ml dipyrone monohydrate",
        }),
        ("VMP-000051614", "dipyrone monohydrate 300 mg suppository", {
            "substance": "dipyrone monohydrate", "concentration": "300 mg", "atc": "N02BB02",
            "form": "suppository (PDF-000002860)",
            "form_taxonomy": "rectal / solid / insertion / conventional release",
            "composition": "300 mg dipyrone monohydrate",
        }),
        ("VMP-000051615", "dipyrone monohydrate 1 g effervescent tablet", {
            "substance": "dipyrone monohydrate", "concentration": "1 g", "atc": "N02BB02",
            "form": "effervescent tablet (PDF-000002770)",
            "form_taxonomy": "oral / solid / dissolution / conventional release",
            "composition": "1 g dipyrone monohydrate",
        }),
    )
    for vmp_id, name, attributes in reference_vmps:
        ontology.upsert_entity(vmp_id, "VMP", name, parent_ids=[VTM_ID], attributes=attributes, at=at)
    # 29 further formulations across the combination VTMs: 36 VMPs in total.
    for i in range(29):
        vtm_id = vtm_ids[1 + (i % 15)]
        partner = combo_partners[i % 15]
        vmp_id = f"VMP-{1000000 + i:09d}"
        ontology.upsert_entity(
            vmp_id,
            "VMP",
            f"dipyrone monohydrate 300 mg + {partner} combination tablet {i + 1}",
            parent_ids=[vtm_id],
            attributes={
                "substance": f"dipyrone monohydrate + {partner}",
                "concentration": "300 mg",
                "atc": "N02BB52",
                "form": "tablet (PDF-000002766)",
                "form_taxonomy": "oral / solid / ingestion / conventional release",
                "composition": f"300 mg dipyrone monohydrate + {partner}",
            },
            at=at,
        )

    vmpp_ids = []
    for i, size in enumerate(PACK_SIZES, start=1):
        vmpp_id = VMPP_ID if size == 30 else f"VMPP-{103766 + i:09d}"
        vmpp_ids.append(vmpp_id)
        ontology.upsert_entity(
            vmpp_id,
            "VMPP",
            f"dipyrone 500 mg x {size} tablets",
            parent_ids=[VMP_ID],
            attributes={
                "prescribable_unit": "tablet",
                "packaging": "blister",
                "pack_size": str(size),
            },
            at=at,
        )

    # 92 trade products: 17 in the reference x30 configuration, the rest
    # spread over the other twelve pack sizes (nine take 6, three take 7).
    placements = [VMPP_ID] * 17
    others = [v for v in vmpp_ids if v != VMPP_ID]
    for i, vmpp in enumerate(others):
        placements.extend([vmpp] * (7 if i >= 9 else 6))
    for n, vmpp in enumerate(placements, start=1):
        manufacturer = MANUFACTURERS[(n - 1) % len(MANUFACTURERS)]
        if n == 1:
            amp_id, ampp_id = AMP_NOVALGINA, AMPP_NOVALGINA
            brand = "NOVALGINA 500 mg"
            registration = "PMA 183260351"
            ean = NOVALGINA_EAN
        else:
            amp_id, ampp_id = f"AMP-{n:09d}", f"AMPP-{n:09d}"
            brand = f"DIPYMAX {n:02d} 500 mg"
            registration = f"PMA {183260351 + n}"
            ean = f"78910{58000000 + n:08d}"
        pack_size = next(s for v, s in zip(vmpp_ids, PACK_SIZES) if v == vmpp)
        ontology.upsert_entity(
            amp_id,
            "AMP",
            brand,
            parent_ids=[vmpp],
            attributes={
                "registration": registration,
                "therapeutic_class": "non-narcotic analgesics",
                "manufacturer": manufacturer,
                "manufacturer_org": org_ids[manufacturer],
            },
            at=at,
        )
        ontology.upsert_entity(
            ampp_id,
            "AMPP",
            f"{brand} box x {pack_size}",
            parent_ids=[amp_id],
            attributes={
                "ean": ean,
                "label": "OTC (no prescription required)",
                "storage": "15-30 C, 24-month shelf life",
                "status": "active",
            },
            at=at,
        )
        ontology.add_identifier(ampp_id, "EAN", ean, at=at)


# Evidence Packs -------------------------------------------------------------------------


def _entry(ref, nodes) -> ProvenanceChainEntry:
    return ProvenanceChainEntry(
        doc_id=ref.doc_id,
        version_label=ref.version_label,
        checksum=ref.checksum,
        node_ids=tuple(nodes),
    )


def _limits(divergences=(), gaps=(), dependencies=(), silences=()) -> EpistemicLimits:
    return EpistemicLimits(
        divergences=tuple(divergences),
        gaps=tuple(gaps),
        dependencies=tuple(dependencies),
        silences=tuple(silences),
    )


FOCUS = "dipyrone monohydrate 500 mg tablet"

CURATORS = ("curator-ana.souza", "curator-rui.lima", "curator-t.barbosa")


def _pack_table(refs: dict) -> list:
    """The 38 fixture packs as keyword-argument dicts, in allocation order."""
    prof = refs[f"prof_{VERSIONS[-1][0]}"]
    prof_v4 = refs[f"prof_{VERSIONS[-2][0]}"]
    pac = refs[f"pac_{VERSIONS[-1][0]}"]
    hsl = refs["hsl_1"]
    hae = refs["hae_1"]
    pub1 = refs["pub_1"]
    pub2 = refs["pub_2"]

    def pack(pack_id, assertion_type, question, assertion, validity=(), invalidity=(),
             provenance=None, limits=None, verdict="accept", justification=None,
             derived_from=None):
        return {
            "pack_id": pack_id,
            "assertion_type": assertion_type,
            "question": question,
            "assertion": assertion,
            "validity": tuple(validity),
            "invalidity": tuple(invalidity),
            "provenance": provenance or [_entry(prof, ["1.1"])],
            "limits": limits or _limits(gaps=("Off-label indications",),
                                        dependencies=("Always consult a healthcare professional",)),
            "verdict": verdict,
            "justification": justification,
            "derived_from": derived_from,
        }

    table = [
        pack(
            "EP-001", "INDICATION",
            "What is this medication indicated for?",
            "Approved indication: analgesic and antipyretic (adults)",
            validity=("Mild to moderate pain",),
            invalidity=("Hypersensitivity to dipyrone",),
            provenance=[_entry(prof, ["1.1"])],
            limits=_limits(gaps=("Off-label indications",),
                           dependencies=("Always consult a healthcare professional",)),
        ),
        pack(
            "EP-002", "INDICATION",
            "Is this medication indicated for fever?",
            "Indicated as antipyretic when fever is refractory to other measures",
            validity=("Fever refractory to other measures",),
            provenance=[_entry(prof, ["1.1"]), _entry(pac, ["1.1"])],
        ),
        pack(
            "EP-003", "CONTRAINDICATION",
            "When should this medication not be used?",
            "Contraindicated in hypersensitivity to dipyrone or other pyrazolones",
            invalidity=("Hypersensitivity to dipyrone", "Hypersensitivity to pyrazolones"),
            provenance=[_entry(prof, ["1.3"])],
        ),
        pack(
            "EP-004", "CONTRAINDICATION",
            "Can this medication be used with bone marrow suppression?",
            "Contraindicated in bone marrow suppression and agranulocytosis history",
            invalidity=("Bone marrow suppression", "History of agranulocytosis"),
            provenance=[_entry(prof, ["1.3"]), _entry(hsl, ["1.3"])],
        ),
        pack(
            "EP-005", "DOSING",
            "What is the usual adult dose?",
            "Adults: 500 mg to 1000 mg up to four times daily",
            validity=("context: adults over 15 years",),
            provenance=[_entry(prof, ["1.5"])],
        ),
        pack(
            "EP-006", "INTERACTION",
            "Does dipyrone interact with acetylsalicylic acid?",
            "May reduce the effect of acetylsalicylic acid on platelet aggregation",
            validity=("context: concomitant antiplatelet therapy",),
            provenance=[_entry(prof, ["1.8"])],
        ),
        pack(
            "EP-007", "ADVERSE_REACTION",
            "Which serious blood reactions are documented?",
            "Agranulocytosis is a rare but documented serious reaction",
            validity=("context: any treatment duration",),
            provenance=[_entry(prof_v4, ["1.7", "1.4"])],
            limits=_limits(divergences=("Frequency estimates vary across sources",),
                           dependencies=("Pharmacovigilance reporting",)),
        ),
        pack(
            "EP-008", "WARNING",
            "What early signs require discontinuation?",
            "Discontinue at first sign of fever, sore throat or mucosal lesions",
            validity=("context: during any treatment course",),
            provenance=[_entry(prof, ["1.4"])],
        ),
        pack(
            "EP-009", "PRECAUTION",
            "Is monitoring needed in hypotensive patients?",
            "Use with caution in patients with pre-existing hypotension",
            validity=("population: patients with pre-existing hypotension",),
            provenance=[_entry(prof, ["1.4"]), _entry(hae, ["1.4"])],
        ),
        pack(
            "EP-010", "SPECIAL_POPULATION",
            "Can this medication be used during pregnancy?",
            "Not recommended during the first trimester and the last trimester of pregnancy",
            validity=("population: pregnant women",),
            invalidity=("population: first trimester of pregnancy",
                        "population: last trimester of pregnancy"),
            provenance=[_entry(prof, ["1.9", "1.3"])],
        ),
        pack(
            "EP-011", "SPECIAL_POPULATION",
            "From what age can this medication be used?",
            "Not recommended in children under 3 months",
            invalidity=("population: children under 3 months",),
            provenance=[_entry(prof, ["1.9"])],
        ),
        pack(
            "EP-012", "DOSING",
            "What is the maximum daily dose?",
            "Maximum daily dose 3000 mg",
            validity=("context: adults",),
            provenance=[_entry(prof_v4, ["1.5"])],
            verdict="reject",
            justification="Cites superseded dosing guidance; the 20260116 revision raised the maximum daily dose",
        ),
        pack(
            "EP-013", "DOSING",
            "What is the maximum daily dose?",
            "Maximum daily dose 4000 mg",
            validity=("context: adults",),
            provenance=[_entry(prof, ["1.5"])],
            derived_from="EP-012",
            justification="Replaces EP-012 with the binding 20260116 dosing text",
        ),
        pack(
            "EP-014", "INTERACTION",
            "Does dipyrone interact with warfarin?",
            "Concomitant use with warfarin may alter anticoagulant response; monitor INR",
            validity=("context: patients under oral anticoagulation",),
            provenance=[_entry(prof, ["1.8"]), _entry(hsl, ["1.2", "1.4"])],
            limits=_limits(divergences=("Effect magnitude varies across reports",),
                           dependencies=("INR monitoring",)),
        ),
    ]

    # Templated remainder: realistic spread over the taxonomy and sources.
    spread = [
        ("INDICATION", "Is %s pain within the approved indication?",
         "Approved for %s pain when other measures are insufficient",
         ("postoperative", "dental", "colic-associated")),
        ("CONTRAINDICATION", "Is use contraindicated with %s?",
         "Contraindicated in patients with %s",
         ("glucose intolerance history", "acute hepatic porphyria", "severe renal failure")),
        ("DOSING", "How should dosing change for %s?",
         "Dose review required for %s",
         ("hepatic impairment", "renal impairment", "elderly patients")),
        ("INTERACTION", "Does dipyrone interact with %s?",
         "Interaction with %s documented; monitor clinical response",
         ("chlorpromazine", "ciclosporin", "methotrexate")),
        ("ADVERSE_REACTION", "Is %s a documented adverse reaction?",
         "%s is a documented adverse reaction",
         ("hypotension", "fixed drug eruption", "anaphylactic reaction")),
        ("WARNING", "Is there a warning about %s?",
         "Warning: %s requires immediate medical evaluation",
         ("skin rash progression", "unexplained fever", "mucosal lesions")),
        ("PRECAUTION", "Is caution required with %s?",
         "Caution and monitoring required with %s",
         ("prolonged use beyond one week", "asthma history", "low blood volume")),
        ("SPECIAL_POPULATION", "What applies to %s?",
         "Specific guidance applies to %s",
         ("breastfeeding women",)),
    ]
    sources_cycle = (
        [_entry(prof, ["1.4", "1.7"])],
        [_entry(pac, ["1.3"])],
        [_entry(hsl, ["1.1", "1.3"])],
        [_entry(hae, ["1.2"])],
        [_entry(pub1, ["1.1", "1.2"])],
        [_entry(pub2, ["1.2"])],
        [_entry(prof, ["1.8"]), _entry(pub1, ["1.1"])],
    )
    n = 15
    for assertion_type, question_tpl, assertion_tpl, topics in spread:
        for j, topic in enumerate(topics):
            table.append(
                pack(
                    f"EP-{n:03d}", assertion_type,
                    question_tpl % topic,
                    assertion_tpl % (topic.capitalize() if assertion_tpl.startswith("%s") else topic),
                    validity=(f"context: {topic}",) if assertion_type != "CONTRAINDICATION" else (),
                    invalidity=(f"context: {topic}",) if assertion_type == "CONTRAINDICATION" else (),
                    provenance=list(sources_cycle[(n - 15) % len(sources_cycle)]),
                    limits=_limits(
                        gaps=(f"No quantitative data on {topic}",),
                        dependencies=("Always consult a healthcare professional",),
                    ),
                )
            )
            n += 1
    assert n == 37, n

    table.append(
        pack(
            "EP-037", "INDICATION",
            "Is the injectable form indicated when oral dosing is impossible?",
            "Injectable dipyrone is indicated when the oral route is unavailable",
            validity=("context: oral route unavailable",),
            provenance=[_entry(hsl, ["1.1", "1.2"]), _entry(hae, ["1.1"])],
        )
    )
    return table


def _load_packs(corpus: Corpus, refs: dict) -> None:
    prof = refs[f"prof_{VERSIONS[-1][0]}"]
    for i, row in enumerate(_pack_table(refs)):
        question = QualifiedQuestion(text=row["question"], assertion_type=row["assertion_type"])
        response = GroundedResponse(
            assertion=row["assertion"],
            validity_conditions=row["validity"],
            invalidity_conditions=row["invalidity"],
        )
        if row["derived_from"]:
            corpus.lector.derive_pack(
                row["derived_from"], question, response, row["provenance"],
                row["limits"], FOCUS, pack_id=row["pack_id"],
            )
        else:
            corpus.lector.create_pack(
                question, response, row["provenance"], row["limits"], FOCUS,
                pack_id=row["pack_id"],
            )
        corpus.lector.submit_for_review(row["pack_id"])
        curator = CURATORS[i % len(CURATORS)]
        justification = row["justification"] or (
            f"Text verified against the cited nodes of the {row['provenance'][0].version_label} source"
        )
        corpus.lector.curate(
            row["pack_id"], row["verdict"], curator, justification, at=DECISION_INSTANT
        )

    # The G6PD silence pack: reviewed sections cited, silence recorded as such.
    silence_question = "Is dipyrone safe for patients with G6PD deficiency?"
    corpus.lector.record_normative_silence(
        question_text=silence_question,
        focus=FOCUS,
        sections_reviewed=[_entry(prof, ["1.3", "1.4"])],
        limits=_limits(
            silences=(silence_question,),
            dependencies=("Clinical judgment required; consult specialized literature",),
        ),
        pack_id="EP-039",
    )
    corpus.lector.submit_for_review("EP-039")
    corpus.lector.curate(
        "EP-039", "accept", CURATORS[0],
        "Reviewed contraindication and warning sections; no pronouncement found. Silence does NOT equate to safety or permission",
        at=DECISION_INSTANT,
    )


# Eight packs with a direct regulatory anchor on the reference trade pack.
REGULATORY_PACKS = ("EP-001", "EP-003", "EP-008", "EP-010", "EP-024", "EP-030", "EP-032", "EP-039")


def _load_links(corpus: Corpus) -> None:
    accepted = [p.pack_id for p in corpus.lector.accepted_packs()]
    for i, pack_id in enumerate(accepted):
        corpus.ontology.link_evidence(pack_id, VMP_ID, at=LINK_INSTANT)
        corpus.ontology.link_evidence(
            pack_id, SUB_ID if i % 2 == 0 else VTM_ID, at=LINK_INSTANT
        )
        corpus.ontology.link_evidence(
            pack_id, VMPP_ID if i % 2 == 0 else AMP_NOVALGINA, at=LINK_INSTANT
        )
    for pack_id in REGULATORY_PACKS:
        corpus.ontology.link_evidence(pack_id, AMPP_NOVALGINA, at=LINK_INSTANT)


def load_dipyrone(corpus: Corpus) -> dict:
    """Build the golden corpus; idempotence is not attempted — load into a
    fresh data directory."""
    refs = _load_documents(corpus)
    trees = _index_documents(corpus, refs)
    _load_ontology(corpus)
    _load_packs(corpus, refs)
    _load_links(corpus)
    report = corpus.refraction.refract_all()
    packs = corpus.lector.all_packs()
    return {
        "documents": corpus.store.document_count(),
        "pageindex_trees": len(trees),
        "packs_total": len(packs),
        "packs_accepted": sum(1 for p in packs if p.status.state == "accepted"),
        "packs_rejected": sum(1 for p in packs if p.status.state == "rejected"),
        "links_total": corpus.ontology.link_count(),
        "graphs_materialized": report["graph_count"],
        "views": report["views"],
    }


# Synthetic benchmark corpus ------------------------------------------------------------

BENCH_INSTANT = "2026-03-01T00:00:00Z"
BENCH_COUNTS = {
    "SUBSTANCE": 500,
    "VTM": 1000,
    "VMP": 5055,
    "VMPP": 15000,
    "AMP": 8000,
    "AMPP": 35000,
}


def build_benchmark_ontology(corpus: Corpus) -> int:
    """Populate a bare ontology sized so that all four views together
    materialize exactly 55,555 graphs (500 + 5,055 + 15,000 + 35,000;
    VTM and AMP levels carry structure only). Returns the expected count."""
    ontology = corpus.ontology
    at = BENCH_INSTANT
    counts = BENCH_COUNTS
    for i in range(counts["SUBSTANCE"]):
        ontology.upsert_entity(
            f"SUB-{900000000 + i:09d}", "SUBSTANCE", f"benchmark substance {i:05d}",
            attributes={"dcb": f"{90000 + i}"}, at=at,
        )
    for i in range(counts["VTM"]):
        ontology.upsert_entity(
            f"VTM-{900000000 + i:09d}", "VTM", f"benchmark moiety {i:05d}",
            parent_ids=[f"SUB-{900000000 + i % counts['SUBSTANCE']:09d}"], at=at,
        )
    for i in range(counts["VMP"]):
        ontology.upsert_entity(
            f"VMP-{900000000 + i:09d}", "VMP", f"benchmark formulation {i:05d}",
            parent_ids=[f"VTM-{900000000 + i % counts['VTM']:09d}"],
            attributes={
                "substance": f"benchmark substance {(i % counts['SUBSTANCE']):05d}",
                "concentration": f"{100 + (i % 9) * 50} mg",
                "atc": f"X{i % 100:02d}AB{i % 10}",
                "ddd": f"0.{100 + i % 900}",
            },
            at=at,
        )
    for i in range(counts["VMPP"]):
        ontology.upsert_entity(
            f"VMPP-{900000000 + i:09d}", "VMPP", f"benchmark pack {i:05d}",
            parent_ids=[f"VMP-{900000000 + i % counts['VMP']:09d}"],
            attributes={"prescribable_unit": "tablet", "packaging": "blister"},
            at=at,
        )
    for i in range(counts["AMP"]):
        ontology.upsert_entity(
            f"AMP-{900000000 + i:09d}", "AMP", f"benchmark product {i:05d}",
            parent_ids=[f"VMPP-{900000000 + i % counts['VMPP']:09d}"],
            attributes={
                "registration": f"REG {900000 + i}",
                "manufacturer": f"benchmark manufacturer {i % 40:02d}",
            },
            at=at,
        )
    for i in range(counts["AMPP"]):
        ontology.upsert_entity(
            f"AMPP-{900000000 + i:09d}", "AMPP", f"benchmark presentation {i:05d}",
            parent_ids=[f"AMP-{900000000 + i % counts['AMP']:09d}"],
            attributes={
                "ean": f"{7000000000000 + i:013d}",
                "label": "OTC",
                "status": "active",
            },
            at=at,
        )
    return (
        counts["SUBSTANCE"] + counts["VMP"] + counts["VMPP"] + counts["AMPP"]
    )
