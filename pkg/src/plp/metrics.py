"""Corpus evaluation: five criteria plus raw counts.

* provenance_completeness — of all assertion nodes across materialized
  graphs, the fraction whose document chains fully verify against the store;
* interpretive_traceability — of accepted packs, the fraction whose reading
  artifact (a page index covering every cited node), decision record, and
  justification can all be reconstructed;
* curatorial_coverage — accepted packs over all packs;
* contextual_differentiation — for each pair of views, whether their
  attribute allowlists differ (reported per pair, not as a fraction);
* accountability — terminal decisions carrying curator + justification over
  all terminal decisions.

Vacuous cases (no data to measure) report 1.0 and flag the snapshot "empty"
rather than failing on a division by zero.
"""

from __future__ import annotations

from plp.refraction import VIEW_ATTRIBUTE_ALLOWLISTS, VIEW_KINDS


def _fraction(numerator: int, denominator: int) -> float:
    if denominator == 0:
        return 1.0
    return numerator / denominator


def coverage_metrics(corpus) -> dict:
    packs = corpus.lector.all_packs()
    return {
        "packs_total": len(packs),
        "packs_accepted": sum(1 for p in packs if p.status.state == "accepted"),
        "packs_rejected": sum(1 for p in packs if p.status.state == "rejected"),
        "links_total": corpus.ontology.link_count(),
        "entities_per_level": corpus.ontology.entity_count_by_level(),
    }


def contextual_differentiation() -> dict:
    report = {}
    for i, first in enumerate(VIEW_KINDS):
        for second in VIEW_KINDS[i + 1:]:
            key = f"{first}|{second}"
            report[key] = (
                VIEW_ATTRIBUTE_ALLOWLISTS[first] != VIEW_ATTRIBUTE_ALLOWLISTS[second]
            )
    return report


def provenance_completeness(corpus) -> tuple:
    """(fraction, verified_nodes, total_nodes) over all materialized graphs."""
    verified_nodes = 0
    total_nodes = 0
    chain_ok: dict[str, bool] = {}
    for entry in corpus.refraction.manifest_entries():
        payload = corpus.refraction.load_graph_payload(entry["graph_id"])
        for node in payload["nodes"]:
            if node["kind"] != "assertion":
                continue
            total_nodes += 1
            pack_id = node["props"]["pack_id"]
            if pack_id not in chain_ok:
                pack = corpus.lector.get_pack(pack_id)
                chain_ok[pack_id] = corpus.refraction.verify_pack_chain(pack)
            if chain_ok[pack_id]:
                verified_nodes += 1
    return _fraction(verified_nodes, total_nodes), verified_nodes, total_nodes


def interpretive_traceability(corpus) -> tuple:
    accepted = corpus.lector.accepted_packs()
    reconstructible = 0
    for pack in accepted:
        decisions = [
            d for d in corpus.lector.decisions_for(pack.pack_id) if d.justification.strip()
        ]
        if not decisions:
            continue
        readable = True
        for entry in pack.provenance:
            trees = corpus.lector.trees_for_doc(entry.doc_id)
            cited = set(entry.node_ids)
            if not any(cited <= tree.node_ids() for tree in trees):
                readable = False
                break
        if readable:
            reconstructible += 1
    return _fraction(reconstructible, len(accepted)), reconstructible, len(accepted)


def accountability(corpus) -> tuple:
    decisions = corpus.lector.all_decisions()
    documented = sum(
        1 for d in decisions if d.curator.strip() and d.justification.strip()
    )
    return _fraction(documented, len(decisions)), documented, len(decisions)


def compute_metrics(corpus) -> dict:
    coverage = coverage_metrics(corpus)
    completeness, verified_nodes, assertion_nodes = provenance_completeness(corpus)
    traceability, reconstructible, accepted_total = interpretive_traceability(corpus)
    accountable, documented, decisions_total = accountability(corpus)
    manifest = corpus.refraction.manifest_entries()
    packs = corpus.lector.all_packs()
    counts = {
        "documents_total": corpus.store.document_count(),
        "pageindex_trees": corpus.lector.tree_count(),
        "packs_total": coverage["packs_total"],
        "packs_accepted": coverage["packs_accepted"],
        "packs_rejected": coverage["packs_rejected"],
        "packs_draft": sum(1 for p in packs if p.status.state == "draft"),
        "packs_under_review": sum(1 for p in packs if p.status.state == "under_review"),
        "links_total": coverage["links_total"],
        "entities_per_level": coverage["entities_per_level"],
        "organizations": len(corpus.ontology.organizations()),
        "graphs_materialized": len(manifest),
        "view_kinds_materialized": len({entry["view"] for entry in manifest}),
        "assertion_types_used": len({p.question.assertion_type for p in packs}),
        "assertion_nodes": assertion_nodes,
        "verified_assertion_nodes": verified_nodes,
        "decisions_total": decisions_total,
    }
    empty = (
        counts["documents_total"] == 0
        and counts["packs_total"] == 0
        and counts["graphs_materialized"] == 0
    )
    return {
        "snapshot_at": corpus.snapshot_instant(),
        "flag": "empty" if empty else None,
        "provenance_completeness": completeness,
        "interpretive_traceability": traceability,
        "curatorial_coverage": _fraction(coverage["packs_accepted"], coverage["packs_total"]),
        "contextual_differentiation": contextual_differentiation(),
        "accountability": accountable,
        "counts": counts,
    }
