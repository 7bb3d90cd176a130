"""Command-line front door.

Every subcommand operates through a :class:`plp.corpus.Corpus` bound to
``--data-dir`` (or ``PLP_DATA_DIR``). Structured output mode prints the
exact canonical serializations the core modules define, so command output
is byte-diffable against HTTP API response bodies.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from plp.canonical import canonical_json
from plp.corpus import Corpus, parse_pack_inputs
from plp.errors import PlpError
from plp.lector import validate_well_formed
from plp.metrics import compute_metrics
from plp.store import MaturityStage

STRUCTURED = "structured"
HUMAN = "human"


class CliState:
    def __init__(self, data_dir: str, output: str, quiet: bool):
        self.data_dir = Path(data_dir)
        self.output = output
        self.quiet = quiet
        self._corpus = None

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = Corpus(self.data_dir)
        return self._corpus

    def emit(self, payload, human_lines=None) -> None:
        """Print a result: canonical bytes in structured mode, prose otherwise."""
        if self.output == STRUCTURED:
            if isinstance(payload, (bytes, bytearray)):
                sys.stdout.buffer.write(payload)
                sys.stdout.buffer.flush()
            else:
                click.echo(canonical_json(payload), nl=False)
        elif not self.quiet:
            if human_lines is None:
                human_lines = [json.dumps(payload, indent=2, sort_keys=True, default=str)]
            for line in human_lines:
                click.echo(line)


pass_state = click.make_pass_decorator(CliState)


def guarded(fn):
    """Map domain errors to the stable error envelope and a nonzero exit."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PlpError as exc:
            click.echo(canonical_json(exc.as_payload()), err=True)
            raise SystemExit(1)

    return wrapper


def _read_payload(source: str) -> dict:
    """Read a JSON object from a file path or '-' for stdin."""
    raw = sys.stdin.read() if source == "-" else Path(source).read_text(encoding="utf-8")
    payload = json.loads(raw)
    if not isinstance(payload, dict):
        raise click.ClickException("expected a JSON object")
    return payload


@click.group()
@click.option(
    "--data-dir",
    envvar="PLP_DATA_DIR",
    default="./plp-data",
    show_default=True,
    help="Corpus data directory.",
)
@click.option(
    "--output",
    envvar="PLP_OUTPUT",
    type=click.Choice([HUMAN, STRUCTURED]),
    default=HUMAN,
    show_default=True,
    help="human: prose; structured: exact canonical serializations.",
)
@click.option("--quiet", envvar="PLP_QUIET", is_flag=True, help="Suppress human-mode output.")
@click.version_option(package_name="artifact")
@click.pass_context
def main(ctx, data_dir, output, quiet):
    """Document preservation, evidence curation, and context-graph tooling."""
    ctx.obj = CliState(data_dir, output, quiet)


# Documents ---------------------------------------------------------------------------


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@pass_state
@guarded
def ingest(state, manifest):
    """Ingest documents listed in a line-delimited JSON MANIFEST."""
    report = state.corpus.ingest_manifest(manifest)
    state.emit(report, [f"ingested {report['ingested']} documents"])


@main.command()
@click.argument("doc_id", required=False)
@click.option("--all", "verify_all", is_flag=True, help="Verify every stored document.")
@pass_state
@guarded
def verify(state, doc_id, verify_all):
    """Recompute checksums against stored bytes; exits nonzero on corruption."""
    store = state.corpus.store
    if verify_all == bool(doc_id):
        raise click.UsageError("provide exactly one of DOC_ID or --all")
    targets = [ref.doc_id for ref in store.all_documents()] if verify_all else [doc_id]
    results = [store.verify_integrity(target) for target in targets]
    failed = [r for r in results if r["result"] != "ok"]
    payload = {"results": results, "ok": len(results) - len(failed), "corrupted": len(failed)}
    state.emit(
        payload,
        [f"{r['doc_id']}: {r['result']}" for r in results]
        + [f"ok {payload['ok']}/{len(results)}"],
    )
    if failed:
        raise SystemExit(1)


@main.command()
@click.argument("doc_id")
@click.option("--reader", default="stub", show_default=True, help="Registered reader id.")
@pass_state
@guarded
def index(state, doc_id, reader):
    """Build and persist a page-index tree for DOC_ID."""
    ref = state.corpus.store.get_document(doc_id)
    if ref.maturity < MaturityStage.CLEANED:
        state.corpus.store.promote_maturity(ref.doc_id, MaturityStage.CLEANED)
    tree = state.corpus.lector.build_page_index(doc_id, reader_id=reader)
    payload = tree.as_payload()
    state.emit(payload, [f"indexed {doc_id} with {reader}: {len(tree.node_ids())} nodes"])


# Evidence packs -----------------------------------------------------------------------


@main.group()
def pack():
    """Create, validate, and steward Evidence Packs."""


@pack.command("new")
@click.argument("payload_file")
@pass_state
@guarded
def pack_new(state, payload_file):
    """Create a draft pack from a JSON payload (file path or '-')."""
    inputs = parse_pack_inputs(_read_payload(payload_file))
    created = state.corpus.lector.create_pack(
        inputs["question"],
        inputs["response"],
        inputs["provenance"],
        inputs["limits"],
        inputs["focus"],
        pack_id=inputs["pack_id"],
    )
    state.emit(created.as_payload(), [f"created {created.pack_id} (draft)"])


@pack.command("validate")
@click.argument("target")
@pass_state
@guarded
def pack_validate(state, target):
    """Run the six structural conditions; TARGET is a pack id or payload file.

    Exits nonzero when the pack is not well-formed.
    """
    corpus = state.corpus
    if corpus.lector.has_pack(target):
        subject = corpus.lector.get_pack(target)
    else:
        subject = _read_payload(target)
    report = validate_well_formed(subject, corpus.store)
    state.emit(
        report,
        [
            f"well_formed: {report['well_formed']}",
            f"violations: {report['violations']}",
            f"unverifiable: {report['unverifiable']}",
        ],
    )
    if not report["well_formed"]:
        raise SystemExit(1)


@pack.command("submit")
@click.argument("pack_id")
@pass_state
@guarded
def pack_submit(state, pack_id):
    """Move a draft pack to under_review."""
    updated = state.corpus.lector.submit_for_review(pack_id)
    state.emit(updated.as_payload(), [f"{pack_id} is now under_review"])


@pack.command("curate")
@click.argument("pack_id")
@click.option("--verdict", type=click.Choice(["accept", "reject"]), required=True)
@click.option("--curator", required=True, help="Curator identity recorded on the decision.")
@click.option("--justification", required=True, help="Mandatory rationale for the verdict.")
@pass_state
@guarded
def pack_curate(state, pack_id, verdict, curator, justification):
    """Record a terminal curatorial decision."""
    updated, decision = state.corpus.lector.curate(pack_id, verdict, curator, justification)
    state.emit(
        {"pack": updated.as_payload(), "decision": decision.as_payload()},
        [f"{pack_id} {updated.status.state} by {curator} ({decision.decision_id})"],
    )


@pack.command("derive")
@click.argument("source_pack_id")
@click.argument("payload_file")
@pass_state
@guarded
def pack_derive(state, source_pack_id, payload_file):
    """Create a fresh draft derived from SOURCE_PACK_ID (revision workflow)."""
    inputs = parse_pack_inputs(_read_payload(payload_file))
    created = state.corpus.lector.derive_pack(
        source_pack_id,
        inputs["question"],
        inputs["response"],
        inputs["provenance"],
        inputs["limits"],
        inputs["focus"],
        pack_id=inputs["pack_id"],
    )
    state.emit(created.as_payload(), [f"created {created.pack_id} derived from {source_pack_id}"])


# Ontology -----------------------------------------------------------------------------


@main.command()
@click.argument("pack_id")
@click.argument("entity_id")
@pass_state
@guarded
def link(state, pack_id, entity_id):
    """Link an accepted pack to a canonical entity."""
    created = state.corpus.ontology.link_evidence(pack_id, entity_id)
    state.emit(created.as_payload(), [f"{created.link_id}: {pack_id} -> {entity_id}"])


@main.group()
def ontology():
    """Bulk-load and export canonical entities."""


@ontology.command("load")
@click.argument("records_file", type=click.Path(exists=True, dir_okay=False))
@pass_state
@guarded
def ontology_load(state, records_file):
    """Load line-delimited entity/identifier/synonym/organization/link records."""
    records = [
        json.loads(line)
        for line in Path(records_file).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    report = state.corpus.ontology.load_records(records)
    state.emit(report, [f"loaded {sum(report.values())} records: {report}"])


@ontology.command("export")
@click.argument("out_file", required=False)
@pass_state
@guarded
def ontology_export(state, out_file):
    """Export the ontology as line-delimited records (stdout by default)."""
    lines = [canonical_json(record) for record in state.corpus.ontology.export_records()]
    text = "\n".join(lines) + ("\n" if lines else "")
    if out_file and out_file != "-":
        Path(out_file).write_text(text, encoding="utf-8")
        state.emit({"records": len(lines), "path": out_file}, [f"wrote {len(lines)} records to {out_file}"])
    else:
        sys.stdout.write(text)


# Refraction ---------------------------------------------------------------------------


@main.command()
@click.argument("entity_id")
@click.argument("view")
@pass_state
@guarded
def refract(state, entity_id, view):
    """Materialize one context graph; structured mode prints the exact file bytes."""
    graph = state.corpus.refraction.refract(entity_id, view)
    state.emit(
        graph.file_str.encode("utf-8"),
        [
            f"graph {graph.graph_id}: {len(graph.nodes)} nodes, {len(graph.edges)} edges",
            f"content_digest {graph.content_digest}",
        ],
    )


@main.command("refract-all")
@click.option("--bench", is_flag=True, help="Run on the synthetic benchmark ontology.")
@pass_state
@guarded
def refract_all(state, bench):
    """Materialize every view for every eligible entity; prints count and time."""
    if bench:
        from plp.fixtures import BENCH_COUNTS, build_benchmark_ontology

        bench_corpus = Corpus(state.data_dir / "benchmark")
        expected_entities = sum(BENCH_COUNTS.values())
        present = sum(bench_corpus.ontology.entity_count_by_level().values())
        if present != expected_entities:
            if not state.quiet and state.output == HUMAN:
                click.echo("generating benchmark ontology (untimed)...", err=True)
            build_benchmark_ontology(bench_corpus)
        target = bench_corpus
    else:
        target = state.corpus
    report = target.refraction.refract_all()
    state.emit(
        report,
        [
            f"graph_count {report['graph_count']}",
            f"elapsed_seconds {report['elapsed_seconds']}",
        ],
    )


@main.command()
@click.argument("graph_id")
@click.argument("node_id")
@pass_state
@guarded
def trace(state, graph_id, node_id):
    """Reconstruct the provenance chain behind an assertion node."""
    chain = state.corpus.refraction.trace(graph_id, node_id)
    human = [
        f"pack {chain['pack_id']} ({chain['assertion_type']}): complete={chain['complete']}"
    ] + [
        f"  {entry['doc_id']}@{entry['version_label']} nodes={entry['node_ids']}: {entry['result']}"
        for entry in chain["entries"]
    ]
    state.emit(chain, human)


# Metrics, fixtures, service ------------------------------------------------------------


@main.command()
@pass_state
@guarded
def metrics(state):
    """Compute the five evaluation criteria over the current corpus."""
    report = compute_metrics(state.corpus)
    counts = report["counts"]
    differentiated = sum(1 for v in report["contextual_differentiation"].values() if v)
    human = [
        f"snapshot_at {report['snapshot_at']}",
        f"documents {counts['documents_total']} (trees {counts['pageindex_trees']})",
        f"packs {counts['packs_total']} (accepted {counts['packs_accepted']}, rejected {counts['packs_rejected']})",
        f"links {counts['links_total']}",
        f"graphs {counts['graphs_materialized']} across {counts['view_kinds_materialized']} views",
        f"provenance_completeness {report['provenance_completeness']}",
        f"interpretive_traceability {report['interpretive_traceability']}",
        f"curatorial_coverage {report['curatorial_coverage']}",
        f"contextual_differentiation {differentiated}/6 view pairs differ",
        f"accountability {report['accountability']}",
    ]
    if report["flag"]:
        human.append(f"flag {report['flag']}")
    state.emit(report, human)


@main.group()
def fixture():
    """Load reference corpora."""


@fixture.command("load-dipyrone")
@pass_state
@guarded
def fixture_load_dipyrone(state):
    """Load the golden dipyrone corpus into the data directory."""
    from plp.fixtures import load_dipyrone

    report = load_dipyrone(state.corpus)
    state.emit(
        report,
        [
            f"documents {report['documents']}",
            f"pageindex_trees {report['pageindex_trees']}",
            f"packs {report['packs_total']} (accepted {report['packs_accepted']}, rejected {report['packs_rejected']})",
            f"links {report['links_total']}",
            f"graphs {report['graphs_materialized']}",
        ],
    )


@main.command()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--host", default=None, help="Override listen host.")
@click.option("--port", default=None, type=int, help="Override listen port.")
@pass_state
@guarded
def serve(state, config_file, host, port):
    """Run the HTTP service over this data directory."""
    from plp.service import ServiceConfig, serve as run_service

    config = ServiceConfig.load(
        config_file,
        overrides={
            "data_dir": str(state.data_dir),
            "listen_addr": f"{host}:{port}" if host and port else None,
        },
    )
    run_service(config)


if __name__ == "__main__":
    main()
