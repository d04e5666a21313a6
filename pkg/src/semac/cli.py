"""Command-line interface.

Offline steps (index building, log synthesis, freshness normalization,
evaluation, benchmarking) and online serving live behind one entry point::

    semac complete "bullet bonds mat" --domain bonds
    semac synth --domain bonds -n 500 -o synthetic.tsv
    semac serve --domain bonds --port 8000
"""

from __future__ import annotations

import datetime as dt
import json
import random
import sys

import click

from . import __version__
from .atomic import build_atom_model
from .completability import analyze
from .coordinator import CoordinatorConfig
from .domains import load_bundle
from .evaluation import evaluate, measure_latency, query_prefixes
from .grammar import parse as parse_query
from .mpc import MpcIndex
from .querylog import load_log, save_log, synthesize_log, time_shift_log
from .snapshots import load_snapshot, save_snapshot

_domain_option = click.option(
    "--domain", "-d", default="bonds", show_default=True,
    help="Built-in domain name or path to a domain.json.",
)
_json_option = click.option("--json", "as_json", is_flag=True, help="Emit JSON.")


def _load(domain: str, *, build_indexes: bool = True, now=None):
    return load_bundle(domain, build_indexes=build_indexes, now=now)


@click.group()
@click.version_option(__version__)
def main():
    """Semantic auto-completion for natural-language query interfaces."""


@main.command()
@click.argument("prefix")
@_domain_option
@click.option("-k", default=10, show_default=True, help="Completions to return.")
@click.option("--mpc-snapshot", type=click.Path(exists=True), default=None)
@click.option("--atom-snapshot", type=click.Path(exists=True), default=None)
@_json_option
def complete(prefix, domain, k, mpc_snapshot, atom_snapshot, as_json):
    """Complete an unfinished query."""
    bundle = _load(domain, build_indexes=not (mpc_snapshot and atom_snapshot))
    if mpc_snapshot:
        bundle.mpc = load_snapshot(mpc_snapshot, "mpc-index")
    if atom_snapshot:
        bundle.atom_model = load_snapshot(atom_snapshot, "atom-model")
    coord = bundle.coordinator(CoordinatorConfig(k=k, budget_ms=None))
    results = coord.complete(prefix, k)
    if as_json:
        click.echo(json.dumps([
            {
                "completion": c.completion,
                "interpretation": c.interpretation.serialize(),
                "dtype": c.dtype,
                "grade": c.grade.name,
                "score": c.score,
                "source": c.source,
            }
            for c in results
        ], indent=2))
        return
    if not results:
        click.echo("(no completions)")
        return
    for c in results:
        click.echo(f"{c.completion}\t[{c.grade.name}/{c.source}/{c.dtype}]\t{c.interpretation.serialize()}")


@main.command()
@click.argument("query")
@_domain_option
@_json_option
def parse(query, domain, as_json):
    """Parse a complete query into its logical interpretation."""
    bundle = _load(domain, build_indexes=False)
    results = parse_query(bundle.grammar, bundle.store, query)
    if as_json:
        click.echo(json.dumps([r.formula.serialize() for r in results], indent=2))
        return
    if not results:
        click.echo("(no parse)")
        sys.exit(1)
    for r in results:
        click.echo(r.formula.serialize())


@main.command()
@click.argument("prefix")
@_domain_option
@_json_option
def completability(prefix, domain, as_json):
    """Check whether a prefix can still become an interpretable query."""
    bundle = _load(domain, build_indexes=False)
    res = analyze(bundle.grammar, bundle.store, prefix)
    if as_json:
        click.echo(json.dumps({"completable": res.completable, "dead_at": res.dead_at}))
    else:
        click.echo("completable" if res.completable else f"dead at character {res.dead_at}")
    if not res.completable:
        sys.exit(1)


@main.command("build-index")
@_domain_option
@click.option("--log", "log_path", type=click.Path(exists=True), default=None,
              help="Query log; defaults to the domain's bundled log.")
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("-k", default=50, show_default=True, help="Stored top-k per prefix.")
def build_index(domain, log_path, out, k):
    """Build the query-log completion index and save a snapshot."""
    bundle = _load(domain, build_indexes=False)
    entries = load_log(log_path) if log_path else bundle.log
    index, report = MpcIndex.build(bundle.grammar, bundle.store, entries, k=k)
    save_snapshot(out, "mpc-index", index)
    click.echo(f"indexed {report.indexed} queries ({len(report.dropped)} unparsable) -> {out}")


@main.command("build-atom-model")
@_domain_option
@click.option("--log", "log_path", type=click.Path(exists=True), default=None)
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--max-records", default=100_000, show_default=True)
def build_atom_model_cmd(domain, log_path, out, max_records):
    """Harvest the atom model from a query log and save a snapshot."""
    bundle = _load(domain, build_indexes=False)
    entries = load_log(log_path) if log_path else bundle.log
    model, report = build_atom_model(
        bundle.grammar, bundle.store, entries, max_records=max_records
    )
    save_snapshot(out, "atom-model", model)
    click.echo(
        f"{len(model)} atoms from {report.parsed} queries "
        f"({len(report.dropped)} unparsable, {report.truncated} truncated) -> {out}"
    )


@main.command()
@_domain_option
@click.option("-n", default=500, show_default=True, help="Queries to generate.")
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--out", required=True, type=click.Path())
def synth(domain, n, seed, out):
    """Synthesize a parsable query log from the domain grammar."""
    bundle = _load(domain, build_indexes=False)
    entries = synthesize_log(bundle.grammar, bundle.store, n, seed=seed)
    save_log(entries, out)
    click.echo(f"wrote {len(entries)} queries -> {out}")


@main.command()
@_domain_option
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--now", "now_str", default=None, help="Reference date (YYYY-MM-DD); default today.")
def timeshift(domain, log_path, out, now_str):
    """Normalize the freshness of explicit dates in a query log."""
    bundle = _load(domain, build_indexes=False)
    now = dt.date.fromisoformat(now_str) if now_str else dt.date.today()
    shifted = time_shift_log(bundle.grammar, bundle.store, load_log(log_path), now)
    save_log([s.entry for s in shifted], out)
    changed = sum(1 for s in shifted if s.changed)
    clamped = sum(1 for s in shifted if s.clamped)
    click.echo(f"wrote {len(shifted)} entries ({changed} rewritten, {clamped} clamped) -> {out}")


@main.command("eval")
@_domain_option
@click.option("--train", "train_path", required=True, type=click.Path(exists=True),
              help="Query log the engines are built from.")
@click.option("--test", "test_path", required=True, type=click.Path(exists=True),
              help="Withheld queries replayed keystroke by keystroke.")
@click.option("--mode", type=click.Choice(["prefix", "query"]), default="prefix", show_default=True)
@click.option("--min-prefix", default=3, show_default=True)
@click.option("-k", default=10, show_default=True)
def eval_cmd(domain, train_path, test_path, mode, min_prefix, k):
    """Evaluate completion quality (MRR under all match predicates)."""
    bundle = _load(domain, build_indexes=False)
    train = load_log(train_path)
    bundle.mpc, _ = MpcIndex.build(bundle.grammar, bundle.store, train)
    bundle.atom_model, _ = build_atom_model(bundle.grammar, bundle.store, train)
    coord = bundle.coordinator(CoordinatorConfig(k=k, budget_ms=None))
    test = [e.text for e in load_log(test_path)]
    report = evaluate(
        lambda p: coord.complete(p),
        bundle.grammar,
        bundle.store,
        test,
        min_prefix=min_prefix,
        mode=mode,
    )
    click.echo(report.to_json())


@main.command()
@_domain_option
@click.option("-n", default=200, show_default=True, help="Random prefixes to time.")
@click.option("--seed", default=0, show_default=True)
@click.option("--budget-ms", default=50.0, show_default=True)
def bench(domain, n, seed, budget_ms):
    """Measure end-to-end completion latency on random log prefixes."""
    bundle = _load(domain)
    coord = bundle.coordinator(CoordinatorConfig(budget_ms=budget_ms))
    rng = random.Random(seed)
    pool = [p for e in bundle.log for p in query_prefixes(e.text)]
    if not pool:
        raise click.ClickException("domain log has no usable prefixes")
    prefixes = [rng.choice(pool) for _ in range(n)]
    coord.complete(prefixes[0])  # warm up
    click.echo(measure_latency(lambda p: coord.complete(p), prefixes).to_json())


@main.command()
@_domain_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--budget-ms", default=50.0, show_default=True)
def serve(domain, host, port, budget_ms):
    """Run the HTTP completion service."""
    import uvicorn

    from .service import create_app

    app = create_app(domain=domain, config=CoordinatorConfig(budget_ms=budget_ms))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
