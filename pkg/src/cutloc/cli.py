"""Command line front door: build graphs, run localizations, make mutants.

Exit codes are a stable contract: 0 success, 1 domain error (validation,
bad anomaly, unconfirmed anomaly), 2 I/O or parse error.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager

import click

from .cuts import cut_edges, root_cut, state_of
from .errors import CutlocError, InitialAnomalyError, ParseError
from .graph import ExecutionGraph, topo_levels
from .graphio import load_graph, save_graph
from .localizer import (
    EdgeAnomaly,
    FaultyVertices,
    LocalizerConfig,
    MissingCriticalSections,
    MissingOperation,
    init_bounds,
    localize,
    parse_anomaly_spec,
    query_bound,
    transcript_to_jsonl,
)
from .oracles import EdgeVerdict, Oracle, assertion_oracle, differential_oracle
from .predicates import parse_predicates
from .trace import build_graph, load_trace, mutate_trace, save_trace


@contextmanager
def _exit_codes():
    try:
        yield
    except (ParseError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except CutlocError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Localize bugs by binary search over cut-sets of an execution graph."""


@main.command("build")
@click.argument("trace_path", type=click.Path())
@click.option("--out", required=True, type=click.Path(), help="Graph file to write.")
@click.option("--allow-undef", is_flag=True, help="Route reads of unassigned variables from the start vertex.")
def cmd_build(trace_path, out, allow_undef):
    """Build an execution graph from a trace file."""
    with _exit_codes():
        events = load_trace(trace_path)
        g = build_graph(events, allow_undef=allow_undef)
        save_graph(g, out)
        click.echo(f"wrote {out}: {len(g.vertex_ids)} vertices, {len(g.edges)} edges")


@main.command("inspect")
@click.argument("graph_path", type=click.Path())
def cmd_inspect(graph_path):
    """Print a graph's shape: counts, levels, root cut."""
    with _exit_codes():
        g = load_graph(graph_path)
        rc = root_cut(g)
        n_root_edges = len(cut_edges(g, rc))
        click.echo(
            f"{len(g.vertex_ids)} vertices, {len(g.edges)} edges,"
            f" root cut: {n_root_edges} edge{'s' if n_root_edges != 1 else ''}"
        )
        levels = topo_levels(g)
        by_level: dict[int, list[int]] = {}
        for v, lvl in levels.items():
            by_level.setdefault(lvl, []).append(v)
        for lvl in sorted(by_level):
            ids = ", ".join(f"v{v}" for v in sorted(by_level[lvl]))
            click.echo(f"level {lvl}: {ids}")
        if not g.deterministic:
            click.echo("warning: graph is not marked deterministic", err=True)


@main.command("mutate")
@click.argument("trace_path", type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(), help="Mutant trace file to write.")
def cmd_mutate(trace_path, seed, out):
    """Plant a single wrong assignment value into a trace."""
    with _exit_codes():
        events = load_trace(trace_path)
        mutated, seq = mutate_trace(events, seed)
        save_trace(mutated, out)
        click.echo(f"mutated seq={seq}")


def _make_oracle(spec: str) -> tuple[Oracle, LocalizerConfig]:
    scheme, _, rest = spec.partition(":")
    if scheme == "assert":
        with open(rest, "r", encoding="utf-8") as fh:
            predicates = parse_predicates(fh.read())
        return assertion_oracle(predicates), LocalizerConfig(predicates=tuple(predicates))
    if scheme == "diff":
        return differential_oracle(load_graph(rest)), LocalizerConfig()
    raise CutlocError(f"unknown oracle spec {spec!r} (expected assert:FILE, diff:GRAPH or interactive)")


@main.command("localize")
@click.argument("graph_path", type=click.Path())
@click.option("--oracle", "oracle_spec", required=True,
              help="assert:PREDFILE | diff:GOLDEN_GRAPH | interactive")
@click.option("--anomaly", "anomaly_spec", required=True,
              help="edge:SRC,DST,KIND[,VAR] | global:DOWNSET:PREDIDS")
@click.option("--out", type=click.Path(), help="Transcript JSONL to write.")
@click.option("--predicates", "pred_path", type=click.Path(),
              help="Predicate file for interactive sessions (terminal minimization).")
@click.option("--port", default=8000, show_default=True, type=int,
              help="Port for the interactive session service.")
def cmd_localize(graph_path, oracle_spec, anomaly_spec, out, pred_path, port):
    """Run a localization and report the culprit."""
    with _exit_codes():
        g = load_graph(graph_path)
        if not g.deterministic:
            click.echo(
                "warning: graph is not marked deterministic;"
                " cuts may not be reproducible or stoppable",
                err=True,
            )
        anomaly = parse_anomaly_spec(g, anomaly_spec)

        if oracle_spec == "interactive":
            _serve_interactive(g, anomaly_spec, pred_path, port)
            return

        oracle, config = _make_oracle(oracle_spec)

        # One examination of the upper bound confirms the complaint before
        # the search starts. It is a guard only: the run itself proceeds
        # exactly as an interactive session would, so transcripts agree.
        _, c_e = init_bounds(g, anomaly)
        confirmation = oracle.examine(c_e, state_of(g, c_e))
        confirmed = (
            confirmation.per_edge.get(anomaly.edge_key, EdgeVerdict.OK) is not EdgeVerdict.OK
            if isinstance(anomaly, EdgeAnomaly)
            else confirmation.has_anomaly
        )
        if not confirmed:
            raise InitialAnomalyError("initial anomaly not confirmed")

        outcome = localize(g, anomaly, oracle, config)
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(transcript_to_jsonl(outcome))
        _print_result(g, outcome, calls=outcome.oracle_calls + 1)


def _print_result(g: ExecutionGraph, outcome, calls: int) -> None:
    result = outcome.result
    if isinstance(result, MissingOperation):
        click.echo(f"MissingOperation: at cut {sorted(result.at.downset)}")
        click.echo("  some indispensable operation never ran after this point")
    elif isinstance(result, FaultyVertices):
        click.echo(f"FaultyVertices: {sorted(result.vertices)}")
        for v in sorted(result.vertices):
            click.echo(f"  v{v}: {g.description(v)}")
        click.echo(f"  evidence: {', '.join(k.to_string() for k in result.evidence)}")
    elif isinstance(result, MissingCriticalSections):
        click.echo(f"MissingCriticalSections: {sorted(result.vertices)}")
        for atom in sorted(result.atoms, key=lambda a: a.edge_key):
            label = atom.label
            shown = (
                f"{label.var} = {json.dumps(label.value)}"
                if label.var
                else json.dumps(label.value)
            )
            click.echo(f"  atom {shown} (edge {atom.edge_key.to_string()})")
        for v in sorted(result.vertices):
            click.echo(f"  v{v}: {g.description(v)}")
    click.echo(f"oracle calls: {calls} (bound {query_bound(outcome.initial_between) + 1})")


def _serve_interactive(g, anomaly_spec: str, pred_path, port: int) -> None:
    import uvicorn

    from .graphio import dumps_graph
    from .service import create_app

    predicates_text = None
    if pred_path:
        with open(pred_path, "r", encoding="utf-8") as fh:
            predicates_text = fh.read()
    app = create_app()
    record = app.state.store.create(
        dumps_graph(g), anomaly_spec, predicates_text=predicates_text
    )
    click.echo(f"session {record.id} awaiting verdicts")
    click.echo(f"open http://127.0.0.1:{port}/?session={record.id}")
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="Directory of built web UI assets (default: ./frontend/dist if present).")
def cmd_serve(port, host, static_dir):
    """Serve the interactive localization service and web UI."""
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
