"""Batch experiments: grids of games with per-game metrics and summaries.

A sweep runs every (board size, bias, trial) combination of its spec with
one strategy pair, measures the final Client graph, and aggregates per-cell
medians.  Fixed seeds make whole sweeps reproducible byte for byte in the
structured output format.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, asdict
from pathlib import Path

from . import graphs as gr
from .board import Board
from .engine import GameState, ParameterError, run_game
from .strategies import CLIENT_NAMES, WAITER_NAMES, make_client, make_waiter
from .transcripts import canonical_json


def _graph_of(state):
    return gr.SimpleGraph.from_game(state)


def metric_component(state, run) -> int:
    sizes, _ = gr.component_profile(_graph_of(state))
    return sizes[0]


def metric_connectivity(state, run) -> int:
    _, connected = gr.component_profile(_graph_of(state))
    return int(connected)


def metric_min_degree(state, run) -> int:
    return int(state.client_degree.min())


def metric_max_degree(state, run) -> int:
    return int(state.client_degree.max())


def metric_rounds(state, run) -> int:
    return run.rounds


def metric_client_edges(state, run) -> int:
    return len(state.client_edges)


def metric_circumference(state, run) -> int:
    """Longest Client cycle; exact on tiny boards, else a lower bound from
    bounded color-coding search up to length 10."""
    g = _graph_of(state)
    if g.n <= gr.EXACT_DP_BUDGET:
        return gr.cycle_spectrum(g).circumference
    return gr.cycle_spectrum(g, k_max=min(g.n, 10)).circumference


def metric_short_cycles(state, run) -> int:
    """How many of the lengths 3..8 appear as Client cycles."""
    g = _graph_of(state)
    k_max = min(g.n, 8)
    if g.n <= gr.EXACT_DP_BUDGET:
        lengths = gr.cycle_spectrum(g).lengths
        return len([k for k in lengths if k <= k_max])
    return len(gr.cycle_spectrum(g, k_max=k_max).lengths)


METRICS = {
    "component": metric_component,
    "connectivity": metric_connectivity,
    "min_degree": metric_min_degree,
    "max_degree": metric_max_degree,
    "rounds": metric_rounds,
    "client_edges": metric_client_edges,
    "circumference": metric_circumference,
    "short_cycles": metric_short_cycles,
}

DEFAULT_METRICS = ("component", "min_degree", "connectivity", "rounds")


@dataclass
class ExperimentSpec:
    """One sweep: strategy pair, (n, q) grid, trials, metrics, output."""

    ns: tuple
    qs: tuple
    waiter: str = "lex"
    client: str = "lex"
    trials: int = 1
    seed: int = 0
    metrics: tuple = DEFAULT_METRICS
    eta: int | None = None
    d: int | None = None
    k: int | None = None
    m: int | None = None
    r: int | None = None
    out: str | None = None
    fmt: str = "structured"

    def validate(self) -> None:
        if self.waiter not in WAITER_NAMES:
            raise ParameterError(f"unknown waiter strategy {self.waiter!r}")
        if self.client not in CLIENT_NAMES:
            raise ParameterError(f"unknown client strategy {self.client!r}")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise ParameterError(f"unknown metrics {unknown}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.fmt not in ("text", "structured"):
            raise ParameterError(f"format must be text or structured, "
                                 f"got {self.fmt!r}")
        for n in self.ns:
            if n < 2:
                raise ParameterError(f"board size {n} too small")
        for q in self.qs:
            if q < 1:
                raise ParameterError(f"bias {q} must be >= 1")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["ns"] = list(self.ns)
        doc["qs"] = list(self.qs)
        doc["metrics"] = list(self.metrics)
        return doc


@dataclass
class SweepResult:
    spec: ExperimentSpec
    rows: list
    summary: list

    @property
    def any_forfeit(self) -> bool:
        return any(row["status"] == "forfeit" for row in self.rows)

    def to_structured(self) -> str:
        return canonical_json({"spec": self.spec.to_dict(),
                               "rows": self.rows,
                               "summary": self.summary})

    def to_text(self) -> str:
        cols = ["n", "q", "trial", "seed", "status", *self.spec.metrics]
        lines = ["\t".join(cols)]
        for row in self.rows:
            lines.append("\t".join(str(row.get(c, "")) for c in cols))
        lines.append("")
        lines.append("summary (per n,q: median/min/max)")
        for cell in self.summary:
            parts = [f"n={cell['n']} q={cell['q']}"]
            for m in self.spec.metrics:
                s = cell[m]
                parts.append(f"{m}={s['median']}/{s['min']}/{s['max']}")
            lines.append("  ".join(parts))
        return "\n".join(lines) + "\n"

    def rendered(self) -> str:
        return self.to_text() if self.spec.fmt == "text" else self.to_structured()


def _run_one(spec: ExperimentSpec, n: int, q: int, trial: int) -> dict:
    seed = spec.seed + trial
    wkw = {k: v for k, v in
           (("eta", spec.eta), ("d", spec.d), ("k", spec.k)) if v is not None}
    ckw = {k: v for k, v in (("m", spec.m), ("r", spec.r)) if v is not None}
    waiter = make_waiter(spec.waiter, n=n, q=q, seed=seed, **wkw)
    client = make_client(spec.client, n=n, q=q, seed=seed, **ckw)
    state = GameState(Board.complete_graph(n), q, record_history=False)
    run = run_game(state, waiter, client)
    row = {"n": n, "q": q, "trial": trial, "seed": seed, "status": run.status}
    if run.forfeit is not None:
        row["forfeit"] = {"side": run.forfeit.side, "stage": run.forfeit.stage,
                          "reason": run.forfeit.reason}
    for m in spec.metrics:
        row[m] = METRICS[m](state, run)
    return row


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    """All grid cells of the spec, one row per game plus per-cell summary."""
    spec.validate()
    rows = []
    summary = []
    for n in spec.ns:
        for q in spec.qs:
            cell = [_run_one(spec, n, q, t) for t in range(spec.trials)]
            rows.extend(cell)
            agg = {"n": n, "q": q, "trials": spec.trials}
            for m in spec.metrics:
                vals = [row[m] for row in cell]
                agg[m] = {"median": statistics.median(vals),
                          "min": min(vals), "max": max(vals)}
            summary.append(agg)
    result = SweepResult(spec, rows, summary)
    if spec.out is not None:
        Path(spec.out).write_text(result.rendered())
    return result
