"""Command line front end: single games, sweeps, exact solves, verification.

Exit codes: 0 success, 2 bad parameters or budget, 3 a strategy forfeited
during play, 4 exhaustive verification refuted the strategy.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import solver, transcripts
from .board import Board
from .engine import (BudgetExceededError, GameState, ParameterError,
                     run_game)
from .families import family_potential_phi, family_potential_psi
from .strategies import CLIENT_NAMES, WAITER_NAMES, make_client, make_waiter
from .sweep import DEFAULT_METRICS, METRICS, ExperimentSpec, run_sweep
from .transcripts import canonical_json

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_FORFEIT = 3
EXIT_REFUTED = 4


def _int_list(text: str) -> list[int]:
    """Comma list ("3,5,9") or range ("10:30:5", stop inclusive)."""
    out: list[int] = []
    for part in text.split(","):
        if ":" in part:
            pieces = [int(x) for x in part.split(":")]
            if len(pieces) not in (2, 3):
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            start, stop = pieces[0], pieces[1]
            step = pieces[2] if len(pieces) == 3 else 1
            out.extend(range(start, stop + 1, step))
        elif part:
            out.append(int(part))
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="waiterclient")
    sub = p.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run one game and print its transcript")
    play.add_argument("--n", type=int, required=True)
    play.add_argument("--q", type=int, required=True)
    play.add_argument("--waiter", default="lex", choices=WAITER_NAMES)
    play.add_argument("--client", default="lex", choices=CLIENT_NAMES)
    play.add_argument("--eta", type=int)
    play.add_argument("--d", type=int)
    play.add_argument("--k", type=int)
    play.add_argument("--m", type=int)
    play.add_argument("--r", type=int)
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--format", choices=("text", "structured"),
                      default="text")
    play.add_argument("--out")

    sweep = sub.add_parser("sweep", help="grid of games with metrics")
    sweep.add_argument("--n", type=_int_list, required=True,
                       help="sizes: comma list or start:stop[:step]")
    sweep.add_argument("--q", type=_int_list, required=True)
    sweep.add_argument("--waiter", default="lex", choices=WAITER_NAMES)
    sweep.add_argument("--client", default="lex", choices=CLIENT_NAMES)
    sweep.add_argument("--trials", type=int, default=1)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--metrics", default=",".join(DEFAULT_METRICS),
                       help=f"comma list from {sorted(METRICS)}")
    sweep.add_argument("--eta", type=int)
    sweep.add_argument("--d", type=int)
    sweep.add_argument("--k", type=int)
    sweep.add_argument("--m", type=int)
    sweep.add_argument("--r", type=int)
    sweep.add_argument("--format", choices=("text", "structured"),
                       default="text")
    sweep.add_argument("--out")

    solve = sub.add_parser("solve", help="exact minimax value at toy scale")
    solve.add_argument("--n", type=int, required=True)
    solve.add_argument("--q", type=int, required=True)
    solve.add_argument("--objective", default="component",
                       choices=sorted(solver.OBJECTIVES))
    solve.add_argument("--budget", type=int,
                       default=solver.MAX_SOLVE_ELEMENTS,
                       help="maximum board elements")
    solve.add_argument("--format", choices=("text", "structured"),
                       default="text")
    solve.add_argument("--out")

    verify = sub.add_parser(
        "verify", help="play a waiter strategy against every client")
    verify.add_argument("--waiter", required=True, choices=WAITER_NAMES)
    verify.add_argument("--n", type=int, required=True)
    verify.add_argument("--q", type=int, required=True)
    verify.add_argument("--objective", default="connectivity",
                        choices=sorted(solver.OBJECTIVES))
    verify.add_argument("--target", type=int,
                        help="require objective >= target instead of truth")
    verify.add_argument("--eta", type=int)
    verify.add_argument("--d", type=int)
    verify.add_argument("--k", type=int)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--budget", type=int,
                        default=solver.MAX_VERIFY_LEAVES,
                        help="maximum response sequences")
    verify.add_argument("--out")

    fam = sub.add_parser("families", help="inspect an avoidance set family")
    fam.add_argument("--family", required=True,
                     choices=("cycles", "path_tuples"))
    fam.add_argument("--n", type=int, required=True)
    fam.add_argument("--q", type=int, required=True)
    fam.add_argument("--m", type=int, default=3,
                     help="shortest forbidden cycle length")
    fam.add_argument("--r", type=int, default=1, help="path tuple length")
    fam.add_argument("--format", choices=("text", "structured"),
                     default="text")
    fam.add_argument("--out")

    serve = sub.add_parser("serve", help="run the interactive session API")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--persist", help="directory for per-session event logs")
    return p


def _strategy_kwargs(args, names=("eta", "d", "k")) -> dict:
    out = {}
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    return out


def cmd_play(args) -> int:
    waiter = make_waiter(args.waiter, n=args.n, q=args.q, seed=args.seed,
                         **_strategy_kwargs(args))
    client = make_client(args.client, n=args.n, q=args.q, seed=args.seed,
                         **_strategy_kwargs(args, ("m", "r")))
    state = GameState(Board.complete_graph(args.n), args.q)
    run = run_game(state, waiter, client)
    tr = transcripts.from_game(run, waiter=waiter, client=client)
    if args.format == "structured":
        _emit(tr.dumps(), args.out)
    else:
        lines = [f"status: {run.status}",
                 f"rounds: {run.rounds}",
                 f"client edges: {len(state.client_edges)}"]
        if run.forfeit is not None:
            f = run.forfeit
            lines.append(f"forfeit: {f.side} round {f.round_index} "
                         f"stage {f.stage}: {f.reason}")
        checks = getattr(getattr(waiter, "core", None), "stage_checks", None)
        if checks is not None:
            for stage, ok, detail in checks():
                mark = "ok" if ok else "FAIL"
                lines.append(f"check {stage}: {mark}"
                             + (f" ({detail})" if detail else ""))
        _emit("\n".join(lines), args.out)
    return EXIT_FORFEIT if run.status == "forfeit" else EXIT_OK


def cmd_sweep(args) -> int:
    spec = ExperimentSpec(
        ns=tuple(args.n), qs=tuple(args.q), waiter=args.waiter,
        client=args.client, trials=args.trials, seed=args.seed,
        metrics=tuple(m for m in args.metrics.split(",") if m),
        eta=args.eta, d=args.d, k=args.k, m=args.m, r=args.r,
        out=args.out, fmt=args.format)
    result = run_sweep(spec)
    if args.out is None:
        print(result.rendered(), end="")
    return EXIT_FORFEIT if result.any_forfeit else EXIT_OK


def cmd_solve(args) -> int:
    res = solver.solve_game_exact(args.n, args.q, args.objective,
                                  max_elements=args.budget)
    if args.format == "structured":
        doc = {"n": args.n, "q": args.q, "objective": args.objective,
               "value": res.value, "winner": res.winner,
               "states": res.states, "leaves": res.leaves,
               "variation": res.variation.to_dict()}
        _emit(canonical_json(doc), args.out)
    else:
        lines = [f"value: {res.value}"]
        if res.winner is not None:
            lines.append(f"winner: {res.winner}")
        lines.append(f"states: {res.states}  leaves: {res.leaves}")
        lines.append(f"variation rounds: {len(res.variation.rounds)}")
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    base = solver.OBJECTIVES[args.objective]
    if args.target is None:
        fn = base
    else:
        def fn(state, _base=base, _t=args.target):
            return _base(state) >= _t
    factory = lambda: make_waiter(args.waiter, n=args.n, q=args.q,
                                  seed=args.seed, **_strategy_kwargs(args))
    res = solver.verify_waiter_strategy_exhaustive(
        factory, args.n, args.q, fn, max_leaves=args.budget)
    if res.ok:
        _emit(f"verified over {res.leaves} client response sequences",
              args.out)
        return EXIT_OK
    _emit("refuted; counterexample transcript:\n"
          + res.counterexample.dumps(), args.out)
    return EXIT_REFUTED


def cmd_families(args) -> int:
    # build through the client factories so the numbers describe the family
    # the avoidance strategy would actually play with at this bias
    if args.family == "cycles":
        fam = make_client("avoid_cycles", n=args.n, q=args.q,
                          m=args.m).family
    else:
        fam = make_client("avoid_big_component", n=args.n, q=args.q,
                          r=args.r).family
    phi = family_potential_phi(fam, args.q)
    psi, crit = family_potential_psi(fam, args.q)
    if args.format == "structured":
        doc = {"label": fam.label, "sets": len(fam), "phi": float(phi),
               "psi": psi, "psi_criterion": crit}
        _emit(canonical_json(doc), args.out)
    else:
        _emit("\n".join([
            f"family: {fam.label}",
            f"sets: {len(fam)}",
            f"phi: {float(phi):.6g} (avoidable if < 1)",
            f"psi: {psi:.6g} criterion met: {crit}"]), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(persist_dir=args.persist), host=args.host,
                port=args.port, log_level="info")
    return EXIT_OK


COMMANDS = {
    "play": cmd_play,
    "sweep": cmd_sweep,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "families": cmd_families,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
