"""``logitlab`` command line: generation, exact analysis, bounds, simulation
and beta sweeps.

Exit status is 0 on success, 1 for usage or input errors and 2 when a state
budget or a family hypothesis is violated.  Data goes to standard output or
the ``--out`` file; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, exact
from .bounds import BoundsReport, bottleneck_ratio, best_bottleneck, compute_exact, theory_report
from .coupling import DEFAULT_HORIZON, coupling_time, estimate_hitting, coupling_tv_bound
from .errors import BudgetError, HypothesisError, LogitLabError, TruncationError
from .game import SocialGraph, dense_budget, index_profile, is_potential_game, potential_of, profile_index
from .gameio import load_game, parse_game, serialize_game
from .generators import (
    PRNG_ID,
    gen_dominant,
    gen_graphical_coordination,
    gen_lbpot,
    gen_random_potential,
)
from .kernel import LogitChain, transition_matrix
from .metrics import cutwidth, cutwidth_of_ordering, potential_stats, zeta


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# output helpers


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _envelope(args, result) -> dict:
    return {"version": __version__, "prng": PRNG_ID, "config": _config(args), "result": result}


def _json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=1, allow_nan=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None, out) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def _read_game(path: str):
    if path == "-":
        return parse_game(sys.stdin.read())
    return load_game(path)


def _profile(text: str, radices) -> tuple[int, ...]:
    try:
        x = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad profile {text!r}: {exc}") from exc
    profile_index(x, radices)
    return x


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc
    return vals


def _check_beta(beta: float) -> None:
    if not (beta >= 0.0 and math.isfinite(beta)):
        raise UsageError(f"beta must be finite and >= 0, got {beta}")


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise UsageError(f"eps must lie in (0, 1), got {eps}")


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args, out) -> None:
    fam = args.family
    if fam in ("ring", "clique", "path"):
        if args.n is None:
            raise UsageError(f"{fam} needs --n")
        graph = getattr(SocialGraph, fam)(args.n)
        d0 = args.delta0 if args.delta0 is not None else args.delta
        d1 = args.delta1 if args.delta1 is not None else args.delta
        game = gen_graphical_coordination(graph, d0, d1, 0.0, 0.0)
    elif fam == "coordination":
        if args.n is None or args.edges is None:
            raise UsageError("coordination needs --n and --edges")
        pairs = []
        for item in args.edges.split(","):
            try:
                u, v = item.split("-")
                pairs.append((int(u), int(v)))
            except ValueError as exc:
                raise UsageError(f"bad edge {item!r}, expected u-v") from exc
        game = gen_graphical_coordination(SocialGraph.from_edges(args.n, pairs), args.a, args.b, args.c, args.d)
    elif fam == "lbpot":
        if None in (args.n, args.g, args.l):
            raise UsageError("lbpot needs --n, --g and --l")
        game = gen_lbpot(args.n, args.g, args.l)
    elif fam == "dominant":
        if None in (args.n, args.m):
            raise UsageError("dominant needs --n and --m")
        game = gen_dominant(args.n, args.m)
    else:
        if None in (args.n, args.m):
            raise UsageError("random needs --n and --m")
        game = gen_random_potential(args.n, args.m, args.seed, args.range)
    _emit(serialize_game(game), args.out, out)


def cmd_analyze(args, out) -> None:
    game = _read_game(args.game)
    P = transition_matrix(LogitChain(game, args.beta))
    pi = exact.stationary(P)
    viol, _ = exact.reversibility_check(P, pi)
    res = {"states": game.size, "stationary": pi, "reversibility_violation": viol, "reversible": viol <= exact.REVERSIBILITY_TOL}
    if is_potential_game(game):
        res["gibbs_tv"] = exact.tv_distance(exact.gibbs(potential_of(game), args.beta), pi)
    if res["reversible"]:
        spec = exact.spectrum(P, pi)
        res.update(eigenvalues=spec.eigenvalues, lambda_star=spec.lambda_star, t_rel=spec.t_rel)
    _emit(_json_text(_envelope(args, res)), args.out, out)


def cmd_mix(args, out) -> None:
    game = _read_game(args.game)
    P = transition_matrix(LogitChain(game, args.beta))
    pi = exact.stationary(P)
    mix = exact.exact_mixing_time(P, pi, args.eps, args.cap)
    res = {"t_mix": mix.t_mix, "eps": args.eps, "times": mix.times, "d": mix.distances}
    _emit(_json_text(_envelope(args, res)), args.out, out)


def cmd_zeta(args, out) -> None:
    game = _read_game(args.game)
    phi = potential_of(game)
    hill = zeta(phi, game.radices)
    stats = potential_stats(phi, game.radices)
    res = {
        "zeta": hill.zeta,
        "x": index_profile(hill.x, game.radices),
        "y": index_profile(hill.y, game.radices),
        "peak": index_profile(hill.peak, game.radices),
        "delta_global": stats.delta_global,
        "delta_local": stats.delta_local,
    }
    _emit(_json_text(_envelope(args, res)), args.out, out)


def cmd_cutwidth(args, out) -> None:
    if args.game:
        game = _read_game(args.game)
        if game.graph is None:
            raise UsageError("game has no social graph")
        graph = game.graph
    elif args.n is not None and args.edges is not None:
        pairs = [tuple(int(v) for v in e.split("-")) for e in args.edges.split(",") if e]
        graph = SocialGraph.from_edges(args.n, pairs)
    else:
        raise UsageError("cutwidth needs --game or --n with --edges")
    rep = cutwidth(graph)
    res = {"cutwidth": rep.cutwidth, "ordering": rep.ordering, "cuts": rep.cuts}
    if args.ordering:
        order = [int(v) for v in args.ordering.split(",")]
        cuts, width = cutwidth_of_ordering(graph, order)
        res["given_ordering"] = {"ordering": order, "cuts": cuts, "width": width}
    _emit(_json_text(_envelope(args, res)), args.out, out)


def cmd_bottleneck(args, out) -> None:
    game = _read_game(args.game)
    P = transition_matrix(LogitChain(game, args.beta))
    pi = exact.stationary(P)
    if args.set:
        idx = []
        for item in args.set.split(";"):
            idx.append(profile_index(_profile(item, game.radices), game.radices))
        b = bottleneck_ratio(P, pi, np.array(idx), args.eps, "given")
    else:
        b = best_bottleneck(game, P, pi, args.eps)
        if b is None:
            raise HypothesisError("no candidate set has pi(R) <= 1/2")
    res = {"set": b.label, "ratio": b.ratio, "pi_set": b.pi_set, "lower_bound": b.lower_bound}
    _emit(_json_text(_envelope(args, res)), args.out, out)


BOUND_COLUMNS = ["id", "kind", "target", "applicable", "value", "exact", "satisfied", "formula", "reason"]


def build_report(game, beta: float, eps: float, with_exact: bool = True) -> BoundsReport:
    eq = compute_exact(game, beta, eps) if with_exact and game.size <= dense_budget() else None
    return theory_report(game, beta, eps, exact_q=eq)


def cmd_bounds(args, out) -> None:
    game = _read_game(args.game)
    rep = build_report(game, args.beta, args.eps, not args.no_exact)
    if args.format == "csv":
        rows = [[getattr(e, c) for c in BOUND_COLUMNS] for e in rep.entries]
        text = _csv_text(BOUND_COLUMNS, rows)
    else:
        text = _json_text(_envelope(args, rep.to_dict()))
    _emit(text, args.out, out)


def cmd_simulate(args, out) -> None:
    game = _read_game(args.game)
    chain = LogitChain(game, args.beta)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.mode == "coupling":
        if not (args.x and args.y):
            raise UsageError("coupling mode needs --x and --y")
        x, y = _profile(args.x, game.radices), _profile(args.y, game.radices)
        runs = [coupling_time(chain, x, y, args.horizon, args.seed, (0, k)) for k in range(args.trials)]
        rows = [[k, r.tau, int(r.censored), f"{args.seed}:0:{k}"] for k, r in enumerate(runs)]
        done = [r.tau for r in runs if not r.censored]
        res = {
            "mode": "coupling",
            "trials": args.trials,
            "censored": args.trials - len(done),
            "mean": float(np.mean(done)) if done else None,
            "median": float(np.median(done)) if done else None,
        }
        if args.t is not None:
            tv = coupling_tv_bound(chain, args.t, args.trials, args.seed, [(x, y)])
            res["tv_estimate"] = {"t": args.t, "estimate": tv.estimate, "half_width": tv.half_width}
    else:
        start = _profile(args.start, game.radices) if args.start else (0,) * game.n
        if args.target:
            target = [_profile(item, game.radices) for item in args.target.split(";")]
        else:
            top = min(game.radices)
            target = [(a,) * game.n for a in range(top)]
        summ = estimate_hitting(chain, start, target, args.trials, args.horizon, args.seed)
        rows = [[k, t, int(t is None), f"{args.seed}:0:{k}"] for k, t in enumerate(summ.times)]
        res = {
            "mode": "hitting",
            "trials": summ.trials,
            "censored": summ.censored,
            "mean": summ.mean,
            "median": summ.median,
        }
    if args.csv:
        _emit(_csv_text(["trial", "tau", "censored", "stream"], rows), args.csv, out)
    _emit(_json_text(_envelope(args, res)), args.out, out)


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list]
    slope: float | None
    intercept: float | None


def sweep(game, betas, eps: float = exact.DEFAULT_EPS) -> SweepResult:
    """Exact ``t_mix``, ``t_rel`` and every bound value for each beta, plus the
    least-squares slope of ``ln t_mix`` against beta."""
    if not betas:
        raise UsageError("empty beta list")
    header, rows = None, []
    for beta in betas:
        rep = build_report(game, beta, eps)
        ids = [e.id for e in rep.entries]
        if header is None:
            header = ["beta", "t_mix", "t_rel"] + ids
        eq_t = next((e.exact for e in rep.entries if e.target == "t_mix" and e.exact is not None), None)
        eq_r = next((e.exact for e in rep.entries if e.target == "t_rel" and e.exact is not None), None)
        rows.append([float(beta), eq_t, eq_r] + [e.value if e.applicable else None for e in rep.entries])
    slope = intercept = None
    pts = [(r[0], math.log(r[1])) for r in rows if r[1]]
    if len(pts) >= 2 and len({p[0] for p in pts}) >= 2:
        slope, intercept = (float(v) for v in np.polyfit([p[0] for p in pts], [p[1] for p in pts], 1))
    return SweepResult(header, rows, slope, intercept)


def cmd_sweep(args, out) -> None:
    game = _read_game(args.game)
    betas = _floats(args.betas)
    if not betas:
        raise UsageError("empty beta list")
    for b in betas:
        _check_beta(b)
    res = sweep(game, betas, args.eps)
    _emit(_csv_text(res.header, res.rows), args.out, out)
    if args.summary:
        _emit(_json_text(_envelope(args, {"slope": res.slope, "intercept": res.intercept, "betas": betas})), args.summary, out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    p = _Parser(prog="logitlab", description="Exact and simulated analysis of logit dynamics.")
    p.add_argument("--version", action="version", version=f"logitlab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def game_cmd(name, func, help, beta=True, eps=False):
        s = sub.add_parser(name, help=help)
        s.add_argument("--game", required=True, help="path to a .game.json file, or - for stdin")
        if beta:
            s.add_argument("--beta", type=float, required=True)
        if eps:
            s.add_argument("--eps", type=float, default=exact.DEFAULT_EPS)
        s.add_argument("--out", help="output file (default: stdout)")
        s.set_defaults(func=func)
        return s

    g = sub.add_parser("generate", help="write a generated game")
    g.add_argument("family", choices=["ring", "clique", "path", "coordination", "lbpot", "dominant", "random"])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--delta", type=float, default=1.0)
    g.add_argument("--delta0", type=float)
    g.add_argument("--delta1", type=float)
    g.add_argument("--edges", help="comma separated u-v pairs")
    for k in "abcd":
        g.add_argument(f"--{k}", type=float, default=1.0 if k in "ab" else 0.0)
    g.add_argument("--g", type=float)
    g.add_argument("--l", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--range", type=float, default=1.0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    game_cmd("analyze", cmd_analyze, "stationary law, reversibility and spectrum")
    m = game_cmd("mix", cmd_mix, "exact mixing time and distance curve", eps=True)
    m.add_argument("--cap", type=int, default=exact.DEFAULT_CAP)
    game_cmd("zeta", cmd_zeta, "hill metric and potential variation", beta=False)
    c = sub.add_parser("cutwidth", help="exact cutwidth of a social graph")
    c.add_argument("--game")
    c.add_argument("--n", type=int)
    c.add_argument("--edges")
    c.add_argument("--ordering", help="also evaluate this comma separated ordering")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cutwidth)
    b = game_cmd("bottleneck", cmd_bottleneck, "bottleneck ratio lower bound", eps=True)
    b.add_argument("--set", help="profiles separated by ';', each comma separated")
    bd = game_cmd("bounds", cmd_bounds, "evaluate every bound, with exact cross-check", eps=True)
    bd.add_argument("--format", choices=["json", "csv"], default="json")
    bd.add_argument("--no-exact", action="store_true")
    s = game_cmd("simulate", cmd_simulate, "coupling or hitting-time simulation")
    s.add_argument("--mode", choices=["coupling", "hitting"], default="coupling")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--t", type=int, help="also estimate the coupling TV bound at this time")
    s.add_argument("--start")
    s.add_argument("--target", help="profiles separated by ';' (default: unanimity profiles)")
    s.add_argument("--csv", help="per-trial CSV file")
    w = sub.add_parser("sweep", help="exact quantities and bounds over a beta list")
    w.add_argument("--game", required=True)
    w.add_argument("--betas", required=True, help="comma separated")
    w.add_argument("--eps", type=float, default=exact.DEFAULT_EPS)
    w.add_argument("--out")
    w.add_argument("--summary", help="JSON file for the log-slope fit")
    w.set_defaults(func=cmd_sweep)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError(parser.format_help())
        if getattr(args, "beta", None) is not None:
            _check_beta(args.beta)
        if getattr(args, "eps", None) is not None:
            _check_eps(args.eps)
        args.func(args, out)
        return 0
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except (BudgetError, HypothesisError, TruncationError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (LogitLabError, OSError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main(argv=None) -> int:
    code = run(argv)
    sys.exit(code)


if __name__ == "__main__":
    main()
