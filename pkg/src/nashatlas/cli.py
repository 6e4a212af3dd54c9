"""Command-line front end.

Subcommands: solve (enumerate equilibria of a game file), lambda
(print a player's payoff decomposition), goodcheck (forest condition
of a family spec), sample (random-game statistics), certify
(transversality of a family at a point), charts (the atlas and each
chart's complement).

Reports are human text by default, or machine-readable with --json
(top-level keys meta/results/warnings; exact rationals as "p/q"
strings, infinities as null). Exit codes: 0 success, 1 usage or parse
error, 2 degeneracy witnessed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .atlas import (
    INF,
    ChartExcludesHypersurface,
    all_charts,
    chart_excludes,
    chart_zero_point,
    excluded_hypersurfaces,
    format_chart,
    parse_chart,
    transition,
)
from .equilibrium import CHECK_TOL, EnumerationResult, enumerate_nash
from .forms import lambda_decomposition, payoff_form
from .game import (
    FLOAT,
    RATIONAL,
    FiniteGame,
    GameFormatError,
    make_game,
    parse_game,
    profile_from_weights,
    random_game,
    support_of,
)
from .genericity import (
    RANK_TOL,
    canonical_equilibrium_family,
    good_family,
    is_good,
    transversal_at,
    witness_cycle,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; this tool reserves 2
    for witnessed degeneracy, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".10g")


def _jnum(x):
    """JSON-safe number: Fractions become 'p/q' strings, non-finite
    floats become null."""
    if isinstance(x, Fraction):
        return str(x)
    x = float(x)
    return x if math.isfinite(x) else None


def _fmt_weights(weights) -> str:
    return " | ".join(
        "(" + ", ".join(_fmt(x) for x in w) + ")" for w in weights
    )


def _fmt_support(support) -> str:
    return " | ".join(",".join(map(str, s)) for s in support.supports)


def _load_game(args) -> FiniteGame:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise GameFormatError(f"cannot read {args.file}: {e.strerror}") from e
    exact = getattr(args, "exact", False)
    game = parse_game(text, RATIONAL if exact else FLOAT)
    if exact and game.num_players != 2:
        raise GameFormatError("--exact is only supported for 2-player games")
    return game


def _zero_game(shape_text: str) -> FiniteGame:
    counts = _parse_shape(shape_text)
    return make_game(counts, [np.zeros(counts) for _ in counts])


def _parse_shape(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"bad shape {text!r}: expected like 2x3x2") from None
    if not counts:
        raise ValueError("empty shape")
    for c in counts:
        if c < 2:
            raise ValueError(
                f"bad shape {text!r}: every player needs at least 2 strategies"
            )
    return counts


def _parse_family(game: FiniteGame, t_specs, r_specs):
    m = game.num_players
    T = [[] for _ in range(m)]
    R = [[] for _ in range(m)]

    def player_of(head: str) -> int:
        i = int(head) - 1
        if not 0 <= i < m:
            raise ValueError(f"no player {head}")
        return i

    for spec in t_specs or ():
        head, sep, rest = spec.partition(":")
        if not sep:
            raise ValueError(f"bad --t spec {spec!r}: expected i:j[,j...]")
        i = player_of(head)
        for part in rest.split(","):
            if part:
                T[i].append(INF if part == "inf" else int(part))
    for spec in r_specs or ():
        head, sep, rest = spec.partition(":")
        if not sep:
            raise ValueError(f"bad --r spec {spec!r}: expected i:j-k[,j-k...]")
        i = player_of(head)
        for part in rest.split(","):
            if not part:
                continue
            j, sep2, k = part.partition("-")
            if not sep2:
                raise ValueError(f"bad pair {part!r} in --r spec")
            R[i].append((int(j), int(k)))
    return good_family(game, T, R)


def _parse_point(game: FiniteGame, spec: str):
    blocks = spec.split(";")
    if len(blocks) != game.num_players:
        raise ValueError(
            f"point needs {game.num_players} weight blocks separated by ';'"
        )
    return _point_from_lists(game, [b.split(",") for b in blocks])


def _point_from_lists(game: FiniteGame, blocks):
    rational = any(isinstance(x, str) and "/" in x for b in blocks for x in b)
    weights = []
    for i, b in enumerate(blocks):
        if len(b) != game.strategy_counts[i]:
            raise ValueError(
                f"player {i + 1} needs {game.strategy_counts[i]} weights"
            )
        weights.append([Fraction(str(x)) if rational else float(x) for x in b])
    profile = profile_from_weights(weights, RATIONAL if rational else FLOAT)
    if not profile.in_A(1e-9):
        raise ValueError("point weights must sum to 1 per player")
    return profile


def _solve_payload(game: FiniteGame, result: EnumerationResult) -> dict:
    forms = [payoff_form(game, i) for i in range(game.num_players)]
    items = []
    for cert in result.equilibria:
        w = list(cert.point.weights)
        items.append(
            {
                "point": [[_jnum(x) for x in block] for block in w],
                "support": [list(s) for s in cert.support.supports],
                "payoffs": [_jnum(f.eval(w)) for f in forms],
                "equality_residual": _jnum(cert.equality_residual),
                "margins": [_jnum(m) for m in cert.inequality_margins],
                "jacobian_verdict": cert.jacobian_verdict,
                "smallest_singular_value": _jnum(cert.smallest_singular_value)
                if cert.smallest_singular_value is not None
                else None,
                "exact": cert.exact,
                "boundary_degenerate": cert.boundary_degenerate,
            }
        )
    witness = result.continuum_witness
    return {
        "count": result.count,
        "equilibria": items,
        "continuum": result.continuum,
        "continuum_witness": (
            [[_jnum(x) for x in w] for w in witness.weights] if witness else None
        ),
    }


def _cmd_solve(args):
    game = _load_game(args)
    result = enumerate_nash(
        game, seed=args.seed, tol=args.tol, rank_tol=args.rank_tol
    )
    forms = [payoff_form(game, i) for i in range(game.num_players)]
    lines = [
        f"game: {game.num_players} players, strategies "
        + "x".join(map(str, game.strategy_counts))
        + f", mode {game.mode}"
    ]
    if result.continuum:
        lines.append("non-generic: continuum detected")
        if result.continuum_witness is not None:
            lines.append(
                "continuum witness: " + _fmt_weights(result.continuum_witness.weights)
            )
    else:
        lines.append(f"equilibria: {result.count}")
        for idx, cert in enumerate(result.equilibria, start=1):
            w = list(cert.point.weights)
            payoffs = " ".join(_fmt(f.eval(w)) for f in forms)
            sv = (
                f" (smallest singular value {_fmt(cert.smallest_singular_value)})"
                if cert.smallest_singular_value is not None
                else ""
            )
            lines.append(f"#{idx} support {{{_fmt_support(cert.support)}}}")
            lines.append(f"   point: {_fmt_weights(cert.point.weights)}")
            lines.append(f"   payoffs: {payoffs}")
            lines.append(
                f"   equality residual: {_fmt(cert.equality_residual)}; margins: "
                + " | ".join(_fmt(m) for m in cert.inequality_margins)
            )
            flag = " [boundary-degenerate]" if cert.boundary_degenerate else ""
            lines.append(f"   jacobian: {cert.jacobian_verdict}{sv}{flag}")
    degenerate = (
        result.continuum
        or bool(result.warnings)
        or any(
            c.jacobian_verdict == "singular" or c.boundary_degenerate
            for c in result.equilibria
        )
    )
    meta = _meta(args, command="solve", mode=game.mode)
    return (
        {"meta": meta, "results": _solve_payload(game, result),
         "warnings": list(result.warnings)},
        lines + [f"warning: {w}" for w in result.warnings],
        EXIT_DEGENERATE if degenerate else EXIT_OK,
    )


def _monomial_entries(form):
    out = []
    for idx in np.ndindex(*form.coeffs.shape):
        label = (
            "*".join(
                f"g{form.blocks[t] + 1}_{j}" for t, j in enumerate(idx) if j != 0
            )
            or "const"
        )
        out.append((label, form.coeffs[idx]))
    return out


def _cmd_lambda(args):
    game = _load_game(args)
    if not 1 <= args.player <= game.num_players:
        raise ValueError(f"no player {args.player}")
    i = args.player - 1
    dec = lambda_decomposition(game, i)

    def render(name, form):
        entries = _monomial_entries(form)
        text = ", ".join(f"{label} = {_fmt(c)}" for label, c in entries)
        return f"{name}: {text}", {label: _jnum(c) for label, c in entries}

    lines, payload = [], {}
    line, payload["kappa"] = render(f"kappa^{args.player}", dec.kappa)
    lines.append(line)
    payload["lambdas"] = []
    for j, lam in enumerate(dec.lambdas):
        line, entry = render(f"lambda^{args.player}_{j}", lam)
        lines.append(line)
        payload["lambdas"].append(entry)
    meta = _meta(args, command="lambda", mode=game.mode, player=args.player)
    return {"meta": meta, "results": payload, "warnings": []}, lines, EXIT_OK


def _cmd_goodcheck(args):
    game = _zero_game(args.shape)
    family = _parse_family(game, args.t, args.r)
    good = is_good(family)
    cycle = None if good else witness_cycle(family)
    if good:
        lines = ["good"]
    else:
        player, verts = cycle
        path = "-".join(map(str, verts + [verts[0]]))
        lines = [f"not good: player {player + 1} has cycle {path}"]
    payload = {
        "good": good,
        "T": [["inf" if t == INF else t for t in ts] for ts in family.T],
        "R": [[list(p) for p in ps] for ps in family.R],
        "cycle": None if good else {"player": cycle[0] + 1, "vertices": list(cycle[1])},
    }
    meta = _meta(args, command="goodcheck", shape=args.shape)
    return {"meta": meta, "results": payload, "warnings": []}, lines, EXIT_OK


def _cmd_sample(args):
    counts = _parse_shape(args.shape)
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    rows = []
    odd_hits = 0
    witness_hits = 0
    for k in range(args.count):
        seed = args.seed + k
        game = random_game(counts, seed=seed, distribution=args.distribution)
        result = enumerate_nash(
            game, seed=seed, tol=args.tol, rank_tol=args.rank_tol
        )
        degenerate = (
            result.continuum
            or bool(result.warnings)
            or any(
                c.jacobian_verdict == "singular" or c.boundary_degenerate
                for c in result.equilibria
            )
        )
        count = None if result.continuum else result.count
        odd = count is not None and count % 2 == 1
        all_regular = all(
            c.jacobian_verdict == "regular" for c in result.equilibria
        )
        odd_hits += odd
        witness_hits += degenerate
        rows.append(
            {
                "seed": seed,
                "count": count,
                "odd": odd,
                "all_regular": all_regular,
                "degeneracy_witnessed": degenerate,
                "warnings": len(result.warnings),
            }
        )
    oddness_rate = odd_hits / args.count
    witness_rate = witness_hits / args.count
    lines = [
        f"sampled {args.count} games of shape {args.shape} "
        f"({args.distribution}, seeds {args.seed}..{args.seed + args.count - 1})",
        f"oddness rate: {oddness_rate:.3f}",
        f"degeneracy-witness rate: {witness_rate:.3f}",
    ]
    for row in rows:
        if not row["odd"] or row["degeneracy_witnessed"]:
            lines.append(
                f"  seed {row['seed']}: count {row['count']}, "
                f"odd {row['odd']}, degeneracy {row['degeneracy_witnessed']}"
            )
    payload = {
        "games": rows,
        "oddness_rate": oddness_rate,
        "degeneracy_witness_rate": witness_rate,
    }
    meta = _meta(args, command="sample", shape=args.shape, count=args.count,
                 distribution=args.distribution)
    return {"meta": meta, "results": payload, "warnings": []}, lines, EXIT_OK


def _point_from_solve_json(game: FiniteGame, path: str, index: int):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ValueError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"{path} is not valid JSON: {e}") from None
    try:
        eqs = data["results"]["equilibria"]
        point = eqs[index]["point"]
    except (KeyError, IndexError, TypeError):
        raise ValueError(
            f"{path} has no equilibrium point at index {index}"
        ) from None
    return _point_from_lists(game, point)


def _cmd_certify(args):
    game = _load_game(args)
    if args.point is not None:
        profile = _parse_point(game, args.point)
    elif getattr(args, "from_json", None) is not None:
        profile = _point_from_solve_json(game, args.from_json, args.index)
    else:
        raise ValueError("supply --point or --from-json")
    chart = (
        parse_chart(args.chart, game)
        if args.chart
        else (0,) * game.num_players
    )
    if args.t or args.r:
        family = _parse_family(game, args.t, args.r)
    else:
        family = canonical_equilibrium_family(
            game, support_of(profile, game.zero_tol)
        )
    for h in family.hypersurfaces():
        if chart_excludes(chart, h):
            raise ValueError(
                f"{h} has no points in chart {format_chart(chart)}: the chart "
                "pins that tilde coordinate to 1, and its complement is exactly "
                "the pinned coordinate hyperplanes"
            )
    point = chart_zero_point(profile)
    if chart != point.chart:
        point = transition(point, chart)
    report = transversal_at(
        game, family, point, tol=args.tol, rank_tol=args.rank_tol
    )
    lines = [
        f"chart: {format_chart(chart)}",
        "active: " + (", ".join(str(h) for h in report.active) or "(none)"),
        f"rank: {report.rank} of {len(report.active)}",
        f"smallest singular value: {_fmt(report.smallest_singular_value)}",
        f"verdict: {report.verdict}",
    ]
    payload = {
        "chart": format_chart(chart),
        "family": {
            "T": [["inf" if t == INF else t for t in ts] for ts in family.T],
            "R": [[list(p) for p in ps] for ps in family.R],
        },
        "active": [str(h) for h in report.active],
        "rank": report.rank,
        "smallest_singular_value": _jnum(report.smallest_singular_value),
        "verdict": report.verdict,
    }
    meta = _meta(args, command="certify", mode=game.mode)
    code = EXIT_OK if report.verdict == "transversal" else EXIT_DEGENERATE
    return {"meta": meta, "results": payload, "warnings": []}, lines, code


def _cmd_charts(args):
    game = _zero_game(args.shape)
    rows = []
    lines = []
    for chart in all_charts(game):
        excluded = excluded_hypersurfaces(game, chart)
        rows.append(
            {"chart": format_chart(chart), "complement": [str(h) for h in excluded]}
        )
        lines.append(
            f"chart {format_chart(chart)}: complement "
            + ", ".join(str(h) for h in excluded)
        )
    meta = _meta(args, command="charts", shape=args.shape)
    return {"meta": meta, "results": {"charts": rows}, "warnings": []}, lines, EXIT_OK


def _meta(args, **extra) -> dict:
    meta = {
        "seed": getattr(args, "seed", None),
        "tol": getattr(args, "tol", None),
        "rank_tol": getattr(args, "rank_tol", None),
        "exact": getattr(args, "exact", False),
    }
    if getattr(args, "file", None):
        meta["file"] = args.file
    meta.update(extra)
    return meta


def _build_parser() -> _Parser:
    parser = _Parser(prog="nashatlas", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--tol", type=float, default=CHECK_TOL,
                        help="membership/best-reply tolerance")
    common.add_argument("--rank-tol", type=float, default=RANK_TOL,
                        help="singular-value rank threshold")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="enumerate Nash equilibria")
    p.add_argument("file", help="game file")
    p.add_argument("--exact", action="store_true",
                   help="exact rational arithmetic (2-player games only)")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("lambda", parents=[common],
                       help="print a player's payoff decomposition")
    p.add_argument("file", help="game file")
    p.add_argument("--player", type=int, required=True, help="player number (1-based)")
    p.add_argument("--exact", action="store_true",
                   help="exact rational arithmetic (2-player games only)")
    p.set_defaults(handler=_cmd_lambda)

    p = sub.add_parser("goodcheck", parents=[common],
                       help="check the forest condition of a family")
    p.add_argument("--shape", required=True, help="strategy counts, like 3x3")
    p.add_argument("--t", action="append", metavar="i:j[,j...]",
                   help="coordinate labels per player (inf allowed)")
    p.add_argument("--r", action="append", metavar="i:j-k[,j-k...]",
                   help="strategy pairs per player")
    p.set_defaults(handler=_cmd_goodcheck)

    p = sub.add_parser("sample", parents=[common],
                       help="random-game equilibrium statistics")
    p.add_argument("shape", help="strategy counts, like 2x2x2")
    p.add_argument("--count", type=int, default=1, help="number of games")
    p.add_argument("--distribution", choices=["uniform", "normal"],
                   default="uniform", help="payoff entry distribution")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("certify", parents=[common],
                       help="transversality of a family at a point")
    p.add_argument("file", help="game file")
    p.add_argument("--point", help="weights, players ';'-separated: 0.5,0.5;0.5,0.5")
    p.add_argument("--from-json", dest="from_json",
                   help="read the point from a solve --json report")
    p.add_argument("--index", type=int, default=0,
                   help="equilibrium index in the solve report")
    p.add_argument("--chart", help="chart spec l1,l2,... (default all zeros)")
    p.add_argument("--t", action="append", metavar="i:j[,j...]",
                   help="coordinate labels per player (inf allowed)")
    p.add_argument("--r", action="append", metavar="i:j-k[,j-k...]",
                   help="strategy pairs per player")
    p.add_argument("--exact", action="store_true",
                   help="exact rational arithmetic (2-player games only)")
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("charts", parents=[common],
                       help="print the atlas and each chart's complement")
    p.add_argument("--shape", required=True, help="strategy counts, like 2x3")
    p.set_defaults(handler=_cmd_charts)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        report, lines, code = args.handler(args)
    except GameFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ChartExcludesHypersurface, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
