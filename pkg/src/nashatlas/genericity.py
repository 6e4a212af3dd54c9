"""Good families, transversality checks, and regular-value probes.

A family selects per player some coordinate hyperplanes (label set T^i,
with inf naming the hyperplane at infinity) and some payoff-difference
hypersurfaces (own-strategy pair set R^i). The family is good when every
pair graph is a forest; good families are the ones whose transversality
generic payoffs guarantee.

Transversality at a point is checked through the stacked Jacobian of
the defining maps of the hypersurfaces that actually contain the point:
full rank means transversal. Equilibria get a canonical square family
(off-support coordinate hyperplanes plus the star of in-support
equality hypersurfaces); its Jacobian being nondegenerate is the
regularity certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .atlas import (
    INF,
    MEMBERSHIP_TOL,
    ChartPoint,
    Coordinate,
    Hypersurface,
    PayoffDiff,
    chart_excludes,
    chart_zero_point,
    defining_map,
    format_chart,
)
from .forms import MultilinearForm
from .game import FiniteGame, SupportProfile

if TYPE_CHECKING:
    from .equilibrium import EquilibriumCertificate

RANK_TOL = 1e-8
PROBE_STARTS = 32
PROBE_RESIDUAL_TOL = 1e-10
PROBE_MAX_ITERS = 100
PROBE_DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class GoodFamily:
    """Per player: coordinate labels T^i (ints or INF) and strategy
    pairs R^i with j < k."""

    T: tuple[tuple, ...]
    R: tuple[tuple[tuple[int, int], ...], ...]

    def hypersurfaces(self) -> list[Hypersurface]:
        out: list[Hypersurface] = []
        for i, labels in enumerate(self.T):
            out.extend(Coordinate(i, t) for t in labels)
        for i, pairs in enumerate(self.R):
            out.extend(PayoffDiff(i, pair) for pair in pairs)
        return out

    @property
    def num_pairs(self) -> int:
        return sum(len(p) for p in self.R)


def good_family(game: FiniteGame, T=None, R=None) -> GoodFamily:
    """Validated family; missing players default to empty selections."""
    m = game.num_players
    T = list(T) if T is not None else [()] * m
    R = list(R) if R is not None else [()] * m
    if len(T) != m or len(R) != m:
        raise ValueError("family needs one T and one R entry per player")
    t_out, r_out = [], []
    for i in range(m):
        n = game.strategy_counts[i] - 1
        labels = []
        for t in T[i]:
            if t != INF:
                t = int(t)
                if not 0 <= t <= n:
                    raise ValueError(f"player {i + 1}: label {t} out of range")
            labels.append(t)
        labels = tuple(sorted(set(labels), key=float))
        pairs = []
        for j, k in R[i]:
            j, k = int(j), int(k)
            if not 0 <= j < k <= n:
                raise ValueError(f"player {i + 1}: bad pair ({j},{k})")
            pairs.append((j, k))
        t_out.append(labels)
        r_out.append(tuple(sorted(set(pairs))))
    return GoodFamily(tuple(t_out), tuple(r_out))


def _find_cycle(edges) -> list[int] | None:
    """A vertex cycle of the undirected graph given by the edge pairs,
    or None when the graph is a forest. Grows a spanning forest edge by
    edge; the first edge joining two already-connected vertices closes
    a cycle, recovered as the forest path between its endpoints."""
    adj: dict[int, list[int]] = {}
    for j, k in edges:
        if k in adj.get(j, ()):
            continue  # parallel edge cannot occur with set input
        if j in adj and k in adj:
            path = _forest_path(adj, j, k)
            if path is not None:
                return path
        adj.setdefault(j, []).append(k)
        adj.setdefault(k, []).append(j)
    return None


def _forest_path(adj, start: int, goal: int) -> list[int] | None:
    prev = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in adj.get(v, ()):
            if w not in prev:
                prev[w] = v
                queue.append(w)
    return None


def is_good(family: GoodFamily) -> bool:
    """Forest condition per player, via union-find on the pair edges."""
    for pairs in family.R:
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j, k in pairs:
            rj, rk = find(j), find(k)
            if rj == rk:
                return False
            parent[rj] = rk
    return True


def witness_cycle(family: GoodFamily) -> tuple[int, list[int]] | None:
    """(player, cycle vertices) for some non-forest player, else None."""
    for i, pairs in enumerate(family.R):
        cycle = _find_cycle(pairs)
        if cycle is not None:
            return i, cycle
    return None


@dataclass(frozen=True)
class TransversalityReport:
    chart: tuple[int, ...]
    point: ChartPoint
    active: tuple[Hypersurface, ...]
    jacobian: np.ndarray
    rank: int
    smallest_singular_value: float
    verdict: str  # "transversal" or "degenerate"


def _coord_offsets(game: FiniteGame) -> tuple[list[int], int]:
    offsets, total = [], 0
    for c in game.strategy_counts:
        offsets.append(total)
        total += c - 1
    return offsets, total


def full_gradient(game: FiniteGame, form: MultilinearForm, point: ChartPoint) -> np.ndarray:
    """Gradient of a chart-local form with respect to all chart
    coordinates, zero on blocks the form does not read."""
    offsets, total = _coord_offsets(game)
    out = np.zeros(total)
    inputs = [point.coords[b] for b in form.blocks]
    for b in form.blocks:
        grad = form.grad(inputs, b)
        grad = np.asarray([float(x) for x in grad]) if grad.dtype == object else grad
        out[offsets[b]: offsets[b] + len(grad)] = grad
    return out


def _svd_rank(matrix: np.ndarray, rank_tol: float) -> tuple[int, float, float]:
    """(rank, smallest sv, largest sv) with the scale-relative cutoff."""
    if matrix.size == 0:
        return 0, math.inf, 0.0
    sv = np.linalg.svd(matrix, compute_uv=False)
    smax = float(sv[0])
    cutoff = rank_tol * max(1.0, smax)
    rank = int(np.sum(sv > cutoff))
    return rank, float(sv[-1]), smax


def transversal_at(
    game: FiniteGame,
    family: GoodFamily,
    point: ChartPoint,
    tol: float = MEMBERSHIP_TOL,
    rank_tol: float = RANK_TOL,
    active: list[Hypersurface] | None = None,
) -> TransversalityReport:
    """Transversality of the family at one chart point.

    Hypersurfaces not containing the point are ignored; hypersurfaces
    the chart excludes cannot contain it and are skipped. Pass `active`
    to pin the active set instead of detecting it by membership (used
    by the equilibrium certificate, where activity is known). Verdict
    is transversal iff the stacked Jacobian has full row rank.
    """
    chart = point.chart
    if active is None:
        active = []
        for h in family.hypersurfaces():
            if chart_excludes(chart, h):
                continue
            form = defining_map(game, h, chart)
            scale = form.max_abs_coeff()
            if scale == 0:
                active.append(h)
                continue
            value = form.eval([point.coords[b] for b in form.blocks])
            if abs(value) <= tol * scale:
                active.append(h)
    offsets, total = _coord_offsets(game)
    rows = [
        full_gradient(game, defining_map(game, h, chart), point) for h in active
    ]
    jac = np.array(rows, dtype=float) if rows else np.zeros((0, total))
    rank, smin, _ = _svd_rank(jac, rank_tol)
    verdict = "transversal" if rank == len(active) else "degenerate"
    return TransversalityReport(
        chart=chart,
        point=point,
        active=tuple(active),
        jacobian=jac,
        rank=rank,
        smallest_singular_value=smin,
        verdict=verdict,
    )


def canonical_equilibrium_family(game: FiniteGame, support: SupportProfile) -> GoodFamily:
    """Off-support coordinate hyperplanes plus the star of in-support
    slope equalities; its size is the chart dimension, so the Jacobian
    at an equilibrium is square."""
    T, R = [], []
    for i, supp in enumerate(support.supports):
        T.append(tuple(j for j in range(game.strategy_counts[i]) if j not in supp))
        jstar = supp[0]
        R.append(tuple((jstar, j) for j in supp[1:]))
    return GoodFamily(tuple(T), tuple(R))


def certify_equilibrium(game: FiniteGame, cert: "EquilibriumCertificate",
                        rank_tol: float = RANK_TOL) -> TransversalityReport:
    """Square-Jacobian regularity check of an enumerated equilibrium in
    the standard chart. All family hypersurfaces pass through the
    equilibrium by construction, so the active set is pinned."""
    family = canonical_equilibrium_family(game, cert.support)
    point = chart_zero_point(cert.point)
    return transversal_at(
        game, family, point, rank_tol=rank_tol, active=family.hypersurfaces()
    )


@dataclass(frozen=True)
class ProbeRoot:
    point: ChartPoint
    residual: float
    rank: int
    regular: bool


@dataclass(frozen=True)
class ProbeReport:
    chart: tuple[int, ...]
    family: GoodFamily
    dimension: int
    num_equations: int
    empty_face: bool
    roots: tuple[ProbeRoot, ...]
    verdict: str  # "regular" (all witnessed roots regular, or none) / "degenerate"


def _face_parametrization(game: FiniteGame, family: GoodFamily, chart):
    """Affine map z -> chart coords of the face cut out by the T^i
    coordinate constraints: per player a constant vector and a basis
    matrix. Returns None when the face misses the chart."""
    consts, bases = [], []
    for i in range(game.num_players):
        n = game.strategy_counts[i] - 1
        l = chart[i]
        slot_of_pos = [p if p < l else p + 1 for p in range(n)]
        fixed = set()
        affine = False
        for t in family.T[i]:
            h = Coordinate(i, t)
            if chart_excludes(chart, h):
                raise ValueError(
                    f"{h} is excluded from chart {format_chart(chart)}; "
                    "pick a chart whose pinned slots avoid the family"
                )
            if t == INF:
                fixed.add(0)  # tilde slot 0
            elif t == 0:
                affine = True
            else:
                fixed.add(int(t))
        c0 = np.zeros(n)
        free_positions = [p for p in range(n) if slot_of_pos[p] not in fixed]
        if affine:
            # the zeroth-weight hyperplane: tilde_0 - sum_{j>=1} tilde_j = 0
            # with the chart slot contributing its pinned 1
            coeff = {p: (1.0 if slot_of_pos[p] == 0 else -1.0) for p in free_positions}
            const = 1.0 if l == 0 else -1.0
            if not free_positions:
                if const != 0.0:
                    return None
                pivot = None
            else:
                pivot = free_positions[0]
            if pivot is not None:
                c0[pivot] = -const / coeff[pivot]
                cols = []
                for p in free_positions[1:]:
                    col = np.zeros(n)
                    col[p] = 1.0
                    col[pivot] = -coeff[p] / coeff[pivot]
                    cols.append(col)
                bases.append(np.array(cols).T if cols else np.zeros((n, 0)))
            else:
                bases.append(np.zeros((n, 0)))
        else:
            cols = []
            for p in free_positions:
                col = np.zeros(n)
                col[p] = 1.0
                cols.append(col)
            bases.append(np.array(cols).T if cols else np.zeros((n, 0)))
        consts.append(c0)
    return consts, bases


def regular_value_probe(
    game: FiniteGame,
    family: GoodFamily,
    chart,
    seed: int = 0,
    rank_tol: float = RANK_TOL,
) -> ProbeReport:
    """Hunt roots of the family's payoff-difference system on the face
    cut out by its coordinate constraints, and check that every found
    root is a regular point (full-rank Jacobian of the restricted map).

    An empty root set is a regular outcome; the probe only ever
    witnesses degeneracy, it cannot prove its absence.
    """
    chart = tuple(int(x) for x in chart)
    if not is_good(family):
        raise ValueError("family is not good (some pair graph has a cycle)")
    if family.num_pairs == 0:
        raise ValueError("family has no payoff-difference pairs to probe")

    param = _face_parametrization(game, family, chart)
    if param is None:
        return ProbeReport(chart, family, 0, family.num_pairs, True, (), "regular")
    consts, bases = param
    dims = [b.shape[1] for b in bases]
    total_dim = sum(dims)

    forms = []
    for i, pairs in enumerate(family.R):
        for pair in pairs:
            forms.append(defining_map(game, PayoffDiff(i, pair), chart))
    num_eq = len(forms)

    def coords_of(z):
        out, pos = [], 0
        for i in range(game.num_players):
            zi = z[pos: pos + dims[i]]
            pos += dims[i]
            out.append(consts[i] + bases[i] @ zi)
        return out

    def point_of(z) -> ChartPoint:
        return ChartPoint(chart, tuple(coords_of(z)))

    offsets, _ = _coord_offsets(game)

    def residual(z):
        coords = coords_of(z)
        return np.array(
            [f.eval([coords[b] for b in f.blocks]) for f in forms], dtype=float
        )

    def jacobian(z):
        point = point_of(z)
        jac = np.zeros((num_eq, total_dim))
        for r, f in enumerate(forms):
            g = full_gradient(game, f, point)
            pos = 0
            for i in range(game.num_players):
                gi = g[offsets[i]: offsets[i] + game.strategy_counts[i] - 1]
                jac[r, pos: pos + dims[i]] = bases[i].T @ gi
                pos += dims[i]
        return jac

    def inf_norm(v) -> float:
        return float(np.max(np.abs(v))) if v.size else 0.0

    rng = np.random.default_rng(seed)
    starts = [np.zeros(total_dim)]
    starts.extend(rng.normal(0.0, 1.0, total_dim) for _ in range(PROBE_STARTS))

    roots: list[np.ndarray] = []
    for z in starts:
        fval = residual(z)
        converged = False
        for _ in range(PROBE_MAX_ITERS):
            if inf_norm(fval) <= PROBE_RESIDUAL_TOL:
                converged = True
                break
            jac = jacobian(z)
            step = np.linalg.lstsq(jac, -fval, rcond=None)[0]
            if inf_norm(step) <= 1e-14:
                break
            norm0 = np.linalg.norm(fval)
            t = 1.0
            for _ in range(25):
                zn = z + t * step
                fn = residual(zn)
                if np.linalg.norm(fn) <= (1.0 - 0.25 * t) * norm0:
                    break
                t *= 0.5
            else:
                break
            z, fval = zn, fn
        if not converged and inf_norm(fval) > PROBE_RESIDUAL_TOL:
            continue
        if all(inf_norm(z - r) > PROBE_DEDUP_TOL for r in roots):
            roots.append(z)

    out_roots = []
    all_regular = True
    for z in roots:
        rank, _, _ = _svd_rank(jacobian(z), rank_tol)
        regular = rank == num_eq
        all_regular = all_regular and regular
        out_roots.append(
            ProbeRoot(
                point=point_of(z),
                residual=float(np.max(np.abs(residual(z)))),
                rank=rank,
                regular=regular,
            )
        )
    return ProbeReport(
        chart=chart,
        family=family,
        dimension=total_dim,
        num_equations=num_eq,
        empty_face=False,
        roots=tuple(out_roots),
        verdict="regular" if all_regular else "degenerate",
    )


def rank_split_equivalence_test(full_jacobian, coordinate_block_size: int,
                                rank_tol: float = RANK_TOL) -> bool:
    """Check that full rank of the stacked matrix is equivalent to full
    rank of the lower block restricted to the kernel of the (full-rank)
    coordinate block. Must hold whenever the first rows have full rank;
    returning False would falsify the block-triangular rank argument."""
    a = np.asarray(full_jacobian, dtype=float)
    b = int(coordinate_block_size)
    total = a.shape[0]
    cond_full, _, _ = _svd_rank(a, rank_tol)
    cond_full = cond_full == total
    if b == 0:
        kernel = np.eye(a.shape[1])
    else:
        top = a[:b]
        u, sv, vh = np.linalg.svd(top)
        cutoff = rank_tol * max(1.0, float(sv[0]) if len(sv) else 0.0)
        rank_top = int(np.sum(sv > cutoff))
        kernel = vh[rank_top:].T
    lower = a[b:] @ kernel
    rank_lower, _, _ = _svd_rank(lower, rank_tol)
    cond_split = rank_lower == total - b
    return cond_full == cond_split
