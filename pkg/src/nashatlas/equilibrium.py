"""Nash equilibrium enumeration by support enumeration.

A profile is an equilibrium iff for every player the payoff slopes of
the supported own strategies agree and weakly dominate the slopes of
the unsupported ones, the slopes being the pure-strategy payoffs
against the opponents' mixture. Fixing a support profile turns the
equality part into a square polynomial system on the product of open
faces. Two-player systems are linear per player block and solved
exactly over the rationals (float payoffs are converted exactly);
anything larger runs a damped multistart Newton in face coordinates.

Rank-deficient strata raise SingularSystem instead of guessing: a
positive-dimensional solution set or a singular Jacobian at a root is
evidence the game sits in the degenerate exceptional set, and the
enumerator surfaces it as a warning with a witness where it has one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .exact import AffineSolutionSet, solve_affine
from .forms import MultilinearForm, lambda_decomposition, payoff_slice_values
from .genericity import RANK_TOL, certify_equilibrium
from .game import (
    RATIONAL,
    FiniteGame,
    MixedProfile,
    SupportProfile,
    _as_fraction,
    profile_from_weights,
    support_of,
)

STRICTNESS = 1e-9
RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-6
CHECK_TOL = 1e-8
BOUNDARY_BAND = 1e-8
NEWTON_MAX_ITERS = 100
RANDOM_STARTS = 32


class SingularSystem(RuntimeError):
    """A support stratum whose equality system is degenerate."""

    def __init__(self, support: SupportProfile, reason: str,
                 witness: MixedProfile | None = None, candidates=()):
        super().__init__(reason)
        self.support = support
        self.reason = reason
        self.witness = witness
        self.candidates = list(candidates)


@dataclass(frozen=True)
class BestReplyReport:
    """Per-player equality residuals and in-vs-out margins."""

    ok: tuple[bool, ...]
    equality_residuals: tuple
    inequality_margins: tuple

    @property
    def all_ok(self) -> bool:
        return all(self.ok)


def best_reply_check(game: FiniteGame, profile: MixedProfile,
                     tol: float = CHECK_TOL) -> BestReplyReport:
    """Check the equilibrium conditions player by player.

    For each player the supported slope values must agree within tol
    and exceed every unsupported slope value by at least -tol. Margins
    are +inf for full supports.
    """
    supports = support_of(profile, game.zero_tol).supports
    oks, residuals, margins = [], [], []
    for i in range(game.num_players):
        c = payoff_slice_values(game, i, profile.weights)
        supp = supports[i]
        inside = [c[j] for j in supp]
        outside = [c[j] for j in range(game.strategy_counts[i]) if j not in supp]
        residual = max(inside) - min(inside)
        margin = math.inf if not outside else min(inside) - max(outside)
        oks.append(residual <= tol and margin >= -tol)
        residuals.append(residual)
        margins.append(margin)
    return BestReplyReport(tuple(oks), tuple(residuals), tuple(margins))


@dataclass(frozen=True)
class SupportSystem:
    """The square equality system attached to a support profile.

    For each player with a mixed support, the slope differences
    between the minimal supported strategy and every other supported
    one; unknowns are the supported weights minus one eliminated per
    player by the sum rule.
    """

    support: SupportProfile
    star_pairs: tuple[tuple[tuple[int, int], ...], ...]
    equality_forms: tuple[tuple[MultilinearForm, ...], ...]
    unknowns: tuple[tuple[int, int], ...]

    @property
    def num_equations(self) -> int:
        return sum(len(fs) for fs in self.equality_forms)


def build_support_system(game: FiniteGame, support: SupportProfile) -> SupportSystem:
    pairs, forms, unknowns = [], [], []
    for i, supp in enumerate(support.supports):
        jstar = supp[0]
        own_pairs, own_forms = [], []
        if len(supp) >= 2:
            dec = lambda_decomposition(game, i)
            for j in supp[1:]:
                own_pairs.append((jstar, j))
                diff = MultilinearForm(
                    dec.lambdas[j].blocks,
                    dec.lambdas[j].coeffs - dec.lambdas[jstar].coeffs,
                    dec.lambdas[j].pinned,
                    owner=i,
                )
                own_forms.append(diff)
            unknowns.extend((i, s) for s in supp[:-1])
        pairs.append(tuple(own_pairs))
        forms.append(tuple(own_forms))
    return SupportSystem(support, tuple(pairs), tuple(forms), tuple(unknowns))


def enumerate_supports(game: FiniteGame):
    """All nonempty-support profiles, lexicographic per player."""
    per_player = []
    for c in game.strategy_counts:
        subsets = []
        for size in range(1, c + 1):
            subsets.extend(itertools.combinations(range(c), size))
        per_player.append(sorted(subsets))
    for combo in itertools.product(*per_player):
        yield SupportProfile(tuple(combo))


def _positive_point(sol: AffineSolutionSet, strict) -> list[Fraction] | None:
    """A strictly positive point of a nonempty affine solution set, or None.

    Unique solutions are checked directly; positive-dimensional sets get
    a small interior-point LP in floats, then the float direction is
    snapped back onto the set exactly (any offset along the nullspace
    stays a solution).
    """
    if sol.is_empty:
        return None
    if sol.is_unique:
        return sol.particular if all(x > strict for x in sol.particular) else None
    from scipy.optimize import linprog

    part = np.array([float(x) for x in sol.particular])
    null = np.array([[float(x) for x in vec] for vec in sol.nullspace]).T
    n, d = null.shape
    # maximize t subject to part + null @ x >= t
    a_ub = np.hstack([-null, np.ones((n, 1))])
    res = linprog(
        c=[0.0] * d + [-1.0],
        A_ub=a_ub,
        b_ub=part,
        bounds=[(None, None)] * d + [(None, 1.0)],
        method="highs",
    )
    if not res.success or res.x[-1] <= 1e-6:
        return None
    for snap in (1000, None):
        xs = [
            Fraction(v).limit_denominator(snap) if snap else Fraction(v)
            for v in res.x[:d]
        ]
        point = list(sol.particular)
        for coeff, vec in zip(xs, sol.nullspace):
            point = [p + coeff * q for p, q in zip(point, vec)]
        if all(x > strict for x in point):
            return point
    return None


def _exact_pair_solve(game: FiniteGame, support: SupportProfile):
    """Two-player path: each player's weights solve a linear system built
    from the opponent's slope equalities plus the sum rule. Exact."""
    strict = Fraction(0) if game.mode == RATIONAL else Fraction(STRICTNESS)
    blocks: list[AffineSolutionSet] = []
    for solving in (0, 1):
        other = 1 - solving
        supp = support.supports[solving]
        osupp = support.supports[other]
        u = game.utilities[other]
        jstar = osupp[0]
        rows, rhs = [], []
        for j in osupp[1:]:
            if other == 0:
                row = [_as_fraction(u[j, s]) - _as_fraction(u[jstar, s]) for s in supp]
            else:
                row = [_as_fraction(u[s, j]) - _as_fraction(u[s, jstar]) for s in supp]
            rows.append(row)
            rhs.append(Fraction(0))
        rows.append([Fraction(1)] * len(supp))
        rhs.append(Fraction(1))
        blocks.append(solve_affine(rows, rhs, len(supp)))

    if any(b.is_empty for b in blocks):
        return []

    def full_weights(solving: int, values) -> list[Fraction]:
        w = [Fraction(0)] * game.strategy_counts[solving]
        for s, v in zip(support.supports[solving], values):
            w[s] = v
        return w

    if all(b.is_unique for b in blocks):
        if all(
            all(x > strict for x in b.particular) for b in blocks
        ):
            weights = [full_weights(p, blocks[p].particular) for p in (0, 1)]
            return [_profile_from_fractions(game, weights)]
        return []

    # Positive-dimensional solution set: witness an interior point if
    # one exists, and let the caller decide what the continuum means.
    points = [_positive_point(b, strict) for b in blocks]
    witness = None
    if all(p is not None for p in points):
        weights = [full_weights(p, points[p]) for p in (0, 1)]
        witness = _profile_from_fractions(game, weights)
    raise SingularSystem(
        support,
        "positive-dimensional solution set",
        witness=witness,
    )


def _profile_from_fractions(game: FiniteGame, weights) -> MixedProfile:
    if game.mode == RATIONAL:
        return profile_from_weights(weights, RATIONAL)
    return profile_from_weights([[float(x) for x in w] for w in weights])


def _newton_solve(game: FiniteGame, support: SupportProfile, seed: int):
    """Multistart damped Newton on the face coordinates (m != 2 path)."""
    m = game.num_players
    counts = game.strategy_counts
    supports = support.supports
    mixed = [i for i in range(m) if len(supports[i]) >= 2]
    u_float = [np.asarray(u, dtype=float) for u in game.utilities]

    base = [np.zeros(c) for c in counts]
    for i in range(m):
        if len(supports[i]) == 1:
            base[i][supports[i][0]] = 1.0

    pairs = []
    diff = {}
    for i in mixed:
        jstar = supports[i][0]
        for j in supports[i][1:]:
            pairs.append((i, j))
            diff[(i, j)] = np.take(u_float[i], j, axis=i) - np.take(
                u_float[i], jstar, axis=i
            )

    if not pairs:
        return [profile_from_weights([b.copy() for b in base])]

    sizes = {i: len(supports[i]) for i in mixed}
    offsets = {}
    nfree = 0
    for i in mixed:
        offsets[i] = nfree
        nfree += sizes[i] - 1

    def weights_from(x):
        w = [b.copy() for b in base]
        for i in mixed:
            vals = x[offsets[i]: offsets[i] + sizes[i] - 1]
            for t, s in enumerate(supports[i][:-1]):
                w[i][s] = vals[t]
            w[i][supports[i][-1]] = 1.0 - vals.sum()
        return w

    def contract(tensor, w, skip_player, keep_player=None):
        others = [p for p in range(m) if p != skip_player]
        t = tensor
        for idx in range(len(others) - 1, -1, -1):
            if others[idx] == keep_player:
                continue
            t = np.tensordot(t, w[others[idx]], axes=([idx], [0]))
        return t

    def residual(w):
        return np.array([contract(diff[p], w, p[0]) for p in pairs], dtype=float)

    def jacobian(w):
        jac = np.zeros((len(pairs), nfree))
        for r, (i, j) in enumerate(pairs):
            for q in mixed:
                if q == i:
                    continue
                v = contract(diff[(i, j)], w, i, keep_player=q)
                last = supports[q][-1]
                for t, s in enumerate(supports[q][:-1]):
                    jac[r, offsets[q] + t] = v[s] - v[last]
        return jac

    def starts():
        centroid = np.concatenate(
            [np.full(sizes[i] - 1, 1.0 / sizes[i]) for i in mixed]
        )
        yield centroid
        for choice in itertools.product(*(range(sizes[i]) for i in mixed)):
            x = centroid.copy() * 0.1
            for i, c in zip(mixed, choice):
                if c < sizes[i] - 1:
                    x[offsets[i] + c] += 0.9
            yield x
        rng = np.random.default_rng(seed)
        for _ in range(RANDOM_STARTS):
            x = np.concatenate(
                [rng.dirichlet(np.ones(sizes[i]))[:-1] for i in mixed]
            )
            yield x

    roots = []
    for x in starts():
        fval = residual(weights_from(x))
        converged = False
        for _ in range(NEWTON_MAX_ITERS):
            if np.max(np.abs(fval)) <= RESIDUAL_TOL:
                converged = True
                break
            jac = jacobian(weights_from(x))
            step = np.linalg.lstsq(jac, -fval, rcond=None)[0]
            if np.max(np.abs(step)) <= 1e-14:
                break
            norm0 = np.linalg.norm(fval)
            t = 1.0
            for _ in range(25):
                xn = x + t * step
                fn = residual(weights_from(xn))
                if np.linalg.norm(fn) <= (1.0 - 0.25 * t) * norm0:
                    break
                t *= 0.5
            else:
                break
            x, fval = xn, fn
        if not converged and np.max(np.abs(fval)) > RESIDUAL_TOL:
            continue
        w = weights_from(x)
        if all(w[i][s] > STRICTNESS for i in mixed for s in supports[i]):
            if all(np.max(np.abs(x - r)) > DEDUP_TOL for r in roots):
                roots.append(x)

    profiles = [profile_from_weights(weights_from(r)) for r in roots]

    for a, b in itertools.combinations(range(len(roots)), 2):
        mid = 0.5 * (roots[a] + roots[b])
        if np.max(np.abs(residual(weights_from(mid)))) <= RESIDUAL_TOL:
            raise SingularSystem(
                support,
                "continuum of solutions (midpoint of two roots also solves)",
                witness=profile_from_weights(weights_from(mid)),
                candidates=profiles,
            )

    singular = []
    for r in roots:
        jac = jacobian(weights_from(r))
        sv = np.linalg.svd(jac, compute_uv=False)
        smax = sv[0] if len(sv) else 0.0
        smin = sv[-1] if len(sv) else 0.0
        if len(sv) < len(pairs) or smin <= 1e-8 * max(1.0, smax):
            singular.append(r)
    if singular:
        raise SingularSystem(
            support,
            "singular Jacobian at a root",
            witness=None,
            candidates=profiles,
        )

    return profiles


def solve_support(game: FiniteGame, support: SupportProfile, seed: int = 0):
    """All isolated candidate profiles with the given support: strictly
    positive weights on the support, zero elsewhere, slope equalities
    satisfied. Raises SingularSystem on degenerate strata."""
    if len(support.supports) != game.num_players:
        raise ValueError(
            f"support has {len(support.supports)} blocks, expected "
            f"{game.num_players}"
        )
    for i, supp in enumerate(support.supports):
        if supp[-1] >= game.strategy_counts[i]:
            raise ValueError(f"support index out of range for player {i + 1}")
    if game.num_players == 2:
        return _exact_pair_solve(game, support)
    return _newton_solve(game, support, seed)


@dataclass(frozen=True)
class EquilibriumCertificate:
    """An enumerated equilibrium with its numerical evidence."""

    point: MixedProfile
    support: SupportProfile
    equality_residual: float | Fraction
    inequality_margins: tuple
    jacobian_verdict: str | None = None
    smallest_singular_value: float | None = None
    exact: bool = False
    boundary_degenerate: bool = False


@dataclass
class EnumerationResult:
    equilibria: list[EquilibriumCertificate] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    continuum: bool = False
    continuum_witness: MixedProfile | None = None

    @property
    def count(self) -> int:
        return len(self.equilibria)

    @property
    def degenerate(self) -> bool:
        return self.continuum or bool(self.warnings)


def _support_label(support: SupportProfile) -> str:
    return " | ".join(",".join(map(str, s)) for s in support.supports)


def enumerate_nash(
    game: FiniteGame,
    seed: int = 0,
    tol: float = CHECK_TOL,
    certify: bool = True,
    rank_tol: float = RANK_TOL,
) -> EnumerationResult:
    """Enumerate all Nash equilibria support by support.

    Candidates must pass the best-reply check at `tol`. Degenerate
    strata become warnings; a witnessed equilibrium continuum makes
    the result report the continuum instead of a (meaningless) finite
    list. With certify=True each certificate carries the verdict of
    the square-Jacobian regularity check.
    """
    result = EnumerationResult()
    found: list[EquilibriumCertificate] = []
    for support in enumerate_supports(game):
        try:
            candidates = solve_support(game, support, seed=seed)
        except SingularSystem as exc:
            result.warnings.append(f"support {_support_label(support)}: {exc.reason}")
            candidates = exc.candidates
            if exc.witness is not None and not result.continuum:
                if best_reply_check(game, exc.witness, tol).all_ok:
                    result.continuum = True
                    result.continuum_witness = exc.witness
        for cand in candidates:
            if support_of(cand, game.zero_tol) != support:
                continue
            report = best_reply_check(game, cand, tol)
            if not report.all_ok:
                continue
            if any(
                np.max(np.abs(np.concatenate(cand.as_floats())
                              - np.concatenate(other.point.as_floats())))
                <= DEDUP_TOL
                for other in found
            ):
                continue
            residual = max(report.equality_residuals)
            boundary = any(
                m != math.inf and abs(m) < BOUNDARY_BAND
                for m in report.inequality_margins
            )
            found.append(
                EquilibriumCertificate(
                    point=cand,
                    support=support,
                    equality_residual=residual,
                    inequality_margins=report.inequality_margins,
                    exact=game.mode == RATIONAL,
                    boundary_degenerate=boundary,
                )
            )

    found.sort(key=lambda c: tuple(np.concatenate(c.point.as_floats())))

    if result.continuum:
        result.warnings.append("non-generic: continuum detected")
        result.equilibria = []
        return result

    if certify:
        certified = []
        for cert in found:
            report = certify_equilibrium(game, cert, rank_tol=rank_tol)
            certified.append(
                replace(
                    cert,
                    jacobian_verdict=(
                        "regular" if report.verdict == "transversal" else "singular"
                    ),
                    smallest_singular_value=report.smallest_singular_value,
                )
            )
        found = certified

    result.equilibria = found
    return result
