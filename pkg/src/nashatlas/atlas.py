"""Affine chart atlas on the product of projective strategy spaces.

Per player, the weight space is compactified projectively in the
homogenized coordinates (tilde basis): tilde_0 is the weight sum and
tilde_j (j >= 1) are the plain weights. Chart l = (l_1, ..., l_m) is
the affine piece where every player's tilde coordinate l_i equals 1;
its free coordinates are the remaining tilde entries.

Three kinds of hypersurface get chart-local defining functions:

* Coordinate(i, j), j >= 1: the hyperplane weight_j = 0 (tilde_j = 0).
* Coordinate(i, INF): the hyperplane at infinity, tilde_0 = 0.
* Coordinate(i, 0): the zeroth-weight hyperplane, in homogenized form
  tilde_0 - sum_{j>=1} tilde_j = 0.
* PayoffDiff(i, (j, k)): the zero set of Lambda^i_j - Lambda^i_k, the
  homogeneous payoff-slope difference of player i between own
  strategies j and k (index 0 contributing the zero form).

Chart l misses exactly the hyperplanes tilde^i_{l_i} = 0, i.e.
Coordinate(i, l_i) for l_i >= 1 and Coordinate(i, INF) for l_i = 0;
asking for their defining maps raises ChartExcludesHypersurface.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forms import MultilinearForm, homogeneous_decomposition
from .game import FLOAT, RATIONAL, FiniteGame, MixedProfile

INF = float("inf")

MEMBERSHIP_TOL = 1e-8


class ChartExcludesHypersurface(ValueError):
    """The requested hypersurface does not meet the requested chart."""


@dataclass(frozen=True)
class Coordinate:
    """Coordinate hyperplane of one player: index in {0,...,n_i} or INF."""

    player: int
    index: float  # int-valued, or INF

    def __post_init__(self):
        if self.player < 0:
            raise ValueError("player index must be >= 0")
        if self.index != INF:
            if self.index < 0:
                raise ValueError("coordinate index must be >= 0 or INF")
            object.__setattr__(self, "index", int(self.index))

    def __str__(self) -> str:
        j = "inf" if self.index == INF else str(self.index)
        return f"C:{self.player + 1}:{j}"


@dataclass(frozen=True)
class PayoffDiff:
    """Zero set of Lambda^i_j - Lambda^i_k for an own-strategy pair j < k."""

    player: int
    pair: tuple[int, int]

    def __post_init__(self):
        if self.player < 0:
            raise ValueError("player index must be >= 0")
        j, k = self.pair
        if not 0 <= j < k:
            raise ValueError("pair must satisfy 0 <= j < k")

    def __str__(self) -> str:
        j, k = self.pair
        return f"D:{self.player + 1}:{j}:{k}"


Hypersurface = Coordinate | PayoffDiff


@dataclass(frozen=True)
class ChartPoint:
    """A point of one affine chart: per player the free tilde coordinates
    (the entry pinned to 1 is omitted)."""

    chart: tuple[int, ...]
    coords: tuple[np.ndarray, ...]

    @property
    def num_players(self) -> int:
        return len(self.chart)

    @property
    def is_rational(self) -> bool:
        return any(c.dtype == object for c in self.coords)

    def full_vector(self, i: int) -> np.ndarray:
        one = Fraction(1) if self.coords[i].dtype == object else 1.0
        return np.insert(self.coords[i], self.chart[i], one)

    def full_vectors(self) -> tuple[np.ndarray, ...]:
        return tuple(self.full_vector(i) for i in range(self.num_players))

    def as_floats(self) -> "ChartPoint":
        return ChartPoint(
            self.chart, tuple(np.asarray(c, dtype=float) for c in self.coords)
        )


def _validate_chart(game: FiniteGame, chart) -> tuple[int, ...]:
    chart = tuple(int(l) for l in chart)
    if len(chart) != game.num_players:
        raise ValueError(f"chart needs {game.num_players} indices")
    for i, l in enumerate(chart):
        if not 0 <= l < game.strategy_counts[i]:
            raise ValueError(f"chart index {l} out of range for player {i + 1}")
    return chart


def chart_point(game: FiniteGame, chart, coords, mode: str = FLOAT) -> ChartPoint:
    """Validated chart point; coords has one length-n_i vector per player."""
    chart = _validate_chart(game, chart)
    if len(coords) != game.num_players:
        raise ValueError("one coordinate vector per player required")
    out = []
    for i, c in enumerate(coords):
        if mode == RATIONAL:
            arr = np.empty(len(c), dtype=object)
            arr[:] = [x if isinstance(x, Fraction) else Fraction(x) for x in c]
        else:
            arr = np.asarray(c, dtype=float)
            if not np.isfinite(arr).all():
                raise ValueError(f"non-finite coordinate for player {i + 1}")
        if len(arr) != game.strategy_counts[i] - 1:
            raise ValueError(
                f"player {i + 1} takes {game.strategy_counts[i] - 1} chart coordinates"
            )
        out.append(arr)
    return ChartPoint(chart, tuple(out))


def all_charts(game: FiniteGame) -> list[tuple[int, ...]]:
    """All chart labels, lexicographic; there are prod(n_i + 1) of them."""
    return [tuple(l) for l in itertools.product(*(range(c) for c in game.strategy_counts))]


def lift(point: ChartPoint) -> tuple[np.ndarray, ...]:
    """Per player the full tilde vector with entry 1 in the chart slot."""
    return point.full_vectors()


def read_chart(vectors, chart: tuple[int, ...]) -> ChartPoint:
    """Inverse of lift up to projective scaling: rescale each player's
    vector so the chart slot is 1, then drop that slot."""
    coords = []
    for i, (v, l) in enumerate(zip(vectors, chart)):
        v = np.asarray(v)
        d = v[l]
        if d == 0:
            raise ZeroDivisionError(
                f"player {i + 1}: coordinate {l} is zero; point is outside chart"
            )
        scaled = v * (1 / Fraction(d)) if v.dtype == object else v / d
        coords.append(np.delete(scaled, l))
    return ChartPoint(tuple(chart), tuple(coords))


def transition(point: ChartPoint, target) -> ChartPoint:
    """The same projective point read in another chart.

    Raises ZeroDivisionError when the point lies on a hyperplane
    tilde^i_{t_i} = 0 excluded from the target chart.
    """
    target = tuple(int(t) for t in target)
    if len(target) != point.num_players:
        raise ValueError("target chart has wrong length")
    return read_chart(lift(point), target)


def chart_zero_point(profile: MixedProfile) -> ChartPoint:
    """A mixed profile on the sum-to-one set, read in chart (0, ..., 0):
    the free coordinates are the weights with index >= 1."""
    coords = tuple(w[1:] for w in profile.weights)
    return ChartPoint((0,) * profile.num_players, coords)


def chart_excludes(chart: tuple[int, ...], h: Hypersurface) -> bool:
    """Whether the hypersurface misses the chart entirely."""
    if not isinstance(h, Coordinate):
        return False
    l = chart[h.player]
    if h.index == INF:
        return l == 0
    return h.index >= 1 and l == h.index


def excluded_hypersurfaces(game: FiniteGame, chart) -> list[Coordinate]:
    """The coordinate hyperplanes forming the chart's complement."""
    chart = _validate_chart(game, chart)
    out = []
    for i, l in enumerate(chart):
        out.append(Coordinate(i, INF if l == 0 else l))
    return out


def _validate_hypersurface(game: FiniteGame, h: Hypersurface) -> None:
    if not 0 <= h.player < game.num_players:
        raise ValueError(f"no player {h.player}")
    n = game.strategy_counts[h.player] - 1
    if isinstance(h, Coordinate):
        if h.index != INF and not 0 <= h.index <= n:
            raise ValueError(f"coordinate index {h.index} out of range")
    else:
        j, k = h.pair
        if k > n:
            raise ValueError(f"pair index {k} out of range")


def defining_map(game: FiniteGame, h: Hypersurface, chart) -> MultilinearForm:
    """Chart-local defining function, as a form ready for eval/grad.

    The returned form's blocks say which players' chart coordinates it
    reads; its pinned indices are the chart slots.
    """
    chart = _validate_chart(game, chart)
    _validate_hypersurface(game, h)
    if chart_excludes(chart, h):
        raise ChartExcludesHypersurface(
            f"{h} does not meet chart {','.join(map(str, chart))}"
        )
    i = h.player
    c_i = game.strategy_counts[i]
    rational = game.mode == RATIONAL

    def scalar(x):
        return Fraction(x) if rational else float(x)

    if isinstance(h, Coordinate):
        vec = np.empty(c_i, dtype=object) if rational else np.zeros(c_i)
        if rational:
            vec[:] = [Fraction(0)] * c_i
        if h.index == INF:
            vec[0] = scalar(1)
        elif h.index == 0:
            vec[0] = scalar(1)
            for j in range(1, c_i):
                vec[j] = scalar(-1)
        else:
            vec[int(h.index)] = scalar(1)
        return MultilinearForm((i,), vec, (chart[i],), owner=None)

    j, k = h.pair
    decomp = homogeneous_decomposition(game, i)
    coeffs = decomp.Lambdas[j].coeffs - decomp.Lambdas[k].coeffs
    blocks = tuple(b for b in range(game.num_players) if b != i)
    pinned = tuple(chart[b] for b in blocks)
    return MultilinearForm(blocks, coeffs, pinned, owner=i)


def on_hypersurface(
    game: FiniteGame, h: Hypersurface, point: ChartPoint, tol: float = MEMBERSHIP_TOL
) -> bool:
    """Membership test: |defining value| <= tol after normalizing the
    form by its largest coefficient. An identically zero form means the
    hypersurface degenerated to the whole space, so every point passes.
    """
    form = defining_map(game, h, point.chart)
    scale = form.max_abs_coeff()
    if scale == 0:
        return True
    value = form.eval([point.coords[b] for b in form.blocks])
    return abs(value) <= tol * scale


def format_chart(chart) -> str:
    return ",".join(str(int(l)) for l in chart)


def parse_chart(text: str, game: FiniteGame) -> tuple[int, ...]:
    try:
        chart = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad chart spec {text!r}: expected l1,l2,...") from None
    return _validate_chart(game, chart)


def parse_hypersurface(text: str, game: FiniteGame | None = None) -> Hypersurface:
    """Parse C:i:j / C:i:inf / D:i:j:k with 1-based player numbers."""
    parts = text.split(":")
    try:
        if parts[0] == "C" and len(parts) == 3:
            player = int(parts[1]) - 1
            idx = INF if parts[2] == "inf" else int(parts[2])
            h: Hypersurface = Coordinate(player, idx)
        elif parts[0] == "D" and len(parts) == 4:
            h = PayoffDiff(int(parts[1]) - 1, (int(parts[2]), int(parts[3])))
        else:
            raise ValueError
    except ValueError:
        raise ValueError(
            f"bad hypersurface {text!r}: expected C:i:j, C:i:inf, or D:i:j:k"
        ) from None
    if game is not None:
        _validate_hypersurface(game, h)
    return h
