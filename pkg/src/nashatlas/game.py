"""Finite games in normal form and mixed strategy profiles.

A game holds one dense payoff tensor per player, indexed by the pure
strategy combination (j_1, ..., j_m) with j_k in {0, ..., n_k}. Two
numeric modes exist: "float" (float64 tensors) and "rational"
(object tensors of ``fractions.Fraction``), fixed at construction.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT = "float"
RATIONAL = "rational"

#: Entries with |weight| at or below this count as zero in float mode.
DEFAULT_ZERO_TOL = 1e-9


class GameFormatError(ValueError):
    """Raised on malformed game files; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FiniteGame:
    """A finite m-player game in normal form.

    strategy_counts[i] is the number of pure strategies of player i
    (so n_i + 1), each at least 2. utilities[i] has shape
    strategy_counts, stored row-major with the last player's index
    varying fastest.
    """

    strategy_counts: tuple[int, ...]
    utilities: tuple[np.ndarray, ...]
    mode: str = FLOAT
    labels: tuple[tuple[str, ...], ...] | None = None

    @property
    def num_players(self) -> int:
        return len(self.strategy_counts)

    @property
    def zero_tol(self) -> float:
        return 0.0 if self.mode == RATIONAL else DEFAULT_ZERO_TOL

    def payoff_dtype(self):
        return object if self.mode == RATIONAL else np.float64


@dataclass(frozen=True)
class MixedProfile:
    """One weight vector per player; on A the weights sum to 1."""

    weights: tuple[np.ndarray, ...]

    @property
    def num_players(self) -> int:
        return len(self.weights)

    def as_floats(self) -> tuple[np.ndarray, ...]:
        return tuple(np.asarray(w, dtype=float) for w in self.weights)

    def in_A(self, tol: float = 1e-12) -> bool:
        for w in self.as_floats():
            if abs(w.sum() - 1.0) > tol:
                return False
        return True

    def in_G(self, tol: float = 1e-12) -> bool:
        if not self.in_A(tol):
            return False
        return all((w >= -tol).all() and (w <= 1 + tol).all() for w in self.as_floats())


@dataclass(frozen=True)
class SupportProfile:
    """Per player, the sorted indices of strategies used with nonzero weight."""

    supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for supp in self.supports:
            if not supp:
                raise ValueError("supports must be nonempty")
            if tuple(sorted(set(supp))) != supp:
                raise ValueError("supports must be sorted and duplicate-free")

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.supports)


def make_game(
    strategy_counts,
    utilities,
    mode: str = FLOAT,
    labels=None,
) -> FiniteGame:
    """Validate shapes and entries and build a FiniteGame.

    utilities may be nested sequences or arrays; entries are coerced to
    float64 or Fraction according to mode.
    """
    counts = tuple(int(c) for c in strategy_counts)
    if len(counts) < 1:
        raise ValueError("need at least one player")
    if any(c < 2 for c in counts):
        raise ValueError("each player needs at least 2 pure strategies (n_i >= 1)")
    if mode not in (FLOAT, RATIONAL):
        raise ValueError(f"unknown mode {mode!r}")
    utilities = list(utilities)
    if len(utilities) != len(counts):
        raise ValueError(
            f"expected {len(counts)} utility tensors, got {len(utilities)}"
        )
    tensors = []
    for i, u in enumerate(utilities):
        if mode == RATIONAL:
            arr = np.empty(counts, dtype=object)
            flat = np.asarray(u, dtype=object).reshape(-1)
            if flat.size != arr.size:
                raise ValueError(
                    f"utility tensor {i} has {flat.size} entries, expected {arr.size}"
                )
            arr.reshape(-1)[:] = [_as_fraction(x) for x in flat]
        else:
            arr = np.asarray(u, dtype=float)
            if arr.shape != counts:
                if arr.size == int(np.prod(counts)):
                    arr = arr.reshape(counts)
                else:
                    raise ValueError(
                        f"utility tensor {i} has shape {arr.shape}, expected {counts}"
                    )
            if not np.isfinite(arr).all():
                raise ValueError(f"utility tensor {i} contains non-finite entries")
        tensors.append(arr)
    if labels is not None:
        labels = tuple(tuple(str(x) for x in lab) for lab in labels)
        for c, lab in zip(counts, labels):
            if len(lab) != c:
                raise ValueError("label count does not match strategy count")
    return FiniteGame(counts, tuple(tensors), mode=mode, labels=labels)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to Fraction")


def profile_from_weights(weights, mode: str = FLOAT) -> MixedProfile:
    """Build a MixedProfile from per-player weight sequences."""
    out = []
    for w in weights:
        if mode == RATIONAL:
            arr = np.empty(len(w), dtype=object)
            arr[:] = [_as_fraction(x) for x in w]
        else:
            arr = np.asarray(w, dtype=float)
        out.append(arr)
    return MixedProfile(tuple(out))


def support_of(profile: MixedProfile, zero_tol: float = DEFAULT_ZERO_TOL) -> SupportProfile:
    """Indices with |weight| > zero_tol, per player.

    Rational profiles are compared exactly (pass zero_tol=0).
    """
    supports = []
    for w in profile.weights:
        if w.dtype == object:
            supp = tuple(j for j, x in enumerate(w) if x != 0) if zero_tol == 0 else tuple(
                j for j, x in enumerate(w) if abs(x) > zero_tol
            )
        else:
            supp = tuple(int(j) for j in np.nonzero(np.abs(w) > zero_tol)[0])
        if not supp:
            raise ValueError("profile has an all-zero weight vector")
        supports.append(supp)
    return SupportProfile(tuple(supports))


def random_game(strategy_counts, seed: int, distribution: str = "uniform") -> FiniteGame:
    """Seeded random game with i.i.d. entries, float mode.

    distribution: "uniform" for uniform[-1, 1], "normal" for standard normal.
    """
    counts = tuple(int(c) for c in strategy_counts)
    rng = np.random.default_rng(seed)
    tensors = []
    for _ in counts:
        if distribution == "uniform":
            t = rng.uniform(-1.0, 1.0, size=counts)
        elif distribution == "normal":
            t = rng.standard_normal(size=counts)
        else:
            raise ValueError(f"unknown distribution {distribution!r}")
        tensors.append(t)
    return make_game(counts, tensors, mode=FLOAT)


# ---------------------------------------------------------------------------
# Game file format
#
#   # comments run to end of line
#   players m
#   strategies c_1 ... c_m
#   payoff 1
#   <c_1 * ... * c_m numbers, row-major, last player's index fastest>
#   ...
#   payoff m
#   <numbers>
#
# Numbers are decimals or rationals p/q. A file containing any p/q token
# is parsed in rational mode, otherwise in float mode.
# ---------------------------------------------------------------------------


def _tokenize(text: str):
    """Yield (token, line_number) with comments stripped."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for tok in body.split():
            yield tok, lineno


def parse_game(text: str, mode: str | None = None) -> FiniteGame:
    """Parse the game file format; mode None means infer from the tokens."""
    tokens = list(_tokenize(text))
    pos = 0

    def need(what: str) -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            last_line = tokens[-1][1] if tokens else 1
            raise GameFormatError(f"unexpected end of file, expected {what}", last_line)
        tok = tokens[pos]
        pos += 1
        return tok

    tok, line = need("'players'")
    if tok != "players":
        raise GameFormatError(f"expected 'players', got {tok!r}", line)
    tok, line = need("player count")
    try:
        m = int(tok)
    except ValueError:
        raise GameFormatError(f"bad player count {tok!r}", line) from None
    if m < 1:
        raise GameFormatError("player count must be >= 1", line)

    tok, line = need("'strategies'")
    if tok != "strategies":
        raise GameFormatError(f"expected 'strategies', got {tok!r}", line)
    counts = []
    for _ in range(m):
        tok, line = need("strategy count")
        try:
            counts.append(int(tok))
        except ValueError:
            raise GameFormatError(f"bad strategy count {tok!r}", line) from None
    total = 1
    for c in counts:
        total *= c

    if mode is None:
        mode = RATIONAL if any("/" in t for t, _ in tokens[pos:]) else FLOAT

    tensors = []
    for i in range(1, m + 1):
        tok, line = need("'payoff'")
        if tok != "payoff":
            raise GameFormatError(f"expected 'payoff', got {tok!r}", line)
        tok, line = need("payoff player index")
        if tok != str(i):
            raise GameFormatError(f"expected payoff block for player {i}, got {tok!r}", line)
        entries = []
        for _ in range(total):
            tok, line = need("payoff entry")
            try:
                if mode == RATIONAL:
                    entries.append(Fraction(tok))
                else:
                    entries.append(float(Fraction(tok)) if "/" in tok else float(tok))
            except (ValueError, ZeroDivisionError):
                raise GameFormatError(f"bad number {tok!r}", line) from None
        tensors.append(entries)
    if pos != len(tokens):
        tok, line = tokens[pos]
        raise GameFormatError(f"trailing content {tok!r}", line)
    try:
        return make_game(counts, tensors, mode=mode)
    except ValueError as e:
        raise GameFormatError(str(e)) from e


def serialize_game(game: FiniteGame) -> str:
    """Inverse of parse_game; round-trips exactly in either mode."""
    out = io.StringIO()
    out.write(f"players {game.num_players}\n")
    out.write("strategies " + " ".join(str(c) for c in game.strategy_counts) + "\n")
    for i, tensor in enumerate(game.utilities, start=1):
        out.write(f"payoff {i}\n")
        flat = tensor.reshape(-1)
        if game.mode == RATIONAL:
            row = [str(x) for x in flat]
        else:
            row = [repr(float(x)) for x in flat]
        # One line per slice of the last axis keeps files readable.
        width = game.strategy_counts[-1]
        for start in range(0, len(row), width):
            out.write(" ".join(row[start : start + width]) + "\n")
    return out.getvalue()
