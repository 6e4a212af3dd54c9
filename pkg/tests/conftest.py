"""Shared fixtures and independently coded oracles.

The oracles here deliberately avoid the library's own numerical
routines: payoffs are evaluated by explicit loops over pure profiles,
the two-player enumerator runs its own Gaussian elimination over
Fractions, and gradients come from central finite differences.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from nashatlas import FLOAT, RATIONAL, make_game

MP_PAYOFFS = [[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]]
BOS_PAYOFFS = [[[2, 0], [0, 1]], [[1, 0], [0, 2]]]
DUP_ROW_PAYOFFS = [[[1, 2], [1, 2]], [[3, 4], [5, 6]]]


def _float_game(shape, payoffs):
    return make_game(shape, [np.array(u, dtype=float) for u in payoffs])


def _exact_game(shape, payoffs):
    tables = [
        np.array(
            [[Fraction(x) for x in row] for row in u], dtype=object
        )
        for u in payoffs
    ]
    return make_game(shape, tables, mode=RATIONAL)


@pytest.fixture
def mp_float():
    """Matching pennies, float payoffs."""
    return _float_game((2, 2), MP_PAYOFFS)


@pytest.fixture
def mp_exact():
    return _exact_game((2, 2), MP_PAYOFFS)


@pytest.fixture
def bos_exact():
    """Battle of the sexes: two pure equilibria and one mixed."""
    return _exact_game((2, 2), BOS_PAYOFFS)


@pytest.fixture
def zero_game():
    return _float_game((2, 2), [[[0, 0], [0, 0]], [[0, 0], [0, 0]]])


@pytest.fixture
def dup_row_game():
    """Player 1 indifferent between identical rows: equilibria form a
    segment {((t, 1-t), (0, 1))}."""
    return _float_game((2, 2), DUP_ROW_PAYOFFS)


@pytest.fixture
def cyclic_mp3():
    """Three players, each playing matching pennies against the next.

    Exactly three equilibria: both all-same pure profiles and the
    uniform mixed profile.
    """
    mp = np.array([[1.0, -1.0], [-1.0, 1.0]])
    U = [np.zeros((2, 2, 2)) for _ in range(3)]
    for a, b, c in itertools.product(range(2), repeat=3):
        U[0][a, b, c] = mp[a, b]
        U[1][a, b, c] = mp[b, c]
        U[2][a, b, c] = mp[c, a]
    return make_game((2, 2, 2), U)


def loop_payoff(game, player, weights):
    """Expected payoff by explicit summation over pure profiles."""
    total = 0
    table = game.utilities[player]
    for idx in itertools.product(*(range(c) for c in game.strategy_counts)):
        prob = 1
        for t, j in enumerate(idx):
            prob = prob * weights[t][j]
        total = total + table[idx] * prob
    return total


def fd_gradient(form, points, block, step=1e-6):
    """Central finite differences of a form in one block's coordinates."""
    pos = form.blocks.index(block)
    base = [np.asarray(p, dtype=float) for p in points]
    out = np.zeros(len(base[pos]))
    for k in range(len(base[pos])):
        hi = [p.copy() for p in base]
        lo = [p.copy() for p in base]
        hi[pos][k] += step
        lo[pos][k] -= step
        out[k] = (form.eval(hi) - form.eval(lo)) / (2 * step)
    return out


def _eliminate(rows, rhs):
    """Gauss-Jordan over Fractions.

    Returns (solution, underdetermined): solution is None when the
    system is inconsistent or underdetermined; underdetermined is True
    when it is consistent with free variables remaining.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, len(aug)) if aug[k][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for k in range(len(aug)):
            if k != r and aug[k][c] != 0:
                f = aug[k][c]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    for k in range(r, len(aug)):
        if all(x == 0 for x in aug[k][:n]) and aug[k][n] != 0:
            return None, False
    if len(pivots) < n:
        return None, True
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = aug[i][n]
    return sol, False


def _frac_matrix(table):
    return [
        [x if isinstance(x, Fraction) else Fraction(float(x)) for x in row]
        for row in np.asarray(table).tolist()
    ]


def _opponent_weights(payoff, own_support, opp_support):
    """Solve for opponent weights on opp_support that make every
    strategy in own_support yield the same payoff; payoff[j][t] is the
    solving player's payoff of own pure j against opponent pure t.
    """
    base = own_support[0]
    rows = [
        [payoff[j][t] - payoff[base][t] for t in opp_support]
        for j in own_support[1:]
    ]
    rhs = [Fraction(0)] * len(rows)
    rows.append([Fraction(1)] * len(opp_support))
    rhs.append(Fraction(1))
    return _eliminate(rows, rhs)


def oracle_enumerate_2p(game):
    """Independent two-player support enumeration.

    Returns (equilibria, degenerate) where equilibria is a sorted list
    of ((x...), (y...)) Fraction tuples and degenerate reports whether
    any support produced a consistent underdetermined system.
    """
    c1, c2 = game.strategy_counts
    A = _frac_matrix(game.utilities[0])
    Bt = [list(col) for col in zip(*_frac_matrix(game.utilities[1]))]
    found = set()
    degenerate = False
    for r1 in range(1, c1 + 1):
        for s1 in itertools.combinations(range(c1), r1):
            for r2 in range(1, c2 + 1):
                for s2 in itertools.combinations(range(c2), r2):
                    y, under_y = _opponent_weights(A, s1, s2)
                    x, under_x = _opponent_weights(Bt, s2, s1)
                    if (y is None and not under_y) or (x is None and not under_x):
                        continue
                    if under_y or under_x:
                        degenerate = True
                        continue
                    if any(v <= 0 for v in x) or any(v <= 0 for v in y):
                        continue
                    xf = [Fraction(0)] * c1
                    yf = [Fraction(0)] * c2
                    for i, s in enumerate(s1):
                        xf[s] = x[i]
                    for i, t in enumerate(s2):
                        yf[t] = y[i]
                    p1 = [sum(A[j][t] * yf[t] for t in range(c2)) for j in range(c1)]
                    v1 = sum(xf[j] * p1[j] for j in range(c1))
                    p2 = [sum(Bt[k][s] * xf[s] for s in range(c1)) for k in range(c2)]
                    v2 = sum(yf[k] * p2[k] for k in range(c2))
                    if all(p <= v1 for p in p1) and all(p <= v2 for p in p2):
                        found.add((tuple(xf), tuple(yf)))
    return sorted(found), degenerate
