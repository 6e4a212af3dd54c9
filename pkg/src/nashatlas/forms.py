"""Multilinear and multi-affine-linear payoff algebra.

A form is a dense coefficient tensor with one axis per participating
player block. Evaluation contracts each axis with that block's
coordinate vector. A block may be "pinned": one of its coordinates is
fixed to 1 and the caller supplies only the remaining entries. Pinning
index 0 turns a homogeneous tensor into a multi-affine-linear
polynomial (index 0 acts as the constant slot); pinning index l is
exactly composition with the chart embedding that sets the l-th
homogeneous coordinate to 1.

The payoff of player i is a homogeneous form in all m blocks. Its
decomposition into an own-weight-free part plus own-weight multiples
(both on the strategy simplex product and on the homogenized space)
comes out of one basis change per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .game import RATIONAL, FiniteGame


@dataclass(frozen=True)
class MultilinearForm:
    """Dense coefficient tensor over one axis per participating block.

    blocks: ascending player indices (0-based) the form depends on.
    pinned: per block, the coordinate index fixed to 1, or None for a
        homogeneous block. A pinned block of full size s takes input
        vectors of length s - 1.
    owner: the player whose payoff the form came from, if any.
    """

    blocks: tuple[int, ...]
    coeffs: np.ndarray
    pinned: tuple[int | None, ...] = ()
    owner: int | None = None

    def __post_init__(self):
        if not self.pinned:
            object.__setattr__(self, "pinned", (None,) * len(self.blocks))
        if len(self.blocks) != self.coeffs.ndim or len(self.pinned) != self.coeffs.ndim:
            raise ValueError("blocks/pinned must match tensor rank")

    @property
    def is_rational(self) -> bool:
        return self.coeffs.dtype == object

    def input_length(self, t: int) -> int:
        """Expected vector length for the t-th participating block."""
        full = self.coeffs.shape[t]
        return full if self.pinned[t] is None else full - 1

    def lift_input(self, t: int, vec) -> np.ndarray:
        """Insert the pinned 1 into a block's input vector."""
        vec = _coerce_vector(vec, self.is_rational)
        p = self.pinned[t]
        if p is None:
            return vec
        one = Fraction(1) if self.is_rational else 1.0
        return np.insert(vec, p, one)

    def max_abs_coeff(self):
        flat = self.coeffs.reshape(-1)
        if flat.size == 0:
            return 0.0
        if self.is_rational:
            return max(abs(x) for x in flat)
        return float(np.max(np.abs(flat)))

    def eval(self, points) -> float | Fraction:
        """Evaluate at one coordinate vector per participating block."""
        if len(points) != len(self.blocks):
            raise ValueError(
                f"form takes {len(self.blocks)} block vectors, got {len(points)}"
            )
        t = self.coeffs
        for k in range(len(self.blocks) - 1, -1, -1):
            vec = self.lift_input(k, points[k])
            if len(vec) != t.shape[k]:
                raise ValueError(
                    f"block {self.blocks[k]}: expected length {self.input_length(k)}"
                )
            t = np.tensordot(t, vec, axes=([k], [0]))
        return t.item() if isinstance(t, np.ndarray) else t

    def grad(self, points, block: int) -> np.ndarray:
        """Gradient with respect to one block's (free) coordinates.

        Exact contraction over all other blocks; for a pinned block the
        pinned slot is dropped from the result.
        """
        if block not in self.blocks:
            raise ValueError(f"form does not depend on block {block}")
        pos = self.blocks.index(block)
        t = self.coeffs
        for k in range(len(self.blocks) - 1, -1, -1):
            if k == pos:
                continue
            vec = self.lift_input(k, points[k])
            if len(vec) != t.shape[k]:
                raise ValueError(
                    f"block {self.blocks[k]}: expected length {self.input_length(k)}"
                )
            t = np.tensordot(t, vec, axes=([k], [0]))
        if self.pinned[pos] is not None:
            t = np.delete(t, self.pinned[pos])
        return t

    def eval_batch(self, mats) -> np.ndarray:
        """Vectorized float evaluation: mats[t] has shape (B, input_length(t))."""
        letters = "abcdefghij"
        subs = letters[: len(self.blocks)]
        lifted = []
        for k, mat in enumerate(mats):
            mat = np.asarray(mat, dtype=float)
            p = self.pinned[k]
            if p is not None:
                mat = np.insert(mat, p, 1.0, axis=1)
            lifted.append(mat)
        spec = subs + "," + ",".join("z" + c for c in subs) + "->z"
        return np.einsum(spec, np.asarray(self.coeffs, dtype=float), *lifted)


def _coerce_vector(vec, rational: bool) -> np.ndarray:
    if isinstance(vec, np.ndarray) and (vec.dtype == object) == rational:
        return vec
    if rational:
        out = np.empty(len(vec), dtype=object)
        out[:] = [x if isinstance(x, Fraction) else Fraction(x) for x in vec]
        return out
    return np.asarray(vec, dtype=float)


def zero_form(game: FiniteGame, blocks: tuple[int, ...], pinned=None, owner=None) -> MultilinearForm:
    shape = tuple(game.strategy_counts[b] for b in blocks)
    if game.mode == RATIONAL:
        coeffs = np.empty(shape, dtype=object)
        coeffs.reshape(-1)[:] = [Fraction(0)] * coeffs.size
    else:
        coeffs = np.zeros(shape)
    return MultilinearForm(blocks, coeffs, pinned or (None,) * len(blocks), owner)


def payoff_form(game: FiniteGame, i: int) -> MultilinearForm:
    """Player i's payoff as a homogeneous form in all blocks (the
    multilinear extension of the pure payoff tensor)."""
    if not 0 <= i < game.num_players:
        raise ValueError(f"no player {i}")
    return MultilinearForm(
        tuple(range(game.num_players)), game.utilities[i].copy(), owner=i
    )


# Basis change between the natural weights gamma and the homogenized
# coordinates tilde(gamma): tilde_0 = sum_j gamma_j, tilde_j = gamma_j.
# gamma = M tilde with M row 0 = (1, -1, ..., -1), row j = e_j.


def _gamma_from_tilde_matrix(size: int, rational: bool) -> np.ndarray:
    if rational:
        m = np.empty((size, size), dtype=object)
        m.reshape(-1)[:] = [Fraction(0)] * size * size
        m[0, 0] = Fraction(1)
        for j in range(1, size):
            m[0, j] = Fraction(-1)
            m[j, j] = Fraction(1)
        return m
    m = np.eye(size)
    m[0, 1:] = -1.0
    return m


def _tilde_from_gamma_matrix(size: int, rational: bool) -> np.ndarray:
    if rational:
        m = np.empty((size, size), dtype=object)
        m.reshape(-1)[:] = [Fraction(0)] * size * size
        for j in range(size):
            m[0, j] = Fraction(1)
            if j:
                m[j, j] = Fraction(1)
        return m
    m = np.eye(size)
    m[0, :] = 1.0
    return m


def _contract_axis(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(tensor, matrix, axes=([axis], [0]))
    return np.moveaxis(out, -1, axis)


def to_tilde_coordinates(form: MultilinearForm) -> MultilinearForm:
    """Coefficients of the same polynomial in homogenized coordinates."""
    if any(p is not None for p in form.pinned):
        raise ValueError("basis change applies to homogeneous forms only")
    t = form.coeffs
    for axis in range(t.ndim):
        m = _gamma_from_tilde_matrix(t.shape[axis], form.is_rational)
        t = _contract_axis(t, m, axis)
    return MultilinearForm(form.blocks, t, form.pinned, form.owner)


def from_tilde_coordinates(form: MultilinearForm) -> MultilinearForm:
    """Inverse of to_tilde_coordinates."""
    if any(p is not None for p in form.pinned):
        raise ValueError("basis change applies to homogeneous forms only")
    t = form.coeffs
    for axis in range(t.ndim):
        m = _tilde_from_gamma_matrix(t.shape[axis], form.is_rational)
        t = _contract_axis(t, m, axis)
    return MultilinearForm(form.blocks, t, form.pinned, form.owner)


@dataclass(frozen=True)
class LambdaDecomposition:
    """Payoff of player i on the simplex product, split as
    kappa(others) + sum_j own_weight_j * lambda_j(others), with
    lambda_0 identically zero. All parts are multi-affine-linear in
    the opponents' free weights (index 0 of each block is the constant
    slot, pinned to 1)."""

    player: int
    kappa: MultilinearForm
    lambdas: tuple[MultilinearForm, ...]


@dataclass(frozen=True)
class HomogeneousDecomposition:
    """Same split in homogenized coordinates: payoff =
    tilde_0 * K(others) + sum_j tilde_j * Lambda_j(others), with
    Lambda_0 identically zero and every part homogeneous."""

    player: int
    K: MultilinearForm
    Lambdas: tuple[MultilinearForm, ...]


def _other_blocks(game: FiniteGame, i: int) -> tuple[int, ...]:
    return tuple(k for k in range(game.num_players) if k != i)


def lambda_decomposition(game: FiniteGame, i: int) -> LambdaDecomposition:
    """Split player i's payoff on the simplex product.

    Works on own-index slices of the payoff tensor: slice j minus slice 0
    is the coefficient of the j-th own weight once every opponent block is
    restricted to its affine chart (weight 0 eliminated by the sum rule).
    """
    if not 0 <= i < game.num_players:
        raise ValueError(f"no player {i}")
    u = game.utilities[i]
    others = _other_blocks(game, i)
    rational = game.mode == RATIONAL

    def restrict(slice_tensor: np.ndarray) -> MultilinearForm:
        t = slice_tensor
        for axis, k in enumerate(others):
            m = _gamma_from_tilde_matrix(game.strategy_counts[k], rational)
            t = _contract_axis(t, m, axis)
        return MultilinearForm(others, t, (0,) * len(others), owner=i)

    own = [np.take(u, j, axis=i) for j in range(game.strategy_counts[i])]
    kappa = restrict(own[0])
    lambdas = [zero_form(game, others, (0,) * len(others), owner=i)]
    for j in range(1, game.strategy_counts[i]):
        lambdas.append(restrict(own[j] - own[0]))
    return LambdaDecomposition(i, kappa, tuple(lambdas))


def homogeneous_decomposition(game: FiniteGame, i: int) -> HomogeneousDecomposition:
    """Own-index slices of the homogenized payoff tensor: slice 0 is K,
    slice j >= 1 is Lambda_j."""
    tilde = to_tilde_coordinates(payoff_form(game, i))
    others = _other_blocks(game, i)
    slices = [np.take(tilde.coeffs, j, axis=i) for j in range(game.strategy_counts[i])]
    K = MultilinearForm(others, slices[0], owner=i)
    Lambdas = [zero_form(game, others, owner=i)]
    for j in range(1, game.strategy_counts[i]):
        Lambdas.append(MultilinearForm(others, slices[j], owner=i))
    return HomogeneousDecomposition(i, K, tuple(Lambdas))


def payoff_slice_values(game: FiniteGame, i: int, weights) -> np.ndarray:
    """Vector over player i's own strategies: entry j is the payoff of
    playing pure strategy j against the others' mixed weights.

    Differences of entries are exactly the lambda differences that the
    best-reply conditions compare, for profiles on the sum-to-one set.
    """
    rational = game.mode == RATIONAL and not any(
        isinstance(x, (float, np.floating)) for w in weights for x in w
    )
    t = game.utilities[i]
    if not rational and t.dtype == object:
        t = np.asarray([float(x) for x in t.reshape(-1)]).reshape(t.shape)
    for k in range(game.num_players - 1, -1, -1):
        if k == i:
            continue
        vec = _coerce_vector(weights[k], rational)
        t = np.tensordot(t, vec, axes=([k], [0]))
    return t
