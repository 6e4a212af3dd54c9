"""Multilinear payoff forms and their decompositions.

The frozen coefficient values below were derived by hand for matching
pennies: with y the opponent's weight on strategy 1, player 1's payoff
of pure 0 is kappa^1 = 1 - 2y and the slope of switching to pure 1 is
lambda^1_1 = -2 + 4y; homogenizing gives -2*g0 + 4*g1 in the tilde
basis.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashatlas import (
    RATIONAL,
    from_tilde_coordinates,
    homogeneous_decomposition,
    lambda_decomposition,
    make_game,
    payoff_form,
    payoff_slice_values,
    profile_from_weights,
    random_game,
    to_tilde_coordinates,
)

from conftest import fd_gradient, loop_payoff


def _tilde_matrix(c):
    """Row 0 sums the weights; the rest copy coordinates 1..n."""
    N = np.zeros((c, c))
    N[0, :] = 1
    for j in range(1, c):
        N[j, j] = 1
    return N


def _random_profiles(game, rng, count):
    return [
        [rng.dirichlet(np.ones(c)) for c in game.strategy_counts]
        for _ in range(count)
    ]


def test_mp_frozen_values(mp_float):
    dec = lambda_decomposition(mp_float, 0)
    np.testing.assert_allclose(dec.kappa.coeffs, [1.0, -2.0])
    np.testing.assert_allclose(dec.lambdas[0].coeffs, [0.0, 0.0])
    np.testing.assert_allclose(dec.lambdas[1].coeffs, [-2.0, 4.0])
    dec2 = lambda_decomposition(mp_float, 1)
    np.testing.assert_allclose(dec2.kappa.coeffs, [-1.0, 2.0])
    np.testing.assert_allclose(dec2.lambdas[1].coeffs, [2.0, -4.0])
    hom = homogeneous_decomposition(mp_float, 0)
    np.testing.assert_allclose(hom.K.coeffs, [1.0, -2.0])
    np.testing.assert_allclose(hom.Lambdas[1].coeffs, [-2.0, 4.0])


def test_mp_payoff_value(mp_float):
    form = payoff_form(mp_float, 0)
    w = [[0.3, 0.7], [0.6, 0.4]]
    assert form.eval(w) == pytest.approx(-0.08)


def test_eval_matches_loop_oracle():
    rng = np.random.default_rng(3)
    for shape in [(2, 2), (3, 3), (2, 2, 2), (2, 3, 2)]:
        game = random_game(shape, seed=17)
        for i in range(game.num_players):
            form = payoff_form(game, i)
            for w in _random_profiles(game, rng, 5):
                assert form.eval(w) == pytest.approx(
                    loop_payoff(game, i, w), rel=1e-12, abs=1e-12
                )


def test_eval_exact_rational(mp_exact):
    form = payoff_form(mp_exact, 0)
    w = [
        [Fraction(1, 3), Fraction(2, 3)],
        [Fraction(1, 7), Fraction(6, 7)],
    ]
    assert form.eval(w) == loop_payoff(mp_exact, 0, w)
    assert isinstance(form.eval(w), Fraction)


def test_affine_reconstruction():
    """V = kappa + sum_j w_j * lambda_j on sum-to-one profiles."""
    rng = np.random.default_rng(11)
    for shape in [(2, 2), (3, 3), (2, 2, 2), (2, 3, 2)]:
        game = random_game(shape, seed=23)
        for i in range(game.num_players):
            form = payoff_form(game, i)
            dec = lambda_decomposition(game, i)
            for w in _random_profiles(game, rng, 5):
                others = [w[t][1:] for t in dec.kappa.blocks]
                recon = dec.kappa.eval(others) + sum(
                    w[i][j] * dec.lambdas[j].eval(others)
                    for j in range(1, game.strategy_counts[i])
                )
                direct = form.eval(w)
                assert recon == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_homogeneous_reconstruction():
    """V = tilde_0 * K + sum_{j>=1} tilde_j * Lambda_j with tilde = N w
    per block: the own-axis change of basis already turns slice j into
    the difference against slice 0."""
    rng = np.random.default_rng(12)
    for shape in [(2, 2), (3, 3), (2, 2, 2), (2, 3, 2)]:
        game = random_game(shape, seed=29)
        mats = [_tilde_matrix(c) for c in game.strategy_counts]
        for i in range(game.num_players):
            form = payoff_form(game, i)
            hom = homogeneous_decomposition(game, i)
            for w in _random_profiles(game, rng, 5):
                tilde = [m @ np.asarray(wt) for m, wt in zip(mats, w)]
                others = [tilde[t] for t in hom.K.blocks]
                recon = tilde[i][0] * hom.K.eval(others) + sum(
                    tilde[i][j] * hom.Lambdas[j].eval(others)
                    for j in range(1, game.strategy_counts[i])
                )
                assert recon == pytest.approx(form.eval(w), rel=1e-12, abs=1e-12)


def test_two_decomposition_routes_agree():
    """The affine slopes are the homogeneous slopes with the sum slot
    pinned: identical coefficient tensors, different pinning."""
    game = random_game((2, 3, 2), seed=31)
    for i in range(game.num_players):
        dec = lambda_decomposition(game, i)
        hom = homogeneous_decomposition(game, i)
        np.testing.assert_array_equal(dec.kappa.coeffs, hom.K.coeffs)
        assert dec.kappa.pinned == (0,) * len(dec.kappa.blocks)
        assert hom.K.pinned == (None,) * len(hom.K.blocks)
        for lam, Lam in zip(dec.lambdas, hom.Lambdas):
            np.testing.assert_array_equal(lam.coeffs, Lam.coeffs)


def test_tilde_round_trip_exact():
    tables = [
        np.array([[Fraction(1, 3), Fraction(2)], [Fraction(0), Fraction(-1, 7)]],
                 dtype=object),
        np.array([[Fraction(1), Fraction(5, 2)], [Fraction(0), Fraction(2)]],
                 dtype=object),
    ]
    game = make_game((2, 2), tables, mode=RATIONAL)
    form = payoff_form(game, 0)
    back = from_tilde_coordinates(to_tilde_coordinates(form))
    assert np.array_equal(back.coeffs, form.coeffs)


def test_tilde_eval_consistency():
    game = random_game((2, 3), seed=37)
    form = payoff_form(game, 0)
    tilde_form = to_tilde_coordinates(form)
    mats = [_tilde_matrix(c) for c in game.strategy_counts]
    rng = np.random.default_rng(5)
    for w in _random_profiles(game, rng, 10):
        tilde = [m @ np.asarray(wt) for m, wt in zip(mats, w)]
        assert tilde_form.eval(tilde) == pytest.approx(form.eval(w), rel=1e-12)


def test_tilde_rejects_pinned_forms(mp_float):
    dec = lambda_decomposition(mp_float, 0)
    with pytest.raises(ValueError):
        to_tilde_coordinates(dec.kappa)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    game = random_game((2, 3, 2), seed=41)
    forms = [payoff_form(game, i) for i in range(3)]
    dec = lambda_decomposition(game, 1)
    forms.extend([dec.kappa, *dec.lambdas[1:]])
    hom = homogeneous_decomposition(game, 2)
    forms.extend([hom.K, *hom.Lambdas[1:]])
    for form in forms:
        points = [
            rng.normal(size=form.input_length(t))
            for t in range(len(form.blocks))
        ]
        for block in form.blocks:
            analytic = form.grad(points, block)
            numeric = fd_gradient(form, points, block)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-7)


def test_grad_rejects_missing_block(mp_float):
    dec = lambda_decomposition(mp_float, 0)
    with pytest.raises(ValueError):
        dec.kappa.grad([[0.5]], 0)


def test_eval_batch_matches_eval():
    game = random_game((2, 3, 2), seed=43)
    form = payoff_form(game, 1)
    rng = np.random.default_rng(9)
    mats = [
        rng.normal(size=(20, form.input_length(t)))
        for t in range(len(form.blocks))
    ]
    batch = form.eval_batch(mats)
    for k in range(20):
        assert batch[k] == pytest.approx(form.eval([m[k] for m in mats]))


def test_lift_input_and_lengths():
    game = random_game((3, 2), seed=47)
    dec = lambda_decomposition(game, 0)
    form = dec.kappa
    assert form.blocks == (1,)
    assert form.input_length(0) == 1
    lifted = form.lift_input(0, [0.25])
    np.testing.assert_array_equal(lifted, [1.0, 0.25])


def test_payoff_slice_values_match_pure_payoffs():
    game = random_game((3, 2, 2), seed=53)
    rng = np.random.default_rng(13)
    w = [rng.dirichlet(np.ones(c)) for c in game.strategy_counts]
    slices = payoff_slice_values(game, 0, w)
    for j in range(3):
        pure = [np.eye(3)[j], w[1], w[2]]
        assert slices[j] == pytest.approx(loop_payoff(game, 0, pure))


def test_payoff_slice_values_exact(mp_exact):
    w = [
        [Fraction(1, 2), Fraction(1, 2)],
        [Fraction(1, 3), Fraction(2, 3)],
    ]
    vals = payoff_slice_values(mp_exact, 0, w)
    assert vals[0] == Fraction(-1, 3)
    assert vals[1] == Fraction(1, 3)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10**6),
    alpha=st.floats(-2, 2, allow_nan=False),
    beta=st.floats(-2, 2, allow_nan=False),
)
def test_eval_linear_in_each_block(seed, alpha, beta):
    game = random_game((2, 3), seed=7)
    form = payoff_form(game, 0)
    rng = np.random.default_rng(seed)
    u = [rng.normal(size=2), rng.normal(size=3)]
    v = rng.normal(size=3)
    mixed = form.eval([u[0], alpha * u[1] + beta * v])
    split = alpha * form.eval([u[0], u[1]]) + beta * form.eval([u[0], v])
    assert mixed == pytest.approx(split, rel=1e-9, abs=1e-9)
