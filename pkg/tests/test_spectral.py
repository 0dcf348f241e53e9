import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eit_mimic import (
    TrigCoeffs,
    delta_coeffs,
    evaluate,
    project_mean_free,
    project_PM,
    sobolev_inner,
    sobolev_norm,
    sobolev_weights,
)
from conftest import random_poly

TWO_PI = 2 * np.pi


def test_delta_at_zero():
    g = delta_coeffs(0.0, 2)
    np.testing.assert_allclose(g.coeffs, np.full(5, 1 / TWO_PI), rtol=0, atol=1e-16)


def test_delta_at_pi():
    g = delta_coeffs(np.pi, 1)
    assert g[1] == pytest.approx(-1 / TWO_PI, abs=1e-16)
    assert g[-1] == pytest.approx(-1 / TWO_PI, abs=1e-16)
    assert g[0] == pytest.approx(1 / TWO_PI)


def test_delta_at_half_pi():
    g = delta_coeffs(np.pi / 2, 1)
    assert g[1] == pytest.approx(-1j / TWO_PI, abs=1e-16)
    assert g[-1] == pytest.approx(1j / TWO_PI, abs=1e-16)


def test_delta_angle_is_normalized():
    np.testing.assert_allclose(delta_coeffs(0.3 + 4 * np.pi, 5).coeffs, delta_coeffs(0.3, 5).coeffs,
                               atol=1e-15)


def test_delta_rejects_negative_order():
    with pytest.raises(ValueError):
        delta_coeffs(0.0, -1)


@pytest.mark.parametrize("n", [1, -2, 5])
@pytest.mark.parametrize("s", [-1.0, 0.0, 0.5, 2.0])
def test_monomial_norm(n, s):
    assert sobolev_norm(TrigCoeffs.monomial(n), s) == pytest.approx(math.sqrt(TWO_PI) * abs(n) ** s,
                                                                    rel=1e-14)


def test_norm_of_zero():
    assert sobolev_norm(TrigCoeffs.zeros(4), 3.0) == 0.0


def test_norm_f2_s15():
    # sqrt(2 pi) * 2**1.5
    assert sobolev_norm(TrigCoeffs.monomial(2), 1.5) == pytest.approx(7.0898, abs=5e-5)


def test_weights_at_zero_mode_are_one():
    w = sobolev_weights(3, -2.5)
    assert w[3] == 1.0 and w[2] == 1.0 and w[4] == 1.0


def test_inner_examples():
    f1, f2 = TrigCoeffs.monomial(1), TrigCoeffs.monomial(2)
    assert sobolev_inner(f1, f2, 1.3) == 0
    assert sobolev_inner(f2, f2, 1.5) == pytest.approx(TWO_PI * 2 ** 3)
    assert sobolev_inner(f1 + f2, f2, 0.0) == pytest.approx(TWO_PI)


@given(st.integers(-20, 20), st.integers(-20, 20), st.sampled_from([-2.0, -0.5, 0.0, 1.0, 2.5]))
def test_orthogonality(n, m, s):
    val = sobolev_inner(TrigCoeffs.monomial(n, 20), TrigCoeffs.monomial(m, 20), s)
    expected = TWO_PI * max(1, abs(n)) ** (2 * s) if n == m else 0.0
    # the weights go through exp(2s log n), whose rounding is amplified by |2s log n|
    ulps = 4 * (1 + abs(2 * s * np.log(max(1, abs(n)))))
    assert abs(val - expected) <= ulps * np.finfo(float).eps * max(1.0, expected)


@given(st.integers(0, 12), st.integers(0, 2 ** 32 - 1))
def test_parseval_against_trapezoid(N, seed):
    rng = np.random.default_rng(seed)
    f, g = random_poly(rng, N), random_poly(rng, N)
    K = 4 * N + 5
    theta = TWO_PI * np.arange(K) / K
    quad = TWO_PI / K * np.sum(evaluate(f, theta) * np.conj(evaluate(g, theta)))
    exact = sobolev_inner(f, g, 0.0)
    assert abs(quad - exact) <= 1e-12 * max(1.0, abs(exact))


def test_project_PM_examples():
    g = TrigCoeffs.from_dict({-2: 1.0, 1: 2j})
    assert np.array_equal(project_PM(g, 2).coeffs, g.coeffs)
    assert sobolev_norm(project_PM(TrigCoeffs.monomial(4), 3), 0) == 0
    with pytest.raises(ValueError):
        project_PM(g, -1)


@pytest.mark.parametrize("s,t", [(2, 0), (1, 1), (3, -1)])
def test_projection_norm_equality_attained(s, t):
    for M in range(1, 33):
        f = TrigCoeffs.monomial(M + 1)
        tail = TrigCoeffs(f.coeffs - project_PM(f, M).padded(f.N).coeffs)
        ratio = sobolev_norm(tail, t) / sobolev_norm(f, s)
        assert ratio == pytest.approx((M + 1.0) ** (t - s), rel=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 8), st.integers(0, 10))
def test_projections_idempotent_and_commute(seed, N, M):
    g = random_poly(np.random.default_rng(seed), N)
    pm = project_PM(g, M)
    assert np.array_equal(project_PM(pm, M).coeffs, pm.coeffs)
    z = project_mean_free(g)
    assert np.array_equal(project_mean_free(z).coeffs, z.coeffs)
    a = project_PM(project_mean_free(g), M)
    b = project_mean_free(project_PM(g, M))
    assert np.array_equal(a.coeffs, b.coeffs)


def test_project_mean_free_examples():
    assert sobolev_norm(project_mean_free(TrigCoeffs.from_dict({0: 3.0})), 0) == 0
    g = TrigCoeffs.from_dict({-1: 1.0, 2: 1j})
    assert np.array_equal(project_mean_free(g).coeffs, g.coeffs)
    out = project_mean_free(3 + TrigCoeffs.monomial(1))
    assert out[0] == 0 and out[1] == 1 and out[-1] == 0


def test_evaluate_examples():
    assert evaluate(TrigCoeffs.monomial(1), 0.0) == 1
    assert abs(evaluate(TrigCoeffs.from_dict({1: 1, -1: 1}), np.pi / 2)) < 1e-15


def test_evaluate_exp_cos():
    g = TrigCoeffs.from_function(lambda t: np.exp(np.cos(t)), 40)
    assert abs(evaluate(g, 1.0) - math.exp(math.cos(1.0))) < 1e-12


def test_mean_free_flag_zeroes_exactly():
    g = TrigCoeffs([1.0, 5.0, 2.0], mean_free=True)
    assert g[0] == 0.0


def test_real_flag_checks_symmetry():
    TrigCoeffs([1 - 1j, 2.0, 1 + 1j], real=True)
    with pytest.raises(ValueError):
        TrigCoeffs([1.0, 2.0, 3.0], real=True)


def test_even_length_rejected():
    with pytest.raises(ValueError):
        TrigCoeffs([1.0, 2.0])


def test_coeffs_immutable():
    g = TrigCoeffs.monomial(1)
    with pytest.raises(ValueError):
        g.coeffs[0] = 3


def test_out_of_support_index_is_zero():
    assert TrigCoeffs.monomial(1)[7] == 0


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 9))
def test_json_round_trip(seed, N):
    g = random_poly(np.random.default_rng(seed), N)
    back = TrigCoeffs.from_json(g.to_json())
    assert np.array_equal(back.coeffs, g.coeffs)


def test_json_rejects_inconsistent_length():
    with pytest.raises(ValueError):
        TrigCoeffs.from_json('{"N": 2, "re": [0, 1, 0], "im": [0, 0, 0]}')


def test_arithmetic_pads_to_common_order():
    h = TrigCoeffs.monomial(1) + TrigCoeffs.monomial(-3)
    assert h.N == 3 and h[1] == 1 and h[-3] == 1
    assert (h - h).support_order() == 0
    assert (2 * h / 4)[1] == 0.5
