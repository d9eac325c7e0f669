import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kummer.dft_engine import (
    UNIT_ROUNDOFF,
    InvalidLengthError,
    PlanResourceError,
    delta_bound,
    factorize_length,
    forward,
    inverse,
    plan_dft,
    plan_external,
    roundtrip_report,
    unit_roots,
)


def _random(n, seed=None):
    g = np.random.default_rng(seed)
    return g.standard_normal(n) + 1j * g.standard_normal(n)


def _brute_dft(u):
    n = len(u)
    k = np.arange(n)
    mat = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return mat @ u


def test_plan_strategies():
    assert plan_dft(1).strategy == "mixed-radix"
    assert plan_dft(480).strategy == "mixed-radix"
    assert sorted(plan_dft(480).factors) == sorted(factorize_length(480))
    p = plan_dft(499)
    assert p.strategy == "chirp-convolution"
    assert p.inner_length == 1024
    assert plan_dft(61).strategy == "mixed-radix"
    assert plan_dft(67).strategy == "chirp-convolution"
    assert plan_dft(2 * 67).strategy == "chirp-convolution"


def test_factorize_length():
    for n in (1, 2, 4, 12, 480, 997, 1024, 3 * 5 * 7 * 11 * 13, 2**5 * 3 * 67):
        assert math.prod(factorize_length(n)) == n


def test_invalid_lengths():
    for bad in (0, -3, 2.5, True):
        with pytest.raises(InvalidLengthError):
            plan_dft(bad)
    with pytest.raises(InvalidLengthError):
        plan_external(0)
    p = plan_dft(8)
    with pytest.raises(InvalidLengthError):
        forward(p, np.ones(7))
    with pytest.raises(ValueError):
        forward(p, np.array([1, 2, np.nan, 4, 5, 6, 7, 8]))


def test_resource_error_is_distinct():
    with pytest.raises(PlanResourceError) as exc:
        plan_dft(10**6 + 3, max_bytes=10**6)
    assert exc.value.predicted_bytes > 10**6
    assert not isinstance(exc.value, InvalidLengthError)


def test_identity_plan():
    p = plan_dft(1)
    assert forward(p, [3 + 4j]).tolist() == [3 + 4j]
    assert inverse(p, [3 + 4j]).tolist() == [3 + 4j]


@pytest.mark.parametrize("n", [2, 7, 64, 499, 480, 1000])
def test_impulse_and_constant(n):
    p = plan_dft(n)
    delta = np.zeros(n)
    delta[0] = 1
    assert np.allclose(forward(p, delta), np.ones(n), atol=1e-13)
    spike = np.zeros(n, dtype=complex)
    spike[0] = n
    assert np.allclose(forward(p, np.ones(n)), spike, atol=1e-11)
    assert np.allclose(inverse(p, np.ones(n)), delta, atol=1e-14)
    assert np.allclose(inverse(p, spike), np.ones(n), atol=1e-14)


def test_input_not_modified():
    u = _random(499, 1)
    keep = u.copy()
    forward(plan_dft(499), u)
    assert np.array_equal(u, keep)


def test_brute_force_equivalence_all_lengths_to_256():
    for n in range(1, 257):
        u = _random(n, n)
        p = plan_dft(n)
        assert np.max(np.abs(forward(p, u) - _brute_dft(u))) < 1e-11, n


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=256), st.integers(min_value=0, max_value=2**32 - 1),
       st.sampled_from(["double", "extended"]))
def test_brute_force_property(n, seed, precision):
    u = _random(n, seed)
    assert np.max(np.abs(forward(plan_dft(n, precision), u) - _brute_dft(u))) < 1e-11


def test_mpmath_oracle_prime_length():
    n = 101
    u = _random(n, 5)
    with mpmath.workdps(30):
        want = [
            complex(mpmath.fsum(mpmath.mpc(complex(u[k])) * mpmath.expjpi(mpmath.mpf(-2 * j * k) / n) for k in range(n)))
            for j in range(n)
        ]
    got = forward(plan_dft(n), u)
    assert np.max(np.abs(got - np.array(want))) < 1e-13


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=3000), st.integers(min_value=0, max_value=2**32 - 1))
def test_parseval(n, seed):
    u = _random(n, seed)
    f = forward(plan_dft(n), u)
    lhs = np.sum(np.abs(f) ** 2)
    rhs = n * np.sum(np.abs(u) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * rhs


@pytest.mark.parametrize("n", [8, 499, 1024])
def test_linearity(n):
    u, v = _random(n, 11), _random(n, 12)
    a, b = 0.3 - 1.7j, 2.5 + 0.25j
    p = plan_dft(n)
    lhs = forward(p, a * u + b * v)
    rhs = a * forward(p, u) + b * forward(p, v)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_unit_roots_on_circle_and_exact_angles():
    for n in (1, 2, 7, 360, 1000, 99991):
        w = unit_roots(n)
        assert np.all(np.abs(np.abs(w) - 1) <= 2 * np.finfo(float).eps)
        k = np.arange(0, n, max(1, n // 97))
        want = np.exp(-2j * np.pi * k / n)
        assert np.max(np.abs(w[k] - want)) < 1e-15 * max(10, n) ** 0.5
    w = unit_roots(8)
    assert w[2] == -1j and w[4] == -1 and w[6] == 1j


@pytest.mark.parametrize("n", [1, 2, 3, 16, 499, 480, 5003, 65536, 100000])
def test_roundtrip_within_budget(n):
    u = _random(n, n)
    rep = roundtrip_report(plan_dft(n), u)
    assert rep.within_budget
    assert rep.measured_e2 <= rep.predicted_e2
    assert rep.measured_einf <= rep.predicted_einf


def test_clone_independent():
    p = plan_dft(499)
    c = p.clone()
    u = _random(499, 3)
    assert np.array_equal(forward(p, u), forward(c, u))
    if p.scratch is not None:
        assert p.scratch is not c.scratch


def test_external_plan_matches():
    u = _random(4999, 4)
    a = forward(plan_dft(4999), u)
    b = forward(plan_external(4999), u)
    assert np.max(np.abs(a - b)) < 1e-10


def test_delta_bound():
    assert delta_bound(1) == 0.0
    assert delta_bound(2) == pytest.approx(0.6 * UNIT_ROUNDOFF)
    assert delta_bound(4927482200, 2.0**-64) < 1.85e-19
