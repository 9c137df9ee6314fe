import math

import pytest
from hypothesis import given, strategies as st

from rieszkit.params import (ParamError, WARN_P_GT_D, WARN_PALPHA_GE_D,
                             choose_gamma, validate_params)


@pytest.mark.parametrize("d, alpha, r, p", [
    (2, 1.0, 2.0, 2.0),    # p <= r
    (2, 0.0, 2.0, 4.0),    # alpha <= 0
    (2, 2.0, 2.5, 4.0),    # alpha >= d
    (2, 0.5, 1.0, 4.0),    # r <= 1
    (2, 1.5, 1.2, 4.0),    # alpha > r
    (1, float("nan"), 2.0, 4.0),
])
def test_validate_rejects(d, alpha, r, p):
    with pytest.raises(ParamError):
        validate_params(d, alpha, r, p)


def test_derived_exponents():
    ep = validate_params(2, 0.5, 2.0, 4.0)
    assert ep.r_conj == 2.0
    assert ep.p0 == 3.0
    assert ep.p1 == 2.5


def test_p_greater_than_d_is_warning_not_error():
    ep = validate_params(1, 0.5, 2.0, 3.0)
    assert WARN_P_GT_D in ep.warnings


def test_p_alpha_warning():
    ep = validate_params(1, 0.5, 2.0, 4.0)
    assert WARN_PALPHA_GE_D in ep.warnings
    ep2 = validate_params(1, 0.25, 2.0, 3.0)
    assert WARN_PALPHA_GE_D not in ep2.warnings


def _gamma_scan_oracle(r, p, m=2_000_000):
    """Independent oracle: brute scan for the largest feasible gamma."""
    r_conj = r / (r - 1.0)
    hi = r  # gamma <= r - 1 < r
    best = 0.0
    for i in range(1, m):
        g = hi * i / m
        if (1 + g) * r <= p and 1 + g * r_conj <= p and r >= 1 + g:
            best = g
    return best


@pytest.mark.parametrize("r, p, expected", [
    (2.0, 4.0, 1.0),
    (3.0, 3.5, 1.0 / 6.0),
    (2.0, 2.0 + 1e-3, 5e-4),
])
def test_choose_gamma_frozen_values(r, p, expected):
    # expected values frozen from the linear-constraint solution and
    # cross-checked against the scan oracle below
    got = choose_gamma(r, p)
    assert got == pytest.approx(expected, rel=1e-12)


def test_choose_gamma_matches_scan_oracle():
    for r, p in [(2.0, 4.0), (3.0, 3.5), (1.5, 2.0), (1.2, 9.0)]:
        assert choose_gamma(r, p) == pytest.approx(
            _gamma_scan_oracle(r, p, m=200_000), rel=1e-4)


@given(st.floats(1.01, 9.99), st.floats(0.011, 8.9))
def test_gamma_constraints_and_one_equality(r, gap):
    p = min(r + gap, 10.0)
    if p <= r:
        return
    g = choose_gamma(r, p)
    r_conj = r / (r - 1.0)
    assert g > 0
    tol = 1e-9
    c1 = (1 + g) * r - p
    c2 = 1 + g * r_conj - p
    c3 = (1 + g) - r
    assert c1 <= tol and c2 <= tol and c3 <= tol
    assert max(c1, c2, c3) >= -tol or any(
        abs(c) <= 1e-9 * max(abs(p), 1.0) for c in (c1, c2, c3))


@given(st.floats(1.01, 9.0), st.floats(0.02, 8.9))
def test_exponent_ordering(r, gap):
    p = min(r + gap, 10.0)
    if p <= r * (1 + 1e-9):
        return
    alpha = min(0.9, r) * 0.5
    ep = validate_params(1, alpha, r, p) if alpha < 1 else None
    if ep is None:
        return
    assert ep.r < ep.p1 < ep.p0 < ep.p
    assert 0.0 < ep.p1 / ep.p0 < 1.0
    assert 1.0 < ep.q <= ep.p


def test_default_q_is_proof_exponent():
    ep = validate_params(2, 0.5, 2.0, 4.0)
    assert ep.q == pytest.approx((1 + ep.gamma) * ep.r)
    with pytest.raises(ParamError):
        validate_params(2, 0.5, 2.0, 4.0, q=5.0)  # q > p
    with pytest.raises(ParamError):
        validate_params(2, 0.5, 2.0, 4.0, q=1.0)  # q <= 1


def test_gamma_requires_admissible_pair():
    with pytest.raises(ParamError):
        choose_gamma(2.0, 2.0)
    with pytest.raises(ParamError):
        choose_gamma(0.9, 4.0)


def test_as_dict_roundtrips_fields():
    ep = validate_params(2, 0.5, 2.0, 4.0)
    d = ep.as_dict()
    assert d["gamma"] == ep.gamma and d["q"] == ep.q
    assert math.isclose(d["p1"], 2.5)
