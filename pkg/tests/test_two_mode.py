import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracbackflow.kernel import build_kernel, kernel_entries
from diracbackflow.model import ParameterError, RingParams, eigenstate_flux
from diracbackflow.two_mode import (
    minimize_two_mode,
    two_mode_coeffs,
    two_mode_curve,
    two_mode_min,
    two_mode_min_raw,
    two_mode_prob,
)


def eig2_min(k11, k22, k12):
    return (k11 + k22) / 2 - math.sqrt(((k11 - k22) / 2) ** 2 + k12**2)


def test_coeffs_with_vanishing_l1_term():
    p = RingParams(0.4, 0.0, 0.9)
    c = two_mode_coeffs(p, 0, 3)
    assert c.A == c.B
    assert c.D >= 0


def test_coeffs_match_kernel_diagonal():
    p = RingParams(0.73, -0.4, 1.1)
    c = two_mode_coeffs(p, 2, 5)
    a1, a2 = (c.A - c.B) / 2, (c.A + c.B) / 2
    assert p.alpha / math.pi * 2 * a1 == pytest.approx(eigenstate_flux(p, 2), rel=1e-13)
    assert p.alpha / math.pi * 2 * a2 == pytest.approx(eigenstate_flux(p, 5), rel=1e-13)


def test_prob_endpoints():
    p = RingParams(0.3, -0.2, 0.8)
    k = build_kernel(p, 5).entries
    assert two_mode_prob(p, 1, 4, 0.0, 1.0) == pytest.approx(k[1, 1], rel=1e-13)
    assert two_mode_prob(p, 1, 4, math.pi, 1.0) == pytest.approx(k[4, 4], rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 20), st.floats(-0.99, 0), st.floats(0.01, 5),
       st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True))
def test_prob_equals_quadratic_form(chi, beta, alpha, phi, gamma):
    p = RingParams(chi, beta, alpha)
    k = build_kernel(p, 3).entries
    c = np.array([math.cos(phi / 2), math.sin(phi / 2) * np.exp(1j * gamma)])
    blk = k[np.ix_([0, 3], [0, 3])]
    qf = (c.conj() @ blk @ c).real
    assert two_mode_prob(p, 0, 3, phi, gamma) == pytest.approx(qf, abs=1e-13 * np.abs(blk).max())


def test_prob_rejects_out_of_range_angles():
    p = RingParams(0.3)
    with pytest.raises(ParameterError):
        two_mode_prob(p, 0, 1, -0.1, 0.0)
    with pytest.raises(ParameterError):
        two_mode_prob(p, 0, 1, 0.5, 2 * math.pi)
    with pytest.raises(ParameterError):
        two_mode_coeffs(p, 2, 2)
    with pytest.raises(ParameterError):
        two_mode_coeffs(p, -1, 2)


def test_min_below_sampled_probabilities(rng):
    for _ in range(50):
        p = RingParams(rng.uniform(0.01, 5), -rng.uniform(0, 0.99), rng.uniform(0.05, 4))
        l1 = int(rng.integers(0, 5))
        l2 = l1 + 1 + int(rng.integers(0, 5))
        m = two_mode_min(p, l1, l2)
        phis = rng.uniform(0, math.pi, 200)
        gammas = rng.uniform(0, 2 * math.pi, 200)
        probs = [two_mode_prob(p, l1, l2, a, b) for a, b in zip(phis, gammas)]
        assert m <= min(probs) + 1e-14


def test_min_equals_block_eigenvalue(rng):
    worst = 0.0
    for _ in range(1000):
        p = RingParams(10 ** rng.uniform(-2, 2), -rng.uniform(0, 0.999), 10 ** rng.uniform(-2, 1))
        l1 = int(rng.integers(0, 20))
        l2 = l1 + 1 + int(rng.integers(0, 20))
        k = build_kernel(p, l2).entries
        ref = eig2_min(k[l1, l1], k[l2, l2], k[l1, l2])
        got = two_mode_min(p, l1, l2)
        # normwise relative: near-cancelling draws leave |ref| << |K| in double precision
        scale = max(abs(ref), abs(k[l1, l1]), abs(k[l2, l2]), abs(k[l1, l2]))
        worst = max(worst, abs(got - ref) / scale)
    assert worst <= 1e-12


@settings(max_examples=200)
@given(st.floats(0.01, 20), st.floats(-0.99, 0), st.floats(0.01, 5), st.integers(0, 30), st.integers(1, 30))
def test_beta_shift(chi, beta, alpha, l1, gap):
    l2 = l1 + gap
    # physical relabelling (l, beta) -> (l + 1, beta + 1) leaves l - beta unchanged
    a = two_mode_min_raw(chi, beta, alpha, l1, l2)
    b = two_mode_min_raw(chi, beta + 1.0, alpha, l1 + 1, l2 + 1)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-15)
    if l1 >= 1:
        c = two_mode_min_raw(chi, beta - 1.0, alpha, l1 - 1, l2 - 1)
        assert c == pytest.approx(a, rel=1e-12, abs=1e-15)


def test_sinc_zero_crossing_gives_zero_minimum():
    # with beta = 0 and l1 = 0 the minimum is (alpha/pi)(A - |B|) = 0 where sinc(D) = 0
    chi = 0.05
    e1 = math.sqrt(1 + chi**2 * 2)
    d_per_alpha = 2 * 2 / (1 + e1)
    alpha = math.pi / d_per_alpha
    assert two_mode_min(RingParams(chi, 0.0, alpha), 0, 1) == pytest.approx(0.0, abs=1e-15)


def test_fig1_minimum():
    ap, p = minimize_two_mode(0.05, 0.0)
    assert p == pytest.approx(-0.0508602, abs=1e-6)
    assert ap == pytest.approx(0.195067, abs=5e-5)


def test_fig1_shape():
    betas = (0.0, -0.025, -0.05, -0.075)
    mins = {b: minimize_two_mode(0.05, b) for b in betas}
    assert all(v[1] < 0 for v in mins.values())
    assert min(mins, key=lambda b: mins[b][1]) == 0.0
    assert abs(mins[0.0][0] - 0.195) < 0.005
    rows = two_mode_curve(0.05, betas)
    assert len(rows) == 4 * 200
    assert all(r[2] == 0.05 for r in rows)
