import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracbackflow.kernel import (
    FluxKernel,
    build_kernel,
    kernel_entries,
    nonrel_entries,
    nonrel_kernel,
    sinc,
)
from diracbackflow.model import ParameterError, RingParams, eigenstate_flux


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert abs(sinc(math.pi)) < 1e-16
    assert sinc(1.0) == pytest.approx(0.8414709848078965, rel=1e-15)
    assert sinc(-2.5) == sinc(2.5)


@pytest.mark.parametrize("x", [1e-8, 5e-5, 9.99e-5, 1.0001e-4, 1e-3])
def test_sinc_taylor_branch_matches_mpmath(x):
    exact = float(mpmath.sin(mpmath.mpf(x)) / mpmath.mpf(x))
    assert sinc(x) == pytest.approx(exact, rel=1e-15)


def test_sinc_vectorized():
    x = np.array([0.0, 1.0, -1.0])
    np.testing.assert_array_equal(sinc(x), [1.0, math.sin(1.0), math.sin(1.0)])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 30), st.floats(-0.999, 0), st.floats(0.01, 10))
def test_symmetry_diagonal_positivity(chi, beta, alpha):
    p = RingParams(chi, beta, alpha)
    k = build_kernel(p, 60).entries
    np.testing.assert_array_equal(k, k.T)
    d = np.diag(k)
    flux = eigenstate_flux(p, np.arange(61))
    np.testing.assert_allclose(d, flux, rtol=1e-14, atol=0)
    assert np.all(d >= 0)


def test_unit_vector_quadratic_form():
    p = RingParams(0.73, -0.2, 1.1)
    k = build_kernel(p, 30)
    for l in range(31):
        e = np.zeros(31)
        e[l] = 1.0
        assert k.quadratic_form(e) == pytest.approx(eigenstate_flux(p, l), rel=1e-14)


@pytest.mark.parametrize("chi,beta,alpha", [(0.05, 0.0, 0.6), (0.73, -0.3, 1.1389), (20.0, -0.9, 15.0)])
def test_beta_shift_covariance(chi, beta, alpha):
    k = kernel_entries(chi, beta, alpha, 300)
    # same physical modes, relabelled: l - beta is unchanged
    down = kernel_entries(chi, beta - 1.0, alpha, 300, offset=-1)
    up = kernel_entries(chi, beta + 1.0, alpha, 300, offset=1)
    scale = np.abs(k).max()
    assert np.abs(down - k).max() <= 1e-13 * scale
    assert np.abs(up - k).max() <= 1e-13 * scale


def test_rejects_small_n():
    with pytest.raises(ParameterError):
        build_kernel(RingParams(1.0), 0)
    with pytest.raises(ParameterError):
        nonrel_kernel(1.0, 0.0, 0)


def test_nonrel_examples():
    k = nonrel_kernel(1.0, 0.0, 5).entries
    assert k[0, 1] == pytest.approx(0.144719180220048234, rel=1e-15)  # (1/pi) sinc(-2), mpmath
    np.testing.assert_allclose(np.diag(nonrel_kernel(0.8, 0.0, 10).entries), 2 * 0.8 / math.pi * np.arange(11))


def test_nonrelativistic_convergence_ratio():
    # asymptotic O(chi^2) regime needs chi * l << 1 across the 50x50 block
    devs = []
    for chi in (0.004, 0.002, 0.001):
        rel = kernel_entries(chi, 0.0, 1.0, 49)
        devs.append(np.abs(rel - nonrel_entries(1.0, 0.0, 49)).max())
    r1, r2 = devs[0] / devs[1], devs[1] / devs[2]
    assert 3.5 <= r1 <= 4.5 and 3.5 <= r2 <= 4.5


def _naive_arg(chi, beta, alpha, l, lp):
    e = lambda m: math.sqrt(1 + chi**2 * (m - beta) * (m - beta + 1))
    return 2 * alpha * (e(l) - e(lp)) / chi**2


def _mp_entry(chi, beta, alpha, l, lp):
    mpmath.mp.dps = 50
    chi, beta, alpha = map(mpmath.mpf, (chi, beta, alpha))

    def parts(m):
        s = m - beta
        eps = mpmath.sqrt(1 + chi**2 * s * (s + 1))
        a = 1 / mpmath.sqrt(2 * mpmath.pi) / mpmath.sqrt(1 + chi**2 * s**2 / (1 + eps) ** 2)
        return eps, a, s / (1 + eps)

    e1, a1, u1 = parts(l)
    e2, a2, u2 = parts(lp)
    x = 2 * alpha * (e1 - e2) / chi**2
    sc = mpmath.sin(x) / x if x != 0 else 1
    return float(4 * alpha * a1 * a2 * (u1 + u2) * sc)


def test_stable_argument_matches_naive_at_moderate_chi():
    chi, beta, alpha = 0.3, -0.1, 0.9
    k = kernel_entries(chi, beta, alpha, 40)
    for l, lp in [(3, 7), (10, 40), (25, 26)]:
        arg = _naive_arg(chi, beta, alpha, l, lp)
        s = 2 * ((l - beta) * (l - beta + 1) - (lp - beta) * (lp - beta + 1))
        e1 = math.sqrt(1 + chi**2 * (l - beta) * (l - beta + 1))
        e2 = math.sqrt(1 + chi**2 * (lp - beta) * (lp - beta + 1))
        assert alpha * s / (e1 + e2) == pytest.approx(arg, rel=1e-8)
        assert k[l, lp] == pytest.approx(_mp_entry(chi, beta, alpha, l, lp), rel=1e-10)


def test_stable_argument_accurate_at_tiny_chi_large_l():
    chi, beta, alpha = 1e-3, 0.0, 0.7
    k = kernel_entries(chi, beta, alpha, 2005)
    for l, lp in [(2000, 2001), (1999, 2003), (1500, 2000)]:
        exact = _mp_entry(chi, beta, alpha, l, lp)
        assert k[l, lp] == pytest.approx(exact, rel=1e-10, abs=1e-14)


def test_dump_roundtrip(tmp_path):
    k = build_kernel(RingParams(0.73, -0.25, 1.2), 17)
    path = tmp_path / "k.bin"
    k.dump(path)
    back = FluxKernel.load(path)
    np.testing.assert_array_equal(back.entries, k.entries)
    assert (back.chi, back.beta, back.alpha, back.n_max) == (0.73, -0.25, 1.2, 17)
    nr = nonrel_kernel(0.5, 0.0, 4)
    nr.dump(path)
    assert FluxKernel.load(path).chi is None


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"\0" * 64)
    with pytest.raises(ValueError):
        FluxKernel.load(path)
