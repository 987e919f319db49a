import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bochnerlift.errors import AliasingError
from bochnerlift.kernels import fractional_kernel, gaussian_kernel, rational_kernel
from bochnerlift.lift import Field
from bochnerlift.operators import apply_flap_direct, apply_levy_direct
from bochnerlift.symbols import (
    RadialSymbol,
    apply_multiplier_spectral,
    epstein_zeta,
    fractional_symbol,
    grid_axis,
    hankel_symbol,
    sample_on_grid,
    symbol_from_kernel,
    symbol_invariance_residual,
    symbol_monotonicity_flag,
    zero_symbol,
)

TAUS16 = np.linspace(0.25, 8.0, 16)


def gaussian_field(d):
    return Field(d, lambda p: np.exp(-math.pi * np.sum(p * p, axis=-1)), decay_bound=(1.0, 50.0))


def test_hankel_symbol_examples():
    assert hankel_symbol(gaussian_kernel(2), 0.0) == 0.0
    assert hankel_symbol(fractional_kernel(1, 0.5), 1.0) == pytest.approx(2 * math.pi, rel=1e-10)
    assert hankel_symbol(fractional_kernel(2, 0.75), 2.0) == pytest.approx((4 * math.pi) ** 1.5,
                                                                          rel=1e-10)


@given(st.integers(min_value=1, max_value=4), st.floats(min_value=0.1, max_value=0.9),
       st.floats(min_value=0.05, max_value=10.0))
def test_fractional_symbol_is_power_law(n, s, tau):
    val = hankel_symbol(fractional_kernel(n, s), tau)
    assert val == pytest.approx((2 * math.pi * tau) ** (2 * s), rel=1e-8)


def test_gaussian_kernel_symbol_against_mpmath():
    # psi(tau) = int (1 - cos(2 pi tau x)) exp(-pi x^2) dx on R = 1 - exp(-pi tau^2)
    for tau in (0.3, 1.0, 2.5):
        ref = float(1 - mpmath.exp(-mpmath.pi * tau * tau))
        assert hankel_symbol(gaussian_kernel(1), tau) == pytest.approx(ref, rel=1e-10)


def test_invariance_residual():
    assert symbol_invariance_residual(gaussian_kernel(1), [0.5, 1, 2, 4]) <= 1e-6
    assert symbol_invariance_residual(fractional_kernel(1, 0.5), [1.0]) <= 1e-6
    assert symbol_invariance_residual(gaussian_kernel(1), [0.0]) == 0.0


@pytest.mark.parametrize("K", [gaussian_kernel(1), gaussian_kernel(2), rational_kernel(1),
                               fractional_kernel(1, 0.25), fractional_kernel(2, 0.75)])
def test_invariance_on_the_standard_grid(K):
    assert symbol_invariance_residual(K, TAUS16) <= 1e-6


def test_symbol_object_and_monotonicity():
    psi = symbol_from_kernel(gaussian_kernel(1))
    vals = psi(np.array([[0.5, 1.0], [1.0, 0.5]]))
    assert vals.shape == (2, 2) and vals[0, 0] == vals[1, 1]
    assert symbol_monotonicity_flag(psi, TAUS16)
    bumpy = RadialSymbol(lambda t: np.sin(t) ** 2, 0.0)
    assert not symbol_monotonicity_flag(bumpy, TAUS16)
    assert fractional_symbol(0.5)(1.0) == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("sigma", [-3.5, -1.5, -0.5, 0.5, 2.5])
def test_epstein_zeta_d1(sigma):
    assert epstein_zeta(1, sigma) == pytest.approx(float(2 * mpmath.zeta(sigma)), rel=1e-9)


@pytest.mark.parametrize("sigma", [-3.0, -1.0, 1.0, 3.0])
def test_epstein_zeta_d2(sigma):
    # sum over Z^2 of |k|^(-2z) = 4 zeta(z) beta(z), beta the Dirichlet beta function
    z = sigma / 2
    ref = 4 * mpmath.zeta(z) * mpmath.dirichlet(z, [0, 1, 0, -1])
    assert epstein_zeta(2, sigma) == pytest.approx(float(ref), rel=1e-9, abs=1e-12)


def test_epstein_zeta_d3_brute_force():
    # direct lattice sum over |k| <= N plus the continuum tail 4 pi N^(3 - sigma) / (sigma - 3)
    N, sigma = 60, 7.0
    k = np.arange(-N, N + 1, dtype=float)
    q = k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2
    q = q[(q > 0) & (q <= N * N)]
    ref = float(np.sum(q ** (-sigma / 2))) + 4 * math.pi * N ** (3 - sigma) / (sigma - 3)
    assert epstein_zeta(3, sigma) == pytest.approx(ref, rel=1e-7)
    assert epstein_zeta(2, -2.0) == 0.0
    assert epstein_zeta(3, 0.0) == -1.0
    with pytest.raises(ValueError):
        epstein_zeta(3, 3.0)


def test_spectral_zero_and_laplacian():
    f = sample_on_grid(gaussian_field(1), 256, 8.0, 1)
    assert np.all(apply_multiplier_spectral(zero_symbol(), f, 1, 8.0) == 0.0)
    lap = RadialSymbol(lambda t: (2 * math.pi * t) ** 2, 2.0)
    x = grid_axis(256, 8.0)
    out = apply_multiplier_spectral(lap, f, 1, 8.0)
    exact = (2 * math.pi - 4 * math.pi**2 * x * x) * np.exp(-math.pi * x * x)
    assert np.max(np.abs(out - exact)) <= 1e-10
    assert out[128] == pytest.approx(2 * math.pi, rel=1e-12)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_spectral_matches_direct_in_1d(s):
    u = gaussian_field(1)
    f = sample_on_grid(u, 512, 8.0, 1)
    out = apply_multiplier_spectral(fractional_symbol(s), f, 1, 8.0)
    x = grid_axis(512, 8.0)
    for j in (256, 256 + 32, 256 + 80):
        direct = apply_flap_direct(s, u, np.array([x[j]]))
        assert out[j] == pytest.approx(direct, rel=1e-5, abs=1e-7)


def test_spectral_matches_direct_in_2d():
    u = gaussian_field(2)
    f = sample_on_grid(u, 128, 6.0, 2)
    out = apply_multiplier_spectral(fractional_symbol(0.5), f, 2, 6.0)
    x = grid_axis(128, 6.0)
    for i, j in ((64, 64), (72, 60), (80, 70)):
        direct = apply_flap_direct(0.5, u, np.array([x[i], x[j]]))
        assert out[i, j] == pytest.approx(direct, rel=1e-4)


def test_spectral_with_hankel_symbol_of_gaussian_kernel():
    u = gaussian_field(1)
    f = sample_on_grid(u, 256, 8.0, 1)
    psi = RadialSymbol(lambda t: 1 - np.exp(-math.pi * t * t), 2.0)
    out = apply_multiplier_spectral(psi, f, 1, 8.0)
    x = grid_axis(256, 8.0)
    for j in (128, 140):
        direct = apply_levy_direct(gaussian_kernel(1), u, np.array([x[j]]))
        assert out[j] == pytest.approx(direct, rel=1e-4)


def test_spectral_rejects_bad_grids():
    wide = sample_on_grid(lambda p: np.exp(-0.01 * np.sum(p * p, axis=-1)), 64, 4.0, 1)
    with pytest.raises(AliasingError):
        apply_multiplier_spectral(fractional_symbol(0.5), wide, 1, 4.0)
    with pytest.raises(ValueError):
        apply_multiplier_spectral(fractional_symbol(0.5), np.ones(48), 1, 4.0)


def test_spectral_thread_count_does_not_change_output():
    f = sample_on_grid(gaussian_field(2), 64, 5.0, 2)
    a = apply_multiplier_spectral(fractional_symbol(0.3), f, 2, 5.0, workers=1)
    b = apply_multiplier_spectral(fractional_symbol(0.3), f, 2, 5.0, workers=4)
    assert np.array_equal(a, b)
