"""Gamma, Bessel-J and sphere-measure primitives.

Everything here is self-contained (numpy only) so that the symbol and
quadrature code does not depend on a particular scipy build.  Orders of
the Bessel function are restricted to the integers and half-integers
between -1/2 and 15/2, which is all the dimension-lift machinery needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedOrder

__all__ = [
    "BesselOrder",
    "log_gamma",
    "gamma",
    "sphere_area",
    "ball_volume",
    "bessel_j",
    "normalized_bessel",
    "one_minus_normalized_bessel",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_scalar(x: float) -> float:
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.log(math.pi / abs(math.sin(math.pi * x))) - _log_gamma_scalar(1.0 - x)
    if x in (1.0, 2.0):
        return 0.0
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(x):
    """Natural logarithm of the gamma function for ``x > 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("log_gamma is defined here for x > 0 only")
    if arr.ndim == 0:
        return _log_gamma_scalar(float(arr))
    return np.vectorize(_log_gamma_scalar, otypes=[float])(arr)


def gamma(x: float) -> float:
    """Gamma function for real, non-integer-nonpositive ``x``."""
    x = float(x)
    if x > 0:
        return math.exp(_log_gamma_scalar(x))
    if x == math.floor(x):
        raise ValueError("gamma has poles at the non-positive integers")
    # Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return math.pi / (math.sin(math.pi * x) * math.exp(_log_gamma_scalar(1.0 - x)))


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1) in R^d."""
    if not 1 <= d <= 16:
        raise ValueError("sphere_area supports 1 <= d <= 16")
    return 2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0)


def ball_volume(d: int) -> float:
    return sphere_area(d) / d


@dataclass(frozen=True)
class BesselOrder:
    """Order nu = twice_order / 2 of a Bessel function."""

    twice_order: int

    def __post_init__(self):
        if self.twice_order < -1 or self.twice_order > 15:
            raise UnsupportedOrder(f"order {self.twice_order / 2} outside [-1/2, 15/2]")

    @property
    def nu(self) -> float:
        return self.twice_order / 2.0

    @property
    def is_half_integer(self) -> bool:
        return self.twice_order % 2 != 0

    @classmethod
    def of(cls, nu: float) -> "BesselOrder":
        twice = 2.0 * nu
        if abs(twice - round(twice)) > 1e-12:
            raise UnsupportedOrder(f"order {nu} is neither integer nor half-integer")
        return cls(int(round(twice)))


_SERIES_TERMS = 40
_ASYMPTOTIC_SWITCH = 12.0


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    """Power series sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))."""
    half = 0.5 * x
    q = -half * half
    term = np.full_like(x, 1.0 / gamma(nu + 1.0))
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + nu))
        total += term
    with np.errstate(divide="ignore", invalid="ignore"):
        return total * half**nu


def _hankel_asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    """Hankel expansion J_nu ~ sqrt(2/(pi x)) (P cos chi - Q sin chi).

    The divergent tail is cut at the smallest term for each argument.
    """
    mu = 4.0 * nu * nu
    chi = x - (0.5 * nu + 0.25) * math.pi
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < last
        last = np.where(active, mag, last)
        contrib = np.where(active, term, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * contrib
        else:
            q += sign * contrib
        if not active.any():
            break
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _integer_order(n: int, x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    small = x < _ASYMPTOTIC_SWITCH
    if small.any():
        out[small] = _series(float(n), x[small])
    big = ~small
    if big.any():
        xb = x[big]
        j0 = _hankel_asymptotic(0.0, xb)
        if n == 0:
            out[big] = j0
        else:
            j1 = _hankel_asymptotic(1.0, xb)
            # upward recurrence is stable for x >= 12 > 7 >= n
            prev, cur = j0, j1
            for m in range(1, n):
                prev, cur = cur, (2.0 * m / xb) * cur - prev
            out[big] = cur
    return out


def _half_integer_order(twice: int, x: np.ndarray) -> np.ndarray:
    nu = twice / 2.0
    out = np.empty_like(x)
    zero = x == 0.0
    if zero.any():
        out[zero] = np.inf if twice < 0 else 0.0
    tiny = (~zero) & (x <= 2.0)
    if tiny.any():
        out[tiny] = _series(nu, x[tiny])
    rest = (~zero) & (~tiny)
    if not rest.any():
        return out
    xr = x[rest]
    amp = np.sqrt(2.0 / (math.pi * xr))
    j_minus = amp * np.cos(xr)
    j_plus = amp * np.sin(xr)
    if twice == -1:
        out[rest] = j_minus
        return out
    if twice == 1:
        out[rest] = j_plus
        return out
    res = np.empty_like(xr)
    up = xr >= nu
    if up.any():
        xu = xr[up]
        prev, cur = j_minus[up], j_plus[up]
        order = 0.5
        while order < nu:
            prev, cur = cur, (2.0 * order / xu) * cur - prev
            order += 1.0
        res[up] = cur
    down = ~up
    if down.any():
        res[down] = _miller(nu, xr[down], j_minus[down], j_plus[down])
    out[rest] = res
    return out


def _miller(nu: float, x: np.ndarray, j_minus: np.ndarray, j_plus: np.ndarray) -> np.ndarray:
    """Downward recurrence from a high order, normalised on J_{+-1/2}."""
    start = nu + 30.0 + math.ceil(float(x.max()))
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    target = np.zeros_like(x)
    order = start
    while order > -0.5:
        # J_{order-1} = (2 order / x) J_order - J_{order+1}
        lower = (2.0 * order / x) * cur - upper
        upper, cur = cur, lower
        order -= 1.0
        if abs(order - nu) < 1e-9:
            target = cur.copy()
        big = np.abs(cur) > 1e250
        if big.any():
            scale = np.where(big, 1e-250, 1.0)
            cur *= scale
            upper *= scale
            target *= scale
    # cur holds J_{-1/2}, upper holds J_{1/2} (both unnormalised)
    use_plus = np.abs(j_plus) >= np.abs(j_minus)
    norm = np.where(use_plus, j_plus / upper, j_minus / cur)
    return target * norm


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for x >= 0.

    ``nu`` may be a :class:`BesselOrder` or a float that is an integer or
    half-integer in [-1/2, 15/2].
    """
    order = nu if isinstance(nu, BesselOrder) else BesselOrder.of(float(nu))
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    xa = np.atleast_1d(arr).astype(float).copy()
    if np.any(xa < 0):
        raise ValueError("bessel_j requires x >= 0")
    if order.is_half_integer:
        out = _half_integer_order(order.twice_order, xa)
    else:
        out = _integer_order(order.twice_order // 2, xa)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def normalized_bessel(d: int, x):
    """Lambda_d(x) = Gamma(d/2) (2/x)^(d/2-1) J_{d/2-1}(x), with Lambda_d(0) = 1.

    This is the Fourier transform of the normalised surface measure of
    S^(d-1) evaluated at angular frequency x.
    """
    xa = np.asarray(x, dtype=float)
    nu = d / 2.0 - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = gamma(d / 2.0) * (2.0 / xa) ** nu * bessel_j(nu, xa)
    small = xa < 1.0
    if np.any(small):
        val = np.where(small, 1.0 - one_minus_normalized_bessel(d, xa), val)
    return val


def one_minus_normalized_bessel(d: int, x, terms: int = 14):
    """1 - Lambda_d(x) from its power series, free of cancellation for small x.

    1 - Lambda_d(x) = -sum_{k>=1} (-x^2/4)^k Gamma(d/2) / (k! Gamma(d/2 + k)).
    Accurate to double precision for x <= 2 with the default term count.
    """
    xa = np.asarray(x, dtype=float)
    q = -0.25 * xa * xa
    a = d / 2.0
    term = np.ones_like(xa)
    total = np.zeros_like(xa)
    for k in range(1, terms + 1):
        term = term * q / (k * (a + k - 1.0))
        total -= term
    return total
