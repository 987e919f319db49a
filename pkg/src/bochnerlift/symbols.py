"""Radial Fourier symbols of Levy operators and spectral application.

The Fourier transform is F f(xi) = int f(x) exp(2 pi i xi.x) dx.  A radial
kernel K on R^n then has the radial symbol

    psi(tau) = |S^(n-1)| int_0^inf (1 - Lambda_n(2 pi tau r)) r^(n-1) K(r) dr,

with Lambda_n the normalised Bessel function of :mod:`special`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft

from .errors import AliasingError, QuadratureFailure
from .kernels import RadialKernel, lift_kernel
from .quadrature import legendre_on, oscillatory_half_line, tail_rule
from .special import gamma, normalized_bessel, one_minus_normalized_bessel, sphere_area

__all__ = [
    "RadialSymbol",
    "fractional_symbol",
    "zero_symbol",
    "symbol_from_kernel",
    "hankel_symbol",
    "symbol_invariance_residual",
    "symbol_monotonicity_flag",
    "epstein_zeta",
    "grid_axis",
    "sample_on_grid",
    "apply_multiplier_spectral",
]


@dataclass(frozen=True, eq=False)
class RadialSymbol:
    """psi(tau) for tau >= 0, with psi <= C (1 + tau)^growth_order.

    ``origin_coefficient`` and ``origin_exponent`` declare psi(tau) ~ c tau^a
    near 0; when present the spectral evaluator removes the lattice-sum
    error that this cusp produces.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    growth_order: float
    origin_coefficient: float | None = None
    origin_exponent: float | None = None
    name: str = "custom"

    def __call__(self, tau):
        return self.profile(np.asarray(tau, dtype=float))


def fractional_symbol(s: float) -> RadialSymbol:
    """(2 pi tau)^(2s), the symbol of (-Delta)^s."""
    coef = (2.0 * math.pi) ** (2.0 * s)
    return RadialSymbol(
        profile=lambda t: coef * t ** (2.0 * s),
        growth_order=2.0 * s,
        origin_coefficient=coef,
        origin_exponent=2.0 * s,
        name=f"fractional(s={s:g})",
    )


def zero_symbol() -> RadialSymbol:
    return RadialSymbol(profile=lambda t: np.zeros_like(t), growth_order=0.0, name="zero")


def symbol_from_kernel(K: RadialKernel, tol: float = 1e-11) -> RadialSymbol:
    """Symbol of K evaluated through :func:`hankel_symbol` at each distinct tau."""

    def profile(tau):
        flat = np.asarray(tau, dtype=float).ravel()
        uniq, inverse = np.unique(flat, return_inverse=True)
        vals = np.array([hankel_symbol(K, float(t), tol) for t in uniq])
        return vals[inverse].reshape(np.shape(tau))

    coef = expo = None
    if K.family == "fractional":
        expo = 2.0 * K.params["s"]
        coef = (2.0 * math.pi) ** expo
    growth = min(2.0, K.singularity_order) if K.singularity_order > 0 else 0.0
    return RadialSymbol(profile, growth, coef, expo, name=f"hankel({K.family})")


def _core_integral(K: RadialKernel, omega: float) -> float:
    """int_0^1 (1 - Lambda_n(x)) x^(n-1) K(x/omega) dx on a graded mesh."""
    n = K.dimension
    p = K.singular_power()
    total = 0.0
    for lo, hi in ((0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)):
        t, wt = legendre_on(lo, hi, 32)
        x = t**p
        w = wt * p * t ** (p - 1.0)
        total += float(np.sum(w * one_minus_normalized_bessel(n, x) * x ** (n - 1) * K(x / omega)))
    return total


def _panel_edges(a: float, b: float, width: float) -> np.ndarray:
    edges = [a]
    while edges[-1] < b:
        x = edges[-1]
        edges.append(min(b, x + min(width, 0.5 * x)))
    return np.array(edges)


def _smooth_panels(f, edges: np.ndarray, nodes: int = 20) -> float:
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = legendre_on(lo, hi, nodes)
        total += float(np.sum(w * f(x)))
    return total


def hankel_symbol(K: RadialKernel, tau: float, tol: float = 1e-11) -> float:
    """psi(tau) of the kernel K, by quadrature in x = 2 pi tau r.

    [0, 1] uses the series for 1 - Lambda_n on a graded mesh; [1, X0] uses
    Gauss panels no longer than half a period; for power-law kernels the
    remainder splits into a monotone tail (Gauss-Jacobi) minus an
    oscillatory tail summed over half periods and accelerated.
    """
    tau = float(tau)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0.0:
        return 0.0
    n = K.dimension
    omega = 2.0 * math.pi * tau
    nu = n / 2.0 - 1.0

    def g(x):
        return x ** (n - 1) * K(x / omega)

    def bracket(x):
        return (1.0 - normalized_bessel(n, x)) * g(x)

    width = min(0.5 * math.pi, max(0.05, 0.25 * omega))
    total = _core_integral(K, omega)
    if not K.is_power_tailed:
        x_max = max(2.0, omega * K.cutoff_radius())
        total += _smooth_panels(bracket, _panel_edges(1.0, x_max, width))
    else:
        phase = (0.5 * nu + 0.75) * math.pi
        k0 = max(1, int(math.ceil((max(10.0 * math.pi, 4.0 * omega) - phase) / math.pi)))
        x0 = k0 * math.pi + phase
        total += _smooth_panels(bracket, _panel_edges(1.0, x0, width))
        xt, wt = tail_rule(x0, K.decay_rate, 48)
        total += float(np.sum(wt * g(xt)))

        def panel(lo, hi):
            x, w = legendre_on(lo, hi, 16)
            return float(np.sum(w * normalized_bessel(n, x) * g(x)))

        scale = max(abs(total), 1e-300)
        try:
            osc = oscillatory_half_line(
                panel, lambda k: x0 + k * math.pi, tol * scale, min_panels=24
            )
        except QuadratureFailure as exc:
            raise QuadratureFailure(f"hankel_symbol({tau}) did not converge") from exc
        total -= osc
    value = sphere_area(n) * total / omega**n
    if not math.isfinite(value):
        raise QuadratureFailure(f"hankel_symbol({tau}) produced a non-finite value")
    return value


def symbol_invariance_residual(K: RadialKernel, taus) -> float:
    """max |psi_n - psi_{n+2}| / max(1, psi_n) with psi_{n+2} from the lifted kernel."""
    K2 = lift_kernel(K)
    worst = 0.0
    for tau in taus:
        a = hankel_symbol(K, tau)
        b = hankel_symbol(K2, tau)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return worst


def symbol_monotonicity_flag(psi, taus) -> bool:
    """True when psi is nondecreasing along the sorted probe grid."""
    t = np.sort(np.asarray(taus, dtype=float))
    vals = np.array([float(psi(v)) for v in t])
    return bool(np.all(np.diff(vals) >= -1e-12 * np.maximum(1.0, np.abs(vals[1:]))))


def _theta_minus_one(t: np.ndarray, d: int) -> np.ndarray:
    k = np.arange(1, 12)[:, None]
    theta = 1.0 + 2.0 * np.sum(np.exp(-math.pi * k * k * t[None, :]), axis=0)
    return theta**d - 1.0


def epstein_zeta(d: int, sigma: float) -> float:
    """Analytic continuation of sum over nonzero k in Z^d of |k|^(-sigma).

    Uses the theta-function representation

        pi^(-sigma/2) Gamma(sigma/2) Z(sigma)
            = int_1^inf (theta(t)^d - 1)(t^(sigma/2 - 1) + t^((d - sigma)/2 - 1)) dt
              - 2/sigma - 2/(d - sigma).
    """
    if sigma == 0.0:
        return -1.0
    if sigma == d:
        raise ValueError("Epstein zeta has a pole at sigma = d")
    if sigma < 0 and float(sigma / 2.0).is_integer():
        return 0.0
    edges = np.linspace(1.0, 13.0, 13)
    acc = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        t, w = legendre_on(lo, hi, 24)
        weight = t ** (0.5 * sigma - 1.0) + t ** (0.5 * (d - sigma) - 1.0)
        acc += float(np.sum(w * _theta_minus_one(t, d) * weight))
    acc -= 2.0 / sigma + 2.0 / (d - sigma)
    return acc * math.pi ** (0.5 * sigma) / gamma(0.5 * sigma)


def grid_axis(n_points: int, R: float) -> np.ndarray:
    """Uniform periodic grid x_j = -R + j 2R/N, j = 0..N-1."""
    return -R + (2.0 * R / n_points) * np.arange(n_points)


def sample_on_grid(f, n_points: int, R: float, d: int) -> np.ndarray:
    """Evaluate a callable on points (..., d) of the uniform d-dimensional grid."""
    axis = grid_axis(n_points, R)
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    return np.asarray(f(mesh), dtype=float)


def _origin_correction(
    samples: np.ndarray, d: int, R: float, coef: float, alpha: float
) -> np.ndarray:
    """Lattice-sum error of sum_k psi(|xi_k|) F f(xi_k) e^(2 pi i xi_k x) h^d.

    For psi ~ c |xi|^alpha and g(xi) = c F f(xi) e^(2 pi i xi.x), the
    generalised Euler-Maclaurin expansion reads

        sum_j h^(d+alpha+2j) Z(-alpha-2j) a_j,

    where a_j is the |xi|^(2j) coefficient of the spherical mean of g and Z
    the Epstein zeta function of Z^d.  Spherical means only suffice while
    the cubic lattice looks isotropic, i.e. up to j = 1 for d >= 2; in one
    dimension the terms up to j = 3 are used.
    """
    n_points = samples.shape[0]
    hx = 2.0 * R / n_points
    h = 1.0 / (2.0 * R)
    axis = grid_axis(n_points, R)
    cell = hx**d
    if d == 1:
        moments = [cell * float(np.sum(axis**k * samples)) for k in range(7)]
        x = axis

        def spread(j):
            # int f(z) (x - z)^(2j) dz by the binomial expansion
            return sum(
                math.comb(2 * j, k) * x ** (2 * j - k) * (-1.0) ** k * moments[k]
                for k in range(2 * j + 1)
            )

        orders = 4
    else:
        coords = np.meshgrid(*([axis] * d), indexing="ij")
        m0 = cell * float(samples.sum())
        m1 = [cell * float(np.sum(c * samples)) for c in coords]
        m2 = cell * float(np.sum(sum(c * c for c in coords) * samples))
        x_sq = sum(c * c for c in coords)
        x_dot_m1 = sum(c * m for c, m in zip(coords, m1))

        def spread(j):
            return np.full(samples.shape, m0) if j == 0 else m0 * x_sq - 2.0 * x_dot_m1 + m2

        orders = 2
    half_d = 0.5 * d
    total = np.zeros(samples.shape)
    for j in range(orders):
        # spherical mean of e^(2 pi i xi.w): sum_j (-1)^j (pi |xi| |w|)^(2j) G(d/2)/(j! G(d/2+j))
        mean_coef = (-1.0) ** j * math.pi ** (2 * j) * gamma(half_d) / (
            math.factorial(j) * gamma(half_d + j)
        )
        zeta = epstein_zeta(d, -alpha - 2.0 * j)
        total = total + h ** (d + alpha + 2.0 * j) * zeta * coef * mean_coef * spread(j)
    return total


def apply_multiplier_spectral(
    psi: RadialSymbol,
    samples,
    d: int,
    R: float,
    correct_origin: bool = True,
    decay_tol: float = 1e-12,
    workers: int | None = None,
) -> np.ndarray:
    """Apply the radial multiplier psi to samples on the uniform grid of [-R, R)^d.

    Frequencies are xi_k = k/(2R).  Raises ``AliasingError`` when the samples
    do not decay below ``decay_tol`` (relative to their maximum) on the box
    boundary.
    """
    f = np.asarray(samples, dtype=float)
    if f.ndim != d or len(set(f.shape)) != 1:
        raise ValueError("samples must be a cubic grid with one axis per dimension")
    n_points = f.shape[0]
    if n_points < 2 or n_points & (n_points - 1):
        raise ValueError("grid side must be a power of two")
    peak = float(np.max(np.abs(f)))
    if peak == 0.0:
        return np.zeros_like(f)
    edge = max(float(np.max(np.abs(np.take(f, 0, axis=a)))) for a in range(d))
    if edge > decay_tol * peak:
        raise AliasingError(
            f"boundary magnitude {edge:.3e} exceeds {decay_tol:g} x peak; enlarge R"
        )
    freq = scipy.fft.fftfreq(n_points, d=2.0 * R / n_points)
    grids = np.meshgrid(*([freq] * d), indexing="ij")
    radius = np.sqrt(sum(g * g for g in grids))
    mult = np.asarray(psi(radius), dtype=float)
    spec = scipy.fft.fftn(f, workers=workers)
    out = scipy.fft.ifftn(spec * mult, workers=workers)
    re, im = out.real, out.imag
    scale = float(np.max(np.abs(re)))
    if float(np.max(np.abs(im))) > 1e-9 * max(scale, 1e-300):
        raise AliasingError("spectral result has a non-negligible imaginary part")
    if correct_origin and psi.origin_coefficient is not None:
        alpha = float(psi.origin_exponent)
        if not float(alpha / 2.0).is_integer():
            re = re - _origin_correction(f, d, R, psi.origin_coefficient, alpha)
    return re
