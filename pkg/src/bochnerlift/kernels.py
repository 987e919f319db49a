"""Radial Levy kernels and the dimension lift K_n -> K_{n+2}.

A kernel is described by its profile r -> K(r) on (0, inf) together with
its ambient dimension and two exponents: ``singularity_order`` (K(r) is
at most of order r^(-dimension - singularity_order) near 0) and
``decay_rate`` (at most r^(-dimension - decay_rate) at infinity; ``inf``
for super-polynomial decay).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DivergentKernel, NegativeKernel, TailDivergence
from .quadrature import jacobi_core_rule, legendre_on, panel_rule, tail_rule
from .special import log_gamma, sphere_area

__all__ = [
    "RadialKernel",
    "FractionalKernelSpec",
    "PROBE_RADII",
    "fractional_constant",
    "fractional_kernel",
    "gaussian_kernel",
    "rational_kernel",
    "table_kernel",
    "check_levy_integrability",
    "lift_kernel",
    "unlift_kernel",
    "kernel_from_json",
    "kernel_to_json",
]

PROBE_RADII = 2.0 ** np.arange(-20, 21)
_ENVELOPE_EPS = 1e-3


@dataclass(frozen=True, eq=False)
class RadialKernel:
    dimension: int
    profile: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    decay_rate: float = math.inf
    singularity_order: float = 0.0
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("kernel dimension must be >= 1")

    def __call__(self, r):
        return self.profile(np.asarray(r, dtype=float))

    def deriv(self, r):
        """K'(r); central differences with h = max(1e-5, 1e-5 r) if no analytic form."""
        r = np.asarray(r, dtype=float)
        if self.derivative is not None:
            return self.derivative(r)
        h = np.maximum(1e-5, 1e-5 * r)
        h = np.minimum(h, 0.5 * r)
        return (self.profile(r + h) - self.profile(r - h)) / (2.0 * h)

    @property
    def is_power_tailed(self) -> bool:
        return math.isfinite(self.decay_rate)

    def cutoff_radius(self, rel: float = 1e-18) -> float:
        """Radius past which r^(d+1) K(r) is negligible (super-polynomial kernels)."""
        r = np.linspace(0.25, 64.0, 1024)
        vals = np.abs(self(r)) * r ** (self.dimension + 1)
        peak = vals.max()
        if peak == 0.0:
            return 1.0
        above = np.nonzero(vals > rel * peak)[0]
        return float(r[min(above[-1] + 1, len(r) - 1)])

    def singular_power(self) -> float:
        """Grading exponent p for the core substitution r = a t^p."""
        sigma = self.singularity_order
        if sigma <= 0:
            return 1.0
        return max(1.0, 2.0 / (2.0 - sigma))


@dataclass(frozen=True)
class FractionalKernelSpec:
    dimension: int
    order: float
    constant: float

    def __post_init__(self):
        if not 0.0 < self.order < 1.0:
            raise ValueError("fractional order must lie in (0, 1)")

    @classmethod
    def of(cls, n: int, s: float) -> "FractionalKernelSpec":
        return cls(n, s, fractional_constant(n, s))

    def kernel(self) -> RadialKernel:
        return fractional_kernel(self.dimension, self.order)


def fractional_constant(n: int, s: float) -> float:
    """C(n, s) = 4^s Gamma(n/2 + s) / (pi^(n/2) |Gamma(-s)|).

    With this constant the singular integral of C |y|^(-n-2s) reproduces
    the multiplier (2 pi |xi|)^(2s) of the e^(2 pi i xi.x) transform.
    """
    if not 1 <= n <= 8:
        raise ValueError("fractional_constant supports 1 <= n <= 8")
    if not 0.0 < s < 1.0:
        raise ValueError("fractional order must lie in (0, 1)")
    # |Gamma(-s)| = Gamma(1 - s) / s
    log_c = (
        s * math.log(4.0)
        + log_gamma(n / 2.0 + s)
        - 0.5 * n * math.log(math.pi)
        - log_gamma(1.0 - s)
        + math.log(s)
    )
    return math.exp(log_c)


def fractional_kernel(n: int, s: float) -> RadialKernel:
    c = fractional_constant(n, s)
    a = n + 2.0 * s
    return RadialKernel(
        dimension=n,
        profile=lambda r: c * r ** (-a),
        derivative=lambda r: -a * c * r ** (-a - 1.0),
        decay_rate=2.0 * s,
        singularity_order=2.0 * s,
        family="fractional",
        params={"s": s},
    )


def gaussian_kernel(n: int) -> RadialKernel:
    """K(r) = exp(-pi r^2); a fixed point of the lift in every dimension."""
    return RadialKernel(
        dimension=n,
        profile=lambda r: np.exp(-math.pi * r * r),
        derivative=lambda r: -2.0 * math.pi * r * np.exp(-math.pi * r * r),
        decay_rate=math.inf,
        singularity_order=-float(n),
        family="gaussian",
    )


def rational_kernel(n: int, power: float = 1.0, amplitude: float = 1.0) -> RadialKernel:
    """K(r) = amplitude (1 + r^2)^(-power)."""
    decay = 2.0 * power - n
    if decay <= 0:
        raise DivergentKernel("rational kernel tail is not Levy-integrable")
    return RadialKernel(
        dimension=n,
        profile=lambda r: amplitude * (1.0 + r * r) ** (-power),
        derivative=lambda r: -2.0 * power * amplitude * r * (1.0 + r * r) ** (-power - 1.0),
        decay_rate=decay,
        singularity_order=-float(n),
        family="rational",
        params={"power": power, "amplitude": amplitude},
    )


def table_kernel(n: int, samples) -> RadialKernel:
    """Kernel interpolated monotonically in log-log coordinates.

    Outside the sampled range the end slopes are continued as power laws,
    which also fixes ``singularity_order`` and ``decay_rate``.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 3:
        raise ValueError("table kernel needs at least three [r, value] pairs")
    data = data[np.argsort(data[:, 0])]
    if np.any(data[:, 0] <= 0) or np.any(data[:, 1] <= 0):
        raise ValueError("table kernel samples must have r > 0 and value > 0")
    lr, lk = np.log(data[:, 0]), np.log(data[:, 1])
    interp = PchipInterpolator(lr, lk, extrapolate=False)
    dinterp = interp.derivative()
    slope_lo = (lk[1] - lk[0]) / (lr[1] - lr[0])
    slope_hi = (lk[-1] - lk[-2]) / (lr[-1] - lr[-2])

    def log_profile(r):
        x = np.log(r)
        out = interp(np.clip(x, lr[0], lr[-1]))
        out = np.where(x < lr[0], lk[0] + slope_lo * (x - lr[0]), out)
        return np.where(x > lr[-1], lk[-1] + slope_hi * (x - lr[-1]), out)

    def log_slope(r):
        x = np.log(r)
        out = dinterp(np.clip(x, lr[0], lr[-1]))
        out = np.where(x < lr[0], slope_lo, out)
        return np.where(x > lr[-1], slope_hi, out)

    def profile(r):
        return np.exp(log_profile(r))

    def derivative(r):
        return profile(r) * log_slope(r) / r

    return RadialKernel(
        dimension=n,
        profile=profile,
        derivative=derivative,
        decay_rate=-slope_hi - n,
        singularity_order=-slope_lo - n,
        family="table",
        params={"samples": data.tolist()},
    )


def _local_exponent(f, r_lo: float, r_hi: float) -> float | None:
    a, b = float(f(r_lo)), float(f(r_hi))
    if a <= 0.0 or b <= 0.0:
        return None
    return math.log(b / a) / math.log(r_hi / r_lo)


def check_levy_integrability(K: RadialKernel) -> float:
    """|S^(n-1)| int_0^inf min(1, r^2) K(r) r^(n-1) dr, with divergence probes."""
    n = K.dimension
    vals = K(PROBE_RADII)
    if np.any(vals < 0):
        raise NegativeKernel("kernel profile is negative at a probe radius")
    near = _local_exponent(lambda r: r ** (n + 1) * K(r), PROBE_RADII[0], PROBE_RADII[1])
    if near is not None and near <= -1.0 + _ENVELOPE_EPS:
        raise DivergentKernel(
            f"min(1,r^2) K r^(n-1) ~ r^{near:.4f} near 0 is not integrable"
        )
    far = _local_exponent(lambda r: r ** (n - 1) * K(r), PROBE_RADII[-2], PROBE_RADII[-1])
    if far is not None and far >= -1.0 - _ENVELOPE_EPS:
        raise DivergentKernel(f"K r^(n-1) ~ r^{far:.4f} at infinity is not integrable")

    total = 0.0
    # core [0, 1]: Gauss-Jacobi against the r^(1 - sigma) behaviour of r^(n+1) K(r)
    sigma = K.singularity_order
    if 0.0 < sigma < 2.0:
        r, w = jacobi_core_rule(1.0, 64, 1.0 - sigma)
        total += float(np.sum(w * r ** (n + 1) * K(r)))
    else:
        r, w = panel_rule(0.0, 1.0, 0.25, 32)
        total += float(np.sum(w * r ** (n + 1) * K(r)))
    if K.is_power_tailed:
        edges = 2.0 ** np.arange(0, 7)
        for lo, hi in zip(edges[:-1], edges[1:]):
            r, w = legendre_on(lo, hi, 32)
            total += float(np.sum(w * r ** (n - 1) * K(r)))
        r, w = tail_rule(edges[-1], K.decay_rate, 48)
        total += float(np.sum(w * r ** (n - 1) * K(r)))
    else:
        r, w = panel_rule(1.0, max(2.0, K.cutoff_radius()), 0.5, 24)
        total += float(np.sum(w * r ** (n - 1) * K(r)))
    if not math.isfinite(total):
        raise DivergentKernel("Levy integral evaluated to a non-finite value")
    return sphere_area(n) * total


def lift_kernel(K: RadialKernel, allow_negative: bool = False) -> RadialKernel:
    """K_{n+2}(r) = -K_n'(r) / (2 pi r).

    A positive derivative at any dyadic probe radius means the lifted
    density is negative somewhere; this raises ``NegativeKernel`` unless
    ``allow_negative`` is set.
    """
    slopes = K.deriv(PROBE_RADII)
    if not allow_negative and np.any(slopes > 0):
        bad = PROBE_RADII[np.argmax(slopes > 0)]
        raise NegativeKernel(f"kernel increases at r = {bad:g}; lifted density would be negative")
    sigma = K.singularity_order
    lifted_sigma = sigma if sigma > -K.dimension else -float(K.dimension + 2)
    lifted = RadialKernel(
        dimension=K.dimension + 2,
        profile=lambda r: -K.deriv(r) / (2.0 * math.pi * r),
        derivative=None,
        decay_rate=K.decay_rate,
        singularity_order=lifted_sigma,
        family="lifted",
        params={"base": kernel_to_json(K) if K.family != "custom" else None},
    )
    if not allow_negative:
        check_levy_integrability(lifted)
    return lifted


def unlift_kernel(K2: RadialKernel) -> RadialKernel:
    """K_n(r) = 2 pi int_r^inf t K_{n+2}(t) dt (inverse of :func:`lift_kernel`)."""
    n = K2.dimension - 2
    if n < 1:
        raise ValueError("unlift needs a kernel in dimension >= 3")
    tail_sigma = n + K2.decay_rate
    if K2.is_power_tailed and tail_sigma <= 0:
        raise TailDivergence("t K_{n+2}(t) is not integrable at infinity")

    def marched(r: float) -> float:
        # super-polynomial decay: march panels outward until they stop contributing
        width = min(0.125, 0.5 / (1.0 + r))
        lo, total, quiet = r, 0.0, 0
        for _ in range(4000):
            t, w = legendre_on(lo, lo + width, 24)
            piece = float(np.sum(w * t * K2(t)))
            total += piece
            quiet = quiet + 1 if abs(piece) <= 1e-17 * abs(total) else 0
            if quiet >= 2 or (total == 0.0 and lo > r + 64.0):
                return total
            lo += width
            width *= 1.25
        raise TailDivergence("tail integral of the lifted kernel did not settle")

    def integral(r: float) -> float:
        if not r > 0.0:
            raise ValueError("unlifted kernel is evaluated at r > 0 only")
        if not K2.is_power_tailed:
            return 2.0 * math.pi * marched(r)
        far = max(16.0, 4.0 * r)
        edges = [r]
        while edges[-1] < far:
            edges.append(min(far, 2.0 * edges[-1]))
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            t, w = legendre_on(lo, hi, 24)
            total += float(np.sum(w * t * K2(t)))
        t, w = tail_rule(edges[-1], tail_sigma, 48)
        total += float(np.sum(w * t * K2(t)))
        if not math.isfinite(total):
            raise TailDivergence("tail integral of the lifted kernel diverged")
        return 2.0 * math.pi * total

    def profile(r):
        r = np.asarray(r, dtype=float)
        flat = np.array([integral(float(v)) for v in r.ravel()])
        return flat.reshape(r.shape) if r.ndim else float(flat[0])

    sigma = K2.singularity_order
    return RadialKernel(
        dimension=n,
        profile=profile,
        derivative=lambda r: -2.0 * math.pi * r * K2(r),
        decay_rate=K2.decay_rate,
        singularity_order=sigma if sigma > -K2.dimension else -float(n),
        family="unlifted",
    )


def kernel_from_json(obj: dict) -> RadialKernel:
    family = obj.get("family")
    allowed = {"family", "n", "s", "samples", "power", "amplitude"}
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown kernel field(s): {sorted(unknown)}")
    n = obj.get("n")
    if not isinstance(n, int) or n < 1:
        raise ValueError("kernel field 'n' must be a positive integer")
    if family == "fractional":
        if "s" not in obj:
            raise ValueError("fractional kernel needs field 's'")
        return fractional_kernel(n, float(obj["s"]))
    if family == "gaussian":
        return gaussian_kernel(n)
    if family == "rational":
        return rational_kernel(n, float(obj.get("power", 1.0)), float(obj.get("amplitude", 1.0)))
    if family == "table":
        if "samples" not in obj:
            raise ValueError("table kernel needs field 'samples'")
        return table_kernel(n, obj["samples"])
    raise ValueError(f"unknown kernel family {family!r}")


def kernel_to_json(K: RadialKernel) -> dict:
    if K.family == "fractional":
        return {"family": "fractional", "n": K.dimension, "s": K.params["s"]}
    if K.family == "gaussian":
        return {"family": "gaussian", "n": K.dimension}
    if K.family == "rational":
        return {"family": "rational", "n": K.dimension, **K.params}
    if K.family == "table":
        return {"family": "table", "n": K.dimension, "samples": K.params["samples"]}
    r = np.geomspace(1e-3, 1e3, 61)
    return {"family": "table", "n": K.dimension, "samples": np.stack([r, K(r)], 1).tolist()}
