"""Named test fields used by the command line front-end and the test suite."""
from __future__ import annotations

import math

import numpy as np

from .lift import Field

__all__ = [
    "odd_gaussian",
    "odd_rational",
    "odd_mixed",
    "bump",
    "odd_bump",
    "iso_profile",
    "even_profile",
    "truncated_gaussian",
    "ODD_FIELDS",
    "ISO_PROFILES",
    "EVEN_PROFILES",
]


def _sq(p: np.ndarray) -> np.ndarray:
    return np.sum(p * p, axis=-1)


def odd_gaussian(n: int) -> Field:
    """x_1 exp(-pi |x|^2)."""
    return Field(
        n,
        lambda p: p[..., 0] * np.exp(-math.pi * _sq(p)),
        "antisymmetric",
        decay_bound=(1.0, 50.0),
        first_normal_derivative=lambda q: np.exp(-math.pi * np.sum(q * q, axis=-1)),
        name="odd-gaussian",
    )


def odd_rational(n: int) -> Field:
    """x_1 (1 + |x|^2)^-2."""
    return Field(
        n,
        lambda p: p[..., 0] * (1.0 + _sq(p)) ** -2,
        "antisymmetric",
        decay_bound=(1.0, 3.0),
        first_normal_derivative=lambda q: (1.0 + np.sum(q * q, axis=-1)) ** -2,
        name="odd-rational",
    )


def odd_mixed(n: int) -> Field:
    """sin(x_1) exp(-|x|^2) (1 + cos(x_n) / 2)."""
    return Field(
        n,
        lambda p: np.sin(p[..., 0]) * np.exp(-_sq(p)) * (1.0 + 0.5 * np.cos(p[..., -1])),
        "antisymmetric",
        decay_bound=(1.5, 50.0),
        name="odd-mixed",
    )


def bump(d: int, a: float = 1.5, center=None) -> Field:
    """exp(-1 / (1 - |x - center|^2 / a^2)) inside the ball, 0 outside."""
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    def evaluate(p):
        t = _sq(p - c) / (a * a)
        out = np.zeros(t.shape)
        inside = t < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside]))
        return out

    return Field(d, evaluate, "none", decay_bound=(1.0, 50.0), name="bump")


def odd_bump(n: int, a: float = 1.5) -> Field:
    b = bump(n, a)
    return Field(n, lambda p: p[..., 0] * b(p), "antisymmetric", decay_bound=(a, 50.0),
                 name="odd-bump")


def _sech_of_root(q):
    # sech(sqrt(q)) written to avoid overflow in cosh
    e = np.exp(-np.sqrt(q))
    return 2.0 * e / (1.0 + e * e)


def _iso(d: int, f, decay: float, name: str) -> Field:
    return Field(d, lambda p: f(_sq(p)), "isotropic3", decay_bound=(1.0, decay), name=name)


ISO_PROFILES = {
    "one": lambda d: Field(d, lambda p: np.ones(p.shape[:-1]), "isotropic3", name="one"),
    "gaussian": lambda d: _iso(d, lambda q: np.exp(-math.pi * q), 50.0, "gaussian"),
    "rational": lambda d: _iso(d, lambda q: 1.0 / (1.0 + q), 2.0, "rational"),
    "sech": lambda d: _iso(d, _sech_of_root, 50.0, "sech"),
}


def iso_profile(name: str, d: int) -> Field:
    """A positive 3-isotropic field on R^d by name."""
    try:
        return ISO_PROFILES[name](d)
    except KeyError:
        raise ValueError(f"unknown isotropic profile {name!r}") from None


ODD_FIELDS = {
    "odd-gaussian": odd_gaussian,
    "odd-rational": odd_rational,
    "odd-mixed": odd_mixed,
}

# even profiles on R with their power-law decay exponent (None = faster than any power)
EVEN_PROFILES = {
    "gaussian": (lambda x: np.exp(-math.pi * x * x), None),
    "rational": (lambda x: (1.0 + x * x) ** -2, 4.0),
    "cos-gaussian": (lambda x: np.exp(-x * x) * np.cos(x), None),
}


def even_profile(name: str) -> tuple[Field, float | None]:
    try:
        f, decay = EVEN_PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown even profile {name!r}") from None
    bound = (1.0, 50.0 if decay is None else decay)
    return Field(1, lambda p: f(p[..., 0]), "symmetric", decay_bound=bound, name=name), decay


def truncated_gaussian(d: int, radius: float = 1.0) -> Field:
    """exp(-pi |x|^2) restricted to the closed ball of the given radius (discontinuous)."""
    def evaluate(p):
        q = _sq(p)
        return np.where(q <= radius * radius, np.exp(-math.pi * q), 0.0)

    sym = "isotropic3" if d >= 3 else "none"
    return Field(d, evaluate, sym, smoothness=0.0, decay_bound=(1.0, 50.0),
                 name="truncated-gaussian")
