"""Antisymmetric fields on R^n and their 3-isotropic lifts to R^(n+2).

A function u on R^n that is odd in x_1 corresponds to

    v(y) = u(|y_{1..3}|, y_4, ..., y_{n+2}) / |y_{1..3}|

on R^(n+2), which depends on its first three coordinates only through
their norm.  This module implements the correspondence, the two weighted
L^1 norms it preserves, symmetrization helpers and mollification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import MissingNormalDerivative, NonIntegrable
from .quadrature import (
    half_line_rule,
    hemisphere_rule,
    legendre_on,
    panel_rule,
    sphere_rule,
    tail_rule,
)
from .special import sphere_area

__all__ = [
    "SYMMETRIES",
    "DEGENERATE_RADIUS",
    "Field",
    "WeightedMeasureSpec",
    "lift_field",
    "restrict_field",
    "isotropic_symmetrize",
    "isotropic_extension",
    "antisymmetric_part",
    "weighted_norm_As",
    "weighted_norm_Ls",
    "weighted_l1",
    "mollify",
    "mollifier_convergence_report",
    "continuity_modulus",
    "mollifier_error_bound",
]

SYMMETRIES = ("none", "antisymmetric", "symmetric", "isotropic3")
DEGENERATE_RADIUS = 1e-6
SYMMETRIZE_NODES = 32


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar function on R^d evaluated on arrays of points with shape (..., d).

    ``decay_bound = (C, p)`` declares |f(x)| <= C (1 + |x|)^(-p);
    ``first_normal_derivative`` maps x' in R^(d-1) to d_1 f(0, x').
    """

    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    symmetry: str = "none"
    smoothness: float = math.inf
    decay_bound: tuple[float, float] | None = None
    first_normal_derivative: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "field"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.symmetry not in SYMMETRIES:
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")
        if self.symmetry == "isotropic3" and self.dimension < 3:
            raise ValueError("isotropic3 fields need dimension >= 3")

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dimension:
            raise ValueError(f"expected points of dimension {self.dimension}")
        return np.asarray(self.evaluate(pts), dtype=float)

    def at(self, x) -> float:
        return float(self(np.asarray(x, dtype=float)[None, :])[0])

    def normal_derivative(self, xprime) -> np.ndarray:
        if self.first_normal_derivative is None:
            raise MissingNormalDerivative(f"{self.name} has no first_normal_derivative")
        return np.asarray(self.first_normal_derivative(np.asarray(xprime, dtype=float)))

    def probe_points(self, count: int = 16) -> np.ndarray:
        rng = np.random.default_rng(20240601 + self.dimension)
        return rng.uniform(-2.0, 2.0, size=(count, self.dimension))

    def validate(self, tol: float = 1e-12) -> None:
        """Check the declared symmetry tag at deterministic probe points."""
        p = self.probe_points()
        if self.symmetry in ("antisymmetric", "symmetric"):
            q = p.copy()
            q[:, 0] *= -1.0
            sign = -1.0 if self.symmetry == "antisymmetric" else 1.0
            gap = np.abs(self(q) - sign * self(p))
            if np.any(gap > tol * np.maximum(1.0, np.abs(self(p)))):
                raise ValueError(f"{self.name} violates its {self.symmetry} tag")
        elif self.symmetry == "isotropic3":
            a = np.linalg.norm(p[:, :3], axis=1)
            e1 = np.zeros_like(p)
            e2 = np.zeros_like(p)
            e1[:, 0] = a
            e2[:, 1] = a
            e1[:, 3:] = p[:, 3:]
            e2[:, 3:] = p[:, 3:]
            ref = self(e1)
            if np.any(np.abs(self(e2) - ref) > tol * np.maximum(1.0, np.abs(ref))):
                raise ValueError(f"{self.name} violates its isotropic3 tag")
            if np.any(np.abs(self(p) - ref) > 1e3 * tol * np.maximum(1.0, np.abs(ref))):
                raise ValueError(f"{self.name} violates its isotropic3 tag")


@dataclass(frozen=True)
class WeightedMeasureSpec:
    """d mu = dx / (1 + |x|)^alpha on R^dimension."""

    dimension: int
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def ensure_finite(self) -> None:
        if self.alpha <= self.dimension:
            raise NonIntegrable(
                f"alpha = {self.alpha} <= d = {self.dimension}: bounded fields have infinite mu-norm"
            )

    def ball_measure(self, radius: float) -> float:
        r, w = panel_rule(0.0, radius, 0.25, 24)
        return sphere_area(self.dimension) * float(
            np.sum(w * r ** (self.dimension - 1) * (1.0 + r) ** (-self.alpha))
        )


def _split_iso(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.norm(points[..., :3], axis=-1), points[..., 3:]


def lift_field(u: Field) -> Field:
    """3-isotropic lift v(y) = u(|y_{1..3}|, y') / |y_{1..3}| on R^(n+2).

    Within ``DEGENERATE_RADIUS`` of {y_1 = y_2 = y_3 = 0} the limit
    d_1 u(0, y') is returned; the first-order Taylor term of u(rho, y')/rho
    vanishes there because u is odd in x_1.
    """
    if u.symmetry != "antisymmetric":
        raise ValueError("lift_field expects an antisymmetric field")
    n = u.dimension

    def evaluate(points):
        rho, rest = _split_iso(points)
        inner = np.concatenate([rho[..., None], rest], axis=-1)
        near = rho < DEGENERATE_RADIUS
        safe = np.where(near, 1.0, rho)
        out = u(inner) / safe
        if np.any(near):
            out = np.where(near, u.normal_derivative(rest), out)
        return out

    decay = None
    if u.decay_bound is not None:
        decay = (u.decay_bound[0], u.decay_bound[1] - 1.0)
    return Field(
        dimension=n + 2,
        evaluate=evaluate,
        symmetry="isotropic3",
        smoothness=u.smoothness,
        decay_bound=decay,
        name=f"lift({u.name})",
        meta={"base": u},
    )


def restrict_field(v: Field) -> Field:
    """u(x) = x_1 v((x_1, 0, 0), x_2, ..., x_n), antisymmetric on R^(n)."""
    if v.symmetry != "isotropic3":
        raise ValueError("restrict_field expects an isotropic3 field")
    n = v.dimension - 2

    def embed(x1, rest):
        pts = np.zeros(x1.shape + (n + 2,))
        pts[..., 0] = x1
        pts[..., 3:] = rest
        return pts

    def evaluate(points):
        x1 = points[..., 0]
        return x1 * v(embed(x1, points[..., 1:]))

    def normal(rest):
        return v(embed(np.zeros(rest.shape[:-1]), rest))

    decay = None
    if v.decay_bound is not None:
        decay = (v.decay_bound[0], v.decay_bound[1] + 1.0)
    return Field(
        dimension=n,
        evaluate=evaluate,
        symmetry="antisymmetric",
        smoothness=v.smoothness,
        decay_bound=decay,
        first_normal_derivative=normal,
        name=f"restrict({v.name})",
    )


def isotropic_symmetrize(f: Field, nodes: int = SYMMETRIZE_NODES) -> Field:
    """f_sym(x) = (1/4 pi) int_{S^2} f(|x_1| z, x_2, ..., x_n) dH^2(z), on R^(n)."""
    n = f.dimension - 2
    if n < 1:
        raise ValueError("isotropic_symmetrize needs a field on R^(n+2), n >= 1")
    z, w = sphere_rule(3, nodes)
    w = w / (4.0 * math.pi)

    def evaluate(points):
        a = np.abs(points[..., :1])
        lifted = np.empty(points.shape[:-1] + (len(w), n + 2))
        lifted[..., :3] = a[..., None, :] * z
        lifted[..., 3:] = points[..., None, 1:]
        return f(lifted) @ w

    return Field(
        dimension=n,
        evaluate=evaluate,
        symmetry="symmetric",
        smoothness=f.smoothness,
        decay_bound=f.decay_bound,
        name=f"sym({f.name})",
    )


def isotropic_extension(f: Field) -> Field:
    """Field on R^(n+2) given by y -> f(|y_{1..3}|, y'); isotropic3 by construction."""

    def evaluate(points):
        rho, rest = _split_iso(points)
        return f(np.concatenate([rho[..., None], rest], axis=-1))

    return Field(
        dimension=f.dimension + 2,
        evaluate=evaluate,
        symmetry="isotropic3",
        smoothness=f.smoothness,
        decay_bound=f.decay_bound,
        name=f"ext({f.name})",
    )


def antisymmetric_part(g: Field) -> Field:
    """g_A(x) = (g(x_1, x') - g(-x_1, x')) / 2."""
    if g.symmetry == "antisymmetric":
        return g
    if g.symmetry == "symmetric":
        return Field(g.dimension, lambda p: np.zeros(p.shape[:-1]), "antisymmetric",
                     g.smoothness, (0.0, 0.0), lambda q: np.zeros(q.shape[:-1]),
                     name=f"odd({g.name})")

    def evaluate(points):
        mirrored = points.copy()
        mirrored[..., 0] *= -1.0
        return 0.5 * (g(points) - g(mirrored))

    return Field(
        dimension=g.dimension,
        evaluate=evaluate,
        symmetry="antisymmetric",
        smoothness=g.smoothness,
        decay_bound=g.decay_bound,
        first_normal_derivative=g.first_normal_derivative,
        name=f"odd({g.name})",
    )


def _decay_exponent(f: Field) -> float:
    if f.decay_bound is None:
        raise ValueError(f"{f.name} needs a decay_bound for weighted norms")
    return float(f.decay_bound[1])


def _radial_rule(sigma: float, truncation: float = 8.0) -> tuple[np.ndarray, np.ndarray]:
    """Rule on [0, inf) for integrands smooth in r decaying like r^(-1-sigma)."""
    if sigma <= 0:
        raise NonIntegrable(f"radial integrand decays like r^{-1 - sigma:.3g}")
    near = np.array([0.0, 0.0625, 0.125, 0.25, 0.5])
    xs, ws = [], []
    for lo, hi in zip(near[:-1], near[1:]):
        x, w = legendre_on(lo, hi, 16)
        xs.append(x)
        ws.append(w)
    x, w = half_line_rule(0.5, truncation, sigma, 0.5, 16, 40)
    xs.append(x)
    ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def weighted_norm_As(u: Field, s: float, angular_nodes: int = 24) -> float:
    """2 pi int_{R^n} |x_1| |u(x)| (1 + |x|)^(-n-2-2s) dx.

    The 2 pi prefactor makes this norm coincide with the L_s norm of the
    3-isotropic lift; the integral is done in polar coordinates over the
    half-space x_1 > 0 and doubled (|u| is even in x_1).
    """
    n = u.dimension
    alpha = n + 2.0 + 2.0 * s
    p = _decay_exponent(u)
    r, wr = _radial_rule(1.0 + 2.0 * s + p)
    omega, wo = hemisphere_rule(n, angular_nodes)
    pts = r[:, None, None] * omega[None, :, :]
    vals = np.abs(u(pts)) * np.abs(pts[..., 0])
    radial = r ** (n - 1) * (1.0 + r) ** (-alpha)
    total = 2.0 * float(np.sum(wr * radial * (vals @ wo)))
    if not math.isfinite(total):
        raise NonIntegrable(f"A_s norm of {u.name} is not finite")
    return 2.0 * math.pi * total


def weighted_norm_Ls(v: Field, s: float, angular_nodes: int = 24) -> float:
    """int_{R^(n+2)} |v(y)| (1 + |y|)^(-n-2-2s) dy.

    For isotropic3 fields the 3-block is integrated in its radius tau,

        4 pi int_0^inf int_{R^(n-1)} tau^2 |v((tau,0,0), b)| (1 + sqrt(tau^2 + |b|^2))^(-n-2-2s) db dtau,

    with b in polar coordinates; other fields use polar coordinates in y.
    """
    d = v.dimension
    alpha = d + 2.0 * s
    p = _decay_exponent(v)
    if v.symmetry != "isotropic3":
        r, wr = _radial_rule(2.0 * s + p)
        omega, wo = sphere_rule(d, angular_nodes)
        vals = np.abs(v(r[:, None, None] * omega[None, :, :])) @ wo
        total = float(np.sum(wr * r ** (d - 1) * (1.0 + r) ** (-alpha) * vals))
    else:
        m = d - 3
        sigma = 2.0 * s + p
        if sigma <= 0:
            raise NonIntegrable(f"L_s norm of {v.name} diverges")
        tau, wt = _radial_rule(sigma)
        if m == 0:
            pts = np.zeros((len(tau), d))
            pts[:, 0] = tau
            total = float(np.sum(wt * tau * tau * np.abs(v(pts)) * (1.0 + tau) ** (-alpha)))
        else:
            # b = rho theta in polar coordinates on R^m, one tau node at a time
            rho, wr = _radial_rule(sigma + 3.0)
            theta, wth = sphere_rule(m, angular_nodes)
            b = (rho[:, None, None] * theta[None, :, :]).reshape(-1, m)
            wb = np.outer(wr * rho ** (m - 1), wth).ravel()
            b2 = np.repeat(rho * rho, len(wth))
            pts = np.zeros((len(wb), d))
            pts[:, 3:] = b
            total = 0.0
            for t, w in zip(tau, wt):
                pts[:, 0] = t
                weight = (1.0 + np.sqrt(t * t + b2)) ** (-alpha)
                total += w * t * t * float(np.sum(wb * np.abs(v(pts)) * weight))
        total *= 4.0 * math.pi
    if not math.isfinite(total):
        raise NonIntegrable(f"L_s norm of {v.name} is not finite")
    return total


def weighted_l1(f: Field, spec: WeightedMeasureSpec, breaks=(), truncation: float = 8.0,
                angular_nodes: int = 16) -> float:
    """int |f| d mu for d mu = dx / (1 + |x|)^alpha.

    Radially symmetric fields (isotropic3 in dimension 3) reduce to a 1-D
    integral; ``breaks`` adds radial panel edges at known kinks of f.
    """
    d = spec.dimension
    if f.dimension != d:
        raise ValueError("measure and field dimensions differ")
    edges = sorted({0.0, truncation, *[float(b) for b in breaks if 0 < b < truncation]})
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = panel_rule(lo, hi, 0.125, 16)
        xs.append(x)
        ws.append(w)
    p = 0.0 if f.decay_bound is None else float(f.decay_bound[1])
    sigma = spec.alpha + p - d
    if sigma <= 0:
        raise NonIntegrable("weighted L1 norm diverges under the declared decay")
    x, w = tail_rule(truncation, sigma, 32)
    r, wr = np.concatenate(xs + [x]), np.concatenate(ws + [w])
    radial = wr * r ** (d - 1) * (1.0 + r) ** (-spec.alpha)
    if (f.symmetry == "isotropic3" and d == 3) or (d == 1 and f.symmetry == "symmetric"):
        pts = np.zeros((len(r), d))
        pts[:, 0] = r
        return sphere_area(d) * float(np.sum(radial * np.abs(f(pts))))
    omega, wo = sphere_rule(d, angular_nodes)
    vals = np.abs(f(r[:, None, None] * omega[None, :, :])) @ wo
    return float(np.sum(radial * vals))


def _bump_rule(d: int, radial_nodes: int, angular_nodes: int):
    """Nodes z in the unit ball and weights w with sum w eta(z) = 1 exactly."""
    r, wr = legendre_on(0.0, 1.0, radial_nodes)
    omega, wo = sphere_rule(d, angular_nodes)
    bump = np.exp(-1.0 / (1.0 - r * r))
    radial = wr * r ** (d - 1) * bump
    mass = float(np.sum(radial)) * float(np.sum(wo))
    pts = (r[:, None, None] * omega[None, :, :]).reshape(-1, d)
    w = np.outer(radial, wo).ravel() / mass
    return pts, w


def mollify(v: Field, eps: float, radial_nodes: int = 16, angular_nodes: int = 8) -> Field:
    """v * eta_eps with the standard bump eta(x) = c exp(-1/(1 - |x|^2)).

    The normalising constant c is computed with the same product rule
    that evaluates the convolution, so constants are reproduced exactly.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    d = v.dimension
    z, w = _bump_rule(d, radial_nodes, angular_nodes)
    shift = eps * z

    def evaluate(points):
        vals = v(points[..., None, :] - shift)
        return vals @ w

    return replace(v, evaluate=evaluate, first_normal_derivative=None,
                   name=f"mollify({v.name}, {eps:g})", meta={})


def mollifier_convergence_report(v: Field, spec: WeightedMeasureSpec, eps_schedule,
                                 breaks=()) -> list[float]:
    """||v * eta_eps - v||_{L^1(mu)} for each eps in the schedule."""
    out = []
    for eps in eps_schedule:
        smooth = mollify(v, float(eps))
        diff = replace(v, evaluate=lambda p, smooth=smooth: smooth(p) - v(p),
                       name="difference", meta={})
        out.append(weighted_l1(diff, spec, breaks=breaks))
    return out


def continuity_modulus(v: Field, eps: float, radius: float, lattice: int = 21,
                       directions: int = 8) -> float:
    """Sampled sup of |v(x + h) - v(x)| over |h| <= eps, x in [-radius, radius]^d."""
    d = v.dimension
    axis = np.linspace(-radius, radius, lattice)
    base = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    omega, _ = sphere_rule(d, directions)
    ref = v(base)
    worst = 0.0
    for frac in (0.25, 0.5, 0.75, 1.0):
        moved = base[:, None, :] + frac * eps * omega[None, :, :]
        worst = max(worst, float(np.max(np.abs(v(moved) - ref[:, None]))))
    return worst


def mollifier_error_bound(v: Field, spec: WeightedMeasureSpec, eps: float, support_radius: float,
                          modulus: float | None = None) -> float:
    """omega_v(eps) mu(B_{2R}) for v continuous and supported in B_R, eps <= R."""
    if modulus is None:
        modulus = continuity_modulus(v, eps, support_radius + eps)
    return modulus * spec.ball_measure(2.0 * support_radius)
