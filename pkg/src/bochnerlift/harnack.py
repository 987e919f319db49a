"""Manufactured antisymmetric Schroedinger problems and boundary Harnack quotients.

Given a positive 3-isotropic v on R^(n+2) and an operator L, the pair

    u(x) = x_1 v((x_1, 0, 0), x'),   c(x) = -L_{n+2} v / v  at ((|x_1|, 0, 0), x')

solves L_n u + c u = 0 away from the hyperplane.  The reports below
sample such problems on fixed lattices and compare the quotient u / x_1
with the lifted function v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    EmptyK0,
    NotSubsolution,
    NotSupersolution,
    PositivityFailure,
    QuadratureFailure,
)
from .kernels import FractionalKernelSpec, RadialKernel, fractional_constant, fractional_kernel, lift_kernel
from .lift import Field, restrict_field, weighted_norm_As
from .operators import DEFAULT_SPEC, apply_levy_batch, apply_levy_direct
from .quadrature import QuadratureSpec, legendre_on, sphere_rule
from .special import ball_volume

__all__ = [
    "Box",
    "CompactSetSpec",
    "SchroedingerProblem",
    "HarnackReport",
    "manufacture_solution",
    "quotient_report",
    "verify_theorem_odd_harnack",
    "weak_harnack_report",
    "local_boundedness_report",
    "annulus_bound_constant",
    "annulus_flap_lower_bound",
    "half_ball_samples",
]

POSITIVITY_FLOOR = 1e-6
EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class Box:
    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise ValueError("box bounds must have equal, nonzero length")
        if any(a >= b for a, b in zip(self.lows, self.highs)):
            raise ValueError("box needs lows < highs on every axis")

    @property
    def dimension(self) -> int:
        return len(self.lows)

    def lattice(self, density: int, interior: bool = False) -> np.ndarray:
        axes = []
        for a, b in zip(self.lows, self.highs):
            pts = np.linspace(a, b, density + 2 if interior else density)
            axes.append(pts[1:-1] if interior else pts)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension)


@dataclass(frozen=True)
class CompactSetSpec:
    """Box K (it may straddle x_1 = 0) sampled at ``sample_density`` points per axis.

    K_0 drops the samples with |x_1| <= exclusion; with the default
    exclusion 0 only the hyperplane itself is removed, and hyperplane
    samples contribute through d_1 u(0, x').
    """

    box: Box
    exclusion: float = 0.0
    sample_density: int = 17

    def samples(self) -> np.ndarray:
        return self.box.lattice(self.sample_density)


@dataclass(frozen=True, eq=False)
class SchroedingerProblem:
    operator: object
    domain: Box
    potential: Field
    solution: Field
    vtilde: Field | None = None
    c_sup: float = 0.0
    residual_max: float = 0.0
    residual_tol: float = 1e-3
    spec: QuadratureSpec = DEFAULT_SPEC
    meta: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.solution.dimension

    def kernels(self) -> tuple[RadialKernel, RadialKernel]:
        return _kernel_pair(self.operator, self.dimension)

    def scaled(self, lam: float) -> "SchroedingerProblem":
        """The same problem with u and v multiplied by lam > 0 (c is unchanged)."""
        if lam <= 0:
            raise ValueError("scale must be positive")
        u, v = self.solution, self.vtilde
        su = _scaled_field(u, lam)
        sv = None if v is None else _scaled_field(v, lam)
        return SchroedingerProblem(self.operator, self.domain, self.potential, su, sv,
                                   self.c_sup, lam * self.residual_max, self.residual_tol,
                                   self.spec, dict(self.meta))


def _scaled_field(f: Field, lam: float) -> Field:
    deriv = f.first_normal_derivative
    decay = None if f.decay_bound is None else (lam * f.decay_bound[0], f.decay_bound[1])
    return Field(
        f.dimension,
        lambda p: lam * f(p),
        f.symmetry,
        f.smoothness,
        decay,
        None if deriv is None else (lambda q: lam * np.asarray(deriv(q))),
        name=f"{lam:g}*{f.name}",
    )


@dataclass(frozen=True)
class HarnackReport:
    sup_quotient: float
    inf_quotient: float
    ratio: float
    lifted_sup: float
    lifted_inf: float
    residual_max: float
    points: np.ndarray = field(repr=False, default=None)
    quotients: np.ndarray = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "sup": self.sup_quotient,
            "inf": self.inf_quotient,
            "ratio": self.ratio,
            "lifted_sup": self.lifted_sup,
            "lifted_inf": self.lifted_inf,
            "residual_max": self.residual_max,
        }


def _kernel_pair(op, n: int) -> tuple[RadialKernel, RadialKernel]:
    if isinstance(op, FractionalKernelSpec):
        return fractional_kernel(n, op.order), fractional_kernel(n + 2, op.order)
    if isinstance(op, RadialKernel):
        return op, lift_kernel(op)
    s = float(op)
    return fractional_kernel(n, s), fractional_kernel(n + 2, s)


def _iso_points(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    out = np.zeros(x.shape[:-1] + (n + 2,))
    out[..., 0] = np.abs(x[..., 0])
    out[..., 3:] = x[..., 1:]
    return out


def _lifted_closure(omega: Box, density: int) -> np.ndarray:
    reach = max(abs(omega.lows[0]), abs(omega.highs[0]))
    lo = 0.0 if omega.lows[0] <= 0.0 <= omega.highs[0] else min(abs(omega.lows[0]), abs(omega.highs[0]))
    half = Box((lo,) + omega.lows[1:], (max(reach, lo + 1e-12),) + omega.highs[1:])
    return _iso_points(half.lattice(density))


def _positive_half(omega: Box) -> Box:
    if omega.highs[0] <= 0.0:
        raise ValueError("domain has no part with x_1 > 0")
    return Box((max(omega.lows[0], 0.0),) + omega.lows[1:], omega.highs)


def manufacture_solution(
    vtilde: Field,
    op,
    omega: Box,
    sample_density: int = 7,
    spec: QuadratureSpec = DEFAULT_SPEC,
    threads: int = 1,
) -> SchroedingerProblem:
    """Build (u, c) from a positive 3-isotropic v so that L_n u + c u = 0 on Omega_+.

    c is evaluated on demand by direct quadrature of L_{n+2} v and is even
    in x_1.  The residual of L_n u + c u is then measured with an
    independent evaluation of L_n u on interior samples of Omega_+.
    """
    if vtilde.symmetry != "isotropic3":
        raise ValueError("vtilde must be tagged isotropic3")
    n = vtilde.dimension - 2
    if omega.dimension != n:
        raise ValueError("domain dimension must be vtilde.dimension - 2")
    closure = _lifted_closure(omega, max(sample_density, 5))
    floor = float(np.min(vtilde(closure)))
    if not floor >= POSITIVITY_FLOOR:
        raise PositivityFailure(f"vtilde drops to {floor:.3e} on the lifted closure of the domain")
    K_n, K_n2 = _kernel_pair(op, n)
    u = restrict_field(vtilde)

    @lru_cache(maxsize=65536)
    def c_at(key: tuple) -> float:
        y = _iso_points(np.array(key)[None, :])[0]
        return -apply_levy_direct(K_n2, vtilde, y, spec) / float(vtilde(y[None, :])[0])

    def c_eval(points):
        flat = points.reshape(-1, n)
        vals = np.array([c_at(tuple(float(t) for t in p)) for p in flat])
        return vals.reshape(points.shape[:-1])

    potential = Field(n, c_eval, "symmetric", name="c")
    inner = _positive_half(omega).lattice(sample_density, interior=True)
    c_vals = c_eval(inner)
    lu = apply_levy_batch(K_n, u, inner, spec, threads)
    residual = np.abs(lu + c_vals * u(inner))
    c_sup = float(np.max(np.abs(c_vals)))
    return SchroedingerProblem(
        operator=op,
        domain=omega,
        potential=potential,
        solution=u,
        vtilde=vtilde,
        c_sup=c_sup,
        residual_max=float(np.max(residual)),
        residual_tol=1e-3 * (1.0 + c_sup),
        spec=spec,
    )


def quotient_report(p: SchroedingerProblem, K: CompactSetSpec) -> HarnackReport:
    """Extrema of u / x_1 over K_0 and of v over the lifted set.

    Hyperplane samples use the limit d_1 u(0, x') when the exclusion is 0.
    The two sets of extrema must agree to 1e-12 (relative).
    """
    pts = K.samples()
    x1 = pts[:, 0]
    off = np.abs(x1) > K.exclusion
    on = x1 == 0.0
    if not np.any(off & ~on):
        raise EmptyK0("every sample of K lies in the excluded slab around x_1 = 0")
    q = np.full(len(pts), np.nan)
    keep = off & ~on
    q[keep] = p.solution(pts[keep]) / x1[keep]
    if K.exclusion == 0.0 and np.any(on):
        q[on] = p.solution.normal_derivative(pts[on][:, 1:])
        keep = keep | on
    used_pts, used_q = pts[keep], q[keep]
    sup_q, inf_q = float(np.max(used_q)), float(np.min(used_q))
    v = p.vtilde
    if v is not None:
        lifted = np.zeros((len(used_pts), p.dimension + 2))
        lifted[:, 0] = used_pts[:, 0]
        lifted[:, 3:] = used_pts[:, 1:]
        lv = v(lifted)
        lsup, linf = float(np.max(lv)), float(np.min(lv))
    else:
        lsup, linf = sup_q, inf_q
    for a, b in ((sup_q, lsup), (inf_q, linf)):
        if abs(a - b) > EQUALITY_TOL * max(1.0, abs(a)):
            raise QuadratureFailure(f"quotient extremum {a!r} differs from lifted value {b!r}")
    ratio = sup_q / inf_q if inf_q > 0 else math.inf
    return HarnackReport(sup_q, inf_q, ratio, lsup, linf, p.residual_max, used_pts, used_q)


def verify_theorem_odd_harnack(
    p: SchroedingerProblem, K: CompactSetSpec, C_budget: float
) -> tuple[bool, HarnackReport]:
    """Pass iff the sampled ratio is within the budget and the residual within tolerance."""
    rep = quotient_report(p, K)
    ok = rep.ratio <= C_budget and rep.residual_max <= p.residual_tol
    return bool(ok), rep


def half_ball_samples(n: int, rho: float, density: int) -> np.ndarray:
    """Interior lattice points of B_rho with x_1 > 0."""
    box = Box((0.0,) + (-rho,) * (n - 1), (rho,) + (rho,) * (n - 1))
    pts = box.lattice(density, interior=True)
    return pts[np.linalg.norm(pts, axis=1) < rho]


def _equation_residual(p: SchroedingerProblem, pts: np.ndarray, M: float, threads: int) -> np.ndarray:
    K_n, _ = p.kernels()
    lu = apply_levy_batch(K_n, p.solution, pts, p.spec, threads)
    return lu + p.potential(pts) * p.solution(pts) + M * pts[:, 0]


def _check_nonnegative(p: SchroedingerProblem, pts: np.ndarray) -> None:
    if np.any(p.solution(pts) < -1e-14):
        raise NotSupersolution("u is negative somewhere in the half-space samples")


def weak_harnack_report(
    p: SchroedingerProblem, M: float, rho: float, s: float, density: int = 9, threads: int = 1
) -> tuple[float, float, float]:
    """(||u||_A_s, inf over B_{rho/2}^+ of u/x_1, ||u||_A_s / (inf + M)).

    Requires L u + c u + M x_1 >= -residual_tol on B_rho^+ samples.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    n = p.dimension
    ball = half_ball_samples(n, rho, density)
    _check_nonnegative(p, ball)
    res = _equation_residual(p, ball, M, threads)
    if np.min(res) < -p.residual_tol:
        raise NotSupersolution(f"supersolution residual {np.min(res):.3e} below -{p.residual_tol:g}")
    inner = half_ball_samples(n, 0.5 * rho, density)
    inf_q = float(np.min(p.solution(inner) / inner[:, 0]))
    norm = weighted_norm_As(p.solution, s)
    denom = inf_q + M
    ratio = 0.0 if norm == 0.0 else (norm / denom if denom > 0 else math.inf)
    return norm, inf_q, ratio


def local_boundedness_report(
    p: SchroedingerProblem, M: float, rho: float, s: float, density: int = 9, threads: int = 1
) -> tuple[float, float, float]:
    """(sup over B_{rho/2}^+ of u/x_1, ||u||_A_s, sup / (||u||_A_s + M)).

    Requires L u + c u - M x_1 <= residual_tol on B_rho^+ samples.
    """
    n = p.dimension
    ball = half_ball_samples(n, rho, density)
    res = _equation_residual(p, ball, -M, threads)
    if np.max(res) > p.residual_tol:
        raise NotSubsolution(f"subsolution residual {np.max(res):.3e} above {p.residual_tol:g}")
    inner = half_ball_samples(n, 0.5 * rho, density)
    sup_q = float(np.max(p.solution(inner) / inner[:, 0]))
    norm = weighted_norm_As(p.solution, s)
    denom = norm + M
    ratio = 0.0 if sup_q == 0.0 else (sup_q / denom if denom > 0 else math.inf)
    return sup_q, norm, ratio


def annulus_bound_constant(n: int, s: float) -> float:
    """C* = C(n, s) vol(B_4 minus B_2): |x - y| >= rho on the annulus when |x| < rho."""
    return fractional_constant(n, s) * ball_volume(n) * (4.0**n - 2.0**n)


def annulus_flap_lower_bound(n: int, s: float, rho: float, x) -> float:
    """-C(n, s) int over B_{4 rho} minus B_{2 rho} of |x - y|^(-n-2s) dy, for |x| < rho.

    This is (-Delta)^s of the annulus indicator at x; the result is checked
    against -C* rho^(-2s).
    """
    x = np.asarray(x, dtype=float).reshape(n)
    if not np.linalg.norm(x) < rho:
        raise ValueError("x must lie in the open ball of radius rho")
    omega, wo = sphere_rule(n, 24)
    total = 0.0
    for k in range(8):
        lo, hi = rho * (2.0 + 0.25 * k), rho * (2.0 + 0.25 * (k + 1))
        t, wt = legendre_on(lo, hi, 16)
        y = t[:, None, None] * omega[None, :, :]
        dist = np.linalg.norm(y - x, axis=-1)
        total += float(np.sum(wt * t ** (n - 1) * (dist ** (-n - 2.0 * s) @ wo)))
    value = -fractional_constant(n, s) * total
    bound = -annulus_bound_constant(n, s) * rho ** (-2.0 * s)
    if value < bound:
        raise QuadratureFailure("annulus value falls below its explicit lower bound")
    return value
