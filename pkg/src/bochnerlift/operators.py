"""Direct evaluation of radial Levy operators and numerical identity checks.

The operator with radial kernel K on R^d acts as

    L u(x) = 1/2 int (2 u(x) - u(x + y) - u(x - y)) K(|y|) dy,

which is evaluated in polar coordinates: a Gauss-Jacobi rule carrying the
r^(1 - sigma) behaviour of the singular core, composite Gauss panels on
the far field and a Gauss-Jacobi rule on the power-law tail.  Every rule has fixed nodes, so results do
not depend on the number of worker threads.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    InsufficientSmoothness,
    OscillatoryQuadratureFailure,
    SingularQuadratureFailure,
)
from .kernels import RadialKernel, fractional_kernel, lift_kernel
from .lift import Field, antisymmetric_part, isotropic_symmetrize, lift_field
from .quadrature import (
    QuadratureSpec,
    full_line_rule,
    graded_rule,
    jacobi_core_rule,
    legendre_on,
    oscillatory_half_line,
    panel_rule,
    sphere_rule,
    tail_rule,
)

__all__ = [
    "apply_levy_direct",
    "apply_flap_direct",
    "apply_levy_batch",
    "radial_fourier_3d",
    "BochnerReport",
    "bochner_report",
    "bochner_residual",
    "odd_identity_residual",
    "PairingReport",
    "weak_pairing_report",
    "weak_pairing_residual",
    "sphere_kernel_identity",
    "cylindrical_identity_residual",
]

DEFAULT_SPEC = QuadratureSpec()
_BLOCK_POINTS = 1 << 16


def _iso_order(d: int) -> tuple[int, ...]:
    # peel the free axes first; the final circle is the (y_2, y_3) plane
    return (0,) + tuple(range(3, d)) + (1, 2)


def _radial_nodes(K: RadialKernel, spec: QuadratureSpec, reach: float):
    a = spec.split_radius
    if K.singularity_order > 0:
        # K r^(d-1) ~ r^(-1-sigma) and the second difference ~ r^2
        r_core, w_core = jacobi_core_rule(a, spec.core_nodes, 1.0 - K.singularity_order)
    else:
        r_core, w_core = graded_rule(a, spec.core_nodes, 1.0)
    if K.is_power_tailed:
        far = max(a, spec.truncation_radius + reach)
        r_far, w_far = panel_rule(a, far, spec.panel_width, spec.shell_nodes)
        r_tail, w_tail = tail_rule(far, K.decay_rate, spec.tail_nodes)
        r = np.concatenate([r_core, r_far, r_tail])
        w = np.concatenate([w_core, w_far, w_tail])
    else:
        far = max(a, K.cutoff_radius())
        r_far, w_far = panel_rule(a, far, spec.panel_width, spec.shell_nodes)
        r = np.concatenate([r_core, r_far])
        w = np.concatenate([w_core, w_far])
    return r, w


def _check_smoothness(K: RadialKernel, u: Field) -> None:
    if K.family == "fractional":
        need = K.singularity_order
    else:
        need = 2.0
    if u.smoothness < need:
        raise InsufficientSmoothness(
            f"{u.name} is declared C^{u.smoothness:g}; the operator needs C^{need:g}"
        )


def apply_levy_direct(
    K: RadialKernel, u: Field, x, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """L u(x) by singular-integral quadrature.

    3-isotropic fields evaluated at points with x_2 = x_3 = 0 use a sphere
    rule whose (y_2, y_3) circle is collapsed to one node.
    """
    x = np.asarray(x, dtype=float)
    d = u.dimension
    if K.dimension != d:
        raise ValueError(f"kernel dimension {K.dimension} != field dimension {d}")
    if x.shape != (d,):
        raise ValueError(f"evaluation point must have shape ({d},)")
    _check_smoothness(K, u)
    collapse = u.symmetry == "isotropic3" and x[1] == 0.0 and x[2] == 0.0
    order = _iso_order(d) if collapse else None
    omega, w_omega = sphere_rule(d, spec.angular_nodes, order=order, collapse=collapse)
    r, w_r = _radial_nodes(K, spec, float(np.linalg.norm(x)))
    r_c = spec.taylor_radius
    small = r < r_c
    r_eval = np.concatenate([r[~small], [r_c, 2.0 * r_c]])

    u0 = float(u(x[None, :])[0])
    # radial blocks keep the (radius, direction, d) intermediates small
    block = max(1, _BLOCK_POINTS // len(w_omega))
    diff = np.empty(len(r_eval))
    for lo in range(0, len(r_eval), block):
        steps = r_eval[lo:lo + block, None, None] * omega[None, :, :]
        both = u(x + steps) + u(x - steps)
        diff[lo:lo + block] = 0.5 * (2.0 * u0 * w_omega.sum() - both @ w_omega)
    second = np.empty_like(r)
    second[~small] = diff[:-2]
    # below r_c use the even expansion a r^2 + b r^4 fitted at r_c and 2 r_c
    s1, s2 = diff[-2], diff[-1]
    q = (r[small] / r_c) ** 2
    second[small] = (16.0 * s1 - s2) / 12.0 * q + (s2 - 4.0 * s1) / 12.0 * q * q
    value = float(np.sum(w_r * K(r) * r ** (d - 1) * second))
    if not math.isfinite(value):
        raise SingularQuadratureFailure(f"direct evaluation at {x.tolist()} is not finite")
    return value


def apply_flap_direct(s: float, u: Field, x, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(-Delta)^s u(x) with the kernel C(n, s) |y|^(-n-2s)."""
    return apply_levy_direct(fractional_kernel(u.dimension, s), u, x, spec)


def apply_levy_batch(
    K: RadialKernel,
    u: Field,
    points,
    spec: QuadratureSpec = DEFAULT_SPEC,
    threads: int = 1,
) -> np.ndarray:
    """apply_levy_direct over a point set, optionally on a thread pool (order preserved)."""
    pts = np.asarray(points, dtype=float).reshape(-1, u.dimension)
    if threads <= 1 or len(pts) < 2:
        return np.array([apply_levy_direct(K, u, p, spec) for p in pts])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(lambda p: apply_levy_direct(K, u, p, spec), pts)))


def _finite_integral(f, breaks=(), decay: float | None = None, start: float = 8.0) -> float:
    """int_0^inf f(r) dr for profiles that are negligible or power-law beyond ``start``."""
    edges = sorted({0.0, start, *[float(b) for b in breaks if 0 < b < start]})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = panel_rule(lo, hi, 0.25, 16)
        total += float(np.sum(w * f(x)))
    if decay is not None:
        x, w = tail_rule(start, decay, 48)
        return total + float(np.sum(w * f(x)))
    lo, quiet = start, 0
    for _ in range(2000):
        x, w = legendre_on(lo, lo + 0.5, 16)
        piece = float(np.sum(w * f(x)))
        total += piece
        quiet = quiet + 1 if abs(piece) <= 1e-17 * max(abs(total), 1e-300) else 0
        if quiet >= 2:
            return total
        lo += 0.5
    raise OscillatoryQuadratureFailure("radial integral did not settle")


def radial_fourier_3d(
    f0, rho: float, tol: float = 1e-14, breaks=(), decay: float | None = None
) -> float:
    """Fourier transform on R^3 of the radial function with profile f0, at |xi| = rho.

    (2/rho) int_0^inf r f0(r) sin(2 pi rho r) dr for rho > 0, summed over
    half periods with alternating-series acceleration; 4 pi int r^2 f0 at 0.
    ``decay`` is a power p with f0(r) = O(r^-p) when the profile is not
    rapidly decreasing; ``breaks`` lists radii where f0 is not smooth.
    """
    rho = abs(float(rho))
    if rho == 0.0:
        sigma = None if decay is None else decay - 3.0
        if sigma is not None and sigma <= 0:
            raise OscillatoryQuadratureFailure("r^2 f0 is not integrable")
        return 4.0 * math.pi * _finite_integral(lambda r: r * r * f0(r), breaks, sigma)
    half = 0.5 / rho
    cuts = np.array(sorted(float(b) for b in breaks))
    omega = 2.0 * math.pi * rho

    def panel(lo, hi):
        inner = cuts[(cuts > lo) & (cuts < hi)]
        edges = np.concatenate([[lo], inner, [hi]])
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            m = max(1, int(math.ceil((b - a) / 0.5)))
            for k in range(m):
                x, w = legendre_on(a + (b - a) * k / m, a + (b - a) * (k + 1) / m, 16)
                total += float(np.sum(w * x * f0(x) * np.sin(omega * x)))
        return total

    reach = max(8.0, float(cuts.max()) if len(cuts) else 0.0)
    min_panels = max(8, int(math.ceil(reach / half)))
    try:
        value = oscillatory_half_line(
            panel, lambda k: k * half, tol, min_panels=min_panels, max_panels=min_panels + 20000
        )
    except OscillatoryQuadratureFailure as exc:
        raise OscillatoryQuadratureFailure(f"radial_fourier_3d({rho}) did not settle") from exc
    return 2.0 * value / rho


@dataclass(frozen=True)
class BochnerReport:
    residual: float
    xi: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    spectral_gap: float | None


def _sine_transform(g, omega: float, decay: float | None) -> float:
    """int_0^inf g(x) sin(omega x) dx with QUADPACK's weighted routines.

    Power-law integrands go to the Fourier-integral routine on [0, inf);
    rapidly decreasing ones to the oscillatory routine on a finite range
    beyond which g is negligible.
    """
    with warnings.catch_warnings():
        # the requested accuracy sits at the roundoff floor on purpose
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if decay is not None:
            val, _ = integrate.quad(g, 0.0, np.inf, weight="sin", wvar=omega,
                                    epsabs=1e-15, limlst=200)
            return float(val)
        peak = max(abs(g(t)) for t in np.linspace(0.0, 4.0, 41))
        stop = 4.0
        while stop < 1e4 and max(abs(g(stop)), abs(g(1.25 * stop))) > 1e-30 * peak:
            stop *= 2.0
        val, _ = integrate.quad(g, 0.0, stop, weight="sin", wvar=omega, epsabs=1e-15,
                                epsrel=1e-13, limit=400)
    return float(val)


def bochner_report(f: Field, xi_grid, decay: float | None = None,
                   spectral_grid: tuple[int, float] = (1024, 16.0)) -> BochnerReport:
    """Compare Im F_1[x f](xi) with xi F_3 f~(xi, 0, 0) for an even f on R.

    The left side is a one-dimensional sine transform computed by QUADPACK;
    the right side is :func:`radial_fourier_3d` of the same profile.  When
    f decays fast enough the left side is also checked against an FFT.
    """
    if f.dimension != 1:
        raise ValueError("bochner_report expects a field on R")

    def f0(r):
        r = np.asarray(r, dtype=float)
        return f(r[..., None])

    xs, lhs, rhs = [], [], []
    for xi in xi_grid:
        xi = float(xi)
        xs.append(xi)
        if xi == 0.0:
            lhs.append(0.0)
            rhs.append(0.0)
            continue
        sign = 1.0 if xi > 0 else -1.0
        left = 2.0 * sign * _sine_transform(
            lambda t: t * float(f0(t)), 2.0 * math.pi * abs(xi), decay
        )
        right = xi * radial_fourier_3d(f0, abs(xi), decay=decay)
        lhs.append(left)
        rhs.append(right)
    residual = float(np.max(np.abs(np.array(lhs) - np.array(rhs)))) if xs else 0.0
    return BochnerReport(residual, tuple(xs), tuple(lhs), tuple(rhs),
                         _spectral_gap(f0, xs, lhs, *spectral_grid))


def _spectral_gap(f0, xs, lhs, n_points: int, R: float) -> float | None:
    x = -R + (2.0 * R / n_points) * np.arange(n_points)
    samples = x * f0(np.abs(x))
    peak = float(np.max(np.abs(samples)))
    if peak == 0.0 or max(abs(samples[0]), abs(samples[1])) > 1e-12 * peak:
        return None
    h = 2.0 * R / n_points
    gap = 0.0
    for xi, left in zip(xs, lhs):
        # direct DFT of the samples at this frequency, sign convention e^{+2 pi i xi x}
        value = h * np.sum(samples * np.exp(2j * math.pi * xi * x))
        gap = max(gap, abs(value.imag - left))
    return float(gap)


def bochner_residual(f: Field, xi_grid, decay: float | None = None) -> float:
    return bochner_report(f, xi_grid, decay).residual


def _operator_pair(op, n: int) -> tuple[RadialKernel, RadialKernel]:
    if isinstance(op, RadialKernel):
        if op.dimension != n:
            raise ValueError("kernel dimension does not match the field")
        return op, lift_kernel(op)
    s = float(op)
    return fractional_kernel(n, s), fractional_kernel(n + 2, s)


def _embed_iso(points: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(points.shape[:-1] + (n + 2,))
    out[..., 0] = points[..., 0]
    out[..., 3:] = points[..., 1:]
    return out


def odd_identity_residual(
    op, u: Field, points, spec: QuadratureSpec = DEFAULT_SPEC, threads: int = 1
) -> float:
    """max |L_n u(x) - x_1 L_{n+2} v((x_1,0,0), x')| / (|x_1| max(1, |L_{n+2} v|)).

    ``op`` is a RadialKernel on R^n (lifted with lift_kernel) or a
    fractional order s.
    """
    n = u.dimension
    K_n, K_n2 = _operator_pair(op, n)
    pts = np.asarray(points, dtype=float).reshape(-1, n)
    if np.any(pts[:, 0] == 0.0):
        raise ValueError("probe points must lie off the hyperplane x_1 = 0")
    v = lift_field(u)
    left = apply_levy_batch(K_n, u, pts, spec, threads)
    right = apply_levy_batch(K_n2, v, _embed_iso(pts, n), spec, threads)
    x1 = pts[:, 0]
    gap = np.abs(left - x1 * right) / (np.abs(x1) * np.maximum(1.0, np.abs(right)))
    return float(np.max(gap))


@dataclass(frozen=True)
class PairingReport:
    forward: float
    reverse: float | None
    lhs: float
    rhs: float


def _pairing_rules(n: int, radius: float, spec: QuadratureSpec):
    line = full_line_rule(radius, None, spec.panel_width, spec.shell_nodes)
    grids = np.meshgrid(*([line[0]] * n), indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, n)
    w = line[1]
    for _ in range(n - 1):
        w = np.multiply.outer(w, line[1])
    return pts, np.asarray(w).ravel()


def _iso_rule(n: int, radius: float, spec: QuadratureSpec):
    """Nodes (tau, b) with weights 4 pi tau^2 dtau db for isotropic3 integrals on R^(n+2)."""
    tau, wt = panel_rule(0.0, radius, spec.panel_width, spec.shell_nodes)
    grids = [tau]
    weights = [4.0 * math.pi * wt * tau * tau]
    if n > 1:
        b, wb = full_line_rule(radius, None, spec.panel_width, spec.shell_nodes)
        grids += [b] * (n - 1)
        weights += [wb] * (n - 1)
    mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, n)
    w = weights[0]
    for extra in weights[1:]:
        w = np.multiply.outer(w, extra)
    return mesh, np.asarray(w).ravel()


def weak_pairing_report(
    u: Field,
    g: Field,
    s: float,
    reverse_test: Field | None = None,
    radius: float = 4.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
    threads: int = 1,
) -> PairingReport:
    """Check <u, (-Delta)^s g> = (2 pi)^-1 <v, (-Delta)^s f~> with v the lift of u.

    f~ is the lift of the antisymmetric part of g.  With ``reverse_test``
    (a field on R^(n+2)) the converse is checked as well:
    <v, (-Delta)^s f~> = 2 pi <u, (-Delta)^s (x_1 f_sym)>, where f_sym is
    the 3-isotropic symmetrization of the test.  Both sides of the converse
    move the operator onto the Gaussian-class factor by self-adjointness,
    so the test only needs point values.  ``radius`` bounds the region
    where u is non-negligible.
    """
    n = u.dimension
    K_n, K_n2 = fractional_kernel(n, s), fractional_kernel(n + 2, s)
    x, wx = _pairing_rules(n, radius, spec)
    lg = apply_levy_batch(K_n, g, x, spec, threads)
    lhs = float(np.sum(wx * u(x) * lg))

    ftilde = lift_field(antisymmetric_part(g))
    v = lift_field(u)
    iso, wi = _iso_rule(n, radius, spec)
    lifted = _embed_iso(iso, n)
    lf = apply_levy_batch(K_n2, ftilde, lifted, spec, threads)
    rhs = float(np.sum(wi * v(lifted) * lf)) / (2.0 * math.pi)
    forward = abs(lhs - rhs) / max(1.0, abs(lhs))

    reverse = None
    if reverse_test is not None:
        if reverse_test.dimension != n + 2:
            raise ValueError("reverse_test must live on R^(n+2)")
        lv = apply_levy_batch(K_n2, v, lifted, spec, threads)
        f_sym = isotropic_symmetrize(reverse_test)
        # <L v, f~> over R^(n+2): spherical coordinates in the 3-block
        big = float(np.sum(wi * lv * f_sym(iso)))
        # <u, L (x_1 f_sym)> = <L u, x_1 f_sym> by self-adjointness
        lu = apply_levy_batch(K_n, u, x, spec, threads)
        small = float(np.sum(wx * lu * x[:, 0] * f_sym(x)))
        reverse = abs(big - 2.0 * math.pi * small) / max(1.0, abs(big))
    return PairingReport(forward, reverse, lhs, rhs)


def weak_pairing_residual(
    u: Field, g: Field, s: float, reverse_test: Field | None = None, **kwargs
) -> float:
    rep = weak_pairing_report(u, g, s, reverse_test, **kwargs)
    return rep.forward if rep.reverse is None else max(rep.forward, rep.reverse)


def _graded_sphere(nodes: int = 16, levels: int = 40, azimuth: int = 8):
    """Rule on S^2 in (t, phi) with panels in t = z_1 refined geometrically toward t = 1."""
    edges = [-1.0, 0.0] + [1.0 - 2.0**-k for k in range(1, levels)] + [1.0]
    ts, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        t, w = legendre_on(lo, hi, nodes)
        ts.append(t)
        wts.append(w)
    t, wt = np.concatenate(ts), np.concatenate(wts)
    phi = (np.arange(azimuth) + 0.5) * (2.0 * math.pi / azimuth)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    pts = np.stack(
        [
            np.repeat(t, azimuth),
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
        ],
        axis=1,
    )
    w = np.outer(wt, np.full(azimuth, 2.0 * math.pi / azimuth)).ravel()
    return pts, w


def sphere_kernel_identity(alpha: float, beta: float, r: float, gamma: float):
    """(lhs, rhs) of the S^2 kernel integral and its closed form.

    lhs = r int_{S^2} (alpha^2 + |r z - beta e_1|^2)^(-1-gamma) dH^2(z),
    rhs = pi / (beta gamma) [(alpha^2 + (r - beta)^2)^-gamma - (alpha^2 + (r + beta)^2)^-gamma].
    """
    if min(alpha, beta, r, gamma) <= 0:
        raise ValueError("all parameters must be positive")
    z, w = _graded_sphere()
    q = alpha**2 + (r * z[:, 0] - beta) ** 2 + (r * z[:, 1]) ** 2 + (r * z[:, 2]) ** 2
    lhs = r * float(np.sum(w * q ** (-1.0 - gamma)))
    a2 = alpha * alpha
    rhs = math.pi / (beta * gamma) * ((a2 + (r - beta) ** 2) ** -gamma - (a2 + (r + beta) ** 2) ** -gamma)
    return lhs, rhs


def _fd_laplacian(F, point: np.ndarray, h: float) -> float:
    dim = len(point)
    shifts = np.eye(dim)
    pts = np.concatenate([point + h * shifts, point - h * shifts, point[None, :]])
    vals = F(pts)
    return float((np.sum(vals[:-1]) - 2.0 * dim * vals[-1]) / (h * h))


def _richardson_laplacian(F, point: np.ndarray, h: float) -> float:
    coarse = _fd_laplacian(F, point, h)
    fine = _fd_laplacian(F, point, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def cylindrical_identity_residual(
    k: int, lam: float, u: Field, points, h: float = 1e-3, derivatives=None
) -> float:
    """Finite-difference Laplacian of |y|^lam u(|y|, z) on R^k x R^m versus its expansion.

    The expansion is (lam+k-2) lam rho^(lam-2) u + (2 lam+k-1) rho^(lam-1) u_rho
    + rho^lam u_rhorho + rho^lam Lap_z u.  ``u`` is a Field on (rho, z); its
    derivatives come from ``derivatives`` = (u_rho, u_rhorho, lap_z u) when
    given, otherwise from central differences.  Second differences use step
    h and one Richardson extrapolation.  For k = 3, lam = -1 the result
    also includes the gap to rho^-1 times the Laplacian of u in (rho, z).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    m = u.dimension - 1
    pts = np.asarray(points, dtype=float).reshape(-1, m + 1)
    if np.any(pts[:, 0] < 0.1):
        raise ValueError("points must keep rho >= 0.1")

    def lifted(p):
        y, z = p[..., :k], p[..., k:]
        rho = np.linalg.norm(y, axis=-1)
        return rho**lam * u(np.concatenate([rho[..., None], z], axis=-1))

    def d_rho(p):
        e = np.zeros(m + 1)
        e[0] = h
        q = np.stack([p + e, p - e, p + 0.5 * e, p - 0.5 * e])
        f = u(q)
        return (4.0 * (f[2] - f[3]) / h - (f[0] - f[1]) / (2.0 * h)) / 3.0

    def d2_axis(p, axis):
        e = np.zeros(m + 1)
        e[axis] = 1.0
        return (4.0 * _second(u, p, e, 0.5 * h) - _second(u, p, e, h)) / 3.0

    worst = 0.0
    for p in pts:
        rho = p[0]
        u0 = float(u(p[None, :])[0])
        if derivatives is not None:
            u_r, u_rr, lap_z = (float(np.asarray(d(p[None, :])).ravel()[0]) for d in derivatives)
        else:
            u_r = float(d_rho(p))
            u_rr = d2_axis(p, 0)
            lap_z = sum(d2_axis(p, a) for a in range(1, m + 1))
        expansion = (
            (lam + k - 2.0) * lam * rho ** (lam - 2.0) * u0
            + (2.0 * lam + k - 1.0) * rho ** (lam - 1.0) * u_r
            + rho**lam * u_rr
            + rho**lam * lap_z
        )
        point = np.concatenate([[rho], np.zeros(k - 1), p[1:]])
        fd = _richardson_laplacian(lifted, point, h)
        scale = max(1.0, abs(expansion))
        worst = max(worst, abs(fd - expansion) / scale)
        if k == 3 and lam == -1.0:
            lap_u = _richardson_laplacian(u, p, h)
            worst = max(worst, abs(fd - lap_u / rho) / max(1.0, abs(lap_u / rho)))
    return worst


def _second(u: Field, p: np.ndarray, e: np.ndarray, h: float) -> float:
    q = np.stack([p + h * e, p - h * e, p])
    f = u(q)
    return float((f[0] + f[1] - 2.0 * f[2]) / (h * h))
