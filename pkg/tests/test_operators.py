import itertools
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gamma

from bochnerlift.catalog import bump, odd_bump, odd_gaussian, odd_rational
from bochnerlift.errors import InsufficientSmoothness
from bochnerlift.kernels import RadialKernel, fractional_kernel, gaussian_kernel, rational_kernel
from bochnerlift.lift import Field, lift_field
from bochnerlift.operators import (
    apply_flap_direct,
    apply_levy_batch,
    apply_levy_direct,
    bochner_report,
    bochner_residual,
    cylindrical_identity_residual,
    odd_identity_residual,
    radial_fourier_3d,
    sphere_kernel_identity,
    weak_pairing_report,
    weak_pairing_residual,
)
from bochnerlift.quadrature import legendre_on


def gaussian(d, a=math.pi, center=None):
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    return Field(d, lambda p: np.exp(-a * np.sum((p - c) ** 2, axis=-1)), decay_bound=(1.0, 50.0))


def bump_kernel(n):
    """exp(-1/(1 - r^2)) on r < 1, smooth with compact support."""

    def profile(r):
        out = np.zeros(np.shape(r))
        inside = r < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
        return out

    def derivative(r):
        out = np.zeros(np.shape(r))
        inside = r < 1.0
        ri = r[inside]
        out[inside] = -2.0 * ri / (1.0 - ri**2) ** 2 * np.exp(-1.0 / (1.0 - ri**2))
        return out

    return RadialKernel(n, profile, derivative, singularity_order=-float(n), family="bump")


def flap_gaussian_oracle(n, s, x1=0.0):
    """(-Delta)^s exp(-pi |x|^2) at (x1, 0, ...) by quadrature of the multiplier."""
    if n == 1:
        f = lambda xi: (2 * math.pi * xi) ** (2 * s) * math.exp(-math.pi * xi * xi) * math.cos(2 * math.pi * xi * x1)
        return 2 * integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]
    assert x1 == 0.0
    area = 2 * math.pi ** (n / 2) / gamma(n / 2)
    f = lambda r: (2 * math.pi * r) ** (2 * s) * math.exp(-math.pi * r * r) * r ** (n - 1)
    return area * integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-13)[0]


# direct evaluation

def test_flap_half_of_gaussian_at_origin_is_two():
    v = apply_flap_direct(0.5, gaussian(1), [0.0])
    assert abs(v - 2.0) <= 1e-5 * 2.0


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("x1", [0.0, 0.4, 1.3])
def test_flap_direct_against_multiplier_1d(s, x1):
    ref = flap_gaussian_oracle(1, s, x1)
    assert apply_flap_direct(s, gaussian(1), [x1]) == pytest.approx(ref, rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("s", [0.25, 0.75])
def test_flap_direct_against_multiplier_nd(n, s):
    ref = flap_gaussian_oracle(n, s)
    assert apply_flap_direct(s, gaussian(n), np.zeros(n)) == pytest.approx(ref, rel=1e-5)


def test_levy_direct_gaussian_kernel_closed_form():
    # 1-D: int (1 - cos(2 pi xi y)) e^(-pi y^2) dy = 1 - e^(-pi xi^2); apply to cos(2 pi xi x) at 0
    xi = 0.7
    u = Field(1, lambda p: np.cos(2 * math.pi * xi * p[..., 0]))
    assert apply_levy_direct(gaussian_kernel(1), u, [0.0]) == pytest.approx(1 - math.exp(-math.pi * xi * xi), rel=1e-10)


@pytest.mark.parametrize("K", [fractional_kernel(2, 0.3), gaussian_kernel(2), rational_kernel(2, 1.5)])
def test_constants_and_affine_fields_give_zero(K):
    const = Field(2, lambda p: np.full(p.shape[:-1], 3.0))
    affine = Field(2, lambda p: 1.0 + 2.0 * p[..., 0] - p[..., 1])
    for x in ([0.0, 0.0], [0.7, -1.2]):
        assert abs(apply_levy_direct(K, const, x)) < 1e-12
        assert abs(apply_levy_direct(K, affine, x)) < 1e-10


def test_insufficient_smoothness():
    rough = Field(1, lambda p: np.abs(p[..., 0]), smoothness=1.0)
    with pytest.raises(InsufficientSmoothness):
        apply_flap_direct(0.75, rough, [0.3])
    with pytest.raises(InsufficientSmoothness):
        apply_levy_direct(gaussian_kernel(1), rough, [0.3])
    assert math.isfinite(apply_flap_direct(0.25, rough, [0.3]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_levy_direct(gaussian_kernel(2), gaussian(1), [0.0])
    with pytest.raises(ValueError):
        apply_levy_direct(gaussian_kernel(1), gaussian(1), [0.0, 1.0])


@pytest.mark.parametrize("K", [fractional_kernel(2, 0.4), rational_kernel(2, 2.0)])
def test_parity_preservation(K):
    u = odd_rational(2)
    for x in ([0.4, 0.3], [1.1, -0.8]):
        a = apply_levy_direct(K, u, x)
        b = apply_levy_direct(K, u, [-x[0], x[1]])
        assert abs(a + b) <= 1e-8


@pytest.mark.parametrize("K", [fractional_kernel(4, 0.6), gaussian_kernel(4)])
def test_isotropy_preservation(K):
    v = lift_field(odd_rational(2))
    for a, b in ((0.5, 0.2), (1.3, -0.7)):
        on_1 = apply_levy_direct(K, v, [a, 0.0, 0.0, b])
        on_2 = apply_levy_direct(K, v, [0.0, a, 0.0, b])
        assert abs(on_1 - on_2) <= 1e-8


@pytest.mark.parametrize("K", [fractional_kernel(1, 0.5), gaussian_kernel(1), rational_kernel(1, 1.5)])
def test_self_adjointness(K):
    u = gaussian(1, a=math.pi, center=[0.3])
    g = gaussian(1, a=2.0, center=[-0.2])
    x, w = legendre_on(-7.0, 7.0, 160)
    lu = apply_levy_batch(K, u, x[:, None])
    lg = apply_levy_batch(K, g, x[:, None])
    left = float(np.sum(w * lu * g(x[:, None])))
    right = float(np.sum(w * u(x[:, None]) * lg))
    assert left == pytest.approx(right, rel=1e-5)


def test_batch_is_thread_count_independent():
    u = odd_gaussian(2)
    pts = np.array([[0.3, 0.1], [0.8, -0.4], [1.2, 0.9], [-0.5, 0.2]])
    K = fractional_kernel(2, 0.5)
    serial = apply_levy_batch(K, u, pts, threads=1)
    pooled = apply_levy_batch(K, u, pts, threads=4)
    assert np.array_equal(serial, pooled)


# radial Fourier transform and the Bochner relation

def test_radial_fourier_examples():
    g = lambda r: np.exp(-math.pi * r * r)
    assert radial_fourier_3d(g, 1.0) == pytest.approx(math.exp(-math.pi), rel=1e-10)
    assert radial_fourier_3d(g, 0.0) == pytest.approx(1.0, rel=1e-12)
    box = lambda r: (r <= 1.0).astype(float)
    assert radial_fourier_3d(box, 1.0, breaks=(1.0,)) == pytest.approx(-1 / math.pi, rel=1e-10)


@pytest.mark.parametrize("rho", [0.1, 0.5, 2.0, 3.7])
def test_radial_fourier_of_gaussian_is_gaussian(rho):
    g = lambda r: np.exp(-math.pi * r * r)
    assert radial_fourier_3d(g, rho) == pytest.approx(math.exp(-math.pi * rho * rho), rel=1e-9, abs=1e-15)


def test_radial_fourier_power_law_against_quad():
    # f0 = (1 + r^2)^-2: F_3 at rho = pi^2 e^(-2 pi rho) / ... checked against QAWF
    rho = 0.6
    f = lambda r: r * (1 + r * r) ** -2
    ref = 2 / rho * integrate.quad(f, 0, math.inf, weight="sin", wvar=2 * math.pi * rho)[0]
    got = radial_fourier_3d(lambda r: (1 + r * r) ** -2, rho, decay=4.0)
    assert got == pytest.approx(ref, rel=1e-8)
    # closed form: F_3[(1 + |x|^2)^-2](rho) = pi^2 e^(-2 pi rho)
    assert got == pytest.approx(math.pi**2 * math.exp(-2 * math.pi * rho), rel=1e-8)


XI = np.linspace(-4.0, 4.0, 33)


def test_bochner_gaussian():
    f = Field(1, lambda p: np.exp(-math.pi * p[..., 0] ** 2), "symmetric", decay_bound=(1.0, 50.0))
    rep = bochner_report(f, XI)
    assert rep.residual <= 1e-8
    assert np.allclose(rep.lhs, XI * np.exp(-math.pi * XI**2), atol=1e-10)
    assert rep.spectral_gap is not None and rep.spectral_gap <= 1e-6


def test_bochner_rational():
    f = Field(1, lambda p: (1 + p[..., 0] ** 2) ** -2, "symmetric", decay_bound=(1.0, 4.0))
    assert bochner_residual(f, XI, decay=4.0) <= 1e-6


def test_bochner_cos_gaussian():
    f = Field(1, lambda p: np.exp(-p[..., 0] ** 2) * np.cos(p[..., 0]), "symmetric", decay_bound=(1.0, 50.0))
    assert bochner_residual(f, XI) <= 1e-6


def test_bochner_at_zero():
    f = Field(1, lambda p: np.exp(-math.pi * p[..., 0] ** 2), "symmetric")
    rep = bochner_report(f, [0.0])
    assert rep.lhs == (0.0,) and rep.rhs == (0.0,)


# odd identity

@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_odd_identity_fractional_n1(s):
    assert odd_identity_residual(s, odd_gaussian(1), [[0.5], [1.0], [1.5]]) <= 1e-4


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_odd_identity_fractional_n2(s):
    pts = [[0.5, 0.2], [1.0, -0.6]]
    assert odd_identity_residual(s, odd_gaussian(2), pts) <= 1e-4


@pytest.mark.parametrize("K", [gaussian_kernel(2), rational_kernel(2, 2.5)])
def test_odd_identity_smooth_kernels(K):
    pts = [[0.5, 0.2], [1.0, -0.6], [-0.7, 0.4]]
    assert odd_identity_residual(K, odd_rational(2), pts) <= 1e-4


def test_odd_identity_affine_field_and_compact_kernel():
    x1 = Field(1, lambda p: p[..., 0].copy(), "antisymmetric",
               first_normal_derivative=lambda q: np.ones(q.shape[:-1]))
    assert odd_identity_residual(bump_kernel(1), x1, [[0.5], [1.2]]) <= 1e-12


def test_odd_identity_rejects_hyperplane_points():
    with pytest.raises(ValueError):
        odd_identity_residual(0.5, odd_gaussian(1), [[0.0]])


# weak pairing

def test_weak_pairing_forward():
    assert weak_pairing_residual(odd_gaussian(1), odd_bump(1), 0.5) <= 1e-4


def test_weak_pairing_reverse():
    test = Field(3, lambda p: np.exp(-np.sum(p * p, axis=-1) - 0.5 * p[..., 0]), decay_bound=(2.0, 50.0))
    rep = weak_pairing_report(odd_gaussian(1), odd_bump(1), 0.5, reverse_test=test)
    assert rep.forward <= 1e-4
    assert rep.reverse <= 1e-4


def test_weak_pairing_symmetric_test_vanishes():
    rep = weak_pairing_report(odd_gaussian(1), bump(1), 0.5)
    assert rep.rhs == 0.0
    assert abs(rep.lhs) <= 1e-12
    assert rep.forward <= 1e-12


def test_weak_pairing_zero_field():
    zero = Field(1, lambda p: np.zeros(p.shape[:-1]), "antisymmetric", decay_bound=(0.0, 50.0),
                 first_normal_derivative=lambda q: np.zeros(q.shape[:-1]))
    assert weak_pairing_residual(zero, odd_bump(1), 0.5) == 0.0


# sphere kernel

def test_sphere_kernel_example():
    lhs, rhs = sphere_kernel_identity(1.0, 1.0, 1.0, 1.0)
    assert rhs == pytest.approx(4 * math.pi / 5, rel=1e-14)
    # lhs = 2 pi int_{-1}^{1} (3 - 2t)^-2 dt
    oracle = 2 * math.pi * integrate.quad(lambda t: (3 - 2 * t) ** -2, -1, 1)[0]
    assert lhs == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("alpha,beta,r,gamma_",
                         list(itertools.product([0.3, 1.0, 2.5], [0.4, 1.0, 3.0], [0.5, 1.0, 2.0], [0.25, 1.0, 2.5])))
def test_sphere_kernel_lattice(alpha, beta, r, gamma_):
    lhs, rhs = sphere_kernel_identity(alpha, beta, r, gamma_)
    assert abs(lhs - rhs) <= 1e-8 * rhs


@pytest.mark.parametrize("alpha,beta,r,gamma_", [(0.5, 0.7, 1.9, 0.8), (1.3, 2.2, 0.6, 1.5)])
def test_sphere_kernel_swap_symmetry(alpha, beta, r, gamma_):
    a, _ = sphere_kernel_identity(alpha, beta, r, gamma_)
    b, _ = sphere_kernel_identity(alpha, r, beta, gamma_)
    assert a * beta == pytest.approx(b * r, rel=1e-9)


def test_sphere_kernel_large_alpha():
    lhs, rhs = sphere_kernel_identity(100.0, 1.0, 1.0, 1.0)
    assert lhs / rhs == pytest.approx(1.0, abs=1e-3)
    assert lhs / (4 * math.pi * 100.0**-4) == pytest.approx(1.0, abs=1e-3)


def test_sphere_kernel_rejects_nonpositive():
    with pytest.raises(ValueError):
        sphere_kernel_identity(0.0, 1.0, 1.0, 1.0)


# cylindrical Laplacian

PTS = [[0.7, 0.2], [1.1, -0.5], [0.4, 0.9]]


def test_cylindrical_rho_squared():
    u = Field(2, lambda p: p[..., 0] ** 2)
    assert cylindrical_identity_residual(3, -1.0, u, PTS) <= 1e-5


def test_cylindrical_constant():
    u = Field(2, lambda p: np.ones(p.shape[:-1]))
    assert cylindrical_identity_residual(3, -1.0, u, PTS) <= 1e-5


def test_cylindrical_general_k_lambda():
    u = Field(3, lambda p: p[..., 0] ** 2 * p[..., 1])
    pts = [[0.7, 0.2, 0.3], [1.1, -0.5, 0.0], [0.4, 0.9, -1.0]]
    assert cylindrical_identity_residual(4, 2.0, u, pts) <= 1e-4


def test_cylindrical_with_analytic_derivatives():
    u = Field(2, lambda p: np.sin(p[..., 0]) * np.exp(p[..., 1]))
    ders = (
        lambda p: np.cos(p[..., 0]) * np.exp(p[..., 1]),
        lambda p: -np.sin(p[..., 0]) * np.exp(p[..., 1]),
        lambda p: np.sin(p[..., 0]) * np.exp(p[..., 1]),
    )
    assert cylindrical_identity_residual(5, 1.5, u, PTS, derivatives=ders) <= 1e-5
    assert cylindrical_identity_residual(3, -1.0, u, PTS) <= 1e-5


def test_cylindrical_rejects_axis_points():
    with pytest.raises(ValueError):
        cylindrical_identity_residual(3, -1.0, Field(2, lambda p: p[..., 0]), [[0.05, 0.0]])
