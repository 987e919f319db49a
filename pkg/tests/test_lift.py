import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from bochnerlift.catalog import bump, odd_gaussian, odd_mixed, odd_rational, truncated_gaussian
from bochnerlift.errors import MissingNormalDerivative, NonIntegrable
from bochnerlift.lift import (
    Field,
    WeightedMeasureSpec,
    antisymmetric_part,
    continuity_modulus,
    isotropic_extension,
    isotropic_symmetrize,
    lift_field,
    mollifier_convergence_report,
    mollifier_error_bound,
    mollify,
    restrict_field,
    weighted_l1,
    weighted_norm_As,
    weighted_norm_Ls,
)


def _pts(rng, count, d, scale=2.0):
    return rng.uniform(-scale, scale, size=(count, d))


def _x1(n):
    return Field(n, lambda p: p[..., 0].copy(), "antisymmetric",
                 first_normal_derivative=lambda q: np.ones(q.shape[:-1]), name="x1")


# lift / restrict

@pytest.mark.parametrize("n", [1, 2, 3])
def test_lift_of_odd_gaussian_is_gaussian(n, rng):
    v = lift_field(odd_gaussian(n))
    y = _pts(rng, 50, n + 2)
    assert np.allclose(v(y), np.exp(-math.pi * np.sum(y * y, axis=1)), rtol=1e-14, atol=0)


def test_lift_of_x1_is_one(rng):
    v = lift_field(_x1(2))
    assert np.allclose(v(_pts(rng, 30, 4)), 1.0, rtol=1e-15)


def test_lift_on_degenerate_set_uses_normal_derivative():
    v = lift_field(odd_gaussian(2))
    assert v.at([0.0, 0.0, 0.0, 0.0]) == 1.0
    assert v.at([0.0, 0.0, 0.0, 0.5]) == pytest.approx(math.exp(-math.pi / 4), rel=1e-15)
    assert v.at([1e-8, 0.0, 0.0, 0.5]) == pytest.approx(math.exp(-math.pi / 4), rel=1e-14)


def test_missing_normal_derivative_raises():
    v = lift_field(odd_mixed(1))
    assert math.isfinite(v.at([0.3, 0.2, 0.1]))
    with pytest.raises(MissingNormalDerivative):
        v.at([0.0, 0.0, 0.0])


def test_lift_rejects_non_antisymmetric():
    with pytest.raises(ValueError):
        lift_field(bump(2))


def test_lift_is_isotropic3():
    lift_field(odd_rational(2)).validate()
    lift_field(odd_mixed(3)).validate()


def test_restrict_examples(rng):
    one = Field(4, lambda p: np.ones(p.shape[:-1]), "isotropic3")
    x = _pts(rng, 20, 2)
    assert np.array_equal(restrict_field(one)(x), x[:, 0])
    gauss = Field(4, lambda p: np.exp(-math.pi * np.sum(p * p, axis=-1)), "isotropic3")
    u = restrict_field(gauss)
    assert np.allclose(u(x), odd_gaussian(2)(x), rtol=1e-15, atol=0)
    assert u.symmetry == "antisymmetric"
    u.validate()


def _random_odd_poly(n, coeffs):
    # x_1 * P(x_1^2, x_2 + ... + x_n) * exp(-|x|^2)
    def evaluate(p):
        q = p[..., 0] ** 2
        b = np.sum(p[..., 1:], axis=-1)
        poly = coeffs[0] + coeffs[1] * q + coeffs[2] * b + coeffs[3] * q * b * b
        return p[..., 0] * poly * np.exp(-np.sum(p * p, axis=-1))

    return Field(n, evaluate, "antisymmetric", decay_bound=(100.0, 50.0), name="odd-poly")


@given(st.integers(1, 3), st.lists(st.floats(-3, 3), min_size=4, max_size=4),
       st.integers(0, 2**32 - 1))
def test_round_trip_is_identity(n, coeffs, seed):
    u = _random_odd_poly(n, coeffs)
    back = restrict_field(lift_field(u))
    x = np.random.default_rng(seed).uniform(-2, 2, size=(32, n))
    x = x[np.abs(x[:, 0]) > 1e-6]
    assert np.max(np.abs(back(x) - u(x))) <= 1e-14


# symmetrization

def test_symmetrize_examples(rng):
    x = _pts(rng, 20, 2)
    odd = Field(4, lambda p: p[..., 0].copy())
    assert np.max(np.abs(isotropic_symmetrize(odd)(x))) < 1e-15
    norm2 = Field(4, lambda p: np.sum(p[..., :3] ** 2, axis=-1))
    assert np.allclose(isotropic_symmetrize(norm2)(x), x[:, 0] ** 2, rtol=1e-13)
    first2 = Field(4, lambda p: p[..., 0] ** 2)
    assert np.allclose(isotropic_symmetrize(first2)(x), x[:, 0] ** 2 / 3, rtol=1e-13)


def test_sphere_second_moment_brute_force():
    # int_{S^2} z_1^2 = 4 pi / 3 via scipy dblquad in polar coordinates
    val, _ = integrate.dblquad(lambda phi, th: (math.cos(th) ** 2) * math.sin(th),
                               0, math.pi, 0, 2 * math.pi)
    assert val == pytest.approx(4 * math.pi / 3, rel=1e-12)


def test_symmetrize_reproduces_isotropic_fields(rng):
    v = lift_field(odd_rational(2))
    x = _pts(rng, 20, 2)
    on_axis = np.zeros((20, 4))
    on_axis[:, 0] = np.abs(x[:, 0])
    on_axis[:, 3] = x[:, 1]
    assert np.allclose(isotropic_symmetrize(v)(x), v(on_axis), rtol=1e-13)


def test_symmetrize_order_against_refined_rule(rng):
    f = Field(4, lambda p: np.exp(p[..., 0] - p[..., 1] ** 2 + 0.5 * p[..., 2] * p[..., 3]))
    x = _pts(rng, 12, 2)
    coarse = isotropic_symmetrize(f)(x)
    fine = isotropic_symmetrize(f, nodes=64)(x)
    assert np.allclose(coarse, fine, rtol=1e-12)


def test_symmetrize_is_a_projection(rng):
    f = Field(3, lambda p: np.cos(p[..., 0] + 0.3 * p[..., 1]) * np.exp(-p[..., 2] ** 2))
    # holds for any sphere rule since the extension only sees |z| = 1
    once = isotropic_symmetrize(f, nodes=8)
    twice = isotropic_symmetrize(isotropic_extension(once), nodes=8)
    x = _pts(rng, 20, 1)
    assert np.allclose(twice(x), once(x), rtol=1e-12, atol=1e-14)


# antisymmetric part

def test_antisymmetric_part_examples(rng):
    x = _pts(rng, 20, 3)
    sq = Field(3, lambda p: p[..., 0] ** 2)
    assert np.max(np.abs(antisymmetric_part(sq)(x))) == 0.0
    mixed = Field(3, lambda p: p[..., 0] + p[..., 0] ** 2)
    assert np.allclose(antisymmetric_part(mixed)(x), x[:, 0], rtol=1e-14)
    g = odd_gaussian(3)
    assert antisymmetric_part(g) is g


@given(st.integers(0, 2**32 - 1))
def test_antisymmetric_part_is_idempotent(seed):
    r = np.random.default_rng(seed)
    c = r.normal(size=4)
    g = Field(2, lambda p: np.exp(c[0] * p[..., 0] + c[1] * p[..., 1]) * np.cos(c[2] * p[..., 0] + c[3]))
    once = antisymmetric_part(g)
    twice = antisymmetric_part(Field(2, once.evaluate))
    x = r.uniform(-2, 2, size=(16, 2))
    assert once.symmetry == "antisymmetric"
    assert np.allclose(twice(x), once(x), rtol=1e-14, atol=1e-15)
    once.validate()


# weighted norms

def test_norms_of_zero():
    zero = Field(1, lambda p: np.zeros(p.shape[:-1]), "antisymmetric", decay_bound=(0.0, 50.0),
                 first_normal_derivative=lambda q: np.zeros(q.shape[:-1]))
    assert weighted_norm_As(zero, 0.5) == 0.0
    assert weighted_norm_Ls(lift_field(zero), 0.5) == 0.0


def test_as_norm_against_quad():
    # 2 pi int_R x^2 exp(-pi x^2) (1 + |x|)^-4 dx
    ref = 4 * math.pi * integrate.quad(lambda x: x * x * math.exp(-math.pi * x * x) / (1 + x) ** 4,
                                       0, math.inf, epsabs=0, epsrel=1e-13)[0]
    assert weighted_norm_As(odd_gaussian(1), 0.5) == pytest.approx(ref, rel=1e-10)


def test_ls_norm_of_one_is_finite():
    # int_{R^3} (1 + |y|)^-4 dy = 4 pi B(3, 1) = 4 pi / 3
    one = Field(3, lambda p: np.ones(p.shape[:-1]), "isotropic3", decay_bound=(1.0, 0.0))
    assert weighted_norm_Ls(one, 0.5) == pytest.approx(4 * math.pi / 3, rel=1e-8)


def test_ls_norm_of_gaussian_against_quad():
    # d = 3: 4 pi int r^2 exp(-pi r^2) (1 + r)^-4 dr
    ref = 4 * math.pi * integrate.quad(lambda r: r * r * math.exp(-math.pi * r * r) / (1 + r) ** 4,
                                       0, math.inf, epsabs=0, epsrel=1e-13)[0]
    v = lift_field(odd_gaussian(1))
    assert weighted_norm_Ls(v, 0.5) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("make", [odd_gaussian, odd_rational, odd_mixed])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_norm_equality(make, n, s):
    u = make(n)
    a = weighted_norm_As(u, s)
    b = weighted_norm_Ls(lift_field(u), s)
    assert a > 0
    assert abs(a - b) <= 1e-6 * b


def test_norm_needs_decay_and_integrability():
    with pytest.raises(ValueError):
        weighted_norm_As(_x1(1), 0.5)
    slow = Field(1, lambda p: p[..., 0] * (1 + p[..., 0] ** 2) ** -0.5, "antisymmetric",
                 decay_bound=(1.0, -3.0))
    with pytest.raises(NonIntegrable):
        weighted_norm_As(slow, 0.5)


# mollification

def test_mollify_examples(rng):
    one = Field(2, lambda p: np.ones(p.shape[:-1]))
    x = _pts(rng, 20, 2)
    assert np.allclose(mollify(one, 0.3)(x), 1.0, rtol=1e-14)
    lin = Field(2, lambda p: p[..., 0].copy())
    assert np.allclose(mollify(lin, 0.3)(x), x[:, 0], rtol=1e-13, atol=1e-15)
    half = Field(2, lambda p: (p[..., 0] > 0).astype(float))
    deep = np.array([[0.31, 0.0], [1.0, -2.0], [0.5, 3.0]])
    assert np.allclose(mollify(half, 0.3)(deep), 1.0, rtol=1e-14)
    with pytest.raises(ValueError):
        mollify(one, 0.0)
    with pytest.raises(ValueError):
        mollify(one, 1.5)


def test_measure_spec():
    with pytest.raises(ValueError):
        WeightedMeasureSpec(2, 0.0)
    with pytest.raises(NonIntegrable):
        WeightedMeasureSpec(3, 3.0).ensure_finite()
    # mu(B_R) in d = 1: 2 int_0^R (1+r)^-2 dr = 2 R / (1 + R)
    assert WeightedMeasureSpec(1, 2.0).ball_measure(3.0) == pytest.approx(1.5, rel=1e-13)


def test_weighted_l1_against_quad():
    spec = WeightedMeasureSpec(3, 5.0)
    f = truncated_gaussian(3, 1.0)
    ref = 4 * math.pi * integrate.quad(lambda r: r * r * math.exp(-math.pi * r * r) / (1 + r) ** 5,
                                       0, 1, epsabs=0, epsrel=1e-13)[0]
    assert weighted_l1(f, spec, breaks=(1.0,)) == pytest.approx(ref, rel=1e-10)


def test_mollifier_report_zero():
    zero = Field(2, lambda p: np.zeros(p.shape[:-1]), decay_bound=(0.0, 50.0))
    assert mollifier_convergence_report(zero, WeightedMeasureSpec(2, 4.0), [0.2, 0.1]) == [0.0, 0.0]


def test_mollifier_report_decreases_and_respects_bound():
    v = bump(1, a=1.5)
    spec = WeightedMeasureSpec(1, 3.0)
    schedule = [0.2, 0.1, 0.05]
    errs = mollifier_convergence_report(v, spec, schedule, breaks=(1.5,))
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.2 * errs[0]
    for eps, e in zip(schedule, errs):
        assert e <= mollifier_error_bound(v, spec, eps, 1.5)


def test_mollifier_report_truncated_gaussian():
    v = truncated_gaussian(3, 1.0)
    spec = WeightedMeasureSpec(3, 5.0)
    errs = mollifier_convergence_report(v, spec, [0.2, 0.1, 0.05, 0.025], breaks=(1.0,))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] / errs[0] <= 0.5


def test_continuity_modulus_of_linear_field():
    lin = Field(2, lambda p: 3.0 * p[..., 0])
    # sampled directions sit half a step (pi / 16) off the x_1 axis
    assert continuity_modulus(lin, 0.1, 1.0) == pytest.approx(0.3 * math.cos(math.pi / 16), rel=1e-12)
