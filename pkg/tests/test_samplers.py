import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from lpwidths.errors import DomainError
from lpwidths.samplers import (
    MeasureKind,
    MeasureSpec,
    RngState,
    WeightedSample,
    sample,
    sample_cone,
    sample_gamma,
    sample_gen_gamma,
    sample_surface,
    sample_tensor,
    sample_volume,
)
from lpwidths.sparse_approx import check_simplex_point

N = 10**6


def within(sample_values, expected, k=3.0):
    v = np.asarray(sample_values, dtype=float)
    se = v.std(ddof=1) / math.sqrt(v.size)
    return abs(v.mean() - expected) <= k * se


def gen_gamma_moment(p, beta, k):
    return math.exp(special.gammaln((beta + 1 + k) / p) - special.gammaln((beta + 1) / p))


def test_gamma_shape_one_mean():
    g = sample_gamma(1.0, RngState(1), N)
    assert abs(g.mean() - 1.0) <= 0.004


def test_gamma_small_shape_mean():
    g = sample_gamma(0.02, RngState(2), N)
    assert abs(g.mean() - 0.02) <= 3 * math.sqrt(0.02) / 1e3


def test_gamma_second_moment():
    g = sample_gamma(2.5, RngState(3), N)
    assert within(g**2, 2.5 * 3.5)


def test_gamma_shape_1e_minus_2_law():
    g = sample_gamma(0.01, RngState(4), N)
    assert within(g, 0.01, k=4)
    # the log-space path must not lose the tiny variates to zero entirely
    assert (g > 0).mean() > 0.99


def test_gamma_small_shape_distribution_ks():
    g = sample_gamma(0.05, RngState(5), 20000)
    assert stats.kstest(g, stats.gamma(0.05).cdf).pvalue > 1e-3


def test_gamma_scalar_and_domain():
    assert isinstance(sample_gamma(0.5, RngState(0)), float)
    with pytest.raises(DomainError):
        sample_gamma(0.0, RngState(0))
    with pytest.raises(DomainError):
        sample_gen_gamma(1.0, -1.0, RngState(0))
    with pytest.raises(TypeError):
        sample_gamma(1.0, 12)


def test_gen_gamma_examples():
    assert within(sample_gen_gamma(1.0, 0.0, RngState(6), N), 1.0)
    assert within(sample_gen_gamma(2.0, 0.0, RngState(7), N) ** 2, 0.5)
    x = sample_gen_gamma(0.5, -0.9, RngState(8), N)
    assert within(x, math.gamma(2.2) / math.gamma(0.2))


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("beta", [-0.5, 0.0, 1.0])
def test_gen_gamma_moments_grid(p, beta):
    x = sample_gen_gamma(p, beta, RngState(10, int(10 * p + beta + 1)), N)
    assert within(x, gen_gamma_moment(p, beta, 1), k=4)
    assert within(x**2, gen_gamma_moment(p, beta, 2), k=4)


def test_gen_gamma_density_quadrature_oracle():
    # the moment formula itself, checked against direct integration
    for p, beta, k in [(0.5, -0.5, 1), (2.0, 1.0, 2), (1.5, 0.3, 1)]:
        num = integrate.quad(lambda t: t ** (beta + k) * math.exp(-(t**p)), 0, np.inf)[0]
        den = integrate.quad(lambda t: t**beta * math.exp(-(t**p)), 0, np.inf)[0]
        assert num / den == pytest.approx(gen_gamma_moment(p, beta, k), rel=1e-8)


def test_reproducible_and_streams_differ():
    spec = MeasureSpec("cone", 1.5, 7)
    a = sample(spec, RngState(99, 3), 1000)
    b = sample(spec, RngState(99, 3), 1000)
    c = sample(spec, RngState(99, 4), 1000)
    assert a.points.tobytes() == b.points.tobytes()
    assert not np.array_equal(a.points, c.points)


def test_stream_cross_correlation():
    k = 10**5
    u = sample_gamma(1.0, RngState(5, 0), k)
    v = sample_gamma(1.0, RngState(5, 1), k)
    assert abs(np.corrcoef(u, v)[0, 1]) < 4 / math.sqrt(k)
    w = sample_gamma(1.0, RngState(6, 0), k)
    assert abs(np.corrcoef(u, w)[0, 1]) < 4 / math.sqrt(k)


def test_rngstate_validation():
    with pytest.raises(DomainError):
        RngState(-1)
    with pytest.raises(DomainError):
        RngState(2**64)
    RngState(2**64 - 1, 2**64 - 1).generator(3)


def test_measure_spec_validation_and_tags():
    with pytest.raises(DomainError):
        MeasureSpec("tensor", 1.0, 5)
    with pytest.raises(DomainError):
        MeasureSpec("tensor", 1.0, 5, -1.0)
    with pytest.raises(DomainError):
        MeasureSpec("cone", 1.0, 1)
    with pytest.raises(DomainError):
        MeasureSpec("cone", math.inf, 5)
    with pytest.raises(DomainError):
        MeasureSpec("cone", 1.0, 5, 0.5)
    assert MeasureSpec.parse("tensor:0.5", 2, 4).beta == 0.5
    assert MeasureSpec.parse("tensor-sparse", 2, 4).exponent_beta == pytest.approx(-0.5)
    assert MeasureSpec.parse("Surface", 2, 4).kind is MeasureKind.SURFACE
    with pytest.raises(DomainError):
        MeasureSpec.parse("tensor", 2, 4)
    with pytest.raises(DomainError):
        MeasureSpec.parse("ball", 2, 4)
    with pytest.raises(DomainError):
        sample_cone(MeasureSpec("volume", 1, 3), RngState(0))


@pytest.mark.parametrize("kind", ["cone", "surface", "tensor-sparse"])
@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
def test_points_on_sphere(kind, p):
    batch = sample(MeasureSpec(kind, p, 20), RngState(11), 2000)
    assert all(check_simplex_point(x, p) for x in batch.points)


def test_tensor_sparse_points_normalized_in_high_dimension():
    # shape 1/1000: most coordinates underflow, the logs stay finite
    batch = sample(MeasureSpec("tensor-sparse", 1.0, 1000), RngState(12), 200)
    assert np.all(np.isfinite(batch.log_points))
    assert np.allclose(np.exp(special.logsumexp(batch.log_points, axis=1)), 1.0, rtol=1e-12)


def test_single_sample_interface():
    s = sample(MeasureSpec("cone", 2.0, 4), RngState(0))
    assert isinstance(s, WeightedSample)
    assert s.weight == 1.0
    assert s.point.shape == (4,)


def test_cone_quarter_circle_oracles():
    # p = 2, n = 2: the cone measure is uniform in angle on the quarter circle
    x = sample_cone(MeasureSpec("cone", 2.0, 2), RngState(13), N).points
    assert within(x[:, 0], 2 / math.pi)
    assert within(x.max(axis=1), 2 * math.sqrt(2) / math.pi)
    assert within(x.min(axis=1), 4 / math.pi * (1 - math.sqrt(0.5)))


def test_cone_exchangeable():
    x = sample_cone(MeasureSpec("cone", 0.7, 5), RngState(14), 200000).points
    means = x.mean(axis=0)
    se = x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])
    assert np.all(np.abs(means - means.mean()) < 5 * se)


def test_tensor_exchangeable():
    x = sample_tensor(MeasureSpec("tensor", 1.3, 5, 0.8), RngState(15), 200000).points
    means = x.mean(axis=0)
    se = x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])
    assert np.all(np.abs(means - means.mean()) < 5 * se)


def test_tensor_beta_zero_matches_cone():
    a = sample(MeasureSpec("tensor", 1.5, 6, 0.0), RngState(16), 200000).points.max(axis=1)
    b = sample(MeasureSpec("cone", 1.5, 6), RngState(17), 200000).points.max(axis=1)
    z = (a.mean() - b.mean()) / math.hypot(a.std() / math.sqrt(a.size), b.std() / math.sqrt(b.size))
    assert abs(z) < 4


def test_tensor_dirichlet_marginal():
    # x_1^p is Beta(s, (n-1) s) with s = (beta+1)/p
    p, beta, n = 2.0, 1.0, 4
    x = sample_tensor(MeasureSpec("tensor", p, n, beta), RngState(18), 20000).points
    s = (beta + 1) / p
    assert stats.kstest(x[:, 0] ** p, stats.beta(s, (n - 1) * s).cdf).pvalue > 1e-3


def test_volume_radius():
    batch = sample_volume(MeasureSpec("volume", 1.0, 10), RngState(19), N)
    r = batch.points.sum(axis=1)
    assert within(r, 10 / 11)
    assert np.all(r <= 1.0 + 1e-12)
    assert np.all(batch.log_weights == 0)


def test_surface_weights_constant_for_p_one_and_two():
    b1 = sample_surface(MeasureSpec("surface", 1.0, 9), RngState(20), 1000)
    assert np.allclose(b1.weights, 3.0, rtol=1e-14)
    b2 = sample_surface(MeasureSpec("surface", 2.0, 9), RngState(21), 1000)
    assert np.allclose(b2.weights, 1.0, rtol=1e-14)


def test_surface_weights_positive_and_redraw_counter():
    b = sample_surface(MeasureSpec("surface", 0.5, 50), RngState(22), 5000)
    assert np.all(b.weights > 0) and np.all(np.isfinite(b.weights))
    assert b.redraws >= 0


def _arc_average_max(p):
    # curve x_1^p + x_2^p = 1 parametrized by s = x_1^p, weighted by arc length
    def point(s):
        return s ** (1 / p), (1 - s) ** (1 / p)

    def speed(s):
        dx = (1 / p) * s ** (1 / p - 1)
        dy = (1 / p) * (1 - s) ** (1 / p - 1)
        return math.hypot(dx, dy)

    num = integrate.quad(lambda s: max(point(s)) * speed(s), 0, 1, points=[0.5], limit=200)[0]
    den = integrate.quad(speed, 0, 1, points=[0.5], limit=200)[0]
    return num / den


def test_surface_half_arc_quadrature_oracle():
    b = sample_surface(MeasureSpec("surface", 0.5, 2), RngState(23), N)
    w = b.weights
    f = b.points.max(axis=1)
    est = np.sum(w * f) / np.sum(w)
    se = math.sqrt(np.sum(w**2 * (f - est) ** 2)) / np.sum(w)
    assert abs(est - _arc_average_max(0.5)) <= 3 * se
