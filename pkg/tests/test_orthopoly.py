"""Orthonormal families: recurrence values, quadrature, induced distributions."""

import math

import mpmath as mp
import numpy as np
import pytest

from optwls import orthopoly as op

FAMILIES = [op.LEGENDRE, op.HERMITE]


def quadrature_inner(family, f, g, order=200):
    rule = op.gauss_rule(family, order)
    return float(np.sum(rule.weights * f(rule.nodes) * g(rule.nodes)))


def test_constant_is_one():
    assert op.eval_orthonormal(op.LEGENDRE, 0, 0.3) == 1.0
    assert op.eval_orthonormal(op.HERMITE, 0, -2.4) == 1.0


def test_legendre_degree_one():
    # orthonormal scaling sqrt(3) t, unit norm under the quadrature oracle
    assert op.eval_orthonormal(op.LEGENDRE, 1, 0.5) == pytest.approx(math.sqrt(3) * 0.5, abs=1e-14)
    sq = quadrature_inner(op.LEGENDRE, lambda t: op.eval_orthonormal(op.LEGENDRE, 1, t),
                          lambda t: op.eval_orthonormal(op.LEGENDRE, 1, t))
    assert sq == pytest.approx(1.0, abs=1e-13)


def test_hermite_degree_two():
    assert op.eval_orthonormal(op.HERMITE, 2, 0.0) == pytest.approx(-1.0 / math.sqrt(2), abs=1e-14)
    sq = quadrature_inner(op.HERMITE, lambda t: op.eval_orthonormal(op.HERMITE, 2, t),
                          lambda t: op.eval_orthonormal(op.HERMITE, 2, t))
    assert sq == pytest.approx(1.0, abs=1e-13)


def test_eval_all_examples():
    vals = op.eval_all_orthonormal(op.LEGENDRE, 2, 1.0)
    assert np.allclose(vals, [1.0, math.sqrt(3), math.sqrt(5)], atol=1e-13)
    assert np.allclose(op.eval_all_orthonormal(op.HERMITE, 1, 0.0), [1.0, 0.0])
    assert np.allclose(op.eval_all_orthonormal(op.LEGENDRE, 0, -0.7), [1.0])


@pytest.mark.parametrize("family", FAMILIES)
def test_eval_all_matches_single(family):
    rng = np.random.default_rng(1)
    t = rng.uniform(-1, 1, 11) if family is op.LEGENDRE else rng.normal(0, 2, 11)
    table = op.eval_all_orthonormal(family, 25, t)
    for j in (0, 1, 7, 25):
        assert np.allclose(table[:, j], op.eval_orthonormal(family, j, t), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("family", FAMILIES)
def test_orthonormality_to_degree_60(family):
    rule = op.gauss_rule(family, 61)
    table = op.eval_all_orthonormal(family, 60, rule.nodes)
    gram = (table * rule.weights[:, None]).T @ table
    assert np.abs(gram - np.eye(61)).max() < 1e-10


def test_gauss_rule_examples():
    r = op.gauss_rule(op.LEGENDRE, 1)
    assert np.allclose(r.nodes, [0.0]) and np.allclose(r.weights, [1.0])
    r = op.gauss_rule(op.LEGENDRE, 2)
    assert np.allclose(np.sort(r.nodes), [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-14)
    assert np.allclose(r.weights, [0.5, 0.5], atol=1e-14)
    r = op.gauss_rule(op.HERMITE, 2)
    assert np.allclose(np.sort(r.nodes), [-1.0, 1.0], atol=1e-14)
    assert np.allclose(r.weights, [0.5, 0.5], atol=1e-14)


def _analytic_moment(family, p):
    if p % 2 == 1:
        return 0.0
    if family is op.LEGENDRE:
        return 1.0 / (p + 1)
    return float(np.prod(np.arange(1, p, 2, dtype=float))) if p else 1.0


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("q", [1, 2, 3, 5, 8])
def test_gauss_rule_moment_exactness(family, q):
    rule = op.gauss_rule(family, q)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-13)
    for p in range(2 * q):
        got = float(np.sum(rule.weights * rule.nodes**p))
        want = _analytic_moment(family, p)
        # odd moments cancel terms of the size of the next even moment
        scale = max(1.0, _analytic_moment(family, p + p % 2))
        assert got == pytest.approx(want, abs=1e-10 * scale)


def test_induced_cdf_examples():
    assert op.induced_cdf(op.LEGENDRE, 0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert op.induced_cdf(op.LEGENDRE, 0, 0.0) == pytest.approx(0.5, abs=1e-14)
    # degree-1 induced density 3t^2/2 has the closed-form CDF (t^3+1)/2
    assert op.induced_cdf(op.LEGENDRE, 1, 0.0) == pytest.approx(0.5, abs=1e-13)
    for t in np.linspace(-1, 1, 17):
        assert op.induced_cdf(op.LEGENDRE, 1, t) == pytest.approx((t**3 + 1) / 2, abs=1e-13)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("degree", [0, 1, 5, 20])
def test_induced_cdf_monotone_and_limits(family, degree):
    rng = np.random.default_rng(20 + degree)
    if family is op.LEGENDRE:
        pts = np.sort(rng.uniform(-1, 1, 1000))
        lo, hi = -1.0, 1.0
    else:
        pts = np.sort(rng.normal(0.0, 3.0, 1000))
        lo, hi = -40.0, 40.0
    cdf = op.induced_cdf(family, degree, pts)
    assert np.diff(cdf).min() >= -1e-14
    assert op.induced_cdf(family, degree, lo) <= 1e-13
    assert op.induced_cdf(family, degree, hi) >= 1.0 - 1e-13


def _ks_statistic(sorted_samples, cdf_values):
    n = len(sorted_samples)
    grid = np.arange(1, n + 1) / n
    return max(np.abs(cdf_values - grid).max(), np.abs(cdf_values - (grid - 1.0 / n)).max())


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("degree", [0, 1, 5, 20])
def test_sampler_matches_cdf_ks(family, degree):
    n = 100_000
    rng = np.random.default_rng(300 + degree)
    x = np.sort(op.sample_induced(family, degree, rng, size=n))
    stat = _ks_statistic(x, op.induced_cdf(family, degree, x))
    assert stat < 1.63 / math.sqrt(n)  # 1% asymptotic critical value


def test_sampler_legendre_degree_zero_is_uniform():
    draws = op.sample_induced(op.LEGENDRE, 0, np.random.default_rng(5), size=64)
    expected = np.random.default_rng(5).uniform(-1.0, 1.0, 64)
    assert np.array_equal(draws, expected)


def test_sampler_legendre_degree_one_closed_form():
    n = 100_000
    x = np.sort(op.sample_induced(op.LEGENDRE, 1, np.random.default_rng(17), size=n))
    stat = _ks_statistic(x, (x**3 + 1) / 2)
    assert stat < 1.63 / math.sqrt(n)


def test_sampler_hermite_degree_zero_moments():
    n = 100_000
    x = op.sample_induced(op.HERMITE, 0, np.random.default_rng(23), size=n)
    assert abs(x.mean()) < 3.0 / math.sqrt(n)
    assert abs(x.var() - 1.0) < 5.0 * math.sqrt(2.0 / n)


def test_sampler_scalar_and_determinism():
    one = op.sample_induced(op.HERMITE, 3, np.random.default_rng(9))
    again = op.sample_induced(op.HERMITE, 3, np.random.default_rng(9))
    assert isinstance(one, float) and one == again
    assert op.sample_induced(op.LEGENDRE, 2, np.random.default_rng(0), size=0).size == 0


def test_recurrence_stable_at_degree_150():
    mp.mp.dps = 60
    rng = np.random.default_rng(42)
    pts = rng.uniform(-1, 1, 20)
    got = op.eval_orthonormal(op.LEGENDRE, 150, pts)
    assert np.all(np.isfinite(got))
    oracle = np.array(
        [float(mp.sqrt(301) * mp.legendre(150, mp.mpf(float(t)))) for t in pts]
    )
    assert np.abs(got - oracle).max() / np.abs(oracle).min() < 1e-8
    assert np.max(np.abs(got - oracle) / np.abs(oracle)) < 1e-8

    # probabilists' normalization: He_n(t) / sqrt(n!), via the physicists' form
    t = 2.6
    n = 150
    he = mp.mpf(2) ** (-n / 2) * mp.hermite(n, mp.mpf(t) / mp.sqrt(2))
    oracle_h = float(he / mp.sqrt(mp.factorial(n)))
    got_h = op.eval_orthonormal(op.HERMITE, n, t)
    assert math.isfinite(got_h)
    assert abs(got_h - oracle_h) / abs(oracle_h) < 1e-8


def test_induced_mass_is_normalized_at_high_degree():
    from optwls.orthopoly import _induced_table

    for family in FAMILIES:
        for degree in (0, 3, 40, 160):
            assert abs(_induced_table(family, degree).total - 1.0) < 1e-12


def test_invalid_degree_rejected():
    with pytest.raises(ValueError):
        op.eval_orthonormal(op.LEGENDRE, -1, 0.0)
    with pytest.raises(ValueError):
        op.induced_cdf(op.HERMITE, -2, 0.0)
    with pytest.raises(ValueError):
        op.gauss_rule(op.LEGENDRE, 0)
