import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modpoisson._primes import primes_up_to
from modpoisson.dist import (
    CharFnGrid,
    DiscreteDistribution,
    ModGaussianScaling,
    bernoulli_model_limit,
    bernoulli_sum_dist,
    charfn,
    charfn_grid,
    clt_normalized_ks,
    ks_charfn_bound,
    ks_distance,
    mod_gaussian_cube_transform,
    modpoisson_scale,
    poisson_dist,
    prime_model,
    total_variation,
)
from modpoisson.errors import InvalidArgument, TruncationNotReached
from modpoisson.specfun import TruncationPolicy, phi1, poisson_charfn


def bernoulli(p):
    return bernoulli_sum_dist([p])


# -- DiscreteDistribution -------------------------------------------------------

def test_distribution_validation():
    with pytest.raises(InvalidArgument):
        DiscreteDistribution(0, (Fraction(1, 2), Fraction(1, 3)), exact=True)
    with pytest.raises(InvalidArgument):
        DiscreteDistribution(0, (0.5, -0.1, 0.6))
    with pytest.raises(InvalidArgument):
        DiscreteDistribution(0, (0.5, 0.4))
    with pytest.raises(InvalidArgument):
        DiscreteDistribution.from_counts([0, 0])


def test_from_counts_trims_and_is_exact():
    law = DiscreteDistribution.from_counts([0, 0, 3, 1, 0])
    assert law.offset == 2
    assert law.weights == (Fraction(3, 4), Fraction(1, 4))
    assert law.pmf(5) == 0


def test_grid_and_scaling_types():
    with pytest.raises(InvalidArgument):
        CharFnGrid((0.0, 1.0), (1.0,))
    with pytest.raises(InvalidArgument):
        CharFnGrid((1.0, 0.5), (1.0, 1.0))
    with pytest.raises(InvalidArgument):
        CharFnGrid((0.0,), (0.5,))
    with pytest.raises(InvalidArgument):
        ModGaussianScaling(0.0, -1.0)


# -- charfn -----------------------------------------------------------------------

def test_charfn_examples():
    assert abs(charfn(DiscreteDistribution.point_mass(3), 0.5) - cmath.exp(1.5j)) < 1e-15
    assert abs(charfn(bernoulli(Fraction(1, 2)), math.pi)) < 1e-15
    for law in (poisson_dist(3.3), bernoulli_sum_dist([0.2, 0.9, 0.4])):
        assert abs(charfn(law, 0.0) - 1) < 1e-12


# -- poisson ----------------------------------------------------------------------

def test_poisson_examples():
    zero = poisson_dist(0)
    assert zero.offset == 0 and zero.weights == (1,)
    one = poisson_dist(1)
    assert float(one.pmf(0)) == pytest.approx(math.exp(-1), rel=1e-11)
    four = poisson_dist(4)
    assert four.pmf(3) == pytest.approx(four.pmf(4), rel=1e-12)
    assert four.pmf(4) > four.pmf(5) and four.pmf(3) > four.pmf(2)


@pytest.mark.parametrize("lam", [0.3, 7.0, 150.0, 1e4])
def test_poisson_truncation_mass(lam):
    law = poisson_dist(lam, cutoff_mass=1e-9)
    assert law.truncated_mass <= 1e-9
    assert math.fsum(law.probs) == pytest.approx(1.0, abs=1e-12)


def test_poisson_rejects_bad_cutoff():
    with pytest.raises(InvalidArgument):
        poisson_dist(1.0, cutoff_mass=0.1)
    with pytest.raises(InvalidArgument):
        poisson_dist(-1.0)


# -- Kolmogorov-Smirnov -----------------------------------------------------------

def test_ks_examples():
    p = poisson_dist(2.5)
    assert ks_distance(p, p) == 0
    assert ks_distance(DiscreteDistribution.point_mass(0), DiscreteDistribution.point_mass(1)) == 1
    # direct CDF comparison: the gap at x = 0 is e^{-1/2} - 1/2, at x = 1 it is
    # 1 - 3/2 e^{-1/2}, which is smaller
    expected = max(math.exp(-0.5) - 0.5, 1 - 1.5 * math.exp(-0.5))
    assert expected == math.exp(-0.5) - 0.5
    assert ks_distance(bernoulli(Fraction(1, 2)), poisson_dist(0.5)) == pytest.approx(expected, abs=1e-12)


def test_ks_exact_mode():
    a = bernoulli_sum_dist([Fraction(1, 2), Fraction(1, 3)])
    b = bernoulli_sum_dist([Fraction(1, 4)])
    assert ks_distance(a, b) == Fraction(3, 4) - Fraction(1, 3)


_laws = st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=6).map(bernoulli_sum_dist)


@settings(max_examples=100, deadline=None)
@given(_laws, _laws, _laws)
def test_ks_is_a_metric(a, b, c):
    assert ks_distance(a, b) == ks_distance(b, a)
    assert ks_distance(a, c) <= ks_distance(a, b) + ks_distance(b, c) + 1e-12


def test_ks_charfn_bound_examples():
    p = poisson_dist(100)
    assert ks_charfn_bound(p, p) == 0
    assert ks_charfn_bound(p, p, 128) - ks_charfn_bound(p, p, 256) == 0
    a, b = bernoulli(Fraction(1, 2)), poisson_dist(0.5)
    assert ks_charfn_bound(a, b) >= float(ks_distance(a, b))
    with pytest.raises(InvalidArgument):
        ks_charfn_bound(a, b, quad_points=10)


def test_ks_charfn_bound_quadrature_converged():
    # integrand for Bernoulli vs Poisson is smooth: compare against a much finer rule
    a, b = bernoulli(Fraction(1, 3)), poisson_dist(1 / 3)
    assert ks_charfn_bound(a, b, 64) == pytest.approx(ks_charfn_bound(a, b, 4096), rel=1e-10)


def test_ks_charfn_bound_dominates():
    rng = random.Random(5)
    for _ in range(30):
        xs = [rng.random() * 0.6 for _ in range(rng.randint(1, 30))]
        a = bernoulli_sum_dist(xs)
        b = poisson_dist(sum(xs))
        assert ks_charfn_bound(a, b) >= float(ks_distance(a, b)) - 1e-6


def test_total_variation():
    a, b = bernoulli(Fraction(1, 2)), bernoulli(Fraction(1, 4))
    assert total_variation(a, b) == pytest.approx(0.25)


# -- Bernoulli sums -----------------------------------------------------------------

def test_bernoulli_sum_examples():
    three = bernoulli_sum_dist([1, 1, 1])
    assert three.offset == 3 and three.weights == (1,)
    b = bernoulli_sum_dist([Fraction(2, 7)])
    assert b.weights == (Fraction(5, 7), Fraction(2, 7))
    two = bernoulli_sum_dist([Fraction(1, 2), Fraction(1, 3)])
    assert two.weights == (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6))


def test_bernoulli_sum_exact_total():
    xs = [Fraction(1, k + 1) for k in range(64)]
    law = bernoulli_sum_dist(xs)
    assert law.exact and sum(law.weights) == 1


def test_bernoulli_sum_float_matches_exact():
    xs = [Fraction(1, k + 2) for k in range(40)]
    exact = bernoulli_sum_dist(xs)
    approx = bernoulli_sum_dist([float(x) for x in xs])
    assert not approx.exact
    assert np.max(np.abs(exact.probs - approx.probs)) < 1e-14


def test_bernoulli_sum_rejects_out_of_range():
    with pytest.raises(InvalidArgument):
        bernoulli_sum_dist([0.5, 1.5])


def test_bernoulli_model_limit_examples():
    assert bernoulli_model_limit(0.0, [0.3, 0.2, 0.1]) == pytest.approx(1, abs=1e-15)
    assert bernoulli_model_limit(1.7, [0.0] * 10) == 1
    a = bernoulli_model_limit(1.0, [1 / p for p in primes_up_to(10 ** 4)])
    b = bernoulli_model_limit(1.0, [1 / p for p in primes_up_to(10 ** 5)])
    assert abs(a - b) < 1e-5


def test_bernoulli_model_limit_direct_product():
    xs = [0.5, 0.25, 0.125]
    u = 0.9
    w = cmath.exp(1j * u)
    direct = 1
    for x in xs:
        direct *= (1 + x * (w - 1)) * cmath.exp(x * (1 - w))
    assert abs(bernoulli_model_limit(u, xs) - direct) < 1e-15


def test_bernoulli_model_limit_truncation():
    with pytest.raises(TruncationNotReached):
        bernoulli_model_limit(1.0, [0.5] * 20, TruncationPolicy(1e-6, max_terms=5))


# -- mod-Poisson scaling ------------------------------------------------------------

def test_modpoisson_scale_examples():
    law = bernoulli_sum_dist([0.3, 0.6])
    grid = charfn_grid(law, [-1.0, 0.0, 2.0], 0.0)
    assert modpoisson_scale(grid) == grid
    lam = 3.7
    exact = CharFnGrid((-2.0, 0.0, 0.5, 3.0),
                       tuple(poisson_charfn(lam, u) for u in (-2.0, 0.0, 0.5, 3.0)), lam)
    for s in modpoisson_scale(exact).samples:
        assert abs(s - 1) <= 1e-12


def test_modpoisson_scale_of_truncated_poisson():
    # the dropped mass (<= 1e-12) is amplified by exp(lam (1 - cos u))
    lam = 12.0
    grid = modpoisson_scale(charfn_grid(poisson_dist(lam), np.linspace(-3, 3, 13), lam))
    for u, s in zip(grid.u_values, grid.samples):
        assert abs(s - 1) <= 1e-11 * math.exp(lam * (1 - math.cos(u)))


def test_feller_bernoulli_model_converges_to_phi1():
    us = [0.5, 1.0, 2.0]
    errs = []
    for N in (100, 10 ** 4):
        xs = [1 / (k + 1) for k in range(1, N + 1)]
        lam = math.fsum(math.log1p(1 / k) for k in range(1, N + 1))
        assert lam == pytest.approx(math.log(N + 1), rel=1e-12)
        grid = modpoisson_scale(charfn_grid(bernoulli_sum_dist(xs), us, lam))
        errs.append(max(abs(s - phi1(u)) for u, s in zip(us, grid.samples)))
    assert errs[1] < 0.02
    assert errs[1] < errs[0]


def test_scaled_bernoulli_sum_approaches_model_limit():
    us = [0.5, 1.5]
    gaps = []
    for N in (10, 100, 1000):
        xs = [1 / (n + 1) for n in range(1, N + 1)]
        grid = modpoisson_scale(charfn_grid(bernoulli_sum_dist(xs), us, math.fsum(xs)))
        full = [bernoulli_model_limit(u, [1 / (n + 1) for n in range(1, 10 ** 5)],
                                      TruncationPolicy(1e-4, 10 ** 6)) for u in us]
        gaps.append(max(abs(s - f) for s, f in zip(grid.samples, full)))
    assert gaps[0] > gaps[1] > gaps[2]


# -- normal approximation and the cube-root transform -------------------------------

def test_clt_normalized_ks():
    assert 0 <= clt_normalized_ks(DiscreteDistribution.point_mass(1), 1.0) <= 1
    small = clt_normalized_ks(poisson_dist(1e4), 1e4)
    large = clt_normalized_ks(poisson_dist(1e6), 1e6)
    assert small <= 0.01
    assert large <= 0.002 and large < small


def test_mod_gaussian_cube_transform():
    lam = 1e6
    at = lambda s: poisson_charfn(lam, s)  # noqa: E731
    assert mod_gaussian_cube_transform(lam, 0.0, at) == 1
    plus = mod_gaussian_cube_transform(lam, 1.0, at)
    minus = mod_gaussian_cube_transform(lam, -1.0, at)
    assert abs(plus - cmath.exp(-1j / 6)) < 2e-3
    assert abs(abs(plus * minus) - 1) < 5e-3
    assert abs(minus - plus.conjugate()) < 1e-12


# -- prime model --------------------------------------------------------------------

def test_prime_model_small():
    law, lam = prime_model(2)
    assert law.weights == (Fraction(1, 2), Fraction(1, 2))
    assert lam == pytest.approx(math.log(2), rel=1e-15)
    law, lam = prime_model(3)
    assert law.weights == (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6))
    assert lam == pytest.approx(math.log(3), rel=1e-15)


def test_prime_model_parameter_stabilizes():
    diffs = [prime_model(y)[1] - math.log(math.log(y)) for y in (10 ** 3, 10 ** 4, 10 ** 5)]
    assert abs(diffs[2] - diffs[1]) < abs(diffs[1] - diffs[0])


@pytest.mark.parametrize("y", [10 ** 2, 10 ** 3, 10 ** 4])
def test_prime_model_ks_shape(y):
    law, lam = prime_model(y)
    target = poisson_dist(lam)
    ks = float(ks_distance(law, target))
    assert ks * math.sqrt(lam) <= 1
    assert ks_charfn_bound(law, target) >= ks
