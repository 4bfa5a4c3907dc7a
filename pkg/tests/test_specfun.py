import cmath
import math
import random

import mpmath
import numpy as np
import pytest

from modpoisson.errors import InvalidArgument, TruncationNotReached
from modpoisson.specfun import (
    TruncationPolicy,
    harmonic,
    harmonic_exact,
    phi1,
    phi2_primes,
    phi2_primes_partial,
    phi_primes,
    poisson_charfn,
    reciprocal_gamma,
)

from conftest import rgamma_stirling


def test_reciprocal_gamma_trivial():
    assert reciprocal_gamma(1) == pytest.approx(1, abs=1e-15)
    assert reciprocal_gamma(0) == 0
    for n in range(-12, 0):
        assert reciprocal_gamma(n) == 0


def test_reciprocal_gamma_half():
    # frozen from the Stirling-series oracle; equals 1/sqrt(pi)
    expected = rgamma_stirling(0.5)
    assert abs(expected - 0.5641895835477563) < 1e-14
    assert abs(reciprocal_gamma(0.5) - expected) < 1e-12


def test_reciprocal_gamma_against_stirling_oracle():
    rng = random.Random(1)
    for _ in range(300):
        r, t = 4 * math.sqrt(rng.random()), rng.uniform(-math.pi, math.pi)
        z = cmath.rect(r, t)
        ref = rgamma_stirling(z)
        assert abs(reciprocal_gamma(z) - ref) <= 1e-12 * max(abs(ref), 1e-300) + 1e-13


def test_reciprocal_gamma_against_mpmath():
    rng = random.Random(2)
    for _ in range(200):
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if abs(z) > 4:
            continue
        ref = complex(mpmath.rgamma(z))
        assert abs(reciprocal_gamma(z) - ref) <= 1e-12 * abs(ref) + 1e-13


def test_reciprocal_gamma_near_nonpositive_integers():
    for n in range(0, 6):
        z = -n + 1e-9j
        assert abs(reciprocal_gamma(z) - complex(mpmath.rgamma(z))) < 1e-13


def test_reciprocal_gamma_far_left_uses_reflection():
    for z in (-10.5 + 0.3j, -25.2 - 1j):
        ref = complex(mpmath.rgamma(z))
        assert abs(reciprocal_gamma(z) - ref) <= 1e-10 * abs(ref)


def test_reciprocal_gamma_recurrence():
    rng = random.Random(3)
    for _ in range(100):
        z = cmath.rect(3 * math.sqrt(rng.random()), rng.uniform(-math.pi, math.pi))
        lhs = reciprocal_gamma(z)
        rhs = z * reciprocal_gamma(z + 1)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs)) + 1e-15


def test_phi1_values():
    assert abs(phi1(0.0) - 1) < 1e-14
    assert abs(phi1(math.pi)) < 1e-15
    assert abs(phi1(2 * math.pi) - 1) < 1e-14


def test_phi1_periodic():
    for u in np.linspace(-math.pi, math.pi, 101):
        assert abs(phi1(u) - phi1(u + 2 * math.pi)) <= 1e-12


def test_phi1_modulus_peak():
    # max over the circle of |1/Gamma(1 + e^{iu})|, located with mpmath on a
    # fine grid: 1.92274957714534 near u = +-1.6299
    us = np.linspace(-math.pi, math.pi, 4001)
    ours = max(abs(phi1(u)) for u in us)
    ref = max(abs(complex(mpmath.rgamma(mpmath.expj(u) + 1))) for u in us)
    assert abs(ours - ref) < 1e-12
    assert 1.9227 < ours < 1.92275


def test_poisson_charfn():
    assert poisson_charfn(5, 0) == 1
    assert poisson_charfn(0, 2.7) == 1
    assert abs(poisson_charfn(1, math.pi) - math.exp(-2)) < 1e-15
    with pytest.raises(InvalidArgument):
        poisson_charfn(-1, 0.3)


def test_poisson_charfn_modulus():
    rng = random.Random(4)
    for _ in range(500):
        lam, u = rng.expovariate(0.01), rng.uniform(-50, 50)
        v = poisson_charfn(lam, u)
        assert abs(v) <= 1.0
        assert abs(v) == pytest.approx(math.exp(lam * (math.cos(u) - 1)), rel=1e-9, abs=1e-300)


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(1) == 1
    assert harmonic(4) == pytest.approx(25 / 12, abs=1e-15)
    assert harmonic_exact(4) == pytest.approx(25 / 12) and harmonic_exact(4).denominator == 12


def test_truncation_policy_validation():
    with pytest.raises(InvalidArgument):
        TruncationPolicy(tolerance=0)
    with pytest.raises(InvalidArgument):
        TruncationPolicy(tolerance=1.5)
    with pytest.raises(InvalidArgument):
        TruncationPolicy(max_terms=0)


def test_phi2_primes_trivial_and_symmetric():
    assert abs(phi2_primes(0.0) - 1) < 1e-13
    assert abs(phi2_primes(-1.3) - phi2_primes(1.3).conjugate()) < 1e-13


def test_phi2_primes_tolerance_stability():
    a = phi2_primes(math.pi, TruncationPolicy(1e-6))
    b = phi2_primes(math.pi, TruncationPolicy(1e-9))
    assert abs(a - b) <= 2e-6
    for u in np.linspace(-math.pi, math.pi, 13):
        for eps in (1e-5, 1e-8):
            x = phi2_primes(u, TruncationPolicy(eps))
            y = phi2_primes(u, TruncationPolicy(eps / 10))
            assert abs(x - y) <= 2 * eps


def test_phi2_primes_against_long_partial_product():
    # |log factor| <= 4/p^2, so the product over p > 10^6 moves the value by
    # at most about 4/(10^6 log 10^6) relative
    for u in (0.5, 1.0, 2.0, 3.0):
        full = phi2_primes(u, TruncationPolicy(1e-12))
        partial = phi2_primes_partial(u, 10 ** 6)
        assert abs(full - partial) <= 4 / (1e6 * math.log(1e6)) * abs(full) * 1.5


def test_phi2_primes_truncation_not_reached():
    with pytest.raises(TruncationNotReached):
        phi2_primes(1.0, TruncationPolicy(tolerance=1e-15, max_terms=1))


def test_phi_primes_vanishes_at_pi():
    assert abs(phi_primes(math.pi)) < 1e-14
