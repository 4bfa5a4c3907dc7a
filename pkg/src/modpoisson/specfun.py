"""Complex special functions and the closed-form limiting functions.

Complex values are plain Python ``complex``. All powers ``a**w`` with a real
base ``a`` in (0, 1) are evaluated as ``exp(w * log(a))`` with the real
logarithm, so no branch of the complex logarithm is ever chosen implicitly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ._primes import primes_up_to
from .errors import InvalidArgument, TruncationNotReached

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
# Beyond this many recurrence steps the reflection formula is used instead.
_MAX_SHIFTS = 8


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to push a truncated infinite product.

    ``tolerance`` bounds the modulus of the omitted log-tail; ``max_terms``
    caps the work (its meaning is documented by each consumer).
    """

    tolerance: float = 1e-10
    max_terms: int = 10_000

    def __post_init__(self):
        if not (0.0 < self.tolerance < 1.0):
            raise InvalidArgument(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if int(self.max_terms) < 1:
            raise InvalidArgument(f"max_terms must be >= 1, got {self.max_terms}")


def _rgamma_lanczos(z: complex) -> complex:
    # valid for Re(z) >= 0.5
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return cmath.exp(t - (z + 0.5) * cmath.log(t)) / (_SQRT_2PI * x)


def reciprocal_gamma(z) -> complex:
    """Entire function 1/Gamma(z).

    Lanczos on Re(z) >= 1/2; to the left, the recurrence
    1/Gamma(z) = z / Gamma(z + 1), or reflection when far from the right
    half-plane. Integers are exact: zero at the poles, 1/(n-1)! otherwise.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real == math.floor(z.real) and z.real <= 171:
        if z.real <= 0.0:
            return 0j
        return complex(1.0 / math.factorial(int(z.real) - 1))
    if z.real >= 0.5:
        return _rgamma_lanczos(z)
    shifts = math.ceil(0.5 - z.real)
    if shifts <= _MAX_SHIFTS:
        acc = 1.0 + 0j
        w = z
        for _ in range(shifts):
            acc *= w
            w += 1.0
        return acc * _rgamma_lanczos(w)
    # 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    return cmath.sin(math.pi * z) / (math.pi * _rgamma_lanczos(1.0 - z))


def phi1(u: float) -> complex:
    """Group-theoretic limiting factor 1/Gamma(e^{iu} + 1)."""
    return reciprocal_gamma(cmath.exp(1j * u) + 1.0)


def poisson_charfn(lam: float, u: float) -> complex:
    """exp(lam (e^{iu} - 1)), with e^{iu} - 1 = -2 sin^2(u/2) + i sin(u)."""
    if lam < 0:
        raise InvalidArgument(f"lambda must be >= 0, got {lam}")
    s = math.sin(0.5 * u)
    return cmath.exp(lam * complex(-2.0 * s * s, math.sin(u)))


def harmonic(b: int) -> float:
    """H_b = 1 + 1/2 + ... + 1/b, with H_0 = 0."""
    if b < 0:
        raise InvalidArgument(f"b must be >= 0, got {b}")
    return math.fsum(1.0 / j for j in range(1, b + 1))


@lru_cache(maxsize=None)
def harmonic_exact(b: int) -> Fraction:
    if b < 0:
        raise InvalidArgument(f"b must be >= 0, got {b}")
    if b == 0:
        return Fraction(0)
    return harmonic_exact(b - 1) + Fraction(1, b)


# ---------------------------------------------------------------------------
# Euler product over primes
# ---------------------------------------------------------------------------

# Primes up to this bound are multiplied in explicitly; the rest of the
# product is summed through the prime zeta function.
_EXPLICIT_PRIME_BOUND = 1000


def _prime_factor(p, w: complex) -> complex:
    # (1 - 1/p)^w (1 + w/(p-1))
    return cmath.exp(w * math.log1p(-1.0 / p)) * (1.0 + w / (p - 1.0))


def phi2_primes_partial(u: float, prime_bound: int) -> complex:
    """Plain truncated Euler product over p <= prime_bound (no tail correction)."""
    w = cmath.exp(1j * u)
    ps = primes_up_to(prime_bound).astype(float)
    if len(ps) == 0:
        return 1.0 + 0j
    factors = 1.0 + w / (ps - 1.0)
    if np.any(factors == 0):
        return 0j
    logs = w * np.log1p(-1.0 / ps) + np.log(factors)
    # exp of a sum of principal logs is the product, whatever the branches
    return complex(np.exp(math.fsum(logs.real) + 1j * math.fsum(logs.imag)))


@lru_cache(maxsize=None)
def _prime_zeta_tail(k: int, bound: int) -> float:
    # sum_{p > bound} p^{-k}
    with mpmath.workdps(40):
        head = mpmath.fsum(mpmath.mpf(int(p)) ** (-k) for p in primes_up_to(bound))
        return float(mpmath.primezeta(k) - head)


def _tail_remainder_bound(k_max: int, bound: int) -> float:
    # sum_{k > k_max} (2 + 2^k)/k * sum_{p > bound} p^{-k},
    # with sum_{p > bound} p^{-k} <= bound^{1-k}/(k-1)
    total = 0.0
    k = k_max + 1
    while True:
        term = (2.0 + 2.0 ** k) / k * bound ** (1.0 - k) / (k - 1)
        total += term
        if term < 1e-30 or k > k_max + 200:
            return total
        k += 1


def phi2_primes(u: float, policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """Arithmetic Euler factor prod_p (1 - 1/p)^{e^{iu}} (1 + e^{iu}/(p - 1)).

    For p above a fixed bound the logarithm of each factor is expanded as
    sum_{k>=2} c_k p^{-k} with c_k = (1 - w - (1 - w)^k)/k, and the sums over p
    are taken from the prime zeta function. The number of k-terms grows until
    the bound on what is left falls below ``policy.tolerance``;
    ``policy.max_terms`` caps that number.
    """
    w = cmath.exp(1j * u)
    bound = _EXPLICIT_PRIME_BOUND
    head = phi2_primes_partial(u, bound)
    if head == 0:
        return 0j
    k_max = 2
    while _tail_remainder_bound(k_max, bound) > policy.tolerance:
        k_max += 1
        if k_max - 1 > policy.max_terms:
            raise TruncationNotReached(
                f"prime-zeta tail needs more than {policy.max_terms} terms "
                f"for tolerance {policy.tolerance}"
            )
    one_minus_w = 1.0 - w
    log_tail = 0j
    for k in range(2, k_max + 1):
        c_k = (one_minus_w - one_minus_w ** k) / k
        log_tail += c_k * _prime_zeta_tail(k, bound)
    return head * cmath.exp(log_tail)


def phi_primes(u: float, policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """Erdos-Kac limiting function phi1(u) * phi2_primes(u)."""
    return phi1(u) * phi2_primes(u, policy)
