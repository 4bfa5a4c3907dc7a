"""Cycle statistics of uniform random permutations.

``cycles(sigma)`` is the number of disjoint cycles of sigma and
``min_length(sigma)`` its shortest cycle length. Every law here is exact
(rational or arbitrary-precision integer) unless it is a characteristic
function evaluated at a real frequency.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .dist import DiscreteDistribution
from .errors import DegenerateFrequency, InvalidArgument, ResourceLimit
from .specfun import harmonic, harmonic_exact, reciprocal_gamma

MAX_STIRLING_DEGREE = 5000
MAX_RECURSION_DEGREE = 2000
MAX_RATIONAL_SIEVE_DEGREE = 2000
# closeness to an odd multiple of pi below which explicit_permut_ratio refuses
DEGENERATE_WIDTH = 1e-6


@dataclass(frozen=True)
class CycleType:
    """Conjugacy class of S_d: ``multiplicities[j-1]`` is the number of j-cycles."""

    d: int
    multiplicities: tuple

    def __post_init__(self):
        if self.d < 1:
            raise InvalidArgument("d must be >= 1")
        if len(self.multiplicities) != self.d:
            raise InvalidArgument("need one multiplicity per cycle length 1..d")
        if any(r < 0 for r in self.multiplicities):
            raise InvalidArgument("multiplicities must be nonnegative")
        if sum(j * r for j, r in enumerate(self.multiplicities, start=1)) != self.d:
            raise InvalidArgument("sum of j * r_j must equal d")

    @classmethod
    def from_lengths(cls, lengths):
        """Build from a list of cycle lengths, e.g. ``[2, 1, 1]``."""
        d = sum(lengths)
        r = [0] * d
        for j in lengths:
            r[j - 1] += 1
        return cls(d, tuple(r))

    @classmethod
    def from_counts(cls, d, counts: dict):
        """Build from ``{cycle length: multiplicity}``."""
        r = [0] * d
        for j, m in counts.items():
            r[j - 1] = m
        return cls(d, tuple(r))

    @property
    def num_cycles(self) -> int:
        return sum(self.multiplicities)

    @property
    def min_length(self) -> int:
        return next(j for j, r in enumerate(self.multiplicities, start=1) if r)

    def lengths(self) -> list:
        return [j for j, r in enumerate(self.multiplicities, start=1) for _ in range(r)]

    def label(self) -> str:
        """Compact text form, e.g. ``1^2 2^1``."""
        return " ".join(f"{j}^{r}" for j, r in enumerate(self.multiplicities, start=1) if r)

    def __str__(self):
        return self.label()


def partitions(d: int) -> Iterator[CycleType]:
    """All cycle types of S_d (partitions of d), largest parts first."""

    def rec(n, max_part):
        if n == 0:
            yield []
            return
        for part in range(min(n, max_part), 0, -1):
            for rest in rec(n - part, part):
                yield [part] + rest

    for lengths in rec(d, d):
        yield CycleType.from_lengths(lengths)


def conjugacy_class_prob(ct: CycleType) -> Fraction:
    """P(sigma_d has cycle type ct) = prod_j 1/(j^{r_j} r_j!)."""
    denom = 1
    for j, r in enumerate(ct.multiplicities, start=1):
        denom *= j ** r * math.factorial(r)
    return Fraction(1, denom)


# ---------------------------------------------------------------------------
# unrestricted cycle count
# ---------------------------------------------------------------------------

def stirling_first_row(d: int) -> list:
    """Unsigned Stirling numbers c(d, k), k = 0..d, as Python ints.

    Row by row from c(n, k) = c(n-1, k-1) + (n-1) c(n-1, k).
    """
    row = np.zeros(d + 1, dtype=object)
    row[0] = 1
    for n in range(1, d + 1):
        # update in place from the top so c(n-1, k-1) is still unread
        row[1 : n + 1] = row[0:n] + (n - 1) * row[1 : n + 1]
        row[0] = 0
    return [int(c) for c in row]


def cycle_count_dist(d: int) -> DiscreteDistribution:
    """Exact law of the number of cycles of a uniform permutation of S_d."""
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    if d > MAX_STIRLING_DEGREE:
        raise ResourceLimit(f"d = {d} exceeds {MAX_STIRLING_DEGREE}")
    row = stirling_first_row(d)
    return DiscreteDistribution.from_counts(row[1:], offset=1)


def cycle_charfn_product(d: int, u: float) -> complex:
    """E(e^{iu cycles(sigma_d)}) = prod_{j<=d} (1 - 1/j + e^{iu}/j)."""
    if d < 0:
        raise InvalidArgument(f"d must be >= 0, got {d}")
    w = cmath.exp(1j * u)
    acc = 1.0 + 0j
    for j in range(1, d + 1):
        acc *= 1.0 + (w - 1.0) / j
    return acc


def _cycle_charfn_table(d: int, w: complex) -> np.ndarray:
    # [E(w^{cycles(sigma_n)}) for n = 0..d]
    out = np.empty(d + 1, dtype=complex)
    out[0] = 1.0
    for n in range(1, d + 1):
        out[n] = out[n - 1] * (1.0 + (w - 1.0) / n)
    return out


def explicit_permut_ratio(d: int, u: float) -> complex:
    """Gamma(e^{iu}) exp(-(log d)(e^{iu} - 1)) E(e^{iu cycles(sigma_d)}).

    Tends to 1 at rate O(1/d). Undefined where 1/Gamma(e^{iu}) vanishes,
    i.e. at odd multiples of pi.
    """
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    dist_to_odd = abs(math.remainder(u - math.pi, 2.0 * math.pi))
    if dist_to_odd < DEGENERATE_WIDTH:
        raise DegenerateFrequency(f"u = {u} is within {DEGENERATE_WIDTH} of an odd multiple of pi")
    w = cmath.exp(1j * u)
    return cycle_charfn_product(d, u) * cmath.exp(-math.log(d) * (w - 1.0)) / reciprocal_gamma(w)


# ---------------------------------------------------------------------------
# permutations without short cycles
# ---------------------------------------------------------------------------

def _check_restricted(d, b, limit):
    if d < 0 or b < 0:
        raise InvalidArgument(f"need d, b >= 0, got d={d}, b={b}")
    if b > d:
        raise InvalidArgument(f"need b <= d, got d={d}, b={b}")
    if d > limit:
        raise ResourceLimit(f"d = {d} exceeds {limit}")


def _restricted_table(d: int, b: int, w: complex) -> np.ndarray:
    # g(n) = E(w^{cycles} ; min_length > b) for S_n, via
    # n g(n) = w * sum_{j=b+1}^{n} g(n-j) = w * G(n-b-1), G the prefix sum.
    g = np.zeros(d + 1, dtype=complex)
    g[0] = 1.0
    prefix = np.zeros(d + 1, dtype=complex)
    prefix[0] = 1.0
    for n in range(1, d + 1):
        m = n - b - 1
        g[n] = w * prefix[m] / n if m >= 0 else 0.0
        prefix[n] = prefix[n - 1] + g[n]
    return g


def restricted_cycle_charfn(d: int, b: int, u: float) -> complex:
    """E(e^{iu cycles(sigma_d)} 1{min_length(sigma_d) > b}).

    Computed from the exponential generating function
    exp(w * sum_{j>b} x^j/j) by its normalized coefficient recurrence.
    """
    _check_restricted(d, b, MAX_STIRLING_DEGREE)
    return complex(_restricted_table(d, b, cmath.exp(1j * u))[d])


def restricted_cycle_law(d: int, b: int) -> list:
    """Exact [P(cycles = k, min_length > b) for k = 0..d] as Fractions."""
    _check_restricted(d, b, MAX_RATIONAL_SIEVE_DEGREE)
    # integer counts a(n)[k] of permutations of n with all cycles > b:
    # a(n) = sum_{j=b+1}^{n} (n-1)!/(n-j)! * x * a(n-j)
    a = [[1]]
    for n in range(1, d + 1):
        row = [0] * (n + 1)
        falling = 1  # (n-1)(n-2)...(n-j+1)
        for j in range(1, n + 1):
            if j > 1:
                falling *= n - j + 1
            if j <= b:
                continue
            for k, c in enumerate(a[n - j]):
                if c:
                    row[k + 1] += falling * c
        a.append(row)
    total = math.factorial(d)
    return [Fraction(c, total) for c in a[d]]


def pr_permut_recursion(d: int, b: int, u: float) -> complex:
    """Same quantity as :func:`restricted_cycle_charfn`, by the sieve recursion

        Phi_{d,b} = sum_{k=0}^{d//b} (-e^{iu}/b)^k / k! * Phi_{d-kb, b-1},

    started from Phi_{n,0} = E(e^{iu cycles(sigma_n)}).
    """
    if b < 1:
        raise InvalidArgument(f"need b >= 1, got {b}")
    _check_restricted(d, b, MAX_RECURSION_DEGREE)
    return complex(_recursion_table(d, b, u)[d])


def _recursion_table(d, b, u):
    w = cmath.exp(1j * u)
    prev = _cycle_charfn_table(d, w)
    for level in range(1, b + 1):
        cur = prev.copy()  # k = 0 term
        coef = 1.0 + 0j
        for k in range(1, d // level + 1):
            coef *= -w / (level * k)
            shift = k * level
            cur[shift:] += coef * prev[: d + 1 - shift]
        prev = cur
    return prev


def min_cycle_gt_b_prob(d: int, b: int) -> Fraction:
    """Exact P(min_length(sigma_d) > b), from the u = 0 recurrence."""
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    _check_restricted(d, b, MAX_RATIONAL_SIEVE_DEGREE)
    g = [Fraction(1)]
    prefix = [Fraction(1)]
    for n in range(1, d + 1):
        m = n - b - 1
        g.append(prefix[m] / n if m >= 0 else Fraction(0))
        prefix.append(prefix[-1] + g[-1])
    return g[d]


def subsets_count_S(k: int, b: int, d: int) -> int:
    """Number of sets of k pairwise disjoint b-cycles in S_d: d!/((d-kb)! b^k k!)."""
    if k < 0 or b < 1 or d < 1:
        raise InvalidArgument(f"need k >= 0, b >= 1, d >= 1; got k={k}, b={b}, d={d}")
    if k * b > d:
        raise InvalidArgument(f"k*b = {k * b} exceeds d = {d}")
    num = math.factorial(d)
    den = math.factorial(d - k * b) * b ** k * math.factorial(k)
    q, r = divmod(num, den)
    assert r == 0
    return q


def restricted_modpoisson_check(d: int, b: int, u: float) -> complex:
    """exp((log d - H_b)(1 - e^{iu})) E(e^{iu cycles} | min_length > b).

    The conditional characteristic function of the cycle count on
    permutations without cycles of length <= b, renormalized by the Poisson
    parameter log d - H_b. Close to 1/Gamma(e^{iu}) when b is small
    compared with sqrt(d).
    """
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    w = cmath.exp(1j * u)
    cond = restricted_cycle_charfn(d, b, u) / float(min_cycle_gt_b_prob(d, b))
    return cmath.exp((math.log(d) - harmonic(b)) * (1.0 - w)) * cond


# ---------------------------------------------------------------------------
# sampling via the Feller coupling
# ---------------------------------------------------------------------------

DEFAULT_SEED = 20100101


def sample_cycle_count(d: int, seed: int = DEFAULT_SEED,
                       n_samples: int = 100_000) -> DiscreteDistribution:
    """Empirical law of 1 + sum_{k=1}^{d-1} Bernoulli(1/(k+1)).

    This sum has the law of the cycle count of a uniform permutation of S_d.
    Deterministic given ``seed``; each call owns its generator.
    """
    if d < 1 or n_samples < 1:
        raise InvalidArgument("need d >= 1 and n_samples >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    probs = 1.0 / np.arange(2, d + 1)
    counts = np.zeros(d + 1, dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, d))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        draws = 1 + (rng.random((m, d - 1)) < probs).sum(axis=1)
        counts += np.bincount(draws, minlength=d + 1)
        done += m
    return DiscreteDistribution.from_floats(counts[1:] / n_samples, offset=1)


def sample_mean(dist: DiscreteDistribution) -> float:
    return dist.mean()


def expected_cycles(d: int) -> Fraction:
    """E(cycles(sigma_d)) = H_d."""
    return harmonic_exact(d)
