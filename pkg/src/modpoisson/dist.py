"""Finite integer-supported laws, characteristic functions and distances.

A :class:`DiscreteDistribution` stores the probabilities of consecutive
integers starting at ``offset``. In exact mode the weights are ``Fraction``
objects summing to exactly one; in floating mode they are floats summing to
one within 1e-12.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from ._primes import primes_up_to
from .errors import InvalidArgument, TruncationNotReached
from .specfun import TruncationPolicy, poisson_charfn

# Sequential convolution stays rational up to this many factors.
MAX_EXACT_FACTORS = 64


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    offset: int
    weights: tuple
    exact: bool = False
    # probability mass dropped before renormalization (truncated laws)
    truncated_mass: float = 0.0
    # internal constructors that guarantee the invariants skip the checks
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.validate:
            return
        if len(self.weights) == 0:
            raise InvalidArgument("a distribution needs at least one weight")
        if self.exact:
            if not all(isinstance(x, (Fraction, int)) for x in self.weights):
                raise InvalidArgument("exact distributions need rational weights")
            if any(x < 0 for x in self.weights):
                raise InvalidArgument("weights must be nonnegative")
            if sum(self.weights) != 1:
                raise InvalidArgument("exact weights must sum to 1")
        else:
            arr = np.asarray(self.weights, dtype=float)
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise InvalidArgument("weights must be finite and nonnegative")
            if abs(math.fsum(arr) - 1.0) > 1e-12:
                raise InvalidArgument(f"weights sum to {math.fsum(arr)!r}, not 1")

    @classmethod
    def from_counts(cls, counts, offset=0):
        """Exact law proportional to a sequence of nonnegative integers."""
        counts = [int(c) for c in counts]
        total = sum(counts)
        if total <= 0:
            raise InvalidArgument("counts must have a positive total")
        if any(c < 0 for c in counts):
            raise InvalidArgument("counts must be nonnegative")
        weights = [Fraction(c, total) for c in counts]
        return cls(offset, tuple(weights), exact=True, validate=False)._trimmed()

    @classmethod
    def from_floats(cls, probs, offset=0, truncated_mass=0.0):
        arr = np.asarray(probs, dtype=float)
        arr = arr / math.fsum(arr)
        return cls(offset, tuple(arr.tolist()), exact=False,
                   truncated_mass=truncated_mass)._trimmed()

    @classmethod
    def point_mass(cls, k: int):
        return cls(int(k), (Fraction(1),), exact=True)

    def _trimmed(self):
        w = list(self.weights)
        lo, hi = 0, len(w)
        while hi - lo > 1 and w[lo] == 0:
            lo += 1
        while hi - lo > 1 and w[hi - 1] == 0:
            hi -= 1
        if (lo, hi) == (0, len(w)):
            return self
        return DiscreteDistribution(self.offset + lo, tuple(w[lo:hi]),
                                    self.exact, self.truncated_mass, validate=False)

    # -- views ----------------------------------------------------------------

    @property
    def support(self) -> range:
        return range(self.offset, self.offset + len(self.weights))

    @property
    def max_value(self) -> int:
        return self.offset + len(self.weights) - 1

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    def pmf(self, k: int):
        i = k - self.offset
        if 0 <= i < len(self.weights):
            return self.weights[i]
        return Fraction(0) if self.exact else 0.0

    def cdf_values(self, lo: int, hi: int):
        """CDF at every integer of [lo, hi] (exact if the law is exact)."""
        out = []
        acc = Fraction(0) if self.exact else 0.0
        for k in range(lo, hi + 1):
            acc += self.pmf(k)
            out.append(acc)
        if not self.exact:
            return np.array(out)
        return out

    def mean(self) -> float:
        ks = np.arange(self.offset, self.offset + len(self.weights))
        return float(np.dot(ks, self.probs))

    def variance(self) -> float:
        ks = np.arange(self.offset, self.offset + len(self.weights)) - self.mean()
        return float(np.dot(ks * ks, self.probs))

    def to_float(self) -> "DiscreteDistribution":
        if not self.exact:
            return self
        return DiscreteDistribution(self.offset, tuple(self.probs.tolist()), False)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return (f"DiscreteDistribution(offset={self.offset}, "
                f"n={len(self.weights)}, {mode})")


@dataclass(frozen=True)
class CharFnGrid:
    u_values: tuple
    samples: tuple
    lam: float = 0.0

    def __post_init__(self):
        if len(self.u_values) != len(self.samples):
            raise InvalidArgument("u_values and samples differ in length")
        if any(b <= a for a, b in zip(self.u_values, self.u_values[1:])):
            raise InvalidArgument("u_values must be strictly increasing")
        if self.lam < 0:
            raise InvalidArgument("lambda must be >= 0")
        for u, s in zip(self.u_values, self.samples):
            if u == 0 and abs(s - 1) > 1e-12:
                raise InvalidArgument(f"sample at u=0 is {s}, not 1")


@dataclass(frozen=True)
class ModGaussianScaling:
    beta: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidArgument("gamma must be >= 0")


# ---------------------------------------------------------------------------
# characteristic functions
# ---------------------------------------------------------------------------

def charfn(dist: DiscreteDistribution, u: float) -> complex:
    """E(e^{iuZ}) = sum_k P(k) e^{iuk}."""
    ks = np.arange(len(dist.weights))
    phases = np.exp(1j * u * ks)
    return complex(np.dot(dist.probs, phases)) * cmath.exp(1j * u * dist.offset)


def charfn_many(dist: DiscreteDistribution, us) -> np.ndarray:
    us = np.asarray(us, dtype=float)
    ks = np.arange(len(dist.weights))
    out = np.empty(len(us), dtype=complex)
    # chunked to keep the phase matrix small
    step = max(1, 2_000_000 // max(1, len(ks)))
    for i in range(0, len(us), step):
        block = us[i : i + step]
        out[i : i + step] = np.exp(1j * np.outer(block, ks)) @ dist.probs
    return out * np.exp(1j * us * dist.offset)


def charfn_grid(dist: DiscreteDistribution, u_values, lam: float) -> CharFnGrid:
    u_values = tuple(float(u) for u in u_values)
    return CharFnGrid(u_values, tuple(complex(s) for s in charfn_many(dist, u_values)), lam)


def modpoisson_scale(grid: CharFnGrid) -> CharFnGrid:
    """Multiply each sample by exp(lambda (1 - e^{iu}))."""
    scaled = tuple(s / poisson_charfn(grid.lam, u) if grid.lam else s
                   for u, s in zip(grid.u_values, grid.samples))
    return CharFnGrid(grid.u_values, scaled, grid.lam)


# ---------------------------------------------------------------------------
# named laws
# ---------------------------------------------------------------------------

def poisson_dist(lam: float, cutoff_mass: float = 1e-12) -> DiscreteDistribution:
    """Poisson(lam) truncated to a window losing at most ``cutoff_mass``."""
    if lam < 0:
        raise InvalidArgument(f"lambda must be >= 0, got {lam}")
    if not (0 < cutoff_mass <= 1e-6):
        raise InvalidArgument(f"cutoff_mass must lie in (0, 1e-6], got {cutoff_mass}")
    if lam == 0:
        return DiscreteDistribution.point_mass(0)
    law = stats.poisson(lam)
    lo = int(law.ppf(cutoff_mass / 2))
    hi = int(law.isf(cutoff_mass / 2))
    # ppf/isf land on the quantiles; widen by one for safety
    lo = max(0, lo - 1)
    hi = hi + 1
    ks = np.arange(lo, hi + 1)
    pmf = law.pmf(ks)
    kept = math.fsum(pmf)
    return DiscreteDistribution(lo, tuple((pmf / kept).tolist()), False,
                                truncated_mass=max(0.0, 1.0 - kept))


def bernoulli_sum_dist(xs: Sequence) -> DiscreteDistribution:
    """Exact law of a sum of independent Bernoulli(x_n) variables.

    Rational arithmetic is used when there are at most 64 parameters and all
    of them are rationals (``Fraction`` or ``int``); otherwise the
    convolution runs in floating point.
    """
    xs = list(xs)
    for x in xs:
        if not (0 <= x <= 1):
            raise InvalidArgument(f"Bernoulli parameter {x} outside [0, 1]")
    exact = len(xs) <= MAX_EXACT_FACTORS and all(isinstance(x, (Fraction, int)) for x in xs)
    if exact:
        w = [Fraction(1)]
        for x in xs:
            x = Fraction(x)
            nxt = [Fraction(0)] * (len(w) + 1)
            for k, p in enumerate(w):
                nxt[k] += p * (1 - x)
                nxt[k + 1] += p * x
            w = nxt
        return DiscreteDistribution(0, tuple(w), exact=True)._trimmed()
    w = np.zeros(len(xs) + 1)
    w[0] = 1.0
    for n, x in enumerate(xs, start=1):
        x = float(x)
        w[1 : n + 1] = w[1 : n + 1] * (1.0 - x) + w[0:n] * x
        w[0] *= 1.0 - x
    return DiscreteDistribution.from_floats(w)


def bernoulli_model_limit(u: float, xs: Sequence,
                          policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """Partial product of (1 + x(e^{iu} - 1)) exp(x(1 - e^{iu})) over xs.

    Terms are multiplied in order until the bound 2 * sum x^2 over the
    terms not yet used drops to ``policy.tolerance``. Raises
    :class:`TruncationNotReached` if that needs more than ``max_terms`` terms.
    """
    xs = [float(x) for x in xs]
    w = cmath.exp(1j * u)
    # suffix[n] = 2 * sum_{m >= n} x_m^2
    sq = np.array(xs) ** 2 if xs else np.zeros(0)
    suffix = 2.0 * np.concatenate([np.cumsum(sq[::-1])[::-1], [0.0]])
    n_used = int(np.argmax(suffix <= policy.tolerance))
    if n_used > policy.max_terms:
        raise TruncationNotReached(
            f"{n_used} terms needed for tolerance {policy.tolerance}, "
            f"max_terms={policy.max_terms}")
    acc = 1.0 + 0j
    log_acc = 0j
    for x in xs[:n_used]:
        f = 1.0 + x * (w - 1.0)
        if f == 0:
            return 0j
        acc *= f
        log_acc += x * (1.0 - w)
        # renormalize the modulus now and then to avoid underflow
        if abs(acc) < 1e-200:
            log_acc += cmath.log(acc)
            acc = 1.0 + 0j
    return acc * cmath.exp(log_acc)


def prime_model(y: int):
    """Independent model sum_{p <= y} Bernoulli(1/p) and its parameter.

    Returns ``(dist, lambda_y)`` with lambda_y = sum_{p <= y} -log(1 - 1/p).
    """
    if y < 2:
        raise InvalidArgument(f"y must be >= 2, got {y}")
    ps = [int(p) for p in primes_up_to(y)]
    xs = [Fraction(1, p) for p in ps] if len(ps) <= MAX_EXACT_FACTORS else [1.0 / p for p in ps]
    lam = math.fsum(-math.log1p(-1.0 / p) for p in ps)
    return bernoulli_sum_dist(xs), lam


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def ks_distance(a: DiscreteDistribution, b: DiscreteDistribution):
    """sup_x |F_a(x) - F_b(x)| over the integers (one merged sweep).

    Exact (a ``Fraction``) when both laws are exact, else a float.
    """
    lo = min(a.offset, b.offset)
    hi = max(a.max_value, b.max_value)
    if a.exact and b.exact:
        best = Fraction(0)
        fa = fb = Fraction(0)
        for k in range(lo, hi + 1):
            fa += a.pmf(k)
            fb += b.pmf(k)
            best = max(best, abs(fa - fb))
        return best
    pa = np.zeros(hi - lo + 1)
    pb = np.zeros(hi - lo + 1)
    pa[a.offset - lo : a.offset - lo + len(a.weights)] = a.probs
    pb[b.offset - lo : b.offset - lo + len(b.weights)] = b.probs
    return float(np.max(np.abs(np.cumsum(pa) - np.cumsum(pb))))


def total_variation(a: DiscreteDistribution, b: DiscreteDistribution) -> float:
    lo = min(a.offset, b.offset)
    hi = max(a.max_value, b.max_value)
    return 0.5 * math.fsum(abs(float(a.pmf(k)) - float(b.pmf(k))) for k in range(lo, hi + 1))


def ks_charfn_bound(a: DiscreteDistribution, b: DiscreteDistribution,
                    quad_points: int = 256) -> float:
    """(1/4) * integral over [-pi, pi] of |phi_a(u) - phi_b(u)| / |u|.

    The integrand is even, so this is half the integral over (0, pi),
    computed with composite Gauss-Legendre (16 nodes per panel). Nodes never
    touch u = 0, where the integrand tends to |E(a) - E(b)|. At least
    ``quad_points`` nodes are used, and more when the supports are wide so
    that the oscillation of e^{iuk} is resolved.
    """
    if quad_points < 64:
        raise InvalidArgument(f"quad_points must be >= 64, got {quad_points}")
    span = max(a.max_value, b.max_value) - min(a.offset, b.offset) + 1
    n_nodes = max(int(quad_points), 8 * span)
    per_panel = 16
    panels = -(-n_nodes // per_panel)
    x, wts = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    us = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * wts[None, :]).ravel()
    diff = np.abs(charfn_many(a, us) - charfn_many(b, us)) / us
    return 0.5 * float(np.dot(ws, diff))


def normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def clt_normalized_ks(dist: DiscreteDistribution, lam: float) -> float:
    """sup_k |P(Z <= k) - Phi((k + 1/2 - lam)/sqrt(lam))| over the support."""
    if lam <= 0:
        raise InvalidArgument(f"lambda must be > 0, got {lam}")
    ks = np.arange(dist.offset, dist.max_value + 1)
    cdf = np.cumsum(dist.probs)
    ref = normal_cdf((ks + 0.5 - lam) / math.sqrt(lam))
    return float(np.max(np.abs(cdf - ref)))


def mod_gaussian_cube_transform(lam: float, t: float,
                                charfn_at: Callable[[float], complex]) -> complex:
    """exp(t^2 lam^{1/3}/2) exp(-i t lam^{2/3}) phi(t / lam^{1/3}).

    The renormalized characteristic function of (Z - lam)/lam^{1/3} under the
    mod-Gaussian scaling beta = 0, gamma = lam^{1/3}.
    """
    if lam <= 0:
        raise InvalidArgument(f"lambda must be > 0, got {lam}")
    scale = ModGaussianScaling(0.0, lam ** (1.0 / 3.0))
    s = t / scale.gamma
    centered = cmath.exp(-1j * t * lam ** (2.0 / 3.0)) * charfn_at(s)
    return cmath.exp(-1j * t * scale.beta + 0.5 * t * t * scale.gamma) * centered
