"""Integer-side statistics of omega(n), the number of distinct prime factors."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._primes import primes_up_to
from .dist import DiscreteDistribution
from .errors import InvalidArgument, ResourceLimit

MAX_SIEVE = 10 ** 8

__all__ = [
    "OmegaSieve", "build_sieve", "erdos_kac_scaled_charfn", "sign_sum",
    "omega_empirical_dist", "omega_trial_division", "primes_up_to",
]


@dataclass(frozen=True, eq=False)
class OmegaSieve:
    """omega(n) for 0 <= n <= N (index 0 unused, omega(1) = 0), one byte each."""

    N: int
    omega: np.ndarray
    primes: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise IndexError(f"n = {n} outside 1..{self.N}")
        return int(self.omega[n])

    def _upto(self, N):
        if N is None:
            return self.N
        N = int(N)
        if N > self.N:
            raise InvalidArgument(f"N = {N} exceeds the sieve length {self.N}")
        return N

    def counts(self, N=None) -> np.ndarray:
        """counts[k] = #{2 <= n <= N : omega(n) = k}."""
        N = self._upto(N)
        return np.bincount(self.omega[2 : N + 1])


def build_sieve(N: int) -> OmegaSieve:
    """Additive sieve: add one to omega(m) for every prime p dividing m."""
    N = int(N)
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if N > MAX_SIEVE:
        raise ResourceLimit(f"N = {N} exceeds {MAX_SIEVE}")
    primes = primes_up_to(N)
    omega = np.zeros(N + 1, dtype=np.uint8)
    for p in primes:
        omega[p::p] += 1
    omega.flags.writeable = False
    primes.flags.writeable = False
    return OmegaSieve(N, omega, primes)


def omega_trial_division(n: int) -> int:
    """omega(n) by trial division, as an independent check of the sieve."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    count = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            count += 1
            while n % p == 0:
                n //= p
        p += 1
    return count + (n > 1)


def erdos_kac_scaled_charfn(sieve: OmegaSieve, u: float, N: int | None = None) -> complex:
    """(log N)^{1 - e^{iu}} / N * sum_{2 <= n <= N} e^{iu (omega(n) - 1)}.

    ``N`` defaults to the sieve length; a smaller N reuses the same sieve.
    """
    N = sieve._upto(N)
    if N < 3:
        raise InvalidArgument(f"N must be >= 3, got {N}")
    counts = sieve.counts(N)
    w = cmath.exp(1j * u)
    k = np.arange(len(counts))
    total = complex(np.sum(counts * np.exp(1j * u * (k - 1))))
    return cmath.exp((1.0 - w) * math.log(math.log(N))) * total / N


def sign_sum(sieve: OmegaSieve, N_values) -> list:
    """[(N, S(N), |S(N)| (log N)^2 / N)] with S(N) = sum_{n <= N} (-1)^omega(n)."""
    N_values = [int(N) for N in N_values]
    for N in N_values:
        if N < 1:
            raise InvalidArgument(f"N must be >= 1, got {N}")
        sieve._upto(N)
    top = max(N_values, default=0)
    signs = 1 - 2 * (sieve.omega[1 : top + 1].astype(np.int64) & 1)
    prefix = np.cumsum(signs)
    out = []
    for N in N_values:
        S = int(prefix[N - 1])
        out.append((N, S, abs(S) * math.log(N) ** 2 / N))
    return out


def omega_empirical_dist(sieve: OmegaSieve, N: int | None = None):
    """Exact empirical law of omega(n) - 1 over 2 <= n <= N, with lambda = log log N."""
    N = sieve._upto(N)
    if N < 3:
        raise InvalidArgument(f"N must be >= 3, got {N}")
    counts = sieve.counts(N)
    # omega(n) >= 1 for n >= 2, so the shift to omega - 1 drops index 0
    return DiscreteDistribution.from_counts([int(c) for c in counts[1:]]), math.log(math.log(N))
