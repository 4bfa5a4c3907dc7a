import numpy as np


def primes_up_to(n):
    """Sorted array of the primes p <= n (sieve of Eratosthenes)."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, int(n ** 0.5) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)
