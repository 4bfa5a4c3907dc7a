import cmath
import math

import pytest

# Bernoulli numbers B_2, B_4, ..., B_16
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def rgamma_stirling(z: complex) -> complex:
    """1/Gamma(z) from the Stirling series after shifting Re(z) past 20.

    Independent of the Lanczos coefficients used by the library.
    """
    z = complex(z)
    prod = 1.0 + 0j
    while z.real < 20.0:
        prod *= z
        z += 1.0
    log_gamma = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2 * math.pi)
    for k, b in enumerate(_B2K, start=1):
        log_gamma += b / (2 * k * (2 * k - 1) * z ** (2 * k - 1))
    return prod * cmath.exp(-log_gamma)


@pytest.fixture(scope="session")
def table2():
    from modpoisson.ffpoly import irreducible_counts

    return irreducible_counts(2, 400)


def cycle_lengths(perm):
    """Cycle lengths of a permutation given as a tuple of images of 0..d-1."""
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        n, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            n += 1
        out.append(n)
    return out


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
