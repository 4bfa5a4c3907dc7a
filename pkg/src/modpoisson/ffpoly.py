"""Factorization statistics of monic polynomials over F_q.

Every quantity depends on the irreducible polynomials only through their
degrees, so products and sums over irreducibles are grouped by degree with
multiplicity Pi_q(j) (the number of monic irreducibles of degree j).
Counts are exact Python integers; probabilities are formed at the end.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .dist import DiscreteDistribution
from .errors import InvalidArgument, ResourceLimit, TruncationNotReached
from .perms import CycleType, conjugacy_class_prob, cycle_charfn_product, partitions
from .specfun import TruncationPolicy, harmonic, phi1

MAX_DP_DEGREE = 400
MAX_PARTITION_DEGREE = 30
MAX_BRUTE_FORCE = 10 ** 6


# ---------------------------------------------------------------------------
# Gauss-Dedekind counts
# ---------------------------------------------------------------------------

def prime_power_decomposition(q: int):
    """Return (p, k) with q = p^k and p prime, or raise InvalidArgument."""
    from sympy import isprime, perfect_power

    q = int(q)
    if q < 2:
        raise InvalidArgument(f"q = {q} is not a prime power")
    if isprime(q):
        return q, 1
    pp = perfect_power(q)
    if pp:
        base, exp = pp
        # perfect_power may return a composite base, e.g. 36 = 6^2
        if isprime(base):
            return int(base), int(exp)
    raise InvalidArgument(f"q = {q} is not a prime power")


def _factorize_small(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    f = _factorize_small(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(n: int) -> list:
    return [k for k in range(1, n + 1) if n % k == 0]


@dataclass(frozen=True)
class IrreducibleTable:
    """Pi_q(1..J): numbers of monic irreducible polynomials of each degree."""

    q: int
    J: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != self.J:
            raise InvalidArgument("need exactly J counts")

    def __getitem__(self, j: int) -> int:
        if not 1 <= j <= self.J:
            raise IndexError(f"degree {j} outside 1..{self.J}")
        return self.counts[j - 1]

    def necklace_ok(self, d: int) -> bool:
        return sum(k * self[k] for k in divisors(d)) == self.q ** d


@lru_cache(maxsize=64)
def irreducible_counts(q: int, J: int) -> IrreducibleTable:
    """Pi_q(d) = (1/d) sum_{delta | d} mu(delta) q^{d/delta} for d = 1..J."""
    prime_power_decomposition(q)
    if J < 1:
        raise InvalidArgument(f"J must be >= 1, got {J}")
    counts = []
    for d in range(1, J + 1):
        s = sum(mobius(k) * q ** (d // k) for k in divisors(d))
        n, r = divmod(s, d)
        assert r == 0, "Gauss-Dedekind sum not divisible by d"
        counts.append(n)
    return IrreducibleTable(q, J, tuple(counts))


# ---------------------------------------------------------------------------
# statistic variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorStatVariant:
    multiplicity: str = "distinct"      # "distinct" (omega) | "with-multiplicity" (Omega)
    restriction: str = "all"            # "all" | "squarefree"

    def __post_init__(self):
        if self.multiplicity not in ("distinct", "with-multiplicity"):
            raise InvalidArgument(f"unknown multiplicity {self.multiplicity!r}")
        if self.restriction not in ("all", "squarefree"):
            raise InvalidArgument(f"unknown restriction {self.restriction!r}")

    @property
    def kind(self) -> str:
        # On squarefree polynomials omega and Omega coincide.
        if self.restriction == "squarefree":
            return "squarefree"
        return "distinct" if self.multiplicity == "distinct" else "multiplicity"

    @property
    def name(self) -> str:
        m = "distinct" if self.multiplicity == "distinct" else "mult"
        return f"{m}-{self.restriction}"

    @classmethod
    def parse(cls, name: str) -> "FactorStatVariant":
        try:
            return VARIANTS[name]
        except KeyError:
            raise InvalidArgument(
                f"unknown variant {name!r}; expected one of {sorted(VARIANTS)}") from None


DISTINCT_ALL = FactorStatVariant("distinct", "all")
MULT_ALL = FactorStatVariant("with-multiplicity", "all")
DISTINCT_SQUAREFREE = FactorStatVariant("distinct", "squarefree")
MULT_SQUAREFREE = FactorStatVariant("with-multiplicity", "squarefree")
VARIANTS = {v.name: v for v in (DISTINCT_ALL, MULT_ALL, DISTINCT_SQUAREFREE, MULT_SQUAREFREE)}


# ---------------------------------------------------------------------------
# exact generating-function DP
# ---------------------------------------------------------------------------

def _check_degree(table: IrreducibleTable, d: int):
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    if d > table.J:
        raise InvalidArgument(f"d = {d} exceeds the table length J = {table.J}")
    if d > MAX_DP_DEGREE:
        raise ResourceLimit(f"d = {d} exceeds the DP bound {MAX_DP_DEGREE}")


def _bivariate_product(table, d, kind, min_degree=1):
    """Coefficients of prod_{min_degree <= j <= d} F_j(T, x)^{Pi_q(j)} up to T^d.

    ``kind`` selects F_j: "squarefree" is 1 + x T^j, "multiplicity" is
    1/(1 - x T^j). Returns an object array P[n, k] of Python ints.
    """
    P = np.zeros((d + 1, d + 1), dtype=object)
    P[0, 0] = 1
    kmax = 0  # largest k with a nonzero entry so far
    # Large degrees first keeps the populated k-range narrow.
    for j in range(d, min_degree - 1, -1):
        N = table[j]
        terms = d // j
        if kind == "squarefree":
            terms = min(terms, N)
            coef = [math.comb(N, m) for m in range(terms + 1)]
        elif N < terms:
            # N successive divisions by (1 - x T^j): row recurrence
            for _ in range(N):
                for n in range(j, d + 1):
                    P[n, 1:] += P[n - j, :-1]
            kmax = min(d, kmax + terms)
            continue
        else:
            coef = [math.comb(N + m - 1, m) for m in range(terms + 1)]
        if terms == 0:
            continue
        new = P.copy()
        for m in range(1, terms + 1):
            s = j * m
            width = min(kmax + 1, d + 1 - m)
            new[s:, m : m + width] += coef[m] * P[: d + 1 - s, :width]
        P = new
        kmax = min(d, kmax + terms)
    return P


def _series_mul(a, b, d):
    out = [0] * (d + 1)
    for i, x in enumerate(a[: d + 1]):
        if x:
            for k, y in enumerate(b[: d + 1 - i]):
                out[i + k] += x * y
    return out


def _all_poly_series(table, d, max_degree):
    """prod_{j > max_degree} (1 - T^j)^{-Pi_q(j)} up to T^d, exactly.

    Uses prod_{all j} (1 - T^j)^{-Pi_q(j)} = 1/(1 - qT).
    """
    series = [table.q ** n for n in range(d + 1)]
    for j in range(1, min(max_degree, d) + 1):
        N = table[j]
        factor = [0] * (d + 1)
        for m in range(0, min(N, d // j) + 1):
            factor[j * m] = (-1) ** m * math.comb(N, m)
        series = _series_mul(series, factor, d)
    return series


def _shift_basis(coeffs):
    """Rewrite sum_k a_k (x - 1)^k as sum_i b_i x^i."""
    n = len(coeffs)
    out = [0] * n
    for k, a in enumerate(coeffs):
        if a:
            for i in range(k + 1):
                out[i] += a * math.comb(k, i) * (-1) ** (k - i)
    return out


@lru_cache(maxsize=128)
def factor_count_table(table: IrreducibleTable, d: int, variant: FactorStatVariant,
                       min_degree: int = 1) -> tuple:
    """Exact counts [#{f : deg f = d, stat(f) = k} for k = 0..d].

    Only polynomials whose irreducible factors all have degree >= min_degree
    are counted; the statistic and population follow ``variant``.
    """
    _check_degree(table, d)
    kind = variant.kind
    if kind == "multiplicity":
        return tuple(int(c) for c in _bivariate_product(table, d, "multiplicity", min_degree)[d])
    sf = _bivariate_product(table, d, "squarefree", min_degree)
    if kind == "squarefree":
        return tuple(int(c) for c in sf[d])
    # 1 + x y/(1 - y) = (1 + (x - 1) y)/(1 - y), so in the variable v = x - 1
    # the product is the squarefree one times prod (1 - y)^{-Pi}.
    tail = _all_poly_series(table, d, min_degree - 1)
    in_v = [0] * (d + 1)
    for n in range(d + 1):
        c = tail[d - n]
        if c:
            row = sf[n]
            for k in range(n + 1):
                if row[k]:
                    in_v[k] += c * row[k]
    return tuple(_shift_basis(in_v))


def squarefree_count(q: int, d: int) -> int:
    """Number of squarefree monic polynomials of degree d over F_q."""
    return q ** d if d < 2 else q ** d - q ** (d - 1)


def omega_distribution(table: IrreducibleTable, d: int,
                       variant: FactorStatVariant = DISTINCT_ALL) -> DiscreteDistribution:
    """Exact law of omega(f) (or Omega(f)) for f uniform of degree d.

    For the squarefree restriction f is uniform among squarefree monic
    polynomials of degree d.
    """
    counts = factor_count_table(table, d, variant)
    total = sum(counts)
    expected = table.q ** d if variant.restriction == "all" else squarefree_count(table.q, d)
    assert total == expected, "factor-count DP lost polynomials"
    return DiscreteDistribution.from_counts(counts)


# ---------------------------------------------------------------------------
# brute-force oracle over a prime field
# ---------------------------------------------------------------------------

def _poly_divmod(f, g, p):
    # coefficient lists, lowest degree first; g monic
    f = list(f)
    dg = len(g) - 1
    quot = [0] * max(0, len(f) - dg)
    for i in range(len(f) - 1 - dg, -1, -1):
        c = f[i + dg] % p
        if c:
            quot[i] = c
            for k in range(dg + 1):
                f[i + k] = (f[i + k] - c * g[k]) % p
    rem = f[:dg]
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


def _monic_polys(p, n):
    for low in itertools.product(range(p), repeat=n):
        yield list(low) + [1]


def brute_force_irreducibles(p: int, max_degree: int) -> dict:
    """{degree: [monic irreducible polynomials]} by trial division."""
    irr = {}
    for n in range(1, max_degree + 1):
        found = []
        for f in _monic_polys(p, n):
            if not any(not _poly_divmod(f, g, p)[1]
                       for k in range(1, n // 2 + 1) for g in irr[k]):
                found.append(f)
        irr[n] = found
    return irr


def _factor_degrees(f, p, small_irreducibles):
    """List of (degree, multiplicity) of the irreducible factors of monic f."""
    out = []
    for k in sorted(small_irreducibles):
        for g in small_irreducibles[k]:
            if 2 * k > len(f) - 1:
                break
            mult = 0
            while True:
                q, r = _poly_divmod(f, g, p)
                if r:
                    break
                f, mult = q, mult + 1
            if mult:
                out.append((k, mult))
    if len(f) > 1:
        out.append((len(f) - 1, 1))
    return out


def brute_force_omega_distribution(q: int, d: int,
                                   variant: FactorStatVariant = DISTINCT_ALL,
                                   return_counts: bool = False):
    """Enumerate all q^d monic polynomials of degree d over F_q and factor each.

    Deliberately naive: trial division by the irreducibles of degree <= d/2.
    """
    from sympy import isprime

    if not isprime(q):
        raise InvalidArgument(f"brute force needs a prime q, got {q}")
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    if q ** d > MAX_BRUTE_FORCE:
        raise ResourceLimit(f"q^d = {q ** d} exceeds {MAX_BRUTE_FORCE}")
    small = brute_force_irreducibles(q, d // 2)
    counts = [0] * (d + 1)
    for f in _monic_polys(q, d):
        fac = _factor_degrees(f, q, small)
        squarefree = all(m == 1 for _, m in fac)
        if variant.restriction == "squarefree" and not squarefree:
            continue
        if variant.multiplicity == "distinct":
            counts[len(fac)] += 1
        else:
            counts[sum(m for _, m in fac)] += 1
    if return_counts:
        return counts
    return DiscreteDistribution.from_counts(counts)


# ---------------------------------------------------------------------------
# Frobenius cycle types and equidistribution
# ---------------------------------------------------------------------------

def cycle_type_poly_count(table: IrreducibleTable, ct: CycleType) -> int:
    """Number of squarefree monic f of degree d with r_j irreducible factors of degree j."""
    if ct.d > table.J:
        raise InvalidArgument(f"cycle type of S_{ct.d} exceeds table length {table.J}")
    out = 1
    for j, r in enumerate(ct.multiplicities, start=1):
        if r:
            out *= math.comb(table[j], r)
    return out


@dataclass(frozen=True)
class EquidistributionRow:
    cycle_type: CycleType
    count: int
    prob: Fraction
    residual: float
    bound: float        # d * q^{-min_length/2}
    in_range: bool      # q^{min_length/2} >= d


def equidistribution_residual(table: IrreducibleTable, d: int) -> list:
    """For every cycle type of S_d, |count/(q^d P(sigma_d in class)) - 1|."""
    if d < 1 or d > table.J:
        raise InvalidArgument(f"need 1 <= d <= J, got d={d}")
    if d > MAX_PARTITION_DEGREE:
        raise ResourceLimit(f"d = {d} exceeds {MAX_PARTITION_DEGREE}")
    q = table.q
    rows = []
    for ct in partitions(d):
        count = cycle_type_poly_count(table, ct)
        prob = conjugacy_class_prob(ct)
        residual = abs(Fraction(count) / (q ** d * prob) - 1)
        ell = ct.min_length
        rows.append(EquidistributionRow(
            ct, count, prob, float(residual), d * q ** (-ell / 2),
            q ** ell >= d * d))
    return rows


# ---------------------------------------------------------------------------
# Mertens product and gamma_q
# ---------------------------------------------------------------------------

_MP_DPS = 60


def mertens_product(table: IrreducibleTable, d: int):
    """prod_{deg pi <= d} (1 - 1/|pi|) and its residual |e^{H_d} product - 1|."""
    if d < 1 or d > table.J:
        raise InvalidArgument(f"need 1 <= d <= J, got d={d}")
    q = table.q
    with mpmath.workdps(_MP_DPS):
        log_prod = mpmath.fsum(table[j] * mpmath.log1p(-mpmath.mpf(q) ** (-j))
                               for j in range(1, d + 1))
        h = mpmath.fsum(mpmath.mpf(1) / j for j in range(1, d + 1))
        product = mpmath.exp(log_prod)
        residual = abs(mpmath.expm1(log_prod + h))
        return float(product), float(residual)


def _gamma_q_parts(table, J_used):
    # (A, B) with A = sum_{deg pi <= J} (log(1 - 1/|pi|) + 1/|pi|) and
    # B = sum_{j <= J} (Pi_q(j)/q^j - 1/j); B is summed exactly.
    if J_used < 1 or J_used > table.J:
        raise InvalidArgument(f"need 1 <= J_used <= J, got {J_used}")
    q = table.q
    with mpmath.workdps(_MP_DPS):
        A = mpmath.fsum(table[j] * (mpmath.log1p(-mpmath.mpf(q) ** (-j)) + mpmath.mpf(q) ** (-j))
                        for j in range(1, J_used + 1))
        B = sum(Fraction(table[j], q ** j) - Fraction(1, j) for j in range(1, J_used + 1))
        return A, mpmath.mpf(B.numerator) / B.denominator


def gamma_q(table: IrreducibleTable, J_used: int):
    """Truncation of the Mertens constant

        gamma_q = sum_pi (log(1 - 1/|pi|) + 1/|pi|) - sum_j (Pi_q(j)/q^j - 1/j),

    defined by prod_{deg pi <= d} (1 - 1/|pi|) = exp(gamma_q - H_d)(1 + o(1)).
    The limit theorem at u = 0 forces gamma_q = 0. Returns
    ``(value, tail_bound)`` with the degrees j > J_used bounded by
    4 q^{-J_used/2}.
    """
    A, B = _gamma_q_parts(table, J_used)
    with mpmath.workdps(_MP_DPS):
        value = float(A - B)
    return value, 4.0 * table.q ** (-J_used / 2)


def gamma_q_plus_variant(table: IrreducibleTable, J_used: int) -> float:
    """The same two series added instead of subtracted.

    Equals 2 sum_j (Pi_q(j)/q^j - 1/j) in the limit, which is not zero
    (about -0.9045 for q = 2); kept to document the sign.
    """
    A, B = _gamma_q_parts(table, J_used)
    with mpmath.workdps(_MP_DPS):
        return float(A + B)


# ---------------------------------------------------------------------------
# Euler factor of the limit
# ---------------------------------------------------------------------------

def _log_series_coef(kind, w, k):
    # coefficient of x^k/k in log of the Euler factor at x = |pi|^{-1}
    if kind == "distinct":
        return (1.0 - w) - (1.0 - w) ** k
    if kind == "squarefree":
        return -w - (-w) ** k
    return -w + w ** k


def _coef_bound(kind, k):
    return 2.0 + 2.0 ** k if kind == "distinct" else 2.0


def _euler_log_small(kind, w, x):
    # log of the factor for small x, as the power series in x (k >= 2)
    total = 0j
    k = 2
    xk = x * x
    while True:
        term = _log_series_coef(kind, w, k) / k * xk
        total += term
        if _coef_bound(kind, k) * xk / k < 1e-18 * max(x * x, 1e-300) or k > 400:
            return total
        k += 1
        xk *= x


def _euler_factor_direct(kind, w, x):
    base = cmath.exp(w * math.log1p(-x))
    if kind == "distinct":
        return base * (1.0 + w * x / (1.0 - x))
    if kind == "squarefree":
        return base * (1.0 + w * x)
    return base / (1.0 - w * x)


def _tail_bound(kind, q, J):
    # sum_{j > J} Pi_q(j) sum_{k >= 2} |c_k|/k x_j^k, with Pi_q(j) x_j <= 1/j
    x = float(q) ** (-(J + 1))
    if _coef_bound(kind, 2) * x >= 1 or 2 * x >= 1:
        return math.inf
    shape = 0.0
    k = 2
    while True:
        term = _coef_bound(kind, k) / k * x ** (k - 2)
        shape += term
        if term < 1e-20 or k > 400:
            break
        k += 1
    return shape * x / ((J + 1) * (1.0 - 1.0 / q))


def euler_factor_ff(table: IrreducibleTable, u: float,
                    policy: TruncationPolicy = TruncationPolicy(),
                    variant: FactorStatVariant = DISTINCT_ALL) -> complex:
    """Arithmetic part of the limit, grouped by degree.

    distinct/all:  prod_pi (1 - 1/|pi|)^w (1 + w/(|pi| - 1))
    squarefree:    prod_pi (1 - 1/|pi|)^w (1 + w/|pi|)
    mult/all:      prod_pi (1 - 1/|pi|)^w / (1 - w/|pi|)

    with w = e^{iu}. Degrees up to the first J whose tail bound is below
    ``policy.tolerance`` are used; that J must be within both the table and
    ``policy.max_terms``.
    """
    kind = variant.kind
    q = table.q
    J = 1
    while _tail_bound(kind, q, J) > policy.tolerance:
        J += 1
        if J > table.J or J > policy.max_terms:
            raise TruncationNotReached(
                f"degree {J} needed for tolerance {policy.tolerance}; "
                f"table has J={table.J}, max_terms={policy.max_terms}")
    w = cmath.exp(1j * u)
    log_total = 0j
    for j in range(1, J + 1):
        x = float(q) ** (-j)
        if x > 0.25:
            f = _euler_factor_direct(kind, w, x)
            if f == 0:
                return 0j
            log_total += table[j] * cmath.log(f)
        else:
            log_total += table[j] * _euler_log_small(kind, w, x)
    return cmath.exp(log_total)


def phi2_ff(table: IrreducibleTable, u: float,
            policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """prod_pi (1 - 1/|pi|)^{e^{iu}} (1 + e^{iu}/(|pi| - 1)) over monic irreducibles."""
    return euler_factor_ff(table, u, policy, DISTINCT_ALL)


def thmain_limit(table: IrreducibleTable, u: float,
                 variant: FactorStatVariant = DISTINCT_ALL,
                 policy: TruncationPolicy = TruncationPolicy()) -> complex:
    """Limit of :func:`thmain_scaled_charfn` as d grows.

    For the squarefree variant the population is normalized by the number of
    squarefree polynomials, which divides the limit by 1 - 1/q.
    """
    value = phi1(u) * euler_factor_ff(table, u, policy, variant)
    if variant.restriction == "squarefree":
        value /= 1.0 - 1.0 / table.q
    return value


# ---------------------------------------------------------------------------
# the renormalized characteristic function and its pieces
# ---------------------------------------------------------------------------

def _charfn_from_counts(counts, total, w, shift=0):
    """sum_k counts[k] w^{k - shift} / total with a single final rounding.

    The terms cancel heavily when w is near -1 (at u = pi the result can be
    far below machine epsilon), so the polynomial is evaluated exactly: the
    float coordinates of w are dyadic rationals, w = (A + iB)/s, and Horner's
    rule runs on the integer coefficients counts[k] s^{n-k}.
    """
    counts = list(counts)
    while counts and counts[-1] == 0:
        counts.pop()
    if not counts:
        return 0j
    a, b = Fraction(w.real), Fraction(w.imag)
    s = max(a.denominator, b.denominator)
    A, B = int(a * s), int(b * s)
    n = len(counts) - 1
    X = Y = 0
    for k in range(n, -1, -1):
        X, Y = X * A - Y * B + counts[k] * s ** (n - k), X * B + Y * A
    den = s ** n * total
    value = complex(float(Fraction(X, den)), float(Fraction(Y, den)))
    return value * w ** (-shift) if shift else value


def thmain_scaled_charfn(table: IrreducibleTable, d: int, u: float,
                         variant: FactorStatVariant = DISTINCT_ALL) -> complex:
    """exp((1 - e^{iu}) log d) E(e^{iu(omega(f) - 1)}), f uniform of degree d."""
    counts = factor_count_table(table, d, variant)
    w = cmath.exp(1j * u)
    return cmath.exp((1.0 - w) * math.log(d)) * _charfn_from_counts(counts, sum(counts), w, 1)


def pole_order_scaled_charfn(table: IrreducibleTable, d: int, u: float) -> complex:
    """Renormalized characteristic function of ord_{T=1} Z(X_f) = -omega(f).

    The zeta function of Spec F_q[X]/(f) has a pole of order omega(f) at
    T = 1. This returns exp((1 - e^{-iu}) log d) E(e^{-iu omega(f)}), which is
    e^{-iu} thmain_scaled_charfn(-u) and tends to e^{-iu} phi1(-u) phi2_ff(-u).
    """
    counts = factor_count_table(table, d, DISTINCT_ALL)
    w = cmath.exp(-1j * u)
    return cmath.exp((1.0 - w) * math.log(d)) * _charfn_from_counts(counts, sum(counts), w)


@dataclass(frozen=True)
class SmoothnessSplit:
    """Degree threshold b: f = g h with irreducible factors of g of degree <= b
    and those of h of degree > b."""

    b: int

    def __post_init__(self):
        if self.b < 0:
            raise InvalidArgument(f"b must be >= 0, got {self.b}")

    @classmethod
    def default(cls, d: int) -> "SmoothnessSplit":
        return cls(default_split_degree(d))


def default_split_degree(d: int) -> int:
    """b = (log d)^2, rounded down and clipped to [1, d]."""
    return max(1, min(d, int(math.log(d) ** 2)))


def T_db(table: IrreducibleTable, d: int, b: int, u: float) -> complex:
    """q^{-d} sum over f of degree d with no irreducible factor of degree <= b of e^{iu omega(f)}."""
    if b < 0 or b > d:
        raise InvalidArgument(f"need 0 <= b <= d, got b={b}, d={d}")
    counts = factor_count_table(table, d, DISTINCT_ALL, min_degree=b + 1)
    return _charfn_from_counts(counts, table.q ** d, cmath.exp(1j * u))


def td_permutation_model(d: int, b: int, u: float) -> complex:
    """exp(-e^{iu} H_b) E(e^{iu cycles(sigma_d)}), the permutation approximation of T_db."""
    w = cmath.exp(1j * u)
    return cmath.exp(-w * harmonic(b)) * cycle_charfn_product(d, u)


def td_error_shape(q: int, d: int, b: int) -> float:
    """b^2/d + d q^{-b/2} + b^3 sqrt(log d)/d^2."""
    return b * b / d + d * q ** (-b / 2) + b ** 3 * math.sqrt(math.log(d)) / d ** 2


# ---------------------------------------------------------------------------
# smooth polynomials: Rankin tail and the squarefree partial sum
# ---------------------------------------------------------------------------

def _smooth_series(table, d, b, squarefree):
    # number of (squarefree) monic polynomials of each degree <= d whose
    # irreducible factors all have degree <= b
    series = [1] + [0] * d
    for j in range(1, min(b, d) + 1):
        N = table[j]
        factor = [0] * (d + 1)
        for m in range(0, d // j + 1):
            factor[j * m] = math.comb(N, m) if squarefree else math.comb(N + m - 1, m)
        series = _series_mul(series, factor, d)
    return series


def smooth_tail_R(table: IrreducibleTable, d: int, b: int):
    """R(d, b) = sum over b-smooth monic g with deg g > d of q^{-deg g}.

    The full sum over b-smooth g is the finite product
    prod_{j <= b} (1 - q^{-j})^{-Pi_q(j)}, so R(d, b) is that product minus
    the exact partial sum up to degree d. Returns ``(value, rankin_bound)``
    where the Rankin bound uses sigma = 1/(b log q).
    """
    if b < 1 or b >= d:
        raise InvalidArgument(
            f"need 1 <= b < d, got b={b}, d={d} (b = d gives no restriction on factors)")
    if b > table.J:
        raise InvalidArgument(f"b = {b} exceeds table length {table.J}")
    if d > 10 * MAX_DP_DEGREE:
        raise ResourceLimit(f"d = {d} exceeds {10 * MAX_DP_DEGREE}")
    q = table.q
    full = Fraction(1)
    for j in range(1, b + 1):
        full *= Fraction(q ** j, q ** j - 1) ** table[j]
    series = _smooth_series(table, d, b, squarefree=False)
    partial = sum(Fraction(a, q ** m) for m, a in enumerate(series))
    value = full - partial
    sigma = 1.0 / (b * math.log(q))
    with mpmath.workdps(30):
        log_bound = -sigma * d * mpmath.log(q)
        for j in range(1, b + 1):
            log_bound -= table[j] * mpmath.log1p(-mpmath.mpf(q) ** (j * (sigma - 1)))
        rankin = float(mpmath.exp(log_bound))
    return float(value), rankin


def smooth_partial_S(table: IrreducibleTable, d: int, b: int) -> Fraction:
    """S(d, b): sum over squarefree b-smooth monic g with deg g <= d of q^{-deg g}."""
    if b < 0 or b > d:
        raise InvalidArgument(f"need 0 <= b <= d, got b={b}, d={d}")
    if b > table.J:
        raise InvalidArgument(f"b = {b} exceeds table length {table.J}")
    series = _smooth_series(table, d, b, squarefree=True)
    return sum(Fraction(a, table.q ** m) for m, a in enumerate(series))


def upper_mertens_product(table: IrreducibleTable, b: int) -> Fraction:
    """prod_{deg pi <= b} (1 + 1/(|pi| - 1)), an upper bound for S(d, b)."""
    out = Fraction(1)
    for j in range(1, b + 1):
        out *= Fraction(table.q ** j, table.q ** j - 1) ** table[j]
    return out
