"""Fast invariant suite behind ``modpoisson selftest``."""

from __future__ import annotations

import math
import random

import mpmath
import numpy as np

from . import dist, ffpoly, intstat, perms, specfun


def _necklace():
    bad = [(q, d) for q in (2, 3, 4, 5, 7, 9)
           for d in range(1, 61) if not ffpoly.irreducible_counts(q, 60).necklace_ok(d)]
    return not bad, f"failures: {bad}"


def _omega_brute_force():
    bad = []
    for q, d_max in ((2, 8), (3, 5)):
        table = ffpoly.irreducible_counts(q, d_max)
        for d in range(1, d_max + 1):
            for v in ffpoly.VARIANTS.values():
                dp = list(ffpoly.factor_count_table(table, d, v))
                bf = ffpoly.brute_force_omega_distribution(q, d, v, return_counts=True)
                if dp != bf:
                    bad.append((q, d, v.name))
    return not bad, f"mismatches: {bad}"


def _cycle_type_total():
    bad = []
    for q in (2, 3, 5):
        table = ffpoly.irreducible_counts(q, 10)
        for d in range(1, 11):
            total = sum(ffpoly.cycle_type_poly_count(table, ct) for ct in perms.partitions(d))
            dp = sum(ffpoly.factor_count_table(table, d, ffpoly.DISTINCT_SQUAREFREE))
            if total != dp or total != ffpoly.squarefree_count(q, d):
                bad.append((q, d))
    return not bad, f"mismatches: {bad}"


def _mertens():
    worst = 0.0
    for q in (2, 3, 5):
        table = ffpoly.irreducible_counts(q, 30)
        for d in range(5, 31):
            worst = max(worst, ffpoly.mertens_product(table, d)[1] * q ** (d / 2))
    return worst <= 10, f"max residual q^(d/2) = {worst:.4g}"


def _gamma_q():
    excess = []
    for q in (2, 3, 4, 5):
        value, bound = ffpoly.gamma_q(ffpoly.irreducible_counts(q, 60), 60)
        excess.append(abs(value) - bound)
    worst = max(excess)
    return worst <= 1e-9, f"max(|value| - bound) = {worst:.3g}"


def _t_db_b0():
    table = ffpoly.irreducible_counts(2, 40)
    err = 0.0
    for d in (5, 20, 40):
        law = ffpoly.omega_distribution(table, d)
        for u in (0.3, 1.0, 2.5):
            err = max(err, abs(ffpoly.T_db(table, d, 0, u) - dist.charfn(law, u)))
    return err <= 1e-12, f"max diff {err:.3g}"


def _equidistribution():
    worst = 0.0
    for q in (2, 3, 5, 7):
        table = ffpoly.irreducible_counts(q, 10)
        for d in range(1, 11):
            for r in ffpoly.equidistribution_residual(table, d):
                if r.in_range:
                    worst = max(worst, r.residual / r.bound)
    return worst <= 3, f"max residual / (d q^(-l/2)) = {worst:.3g}"


def _stirling_vs_product():
    us = np.linspace(-math.pi, math.pi, 21)
    err = 0.0
    for d in (1, 7, 50, 200):
        law = perms.cycle_count_dist(d)
        for u in us:
            err = max(err, abs(dist.charfn(law, u) - perms.cycle_charfn_product(d, u)))
    return err <= 1e-10, f"max diff {err:.3g}"


def _restricted_recursion():
    err = 0.0
    for d in (9, 60, 200):
        for b in (1, 3, 8):
            for u in (0.0, 0.7, 2.0, math.pi):
                err = max(err, abs(perms.restricted_cycle_charfn(d, b, u)
                                   - perms.pr_permut_recursion(d, b, u)))
    return err <= 1e-9, f"max diff {err:.3g}"


def _reciprocal_gamma():
    rng = random.Random(7)
    err = 0.0
    for _ in range(200):
        z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        ref = complex(mpmath.rgamma(z))
        err = max(err, abs(specfun.reciprocal_gamma(z) - ref) / max(1.0, abs(ref)))
    return err <= 1e-12, f"max relative error {err:.3g}"


def _sieve():
    sieve = intstat.build_sieve(10 ** 5)
    rng = random.Random(11)
    bad = [n for n in (rng.randint(1, 10 ** 5) for _ in range(2000))
           if sieve[n] != intstat.omega_trial_division(n)]
    S10 = intstat.sign_sum(sieve, [10])[0][1]
    return not bad and S10 == -4, f"mismatches {bad[:5]}, S(10) = {S10}"


def _sampler(seed):
    sample = perms.sample_cycle_count(10, seed=seed, n_samples=200_000)
    tv = dist.total_variation(sample, perms.cycle_count_dist(10))
    return tv < 0.01, f"TV = {tv:.3g}"


def _ks_bound():
    pairs = [
        (dist.bernoulli_sum_dist([0.5]), dist.poisson_dist(0.5)),
        (perms.cycle_count_dist(30), dist.poisson_dist(specfun.harmonic(30))),
        (dist.prime_model(100)[0], dist.poisson_dist(dist.prime_model(100)[1])),
    ]
    gaps = [dist.ks_charfn_bound(a, b) - float(dist.ks_distance(a, b)) for a, b in pairs]
    return min(gaps) >= 0, f"min(bound - ks) = {min(gaps):.3g}"


def _phi_values():
    zero = abs(specfun.phi1(math.pi))
    conj = abs(specfun.phi_primes(1.1) - specfun.phi_primes(-1.1).conjugate())
    ok = zero < 1e-12 and conj < 1e-12 and abs(specfun.phi_primes(0.0) - 1) < 1e-12
    return ok, f"|phi1(pi)| = {zero:.3g}, conjugate asymmetry {conj:.3g}"


def run_selftest(seed: int = perms.DEFAULT_SEED) -> list:
    """[(name, passed, detail)] for each invariant, in a fixed order."""
    checks = [
        ("necklace identity", _necklace),
        ("factor-count DP equals brute force", _omega_brute_force),
        ("cycle-type counts sum to squarefree count", _cycle_type_total),
        ("Mertens residual <= 10 q^(-d/2)", _mertens),
        ("Mertens constant vanishes", _gamma_q),
        ("T(d, 0) equals charfn of omega", _t_db_b0),
        ("cycle-type equidistribution", _equidistribution),
        ("Stirling law vs product formula", _stirling_vs_product),
        ("restricted cycles: generating function vs recursion", _restricted_recursion),
        ("reciprocal gamma vs mpmath", _reciprocal_gamma),
        ("omega sieve vs trial division", _sieve),
        ("cycle sampler total variation", lambda: _sampler(seed)),
        ("charfn bound dominates KS distance", _ks_bound),
        ("limiting function values", _phi_values),
    ]
    out = []
    for name, fn in checks:
        ok, detail = fn()
        out.append((name, bool(ok), detail))
    return out
