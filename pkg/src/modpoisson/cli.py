"""Command-line experiment runner.

Every command emits a table (CSV with a header row, or JSON
``{"schema_version": 1, "config": ..., "rows": [...]}``) and exits 0 only if
its checks pass. Failed checks are reported as JSON on stderr and give exit
status 1; usage errors give exit status 2 and never create the output file.

    modpoisson irr-count --q 2 --J 6
    modpoisson thmain --q 2 --d 100,200,400 --u-range 0.5 2 4 --format json
    MODPOISSON_THREADS=4 modpoisson erdos-kac --N 100000,1000000 --u 1
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import dist, ffpoly, intstat, perms, specfun
from .errors import ModPoissonError

SCHEMA_VERSION = 1
DEFAULT_SEED = perms.DEFAULT_SEED
DEFAULT_TOLERANCE = 1e-9
THREADS_ENV = "MODPOISSON_THREADS"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    command: str
    q: int | None = None
    d: list | None = None
    b: int | None = None
    N: list | None = None
    y: list | None = None
    J: int | None = None
    u_grid: list | None = None
    variant: str = "distinct-all"
    model: str | None = None
    xs: list | None = None
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE
    format: str = "csv"
    out: str | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "out"}


@dataclass
class Result:
    columns: list
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def check(self, ok, name, **detail):
        if not ok:
            self.failures.append({"check": name, **detail})


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _int_list(text):
    try:
        values = [int(float(x)) if "e" in x.lower() else int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text):
    try:
        values = [float(eval_float(x)) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def eval_float(text: str) -> float:
    """Parse a real, accepting ``pi`` and simple multiples such as ``pi/2`` or ``2pi``."""
    t = text.strip().lower()
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("pi", "").replace("*", "").strip()
    value = (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
    return value / float(den) if den else value


def u_grid_from_range(lo, hi, count):
    if count < 1:
        raise ConfigError("u_grid", f"count must be >= 1, got {count}")
    if count == 1:
        return [float(lo)]
    if not lo < hi:
        raise ConfigError("u_grid", f"need min < max, got {lo} >= {hi}")
    return [float(x) for x in np.linspace(lo, hi, count)]


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"expected an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(THREADS_ENV, f"must be >= 1, got {n}")
    return n


def _pmap(fn, items):
    # results come back in input order, so output never depends on scheduling
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _require(config, *names):
    for name in names:
        if getattr(config, name) is None:
            raise ConfigError(name, f"--{name.replace('_', '-')} is required for {config.command}")


def _positive(name, values, minimum=1):
    for v in values if isinstance(values, list) else [values]:
        if v < minimum:
            raise ConfigError(name, f"must be >= {minimum}, got {v}")


def _single(config, name):
    values = getattr(config, name)
    if len(values) != 1:
        raise ConfigError(name, f"{config.command} takes a single value")
    return values[0]


def _table(config, J):
    try:
        return ffpoly.irreducible_counts(config.q, J)
    except ModPoissonError as exc:
        raise ConfigError("q", str(exc)) from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_irr_count(config):
    _require(config, "q", "J")
    _positive("J", config.J)
    table = _table(config, config.J)
    res = Result(["d", "Pi_q_d"])
    for d in range(1, config.J + 1):
        res.rows.append([d, table[d]])
        res.check(table.necklace_ok(d), "necklace identity", d=d)
    return res


def cmd_omega_dist(config):
    _require(config, "q", "d")
    d = _single(config, "d")
    _positive("d", d)
    variant = _variant(config)
    table = _table(config, d)
    counts = ffpoly.factor_count_table(table, d, variant)
    total = sum(counts)
    res = Result(["k", "count", "prob"])
    for k, c in enumerate(counts):
        if c:
            res.rows.append([k, c, float(Fraction(c, total))])
    expected = config.q ** d if variant.restriction == "all" else ffpoly.squarefree_count(config.q, d)
    res.check(total == expected, "total count", total=total, expected=expected)
    return res


def _variant(config):
    try:
        return ffpoly.FactorStatVariant.parse(config.variant)
    except ModPoissonError as exc:
        raise ConfigError("variant", str(exc)) from None


def cmd_perm_dist(config):
    _require(config, "d")
    d = _single(config, "d")
    _positive("d", d)
    row = perms.stirling_first_row(d)
    fact = math.factorial(d)
    res = Result(["k", "count", "prob"])
    for k, c in enumerate(row):
        if c:
            res.rows.append([k, int(c), float(Fraction(int(c), fact))])
    res.check(sum(int(c) for c in row) == fact, "Stirling row sums to d!")
    return res


def cmd_restricted_perm(config):
    _require(config, "d", "b", "u_grid")
    d = _single(config, "d")
    _positive("d", d, 0)
    _positive("b", config.b, 1)
    res = Result(["u", "egf_re", "egf_im", "recursion_re", "recursion_im", "abs_diff"])

    def point(u):
        a = perms.restricted_cycle_charfn(d, config.b, u)
        r = perms.pr_permut_recursion(d, config.b, u)
        return [u, a.real, a.imag, r.real, r.imag, abs(a - r)]

    for row in _pmap(point, config.u_grid):
        res.rows.append(row)
        res.check(row[-1] <= config.tolerance, "generating function vs recursion",
                  u=row[0], abs_diff=row[-1])
    return res


def cmd_equidist(config):
    _require(config, "q", "d")
    d = _single(config, "d")
    _positive("d", d)
    table = _table(config, d)
    res = Result(["cycle_type", "count", "prob", "residual", "bound"])
    for r in ffpoly.equidistribution_residual(table, d):
        res.rows.append([r.cycle_type.label(), r.count, float(r.prob), r.residual, r.bound])
        if r.in_range:
            res.check(r.residual <= 3 * r.bound, "residual <= 3 d q^(-l/2)",
                      cycle_type=r.cycle_type.label(), residual=r.residual)
    return res


def cmd_mertens(config):
    _require(config, "q", "d")
    d_max = max(config.d)
    _positive("d", d_max)
    table = _table(config, d_max)
    res = Result(["d", "product", "residual", "q_pow_minus_half_d"])
    for d in range(1, d_max + 1):
        product, residual = ffpoly.mertens_product(table, d)
        scale = config.q ** (-d / 2)
        res.rows.append([d, product, residual, scale])
        if d >= 5:
            res.check(residual <= 10 * scale, "residual <= 10 q^(-d/2)", d=d, residual=residual)
    return res


def cmd_gamma_q(config):
    _require(config, "q", "J")
    _positive("J", config.J)
    table = _table(config, config.J)
    ladder = sorted(set(list(range(10, config.J, 10)) + [config.J]))
    res = Result(["J_used", "value", "tail_bound"])
    for J in ladder:
        value, bound = ffpoly.gamma_q(table, J)
        res.rows.append([J, value, bound])
    value, bound = res.rows[-1][1:]
    res.check(abs(value) <= bound + config.tolerance, "|gamma_q| <= tail_bound",
              value=value, tail_bound=bound)
    return res


def cmd_thmain(config):
    _require(config, "q", "d", "u_grid")
    _positive("d", config.d)
    variant = _variant(config)
    # the limit's Euler product needs more degrees than small d supplies
    table = _table(config, max(max(config.d), 200))
    policy = specfun.TruncationPolicy(tolerance=min(config.tolerance, 1e-9))
    limits = {u: ffpoly.thmain_limit(table, u, variant, policy) for u in config.u_grid}
    res = Result(["d", "u", "scaled_re", "scaled_im", "limit_re", "limit_im", "abs_err"])

    def point(du):
        d, u = du
        v = ffpoly.thmain_scaled_charfn(table, d, u, variant)
        lim = limits[u]
        return [d, u, v.real, v.imag, lim.real, lim.imag, abs(v - lim)]

    # warm the per-degree count cache serially; the grid then only evaluates
    for d in config.d:
        ffpoly.factor_count_table(table, d, variant)
    grid = [(d, u) for d in config.d for u in config.u_grid]
    for row in _pmap(point, grid):
        res.rows.append(row)
        if row[1] == 0.0:
            res.check(abs(complex(row[2], row[3]) - 1) <= config.tolerance,
                      "value at u = 0 is 1", d=row[0])
    return res


def cmd_erdos_kac(config):
    _require(config, "N", "u_grid")
    _positive("N", config.N, 3)
    sieve = intstat.build_sieve(max(config.N))
    policy = specfun.TruncationPolicy(tolerance=min(config.tolerance, 1e-9))
    limits = {u: specfun.phi_primes(u, policy) for u in config.u_grid}
    res = Result(["N", "u", "scaled_re", "scaled_im", "limit_re", "limit_im", "abs_err"])

    def point(Nu):
        N, u = Nu
        v = intstat.erdos_kac_scaled_charfn(sieve, u, N)
        lim = limits[u]
        return [N, u, v.real, v.imag, lim.real, lim.imag, abs(v - lim)]

    for row in _pmap(point, [(N, u) for N in config.N for u in config.u_grid]):
        res.rows.append(row)
        if row[1] == 0.0:
            N = row[0]
            res.check(abs(complex(row[2], row[3]) - (N - 1) / N) <= 1e-12,
                      "value at u = 0 is (N-1)/N", N=N)
    return res


def cmd_sign_sum(config):
    _require(config, "N")
    _positive("N", config.N)
    sieve = intstat.build_sieve(max(config.N))
    res = Result(["N", "S", "scaled"])
    for N, S, scaled in intstat.sign_sum(sieve, config.N):
        res.rows.append([N, S, scaled])
        signs = 1 - 2 * (sieve.omega[1 : N + 1].astype(np.int64) & 1)
        reverse = int(signs[::-1].sum())
        res.check(reverse == S, "prefix sum equals reverse-order sum", N=N)
    return res


def cmd_ks(config):
    _require(config, "model")
    res = Result(["param", "lambda", "ks", "ks_times_sqrt_lambda", "charfn_bound"])
    if config.model == "prime-model":
        _require(config, "y")
        _positive("y", config.y, 2)
        cases = [(y, *dist.prime_model(y)) for y in config.y]
    elif config.model == "feller":
        _require(config, "d")
        _positive("d", config.d)
        cases = [(d, perms.cycle_count_dist(d), specfun.harmonic(d)) for d in config.d]
    elif config.model == "bernoulli":
        _require(config, "xs")
        for x in config.xs:
            if not 0.0 <= x <= 1.0:
                raise ConfigError("xs", f"parameters must lie in [0, 1], got {x}")
        cases = [(len(config.xs), dist.bernoulli_sum_dist(config.xs), math.fsum(config.xs))]
    else:
        raise ConfigError("model", f"unknown model {config.model!r}")

    def point(case):
        param, law, lam = case
        target = dist.poisson_dist(lam)
        ks = float(dist.ks_distance(law, target))
        bound = dist.ks_charfn_bound(law, target)
        return [param, lam, ks, ks * math.sqrt(lam), bound]

    for row in _pmap(point, cases):
        res.rows.append(row)
        res.check(row[4] >= row[2], "charfn bound >= KS distance", param=row[0])
    return res


def cmd_selftest(config):
    from .selftest import run_selftest

    res = Result(["invariant", "passed", "detail"])
    for name, ok, detail in run_selftest(config.seed):
        res.rows.append([name, ok, detail])
        res.check(ok, name, detail=detail)
    return res


COMMANDS = {
    "irr-count": cmd_irr_count,
    "omega-dist": cmd_omega_dist,
    "perm-dist": cmd_perm_dist,
    "restricted-perm": cmd_restricted_perm,
    "equidist": cmd_equidist,
    "mertens": cmd_mertens,
    "gamma-q": cmd_gamma_q,
    "thmain": cmd_thmain,
    "erdos-kac": cmd_erdos_kac,
    "sign-sum": cmd_sign_sum,
    "ks": cmd_ks,
    "selftest": cmd_selftest,
}


def run(config: ExperimentConfig) -> Result:
    """Validate and execute one command. Raises ConfigError on bad input."""
    if config.command not in COMMANDS:
        raise ConfigError("command", f"unknown command {config.command!r}")
    if config.format not in ("csv", "json"):
        raise ConfigError("format", f"expected csv or json, got {config.format!r}")
    if not config.tolerance > 0:
        raise ConfigError("tolerance", f"must be positive, got {config.tolerance}")
    if not 0 <= config.seed < 2 ** 64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    _threads()
    try:
        return COMMANDS[config.command](config)
    except ConfigError:
        raise
    except ModPoissonError as exc:
        raise ConfigError(config.command, str(exc)) from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, np.generic):
        return v.item()
    return v


def render(config: ExperimentConfig, result: Result) -> str:
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_json(),
        "rows": [{c: _json_value(v) for c, v in zip(result.columns, row)} for row in result.rows],
    }
    return json.dumps(payload, indent=1) + "\n"


def load_json_output(text: str) -> dict:
    """Parse emitted JSON and check it against the output schema."""
    data = json.loads(text)
    if not isinstance(data, dict) or set(data) != {"schema_version", "config", "rows"}:
        raise ValueError("expected keys schema_version, config, rows")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data['schema_version']!r}")
    config = ExperimentConfig(**data["config"])
    if config.command not in COMMANDS:
        raise ValueError(f"unknown command {config.command!r}")
    rows = data["rows"]
    if not isinstance(rows, list) or not all(isinstance(r, dict) for r in rows):
        raise ValueError("rows must be a list of objects")
    if rows:
        keys = list(rows[0])
        if any(list(r) != keys for r in rows):
            raise ValueError("rows have inconsistent columns")
    return data


def _write_atomic(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="modpoisson", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)

    def grid(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--u", type=_float_list, dest="u_list",
                       help="comma-separated frequencies (pi accepted)")
        g.add_argument("--u-range", nargs=3, metavar=("MIN", "MAX", "COUNT"),
                       help="COUNT evenly spaced frequencies")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("irr-count", "numbers of monic irreducibles by degree")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--J", type=int, required=True)

    p = add("omega-dist", "exact law of the number of irreducible factors")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--variant", default="distinct-all", choices=sorted(ffpoly.VARIANTS))

    p = add("perm-dist", "exact law of the number of cycles")
    p.add_argument("--d", type=_int_list, required=True)

    p = add("restricted-perm", "cycles with all lengths > b: generating function vs recursion")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--b", type=int, required=True)
    grid(p)

    p = add("equidist", "cycle-type counts against permutation probabilities")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=_int_list, required=True)

    p = add("mertens", "Mertens product residuals up to degree d")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", "--d-max", type=_int_list, required=True, dest="d")

    p = add("gamma-q", "truncations of the Mertens constant")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--J", type=int, required=True)

    p = add("thmain", "renormalized characteristic function of omega over F_q[X]")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--variant", default="distinct-all", choices=sorted(ffpoly.VARIANTS))
    grid(p)

    p = add("erdos-kac", "renormalized characteristic function of omega(n) - 1")
    p.add_argument("--N", type=_int_list, required=True)
    grid(p)

    p = add("sign-sum", "sum of (-1)^omega(n)")
    p.add_argument("--N", type=_int_list, required=True)

    p = add("ks", "Kolmogorov distance to the Poisson law")
    p.add_argument("--model", choices=("prime-model", "feller", "bernoulli"), required=True)
    p.add_argument("--y", type=_int_list)
    p.add_argument("--d", type=_int_list)
    p.add_argument("--xs", type=_float_list)

    add("selftest", "run the invariant suite")
    return parser


def config_from_args(args) -> ExperimentConfig:
    u_grid = None
    if getattr(args, "u_list", None) is not None:
        u_grid = args.u_list
    elif getattr(args, "u_range", None) is not None:
        lo, hi, count = args.u_range
        try:
            u_grid = u_grid_from_range(eval_float(lo), eval_float(hi), int(count))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("u_grid", str(exc)) from None
    return ExperimentConfig(
        command=args.command,
        q=getattr(args, "q", None),
        d=getattr(args, "d", None),
        b=getattr(args, "b", None),
        N=getattr(args, "N", None),
        y=getattr(args, "y", None),
        J=getattr(args, "J", None),
        u_grid=u_grid,
        variant=getattr(args, "variant", "distinct-all"),
        model=getattr(args, "model", None),
        xs=getattr(args, "xs", None),
        seed=args.seed,
        tolerance=args.tolerance,
        format=args.format,
        out=args.out,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    try:
        config = config_from_args(args)
        result = run(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(config, result)
    if config.out:
        _write_atomic(config.out, text)
    else:
        sys.stdout.write(text)
    if result.failures:
        print(json.dumps({"failures": result.failures}, default=str), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
