"""Command-line front end.

Subcommands: price one instrument, regenerate the built-in reference
tables, cross-check series prices against the independent pricers, export
FFT / Monte Carlo / term-grid CSVs, and benchmark the series against the
FFT (and the numba kernels against the numpy fallback).

Exit codes: 0 success, 2 convergence-gate violation, 3 config/usage error,
4 oracle-tolerance breach in `validate`.
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import _kernels
from ._backend import HAVE_NUMBA, backend_name
from .errors import ConfigError, GateViolationError, NigError
from .model import (
    MarketContext,
    NigParams,
    accessible_maturities,
    convergence_gate,
    market_from_kv,
    params_from_kv,
    parse_kv_text,
)
from .reference import (
    FftConfig,
    QuadratureConfig,
    carr_madan_integral,
    fft_strike_grid,
    lewis_digital,
    mc_price,
)
from .series import (
    ASYM_PAYOFF_KINDS,
    PAYOFF_KINDS,
    PayoffSpec,
    price,
    price_sym,
    term_grid,
)
from .tables import build_table

EXIT_OK = 0
EXIT_GATE = 2
EXIT_CONFIG = 3
EXIT_TOLERANCE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors map to the config exit code
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[list], header: list[str]) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _load_kv(path: str) -> dict[str, float]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_kv_text(text)


def _load_inputs(args) -> tuple[NigParams, MarketContext]:
    kv = _load_kv(args.model)
    if args.market and args.market != args.model:
        kv = {**kv, **_load_kv(args.market)}
    return params_from_kv(kv), market_from_kv(kv)


def _gate_message(params, context) -> str:
    gate = convergence_gate(params, context)
    cond = accessible_maturities(params, context)
    return (
        f"convergence gate violated: |k0|/(delta*tau) = {gate.ratio:.6g} >= 1\n"
        f"accessible maturities ({cond.case}): {cond.rule} with "
        f"rho_plus = {cond.rho_plus:.6g}, rho_minus = {cond.rho_minus:.6g}\n"
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_price(args) -> int:
    params, context = _load_inputs(args)
    payoff = PayoffSpec(args.payoff)
    try:
        res = price(params, context, payoff, eps=args.eps, rank=args.rank,
                    override_gate=args.override_gate)
    except GateViolationError:
        sys.stderr.write(_gate_message(params, context))
        return EXIT_GATE
    rows = [
        ("payoff", args.payoff),
        ("price", res.price),
        ("rank", res.truncation_rank),
        ("terms_evaluated", res.terms_evaluated),
        ("zero_terms_skipped", res.zero_terms_skipped),
        ("error_bound", res.error_bound),
        ("error_bound_heuristic", res.bound_is_heuristic),
        ("gate_satisfied", res.gate.satisfied),
        ("gate_ratio", res.gate.ratio),
    ]
    if args.format == "csv":
        _write_out(_csv([[k, _fmt(v)] for k, v in rows], ["field", "value"]), args.out)
    else:
        _write_out("".join(f"{k:>22}: {_fmt(v)}\n" for k, v in rows), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    cells = build_table(args.table_id, seed=args.seed, paths=args.paths)
    rows = []
    n_bad = 0
    max_dev = 0.0
    for c in cells:
        dev = "" if c.expected is None else abs(c.computed - c.expected)
        if c.expected is not None and c.mode == "abs":
            max_dev = max(max_dev, dev)
        ok = c.ok
        n_bad += 0 if ok else 1
        rows.append([c.row, c.col, c.computed,
                     "" if c.expected is None else c.expected, dev, c.mode,
                     "ok" if ok else "FAIL"])
    text = _csv(rows, ["row", "col", "computed", "expected", "abs_dev", "mode", "status"])
    summary = f"# table {args.table_id}: {len(cells)} cells, max abs deviation {_fmt(max_dev)}, {n_bad} failing\n"
    _write_out(text + summary if args.format == "csv" else text + summary, args.out)
    return EXIT_OK if n_bad == 0 else EXIT_TOLERANCE


def cmd_check(args) -> int:
    params, context = _load_inputs(args)
    gate = convergence_gate(params, context)
    cond = accessible_maturities(params, context)
    lines = [
        f"params admissible: alpha={params.alpha} beta={params.beta} "
        f"delta={params.delta} mu={params.mu}",
        f"gate ratio |k0|/(delta*tau) = {gate.ratio:.10g} -> "
        f"{'satisfied' if gate.satisfied else 'VIOLATED'}",
        f"moneyness case: {cond.case}; rule: {cond.rule}",
        f"rho_plus = {cond.rho_plus:.10g}, rho_minus = {cond.rho_minus:.10g}",
    ]
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK if gate.satisfied else EXIT_GATE


def cmd_validate(args) -> int:
    params, context = _load_inputs(args)
    payoff = PayoffSpec(args.payoff)
    try:
        res = price(params, context, payoff, eps=args.eps, rank=args.rank)
    except GateViolationError:
        sys.stderr.write(_gate_message(params, context))
        return EXIT_GATE
    kind = args.payoff
    if kind == "asset_or_nothing_call":
        oracle, method = lewis_digital(params, context, "asset"), "lewis"
        tol = args.tol
    elif kind in ("cash_or_nothing_call", "cash_or_nothing_put"):
        cash_call = lewis_digital(params, context, "cash")
        oracle = cash_call if kind == "cash_or_nothing_call" else (
            math.exp(-context.rate * context.tau) - cash_call)
        method, tol = "lewis", args.tol
    elif kind == "european_call":
        oracle, method = carr_madan_integral(params, context), "carr_madan"
        tol = args.tol
    else:
        mc = mc_price(params, context, kind, paths=args.paths, seed=args.seed)
        oracle, method = mc.estimate, f"mc[{args.paths}]"
        tol = max(args.tol, 4.0 * mc.std_error)
    dev = abs(res.price - oracle)
    ok = dev <= tol
    _write_out(
        f"series = {_fmt(res.price)} (rank {res.truncation_rank})\n"
        f"oracle[{method}] = {_fmt(oracle)}\n"
        f"abs deviation = {_fmt(dev)} (tolerance {_fmt(tol)}) -> "
        f"{'ok' if ok else 'TOLERANCE BREACH'}\n",
        args.out,
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_fft(args) -> int:
    params, context = _load_inputs(args)
    cfg = FftConfig(n_points=args.fft_n, eta=args.eta, damping=args.damping)
    window = _parse_window(args.window) if args.window else None
    strikes, prices = fft_strike_grid(params, context, cfg, window=window)
    _write_out(_csv([[k, p] for k, p in zip(strikes, prices)], ["strike", "price"]), args.out)
    return EXIT_OK


def cmd_mc(args) -> int:
    params, context = _load_inputs(args)
    res = mc_price(params, context, args.payoff, paths=args.paths, seed=args.seed)
    _write_out(
        _csv([[res.estimate, res.std_error, res.ci95_halfwidth, res.paths, res.seed]],
             ["estimate", "std_error", "ci95", "paths", "seed"]),
        args.out,
    )
    return EXIT_OK


def cmd_grid(args) -> int:
    params, context = _load_inputs(args)
    try:
        grid = term_grid(params, context, args.payoff, args.rank)
    except GateViolationError:
        sys.stderr.write(_gate_message(params, context))
        return EXIT_GATE
    n2_start = 1 if args.payoff == "european_call" else 0
    header = ["n1\\n2"] + [str(n2_start + j) for j in range(grid.shape[1])]
    rows = [[str(i)] + list(grid[i]) for i in range(grid.shape[0])]
    _write_out(_csv(rows, header), args.out)
    return EXIT_OK


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"bad window {text!r}, expected lo:hi") from None
    if not lo < hi:
        raise ConfigError("window must satisfy lo < hi")
    return lo, hi


def cmd_bench(args) -> int:
    """Series-vs-FFT workload comparison on a one-month smile sweep.

    Work counts are deterministic (series: non-null terms summed over the
    strike sweep; FFT: N cf evaluations plus N ceil(log2 N) butterfly
    operations); wall times are informational.
    """
    params = NigParams(alpha=40.0, beta=0.0, delta=25.0, mu=0.0)
    base_ctx = MarketContext(spot=3000.0, strike=3000.0, rate=0.01, tau=1.0 / 12.0)
    window = _parse_window(args.window)
    strikes = np.linspace(window[0], window[1], args.strikes)
    payoff = PayoffSpec("european_call")

    lines = [f"active backend: {backend_name()}"]
    # warm the kernels before timing
    price_sym(params, base_ctx.with_strike(float(strikes[0])), payoff, rank=args.rank)
    t0 = time.perf_counter()
    series_work = 0
    grid_terms = zero_terms = 0
    for k in strikes:
        res = price_sym(params, base_ctx.with_strike(float(k)), payoff, rank=args.rank)
        series_work += res.terms_evaluated
        grid_terms = res.terms_evaluated + res.zero_terms_skipped
        zero_terms = res.zero_terms_skipped
    series_wall = time.perf_counter() - t0
    lines.append(
        f"series rank {args.rank}: grid {grid_terms} terms/strike of which {zero_terms} zero "
        f"({grid_terms - zero_terms} evaluated); {args.strikes} strikes -> "
        f"work {series_work} term evaluations in {series_wall:.4f} s"
    )

    for n in args.fft_n:
        cfg = FftConfig(n_points=n, eta=args.eta)
        t0 = time.perf_counter()
        ks, _ = fft_strike_grid(params, base_ctx, cfg, window=window)
        fft_wall = time.perf_counter() - t0
        fft_work = n * math.ceil(math.log2(n)) + n
        lines.append(
            f"fft N={n}: {ks.size} strikes in window; work {fft_work} ops in {fft_wall:.4f} s"
        )

    if HAVE_NUMBA:
        lines.append(_kernel_backend_bench(params, base_ctx, args.rank))
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _kernel_backend_bench(params, context, rank, loops: int = 50) -> str:
    """Time the double-grid hot kernel under both backends on equal inputs."""
    from .model import moneyness
    from .series import _log_g_table, _log_pow_over_fact

    mny = moneyness(params, context)
    z = params.alpha * params.delta * context.tau
    log_q = math.log(params.delta * context.tau / (2.0 * params.alpha))
    logA, sgnA = _log_pow_over_fact(mny.k0, rank)
    logB, sgnB = np.zeros(rank + 1), np.ones(rank + 1)
    logG, sgnG = _log_g_table(z, -rank, rank, log_q)
    args = (logA, sgnA, logB, sgnB, logG, sgnG, 1)
    _kernels._grid_sum_numba(*args)  # compile
    t0 = time.perf_counter()
    for _ in range(loops):
        _kernels._grid_sum_numba(*args)
    t_numba = (time.perf_counter() - t0) / loops
    t0 = time.perf_counter()
    for _ in range(loops):
        _kernels._grid_sum_numpy(*args)
    t_numpy = (time.perf_counter() - t0) / loops
    return (
        f"kernel backends (rank {rank} grid): numba {t_numba * 1e6:.1f} us/call, "
        f"numpy {t_numpy * 1e6:.1f} us/call"
    )


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_io_args(p, market=True):
    p.add_argument("--model", required=True, help="flat key-value model file")
    if market:
        p.add_argument("--market", default=None,
                       help="market file (defaults to the model file)")
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="nigpricer", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price one instrument with the residue series")
    _add_io_args(p)
    p.add_argument("--payoff", required=True, choices=PAYOFF_KINDS)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--override-gate", action="store_true")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("table", help="regenerate a built-in reference table")
    p.add_argument("table_id", type=int, choices=(1, 2, 3, 4, 5, 6))
    p.add_argument("--seed", type=int, default=20201004)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--format", choices=("text", "csv"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("check", help="admissibility, gate and maturity thresholds")
    _add_io_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("validate", help="series price against an independent oracle")
    _add_io_args(p)
    p.add_argument("--payoff", required=True, choices=PAYOFF_KINDS)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20201004)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fft", help="export the FFT strike grid as CSV")
    _add_io_args(p)
    p.add_argument("--fft-n", type=int, default=4096)
    p.add_argument("--eta", type=float, default=0.25)
    p.add_argument("--damping", type=float, default=None)
    p.add_argument("--window", default=None, help="strike window lo:hi")
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("mc", help="Monte Carlo estimate as CSV")
    _add_io_args(p)
    p.add_argument("--payoff", required=True,
                   choices=("european_call", "cash_or_nothing_call", "log_call",
                            "power_european_call", "capped_cash_call"))
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20201004)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("grid", help="export the series term grid as CSV")
    _add_io_args(p)
    p.add_argument("--payoff", default="asset_or_nothing_call",
                   choices=("asset_or_nothing_call", "european_call", "cash_or_nothing_call"))
    p.add_argument("--rank", type=int, default=10)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("bench", help="series vs FFT workload benchmark")
    p.add_argument("--rank", type=int, default=30)
    p.add_argument("--fft-n", type=int, nargs="+", default=[500, 1000])
    p.add_argument("--eta", type=float, default=0.25)
    p.add_argument("--strikes", type=int, default=300)
    p.add_argument("--window", default="2000:5000")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except NigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
