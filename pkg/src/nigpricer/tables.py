"""Built-in reference tables for the validation suite and the CLI.

Each builder reprices a table from embedded parameter sets and compares
cell by cell against embedded expected values.  Expected values are
reproduced to the printed precision of the source tables; cells whose
source entries are visibly unconverged or misprinted carry no expected
value and are reported informationally (the deep-ITM asymmetric digital
additionally gets an adaptive-rank convergence check against its Lewis
value).  Monte Carlo cells are regenerated under this tool's own seed and
judged statistically, never by equality to anyone else's draws.
"""

import math
from dataclasses import dataclass

from .model import MarketContext, NigParams, accessible_maturities
from .reference import carr_madan_integral, lewis_digital, mc_price
from .series import PayoffSpec, price_asym, price_sym, truncation_rank

# implied parameter sets calibrated on option markets (OBX, S&P 500, SX5E)
PARAM_SETS = {
    "obx": NigParams(alpha=8.9932, beta=-4.5176, delta=1.1528, mu=0.0),
    "spx_a": NigParams(alpha=20.7408, beta=-11.7308, delta=0.2483, mu=0.0),
    "sx5e": NigParams(alpha=16.1975, beta=-3.1804, delta=1.0867, mu=0.0),
    "spx_b": NigParams(alpha=18.4815, beta=-4.8412, delta=0.4685, mu=0.0),
}

OBX_SYM = NigParams(alpha=8.9932, beta=0.0, delta=1.1528, mu=0.0)
OBX_ASYM = PARAM_SETS["obx"]

_RATE = 0.01
_STRIKE = 4000.0
_SPOTS = (3000.0, 3500.0, 4000.0, 4500.0, 5000.0)
_SPOT_LABELS = ("deep_otm_3000", "otm_3500", "atm_4000", "itm_4500", "deep_itm_5000")
_SYM_RANKS = (3, 5, 10, 15)
_ASYM_RANKS = (10, 20, 30, 50)
_MATURITIES = (("1y", 1.0), ("1m", 1.0 / 12.0), ("1w", 1.0 / 52.0), ("1d", 1.0 / 360.0))


@dataclass(frozen=True)
class TableCell:
    table: int
    row: str
    col: str
    computed: float
    expected: float | None
    tol: float | None
    mode: str  # "abs" | "mantissa6" | "stat" | "info"

    @property
    def ok(self) -> bool:
        if self.expected is None:
            return True
        if self.mode == "mantissa6":
            return _mantissa_match(self.computed, self.expected)
        return abs(self.computed - self.expected) <= self.tol


def _mantissa_match(computed: float, expected: float, sig: int = 6) -> bool:
    """Compare significands only (the source's exponents are unreliable in
    one row; its printed significant digits are not)."""
    if computed == 0.0 or expected == 0.0:
        return computed == expected
    def mant(x: float) -> float:
        return abs(x) / 10.0 ** math.floor(math.log10(abs(x)))
    return abs(mant(computed) - mant(expected)) <= 5.0 * 10.0 ** (1 - sig) * mant(expected)


def _ctx(spot: float, tau: float, **kw) -> MarketContext:
    return MarketContext(spot=spot, strike=_STRIKE, rate=_RATE, tau=tau, **kw)


# ---------------------------------------------------------------------------
# table 1: accessible maturity thresholds
# ---------------------------------------------------------------------------

_T1_EXPECTED = {
    ("obx", "otm"): 0.077,
    ("obx", "itm"): 0.208,
    ("spx_a", "otm"): 0.319,
    ("spx_a", "itm"): 1.504,
    ("sx5e", "otm"): 0.104,
    ("sx5e", "itm"): 0.131,
    ("spx_b", "otm"): 0.226,
    ("spx_b", "itm"): 0.341,
}


def build_table1(**_) -> list[TableCell]:
    cells = []
    for name, params in PARAM_SETS.items():
        for side, spot in (("otm", 3500.0), ("itm", 4500.0)):
            cond = accessible_maturities(params, _ctx(spot, 1.0))
            threshold = cond.rho_minus if side == "otm" else cond.rho_plus
            cells.append(
                TableCell(1, name, side, threshold, _T1_EXPECTED[(name, side)], 1e-3, "abs")
            )
    return cells


# ---------------------------------------------------------------------------
# table 2: truncation ranks, term counts and price-error bounds
# ---------------------------------------------------------------------------

_T2_EXPECTED = {
    1e-5: (5, 36, 30, 6, 6.39064, 6.39064, 0.00159766),
    1e-10: (11, 144, 132, 12, 0.0639064, 0.0639064, 0.0000159766),
    1e-15: (15, 256, 240, 16, 6.39064e-7, 6.39064e-7, 1.59766e-10),
    1e-20: (21, 484, 462, 22, 6.39064e-12, 6.39064e-12, 1.59766e-15),
}


def build_table2(**_) -> list[TableCell]:
    params = OBX_SYM
    ctx = _ctx(3800.0, 1.0)
    cells = []
    for eps, (n_eps, n_an, n_eur, n_cn, b_an, b_eur, b_cn) in _T2_EXPECTED.items():
        row = f"eps={eps:g}"
        rank = truncation_rank(params, ctx, eps)
        cells.append(TableCell(2, row, "rank", rank, n_eps, 0.0, "abs"))
        res_an = price_sym(params, ctx, PayoffSpec("asset_or_nothing_call"), eps=eps)
        res_eur = price_sym(params, ctx, PayoffSpec("european_call"), eps=eps)
        res_cn = price_sym(params, ctx, PayoffSpec("cash_or_nothing_call"), eps=eps)
        for label, res, terms, bound in (
            ("an", res_an, n_an, b_an),
            ("eur", res_eur, n_eur, b_eur),
            ("cn", res_cn, n_cn, b_cn),
        ):
            grid = res.terms_evaluated + res.zero_terms_skipped
            cells.append(TableCell(2, row, f"{label}_terms", grid, terms, 0.0, "abs"))
            cells.append(TableCell(2, row, f"{label}_bound", res.error_bound, bound, None, "mantissa6"))
    return cells


# ---------------------------------------------------------------------------
# tables 3 and 4: digital prices at stated ranks plus the Lewis column
# ---------------------------------------------------------------------------

_T3_SYM = {
    "deep_otm_3000": (861.9096, 796.5146, 804.8118, 804.9099),
    "otm_3500": (1495.7699, 1493.3213, 1493.5276, 1493.5278),
    "atm_4000": (2309.8330, 2313.6169, 2313.7110, 2313.7110),
    "itm_4500": (3163.3516, 3170.7414, 3170.9431, 3170.9431),
    "deep_itm_5000": (3986.4269, 3999.5086, 3999.8854, 3999.8852),
}
_T3_SYM_LEWIS = {
    "deep_otm_3000": 804.9097,
    "otm_3500": 1493.5278,
    "atm_4000": 2313.7110,
    "itm_4500": 3170.9431,
    "deep_itm_5000": 3999.8852,
}
_T3_ASYM = {
    "deep_otm_3000": (1084.9112, 991.4964, 990.8328, 990.8302),
    "otm_3500": (1814.0381, 1705.6678, 1704.8935, 1704.8905),
    "atm_4000": (2593.7092, 2480.0154, 2479.1183, 2479.1149),
    "itm_4500": (3310.5927, 3252.0495, 3250.4093, 3250.4089),
    "deep_itm_5000": (3777.9899, 4003.6194, 3989.4277, 3989.7291),
}
_T3_ASYM_LEWIS = {
    "deep_otm_3000": 990.8302,
    "otm_3500": 1704.8905,
    "atm_4000": 2479.1149,
    "itm_4500": 3250.4089,
    "deep_itm_5000": 3989.7293,
}

_T4_SYM = {
    "deep_otm_3000": (0.2127, 0.2092, 0.2095, 0.2095),
    "otm_3500": (0.3076, 0.3073, 0.3073, 0.3073),
    "atm_4000": (0.4054, 0.4054, 0.4054, 0.4054),
    "itm_4500": (0.4973, 0.4973, 0.4973, 0.4973),
    "deep_itm_5000": (0.5793, 0.5793, 0.5793, 0.5793),
}
_T4_SYM_LEWIS = {
    "deep_otm_3000": 0.2095,
    "otm_3500": 0.3073,
    "atm_4000": 0.4054,
    "itm_4500": 0.4973,
    "deep_itm_5000": 0.5793,
}
# the deep-ITM row of the asymmetric block is visibly unconverged in the
# source at these ranks; it is reported informationally and checked by
# adaptive rank extension against the Lewis value instead
_T4_ASYM = {
    "deep_otm_3000": (0.2579, 0.2360, 0.2357, 0.2357),
    "otm_3500": (0.3523, 0.3244, 0.3240, 0.3240),
    "atm_4000": (0.4544, 0.4077, 0.4074, 0.4074),
    "itm_4500": (0.5740, 0.4823, 0.4827, 0.4827),
    "deep_itm_5000": (None, None, None, None),
}
_T4_ASYM_LEWIS = {
    "deep_otm_3000": 0.2357,
    "otm_3500": 0.3240,
    "atm_4000": 0.4074,
    "itm_4500": 0.4827,
    "deep_itm_5000": 0.5489,
}
_T4_DEEP_ITM_TARGET = 0.5489


def _digital_table(table_id, tau, payoff_kind, kind_lewis, sym_exp, sym_lewis, asym_exp,
                   asym_lewis, series_tol, lewis_tol) -> list[TableCell]:
    cells = []
    payoff = PayoffSpec(payoff_kind)
    for label, spot in zip(_SPOT_LABELS, _SPOTS):
        ctx = _ctx(spot, tau)
        for rank, expected in zip(_SYM_RANKS, sym_exp[label]):
            got = price_sym(OBX_SYM, ctx, payoff, rank=rank).price
            cells.append(TableCell(table_id, f"sym_{label}", f"rank{rank}", got,
                                   expected, series_tol, "abs"))
        got = lewis_digital(OBX_SYM, ctx, kind_lewis)
        cells.append(TableCell(table_id, f"sym_{label}", "lewis", got,
                               sym_lewis[label], lewis_tol, "abs"))
        for rank, expected in zip(_ASYM_RANKS, asym_exp[label]):
            got = price_asym(OBX_ASYM, ctx, payoff, rank=rank).price
            mode = "abs" if expected is not None else "info"
            cells.append(TableCell(table_id, f"asym_{label}", f"rank{rank}", got,
                                   expected, series_tol, mode))
        got = lewis_digital(OBX_ASYM, ctx, kind_lewis)
        cells.append(TableCell(table_id, f"asym_{label}", "lewis", got,
                               asym_lewis[label], lewis_tol, "abs"))
    return cells


def build_table3(**_) -> list[TableCell]:
    return _digital_table(3, 1.0, "asset_or_nothing_call", "asset",
                          _T3_SYM, _T3_SYM_LEWIS, _T3_ASYM, _T3_ASYM_LEWIS, 1e-3, 5e-4)


def build_table4(**_) -> list[TableCell]:
    cells = _digital_table(4, 2.0, "cash_or_nothing_call", "cash",
                           _T4_SYM, _T4_SYM_LEWIS, _T4_ASYM, _T4_ASYM_LEWIS, 1e-4, 1e-4)
    # adaptive-rank convergence for the excluded deep-ITM asymmetric cells
    res = price_asym(OBX_ASYM, _ctx(5000.0, 2.0), PayoffSpec("cash_or_nothing_call"), eps=1e-10)
    cells.append(TableCell(4, "asym_deep_itm_5000", "adaptive", res.price,
                           _T4_DEEP_ITM_TARGET, 5e-3, "abs"))
    return cells


# ---------------------------------------------------------------------------
# table 5: European calls across maturities plus the Carr-Madan column
# ---------------------------------------------------------------------------

_T5_SYM = {
    "1y": (576.6432, 580.4319, 580.5260, 580.5260),
    "1m": (150.8024, 150.8651, 150.8656, 150.8656),
    "1w": (60.9649, 60.9746, 60.9747, 60.9747),
    "1d": (15.4503, 15.4515, 15.4515, 15.4515),
}
_T5_SYM_CM = {"1y": 580.5260, "1m": 150.8656, "1w": 60.9747, "1d": 15.4515}
_T5_ASYM = {
    "1y": (790.330, 679.6635, 678.8152, 678.8118),
    "1m": (173.6275, 173.5547, 173.5546, 173.5546),
    "1w": (68.4327, 68.4234, 68.4234, 68.4234),
    "1d": (16.7801, 16.7790, 16.7790, 16.7790),
}
_T5_ASYM_CM = {"1y": 678.8118, "1m": 173.5546, "1w": 68.4234, "1d": 16.7790}


def build_table5(**_) -> list[TableCell]:
    cells = []
    payoff = PayoffSpec("european_call")
    for label, tau in _MATURITIES:
        ctx = _ctx(4000.0, tau)
        for rank, expected in zip(_SYM_RANKS, _T5_SYM[label]):
            got = price_sym(OBX_SYM, ctx, payoff, rank=rank).price
            cells.append(TableCell(5, f"sym_{label}", f"rank{rank}", got, expected, 1e-3, "abs"))
        cells.append(TableCell(5, f"sym_{label}", "carr_madan",
                               carr_madan_integral(OBX_SYM, ctx), _T5_SYM_CM[label], 1e-3, "abs"))
        for rank, expected in zip(_ASYM_RANKS, _T5_ASYM[label]):
            got = price_asym(OBX_ASYM, ctx, payoff, rank=rank).price
            cells.append(TableCell(5, f"asym_{label}", f"rank{rank}", got, expected, 1e-3, "abs"))
        cells.append(TableCell(5, f"asym_{label}", "carr_madan",
                               carr_madan_integral(OBX_ASYM, ctx), _T5_ASYM_CM[label], 1e-3, "abs"))
    return cells


# ---------------------------------------------------------------------------
# table 6: log / power / capped payoffs with Monte Carlo regeneration
# ---------------------------------------------------------------------------

_T6_SPOTS = (("otm_3500", 3500.0), ("atm_4000", 4000.0), ("itm_4500", 4500.0))
_T6_LOG = {
    "otm_3500": (0.1012, 0.1008, 0.1008),
    "atm_4000": (0.1483, 0.1482, 0.1482),
    "itm_4500": (0.2014, 0.2014, 0.2014),
}
# the rank-20 OTM power entry is misprinted in the source (dropped digit);
# reported informationally
_T6_POWER = {
    "otm_3500": (None, 14629.84, 14629.84),
    "atm_4000": (17843.79, 17847.18, 17847.18),
    "itm_4500": (21126.01, 21148.88, 21148.89),
}
_T6_CAPPED = {
    "otm_3500": (0.1754, 0.1355, 0.1347),
    "atm_4000": (0.1754, 0.1575, 0.1575),
    "itm_4500": (0.1754, 0.1702, 0.1702),
}
_T6_LOG_RANKS = (1, 3, 5)
_T6_POWER_RANKS = (20, 40, 60)
_T6_CAPPED_RANKS = (1, 5, 10)


def build_table6(seed: int = 20201004, paths: int = 100_000, **_) -> list[TableCell]:
    cells = []
    tau = 2.0
    sections = (
        ("log", "log_call", _T6_LOG, _T6_LOG_RANKS, {}, "log_call"),
        ("power", "power_european_call", _T6_POWER, _T6_POWER_RANKS, {"power": 1.2},
         "power_european_call"),
        ("capped", "capped_cash_call", _T6_CAPPED, _T6_CAPPED_RANKS, {"strike2": 5000.0},
         "capped_cash_call"),
    )
    for sec, kind, table, ranks, ctx_kw, mc_kind in sections:
        payoff = PayoffSpec(kind)
        for label, spot in _T6_SPOTS:
            ctx = _ctx(spot, tau, **ctx_kw)
            series_final = None
            for rank, expected in zip(ranks, table[label]):
                got = price_sym(OBX_SYM, ctx, payoff, rank=rank).price
                mode = "abs" if expected is not None else "info"
                cells.append(TableCell(6, f"{sec}_{label}", f"rank{rank}", got,
                                       expected, 1e-2, mode))
                series_final = got
            mc = mc_price(OBX_SYM, ctx, mc_kind, paths=paths, seed=seed)
            cells.append(TableCell(6, f"{sec}_{label}", f"mc_{paths}", mc.estimate,
                                   None, None, "info"))
            cells.append(TableCell(6, f"{sec}_{label}", "mc_vs_series", mc.estimate,
                                   series_final, 4.0 * mc.std_error, "stat"))
    return cells


_BUILDERS = {1: build_table1, 2: build_table2, 3: build_table3, 4: build_table4,
             5: build_table5, 6: build_table6}


def build_table(table_id: int, **kw) -> list[TableCell]:
    """Reprice one of the built-in reference tables (1-6)."""
    try:
        builder = _BUILDERS[table_id]
    except KeyError:
        raise ValueError(f"no table {table_id}; choose 1-6") from None
    return builder(**kw)


def max_abs_deviation(cells: list[TableCell]) -> float:
    devs = [abs(c.computed - c.expected) for c in cells
            if c.expected is not None and c.mode == "abs"]
    return max(devs) if devs else 0.0
