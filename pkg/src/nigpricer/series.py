"""Residue-series option pricers for the exponential NIG model.

Symmetric (beta = 0) payoffs: digital, European, gap, power, log and capped
contracts.  Asymmetric (any admissible beta): asset-or-nothing, European
and cash-or-nothing calls.  Every evaluator shares the same term algebra:

    term = [k0-power / factorial] * [coupling powers] *
           recip_gamma(1 + m/2) * e^z K_{(1-m)/2}(z) * q^{(m+1)/2}

with z = alpha delta tau and q = delta tau / (2 alpha).  The e^z scaling of
the Bessel factor cancels the e^{alpha delta tau} of the prefactor, so
prefactors here never exponentiate alpha delta tau directly.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, GateViolationError
from .model import GateResult, MarketContext, NigParams, moneyness
from .specialfn import log_bessel_k_scaled_half, log_bessel_k_scaled_int

PAYOFF_KINDS = (
    "asset_or_nothing_call",
    "cash_or_nothing_call",
    "cash_or_nothing_put",
    "european_call",
    "gap_call",
    "power_asset_call",
    "power_european_call",
    "power_cash_call",
    "log_call",
    "log_put",
    "log_contract",
    "capped_cash_call",
    "outside_cash_call",
)

ASYM_PAYOFF_KINDS = ("asset_or_nothing_call", "european_call", "cash_or_nothing_call")

_POWER_KINDS = ("power_asset_call", "power_european_call", "power_cash_call")
_TWO_STRIKE_KINDS = ("gap_call", "capped_cash_call", "outside_cash_call")

# rank used when pricing is forced past a violated gate without an explicit rank
_OVERRIDE_RANK = 30
_MAX_ADAPTIVE_RANK = 512


@dataclass(frozen=True)
class PayoffSpec:
    """Payoff selector; strike data lives in MarketContext unless overridden."""

    kind: str
    strike2: float | None = None
    power: float | None = None

    def __post_init__(self):
        if self.kind not in PAYOFF_KINDS:
            raise DomainError(f"unknown payoff kind {self.kind!r}")

    def resolve(self, context: MarketContext) -> tuple[float | None, float]:
        """Validated (strike2, power) for this payoff in this market."""
        strike2 = self.strike2 if self.strike2 is not None else context.strike2
        power = self.power if self.power is not None else context.power
        if self.kind in _TWO_STRIKE_KINDS:
            if strike2 is None:
                raise DomainError(f"{self.kind} needs a second strike (strike2)")
            if self.kind in ("capped_cash_call", "outside_cash_call") and not (
                context.strike < strike2
            ):
                raise DomainError("capped payoffs need strike < strike2")
        if self.kind in _POWER_KINDS and not power > 0.0:
            raise DomainError("power payoffs need a positive exponent")
        return strike2, power


@dataclass(frozen=True)
class SeriesResult:
    """Price plus truncation diagnostics."""

    price: float
    truncation_rank: int
    terms_evaluated: int
    zero_terms_skipped: int
    error_bound: float
    gate: GateResult
    bound_is_heuristic: bool


# ---------------------------------------------------------------------------
# truncation rank
# ---------------------------------------------------------------------------


def _rank_for_ratio(alpha: float, ratio: float, eps: float) -> int:
    if ratio <= 0.0:
        return 1
    log_ratio = math.log(ratio)
    p = math.ceil(math.log(alpha * eps) / (2.0 * log_ratio))
    return 2 * max(p, 0) + 1


def truncation_rank(params: NigParams, context: MarketContext, eps: float) -> int:
    """Smallest odd rank past which all series terms are O(eps).

    n_eps = 2 ceil( log(alpha eps) / (2 log |k0|/(delta tau)) ) + 1; requires
    the convergence gate to hold.
    """
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    ratio = moneyness(params, context).convergence_ratio
    if ratio >= 1.0:
        raise GateViolationError(ratio)
    return _rank_for_ratio(params.alpha, ratio, eps)


# ---------------------------------------------------------------------------
# term-factor tables (log magnitude + sign)
# ---------------------------------------------------------------------------


def _log_pow_over_fact(base: float, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """log |base^n / n!| and sign, n = 0..rank; base = 0 keeps only n = 0."""
    n = np.arange(rank + 1)
    lfact = np.array([math.lgamma(i + 1.0) for i in range(rank + 1)])
    if base == 0.0:
        logs = -lfact
        sgn = np.zeros(rank + 1)
        sgn[0] = 1.0
        return logs, sgn
    logs = n * math.log(abs(base)) - lfact
    sgn = np.where(n % 2 == 0, 1.0, math.copysign(1.0, base))
    if base > 0.0:
        sgn = np.ones(rank + 1)
    return logs, sgn


def _log_g_table(z: float, m_lo: int, m_hi: int, log_q: float) -> tuple[np.ndarray, np.ndarray]:
    """G(m) = recip_gamma(1 + m/2) * e^z K_{(1-m)/2}(z) * q^{(m+1)/2}.

    Returns (log|G|, sign) for m = m_lo..m_hi; sign 0 marks the null terms
    from Gamma poles (1 + m/2 a non-positive integer).
    """
    order_hi = max(abs(1 - m_lo), abs(1 - m_hi), 1)
    n_int = order_hi // 2 + 1
    lad_int = log_bessel_k_scaled_int(z, n_int)
    lad_half = log_bessel_k_scaled_half(z, n_int)
    m = np.arange(m_lo, m_hi + 1)
    logg = np.empty(m.size)
    sgn = np.ones(m.size)
    for i, mi in enumerate(m):
        arg2 = 2 + mi  # 2 * (1 + m/2)
        if mi % 2 == 0:
            a_int = arg2 // 2
            if a_int <= 0:
                sgn[i] = 0.0
                logg[i] = 0.0
                continue
            log_rg = -math.lgamma(a_int)
            s = 1.0
            log_k = lad_half[(abs(1 - mi) - 1) // 2]
        else:
            arg = 0.5 * arg2
            log_rg = -math.lgamma(arg)
            if arg > 0.0:
                s = 1.0
            else:
                s = -1.0 if math.floor(-arg) % 2 == 0 else 1.0
            log_k = lad_int[abs(1 - mi) // 2]
        logg[i] = log_rg + log_k + 0.5 * (mi + 1) * log_q
        sgn[i] = s
    return logg, sgn


def _log_poch_table(rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Rising-factorial table (1-j)_{n2} for j = -rank..rank, n2 = 0..rank."""
    lg = np.array([math.lgamma(i + 1.0) for i in range(3 * rank + 3)])  # lg[i] = log(i!)
    n2 = np.arange(rank + 1)
    logp = np.zeros((2 * rank + 1, rank + 1))
    sgnp = np.ones((2 * rank + 1, rank + 1))
    for j in range(-rank, rank + 1):
        row = j + rank
        x = 1 - j
        if x >= 1:
            logp[row, :] = lg[x + n2 - 1] - lg[x - 1]
        else:
            k = -x
            inside = n2 <= k
            logp[row, inside] = lg[k] - lg[k - n2[inside]]
            sgnp[row, inside] = np.where(n2[inside] % 2 == 0, 1.0, -1.0)
            sgnp[row, ~inside] = 0.0
    return logp, sgnp


# ---------------------------------------------------------------------------
# evaluation cores
# ---------------------------------------------------------------------------


def _sym_grid(k0_like, z, log_q, r1, r2, n2_start, power_base=None):
    """Double-series partial sums; returns (total, evaluated, zeros)."""
    logA, sgnA = _log_pow_over_fact(k0_like, r1)
    if power_base is None:
        logB = np.zeros(r2 + 1)
        sgnB = np.ones(r2 + 1)
    else:
        logB = np.arange(r2 + 1) * math.log(power_base)
        sgnB = np.ones(r2 + 1)
    logG, sgnG = _log_g_table(z, -r1, r2, log_q)
    bins, evaluated, zeros = _kernels.grid_sum(logA, sgnA, logB, sgnB, logG, sgnG, n2_start)
    return _kernels.kahan_sum(bins), evaluated, zeros


def _cash_sum(k0_like, z, log_q, rank):
    """Single-index cash-or-nothing series; also returns its n = 0 head term."""
    total, evaluated, zeros = _sym_grid(k0_like, z, log_q, rank, 0, 0)
    logG0, sgnG0 = _log_g_table(z, 0, 0, log_q)
    head = sgnG0[0] * math.exp(logG0[0])
    return total, head, evaluated, zeros


def _asym_grid(k0, beta, z, log_q, rank, n3_start, n3_end_is_rank=True):
    logA, sgnA = _log_pow_over_fact(k0, rank)
    logB, sgnB = _log_pow_over_fact(beta, rank)
    logP, sgnP = _log_poch_table(rank)
    logG, sgnG = _log_g_table(z, -rank, 2 * rank, log_q)
    n3_end = rank if n3_end_is_rank else 0
    bins, evaluated, zeros = _kernels.triple_sum(
        logA, sgnA, logB, sgnB, logP, sgnP, logG, sgnG, n3_start, n3_end
    )
    return bins, evaluated, zeros


# ---------------------------------------------------------------------------
# gate / bound helpers
# ---------------------------------------------------------------------------


def _payoff_ratios(params: NigParams, context: MarketContext, payoff: PayoffSpec):
    """(gate ratio, k0-like values needed by the payoff)."""
    strike2, power = payoff.resolve(context)
    kind = payoff.kind
    d_tau = params.delta * context.tau
    mny = moneyness(params, context)
    if kind in _POWER_KINDS:
        ctx_pow = context if context.power == power else None
        k0a = (
            mny.k0a
            if ctx_pow is not None
            else moneyness(params, MarketContext(
                spot=context.spot, strike=context.strike, rate=context.rate,
                tau=context.tau, dividend=context.dividend, power=power)).k0a
        )
        return abs(k0a) / d_tau, {"k0a": k0a, "power": power}
    if kind == "gap_call":
        k0_trigger = moneyness(params, context.with_strike(strike2)).k0
        return abs(k0_trigger) / d_tau, {"k0_trigger": k0_trigger, "strike2": strike2}
    if kind in ("capped_cash_call", "outside_cash_call"):
        k0_lo = mny.k0
        k0_hi = moneyness(params, context.with_strike(strike2)).k0
        ratio = max(abs(k0_lo), abs(k0_hi)) / d_tau
        return ratio, {"k0_lo": k0_lo, "k0_hi": k0_hi}
    return mny.convergence_ratio, {"k0": mny.k0}


def _gate_and_rank(params, context, payoff, eps, rank, override_gate):
    ratio, extras = _payoff_ratios(params, context, payoff)
    gate = GateResult(satisfied=ratio < 1.0, ratio=ratio)
    if not gate.satisfied and not override_gate:
        raise GateViolationError(ratio)
    if rank is None:
        if gate.satisfied:
            rank = _rank_for_ratio(params.alpha, ratio, eps)
        else:
            rank = _OVERRIDE_RANK
    if rank < 1:
        raise DomainError("rank must be >= 1")
    return gate, int(rank), extras


def _error_bound(params, context, payoff, gate, ratio, eps, rank, eps_driven, symmetric, converged=True):
    """Certified truncation bound where the theory covers it, else heuristic."""
    kind = payoff.kind
    k_scale = {
        "asset_or_nothing_call": context.strike,
        "european_call": context.strike,
        "cash_or_nothing_call": 1.0,
        "cash_or_nothing_put": 1.0,
        "gap_call": (payoff.resolve(context)[0] or 0.0) + context.strike,
        "power_asset_call": context.strike,
        "power_european_call": context.strike,
        "power_cash_call": 1.0,
        "log_call": 1.0,
        "log_put": 1.0,
        "log_contract": 0.0,
        "capped_cash_call": 2.0,
        "outside_cash_call": 2.0,
    }[kind]
    a, d, tau = params.alpha, params.delta, context.tau
    eps_eff = eps if eps_driven else (ratio ** max(rank - 1, 0) / a if ratio > 0.0 else eps)
    expo = (a * d if symmetric else params.gamma_sym * d) - context.rate
    if k_scale == 0.0:
        return 0.0, False
    log_bound = math.log(k_scale) + math.log(a) + expo * tau - 0.5 * math.log(math.pi) + math.log(eps_eff)
    bound = math.exp(log_bound) if log_bound < 709.0 else math.inf
    certified_kind = kind in (
        "asset_or_nothing_call",
        "european_call",
        "cash_or_nothing_call",
        "cash_or_nothing_put",
    )
    needs_tau_cond = kind in ("asset_or_nothing_call", "european_call")
    tau_ok = (not needs_tau_cond) or (tau < 2.0 * a / (math.pi * d))
    heuristic = not (gate.satisfied and certified_kind and tau_ok and converged)
    return bound, heuristic


# ---------------------------------------------------------------------------
# public pricers
# ---------------------------------------------------------------------------


def price_sym(
    params: NigParams,
    context: MarketContext,
    payoff: PayoffSpec,
    eps: float = 1e-10,
    rank: int | None = None,
    override_gate: bool = False,
) -> SeriesResult:
    """Price a path-independent payoff in the symmetric model (beta = 0).

    The truncation rank is taken from ``rank`` when given, otherwise from
    the eps-based rank rule on the payoff's own moneyness variable.
    """
    if params.beta != 0.0:
        raise DomainError("price_sym requires beta = 0 (use price_asym)")
    eps_driven = rank is None
    gate, rank, extras = _gate_and_rank(params, context, payoff, eps, rank, override_gate)
    kind = payoff.kind
    a, d, tau = params.alpha, params.delta, context.tau
    z = a * d * tau
    log_q = math.log(d * tau / (2.0 * a))
    disc = math.exp(-context.rate * tau)
    base = a * disc / math.sqrt(math.pi)

    if kind == "asset_or_nothing_call":
        total, ev, zr = _sym_grid(extras["k0"], z, log_q, rank, rank, 0)
        price = context.strike * base * total
    elif kind == "european_call":
        total, ev, zr = _sym_grid(extras["k0"], z, log_q, rank, rank, 1)
        price = context.strike * base * total
    elif kind == "cash_or_nothing_call":
        total, _, ev, zr = _cash_sum(extras["k0"], z, log_q, rank)
        price = base * total
    elif kind == "cash_or_nothing_put":
        total, head, ev, zr = _cash_sum(extras["k0"], z, log_q, rank)
        price = base * (2.0 * head - total)
    elif kind == "gap_call":
        k0t = extras["k0_trigger"]
        k2 = extras["strike2"]
        tot_an, ev1, zr1 = _sym_grid(k0t, z, log_q, rank, rank, 0)
        tot_cn, _, ev2, zr2 = _cash_sum(k0t, z, log_q, rank)
        price = base * (k2 * tot_an - context.strike * tot_cn)
        ev, zr = ev1 + ev2, zr1 + zr2
    elif kind == "power_asset_call":
        total, ev, zr = _sym_grid(extras["k0a"], z, log_q, rank, rank, 0, power_base=extras["power"])
        price = context.strike * base * total
    elif kind == "power_european_call":
        total, ev, zr = _sym_grid(extras["k0a"], z, log_q, rank, rank, 1, power_base=extras["power"])
        price = context.strike * base * total
    elif kind == "power_cash_call":
        total, _, ev, zr = _cash_sum(extras["k0a"], z, log_q, rank)
        price = base * total
    elif kind in ("log_call", "log_put"):
        total, ev, zr = _log_series_sum(extras["k0"], z, log_q, rank, d, tau, a)
        lead = 0.5 * extras["k0"] if kind == "log_call" else -0.5 * extras["k0"]
        price = disc * (lead + a / (2.0 * math.pi) * total)
    elif kind == "log_contract":
        price = disc * extras["k0"]
        ev, zr = 0, 0
    elif kind == "capped_cash_call":
        tot_lo, _, ev1, zr1 = _cash_sum(extras["k0_lo"], z, log_q, rank)
        tot_hi, _, ev2, zr2 = _cash_sum(extras["k0_hi"], z, log_q, rank)
        price = base * (tot_lo - tot_hi)
        ev, zr = ev1 + ev2, zr1 + zr2
    elif kind == "outside_cash_call":
        tot_lo, _, ev1, zr1 = _cash_sum(extras["k0_lo"], z, log_q, rank)
        tot_hi, _, ev2, zr2 = _cash_sum(extras["k0_hi"], z, log_q, rank)
        price = disc - base * (tot_lo - tot_hi)
        ev, zr = ev1 + ev2, zr1 + zr2
    else:  # pragma: no cover
        raise DomainError(f"unhandled payoff kind {kind!r}")

    bound, heuristic = _error_bound(
        params, context, payoff, gate, gate.ratio, eps, rank, eps_driven, symmetric=True
    )
    return SeriesResult(price, rank, ev, zr, bound, gate, heuristic)


def _log_series_sum(k0, z, log_q, rank, d, tau, a):
    """Series part of the log-option price (common to call and put)."""
    n = np.arange(rank + 1)
    lfact = np.array([math.lgamma(i + 1.0) for i in range(rank + 1)])
    lad = log_bessel_k_scaled_int(z, rank)
    log_2q = math.log(2.0 * d * tau / a)
    if k0 == 0.0:
        sgn_pow = np.zeros(rank + 1)
        sgn_pow[0] = 1.0
        log_pow = np.zeros(rank + 1)
    else:
        sgn_pow = np.ones(rank + 1)
        log_pow = 2.0 * n * math.log(abs(k0))
    # (-1)^(n-1) * sign(2n-1): +1 at n = 0 and odd n, -1 at even n >= 2
    sign = np.where(n == 0, 1.0, np.where(n % 2 == 1, 1.0, -1.0))
    logt = log_pow - lfact - np.log(np.abs(2.0 * n - 1.0)) + lad[n] + (1.0 - n) * log_2q
    terms = sign * sgn_pow * np.exp(np.where(sgn_pow == 0.0, -np.inf, logt))
    zeros = int(np.count_nonzero(sgn_pow == 0.0))
    return _kernels.kahan_sum(terms), terms.size - zeros, zeros


def price_asym(
    params: NigParams,
    context: MarketContext,
    payoff: PayoffSpec,
    eps: float = 1e-10,
    rank: int | None = None,
    override_gate: bool = False,
    adaptive: bool | None = None,
) -> SeriesResult:
    """Price digital/European calls in the asymmetric model (any beta).

    When the rank is eps-driven, the initial rank follows the symmetric
    rank rule and is then doubled until the outermost hyper-shell's raw
    term sum drops below eps (certified truncation); an explicit ``rank``
    disables the extension unless ``adaptive=True`` is forced.
    """
    if payoff.kind not in ASYM_PAYOFF_KINDS:
        raise DomainError(f"asymmetric pricer supports {ASYM_PAYOFF_KINDS}, got {payoff.kind!r}")
    if adaptive is None:
        adaptive = rank is None
    eps_driven = rank is None
    gate, rank, extras = _gate_and_rank(params, context, payoff, eps, rank, override_gate)
    kind = payoff.kind
    a, b, d, tau = params.alpha, params.beta, params.delta, context.tau
    z = a * d * tau
    log_q = math.log(d * tau / (2.0 * a))
    base = a * math.exp((params.gamma_sym - a) * d * tau - context.rate * tau) / math.sqrt(math.pi)
    k0 = extras["k0"]
    n3_start = 1 if kind == "european_call" else 0
    cash = kind == "cash_or_nothing_call"

    converged = not adaptive
    while True:
        bins, ev, zr = _asym_grid(k0, b, z, log_q, rank, 0 if cash else n3_start, not cash)
        if not adaptive:
            break
        tail = max(abs(bins[-1]), abs(bins[-2])) if bins.size >= 2 else abs(bins[-1])
        if tail == 0.0 or math.log(tail) < math.log(eps) + z:
            converged = True
            break
        if rank >= _MAX_ADAPTIVE_RANK:
            converged = False
            break
        rank = min(2 * rank, _MAX_ADAPTIVE_RANK)

    total = _kernels.kahan_sum(bins)
    price = (context.strike if kind != "cash_or_nothing_call" else 1.0) * base * total
    bound, heuristic = _error_bound(
        params, context, payoff, gate, gate.ratio, eps, rank, eps_driven,
        symmetric=False, converged=converged,
    )
    return SeriesResult(price, rank, ev, zr, bound, gate, heuristic)


def price(
    params: NigParams,
    context: MarketContext,
    payoff: PayoffSpec,
    eps: float = 1e-10,
    rank: int | None = None,
    override_gate: bool = False,
) -> SeriesResult:
    """Dispatch to the symmetric or asymmetric pricer on beta."""
    if params.is_symmetric:
        return price_sym(params, context, payoff, eps=eps, rank=rank, override_gate=override_gate)
    return price_asym(params, context, payoff, eps=eps, rank=rank, override_gate=override_gate)


# ---------------------------------------------------------------------------
# term grid, ATM approximations, implied delta
# ---------------------------------------------------------------------------


def term_grid(
    params: NigParams, context: MarketContext, payoff_kind: str, n_max: int
) -> np.ndarray:
    """Price-scaled series terms on the (n1, n2) grid (symmetric model).

    All three payoffs share the asset-or-nothing scaling K * prefactor, so
    the full grid sums to the asset-or-nothing price, the n2 >= 1 block to
    the European price, and the n2 = 0 column to K times the cash price.
    """
    if params.beta != 0.0:
        raise DomainError("term_grid requires beta = 0")
    if payoff_kind not in ("asset_or_nothing_call", "european_call", "cash_or_nothing_call"):
        raise DomainError(f"term_grid does not support {payoff_kind!r}")
    mny = moneyness(params, context)
    if mny.convergence_ratio >= 1.0:
        raise GateViolationError(mny.convergence_ratio)
    a, d, tau = params.alpha, params.delta, context.tau
    z = a * d * tau
    log_q = math.log(d * tau / (2.0 * a))
    logA, sgnA = _log_pow_over_fact(mny.k0, n_max)
    logG, sgnG = _log_g_table(z, -n_max, n_max, log_q)
    n1 = np.arange(n_max + 1)
    n2 = np.arange(n_max + 1)
    midx = n2[None, :] - n1[:, None] + n_max
    sgn = sgnA[:, None] * sgnG[midx]
    logt = logA[:, None] + logG[midx]
    scale = context.strike * params.alpha * math.exp(-context.rate * tau) / math.sqrt(math.pi)
    grid = scale * sgn * np.exp(np.where(sgn == 0.0, -np.inf, logt))
    if payoff_kind == "european_call":
        return grid[:, 1:]
    if payoff_kind == "cash_or_nothing_call":
        return grid[:, :1]
    return grid


def atmf_approx_call(params: NigParams, context: MarketContext) -> float:
    """Leading-term approximation of the at-the-money-forward European call:
    S e^{-q tau} delta tau e^{z} K_0(z) / pi with z = alpha delta tau."""
    if params.beta != 0.0:
        raise DomainError("ATMF approximation requires beta = 0")
    a, d, tau = params.alpha, params.delta, context.tau
    z = a * d * tau
    k0e = math.exp(log_bessel_k_scaled_int(z, 0)[0])
    return context.spot * math.exp(-context.dividend * tau) * d * tau * k0e / math.pi


@dataclass(frozen=True)
class ImpliedDeltaResult:
    delta: float
    sigma_implied: float
    x_root: float


def implied_delta_atmf(alpha: float, call_price: float, spot: float, tau: float) -> ImpliedDeltaResult:
    """Two-term NIG scale estimate from an ATMF call quote.

    delta = 2 pi alpha / tau (C/S)^2 + 1/(4 alpha tau); also reports the
    first-order implied vol sqrt(2 pi / tau) C/S and the positive root of
    X^2 - alpha sqrt(2 pi) (C/S) X - 1/8 = 0 with X = sqrt(alpha delta tau).
    """
    if min(alpha, call_price, spot, tau) <= 0.0:
        raise DomainError("alpha, call_price, spot and tau must be positive")
    ratio = call_price / spot
    two_pi = 2.0 * math.pi
    delta = two_pi * alpha / tau * ratio * ratio + 1.0 / (4.0 * alpha * tau)
    sigma_implied = math.sqrt(two_pi / tau) * ratio
    x_root = 0.5 * (
        alpha * math.sqrt(two_pi) * ratio + math.sqrt(two_pi * alpha * alpha * ratio * ratio + 0.5)
    )
    return ImpliedDeltaResult(delta=delta, sigma_implied=sigma_implied, x_root=x_root)
