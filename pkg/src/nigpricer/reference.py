"""Independent reference pricers: Lewis digital integrals, the damped
Carr-Madan integral, an FFT strike-grid pricer, and Monte Carlo estimators.

These deliberately avoid the residue-series machinery so that series and
reference values cross-validate each other.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._quad import adaptive_quad, gk_panel
from .errors import DomainError, QuadratureError
from .model import MarketContext, NigParams, martingale_adjustment, sample_increments

_U_EPS = 1e-8  # below this the Lewis integrand is replaced by its u -> 0 limit


@dataclass(frozen=True)
class QuadratureConfig:
    upper_bound: float = 1e4
    abs_tol: float = 1e-10
    max_subdivisions: int = 20000

    def __post_init__(self):
        if not self.upper_bound > 0.0:
            raise DomainError("upper_bound must be positive")
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")


@dataclass(frozen=True)
class FftConfig:
    """Carr-Madan FFT grid: N points spaced eta in frequency, giving log
    strikes kappa_v = -lambda N/2 + lambda (v-1) with lambda = 2 pi/(N eta)."""

    n_points: int = 4096
    eta: float = 0.25
    damping: float | None = None

    def __post_init__(self):
        if self.n_points < 4:
            raise DomainError("n_points must be >= 4")
        if not self.eta > 0.0:
            raise DomainError("eta must be positive")

    @property
    def lam(self) -> float:
        return 2.0 * math.pi / (self.n_points * self.eta)


@dataclass(frozen=True)
class McResult:
    estimate: float
    std_error: float
    ci95_halfwidth: float
    paths: int
    seed: int


def default_damping(params: NigParams) -> float:
    """a = min(1.5, (alpha - beta - 1)/2), inside the admissible (0, alpha-beta-1)."""
    return min(1.5, 0.5 * (params.alpha - params.beta - 1.0))


# ---------------------------------------------------------------------------
# characteristic-function helpers (vectorized over real u)
# ---------------------------------------------------------------------------


def _psi_shifted(params: NigParams, u: np.ndarray, shift: complex) -> np.ndarray:
    """psi(u + shift) for real-array u, principal branch."""
    a, b, d, m = params.alpha, params.beta, params.delta, params.mu
    arg = b + 1j * (u + shift)
    w = a * a - arg * arg
    if np.any(w.real <= 0.0):
        raise DomainError("characteristic argument leaves the admissible strip")
    return 1j * m * (u + shift) - d * (np.sqrt(w) - math.sqrt(a * a - b * b))


def _lewis_cf(params: NigParams, u: np.ndarray, tau: float, shift: complex, omega: float):
    return np.exp(1j * (u + shift) * omega * tau + tau * _psi_shifted(params, u, shift))


# ---------------------------------------------------------------------------
# Lewis digital options
# ---------------------------------------------------------------------------


def lewis_digital(
    params: NigParams,
    context: MarketContext,
    kind: str = "cash",
    cfg: QuadratureConfig | None = None,
) -> float:
    """Digital option price by the half-line Fourier representation.

    asset: S e^{-q tau} (1/2 + (1/pi) int Re[e^{iuk} Psi_L(u-i)/(iu)] du)
    cash:  e^{-r tau}   (1/2 + (1/pi) int Re[e^{iuk} Psi_L(u)/(iu)] du)
    with k = log(S/K) + (r-q) tau (not the omega-shifted series variable).
    """
    if kind not in ("asset", "cash"):
        raise DomainError("kind must be 'asset' or 'cash'")
    cfg = cfg or QuadratureConfig()
    r, q, tau = context.rate, context.dividend, context.tau
    k = math.log(context.spot / context.strike) + (r - q) * tau
    omega = martingale_adjustment(params)
    shift = -1j if kind == "asset" else 0.0
    a, b, d = params.alpha, params.beta, params.delta
    gamma = params.gamma_sym

    # u -> 0 limit of Re[e^{iuk} Psi_L(u+shift)/(iu)]
    if kind == "cash":
        limit0 = k + (omega + params.mu + d * b / gamma) * tau
    else:
        bp1 = b + 1.0
        limit0 = k + (omega + params.mu) * tau + d * tau * bp1 / math.sqrt(a * a - bp1 * bp1)

    def integrand(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.full(u.shape, limit0)
        big = u >= _U_EPS
        ub = u[big]
        vals = np.exp(1j * ub * k) * _lewis_cf(params, ub, tau, shift, omega) / (1j * ub)
        out[big] = vals.real
        return out

    val, _, _ = _integrate_with_tail_check(integrand, cfg)
    half_plus = 0.5 + val / math.pi
    if kind == "asset":
        return context.spot * math.exp(-q * tau) * half_plus
    return math.exp(-r * tau) * half_plus


def _integrate_with_tail_check(integrand, cfg: QuadratureConfig):
    val, err, panels = adaptive_quad(
        integrand, 0.0, cfg.upper_bound, abs_tol=cfg.abs_tol, max_subdivisions=cfg.max_subdivisions
    )
    # a posteriori decay check past the truncation point
    tail, _ = gk_panel(integrand, cfg.upper_bound, 2.0 * cfg.upper_bound)
    if abs(tail) > max(cfg.abs_tol, 1e3 * err):
        raise QuadratureError(
            f"integrand has not decayed at the truncation bound (tail ~ {tail:.3g})"
        )
    return val, err, panels


# ---------------------------------------------------------------------------
# Carr-Madan damped integral and FFT grid
# ---------------------------------------------------------------------------


def _carr_madan_integrand(params, context, damping, lk):
    # damped-transform prefactor folded in, so the integral is the call
    # price itself and abs_tol is meaningful in price units
    tau = context.tau
    omega = martingale_adjustment(params)
    phase = math.log(context.spot) + (context.rate - context.dividend + omega) * tau
    shift = -1j * (damping + 1.0)
    scale = math.exp(-damping * lk - context.rate * tau) / math.pi

    def integrand(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        cf = np.exp(1j * (u + shift) * phase + tau * _psi_shifted(params, u, shift))
        den = damping * damping + damping - u * u + 1j * (2.0 * damping + 1.0) * u
        return scale * (np.exp(-1j * u * lk) * cf / den).real

    return integrand


def carr_madan_integral(
    params: NigParams,
    context: MarketContext,
    damping: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """European call by the damped half-line Fourier integral.

    Requires 0 < damping < alpha - beta - 1 so the damped transform is
    finite; defaults to :func:`default_damping`.  ``cfg.abs_tol`` applies
    to the discounted price.
    """
    cfg = cfg or QuadratureConfig()
    a = default_damping(params) if damping is None else damping
    if not 0.0 < a < params.alpha - params.beta - 1.0:
        raise DomainError(
            f"damping must lie in (0, alpha-beta-1) = (0, {params.alpha - params.beta - 1.0:g})"
        )
    integrand = _carr_madan_integrand(params, context, a, math.log(context.strike))
    val, _, _ = _integrate_with_tail_check(integrand, cfg)
    return val


def fft_strike_grid(
    params: NigParams,
    context: MarketContext,
    cfg: FftConfig | None = None,
    window: tuple[float, float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """European call prices on the Carr-Madan log-strike grid via one FFT.

    Returns (strikes, prices); ``window`` restricts to strikes inside
    [lo, hi].  Simpson weights (eta/3)(3 + (-1)^j - delta_{j1}) are applied
    to the frequency samples.
    """
    cfg = cfg or FftConfig()
    n = cfg.n_points
    a = default_damping(params) if cfg.damping is None else cfg.damping
    if not 0.0 < a < params.alpha - params.beta - 1.0:
        raise DomainError("damping outside the admissible range")
    tau = context.tau
    omega = martingale_adjustment(params)
    phase = math.log(context.spot) + (context.rate - context.dividend + omega) * tau
    shift = -1j * (a + 1.0)

    j = np.arange(n)
    u = cfg.eta * j
    cf = np.exp(1j * (u + shift) * phase + tau * _psi_shifted(params, u, shift))
    den = a * a + a - u * u + 1j * (2.0 * a + 1.0) * u
    x = cf / den
    simpson = (cfg.eta / 3.0) * (3.0 + (-1.0) ** (j + 1))
    simpson[0] = cfg.eta / 3.0
    # phase factor e^{i b u_j} with b = lambda N / 2 places strikes on
    # [-lambda N/2, lambda N/2 - lambda]
    b = 0.5 * cfg.lam * n
    y = np.exp(1j * b * u) * x * simpson
    transform = np.fft.fft(y)
    kappa = -b + cfg.lam * j
    prices = np.exp(-a * kappa - context.rate * tau) / math.pi * transform.real
    strikes = np.exp(kappa)
    if window is not None:
        lo, hi = window
        keep = (strikes >= lo) & (strikes <= hi)
        return strikes[keep], prices[keep]
    return strikes, prices


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

MC_PAYOFFS = (
    "european_call",
    "cash_or_nothing_call",
    "log_call",
    "power_european_call",
    "capped_cash_call",
)


def mc_price(
    params: NigParams,
    context: MarketContext,
    payoff_kind: str,
    paths: int,
    seed: int,
) -> McResult:
    """Monte Carlo price from exact terminal draws (no discretization).

    S_T = S e^{(r-q+omega) tau + X_tau} with X_tau sampled in one step;
    ci95_halfwidth = 1.96 * std_error by construction.
    """
    if payoff_kind not in MC_PAYOFFS:
        raise DomainError(f"mc_price supports {MC_PAYOFFS}, got {payoff_kind!r}")
    if paths < 2:
        raise DomainError("paths must be >= 2")
    r, q, tau = context.rate, context.dividend, context.tau
    omega = martingale_adjustment(params)
    x = sample_increments(params, tau, paths, seed).increments
    log_st = math.log(context.spot) + (r - q + omega) * tau + x
    disc = math.exp(-r * tau)
    k = context.strike
    if payoff_kind == "european_call":
        vals = np.maximum(np.exp(log_st) - k, 0.0)
    elif payoff_kind == "cash_or_nothing_call":
        vals = (log_st > math.log(k)).astype(float)
    elif payoff_kind == "log_call":
        vals = np.maximum(log_st - math.log(k), 0.0)
    elif payoff_kind == "power_european_call":
        vals = np.maximum(np.exp(context.power * log_st) - k, 0.0)
    else:  # capped_cash_call
        if context.strike2 is None or not context.strike < context.strike2:
            raise DomainError("capped payoff needs strike < strike2")
        vals = ((log_st > math.log(k)) & (log_st < math.log(context.strike2))).astype(float)
    vals = disc * vals
    estimate = float(vals.mean())
    std_error = float(vals.std(ddof=1) / math.sqrt(paths))
    return McResult(
        estimate=estimate,
        std_error=std_error,
        ci95_halfwidth=1.96 * std_error,
        paths=paths,
        seed=seed,
    )
