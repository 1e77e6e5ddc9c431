"""Exponential NIG model: parameters, characteristic functions, density,
Levy triplet, moneyness quantities, sampling, and the fast-reversion
Heston mapping.

Value types are frozen dataclasses and every operation is a pure function,
so everything here is safe to share across threads.
"""

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from ._quad import adaptive_quad
from .errors import AdmissibilityError, ConfigError, DomainError
from .specialfn import bessel_k1_scaled_array


@dataclass(frozen=True)
class NigParams:
    """Model quadruple (alpha, beta, delta, mu); validated on construction."""

    alpha: float
    beta: float = 0.0
    delta: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        validate(self)

    @property
    def gamma_sym(self) -> float:
        """gamma = sqrt(alpha^2 - beta^2)."""
        return math.sqrt(self.alpha**2 - self.beta**2)

    @property
    def is_symmetric(self) -> bool:
        return self.beta == 0.0


def validate(params: NigParams) -> None:
    """Raise :class:`AdmissibilityError` naming the violated constraint."""
    if not params.alpha > 0.0:
        raise AdmissibilityError(f"alpha must be positive (got {params.alpha!r})")
    if not params.delta > 0.0:
        raise AdmissibilityError(f"delta must be positive (got {params.delta!r})")
    if not params.beta > -params.alpha:
        raise AdmissibilityError(
            f"beta must exceed -alpha (beta={params.beta!r}, alpha={params.alpha!r})"
        )
    if not params.beta < params.alpha - 1.0:
        raise AdmissibilityError(
            f"beta must be below alpha - 1 (beta={params.beta!r}, alpha={params.alpha!r})"
        )


@dataclass(frozen=True)
class MarketContext:
    """Spot, strike(s), rates and maturity for one pricing request.

    ``strike2`` is the trigger level for gap payoffs and the cap for capped
    payoffs; ``power`` is the exponent of power payoffs (1 otherwise).
    """

    spot: float
    strike: float
    rate: float
    tau: float
    dividend: float = 0.0
    strike2: float | None = None
    power: float = 1.0

    def __post_init__(self):
        if not self.spot > 0.0:
            raise AdmissibilityError(f"spot must be positive (got {self.spot!r})")
        if not self.strike > 0.0:
            raise AdmissibilityError(f"strike must be positive (got {self.strike!r})")
        if not self.tau > 0.0:
            raise AdmissibilityError(f"tau must be positive (got {self.tau!r})")
        if not self.power > 0.0:
            raise AdmissibilityError(f"power must be positive (got {self.power!r})")
        if self.strike2 is not None and not self.strike2 > 0.0:
            raise AdmissibilityError(f"strike2 must be positive (got {self.strike2!r})")

    def with_strike(self, strike: float) -> "MarketContext":
        return replace(self, strike=strike)


@dataclass(frozen=True)
class Moneyness:
    """Derived pricing quantities for one (params, context) pair."""

    omega: float
    gamma_sym: float
    forward_strike: float
    k: float
    k0: float
    k0a: float
    convergence_ratio: float


@dataclass(frozen=True)
class GateResult:
    satisfied: bool
    ratio: float


@dataclass(frozen=True)
class MaturityCondition:
    """Maturity restriction implied by the series convergence condition."""

    case: str  # "itm" | "otm" | "atm"
    rho_plus: float
    rho_minus: float
    satisfied: bool
    rule: str


@dataclass(frozen=True)
class SamplePath:
    increments: np.ndarray
    seed: int
    dt: float


# ---------------------------------------------------------------------------
# characteristic function machinery
# ---------------------------------------------------------------------------


def _omega_drift_free(params: NigParams) -> float:
    """The mu-independent part of the martingale adjustment."""
    a, b, d = params.alpha, params.beta, params.delta
    return d * (math.sqrt(a * a - (b + 1.0) ** 2) - math.sqrt(a * a - b * b))


def martingale_adjustment(params: NigParams) -> float:
    """omega = -mu + delta (sqrt(alpha^2-(beta+1)^2) - sqrt(alpha^2-beta^2))."""
    return -params.mu + _omega_drift_free(params)


def levy_symbol(params: NigParams, u: complex) -> complex:
    """Characteristic exponent psi(u), principal branch.

    Valid on the strip where alpha^2 - (beta+iu)^2 keeps a positive real
    part; leaving it raises :class:`DomainError`.
    """
    u = complex(u)
    a, b, d = params.alpha, params.beta, params.delta
    w = a * a - (b + 1j * u) ** 2
    if w.real <= 0.0:
        raise DomainError(
            f"levy_symbol: u={u} leaves the admissible strip (Re(alpha^2-(beta+iu)^2) <= 0)"
        )
    return 1j * params.mu * u - d * (cmath.sqrt(w) - math.sqrt(a * a - b * b))


def characteristic(
    params: NigParams,
    u: complex,
    t: float,
    normalization: str = "raw",
    context: MarketContext | None = None,
) -> complex:
    """Characteristic function e^{t psi(u)} under one of three normalizations.

    ``raw`` is the plain transform; ``lewis`` multiplies by e^{i u omega t}
    so the martingale condition Psi_L(-i, t) = 1 holds; ``carr_madan``
    additionally carries the forward log-spot phase and needs ``context``.
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    base = cmath.exp(t * levy_symbol(params, u))
    if normalization == "raw":
        return base
    omega = martingale_adjustment(params)
    if normalization == "lewis":
        return cmath.exp(1j * u * omega * t) * base
    if normalization == "carr_madan":
        if context is None:
            raise DomainError("carr_madan normalization requires a MarketContext")
        phase = math.log(context.spot) + (context.rate - context.dividend + omega) * t
        return cmath.exp(1j * u * phase) * base
    raise DomainError(f"unknown normalization {normalization!r}")


# ---------------------------------------------------------------------------
# density, Levy measure, triplet
# ---------------------------------------------------------------------------


def density(params: NigParams, x, t: float):
    """Transition density of the process at time t, vectorized over x.

    The Bessel kernel is evaluated in scaled form with the exponent folded
    into a single exp, so deep tails underflow gracefully instead of
    producing inf * 0.
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    x = np.asarray(x, dtype=float)
    a, b, d, m = params.alpha, params.beta, params.delta, params.mu
    dt = d * t
    centered = x - m * t
    radius = np.hypot(dt, centered)
    expo = dt * params.gamma_sym + b * centered - a * radius
    out = (a * dt / math.pi) * np.exp(expo) * bessel_k1_scaled_array(a * radius) / radius
    return out if out.ndim else float(out)


def levy_measure_density(params: NigParams, x):
    """Levy measure density (alpha delta / pi) e^{beta x} K_1(alpha|x|)/|x|."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise DomainError("Levy measure density is singular at x = 0")
    a, b, d = params.alpha, params.beta, params.delta
    ax = np.abs(x)
    out = (a * d / math.pi) * np.exp(b * x - a * ax) * bessel_k1_scaled_array(a * ax) / ax
    return out if out.ndim else float(out)


def triplet_drift(params: NigParams, abs_tol: float = 1e-10) -> float:
    """Drift term of the Levy-Khintchine triplet (truncation |x| < 1).

    a = mu + (2 alpha delta / pi) * int_0^1 sinh(beta x) K_1(alpha x) dx,
    the integral evaluated by adaptive quadrature to ``abs_tol``.
    """
    a, b, d = params.alpha, params.beta, params.delta

    def integrand(x):
        return np.sinh(b * x) * np.exp(-a * x) * bessel_k1_scaled_array(a * x)

    val, _, _ = adaptive_quad(integrand, 0.0, 1.0, abs_tol=abs_tol)
    return params.mu + (2.0 * a * d / math.pi) * val


# ---------------------------------------------------------------------------
# moneyness and convergence domain
# ---------------------------------------------------------------------------


def moneyness(params: NigParams, context: MarketContext) -> Moneyness:
    """Forward strike, log-forward moneyness and friends.

    k0 is assembled from the mu-free part of omega, so it is bit-identical
    across params that differ only in mu.
    """
    r, q, tau = context.rate, context.dividend, context.tau
    w0 = _omega_drift_free(params)
    k0 = math.log(context.spot / context.strike) + (r - q + w0) * tau
    k0a = (
        math.log(context.spot / context.strike ** (1.0 / context.power)) + (r - q + w0) * tau
    )
    return Moneyness(
        omega=-params.mu + w0,
        gamma_sym=params.gamma_sym,
        forward_strike=context.strike * math.exp(-(r - q) * tau),
        k=k0 - params.mu * tau,
        k0=k0,
        k0a=k0a,
        convergence_ratio=abs(k0) / (params.delta * tau),
    )


def convergence_gate(params: NigParams, context: MarketContext) -> GateResult:
    """Series convergence condition |k0| / (delta tau) < 1."""
    ratio = moneyness(params, context).convergence_ratio
    return GateResult(satisfied=ratio < 1.0, ratio=ratio)


def accessible_maturities(params: NigParams, context: MarketContext) -> MaturityCondition:
    """Maturity window on which the convergence condition holds (mu taken 0).

    rho_+- = log(S/K) / (+-delta - r + q - omega); in the money the gate
    holds for tau > rho_+ or tau < rho_-, out of the money for tau > rho_-
    or tau < rho_+; at the money the gate itself decides.
    """
    r, q, tau = context.rate, context.dividend, context.tau
    w0 = _omega_drift_free(params)
    d = params.delta
    log_m = math.log(context.spot / context.strike)
    c = r - q + w0

    def _rho(sign: float) -> float:
        den = sign * d - r + q - w0
        if den == 0.0:
            return math.inf
        return log_m / den

    rho_plus, rho_minus = _rho(1.0), _rho(-1.0)
    # exact gate with mu = 0: -delta tau < log_m + c tau < delta tau
    satisfied = (tau * (d - c) > log_m) and (tau * (d + c) > -log_m)
    if log_m > 0.0:
        case, rule = "itm", "tau > rho_plus or tau < rho_minus"
    elif log_m < 0.0:
        case, rule = "otm", "tau > rho_minus or tau < rho_plus"
    else:
        case, rule = "atm", "per convergence gate"
    return MaturityCondition(case, rho_plus, rho_minus, satisfied, rule)


# ---------------------------------------------------------------------------
# Heston fast-reversion mapping, sampling, variance swap multiplier
# ---------------------------------------------------------------------------


def heston_frh_map(sigma: float, vol_of_vol: float, rho: float) -> NigParams:
    """NIG parameters matching the fast-reversion limit of a Heston model.

    ``sigma`` is the spot-vol scale, ``vol_of_vol`` the CIR volatility
    multiplier, ``rho`` the spot/vol correlation; delta and mu are per unit
    time.
    """
    if not (sigma > 0.0 and vol_of_vol > 0.0):
        raise DomainError("sigma and vol_of_vol must be positive")
    if not abs(rho) < 1.0:
        raise DomainError("rho must lie strictly inside (-1, 1)")
    w = vol_of_vol * sigma
    one_m_rho2 = 1.0 - rho * rho
    alpha = math.sqrt(4.0 - 4.0 * rho * w + w * w) / (2.0 * w * one_m_rho2)
    beta = -(w - 2.0 * rho) / (2.0 * w * one_m_rho2)
    delta = sigma * math.sqrt(one_m_rho2) / vol_of_vol
    mu = -sigma * rho / vol_of_vol
    return NigParams(alpha=alpha, beta=beta, delta=delta, mu=mu)


def sample_increments(params: NigParams, dt: float, count: int, seed: int) -> SamplePath:
    """i.i.d. draws from NIG(alpha, beta, delta dt, mu dt).

    Normal variance-mean mixture: V ~ inverse Gaussian with mean
    delta dt / gamma and shape (delta dt)^2 (numpy's Wald sampler, i.e. the
    Michael-Schucany-Haas construction), then X = mu dt + beta V + sqrt(V) Z.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    if count < 1:
        raise DomainError("count must be >= 1")
    rng = np.random.default_rng(seed)
    d_t = params.delta * dt
    mixing = rng.wald(d_t / params.gamma_sym, d_t * d_t, size=count)
    z = rng.standard_normal(count)
    x = params.mu * dt + params.beta * mixing + np.sqrt(mixing) * z
    return SamplePath(increments=x, seed=seed, dt=dt)


def variance_swap_multiplier(params) -> float:
    """Log-contract to variance-swap multiplier 1/(alpha(alpha-sqrt(alpha^2-1))).

    Defined for the symmetric model; accepts a NigParams with beta = 0 or a
    bare alpha.  Tends to 2 in the large-steepness limit.
    """
    if isinstance(params, NigParams):
        if params.beta != 0.0:
            raise DomainError("variance swap multiplier requires beta = 0")
        alpha = params.alpha
    else:
        alpha = float(params)
    if alpha < 1.0:
        raise DomainError("alpha must be >= 1")
    return 1.0 / (alpha * (alpha - math.sqrt(alpha * alpha - 1.0)))


# ---------------------------------------------------------------------------
# flat key-value serialization (exact decimal round-trip)
# ---------------------------------------------------------------------------

KV_KEYS = (
    "alpha",
    "beta",
    "delta",
    "mu",
    "spot",
    "strike",
    "strike2",
    "power",
    "rate",
    "dividend",
    "tau",
)


def parse_kv_text(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in KV_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = float(value.strip())
        except ValueError:
            raise ConfigError(f"line {lineno}: bad numeric value {value.strip()!r}") from None
    return out


def format_kv(mapping: dict[str, float]) -> str:
    """Serialize with repr so that text -> float -> text round-trips exactly."""
    lines = [f"{k} = {repr(float(v))}" for k, v in mapping.items()]
    return "\n".join(lines) + "\n"


def params_from_kv(kv: dict[str, float]) -> NigParams:
    try:
        alpha = kv["alpha"]
        delta = kv["delta"]
    except KeyError as exc:
        raise ConfigError(f"missing model key {exc.args[0]!r}") from None
    return NigParams(alpha=alpha, beta=kv.get("beta", 0.0), delta=delta, mu=kv.get("mu", 0.0))


def params_to_kv(params: NigParams) -> dict[str, float]:
    return {"alpha": params.alpha, "beta": params.beta, "delta": params.delta, "mu": params.mu}


def market_from_kv(kv: dict[str, float]) -> MarketContext:
    try:
        spot = kv["spot"]
        strike = kv["strike"]
        tau = kv["tau"]
    except KeyError as exc:
        raise ConfigError(f"missing market key {exc.args[0]!r}") from None
    strike2 = kv.get("strike2")
    return MarketContext(
        spot=spot,
        strike=strike,
        rate=kv.get("rate", 0.0),
        tau=tau,
        dividend=kv.get("dividend", 0.0),
        strike2=strike2 if strike2 is None else float(strike2),
        power=kv.get("power", 1.0),
    )


def market_to_kv(context: MarketContext) -> dict[str, float]:
    out = {
        "spot": context.spot,
        "strike": context.strike,
        "rate": context.rate,
        "dividend": context.dividend,
        "tau": context.tau,
        "power": context.power,
    }
    if context.strike2 is not None:
        out["strike2"] = context.strike2
    return out
