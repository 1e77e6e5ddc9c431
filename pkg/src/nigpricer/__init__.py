"""Option pricing in the exponential normal-inverse-Gaussian model.

Closed-form residue-series pricers for path-independent payoffs, with
three independent reference methods (Lewis digital integrals, Carr-Madan
damped integral / FFT, Monte Carlo) for cross-validation.
"""

from ._backend import backend_name
from .errors import (
    AdmissibilityError,
    ConfigError,
    DomainError,
    GateViolationError,
    NigError,
    PoleError,
    QuadratureError,
)
from .model import (
    GateResult,
    MarketContext,
    MaturityCondition,
    Moneyness,
    NigParams,
    SamplePath,
    accessible_maturities,
    characteristic,
    convergence_gate,
    density,
    heston_frh_map,
    levy_measure_density,
    levy_symbol,
    martingale_adjustment,
    moneyness,
    sample_increments,
    triplet_drift,
    validate,
    variance_swap_multiplier,
)
from .reference import (
    FftConfig,
    McResult,
    QuadratureConfig,
    carr_madan_integral,
    default_damping,
    fft_strike_grid,
    lewis_digital,
    mc_price,
)
from .series import (
    ASYM_PAYOFF_KINDS,
    PAYOFF_KINDS,
    ImpliedDeltaResult,
    PayoffSpec,
    SeriesResult,
    atmf_approx_call,
    implied_delta_atmf,
    price,
    price_asym,
    price_sym,
    term_grid,
    truncation_rank,
)
from .specialfn import (
    bessel_k_scaled,
    gamma,
    hankel_coefficients,
    pochhammer,
    recip_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "ASYM_PAYOFF_KINDS",
    "ConfigError",
    "DomainError",
    "FftConfig",
    "GateResult",
    "GateViolationError",
    "ImpliedDeltaResult",
    "MarketContext",
    "MaturityCondition",
    "McResult",
    "Moneyness",
    "NigError",
    "NigParams",
    "PAYOFF_KINDS",
    "PayoffSpec",
    "PoleError",
    "QuadratureConfig",
    "QuadratureError",
    "SamplePath",
    "SeriesResult",
    "accessible_maturities",
    "atmf_approx_call",
    "backend_name",
    "bessel_k_scaled",
    "carr_madan_integral",
    "characteristic",
    "convergence_gate",
    "default_damping",
    "density",
    "fft_strike_grid",
    "gamma",
    "hankel_coefficients",
    "heston_frh_map",
    "implied_delta_atmf",
    "levy_measure_density",
    "levy_symbol",
    "lewis_digital",
    "martingale_adjustment",
    "mc_price",
    "moneyness",
    "pochhammer",
    "price",
    "price_asym",
    "price_sym",
    "recip_gamma",
    "sample_increments",
    "term_grid",
    "triplet_drift",
    "truncation_rank",
    "validate",
    "variance_swap_multiplier",
]
