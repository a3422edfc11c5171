"""Option and bond pricing under shot-noise jump dynamics.

Closed-form/series valuation of European options and zero-coupon bonds when
prices or rates are driven by compound-Poisson jumps, optionally superposed
with a Brownian part; includes analytic Greeks, jump-parameter Greeks,
Fourier cross-validation, exact Monte Carlo oracles, and the diffusion-limit
reductions to Black-Scholes and the Gaussian short-rate model.
"""

from .jump_measure import (
    ArrivalRate,
    ForceStatistics,
    GaussianJumpLaw,
    diffusion_moments,
    force_statistics,
    varsigma,
    xi,
)
from .montecarlo import (
    McEstimate,
    RatePathSample,
    SimConfig,
    mc_bond_price,
    mc_option_price,
    mc_rate_moments,
)
from .options import (
    AssetModel,
    OptionKind,
    OptionTerms,
    PriceResult,
    bs_price,
    l_parameter,
    log_moneyness,
    parity_residual,
    payoff,
    price,
)
from .greeks import (
    GreekSet,
    NewGreekSet,
    bs_greeks,
    common_greeks,
    delta_jump,
    fd_sensitivity,
    identity_report,
    new_greeks,
)
from .shortrate import (
    BondTerms,
    BondVariant,
    RateModel,
    a_general,
    a_shot,
    a_vasicek,
    b_factor,
    bond_price,
    conditional_moments,
    ode_residual,
    zero_yield,
)
from .transform import (
    Backend,
    CharSpec,
    QuadratureSpec,
    cdf_plain,
    cdf_tilted,
    char_function,
    green_density,
    poisson_weights,
    survival_plain,
    survival_tilted,
)
from .validation import (
    ConvergenceRow,
    DiffusionStudy,
    ResidualReport,
    backend_agreement,
    bond_pide_residual,
    diffusion_convergence,
    option_pide_residual,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ArrivalRate",
    "ForceStatistics",
    "GaussianJumpLaw",
    "diffusion_moments",
    "force_statistics",
    "varsigma",
    "xi",
    "Backend",
    "CharSpec",
    "QuadratureSpec",
    "char_function",
    "poisson_weights",
    "cdf_plain",
    "cdf_tilted",
    "survival_plain",
    "survival_tilted",
    "green_density",
    "OptionKind",
    "OptionTerms",
    "AssetModel",
    "PriceResult",
    "log_moneyness",
    "l_parameter",
    "price",
    "bs_price",
    "parity_residual",
    "payoff",
    "GreekSet",
    "NewGreekSet",
    "common_greeks",
    "new_greeks",
    "bs_greeks",
    "fd_sensitivity",
    "identity_report",
    "delta_jump",
    "RateModel",
    "BondTerms",
    "BondVariant",
    "b_factor",
    "a_shot",
    "a_vasicek",
    "a_general",
    "bond_price",
    "conditional_moments",
    "ode_residual",
    "zero_yield",
    "SimConfig",
    "McEstimate",
    "RatePathSample",
    "mc_option_price",
    "mc_bond_price",
    "mc_rate_moments",
    "ResidualReport",
    "DiffusionStudy",
    "ConvergenceRow",
    "option_pide_residual",
    "bond_pide_residual",
    "diffusion_convergence",
    "backend_agreement",
]
