"""European call/put valuation under jump and jump-plus-diffusion dynamics.

The call value is S e^{-q tau} L1(l) - K e^{-r tau} L2(l) where L1/L2 are the
tilted/plain cumulative transforms from :mod:`shotpricer.transform` and l is
the drift-adjusted log-moneyness. Puts are priced through the complement
identities L + (1 - L), which makes put-call parity exact by construction.
The lam = 0 limit is Black-Scholes; sigma = 0 is the pure-jump model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import ndtr

from .errors import DegenerateMaturityError, ParameterError
from .jump_measure import GaussianJumpLaw, varsigma
from .transform import (
    DEFAULT_QUAD,
    Backend,
    CharSpec,
    QuadratureSpec,
    cdf_plain,
    cdf_tilted,
)

__all__ = [
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
    "bs_d1_d2",
]


class OptionKind(str, Enum):
    CALL = "call"
    PUT = "put"


@dataclass(frozen=True)
class OptionTerms:
    """Contract and market terms of a European option."""

    spot: float
    strike: float
    tau: float
    rate: float
    dividend: float
    kind: OptionKind

    def __post_init__(self) -> None:
        if self.spot <= 0.0:
            raise ParameterError(f"spot must be > 0, got {self.spot}")
        if self.strike <= 0.0:
            raise ParameterError(f"strike must be > 0, got {self.strike}")
        if self.tau < 0.0:
            raise ParameterError(f"tau must be >= 0, got {self.tau}")
        object.__setattr__(self, "kind", OptionKind(self.kind))


@dataclass(frozen=True)
class AssetModel:
    """Asset dynamics: jump intensity/law plus an optional diffusive part."""

    lam: float
    law: GaussianJumpLaw
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.lam < 0.0:
            raise ParameterError(f"lam must be >= 0, got {self.lam}")
        if self.sigma < 0.0:
            raise ParameterError(f"sigma must be >= 0, got {self.sigma}")

    def char_spec(self, tau: float) -> CharSpec:
        return CharSpec(tau=tau, lam=self.lam, sigma=self.sigma, law=self.law)


@dataclass(frozen=True)
class PriceResult:
    value: float
    l_used: float
    backend: Backend
    est_error: float


def log_moneyness(terms: OptionTerms) -> float:
    """x = ln(S/K)."""
    return math.log(terms.spot / terms.strike)


def l_parameter(terms: OptionTerms, model: AssetModel) -> float:
    """Drift-adjusted threshold l = x + (r - q - sigma^2/2 - lam varsigma) tau."""
    if terms.tau <= 0.0:
        raise DegenerateMaturityError("l parameter needs tau > 0")
    drift = (
        terms.rate
        - terms.dividend
        - 0.5 * model.sigma**2
        - model.lam * varsigma(model.law)
    )
    return log_moneyness(terms) + drift * terms.tau


def payoff(terms: OptionTerms) -> float:
    """Terminal payoff max(S-K, 0) for a call, max(K-S, 0) for a put."""
    if terms.kind is OptionKind.CALL:
        return max(terms.spot - terms.strike, 0.0)
    return max(terms.strike - terms.spot, 0.0)


def price(
    terms: OptionTerms,
    model: AssetModel,
    backend: Backend = Backend.SERIES,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> PriceResult:
    """Value a European option under the jump(+diffusion) dynamics.

    Special cases: tau = 0 returns the payoff; a fully deterministic model
    (lam = 0 and sigma = 0) returns the discounted payoff of the forward.
    For sigma = 0 the transition law has an atom, and pricing exactly at the
    kink l = 0 is defined as the right limit.
    """
    backend = Backend(backend)
    if terms.tau == 0.0:
        return PriceResult(payoff(terms), math.nan, backend, 0.0)

    disc_spot = terms.spot * math.exp(-terms.dividend * terms.tau)
    disc_strike = terms.strike * math.exp(-terms.rate * terms.tau)
    l = l_parameter(terms, model)

    if model.lam == 0.0 and model.sigma == 0.0:
        fwd_gap = disc_spot - disc_strike
        value = max(fwd_gap, 0.0) if terms.kind is OptionKind.CALL else max(-fwd_gap, 0.0)
        return PriceResult(value, l, backend, 0.0)

    l_eval = l
    if model.sigma == 0.0 and l == 0.0:
        l_eval = math.nextafter(0.0, math.inf)  # right limit at the atom

    spec = model.char_spec(terms.tau)
    tilted = cdf_tilted(spec, l_eval, backend, quad)
    plain = cdf_plain(spec, l_eval, backend, quad)
    if terms.kind is OptionKind.CALL:
        value = disc_spot * tilted - disc_strike * plain
    else:
        value = disc_strike * (1.0 - plain) - disc_spot * (1.0 - tilted)
    est = _price_error_estimate(terms, quad, backend)
    return PriceResult(max(value, 0.0), l, backend, est)


def _price_error_estimate(terms: OptionTerms, quad: QuadratureSpec, backend: Backend) -> float:
    tail = min(quad.rel_tol, 1e-9) / 10.0 if backend is Backend.SERIES else quad.rel_tol
    return (terms.spot + terms.strike) * tail


def bs_d1_d2(terms: OptionTerms, sigma: float) -> tuple[float, float]:
    """Black-Scholes d1 and d2 = d1 - sigma sqrt(tau)."""
    if sigma <= 0.0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    if terms.tau <= 0.0:
        raise DegenerateMaturityError("d1/d2 need tau > 0")
    vol_sqrt_t = sigma * math.sqrt(terms.tau)
    d1 = (
        log_moneyness(terms)
        + (terms.rate - terms.dividend + 0.5 * sigma * sigma) * terms.tau
    ) / vol_sqrt_t
    return d1, d1 - vol_sqrt_t


def bs_price(terms: OptionTerms, sigma: float) -> PriceResult:
    """Closed-form Black-Scholes value (the lam = 0 reduction)."""
    d1, d2 = bs_d1_d2(terms, sigma)
    disc_spot = terms.spot * math.exp(-terms.dividend * terms.tau)
    disc_strike = terms.strike * math.exp(-terms.rate * terms.tau)
    if terms.kind is OptionKind.CALL:
        value = disc_spot * ndtr(d1) - disc_strike * ndtr(d2)
    else:
        value = disc_strike * ndtr(-d2) - disc_spot * ndtr(-d1)
    l_used = d2 * sigma * math.sqrt(terms.tau)
    return PriceResult(max(value, 0.0), l_used, Backend.SERIES, 0.0)


def parity_residual(
    terms: OptionTerms,
    model: AssetModel,
    backend: Backend = Backend.SERIES,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """C - P - (S e^{-q tau} - K e^{-r tau}); zero up to numerical error."""
    if terms.tau <= 0.0:
        raise DegenerateMaturityError("parity residual needs tau > 0")
    call = price(_with_kind(terms, OptionKind.CALL), model, backend, quad).value
    put = price(_with_kind(terms, OptionKind.PUT), model, backend, quad).value
    forward_gap = terms.spot * math.exp(-terms.dividend * terms.tau) - terms.strike * math.exp(
        -terms.rate * terms.tau
    )
    return call - put - forward_gap


def _with_kind(terms: OptionTerms, kind: OptionKind) -> OptionTerms:
    return OptionTerms(
        spot=terms.spot,
        strike=terms.strike,
        tau=terms.tau,
        rate=terms.rate,
        dividend=terms.dividend,
        kind=kind,
    )
