"""Residual verification of the governing equations and limit reductions.

The pricing formulas elsewhere in the package are solutions of
integro-differential equations; this module re-derives those equations
numerically (plain central differences in time/state, Gauss-Hermite for the
jump expectation, both second-order) and reports normalized residuals. It
also runs the high-intensity scaling study that collapses the jump models
onto their Gaussian limits, and the series-vs-Fourier cross-check of all
eight cumulative transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._quad import gauss_hermite, gauss_legendre
from .errors import ParameterError
from .greeks import bs_greeks, common_greeks
from .jump_measure import GaussianJumpLaw
from .options import AssetModel, OptionKind, OptionTerms, bs_price, l_parameter, price
from .shortrate import (
    BondTerms,
    BondVariant,
    RateModel,
    a_shot,
    a_vasicek,
    bond_price,
)
from .transform import (
    DEFAULT_QUAD,
    Backend,
    CharSpec,
    QuadratureSpec,
    cdf_plain,
    cdf_tilted,
    fourier_grid,
    survival_plain,
    survival_tilted,
)

__all__ = [
    "ResidualReport",
    "DiffusionStudy",
    "ConvergenceRow",
    "option_pide_residual",
    "bond_pide_residual",
    "diffusion_convergence",
    "backend_agreement",
    "default_agreement_grid",
]

_NORM_FLOOR = 1e-3


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    grid_points: int
    fd_steps: tuple[float, float]
    quad_nodes: int
    rejected_points: tuple = ()


def _central(f, at: float, h: float) -> float:
    return (f(at + h) - f(at - h)) / (2.0 * h)


def _second(f, at: float, h: float) -> float:
    return (f(at + h) - 2.0 * f(at) + f(at - h)) / (h * h)


def _jump_expectation_smooth(value, x0, tau, law, c0, c_x, gh_nodes: int) -> float:
    """E[C(x+eta) - C(x) - (e^eta - 1) C_x] by Gauss-Hermite (smooth C only)."""
    u, w = gauss_hermite(gh_nodes)
    eta = law.nu + law.delta * u
    shifted = np.array([value(x0 + e, tau) for e in eta])
    return float(np.dot(w, shifted - c0 - np.expm1(eta) * c_x))


def _jump_expectation_kinked(
    value, x0, tau, law, c0, c_x, l0: float, nodes: int = 16
) -> float:
    """Same expectation when C has the sigma = 0 delta-kink inside the range.

    Gauss-Hermite converges poorly across the derivative kink at
    eta = -l(x0), so the Gaussian weight is folded into Gauss-Legendre
    panels split exactly at the kink; each side is analytic.
    """
    if law.delta == 0.0:
        eta = law.nu
        return value(x0 + eta, tau) - c0 - math.expm1(eta) * c_x
    lo = law.nu - 10.0 * law.delta
    hi = law.nu + 10.0 * law.delta + law.delta**2
    cuts = [lo, hi]
    if lo < -l0 < hi:
        cuts = [lo, -l0, hi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n_panels = max(1, int(math.ceil((b - a) / (0.5 * law.delta))))
        for i in range(n_panels):
            p_lo = a + (b - a) * i / n_panels
            p_hi = a + (b - a) * (i + 1) / n_panels
            eta, w = gauss_legendre(p_lo, p_hi, nodes)
            dens = np.exp(-0.5 * ((eta - law.nu) / law.delta) ** 2) / (
                law.delta * math.sqrt(2.0 * math.pi)
            )
            vals = np.array([value(x0 + e, tau) for e in eta])
            total += float(np.dot(w * dens, vals - c0 - np.expm1(eta) * c_x))
    return total


def option_pide_residual(
    terms_grid: Sequence[OptionTerms],
    model: AssetModel,
    quad: QuadratureSpec = DEFAULT_QUAD,
    gh_nodes: int = 64,
    fd_dt: float = 1e-4,
    fd_dx: float = 5e-5,
) -> ResidualReport:
    """Max normalized residual of the option pricing equation on a grid.

    Evaluates -C_tau + (sigma^2/2) C_xx + (r - q - sigma^2/2) C_x
    + lam E[C(x+eta) - C(x) - (e^eta - 1) C_x] - r C at every grid point,
    normalized by max(|r C|, 1e-3). Derivatives are second-order central
    differences of analytic prices. Points too close to maturity or to the
    sigma = 0 kink are rejected and listed instead of evaluated.
    """
    worst = 0.0
    rejected = []
    used = 0
    for terms in terms_grid:
        if terms.tau < 0.05:
            rejected.append((terms.spot, terms.tau, "tau too small"))
            continue
        l0 = l_parameter(terms, model)
        if model.sigma == 0.0 and abs(l0) < 0.05:
            rejected.append((terms.spot, terms.tau, "kink proximity"))
            continue
        used += 1
        x0 = math.log(terms.spot / terms.strike)

        def value(x: float, tau: float) -> float:
            t = OptionTerms(
                spot=terms.strike * math.exp(x),
                strike=terms.strike,
                tau=tau,
                rate=terms.rate,
                dividend=terms.dividend,
                kind=terms.kind,
            )
            return price(t, model, Backend.SERIES, quad).value

        c0 = value(x0, terms.tau)
        c_tau = _central(lambda s: value(x0, s), terms.tau, fd_dt)
        c_x = _central(lambda x: value(x, terms.tau), x0, fd_dx)
        c_xx = _second(lambda x: value(x, terms.tau), x0, fd_dx) if model.sigma > 0 else 0.0
        if model.lam == 0.0:
            jump_term = 0.0
        elif model.sigma > 0.0:
            jump_term = model.lam * _jump_expectation_smooth(
                value, x0, terms.tau, model.law, c0, c_x, gh_nodes
            )
        else:
            jump_term = model.lam * _jump_expectation_kinked(
                value, x0, terms.tau, model.law, c0, c_x, l0
            )
        res = (
            -c_tau
            + 0.5 * model.sigma**2 * c_xx
            + (terms.rate - terms.dividend - 0.5 * model.sigma**2) * c_x
            + jump_term
            - terms.rate * c0
        )
        worst = max(worst, abs(res) / max(abs(terms.rate * c0), _NORM_FLOOR))
    return ResidualReport(
        max_residual=worst,
        grid_points=used,
        fd_steps=(fd_dt, fd_dx),
        quad_nodes=gh_nodes,
        rejected_points=tuple(rejected),
    )


def bond_pide_residual(
    model: RateModel,
    grid: Sequence[BondTerms],
    variant: BondVariant = BondVariant.GENERAL,
    quad: QuadratureSpec = DEFAULT_QUAD,
    gh_nodes: int = 64,
    fd_dt: float = 1e-4,
    fd_dr: float = 1e-4,
) -> ResidualReport:
    """Max normalized residual of the term-structure equation on a grid.

    The pure-jump variant checks P_t - a r P_r + lam E[P(r+eta) - P(r)] = r P;
    the generalized variant adds the a(b - r) drift and the P_rr term.
    """
    variant = BondVariant(variant)
    u, w = gauss_hermite(gh_nodes)
    eta = model.law.nu + model.law.delta * u
    worst = 0.0
    rejected = []
    used = 0
    for terms in grid:
        if terms.T - terms.t < 0.05:
            rejected.append((terms.t, terms.r_t, "too close to maturity"))
            continue
        used += 1

        def value(t: float, r: float) -> float:
            return bond_price(model, BondTerms(t=t, T=terms.T, r_t=r), variant, quad)

        p0 = value(terms.t, terms.r_t)
        p_t = _central(lambda s: value(s, terms.r_t), terms.t, fd_dt)
        p_r = _central(lambda r: value(terms.t, r), terms.r_t, fd_dr)
        if variant is BondVariant.VASICEK or model.lambda_r == 0.0:
            jump_term = 0.0
        else:
            shifted = np.array([value(terms.t, terms.r_t + e) for e in eta])
            jump_term = model.lambda_r * float(np.dot(w, shifted - p0))
        if variant is BondVariant.SHOT:
            drift = -model.a * terms.r_t * p_r
            diff = 0.0
        else:
            drift = model.a * (model.b - terms.r_t) * p_r
            diff = 0.5 * model.sigma_r**2 * _second(
                lambda r: value(terms.t, r), terms.r_t, fd_dr
            )
        res = p_t + drift + diff + jump_term - terms.r_t * p0
        worst = max(worst, abs(res) / max(abs(terms.r_t * p0), _NORM_FLOOR))
    return ResidualReport(
        max_residual=worst,
        grid_points=used,
        fd_steps=(fd_dt, fd_dr),
        quad_nodes=gh_nodes,
        rejected_points=tuple(rejected),
    )


@dataclass(frozen=True)
class DiffusionStudy:
    """Scaling recipe for the high-intensity limit.

    At scale n the asset jumps use lam = n lam0, nu = drift/lam,
    delta^2 = variance/lam, and similarly for the rate block. Targets are
    the Gaussian formulas with the scale's own aggregate moments.
    """

    scales: tuple[int, ...] = (1, 10, 100, 1000)
    drift: float = 0.06
    variance: float = 0.04
    lam0: float = 1.0
    spot: float = 100.0
    strike: float = 105.0
    tau: float = 1.0
    rate: float = 0.03
    dividend: float = 0.01
    rate_a: float = 0.5
    rate_drift: float = 0.012
    rate_variance: float = 4e-4
    rate_lam0: float = 1.0
    bond_tenor: float = 5.0


@dataclass(frozen=True)
class ConvergenceRow:
    scale: int
    price_error: float
    greek_error: float
    bond_error: float


def diffusion_convergence(study: DiffusionStudy = DiffusionStudy()) -> list[ConvergenceRow]:
    """Relative errors of the jump model against its Gaussian limits.

    Per scale: call price and theta against Black-Scholes with the scale's
    aggregate volatility, and the bond intercept against the Gaussian
    intercept with the matched long-term mean and volatility.
    """
    rows = []
    for n in study.scales:
        lam = n * study.lam0
        nu = study.drift / lam
        delta = math.sqrt(study.variance / lam)
        model = AssetModel(lam=lam, law=GaussianJumpLaw(nu=nu, delta=delta), sigma=0.0)
        sigma_n = math.sqrt(lam * (nu * nu + delta * delta))
        terms = OptionTerms(
            spot=study.spot,
            strike=study.strike,
            tau=study.tau,
            rate=study.rate,
            dividend=study.dividend,
            kind=OptionKind.CALL,
        )
        value = price(terms, model).value
        target = bs_price(terms, sigma_n).value
        price_err = abs(value - target) / abs(target)
        theta = common_greeks(terms, model).theta
        theta_target = bs_greeks(terms, sigma_n).theta
        greek_err = abs(theta - theta_target) / abs(theta_target)

        lam_r = n * study.rate_lam0
        nu_r = study.rate_drift / lam_r
        delta_r = math.sqrt(study.rate_variance / lam_r)
        rate_law = GaussianJumpLaw(nu=nu_r, delta=delta_r)
        jump_model = RateModel(
            a=study.rate_a, b=0.0, sigma_r=0.0, lambda_r=lam_r, law=rate_law
        )
        limit_model = RateModel(
            a=study.rate_a,
            b=lam_r * nu_r / study.rate_a,
            sigma_r=math.sqrt(lam_r * (nu_r**2 + delta_r**2)),
            lambda_r=0.0,
            law=rate_law,
        )
        a_jump = a_shot(jump_model, 0.0, study.bond_tenor)
        a_limit = a_vasicek(limit_model, 0.0, study.bond_tenor)
        bond_err = abs(a_jump - a_limit) / abs(a_limit)
        rows.append(
            ConvergenceRow(
                scale=n, price_error=price_err, greek_error=greek_err, bond_error=bond_err
            )
        )
    return rows


def default_agreement_grid() -> list[tuple[CharSpec, np.ndarray]]:
    """Standard (spec, thresholds) grid for the backend cross-check."""
    ls = np.array([-1.0, -0.5, -0.1, 0.25, 0.6, 1.0])
    grid = []
    for lam_tau in (0.25, 1.0, 4.0):
        for nu in (-0.1, 0.0, 0.1):
            for delta in (0.05, 0.2):
                for sigma in (0.0, 0.2):
                    spec = CharSpec(
                        tau=1.0,
                        lam=lam_tau,
                        sigma=sigma,
                        law=GaussianJumpLaw(nu=nu, delta=delta),
                    )
                    grid.append((spec, ls))
    return grid


def backend_agreement(
    grid: Optional[Sequence[tuple[CharSpec, np.ndarray]]] = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> ResidualReport:
    """Max |series - fourier| over all four transforms and their complements.

    Covers the eight cumulative functions of the pricing formulas (the
    sigma = 0 and sigma > 0 families of tilted/plain cdfs and survivals).
    Thresholds sitting exactly on a sigma = 0 atom are excluded and listed.
    """
    if grid is None:
        grid = default_agreement_grid()
    worst = 0.0
    points = 0
    rejected = []
    series_fns = (cdf_plain, cdf_tilted, survival_plain, survival_tilted)
    for spec, ls in grid:
        ls = np.asarray(ls, dtype=float)
        keep = np.ones(len(ls), dtype=bool)
        if spec.sigma == 0.0:
            on_atom = ls == 0.0
            for l in ls[on_atom]:
                rejected.append((spec.lam, spec.sigma, float(l)))
            keep &= ~on_atom
        ls = ls[keep]
        if ls.size == 0:
            continue
        four = fourier_grid(spec, ls, quad)
        four_vals = (four.plain, four.tilted, four.plain_surv, four.tilted_surv)
        for fn, fv in zip(series_fns, four_vals):
            sv = np.array([fn(spec, float(l), Backend.SERIES, quad) for l in ls])
            worst = max(worst, float(np.max(np.abs(sv - fv))))
        points += ls.size
    return ResidualReport(
        max_residual=worst,
        grid_points=points,
        fd_steps=(0.0, 0.0),
        quad_nodes=quad.k_nodes,
        rejected_points=tuple(rejected),
    )
