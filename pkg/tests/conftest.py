import math

import pytest

from shotpricer import (
    AssetModel,
    GaussianJumpLaw,
    OptionKind,
    OptionTerms,
    QuadratureSpec,
    RateModel,
)


@pytest.fixture
def tight_quad():
    """Tighter-than-default controls for reduction tests at 1e-9."""
    return QuadratureSpec(rel_tol=1e-12, n_max=4096)


@pytest.fixture
def jump_model():
    return AssetModel(lam=1.0, law=GaussianJumpLaw(nu=-0.05, delta=0.15), sigma=0.0)


@pytest.fixture
def mixed_model():
    return AssetModel(lam=0.5, law=GaussianJumpLaw(nu=0.05, delta=0.1), sigma=0.15)


@pytest.fixture
def atm_call():
    return OptionTerms(
        spot=100.0, strike=100.0, tau=1.0, rate=0.02, dividend=0.0, kind=OptionKind.CALL
    )


@pytest.fixture
def rate_jump_model():
    return RateModel(
        a=0.5, b=0.0, sigma_r=0.0, lambda_r=1.0, law=GaussianJumpLaw(nu=0.01, delta=0.02)
    )


@pytest.fixture
def rate_general_model():
    return RateModel(
        a=0.5, b=0.03, sigma_r=0.01, lambda_r=2.0, law=GaussianJumpLaw(nu=0.005, delta=0.01)
    )


def make_terms(spot=100.0, strike=100.0, tau=1.0, rate=0.0, dividend=0.0, kind=OptionKind.CALL):
    return OptionTerms(spot=spot, strike=strike, tau=tau, rate=rate, dividend=dividend, kind=kind)
