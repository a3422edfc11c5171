"""Batch command-line front end: configs in, CSV/JSON reports out.

Subcommands: ``price``, ``greeks``, ``bond``, ``curve``, ``mc``,
``validate``, ``limits``. Parameters come from an optional JSON config file
with flag overrides; every run echoes the resolved config and the library
version into the report header. Report bodies are deterministic for a fixed
config and seed (timestamps live only in the header). Exit codes: 0 success,
1 numerical contract failure, 2 config/usage error.

All rates are annual, times are year fractions, prices are currency units.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Optional

from . import __version__
from .errors import ConfigError, ShotPricerError
from .greeks import common_greeks, identity_report, new_greeks
from .jump_measure import GaussianJumpLaw
from .montecarlo import SimConfig, mc_bond_price, mc_option_price, mc_rate_moments
from .options import AssetModel, OptionKind, OptionTerms, parity_residual, price
from .shortrate import (
    BondTerms,
    BondVariant,
    RateModel,
    b_factor,
    bond_price,
    conditional_moments,
    ode_residual,
    zero_yield,
)
from .shortrate import a_shot, a_vasicek, a_general
from .transform import Backend, QuadratureSpec
from .validation import (
    backend_agreement,
    bond_pide_residual,
    diffusion_convergence,
    option_pide_residual,
)

__all__ = ["RunConfig", "execute", "main"]

_COMMANDS = ("price", "greeks", "bond", "curve", "mc", "validate", "limits")

_DEFAULTS: dict[str, Any] = {
    "asset": {"lam": 1.0, "nu": -0.05, "delta": 0.15, "sigma": 0.0},
    "rate": {
        "a": 0.5,
        "b": 0.03,
        "sigma_r": 0.01,
        "lambda_r": 1.0,
        "nu_r": 0.01,
        "delta_r": 0.02,
    },
    "contracts": {
        "spot": 100.0,
        "strikes": [90.0, 100.0, 110.0],
        "maturities": [0.5, 1.0],
        "rate": 0.03,
        "dividend": 0.0,
        "kinds": ["call", "put"],
    },
    "bond": {
        "r0": 0.03,
        "t": 0.0,
        "maturities": [1.0, 2.0, 5.0, 10.0],
        "variant": "general",
    },
    "sim": {"paths": 100000, "seed": 20240701, "antithetic": False},
    "quad": {"rel_tol": 1e-9, "k_max": 16.0, "k_nodes": 32, "n_max": 4096},
    "backend": "series",
    "output": {"path": None, "format": "csv"},
}


@dataclass
class RunConfig:
    """Fully resolved run description (defaults + file + flag overrides)."""

    command: str
    asset: AssetModel
    rate_model: RateModel
    contracts: dict
    bond: dict
    sim: SimConfig
    quad: QuadratureSpec
    backend: Backend
    out_path: Optional[str]
    out_format: str
    resolved: dict = field(default_factory=dict)


def _merge(base: dict, override: dict, path: str = "") -> dict:
    # deep-copies so later flag overrides never mutate the shared defaults
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key '{path}{key}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key '{path}{key}' must be a section")
            merged[key] = _merge(base[key], value, path=f"{path}{key}.")
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    command = raw.pop("command", None)
    if command is not None and command not in _COMMANDS:
        raise ConfigError(f"unknown command '{command}' in config")
    return raw


def resolve_config(args: argparse.Namespace) -> RunConfig:
    raw = _load_config_file(args.config) if args.config else {}
    merged = _merge(_DEFAULTS, raw)
    if args.seed is not None:
        merged["sim"]["seed"] = args.seed
    if args.paths is not None:
        merged["sim"]["paths"] = args.paths
    if args.backend is not None:
        merged["backend"] = args.backend
    if args.tol is not None:
        merged["quad"]["rel_tol"] = args.tol
    if args.out is not None:
        merged["output"]["path"] = args.out
    if args.format is not None:
        merged["output"]["format"] = args.format
    if merged["output"]["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown output format '{merged['output']['format']}'")

    try:
        asset = AssetModel(
            lam=float(merged["asset"]["lam"]),
            law=GaussianJumpLaw(
                nu=float(merged["asset"]["nu"]), delta=float(merged["asset"]["delta"])
            ),
            sigma=float(merged["asset"]["sigma"]),
        )
        rate_cfg = merged["rate"]
        rate_model = RateModel(
            a=float(rate_cfg["a"]),
            b=float(rate_cfg["b"]),
            sigma_r=float(rate_cfg["sigma_r"]),
            lambda_r=float(rate_cfg["lambda_r"]),
            law=GaussianJumpLaw(nu=float(rate_cfg["nu_r"]), delta=float(rate_cfg["delta_r"])),
        )
        sim = SimConfig(
            paths=int(merged["sim"]["paths"]),
            seed=int(merged["sim"]["seed"]),
            antithetic=bool(merged["sim"]["antithetic"]),
        )
        quad = QuadratureSpec(
            rel_tol=float(merged["quad"]["rel_tol"]),
            k_max=float(merged["quad"]["k_max"]),
            k_nodes=int(merged["quad"]["k_nodes"]),
            n_max=int(merged["quad"]["n_max"]),
        )
        backend = Backend(merged["backend"])
        BondVariant(merged["bond"]["variant"])
        for kind in merged["contracts"]["kinds"]:
            OptionKind(kind)
    except (ShotPricerError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    return RunConfig(
        command=args.command,
        asset=asset,
        rate_model=rate_model,
        contracts=merged["contracts"],
        bond=merged["bond"],
        sim=sim,
        quad=quad,
        backend=backend,
        out_path=merged["output"]["path"],
        out_format=merged["output"]["format"],
        resolved={**merged, "command": args.command},
    )


# ---------------------------------------------------------------------------
# Row builders, one per command
# ---------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _option_grid(cfg: RunConfig):
    c = cfg.contracts
    for tau in c["maturities"]:
        for strike in c["strikes"]:
            for kind in c["kinds"]:
                yield OptionTerms(
                    spot=float(c["spot"]),
                    strike=float(strike),
                    tau=float(tau),
                    rate=float(c["rate"]),
                    dividend=float(c["dividend"]),
                    kind=OptionKind(kind),
                )


def _model_cols(cfg: RunConfig, terms: OptionTerms) -> dict:
    return {
        "S": terms.spot,
        "K": terms.strike,
        "tau": terms.tau,
        "r": terms.rate,
        "q": terms.dividend,
        "lambda": cfg.asset.lam,
        "nu": cfg.asset.law.nu,
        "delta": cfg.asset.law.delta,
        "sigma": cfg.asset.sigma,
        "kind": terms.kind.value,
    }


def _run_price(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    for terms in _option_grid(cfg):
        res = price(terms, cfg.asset, cfg.backend, cfg.quad)
        rows.append(
            {
                **_model_cols(cfg, terms),
                "price": res.value,
                "est_error": res.est_error,
                "backend": res.backend.value,
            }
        )
    return rows, 0


def _run_greeks(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    for terms in _option_grid(cfg):
        g = common_greeks(terms, cfg.asset, cfg.backend, cfg.quad)
        # greek_ prefix keeps the sensitivities clear of the jump-parameter
        # columns (nu, delta) that make each row self-contained
        row = {
            **_model_cols(cfg, terms),
            "greek_delta": g.delta,
            "greek_gamma": g.gamma,
            "greek_rho": g.rho,
            "greek_psi": g.psi,
            "greek_theta": g.theta,
            "greek_vega": g.vega,
            "greek_kappa": None,
            "greek_mu": None,
            "greek_epsilon": None,
        }
        if cfg.asset.lam > 0.0:
            ng = new_greeks(terms, cfg.asset, cfg.backend, cfg.quad)
            row.update(
                {"greek_kappa": ng.kappa, "greek_mu": ng.mu, "greek_epsilon": ng.epsilon}
            )
        rows.append(row)
    return rows, 0


def _rate_cols(cfg: RunConfig) -> dict:
    m = cfg.rate_model
    return {
        "a": m.a,
        "b": m.b,
        "sigma_r": m.sigma_r,
        "lambda_r": m.lambda_r,
        "nu_r": m.law.nu,
        "delta_r": m.law.delta,
    }


def _run_bond(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    variant = BondVariant(cfg.bond["variant"])
    t0 = float(cfg.bond["t"])
    r0 = float(cfg.bond["r0"])
    for maturity in cfg.bond["maturities"]:
        terms = BondTerms(t=t0, T=float(maturity), r_t=r0)
        p = bond_price(cfg.rate_model, terms, variant, cfg.quad)
        a_val = {
            BondVariant.SHOT: a_shot(cfg.rate_model, t0, terms.T, cfg.quad),
            BondVariant.VASICEK: a_vasicek(cfg.rate_model, t0, terms.T),
            BondVariant.GENERAL: a_general(cfg.rate_model, t0, terms.T, cfg.quad),
        }[variant]
        rows.append(
            {
                **_rate_cols(cfg),
                "t": t0,
                "T": terms.T,
                "r0": r0,
                "variant": variant.value,
                "A": a_val,
                "B": b_factor(cfg.rate_model, t0, terms.T),
                "price": p,
            }
        )
    return rows, 0


def _run_curve(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    variant = BondVariant(cfg.bond["variant"])
    t0 = float(cfg.bond["t"])
    r0 = float(cfg.bond["r0"])
    for maturity in cfg.bond["maturities"]:
        terms = BondTerms(t=t0, T=float(maturity), r_t=r0)
        p = bond_price(cfg.rate_model, terms, variant, cfg.quad)
        tenor = terms.T - t0
        rows.append(
            {
                **_rate_cols(cfg),
                "t": t0,
                "T": terms.T,
                "r0": r0,
                "variant": variant.value,
                "tenor": tenor,
                "price": p,
                "zero_yield": zero_yield(p, tenor) if tenor > 0 else None,
            }
        )
    return rows, 0


def _run_mc(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    for terms in _option_grid(cfg):
        analytic = price(terms, cfg.asset, cfg.backend, cfg.quad).value
        est = mc_option_price(terms, cfg.asset, cfg.sim)
        z = (analytic - est.mean) / est.std_error if est.std_error > 0 else 0.0
        rows.append(
            {
                "target": "option",
                **_model_cols(cfg, terms),
                "T": None,
                "horizon": None,
                "analytic": analytic,
                "mc_mean": est.mean,
                "mc_std_error": est.std_error,
                "z": z,
                "paths": est.paths_used,
                "seed": cfg.sim.seed,
                "antithetic": cfg.sim.antithetic,
            }
        )
    variant = BondVariant(cfg.bond["variant"])
    t0 = float(cfg.bond["t"])
    r0 = float(cfg.bond["r0"])
    for maturity in cfg.bond["maturities"]:
        terms_b = BondTerms(t=t0, T=float(maturity), r_t=r0)
        analytic = bond_price(cfg.rate_model, terms_b, variant, cfg.quad)
        est = mc_bond_price(cfg.rate_model, terms_b, cfg.sim)
        z = (analytic - est.mean) / est.std_error if est.std_error > 0 else 0.0
        rows.append(
            {
                "target": "bond",
                "S": None,
                "K": None,
                "tau": None,
                "r": r0,
                "q": None,
                "lambda": cfg.rate_model.lambda_r,
                "nu": cfg.rate_model.law.nu,
                "delta": cfg.rate_model.law.delta,
                "sigma": cfg.rate_model.sigma_r,
                "kind": variant.value,
                "T": terms_b.T,
                "horizon": None,
                "analytic": analytic,
                "mc_mean": est.mean,
                "mc_std_error": est.std_error,
                "z": z,
                "paths": est.paths_used,
                "seed": cfg.sim.seed,
                "antithetic": cfg.sim.antithetic,
            }
        )
    horizon = 1.0
    mean, var = conditional_moments(cfg.rate_model, r0, horizon)
    mean_est, var_est = mc_rate_moments(cfg.rate_model, r0, horizon, cfg.sim)
    for target, analytic, est in (
        ("rate_mean", mean, mean_est),
        ("rate_variance", var, var_est),
    ):
        z = (analytic - est.mean) / est.std_error if est.std_error > 0 else 0.0
        rows.append(
            {
                "target": target,
                "S": None,
                "K": None,
                "tau": None,
                "r": r0,
                "q": None,
                "lambda": cfg.rate_model.lambda_r,
                "nu": cfg.rate_model.law.nu,
                "delta": cfg.rate_model.law.delta,
                "sigma": cfg.rate_model.sigma_r,
                "kind": None,
                "T": None,
                "horizon": horizon,
                "analytic": analytic,
                "mc_mean": est.mean,
                "mc_std_error": est.std_error,
                "z": z,
                "paths": est.paths_used,
                "seed": cfg.sim.seed,
                "antithetic": cfg.sim.antithetic,
            }
        )
    return rows, 0


_VALIDATE_CHECKS = {
    "parity": 1e-8,  # relative to max(S, K)
    "backend_agreement": 1e-7,
    "option_pide": 1e-4,
    "bond_pide": 1e-4,
    "ode_residual_A": 1e-4,
    "ode_residual_B": 1e-6,
    "greek_identity": 1e-4,
}


def _run_validate(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []

    def record(check: str, config: str, value: float, tol: float) -> None:
        rows.append(
            {
                "check": check,
                "config": config,
                "value": value,
                "tolerance": tol,
                "status": "pass" if value <= tol else "FAIL",
            }
        )

    c = cfg.contracts
    spot, rate, div = float(c["spot"]), float(c["rate"]), float(c["dividend"])

    worst_parity = 0.0
    for lam_tau in (0.25, 1.0, 4.0):
        for nu in (-0.1, 0.0, 0.1):
            for delta in (0.05, 0.1, 0.2):
                for sigma in (0.0, 0.1, 0.2):
                    model = AssetModel(
                        lam=lam_tau, law=GaussianJumpLaw(nu, delta), sigma=sigma
                    )
                    terms = OptionTerms(
                        spot=spot,
                        strike=0.95 * spot,
                        tau=1.0,
                        rate=rate,
                        dividend=div,
                        kind=OptionKind.CALL,
                    )
                    res = abs(parity_residual(terms, model, cfg.backend, cfg.quad))
                    worst_parity = max(worst_parity, res / max(terms.spot, terms.strike))
    record("parity", "81-point grid", worst_parity, _VALIDATE_CHECKS["parity"])

    agreement = backend_agreement(quad=cfg.quad)
    record(
        "backend_agreement",
        f"{agreement.grid_points} points",
        agreement.max_residual,
        _VALIDATE_CHECKS["backend_agreement"],
    )

    pide_grid = [
        OptionTerms(
            spot=spot * math.exp(x), strike=spot, tau=tau, rate=rate, dividend=div,
            kind=OptionKind.CALL,
        )
        for x in (-0.25, 0.12, 0.3)
        for tau in (0.5, 1.0)
    ]
    for label, model in (
        ("black_scholes", AssetModel(0.0, GaussianJumpLaw(0.0, 0.1), 0.2)),
        ("pure_jump", AssetModel(1.0, GaussianJumpLaw(0.05, 0.1), 0.0)),
        ("jump_diffusion", cfg.asset if cfg.asset.sigma > 0 else AssetModel(0.5, GaussianJumpLaw(0.05, 0.1), 0.15)),
    ):
        rep = option_pide_residual(pide_grid, model, cfg.quad)
        record("option_pide", label, rep.max_residual, _VALIDATE_CHECKS["option_pide"])

    bond_grid = [
        BondTerms(t=t, T=5.0, r_t=r) for t in (0.5, 2.0, 4.0) for r in (0.01, 0.03, 0.06)
    ]
    for variant in BondVariant:
        rep = bond_pide_residual(cfg.rate_model, bond_grid, variant, cfg.quad)
        record("bond_pide", variant.value, rep.max_residual, _VALIDATE_CHECKS["bond_pide"])
        res_a, res_b = ode_residual(cfg.rate_model, 0.0, 5.0, variant, cfg.quad)
        record("ode_residual_A", variant.value, res_a, _VALIDATE_CHECKS["ode_residual_A"])
        record("ode_residual_B", variant.value, res_b, _VALIDATE_CHECKS["ode_residual_B"])

    ident_model = AssetModel(1.0, GaussianJumpLaw(-0.05, 0.15), 0.0)
    ident_terms = OptionTerms(
        spot=spot, strike=0.95 * spot, tau=1.0, rate=rate, dividend=div, kind=OptionKind.CALL
    )
    for name, residual in identity_report(ident_terms, ident_model, cfg.backend, cfg.quad):
        record("greek_identity", name, residual, _VALIDATE_CHECKS["greek_identity"])

    failures = sum(1 for row in rows if row["status"] == "FAIL")
    return rows, (1 if failures else 0)


def _run_limits(cfg: RunConfig) -> tuple[list[dict], int]:
    rows = []
    table = diffusion_convergence()
    status = 0
    prev = None
    for row in table:
        monotone = prev is None or (
            row.price_error <= prev.price_error + 1e-15
            and row.greek_error <= prev.greek_error + 1e-15
            and row.bond_error <= prev.bond_error + 1e-15
        )
        rows.append(
            {
                "scale": row.scale,
                "price_error": row.price_error,
                "theta_error": row.greek_error,
                "bond_a_error": row.bond_error,
                "monotone": monotone,
            }
        )
        if not monotone:
            status = 1
        prev = row
    final = table[-1]
    if final.price_error > 0.01 or final.greek_error > 0.01 or final.bond_error > 0.005:
        status = 1
    return rows, status


_RUNNERS = {
    "price": _run_price,
    "greeks": _run_greeks,
    "bond": _run_bond,
    "curve": _run_curve,
    "mc": _run_mc,
    "validate": _run_validate,
    "limits": _run_limits,
}


# ---------------------------------------------------------------------------
# Report writers
# ---------------------------------------------------------------------------


def _header_lines(cfg: RunConfig) -> list[str]:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return [
        f"shotpricer {__version__}",
        f"command: {cfg.command}",
        f"generated: {stamp}",
        "config: " + json.dumps(cfg.resolved, sort_keys=True),
    ]


def render_report(cfg: RunConfig, rows: list[dict]) -> str:
    """Serialize rows with the reproducibility contract: the body below the
    header is byte-identical across runs with the same config and seed."""
    if cfg.out_format == "json":
        doc = {
            "header": {
                "version": __version__,
                "command": cfg.command,
                "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "config": cfg.resolved,
            },
            "rows": rows,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = ["# " + line for line in _header_lines(cfg)]
    if rows:
        cols = list(rows[0].keys())
        lines.append(",".join(cols))
        for row in rows:
            lines.append(",".join(_fmt(row.get(col)) for col in cols))
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> int:
    """Run one command and write its report; returns the process exit code."""
    rows, status = _RUNNERS[cfg.command](cfg)
    text = render_report(cfg, rows)
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status:
        failing = [r for r in rows if r.get("status") == "FAIL" or r.get("monotone") is False]
        for row in failing:
            print(f"contract failure: {row}", file=sys.stderr)
    return status


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotpricer",
        description="Jump-model option/bond pricing reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
        p.add_argument("--paths", type=int, help="Monte Carlo path count")
        p.add_argument("--backend", choices=["series", "fourier"])
        p.add_argument("--out", help="report file path (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--tol", type=float, help="relative tolerance override")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ShotPricerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
