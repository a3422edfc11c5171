"""Shared Gauss-Legendre / Gauss-Hermite helpers."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (b + a), half * w


@lru_cache(maxsize=16)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for expectations under the standard normal density.

    Returns ``(u, w)`` such that E[f(Z)] ~= sum w_i f(u_i) for Z ~ N(0, 1).
    """
    u, w = np.polynomial.hermite.hermgauss(n)
    return u * np.sqrt(2.0), w / np.sqrt(np.pi)


def adaptive_gauss_legendre(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    nodes: int = 16,
    max_depth: int = 24,
) -> float:
    """Adaptive panel Gauss-Legendre integration of a vectorized callable.

    Each panel is accepted when one bisection changes its estimate by less
    than the panel's share of the tolerance; otherwise it is split. ``f``
    must accept an ndarray of abscissae.
    """
    if a == b:
        return 0.0

    def panel(lo: float, hi: float) -> float:
        x, w = gauss_legendre(lo, hi, nodes)
        return float(np.dot(w, f(x)))

    whole = panel(a, b)
    scale = max(abs(whole), 1e-30)
    stack = [(a, b, whole, 0)]
    total = 0.0
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        err = abs(left + right - est)
        tol_here = rel_tol * scale * (hi - lo) / abs(b - a)
        if err <= tol_here or depth >= max_depth:
            if depth >= max_depth and err > tol_here:
                raise QuadratureError(
                    f"adaptive quadrature stalled on [{lo}, {hi}]", achieved=err
                )
            total += left + right
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total
