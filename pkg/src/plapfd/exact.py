"""Closed-form reference solutions.

The Barenblatt family solves the homogeneous equation with a point-mass
initial condition and provides the main convergence benchmark: compactly
supported in space, self-similar, and explicitly evaluable. Alongside it
lives the classical action of the p-Laplacian on the quadratic ``|x|^2``,
used as a consistency oracle for the discrete operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stepping import HolderData


@dataclass(frozen=True)
class BarenblattSolution:
    """Parameters of the Barenblatt profile

        B(x, t) = K * s^(-alpha)
                  * ( 1 - (|x| / s^beta)^(p/(p-1)) )_+^((p-1)/(p-2)),

    with ``s = t + t_shift``. ``alpha = d*beta`` and ``beta = 1/(d*(p-2)+p)``
    come from mass conservation and scaling; the amplitude
    ``K = ((p-2)/p * beta^(1/(p-1)))^((p-1)/(p-2))`` is exactly the value
    that makes this an exact solution, and the positive part closes at
    ``|x| = s^beta``.
    """

    d: int
    p: float
    alpha: float
    beta: float
    K: float
    t_shift: float = 1.0

    def support_radius(self, t) -> float:
        """Radius of the support at time ``t``: ``(t + t_shift)^beta``."""
        s = float(t) + self.t_shift
        if s <= 0.0:
            raise ValueError(f"t + t_shift must be positive (got {s})")
        return s**self.beta


def barenblatt_constants(d: int, p) -> tuple[float, float, float]:
    """Exponents and normalization ``(alpha, beta, K)`` for given d, p > 2."""
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer (got {d})")
    p = float(p)
    if not math.isfinite(p) or p <= 2.0:
        raise ValueError(f"Barenblatt profiles need p > 2 (got {p})")
    d = int(d)
    beta = 1.0 / (d * (p - 2.0) + p)
    alpha = d * beta
    K = ((p - 2.0) / p * beta ** (1.0 / (p - 1.0))) ** ((p - 1.0) / (p - 2.0))
    return alpha, beta, K


def barenblatt_solution(d: int, p, t_shift=1.0) -> BarenblattSolution:
    alpha, beta, K = barenblatt_constants(d, p)
    t_shift = float(t_shift)
    if not (t_shift >= 0.0) or not math.isfinite(t_shift):
        raise ValueError(f"t_shift must be nonnegative (got {t_shift})")
    return BarenblattSolution(d=int(d), p=float(p), alpha=alpha, beta=beta, K=K, t_shift=t_shift)


def _point_radius(x, d: int):
    x = np.asarray(x, dtype=float)
    if d == 1:
        return np.abs(x)
    if x.ndim == 0 or x.shape[-1] != d:
        raise ValueError(f"points for d={d} must have last axis of length {d}")
    return np.sqrt(np.sum(x * x, axis=-1))


def barenblatt_eval(sol: BarenblattSolution, x, t):
    """Evaluate ``B(x, t)``.

    ``x`` is a scalar or array of coordinates for ``d = 1``, or an array
    whose last axis has length ``d`` otherwise. The positive part is taken
    exactly: nodes outside the support return 0.0 with no rounding noise,
    and the fractional power inside is evaluated through exp/log only where
    the base is strictly positive.
    """
    s = float(t) + sol.t_shift
    if s <= 0.0:
        raise ValueError(f"t + t_shift must be positive (got {s})")
    rho = _point_radius(x, sol.d)
    scalar = rho.ndim == 0
    rho = np.atleast_1d(rho)
    p = sol.p
    y = rho / s**sol.beta
    base = 1.0 - y ** (p / (p - 1.0))
    out = np.zeros_like(base)
    pos = base > 0.0
    q = (p - 1.0) / (p - 2.0)
    out[pos] = np.exp(q * np.log(base[pos]))
    out *= sol.K * s ** (-sol.alpha)
    if scalar:
        return float(out[0])
    return out


def barenblatt_lipschitz(p, d: int = 1) -> float:
    """Spatial Lipschitz constant of ``B(., t)`` at ``t + t_shift = 1``.

    Only the one-dimensional profile is supported; its gradient is maximal
    at the support edge, giving ``K * p / (p - 2)``. An algebraically equal
    closed form is ``((p-2) / (2p(p-1)))^(1/(p-2))``.
    """
    if d != 1:
        raise ValueError("the Lipschitz constant is only available for d = 1")
    _, _, K = barenblatt_constants(1, p)
    return K * float(p) / (float(p) - 2.0)


def barenblatt_data(p, horizon, d: int = 1, t_shift=1.0) -> HolderData:
    """Problem data whose exact solution is the Barenblatt profile.

    ``horizon`` is the final time the data will be run to; the recorded
    support radius ``(horizon + t_shift)^beta`` lets the solver check that
    the computational box keeps a margin of ``r`` around the support, which
    makes the zero extension exact. Requires ``d = 1`` (the Lipschitz
    constant is only known there) and ``t_shift > 0`` so the initial datum
    is Lipschitz rather than a point mass.
    """
    if d != 1:
        raise ValueError("barenblatt_data currently supports d = 1 only")
    t_shift = float(t_shift)
    if not (t_shift > 0.0):
        raise ValueError(f"t_shift must be positive (got {t_shift})")
    horizon = float(horizon)
    if not (horizon > 0.0) or not math.isfinite(horizon):
        raise ValueError(f"horizon must be positive (got {horizon})")
    sol = barenblatt_solution(d, p, t_shift)

    def u0(x):
        return barenblatt_eval(sol, x, 0.0)

    def f(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    lip = barenblatt_lipschitz(p) * t_shift ** (-(sol.alpha + sol.beta))
    return HolderData(
        u0=u0,
        f=f,
        a=1.0,
        L_u0=lip,
        L_f=0.0,
        sup_u0=sol.K * t_shift ** (-sol.alpha),
        sup_f=0.0,
        support_radius=sol.support_radius(horizon),
    )


def plap_quadratic_oracle(x, p, d: int):
    """Exact p-Laplacian of ``psi(x) = |x|^2``.

    Classical computation: ``2^(p-1) * (d + p - 2) * |x|^(p-2)``. Accepts
    points in the same convention as barenblatt_eval.
    """
    p = float(p)
    if not math.isfinite(p) or p < 2.0:
        raise ValueError(f"p must be ≥ 2 (got {p})")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer (got {d})")
    rho = _point_radius(x, int(d))
    out = 2.0 ** (p - 1.0) * (int(d) + p - 2.0) * rho ** (p - 2.0)
    if np.ndim(out) == 0:
        return float(out)
    return out
