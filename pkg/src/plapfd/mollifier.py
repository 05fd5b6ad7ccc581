"""Standard mollifier profile and its integral constants.

The bump ``tau(r) = exp(-1/(1-r^2))`` on [0, 1) generates the mollifier
family used by the step-size analysis. Three radial integrals of ``tau``
measure how mollification interacts with Hoelder seminorms:

    M  = 1 / int_0^1 tau(r) r^(d-1) dr
    K1 = M * int_0^1 |tau'(r)| r^(d-1) dr
    K2 = M * int_0^1 (|tau'(r)|/r + |tau''(r)|) r^(d-1) dr

``mollifier_constants`` evaluates them by adaptive quadrature and reports a
propagated error estimate. ``REFERENCE_BOUNDS`` records the certified
decimal upper bounds the computed values are expected to stay below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad

from .errors import QuadratureError
from .operators import jp
import numpy as np

# |tau''| changes sign where 6r^4 = 2; quadrature gets told about the kink
_KINK = (1.0 / 3.0) ** 0.25

# upper integration limit: the integrand underflows to exact zero well
# before this, but at r = 1 the exponent itself would divide by zero
_TOP = 1.0 - 1e-12

REFERENCE_BOUNDS = {
    1: (4.51, 1.67, 10.83),
    2: (13.47, 3.13, 18.97),
    3: (28.49, 4.56, 29.06),
}


def profile_tau(r):
    """Bump value ``tau(r)``; identically zero for ``|r| >= 1``."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ri * ri))
    return float(out[0]) if scalar else out


def profile_tau_d1(r):
    """First derivative: ``tau(r) * (-2r) / (1-r^2)^2``, zero outside."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    ri = r[inside]
    s = 1.0 - ri * ri
    out[inside] = np.exp(-1.0 / s) * (-2.0 * ri) / s**2
    return float(out[0]) if scalar else out


def profile_tau_d2(r):
    """Second derivative: ``tau(r) * (6r^4 - 2) / (1-r^2)^4``, zero outside."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    rr = r[inside] * r[inside]
    s = 1.0 - rr
    out[inside] = np.exp(-1.0 / s) * (6.0 * rr * rr - 2.0) / s**4
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class MollifierConstants:
    """Computed constants for one dimension, with the propagated quadrature
    error estimate (an absolute bound valid for all three values)."""

    d: int
    M: float
    K1: float
    K2: float
    quad_error: float


@lru_cache(maxsize=None)
def mollifier_constants(d: int) -> MollifierConstants:
    """Evaluate M, K1, K2 for ``d`` in {1, 2, 3}.

    Raises QuadratureError (with the achieved estimate attached) if the
    propagated error cannot be brought below 1e-8.
    """
    if d not in (1, 2, 3):
        raise ValueError(f"mollifier constants are tabulated for d in {{1,2,3}} (got {d})")

    def tau_w(r: float) -> float:
        s = 1.0 - r * r
        return math.exp(-1.0 / s) * r ** (d - 1)

    def dtau_w(r: float) -> float:
        # |tau'| = 2 r tau / (1-r^2)^2 on [0, 1)
        s = 1.0 - r * r
        return math.exp(-1.0 / s) * 2.0 * r / s**2 * r ** (d - 1)

    def curvature_w(r: float) -> float:
        # |tau'|/r + |tau''| = tau * (2/(1-r^2)^2 + |6r^4 - 2|/(1-r^2)^4)
        s = 1.0 - r * r
        return (
            math.exp(-1.0 / s)
            * (2.0 / s**2 + abs(6.0 * r**4 - 2.0) / s**4)
            * r ** (d - 1)
        )

    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    IM, eM = quad(tau_w, 0.0, _TOP, **opts)
    I1, e1 = quad(dtau_w, 0.0, _TOP, **opts)
    I2, e2 = quad(curvature_w, 0.0, _TOP, points=[_KINK], **opts)
    M = 1.0 / IM
    K1 = M * I1
    K2 = M * I2
    err_M = eM / IM**2
    err_K1 = M * e1 + I1 * err_M
    err_K2 = M * e2 + I2 * err_M
    estimate = max(err_M, err_K1, err_K2)
    if not math.isfinite(estimate) or estimate > 1e-8:
        raise QuadratureError(
            f"mollifier constants for d={d} did not converge to 1e-8", estimate
        )
    return MollifierConstants(d=d, M=M, K1=K1, K2=K2, quad_error=estimate)


def check_jp_taylor_bound(a, b, p) -> bool:
    """Check ``|jp(a+b) - jp(a)| <= (p-1) * max(|a|, |a+b|)^(p-2) * |b|``.

    The inequality is the elementary Taylor estimate that lets mollified
    data control the nonlinearity; it holds for every finite a, b and
    p >= 2. Returns True when it does, with 1e-12 relative slack on the
    right-hand side.
    """
    a = float(a)
    b = float(b)
    lhs = abs(jp(a + b, p) - jp(a, p))
    rhs = (float(p) - 1.0) * max(abs(a), abs(a + b)) ** (float(p) - 2.0) * abs(b)
    return bool(lhs <= rhs * (1.0 + 1e-12))
