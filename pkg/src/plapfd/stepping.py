"""Explicit time stepping for the p-Laplace evolution.

One step advances node values by

    U^j = U^(j-1) + tau * (D U^(j-1) + f),

with ``D`` a discrete p-Laplace operator from :mod:`plapfd.operators` and
``f`` the sampled source. The admissible step size depends on the data's
Hoelder regularity through the constant ``Ktilde``; both the sharp
theoretical bound and a pragmatic ``c * r^(2+(1-a)(p-2))`` rule are
available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import BlowUpError, ConfigurationError
from .mollifier import mollifier_constants
from .operators import (
    GridField,
    Stencil,
    _check_p,
    apply_dp_grid,
    couple_h_to_r,
    dpd_constant,
    sample_on_grid,
    stencil_1d,
    stencil_ball,
)

_REL_SLACK = 1e-12


@dataclass(frozen=True)
class HolderData:
    """Problem data with its regularity certificates.

    ``u0`` and ``f`` are callables receiving one coordinate array per axis
    (see operators.sample_on_grid). ``a`` is the Hoelder exponent in (0, 1],
    ``L_u0``/``L_f`` the Hoelder seminorms and ``sup_u0``/``sup_f`` the sup
    norms, all finite and nonnegative. ``support_radius``, when known, is a
    radius containing the support of the exact solution up to the intended
    final time; the solver uses it to check that a zero extension is exact.
    """

    u0: Callable
    f: Callable
    a: float
    L_u0: float
    L_f: float
    sup_u0: float
    sup_f: float
    support_radius: float | None = None

    def __post_init__(self):
        if not callable(self.u0) or not callable(self.f):
            raise ConfigurationError("u0 and f must be callable")
        a = float(self.a)
        if not (0.0 < a <= 1.0):
            raise ConfigurationError(f"a must lie in (0, 1] (got {a})")
        object.__setattr__(self, "a", a)
        for name in ("L_u0", "L_f", "sup_u0", "sup_f"):
            val = float(getattr(self, name))
            if not math.isfinite(val) or val < 0.0:
                raise ConfigurationError(f"{name} must be finite and >= 0 (got {val})")
            object.__setattr__(self, name, val)
        if self.support_radius is not None:
            sr = float(self.support_radius)
            if not math.isfinite(sr) or sr < 0.0:
                raise ConfigurationError(f"support_radius must be >= 0 (got {sr})")
            object.__setattr__(self, "support_radius", sr)


def ktilde(a, p, L_u0, K1, K2, M) -> float:
    """Growth constant of the discrete solution in time.

        Ktilde = 4^((1+(1-a)(p-1)) / (2+(1-a)(p-2))) * L_u0^(p / (2+(1-a)(p-2)))
                 * ((p-1) * K1^(p-2) * K2 * M)^(a / (2+(1-a)(p-2))).

    ``K1`` and ``K2`` are mollifier constants, ``M`` the weight-sum constant
    of the stencil in use. Zero Lipschitz data gives Ktilde = 0.
    """
    p = _check_p(p)
    a = float(a)
    if not (0.0 < a <= 1.0):
        raise ValueError(f"a must lie in (0, 1] (got {a})")
    for name, val in (("L_u0", L_u0), ("K1", K1), ("K2", K2), ("M", M)):
        if not math.isfinite(float(val)) or float(val) < 0.0:
            raise ValueError(f"{name} must be finite and >= 0 (got {val})")
    L_u0, K1, K2, M = float(L_u0), float(K1), float(K2), float(M)
    denom = 2.0 + (1.0 - a) * (p - 2.0)
    if L_u0 == 0.0:
        return 0.0
    return (
        4.0 ** ((1.0 + (1.0 - a) * (p - 1.0)) / denom)
        * L_u0 ** (p / denom)
        * ((p - 1.0) * K1 ** (p - 2.0) * K2 * M) ** (a / denom)
    )


def cfl_tau_max(r, a, p, L_u0, L_f, T, Ktilde, M) -> float:
    """Largest admissible time step, ``C * r^(2+(1-a)(p-2))`` with

        C = min(1, 1 / (M * (p-1) * (L_u0 + T*L_f + 3*Ktilde + 1)^(p-2))).

    At ``p = 2`` the exponent is 2 and ``C = 1/M`` regardless of the data;
    at ``a = 1`` the exponent is 2 for every p.
    """
    p = _check_p(p)
    a = float(a)
    r = float(r)
    if not (0.0 < a <= 1.0):
        raise ValueError(f"a must lie in (0, 1] (got {a})")
    if not (r > 0.0) or not math.isfinite(r):
        raise ValueError(f"r must be positive (got {r})")
    C = cfl_constant(a, p, L_u0, L_f, T, Ktilde, M)
    return C * r ** (2.0 + (1.0 - a) * (p - 2.0))


def cfl_constant(a, p, L_u0, L_f, T, Ktilde, M) -> float:
    for name, val in (
        ("L_u0", L_u0),
        ("L_f", L_f),
        ("T", T),
        ("Ktilde", Ktilde),
        ("M", M),
    ):
        if not math.isfinite(float(val)) or float(val) < 0.0:
            raise ValueError(f"{name} must be finite and >= 0 (got {val})")
    p = float(p)
    grad = float(L_u0) + float(T) * float(L_f) + 3.0 * float(Ktilde) + 1.0
    return min(1.0, 1.0 / (float(M) * (p - 1.0) * grad ** (p - 2.0)))


_CFL_MODES = ("theoretical", "practical")


@dataclass(frozen=True)
class SchemeConfig:
    """Fully resolved discretization parameters.

    ``N * tau`` must reproduce ``T`` to within one representable step; grids
    are the symmetric boxes of :class:`plapfd.operators.GridField`. ``K1``,
    ``K2`` and ``M_moll`` are the mollifier constants used by the
    theoretical step-size rule (NaN when unavailable, which restricts the
    config to practical mode).
    """

    p: float
    d: int
    T: float
    r: float
    h: float
    tau: float
    N: int
    half_width: float
    cfl_mode: str = "practical"
    c_practical: float = 0.2
    K1: float = float("nan")
    K2: float = float("nan")
    M_moll: float = float("nan")
    extension: str = "zero"

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"d must be a positive integer (got {self.d})")
        object.__setattr__(self, "d", int(self.d))
        for name in ("T", "r", "h", "tau", "half_width"):
            val = float(getattr(self, name))
            if not (val > 0.0) or not math.isfinite(val):
                raise ConfigurationError(f"{name} must be positive (got {val})")
            object.__setattr__(self, name, val)
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be a positive integer (got {self.N})")
        object.__setattr__(self, "N", int(self.N))
        gap = abs(self.N * self.tau - self.T)
        if gap > max(1e-9 * self.T, self.tau * 1e-6):
            raise ConfigurationError(
                f"N * tau = {self.N * self.tau} does not reproduce T = {self.T}"
            )
        if self.cfl_mode not in _CFL_MODES:
            raise ConfigurationError(
                f"cfl_mode must be one of {_CFL_MODES} (got {self.cfl_mode!r})"
            )
        if not (float(self.c_practical) > 0.0):
            raise ConfigurationError(f"c_practical must be positive (got {self.c_practical})")
        object.__setattr__(self, "c_practical", float(self.c_practical))
        for name in ("K1", "K2", "M_moll"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.extension not in ("zero", "boundary"):
            raise ConfigurationError(f"unknown extension {self.extension!r}")

    def times(self) -> np.ndarray:
        return np.arange(self.N + 1, dtype=float) * self.tau


def stencil_for(config: SchemeConfig) -> Stencil:
    """The stencil a config resolves to: two-point in 1D, ball otherwise."""
    if config.d == 1:
        if config.r != config.h:
            raise ConfigurationError(
                f"one-dimensional runs require r = h (got r={config.r}, h={config.h})"
            )
        return stencil_1d(config.h, config.p)
    return stencil_ball(config.r, config.h, config.p, config.d)


def _mollifier_constants_for(d: int):
    if d <= 3:
        mc = mollifier_constants(d)
        return mc.K1, mc.K2, mc.M
    return float("nan"), float("nan"), float("nan")


def plan_config(
    p,
    d: int,
    T,
    half_width,
    data: HolderData,
    h=None,
    r=None,
    cfl_mode="practical",
    c_practical=0.2,
    coupling_c=0.1,
    tau=None,
    num_steps=None,
    extension="zero",
) -> SchemeConfig:
    """Resolve grid, radius, and step count into a SchemeConfig.

    Geometry: in 1D ``r = h`` (give either one); for ``d >= 2`` give ``r``
    and optionally ``h``, otherwise ``h = couple_h_to_r(r, p, d,
    coupling_c)``. The step: an explicit ``tau`` or ``num_steps`` wins;
    otherwise the target is the practical rule ``c_practical *
    r^(2+(1-a)(p-2))`` or the theoretical bound, and ``N = ceil(T/target)``
    with ``tau = T/N``.
    """
    p = _check_p(p)
    T = float(T)
    if not (T > 0.0) or not math.isfinite(T):
        raise ConfigurationError(f"T must be positive (got {T})")
    if int(d) != d or d < 1:
        raise ConfigurationError(f"d must be a positive integer (got {d})")
    d = int(d)
    if d == 1:
        if h is None:
            h = r
        if h is None:
            raise ConfigurationError("give h (or r) for one-dimensional runs")
        h = float(h)
        r = float(h)
    else:
        if r is None:
            raise ConfigurationError(f"give the stencil radius r for d = {d}")
        r = float(r)
        h = couple_h_to_r(r, p, d, coupling_c) if h is None else float(h)
    K1, K2, M_moll = _mollifier_constants_for(d)
    explicit_tau = None
    if tau is not None:
        tau = float(tau)
        if not (tau > 0.0):
            raise ConfigurationError(f"tau must be positive (got {tau})")
        N = max(1, int(round(T / tau)))
        explicit_tau = tau
    elif num_steps is not None:
        N = int(num_steps)
        if N < 1:
            raise ConfigurationError(f"num_steps must be >= 1 (got {num_steps})")
    else:
        if cfl_mode == "practical":
            target = float(c_practical) * r ** (2.0 + (1.0 - data.a) * (p - 2.0))
            N = max(1, int(math.ceil(T / target - 1e-9)))
        elif cfl_mode == "theoretical":
            if not math.isfinite(K1):
                raise ConfigurationError(
                    f"theoretical mode needs mollifier constants (d = {d} unsupported)"
                )
            M_bound = 2.0 if d == 1 else 2.0**d / dpd_constant(d, p)
            kt = ktilde(data.a, p, data.L_u0, K1, K2, M_bound)
            target = cfl_tau_max(r, data.a, p, data.L_u0, data.L_f, T, kt, M_bound)
            N = max(1, int(math.ceil(T / target)))
        else:
            raise ConfigurationError(f"cfl_mode must be one of {_CFL_MODES} (got {cfl_mode!r})")
    return SchemeConfig(
        p=p,
        d=d,
        T=T,
        r=r,
        h=h,
        tau=T / N if explicit_tau is None else explicit_tau,
        N=N,
        half_width=float(half_width),
        cfl_mode=cfl_mode,
        c_practical=float(c_practical),
        K1=K1,
        K2=K2,
        M_moll=M_moll,
        extension=extension,
    )


def cfl_report(config: SchemeConfig, data: HolderData) -> dict:
    """Constants behind the theoretical step bound, for logs and metadata."""
    stencil = stencil_for(config)
    if math.isfinite(config.K1):
        kt = ktilde(data.a, config.p, data.L_u0, config.K1, config.K2, stencil.M_bound)
        tau_max = cfl_tau_max(
            config.r, data.a, config.p, data.L_u0, data.L_f, config.T, kt, stencil.M_bound
        )
        C = cfl_constant(data.a, config.p, data.L_u0, data.L_f, config.T, kt, stencil.M_bound)
    else:
        kt = tau_max = C = float("nan")
    return {
        "Ktilde": kt,
        "C": C,
        "tau_max_theoretical": tau_max,
        "M_bound": stencil.M_bound,
        "stencil_size": len(stencil),
    }


def explicit_step(field: GridField, stencil: Stencil, f_values: GridField, tau, step=None) -> GridField:
    """One forward step ``U + tau * (D U + f)``.

    ``tau = 0`` reproduces the input. Non-finite output raises BlowUpError
    naming the first offending node in scan order (and the step index when
    given).
    """
    tau = float(tau)
    if not (tau >= 0.0) or not math.isfinite(tau):
        raise ConfigurationError(f"tau must be nonnegative (got {tau})")
    if (
        f_values.d != field.d
        or f_values.h != field.h
        or f_values.values.shape != field.values.shape
    ):
        raise ConfigurationError("source term sampled on a different grid")
    rate = apply_dp_grid(stencil, field)
    with np.errstate(over="ignore", invalid="ignore"):
        out = field.values + tau * (rate + f_values.values)
    bad = ~np.isfinite(out)
    if bad.any():
        flat = int(np.argmax(bad))
        idx = np.unravel_index(flat, out.shape)
        n = field.n
        raise BlowUpError(tuple(int(i) - n for i in idx), step)
    return field.with_values(out)


def _initial_fields(config: SchemeConfig, data: HolderData) -> tuple[GridField, GridField]:
    u = sample_on_grid(data.u0, config.d, config.h, config.half_width, config.extension)
    f = sample_on_grid(data.f, config.d, config.h, config.half_width, config.extension)
    return u, f


def _validate_run(config: SchemeConfig, data: HolderData, stencil: Stencil) -> None:
    if config.cfl_mode == "theoretical":
        kt = ktilde(data.a, config.p, data.L_u0, config.K1, config.K2, stencil.M_bound)
        tau_max = cfl_tau_max(
            config.r, data.a, config.p, data.L_u0, data.L_f, config.T, kt, stencil.M_bound
        )
        if config.tau > tau_max * (1.0 + _REL_SLACK):
            raise ConfigurationError(
                f"tau = {config.tau} exceeds the theoretical bound {tau_max}"
            )
    if config.extension == "zero" and data.support_radius is not None:
        if data.support_radius + config.r > config.half_width + _REL_SLACK:
            raise ConfigurationError(
                f"support radius {data.support_radius} plus stencil radius "
                f"{config.r} does not fit in half_width {config.half_width}; "
                "the zero extension would clip the solution"
            )


def iter_levels(config: SchemeConfig, data: HolderData) -> Iterator[GridField]:
    """Yield ``U^0, U^1, ..., U^N`` one at a time.

    Streaming interface for long runs where materializing the whole
    trajectory would not fit in memory. The source is sampled once and
    reused across steps.
    """
    stencil = stencil_for(config)
    _validate_run(config, data, stencil)
    u, f = _initial_fields(config, data)
    yield u
    for j in range(1, config.N + 1):
        u = explicit_step(u, stencil, f, config.tau, step=j)
        yield u


@dataclass(frozen=True)
class Trajectory:
    """All time levels of one run: ``levels[j]`` holds ``U^j`` at time
    ``times[j] = j * tau``."""

    levels: tuple
    times: np.ndarray
    config: SchemeConfig

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) != self.config.N + 1:
            raise ConfigurationError(
                f"expected {self.config.N + 1} levels, got {len(self.levels)}"
            )
        t = np.asarray(self.times, dtype=float)
        if t.shape != (self.config.N + 1,):
            raise ConfigurationError("times must have length N + 1")
        object.__setattr__(self, "times", t)

    def level(self, j: int) -> GridField:
        return self.levels[j]


def solve(config: SchemeConfig, data: HolderData) -> Trajectory:
    """Run the scheme to time ``T`` and keep every level."""
    levels = list(iter_levels(config, data))
    return Trajectory(levels=tuple(levels), times=config.times(), config=config)


def time_interpolate(traj: Trajectory, x_alpha, t) -> float:
    """Piecewise-linear-in-time interpolant at node ``x_alpha``.

        U(x, t) = ((t_{j+1} - t)/tau) U^j(x) + ((t - t_j)/tau) U^{j+1}(x)

    for ``t`` between ``t_j`` and ``t_{j+1}``. Values at the level times
    (including t = 0 and t = T) are returned exactly, not through the
    weighted form. ``t`` outside [0, T] raises ValueError.
    """
    cfg = traj.config
    t = float(t)
    if t < 0.0 or t > cfg.T:
        raise ValueError(f"t = {t} outside [0, {cfg.T}]")
    slot = traj.levels[0]._slot(x_alpha)
    j = min(int(math.floor(t / cfg.tau)), cfg.N - 1)
    tj = traj.times[j]
    tj1 = traj.times[j + 1]
    if t == tj:
        return float(traj.levels[j].values[slot])
    if t == tj1:
        return float(traj.levels[j + 1].values[slot])
    lo = float(traj.levels[j].values[slot])
    hi = float(traj.levels[j + 1].values[slot])
    return ((tj1 - t) / cfg.tau) * lo + ((t - tj) / cfg.tau) * hi


def constant_data(u0_value=0.0, f_value=0.0) -> HolderData:
    """Spatially constant datum and source; the solution is the line
    ``u0 + t * f``."""
    u0_value = float(u0_value)
    f_value = float(f_value)

    def u0(*coords):
        return np.full_like(coords[0], u0_value)

    def f(*coords):
        return np.full_like(coords[0], f_value)

    return HolderData(
        u0=u0,
        f=f,
        a=1.0,
        L_u0=0.0,
        L_f=0.0,
        sup_u0=abs(u0_value),
        sup_f=abs(f_value),
    )


def tent_data(height=1.0) -> HolderData:
    """1D tent ``u0 = height * max(0, 1 - |x|)``, zero source."""
    height = float(height)
    if not (height > 0.0):
        raise ConfigurationError(f"height must be positive (got {height})")

    def u0(x):
        return height * np.maximum(0.0, 1.0 - np.abs(x))

    def f(x):
        return np.zeros_like(x)

    return HolderData(u0=u0, f=f, a=1.0, L_u0=height, L_f=0.0, sup_u0=height, sup_f=0.0)


def sqrt_cusp_data() -> HolderData:
    """1D datum ``u0 = sqrt(|x|) * (1 - |x|)_+`` with Hoelder exponent 1/2.

    The 1/2-seminorm of sqrt(|x|) is 1 and the cutoff is bounded by 1 and
    Lipschitz, so L_u0 = 2 certifies the product on the unit interval. The
    maximum sits at |x| = 1/3.
    """

    def u0(x):
        return np.sqrt(np.abs(x)) * np.maximum(0.0, 1.0 - np.abs(x))

    def f(x):
        return np.zeros_like(x)

    return HolderData(
        u0=u0,
        f=f,
        a=0.5,
        L_u0=2.0,
        L_f=0.0,
        sup_u0=2.0 / (3.0 * math.sqrt(3.0)),
        sup_f=0.0,
    )


def oscillatory_data(h, amplitude=1.0) -> HolderData:
    """Checkerboard datum ``u0 = A * cos(pi x / h)``: alternating signs on a
    grid of spacing h. Useful for demonstrating step-size violations."""
    h = float(h)
    amplitude = float(amplitude)
    if not (h > 0.0 and amplitude > 0.0):
        raise ConfigurationError("h and amplitude must be positive")

    def u0(x):
        return amplitude * np.cos(math.pi * x / h)

    def f(x):
        return np.zeros_like(x)

    return HolderData(
        u0=u0,
        f=f,
        a=1.0,
        L_u0=amplitude * math.pi / h,
        L_f=0.0,
        sup_u0=amplitude,
        sup_f=0.0,
    )
