"""Discrete p-Laplace operators on uniform grids.

The operator acts on node values ``U`` over the lattice ``h * Z^d`` as

    (D U)(x) = sum_beta  jp(U(x + h*beta) - U(x)) * w_beta,

where ``jp(xi) = |xi|^(p-2) * xi`` and the weights ``w`` are nonnegative,
symmetric under ``beta -> -beta``, and supported in a ball of radius ``r``.
Two constructions are provided: the two-point stencil in one dimension
(``r = h``) and the uniform ball stencil for ``d >= 2``, whose common weight
is calibrated through the constant ``dpd_constant(d, p)`` so that the
operator is consistent with the p-Laplacian on smooth functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DegenerateStencilError

# Above this exponent the signed power runs through exp/log to dodge
# intermediate overflow; below it, plain powers keep small integer cases
# (heat equation, cubic stencils on dyadic grids) exact in floating point.
_LOG_SPACE_P = 32.0

# multiplicative slack for validation of float identities
_REL_SLACK = 1e-12


def _check_p(p) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 2.0:
        raise ValueError(f"p must be ≥ 2 (got {p})")
    return p


def _signed_power(xi, p):
    # no input validation: hot path shared by apply_dp and apply_dp_grid;
    # overflow to inf is deliberate and caught by the blow-up check
    if p == 2.0:
        return xi
    ax = np.abs(xi)
    if p <= _LOG_SPACE_P:
        with np.errstate(over="ignore"):
            return ax ** (p - 2.0) * xi
    with np.errstate(divide="ignore", over="ignore"):
        mag = np.exp((p - 1.0) * np.log(ax))
    return np.sign(xi) * mag


def jp(xi, p):
    """Signed power ``jp(xi) = |xi|^(p-2) * xi`` for ``p >= 2``.

    Odd and nondecreasing in ``xi`` with ``jp(0) = 0``; the identity map at
    ``p = 2`` (returned without any arithmetic, so results are bit-exact).
    For large ``p`` the power is evaluated as ``sign(xi) * exp((p-1) *
    log|xi|)``; magnitudes whose (p-1)-th power underflows come back as
    signed zero, which is harmless inside the scheme.

    Accepts a scalar or an ndarray. Raises ``ValueError`` for ``p < 2`` or
    non-finite input.
    """
    p = _check_p(p)
    arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("jp requires finite input")
    out = _signed_power(arr, p)
    if np.isscalar(xi) or arr.ndim == 0:
        return float(out)
    return out


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer (got {d})")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def dpd_constant(d: int, p) -> float:
    """Normalizing constant for the uniform ball stencil.

    Equals ``d/(2(d+p))`` times the average of ``|y_1|^p`` over the unit
    sphere, evaluated in closed form through Gamma functions:

        (d / (4 sqrt(pi))) * ((p-1)/(d+p)) * G(d/2) G((p-1)/2) / G((d+p)/2).

    Relative accuracy is well below 1e-12 over the supported range.
    """
    p = _check_p(p)
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer (got {d})")
    d = int(d)
    front = d / (4.0 * math.sqrt(math.pi)) * (p - 1.0) / (d + p)
    if (d + p) / 2.0 < 170.0:
        ratio = math.gamma(d / 2.0) * math.gamma((p - 1.0) / 2.0) / math.gamma((d + p) / 2.0)
    else:
        ratio = math.gamma(d / 2.0) * math.exp(
            math.lgamma((p - 1.0) / 2.0) - math.lgamma((d + p) / 2.0)
        )
    return front * ratio


def couple_h_to_r(r, p, d: int, c=0.1):
    """Mesh size ``h`` matched to a ball radius ``r`` for ``d >= 2``.

    Returns ``min(c * r^gamma, r / sqrt(d))`` with the consistency exponent
    ``gamma = p/(p-1)`` for ``p`` in (2, 3] and ``gamma = 3/2`` otherwise
    (including ``p = 2``). The clamp keeps the ball stencil admissible.
    """
    p = _check_p(p)
    r = float(r)
    c = float(c)
    if not (r > 0.0) or not math.isfinite(r):
        raise ValueError(f"r must be positive (got {r})")
    if not (c > 0.0) or not math.isfinite(c):
        raise ValueError(f"c must be positive (got {c})")
    if int(d) != d or d < 2:
        raise ValueError(f"couple_h_to_r needs integer d >= 2 (got {d})")
    if 2.0 < p <= 3.0:
        gamma = p / (p - 1.0)
    else:
        gamma = 1.5
    return min(c * r**gamma, r / math.sqrt(d))


def grid_radius(h, half_width) -> int:
    """Number of nodes per side of the origin: ``n = floor(L/h)``.

    The additive fudge absorbs divisions like 2/0.04 that land a few ulp
    below an integer.
    """
    return int(math.floor(float(half_width) / float(h) + 1e-9))


def grid_axis(h, half_width) -> np.ndarray:
    """Node coordinates ``-n*h, ..., 0, ..., n*h`` along one axis."""
    n = grid_radius(h, half_width)
    return np.arange(-n, n + 1, dtype=float) * float(h)


_EXTENSIONS = ("zero", "boundary")


@dataclass(frozen=True)
class GridField:
    """Node values on the uniform grid ``h * Z^d`` inside ``[-L, L]^d``.

    ``values[i_1, ..., i_d]`` holds the node ``alpha = (i_1 - n, ...,
    i_d - n)`` with ``n = floor(L/h)``. Reads outside the box follow the
    extension rule: ``"zero"`` (constant zero) or ``"boundary"`` (clamp to
    the nearest edge node, i.e. constant boundary trace along each axis).
    All values are required to be finite.
    """

    d: int
    h: float
    half_width: float
    values: np.ndarray
    extension: str = "zero"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"d must be a positive integer (got {self.d})")
        object.__setattr__(self, "d", int(self.d))
        h = float(self.h)
        L = float(self.half_width)
        if not (h > 0.0) or not math.isfinite(h):
            raise ConfigurationError(f"h must be positive (got {h})")
        if not math.isfinite(L) or L < h:
            raise ConfigurationError(f"half_width must be at least h (got {L} < {h})")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "half_width", L)
        if self.extension not in _EXTENSIONS:
            raise ConfigurationError(
                f"extension must be one of {_EXTENSIONS} (got {self.extension!r})"
            )
        v = np.asarray(self.values, dtype=float)
        n = grid_radius(h, L)
        want = (2 * n + 1,) * self.d
        if v.shape != want:
            raise ConfigurationError(
                f"values shape {v.shape} does not match grid shape {want}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("grid field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        """Index radius: valid node indices run over ``[-n, n]^d``."""
        return grid_radius(self.h, self.half_width)

    def axis(self) -> np.ndarray:
        return grid_axis(self.h, self.half_width)

    def with_values(self, values) -> "GridField":
        return replace(self, values=values)

    def _slot(self, alpha) -> tuple:
        """Positional index of node ``alpha``; raises if out of range."""
        alpha = _as_index(alpha, self.d)
        n = self.n
        for a in alpha:
            if a < -n or a > n:
                raise ValueError(f"node index {alpha} outside grid of radius {n}")
        return tuple(a + n for a in alpha)

    def value_at(self, alpha) -> float:
        return float(self.values[self._slot(alpha)])

    def read_index(self, alpha) -> float:
        """Node value honoring the extension rule for out-of-range indices."""
        alpha = _as_index(alpha, self.d)
        n = self.n
        slot = []
        for a in alpha:
            i = a + n
            if 0 <= i <= 2 * n:
                slot.append(i)
            elif self.extension == "zero":
                return 0.0
            else:
                slot.append(min(max(i, 0), 2 * n))
        return float(self.values[tuple(slot)])

    def shifted(self, beta) -> np.ndarray:
        """Array of ``U(. + h*beta)`` read with the extension rule."""
        beta = _as_index(beta, self.d)
        size = self.values.shape[0]
        if self.extension == "zero":
            out = np.zeros_like(self.values)
            src = []
            dst = []
            for b in beta:
                lo, hi = max(b, 0), min(size + b, size)
                if lo >= hi:
                    return out
                src.append(slice(lo, hi))
                dst.append(slice(lo - b, hi - b))
            out[tuple(dst)] = self.values[tuple(src)]
            return out
        idx = [np.clip(np.arange(size) + b, 0, size - 1) for b in beta]
        return self.values[np.ix_(*idx)]


def _as_index(alpha, d: int) -> tuple:
    if np.isscalar(alpha):
        alpha = (alpha,)
    alpha = tuple(int(a) for a in np.asarray(alpha).ravel())
    if len(alpha) != d:
        raise ValueError(f"index vector {alpha} does not have dimension {d}")
    return alpha


def sample_on_grid(fn, d: int, h, half_width, extension="zero") -> GridField:
    """Evaluate ``fn`` on the grid and wrap the result in a GridField.

    ``fn`` receives one coordinate array per axis (meshgrid convention,
    ``indexing="ij"``); scalar-valued callables are broadcast.
    """
    ax = grid_axis(h, half_width)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    vals = np.asarray(fn(*grids), dtype=float)
    shape = (len(ax),) * d
    if vals.shape != shape:
        vals = np.broadcast_to(vals, shape).copy()
    return GridField(d=d, h=h, half_width=half_width, values=vals, extension=extension)


@dataclass(frozen=True)
class Stencil:
    """Offsets and weights of a discrete p-Laplace operator.

    Offsets are lexicographically sorted integer vectors; ``apply_dp``
    accumulates contributions in exactly that order, so node results are
    bit-reproducible run to run. Weights are nonnegative, symmetric under
    negation, exclude the origin, stay supported in the ball ``|h*beta| <=
    r``, and sum to at most ``M_bound * r^-p``.
    """

    d: int
    h: float
    r: float
    p: float
    offsets: np.ndarray
    weights: np.ndarray
    M_bound: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConfigurationError(f"d must be a positive integer (got {self.d})")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", _check_p(self.p))
        for name in ("h", "r", "M_bound"):
            val = float(getattr(self, name))
            if not (val > 0.0) or not math.isfinite(val):
                raise ConfigurationError(f"{name} must be positive (got {val})")
            object.__setattr__(self, name, val)
        off = np.asarray(self.offsets, dtype=np.int64).reshape(-1, self.d)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if off.shape[0] == 0:
            raise DegenerateStencilError("stencil has no offsets")
        if off.shape[0] != w.shape[0]:
            raise ConfigurationError("offsets and weights disagree in length")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ConfigurationError("weights must be finite and nonnegative")
        rows = [tuple(row) for row in off]
        if any(all(b == 0 for b in row) for row in rows):
            raise ConfigurationError("the zero offset is not allowed")
        if rows != sorted(rows):
            raise ConfigurationError("offsets must be lexicographically sorted")
        if len(set(rows)) != len(rows):
            raise ConfigurationError("duplicate offsets")
        table = dict(zip(rows, w))
        for row, weight in table.items():
            neg = tuple(-b for b in row)
            if neg not in table or table[neg] != weight:
                raise ConfigurationError(f"weights not symmetric at offset {row}")
        reach2 = (self.h**2) * np.sum(off.astype(float) ** 2, axis=1)
        if np.any(reach2 > self.r**2 * (1.0 + _REL_SLACK) ** 2):
            raise ConfigurationError("an offset reaches outside the ball of radius r")
        bound = self.M_bound * self.r ** (-self.p)
        if float(np.sum(w)) > bound * (1.0 + _REL_SLACK):
            raise ConfigurationError(
                f"weight sum {np.sum(w)} exceeds M_bound * r^-p = {bound}"
            )
        off.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.offsets.shape[0]


def stencil_1d(h, p) -> Stencil:
    """Two-point stencil in one dimension: weights ``1/h^p`` at offsets
    -1 and +1, radius ``r = h``, weight-sum constant ``M_bound = 2``.
    """
    h = float(h)
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError(f"h must be positive (got {h})")
    p = _check_p(p)
    w = h ** (-p)
    return Stencil(
        d=1,
        h=h,
        r=h,
        p=p,
        offsets=np.array([[-1], [1]], dtype=np.int64),
        weights=np.array([w, w]),
        M_bound=2.0,
    )


def stencil_ball(r, h, p, d: int) -> Stencil:
    """Uniform ball stencil for ``d >= 2``.

    Collects every lattice offset with ``0 < |h*beta| < r`` (strictly) and
    gives each the weight ``h^d / (dpd_constant(d,p) * omega_d * r^(p+d))``,
    where ``omega_d`` is the unit ball volume. Requires ``h <= r/sqrt(d)``
    so the ball contains at least one full cube of neighbors.
    """
    p = _check_p(p)
    r = float(r)
    h = float(h)
    if int(d) != d or d < 2:
        raise ValueError(f"stencil_ball needs integer d >= 2 (got {d})")
    d = int(d)
    if not (r > 0.0 and h > 0.0) or not (math.isfinite(r) and math.isfinite(h)):
        raise ValueError(f"r and h must be positive (got r={r}, h={h})")
    if h > r / math.sqrt(d) * (1.0 + _REL_SLACK):
        raise ConfigurationError(
            f"h must satisfy h <= r/sqrt(d) = {r / math.sqrt(d):.6g} (got h={h})"
        )
    m = int(math.floor(r / h + 1e-9))
    r2 = r * r
    offsets = []
    for beta in itertools.product(range(-m, m + 1), repeat=d):
        if all(b == 0 for b in beta):
            continue
        if h * h * sum(b * b for b in beta) < r2:
            offsets.append(beta)
    if not offsets:
        raise DegenerateStencilError(
            f"no lattice offsets inside the ball (r={r}, h={h}, d={d})"
        )
    offsets.sort()
    w = h**d / (dpd_constant(d, p) * unit_ball_volume(d) * r ** (p + d))
    weights = np.full(len(offsets), w)
    return Stencil(
        d=d,
        h=h,
        r=r,
        p=p,
        offsets=np.array(offsets, dtype=np.int64),
        weights=weights,
        M_bound=2.0**d / dpd_constant(d, p),
    )


def _check_geometry(stencil: Stencil, field: GridField) -> None:
    if stencil.d != field.d or stencil.h != field.h:
        raise ConfigurationError(
            f"stencil (d={stencil.d}, h={stencil.h}) does not match "
            f"field (d={field.d}, h={field.h})"
        )


def apply_dp(stencil: Stencil, field: GridField, alpha) -> float:
    """Discrete operator at a single node ``alpha``.

    Contributions are accumulated in the stencil's canonical offset order,
    the same order apply_dp_grid uses, so repeated calls on the same inputs
    reproduce bit for bit.
    """
    _check_geometry(stencil, field)
    alpha = _as_index(alpha, field.d)
    center = field.value_at(alpha)
    acc = 0.0
    for k in range(len(stencil)):
        beta = stencil.offsets[k]
        neighbor = field.read_index(tuple(alpha[i] + int(beta[i]) for i in range(field.d)))
        acc += float(_signed_power(np.float64(neighbor - center), stencil.p)) * float(
            stencil.weights[k]
        )
    return acc


def apply_dp_grid(stencil: Stencil, field: GridField) -> np.ndarray:
    """Discrete operator on every node at once.

    Vectorized over the grid but with the same per-node accumulation order
    as apply_dp: one offset at a time, lexicographically.
    """
    _check_geometry(stencil, field)
    acc = np.zeros_like(field.values)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(len(stencil)):
            shift = field.shifted(stencil.offsets[k])
            acc += _signed_power(shift - field.values, stencil.p) * stencil.weights[k]
    return acc
