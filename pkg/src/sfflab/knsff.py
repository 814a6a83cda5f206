"""Neighbor-resolved spectral form factors and their extrema.

The contribution of all spacings at distance k to the form factor is

    S_k(t) = (2 / N^2) * sum_i cos(t * s_i),      s_i = e_{i+k} - e_i,

averaged over an ensemble.  Its ensemble mean factorizes as
``coefficient(n, k) * kernel(t)`` where the kernel is the cosine
transform of the spacing distribution at distance k.  For the Gaussian
ensembles the kernel has a closed form in terms of a Laguerre function
of (generally non-integer) degree, with a Gaussian-envelope-times-
oscillation approximation that becomes exact at large k; for Poisson
levels it is a Lorentzian envelope times a non-periodic cosine.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .ensembles import EnsembleKind
from .spacings import surmise_params
from .specfun import DEFAULT_SERIES, PrecisionLossWarning, SeriesControl, laguerre_fn
from .unfold import UnfoldedSpectrum

LINEAR = "linear"
LOGARITHMIC = "logarithmic"

# Chunk sizes bounding the cos/exp work matrices in ensemble averages
# (fixed constants, so results do not depend on problem partitioning).
_T_CHUNK = 128
_VAL_CHUNK = 32768


def _cosine_sum(t: np.ndarray, flat_values: np.ndarray) -> np.ndarray:
    """sum_j cos(t * v_j) for every t, chunked to bound memory."""
    acc = np.zeros_like(t)
    for lo in range(0, len(t), _T_CHUNK):
        block = t[lo : lo + _T_CHUNK]
        part = np.zeros_like(block)
        for vlo in range(0, len(flat_values), _VAL_CHUNK):
            chunk = flat_values[vlo : vlo + _VAL_CHUNK]
            part += np.cos(block[:, None] * chunk[None, :]).sum(axis=1)
        acc[lo : lo + _T_CHUNK] = part
    return acc


class NoMinimumError(ValueError):
    """The requested curve has no interior minimum (Poisson k=1)."""


class BoundaryMinimumError(ValueError):
    """Grid minimum sits on the boundary; no bracketed interior minimum."""


@dataclass(frozen=True)
class TimeGrid:
    kind: str
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if self.kind not in (LINEAR, LOGARITHMIC):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if self.kind == LOGARITHMIC and self.t_min <= 0:
            raise ValueError("logarithmic grids need t_min > 0")
        if self.t_min < 0 or self.t_max <= self.t_min:
            raise ValueError("need 0 <= t_min < t_max")

    def times(self) -> np.ndarray:
        if self.kind == LINEAR:
            return np.linspace(self.t_min, self.t_max, self.n_points)
        return np.geomspace(self.t_min, self.t_max, self.n_points)


def linear_grid(t_min: float, t_max: float, n_points: int = 2000) -> TimeGrid:
    return TimeGrid(LINEAR, t_min, t_max, n_points)


def log_grid(t_min: float = 1e-2, t_max: float = 1e3, n_points: int = 600) -> TimeGrid:
    return TimeGrid(LOGARITHMIC, t_min, t_max, n_points)


@dataclass
class Curve:
    """Sampled real time series on a grid."""

    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )

    @property
    def times(self) -> np.ndarray:
        return self.grid.times()

    def scaled(self, factor: float, label: str | None = None) -> "Curve":
        return Curve(self.grid, factor * self.values, self.label if label is None else label)


def coefficient(n: int, k: int) -> float:
    """Prefactor 2 (N - k) / N^2 counting spacings at distance k."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= {n - 1}, got {k}")
    return 2.0 * (n - k) / n**2


def _as_level_arrays(spectra: Iterable) -> np.ndarray:
    rows = []
    for s in spectra:
        rows.append(s.energies if isinstance(s, UnfoldedSpectrum) else np.asarray(s, float))
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise ValueError("all spectra must have the same dimension")
    return arr


def knsff_numeric(spectra: Sequence, k: int, grid: TimeGrid) -> Curve:
    """Ensemble-averaged distance-k form factor of sampled spectra.

    Accepts UnfoldedSpectrum objects or plain sorted level arrays, all
    of one dimension.  The average runs in realization order so the
    result is a pure function of the input sequence.
    """
    levels = _as_level_arrays(spectra)
    n_real, n = levels.shape
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= {n - 1}, got {k}")
    spac = (levels[:, k:] - levels[:, :-k]).ravel()  # realization-major order
    values = (2.0 / (n**2 * n_real)) * _cosine_sum(grid.times(), spac)
    return Curve(grid, values, label=f"knsff numeric k={k}")


def kernel_exact(k: int, beta: int, t, ctrl: SeriesControl = DEFAULT_SERIES):
    """Cosine transform of the surmise density, exact Laguerre form.

    Equals one at t = 0 for every (k, beta) and decays under the
    Gaussian envelope exp(-omega^2 t^2 / (4 alpha)).
    """
    p = surmise_params(k, beta)
    log_pref = 0.5 * math.log(math.pi * p.alpha / 2) + math.log(k) - math.log(p.omega)
    pref = math.exp(log_pref)

    def _one(ti):
        z = p.omega**2 * ti**2 / (2 * p.alpha)
        # The envelope exp(-z/2) is below 1e-17 past z = 80 while the
        # series terms near e^z head for overflow; the transform is
        # numerically zero there.
        if z > 80.0:
            return 0.0
        # Near zeros of the oscillating Laguerre function the series
        # cancellation ratio spikes, but the exp(-z) damping keeps the
        # absolute error negligible; silence the relative-loss warning.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionLossWarning)
            lag = laguerre_fn(p.alpha / 2, -0.5, z, ctrl)
        return pref * math.exp(-z) * lag

    if np.isscalar(t) or np.ndim(t) == 0:
        return _one(float(t))
    return np.array([_one(float(ti)) for ti in np.asarray(t, dtype=float)])


def kernel_approx(k: int, beta: int, t):
    """High-degree approximation of the same transform (vectorized).

    Gaussian envelope times a cosine at the carrier frequency plus a
    small time-dependent sine correction:

        exp(-w^2 t^2 / (4 a)) * [cos(w t)
            + (w t / (12 a)) (w^2 t^2 / (2 a) - 3) sin(w t)].

    Relative accuracy is O(1/alpha); already good at k ~ 5.
    """
    p = surmise_params(k, beta)
    t = np.asarray(t, dtype=float)
    wt = p.omega * t
    x = wt**2 / (2 * p.alpha)
    out = np.exp(-x / 2) * (np.cos(wt) + wt / (12 * p.alpha) * (x - 3) * np.sin(wt))
    if out.ndim == 0:
        return float(out)
    return out


# Exact Laguerre evaluation is used up to this k in 'auto' mode; beyond
# it the approximation is both accurate and far cheaper.
AUTO_EXACT_MAX_K = 5


def knsff_analytic(k: int, beta: int, n: int, grid: TimeGrid, mode: str = "auto") -> Curve:
    """Closed-form ensemble-averaged distance-k form factor, RMT."""
    c = coefficient(n, k)
    t = grid.times()
    if mode == "auto":
        mode = "exact" if k <= AUTO_EXACT_MAX_K else "approx"
    if mode == "exact":
        vals = kernel_exact(k, beta, t)
    elif mode == "approx":
        vals = kernel_approx(k, beta, t)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Curve(grid, c * vals, label=f"knsff analytic k={k} beta={beta}")


def knsff_poisson(k: int, n: int, grid: TimeGrid) -> Curve:
    """Closed-form distance-k form factor for uncorrelated levels.

    Lorentzian envelope times a cosine with a compressed argument:
    coefficient * cos(k arctan t) / (1 + t^2)^(k/2).
    """
    c = coefficient(n, k)
    t = grid.times()
    vals = c * np.cos(k * np.arctan(t)) / (1 + t**2) ** (k / 2)
    return Curve(grid, vals, label=f"knsff poisson k={k}")


def min_time(k: int, kind: EnsembleKind) -> float:
    """Location of the first minimum of the distance-k form factor.

    Gaussian ensembles: pi / omega_k, where omega_k -> k at large k, so
    the minimum time is essentially ensemble independent.  Poisson:
    tan(pi / (1 + k)) exactly; the k = 1 curve is monotone and has no
    minimum.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind is EnsembleKind.POISSON:
        if k == 1:
            raise NoMinimumError("the Poisson nearest-neighbor form factor has no dip")
        return math.tan(math.pi / (1 + k))
    return math.pi / surmise_params(k, kind.beta).omega


def min_value(k: int, kind: EnsembleKind, n: int) -> float:
    """Depth of that minimum, including the 2(N-k)/N^2 prefactor."""
    c = coefficient(n, k)
    if kind is EnsembleKind.POISSON:
        if k == 1:
            raise NoMinimumError("the Poisson nearest-neighbor form factor has no dip")
        u = math.pi / (1 + k)
        return c * math.cos(u) ** k * math.cos(k * math.pi / (k + 1))
    beta = kind.beta
    return -c * math.exp(-math.pi**2 / (2 * k * (beta * k + beta + 2)))


def min_time_numeric(curve: Curve) -> float:
    """Grid argmin refined by a parabola through the bracketing samples."""
    v = curve.values
    i = int(np.argmin(v))
    if i == 0 or i == len(v) - 1:
        raise BoundaryMinimumError("minimum sits on the grid boundary")
    t = curve.times
    t0, t1, t2 = t[i - 1], t[i], t[i + 1]
    v0, v1, v2 = v[i - 1], v[i], v[i + 1]
    denom = (t1 - t0) * (v1 - v2) - (t1 - t2) * (v1 - v0)
    if denom == 0:
        return float(t1)
    shift = ((t1 - t0) ** 2 * (v1 - v2) - (t1 - t2) ** 2 * (v1 - v0)) / (2 * denom)
    return float(t1 - shift)


def deepest_k_root(kind: EnsembleKind, n: int) -> float:
    """Continuous solution of k^2 (2 + beta + beta k) = N pi^2.

    Locates the neighbor distance with the deepest form-factor minimum;
    beta = 0 (Poisson) reduces it to pi sqrt(N / 2).  Scales as N^(1/3)
    for the Gaussian ensembles and N^(1/2) for Poisson.
    """
    if n < 10:
        raise ValueError("n must be >= 10")
    beta = kind.beta
    target = n * math.pi**2
    if beta == 0:
        return math.sqrt(target / 2)
    return brentq(lambda k: k * k * (2 + beta + beta * k) - target, 1e-9, float(10 * n))


def _round_ties_down(x: float) -> int:
    base = math.floor(x)
    return base + 1 if (x - base) > 0.5 else base


def _expansion_kstar(kind: EnsembleKind, n: int) -> float:
    if kind is EnsembleKind.POISSON:
        return math.pi / math.sqrt(2) * math.sqrt(n) - (1 + math.pi**2 / 4)
    b = kind.beta
    c13 = (math.pi**2 / b) ** (1 / 3)
    c0 = -(b + 2) / (3 * b)
    cm13 = ((2 + b) ** 2 - 3 * b * math.pi**2) / (9 * b ** (5 / 3) * math.pi ** (2 / 3))
    return c13 * n ** (1 / 3) + c0 + cm13 * n ** (-1 / 3)


def deepest_k(kind: EnsembleKind, n: int, method: str = "analytic_expansion") -> int:
    """Neighbor distance whose form factor dips the deepest.

    Methods: ``analytic_expansion`` (large-N series, rounded),
    ``cubic_root`` (numerical root of the location equation, rounded),
    ``numeric_argmin`` (direct minimum of min_value over k).  Rounding
    breaks exact ties toward smaller k.
    """
    if n < 10:
        raise ValueError("n must be >= 10")
    if method == "analytic_expansion":
        est = _expansion_kstar(kind, n)
    elif method == "cubic_root":
        est = deepest_k_root(kind, n)
    elif method == "numeric_argmin":
        k_lo = 2 if kind is EnsembleKind.POISSON else 1
        ks = range(k_lo, n)
        return min(ks, key=lambda k: (min_value(k, kind, n), k))
    else:
        raise ValueError(f"unknown method {method!r}")
    return max(1, min(n - 1, _round_ties_down(est)))


def envelope_width(k: int, beta: int) -> float:
    """Std of the Gaussian envelope, sqrt(2 alpha) / omega -> sqrt(beta)."""
    p = surmise_params(k, beta)
    return math.sqrt(2 * p.alpha) / p.omega


def oscillation_count(k: int, beta: int) -> float:
    """Oscillations per envelope width: sqrt(2 alpha) / (2 pi) ~ k sqrt(beta)/(2 pi)."""
    p = surmise_params(k, beta)
    return math.sqrt(2 * p.alpha) / (2 * math.pi)
