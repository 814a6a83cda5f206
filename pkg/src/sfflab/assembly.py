"""Assembling complete form factors from neighbor contributions.

The full form factor of a dimension-N spectrum decomposes exactly as

    S(t) = 1/N + sum_{k=1}^{N-1} S_k(t),

so summing analytic neighbor contributions reproduces slope, dip, ramp
and plateau.  This module provides the numeric and closed-form sums,
partial sums with a neighbor cutoff K, even/odd-k split sums, the
universal connected form factors used as ramp references, the dip and
Thouless time extractors, a chained-nearest-neighbor toy model, and the
neighbor decomposition of operator autocorrelation functions.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ensembles import EnsembleKind
from .knsff import (
    AUTO_EXACT_MAX_K,
    Curve,
    TimeGrid,
    _as_level_arrays,
    _cosine_sum,
    _T_CHUNK,
    coefficient,
    kernel_approx,
    kernel_exact,
    knsff_poisson,
)
from .spacings import surmise_params
from .specfun import DEFAULT_SERIES, SeriesControl, hyp1f1

# Heisenberg/plateau time of a unit-mean-spacing spectrum.
PLATEAU_TIME = 2 * math.pi

# Finite stand-in for the connected GSE value at its log singularity.
_GSE_CAP_NUMERATOR = 1e6

_REAL_CHUNK = 64


class NoRelativeMaximumError(ValueError):
    """The curve is monotone on the grid; no interior relative maximum."""


class NeverBelowError(ValueError):
    """The log-distance curve never settles below the tolerance."""


class UndefinedCurveError(ValueError):
    """Every point of the curve is undefined (non-positive input)."""


# ---------------------------------------------------------------------------
# full and partial form factors


def full_sff_numeric(spectra: Sequence, grid: TimeGrid) -> Curve:
    """Ensemble-averaged |sum_j exp(-i E_j t)|^2 / N^2 of sampled spectra."""
    levels = _as_level_arrays(spectra)
    n_real, n = levels.shape
    t = grid.times()
    acc = np.zeros_like(t)
    for lo in range(0, len(t), _T_CHUNK):
        block = t[lo : lo + _T_CHUNK]
        part = np.zeros_like(block)
        for rlo in range(0, n_real, _REAL_CHUNK):
            rows = levels[rlo : rlo + _REAL_CHUNK]
            z = np.exp(-1j * block[:, None, None] * rows[None, :, :]).sum(axis=2)
            part += (z.real**2 + z.imag**2).sum(axis=1)
        acc[lo : lo + _T_CHUNK] = part
    return Curve(grid, acc / (n_real * n**2), label="sff numeric")


def _rmt_kernel(k: int, beta: int, t: np.ndarray, mode: str, ctrl: SeriesControl):
    if mode == "exact" or (mode == "auto" and k <= AUTO_EXACT_MAX_K):
        return kernel_exact(k, beta, t, ctrl)
    return kernel_approx(k, beta, t)


def full_sff_analytic(
    beta: int,
    n: int,
    grid: TimeGrid,
    mode: str = "auto",
    ctrl: SeriesControl = DEFAULT_SERIES,
) -> Curve:
    """Closed-form Gaussian-ensemble form factor, 1/N plus all neighbor sums."""
    if beta not in (1, 2, 4):
        raise ValueError(f"beta must be one of {{1, 2, 4}}, got {beta}")
    t = grid.times()
    total = np.full_like(t, 1.0 / n)
    for k in range(1, n):
        total += coefficient(n, k) * _rmt_kernel(k, beta, t, mode, ctrl)
    return Curve(grid, total, label=f"sff analytic beta={beta}")


def full_sff_poisson(n: int, grid: TimeGrid) -> Curve:
    """Closed-form Poisson form factor; decays to 1/N with no dip."""
    if n < 2:
        raise ValueError("n must be >= 2")
    t = grid.times()
    total = np.full_like(t, 1.0 / n)
    for k in range(1, n):
        total += knsff_poisson(k, n, grid).values
    return Curve(grid, total, label="sff poisson")


def partial_sff(knsff_curves: Sequence[Curve], cutoff: int, n: int) -> Curve:
    """1/N plus the first ``cutoff`` neighbor contributions.

    ``knsff_curves[i]`` must be the distance-(i+1) contribution; cutoff 0
    returns the constant plateau 1/N and cutoff N-1 the full sum.
    """
    if not 0 <= cutoff <= n - 1:
        raise ValueError(f"cutoff must be in [0, {n - 1}], got {cutoff}")
    if len(knsff_curves) < cutoff:
        raise ValueError(f"need {cutoff} neighbor curves, got {len(knsff_curves)}")
    if cutoff == 0:
        if not knsff_curves:
            raise ValueError("need at least one curve to supply the grid for cutoff 0")
        grid = knsff_curves[0].grid
        return Curve(grid, np.full(grid.n_points, 1.0 / n), label="partial sff K=0")
    grid = knsff_curves[0].grid
    total = np.full(grid.n_points, 1.0 / n)
    for c in knsff_curves[:cutoff]:
        if c.grid != grid:
            raise ValueError("all neighbor curves must share one grid")
        total += c.values
    return Curve(grid, total, label=f"partial sff K={cutoff}")


def analytic_knsff_family(
    beta: int, n: int, grid: TimeGrid, k_max: int | None = None, mode: str = "auto"
) -> list[Curve]:
    """Closed-form neighbor contributions for k = 1 .. k_max (default N-1)."""
    k_max = n - 1 if k_max is None else k_max
    t = grid.times()
    return [
        Curve(grid, coefficient(n, k) * _rmt_kernel(k, beta, t, mode, DEFAULT_SERIES),
              label=f"knsff analytic k={k}")
        for k in range(1, k_max + 1)
    ]


def even_odd_sums(
    grid: TimeGrid,
    *,
    beta: int | None = None,
    n: int | None = None,
    spectra: Sequence | None = None,
    mode: str = "auto",
) -> tuple[Curve, Curve]:
    """Even-k and odd-k neighbor sums, each offset by 1/(2N).

    The two return curves add up to the full form factor.  Around t=pi
    the even sum shows a constructive resonance and the odd sum an
    anti-resonance; for GSE a second constructive feature sits at 2 pi.
    """
    t = grid.times()
    if spectra is not None:
        levels = _as_level_arrays(spectra)
        n_real, n = levels.shape
        even = np.full_like(t, 1.0 / (2 * n))
        odd = np.full_like(t, 1.0 / (2 * n))
        for k in range(1, n):
            spac = (levels[:, k:] - levels[:, :-k]).ravel()
            term = (2.0 / (n**2 * n_real)) * _cosine_sum(t, spac)
            if k % 2 == 0:
                even += term
            else:
                odd += term
    else:
        if beta is None or n is None:
            raise ValueError("need either spectra or (beta, n)")
        even = np.full_like(t, 1.0 / (2 * n))
        odd = np.full_like(t, 1.0 / (2 * n))
        for k in range(1, n):
            term = coefficient(n, k) * _rmt_kernel(k, beta, t, mode, DEFAULT_SERIES)
            if k % 2 == 0:
                even += term
            else:
                odd += term
    return (
        Curve(grid, even, label="even neighbors"),
        Curve(grid, odd, label="odd neighbors"),
    )


# ---------------------------------------------------------------------------
# connected form factors and time scales


def connected_sff(kind: EnsembleKind, n: int, t):
    """Universal connected form factor, scaled so the plateau is 1/N.

    Piecewise ramp/plateau forms for GOE, GUE, GSE; the GSE branch has
    a log singularity at t = 2 pi which is capped at a large finite
    value so downstream log-ratios stay finite.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    tp = PLATEAU_TIME
    if kind is EnsembleKind.GUE:
        out = np.where(t_arr <= tp, t_arr / (tp * n), 1.0 / n)
    elif kind is EnsembleKind.GOE:
        ramp = t_arr / (math.pi * n) - t_arr / (tp * n) * np.log1p(t_arr / math.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            plat = 2.0 / n - t_arr / (tp * n) * np.log(
                (t_arr + math.pi) / np.where(t_arr > math.pi, t_arr - math.pi, 1.0)
            )
        out = np.where(t_arr <= tp, ramp, plat)
    elif kind is EnsembleKind.GSE:
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = np.abs(1.0 - t_arr / tp)
            body = t_arr / (2 * tp * n) - t_arr / (4 * tp * n) * np.log(arg)
        body = np.where(arg == 0, _GSE_CAP_NUMERATOR / n, body)
        out = np.where(t_arr <= 2 * tp, body, 1.0 / n)
    else:
        raise ValueError("connected form factor is defined for GOE, GUE, GSE only")
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(out[0])
    return out


def delta_sff(curve: Curve, kind: EnsembleKind, n: int) -> Curve:
    """|log10(S / b)| against the connected reference, NaN where S <= 0.

    A partial sum with a finite neighbor cutoff oscillates below zero,
    so the log-distance is left undefined (NaN) at those points.
    """
    t = curve.times
    b = connected_sff(kind, n, t)
    s = curve.values
    out = np.full_like(s, np.nan)
    ok = (s > 0) & (b > 0)
    out[ok] = np.abs(np.log10(s[ok] / b[ok]))
    if not np.any(ok):
        raise UndefinedCurveError("form factor is non-positive on the whole grid")
    return Curve(curve.grid, out, label=f"delta vs {kind.value}")


def _run_compressed(values: np.ndarray):
    """(start_index, value) of each run of consecutive equal values."""
    starts = [0]
    for i in range(1, len(values)):
        if values[i] != values[starts[-1]]:
            starts.append(i)
    return starts


def relative_maxima(curve: Curve) -> list[int]:
    """Indices of interior relative maxima (strict; plateaus count once,
    at their left edge)."""
    v = curve.values
    starts = _run_compressed(v)
    out = []
    for j in range(1, len(starts) - 1):
        prev_v = v[starts[j - 1]]
        this_v = v[starts[j]]
        next_v = v[starts[j + 1]]
        if this_v > prev_v and this_v > next_v:
            out.append(starts[j])
    return out


def dip_time(curve: Curve) -> float:
    """Time of the smallest-valued interior relative maximum.

    Past this time every local maximum of the (noisy, oscillating)
    curve grows, marking the onset of the ramp.  Ties resolve to the
    earliest time.
    """
    peaks = relative_maxima(curve)
    if not peaks:
        raise NoRelativeMaximumError("curve has no interior relative maximum")
    t = curve.times
    v = curve.values
    best = min(peaks, key=lambda i: (v[i], t[i]))
    return float(t[best])


def thouless_time(delta: Curve, epsilon: float) -> float:
    """Time after which the log-distance stays below epsilon.

    Returns the last downward epsilon-crossing, linearly interpolated
    between the final grid point at or above epsilon and the next
    defined point below it.  Undefined (NaN) points are skipped.  If
    the curve never reaches epsilon the first defined time is returned;
    if it is still at or above epsilon at the final defined point,
    NeverBelowError is raised.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    v = delta.values
    t = delta.times
    defined = np.flatnonzero(np.isfinite(v))
    if len(defined) == 0:
        raise UndefinedCurveError("log-distance is undefined on the whole grid")
    above = defined[v[defined] >= epsilon]
    if len(above) == 0:
        return float(t[defined[0]])
    i = above[-1]
    later = defined[defined > i]
    if len(later) == 0:
        raise NeverBelowError(f"log-distance is still >= {epsilon} at the final grid point")
    j = later[0]
    frac = (v[i] - epsilon) / (v[i] - v[j])
    return float(t[i] + frac * (t[j] - t[i]))


@dataclass
class PartialSffResult:
    """A neighbor-cutoff form factor with its extracted time scales."""

    cutoff: int
    curve: Curve
    epsilon: float
    t_dip: float | None = None
    t_thouless: float | None = None
    plateau_time: float = PLATEAU_TIME


def timescale_report(
    partial: Curve, kind: EnsembleKind, n: int, epsilon: float, cutoff: int
) -> PartialSffResult:
    """Dip and Thouless times of a partial form factor; None if undefined."""
    try:
        t_dip = dip_time(partial)
    except NoRelativeMaximumError:
        t_dip = None
    try:
        t_th = thouless_time(delta_sff(partial, kind, n), epsilon)
    except (NeverBelowError, UndefinedCurveError):
        t_th = None
    return PartialSffResult(
        cutoff=cutoff, curve=partial, epsilon=epsilon, t_dip=t_dip, t_thouless=t_th
    )


# ---------------------------------------------------------------------------
# toy model: correlations between nearest neighbors only


def toy_transform(beta: int, t, ctrl: SeriesControl = DEFAULT_SERIES):
    """Complex Fourier transform of the nearest-neighbor surmise density.

    Both real and imaginary parts are confluent hypergeometric series;
    chaining k independent nearest-neighbor spacings multiplies the
    transform k-fold (convolution theorem).
    """
    decay = surmise_params(1, beta).decay
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(len(t_arr), dtype=complex)
    for i, ti in enumerate(t_arr):
        z = -(ti**2) / (4 * decay)
        re = hyp1f1((beta + 1) / 2, 0.5, z, ctrl)
        im = -ti * hyp1f1(beta / 2 + 1, 1.5, z, ctrl)
        out[i] = re + 1j * im
    if np.isscalar(t) or np.ndim(t) == 0:
        return complex(out[0])
    return out


def toy_term(beta: int, n: int, k: int, grid: TimeGrid) -> Curve:
    """Distance-k contribution of the chained-spacing toy model."""
    f = toy_transform(beta, grid.times())
    return Curve(grid, coefficient(n, k) * (f**k).real, label=f"toy k={k}")


def toy_sff(beta: int, n: int, grid: TimeGrid) -> Curve:
    """Form factor of a spectrum with independent surmise spacings.

    Shows a correlation hole but no linear ramp: nearest-neighbor
    statistics alone do not reproduce the chaotic form factor.
    """
    if beta not in (1, 2, 4):
        raise ValueError(f"beta must be one of {{1, 2, 4}}, got {beta}")
    f = toy_transform(beta, grid.times())
    total = np.full(grid.n_points, 1.0 / n)
    power = np.ones_like(f)
    for k in range(1, n):
        power = power * f
        total += coefficient(n, k) * power.real
    return Curve(grid, total, label=f"toy sff beta={beta}")


# ---------------------------------------------------------------------------
# autocorrelation decomposition


@dataclass
class AutocorrResult:
    """Neighbor decomposition of an operator autocorrelation function."""

    diag_term: float
    coefficients: np.ndarray  # index k-1 holds the distance-k weight
    curves: dict = field(default_factory=dict)  # k -> Curve
    total: Curve | None = None


def autocorr_decompose(
    op: np.ndarray,
    grid: TimeGrid,
    *,
    spectra: Sequence | None = None,
    beta: int | None = None,
    mode: str = "auto",
) -> AutocorrResult:
    """Split Tr(O O(t)) / Tr(O^2) into neighbor-distance channels.

    The time-independent diagonal weight and the per-distance weights

        O_k = (2 / norm^2) * sum_i |O[i, i+k]|^2

    multiply either the closed-form kernels (pass ``beta``) or the
    empirical cosine averages of the supplied spectra.  The sum of the
    diagonal term and all channels reconstructs the full
    autocorrelation function exactly.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("operator must be a square matrix")
    n = op.shape[0]
    mag2 = np.abs(op) ** 2
    scale = mag2.max()
    if scale == 0:
        raise ValueError("operator is zero")
    if not np.allclose(mag2, mag2.T, atol=1e-12 * scale):
        raise ValueError("operator must have |O_ij| = |O_ji|")
    norm2 = mag2.sum()
    diag_term = float(np.trace(mag2) / norm2)
    coeffs = np.array(
        [2.0 * np.trace(mag2, offset=k) / norm2 for k in range(1, n)]
    )

    t = grid.times()
    curves: dict[int, Curve] = {}
    total = np.full_like(t, diag_term)
    active = [k for k in range(1, n) if coeffs[k - 1] > 0]
    if spectra is not None:
        levels = _as_level_arrays(spectra)
        if levels.shape[1] != n:
            raise ValueError("spectra dimension does not match the operator")
        n_real = levels.shape[0]
        for k in active:
            w = np.asarray(np.diag(mag2, k=k), dtype=float)
            spac = levels[:, k:] - levels[:, :-k]
            acc = np.zeros_like(t)
            for lo in range(0, len(t), _T_CHUNK):
                block = t[lo : lo + _T_CHUNK]
                acc[lo : lo + _T_CHUNK] = (
                    np.cos(block[:, None, None] * spac[None, :, :]) * w[None, None, :]
                ).sum(axis=(1, 2))
            vals = (2.0 / (norm2 * n_real)) * acc
            curves[k] = Curve(grid, vals, label=f"autocorr k={k}")
            total += vals
    else:
        if beta is None:
            raise ValueError("need either spectra or beta")
        for k in active:
            vals = coeffs[k - 1] * _rmt_kernel(k, beta, t, mode, DEFAULT_SERIES)
            curves[k] = Curve(grid, vals, label=f"autocorr k={k}")
            total += vals
    return AutocorrResult(
        diag_term=diag_term,
        coefficients=coeffs,
        curves=curves,
        total=Curve(grid, total, label="autocorr total"),
    )
