"""Self-averaging diagnostics of the neighbor form factors.

The relative variance over the ensemble,

    R_k(t) = [<(S + off)^2> - <S + off>^2] / <S + off>^2,

is regularized by a constant offset because the ensemble mean of a
single neighbor contribution vanishes on the plateau.  The offset is
the plateau value 1/N shared among the N-1 neighbor channels with the
factor-two weighting the channels carry, off = 2 / (N (N-1)); with this
choice the plateau-averaged relative variance follows the linear law
(N - k)(N - 1) / (2 N) up to 1/N corrections, growing with N: the
neighbor form factors are never self-averaging.
"""

from dataclasses import dataclass

import numpy as np

from .knsff import Curve, TimeGrid


def plateau_offset(n: int) -> float:
    """Regularizing offset 2 / (N (N-1)) added to each sample."""
    return 2.0 / (n * (n - 1))


def predicted_plateau_relvar(k: int, n: int) -> float:
    """Closed-form plateau-averaged relative variance (N-k)(N-1)/(2N)."""
    return (n - k) * (n - 1) / (2.0 * n)


def relative_variance(
    sample_curves: np.ndarray, k: int, n: int, grid: TimeGrid, offset: float | None = None
) -> Curve:
    """Pointwise relative variance of per-realization neighbor curves.

    ``sample_curves`` has one row per realization, sampled on ``grid``.
    Points where the offset mean vanishes are NaN and skipped by the
    plateau average.
    """
    arr = np.asarray(sample_curves, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("need a (realizations, times) array with >= 2 realizations")
    if arr.shape[1] != grid.n_points:
        raise ValueError("sample curves do not match the grid")
    off = plateau_offset(n) if offset is None else offset
    shifted = arr + off
    m1 = shifted.mean(axis=0)
    m2 = (shifted**2).mean(axis=0)
    out = np.full_like(m1, np.nan)
    ok = m1 != 0
    out[ok] = (m2[ok] - m1[ok] ** 2) / m1[ok] ** 2
    return Curve(grid, out, label=f"relative variance k={k}")


def plateau_average(curve: Curve, t_start: float, span: float) -> float:
    """Trapezoidal time average of a curve over [t_start, t_start + span].

    Window endpoints are linearly interpolated onto the grid; NaN points
    inside the window are dropped.
    """
    t = curve.times
    t_end = t_start + span
    if t_start < t[0] or t_end > t[-1]:
        raise ValueError(
            f"window [{t_start}, {t_end}] outside the grid [{t[0]}, {t[-1]}]"
        )
    v = curve.values
    ok = np.isfinite(v)
    if ok.sum() < 2:
        raise ValueError("not enough defined points in the window")
    tt, vv = t[ok], v[ok]
    inside = (tt > t_start) & (tt < t_end)
    xs = np.concatenate(([t_start], tt[inside], [t_end]))
    ys = np.concatenate(
        ([np.interp(t_start, tt, vv)], vv[inside], [np.interp(t_end, tt, vv)])
    )
    return float(np.trapezoid(ys, xs) / span)


@dataclass
class RelVarReport:
    """Relative-variance curve plus its plateau summary for one k."""

    k: int
    n: int
    n_realizations: int
    curve: Curve
    window_start: float
    window_span: float
    plateau_avg: float
    predicted: float


def relvar_report(
    sample_curves: np.ndarray,
    k: int,
    n: int,
    grid: TimeGrid,
    window_start: float,
    window_span: float,
) -> RelVarReport:
    curve = relative_variance(sample_curves, k, n, grid)
    avg = plateau_average(curve, window_start, window_span)
    return RelVarReport(
        k=k,
        n=n,
        n_realizations=int(np.asarray(sample_curves).shape[0]),
        curve=curve,
        window_start=window_start,
        window_span=window_span,
        plateau_avg=avg,
        predicted=predicted_plateau_relvar(k, n),
    )
