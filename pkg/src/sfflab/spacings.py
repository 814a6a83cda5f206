"""k-th neighbor level spacings and their model distributions.

The spacing at distance k of a sorted spectrum is s_i = e_{i+k} - e_i.
For the Gaussian ensembles the distribution of s (unit mean spacing)
is well approximated by a generalized Wigner surmise

    P(s) = norm * s**alpha * exp(-decay * s**2),
    alpha = k (k+1) beta / 2 + k - 1,

with norm and decay fixed by unit normalization and mean k.  For
uncorrelated (Poisson) levels the k-th spacing is Gamma(k, 1).
All surmise constants are assembled in log space so that neighbor
distances up to several hundred stay finite.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import log_gamma
from .unfold import UnfoldedSpectrum

_LOG2 = math.log(2.0)


@dataclass
class SpacingSeries:
    """All spacings at one neighbor distance k (length N - k)."""

    k: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if np.any(self.values < 0):
            raise ValueError("spacings must be non-negative (is the input sorted?)")


@dataclass(frozen=True)
class SurmiseParams:
    """Parameters of P(s) = norm * s**alpha * exp(-decay * s**2).

    ``omega`` is the carrier frequency of the cosine transform of P,
    omega**2 = alpha / (2 * decay); it also sets the Gaussian envelope
    of that transform.  ``log_norm`` is stored instead of norm because
    the normalization underflows double precision for large k.
    """

    k: int
    beta: int
    alpha: float
    decay: float
    log_norm: float
    omega: float

    @property
    def norm(self) -> float:
        return math.exp(self.log_norm)


def surmise_params(k: int, beta: int) -> SurmiseParams:
    """Surmise constants for neighbor distance k and Dyson index beta."""
    if k < 1 or k != int(k):
        raise ValueError(f"k must be a positive integer, got {k}")
    if beta not in (1, 2, 4):
        raise ValueError(f"beta must be one of {{1, 2, 4}}, got {beta}")
    alpha = k * (k + 1) * beta // 2 + k - 1
    # log of sqrt(decay) = log[ Gamma(alpha/2 + 1) / (k Gamma((alpha+1)/2)) ]
    log_root = log_gamma(alpha / 2 + 1) - log_gamma((alpha + 1) / 2) - math.log(k)
    decay = math.exp(2 * log_root)
    log_norm = _LOG2 - log_gamma((alpha + 1) / 2) + (alpha + 1) * log_root
    omega = math.exp(0.5 * math.log(alpha / 2) - log_root)
    return SurmiseParams(
        k=int(k), beta=int(beta), alpha=float(alpha),
        decay=decay, log_norm=log_norm, omega=omega,
    )


def surmise_pdf(params: SurmiseParams, s):
    """Evaluate the surmise density at spacing s >= 0 (vectorized)."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(arr < 0):
        raise ValueError("spacings must be >= 0")
    out = np.zeros_like(arr)
    pos = arr > 0
    out[pos] = np.exp(
        params.log_norm + params.alpha * np.log(arr[pos]) - params.decay * arr[pos] ** 2
    )
    if np.isscalar(s) or np.ndim(s) == 0:
        return float(out[0])
    return out


def poisson_knls_pdf(k: int, s):
    """k-th neighbor spacing density of uncorrelated levels: Gamma(k, 1)."""
    if k < 1 or k != int(k):
        raise ValueError(f"k must be a positive integer, got {k}")
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(arr < 0):
        raise ValueError("spacings must be >= 0")
    if k == 1:
        out = np.exp(-arr)
    else:
        out = np.zeros_like(arr)
        pos = arr > 0
        out[pos] = np.exp((k - 1) * np.log(arr[pos]) - arr[pos] - log_gamma(k))
    if np.isscalar(s) or np.ndim(s) == 0:
        return float(out[0])
    return out


def extract_spacings(levels, k: int) -> SpacingSeries:
    """s_i = e_{i+k} - e_i of a sorted level sequence (array or UnfoldedSpectrum)."""
    if isinstance(levels, UnfoldedSpectrum):
        levels = levels.energies
    levels = np.asarray(levels, dtype=float)
    n = len(levels)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must satisfy 1 <= k <= {n - 1}, got {k}")
    return SpacingSeries(k=k, values=levels[k:] - levels[:-k])


@dataclass
class Histogram:
    """Equal-width histogram normalized to unit integral."""

    bin_edges: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def empirical_hist(series: SpacingSeries, n_bins: int, range=None) -> Histogram:
    """Density histogram of a spacing series."""
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if len(series.values) == 0:
        raise ValueError("cannot histogram an empty spacing series")
    density, edges = np.histogram(series.values, bins=n_bins, range=range, density=True)
    return Histogram(bin_edges=edges, density=density)
