"""Spectrum unfolding: map raw levels to unit mean spacing.

Gaussian-ensemble spectra unfold through the closed-form integrated
semicircle density; model spectra without a known density (the
disordered chain) use a least-squares polynomial fit of the cumulative
level staircase.  A histogram-difference quality metric compares the
two routes on random matrices.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleKind, SpectrumSample

ANALYTIC_SEMICIRCLE = "analytic_semicircle"
POLYNOMIAL_FIT = "polynomial_fit"
IDENTITY = "identity"

# Unfolded spectra should have mean spacing ~1; outside this band the
# unfolding is suspect and a warning is emitted.
_SANITY_BAND = (0.8, 1.2)


class UnfoldingSanityWarning(RuntimeWarning):
    """Unfolded mean spacing fell outside the [0.8, 1.2] sanity band."""


@dataclass(frozen=True)
class UnfoldingMethod:
    kind: str
    eta: int = 3
    n_bins: int = 50

    def __post_init__(self):
        if self.kind not in (ANALYTIC_SEMICIRCLE, POLYNOMIAL_FIT, IDENTITY):
            raise ValueError(f"unknown unfolding kind {self.kind!r}")
        if not 1 <= self.eta <= 12:
            raise ValueError(f"polynomial order eta must be in [1, 12], got {self.eta}")
        if self.n_bins < 2:
            raise ValueError("n_bins must be >= 2")


@dataclass
class UnfoldedSpectrum:
    """Dimensionless levels with unit mean spacing plus their origin."""

    energies: np.ndarray
    method: UnfoldingMethod
    source: SpectrumSample | None = None

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("unfolded energies must be non-decreasing")
        if len(self.energies) >= 2:
            mean = (self.energies[-1] - self.energies[0]) / (len(self.energies) - 1)
            if not _SANITY_BAND[0] <= mean <= _SANITY_BAND[1]:
                warnings.warn(
                    f"unfolded mean spacing {mean:.3f} outside sanity band {_SANITY_BAND}",
                    UnfoldingSanityWarning,
                    stacklevel=2,
                )

    def __len__(self):
        return len(self.energies)


def semicircle_cdf_map(energy, n: int, beta: int):
    """Integrated semicircle density times N, clipped to [0, N].

    Maps the support edge -sqrt(2 N beta) to 0 and +sqrt(2 N beta) to N;
    the center maps to N/2.
    """
    edge = math.sqrt(2.0 * n * beta)
    e = np.clip(np.asarray(energy, dtype=float), -edge, edge)
    out = n / 2 + (
        n * beta * np.arcsin(e / edge) + e / 2 * np.sqrt(np.maximum(2.0 * n * beta - e**2, 0.0))
    ) / (math.pi * beta)
    return np.clip(out, 0.0, float(n))


def unfold_analytic(sample: SpectrumSample, beta: int | None = None) -> UnfoldedSpectrum:
    """Unfold a Gaussian-ensemble spectrum through the semicircle CDF."""
    if beta is None:
        beta = sample.kind.beta
    if beta not in (1, 2, 4):
        raise ValueError(
            "analytic unfolding needs a Gaussian ensemble (beta in {1,2,4}); "
            "use identity unfolding for Poisson spectra"
        )
    levels = semicircle_cdf_map(sample.energies, sample.dim, beta)
    return UnfoldedSpectrum(levels, UnfoldingMethod(ANALYTIC_SEMICIRCLE), sample)


def unfold_identity(sample: SpectrumSample) -> UnfoldedSpectrum:
    """Pass levels through unchanged (uniform density already)."""
    return UnfoldedSpectrum(sample.energies.copy(), UnfoldingMethod(IDENTITY), sample)


def polynomial_staircase_map(energies: np.ndarray, eta: int) -> np.ndarray:
    """Fit the cumulative staircase E_i -> i - 1/2 with a degree-eta polynomial
    and evaluate it back on the levels."""
    energies = np.asarray(energies, dtype=float)
    n = len(energies)
    if eta < 1 or eta != int(eta):
        raise ValueError(f"polynomial order must be a positive integer, got {eta}")
    if n < 10 * eta:
        raise ValueError(f"need at least {10 * eta} levels for an order-{eta} fit, got {n}")
    if energies[-1] - energies[0] <= 0:
        raise ValueError("degenerate spectrum: all levels equal")
    counts = np.arange(n) + 0.5
    fit = np.polynomial.Polynomial.fit(energies, counts, deg=int(eta))
    return fit(energies)


def unfold_polynomial(sample: SpectrumSample, eta: int = 3, n_bins: int = 50) -> UnfoldedSpectrum:
    """Unfold by a polynomial fit of the level staircase.

    Non-monotone fits are re-sorted (with a warning); ``n_bins`` is
    recorded for the quality metric, it does not enter the fit.
    """
    levels = polynomial_staircase_map(sample.energies, eta)
    if np.any(np.diff(levels) < 0):
        warnings.warn(
            "polynomial unfolding was non-monotone; levels re-sorted",
            UnfoldingSanityWarning,
            stacklevel=2,
        )
        levels = np.sort(levels)
    return UnfoldedSpectrum(levels, UnfoldingMethod(POLYNOMIAL_FIT, eta=eta, n_bins=n_bins), sample)


def unfold_quality(
    sample: SpectrumSample,
    beta: int | None = None,
    eta: int = 3,
    n_bins: int = 50,
) -> float:
    """Squared histogram distance between analytic and polynomial unfolding.

    Both unfolded sets are histogrammed over their common range with
    ``n_bins`` equal bins; the quality is the sum of squared count
    differences (0 means the fit reproduces the analytic map exactly).
    """
    if n_bins < 10:
        raise ValueError("quality evaluation needs n_bins >= 10")
    ana = unfold_analytic(sample, beta).energies
    num = unfold_polynomial(sample, eta, n_bins).energies
    lo = min(ana[0], num[0])
    hi = max(ana[-1], num[-1])
    ca, _ = np.histogram(ana, bins=n_bins, range=(lo, hi))
    cn, _ = np.histogram(num, bins=n_bins, range=(lo, hi))
    return float(np.sum((ca - cn) ** 2))
