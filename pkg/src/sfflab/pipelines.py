"""Seeded ensemble pipelines shared by the command line, tests and demos.

Each realization is an independent job keyed by derive_seed(master, i);
reductions run in realization order, so every pipeline output is a pure
function of its arguments regardless of how many workers ran it.
"""

import numpy as np

from .ensembles import EnsembleKind, derive_seed, sample_spectrum
from .knsff import Curve, TimeGrid, _cosine_sum
from .parallel import map_indexed
from .unfold import unfold_analytic, unfold_identity


def unfolded_realization(kind: EnsembleKind, n: int, seed: int) -> np.ndarray:
    """Sample one spectrum and unfold it (semicircle CDF, or identity for Poisson)."""
    sample = sample_spectrum(kind, n, seed)
    if kind is EnsembleKind.POISSON:
        return unfold_identity(sample).energies
    return unfold_analytic(sample).energies


def _unfolded_job(args):
    kind, n, seed = args
    return unfolded_realization(kind, n, seed)


def sample_unfolded_levels(
    kind: EnsembleKind,
    n: int,
    n_realizations: int,
    master_seed: int,
    workers: int = 1,
) -> np.ndarray:
    """(realizations, n) array of unfolded levels, reproducible by seed."""
    seeds = [derive_seed(master_seed, i) for i in range(n_realizations)]
    rows = map_indexed(_unfolded_job, [(kind, n, s) for s in seeds], workers=workers)
    return np.array(rows)


def exponential_chain_levels(
    n: int, n_realizations: int, master_seed: int
) -> np.ndarray:
    """Spectra with independent unit-exponential spacings.

    The stationary uncorrelated-level model behind the closed-form
    Poisson results: every distance-k spacing is exactly Gamma(k, 1),
    free of the finite-support transients a uniform box of levels
    carries.  Used to validate the Poisson closed forms by simulation.
    """
    rows = []
    for i in range(n_realizations):
        rng = np.random.default_rng(derive_seed(master_seed, i))
        rows.append(np.cumsum(rng.exponential(1.0, size=n)))
    return np.array(rows)


def per_realization_knsff(levels: np.ndarray, k: int, grid: TimeGrid) -> np.ndarray:
    """(realizations, times) neighbor form factor of each realization."""
    levels = np.asarray(levels, dtype=float)
    n_real, n = levels.shape
    t = grid.times()
    out = np.empty((n_real, len(t)))
    for i in range(n_real):
        spac = levels[i, k:] - levels[i, :-k]
        out[i] = (2.0 / n**2) * _cosine_sum(t, spac)
    return out
