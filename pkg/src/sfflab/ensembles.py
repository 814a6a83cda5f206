"""Sampling of GOE/GUE/GSE/Poisson spectra with reproducible seeding.

Gaussian kinds are drawn by symmetrizing a matrix of independent unit
normals, ``H = (G + G^dag) / 2``, one standard normal per real part of
an entry.  This convention makes the mean level density the Wigner
semicircle on ``[-sqrt(2 N beta), +sqrt(2 N beta)]``.  GSE matrices are
built in the 2N x 2N complex embedding of quaternion entries; Kramers
partners are verified and deduplicated so a dimension-N sample is
returned for every kind.

The Poisson ensemble draws N independent levels uniformly on [0, N] so
that the raw mean spacing is already one and unfolding is the identity.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class KramersPairingError(RuntimeError):
    """GSE eigenvalues failed to come in degenerate pairs."""


class EnsembleKind(Enum):
    POISSON = "poisson"
    GOE = "goe"
    GUE = "gue"
    GSE = "gse"

    @property
    def beta(self) -> int:
        """Dyson index: 0 for Poisson, 1/2/4 for GOE/GUE/GSE."""
        return {"poisson": 0, "goe": 1, "gue": 2, "gse": 4}[self.value]

    @property
    def is_gaussian(self) -> bool:
        return self is not EnsembleKind.POISSON

    @classmethod
    def from_name(cls, name: str) -> "EnsembleKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown ensemble {name!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None

    @classmethod
    def from_beta(cls, beta: int) -> "EnsembleKind":
        by_beta = {0: cls.POISSON, 1: cls.GOE, 2: cls.GUE, 4: cls.GSE}
        if beta not in by_beta:
            raise ValueError(f"no ensemble with Dyson index beta={beta}")
        return by_beta[beta]


@dataclass
class SpectrumSample:
    """One sorted spectrum with the provenance needed to regenerate it."""

    kind: EnsembleKind
    dim: int
    energies: np.ndarray
    seed: int

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.energies.shape != (self.dim,):
            raise ValueError(
                f"expected {self.dim} energies, got shape {self.energies.shape}"
            )
        if np.any(np.diff(self.energies) <= 0):
            raise ValueError("energies must be strictly increasing")


@dataclass
class SamplerConfig:
    """A reproducible ensemble run: kind, dimension, count, master seed."""

    kind: EnsembleKind
    dim: int
    realizations: int
    master_seed: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")

    def seeds(self) -> list[int]:
        return [derive_seed(self.master_seed, i) for i in range(self.realizations)]


_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def derive_seed(master_seed: int, index: int) -> int:
    """Per-realization seed from a master seed, splitmix64 avalanche.

    Deterministic and collision-resistant, so realization ``index`` can
    be regenerated in isolation on any worker.
    """
    if index < 0:
        raise ValueError("index must be >= 0")
    z = (master_seed + (index + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def semicircle_density(energy, n: int, beta: int):
    """Wigner semicircle mean density sqrt(2 N beta - E^2) / (pi beta N).

    Zero outside the support; normalized to unit integral.
    """
    if beta not in (1, 2, 4):
        raise ValueError(f"semicircle_density requires beta in {{1,2,4}}, got {beta}")
    energy = np.asarray(energy, dtype=float)
    radic = 2.0 * n * beta - energy**2
    out = np.where(radic > 0, np.sqrt(np.maximum(radic, 0.0)) / (np.pi * beta * n), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _goe_matrix(n, rng):
    g = rng.standard_normal((n, n))
    return (g + g.T) / 2


def _gue_matrix(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def _gse_embedded_matrix(n, rng):
    # Quaternion entry q = a + b j with complex a, b maps to the 2x2 block
    # [[a, b], [-conj(b), conj(a)]]; the block layout below is the n x n
    # quaternion matrix written as a 2n x 2n complex one.
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    g = np.block([[a, b], [-b.conj(), a.conj()]])
    return (g + g.conj().T) / 2


def sample_spectrum(kind: EnsembleKind, n: int, seed: int) -> SpectrumSample:
    """Draw one sorted dimension-n spectrum of the given ensemble."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    if kind is EnsembleKind.POISSON:
        energies = np.sort(rng.uniform(0.0, n, size=n))
    elif kind is EnsembleKind.GSE:
        evals = np.linalg.eigvalsh(_gse_embedded_matrix(n, rng))
        width = evals[-1] - evals[0]
        gaps = evals[1::2] - evals[::2]
        if np.max(gaps) > 1e-6 * width:
            raise KramersPairingError(
                f"Kramers pair split {np.max(gaps):.3e} exceeds 1e-6 of width {width:.3e}"
            )
        energies = evals[::2]
    else:
        builder = _goe_matrix if kind is EnsembleKind.GOE else _gue_matrix
        energies = np.linalg.eigvalsh(builder(n, rng))
    return SpectrumSample(kind=kind, dim=n, energies=energies, seed=seed)


def sample_many(config: SamplerConfig) -> list[SpectrumSample]:
    """All realizations of a sampler config, in realization order."""
    return [
        sample_spectrum(config.kind, config.dim, s) for s in config.seeds()
    ]
