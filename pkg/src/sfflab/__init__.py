"""Neighbor-resolved spectral form factor toolkit.

Decomposes the spectral form factor of Gaussian random-matrix, Poisson
and disordered spin-chain spectra into the contributions of k-th
neighbor level spacings, with closed forms, Monte-Carlo pipelines and
time-scale extractors for the dip and Thouless times.
"""

__version__ = "0.1.0"

from .ensembles import (
    EnsembleKind,
    SamplerConfig,
    SpectrumSample,
    derive_seed,
    sample_spectrum,
    semicircle_density,
)
from .knsff import (
    Curve,
    TimeGrid,
    coefficient,
    deepest_k,
    envelope_width,
    kernel_approx,
    kernel_exact,
    knsff_analytic,
    knsff_numeric,
    knsff_poisson,
    linear_grid,
    log_grid,
    min_time,
    min_time_numeric,
    min_value,
    oscillation_count,
)
from .assembly import (
    connected_sff,
    delta_sff,
    dip_time,
    even_odd_sums,
    full_sff_analytic,
    full_sff_numeric,
    full_sff_poisson,
    partial_sff,
    thouless_time,
    toy_sff,
)
from .spacings import (
    SpacingSeries,
    SurmiseParams,
    empirical_hist,
    extract_spacings,
    poisson_knls_pdf,
    surmise_params,
    surmise_pdf,
)
from .unfold import (
    UnfoldedSpectrum,
    unfold_analytic,
    unfold_identity,
    unfold_polynomial,
    unfold_quality,
)
from .xxz import XxzParams, build_basis, build_hamiltonian, disorder_pipeline, r_statistic

__all__ = [name for name in dir() if not name.startswith("_")]
