"""Disordered XXZ spin-chain pipeline.

Spin-1/2 chain with nearest-neighbor exchange, anisotropy Jz on the
z-z coupling, periodic boundaries and random on-site z fields drawn
uniformly from [-W/2, W/2].  Total magnetization is conserved, so the
Hamiltonian is assembled directly in the half-filling sector of
dimension binomial(L, L/2).  Weak disorder breaks integrability
(GOE-like spectral statistics); strong disorder restores Poisson-like
statistics, and the pipeline quantifies where a given chain sits via
the r-ratio, neighbor form factors and their time scales.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .ensembles import EnsembleKind, derive_seed
from .knsff import Curve, TimeGrid, knsff_numeric, min_time_numeric
from .assembly import (
    PartialSffResult,
    full_sff_numeric,
    timescale_report,
)
from .spacings import extract_spacings
from .unfold import polynomial_staircase_map

# Spacings below this threshold count as degenerate and are excluded
# from the r-ratio (with the exclusion reported).
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class XxzParams:
    sites: int
    jz: float = 1.0
    disorder: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.sites % 2 != 0 or self.sites < 2:
            raise ValueError("sites must be a positive even integer")
        if self.periodic and self.sites < 4:
            raise ValueError("periodic chains need sites >= 4 (bond double counting)")
        if self.disorder < 0:
            raise ValueError("disorder width must be >= 0")


@dataclass
class SectorBasis:
    """All half-filling bit patterns of an L-site chain, ascending."""

    sites: int
    states: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.states)


@dataclass
class DisorderRealization:
    fields: np.ndarray
    seed: int

    def __post_init__(self):
        self.fields = np.asarray(self.fields, dtype=float)


def build_basis(sites: int) -> SectorBasis:
    """Enumerate the zero-magnetization sector states as sorted integers."""
    if sites % 2 != 0 or not 2 <= sites <= 20:
        raise ValueError("sites must be even and between 2 and 20")
    n_up = sites // 2
    states = [s for s in range(1 << sites) if bin(s).count("1") == n_up]
    return SectorBasis(sites=sites, states=np.array(states, dtype=np.int64))


def sample_disorder(params: XxzParams, seed: int) -> DisorderRealization:
    rng = np.random.default_rng(seed)
    w = params.disorder
    return DisorderRealization(fields=rng.uniform(-w / 2, w / 2, size=params.sites), seed=seed)


def build_hamiltonian(
    params: XxzParams, disorder: DisorderRealization, basis: SectorBasis
) -> np.ndarray:
    """Real symmetric sector Hamiltonian.

    Bit n set means spin up at site n (S^z eigenvalue +1/2).  Adjacent
    opposite spins exchange with amplitude 1/2; the diagonal carries
    Jz * (+-1/4) per bond plus the on-site fields times +-1/2.
    """
    L = params.sites
    if len(disorder.fields) != L:
        raise ValueError("disorder realization does not match the chain length")
    states = basis.states
    index = {int(s): i for i, s in enumerate(states)}
    dim = basis.dim
    h = np.zeros((dim, dim))
    bonds = [(n, (n + 1) % L) for n in range(L if params.periodic else L - 1)]
    fields = disorder.fields
    for i, s in enumerate(map(int, states)):
        diag = 0.0
        for n in range(L):
            diag += fields[n] * (0.5 if (s >> n) & 1 else -0.5)
        for n, m in bonds:
            bn = (s >> n) & 1
            bm = (s >> m) & 1
            if bn == bm:
                diag += params.jz * 0.25
            else:
                diag -= params.jz * 0.25
                flipped = s ^ ((1 << n) | (1 << m))
                j = index.get(flipped)
                if j is None:
                    raise RuntimeError("spin flip left the magnetization sector")
                h[i, j] += 0.5
        h[i, i] = diag
    return h


def spectrum_window(eigenvalues: np.ndarray, n_window: int) -> np.ndarray:
    """The n_window consecutive levels centered at index floor(D/2)."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    d = len(eigenvalues)
    if n_window > d:
        raise ValueError(f"window of {n_window} exceeds spectrum size {d}")
    start = d // 2 - n_window // 2
    return eigenvalues[start : start + n_window]


class RRatio(NamedTuple):
    value: float
    n_excluded: int


def r_statistic(spacings: Sequence[float]) -> RRatio:
    """Mean of min(s_i, s_{i+1}) / max(s_i, s_{i+1}) over consecutive pairs.

    Pairs containing a (near-)degenerate spacing are excluded and
    counted.  Reference values: ~0.5307 for GOE, ~0.3863 for Poisson.
    """
    s = np.asarray(spacings, dtype=float)
    if len(s) < 2:
        raise ValueError("need at least two spacings")
    a, b = s[:-1], s[1:]
    ok = (a > _DEGENERACY_TOL) & (b > _DEGENERACY_TOL)
    n_excluded = int(len(a) - ok.sum())
    if ok.sum() == 0:
        raise ValueError("all spacing pairs are degenerate")
    r = np.minimum(a[ok], b[ok]) / np.maximum(a[ok], b[ok])
    return RRatio(value=float(r.mean()), n_excluded=n_excluded)


# Unfolding fits this many extra levels around the analysis window and
# discards half of the surplus per edge afterwards.
FIT_MARGIN = 100
UNFOLD_ORDER = 3


def realization_levels(
    params: XxzParams,
    basis: SectorBasis,
    seed: int,
    n_window: int,
    eta: int = UNFOLD_ORDER,
) -> tuple[np.ndarray, RRatio]:
    """One disorder realization: windowed unfolded levels and its r-ratio.

    Diagonalizes the sector Hamiltonian, takes a fit window of
    n_window + FIT_MARGIN central levels, unfolds it with a polynomial
    staircase fit, then keeps the central n_window unfolded levels so
    the fit edges never enter the statistics.  The r-ratio comes from
    the raw spacings of the retained window (it is unfolding
    insensitive).
    """
    disorder = sample_disorder(params, seed)
    ham = build_hamiltonian(params, disorder, basis)
    evals = np.linalg.eigvalsh(ham)
    d = len(evals)
    if n_window > d:
        raise ValueError(f"window of {n_window} exceeds sector dimension {d}")
    fit_count = min(d, n_window + FIT_MARGIN)
    fit_levels = spectrum_window(evals, fit_count)
    unfolded = polynomial_staircase_map(fit_levels, eta)
    unfolded = np.sort(unfolded)
    edge = (fit_count - n_window) // 2
    kept = unfolded[edge : edge + n_window]
    raw_kept = fit_levels[edge : edge + n_window]
    r = r_statistic(np.diff(raw_kept))
    return kept, r


@dataclass
class XxzResult:
    """Disorder-averaged output of the chain pipeline."""

    params: XxzParams
    n_window: int
    n_realizations: int
    master_seed: int
    epsilon: float
    r_mean: float
    r_excluded: int
    curves: dict  # k -> averaged neighbor Curve
    min_times: dict  # k -> refined numeric minimum time (or None)
    min_values: dict  # k -> minimum value of the averaged curve
    k_star: int
    sff: Curve
    timescales: PartialSffResult


def _kstar_from_levels(levels: np.ndarray, n_window: int, k_max: int) -> int:
    """Neighbor distance whose averaged form factor dips deepest.

    Scans a per-k grid around the expected minimum near pi/k; adjacent
    k share the same realizations, so their noise largely cancels.
    """
    n_real = levels.shape[0]
    deepest_k, deepest_v = 1, np.inf
    for k in range(1, k_max + 1):
        t_hat = math.pi / k
        t = np.linspace(0.5 * t_hat, 1.7 * t_hat, 80)
        spac = (levels[:, k:] - levels[:, :-k]).ravel()
        vals = (2.0 / (n_window**2 * n_real)) * np.cos(t[:, None] * spac[None, :]).sum(axis=1)
        v = vals.min()
        if v < deepest_v:
            deepest_k, deepest_v = k, float(v)
    return deepest_k


def disorder_pipeline(
    params: XxzParams,
    n_window: int,
    n_realizations: int,
    master_seed: int,
    grid: TimeGrid,
    k_list: Sequence[int],
    epsilon: float = 0.2,
    k_scan_max: int | None = None,
    reference: EnsembleKind = EnsembleKind.GOE,
    workers: int = 1,
) -> XxzResult:
    """Full disorder-averaged analysis of one parameter point.

    Realizations are independent jobs seeded by derive_seed(master, i);
    all averages reduce in realization order, so the result is a pure
    function of (params, n_window, n_realizations, master_seed).
    """
    basis = build_basis(params.sites)
    seeds = [derive_seed(master_seed, i) for i in range(n_realizations)]
    if workers > 1:
        from .parallel import map_indexed

        rows = map_indexed(
            _levels_job,
            [(params, seed, n_window) for seed in seeds],
            workers=workers,
        )
    else:
        rows = [realization_levels(params, basis, seed, n_window) for seed in seeds]
    levels = np.array([r[0] for r in rows])
    r_values = [r[1] for r in rows]
    r_mean = float(np.mean([r.value for r in r_values]))
    r_excluded = int(sum(r.n_excluded for r in r_values))

    curves: dict[int, Curve] = {}
    min_times: dict[int, float | None] = {}
    min_values: dict[int, float] = {}
    for k in k_list:
        curve = knsff_numeric(levels, k, grid)
        curves[k] = curve
        min_values[k] = float(curve.values.min())
        # refine the minimum on a dedicated linear grid around pi/k
        t_hat = math.pi / k if k > 1 else math.pi
        fine = TimeGrid("linear", 0.4 * t_hat, 1.8 * t_hat, 200)
        fine_curve = knsff_numeric(levels, k, fine)
        try:
            min_times[k] = min_time_numeric(fine_curve)
        except ValueError:
            min_times[k] = None

    if k_scan_max is None:
        k_scan_max = min(n_window - 1, 60)
    k_star = _kstar_from_levels(levels, n_window, k_scan_max)

    sff = full_sff_numeric(levels, grid)
    scales = timescale_report(sff, reference, n_window, epsilon, cutoff=n_window - 1)
    return XxzResult(
        params=params,
        n_window=n_window,
        n_realizations=n_realizations,
        master_seed=master_seed,
        epsilon=epsilon,
        r_mean=r_mean,
        r_excluded=r_excluded,
        curves=curves,
        min_times=min_times,
        min_values=min_values,
        k_star=k_star,
        sff=sff,
        timescales=scales,
    )


def _levels_job(args):
    params, seed, n_window = args
    basis = build_basis(params.sites)
    return realization_levels(params, basis, seed, n_window)
