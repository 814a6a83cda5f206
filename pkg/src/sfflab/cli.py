"""Command-line front end.

One subcommand per analysis artifact; every run writes deterministic
data files plus a manifest.json carrying the configuration echo,
derived quantities and per-file checksums.  With a fixed seed the data
files are byte-identical across repeated runs and worker counts (the
worker pool size comes from the SFFLAB_WORKERS environment variable).

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

import argparse
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import assembly, io, knsff, pipelines, selfavg, xxz
from .ensembles import EnsembleKind, KramersPairingError, derive_seed, sample_spectrum
from .knsff import Curve, TimeGrid
from .parallel import worker_count
from .spacings import (
    SpacingSeries,
    empirical_hist,
    poisson_knls_pdf,
    surmise_params,
    surmise_pdf,
)
from .specfun import SeriesConvergenceError
from .unfold import unfold_analytic, unfold_identity, unfold_polynomial

DISPLAY_GRID = ("logarithmic", 1e-2, 1e3, 600)
EXTREMA_GRID = ("linear", 0.0, 4 * math.pi, 2000)

_EPSILON_DEFAULTS = {"goe": 0.1, "gue": 0.1, "gse": 0.25}
_XXZ_EPSILON = 0.2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    out_dir: Path
    fmt: str = "csv"
    ensemble: EnsembleKind | None = None
    dim: int | None = None
    realizations: int = 0
    k_list: list = field(default_factory=list)
    cutoff: int | None = None
    sweep: list = field(default_factory=list)
    grid: TimeGrid | None = None
    epsilon: float | None = None
    seed: int = 0
    n_bins: int = 50
    eta: int = 3
    method: str | None = None
    op_kind: str = "random"
    op_k: int = 1
    # xxz
    length: int | None = None
    jz: float = 1.0
    disorder: float = 0.0
    window: int | None = None


def _add_common(p, grid_default):
    p.add_argument("--out", default="sfflab_out", help="output directory")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", choices=("linear", "log"), default=None)
    p.add_argument("--tmin", type=float, default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.set_defaults(grid_default=grid_default)


def _add_ensemble(p, required=True):
    p.add_argument("--ensemble", required=required, choices=("poisson", "goe", "gue", "gse"))
    p.add_argument("--dim", type=int, required=required)


def _parse_k_list(text):
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad k list {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise UsageError(f"k list must hold positive integers, got {text!r}")
    return ks


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sfflab",
        description="Neighbor-resolved spectral form factor toolkit",
    )
    ap.add_argument("--version", action="version", version=f"sfflab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw and export raw spectra")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=1)
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("unfold", help="draw spectra and export unfolded levels")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=1)
    p.add_argument("--method", choices=("analytic", "polynomial", "identity"), default=None)
    p.add_argument("--eta", type=int, default=3)
    p.add_argument("--bins", type=int, default=50)
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("knls", help="neighbor spacing histograms vs model densities")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--k", default="1", help="comma list of neighbor distances")
    p.add_argument("--bins", type=int, default=50)
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("knsff", help="numeric and analytic neighbor form factors")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--k", default="1,5,20,40")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("sff", help="full form factor: numeric, analytic, connected")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=1000)
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("partial", help="neighbor-cutoff form factor")
    _add_ensemble(p)
    p.add_argument("--K", type=int, required=True, dest="cutoff")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("timescales", help="dip and Thouless times of partial sums")
    _add_ensemble(p)
    p.add_argument("--kmax", type=int, default=None, help="neighbor cutoff (default N-1)")
    p.add_argument("--sweep", default="", help="extra comma list of cutoffs")
    p.add_argument("--epsilon", type=float, default=None)
    _add_common(p, EXTREMA_GRID)

    p = sub.add_parser("evenodd", help="even/odd neighbor split of the form factor")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=0, help="0 = analytic sums")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("kstar", help="deepest neighbor distance")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=0, help="add a Monte-Carlo argmin")
    _add_common(p, EXTREMA_GRID)

    p = sub.add_parser("selfavg", help="relative variance of neighbor form factors")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--k", default="1")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("toy", help="chained nearest-neighbor toy form factor")
    _add_ensemble(p)
    p.add_argument("--k", default="", help="also export these single toy terms")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("autocorr", help="neighbor decomposition of an autocorrelation")
    _add_ensemble(p)
    p.add_argument("--realizations", type=int, default=0, help="0 = closed-form kernels")
    p.add_argument("--op", default="random", choices=("random", "neighbor", "identity"))
    p.add_argument("--op-k", type=int, default=1, dest="op_k")
    _add_common(p, DISPLAY_GRID)

    p = sub.add_parser("xxz", help="disordered XXZ chain pipeline")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--jz", type=float, default=1.0)
    p.add_argument("--disorder", type=float, default=1.0)
    p.add_argument("--window", type=int, default=200)
    p.add_argument("--realizations", type=int, default=150)
    p.add_argument("--k", default="1,10,30")
    p.add_argument("--epsilon", type=float, default=_XXZ_EPSILON)
    _add_common(p, DISPLAY_GRID)
    return ap


def _grid_from(ns) -> TimeGrid:
    kind, tmin, tmax, points = ns.grid_default
    if ns.grid is not None:
        kind = "logarithmic" if ns.grid == "log" else "linear"
        if kind == "logarithmic" and tmin == 0.0:
            tmin = 1e-2
    if ns.tmin is not None:
        tmin = ns.tmin
    if ns.tmax is not None:
        tmax = ns.tmax
    if ns.points is not None:
        points = ns.points
    return TimeGrid(kind, tmin, tmax, points)


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(command=ns.command, out_dir=Path(ns.out), fmt=ns.format, seed=ns.seed)
    cfg.grid = _grid_from(ns)
    if ns.command == "xxz":
        if ns.length % 2 != 0:
            raise UsageError(f"--length must be even, got {ns.length}")
        cfg.length = ns.length
        cfg.jz = ns.jz
        cfg.disorder = ns.disorder
        cfg.window = ns.window
        cfg.realizations = ns.realizations
        cfg.k_list = _parse_k_list(ns.k)
        cfg.epsilon = ns.epsilon
        return cfg
    cfg.ensemble = EnsembleKind.from_name(ns.ensemble)
    cfg.dim = ns.dim
    if cfg.dim < 2:
        raise UsageError(f"--dim must be >= 2, got {cfg.dim}")
    cfg.realizations = getattr(ns, "realizations", 0)
    if hasattr(ns, "k") and ns.k:
        cfg.k_list = _parse_k_list(ns.k)
    for k in cfg.k_list:
        if k > cfg.dim - 1:
            raise UsageError(f"k={k} exceeds dim-1={cfg.dim - 1}")
    cfg.cutoff = getattr(ns, "cutoff", None)
    if cfg.cutoff is not None and not 0 <= cfg.cutoff <= cfg.dim - 1:
        raise UsageError(f"--K must be in [0, {cfg.dim - 1}]")
    if hasattr(ns, "kmax"):
        cfg.cutoff = ns.kmax if ns.kmax is not None else cfg.dim - 1
        cfg.sweep = _parse_k_list(ns.sweep) if ns.sweep else []
    if getattr(ns, "epsilon", None) is not None:
        cfg.epsilon = ns.epsilon
    elif cfg.ensemble.is_gaussian:
        cfg.epsilon = _EPSILON_DEFAULTS[cfg.ensemble.value]
    cfg.n_bins = getattr(ns, "bins", 50)
    cfg.eta = getattr(ns, "eta", 3)
    cfg.method = getattr(ns, "method", None)
    cfg.op_kind = getattr(ns, "op", "random")
    cfg.op_k = getattr(ns, "op_k", 1)
    if ns.command in ("toy", "timescales", "partial", "autocorr") and not cfg.ensemble.is_gaussian:
        if ns.command != "partial":
            raise UsageError(f"{ns.command} needs a Gaussian ensemble (GOE/GUE/GSE)")
    return cfg


# ---------------------------------------------------------------------------
# emit helpers


def _emit_curve(files, out, name, curve: Curve, fmt):
    path = out / f"{name}.{'csv' if fmt == 'csv' else 'json'}"
    if fmt == "csv":
        io.write_curve_csv(path, curve)
    else:
        io.write_json(path, {"t": list(map(float, curve.times)),
                             "values": list(map(float, curve.values))})
    files.append(path)


def _emit_multi(files, out, name, times, columns, fmt):
    path = out / f"{name}.{'csv' if fmt == 'csv' else 'json'}"
    if fmt == "csv":
        io.write_multi_curve_csv(path, times, columns)
    else:
        io.write_json(path, {"t": list(map(float, times)),
                             **{k: list(map(float, v)) for k, v in columns.items()}})
    files.append(path)


def _config_echo(cfg: RunConfig) -> dict:
    grid = cfg.grid
    return {
        "command": cfg.command,
        "ensemble": cfg.ensemble.value if cfg.ensemble else None,
        "dim": cfg.dim,
        "realizations": cfg.realizations,
        "k_list": cfg.k_list,
        "cutoff": cfg.cutoff,
        "sweep": cfg.sweep,
        "grid": {"kind": grid.kind, "t_min": grid.t_min, "t_max": grid.t_max,
                 "n_points": grid.n_points},
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
        "format": cfg.fmt,
        "length": cfg.length,
        "jz": cfg.jz,
        "disorder": cfg.disorder,
        "window": cfg.window,
        "workers": worker_count(),
    }


# ---------------------------------------------------------------------------
# command bodies


def _levels(cfg) -> np.ndarray:
    return pipelines.sample_unfolded_levels(
        cfg.ensemble, cfg.dim, cfg.realizations, cfg.seed, workers=worker_count()
    )


def _cmd_sample(cfg, out, files, derived):
    for i in range(cfg.realizations):
        seed = derive_seed(cfg.seed, i)
        sample = sample_spectrum(cfg.ensemble, cfg.dim, seed)
        path = out / f"spectrum_{i:04d}.csv"
        io.write_spectrum_csv(path, sample.energies)
        side = out / f"spectrum_{i:04d}.json"
        io.write_json(side, {"kind": cfg.ensemble.value, "N": cfg.dim, "seed": seed})
        files += [path, side]
    derived["n_files"] = cfg.realizations


def _cmd_unfold(cfg, out, files, derived):
    method = cfg.method
    if method is None:
        method = "identity" if cfg.ensemble is EnsembleKind.POISSON else "analytic"
    for i in range(cfg.realizations):
        seed = derive_seed(cfg.seed, i)
        sample = sample_spectrum(cfg.ensemble, cfg.dim, seed)
        if method == "analytic":
            u = unfold_analytic(sample)
        elif method == "polynomial":
            u = unfold_polynomial(sample, eta=cfg.eta, n_bins=cfg.n_bins)
        else:
            u = unfold_identity(sample)
        path = out / f"unfolded_{i:04d}.csv"
        io.write_spectrum_csv(path, u.energies)
        side = out / f"unfolded_{i:04d}.json"
        io.write_json(side, {"kind": cfg.ensemble.value, "N": cfg.dim, "seed": seed,
                             "method": method})
        files += [path, side]
    derived["method"] = method


def _cmd_knls(cfg, out, files, derived):
    levels = _levels(cfg)
    means = {}
    for k in cfg.k_list:
        values = np.concatenate([levels[i, k:] - levels[i, :-k] for i in range(len(levels))])
        hist = empirical_hist(SpacingSeries(k=k, values=values), cfg.n_bins)
        path = out / f"knls_hist_k{k}.csv"
        io.write_histogram_csv(path, hist.bin_edges, hist.density)
        files.append(path)
        centers = hist.centers
        if cfg.ensemble is EnsembleKind.POISSON:
            model = poisson_knls_pdf(k, centers)
        else:
            model = surmise_pdf(surmise_params(k, cfg.ensemble.beta), centers)
        _emit_multi(files, out, f"knls_model_k{k}", centers, {"density": model}, cfg.fmt)
        means[str(k)] = float(values.mean())
    derived["sample_means"] = means


def _cmd_knsff(cfg, out, files, derived):
    levels = _levels(cfg)
    t = cfg.grid.times()
    numeric = {}
    analytic = {}
    for k in cfg.k_list:
        numeric[f"S_k{k}"] = knsff.knsff_numeric(levels, k, cfg.grid).values
        if cfg.ensemble is EnsembleKind.POISSON:
            analytic[f"S_k{k}"] = knsff.knsff_poisson(k, cfg.dim, cfg.grid).values
        else:
            analytic[f"S_k{k}"] = knsff.knsff_analytic(
                k, cfg.ensemble.beta, cfg.dim, cfg.grid
            ).values
    _emit_multi(files, out, "knsff_numeric", t, numeric, cfg.fmt)
    _emit_multi(files, out, "knsff_analytic", t, analytic, cfg.fmt)
    derived["k_list"] = cfg.k_list


def _cmd_sff(cfg, out, files, derived):
    levels = _levels(cfg)
    numeric = assembly.full_sff_numeric(levels, cfg.grid)
    _emit_curve(files, out, "sff_numeric", numeric, cfg.fmt)
    if cfg.ensemble is EnsembleKind.POISSON:
        analytic = assembly.full_sff_poisson(cfg.dim, cfg.grid)
    else:
        analytic = assembly.full_sff_analytic(cfg.ensemble.beta, cfg.dim, cfg.grid)
        connected = Curve(cfg.grid, assembly.connected_sff(cfg.ensemble, cfg.dim,
                                                           cfg.grid.times()))
        _emit_curve(files, out, "sff_connected", connected, cfg.fmt)
    _emit_curve(files, out, "sff_analytic", analytic, cfg.fmt)
    t = cfg.grid.times()
    window = (t >= 2 * math.pi) & (t <= 4 * math.pi)
    if window.sum() >= 2:
        derived["plateau_average"] = float(
            np.trapezoid(numeric.values[window], t[window]) / (t[window][-1] - t[window][0])
        )


def _cmd_partial(cfg, out, files, derived):
    if cfg.ensemble is EnsembleKind.POISSON:
        family = [knsff.knsff_poisson(k, cfg.dim, cfg.grid) for k in range(1, cfg.cutoff + 1)]
    else:
        family = assembly.analytic_knsff_family(cfg.ensemble.beta, cfg.dim, cfg.grid,
                                                k_max=cfg.cutoff)
    partial = assembly.partial_sff(family, cfg.cutoff, cfg.dim) if cfg.cutoff else \
        Curve(cfg.grid, np.full(cfg.grid.n_points, 1.0 / cfg.dim))
    _emit_curve(files, out, f"partial_sff_K{cfg.cutoff}", partial, cfg.fmt)
    derived["cutoff"] = cfg.cutoff


def _cmd_timescales(cfg, out, files, derived):
    cutoffs = sorted(set(cfg.sweep + [cfg.cutoff]))
    family = assembly.analytic_knsff_family(cfg.ensemble.beta, cfg.dim, cfg.grid,
                                            k_max=max(cutoffs))
    reports = []
    for K in cutoffs:
        partial = assembly.partial_sff(family, K, cfg.dim)
        rep = assembly.timescale_report(partial, cfg.ensemble, cfg.dim, cfg.epsilon, K)
        reports.append(rep)
        _emit_curve(files, out, f"partial_sff_K{K}", partial, cfg.fmt)
        delta = assembly.delta_sff(partial, cfg.ensemble, cfg.dim)
        _emit_curve(files, out, f"delta_K{K}", delta, cfg.fmt)
    payload = [
        {"K": r.cutoff, "epsilon": r.epsilon, "t_dip": r.t_dip,
         "t_thouless": r.t_thouless, "plateau_time": r.plateau_time}
        for r in reports
    ]
    path = out / "timescales.json"
    io.write_json(path, {"reports": payload})
    files.append(path)
    last = reports[-1]
    derived["t_dip"] = last.t_dip
    derived["t_thouless"] = last.t_thouless
    derived["epsilon"] = cfg.epsilon


def _cmd_evenodd(cfg, out, files, derived):
    if cfg.realizations > 0:
        levels = _levels(cfg)
        even, odd = assembly.even_odd_sums(cfg.grid, spectra=levels)
    else:
        if not cfg.ensemble.is_gaussian:
            raise UsageError("analytic even/odd sums need a Gaussian ensemble")
        even, odd = assembly.even_odd_sums(cfg.grid, beta=cfg.ensemble.beta, n=cfg.dim)
    total = Curve(cfg.grid, even.values + odd.values, "total")
    _emit_multi(files, out, "even_odd", cfg.grid.times(),
                {"even": even.values, "odd": odd.values, "total": total.values}, cfg.fmt)


def _cmd_kstar(cfg, out, files, derived):
    derived["k_star"] = knsff.deepest_k(cfg.ensemble, cfg.dim, "analytic_expansion")
    derived["k_star_cubic"] = knsff.deepest_k(cfg.ensemble, cfg.dim, "cubic_root")
    derived["k_star_argmin"] = knsff.deepest_k(cfg.ensemble, cfg.dim, "numeric_argmin")
    derived["k_star_root"] = knsff.deepest_k_root(cfg.ensemble, cfg.dim)
    if cfg.realizations > 0:
        levels = _levels(cfg)
        k_max = min(cfg.dim - 1, max(10, int(3 * knsff.deepest_k_root(cfg.ensemble, cfg.dim))))
        derived["k_star_montecarlo"] = _montecarlo_kstar(levels, cfg.dim, k_max)


def _montecarlo_kstar(levels: np.ndarray, n: int, k_max: int) -> int:
    best_k, best_v = 1, np.inf
    for k in range(1, k_max + 1):
        t_hat = math.pi / k
        grid = TimeGrid("linear", 0.5 * t_hat, 1.7 * t_hat, 80)
        v = knsff.knsff_numeric(levels, k, grid).values.min()
        if v < best_v:
            best_k, best_v = k, float(v)
    return best_k


def _cmd_selfavg(cfg, out, files, derived):
    levels = _levels(cfg)
    window_start, span = 2 * math.pi, 20 * math.pi
    grid = cfg.grid
    if grid.t_max < window_start + span:
        grid = TimeGrid("linear", window_start, window_start + span, 400)
    summaries = []
    for k in cfg.k_list:
        per = pipelines.per_realization_knsff(levels, k, grid)
        report = selfavg.relvar_report(per, k, cfg.dim, grid, window_start, span)
        _emit_curve(files, out, f"relvar_k{k}", report.curve, cfg.fmt)
        summaries.append({"k": k, "plateau_avg": report.plateau_avg,
                          "formula_value": report.predicted})
    path = out / "selfavg_summary.json"
    io.write_json(path, {"window_start": window_start, "window_span": span,
                         "reports": summaries})
    files.append(path)
    derived["plateau_averages"] = {str(s["k"]): s["plateau_avg"] for s in summaries}


def _cmd_toy(cfg, out, files, derived):
    beta = cfg.ensemble.beta
    _emit_curve(files, out, "toy_sff", assembly.toy_sff(beta, cfg.dim, cfg.grid), cfg.fmt)
    for k in cfg.k_list:
        _emit_curve(files, out, f"toy_term_k{k}",
                    assembly.toy_term(beta, cfg.dim, k, cfg.grid), cfg.fmt)


def _build_operator(cfg) -> np.ndarray:
    n = cfg.dim
    if cfg.op_kind == "identity":
        return np.eye(n)
    if cfg.op_kind == "neighbor":
        op = np.zeros((n, n))
        idx = np.arange(n - cfg.op_k)
        op[idx, idx + cfg.op_k] = 1.0
        op[idx + cfg.op_k, idx] = 1.0
        return op
    rng = np.random.default_rng(derive_seed(cfg.seed, 987654321))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def _cmd_autocorr(cfg, out, files, derived):
    op = _build_operator(cfg)
    if cfg.realizations > 0:
        levels = _levels(cfg)
        result = assembly.autocorr_decompose(op, cfg.grid, spectra=levels)
    else:
        result = assembly.autocorr_decompose(op, cfg.grid, beta=cfg.ensemble.beta)
    _emit_curve(files, out, "autocorr_total", result.total, cfg.fmt)
    top = sorted(result.curves, key=lambda k: -result.coefficients[k - 1])[:8]
    for k in sorted(top):
        _emit_curve(files, out, f"autocorr_k{k}", result.curves[k], cfg.fmt)
    path = out / "autocorr_coefficients.json"
    io.write_json(path, {"diag_term": result.diag_term,
                         "coefficients": list(map(float, result.coefficients))})
    files.append(path)
    derived["diag_term"] = result.diag_term


def _cmd_xxz(cfg, out, files, derived):
    params = xxz.XxzParams(sites=cfg.length, jz=cfg.jz, disorder=cfg.disorder)
    result = xxz.disorder_pipeline(
        params,
        n_window=cfg.window,
        n_realizations=cfg.realizations,
        master_seed=cfg.seed,
        grid=cfg.grid,
        k_list=cfg.k_list,
        epsilon=cfg.epsilon,
        workers=worker_count(),
    )
    for k, curve in sorted(result.curves.items()):
        _emit_curve(files, out, f"xxz_knsff_k{k}", curve, cfg.fmt)
    _emit_curve(files, out, "xxz_sff", result.sff, cfg.fmt)
    derived.update(
        {
            "r_mean": result.r_mean,
            "r_excluded": result.r_excluded,
            "k_star": result.k_star,
            "t_dip": result.timescales.t_dip,
            "t_thouless": result.timescales.t_thouless,
            "min_times": {str(k): v for k, v in result.min_times.items()},
            "min_values": {str(k): v for k, v in result.min_values.items()},
        }
    )


_COMMANDS = {
    "sample": _cmd_sample,
    "unfold": _cmd_unfold,
    "knls": _cmd_knls,
    "knsff": _cmd_knsff,
    "sff": _cmd_sff,
    "partial": _cmd_partial,
    "timescales": _cmd_timescales,
    "evenodd": _cmd_evenodd,
    "kstar": _cmd_kstar,
    "selfavg": _cmd_selfavg,
    "toy": _cmd_toy,
    "autocorr": _cmd_autocorr,
    "xxz": _cmd_xxz,
}


def run(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list = []
    derived: dict = {}
    started = time.monotonic()
    _COMMANDS[cfg.command](cfg, out, files, derived)
    manifest = {
        "tool": "sfflab",
        "version": __version__,
        "config": _config_echo(cfg),
        "derived": derived,
        "wall_clock_seconds": time.monotonic() - started,
    }
    io.write_manifest(out, manifest, files)
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"sfflab: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (SeriesConvergenceError, KramersPairingError, np.linalg.LinAlgError) as exc:
        print(f"sfflab: numerical failure in {cfg.command}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError) as exc:
        print(f"sfflab: error in {cfg.command}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
