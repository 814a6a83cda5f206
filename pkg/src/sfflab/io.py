"""Deterministic CSV/JSON writers and run manifests.

Floats render with 17 significant digits (round-trip exact for 64-bit
values) so identical runs produce identical bytes.  Manifests checksum
every data file and are written atomically after all of them.
"""

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .knsff import Curve


def format17(x: float) -> str:
    return f"{float(x):.17g}"


def file_sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_curve_csv(path: Path, curve: Curve):
    lines = ["t,value"]
    for t, v in zip(curve.times, curve.values):
        lines.append(f"{format17(t)},{format17(v)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_multi_curve_csv(path: Path, times: np.ndarray, columns: dict):
    """Curves sharing one grid: header t,<name1>,<name2>,..."""
    names = list(columns)
    lines = ["t," + ",".join(names)]
    cols = [np.asarray(columns[name]) for name in names]
    for i, t in enumerate(times):
        lines.append(format17(t) + "," + ",".join(format17(c[i]) for c in cols))
    _write_text(path, "\n".join(lines) + "\n")


def write_spectrum_csv(path: Path, energies: np.ndarray):
    lines = ["index,energy"]
    for i, e in enumerate(energies):
        lines.append(f"{i},{format17(e)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_histogram_csv(path: Path, bin_edges: np.ndarray, density: np.ndarray):
    lines = ["bin_left,bin_right,density"]
    for lo, hi, d in zip(bin_edges[:-1], bin_edges[1:], density):
        lines.append(f"{format17(lo)},{format17(hi)},{format17(d)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: dict):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_manifest(out_dir: Path, payload: dict, data_files: list):
    """Checksum the data files and write manifest.json atomically last."""
    out_dir = Path(out_dir)
    payload = dict(payload)
    payload["files"] = {
        os.path.relpath(f, out_dir): file_sha256(Path(f)) for f in sorted(map(str, data_files))
    }
    tmp = out_dir / "manifest.json.tmp"
    _write_text(tmp, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, out_dir / "manifest.json")
    return out_dir / "manifest.json"
