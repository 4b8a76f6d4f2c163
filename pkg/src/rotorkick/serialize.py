"""CSV/JSON serialization of sweep results, lossless at 17 significant digits."""

from __future__ import annotations

import csv
import json
import os
import time
from pathlib import Path

import numpy as np

from .sweep import SweepResult

FLOAT_FMT = "%.17g"


def _f(x: float) -> str:
    return FLOAT_FMT % x


def _timestamp() -> str:
    """ISO timestamp; honors SOURCE_DATE_EPOCH for byte-reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def record_columns(result: SweepResult) -> list[str]:
    k = max((r.populations.size for r in result.records if not r.failed), default=0)
    return (["P", "sigma", "j0", "energy", "orientation", "alignment"]
            + [f"pop_{j}" for j in range(k)]
            + [f"c_abs_{j}" for j in range(k)])


def _record_row(rec, k: int) -> list[float]:
    pops = np.zeros(k)
    cabs = np.zeros(k)
    pops[: rec.populations.size] = rec.populations
    cabs[: rec.coeff_abs.size] = rec.coeff_abs
    return ([rec.p, rec.sigma, rec.j0, rec.energy, rec.orientation, rec.alignment]
            + pops.tolist() + cabs.tolist())


def write_records(result: SweepResult, outdir: str | Path,
                  formats: tuple[str, ...] = ("csv", "json"),
                  metadata: dict | None = None) -> list[Path]:
    """Write the per-point records plus any drop/minima/fit outputs.

    Floats are rendered with 17 significant digits so a read-back
    round-trips bit-exactly.  Returns the paths written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cols = record_columns(result)
    k = (len(cols) - 6) // 2
    rows = [_record_row(r, k) for r in result.records]
    written = []

    if "csv" in formats:
        path = outdir / "records.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for row in rows:
                w.writerow([str(int(row[2])) if i == 2 else _f(v)
                            for i, v in enumerate(row)])
        written.append(path)

        if result.drop_loci:
            path = outdir / "drops.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["P", "sigma", "energy"])
                for p, s, e in result.drop_loci:
                    w.writerow([_f(p), _f(s), _f(e)])
            written.append(path)
        if result.minima_2d:
            path = outdir / "minima.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["P", "sigma", "energy"])
                for p, s, e in result.minima_2d:
                    w.writerow([_f(p), _f(s), _f(e)])
            written.append(path)

    if "json" in formats:
        from . import __version__
        doc = {
            "metadata": {
                "config": metadata or {},
                "code_version": __version__,
                "timestamp": _timestamp(),
            },
            "columns": cols,
            "records": [[_f(v) for v in row] for row in rows],
        }
        if result.drop_loci:
            doc["drops"] = [{"P": _f(p), "sigma": _f(s), "energy": _f(e)}
                            for p, s, e in result.drop_loci]
        if result.minima_2d:
            doc["minima"] = [{"P": _f(p), "sigma": _f(s), "energy": _f(e)}
                             for p, s, e in result.minima_2d]
        if result.minima_line_fit is not None:
            fit = result.minima_line_fit
            doc["minima_line_fit"] = {
                "slope": _f(fit.slope),
                "intercepts": {str(n): _f(b) for n, b in fit.intercepts.items()},
                "rms_residual": _f(fit.rms_residual),
            }
        path = outdir / "records.json"
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        written.append(path)

    failures = result.failures()
    if failures:
        path = outdir / "failures.json"
        with open(path, "w") as fh:
            json.dump([{"P": r.p, "sigma": r.sigma, "error": r.error} for r in failures],
                      fh, indent=1)
            fh.write("\n")
        written.append(path)
    return written


def read_records_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Read back a records.csv; returns (columns, float matrix)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    cols = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return cols, data


def read_records_json(path: str | Path) -> tuple[list[str], np.ndarray, dict]:
    """Read back a records.json; returns (columns, float matrix, metadata)."""
    with open(path) as fh:
        doc = json.load(fh)
    data = np.array([[float(v) for v in row] for row in doc["records"]])
    return doc["columns"], data, doc["metadata"]
