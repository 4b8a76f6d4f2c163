"""Parallel (P, sigma) parameter sweeps with drop and surface-minima detection.

Grid points are independent pure tasks; results are assembled by grid
index, never by arrival order, so the worker count cannot change the
output (no floating-point reduction crosses point boundaries).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import zero_loci
from .core import PulseSpec, RotorBasis, build_cos2_matrix, build_cos_matrix
from .observables import alignment, kinetic_energy, orientation, populations
from .propagate import ConvergenceError, converge_basis, propagate_spectral


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian (P, sigma) grid for one initial state.

    basis_mode "auto" converges the basis per point to leak_tol;
    "fixed" uses j_max everywhere (j_max=9 reproduces a ten-level model).
    """

    p_values: tuple[float, ...]
    sigma_values: tuple[float, ...]
    j0: int = 0
    basis_mode: str = "auto"       # "auto" | "fixed"
    j_max: int = 9                  # used when basis_mode == "fixed"
    leak_tol: float = 1e-10         # used when basis_mode == "auto"

    def __post_init__(self):
        for name, vals in (("p_values", self.p_values), ("sigma_values", self.sigma_values)):
            arr = np.asarray(vals, dtype=float)
            if arr.size == 0:
                raise ValueError(f"{name} must be non-empty")
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise ValueError(f"{name} must be strictly increasing")
        if np.any(np.asarray(self.sigma_values) <= 0):
            raise ValueError("sigma values must be > 0")
        if np.any(np.asarray(self.p_values) < 0):
            raise ValueError("P values must be >= 0")
        if self.basis_mode not in ("auto", "fixed"):
            raise ValueError(f"unknown basis mode {self.basis_mode!r}")

    @classmethod
    def from_ranges(cls, p, sigma_min, sigma_max, sigma_step, **kw) -> "SweepGrid":
        n = int(round((sigma_max - sigma_min) / sigma_step)) + 1
        sigmas = tuple(sigma_min + i * sigma_step for i in range(n))
        p_vals = tuple(p) if isinstance(p, (tuple, list)) else (float(p),)
        return cls(p_values=p_vals, sigma_values=sigmas, **kw)


@dataclass
class PointRecord:
    p: float
    sigma: float
    j0: int
    j_max: int
    energy: float
    orientation: float
    alignment: float
    populations: np.ndarray
    coeff_abs: np.ndarray
    failed: bool = False
    error: str | None = None


@dataclass
class LineFit:
    slope: float
    intercepts: dict[int, float]
    rms_residual: float


@dataclass
class SweepResult:
    grid: SweepGrid
    records: list[PointRecord]                       # row-major: index = ip * n_sigma + isig
    drop_loci: list[tuple[float, float, float]] = field(default_factory=list)   # (P, sigma, E)
    minima_2d: list[tuple[float, float, float]] = field(default_factory=list)   # (P, sigma, E)
    minima_line_fit: LineFit | None = None

    def record(self, ip: int, isig: int) -> PointRecord:
        return self.records[ip * len(self.grid.sigma_values) + isig]

    def energy_surface(self) -> np.ndarray:
        e = np.array([r.energy for r in self.records])
        return e.reshape(len(self.grid.p_values), len(self.grid.sigma_values))

    def failures(self) -> list[PointRecord]:
        return [r for r in self.records if r.failed]


def evaluate_point(p: float, sigma: float, j0: int, basis_mode: str = "auto",
                   j_max: int = 9, leak_tol: float = 1e-10) -> PointRecord:
    """Propagate one grid point (spectral) and compute all observables."""
    pulse = PulseSpec(strength=p, sigma=sigma)
    try:
        if basis_mode == "fixed":
            basis = RotorBasis(j_max=j_max)
        else:
            basis = converge_basis(pulse, j0, leak_tol=leak_tol)
        psi = propagate_spectral(pulse, j0, basis).final
        return PointRecord(
            p=p, sigma=sigma, j0=j0, j_max=basis.j_max,
            energy=kinetic_energy(psi),
            orientation=orientation(psi, build_cos_matrix(basis)),
            alignment=alignment(psi, build_cos2_matrix(basis)),
            populations=populations(psi),
            coeff_abs=np.abs(psi.coefficients),
        )
    except ConvergenceError as exc:
        return PointRecord(p=p, sigma=sigma, j0=j0, j_max=-1,
                           energy=math.nan, orientation=math.nan, alignment=math.nan,
                           populations=np.array([]), coeff_abs=np.array([]),
                           failed=True, error=str(exc))


def _evaluate_task(args) -> PointRecord:
    return evaluate_point(*args)


def run_sweep(grid: SweepGrid, workers: int | None = None,
              drop_rel_threshold: float = 0.10) -> SweepResult:
    """Evaluate every grid point, then detect drops (per fixed P) and,
    for 2-D grids, surface minima plus the shared-slope line fit.

    Failed points are kept in the records (marked failed) and excluded
    from detection; the sweep itself never aborts on a point failure.
    """
    tasks = [(p, s, grid.j0, grid.basis_mode, grid.j_max, grid.leak_tol)
             for p in grid.p_values for s in grid.sigma_values]
    if workers is not None and workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(tasks) < 32:
        records = [_evaluate_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (64 * (workers or 8)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate_task, tasks, chunksize=chunk))

    result = SweepResult(grid=grid, records=records)
    n_sig = len(grid.sigma_values)
    if n_sig >= 5:
        for ip, p in enumerate(grid.p_values):
            series = records[ip * n_sig:(ip + 1) * n_sig]
            if any(r.failed for r in series):
                continue
            energies = np.array([r.energy for r in series])
            for isig in detect_drops(energies, rel_threshold=drop_rel_threshold):
                result.drop_loci.append((p, grid.sigma_values[isig], energies[isig]))
    if len(grid.p_values) >= 5 and n_sig >= 5 and not result.failures():
        result.minima_2d = detect_surface_minima(result)
        pts = [(p, s) for p, s, _ in result.minima_2d]
        if len(pts) >= 2:
            result.minima_line_fit = fit_minima_line(pts)
    return result


def detect_drops(energies: np.ndarray, rel_threshold: float = 0.10) -> list[int]:
    """Indices of strict local minima whose depth, relative to the smaller
    neighboring local maximum, exceeds rel_threshold.

    The series boundaries act as the enclosing maxima for edge-adjacent
    minima.  Positions are grid points; no sub-grid interpolation.
    """
    e = np.asarray(energies, dtype=float)
    if e.size < 5:
        raise ValueError("drop detection needs at least 5 points")
    out = []
    for i in range(1, e.size - 1):
        if not (e[i] < e[i - 1] and e[i] < e[i + 1]):
            continue
        left = i - 1
        while left > 0 and e[left - 1] > e[left]:
            left -= 1
        right = i + 1
        while right < e.size - 1 and e[right + 1] > e[right]:
            right += 1
        shoulder = min(e[left], e[right])
        if shoulder > 0 and (shoulder - e[i]) / shoulder >= rel_threshold:
            out.append(i)
    return out


def detect_surface_minima(result: SweepResult,
                          ceiling: float | None = None) -> list[tuple[float, float, float]]:
    """Grid points that are strict minima over their 8-neighborhood and lie
    below an absolute kinetic-energy ceiling (default: 1st percentile of
    the surface)."""
    e = result.energy_surface()
    if e.shape[0] < 5 or e.shape[1] < 5:
        raise ValueError("surface minima detection needs a grid of at least 5x5")
    if ceiling is None:
        ceiling = float(np.percentile(e, 1.0))
    out = []
    for ip in range(1, e.shape[0] - 1):
        for isig in range(1, e.shape[1] - 1):
            v = e[ip, isig]
            if v > ceiling:
                continue
            patch = e[ip - 1:ip + 2, isig - 1:isig + 2].copy()
            patch[1, 1] = math.inf
            if v < patch.min():
                out.append((result.grid.p_values[ip], result.grid.sigma_values[isig], float(v)))
    return out


def nearest_parabola_index(p: float, sigma: float, n_max: int = 40) -> int:
    """Index n of the transfer-zero parabola sigma_n(P) closest to (p, sigma)."""
    loci = zero_loci(0, p, n_max)
    if not loci:
        raise ValueError(f"no real parabola branch exists for P={p}")
    return min(loci, key=lambda z: abs(sigma - z.sigma_exact)).n


def fit_minima_line(minima: list[tuple[float, float]]) -> LineFit:
    """Shared-slope least-squares fit of sigma vs P over minima clustered by
    nearest parabola branch.

    Model: sigma = slope * P + intercept_n with one intercept per cluster
    and a common slope; clusters with a single point pin only their
    intercept.
    """
    if len(minima) < 2:
        raise ValueError("line fit needs at least 2 minima")
    clusters: dict[int, list[tuple[float, float]]] = {}
    for p, s in minima:
        clusters.setdefault(nearest_parabola_index(p, s), []).append((p, s))
    num = 0.0
    den = 0.0
    for pts in clusters.values():
        if len(pts) < 2:
            continue
        ps = np.array([q[0] for q in pts])
        ss = np.array([q[1] for q in pts])
        num += float(np.sum((ps - ps.mean()) * (ss - ss.mean())))
        den += float(np.sum((ps - ps.mean()) ** 2))
    if den == 0.0:
        raise ValueError("no cluster has 2 or more minima; cannot fit a slope")
    slope = num / den
    intercepts = {}
    sq = 0.0
    count = 0
    for n, pts in sorted(clusters.items()):
        ps = np.array([q[0] for q in pts])
        ss = np.array([q[1] for q in pts])
        b = float(np.mean(ss - slope * ps))
        intercepts[n] = b
        sq += float(np.sum((ss - slope * ps - b) ** 2))
        count += len(pts)
    return LineFit(slope=slope, intercepts=intercepts,
                   rms_residual=math.sqrt(sq / count))


def compare_drops_to_analytic(drops: list[float], strength: float, j0: int,
                              match_window: float = 0.5) -> list[dict]:
    """Match detected drop positions to the nearest analytic zero locus.

    Each entry reports the branch index n, detected and analytic sigma,
    and their difference; drops with no root within match_window are
    flagged unmatched rather than raising.
    """
    if j0 not in (0, 1):
        raise ValueError(f"analytic loci exist for J0 in {{0, 1}}, got {j0}")
    n_max = max(10, int(2 * (max(drops) if drops else 1) / math.pi) + 3)
    loci = zero_loci(j0, strength, n_max)
    out = []
    for s in drops:
        if loci:
            best = min(loci, key=lambda z: abs(z.sigma_exact - s))
            delta = s - best.sigma_exact
            matched = abs(delta) <= match_window
        else:
            best, delta, matched = None, math.nan, False
        out.append({
            "n": best.n if (best and matched) else None,
            "sigma_drop": s,
            "sigma_analytic": best.sigma_exact if (best and matched) else math.nan,
            "delta": delta if matched else math.nan,
            "matched": matched,
        })
    return out
