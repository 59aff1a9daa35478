"""Minimization of F_{k,m} over the three boundary measure classes and the positivity threshold.

Type I is delta_phi. Type II mixes delta_0 with one atom x in [phi, 1].
Type III mixes delta_1 with one atom x in [0, phi]. Each class is minimized
on a uniform x-grid followed by bounded Brent refinement around the best
grid point. The threshold phi* is found by a coarse scan in phi followed by
bisection, assuming the set of phi with positive minimum is an interval.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, MinimizerClassViolation
from .functional import (
    DiscreteMeasure,
    F_type1,
    F_type2_at_one,
    FunctionalParams,
    two_point_F,
    type2_measure,
    type3_measure,
)

TYPE_ORDER = ("I", "II", "III")
INTERVAL_FLAG = "assumption: positivity region in phi is an interval"
HEURISTIC_FLAG = "heuristic: minimizer class unverified"
CAPPED_FLAG = "capped"
SCAN_TOL = 1e-7


@dataclass(frozen=True)
class OptimizerConfig:
    grid: int = 2048
    xtol: float = 1e-8
    bisection_tol: float = 1e-4
    scan_points: int = 64
    # a class minimum counts as positive when it exceeds -zero_tol; the k = 1
    # family (1-phi) delta_0 + phi delta_1 has F exactly 0 in exact arithmetic
    zero_tol: float = 1e-12
    edge_gap: float = 1e-9

    def __post_init__(self):
        if self.grid < 3:
            raise ValueError("grid needs at least 3 points")
        if self.scan_points < 1:
            raise ValueError("scan_points must be positive")
        if not (0 < self.bisection_tol < 0.25):
            raise ValueError("bisection_tol must lie in (0, 0.25)")


@dataclass(frozen=True)
class MinimizationResult:
    min_value: float
    witness: DiscreteMeasure
    type_tag: str
    argmin_x: float | None
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "min_value": self.min_value,
            "type": self.type_tag,
            "argmin_x": self.argmin_x,
            "witness": self.witness.to_dict(),
            "evaluations": self.evaluations,
        }


def _type2_values(params, phi, xs):
    p = phi / xs
    return two_point_F(params, 0.0, 1.0 - p, xs, p)


def _type3_values(params, phi, xs):
    return two_point_F(params, 1.0, (phi - xs) / (1.0 - xs), xs, (1.0 - phi) / (1.0 - xs))


def _grid_min(fun, lo: float, hi: float, cfg: OptimizerConfig) -> tuple[float, float, int]:
    """Grid minimum of ``fun`` on [lo, hi], refined by bounded Brent; returns (x, value, evals)."""
    xs = np.linspace(lo, hi, cfg.grid)
    vals = np.asarray(fun(xs), dtype=float)
    j = int(np.argmin(vals))  # first index on ties, i.e. smallest x
    best_x, best_v = float(xs[j]), float(vals[j])
    evals = cfg.grid
    a, b = float(xs[max(j - 1, 0)]), float(xs[min(j + 1, cfg.grid - 1)])
    if b > a:
        res = minimize_scalar(lambda x: float(fun(x)), bounds=(a, b), method="bounded", options={"xatol": cfg.xtol})
        evals += int(res.nfev)
        if res.fun < best_v:
            best_x, best_v = float(res.x), float(res.fun)
    return best_x, best_v, evals


def min_over_types(params: FunctionalParams, phi: float, cfg: OptimizerConfig = OptimizerConfig()) -> MinimizationResult:
    if not (0.0 < phi < 0.5):
        raise DomainError(f"phi must lie in (0, 1/2), got {phi}")
    candidates = []
    v1 = F_type1(params, phi)
    candidates.append((v1, "I", phi, DiscreteMeasure.dirac(phi)))
    evals = 1

    x2, v2, e = _grid_min(lambda xs: _type2_values(params, phi, xs), phi, 1.0 - cfg.edge_gap, cfg)
    evals += e
    v_one = F_type2_at_one(params, phi)
    evals += 1
    if v_one < v2:
        x2, v2 = 1.0, v_one
    candidates.append((v2, "II", x2, type2_measure(phi, x2)))

    x3, v3, e = _grid_min(lambda xs: _type3_values(params, phi, xs), 0.0, phi, cfg)
    evals += e
    candidates.append((v3, "III", x3, type3_measure(phi, x3)))

    # strict comparison keeps the earlier class on ties
    best = candidates[0]
    for c in candidates[1:]:
        if c[0] < best[0]:
            best = c
    v, tag, x, witness = best
    return MinimizationResult(v, witness, tag, None if tag == "I" else x, evals)


@dataclass(frozen=True)
class ThresholdReport:
    k: int
    m: int
    phi_star: float
    limiting_type: str | None
    argmin_x: float | None
    grid_points: int
    bisection_tolerance: float
    all_evaluations_count: int
    capped: bool
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def _positive(res: MinimizationResult, cfg: OptimizerConfig) -> bool:
    return res.min_value > -cfg.zero_tol


def threshold_phi(params: FunctionalParams, cfg: OptimizerConfig = OptimizerConfig()) -> ThresholdReport:
    """Largest phi in (0, 1/2] up to which every class minimum stays positive."""
    top = 0.5 - cfg.bisection_tol
    phis = np.linspace(top / cfg.scan_points, top, cfg.scan_points)
    evals = 0
    lo, fail = 0.0, None
    for phi in phis:
        res = min_over_types(params, float(phi), cfg)
        evals += res.evaluations
        if not _positive(res, cfg):
            fail = (float(phi), res)
            break
        lo = float(phi)

    flags = [INTERVAL_FLAG]
    if not params.concavity_proved:
        flags.append(HEURISTIC_FLAG)
    if fail is None:
        flags.append(CAPPED_FLAG)
        return ThresholdReport(params.k, params.m, 0.5, None, None, cfg.grid, cfg.bisection_tol, evals, True, tuple(flags))

    hi, hi_res = fail
    while hi - lo > cfg.bisection_tol:
        mid = 0.5 * (lo + hi)
        res = min_over_types(params, mid, cfg)
        evals += res.evaluations
        if _positive(res, cfg):
            lo = mid
        else:
            hi, hi_res = mid, res
    return ThresholdReport(
        params.k, params.m, lo, hi_res.type_tag, hi_res.argmin_x, cfg.grid, cfg.bisection_tol, evals, False, tuple(flags)
    )


# -- two-point sampling ------------------------------------------------------


def two_point_value(params: FunctionalParams, phi: float, x: float, y: float) -> float:
    """F of the mean-phi measure on {y, x}, y <= phi <= x, y < x."""
    if not (0.0 <= y <= phi <= x <= 1.0) or y == x:
        raise DomainError(f"need 0 <= y <= phi <= x <= 1 with y < x, got y={y}, x={x}")
    p = (phi - y) / (x - y)
    return two_point_F(params, x, p, y, 1.0 - p)


@dataclass(frozen=True)
class TwoPointScan:
    k: int
    m: int
    phi: float
    samples: int
    seed: int
    sample_min: float
    worst_x: float
    worst_y: float
    type_min: float
    type_tag: str
    margin: float
    passed: bool
    strict: bool

    def to_dict(self) -> dict:
        return asdict(self)


def two_point_scan(
    params: FunctionalParams,
    phi: float,
    samples: int = 10_000,
    seed: int = 0,
    strict: bool | None = None,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> TwoPointScan:
    """Sample interior two-point measures of mean phi and compare with the class minimum.

    Strict mode (default for k >= 3) raises when a sample undercuts the class
    minimum by more than 1e-7.
    """
    if not (0.0 < phi < 0.5):
        raise DomainError(f"phi must lie in (0, 1/2), got {phi}")
    strict = params.concavity_proved if strict is None else strict
    rng = np.random.default_rng(seed)
    ys = rng.uniform(0.0, phi, samples)
    xs = rng.uniform(phi, 1.0, samples)
    # keep support strictly interior and the two atoms distinct
    ys = np.clip(ys, 1e-12, phi)
    xs = np.clip(xs, np.maximum(phi, ys + 1e-12), 1.0 - 1e-12)
    p = (phi - ys) / (xs - ys)
    vals = np.asarray(two_point_F(params, xs, p, ys, 1.0 - p))
    j = int(np.argmin(vals))
    ref = min_over_types(params, phi, cfg)
    margin = float(vals[j]) - ref.min_value
    passed = margin >= -SCAN_TOL
    report = TwoPointScan(
        params.k, params.m, phi, samples, seed, float(vals[j]), float(xs[j]), float(ys[j]),
        ref.min_value, ref.type_tag, margin, passed, strict,
    )
    if strict and not passed:
        raise MinimizerClassViolation(
            f"k={params.k}, m={params.m}, phi={phi}: sample at y={ys[j]:.6g}, x={xs[j]:.6g} "
            f"undercuts the class minimum by {-margin:.3e}"
        )
    return report


# -- (k, m) tables -----------------------------------------------------------


def default_m_values(k: int) -> list[int]:
    return list(range(1, math.isqrt(k) + 1))


def _threshold_cell(args) -> ThresholdReport:
    k, m, cfg = args
    return threshold_phi(FunctionalParams(k, m), cfg)


def scan_km(
    k_values: Iterable[int],
    m_values: Sequence[int] | None = None,
    cfg: OptimizerConfig = OptimizerConfig(),
    jobs: int = 1,
) -> list[ThresholdReport]:
    """Threshold report for every k and every m <= isqrt(k) (or the given m list)."""
    cells = [(k, m, cfg) for k in k_values for m in (m_values or default_m_values(k))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_threshold_cell, cells))
    return [_threshold_cell(c) for c in cells]


CSV_COLUMNS = ("k", "m", "phi_star", "limiting_type", "argmin_x", "grid", "tol", "flags")


def reports_to_csv(reports: Sequence[ThresholdReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow([
            r.k, r.m, repr(r.phi_star), r.limiting_type or "", "" if r.argmin_x is None else repr(r.argmin_x),
            r.grid_points, r.bisection_tolerance, ";".join(r.flags),
        ])
    return buf.getvalue()


def reports_to_json(reports: Sequence[ThresholdReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
