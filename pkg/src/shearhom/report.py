"""All estimators for one lattice, concentration sweeps and convergence grids."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .errors import ShearHomError
from .fourier import build_grid, mu_table
from .lattice import Lattice, cell_moments
from .mm import mm_estimate
from .mst import mst_kuster_toksoz, mst_two_phase
from .pwe import (Direction, F_quadratic, SeriesConfig, as_direction,
                  effective_speed_numeric, neumann_M, pwe_bounds, pwe_estimate)
from .templates import Template

CSV_COLUMNS = ("f", "c_numeric", "c_pwe", "c_mm", "c_mmtilde", "c_mst_a", "c_mst_b",
               "c_upper_bound", "terms_used", "last_term")


@dataclass
class EstimateReport:
    """Speeds (m/s) from every estimator for one lattice and direction.

    Estimators that do not apply or failed are ``None``; ``errors`` records why.
    """

    f: float | None
    c_numeric: float | None
    c_pwe: float | None
    c_mm: float | None
    c_mmtilde: float | None
    c_mst_a: float | None
    c_mst_b: float | None
    c_upper_bound: float | None
    c_lower_bound: float | None
    terms_used: int | None
    last_term: float | None
    mu_mean: float
    rho_mean: float
    mm_quad_error: float = 0.0
    errors: dict[str, str] = field(default_factory=dict)

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]

    def speeds(self) -> dict[str, float]:
        """Present speed columns keyed by name."""
        keys = ("c_numeric", "c_pwe", "c_mm", "c_mmtilde", "c_mst_a", "c_mst_b",
                "c_upper_bound", "c_lower_bound")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _sqrt_or_none(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return math.sqrt(max(x, 0.0))


def _mst_speeds(lattice: Lattice, rho_mean: float, template: Template | None, f):
    """MST speeds for the declared designations.

    With a template, ``a`` takes the template matrix as host and ``b`` the
    inclusion (two-phase families only). Without one, phase 0 is the declared
    matrix; two-phase lattices also get the swapped designation.
    """
    if template is not None:
        if template.coated:
            return _sqrt_or_none(mst_kuster_toksoz(template.matrix,
                                                   template.mst_inclusions(f), rho_mean)), None
        a = mst_two_phase(template.matrix, template.inclusion, f, rho_mean)
        b = mst_two_phase(template.inclusion, template.matrix, 1.0 - f, rho_mean)
        return _sqrt_or_none(a), _sqrt_or_none(b)
    fr = lattice.filling_fractions
    mats = [p.material for p in lattice.phases]
    if lattice.n_phases == 1:
        c = math.sqrt(mats[0].mu / rho_mean)
        return c, c
    if lattice.n_phases == 2:
        a = mst_two_phase(mats[0], mats[1], fr[1], rho_mean)
        b = mst_two_phase(mats[1], mats[0], fr[0], rho_mean)
        return _sqrt_or_none(a), _sqrt_or_none(b)
    incl = [(mats[k], fr[k]) for k in range(1, lattice.n_phases)]
    return _sqrt_or_none(mst_kuster_toksoz(mats[0], incl, rho_mean)), None


def estimate_all(lattice: Lattice, kappa=(1.0, 0.0), config: SeriesConfig | None = None,
                 template: Template | None = None, f: float | None = None,
                 numeric: bool = True) -> EstimateReport:
    """Run every estimator on one lattice.

    Failures of individual estimators are recorded in ``errors`` and leave
    the corresponding value absent, so a sweep can continue.
    """
    config = config or SeriesConfig()
    kappa = as_direction(kappa)
    mom = cell_moments(lattice)
    errors: dict[str, str] = {}
    out = dict(c_numeric=None, terms_used=None, last_term=None)

    table = mu_table(lattice, config.j)
    grid = build_grid(config.j, lattice.a1, lattice.a2)
    if numeric:
        try:
            res = effective_speed_numeric(lattice, kappa, config, table=table)
            out.update(c_numeric=res.c, terms_used=res.series.terms_used,
                       last_term=res.series.last_term)
        except ShearHomError as exc:
            errors["numeric"] = str(exc)

    c_pwe = pwe_estimate(mom)
    Fk = float(kappa.vector @ F_quadratic(table, grid) @ kappa.vector)
    bounds = pwe_bounds(mom, Fk)

    c_mm = c_mmt = None
    quad = 0.0
    try:
        rep = mm_estimate(lattice)
        c_mm, c_mmt, quad = rep.c_mm(kappa), rep.c_mmtilde(kappa), rep.quad_error
    except ShearHomError as exc:
        errors["mm"] = str(exc)

    mst_a = mst_b = None
    try:
        mst_a, mst_b = _mst_speeds(lattice, mom.rho_mean, template, f)
    except ShearHomError as exc:
        errors["mst"] = str(exc)

    return EstimateReport(
        f=f, c_pwe=c_pwe, c_mm=c_mm, c_mmtilde=c_mmt, c_mst_a=mst_a, c_mst_b=mst_b,
        c_upper_bound=_sqrt_or_none(bounds.upper), c_lower_bound=_sqrt_or_none(bounds.lower),
        mu_mean=mom.mu_mean, rho_mean=mom.rho_mean, mm_quad_error=quad, errors=errors, **out,
    )


# --------------------------------------------------------------------------
# Sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """Concentration sweep over a template."""

    template: Template
    f_start: float = 0.0
    f_stop: float = 1.0
    count: int = 21
    kappa_deg: float = 0.0
    series: SeriesConfig = SeriesConfig()
    numeric: bool = True

    def fractions(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, self.count)


def _sweep_point(args):
    spec, f = args
    lat = spec.template.lattice(float(f))
    return estimate_all(lat, Direction.from_angle(spec.kappa_deg), spec.series,
                        spec.template, float(f), spec.numeric)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[EstimateReport]:
    """Evaluate each sweep point; rows come back in ``f`` order."""
    jobs = [(spec, f) for f in spec.fractions()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]


# --------------------------------------------------------------------------
# Convergence study
# --------------------------------------------------------------------------


@dataclass
class ConvergenceStudy:
    """Numeric speeds over a (j, m) grid.

    ``values[a, b]`` is the speed at ``j_list[a]``, ``m_list[b]`` (NaN when
    the run failed). The reference is the largest (j, m) pair.
    """

    j_list: list[int]
    m_list: list[int]
    values: np.ndarray
    term_decay: dict[int, np.ndarray]

    @property
    def reference(self) -> float:
        return float(self.values[-1, -1])

    def relative_error(self) -> np.ndarray:
        return np.abs(self.values - self.reference) / abs(self.reference)

    def smallest_within(self, tol: float = 0.01):
        """Cheapest (j, m) whose value is within ``tol`` of the reference."""
        err = self.relative_error()
        best = None
        for a, j in enumerate(self.j_list):
            for b, m in enumerate(self.m_list):
                if np.isfinite(err[a, b]) and err[a, b] <= tol:
                    cost = (j, m)
                    if best is None or (2 * j + 1) ** 4 * (m + 1) < (2 * best[0] + 1) ** 4 * (best[1] + 1):
                        best = cost
        return best


def converge(lattice: Lattice, j_list: Sequence[int], m_list: Sequence[int], kappa=(1.0, 0.0),
             mu0="mid", path: str = "direct") -> ConvergenceStudy:
    """Evaluate the numeric speed on a grid of truncations and term counts.

    One series per ``j`` is run to ``max(m_list)`` and its partial sums are
    read off at each requested ``m``.
    """
    j_list = sorted(int(j) for j in j_list)
    m_list = sorted(int(m) for m in m_list)
    mom = cell_moments(lattice)
    vals = np.full((len(j_list), len(m_list)), np.nan)
    decay = {}
    for a, j in enumerate(j_list):
        cfg = SeriesConfig(j=j, m=max(m_list), mu0=mu0, path=path)
        table = mu_table(lattice, j)
        grid = build_grid(j, lattice.a1, lattice.a2)
        try:
            res = neumann_M(table, grid, kappa, cfg)
        except ShearHomError:
            continue
        decay[j] = np.abs(res.terms) / res.mu0
        for b, m in enumerate(m_list):
            mu_eff = mom.mu_mean - res.partial_sums[m]
            vals[a, b] = math.sqrt(mu_eff / mom.rho_mean) if mu_eff >= 0 else np.nan
    return ConvergenceStudy(j_list, m_list, vals, decay)


__all__ = ["EstimateReport", "estimate_all", "SweepSpec", "run_sweep", "ConvergenceStudy",
           "converge", "CSV_COLUMNS"]
