"""Property suites that cross-check the estimators against each other."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diagnostics import convergence_report, peak_profile
from .fourier import build_grid, mu_table
from .lattice import (AxisSquare, Circle, Lattice, Material, RotatedSquare45,
                      cell_moments)
from .mm import LineTable
from .mst import keller_residual, mst_two_phase_modulus
from .pwe import (F_quadratic, SeriesConfig, dense_M, neumann_M, pwe_bounds,
                  pwe_two_phase_modulus)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def random_triples(n: int = 1000, seed: int = 0) -> np.ndarray:
    """Random ``(mu1, mu2, f)`` rows with moduli log-uniform in [0.1, 300] GPa."""
    rng = np.random.default_rng(seed)
    mu = 10.0 ** rng.uniform(8, math.log10(3e11), size=(n, 2))
    f = rng.uniform(0.0, 1.0, size=n)
    return np.column_stack([mu, f])


def random_lattice(rng: np.random.Generator, three_phase: bool | None = None) -> Lattice:
    """Random two- or three-phase lattice with moderate contrast."""
    def mat():
        return Material(10.0 ** rng.uniform(9, 11), rng.uniform(1000, 12000))

    if three_phase is None:
        three_phase = bool(rng.integers(0, 2))
    kind = rng.integers(0, 3)
    c = tuple(rng.uniform(0.0, 1.0, size=2))
    if kind == 0:
        outer = AxisSquare(rng.uniform(0.2, 0.9), c)
    elif kind == 1:
        outer = Circle(rng.uniform(0.1, 0.45), c)
    else:
        outer = RotatedSquare45(rng.uniform(0.2, 0.65), c)
    incl = [(mat(), outer)]
    if three_phase:
        incl.append((mat(), Circle(0.5 * outer.extent() * rng.uniform(0.2, 0.9), c)))
    return Lattice.from_materials(mat(), incl)


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def duality_suite(n: int = 1000, seed: int = 0) -> list[Check]:
    rows = random_triples(n, seed)
    worst_mst = 0.0
    worst_geo = 0.0
    for mu1, mu2, f in rows:
        scale = mu1 * mu2
        worst_mst = max(worst_mst, abs(keller_residual("mst", mu1, mu2, f)) / scale)
        worst_geo = max(worst_geo, abs(keller_residual("mmtilde", mu1, mu2, f)) / scale)
    pwe = abs(keller_residual("pwe", 80e9, 1.48e9, 0.5)) / (80e9 * 1.48e9)
    return [
        Check("duality/mst", worst_mst <= 1e-12, f"max residual {worst_mst:.3e} (limit 1e-12)"),
        Check("duality/mmtilde", worst_geo <= 1e-10, f"max residual {worst_geo:.3e} (limit 1e-10)"),
        Check("duality/pwe-nonzero", pwe > 1e-6, f"residual {pwe:.3e} (must exceed 1e-6)"),
    ]


def ordering_suite(n: int = 1000, seed: int = 1, n_lattices: int = 20) -> list[Check]:
    """Algebraic orderings between estimates plus the mean-modulus ceiling."""
    rows = random_triples(n, seed)
    bad_sandwich = bad_hs = bad_mm = 0
    tol = 1e-12
    for mu1, mu2, f in rows:
        f1 = 1.0 - f
        a = mst_two_phase_modulus(mu1, mu2, f)
        b = mst_two_phase_modulus(mu2, mu1, f1)
        p = pwe_two_phase_modulus(mu1, mu2, f1)
        lo, hi = min(a, b), max(a, b)
        if not (lo - tol * hi <= p <= hi + tol * hi):
            bad_sandwich += 1
        mean = mu1 * f1 + mu2 * f
        var = f * f1 * (mu1 - mu2) ** 2
        iso_upper = mean - var / (2.0 * max(mu1, mu2))
        if hi > iso_upper * (1 + tol):
            bad_hs += 1
    geo_rows = random_triples(max(n // 10, 1), seed + 1)
    for mu1, mu2, f in geo_rows:
        table = LineTable(Lattice.from_materials(Material(mu1, 1.0),
                                                 [(Material(mu2, 1.0), AxisSquare(math.sqrt(f)))]))
        ar, ge = table.arithmetic([mu1, mu2]), table.geometric([mu1, mu2])
        if ge.a1 > ar.a1 * (1 + tol) or ge.a2 > ar.a2 * (1 + tol):
            bad_mm += 1
    rng = np.random.default_rng(seed)
    bad_ceiling = 0
    for _ in range(n_lattices):
        lat = random_lattice(rng)
        mom = cell_moments(lat)
        table = mu_table(lat, 4)
        M = dense_M(table, build_grid(4), (1.0, 0.0))
        if M < -1e-12 * mom.mu_mean:
            bad_ceiling += 1
    return [
        Check("ordering/mst-pwe-sandwich", bad_sandwich == 0, f"{bad_sandwich} of {n} violate"),
        Check("ordering/hs-below-pwe-bound", bad_hs == 0, f"{bad_hs} of {n} violate"),
        Check("ordering/mmtilde-below-mm", bad_mm == 0, f"{bad_mm} of {len(geo_rows)} violate"),
        Check("ordering/mean-ceiling", bad_ceiling == 0,
              f"{bad_ceiling} of {n_lattices} lattices exceed <mu>/<rho>"),
    ]


def bounds_suite(n_lattices: int = 20, j: int = 4, seed: int = 2) -> list[Check]:
    """Leading-term bounds bracket the dense solution at the same truncation."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_lattices):
        lat = random_lattice(rng)
        mom = cell_moments(lat)
        table = mu_table(lat, j)
        grid = build_grid(j)
        for kappa in ((1.0, 0.0), (0.6, 0.8)):
            k = np.array(kappa)
            c2 = (mom.mu_mean - dense_M(table, grid, kappa)) / mom.rho_mean
            b = pwe_bounds(mom, float(k @ F_quadratic(table, grid) @ k))
            slack = 1e-10 * mom.mu_mean / mom.rho_mean
            if c2 > b.upper + slack or (b.lower is not None and c2 < b.lower - slack):
                bad += 1
    return [Check("bounds/sandwich", bad == 0, f"{bad} of {2 * n_lattices} cases violate")]


def appendix_suite(m_max: int = 60) -> list[Check]:
    table = peak_profile(1, 1, 2.0, 1.0)
    rep = convergence_report(table)
    grid = build_grid(2, table.a1, table.a2)
    res = neumann_M(table, grid, (1.0, 0.0), SeriesConfig(j=2, m=400, mu0="mean"))
    tails = np.cumsum(res.terms[::-1])[::-1] / res.mu0
    worst = max(abs(tails[m + 1]) / rep.remainder_bound(m) for m in range(m_max + 1))
    return [
        Check("appendix/theta", abs(rep.theta - 3.0 / 7.0) <= 1e-12, f"theta {rep.theta:.15f}"),
        Check("appendix/margin", rep.margin == 1.0, f"margin {rep.margin!r}"),
        Check("appendix/tail-bound", worst <= 1.0,
              f"max tail/bound over m=0..{m_max} is {worst:.3e}"),
    ]


def oracle_suite(n_lattices: int = 20, seed: int = 3, tol: float = 1e-8) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_lattices):
        lat = random_lattice(rng)
        j = 1 + i % 4
        table = mu_table(lat, j)
        grid = build_grid(j)
        exact = dense_M(table, grid, (1.0, 0.0))
        series = neumann_M(table, grid, (1.0, 0.0), SeriesConfig(j=j, m=20000, tol=1e-15))
        worst = max(worst, abs(series.M - exact) / abs(exact))
    return [Check("oracle/series-vs-dense", worst <= tol,
                  f"max relative gap {worst:.3e} over {n_lattices} lattices (limit {tol:g})")]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "duality": duality_suite,
    "ordering": ordering_suite,
    "bounds": bounds_suite,
    "appendix": appendix_suite,
    "oracle": oracle_suite,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    try:
        return SUITES[name]()
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'") from None


__all__ = ["Check", "SUITES", "run_suite", "random_lattice", "random_triples",
           "duality_suite", "ordering_suite", "bounds_suite", "appendix_suite", "oracle_suite"]
