"""Closed-form speed estimates from iterated line averages of mu.

Notation used below: ``<.>_x2`` averages along a line on which x2 varies
(x1 fixed), and the outer average then runs over x1. Each ordering gives a
pair of coefficients ``(A1, A2)`` with ``c^2(kappa) = (A1 k1^2 + A2 k2^2)/<rho>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .lattice import Lattice, SampledField, cell_moments, line_rule
from .pwe import as_direction

ORDERS = ("x1-first", "x2-first")


@dataclass(frozen=True)
class Coefficients:
    """Axis coefficients (Pa) of a quadratic speed form."""

    a1: float
    a2: float

    def c2(self, kappa, rho_mean: float) -> float:
        k = as_direction(kappa).vector
        return (self.a1 * k[0] ** 2 + self.a2 * k[1] ** 2) / rho_mean

    def speed(self, kappa, rho_mean: float) -> float:
        return math.sqrt(max(self.c2(kappa, rho_mean), 0.0))


@dataclass(frozen=True)
class MMReport:
    """Both orderings, their arithmetic and geometric combinations.

    ``quad_error`` is the largest coefficient change (Pa) between the
    default panel count and twice that many panels.
    """

    x1_first: Coefficients
    x2_first: Coefficients
    arithmetic: Coefficients
    geometric: Coefficients
    rho_mean: float
    quad_error: float = 0.0

    def c_mm(self, kappa=None) -> float:
        """Arithmetic-mean estimate; isotropic average of the axes if ``kappa`` is None."""
        if kappa is None:
            return math.sqrt(0.5 * (self.arithmetic.a1 + self.arithmetic.a2) / self.rho_mean)
        return self.arithmetic.speed(kappa, self.rho_mean)

    def c_mmtilde(self, kappa=None) -> float:
        if kappa is None:
            return math.sqrt(0.5 * (self.geometric.a1 + self.geometric.a2) / self.rho_mean)
        return self.geometric.speed(kappa, self.rho_mean)

    @property
    def symmetry_gap(self) -> float:
        """Relative difference between the two axis coefficients of the arithmetic form."""
        a = self.arithmetic
        return abs(a.a1 - a.a2) / max(abs(a.a1), abs(a.a2), 1e-300)


def _line_means(fractions: np.ndarray, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Arithmetic and harmonic means of mu on each line.

    A line crossing a zero-modulus phase over a positive length gets a
    harmonic mean of exactly 0 (the limiting value).
    """
    arith = fractions @ mu
    pos = mu > 0
    inv = fractions[:, pos] @ (1.0 / mu[pos])
    blocked = (fractions[:, ~pos] > 0).any(axis=1) if (~pos).any() else np.zeros(len(inv), bool)
    with np.errstate(divide="ignore"):
        harm = np.where(blocked | (inv == 0), 0.0, 1.0 / np.where(inv > 0, inv, 1.0))
    return arith, harm


def _outer(weights, arith, harm) -> tuple[float, float]:
    """(outer harmonic of arithmetic line means, outer mean of harmonic line means)."""
    with np.errstate(divide="ignore"):
        s = float(weights @ np.where(arith > 0, 1.0 / np.where(arith > 0, arith, 1.0), np.inf))
    across = 0.0 if not math.isfinite(s) or s <= 0 else 1.0 / s
    along = float(weights @ harm)
    return across, along


def _field_lines(field: SampledField, axis: int):
    mu = field.mu
    # lines along x1 vary the first index
    lines_mu = mu.T if axis == 1 else mu
    arith = lines_mu.mean(axis=1)
    if np.any(mu == 0):
        blocked = (lines_mu == 0).any(axis=1)
        safe = np.where(lines_mu > 0, lines_mu, 1.0)
        harm = np.where(blocked, 0.0, 1.0 / (1.0 / safe).mean(axis=1))
    else:
        harm = 1.0 / (1.0 / lines_mu).mean(axis=1)
    w = np.full(len(arith), 1.0 / len(arith))
    return w, arith, harm


def _order_coefficients(obj, order: str, n_panels: int, n_points: int) -> Coefficients:
    if order not in ORDERS:
        raise ConfigError(f"order must be one of {ORDERS}")
    axis = 1 if order == "x1-first" else 2
    if isinstance(obj, SampledField):
        w, arith, harm = _field_lines(obj, axis)
    else:
        rule = line_rule(obj, axis, n_panels, n_points)
        w = rule.weights
        arith, harm = _line_means(rule.fractions, obj.mu)
    across, along = _outer(w, arith, harm)
    # lines along x1 give the x1 coefficient from harmonic line means
    if axis == 1:
        return Coefficients(along, across)
    return Coefficients(across, along)


def mm_directional(obj: Lattice | SampledField, order: str = "x2-first",
                   n_panels: int = 64, n_points: int = 8) -> Coefficients:
    """Axis coefficients for one ordering of the line averages.

    ``"x2-first"`` averages along x2 first: ``A1`` is the harmonic outer mean
    of the arithmetic line means and ``A2`` the outer mean of the harmonic
    line means. ``"x1-first"`` swaps the roles of the axes.
    """
    return _order_coefficients(obj, order, n_panels, n_points)


def _combine(a: Coefficients, b: Coefficients, geometric: bool) -> Coefficients:
    if geometric:
        return Coefficients(math.sqrt(max(a.a1 * b.a1, 0.0)), math.sqrt(max(a.a2 * b.a2, 0.0)))
    return Coefficients(0.5 * (a.a1 + b.a1), 0.5 * (a.a2 + b.a2))


def _report(obj, n_panels, n_points) -> MMReport:
    one = mm_directional(obj, "x1-first", n_panels, n_points)
    two = mm_directional(obj, "x2-first", n_panels, n_points)
    rho = cell_moments(obj).rho_mean
    return MMReport(one, two, _combine(one, two, False), _combine(one, two, True), rho)


def mm_estimate(obj: Lattice | SampledField, n_panels: int = 64, n_points: int = 8,
                error_estimate: bool = True) -> MMReport:
    """Arithmetic and geometric combinations of both orderings.

    Both orderings are always evaluated. With ``error_estimate`` the run is
    repeated with doubled panels and the largest coefficient change is stored.
    """
    rep = _report(obj, n_panels, n_points)
    if not error_estimate or isinstance(obj, SampledField):
        return rep
    fine = _report(obj, 2 * n_panels, n_points)
    pairs = [(rep.x1_first, fine.x1_first), (rep.x2_first, fine.x2_first)]
    err = max(max(abs(p.a1 - q.a1), abs(p.a2 - q.a2)) for p, q in pairs)
    return MMReport(rep.x1_first, rep.x2_first, rep.arithmetic, rep.geometric,
                    rep.rho_mean, err)


def mm_geometric(obj: Lattice | SampledField, n_panels: int = 64,
                 n_points: int = 8) -> Coefficients:
    """Per-axis geometric means of the two orderings."""
    return _report(obj, n_panels, n_points).geometric


def mm_isotropic_from_fractions(lattice: Lattice, n_panels: int = 64,
                                n_points: int = 8) -> tuple[float, float, float]:
    """Isotropic estimate written with x1-line phase fractions only.

    Returns ``(c, term1, term2)`` where ``term1`` integrates the harmonic
    line means over x2 and ``term2`` is the harmonic outer mean of the
    arithmetic line means. Valid for lattices symmetric under x1 <-> x2.
    """
    rule = line_rule(lattice, 1, n_panels, n_points)
    arith, harm = _line_means(rule.fractions, lattice.mu)
    term2, term1 = _outer(rule.weights, arith, harm)
    rho = cell_moments(lattice).rho_mean
    return math.sqrt(0.5 * (term1 + term2) / rho), term1, term2


class LineTable:
    """Geometry-only line fractions for fast repeated MM evaluations.

    Fractions depend only on the shapes, so one table serves any set of
    phase moduli on the same geometry (useful for duality sweeps).
    """

    def __init__(self, lattice: Lattice, n_panels: int = 64, n_points: int = 8):
        self.rules = {ax: line_rule(lattice, ax, n_panels, n_points) for ax in (1, 2)}
        self.n_phases = lattice.n_phases

    def coefficients(self, mu: Sequence[float]) -> tuple[Coefficients, Coefficients]:
        mu = np.asarray(mu, dtype=float)
        if mu.shape != (self.n_phases,):
            raise ConfigError("one modulus per phase is required")
        out = []
        for ax in (1, 2):
            r = self.rules[ax]
            arith, harm = _line_means(r.fractions, mu)
            across, along = _outer(r.weights, arith, harm)
            out.append(Coefficients(along, across) if ax == 1 else Coefficients(across, along))
        return out[0], out[1]

    def arithmetic(self, mu) -> Coefficients:
        return _combine(*self.coefficients(mu), geometric=False)

    def geometric(self, mu) -> Coefficients:
        return _combine(*self.coefficients(mu), geometric=True)


def laminate_exact(mu: Sequence[float], thickness: Sequence[float], rho_mean: float,
                   kappa=(0.0, 1.0)) -> float:
    """Exact ``c^2`` of a layered medium with mu varying along x2 only.

    ``mu`` and ``thickness`` list the layers (thickness fractions summing to 1).
    """
    mu = np.asarray(mu, dtype=float)
    t = np.asarray(thickness, dtype=float)
    if abs(t.sum() - 1.0) > 1e-12:
        raise ConfigError("layer thickness fractions must sum to 1")
    k = as_direction(kappa).vector
    arith = float(t @ mu)
    used = t > 0
    harm = 0.0 if np.any(mu[used] == 0) else float(1.0 / (t[used] @ (1.0 / mu[used])))
    return (arith * k[0] ** 2 + harm * k[1] ** 2) / rho_mean


__all__ = [
    "Coefficients", "MMReport", "mm_directional", "mm_estimate", "mm_geometric",
    "mm_isotropic_from_fractions", "LineTable", "laminate_exact", "ORDERS",
]
