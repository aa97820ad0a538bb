"""Plane-wave evaluation of the effective shear speed.

The quasistatic speed along a unit direction ``kappa`` is

    c^2 = (<mu> - M(kappa)) / <rho>

where ``M`` is a quadratic form over the nonzero reciprocal modes. It is
computed matrix-free by a Neumann series around a constant reference modulus
``mu0`` and, for small truncations, by a dense linear solve used as an oracle.
Closed-form estimates and bounds built from the leading term live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft

from .errors import (ConfigError, DivergenceError, InvalidResultError,
                     SingularSystemError)
from .fourier import FourierTable, ReciprocalGrid, build_grid, table_for
from .lattice import CellMoments, Lattice, SampledField, cell_moments

DENSE_MAX_J = 8
_GROWTH_LIMIT = 5


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Direction:
    """Unit propagation direction."""

    k1: float
    k2: float

    def __post_init__(self):
        n = math.hypot(self.k1, self.k2)
        if not math.isfinite(n) or abs(n - 1.0) > 1e-9:
            raise ConfigError(f"direction must have unit length, got |kappa| = {n}")

    @classmethod
    def from_angle(cls, degrees: float) -> "Direction":
        t = math.radians(degrees)
        return cls(math.cos(t), math.sin(t))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.k1, self.k2])


def as_direction(kappa) -> Direction:
    if isinstance(kappa, Direction):
        return kappa
    k = np.asarray(kappa, dtype=float).ravel()
    if k.size != 2:
        raise ConfigError("kappa needs two components")
    return Direction(float(k[0]), float(k[1]))


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and series settings.

    Parameters
    ----------
    j : int
        Modes per half-axis; the grid holds ``(2j+1)^2 - 1`` vectors.
    m : int
        Highest series power kept (``m + 1`` terms).
    mu0 : {"mid", "mean"} or float
        Reference modulus in Pa. ``"mid"`` is the midpoint of the extreme
        moduli, ``"mean"`` the cell average.
    path : {"direct", "conv"}
        How the coupling operator is applied.
    tol : float, optional
        Stop early once two consecutive terms fall below ``tol`` times the
        running sum (``m`` then acts as a cap).
    """

    j: int = 12
    m: int = 150
    mu0: str | float = "mid"
    path: str = "direct"
    tol: float | None = None

    def __post_init__(self):
        if int(self.j) != self.j or self.j < 1:
            raise ConfigError(f"j must be a positive integer, got {self.j}")
        if int(self.m) != self.m or self.m < 0:
            raise ConfigError(f"m must be a nonnegative integer, got {self.m}")
        if self.path not in ("direct", "conv"):
            raise ConfigError(f"path must be 'direct' or 'conv', got {self.path!r}")
        if isinstance(self.mu0, str):
            if self.mu0 not in ("mid", "mean"):
                raise ConfigError(f"mu0 must be 'mid', 'mean' or a modulus, got {self.mu0!r}")
        elif not (float(self.mu0) > 0 and math.isfinite(float(self.mu0))):
            raise ConfigError("mu0 must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")

    def resolve_mu0(self, table: FourierTable) -> float:
        if self.mu0 == "mid":
            return 0.5 * (table.mu_max + table.mu_min)
        if self.mu0 == "mean":
            return table.mean
        return float(self.mu0)


# --------------------------------------------------------------------------
# Operator
# --------------------------------------------------------------------------


def _check_table(table: FourierTable, grid: ReciprocalGrid) -> None:
    if table.extent < 2 * grid.j:
        raise ConfigError(
            f"table extent {table.extent} cannot supply differences for j = {grid.j}"
        )


def assemble_f(table: FourierTable, grid: ReciprocalGrid, kappa) -> np.ndarray:
    """Right-hand side ``mu_hat(g) (g . kappa) / |g|`` on the grid."""
    k = as_direction(kappa).vector
    return table.at(grid.n1, grid.n2) * (grid.unit_vectors @ k)


class CouplingOperator:
    """Normalized coupling ``C`` between nonzero modes.

    ``C[g, g'] = mu_delta(g - g') (g . g') / (|g| |g'| mu0)`` where
    ``mu_delta`` equals the coefficients of mu except at the origin, where
    it is ``<mu> - mu0``.

    The ``"direct"`` path stores the dense kernel; ``"conv"`` applies it as
    two zero-padded circular convolutions evaluated by FFT.
    """

    def __init__(self, table: FourierTable, grid: ReciprocalGrid, mu0: float,
                 path: str = "direct"):
        _check_table(table, grid)
        if not mu0 > 0:
            raise ConfigError("mu0 must be positive")
        if path not in ("direct", "conv"):
            raise ConfigError(f"unknown path {path!r}")
        self.table = table
        self.grid = grid
        self.mu0 = float(mu0)
        self.path = path
        self.units = grid.unit_vectors
        j = grid.j
        e = table.extent
        kernel = table.coeffs[e - 2 * j:e + 2 * j + 1, e - 2 * j:e + 2 * j + 1].copy()
        kernel[2 * j, 2 * j] = table.mean - self.mu0
        self._kernel = kernel / self.mu0
        if path == "direct":
            self._matrix = self._dense()
        else:
            self._setup_conv()

    def _dense(self) -> np.ndarray:
        g = self.grid
        j = g.j
        d1 = g.n1[:, None] - g.n1[None, :]
        d2 = g.n2[:, None] - g.n2[None, :]
        return self._kernel[d1 + 2 * j, d2 + 2 * j] * (self.units @ self.units.T)

    def _setup_conv(self) -> None:
        j = self.grid.j
        L = scipy.fft.next_fast_len(4 * j + 1)
        self._L = L
        r = np.arange(-2 * j, 2 * j + 1) % L
        box = np.zeros((L, L), dtype=complex)
        box[np.ix_(r, r)] = self._kernel
        self._kernel_hat = scipy.fft.fft2(box)
        self._rows = self.grid.n1 % L
        self._cols = self.grid.n2 % L

    def dense_matrix(self) -> np.ndarray:
        return self._matrix if self.path == "direct" else self._dense()

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.path == "direct":
            return self._matrix @ v
        L = self._L
        p = np.zeros((2, L, L), dtype=complex)
        p[0, self._rows, self._cols] = self.units[:, 0] * v
        p[1, self._rows, self._cols] = self.units[:, 1] * v
        q = scipy.fft.ifft2(scipy.fft.fft2(p, axes=(1, 2)) * self._kernel_hat, axes=(1, 2))
        qg = q[:, self._rows, self._cols]
        return self.units[:, 0] * qg[0] + self.units[:, 1] * qg[1]

    __call__ = apply


def apply_C(table: FourierTable, grid: ReciprocalGrid, v, mu0: float,
            path: str = "direct") -> np.ndarray:
    """One-shot application of the coupling operator (builds it each call)."""
    return CouplingOperator(table, grid, mu0, path).apply(v)


# --------------------------------------------------------------------------
# Series and dense oracle
# --------------------------------------------------------------------------


@dataclass
class SeriesResult:
    """Outcome of a Neumann-series evaluation.

    ``terms[n]`` is ``((-C)^n f, f)`` and ``partial_sums[n]`` the running sum
    of those terms divided by ``mu0`` (so the last entry is ``M``).
    """

    M: float
    mu0: float
    terms: np.ndarray
    partial_sums: np.ndarray
    stopped_early: bool = False

    @property
    def terms_used(self) -> int:
        return len(self.terms)

    @property
    def last_term(self) -> float:
        """Magnitude of the last included term, scaled like ``M`` (Pa)."""
        return float(abs(self.terms[-1]) / self.mu0) if len(self.terms) else 0.0


def neumann_series(op: CouplingOperator, f: np.ndarray, m: int,
                   tol: float | None = None) -> SeriesResult:
    """Sum ``mu0^-1 sum_{n<=m} ((-C)^n f, f)`` for a prepared operator.

    Because ``C`` is Hermitian, the terms follow from ``w_k = C^k f`` as
    ``term_{2k} = (w_k, w_k)`` and ``term_{2k+1} = -(C w_k, w_k)``, so only
    about ``m/2`` operator applications are needed.
    """
    terms: list[float] = []
    growth = 0
    prev = None
    w = np.asarray(f, dtype=complex)
    stopped = False
    total = 0.0
    n = 0
    while n <= m:
        if n % 2 == 0:
            t = float(np.vdot(w, w).real)
            cw = None
        else:
            cw = op.apply(w)
            t = -float(np.vdot(w, cw).real)
        if not math.isfinite(t):
            raise DivergenceError(n)
        if prev is not None and abs(t) > abs(prev):
            growth += 1
            if growth >= _GROWTH_LIMIT:
                raise DivergenceError(n)
        else:
            growth = 0
        terms.append(t)
        total += t
        prev = t
        if n % 2 == 1:
            w = cw
        if tol is not None and n >= 1:
            scale = abs(total) if total != 0 else 1.0
            if abs(terms[-1]) <= tol * scale and abs(terms[-2]) <= tol * scale:
                stopped = True
                break
        n += 1
    arr = np.array(terms)
    partial = np.cumsum(arr) / op.mu0
    return SeriesResult(float(partial[-1]) if len(partial) else 0.0, op.mu0, arr, partial, stopped)


def neumann_M(table: FourierTable, grid: ReciprocalGrid, kappa,
              config: SeriesConfig) -> SeriesResult:
    """Matrix-free series value of ``M(kappa)`` with its partial sums."""
    mu0 = config.resolve_mu0(table)
    op = CouplingOperator(table, grid, mu0, config.path)
    return neumann_series(op, assemble_f(table, grid, kappa), config.m, config.tol)


def dense_M(table: FourierTable, grid: ReciprocalGrid, kappa) -> float:
    """Exact value of the truncated quadratic form by a dense solve (``j <= 8``)."""
    if grid.j > DENSE_MAX_J:
        raise ConfigError(f"dense oracle is limited to j <= {DENSE_MAX_J}")
    _check_table(table, grid)
    k = as_direction(kappa).vector
    # normalized wavevectors; M is invariant under a common rescaling of g
    g = np.stack([grid.n1 / table.a1, grid.n2 / table.a2], axis=1).astype(float)
    e = table.extent
    d1 = grid.n1[:, None] - grid.n1[None, :]
    d2 = grid.n2[:, None] - grid.n2[None, :]
    B = table.coeffs[d1 + e, d2 + e] * (g @ g.T)
    d = table.at(grid.n1, grid.n2) * (g @ k)
    if not np.any(d):
        return 0.0
    try:
        h = np.linalg.solve(B, d)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None
    if not np.all(np.isfinite(h)) or np.linalg.cond(B) > 1e14:
        raise SingularSystemError("PWE matrix is numerically singular")
    return float(np.vdot(d, h).real)


# --------------------------------------------------------------------------
# Effective speed
# --------------------------------------------------------------------------


@dataclass
class NumericResult:
    """Numerical effective speed with series diagnostics."""

    c: float
    mu_eff: float
    M: float
    mu_mean: float
    rho_mean: float
    series: SeriesResult


def effective_speed_numeric(obj: Lattice | SampledField, kappa=(1.0, 0.0),
                            config: SeriesConfig | None = None,
                            table: FourierTable | None = None) -> NumericResult:
    """Quasistatic shear speed from the truncated Neumann series."""
    config = config or SeriesConfig()
    mom = cell_moments(obj)
    table = table or table_for(obj, config.j)
    grid = build_grid(config.j, table.a1, table.a2)
    res = neumann_M(table, grid, kappa, config)
    mu_eff = mom.mu_mean - res.M
    if mu_eff < 0 or not math.isfinite(mu_eff):
        raise InvalidResultError(
            f"effective modulus {mu_eff:.6g} Pa is negative; the series is under-resolved"
        )
    return NumericResult(math.sqrt(mu_eff / mom.rho_mean), mu_eff, res.M,
                         mom.mu_mean, mom.rho_mean, res)


# --------------------------------------------------------------------------
# Closed forms
# --------------------------------------------------------------------------


def F_quadratic(table: FourierTable, grid: ReciprocalGrid) -> np.ndarray:
    """2x2 matrix ``sum |mu_hat(g)|^2 g_i g_j / |g|^2`` over the grid modes."""
    w = np.abs(table.at(grid.n1, grid.n2)) ** 2
    u = grid.unit_vectors
    F = (u * w[:, None]).T @ u
    return 0.5 * (F + F.T)


def _directional_F(moments: CellMoments, F, kappa) -> float:
    if F is None:
        return 0.5 * moments.mu_variance
    F = np.asarray(F, dtype=float)
    if F.ndim == 0:
        return float(F)
    k = as_direction(kappa if kappa is not None else (1.0, 0.0)).vector
    return float(k @ F @ k)


def pwe_estimate(moments: CellMoments, F=None, kappa=None) -> float:
    """Leading-term speed estimate (m/s).

    Without ``F`` the isotropic form ``<mu> - var(mu)/(mu_max + mu_min)`` is
    used; with a 2x2 ``F`` matrix (or a scalar ``F(kappa)``) the directional
    form ``<mu> - F(kappa)/mu_mid`` is returned.
    """
    mid = moments.mu_mid
    if mid <= 0:
        raise ConfigError("mu_max + mu_min must be positive")
    mu_eff = moments.mu_mean - _directional_F(moments, F, kappa) / mid
    return math.sqrt(max(mu_eff, 0.0) / moments.rho_mean)


def pwe_two_phase_modulus(mu1: float, mu2: float, f1: float) -> float:
    """Effective modulus of the two-phase leading-term estimate."""
    f2 = 1.0 - f1
    return mu1 * f1 + mu2 * f2 - f1 * f2 * (mu1 - mu2) ** 2 / (mu1 + mu2)


def pwe_two_phase(mu1: float, mu2: float, f1: float, rho_mean: float) -> float:
    return math.sqrt(max(pwe_two_phase_modulus(mu1, mu2, f1), 0.0) / rho_mean)


@dataclass(frozen=True)
class Bounds:
    """Squared-speed bounds (m^2/s^2); ``lower`` is None when mu_min is 0."""

    lower: float | None
    upper: float


def pwe_bounds(moments: CellMoments, F=None, kappa=None) -> Bounds:
    """Leading-term bounds on ``c^2``.

    Uses ``F(kappa)`` when given, else the isotropic value ``var(mu)/2``.
    """
    Fk = _directional_F(moments, F, kappa)
    upper = (moments.mu_mean - Fk / moments.mu_max) / moments.rho_mean
    lower = None
    if moments.mu_min > 0:
        lower = max((moments.mu_mean - Fk / moments.mu_min) / moments.rho_mean, 0.0)
    return Bounds(lower, upper)


def acoustic3d_estimate(K: Sequence[float], rho: Sequence[float],
                        fractions: Sequence[float]) -> tuple[float, float]:
    """Upper bound and estimate of ``c^2`` for a cubic 3D fluid composite.

    Returns ``(upper, estimate)`` from per-phase bulk moduli, densities and
    volume fractions.
    """
    K = np.asarray(K, dtype=float)
    rho = np.asarray(rho, dtype=float)
    f = np.asarray(fractions, dtype=float)
    if np.any(K <= 0) or np.any(rho <= 0):
        raise ConfigError("bulk moduli and densities must be positive")
    inv_k = f @ (1.0 / K)
    b = 1.0 / rho
    b1 = f @ b
    var = max(f @ (b * b) - b1 * b1, 0.0)
    present = f > 0
    bmax, bmin = b[present].max(), b[present].min()
    upper = (b1 - var / (3.0 * bmax)) / inv_k
    est = (b1 - (2.0 / 3.0) * var / (bmax + bmin)) / inv_k
    return float(upper), float(est)


__all__ = [
    "Direction", "as_direction", "SeriesConfig", "CouplingOperator", "apply_C",
    "assemble_f", "SeriesResult", "neumann_series", "neumann_M", "dense_M",
    "NumericResult", "effective_speed_numeric", "F_quadratic", "pwe_estimate",
    "pwe_two_phase", "pwe_two_phase_modulus", "Bounds", "pwe_bounds",
    "acoustic3d_estimate",
]
