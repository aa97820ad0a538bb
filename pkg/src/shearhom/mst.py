"""Multiple-scattering closed forms and the Keller duality residual."""

from __future__ import annotations

import math
from typing import Iterable

from .errors import ConfigError, InvalidRegimeError
from .lattice import AxisSquare, Lattice, Material
from .mm import LineTable
from .pwe import pwe_two_phase_modulus

ESTIMATORS = ("mst", "pwe", "mm", "mmtilde")


def _mu(x) -> float:
    return float(x.mu if isinstance(x, Material) else x)


def mst_two_phase_modulus(mu_matrix: float, mu_inclusion: float, f_inclusion: float) -> float:
    """Effective modulus for inclusions of fraction ``f_inclusion`` in a matrix."""
    if not 0.0 <= f_inclusion <= 1.0:
        raise ConfigError("inclusion fraction must lie in [0, 1]")
    m, i = mu_matrix, mu_inclusion
    d = m - i
    den = m + i + d * f_inclusion
    if den == 0.0:
        raise InvalidRegimeError("vanishing denominator")
    return m * (m + i - d * f_inclusion) / den


def mst_two_phase(matrix: Material | float, inclusion: Material | float,
                  f_inclusion: float, rho_mean: float) -> float:
    """Squared speed ``c^2`` with the declared matrix taken as the host.

    The conjugate estimate follows by passing the inclusion as matrix and
    ``1 - f_inclusion`` as its fraction.
    """
    return mst_two_phase_modulus(_mu(matrix), _mu(inclusion), f_inclusion) / rho_mean


def mst_kuster_toksoz(matrix: Material | float,
                      inclusions: Iterable[tuple[Material | float, float]],
                      rho_mean: float) -> float:
    """Squared speed for several inclusion types in one matrix.

    Raises :class:`InvalidRegimeError` when the denominator is not positive,
    which happens at low matrix content.
    """
    m = _mu(matrix)
    s = 0.0
    total = 0.0
    for mat, f in inclusions:
        mj = _mu(mat)
        if f < 0:
            raise ConfigError("inclusion fractions must be nonnegative")
        total += f
        if f > 0:
            s += f * (m - mj) / (m + mj)
    if total > 1.0 + 1e-12:
        raise ConfigError("inclusion fractions exceed 1")
    if 1.0 + s <= 0.0:
        raise InvalidRegimeError("Kuster-Toksoz denominator is not positive")
    return m * (1.0 - s) / (1.0 + s) / rho_mean


def _square_rod_table(f: float, n_panels: int):
    lat = Lattice.from_materials(Material(1.0, 1.0),
                                 [(Material(1.0, 1.0), AxisSquare(math.sqrt(f)))])
    return LineTable(lat, n_panels)


def _modulus(estimator: str, mu1: float, mu2: float, f: float, table) -> float:
    if estimator == "mst":
        return mst_two_phase_modulus(mu1, mu2, f)
    if estimator == "pwe":
        return pwe_two_phase_modulus(mu1, mu2, 1.0 - f)
    coeffs = table.arithmetic([mu1, mu2]) if estimator == "mm" else table.geometric([mu1, mu2])
    return 0.5 * (coeffs.a1 + coeffs.a2)


def keller_residual(estimator: str, mu1: float, mu2: float, f: float,
                    geometry=None, n_panels: int = 64) -> float:
    """``mu_eff(mu1, mu2) * mu_eff(mu2, mu1) - mu1 * mu2`` for a named estimator.

    ``mu1`` is the matrix modulus and ``f`` the inclusion fraction; the
    reciprocal lattice swaps the two moduli and keeps the geometry. The
    line-average estimators (``"mm"``, ``"mmtilde"``) use ``geometry``, a
    two-phase :class:`~shearhom.mm.LineTable`, defaulting to a centred
    axis-aligned square rod of area ``f``.
    """
    if estimator not in ESTIMATORS:
        raise ConfigError(f"estimator must be one of {ESTIMATORS}")
    if mu1 <= 0 or mu2 <= 0:
        raise ConfigError("duality needs positive moduli")
    table = None
    if estimator in ("mm", "mmtilde"):
        table = geometry if geometry is not None else _square_rod_table(f, n_panels)
    a = _modulus(estimator, mu1, mu2, f, table)
    b = _modulus(estimator, mu2, mu1, f, table)
    return a * b - mu1 * mu2


__all__ = [
    "mst_two_phase", "mst_two_phase_modulus", "mst_kuster_toksoz", "keller_residual",
    "ESTIMATORS",
]
