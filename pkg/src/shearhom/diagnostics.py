"""Convergence diagnostics for the Neumann series and an analytic test profile."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, ConvergenceConditionError
from .fourier import FourierTable
from .lattice import SampledField

_EXACT_BINOMIAL_MAX = 30


def theta(table: FourierTable, mu0: float) -> float:
    """l1-type bound on the norm of the coupling operator.

    ``1 - <mu>/mu0 + sum_{g != 0} |mu_hat(g)| / mu0`` over the whole table.
    Warns when ``mu0 < <mu>``, where the bound was not derived.
    """
    if mu0 <= 0:
        raise ConfigError("mu0 must be positive")
    mean = table.mean
    if mu0 < mean * (1 - 1e-14):
        warnings.warn("mu0 below the cell mean; theta is not a norm bound there", stacklevel=2)
    return 1.0 - mean / mu0 + table.offdiag_l1() / mu0


def sufficient_condition(table: FourierTable) -> tuple[bool, float]:
    """Whether ``sum |mu_hat(g)| < <mu>`` holds, and the margin ``<mu> - sum``."""
    margin = table.mean - table.offdiag_l1()
    return margin > 0, margin


def remainder_bound(mean: float, l1_offdiag: float, theta_value: float, m: int) -> float:
    """Bound on the series tail after terms ``0..m`` (Pa)."""
    margin = mean - l1_offdiag
    if margin <= 0:
        raise ConvergenceConditionError("sum of |mu_hat| reaches the mean; no remainder bound")
    if m < 0:
        raise ConfigError("m must be nonnegative")
    return mean * mean * theta_value ** (m + 1) / margin


@dataclass(frozen=True)
class ConvergenceReport:
    """Summary of the sufficient convergence condition for one table.

    ``truncated`` notes that sums run over the table's index range only.
    """

    l1_offdiag: float
    mean: float
    theta: float
    mu0: float
    condition_met: bool
    truncated: bool = True

    @property
    def margin(self) -> float:
        return self.mean - self.l1_offdiag

    def remainder_bound(self, m: int) -> float:
        return remainder_bound(self.mean, self.l1_offdiag, self.theta, m)


def convergence_report(table: FourierTable, mu0: float | None = None) -> ConvergenceReport:
    mu0 = table.mean if mu0 is None else float(mu0)
    met, _ = sufficient_condition(table)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        th = theta(table, mu0)
    return ConvergenceReport(table.offdiag_l1(), table.mean, th, mu0, met)


# --------------------------------------------------------------------------
# Peak profile
# --------------------------------------------------------------------------


def psi_hat(n: int, g) -> np.ndarray:
    """Coefficients of ``cos(x)^(2n)`` at integer harmonics ``g``.

    Nonzero only for even ``|g| <= 2n``, where the value is
    ``4^-n binom(2n, n + g/2)``. Exact integer arithmetic is used up to
    ``n = 30`` and log-gamma beyond.
    """
    if int(n) != n or n < 0:
        raise ConfigError("n must be a nonnegative integer")
    n = int(n)
    g = np.asarray(g)
    gi = g.astype(int)
    out = np.zeros(g.shape, dtype=float)
    valid = (gi == g) & (gi % 2 == 0) & (np.abs(gi) <= 2 * n)
    k = n + gi[valid] // 2
    if n <= _EXACT_BINOMIAL_MAX:
        out[valid] = [math.comb(2 * n, int(kk)) / 4 ** n for kk in k]
    else:
        out[valid] = np.exp(gammaln(2 * n + 1) - gammaln(k + 1) - gammaln(2 * n - k + 1)
                            - n * math.log(4.0))
    return out


def _check_peak(n1, n2, mu0, amplitude):
    if not (mu0 > amplitude > 0):
        raise ConfigError("peak profile needs mu0 > amplitude > 0")
    if int(n1) != n1 or int(n2) != n2 or n1 < 1 or n2 < 1:
        raise ConfigError("peak exponents must be integers >= 1")


def peak_profile(n1: int, n2: int, mu0: float, amplitude: float,
                 extent: int | None = None) -> FourierTable:
    """Analytic table of ``mu0 - amplitude * cos(x1)^(2 n1) cos(x2)^(2 n2)``.

    The cell is ``[-pi, pi]^2`` (period ``2 pi``), so the integer table index
    equals the wavevector component. ``extent`` defaults to ``4 max(n1, n2)``
    which supports solver truncations up to ``j = 2 max(n1, n2)``.
    """
    _check_peak(n1, n2, mu0, amplitude)
    e = 4 * max(n1, n2) if extent is None else int(extent)
    r = np.arange(-e, e + 1)
    coeffs = -amplitude * np.outer(psi_hat(n1, r), psi_hat(n2, r)).astype(complex)
    coeffs[e, e] += mu0
    two_pi = 2.0 * math.pi
    return FourierTable(coeffs, e, two_pi, two_pi, mu0 - amplitude, mu0)


def peak_field(n1: int, n2: int, mu0: float, amplitude: float, M: int,
               rho: float = 1.0) -> SampledField:
    """The same profile sampled on an ``M x M`` grid over the ``2 pi`` cell."""
    _check_peak(n1, n2, mu0, amplitude)
    x = 2.0 * math.pi * np.arange(M) / M
    c1 = np.cos(x) ** (2 * n1)
    c2 = np.cos(x) ** (2 * n2)
    mu = mu0 - amplitude * np.outer(c1, c2)
    two_pi = 2.0 * math.pi
    return SampledField(mu, np.full_like(mu, rho), two_pi, two_pi)


__all__ = [
    "theta", "sufficient_condition", "remainder_bound", "ConvergenceReport",
    "convergence_report", "psi_hat", "peak_profile", "peak_field",
]
