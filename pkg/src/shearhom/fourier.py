"""Truncated reciprocal grids and Fourier coefficients of the shear modulus."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AliasingError, ConfigError
from .lattice import Lattice, SampledField, Shape, cell_moments


@dataclass(frozen=True)
class ReciprocalGrid:
    """Nonzero reciprocal vectors with integer indices in ``[-j, j]^2``.

    Ordering is row-major over ``(n1, n2)`` with the origin removed.
    """

    j: int
    a1: float
    a2: float
    n1: np.ndarray
    n2: np.ndarray

    @property
    def N(self) -> int:
        return 2 * self.j + 1

    @property
    def size(self) -> int:
        return self.n1.size

    @property
    def vectors(self) -> np.ndarray:
        """Physical wavevectors, shape ``(size, 2)`` in rad/m."""
        return np.stack([2 * np.pi * self.n1 / self.a1, 2 * np.pi * self.n2 / self.a2], axis=1)

    @property
    def unit_vectors(self) -> np.ndarray:
        g = self.vectors
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def index_of(self, n1: int, n2: int) -> int:
        """Position of ``(n1, n2)`` in the grid ordering."""
        if (n1, n2) == (0, 0) or max(abs(n1), abs(n2)) > self.j:
            raise KeyError((n1, n2))
        flat = (n1 + self.j) * self.N + (n2 + self.j)
        centre = self.j * self.N + self.j
        return flat - (flat > centre)


def build_grid(j: int, a1: float = 1.0, a2: float = 1.0) -> ReciprocalGrid:
    if int(j) != j or j < 1:
        raise ConfigError(f"truncation level j must be a positive integer, got {j}")
    j = int(j)
    r = np.arange(-j, j + 1)
    n1, n2 = np.meshgrid(r, r, indexing="ij")
    keep = (n1 != 0) | (n2 != 0)
    return ReciprocalGrid(j, float(a1), float(a2), n1[keep].ravel(), n2[keep].ravel())


@dataclass(frozen=True)
class FourierTable:
    """Coefficients of mu on the integer index square ``|n_i| <= extent``.

    ``coeffs[n1 + extent, n2 + extent]`` holds the coefficient for ``(n1, n2)``;
    the centre entry is the cell mean.
    """

    coeffs: np.ndarray
    extent: int
    a1: float
    a2: float
    mu_min: float
    mu_max: float

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.extent, self.extent].real)

    def at(self, n1, n2):
        n1 = np.asarray(n1)
        n2 = np.asarray(n2)
        if np.any(np.abs(n1) > self.extent) or np.any(np.abs(n2) > self.extent):
            raise IndexError("index outside the table extent")
        return self.coeffs[n1 + self.extent, n2 + self.extent]

    def nonzero_modes(self, j: int | None = None) -> np.ndarray:
        """Coefficients with ``|n_i| <= j`` (default: whole table), origin excluded."""
        j = self.extent if j is None else j
        e = self.extent
        block = self.coeffs[e - j:e + j + 1, e - j:e + j + 1].copy()
        block[j, j] = 0.0
        return block

    def offdiag_l1(self, j: int | None = None) -> float:
        """Sum of ``|mu_hat(g)|`` over nonzero modes with ``|n_i| <= j``."""
        return float(np.abs(self.nonzero_modes(j)).sum())

    def offdiag_l2sq(self, j: int | None = None) -> float:
        return float((np.abs(self.nonzero_modes(j)) ** 2).sum())

    def to_csv(self, path: str | Path) -> None:
        e = self.extent
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n1", "n2", "re", "im"])
            for i in range(-e, e + 1):
                for k in range(-e, e + 1):
                    c = self.coeffs[i + e, k + e]
                    w.writerow([i, k, f"{c.real:.12g}", f"{c.imag:.12g}"])


def shape_coefficient(shape: Shape, n1, n2):
    """Fourier coefficient of a shape's indicator at integer index ``(n1, n2)``.

    The physical wavevector is ``g = 2 pi (n1/a1, n2/a2)``; because shapes
    are described in cell-normalized coordinates the coefficient depends on
    the integer index only. Index ``(0, 0)`` returns the shape's area fraction.
    """
    out = shape.coefficient(n1, n2)
    return complex(out) if np.ndim(out) == 0 else out


def mu_table(lattice: Lattice, j: int) -> FourierTable:
    """Analytic coefficients of mu for ``|n_i| <= 2j``."""
    e = 2 * int(j)
    r = np.arange(-e, e + 1)
    n1, n2 = np.meshgrid(r, r, indexing="ij")
    contrast = lattice.contrast()
    coeffs = np.zeros(n1.shape, dtype=complex)
    coeffs[e, e] = lattice.mu[0]
    for k in range(1, lattice.n_phases):
        if contrast[k] != 0.0:
            coeffs += contrast[k] * lattice.phases[k].shape.coefficient(n1, n2)
    mom = cell_moments(lattice)
    coeffs[e, e] = mom.mu_mean
    return FourierTable(coeffs, e, lattice.a1, lattice.a2, mom.mu_min, mom.mu_max)


def dft_table(field: SampledField, j: int) -> FourierTable:
    """Coefficients of a sampled field, normalized so the origin equals the sample mean."""
    e = 2 * int(j)
    M = field.M
    if M < 2 * e + 1:
        raise AliasingError(f"{M} samples per axis cannot resolve |n| <= {e}; need >= {2 * e + 1}")
    spec = np.fft.fft2(field.mu) / (M * M)
    idx = np.arange(-e, e + 1) % M
    coeffs = spec[np.ix_(idx, idx)]
    return FourierTable(coeffs, e, field.a1, field.a2, float(field.mu.min()), float(field.mu.max()))


def table_for(obj: Lattice | SampledField, j: int) -> FourierTable:
    return dft_table(obj, j) if isinstance(obj, SampledField) else mu_table(obj, j)


def table_from_coefficients(coeffs: np.ndarray, mu_min: float, mu_max: float,
                            a1: float = 1.0, a2: float = 1.0) -> FourierTable:
    """Wrap a square coefficient block (odd side, centred on the origin)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    side = coeffs.shape[0]
    if coeffs.ndim != 2 or coeffs.shape[1] != side or side % 2 == 0:
        raise ConfigError("coefficient block must be square with odd side")
    return FourierTable(coeffs, side // 2, a1, a2, float(mu_min), float(mu_max))


def extend_table(table: FourierTable, extent: int) -> FourierTable:
    """Zero-pad (or crop) a table to a new index extent."""
    e0 = table.extent
    out = np.zeros((2 * extent + 1, 2 * extent + 1), dtype=complex)
    m = min(e0, extent)
    out[extent - m:extent + m + 1, extent - m:extent + m + 1] = \
        table.coeffs[e0 - m:e0 + m + 1, e0 - m:e0 + m + 1]
    return FourierTable(out, extent, table.a1, table.a2, table.mu_min, table.mu_max)


def required_samples(j: int) -> int:
    return 4 * int(j) + 1


__all__ = [
    "ReciprocalGrid", "FourierTable", "build_grid", "shape_coefficient", "mu_table",
    "dft_table", "table_for", "table_from_coefficients", "extend_table", "required_samples",
]
