"""Periodic unit cells built from phase geometries.

All shape dimensions live in cell-normalized coordinates ``s in [0, 1)^2``;
the physical cell is ``a1 x a2`` (orthogonal). Phase 0 is the matrix and
fills whatever the later shapes leave uncovered. Later shapes are painted
over earlier ones, which is how coated inclusions are described.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import j1

from .errors import ConfigError, InvalidGeometryError, ZeroModulusError

_FIT_EPS = 1e-12
# boundaries are closed; absorb rounding in the displacement
_EDGE_EPS = 1e-12


def _min_image(d):
    """Map periodic displacements into [-0.5, 0.5)."""
    return (np.asarray(d, dtype=float) + 0.5) % 1.0 - 0.5


def _phase_factor(n1, n2, center):
    return np.exp(-2j * np.pi * (n1 * center[0] + n2 * center[1]))


@dataclass(frozen=True)
class Material:
    """Homogeneous isotropic constituent (SI units: Pa, kg/m^3)."""

    mu: float
    rho: float
    name: str = ""

    def __post_init__(self):
        if not (self.mu >= 0.0 and math.isfinite(self.mu)):
            raise ConfigError(f"shear modulus must be finite and >= 0, got {self.mu}")
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise ConfigError(f"density must be finite and > 0, got {self.rho}")

    @property
    def speed(self) -> float:
        return math.sqrt(self.mu / self.rho)


# --------------------------------------------------------------------------
# Shapes
# --------------------------------------------------------------------------


class Shape:
    """Base class for inclusion geometries.

    Subclasses implement point membership, analytic area, the Fourier
    coefficient of their indicator and the chord intervals cut by a line
    parallel to a cell axis.
    """

    kind = "shape"
    center: tuple[float, float] = (0.5, 0.5)

    def area(self) -> float:
        raise NotImplementedError

    def contains(self, pts) -> np.ndarray:
        raise NotImplementedError

    def coefficient(self, n1, n2) -> np.ndarray:
        raise NotImplementedError

    def chords(self, axis: int, coords) -> list[tuple[np.ndarray, np.ndarray]]:
        raise NotImplementedError

    def kinks(self, axis: int) -> list[float]:
        """Coordinates (across lines along ``axis``) where the chord function has kinks."""
        raise NotImplementedError

    def validate(self) -> None:
        pass

    def extent(self) -> float:
        """Half-width of an axis-aligned bounding box."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def _disp(self, pts):
        pts = np.asarray(pts, dtype=float)
        return _min_image(pts[..., 0] - self.center[0]), _min_image(pts[..., 1] - self.center[1])


@dataclass(frozen=True)
class FullCell(Shape):
    kind = "matrix"

    def area(self):
        return 1.0

    def contains(self, pts):
        return np.ones(np.shape(pts)[:-1], dtype=bool)

    def coefficient(self, n1, n2):
        n1, n2 = np.broadcast_arrays(np.asarray(n1), np.asarray(n2))
        return ((n1 == 0) & (n2 == 0)).astype(complex)

    def chords(self, axis, coords):
        coords = np.asarray(coords, dtype=float)
        return [(np.zeros_like(coords), np.ones_like(coords))]

    def kinks(self, axis):
        return []

    def extent(self):
        return 0.5

    def to_json(self):
        return {"kind": "matrix"}


@dataclass(frozen=True)
class AxisRect(Shape):
    """Axis-aligned rectangle; ``width`` along x1, ``height`` along x2."""

    width: float
    height: float
    center: tuple[float, float] = (0.5, 0.5)
    kind = "rect"

    def validate(self):
        for name, v in (("width", self.width), ("height", self.height)):
            if not (0.0 <= v <= 1.0 + _FIT_EPS):
                raise InvalidGeometryError(f"rectangle {name} {v} does not fit the unit cell")

    def area(self):
        return self.width * self.height

    def extent(self):
        return 0.5 * max(self.width, self.height)

    def _dims(self):
        return (self.width, self.height)

    def contains(self, pts):
        d1, d2 = self._disp(pts)
        return ((np.abs(d1) <= 0.5 * self.width + _EDGE_EPS)
                & (np.abs(d2) <= 0.5 * self.height + _EDGE_EPS))

    def coefficient(self, n1, n2):
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        return (
            self.width * np.sinc(n1 * self.width)
            * self.height * np.sinc(n2 * self.height)
            * _phase_factor(n1, n2, self.center)
        )

    def chords(self, axis, coords):
        a, o = axis, 1 - axis
        dims = self._dims()
        dy = _min_image(np.asarray(coords, dtype=float) - self.center[o])
        present = np.abs(dy) <= 0.5 * dims[o]
        lo = np.where(present, self.center[a] - 0.5 * dims[a], np.nan)
        hi = np.where(present, self.center[a] + 0.5 * dims[a], np.nan)
        return [(lo, hi)]

    def kinks(self, axis):
        o = 1 - axis
        h = 0.5 * self._dims()[o]
        return [self.center[o] - h, self.center[o] + h]

    def to_json(self):
        if self.width == self.height:
            return {"kind": "square", "side": self.width, "center": list(self.center)}
        return {"kind": "rect", "width": self.width, "height": self.height,
                "center": list(self.center)}


def AxisSquare(side: float, center=(0.5, 0.5)) -> AxisRect:
    """Axis-aligned square of the given side (a 0-degree rod)."""
    return AxisRect(side, side, tuple(center))


@dataclass(frozen=True)
class RotatedSquare45(Shape):
    """Square of side ``side`` rotated by 45 degrees (vertices on the axes)."""

    side: float
    center: tuple[float, float] = (0.5, 0.5)
    kind = "square45"

    @property
    def half_diagonal(self):
        return self.side / math.sqrt(2.0)

    def validate(self):
        if not (0.0 <= self.side <= 1.0 / math.sqrt(2.0) + _FIT_EPS):
            raise InvalidGeometryError(
                f"45-degree square side {self.side} exceeds 1/sqrt(2) and overlaps its images"
            )

    def area(self):
        return self.side ** 2

    def extent(self):
        return self.half_diagonal

    def contains(self, pts):
        d1, d2 = self._disp(pts)
        return np.abs(d1) + np.abs(d2) <= self.half_diagonal + _EDGE_EPS

    def coefficient(self, n1, n2):
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        s = self.side
        # wavevector expressed in the square's own (rotated) frame
        k1 = (n1 + n2) / math.sqrt(2.0)
        k2 = (n2 - n1) / math.sqrt(2.0)
        return s * s * np.sinc(s * k1) * np.sinc(s * k2) * _phase_factor(n1, n2, self.center)

    def chords(self, axis, coords):
        a, o = axis, 1 - axis
        dy = _min_image(np.asarray(coords, dtype=float) - self.center[o])
        half = self.half_diagonal - np.abs(dy)
        present = half >= 0.0
        lo = np.where(present, self.center[a] - half, np.nan)
        hi = np.where(present, self.center[a] + half, np.nan)
        return [(lo, hi)]

    def kinks(self, axis):
        c = self.center[1 - axis]
        r = self.half_diagonal
        return [c - r, c, c + r]

    def to_json(self):
        return {"kind": "square45", "side": self.side, "center": list(self.center)}


@dataclass(frozen=True)
class Circle(Shape):
    radius: float
    center: tuple[float, float] = (0.5, 0.5)
    kind = "circle"

    def validate(self):
        if not (0.0 <= self.radius <= 0.5 + _FIT_EPS):
            raise InvalidGeometryError(f"circle radius {self.radius} exceeds half the cell")

    def area(self):
        return math.pi * self.radius ** 2

    def extent(self):
        return self.radius

    def contains(self, pts):
        d1, d2 = self._disp(pts)
        return d1 * d1 + d2 * d2 <= self.radius ** 2 + _EDGE_EPS

    def coefficient(self, n1, n2):
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        z = 2.0 * np.pi * np.hypot(n1, n2) * self.radius
        with np.errstate(invalid="ignore", divide="ignore"):
            airy = np.where(z > 0.0, 2.0 * j1(z) / np.where(z > 0.0, z, 1.0), 1.0)
        return self.area() * airy * _phase_factor(n1, n2, self.center)

    def chords(self, axis, coords):
        a, o = axis, 1 - axis
        dy = _min_image(np.asarray(coords, dtype=float) - self.center[o])
        h2 = self.radius ** 2 - dy * dy
        present = h2 >= 0.0
        half = np.sqrt(np.where(present, h2, 0.0))
        lo = np.where(present, self.center[a] - half, np.nan)
        hi = np.where(present, self.center[a] + half, np.nan)
        return [(lo, hi)]

    def kinks(self, axis):
        c = self.center[1 - axis]
        return [c - self.radius, c + self.radius]

    def to_json(self):
        return {"kind": "circle", "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Annulus(Shape):
    inner: float
    outer: float
    center: tuple[float, float] = (0.5, 0.5)
    kind = "annulus"

    def validate(self):
        if not (0.0 <= self.outer <= 0.5 + _FIT_EPS):
            raise InvalidGeometryError(f"annulus outer radius {self.outer} exceeds half the cell")
        degenerate = self.inner == 0.0 and self.outer == 0.0
        if not (0.0 <= self.inner < self.outer or degenerate):
            raise InvalidGeometryError("annulus needs 0 <= inner < outer")

    def _circles(self):
        return Circle(self.outer, self.center), Circle(self.inner, self.center)

    def area(self):
        return math.pi * (self.outer ** 2 - self.inner ** 2)

    def extent(self):
        return self.outer

    def contains(self, pts):
        d1, d2 = self._disp(pts)
        r2 = d1 * d1 + d2 * d2
        return (r2 <= self.outer ** 2 + _EDGE_EPS) & (r2 >= self.inner ** 2 - _EDGE_EPS)

    def coefficient(self, n1, n2):
        out, inn = self._circles()
        c = np.asarray(out.coefficient(n1, n2) - inn.coefficient(n1, n2))
        # exact area at the origin, free of the difference's rounding
        return np.where((np.asarray(n1) == 0) & (np.asarray(n2) == 0), self.area(), c)

    def chords(self, axis, coords):
        a, o = axis, 1 - axis
        dy = _min_image(np.asarray(coords, dtype=float) - self.center[o])
        ho2 = self.outer ** 2 - dy * dy
        present = ho2 >= 0.0
        ho = np.sqrt(np.where(present, ho2, 0.0))
        hi = np.sqrt(np.clip(self.inner ** 2 - dy * dy, 0.0, None))
        c = self.center[a]
        nan = np.nan
        left = (np.where(present, c - ho, nan), np.where(present, c - hi, nan))
        right = (np.where(present, c + hi, nan), np.where(present, c + ho, nan))
        return [left, right]

    def kinks(self, axis):
        c = self.center[1 - axis]
        return [c - self.outer, c - self.inner, c + self.inner, c + self.outer]

    def to_json(self):
        return {"kind": "annulus", "inner": self.inner, "outer": self.outer,
                "center": list(self.center)}


# --------------------------------------------------------------------------
# Lattice
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Phase:
    material: Material
    shape: Shape


@dataclass(frozen=True)
class Lattice:
    """Orthogonal periodic cell with painter-ordered phases.

    ``phases[0]`` must use :class:`FullCell` (the matrix). Every later shape
    must sit inside a single earlier phase (its *host*), which keeps the
    Fourier series a plain sum of contrast-weighted shape coefficients.
    """

    phases: tuple[Phase, ...]
    a1: float = 1.0
    a2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise ConfigError("a lattice needs at least one phase")
        if not isinstance(self.phases[0].shape, FullCell):
            raise ConfigError("the first phase must be the matrix (FullCell)")
        if any(isinstance(p.shape, FullCell) for p in self.phases[1:]):
            raise ConfigError("only the first phase may be the matrix")
        if not (self.a1 > 0 and self.a2 > 0):
            raise ConfigError("cell lengths must be positive")
        if self.phases[0].material.mu <= 0.0:
            raise ConfigError("the matrix phase must have a positive shear modulus")
        for p in self.phases[1:]:
            p.shape.validate()
        _ = self.filling_fractions

    @classmethod
    def from_materials(cls, matrix: Material, inclusions: Iterable[tuple[Material, Shape]] = (),
                       a1: float = 1.0, a2: float = 1.0) -> "Lattice":
        phases = [Phase(matrix, FullCell())] + [Phase(m, s) for m, s in inclusions]
        return cls(tuple(phases), a1, a2)

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    @property
    def mu(self) -> np.ndarray:
        return np.array([p.material.mu for p in self.phases])

    @property
    def rho(self) -> np.ndarray:
        return np.array([p.material.rho for p in self.phases])

    @cached_property
    def hosts(self) -> tuple[int, ...]:
        """Index of the phase each shape is painted over (-1 for the matrix)."""
        hosts = [-1]
        for k in range(1, self.n_phases):
            shape = self.phases[k].shape
            pts = _interior_samples(shape)
            if len(pts) == 0:
                pts = np.array([shape.center])
            under = _paint(self.phases[:k], pts)
            if np.any(under != under[0]):
                raise InvalidGeometryError(
                    f"phase {k} ({shape.kind}) straddles several earlier phases"
                )
            hosts.append(int(under[0]))
        return tuple(hosts)

    @cached_property
    def filling_fractions(self) -> np.ndarray:
        areas = np.array([p.shape.area() for p in self.phases])
        fr = areas.copy()
        for k in range(1, self.n_phases):
            fr[self.hosts[k]] -= areas[k]
        if np.any(fr < -1e-12):
            raise InvalidGeometryError(f"negative filling fraction in {fr}")
        fr = np.clip(fr, 0.0, None)
        # matrix fraction by complement keeps the sum at 1 to rounding
        fr[0] = 1.0 - fr[1:].sum()
        return fr

    def contrast(self) -> np.ndarray:
        """mu_k - mu_host(k) for each painted shape (0 for the matrix entry)."""
        mu = self.mu
        out = np.zeros(self.n_phases)
        for k in range(1, self.n_phases):
            out[k] = mu[k] - mu[self.hosts[k]]
        return out

    def kinks(self, axis: int) -> list[float]:
        ks = []
        for p in self.phases[1:]:
            ks.extend(p.shape.kinks(axis))
        return ks

    def to_json(self) -> dict:
        return {
            "cell": {"a1": self.a1, "a2": self.a2},
            "phases": [
                {"name": p.material.name, "mu_pa": p.material.mu,
                 "rho_kgm3": p.material.rho, "shape": p.shape.to_json()}
                for p in self.phases
            ],
        }


def _interior_samples(shape: Shape, n: int = 41) -> np.ndarray:
    r = shape.extent()
    if r <= 0.0:
        return np.empty((0, 2))
    # cell-centred offsets avoid landing exactly on straight edges
    t = (np.arange(n) + 0.5) / n * 2.0 - 1.0
    u, v = np.meshgrid(t * r, t * r, indexing="ij")
    pts = np.stack([u.ravel() + shape.center[0], v.ravel() + shape.center[1]], axis=-1) % 1.0
    return pts[shape.contains(pts)]


def _paint(phases: Sequence[Phase], pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(pts.shape[:-1], dtype=int)
    for k in range(1, len(phases)):
        out[phases[k].shape.contains(pts)] = k
    return out


def phase_at(lattice: Lattice, pts) -> np.ndarray | int:
    """Index of the phase occupying cell point(s) ``pts`` (last axis of length 2).

    Boundaries are closed (a point on a shape edge belongs to the shape) and
    coordinates are taken modulo 1.
    """
    arr = np.asarray(pts, dtype=float) % 1.0
    out = _paint(lattice.phases, arr)
    return int(out) if out.ndim == 0 else out


def filling_fractions(lattice: Lattice) -> np.ndarray:
    return lattice.filling_fractions.copy()


# --------------------------------------------------------------------------
# Sampled (graded) fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SampledField:
    """Material fields sampled on an ``M x M`` periodic grid.

    ``mu[i, k]`` is the value at ``s = (i/M, k/M)``.
    """

    mu: np.ndarray
    rho: np.ndarray
    a1: float = 1.0
    a2: float = 1.0

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        rho = np.broadcast_to(np.asarray(self.rho, dtype=float), mu.shape).copy()
        if mu.ndim != 2 or mu.shape[0] != mu.shape[1] or mu.shape[0] < 2:
            raise ConfigError("sampled fields must be square M x M grids with M >= 2")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise ConfigError("sampled mu must be finite and >= 0")
        if np.any(rho <= 0) or not np.all(np.isfinite(rho)):
            raise ConfigError("sampled rho must be finite and > 0")
        if mu.max() <= 0:
            raise ConfigError("sampled mu must be positive somewhere")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "rho", rho)

    @property
    def M(self) -> int:
        return self.mu.shape[0]


def sample_lattice(lattice: Lattice, M: int, edge_average: bool = False) -> SampledField:
    """Point-sample a lattice on an ``M x M`` grid.

    With ``edge_average`` each sample is the mean over four points displaced
    by a tiny amount, so samples lying exactly on straight interfaces take the
    average of both sides (the value a Fourier series converges to there).
    """
    t = np.arange(M) / M
    s1, s2 = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([s1, s2], axis=-1)
    mu, rho = lattice.mu, lattice.rho
    if not edge_average:
        idx = phase_at(lattice, pts)
        return SampledField(mu[idx], rho[idx], lattice.a1, lattice.a2)
    eps = 1e-9
    acc_mu = np.zeros((M, M))
    acc_rho = np.zeros((M, M))
    for e1 in (-eps, eps):
        for e2 in (-eps, eps):
            idx = phase_at(lattice, pts + np.array([e1, e2]))
            acc_mu += mu[idx]
            acc_rho += rho[idx]
    return SampledField(acc_mu / 4, acc_rho / 4, lattice.a1, lattice.a2)


# --------------------------------------------------------------------------
# Averages
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CellMoments:
    """Cell averages needed by the closed-form estimates (SI units)."""

    mu_mean: float
    mu2_mean: float
    rho_mean: float
    mu_min: float
    mu_max: float

    @property
    def mu_variance(self) -> float:
        return max(self.mu2_mean - self.mu_mean ** 2, 0.0)

    @property
    def mu_mid(self) -> float:
        return 0.5 * (self.mu_max + self.mu_min)


def cell_moments(obj: Lattice | SampledField) -> CellMoments:
    if isinstance(obj, SampledField):
        mu = obj.mu
        return CellMoments(float(mu.mean()), float((mu * mu).mean()), float(obj.rho.mean()),
                           float(mu.min()), float(mu.max()))
    f = obj.filling_fractions
    mu, rho = obj.mu, obj.rho
    present = f > 0
    return CellMoments(
        float(f @ mu), float(f @ (mu * mu)), float(f @ rho),
        float(mu[present].min()), float(mu[present].max()),
    )


def line_fractions(lattice: Lattice, axis: int, coords) -> np.ndarray:
    """Fraction of each phase along lines parallel to x_axis.

    ``axis`` is 1 or 2 (the coordinate that varies along the line); ``coords``
    holds the fixed value of the other normalized coordinate. Returns an array
    of shape ``(len(coords), n_phases)`` computed from exact chord endpoints.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    a = axis - 1
    y = np.atleast_1d(np.asarray(coords, dtype=float)) % 1.0
    bps = [np.zeros_like(y)]
    for p in lattice.phases[1:]:
        for lo, hi in p.shape.chords(a, y):
            bps.append(np.nan_to_num(lo % 1.0, nan=0.0))
            bps.append(np.nan_to_num(hi % 1.0, nan=0.0))
    bp = np.sort(np.stack(bps, axis=1), axis=1)
    bp = np.concatenate([bp, np.ones((len(y), 1))], axis=1)
    lengths = np.diff(bp, axis=1)
    mids = 0.5 * (bp[:, 1:] + bp[:, :-1])
    yy = np.broadcast_to(y[:, None], mids.shape)
    pts = np.stack([mids, yy] if a == 0 else [yy, mids], axis=-1)
    idx = _paint(lattice.phases, pts)
    out = np.zeros((len(y), lattice.n_phases))
    rows = np.broadcast_to(np.arange(len(y))[:, None], idx.shape)
    np.add.at(out, (rows, idx), lengths)
    return out


def line_average(obj: Lattice | SampledField, axis: int, coord: float, kind: str = "mu") -> float:
    """Exact average of mu along one line.

    ``kind="mu"`` gives the arithmetic mean and ``kind="inv_mu"`` the harmonic
    mean (the inverse of the mean of 1/mu). The line runs along x_axis with the
    other normalized coordinate fixed at ``coord``. Raises
    :class:`ZeroModulusError` for ``inv_mu`` when the line crosses a phase
    with zero modulus.
    """
    if kind not in ("mu", "inv_mu"):
        raise ValueError("kind must be 'mu' or 'inv_mu'")
    if isinstance(obj, SampledField):
        return _field_line_average(obj, axis, coord, kind)
    fr = line_fractions(obj, axis, [coord])[0]
    mu = obj.mu
    if kind == "mu":
        return float(fr @ mu)
    if np.any((mu == 0.0) & (fr > 0.0)):
        raise ZeroModulusError(f"zero modulus on the line x{3 - axis}={coord}")
    used = fr > 0
    return float(1.0 / (fr[used] @ (1.0 / mu[used])))


def _field_line_average(field: SampledField, axis, coord, kind):
    M = field.M
    vals = field.mu if kind == "mu" else None
    if kind == "inv_mu":
        if np.any(field.mu == 0.0):
            raise ZeroModulusError("zero modulus in sampled field")
        vals = 1.0 / field.mu
    # lines along x1 are columns of fixed k (second index)
    lines = vals.mean(axis=0) if axis == 1 else vals.mean(axis=1)
    x = (coord % 1.0) * M
    i0 = int(np.floor(x)) % M
    w = x - np.floor(x)
    val = float((1 - w) * lines[i0] + w * lines[(i0 + 1) % M])
    return val if kind == "mu" else 1.0 / val


@dataclass(frozen=True)
class LineRule:
    """Quadrature over lines parallel to one axis.

    ``nodes`` are the fixed coordinates of the lines, ``weights`` sum to 1 and
    ``fractions[i, k]`` is the length fraction of phase k on line i.
    """

    nodes: np.ndarray
    weights: np.ndarray
    fractions: np.ndarray


def panel_rule(breaks: Iterable[float], n_panels: int = 64, n_points: int = 8):
    """Composite Gauss-Legendre rule on [0, 1) aligned with ``breaks``.

    Each interval between consecutive breakpoints is mapped through
    ``y = a + (b - a)(1 - cos(pi u))/2`` before panelling in ``u``; the map
    removes the square-root endpoint behaviour of circular chords.
    """
    bs = np.unique(np.concatenate([[0.0, 1.0], np.asarray(list(breaks), dtype=float) % 1.0]))
    bs = bs[np.concatenate([[True], np.diff(bs) > 1e-14])]
    if bs[-1] < 1.0:
        bs = np.append(bs, 1.0)
    bs[-1] = 1.0
    xg, wg = np.polynomial.legendre.leggauss(n_points)
    xg = 0.5 * (xg + 1.0)
    wg = 0.5 * wg
    nodes, weights = [], []
    for a, b in zip(bs[:-1], bs[1:]):
        L = b - a
        if L <= 0:
            continue
        k = max(1, int(round(n_panels * L)))
        edges = np.linspace(0.0, 1.0, k + 1)
        for u0, u1 in zip(edges[:-1], edges[1:]):
            u = u0 + (u1 - u0) * xg
            wu = (u1 - u0) * wg
            nodes.append(a + L * 0.5 * (1.0 - np.cos(np.pi * u)))
            weights.append(wu * L * 0.5 * np.pi * np.sin(np.pi * u))
    return np.concatenate(nodes), np.concatenate(weights)


def line_rule(lattice: Lattice, axis: int, n_panels: int = 64, n_points: int = 8) -> LineRule:
    """Interface-aligned quadrature for outer averages of line averages along x_axis."""
    nodes, weights = panel_rule(lattice.kinks(axis - 1), n_panels, n_points)
    return LineRule(nodes, weights, line_fractions(lattice, axis, nodes))


# --------------------------------------------------------------------------
# JSON configuration
# --------------------------------------------------------------------------


def shape_from_json(d: dict) -> Shape:
    kind = d.get("kind")
    center = tuple(float(c) for c in d.get("center", (0.5, 0.5)))
    if len(center) != 2:
        raise ConfigError("center must have two coordinates")
    try:
        if kind == "matrix":
            return FullCell()
        if kind == "square":
            return AxisSquare(float(d["side"]), center)
        if kind == "rect":
            return AxisRect(float(d["width"]), float(d["height"]), center)
        if kind == "square45":
            return RotatedSquare45(float(d["side"]), center)
        if kind == "circle":
            return Circle(float(d["radius"]), center)
        if kind == "annulus":
            return Annulus(float(d["inner"]), float(d["outer"]), center)
    except KeyError as exc:
        raise ConfigError(f"shape '{kind}' is missing dimension {exc}") from None
    raise ConfigError(f"unknown shape kind {kind!r}")


def lattice_from_json(doc: dict) -> Lattice:
    """Build a lattice from the JSON document layout described in the README."""
    if "phases" not in doc:
        raise ConfigError("lattice document needs a 'phases' list")
    cell = doc.get("cell", {})
    phases = []
    for i, ph in enumerate(doc["phases"]):
        try:
            mat = Material(float(ph["mu_pa"]), float(ph["rho_kgm3"]), str(ph.get("name", "")))
        except KeyError as exc:
            raise ConfigError(f"phase {i} is missing {exc}") from None
        phases.append(Phase(mat, shape_from_json(ph.get("shape", {"kind": "matrix"}))))
    return Lattice(tuple(phases), float(cell.get("a1", 1.0)), float(cell.get("a2", 1.0)))


def load_lattice(path: str | Path) -> Lattice:
    with open(path, encoding="utf-8") as fh:
        return lattice_from_json(json.load(fh))
