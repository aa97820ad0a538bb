"""Reference materials and one-parameter lattice families for sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .lattice import (Annulus, AxisRect, AxisSquare, Circle, Lattice, Material,
                      RotatedSquare45)

GPA = 1e9
G_PER_CM3 = 1000.0

MATERIALS: dict[str, Material] = {
    "Al": Material(26.0 * GPA, 2.7 * G_PER_CM3, "Al"),
    "Pb": Material(14.9 * GPA, 11.6 * G_PER_CM3, "Pb"),
    "St": Material(80.0 * GPA, 7.8 * G_PER_CM3, "St"),
    "Ep": Material(1.48 * GPA, 1.14 * G_PER_CM3, "Ep"),
    "R": Material(4e-5 * GPA, 1.14 * G_PER_CM3, "R"),
}

TEMPLATE_KINDS = ("square", "square45", "circle", "coated_square", "annulus", "laminate")
DEFAULT_ALPHA = 4.0 / 9.0


def material_from_json(obj) -> Material:
    """Material from a reference name (``"St"``) or an SI object."""
    if isinstance(obj, str):
        try:
            return MATERIALS[obj]
        except KeyError:
            raise ConfigError(f"unknown material name {obj!r}") from None
    try:
        return Material(float(obj["mu_pa"]), float(obj["rho_kgm3"]), str(obj.get("name", "")))
    except (KeyError, TypeError):
        raise ConfigError(f"material needs mu_pa and rho_kgm3: {obj!r}") from None


@dataclass(frozen=True)
class Template:
    """Lattice family parameterized by the inclusion fraction ``f``.

    ``matrix`` and ``inclusion`` are the declared designations used by the
    multiple-scattering estimates. For coated kinds ``inclusion`` is the skin
    and ``core`` the core material (defaults to the matrix), with skin and
    core fractions ``alpha f`` and ``(1 - alpha) f``.

    Kinds
    -----
    square : axis-aligned square rod.
    square45 : 45-degree rotated square rod; beyond ``f = 1/2`` the roles of
        the two materials swap so the whole range ``[0, 1]`` is covered.
    circle : circular rod (``f <= pi/4``).
    coated_square : square core inside a square skin.
    annulus : circular annulus with an optional circular core.
    laminate : layers normal to x2 (``f`` is the inclusion layer thickness).
    """

    kind: str
    matrix: Material
    inclusion: Material
    core: Material | None = None
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.kind not in TEMPLATE_KINDS:
            raise ConfigError(f"template kind must be one of {TEMPLATE_KINDS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")

    @property
    def coated(self) -> bool:
        return self.kind in ("coated_square", "annulus")

    @property
    def core_material(self) -> Material:
        return self.core if self.core is not None else self.matrix

    def f_max(self) -> float:
        return math.pi / 4 if self.kind in ("circle", "annulus") else 1.0

    def lattice(self, f: float) -> Lattice:
        if not 0.0 <= f <= self.f_max() + 1e-12:
            raise ConfigError(f"fraction {f} outside [0, {self.f_max():.6g}] for {self.kind}")
        f = min(max(f, 0.0), self.f_max())
        m, i = self.matrix, self.inclusion
        if self.kind == "square":
            return Lattice.from_materials(m, [(i, AxisSquare(math.sqrt(f)))])
        if self.kind == "laminate":
            return Lattice.from_materials(m, [(i, AxisRect(1.0, f))])
        if self.kind == "circle":
            return Lattice.from_materials(m, [(i, Circle(math.sqrt(f / math.pi)))])
        if self.kind == "square45":
            if f <= 0.5:
                return Lattice.from_materials(m, [(i, RotatedSquare45(math.sqrt(f)))])
            return Lattice.from_materials(i, [(m, RotatedSquare45(math.sqrt(1.0 - f)))])
        core_f = (1.0 - self.alpha) * f
        if self.kind == "coated_square":
            return Lattice.from_materials(m, [(i, AxisSquare(math.sqrt(f))),
                                              (self.core_material, AxisSquare(math.sqrt(core_f)))])
        outer = math.sqrt(f / math.pi)
        inner = math.sqrt(core_f / math.pi)
        shapes = [(i, Annulus(inner, outer))] if outer > 0 else []
        if self.core is not None and self.core != m and inner > 0:
            shapes.append((self.core, Circle(inner)))
        return Lattice.from_materials(m, shapes)

    def mst_inclusions(self, f: float) -> list[tuple[Material, float]]:
        """Declared inclusion materials with their fractions."""
        if self.coated:
            return [(self.inclusion, self.alpha * f),
                    (self.core_material, (1.0 - self.alpha) * f)]
        return [(self.inclusion, f)]


def template_from_json(doc: dict) -> Template:
    try:
        kind = doc["template"]
        mats = doc["materials"]
    except KeyError as exc:
        raise ConfigError(f"sweep needs {exc}") from None
    if not 2 <= len(mats) <= 3:
        raise ConfigError("sweep materials list needs two or three entries")
    parsed = [material_from_json(x) for x in mats]
    core = parsed[2] if len(parsed) == 3 else None
    return Template(kind, parsed[0], parsed[1], core, float(doc.get("alpha", DEFAULT_ALPHA)))


__all__ = ["MATERIALS", "GPA", "Template", "TEMPLATE_KINDS", "material_from_json",
           "template_from_json", "DEFAULT_ALPHA"]
