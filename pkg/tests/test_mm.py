from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearhom.errors import ConfigError
from shearhom.lattice import (AxisRect, AxisSquare, Lattice, Material, SampledField,
                              cell_moments)
from shearhom.mm import (LineTable, laminate_exact, mm_directional, mm_estimate, mm_geometric,
                         mm_isotropic_from_fractions)
from shearhom.templates import MATERIALS, Template

ST, EP, R, PB = (MATERIALS[k] for k in ("St", "Ep", "R", "Pb"))


def test_homogeneous():
    lat = Lattice.from_materials(ST)
    for order in ("x1-first", "x2-first"):
        c = mm_directional(lat, order)
        assert c.a1 == pytest.approx(ST.mu, rel=1e-14)
        assert c.a2 == pytest.approx(ST.mu, rel=1e-14)
    rep = mm_estimate(lat)
    assert rep.c_mm() == pytest.approx(ST.speed, rel=1e-14)
    assert rep.c_mmtilde((0.6, 0.8)) == pytest.approx(ST.speed, rel=1e-14)
    g = mm_geometric(lat)
    assert g.a1 == pytest.approx(ST.mu, rel=1e-14) and g.a2 == pytest.approx(ST.mu, rel=1e-14)


def test_bad_order():
    with pytest.raises(ConfigError):
        mm_directional(Lattice.from_materials(ST), "diagonal")


def test_square_rod_hand_quadrature():
    # Ep square of side 0.5 in St: lines through the rod see half Ep
    lat = Template("square", ST, EP).lattice(0.25)
    mid_arith = 0.5 * (ST.mu + EP.mu)
    mid_harm = 1.0 / (0.5 / ST.mu + 0.5 / EP.mu)
    across = 1.0 / (0.5 / mid_arith + 0.5 / ST.mu)
    along = 0.5 * mid_harm + 0.5 * ST.mu
    two = mm_directional(lat, "x2-first")
    one = mm_directional(lat, "x1-first")
    assert two.a1 == pytest.approx(across, rel=1e-10)
    assert two.a2 == pytest.approx(along, rel=1e-10)
    assert one.a1 == pytest.approx(along, rel=1e-10)
    assert one.a2 == pytest.approx(across, rel=1e-10)


def test_square_rod_worked_values():
    lat = Template("square", ST, EP).lattice(0.25)
    c, term1, term2 = mm_isotropic_from_fractions(lat)
    assert cell_moments(lat).rho_mean == pytest.approx(6135.0)
    assert term1 == pytest.approx(41.453e9, rel=2e-5)
    assert term2 == pytest.approx(53.988e9, rel=2e-5)
    assert c == pytest.approx(2788.9, abs=0.1)
    assert mm_estimate(lat).c_mm() == pytest.approx(c, rel=1e-12)


@pytest.mark.parametrize("kind,f", [("square", 0.3), ("circle", 0.5), ("square45", 0.3),
                                    ("coated_square", 0.6), ("annulus", 0.5)])
def test_fourfold_isotropy_and_fraction_form(kind, f):
    core = PB if kind in ("coated_square", "annulus") else None
    lat = Template(kind, ST, R if core else EP, core).lattice(f)
    rep = mm_estimate(lat)
    assert rep.symmetry_gap <= 1e-10
    c, _, _ = mm_isotropic_from_fractions(lat)
    assert c == pytest.approx(rep.c_mm(), rel=1e-8)


def test_arithmetic_is_mean_of_orders():
    lat = Lattice.from_materials(ST, [(EP, AxisRect(0.3, 0.7, (0.4, 0.5)))])
    rep = mm_estimate(lat)
    assert rep.arithmetic.a1 == pytest.approx(0.5 * (rep.x1_first.a1 + rep.x2_first.a1))
    assert rep.arithmetic.a2 == pytest.approx(0.5 * (rep.x1_first.a2 + rep.x2_first.a2))
    assert rep.geometric.a1 == pytest.approx(math.sqrt(rep.x1_first.a1 * rep.x2_first.a1))
    assert rep.quad_error < 1e-8 * ST.mu


def test_laminate_reduction():
    lat = Template("laminate", ST, EP).lattice(0.5)
    rho = cell_moments(lat).rho_mean
    arith = 0.5 * (ST.mu + EP.mu)
    harm = 1.0 / (0.5 / ST.mu + 0.5 / EP.mu)
    for order in ("x1-first", "x2-first"):
        c = mm_directional(lat, order)
        assert c.a1 == pytest.approx(arith, rel=1e-10)
        assert c.a2 == pytest.approx(harm, rel=1e-10)
    rep = mm_estimate(lat)
    for kappa in ((1, 0), (0, 1), (0.6, 0.8)):
        exact = laminate_exact([ST.mu, EP.mu], [0.5, 0.5], rho, kappa)
        assert rep.c_mm(kappa) ** 2 == pytest.approx(exact, rel=1e-10)
        assert rep.c_mmtilde(kappa) ** 2 == pytest.approx(exact, rel=1e-10)


def test_laminate_exact_hand_values():
    assert laminate_exact([ST.mu], [1.0], ST.rho, (1, 0)) == pytest.approx(ST.mu / ST.rho)
    c2 = laminate_exact([ST.mu, EP.mu], [0.5, 0.5], 4470.0, (0, 1))
    assert c2 * 4470.0 == pytest.approx(2.90623e9, rel=2e-6)
    assert math.sqrt(c2) == pytest.approx(806.3, abs=0.05)
    c2 = laminate_exact([ST.mu, EP.mu], [0.5, 0.5], 4470.0, (1, 0))
    assert math.sqrt(c2) == pytest.approx(3019.0, abs=0.05)
    with pytest.raises(ConfigError):
        laminate_exact([1.0, 2.0], [0.5, 0.4], 1.0)


def test_three_phase_continuity():
    two = mm_estimate(Template("square", ST, R).lattice(0.3)).c_mm()
    lat3 = Lattice.from_materials(ST, [(R, AxisSquare(math.sqrt(0.3))),
                                       (PB, AxisSquare(1e-3))])
    assert lat3.filling_fractions[2] == pytest.approx(1e-6)
    assert mm_estimate(lat3).c_mm() == pytest.approx(two, rel=1e-4)


def test_insulating_network_limit():
    def c_mm(mu_soft):
        lat = Lattice.from_materials(Material(mu_soft, ST.rho), [(ST, AxisSquare(0.95))])
        return mm_estimate(lat).c_mm()

    assert c_mm(1e-6 * ST.mu) < 0.05 * c_mm(ST.mu)


def test_zero_modulus_strip_gives_zero_harmonic_limit():
    # a void layer spanning the cell: every x2 line crosses it
    lat = Lattice.from_materials(ST, [(Material(0.0, 1000.0), AxisRect(1.0, 0.1))])
    rep = mm_estimate(lat)
    assert rep.x2_first.a2 == 0.0
    assert rep.x1_first.a2 == 0.0
    assert rep.x2_first.a1 == pytest.approx(0.9 * ST.mu, rel=1e-12)
    assert rep.c_mm((0, 1)) == 0.0


@settings(max_examples=40, deadline=None)
@given(mu1=st.floats(1e8, 3e11), mu2=st.floats(1e8, 3e11), f=st.floats(0.0, 1.0))
def test_geometric_below_arithmetic(mu1, mu2, f):
    table = LineTable(Lattice.from_materials(Material(mu1, 1.0),
                                             [(Material(mu2, 1.0), AxisSquare(math.sqrt(f)))]),
                      n_panels=16)
    ar, ge = table.arithmetic([mu1, mu2]), table.geometric([mu1, mu2])
    assert ge.a1 <= ar.a1 * (1 + 1e-12) and ge.a2 <= ar.a2 * (1 + 1e-12)


def test_line_table_matches_direct_path():
    lat = Template("circle", ST, EP).lattice(0.4)
    table = LineTable(lat)
    rep = mm_estimate(lat)
    ar = table.arithmetic(lat.mu)
    assert ar.a1 == pytest.approx(rep.arithmetic.a1, rel=1e-14)
    with pytest.raises(ConfigError):
        table.arithmetic([1.0])


def test_sampled_field_laminate():
    # layers along x2: the second index selects the material
    layer = np.where(np.arange(64) < 32, ST.mu, EP.mu)
    mu = np.tile(layer, (64, 1))
    rep = mm_estimate(SampledField(mu, np.full_like(mu, 1000.0)))
    assert rep.arithmetic.a2 == pytest.approx(1.0 / (0.5 / ST.mu + 0.5 / EP.mu), rel=1e-12)
    assert rep.arithmetic.a1 == pytest.approx(0.5 * (ST.mu + EP.mu), rel=1e-12)
    rng = np.random.default_rng(0)
    mu = rng.uniform(1, 3, (8, 8))
    assert mm_estimate(SampledField(mu, np.ones_like(mu))).c_mm() > 0
