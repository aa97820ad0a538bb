from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearhom.errors import ConfigError, DivergenceError
from shearhom.fourier import build_grid, mu_table, table_from_coefficients
from shearhom.lattice import Lattice, Material, RotatedSquare45, cell_moments
from shearhom.pwe import (CouplingOperator, Direction, SeriesConfig, acoustic3d_estimate,
                          apply_C, assemble_f, dense_M, effective_speed_numeric, F_quadratic,
                          neumann_M, neumann_series, pwe_bounds, pwe_estimate, pwe_two_phase)
from shearhom.templates import MATERIALS, Template
from shearhom.validation import random_lattice

ST, EP, AL, PB = (MATERIALS[k] for k in ("St", "Ep", "Al", "Pb"))


def _st_ep(f=0.25):
    return Template("square", ST, EP).lattice(f)


def _hermitian_table(j, seed):
    rng = np.random.default_rng(seed)
    e = 2 * j
    raw = rng.normal(size=(2 * e + 1, 2 * e + 1)) + 1j * rng.normal(size=(2 * e + 1, 2 * e + 1))
    c = 0.5 * (raw + np.conj(raw[::-1, ::-1]))
    c[e, e] = 10.0
    return table_from_coefficients(c, 1.0, 19.0)


def test_direction():
    d = Direction.from_angle(90)
    assert np.allclose(d.vector, [0, 1], atol=1e-16)
    with pytest.raises(ConfigError):
        Direction(1.0, 1.0)


def test_series_config_validation():
    for bad in (dict(j=0), dict(m=-1), dict(path="fft"), dict(mu0="max"), dict(mu0=-1.0),
                dict(tol=0.0)):
        with pytest.raises(ConfigError):
            SeriesConfig(**bad)
    tab = mu_table(_st_ep(), 1)
    assert SeriesConfig(mu0="mid").resolve_mu0(tab) == pytest.approx(0.5 * (ST.mu + EP.mu))
    assert SeriesConfig(mu0="mean").resolve_mu0(tab) == tab.mean
    assert SeriesConfig(mu0=3e9).resolve_mu0(tab) == 3e9


def test_assemble_f_homogeneous_and_orthogonal():
    grid = build_grid(2)
    assert not np.any(assemble_f(mu_table(Lattice.from_materials(ST), 2), grid, (1, 0)))
    f = assemble_f(mu_table(_st_ep(), 2), grid, (1, 0))
    assert f[grid.index_of(0, 1)] == 0


def test_assemble_f_norm_two_ways():
    j = 3
    tab = mu_table(_st_ep(), j)
    grid = build_grid(j)
    f = assemble_f(tab, grid, (1.0, 0.0))
    direct = 0.0
    for n1, n2 in zip(grid.n1, grid.n2):
        g = 2 * math.pi * np.array([n1, n2], dtype=float)
        direct += abs(tab.at(n1, n2)) ** 2 * g[0] ** 2 / (g @ g)
    assert np.vdot(f, f).real == pytest.approx(direct, rel=1e-12)
    F = F_quadratic(tab, grid)
    assert F[0, 0] == pytest.approx(direct, rel=1e-12)


def test_apply_C_diagonal_kernel():
    tab = table_from_coefficients(np.pad([[7.0]], 4), 7.0, 7.0)
    grid = build_grid(2)
    v = np.random.default_rng(0).normal(size=grid.size) + 0j
    mu0 = 5.0
    for path in ("direct", "conv"):
        assert np.allclose(apply_C(tab, grid, v, mu0, path), (7.0 - mu0) / mu0 * v, atol=1e-14)


def test_apply_C_single_harmonic_lands_outside_grid():
    A, mean = 0.7, 5.0
    c = np.zeros((5, 5), dtype=complex)
    c[2, 2] = mean
    c[1, 2] = c[3, 2] = A
    tab = table_from_coefficients(c, mean - 2 * A, mean + 2 * A)
    grid = build_grid(1)
    v = np.zeros(grid.size, dtype=complex)
    v[grid.index_of(1, 0)] = 1.0
    assert np.array_equal(apply_C(tab, grid, v, mean, "direct"), np.zeros(grid.size))
    # the FFT path carries round-off only
    assert np.abs(apply_C(tab, grid, v, mean, "conv")).max() <= 1e-15 * A


def test_apply_C_by_definition():
    j = 2
    tab = _hermitian_table(j, 1)
    grid = build_grid(j)
    mu0 = 12.0
    v = np.random.default_rng(2).normal(size=grid.size) * (1 + 0.5j)
    u = grid.unit_vectors
    out = np.zeros(grid.size, dtype=complex)
    for a in range(grid.size):
        for b in range(grid.size):
            d1, d2 = grid.n1[a] - grid.n1[b], grid.n2[a] - grid.n2[b]
            k = tab.at(d1, d2) - (mu0 if (d1, d2) == (0, 0) else 0.0)
            out[a] += k * (u[a] @ u[b]) * v[b] / mu0
    assert np.allclose(apply_C(tab, grid, v, mu0), out, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dual_paths_agree(seed):
    j = 3
    tab = _hermitian_table(j, seed)
    grid = build_grid(j, 1.0, 1.7)
    v = np.random.default_rng(seed + 10).normal(size=(grid.size, 2)) @ [1, 1j]
    d = apply_C(tab, grid, v, 11.0, "direct")
    c = apply_C(tab, grid, v, 11.0, "conv")
    assert np.linalg.norm(d - c) <= 1e-12 * np.linalg.norm(d)


def test_operator_is_hermitian():
    lat = random_lattice(np.random.default_rng(4), three_phase=True)
    tab = mu_table(lat, 3)
    grid = build_grid(3)
    op = CouplingOperator(tab, grid, 0.5 * (tab.mu_max + tab.mu_min))
    rng = np.random.default_rng(5)
    v, w = (rng.normal(size=(grid.size, 2)) @ [1, 1j] for _ in range(2))
    lhs, rhs = np.vdot(w, op(v)), np.vdot(op(w), v)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)
    mat = op.dense_matrix()
    assert np.allclose(mat, mat.conj().T, atol=1e-13 * np.abs(mat).max())


def test_neumann_homogeneous_is_zero():
    tab = mu_table(Lattice.from_materials(ST), 2)
    res = neumann_M(tab, build_grid(2), (1, 0), SeriesConfig(j=2, m=7))
    assert res.M == 0.0 and np.all(res.partial_sums == 0)
    assert dense_M(tab, build_grid(2), (0.6, 0.8)) == 0.0


def test_neumann_terms_match_explicit_powers():
    j = 2
    tab = mu_table(_st_ep(0.4), j)
    grid = build_grid(j)
    mu0 = 0.5 * (tab.mu_max + tab.mu_min)
    C = CouplingOperator(tab, grid, mu0).dense_matrix()
    f = assemble_f(tab, grid, (1, 0))
    res = neumann_M(tab, grid, (1, 0), SeriesConfig(j=j, m=9))
    w = f.copy()
    for n in range(10):
        assert res.terms[n] == pytest.approx(np.vdot(f, w).real, rel=1e-10, abs=1e-12 * res.terms[0])
        w = -C @ w
    assert res.terms_used == 10
    assert res.last_term == pytest.approx(abs(res.terms[-1]) / mu0)


@pytest.mark.parametrize("seed", range(4))
def test_neumann_matches_dense_at_j3(seed):
    lat = random_lattice(np.random.default_rng(100 + seed))
    tab = mu_table(lat, 3)
    grid = build_grid(3)
    res = neumann_M(tab, grid, (1, 0), SeriesConfig(j=3, m=200))
    assert abs(res.partial_sums[-1] - res.partial_sums[-2]) <= 1e-10 * abs(res.M)
    exact = dense_M(tab, grid, (1, 0))
    assert abs(res.M - exact) <= 1e-8 * abs(exact)


def test_dense_matches_neumann_st_ep_j2():
    tab = mu_table(Template("square", ST, EP).lattice(0.25), 2)
    grid = build_grid(2)
    exact = dense_M(tab, grid, (1, 0))
    res = neumann_M(tab, grid, (1, 0), SeriesConfig(j=2, m=4000, tol=1e-15))
    assert abs(res.M - exact) <= 1e-8 * exact
    assert dense_M(tab, grid, (0, 1)) == pytest.approx(exact, rel=1e-10)


def test_dense_guard():
    tab = mu_table(_st_ep(), 9)
    with pytest.raises(ConfigError):
        dense_M(tab, build_grid(9), (1, 0))


def test_dense_monotone_in_truncation():
    rng = np.random.default_rng(7)
    for _ in range(3):
        lat = random_lattice(rng)
        tab = mu_table(lat, 6)
        vals = [dense_M(tab, build_grid(j), (0.6, 0.8)) for j in range(1, 7)]
        assert all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= cell_moments(lat).mu_mean


def test_series_tol_stops_early():
    tab = mu_table(_st_ep(), 3)
    grid = build_grid(3)
    res = neumann_M(tab, grid, (1, 0), SeriesConfig(j=3, m=5000, tol=1e-12))
    assert res.stopped_early and res.terms_used < 5000
    full = neumann_M(tab, grid, (1, 0), SeriesConfig(j=3, m=res.terms_used - 1))
    assert full.M == res.M


def test_divergence_reports_term_index():
    tab = mu_table(_st_ep(0.5), 2)
    grid = build_grid(2)
    op = CouplingOperator(tab, grid, 0.05 * tab.mu_min)
    with pytest.raises(DivergenceError) as info:
        neumann_series(op, assemble_f(tab, grid, (1, 0)), 200)
    assert 0 < info.value.term_index <= 200


def test_numeric_homogeneous_steel():
    res = effective_speed_numeric(Lattice.from_materials(ST), (1, 0), SeriesConfig(j=3, m=5))
    assert res.c == pytest.approx(3202.5630761, rel=1e-10)
    assert res.c == pytest.approx(3202.6, abs=0.05)


def test_numeric_al_pb_close_to_pwe():
    lat = Template("square", AL, PB).lattice(0.5)
    res = effective_speed_numeric(lat, (1, 0), SeriesConfig(j=12, m=10))
    assert abs(res.c / pwe_estimate(cell_moments(lat)) - 1) <= 0.02


def test_numeric_dilute_limit():
    lat = Template("square", ST, EP).lattice(1e-3)
    res = effective_speed_numeric(lat, (1, 0), SeriesConfig(j=6, m=60))
    assert abs(res.c / ST.speed - 1) <= 1e-3


def test_numeric_fourfold_direction_independence():
    lat = Lattice.from_materials(ST, [(EP, RotatedSquare45(0.5))])
    cfg = SeriesConfig(j=4, m=120)
    tab = mu_table(lat, 4)
    ref = effective_speed_numeric(lat, (1, 0), cfg, table=tab).c
    for deg in np.linspace(0, 360, 16, endpoint=False):
        c = effective_speed_numeric(lat, Direction.from_angle(deg), cfg, table=tab).c
        assert abs(c - ref) <= 1e-6 * ref


def test_F_quadratic_properties():
    grid = build_grid(3)
    assert not np.any(F_quadratic(mu_table(Lattice.from_materials(ST), 3), grid))
    F = F_quadratic(mu_table(_st_ep(), 3), grid)
    assert F[0, 0] == pytest.approx(F[1, 1], rel=1e-12)
    assert abs(F[0, 1]) <= 1e-12 * F[0, 0]
    assert np.allclose(F, F.T)


def test_F_trace_approaches_variance():
    lat = _st_ep(0.25)
    var = cell_moments(lat).mu_variance
    traces = [np.trace(F_quadratic(mu_table(lat, j), build_grid(j))) for j in (4, 12, 24)]
    assert traces[0] < traces[1] < traces[2] <= var
    assert traces[2] >= 0.95 * var


def test_pwe_estimate_hand_values():
    al_pb = cell_moments(Template("square", AL, PB).lattice(0.5))
    mu_eff = 20.45e9 - 0.25 * 11.1e9 ** 2 / 40.9e9
    assert mu_eff == pytest.approx(19.697e9, rel=2e-5)
    assert pwe_estimate(al_pb) == pytest.approx(math.sqrt(mu_eff / 7150.0), rel=1e-12)
    assert pwe_estimate(al_pb) == pytest.approx(1659.8, abs=0.05)
    st_ep = cell_moments(Template("square", ST, EP).lattice(0.5))
    assert pwe_estimate(st_ep) == pytest.approx(2209.6, abs=0.05)
    assert pwe_two_phase(ST.mu, EP.mu, 0.5, 4470.0) == pytest.approx(pwe_estimate(st_ep), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(mu1=st.floats(1e8, 3e11), mu2=st.floats(1e8, 3e11), f1=st.floats(0, 1))
def test_pwe_conjugate_invariance(mu1, mu2, f1):
    a = pwe_two_phase(mu1, mu2, f1, 1000.0)
    b = pwe_two_phase(mu2, mu1, 1.0 - f1, 1000.0)
    assert a == pytest.approx(b, rel=1e-12)


def test_bounds_homogeneous_and_ceiling():
    mom = cell_moments(Lattice.from_materials(ST))
    b = pwe_bounds(mom)
    assert b.lower == pytest.approx(ST.mu / ST.rho) and b.upper == pytest.approx(ST.mu / ST.rho)
    mom = cell_moments(Lattice.from_materials(ST, [(Material(0.0, 1.0), RotatedSquare45(0.3))]))
    b = pwe_bounds(mom)
    assert b.lower is None
    assert b.upper <= mom.mu_mean / mom.rho_mean


def test_bounds_bracket_dense_oracle():
    rng = np.random.default_rng(11)
    for _ in range(5):
        lat = random_lattice(rng)
        mom = cell_moments(lat)
        tab = mu_table(lat, 3)
        grid = build_grid(3)
        k = np.array([0.8, 0.6])
        c2 = (mom.mu_mean - dense_M(tab, grid, k)) / mom.rho_mean
        b = pwe_bounds(mom, F_quadratic(tab, grid), k)
        assert b.lower - 1e-9 * c2 <= c2 <= b.upper + 1e-9 * c2
        assert b.upper <= mom.mu_mean / mom.rho_mean


def test_acoustic3d():
    up, est = acoustic3d_estimate([2.2e9], [1000.0], [1.0])
    assert up == pytest.approx(2.2e6) and est == pytest.approx(2.2e6)
    up, est = acoustic3d_estimate([1.42e5, 2.2e9], [1.2, 1000.0], [0.3, 0.7])
    assert est <= up
    K = [1e9, 4e9]
    up, est = acoustic3d_estimate(K, [900.0, 900.0], [0.25, 0.75])
    harmonic = (1 / 900.0) / (0.25 / 1e9 + 0.75 / 4e9)
    assert up == pytest.approx(harmonic, rel=1e-14) and est == pytest.approx(harmonic, rel=1e-14)
    with pytest.raises(ConfigError):
        acoustic3d_estimate([0.0], [1.0], [1.0])
