"""Monte Carlo and grid-scan validators."""

import pytest

from gcdeg import (BoxTooTight, InconsistentInputs, McConfig, dh_density,
                   get_engine, grid_minimize, mc_integrate)
from gcdeg._poly import Polynomial

from conftest import S_STAR_CASE1


def test_mc_deterministic(rs_so4, case1_poly):
    pi = dh_density(rs_so4)
    cfg = McConfig(samples=200_000)
    a = mc_integrate(case1_poly, pi, None, cfg)
    b = mc_integrate(case1_poly, pi, None, cfg)
    assert a == b
    c = mc_integrate(case1_poly, pi, None, McConfig(samples=200_000, seed=99))
    assert c[0] != a[0]


def test_mc_within_three_sigma(rs_so4, case1_poly):
    pi = dh_density(rs_so4)
    eng = get_engine(case1_poly, pi)
    for lam in (None, (0.5, -0.5)):
        est, err = mc_integrate(case1_poly, pi, lam,
                                McConfig(samples=500_000))
        ref = eng.z(lam or (0.0, 0.0))
        assert abs(est - ref) <= 3 * err
        assert err < 0.01 * ref


def test_mc_chunking_invariance(rs_so4, case1_poly):
    """Estimates differ across chunk sizes (different streams) but both sit
    inside the joint confidence band."""
    pi = dh_density(rs_so4)
    a, ea = mc_integrate(case1_poly, pi, None, McConfig(samples=300_000,
                                                        chunk=100_000))
    b, eb = mc_integrate(case1_poly, pi, None, McConfig(samples=300_000,
                                                        chunk=300_000))
    assert abs(a - b) <= 4 * (ea + eb)


def test_mc_box_validation(rs_so4, case1_poly):
    pi = dh_density(rs_so4)
    with pytest.raises(BoxTooTight):
        mc_integrate(case1_poly, pi, None,
                     McConfig(samples=1000, box=((0.0, 1.0), (-2.0, 3.0))))
    # a covering box is fine
    est, _ = mc_integrate(case1_poly, pi, None,
                          McConfig(samples=50_000,
                                   box=((-1.0, 4.0), (-2.0, 4.0))))
    assert est > 0


def test_grid_minimize_case1(rs_so4, case1_poly):
    rep = grid_minimize(rs_so4, case1_poly, box=[(0.0, 0.5), (0.0, 0.5)],
                        steps=200)
    assert rep["verification"]["ok"]
    assert rep["lambda0"][0] == pytest.approx(S_STAR_CASE1, abs=5e-3)
    assert rep["lambda0"][1] == pytest.approx(-S_STAR_CASE1, abs=5e-3)
    # the refinement pass may only improve the value
    assert rep["h_min"] <= rep["coarse_h"] + 1e-15


def test_grid_minimize_sl2(rs_a1, seg3):
    rep = grid_minimize(rs_a1, seg3, box=[(0.0, 1.0)], steps=64)
    assert rep["t"] == (0.0,)
    assert rep["lambda0"] == (0.0,)
    assert rep["verification"]["ok"]


def test_grid_box_arity(rs_so4, case1_poly):
    with pytest.raises(InconsistentInputs):
        grid_minimize(rs_so4, case1_poly, box=[(0.0, 0.5)], steps=10)


def test_grid_rejects_high_dimension():
    from gcdeg import RootSystemSpec, build_polytope, build_root_system
    rs = build_root_system(RootSystemSpec(catalog="A1xA1xA1"))
    cube = build_polytope(vertices=[[x, y, z] for x in (0, 3)
                                   for y in (0, 3) for z in (0, 3)])
    with pytest.raises(InconsistentInputs):
        grid_minimize(rs, cube, box=[(0, 1)] * 3, steps=4)


def test_mc_polynomial_weight(case1_poly):
    """Plain area of the quad: 27/4."""
    one = Polynomial.constant(2, 1)
    est, err = mc_integrate(case1_poly, one, None, McConfig(samples=400_000))
    assert abs(est - 6.75) <= 3 * err
