import json

import numpy as np
import pytest

from hamstat import (
    BoundaryTrace,
    ConeDescriptor,
    DegenerateMetric,
    DiscGrid,
    ScalarField,
    SingularityConfig,
    assemble_immersion,
    harmonic_conjugate,
    mean_curvature,
    solve_grid,
    solve_one_singularity,
    sw_cone,
    verify_hamiltonian_stationary,
)
from hamstat.greens import sone_gradient

ONE = SingularityConfig([0.0], [1])
SYM = SingularityConfig([0.5, -0.5], [1, -1])
PAIRS = [(1, 1), (2, 1), (3, 2), (5, 3)]


def _annulus(grid, lo=0.25, hi=0.8):
    r = np.abs(grid.Z)
    return (r > lo) & (r < hi)


def test_conjugate_of_constant():
    grid = DiscGrid(1 / 32)
    cr = harmonic_conjugate(ScalarField(grid, np.full(grid.shape, 1.0 + 2j)), SYM)
    assert np.nanmax(np.abs(cr.v.values)) < 1e-14
    assert cr.energy_v == 0


def test_classical_conjugate_cauchy_riemann():
    # grad^perp v = grad u with grad^perp = (-d_y, d_x): v = -Im z^2, and v(1) = 0
    grid = DiscGrid(1 / 64)
    u = ScalarField(grid, (grid.Z ** 2).real.astype(complex))
    cr = harmonic_conjugate(u)
    ins = grid.inside & (np.abs(grid.Z) < 0.9)
    exact = -(grid.Z ** 2).imag
    err = cr.v.values[ins] - exact[ins]
    assert np.max(np.abs(err - err.mean())) < 1e-10
    assert abs(cr.energy_u - cr.energy_v) < 1e-10 * cr.energy_u


def test_conjugate_energy_balance_solved_field():
    psi = BoundaryTrace.from_modes({1: 1.0, 2: 0.5j, -2: 0.25}, 2)
    f = solve_grid(ONE, psi, 0.0, 1 / 32)
    cr = harmonic_conjugate(f)
    assert abs(cr.energy_u - cr.energy_v) <= 1e-8 * cr.energy_u
    assert cr.loop_residue < 1e-8


def test_conjugate_pointwise_gradient_match():
    # |grad v| = |grad u| for u = r^sqrt2 e^{i theta}, g = e^{i theta}
    grid = DiscGrid(1 / 64)
    sol = solve_one_singularity(BoundaryTrace.monomial(1, 2), 1.0)
    u = ScalarField.from_function(grid, sol)
    cr = harmonic_conjugate(u, ONE, method="lsq")
    imm = assemble_immersion(u, cr)
    sel = imm.mask & _annulus(grid)
    gu = np.sqrt(np.abs(imm.d1[0]) ** 2 + np.abs(imm.d2[0]) ** 2)[sel]
    gv = np.sqrt(np.abs(imm.d1[1]) ** 2 + np.abs(imm.d2[1]) ** 2)[sel]
    assert np.max(np.abs(gu - gv) / gu) < 0.05


def test_conformality_first_order():
    sol = solve_one_singularity(BoundaryTrace.monomial(1, 2), 1.0)
    defects = []
    for h in (1 / 32, 1 / 64, 1 / 128):
        grid = DiscGrid(h)
        u = ScalarField.from_function(grid, sol)
        imm = assemble_immersion(u, harmonic_conjugate(u, ONE, method="lsq"))
        rep = {d["channel"]: d["max"] for d in imm.report(_annulus(grid))}
        defects.append(max(rep["conformality"], rep["orthogonality"]))
    assert defects[0] / defects[1] >= 1.7 and defects[1] / defects[2] >= 1.7


def test_minimal_case_conformal():
    grid = DiscGrid(1 / 64)
    u = ScalarField(grid, (grid.Z ** 2).real.astype(complex))
    imm = assemble_immersion(u, harmonic_conjugate(u))
    rep = {d["channel"]: d["max"] for d in imm.report(grid.inside & (np.abs(grid.Z) < 0.9))}
    assert rep["conformality"] < 0.05 and rep["orthogonality"] < 0.05


def test_zero_field_is_degenerate():
    grid = DiscGrid(1 / 32)
    u = ScalarField(grid, np.zeros(grid.shape, complex))
    imm = assemble_immersion(u, harmonic_conjugate(u))
    assert imm.degenerate
    with pytest.raises(DegenerateMetric):
        mean_curvature(imm, None)


def test_report_json_shape():
    imm = sw_cone(ConeDescriptor(2, 1), DiscGrid(1 / 16))
    rows = json.loads(imm.to_json())
    assert {r["channel"] for r in rows} == {"conformality", "orthogonality", "lagrangian", "angle"}
    assert all(set(r) == {"channel", "max", "l2", "h"} for r in rows)


@pytest.mark.parametrize("p,q", PAIRS)
def test_cone_identities(p, q):
    desc = ConeDescriptor(p, q)
    grid = DiscGrid(1 / 32)
    imm = sw_cone(desc, grid)
    z = grid.Z[grid.inside]
    cf = desc.conformal_factor(z)
    np.testing.assert_allclose(imm.conformal_factor[grid.inside], cf, rtol=1e-12)
    np.testing.assert_allclose(imm.angle[grid.inside], np.exp(1j * (p - q) * np.angle(z)), atol=1e-12)
    for d in imm.report():
        assert d["max"] < 1e-12


def test_cone_conformal_factor_closed_form():
    desc = ConeDescriptor(3, 2)
    r = np.array([0.1, 0.5, 0.9])
    assert np.allclose(desc.conformal_factor(r), 6 * r ** (2 * np.sqrt(6) - 2))
    assert ConeDescriptor(1, 1).maslov == 0
    with pytest.raises(ValueError):
        ConeDescriptor(0, 1)


@pytest.mark.parametrize("p,q", PAIRS)
def test_cone_structural_first_order(p, q):
    desc = ConeDescriptor(p, q)
    res = []
    for h in (1 / 32, 1 / 64):
        grid = DiscGrid(h)
        rep = verify_hamiltonian_stationary(sw_cone(desc, grid), desc.g, where=np.abs(grid.Z) > 0.25)
        res.append(rep[0]["max"])
    assert res[1] < 1e-9 or res[0] / res[1] >= 1.7


def test_structural_constant_phi():
    grid = DiscGrid(1 / 32)
    c = ScalarField(grid, np.full(grid.shape, 3.0 + 0j))
    imm = assemble_immersion(c, c)
    rep = verify_hamiltonian_stationary(imm, SYM, where=grid.inside)
    assert rep[0]["max"] == 0


def test_boundary_neumann_channel():
    grid = DiscGrid(1 / 16)
    imm = sw_cone(ConeDescriptor(2, 1), grid)
    rep = {d["channel"]: d for d in verify_hamiltonian_stationary(imm, SYM, config=SYM)}
    assert rep["boundary_gbar_dr_g"]["max"] < 1e-10


def test_mean_curvature_flat_plane():
    grid = DiscGrid(1 / 32)
    u = ScalarField(grid, grid.Z.astype(complex))
    imm = assemble_immersion(u, ScalarField(grid, np.zeros(grid.shape, complex)))
    res = mean_curvature(imm, None)
    assert np.nanmax(np.abs(res.H[0])) < 1e-12
    assert np.nanmax(res.defect) < 1e-12


def test_mean_curvature_cone_defect_first_order():
    desc = ConeDescriptor(2, 1)
    grad_g = lambda z: (
        -1j * desc.maslov * desc.g(z) * (-np.imag(z)) / np.abs(z) ** 2,
        -1j * desc.maslov * desc.g(z) * np.real(z) / np.abs(z) ** 2,
    )
    out = []
    for h in (1 / 32, 1 / 64):
        grid = DiscGrid(h)
        res = mean_curvature(sw_cone(desc, grid), desc.g, grad_g, where=np.abs(grid.Z) > 0.25)
        out.append(np.nanmax(res.defect))
    assert out[0] / out[1] >= 1.7


def test_mean_curvature_sone_gradient_hook():
    grid = DiscGrid(1 / 32)
    imm = sw_cone(ConeDescriptor(2, 1), grid)
    res = mean_curvature(imm, ONE, lambda z: sone_gradient(ONE, z), where=np.abs(grid.Z) > 0.25)
    assert np.all(np.isfinite(res.defect[res.mask]))
