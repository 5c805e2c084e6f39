import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hamstat import (
    DiscGrid,
    EvaluationAtSingularity,
    LoopTooCloseToSingularity,
    ScalarField,
    SingularityConfig,
    admissibility_check,
    circle_loop,
    green_eval,
    green_gradient,
    green_perp_gradient,
    maslov_winding,
    sone_eval,
    sone_gradient,
)
from hamstat.greens import boundary_dg, mobius, mobius_inverse, nonzero_components
from hamstat.wente import poisson_zero_bc

ONE = SingularityConfig([0.0], [1])
PAIR = SingularityConfig([0.4, -0.4], [1, -1])
SYM = SingularityConfig([0.5, -0.5], [1, -1])

# frozen: log(0.3 / 0.82)
G_P03_AT_06 = -1.0055218656020977


def _point(r, th):
    return r * np.exp(1j * th)


points = st.builds(_point, st.floats(0.0, 0.85), st.floats(0, 2 * np.pi))
configs = st.lists(st.tuples(points, st.sampled_from([1, -1])), min_size=1, max_size=4).filter(
    lambda items: all(abs(a[0] - b[0]) > 0.05 for i, a in enumerate(items) for b in items[i + 1:])
).map(lambda items: SingularityConfig([p for p, _ in items], [d for _, d in items]))


def test_green_center():
    assert green_eval(ONE, 0.5) == pytest.approx(np.log(0.5), abs=1e-15)


def test_green_moved_point_frozen():
    assert green_eval(SingularityConfig([0.3], [1]), 0.6) == pytest.approx(G_P03_AT_06, abs=1e-14)


def test_green_matches_poisson_oracle():
    # Delta phi = 2 pi delta_p, delta spread bilinearly on the h = 1/128 grid
    p = 0.3 + 0.1j
    grid = DiscGrid(1 / 128)
    rhs = np.zeros(grid.shape, complex)
    fx, fy = p.real / grid.h + grid.shape[0] / 2 - 0.5, p.imag / grid.h + grid.shape[1] / 2 - 0.5
    i, j = int(np.floor(fx)), int(np.floor(fy))
    ax, ay = fx - i, fy - j
    for di, dj, w in ((0, 0, (1 - ax) * (1 - ay)), (1, 0, ax * (1 - ay)), (0, 1, (1 - ax) * ay), (1, 1, ax * ay)):
        rhs[i + di, j + dj] += 2 * np.pi * w / grid.h ** 2
    phi = poisson_zero_bc(ScalarField(grid, rhs))
    z = np.array([0.6, -0.5j, -0.5 + 0.3j, 0.1 + 0.6j])
    np.testing.assert_allclose(phi.at(z).real, green_eval(SingularityConfig([p], [1]), z), atol=0.02)


@settings(max_examples=60, deadline=None)
@given(configs, st.floats(0, 2 * np.pi))
def test_green_vanishes_on_circle(config, th):
    assert abs(green_eval(config, np.exp(1j * th))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(points)
def test_conformal_invariance(p):
    w = _point(0.37, 1.1) * np.array([1, 1j, -1, 0.5])
    z = mobius_inverse(w, p)
    np.testing.assert_allclose(green_eval(SingularityConfig([p], [1]), z), np.log(np.abs(w)), atol=1e-12)
    np.testing.assert_allclose(mobius(z, p), w, atol=1e-12)


def test_evaluation_at_singularity():
    with pytest.raises(EvaluationAtSingularity):
        green_eval(PAIR, 0.4)
    with pytest.raises(EvaluationAtSingularity):
        sone_eval(PAIR, -0.4)


def test_gradient_against_differences():
    z = np.array([0.1 + 0.2j, -0.6 + 0.1j, 0.7j])
    e = 1e-6
    gx, gy = green_gradient(PAIR, z)
    fx = (green_eval(PAIR, z + e) - green_eval(PAIR, z - e)) / (2 * e)
    fy = (green_eval(PAIR, z + 1j * e) - green_eval(PAIR, z - 1j * e)) / (2 * e)
    np.testing.assert_allclose(gx, fx, atol=1e-7)
    np.testing.assert_allclose(gy, fy, atol=1e-7)
    px, py = green_perp_gradient(PAIR, z)
    np.testing.assert_allclose(px, -fy, atol=1e-7)
    np.testing.assert_allclose(py, fx, atol=1e-7)


def test_harmonicity_refines():
    z0 = np.array([0.2 + 0.6j, -0.1 - 0.7j, 0.75])
    res = []
    for h in (1 / 32, 1 / 64):
        lap = (sum(green_eval(PAIR, z0 + h * s) for s in (1, -1, 1j, -1j)) - 4 * green_eval(PAIR, z0)) / h ** 2
        res.append(np.max(np.abs(lap)))
    assert res[1] < res[0] / 3


def test_sone_examples():
    assert sone_eval(ONE, 0.5j) == pytest.approx(1j, abs=1e-15)
    assert sone_eval(SingularityConfig([0.0], [-1]), 0.5j) == pytest.approx(-1j, abs=1e-15)


def test_sone_two_point_line_integration():
    # g(1) = 1 for real points; integrate d(arg g) = grad^perp G . dz back from 1 to 0.9,
    # with G_y by central differences so the oracle shares no code with sone_eval
    e = 1e-6
    gy = lambda x: (green_eval(PAIR, x + 1j * e) - green_eval(PAIR, x - 1j * e)) / (2 * e)
    dphase, _ = quad(lambda x: -gy(x), 1.0, 0.9)
    assert sone_eval(PAIR, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert sone_eval(PAIR, 0.9) == pytest.approx(np.exp(1j * dphase), abs=1e-8)
    phi = mobius(0.9, 0.4)
    psi = mobius(0.9, -0.4)
    assert sone_eval(PAIR, 0.9) == pytest.approx(phi / abs(phi) * np.conj(psi) / abs(psi), abs=1e-14)


def test_correspondence_analytic():
    z = np.array([0.1 + 0.2j, -0.6 + 0.1j, 0.7j])
    g = sone_eval(PAIR, z)
    gx, gy = sone_gradient(PAIR, z)
    px, py = green_perp_gradient(PAIR, z)
    np.testing.assert_allclose(np.conj(g) * gx, 1j * px, atol=1e-12)
    np.testing.assert_allclose(np.conj(g) * gy, 1j * py, atol=1e-12)


def test_correspondence_first_order_by_differences():
    # one-sided differences, so the defect is first order in h
    z = np.array([0.1 + 0.2j, -0.6 + 0.1j, 0.7j])
    errs = []
    for h in (1e-2, 5e-3):
        g = sone_eval(PAIR, z)
        dx = (sone_eval(PAIR, z + h) - g) / h
        px, _ = green_perp_gradient(PAIR, z)
        errs.append(np.max(np.abs(np.conj(g) * dx - 1j * px)))
    assert 1.7 < errs[0] / errs[1] < 2.3


def test_boundary_dg_is_tangential():
    th = np.linspace(0, 2 * np.pi, 7)
    e = 1e-6
    fd = (sone_eval(PAIR, np.exp(1j * (th + e))) - sone_eval(PAIR, np.exp(1j * (th - e)))) / (2 * e)
    np.testing.assert_allclose(boundary_dg(PAIR, th), fd, atol=1e-7)


def test_maslov_examples():
    assert maslov_winding(ONE, circle_loop(0, 0.5)) == 1
    assert maslov_winding(PAIR, circle_loop(0, 0.9)) == 0
    assert maslov_winding(PAIR, circle_loop(0.4, 0.2)) == 1
    assert maslov_winding(PAIR, circle_loop(-0.4, 0.2)) == -1
    assert maslov_winding(PAIR, circle_loop(0.6j, 0.1)) == 0


def test_maslov_loop_too_close():
    with pytest.raises(LoopTooCloseToSingularity):
        maslov_winding(PAIR, circle_loop(0.4, 0.2) + 0.2)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.35), st.floats(-0.03, 0.03), st.floats(-0.03, 0.03))
def test_maslov_deformation_invariance(r, dx, dy):
    th = np.linspace(0, 2 * np.pi, 2049)
    loop = 0.4 + dx + 1j * dy + r * (1 + 0.1 * np.cos(3 * th)) * np.exp(1j * th)
    assert maslov_winding(PAIR, loop) == 1


def test_admissibility_verdicts():
    assert admissibility_check(ONE).admissible
    assert admissibility_check(SYM).admissible
    bad = admissibility_check(SingularityConfig([0.5, -0.5], [1, 1]))
    assert not bad.admissible
    fluxes = [c.flux for lv in bad.levels for c in lv.components]
    assert max(fluxes) == pytest.approx(4 * np.pi, rel=0.05)


def test_admissibility_report_json():
    import json

    d = json.loads(admissibility_check(SYM, 1 / 128).to_json())
    assert d["verdict"] == "admissible"
    assert d["levels"]


def test_symmetric_components_split_by_imaginary_axis():
    grid = DiscGrid(1 / 64, SYM.points)
    labels, comps = nonzero_components(SYM, grid)
    assert sorted(c.degree for c in comps) == [-1, 1]
    for c in comps:
        xs = grid.X[c.mask]
        assert np.all(np.sign(xs) == np.sign(c.degree))


def test_config_records_round_trip():
    c = SingularityConfig([0.1 + 0.2j, -0.3], [1, -1])
    assert SingularityConfig.from_records(c.to_records()) == c
    with pytest.raises(ValueError):
        SingularityConfig([1.2], [1])
    with pytest.raises(ValueError):
        SingularityConfig([0.1], [2])
