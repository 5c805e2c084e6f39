import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad

from hamstat import (
    BoundaryTrace,
    DiscGrid,
    ScalarField,
    SingularityConfig,
    WenteAuditor,
    WentePair,
    check_linf_wente,
    check_optimal_wente,
    poisson_zero_bc,
    solve_one_singularity,
    uniqueness_probe,
)
from hamstat.wente import green_pairing, jacobian_form, margins_to_csv

SYM = SingularityConfig([0.5, -0.5], [1, -1])


@pytest.fixture(scope="module")
def auditor():
    return WenteAuditor(SYM, 1 / 64)


def _const_rhs(grid, c):
    v = np.zeros(grid.shape, complex)
    v[grid.inside] = c
    return ScalarField(grid, v)


def test_poisson_zero_rhs():
    grid = DiscGrid(1 / 32)
    phi = poisson_zero_bc(_const_rhs(grid, 0.0))
    assert np.all(phi.values[grid.inside] == 0)


@pytest.mark.parametrize("c", [1.0, -1.0, 3.5])
def test_poisson_constant_rhs(c):
    # a = x1, b = x2 gives Jacobian -1 and phi = (1 - |z|^2)/4
    errs = []
    for h in (1 / 32, 1 / 64):
        grid = DiscGrid(h)
        phi = poisson_zero_bc(_const_rhs(grid, c))
        exact = c * (np.abs(grid.Z) ** 2 - 1) / 4
        errs.append(np.max(np.abs(phi.values[grid.inside] - exact[grid.inside])))
    assert errs[1] < 0.01 * abs(c)
    assert errs[0] / errs[1] > 1.5


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000), st.floats(-5, 5))
def test_poisson_linear(seed, s):
    grid = DiscGrid(1 / 32)
    rng = np.random.default_rng(seed)
    f1 = _const_rhs(grid, 0)
    f2 = _const_rhs(grid, 0)
    f1.values[grid.inside] = rng.standard_normal(grid.n_unknowns)
    f2.values[grid.inside] = rng.standard_normal(grid.n_unknowns)
    comb = _const_rhs(grid, 0)
    comb.values[grid.inside] = s * f1.values[grid.inside] + f2.values[grid.inside]
    lhs = poisson_zero_bc(comb).values[grid.inside]
    rhs = s * poisson_zero_bc(f1).values[grid.inside] + poisson_zero_bc(f2).values[grid.inside]
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * (1 + np.max(np.abs(lhs)))


def test_pair_derivatives_against_differences():
    pair = WentePair.random(3, K=6)
    z = np.array([0.1 + 0.2j, -0.5 + 0.3j, 0.7j])
    e = 1e-6
    for fn in (pair.a, pair.b):
        v, fx, fy = fn(z)
        np.testing.assert_allclose(fx, (fn(z + e)[0] - fn(z - e)[0]) / (2 * e), atol=1e-6)
        np.testing.assert_allclose(fy, (fn(z + 1j * e)[0] - fn(z - 1j * e)[0]) / (2 * e), atol=1e-6)


def test_pair_energy_against_dblquad():
    pair = WentePair.random(5, K=3)

    def dens(r, th):
        z = np.array([r * np.exp(1j * th)])
        _, ax, ay = pair.a(z)
        _, bx, by = pair.b(z)
        return float((ax ** 2 + ay ** 2 + bx ** 2 + by ** 2)[0] * r)

    ref, _ = dblquad(dens, 0, 2 * np.pi, 0, 1, epsabs=1e-10, epsrel=1e-10)
    assert pair.energy() == pytest.approx(ref, rel=1e-8)


def test_constants_equality(auditor):
    rep = auditor.check(WentePair.constants(1.5, -0.7))
    assert rep.lhs == 0 and rep.rhs == 0 and rep.margin == 0


def test_equal_functions_zero_lhs(auditor):
    pair = WentePair.random(11).swapped_equal()
    rep = auditor.check(pair)
    assert rep.lhs < 1e-12 * rep.rhs
    assert rep.margin == pytest.approx(rep.rhs, rel=1e-12)


@pytest.mark.parametrize("s", [2.0, 10.0])
def test_scaling_covariance(auditor, s):
    pair = WentePair.random(4)
    a = auditor.check(pair)
    b = auditor.check(pair.scaled(s))
    assert b.lhs == pytest.approx(s ** 2 * a.lhs, rel=1e-10)
    assert b.rhs == pytest.approx(s ** 2 * a.rhs, rel=1e-10)
    assert b.margin == pytest.approx(s ** 2 * a.margin, rel=1e-10)


def test_random_margins_nonnegative(auditor):
    reps = auditor.audit(25, seed0=100)
    assert all(r.ok and r.margin > 0 for r in reps)


def test_two_routes_agree(auditor):
    for seed in range(3):
        rep = auditor.check(WentePair.random(seed))
        assert rep.green_route == pytest.approx(rep.lhs, rel=0.05, abs=0.02 * rep.rhs)


def test_refuses_unbalanced_or_inadmissible():
    with pytest.raises(ValueError):
        WenteAuditor(SingularityConfig([0.5, -0.5], [1, 1]))
    with pytest.raises(ValueError):
        check_optimal_wente(WentePair.random(0), SingularityConfig([0.3], [1]))


def test_margins_csv(auditor):
    reps = auditor.audit(3)
    lines = margins_to_csv(reps).splitlines()
    assert lines[0] == "seed,lhs,rhs,margin"
    assert len(lines) == 4


def test_linf_constant():
    grid = DiscGrid(1 / 32)
    rep = check_linf_wente(ScalarField(grid, np.full(grid.shape, 2.0 + 1j)))
    assert rep.sup_b == 0 and rep.bound == 0


def test_linf_identity_map():
    grid = DiscGrid(1 / 64)
    u = ScalarField(grid, grid.Z.astype(complex))
    J = jacobian_form(u)
    np.testing.assert_allclose(J[grid.inside], -2, atol=1e-12)
    rep = check_linf_wente(u)
    assert rep.sup_b == pytest.approx(0.5, abs=0.02)
    assert rep.bound == pytest.approx(1.0, abs=0.03)
    assert rep.margin == pytest.approx(0.5, abs=0.04)


def test_linf_pure_mode():
    grid = DiscGrid(1 / 64)
    u = ScalarField.from_function(grid, solve_one_singularity(BoundaryTrace.monomial(1, 2), 1.0))
    assert check_linf_wente(u).margin > 0


def test_green_pairing_routes():
    grid = DiscGrid(1 / 64, SYM.points)
    u = ScalarField(grid, (grid.Z ** 2 + 0.3 * np.conj(grid.Z)).astype(complex))
    direct, via = green_pairing(u, SYM)
    assert direct == pytest.approx(via, rel=0.05)


def test_uniqueness_probe():
    rep = uniqueness_probe(SYM)
    assert rep.passed
    zero = uniqueness_probe(SYM, ts=(0.0,), noise=0.0)
    assert zero.gradient_norms[0.0] == 0.0
