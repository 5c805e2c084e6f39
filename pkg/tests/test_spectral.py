import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamstat import (
    BoundaryTrace,
    IncompatibleBoundaryData,
    ModeSolution,
    SingularityConfig,
    compatibility_integral,
    mobius_conjugate_solution,
    regularity_profile,
    solve_one_singularity,
)
from hamstat.spectral import mode_exponent

ONE = SingularityConfig([0.0], [1])
PAIR = SingularityConfig([0.4, -0.4], [1, -1])


def _rand_points(n, seed=0, rmax=1.0):
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.random(n)) * rmax * np.exp(2j * np.pi * rng.random(n))


def _quad_energy(u, n_r=200, n_th=256):
    # Gauss-Legendre in s = r^(1/4) resolves the r^a singular behaviour at 0
    x, w = np.polynomial.legendre.leggauss(n_r)
    s = 0.5 * (x + 1)
    r = s ** 4
    wr = 0.5 * w * 4 * s ** 3
    th = 2 * np.pi * np.arange(n_th) / n_th
    z = np.outer(r, np.exp(1j * th))
    ux, uy = u.gradient(z.ravel())
    e = (np.abs(ux) ** 2 + np.abs(uy) ** 2).reshape(z.shape)
    return float(np.sum(e.mean(axis=1) * 2 * np.pi * r * wr))


traces = st.lists(
    st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=9, max_size=9
).map(lambda c: BoundaryTrace(np.array([a + 1j * b for a, b in c])))


def test_pure_mode_t1():
    sol = solve_one_singularity(BoundaryTrace.monomial(1, 8), 1.0, 1)
    z = _rand_points(1000)
    np.testing.assert_allclose(sol(z), np.abs(z) ** np.sqrt(2) * np.exp(1j * np.angle(z)), atol=1e-12)
    assert np.max(np.abs(sol.residual(z))) < 1e-8


def test_constant_trace():
    sol = solve_one_singularity(BoundaryTrace.from_modes({0: 2.0 - 1j}, 4), 0.3)
    np.testing.assert_allclose(sol(_rand_points(50)), 2.0 - 1j, atol=1e-15)


def test_t075_reverse_mode():
    sol = solve_one_singularity(BoundaryTrace.monomial(-1, 4), 0.75)
    z = _rand_points(200, 1)
    np.testing.assert_allclose(sol(z), np.abs(z) ** 0.5 * np.exp(-1j * np.angle(z)), atol=1e-14)
    zz = z[np.abs(z) > 1e-3]
    assert np.max(np.abs(sol.residual(zz))) < 1e-8


@pytest.mark.parametrize("degree", [1, -1])
def test_gate_refuses_only_reverse_mode(degree):
    for k in range(-6, 7):
        psi = BoundaryTrace.monomial(k, 6)
        if k == -degree:
            with pytest.raises(IncompatibleBoundaryData):
                solve_one_singularity(psi, 1.0, degree)
        else:
            solve_one_singularity(psi, 1.0, degree)


def test_gate_agrees_with_compatibility_integral():
    for k in range(-4, 5):
        psi = BoundaryTrace.monomial(k, 4)
        integral = compatibility_integral(psi, ONE)
        try:
            solve_one_singularity(psi, 1.0, 1)
            solved = True
        except IncompatibleBoundaryData:
            solved = False
        assert solved == (abs(integral) < 1e-10)


def test_compatibility_examples():
    assert abs(compatibility_integral(BoundaryTrace.monomial(1, 4), ONE)) < 1e-13
    assert compatibility_integral(BoundaryTrace.monomial(-1, 4), ONE) == pytest.approx(2j * np.pi, abs=1e-13)
    for cfg in (ONE, PAIR):
        assert abs(compatibility_integral(BoundaryTrace.from_modes({0: 3.0}, 2), cfg)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(traces, traces, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_compatibility_linear(a, b, c):
    lhs = compatibility_integral(a * c + b, PAIR)
    rhs = c * compatibility_integral(a, PAIR) + compatibility_integral(b, PAIR)
    assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))


@settings(max_examples=30, deadline=None)
@given(st.integers(-12, 12), st.floats(0, 1))
def test_mode_exactness(k, t):
    sol = ModeSolution(BoundaryTrace.monomial(k, 12).coeffs, t, 1)
    z = _rand_points(64, 2)
    z = z[np.abs(z) > 0.05]
    scale = 1 + np.max(np.abs(sol.laplacian(z)))
    assert np.max(np.abs(sol.residual(z))) < 1e-10 * scale


def test_energy_closed_form_matches_quadrature():
    rng = np.random.default_rng(3)
    c = (rng.standard_normal(9) + 1j * rng.standard_normal(9)) / (1 + np.abs(np.arange(-4, 5))) ** 2
    for t in (0.0, 0.5, 0.96):
        sol = ModeSolution(c, t, 1)
        assert sol.energy() == pytest.approx(_quad_energy(sol), rel=1e-6)


def test_energy_reverse_mode_oracle():
    sol = solve_one_singularity(BoundaryTrace.monomial(-1, 4), 0.96)
    assert sol.energy() == pytest.approx(np.pi * 1.04 / 0.2, rel=1e-12)


def test_exponents_are_finite_energy_branch():
    for t in (0.2, 0.9, 1.0):
        a = mode_exponent(np.arange(-5, 6), t)
        assert np.all(a >= 0)
    assert mode_exponent(1, 1.0) == pytest.approx(np.sqrt(2))


def test_uniqueness_of_finite_energy_solution():
    psi = BoundaryTrace.from_modes({1: 1.0, 2: -0.5j, 0: 0.3}, 6)
    s1 = solve_one_singularity(psi, 1.0)
    s2 = solve_one_singularity(BoundaryTrace(psi.coeffs.copy()), 1.0)
    np.testing.assert_array_equal(s1.coeffs, s2.coeffs)
    np.testing.assert_allclose(s1.trace()(np.linspace(0, 6, 9)), psi(np.linspace(0, 6, 9)), atol=1e-14)


def test_degree_minus_is_conjugate():
    psi = BoundaryTrace.from_modes({1: 1.0, 2: 0.5j, -3: 0.2}, 4)
    plus = solve_one_singularity(psi, 0.7, 1)
    conj_psi = BoundaryTrace(np.conj(psi.coeffs[::-1]))
    minus = solve_one_singularity(conj_psi, 0.7, -1)
    z = _rand_points(40, 4)
    np.testing.assert_allclose(minus(z), np.conj(plus(z)), atol=1e-13)


def test_conjugated_solution():
    sol = solve_one_singularity(BoundaryTrace.monomial(1, 2), 1.0)
    moved = mobius_conjugate_solution(sol, 0.3)
    assert abs(moved(0.3)) < 1e-15
    z = _rand_points(100, 5, 0.95)
    z = z[np.abs(z - 0.3) > 0.05]
    assert np.max(np.abs(moved.residual(z))) < 1e-8
    e = 1e-5
    ux, uy = moved.gradient(z)
    np.testing.assert_allclose(ux, (moved(z + e) - moved(z - e)) / (2 * e), atol=1e-8)
    np.testing.assert_allclose(uy, (moved(z + 1j * e) - moved(z - 1j * e)) / (2 * e), atol=1e-8)


def test_conjugated_identity_at_origin():
    sol = solve_one_singularity(BoundaryTrace.monomial(2, 3), 0.4)
    z = _rand_points(20, 6)
    np.testing.assert_allclose(mobius_conjugate_solution(sol, 0.0)(z), sol(z), atol=1e-15)


def test_regularity_pure_mode_constant():
    prof = regularity_profile(solve_one_singularity(BoundaryTrace.monomial(1, 4), 1.0))
    np.testing.assert_allclose(prof.ratios, np.sqrt(3), rtol=1e-10)


def test_regularity_constant_zero():
    prof = regularity_profile(solve_one_singularity(BoundaryTrace.from_modes({0: 1.0}, 4), 1.0))
    assert np.all(prof.ratios == 0)


def test_regularity_random_trace_bounded():
    rng = np.random.default_rng(7)
    c = (rng.standard_normal(17) + 1j * rng.standard_normal(17)) / (1 + np.abs(np.arange(-8, 9))) ** 2
    c[8 - 1] = c[8] = 0
    prof = regularity_profile(solve_one_singularity(BoundaryTrace(c), 1.0))
    assert np.isfinite(prof.holder_constant)
    # radii run outward to inward; the quotient never grows as r decreases
    assert np.all(np.diff(prof.ratios) <= 1e-12)


def test_regularity_requires_t1():
    with pytest.raises(ValueError):
        regularity_profile(solve_one_singularity(BoundaryTrace.monomial(1, 2), 0.5))


def test_trace_round_trips():
    rng = np.random.default_rng(8)
    psi = BoundaryTrace(rng.standard_normal(13) + 1j * rng.standard_normal(13))
    assert np.array_equal(BoundaryTrace.from_records(psi.to_records()).coeffs, psi.coeffs)
    again = BoundaryTrace.from_function(psi, K=6)
    np.testing.assert_allclose(again.coeffs, psi.coeffs, atol=1e-13)
    sol = ModeSolution(psi.coeffs, 0.5, -1)
    back = ModeSolution.from_dict(sol.to_dict())
    assert np.array_equal(back.coeffs, sol.coeffs) and back.t == 0.5 and back.degree == -1
