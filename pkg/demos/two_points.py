"""Two singular points of opposite degree at +-1/2.

Checks admissibility of the Green's function, solves at t = 0.9 for a
compatible trace, extracts the leading coefficient on each nodal component,
and measures the rank of the boundary functional on a six-element basis.
"""
import numpy as np

from hamstat import (
    SingularityConfig,
    admissibility_check,
    compatibility_integral,
    compatible_basis,
    extract_coefficients,
    rank_experiment,
    solve_grid,
)

config = SingularityConfig([0.5, -0.5], [1, -1])
report = admissibility_check(config)
print(f"admissibility: {report.verdict} ({len(report.levels)} levels inspected)")

basis = compatible_basis(config)
psi = basis[0]
print(f"compatibility integral of the first basis trace: {abs(compatibility_integral(psi, config)):.1e}")

coefs = []
for h in (1 / 64, 1 / 128):
    field = solve_grid(config, psi, 0.9, h)
    c = extract_coefficients(field, config, J=2, t=0.9)
    a = {d: c.by_degree(d, -1)[0] for d in (1, -1)}
    coefs.append(a)
    print(f"h = 1/{round(1 / h)}: A+_-1 = {a[1]:.6f}  A-_-1 = {a[-1]:.6f}  eps = {sorted(c.epsilon.values())}")
grid_err = max(abs(coefs[0][d] - coefs[1][d]) for d in (1, -1))
print(f"|A+ - A-| = {abs(coefs[1][1] - coefs[1][-1]):.2e}, grid error {grid_err:.2e}")

rank = rank_experiment(config, basis)
print(f"singular values: {np.array2string(rank.singular_values, precision=3)}")
print(f"rank = {rank.rank}")
