"""One conical point at the origin: exact Fourier solutions at t = 1.

Builds the finite-energy solution for a few boundary traces, shows that the
reverse mode e^{-i theta} is the one obstruction, and prints the sampled
Hoelder quotient that stays bounded near the singular point.
"""
import numpy as np

from hamstat import (
    BoundaryTrace,
    IncompatibleBoundaryData,
    SingularityConfig,
    compatibility_integral,
    mobius_conjugate_solution,
    regularity_profile,
    solve_one_singularity,
)

config = SingularityConfig([0.0], [1])

print("mode k  exponent sqrt(k^2+k)  oint psi dg")
for k in range(-3, 4):
    psi = BoundaryTrace.monomial(k, 4)
    integral = compatibility_integral(psi, config)
    try:
        sol = solve_one_singularity(psi, 1.0)
        expo = f"{sol.exponents[k + sol.K]:.6f}"
    except IncompatibleBoundaryData:
        expo = "refused"
    print(f"{k:6d}  {expo:>20s}  {integral.real:+.3f}{integral.imag:+.3f}i")

# a generic trace with the obstruction projected out
rng = np.random.default_rng(1)
c = (rng.standard_normal(17) + 1j * rng.standard_normal(17)) / (1 + np.abs(np.arange(-8, 9))) ** 2
c[8 - 1] = 0.0
sol = solve_one_singularity(BoundaryTrace(c), 1.0)
z = 0.7 * np.exp(2j * np.pi * rng.random(500)) * np.sqrt(rng.random(500))
print(f"\nmax residual of the structural equation at 500 points: {np.max(np.abs(sol.residual(z))):.2e}")
print(f"Dirichlet energy (closed form): {sol.energy():.6f}")

prof = regularity_profile(sol)
print("\nradius      |grad u| / r^(sqrt2 - 1)")
for r, q in zip(prof.radii, prof.ratios):
    print(f"{r:.6f}   {q:.6f}")

# the same solution moved to p = 0.3 + 0.2i through the disc automorphism
moved = mobius_conjugate_solution(sol, 0.3 + 0.2j)
w = z[np.abs(z - (0.3 + 0.2j)) > 0.05]
print(f"\nmoved to p = 0.3+0.2i: max residual {np.max(np.abs(moved.residual(w))):.2e}")
