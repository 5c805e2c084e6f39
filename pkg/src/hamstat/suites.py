"""Reproducible verification checks, grouped into suites for the command line.

Each check returns a :class:`CheckResult` with the measured quantities, so the
same numbers back the test suite, the ``verify`` subcommand and the demos.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .greens import SingularityConfig, circle_loop, maslov_winding
from .grid import DiscGrid, ScalarField
from .immersion import ConeDescriptor, assemble_immersion, harmonic_conjugate, sw_cone, verify_hamiltonian_stationary
from .spectral import BoundaryTrace, solve_one_singularity
from .variational import (
    compatible_basis,
    extract_coefficients,
    rank_experiment,
    solve_grid,
    t_sweep,
)
from .wente import WenteAuditor, WentePair, uniqueness_probe
from .errors import IncompatibleBoundaryData

SYMMETRIC_PAIR = SingularityConfig([0.5, -0.5], [1, -1])
FOUR_PI_CUBED = 4 * np.pi ** 3


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float = float("inf")

    @property
    def within_budget(self):
        return self.seconds <= self.budget

    def line(self):
        status = "PASS" if self.passed and self.within_budget else "FAIL"
        return f"[{status}] {self.name} ({self.seconds:.2f}s / budget {self.budget:.0f}s)"

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "within_budget": bool(self.within_budget),
            "seconds": self.seconds,
            "details": _plain(self.details),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _timed(name, budget):
    def deco(fn):
        def run(*a, **kw):
            t0 = time.perf_counter()
            passed, details = fn(*a, **kw)
            return CheckResult(name, bool(passed), details, time.perf_counter() - t0, budget)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return deco


# ---------------------------------------------------------------------------


@_timed("1 spectral exactness", 1.0)
def check_spectral_exactness(n_points=1000, seed=0):
    psi = BoundaryTrace.monomial(1, 8)
    sol = solve_one_singularity(psi, 1.0, 1)
    rng = np.random.default_rng(seed)
    z = np.sqrt(rng.random(n_points)) * np.exp(2j * np.pi * rng.random(n_points))
    coef_err = float(np.max(np.abs(sol.coeffs - psi.coeffs)))
    exact = np.abs(z) ** np.sqrt(2) * np.exp(1j * np.angle(z))
    value_err = float(np.max(np.abs(sol(z) - exact)))
    residual = float(np.max(np.abs(sol.residual(z))))
    ok = coef_err <= 1e-12 and value_err <= 1e-12 and residual < 1e-8
    return ok, {"coefficient_error": coef_err, "value_error": value_err, "max_residual": residual}


@_timed("2 variational vs spectral oracle", 30.0)
def check_oracle(t=0.5, h=1 / 64):
    config = SingularityConfig([0], [1])
    psi = BoundaryTrace.monomial(1, 4)
    exact = solve_one_singularity(psi, t, 1)
    errs = []
    for hh in (h, h / 2):
        f = solve_grid(config, psi, t, hh)
        ins = f.grid.inside
        ue = exact(f.grid.Z[ins])
        errs.append(float(np.linalg.norm(f.values[ins] - ue) / np.linalg.norm(ue)))
    ratio = errs[0] / errs[1]
    return errs[0] <= 0.05 and ratio >= 1.7, {"error_h": errs[0], "error_h2": errs[1], "ratio": ratio}


@_timed("3 blow-up law", 120.0)
def check_blowup():
    config = SingularityConfig([0], [1])
    trace = t_sweep(config, BoundaryTrace.monomial(-1, 4))
    fit = trace.fit()
    slope_ok = abs(fit["slope"] - 0.5) <= 0.05
    theta_ok = abs(fit["theta_hat"] - np.pi) <= 0.1 * np.pi
    return slope_ok and theta_ok, {
        "slope": fit["slope"],
        "theta_hat": fit["theta_hat"],
        "derived_constant": np.pi,
        "four_pi_cubed": FOUR_PI_CUBED,
        "theta_hat_over_four_pi_cubed": fit["theta_hat"] / FOUR_PI_CUBED,
        "rows": trace.rows,
    }


@_timed("4 compatibility gate", 1.0)
def check_compatibility_gate(K=16):
    outcome = {}
    for k in range(-K, K + 1):
        try:
            solve_one_singularity(BoundaryTrace.monomial(k, K), 1.0, 1)
            outcome[k] = True
        except IncompatibleBoundaryData:
            outcome[k] = False
    ok = all(v == (k != -1) for k, v in outcome.items()) and len(outcome) == 2 * K + 1
    return ok, {"solved": [k for k, v in outcome.items() if v], "refused": [k for k, v in outcome.items() if not v]}


@_timed("5 Schoen-Wolfson identities", 10.0)
def check_cones(pairs=((1, 1), (2, 1), (3, 2), (5, 3)), h=1 / 32, apex_radius=0.25):
    details = {}
    ok = True
    for p, q in pairs:
        desc = ConeDescriptor(p, q)
        res = []
        cf_err = an_err = 0.0
        for hh in (h, h / 2):
            grid = DiscGrid(hh)
            imm = sw_cone(desc, grid)
            z = grid.Z[grid.inside]
            cf = desc.conformal_factor(z)
            cf_err = max(cf_err, float(np.max(np.abs(imm.conformal_factor[grid.inside] - cf) / cf)))
            an_err = max(an_err, float(np.max(np.abs(imm.angle[grid.inside] - np.exp(1j * desc.maslov * np.angle(z))))))
            rep = verify_hamiltonian_stationary(imm, desc.g, where=np.abs(grid.Z) > apex_radius)
            res.append(rep[0]["max"])
        ratio = res[0] / res[1] if res[1] > 1e-9 else float("inf")
        first_order = res[0] <= 1e-9 or ratio >= 1.7
        good = cf_err <= 1e-10 and an_err <= 1e-10 and first_order
        ok &= good
        details[f"{p},{q}"] = {
            "maslov": desc.maslov,
            "conformal_factor_rel_error": cf_err,
            "angle_error": an_err,
            "structural_residual": res,
            "refinement_ratio": ratio,
        }
    return ok, details


@_timed("6 optimal Wente audit", 300.0)
def check_wente(n=1000, config=SYMMETRIC_PAIR, h=1 / 128, seed=0):
    auditor = WenteAuditor(config, h)
    reports = auditor.audit(n, seed0=seed)
    violations = [r.seed for r in reports if not r.ok]
    const = auditor.check(WentePair.constants(1.5, -0.7))
    min_rel = min(r.margin / r.rhs for r in reports)
    strict = all(r.margin > 1e-9 * r.rhs for r in reports)
    ok = not violations and abs(const.margin) <= 1e-12 and const.rhs <= 1e-12 and strict
    return ok, {
        "pairs": n,
        "seed": seed,
        "violations": violations,
        "min_relative_margin": min_rel,
        "max_lhs_over_rhs": max(r.lhs / r.rhs for r in reports),
        "constant_pair": {"lhs": const.lhs, "rhs": const.rhs, "margin": const.margin},
        "reports": reports,
    }


@_timed("7 uniqueness of zero-data solutions", 30.0)
def check_uniqueness(config=SYMMETRIC_PAIR, h=1 / 64):
    rep = uniqueness_probe(config, h=h)
    zero = uniqueness_probe(config, ts=(0.0,), h=h, noise=0.0)
    ok = rep.passed and zero.gradient_norms[0.0] == 0.0
    return ok, {"gradient_norms": rep.gradient_norms, "t0_exact_zero": zero.gradient_norms[0.0]}


@_timed("8 two-point coefficient and rank experiment", 300.0)
def check_two_point(config=SYMMETRIC_PAIR, t=0.9, h=1 / 64):
    basis = compatible_basis(config)
    psi = basis[0]
    coefs = []
    for hh in (h, h / 2):
        f = solve_grid(config, psi, t, hh)
        coefs.append(extract_coefficients(f, config, J=2, t=t))
    by_deg = [{d: c.by_degree(d, -1)[0] for d in (1, -1)} for c in coefs]
    diff = abs(by_deg[1][1] - by_deg[1][-1])
    grid_err = max(abs(by_deg[0][d] - by_deg[1][d]) for d in (1, -1))
    tol = max(10 * grid_err, 1e-4)
    rank = rank_experiment(config, basis, t=t, h=h)
    ok = diff <= tol and rank.rank == 1
    return ok, {
        "A_plus_minus_A_minus": diff,
        "grid_error": grid_err,
        "tolerance": tol,
        "A_minus1": {str(d): by_deg[1][d] for d in (1, -1)},
        "rank": rank.rank,
        "singular_values": [float(s) for s in rank.singular_values],
    }


@_timed("9 Maslov windings", 1.0)
def check_maslov(configs=None):
    configs = configs or [
        SYMMETRIC_PAIR,
        SingularityConfig([0.3j, -0.4 + 0.1j, 0.5 - 0.2j], [1, 1, -1]),
        SingularityConfig([0.0], [-1]),
    ]
    details = []
    ok = True
    for cfg in configs:
        pts = cfg.p
        gaps = [min([abs(p - q) for q in pts if q != p] + [1 - abs(p)]) for p in pts]
        local = [maslov_winding(cfg, circle_loop(p, gap / 3)) for p, gap in zip(pts, gaps)]
        outer_r = 0.5 * (1 + max(abs(pts)))
        outer = maslov_winding(cfg, circle_loop(0, outer_r))
        good = local == list(cfg.degrees) and outer == sum(cfg.degrees)
        ok &= good
        details.append({"degrees": list(cfg.degrees), "local": local, "outer": outer})
    return ok, {"configs": details}


@_timed("10 conjugate and immersion", 60.0)
def check_conjugate(h=1 / 64):
    config = SingularityConfig([0], [1])
    psi = BoundaryTrace.from_modes({1: 1.0, 2: 0.5j, -2: 0.25, 3: -0.2}, 4)
    f = solve_grid(config, psi, 0.0, h)
    conj = harmonic_conjugate(f, None)
    rel = abs(conj.energy_u - conj.energy_v) / conj.energy_u
    sol = solve_one_singularity(BoundaryTrace.monomial(1, 2), 1.0, 1)
    defects = []
    for hh in (h / 2, h, h * 2)[::-1]:
        grid = DiscGrid(hh)
        u = ScalarField.from_function(grid, sol)
        cr = harmonic_conjugate(u, config, method="lsq")
        imm = assemble_immersion(u, cr)
        far = (np.abs(grid.Z) > 0.25) & (np.abs(grid.Z) < 0.8)
        rep = {d["channel"]: d["max"] for d in imm.report(far)}
        defects.append(max(rep["conformality"], rep["orthogonality"]))
    ratios = [defects[0] / defects[1], defects[1] / defects[2]]
    ok = rel <= 1e-8 and min(ratios) >= 1.7
    return ok, {
        "energy_u": conj.energy_u,
        "energy_v": conj.energy_v,
        "relative_energy_gap": rel,
        "conformality_defects": defects,
        "refinement_ratios": ratios,
    }


ALL_CHECKS = [
    check_spectral_exactness,
    check_oracle,
    check_blowup,
    check_compatibility_gate,
    check_cones,
    check_wente,
    check_uniqueness,
    check_two_point,
    check_maslov,
    check_conjugate,
]

SUITES = {
    "blowup": [check_spectral_exactness, check_oracle, check_blowup, check_compatibility_gate],
    "cones": [check_cones, check_maslov, check_conjugate],
    "wente": [check_wente],
    "uniqueness": [check_uniqueness],
    "rank": [check_two_point],
}
SUITES["all"] = [c for name in ("blowup", "cones", "wente", "uniqueness", "rank") for c in SUITES[name]]


def run_suite(name, **overrides):
    if name not in SUITES:
        raise KeyError(name)
    return [check(**overrides.get(check.__name__, {})) for check in SUITES[name]]
