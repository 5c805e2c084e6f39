"""Wente-type inequalities and the zero-data uniqueness probe.

The optimal inequality audited here: for ``Delta phi = grad a . grad^perp b``
with ``phi = 0`` on the circle and a balanced admissible configuration,

    |sum_l d_l phi(p_l)| <= 1/(4 pi) int |grad a|^2 + |grad b|^2.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import NoConvergence, UniquenessViolation
from .greens import admissibility_check, green_eval
from .grid import DiscGrid, ScalarField
from .spectral import BoundaryTrace

_FACTOR_CACHE = {}


def _laplacian(grid):
    """Five-point Laplacian on interior nodes with zero values on the ring."""
    key = (grid.h, grid.shape)
    if key in _FACTOR_CACHE:
        return _FACTOR_CACHE[key]
    n = grid.n_unknowns
    idx = grid.index
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.full(n, -4.0)]
    for sh in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = np.roll(idx, (-sh[0], -sh[1]), axis=(0, 1))
        m = (idx >= 0) & (nb >= 0)
        rows.append(idx[m])
        cols.append(nb[m])
        vals.append(np.ones(int(m.sum())))
    L = sparse.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    L = L / grid.h ** 2
    lu = splu(L.tocsc())
    _FACTOR_CACHE[key] = (L, lu)
    return L, lu


def poisson_zero_bc(rhs, tol=1e-10):
    """Solve ``Delta phi = rhs`` with ``phi = 0`` on the circle (first-order cut-cell data).

    ``rhs`` is a :class:`ScalarField`; its interior values are used. The LU
    factorisation is cached per grid so repeated solves are cheap.
    """
    grid = rhs.grid
    L, lu = _laplacian(grid)
    f = rhs.values[grid.inside]
    real = not np.any(np.imag(f))
    f = f.real if real else f
    if real:
        x = lu.solve(f)
    else:
        x = lu.solve(f.real) + 1j * lu.solve(f.imag)
    nf = np.linalg.norm(f)
    res = np.linalg.norm(L @ x - f) / nf if nf > 0 else np.linalg.norm(x)
    if res > tol:
        raise NoConvergence(1, float(res))
    vals = np.full(grid.shape, np.nan + 0j)
    vals[grid.ring] = 0.0
    vals[grid.inside] = x
    return ScalarField(grid, vals)


# ---------------------------------------------------------------------------
# random smooth pairs


@dataclass
class WentePair:
    """Real fields ``a = Re sum_k (alpha_k + beta_k (1 - |z|^2)) z^{(k)}`` and likewise ``b``.

    ``z^{(k)}`` is ``z^k`` for ``k >= 0`` and ``conj(z)^{|k|}`` otherwise, so
    each term is ``r^{|k|} (alpha_k + beta_k (1 - r^2)) e^{ik theta}``.
    Coefficient arrays are indexed ``k + K``.
    """

    a_alpha: np.ndarray
    a_beta: np.ndarray
    b_alpha: np.ndarray
    b_beta: np.ndarray
    seed: int = -1

    @property
    def K(self):
        return (len(self.a_alpha) - 1) // 2

    @classmethod
    def random(cls, seed, K=16, decay=2.0):
        rng = np.random.default_rng(seed)
        w = (1.0 + np.abs(np.arange(-K, K + 1))) ** -decay

        def draw():
            return (rng.standard_normal(2 * K + 1) + 1j * rng.standard_normal(2 * K + 1)) * w

        return cls(draw(), draw(), draw(), draw(), seed)

    @classmethod
    def constants(cls, ca, cb, K=0):
        z = np.zeros(2 * K + 1, complex)
        aa, ba = z.copy(), z.copy()
        aa[K], ba[K] = ca, cb
        return cls(aa, z.copy(), ba, z.copy())

    def scaled(self, s):
        return WentePair(s * self.a_alpha, s * self.a_beta, s * self.b_alpha, s * self.b_beta, self.seed)

    def swapped_equal(self):
        """The pair ``(a, a)``."""
        return WentePair(self.a_alpha, self.a_beta, self.a_alpha, self.a_beta, self.seed)

    @staticmethod
    def _eval(alpha, beta, z):
        K = (len(alpha) - 1) // 2
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        r2 = (z * zb).real
        val = np.zeros(z.shape, complex)
        dz = np.zeros(z.shape, complex)
        dzb = np.zeros(z.shape, complex)
        pz = [np.ones(z.shape, complex)]
        for _ in range(K):
            pz.append(pz[-1] * z)
        pzb = [np.conj(w) for w in pz]
        for k in range(-K, K + 1):
            al, be = alpha[k + K], beta[k + K]
            if al == 0 and be == 0:
                continue
            m = abs(k)
            pw, other = (pz, zb) if k >= 0 else (pzb, z)
            wm = pw[m]
            amp = al + be * (1 - r2)
            val += amp * wm
            # derivative along the power's own variable, then along its conjugate
            own = (amp * m * pw[m - 1] if m > 0 else 0.0) - be * other * wm
            cross = -be * (z if k >= 0 else zb) * wm
            if k >= 0:
                dz += own
                dzb += cross
            else:
                dzb += own
                dz += cross
        fx = (dz + dzb).real
        fy = (1j * (dz - dzb)).real
        return val.real, fx, fy

    def a(self, z):
        return self._eval(self.a_alpha, self.a_beta, z)

    def b(self, z):
        return self._eval(self.b_alpha, self.b_beta, z)

    def jacobian(self, z):
        """``grad a . grad^perp b = a_y b_x - a_x b_y``."""
        _, ax, ay = self.a(z)
        _, bx, by = self.b(z)
        return ay * bx - ax * by

    def energy(self, n_r=48, n_theta=None):
        """``int |grad a|^2 + |grad b|^2`` by Gauss--Legendre in ``r`` and trapezoid in ``theta``.

        The integrand is a polynomial in ``(x, y)``, so the rule is exact once
        ``n_r`` and ``n_theta`` exceed its degree.
        """
        n_theta = n_theta or 4 * self.K + 16
        x, w = np.polynomial.legendre.leggauss(n_r)
        r = 0.5 * (x + 1)
        wr = 0.5 * w * r
        th = 2 * np.pi * np.arange(n_theta) / n_theta
        z = np.outer(r, np.exp(1j * th))
        _, ax, ay = self.a(z)
        _, bx, by = self.b(z)
        dens = ax ** 2 + ay ** 2 + bx ** 2 + by ** 2
        return float(np.sum(wr[:, None] * dens) * 2 * np.pi / n_theta)


# ---------------------------------------------------------------------------
# the optimal inequality


@dataclass
class MarginReport:
    seed: int
    lhs: float
    rhs: float
    margin: float
    green_route: float = float("nan")

    @property
    def ok(self):
        return self.margin >= -1e-9 * self.rhs

    def as_row(self):
        return {"seed": self.seed, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin}


class WenteAuditor:
    """Reusable grid, factorisation and admissibility verdict for one configuration."""

    def __init__(self, config, h=1 / 128, admissibility_resolution=1 / 256, report=None):
        if not config.balanced:
            raise ValueError("the optimal Wente inequality needs a balanced configuration")
        report = report or admissibility_check(config, admissibility_resolution)
        if not report.admissible:
            raise ValueError(f"configuration is {report.verdict}; refusing to audit")
        self.config = config
        self.report = report
        self.grid = DiscGrid(h, config.points)
        _laplacian(self.grid)
        g = self.grid
        self._z = g.Z[g.inside]
        self._G = green_eval(config, self._z)

    def check(self, pair):
        g = self.grid
        vals = np.zeros(g.shape, complex)
        vals[g.inside] = pair.jacobian(self._z)
        phi = poisson_zero_bc(ScalarField(g, vals))
        at = phi.at(np.array(self.config.points))
        lhs = float(abs(np.sum(np.array(self.config.degrees) * at.real)))
        rhs = pair.energy() / (4 * np.pi)
        # sum d_l phi(p_l) = (1/2pi) int G Delta phi, evaluated by the node rule
        green = float(abs(np.sum(self._G * vals[g.inside].real) * g.h ** 2 / (2 * np.pi)))
        return MarginReport(pair.seed, lhs, rhs, rhs - lhs, green)

    def audit(self, n=1000, seed0=0, K=16):
        return [self.check(WentePair.random(seed0 + s, K)) for s in range(n)]


def check_optimal_wente(pair, config, h=1 / 128, auditor=None):
    """Margin ``1/(4 pi) int |grad a|^2 + |grad b|^2 - |sum d_l phi(p_l)|``."""
    auditor = auditor or WenteAuditor(config, h)
    return auditor.check(pair)


def margins_to_csv(reports):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["seed", "lhs", "rhs", "margin"], lineterminator="\n")
    w.writeheader()
    for r in sorted(reports, key=lambda r: r.seed):
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.as_row().items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# the L^infty estimate


def jacobian_form(field):
    """``<i grad u, grad^perp u> = -2 Im(u_y conj(u_x))`` at interior nodes."""
    ux, uy = field.gradient()
    out = np.zeros(field.grid.shape)
    ins = field.grid.inside
    out[ins] = -2 * np.imag(uy[ins] * np.conj(ux[ins]))
    return out


@dataclass
class LinfReport:
    sup_b: float
    bound: float
    b: ScalarField = field(repr=False)

    @property
    def margin(self):
        return self.bound - self.sup_b


def check_linf_wente(u):
    """Solve ``Delta b = <i grad u, grad^perp u>``, ``b = 0`` on the circle, and compare
    ``||b||_inf`` with ``1/(2 pi) int |grad u|^2``."""
    grid = u.grid
    rhs = ScalarField(grid, jacobian_form(u).astype(complex))
    b = poisson_zero_bc(rhs)
    sup = float(np.max(np.abs(b.values[grid.inside]))) if grid.n_unknowns else 0.0
    bound = 2 * u.dirichlet() / (2 * np.pi)
    return LinfReport(sup, bound, b)


def green_pairing(u, config):
    """Two evaluations of ``int G <i grad u, grad^perp u>``.

    Returns ``(direct, via_b)``: the node quadrature of the integrand and
    ``2 pi sum d_l b(p_l)`` with ``b`` from :func:`check_linf_wente`.
    """
    grid = u.grid
    J = jacobian_form(u)
    G = green_eval(config, grid.Z[grid.inside])
    direct = float(np.sum(G * J[grid.inside]) * grid.h ** 2)
    b = check_linf_wente(u).b
    via = float(2 * np.pi * np.sum(np.array(config.degrees) * b.at(np.array(config.points)).real))
    return direct, via


# ---------------------------------------------------------------------------
# uniqueness


@dataclass
class UniquenessReport:
    h: float
    noise: float
    gradient_norms: dict

    @property
    def passed(self):
        return all(v <= 1e-9 for v in self.gradient_norms.values())


def uniqueness_probe(config, ts=(0.5, 0.9, 0.99), h=1 / 64, noise=1e-13, seed=0, K=4):
    """Zero boundary data plus ``noise`` on the ring; the solution must stay at noise level."""
    from .variational import assemble_el_system, boundary_rhs, solve_el

    grid = DiscGrid(h, config.points)
    rng = np.random.default_rng(seed)
    out = {}
    for t in ts:
        system = assemble_el_system(grid, config, t, BoundaryTrace.zero(K))
        if noise:
            ring = grid.ring.ravel()
            pert = noise * (rng.standard_normal(int(ring.sum())) + 1j * rng.standard_normal(int(ring.sum())))
            bv = system.boundary_values.copy()
            bv[ring] = pert
            # rebuild the right-hand side for the perturbed ring data
            system.boundary_values = bv
            system.rhs = boundary_rhs(grid, system.edges, system.betas, t, bv)
        f = solve_el(system)
        norm = float(np.sqrt(2 * f.dirichlet()))
        out[float(t)] = norm
        if norm > 1e-9:
            raise UniquenessViolation(f"zero data produced |grad u| = {norm:.3e} at t = {t}")
    return UniquenessReport(h, noise, out)

