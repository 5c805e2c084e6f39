"""Discretisations of the perturbed functional and the experiments built on them.

The functional is

    L_t(u) = 1/2 int |grad u|^2 + t/2 int G <i grad u, grad^perp u>,

and since ``int G <i grad u, grad^perp u> = -Re int conj(u) i grad^perp G . grad u``
(``G`` vanishes on the circle) its grid version is a Hermitian quadratic form
over grid edges::

    dirichlet_h = 1/2 sum_edges |u_b - u_a|^2
    coupling_h  = h/2 sum_edges beta_ab Im(conj(u_a) u_b)

with ``beta_ab`` the component of the analytic ``grad^perp G`` at the edge
midpoint along ``a -> b``. The Euler--Lagrange rows are

    sum_b (u_a - u_b) - t h/2 i sum_b beta_ab u_b = 0,

a consistent first-order discretisation of ``-Delta u = t i grad^perp G . grad u``.

For one singular point the functional separates in Fourier modes and in the
variable ``s = log r``; :func:`solve_polar` discretises each mode with P1
elements in ``s``, which resolves the ``t -> 1`` boundary layer that no
Cartesian grid can.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, ndimage, sparse
from scipy.sparse.linalg import splu
from skimage import measure

from .errors import ContourCrossesZeroSet, NoConvergence, SingularityOnNode, TooCoarse
from .greens import (
    SingularityConfig,
    boundary_integral,
    component_boundaries,
    green_eval,
    green_gradient,
    green_perp_gradient,
    maslov_winding,
    mobius,
    mobius_inverse,
    nonzero_components,
    sone_eval,
)
from .grid import DiscGrid, ScalarField
from .spectral import BoundaryTrace, compatibility_integral, mode_exponent

RESIDUAL_TOL = 1e-10


# ---------------------------------------------------------------------------
# Cartesian Euler--Lagrange system


def _edge_list(grid):
    """Edges ``a -> b`` (flat node indices) in +x and +y direction touching an interior node."""
    shape = grid.shape
    flat = np.arange(grid.Z.size).reshape(shape)
    out = []
    for axis in (0, 1):
        if axis == 0:
            a, b = flat[:-1, :], flat[1:, :]
        else:
            a, b = flat[:, :-1], flat[:, 1:]
        ia, ib = grid.inside.ravel()[a], grid.inside.ravel()[b]
        aa, ab = grid.active.ravel()[a], grid.active.ravel()[b]
        m = (ia | ib) & aa & ab
        out.append((a[m], b[m], axis))
    return out


@dataclass
class ELSystem:
    grid: DiscGrid
    config: SingularityConfig
    t: float
    psi: BoundaryTrace
    matrix: sparse.csc_matrix
    rhs: np.ndarray
    boundary_values: np.ndarray = field(repr=False)
    edges: list = field(repr=False)
    betas: list = field(repr=False)

    def apply(self, u_interior):
        return self.matrix @ u_interior - self.rhs


def edge_betas(grid, config, edges):
    """Edge averages of ``grad^perp G`` along the edge direction.

    ``grad^perp G`` is the gradient of the harmonic conjugate
    ``H = sum d_l arg phi_{p_l}`` (so that ``g = e^{iH}``); its exact average
    over an edge is the increment of ``H`` divided by ``h``. Unlike a midpoint
    value this stays bounded by ``N pi / h`` however close a singular point
    comes to the edge.
    """
    z = grid.Z.ravel()
    out = []
    for a, b, _ in edges:
        inc = np.zeros(a.shape)
        for p, d in zip(config.points, config.degrees):
            inc += d * np.angle(mobius(z[b], p) / mobius(z[a], p))
        out.append(inc / grid.h)
    return out


def _check_placement(grid, config):
    h = grid.h
    pts = config.p
    for a in range(pts.size):
        for b in range(a + 1, pts.size):
            if abs(pts[a] - pts[b]) < 8 * h:
                raise TooCoarse(f"singular points {pts[a]} and {pts[b]} are closer than 8h")
    for p in pts:
        fx = p.real / h - 0.5
        fy = p.imag / h - 0.5
        on_x = abs(fx - np.rint(fx)) < 1e-9
        on_y = abs(fy - np.rint(fy)) < 1e-9
        if on_x or on_y:
            raise SingularityOnNode(f"singular point {p} lies on a grid line")


def assemble_el_system(grid, config, t, psi):
    """Sparse Hermitian system for the grid Euler--Lagrange equation at ``t < 1``."""
    if not 0 <= t < 1:
        raise ValueError(f"the grid system needs 0 <= t < 1, got {t}")
    if 2 * psi.K > np.pi / grid.h:
        raise TooCoarse(f"trace degree {psi.K} exceeds the grid Nyquist limit")
    _check_placement(grid, config)
    n = grid.n_unknowns
    idx = grid.index.ravel()
    full = np.zeros(grid.Z.size, dtype=complex)
    full[grid.ring.ravel()] = grid.ring_values(psi)
    edges = _edge_list(grid)
    betas = edge_betas(grid, config, edges)
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    c = 0.5 * t * grid.h
    for (a, b, _), beta in zip(edges, betas):
        for src, dst, sgn in ((a, b, 1.0), (b, a, -1.0)):
            ia, ib = idx[src], idx[dst]
            row = ia >= 0
            off = -1.0 - 1j * c * sgn * beta
            np.add.at(diag, ia[row], 1.0)
            inner = row & (ib >= 0)
            rows.append(ia[inner])
            cols.append(ib[inner])
            vals.append(off[inner])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag.astype(complex))
    A = sparse.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    rhs = boundary_rhs(grid, edges, betas, t, full)
    return ELSystem(grid, config, float(t), psi, A, rhs, full, edges, betas)


def boundary_rhs(grid, edges, betas, t, boundary_values):
    """Right-hand side carrying the ring values into the interior rows."""
    idx = grid.index.ravel()
    rhs = np.zeros(grid.n_unknowns, complex)
    c = 0.5 * t * grid.h
    for (a, b, _), beta in zip(edges, betas):
        for src, dst, sgn in ((a, b, 1.0), (b, a, -1.0)):
            ia, ib = idx[src], idx[dst]
            bnd = (ia >= 0) & (ib < 0)
            off = -1.0 - 1j * c * sgn * beta[bnd]
            np.add.at(rhs, ia[bnd], -off * boundary_values[dst[bnd]])
    return rhs


def solve_el(system, method="direct", tol=RESIDUAL_TOL, maxiter=20000):
    """Solve the grid system; the residual is audited at relative level ``tol``.

    ``method="direct"`` uses a sparse LU factorisation, ``"cg"`` conjugate
    gradients (the matrix is Hermitian).
    """
    A, f = system.matrix, system.rhs
    if method == "direct":
        x = splu(A).solve(f)
        iters = 1
    elif method == "cg":
        from scipy.sparse.linalg import cg

        count = [0]
        x, info = cg(A, f, rtol=tol * 0.1, maxiter=maxiter, callback=lambda _: count.__setitem__(0, count[0] + 1))
        iters = count[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = max(np.linalg.norm(f), np.linalg.norm(A @ x), 1e-300)
    res = np.linalg.norm(A @ x - f) / scale if np.linalg.norm(f) > 0 else np.linalg.norm(A @ x)
    if not np.isfinite(res) or res > tol:
        raise NoConvergence(iters, float(res))
    grid = system.grid
    vals = np.full(grid.Z.size, np.nan + 0j)
    vals[grid.ring.ravel()] = system.boundary_values[grid.ring.ravel()]
    vals[grid.inside.ravel()] = x
    return ScalarField(grid, vals.reshape(grid.shape))


def solve_grid(config, psi, t, h):
    grid = DiscGrid(h, config.points)
    return solve_el(assemble_el_system(grid, config, t, psi))


def discrete_energies(field, config, t=0.0):
    """``(dirichlet, coupling, total)`` of a grid field as sums over edges."""
    grid = field.grid
    edges = _edge_list(grid)
    betas = edge_betas(grid, config, edges)
    u = field.values.ravel()
    dir_ = 0.0
    coup = 0.0
    for (a, b, _), beta in zip(edges, betas):
        dir_ += 0.5 * np.sum(np.abs(u[b] - u[a]) ** 2)
        coup += 0.5 * grid.h * np.sum(beta * np.imag(np.conj(u[a]) * u[b]))
    return float(dir_), float(coup), float(dir_ + t * coup)


# ---------------------------------------------------------------------------
# one singular point: log-radial Galerkin solver


def _pullback_trace(psi, p, n=4096, tol=1e-15):
    """Fourier coefficients of ``psi o phi_p^{-1}`` on the circle."""
    if p == 0:
        return psi
    theta = 2 * np.pi * np.arange(n) / n
    z = mobius_inverse(np.exp(1j * theta), p)
    f = np.fft.fft(psi(np.angle(z))) / n
    mag = np.abs(f)
    big = mag > tol * max(mag.max(), 1e-300)
    k = np.fft.fftfreq(n, 1.0 / n).astype(int)
    K = int(np.max(np.abs(k[big]))) if big.any() else 0
    K = min(K, n // 2 - 1)
    return BoundaryTrace(f[np.arange(-K, K + 1) % n])


@dataclass
class PolarMode:
    k: int
    amplitude: complex
    s: np.ndarray
    Y: np.ndarray  # real profile with Y(0) = 1

    def integrals(self):
        """``(int Y'^2 ds, int Y^2 ds)`` exactly for the P1 profile."""
        ds = np.diff(self.s)
        dY = np.diff(self.Y)
        i1 = float(np.sum(dY ** 2 / ds))
        i0 = float(np.sum(ds * (self.Y[:-1] ** 2 + self.Y[:-1] * self.Y[1:] + self.Y[1:] ** 2) / 3))
        return i1, i0


@dataclass
class PolarSolution:
    """Per-mode log-radial solution for one singular point (moved to the origin)."""

    config: SingularityConfig
    t: float
    modes: list

    @property
    def degree(self):
        return self.config.degrees[0]

    def energies(self):
        dir_ = coup = 0.0
        s = self.degree
        for m in self.modes:
            i1, i0 = m.integrals()
            A2 = abs(m.amplitude) ** 2
            dir_ += np.pi * A2 * (i1 + m.k ** 2 * i0)
            coup += np.pi * A2 * s * m.k * i0
        return float(dir_), float(coup), float(dir_ + self.t * coup)

    def gradient_samples(self, n_theta=64, n_s=4000):
        """``|grad u|`` on a log-polar sample with area weights (for distribution functions)."""
        live = [m for m in self.modes if m.amplitude != 0 and m.k != 0]
        if not live:
            return np.zeros(1), np.ones(1)
        smin = max(min(m.s[0] for m in live), -700.0)
        s = -np.geomspace(-smin, 1e-6, n_s)
        s = np.append(s, 0.0)
        th = 2 * np.pi * np.arange(n_theta) / n_theta
        ur = np.zeros((s.size, n_theta), complex)
        ut = np.zeros((s.size, n_theta), complex)
        for m in live:
            Y = np.interp(s, m.s, m.Y, left=0.0)
            dY = np.interp(s, 0.5 * (m.s[1:] + m.s[:-1]), np.diff(m.Y) / np.diff(m.s), left=0.0)
            e = np.exp(1j * m.k * th)
            ur += m.amplitude * np.outer(dY, e)
            ut += m.amplitude * np.outer(1j * m.k * Y, e)
        r = np.exp(s)
        mag = np.sqrt(np.abs(ur) ** 2 + np.abs(ut) ** 2) / r[:, None]
        ds = np.gradient(s)
        w = np.outer(r ** 2 * ds, np.full(n_theta, 2 * np.pi / n_theta))
        return mag.ravel(), w.ravel()


def _solve_mode(k, t, degree, n_el=4000, s_max=1e6):
    c = k * k + degree * t * k
    a = np.sqrt(max(c, 0.0))
    S = min(30.0 / a, s_max) if a > 0 else 1.0
    s = np.linspace(-S, 0.0, n_el + 1)
    ds = S / n_el
    if c == 0:
        return s, np.ones_like(s)
    # P1 stiffness + c * mass; unknowns are nodes 0..n_el-1, Y(0) = 1
    main = np.full(n_el + 1, 2 / ds + c * 4 * ds / 6)
    main[0] = main[-1] = 1 / ds + c * 2 * ds / 6
    off = np.full(n_el, -1 / ds + c * ds / 6)
    ab = np.zeros((3, n_el))
    ab[0, 1:] = off[:-1]
    ab[1] = main[:-1]
    ab[2, :-1] = off[:-1]
    rhs = np.zeros(n_el)
    rhs[-1] = -off[-1]
    Y = np.append(linalg.solve_banded((1, 1), ab, rhs), 1.0)
    return s, Y


def solve_polar(config, psi, t, n_el=4000):
    """Galerkin solution of ``L_t`` for one singular point, mode by mode in ``s = log r``.

    A point ``p != 0`` is moved to the origin by the disc automorphism; the
    functional is conformally invariant, so energies are unchanged.
    """
    if config.n != 1:
        raise ValueError("the log-radial solver handles exactly one singular point")
    if not 0 <= t < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    trace = _pullback_trace(psi, config.points[0])
    modes = []
    for k, A in zip(trace.modes, trace.coeffs):
        if A == 0:
            continue
        s, Y = _solve_mode(int(k), t, config.degrees[0], n_el)
        modes.append(PolarMode(int(k), complex(A), s, Y))
    return PolarSolution(config, float(t), modes)


# ---------------------------------------------------------------------------
# L^{2,infty}


def l2inf_from_samples(magnitudes, weights):
    """``sup_lambda lambda |{f > lambda}|^{1/2}`` for a weighted sample of ``f >= 0``."""
    m = np.asarray(magnitudes, float).ravel()
    w = np.broadcast_to(np.asarray(weights, float), m.shape).ravel()
    order = np.argsort(-m, kind="stable")
    m, w = m[order], w[order]
    above = np.concatenate([[0.0], np.cumsum(w)[:-1]])
    # strict inequality: exclude ties with the current value
    first = np.searchsorted(-m, -m, side="left")
    above = above[first]
    return float(np.max(m * np.sqrt(above))) if m.size else 0.0


def l2inf_quasinorm(field):
    """Weak-L^2 quasi-norm of the centred-difference gradient at interior nodes."""
    ux, uy = field.gradient()
    inside = field.grid.inside
    mag = np.sqrt(np.abs(ux[inside]) ** 2 + np.abs(uy[inside]) ** 2)
    mag = np.nan_to_num(mag)
    return l2inf_from_samples(mag, field.grid.h ** 2)


# ---------------------------------------------------------------------------
# continuation in t


def default_schedule(kmax=8):
    return [1 - 4.0 ** -k for k in range(1, kmax + 1)]


@dataclass
class EnergyTrace:
    rows: list
    window: int = 4

    def fit(self):
        """Slope of ``log int|grad u|^2`` against ``log 1/(1-t)`` over the last rows."""
        rows = self.rows[-self.window:] if len(self.rows) >= 2 else self.rows
        t = np.array([r["t"] for r in rows])
        e = np.array([2 * r["dirichlet"] for r in rows])
        if len(rows) < 2 or np.any(e <= 0):
            slope = 0.0
        else:
            slope = float(np.polyfit(np.log(1 / (1 - t)), np.log(e), 1)[0])
        theta = float(2 * rows[-1]["dirichlet"] * np.sqrt(1 - rows[-1]["t"])) if rows else 0.0
        return {"slope": slope, "theta_hat": theta, "window": [float(x) for x in t]}

    @property
    def slope(self):
        return self.fit()["slope"]

    @property
    def theta_hat(self):
        return self.fit()["theta_hat"]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "dirichlet", "coupling", "total", "l2inf"])
        for r in self.rows:
            w.writerow([repr(float(r[k])) for k in ("t", "dirichlet", "coupling", "total", "l2inf")])
        return buf.getvalue()


def t_sweep(config, psi, schedule=None, h=1 / 64, method="auto", window=4):
    """One solve per ``t``; energies, weak-L^2 norm, and the blow-up fit.

    ``method="auto"`` uses :func:`solve_polar` for a single singular point and
    the Cartesian grid otherwise.
    """
    schedule = default_schedule() if schedule is None else list(schedule)
    if not schedule:
        raise ValueError("empty t schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 0 or schedule[-1] >= 1:
        raise ValueError("schedule must be strictly increasing inside [0, 1)")
    if method == "auto":
        method = "polar" if config.n == 1 else "grid"
    rows = []
    grid = DiscGrid(h, config.points) if method == "grid" else None
    for t in schedule:
        if method == "polar":
            sol = solve_polar(config, psi, t)
            d, c, tot = sol.energies()
            l2 = l2inf_from_samples(*sol.gradient_samples())
        else:
            f = solve_el(assemble_el_system(grid, config, t, psi))
            d, c, tot = discrete_energies(f, config, t)
            l2 = l2inf_quasinorm(f)
        rows.append({"t": float(t), "dirichlet": d, "coupling": c, "total": tot, "l2inf": l2})
    return EnergyTrace(rows, window)


# ---------------------------------------------------------------------------
# coefficients on the components of {G != 0}


@dataclass
class ComponentCoefficients:
    """``A^omega_j`` for every component; ``coefficients[label][j]``."""

    t: float
    epsilon: dict
    degrees: dict
    coefficients: dict
    contours: dict = field(repr=False, default_factory=dict)

    def get(self, label, j):
        return self.coefficients[label][j]

    def by_degree(self, d, j):
        return [self.coefficients[l][j] for l, dd in self.degrees.items() if dd == d]


def _signed_area(z):
    return 0.5 * np.sum((z.real[:-1] * z.imag[1:] - z.real[1:] * z.imag[:-1]))


def _choose_epsilon(config, grid, comp, G, margin=3.0):
    """Level between the zero set and the singular point, both kept ``margin*h`` away."""
    h = grid.h
    p = config.points[comp.singularities[0]]
    dist = ndimage.distance_transform_edt(comp.mask) * h
    near_zero = np.abs(G[comp.mask & (dist <= margin * h + 0.5 * h)])
    lo = float(near_zero.max()) if near_zero.size else 0.0
    ring = p + margin * h * np.exp(2j * np.pi * np.arange(64) / 64)
    hi = float(np.min(np.abs(green_eval(config, ring))))
    if hi <= lo:
        raise ContourCrossesZeroSet("component too thin for a contour 3h from both the zero set and the singular point")
    return 0.5 * (lo + hi)


def _level_contour(config, grid, comp, G, eps):
    p = config.points[comp.singularities[0]]
    field_ = np.where(comp.mask, np.abs(G), -1.0)
    for c in measure.find_contours(field_, eps):
        z = grid.x[0] + grid.h * c[:, 0] + 1j * (grid.x[0] + grid.h * c[:, 1])
        if abs(z[0] - z[-1]) > 1e-9 or len(z) < 8:
            continue
        try:
            w = maslov_winding(SingularityConfig([p], [1]), z, min_distance=grid.h)
        except Exception:
            continue
        if w != 0:
            return z if _signed_area(z) > 0 else z[::-1]
    raise ContourCrossesZeroSet(f"no closed level curve |G| = {eps:.4g} around {p}")


def extract_coefficients(field, config, J=4, t=None, epsilon=None):
    """Contour quadrature ``A^w_j = d_w e^{a_j eps} (2 pi i)^{-1} oint u g^{-j-1} dg``.

    ``u`` is interpolated bilinearly on the level curve ``|G| = eps`` of each
    component; ``a_j = sqrt(j^2 + t j)``.
    """
    grid = field.grid
    t = 0.0 if t is None else t
    G = np.zeros(grid.shape)
    G[grid.inside] = green_eval(config, grid.Z[grid.inside])
    _, comps = nonzero_components(config, grid)
    interp = grid.interpolator(np.nan_to_num(field.values))
    eps_out, deg_out, coef_out, cont_out = {}, {}, {}, {}
    for comp in comps:
        if len(comp.singularities) != 1:
            continue
        eps = _choose_epsilon(config, grid, comp, G) if epsilon is None else epsilon
        z = _level_contour(config, grid, comp, G, eps)
        pdist = np.min(np.abs(z - config.points[comp.singularities[0]]))
        if pdist < 3 * grid.h * 0.999:
            raise ContourCrossesZeroSet("contour within 3h of the singular point")
        d = comp.degree
        gz = sone_eval(config, z)
        mid = 0.5 * (z[1:] + z[:-1])
        um = interp(mid)
        gm = sone_eval(config, mid)
        # dg = i g dH with the exact phase increment, so oint g^{-1} dg = 2 pi i
        dg = 1j * gm * np.angle(gz[1:] / gz[:-1])
        coefs = {}
        for j in range(-J, J + 1):
            a = mode_exponent(j, t, 1)
            val = np.sum(um * gm ** (-j - 1) * dg) / (2j * np.pi)
            coefs[j] = complex(d * np.exp(a * eps) * val)
        eps_out[comp.label] = float(eps)
        deg_out[comp.label] = d
        coef_out[comp.label] = coefs
        cont_out[comp.label] = z
    return ComponentCoefficients(float(t), eps_out, deg_out, coef_out, cont_out)


def boundary_coefficient(field, config, psi, labels=None):
    """``d_w (2 pi i)^{-1} oint_{d omega} u dg`` for every component (the ``eps -> 0`` route)."""
    grid = field.grid
    labels_arr, comps = nonzero_components(config, grid)
    pieces = component_boundaries(config, grid, labels_arr)
    interp = grid.interpolator(np.nan_to_num(field.values))
    out = {}
    for comp in comps:
        val = boundary_integral(config, pieces[comp.label], interp, on_circle=psi)
        out[comp.label] = complex(comp.degree * val / (2j * np.pi)) if comp.degree else complex(val)
    return out


# ---------------------------------------------------------------------------
# rank experiment


def compatible_basis(config, modes=(1, -1, 2, -2, 3, -3), K=None, n=2048):
    """Monomials ``e^{ik theta}`` projected onto ``{oint psi dg = 0}``.

    The correction uses the monomial with the largest ``|oint . dg|`` among a
    small pool; traces already compatible are left unchanged.
    """
    K = K or max(abs(k) for k in modes) + 2
    pool = [BoundaryTrace.monomial(k, K) for k in range(-K, K + 1)]
    ints = [compatibility_integral(z, config, n) for z in pool]
    best = int(np.argmax(np.abs(ints)))
    zeta, zint = pool[best], ints[best]
    out = []
    for k in modes:
        psi = BoundaryTrace.monomial(k, K)
        c = compatibility_integral(psi, config, n)
        if abs(zint) > 1e-12 and abs(c) > 1e-14:
            psi = psi + zeta * (-c / zint)
        out.append(psi)
    return out


@dataclass
class RankReport:
    matrix: np.ndarray
    singular_values: np.ndarray
    rank: int
    threshold: float
    labels: list

    def to_dict(self):
        return {
            "singular_values": [float(s) for s in self.singular_values],
            "rank": int(self.rank),
            "threshold": float(self.threshold),
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def rank_experiment(config, basis, t=0.9, h=1 / 64, rtol=1e-6, atol=1e-9):
    """Numerical rank of ``M[i][b] = oint_{d omega_i} u_b dg`` over solved fields ``u_b``.

    The rank counts singular values above ``max(rtol * sigma_max, atol)``; the
    absolute floor keeps round-off from counting as rank.
    """
    grid = DiscGrid(h, config.points)
    labels_arr, comps = nonzero_components(config, grid)
    pieces = component_boundaries(config, grid, labels_arr)
    comps = [c for c in comps if pieces.get(c.label)]
    M = np.zeros((len(comps), len(basis)), dtype=complex)
    for b, psi in enumerate(basis):
        if not np.any(psi.coeffs):
            continue
        f = solve_el(assemble_el_system(grid, config, t, psi))
        interp = grid.interpolator(np.nan_to_num(f.values))
        for i, c in enumerate(comps):
            M[i, b] = boundary_integral(config, pieces[c.label], interp, on_circle=psi)
    sv = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    smax = float(sv[0]) if sv.size else 0.0
    thr = max(rtol * smax, atol)
    rank = int(np.sum(sv > thr))
    return RankReport(M, sv, rank, thr, [c.label for c in comps])
