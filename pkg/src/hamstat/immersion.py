"""Conformal Lagrangian immersions ``Phi = (u, conj v)`` and Schoen--Wolfson cones.

The weighted harmonic conjugate solves ``grad^perp v = g grad u``, i.e.
``v_x = g u_y`` and ``v_y = -g u_x``. It exists exactly when
``div(g grad u) = 0``; on the grid it is integrated along the dual graph
(cell corners), where the circulation around the dual cell of a node equals
the flux-form divergence ``sum_e g_e (u_b - u_a)`` at that node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import spsolve

from .errors import DegenerateMetric, PathDependence
from .greens import sone_eval, sone_gradient
from .grid import DiscGrid, ScalarField


def _as_g(g):
    """Normalise ``g`` to a callable: ``None`` means ``g = 1``; configs use their S^1 map."""
    if g is None:
        return lambda z: np.ones(np.shape(z), complex)
    if callable(g):
        return g
    return lambda z: sone_eval(g, z)


# ---------------------------------------------------------------------------
# harmonic conjugate


@dataclass
class ConjugateResult:
    v: ScalarField
    corner_values: np.ndarray = field(repr=False)
    loop_residue: float
    divergence_residual: float
    edge_mismatch: float
    energy_u: float
    energy_v: float


def _divergence(u, gfun):
    """Flux-form ``sum_e g_e (u_b - u_a)`` at interior nodes (not divided by ``h^2``)."""
    grid = u.grid
    val = u.values
    Z = grid.Z
    out = np.zeros(grid.shape, complex)
    for axis in (0, 1):
        for sh in (1, -1):
            nb = np.roll(val, -sh, axis=axis)
            mid = Z + (0.5 * sh * grid.h if axis == 0 else 0.5j * sh * grid.h)
            ins = grid.inside
            out[ins] += gfun(mid[ins]) * (nb[ins] - val[ins])
    return out


def harmonic_conjugate(u, g=None, anchor=1.0, check=True, method="tree"):
    """Integrate ``grad^perp v = g grad u`` along a spanning tree of the dual graph.

    Parameters
    ----------
    u : ScalarField
    g : callable, SingularityConfig or None
        The S^1 weight; ``None`` gives the classical conjugate.
    anchor : complex
        ``v`` vanishes at the dual node nearest to this point.
    method : {"tree", "lsq"}
        ``"tree"`` integrates along a breadth-first spanning tree, so every
        non-tree edge carries the residues it encloses. ``"lsq"`` instead fits
        ``v`` to all increments in the least-squares sense, which spreads the
        residues of a field that is only approximately a solution.

    Returns
    -------
    ConjugateResult
        ``loop_residue`` is the largest circulation of the prescribed
        increments around an elementary dual cell, ``divergence_residual`` the
        largest flux-form divergence computed from the primal stencil. They
        agree for any field; ``PathDependence`` is raised when they do not.
    """
    gfun = _as_g(g)
    grid = u.grid
    h = grid.h
    nx = grid.shape[0]
    # corner (dual) node (i, j) sits at x[i] + h/2, x[j] + h/2 ; index i*nx + j
    cid = lambda i, j: i * nx + j
    rows, cols, incs = [], [], []
    val = u.values
    ins, act = grid.inside, grid.active
    I, J = np.meshgrid(np.arange(nx), np.arange(nx), indexing="ij")
    # primal x-edge (i,j)->(i+1,j); crossed by the dual edge from corner (i, j-1) (below) to (i, j) (above)
    m = (ins[:-1, :] | ins[1:, :]) & act[:-1, :] & act[1:, :]
    m[:, 0] = False
    i, j = I[:-1, :][m], J[:-1, :][m]
    ge = gfun(grid.Z[i, j] + 0.5 * h)
    rows.append(cid(i, j - 1))
    cols.append(cid(i, j))
    incs.append(-ge * (val[i + 1, j] - val[i, j]))
    # primal y-edge (i,j)->(i,j+1); crossed by the dual edge from corner (i-1, j) (left) to (i, j) (right)
    m = (ins[:, :-1] | ins[:, 1:]) & act[:, :-1] & act[:, 1:]
    m[0, :] = False
    i, j = I[:, :-1][m], J[:, :-1][m]
    ge = gfun(grid.Z[i, j] + 0.5j * h)
    rows.append(cid(i - 1, j))
    cols.append(cid(i, j))
    incs.append(ge * (val[i, j + 1] - val[i, j]))
    src = np.concatenate(rows)
    dst = np.concatenate(cols)
    inc = np.concatenate(incs)
    nodes = np.unique(np.concatenate([src, dst]))
    # tree integration from the anchor corner
    cx = grid.x[nodes // nx] + 0.5 * h
    cy = grid.x[nodes % nx] + 0.5 * h
    root = nodes[np.argmin(np.abs(cx + 1j * cy - anchor))]
    N = nx * nx
    key = dict(zip(zip(src.tolist(), dst.tolist()), inc.tolist()))
    A = sparse.csr_matrix((np.ones(2 * src.size), (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(N, N))
    order, pred = csgraph.breadth_first_order(A, root, directed=True, return_predecessors=True)
    corner = np.full(N, np.nan + 0j)
    corner[root] = 0.0
    if method == "tree":
        for node in order[1:].tolist():
            par = int(pred[node])
            step = key.get((par, node))
            corner[node] = corner[par] + (step if step is not None else -key[(node, par)])
    elif method == "lsq":
        reach = order
        pos = -np.ones(N, dtype=np.int64)
        pos[reach] = np.arange(reach.size)
        ne = src.size
        D = sparse.csr_matrix(
            (np.concatenate([np.ones(ne), -np.ones(ne)]), (np.tile(np.arange(ne), 2), np.concatenate([pos[dst], pos[src]]))),
            shape=(ne, reach.size),
        )
        keep = np.arange(reach.size) != pos[root]
        Dk = D[:, keep]
        sol = spsolve((Dk.T @ Dk).tocsc(), Dk.T @ inc)
        vals_ = np.zeros(reach.size, complex)
        vals_[keep] = sol
        corner[reach] = vals_
    else:
        raise ValueError(f"unknown method {method!r}")
    mismatch = np.abs(corner[dst] - corner[src] - inc)
    edge_mismatch = float(np.nanmax(mismatch)) if mismatch.size else 0.0
    # circulation around the dual cell of interior node (i, j): corners (i-1,j-1),(i,j-1),(i,j),(i-1,j)
    ii, jj = np.nonzero(ins)
    res = np.empty(ii.size, complex)
    for n_, (i, j) in enumerate(zip(ii.tolist(), jj.tolist())):
        a, b, c, d = cid(i - 1, j - 1), cid(i, j - 1), cid(i, j), cid(i - 1, j)
        # counter-clockwise: a->b (right), b->c (up), c->d (left), d->a (down)
        res[n_] = key[(a, b)] + key[(b, c)] - key[(d, c)] - key[(a, d)]
    loop = float(np.max(np.abs(res))) if res.size else 0.0
    div = _divergence(u, gfun)
    divres = float(np.max(np.abs(div[ins]))) if ins.any() else 0.0
    if check and loop > 10 * divres + 1e-12 * max(1.0, float(np.nanmax(np.abs(val[act])))):
        raise PathDependence(f"loop residue {loop:.3e} exceeds ten times the divergence residual {divres:.3e}")
    cgrid = corner.reshape(grid.shape)
    vnode = np.full(grid.shape, np.nan + 0j)
    quad = np.stack([cgrid[1:, 1:], cgrid[:-1, 1:], cgrid[1:, :-1], cgrid[:-1, :-1]])
    vnode[1:, 1:] = quad.mean(axis=0)
    vnode[~act] = np.nan
    energy_u = 0.5 * float(np.sum(np.abs(val.ravel()[_primal_src(grid)] - val.ravel()[_primal_dst(grid)]) ** 2))
    energy_v = 0.5 * float(np.sum(np.abs(corner[dst] - corner[src]) ** 2))
    return ConjugateResult(ScalarField(grid, vnode), cgrid, loop, divres, edge_mismatch, energy_u, energy_v)


def _primal_pairs(grid):
    flat = np.arange(grid.Z.size).reshape(grid.shape)
    ins, act = grid.inside, grid.active
    src, dst = [], []
    m = (ins[:-1, :] | ins[1:, :]) & act[:-1, :] & act[1:, :]
    m[:, 0] = False
    src.append(flat[:-1, :][m])
    dst.append(flat[1:, :][m])
    m = (ins[:, :-1] | ins[:, 1:]) & act[:, :-1] & act[:, 1:]
    m[0, :] = False
    src.append(flat[:, :-1][m])
    dst.append(flat[:, 1:][m])
    return np.concatenate(src), np.concatenate(dst)


def _primal_src(grid):
    return _primal_pairs(grid)[0]


def _primal_dst(grid):
    return _primal_pairs(grid)[1]


# ---------------------------------------------------------------------------
# immersion fields


@dataclass
class ImmersionField:
    """Sampled ``Phi = (Phi_1, Phi_2)`` with first derivatives and residual channels."""

    grid: DiscGrid
    phi1: np.ndarray
    phi2: np.ndarray
    d1: tuple  # (d_x Phi_1, d_x Phi_2)
    d2: tuple  # (d_y Phi_1, d_y Phi_2)
    mask: np.ndarray
    analytic: bool = False
    channels: dict = field(default_factory=dict)

    def __post_init__(self):
        a1, b1 = self.d1
        a2, b2 = self.d2
        e1 = np.abs(a1) ** 2 + np.abs(b1) ** 2
        e2 = np.abs(a2) ** 2 + np.abs(b2) ** 2
        self.conformal_factor = e1
        with np.errstate(invalid="ignore", divide="ignore"):
            det = a1 * b2 - a2 * b1
            self.angle = det / e1
        self.channels = {
            "conformality": np.abs(e1 - e2),
            "orthogonality": np.abs(np.real(a1 * np.conj(a2) + b1 * np.conj(b2))),
            "lagrangian": np.abs(np.imag(np.conj(a1) * a2 + np.conj(b1) * b2)),
            "angle": np.abs(np.abs(self.angle) - 1.0),
        }

    @property
    def degenerate(self):
        return bool(np.all(self.conformal_factor[self.mask] == 0))

    def report(self, where=None):
        where = self.mask if where is None else (where & self.mask)
        out = []
        for name, ch in self.channels.items():
            vals = np.nan_to_num(ch[where])
            out.append({
                "channel": name,
                "max": float(np.max(vals)) if vals.size else 0.0,
                "l2": float(np.sqrt(np.sum(vals ** 2) * self.grid.h ** 2)),
                "h": self.grid.h,
            })
        return out

    def to_json(self, where=None):
        return json.dumps(self.report(where), indent=2)


def _centred(grid, f):
    h = grid.h
    fx = np.full(f.shape, np.nan + 0j)
    fy = np.full(f.shape, np.nan + 0j)
    fx[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2 * h)
    fy[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * h)
    return fx, fy


def assemble_immersion(u, v):
    """``Phi = (u, conj v)`` with centred-difference derivatives at interior nodes.

    ``v`` may be a :class:`ScalarField` at the nodes or the :class:`ConjugateResult`
    (whose corner values give compact differences ``v_x, v_y`` at nodes).
    """
    grid = u.grid
    ux, uy = _centred(grid, u.values)
    if isinstance(v, ConjugateResult):
        c = v.corner_values
        h = grid.h
        vx = np.full(grid.shape, np.nan + 0j)
        vy = np.full(grid.shape, np.nan + 0j)
        # node (i, j) is the centre of corners (i-1..i, j-1..j)
        vx[1:, 1:] = 0.5 * ((c[1:, 1:] - c[:-1, 1:]) + (c[1:, :-1] - c[:-1, :-1])) / h
        vy[1:, 1:] = 0.5 * ((c[1:, 1:] - c[1:, :-1]) + (c[:-1, 1:] - c[:-1, :-1])) / h
        vvals = v.v.values
    else:
        vx, vy = _centred(grid, v.values)
        vvals = v.values
    mask = grid.inside & np.isfinite(ux) & np.isfinite(uy) & np.isfinite(vx) & np.isfinite(vy)
    return ImmersionField(grid, u.values, np.conj(vvals), (ux, np.conj(vx)), (uy, np.conj(vy)), mask)


# ---------------------------------------------------------------------------
# Schoen--Wolfson cones


@dataclass(frozen=True)
class ConeDescriptor:
    p: int
    q: int

    def __post_init__(self):
        if int(self.p) != self.p or int(self.q) != self.q or self.p < 1 or self.q < 1:
            raise ValueError(f"cone exponents must be positive integers, got ({self.p}, {self.q})")

    @property
    def maslov(self):
        return self.p - self.q

    @property
    def alpha(self):
        return np.sqrt(self.p * self.q)

    def phi(self, z):
        z = np.asarray(z, dtype=complex)
        r, th = np.abs(z), np.angle(z)
        c = r ** self.alpha / np.sqrt(self.p + self.q)
        return c * np.sqrt(self.q) * np.exp(1j * self.p * th), c * 1j * np.sqrt(self.p) * np.exp(-1j * self.q * th)

    def g(self, z):
        """The S^1 weight ``e^{-i(p-q) theta}`` of the cone's structural equation."""
        return np.exp(-1j * self.maslov * np.angle(np.asarray(z, dtype=complex)))

    def derivatives(self, z):
        """Analytic ``(d_x Phi, d_y Phi)`` from polar derivatives."""
        z = np.asarray(z, dtype=complex)
        r, th = np.abs(z), np.angle(z)
        f1, f2 = self.phi(z)
        r1 = self.alpha / r
        dr = (r1 * f1, r1 * f2)
        dt = (1j * self.p * f1 / r, -1j * self.q * f2 / r)  # (1/r) d_theta
        c, s = np.cos(th), np.sin(th)
        dx = tuple(c * a - s * b for a, b in zip(dr, dt))
        dy = tuple(s * a + c * b for a, b in zip(dr, dt))
        return dx, dy

    def conformal_factor(self, z):
        return self.p * self.q * np.abs(z) ** (2 * self.alpha - 2)


def sw_cone(desc, grid):
    """Sample the cone on a grid with analytic derivatives."""
    if not isinstance(desc, ConeDescriptor):
        desc = ConeDescriptor(*desc)
    Z = grid.Z
    ins = grid.inside
    f1 = np.full(grid.shape, np.nan + 0j)
    f2 = f1.copy()
    a = [f1.copy() for _ in range(4)]
    f1[grid.active], f2[grid.active] = desc.phi(Z[grid.active])
    (dx1, dx2), (dy1, dy2) = desc.derivatives(Z[ins])
    for arr, vals in zip(a, (dx1, dx2, dy1, dy2)):
        arr[ins] = vals
    imm = ImmersionField(grid, f1, f2, (a[0], a[1]), (a[2], a[3]), ins.copy(), analytic=True)
    imm.cone = desc
    return imm


# ---------------------------------------------------------------------------
# structural equations and curvature


def _flux_divergence(grid, f, weight, where):
    """``h^{-2} sum_e w_e (f_b - f_a)`` with the weight at edge midpoints."""
    out = np.full(grid.shape, np.nan + 0j)
    acc = np.zeros(grid.shape, complex)
    for axis in (0, 1):
        for sh in (1, -1):
            nb = np.roll(f, -sh, axis=axis)
            mid = grid.Z + (0.5 * sh * grid.h if axis == 0 else 0.5j * sh * grid.h)
            acc[where] += weight(mid[where]) * (nb[where] - f[where])
    out[where] = acc[where] / grid.h ** 2
    return out


def _laplacian5(grid, f, where):
    out = np.full(grid.shape, np.nan + 0j)
    lap = (np.roll(f, 1, 0) + np.roll(f, -1, 0) + np.roll(f, 1, 1) + np.roll(f, -1, 1) - 4 * f) / grid.h ** 2
    out[where] = lap[where]
    return out


def _norms(vals, h):
    vals = np.nan_to_num(np.abs(vals))
    return {"max": float(np.max(vals)) if vals.size else 0.0, "l2": float(np.sqrt(np.sum(vals ** 2) * h * h))}


def verify_hamiltonian_stationary(imm, g, config=None, where=None, n_boundary=512):
    """Residuals of ``div(g grad Phi) = 0``, ``div(conj g grad g) = 0`` and ``conj g d_r g = 0`` on the circle.

    ``where`` restricts the interior channels (for example away from
    singular points); nodes whose stencil leaves the sampled set are skipped.
    """
    grid = imm.grid
    gfun = _as_g(g)
    finite = np.isfinite(imm.phi1) & np.isfinite(imm.phi2)
    nb_ok = finite.copy()
    for axis in (0, 1):
        for sh in (1, -1):
            nb_ok &= np.roll(finite, -sh, axis=axis)
    sel = grid.inside & nb_ok
    if where is not None:
        sel &= where
    r1 = _flux_divergence(grid, np.nan_to_num(imm.phi1), gfun, sel)
    r2 = _flux_divergence(grid, np.nan_to_num(imm.phi2), gfun, sel)
    struct = np.sqrt(np.abs(r1[sel]) ** 2 + np.abs(r2[sel]) ** 2)
    gvals = np.zeros(grid.shape, complex)
    gvals[grid.active] = gfun(grid.Z[grid.active])
    harm = _flux_divergence(grid, gvals, lambda z: np.conj(gfun(z)), sel)
    out = [
        {"channel": "div_g_grad_phi", **_norms(struct, grid.h), "h": grid.h},
        {"channel": "div_gbar_grad_g", **_norms(harm[sel], grid.h), "h": grid.h},
    ]
    if config is not None:
        th = 2 * np.pi * np.arange(n_boundary) / n_boundary
        zb = np.exp(1j * th)
        gx, gy = sone_gradient(config, zb)
        neu = np.conj(sone_eval(config, zb)) * (gx * np.cos(th) + gy * np.sin(th))
        out.append({"channel": "boundary_gbar_dr_g", "max": float(np.max(np.abs(neu))),
                    "l2": float(np.sqrt(np.mean(np.abs(neu) ** 2) * 2 * np.pi)), "h": grid.h})
    return out


@dataclass
class CurvatureResult:
    H: tuple
    defect: np.ndarray
    mask: np.ndarray


def mean_curvature(imm, g, grad_g=None, where=None, eps=1e-12):
    """``H = e^{-2 lambda} Delta Phi / 2`` and the defect ``|Delta Phi + conj g grad g . grad Phi|``.

    ``grad_g(z)`` returns ``(g_x, g_y)``; by default it is differenced from ``g``.
    """
    grid = imm.grid
    gfun = _as_g(g)
    finite = np.isfinite(imm.phi1) & np.isfinite(imm.phi2)
    sel = grid.inside & finite
    for axis in (0, 1):
        for sh in (1, -1):
            sel &= np.roll(finite, -sh, axis=axis)
    if where is not None:
        sel &= where
    lam = imm.conformal_factor
    if np.any(lam[sel] < eps * grid.h ** 2):
        raise DegenerateMetric("conformal factor vanishes on evaluated nodes")
    z = grid.Z[sel]
    if grad_g is None:
        d = 1e-6
        gx = (gfun(z + d) - gfun(z - d)) / (2 * d)
        gy = (gfun(z + 1j * d) - gfun(z - 1j * d)) / (2 * d)
    else:
        gx, gy = grad_g(z)
    gb = np.conj(gfun(z))
    Hs, defects = [], []
    for f, fx, fy in ((imm.phi1, imm.d1[0], imm.d2[0]), (imm.phi2, imm.d1[1], imm.d2[1])):
        lap = _laplacian5(grid, np.nan_to_num(f), sel)
        H = np.full(grid.shape, np.nan + 0j)
        H[sel] = lap[sel] / (2 * lam[sel])
        Hs.append(H)
        defects.append(lap[sel] + gb * (gx * fx[sel] + gy * fy[sel]))
    defect = np.full(grid.shape, np.nan)
    defect[sel] = np.sqrt(np.abs(defects[0]) ** 2 + np.abs(defects[1]) ** 2)
    return CurvatureResult(tuple(Hs), defect, sel)
