"""Green's functions with unit point charges on the disc and their S^1 maps.

The Green's function of a configuration of points ``p_l`` with degrees
``d_l = +/-1`` is evaluated in closed form through Moebius factors,

    G(z) = sum_l d_l log |phi_{p_l}(z)|,   phi_p(z) = (z - p) / (1 - conj(p) z),

and the associated circle-valued harmonic map is the product of the unit
Moebius factors raised to the degrees. The two are linked by
``conj(g) grad g = i grad^perp G`` with ``grad^perp G = (-G_y, G_x)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize
from skimage import measure

from .errors import EvaluationAtSingularity, LoopTooCloseToSingularity, ResolutionTooCoarse

_SING_TOL = 1e-13


@dataclass(frozen=True)
class SingularityConfig:
    """Cone points ``p_l`` inside the unit disc with degrees ``d_l = +/-1``."""

    points: tuple
    degrees: tuple

    def __init__(self, points, degrees):
        pts = tuple(complex(p) for p in np.atleast_1d(points))
        degs = tuple(int(d) for d in np.atleast_1d(degrees))
        if len(pts) != len(degs):
            raise ValueError("points and degrees must have the same length")
        if not pts:
            raise ValueError("a configuration needs at least one point")
        for p in pts:
            if not abs(p) < 1:
                raise ValueError(f"point {p} is not inside the unit disc")
        for d in degs:
            if abs(d) != 1:
                raise ValueError(f"degrees must be +1 or -1, got {d}")
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                if abs(pts[a] - pts[b]) < 1e-12:
                    raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "degrees", degs)

    @property
    def n(self):
        return len(self.points)

    @property
    def balanced(self):
        return sum(self.degrees) == 0

    @property
    def p(self):
        return np.array(self.points, dtype=complex)

    @property
    def d(self):
        return np.array(self.degrees, dtype=float)

    def to_records(self):
        return [{"re": p.real, "im": p.imag, "degree": d} for p, d in zip(self.points, self.degrees)]

    @classmethod
    def from_records(cls, records):
        return cls([complex(r["re"], r["im"]) for r in records], [r["degree"] for r in records])


def mobius(z, p):
    """The disc automorphism sending ``p`` to the origin."""
    z = np.asarray(z, dtype=complex)
    return (z - p) / (1 - np.conj(p) * z)


def mobius_inverse(w, p):
    w = np.asarray(w, dtype=complex)
    return (w + p) / (1 + np.conj(p) * w)


def mobius_derivative(z, p):
    z = np.asarray(z, dtype=complex)
    return (1 - abs(p) ** 2) / (1 - np.conj(p) * z) ** 2


def _check_regular(config, z):
    z = np.asarray(z, dtype=complex)
    for p in config.points:
        if np.any(np.abs(z - p) < _SING_TOL):
            raise EvaluationAtSingularity(f"evaluation at the singular point {p}")
    return z


def log_derivative(config, z):
    """Complex derivative of ``f = sum d_l log phi_{p_l}``; ``G = Re f``."""
    z = _check_regular(config, z)
    out = np.zeros(z.shape, dtype=complex)
    for p, d in zip(config.points, config.degrees):
        out += d * (1.0 / (z - p) + np.conj(p) / (1 - np.conj(p) * z))
    return out


def green_eval(config, z):
    """Green's function ``G`` with ``Delta G = 2 pi sum d_l delta_{p_l}``, ``G = 0`` on the circle."""
    z = _check_regular(config, z)
    out = np.zeros(z.shape)
    for p, d in zip(config.points, config.degrees):
        out += d * np.log(np.abs(mobius(z, p)))
    return out if out.ndim else float(out)


def green_gradient(config, z):
    """``(G_x, G_y)`` in closed form."""
    fp = log_derivative(config, z)
    return fp.real, -fp.imag


def green_perp_gradient(config, z):
    """``grad^perp G = (-G_y, G_x)``."""
    fp = log_derivative(config, z)
    return fp.imag, fp.real


def sone_eval(config, z):
    """The S^1-valued harmonic map ``g = prod (phi_p / |phi_p|)^{d}``."""
    z = _check_regular(config, z)
    out = np.ones(z.shape, dtype=complex)
    for p, d in zip(config.points, config.degrees):
        w = mobius(z, p)
        w = w / np.abs(w)
        out *= w if d > 0 else np.conj(w)
    return out if out.ndim else complex(out)


def sone_gradient(config, z):
    """``(g_x, g_y)`` from ``grad g = i g grad^perp G``."""
    g = sone_eval(config, z)
    bx, by = green_perp_gradient(config, z)
    return 1j * g * bx, 1j * g * by


def radial_derivative_on_circle(config, theta):
    """``dG/dr`` on the unit circle; its zeros are where ``{G = 0}`` meets the boundary."""
    z = np.exp(1j * np.asarray(theta, dtype=float))
    return (log_derivative(config, z) * z).real


def boundary_dg(config, theta):
    """``d/dtheta g(e^{i theta}) = i g dG/dr`` along the unit circle."""
    z = np.exp(1j * np.asarray(theta, dtype=float))
    return 1j * sone_eval(config, z) * radial_derivative_on_circle(config, theta)


# ---------------------------------------------------------------------------
# winding numbers


def circle_loop(center, radius, n=2048):
    t = 2 * np.pi * np.arange(n + 1) / n
    return center + radius * np.exp(1j * t)


def _segment_distance(a, b, p):
    ab = b - a
    L2 = np.abs(ab) ** 2
    s = np.clip(np.real((p - a) * np.conj(ab)) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
    return np.abs(a + s * ab - p)


def maslov_winding(config, loop, min_distance=1e-3):
    """Winding number of ``g`` along a closed polyline.

    The loop is subdivided so that the phase increment per step stays well
    below pi, then the unwrapped increments are summed.
    """
    z = np.asarray(loop, dtype=complex).ravel()
    if z[0] != z[-1]:
        z = np.append(z, z[0])
    a, b = z[:-1], z[1:]
    dmin = np.inf
    for p in config.points:
        dmin = min(dmin, float(np.min(_segment_distance(a, b, p))))
    if dmin < min_distance:
        raise LoopTooCloseToSingularity(
            f"loop passes within {dmin:.3g} of a singular point (minimum {min_distance})"
        )
    # each step must subtend a small angle seen from every singular point
    steps = np.maximum(1, np.ceil(8 * np.abs(b - a) / dmin)).astype(int)
    pts = [a[k] + (b[k] - a[k]) * np.arange(steps[k]) / steps[k] for k in range(len(a))]
    pts = np.concatenate(pts + [z[-1:]])
    g = sone_eval(config, pts)
    total = np.sum(np.angle(g[1:] / g[:-1]))
    return int(np.rint(total / (2 * np.pi)))


# ---------------------------------------------------------------------------
# admissibility census


@dataclass
class ComponentCensus:
    cells: int
    singularities: list
    flux: float
    simply_connected: bool
    thin: bool

    def to_dict(self):
        return {
            "cells": self.cells,
            "singularities": list(self.singularities),
            "flux": self.flux,
            "simply_connected": self.simply_connected,
            "thin": self.thin,
        }


@dataclass
class LevelCensus:
    level: float
    components: list = field(default_factory=list)

    def to_dict(self):
        return {"level": self.level, "components": [c.to_dict() for c in self.components]}


@dataclass
class AdmissibilityReport:
    resolution: float
    levels: list
    verdict: str
    reasons: list = field(default_factory=list)

    @property
    def admissible(self):
        return self.verdict == "admissible"

    def to_dict(self):
        return {
            "resolution": self.resolution,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "levels": [lv.to_dict() for lv in self.levels],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _node_grid(h):
    n = int(np.ceil(1.0 / h)) + 2
    x = (np.arange(-n, n) + 0.5) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    return x, X + 1j * Y


def _nearest_node(x, p):
    h = x[1] - x[0]
    i = int(np.rint((p.real - x[0]) / h))
    j = int(np.rint((p.imag - x[0]) / h))
    return i, j


def _pixel_flux(config, Z, comp, h):
    """Outward flux of grad G through the staircase boundary of a pixel set."""
    flux = 0.0
    for axis in (0, 1):
        for shift in (1, -1):
            nb = np.roll(comp, -shift, axis=axis)
            faces = comp & ~nb
            if not faces.any():
                continue
            step = h * shift
            mid = Z[faces] + (step if axis == 0 else 1j * step) / 2
            gx, gy = green_gradient(config, mid)
            normal = gx if axis == 0 else gy
            flux += float(np.sum(normal) * shift * h)
    return flux


def admissibility_check(config, resolution=1 / 256, levels=None, flux_rtol=0.02):
    """Census of the level components of ``G`` at mesh size ``resolution``.

    For every sampled level ``t < 0`` the components of ``{G <= t}`` are
    examined, for ``t > 0`` those of ``{G >= t}``. A component passes when it
    holds exactly one singular point, is simply connected on the pixel graph
    (4-connectivity, background 8-connected) and its flux has modulus
    ``2 pi``.
    """
    h = float(resolution)
    pts = config.p
    for a in range(config.n):
        if 1 - abs(pts[a]) < 4 * h:
            raise ResolutionTooCoarse(f"point {pts[a]} is within 4 cells of the boundary")
        for b in range(a + 1, config.n):
            if abs(pts[a] - pts[b]) < 4 * h:
                raise ResolutionTooCoarse("distinct points are fewer than 4 cells apart")
    x, Z = _node_grid(h)
    inside = np.abs(Z) < 1
    G = np.full(Z.shape, np.nan)
    G[inside] = green_eval(config, Z[inside])
    if levels is None:
        levels = []
        for sign in (-1, 1):
            vals = sign * G[inside]
            vals = vals[vals > 0]
            if vals.size:
                levels += [sign * q for q in np.quantile(vals, [0.1, 0.3, 0.5, 0.7, 0.9])]
    sing_nodes = [_nearest_node(x, p) for p in pts]
    census = []
    failed, thin_seen, reasons = False, False, []
    for t in levels:
        t = float(t)
        if t == 0:
            continue
        sel = inside & ((G <= t) if t < 0 else (G >= t))
        labels, count = ndimage.label(sel)
        lv = LevelCensus(t)
        for lab in range(1, count + 1):
            comp = labels == lab
            sings = [l for l, (i, j) in enumerate(sing_nodes) if labels[i, j] == lab]
            filled = ndimage.binary_fill_holes(comp, structure=np.ones((3, 3), bool))
            simply = bool(np.array_equal(filled, comp))
            thin = not ndimage.binary_erosion(comp, structure=np.ones((3, 3), bool)).any()
            flux = _pixel_flux(config, Z, comp, h)
            cc = ComponentCensus(int(comp.sum()), sings, flux, simply, thin)
            lv.components.append(cc)
            ok = len(sings) == 1 and simply and abs(abs(flux) - 2 * np.pi) <= flux_rtol * 2 * np.pi
            if thin:
                thin_seen = True
            elif not ok:
                failed = True
                reasons.append(
                    f"level {t:.4g}: component with {len(sings)} singular point(s), "
                    f"flux {flux:.4f}, simply connected={simply}"
                )
        census.append(lv)
    verdict = "not admissible" if failed else ("inconclusive" if thin_seen else "admissible")
    return AdmissibilityReport(h, census, verdict, reasons)


# ---------------------------------------------------------------------------
# components of {G != 0} and their boundaries


@dataclass
class Component:
    label: int
    sign: int
    singularities: list
    degree: int
    mask: np.ndarray = field(repr=False)


def nonzero_components(config, grid):
    """Label the connected components of ``{G > 0}`` and ``{G < 0}`` on ``grid``.

    Returns ``(labels, components)``; ``labels`` is 0 outside the disc.
    """
    G = np.full(grid.shape, np.nan)
    G[grid.inside] = green_eval(config, grid.Z[grid.inside])
    labels = np.zeros(grid.shape, dtype=int)
    comps = []
    nxt = 1
    for sign in (1, -1):
        lab, count = ndimage.label(grid.inside & (sign * np.nan_to_num(G) > 0))
        for k in range(1, count + 1):
            m = lab == k
            labels[m] = nxt
            sings = []
            for l, p in enumerate(config.points):
                i, j = _nearest_node(grid.x, p)
                if m[i, j]:
                    sings.append(l)
            deg = int(sum(config.degrees[l] for l in sings))
            comps.append(Component(nxt, sign, sings, deg, m))
            nxt += 1
    return labels, comps


@dataclass
class BoundaryPiece:
    """Either an arc of the unit circle or an interior polyline on ``{G = 0}``."""

    kind: str
    theta0: float = 0.0
    theta1: float = 0.0
    vertices: np.ndarray = None


def _circle_roots(config, n=4096):
    th = 2 * np.pi * np.arange(n + 1) / n
    f = radial_derivative_on_circle(config, th)
    roots = []
    for k in range(n):
        if f[k] == 0:
            roots.append(th[k])
        elif f[k] * f[k + 1] < 0:
            roots.append(
                optimize.brentq(lambda s: float(radial_derivative_on_circle(config, s)), th[k], th[k + 1], xtol=1e-15)
            )
    return np.array(sorted(r % (2 * np.pi) for r in roots))


def _label_at(grid, labels, z):
    i = int(np.clip(np.rint((z.real - grid.x[0]) / grid.h), 0, grid.shape[0] - 1))
    j = int(np.clip(np.rint((z.imag - grid.x[0]) / grid.h), 0, grid.shape[1] - 1))
    return labels[i, j]


def component_boundaries(config, grid, labels=None):
    """Oriented boundary pieces of every component of ``{G != 0}``.

    Arcs of the unit circle are exact; interior pieces are marching-squares
    polylines of ``{G = 0}`` extended to the exact points where the zero set
    meets the circle. Each interior polyline is shared by two components and
    appears with opposite orientations, so the pieces of all components
    together add up to the unit circle.

    Returns a dict ``label -> list[BoundaryPiece]`` with the component on the
    left of every piece.
    """
    if labels is None:
        labels, _ = nonzero_components(config, grid)
    out = {int(l): [] for l in np.unique(labels) if l > 0}
    roots = _circle_roots(config)
    h = grid.h

    def side_label(z, normal):
        for k in (1.5, 2.5, 3.5):
            lab = _label_at(grid, labels, z + k * h * normal)
            if lab > 0:
                return lab
        return 0

    # arcs
    if roots.size == 0:
        arcs = [(0.0, 2 * np.pi)]
    else:
        arcs = [(roots[k], roots[(k + 1) % roots.size] + (2 * np.pi if k + 1 == roots.size else 0.0))
                for k in range(roots.size)]
    for a, b in arcs:
        mid = np.exp(1j * 0.5 * (a + b))
        lab = side_label(mid, -mid)
        if lab:
            out[lab].append(BoundaryPiece("arc", a, b))
    # interior zero set
    G = np.zeros(grid.shape)
    G[grid.inside] = green_eval(config, grid.Z[grid.inside])
    cellmask = grid.inside.copy()
    curves = measure.find_contours(G, 0.0, mask=cellmask)
    ends = np.exp(1j * roots) if roots.size else np.zeros(0, complex)
    for c in curves:
        z = grid.x[0] + h * c[:, 0] + 1j * (grid.x[0] + h * c[:, 1])
        if len(z) < 2:
            continue
        closed = abs(z[0] - z[-1]) < 1e-12
        if not closed:
            if ends.size == 0:
                continue
            z0 = ends[np.argmin(np.abs(ends - z[0]))]
            z1 = ends[np.argmin(np.abs(ends - z[-1]))]
            if abs(z0 - z[0]) > 4 * h or abs(z1 - z[-1]) > 4 * h:
                continue
            z = np.concatenate([[z0], z, [z1]])
        k = len(z) // 2
        tangent = z[k + 1] - z[k]
        normal = 1j * tangent / abs(tangent)
        mid = 0.5 * (z[k] + z[k + 1])
        left, right = side_label(mid, normal), side_label(mid, -normal)
        if left:
            out[left].append(BoundaryPiece("curve", vertices=z))
        if right:
            out[right].append(BoundaryPiece("curve", vertices=z[::-1].copy()))
    return out


def boundary_integral(config, pieces, interior, on_circle=None, weight=None, n_gauss=256):
    """``oint F dg`` over a list of boundary pieces.

    ``interior(z)`` gives ``F`` on interior polylines (midpoint rule against
    exact increments of ``g``); ``on_circle(theta)`` gives ``F`` on arcs
    (Gauss--Legendre against ``dg/dtheta``). ``weight(g)`` multiplies ``F``.
    """
    on_circle = on_circle or (lambda th: interior(np.exp(1j * th)))
    weight = weight or (lambda g: 1.0)
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    total = 0j
    for pc in pieces:
        if pc.kind == "arc":
            a, b = pc.theta0, pc.theta1
            # split long arcs for accuracy
            m = max(1, int(np.ceil((b - a) / (np.pi / 8))))
            edges = np.linspace(a, b, m + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                th = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
                gv = sone_eval(config, np.exp(1j * th))
                total += 0.5 * (hi - lo) * np.sum(wg * on_circle(th) * weight(gv) * boundary_dg(config, th))
        else:
            z = pc.vertices
            gz = sone_eval(config, z)
            mid = 0.5 * (z[1:] + z[:-1])
            gm = sone_eval(config, mid)
            total += np.sum(interior(mid) * weight(gm) * (gz[1:] - gz[:-1]))
    return complex(total)
