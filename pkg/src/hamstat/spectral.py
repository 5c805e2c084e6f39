"""Exact Fourier-mode solutions for one singular point.

With ``g = e^{i s theta}`` (``s = +/-1``) and ``G = s log r`` the
Euler--Lagrange equation ``-Delta u = t i grad^perp G . grad u`` reads
``-Delta u = t s i r^{-2} d_theta u``. The mode ``w(r) e^{ik theta}`` then
solves ``w'' + w'/r - (k^2 + s t k) w / r^2 = 0`` and the finite-energy
solution is ``r^{sqrt(k^2 + s t k)}``. At ``t = 1`` the mode ``k = -s`` has
exponent zero and infinite energy unless its amplitude vanishes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleBoundaryData
from .greens import SingularityConfig, green_perp_gradient, mobius, mobius_derivative, sone_eval, boundary_dg

DEFAULT_K = 32


@dataclass
class BoundaryTrace:
    """Trigonometric polynomial ``psi(theta) = sum_{|k|<=K} c_k e^{ik theta}``.

    ``coeffs[k + K]`` holds ``c_k``.
    """

    coeffs: np.ndarray
    K: int = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise ValueError("coefficient vector must have odd length 2K+1")
        self.coeffs = c
        self.K = (c.size - 1) // 2

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.coeffs

    def coefficient(self, k):
        return complex(self.coeffs[k + self.K]) if abs(k) <= self.K else 0j

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ (1j * self.modes * self.coeffs)

    @classmethod
    def from_modes(cls, modes, K=DEFAULT_K):
        """Build from a mapping ``{k: c_k}``."""
        K = max([K] + [abs(int(k)) for k in modes])
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in modes.items():
            c[int(k) + K] += v
        return cls(c)

    @classmethod
    def monomial(cls, k, K=DEFAULT_K):
        return cls.from_modes({k: 1.0}, K)

    @classmethod
    def zero(cls, K=DEFAULT_K):
        return cls(np.zeros(2 * K + 1, dtype=complex))

    @classmethod
    def from_samples(cls, values, K=DEFAULT_K):
        """Discrete Fourier analysis of equispaced samples ``psi(2 pi j / n)``."""
        values = np.asarray(values, dtype=complex)
        n = values.size
        if n < 2 * K + 1:
            raise ValueError("need at least 2K+1 samples")
        f = np.fft.fft(values) / n
        k = np.arange(-K, K + 1)
        return cls(f[k % n])

    @classmethod
    def from_function(cls, func, K=DEFAULT_K, n=None):
        n = n or max(4 * K + 4, 64)
        theta = 2 * np.pi * np.arange(n) / n
        return cls.from_samples(func(theta), K)

    def to_records(self):
        return [{"k": int(k), "re": float(c.real), "im": float(c.imag)} for k, c in zip(self.modes, self.coeffs)]

    @classmethod
    def from_records(cls, records):
        modes = {int(r["k"]): complex(r["re"], r["im"]) for r in records}
        K = max(abs(k) for k in modes) if modes else 0
        return cls.from_modes(modes, K)

    def to_json(self):
        return json.dumps(self.to_records())

    def __add__(self, other):
        K = max(self.K, other.K)
        return BoundaryTrace(_pad(self.coeffs, K) + _pad(other.coeffs, K))

    def __mul__(self, scalar):
        return BoundaryTrace(self.coeffs * scalar)

    __rmul__ = __mul__


def _pad(c, K):
    k0 = (c.size - 1) // 2
    out = np.zeros(2 * K + 1, dtype=complex)
    out[K - k0:K + k0 + 1] = c
    return out


def mode_exponent(k, t, degree=1):
    """``sqrt(k^2 + s t k)``; clipped at zero against rounding."""
    return np.sqrt(np.maximum(np.asarray(k, float) ** 2 + degree * t * np.asarray(k, float), 0.0))


@dataclass
class ModeSolution:
    """``u = sum_k A_k r^{a_k} e^{ik theta}`` around a singular point at the origin."""

    coeffs: np.ndarray
    t: float
    degree: int = 1

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        self.K = (self.coeffs.size - 1) // 2
        if self.degree not in (1, -1):
            raise ValueError("degree must be +1 or -1")

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def exponents(self):
        return mode_exponent(self.modes, self.t, self.degree)

    def _terms(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        th = np.angle(z)
        live = self.coeffs != 0
        k = self.modes[live]
        a = self.exponents[live]
        A = self.coeffs[live]
        return z, r, th, k, a, A

    def __call__(self, z):
        z, r, th, k, a, A = self._terms(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            rp = np.where(a == 0, 1.0, np.power.outer(r, a))
        return (rp * np.exp(1j * np.multiply.outer(th, k))) @ A

    def polar_derivatives(self, z):
        """``(u_r, u_theta / r)`` at ``z != 0``."""
        z, r, th, k, a, A = self._terms(z)
        e = np.exp(1j * np.multiply.outer(th, k))
        rp = np.power.outer(r, a - 1)
        ur = (rp * a * e) @ A
        uth = (rp * 1j * k * e) @ A
        return ur, uth

    def gradient(self, z):
        """Analytic ``(u_x, u_y)``; ``inf`` at the origin when some live mode has exponent in (0, 1)."""
        z = np.asarray(z, dtype=complex)
        zero = np.abs(z) == 0
        zs = np.where(zero, 1.0, z)
        ur, ut = self.polar_derivatives(zs)
        c, s = np.cos(np.angle(zs)), np.sin(np.angle(zs))
        ux = c * ur - s * ut
        uy = s * ur + c * ut
        if np.any(zero):
            a = self.exponents[self.coeffs != 0]
            k = self.modes[self.coeffs != 0]
            A = self.coeffs[self.coeffs != 0]
            if np.any((a > 0) & (a < 1)):
                gx = gy = np.inf
            else:
                # exponent exactly one only for k = +/-1 at t = 0
                sel = np.isclose(a, 1.0)
                gx = np.sum(A[sel])
                gy = np.sum(A[sel] * 1j * np.sign(k[sel]))
            ux = np.where(zero, gx, ux)
            uy = np.where(zero, gy, uy)
        return ux, uy

    def laplacian(self, z):
        z, r, th, k, a, A = self._terms(z)
        e = np.exp(1j * np.multiply.outer(th, k))
        return (np.power.outer(r, a - 2) * (a ** 2 - k ** 2) * e) @ A

    def residual(self, z):
        """``-Delta u - t s i r^{-2} d_theta u``, i.e. the Euler--Lagrange residual."""
        z = np.asarray(z, dtype=complex)
        ux, uy = self.gradient(z)
        bx, by = green_perp_gradient(SingularityConfig([0], [self.degree]), z)
        return -self.laplacian(z) - self.t * 1j * (bx * ux + by * uy)

    def energy(self):
        """Closed form ``int |grad u|^2 = 2 pi sum |A_k|^2 (a_k^2 + k^2) / (2 a_k)``."""
        a = self.exponents
        k = self.modes
        A2 = np.abs(self.coeffs) ** 2
        if np.any((a == 0) & (k != 0) & (A2 > 0)):
            return np.inf
        sel = a > 0
        return float(2 * np.pi * np.sum(A2[sel] * (a[sel] ** 2 + k[sel] ** 2) / (2 * a[sel])))

    def trace(self):
        return BoundaryTrace(self.coeffs.copy())

    def to_dict(self):
        return {"t": self.t, "degree": self.degree, "coefficients": self.trace().to_records()}

    @classmethod
    def from_dict(cls, d):
        return cls(BoundaryTrace.from_records(d["coefficients"]).coeffs, d["t"], d["degree"])


def compatibility_integral(psi, config, n=2048):
    """``oint psi dg`` over the unit circle by the ``n``-point trapezoidal rule."""
    theta = 2 * np.pi * np.arange(n) / n
    return complex(np.sum(psi(theta) * boundary_dg(config, theta)) * 2 * np.pi / n)


def solve_one_singularity(psi, t, degree=1, tol=1e-10):
    """Finite-energy solution for one singular point at the origin.

    Raises
    ------
    IncompatibleBoundaryData
        At ``t = 1`` when the coefficient of ``e^{-i degree theta}`` exceeds ``tol``.
    """
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if degree not in (1, -1):
        raise ValueError("degree must be +1 or -1")
    if t == 1:
        c = psi.coefficient(-degree)
        if abs(c) > tol:
            raise IncompatibleBoundaryData(
                f"coefficient of mode {-degree} is {abs(c):.3e}; no finite-energy solution at t = 1"
            )
    A = psi.coeffs.copy()
    if t == 1 and psi.K >= 1:
        A[-degree + psi.K] = 0.0
    return ModeSolution(A, float(t), degree)


class ConjugatedSolution:
    """``z -> sol(phi_p(z))``: the one-point solution moved to the singular point ``p``.

    Derivatives are exact through the holomorphic chain rule. The boundary
    datum of the moved solution is ``psi o phi_p`` on the unit circle.
    """

    def __init__(self, sol, p):
        if not abs(p) < 1:
            raise ValueError("p must lie inside the unit disc")
        self.sol = sol
        self.p = complex(p)
        self.config = SingularityConfig([self.p], [sol.degree])

    def __call__(self, z):
        return self.sol(mobius(z, self.p))

    def gradient(self, z):
        z = np.asarray(z, dtype=complex)
        w = mobius(z, self.p)
        d = mobius_derivative(z, self.p)
        ux, uy = self.sol.gradient(w)
        uw = 0.5 * (ux - 1j * uy)
        uwb = 0.5 * (ux + 1j * uy)
        dz = uw * d
        dzb = uwb * np.conj(d)
        return dz + dzb, 1j * (dz - dzb)

    def laplacian(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(mobius_derivative(z, self.p)) ** 2 * self.sol.laplacian(mobius(z, self.p))

    def residual(self, z):
        ux, uy = self.gradient(z)
        bx, by = green_perp_gradient(self.config, z)
        return -self.laplacian(z) - self.sol.t * 1j * (bx * ux + by * uy)

    def boundary(self, theta):
        return self(np.exp(1j * np.asarray(theta, dtype=float)))


def mobius_conjugate_solution(sol, p):
    return ConjugatedSolution(sol, p)


@dataclass
class RegularityProfile:
    radii: np.ndarray
    ratios: np.ndarray
    exponent: float

    @property
    def holder_constant(self):
        return float(np.max(self.ratios)) if self.ratios.size else 0.0


def regularity_profile(sol, radii=None, n_theta=256):
    """Sampled ``C^{1, sqrt2 - 1}`` quotient of the tail ``u - A_{-s} r^0 e^{-is theta}``.

    For each radius ``r`` reports
    ``sup_theta |grad u(r e^{i theta}) - grad u(0)| / r^{sqrt2 - 1}``. All
    remaining exponents are at least ``sqrt 2`` so ``grad u(0) = 0``.
    """
    if sol.t != 1:
        raise ValueError("the regularity profile concerns the limit t = 1")
    A = sol.coeffs.copy()
    if sol.K >= 1:
        A[-sol.degree + sol.K] = 0.0
    tail = ModeSolution(A, 1.0, sol.degree)
    if radii is None:
        radii = 2.0 ** -np.arange(1, 11)
    radii = np.asarray(radii, dtype=float)
    alpha = np.sqrt(2) - 1
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    ratios = np.empty(radii.size)
    for i, r in enumerate(radii):
        ux, uy = tail.gradient(r * np.exp(1j * th))
        ratios[i] = np.max(np.sqrt(np.abs(ux) ** 2 + np.abs(uy) ** 2)) / r ** alpha
    return RegularityProfile(radii, ratios, alpha)
