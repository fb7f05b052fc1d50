"""Exterior conformal map, Green function and the exterior Dirichlet problem."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, GeometryError
from .geometry import DomainShape, point_in_domain

_NEWTON_ITERS = 60
# points on the curve itself map to |w| = 1 up to rounding
_UNIT_SLACK = 1e-12


def _newton_w(shape: DomainShape, z: np.ndarray, w0: np.ndarray):
    w = w0.copy()
    for _ in range(_NEWTON_ITERS):
        step = (shape.z(w) - z) / shape.dz(w)
        w = w - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(w))):
            break
    res = np.abs(shape.z(w) - z)
    return w, res


class GreenEvaluator:
    """Evaluates ``w(z)``, the Green function and Dirichlet solutions for one shape.

    Inverse-map solves are memoized per point (insert-only cache).
    """

    def __init__(self, shape: DomainShape, n_boundary: int = 2048):
        self.shape = shape
        self._cache: dict[complex, complex] = {}
        theta, zb, _ = shape.boundary(n_boundary)
        self._theta = theta
        self._zb = zb

    # -- conformal map ----------------------------------------------------
    def w(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.empty_like(flat)
        todo = []
        for i, zi in enumerate(flat):
            hit = self._cache.get(complex(zi))
            if hit is None:
                todo.append(i)
            else:
                out[i] = hit
        if todo:
            idx = np.array(todo)
            out[idx] = self._solve(flat[idx])
            for i in idx:
                self._cache[complex(flat[i])] = complex(out[i])
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def _solve(self, z: np.ndarray) -> np.ndarray:
        s = self.shape
        scale = max(1.0, float(np.max(np.abs(self._zb))))
        w, res = _newton_w(s, z, (z - s.u[0]) / s.r)
        bad = (res > 1e-12 * scale) | (np.abs(w) < 1.0 - _UNIT_SLACK)
        if np.any(bad):
            # retry from the nearest boundary sample, pushed outward
            zb = z[bad]
            j = np.argmin(np.abs(zb[:, None] - self._zb[None, :]), axis=1)
            wb = np.exp(1j * self._theta[j])
            dist = np.abs(zb - self._zb[j])
            w0 = wb * (1.0 + np.maximum(dist, 1e-10) / np.abs(s.dz(wb)))
            w2, res2 = _newton_w(s, zb, w0)
            w[bad] = w2
            res[bad] = res2
            bad = (res > 1e-12 * scale) | (np.abs(w) < 1.0 - _UNIT_SLACK)
        if np.any(bad):
            inside = point_in_domain(s, z[bad])
            if np.any(inside):
                raise GeometryError("point is not exterior to the curve")
            raise ConvergenceError("Newton iteration for w(z) failed")
        return w

    # -- Green function ---------------------------------------------------
    def green(self, z1, z2):
        w1 = np.asarray(self.w(z1))
        w2 = np.asarray(self.w(z2))
        return np.log(np.abs((w1 - w2) / (w1 * np.conj(w2) - 1.0)))

    def green_at_infinity(self, z):
        """``lim_{zeta -> inf} G(z, zeta) = -log|w(z)|``."""
        return -np.log(np.abs(self.w(z)))

    # -- Dirichlet problem ------------------------------------------------
    def dirichlet(self, psi, z, near: float = 0.06):
        """Harmonic extension of boundary samples ``psi`` to exterior points ``z``.

        ``psi[j]`` is the boundary value at ``z(exp(2 pi i j / M))``.  Away from
        the curve the boundary integral ``-(1/pi i) oint psi dG`` is applied with
        the trapezoidal rule; for ``|w(z)| < 1 + near`` the (equivalent)
        Fourier form of the exterior Poisson kernel is summed instead, which
        stays accurate up to the boundary.
        """
        psi = np.asarray(psi, dtype=float)
        W = np.atleast_1d(np.asarray(self.w(z), dtype=complex))
        out = np.empty(W.shape)
        far = np.abs(W) >= 1.0 + near
        if np.any(far):
            out[far] = _green_quadrature(psi, W[far])
        if np.any(~far):
            out[~far] = _fourier_extension(psi, W[~far])
        return out if np.ndim(z) else float(out[0])


def _green_quadrature(psi: np.ndarray, W: np.ndarray) -> np.ndarray:
    m = psi.size
    om = np.exp(2j * np.pi * np.arange(m) / m)
    Wc = W[:, None]
    # dG/dzeta dzeta expressed in the w-plane: (1/2)[-1/(W-om) - conj(W)/(conj(W) om - 1)] d om
    kern = om / (Wc - om) + np.conj(Wc) * om / (np.conj(Wc) * om - 1.0)
    return np.real(kern @ psi) / m


def _fourier_extension(psi: np.ndarray, W: np.ndarray) -> np.ndarray:
    m = psi.size
    X = np.fft.fft(psi) / m
    nmax = (m - 1) // 2
    n = np.arange(1, nmax + 1)
    # psi(theta) = sum c_n e^{i n theta}; the bounded exterior extension of e^{-i n theta} is W^-n
    cneg = np.conj(X[1: nmax + 1])
    vals = np.real(X[0]) + 2 * np.real(W[:, None] ** (-n[None, :]) @ cneg)
    if m % 2 == 0:
        # Nyquist mode split symmetrically between e^{+-i m theta / 2}
        vals = vals + np.real(X[m // 2]) * np.real(W ** (-(m // 2)))
    return vals


def conformal_map_w(shape: DomainShape, z):
    """``w(z)``: exterior of the curve onto ``|w| > 1``, real positive derivative at infinity."""
    return GreenEvaluator(shape).w(z)


def green_function(shape: DomainShape, z1, z2):
    """``G(z1, z2) = log |(w1 - w2) / (w1 conj(w2) - 1)|``."""
    return GreenEvaluator(shape).green(z1, z2)


def solve_dirichlet(shape: DomainShape, boundary_data, z):
    """Value at exterior ``z`` of the bounded harmonic function equal to ``boundary_data`` on the curve."""
    return GreenEvaluator(shape).dirichlet(boundary_data, z)


def boundary_samples(shape: DomainShape, func, m: int = 512) -> np.ndarray:
    """``func`` evaluated at the ``m`` boundary nodes used by :meth:`GreenEvaluator.dirichlet`."""
    _, z, _ = shape.boundary(m)
    return np.real(func(z))
