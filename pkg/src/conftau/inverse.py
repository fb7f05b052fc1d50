"""Inverse of the moment map: find the shape with prescribed ``t0, t_1..t_K``.

Real chart used throughout the package: ``t_k = x_k + i y_k`` with
``d/dt_k = (d/dx_k - i d/dy_k) / 2`` and ``d/dtbar_k = (d/dx_k + i d/dy_k) / 2``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConditioningWarning, ConvergenceError, GeometryError
from .geometry import DEFAULT_M, BackgroundPotential, DomainShape, compute_moments

log = logging.getLogger(__name__)

COND_LIMIT = 1e12


@dataclass(frozen=True)
class SolveOptions:
    newton_tol: float = 1e-13
    max_iters: int = 40
    damping: float = 1.0
    fd_jacobian_step: float = 1e-6
    M: int = DEFAULT_M
    #: number of unknown coefficients ``u_0..u_{N-1}``; ``None`` picks a default
    n_coeffs: int | None = None

    def __post_init__(self):
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


def chart_size(pot: BackgroundPotential, K: int) -> int:
    """Default number of unknown coefficients for ``K`` prescribed times.

    For uniform density the map with ``u_0..u_{K-1}`` carries exactly
    ``t_1..t_K``.  Otherwise the image of a finite map has infinitely many
    nonzero times, so the chart is padded with extra zero targets.
    """
    if pot.radial_exponent == 1:
        return max(K, 1)
    return max(2 * K, 8)


def _pack(shape: DomainShape, N: int) -> np.ndarray:
    u = np.zeros(N, dtype=complex)
    n = min(N, shape.u.size)
    u[:n] = shape.u[:n]
    return np.concatenate([[shape.r], u.real, u.imag])


def _unpack(x: np.ndarray, N: int) -> DomainShape:
    return DomainShape(x[0], x[1: N + 1] + 1j * x[N + 1:])


def _residual(x, target_t0, target_t, pot, N, M):
    mom = compute_moments(_unpack(x, N), pot, N, M)
    d = mom.t - target_t
    return np.concatenate([[mom.t0 - target_t0], d.real, d.imag])


def circle_init(t0: float, pot: BackgroundPotential, M: int = 256) -> DomainShape:
    """Centered circle whose ``t0`` equals the target."""
    m = pot.radial_exponent
    if m is not None:
        # sigma = |z|^(2m-2) gives t0 = r^(2m) / m
        return DomainShape.circle((t0 * m) ** (1.0 / (2 * m)))

    def f(r):
        return compute_moments(DomainShape.circle(r), pot, 1, M).t0 - t0

    hi = 1.0
    while f(hi) < 0:
        hi *= 2
    lo = hi / 2
    while f(lo) > 0:
        lo /= 2
    return DomainShape.circle(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15))


def solve_inverse(
    target,
    pot: BackgroundPotential,
    init: DomainShape | None = None,
    opts: SolveOptions | None = None,
    history: list | None = None,
) -> DomainShape:
    """Newton solve for the shape whose moments equal ``target = (t0, [t_1..t_K])``.

    The Jacobian is rebuilt every iteration by forward differences.  Residual
    norms are appended to ``history`` when given.  A badly conditioned
    Jacobian emits :class:`ConditioningWarning`.
    """
    opts = opts or SolveOptions()
    t0, tk = target
    t0 = float(t0)
    tk = np.atleast_1d(np.asarray(tk, dtype=complex))
    if not t0 > 0:
        raise GeometryError(f"t0 must be positive for an admissible shape, got {t0}")
    K = tk.size
    N = opts.n_coeffs or chart_size(pot, K)
    if N < K:
        raise ValueError(f"chart of {N} coefficients cannot carry {K} times")
    target_t = np.zeros(N, dtype=complex)
    target_t[:K] = tk
    if init is None:
        init = circle_init(t0, pot)
    x = _pack(init, N)
    scale = max(1.0, abs(t0))

    def res(x):
        return _residual(x, t0, target_t, pot, N, opts.M)

    fx = res(x)
    norm = np.linalg.norm(fx)
    if history is not None:
        history.append(norm)
    for it in range(opts.max_iters):
        if norm <= opts.newton_tol * scale:
            break
        J = np.empty((fx.size, x.size))
        for j in range(x.size):
            h = opts.fd_jacobian_step * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (res(xp) - fx) / h
        cond = np.linalg.cond(J)
        if cond > COND_LIMIT:
            warnings.warn(f"moment-map Jacobian condition number {cond:.2e}", ConditioningWarning, stacklevel=2)
        step = np.linalg.solve(J, -fx)
        lam = opts.damping
        while True:
            try:
                xn = x + lam * step
                fn = res(xn)
                nn = np.linalg.norm(fn)
            except GeometryError:
                nn = np.inf
            if nn < norm or lam < 1e-4:
                break
            lam *= 0.5
        if not np.isfinite(nn):
            raise ConvergenceError("Newton step left the admissible set")
        if nn >= norm and norm > opts.newton_tol * scale * 10:
            raise ConvergenceError(f"Newton stalled at residual {norm:.3e}")
        x, fx, norm = xn, fn, nn
        if history is not None:
            history.append(norm)
        log.debug("newton iter %d residual %.3e step %.2g", it, norm, lam)
    if norm > opts.newton_tol * scale * 10:
        raise ConvergenceError(f"no convergence in {opts.max_iters} iterations (residual {norm:.3e})")
    shape = _unpack(x, N)
    shape.validate(opts.M)
    return shape


def solve_from_inits(target, pot: BackgroundPotential, inits, opts: SolveOptions | None = None, tol: float = 1e-8):
    """Solve from several starting shapes.

    Returns ``(shapes, suspicious)``; ``suspicious`` is true when two
    converged solutions differ by more than ``tol`` on the curve.
    """
    shapes = []
    for init in inits:
        try:
            shapes.append(solve_inverse(target, pot, init, opts))
        except ConvergenceError:
            continue
    if not shapes:
        raise ConvergenceError("no starting shape converged")
    _, ref, _ = shapes[0].boundary(256)
    suspicious = any(np.max(np.abs(s.boundary(256)[1] - ref)) > tol for s in shapes[1:])
    if suspicious:
        log.warning("different starting shapes reached different solutions")
    return shapes, suspicious
