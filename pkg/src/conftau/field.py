"""Potentials and the tau-function ``F`` of a domain.

The production value of ``F`` comes from contour quadrature of moments:

    2F = sum_{m,n>=1} T_mn w_mn + t0 v0 + sum_k (t_k v_k + conj(t_k v_k)),

with ``w_mn = (1/pi) int z^m zbar^n sigma``.  The brute-force double area
integral is kept as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dirichlet import GreenEvaluator
from .errors import GeometryError, QuadratureError
from .geometry import (
    DEFAULT_M,
    BackgroundPotential,
    BumpDeformation,
    DomainShape,
    MomentVector,
    _gauss_interval,
    compute_moments,
    moment_table,
    times_count,
)


@dataclass(frozen=True)
class FieldValue:
    """``F``, the electrostatic energy ``E = F - t0 v0`` and the modified potential."""

    F: float
    E: float
    phi_tilde: Callable


def full_moments(shape: DomainShape, pot: BackgroundPotential, M: int = DEFAULT_M, extra: int = 0):
    """Moments with every nonzero ``t_k`` included (plus ``extra`` more ``v_k``)."""
    return compute_moments(shape, pot, times_count(shape, pot) + extra, M)


def free_energy(shape: DomainShape, pot: BackgroundPotential, M: int = DEFAULT_M) -> float:
    """``F`` by termwise integration of the interior expansion (contour path)."""
    mom = full_moments(shape, pot, M)
    W = moment_table(shape, pot, M)
    quad = np.sum(pot.T * W)
    tv = np.sum(mom.t * mom.v)
    return float(0.5 * np.real(quad + mom.t0 * mom.v0 + 2 * tv))


def field_value(shape: DomainShape, pot: BackgroundPotential, M: int = DEFAULT_M) -> FieldValue:
    mom = full_moments(shape, pot, M, extra=64)
    F = free_energy(shape, pot, M)
    return FieldValue(F, F - mom.t0 * mom.v0, lambda z, side="exterior": phi_tilde(shape, pot, mom, z, side))


# ---------------------------------------------------------------------------
# modified potential
# ---------------------------------------------------------------------------


def _phi_exterior(mom: MomentVector, z, warn_tol: float = 1e-10):
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape, dtype=complex)
    zinv = 1.0 / z
    p = np.ones_like(z)
    last = 0.0
    for k in range(1, mom.K + 1):
        p = p * zinv
        term = mom.v[k - 1] / k * p
        acc = acc + term
        last = np.max(np.abs(term))
    if mom.K >= 8:
        early = np.max(np.abs(mom.v[mom.K // 2 - 1] / (mom.K // 2) * zinv ** (mom.K // 2)))
        if last > 10 * max(early, 1e-300) and last > warn_tol:
            raise ArithmeticError("exterior series diverges at this point (terms grow)")
    return mom.v0 + 2 * np.real(acc)


def _phi_interior(pot: BackgroundPotential, mom: MomentVector, z):
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape, dtype=complex)
    p = np.ones_like(z)
    for k in range(1, mom.K + 1):
        p = p * z
        acc = acc + mom.t[k - 1] * p
    return np.real(-pot.U(z, np.conj(z))) + 2 * mom.t0 * np.log(np.abs(z)) + 2 * np.real(acc)


def phi_tilde(
    shape: DomainShape,
    pot: BackgroundPotential,
    mom: MomentVector,
    z,
    side: str = "exterior",
    check_side: bool = True,
):
    """Modified potential from the moment expansions.

    ``exterior``: ``v0 + 2 Re sum_k (v_k/k) z^-k``;
    ``interior``: ``-U + 2 t0 log|z| + 2 Re sum_k t_k z^k``.
    The truncation is set by ``mom.K``.
    """
    if side not in ("exterior", "interior"):
        raise ValueError("side must be 'exterior' or 'interior'")
    if check_side:
        _, zc, _ = shape.boundary(4096)
        pts = np.atleast_1d(np.asarray(z, dtype=complex))
        d = np.min(np.abs(pts[:, None] - zc[None, :]), axis=1)
        if np.any(d < 1e-10):
            raise GeometryError("point lies on the curve; side is ambiguous")
    if side == "exterior":
        return _phi_exterior(mom, z)
    return _phi_interior(pot, mom, z)


def boundary_phi_tilde(shape: DomainShape, pot: BackgroundPotential, m: int = 1024, M: int = DEFAULT_M):
    """Exact boundary values of the modified potential (interior formula, finite sum)."""
    mom = full_moments(shape, pot, M)
    _, z, _ = shape.boundary(m)
    return _phi_interior(pot, mom, z)


def exterior_phi_tilde(shape: DomainShape, pot: BackgroundPotential, m: int = 1024):
    """Callable for the exterior modified potential via its boundary values.

    Equivalent to the ``v_k`` series but does not rely on its convergence
    near the curve.
    """
    psi = boundary_phi_tilde(shape, pot, m)
    ge = GreenEvaluator(shape)
    return lambda z: ge.dirichlet(psi, z)


# ---------------------------------------------------------------------------
# oracle: brute-force area integrals on a clipped polar grid
# ---------------------------------------------------------------------------


def _ray_intervals(shape: DomainShape, phis: np.ndarray, n_poly: int = 2048):
    """Radii where each ray from 0 crosses the curve, refined on the exact curve."""
    theta = 2 * np.pi * np.arange(n_poly) / n_poly
    zc = shape.z(np.exp(1j * theta))
    out = []
    for phi in phis:
        rot = zc * np.exp(-1j * phi)
        s = rot.imag
        s2 = np.roll(s, -1)
        idx = np.nonzero((s <= 0) & (s2 > 0) | (s >= 0) & (s2 < 0))[0]
        frac = s[idx] / (s[idx] - s2[idx])
        th = theta[idx] + frac * (2 * np.pi / n_poly)
        keep = (rot.real[idx] + frac * (np.roll(rot.real, -1)[idx] - rot.real[idx])) > 0
        th = th[keep]
        for _ in range(30):
            w = np.exp(1j * th)
            zz = shape.z(w) * np.exp(-1j * phi)
            dzz = 1j * w * shape.dz(w) * np.exp(-1j * phi)
            step = zz.imag / dzz.imag
            th = th - step
            if np.all(np.abs(step) < 1e-15):
                break
        rho = np.sort((shape.z(np.exp(1j * th)) * np.exp(-1j * phi)).real)
        if rho.size % 2 != 1:
            raise GeometryError("ray crossing count is even; origin not inside?")
        out.append(rho)
    return out


def _polar_grid(shape: DomainShape, n_r: int, n_theta: int):
    phis = 2 * np.pi * np.arange(n_theta) / n_theta
    crossings = _ray_intervals(shape, phis)
    rmax = max(float(c[-1]) for c in crossings)
    h = rmax / n_r
    r = (np.arange(n_r) + 0.5) * h
    lo, hi = r - h / 2, r + h / 2
    cover = np.zeros((n_r, n_theta))
    for j, rho in enumerate(crossings):
        bounds = np.concatenate([[0.0], rho])
        for a, b in zip(bounds[0::2], bounds[1::2]):
            cover[:, j] += np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0, None)
    cover /= h
    # area weights r dr dphi times the covered fraction of each cell
    wts = cover * (r * h)[:, None] * (2 * np.pi / n_theta)
    return r, phis, wts


def _oracle_parts(shape: DomainShape, pot: BackgroundPotential, n_r: int, n_theta: int):
    r, phis, wts = _polar_grid(shape, n_r, n_theta)
    Z = r[:, None] * np.exp(1j * phis[None, :])
    f = pot.sigma_real(Z) * wts
    q0 = np.sum(f)
    qlog = np.sum(f * np.log(r)[:, None])
    Fk = np.fft.fft(f, axis=1)  # Fk[i, k] = sum_j f_ij e^{-i k phi_j}
    rr_lt = np.minimum(r[:, None], r[None, :])
    rr_gt = np.maximum(r[:, None], r[None, :])
    # log|z - z'| = log r_> - sum_k (1/k) (r_</r_>)^k cos k(phi - phi')
    coul = Fk[:, 0].real @ np.log(rr_gt) @ Fk[:, 0].real
    ratio = rr_lt / rr_gt
    pw = np.ones_like(ratio)
    for k in range(1, n_theta // 2 + 1):
        pw = pw * ratio
        g = Fk[:, k]
        term = np.real(np.conj(g) @ pw @ g) / k
        if k == n_theta // 2:
            term *= 0.5
        coul -= term
        if np.max(pw) < 1e-18:
            break
    E = -coul / np.pi**2
    return E, q0, qlog


def energy_oracle(
    shape: DomainShape, pot: BackgroundPotential, n_r: int = 400, n_theta: int = 400
) -> tuple[float, float]:
    """Brute-force ``(F, E)`` from the double area integrals.

    ``E = -(1/pi^2) int int sigma sigma' log|z - z'|`` and
    ``F = -(1/pi^2) int int sigma sigma' log|1/z - 1/z'|``.
    """
    E, q0, qlog = _oracle_parts(shape, pot, n_r, n_theta)
    F = E + 2 * q0 * qlog / np.pi**2
    return float(F), float(E)


def free_energy_oracle(
    shape: DomainShape,
    pot: BackgroundPotential,
    n_r: int = 400,
    n_theta: int = 400,
    tol: float | None = None,
) -> float:
    """Independent low-accuracy ``F`` (about 1e-4) from a clipped polar grid.

    With ``tol`` set, the grid is doubled once and a change larger than
    ``tol`` raises :class:`QuadratureError`.
    """
    F, _ = energy_oracle(shape, pot, n_r, n_theta)
    if tol is not None:
        F2, _ = energy_oracle(shape, pot, 2 * n_r, 2 * n_theta)
        if abs(F2 - F) > tol:
            raise QuadratureError(f"oracle grid too coarse: doubling changed F by {abs(F2 - F):.2e}")
        return F2
    return F


# ---------------------------------------------------------------------------
# bump variation of F
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BumpEnergyChange:
    """Exact change of ``F`` under a bump and its first-order predictions."""

    delta_F: float
    predicted_footprint: float
    predicted_point: float

    @property
    def residual(self) -> float:
        return abs(self.delta_F - self.predicted_footprint)


def bump_free_energy_change(bump: BumpDeformation, n_s: int = 8, n_inner: int = 48) -> BumpEnergyChange:
    """``F(D + B) - F(D)`` for the bump region ``B``, from the double integral.

    Splitting the double integral over ``D + B`` gives
    ``(1/pi) int_B sigma phi_D - (1/pi^2) int_B int_B sigma sigma' log|1/z - 1/z'|``,
    where ``phi_D`` is the exterior modified potential of the undeformed
    domain.  The bump self-energy is evaluated with the charge placed on the
    base curve, an ``O(eps^3)`` approximation.
    """
    shape, pot = bump.shape, bump.pot
    s_nodes, s_w = _gauss_interval(0.0, 1.0, n_s)

    def strip(theta):
        z, zd, n, nd = bump.footprint(theta)
        h, hd = bump.profile(theta)
        P = z[:, None] + s_nodes[None, :] * (h * n)[:, None]
        dth = zd[:, None] + s_nodes[None, :] * (hd * n + h * nd)[:, None]
        ds = (h * n)[:, None]
        J = np.abs(np.imag(np.conj(dth) * ds))
        return P, J

    P, J = strip(bump.theta)
    sig = pot.sigma_real(P)
    phi_out = exterior_phi_tilde(shape, pot)
    phi_vals = phi_out(P.ravel()).reshape(P.shape)
    wt = bump.weights[:, None] * s_w[None, :]
    a1 = np.sum(sig * phi_vals * J * wt)
    q0 = np.sum(sig * J * wt)
    qlog = np.sum(sig * np.log(np.abs(P)) * J * wt)

    def lam(theta):
        Pt, Jt = strip(theta)
        return np.sum(pot.sigma_real(Pt) * Jt * s_w[None, :], axis=1)

    lo = bump.xi_angle - bump.width
    hi = bump.xi_angle + bump.width
    v, vw = np.polynomial.legendre.leggauss(n_inner)
    v = 0.5 * (v + 1)
    vw = 0.5 * vw
    th_o = bump.theta
    z_o = shape.z(np.exp(1j * th_o))
    lam_o = lam(th_o)
    self_line = 0.0
    for a_len, sign in ((th_o - lo, -1.0), (hi - th_o, 1.0)):
        # theta' = theta_i + sign * L v^2 removes the log singularity at theta' = theta_i
        tp = th_o[:, None] + sign * a_len[:, None] * v[None, :] ** 2
        jac = 2 * a_len[:, None] * v[None, :]
        kern = np.log(np.abs(z_o[:, None] - shape.z(np.exp(1j * tp))))
        inner = np.sum(lam(tp.ravel()).reshape(tp.shape) * kern * jac * vw[None, :], axis=1)
        self_line += np.sum(lam_o * inner * bump.weights)
    self_energy = -(self_line - 2 * q0 * qlog) / np.pi**2
    delta_F = a1 / np.pi + self_energy

    zb, _, _, _ = bump.footprint()
    mom = full_moments(shape, pot)
    phib = _phi_interior(pot, mom, zb)
    dens = bump.footprint_density * bump.weights
    pred_fp = np.sum(dens * pot.sigma_real(zb) * phib) / np.pi
    xi = bump.xi
    pred_pt = bump.eps / np.pi * pot.sigma_real(np.array([xi]))[0] * _phi_interior(pot, mom, np.array([xi]))[0]
    return BumpEnergyChange(float(delta_F), float(pred_fp), float(pred_pt))
