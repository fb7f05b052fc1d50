"""Lax functions, Orlov-Shulman functions and Hamiltonians of the hierarchy.

``L(w) = z(w)`` and ``Lbar(w) = r/w + sum conj(u_j) w^j`` are Laurent series
in ``w``; ``M = L dU/dz(L, Lbar)`` (the function ``z S(z)`` on the curve) and
``Mbar`` is its conjugate partner.  Derivatives in the times are central
differences across re-solved shapes supplied by a :class:`Stencil`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import Stencil, Times
from .geometry import BackgroundPotential, DomainShape, MomentVector, compute_moments, times_count
from .series import LaurentSeries, poisson_bracket, project_parts

NNEG = 32
NPOS = 32
SAMPLES = 1024


def _lbar(L: LaurentSeries) -> LaurentSeries:
    return L.conj_coeffs().reflect()


def hamiltonian(L: LaurentSeries, n: int) -> LaurentSeries:
    """``H_n = (L^n)_{>=1} + (L^n)_0 / 2``."""
    plus, zero, _ = project_parts(L**n)
    return plus + 0.5 * zero


def hamiltonian_bar(Lbar: LaurentSeries, n: int) -> LaurentSeries:
    """``Hbar_n = (Lbar^n)_{<=-1} + (Lbar^n)_0 / 2``."""
    _, zero, minus = project_parts(Lbar**n)
    return minus + 0.5 * zero


def m_from_samples(shape: DomainShape, pot: BackgroundPotential, nneg: int = NNEG, npos: int = NPOS):
    """``M`` and ``Mbar`` by sampling ``z dU/dz`` on the circle and projecting."""
    _, z, _ = shape.boundary(SAMPLES)
    vals = z * pot.dU_dz(z, np.conj(z))
    M = LaurentSeries.from_samples(vals, nneg, npos)
    Mbar = LaurentSeries.from_samples(np.conj(vals), nneg, npos)
    return M, Mbar


def m_from_canon(L: LaurentSeries, Lbar: LaurentSeries, pot: BackgroundPotential) -> LaurentSeries:
    """``M = L dU/dL (L, Lbar)`` by series arithmetic."""
    acc = L * 0.0
    for m, n, c in pot.terms:
        acc = acc - (m * c) * L ** (m - 1) * Lbar**n
    return L * acc


def m_from_moments(L: LaurentSeries, mom: MomentVector) -> LaurentSeries:
    """``M = sum k t_k L^k + t0 + sum v_k L^-k``, summed pointwise on the circle."""
    Lv = L.circle_sample(SAMPLES)
    k = np.arange(1, mom.K + 1)
    powers = Lv[:, None] ** k[None, :]
    vals = mom.t0 + powers @ (k * mom.t) + (1.0 / powers) @ mom.v
    return LaurentSeries.from_samples(vals, L.nneg, L.npos)


def l_basis_coefficients(M: LaurentSeries, L: LaurentSeries, kmax: int, tol: float = 1e-13):
    """Expand ``M = sum_k a_k L^k`` and return ``(a_pos, a_0, a_neg)``.

    Positive powers are peeled from the top, then the negative powers are
    read off triangularly using ``L^-k = r^-k w^-k (1 + O(1/w))``.  For the
    Orlov-Shulman function ``a_k = k t_k``, ``a_0 = t0`` and ``a_-k = v_k``.
    """
    r = L[1]
    rem = M
    top = max((j for j, c in M.as_dict().items() if j > 0 and abs(c) > tol), default=0)
    a_pos = np.zeros(top, dtype=complex)
    for p in range(top, 0, -1):
        a = rem[p] / r**p
        a_pos[p - 1] = a
        rem = rem - a * L**p
    a0 = rem[0]
    a_neg = np.zeros(kmax, dtype=complex)
    Linv = L.reciprocal()
    q = Linv
    for k in range(1, kmax + 1):
        a = rem[-k] * r**k
        a_neg[k - 1] = a
        rem = rem - a * q
        # only exponents >= -kmax are read, and these never see dropped terms
        q = q.multiply(Linv, check=False)
    return a_pos, a0, a_neg


@dataclass(frozen=True, eq=False)
class HierarchyData:
    """``L, Lbar, M, Mbar`` and Hamiltonians ``H_n, Hbar_n`` for one shape."""

    shape: DomainShape
    L: LaurentSeries
    Lbar: LaurentSeries
    M: LaurentSeries
    Mbar: LaurentSeries
    H: dict[int, LaurentSeries] = field(default_factory=dict)
    Hbar: dict[int, LaurentSeries] = field(default_factory=dict)

    def get(self, name: str) -> LaurentSeries:
        return {"L": self.L, "Lbar": self.Lbar, "M": self.M, "Mbar": self.Mbar}[name]


def build_hierarchy(
    shape: DomainShape,
    pot: BackgroundPotential,
    mom: MomentVector | None = None,
    n_max: int = 2,
    nneg: int = NNEG,
    npos: int = NPOS,
) -> HierarchyData:
    """Series data of the hierarchy at one shape.

    ``M``/``Mbar`` come from circle sampling; :func:`m_from_canon` and
    :func:`m_from_moments` give independent constructions for cross-checks.
    ``mom`` is accepted for interface symmetry and is not needed here.
    """
    L = shape.as_series(nneg, npos)
    Lbar = _lbar(L)
    M, Mbar = m_from_samples(shape, pot, nneg, npos)
    H = {n: hamiltonian(L, n) for n in range(1, n_max + 1)}
    Hbar = {n: hamiltonian_bar(Lbar, n) for n in range(1, n_max + 1)}
    return HierarchyData(shape, L, Lbar, M, Mbar, H, Hbar)


def canon_consistency(shape: DomainShape, pot: BackgroundPotential, nneg: int = NNEG, npos: int = NPOS) -> dict:
    """Compare the three constructions of ``M`` and the ``L``-basis read-off.

    Returns coefficient-norm differences: sampled vs canonical product,
    sampled vs moment expansion, ``a_0 - t0`` and ``max |a_-k - v_k|``.
    """
    h = build_hierarchy(shape, pot, nneg=nneg, npos=npos)
    K = times_count(shape, pot)
    Kv = 2 * min(nneg, npos)
    mom = compute_moments(shape, pot, max(K, Kv), 1024)
    canon = m_from_canon(h.L, h.Lbar, pot)
    moments_form = m_from_moments(h.L, mom)
    kread = 8
    a_pos, a0, a_neg = l_basis_coefficients(h.M, h.L, kread)
    tk = np.zeros(max(a_pos.size, 1), dtype=complex)
    n = min(a_pos.size, mom.K)
    tk[:n] = mom.t[:n] * np.arange(1, n + 1)
    return {
        "sampled_vs_canon": (h.M - canon).max_abs(),
        "sampled_vs_moments": (h.M - moments_form).max_abs(),
        "t0_readoff": abs(a0 - mom.t0),
        "t_readoff": float(np.max(np.abs(a_pos - tk[: a_pos.size]), initial=0.0)),
        "v_readoff": float(np.max(np.abs(a_neg - mom.v[:kread]))),
        "m0_imag": abs(a0.imag),
    }


# ---------------------------------------------------------------------------
# families: derivatives of series in the times
# ---------------------------------------------------------------------------


class HierarchyFamily:
    """Hierarchy data around a base point, with time derivatives by central differences."""

    def __init__(self, stencil: Stencil, n_max: int = 2, nneg: int = NNEG, npos: int = NPOS):
        self.stencil = stencil
        self.pot = stencil.pot
        self.n_max = n_max
        self.nneg = nneg
        self.npos = npos
        self._data: dict[tuple, HierarchyData] = {}
        self.base = self.at(stencil.base)

    @classmethod
    def from_shape(cls, shape: DomainShape, pot: BackgroundPotential, K: int = 8, **kw) -> "HierarchyFamily":
        step = kw.pop("step", None)
        return cls(Stencil(Times.from_shape(shape, pot, K), pot, step=step), **kw)

    @property
    def t0(self) -> float:
        return self.stencil.base.t0

    def at(self, times: Times) -> HierarchyData:
        key = times.key()
        if key not in self._data:
            shape = self.stencil.shape(times)
            self._data[key] = build_hierarchy(shape, self.pot, n_max=self.n_max, nneg=self.nneg, npos=self.npos)
        return self._data[key]

    def _diff(self, getter, i: int) -> LaurentSeries:
        st = self.stencil
        return (getter(self.at(st.point(i, 1))) - getter(self.at(st.point(i, -1)))) / (2 * st.step(i))

    def d_t0(self, getter) -> LaurentSeries:
        return self._diff(getter, 0)

    def d_t(self, getter, n: int, bar: bool = False) -> LaurentSeries:
        """``d/dt_n`` (or ``d/dtbar_n``) in the real chart."""
        dx = self._diff(getter, 2 * n - 1)
        dy = self._diff(getter, 2 * n)
        return 0.5 * (dx + 1j * dy) if bar else 0.5 * (dx - 1j * dy)

    def bracket(self, f, g) -> LaurentSeries:
        """``{f, g}`` at the base point, with ``f`` and ``g`` given as getters."""
        return poisson_bracket(
            f(self.base),
            g(self.base),
            self.t0,
            df_dt0=self.d_t0(f),
            dg_dt0=self.d_t0(g),
        )


def _get(name):
    return lambda h: h.get(name)


def residual_canonical(family: HierarchyFamily) -> float:
    """``max(|{L, M} - L|, |{Lbar^-1, Mbar} - Lbar^-1|)`` over coefficients."""
    r1 = (family.bracket(_get("L"), _get("M")) - family.base.L).max_abs()

    def lbinv(h):
        return h.Lbar.reciprocal()

    r2 = (family.bracket(lbinv, _get("Mbar")) - lbinv(family.base)).max_abs()
    return max(r1, r2)


def residual_lax_sato(family: HierarchyFamily, n: int, X: str = "L", bar: bool = False) -> float:
    """``|dX/dt_n - {H_n, X}|`` or ``|dX/dtbar_n + {Hbar_n, X}|`` over coefficients."""
    getX = _get(X)
    lhs = family.d_t(getX, n, bar)
    if bar:
        rhs = -family.bracket(lambda h: h.Hbar[n], getX)
    else:
        rhs = family.bracket(lambda h: h.H[n], getX)
    return (lhs - rhs).max_abs()


def residual_string(family: HierarchyFamily, m: int = 512) -> float:
    """``max_{|w|=1} |{L, Lbar} sigma(L, Lbar) - 1|``."""
    br = family.bracket(_get("L"), _get("Lbar"))
    L = family.base.L.circle_sample(m)
    Lb = family.base.Lbar.circle_sample(m)
    sig = family.pot.sigma(L, Lb)
    if np.min(np.abs(sig)) == 0:
        raise ZeroDivisionError("sigma vanishes on the curve")
    return float(np.max(np.abs(br.circle_sample(m) * sig - 1.0)))
