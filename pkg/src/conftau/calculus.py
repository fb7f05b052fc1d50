"""``F`` as a function of the times and its derivatives in the real chart.

Chart coordinates are indexed as ``0 -> t0``, ``2k-1 -> Re t_k``,
``2k -> Im t_k``.  First derivatives of ``F`` are either exact (the dual
moments ``v``) or central differences of ``F``; second derivatives are
central differences of the exact ``v`` over re-solved shapes.
"""

from __future__ import annotations

import re
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import TruncationWarning
from .field import free_energy
from .geometry import DEFAULT_K, DEFAULT_M, BackgroundPotential, DomainShape, MomentVector, compute_moments
from .inverse import SolveOptions, solve_inverse

TRUNCATION_RATIO = 1e-10


@dataclass(frozen=True, eq=False)
class Times:
    """A point ``(t0, t_1..t_K)`` of the moment chart."""

    t0: float
    t: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.t, dtype=complex)).copy()
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "t0", float(self.t0))

    @classmethod
    def from_shape(cls, shape: DomainShape, pot: BackgroundPotential, K: int = DEFAULT_K, M: int = DEFAULT_M):
        mom = compute_moments(shape, pot, K, M)
        return cls(mom.t0, mom.t)

    @property
    def K(self) -> int:
        return self.t.size

    def key(self) -> tuple:
        return (self.t0,) + tuple(self.t.tolist())

    def coordinate(self, i: int) -> float:
        if i == 0:
            return self.t0
        c = self.t[(i - 1) // 2]
        return c.real if i % 2 else c.imag

    def shifted(self, i: int, h: float) -> "Times":
        if i == 0:
            return Times(self.t0 + h, self.t)
        t = self.t.copy()
        t[(i - 1) // 2] += h if i % 2 else 1j * h
        return Times(self.t0, t)

    def as_target(self):
        return self.t0, self.t


def default_step(value: float) -> float:
    return 1e-4 * max(1.0, abs(value))


class Stencil:
    """Finite-difference stencils around a base point with a solve cache.

    Perturbed shapes are warm-started from the base shape and memoized by
    the exact perturbed time vector, so repeated requests are free.
    ``workers > 1`` evaluates stencil points on a thread pool; results do
    not depend on completion order.
    """

    def __init__(
        self,
        base: Times,
        pot: BackgroundPotential,
        opts: SolveOptions | None = None,
        step: float | None = None,
        M: int = DEFAULT_M,
        workers: int = 1,
    ):
        self.base = base
        self.pot = pot
        self.opts = opts or SolveOptions(M=M)
        self.M = M
        self._step = step
        self.workers = workers
        self._shapes: dict[tuple, DomainShape] = {}
        self._moments: dict[tuple, MomentVector] = {}
        self._F: dict[tuple, float] = {}
        self._lock = threading.Lock()
        self.base_shape = self.shape(base)

    @property
    def K(self) -> int:
        return self.base.K

    def step(self, i: int) -> float:
        if self._step is not None:
            return self._step * max(1.0, abs(self.base.coordinate(i)))
        return default_step(self.base.coordinate(i))

    def point(self, i: int, s: float) -> Times:
        return self.base.shifted(i, s * self.step(i))

    def shape(self, times: Times) -> DomainShape:
        key = times.key()
        hit = self._shapes.get(key)
        if hit is not None:
            return hit
        init = self._shapes.get(self.base.key())
        shape = solve_inverse(times.as_target(), self.pot, init, self.opts)
        with self._lock:
            # single writer per key: the first stored result wins
            return self._shapes.setdefault(key, shape)

    def moments(self, times: Times) -> MomentVector:
        key = times.key()
        if key not in self._moments:
            mom = compute_moments(self.shape(times), self.pot, self.K, self.M)
            with self._lock:
                self._moments.setdefault(key, mom)
        return self._moments[key]

    def F(self, times: Times) -> float:
        key = times.key()
        if key not in self._F:
            val = free_energy(self.shape(times), self.pot, self.M)
            with self._lock:
                self._F.setdefault(key, val)
        return self._F[key]

    def prefetch(self, points) -> None:
        points = [p for p in points if p.key() not in self._shapes]
        if self.workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                list(ex.map(self.moments, points))
        else:
            for p in points:
                self.moments(p)

    def all_points(self):
        n = 2 * self.K + 1
        return [self.point(i, s) for i in range(n) for s in (1.0, -1.0)]

    def cache_size(self) -> int:
        return len(self._shapes)


# ---------------------------------------------------------------------------
# F and its first derivatives
# ---------------------------------------------------------------------------


def F_of_t(t: Times, pot: BackgroundPotential, opts: SolveOptions | None = None) -> float:
    """Solve the inverse problem at ``t`` and return ``F``."""
    opts = opts or SolveOptions()
    return free_energy(solve_inverse(t.as_target(), pot, None, opts), pot, opts.M)


def _parse_label(label) -> tuple[int, bool]:
    """``0``/``'t0'`` -> (0, False); ``k``/``'tk'`` -> (k, False); ``'tkbar'`` -> (k, True)."""
    if isinstance(label, (int, np.integer)):
        return int(label), False
    m = re.fullmatch(r"t(\d+)(bar)?", str(label).strip())
    if not m:
        raise ValueError(f"unrecognised derivative label {label!r}")
    k = int(m.group(1))
    bar = m.group(2) is not None
    if k == 0 and bar:
        raise ValueError("t0 is real; 't0bar' is not a coordinate")
    return k, bar


def _chart_derivative(func, stencil: Stencil, k: int, bar: bool):
    """Central-difference derivative of ``func(times)`` along ``t0`` or ``t_k``/``tbar_k``."""
    if k == 0:
        h = stencil.step(0)
        return (func(stencil.point(0, 1)) - func(stencil.point(0, -1))) / (2 * h)
    ix, iy = 2 * k - 1, 2 * k
    dx = (func(stencil.point(ix, 1)) - func(stencil.point(ix, -1))) / (2 * stencil.step(ix))
    dy = (func(stencil.point(iy, 1)) - func(stencil.point(iy, -1))) / (2 * stencil.step(iy))
    return 0.5 * (dx + 1j * dy) if bar else 0.5 * (dx - 1j * dy)


def fd_first(
    t: Times,
    pot: BackgroundPotential,
    which=0,
    step: float | None = None,
    stencil: Stencil | None = None,
) -> complex:
    """``dF/dt0``, ``dF/dt_k`` or ``dF/dtbar_k`` by central differences of ``F``."""
    stencil = stencil or Stencil(t, pot, step=step)
    k, bar = _parse_label(which)
    if k > stencil.K:
        raise ValueError(f"coordinate t{k} outside the chart (K={stencil.K})")
    val = _chart_derivative(stencil.F, stencil, k, bar)
    return float(np.real(val)) if k == 0 else complex(val)


def fd_gradient(stencil: Stencil) -> tuple[float, np.ndarray]:
    """All first derivatives ``(dF/dt0, [dF/dt_k])`` by differences of ``F``."""
    d0 = fd_first(stencil.base, stencil.pot, 0, stencil=stencil)
    dk = np.array([fd_first(stencil.base, stencil.pot, k, stencil=stencil) for k in range(1, stencil.K + 1)])
    return d0, dk


# ---------------------------------------------------------------------------
# second derivatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SecondDerivatives:
    """Table of second derivatives of ``F`` at a base point.

    ``F00 = d^2F/dt0^2``, ``F0[k-1] = d^2F/dt0 dt_k``,
    ``Fhh[j-1, k-1] = d^2F/dt_j dt_k``, ``Fhb[j-1, k-1] = d^2F/dt_j dtbar_k``.
    ``Fhh_raw`` keeps the unsymmetrized ``d v_k / d t_j`` (row ``j``) and
    ``dv0[j-1] = d v0 / d t_j`` for symmetry checks.
    """

    F00: float
    F0: np.ndarray
    Fhh: np.ndarray
    Fhb: np.ndarray
    Fhh_raw: np.ndarray
    dv0: np.ndarray
    mom: MomentVector

    @property
    def K(self) -> int:
        return self.F0.size

    # -- first-order operators (exact) -------------------------------------
    def D_F(self, z):
        """``D(z) F = sum_k z^-k/k v_k``."""
        return apply_D(self.mom.v, z)

    def calD_F(self, z):
        """``(d_t0 + D + Dbar) F = v0 + 2 Re D(z) F``."""
        return self.mom.v0 + 2 * np.real(self.D_F(z))

    # -- second-order operators ---------------------------------------------
    def d0D(self, z):
        """``d_t0 D(z) F``."""
        return apply_D(self.F0, z)

    def DD(self, z1, z2):
        """``D(z1) D(z2) F``."""
        return _bilinear(self.Fhh, z1, z2)

    def DDbar(self, z1, z2):
        """``D(z1) Dbar(zbar2) F``."""
        return _bilinear(self.Fhb, z1, np.conj(z2))

    def calDcalD(self, z1, z2):
        """``calD(z1) calD(z2) F`` with ``calD = d_t0 + D + Dbar``."""
        return (
            self.F00
            + 2 * np.real(self.d0D(z1))
            + 2 * np.real(self.d0D(z2))
            + 2 * np.real(self.DD(z1, z2))
            + 2 * np.real(self.DDbar(z1, z2))
        )

    def entry(self, a, b) -> complex:
        """Single entry ``d^2F / da db`` for labels as in :func:`fd_second`."""
        ka, ba = _parse_label(a)
        kb, bb = _parse_label(b)
        if ka == 0 and kb == 0:
            return self.F00
        if ka == 0 or kb == 0:
            k, bar = (kb, bb) if ka == 0 else (ka, ba)
            val = self.F0[k - 1]
            return np.conj(val) if bar else val
        if ba == bb:
            val = self.Fhh_raw[ka - 1, kb - 1]
            return np.conj(val) if ba else val
        # one holomorphic, one antiholomorphic index
        j, k = (ka, kb) if not ba else (kb, ka)
        return self.Fhb[j - 1, k - 1]


def _bilinear(A, z1, z2):
    K = A.shape[0]
    k = np.arange(1, K + 1)
    a = np.asarray(z1, dtype=complex)[..., None] ** (-k) / k
    b = np.asarray(z2, dtype=complex)[..., None] ** (-k) / k
    out = np.einsum("...j,jk,...k->...", a, A, b)
    # contribution of the terms carrying the highest retained index
    edge = np.abs(a[..., -1] * (b @ A[-1, :])) + np.abs(b[..., -1] * (a @ A[:, -1]))
    _warn_truncation(edge, out)
    return out


def hessian(stencil: Stencil) -> SecondDerivatives:
    """Second-derivative table from central differences of the exact ``v``."""
    K = stencil.K
    stencil.prefetch(stencil.all_points())

    def vvec(times):
        m = stencil.moments(times)
        return np.concatenate([[m.v0], m.v])

    d_t0 = _chart_derivative(vvec, stencil, 0, False)
    d_h = np.array([_chart_derivative(vvec, stencil, j, False) for j in range(1, K + 1)])
    d_b = np.array([_chart_derivative(vvec, stencil, j, True) for j in range(1, K + 1)])
    # d_h[j-1, k] = d v_k / d t_j (k = 0 is v0); d_b[j-1, k] = d v_k / d tbar_j
    raw = d_h[:, 1:]
    return SecondDerivatives(
        F00=float(np.real(d_t0[0])),
        F0=d_t0[1:].copy(),
        Fhh=0.5 * (raw + raw.T),
        Fhb=d_b[:, 1:].T.copy(),
        Fhh_raw=raw.copy(),
        dv0=d_h[:, 0].copy(),
        mom=stencil.moments(stencil.base),
    )


def fd_second(t: Times, pot: BackgroundPotential, pair, step: float | None = None, stencil: Stencil | None = None) -> complex:
    """One second derivative, as a central difference of an exact first derivative.

    ``pair`` holds two labels: ``0`` or ``'t0'``; ``k`` or ``'tk'``;
    ``'tkbar'`` for the conjugate direction.  For two holomorphic labels
    ``(j, k)`` the result is ``d v_k / d t_j`` (not symmetrized).
    """
    stencil = stencil or Stencil(t, pot, step=step)
    a, b = pair
    ka, ba = _parse_label(a)
    kb, bb = _parse_label(b)

    def vk(times):
        m = stencil.moments(times)
        val = m.v0 if kb == 0 else m.v[kb - 1]
        return np.conj(val) if bb else val

    return complex(_chart_derivative(vk, stencil, ka, ba))


# ---------------------------------------------------------------------------
# vertex operators
# ---------------------------------------------------------------------------


def _warn_truncation(last, total):
    last = np.max(np.atleast_1d(last))
    total = np.max(np.abs(np.atleast_1d(total)))
    if total > 0 and last > TRUNCATION_RATIO * total:
        warnings.warn(
            f"operator series truncated with last term {last:.2e} vs sum {total:.2e}",
            TruncationWarning,
            stacklevel=3,
        )


def apply_D(values, z):
    """``D(z) A = sum_{k=1}^K z^-k / k * dA/dt_k`` given ``values[k-1] = dA/dt_k``."""
    values = np.asarray(values, dtype=complex)
    K = values.size
    k = np.arange(1, K + 1)
    terms = np.asarray(z, dtype=complex)[..., None] ** (-k) / k * values
    out = terms.sum(-1)
    if K:
        _warn_truncation(np.abs(terms[..., -1]), out)
    return out


def apply_Dbar(values_bar, z):
    """``Dbar(zbar) A = sum_k zbar^-k / k * dA/dtbar_k``."""
    return apply_D(values_bar, np.conj(np.asarray(z, dtype=complex)))


def apply_calD(d0, values, values_bar, z):
    """``(d_t0 + D(z) + Dbar(zbar)) A``."""
    return d0 + apply_D(values, z) + apply_Dbar(values_bar, z)
