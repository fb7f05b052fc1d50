"""Catalogue of identities, each evaluated as a residual at a base configuration.

Each identity is registered with a short formula anchor, a default
tolerance and a comparison direction.  :func:`run_suite` evaluates a list
of identities over several bases and returns a :class:`VerificationReport`.
"""

from __future__ import annotations

import csv
import io
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from functools import cached_property
from typing import Callable

import numpy as np

from .calculus import SecondDerivatives, Stencil, Times, apply_D, fd_gradient, hessian
from .dirichlet import GreenEvaluator
from .errors import ConftauError, TruncationWarning
from .field import bump_free_energy_change, free_energy, full_moments, phi_tilde
from .geometry import (
    DEFAULT_K,
    DEFAULT_M,
    BackgroundPotential,
    DomainShape,
    bump_deform,
    compute_moments,
    generalized_moment,
    generalized_moment_dzbar,
)
from .hierarchy import HierarchyFamily, residual_canonical, residual_lax_sato, residual_string
from .inverse import SolveOptions, solve_inverse

#: exterior sample points ``|z| in {2, 3, 5}`` at angles 0.3 and 2.0
SAMPLE_POINTS = np.array([r * np.exp(1j * a) for r in (2.0, 3.0, 5.0) for a in (0.3, 2.0)])
#: point pairs for two-point identities
SAMPLE_PAIRS = [(SAMPLE_POINTS[i], SAMPLE_POINTS[i + 1]) for i in range(5)]
#: point triples for the three-point identity
SAMPLE_TRIPLES = [
    (3.0 + 0j, 4j, -5.0 + 0j),
    (SAMPLE_POINTS[0], SAMPLE_POINTS[3], SAMPLE_POINTS[5]),
    (SAMPLE_POINTS[1], SAMPLE_POINTS[2], SAMPLE_POINTS[4]),
]
#: boundary-limit settings: fixed far point, boundary angles and offsets
SEC1_Z = 5.0 * np.exp(0.3j)
SEC1_ANGLES = (0.3, 1.2, 2.0, 4.0)
SEC1_DELTA = 0.01
BUMP_ANGLE = 0.7
BUMP_EPS = 1e-4
BUMP_WIDTH = 0.3

TOL_ONE_LEVEL = 1e-5
TOL_TWO_LEVEL = 1e-4
TOL_QUADRATURE = 1e-8
#: residuals below this are at the rounding floor of the FD stencils
ROUNDOFF_FLOOR = 1e-10


@dataclass(frozen=True)
class Base:
    """A named base configuration: a shape and a background density."""

    name: str
    shape: DomainShape
    pot: BackgroundPotential


@dataclass(frozen=True)
class SuiteOptions:
    K: int = DEFAULT_K
    M: int = DEFAULT_M
    fd_step: float = 1e-4
    solver: SolveOptions = field(default_factory=SolveOptions)
    workers: int = 1
    convergence: bool = True


@dataclass(frozen=True)
class Identity:
    id: str
    anchor: str
    tol: float
    func: Callable[["Context"], float]
    fd_based: bool = True
    #: "le": pass iff residual <= tol; "gt": pass iff residual > tol
    compare: str = "le"
    applies: Callable[["Context"], bool] = lambda ctx: True


REGISTRY: dict[str, Identity] = {}


def identity(id, anchor, tol, fd_based=True, compare="le", applies=None):
    def deco(func):
        REGISTRY[id] = Identity(id, anchor, tol, func, fd_based, compare, applies or (lambda ctx: True))
        return func

    return deco


def default_identities() -> list[str]:
    return sorted(REGISTRY)


# ---------------------------------------------------------------------------
# per-base lazy context
# ---------------------------------------------------------------------------


class Context:
    """Lazily computed ingredients for one base at one FD step."""

    def __init__(self, base: Base, opts: SuiteOptions, pool: "ContextPool"):
        self.base = base
        self.opts = opts
        self.pool = pool

    @property
    def shape(self) -> DomainShape:
        return self.base.shape

    @property
    def pot(self) -> BackgroundPotential:
        return self.base.pot

    @cached_property
    def times(self) -> Times:
        return Times.from_shape(self.shape, self.pot, self.opts.K, self.opts.M)

    @cached_property
    def stencil(self) -> Stencil:
        solver = replace(self.opts.solver, M=self.opts.M)
        return Stencil(self.times, self.pot, solver, self.opts.fd_step, self.opts.M, self.opts.workers)

    @cached_property
    def hess(self) -> SecondDerivatives:
        return hessian(self.stencil)

    @cached_property
    def gradient(self):
        return fd_gradient(self.stencil)

    @cached_property
    def green(self) -> GreenEvaluator:
        return GreenEvaluator(self.shape)

    @cached_property
    def moments(self):
        return compute_moments(self.shape, self.pot, self.opts.K, self.opts.M)

    @cached_property
    def full_moments(self):
        return full_moments(self.shape, self.pot, self.opts.M, extra=64)

    @cached_property
    def family(self) -> HierarchyFamily:
        return HierarchyFamily(self.stencil)

    @cached_property
    def F(self) -> float:
        return free_energy(self.shape, self.pot, self.opts.M)

    def partner(self) -> "Context | None":
        """Same shape under the other preset density (uniform <-> |z|^2)."""
        p = self.pot.radial_exponent
        if p not in (1, 2):
            return None
        other = BackgroundPotential.radial_power(2 if p == 1 else 1)
        return self.pool.get(Base(f"{self.base.name}~{other.name}", self.shape, other), self.opts)


class ContextPool:
    def __init__(self):
        self._items: dict[tuple, Context] = {}

    def get(self, base: Base, opts: SuiteOptions) -> Context:
        key = (base.shape.key(), base.pot.key(), opts.fd_step, opts.K, opts.M)
        if key not in self._items:
            self._items[key] = Context(base, opts, self)
        return self._items[key]


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


@identity("FIRST_DERIV", "dF/dt_k = v_k and (d_t0 + D + Dbar)F = exterior Phi~ at z", TOL_ONE_LEVEL)
def _first_deriv(ctx: Context) -> float:
    d0, dk = ctx.gradient
    mom = ctx.moments
    rel = [abs(d0 - mom.v0) / max(1.0, abs(mom.v0))]
    rel += list(np.abs(dk - mom.v) / np.maximum(1.0, np.abs(mom.v)))
    calD = d0 + 2 * np.real(apply_D(dk, SAMPLE_POINTS))
    phi = phi_tilde(ctx.shape, ctx.pot, ctx.full_moments, SAMPLE_POINTS, "exterior")
    return float(max(max(rel), np.max(np.abs(calD - phi))))


@identity("CONF_MAP", "w = z exp(-F00/2 - d_t0 D(z)F) and w = exp(-F00/2)(z - (d_t0 + D(z)) dF/dt1)", TOL_ONE_LEVEL)
def _conf_map(ctx: Context) -> float:
    H = ctx.hess
    z = SAMPLE_POINTS
    w = ctx.green.w(z)
    r1 = np.abs(z * np.exp(-0.5 * H.F00 - H.d0D(z)) - w)
    # d v_1 / d t_k is the column k = 1 of the raw table
    r2 = np.abs(np.exp(-0.5 * H.F00) * (z - H.F0[0] - apply_D(H.Fhh_raw[:, 0], z)) - w)
    return float(max(np.max(r1), np.max(r2)))


@identity("GREEN", "G(z1,z2) = log|1/z1 - 1/z2| + (1/2) calD(z1) calD(z2) F", TOL_TWO_LEVEL)
def _green(ctx: Context) -> float:
    H = ctx.hess
    z1 = np.array([p[0] for p in SAMPLE_PAIRS])
    z2 = np.array([p[1] for p in SAMPLE_PAIRS])
    G = ctx.green.green(z1, z2)
    return float(np.max(np.abs(np.log(np.abs(1 / z1 - 1 / z2)) + 0.5 * H.calDcalD(z1, z2) - G)))


def _pairs(ctx):
    z1 = np.array([p[0] for p in SAMPLE_PAIRS])
    z2 = np.array([p[1] for p in SAMPLE_PAIRS])
    return z1, z2, ctx.green.w(z1), ctx.green.w(z2)


@identity("SEC5", "(w1 - w2)/(z1 - z2) = exp(-F00/2 + D(z1)D(z2)F)", TOL_ONE_LEVEL)
def _sec5(ctx: Context) -> float:
    H = ctx.hess
    z1, z2, w1, w2 = _pairs(ctx)
    return float(np.max(np.abs((w1 - w2) / (z1 - z2) - np.exp(-0.5 * H.F00 + H.DD(z1, z2)))))


@identity("S511", "log(1 - 1/(w1 conj w2)) = -D(z1) Dbar(zbar2) F", TOL_TWO_LEVEL)
def _s511(ctx: Context) -> float:
    H = ctx.hess
    z1, z2, w1, w2 = _pairs(ctx)
    return float(np.max(np.abs(np.log(1 - 1 / (w1 * np.conj(w2))) + H.DDbar(z1, z2))))


@identity("HIR_D", "(z1 - z2) e^{D1 D2 F} = z1 e^{-d_t0 D1 F} - z2 e^{-d_t0 D2 F}", TOL_TWO_LEVEL)
def _hir_d(ctx: Context) -> float:
    H = ctx.hess
    z1, z2, _, _ = _pairs(ctx)
    lhs = (z1 - z2) * np.exp(H.DD(z1, z2))
    rhs = z1 * np.exp(-H.d0D(z1)) - z2 * np.exp(-H.d0D(z2))
    return float(np.max(np.abs(lhs - rhs)))


@identity(
    "HIR_TODA",
    "z1 zbar2 (1 - e^{-D1 Dbar2 F}) = e^{F00 + d_t0 D1 F + d_t0 Dbar2 F}",
    TOL_TWO_LEVEL,
)
def _hir_toda(ctx: Context) -> float:
    H = ctx.hess
    z1, z2, _, _ = _pairs(ctx)
    lhs = z1 * np.conj(z2) * (1 - np.exp(-H.DDbar(z1, z2)))
    rhs = np.exp(H.F00 + H.d0D(z1) + np.conj(H.d0D(z2)))
    return float(np.max(np.abs(lhs - rhs)))


@identity("KP3", "sum over cyclic (z_a - z_b) e^{D(z_a) D(z_b) F} = 0", TOL_TWO_LEVEL)
def _kp3(ctx: Context) -> float:
    H = ctx.hess
    out = 0.0
    for a, b, c in SAMPLE_TRIPLES:
        s = (a - b) * np.exp(H.DD(a, b)) + (b - c) * np.exp(H.DD(b, c)) + (c - a) * np.exp(H.DD(c, a))
        out = max(out, abs(s))
    return float(out)


@identity("DTODA", "d^2F/dt1 dtbar1 = exp(d^2F/dt0^2)", TOL_ONE_LEVEL)
def _dtoda(ctx: Context) -> float:
    H = ctx.hess
    return float(abs(H.entry("t1", "t1bar") - np.exp(H.F00)))


@identity("NEXT", "d^2F/dt2 dtbar1 = 2 (d^2F/dt0 dt1)(d^2F/dt1 dtbar1)", TOL_ONE_LEVEL, applies=lambda ctx: ctx.opts.K >= 2)
def _next(ctx: Context) -> float:
    H = ctx.hess
    return float(abs(H.entry("t2", "t1bar") - 2 * H.F0[0] * H.entry("t1", "t1bar")))


@identity("SYMM", "d v_k/d t_n = d v_n/d t_k (n, k <= 3, including t0)", 1e-6)
def _symm(ctx: Context) -> float:
    H = ctx.hess
    n = min(3, H.K)
    A = H.Fhh_raw[:n, :n]
    B = H.Fhb[:n, :n]
    res = [np.max(np.abs(A - A.T)), np.max(np.abs(H.dv0[:n] - H.F0[:n])), np.max(np.abs(B - B.conj().T))]
    return float(max(res))


@identity(
    "HOMOG",
    "2F = sum_{m,n>=0} T_mn dF/dT_mn with dF/dT_mn = (1/pi) int z^m zbar^n sigma",
    TOL_QUADRATURE,
    fd_based=False,
)
def _homog(ctx: Context) -> float:
    # every moment on the right side comes from the z-antiderivative route,
    # independent of the route used by the production F
    pot, shape, M = ctx.pot, ctx.shape, ctx.opts.M
    mom = ctx.full_moments
    rhs = 0.0
    for m, n, c in pot.terms:
        rhs += c * generalized_moment_dzbar(shape, pot, m, n, M)
    rhs += mom.t0 * mom.v0
    for k in range(1, mom.K + 1):
        if abs(mom.t[k - 1]) > 0:
            vk = generalized_moment_dzbar(shape, pot, k, 0, M)
            rhs += 2 * np.real(mom.t[k - 1] * vk)
    return float(abs(2 * ctx.F - np.real(rhs)))


@identity(
    "QUASI_M",
    "4M F + t0^2 - 2M t0 dF/dt0 - sum_k (2M - k)(t_k dF/dt_k + c.c.) = 0 for sigma = |z|^(2M-2)",
    TOL_ONE_LEVEL,
    applies=lambda ctx: ctx.pot.radial_exponent is not None,
)
def _quasi(ctx: Context) -> float:
    Mx = ctx.pot.radial_exponent
    d0, dk = ctx.gradient
    t = ctx.times
    k = np.arange(1, t.K + 1)
    F = ctx.stencil.F(t)
    s = 4 * Mx * F + t.t0**2 - 2 * Mx * t.t0 * d0 - np.sum((2 * Mx - k) * 2 * np.real(t.t * dk))
    return float(abs(s))


def _covar_entries(H: SecondDerivatives) -> np.ndarray:
    n = min(3, H.K)
    return np.concatenate([[H.F00], H.F0[:n], H.Fhh[:n, :n].ravel(), H.Fhb[:n, :n].ravel()])


@identity(
    "COVAR",
    "second derivatives of F agree for one domain under two densities",
    TOL_ONE_LEVEL,
    applies=lambda ctx: ctx.partner() is not None,
)
def _covar(ctx: Context) -> float:
    other = ctx.partner()
    return float(np.max(np.abs(_covar_entries(ctx.hess) - _covar_entries(other.hess))))


@identity(
    "COVAR_NEG",
    "first derivatives of F differ for one domain under two densities",
    1e-3,
    fd_based=False,
    compare="gt",
    applies=lambda ctx: ctx.partner() is not None and ctx.shape.degree >= 1 and np.any(ctx.shape.u[1:] != 0),
)
def _covar_neg(ctx: Context) -> float:
    other = ctx.partner()
    a, b = ctx.moments, other.moments
    n = min(3, a.K)
    return float(max(abs(a.v0 - b.v0), np.max(np.abs(a.v[:n] - b.v[:n]))))


@identity(
    "BUMP",
    "delta F = (eps/pi) sigma(xi) Phi~(xi) + O(eps^2): |err(eps)/err(eps/2)/4 - 1|",
    0.2,
    fd_based=False,
)
def _bump(ctx: Context) -> float:
    errs = []
    for eps in (BUMP_EPS, BUMP_EPS / 2):
        b, _ = bump_deform(ctx.shape, ctx.pot, BUMP_ANGLE, eps, BUMP_WIDTH, ctx.opts.K, ctx.opts.M)
        errs.append(bump_free_energy_change(b).residual)
    return float(abs(errs[0] / errs[1] / 4.0 - 1.0))


@identity(
    "SEC1_BOUNDARY",
    "calD(xi) calD(z) F = -2 log|1/z - 1/xi| for xi on the curve",
    1e-3,
)
def _sec1(ctx: Context) -> float:
    H = ctx.hess
    phi = np.array(SEC1_ANGLES)

    def f(delta):
        xi = ctx.shape.z((1 + delta) * np.exp(1j * phi))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return H.calDcalD(xi, SEC1_Z) + 2 * np.log(np.abs(1 / SEC1_Z - 1 / xi))

    # quadratic extrapolation to delta = 0 from delta, 2 delta, 3 delta
    d = SEC1_DELTA
    extrapolated = 3 * f(d) - 3 * f(2 * d) + f(3 * d)
    return float(np.max(np.abs(extrapolated)))


@identity("CANON", "{L, M} = L and {Lbar^-1, Mbar} = Lbar^-1", TOL_ONE_LEVEL)
def _canon(ctx: Context) -> float:
    return residual_canonical(ctx.family)


@identity("LAX", "dX/dt_n = {H_n, X}, dX/dtbar_n = -{Hbar_n, X} for X in L, Lbar, M, Mbar; n <= 2", TOL_ONE_LEVEL)
def _lax(ctx: Context) -> float:
    fam = ctx.family
    nmax = min(2, ctx.opts.K)
    return float(
        max(
            residual_lax_sato(fam, n, X, bar)
            for n in range(1, nmax + 1)
            for X in ("L", "Lbar", "M", "Mbar")
            for bar in (False, True)
        )
    )


@identity("STRING", "{L, Lbar} sigma(L, Lbar) = 1 on |w| = 1", TOL_ONE_LEVEL)
def _string(ctx: Context) -> float:
    return residual_string(ctx.family)


DT_CROSS_STEP = 1e-4


@identity(
    "DT_CROSS",
    "dF/dT_11 = (1/pi) int |z|^2 sigma and dF/dIm T_13 = -2 Im (1/pi) int z zbar^3 sigma at fixed t",
    TOL_ONE_LEVEL,
)
def _dt_cross(ctx: Context) -> float:
    solver = replace(ctx.opts.solver, M=ctx.opts.M)
    base_shape = ctx.stencil.base_shape
    target = ctx.times.as_target()
    h = DT_CROSS_STEP

    def F_at(m, n, value):
        pot = ctx.pot.with_entry(m, n, value)
        shape = solve_inverse(target, pot, base_shape, solver)
        return free_energy(shape, pot, ctx.opts.M)

    P = max(ctx.pot.size, 3)
    T = np.zeros((P, P), dtype=complex)
    T[: ctx.pot.size, : ctx.pot.size] = ctx.pot.T
    t11 = T[0, 0]
    fd11 = (F_at(1, 1, t11 + h) - F_at(1, 1, t11 - h)) / (2 * h)
    g11 = generalized_moment(ctx.shape, ctx.pot, 1, 1, ctx.opts.M).real
    t13 = T[0, 2]
    fd13 = (F_at(1, 3, t13 + 1j * h) - F_at(1, 3, t13 - 1j * h)) / (2 * h)
    g13 = generalized_moment(ctx.shape, ctx.pot, 1, 3, ctx.opts.M)
    return float(max(abs(fd11 - g11), abs(fd13 + 2 * g13.imag)))


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Entry:
    id: str
    base: str
    residual: float
    tolerance: float
    passed: bool
    runtime: float
    anchor: str
    compare: str = "le"
    error: str = ""

    @property
    def status(self) -> str:
        if self.error:
            return "ERROR"
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[Entry, ...]
    metadata: dict
    convergence: tuple[tuple[str, str, float, float], ...] = ()
    timestamp: str = ""

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    def ids(self) -> list[str]:
        return sorted({e.id for e in self.entries})

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"# conftau verification report ({self.timestamp})\n")
        for k in sorted(self.metadata):
            out.write(f"# {k} = {self.metadata[k]}\n")
        out.write(f"# overall: {'PASS' if self.passed else 'FAIL'} ({len(self.entries)} entries)\n\n")
        for e in self.entries:
            op = "<=" if e.compare == "le" else ">"
            out.write(f"{e.id:<14} {e.base:<24} residual={e.residual:.3e} {op} {e.tolerance:.1e}  {e.status}\n")
            out.write(f"    anchor: {e.anchor}\n")
            if e.error:
                out.write(f"    error: {e.error}\n")
        if self.convergence:
            out.write("\n# step refinement (residual at h, residual at h/2)\n")
            for id_, base, r1, r2 in self.convergence:
                flag = "" if r2 <= 1.1 * r1 or r2 < ROUNDOFF_FLOOR else "  (increased)"
                out.write(f"{id_:<14} {base:<24} {r1:.3e} {r2:.3e}{flag}\n")
        return out.getvalue()

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "base", "residual", "tolerance", "compare", "status", "runtime_s", "error"])
        for e in self.entries:
            w.writerow([e.id, e.base, f"{e.residual:.17g}", f"{e.tolerance:.17g}", e.compare, e.status, f"{e.runtime:.3f}", e.error])
        return out.getvalue()


def _judge(ident: Identity, residual: float, tol: float) -> bool:
    if not math.isfinite(residual):
        return False
    return residual <= tol if ident.compare == "le" else residual > tol


def run_identity(id: str, base: Base, opts: SuiteOptions | None = None, pool: ContextPool | None = None) -> float:
    """Residual of one identity at one base."""
    if id not in REGISTRY:
        raise KeyError(f"unknown identity id {id!r}; known: {', '.join(default_identities())}")
    opts = opts or SuiteOptions()
    ctx = (pool or ContextPool()).get(base, opts)
    ident = REGISTRY[id]
    if not ident.applies(ctx):
        raise ValueError(f"identity {id} does not apply to base {base.name}")
    return ident.func(ctx)


def _run_base(base: Base, ids, opts: SuiteOptions, tolerances: dict, pool: ContextPool):
    entries = []
    conv = []
    ctx = pool.get(base, opts)
    for id_ in ids:
        ident = REGISTRY[id_]
        tol = float(tolerances.get(id_, ident.tol))
        try:
            if not ident.applies(ctx):
                continue
        except ConftauError:
            pass
        t = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                res = float(ident.func(ctx))
            err = ""
        except (ConftauError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            res, err = float("nan"), f"{type(exc).__name__}: {exc}"
        entries.append(
            Entry(id_, base.name, res, tol, _judge(ident, res, tol) and not err, time.perf_counter() - t, ident.anchor, ident.compare, err)
        )
        if opts.convergence and ident.fd_based and not err:
            half = replace(opts, fd_step=opts.fd_step / 2)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", TruncationWarning)
                    r2 = float(ident.func(pool.get(base, half)))
                conv.append((id_, base.name, res, r2))
            except (ConftauError, ArithmeticError, ValueError):
                pass
    return entries, conv


def run_suite(
    bases: list[Base],
    identities: list[str] | None = None,
    opts: SuiteOptions | None = None,
    tolerances: dict | None = None,
) -> VerificationReport:
    """Evaluate identities over bases; overall pass iff every entry passes."""
    opts = opts or SuiteOptions()
    ids = default_identities() if identities is None else list(identities)
    unknown = [i for i in ids if i not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown identity ids: {', '.join(unknown)}")
    tolerances = tolerances or {}
    pool = ContextPool()
    if opts.workers > 1 and len(bases) > 1:
        with ThreadPoolExecutor(opts.workers) as ex:
            results = list(ex.map(lambda b: _run_base(b, ids, opts, tolerances, pool), bases))
    else:
        results = [_run_base(b, ids, opts, tolerances, pool) for b in bases]
    entries = sorted((e for r in results for e in r[0]), key=lambda e: (e.id, e.base))
    conv = sorted((c for r in results for c in r[1]), key=lambda c: (c[0], c[1]))
    meta = {"K": opts.K, "M": opts.M, "fd_step": opts.fd_step, "newton_tol": opts.solver.newton_tol, "bases": ", ".join(b.name for b in bases)}
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return VerificationReport(tuple(entries), meta, tuple(conv), stamp)


def default_bases() -> list[Base]:
    """Disk and ellipse under the two preset densities."""
    one = BackgroundPotential.uniform()
    sq = BackgroundPotential.radial_power(2)
    disk = DomainShape.circle(1.0)
    ell = DomainShape.ellipse(1.0, 0.1)
    return [
        Base("disk/sigma=1", disk, one),
        Base("disk/sigma=|z|^2", disk, sq),
        Base("ellipse/sigma=1", ell, one),
        Base("ellipse/sigma=|z|^2", ell, sq),
    ]
