"""Domain shapes, background densities and moments by contour quadrature.

A domain is described by its exterior map ``z(w) = r w + sum_j u_j w^{-j}``;
the boundary curve is the image of ``|w| = 1``.  The background density is
``sigma = d_z d_zbar U`` with ``U = -sum_{m,n>=1} T_mn z^m zbar^n``.

All moment integrals are written as contour integrals over the boundary and
evaluated with the trapezoidal rule in the ``w``-angle, which converges
geometrically for these analytic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GeometryError, QuadratureError
from .series import LaurentSeries

SIGMA_FLOOR = 1e-6
DEFAULT_K = 8
DEFAULT_M = 512


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DomainShape:
    """Exterior conformal map data ``(r, u_0..u_J)``."""

    r: float
    u: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=complex))

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.u, dtype=complex)).copy()
        if u.size == 0:
            u = np.zeros(1, dtype=complex)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "r", float(self.r))
        if not self.r > 0:
            raise GeometryError(f"conformal radius must be positive, got {self.r}")

    @classmethod
    def circle(cls, radius: float, center: complex = 0.0) -> "DomainShape":
        return cls(radius, np.array([center], dtype=complex))

    @classmethod
    def ellipse(cls, r: float = 1.0, u1: complex = 0.1) -> "DomainShape":
        return cls(r, np.array([0.0, u1], dtype=complex))

    def key(self) -> tuple:
        return (self.r, tuple(self.u.tolist()))

    def __eq__(self, other):
        return isinstance(other, DomainShape) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def degree(self) -> int:
        """Largest ``j`` with a stored coefficient ``u_j``."""
        return self.u.size - 1

    def z(self, w):
        w = np.asarray(w, dtype=complex)
        out = self.r * w
        winv = 1.0 / w
        p = np.ones_like(w)
        for uj in self.u:
            out = out + uj * p
            p = p * winv
        return out

    def dz(self, w):
        """``dz/dw``."""
        w = np.asarray(w, dtype=complex)
        out = np.full_like(w, self.r)
        winv = 1.0 / w
        p = winv * winv
        for j, uj in enumerate(self.u[1:], start=1):
            out = out - j * uj * p
            p = p * winv
        return out

    def d2z(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        winv = 1.0 / w
        p = winv**3
        for j, uj in enumerate(self.u[1:], start=1):
            out = out + j * (j + 1) * uj * p
            p = p * winv
        return out

    def boundary(self, m: int = DEFAULT_M):
        """Equispaced samples: ``theta``, ``z`` and ``dz/dtheta``."""
        theta = 2.0 * np.pi * np.arange(m) / m
        w = np.exp(1j * theta)
        return theta, self.z(w), 1j * w * self.dz(w)

    def rotated(self, alpha: float) -> "DomainShape":
        """The shape rotated by ``z -> exp(i alpha) z`` (``r`` stays real)."""
        j = np.arange(self.u.size)
        return DomainShape(self.r, self.u * np.exp(1j * (j + 1) * alpha))

    def as_series(self, nneg: int = 24, npos: int = 24) -> LaurentSeries:
        terms = {1: self.r}
        for j, uj in enumerate(self.u):
            terms[-j] = terms.get(-j, 0) + uj
        return LaurentSeries.from_dict(terms, nneg, npos)

    def area(self, m: int = DEFAULT_M) -> float:
        _, z, zd = self.boundary(m)
        return float(0.5 * np.mean(np.imag(np.conj(z) * zd)) * 2 * np.pi)

    def validate(self, m: int = DEFAULT_M) -> None:
        """Raise :class:`GeometryError` unless the curve is simple, regular and encloses 0."""
        _, z, zd = self.boundary(m)
        speed = np.abs(zd)
        if np.min(speed) <= 1e-12 * max(1.0, np.max(speed)):
            raise GeometryError("degenerate parametrization: z'(w) vanishes on |w|=1")
        if _winding_number(zd, 0.0) != 1:
            raise GeometryError("boundary tangent does not turn exactly once")
        if _winding_number(z, 0.0) != 1:
            raise GeometryError("the origin is not inside the curve")
        if _self_intersects(z):
            raise GeometryError("boundary curve self-intersects")


def _winding_number(z: np.ndarray, point: complex) -> int:
    d = z - point
    dphi = np.angle(np.roll(d, -1) / d)
    return int(round(np.sum(dphi) / (2 * np.pi)))


def _self_intersects(z: np.ndarray) -> bool:
    """Pairwise segment intersection test for a closed polyline."""
    a = z
    b = np.roll(z, -1)
    n = a.size
    ax, ay = a.real[:, None], a.imag[:, None]
    bx, by = b.real[:, None], b.imag[:, None]
    cx, cy = a.real[None, :], a.imag[None, :]
    dx, dy = b.real[None, :], b.imag[None, :]

    def orient(px, py, qx, qy, rx, ry):
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    o1 = orient(ax, ay, bx, by, cx, cy)
    o2 = orient(ax, ay, bx, by, dx, dy)
    o3 = orient(cx, cy, dx, dy, ax, ay)
    o4 = orient(cx, cy, dx, dy, bx, by)
    cross = (o1 * o2 < 0) & (o3 * o4 < 0)
    i, j = np.indices((n, n))
    # adjacent segments share an endpoint
    adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
    return bool(np.any(cross & ~adjacent))


def point_in_domain(shape: DomainShape, pts, m: int = 2048) -> np.ndarray:
    """Winding-number test: True where ``pts`` lie inside the boundary curve."""
    _, zc, _ = shape.boundary(m)
    pts = np.atleast_1d(np.asarray(pts, dtype=complex))
    out = np.empty(pts.shape, dtype=bool)
    flat = pts.ravel()
    res = out.ravel()
    for start in range(0, flat.size, 256):
        p = flat[start:start + 256, None]
        d = zc[None, :] - p
        dphi = np.angle(np.roll(d, -1, axis=1) / d)
        res[start:start + 256] = np.abs(np.sum(dphi, axis=1)) > np.pi
    return out


# ---------------------------------------------------------------------------
# background potential
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BackgroundPotential:
    """Coefficients ``T_mn`` (1-based, stored at ``T[m-1, n-1]``) of ``U``."""

    T: np.ndarray
    name: str = ""

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.T, dtype=complex)).copy()
        if T.shape[0] != T.shape[1]:
            raise GeometryError("T must be square")
        if not np.allclose(T, T.conj().T, rtol=0, atol=1e-14):
            raise GeometryError("T must be Hermitian so that U and sigma are real")
        T.setflags(write=False)
        object.__setattr__(self, "T", T)

    @classmethod
    def uniform(cls) -> "BackgroundPotential":
        """``sigma = 1``, ``U = z zbar``."""
        return cls(np.array([[-1.0]]), "sigma=1")

    @classmethod
    def radial_power(cls, m: int) -> "BackgroundPotential":
        """``sigma = |z|^(2m-2)``, ``U = |z|^(2m) / m^2``."""
        if m < 1:
            raise ValueError("m must be >= 1")
        T = np.zeros((m, m), dtype=complex)
        T[m - 1, m - 1] = -1.0 / m**2
        name = "sigma=1" if m == 1 else f"sigma=|z|^{2 * m - 2}"
        return cls(T, name)

    def key(self) -> tuple:
        return tuple(np.round(self.T, 15).ravel().tolist())

    def __eq__(self, other):
        return isinstance(other, BackgroundPotential) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def size(self) -> int:
        return self.T.shape[0]

    @cached_property
    def terms(self) -> list[tuple[int, int, complex]]:
        """Nonzero ``(m, n, T_mn)`` triples."""
        idx = np.argwhere(np.abs(self.T) > 0)
        return [(int(i) + 1, int(j) + 1, complex(self.T[i, j])) for i, j in idx]

    @cached_property
    def radial_exponent(self) -> int | None:
        """``m`` if ``sigma = |z|^(2m-2)`` exactly, else ``None``."""
        if len(self.terms) == 1:
            m, n, c = self.terms[0]
            if m == n and abs(c + 1.0 / m**2) < 1e-15:
                return m
        return None

    def with_entry(self, m: int, n: int, value: complex) -> "BackgroundPotential":
        """Copy with ``T_mn = value`` and ``T_nm = conj(value)``."""
        size = max(self.size, m, n)
        T = np.zeros((size, size), dtype=complex)
        T[: self.size, : self.size] = self.T
        T[m - 1, n - 1] = value
        T[n - 1, m - 1] = np.conj(value)
        return BackgroundPotential(T)

    def U(self, z, zb):
        out = 0.0
        for m, n, c in self.terms:
            out = out - c * z**m * zb**n
        return out

    def dU_dz(self, z, zb):
        out = 0.0
        for m, n, c in self.terms:
            out = out - m * c * z ** (m - 1) * zb**n
        return out

    def dU_dzb(self, z, zb):
        out = 0.0
        for m, n, c in self.terms:
            out = out - n * c * z**m * zb ** (n - 1)
        return out

    def sigma(self, z, zb):
        out = 0.0
        for m, n, c in self.terms:
            out = out - m * n * c * z ** (m - 1) * zb ** (n - 1)
        return np.real(out) if np.isrealobj(np.asarray(z)) else out

    def sigma_real(self, z):
        """Real density at points ``z`` (uses ``zbar = conj(z)``)."""
        return np.real(self.sigma(z, np.conj(z)))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MomentVector:
    """``t0``, ``t_1..t_K`` (harmonic part inside) and ``v0``, ``v_1..v_K``."""

    t0: float
    t: np.ndarray
    v0: float
    v: np.ndarray

    @property
    def K(self) -> int:
        return self.t.size

    def __sub__(self, other: "MomentVector") -> "MomentVector":
        k = min(self.K, other.K)
        return MomentVector(
            self.t0 - other.t0, self.t[:k] - other.t[:k], self.v0 - other.v0, self.v[:k] - other.v[:k]
        )


def _boundary_moments(z, zd, weights, pot: BackgroundPotential, K: int):
    """Contour moments from nodes ``z``, ``dz/dtheta`` and quadrature weights."""
    zb = np.conj(z)
    S = pot.dU_dz(z, zb)
    dz = zd * weights
    base = S * dz / (2j * np.pi)
    t0 = np.sum(base)
    t = np.empty(K, dtype=complex)
    v = np.empty(K, dtype=complex)
    zinv = 1.0 / z
    pn = np.ones_like(z)
    pp = np.ones_like(z)
    for k in range(1, K + 1):
        pn = pn * zinv
        pp = pp * z
        t[k - 1] = np.sum(pn * base) / k
        v[k - 1] = np.sum(pp * base)
    U = pot.U(z, zb)
    v0 = np.sum(np.imag(np.log(np.abs(z)) * S * dz - U * dz / (2 * z))) / np.pi
    return t0, t, v0, v


def _check_sigma(shape, pot, z):
    s = np.abs(pot.sigma(z, np.conj(z)))
    if np.min(s) <= SIGMA_FLOOR:
        raise GeometryError(
            f"|sigma| = {np.min(s):.3e} on the curve is below the floor {SIGMA_FLOOR}"
        )


def compute_moments(
    shape: DomainShape,
    pot: BackgroundPotential,
    K: int = DEFAULT_K,
    M: int = DEFAULT_M,
    *,
    validate: bool = False,
    check_convergence: bool = False,
    tol: float = 1e-10,
) -> MomentVector:
    """Moments ``t0, t_k, v0, v_k`` (``k <= K``) by trapezoidal contour quadrature.

    ``t_k = (1/2 pi i k) oint z^-k dU/dz dz``, ``v_k = (1/2 pi i) oint z^k dU/dz dz``
    and ``t0`` is the ``k = 0`` case of the latter.  ``v0 = (2/pi) int log|z| sigma``
    is reduced to the boundary with Green's second identity (the point charge
    at the origin contributes ``U(0) = 0``).
    """
    if validate:
        shape.validate(M)
    _, z, zd = shape.boundary(M)
    _check_sigma(shape, pot, z)
    t0, t, v0, v = _boundary_moments(z, zd, 2 * np.pi / M, pot, K)
    if check_convergence:
        ref = compute_moments(shape, pot, K, 2 * M)
        err = max(
            abs(t0 - ref.t0),
            abs(v0 - ref.v0),
            np.max(np.abs(t - ref.t), initial=0),
            np.max(np.abs(v - ref.v), initial=0),
        )
        if err > tol:
            raise QuadratureError(f"moments changed by {err:.3e} when doubling M={M}")
    if abs(t0.imag) > 1e-10 * max(1.0, abs(t0)):
        raise QuadratureError("t0 has a non-negligible imaginary part")
    return MomentVector(float(t0.real), t, float(v0), v)


def times_count(shape: DomainShape, pot: BackgroundPotential) -> int:
    """Upper bound on the index of a nonzero ``t_k`` for this shape and density.

    On the curve ``dU/dz`` is a Laurent polynomial in ``w`` whose positive
    degree bounds the number of nonzero harmonic moments.
    """
    J = shape.degree
    deg = max((m - 1) + n * J for m, n, _ in pot.terms)
    return max(deg + 1, 1)


def generalized_moment(
    shape: DomainShape, pot: BackgroundPotential, a: int, b: int, M: int = DEFAULT_M
) -> complex:
    """``(1/pi) int_D z^a zbar^b sigma d^2z`` as a boundary integral.

    Uses ``int_D d_zbar f = (1/2i) oint f dz`` with the termwise antiderivative
    ``f = -sum m n T_mn z^(a+m-1) zbar^(b+n) / (b+n)``.
    """
    _, z, zd = shape.boundary(M)
    zb = np.conj(z)
    f = 0.0
    for m, n, c in pot.terms:
        f = f - m * n * c * z ** (a + m - 1) * zb ** (b + n) / (b + n)
    return complex(np.sum(f * zd) * (2 * np.pi / M) / (2j * np.pi))


def generalized_moment_dzbar(
    shape: DomainShape, pot: BackgroundPotential, a: int, b: int, M: int = DEFAULT_M
) -> complex:
    """Same moment through the ``z``-antiderivative: ``int_D d_z f = -(1/2i) oint f dzbar``."""
    _, z, zd = shape.boundary(M)
    zb = np.conj(z)
    f = 0.0
    for m, n, c in pot.terms:
        f = f - m * n * c * z ** (a + m) * zb ** (b + n - 1) / (a + m)
    return complex(-np.sum(f * np.conj(zd)) * (2 * np.pi / M) / (2j * np.pi))


def moment_table(shape: DomainShape, pot: BackgroundPotential, M: int = DEFAULT_M) -> np.ndarray:
    """``W[m-1, n-1] = generalized_moment(m, n)`` for ``1 <= m, n <= P``."""
    P = pot.size
    W = np.empty((P, P), dtype=complex)
    for m in range(1, P + 1):
        for n in range(1, P + 1):
            W[m - 1, n - 1] = generalized_moment(shape, pot, m, n, M)
    return W


# ---------------------------------------------------------------------------
# Schwarz function
# ---------------------------------------------------------------------------


def schwarz_eval(mom: MomentVector, z):
    """Truncated Laurent series of the Schwarz function built from the moments."""
    z = np.asarray(z, dtype=complex)
    out = mom.t0 / z
    for k in range(1, mom.K + 1):
        out = out + k * mom.t[k - 1] * z ** (k - 1) + mom.v[k - 1] * z ** (-k - 1)
    return out


# ---------------------------------------------------------------------------
# bump deformation
# ---------------------------------------------------------------------------


def raised_cosine(theta, center: float, width: float):
    """``(1 + cos(pi d / width)) / 2`` on ``|d| < width``, zero elsewhere."""
    d = np.angle(np.exp(1j * (np.asarray(theta) - center)))
    return np.where(np.abs(d) < width, 0.5 * (1 + np.cos(np.pi * d / width)), 0.0)


def raised_cosine_deriv(theta, center: float, width: float):
    d = np.angle(np.exp(1j * (np.asarray(theta) - center)))
    return np.where(
        np.abs(d) < width, -0.5 * np.pi / width * np.sin(np.pi * d / width), 0.0
    )


@dataclass(frozen=True)
class BumpDeformation:
    """A shape with an outward bump of area ``eps`` attached near ``z(exp(i xi))``.

    The bumped boundary is ``z(theta) + a k(theta) n(theta)`` with ``n`` the
    outward unit normal and ``k`` a raised cosine of half-width ``width``.
    Quadrature over the bump footprint uses Gauss-Legendre nodes ``theta``
    with weights ``weights``.
    """

    shape: DomainShape
    pot: BackgroundPotential
    xi_angle: float
    width: float
    eps: float
    amplitude: float
    theta: np.ndarray
    weights: np.ndarray

    @property
    def xi(self) -> complex:
        return complex(self.shape.z(np.exp(1j * self.xi_angle)))

    def _base(self, theta):
        w = np.exp(1j * theta)
        z = self.shape.z(w)
        dz = self.shape.dz(w)
        q = w * dz  # outward normal direction, = -i dz/dtheta
        qd = 1j * w * (dz + w * self.shape.d2z(w))
        aq = np.abs(q)
        n = q / aq
        nd = qd / aq - q * np.real(np.conj(q) * qd) / aq**3
        return z, 1j * q, n, nd

    def footprint(self, theta=None):
        """Base points ``z``, ``dz/dtheta``, outward normal and its derivative."""
        return self._base(self.theta if theta is None else theta)

    def profile(self, theta=None):
        """Normal displacement ``a k(theta)`` and its derivative."""
        th = self.theta if theta is None else theta
        return (
            self.amplitude * raised_cosine(th, self.xi_angle, self.width),
            self.amplitude * raised_cosine_deriv(th, self.xi_angle, self.width),
        )

    def curve(self, m: int = DEFAULT_M) -> np.ndarray:
        """Samples of the perturbed boundary at ``m`` equispaced ``w``-angles."""
        theta = 2 * np.pi * np.arange(m) / m
        z, _, n, _ = self._base(theta)
        h, _ = self.profile(theta)
        return z + h * n

    def perturbed_nodes(self, s=1.0):
        """Nodes, tangents on the curve displaced by ``s`` times the bump profile."""
        z, zd, n, nd = self.footprint()
        h, hd = self.profile()
        return z + s * h * n, zd + s * (hd * n + h * nd)

    @property
    def footprint_density(self) -> np.ndarray:
        """First-order area per unit angle, ``a k(theta) |dz/dtheta|``."""
        _, zd, _, _ = self.footprint()
        h, _ = self.profile()
        return h * np.abs(zd)


def _gauss_interval(lo: float, hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def bump_deform(
    shape: DomainShape,
    pot: BackgroundPotential,
    xi_angle: float,
    eps: float,
    kernel_width: float = 0.3,
    K: int = DEFAULT_K,
    M: int = DEFAULT_M,
    n_nodes: int = 256,
):
    """Attach a bump of exact area ``eps`` and return ``(bump, delta_moments)``.

    The moment change is the contour integral over the perturbed curve minus
    the one over the base curve; the two differ only on the bump footprint,
    where Gauss-Legendre quadrature is used.
    """
    if not 0 < kernel_width < np.pi:
        raise ValueError("kernel_width must lie in (0, pi)")
    theta, wts = _gauss_interval(xi_angle - kernel_width, xi_angle + kernel_width, n_nodes)
    proto = BumpDeformation(shape, pot, xi_angle, kernel_width, eps, 1.0, theta, wts)
    z, zd, n, nd = proto.footprint()
    k, kd = proto.profile()
    kn = k * n
    knd = kd * n + k * nd
    # area(a) - area(0) = c1 a + c2 a^2, exactly
    c1 = 0.5 * np.sum(np.imag(np.conj(z) * knd + np.conj(kn) * zd) * wts)
    c2 = 0.5 * np.sum(np.imag(np.conj(kn) * knd) * wts)
    if abs(c2) < 1e-300:
        a = eps / c1
    else:
        a = (-c1 + np.sqrt(c1 * c1 + 4 * c2 * eps)) / (2 * c2)
    bump = BumpDeformation(shape, pot, xi_angle, kernel_width, eps, float(a), theta, wts)

    zp, zpd = bump.perturbed_nodes()
    if _self_intersects(bump.curve(max(M, 1024))):
        raise GeometryError("bumped curve self-intersects")
    _check_sigma(shape, pot, zp)
    new = _boundary_moments(zp, zpd, wts, pot, K)
    old = _boundary_moments(z, zd, wts, pot, K)
    delta = MomentVector(
        float(np.real(new[0] - old[0])), new[1] - old[1], float(new[2] - old[2]), new[3] - old[3]
    )
    return bump, delta


def bump_moment_prediction(bump: BumpDeformation, K: int = DEFAULT_K, pointwise: bool = False):
    """First-order moment changes ``(delta t0, delta t_k)`` for the bump.

    ``pointwise=True`` concentrates the whole area at ``xi``; otherwise the
    point law is integrated over the footprint with its area density.
    """
    if pointwise:
        xs = np.array([bump.xi])
        dens = np.array([bump.eps])
    else:
        xs, _, _, _ = bump.footprint()
        dens = bump.footprint_density * bump.weights
    sig = bump.pot.sigma_real(xs)
    dt0 = np.sum(dens * sig) / np.pi
    k = np.arange(1, K + 1)
    dt = np.array([np.sum(dens * sig * xs ** (-kk)) / (np.pi * kk) for kk in k])
    return float(dt0), dt
