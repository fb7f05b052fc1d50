"""Truncated Laurent series in ``w`` and the ``(w, t0)`` Poisson bracket.

Coefficients are stored densely over the exponent range ``[-nneg, npos]``.
Series are immutable; every operation returns a new object.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from .errors import TruncationError

DEFAULT_NNEG = 24
DEFAULT_NPOS = 24


class LaurentSeries:
    """Truncated Laurent series ``sum_j c_j w^j`` for ``-nneg <= j <= npos``."""

    __slots__ = ("_c", "nneg", "npos")

    #: dropped coefficients larger than this (relative to the largest kept one)
    #: make a product raise :class:`TruncationError`
    overflow_tol = 1e-10

    def __init__(self, coeffs, nneg: int = DEFAULT_NNEG, npos: int | None = None):
        c = np.asarray(coeffs, dtype=complex).copy()
        if npos is None:
            npos = c.size - 1 - nneg
        if c.size != nneg + npos + 1:
            raise ValueError(
                f"expected {nneg + npos + 1} coefficients for range "
                f"[-{nneg}, {npos}], got {c.size}"
            )
        c.setflags(write=False)
        self._c = c
        self.nneg = int(nneg)
        self.npos = int(npos)

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, nneg: int = DEFAULT_NNEG, npos: int = DEFAULT_NPOS) -> "LaurentSeries":
        return cls(np.zeros(nneg + npos + 1), nneg, npos)

    @classmethod
    def from_dict(
        cls, terms: dict[int, complex], nneg: int = DEFAULT_NNEG, npos: int = DEFAULT_NPOS
    ) -> "LaurentSeries":
        c = np.zeros(nneg + npos + 1, dtype=complex)
        for j, v in terms.items():
            if not -nneg <= j <= npos:
                raise TruncationError(f"exponent {j} outside [-{nneg}, {npos}]")
            c[j + nneg] = v
        return cls(c, nneg, npos)

    @classmethod
    def constant(cls, value: complex, nneg: int = DEFAULT_NNEG, npos: int = DEFAULT_NPOS):
        return cls.from_dict({0: value}, nneg, npos)

    @classmethod
    def from_samples(
        cls, samples, nneg: int = DEFAULT_NNEG, npos: int = DEFAULT_NPOS
    ) -> "LaurentSeries":
        """Project equispaced samples on ``|w| = 1`` onto exponents ``[-nneg, npos]``.

        ``samples[l]`` is the value at ``w = exp(2 pi i l / M)``.
        """
        f = np.asarray(samples, dtype=complex)
        m = f.size
        if m < nneg + npos + 1:
            raise ValueError(f"need at least {nneg + npos + 1} samples, got {m}")
        fhat = np.fft.fft(f) / m
        j = np.arange(-nneg, npos + 1)
        return cls(fhat[j % m], nneg, npos)

    # -- access -----------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def exponents(self) -> np.ndarray:
        return np.arange(-self.nneg, self.npos + 1)

    def __getitem__(self, j: int) -> complex:
        if -self.nneg <= j <= self.npos:
            return complex(self._c[j + self.nneg])
        return 0j

    def as_dict(self, tol: float = 0.0) -> dict[int, complex]:
        return {
            int(j): complex(c) for j, c in zip(self.exponents, self._c) if abs(c) > tol
        }

    def __repr__(self) -> str:
        terms = ", ".join(f"{j}: {c:.6g}" for j, c in self.as_dict(1e-14).items())
        return f"LaurentSeries({{{terms}}}, nneg={self.nneg}, npos={self.npos})"

    # -- evaluation -------------------------------------------------------
    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        # Horner in w for the positive part, in 1/w for the negative part
        for c in self._c[self.nneg:][::-1]:
            out = out * w + c
        neg = np.zeros_like(w)
        if self.nneg:
            winv = 1.0 / w
            for c in self._c[: self.nneg]:
                neg = (neg + c) * winv
        return out + neg

    def circle_sample(self, m: int) -> np.ndarray:
        """Values at ``w = exp(2 pi i l / m)``, ``l = 0..m-1``."""
        if m < self.nneg + self.npos + 1:
            raise ValueError("too few sample points for the coefficient range")
        buf = np.zeros(m, dtype=complex)
        np.add.at(buf, self.exponents % m, self._c)
        return np.fft.ifft(buf) * m

    # -- arithmetic -------------------------------------------------------
    def _aligned(self, other: "LaurentSeries"):
        nneg = max(self.nneg, other.nneg)
        npos = max(self.npos, other.npos)
        return self.resized(nneg, npos), other.resized(nneg, npos), nneg, npos

    def resized(self, nneg: int, npos: int, check: bool = False) -> "LaurentSeries":
        """Pad or cut to a new exponent range."""
        c = np.zeros(nneg + npos + 1, dtype=complex)
        lo = max(-nneg, -self.nneg)
        hi = min(npos, self.npos)
        if hi >= lo:
            c[lo + nneg: hi + nneg + 1] = self._c[lo + self.nneg: hi + self.nneg + 1]
        if check:
            _check_dropped(self._c, self.exponents, lo, hi)
        return LaurentSeries(c, nneg, npos)

    def __add__(self, other):
        if isinstance(other, LaurentSeries):
            a, b, nneg, npos = self._aligned(other)
            return LaurentSeries(a._c + b._c, nneg, npos)
        c = self._c.copy()
        c[self.nneg] += other
        return LaurentSeries(c, self.nneg, self.npos)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(-self._c, self.nneg, self.npos)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self.multiply(other)

    def multiply(self, other, check: bool = True):
        """Product; with ``check=False`` out-of-range terms are dropped silently."""
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self._c * other, self.nneg, self.npos)
        nneg = max(self.nneg, other.nneg)
        npos = max(self.npos, other.npos)
        full = np.convolve(self._c, other._c)
        lo_full = -(self.nneg + other.nneg)
        exps = np.arange(lo_full, lo_full + full.size)
        if check:
            _check_dropped(full, exps, -nneg, npos)
        keep = (exps >= -nneg) & (exps <= npos)
        c = np.zeros(nneg + npos + 1, dtype=complex)
        c[exps[keep] + nneg] = full[keep]
        return LaurentSeries(c, nneg, npos)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return LaurentSeries(self._c / scalar, self.nneg, self.npos)

    def __pow__(self, n: int) -> "LaurentSeries":
        if n < 0:
            return self.reciprocal() ** (-n)
        out = LaurentSeries.constant(1.0, self.nneg, self.npos)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def reciprocal(self, m: int = 1024) -> "LaurentSeries":
        """``1/s`` as the Laurent expansion valid on the unit circle."""
        vals = self.circle_sample(m)
        if np.min(np.abs(vals)) == 0.0:
            raise ZeroDivisionError("series vanishes on the unit circle")
        return LaurentSeries.from_samples(1.0 / vals, self.nneg, self.npos)

    def conj_coeffs(self) -> "LaurentSeries":
        """``sum conj(c_j) w^j`` (the bar operation on series)."""
        return LaurentSeries(np.conj(self._c), self.nneg, self.npos)

    def reflect(self) -> "LaurentSeries":
        """Substitute ``w -> 1/w``."""
        return LaurentSeries(self._c[::-1], self.npos, self.nneg)

    def w_dw(self) -> "LaurentSeries":
        """``w d/dw``: ``c_j -> j c_j``."""
        return LaurentSeries(self._c * self.exponents, self.nneg, self.npos)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def allclose(self, other: "LaurentSeries", atol: float) -> bool:
        return (self - other).max_abs() <= atol


def _check_dropped(c, exps, lo, hi):
    dropped = c[(exps < lo) | (exps > hi)]
    if dropped.size:
        kept_max = np.max(np.abs(c[(exps >= lo) & (exps <= hi)]), initial=0.0)
        worst = np.max(np.abs(dropped))
        if worst > LaurentSeries.overflow_tol * max(kept_max, 1.0):
            raise TruncationError(
                f"truncation overflow: dropped coefficient of size {worst:.3e} "
                f"outside [{lo}, {hi}]"
            )


def project_parts(s: LaurentSeries) -> tuple[LaurentSeries, complex, LaurentSeries]:
    """Split ``s`` into (exponents >= 1, constant term, exponents <= -1)."""
    c = s.coeffs
    plus = np.zeros_like(c)
    minus = np.zeros_like(c)
    plus[s.nneg + 1:] = c[s.nneg + 1:]
    minus[: s.nneg] = c[: s.nneg]
    return (
        LaurentSeries(plus, s.nneg, s.npos),
        complex(c[s.nneg]),
        LaurentSeries(minus, s.nneg, s.npos),
    )


SeriesFamily = Union[Callable[[float], LaurentSeries], LaurentSeries]


def default_t0_step(t0: float) -> float:
    return 1e-4 * max(1.0, abs(t0))


def _value_and_t0_derivative(f: SeriesFamily, t0: float, step: float, df):
    if isinstance(f, LaurentSeries):
        return f, (df if df is not None else f * 0.0)
    value = f(t0)
    if df is None:
        df = (f(t0 + step) - f(t0 - step)) / (2.0 * step)
    return value, df


def poisson_bracket(
    f: SeriesFamily,
    g: SeriesFamily,
    t0: float,
    step: float | None = None,
    *,
    df_dt0: LaurentSeries | None = None,
    dg_dt0: LaurentSeries | None = None,
) -> LaurentSeries:
    """``{f, g} = w f_w g_t0 - w g_w f_t0`` at the given ``t0``.

    ``f`` and ``g`` are callables mapping ``t0`` to a series, or plain series
    (treated as independent of ``t0`` unless a derivative is supplied).
    The ``t0`` derivatives are central differences unless ``df_dt0`` /
    ``dg_dt0`` are given explicitly.
    """
    if step is None:
        step = default_t0_step(t0)
    fv, ft = _value_and_t0_derivative(f, t0, step, df_dt0)
    gv, gt = _value_and_t0_derivative(g, t0, step, dg_dt0)
    return fv.w_dw() * gt - gv.w_dw() * ft
