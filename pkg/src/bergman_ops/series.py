"""Truncated Taylor series on the unit disk.

A :class:`TruncatedSeries` holds the coefficients ``c_0..c_N`` of a
polynomial window of an analytic function, ``c_m`` being the coefficient of
``z**m``. All operations return new series; nothing is mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConstantTermOutsideDisk, InvalidOrder


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Degree-``N`` Taylor window with complex double coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def trunc_order(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def zeros(cls, N: int) -> "TruncatedSeries":
        return cls(np.zeros(N + 1, dtype=np.complex128))

    @classmethod
    def monomial(cls, k: int, N: int | None = None, scale: complex = 1.0) -> "TruncatedSeries":
        """``scale * z**k`` on a window of order ``max(N, k)``."""
        N = k if N is None else max(N, k)
        c = np.zeros(N + 1, dtype=np.complex128)
        c[k] = scale
        return cls(c)

    def window(self, N: int) -> "TruncatedSeries":
        """Truncate or zero-pad to order ``N``."""
        c = np.zeros(N + 1, dtype=np.complex128)
        m = min(N, self.trunc_order) + 1
        c[:m] = self.coeffs[:m]
        return TruncatedSeries(c)

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, m):
        return self.coeffs[m]

    def __add__(self, other):
        if isinstance(other, Number):
            c = self.coeffs.copy()
            c[0] += other
            return TruncatedSeries(c)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        N = max(self.trunc_order, other.trunc_order)
        return TruncatedSeries(self.window(N).coeffs + other.window(N).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries(self.coeffs * other)
        if isinstance(other, TruncatedSeries):
            return multiply(self, other, max(self.trunc_order, other.trunc_order))
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self):
        return f"TruncatedSeries(N={self.trunc_order}, coeffs={np.array2string(self.coeffs, precision=4, threshold=8)})"


def as_series(f) -> TruncatedSeries:
    if isinstance(f, TruncatedSeries):
        return f
    return TruncatedSeries(np.atleast_1d(f))


def multiply(f, g, N: int) -> TruncatedSeries:
    """Cauchy product of ``f`` and ``g`` truncated at order ``N``."""
    f, g = as_series(f), as_series(g)
    a = f.coeffs[: N + 1]
    b = g.coeffs[: N + 1]
    out = np.zeros(N + 1, dtype=np.complex128)
    prod = np.convolve(a, b)[: N + 1]
    out[: prod.size] = prod
    return TruncatedSeries(out)


def falling_factorial(m, n: int):
    """``m (m-1) ... (m-n+1)``, i.e. ``m!/(m-n)!``; zero when ``m < n``.

    Works elementwise on integer arrays.
    """
    m = np.asarray(m, dtype=float)
    out = np.ones_like(m)
    for i in range(n):
        out = out * (m - i)
    return np.where(m >= n, out, 0.0)


def derivative(f, n: int = 1) -> TruncatedSeries:
    """``n``-th derivative; the window shrinks to order ``max(N - n, 0)``."""
    if n < 0:
        raise InvalidOrder(f"derivative order must be >= 0, got {n}")
    f = as_series(f)
    if n == 0:
        return f
    N = f.trunc_order
    if N < n:
        return TruncatedSeries.zeros(0)
    m = np.arange(n, N + 1)
    return TruncatedSeries(falling_factorial(m, n) * f.coeffs[n:])


def compose(f, phi, N: int) -> TruncatedSeries:
    """Coefficients ``0..N`` of ``f(phi(z))`` by Horner accumulation.

    Every available coefficient of ``f`` takes part. When ``phi(0) == 0`` the
    result is exact on the window; otherwise its error is governed by the
    tail of ``f`` beyond its window.
    """
    f, phi = as_series(f), as_series(phi)
    if abs(phi.coeffs[0]) >= 1:
        raise ConstantTermOutsideDisk(f"|phi(0)| = {abs(phi.coeffs[0])} >= 1")
    ph = phi.window(N).coeffs
    acc = np.zeros(N + 1, dtype=np.complex128)
    K = f.trunc_order
    if phi.coeffs[0] == 0:
        # powers of phi beyond N vanish on the window
        K = min(K, N)
    for k in range(K, -1, -1):
        acc = np.convolve(acc, ph)[: N + 1]
        acc[0] += f.coeffs[k]
    return TruncatedSeries(acc)


def rational_expand(q: complex, s: float, N: int) -> TruncatedSeries:
    """Taylor window of ``(1 - q z)**(-s)``.

    Uses ``c_0 = 1, c_m = c_{m-1} * q * (s + m - 1) / m`` so that large
    orders never touch a Gamma function.
    """
    m = np.arange(1, N + 1)
    steps = q * (s + m - 1) / m
    c = np.empty(N + 1, dtype=np.complex128)
    c[0] = 1.0
    c[1:] = np.cumprod(steps)
    return TruncatedSeries(c)


def evaluate(f, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    f = as_series(f)
    return P.polyval(z, f.coeffs)
