"""Weighted Bergman spaces and the derivative Hardy space S^2_1.

Both spaces have the monomials as an orthogonal basis, so each is fully
described by the sequence ``w_m = <z^m, z^m>``:

* Bergman ``A^2_alpha``: ``w_m = m! Gamma(2+alpha) / Gamma(m+2+alpha)``
* derivative Hardy ``S^2_1``: ``w_m = (m+1)(m+2)/2 = 1/delta_m``

Inner products, kernels and unit-basis coordinates are all diagonal in the
monomials and are computed from these weights, never by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidAlpha, InvalidOrder, PointOutsideDisk
from .series import TruncatedSeries, as_series, falling_factorial, rational_expand

BERGMAN = "bergman"
DERIVATIVE_HARDY = "derivative_hardy"


@dataclass(frozen=True)
class SpaceSpec:
    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in (BERGMAN, DERIVATIVE_HARDY):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == BERGMAN:
            if not (math.isfinite(self.alpha) and self.alpha > -1):
                raise InvalidAlpha(f"Bergman weight needs alpha > -1, got {self.alpha}")
        else:
            object.__setattr__(self, "alpha", 0.0)

    @classmethod
    def bergman(cls, alpha: float = 0.0) -> "SpaceSpec":
        return cls(BERGMAN, float(alpha))

    @classmethod
    def derivative_hardy(cls) -> "SpaceSpec":
        return cls(DERIVATIVE_HARDY)

    @property
    def is_bergman(self) -> bool:
        return self.kind == BERGMAN

    def to_dict(self) -> dict:
        if self.is_bergman:
            return {"kind": self.kind, "alpha": self.alpha}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        kind = d.get("kind", BERGMAN)
        if kind == BERGMAN:
            return cls.bergman(d.get("alpha", 0.0))
        return cls(kind)


def delta(m):
    """``2 / ((m+1)(m+2))``."""
    m = np.asarray(m, dtype=float)
    return 2.0 / ((m + 1) * (m + 2))


@lru_cache(maxsize=64)
def _norm_sq_table(space: SpaceSpec, N: int) -> np.ndarray:
    m = np.arange(N + 1, dtype=float)
    if space.is_bergman:
        w = np.ones(N + 1)
        w[1:] = np.cumprod(m[1:] / (m[1:] + 1 + space.alpha))
    else:
        w = 1.0 / delta(m)
    w.setflags(write=False)
    return w


class WeightProfile:
    """Monomial norms ``<z^m, z^m>`` and unit-basis normalizers of a space.

    Tables are memoized per ``(space, N)`` and are read-only, so a profile
    can be shared between threads.
    """

    def __init__(self, space: SpaceSpec):
        self.space = space

    def norms_sq(self, N: int) -> np.ndarray:
        """Array of ``<z^m, z^m>`` for ``m = 0..N``."""
        return _norm_sq_table(self.space, int(N))

    def normalizers(self, N: int) -> np.ndarray:
        """Array of ``beta_m`` with ``beta_m z^m`` of unit norm."""
        return 1.0 / np.sqrt(self.norms_sq(N))

    def monomial_norm_sq(self, m: int) -> float:
        return float(self.norms_sq(m)[m])

    def normalizer(self, m: int) -> float:
        return 1.0 / math.sqrt(self.monomial_norm_sq(m))


def weight_profile(space: SpaceSpec) -> WeightProfile:
    return WeightProfile(space)


def inner_product(f, g, space: SpaceSpec) -> complex:
    """``<f, g>``, linear in ``f`` and conjugate-linear in ``g``."""
    f, g = as_series(f), as_series(g)
    M = min(f.trunc_order, g.trunc_order)
    w = weight_profile(space).norms_sq(M)
    return complex(np.sum(f.coeffs[: M + 1] * np.conj(g.coeffs[: M + 1]) * w))


def norm(f, space: SpaceSpec) -> float:
    return math.sqrt(max(inner_product(f, f, space).real, 0.0))


def to_unit_coords(f, space: SpaceSpec) -> np.ndarray:
    """Coordinates of ``f`` in the orthonormal basis ``beta_m z^m``."""
    f = as_series(f)
    return f.coeffs / weight_profile(space).normalizers(f.trunc_order)


def from_unit_coords(x, space: SpaceSpec) -> TruncatedSeries:
    x = np.asarray(x, dtype=np.complex128)
    return TruncatedSeries(x * weight_profile(space).normalizers(x.size - 1))


def _check_point(w):
    if abs(w) >= 1:
        raise PointOutsideDisk(f"|w| = {abs(w)} >= 1")


def kernel_coeffs(w: complex, space: SpaceSpec, N: int) -> TruncatedSeries:
    """Reproducing kernel ``K_w``: coefficient ``m`` is ``conj(w)^m / w_m``."""
    _check_point(w)
    if space.is_bergman:
        return rational_expand(np.conj(w), space.alpha + 2, N)
    m = np.arange(N + 1)
    return TruncatedSeries(delta(m) * np.conj(w) ** m)


def derivative_kernel_coeffs(n: int, w: complex, space: SpaceSpec, N: int) -> TruncatedSeries:
    """Kernel ``K^[n]_w`` for the functional ``f -> f^(n)(w)``."""
    if n < 1:
        raise InvalidOrder(f"derivative kernel order must be >= 1, got {n}")
    _check_point(w)
    c = np.zeros(N + 1, dtype=np.complex128)
    if N < n:
        return TruncatedSeries(c)
    if space.is_bergman:
        p = math.prod(space.alpha + i for i in range(2, n + 2))
        c[n:] = p * rational_expand(np.conj(w), n + space.alpha + 2, N - n).coeffs
    else:
        m = np.arange(n, N + 1)
        c[n:] = falling_factorial(m, n) * delta(m) * np.conj(w) ** (m - n)
    return TruncatedSeries(c)
