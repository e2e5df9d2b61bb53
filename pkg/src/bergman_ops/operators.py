"""Weighted composition-differentiation operators and their compressions.

The operator ``D`` with symbols ``(psi, phi)`` and order ``n`` acts by
``f -> psi * (f^(n) o phi)``. Its matrix in the unit monomial basis
``gamma_m = beta_m z^m`` is window-exact: coefficient ``j`` of a product or
of ``psi * phi**k`` only involves coefficients ``0..j`` of the factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidOrder, WindowTooShort
from .series import TruncatedSeries, as_series, compose, derivative, falling_factorial, multiply
from .spaces import SpaceSpec, from_unit_coords, to_unit_coords, weight_profile

UNIMODULAR_TOL = 1e-14


def selfmap_bound(phi: TruncatedSeries) -> float:
    """``|phi_0| + sum_{m>=1} |phi_m|`` over the window; ``< 1`` certifies a self-map."""
    return float(np.sum(np.abs(phi.coeffs)))


@dataclass(frozen=True, eq=False)
class SymbolPair:
    """Symbols ``(psi, phi)`` and differentiation order of one operator.

    ``psi_fn``/``phi_fn`` are optional closed forms used by the matrix-free
    kernel checks; when absent the truncated series are evaluated instead.
    """

    psi: TruncatedSeries
    phi: TruncatedSeries
    order_n: int
    selfmap_margin: float = field(init=False)
    psi_fn: Optional[Callable] = None
    phi_fn: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "psi", as_series(self.psi))
        object.__setattr__(self, "phi", as_series(self.phi))
        if int(self.order_n) != self.order_n or self.order_n < 1:
            raise InvalidOrder(f"order_n must be a positive integer, got {self.order_n}")
        object.__setattr__(self, "selfmap_margin", selfmap_bound(self.phi))

    @property
    def admissible(self) -> bool:
        return self.selfmap_margin < 1

    def psi_at(self, z):
        return self.psi_fn(z) if self.psi_fn is not None else self.psi(z)

    def phi_at(self, z):
        return self.phi_fn(z) if self.phi_fn is not None else self.phi(z)

    def with_psi(self, psi, psi_fn=None, label=None) -> "SymbolPair":
        return SymbolPair(psi, self.phi, self.order_n, psi_fn=psi_fn, phi_fn=self.phi_fn,
                          label=self.label if label is None else label)


@dataclass(frozen=True)
class ConjugationSpec:
    """``C f(z) = mu * conj(f(conj(eta z)))`` with ``|mu| = |eta| = 1``."""

    mu: complex = 1.0
    eta: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu", complex(self.mu))
        object.__setattr__(self, "eta", complex(self.eta))
        for name in ("mu", "eta"):
            v = getattr(self, name)
            if abs(abs(v) - 1) > UNIMODULAR_TOL:
                raise ValueError(f"{name} must be unimodular, |{name}| = {abs(v)!r}")

    @classmethod
    def from_angles(cls, mu_angle: float = 0.0, eta_angle: float = 0.0) -> "ConjugationSpec":
        return cls(np.exp(1j * mu_angle), np.exp(1j * eta_angle))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """``(N+1) x (N+1)`` grid with entry ``(j, k) = <D gamma_k, gamma_j>``."""

    entries: np.ndarray
    space: SpaceSpec
    order_n: int

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def trunc_order(self) -> int:
        return self.entries.shape[0] - 1

    def replace(self, entries) -> "OperatorMatrix":
        return OperatorMatrix(entries, self.space, self.order_n)


def apply_operator(sym: SymbolPair, f, N: int) -> TruncatedSeries:
    """``psi * (f^(n) o phi)`` on the window of order ``N``."""
    f = as_series(f)
    return multiply(sym.psi, compose(derivative(f, sym.order_n), sym.phi, N), N)


def raw_matrix(sym: SymbolPair, N: int) -> np.ndarray:
    """Monomial-basis matrix: column ``k`` holds ``[z^j] psi * (z^k)^(n) o phi``."""
    if sym.psi.trunc_order < N or sym.phi.trunc_order < N:
        raise WindowTooShort(
            f"symbol windows ({sym.psi.trunc_order}, {sym.phi.trunc_order}) shorter than N={N}")
    n = sym.order_n
    psi = sym.psi.coeffs[: N + 1]
    phi = sym.phi.coeffs[: N + 1]
    A = np.zeros((N + 1, N + 1), dtype=np.complex128)
    col = psi.copy()  # psi * phi**(k-n)
    for k in range(n, N + 1):
        A[:, k] = falling_factorial(k, n) * col
        col = np.convolve(col, phi)[: N + 1]
    return A


def build_matrix(sym: SymbolPair, space: SpaceSpec, N: int) -> OperatorMatrix:
    beta = weight_profile(space).normalizers(N)
    A = raw_matrix(sym, N)
    return OperatorMatrix(A * beta[None, :] / beta[:, None], space, sym.order_n)


def adjoint_matrix(T: OperatorMatrix) -> OperatorMatrix:
    return T.replace(T.entries.conj().T)


def conjugation_apply(c: ConjugationSpec, f) -> TruncatedSeries:
    """Coefficientwise ``f_m -> mu eta^m conj(f_m)``."""
    f = as_series(f)
    m = np.arange(f.trunc_order + 1)
    return TruncatedSeries(c.mu * c.eta**m * np.conj(f.coeffs))


def conjugated_adjoint(T: OperatorMatrix, c: ConjugationSpec) -> OperatorMatrix:
    """Matrix of ``C T* C`` via the entrywise reduction.

    With real normalizers ``C gamma_m = mu eta^m gamma_m``; antilinearity and
    ``|mu| = 1`` then give entry ``(j, k) = eta^j conj(eta)^k T_{kj}``.
    """
    N = T.trunc_order
    e = c.eta ** np.arange(N + 1)
    return T.replace(e[:, None] * np.conj(e)[None, :] * T.entries.T)


def conjugated_adjoint_by_basis(T: OperatorMatrix, c: ConjugationSpec) -> OperatorMatrix:
    """Matrix of ``C T* C`` built column by column from its action on ``gamma_k``.

    Independent of :func:`conjugated_adjoint`: each basis function is pushed
    through :func:`conjugation_apply` in series form, the adjoint acts on unit
    coordinates, and the conjugation is applied again.
    """
    N = T.trunc_order
    space = T.space
    beta = weight_profile(space).normalizers(N)
    Tstar = adjoint_matrix(T).entries
    out = np.empty_like(T.entries)
    for k in range(N + 1):
        gamma_k = TruncatedSeries.monomial(k, N, beta[k])
        y = Tstar @ to_unit_coords(conjugation_apply(c, gamma_k), space)
        out[:, k] = to_unit_coords(conjugation_apply(c, from_unit_coords(y, space)), space)
    return T.replace(out)


def operator_norm_columns(T: OperatorMatrix) -> np.ndarray:
    """``||T gamma_k||`` for each column."""
    return np.sqrt(np.sum(np.abs(T.entries) ** 2, axis=0))

