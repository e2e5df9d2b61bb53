"""Symbol families whose operators are complex symmetric, Hermitian or normal.

Each constructor returns a :class:`~bergman_ops.operators.SymbolPair` whose
series windows are generated exactly from the closed forms, together with the
closed forms themselves for the matrix-free kernel checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Inadmissible, InvalidOrder
from .operators import UNIMODULAR_TOL, ConjugationSpec, SymbolPair
from .series import TruncatedSeries, falling_factorial, rational_expand
from .spaces import delta


def _shift(s: TruncatedSeries, k: int, N: int) -> np.ndarray:
    """Coefficients of ``z**k * s`` on the window of order ``N``."""
    out = np.zeros(N + 1, dtype=np.complex128)
    if k <= N:
        out[k:] = s.coeffs[: N + 1 - k]
    return out


def mobius_bound(b: complex, c: complex) -> float:
    """Sufficient self-map bound ``|b| + |c| / (1 - |b|)`` for ``b + c z / (1 - q z)``, ``|q| = |b|``."""
    return abs(b) + abs(c) / (1 - abs(b))


@dataclass(frozen=True)
class BergmanFamilyParams:
    a: complex
    b: complex
    c: complex
    n: int = 1
    alpha: float = 0.0
    conj: ConjugationSpec = field(default_factory=ConjugationSpec)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.n < 1:
            raise InvalidOrder(f"n must be >= 1, got {self.n}")
        if abs(self.b) >= 1:
            raise Inadmissible(f"|b| = {abs(self.b)} must be < 1")

    @property
    def admissibility(self) -> float:
        return mobius_bound(self.b, self.c)


def _linear_fractional(b: complex, c: complex, q: complex, N: int) -> TruncatedSeries:
    """Window of ``b + c z / (1 - q z)``."""
    phi = c * _shift(rational_expand(q, 1, N - 1), 1, N) if N >= 1 else np.zeros(1, complex)
    phi[0] += b
    return TruncatedSeries(phi)


def _weighted_monomial(a: complex, n: int, q: complex, s: float, N: int) -> TruncatedSeries:
    """Window of ``a z^n / (1 - q z)^s``."""
    if N < n:
        return TruncatedSeries.zeros(N)
    return TruncatedSeries(a * _shift(rational_expand(q, s, N - n), n, N))


def _bergman_pair(a, b, c, n, alpha, q, N, label):
    s = n + alpha + 2
    psi = _weighted_monomial(a, n, q, s, N)
    phi = _linear_fractional(b, c, q, N)
    return SymbolPair(
        psi, phi, n,
        psi_fn=lambda z: a * z**n / (1 - q * z) ** s,
        phi_fn=lambda z: b + c * z / (1 - q * z),
        label=label,
    )


def bergman_cs_family(p: BergmanFamilyParams, N: int, check_admissible: bool = True) -> SymbolPair:
    """``psi = a z^n / (1 - eta b z)^(n+alpha+2)``, ``phi = b + c z / (1 - eta b z)``.

    ``check_admissible=False`` skips the self-map bound; automorphisms never
    satisfy it but still have window-exact compressions.
    """
    if check_admissible and p.admissibility >= 1:
        raise Inadmissible(f"|b| + |c|/(1-|b|) = {p.admissibility:.6g} >= 1")
    return _bergman_pair(p.a, p.b, p.c, p.n, p.alpha, p.conj.eta * p.b, N, "bergman_cs")


def hermitian_family(a, b, c, n: int, alpha: float, N: int) -> SymbolPair:
    """``psi = a z^n / (1 - conj(b) z)^(n+alpha+2)``, ``phi = b + c z / (1 - conj(b) z)``.

    The operator is Hermitian exactly when ``a`` and ``c`` are real; complex
    values are accepted so that the Hermitian check can be shown to reject them.
    """
    b = complex(b)
    if abs(b) >= 1:
        raise Inadmissible(f"|b| = {abs(b)} must be < 1")
    if n < 1:
        raise InvalidOrder(f"n must be >= 1, got {n}")
    if mobius_bound(b, c) >= 1:
        raise Inadmissible(f"|b| + |c|/(1-|b|) = {mobius_bound(b, c):.6g} >= 1")
    return _bergman_pair(complex(a), b, complex(c), n, alpha, b.conjugate(), N, "hermitian")


@dataclass(frozen=True)
class AutomorphismForm:
    """Either the rotation ``-xi z`` or the disc form ``xi (a0 - z)/(1 - conj(a0) z)``
    with ``xi = conj(a0) / (eta a0)``."""

    variant: str
    xi: complex = 1.0
    a0: complex = 0.5
    eta: complex = 1.0

    def __post_init__(self):
        if self.variant == "rotation":
            if abs(abs(self.xi) - 1) > UNIMODULAR_TOL:
                raise ValueError(f"rotation needs |xi| = 1, got {abs(self.xi)!r}")
        elif self.variant == "disc":
            if not 0 < abs(self.a0) < 1:
                raise ValueError(f"disc form needs 0 < |a0| < 1, got {abs(self.a0)}")
        else:
            raise ValueError(f"unknown automorphism variant {self.variant!r}")

    @classmethod
    def rotation(cls, xi: complex) -> "AutomorphismForm":
        return cls("rotation", xi=complex(xi))

    @classmethod
    def disc(cls, a0: complex, eta: complex = 1.0) -> "AutomorphismForm":
        a0, eta = complex(a0), complex(eta)
        if not 0 < abs(a0) < 1:
            raise ValueError(f"disc form needs 0 < |a0| < 1, got {abs(a0)}")
        return cls("disc", xi=a0.conjugate() / (eta * a0), a0=a0, eta=eta)


def automorphism_form(f: AutomorphismForm, N: int) -> TruncatedSeries:
    if f.variant == "rotation":
        return TruncatedSeries.monomial(1, N, -f.xi)
    a0 = f.a0
    g = rational_expand(a0.conjugate(), 1, N)
    # (a0 - z) * g
    num = a0 * g.coeffs - _shift(g, 1, N)
    return TruncatedSeries(f.xi * num)


def bergman_disc_consistency(a0: complex, eta: complex) -> tuple[complex, complex, complex]:
    """``(b, c, xi)`` putting the disc automorphism into the ``b + c z/(1 - eta b z)`` form."""
    a0, eta = complex(a0), complex(eta)
    xi = a0.conjugate() / (eta * a0)
    b = xi * a0
    c = xi**2 * eta * a0 * (abs(a0) ** 2 - 1) / a0.conjugate()
    return b, c, xi


def automorphism_cs_family(a0, eta, a, n: int, alpha: float, mu: complex, N: int) -> SymbolPair:
    """Bergman complex-symmetric symbols whose ``phi`` is the disc automorphism for ``a0``."""
    b, c, _ = bergman_disc_consistency(a0, eta)
    p = BergmanFamilyParams(a, b, c, n, alpha, ConjugationSpec(mu, eta))
    return bergman_cs_family(p, N, check_admissible=False)


@dataclass(frozen=True)
class S21FamilyParams:
    a: complex
    b: complex
    c: complex
    n: int = 1
    conj: ConjugationSpec = field(default_factory=ConjugationSpec)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.n < 1:
            raise InvalidOrder(f"n must be >= 1, got {self.n}")
        if abs(self.b) >= 1:
            raise Inadmissible(f"|b| = {abs(self.b)} must be < 1")


def _f1_reduced(n: int, x: complex, N: int) -> np.ndarray:
    """``F1 / z^n`` coefficients ``(n+i)!/i! * delta_{n+i} * x^i`` for ``i = 0..N``."""
    i = np.arange(N + 1)
    return falling_factorial(n + i, n) * delta(n + i) * x**i


def _f2_reduced(n: int, x: complex, N: int) -> np.ndarray:
    """``F2 / z^n`` coefficients ``(n+i)!/(i-1)! * delta_{n+i} * x^(i-1)`` for ``i = 1..N``."""
    i = np.arange(N + 1)
    out = falling_factorial(n + i, n + 1) * delta(n + i) * x ** np.maximum(i - 1, 0)
    out[0] = 0.0
    return out


def s21_F_series(n: int, b: complex, eta: complex, N: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    if n < 1:
        raise InvalidOrder(f"n must be >= 1, got {n}")
    x = eta * b
    F1 = np.zeros(N + 1, dtype=np.complex128)
    F2 = np.zeros(N + 1, dtype=np.complex128)
    if N >= n:
        F1[n:] = _f1_reduced(n, x, N - n)
        F2[n:] = _f2_reduced(n, x, N - n)
    return TruncatedSeries(F1), TruncatedSeries(F2)


def series_quotient(num: np.ndarray, den: np.ndarray, N: int) -> np.ndarray:
    """Coefficients ``0..N`` of ``num / den``; requires ``den[0] != 0``."""
    if den[0] == 0:
        raise ZeroDivisionError("series quotient needs a nonzero constant term")
    num = np.pad(np.asarray(num, complex), (0, max(0, N + 1 - len(num))))[: N + 1]
    den = np.pad(np.asarray(den, complex), (0, max(0, N + 1 - len(den))))[: N + 1]
    q = np.zeros(N + 1, dtype=np.complex128)
    for j in range(N + 1):
        q[j] = (num[j] - np.dot(den[1 : j + 1], q[j - 1 :: -1][:j])) / den[0]
    return q


def s21_d_coefficients(n: int, J: int) -> np.ndarray:
    """``d_1..d_J`` with ``F2/F1 = (n+1)^2/(n+3) * sum_j d_j (eta b)^(j-1) z^j``.

    After the substitution ``t = eta b z`` the quotient no longer depends on
    ``b``, so the ``d_j`` are computed once with ``x = 1``.
    """
    num = _f2_reduced(n, 1.0, J)
    den = _f1_reduced(n, 1.0, J)
    r = series_quotient(num, den, J)
    return (r[1:] * (n + 3) / (n + 1) ** 2).real


def s21_family(p: S21FamilyParams, N: int) -> SymbolPair:
    """``psi = a F1 / (n! delta_n)``, ``phi = b + c (n+3)/(n+1)^2 * F2/F1``."""
    n = p.n
    x = p.conj.eta * p.b
    F1, F2 = s21_F_series(n, p.b, p.conj.eta, N)
    psi = F1 * (p.a / (math.factorial(n) * float(delta(n))))
    ratio = series_quotient(_f2_reduced(n, x, N), _f1_reduced(n, x, N), N)
    phi = p.c * (n + 3) / (n + 1) ** 2 * ratio
    phi[0] += p.b
    return SymbolPair(psi, TruncatedSeries(phi), n, label="s21")


def s21_phi_from_d(p: S21FamilyParams, N: int) -> TruncatedSeries:
    """``phi = b + c * sum_j d_j (eta b)^(j-1) z^j``; second route to the same window."""
    d = s21_d_coefficients(p.n, N)
    j = np.arange(1, N + 1)
    phi = np.zeros(N + 1, dtype=np.complex128)
    phi[1:] = p.c * d * (p.conj.eta * p.b) ** (j - 1)
    phi[0] = p.b
    return TruncatedSeries(phi)
