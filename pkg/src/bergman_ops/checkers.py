"""Residual-based verdicts for operator identities.

Every check returns a :class:`CheckReport`. Residuals are relative
(normalized by one plus a magnitude) so a single tolerance serves all
parameter scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import PathDisagreement, PointOutsideDisk, SampleOutsideDomain
from .families import S21FamilyParams, s21_d_coefficients, s21_family
from .operators import (
    ConjugationSpec,
    OperatorMatrix,
    SymbolPair,
    adjoint_matrix,
    build_matrix,
    conjugated_adjoint,
    conjugated_adjoint_by_basis,
)
from .series import TruncatedSeries
from .spaces import SpaceSpec, delta, derivative_kernel_coeffs, kernel_coeffs, to_unit_coords

PASS = "Pass"
FAIL = "Fail"

TOL_MATRIX = 1e-9
TOL_CLOSED_FORM = 1e-12
TOL_TAIL = 1e-6
TOL_PATH_AGREEMENT = 1e-12
KERNEL_RADIUS = 0.7


@dataclass
class CheckReport:
    check_id: str
    max_residual: float
    tolerance: float
    trunc_order: int
    witness: Optional[tuple] = None
    params_echo: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return PASS if self.max_residual <= self.tolerance else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "trunc_order": int(self.trunc_order),
            "witness": _jsonable(self.witness),
            "params_echo": _jsonable(self.params_echo),
            "extras": _jsonable(self.extras),
        }


def _jsonable(v: Any):
    """Complex values become ``[re, im]``; containers are converted recursively."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, SpaceSpec):
        return v.to_dict()
    if isinstance(v, ConjugationSpec):
        return {"mu": _jsonable(v.mu), "eta": _jsonable(v.eta)}
    return str(v)


def _argmax_witness(D: np.ndarray) -> tuple[int, int]:
    j, k = np.unravel_index(int(np.argmax(np.abs(D))), D.shape)
    return int(j), int(k)


def _scale(T: OperatorMatrix) -> float:
    return 1.0 + float(np.max(np.abs(T.entries), initial=0.0))


def check_complex_symmetric(T: OperatorMatrix, c: ConjugationSpec, tol: float = TOL_MATRIX,
                            params: Optional[dict] = None) -> CheckReport:
    """Residual of ``T = C T* C`` by two independent routes.

    Raises :class:`PathDisagreement` when the entrywise reduction and the
    basis-vector construction of ``C T* C`` give residuals further apart
    than ``1e-12``.
    """
    scale = _scale(T)
    D1 = (T.entries - conjugated_adjoint(T, c).entries) / scale
    D2 = (T.entries - conjugated_adjoint_by_basis(T, c).entries) / scale
    r1 = float(np.max(np.abs(D1)))
    r2 = float(np.max(np.abs(D2)))
    if abs(r1 - r2) > TOL_PATH_AGREEMENT:
        raise PathDisagreement(f"complex-symmetry residual paths differ: {r1!r} vs {r2!r}")
    return CheckReport("complex_symmetric", r1, tol, T.trunc_order, _argmax_witness(D1),
                       params or {}, {"space": T.space, "basis_path_residual": r2})


def check_hermitian(T: OperatorMatrix, tol: float = 1e-10, params: Optional[dict] = None) -> CheckReport:
    D = (T.entries - adjoint_matrix(T).entries) / _scale(T)
    return CheckReport("hermitian", float(np.max(np.abs(D))), tol, T.trunc_order,
                       _argmax_witness(D), params or {}, {"space": T.space})


def check_normal(T: OperatorMatrix, tol: float = TOL_MATRIX, params: Optional[dict] = None) -> CheckReport:
    """Commutator ``T*T - TT*`` of the compression.

    The compression's commutator equals the operator's only when the matrix
    is diagonal; otherwise ``compression_approximation`` is set in ``extras``.
    """
    A = T.entries
    off = A - np.diag(np.diag(A))
    diagonal = not np.any(off)
    if diagonal:
        # |d|^2 - |d|^2 entrywise; BLAS products leave FMA-sized noise here
        d2 = np.abs(np.diag(A)) ** 2
        D = np.diag(d2 - d2).astype(np.complex128)
    else:
        As = A.conj().T
        D = (As @ A - A @ As) / (1.0 + float(np.max(np.abs(A), initial=0.0)) ** 2)
    return CheckReport("normal", float(np.max(np.abs(D))), tol, T.trunc_order, _argmax_witness(D),
                       params or {}, {"compression_approximation": not diagonal,
                                      "max_offdiagonal": float(np.max(np.abs(off), initial=0.0))})


def _require_kernel_point(v: complex, what: str):
    if abs(v) > KERNEL_RADIUS:
        raise PointOutsideDisk(f"|{what}| = {abs(v):.6g} exceeds the tail-control radius {KERNEL_RADIUS}")


def check_kernel_adjoint_identity(sym: SymbolPair, space: SpaceSpec, w: complex, N: int,
                                  tol: float = TOL_TAIL, params: Optional[dict] = None) -> CheckReport:
    """``D* K_w = conj(psi(w)) K^[n]_{phi(w)}`` with ``D*`` taken as the adjoint matrix.

    The compression drops rows beyond ``N``, so the residual carries a tail
    that decays like ``|w|^N``.
    """
    w = complex(w)
    _require_kernel_point(w, "w")
    pw, fw = complex(sym.psi_at(w)), complex(sym.phi_at(w))
    _require_kernel_point(fw, "phi(w)")
    T = build_matrix(sym, space, N)
    x = to_unit_coords(kernel_coeffs(w, space, N), space)
    lhs = adjoint_matrix(T).entries @ x
    rhs = np.conj(pw) * to_unit_coords(derivative_kernel_coeffs(sym.order_n, fw, space, N), space)
    res = float(np.linalg.norm(lhs - rhs) / (1.0 + np.linalg.norm(rhs)))
    return CheckReport("kernel_adjoint", res, tol, N, (w, fw), params or {},
                       {"space": space, "psi_w": pw, "phi_w": fw})


def _bergman_p(n: int, alpha: float) -> float:
    return math.prod(alpha + i for i in range(2, n + 2))


def _check_samples(samples):
    out = []
    for z, w in samples:
        z, w = complex(z), complex(w)
        if abs(z) > KERNEL_RADIUS or abs(w) > KERNEL_RADIUS:
            raise SampleOutsideDomain(f"sample ({z}, {w}) outside |.| <= {KERNEL_RADIUS}")
        out.append((z, w))
    if not out:
        raise SampleOutsideDomain("no sample points given")
    return out


def _s21_kernel_side(psi_z, phi_z, w, n, eta, mu, N):
    """``mu psi(z) sum_{k=n..N} k!/(k-n)! delta_k (eta w)^k phi(z)^(k-n)`` plus a tail bound."""
    k = np.arange(n, N + 1)
    ff = np.ones(k.size)
    for i in range(n):
        ff = ff * (k - i)
    terms = ff * delta(k) * (eta * w) ** k * phi_z ** (k - n)
    value = mu * psi_z * np.sum(terms)
    # t_{k+1}/t_k <= (N+1)/(N+1-n) |w phi(z)| for k > N
    rho = (N + 1) / (N + 1 - n) * abs(w * phi_z)
    K = N + 1
    t_next = math.perm(K, n) * float(delta(K)) * abs(w) ** K * abs(phi_z) ** (K - n)
    tail = abs(mu * psi_z) * t_next / (1 - rho) if rho < 1 else math.inf
    return value, tail


def kernel_symmetry_residual(sym: SymbolPair, space: SpaceSpec, c: ConjugationSpec,
                             samples: Sequence, N: int, tol: float = TOL_CLOSED_FORM,
                             params: Optional[dict] = None) -> CheckReport:
    """Matrix-free check of ``D C K_w (z) = C D* K_w (z)`` at sample pairs ``(z, w)``.

    Bergman sides are closed-form rational expressions; S^2_1 sides are
    kernel sums truncated at ``N`` whose tail bound is reported.
    """
    pts = _check_samples(samples)
    n, mu, eta = sym.order_n, c.mu, c.eta
    worst, witness, tail_max = -1.0, None, 0.0
    for z, w in pts:
        if space.is_bergman:
            s = n + space.alpha + 2
            p = _bergman_p(n, space.alpha)
            fz, fw = sym.phi_at(z), sym.phi_at(w)
            if abs(eta * w * fz) >= 1 or abs(eta * fw * z) >= 1:
                raise SampleOutsideDomain(f"sample ({z}, {w}) leaves the kernel's disk")
            lhs = mu * p * sym.psi_at(z) * (eta * w) ** n / (1 - eta * w * fz) ** s
            rhs = mu * p * sym.psi_at(w) * (eta * z) ** n / (1 - eta * fw * z) ** s
        else:
            lhs, t1 = _s21_kernel_side(sym.psi_at(z), sym.phi_at(z), w, n, eta, mu, N)
            rhs, t2 = _s21_kernel_side(sym.psi_at(w), sym.phi_at(w), z, n, eta, mu, N)
            tail_max = max(tail_max, t1, t2)
        r = abs(lhs - rhs) / (1 + abs(lhs))
        if r > worst:
            worst, witness = r, (z, w)
    extras = {"space": space, "closed_form": space.is_bergman}
    if not space.is_bergman:
        extras["tail_bound"] = tail_max
    return CheckReport("kernel_symmetry", float(worst), tol, N, witness, params or {}, extras)


def hermitian_kernel_residual(sym: SymbolPair, space: SpaceSpec, samples: Sequence,
                              tol: float = TOL_CLOSED_FORM, params: Optional[dict] = None) -> CheckReport:
    """Closed-form check of ``D* K_w (z) = D K_w (z)`` on the Bergman space."""
    if not space.is_bergman:
        raise ValueError("the closed-form Hermitian kernel identity is Bergman-only")
    pts = _check_samples(samples)
    n = sym.order_n
    s = n + space.alpha + 2
    p = _bergman_p(n, space.alpha)
    worst, witness = -1.0, None
    for z, w in pts:
        lhs = p * z**n * np.conj(sym.psi_at(w)) / (1 - z * np.conj(sym.phi_at(w))) ** s
        rhs = p * np.conj(w) ** n * sym.psi_at(z) / (1 - np.conj(w) * sym.phi_at(z)) ** s
        r = abs(lhs - rhs) / (1 + abs(lhs))
        if r > worst:
            worst, witness = r, (z, w)
    return CheckReport("hermitian_kernel", float(worst), tol, 0, witness, params or {},
                       {"space": space, "closed_form": True})


def coefficient_sides(n: int, b: complex, c: complex, eta: complex) -> tuple[complex, complex]:
    """Both sides of the ``z^(n+2) w^(n+1)`` coefficient comparison for the S^2_1 family."""
    d1, d2 = s21_d_coefficients(n, 2)
    dn, dn1, dn2 = (float(delta(m)) for m in (n, n + 1, n + 2))
    f = math.factorial
    lhs = f(n + 1) * eta ** (n + 1) * dn1 * (
        0.5 * f(n + 2) * eta**2 * b**3 * dn1
        + f(n) * dn**2 / ((n + 1) * dn1) * d2 * eta * b * c
        + f(n) * d1 * eta * b * c * dn
    )
    rhs = 0.5 * f(n + 2) * eta ** (n + 2) * dn2 * (
        2 * f(n) * d1 * b * c * dn**2 / dn1 + f(n + 1) * eta * b**3 * dn1
    )
    return complex(lhs), complex(rhs)


def check_s21_obstruction(p: S21FamilyParams, N: int, tol: float = TOL_MATRIX) -> CheckReport:
    """Complex-symmetry check of the S^2_1 family plus the coefficient-comparison sides.

    ``expected`` in ``extras`` is ``Pass`` exactly when ``b == 0`` or ``c == 0``.
    """
    space = SpaceSpec.derivative_hardy()
    sym = s21_family(p, N)
    T = build_matrix(sym, space, N)
    params = {"a": p.a, "b": p.b, "c": p.c, "n": p.n, "mu": p.conj.mu, "eta": p.conj.eta}
    rep = check_complex_symmetric(T, p.conj, tol, params)
    lhs, rhs = coefficient_sides(p.n, p.b, p.c, p.conj.eta)
    rep.check_id = "s21_obstruction"
    rep.extras.update({
        "expected": PASS if (p.b == 0 or p.c == 0) else FAIL,
        "comparison_lhs": lhs,
        "comparison_rhs": rhs,
        "comparison_difference": abs(lhs - rhs),
    })
    return rep


def perturbed(sym: SymbolPair, eps: float, N: int) -> SymbolPair:
    """``psi + eps z^(n+1)``, keeping a closed form when one exists."""
    n = sym.order_n
    psi = sym.psi.window(max(N, sym.psi.trunc_order)) + TruncatedSeries.monomial(n + 1, N, eps)
    psi_fn = None
    if sym.psi_fn is not None:
        f = sym.psi_fn
        psi_fn = lambda z: f(z) + eps * z ** (n + 1)  # noqa: E731
    return sym.with_psi(psi, psi_fn, label=f"{sym.label}+eps")


def falsify_perturbation(sym: SymbolPair, space: SpaceSpec, c: ConjugationSpec, eps: float, N: int,
                         tol: float = TOL_MATRIX, params: Optional[dict] = None) -> CheckReport:
    """Complex-symmetry residual after ``psi -> psi + eps z^(n+1)``.

    For admissible Bergman families with ``|b| <= 0.5`` the residual is
    expected to be at least ``eps / 20``.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    T = build_matrix(perturbed(sym, eps, N), space, N)
    rep = check_complex_symmetric(T, c, tol, params)
    rep.check_id = "falsify_perturbation"
    rep.extras.update({"eps": eps, "detectability_floor": eps / 20})
    return rep
