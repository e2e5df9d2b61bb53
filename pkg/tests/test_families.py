import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_ops.errors import Inadmissible, InvalidOrder
from bergman_ops.families import (
    AutomorphismForm,
    BergmanFamilyParams,
    S21FamilyParams,
    automorphism_cs_family,
    automorphism_form,
    bergman_cs_family,
    bergman_disc_consistency,
    hermitian_family,
    s21_d_coefficients,
    s21_F_series,
    s21_family,
    s21_phi_from_d,
    series_quotient,
)
from bergman_ops.operators import ConjugationSpec
from bergman_ops.series import compose, multiply


def d_oracle(n, J):
    """Exact long division of ``F2/z^n`` by ``F1/z^n`` at ``x = 1`` in rationals."""
    def delta(m):
        return Fraction(2, (m + 1) * (m + 2))

    def ff(m, k):
        return Fraction(math.perm(m, k)) if m >= k else Fraction(0)

    num = [ff(n + i, n + 1) * delta(n + i) if i else Fraction(0) for i in range(J + 1)]
    den = [ff(n + i, n) * delta(n + i) for i in range(J + 1)]
    q = []
    for j in range(J + 1):
        q.append((num[j] - sum(den[i] * q[j - i] for i in range(1, j + 1))) / den[0])
    scale = Fraction(n + 3, (n + 1) ** 2)
    return [x * scale for x in q[1:]]


class TestBergmanFamily:
    def test_b_zero(self):
        sym = bergman_cs_family(BergmanFamilyParams(2, 0, 0.5, 1, 0.0), 5)
        np.testing.assert_array_equal(sym.psi.coeffs, [0, 2, 0, 0, 0, 0])
        np.testing.assert_array_equal(sym.phi.coeffs, [0, 0.5, 0, 0, 0, 0])

    def test_phi_coefficients(self):
        sym = bergman_cs_family(BergmanFamilyParams(1, 0.3, 0.4, 1, 0.0), 3)
        np.testing.assert_allclose(sym.phi.coeffs, [0.3, 0.4, 0.12, 0.036], rtol=1e-15)

    def test_psi_against_gamma_expansion(self):
        a, b, n, alpha = 0.7 - 0.2j, 0.4 + 0.1j, 2, 1.5
        c = ConjugationSpec.from_angles(0.0, 0.9)
        sym = bergman_cs_family(BergmanFamilyParams(a, b, 0.1, n, alpha, c), 30)
        s, q = n + alpha + 2, c.eta * b
        oracle = np.zeros(31, complex)
        for m in range(29):
            oracle[m + n] = a * math.exp(math.lgamma(s + m) - math.lgamma(m + 1) - math.lgamma(s)) * q**m
        np.testing.assert_allclose(sym.psi.coeffs, oracle, rtol=1e-12)

    def test_closed_forms_match_windows(self):
        sym = bergman_cs_family(BergmanFamilyParams(1 + 1j, 0.35j, 0.2, 1, 0.5), 120)
        for z in (0.2, -0.3 + 0.4j, 0.5j):
            assert sym.psi(z) == pytest.approx(sym.psi_at(z), abs=1e-13)
            assert sym.phi(z) == pytest.approx(sym.phi_at(z), abs=1e-13)

    def test_inadmissible(self):
        with pytest.raises(Inadmissible):
            bergman_cs_family(BergmanFamilyParams(1, 0.5, 0.3), 8)
        with pytest.raises(Inadmissible):
            BergmanFamilyParams(1, 1.0, 0)
        with pytest.raises(InvalidOrder):
            BergmanFamilyParams(1, 0, 0, n=0)

    def test_admissible_symbol_maps_into_disk(self):
        p = BergmanFamilyParams(1, 0.45j, 0.4 * 0.55**2)
        sym = bergman_cs_family(p, 8)
        theta = np.linspace(0, 2 * np.pi, 400)
        assert np.max(np.abs(sym.phi_at(0.999 * np.exp(1j * theta)))) < 1


class TestHermitianFamily:
    @given(st.floats(0, 0.6), st.floats(0, 6.3), st.floats(-1, 1), st.floats(-0.3, 0.3))
    @settings(max_examples=30, deadline=None)
    def test_is_cs_family_with_matching_eta(self, r, theta, a, cfrac):
        # conj(b) = eta b for eta = exp(-2 i theta)
        b = r * np.exp(1j * theta)
        c = cfrac * (1 - r) ** 2
        h = hermitian_family(a, b, c, 1, 0.0, 20)
        p = BergmanFamilyParams(a, b, c, 1, 0.0, ConjugationSpec.from_angles(0.0, -2 * theta))
        g = bergman_cs_family(p, 20)
        np.testing.assert_allclose(h.psi.coeffs, g.psi.coeffs, atol=1e-13)
        np.testing.assert_allclose(h.phi.coeffs, g.phi.coeffs, atol=1e-14)

    def test_accepts_complex_parameters(self):
        sym = hermitian_family(1j, 0.2, 0.3j, 1, 0.0, 6)
        assert sym.psi.coeffs[1] == 1j

    def test_inadmissible(self):
        with pytest.raises(Inadmissible):
            hermitian_family(1, 0.6, 0.3, 1, 0.0, 5)


class TestAutomorphisms:
    def test_disc_consistency_real(self):
        b, c, xi = bergman_disc_consistency(0.5, 1)
        assert xi == 1
        assert b == pytest.approx(0.5)
        assert c == pytest.approx(-0.75)

    def test_disc_consistency_imaginary(self):
        b, c, xi = bergman_disc_consistency(0.3j, 1)
        assert xi == pytest.approx(-1)
        assert b == pytest.approx(-0.3j)

    @pytest.mark.parametrize("a0,eta_angle", [(0.5, 0.0), (0.3j, 0.0), (0.2 - 0.4j, 1.1), (-0.6 + 0.1j, 2.9)])
    def test_form_matches_family_phi(self, a0, eta_angle):
        eta = np.exp(1j * eta_angle)
        N = 60
        form = automorphism_form(AutomorphismForm.disc(a0, eta), N)
        sym = automorphism_cs_family(a0, eta, 1.0, 1, 0.0, 1.0, N)
        np.testing.assert_allclose(sym.phi.coeffs, form.coeffs, atol=1e-14)
        assert abs(sym.phi_at(a0)) < 1e-14

    def test_real_a0_is_involution(self):
        N = 40
        phi = automorphism_form(AutomorphismForm.disc(0.5), N)
        phi_c = phi.coeffs.copy()
        # phi(0) = a0 != 0 so composition needs the exact closed form: check pointwise instead
        f = lambda z: (0.5 - z) / (1 - 0.5 * z)  # noqa: E731
        for z in (0.1, 0.3j, -0.2 + 0.2j):
            assert f(f(z)) == pytest.approx(z, abs=1e-15)
            assert np.polynomial.polynomial.polyval(z, phi_c) == pytest.approx(f(z), abs=1e-12)

    def test_rotation(self):
        phi = automorphism_form(AutomorphismForm.rotation(1j), 3)
        np.testing.assert_array_equal(phi.coeffs, [0, -1j, 0, 0])
        with pytest.raises(ValueError):
            AutomorphismForm.rotation(0.5)

    def test_disc_requires_interior(self):
        with pytest.raises(ValueError):
            AutomorphismForm.disc(0)

    def test_unit_modulus_on_circle(self):
        sym = automorphism_cs_family(0.4 + 0.2j, 1j, 1.0, 1, 0.0, 1.0, 4)
        for t in np.linspace(0, 6, 7):
            assert abs(sym.phi_at(np.exp(1j * t))) == pytest.approx(1, abs=1e-14)


class TestS21:
    def test_b_zero_is_monomial(self):
        F1, F2 = s21_F_series(2, 0, 1, 5)
        np.testing.assert_allclose(F1.coeffs, [0, 0, 2 * (1 / 6), 0, 0, 0])
        np.testing.assert_allclose(F2.coeffs, [0, 0, 0, 6 * 0.1, 0, 0])

    def test_first_coefficients(self):
        x = 0.3 - 0.2j
        F1, F2 = s21_F_series(1, x, 1, 4)
        # [z^2] F1 = 2!/1! * delta_2 * x,  [z^2] F2 = 2!/0! * delta_2
        assert F1.coeffs[1] == pytest.approx(1 / 3)
        assert F1.coeffs[2] == pytest.approx(2 / 6 * x)
        assert F2.coeffs[2] == pytest.approx(2 / 6)

    def test_F2_is_x_derivative_of_F1(self):
        n, N, b, h = 2, 14, 0.3 + 0.1j, 1e-6
        up, _ = s21_F_series(n, b + h, 1, N)
        dn, _ = s21_F_series(n, b - h, 1, N)
        _, F2 = s21_F_series(n, b, 1, N)
        np.testing.assert_allclose((up.coeffs - dn.coeffs) / (2 * h), F2.coeffs, atol=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_d_against_exact_division(self, n):
        ours = s21_d_coefficients(n, 20)
        oracle = np.array([float(x) for x in d_oracle(n, 20)])
        # the float recurrence loses a few digits to cancellation as n grows
        np.testing.assert_allclose(ours, oracle, rtol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_d_first_is_one_and_positive_decreasing(self, n):
        d = s21_d_coefficients(n, 20)
        assert d[0] == pytest.approx(1.0, rel=1e-15)
        assert np.all(d > 0)
        assert np.all(np.diff(d) < 0)

    @pytest.mark.parametrize("b,c,angle", [(0.3, 0.2, 0.0), (0.2j, 0.1 - 0.1j, 1.3), (-0.4 + 0.1j, 0.05, 4.0)])
    def test_phi_two_routes(self, b, c, angle):
        p = S21FamilyParams(1, b, c, 2, ConjugationSpec.from_angles(0.2, angle))
        np.testing.assert_allclose(s21_family(p, 30).phi.coeffs, s21_phi_from_d(p, 30).coeffs,
                                   rtol=1e-12, atol=1e-15)

    def test_psi_normalization(self):
        p = S21FamilyParams(2.5, 0.4, 0.1, 3)
        assert s21_family(p, 6).psi.coeffs[3] == pytest.approx(2.5)

    def test_series_quotient_inverts_multiplication(self):
        rng = np.random.default_rng(1)
        num = rng.normal(size=9) + 1j * rng.normal(size=9)
        den = rng.normal(size=9) + 1j * rng.normal(size=9)
        den[0] = 2.0
        q = series_quotient(num, den, 8)
        np.testing.assert_allclose(multiply(q, den, 8).coeffs, num, atol=1e-10)

    def test_series_quotient_zero_constant(self):
        with pytest.raises(ZeroDivisionError):
            series_quotient([1], [0, 1], 3)

    def test_compose_sanity_on_phi(self):
        p = S21FamilyParams(1, 0.2, 0.1, 1)
        phi = s21_family(p, 20).phi
        assert compose([0, 1], phi, 20).coeffs == pytest.approx(phi.coeffs)
