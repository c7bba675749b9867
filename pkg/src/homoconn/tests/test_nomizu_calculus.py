"""Tests for torsion, curvature and the Ricci-type invariants."""

import numpy as np
import pytest
from helpers import eta_eta, max_abs, random_horizontal_s7

from homoconn.connection_families import (
    expected_metric_torsion,
    expected_scalar,
    expected_sym_ricci,
    expected_torsion_norm_sq,
    family_alpha,
    levi_civita,
    named_connection,
    skew_family,
)
from homoconn.errors import DimensionMismatchError
from homoconn.invariant_solver import BilinearMap
from homoconn.lie_core import bracket_m, reductive_split
from homoconn.models import ComplexValue, FamilyParams
from homoconn.nomizu_calculus import (
    curvature,
    curvature_invariants,
    einstein_check,
    nomizu_operator,
    ricci,
    sectional_identity_residual,
    torsion,
    torsion_form,
)
from homoconn.sphere_geometry import origin_structure


class TestTorsion:
    """T(A, B) = alpha(A, B) - alpha(B, A) - [A, B]_m"""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_levi_civita_is_torsion_free(self, n):
        split = reductive_split(n)
        assert max_abs(torsion(split, levi_civita(split)).components) < 1e-12

    def test_canonical_torsion_is_minus_bracket(self, s7_split, rng):
        tors = torsion(s7_split, named_connection("canonical", s7_split))
        A, B = rng.normal(size=7), rng.normal(size=7)
        m_part, _ = bracket_m(s7_split, A, B)
        assert max_abs(tors(A, B) + m_part.coeffs) < 1e-12

    def test_metric_family_torsion_closed_form(self, s9_split, rng):
        q, t = complex(rng.normal(), rng.normal()), rng.normal()
        params = FamilyParams(sphere_class="general_n", q=[ComplexValue.of(q)], t=t)
        tors = torsion(s9_split, family_alpha(params, s9_split))
        expected = expected_metric_torsion(4, q, t)
        assert max_abs(tors.components - expected.coeffs) < 1e-12

    def test_torsion_form_flags(self, s9_split):
        lc_form, lc_skew = torsion_form(
            s9_split, torsion(s9_split, levi_civita(s9_split))
        )
        assert lc_skew and max_abs(lc_form) < 1e-12
        _, tanaka_skew = torsion_form(
            s9_split, torsion(s9_split, named_connection("tanaka", s9_split))
        )
        assert not tanaka_skew
        _, family_skew = torsion_form(
            s9_split, torsion(s9_split, skew_family("general_n", 0.6, None, s9_split))
        )
        assert family_skew

    def test_wrong_dimension_rejected(self, s5_split):
        with pytest.raises(DimensionMismatchError):
            torsion(s5_split, BilinearMap.zero(7))


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------


class TestCurvature:
    """R(A, B)C from the Nomizu map"""

    def test_nomizu_operator(self, rng):
        alpha = BilinearMap(rng.normal(size=(5, 5, 5)))
        x, y = rng.normal(size=5), rng.normal(size=5)
        assert np.allclose(nomizu_operator(alpha, x) @ y, alpha(x, y))

    def test_canonical_curvature_is_isotropy_bracket(self, s7_split):
        curv = curvature(s7_split, named_connection("canonical", s7_split))
        expected = -np.einsum(
            "abh,hcl->abcl", s7_split.bracket_mm_h, s7_split.bracket_hm_m
        )
        assert max_abs(curv.components - expected) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_levi_civita_ricci_of_unit_sphere(self, n):
        split = reductive_split(n)
        report = curvature_invariants(split, levi_civita(split))
        assert max_abs(report.ricci - 2 * n * np.eye(split.dim)) < 1e-10
        assert report.scalar == pytest.approx(2 * n * (2 * n + 1))

    def test_levi_civita_sectional_curvature_one(self, s7_split, rng):
        curv = curvature(s7_split, levi_civita(s7_split))
        for _ in range(10):
            A, B = rng.normal(size=7), rng.normal(size=7)
            assert sectional_identity_residual(s7_split, curv, A, B) < 1e-10

    def test_ricci_is_trace_of_curvature(self, s5_split):
        curv = curvature(s5_split, skew_family("s5", 0.4, 0.2 - 0.1j, s5_split))
        expected = np.zeros((5, 5))
        for i, e in enumerate(np.eye(5)):
            for a, u in enumerate(np.eye(5)):
                for b, v in enumerate(np.eye(5)):
                    expected[a, b] += curv(e, u, v)[i]
        assert max_abs(ricci(s5_split, curv) - expected) < 1e-12

    @pytest.mark.parametrize("r,q", [(0.4, 0.3 + 0.5j), (-1.0, 0.2j), (0.0, 1.0)])
    def test_vertical_curvature_on_horizontal_vectors(self, s7_split, rng, r, q):
        """R(xi_2, xi_3)X = 2(r - |q|^2) psi_1 X"""
        curv = curvature(s7_split, skew_family("s7", r, q, s7_split))
        psi = origin_structure(3).psi
        xi2, xi3 = np.eye(7)[4], np.eye(7)[5]
        for _ in range(5):
            x = random_horizontal_s7(rng)
            expected = 2 * (r - abs(q) ** 2) * (psi @ x)
            assert max_abs(curv(xi2, xi3, x) - expected) < 1e-10


# ---------------------------------------------------------------------------
# Reports of the skew families
# ---------------------------------------------------------------------------


class TestSkewFamilyReports:
    """Closed forms of Sym(Ric), scalar curvature and |T|^2"""

    @pytest.mark.parametrize("r", [-1.0, 0.3, 1.5])
    def test_general_n(self, s9_split, r):
        report = curvature_invariants(
            s9_split, skew_family("general_n", r, None, s9_split)
        )
        assert report.is_skew_torsion
        assert max_abs(report.sym_ricci - expected_sym_ricci("general_n", 4, r)) < 1e-10
        assert report.scalar == pytest.approx(expected_scalar("general_n", 4, r))
        assert report.torsion_norm_sq == pytest.approx(16 * r**2)
        assert report.sym_ricci_route_gap < 1e-10

    @pytest.mark.parametrize("r,q", [(0.5, 0.3 - 0.2j), (1.0, 1.0), (-0.7, 0.0)])
    def test_s7(self, s7_split, r, q):
        report = curvature_invariants(s7_split, skew_family("s7", r, q, s7_split))
        assert max_abs(report.sym_ricci - expected_sym_ricci("s7", 3, r, q)) < 1e-10
        assert report.scalar == pytest.approx(42 - 18 * r**2 - 24 * abs(q) ** 2)
        assert report.torsion_norm_sq == pytest.approx(
            expected_torsion_norm_sq("s7", 3, r, q)
        )
        assert report.sym_ricci_route_gap < 1e-10

    def test_s5_member(self, s5_split):
        report = curvature_invariants(s5_split, skew_family("s5", 0.3, 0.4, s5_split))
        expected = 3.5 * np.eye(5) - 0.5 * eta_eta(2)
        assert max_abs(report.sym_ricci - expected) < 1e-10
        assert report.is_einstein is False

    @pytest.mark.parametrize("r,q", [(0.5, 0.3 - 0.2j), (0.0, 1j), (1.2, 0.7)])
    def test_s5_torsion_norm(self, s5_split, r, q):
        report = curvature_invariants(s5_split, skew_family("s5", r, q, s5_split))
        assert report.torsion_norm_sq == pytest.approx(8 * (r**2 + abs(q) ** 2))
        assert report.torsion_norm_sq == pytest.approx(
            expected_torsion_norm_sq("s5", 2, r, q)
        )

    def test_s3_family(self, s3_split):
        report = curvature_invariants(s3_split, skew_family("s3", 2.0, None, s3_split))
        assert max_abs(report.sym_ricci + 6 * np.eye(3)) < 1e-10
        assert report.torsion_norm_sq == pytest.approx(16.0)
        assert report.is_einstein is True


class TestEinstein:
    """Einstein verdicts and the flat and totally skew S^7 members"""

    def test_flat_member(self, s7_split):
        report = curvature_invariants(s7_split, skew_family("s7", 1.0, 1.0, s7_split))
        assert report.curvature_max < 1e-9
        assert report.is_einstein is True
        assert max_abs(report.sym_ricci) < 1e-10

    def test_totally_skew_member(self, s7_split):
        report = curvature_invariants(s7_split, skew_family("s7", -1.0, 1j, s7_split))
        assert report.curvature_max > 1e-3
        assert report.cyclic_residual < 1e-9
        assert max_abs(report.sym_ricci) < 1e-10
        assert report.is_einstein is True

    @pytest.mark.parametrize("r,q", [(0.5, 0.5j), (1.0, 0.6 + 0.8j), (-0.8, 0.8)])
    def test_ricci_symmetric_on_einstein_cone(self, s7_split, r, q):
        """|q|^2 = r^2 on S^7 gives a symmetric Ricci tensor"""
        report = curvature_invariants(s7_split, skew_family("s7", r, q, s7_split))
        assert max_abs(report.ricci - report.ricci.T) < 1e-10
        assert report.is_einstein is True

    def test_non_einstein_member(self, s9_split):
        report = curvature_invariants(
            s9_split, skew_family("general_n", 0.5, None, s9_split)
        )
        assert report.is_einstein is False
        assert einstein_check(report, s9_split.dim) is False

    def test_not_applicable_without_skew_torsion(self, s9_split):
        report = curvature_invariants(s9_split, named_connection("natural", s9_split))
        assert report.is_einstein is None
        assert report.einstein_residual is None
        assert einstein_check(report, s9_split.dim) is None
