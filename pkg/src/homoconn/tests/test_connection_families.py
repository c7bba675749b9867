"""Tests for the closed-form connection families."""

import numpy as np
import pytest
from helpers import m_vector, max_abs

from homoconn.connection_families import (
    basis_map,
    expected_einstein,
    expected_torsion_norm_sq,
    family_alpha,
    levi_civita,
    named_connection,
    skew_family,
    skew_to_metric_params,
    structure_derivatives,
    tanaka_difference,
)
from homoconn.errors import InvalidInputError
from homoconn.invariant_solver import (
    invariant_bilinear_basis,
    metric_residual,
    metric_subspace,
    skew_torsion_subspace,
)
from homoconn.lie_core import reductive_split
from homoconn.models import ComplexValue, FamilyParams
from homoconn.nomizu_calculus import curvature_invariants, levi_civita_map, torsion
from homoconn.sphere_geometry import (
    origin_point,
    origin_structure,
    origin_tensor,
    sasaki_at,
    theta_ops,
)


def _c(z):
    return ComplexValue.of(z)


class TestBasisMaps:
    """Named basis maps in (z, a) coordinates"""

    def test_delta_on_vertical(self, s9_split):
        v = m_vector(np.zeros(4), 1j)
        out = basis_map("delta", s9_split)(v, v)
        assert np.allclose(out, m_vector(np.zeros(4), -1j))

    def test_gamma_1_on_complex_pair(self, s9_split):
        e1 = np.eye(4, dtype=complex)[0]
        out = basis_map("gamma_1", s9_split)(m_vector(e1, 0), m_vector(1j * e1, 0))
        assert np.allclose(out, m_vector(np.zeros(4), 1j))

    def test_eps_1_is_conjugate_cross_product(self, s7_split):
        e = np.eye(3, dtype=complex)
        out = basis_map("eps_1", s7_split)(m_vector(e[0], 0), m_vector(e[1], 0))
        assert np.allclose(out, m_vector(e[2], 0))

    def test_unknown_name(self, s7_split):
        with pytest.raises(InvalidInputError):
            basis_map("zeta", s7_split)

    def test_sphere_specific_maps_need_their_n(self, s9_split):
        with pytest.raises(InvalidInputError):
            basis_map("eps_1", s9_split)
        with pytest.raises(InvalidInputError):
            basis_map("hat_alpha_1", s9_split)

    def test_alpha_1_in_sasakian_terms(self, s9_split):
        """alpha_1(x, y) = -eta(y) psi x"""
        o = origin_point(4)
        ambient = origin_tensor(
            4, lambda x, y: -sasaki_at(o, y).eta * sasaki_at(o, x).psi
        )
        assert max_abs(ambient.coeffs - basis_map("alpha_1", s9_split).coeffs) < 1e-14

    def test_gamma_1_in_sasakian_terms(self, s9_split):
        """gamma_1(x, y) = Phi(x, y) xi"""
        o = origin_point(4)

        def fn(x, y):
            return np.real(np.vdot(sasaki_at(o, y).psi, x)) * sasaki_at(o, x).xi

        ambient = origin_tensor(4, fn)
        assert max_abs(ambient.coeffs - basis_map("gamma_1", s9_split).coeffs) < 1e-14

    def test_eps_in_theta_terms(self, s7_split):
        o = origin_point(3)
        theta = origin_tensor(3, lambda x, y: theta_ops(o, x, y)[0])
        theta_tilde = origin_tensor(3, lambda x, y: theta_ops(o, x, y)[1])
        assert max_abs(basis_map("eps_1", s7_split).coeffs + theta.coeffs) < 1e-12
        assert max_abs(basis_map("eps_i", s7_split).coeffs - theta_tilde.coeffs) < 1e-12


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


class TestFamilies:
    """Metric and invariant families by sphere class"""

    def test_general_metric_levi_civita_member(self, s9_split):
        params = FamilyParams(sphere_class="general_n", q=[_c(1)], t=-0.25)
        alpha = family_alpha(params, s9_split)
        assert max_abs(alpha.coeffs - levi_civita_map(s9_split).coeffs) < 1e-12

    def test_s7_metric_levi_civita_member(self, s7_split):
        params = FamilyParams(sphere_class="s7", q=[_c(1), _c(0)], t=-1 / 3)
        alpha = family_alpha(params, s7_split)
        assert max_abs(torsion(s7_split, alpha).components) < 1e-12

    def test_s5_metric_levi_civita_member(self, s5_split):
        params = FamilyParams(sphere_class="s5", q=[_c(1), _c(0), _c(0)], t=-0.5)
        alpha = family_alpha(params, s5_split)
        assert max_abs(torsion(s5_split, alpha).components) < 1e-12

    def test_s3_metric_levi_civita_member(self, s3_split):
        params = FamilyParams(sphere_class="s3", t_matrix=(-np.eye(3)).tolist())
        alpha = family_alpha(params, s3_split)
        assert max_abs(alpha.coeffs - levi_civita_map(s3_split).coeffs) < 1e-12

    @pytest.mark.parametrize(
        "params",
        [
            FamilyParams(sphere_class="s7", q=[_c(0.3 + 1j), _c(-0.5 + 0.2j)], t=0.7),
            FamilyParams(
                sphere_class="s5", q=[_c(0.1j), _c(1 - 1j), _c(2.0)], t=-0.3
            ),
            FamilyParams(sphere_class="general_n", q=[_c(-2 + 0.5j)], t=1.1),
        ],
    )
    def test_metric_families_are_metric(self, params):
        n = {"s7": 3, "s5": 2, "general_n": 4}[params.sphere_class]
        split = reductive_split(n)
        assert metric_residual(split, family_alpha(params, split)) < 1e-12

    def test_invariant_family_in_solver_space(self, s7_split):
        params = FamilyParams(
            sphere_class="s7",
            kind="invariant",
            q=[_c(0.2), _c(1j), _c(-0.4 + 0.1j), _c(0.3 - 0.3j)],
            t=0.8,
        )
        space = invariant_bilinear_basis(s7_split)
        assert space.contains(family_alpha(params, s7_split))

    def test_s3_invariant_from_raw_coefficients(self, s3_split, rng):
        coefficients = rng.normal(size=27)
        params = FamilyParams(
            sphere_class="s3", kind="invariant", coefficients=coefficients.tolist()
        )
        alpha = family_alpha(params, s3_split)
        assert np.allclose(alpha.coeffs.ravel(), coefficients)

    def test_class_mismatch(self, s9_split):
        params = FamilyParams(sphere_class="s7", q=[_c(1), _c(0)], t=0.0)
        with pytest.raises(InvalidInputError):
            family_alpha(params, s9_split)

    def test_wrong_parameter_count(self):
        with pytest.raises(ValueError):
            FamilyParams(sphere_class="s7", q=[_c(1)], t=0.0)


# ---------------------------------------------------------------------------
# Skew-torsion families
# ---------------------------------------------------------------------------


class TestSkewFamily:
    """alpha_lc + r D_1 (+ q-terms)"""

    @pytest.mark.parametrize(
        "sphere,n", [("general_n", 4), ("s7", 3), ("s5", 2), ("s3", 1)]
    )
    def test_zero_parameters_give_levi_civita(self, sphere, n):
        split = reductive_split(n)
        alpha = skew_family(sphere, 0.0, None, split)
        assert max_abs(alpha.coeffs - levi_civita_map(split).coeffs) < 1e-12

    @pytest.mark.parametrize(
        "sphere,n,q", [("general_n", 4, None), ("s7", 3, 0.5 - 1j), ("s5", 2, 0.3j)]
    )
    def test_members_lie_in_skew_torsion_space(self, sphere, n, q):
        split = reductive_split(n)
        invariant = invariant_bilinear_basis(split)
        skew = skew_torsion_subspace(
            metric_subspace(invariant, split), split, levi_civita_map(split)
        )
        assert skew.contains(skew_family(sphere, 0.8, q, split))

    @pytest.mark.parametrize("r", [-1.0, 0.25, 2.0])
    def test_general_n_equals_metric_family(self, s9_split, r):
        q, t = skew_to_metric_params(4, r)
        params = FamilyParams(sphere_class="general_n", q=[_c(q)], t=t)
        diff = family_alpha(params, s9_split) - skew_family(
            "general_n", r, None, s9_split
        )
        assert max_abs(diff.coeffs) < 1e-12

    @pytest.mark.parametrize("r", [-0.5, 1.0, 3.0])
    def test_s3_equals_scaled_identity(self, s3_split, r):
        params = FamilyParams(
            sphere_class="s3", t_matrix=((r - 1) * np.eye(3)).tolist()
        )
        diff = family_alpha(params, s3_split) - skew_family("s3", r, None, s3_split)
        assert max_abs(diff.coeffs) < 1e-12

    def test_s5_torsion_norm_includes_q(self):
        assert expected_torsion_norm_sq("s5", 2, 0.5, None) == pytest.approx(2.0)
        assert expected_torsion_norm_sq("s5", 2, 0.5, 0.1j) == pytest.approx(2.08)
        assert expected_torsion_norm_sq("s5", 2, 0.0, 1j) == pytest.approx(8.0)

    def test_q_rejected_for_general_n(self, s9_split):
        with pytest.raises(InvalidInputError):
            skew_family("general_n", 0.5, 1j, s9_split)

    def test_class_mismatch(self, s5_split):
        with pytest.raises(InvalidInputError):
            skew_family("s7", 0.5, None, s5_split)

    def test_invalid_n_for_parameter_map(self):
        with pytest.raises(InvalidInputError):
            skew_to_metric_params(0, 1.0)


class TestExpectedEinstein:
    def test_s3_always(self):
        assert expected_einstein("s3", 1, 5.0)

    def test_s7_cone(self):
        assert expected_einstein("s7", 3, 1.0, 1j)
        assert expected_einstein("s7", 3, -0.6, 0.6)
        assert not expected_einstein("s7", 3, 1.0, 0.5)

    def test_only_levi_civita_otherwise(self):
        assert expected_einstein("general_n", 5, 0.0)
        assert not expected_einstein("general_n", 5, 0.1)
        assert not expected_einstein("s5", 2, 0.0, 0.2)


# ---------------------------------------------------------------------------
# Named connections
# ---------------------------------------------------------------------------


class TestNamedConnections:
    """Canonical, natural, Tanaka and characteristic connections"""

    def test_canonical_is_zero(self, s7_split):
        assert max_abs(named_connection("canonical", s7_split).coeffs) == 0.0

    def test_natural_is_not_metric_for_n_above_one(self, s9_split, s3_split):
        assert metric_residual(s9_split, named_connection("natural", s9_split)) > 1e-3
        assert metric_residual(s3_split, named_connection("natural", s3_split)) < 1e-12

    def test_natural_in_invariant_family(self, s9_split):
        n = 4
        params = FamilyParams(
            sphere_class="general_n",
            kind="invariant",
            q=[_c((n + 1) / (2 * n)), _c(-(n + 1) / (2 * n)), _c(-1)],
            t=0.0,
        )
        diff = family_alpha(params, s9_split) - named_connection("natural", s9_split)
        assert max_abs(diff.coeffs) < 1e-12

    def test_tanaka_reduced_form(self, s9_split):
        """Tanaka connection reduces to -(1 + 1/n) beta_1"""
        tanaka = named_connection("tanaka", s9_split)
        expected = -(1 + 1 / 4) * basis_map("beta_1", s9_split)
        assert max_abs(tanaka.coeffs - expected.coeffs) < 1e-12
        assert max_abs(
            (tanaka - levi_civita(s9_split)).coeffs
            - tanaka_difference(s9_split).coeffs
        ) < 1e-14

    @pytest.mark.parametrize("name", ["tanaka", "characteristic"])
    def test_sasakian_structure_is_parallel(self, s9_split, name):
        alpha = named_connection(name, s9_split)
        nabla_xi, nabla_psi = structure_derivatives(s9_split, alpha)
        assert max_abs(nabla_xi) < 1e-12
        assert max_abs(nabla_psi) < 1e-12
        assert metric_residual(s9_split, alpha) < 1e-12

    def test_characteristic_has_skew_torsion(self, s9_split):
        report = curvature_invariants(
            s9_split, named_connection("characteristic", s9_split)
        )
        assert report.is_skew_torsion
        tanaka = curvature_invariants(s9_split, named_connection("tanaka", s9_split))
        assert not tanaka.is_skew_torsion

    def test_levi_civita_structure_derivatives(self, s9_split):
        """nabla_x xi = -psi x and (nabla_x psi) y = g(x, y) xi - eta(y) x"""
        structure = origin_structure(4)
        nabla_xi, nabla_psi = structure_derivatives(s9_split, levi_civita(s9_split))
        assert max_abs(nabla_xi + structure.psi.T) < 1e-12
        eye = np.eye(9)
        for i in range(9):
            expected = np.outer(structure.xi, eye[i]) - np.outer(eye[i], structure.eta)
            assert max_abs(nabla_psi[i] - expected) < 1e-12

    def test_unknown_name(self, s7_split):
        with pytest.raises(InvalidInputError):
            named_connection("weyl", s7_split)
