"""
Verification batteries run by `homoconn verify`.

Each battery draws its own seeded samples, checks one family of identities and
reports the largest defect it saw.
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .config import config
from .connection_families import (
    basis_map,
    closed_form_basis,
    expected_metric_torsion,
    expected_scalar,
    expected_sym_ricci,
    expected_torsion_norm_sq,
    family_alpha,
    levi_civita,
    skew_family,
)
from .errors import InvalidInputError
from .invariant_solver import (
    MapSpace,
    invariant_bilinear_basis,
    metric_subspace,
    skew_torsion_subspace,
    span_equal,
)
from .lie_core import (
    MatrixLieAlgebra,
    antisymmetry_residual,
    build_su,
    jacobi_residual,
    reductive_split,
)
from .models import BatteryResult, ComplexValue, FamilyParams
from .nomizu_calculus import curvature_invariants, torsion
from .sphere_geometry import (
    FANO_TRIPLES,
    QUATERNION_ACTIONS,
    QUATERNION_RULES,
    ambient_inner,
    b_tensor,
    basis_octonion,
    beta_invariant,
    g2_form_membership,
    grassmann_checks,
    invariant_form_span,
    omega_eval,
    octonion_mul,
    origin_point,
    psi_hat_at,
    quaternion_frame,
    quaternion_frame_at,
    quaternionic_horizontal,
    random_point,
    random_special_unitary,
    random_tangent,
    sasaki_at,
    theta_table_residual,
    to_ambient,
)

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-9


class Battery(ABC):
    """Abstract base class for verification batteries"""

    @abstractmethod
    def describe(self) -> Dict[str, str]:
        """Return {"name": ..., "description": ...}"""
        pass

    @abstractmethod
    def run(self, seed: int, trials: int) -> BatteryResult:
        """Run the battery on `trials` samples drawn from `seed`"""
        pass

    def _result(self, worst: float, tol: float, detail: str = "") -> BatteryResult:
        return BatteryResult(
            name=self.describe()["name"],
            passed=bool(worst < tol),
            max_residual=float(worst),
            detail=detail,
        )


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


class JacobiBattery(Battery):
    """Antisymmetry and Jacobi identity of the su(m) structure constants"""

    def __init__(self, algebras: Optional[Sequence[MatrixLieAlgebra]] = None):
        self.algebras = algebras

    def describe(self) -> Dict[str, str]:
        return {
            "name": "jacobi",
            "description": "su(2..6) structure constants: antisymmetry and Jacobi",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        algebras = self.algebras or [build_su(m) for m in range(2, 7)]
        worst = max(
            max(jacobi_residual(a), antisymmetry_residual(a)) for a in algebras
        )
        return self._result(worst, 1e-10, f"{len(algebras)} algebras")


class SpanEqualityBattery(Battery):
    """Closed-form bases span the solver's spaces; families land in their subspaces"""

    def __init__(self, ns: Iterable[int] = (2, 3, 4)):
        self.ns = tuple(ns)

    def describe(self) -> Dict[str, str]:
        return {
            "name": "span_equality",
            "description": "closed-form maps span the computed invariant spaces",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        mismatched = []
        for n in self.ns:
            split = reductive_split(n)
            invariant = invariant_bilinear_basis(split)
            names = closed_form_basis(n)
            closed = MapSpace.from_maps(
                [basis_map(name, split) for name in names], labels=names
            )
            if not span_equal(invariant, closed, tol=config.TOLERANCE):
                mismatched.append(f"n={n} [{', '.join(closed.labels)}]")
            for alpha in closed.maps():
                worst = max(worst, invariant.residual(alpha))

            metric = metric_subspace(invariant, split)
            skew = skew_torsion_subspace(metric, split, levi_civita(split))
            for _ in range(min(trials, 5)):
                r = rng.uniform(-2, 2)
                q = complex(*rng.uniform(-2, 2, size=2))
                params = _random_metric_params(n, rng)
                worst = max(worst, metric.residual(family_alpha(params, split)))
                sphere_class = {3: "s7", 2: "s5"}.get(n, "general_n")
                q_arg = q if sphere_class in ("s7", "s5") else None
                skew_alpha = skew_family(sphere_class, r, q_arg, split)
                worst = max(worst, skew.residual(skew_alpha))

        if mismatched:
            return BatteryResult(
                name="span_equality",
                passed=False,
                max_residual=worst,
                detail=f"span mismatch for {'; '.join(mismatched)}",
            )
        return self._result(worst, config.TOLERANCE, f"n in {list(self.ns)}")


def _random_metric_params(n: int, rng: np.random.Generator) -> FamilyParams:
    def cv():
        return ComplexValue.of(complex(*rng.uniform(-2, 2, size=2)))

    t = float(rng.uniform(-2, 2))
    if n == 3:
        return FamilyParams(sphere_class="s7", q=[cv(), cv()], t=t)
    if n == 2:
        return FamilyParams(sphere_class="s5", q=[cv(), cv(), cv()], t=t)
    return FamilyParams(sphere_class="general_n", q=[cv()], t=t)


class ClosedFormsBattery(Battery):
    """Torsion, Sym(Ric), scalar and |T|^2 against their closed forms"""

    CLASSES = (("general_n", 4), ("s7", 3), ("s5", 2), ("s3", 1))

    def describe(self) -> Dict[str, str]:
        return {
            "name": "closed_forms",
            "description": "Nomizu torsion and Ricci match the closed-form families",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        points = min(trials, 20)
        worst = 0.0

        split = reductive_split(4)
        for _ in range(points):
            q = complex(*rng.uniform(-2, 2, size=2))
            t = float(rng.uniform(-2, 2))
            params = FamilyParams(sphere_class="general_n", q=[ComplexValue.of(q)], t=t)
            got = torsion(split, family_alpha(params, split)).components
            expected = expected_metric_torsion(4, q, t).coeffs
            worst = max(worst, float(np.max(np.abs(got - expected))))

        for sphere_class, n in self.CLASSES:
            split = reductive_split(n)
            for _ in range(points):
                r = float(rng.uniform(-2, 2))
                q = None
                if sphere_class in ("s7", "s5"):
                    q = complex(*rng.uniform(-2, 2, size=2))
                alpha = skew_family(sphere_class, r, q, split)
                report = curvature_invariants(split, alpha)
                sym = expected_sym_ricci(sphere_class, n, r, q)
                worst = max(
                    worst,
                    float(np.max(np.abs(report.sym_ricci - sym))),
                    abs(report.scalar - expected_scalar(sphere_class, n, r, q)),
                    report.sym_ricci_route_gap,
                )
                norm_sq = expected_torsion_norm_sq(sphere_class, n, r, q)
                worst = max(worst, abs(report.torsion_norm_sq - norm_sq))
        return self._result(worst, config.TOLERANCE, f"{points} points per class")


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class SasakianBattery(Battery):
    """Sasakian identities of (xi, eta, psi) at random points"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "sasakian",
            "description": "psi^2 = -Id + eta xi, g(psi x, psi y) = g - eta eta, ...",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for trial in range(trials):
            size = 2 + trial % 4
            p = random_point(size, rng)
            x, y = random_tangent(p, rng), random_tangent(p, rng)
            sx, sy = sasaki_at(p, x), sasaki_at(p, y)
            xi = sx.xi
            defects = [
                ambient_inner(sx.psi, sy.psi) - ambient_inner(x, y) + sx.eta * sy.eta,
                sasaki_at(p, sx.psi).eta,
                ambient_inner(x, sy.psi) + ambient_inner(y, sx.psi),
                np.max(np.abs(sasaki_at(p, sx.psi).psi + x - sx.eta * xi)),
                np.max(np.abs(sasaki_at(p, xi).psi)),
                sasaki_at(p, xi).eta - 1.0,
            ]
            worst = max(worst, max(abs(d) for d in defects))
        return self._result(worst, IDENTITY_TOL, f"{trials} samples")


class QuaternionBattery(Battery):
    """Composition rules of psi_1, psi_2, psi_3 on S^7 and the adapted frame"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "quaternion",
            "description": "psi_a psi_b = +-psi_c + eta_b xi_a; adapted frame",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            p = random_point(4, rng)
            x = random_tangent(p, rng)
            frame = quaternion_frame_at(p, x)
            for (a, b), (c, sign) in QUATERNION_RULES.items():
                inner = frame[b].psi
                lhs = quaternion_frame_at(p, inner)[a].psi
                rhs = sign * frame[c].psi + frame[b].eta * frame[a].xi
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            psi1_xi2 = quaternion_frame_at(p, frame[2].xi)[1].psi
            worst = max(worst, float(np.max(np.abs(psi1_xi2 - frame[3].xi))))

            h = quaternionic_horizontal(p, rng)
            vectors = quaternion_frame(p, h)
            gram = np.array([[ambient_inner(u, v) for v in vectors] for u in vectors])
            worst = max(worst, float(np.max(np.abs(gram - np.eye(7)))))
        return self._result(worst, IDENTITY_TOL, f"{trials} samples")


class ThetaTableBattery(Battery):
    """Theta on the adapted frame and B = 4(eta_1 eta_1 - g)"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "theta_table",
            "description": "operation table of Theta and the trace form B",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            p = random_point(4, rng)
            worst = max(worst, theta_table_residual(p, quaternionic_horizontal(p, rng)))
        for _ in range(min(trials, 10)):
            p = random_point(4, rng)
            u, v = random_tangent(p, rng), random_tangent(p, rng)
            xi1 = -QUATERNION_ACTIONS[1](p)
            expected = 4.0 * (
                ambient_inner(u, xi1) * ambient_inner(v, xi1) - ambient_inner(u, v)
            )
            worst = max(worst, abs(b_tensor(p, u, v) - expected))
        return self._result(worst, IDENTITY_TOL, f"{trials} frames")


class OmegaInvarianceBattery(Battery):
    """SU(4)-invariance of Omega and its determinant form at o"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "omega_invariance",
            "description": "Omega(sigma u, sigma v, sigma w) = Omega(u, v, w) on S^7",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            sigma = random_special_unitary(4, rng)
            p = random_point(4, rng)
            u, v, w = (random_tangent(p, rng) for _ in range(3))
            moved = omega_eval(sigma @ p, sigma @ u, sigma @ v, sigma @ w)
            worst = max(worst, abs(moved - omega_eval(p, u, v, w)))

        o = origin_point(3)
        for _ in range(min(trials, 20)):
            u, v, w = (random_tangent(o, rng) for _ in range(3))
            det = np.linalg.det(np.column_stack([u[:3], v[:3], w[:3]]))
            worst = max(worst, abs(omega_eval(o, u, v, w) + det.real))
        return self._result(worst, IDENTITY_TOL, f"{trials} samples")


class GrassmannBattery(Battery):
    """beta(U) >= 0 on 2-planes of C^4 and delta(sigma, x) = 1"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "grassmann",
            "description": "Grassmannian determinants behind the invariance of Omega",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        summary = grassmann_checks(seed, trials)
        e = np.eye(4, dtype=np.complex128)
        fixed = abs(beta_invariant(e[0], e[2]) - 1.0) + abs(beta_invariant(e[0], e[1]))
        worst = max(
            max(-summary.beta_min, 0.0),
            summary.beta_imag_max,
            summary.delta_error_max,
            fixed,
        )
        detail = (
            f"beta_min={summary.beta_min:.3e}, "
            f"delta_error={summary.delta_error_max:.3e}, "
            f"resampled={summary.resampled}"
        )
        return self._result(worst, IDENTITY_TOL, detail)


def _label(k: int) -> int:
    """Octonion imaginary label mod 7 in 1..7"""
    return ((k - 1) % 7) + 1


class OctonionBattery(Battery):
    """Multiplication table rules, alternativity and norm multiplicativity"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "octonion",
            "description": "octonion table: alternative composition algebra",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        one = basis_octonion(0)
        for i in range(1, 8):
            e_i = basis_octonion(i)
            worst = max(worst, float(np.max(np.abs(octonion_mul(e_i, e_i) + one))))
            for j in range(1, 8):
                if i != j:
                    e_j = basis_octonion(j)
                    anti = octonion_mul(e_i, e_j) + octonion_mul(e_j, e_i)
                    worst = max(worst, float(np.max(np.abs(anti))))
        for a, b, c in FANO_TRIPLES:
            for shift in (lambda k: _label(k + 1), lambda k: _label(2 * k)):
                left, right = basis_octonion(shift(a)), basis_octonion(shift(b))
                defect = octonion_mul(left, right) - basis_octonion(shift(c))
                worst = max(worst, float(np.max(np.abs(defect))))

        for _ in range(trials):
            x, y = rng.normal(size=8), rng.normal(size=8)
            left = octonion_mul(x, octonion_mul(x, y))
            right = octonion_mul(octonion_mul(x, x), y)
            norm_xy = np.linalg.norm(octonion_mul(x, y))
            norm_defect = norm_xy - np.linalg.norm(x) * np.linalg.norm(y)
            worst = max(worst, float(np.max(np.abs(left - right))), abs(norm_defect))
        return self._result(worst, IDENTITY_TOL, f"{trials} random pairs")


class PsiHatBattery(Battery):
    """psi^ at o is theta, and psi^ is SU(3)-invariant"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "psi_hat",
            "description": "psi^ on S^5 from the octonion cross product",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        rng = np.random.default_rng(seed)
        worst = 0.0
        o = origin_point(2)
        for e in np.eye(5):
            x = to_ambient(e)
            z = x[:2]
            expected = np.array([-np.conj(z[1]), np.conj(z[0]), 0.0])
            worst = max(worst, float(np.max(np.abs(psi_hat_at(o, x) - expected))))

        for _ in range(trials):
            sigma = random_special_unitary(3, rng)
            p = random_point(3, rng)
            x = random_tangent(p, rng)
            moved = psi_hat_at(sigma @ p, sigma @ x)
            worst = max(worst, float(np.max(np.abs(moved - sigma @ psi_hat_at(p, x)))))
        return self._result(worst, IDENTITY_TOL, f"{trials} samples")


class G2MembershipBattery(Battery):
    """The G2 torsion form is not in the invariant span, its pieces are"""

    def describe(self) -> Dict[str, str]:
        return {
            "name": "g2_membership",
            "description": "canonical G2 torsion form lies outside the invariant span",
        }

    def run(self, seed: int, trials: int) -> BatteryResult:
        split = reductive_split(3)
        member, distance = g2_form_membership(split)
        spanning = invariant_form_span()[0].reshape(7, 7, 7)
        own_member, own_distance = g2_form_membership(split, spanning)
        zero_member, _ = g2_form_membership(split, np.zeros((7, 7, 7)))
        passed = (not member) and distance > 0.1 and own_member and zero_member
        return BatteryResult(
            name="g2_membership",
            passed=bool(passed),
            max_residual=float(own_distance),
            detail=f"distance of the G2 form to the span: {distance:.4f}",
        )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


class BatteryManager:
    """Holds the registered batteries and runs them"""

    def __init__(self):
        self.batteries: Dict[str, Battery] = {}

    def register_battery(self, battery: Battery):
        """Register any battery that implements the Battery interface"""
        name = battery.describe().get("name")
        if not name:
            raise ValueError("Battery must have a 'name' in its description")
        self.batteries[name] = battery

    def battery_names(self) -> List[str]:
        return list(self.batteries)

    def describe_all(self) -> List[Dict[str, str]]:
        return [battery.describe() for battery in self.batteries.values()]

    def run_battery(self, name: str, seed: int, trials: int) -> BatteryResult:
        if name not in self.batteries:
            raise InvalidInputError(
                f"unknown battery '{name}'; known: {', '.join(self.batteries)}"
            )
        try:
            result = self.batteries[name].run(seed, trials)
        except Exception as e:
            logger.exception("battery %s raised", name)
            return BatteryResult(
                name=name, passed=False, max_residual=float("inf"), detail=str(e)
            )

        if result.passed:
            logger.info(
                "battery %s passed (max residual %.3e)", name, result.max_residual
            )
        else:
            logger.warning("battery %s FAILED: %s", name, result.detail)
        return result

    def run_all(
        self, seed: int, trials: int, names: Optional[Sequence[str]] = None
    ) -> List[BatteryResult]:
        selected = list(names) if names else self.battery_names()
        for name in selected:
            if name not in self.batteries:
                raise InvalidInputError(f"unknown battery '{name}'")
        return [self.run_battery(name, seed, trials) for name in selected]


def default_manager() -> BatteryManager:
    manager = BatteryManager()
    for battery in (
        JacobiBattery(),
        SpanEqualityBattery(),
        ClosedFormsBattery(),
        SasakianBattery(),
        QuaternionBattery(),
        ThetaTableBattery(),
        OmegaInvarianceBattery(),
        GrassmannBattery(),
        OctonionBattery(),
        PsiHatBattery(),
        G2MembershipBattery(),
    ):
        manager.register_battery(battery)
    return manager
