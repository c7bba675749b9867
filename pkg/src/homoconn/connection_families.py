"""
Closed-form invariant connections on S^(2n+1) as bilinear maps on m.

Basis maps are written in (z, a) coordinates, z in C^n and a imaginary:

    alpha_1 = (b z, 0)       alpha_i = (i b z, 0)
    beta_1  = (a w, 0)       beta_i  = (i a w, 0)
    gamma_1 = (0, i Im(z^* w))   gamma_i = (0, i Re(z^* w))
    delta   = (0, i a b)

plus eps_1 = (conj z x conj w, 0), eps_i = i eps_1 on S^7, and on S^5 the
hatted maps built from theta(z) = (-conj z_2, conj z_1).

Skew families are written alpha = alpha_lc + D with the difference tensor D
assembled from the ambient structure tensors at o. On S^3 the family
sum t_ij E_i^b (x) sigma^j has Levi-Civita at t = -I, and the skew family with
parameter r is t = (r - 1) I.
"""

import logging
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInputError
from .invariant_solver import BilinearMap
from .lie_core import MVector, ReductiveSplit
from .models import CLASS_N, FamilyParams
from .nomizu_calculus import nomizu_operator
from .sphere_geometry import (
    ambient_inner,
    origin_point,
    origin_structure,
    origin_tensor,
    psi_hat_at,
    sasaki_at,
    theta_ops,
)

logger = logging.getLogger(__name__)

# (z, a, w, b) -> (z-part, a-part)
MapFormula = Callable[[NDArray, complex, NDArray, complex], Tuple[NDArray, complex]]


def _theta(z: NDArray) -> NDArray:
    return np.array([-np.conj(z[1]), np.conj(z[0])])


def _cross(u: NDArray, v: NDArray) -> NDArray:
    """C^3 cross product by cofactor expansion of det(e, u, v)."""
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def _det2(z: NDArray, w: NDArray) -> complex:
    return z[0] * w[1] - z[1] * w[0]


def _zdot(z: NDArray, w: NDArray) -> complex:
    """z^* w = sum conj(z_l) w_l"""
    return complex(np.vdot(z, w))


def _horizontal(values: NDArray) -> Tuple[NDArray, complex]:
    return values, 0j


def _vertical(z: NDArray, value: complex) -> Tuple[NDArray, complex]:
    return np.zeros_like(z), value


BASIS_FORMULAS: Dict[str, MapFormula] = {
    "alpha_1": lambda z, a, w, b: _horizontal(b * z),
    "alpha_i": lambda z, a, w, b: _horizontal(1j * b * z),
    "beta_1": lambda z, a, w, b: _horizontal(a * w),
    "beta_i": lambda z, a, w, b: _horizontal(1j * a * w),
    "gamma_1": lambda z, a, w, b: _vertical(z, 1j * _zdot(z, w).imag),
    "gamma_i": lambda z, a, w, b: _vertical(z, 1j * _zdot(z, w).real),
    "delta": lambda z, a, w, b: _vertical(z, 1j * a * b),
    "eps_1": lambda z, a, w, b: _horizontal(_cross(np.conj(z), np.conj(w))),
    "eps_i": lambda z, a, w, b: _horizontal(1j * _cross(np.conj(z), np.conj(w))),
    "hat_alpha_1": lambda z, a, w, b: _horizontal(b * _theta(z)),
    "hat_alpha_i": lambda z, a, w, b: _horizontal(1j * b * _theta(z)),
    "hat_beta_1": lambda z, a, w, b: _horizontal(a * _theta(w)),
    "hat_beta_i": lambda z, a, w, b: _horizontal(1j * a * _theta(w)),
    "hat_gamma_1": lambda z, a, w, b: _vertical(z, 1j * _det2(z, w).imag),
    "hat_gamma_i": lambda z, a, w, b: _vertical(z, 1j * _det2(z, w).real),
}

# Maps that only make sense for one n
BASIS_N: Dict[str, int] = {
    "eps_1": 3,
    "eps_i": 3,
    **{name: 2 for name in BASIS_FORMULAS if name.startswith("hat_")},
}

GENERAL_BASIS = (
    "alpha_1",
    "alpha_i",
    "beta_1",
    "beta_i",
    "gamma_1",
    "gamma_i",
    "delta",
)
S7_BASIS = GENERAL_BASIS + ("eps_1", "eps_i")
S5_BASIS = GENERAL_BASIS + (
    "hat_alpha_1",
    "hat_alpha_i",
    "hat_beta_1",
    "hat_beta_i",
    "hat_gamma_1",
    "hat_gamma_i",
)


def closed_form_basis(n: int) -> Tuple[str, ...]:
    """Names of the maps spanning the invariant space for n >= 2."""
    if n == 3:
        return S7_BASIS
    if n == 2:
        return S5_BASIS
    if n >= 4:
        return GENERAL_BASIS
    raise InvalidInputError("S^3 has no named basis; use the 27 raw coefficients")


def _tabulate(n: int, formula: MapFormula) -> BilinearMap:
    d = 2 * n + 1
    vectors = [MVector.from_coeffs(e) for e in np.eye(d)]
    coeffs = np.zeros((d, d, d))
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            z_out, a_out = formula(u.z, u.a, v.z, v.a)
            coeffs[i, j] = MVector(z=z_out, a=a_out).coeffs
    return BilinearMap(coeffs)


@lru_cache(maxsize=None)
def _basis_map(name: str, n: int) -> BilinearMap:
    return _tabulate(n, BASIS_FORMULAS[name])


def basis_map(name: str, split: ReductiveSplit) -> BilinearMap:
    if name not in BASIS_FORMULAS:
        raise InvalidInputError(
            f"unknown basis map '{name}'; known: {', '.join(BASIS_FORMULAS)}"
        )
    required = BASIS_N.get(name)
    if required is not None and split.n != required:
        raise InvalidInputError(f"'{name}' is defined only for n = {required}")
    return _basis_map(name, split.n)


def _combine(split: ReductiveSplit, terms: List[Tuple[float, str]]) -> BilinearMap:
    total = BilinearMap.zero(split.dim)
    for weight, name in terms:
        if weight != 0.0:
            total = total + weight * basis_map(name, split)
    return total


def levi_civita(split: ReductiveSplit) -> BilinearMap:
    """alpha_1 - gamma_1 - (1/n) beta_1"""
    return _combine(
        split, [(1.0, "alpha_1"), (-1.0, "gamma_1"), (-1.0 / split.n, "beta_1")]
    )


# ---------------------------------------------------------------------------
# S^3 frame
# ---------------------------------------------------------------------------


def _sigma_matrices() -> NDArray[np.float64]:
    """
    S[j][k, b] is the E_k-component of sigma^j(E_b), where
    sigma^j(Y) = g(E_(j+1), Y) E_(j+2) - g(E_(j+2), Y) E_(j+1).
    """
    S = np.zeros((3, 3, 3))
    for j in range(3):
        nxt, nxt2 = (j + 1) % 3, (j + 2) % 3
        S[j, nxt2, nxt] = 1.0
        S[j, nxt, nxt2] = -1.0
    return S


SIGMA = _sigma_matrices()


def _s3_family(t_matrix: NDArray) -> BilinearMap:
    return BilinearMap(np.einsum("aj,jkb->abk", t_matrix, SIGMA))


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def _check_class(sphere_class: str, split: ReductiveSplit) -> None:
    if sphere_class not in CLASS_N:
        raise InvalidInputError(f"unknown sphere class '{sphere_class}'")
    required = CLASS_N[sphere_class]
    if required is not None and split.n != required:
        raise InvalidInputError(
            f"sphere class {sphere_class} needs n = {required}, split has n = {split.n}"
        )


def _metric_terms(q: complex) -> List[Tuple[float, str]]:
    return [
        (q.real, "alpha_1"),
        (-q.real, "gamma_1"),
        (q.imag, "alpha_i"),
        (q.imag, "gamma_i"),
    ]


def _invariant_terms(q1: complex, q2: complex, q3: complex, t: float):
    """(q1 b z + q2 a w, i(t a b + Im(q3 z^* w)))"""
    return [
        (q1.real, "alpha_1"),
        (q1.imag, "alpha_i"),
        (q2.real, "beta_1"),
        (q2.imag, "beta_i"),
        (q3.real, "gamma_1"),
        (q3.imag, "gamma_i"),
        (t, "delta"),
    ]


def family_alpha(params: FamilyParams, split: ReductiveSplit) -> BilinearMap:
    """Member of a closed-form metric or invariant family."""
    _check_class(params.sphere_class, split)
    q = params.q_values
    key = (params.sphere_class, params.kind)

    if key == ("general_n", "metric"):
        terms = _metric_terms(q[0]) + [(params.t, "beta_1")]
    elif key == ("general_n", "invariant"):
        terms = _invariant_terms(q[0], q[1], q[2], params.t)
    elif key == ("s7", "metric"):
        terms = _metric_terms(q[0]) + [
            (params.t, "beta_1"),
            (q[1].real, "eps_1"),
            (q[1].imag, "eps_i"),
        ]
    elif key == ("s7", "invariant"):
        terms = _invariant_terms(q[0], q[1], q[2], params.t) + [
            (q[3].real, "eps_1"),
            (q[3].imag, "eps_i"),
        ]
    elif key == ("s5", "metric"):
        terms = _metric_terms(q[0]) + [
            (params.t, "beta_1"),
            (q[1].real, "hat_alpha_1"),
            (-q[1].real, "hat_gamma_1"),
            (q[1].imag, "hat_alpha_i"),
            (q[1].imag, "hat_gamma_i"),
            (q[2].real, "hat_beta_1"),
            (q[2].imag, "hat_beta_i"),
        ]
    elif key == ("s5", "invariant"):
        terms = list(zip(params.coefficients, S5_BASIS))
    elif key == ("s3", "metric"):
        return _s3_family(np.array(params.t_matrix, dtype=float))
    else:
        return BilinearMap(np.array(params.coefficients, dtype=float).reshape(3, 3, 3))

    return _combine(split, terms)


# ---------------------------------------------------------------------------
# Difference tensors at o
# ---------------------------------------------------------------------------


def _sasaki_generator(n: int, sign: float) -> BilinearMap:
    """Phi(X,Y) xi + sign eta(X) psi Y + eta(Y) psi X, tabulated at o."""
    o = origin_point(n)

    def fn(x, y):
        sx, sy = sasaki_at(o, x), sasaki_at(o, y)
        phi = ambient_inner(x, sy.psi)
        return phi * sx.xi + sign * sx.eta * sy.psi + sy.eta * sx.psi

    return origin_tensor(n, fn)


def _s5_generators() -> Tuple[BilinearMap, BilinearMap]:
    o = origin_point(2)

    def real_part(x, y):
        sx, sy = sasaki_at(o, x), sasaki_at(o, y)
        hx, hy = psi_hat_at(o, x), psi_hat_at(o, y)
        return (
            sy.eta * sasaki_at(o, hx).psi
            - sx.eta * sasaki_at(o, hy).psi
            + ambient_inner(hx, sy.psi) * sx.xi
        )

    def imag_part(x, y):
        sx, sy = sasaki_at(o, x), sasaki_at(o, y)
        hx, hy = psi_hat_at(o, x), psi_hat_at(o, y)
        return sx.eta * hy - sy.eta * hx + ambient_inner(hx, y) * sx.xi

    return origin_tensor(2, real_part), origin_tensor(2, imag_part)


def _s7_generators() -> Tuple[BilinearMap, BilinearMap]:
    o = origin_point(3)
    theta = origin_tensor(3, lambda x, y: theta_ops(o, x, y)[0])
    theta_tilde = origin_tensor(3, lambda x, y: theta_ops(o, x, y)[1])
    return theta, theta_tilde


@lru_cache(maxsize=None)
def _skew_generators(n: int) -> Tuple[BilinearMap, ...]:
    """(D_1, and for n = 2, 3 the real and imaginary q-generators)"""
    d1 = _sasaki_generator(n, sign=-1.0)
    if n == 3:
        return (d1,) + _s7_generators()
    if n == 2:
        return (d1,) + _s5_generators()
    return (d1,)


def tanaka_difference(split: ReductiveSplit) -> BilinearMap:
    """eta(X) psi Y + eta(Y) psi X + Phi(X, Y) xi"""
    return _sasaki_generator(split.n, sign=1.0)


def skew_family(
    sphere_class: str, r: float, q: Optional[complex], split: ReductiveSplit
) -> BilinearMap:
    """alpha_lc + r D_1 (+ Re q D_re + Im q D_im on S^7 and S^5)."""
    _check_class(sphere_class, split)
    if q is not None and sphere_class not in ("s7", "s5"):
        raise InvalidInputError(
            f"q is not a parameter of the {sphere_class} skew family"
        )
    generators = _skew_generators(split.n)
    alpha = levi_civita(split) + float(r) * generators[0]
    if sphere_class in ("s7", "s5") and q is not None:
        q = complex(q)
        alpha = alpha + q.real * generators[1] + q.imag * generators[2]
    return alpha


def skew_to_metric_params(n: int, r: float) -> Tuple[float, float]:
    """(q, t) of the metric family equal to the skew family with parameter r."""
    if n < 1:
        raise InvalidInputError(f"sphere parameter n must be >= 1, got n={n}")
    return 1.0 - r, r - 1.0 / n


def named_connection(name: str, split: ReductiveSplit) -> BilinearMap:
    if name == "levi_civita":
        return levi_civita(split)
    if name == "canonical":
        return BilinearMap.zero(split.dim)
    if name == "natural":
        return BilinearMap(0.5 * np.array(split.bracket_mm_m))
    if name == "tanaka":
        return levi_civita(split) + tanaka_difference(split)
    if name == "characteristic":
        return skew_family("general_n", 1.0, None, split)
    raise InvalidInputError(
        f"unknown connection '{name}'; "
        "expected levi_civita, canonical, natural, tanaka or characteristic"
    )


def structure_derivatives(
    split: ReductiveSplit, alpha: BilinearMap
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    nabla xi and nabla psi at o through the Nomizu operators.

    Row i of the first array is Lambda(e_i) xi_o; slice i of the second is
    [Lambda(e_i), psi].
    """
    structure = origin_structure(split.n)
    nabla_xi = np.zeros((split.dim, split.dim))
    nabla_psi = np.zeros((split.dim, split.dim, split.dim))
    for i, e in enumerate(np.eye(split.dim)):
        lam = nomizu_operator(alpha, e)
        nabla_xi[i] = lam @ structure.xi
        nabla_psi[i] = lam @ structure.psi - structure.psi @ lam
    return nabla_xi, nabla_psi


# ---------------------------------------------------------------------------
# Closed-form curvature of the skew families
# ---------------------------------------------------------------------------


def expected_sym_ricci(
    sphere_class: str, n: int, r: float, q: Optional[complex] = None
) -> NDArray[np.float64]:
    d = 2 * n + 1
    g = np.eye(d)
    eta = origin_structure(n).eta
    eta_eta = np.outer(eta, eta)
    q_sq = abs(complex(q or 0.0)) ** 2
    if sphere_class == "s7":
        return (6 - 2 * r**2 - 4 * q_sq) * g + 4 * (q_sq - r**2) * eta_eta
    if sphere_class == "s5":
        u = r**2 + q_sq
        return (4 - 2 * u) * g - 2 * u * eta_eta
    return 2 * (n - r**2) * g - 2 * (n - 1) * r**2 * eta_eta


def expected_scalar(
    sphere_class: str, n: int, r: float, q: Optional[complex] = None
) -> float:
    return float(np.trace(expected_sym_ricci(sphere_class, n, r, q)))


def expected_torsion_norm_sq(
    sphere_class: str, n: int, r: float, q: Optional[complex] = None
) -> float:
    """|T|^2 of the skew-torsion family member."""
    q_sq = abs(complex(q or 0.0)) ** 2
    if sphere_class == "s7":
        return 12 * r**2 + 16 * q_sq
    if sphere_class == "s5":
        return 8 * (r**2 + q_sq)
    return 4 * n * r**2


def expected_einstein(
    sphere_class: str, n: int, r: float, q: Optional[complex] = None, tol: float = 1e-8
) -> bool:
    """Einstein locus: all of S^3, the cone |q|^2 = r^2 on S^7, else r = q = 0."""
    if n == 1:
        return True
    q_abs = abs(complex(q or 0.0))
    if sphere_class == "s7":
        return abs(q_abs**2 - r**2) < tol
    return abs(r) < tol and q_abs < tol


def expected_metric_torsion(n: int, q: complex, t: float) -> BilinearMap:
    """T = ((q - t - (n+1)/n)(b z - a w), (Re q - 1)(w^* z - z^* w))"""
    q = complex(q)
    scale = q - t - (n + 1) / n

    def formula(z, a, w, b):
        return scale * (b * z - a * w), (q.real - 1.0) * (_zdot(w, z) - _zdot(z, w))

    return _tabulate(n, formula)
