"""
Ambient tensor fields on odd spheres S^(2n+1) in C^(n+1).

Points and tangent vectors are complex arrays; the metric is the real part of
the Hermitian product. At the base point o = e_(n+1) the tangent space is
identified with m by x -> A o, so the canonical m-basis maps to
{e_j, i e_j}_(j<=n) followed by i e_(n+1).

Also here: the quaternionic structures on S^7, the 3-form Omega with its
operations Theta and Theta~, the octonion product and the tensor psi^ on S^5,
and the Grassmannian determinants behind the SU(4)-invariance of Omega.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space
from scipy.stats import unitary_group

from .errors import DimensionMismatchError, InvalidInputError
from .invariant_solver import BilinearMap
from .lie_core import ReductiveSplit

logger = logging.getLogger(__name__)

POINT_TOL = 1e-10
TANGENT_TOL = 1e-10

AmbientPoint = NDArray[np.complex128]
TangentVector = NDArray[np.complex128]


# ---------------------------------------------------------------------------
# Ambient basics
# ---------------------------------------------------------------------------


def ambient_inner(u: NDArray, v: NDArray) -> float:
    """Real inner product Re(sum u conj(v)) on C^m = R^(2m)."""
    return float(np.real(np.vdot(v, u)))


def hermitian(z: NDArray, w: NDArray) -> complex:
    """h(z, w) = sum z_l conj(w_l)"""
    return complex(np.sum(z * np.conj(w)))


def check_point(p: AmbientPoint, size: Optional[int] = None) -> AmbientPoint:
    p = np.asarray(p, dtype=np.complex128)
    if size is not None and p.shape != (size,):
        raise DimensionMismatchError(f"expected a point of C^{size}, got {p.shape}")
    if abs(np.linalg.norm(p) - 1.0) > POINT_TOL:
        raise InvalidInputError(
            f"point is not on the unit sphere: |p| = {np.linalg.norm(p)}"
        )
    return p


def check_tangent(p: AmbientPoint, x: TangentVector) -> TangentVector:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != p.shape:
        raise DimensionMismatchError(f"vector shape {x.shape} != point shape {p.shape}")
    if abs(ambient_inner(x, p)) > TANGENT_TOL:
        raise InvalidInputError("vector is not tangent to the sphere at p")
    return x


def origin_point(n: int) -> AmbientPoint:
    o = np.zeros(n + 1, dtype=np.complex128)
    o[n] = 1.0
    return o


def to_ambient(coeffs: NDArray) -> TangentVector:
    """m-coordinates -> tangent vector at o."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = coeffs.shape[0] // 2
    v = np.zeros(n + 1, dtype=np.complex128)
    v[:n] = coeffs[0 : 2 * n : 2] + 1j * coeffs[1 : 2 * n : 2]
    v[n] = 1j * coeffs[2 * n]
    return v


def from_ambient(v: TangentVector) -> NDArray[np.float64]:
    """Tangent vector at o -> m-coordinates."""
    v = np.asarray(v, dtype=np.complex128)
    n = v.shape[0] - 1
    if abs(v[n].real) > TANGENT_TOL:
        raise InvalidInputError("vector is not tangent to the sphere at o")
    out = np.empty(2 * n + 1)
    out[0 : 2 * n : 2] = v[:n].real
    out[1 : 2 * n : 2] = v[:n].imag
    out[2 * n] = v[n].imag
    return out


def tangent_basis(p: AmbientPoint) -> NDArray[np.complex128]:
    """Orthonormal real basis of T_p, as rows of complex vectors."""
    real_p = np.concatenate([p.real, p.imag])[None, :]
    columns = null_space(real_p)
    m = p.shape[0]
    return (columns[:m] + 1j * columns[m:]).T


def random_point(size: int, rng: np.random.Generator) -> AmbientPoint:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def random_tangent(p: AmbientPoint, rng: np.random.Generator) -> TangentVector:
    v = rng.normal(size=p.shape) + 1j * rng.normal(size=p.shape)
    return v - ambient_inner(v, p) * p


def random_special_unitary(size: int, rng: np.random.Generator) -> NDArray:
    """Haar unitary rescaled to determinant one."""
    u = unitary_group.rvs(size, random_state=rng)
    return u / np.linalg.det(u) ** (1.0 / size)


# ---------------------------------------------------------------------------
# Sasakian structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SasakiValues:
    xi: TangentVector  # Characteristic field at p
    eta: float  # eta(x) = g(x, xi)
    psi: TangentVector  # psi(x)


def _structure_values(
    action: Callable[[NDArray], NDArray], p: AmbientPoint, x: TangentVector
) -> SasakiValues:
    xi = -action(p)
    eta = ambient_inner(x, xi)
    return SasakiValues(xi=xi, eta=eta, psi=action(x) - eta * p)


def _complex_unit(z: NDArray) -> NDArray:
    return 1j * z


def sasaki_at(p: AmbientPoint, x: TangentVector) -> SasakiValues:
    """xi(p) = -i p, eta(x) = g(x, xi), psi(x) = i x - eta(x) p."""
    p = check_point(p)
    x = check_tangent(p, x)
    return _structure_values(_complex_unit, p, x)


@dataclass(frozen=True, eq=False)
class OriginStructure:
    """Sasakian tensors at o in m-coordinates"""

    xi: NDArray[np.float64]  # (d,)
    psi: NDArray[np.float64]  # (d, d), acts on coefficient columns
    phi: NDArray[np.float64]  # (d, d), Phi(e_i, e_j)

    @property
    def eta(self) -> NDArray[np.float64]:
        return self.xi


def origin_structure(n: int) -> OriginStructure:
    o = origin_point(n)
    basis = [to_ambient(e) for e in np.eye(2 * n + 1)]
    psi = np.array([from_ambient(sasaki_at(o, v).psi) for v in basis]).T
    xi = from_ambient(-1j * o)
    # Phi(e_i, e_j) = g(e_i, psi e_j) with identity gram
    return OriginStructure(xi=xi, psi=psi, phi=psi.copy())


def origin_tensor(
    n: int, fn: Callable[[TangentVector, TangentVector], TangentVector]
) -> BilinearMap:
    """Tabulate an ambient bilinear vector-valued map at o into a BilinearMap."""
    d = 2 * n + 1
    basis = [to_ambient(e) for e in np.eye(d)]
    coeffs = np.zeros((d, d, d))
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            coeffs[i, j] = from_ambient(fn(x, y))
    return BilinearMap(coeffs)


# ---------------------------------------------------------------------------
# Quaternionic structure on S^7
# ---------------------------------------------------------------------------


def j_action(z: NDArray) -> NDArray:
    """Conjugate-linear j on C^4 = H^2."""
    return np.array([-np.conj(z[1]), np.conj(z[0]), -np.conj(z[3]), np.conj(z[2])])


def k_action(z: NDArray) -> NDArray:
    return 1j * j_action(z)


QUATERNION_ACTIONS: Dict[int, Callable[[NDArray], NDArray]] = {
    1: _complex_unit,
    2: j_action,
    3: k_action,
}

# psi_a o psi_b = sign * psi_c + eta_b (x) xi_a, from ij = k, jk = i, ki = j
QUATERNION_RULES: Dict[Tuple[int, int], Tuple[int, int]] = {
    (1, 2): (3, 1),
    (2, 1): (3, -1),
    (2, 3): (1, 1),
    (3, 2): (1, -1),
    (3, 1): (2, 1),
    (1, 3): (2, -1),
}


def quaternion_frame_at(p: AmbientPoint, x: TangentVector) -> Dict[int, SasakiValues]:
    """(xi_s, eta_s(x), psi_s(x)) for s = 1, 2, 3."""
    p = check_point(p, size=4)
    x = check_tangent(p, x)
    return {s: _structure_values(act, p, x) for s, act in QUATERNION_ACTIONS.items()}


def _psi(s: int, p: AmbientPoint, x: TangentVector) -> TangentVector:
    return _structure_values(QUATERNION_ACTIONS[s], p, x).psi


def _eta(s: int, p: AmbientPoint, x: TangentVector) -> float:
    return _structure_values(QUATERNION_ACTIONS[s], p, x).eta


def _phi(s: int, p: AmbientPoint, x: TangentVector, y: TangentVector) -> float:
    return ambient_inner(x, _psi(s, p, y))


def quaternionic_horizontal(
    p: AmbientPoint, rng: np.random.Generator
) -> TangentVector:
    """Random unit x orthogonal to p, xi_1, xi_2, xi_3."""
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    for w in (p, -1j * p, -j_action(p), -k_action(p)):
        v = v - ambient_inner(v, w) * w
    return v / np.linalg.norm(v)


def wedge_one_two(
    one: Callable[[NDArray], float],
    two: Callable[[NDArray, NDArray], float],
    x: NDArray,
    y: NDArray,
    z: NDArray,
) -> float:
    """(a ^ b)(X,Y,Z) = a(X) b(Y,Z) + a(Y) b(Z,X) + a(Z) b(X,Y)"""
    return one(x) * two(y, z) + one(y) * two(z, x) + one(z) * two(x, y)


def eta_phi_wedge(s: int, p: AmbientPoint, x, y, z) -> float:
    return wedge_one_two(
        lambda u: _eta(s, p, u), lambda u, v: _phi(s, p, u, v), x, y, z
    )


def omega_eval(
    p: AmbientPoint, u: TangentVector, v: TangentVector, w: TangentVector
) -> float:
    """Omega = eta_2 ^ Phi_2 - eta_3 ^ Phi_3 on S^7."""
    p = check_point(p, size=4)
    return eta_phi_wedge(2, p, u, v, w) - eta_phi_wedge(3, p, u, v, w)


def theta_ops(
    p: AmbientPoint, x: TangentVector, y: TangentVector
) -> Tuple[TangentVector, TangentVector]:
    """Theta(x, y), the g-dual of Omega(x, y, .), and Theta~ = -psi_1 Theta."""
    p = check_point(p, size=4)
    theta = np.zeros(4, dtype=np.complex128)
    for f in tangent_basis(p):
        theta = theta + omega_eval(p, x, y, f) * f
    return theta, -_psi(1, p, theta)


def b_tensor(p: AmbientPoint, u: TangentVector, v: TangentVector) -> float:
    """B(u, v) = tr(Theta_u o Theta_v) with Theta_u(X) = Theta(X, u)."""
    basis = tangent_basis(p)

    def matrix(w):
        return np.array(
            [
                [ambient_inner(theta_ops(p, f_l, w)[0], f_k) for f_l in basis]
                for f_k in basis
            ]
        )

    return float(np.trace(matrix(u) @ matrix(v)))


# Theta on the frame (x, psi_1 x, psi_2 x, psi_3 x, xi_2, xi_3); (sign, index) or zero
THETA_TABLE = (
    (None, None, (-1, 4), (1, 5), (1, 2), (-1, 3)),
    (None, None, (1, 5), (1, 4), (-1, 3), (-1, 2)),
    ((1, 4), (-1, 5), None, None, (-1, 0), (1, 1)),
    ((-1, 5), (-1, 4), None, None, (1, 1), (1, 0)),
    ((-1, 2), (1, 3), (1, 0), (-1, 1), None, None),
    ((1, 3), (1, 2), (-1, 1), (-1, 0), None, None),
)


def quaternion_frame(p: AmbientPoint, x: TangentVector) -> NDArray[np.complex128]:
    """Frame (x, psi_s x, xi_2, xi_3, xi_1) for unit x orthogonal to every xi_s."""
    frame = quaternion_frame_at(p, x)
    return np.array(
        [
            x,
            frame[1].psi,
            frame[2].psi,
            frame[3].psi,
            frame[2].xi,
            frame[3].xi,
            frame[1].xi,
        ]
    )


def theta_table_residual(p: AmbientPoint, x: TangentVector) -> float:
    """Largest deviation of Theta on the frame from THETA_TABLE and the xi_1 row."""
    frame = quaternion_frame(p, x)
    worst = 0.0
    for row, entries in enumerate(THETA_TABLE):
        for col, entry in enumerate(entries):
            expected = np.zeros(4) if entry is None else entry[0] * frame[entry[1]]
            got, _ = theta_ops(p, frame[row], frame[col])
            worst = max(worst, float(np.max(np.abs(got - expected))))
    for v in frame:
        got, _ = theta_ops(p, frame[6], v)
        worst = max(worst, float(np.max(np.abs(got))))
    return worst


# ---------------------------------------------------------------------------
# Grassmannian determinants
# ---------------------------------------------------------------------------


def beta_invariant(u1: NDArray, u2: NDArray) -> complex:
    """det(u1 | j u1 | u2 | j u2) for a unitary basis of a 2-plane in C^4."""
    return complex(np.linalg.det(np.column_stack([u1, j_action(u1), u2, j_action(u2)])))


def constrained_direction(sigma: NDArray) -> Optional[TangentVector]:
    """
    Unit x = (x1, x2, 0, 0) with sigma x orthogonal to xi_2, xi_3 at sigma o.

    Returns None when every such x works and the intersection is degenerate.
    """
    o = origin_point(3)
    c = (sigma.T @ np.conj(j_action(sigma @ o)))[:2]
    if np.linalg.norm(c) < 1e-10:
        return None
    x = np.array([c[1], -c[0], 0.0, 0.0], dtype=np.complex128)
    return x / np.linalg.norm(x)


def delta_invariant(sigma: NDArray, x: TangentVector) -> complex:
    o = origin_point(3)
    sjx = sigma @ j_action(x)
    jsx = j_action(sigma @ x)
    sjo = sigma @ j_action(o)
    jso = j_action(sigma @ o)
    matrix = np.array(
        [
            [hermitian(sjx, jsx), hermitian(-sjo, jsx)],
            [hermitian(sjx, -jso), hermitian(-sjo, -jso)],
        ]
    )
    return complex(np.linalg.det(matrix))


@dataclass(frozen=True)
class GrassmannSummary:
    beta_min: float  # Smallest Re beta(U)
    beta_imag_max: float  # Largest |Im beta(U)|
    delta_error_max: float  # Largest |delta(sigma, x) - 1|
    resampled: int  # Degenerate draws replaced


def grassmann_checks(seed: int, trials: int) -> GrassmannSummary:
    rng = np.random.default_rng(seed)
    betas = []
    for _ in range(trials):
        u = unitary_group.rvs(4, random_state=rng)
        betas.append(beta_invariant(u[:, 0], u[:, 1]))
    betas = np.array(betas)

    errors = []
    resampled = 0
    while len(errors) < trials:
        sigma = random_special_unitary(4, rng)
        x = constrained_direction(sigma)
        if x is None:
            resampled += 1
            logger.warning("degenerate intersection for a sampled sigma; resampling")
            continue
        errors.append(abs(delta_invariant(sigma, x) - 1.0))

    return GrassmannSummary(
        beta_min=float(np.min(betas.real)),
        beta_imag_max=float(np.max(np.abs(betas.imag))),
        delta_error_max=float(np.max(errors)),
        resampled=resampled,
    )


# ---------------------------------------------------------------------------
# Octonions and psi^ on S^5
# ---------------------------------------------------------------------------

# Oriented lines e_a e_b = e_c, generated from (1, 2, 4) by index shift
FANO_TRIPLES = tuple(
    ((i % 7) + 1, ((i + 1) % 7) + 1, ((i + 3) % 7) + 1) for i in range(7)
)


def _octonion_structure() -> NDArray[np.float64]:
    table = np.zeros((8, 8, 8))
    table[0, 0, 0] = 1.0
    for k in range(1, 8):
        table[0, k, k] = table[k, 0, k] = 1.0
        table[k, k, 0] = -1.0
    for a, b, c in FANO_TRIPLES:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            table[x, y, z] = 1.0
            table[y, x, z] = -1.0
    table.setflags(write=False)
    return table


OCTONION_STRUCTURE = _octonion_structure()


def octonion_mul(a: NDArray, b: NDArray) -> NDArray[np.float64]:
    return np.einsum("i,j,ijk->k", a, b, OCTONION_STRUCTURE)


def basis_octonion(k: int) -> NDArray[np.float64]:
    e = np.zeros(8)
    e[k] = 1.0
    return e


# (real, imaginary) octonion slots of z1, z2, z3; the complex unit acts as e_7
COMPLEX_SLOTS = ((1, 3), (2, 6), (4, 5))


def embed_c3(z: NDArray) -> NDArray[np.float64]:
    out = np.zeros(8)
    for value, (re_slot, im_slot) in zip(z, COMPLEX_SLOTS):
        out[re_slot], out[im_slot] = value.real, value.imag
    return out


def project_c3(x: NDArray) -> Tuple[NDArray[np.complex128], float]:
    """Octonion -> (C^3 part, e_7 component)."""
    z = np.array([x[re_slot] + 1j * x[im_slot] for re_slot, im_slot in COMPLEX_SLOTS])
    return z, float(x[7])


def psi_hat_at(p: AmbientPoint, x: TangentVector) -> TangentVector:
    """psi^(x) = J(x) - eta(x) nu, J(X) = Im(N X), nu = -e_7."""
    p = check_point(p, size=3)
    x = check_tangent(p, x)
    product = octonion_mul(embed_c3(p), embed_c3(x))
    product[0] = 0.0
    eta = ambient_inner(x, -1j * p)
    result = product + eta * basis_octonion(7)
    z, vertical = project_c3(result)
    if abs(vertical) > TANGENT_TOL:
        raise InvalidInputError(f"psi^ left a normal component {vertical:.2e}")
    return z


# ---------------------------------------------------------------------------
# G2 form
# ---------------------------------------------------------------------------


def _form_components(fn: Callable, basis: NDArray) -> NDArray[np.float64]:
    d = len(basis)
    out = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                out[i, j, k] = fn(basis[i], basis[j], basis[k])
    return out


def g2_form_components() -> NDArray[np.float64]:
    """eta_1^deta_1 + eta_2^deta_2 + eta_3^deta_3 at o with deta_s = 2 Phi_s."""
    o = origin_point(3)
    basis = np.array([to_ambient(e) for e in np.eye(7)])
    return _form_components(
        lambda x, y, z: sum(2.0 * eta_phi_wedge(s, o, x, y, z) for s in (1, 2, 3)),
        basis,
    )


def invariant_form_span() -> NDArray[np.float64]:
    """eta_1^Phi_1, Omega and Omega(., ., psi_1 .) at o, as rows."""
    o = origin_point(3)
    basis = np.array([to_ambient(e) for e in np.eye(7)])
    forms = [
        _form_components(lambda x, y, z: eta_phi_wedge(1, o, x, y, z), basis),
        _form_components(lambda x, y, z: omega_eval(o, x, y, z), basis),
        _form_components(lambda x, y, z: omega_eval(o, x, y, _psi(1, o, z)), basis),
    ]
    return np.array([f.ravel() for f in forms])


def g2_form_membership(
    split: ReductiveSplit, form: Optional[NDArray] = None, tol: float = 1e-8
) -> Tuple[bool, float]:
    """Whether a 3-form at o lies in the invariant span; default form is the G2 one."""
    if split.n != 3:
        raise InvalidInputError("the G2 membership test lives on S^7 (n = 3)")
    target = (g2_form_components() if form is None else np.asarray(form)).ravel()
    span = invariant_form_span()
    coeffs, *_ = np.linalg.lstsq(span.T, target, rcond=None)
    distance = float(np.max(np.abs(target - span.T @ coeffs)))
    return distance < tol, distance
