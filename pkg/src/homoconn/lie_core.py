"""
Special unitary Lie algebras and the reductive split su(n+1) = su(n) + m.

The tangent space m at the base point o = e_{n+1} of S^{2n+1} is identified with
pairs (z, a), z in C^n and a purely imaginary, through the block matrix

    [[-(a/n) I_n,  z],
     [-conj(z)^t,  a]].

Coordinates over the canonical m-basis are interleaved: coeffs[2j] = Re z_j,
coeffs[2j+1] = Im z_j, coeffs[2n] = Im a. In these coordinates the metric
g((z,a),(w,b)) = Re(z^t conj(w)) - ab has the identity as Gram matrix.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatchError, HomoconnError, InvalidInputError

logger = logging.getLogger(__name__)

# Residual allowed when a commutator is split back into h + m
DECOMPOSITION_TOL = 1e-10


def _readonly(array: NDArray) -> NDArray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


def _realify(matrices: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Stack complex matrices as real column vectors [Re | Im]."""
    flat = matrices.reshape(len(matrices), -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T


@dataclass(frozen=True, eq=False)
class MatrixLieAlgebra:
    """su(m) with a fixed real basis and its structure constants"""

    m: int  # Matrix size
    basis: NDArray[np.complex128]  # (m^2 - 1, m, m) anti-Hermitian traceless
    structure_constants: NDArray[np.float64]  # f[i,j,k]: [b_i,b_j] = sum f[i,j,k] b_k
    coordinate_map: NDArray[np.float64]  # pseudo-inverse of the realified basis

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, matrix: NDArray) -> NDArray[np.float64]:
        """Real coordinates of an element of su(m) in the canonical basis."""
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (self.m, self.m):
            raise DimensionMismatchError(
                f"expected a {self.m}x{self.m} matrix, got shape {matrix.shape}"
            )
        return self.coordinate_map @ _realify(matrix[None])[:, 0]

    def matrix(self, coeffs: NDArray) -> NDArray[np.complex128]:
        return np.tensordot(np.asarray(coeffs, dtype=float), self.basis, axes=1)


def build_su(m: int) -> MatrixLieAlgebra:
    """
    Build su(m) with the canonical basis.

    Order: for each pair j < k the real antisymmetric e_jk - e_kj followed by
    the imaginary symmetric i(e_jk + e_kj); then the diagonal matrices
    i(e_jj - e_{j+1,j+1}).
    """
    if m < 2:
        raise InvalidInputError(f"su(m) needs m >= 2, got m={m}")

    basis = []
    for j in range(m):
        for k in range(j + 1, m):
            antisym = np.zeros((m, m), dtype=np.complex128)
            antisym[j, k], antisym[k, j] = 1.0, -1.0
            sym = np.zeros((m, m), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1j
            basis.extend([antisym, sym])
    for j in range(m - 1):
        diag = np.zeros((m, m), dtype=np.complex128)
        diag[j, j], diag[j + 1, j + 1] = 1j, -1j
        basis.append(diag)
    basis = np.array(basis)
    dim = len(basis)

    coordinate_map = np.linalg.pinv(_realify(basis))
    products = np.einsum("iab,jbc->ijac", basis, basis)
    brackets = products - products.transpose(1, 0, 2, 3)
    structure = (coordinate_map @ _realify(brackets.reshape(dim * dim, m, m))).T
    structure = structure.reshape(dim, dim, dim)

    logger.debug("built su(%d) with real dimension %d", m, dim)
    return MatrixLieAlgebra(
        m=m,
        basis=_readonly(basis),
        structure_constants=_readonly(structure),
        coordinate_map=_readonly(coordinate_map),
    )


def antisymmetry_residual(algebra: MatrixLieAlgebra) -> float:
    f = algebra.structure_constants
    return float(np.max(np.abs(f + f.transpose(1, 0, 2)), initial=0.0))


def jacobi_residual(algebra: MatrixLieAlgebra) -> float:
    """Max-norm defect of the Jacobi identity written in structure constants."""
    f = algebra.structure_constants
    total = (
        np.einsum("ijl,lkm->ijkm", f, f)
        + np.einsum("jkl,lim->ijkm", f, f)
        + np.einsum("kil,ljm->ijkm", f, f)
    )
    return float(np.max(np.abs(total), initial=0.0))


@dataclass(frozen=True, eq=False)
class MVector:
    """An element (z, a) of m, with a purely imaginary"""

    z: NDArray[np.complex128]
    a: complex

    def __post_init__(self):
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, complex)))
        object.__setattr__(self, "a", complex(self.a))
        if abs(self.a.real) > 1e-12:
            raise InvalidInputError(f"a must be purely imaginary, got {self.a}")

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def coeffs(self) -> NDArray[np.float64]:
        n = self.n
        out = np.empty(2 * n + 1)
        out[0 : 2 * n : 2] = self.z.real
        out[1 : 2 * n : 2] = self.z.imag
        out[2 * n] = self.a.imag
        return out

    @classmethod
    def from_coeffs(cls, coeffs: NDArray) -> "MVector":
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.shape[0] % 2 == 0:
            raise DimensionMismatchError(
                f"m-coordinates have odd length 2n+1, got shape {coeffs.shape}"
            )
        n = coeffs.shape[0] // 2
        z = coeffs[0 : 2 * n : 2] + 1j * coeffs[1 : 2 * n : 2]
        return cls(z=z, a=1j * coeffs[2 * n])

    def matrix(self) -> NDArray[np.complex128]:
        n = self.n
        out = np.zeros((n + 1, n + 1), dtype=np.complex128)
        out[:n, :n] = -(self.a / n) * np.eye(n)
        out[:n, n] = self.z
        out[n, :n] = -np.conj(self.z)
        out[n, n] = self.a
        return out

    @classmethod
    def from_matrix(cls, matrix: NDArray) -> "MVector":
        n = matrix.shape[0] - 1
        return cls(z=matrix[:n, n], a=1j * matrix[n, n].imag)


def _metric(u: MVector, v: MVector) -> float:
    return float(np.real(np.sum(u.z * np.conj(v.z))) - np.real(u.a * v.a))


def _decompose(
    n: int, h_algebra: Optional[MatrixLieAlgebra], matrix: NDArray
) -> Tuple[NDArray[np.float64], NDArray[np.float64], float]:
    """Split an element of su(n+1) into (m-coordinates, h-coordinates, residual)."""
    m_part = MVector.from_matrix(matrix)
    block = matrix[:n, :n] - m_part.matrix()[:n, :n]
    if h_algebra is None:
        h_coeffs = np.zeros(0)
        h_matrix = np.zeros_like(matrix)
    else:
        h_coeffs = h_algebra.coordinates(block)
        h_matrix = np.zeros_like(matrix)
        h_matrix[:n, :n] = h_algebra.matrix(h_coeffs)
    residual = np.max(np.abs(matrix - m_part.matrix() - h_matrix))
    return m_part.coeffs, h_coeffs, float(residual)


@dataclass(frozen=True, eq=False)
class ReductiveSplit:
    """su(n+1) = h + m with h = su(n) in the top-left block"""

    n: int  # Sphere parameter, S^(2n+1)
    h_algebra: Optional[MatrixLieAlgebra]  # su(n), None when n = 1
    h_basis: NDArray[np.complex128]  # (dim h, n+1, n+1)
    m_basis: NDArray[np.complex128]  # (2n+1, n+1, n+1)
    bracket_mm_m: NDArray[np.float64]  # [m_i, m_j]_m = sum bracket_mm_m[i,j,k] m_k
    bracket_mm_h: NDArray[np.float64]  # [m_i, m_j]_h over h_basis
    bracket_hm_m: NDArray[np.float64]  # [h_a, m_i] = sum bracket_hm_m[a,i,k] m_k
    gram: NDArray[np.float64]  # g on the m-basis

    @property
    def dim(self) -> int:
        return self.m_basis.shape[0]

    @property
    def h_dim(self) -> int:
        return self.h_basis.shape[0]

    def project(self, matrix: NDArray) -> Tuple[NDArray, NDArray]:
        m_coeffs, h_coeffs, residual = _decompose(self.n, self.h_algebra, matrix)
        if residual > DECOMPOSITION_TOL:
            raise HomoconnError(
                f"matrix is not in su({self.n + 1}); residual {residual:.2e}"
            )
        return m_coeffs, h_coeffs


@lru_cache(maxsize=None)
def reductive_split(n: int) -> ReductiveSplit:
    """Build the reductive decomposition of su(n+1) for the sphere S^(2n+1)."""
    if n < 1:
        raise InvalidInputError(f"sphere parameter n must be >= 1, got n={n}")

    size = n + 1
    h_algebra = build_su(n) if n >= 2 else None
    h_dim = h_algebra.dim if h_algebra is not None else 0
    h_basis = np.zeros((h_dim, size, size), dtype=np.complex128)
    if h_algebra is not None:
        h_basis[:, :n, :n] = h_algebra.basis

    dim = 2 * n + 1
    m_vectors = [MVector.from_coeffs(e) for e in np.eye(dim)]
    m_basis = np.array([v.matrix() for v in m_vectors])
    gram = np.array([[_metric(u, v) for v in m_vectors] for u in m_vectors])

    bracket_mm_m = np.zeros((dim, dim, dim))
    bracket_mm_h = np.zeros((dim, dim, h_dim))
    worst = 0.0
    for i in range(dim):
        for j in range(dim):
            comm = m_basis[i] @ m_basis[j] - m_basis[j] @ m_basis[i]
            m_c, h_c, residual = _decompose(n, h_algebra, comm)
            bracket_mm_m[i, j], bracket_mm_h[i, j] = m_c, h_c
            worst = max(worst, residual)

    bracket_hm_m = np.zeros((h_dim, dim, dim))
    for a in range(h_dim):
        for i in range(dim):
            comm = h_basis[a] @ m_basis[i] - m_basis[i] @ h_basis[a]
            m_c, h_c, residual = _decompose(n, h_algebra, comm)
            if np.max(np.abs(h_c), initial=0.0) > DECOMPOSITION_TOL:
                raise HomoconnError("[h, m] is not contained in m")
            bracket_hm_m[a, i] = m_c
            worst = max(worst, residual)

    if worst > DECOMPOSITION_TOL:
        raise HomoconnError(f"bracket decomposition residual {worst:.2e}")
    logger.debug("reductive split n=%d: dim h=%d, dim m=%d", n, h_dim, dim)

    return ReductiveSplit(
        n=n,
        h_algebra=h_algebra,
        h_basis=_readonly(h_basis),
        m_basis=_readonly(m_basis),
        bracket_mm_m=_readonly(bracket_mm_m),
        bracket_mm_h=_readonly(bracket_mm_h),
        bracket_hm_m=_readonly(bracket_hm_m),
        gram=_readonly(gram),
    )


def isotropy_matrices(split: ReductiveSplit) -> NDArray[np.float64]:
    """ad(h_a) restricted to m, as matrices acting on coefficient columns."""
    return split.bracket_hm_m.transpose(0, 2, 1)


def _as_coeffs(split: ReductiveSplit, vector: Union[MVector, NDArray]) -> NDArray:
    coeffs = vector.coeffs if isinstance(vector, MVector) else np.asarray(vector, float)
    if coeffs.shape != (split.dim,):
        raise DimensionMismatchError(
            f"expected an m-vector of length {split.dim}, got shape {coeffs.shape}"
        )
    return coeffs


def inner(
    split: ReductiveSplit, u: Union[MVector, NDArray], v: Union[MVector, NDArray]
) -> float:
    return float(_as_coeffs(split, u) @ split.gram @ _as_coeffs(split, v))


def bracket_m(
    split: ReductiveSplit, A: Union[MVector, NDArray], B: Union[MVector, NDArray]
) -> Tuple[MVector, NDArray[np.float64]]:
    """Matrix commutator [A, B] split into its m-part and h-coordinates."""
    X = MVector.from_coeffs(_as_coeffs(split, A)).matrix()
    Y = MVector.from_coeffs(_as_coeffs(split, B)).matrix()
    m_coeffs, h_coeffs = split.project(X @ Y - Y @ X)
    return MVector.from_coeffs(m_coeffs), h_coeffs
