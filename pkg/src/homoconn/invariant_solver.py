"""
Invariant bilinear maps on m.

A bilinear map alpha: m x m -> m is stored as c[i, j, k] with
alpha(e_i, e_j) = sum_k c[i, j, k] e_k. The h-invariant maps form the kernel of
the equivariance system, solved here numerically; metric and skew-torsion
subfamilies are cut out by further linear constraints.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space

from .config import config
from .errors import DimensionMismatchError, InvalidInputError
from .lie_core import ReductiveSplit, isotropy_matrices

logger = logging.getLogger(__name__)

# A restricted operator with Frobenius norm below this is treated as zero
ZERO_OPERATOR_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class BilinearMap:
    """alpha(e_i, e_j) = sum_k coeffs[i, j, k] e_k"""

    coeffs: NDArray[np.float64]

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 3 or len(set(coeffs.shape)) != 1:
            raise DimensionMismatchError(
                f"bilinear map needs a (d, d, d) array, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise InvalidInputError("bilinear map has non-finite entries")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def zero(cls, dim: int) -> "BilinearMap":
        return cls(np.zeros((dim, dim, dim)))

    def __call__(self, x: NDArray, y: NDArray) -> NDArray[np.float64]:
        return np.einsum("i,j,ijk->k", x, y, self.coeffs)

    def __add__(self, other: "BilinearMap") -> "BilinearMap":
        return BilinearMap(self.coeffs + other.coeffs)

    def __sub__(self, other: "BilinearMap") -> "BilinearMap":
        return BilinearMap(self.coeffs - other.coeffs)

    def __neg__(self) -> "BilinearMap":
        return BilinearMap(-self.coeffs)

    def __mul__(self, scalar: float) -> "BilinearMap":
        return BilinearMap(float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def swapped(self) -> "BilinearMap":
        """(x, y) -> alpha(y, x)"""
        return BilinearMap(self.coeffs.transpose(1, 0, 2))


def _check_dim(split: ReductiveSplit, alpha: BilinearMap) -> None:
    if alpha.dim != split.dim:
        raise DimensionMismatchError(
            f"map has dimension {alpha.dim}, split has dim m = {split.dim}"
        )


def _rref(rows: NDArray, tol: float) -> NDArray:
    """Reduced row echelon form with largest-pivot selection; zero rows dropped."""
    a = np.array(rows, dtype=float)
    pivot_row = 0
    for col in range(a.shape[1]):
        if pivot_row == a.shape[0]:
            break
        pivot = pivot_row + int(np.argmax(np.abs(a[pivot_row:, col])))
        if abs(a[pivot, col]) < tol:
            continue
        a[[pivot_row, pivot]] = a[[pivot, pivot_row]]
        a[pivot_row] /= a[pivot_row, col]
        others = np.arange(a.shape[0]) != pivot_row
        a[others] -= np.outer(a[others, col], a[pivot_row])
        pivot_row += 1
    a = a[:pivot_row]
    a[np.abs(a) < tol] = 0.0
    return a


def canonical_rows(rows: NDArray, tol: Optional[float] = None) -> NDArray:
    """
    Deterministic orthonormal basis of the row span.

    Rows go through reduced row echelon form, then Gram-Schmidt (QR) with the
    sign fixed so that the triangular factor has a positive diagonal.
    """
    tol = config.PIVOT_TOL if tol is None else tol
    echelon = _rref(rows, tol)
    if echelon.shape[0] == 0:
        return np.zeros((0, np.asarray(rows).shape[1]))
    q, r = np.linalg.qr(echelon.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs).T


@dataclass(frozen=True, eq=False)
class MapSpace:
    """A linear (or affine, when origin is set) space of bilinear maps"""

    basis: NDArray[np.float64]  # (k, d, d, d), orthonormal as vectors in R^(d^3)
    labels: Optional[Tuple[str, ...]] = None  # Names of the generating maps
    tolerance: float = 1e-9  # Rank threshold used to build the space
    origin: Optional[BilinearMap] = None  # Affine origin (skew-torsion spaces)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def map_dim(self) -> int:
        return self.basis.shape[1]

    def vectors(self) -> NDArray[np.float64]:
        return self.basis.reshape(self.dim, -1)

    def maps(self) -> List[BilinearMap]:
        return [BilinearMap(b) for b in self.basis]

    def _offset(self, alpha: BilinearMap) -> NDArray:
        flat = alpha.coeffs.ravel()
        if self.origin is not None:
            flat = flat - self.origin.coeffs.ravel()
        return flat

    def residual(self, alpha: BilinearMap) -> float:
        offset = self._offset(alpha)
        projected = self.vectors().T @ (self.vectors() @ offset)
        return float(np.max(np.abs(offset - projected), initial=0.0))

    def contains(self, alpha: BilinearMap, tol: Optional[float] = None) -> bool:
        tol = config.TOLERANCE if tol is None else tol
        return self.residual(alpha) < tol

    @classmethod
    def from_maps(
        cls,
        maps: Sequence[BilinearMap],
        labels: Optional[Sequence[str]] = None,
        tolerance: Optional[float] = None,
    ) -> "MapSpace":
        """Canonical space spanned by a list of (not necessarily independent) maps."""
        tolerance = config.PIVOT_TOL if tolerance is None else tolerance
        d = maps[0].dim
        rows = canonical_rows(np.array([m.coeffs.ravel() for m in maps]), tolerance)
        return cls(
            basis=rows.reshape(-1, d, d, d),
            labels=tuple(labels) if labels is not None else None,
            tolerance=tolerance,
        )


def equivariance_operator(split: ReductiveSplit, H: NDArray) -> NDArray[np.float64]:
    """
    Linear map on vec(c) (C order) whose kernel is the maps commuting with ad(h).

    c -> [h, alpha(e_i, e_j)] - alpha([h, e_i], e_j) - alpha(e_i, [h, e_j]).
    """
    eye = np.eye(split.dim)
    return (
        np.kron(eye, np.kron(eye, H))
        - np.kron(H.T, np.kron(eye, eye))
        - np.kron(eye, np.kron(H.T, eye))
    )


def equivariance_residual(split: ReductiveSplit, alpha: BilinearMap) -> float:
    _check_dim(split, alpha)
    c = alpha.coeffs
    worst = 0.0
    for H in isotropy_matrices(split):
        defect = (
            np.einsum("lk,ijk->ijl", H, c)
            - np.einsum("pi,pjl->ijl", H, c)
            - np.einsum("qj,iql->ijl", H, c)
        )
        worst = max(worst, float(np.max(np.abs(defect))))
    return worst


def metric_defect(split: ReductiveSplit, c: NDArray) -> NDArray[np.float64]:
    """g(alpha(e_k, e_i), e_j) + g(e_i, alpha(e_k, e_j)) as a (d, d, d) array."""
    G = split.gram
    return np.einsum("kil,lj->kij", c, G) + np.einsum("il,kjl->kij", G, c)


def metric_residual(split: ReductiveSplit, alpha: BilinearMap) -> float:
    _check_dim(split, alpha)
    return float(np.max(np.abs(metric_defect(split, alpha.coeffs))))


def _restrict(
    space: MapSpace, constraint: Callable[[NDArray], NDArray], rcond: float
) -> NDArray:
    """Rows spanning the subspace of `space` on which `constraint` vanishes."""
    if space.dim == 0:
        return np.zeros((0, space.map_dim**3))
    images = np.array([constraint(b).ravel() for b in space.basis]).T
    if np.linalg.norm(images) < ZERO_OPERATOR_TOL:
        return space.vectors()
    combos = null_space(images, rcond=rcond)
    return combos.T @ space.vectors()


@lru_cache(maxsize=None)
def invariant_bilinear_basis(split: ReductiveSplit) -> MapSpace:
    """
    Orthonormal basis of the h-invariant bilinear maps on m.

    The equivariance constraints are imposed one h-generator at a time:
    N <- N @ null(L_h N). Each step keeps N orthonormal; a generator whose
    restricted operator is already zero is skipped.
    """
    d = split.dim
    rcond = config.RANK_RCOND
    kernel = np.eye(d**3)
    for index, H in enumerate(isotropy_matrices(split)):
        restricted = equivariance_operator(split, H) @ kernel
        if np.linalg.norm(restricted) < ZERO_OPERATOR_TOL:
            logger.debug("generator %d adds no constraint", index)
            continue
        kernel = kernel @ null_space(restricted, rcond=rcond)
        logger.debug("after generator %d: kernel dimension %d", index, kernel.shape[1])
        if kernel.shape[1] == 0:
            break

    rows = canonical_rows(kernel.T)
    logger.info("n=%d: invariant space has dimension %d", split.n, rows.shape[0])
    return MapSpace(basis=rows.reshape(-1, d, d, d), tolerance=rcond)


def metric_subspace(space: MapSpace, split: ReductiveSplit) -> MapSpace:
    """Maps in `space` with alpha(C, .) skew-adjoint for g, for every C."""
    d = split.dim
    rows = _restrict(
        space, lambda c: metric_defect(split, c), rcond=config.RANK_RCOND
    )
    rows = canonical_rows(rows)
    logger.info("n=%d: metric space has dimension %d", split.n, rows.shape[0])
    return MapSpace(basis=rows.reshape(-1, d, d, d), tolerance=space.tolerance)


def skew_torsion_subspace(
    metric_space: MapSpace, split: ReductiveSplit, alpha_lc: BilinearMap
) -> MapSpace:
    """
    Differences alpha - alpha_lc, alpha metric, that are antisymmetric in (x, y).

    The returned space is linear with `origin` set to alpha_lc.
    """
    _check_dim(split, alpha_lc)
    residual = metric_residual(split, alpha_lc)
    if residual > config.TOLERANCE:
        raise InvalidInputError(
            f"Levi-Civita candidate is not metric (residual {residual:.2e})"
        )
    d = split.dim
    rows = _restrict(
        metric_space,
        lambda c: c + c.transpose(1, 0, 2),
        rcond=config.RANK_RCOND,
    )
    rows = canonical_rows(rows)
    logger.info("n=%d: skew-torsion space has dimension %d", split.n, rows.shape[0])
    return MapSpace(
        basis=rows.reshape(-1, d, d, d),
        tolerance=metric_space.tolerance,
        origin=alpha_lc,
    )


def span_equal(a: MapSpace, b: MapSpace, tol: Optional[float] = None) -> bool:
    """True iff the two spaces span the same subspace of R^(d^3)."""
    tol = config.TOLERANCE if tol is None else tol
    if a.map_dim != b.map_dim:
        return False
    rank_a = np.linalg.matrix_rank(a.vectors(), tol=tol) if a.dim else 0
    rank_b = np.linalg.matrix_rank(b.vectors(), tol=tol) if b.dim else 0
    if rank_a != rank_b:
        return False
    if rank_a == 0:
        return True
    stacked = np.vstack([a.vectors(), b.vectors()])
    return int(np.linalg.matrix_rank(stacked, tol=tol)) == rank_a
