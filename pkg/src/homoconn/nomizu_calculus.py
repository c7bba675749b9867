"""
Torsion, curvature and Ricci-type invariants of an invariant connection.

Everything is evaluated on the canonical m-basis at the base point, which
determines the tensors everywhere by invariance. Conventions:

    T(A, B)    = alpha(A, B) - alpha(B, A) - [A, B]_m
    R(A, B)C   = alpha(A, alpha(B, C)) - alpha(B, alpha(A, C))
                 - alpha([A, B]_m, C) - [[A, B]_h, C]
    Ric(A, B)  = sum_i g(R(e_i, A)B, e_i)
    Sym(B)     = (B + B^t) / 2
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .config import config
from .errors import DimensionMismatchError
from .invariant_solver import BilinearMap, metric_residual
from .lie_core import ReductiveSplit

logger = logging.getLogger(__name__)

SKEW_TOL = 1e-9
FLAT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TorsionTensor:
    components: NDArray[np.float64]  # t[i,j,k]: T(e_i,e_j) = sum t[i,j,k] e_k

    def __call__(self, x: NDArray, y: NDArray) -> NDArray[np.float64]:
        return np.einsum("i,j,ijk->k", x, y, self.components)


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    components: NDArray[np.float64]  # r[i,j,k,l]: R(e_i,e_j)e_k = sum r[i,j,k,l] e_l

    def __call__(self, x: NDArray, y: NDArray, z: NDArray) -> NDArray[np.float64]:
        return np.einsum("i,j,k,ijkl->l", x, y, z, self.components)

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self.components), initial=0.0))


@dataclass(frozen=True, eq=False)
class ConnectionReport:
    """Curvature data of one invariant connection"""

    ricci: NDArray[np.float64]
    sym_ricci: NDArray[np.float64]
    scalar: float
    s_tensor: NDArray[np.float64]
    torsion_norm_sq: float
    is_metric: bool
    is_skew_torsion: bool
    is_einstein: Optional[bool]  # None: not a skew-torsion connection
    einstein_residual: Optional[float]
    sym_ricci_route_gap: float  # |Sym(Ric) - (Ric^g - S/4)|_max
    metric_residual: float
    curvature_max: float
    cyclic_residual: float
    gram: NDArray[np.float64]
    torsion: TorsionTensor
    curvature: CurvatureTensor


def _check(split: ReductiveSplit, alpha: BilinearMap) -> None:
    if alpha.dim != split.dim:
        raise DimensionMismatchError(
            f"map has dimension {alpha.dim}, split has dim m = {split.dim}"
        )


def nomizu_operator(alpha: BilinearMap, x: NDArray) -> NDArray[np.float64]:
    """Lambda(x) = alpha(x, .) as a matrix acting on coefficient columns."""
    return np.einsum("i,ijk->kj", x, alpha.coeffs)


def torsion(split: ReductiveSplit, alpha: BilinearMap) -> TorsionTensor:
    _check(split, alpha)
    c = alpha.coeffs
    return TorsionTensor(c - c.transpose(1, 0, 2) - split.bracket_mm_m)


def curvature(split: ReductiveSplit, alpha: BilinearMap) -> CurvatureTensor:
    _check(split, alpha)
    c = alpha.coeffs
    r = (
        np.einsum("bcm,aml->abcl", c, c)
        - np.einsum("acm,bml->abcl", c, c)
        - np.einsum("abm,mcl->abcl", split.bracket_mm_m, c)
        - np.einsum("abh,hcl->abcl", split.bracket_mm_h, split.bracket_hm_m)
    )
    return CurvatureTensor(r)


def levi_civita_map(split: ReductiveSplit) -> BilinearMap:
    """
    Levi-Civita map from the bracket table alone.

    alpha(X, Y) = [X, Y]_m / 2 + U(X, Y), where U is symmetric and
    2 g(U(X, Y), Z) = g(X, [Z, Y]_m) + g([Z, X]_m, Y).
    """
    b = split.bracket_mm_m
    G = split.gram
    lowered = 0.5 * (
        np.einsum("kjl,il->ijk", b, G) + np.einsum("kil,lj->ijk", b, G)
    )
    u = np.einsum("ijk,kl->ijl", lowered, np.linalg.inv(G))
    return BilinearMap(0.5 * b + u)


def torsion_form(
    split: ReductiveSplit, torsion_tensor: TorsionTensor
) -> Tuple[NDArray[np.float64], bool]:
    """omega[i,j,k] = g(T(e_i,e_j), e_k) and whether it is totally antisymmetric."""
    omega = np.einsum("ijl,lk->ijk", torsion_tensor.components, split.gram)
    defect = np.max(np.abs(omega + omega.transpose(0, 2, 1)), initial=0.0)
    return omega, bool(defect < SKEW_TOL)


def ricci(split: ReductiveSplit, curvature_tensor: CurvatureTensor) -> NDArray:
    return np.einsum("iabl,li->ab", curvature_tensor.components, split.gram)


def cyclic_residual(curvature_tensor: CurvatureTensor) -> float:
    """max |R(X,Y)Z - R(Y,Z)X| over basis triples."""
    r = curvature_tensor.components
    return float(np.max(np.abs(r - r.transpose(1, 2, 0, 3)), initial=0.0))


def sectional_identity_residual(
    split: ReductiveSplit, curvature_tensor: CurvatureTensor, A: NDArray, B: NDArray
) -> float:
    """Defect of g(R(A,B)B, A) = g(A,A) g(B,B) - g(A,B)^2."""
    G = split.gram
    lhs = curvature_tensor(A, B, B) @ G @ A
    rhs = (A @ G @ A) * (B @ G @ B) - (A @ G @ B) ** 2
    return float(abs(lhs - rhs))


def s_tensor(torsion_tensor: TorsionTensor, gram: NDArray) -> NDArray:
    """S(X, Y) = sum_j g(T(e_j, X), T(e_j, Y))."""
    t = torsion_tensor.components
    return np.einsum("jxl,lm,jym->xy", t, gram, t)


@lru_cache(maxsize=None)
def _levi_civita_ricci(split: ReductiveSplit) -> NDArray:
    return ricci(split, curvature(split, levi_civita_map(split)))


def einstein_check(
    report: ConnectionReport, dim: int, tol: Optional[float] = None
) -> Optional[bool]:
    """
    Sym(Ric) = (s / dim) g, for skew-torsion connections only.

    Returns None when the connection does not have totally skew torsion.
    """
    if not report.is_skew_torsion:
        return None
    tol = config.TOLERANCE if tol is None else tol
    return _einstein_residual(report.sym_ricci, report.scalar, report.gram, dim) < tol


def _einstein_residual(sym_ricci, scalar, gram, dim) -> float:
    return float(np.max(np.abs(sym_ricci - (scalar / dim) * gram)))


def curvature_invariants(
    split: ReductiveSplit, alpha: BilinearMap, tol: Optional[float] = None
) -> ConnectionReport:
    """Full curvature report: Ricci, both Sym(Ric) routes, S, |T|^2, Einstein."""
    _check(split, alpha)
    tol = config.TOLERANCE if tol is None else tol
    G = split.gram
    dim = split.dim

    tors = torsion(split, alpha)
    curv = curvature(split, alpha)
    ric = ricci(split, curv)
    sym = 0.5 * (ric + ric.T)
    scalar = float(np.trace(np.linalg.inv(G) @ ric))
    s = s_tensor(tors, G)
    norm_sq = float(np.sum(tors.components**2)) / 6.0

    m_res = metric_residual(split, alpha)
    is_metric = m_res < SKEW_TOL
    _, skew_form = torsion_form(split, tors)
    is_skew = bool(is_metric and skew_form)

    route_gap = float(np.max(np.abs(sym - (_levi_civita_ricci(split) - 0.25 * s))))
    residual = _einstein_residual(sym, scalar, G, dim) if is_skew else None
    is_einstein = (residual < tol) if residual is not None else None

    logger.debug(
        "report: metric=%s skew=%s einstein=%s scalar=%.6g",
        is_metric,
        is_skew,
        is_einstein,
        scalar,
    )
    return ConnectionReport(
        ricci=ric,
        sym_ricci=sym,
        scalar=scalar,
        s_tensor=s,
        torsion_norm_sq=norm_sq,
        is_metric=is_metric,
        is_skew_torsion=is_skew,
        is_einstein=is_einstein,
        einstein_residual=residual,
        sym_ricci_route_gap=route_gap,
        metric_residual=m_res,
        curvature_max=curv.max_norm,
        cyclic_residual=cyclic_residual(curv),
        gram=np.array(G),
        torsion=tors,
        curvature=curv,
    )
