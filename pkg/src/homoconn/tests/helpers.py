"""Builders shared by the test modules."""

import dataclasses

import numpy as np

from homoconn.lie_core import MatrixLieAlgebra, MVector, ReductiveSplit
from homoconn.sphere_geometry import origin_structure


def random_m_vector(split: ReductiveSplit, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=split.dim)


def random_horizontal_s7(rng: np.random.Generator) -> np.ndarray:
    """Random m-coefficients supported on z_1, z_2 (orthogonal to xi_1, xi_2, xi_3)."""
    x = np.zeros(7)
    x[:4] = rng.normal(size=4)
    return x


def m_vector(z, a) -> np.ndarray:
    return MVector(z=np.asarray(z, dtype=complex), a=a).coeffs


def eta_eta(n: int) -> np.ndarray:
    eta = origin_structure(n).eta
    return np.outer(eta, eta)


def perturbed_split(split: ReductiveSplit) -> ReductiveSplit:
    """The same split with h cut down to its first generator."""
    return dataclasses.replace(
        split,
        h_basis=split.h_basis[:1],
        bracket_hm_m=split.bracket_hm_m[:1],
    )


def perturbed_algebra(
    algebra: MatrixLieAlgebra, scale: float = 1e-3, seed: int = 0
) -> MatrixLieAlgebra:
    """Structure constants with antisymmetric noise that breaks Jacobi."""
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=scale, size=algebra.structure_constants.shape)
    noise = noise - noise.transpose(1, 0, 2)
    return dataclasses.replace(
        algebra, structure_constants=algebra.structure_constants + noise
    )


def max_abs(array) -> float:
    return float(np.max(np.abs(array)))
