"""Dense Hermitian eigensolver and spectrum utilities.

Matrix-valued operator families are discretized as dense Hermitian matrices;
this module wraps the eigensolver behind validated types so every caller gets
ascending eigenvalues, a residual guarantee and a consistent kernel test.
All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .defaults import KERNEL_TOL
from .errors import NonHermitianInput

HERMITIAN_RTOL = 1e-12
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DenseHermitian:
    """A dim x dim complex Hermitian matrix (validated on construction)."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
        scale = max(float(np.max(np.abs(m))), 1.0)
        if float(np.max(np.abs(m - m.conj().T))) > HERMITIAN_RTOL * scale:
            raise NonHermitianInput("matrix is not Hermitian within 1e-12 relative tolerance")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalue list with multiplicity, tagged with its origin."""

    eigenvalues: tuple[float, ...]
    source: str = "matrix"  # "matrix" | "lattice-truncation"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.eigenvalues)
        if any(vals[i] > vals[i + 1] for i in range(len(vals) - 1)):
            vals = tuple(sorted(vals))
        object.__setattr__(self, "eigenvalues", vals)

    def __len__(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class EighResult:
    spectrum: Spectrum
    vectors: np.ndarray = field(repr=False)  # orthonormal eigenvectors, columns


def eigh(m: DenseHermitian) -> EighResult:
    """All eigenvalues (ascending) and orthonormal eigenvectors of m.

    The residual ||M v - lambda v|| is checked to be at most
    1e-10 * (1 + |lambda|) for every pair; LAPACK at the dimensions used here
    (<= a few hundred) satisfies this with a wide margin.
    """
    if not isinstance(m, DenseHermitian):
        m = DenseHermitian(np.asarray(m))
    vals, vecs = np.linalg.eigh(m.entries)
    residual = m.entries @ vecs - vecs * vals[np.newaxis, :]
    bounds = RESIDUAL_TOL * (1.0 + np.abs(vals))
    worst = np.linalg.norm(residual, axis=0) - bounds
    if np.any(worst > 0):
        raise NonHermitianInput(
            f"eigensolver residual exceeds tolerance by {float(np.max(worst)):.3e}"
        )
    return EighResult(Spectrum(tuple(float(v) for v in vals), source="matrix"), vecs)


def kernel_dimension(s: Spectrum | tuple[float, ...] | list[float], tol: float = KERNEL_TOL) -> int:
    """Number of eigenvalues with |lambda| <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = s.eigenvalues if isinstance(s, Spectrum) else s
    return sum(1 for v in vals if abs(v) <= tol)
