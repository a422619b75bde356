"""Dense complex linear algebra used by every physics module.

Operators, state vectors and density matrices are plain ``numpy`` arrays of
dtype ``complex128``. Joint internal/motional operators use the convention
``joint_index = internal_index * (cutoff + 1) + n``, i.e. the phonon index is
the fast index of ``kron(internal, fock)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12


class NoNullVectorError(ValueError):
    """Raised when a matrix has no singular value below the requested tolerance."""


def as_operator(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Tensor product; the second factor carries the fast index."""
    return np.kron(as_operator(a), as_operator(b))


def dagger(a) -> np.ndarray:
    return np.conj(as_operator(a)).T


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def fock_lowering(cutoff: int) -> np.ndarray:
    """Annihilation operator on the Fock states ``|0>, ..., |cutoff>``."""
    if int(cutoff) != cutoff or cutoff < 1:
        raise ValueError(f"fock cutoff must be an integer >= 1, got {cutoff!r}")
    cutoff = int(cutoff)
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)


def number_operator(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff + 1)).astype(complex)


def hermiticity_defect(a) -> float:
    a = as_operator(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` unchanged, raising ``ValueError`` if ``max|a - a^dag| >= tol``."""
    defect = hermiticity_defect(a)
    if defect >= tol:
        raise ValueError(f"operator is not Hermitian: max|A - A^dag| = {defect:.3e}")
    return a


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, eig_tol=1e-8) -> np.ndarray:
    rho = as_operator(rho)
    defect = hermiticity_defect(rho)
    if defect > herm_tol:
        raise ValueError(f"density matrix not Hermitian (defect {defect:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise ValueError(f"density matrix trace {tr:.12g} differs from 1")
    lo = min_eigenvalue(rho)
    if lo < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def min_eigenvalue(rho) -> float:
    rho = as_operator(rho)
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


def expectation(rho, obs) -> complex:
    """``trace(obs @ rho)``; Hermitian observables must give a real value."""
    rho = as_operator(rho)
    obs = as_operator(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs observable {obs.shape}")
    value = np.einsum("ij,ji->", obs, rho)
    if hermiticity_defect(obs) < HERMITIAN_TOL and abs(value.imag) >= 1e-10:
        raise ValueError(f"expectation of Hermitian observable has imaginary part {value.imag:.3e}")
    return complex(value)


def trace_distance(a, b) -> float:
    diff = as_operator(a) - as_operator(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


@dataclass(frozen=True)
class NullVector:
    vector: np.ndarray
    multiplicity: int
    singular_values: np.ndarray
    residual: float


def null_vector(a, tol: float = 1e-10) -> NullVector:
    """Unit vector ``v`` with ``|a v| < tol * |a|``, from the SVD of ``a``.

    ``multiplicity`` counts singular values below ``tol * |a|``; when it is
    larger than one the returned vector is an arbitrary member of the kernel.
    """
    a = as_operator(a)
    _, s, vh = np.linalg.svd(a)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    threshold = tol * scale
    if s[-1] >= threshold:
        raise NoNullVectorError(
            f"no null vector: smallest singular value {s[-1]:.3e} >= {threshold:.3e}"
        )
    v = vh[-1].conj()
    v = v / np.linalg.norm(v)
    return NullVector(
        vector=v,
        multiplicity=int(np.sum(s < threshold)),
        singular_values=s,
        residual=float(np.linalg.norm(a @ v)),
    )
