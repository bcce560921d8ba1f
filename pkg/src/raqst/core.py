"""Quantum-state primitives: operator bases, Bloch parameterization,
fidelity-family metrics, and projection of unphysical estimates.

States are plain complex ``numpy`` arrays.  A state rho is parameterized as

    rho = I/d + sum_i theta_i * Omega_i,      theta_i = Tr(rho Omega_i),

where {Omega_i} is the traceless orthonormal Pauli product basis from
:func:`build_pauli_basis`.  The basis ordering (lexicographic over Pauli
labels, all-identity term removed) is part of the serialization contract.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .kernels import simplex_project_kernel

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
_AXES = "IXYZ"


@dataclass(frozen=True)
class HermitianBasis:
    """Traceless orthonormal Hermitian operator basis {Omega_i}.

    Attributes
    ----------
    dim : int
        Hilbert-space dimension d.
    ops : ndarray, shape (d*d-1, d, d)
        The basis operators, Tr(Omega_i Omega_j) = delta_ij.
    labels : tuple of str
        Pauli label strings, e.g. "IX", "ZZ", in catalog order.
    """

    dim: int
    ops: np.ndarray = field(repr=False)
    labels: tuple

    @property
    def size(self) -> int:
        return self.dim * self.dim - 1


@functools.lru_cache(maxsize=8)
def build_pauli_basis(n_qubits: int) -> HermitianBasis:
    """Build the normalized Pauli tensor-product basis on ``n_qubits``.

    Returns the 4^n - 1 operators sigma_{a1} x ... x sigma_{an} / 2^{n/2}
    in lexicographic label order over {I,X,Y,Z}^n, with the all-identity
    term removed.  Each operator is traceless and the set is orthonormal
    under the Hilbert-Schmidt inner product.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    norm = 2.0 ** (n_qubits / 2.0)
    labels = []
    ops = []
    for idx in range(4**n_qubits):
        digits = []
        rem = idx
        for _ in range(n_qubits):
            digits.append(rem % 4)
            rem //= 4
        digits.reverse()
        if all(dig == 0 for dig in digits):
            continue
        label = "".join(_AXES[dig] for dig in digits)
        op = np.array([[1.0 + 0j]])
        for dig in digits:
            op = np.kron(op, _PAULI[_AXES[dig]])
        labels.append(label)
        ops.append(op / norm)
    stack = np.stack(ops)
    stack.setflags(write=False)
    return HermitianBasis(dim=2**n_qubits, ops=stack, labels=tuple(labels))


def state_to_bloch(rho: np.ndarray, basis: HermitianBasis) -> np.ndarray:
    """Coordinates theta_i = Tr(rho Omega_i) of a Hermitian matrix."""
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"state shape {rho.shape} does not match d={basis.dim}")
    theta = np.einsum("kij,ji->k", basis.ops, rho)
    if np.abs(theta.imag).max(initial=0.0) > 1e-10:
        raise ValueError("state is not Hermitian: trace coordinates not real")
    return np.ascontiguousarray(theta.real)


def bloch_to_matrix(theta: np.ndarray, basis: HermitianBasis) -> np.ndarray:
    """Hermitian unit-trace matrix I/d + sum_i theta_i Omega_i.

    The output is not guaranteed positive semidefinite; estimates produced
    by least squares land here before :func:`project_to_physical`.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (basis.size,):
        raise ValueError(f"theta length {theta.shape} does not match basis {basis.size}")
    return np.eye(basis.dim) / basis.dim + np.tensordot(theta, basis.ops, axes=1)


def project_to_physical(mu: np.ndarray, *, herm_tol: float = 1e-8) -> np.ndarray:
    """Closest density matrix to ``mu`` in Frobenius norm.

    Symmetrizes the input, then projects its eigenvalues onto the
    probability simplex while keeping the eigenvectors, which is the
    Frobenius-nearest PSD unit-trace matrix.
    """
    dev = np.abs(mu - mu.conj().T).max()
    if dev > herm_tol:
        raise ValueError(f"input is not Hermitian: max |mu - mu^dag| = {dev:.3e}")
    sym = 0.5 * (mu + mu.conj().T)
    evals, evecs = np.linalg.eigh(sym)
    projected = simplex_project_kernel(evals)
    return (evecs * projected) @ evecs.conj().T


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def _check_physical(rho: np.ndarray, name: str) -> None:
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError(f"{name} is not positive semidefinite")


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity F = Tr^2 sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1]."""
    if rho.shape != sigma.shape:
        raise ValueError("fidelity requires equal dimensions")
    _check_physical(rho, "rho")
    _check_physical(sigma, "sigma")
    sq = _psd_sqrt(rho)
    inner = np.linalg.eigvalsh(sq @ sigma @ sq)
    f = float(np.sqrt(np.clip(inner, 0.0, None)).sum() ** 2)
    return min(max(f, 0.0), 1.0)


def infidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """1 - F(rho, sigma); the figure of merit for every study here."""
    return 1.0 - fidelity(rho, sigma)


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2)."""
    return float(np.vdot(rho, rho).real)


def bures_distance_sq(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Squared Bures distance D_B^2 = 2 (1 - sqrt(F))."""
    return 2.0 * (1.0 - np.sqrt(fidelity(rho, sigma)))


def validate_density_matrix(rho: np.ndarray, *, name: str = "state") -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the input."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError(f"{name} is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-12:
        raise ValueError(f"{name} does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError(f"{name} has a negative eigenvalue")
    return rho


def density_matrix_to_json(rho: np.ndarray) -> dict:
    """JSON-friendly encoding {dim, re, im} of a density matrix."""
    return {
        "dim": rho.shape[0],
        "re": rho.real.tolist(),
        "im": rho.imag.tolist(),
    }


def density_matrix_from_json(blob: dict) -> np.ndarray:
    d = int(blob["dim"])
    rho = np.array(blob["re"], dtype=np.float64) + 1j * np.array(blob["im"], dtype=np.float64)
    if rho.shape != (d, d):
        raise ValueError(f"matrix shape {rho.shape} does not match dim {d}")
    return rho
