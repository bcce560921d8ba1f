"""Measurement settings: cube bases, mutually unbiased bases, product-POVM
completion, rotated MUBs, and eigenbasis POVMs.

Every POVM stores, next to the effect matrices, the regression coordinates
of each effect: gamma0 = Tr(E) and Gamma_k = Tr(E Omega_k).  With these the
Born rule reads p = gamma0/d + Theta . Gamma, which is the linear model the
estimator fits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import HermitianBasis, build_pauli_basis

_SQ2 = np.sqrt(2.0)

# Single-qubit eigenvector pairs (+, -) for the X, Y, Z axes.
_AXIS_KETS = {
    "X": (np.array([1, 1]) / _SQ2, np.array([1, -1]) / _SQ2),
    "Y": (np.array([1, 1j]) / _SQ2, np.array([1, -1j]) / _SQ2),
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}


@dataclass(frozen=True)
class ParameterizedEffect:
    """A PSD effect E with coordinates gamma0 = Tr(E), gamma_k = Tr(E Omega_k)."""

    effect: np.ndarray = field(repr=False)
    gamma0: float
    gamma: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Povm:
    """A labeled POVM: effects stacked with their regression coordinates.

    Attributes
    ----------
    label : str
        Unique setting name, e.g. "XY", "MUB3", "minp".
    matrices : ndarray, shape (m, d, d)
        The effect matrices; they sum to the identity.
    gamma0 : ndarray, shape (m,)
        Traces of the effects.
    gammas : ndarray, shape (m, d*d-1)
        Bloch coordinates of the effects.
    """

    label: str
    matrices: np.ndarray = field(repr=False)
    gamma0: np.ndarray = field(repr=False)
    gammas: np.ndarray = field(repr=False)

    @property
    def n_outcomes(self) -> int:
        return self.matrices.shape[0]

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def effects(self) -> list[ParameterizedEffect]:
        return [
            ParameterizedEffect(self.matrices[m], float(self.gamma0[m]), self.gammas[m])
            for m in range(self.n_outcomes)
        ]


@dataclass(frozen=True)
class MeasurementCatalog:
    """Ordered collection of POVMs forming an admissible measurement set."""

    settings: tuple

    def __post_init__(self):
        labels = [p.label for p in self.settings]
        if not labels:
            raise ValueError("catalog must contain at least one setting")
        if len(set(labels)) != len(labels):
            raise ValueError(f"catalog labels are not unique: {labels}")

    def __iter__(self):
        return iter(self.settings)

    def __len__(self):
        return len(self.settings)


def parameterize_effect(effect: np.ndarray, basis: HermitianBasis) -> ParameterizedEffect:
    """Coordinates (gamma0, Gamma) of one PSD effect."""
    effect = np.asarray(effect, dtype=np.complex128)
    if effect.shape != (basis.dim, basis.dim):
        raise ValueError(f"effect shape {effect.shape} does not match d={basis.dim}")
    if np.linalg.eigvalsh(0.5 * (effect + effect.conj().T)).min() < -1e-10:
        raise ValueError("effect is not positive semidefinite")
    gamma0 = float(np.trace(effect).real)
    gamma = np.einsum("ij,kji->k", effect, basis.ops)
    if np.abs(gamma.imag).max(initial=0.0) > 1e-10:
        raise ValueError("effect is not Hermitian: coordinates not real")
    return ParameterizedEffect(effect, gamma0, np.ascontiguousarray(gamma.real))


def make_povm(label: str, matrices: np.ndarray, basis: HermitianBasis) -> Povm:
    """Validate effect matrices and attach regression coordinates."""
    matrices = np.asarray(matrices, dtype=np.complex128)
    total = matrices.sum(axis=0)
    if np.abs(total - np.eye(basis.dim)).max() > 1e-10:
        raise ValueError(f"POVM {label!r} effects do not sum to identity")
    gamma0 = np.empty(matrices.shape[0])
    gammas = np.empty((matrices.shape[0], basis.size))
    for m in range(matrices.shape[0]):
        par = parameterize_effect(matrices[m], basis)
        gamma0[m] = par.gamma0
        gammas[m] = par.gamma
    matrices.setflags(write=False)
    gamma0.setflags(write=False)
    gammas.setflags(write=False)
    return Povm(label=label, matrices=matrices, gamma0=gamma0, gammas=gammas)


def povm_from_kets(label: str, kets: list[np.ndarray], basis: HermitianBasis) -> Povm:
    """Rank-one POVM projecting onto an orthonormal set of kets."""
    mats = np.stack([np.outer(k, k.conj()) for k in kets])
    return make_povm(label, mats, basis)


def perp_qubit(ket: np.ndarray) -> np.ndarray:
    """The single-qubit state orthogonal to ``ket``."""
    return np.array([-np.conj(ket[1]), np.conj(ket[0])])


def product_kets(psi1: np.ndarray, psi2: np.ndarray) -> list[np.ndarray]:
    """The four products of {psi1, psi1_perp} x {psi2, psi2_perp}.

    Outcome order is lexicographic with the second factor varying fastest,
    i.e. (++, +-, -+, --); this ordering is part of the output contract.
    """
    p1, p2 = perp_qubit(psi1), perp_qubit(psi2)
    return [
        np.kron(psi1, psi2),
        np.kron(psi1, p2),
        np.kron(p1, psi2),
        np.kron(p1, p2),
    ]


def cube_settings(basis: HermitianBasis | None = None) -> MeasurementCatalog:
    """The 9 standard cube settings {X,Y,Z} x {X,Y,Z}, 4 projectors each."""
    basis = basis or build_pauli_basis(2)
    if basis.dim != 4:
        raise ValueError("cube settings are defined for two qubits")
    settings = []
    for a in "XYZ":
        for b in "XYZ":
            kets = product_kets(_AXIS_KETS[a][0], _AXIS_KETS[b][0])
            settings.append(povm_from_kets(a + b, kets, basis))
    return MeasurementCatalog(tuple(settings))


# One standard set of five mutually unbiased bases for d=4; each row of a
# block is one basis vector.  Cross-basis overlaps |<e|f>|^2 all equal 1/4.
_MUB_ROWS = [
    np.eye(4, dtype=complex),
    np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]],
        dtype=complex,
    )
    / 2.0,
    np.array(
        [[1, -1, -1j, -1j], [1, 1, -1j, 1j], [1, 1, 1j, -1j], [1, -1, 1j, 1j]],
        dtype=complex,
    )
    / 2.0,
    np.array(
        [[1, -1j, -1j, -1], [1, 1j, 1j, -1], [1, -1j, 1j, 1], [1, 1j, -1j, 1]],
        dtype=complex,
    )
    / 2.0,
    np.array(
        [[1, -1j, -1, -1j], [1, 1j, -1, 1j], [1, -1j, 1, 1j], [1, 1j, 1, -1j]],
        dtype=complex,
    )
    / 2.0,
]


def mub_settings(basis: HermitianBasis | None = None) -> MeasurementCatalog:
    """Five pairwise mutually unbiased bases for two qubits."""
    basis = basis or build_pauli_basis(2)
    if basis.dim != 4:
        raise ValueError("the MUB construction here is for d=4 only")
    settings = []
    for k, rows in enumerate(_MUB_ROWS):
        kets = [rows[i] for i in range(4)]
        settings.append(povm_from_kets(f"MUB{k}", kets, basis))
    return MeasurementCatalog(tuple(settings))


def complete_product_povm(
    psi1: np.ndarray, psi2: np.ndarray, basis: HermitianBasis | None = None, label: str = "minp"
) -> Povm:
    """Complete a product projector |psi1 psi2> to its 4-outcome product POVM."""
    basis = basis or build_pauli_basis(2)
    n1, n2 = np.linalg.norm(psi1), np.linalg.norm(psi2)
    if n1 < 1e-12 or n2 < 1e-12:
        raise ValueError("qubit states must be nonzero")
    return povm_from_kets(label, product_kets(psi1 / n1, psi2 / n2), basis)


def ordered_eigensystem(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition with reproducible conventions.

    Eigenvalues sorted descending; each eigenvector's global phase fixed so
    its largest-magnitude component is real positive.
    """
    evals, evecs = np.linalg.eigh(rho)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    for j in range(evecs.shape[1]):
        k = int(np.argmax(np.abs(evecs[:, j])))
        phase = evecs[k, j] / abs(evecs[k, j])
        evecs[:, j] = evecs[:, j] * np.conj(phase)
    return evals, evecs


def rotate_mub_to_basis(
    rho_hat: np.ndarray, basis: HermitianBasis | None = None, suffix: str = "@rot"
) -> MeasurementCatalog:
    """The standard MUB with every vector mapped v -> Uv, U the eigenbasis
    of ``rho_hat``; the first rotated basis then diagonalizes ``rho_hat``."""
    basis = basis or build_pauli_basis(2)
    _, evecs = ordered_eigensystem(rho_hat)
    settings = []
    for k, rows in enumerate(_MUB_ROWS):
        kets = [evecs @ rows[i] for i in range(4)]
        settings.append(povm_from_kets(f"MUB{k}{suffix}", kets, basis))
    return MeasurementCatalog(tuple(settings))


def eigenbasis_povm(
    rho_hat: np.ndarray, basis: HermitianBasis | None = None, label: str = "eig"
) -> Povm:
    """Rank-one projectors onto the eigenvectors of ``rho_hat``."""
    basis = basis or build_pauli_basis(2)
    _, evecs = ordered_eigensystem(rho_hat)
    kets = [evecs[:, j] for j in range(evecs.shape[1])]
    return povm_from_kets(label, kets, basis)
