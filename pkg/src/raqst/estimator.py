"""Weighted linear-regression tomography.

The measurement model for effect E with coordinates (gamma0, Gamma) is

    p_hat = gamma0/d + Theta . Gamma + e,

one equation per recorded outcome frequency.  The batch solve computes the
weighted least-squares estimate over all records; the recursive update
absorbs one record at a time through a rank-one update of (Theta_hat, Q),
Q = (X^T W X)^{-1}, and is algebraically equivalent to the batch solve that
shares its prior.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import HermitianBasis, bloch_to_matrix, project_to_physical
from .kernels import recursive_update_kernel
from .measurements import Povm

DEFAULT_RIDGE = 1e-8


@dataclass(frozen=True)
class RegressionRecord:
    """One linear regression equation extracted from counts."""

    gamma0: float
    gamma: np.ndarray = field(repr=False)
    p_hat: float
    n_trials: int
    weight: float


@dataclass(frozen=True)
class EstimatorState:
    """The pair (Theta_hat, Q) evolved by recursive updates."""

    theta_hat: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    records_absorbed: int = 0

    @property
    def dim_params(self) -> int:
        return self.theta_hat.shape[0]


def compute_weight(n_trials: int, count: int) -> float:
    """Weight W = n / (p_hat (1 - p_hat)) with the frequency clamped.

    p_hat is clamped to [1/(2n), 1 - 1/(2n)] for the weight only, keeping
    W finite at zero or full counts; the recorded frequency itself stays
    unclamped.
    """
    if not 0 <= count <= n_trials:
        raise ValueError(f"count {count} outside [0, {n_trials}]")
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    half = 0.5 / n_trials
    p = min(max(count / n_trials, half), 1.0 - half)
    return n_trials / (p * (1.0 - p))


def records_from_counts(povm: Povm, counts: np.ndarray) -> list[RegressionRecord]:
    """One regression record per POVM outcome."""
    counts = np.asarray(counts)
    if counts.shape != (povm.n_outcomes,):
        raise ValueError(f"counts length {counts.shape} does not match {povm.n_outcomes} outcomes")
    if (counts < 0).any():
        raise ValueError("negative counts")
    n = int(counts.sum())
    if n <= 0:
        raise ValueError("counts must sum to a positive total")
    return [
        RegressionRecord(
            gamma0=float(povm.gamma0[m]),
            gamma=povm.gammas[m],
            p_hat=counts[m] / n,
            n_trials=n,
            weight=compute_weight(n, int(counts[m])),
        )
        for m in range(povm.n_outcomes)
    ]


def batch_lre(
    records: list[RegressionRecord], dim: int, *, ridge: float = DEFAULT_RIDGE
) -> EstimatorState:
    """Weighted least-squares solve over all records at once.

    Returns Theta_hat = (X^T W X + ridge I)^{-1} X^T W y with
    y = p_hat - gamma0/d, and Q = (X^T W X + ridge I)^{-1}.
    With ridge = 0 a rank-deficient design raises instead of solving.
    """
    if not records:
        raise ValueError("no records to solve")
    k = records[0].gamma.shape[0]
    d = dim
    x = np.stack([r.gamma for r in records])
    w = np.array([r.weight for r in records])
    y = np.array([r.p_hat - r.gamma0 / d for r in records])
    a = (x.T * w) @ x
    if ridge:
        a = a + ridge * np.eye(k)
    else:
        rank = np.linalg.matrix_rank(a)
        if rank < k:
            raise np.linalg.LinAlgError(
                f"design matrix rank {rank} < {k}: settings do not span the "
                "parameter space and no ridge regularization was requested"
            )
    q = np.linalg.inv(a)
    q = 0.5 * (q + q.T)
    theta = q @ ((x.T * w) @ y)
    return EstimatorState(theta_hat=theta, q=q, records_absorbed=len(records))


def fresh_state(n_params: int, *, ridge: float = DEFAULT_RIDGE) -> EstimatorState:
    """Scratch prior for starting the recursion with no batch stage:
    Theta_hat = 0 and Q = I/ridge, matching the batch ridge term."""
    return EstimatorState(
        theta_hat=np.zeros(n_params), q=np.eye(n_params) / ridge, records_absorbed=0
    )


def recursive_update(state: EstimatorState, record: RegressionRecord, dim: int) -> EstimatorState:
    """Absorb one record through the rank-one update.

    a = (1/W + Gamma^T Q Gamma)^{-1}
    Theta_hat += a Q Gamma (p_hat - gamma0/d - Gamma^T Theta_hat)
    Q -= a Q Gamma Gamma^T Q          (re-symmetrized)
    """
    theta, q = recursive_update_kernel(
        state.theta_hat,
        state.q,
        record.gamma0,
        np.ascontiguousarray(record.gamma),
        record.p_hat,
        record.weight,
        float(dim),
    )
    if not np.isfinite(theta).all():
        raise FloatingPointError("recursive update produced non-finite estimate")
    return replace(
        state, theta_hat=theta, q=q, records_absorbed=state.records_absorbed + 1
    )


def absorb_all(state: EstimatorState, records: list[RegressionRecord], dim: int) -> EstimatorState:
    """Fold a list of records into the state, one rank-one update each."""
    for rec in records:
        state = recursive_update(state, rec, dim)
    return state


def current_estimate(state: EstimatorState, basis: HermitianBasis) -> np.ndarray:
    """The physical (PSD, unit-trace) state for the current Theta_hat."""
    return project_to_physical(bloch_to_matrix(state.theta_hat, basis))
