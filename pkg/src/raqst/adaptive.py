"""Adaptive measurement selection: the gain criterion, the minimum-probability
product-projector search, candidate-set construction, and resource schedules.

At each adaptive step the estimator's covariance factor Q scores every
candidate effect by the trace decrease its absorption would produce,

    g = Gamma^T Q^2 Gamma / (1/W + Gamma^T Q Gamma),

with the weight W predicted from the current estimate.  The POVM containing
the highest-gain effect is measured next.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import HermitianBasis, bloch_to_matrix, build_pauli_basis, project_to_physical
from .kernels import gain_kernel, minp_search_kernel
from .measurements import (
    MeasurementCatalog,
    Povm,
    complete_product_povm,
    eigenbasis_povm,
)

_SQ2 = math.sqrt(2.0)

PRED_PROB_FLOOR = 1e-6  # clamp for predicted probabilities in weight prediction


class AdaptiveMode(enum.Enum):
    RAQST1 = 1  # product measurements only
    RAQST2 = 2  # adds the eigenbasis of the current estimate


@dataclass(frozen=True)
class ResourceSchedule:
    """Copy budget split N = N1 + K * N2 (+ remainder folded into N1)."""

    n_total: int
    n_stage1: int
    k_steps: int
    n_per_step: int

    def __post_init__(self):
        used = self.n_stage1 + self.k_steps * self.n_per_step
        if used != self.n_total:
            raise ValueError(f"schedule does not conserve copies: {used} != {self.n_total}")


@dataclass(frozen=True)
class MinProbResult:
    """Best product projector found by the alternating search."""

    psi1: np.ndarray = field(repr=False)
    psi2: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    p_min: float
    iterations: int


@dataclass(frozen=True)
class SelectionDecision:
    """Outcome of one candidate scoring pass."""

    povm: Povm
    label: str
    gain: float
    p_tilde_raw: float
    p_tilde_clamped: float
    effect_index: int


def gain(q: np.ndarray, gamma: np.ndarray, w_pred: float) -> float:
    """Trace decrease of Q from absorbing one effect at predicted weight."""
    if w_pred <= 0:
        raise ValueError("predicted weight must be positive")
    return float(gain_kernel(q, np.ascontiguousarray(gamma), w_pred))


def predicted_prob(
    theta_hat: np.ndarray, gamma0: float, gamma: np.ndarray, dim: int
) -> tuple[float, float]:
    """Model probability gamma0/d + Theta_hat . Gamma.

    Returns (raw, clamped-to-[0,1]); the raw value can fall outside [0, 1]
    because Theta_hat need not be physical.
    """
    raw = float(gamma0 / dim + theta_hat @ gamma)
    return raw, min(max(raw, 0.0), 1.0)


def bloch_to_qubit_ket(s: np.ndarray) -> np.ndarray:
    """Unit Bloch vector -> qubit state (cos t/2, e^{i phi} sin t/2)."""
    t = math.acos(min(max(float(s[2]), -1.0), 1.0))
    phi = math.atan2(float(s[1]), float(s[0]))
    return np.array([math.cos(t / 2.0), math.sin(t / 2.0) * np.exp(1j * phi)])


def _unit_or(v: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < 1e-14:
        return fallback / np.linalg.norm(fallback)
    return v / n


def min_prob_product_projector(
    theta_hat: np.ndarray,
    rng: np.random.Generator,
    *,
    restarts: int = 5,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> MinProbResult:
    """Product projector |psi1 psi2> minimizing the predicted probability.

    The probability of a product projector with qubit Bloch vectors
    sqrt(2) x and sqrt(2) y is the bilinear form

        L(x, y) = 1/4 + (P_a . x + P_b . y)/sqrt(2) + y^T P_D x,

    on the spheres ||x||^2 = ||y||^2 = 1/2, where P is the 4x4 matrix with
    vec(P) = (1/2, theta_hat) column-major.  Alternating exact block updates
    descend monotonically; the descent start is augmented with random
    restarts because the objective is bilinear and multimodal.
    """
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if theta_hat.shape != (15,):
        raise ValueError("the product-projector search is two-qubit only")
    full = np.concatenate(([0.5], theta_hat))
    p_mat = full.reshape(4, 4, order="F")
    pa = np.ascontiguousarray(p_mat[0, 1:])
    pb = np.ascontiguousarray(p_mat[1:, 0])
    pd = np.ascontiguousarray(p_mat[1:, 1:])

    r = 1.0 / _SQ2
    starts = []
    fb1 = rng.normal(size=3)
    fb2 = rng.normal(size=3)
    starts.append((-r * _unit_or(pa, fb1), -r * _unit_or(pb, fb2)))
    for _ in range(restarts):
        starts.append(
            (r * _unit_or(rng.normal(size=3), fb1), r * _unit_or(rng.normal(size=3), fb2))
        )

    best = None
    total_iters = 0
    for x0, y0 in starts:
        x, y, l_val, iters, max_rise = minp_search_kernel(
            pa, pb, pd, np.ascontiguousarray(x0), np.ascontiguousarray(y0), tol, max_iter
        )
        total_iters += int(iters)
        assert max_rise <= 1e-12, (
            f"product-projector objective rose by {max_rise:.3e} during descent"
        )
        if best is None or l_val < best[2]:
            best = (x, y, l_val)
    x, y, l_val = best
    return MinProbResult(
        psi1=bloch_to_qubit_ket(_SQ2 * x),
        psi2=bloch_to_qubit_ket(_SQ2 * y),
        x=x,
        y=y,
        p_min=float(l_val),
        iterations=total_iters,
    )


def build_candidate_set(
    theta_hat: np.ndarray,
    mode: AdaptiveMode,
    basis: HermitianBasis,
    rng: np.random.Generator,
    cube: MeasurementCatalog | None = None,
) -> MeasurementCatalog:
    """Admissible settings for the next adaptive step.

    RAQST1: the 9 cube settings plus the completed POVM of the
    minimum-probability product projector.  RAQST2 additionally includes
    the eigenbasis POVM of the current physical estimate.  The estimate-
    dependent members are recomputed fresh at every step.
    """
    from .measurements import cube_settings

    cube = cube or cube_settings(basis)
    found = min_prob_product_projector(theta_hat, rng)
    extra = [complete_product_povm(found.psi1, found.psi2, basis, label="minp")]
    if mode is AdaptiveMode.RAQST2:
        physical = project_to_physical(bloch_to_matrix(theta_hat, basis))
        extra.append(eigenbasis_povm(physical, basis, label="eig"))
    return MeasurementCatalog(tuple(cube.settings) + tuple(extra))


def select_next_setting(
    q: np.ndarray,
    theta_hat: np.ndarray,
    candidates: MeasurementCatalog,
    n_per_step: int,
) -> SelectionDecision:
    """POVM containing the maximum-gain effect over the candidate set.

    Each one-dimensional effect is scored with the weight predicted from
    the current estimate, W = n2 / (p_c (1 - p_c)) with the predicted
    probability clamped away from {0, 1}.  Ties keep the first (catalog
    order) occurrence.
    """
    if len(candidates) == 0:
        raise ValueError("empty candidate set")
    best: SelectionDecision | None = None
    for povm in candidates:
        d = povm.dim
        for m in range(povm.n_outcomes):
            raw, _ = predicted_prob(theta_hat, float(povm.gamma0[m]), povm.gammas[m], d)
            clamped = min(max(raw, PRED_PROB_FLOOR), 1.0 - PRED_PROB_FLOOR)
            w_pred = n_per_step / (clamped * (1.0 - clamped))
            g = gain(q, povm.gammas[m], w_pred)
            if best is None or g > best.gain:
                best = SelectionDecision(
                    povm=povm,
                    label=povm.label,
                    gain=g,
                    p_tilde_raw=raw,
                    p_tilde_clamped=clamped,
                    effect_index=m,
                )
    return best


def resource_schedule(n_total: int, mode: AdaptiveMode) -> ResourceSchedule:
    """Empirical split of N into stage-1 copies and K adaptive steps.

    RAQST1: N1 = floor(N / (1.3 + 0.1 log10 N)),   K = floor(log10 N - 1)
    RAQST2: N1 = floor(N (0.8 - 0.01 log10 N)),    K = floor(1.5 log10 N - 2)

    N2 = floor((N - N1)/K); leftover copies go to stage 1.
    """
    if n_total < 100:
        raise ValueError(f"schedules require at least 100 copies, got {n_total}")
    logn = math.log10(n_total)
    if mode is AdaptiveMode.RAQST1:
        n1 = int(n_total / (1.3 + 0.1 * logn))
        k = int(math.floor(logn - 1.0))
    else:
        n1 = int(n_total * (0.8 - 0.01 * logn))
        k = int(math.floor(1.5 * logn - 2.0))
    if k <= 0:
        warnings.warn(
            f"schedule formula gives {k} adaptive steps at N={n_total}; using 1",
            stacklevel=2,
        )
        k = 1
    n2 = (n_total - n1) // k
    n1 += n_total - n1 - k * n2
    return ResourceSchedule(n_total=n_total, n_stage1=n1, k_steps=k, n_per_step=n2)
