"""Seeded Born-rule sampling, random state generation, and end-to-end
execution of the six tomography protocols with Monte Carlo aggregation.

Protocols:

* ``cube``: the 9 product settings, batch solve.
* ``mub``: the 5 mutually unbiased bases, batch solve.
* ``mub_half_half``: cube on half the copies, then the MUB rotated to
  diagonalize the preliminary estimate.
* ``known_basis``: like ``mub_half_half`` but rotated to the true state's
  eigenbasis; physically impossible, kept as a simulation-only yardstick.
* ``raqst1``/``raqst2``: cube stage followed by adaptively selected POVMs
  absorbed through recursive updates.

Trials are reproducible from (config, seed): every trial owns one
``numpy.random.Generator`` seeded as base_seed + trial index, and
aggregation sorts by trial index so worker scheduling cannot change
results.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adaptive import (
    AdaptiveMode,
    build_candidate_set,
    resource_schedule,
    select_next_setting,
)
from .core import (
    HermitianBasis,
    build_pauli_basis,
    infidelity,
    purity,
    validate_density_matrix,
)
from .estimator import absorb_all, batch_lre, current_estimate, records_from_counts
from .measurements import MeasurementCatalog, Povm, cube_settings, mub_settings, rotate_mub_to_basis

logger = logging.getLogger("raqst.adaptive")

_SQ2 = np.sqrt(2.0)


class ProtocolKind(enum.Enum):
    CUBE = "cube"
    MUB = "mub"
    MUB_HALF_HALF = "mub_half_half"
    KNOWN_BASIS = "known_basis"
    RAQST1 = "raqst1"
    RAQST2 = "raqst2"

    @classmethod
    def from_string(cls, name: str) -> "ProtocolKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown protocol {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class TrialConfig:
    protocol: ProtocolKind
    n_copies: int
    seed: int
    true_state: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_copies < 100:
            raise ValueError(f"n_copies must be >= 100, got {self.n_copies}")


@dataclass(frozen=True)
class TrialResult:
    infidelity: float
    estimate: np.ndarray = field(repr=False)
    settings_used: tuple
    copies_consumed: int


@dataclass(frozen=True)
class TrialRecord:
    """Slim per-trial record kept for aggregation and JSON-lines output."""

    protocol: str
    n_copies: int
    seed: int
    trial_index: int
    infidelity: float
    purity_true: float
    settings_used: tuple


def sample_counts(
    rho: np.ndarray, povm: Povm, n: int, rng: np.random.Generator
) -> np.ndarray:
    """One multinomial draw of size ``n`` over the Born probabilities."""
    if n < 1:
        raise ValueError("need at least one copy to sample")
    probs = np.einsum("mij,ji->m", povm.matrices, rho).real
    if probs.min() < -1e-12:
        raise ValueError(
            f"negative outcome probability {probs.min():.3e} for setting {povm.label!r}"
        )
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    return rng.multinomial(n, probs)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / _SQ2
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d)).conj()


def singlet_state() -> np.ndarray:
    """(|01> - |10>)/sqrt(2) as a density matrix."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0 / _SQ2
    v[2] = -1.0 / _SQ2
    return np.outer(v, v.conj())


def random_pure_state(rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: normalized complex Gaussian ket."""
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_mes(rng: np.random.Generator) -> np.ndarray:
    """Random maximally entangled state: local Haar unitaries on the singlet."""
    u = np.kron(haar_unitary(2, rng), haar_unitary(2, rng))
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0 / _SQ2
    v[2] = -1.0 / _SQ2
    w = u @ v
    return np.outer(w, w.conj())


def werner_state(p: float) -> np.ndarray:
    """p * singlet + (1 - p) * I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must be in [0, 1], got {p}")
    return p * singlet_state() + (1.0 - p) * np.eye(4) / 4.0


def werner_p_for_purity(target: float) -> float:
    """Invert purity Tr(rho^2) = (3 p^2 + 1)/4 of the Werner family."""
    if not 0.25 <= target <= 1.0:
        raise ValueError(f"Werner purities live in [0.25, 1], got {target}")
    return float(np.sqrt((4.0 * target - 1.0) / 3.0))


def split_evenly(total: int, parts: int) -> list[int]:
    """Split ``total`` copies as evenly as possible; first parts take the remainder."""
    if parts < 1:
        raise ValueError("parts must be at least 1")
    if total < parts:
        raise ValueError(f"cannot give each of {parts} parts at least one of {total}")
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _measure_catalog(rho, catalog: MeasurementCatalog, n: int, rng) -> tuple[list, int]:
    records = []
    used = 0
    for povm, n_i in zip(catalog, split_evenly(n, len(catalog))):
        if n_i == 0:
            continue
        counts = sample_counts(rho, povm, n_i, rng)
        records.extend(records_from_counts(povm, counts))
        used += n_i
    return records, used


def _run_static(cfg: TrialConfig, rng, catalog: MeasurementCatalog, basis) -> TrialResult:
    records, used = _measure_catalog(cfg.true_state, catalog, cfg.n_copies, rng)
    state = batch_lre(records, basis.dim)
    estimate = current_estimate(state, basis)
    return TrialResult(
        infidelity=infidelity(cfg.true_state, estimate),
        estimate=estimate,
        settings_used=tuple(p.label for p in catalog),
        copies_consumed=used,
    )


def _run_two_stage_mub(cfg: TrialConfig, rng, basis, oracle: bool) -> TrialResult:
    cube = cube_settings(basis)
    n1 = (cfg.n_copies + 1) // 2
    records, used = _measure_catalog(cfg.true_state, cube, n1, rng)
    state = batch_lre(records, basis.dim)
    target = cfg.true_state if oracle else current_estimate(state, basis)
    rotated = rotate_mub_to_basis(target, basis)
    stage2, used2 = _measure_catalog(cfg.true_state, rotated, cfg.n_copies - n1, rng)
    state = absorb_all(state, stage2, basis.dim)
    labels = tuple(p.label for p in cube) + tuple(p.label for p in rotated)
    assert used + used2 == cfg.n_copies, "copy accounting is broken"
    estimate = current_estimate(state, basis)
    return TrialResult(
        infidelity=infidelity(cfg.true_state, estimate),
        estimate=estimate,
        settings_used=labels,
        copies_consumed=used + used2,
    )


def _run_raqst(cfg: TrialConfig, rng, basis, mode: AdaptiveMode) -> TrialResult:
    cube = cube_settings(basis)
    sched = resource_schedule(cfg.n_copies, mode)
    records, used = _measure_catalog(cfg.true_state, cube, sched.n_stage1, rng)
    state = batch_lre(records, basis.dim)
    labels = [p.label for p in cube]
    for step in range(sched.k_steps):
        candidates = build_candidate_set(state.theta_hat, mode, basis, rng, cube=cube)
        decision = select_next_setting(state.q, state.theta_hat, candidates, sched.n_per_step)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(
                "step=%d of %d label=%s gain=%.6e p_tilde=%.6e",
                step + 1,
                sched.k_steps,
                decision.label,
                decision.gain,
                decision.p_tilde_raw,
            )
        counts = sample_counts(cfg.true_state, decision.povm, sched.n_per_step, rng)
        state = absorb_all(state, records_from_counts(decision.povm, counts), basis.dim)
        labels.append(decision.label)
        used += sched.n_per_step
    assert used == cfg.n_copies, "copy accounting is broken"
    estimate = current_estimate(state, basis)
    return TrialResult(
        infidelity=infidelity(cfg.true_state, estimate),
        estimate=estimate,
        settings_used=tuple(labels),
        copies_consumed=used,
    )


def _dispatch(cfg: TrialConfig, rng: np.random.Generator, basis: HermitianBasis) -> TrialResult:
    validate_density_matrix(cfg.true_state, name="true_state")
    if cfg.protocol is ProtocolKind.CUBE:
        return _run_static(cfg, rng, cube_settings(basis), basis)
    if cfg.protocol is ProtocolKind.MUB:
        return _run_static(cfg, rng, mub_settings(basis), basis)
    if cfg.protocol is ProtocolKind.MUB_HALF_HALF:
        return _run_two_stage_mub(cfg, rng, basis, oracle=False)
    if cfg.protocol is ProtocolKind.KNOWN_BASIS:
        return _run_two_stage_mub(cfg, rng, basis, oracle=True)
    if cfg.protocol is ProtocolKind.RAQST1:
        return _run_raqst(cfg, rng, basis, AdaptiveMode.RAQST1)
    if cfg.protocol is ProtocolKind.RAQST2:
        return _run_raqst(cfg, rng, basis, AdaptiveMode.RAQST2)
    raise ValueError(f"unhandled protocol {cfg.protocol}")


def run_protocol(cfg: TrialConfig, basis: HermitianBasis | None = None) -> TrialResult:
    """Execute one tomography trial from a fresh generator seeded by the config."""
    basis = basis or build_pauli_basis(2)
    return _dispatch(cfg, np.random.default_rng(cfg.seed), basis)


# --- Monte Carlo -----------------------------------------------------------

_FIXED_STATES = {
    "singlet": singlet_state,
}


def resolve_state(spec, rng: np.random.Generator) -> np.ndarray:
    """Materialize a state spec: named state, Werner(p), or a random draw.

    Random kinds consume the trial generator first, so two protocols run
    with the same seed see the same true state (paired comparisons).
    """
    if isinstance(spec, np.ndarray):
        return spec
    if isinstance(spec, tuple) and spec and spec[0] == "werner":
        return werner_state(float(spec[1]))
    if spec in _FIXED_STATES:
        return _FIXED_STATES[spec]()
    if spec == "random_pure":
        return random_pure_state(rng)
    if spec == "random_mes":
        return random_mes(rng)
    raise ValueError(f"unknown state spec {spec!r}")


def _trial_worker(args) -> TrialRecord:
    protocol_name, n, seed, trial_index, spec = args
    rng = np.random.default_rng(seed)
    rho = resolve_state(spec, rng)
    cfg = TrialConfig(
        protocol=ProtocolKind.from_string(protocol_name),
        n_copies=n,
        seed=seed,
        true_state=rho,
    )
    result = _dispatch(cfg, rng, build_pauli_basis(2))
    return TrialRecord(
        protocol=protocol_name,
        n_copies=n,
        seed=seed,
        trial_index=trial_index,
        infidelity=result.infidelity,
        purity_true=purity(rho),
        settings_used=result.settings_used,
    )


def monte_carlo(
    protocol: ProtocolKind | str,
    state_spec,
    n_list: list[int],
    reps: int,
    base_seed: int,
    *,
    workers: int = 1,
) -> list[TrialRecord]:
    """Run ``reps`` trials per N and return per-trial records.

    Seeds are base_seed + trial index, where the index enumerates (N, rep)
    pairs; they do not depend on the protocol, so runs over the same grid
    pair up across protocols.  Records come back sorted by trial index
    regardless of the worker count.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    name = protocol.value if isinstance(protocol, ProtocolKind) else str(protocol)
    ProtocolKind.from_string(name)
    jobs = []
    idx = 0
    for n in n_list:
        for _ in range(reps):
            jobs.append((name, int(n), base_seed + idx, idx, state_spec))
            idx += 1
    if workers <= 1:
        results = [_trial_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_worker, jobs, chunksize=8))
    results.sort(key=lambda r: r.trial_index)
    return results
