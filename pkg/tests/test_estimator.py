import numpy as np
import pytest

from raqst.core import state_to_bloch, validate_density_matrix
from raqst.estimator import (
    EstimatorState,
    RegressionRecord,
    absorb_all,
    batch_lre,
    compute_weight,
    current_estimate,
    fresh_state,
    records_from_counts,
    recursive_update,
)
from raqst.measurements import cube_settings, mub_settings

from conftest import random_density_matrix


def exact_records(rho, catalog, n=1000):
    """Noise-free records: p_hat set to the exact Born probability."""
    records = []
    for povm in catalog:
        probs = np.einsum("mij,ji->m", povm.matrices, rho).real
        for m in range(len(probs)):
            records.append(
                RegressionRecord(
                    gamma0=povm.gamma0[m],
                    gamma=povm.gammas[m],
                    p_hat=float(probs[m]),
                    n_trials=n,
                    weight=n / max(probs[m] * (1 - probs[m]), 1e-9),
                )
            )
    return records


def random_records(rng, length, n_params=15, n=1000):
    records = []
    for _ in range(length):
        gamma = rng.normal(size=n_params) * 0.25
        p_hat = rng.uniform(0.01, 0.99)
        records.append(
            RegressionRecord(
                gamma0=rng.uniform(0.5, 1.5),
                gamma=gamma,
                p_hat=p_hat,
                n_trials=n,
                weight=n / (p_hat * (1 - p_hat)),
            )
        )
    return records


class TestWeights:
    def test_interior_frequency(self):
        assert np.isclose(compute_weight(100, 50), 100 / 0.25)

    def test_zero_count_clamped(self):
        # p clamped to 1/(2n) so the weight stays finite
        w = compute_weight(100, 0)
        p = 1 / 200
        assert np.isclose(w, 100 / (p * (1 - p)))

    def test_full_count_clamped(self):
        assert np.isclose(compute_weight(100, 100), compute_weight(100, 0))

    def test_invalid_counts_rejected(self):
        with pytest.raises(ValueError):
            compute_weight(0, 0)
        with pytest.raises(ValueError):
            compute_weight(10, 11)
        with pytest.raises(ValueError):
            compute_weight(10, -1)


class TestRecordsFromCounts:
    def test_frequencies_and_weights(self, basis):
        povm = next(iter(cube_settings(basis)))
        counts = np.array([10, 20, 30, 40])
        recs = records_from_counts(povm, counts)
        assert len(recs) == 4
        for m, rec in enumerate(recs):
            assert np.isclose(rec.p_hat, counts[m] / 100)
            assert rec.n_trials == 100
            assert np.isclose(rec.weight, compute_weight(100, counts[m]))
            assert np.isclose(rec.gamma0, povm.gamma0[m])

    def test_count_length_mismatch(self, basis):
        povm = next(iter(cube_settings(basis)))
        with pytest.raises(ValueError):
            records_from_counts(povm, np.array([1, 2, 3]))


class TestBatch:
    def test_exact_probabilities_recover_state(self, basis, rng):
        rho = random_density_matrix(rng)
        recs = exact_records(rho, cube_settings(basis))
        state = batch_lre(recs, 4)
        theta = state_to_bloch(rho, basis)
        assert np.abs(state.theta_hat - theta).max() < 1e-6  # ridge-limited

    def test_rank_deficient_without_ridge(self, basis, rng):
        rho = random_density_matrix(rng)
        # a single setting measures only 3 of 15 directions
        recs = exact_records(rho, list(cube_settings(basis))[:1])
        with pytest.raises(np.linalg.LinAlgError, match="rank"):
            batch_lre(recs, 4, ridge=0.0)

    def test_complete_set_without_ridge(self, basis, rng):
        rho = random_density_matrix(rng)
        recs = exact_records(rho, mub_settings(basis))
        state = batch_lre(recs, 4, ridge=0.0)
        theta = state_to_bloch(rho, basis)
        assert np.abs(state.theta_hat - theta).max() < 1e-10

    def test_empty_records_rejected(self):
        with pytest.raises(ValueError):
            batch_lre([], 4)

    def test_q_symmetric_positive(self, basis, rng):
        recs = exact_records(random_density_matrix(rng), cube_settings(basis))
        state = batch_lre(recs, 4)
        assert np.abs(state.q - state.q.T).max() < 1e-14
        assert np.linalg.eigvalsh(state.q).min() > 0


class TestRecursive:
    def test_hand_example_single_qubit(self):
        # Q0 = I3, Theta0 = 0; absorb (gamma0=1, Gamma=(0,0,1/sqrt2), p=1, W=4)
        # for a qubit (d=2): a = 1/(1/4 + 1/2) = 4/3, resid = 1 - 1/2,
        # Theta1 = (4/3)(1/2)(0,0,1/sqrt2) = (0, 0, sqrt2/3).
        state = EstimatorState(
            theta_hat=np.zeros(3), q=np.eye(3), records_absorbed=0
        )
        rec = RegressionRecord(
            gamma0=1.0,
            gamma=np.array([0.0, 0.0, 1.0 / np.sqrt(2)]),
            p_hat=1.0,
            n_trials=1,
            weight=4.0,
        )
        out = recursive_update(state, rec, dim=2)
        assert np.allclose(out.theta_hat, [0.0, 0.0, np.sqrt(2) / 3], atol=1e-14)
        assert out.records_absorbed == 1

    def test_recursive_equals_batch(self, rng):
        # float64 head-room needs a ridge well above machine epsilon; both
        # sides use the same ridge so they solve the same problem.
        ridge = 1e-2
        for _ in range(10):
            recs = random_records(rng, int(rng.integers(10, 200)))
            batch = batch_lre(recs, 4, ridge=ridge)
            rec_state = absorb_all(fresh_state(15, ridge=ridge), recs, 4)
            assert np.abs(batch.theta_hat - rec_state.theta_hat).max() < 1e-9
            assert np.abs(batch.q - rec_state.q).max() < 1e-9

    def test_order_independence_of_solution(self, rng):
        ridge = 1e-2
        recs = random_records(rng, 60)
        fwd = absorb_all(fresh_state(15, ridge=ridge), recs, 4)
        rev = absorb_all(fresh_state(15, ridge=ridge), recs[::-1], 4)
        assert np.abs(fwd.theta_hat - rev.theta_hat).max() < 1e-9

    def test_q_stays_symmetric(self, rng):
        state = fresh_state(15, ridge=1e-2)
        for rec in random_records(rng, 50):
            state = recursive_update(state, rec, 4)
            assert np.abs(state.q - state.q.T).max() == 0.0

    def test_huge_weight_stability(self, basis, rng):
        # deterministic outcomes produce weights ~2 n^2; updates must stay finite
        state = fresh_state(15, ridge=1e-8)
        povm = next(iter(cube_settings(basis)))
        counts = np.array([1000, 0, 0, 0])
        state = absorb_all(state, records_from_counts(povm, counts), 4)
        assert np.isfinite(state.theta_hat).all()
        assert np.isfinite(state.q).all()

    def test_immutable_inputs(self, rng):
        state = fresh_state(15, ridge=1e-2)
        recs = random_records(rng, 5)
        theta_before = state.theta_hat.copy()
        recursive_update(state, recs[0], 4)
        assert np.array_equal(state.theta_hat, theta_before)


class TestEstimate:
    def test_current_estimate_is_physical(self, basis, rng):
        from raqst.measurements import cube_settings
        from raqst.simulator import sample_counts, singlet_state

        state = fresh_state(15, ridge=1e-8)
        recs = []
        for povm in cube_settings(basis):
            counts = sample_counts(singlet_state(), povm, 200, rng)
            recs.extend(records_from_counts(povm, counts))
        est = current_estimate(batch_lre(recs, 4), basis)
        validate_density_matrix(est)
