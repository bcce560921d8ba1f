import numpy as np
import pytest
from scipy import stats

from raqst.core import build_pauli_basis, fidelity, purity, validate_density_matrix
from raqst.measurements import cube_settings, mub_settings
from raqst.simulator import (
    ProtocolKind,
    TrialConfig,
    haar_unitary,
    monte_carlo,
    random_mes,
    random_pure_state,
    resolve_state,
    run_protocol,
    sample_counts,
    singlet_state,
    split_evenly,
    werner_p_for_purity,
    werner_state,
)


class TestSampling:
    def test_counts_follow_born_rule(self, basis, rng):
        # full-rank state so every outcome has sizable probability
        rho = werner_state(0.6)
        for povm in cube_settings(basis):
            counts = sample_counts(rho, povm, 100_000, rng)
            probs = np.array(
                [np.trace(e @ rho).real for e in povm.matrices]
            )
            assert counts.sum() == 100_000
            res = stats.chisquare(counts, probs * 100_000)
            assert res.pvalue > 1e-4, povm.label

    def test_zero_probability_outcomes_untouched(self, basis, rng):
        rho = singlet_state()
        povm = {p.label: p for p in cube_settings(basis)}["XX"]
        probs = np.array([np.trace(e @ rho).real for e in povm.matrices])
        counts = sample_counts(rho, povm, 50_000, rng)
        assert np.all(counts[probs < 1e-12] == 0)

    def test_negative_probability_rejected(self, basis, rng):
        bad = singlet_state() - 0.01 * np.eye(4)  # trace < 1, eigenvalue < 0
        bad = bad / np.trace(bad).real
        povm = {p.label: p for p in cube_settings(basis)}["ZZ"]
        with pytest.raises(ValueError):
            sample_counts(bad, povm, 100, rng)


class TestStates:
    def test_haar_unitary(self, rng):
        for dim in (2, 4):
            u = haar_unitary(dim, rng)
            assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)

    def test_singlet(self):
        rho = singlet_state()
        validate_density_matrix(rho)
        assert np.isclose(purity(rho), 1.0)
        ket = np.array([0, 1, -1, 0]) / np.sqrt(2)
        assert np.isclose((ket @ rho @ ket).real, 1.0)

    def test_random_pure(self, rng):
        for _ in range(10):
            rho = random_pure_state(rng)
            validate_density_matrix(rho)
            assert np.isclose(purity(rho), 1.0, atol=1e-12)

    def test_random_mes_reduced_states_maximally_mixed(self, rng):
        for _ in range(20):
            rho = random_mes(rng)
            validate_density_matrix(rho)
            assert np.isclose(purity(rho), 1.0, atol=1e-12)
            r4 = rho.reshape(2, 2, 2, 2)
            red_a = np.einsum("ikjk->ij", r4)
            red_b = np.einsum("kikj->ij", r4)
            assert np.abs(red_a - np.eye(2) / 2).max() < 1e-12
            assert np.abs(red_b - np.eye(2) / 2).max() < 1e-12

    def test_werner_state(self):
        assert np.allclose(werner_state(1.0), singlet_state())
        assert np.allclose(werner_state(0.0), np.eye(4) / 4)
        rho = werner_state(0.997)
        assert np.isclose(purity(rho), 0.99550675, atol=1e-8)
        with pytest.raises(ValueError):
            werner_state(1.2)
        with pytest.raises(ValueError):
            werner_state(-0.4)  # below the separable-ball edge used here

    def test_werner_p_for_purity_inverse(self):
        for u in (0.25, 0.3, 0.5, 0.9, 0.95, 1.0):
            p = werner_p_for_purity(u)
            assert np.isclose(purity(werner_state(p)), u, atol=1e-12)
        with pytest.raises(ValueError):
            werner_p_for_purity(0.2)
        with pytest.raises(ValueError):
            werner_p_for_purity(1.01)


class TestSplitEvenly:
    def test_exact_division(self):
        assert split_evenly(900, 9) == [100] * 9

    def test_remainder_goes_to_first_parts(self):
        parts = split_evenly(11, 3)
        assert parts == [4, 4, 3]
        assert sum(parts) == 11

    def test_invalid(self):
        with pytest.raises(ValueError):
            split_evenly(5, 0)
        with pytest.raises(ValueError):
            split_evenly(2, 5)


class TestProtocols:
    def run(self, protocol, n=1000, seed=7, state=None):
        cfg = TrialConfig(
            protocol=ProtocolKind.from_string(protocol),
            n_copies=n,
            seed=seed,
            true_state=singlet_state() if state is None else state,
        )
        return run_protocol(cfg)

    def test_from_string(self):
        assert ProtocolKind.from_string("raqst2") is ProtocolKind.RAQST2
        with pytest.raises(ValueError):
            ProtocolKind.from_string("sic")

    def test_small_budget_rejected(self):
        with pytest.raises(ValueError):
            TrialConfig(
                protocol=ProtocolKind.CUBE,
                n_copies=99,
                seed=0,
                true_state=singlet_state(),
            )

    def test_cube_settings_logged(self, basis):
        res = self.run("cube")
        assert res.settings_used == tuple(p.label for p in cube_settings(basis))
        assert res.copies_consumed == 1000

    def test_mub_settings_logged(self, basis):
        res = self.run("mub")
        assert res.settings_used == tuple(p.label for p in mub_settings(basis))
        assert res.copies_consumed == 1000

    def test_two_stage_mub_settings_logged(self):
        res = self.run("mub_half_half", n=1001)
        assert len(res.settings_used) == 14
        assert all(s.endswith("@rot") for s in res.settings_used[9:])
        assert res.copies_consumed == 1001

    def test_known_basis_settings_logged(self):
        res = self.run("known_basis")
        assert len(res.settings_used) == 14
        assert res.copies_consumed == 1000

    def test_raqst_budget_and_settings(self):
        # schedule at N=1e4: RAQST1 has 3 steps, RAQST2 has 4
        res1 = self.run("raqst1", n=10_000)
        res2 = self.run("raqst2", n=10_000)
        assert len(res1.settings_used) == 12
        assert len(res2.settings_used) == 13
        assert res1.copies_consumed == 10_000
        assert res2.copies_consumed == 10_000

    def test_estimate_is_physical(self):
        for protocol in ("cube", "mub", "raqst1", "raqst2"):
            res = self.run(protocol, n=500 if protocol.startswith(("c", "m")) else 1000)
            validate_density_matrix(res.estimate)
            f = fidelity(res.estimate, singlet_state())
            assert np.isclose(res.infidelity, 1 - f, atol=1e-12)

    def test_deterministic_given_seed(self):
        a = self.run("raqst2", n=2000, seed=11)
        b = self.run("raqst2", n=2000, seed=11)
        c = self.run("raqst2", n=2000, seed=12)
        assert a.infidelity == b.infidelity
        assert a.settings_used == b.settings_used
        assert np.array_equal(a.estimate, b.estimate)
        assert a.infidelity != c.infidelity


class TestResolveState:
    def test_named_specs(self, rng):
        assert np.allclose(resolve_state("singlet", rng), singlet_state())
        rho = resolve_state(("werner", 0.6), rng)
        assert np.allclose(rho, werner_state(0.6))
        for spec in ("random_pure", "random_mes"):
            validate_density_matrix(resolve_state(spec, rng))

    def test_array_passthrough(self, rng):
        rho = werner_state(0.3)
        assert resolve_state(rho, rng) is rho

    def test_unknown_rejected(self, rng):
        with pytest.raises(ValueError):
            resolve_state("ghz", rng)

    def test_random_spec_consumes_rng_first_for_pairing(self):
        # two protocols given the same seed must face the same drawn state
        draws = []
        for protocol in (ProtocolKind.CUBE, ProtocolKind.MUB):
            rng = np.random.default_rng(123)
            draws.append(resolve_state("random_mes", rng))
        assert np.array_equal(draws[0], draws[1])


class TestMonteCarlo:
    def test_records_sorted_and_seeded_by_trial_index(self):
        recs = monte_carlo("cube", "singlet", [100, 200], 3, base_seed=50)
        assert [r.trial_index for r in recs] == list(range(6))
        assert [r.seed for r in recs] == [50 + i for i in range(6)]
        assert [r.n_copies for r in recs] == [100, 100, 100, 200, 200, 200]
        assert all(r.protocol == "cube" for r in recs)

    def test_seed_pairing_across_protocols(self):
        a = monte_carlo("cube", "singlet", [300], 4, base_seed=9)
        b = monte_carlo("mub", "singlet", [300], 4, base_seed=9)
        assert [r.seed for r in a] == [r.seed for r in b]

    def test_workers_do_not_change_results(self):
        serial = monte_carlo("raqst1", "singlet", [150, 300], 3, base_seed=5)
        parallel = monte_carlo(
            "raqst1", "singlet", [150, 300], 3, base_seed=5, workers=2
        )
        assert [(r.trial_index, r.infidelity, r.settings_used) for r in serial] == [
            (r.trial_index, r.infidelity, r.settings_used) for r in parallel
        ]

    def test_purity_recorded(self):
        recs = monte_carlo("cube", ("werner", 0.6), [100], 2, base_seed=1)
        u = purity(werner_state(0.6))
        assert all(np.isclose(r.purity_true, u, atol=1e-12) for r in recs)


class TestMaximallyMixedBaseline:
    def test_cube_on_identity_is_accurate(self):
        # static cube on the maximally mixed state: a large budget must give
        # a small mean infidelity (all outcome probabilities equal 1/4)
        recs = monte_carlo(
            "cube", np.eye(4) / 4, [90_000], 20, base_seed=2026
        )
        mean_infid = float(np.mean([r.infidelity for r in recs]))
        assert mean_infid < 5e-3
