import json
import math
import os

import numpy as np
import pytest

from raqst.reporting import (
    SWEEP_HEADER,
    UPSILON_HEADER,
    SweepRow,
    aggregate,
    gill_massar_bound,
    improvement_index,
    upsilon_row,
    write_results,
    write_trial_records,
    write_upsilon,
)
from raqst.simulator import TrialRecord


def record(protocol="cube", n=1000, seed=0, idx=0, infid=1e-3, purity=1.0):
    return TrialRecord(
        protocol=protocol,
        n_copies=n,
        seed=seed,
        trial_index=idx,
        infidelity=infid,
        purity_true=purity,
        settings_used=("XX", "YY"),
    )


class TestGillMassar:
    def test_two_qubit_value(self):
        # 0.25 (d+1)^2 (d-1) / n at d=4 is 75/(4n)
        assert gill_massar_bound(4, 10_000) == pytest.approx(75 / 40_000)
        assert gill_massar_bound(4, 100) == pytest.approx(0.1875)

    def test_qubit_value(self):
        assert gill_massar_bound(2, 100) == pytest.approx(0.25 * 9 / 100)

    def test_invalid(self):
        with pytest.raises(ValueError):
            gill_massar_bound(4, 0)
        with pytest.raises(ValueError):
            gill_massar_bound(1, 100)


class TestImprovementIndex:
    def test_hand_value(self):
        # C = 1e-2, A = 1e-3, G = 1e-4: (-2 + 3) / (-2 + 4) = 0.5
        assert improvement_index(1e-2, 1e-3, 1e-4) == pytest.approx(0.5)

    def test_adaptive_equal_to_baseline_is_zero(self):
        assert improvement_index(1e-2, 1e-2, 1e-4) == 0.0

    def test_adaptive_at_bound_is_one(self):
        assert improvement_index(1e-2, 1e-4, 1e-4) == pytest.approx(1.0)

    def test_worse_than_baseline_is_negative(self):
        assert improvement_index(1e-3, 1e-2, 1e-4) < 0

    def test_degenerate_or_invalid(self):
        with pytest.raises(ValueError):
            improvement_index(1e-4, 1e-3, 1e-4)  # C == G: denominator vanishes
        with pytest.raises(ValueError):
            improvement_index(0.0, 1e-3, 1e-4)
        with pytest.raises(ValueError):
            improvement_index(1e-2, -1e-3, 1e-4)


class TestAggregate:
    def test_groups_and_stats(self):
        recs = [
            record(n=100, idx=0, infid=0.010),
            record(n=100, idx=1, infid=0.030),
            record(n=200, idx=2, infid=0.004),
            record(protocol="mub", n=100, idx=0, infid=0.020),
        ]
        rows = aggregate(recs)
        assert [(r.protocol, r.n_copies) for r in rows] == [
            ("cube", 100),
            ("cube", 200),
            ("mub", 100),
        ]
        first = rows[0]
        assert first.reps == 2
        assert first.mean_infidelity == pytest.approx(0.020)
        expected_sd = np.std([0.010, 0.030], ddof=1) / math.sqrt(2)
        assert first.sd_of_mean == pytest.approx(expected_sd)
        assert first.gm_bound == pytest.approx(0.1875)

    def test_single_rep_has_zero_sd(self):
        rows = aggregate([record()])
        assert rows[0].sd_of_mean == 0.0


class TestWriteResults:
    def test_csv_format_and_roundtrip(self, tmp_path):
        rows = aggregate(
            [
                record(protocol="mub", n=100, idx=0, infid=1 / 3),
                record(protocol="cube", n=100, idx=0, infid=0.02),
                record(protocol="cube", n=100, idx=1, infid=0.04),
            ]
        )
        out = tmp_path / "results.csv"
        write_results(rows, out)
        text = out.read_text()
        lines = text.split("\n")
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert text.endswith("\n")
        assert len(lines) == 4  # header + 2 rows + trailing newline
        # rows sorted by (protocol, n_copies); floats survive a round-trip
        cube = lines[1].split(",")
        mub = lines[2].split(",")
        assert cube[0] == "cube" and mub[0] == "mub"
        assert float(cube[3]) == 0.03
        assert float(mub[3]) == 1 / 3  # %.17g keeps full precision
        assert cube[1] == "100" and cube[2] == "2"

    def test_write_is_atomic(self, tmp_path):
        out = tmp_path / "results.csv"
        write_results(aggregate([record()]), out)
        write_results(aggregate([record(infid=0.5)]), out)  # overwrite in place
        assert "0.5" in out.read_text()
        leftovers = [p for p in os.listdir(tmp_path) if p != "results.csv"]
        assert leftovers == []

    def test_parent_dir_created(self, tmp_path):
        out = tmp_path / "deep" / "results.csv"
        write_results(aggregate([record()]), out)
        assert out.exists()


class TestWriteTrialRecords:
    def test_jsonl_schema(self, tmp_path):
        out = tmp_path / "trials.jsonl"
        write_trial_records([record(seed=3, infid=0.125), record(idx=1)], out)
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        row = json.loads(lines[0])
        assert row == {
            "protocol": "cube",
            "seed": 3,
            "n": 1000,
            "infidelity": 0.125,
            "settings_used": ["XX", "YY"],
        }


class TestUpsilon:
    def make_pair(self, c_infid, a_infid, reps=3, n=10_000):
        base = [record("mub", n, seed=s, idx=s, infid=c_infid) for s in range(reps)]
        adapt = [record("raqst2", n, seed=s, idx=s, infid=a_infid) for s in range(reps)]
        return base, adapt

    def test_row_values(self):
        base, adapt = self.make_pair(1e-2, 1e-3)
        row = upsilon_row("mes", 7, 10_000, base, adapt)
        g = 75 / 40_000
        assert row.c_log10 == pytest.approx(-2)
        assert row.a_log10 == pytest.approx(-3)
        assert row.g_log10 == pytest.approx(math.log10(g))
        assert row.upsilon == pytest.approx((-2 + 3) / (-2 - math.log10(g)))
        assert (row.ensemble, row.state_index, row.reps) == ("mes", 7, 3)

    def test_unpaired_seeds_rejected(self):
        base, adapt = self.make_pair(1e-2, 1e-3)
        adapt[1] = record("raqst2", 10_000, seed=99, idx=1, infid=1e-3)
        with pytest.raises(ValueError, match="seed"):
            upsilon_row("mes", 0, 10_000, base, adapt)

    def test_length_mismatch_rejected(self):
        base, adapt = self.make_pair(1e-2, 1e-3)
        with pytest.raises(ValueError):
            upsilon_row("mes", 0, 10_000, base, adapt[:-1])
        with pytest.raises(ValueError):
            upsilon_row("mes", 0, 10_000, [], [])

    def test_write_upsilon_sorted(self, tmp_path):
        base, adapt = self.make_pair(1e-2, 1e-3)
        rows = [
            upsilon_row("pure", 1, 10_000, base, adapt),
            upsilon_row("mes", 0, 10_000, base, adapt),
            upsilon_row("mes", 1, 10_000, base, adapt),
        ]
        out = tmp_path / "upsilon.csv"
        write_upsilon(rows, out)
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(UPSILON_HEADER)
        firsts = [ln.split(",")[:2] for ln in lines[1:]]
        assert firsts == [["mes", "0"], ["mes", "1"], ["pure", "1"]]
