"""Aggregation of trial records into publication-style tables.

Output contracts:

* sweep CSV: header ``protocol,n_copies,reps,mean_infidelity,sd_of_mean,
  purity_true,gm_bound``, rows sorted by (protocol, n_copies), floats
  rendered with ``%.17g`` so round-tripping is exact, ``\\n`` line endings.
* trial JSON lines: one object per trial with keys ``protocol``, ``seed``,
  ``n``, ``infidelity``, ``settings_used``.
* improvement CSV: per-state paired comparison of a baseline and an
  adaptive protocol on the log-infidelity scale.

All writers go through a temp file in the destination directory followed
by an atomic rename, so readers never observe partial files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .simulator import TrialRecord

SWEEP_HEADER = (
    "protocol",
    "n_copies",
    "reps",
    "mean_infidelity",
    "sd_of_mean",
    "purity_true",
    "gm_bound",
)

UPSILON_HEADER = (
    "ensemble",
    "state_index",
    "n_copies",
    "reps",
    "c_log10",
    "a_log10",
    "g_log10",
    "upsilon",
)


def gill_massar_bound(dim: int, n: int) -> float:
    """Best mean infidelity reachable with separable measurements on n copies."""
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    if n < 1:
        raise ValueError(f"copy count must be >= 1, got {n}")
    return 0.25 * (dim + 1) ** 2 * (dim - 1) / n


def improvement_index(c_mean: float, a_mean: float, g_bound: float) -> float:
    """(C - A) / (C - G) on the log10 scale.

    C is the baseline's mean infidelity, A the adaptive protocol's, G the
    separable-measurement bound.  1 means the adaptive run closed the whole
    gap from baseline to bound; 0 means no progress; negative means it did
    worse than the baseline.
    """
    for name, value in (("c_mean", c_mean), ("a_mean", a_mean), ("g_bound", g_bound)):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive to take log10, got {value}")
    c, a, g = math.log10(c_mean), math.log10(a_mean), math.log10(g_bound)
    if c == g:
        raise ValueError("baseline sits exactly on the bound; index undefined")
    return (c - a) / (c - g)


@dataclass(frozen=True)
class SweepRow:
    protocol: str
    n_copies: int
    reps: int
    mean_infidelity: float
    sd_of_mean: float
    purity_true: float
    gm_bound: float


@dataclass(frozen=True)
class UpsilonRow:
    ensemble: str
    state_index: int
    n_copies: int
    reps: int
    c_log10: float
    a_log10: float
    g_log10: float
    upsilon: float


def aggregate(records: Sequence[TrialRecord], dim: int = 4) -> list[SweepRow]:
    """Group per-trial records by (protocol, n_copies) into sweep rows."""
    groups: dict[tuple[str, int], list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault((rec.protocol, rec.n_copies), []).append(rec)
    rows = []
    for (protocol, n), recs in sorted(groups.items()):
        recs = sorted(recs, key=lambda r: r.trial_index)
        infids = np.array([r.infidelity for r in recs])
        reps = len(recs)
        sd_of_mean = float(infids.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
        rows.append(
            SweepRow(
                protocol=protocol,
                n_copies=n,
                reps=reps,
                mean_infidelity=float(infids.mean()),
                sd_of_mean=sd_of_mean,
                purity_true=float(np.mean([r.purity_true for r in recs])),
                gm_bound=gill_massar_bound(dim, n),
            )
        )
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(rows: Iterable[SweepRow], path) -> None:
    """Write sweep rows as CSV, sorted by (protocol, n_copies)."""
    ordered = sorted(rows, key=lambda r: (r.protocol, r.n_copies))
    lines = [",".join(SWEEP_HEADER)]
    for r in ordered:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.protocol,
                    r.n_copies,
                    r.reps,
                    r.mean_infidelity,
                    r.sd_of_mean,
                    r.purity_true,
                    r.gm_bound,
                )
            )
        )
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_trial_records(records: Iterable[TrialRecord], path) -> None:
    """Write per-trial JSON lines for auditability."""
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "protocol": rec.protocol,
                    "seed": rec.seed,
                    "n": rec.n_copies,
                    "infidelity": rec.infidelity,
                    "settings_used": list(rec.settings_used),
                },
                separators=(",", ":"),
            )
        )
    _atomic_write_text(Path(path), "\n".join(lines) + ("\n" if lines else ""))


def upsilon_row(
    ensemble: str,
    state_index: int,
    n_copies: int,
    baseline: Sequence[TrialRecord],
    adaptive: Sequence[TrialRecord],
    dim: int = 4,
) -> UpsilonRow:
    """Paired per-state improvement row from matching baseline/adaptive runs."""
    if len(baseline) != len(adaptive) or not baseline:
        raise ValueError("baseline and adaptive runs must pair up one-to-one")
    mismatched = [
        (b.seed, a.seed) for b, a in zip(baseline, adaptive) if b.seed != a.seed
    ]
    if mismatched:
        raise ValueError(f"unpaired seeds in improvement comparison: {mismatched[:3]}")
    c_mean = float(np.mean([r.infidelity for r in baseline]))
    a_mean = float(np.mean([r.infidelity for r in adaptive]))
    g_bound = gill_massar_bound(dim, n_copies)
    return UpsilonRow(
        ensemble=ensemble,
        state_index=state_index,
        n_copies=n_copies,
        reps=len(baseline),
        c_log10=math.log10(c_mean),
        a_log10=math.log10(a_mean),
        g_log10=math.log10(g_bound),
        upsilon=improvement_index(c_mean, a_mean, g_bound),
    )


def write_upsilon(rows: Iterable[UpsilonRow], path) -> None:
    """Write per-state improvement rows as CSV."""
    ordered = sorted(rows, key=lambda r: (r.ensemble, r.state_index, r.n_copies))
    lines = [",".join(UPSILON_HEADER)]
    for r in ordered:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.ensemble,
                    r.state_index,
                    r.n_copies,
                    r.reps,
                    r.c_log10,
                    r.a_log10,
                    r.g_log10,
                    r.upsilon,
                )
            )
        )
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")
