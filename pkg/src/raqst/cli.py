"""Command-line orchestration: config parsing, subcommands, output layout.

Subcommands map to experiments:

* ``run``          -> ``single``        one protocol set, one N list, one state
* ``sweep-n``      -> ``sweep_n``       infidelity-vs-N study
* ``sweep-purity`` -> ``sweep_purity``  Werner-family study over a purity grid
* ``histogram``    -> ``histogram``     per-state improvement index over random
                                        state ensembles (baseline vs adaptive)

Configuration comes from an optional ``key=value`` file (``#`` comments,
unknown keys rejected with line context) plus flag overrides; flags win.
Every run writes a ``manifest.json`` (config echo, seed, library versions,
backend selection) sufficient to reproduce it exactly.

Exit codes: 0 success, 1 config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .backend import USE_NUMBA
from .reporting import (
    _atomic_write_text,
    aggregate,
    upsilon_row,
    write_results,
    write_trial_records,
    write_upsilon,
)
from .simulator import (
    ProtocolKind,
    monte_carlo,
    random_mes,
    random_pure_state,
    werner_p_for_purity,
)

import numpy as np


class ConfigError(Exception):
    """Invalid configuration; exit code 1."""


EXPERIMENTS = ("single", "sweep_n", "sweep_purity", "histogram")

DEFAULT_N_SWEEP = (316, 1000, 3162, 10000, 31623)  # 10^2.5 .. 10^4.5
DEFAULT_PURITY_GRID = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98)
DEFAULT_N_STATES = 20

_DEFAULT_PROTOCOLS = {
    "single": ("cube",),
    "sweep_n": ("cube", "mub", "mub_half_half", "known_basis", "raqst1", "raqst2"),
    "sweep_purity": ("mub", "raqst1"),
    "histogram": ("cube", "raqst2"),
}
_DEFAULT_N_LIST = {
    "single": (1000,),
    "sweep_n": DEFAULT_N_SWEEP,
    "sweep_purity": (10000,),
    "histogram": (10000,),
}

# Seed stride between states in the histogram experiment; per-rep trial
# seeds are base + stride*state + rep, so reps must stay below the stride.
_STATE_SEED_STRIDE = 10**6

_CONFIG_KEYS = {
    "experiment",
    "protocol",
    "protocols",
    "n",
    "n_list",
    "reps",
    "state",
    "seed",
    "out",
    "workers",
    "purity_list",
    "n_states",
}

_NAMED_STATES = ("singlet", "random_pure", "random_mes")


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    protocols: tuple[str, ...]
    n_list: tuple[int, ...]
    reps: int
    state_spec: str | None
    seed: int
    out_dir: Path
    workers: int
    purity_list: tuple[float, ...] = DEFAULT_PURITY_GRID
    n_states: int = DEFAULT_N_STATES

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.n_list:
            raise ConfigError("n_list must be non-empty")
        if any(n < 100 for n in self.n_list):
            raise ConfigError("every n in n_list must be >= 100")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.protocols:
            raise ConfigError("protocols must be non-empty")
        for p in self.protocols:
            try:
                ProtocolKind.from_string(p)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.experiment == "histogram" and len(self.protocols) != 2:
            raise ConfigError(
                "histogram needs exactly two protocols: baseline,adaptive"
            )
        if self.experiment == "histogram" and len(self.n_list) != 1:
            raise ConfigError("histogram uses a single N; give one n_list entry")
        if self.experiment == "histogram" and self.reps >= _STATE_SEED_STRIDE:
            raise ConfigError(f"histogram reps must be < {_STATE_SEED_STRIDE}")
        if not 1 <= self.n_states <= 1000:
            raise ConfigError(f"n_states must be in [1, 1000], got {self.n_states}")
        for u in self.purity_list:
            if not 0.25 <= u <= 1.0:
                raise ConfigError(f"purity values must be in [0.25, 1], got {u}")


def _parse_state_string(text: str) -> str:
    text = text.strip()
    if text in _NAMED_STATES:
        return text
    if text.startswith("werner:"):
        try:
            p = float(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad Werner parameter in state spec {text!r}") from None
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"Werner parameter must be in [0, 1], got {p}")
        return text
    raise ConfigError(
        f"unknown state spec {text!r}; expected one of {_NAMED_STATES} or werner:<p>"
    )


def state_spec_to_runtime(text: str):
    """Translate the config-file state string into a simulator state spec."""
    if text.startswith("werner:"):
        return ("werner", float(text.split(":", 1)[1]))
    return text


def parse_config_file(path) -> dict[str, str]:
    """Read a key=value config file; reject unknown/duplicate keys with line context."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _parse_int(text: str, label: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{label} must be an integer, got {text!r}") from None


def _parse_int_list(text: str, label: str) -> tuple[int, ...]:
    return tuple(_parse_int(t.strip(), label) for t in text.split(",") if t.strip())


def _parse_float_list(text: str, label: str) -> tuple[float, ...]:
    out = []
    for t in text.split(","):
        t = t.strip()
        if not t:
            continue
        try:
            out.append(float(t))
        except ValueError:
            raise ConfigError(f"{label} must be floats, got {t!r}") from None
    return tuple(out)


def build_config(experiment: str, file_values: dict[str, str], flags) -> RunConfig:
    """Merge defaults, config-file values, and flag overrides (flags win)."""
    if "experiment" in file_values:
        declared = file_values["experiment"].replace("-", "_")
        if declared != experiment:
            raise ConfigError(
                f"config file says experiment={declared!r} but the "
                f"{experiment.replace('_', '-')} subcommand was invoked"
            )
    if "protocol" in file_values and "protocols" in file_values:
        raise ConfigError("give either protocol or protocols, not both")
    if "n" in file_values and "n_list" in file_values:
        raise ConfigError("give either n or n_list, not both")

    protocols = _DEFAULT_PROTOCOLS[experiment]
    if "protocol" in file_values:
        protocols = (file_values["protocol"],)
    if "protocols" in file_values:
        protocols = tuple(
            t.strip() for t in file_values["protocols"].split(",") if t.strip()
        )
    if flags.protocols:
        protocols = tuple(t.strip() for t in flags.protocols.split(",") if t.strip())

    n_list = _DEFAULT_N_LIST[experiment]
    if "n" in file_values:
        n_list = (_parse_int(file_values["n"], "n"),)
    if "n_list" in file_values:
        n_list = _parse_int_list(file_values["n_list"], "n_list")

    state: str | None
    if experiment in ("sweep_purity", "histogram"):
        if "state" in file_values:
            raise ConfigError(
                f"{experiment} derives its states internally; the state key is not allowed"
            )
        state = None
    else:
        state = _parse_state_string(file_values.get("state", "singlet"))

    reps = _parse_int(file_values.get("reps", "50"), "reps")
    if flags.reps is not None:
        reps = flags.reps
    seed = _parse_int(file_values.get("seed", "0"), "seed")
    if flags.seed is not None:
        seed = flags.seed
    out_dir = Path(file_values.get("out", "results"))
    if flags.out is not None:
        out_dir = Path(flags.out)
    workers = _parse_int(file_values.get("workers", "1"), "workers")
    if flags.workers is not None:
        workers = flags.workers

    purity_list = DEFAULT_PURITY_GRID
    if "purity_list" in file_values:
        if experiment != "sweep_purity":
            raise ConfigError("purity_list only applies to the sweep-purity experiment")
        purity_list = _parse_float_list(file_values["purity_list"], "purity_list")
        if not purity_list:
            raise ConfigError("purity_list must be non-empty")
    n_states = DEFAULT_N_STATES
    if "n_states" in file_values:
        if experiment != "histogram":
            raise ConfigError("n_states only applies to the histogram experiment")
        n_states = _parse_int(file_values["n_states"], "n_states")

    return RunConfig(
        experiment=experiment,
        protocols=protocols,
        n_list=n_list,
        reps=reps,
        state_spec=state,
        seed=seed,
        out_dir=out_dir,
        workers=workers,
        purity_list=purity_list,
        n_states=n_states,
    )


def _versions() -> dict:
    import numpy

    versions = {
        "python": ".".join(map(str, sys.version_info[:3])),
        "numpy": numpy.__version__,
        "numba": None,
    }
    try:
        import numba

        versions["numba"] = numba.__version__
    except ImportError:
        pass
    try:
        from importlib.metadata import version

        versions["artifact"] = version("artifact")
    except Exception:
        versions["artifact"] = None
    return versions


def write_manifest(cfg: RunConfig, path: Path) -> None:
    payload = {
        "config": {**asdict(cfg), "out_dir": str(cfg.out_dir)},
        "seed": cfg.seed,
        "versions": _versions(),
        "numba_backend": USE_NUMBA,
    }
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_sweep(cfg: RunConfig) -> None:
    spec = state_spec_to_runtime(cfg.state_spec)
    records = []
    for protocol in cfg.protocols:
        records.extend(
            monte_carlo(
                protocol,
                spec,
                list(cfg.n_list),
                cfg.reps,
                cfg.seed,
                workers=cfg.workers,
            )
        )
    write_results(aggregate(records), cfg.out_dir / "results.csv")
    write_trial_records(records, cfg.out_dir / "trials.jsonl")


def _run_sweep_purity(cfg: RunConfig) -> None:
    records = []
    rows = []
    for target in cfg.purity_list:
        spec = ("werner", werner_p_for_purity(target))
        for protocol in cfg.protocols:
            recs = monte_carlo(
                protocol,
                spec,
                list(cfg.n_list),
                cfg.reps,
                cfg.seed,
                workers=cfg.workers,
            )
            records.extend(recs)
            rows.extend(aggregate(recs))
    write_results(rows, cfg.out_dir / "results.csv")
    write_trial_records(records, cfg.out_dir / "trials.jsonl")


def _run_histogram(cfg: RunConfig) -> None:
    baseline_name, adaptive_name = cfg.protocols
    n = cfg.n_list[0]
    ensembles = (
        ("mes", random_mes, np.random.default_rng(cfg.seed)),
        ("pure", random_pure_state, np.random.default_rng(cfg.seed + 1)),
    )
    records = []
    rows = []
    state_counter = 0
    for ensemble, draw, state_rng in ensembles:
        for state_index in range(cfg.n_states):
            rho = draw(state_rng)
            trial_base = cfg.seed + _STATE_SEED_STRIDE * state_counter
            baseline = monte_carlo(
                baseline_name, rho, [n], cfg.reps, trial_base, workers=cfg.workers
            )
            adaptive = monte_carlo(
                adaptive_name, rho, [n], cfg.reps, trial_base, workers=cfg.workers
            )
            records.extend(baseline)
            records.extend(adaptive)
            rows.append(upsilon_row(ensemble, state_index, n, baseline, adaptive))
            state_counter += 1
    write_upsilon(rows, cfg.out_dir / "upsilon.csv")
    write_trial_records(records, cfg.out_dir / "trials.jsonl")


def execute(cfg: RunConfig) -> int:
    """Run the configured experiment; write outputs and the manifest."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.experiment in ("single", "sweep_n"):
        _run_sweep(cfg)
    elif cfg.experiment == "sweep_purity":
        _run_sweep_purity(cfg)
    elif cfg.experiment == "histogram":
        _run_histogram(cfg)
    else:  # pragma: no cover - RunConfig already validates
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    write_manifest(cfg, cfg.out_dir / "manifest.json")
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse that raises ConfigError instead of exiting with code 2."""

    def error(self, message):
        raise ConfigError(message)


def _add_shared_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--seed", type=int, help="base seed (default 0)")
    sub.add_argument("--reps", type=int, help="repetitions per (protocol, N)")
    sub.add_argument("--out", help="output directory (default ./results)")
    sub.add_argument("--workers", type=int, help="worker processes (default 1)")
    sub.add_argument("--protocols", help="comma-separated protocol list")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="raqst",
        description="Adaptive two-qubit state tomography simulations.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for command, experiment, desc in (
        ("run", "single", "one-off run of the configured protocols"),
        ("sweep-n", "sweep_n", "infidelity versus copy budget"),
        ("sweep-purity", "sweep_purity", "Werner-family purity sweep"),
        ("histogram", "histogram", "per-state improvement index over ensembles"),
    ):
        sub = subs.add_parser(command, description=desc, help=desc)
        sub.set_defaults(experiment=experiment)
        _add_shared_flags(sub)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = build_config(args.experiment, file_values, args)
        return execute(cfg)
    except ConfigError as exc:
        print(f"raqst: config error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("raqst: interrupted", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"raqst: runtime error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
