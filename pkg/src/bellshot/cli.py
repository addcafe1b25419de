"""Command-line driver: exact analysis, sampled runs, sweeps, self-checks.

Configs are single JSON documents; measurement directions are given as
Bloch 3-vectors rather than angles so no axis convention can creep in.
All files are written to a temporary name and atomically renamed, so a
crash never leaves a partial result behind. Exit codes: 0 success, 1 a
validation or internal consistency failure, 2 a config problem.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .belltests import (
    ch_report,
    chsh_report,
    classical_bounds_check,
    ensemble_chsh,
    single_shot_ch_table,
    single_shot_chsh_table,
)
from .errors import BellshotError, ConfigError, ConsistencyError
from .inversion import build_kernel, invert_distribution
from .measurement import (
    GAMMA_MIN,
    OUTCOME_ORDER_DOC,
    GammaSet,
    joint_povm,
    observed_statistics,
)
from .observables import chsh_optimal_angles, observable_set
from .sampler import (
    RngConfig,
    convergence_report,
    empirical_frequencies,
    sample_shots,
    shot_records,
    write_shot_csv,
)
from .states import DensityMatrix, BellState, bell_state, custom_state, werner_state
from .validate import validate_all

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2

LOW_GAMMA_WARNING = 0.1
SWEEP_REFERENCE_GAMMA = 0.6  # admissible at orthogonal settings: 2 * 0.36 < 1


def _fail_config(message: str) -> ConfigError:
    return ConfigError(message)


def _parse_state(raw) -> DensityMatrix:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise _fail_config(
            'state: expected exactly one of {"bell": name}, {"werner": eta}, '
            '{"custom": {"real": 4x4, "imag": 4x4}}'
        )
    (kind, value), = raw.items()
    if kind == "bell":
        try:
            return bell_state(BellState(value))
        except ValueError:
            names = ", ".join(b.value for b in BellState)
            raise _fail_config(f"state.bell: unknown name {value!r}; expected one of {names}")
    if kind == "werner":
        try:
            eta = float(value)
        except (TypeError, ValueError):
            raise _fail_config(f"state.werner: expected a real in [0, 1], got {value!r}")
        try:
            return werner_state(eta)
        except BellshotError as exc:
            raise _fail_config(f"state.werner: {exc}")
    if kind == "custom":
        if not isinstance(value, dict) or set(value) != {"real", "imag"}:
            raise _fail_config('state.custom: expected {"real": 4x4 table, "imag": 4x4 table}')
        try:
            entries = np.asarray(value["real"], dtype=float) + 1j * np.asarray(
                value["imag"], dtype=float
            )
        except (TypeError, ValueError):
            raise _fail_config("state.custom: real and imag must be 4x4 numeric tables")
        try:
            return custom_state(entries)
        except BellshotError as exc:
            raise _fail_config(f"state.custom: {exc}")
    raise _fail_config(f"state: unknown kind {kind!r}")


def _parse_vector(raw, where: str) -> np.ndarray:
    try:
        v = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise _fail_config(f"{where}: expected a 3-vector of reals, got {raw!r}")
    if v.shape != (3,):
        raise _fail_config(f"{where}: expected a 3-vector, got shape {v.shape}")
    return v


def _parse_observables(raw):
    if raw is None:
        return chsh_optimal_angles()
    if not isinstance(raw, dict) or set(raw) != {"x", "y", "u", "v"}:
        raise _fail_config('observables: expected keys "x", "y", "u", "v" (Bloch 3-vectors)')
    vectors = [_parse_vector(raw[k], f"observables.{k}") for k in ("x", "y", "u", "v")]
    try:
        return observable_set(*vectors)
    except BellshotError as exc:
        raise _fail_config(f"observables: {exc}")


def _parse_gammas(raw) -> GammaSet:
    if isinstance(raw, (int, float)):
        raw = {"x": raw, "y": raw, "u": raw, "v": raw}
    if not isinstance(raw, dict) or set(raw) != {"x", "y", "u", "v"}:
        raise _fail_config('gammas: expected a single real or keys "x", "y", "u", "v"')
    try:
        values = [float(raw[k]) for k in ("x", "y", "u", "v")]
    except (TypeError, ValueError):
        raise _fail_config(f"gammas: entries must be reals, got {raw!r}")
    try:
        gammas = GammaSet(*values)
    except BellshotError as exc:
        raise _fail_config(f"gammas: {exc}")
    if min(abs(g) for g in gammas.as_tuple()) < LOW_GAMMA_WARNING:
        print(
            "warning: an unsharpness factor below 0.1 amplifies inversion "
            "noise by more than 10x per observable",
            file=sys.stderr,
        )
    return gammas


class ExperimentConfig:
    """Validated experiment description (state, settings, gammas, run plan)."""

    def __init__(self, state, settings, gammas, shots, seed, stream_count):
        self.state = state
        self.settings = settings
        self.gammas = gammas
        self.shots = shots
        self.seed = seed
        self.stream_count = stream_count

    @classmethod
    def from_dict(cls, doc) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise _fail_config("config root must be a JSON object")
        known = {"state", "observables", "gammas", "shots", "seed", "stream_count"}
        unknown = set(doc) - known
        if unknown:
            raise _fail_config(f"unknown config fields: {sorted(unknown)}")
        if "state" not in doc:
            raise _fail_config('config is missing required field "state"')
        if "gammas" not in doc:
            raise _fail_config('config is missing required field "gammas"')
        state = _parse_state(doc["state"])
        settings = _parse_observables(doc.get("observables"))
        gammas = _parse_gammas(doc["gammas"])
        shots = doc.get("shots", 0)
        if not isinstance(shots, int) or shots < 0:
            raise _fail_config(f"shots: expected a nonnegative integer, got {shots!r}")
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise _fail_config(f"seed: expected an unsigned 64-bit integer, got {seed!r}")
        stream_count = doc.get("stream_count", 1)
        if not isinstance(stream_count, int) or stream_count < 1:
            raise _fail_config(f"stream_count: expected a positive integer, got {stream_count!r}")
        return cls(state, settings, gammas, shots, seed, stream_count)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise _fail_config(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise _fail_config(f"config is not valid JSON: {exc}")
    return ExperimentConfig.from_dict(doc)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def atomic_write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, default=_json_default) + "\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bellshot-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _analysis(config: ExperimentConfig):
    povm = joint_povm(config.settings, config.gammas)
    kernel = build_kernel(config.gammas)
    observed = observed_statistics(config.state, povm)
    return povm, kernel, observed


def cmd_exact(config: ExperimentConfig, out_dir: str) -> int:
    """Full exact analysis of one configuration, written as JSON."""
    _, kernel, observed = _analysis(config)
    quasi = invert_distribution(kernel, observed)
    chsh = chsh_report(kernel, observed)
    ch = ch_report(kernel, observed)
    payload = {
        "ordering": OUTCOME_ORDER_DOC,
        "gammas": dict(zip(("x", "y", "u", "v"), config.gammas.as_tuple())),
        "observed_statistics": [float(p) for p in observed],
        "quasi_distribution": quasi.to_list(),
        "min_quasi_entry": quasi.min_entry(),
        "negative": quasi.is_negative(),
        **chsh.as_dict(),
        **ch.as_dict(),
        "verdicts": {
            "chsh": classical_bounds_check(chsh),
            "ch": classical_bounds_check(ch),
        },
    }
    path = os.path.join(out_dir, "exact.json")
    atomic_write_json(path, payload)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_run(config: ExperimentConfig, out_dir: str) -> int:
    """Sample shots, log them as CSV, and summarize convergence as JSON."""
    if config.shots < 1:
        raise _fail_config("run requires shots >= 1 (set shots in config or pass --shots)")
    _, kernel, observed = _analysis(config)
    rng_config = RngConfig(seed=config.seed, stream_count=config.stream_count)
    shots = sample_shots(observed, config.shots, rng_config)
    records = shot_records(kernel, shots)
    csv_path = os.path.join(out_dir, "shots.csv")
    # build in a temp file then rename, same discipline as the JSON writes
    directory = os.path.dirname(csv_path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bellshot-", suffix=".tmp")
    os.close(fd)
    try:
        write_shot_csv(tmp, records)
        os.replace(tmp, csv_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

    summary = convergence_report(kernel, shots)
    freqs = empirical_frequencies(shots)
    empirical_quasi = invert_distribution(kernel, freqs)
    exact_quasi = invert_distribution(kernel, observed)
    exact_S = ensemble_chsh(exact_quasi)
    payload = {
        "shots": summary["shots"],
        "seed": config.seed,
        "stream_count": config.stream_count,
        "empirical_S": summary["mean_S"],
        "sample_std": summary["sample_std"],
        "std_error": summary["std_error"],
        "exact_S": exact_S,
        "verdicts": {"empirical_S": classical_bounds_check(
            chsh_report(kernel, freqs)
        )["ensemble_S"]},
        "empirical_quasi_distribution": empirical_quasi.to_list(),
        "empirical_min_quasi_entry": empirical_quasi.min_entry(),
        "empirical_negative": empirical_quasi.is_negative(),
    }
    json_path = os.path.join(out_dir, "run_summary.json")
    atomic_write_json(json_path, payload)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return EXIT_OK


def _sweep_grid(args) -> list[float]:
    if args.grid_values is not None:
        return [float(v) for v in args.grid_values]
    start, stop, points = args.grid_range
    n = int(points)
    if n < 2:
        raise _fail_config("sweep --grid-range needs at least 2 points")
    return list(np.linspace(float(start), float(stop), n))


def cmd_sweep(config: ExperimentConfig, out_dir: str, axis: str, grid: list[float]) -> int:
    """One CSV row per grid point along a gamma or Werner-eta axis.

    Quantities that survive the exact inversion (ensemble S, min quasi
    entry) do not depend on gamma, so along the gamma axis they are
    evaluated once at a reference value; the per-shot magnitudes and CH
    extremes are kernel-level and always well defined. The `realizable`
    column records whether a positive joint measurement exists at that
    grid point for the configured directions.
    """
    rows = []
    if axis == "gamma":
        header = ("gamma", "ensemble_S", "abs_single_shot_S", "ch_min", "ch_max",
                  "min_quasi_entry", "realizable")
        ref_gammas = GammaSet.equal(SWEEP_REFERENCE_GAMMA)
        ref_povm = joint_povm(config.settings, ref_gammas)
        ref_kernel = build_kernel(ref_gammas)
        ref_observed = observed_statistics(config.state, ref_povm)
        ref_quasi = invert_distribution(ref_kernel, ref_observed)
        exact_S = ensemble_chsh(ref_quasi)
        min_entry = ref_quasi.min_entry()
        for gamma in grid:
            if not GAMMA_MIN <= abs(gamma) <= 1.0:
                raise _fail_config(f"sweep gamma {gamma!r} outside [{GAMMA_MIN}, 1]")
            gammas = GammaSet.equal(float(gamma))
            kernel = build_kernel(gammas)
            table = np.abs(single_shot_chsh_table(kernel))
            ch_grid = single_shot_ch_table(kernel)
            try:
                joint_povm(config.settings, gammas)
                realizable = 1
            except BellshotError:
                realizable = 0
            rows.append((gamma, exact_S, float(table.max()), float(ch_grid.min()),
                         float(ch_grid.max()), min_entry, realizable))
    elif axis == "werner_eta":
        header = ("werner_eta", "ensemble_S", "abs_single_shot_S", "ch_min", "ch_max",
                  "min_quasi_entry", "realizable")
        kernel = build_kernel(config.gammas)
        povm = joint_povm(config.settings, config.gammas)
        table = np.abs(single_shot_chsh_table(kernel))
        ch_grid = single_shot_ch_table(kernel)
        for eta in grid:
            if not 0.0 <= eta <= 1.0:
                raise _fail_config(f"sweep werner_eta {eta!r} outside [0, 1]")
            rho = werner_state(float(eta))
            observed = observed_statistics(rho, povm)
            quasi = invert_distribution(kernel, observed)
            rows.append((eta, ensemble_chsh(quasi), float(table.max()),
                         float(ch_grid.min()), float(ch_grid.max()),
                         quasi.min_entry(), 1))
    else:
        raise _fail_config(f"unknown sweep axis {axis!r}")

    lines = [",".join(header)]
    for row in rows:
        cells = [("%d" % c) if isinstance(c, int) else ("%.17g" % c) for c in row]
        lines.append(",".join(cells))
    path = os.path.join(out_dir, f"sweep_{axis}.csv")
    _atomic_write(path, "\n".join(lines) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(seed: int, trials: int, inject_fault: bool) -> int:
    """Run the randomized invariant suite and report per-module counts."""
    report = validate_all(seed, trials=trials, inject_fault=inject_fault)
    print(f"validation seed: {report.seed}")
    for result in report.results:
        status = "ok" if result.passed else "FAIL"
        print(f"  {result.name}: {result.checks} checks {status}")
        for message in result.failures:
            print(f"    {message}")
    print(f"total: {report.total_checks} checks, "
          f"{'all passed' if report.passed else 'FAILURES PRESENT'}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellshot",
        description="Single-shot Bell tests from one joint noisy measurement",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="path to a JSON experiment config")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--shots", type=int, default=None, help="override the config shot count")

    add_common(sub.add_parser("exact", help="exact statistics, tests, and verdicts"))
    add_common(sub.add_parser("run", help="sample shots and summarize convergence"))

    sweep = sub.add_parser("sweep", help="tabulate test values along a parameter axis")
    add_common(sweep)
    sweep.add_argument("--axis", required=True, choices=("gamma", "werner_eta"))
    group = sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--grid-values", nargs="+", type=float, help="explicit grid points")
    group.add_argument(
        "--grid-range",
        nargs=3,
        metavar=("START", "STOP", "POINTS"),
        type=float,
        help="evenly spaced grid",
    )

    val = sub.add_parser("validate", help="randomized self-checks of every module")
    val.add_argument("--seed", type=int, default=None, help="seed for the randomized checks")
    val.add_argument("--trials", type=int, default=25, help="trials per randomized check")
    val.add_argument("--inject-fault", action="store_true",
                     help="corrupt a kernel on purpose to prove failures are caught")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            seed = args.seed if args.seed is not None else int.from_bytes(os.urandom(4), "big")
            return cmd_validate(seed, args.trials, args.inject_fault)

        config = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise _fail_config(f"--seed must be nonnegative, got {args.seed}")
            config.seed = args.seed
        if args.shots is not None:
            if args.shots < 0:
                raise _fail_config(f"--shots must be nonnegative, got {args.shots}")
            config.shots = args.shots
        os.makedirs(args.out, exist_ok=True)

        if args.command == "exact":
            return cmd_exact(config, args.out)
        if args.command == "run":
            return cmd_run(config, args.out)
        if args.command == "sweep":
            return cmd_sweep(config, args.out, args.axis, _sweep_grid(args))
        raise _fail_config(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BellshotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
