"""Finite-shot simulation of the sixteen-outcome joint measurement.

Sampling uses counter-based Philox generators keyed by (seed, stream
index), so a run is reproducible for a fixed seed and stream count and
independent streams can be drawn without coordination. Shots are split
into contiguous blocks across streams and merged back in stream order,
which keeps the output deterministic under the same configuration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .belltests import single_shot_chsh_table
from .errors import EmptyShotList, InvalidDistribution, OutOfRange
from .inversion import InversionKernel
from .measurement import OutcomeIndex

PROB_FLOOR = -1e-10
PROB_SUM_SLACK = 1e-6

SHOT_CSV_HEADER = ("index", "x_prime", "y_prime", "u_prime", "v_prime", "S_single", "running_mean_S")


@dataclass(frozen=True)
class RngConfig:
    """Reproducibility contract for a sampling run."""

    seed: int
    stream_count: int = 1

    def __post_init__(self):
        if self.seed < 0:
            raise OutOfRange(f"seed must be nonnegative, got {self.seed}")
        if self.stream_count < 1:
            raise OutOfRange(f"stream_count must be >= 1, got {self.stream_count}")

    def generator(self, stream: int) -> np.random.Generator:
        if not 0 <= stream < self.stream_count:
            raise OutOfRange(f"stream {stream} outside [0, {self.stream_count})")
        return np.random.Generator(np.random.Philox(key=[self.seed, stream]))


def _checked_probabilities(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (16,):
        raise InvalidDistribution(f"expected 16 probabilities, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities contain non-finite entries")
    if p.min() < PROB_FLOOR:
        raise InvalidDistribution(f"probability {p.min()!r} below {PROB_FLOOR}")
    total = p.sum()
    if abs(total - 1.0) > PROB_SUM_SLACK:
        raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
    # tiny negatives are rounding debris; clamp and renormalize
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_outcome_indices(probabilities, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n outcome indices (0..15) by inverse transform sampling."""
    if n < 0:
        raise OutOfRange(f"shot count must be nonnegative, got {n}")
    p = _checked_probabilities(probabilities)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0  # guard against cumulative rounding at the top
    return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


def _stream_counts(n: int, streams: int) -> list[int]:
    base, extra = divmod(n, streams)
    return [base + (1 if s < extra else 0) for s in range(streams)]


def sample_shots(probabilities, n: int, config: RngConfig) -> list[OutcomeIndex]:
    """Draw n shots, contiguous blocks per stream, merged in stream order."""
    pieces = []
    for stream, count in enumerate(_stream_counts(n, config.stream_count)):
        if count:
            pieces.append(sample_outcome_indices(probabilities, count, config.generator(stream)))
    merged = np.concatenate(pieces) if pieces else np.empty(0, dtype=np.int64)
    return [OutcomeIndex.from_index(int(i)) for i in merged]


@dataclass(frozen=True)
class ShotRecord:
    """One row of a run: 1-based shot index, signs, and CHSH values."""

    index: int
    xi_prime: OutcomeIndex
    s_single: float
    running_mean_S: float


def shot_records(kernel: InversionKernel, outcomes) -> list[ShotRecord]:
    """Attach single-shot CHSH values and running means to a shot list."""
    table = single_shot_chsh_table(kernel)
    records = []
    total = 0.0
    for i, xi in enumerate(outcomes, start=1):
        if not isinstance(xi, OutcomeIndex):
            xi = OutcomeIndex.from_index(int(xi))
        s = float(table[xi.to_index()])
        total += s
        records.append(ShotRecord(index=i, xi_prime=xi, s_single=s, running_mean_S=total / i))
    return records


def empirical_frequencies(outcomes) -> np.ndarray:
    """Relative frequency of each of the 16 outcomes in a shot list."""
    indices = [xi.to_index() if isinstance(xi, OutcomeIndex) else int(xi) for xi in outcomes]
    if len(indices) == 0:
        raise EmptyShotList("cannot take frequencies of zero shots")
    return np.bincount(np.asarray(indices, dtype=np.int64), minlength=16) / len(indices)


def convergence_report(kernel: InversionKernel, shots) -> dict:
    """Mean, spread, and standard error of the single-shot CHSH values.

    The reported mean is exactly ensemble_from_shots on the same data;
    with one shot the spread and standard error are reported as absent.
    """
    records = shot_records(kernel, shots)
    if not records:
        raise EmptyShotList("cannot summarize zero shots")
    values = np.array([r.s_single for r in records])
    n = len(values)
    std = float(values.std(ddof=1)) if n > 1 else None
    return {
        "shots": n,
        "mean_S": float(values.mean()),
        "sample_std": std,
        "std_error": std / float(np.sqrt(n)) if std is not None else None,
        "final_running_mean": records[-1].running_mean_S,
    }


def write_shot_csv(path, records: list[ShotRecord]) -> None:
    """Write shots as CSV; signs as +-1 integers, reals at full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SHOT_CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.index,
                    r.xi_prime.x,
                    r.xi_prime.y,
                    r.xi_prime.u,
                    r.xi_prime.v,
                    "%.17g" % r.s_single,
                    "%.17g" % r.running_mean_S,
                ]
            )
