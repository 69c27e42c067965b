"""Exhaustive verification that h+(d) * log(eta_d) stays above a threshold.

The scan walks every fundamental discriminant d in a range, finds the d
whose minimal Pell solution (v0, u0) of v^2 - d u^2 = 4 satisfies
d * u0^2 <= cap, and for each such hit computes the narrow class number and
regulator.  Discriminants with no solution under the cap are excluded by
construction: for them log(u0 sqrt d) >= log(cap)/2 already.

Coordinator/worker layout: the range is cut into fixed-size chunks, workers
claim chunks from a queue, and each finished chunk's records are appended to
a line-oriented checkpoint before the chunk is marked done.  A crash between
the two writes re-does at most one chunk; records are deduplicated by d on
load, so resuming yields the identical record set.  The summary reduction
(count, min by value, violation set) is associative and commutative, making
the result independent of worker count and completion order.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characters import fundamental_mask, is_fundamental_discriminant
from .quadratic import narrow_class_number

__all__ = [
    "CheckpointError",
    "SearchRecord",
    "SearchSummary",
    "SearchTask",
    "minimal_u0_below_cap",
    "run_search",
]

DEFAULT_CHUNK = 10**6
_REL_TOL = 1e-9


class CheckpointError(RuntimeError):
    """Checkpoint header mismatch or corrupted record content."""


@dataclass(frozen=True)
class SearchTask:
    """Scan parameters: d in [d_min, d_max], hits where d * u0^2 <= cap."""

    d_min: int
    d_max: int
    cap: int
    threshold: float

    def __post_init__(self):
        if self.d_min < 5:
            raise ValueError("d_min must be at least 5")
        if self.d_max < self.d_min:
            raise ValueError("need d_max >= d_min")
        if self.cap < self.d_min:
            raise ValueError("cap below d_min: no admissible (d, u0) at all")
        # d * u^2 + 4 <= cap + 4 must stay exactly representable in the
        # float64 square detector; Python ints cannot overflow, this guards
        # the vectorized path.
        if self.cap + 4 >= 2**53:
            raise ValueError("cap too large for the exact square detector")


@dataclass(frozen=True)
class SearchRecord:
    """One hit: minimal (u0, v0) under the cap with its class data."""

    d: int
    u0: int
    v0: int
    h_plus: int
    h_log_eta: float

    def line(self) -> str:
        return f"R,{self.d},{self.u0},{self.v0},{self.h_plus},{self.h_log_eta:.17g}"

    @classmethod
    def from_line(cls, line: str) -> "SearchRecord":
        parts = line.split(",")
        if len(parts) != 6 or parts[0] != "R":
            raise CheckpointError(f"malformed record line: {line!r}")
        return cls(
            int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4]), float(parts[5])
        )

    def validate(self):
        if self.v0 * self.v0 - self.d * self.u0 * self.u0 != 4:
            raise CheckpointError(f"Pell identity fails for record d={self.d}")
        again = self.h_plus * math.log((self.v0 + self.u0 * math.sqrt(self.d)) / 2.0)
        if abs(again - self.h_log_eta) > _REL_TOL * abs(again):
            raise CheckpointError(f"h*log(eta) recomputation fails for d={self.d}")


@dataclass(frozen=True)
class SearchSummary:
    task: SearchTask
    candidate_count: int
    min_record: SearchRecord | None
    violations: tuple[SearchRecord, ...]
    records: tuple[SearchRecord, ...]
    chunks_done: int
    complete: bool
    elapsed: float = field(compare=False, default=0.0)


def minimal_u0_below_cap(d: int, cap: int):
    """Least u with d u^2 + 4 a perfect square and d u^2 <= cap, as (u, v).

    None when no u qualifies; minimality within the cap coincides with
    global minimality since smaller u admit no solution at all.
    """
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")
    if cap < d:
        raise ValueError("cap below d leaves no admissible u")
    for u in range(1, math.isqrt(cap // d) + 1):
        s = d * u * u + 4
        v = math.isqrt(s)
        if v * v == s:
            return u, v
    return None


def _make_record(d: int, u0: int, v0: int) -> SearchRecord:
    # v0 <= sqrt(cap + 4) fits a double exactly, so the plain log is exact
    eta_log = math.log((v0 + u0 * math.sqrt(d)) / 2.0)
    h = narrow_class_number(d).h_plus
    return SearchRecord(d, u0, v0, h, h * eta_log)


def scan_chunk(lo: int, hi: int, cap: int) -> list[SearchRecord]:
    """Records for every fundamental d in [lo, hi), sorted by d.

    Square detection is vectorized: for each u ascending, d u^2 + 4 is
    tested via a float sqrt bracketed by exact integer comparison (safe
    because d u^2 + 4 <= cap + 4 < 2^53 by the task precondition), and hit
    discriminants leave the candidate pool so only the minimal u survives.
    """
    mask = fundamental_mask(lo, hi)
    alive = (np.nonzero(mask)[0] + lo).astype(np.int64)
    hits: list[tuple[int, int, int]] = []
    u = 1
    while alive.size and u * u <= cap // int(alive[0]):
        limit = cap // (u * u)
        ncand = int(np.searchsorted(alive, limit, side="right"))
        cand = alive[:ncand]
        s = cand * (u * u) + 4
        root = np.sqrt(s.astype(np.float64)).astype(np.int64)
        v = np.zeros_like(cand)
        for adj in (-1, 0, 1):
            r = root + adj
            v = np.where((v == 0) & (r * r == s), r, v)
        hit = v > 0
        for dd, vv in zip(cand[hit].tolist(), v[hit].tolist()):
            hits.append((dd, u, vv))
        alive = np.concatenate((cand[~hit], alive[ncand:]))
        u += 1
    hits.sort()
    return [_make_record(dd, uu, vv) for dd, uu, vv in hits]


def _header_line(task: SearchTask, chunk_size: int) -> str:
    return (
        f"#task d_min={task.d_min} d_max={task.d_max} cap={task.cap} "
        f"threshold={task.threshold!r} chunk={chunk_size}"
    )


def _chunk_bounds(task: SearchTask, chunk_size: int, index: int) -> tuple[int, int]:
    lo = task.d_min + index * chunk_size
    return lo, min(lo + chunk_size, task.d_max + 1)


def _chunk_count(task: SearchTask, chunk_size: int) -> int:
    return -(-(task.d_max - task.d_min + 1) // chunk_size)


def _load_checkpoint(path: str, expected_header: str):
    """(done_chunks, records_by_d) from an existing checkpoint file.

    The header must match the expected one byte for byte.  Records are
    validated (exact Pell identity, value recomputation) and deduplicated
    by d; an incomplete trailing line (torn final write) is ignored.
    """
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    lines = text.split("\n")
    if not lines or lines[0] != expected_header:
        raise CheckpointError(
            f"checkpoint header mismatch:\n  found    {lines[0]!r}\n"
            f"  expected {expected_header!r}"
        )
    if not text.endswith("\n"):
        lines = lines[:-1]  # drop the torn final line
    done: set[int] = set()
    records: dict[int, SearchRecord] = {}
    for line in lines[1:]:
        if not line:
            continue
        if line.startswith("C,"):
            done.add(int(line[2:]))
        elif line.startswith("R,"):
            rec = SearchRecord.from_line(line)
            rec.validate()
            records.setdefault(rec.d, rec)
        else:
            raise CheckpointError(f"unrecognized checkpoint line: {line!r}")
    return done, records


def _summarize(
    task: SearchTask,
    records_by_d: dict[int, SearchRecord],
    chunks_done: int,
    complete: bool,
    elapsed: float,
) -> SearchSummary:
    records = tuple(records_by_d[d] for d in sorted(records_by_d))
    min_record = (
        min(records, key=lambda r: (r.h_log_eta, r.d)) if records else None
    )
    violations = tuple(r for r in records if r.h_log_eta <= task.threshold)
    return SearchSummary(
        task=task,
        candidate_count=len(records),
        min_record=min_record,
        violations=violations,
        records=records,
        chunks_done=chunks_done,
        complete=complete,
        elapsed=elapsed,
    )


def run_search(
    task: SearchTask,
    workers: int = 1,
    checkpoint_path: str | None = None,
    chunk_size: int = DEFAULT_CHUNK,
    max_chunks: int | None = None,
) -> SearchSummary:
    """Scan the task range and summarize the hits.

    Chunks still pending in the checkpoint are processed (by a process pool
    when workers > 1); each finished chunk appends its record lines, flushes,
    then appends its done marker.  `max_chunks` stops after that many new
    chunks (the summary is then marked incomplete) -- the hook the resume
    tests use to simulate a kill.  The final summary is a pure function of
    the task: worker count, claim order, and interruptions do not affect it.
    """
    if workers < 1:
        raise ValueError("need at least one worker")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    t0 = time.monotonic()
    header = _header_line(task, chunk_size)
    total = _chunk_count(task, chunk_size)

    done: set[int] = set()
    records: dict[int, SearchRecord] = {}
    sink = None
    if checkpoint_path is not None:
        if os.path.exists(checkpoint_path) and os.path.getsize(checkpoint_path) > 0:
            done, records = _load_checkpoint(checkpoint_path, header)
            sink = open(checkpoint_path, "a", encoding="ascii")
        else:
            sink = open(checkpoint_path, "w", encoding="ascii")
            sink.write(header + "\n")
            sink.flush()

    pending = [i for i in range(total) if i not in done]
    if max_chunks is not None:
        pending = pending[: max(0, max_chunks)]

    def consume(index: int, recs: list[SearchRecord]):
        if sink is not None:
            for rec in recs:
                sink.write(rec.line() + "\n")
            sink.flush()
            sink.write(f"C,{index}\n")
            sink.flush()
        for rec in recs:
            records.setdefault(rec.d, rec)
        done.add(index)

    try:
        if workers == 1:
            for i in pending:
                lo, hi = _chunk_bounds(task, chunk_size, i)
                consume(i, scan_chunk(lo, hi, task.cap))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {}
                for i in pending:
                    lo, hi = _chunk_bounds(task, chunk_size, i)
                    futures[pool.submit(scan_chunk, lo, hi, task.cap)] = i
                for fut in futures:  # consume in submit order: deterministic file
                    consume(futures[fut], fut.result())
    finally:
        if sink is not None:
            sink.close()

    complete = len(done) == total
    return _summarize(task, records, len(done), complete, time.monotonic() - t0)
