"""Exhaustive search over isotropic subspaces for good distillation steps.

Fidelity and success of a step depend only on its tested space S, so the
candidates are subspaces rather than matrices. Subspaces are generated in
canonical RREF, bottom row first: each new row has a higher pivot than the
rows below it, is zero on their pivots and commutes with them. Every
isotropic subspace therefore appears exactly once, in colexicographic order
of its RREF rows.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .bellstate import BellDiagonal
from .gf2core import Subspace, affine_ascending, nullspace, pair_swap, to_bits
from .protocol import StepOutcome, apply_step, make_step, step_scores

DEFAULT_MAX_CANDIDATES = 2_000_000
FULL_OUTCOMES = 100


class SearchError(RuntimeError):
    pass


def isotropic_count(n: int, k: int) -> int:
    """Number of k-dimensional isotropic subspaces of Z2^(2n)."""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= 4 ** (n - i) - 1
        den *= 2 ** (i + 1) - 1
    return num // den


def _allowed(rows: Sequence[int], width: int) -> Subspace:
    cons = [1 << (r.bit_length() - 1) for r in rows]
    cons += [pair_swap(r, width) for r in rows]
    return nullspace(cons, width)


def _first_level(n: int) -> list[int]:
    return list(range(1, 1 << (2 * n)))


@dataclass(frozen=True, slots=True)
class WorkRange:
    """Slice ``[start, stop)`` of the bottom-row candidates of ``(n, k)``."""

    n: int
    k: int
    start: int
    stop: int


def search_partition(n: int, k: int, shards: int) -> list[WorkRange]:
    if shards < 1:
        raise ValueError("need at least one shard")
    total = len(_first_level(n)) if k else 1
    bounds = [round(i * total / shards) for i in range(shards + 1)]
    return [WorkRange(n, k, bounds[i], bounds[i + 1]) for i in range(shards)]


def enumerate_isotropic(n: int, k: int, work: WorkRange | None = None) -> Iterator[Subspace]:
    """Each k-dimensional isotropic subspace exactly once."""
    width = 2 * n
    if k > n or k < 0:
        return
    if k == 0:
        if work is None or work.start == 0 < work.stop:
            yield Subspace((), width)
        return
    first = _first_level(n)
    if work is not None:
        first = first[work.start:work.stop]

    def extend(rows: list[int]) -> Iterator[Subspace]:
        if len(rows) == k:
            yield Subspace(tuple(reversed(rows)), width)
            return
        floor = rows[-1].bit_length()
        for v in affine_ascending(0, _allowed(rows, width)):
            if v.bit_length() > floor:
                yield from extend(rows + [v])

    for v in first:
        yield from extend([v])


@dataclass(frozen=True, slots=True)
class Objective:
    """``fidelity``, ``success``, ``fidelity-at-min-success`` or ``inverse-yield-proxy``."""

    kind: str = "fidelity"
    threshold: float = 0.0

    KINDS = ("fidelity", "success", "fidelity-at-min-success", "inverse-yield-proxy")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown objective {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "fidelity-at-min-success" and not 0.0 < self.threshold <= 1.0:
            raise ValueError("success threshold must lie in (0, 1]")

    @classmethod
    def parse(cls, text: str) -> Objective:
        kind, _, arg = text.partition(":")
        return cls(kind, float(arg)) if arg else cls(kind)

    def score(self, fid: float, success: float, p: BellDiagonal, n: int, m: int) -> float:
        if success <= 0.0:
            return -math.inf
        if self.kind == "fidelity":
            return fid
        if self.kind == "success":
            return success
        if self.kind == "fidelity-at-min-success":
            return fid if success >= self.threshold else -math.inf
        # heuristic: log pair rate plus log infidelity reduction
        before = 1.0 - p.fidelity**m
        after = 1.0 - fid
        if after <= 0.0:
            return math.inf
        return math.log(m * success / n) + math.log(before / after) if before > 0 else -math.inf


@dataclass(frozen=True)
class SearchEntry:
    basis: tuple[int, ...]
    score: float
    fidelity: float
    success: float
    outcome: StepOutcome | None

    def rows(self, width: int) -> list[str]:
        return [to_bits(b, width) for b in self.basis]


@dataclass(frozen=True)
class SearchReport:
    n: int
    m: int
    best: tuple[SearchEntry, ...]
    states_evaluated: int
    wall_time: float
    degenerate: bool

    def to_csv(self) -> str:
        k = self.n - self.m
        head = ["rank", "score", "success"] + [f"S_row{i + 1}" for i in range(k)]
        lines = [",".join(head)]
        for rank, e in enumerate(self.best, 1):
            lines.append(
                ",".join([str(rank), _fmt(e.score), _fmt(e.success)] + e.rows(2 * self.n))
            )
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _score_range(args: tuple) -> list[tuple[float, tuple[int, ...], float, float]]:
    p, n, m, objective, work = args
    out = []
    for space in enumerate_isotropic(n, n - m, work):
        fid, succ = step_scores(p, space, n, m)
        out.append((objective.score(fid, succ, p, n, m), space.basis, fid, succ))
    return out


def best_step(
    p: BellDiagonal,
    n: int,
    m: int,
    objective: Objective = Objective(),
    top: int | None = None,
    shards: int = 1,
    workers: int = 1,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    full_outcomes: int = FULL_OUTCOMES,
) -> SearchReport:
    """Score every tested space of an (n, m) step and return the best ones.

    Scores come from S alone; the first ``full_outcomes`` returned entries
    also carry the complete output state of a completed step.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got n={n}, m={m}")
    total = isotropic_count(n, n - m)
    if total > max_candidates:
        raise SearchError(
            f"{total} candidate spaces for n={n}, m={m} exceeds the limit of {max_candidates}"
        )
    t0 = time.perf_counter()
    jobs = [(p, n, m, objective, w) for w in search_partition(n, n - m, shards)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_score_range, jobs))
    else:
        parts = [_score_range(j) for j in jobs]
    scored = [row for part in parts for row in part]
    if not scored:
        raise SearchError("no candidate spaces")
    scored.sort(key=lambda r: (-r[0], r[1]))
    degenerate = scored[0][0] == scored[-1][0]
    chosen = scored if top is None else scored[:top]
    best = []
    for i, (score, basis, fid, succ) in enumerate(chosen):
        outcome = None
        if succ > 0 and i < full_outcomes:
            outcome = apply_step(p, make_step(n, m, list(basis)))
        best.append(SearchEntry(basis, score, fid, succ, outcome))
    return SearchReport(n, m, tuple(best), len(scored), time.perf_counter() - t0, degenerate)
