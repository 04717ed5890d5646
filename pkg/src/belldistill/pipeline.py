"""Recurrence schedules followed by hashing, and their inverse asymptotic yield."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bellstate import BellDiagonal, shannon_entropy, sort_descending, werner
from .protocol import DegenerateInputError, DistillationStep, apply_step, dej_step, proposed_step

DEFAULT_MAX_STEPS = 25


@dataclass(frozen=True, slots=True)
class ScheduledStep:
    step: DistillationStep
    reorder: bool = True


@dataclass(frozen=True)
class Schedule:
    steps: tuple[ScheduledStep, ...] = ()
    hashing: bool = True

    def __post_init__(self) -> None:
        if not self.steps and not self.hashing:
            raise ValueError("schedule needs at least one step or hashing")
        for s in self.steps:
            if s.step.m != 1:
                raise ValueError("recurrence steps must output a single pair")

    @classmethod
    def of(cls, steps: Iterable[DistillationStep], reorder: bool = True, hashing: bool = True) -> Schedule:
        return cls(tuple(ScheduledStep(s, reorder) for s in steps), hashing)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.steps:
            out[s.step.name or "custom"] = out.get(s.step.name or "custom", 0) + 1
        return out

    def describe(self) -> str:
        names = [s.step.name or f"n{s.step.n}" for s in self.steps]
        if self.hashing:
            names.append("hashing")
        return " -> ".join(names)


@dataclass(frozen=True, slots=True)
class StepRecord:
    fidelity: float
    success: float
    cost_multiplier: float


@dataclass(frozen=True)
class YieldResult:
    per_step: tuple[StepRecord, ...]
    final_state: BellDiagonal
    hashing_yield: float
    cost: float
    L: float

    @property
    def log10L(self) -> float:
        return math.log10(self.L) if math.isfinite(self.L) else math.inf

    @property
    def finite(self) -> bool:
        return math.isfinite(self.L)


def hashing_yield(q: BellDiagonal) -> float:
    """Asymptotic hashing yield ``1 - H(q)``, clipped at zero."""
    return max(0.0, 1.0 - shannon_entropy(q))


def _yield_result(records: Sequence[StepRecord], state: BellDiagonal, cost: float, hashing: bool) -> YieldResult:
    y = hashing_yield(state) if hashing else 1.0
    L = cost / y if y > 0 else math.inf
    return YieldResult(tuple(records), state, y, cost, L)


def run_recurrence(p0: BellDiagonal, sched: Schedule) -> YieldResult:
    """Push ``p0`` through the schedule; the cost of step i is n_i / success_i."""
    state = p0
    cost = 1.0
    records = []
    for item in sched.steps:
        out = apply_step(state, item.step)
        state = out.state.to_single()
        if item.reorder:
            state, _ = sort_descending(state)
        mult = item.step.n / out.success
        cost *= mult
        records.append(StepRecord(state.fidelity, out.success, mult))
    return _yield_result(records, state, cost, sched.hashing)


@dataclass(frozen=True)
class OptimizedSchedule:
    schedule: Schedule
    result: YieldResult
    repeats: int
    final_extra: bool
    # every (repeats, final_extra) evaluated, for inspection and plotting
    candidates: tuple[tuple[int, bool, float, float], ...] = field(repr=False, default=())


def optimize_schedule(
    p0: BellDiagonal,
    max_steps: int = DEFAULT_MAX_STEPS,
    main: DistillationStep | None = None,
    final: DistillationStep | None = None,
    allow_final: bool = True,
) -> OptimizedSchedule:
    """Best of k main steps (k <= max_steps), optionally one final extra step, then hashing.

    Minimizes L; ties go to fewer steps. When every candidate has infinite L
    the schedule reaching the best fidelity is returned (still flagged by
    ``result.finite``).
    """
    main = proposed_step() if main is None else main
    final = dej_step() if final is None and allow_final else final
    use_final = allow_final and final is not None

    best: tuple | None = None
    cands = []
    state, cost = p0, 1.0
    records: list[StepRecord] = []

    def consider(k: int, extra: bool, st: BellDiagonal, c: float, recs: list[StepRecord]) -> None:
        nonlocal best
        res = _yield_result(recs, st, c, True)
        cands.append((k, extra, res.L, st.fidelity))
        key = (res.L, k + extra) if res.finite else (math.inf, -st.fidelity, k + extra)
        if best is None or key < best[0]:
            best = (key, k, extra, res)

    for k in range(max_steps + 1):
        if k:
            try:
                out = apply_step(state, main)
            except DegenerateInputError:
                break
            state, _ = sort_descending(out.state.to_single())
            mult = main.n / out.success
            cost *= mult
            records = records + [StepRecord(state.fidelity, out.success, mult)]
        consider(k, False, state, cost, records)
        if use_final:
            try:
                out = apply_step(state, final)
            except DegenerateInputError:
                continue
            st, _ = sort_descending(out.state.to_single())
            mult = final.n / out.success
            consider(k, True, st, cost * mult, records + [StepRecord(st.fidelity, out.success, mult)])

    assert best is not None
    _, k, extra, res = best
    steps = [main] * k + ([final] if extra else [])
    return OptimizedSchedule(Schedule.of(steps), res, k, extra, tuple(cands))


@dataclass(frozen=True, slots=True)
class SweepRow:
    F: float
    log10L_proposed: float
    log10L_dej: float
    k_proposed: int
    k_dej: int
    proposed_final_dej: bool


def figure1_sweep(F_grid: Sequence[float], max_steps: int = DEFAULT_MAX_STEPS) -> list[SweepRow]:
    """Optimized log10 L for Werner inputs: proposed pipeline vs repeated DEJ steps."""
    prop, dej = proposed_step(), dej_step()
    rows = []
    for F in F_grid:
        if not 0.5 < F < 1.0:
            raise ValueError(f"sweep fidelities must lie in (1/2, 1), got {F}")
        p0 = werner(F)
        a = optimize_schedule(p0, max_steps, main=prop, final=dej, allow_final=True)
        b = optimize_schedule(p0, max_steps, main=dej, allow_final=False)
        rows.append(SweepRow(F, a.result.log10L, b.result.log10L, a.repeats, b.repeats, a.final_extra))
    return rows


def format_number(x: float) -> str:
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return format(x, ".12g")


SWEEP_HEADER = "F,log10L_proposed,log10L_dej,k_proposed,k_dej"
SWEEP_COMMENT = (
    "# proposed: k_proposed n=4 steps, optionally one final n=2 step, reordering, hashing;"
    " dej: k_dej n=2 steps, reordering, hashing; each side optimized separately"
)


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_COMMENT, SWEEP_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [format_number(r.F), format_number(r.log10L_proposed), format_number(r.log10L_dej),
                 str(r.k_proposed), str(r.k_dej)]
            )
        )
    return "\n".join(lines) + "\n"
