"""Self-checks bundled behind ``belldistill verify``."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Mapping

from .bellstate import werner
from .gf2core import (
    PauliVector,
    is_symplectic,
    pair_swap,
    rref_bits,
    symplectic_inverse,
    symplectic_product,
)
from .pipeline import figure1_sweep, hashing_yield
from .protocol import (
    PROPOSED_LISTED_SPAN,
    apply_step,
    brute_force_oracle,
    dej_step,
    kept_mass,
    proposed_step,
    random_state,
    random_step,
    resolve_proposed_reading,
    s_sum,
)
from .search import best_step
from .symplectic import (
    GAMMA,
    Transposition,
    cnot_factorization_holds,
    compose_ops,
    decompose_two_qubit,
    enumerate_sp4,
    random_symplectic,
    s6_verify,
    unitary_cross_check,
)

WERNER_GRID = (0.55, 0.65, 0.75, 0.85, 0.95)
SWEEP_GRID = tuple(0.55 + 0.05 * i for i in range(9))


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def check_group_count() -> tuple[bool, str]:
    group = enumerate_sp4()
    members = set(group)
    ok = len(group) == 720 and len(members) == 720 and all(is_symplectic(a) for a in group)
    rng = random.Random(1)
    for _ in range(200):
        a, b = rng.choice(group), rng.choice(group)
        ok &= symplectic_product(a, b) in members and symplectic_inverse(a) in members
    return ok, f"{len(group)} matrices"


def check_s6(table: Mapping[int, Transposition] = GAMMA) -> tuple[bool, str]:
    return s6_verify(table), "15 x 15 conjugation identity"


def check_cnot() -> tuple[bool, str]:
    return cnot_factorization_holds(), "T(1000) T(1001) T(0001) on 16 vectors"


def _oracle_instances():
    rng = random.Random(2024)
    for F in WERNER_GRID:
        for step in (dej_step(), proposed_step()):
            yield werner(F), step
    for _ in range(500):
        n = rng.choice((2, 3, 4))
        m = rng.randint(1, n - 1)
        yield random_state(rng), random_step(n, m, rng)


def check_oracle() -> tuple[bool, str]:
    worst = 0.0
    count = 0
    for p, step in _oracle_instances():
        a, b = apply_step(p, step), brute_force_oracle(p, step)
        worst = max(worst, abs(a.success - b.success), *(abs(x - y) for x, y in zip(a.state.q, b.state.q)))
        count += 1
    return worst <= 1e-12, f"{count} instances, max deviation {worst:.2e}"


def check_success_identity() -> tuple[bool, str]:
    worst = 0.0
    for p, step in _oracle_instances():
        k = step.n - step.m
        worst = max(worst, abs(s_sum(p, step) - 2**k * kept_mass(p, step)))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def check_dej_numbers() -> tuple[bool, str]:
    out = brute_force_oracle(werner(0.8), dej_step())
    ok = abs(out.success - 173 / 225) <= 1e-12 and abs(out.fidelity - 145 / 173) <= 1e-12
    return ok, f"success {out.success:.12g}, fidelity {out.fidelity:.12g}"


def check_decomposition() -> tuple[bool, str]:
    rng = random.Random(7)
    ok = True
    for n in (2, 3, 4):
        for _ in range(100):
            a = random_symplectic(n, rng)
            ok &= compose_ops(decompose_two_qubit(a), n) == a
    return ok, "300 random matrices"


def check_unitary() -> tuple[bool, str]:
    ok = all(unitary_cross_check(PauliVector(u, 2)) for u in range(1, 16))
    return ok, "15 generators, n=2"


def check_proposed_reading() -> tuple[bool, str]:
    res = resolve_proposed_reading()
    hits = [k for k, v in res.items() if v]
    # S of a step comes from rows of A P, i.e. the listed vectors pair-swapped
    swapped = rref_bits([pair_swap(v, 8) for v in PROPOSED_LISTED_SPAN], 8)
    ok = hits == ["written:A"] and proposed_step().space == swapped
    return ok, f"matching reading: {', '.join(hits) or 'none'}"


def check_sweep_dominance() -> tuple[bool, str]:
    rows = figure1_sweep(SWEEP_GRID)
    finite = all(math.isfinite(r.log10L_proposed) and math.isfinite(r.log10L_dej) for r in rows)
    bad = [r.F for r in rows if not r.log10L_proposed <= r.log10L_dej]
    if bad:
        return False, "dominance fails at F=" + ",".join(f"{f:.2f}" for f in bad)
    return finite, "proposed <= dej on all points"


def check_dej_optimal() -> tuple[bool, str]:
    rng = random.Random(11)
    inputs = [random_state(rng, ordered=True, entangled=True) for _ in range(10)]
    inputs += [werner(F) for F in WERNER_GRID]
    ok = True
    for p in inputs:
        report = best_step(p, 2, 1, full_outcomes=0)
        top = report.best[0].score
        dej = next(e for e in report.best if e.basis == (0b1111,))
        ok &= dej.score >= top - 1e-12
    return ok, f"{len(inputs)} ordered inputs with p00 > 1/2"


def hashing_threshold(lo: float = 0.5, hi: float = 1.0, iters: int = 60) -> float:
    for _ in range(iters):
        mid = (lo + hi) / 2
        if hashing_yield(werner(mid)) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def check_hashing_threshold() -> tuple[bool, str]:
    f = hashing_threshold()
    return 0.80 < f < 0.82, f"threshold F* = {f:.6f}"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "1 group count": check_group_count,
    "2 S6 isomorphism": check_s6,
    "3 CNOT factorization": check_cnot,
    "4 closed form vs oracle": check_oracle,
    "5 success identity": check_success_identity,
    "6 DEJ numbers": check_dej_numbers,
    "7 decomposition round-trip": check_decomposition,
    "8 unitary cross-check": check_unitary,
    "9 proposed-scheme reading": check_proposed_reading,
    "10 sweep dominance": check_sweep_dominance,
    "11 DEJ one-step optimality": check_dej_optimal,
    "12 hashing threshold": check_hashing_threshold,
}


def run_checks(gamma: Mapping[int, Transposition] | None = None) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        if fn is check_s6 and gamma is not None:
            ok, detail = check_s6(gamma)
        else:
            ok, detail = fn()
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out


def perturbed_gamma() -> dict[int, Transposition]:
    """Gamma table with two entries swapped (negative control)."""
    table = dict(GAMMA)
    table[0b0001], table[0b0010] = table[0b0010], table[0b0001]
    return table
