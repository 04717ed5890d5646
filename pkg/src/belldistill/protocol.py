"""One distillation step: permute n Bell pairs locally, test n-m pairs, keep m.

A step is stored through ``B = A P``. Only rows of B enter the closed-form
output: the tested pairs' flip bits are ``inner(row_i(B), x)`` for the even
rows ``2m+2, ..., 2n``, which span the isotropic space S, and the kept
pairs' labels are ``inner(row_i(B), x)`` for rows ``1..2m``.

Output label y selects the coset ``S + shift(y)`` with
``shift(y) = sum_i y_i row_{swap(i)}(B)`` over the first 2m rows, where
``swap`` exchanges 2j-1 and 2j. This is ``P A^T P y_bar`` written out via
``inner(row_i(B), row_j(B)) = P_ij``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .bellstate import BellDiagonal, JointBellState, SVector, _label_product, s_of_p
from .gf2core import (
    ConstraintError,
    DimensionError,
    PauliVector,
    Subspace,
    SymplecticMatrix,
    inner,
    pair_swap,
    rref_bits,
    symplectic_form,
    to_bits,
)
from .symplectic import complete_rows, compose_transvections

ORACLE_MAX_PAIRS = 8
SUCCESS_TOL = 1e-15

# generators realizing the proposed n=4 permutation, in written order
PROPOSED_GENERATORS: tuple[int, ...] = (0b10010000, 0b01000001, 0b10001100, 0b00011000)
# span quoted for the proposed scheme; these are rows 4, 6, 8 of A (not of B = AP)
PROPOSED_LISTED_SPAN: tuple[int, ...] = (0b10111110, 0b01101100, 0b11101011)
PROPOSED_LISTED_ROWS_A: tuple[int, ...] = (0b01100010, 0b10101010)


class DegenerateInputError(ValueError):
    """The kept branch has zero probability, so the output state is undefined."""


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class DistillationStep:
    n: int
    m: int
    b: SymplecticMatrix
    name: str = ""
    space: Subspace = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.m < self.n:
            raise DimensionError(f"need 1 <= m < n, got n={self.n}, m={self.m}")
        if self.b.ncols != 2 * self.n:
            raise DimensionError("matrix size does not match n")
        rows = [self.b.row(i) for i in range(2 * self.m + 2, 2 * self.n + 1, 2)]
        object.__setattr__(self, "space", rref_bits(rows, 2 * self.n))

    @property
    def width(self) -> int:
        return 2 * self.n

    @property
    def a(self) -> SymplecticMatrix:
        """The label permutation matrix A = B P."""
        return SymplecticMatrix(_times_p(self.b.rows, self.width), self.width)

    def output_rows(self) -> list[int]:
        return [self.b.row(i) for i in range(1, 2 * self.m + 1)]

    def shift(self, y: int) -> int:
        """Coset representative for output label ``y`` (2m bits)."""
        w2m = 2 * self.m
        out = 0
        for i in range(1, w2m + 1):
            if (y >> (w2m - i)) & 1:
                partner = i + 1 if i % 2 else i - 1
                out ^= self.b.row(partner)
        return out

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [to_bits(v, self.width) for v in self.space.basis]
        lines += [to_bits(v, self.width) for v in self.output_rows()]
        return "\n".join(lines) + "\n"


def _times_p(rows: Sequence[int], width: int) -> tuple[int, ...]:
    return tuple(pair_swap(r, width) for r in rows)


@dataclass(frozen=True, slots=True)
class StepOutcome:
    state: JointBellState
    success: float

    @property
    def fidelity(self) -> float:
        return self.state.q[0]


def _check_basis(n: int, m: int, basis: Sequence[int]) -> None:
    width = 2 * n
    if len(basis) != n - m:
        raise ConstraintError(f"need {n - m} basis vectors, got {len(basis)}")
    if any(v <= 0 or v >> width for v in basis):
        raise DimensionError(f"basis vectors must be nonzero {width}-bit vectors")
    if rref_bits(basis, width).dim != len(basis):
        raise ConstraintError("basis vectors are linearly dependent")
    for i, u in enumerate(basis):
        for v in basis[i + 1:]:
            if inner(u, v, width):
                raise ConstraintError("basis vectors are not mutually commuting")


def make_step(
    n: int,
    m: int,
    basis: Sequence[PauliVector | int],
    output_rows: Sequence[PauliVector | int] = (),
    name: str = "",
) -> DistillationStep:
    """Complete an isotropic basis (and optional kept-pair rows) to a step."""
    raw = [v.bits if isinstance(v, PauliVector) else v for v in basis]
    _check_basis(n, m, raw)
    fixed = {2 * m + 2 + 2 * i: v for i, v in enumerate(raw)}
    outs = [v.bits if isinstance(v, PauliVector) else v for v in output_rows]
    if len(outs) > 2 * m:
        raise DimensionError(f"at most {2 * m} output rows")
    fixed.update({i + 1: v for i, v in enumerate(outs)})
    return DistillationStep(n, m, complete_rows(fixed, n), name)


def parse_step(text: str, name: str = "") -> DistillationStep:
    """Read "n m", then n-m S rows, then up to 2m output rows."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty step description")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header {lines[0]!r}; expected 'n m'") from exc
    rows = []
    for ln in lines[1:]:
        ln = ln.replace(" ", "")
        if set(ln) - {"0", "1"} or len(ln) != 2 * n:
            raise ValueError(f"bad row {ln!r}; expected {2 * n} bits")
        rows.append(int(ln, 2))
    k = n - m
    return make_step(n, m, rows[:k], rows[k:], name=name)


def _success_from_space(s: SVector, space: Subspace, n: int, k: int) -> float:
    return math.fsum(_label_product(s.s, x, n) for x in space.elements()) / (1 << k)


def apply_step(p: BellDiagonal, step: DistillationStep) -> StepOutcome:
    """Closed-form output of ``step`` on n i.i.d. copies of ``p``."""
    n, m = step.n, step.m
    k = n - m
    s = s_of_p(p)
    success = _success_from_space(s, step.space, n, k)
    if success <= SUCCESS_TOL:
        raise DegenerateInputError("the tested pairs never pass on this input")
    elems = step.space.elements()
    coeffs = []
    for y in range(4**m):
        sh = step.shift(y)
        mass = math.fsum(_label_product(p.p, x ^ sh, n) for x in elems)
        coeffs.append(mass / success)
    return StepOutcome(JointBellState(m, tuple(coeffs)), success)


def step_scores(p: BellDiagonal, space: Subspace, n: int, m: int) -> tuple[float, float]:
    """(fidelity, success) from S alone; no full output state."""
    k = n - m
    s = s_of_p(p)
    success = _success_from_space(s, space, n, k)
    if success <= SUCCESS_TOL:
        return 0.0, success
    num = math.fsum(_label_product(p.p, x, n) for x in space.elements())
    return num / success, success


def brute_force_oracle(p: BellDiagonal, step: DistillationStep) -> StepOutcome:
    """Permute every one of the 4**n Bell products and test the pairs directly."""
    n, m = step.n, step.m
    if n > ORACLE_MAX_PAIRS:
        raise ResourceError(f"oracle limited to n <= {ORACLE_MAX_PAIRS}")
    width = 2 * n
    a = step.a
    # flip bits of pairs m+1..n sit at positions 2m+2, ..., 2n
    tested = 0
    for pos in range(2 * m + 2, width + 1, 2):
        tested |= 1 << (width - pos)
    low = width - 2 * m
    terms: list[list[float]] = [[] for _ in range(4**m)]
    for x in range(1 << width):
        z = a.apply(x)
        if z & tested:
            continue
        w = _label_product(p.p, x, n)
        if w:
            terms[z >> low].append(w)
    acc = [math.fsum(t) for t in terms]
    success = math.fsum(acc)
    if success <= SUCCESS_TOL:
        raise DegenerateInputError("the tested pairs never pass on this input")
    return StepOutcome(JointBellState(m, tuple(v / success for v in acc)), success)


def kept_mass(p: BellDiagonal, step: DistillationStep) -> float:
    """Total weight of labels commuting with all of S, by direct summation."""
    width = step.width
    basis = step.space.basis
    return math.fsum(
        _label_product(p.p, x, step.n)
        for x in range(1 << width)
        if not any(inner(v, x, width) for v in basis)
    )


def s_sum(p: BellDiagonal, step: DistillationStep) -> float:
    s = s_of_p(p)
    return math.fsum(_label_product(s.s, x, step.n) for x in step.space.elements())


def dej_step() -> DistillationStep:
    """Two-copy step testing the parity 11 11 (the DEJ scheme)."""
    return make_step(2, 1, [0b1111], name="dej")


def proposed_a() -> SymplecticMatrix:
    return compose_transvections(PROPOSED_GENERATORS, 4)


def proposed_step() -> DistillationStep:
    """Four-copy, one-output step realized by four local generators."""
    a = proposed_a()
    b = SymplecticMatrix(a @ symplectic_form(4))
    return DistillationStep(4, 1, b, "proposed")


def resolve_proposed_reading() -> dict[str, bool]:
    """Which of A or AP, under which generator order, carries the quoted span."""
    target = rref_bits(PROPOSED_LISTED_SPAN, 8)
    out = {}
    for order, gens in (("written", PROPOSED_GENERATORS), ("reversed", PROPOSED_GENERATORS[::-1])):
        a = compose_transvections(gens, 4)
        ap = _times_p(a.rows, 8)
        out[f"{order}:A"] = rref_bits([a.row(i) for i in (4, 6, 8)], 8) == target
        out[f"{order}:AP"] = rref_bits([ap[i - 1] for i in (4, 6, 8)], 8) == target
    return out


NAMED_STEPS = {"dej": dej_step, "proposed": proposed_step}


def random_step(n: int, m: int, rng) -> DistillationStep:
    """Step from a random symplectic matrix (random S and output rows)."""
    from .symplectic import random_symplectic

    return DistillationStep(n, m, random_symplectic(n, rng), "random")


def random_state(rng, ordered: bool = False, entangled: bool = False) -> BellDiagonal:
    """Random Bell-diagonal state; ``entangled`` rejects draws with p00 <= 1/2."""
    while True:
        w = [rng.expovariate(1.0) for _ in range(4)]
        if ordered:
            w.sort(reverse=True)
        t = math.fsum(w)
        if not entangled or w[0] > t / 2:
            break
    p = [v / t for v in w[:3]]
    return BellDiagonal(tuple(p) + (1.0 - math.fsum(p),))
