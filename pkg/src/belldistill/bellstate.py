"""Bell-diagonal states, the signed s-transform, and single-pair relabelings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .gf2core import PauliVector, inner

SUM_TOL = 1e-12

# rows of the +-1 matrix mapping (p00, p01, p10, p11) to (s00, s01, s10, s11)
_SIGNS = (
    (1, 1, 1, 1),
    (1, 1, -1, -1),
    (1, -1, 1, -1),
    (1, -1, -1, 1),
)


class DomainError(ValueError):
    pass


def _check_distribution(values: Sequence[float], what: str) -> None:
    if any(v < -SUM_TOL or v > 1 + SUM_TOL or math.isnan(v) for v in values):
        raise DomainError(f"{what}: entries must lie in [0, 1], got {list(values)}")
    if abs(math.fsum(values) - 1.0) > SUM_TOL:
        raise DomainError(f"{what}: entries must sum to 1, got {math.fsum(values)!r}")


@dataclass(frozen=True, slots=True)
class BellDiagonal:
    """Weights on Phi+, Psi+, Phi-, Psi- (labels 00, 01, 10, 11)."""

    p: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.p)
        if len(p) != 4:
            raise DomainError("a Bell-diagonal state has four weights")
        _check_distribution(p, "Bell-diagonal state")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text: str) -> BellDiagonal:
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated weights, got {text!r}")
        return cls(tuple(float(s) for s in parts))

    @property
    def fidelity(self) -> float:
        return self.p[0]

    def __getitem__(self, label: int) -> float:
        return self.p[label]

    def __str__(self) -> str:
        return ",".join(format(v, ".12g") for v in self.p)


@dataclass(frozen=True, slots=True)
class SVector:
    s: tuple[float, float, float, float]

    def __getitem__(self, label: int) -> float:
        return self.s[label]


@dataclass(frozen=True, slots=True)
class JointBellState:
    """Distribution over the 4**m Bell products of m pairs, indexed by label bits."""

    m: int
    q: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("need at least one pair")
        q = tuple(float(v) for v in self.q)
        if len(q) != 4**self.m:
            raise DomainError(f"expected {4 ** self.m} weights, got {len(q)}")
        _check_distribution(q, "joint Bell state")
        object.__setattr__(self, "q", q)

    def __getitem__(self, label: int | PauliVector) -> float:
        if isinstance(label, PauliVector):
            label = label.bits
        return self.q[label]

    def to_single(self) -> BellDiagonal:
        if self.m != 1:
            raise DomainError("only a one-pair state reduces to BellDiagonal")
        return BellDiagonal(self.q)


def werner(f: float) -> BellDiagonal:
    """Werner state of fidelity ``f``.

    Values below 1/4 are accepted (the state is still a valid mixture) but
    then no longer have their largest weight on Phi+.
    """
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"Werner fidelity must lie in [0, 1], got {f}")
    r = (1.0 - f) / 3.0
    return BellDiagonal((f, r, r, r))


def s_of_p(p: BellDiagonal) -> SVector:
    return SVector(tuple(math.fsum(sg * v for sg, v in zip(row, p.p)) for row in _SIGNS))


def p_of_s(s: SVector) -> BellDiagonal:
    return BellDiagonal(tuple(math.fsum(sg * v for sg, v in zip(row, s.s)) / 4 for row in _SIGNS))


def _label_product(table: Sequence[float], x: int, n: int) -> float:
    out = 1.0
    for j in range(n):
        out *= table[(x >> (2 * (n - 1 - j))) & 3]
        if out == 0.0:
            break
    return out


def product_weight(p: BellDiagonal, x: PauliVector) -> float:
    """Probability of the Bell product ``x`` for i.i.d. copies of ``p``."""
    return _label_product(p.p, x.bits, x.n)


def product_s_weight(s: SVector, x: PauliVector) -> float:
    return _label_product(s.s, x.bits, x.n)


def s_weight_by_sum(p: BellDiagonal, x: PauliVector) -> float:
    """``sum_w (-1)^(x^T P w) p_w`` over all 4**n labels (exponential cost)."""
    n, width = x.n, x.width
    return math.fsum(
        (-1.0 if inner(x.bits, w, width) else 1.0) * _label_product(p.p, w, n)
        for w in range(1 << width)
    )


def _probabilities(state: BellDiagonal | JointBellState) -> tuple[float, ...]:
    return state.p if isinstance(state, BellDiagonal) else state.q


def fidelity(state: BellDiagonal | JointBellState) -> float:
    """Weight on the all-Phi+ product."""
    return _probabilities(state)[0]


def shannon_entropy(state: BellDiagonal | JointBellState) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    return -math.fsum(v * math.log2(v) for v in _probabilities(state) if v > 0.0)


@dataclass(frozen=True, slots=True)
class SinglePairAffineMap:
    """Label map ``x -> A1 x + b1`` on one pair; ``a1`` rows as 2-bit ints."""

    a1: tuple[int, int]
    b1: int

    def __post_init__(self) -> None:
        r0, r1 = self.a1
        det = ((r0 >> 1) & (r1 & 1)) ^ ((r0 & 1) & (r1 >> 1))
        if not det or not 0 <= self.b1 < 4:
            raise DomainError("single-pair map must be invertible with a 2-bit shift")

    def __call__(self, x: int) -> int:
        r0, r1 = self.a1
        y = (((r0 & x).bit_count() & 1) << 1) | ((r1 & x).bit_count() & 1)
        return y ^ self.b1

    def permutation(self) -> tuple[int, int, int, int]:
        return tuple(self(x) for x in range(4))

    def relabel(self, p: BellDiagonal) -> BellDiagonal:
        """Output state: weight of label x moves to label map(x)."""
        out = [0.0] * 4
        for x in range(4):
            out[self(x)] = p.p[x]
        return BellDiagonal(tuple(out))

    @property
    def is_identity(self) -> bool:
        return self.a1 == (0b10, 0b01) and self.b1 == 0


IDENTITY_MAP = SinglePairAffineMap((0b10, 0b01), 0)

_INVERTIBLE_2x2 = [
    (r0, r1)
    for r0, r1 in itertools.product(range(1, 4), repeat=2)
    if ((r0 >> 1) & (r1 & 1)) ^ ((r0 & 1) & (r1 >> 1))
]

AFFINE_MAPS: tuple[SinglePairAffineMap, ...] = tuple(
    SinglePairAffineMap(a, b) for a in _INVERTIBLE_2x2 for b in range(4)
)
_BY_PERMUTATION = {m.permutation(): m for m in AFFINE_MAPS}


def sort_descending(p: BellDiagonal) -> tuple[BellDiagonal, SinglePairAffineMap]:
    """Relabel so weights decrease from 00 to 11.

    Every permutation of the four labels is realized by exactly one of the 24
    affine maps. Ties keep their original relative order (stable sort).
    """
    order = sorted(range(4), key=lambda x: -p.p[x])
    perm = [0] * 4
    for target, source in enumerate(order):
        perm[source] = target
    amap = _BY_PERMUTATION[tuple(perm)]
    return amap.relabel(p), amap
