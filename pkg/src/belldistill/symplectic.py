"""Group structure of local Bell-product permutations.

Composition convention: a written sequence of generators ``[u1, u2, ..., uk]``
denotes the matrix product ``T(u1) @ T(u2) @ ... @ T(uk)``; the rightmost
factor acts first on a label vector. This is the same left-to-right order in
which the corresponding unitaries ``exp(i pi/4 sigma_u)`` are written.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf2core import (
    BitMatrix,
    ConstraintError,
    DimensionError,
    PauliVector,
    Subspace,
    SymplecticMatrix,
    _trusted,
    affine_ascending,
    bit_at,
    inner,
    kernel_of_inner,
    pair_swap,
    rref_bits,
    solve_inner,
    symplectic_inverse,
    symplectic_product,
    unit,
)

# rightmost factor applies first; checked by the CNOT and proposed-step tests
RIGHTMOST_FIRST = True


class InvalidGeneratorError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Transvection:
    u: PauliVector

    def __post_init__(self) -> None:
        if not self.u.bits:
            raise InvalidGeneratorError("transvection vector must be nonzero")

    def __call__(self, x: PauliVector) -> PauliVector:
        return PauliVector(apply_transvection(self.u.bits, x.bits, x.width), x.n)


def apply_transvection(u: int, x: int, width: int) -> int:
    """``x + u (u^T P x)``."""
    return x ^ u if inner(u, x, width) else x


def _transvection_rows(u: int, width: int) -> tuple[int, ...]:
    pu = pair_swap(u, width)
    return tuple(
        unit(i, width) ^ (pu if bit_at(u, i, width) else 0) for i in range(1, width + 1)
    )


def transvection_matrix(t: Transvection | PauliVector | int, n: int | None = None) -> SymplecticMatrix:
    """``I + u u^T P`` over Z2."""
    if isinstance(t, Transvection):
        t = t.u
    if isinstance(t, PauliVector):
        if n is not None and n != t.n:
            raise DimensionError("pair count does not match the generator length")
        u, n = t.bits, t.n
    else:
        if n is None:
            raise DimensionError("pair count required for a raw generator")
        u = t
    if not u:
        raise InvalidGeneratorError("transvection vector must be nonzero")
    if u >> (2 * n):
        raise DimensionError("generator longer than 2n bits")
    return _trusted(_transvection_rows(u, 2 * n), 2 * n)


def _left_mul_transvection(u: int, rows: Sequence[int], width: int) -> tuple[int, ...]:
    # (I + u u^T P) M: add the row vector u^T P M to every row i with u_i = 1
    pu = pair_swap(u, width)
    v = 0
    for i in range(width):
        if pu >> (width - 1 - i) & 1:
            v ^= rows[i]
    return tuple(r ^ v if u >> (width - 1 - i) & 1 else r for i, r in enumerate(rows))


def compose_transvections(us: Iterable[int | PauliVector], n: int) -> SymplecticMatrix:
    """Matrix of the written product ``T(u1) T(u2) ... T(uk)``."""
    width = 2 * n
    rows = tuple(unit(i, width) for i in range(1, width + 1))
    for u in reversed(list(us)):
        bits = u.bits if isinstance(u, PauliVector) else u
        if not bits:
            raise InvalidGeneratorError("transvection vector must be nonzero")
        rows = _left_mul_transvection(bits, rows, width)
    return _trusted(rows, width)


def from_columns(cols: Sequence[int], width: int) -> BitMatrix:
    rows = []
    for i in range(1, width + 1):
        r = 0
        for c in cols:
            r = (r << 1) | bit_at(c, i, width)
        rows.append(r)
    return BitMatrix(tuple(rows), len(cols))


def columns(a: BitMatrix) -> list[int]:
    return list(a.transpose().rows)


def enumerate_symplectic(n: int) -> list[SymplecticMatrix]:
    """Every 2n x 2n symplectic matrix, built column pair by column pair.

    Column ``2k+1`` commutes with all earlier columns except that column
    ``2k+2`` must anticommute with it. Feasible only for n <= 2.
    """
    if n < 1 or n > 2:
        raise DimensionError("exhaustive enumeration supported for n in {1, 2}")
    width = 2 * n
    out: list[SymplecticMatrix] = []
    nonzero = range(1, 1 << width)

    def extend(cols: list[int]) -> None:
        j = len(cols)
        if j == width:
            out.append(_trusted(from_columns(cols, width).rows, width))
            return
        for c in nonzero:
            ok = True
            for i, prev in enumerate(cols):
                expected = 1 if (j % 2 == 1 and i == j - 1) else 0
                if inner(prev, c, width) != expected:
                    ok = False
                    break
            if ok and (j % 2 == 1 or c not in cols):
                extend(cols + [c])

    extend([])
    return out


@lru_cache(maxsize=None)
def _sp4() -> tuple[SymplecticMatrix, ...]:
    return tuple(enumerate_symplectic(2))


def enumerate_sp4() -> list[SymplecticMatrix]:
    """The 720 elements of Sp(4, 2)."""
    return list(_sp4())


def group_order(n: int) -> int:
    order = 2 ** (n * n)
    for i in range(1, n + 1):
        order *= 4**i - 1
    return order


def random_symplectic(n: int, rng: random.Random, length: int | None = None) -> SymplecticMatrix:
    """Product of random transvections; good enough mixing for tests."""
    width = 2 * n
    length = 4 * width * width if length is None else length
    us = [rng.randrange(1, 1 << width) for _ in range(length)]
    return compose_transvections(us, n)


# -- S6 isomorphism ---------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class Transposition:
    i: int
    j: int

    def __post_init__(self) -> None:
        if not (1 <= self.i <= 6 and 1 <= self.j <= 6) or self.i == self.j:
            raise ValueError(f"invalid transposition ({self.i},{self.j})")
        if self.i > self.j:
            lo, hi = self.j, self.i
            object.__setattr__(self, "i", lo)
            object.__setattr__(self, "j", hi)

    def __call__(self, k: int) -> int:
        return self.j if k == self.i else self.i if k == self.j else k

    def conjugate(self, p: Transposition) -> Transposition:
        """``q p q^-1`` with ``q = self``; again a transposition."""
        return Transposition(self(p.i), self(p.j))

    def __str__(self) -> str:
        return f"p{self.i}{self.j}"


GAMMA: dict[int, Transposition] = {
    0b0001: Transposition(5, 6), 0b0010: Transposition(4, 6), 0b0011: Transposition(4, 5),
    0b0100: Transposition(2, 3), 0b0101: Transposition(1, 4), 0b0110: Transposition(1, 5),
    0b0111: Transposition(1, 6), 0b1000: Transposition(1, 3), 0b1001: Transposition(2, 4),
    0b1010: Transposition(2, 5), 0b1011: Transposition(2, 6), 0b1100: Transposition(1, 2),
    0b1101: Transposition(3, 4), 0b1110: Transposition(3, 5), 0b1111: Transposition(3, 6),
}


def s6_gamma(u: PauliVector | int, table: Mapping[int, Transposition] = GAMMA) -> Transposition:
    bits = u.bits if isinstance(u, PauliVector) else u
    if isinstance(u, PauliVector) and u.n != 2:
        raise DimensionError("gamma is defined on 4-bit vectors")
    if not bits:
        raise InvalidGeneratorError("gamma is undefined on 0000")
    return table[bits]


def s6_verify(table: Mapping[int, Transposition] = GAMMA) -> bool:
    """Check gamma(pi_u(x)) == chi_gamma(u)(gamma(x)) on all 15 x 15 pairs."""
    if sorted(table) != list(range(1, 16)) or len(set(table.values())) != 15:
        return False
    for u in range(1, 16):
        q = table[u]
        for x in range(1, 16):
            if table[apply_transvection(u, x, 4)] != q.conjugate(table[x]):
                return False
    return True


# -- isotropic completion ---------------------------------------------------


def complete_rows(fixed: Mapping[int, int], n: int) -> SymplecticMatrix:
    """Symplectic matrix with prescribed rows (1-indexed position -> bits).

    Free rows are filled top to bottom with the lexicographically smallest
    vector meeting the row-pairing relations ``inner(row_i, row_j) = P_ij``.
    """
    width = 2 * n
    for pos, v in fixed.items():
        if not 1 <= pos <= width:
            raise DimensionError(f"row position {pos} outside 1..{width}")
        if not v or v >> width:
            raise DimensionError(f"invalid row vector for position {pos}")
    if not fixed:
        return SymplecticMatrix.identity(width)

    def partner(i: int) -> int:
        return i + 1 if i % 2 else i - 1

    items = sorted(fixed.items())
    for a, (pa, va) in enumerate(items):
        for pb, vb in items[a + 1:]:
            if inner(va, vb, width) != (1 if partner(pa) == pb else 0):
                raise ConstraintError(
                    f"prescribed rows {pa} and {pb} violate the symplectic pairing"
                )
    if rref_bits(fixed.values(), width).dim != len(fixed):
        raise ConstraintError("prescribed rows are linearly dependent")

    rows: dict[int, int] = dict(fixed)
    for i in range(1, width + 1):
        if i in rows:
            continue
        known = sorted(rows)
        cons = [rows[j] for j in known]
        targets = [1 if j == partner(i) else 0 for j in known]
        base = solve_inner(cons, targets, width)
        assert base is not None, "symplectic completion failed"
        ker = kernel_of_inner(cons, width)
        span = rref_bits(cons, width)
        choice = None
        for v in affine_ascending(base, ker):
            if v and not span.contains(v):
                choice = v
                break
        assert choice is not None, "symplectic completion failed"
        rows[i] = choice
    return SymplecticMatrix([rows[i] for i in range(1, width + 1)], width)


def complete_isotropic(space: Subspace, row_positions: Sequence[int]) -> SymplecticMatrix:
    """Symplectic matrix whose rows at ``row_positions`` are ``space.basis`` in order."""
    if len(row_positions) != space.dim:
        raise DimensionError("need one row position per basis vector")
    if len(set(row_positions)) != len(row_positions):
        raise DimensionError("row positions must be distinct")
    if not space.is_isotropic():
        raise ConstraintError("subspace is not isotropic")
    return complete_rows(dict(zip(row_positions, space.basis)), space.n)


# -- two-qubit decomposition -------------------------------------------------


@dataclass(frozen=True, slots=True)
class TwoQubitOp:
    """A 4x4 symplectic block acting on pairs ``k`` and ``l`` of ``n``.

    For ``n == 1`` the block is the whole 2x2 matrix and ``l`` is None.
    """

    m4: SymplecticMatrix
    k: int
    l: int | None
    n: int

    def __post_init__(self) -> None:
        if self.l is None:
            if self.n != 1 or self.m4.ncols != 2:
                raise DimensionError("single-pair op only valid for n == 1")
            return
        if self.m4.ncols != 4:
            raise DimensionError("two-qubit op needs a 4x4 block")
        if self.k == self.l or not (0 <= self.k < self.n and 0 <= self.l < self.n):
            raise DimensionError(f"invalid pair indices ({self.k}, {self.l}) for n={self.n}")

    def positions(self) -> list[int]:
        if self.l is None:
            return [1, 2]
        return [2 * self.k + 1, 2 * self.k + 2, 2 * self.l + 1, 2 * self.l + 2]

    def embed(self) -> SymplecticMatrix:
        width = 2 * self.n
        if self.l is None:
            return self.m4
        pos = self.positions()
        rows = [unit(i, width) for i in range(1, width + 1)]
        for a, pa in enumerate(pos):
            r = 0
            for b, pb in enumerate(pos):
                if self.m4.entry(a + 1, b + 1):
                    r |= unit(pb, width)
            rows[pa - 1] = r
        return _trusted(rows, width)


def _block(c: int, pos: Sequence[int], width: int) -> int:
    v = 0
    for p in pos:
        v = (v << 1) | bit_at(c, p, width)
    return v


@lru_cache(maxsize=None)
def _find_sp4(constraints: tuple[tuple[int, int], ...]) -> SymplecticMatrix:
    for g in _sp4():
        if all(g.apply(src) == dst for src, dst in constraints):
            return g
    raise AssertionError(f"no Sp(4,2) element satisfies {constraints}")


def decompose_two_qubit(a: SymplecticMatrix) -> list[TwoQubitOp]:
    """Factor ``a`` into embedded 4x4 symplectic blocks.

    Returns ``[O1, ..., Ot]`` with ``O1.embed() @ ... @ Ot.embed() == a``.
    Each column pair is driven to the matching identity columns: first the
    odd column's 4-bit blocks are moved into pair ``c`` (``-> 1000``), then
    the even column's blocks are mapped to ``0100`` while fixing ``1000``.
    """
    n = a.n
    width = 2 * n
    if n == 1:
        if a == SymplecticMatrix.identity(2):
            return []
        return [TwoQubitOp(a, 0, None, 1)]

    cols = columns(a)
    applied: list[TwoQubitOp] = []

    def act(op: TwoQubitOp) -> None:
        e = op.embed()
        for idx, c in enumerate(cols):
            cols[idx] = e.apply(c)
        applied.append(op)

    for c in range(n):
        if c < n - 1:
            partners = [(l, ()) for l in range(c + 1, n)]
        else:
            # last pair: act on (c, c-1) while fixing pair c-1 entirely
            partners = [(c - 1, ((0b0010, 0b0010), (0b0001, 0b0001)))]
        for l, keep in partners:
            pos = [2 * c + 1, 2 * c + 2, 2 * l + 1, 2 * l + 2]
            blk = _block(cols[2 * c], pos, width)
            if blk and blk != 0b1000:
                g = _find_sp4(((blk, 0b1000),) + keep)
                act(TwoQubitOp(g, c, l, n))
        for l, keep in partners:
            pos = [2 * c + 1, 2 * c + 2, 2 * l + 1, 2 * l + 2]
            blk = _block(cols[2 * c + 1], pos, width)
            if blk != 0b0100:
                g = _find_sp4(((0b1000, 0b1000), (blk, 0b0100)) + keep)
                act(TwoQubitOp(g, c, l, n))

    assert cols == [unit(i, width) for i in range(1, width + 1)], "reduction incomplete"
    return [TwoQubitOp(symplectic_inverse(op.m4), op.k, op.l, n) for op in applied]


def compose_ops(ops: Sequence[TwoQubitOp], n: int) -> SymplecticMatrix:
    out = SymplecticMatrix.identity(2 * n)
    for op in ops:
        out = symplectic_product(out, op.embed())
    return out


# -- CNOT ---------------------------------------------------------------------

# CNOT = e^{-i pi/4 s_1000} e^{i pi/4 s_1001} e^{-i pi/4 s_0001} up to phase
CNOT_FACTORS: tuple[int, ...] = (0b1000, 0b1001, 0b0001)


def cnot_symplectic() -> SymplecticMatrix:
    """Binary CNOT action, control pair 1, target pair 2, on (z1, x1, z2, x2)."""
    def act(x: int) -> int:
        z1, x1, z2, x2 = (x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1
        return ((z1 ^ z2) << 3) | (x1 << 2) | (z2 << 1) | (x1 ^ x2)

    return SymplecticMatrix(from_columns([act(unit(j, 4)) for j in range(1, 5)], 4))


def cnot_factorization_holds(factors: Sequence[int] = CNOT_FACTORS) -> bool:
    """Exhaustive 16-vector comparison of the generator product with CNOT."""
    composed = compose_transvections(factors, 2)
    target = cnot_symplectic()
    return all(composed.apply(x) == target.apply(x) for x in range(16))


# -- bounded generator search ------------------------------------------------


def local_generators(n: int) -> list[int]:
    """Nonzero u supported on at most two pairs, ascending."""
    width = 2 * n
    out = []
    for u in range(1, 1 << width):
        support = sum(1 for j in range(n) if (u >> (2 * j)) & 3)
        if support <= 2:
            out.append(u)
    return out


def generator_sequence_search(a: SymplecticMatrix, max_len: int) -> list[Transvection] | None:
    """Shortest generator word equal to ``a``, lexicographically smallest.

    Meet-in-the-middle: a word of length L is split into a left half of
    length ceil(L/2) and a right half; right-half products are tabulated.
    """
    n = a.n
    width = 2 * n
    ident = tuple(unit(i, width) for i in range(1, width + 1))
    if a.rows == ident:
        return []
    gens = local_generators(n)

    layers: list[dict[tuple[int, ...], tuple[int, ...]]] = [{ident: ()}]

    def layer(b: int) -> dict[tuple[int, ...], tuple[int, ...]]:
        while len(layers) <= b:
            prev = layers[-1]
            nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
            # prepend-first iteration keeps the smallest word per product
            for g in gens:
                for rows, word in prev.items():
                    key = _left_mul_transvection(g, rows, width)
                    if key not in nxt:
                        nxt[key] = (g,) + word
            layers.append(nxt)
        return layers[b]

    def to_result(word: Iterable[int]) -> list[Transvection]:
        return [Transvection(PauliVector(u, n)) for u in word]

    for length in range(1, max_len + 1):
        left_len = (length + 1) // 2
        right = layer(length - left_len)
        for left in itertools.product(gens, repeat=left_len):
            rows = a.rows
            for g in left:
                rows = _left_mul_transvection(g, rows, width)
            if rows in right:
                return to_result(left + right[rows])
    return None


# -- complex unitary cross-check --------------------------------------------

_PAULI = {
    0b00: np.eye(2, dtype=complex),
    0b01: np.array([[0, 1], [1, 0]], dtype=complex),
    0b10: np.array([[1, 0], [0, -1]], dtype=complex),
    0b11: np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli_matrix(x: PauliVector) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for j in range(x.n):
        out = np.kron(out, _PAULI[x.pair(j)])
    return out


def transvection_unitary(u: PauliVector) -> np.ndarray:
    """``exp(i pi/4 sigma_u) = (I + i sigma_u)/sqrt(2)``."""
    s = pauli_matrix(u)
    return (np.eye(s.shape[0]) + 1j * s) / np.sqrt(2)


def unitary_cross_check(u: PauliVector, tol: float = 1e-10) -> bool:
    """Conjugation by U_u maps every sigma_x to +-sigma_{pi_u(x)}."""
    if u.n > 2:
        raise DimensionError("unitary cross-check limited to n <= 2")
    if not u.bits:
        raise InvalidGeneratorError("transvection vector must be nonzero")
    uu = transvection_unitary(u)
    dim = uu.shape[0]
    if not np.allclose(uu @ uu.conj().T, np.eye(dim), atol=1e-12):
        return False
    for xb in range(1 << u.width):
        x = PauliVector(xb, u.n)
        conj = uu @ pauli_matrix(x) @ uu.conj().T
        target = pauli_matrix(PauliVector(apply_transvection(u.bits, xb, u.width), u.n))
        phase = np.trace(target.conj().T @ conj) / dim
        if not (abs(phase - 1) < tol or abs(phase + 1) < tol):
            return False
        if not np.allclose(conj, phase * target, atol=tol):
            return False
    return True
