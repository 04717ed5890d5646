"""Bit-level linear algebra over Z2 with the pairwise symplectic form.

Vectors are Python ints holding ``2n`` bits. Position 1 (1-indexed, as in the
textual bitstring) is the most significant bit, so position ``i`` lives at bit
``width - i``. Pair ``j`` (0-indexed) occupies positions ``2j+1`` (phase bit)
and ``2j+2`` (flip bit). The string ``"0011"`` is ``int("0011", 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MAX_PAIRS = 64


class DimensionError(ValueError):
    """Operands have incompatible or invalid sizes."""


class ConstraintError(ValueError):
    """An algebraic precondition (symplectic, isotropic, independent) fails."""


def parity(x: int) -> int:
    return x.bit_count() & 1


def _even_mask(width: int) -> int:
    return int("01" * (width // 2), 2) if width else 0


def pair_swap(x: int, width: int) -> int:
    """Apply P: exchange the two bits of every pair."""
    ev = _even_mask(width)
    return ((x & ev) << 1) | ((x >> 1) & ev)


def inner(v: int, w: int, width: int) -> int:
    """Symplectic product ``v^T P w`` of raw bit vectors."""
    return parity(v & pair_swap(w, width))


def bit_at(x: int, pos: int, width: int) -> int:
    """Bit at 1-indexed position ``pos``."""
    return (x >> (width - pos)) & 1


def unit(pos: int, width: int) -> int:
    return 1 << (width - pos)


def to_bits(x: int, width: int) -> str:
    return format(x, f"0{width}b") if width else ""


def _check_width(width: int) -> None:
    if width <= 0 or width % 2:
        raise DimensionError(f"bit width must be a positive even number, got {width}")
    if width > 2 * MAX_PAIRS:
        raise DimensionError(f"at most {MAX_PAIRS} pairs supported")


@dataclass(frozen=True, slots=True)
class PauliVector:
    """Label of a product of ``n`` Bell states (equivalently a Pauli tensor)."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_width(2 * self.n)
        if self.bits < 0 or self.bits >> (2 * self.n):
            raise DimensionError(f"value {self.bits} does not fit in {2 * self.n} bits")

    @classmethod
    def from_str(cls, s: str) -> PauliVector:
        s = s.replace(" ", "").replace("_", "")
        if not s or set(s) - {"0", "1"} or len(s) % 2:
            raise ValueError(f"not an even-length bitstring: {s!r}")
        return cls(int(s, 2), len(s) // 2)

    @property
    def width(self) -> int:
        return 2 * self.n

    def pair(self, j: int) -> int:
        """Two-bit label (phase, flip) of pair ``j`` (0-indexed)."""
        return (self.bits >> (2 * (self.n - 1 - j))) & 3

    def __add__(self, other: PauliVector) -> PauliVector:
        if other.n != self.n:
            raise DimensionError("length mismatch")
        return PauliVector(self.bits ^ other.bits, self.n)

    __xor__ = __add__

    def __str__(self) -> str:
        return to_bits(self.bits, self.width)

    def __bool__(self) -> bool:
        return self.bits != 0


def symplectic_inner(v: PauliVector, w: PauliVector) -> int:
    if v.n != w.n:
        raise DimensionError(f"length mismatch: {v.width} vs {w.width}")
    return inner(v.bits, w.bits, v.width)


@dataclass(frozen=True, slots=True, eq=False)
class BitMatrix:
    """Dense matrix over Z2; each row is an int of ``ncols`` bits."""

    rows: tuple[int, ...]
    ncols: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.rows == other.rows and self.ncols == other.ncols

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols))

    def __post_init__(self) -> None:
        if not self.rows or self.ncols <= 0:
            raise DimensionError("empty matrix")
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise DimensionError(f"row {r} does not fit in {self.ncols} columns")

    @classmethod
    def identity(cls, width: int) -> BitMatrix:
        return cls(tuple(unit(i, width) for i in range(1, width + 1)), width)

    @classmethod
    def from_strings(cls, lines: Iterable[str]) -> BitMatrix:
        rows = [ln.strip().replace(" ", "") for ln in lines if ln.strip()]
        if not rows or any(set(r) - {"0", "1"} for r in rows):
            raise ValueError("matrix rows must be bitstrings")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged matrix")
        return cls(tuple(int(r, 2) for r in rows), width)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def entry(self, i: int, j: int) -> int:
        """Entry at 1-indexed (i, j)."""
        return bit_at(self.rows[i - 1], j, self.ncols)

    def row(self, i: int) -> int:
        """Row at 1-indexed position ``i`` as raw bits."""
        return self.rows[i - 1]

    def transpose(self) -> BitMatrix:
        m, w = self.nrows, self.ncols
        cols = []
        for j in range(1, w + 1):
            c = 0
            for r in self.rows:
                c = (c << 1) | bit_at(r, j, w)
            cols.append(c)
        return BitMatrix(tuple(cols), m)

    def apply(self, x: int) -> int:
        """Raw matrix-vector product."""
        out = 0
        for r in self.rows:
            out = (out << 1) | parity(r & x)
        return out

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        return mat_mul(self, other)

    def to_strings(self) -> list[str]:
        return [to_bits(r, self.ncols) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


def _mul_rows(a_rows: Sequence[int], a_cols: int, b_rows: Sequence[int]) -> tuple[int, ...]:
    out = []
    for r in a_rows:
        acc = 0
        k = 0
        while r:
            if r & 1:
                acc ^= b_rows[a_cols - 1 - k]
            r >>= 1
            k += 1
        out.append(acc)
    return tuple(out)


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return BitMatrix(_mul_rows(a.rows, a.ncols, b.rows), b.ncols)


def mat_vec(a: BitMatrix, x: PauliVector) -> PauliVector:
    if a.ncols != x.width:
        raise DimensionError(f"cannot apply {a.shape} matrix to {x.width}-bit vector")
    if a.nrows % 2:
        raise DimensionError("result is not a pair vector")
    return PauliVector(a.apply(x.bits), a.nrows // 2)


def symplectic_form(n: int) -> BitMatrix:
    width = 2 * n
    _check_width(width)
    return BitMatrix(tuple(pair_swap(unit(i, width), width) for i in range(1, width + 1)), width)


def _is_symplectic_rows(rows: Sequence[int], width: int) -> bool:
    # A^T P A = P  <=>  A P A^T = P  <=>  rows pair up like the standard basis
    for i in range(width):
        for j in range(i, width):
            expected = 1 if (j == i + 1 and i % 2 == 0) else 0
            if inner(rows[i], rows[j], width) != expected:
                return False
    return True


def is_symplectic(a: BitMatrix) -> bool:
    if a.nrows != a.ncols:
        raise DimensionError(f"symplectic test needs a square matrix, got {a.shape}")
    if a.ncols % 2:
        return False
    return _is_symplectic_rows(a.rows, a.ncols)


class SymplecticMatrix(BitMatrix):
    """A 2n x 2n bit matrix with ``A^T P A = P``, validated on construction."""

    __slots__ = ()

    def __init__(self, rows: Sequence[int] | BitMatrix, ncols: int | None = None) -> None:
        if isinstance(rows, BitMatrix):
            rows, ncols = rows.rows, rows.ncols
        rows = tuple(rows)
        if ncols is None:
            ncols = len(rows)
        _check_width(ncols)
        if len(rows) != ncols:
            raise DimensionError(f"symplectic matrix must be square, got {len(rows)}x{ncols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)
        BitMatrix.__post_init__(self)
        if not _is_symplectic_rows(rows, ncols):
            raise ConstraintError("matrix does not satisfy A^T P A = P")

    def __repr__(self) -> str:
        return f"SymplecticMatrix({self.to_strings()})"

    @classmethod
    def identity(cls, width: int) -> SymplecticMatrix:
        return cls(BitMatrix.identity(width))

    @property
    def n(self) -> int:
        return self.ncols // 2

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        prod = mat_mul(self, other)
        if isinstance(other, SymplecticMatrix):
            return _trusted(prod.rows, prod.ncols)
        return prod


def _trusted(rows: Sequence[int], width: int) -> SymplecticMatrix:
    """Build without re-validating; only for products/inverses of valid inputs."""
    obj = SymplecticMatrix.__new__(SymplecticMatrix)
    object.__setattr__(obj, "rows", tuple(rows))
    object.__setattr__(obj, "ncols", width)
    return obj


def symplectic_inverse(a: SymplecticMatrix) -> SymplecticMatrix:
    """``P A^T P``."""
    w = a.ncols
    at = a.transpose()
    # P X P: swap row pairs, then swap bit pairs inside each row
    rows = [pair_swap(at.rows[i ^ 1], w) for i in range(w)]
    return _trusted(rows, w)


def symplectic_product(a: SymplecticMatrix, b: SymplecticMatrix) -> SymplecticMatrix:
    if a.ncols != b.ncols:
        raise DimensionError("size mismatch")
    return _trusted(_mul_rows(a.rows, a.ncols, b.rows), a.ncols)


@dataclass(frozen=True, slots=True)
class Subspace:
    """Row space in canonical reduced row-echelon form.

    Pivots are leading (most significant) bits, strictly decreasing down the
    basis, and every pivot column is zero in all other rows, so equal spans
    have identical ``basis`` tuples.
    """

    basis: tuple[int, ...]
    width: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.width // 2

    def vectors(self) -> list[PauliVector]:
        return [PauliVector(b, self.n) for b in self.basis]

    def elements(self) -> list[int]:
        out = [0]
        for b in self.basis:
            out += [x ^ b for x in out]
        return out

    def contains(self, x: int) -> bool:
        for b in self.basis:
            if x >> (b.bit_length() - 1) & 1:
                x ^= b
        return x == 0

    def is_isotropic(self) -> bool:
        return all(
            inner(u, v, self.width) == 0
            for i, u in enumerate(self.basis)
            for v in self.basis[i + 1:]
        )

    def __str__(self) -> str:
        return "{" + ", ".join(to_bits(b, self.width) for b in self.basis) + "}"


def rref_bits(vectors: Iterable[int], width: int) -> Subspace:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            if v >> (b.bit_length() - 1) & 1:
                v ^= b
        if not v:
            continue
        top = v.bit_length() - 1
        basis = [b ^ v if b >> top & 1 else b for b in basis]
        basis.append(v)
    basis.sort(reverse=True)
    return Subspace(tuple(basis), width)


def rref(vectors: Sequence[PauliVector], n: int | None = None) -> Subspace:
    """Canonical basis of the span of ``vectors``; empty input gives dimension 0."""
    if not vectors:
        if n is None:
            raise DimensionError("width unknown for an empty vector list")
        return Subspace((), 2 * n)
    width = vectors[0].width
    if any(v.width != width for v in vectors):
        raise DimensionError("vectors of different lengths")
    return rref_bits((v.bits for v in vectors), width)


def rank(vectors: Iterable[int], width: int) -> int:
    return rref_bits(vectors, width).dim


def enumerate_coset(space: Subspace, shift: PauliVector) -> Iterator[PauliVector]:
    if shift.width != space.width:
        raise DimensionError("shift length does not match the subspace")
    for s in space.elements():
        yield PauliVector(s ^ shift.bits, shift.n)


def kernel_of_inner(constraints: Sequence[int], width: int) -> Subspace:
    """All ``x`` with ``inner(c, x) == 0`` for every ``c`` in ``constraints``."""
    # inner(c, x) = parity((P c) & x): ordinary nullspace of the swapped rows
    return nullspace([pair_swap(c, width) for c in constraints], width)


def nullspace(rows: Sequence[int], width: int) -> Subspace:
    red = rref_bits(rows, width).basis
    pivots = [b.bit_length() - 1 for b in red]
    free = [k for k in range(width) if k not in pivots]
    out = []
    for f in free:
        x = 1 << f
        for b, p in zip(red, pivots):
            if b >> f & 1:
                x |= 1 << p
        out.append(x)
    return rref_bits(out, width)


def solve_inner(constraints: Sequence[int], targets: Sequence[int], width: int) -> int | None:
    """One ``x`` with ``inner(c_i, x) == t_i`` for all i, or None."""
    # augmented rows: swapped constraint with the target appended as bit 0
    aug = [(pair_swap(c, width) << 1) | t for c, t in zip(constraints, targets)]
    red = rref_bits(aug, width + 1).basis
    x = 0
    for b in red:
        p = b.bit_length() - 1
        if p == 0:
            return None
        if b & 1:
            x |= 1 << (p - 1)
    return x


def affine_ascending(offset: int, space: Subspace) -> Iterator[int]:
    """Elements of ``offset + space`` in increasing integer order."""
    base = offset
    for b in space.basis:
        if base >> (b.bit_length() - 1) & 1:
            base ^= b
    k = space.dim
    # basis is sorted by decreasing pivot, so counter bit k-1-i drives basis[i]
    for c in range(1 << k):
        x = base
        for i in range(k):
            if c >> (k - 1 - i) & 1:
                x ^= space.basis[i]
        yield x
