import random

import pytest
from hypothesis import given, strategies as st

from belldistill.gf2core import (
    BitMatrix,
    ConstraintError,
    DimensionError,
    PauliVector,
    Subspace,
    SymplecticMatrix,
    affine_ascending,
    enumerate_coset,
    inner,
    is_symplectic,
    kernel_of_inner,
    mat_mul,
    mat_vec,
    nullspace,
    pair_swap,
    rank,
    rref,
    rref_bits,
    solve_inner,
    symplectic_form,
    symplectic_inner,
    symplectic_inverse,
    symplectic_product,
    to_bits,
)
from belldistill.symplectic import enumerate_sp4, random_symplectic, transvection_matrix


def pv(s):
    return PauliVector.from_str(s)


def vectors(n):
    return st.integers(0, (1 << (2 * n)) - 1).map(lambda b: PauliVector(b, n))


# -- vectors and the form ----------------------------------------------------


def test_textual_form_roundtrip():
    v = pv("10111110")
    assert v.n == 4 and str(v) == "10111110"
    assert v.pair(0) == 0b10 and v.pair(3) == 0b10


def test_from_str_rejects_garbage():
    for bad in ("", "101", "10a1"):
        with pytest.raises(ValueError):
            PauliVector.from_str(bad)


def test_value_must_fit():
    with pytest.raises(DimensionError):
        PauliVector(0b10000, 2)


def test_inner_examples():
    assert symplectic_inner(pv("01"), pv("10")) == 1
    assert symplectic_inner(pv("0011"), pv("0101")) == 1
    assert symplectic_inner(pv("1111"), pv("1111")) == 0


def test_inner_length_mismatch():
    with pytest.raises(DimensionError):
        symplectic_inner(pv("01"), pv("0101"))


@given(vectors(3))
def test_form_is_alternating(v):
    assert symplectic_inner(v, v) == 0


@given(vectors(3), vectors(3), vectors(3))
def test_form_is_bilinear_and_symmetric(u, v, w):
    assert symplectic_inner(u, v) == symplectic_inner(v, u)
    assert symplectic_inner(u + v, w) == symplectic_inner(u, w) ^ symplectic_inner(v, w)


def test_pair_swap():
    assert pair_swap(0b10011100, 8) == 0b01101100
    assert pair_swap(pair_swap(0b110100, 6), 6) == 0b110100


# -- matrices ------------------------------------------------------------------


def test_identity_and_p_are_symplectic():
    for n in (1, 2, 3):
        assert is_symplectic(BitMatrix.identity(2 * n))
        assert is_symplectic(symplectic_form(n))


def test_singular_is_not_symplectic():
    m = BitMatrix.from_strings(["1000", "1000", "0010", "0001"])
    assert not is_symplectic(m)


def test_non_square_rejected():
    with pytest.raises(DimensionError):
        is_symplectic(BitMatrix.from_strings(["100", "010"]))


def test_symplectic_constructor_validates():
    with pytest.raises(ConstraintError):
        SymplecticMatrix(BitMatrix.from_strings(["1000", "1000", "0010", "0001"]))


def test_p_swaps_pairs():
    p = symplectic_form(2)
    assert str(mat_vec(p, pv("1001"))) == "0110"
    x = pv("0111")
    assert mat_vec(BitMatrix.identity(4), x) == x


def test_matrix_text_roundtrip():
    rows = ["1100", "0100", "0011", "0001"]
    assert BitMatrix.from_strings(rows).to_strings() == rows


def test_transpose_involution():
    m = BitMatrix.from_strings(["110", "011"])
    assert m.transpose().transpose() == m
    assert m.transpose().to_strings() == ["10", "11", "01"]


def test_inverse_identity():
    i4 = SymplecticMatrix(BitMatrix.identity(4))
    assert symplectic_inverse(i4) == i4


def test_transvection_is_its_own_inverse():
    for u in range(1, 16):
        t = transvection_matrix(u, 2)
        assert symplectic_inverse(t) == t


def test_inverse_on_sp4():
    rng = random.Random(3)
    group = enumerate_sp4()
    eye = BitMatrix.identity(4)
    for _ in range(50):
        a = rng.choice(group)
        assert mat_mul(a, symplectic_inverse(a)) == eye


@given(st.integers(0, 2**32 - 1))
def test_inverse_random_n3(seed):
    a = random_symplectic(3, random.Random(seed))
    assert mat_mul(a, symplectic_inverse(a)) == BitMatrix.identity(6)
    assert symplectic_product(a, symplectic_inverse(a)) == BitMatrix.identity(6)


@given(st.integers(0, 2**32 - 1), st.integers(0, 63))
def test_mat_vec_matches_mat_mul(seed, x):
    rng = random.Random(seed)
    a, b = random_symplectic(3, rng), random_symplectic(3, rng)
    v = PauliVector(x, 3)
    assert mat_vec(a @ b, v) == mat_vec(a, mat_vec(b, v))


# -- subspaces -------------------------------------------------------------------


def test_rref_examples():
    s = rref([pv("1111"), pv("1111")])
    assert s.dim == 1 and s.basis == (0b1111,)
    assert rref([pv("0001"), pv("0010"), pv("0011")]).dim == 2


def test_rref_empty():
    assert rref([], n=2).dim == 0
    with pytest.raises(DimensionError):
        rref([])


def _gauss_rank(vs):
    rows = list(vs)
    r = 0
    for bit in reversed(range(16)):
        piv = next((i for i in range(r, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> bit & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


@given(st.lists(st.integers(0, 2**16 - 1), max_size=10))
def test_rank_matches_plain_elimination(vs):
    assert rank(vs, 16) == _gauss_rank(vs)


@given(st.lists(st.integers(0, 255), max_size=6), st.randoms())
def test_rref_is_canonical(vs, r):
    shuffled = list(vs)
    r.shuffle(shuffled)
    combos = [a ^ b for a, b in zip(vs, shuffled)] + vs
    assert rref_bits(vs, 8) == rref_bits(combos, 8)


def test_coset_examples():
    s = rref([pv("1111")])
    assert [str(x) for x in enumerate_coset(s, pv("0000"))] == ["0000", "1111"]
    assert sorted(str(x) for x in enumerate_coset(s, pv("0100"))) == ["0100", "1011"]
    assert list(enumerate_coset(Subspace((), 4), pv("0110"))) == [pv("0110")]


@given(st.lists(st.integers(1, 255), max_size=4))
def test_elements_and_contains(vs):
    s = rref_bits(vs, 8)
    els = s.elements()
    assert len(set(els)) == 2**s.dim
    assert all(s.contains(x) for x in els)
    assert sum(s.contains(x) for x in range(256)) == 2**s.dim


@given(st.lists(st.integers(0, 255), max_size=5))
def test_nullspace(rows):
    ns = nullspace(rows, 8)
    assert ns.dim == 8 - rank(rows, 8)
    for x in ns.elements():
        assert all(bin(r & x).count("1") % 2 == 0 for r in rows)


@given(st.lists(st.integers(0, 255), max_size=5))
def test_kernel_of_inner(cons):
    k = kernel_of_inner(cons, 8)
    for x in k.elements():
        assert all(inner(c, x, 8) == 0 for c in cons)


@given(st.lists(st.integers(0, 255), max_size=4), st.integers(0, 255))
def test_solve_inner(cons, x0):
    targets = [inner(c, x0, 8) for c in cons]
    x = solve_inner(cons, targets, 8)
    assert x is not None
    assert [inner(c, x, 8) for c in cons] == targets


def test_solve_inner_inconsistent():
    assert solve_inner([0b0001, 0b0001], [0, 1], 4) is None


@given(st.lists(st.integers(1, 255), max_size=4), st.integers(0, 255))
def test_affine_ascending(vs, off):
    s = rref_bits(vs, 8)
    out = list(affine_ascending(off, s))
    assert out == sorted({off ^ e for e in s.elements()})


def test_isotropy():
    assert rref([pv("1111"), pv("0101")]).is_isotropic()
    assert not rref([pv("0100"), pv("1000")]).is_isotropic()


def test_to_bits():
    assert to_bits(5, 4) == "0101"
