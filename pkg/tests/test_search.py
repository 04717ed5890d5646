import math
import random

import pytest
from hypothesis import given, strategies as st

from belldistill.bellstate import BellDiagonal, werner
from belldistill.gf2core import inner, rref_bits
from belldistill.protocol import apply_step, brute_force_oracle, dej_step, make_step, proposed_step, random_state
from belldistill.search import (
    Objective,
    SearchError,
    WorkRange,
    best_step,
    enumerate_isotropic,
    isotropic_count,
    search_partition,
)


def test_counts():
    assert isotropic_count(2, 1) == 15
    assert isotropic_count(2, 2) == 15 == 3 * 5
    assert isotropic_count(4, 3) == 255 * 126 * 60 // 168 == 11475
    assert isotropic_count(2, 3) == 0


@pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_enumeration_exact(n, k):
    spaces = list(enumerate_isotropic(n, k))
    assert len(spaces) == isotropic_count(n, k)
    assert len({s.basis for s in spaces}) == len(spaces)
    for s in spaces:
        assert s.dim == k and s.is_isotropic()
        assert rref_bits(s.basis, 2 * n) == s


def test_enumeration_brute_force_n2():
    found = set()
    for a in range(1, 16):
        for b in range(1, 16):
            if a != b and inner(a, b, 4) == 0:
                found.add(rref_bits([a, b], 4).basis)
    assert found == {s.basis for s in enumerate_isotropic(2, 2)}


def test_enumeration_edge_cases():
    assert list(enumerate_isotropic(2, 3)) == []
    assert [s.dim for s in enumerate_isotropic(2, 0)] == [0]


def test_enumeration_n4_k3():
    assert sum(1 for _ in enumerate_isotropic(4, 3)) == 11475


def test_partition():
    assert search_partition(2, 1, 1) == [WorkRange(2, 1, 0, 15)]
    parts = search_partition(2, 1, 15)
    assert all(w.stop - w.start == 1 for w in parts)
    with pytest.raises(ValueError):
        search_partition(2, 1, 0)


@pytest.mark.parametrize("shards", [2, 3, 7, 20])
def test_sharding_covers_everything(shards):
    whole = [s.basis for s in enumerate_isotropic(3, 2)]
    parts = [s.basis for w in search_partition(3, 2, shards) for s in enumerate_isotropic(3, 2, w)]
    assert parts == whole


def test_objective_parse():
    assert Objective.parse("fidelity") == Objective()
    assert Objective.parse("fidelity-at-min-success:0.3").threshold == 0.3
    with pytest.raises(ValueError):
        Objective.parse("speed")
    with pytest.raises(ValueError):
        Objective.parse("fidelity-at-min-success:0")


def test_pure_input_is_degenerate():
    report = best_step(BellDiagonal((1, 0, 0, 0)), 3, 1)
    assert report.degenerate
    assert all(e.score == pytest.approx(1.0) for e in report.best)


def test_dej_in_argmax_at_08():
    report = best_step(werner(0.8), 2, 1)
    assert report.states_evaluated == 15 and len(report.best) == 15
    top = report.best[0].score
    dej = next(e for e in report.best if e.basis == (0b1111,))
    assert dej.score == pytest.approx(top, abs=1e-12)
    assert top == pytest.approx(145 / 173, abs=1e-12)


def test_n2_scores_match_oracle():
    p = werner(0.7)
    for e in best_step(p, 2, 1).best:
        out = brute_force_oracle(p, make_step(2, 1, list(e.basis)))
        assert e.fidelity == pytest.approx(out.fidelity, abs=1e-12)
        assert e.success == pytest.approx(out.success, abs=1e-12)


def test_full_outcomes_attached():
    report = best_step(werner(0.7), 2, 1, top=4, full_outcomes=2)
    assert report.best[0].outcome is not None and report.best[2].outcome is None
    assert report.best[0].outcome.fidelity == pytest.approx(report.best[0].fidelity)


def test_proposed_in_argmax_n4():
    prop = proposed_step()
    report = best_step(werner(0.8), 4, 1, full_outcomes=0)
    assert report.states_evaluated == 11475
    top = report.best[0].score
    argmax = {e.basis for e in report.best if e.score >= top - 1e-12}
    assert prop.space.basis in argmax
    assert top == pytest.approx(apply_step(werner(0.8), prop).fidelity, abs=1e-12)


@pytest.mark.parametrize("shards,workers", [(4, 1), (4, 2)])
def test_sharding_and_workers_invariant(shards, workers):
    p = werner(0.75)
    a = best_step(p, 3, 1, full_outcomes=0)
    b = best_step(p, 3, 1, shards=shards, workers=workers, full_outcomes=0)
    assert a.to_csv() == b.to_csv()


def test_min_success_objective():
    report = best_step(werner(0.8), 3, 1, Objective("fidelity-at-min-success", 0.6))
    for e in report.best:
        if math.isfinite(e.score):
            assert e.success >= 0.6 and e.score == e.fidelity


def test_success_objective():
    report = best_step(werner(0.8), 2, 1, Objective("success"))
    assert report.best[0].score == max(e.success for e in report.best)


def test_yield_proxy_prefers_improvement():
    report = best_step(werner(0.8), 2, 1, Objective("inverse-yield-proxy"))
    assert report.best[0].fidelity > 0.8


def test_limits():
    with pytest.raises(SearchError):
        best_step(werner(0.8), 4, 1, max_candidates=100)
    with pytest.raises(ValueError):
        best_step(werner(0.8), 2, 2)


def test_csv_header():
    text = best_step(werner(0.8), 3, 1, top=2).to_csv()
    assert text.splitlines()[0] == "rank,score,success,S_row1,S_row2"
    assert len(text.splitlines()) == 3


@given(st.integers(0, 2**32 - 1))
def test_dej_optimal_for_ordered_entangled(seed):
    p = random_state(random.Random(seed), ordered=True, entangled=True)
    report = best_step(p, 2, 1, full_outcomes=0)
    dej = next(e for e in report.best if e.basis == dej_step().space.basis)
    assert dej.score >= report.best[0].score - 1e-12
