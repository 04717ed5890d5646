import math

import pytest
from hypothesis import given, strategies as st

from belldistill.bellstate import BellDiagonal, shannon_entropy, werner
from belldistill.pipeline import (
    SWEEP_HEADER,
    Schedule,
    figure1_sweep,
    format_number,
    hashing_yield,
    optimize_schedule,
    run_recurrence,
    sweep_csv,
)
from belldistill.protocol import DegenerateInputError, apply_step, dej_step, make_step, proposed_step

PURE = BellDiagonal((1, 0, 0, 0))


def test_hashing_yield_examples():
    assert hashing_yield(PURE) == 1.0
    assert hashing_yield(werner(0.25)) == 0.0
    assert hashing_yield(werner(0.5)) == 0.0
    assert shannon_entropy(werner(0.5)) == pytest.approx(1.7924812503605778)


@given(st.floats(0.0, 1.0))
def test_hashing_yield_range(f):
    y = hashing_yield(werner(f))
    assert 0.0 <= y <= 1.0
    assert (y == 1.0) == (f == 1.0)


def test_hashing_only():
    assert run_recurrence(PURE, Schedule()).L == 1.0
    res = run_recurrence(werner(0.5), Schedule())
    assert math.isinf(res.L) and not res.finite and math.isinf(res.log10L)


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(hashing=False)
    with pytest.raises(ValueError):
        Schedule.of([make_step(3, 2, [0b000011])])


def test_one_dej_step_then_hashing():
    res = run_recurrence(werner(0.8), Schedule.of([dej_step()]))
    assert res.cost == pytest.approx(450 / 173, rel=1e-12)
    assert res.final_state.p[0] == pytest.approx(145 / 173, abs=1e-12)
    y = 1 - shannon_entropy(res.final_state)
    assert res.L == pytest.approx((450 / 173) / y, rel=1e-12)
    assert res.L == pytest.approx(10.730832993891342, rel=1e-12)


def test_no_hashing_means_unit_yield():
    res = run_recurrence(werner(0.8), Schedule.of([dej_step()], hashing=False))
    assert res.hashing_yield == 1.0 and res.L == pytest.approx(450 / 173)


def test_reordering_keeps_multiset():
    p = werner(0.7)
    for _ in range(4):
        raw = apply_step(p, dej_step()).state.to_single()
        res = run_recurrence(p, Schedule.of([dej_step()], hashing=False))
        assert sorted(res.final_state.p) == pytest.approx(sorted(raw.p))
        p = res.final_state


def test_degenerate_propagates():
    with pytest.raises(DegenerateInputError):
        run_recurrence(BellDiagonal((0, 1, 0, 0)), Schedule.of([make_step(2, 1, [0b0010])], reorder=False))


@given(st.floats(0.61, 0.94))
def test_proposed_fidelity_nondecreasing(f):
    p = werner(f)
    prev = f
    for _ in range(6):
        p = run_recurrence(p, Schedule.of([proposed_step()], hashing=False)).final_state
        if prev > 1 - 1e-6:
            break
        assert p.fidelity >= prev
        prev = p.fidelity


def test_cost_monotone_in_success():
    # same fidelities, larger success -> smaller L
    res = run_recurrence(werner(0.9), Schedule.of([dej_step()]))
    rec = res.per_step[0]
    assert res.L == pytest.approx(2 / rec.success / res.hashing_yield)
    assert 2 / (rec.success * 1.05) / res.hashing_yield < res.L


def test_optimize_pure():
    opt = optimize_schedule(PURE)
    assert opt.repeats == 0 and not opt.final_extra and opt.result.L == 1.0


def test_optimize_high_fidelity():
    opt = optimize_schedule(werner(0.95))
    assert opt.repeats <= 1 and opt.result.finite
    assert opt.result.L == pytest.approx(1.5764045834033178, rel=1e-12)


def test_optimize_low_fidelity_needs_recurrence():
    opt = optimize_schedule(werner(0.55))
    assert opt.repeats > 0 and opt.result.finite


def test_optimize_all_infinite():
    opt = optimize_schedule(werner(0.3), max_steps=3)
    assert not opt.result.finite


# frozen optimized values; proposed side may add one final DEJ step
SWEEP_FROZEN = {
    0.55: (4.415785865144269, 3.771355721081002, 3, 6),
    0.75: (1.4042981641769818, 1.2973900539557022, 1, 2),
    0.8: (1.0306334359089984, 1.0306334359089984, 0, 1),
    0.95: (0.19766768890853342, 0.19766768890853342, 0, 0),
}


@pytest.mark.parametrize("F", sorted(SWEEP_FROZEN))
def test_sweep_frozen(F):
    row = figure1_sweep([F])[0]
    lp, ld, kp, kd = SWEEP_FROZEN[F]
    assert row.log10L_proposed == pytest.approx(lp, abs=1e-9)
    assert row.log10L_dej == pytest.approx(ld, abs=1e-9)
    assert (row.k_proposed, row.k_dej) == (kp, kd)


def test_sweep_extremes():
    hi, lo = figure1_sweep([0.999, 0.51])
    assert 0 < hi.log10L_proposed < 0.01 and 0 < hi.log10L_dej < 0.01
    assert math.isfinite(lo.log10L_proposed) and math.isfinite(lo.log10L_dej)
    assert lo.log10L_proposed > 3 and lo.log10L_dej > 3


def test_sweep_rejects_grid():
    with pytest.raises(ValueError):
        figure1_sweep([0.5])


def test_sweep_csv_format():
    text = sweep_csv(figure1_sweep([0.55, 0.95]))
    lines = text.splitlines()
    assert lines[0].startswith("#") and lines[1] == SWEEP_HEADER
    assert lines[2].startswith("0.55,4.41578586514,3.77135572108,3,6")
    assert text.endswith("\n") and "\r" not in text
    assert format_number(math.inf) == "+inf"
