from fractions import Fraction as F

import pytest

import oracles
from roysys.pwl import (
    DomainError,
    LinearityInterval,
    MalformedSystemError,
    PiecewiseLinearSystem,
    SlopeBlock,
    build_system,
    evaluate,
    partial_sum,
    validate,
)
from roysys.templates import SingleExponentParams, constant_template, random_roy_system, single_exponent_template


def test_constant_values():
    s = constant_template(2, 0, 10)
    assert evaluate(s, 3) == (1, 1, 1)
    assert partial_sum(s, 3, 3) == 3
    assert partial_sum(s, 1, 3) == 1


def test_evaluate_at_q0_returns_initial_values():
    s = random_roy_system(3, 3, q0=2, q_max=9)
    assert s.evaluate(s.q0) == s.initial_values


def test_out_of_domain():
    s = constant_template(2, 1, 4)
    with pytest.raises(DomainError):
        s.evaluate(F(1, 2))
    with pytest.raises(DomainError):
        s.evaluate(5)
    with pytest.raises(DomainError):
        s.partial_sum(4, 2)


def test_single_first_kink_matches_hand_integration():
    # n=2, d=1, omega=4, eps=1/10: the top two components rise at slope 1/2 on [1, 5/3]
    s = single_exponent_template(SingleExponentParams(2, 1, 4, F(1, 10)), cycles=2)
    third = F(1, 3)
    pieces = [(iv.q_start, iv.q_end, iv.block.lower, iv.block.upper) for iv in s.intervals]
    assert s.evaluate(F(5, 3)) == (third, F(2, 3), F(2, 3))
    for q in (F(5, 3), F(2), F(7, 2), F(20), F(31)):
        assert list(s.evaluate(q)) == oracles.integrate_slopes(3, 1, [third] * 3, pieces, q)


def test_gap_and_overlap_rejected():
    with pytest.raises(MalformedSystemError, match="gap"):
        build_system(2, 0, (0, 0), [(0, 1, 1, 2), (2, 3, 1, 2)])
    with pytest.raises(MalformedSystemError, match="overlap"):
        build_system(2, 0, (0, 0), [(0, 2, 1, 2), (1, 3, 1, 2)])
    with pytest.raises(MalformedSystemError):
        build_system(2, 0, (0, 0), [(0, 0, 1, 2)])
    with pytest.raises(MalformedSystemError):
        build_system(2, 0, (0, 0), [(0, 1, 1, 3)])


def test_s1_violation_on_bad_initial_sum():
    s = build_system(3, 1, (0, 0, 2), [(1, 2, 1, 3)])
    report = validate(s)
    assert not report.passed
    assert any(v.axiom == "S1" for v in report.violations)


def test_s2_violation():
    # block (1, 2) rises although P_1 < P_2
    s = build_system(3, 3, (0, 1, 2), [(3, 4, 1, 2)])
    assert [v.axiom for v in validate(s).violations] == ["S2"]


def test_s3():
    ok = build_system(3, 0, (0, 0, 0), [(0, 1, 3, 3), (1, 2, 2, 2), (2, 3, 1, 1), (3, 4, 1, 3)])
    assert validate(ok).passed
    # P_1 catches up with P_2 but not P_3; handing over to P_3 alone breaks the junction rule
    bad = build_system(3, 3, (0, 1, 2), [(3, 4, 1, 1), (4, 5, 3, 3)])
    assert [v.axiom for v in validate(bad).violations] == ["S3"]


def test_constant_validates():
    assert validate(constant_template(4, 0, 3)).passed


def test_adjacent_equal_blocks_merge():
    s = build_system(2, 0, (0, 0), [(0, 1, 1, 2), (1, 3, 1, 2)])
    assert s.intervals == (LinearityInterval(F(0), F(3), SlopeBlock(1, 2)),)


def test_json_roundtrip():
    s = single_exponent_template(SingleExponentParams(3, 1, 5, F(1, 7)), cycles=3)
    t = PiecewiseLinearSystem.from_json(s.to_json())
    assert t == s
    assert t.anchors == s.anchors and t.cycle_starts == s.cycle_starts


def test_json_garbage():
    with pytest.raises(MalformedSystemError):
        PiecewiseLinearSystem.from_json("[1, 2]")
    with pytest.raises(MalformedSystemError):
        PiecewiseLinearSystem.from_json('{"n_plus_1": 2}')


def test_truncate():
    s = constant_template(2, 0, 10)
    t = s.truncate(4)
    assert t.q_max == 4 and t.evaluate(4) == s.evaluate(4)


def test_slope_block():
    b = SlopeBlock(2, 4)
    assert b.size == 3 and b.slope == F(1, 3)
    assert b.slopes(5) == (0, F(1, 3), F(1, 3), F(1, 3), 0)
    with pytest.raises(ValueError):
        SlopeBlock(3, 2)
