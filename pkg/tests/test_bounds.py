import random
from fractions import Fraction

import pytest

from conftest import involution_oracle
from dworklab.bounds import (
    BoundKind,
    bound_value,
    floor_lemma_checks,
    floor_sum_gap,
    half_floor_inequality_holds,
    partition_case,
    q_recurrence_parameters,
    q_sequence,
    verify_bounds,
    verify_q_recurrence,
)
from dworklab.exactcore import INFINITY, legendre_valuation, vp
from dworklab.series import ExpSeries, LogSeries, exp_transform


def c2_series(n_max):
    return LogSeries((1, 1) + (0,) * (n_max - 2))


def test_partition_case():
    assert partition_case((2, 1)) == ("I", 3, 1)
    assert partition_case((1, 1)) == ("II", 2, 1)
    assert partition_case((1, 1, 1)) == ("III", 3, 1)
    assert partition_case((5,)) == ("I", 6, 0)
    assert partition_case((2, 2, 1)) == ("III", 4, 2)
    with pytest.raises(ValueError):
        partition_case((1, 2))
    with pytest.raises(ValueError):
        partition_case(())


def test_bound_kind_validation():
    BoundKind("thm2.1", 3, l=2, m=1)
    BoundKind("thm6.2", 2, partition=(2, 1, 1))
    with pytest.raises(ValueError):
        BoundKind("thm2.1", 3, l=1, m=1)
    with pytest.raises(ValueError):
        BoundKind("thm3.1", 3, l=1)
    with pytest.raises(ValueError):
        BoundKind("thm2.7", 3, l=2)
    with pytest.raises(ValueError):
        BoundKind("thm2.7", 2, l=1)
    with pytest.raises(ValueError):
        BoundKind("thm6.2", 2, partition=(2, 1))  # case I
    with pytest.raises(ValueError):
        BoundKind("thm5.3", 2)
    with pytest.raises(ValueError):
        BoundKind("hnc2", 3)
    with pytest.raises(ValueError):
        BoundKind("nope", 2)
    with pytest.raises(ValueError):
        BoundKind("cor2.4", 4, l=1)


def test_bound_value_examples():
    assert bound_value(BoundKind("cor2.4", 2, l=2), 8) == 8 // 2 - 8 // 4 == 2
    assert bound_value(BoundKind("thm6.2", 2, partition=(1, 1)), 16) == 16 // 2 + 16 // 8 - 16 // 16 == 9
    assert bound_value(BoundKind("hnc2", 2), 3) == (3 + 2) // 4 == 1
    assert bound_value(BoundKind("thm5.2", 3), 10) == 3 - 1
    assert bound_value(BoundKind("thm5.3", 3), 27) == 9 + 3 - 2
    assert bound_value(BoundKind("thm5.5", 2, dihedral_m=8), 10) == 5
    assert bound_value(BoundKind("thm5.5", 2, dihedral_m=6), 10) == 5 - 2


def test_bound_value_kty_matches_rank_formulas():
    # case I of the general bound specializes to the rank <= 2 display
    for p in (2, 3):
        for parts, (l, m) in [((2, 1), (2, 1)), ((3, 1), (3, 1)), ((2,), (2, 0))]:
            kty = BoundKind("kty", p, l=l, m=m)
            general = BoundKind("thm6.1", p, partition=parts)
            for n in range(0, 200):
                assert bound_value(kty, n) == bound_value(general, n)


def test_bound_value_thm21_cor24_consistency():
    for p in (2, 5):
        for l in (1, 2, 3):
            a = BoundKind("thm2.1", p, l=l, m=0)
            b = BoundKind("cor2.4", p, l=l)
            for n in range(0, 120):
                assert bound_value(a, n) == bound_value(b, n)


def test_bound_value_thm34_branches():
    assert bound_value(BoundKind("thm3.4", 2, l=1), 12) == 6 - 3
    assert bound_value(BoundKind("thm3.4", 2, l=2), 12) == 6
    # l = 3: sum_{s=1}^{4} floor(n/2^s) - 2 floor(n/8)
    assert bound_value(BoundKind("thm3.4", 2, l=3), 24) == (12 + 6 + 3 + 1) - 2 * 3


def test_bound_value_cor36_branches():
    assert bound_value(BoundKind("cor3.6", 2), 12) == 6 - 3
    n = 54
    expected3 = (
        sum(n // 3**s for s in range(1, 5))
        - sum(n // (2 * 3**s) for s in range(1, 4))
        - (n // 9 + 1) // 2
    )
    assert bound_value(BoundKind("cor3.6", 3), n) == expected3
    assert bound_value(BoundKind("cor3.6", 3), n) == bound_value(BoundKind("thm3.3", 3), n)
    expected5 = (n // 5 + n // 25) - (n // 10 + n // 50)
    assert bound_value(BoundKind("cor3.6", 5), n) == expected5
    # the general-bound family is never vacuously negative at n = 0
    for tag, kind in [
        ("thm3.1", BoundKind("thm3.1", 5, l=2)),
        ("thm3.7", BoundKind("thm3.7", 5, l=2)),
        ("thm3.3", BoundKind("thm3.3", 3)),
    ]:
        assert bound_value(kind, 0) == 0, tag


def test_cor24_never_exceeds_full_integrality():
    # the truncated bound never claims more than v_p(n!)
    for p in (2, 3, 5):
        for l in (1, 2, 3, 4):
            kind = BoundKind("cor2.4", p, l=l)
            for n in range(0, 300):
                assert bound_value(kind, n) <= legendre_valuation(n, p)


def test_verify_bounds_c2():
    s = c2_series(200)
    h = exp_transform(s)
    report = verify_bounds(h, BoundKind("cor2.4", 2, l=2))
    assert report.ok and report.min_slack == 0
    tight = set(report.tight_set)
    assert all(n in tight for n in range(0, 201, 4))


def test_verify_bounds_zero_series():
    h = ExpSeries((1, 0, 0, 0, 0))
    report = verify_bounds(h, BoundKind("hnc2", 2))
    assert report.ok
    for row in report.rows[1:]:
        assert row.valuation is INFINITY and row.slack is INFINITY and not row.tight
    assert report.rows[0].tight  # h_0 = 1, bound 0


def test_verify_bounds_ochiai_equality():
    s = c2_series(100)
    h = exp_transform(s)
    for n in range(3, 101, 4):
        assert vp(h[n], 2) == (n + 5) // 4


def test_verify_bounds_range_errors():
    h = ExpSeries((1, 1))
    with pytest.raises(ValueError, match="exceeds truncation"):
        verify_bounds(h, BoundKind("hnc2", 2), 0, 5)


def test_q_sequence_c2():
    s = c2_series(40)
    h = exp_transform(s)
    kind = BoundKind("cor2.4", 2, l=2)
    q = q_sequence(h, kind)
    assert q[0] == 1
    # h_4 = 10, e = 1, Q_4 = 5 which is odd
    assert int(h[4]) == 10 and bound_value(kind, 4) == 1 and q[4] == 1
    # h_8 = 764, e = 2, Q_8 = 191
    assert int(h[8]) == 764 and bound_value(kind, 8) == 2 and q[8] == 1


def test_q_sequence_violation_aborts():
    s = c2_series(20)
    h = exp_transform(s)
    with pytest.raises(ValueError, match="n=4"):
        q_sequence(h, BoundKind("cor2.4", 2, l=3))


def test_q_recurrence_c2():
    s = c2_series(200)
    h = exp_transform(s)
    kind = BoundKind("cor2.4", 2, l=2)
    q = q_sequence(h, kind)
    rep = verify_q_recurrence(q, kind, s)
    assert rep.ok and rep.step == 4 and rep.multiplier == 1


def test_q_recurrence_klein_step_is_16_not_8():
    # the p = 2 exceptional recurrence steps by 2^{A_1+3} = 16 for type
    # (1,1); an 8-step version genuinely fails
    svals = {1: 1, 2: 3, 4: 1}
    s = LogSeries.from_map(svals, 96)
    h = exp_transform(s)
    kind = BoundKind("thm6.2", 2, partition=(1, 1))
    q = q_sequence(h, kind)
    step, rho = q_recurrence_parameters(kind, s)
    assert step == 16 and rho == 1
    rep = verify_q_recurrence(q, kind, s)
    assert rep.ok
    assert any(q[n] != q[n - 8] for n in range(8, 97))


def test_q_recurrence_multiplier_not_integral():
    s = c2_series(20)
    kind = BoundKind("thm2.1", 2, l=2, m=1)
    with pytest.raises(ValueError, match="not p-integral"):
        q_recurrence_parameters(kind, s)


def test_q_recurrence_rejects_p2_case_ii_first_family():
    s = LogSeries.from_map({1: 1, 2: 3, 4: 1}, 40)
    with pytest.raises(ValueError, match="thm6.2"):
        q_recurrence_parameters(BoundKind("thm6.1", 2, partition=(1, 1)), s)


def test_q_recurrence_undefined_for_other_kinds():
    s = c2_series(10)
    with pytest.raises(ValueError, match="no quotient recurrence"):
        q_recurrence_parameters(BoundKind("hnc2", 2), s)


def test_pgroup_and_kulakoff_bounds_on_instances():
    # nontrivial p-group bound and the odd non-cyclic strengthening
    from dworklab.groups import PartitionType, abelian_subgroup_counts

    for parts, p in [((1,), 3), ((2, 1), 2), ((1, 1), 5)]:
        t = PartitionType(parts, p)
        s = abelian_subgroup_counts(t).to_log_series(150)
        h = exp_transform(s)
        assert verify_bounds(h, BoundKind("thm5.2", p)).ok
    for parts, p in [((2, 1), 3), ((1, 1, 1), 3), ((2, 1), 5)]:
        t = PartitionType(parts, p)
        s = abelian_subgroup_counts(t).to_log_series(150)
        h = exp_transform(s)
        assert verify_bounds(h, BoundKind("thm5.3", p)).ok


def test_p3_l1_bound_correction_is_needed_and_valid():
    # regression for the (3,1) exponent: the floor(n/18) correction is too
    # weak.  S = z + z^3/3 (s_1 = s_3 = 1) satisfies the gap hypothesis
    # through z^3, yet h_9 = 5769 has v_3 = 2, while
    # sum(floor-diffs) - floor(9/18) would claim 3.  The implemented term
    # ceil(floor(n/9)/2) gives 2, and the witness is exactly tight there.
    s = LogSeries((1, 0, 1) + (0,) * 37)
    from dworklab.series import check_hypotheses

    assert check_hypotheses(s, 3, "thm3.3").overall
    h = exp_transform(s)
    assert int(h[9]) == 5769 and vp(h[9], 3) == 2
    printed_form = sum(9 // 3**t for t in (1, 2)) - 9 // 6 - 9 // 18
    assert printed_form == 3  # would be violated
    kind = BoundKind("thm3.3", 3)
    assert bound_value(kind, 9) == 2
    report = verify_bounds(h, kind)
    assert report.ok and 9 in report.tight_set


def test_kulakoff_bound_fails_for_rank_two_elementary():
    # regression: the strengthened odd-noncyclic bound does not hold for
    # C_p x C_p; the rank-n case II bound is tight at n = p^2 with
    # v_p(h_{p^2}) = p, below the claimed p + 1.  Orders >= p^3 are fine
    # (previous test).
    from dworklab.groups import PartitionType, abelian_subgroup_counts

    for p in (3, 5):
        t = PartitionType((1, 1), p)
        s = abelian_subgroup_counts(t).to_log_series(p * p)
        h = exp_transform(s)
        kind = BoundKind("thm5.3", p)
        assert vp(h[p * p], p) == p == bound_value(kind, p * p) - 1


def test_dividing_line_on_group_instances():
    # s_p = 1 (mod p) for abelian p-groups: the divisibility branch holds
    from dworklab.groups import PartitionType, abelian_subgroup_counts

    for parts, p in [((2,), 3), ((1, 1), 2)]:
        t = PartitionType(parts, p)
        s = abelian_subgroup_counts(t).to_log_series(200)
        h = exp_transform(s)
        assert verify_bounds(h, BoundKind("cor3.6", p)).ok
    # dihedral groups have s_p = 0 (mod p) for odd p: indivisibility branch
    from dworklab.groups import dihedral_subgroup_counts

    s = dihedral_subgroup_counts(6).to_log_series(100)
    h = exp_transform(s)
    hits = [n for n in range(101) if h[n].numerator % 3]
    assert hits, "expected infinitely many 3-indivisible values"


def test_floor_sum_gap_example():
    # i=4, j=3, p=2, l=1: (floor(12/4)-floor(3/2)) + (floor(12/8)-floor(3/4)) = 2+1... computed exactly:
    assert floor_sum_gap(4, 3, 2, 1) == (3 - 1) + (1 - 0)
    assert floor_sum_gap(4, 0, 2, 1) == 0


def test_half_floor_examples():
    assert half_floor_inequality_holds(0, Fraction(7, 3))
    assert half_floor_inequality_holds(2, Fraction(0))  # 2 <= 3 - 1/2
    # known failure outside the non-negative domain the proofs use
    assert not half_floor_inequality_holds(-1, Fraction(0))
    assert not half_floor_inequality_holds(-2, Fraction(0))


def test_floor_lemma_checks_pass_on_nonnegative_grid():
    for p, l in [(2, 1), (2, 2), (3, 1), (5, 1)]:
        rep = floor_lemma_checks(p, l, i_max=60, j_max=20)
        assert rep.ok, rep.summary()
        assert rep.ij_checked and rep.half_checked


def test_floor_lemma_checks_report_negative_j_counterexamples():
    rep = floor_lemma_checks(2, 1, i_max=4, j_max=4, j_min=-4)
    assert not rep.ok
    assert (-1, Fraction(0)) in rep.half_counterexamples


def test_report_serialization_shape():
    s = c2_series(12)
    h = exp_transform(s)
    report = verify_bounds(h, BoundKind("cor2.4", 2, l=2))
    row = report.rows[0].as_dict()
    assert set(row) == {"n", "valuation", "bound", "slack", "tight"}
    zrow = verify_bounds(ExpSeries((1, 0)), BoundKind("hnc2", 2)).rows[1].as_dict()
    assert zrow["valuation"] == "infinity" and zrow["slack"] == "infinity"
    summary = report.summary()
    assert summary["violations"] == [] and summary["min_slack"] == 0
