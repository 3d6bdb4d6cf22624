import json

import pytest

from amalgam.catalog import abelian_pool, nil2_pool
from amalgam.checkers import (
    check_ap_instance,
    check_jep_at,
    check_wap_witness,
    gamma_stabilizer_search,
    non_wap_pattern_check,
    t_isolation_check,
    wap_via_groups,
)
from amalgam.diagrams import Diagram, diagram_of, extends
from amalgam.errors import NoCompletionAtBound, PreconditionFailed, UnsupportedVariety
from amalgam.groups import is_isomorphic
from amalgam.library import abelian, cyclic, heisenberg, small_groups, symmetric, trivial
from amalgam.report import COUNTEREXAMPLE, UNKNOWN, WITNESSED, replay_report
from amalgam.varieties import ABEL, GROUPS, nil_exp_variety

NIL2_3 = nil_exp_variety(2, 3)


def replays(report):
    return replay_report(report.to_json()) == []


def test_jep_examples():
    rep = check_jep_at(ABEL, [cyclic(2), cyclic(3)])
    assert rep.status == WITNESSED and rep.summary["pairs"] == 3 and replays(rep)
    orders = sorted(G.order for G in rep.certificate.groups)
    assert 6 in orders
    six = next(G for G in rep.certificate.groups if G.order == 6)
    assert is_isomorphic(six, cyclic(6))
    assert check_jep_at(GROUPS, [trivial()]).status == WITNESSED
    rep = check_jep_at(NIL2_3, [heisenberg(3)])
    assert rep.status == WITNESSED and max(G.order for G in rep.certificate.groups) == 729
    with pytest.raises(PreconditionFailed):
        check_jep_at(ABEL, [symmetric(3)])


def c4_over_c2(other):
    # C4 with its involution labelled 2, the generators get labels other and other + 1
    return diagram_of(cyclic(4), (), [1, other, 2, other + 1])


def test_ap_examples():
    D0 = diagram_of(cyclic(2))
    assert check_ap_instance(D0, D0, D0, ABEL, 2).status == WITNESSED
    D1, D2 = c4_over_c2(3), c4_over_c2(5)
    rep = check_ap_instance(D0, D1, D2, ABEL, 8, disjoint=True)
    assert rep.status == WITNESSED and rep.summary["amalgam_order"] == 8 and replays(rep)
    assert check_ap_instance(D0, D1, D2, ABEL, 4, disjoint=True).status == UNKNOWN
    # without disjointness the two copies of C4 may be glued
    assert check_ap_instance(D0, D1, D2, ABEL, 4).summary["amalgam_order"] == 4
    with pytest.raises(PreconditionFailed):
        check_ap_instance(D1, D0, D0, ABEL, 4)


def test_wap_abelian_full_table():
    D0 = Diagram.group([1, 2])
    D0p = diagram_of(cyclic(2))
    rep = check_wap_witness(D0, D0p, ABEL, 8)
    assert rep.status == WITNESSED and replays(rep)
    assert check_wap_witness(D0, D0p, ABEL, 8, mode="CAP").status == WITNESSED


def test_wap_counterexample():
    D0 = Diagram.group([1, 2])
    yes = Diagram.group([1, 2], {(2, 2): 1})
    no = Diagram.group([1, 2, 3], {(2, 2): 3})
    rep = check_wap_witness(D0, D0, ABEL, 4, extensions=[yes, no])
    assert rep.status == COUNTEREXAMPLE and rep.exit_code == 2
    assert rep.summary["failing_pair"] == [yes.to_json(), no.to_json()]
    with pytest.raises(PreconditionFailed):
        check_wap_witness(yes, D0, ABEL, 4)


@pytest.mark.parametrize("mode_pair", [("CAP", "WAP")])
def test_cap_implies_wap(mode_pair):
    D0 = Diagram.group([1])
    for D0p in (Diagram.group([1, 2]), Diagram.group([1, 2], {(2, 2): 1}), diagram_of(cyclic(3))):
        cap = check_wap_witness(D0, D0p, ABEL, 6, mode="CAP")
        if cap.status == WITNESSED:
            assert check_wap_witness(D0, D0p, ABEL, 6, mode="WAP").status == WITNESSED


def test_t_isolation_examples():
    for G in small_groups(8):
        D = diagram_of(G)
        rep = t_isolation_check(D, D.domain[:2], GROUPS, 8, 2)
        assert rep.status == WITNESSED
    D = Diagram.group([1, 2])
    rep = t_isolation_check(D, (2,), ABEL, 3, 2)
    assert rep.status == COUNTEREXAMPLE and replays(rep)
    assert sorted(rep.summary["completions"]) == ["C2", "C3"]
    inv = Diagram.group([1, 2], {(2, 2): 1})
    assert t_isolation_check(inv, (2,), ABEL, 8, 3).status == WITNESSED
    with pytest.raises(NoCompletionAtBound):
        # a has order 4, which no group of order 3 provides
        t_isolation_check(Diagram.group([1, 2, 3], {(2, 2): 3, (3, 3): 1}), (2,), ABEL, 3, 2)


def test_t_isolation_counterexamples_persist():
    D = Diagram.group([1, 2])
    assert t_isolation_check(D, (2,), ABEL, 1 + 1, 2).status == WITNESSED
    for b in range(3, 9):
        assert t_isolation_check(D, (2,), ABEL, b, 2).status == COUNTEREXAMPLE


def test_non_wap_pattern_examples():
    D = Diagram.group([1, 2])
    rep = non_wap_pattern_check(D, ("mul", (2, 2), 1), ABEL, 3)
    assert rep.status == WITNESSED and replays(rep)
    assert rep.summary == {"with_atom": "C2", "with_negation": "C3", "fresh_label": 3}
    assert t_isolation_check(D, (2,), ABEL, 3, 2).status == COUNTEREXAMPLE
    full = diagram_of(cyclic(3))
    assert non_wap_pattern_check(full, ("mul", (2, 2), 1), ABEL, 6).status != WITNESSED
    decided = Diagram.group([1, 2], {(2, 2): 1})
    assert non_wap_pattern_check(decided, ("mul", (2, 2), 1), ABEL, 6).status != WITNESSED
    with pytest.raises(PreconditionFailed):
        non_wap_pattern_check(D, ("mul", (2, 7), 1), ABEL, 3)


def test_wap_via_groups_abelian():
    rep = wap_via_groups(cyclic(2), ABEL, abelian_pool(16), 16)
    assert rep.status == WITNESSED and rep.summary["G1"] == 2 and replays(rep)
    with pytest.raises(UnsupportedVariety):
        wap_via_groups(symmetric(3), ABEL, abelian_pool(8), 8)


def test_gamma_stabilizer_abelian():
    rep = gamma_stabilizer_search(cyclic(4), ABEL, abelian_pool(16), 16)
    assert rep.status == WITNESSED and rep.summary["G1"] == 4 and replays(rep)


@pytest.mark.slow
def test_nil2_reductions():
    pool = nil2_pool(3, 81)
    rep = wap_via_groups(cyclic(3), NIL2_3, pool, 81)
    assert rep.status == WITNESSED and rep.summary["G1"] == 27 and replays(rep)
    rep = gamma_stabilizer_search(abelian([3, 3]), NIL2_3, pool, 81)
    assert rep.status == WITNESSED and replays(rep)
    meets = rep.summary["gamma_meets"]
    # no pool extension of C3+C3 puts more of it into the derived subgroup
    assert meets[0] == 9 and meets[1] >= 3


def test_tampered_report_fails_replay():
    rep = check_jep_at(ABEL, [cyclic(2), cyclic(3)])
    data = json.loads(rep.to_json())
    data["replay"]["groups"][-1]["table"][1][1] = 0
    assert replay_report(json.dumps(data))
