import math

import numpy as np
import pytest

from slspec.core import constant, from_callables
from slspec.errors import NonpositiveH, OutOfDomain
from slspec.expr import Expr
from slspec.subordinacy import ClassifyPolicy, Verdict, classify_lambda, criteria_scan
from slspec.weidmann import QSplit, h_monitor, hypotheses_scan, tails_flatten, weidmann_report

X_LIST = (11.0, 21.0, 41.0, 81.0)


def test_hypotheses_exp_potential(weid):
    scan = hypotheses_scan(weid, None, 1.0, X_LIST)
    last = scan[-1]
    assert abs(last.q1_l1 - math.exp(-1)) < 1e-12
    assert last.l1_p_defect == last.l1_r_defect == last.q2_prime_l1 == 0.0
    assert tails_flatten(scan)


def test_hypotheses_p_defect():
    co = from_callables("1 + exp(-x)", "0", "1")
    scan = hypotheses_scan(co, None, 1.0, X_LIST)
    exact = math.log(1 + math.exp(-1)) - math.log(1 + math.exp(-81))
    assert abs(scan[-1].l1_p_defect - exact) < 1e-10
    assert tails_flatten(scan)


def test_hypotheses_q2_decaying():
    co = from_callables("1", "1/(1+x)", "1")
    split = QSplit(q1=None, q2=Expr("1/(1+x)"), dq2=Expr("-1/(1+x)^2"))
    scan = hypotheses_scan(co, split, 1.0, X_LIST)
    for h in scan:
        assert abs(h.q2_prime_l1 - (0.5 - 1 / (1 + h.X))) < 1e-12
        assert h.q1_l1 < 1e-12
    assert scan[-1].q2_limit_estimate < scan[0].q2_limit_estimate
    assert tails_flatten(scan)


def test_hypotheses_monotone(weid):
    scan = hypotheses_scan(weid, None, 1.0, (2.0, 4.0, 8.0, 16.0, 32.0))
    vals = [h.q1_l1 for h in scan]
    inc = np.diff(vals)
    assert np.all(inc >= 0) and np.all(np.diff(inc) <= 0)


def test_hypotheses_non_l1_does_not_flatten():
    co = from_callables("1", "0", "2")
    assert not tails_flatten(hypotheses_scan(co, None, 1.0, X_LIST))


def test_hypotheses_domain(weid):
    with pytest.raises(OutOfDomain):
        hypotheses_scan(weid, None, 5.0, (4.0, 8.0))


def test_h_free_exact():
    m = h_monitor(constant(), None, 1.0, np.linspace(0.5, 50, 60))
    for hs in m.h_values.values():
        assert np.ptp(hs) < 1e-12
    assert abs(m.h_values["s"][0] - 1) < 1e-14
    assert m.max_variation < 1e-12 and m.certified


@pytest.mark.parametrize("lam", [0.3, 2.0, 17.0])
def test_h_conservation_free(lam):
    m = h_monitor(constant(), None, lam, np.linspace(1, 40, 40))
    for hs in m.h_values.values():
        assert np.ptp(hs) <= 1e-12 * max(hs)


def test_h_exp_potential_tail(weid):
    m = h_monitor(weid, None, 1.0, np.linspace(30, 130, 101))
    assert m.max_variation < 1e-3 and m.certified


def test_h_nonpositive():
    co = from_callables("1", "1/(1+x)", "1")
    with pytest.raises(NonpositiveH):
        h_monitor(co, Expr("1/(1+x)"), 0.05, [5.0, 10.0, 50.0])


def test_report_empty(weid):
    rep = weidmann_report(weid, None, [])
    assert rep.verdicts == [] and rep.rows() == [] and math.isnan(rep.fraction_in_n)


def test_report_rejects_nonpositive(weid):
    with pytest.raises(OutOfDomain):
        weidmann_report(weid, None, [-1.0])


def test_negative_lambda_not_in_n(weid):
    pol = ClassifyPolicy(x_grid=tuple(2.0**k for k in range(7)))
    assert classify_lambda(weid, -1.0, pol).kind is not Verdict.IN_N


def test_report_and_consistency(weid):
    rep = weidmann_report(weid, None, [1.0, 3.0])
    assert rep.passed and rep.fraction_in_n == 1.0
    assert rep.hypothesis_sets == {"asymptotic": True, "window": True}
    # certified monitors plus the window conditions go with InN
    crit = criteria_scan(weid, 1.0, 2.0, 40.0, 1.0)
    for mon, ver in zip(rep.monitors, rep.verdicts):
        if mon.certified and crit.stolz_conditions:
            assert ver.kind is Verdict.IN_N
    d = rep.to_dict()
    assert len(d["rows"]) == 2 and d["passed"]
