import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slspec.core import (
    CallablePQR,
    CoefficientSet,
    ConstantPQR,
    Segment,
    SolutionState,
    _norm_integrals,
    constant,
    eval_coefficients,
    from_callables,
    fundamental_pair,
    initial_state,
    propagate,
    transfer_matrix,
    wronskian,
)
from slspec.errors import MismatchedStates, OutOfDomain, ValidationError
from slspec.expr import Expr
from slspec.qtree import homogeneous_transfer_matrix


def test_eval_coefficients_tree(tree2):
    assert eval_coefficients(tree2, 0.5) == (1.0, 0.0, 1.0)
    assert eval_coefficients(tree2, 1.5) == (2.0, 0.0, 2.0)
    # right limit at a boundary
    assert eval_coefficients(tree2, 1.0) == (2.0, 0.0, 2.0)


def test_eval_coefficients_free(free):
    for x in (0.1, 3.0, 1e6):
        assert eval_coefficients(free, x) == (1.0, 0.0, 1.0)
    with pytest.raises(OutOfDomain):
        eval_coefficients(free, -1.0)


def test_propagate_linear(free):
    st = propagate(free, SolutionState(0.0, 0j, 1 + 0j, 0j), 2.0)
    assert abs(st.u - 2) < 1e-14 and abs(st.pu - 1) < 1e-14
    assert abs(st.norm_sq - 8 / 3) < 1e-13


def test_propagate_cos(free):
    st = propagate(free, SolutionState(0.0, 1 + 0j, 0j, 1 + 0j), math.pi)
    assert abs(st.u + 1) < 1e-13 and abs(st.pu) < 1e-13


def test_tree_cell_norms_halve(tree2):
    st = SolutionState(0.0, 0j, 1 + 0j, complex(math.pi**2))
    prev, inc = 0.0, []
    for n in range(1, 10):
        st = propagate(tree2, st, float(n))
        inc.append(st.norm_sq - prev)
        prev = st.norm_sq
    ratios = np.array(inc[1:]) / np.array(inc[:-1])
    assert np.allclose(ratios, 0.5, rtol=1e-9)


def test_fundamental_pair_free(free):
    c, s = fundamental_pair(free, 0j, 1.0)
    assert abs(c.u - 1) < 1e-14 and abs(c.pu) < 1e-14
    assert abs(s.u - 1) < 1e-14 and abs(s.pu - 1) < 1e-14
    c, s = fundamental_pair(free, 0j, 10.0)
    assert abs(s.norm_sq - 1000 / 3) < 1e-10 and abs(c.norm_sq - 10) < 1e-12
    lam, x = 2.3, 7.1
    c, s = fundamental_pair(free, complex(lam), x)
    k = math.sqrt(lam)
    assert abs(c.u - math.cos(k * x)) < 1e-12
    assert abs(s.u - math.sin(k * x) / k) < 1e-12


def test_fundamental_pair_callable_matches_exact():
    f = from_callables("1", "0", "1")
    c1, s1 = fundamental_pair(f, 1.3 + 0.2j, 12.0, 1e-11)
    c0, s0 = fundamental_pair(constant(), 1.3 + 0.2j, 12.0)
    for a, b in ((c1, c0), (s1, s0)):
        assert abs(a.u - b.u) < 1e-8 and abs(a.pu - b.pu) < 1e-8
        assert abs(a.norm_sq - b.norm_sq) < 1e-8 * b.norm_sq


def test_wronskian_examples(free):
    c, s = fundamental_pair(free, 0.7 + 0.3j, 4.2)
    assert abs(wronskian(c, s) - 1) < 1e-12
    assert wronskian(c, c) == 0
    u = propagate(free, SolutionState(0.0, 1 + 0j, 0j, 1 + 0j), 0.7)
    v = propagate(free, SolutionState(0.0, 0j, 1 + 0j, 1 + 0j), 0.7)
    assert abs(wronskian(u, v) - 1) < 1e-14
    with pytest.raises(MismatchedStates):
        wronskian(c, propagate(free, s, 5.0))


def test_transfer_matrix_examples(free, tree2):
    T = transfer_matrix(free, 0j, 0.0, 1.0)
    assert np.allclose(T.entries, [[1, 1], [0, 1]], atol=1e-14)
    assert np.allclose(transfer_matrix(tree2, 2 + 1j, 3.0, 3.0).entries, np.eye(2))


def test_transfer_matrix_tree_period(tree2):
    # (u, pu) chart -> (u', u) chart; p = 1 on [0, 1) and 2 after the vertex
    for z in (4.0, math.pi**2, 2.5 + 0.7j, 1e-6):
        T = transfer_matrix(tree2, complex(z), 0.0, 1.0).entries
        M = homogeneous_transfer_matrix(2, 1.0, z).entries
        conv = np.array([[T[1, 1] / 2, T[1, 0] / 2], [T[0, 1], T[0, 0]]])
        assert np.allclose(conv, M, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-3, 3), st.floats(0.01, 2), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(-2, 2), st.floats(0.05, 5.0)
)
def test_const_step_matches_adaptive(zr, zi, p, r, q, L):
    co = CoefficientSet(0.0, 10.0, (Segment(0.0, 10.0, ConstantPQR(p, q, r)),))
    ca = CoefficientSet(0.0, 10.0, (Segment(0.0, 10.0, CallablePQR(p, q, r)),))
    z = complex(zr, zi)
    a = propagate(co, SolutionState(0.0, 0.3 + 0j, 1 + 0j, z), L)
    b = propagate(ca, SolutionState(0.0, 0.3 + 0j, 1 + 0j, z), L, 1e-11)
    scale = 1 + abs(a.u) + abs(a.pu)
    assert abs(a.u - b.u) < 1e-8 * scale and abs(a.pu - b.pu) < 1e-8 * scale
    assert abs(a.norm_sq - b.norm_sq) < 1e-7 * (1 + a.norm_sq)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 4))
def test_norm_integrals_match_quadrature(wr, wi, L):
    from scipy.integrate import quad

    w = complex(wr, wi)
    cc, ss, cs = _norm_integrals(w, L)
    import cmath

    C = lambda x: cmath.cos(w * x)  # noqa: E731
    S = lambda x: cmath.sin(w * x) / w if w != 0 else x  # noqa: E731
    ref_cc = quad(lambda x: abs(C(x)) ** 2, 0, L, epsrel=1e-13)[0]
    ref_ss = quad(lambda x: abs(S(x)) ** 2, 0, L, epsrel=1e-13)[0]
    ref_cs_re = quad(lambda x: (C(x) * S(x).conjugate()).real, 0, L, epsrel=1e-13, epsabs=1e-15)[0]
    ref_cs_im = quad(lambda x: (C(x) * S(x).conjugate()).imag, 0, L, epsrel=1e-13, epsabs=1e-15)[0]
    assert abs(cc - ref_cc) < 1e-9 * (1 + ref_cc)
    assert abs(ss - ref_ss) < 1e-9 * (1 + ref_ss)
    assert abs(cs - complex(ref_cs_re, ref_cs_im)) < 1e-9 * (1 + abs(cs) + math.sqrt(ref_cc * ref_ss))


def test_accumulator_additivity(free, weid):
    for co in (free, weid):
        z = 1.7 + 0.1j
        s0 = SolutionState(0.0, 0j, 1 + 0j, z)
        direct = propagate(co, s0, 9.0)
        split = propagate(co, propagate(co, s0, 4.0), 9.0)
        assert abs(direct.norm_sq - split.norm_sq) < 1e-8 * direct.norm_sq
        assert abs(direct.dnorm_sq - split.dnorm_sq) < 1e-8 * direct.dnorm_sq


def test_accumulators_nondecreasing(tree2):
    st = SolutionState(0.0, 1 + 0j, 0j, 9.0 + 0j)
    prev = (0.0, 0.0)
    for x in np.linspace(0.3, 20, 40):
        st = propagate(tree2, st, float(x), renormalize=False)
        assert st.norm_sq >= prev[0] and st.dnorm_sq >= prev[1]
        prev = (st.norm_sq, st.dnorm_sq)


def test_real_data_stays_real(weid, tree2):
    for co in (weid, tree2):
        st = propagate(co, SolutionState(0.0, 1 + 0j, 0.5 + 0j, 3.0 + 0j), 17.0)
        assert abs(st.u.imag) <= 1e-14 * (1 + abs(st.u)) and abs(st.pu.imag) <= 1e-14 * (1 + abs(st.pu))


def test_renormalize_keeps_true_values(free):
    s0 = SolutionState(0.0, 0j, 1 + 0j, -4 + 0j)
    plain = propagate(free, s0, 30.0)
    renorm = propagate(free, s0, 30.0, renormalize=True)
    assert renorm.log_scale > 0
    assert abs(renorm.u * math.exp(renorm.log_scale) - plain.u) < 1e-9 * abs(plain.u)
    assert abs(renorm.true_norm_sq - plain.norm_sq) < 1e-9 * plain.norm_sq


def test_backward_propagation_inverts(weid):
    s0 = SolutionState(0.0, 0.4 + 0j, 1 + 0j, 2 + 0.5j)
    fwd = propagate(weid, s0, 6.0)
    back = propagate(weid, fwd, 0.0)
    assert abs(back.u - s0.u) < 1e-8 and abs(back.pu - s0.pu) < 1e-8


def test_validation_errors():
    with pytest.raises(ValidationError):
        ConstantPQR(-1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        CoefficientSet(0.0, 2.0, (Segment(0.0, 1.0, ConstantPQR(1, 0, 1)),))
    with pytest.raises(ValidationError):
        from_callables("1", "0", "x - 5", 0.0, 10.0)
    with pytest.raises(ValidationError):
        from_callables("1", "import os", "1")


def test_json_round_trip(tree2, weid):
    for co in (tree2, weid):
        doc = co.to_dict()
        back = CoefficientSet.from_dict(doc)
        for x in (0.3, 2.5, 7.75):
            for u, v in zip(eval_coefficients(co, x), eval_coefficients(back, x)):
                assert abs(u - v) <= 1e-15 * max(1.0, abs(v))
    assert constant().to_dict()["b"] == "inf"


def test_expr_pickles_and_evaluates():
    e = Expr("2^floor(x) * exp(-x) + sqrt(pi)")
    assert abs(e(1.5) - (2 * math.exp(-1.5) + math.sqrt(math.pi))) < 1e-15
    assert pickle.loads(pickle.dumps(e)) == e


def test_initial_state_default(free):
    st = initial_state(free, 1j, 0.0, 1.0)
    assert st.x == 0.0 and st.norm_sq == 0.0


def test_callable_coefficients_pickle():
    co = from_callables("1 + exp(-x)", "sin(x)", "2")
    back = pickle.loads(pickle.dumps(co))
    assert back.segments[0].kind.at(1.3) == co.segments[0].kind.at(1.3)
    assert CallablePQR(1.0, lambda x: 2 * x, 3).at(0.5) == (1.0, 1.0, 3)
