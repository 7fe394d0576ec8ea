"""Acceptance criteria, one test per criterion.

Each test prints ``ACCEPTANCE <n> PASS|FAIL <detail> (<seconds>s / budget)``;
the lines are repeated in the terminal summary.  Run the file directly to get
only the report lines.
"""
import cmath
import math
import random
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from slspec.core import constant, from_callables, initial_state, propagate, transfer_matrix, wronskian
from slspec.qtree import (
    TreeSpec,
    band_spectrum,
    band_spectrum_numeric,
    decomposition_multiplicities,
    eigenfunction_decay_ratio,
    floquet_exponent,
    homogeneous_transfer_matrix,
    tree_ac_scan,
    tree_to_sl,
)
from slspec.subordinacy import JL_LOWER, JL_UPPER, ClassifyPolicy, Verdict, classify_lambda, derivative_bound_check, jl_ratio
from slspec.weidmann import h_monitor, weidmann_report
from slspec.weyl import im_identity_residual, m_function, rotate_bc

RESULTS: list[str] = []

TREE_X_MAX = 990.0


@contextmanager
def criterion(n: int, budget: float):
    info: dict = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt < budget
        status = "PASS" if ok and within else "FAIL"
        if ok and not within:
            info["detail"] += " runtime over budget"
        line = f"ACCEPTANCE {n:2d} {status} {info['detail'].strip()} ({dt:.2f}s / {budget:g}s)"
        RESULTS.append(line)
        print(line)
    assert dt < budget, line


def test_criterion_01_band_edges():
    with criterion(1, 1.0) as info:
        b, c = 2, 1.0
        theta = math.acos(2 / (math.sqrt(2) + 1 / math.sqrt(2)))
        num = band_spectrum_numeric(b, c, (4 * math.pi + theta) ** 2 * 1.0001)
        closed = [((math.pi * (l - 1) + theta) ** 2, (math.pi * l - theta) ** 2) for l in range(1, 6)]
        err = max(max(abs(a0 - b0), abs(a1 - b1)) for (a0, a1), (b0, b1) in zip(closed, num.bands[:5]))
        assert len(num.bands) >= 5
        assert err < 1e-8
        assert abs(band_spectrum(b, c, 5).theta - 0.339837) < 5e-7
        assert abs(num.theta - theta) < 1e-8
        info["detail"] = f"max edge error {err:.1e}, theta {theta:.6f}"


def test_criterion_02_degenerate_tree():
    with criterion(2, 1.0) as info:
        bs = band_spectrum(1, 1.0, 5)
        num = band_spectrum_numeric(1, 1.0, (4 * math.pi) ** 2 + 1)
        assert bs.theta == 0.0
        for bsp in (bs, num):
            assert bsp.bands[0][0] == 0.0
            assert bsp.bands[4][1] == pytest.approx((5 * math.pi) ** 2, abs=0.0)
            assert all(w == 0.0 for w in (lo2 - hi1 for (_, hi1), (lo2, _) in zip(bsp.bands[:5], bsp.bands[1:5])))
        info["detail"] = "theta = 0, bands tile [0, (5 pi)^2]"


def test_criterion_03_jl_inequality():
    with criterion(3, 30.0) as info:
        free = constant()
        tree = tree_to_sl(TreeSpec.homogeneous(2, 1.0))
        ratios = []
        for lam in (0.5, 1.0, 2.0, 4.0):
            for x in (20.0, 40.0, 80.0):
                ratios.append(jl_ratio(free, lam, x))
        for lam in (2.0, 4.0, 6.0):
            for x in (20.0, 40.0, 80.0):
                ratios.append(jl_ratio(tree, lam, x, X_max=TREE_X_MAX))
        lo, hi = min(ratios), max(ratios)
        assert JL_LOWER - 1e-3 <= lo and hi <= JL_UPPER + 1e-3
        info["detail"] = f"{len(ratios)} ratios in [{lo:.4f}, {hi:.4f}]"


def test_criterion_04_im_identity():
    with criterion(4, 5.0) as info:
        free = constant()
        worst = 0.0
        for z in (1 + 1j, 2 + 0.5j):
            res = im_identity_residual(free, z, 40.0)
            est = m_function(free, z, 40.0)
            # the exact value lies in the Weyl disk of the truncated problem
            assert abs(est.m - 1j * cmath.sqrt(z)) <= est.radius
            worst = max(worst, res)
        assert worst < 1e-6
        info["detail"] = f"max residual {worst:.1e}"


def test_criterion_05_moebius():
    with criterion(5, 1.0) as info:
        rng = random.Random(20240101)
        worst = 0.0
        for _ in range(100):
            m = complex(rng.uniform(-5, 5), rng.uniform(0.05, 5))
            a, b, g = (rng.uniform(0, math.pi) for _ in range(3))
            rt = rotate_bc(rotate_bc(m, a, b), b, a)
            comp = rotate_bc(rotate_bc(m, b, g), a, b)
            direct = rotate_bc(m, a, g)
            e1 = abs(rt - m) / max(1.0, abs(m))
            e2 = abs(comp - direct) / max(1.0, abs(direct))
            worst = max(worst, e1, e2)
        assert worst < 1e-12
        info["detail"] = f"100 triples, max relative error {worst:.1e}"


def test_criterion_06_classification():
    with criterion(6, 60.0) as info:
        free = constant()
        tree = tree_to_sl(TreeSpec.homogeneous(2, 1.0))
        pol = ClassifyPolicy(X_max=TREE_X_MAX)
        v = {
            "free 1": classify_lambda(free, 1.0).kind,
            "free -1": classify_lambda(free, -1.0).kind,
            "tree 4": classify_lambda(tree, 4.0, pol).kind,
            "tree 9": classify_lambda(tree, 9.0, pol).kind,
            "tree pi^2": classify_lambda(tree, math.pi**2, pol).kind,
        }
        ratio = eigenfunction_decay_ratio(2, 1.0)
        assert v["free 1"] is Verdict.IN_N
        assert v["free -1"] is not Verdict.IN_N
        assert v["tree 4"] is Verdict.IN_N
        assert v["tree 9"] is not Verdict.IN_N
        assert v["tree pi^2"] is Verdict.SUBORDINATE_DIRICHLET
        assert abs(ratio - 0.5) <= 0.05
        info["detail"] = ", ".join(f"{k}: {k2.value}" for k, k2 in v.items()) + f", decay {ratio:.4f}"


def test_criterion_07_floquet_value():
    with criterion(7, 1.0) as info:
        a = floquet_exponent(2, 1.0, math.pi**2)
        assert abs(a.real - math.log(math.sqrt(2))) < 1e-9
        assert abs(a.real - 0.346574) < 1e-6
        info["detail"] = f"Re alpha = {a.real:.12f}"


def test_criterion_08_derivative_bound():
    with criterion(8, 30.0) as info:
        cases = [
            (constant(), 0.0, np.linspace(1.5, 40.0, 50)),
            (constant(), 1.0, np.linspace(1.5, 40.0, 50)),
            (tree_to_sl(TreeSpec.homogeneous(2, 1.0)), 4.0, np.linspace(1.5, 40.0, 50)),
            (from_callables("1", "0", "exp(x)", 0.0, 60.0), 1.0, np.linspace(1.5, 8.0, 50)),
        ]
        checked = 0
        for co, lam, xs in cases:
            for u in ("s", "c"):
                for x in xs:
                    r = derivative_bound_check(co, lam, u, float(x), tol=1e-6)
                    assert r.holds, (lam, u, x, r)
                    checked += 1
        info["detail"] = f"{checked} windows hold"


def test_criterion_09_weidmann():
    with criterion(9, 60.0) as info:
        co = from_callables("1", "exp(-x)", "1")
        grid = np.linspace(30.0, 130.0, 101)
        variations = [h_monitor(co, None, lam, grid).max_variation for lam in (0.5, 1.0, 2.0)]
        assert max(variations) < 1e-3
        rep = weidmann_report(co, None, [0.5, 1.0, 2.0, 4.0])
        assert rep.passed and rep.fraction_in_n == 1.0
        info["detail"] = f"max tail variation {max(variations):.1e}, fraction InN {rep.fraction_in_n:.2f}"


def test_criterion_10_l1_perturbation():
    with criterion(10, 60.0) as info:
        res = tree_ac_scan((2, 1.0), "exp(-x)", [2.0, 4.0, 6.0])
        kinds = [r.verdict.kind for r in res]
        assert all(k is Verdict.IN_N for k in kinds)
        info["detail"] = "lambda 2, 4, 6: " + ", ".join(k.value for k in kinds)


def test_criterion_11_conservation():
    with criterion(11, 10.0) as info:
        tol = 1e-11
        ops = [
            ("free", constant(), 100.0),
            ("tree", tree_to_sl(TreeSpec.homogeneous(2, 1.0)), 100.0),
            ("exp potential", from_callables("1", "exp(-x)", "1"), 100.0),
            # the local frequency sqrt(lam) e^{x/2} limits the resolvable range
            ("exp weight", from_callables("1", "0", "exp(x)", 0.0, 60.0), 10.0),
        ]
        drift = 0.0
        for _, co, X in ops:
            for lam in (1.0, 4.0) if X > 10 else (1.0,):
                c = initial_state(co, lam, 1.0, 0.0)
                s = initial_state(co, lam, 0.0, 1.0)
                for x in np.linspace(0.5, X, 60):
                    c = propagate(co, c, float(x), tol)
                    s = propagate(co, s, float(x), tol)
                    drift = max(drift, abs(wronskian(c, s) - 1))
        assert drift < 1e-9

        det_err = 0.0
        tree = tree_to_sl(TreeSpec.homogeneous(2, 1.0))
        for z in (0.3, 4.0, 9.0, 2 + 1j):
            for co, x0, x1 in ((constant(), 0.0, 7.0), (tree, 0.0, 5.0), (ops[2][1], 0.0, 10.0)):
                det_err = max(det_err, abs(transfer_matrix(co, complex(z), x0, x1, tol).det - 1))
            for b in (1, 2, 3):
                det_err = max(det_err, abs(homogeneous_transfer_matrix(b, 1.0, z).det - 1 / b))
        assert det_err < 1e-9

        rng = random.Random(11)
        for _ in range(20):
            N = rng.randint(1, 15)
            bs = [1] + [rng.randint(2, 6) for _ in range(N)]
            ts = np.cumsum([0.0] + [rng.uniform(0.2, 2.0) for _ in range(N)])
            mult = decomposition_multiplicities(TreeSpec(tuple(ts), tuple(bs)), N)
            running = 0
            for k, _, m in mult:
                running += m
                assert running == math.prod(bs[: k + 1])
        info["detail"] = f"Wronskian drift {drift:.1e}, det error {det_err:.1e}, 20 trees telescope"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
