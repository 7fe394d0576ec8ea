"""Asymptotically Schrodinger-like coefficients on ``(0, inf)``.

Two ingredients: partial integrals of the defects ``|1 - 1/p|``, ``|1 - r|``,
``|q1|`` and ``|q2'|`` over ``[c, X]`` (flattening tails are the numerical
evidence of L1 membership), and the monitor
``h = (lam - q2) u^2 + (pu')^2`` whose logarithm should have small total
variation far out when the hypotheses hold.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .core import DEFAULT_TOL, CoefficientSet, SolutionState, eval_coefficients, propagate
from .errors import NonpositiveH, OutOfDomain
from .subordinacy import ClassifyPolicy, CriteriaReport, SubordinacyVerdict, Verdict, classify_lambda, criteria_scan

log = logging.getLogger(__name__)

Evaluator = Callable[[float], float]

DEFAULT_H_THRESHOLD = 1e-3


def _zero(x: float) -> float:
    return 0.0


@dataclass(frozen=True)
class QSplit:
    """``q = q1 + q2`` with ``dq2 = q2'``; ``q1=None`` means ``q1 = q - q2``."""

    q1: Optional[Evaluator] = None
    q2: Evaluator = _zero
    dq2: Evaluator = _zero


@dataclass(frozen=True)
class WeidmannHypotheses:
    c: float
    l1_p_defect: float
    l1_r_defect: float
    q1_l1: float
    q2_prime_l1: float
    q2_limit_estimate: float
    X: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _integral(coeffs: CoefficientSet, f, lo: float, hi: float) -> float:
    """``int_lo^hi f(p, q, r, y) dy`` by adaptive quadrature between breakpoints."""
    pts = [lo] + coeffs.breakpoints(lo, hi) + [hi]
    total = 0.0
    for xa, xb in zip(pts, pts[1:]):
        kind = coeffs.segments[coeffs.segment_index(xa)].kind

        def g(y, kind=kind):
            p, q, r = kind.at(y)
            return f(p, q, r, y)

        total += quad(g, xa, xb, limit=200, epsabs=1e-14, epsrel=1e-12)[0]
    return total


def hypotheses_scan(
    coeffs: CoefficientSet, q_split: Optional[QSplit], c: float, X_list: Sequence[float]
) -> list[WeidmannHypotheses]:
    """Cumulative defect integrals over ``[c, X]`` for each ``X`` in ``X_list``."""
    split = q_split or QSplit()
    q2, dq2 = split.q2, split.dq2
    if split.q1 is None:
        q1f = lambda p, q, r, y: abs(q - q2(y))  # noqa: E731
    else:
        q1 = split.q1
        q1f = lambda p, q, r, y: abs(q1(y))  # noqa: E731
    integrands = (
        lambda p, q, r, y: abs(1.0 - 1.0 / p),
        lambda p, q, r, y: abs(1.0 - r),
        q1f,
        lambda p, q, r, y: abs(dq2(y)),
    )
    acc = [0.0] * 4
    prev = c
    out = []
    for X in X_list:
        if X < prev or not coeffs.a <= c < coeffs.b or X >= coeffs.b:
            raise OutOfDomain(f"X_list must ascend from c={c} inside the domain")
        for i, f in enumerate(integrands):
            acc[i] += _integral(coeffs, f, prev, X) if X > prev else 0.0
        prev = X
        out.append(WeidmannHypotheses(float(c), acc[0], acc[1], acc[2], acc[3], abs(q2(X)), float(X)))
    return out


def tails_flatten(scan: Sequence[WeidmannHypotheses], rel: float = 1e-9) -> bool:
    """Nondecreasing sequences with nonincreasing increments, ``q2(X)`` shrinking."""
    if len(scan) < 3:
        return False
    for name in ("l1_p_defect", "l1_r_defect", "q1_l1", "q2_prime_l1"):
        vals = [getattr(h, name) for h in scan]
        inc = np.diff(vals)
        slack = rel * (1.0 + abs(vals[-1]))
        if np.any(inc < -slack) or np.any(np.diff(inc) > slack):
            return False
    lim = [h.q2_limit_estimate for h in scan]
    return all(b <= a + rel for a, b in zip(lim, lim[1:]))


@dataclass
class HMonitor:
    lam: float
    x_grid: list[float]
    h_values: dict[str, list[float]]
    log_h_variation_tail: dict[str, float]
    threshold: float = DEFAULT_H_THRESHOLD

    @property
    def max_variation(self) -> float:
        return max(self.log_h_variation_tail.values())

    @property
    def certified(self) -> bool:
        return self.max_variation < self.threshold

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "log_h_variation_tail": self.log_h_variation_tail,
            "certified": self.certified,
        }


def h_monitor(
    coeffs: CoefficientSet,
    q2: Optional[Evaluator],
    lam: float,
    x_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    threshold: float = DEFAULT_H_THRESHOLD,
) -> HMonitor:
    """Evaluate ``h`` for ``c`` and ``s`` on ``x_grid``.

    The tail variation is ``sum |ln h_{k+1} - ln h_k|`` over the second half
    of the grid.

    Raises
    ------
    NonpositiveH
        If ``lam - q2(x) <= 0`` at a grid point.
    """
    q2 = q2 or _zero
    xs = [float(x) for x in x_grid]
    bad = [x for x in xs if lam - q2(x) <= 0]
    if bad:
        raise NonpositiveH(f"lam - q2 <= 0 at x={bad[0]} (lam={lam})")
    h_values, var = {}, {}
    for name, (u0, pu0) in (("c", (1.0, 0.0)), ("s", (0.0, 1.0))):
        st = SolutionState(coeffs.a, complex(u0), complex(pu0), complex(lam))
        hs = []
        for x in xs:
            st = propagate(coeffs, st, x, tol)
            u, pu = st.u.real, st.pu.real
            hs.append((lam - q2(x)) * u * u + pu * pu)
        lh = np.log(hs)
        tail = lh[len(lh) // 2 :]
        h_values[name] = hs
        var[name] = float(np.sum(np.abs(np.diff(tail))))
    return HMonitor(float(lam), xs, h_values, var, threshold)


@dataclass
class WeidmannReport:
    lambdas: list[float] = field(default_factory=list)
    verdicts: list[SubordinacyVerdict] = field(default_factory=list)
    monitors: list[HMonitor] = field(default_factory=list)
    hypotheses: list[WeidmannHypotheses] = field(default_factory=list)
    criteria: Optional[CriteriaReport] = None
    # which hypothesis family held on the scanned range
    hypothesis_sets: dict[str, bool] = field(default_factory=dict)

    @property
    def fraction_in_n(self) -> float:
        if not self.verdicts:
            return math.nan
        return sum(v.kind is Verdict.IN_N for v in self.verdicts) / len(self.verdicts)

    @property
    def passed(self) -> bool:
        """All ``lam > 0`` on the grid classified InN."""
        return all(v.kind is Verdict.IN_N for v in self.verdicts)

    def rows(self) -> list[dict]:
        out = []
        for lam, v, mon in zip(self.lambdas, self.verdicts, self.monitors):
            d = v.to_dict()
            d.pop("samples", None)
            d["h_variation"] = mon.max_variation if mon else math.nan
            d["h_certified"] = mon.certified if mon else False
            out.append(d)
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "fraction_in_n": self.fraction_in_n,
            "hypothesis_sets": self.hypothesis_sets,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "rows": self.rows(),
        }


def default_policy() -> ClassifyPolicy:
    return ClassifyPolicy(x_grid=tuple(2.0**k for k in range(7)))


def weidmann_report(
    coeffs: CoefficientSet,
    q_split: Optional[QSplit] = None,
    lambda_grid: Sequence[float] = (),
    policy: Optional[ClassifyPolicy] = None,
    c: float = 1.0,
    X_list: Sequence[float] = (11.0, 21.0, 41.0, 81.0),
    h_grid: Optional[Sequence[float]] = None,
) -> WeidmannReport:
    """Classify every ``lam > 0`` of ``lambda_grid`` and attach the evidence.

    Both hypothesis families are evaluated: the defect integrals of the
    asymptotic form (``"asymptotic"``) and the window conditions together with
    monotone ``r`` (``"window"``).  Neither gates the classification.
    """
    rep = WeidmannReport()
    lams = [float(l) for l in lambda_grid]
    if not lams:
        return rep
    if any(l <= 0 for l in lams):
        raise OutOfDomain("weidmann_report takes positive lambdas only")
    policy = policy or default_policy()
    split = q_split or QSplit()
    rep.hypotheses = hypotheses_scan(coeffs, split, c, X_list)
    rep.criteria = criteria_scan(coeffs, lams[0], c + 1.0, c + 41.0, 1.0)
    rep.hypothesis_sets = {
        "asymptotic": tails_flatten(rep.hypotheses),
        "window": rep.criteria.stolz_conditions and rep.criteria.r_monotone,
    }
    grid = list(h_grid) if h_grid is not None else list(np.linspace(30.0, 130.0, 101))
    for lam in lams:
        try:
            mon = h_monitor(coeffs, split.q2, lam, grid, policy.tol)
        except NonpositiveH as exc:
            log.warning("h monitor skipped: %s", exc)
            mon = None
        ver = classify_lambda(coeffs, lam, policy)
        log.info("lam=%g verdict=%s", lam, ver.kind)
        rep.lambdas.append(lam)
        rep.verdicts.append(ver)
        rep.monitors.append(mon)
    return rep
