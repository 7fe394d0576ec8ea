"""Subordinacy and boundary values of the m-function on the real axis.

The central device is the pairing of a length scale ``x`` with the distance
``eps = (2 ||s||_(a,x) ||c||_(a,x))^-1`` from the real axis.  Along this pairing
``|m(lam + i eps)| ||s|| / ||c||`` stays within ``[5 - sqrt 24, 5 + sqrt 24]``,
which lets a single geometric x-grid drive both the m-function samples and the
windowed solution norms that decide whether a subordinate solution exists.

Verdicts are numerical classifications over finite data and always carry the
samples they were derived from.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .core import (
    DEFAULT_TOL,
    CoefficientSet,
    SolutionState,
    eval_coefficients,
    fundamental_pair,
    propagate,
)
from .errors import (
    DegenerateNorm,
    NonRealSolution,
    OutOfDomain,
    RangeExceeded,
    WindowOutOfDomain,
)
from .weyl import m_function

JL_LOWER = 5.0 - math.sqrt(24.0)
JL_UPPER = 5.0 + math.sqrt(24.0)


class Verdict(str, enum.Enum):
    IN_N = "InN"
    SUBORDINATE_DIRICHLET = "SubordinateDirichlet"
    SUBORDINATE_OTHER = "SubordinateOther"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


# ----------------------------------------------------------------------------
# eps <-> x
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsXPair:
    lam: float
    x: float
    eps: float
    s_norm: float
    c_norm: float
    log_s_norm: float = math.nan
    log_c_norm: float = math.nan


def _real_pair(coeffs, lam, x, tol):
    if not coeffs.a < x < coeffs.b:
        raise OutOfDomain(f"x={x} not in ({coeffs.a}, {coeffs.b})")
    z = complex(lam)
    c = propagate(coeffs, SolutionState(coeffs.a, 1 + 0j, 0j, z), x, tol, renormalize=True)
    s = propagate(coeffs, SolutionState(coeffs.a, 0j, 1 + 0j, z), x, tol, renormalize=True)
    return c, s


def eps_from_x(coeffs: CoefficientSet, lam: float, x: float, tol: float = DEFAULT_TOL) -> EpsXPair:
    """``eps_lam(x) = (2 ||s|| ||c||)^-1`` with both norms over ``(a, x)``."""
    c, s = _real_pair(coeffs, lam, x, tol)
    if s.norm_sq <= 0.0:
        raise DegenerateNorm(f"||s|| vanishes at x={x}")
    ls, lc = 0.5 * s.log_norm_sq, 0.5 * c.log_norm_sq
    eps = math.exp(-math.log(2.0) - ls - lc)
    return EpsXPair(float(lam), float(x), eps, _safe_exp(ls), _safe_exp(lc), ls, lc)


def _safe_exp(v: float) -> float:
    return math.exp(v) if v < 709 else math.inf


def x_from_eps(
    coeffs: CoefficientSet,
    lam: float,
    eps: float,
    tol: float = 1e-8,
    x_max: Optional[float] = None,
    prop_tol: float = DEFAULT_TOL,
) -> EpsXPair:
    """Invert :func:`eps_from_x` by bracketing and root finding in ``x``.

    Raises
    ------
    RangeExceeded
        if ``eps`` is only reached beyond ``x_max``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = coeffs.a
    if x_max is None:
        x_max = min(coeffs.b, a + 2.0**20)
    x_max = min(x_max, _below(coeffs.b))
    target = math.log(eps)

    def f(x):
        return math.log(eps_from_x(coeffs, lam, x, prop_tol).eps) - target

    lo, hi = a, a + min(1.0, (x_max - a) / 2)
    while f(hi) > 0:
        lo = hi
        if hi >= x_max:
            raise RangeExceeded(f"eps={eps} needs x beyond {x_max}")
        hi = min(a + 2 * (hi - a), x_max)
    if lo == a:
        # eps -> inf as x -> a; shrink towards a until the bracket is valid
        lo = a + (hi - a) / 2
        while f(lo) < 0:
            hi = lo
            lo = a + (lo - a) / 2
            if lo - a < 1e-300:
                break
    x = brentq(f, lo, hi, xtol=1e-15 * max(1.0, abs(hi)), rtol=4 * np.finfo(float).eps, maxiter=500)
    pair = eps_from_x(coeffs, lam, x, prop_tol)
    if abs(pair.eps - eps) > tol * eps:
        # brentq stops on x; polish with a few bisection steps on the residual
        for _ in range(200):
            if abs(pair.eps - eps) <= tol * eps:
                break
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
            x = mid
            pair = eps_from_x(coeffs, lam, x, prop_tol)
    return pair


def _below(b: float) -> float:
    if math.isinf(b):
        return b
    return b - 1e-9 * max(1.0, abs(b))


# ----------------------------------------------------------------------------
# m(lam + i eps) with adaptive truncation
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryM:
    m: complex
    X: float
    spread: float  # |m_Dirichlet - m_Neumann| at X
    converged: bool


def m_adaptive(
    coeffs: CoefficientSet,
    z: complex,
    X0: float,
    X_max: float,
    m_tol: float = 1e-6,
    tol: float = DEFAULT_TOL,
) -> BoundaryM:
    """m(z) with the truncation doubled until Dirichlet and Neumann cut-offs agree.

    Both truncated values lie on the Weyl circle at ``X`` and the true value is
    inside it, so their spread bounds the truncation error up to a factor 2.
    """
    X_cap = min(X_max, _below(coeffs.b))
    X = min(X0, X_cap)
    while True:
        md = m_function(coeffs, z, X, tol, "dirichlet", with_radius=False).m
        mn = m_function(coeffs, z, X, tol, "neumann", with_radius=False).m
        spread = abs(md - mn)
        ok = spread <= m_tol * abs(md)
        if ok or X >= X_cap:
            return BoundaryM(md, X, spread, ok)
        X = min(2 * X, X_cap)


def jl_ratio(
    coeffs: CoefficientSet,
    lam: float,
    x: float,
    tol: float = DEFAULT_TOL,
    m_tol: float = 1e-6,
    X_max: Optional[float] = None,
    trunc_factor: float = 8.0,
) -> float:
    """``|m(lam + i eps_lam(x))| ||s|| / ||c||``."""
    pair = eps_from_x(coeffs, lam, x, tol)
    X_max = X_max if X_max is not None else coeffs.a + 2.0**17
    bm = m_adaptive(coeffs, complex(lam, pair.eps), coeffs.a + trunc_factor * (x - coeffs.a), X_max, m_tol, tol)
    return abs(bm.m) * math.exp(pair.log_s_norm - pair.log_c_norm)


# ----------------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifyPolicy:
    """Thresholds and grids for :func:`classify_lambda`.

    ``x_grid`` holds offsets from ``a``; by default ``2^k`` for ``k = 0..10``.
    Grid points whose ``eps`` drops below ``eps_floor * max(1, |lam|)`` end the
    scan: such ``lam + i eps`` is numerically on the real axis.
    """

    x_grid: Optional[tuple[float, ...]] = None
    delta: float = 1e-3
    delta_sub: float = 1e-3
    tol: float = DEFAULT_TOL
    m_tol: float = 1e-4
    X_max: Optional[float] = None
    trunc_factor: float = 8.0
    stabilization: float = 0.1
    eps_floor: float = 1e-12
    jl_slack: float = 1e-3

    def grid(self, coeffs: CoefficientSet) -> list[float]:
        offsets = self.x_grid if self.x_grid is not None else tuple(2.0**k for k in range(11))
        X_max = self.truncation_cap(coeffs)
        # every grid point needs room for its initial truncation
        limit = coeffs.a + (X_max - coeffs.a) / self.trunc_factor
        return [coeffs.a + d for d in sorted(offsets) if d > 0 and coeffs.a + d <= limit]

    def truncation_cap(self, coeffs: CoefficientSet) -> float:
        cap = self.X_max if self.X_max is not None else coeffs.a + 2.0**17
        return min(cap, _below(coeffs.b))


@dataclass(frozen=True)
class GridSample:
    x: float
    eps: float
    m: complex
    X: float
    m_converged: bool
    jl: float
    s_over_c: float
    candidate_ratio: float
    candidate_angle: float


@dataclass
class SubordinacyVerdict:
    lam: float
    kind: Verdict
    samples: list[GridSample] = field(default_factory=list)
    im_m_extrapolated: float = math.nan
    thresholds: dict = field(default_factory=dict)
    note: str = ""

    @property
    def ratio_trace(self) -> list[tuple[float, float, float]]:
        return [(g.x, g.s_over_c, g.candidate_ratio) for g in self.samples]

    @property
    def m_trace(self) -> list[tuple[float, complex]]:
        return [(g.eps, g.m) for g in self.samples]

    @property
    def jl_min(self) -> float:
        return min((g.jl for g in self.samples), default=math.nan)

    @property
    def jl_max(self) -> float:
        return max((g.jl for g in self.samples), default=math.nan)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "verdict": self.kind.value,
            "im_m_extrapolated": self.im_m_extrapolated,
            "jl_min": self.jl_min,
            "jl_max": self.jl_max,
            "thresholds": self.thresholds,
            "note": self.note,
            "samples": [
                {
                    "x": g.x,
                    "eps": g.eps,
                    "m": {"re": g.m.real, "im": g.m.imag},
                    "X": g.X,
                    "m_converged": g.m_converged,
                    "jl": g.jl,
                    "s_over_c": g.s_over_c,
                    "candidate_ratio": g.candidate_ratio,
                    "candidate_angle": g.candidate_angle,
                }
                for g in self.samples
            ],
        }


def _norm_ratio(coeffs, lam, x, u0, pu0, tol) -> float:
    z = complex(lam)
    u = propagate(coeffs, SolutionState(coeffs.a, complex(u0), complex(pu0), z), x, tol, renormalize=True)
    v = propagate(coeffs, SolutionState(coeffs.a, complex(-pu0), complex(u0), z), x, tol, renormalize=True)
    return math.exp(0.5 * (u.log_norm_sq - v.log_norm_sq))


def _strictly_decreasing(vals: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(vals, vals[1:]))


def classify_lambda(coeffs: CoefficientSet, lam: float, policy: Optional[ClassifyPolicy] = None) -> SubordinacyVerdict:
    """Classify ``lam`` by the behaviour of ``m(lam + i eps)`` and windowed norms.

    * ``InN``: the last three ``Im m`` samples agree to ``stabilization``
      (relative), lie in ``(delta, 1/delta)``, and every JL ratio is in bounds.
    * ``SubordinateDirichlet``: ``||s|| / ||c||`` strictly decreases over the
      final decade of the grid and ends below ``delta_sub``.
    * ``SubordinateOther``: the same for the candidate solution whose initial
      slope is ``Re m`` at each sample, measured against its orthogonal partner.
    * ``Inconclusive`` otherwise.
    """
    policy = policy or ClassifyPolicy()
    a = coeffs.a
    X_max = policy.truncation_cap(coeffs)
    samples: list[GridSample] = []
    note = ""
    for x in policy.grid(coeffs):
        pair = eps_from_x(coeffs, lam, x, policy.tol)
        if not pair.eps > policy.eps_floor * max(1.0, abs(lam)):
            note = f"grid stopped at x={x}: eps={pair.eps:.3e} below floor"
            break
        bm = m_adaptive(coeffs, complex(lam, pair.eps), a + policy.trunc_factor * (x - a), X_max, policy.m_tol, policy.tol)
        s_over_c = math.exp(pair.log_s_norm - pair.log_c_norm)
        jl = abs(bm.m) * s_over_c
        angle = math.atan(bm.m.real) if math.isfinite(bm.m.real) else math.pi / 2
        cand = _norm_ratio(coeffs, lam, x, math.cos(angle), math.sin(angle), policy.tol)
        samples.append(GridSample(x, pair.eps, bm.m, bm.X, bm.converged, jl, s_over_c, cand, angle))

    thresholds = {
        "delta": policy.delta,
        "delta_sub": policy.delta_sub,
        "stabilization": policy.stabilization,
        "eps_floor": policy.eps_floor,
        "jl_slack": policy.jl_slack,
    }
    verdict = SubordinacyVerdict(float(lam), Verdict.INCONCLUSIVE, samples, thresholds=thresholds, note=note)
    if len(samples) < 3:
        verdict.note = (note + "; " if note else "") + "fewer than three usable samples"
        return verdict

    ims = [g.m.imag for g in samples[-3:]]
    verdict.im_m_extrapolated = ims[-1]
    lo, hi = min(ims), max(ims)
    stable = lo > 0 and (hi - lo) <= policy.stabilization * lo and all(g.m_converged for g in samples[-3:])
    in_range = policy.delta < lo and hi < 1.0 / policy.delta
    jl_ok = all(JL_LOWER - policy.jl_slack <= g.jl <= JL_UPPER + policy.jl_slack for g in samples)
    if stable and in_range and jl_ok:
        verdict.kind = Verdict.IN_N
        return verdict

    x_last = samples[-1].x
    tail = [g for g in samples if g.x - a >= (x_last - a) / 10.0]
    if len(tail) < 3:
        verdict.note = (note + "; " if note else "") + "final decade has fewer than three samples"
        return verdict
    sc = [g.s_over_c for g in tail]
    if _strictly_decreasing(sc) and sc[-1] < policy.delta_sub:
        verdict.kind = Verdict.SUBORDINATE_DIRICHLET
        return verdict
    cr = [g.candidate_ratio for g in tail]
    if _strictly_decreasing(cr) and cr[-1] < policy.delta_sub:
        verdict.kind = Verdict.SUBORDINATE_OTHER
        return verdict
    return verdict


# ----------------------------------------------------------------------------
# window quantities and the derivative bound
# ----------------------------------------------------------------------------


def window_integral(coeffs: CoefficientSet, f, lo: float, hi: float) -> float:
    """``int_lo^hi f(p, q, r, y) dy`` split at segment boundaries."""
    pts = [lo] + coeffs.breakpoints(lo, hi) + [hi]
    total = 0.0
    for xa, xb in zip(pts, pts[1:]):
        seg = coeffs.segments[coeffs.segment_index(xa)]
        if seg.is_constant:
            k = seg.kind
            total += f(k.p, k.q, k.r, 0.5 * (xa + xb)) * (xb - xa)
        else:
            kind = seg.kind

            def g(y, kind=kind):
                p, q, r = kind.at(y)
                return f(p, q, r, y)

            total += quad(g, xa, xb, limit=200, epsabs=0.0, epsrel=1e-12)[0]
    return total


def r_extrema(coeffs: CoefficientSet, lo: float, hi: float, samples: int = 257) -> tuple[float, float]:
    """Inf and sup of ``r`` on ``[lo, hi]``; exact on constant segments, sampled otherwise."""
    pts = [lo] + coeffs.breakpoints(lo, hi) + [hi]
    rmin, rmax = math.inf, -math.inf
    for xa, xb in zip(pts, pts[1:]):
        seg = coeffs.segments[coeffs.segment_index(xa)]
        if seg.is_constant:
            vals = [seg.kind.r]
        else:
            vals = [seg.kind.at(y)[2] for y in np.linspace(xa, xb, samples)]
        rmin, rmax = min(rmin, min(vals)), max(rmax, max(vals))
    return rmin, rmax


def P_window(coeffs: CoefficientSet, x: float) -> float:
    """``int_{x-1/2}^{x+1/2} 1/p``."""
    return window_integral(coeffs, lambda p, q, r, y: 1.0 / p, x - 0.5, x + 0.5)


def _check_window(coeffs, x):
    if not (coeffs.a < x - 1 and x + 1 < coeffs.b):
        raise WindowOutOfDomain(f"[{x - 1}, {x + 1}] not inside ({coeffs.a}, {coeffs.b})")


SolutionSelector = Union[str, tuple[float, float]]


def _initial_data(u: SolutionSelector) -> tuple[complex, complex]:
    if isinstance(u, str):
        key = u.lower()
        if key in ("s", "dirichlet"):
            return 0j, 1 + 0j
        if key in ("c", "neumann"):
            return 1 + 0j, 0j
        raise ValueError(f"unknown solution selector {u!r}")
    u0, pu0 = complex(u[0]), complex(u[1])
    if u0.imag != 0 or pu0.imag != 0:
        raise NonRealSolution("the bound is stated for real-valued solutions")
    return u0, pu0


@dataclass(frozen=True)
class DerivativeBound:
    lhs: float
    rhs: float
    holds: bool


def derivative_bound_check(
    coeffs: CoefficientSet,
    lam: float,
    u: SolutionSelector,
    x: float,
    tol: float = 1e-6,
    prop_tol: float = DEFAULT_TOL,
) -> DerivativeBound:
    """Compare ``(pu')(x)^2 / r(x)`` with the local bound built from the window ``[x-1, x+1]``."""
    if isinstance(lam, complex):
        if lam.imag != 0:
            raise NonRealSolution("lambda must be real")
        lam = lam.real
    _check_window(coeffs, x)
    u0, pu0 = _initial_data(u)
    z = complex(lam)
    st = SolutionState(coeffs.a, u0, pu0, z)
    left = propagate(coeffs, st, x - 1, prop_tol)
    mid = propagate(coeffs, left, x, prop_tol)
    right = propagate(coeffs, mid, x + 1, prop_tol)
    local_norm = right.norm_sq - left.norm_sq
    _, _, rx = eval_coefficients(coeffs, x)
    lhs = abs(mid.pu) ** 2 / rx
    r_lo, r_hi = r_extrema(coeffs, x - 1, x + 1)
    gamma = r_hi / r_lo
    P = P_window(coeffs, x)
    bracket = window_integral(coeffs, lambda p, q, r, y: (2.0 / (P * r) + abs(q / r - lam)) ** 2, x - 1, x + 1)
    rhs = gamma * bracket * local_norm
    return DerivativeBound(lhs, rhs, lhs <= rhs * (1 + tol))


@dataclass(frozen=True)
class CriteriaReport:
    gamma_sup: float
    p_term_sup: float
    q_term_sup: float
    qminus_sup: float
    i_minus: float
    r_monotone: bool
    scan_range: tuple[float, float]

    @property
    def stolz_conditions(self) -> bool:
        """Finite q_- window integral, positive ``I_-`` and finite ``gamma`` on the scan."""
        return math.isfinite(self.qminus_sup) and self.i_minus > 0 and math.isfinite(self.gamma_sup)

    @property
    def derivative_conditions(self) -> bool:
        return all(math.isfinite(v) for v in (self.gamma_sup, self.p_term_sup, self.q_term_sup))


def _r_monotone(coeffs: CoefficientSet, lo: float, hi: float, samples: int = 65) -> bool:
    pts = [lo] + coeffs.breakpoints(lo, hi) + [hi]
    prev = -math.inf
    for xa, xb in zip(pts, pts[1:]):
        seg = coeffs.segments[coeffs.segment_index(xa)]
        ys = [xa, xb] if seg.is_constant else np.linspace(xa, xb, samples)
        for y in ys:
            r = seg.kind.at(y)[2]
            if r < prev * (1 - 1e-14):
                return False
            prev = r
    return True


def criteria_scan(coeffs: CoefficientSet, lam: float, x_lo: float, x_hi: float, step: float) -> CriteriaReport:
    """Sup/inf of the window quantities on ``x_lo, x_lo + step, ..., x_hi``.

    Grid points whose windows leave the domain are skipped.  Finite values
    only assert boundedness on the scanned range.
    """
    if step <= 0 or not x_lo < x_hi:
        raise ValueError("need x_lo < x_hi and step > 0")
    xs = [x for x in np.arange(x_lo, x_hi + 0.5 * step, step) if coeffs.a <= x - 1 and x + 1 <= _below(coeffs.b)]
    if not xs:
        raise WindowOutOfDomain("no grid point has its window inside the domain")
    gam = pt = qt = qm = 0.0
    im = math.inf
    for x in xs:
        r_lo, r_hi = r_extrema(coeffs, x - 1, x + 1)
        gam = max(gam, r_hi / r_lo)
        P = P_window(coeffs, x)
        pt = max(pt, window_integral(coeffs, lambda p, q, r, y: 1.0 / (r * r), x - 1, x + 1) / (P * P))
        qt = max(qt, window_integral(coeffs, lambda p, q, r, y: (q / r - lam) ** 2, x - 1, x + 1))
        qm = max(qm, window_integral(coeffs, lambda p, q, r, y: max(-q, 0.0) / r, x, x + 1))
        im = min(im, window_integral(coeffs, lambda p, q, r, y: r / p, x, x + 1))
    mono = _r_monotone(coeffs, xs[0] - 1, xs[-1] + 1)
    return CriteriaReport(gam, pt, qt, qm, im, mono, (float(xs[0]), float(xs[-1])))


# ----------------------------------------------------------------------------
# growth of solutions
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionGrowth:
    sup_u: float  # sup sqrt(r) |u|
    sup_du: float  # sup |pu'| / sqrt(r)
    head_sup_u: float
    tail_sup_u: float
    head_sup_du: float
    tail_sup_du: float
    c3: float  # slope of ||u||^2_(a,x) over the final half
    c3_residual: float  # relative rms residual of that fit
    bounded_u: bool
    bounded_du: bool


@dataclass(frozen=True)
class GrowthReport:
    bounded_u: bool
    bounded_du: bool
    linear_growth_c3: float
    per_solution: dict


def _growth_of(coeffs, lam, u0, pu0, X, n, tol, ceiling, growth_ratio) -> SolutionGrowth:
    a = coeffs.a
    xs = np.linspace(a, X, n + 1)[1:]
    st = SolutionState(a, complex(u0), complex(pu0), complex(lam))
    su, sdu, norms = [], [], []
    for x in xs:
        st = propagate(coeffs, st, float(x), tol)
        _, _, r = _coeff_left(coeffs, float(x))
        sq = math.sqrt(r)
        su.append(sq * abs(st.u))
        sdu.append(abs(st.pu) / sq)
        norms.append(st.norm_sq)
    su, sdu, norms = np.array(su), np.array(sdu), np.array(norms)
    half = xs >= a + (X - a) / 2
    hu, tu = su[~half].max(), su[half].max()
    hdu, tdu = sdu[~half].max(), sdu[half].max()
    A = np.vstack([xs[half], np.ones(half.sum())]).T
    coef, *_ = np.linalg.lstsq(A, norms[half], rcond=None)
    fit = A @ coef
    scale = max(np.abs(norms[half]).max(), 1e-300)
    resid = float(np.sqrt(np.mean((fit - norms[half]) ** 2)) / scale)
    bu = bool(su.max() <= ceiling and tu <= growth_ratio * hu)
    bdu = bool(sdu.max() <= ceiling and tdu <= growth_ratio * hdu)
    return SolutionGrowth(float(su.max()), float(sdu.max()), float(hu), float(tu), float(hdu), float(tdu),
                          float(coef[0]), resid, bu, bdu)


def _coeff_left(coeffs, x):
    # value at a sample point; at the right end use the last segment
    if x >= coeffs.b:
        return coeffs.segments[-1].kind.at(x)
    return eval_coefficients(coeffs, x) if x > coeffs.a else coeffs.segments[0].kind.at(x)


def growth_checks(
    coeffs: CoefficientSet,
    lam: float,
    X: float,
    tol: float = DEFAULT_TOL,
    samples: int = 2000,
    ceiling: float = 1e3,
    growth_ratio: float = 1.5,
) -> GrowthReport:
    """Boundedness of ``sqrt(r) u`` and ``pu'/sqrt(r)`` and linear growth of ``||u||^2``.

    A sampled quantity counts as bounded when its sup over ``[a, X]`` stays
    below ``ceiling`` and its sup over the second half of the range exceeds
    the sup over the first half by at most ``growth_ratio``.
    """
    if not coeffs.a < X < coeffs.b:
        raise OutOfDomain(f"X={X} not in ({coeffs.a}, {coeffs.b})")
    c = _growth_of(coeffs, lam, 1.0, 0.0, X, samples, tol, ceiling, growth_ratio)
    s = _growth_of(coeffs, lam, 0.0, 1.0, X, samples, tol, ceiling, growth_ratio)
    return GrowthReport(
        c.bounded_u and s.bounded_u,
        c.bounded_du and s.bounded_du,
        min(c.c3, s.c3),
        {"c": c, "s": s},
    )
