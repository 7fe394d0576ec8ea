"""Coefficient sets and solution propagation for ``tau u = z u``.

The operator is ``tau = (1/r) (-(d/dx) p (d/dx) + q)`` on ``(a, b)`` with a
regular left endpoint.  Solutions are carried in the quasi-derivative chart
``(u, p u')`` which is continuous across coefficient jumps, so a jump of ``p``
at a segment boundary automatically encodes matching conditions such as the
Kirchhoff rule on radial trees.

Constant segments are stepped with the exact trigonometric propagator and the
norm integrals are evaluated in closed form.  Callable segments use an
embedded Dormand-Prince 5(4) pair with the two accumulators appended to the
state vector.
"""
from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import MismatchedStates, OutOfDomain, ToleranceNotMet, ValidationError
from .expr import Expr, compile_lambda

Evaluator = Callable[[float], float]

DEFAULT_TOL = 1e-10
# |Im omega| * step is capped so closed-form norm integrals stay well conditioned
_MAX_GROWTH_PER_STEP = 2.0
# below this step length the error-per-unit-step criterion stops tightening
_H_FLOOR = 0.05
_SPOT_CHECKS = 9


# ----------------------------------------------------------------------------
# coefficient sets
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantPQR:
    p: float
    q: float
    r: float

    def __post_init__(self):
        if not (self.p > 0 and self.r > 0):
            raise ValidationError(f"need p > 0 and r > 0, got p={self.p}, r={self.r}")
        if not all(math.isfinite(v) for v in (self.p, self.q, self.r)):
            raise ValidationError("coefficients must be finite")

    def at(self, x: float) -> tuple[float, float, float]:
        return self.p, self.q, self.r


@dataclass(frozen=True)
class CallablePQR:
    """Coefficients given by evaluators of ``x``.

    Plain numbers are accepted for any of the three and are treated as
    constants.  :class:`~slspec.expr.Expr` instances keep the segment
    serializable.
    """

    p: Union[Evaluator, float]
    q: Union[Evaluator, float]
    r: Union[Evaluator, float]

    def __post_init__(self):
        object.__setattr__(self, "_at", _fused_evaluator(self.p, self.q, self.r))

    def __getstate__(self):
        return {"p": self.p, "q": self.q, "r": self.r}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)
        self.__post_init__()

    def at(self, x: float) -> tuple[float, float, float]:
        return self._at(x)


def _fused_evaluator(p, q, r):
    """One function of ``x`` returning ``(p, q, r)``; a single lambda when possible."""
    parts = []
    for f in (p, q, r):
        if isinstance(f, Expr):
            parts.append(f"float({f.text})")
        elif isinstance(f, (int, float)):
            parts.append(repr(float(f)))
        else:
            parts = None
            break
    if parts is not None:
        return compile_lambda("(" + ", ".join(parts) + ")")

    def at(x):
        return (
            p(x) if callable(p) else p,
            q(x) if callable(q) else q,
            r(x) if callable(r) else r,
        )

    return at


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    kind: Union[ConstantPQR, CallablePQR]

    @property
    def is_constant(self) -> bool:
        return isinstance(self.kind, ConstantPQR)


@dataclass(frozen=True)
class CoefficientSet:
    """The triple ``(p, q, r)`` on ``(a, b)`` as consecutive segments.

    ``b`` may be ``math.inf``.  Instances are immutable and validated on
    construction: the segments must tile ``(a, b)`` exactly and ``p, r > 0``
    (callable segments are spot-checked on a few sample points).
    """

    a: float
    b: float
    segments: tuple[Segment, ...]
    _los: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not math.isfinite(self.a):
            raise ValidationError("left endpoint must be finite (regular)")
        if not segs:
            raise ValidationError("at least one segment is required")
        if segs[0].lo != self.a or segs[-1].hi != self.b:
            raise ValidationError("segments must start at a and end at b")
        for s, t in zip(segs, segs[1:]):
            if s.hi != t.lo:
                raise ValidationError(f"gap or overlap between {s.hi} and {t.lo}")
        for s in segs:
            if not s.lo < s.hi:
                raise ValidationError(f"empty segment [{s.lo}, {s.hi})")
            if not s.is_constant:
                _spot_check(s)
        object.__setattr__(self, "_los", tuple(s.lo for s in segs))

    # -- lookup ---------------------------------------------------------------

    def segment_index(self, x: float) -> int:
        """Index of the segment containing ``x`` (right-limit convention)."""
        if not self.a <= x < self.b:
            raise OutOfDomain(f"x={x} not in [{self.a}, {self.b})")
        return bisect.bisect_right(self._los, x) - 1

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        """Segment boundaries strictly inside ``(lo, hi)``."""
        i = bisect.bisect_right(self._los, lo)
        j = bisect.bisect_left(self._los, hi)
        return list(self._los[i:j])

    @property
    def is_piecewise_constant(self) -> bool:
        return all(s.is_constant for s in self.segments)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        segs = []
        for s in self.segments:
            if s.is_constant:
                k = s.kind
                segs.append({"lo": s.lo, "hi": _num_out(s.hi), "p": k.p, "q": k.q, "r": k.r})
            else:
                d = {"lo": s.lo, "hi": _num_out(s.hi)}
                for name in ("p", "q", "r"):
                    d[f"expr_{name}"] = _expr_source(getattr(s.kind, name))
                segs.append(d)
        return {"a": self.a, "b": _num_out(self.b), "segments": segs}

    @classmethod
    def from_dict(cls, doc: dict) -> "CoefficientSet":
        try:
            a = float(doc["a"])
            b = _num_in(doc["b"])
            segs = []
            for item in doc["segments"]:
                lo, hi = float(item["lo"]), _num_in(item["hi"])
                if "p" in item:
                    kind = ConstantPQR(float(item["p"]), float(item["q"]), float(item["r"]))
                else:
                    kind = CallablePQR(*(Expr(item[f"expr_{n}"]) for n in ("p", "q", "r")))
                segs.append(Segment(lo, hi, kind))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed coefficient document: {exc!r}") from None
        return cls(a, b, tuple(segs))


def _num_out(v: float):
    return "inf" if math.isinf(v) else v


def _num_in(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ValidationError(f"expected a number or 'inf', got {v!r}")
    return float(v)


def _expr_source(f) -> str:
    if isinstance(f, Expr):
        return f.source
    if isinstance(f, (int, float)):
        return repr(float(f))
    raise ValidationError("callable coefficients must be Expr instances to serialize")


def _spot_check(seg: Segment) -> None:
    lo, hi = seg.lo, seg.hi
    if math.isinf(hi):
        hi = lo + 100.0
    for t in np.linspace(0.0, 1.0, _SPOT_CHECKS + 2)[1:-1]:
        x = lo + (hi - lo) * t
        p, q, r = seg.kind.at(x)
        if not (p > 0 and r > 0):
            raise ValidationError(f"p and r must be positive; p({x})={p}, r({x})={r}")
        if not all(math.isfinite(v) for v in (p, q, r)):
            raise ValidationError(f"non-finite coefficient at x={x}")


def constant(p: float = 1.0, q: float = 0.0, r: float = 1.0, a: float = 0.0, b: float = math.inf) -> CoefficientSet:
    """Single constant segment on ``(a, b)``; the default is the free half-line."""
    return CoefficientSet(a, b, (Segment(a, b, ConstantPQR(p, q, r)),))


def from_callables(p, q, r, a: float = 0.0, b: float = math.inf) -> CoefficientSet:
    if isinstance(p, str):
        p = Expr(p)
    if isinstance(q, str):
        q = Expr(q)
    if isinstance(r, str):
        r = Expr(r)
    return CoefficientSet(a, b, (Segment(a, b, CallablePQR(p, q, r)),))


def eval_coefficients(coeffs: CoefficientSet, x: float) -> tuple[float, float, float]:
    """Return ``(p, q, r)`` at ``x``; at a segment boundary the right limit."""
    if not coeffs.a < x < coeffs.b:
        raise OutOfDomain(f"x={x} not in ({coeffs.a}, {coeffs.b})")
    p, q, r = coeffs.segments[coeffs.segment_index(x)].kind.at(x)
    return float(p), float(q), float(r)


# ----------------------------------------------------------------------------
# states
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionState:
    """A solution of ``tau u = z u`` sampled at ``x``.

    ``norm_sq`` and ``dnorm_sq`` accumulate ``int |u|^2 r`` and
    ``int |pu'|^2 / r`` over the interval traversed so far.  When
    ``log_scale`` is nonzero the stored values are rescaled: the actual
    solution is ``exp(log_scale) * (u, pu)`` and the actual accumulators carry
    a factor ``exp(2 * log_scale)``.
    """

    x: float
    u: complex
    pu: complex
    z: complex
    norm_sq: float = 0.0
    dnorm_sq: float = 0.0
    log_scale: float = 0.0

    @property
    def true_norm_sq(self) -> float:
        if self.log_scale == 0.0:
            return self.norm_sq
        if self.norm_sq == 0.0:
            return 0.0
        return math.exp(math.log(self.norm_sq) + 2 * self.log_scale)

    @property
    def log_norm_sq(self) -> float:
        return math.log(self.norm_sq) + 2 * self.log_scale

    def normalized(self) -> "SolutionState":
        """Rescale to ``|(u, pu)| = 1``, folding the factor into ``log_scale``."""
        n = math.hypot(abs(self.u), abs(self.pu))
        if n == 0.0 or n == 1.0:
            return self
        f = 1.0 / n
        return replace(
            self,
            u=self.u * f,
            pu=self.pu * f,
            norm_sq=self.norm_sq * f * f,
            dnorm_sq=self.dnorm_sq * f * f,
            log_scale=self.log_scale + math.log(n),
        )


def initial_state(coeffs: CoefficientSet, z: complex, u0: complex, pu0: complex, x: float | None = None) -> SolutionState:
    return SolutionState(coeffs.a if x is None else float(x), complex(u0), complex(pu0), complex(z))


# ----------------------------------------------------------------------------
# exact propagator on a constant segment
# ----------------------------------------------------------------------------


def _shc(x: float) -> float:
    return 1.0 + x * x / 6.0 if abs(x) < 1e-4 else math.sinh(x) / x


def _sc(x: float) -> float:
    return 1.0 - x * x / 6.0 if abs(x) < 1e-4 else math.sin(x) / x


def _g(x: float) -> float:
    # (sinh(x)/x - 1) / x^2
    if abs(x) < 0.1:
        x2 = x * x
        return 1 / 6 + x2 * (1 / 120 + x2 * (1 / 5040 + x2 * (1 / 362880 + x2 / 39916800)))
    return (math.sinh(x) / x - 1.0) / (x * x)


def _h(x: float) -> float:
    # (1 - sin(x)/x) / x^2
    if abs(x) < 0.1:
        x2 = x * x
        return 1 / 6 - x2 * (1 / 120 - x2 * (1 / 5040 - x2 * (1 / 362880 - x2 / 39916800)))
    return (1.0 - math.sin(x) / x) / (x * x)


def _cos_sinc(w2: complex, L: float) -> tuple[complex, complex, complex]:
    """cos(wL), sin(wL)/w and w (any branch) for w^2 = w2."""
    w = cmath.sqrt(w2)
    wl = w * L
    if abs(wl) < 1e-4:
        t = w2 * L * L
        return 1 - t / 2 + t * t / 24, L * (1 - t / 6 + t * t / 120), w
    return cmath.cos(wl), cmath.sin(wl) / w, w


def _norm_integrals(w: complex, L: float) -> tuple[float, float, complex]:
    """int_0^L |C|^2, |S|^2 and C conj(S) for C=cos(wy), S=sin(wy)/w (L >= 0)."""
    # the integrals are even in w; fix the sign so that Re w >= 0
    if w.real < 0 or (w.real == 0 and w.imag < 0):
        w = -w
    a, b = w.real, w.imag
    x_a, x_b = 2 * a * L, 2 * b * L
    icc = 0.5 * L * (_shc(x_b) + _sc(x_a))
    if a == 0.0 and b == 0.0:
        return L, L**3 / 3.0, complex(L * L / 2.0)
    # unit direction of w avoids underflow in a^2 + b^2 for tiny |w|
    n = abs(w)
    ua, ub = a / n, b / n
    iss = 2.0 * L**3 * (ub * ub * _g(x_b) + ua * ua * _h(x_a))
    vc = 0.5 * _sc(a * L) ** 2
    vch = 0.5 * _shc(b * L) ** 2
    ics = L * L * complex(ua * vc, -ub * vch) / complex(ua, -ub)
    return icc, iss, ics


def _const_step(p: float, q: float, r: float, z: complex, u0: complex, pu0: complex, L: float):
    """Exact step of length ``L`` (may be negative) on a constant segment.

    Returns ``(u1, pu1, d_norm, d_dnorm)`` where the increments are the
    integrals over the traversed interval (always nonnegative).
    """
    w2 = z * (r / p) - q / p
    cs, sn, w = _cos_sinc(w2, L)
    A = u0
    B = pu0 / p
    u1 = A * cs + B * sn
    pu1 = pu0 * cs - p * A * w2 * sn
    # integrals are odd in L; evaluate on |L| with the reflected data
    if L >= 0:
        Ar, Br = A, B
    else:
        Ar, Br = A, -B  # y -> -y flips the odd part
    icc, iss, ics = _norm_integrals(w, abs(L))
    dn = (abs(Ar) ** 2 * icc + abs(Br) ** 2 * iss + 2.0 * (Ar * Br.conjugate() * ics).real) * r
    Aw = Ar * w2
    ddn = (abs(Br) ** 2 * icc + abs(Aw) ** 2 * iss - 2.0 * (Br * Aw.conjugate() * ics).real) * p * (p / r)
    return u1, pu1, max(dn, 0.0), max(ddn, 0.0)


# ----------------------------------------------------------------------------
# adaptive Dormand-Prince 5(4) on a callable segment
# ----------------------------------------------------------------------------

_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth minus fourth order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _rhs(kind, z, x, u, pu):
    p, q, r = kind.at(x)
    return pu / p, (q - z * r) * u, (u.real * u.real + u.imag * u.imag) * r, (pu.real * pu.real + pu.imag * pu.imag) / r


def _dopri_segment(kind, z, x0, x1, u, pu, tol, h0=None):
    """Integrate from x0 to x1 (either direction).  Returns u, pu, dn, ddn, last_h."""
    direction = 1.0 if x1 > x0 else -1.0
    span = abs(x1 - x0)
    hmin = 1e-13 * max(1.0, abs(x0), abs(x1))
    h = min(span, h0 if h0 else min(0.05, span))
    x = x0
    n = dn = 0.0
    k1 = _rhs(kind, z, x, u, pu)
    while True:
        remaining = abs(x1 - x)
        if remaining <= hmin * 0.5:
            break
        last = h >= remaining
        if last:
            h = remaining
        s = direction * h
        k2 = _rhs(kind, z, x + _C2 * s, u + s * _A21 * k1[0], pu + s * _A21 * k1[1])
        k3 = _rhs(kind, z, x + _C3 * s, u + s * (_A31 * k1[0] + _A32 * k2[0]), pu + s * (_A31 * k1[1] + _A32 * k2[1]))
        k4 = _rhs(
            kind, z, x + _C4 * s,
            u + s * (_A41 * k1[0] + _A42 * k2[0] + _A43 * k3[0]),
            pu + s * (_A41 * k1[1] + _A42 * k2[1] + _A43 * k3[1]),
        )
        k5 = _rhs(
            kind, z, x + _C5 * s,
            u + s * (_A51 * k1[0] + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0]),
            pu + s * (_A51 * k1[1] + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1]),
        )
        k6 = _rhs(
            kind, z, x + s,
            u + s * (_A61 * k1[0] + _A62 * k2[0] + _A63 * k3[0] + _A64 * k4[0] + _A65 * k5[0]),
            pu + s * (_A61 * k1[1] + _A62 * k2[1] + _A63 * k3[1] + _A64 * k4[1] + _A65 * k5[1]),
        )
        un = u + s * (_B1 * k1[0] + _B3 * k3[0] + _B4 * k4[0] + _B5 * k5[0] + _B6 * k6[0])
        pun = pu + s * (_B1 * k1[1] + _B3 * k3[1] + _B4 * k4[1] + _B5 * k5[1] + _B6 * k6[1])
        k7 = _rhs(kind, z, x + s, un, pun)
        eu = s * (_E1 * k1[0] + _E3 * k3[0] + _E4 * k4[0] + _E5 * k5[0] + _E6 * k6[0] + _E7 * k7[0])
        epu = s * (_E1 * k1[1] + _E3 * k3[1] + _E4 * k4[1] + _E5 * k5[1] + _E6 * k6[1] + _E7 * k7[1])
        # error per unit step: the global error stays of order tol * length
        scale = tol * min(1.0, max(h, _H_FLOOR)) * (1.0 + max(math.hypot(abs(u), abs(pu)), math.hypot(abs(un), abs(pun))))
        err = math.hypot(abs(eu), abs(epu)) / scale
        if err <= 1.0:
            h_abs = abs(s)
            n += h_abs * (_B1 * k1[2] + _B3 * k3[2] + _B4 * k4[2] + _B5 * k5[2] + _B6 * k6[2])
            dn += h_abs * (_B1 * k1[3] + _B3 * k3[3] + _B4 * k4[3] + _B5 * k5[3] + _B6 * k6[3])
            x = x1 if last else x + s
            u, pu, k1 = un, pun, k7
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h = h * fac
            if last:
                break
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                raise ToleranceNotMet(f"step size underflow at x={x} (tol={tol})")
    return u, pu, max(n, 0.0), max(dn, 0.0), h


# ----------------------------------------------------------------------------
# propagation
# ----------------------------------------------------------------------------


def _pieces(coeffs: CoefficientSet, x0: float, x1: float):
    """Yield ``(segment, xa, xb)`` pieces covering the path from x0 to x1."""
    forward = x1 > x0
    cur = x0
    while cur != x1:
        if forward:
            seg = coeffs.segments[coeffs.segment_index(cur)]
            nxt = min(seg.hi, x1)
        else:
            # left-limit segment: the one whose interior lies just below cur
            i = bisect.bisect_left(coeffs._los, cur) - 1
            seg = coeffs.segments[max(i, 0)]
            nxt = max(seg.lo, x1)
        yield seg, cur, nxt
        cur = nxt


def propagate(
    coeffs: CoefficientSet,
    state: SolutionState,
    x_target: float,
    tol: float = DEFAULT_TOL,
    renormalize: bool = False,
) -> SolutionState:
    """Carry ``state`` to ``x_target``.

    Propagation may run in either direction; the accumulators always add the
    integrals over the traversed interval.  With ``renormalize`` the state is
    rescaled to unit length after every piece (see ``SolutionState.log_scale``),
    which keeps exponentially growing solutions representable.

    Raises
    ------
    OutOfDomain
        if ``x_target`` leaves ``[a, b)``.
    ToleranceNotMet
        if adaptive stepping cannot reach ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not coeffs.a <= x_target < coeffs.b or not coeffs.a <= state.x <= coeffs.b:
        raise OutOfDomain(f"cannot propagate from {state.x} to {x_target} inside [{coeffs.a}, {coeffs.b})")
    if x_target == state.x:
        return state
    z = state.z
    u, pu = state.u, state.pu
    norm, dnorm, log_scale = state.norm_sq, state.dnorm_sq, state.log_scale
    h_hint = None
    for seg, xa, xb in _pieces(coeffs, state.x, x_target):
        if seg.is_constant:
            k = seg.kind
            w2 = z * (k.r / k.p) - k.q / k.p
            growth = abs(cmath.sqrt(w2).imag)
            span = xb - xa
            nsub = max(1, math.ceil(abs(span) * growth / _MAX_GROWTH_PER_STEP)) if growth > 0 else 1
            step = span / nsub
            for _ in range(nsub):
                u, pu, d1, d2 = _const_step(k.p, k.q, k.r, z, u, pu, step)
                norm += d1
                dnorm += d2
                if renormalize:
                    u, pu, norm, dnorm, log_scale = _renorm(u, pu, norm, dnorm, log_scale)
        else:
            u, pu, d1, d2, h_hint = _dopri_segment(seg.kind, z, xa, xb, u, pu, tol, h_hint)
            norm += d1
            dnorm += d2
            if renormalize:
                u, pu, norm, dnorm, log_scale = _renorm(u, pu, norm, dnorm, log_scale)
    return SolutionState(float(x_target), u, pu, z, norm, dnorm, log_scale)


def _renorm(u, pu, norm, dnorm, log_scale):
    n = math.hypot(abs(u), abs(pu))
    if n == 0.0 or not math.isfinite(n):
        return u, pu, norm, dnorm, log_scale
    f = 1.0 / n
    return u * f, pu * f, norm * f * f, dnorm * f * f, log_scale + math.log(n)


def sample_path(
    coeffs: CoefficientSet,
    state: SolutionState,
    xs: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> list[SolutionState]:
    """Propagate through the ascending positions ``xs`` and return every state."""
    out = []
    for x in xs:
        state = propagate(coeffs, state, x, tol)
        out.append(state)
    return out


def fundamental_pair(
    coeffs: CoefficientSet, z: complex, x: float, tol: float = DEFAULT_TOL
) -> tuple[SolutionState, SolutionState]:
    """States of ``c`` (``c(a)=1, pc'(a)=0``) and ``s`` (``s(a)=0, ps'(a)=1``) at ``x``."""
    if not coeffs.a < x < coeffs.b:
        raise OutOfDomain(f"x={x} not in ({coeffs.a}, {coeffs.b})")
    c = propagate(coeffs, initial_state(coeffs, z, 1.0, 0.0), x, tol)
    s = propagate(coeffs, initial_state(coeffs, z, 0.0, 1.0), x, tol)
    return c, s


def wronskian(u: SolutionState, v: SolutionState) -> complex:
    """``u (pv') - (pu') v``; includes the stored scale factors."""
    if u.x != v.x or u.z != v.z:
        raise MismatchedStates(f"states at x={u.x}, z={u.z} and x={v.x}, z={v.z}")
    w = u.u * v.pu - u.pu * v.u
    if u.log_scale or v.log_scale:
        w *= math.exp(u.log_scale + v.log_scale)
    return w


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 map of ``(u, pu')`` at ``x0`` to ``(u, pu')`` at ``x1``."""

    entries: np.ndarray
    x0: float = 0.0
    x1: float = 0.0

    @property
    def det(self) -> complex:
        m = self.entries
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(self.entries @ other.entries, other.x0, self.x1)


def transfer_matrix(
    coeffs: CoefficientSet, z: complex, x0: float, x1: float, tol: float = DEFAULT_TOL
) -> TransferMatrix:
    """Columns are the images of ``(1, 0)`` and ``(0, 1)`` given at ``x0``."""
    if x0 == x1:
        return TransferMatrix(np.eye(2, dtype=complex), x0, x1)
    if not coeffs.a <= x0 < x1 < coeffs.b:
        raise OutOfDomain(f"need a <= x0 < x1 < b, got {x0}, {x1}")
    c = propagate(coeffs, SolutionState(x0, 1.0 + 0j, 0j, complex(z)), x1, tol)
    s = propagate(coeffs, SolutionState(x0, 0j, 1.0 + 0j, complex(z)), x1, tol)
    m = np.array([[c.u, s.u], [c.pu, s.pu]], dtype=complex)
    return TransferMatrix(m, x0, x1)
