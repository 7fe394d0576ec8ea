"""Radially symmetric metric trees.

A tree is described by vertex radii ``t_0 = 0 < t_1 < ...`` and branching
numbers ``b_0 = 1, b_k >= 2``.  The radial Laplacian plus a radial potential
reduces to the weighted operator with ``p = r = g`` and ``q = g V`` where
``g(t)`` is the branching function, see :func:`tree_to_sl`.

For the homogeneous tree (``t_n = c n``, ``b_n = b``) the one-period transfer
matrix, Floquet exponent and the a.c. band structure are available in closed
form; :func:`band_spectrum_numeric` recomputes the band edges by bisection as
an independent check.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect

from .core import CallablePQR, CoefficientSet, ConstantPQR, Segment, TransferMatrix
from .errors import BeyondTruncation, ValidationError
from .expr import Expr

# largest b^N kept below this so that p = r = g stays representable
_G_CEILING = 1e300


@dataclass(frozen=True)
class TreeSpec:
    """Vertex radii ``t`` and branching numbers ``b`` of a radial tree.

    ``t`` and ``b`` have the same length; level ``n`` sits at radius ``t[n]``.
    The last radius is the truncation: levels beyond it are not materialized.
    """

    t: tuple[float, ...]
    b: tuple[int, ...]
    allow_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(v) for v in self.t))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        problems = self.diagnostics()
        if problems:
            raise ValidationError("; ".join(msg for _, msg in problems))

    def diagnostics(self) -> list[tuple[str, str]]:
        """``(json-pointer, message)`` pairs for every violated invariant."""
        out = []
        t, b = self.t, self.b
        if len(t) != len(b):
            out.append(("/b", "t and b must have the same length"))
        if len(t) < 2:
            out.append(("/t", "need at least two levels"))
        if t and t[0] != 0.0:
            out.append(("/t/0", "t_0 must be 0"))
        for i in range(1, len(t)):
            if not t[i] > t[i - 1]:
                out.append((f"/t/{i}", "radii must be strictly increasing"))
        if b and b[0] != 1:
            out.append(("/b/0", "regularity requires b_0 = 1"))
        for k in range(1, len(b)):
            if b[k] < 1 or (b[k] < 2 and not self.allow_degenerate):
                out.append((f"/b/{k}", "regularity requires b_k >= 2 for k >= 1"))
        return out

    @property
    def truncation_N(self) -> int:
        return len(self.t) - 1

    @property
    def height(self) -> float:
        return self.t[-1]

    @classmethod
    def homogeneous(cls, b: int, c: float, N: Optional[int] = None) -> "TreeSpec":
        """``t_n = c n``, ``b_n = b`` (``b_0 = 1``).  ``b = 1`` gives the half-line."""
        if b < 1 or c <= 0:
            raise ValidationError("homogeneous tree needs b >= 1 and c > 0")
        if N is None:
            N = max_levels(b)
        return cls(tuple(c * n for n in range(N + 1)), (1,) + (b,) * N, allow_degenerate=(b == 1))

    @classmethod
    def from_dict(cls, doc: dict, N: Optional[int] = None) -> "TreeSpec":
        if "homogeneous" in doc:
            h = doc["homogeneous"]
            return cls.homogeneous(int(h["b"]), float(h["c"]), h.get("N", N))
        try:
            return cls(tuple(doc["t"]), tuple(doc["b"]))
        except KeyError as exc:
            raise ValidationError(f"tree document lacks {exc}") from None


def max_levels(b: int) -> int:
    """Number of levels for which ``b^N`` stays below the overflow ceiling."""
    if b <= 1:
        return 1000
    return int(math.log(_G_CEILING) / math.log(b))


def branching_function(tree: TreeSpec, t: float) -> float:
    """``g(t) = prod_{n : t_n < t} b_n`` (left-continuous at vertices)."""
    if not 0.0 <= t <= tree.height:
        raise BeyondTruncation(f"t={t} outside [0, {tree.height}]")
    g = 1.0
    for tn, bn in zip(tree.t, tree.b):
        if tn < t:
            g *= bn
        else:
            break
    return g


def tree_to_sl(tree: TreeSpec, V: Optional[Callable[[float], float]] = None) -> CoefficientSet:
    """Weighted half-line operator with ``p = r = g`` and ``q = g V`` on ``(0, t_N)``.

    One segment per edge level; on ``(t_n, t_{n+1})`` the weight is
    ``b_0 ... b_n``.  A Dirichlet condition at the root is implied by using
    the Dirichlet m-function downstream.
    """
    if isinstance(V, str):
        V = Expr(V)
    segs = []
    g = 1.0
    for n in range(tree.truncation_N):
        g *= tree.b[n]
        lo, hi = tree.t[n], tree.t[n + 1]
        if V is None:
            kind = ConstantPQR(g, 0.0, g)
        else:
            kind = CallablePQR(g, _scaled(V, g), g)
        segs.append(Segment(lo, hi, kind))
    return CoefficientSet(0.0, tree.height, tuple(segs))


def _scaled(V, g: float):
    if isinstance(V, Expr):
        return Expr(f"{g!r}*({V.source})")
    return _Scaled(V, g)


class _Scaled:
    __slots__ = ("V", "g")

    def __init__(self, V, g):
        self.V, self.g = V, g

    def __call__(self, x):
        return self.g * self.V(x)


def decomposition_multiplicities(tree: TreeSpec, k_max: int) -> list[tuple[int, float, int]]:
    """``(k, t_k, b_0...b_{k-1}(b_k - 1))`` for ``k = 1..k_max`` after ``(0, 0, 1)``."""
    if k_max > tree.truncation_N:
        raise BeyondTruncation(f"k_max={k_max} exceeds truncation {tree.truncation_N}")
    out = [(0, 0.0, 1)]
    prod = 1
    for k in range(1, k_max + 1):
        prod *= tree.b[k - 1]
        out.append((k, tree.t[k], prod * (tree.b[k] - 1)))
    return out


# ----------------------------------------------------------------------------
# homogeneous tree
# ----------------------------------------------------------------------------


def _free_block(z: complex, c: float) -> tuple[complex, complex, complex]:
    """``cos(c sqrt z)``, ``sin(c sqrt z)/sqrt z`` and ``sqrt z sin(c sqrt z)``."""
    z = complex(z)
    if abs(z) < 1e-4:
        # even/odd power series, entire in z
        t = -z * c * c
        cs = 1 + t / 2 + t * t / 24 + t**3 / 720
        sn = c * (1 + t / 6 + t * t / 120 + t**3 / 5040)
        return cs, sn, z * sn
    k = cmath.sqrt(z)
    return cmath.cos(c * k), cmath.sin(c * k) / k, k * cmath.sin(c * k)


def homogeneous_transfer_matrix(b: int, c: float, z: complex) -> TransferMatrix:
    """One-period monodromy in the derivative-first chart ``(u', u)``.

    Free propagation over length ``c`` followed by the vertex rule
    ``u'(n-) = b u'(n+)``; ``det = 1/b``.  The matrix acts on column vectors
    ``(u', u)``, which is the ordering of the displayed closed form
    ``[[cos/b, -sqrt(z) sin/b], [sin/sqrt(z), cos]]``.
    """
    cs, sn, ks = _free_block(z, c)
    m = np.array([[cs / b, -ks / b], [sn, cs]], dtype=complex)
    return TransferMatrix(m, 0.0, c)


def floquet_exponent(b: int, c: float, z: complex) -> complex:
    """``alpha(z)`` with ``Re alpha >= 0``; ``Re alpha = 0`` exactly on the bands."""
    cs, _, _ = _free_block(z, c)
    w = (1 + b) / (2 * math.sqrt(b)) * cs
    if w.imag == 0.0 and abs(w.real) <= 1.0:
        # on a band the multipliers are e^{+-i k}; keep Re alpha = 0 exactly
        return complex(0.0, math.acos(w.real))
    root = cmath.sqrt(w * w - 1)
    r1, r2 = w + root, w - root
    # the two roots multiply to 1; keep the one outside the unit circle
    if abs(r1) > abs(r2):
        lam = r1
    elif abs(r2) > abs(r1):
        lam = r2
    else:
        lam = r1 if r1.imag >= 0 else r2
    alpha = cmath.log(lam)
    if alpha.real < 0:  # only possible through rounding at |lam| = 1
        alpha = complex(0.0, alpha.imag)
    return alpha


@dataclass(frozen=True)
class BandSpectrum:
    theta: float
    bands: tuple[tuple[float, float], ...]
    point_spectrum: tuple[float, ...]
    b: int
    c: float
    l_max: int

    def gaps(self) -> list[tuple[float, float]]:
        return [(lo_hi[1], nxt[0]) for lo_hi, nxt in zip(self.bands, self.bands[1:])]

    def contains(self, lam: float) -> bool:
        return any(lo <= lam <= hi for lo, hi in self.bands)

    def rows(self) -> list[dict]:
        """Table rows: l, edges, width of the following gap, eigenvalue in that gap."""
        out = []
        for i, (lo, hi) in enumerate(self.bands):
            gap = self.bands[i + 1][0] - hi if i + 1 < len(self.bands) else math.nan
            ev = self.point_spectrum[i] if i < len(self.point_spectrum) else math.nan
            out.append({"l": i + 1, "lower_edge": lo, "upper_edge": hi, "gap_to_next": gap, "point_eigenvalue": ev})
        return out


def theta_of(b: int) -> float:
    return math.acos(2.0 / (math.sqrt(b) + 1.0 / math.sqrt(b)))


def band_spectrum(b: int, c: float, l_max: int) -> BandSpectrum:
    """Closed-form bands ``[((pi(l-1)+theta)/c)^2, ((pi l - theta)/c)^2]``."""
    if b < 1 or c <= 0 or l_max < 1:
        raise ValidationError("need b >= 1, c > 0, l_max >= 1")
    th = theta_of(b)
    bands = tuple((((math.pi * (l - 1) + th) / c) ** 2, ((math.pi * l - th) / c) ** 2) for l in range(1, l_max + 1))
    # for b = 1 the points (pi l / c)^2 are band edges, not eigenvalues
    pp = tuple((math.pi * l / c) ** 2 for l in range(1, l_max + 1)) if b > 1 else ()
    return BandSpectrum(th, bands, pp, b, c, l_max)


def band_spectrum_numeric(b: int, c: float, lambda_hi: float, tol: float = 1e-12) -> BandSpectrum:
    """Band edges as roots of ``((1+b)^2/4b) cos^2(c sqrt(lam)) = 1``.

    Each arc of ``cos`` between consecutive multiples of ``pi/2`` (in
    ``k = c sqrt(lam)``) is monotone and holds exactly one edge; the root is
    bracketed there and bisected in ``k``.  Bands whose lower arc starts below
    ``lambda_hi`` are returned.
    """
    if b < 1 or c <= 0 or tol <= 0:
        raise ValidationError("need b >= 1, c > 0, tol > 0")
    kappa2 = (1 + b) ** 2 / (4 * b)

    def f(k):
        return kappa2 * math.cos(k) ** 2 - 1.0

    edges = []
    l = 1
    while (math.pi * (l - 1) / c) ** 2 < lambda_hi:
        k0, kh, k1 = math.pi * (l - 1), math.pi * (l - 0.5), math.pi * l
        lo_k = k0 if f(k0) <= 0 else bisect(f, k0, kh, xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps)
        hi_k = k1 if f(k1) <= 0 else bisect(f, kh, k1, xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps)
        edges.append(((lo_k / c) ** 2, (hi_k / c) ** 2))
        l += 1
    l_max = len(edges)
    theta = math.sqrt(edges[0][0]) * c if edges else 0.0
    pp = tuple((math.pi * j / c) ** 2 for j in range(1, l_max + 1)) if b > 1 else ()
    return BandSpectrum(theta, tuple(edges), pp, b, c, l_max)


# ----------------------------------------------------------------------------
# a.c. classification on trees
# ----------------------------------------------------------------------------


def cell_norm_increments(coeffs: CoefficientSet, lam: float, cells: Sequence[float], tol: float = 1e-10) -> list[float]:
    """Increments of ``||s||^2`` between consecutive vertex radii ``cells``."""
    from .core import SolutionState, propagate

    st = SolutionState(coeffs.a, 0j, 1 + 0j, complex(lam))
    out, prev = [], 0.0
    for x in cells:
        st = propagate(coeffs, st, x, tol)
        out.append(st.norm_sq - prev)
        prev = st.norm_sq
    return out


def eigenfunction_decay_ratio(b: int, c: float, l: int = 1, periods: int = 12) -> float:
    """Mean ratio of successive per-period ``||s||^2`` increments at ``(pi l / c)^2``.

    For an eigenvalue of the reduced operator the Dirichlet solution is square
    integrable and the increments shrink by ``1/b`` per period.
    """
    tree = TreeSpec.homogeneous(b, c, periods + 2)
    coeffs = tree_to_sl(tree)
    inc = cell_norm_increments(coeffs, (math.pi * l / c) ** 2, [c * n for n in range(1, periods + 1)])
    ratios = [b2 / b1 for b1, b2 in zip(inc, inc[1:])]
    return float(np.mean(ratios))


@dataclass
class TreeVerdict:
    lam: float
    verdict: object  # SubordinacyVerdict
    growth: object  # GrowthReport
    in_band: Optional[bool] = None

    @property
    def absolutely_continuous(self) -> bool:
        from .subordinacy import Verdict

        return self.verdict.kind is Verdict.IN_N and self.growth.bounded_u

    def to_dict(self) -> dict:
        d = self.verdict.to_dict()
        d.pop("samples", None)
        d.update(
            bounded_u=self.growth.bounded_u,
            bounded_du=self.growth.bounded_du,
            c3_slope=self.growth.linear_growth_c3,
            in_band=self.in_band,
            ac=self.absolutely_continuous,
        )
        return d


def tree_policy(coeffs: CoefficientSet, **overrides):
    """Classification policy sized for the truncated tree domain."""
    from .subordinacy import ClassifyPolicy

    base = dict(x_grid=tuple(2.0**k for k in range(7)), X_max=coeffs.b)
    base.update(overrides)
    return ClassifyPolicy(**base)


def tree_ac_scan(
    tree: Union[TreeSpec, tuple[int, float]],
    V=None,
    lambda_grid: Sequence[float] = (),
    policy=None,
    growth_X: float = 60.0,
    tol: float = 1e-10,
) -> list[TreeVerdict]:
    """Classify each ``lam`` for ``A = A_0 + V`` on a radial tree.

    ``sqrt(g) u`` is exactly ``sqrt(r) u`` for the reduced operator, so the
    boundedness test of :func:`~slspec.subordinacy.growth_checks` applies
    unchanged.  For a homogeneous tree the closed-form bands are attached for
    comparison.
    """
    from .subordinacy import classify_lambda, growth_checks

    bands = None
    if not isinstance(tree, TreeSpec):
        b, c = tree
        tree = TreeSpec.homogeneous(int(b), float(c))
        bands = band_spectrum(int(b), float(c), 1)
    coeffs = tree_to_sl(tree, V)
    policy = policy or tree_policy(coeffs, tol=tol)
    out = []
    for lam in lambda_grid:
        ver = classify_lambda(coeffs, float(lam), policy)
        gr = growth_checks(coeffs, float(lam), min(growth_X, coeffs.b / 2), tol)
        in_band = None
        if bands is not None:
            in_band = floquet_exponent(bands.b, bands.c, float(lam)).real == 0.0
        out.append(TreeVerdict(float(lam), ver, gr, in_band))
    return out
