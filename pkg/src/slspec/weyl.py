"""Weyl m-function at the regular endpoint ``a``.

``m(z)`` is obtained from the truncated problem on ``(a, X)``: the solution
with ``(u, pu') = (0, -1)`` at ``X`` is carried back to ``a`` (the Weyl solution
dominates in that direction) and ``m = pu(a) / u(a)``.  The Weyl-disk radius
``1 / (2 |Im z| ||s||^2_(a,X))`` is reported as a convergence control.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .core import DEFAULT_TOL, CoefficientSet, SolutionState, propagate
from .errors import HerglotzViolation, OutOfDomain, RealAxis, TruncationUnstable


@dataclass(frozen=True)
class MFunctionEstimate:
    z: complex
    m: complex
    X: float
    radius: float
    bc_alpha: float = 0.0
    # ||u_b||^2_(a,X) for u_b = c + m s; exact for the truncated problem
    ub_norm_sq: float = math.nan

    def to_dict(self) -> dict:
        return {
            "z": {"re": self.z.real, "im": self.z.imag},
            "m": {"re": self.m.real, "im": self.m.imag},
            "X": self.X,
            "radius": self.radius,
            "bc_alpha": self.bc_alpha,
        }


def _terminal(kind: str) -> tuple[complex, complex]:
    if kind == "dirichlet":
        return 0j, -1 + 0j
    if kind == "neumann":
        return 1 + 0j, 0j
    raise ValueError(f"unknown terminal condition {kind!r}")


def _weyl_solution_at_a(coeffs, z, X, tol, terminal):
    u0, pu0 = _terminal(terminal)
    st = propagate(coeffs, SolutionState(float(X), u0, pu0, complex(z)), coeffs.a, tol, renormalize=True)
    return st


def disk_radius(coeffs: CoefficientSet, z: complex, X: float, tol: float = DEFAULT_TOL) -> float:
    """``(2 |Im z| ||s||^2_(a,X))^-1``; zero when the norm overflows."""
    s = propagate(coeffs, SolutionState(coeffs.a, 0j, 1 + 0j, complex(z)), X, tol, renormalize=True)
    log_r = -math.log(2 * abs(z.imag)) - s.log_norm_sq
    return math.exp(log_r) if log_r < 700 else math.inf


def m_function(
    coeffs: CoefficientSet,
    z: complex,
    X: float,
    tol: float = DEFAULT_TOL,
    terminal: str = "dirichlet",
    with_radius: bool = True,
) -> MFunctionEstimate:
    """Estimate ``m_b(z)`` from the problem truncated at ``X``.

    Parameters
    ----------
    terminal : {"dirichlet", "neumann"}
        Boundary condition imposed at the truncation point.
    with_radius : bool
        Skip the forward sweep for the disk radius when False (radius is NaN).
    """
    z = complex(z)
    if z.imag == 0.0:
        raise RealAxis("m_function needs Im z != 0; take boundary values via subordinacy")
    if not coeffs.a < X < coeffs.b:
        raise OutOfDomain(f"truncation X={X} not in ({coeffs.a}, {coeffs.b})")
    st = _weyl_solution_at_a(coeffs, z, X, tol, terminal)
    ua = st.u
    if abs(ua) < 1e-300 * max(abs(st.pu), 1e-300):
        raise TruncationUnstable(f"u(a) underflows at z={z}, X={X}")
    m = st.pu / ua
    ub_norm = st.norm_sq / (abs(ua) ** 2)
    radius = disk_radius(coeffs, z, X, tol) if with_radius else math.nan
    return MFunctionEstimate(z, m, float(X), radius, 0.0, ub_norm)


def rotate_bc(m: complex, alpha: float, beta: float) -> complex:
    """Map ``m_{b,beta}`` to ``m_{b,alpha}`` (projective; ``inf`` allowed)."""
    d = alpha - beta
    cd, sd = math.cos(d), math.sin(d)
    if d == 0.0:
        return m
    if cmath.isinf(m):
        return complex(math.inf) if sd == 0.0 else complex(-cd / sd)
    den = cd - sd * m
    if den == 0:
        return complex(math.inf)
    return (cd * m + sd) / den


def im_identity_residual(coeffs: CoefficientSet, z: complex, X: float, tol: float = DEFAULT_TOL) -> float:
    """Relative mismatch of ``Im m`` and ``Im z * ||c + m s||^2_(a,X)``."""
    z = complex(z)
    if z.imag <= 0:
        raise RealAxis("im_identity_residual needs Im z > 0")
    est = m_function(coeffs, z, X, tol, with_radius=False)
    return abs(est.m.imag - z.imag * est.ub_norm_sq) / abs(est.m.imag)


@dataclass
class HerglotzReport:
    entries: list[MFunctionEstimate] = field(default_factory=list)
    min_margin: float = math.inf

    @property
    def ok(self) -> bool:
        return self.min_margin > 0


def herglotz_scan(coeffs: CoefficientSet, z_grid, X: float, tol: float = DEFAULT_TOL) -> HerglotzReport:
    """Check ``Im m > -radius`` on a grid in the upper half-plane."""
    rep = HerglotzReport()
    bad = []
    for z in z_grid:
        z = complex(z)
        if z.imag <= 0:
            raise RealAxis(f"grid point {z} is not in the upper half-plane")
        est = m_function(coeffs, z, X, tol)
        rep.entries.append(est)
        margin = est.m.imag + est.radius
        rep.min_margin = min(rep.min_margin, margin)
        if margin <= 0:
            bad.append(z)
    if bad:
        raise HerglotzViolation(bad)
    return rep
