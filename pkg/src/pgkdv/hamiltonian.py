"""Unperturbed traveling-wave Hamiltonian: potential, geometry, involution.

The planar system  du/deta = y,  dy/deta = u - u^(n+1)/(n+1)  conserves

    H(u, y) = y^2 / 2 + Phi(u),      Phi(u) = -u^2/2 + u^(n+2) / ((n+1)(n+2)).

Closed orbits fill a periodic annulus around the center (u_c, 0) with
u_c = (n+1)^(1/n), for energies h between p1 = Phi(u_c) and 0.  The outer
boundary h = 0 is the loop through the saddle at the origin, crossing the
u-axis again at B = ((n+1)(n+2)/2)^(1/n).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rootfind import bracketed_root

SADDLE = "saddle"
CENTER = "center"

# below this distance from p1 the two turning points are numerically merged
DEGENERATE_BAND = 1e-10

_ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Nonlinearity exponent and the derived annulus constants."""

    n: int
    center_u: float = field(init=False)
    p1: float = field(init=False)
    p2: float = field(init=False)
    right_extent_B: float = field(init=False)

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"exponent n must be a positive integer, got {n!r}")
        object.__setattr__(self, "n", int(n))
        # fractional powers via exp(log(.)/n) to avoid integer-root special cases
        center = math.exp(math.log(n + 1.0) / n)
        object.__setattr__(self, "center_u", center)
        object.__setattr__(self, "p1", -n * center * center / (2.0 * (n + 2.0)))
        object.__setattr__(self, "p2", 0.0)
        object.__setattr__(
            self,
            "right_extent_B",
            math.exp(math.log((n + 1.0) * (n + 2.0) / 2.0) / n),
        )


@dataclass(frozen=True)
class FixedPoint:
    location: tuple
    kind: str


@dataclass(frozen=True)
class LevelCurveGeometry:
    """Turning points alpha < beta of the closed level oval at energy h."""

    h: float
    alpha: float
    beta: float
    degenerate: bool = False


def potential(params, u):
    """Phi(u) = -u^2/2 + u^(n+2)/((n+1)(n+2)); accepts scalars or arrays."""
    n = params.n
    return -0.5 * u**2 + u ** (n + 2) / ((n + 1.0) * (n + 2.0))


def potential_deriv(params, u):
    """Phi'(u) = -u + u^(n+1)/(n+1)."""
    n = params.n
    return -u + u ** (n + 1) / (n + 1.0)


def hamiltonian(params, u, y):
    """Conserved energy y^2/2 + Phi(u)."""
    return 0.5 * y**2 + potential(params, u)


def hessian_det(params, u):
    """H_uu*H_yy - H_uy^2 = u^n - 1; negative at a saddle, positive at a center."""
    return u**params.n - 1.0


def fixed_points(params):
    """Equilibria of the unperturbed system with their classification.

    Two points for odd n, three for even n (the mirror center at -u_c).
    """
    def classify(u):
        return SADDLE if hessian_det(params, u) < 0.0 else CENTER

    pts = [
        FixedPoint((0.0, 0.0), classify(0.0)),
        FixedPoint((params.center_u, 0.0), classify(params.center_u)),
    ]
    if params.n % 2 == 0:
        pts.append(FixedPoint((-params.center_u, 0.0), classify(-params.center_u)))
    return pts


def turning_points(params, h):
    """Intersections alpha(h) < beta(h) of the oval H = h with the u-axis.

    Valid for h strictly inside (p1, 0).  Within ``DEGENERATE_BAND`` of p1
    the oval has shrunk to the center; alpha = beta = center_u is returned
    with the ``degenerate`` flag set instead of failing.
    """
    p1 = params.p1
    if not (p1 < h < 0.0):
        raise ValueError(
            f"energy outside periodic annulus: h={h!r} not in ({p1}, 0)"
        )
    if h - p1 <= DEGENERATE_BAND:
        return LevelCurveGeometry(h, params.center_u, params.center_u, True)

    def f(u):
        return potential(params, u) - h

    def fp(u):
        return potential_deriv(params, u)

    alpha = bracketed_root(f, 0.0, params.center_u, fprime=fp, xtol=_ROOT_XTOL)
    beta = bracketed_root(
        f, params.center_u, params.right_extent_B, fprime=fp, xtol=_ROOT_XTOL
    )
    return LevelCurveGeometry(h, alpha, beta, False)


def involution(params, u):
    """The point on the opposite monotone branch of Phi with the same potential.

    Maps (0, u_c) onto (u_c, B) and back, fixing u_c itself.
    """
    B = params.right_extent_B
    if not (0.0 < u < B):
        raise ValueError(f"outside involution domain: u={u!r} not in (0, {B})")
    center = params.center_u
    if u == center:
        return center
    target = potential(params, u)

    def f(v):
        return potential(params, v) - target

    def fp(v):
        return potential_deriv(params, v)

    if u < center:
        return bracketed_root(f, center, B, fprime=fp, xtol=_ROOT_XTOL)
    return bracketed_root(f, 0.0, center, fprime=fp, xtol=_ROOT_XTOL)


def level_curve_points(params, h, samples=400):
    """Sample the upper branch y(u) >= 0 of the level set H = h.

    Returns (u, y) arrays ordered left to right.  h may be any value in
    [p1, 0]: interior energies give the closed oval, h = 0 the loop through
    the origin, h = p1 the center point.  Sampling is uniform in the angle
    of the sin^2 parameterization, which spaces points smoothly through the
    vertical tangents at the turning points.
    """
    p1 = params.p1
    if not (p1 <= h <= 0.0):
        raise ValueError(f"level h={h!r} outside [{p1}, 0]")
    if h - p1 <= DEGENERATE_BAND:
        c = params.center_u
        return np.array([c]), np.array([0.0])
    theta = np.linspace(0.0, 0.5 * np.pi, samples)
    if h == 0.0:
        B = params.right_extent_B
        u = B * np.sin(theta) ** 2
        y = u * np.sqrt(np.clip(1.0 - (u / B) ** params.n, 0.0, None))
        return u, y
    geom = turning_points(params, h)
    u = geom.alpha + (geom.beta - geom.alpha) * np.sin(theta) ** 2
    y = np.sqrt(np.clip(2.0 * (h - potential(params, u)), 0.0, None))
    return u, y
