"""Abelian integrals over the periodic annulus and the limit wave speed.

For an energy h in (p1, 0) the closed oval Gamma_h of the unperturbed
system carries the two line integrals

    A_0(h) = closed integral of y du         (the enclosed area),
    A_n(h) = closed integral of u^n y du,

whose ratio F_n(h) = A_n/A_0 decides which ovals survive a small
perturbation: a periodic wave persists at the unique h where
F_n(h) = 1 + 1/c, giving the limit speed c0(h) = 1/(F_n(h) - 1).

Quadrature uses the substitution u = alpha + (beta - alpha) sin^2(theta),
which absorbs the square-root vanishing of y at both turning points and
leaves a smooth integrand on [0, pi/2]; Gauss-Legendre with node doubling
then converges geometrically.  The boundary case h = 0 (the loop through
the saddle) is handled by dedicated routines: the saddle end is a double
root and needs the explicit factorization y = u * sqrt(1 - (u/B)^n).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .hamiltonian import involution, potential, potential_deriv, turning_points

_NODES_MIN = 16
_NODES_MAX = 8192
_EPS = np.finfo(float).eps
# sin^2/cos^2 below this switch to the analytic endpoint limit of the
# regularized factor g
_ENDPOINT_BAND = 1e-9

_node_cache = {}


@dataclass(frozen=True)
class AbelianResult:
    """A_0, A_n and derived quantities at one energy level.

    ``quadrature_error_estimate`` is a relative bound: doubling the
    Gauss-Legendre node count changes either integral (and hence the
    ratio) by less than this fraction.
    """

    h: float
    A0: float
    An: float
    ratio: float
    limit_speed_c0: float
    quadrature_error_estimate: float
    degenerate: bool = False


@dataclass(frozen=True)
class HomoclinicValues:
    """Closed-form boundary integrals and the two ratio endpoints."""

    J0: float
    Jn: float
    ratio_at_zero: float
    ratio_at_p1: float


def _gauss_nodes(m):
    """Gauss-Legendre nodes/weights mapped to [0, pi/2], cached per count."""
    cached = _node_cache.get(m)
    if cached is None:
        x, w = roots_legendre(m)
        theta = 0.25 * np.pi * (x + 1.0)
        cached = (theta, 0.25 * np.pi * w)
        _node_cache[m] = cached
    return cached


def _oval_gauss(params, k, h, geom, m):
    """Fixed-node value of 2 * int_alpha^beta u^k sqrt(2(h - Phi)) du."""
    theta, w = _gauss_nodes(m)
    alpha, beta = geom.alpha, geom.beta
    width = beta - alpha
    s2 = np.sin(theta) ** 2
    c2 = 1.0 - s2
    u = alpha + width * s2
    g = 2.0 * (h - potential(params, u)) / (width * width * s2 * c2)
    # endpoint limits of the regularized factor; the raw ratio is 0/0 there
    g = np.where(s2 < _ENDPOINT_BAND, -2.0 * potential_deriv(params, alpha) / width, g)
    g = np.where(c2 < _ENDPOINT_BAND, 2.0 * potential_deriv(params, beta) / width, g)
    np.clip(g, 0.0, None, out=g)
    f = 4.0 * width * width * u**k * s2 * c2 * np.sqrt(g)
    return float(np.dot(w, f))


def _adaptive(value_at, rtol):
    """Double node counts until the change drops below rtol (relative)."""
    m = _NODES_MIN
    prev = value_at(m)
    while m < _NODES_MAX:
        m *= 2
        cur = value_at(m)
        change = abs(cur - prev)
        if change <= rtol * abs(cur):
            return cur, max(change, 4.0 * _EPS * abs(cur)), m
        prev = cur
    raise RuntimeError(
        f"quadrature failed to converge below rtol={rtol} within {_NODES_MAX} nodes"
    )


def _check_k(params, k):
    if k not in (0, params.n):
        raise ValueError(f"moment k={k!r} not supported; use 0 or n={params.n}")


def _oval_integral(params, k, h, rtol):
    geom = turning_points(params, h)
    if geom.degenerate:
        return 0.0, 0.0, 0, True
    val, err, m = _adaptive(lambda m: _oval_gauss(params, k, h, geom, m), rtol)
    return val, err, m, False


def abelian_integral(params, k, h, rtol=1e-9):
    """A_k(h) = 2 * int_alpha^beta u^k sqrt(2(h - Phi(u))) du, k in {0, n}.

    Returns 0.0 for energies within the degenerate band at p1 (oval shrunk
    to the center); raises ValueError outside (p1, 0).
    """
    _check_k(params, k)
    return _oval_integral(params, k, h, rtol)[0]


def ratio_F(params, h, rtol=1e-9):
    """Full AbelianResult at energy h: integrals, ratio and limit speed.

    In the degenerate band at p1 the limiting values ratio = n + 1 and
    c0 = 1/n are reported with the flag set.
    """
    n = params.n
    a0, e0, _, degen = _oval_integral(params, 0, h, rtol)
    if degen:
        return AbelianResult(h, 0.0, 0.0, n + 1.0, 1.0 / n, 0.0, True)
    an, en, _, _ = _oval_integral(params, n, h, rtol)
    ratio = an / a0
    err = max(e0 / abs(a0), en / abs(an), 4.0 * _EPS)
    return AbelianResult(h, a0, an, ratio, 1.0 / (ratio - 1.0), err)


def speed_for_level(params, h, rtol=1e-9):
    """The wave speed c > 0 whose periodic wave sits on the oval at h."""
    return ratio_F(params, h, rtol).limit_speed_c0


def level_for_speed(params, c, rtol=1e-9, margin_scale=1e-8):
    """Invert the monotone ratio: the h with F_n(h) = 1 + 1/c.

    Bisection on h; raises ValueError when 1 + 1/c falls outside the open
    range (2(n+1)(n+2)/(3n+4), n+1) so no oval carries that speed.
    """
    if c <= 0.0:
        raise ValueError(f"wave speed must be positive, got {c!r}")
    target = 1.0 + 1.0 / c
    margin = margin_scale * abs(params.p1)
    lo = params.p1 + margin
    hi = -margin
    f_lo = ratio_F(params, lo, rtol).ratio - target
    f_hi = ratio_F(params, hi, rtol).ratio - target
    # F is decreasing: f_lo > 0 > f_hi when the target is attainable
    if f_lo < 0.0 or f_hi > 0.0:
        raise ValueError(
            f"no periodic-wave energy level for c={c}: ratio target {target} "
            f"outside attainable range"
        )
    htol = 1e-12 * abs(params.p1)
    while hi - lo > htol:
        mid = 0.5 * (lo + hi)
        if ratio_F(params, mid, rtol).ratio - target > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ratio_curve(params, grid_size, rtol=1e-9, margin_scale=1e-6):
    """AbelianResults on a uniform h-grid spanning the annulus.

    The grid runs from p1 + margin to -margin with
    margin = margin_scale * |p1|; the singular endpoints themselves are
    never evaluated.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    margin = margin_scale * abs(params.p1)
    hs = np.linspace(params.p1 + margin, -margin, grid_size)
    return [ratio_F(params, float(h), rtol) for h in hs]


def c0_curve(params, grid_size, rtol=1e-9, margin_scale=1e-6):
    """(h, ratio, c0) rows over the annulus; ratio falls, c0 rises."""
    return [
        (r.h, r.ratio, r.limit_speed_c0)
        for r in ratio_curve(params, grid_size, rtol, margin_scale)
    ]


def _neville(xs, ys, x):
    """Polynomial extrapolation of the points (xs, ys) to x."""
    p = list(ys)
    k = len(p)
    for level in range(1, k):
        for i in range(k - level):
            p[i] = (
                (x - xs[i + level]) * p[i] + (xs[i] - x) * p[i + 1]
            ) / (xs[i] - xs[i + level])
    return p[0]


def ratio_endpoint_limits(params, grid_size=64, points=4, rtol=1e-9, curve=None):
    """Extrapolated F_n limits at the annulus endpoints.

    Richardson-style polynomial extrapolation over the ``points`` grid
    values nearest each endpoint of the canonical uniform grid (the
    endpoints themselves are singular for the quadrature).  Returns
    (limit at h -> p1+, limit at h -> 0-); they should approach n + 1 and
    2(n+1)(n+2)/(3n+4).
    """
    margin = 1e-6 * abs(params.p1)
    hs = np.linspace(params.p1 + margin, -margin, grid_size)
    if curve is not None:
        if len(curve) != grid_size:
            raise ValueError("precomputed curve length does not match grid_size")
        lookup = {r.h: r.ratio for r in curve}
        ratios_lo = [lookup[float(h)] for h in hs[:points]]
        ratios_hi = [lookup[float(h)] for h in hs[-points:]]
    else:
        ratios_lo = [ratio_F(params, float(h), rtol).ratio for h in hs[:points]]
        ratios_hi = [ratio_F(params, float(h), rtol).ratio for h in hs[-points:]]
    at_p1 = _neville(list(hs[:points]), ratios_lo, params.p1)
    at_zero = _neville(list(hs[-points:]), ratios_hi, 0.0)
    return at_p1, at_zero


def _homoclinic_gauss(params, k, m):
    n = params.n
    B = params.right_extent_B
    theta, w = _gauss_nodes(m)
    s2 = np.sin(theta) ** 2
    # 1 - sin^(2n) = cos^2 * sum_j sin^(2j): the saddle-side factor is exact
    geom_sum = np.ones_like(s2)
    term = np.ones_like(s2)
    for _ in range(n - 1):
        term = term * s2
        geom_sum += term
    f = (
        2.0
        * B ** (k + 2)
        * np.sin(theta) ** (2 * k + 3)
        * (1.0 - s2)
        * np.sqrt(geom_sum)
    )
    return float(np.dot(w, f))


def homoclinic_integral(params, k, rtol=1e-9):
    """J_k(0) = int_0^B u^(k+1) sqrt(1 - (u/B)^n) du on the boundary loop.

    The substitution u = B sin^2(theta) removes the square-root zero at B;
    the saddle end u = 0 is regular because y vanishes linearly there.
    """
    _check_k(params, k)
    val, _, _ = _adaptive(lambda m: _homoclinic_gauss(params, k, m), rtol)
    return val


def beta_function(p, q):
    """Euler Beta via log-Gamma, accurate for fractional arguments."""
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def homoclinic_values(params):
    """Closed-form J_0(0), J_n(0) and the two ratio endpoints.

    With K = (n+1)(n+2)/2 = B^n:

        J_0(0) = K^(2/n) B(3/2, 2/n) / n,
        J_n(0) = K^((n+2)/n) B(3/2, (n+2)/n) / n,

    and J_n(0)/J_0(0) reduces exactly to 2(n+1)(n+2)/(3n+4); the opposite
    endpoint of the ratio (oval shrunk onto the center) is n + 1.
    """
    n = params.n
    B_ext = params.right_extent_B
    j0 = B_ext**2 * beta_function(1.5, 2.0 / n) / n
    jn = B_ext ** (n + 2) * beta_function(1.5, (n + 2.0) / n) / n
    return HomoclinicValues(
        J0=j0,
        Jn=jn,
        ratio_at_zero=2.0 * (n + 1.0) * (n + 2.0) / (3.0 * n + 4.0),
        ratio_at_p1=n + 1.0,
    )


def identity_residual(n, u, v):
    """LHS - RHS of the power-sum factorization used by the ratio argument:

    (u^2 - v^2) * sum_i (u^(n-2i) - v^(n-2i))^2 (uv)^(2i)
        = (u^(2(n+1)) - v^(2(n+1))) - (n+1) u^n v^n (u^2 - v^2),

    i running to floor((n-1)/2).  Vanishes identically for every positive
    integer n; the returned residual is floating-point noise only.
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    uv = u * v
    lhs_sum = 0.0
    for i in range((n - 1) // 2 + 1):
        diff = u ** (n - 2 * i) - v ** (n - 2 * i)
        lhs_sum = lhs_sum + diff * diff * uv ** (2 * i)
    lhs = (u**2 - v**2) * lhs_sum
    rhs = (u ** (2 * (n + 1)) - v ** (2 * (n + 1))) - (n + 1) * uv**n * (
        u**2 - v**2
    )
    return lhs - rhs


def f_poly(n, u, v):
    """sum_{k=1}^{n} k v^(k-1) u^(n-k), evaluated by Horner in v."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    acc = n + 0.0 * u  # coefficient of v^(n-1); 0*u keeps array inputs array
    for j in range(n - 2, -1, -1):
        acc = acc * v + (j + 1) * u ** (n - 1 - j)
    return acc


def _check_right_branch(params, u):
    if not (params.center_u < u < params.right_extent_B):
        raise ValueError(
            f"u={u!r} outside the right branch "
            f"({params.center_u}, {params.right_extent_B})"
        )


def positivity_certificate(params, u):
    """f_n(u,v) Phi'(u) + f_n(v,u) Phi'(v) with v the involution partner.

    Strictly positive on (center_u, B); equals
    certificate_closed_form(params, u, v) up to rounding, which is the
    sum-of-squares form guaranteeing the ratio's monotonicity.
    """
    _check_right_branch(params, u)
    n = params.n
    v = involution(params, u)
    return f_poly(n, u, v) * potential_deriv(params, u) + f_poly(
        n, v, u
    ) * potential_deriv(params, v)


def certificate_closed_form(params, u, v):
    """n/((n+1)(n+2)) * sum_i (u^(n-2i) - v^(n-2i))^2 (uv)^(2i)."""
    n = params.n
    uv = u * v
    total = 0.0
    for i in range((n - 1) // 2 + 1):
        diff = u ** (n - 2 * i) - v ** (n - 2 * i)
        total += diff * diff * uv ** (2 * i)
    return n / ((n + 1.0) * (n + 2.0)) * total


def T_n(params, u):
    """The (n+1)-term power average u^n + u^(n-1) v + ... + v^n, v = delta(u).

    Strictly decreasing on (center_u, B); its sign of slope transfers to
    the monotonicity of F_n.  Tends to (n+1)^2 as u approaches the center.
    """
    from .hamiltonian import involution

    _check_right_branch(params, u)
    n = params.n
    v = involution(params, u)
    total = 0.0
    for k in range(n + 1):
        total += u ** (n - k) * v**k
    return total
