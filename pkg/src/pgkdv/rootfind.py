"""Safeguarded scalar root finding on a sign-changing bracket.

Bisection guarantees progress; Newton steps (when a derivative is supplied
and the step behaves) give the quadratic tail.  Structure follows the
classic ``rtsafe`` safeguard: fall back to bisection whenever the Newton
step leaves the bracket or fails to halve the previous step.
"""

import math


def bracketed_root(f, a, b, fprime=None, xtol=1e-12, max_iter=200):
    """Find a root of ``f`` in ``[a, b]`` to within ``xtol`` in the argument.

    ``f(a)`` and ``f(b)`` must have opposite (or zero) signs.
    """
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"no sign change on bracket [{a}, {b}]")

    # orient so that f(lo) < 0 < f(hi)
    if fa < 0.0:
        lo, hi = a, b
    else:
        lo, hi = b, a

    x = 0.5 * (a + b)
    dx_old = abs(b - a)
    dx = dx_old
    fx = f(x)
    dfx = fprime(x) if fprime is not None else 0.0

    for _ in range(max_iter):
        newton_bad = (
            fprime is None
            or dfx == 0.0
            or not math.isfinite(dfx)
            # projected step exits the bracket
            or ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0
            # not converging faster than bisection
            or abs(2.0 * fx) > abs(dx_old * dfx)
        )
        dx_old = dx
        if newton_bad:
            dx = 0.5 * (hi - lo)
            x = lo + dx
            if x == lo:
                return x
        else:
            dx = fx / dfx
            x_prev = x
            x -= dx
            if x_prev == x:
                return x
        if abs(dx) < xtol:
            return x
        fx = f(x)
        dfx = fprime(x) if fprime is not None else 0.0
        if fx < 0.0:
            lo = x
        else:
            hi = x

    return x
