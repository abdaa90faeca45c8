"""Adaptive Simpson quadrature with strict error control.

All primitive functionals in this package are one-dimensional integrals of
smooth positive integrands, so classic recursive Simpson with the 1/15
Richardson correction is accurate and cheap.  The default tolerance is
deliberately tight (1e-12): these values feed identity residuals that must
sit well below any grid discretization error.
"""

from .errors import PrecisionError

DEFAULT_TOL = 1e-12
DEFAULT_MAX_DEPTH = 40


def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _recurse(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, a, m)
    right = _simpson(fm, frm, fb, m, b)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise PrecisionError(
            "adaptive Simpson failed to converge on [%g, %g]" % (a, b),
            achieved=abs(delta) / 15.0,
        )
    half = 0.5 * tol
    return _recurse(f, a, fa, m, fm, lm, flm, left, half, depth - 1) + _recurse(
        f, m, fm, b, fb, rm, frm, right, half, depth - 1
    )


def adaptive_simpson(f, a, b, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH):
    """Integrate ``f`` over [a, b] to tolerance ``tol``.

    The tolerance is absolute for integrals of magnitude up to 1 and
    relative beyond that (an absolute 1e-12 on an integral of size 1e5
    sits below round-off and can never terminate).  Orientation is
    respected: a > b yields the negated integral.  Raises PrecisionError
    (carrying the achieved estimate) if ``max_depth`` bisection levels do
    not suffice.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, a, b)
    tol_eff = tol * max(1.0, abs(whole))
    return sign * _recurse(f, a, fa, b, fb, m, fm, whole, tol_eff, max_depth)


def nested_simpson(inner, a, b, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH):
    """Integrate s -> adaptive_simpson(inner(s), ...) over [a, b].

    ``inner(s)`` must return a callable; each inner integral runs at the
    same tolerance as the outer one.
    """

    def outer(s):
        g, lo = inner(s)
        return adaptive_simpson(g, lo, s, tol=tol, max_depth=max_depth)

    return adaptive_simpson(outer, a, b, tol=tol, max_depth=max_depth)
