"""Bracketed scalar root finding (plain bisection).

The residuals in this package have poles and branch points; bisection on a
verified sign-change bracket is the only method that never jumps branches.
Function evaluations are cheap everywhere it is used.
"""

from __future__ import annotations

__all__ = ["bisect_root"]


def bisect_root(f, a: float, b: float, fa: float | None = None, fb: float | None = None,
                xtol: float = 1e-15, rtol: float = 4e-16) -> float:
    """Root of f in [a, b] given f(a) f(b) <= 0, to |b - a| <= xtol + rtol |m|."""
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError(f"no sign change on [{a}, {b}]: f = ({fa}, {fb})")
    for _ in range(300):
        m = 0.5 * (a + b)
        if (b - a) <= xtol + rtol * abs(m):
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)
