"""Internal helpers: exact-vs-float coercion and small polynomial utilities.

Polynomials are coefficient sequences in ascending order of the power.
Coefficients may be `Fraction` (exact mode) or `float`; the two modes never
mix inside one polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import numpy as np


def is_exact(value) -> bool:
    """True when the value can enter exact rational arithmetic."""
    return isinstance(value, Rational) and not isinstance(value, bool)


def coerce_couplings(omega_l, k):
    """Return (omega_l, k, exact) with both couplings Fraction or both float."""
    if is_exact(omega_l) and is_exact(k):
        return Fraction(omega_l), Fraction(k), True
    return float(omega_l), float(k), False


def as_half_integer(j) -> Fraction:
    """Validate a non-negative half-integer label and return it as a Fraction."""
    jf = Fraction(j) if not isinstance(j, float) else Fraction(j).limit_denominator(2)
    if isinstance(j, float) and jf != Fraction(j):
        raise ValueError(f"j must be a half-integer, got {j!r}")
    if jf < 0 or (2 * jf).denominator != 1:
        raise ValueError(f"j must be a non-negative half-integer, got {j!r}")
    return jf


def check_integer_m(m) -> int:
    """Validate that the magnetic quantum number is an exact integer."""
    if isinstance(m, bool) or not isinstance(m, Integral):
        raise ValueError(f"m must be an exact integer, got {m!r}")
    return int(m)


def polyval(coeffs, x):
    """Horner evaluation; exact when both coeffs and x are rational."""
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def polyder(coeffs):
    """Derivative coefficients (ascending order)."""
    return tuple(n * c for n, c in enumerate(coeffs) if n > 0)


def monic(coeffs):
    """Scale so the leading coefficient is one; exact for Fraction input."""
    lead = coeffs[-1]
    if lead == 0:
        raise ValueError("leading coefficient is zero")
    return tuple(c / lead for c in coeffs)


def newton_polish(coeffs, root: float, iterations: int = 3) -> float:
    """A few guarded Newton steps on a polynomial with float coefficients."""
    der = polyder(coeffs)
    z = float(root)
    scale = max(1.0, abs(z))
    for _ in range(iterations):
        dp = polyval(der, z)
        if dp == 0.0 or not np.isfinite(dp):
            break
        step = polyval(coeffs, z) / dp
        if not np.isfinite(step) or abs(step) > 0.1 * scale:
            break
        z -= step
    return z


def real_roots(coeffs, tol: float, diagnostics=None):
    """Real roots of a float-coefficient polynomial, ascending.

    Companion-matrix eigenvalues (numpy.roots) followed by Newton polishing.
    Roots whose imaginary part exceeds ``tol`` times the spectral scale are
    excluded and reported through the optional ``diagnostics`` list.
    """
    cs = [float(c) for c in coeffs]
    while cs and cs[-1] == 0.0:
        cs.pop()
    if len(cs) < 2:
        return []
    raw = np.roots(cs[::-1])
    scale = max(1.0, float(np.max(np.abs(raw))))
    roots = []
    for z in raw:
        if abs(z.imag) > tol * scale:
            if diagnostics is not None:
                diagnostics.append(f"excluded complex root {z!r}")
            continue
        roots.append(newton_polish(cs, float(z.real)))
    roots.sort()
    return roots
