"""Analytic route: indicial analysis, the three-term recurrence for the
polynomial part, and the termination constraint whose roots are the
admissible Coulomb strengths.

With the level-n energy fixed, the coefficient in front of a_{n-1} in the
recurrence vanishes at index n, so a vanishing a_n kills the whole tail of
the series: the polynomial factor then has degree n - 1 and the state is
exactly normalizable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import model
from ._polyops import (
    check_integer_m,
    coerce_couplings,
    monic,
    polyval,
    real_roots,
)
from .model import DomainError, ModelParams, QesState, level_energy

__all__ = [
    "NoGroundStateError",
    "IndicialData",
    "RecurrenceState",
    "ConstraintPolynomial",
    "indicial_exponent",
    "recurrence_next",
    "constraint_polynomial",
    "constraint_value",
    "solve_series_states",
]

_HALF = Fraction(1, 2)


class NoGroundStateError(DomainError):
    """Raised for level-0 requests: the terminating family starts at level 1.

    Assuming a constant solution forces its own coefficient to vanish
    through the recurrence, so no level-0 (nodeless-constant) state exists.
    """

    DEFAULT_MESSAGE = (
        "level 0 is inadmissible: the terminating family has no ground "
        "state, the lowest solvable level is 1"
    )

    def __init__(self, message: str | None = None):
        super().__init__(message or self.DEFAULT_MESSAGE)


@dataclass(frozen=True)
class IndicialData:
    """Power-law exponents at the origin: |m| + 1/2 for the reduced radial
    function u = sqrt(r) R, and 0 for the polynomial factor."""

    s_zero: Fraction
    s_phi: int = 0


def indicial_exponent(m: int) -> IndicialData:
    m = check_integer_m(m)
    return IndicialData(s_zero=abs(m) + _HALF, s_phi=0)


@dataclass(frozen=True)
class RecurrenceState:
    """Coefficients a_0 .. a_current of the polynomial factor plus the model
    data (m, omega_l, k, energy, z) that drives the recurrence."""

    m: int
    omega_l: object
    k: object
    energy: object
    z: object
    coeffs: tuple

    def extended(self) -> "RecurrenceState":
        n = len(self.coeffs) - 1
        nxt = recurrence_next(self, n)
        return RecurrenceState(
            self.m, self.omega_l, self.k, self.energy, self.z,
            self.coeffs + (nxt,),
        )


def recurrence_next(state: RecurrenceState, n: int):
    """Next coefficient a_{n+1} from a_{n-1} and a_n (a_{-1} = 0).

    a_{n+1} = { [omega_l (n + |m| + m) - k^2/(2 omega_l^2) - E] a_{n-1}
              + [(|m| + 1/2 + n) k/omega_l - Z] a_n }
              / [ (n + 1) (|m| + (1 + n)/2) ]

    The denominator is strictly positive for every n >= 0.
    """
    if n < 0 or n >= len(state.coeffs):
        raise ValueError(f"coefficient a_{n} is not available")
    am = abs(state.m)
    omega, k = state.omega_l, state.k
    a_prev = state.coeffs[n - 1] if n >= 1 else 0
    a_cur = state.coeffs[n]
    e_term = omega * (n + am + state.m) - k * k / (2 * omega * omega) - state.energy
    z_term = (am + _HALF + n) * (k / omega) - state.z
    denom = (n + 1) * (am + Fraction(1 + n, 2))
    return (e_term * a_prev + z_term * a_cur) / denom


@dataclass(frozen=True)
class ConstraintPolynomial:
    """Termination constraint for one level, as a polynomial in the Coulomb
    strength z (ascending coefficients, exact for rational couplings)."""

    level: int
    m: int
    omega_l: object
    k: object
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return polyval(self.coeffs, z)

    def monic(self) -> tuple:
        return monic(self.coeffs)


def constraint_polynomial(level: int, m: int, omega_l, k) -> ConstraintPolynomial:
    """Run the recurrence symbolically in z from a_0 = 1 and return a_level.

    The level energy is fixed first, so the vanishing of a_level terminates
    the series at degree level - 1.  Exact rational coefficients whenever the
    couplings are rational; degree equals the level exactly.
    """
    if level == 0:
        raise NoGroundStateError()
    if level < 0 or int(level) != level:
        raise ValueError(f"level must be a positive integer, got {level!r}")
    m = check_integer_m(m)
    omega, kk, exact = coerce_couplings(omega_l, k)
    if not omega > 0:
        raise ValueError("omega_l must be > 0")
    energy = level_energy(level, m, omega, kk)
    am = abs(m)
    one = Fraction(1) if exact else 1.0

    # Coefficients a_n are linear-combination polynomials in z.
    a_prev: list = []          # a_{-1} = 0
    a_cur: list = [one]        # a_0 = 1
    for n in range(level):
        e_term = omega * (n + am + m) - kk * kk / (2 * omega * omega) - energy
        b_term = (am + _HALF + n) * (kk / omega)
        denom = (n + 1) * (am + Fraction(1 + n, 2))
        width = max(len(a_prev), len(a_cur) + 1)
        nxt = [Fraction(0) if exact else 0.0] * width
        for i, c in enumerate(a_prev):
            nxt[i] += e_term * c
        for i, c in enumerate(a_cur):
            nxt[i] += b_term * c          # constant part of the z bracket
            nxt[i + 1] -= c               # the -z part shifts the powers
        nxt = [c / denom for c in nxt]
        a_prev, a_cur = a_cur, nxt
    return ConstraintPolynomial(level, m, omega, kk, tuple(a_cur))


def constraint_value(level: int, m: int, omega_l, k, z):
    """Feasibility check: evaluate the termination constraint at a given z."""
    return constraint_polynomial(level, m, omega_l, k)(z)


def _regenerate(level: int, m: int, omega_l: float, k: float, energy: float,
                z: float, extra: int = 2) -> list[float]:
    state = RecurrenceState(m, float(omega_l), float(k), float(energy),
                            float(z), (1.0,))
    for _ in range(level + extra):
        state = state.extended()
    return [float(c) for c in state.coeffs]


def solve_series_states(level: int, m: int, omega_l, k, tol: float = 1e-9,
                        diagnostics: list[str] | None = None) -> list[QesState]:
    """States of one level from the real roots of the termination constraint.

    Roots come from the companion matrix of the constraint polynomial with a
    Newton polish on the exact coefficients; complex roots are excluded and
    reported.  For each root the recurrence is re-run numerically and the
    coefficients past the polynomial degree are checked to vanish.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    constraint = constraint_polynomial(level, m, omega_l, k)
    roots = real_roots([float(c) for c in constraint.coeffs], tol, diagnostics)
    if not roots and diagnostics is not None:
        diagnostics.append(
            f"no real admissible z at level={level}, m={m}"
        )

    energy = float(level_energy(level, m, omega_l, k))
    params = ModelParams(float(omega_l), float(k), int(m))
    states = []
    for z in roots:
        coeffs = _regenerate(level, m, float(omega_l), float(k), energy, z)
        scale = max(1.0, max(abs(c) for c in coeffs[:level]))
        tail = max(abs(coeffs[level]), abs(coeffs[level + 1]))
        if tail > tol * scale:
            raise RuntimeError(
                f"series failed to terminate at level {level}, z={z!r}: "
                f"tail coefficient {tail:.3e}"
            )
        poly = tuple(coeffs[:level])
        states.append(
            QesState(
                level=level,
                j=0.5 * (level - 1),
                z=float(z),
                energy=energy,
                poly=poly,
                norm_constant=model.l2_norm_constant(params, poly),
                params=params,
            )
        )
    return states
