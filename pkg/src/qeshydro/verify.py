"""Independent checks on solved states: operator residuals, normalization,
node counts, cross-method agreement, and scaling audits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import simpson

from . import series, sl2
from ._polyops import as_half_integer, is_exact, polyder, polyval
from .model import (
    ModelParams,
    QesState,
    RadialGrid,
    gauss_integrate,
    radial_operator_apply,
)

__all__ = [
    "Tolerances",
    "VerificationReport",
    "verify_state",
    "cross_validate",
    "scaling_audit",
    "count_nodes",
    "residual_convergence_ratio",
]


@dataclass(frozen=True)
class Tolerances:
    max_residual: float = 1e-5
    norm_error: float = 1e-8
    cross_delta: float = 1e-9

    def __post_init__(self):
        if min(self.max_residual, self.norm_error, self.cross_delta) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification run; unset metrics are None."""

    state_label: str
    max_residual: float | None = None
    norm_error: float | None = None
    node_count: int | None = None
    cross_method_delta: float | None = None
    cross_energy_delta: float | None = None
    cross_poly_delta: float | None = None
    passed: bool = False
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {"state": self.state_label}
        for key in (
            "max_residual",
            "norm_error",
            "node_count",
            "cross_method_delta",
            "cross_energy_delta",
            "cross_poly_delta",
        ):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        out["passed"] = self.passed
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _state_label(state: QesState) -> str:
    p = state.params
    return (
        f"level={state.level} m={p.m} omega_l={p.omega_l:.12g} "
        f"k={p.k:.12g} z={state.z:.12g}"
    )


def _sturm_chain(coeffs):
    chain = [list(coeffs)]
    der = list(polyder(coeffs))
    if der:
        chain.append(der)
    while len(chain[-1]) > 1:
        num, den = chain[-2], chain[-1]
        rem = list(num)
        while len(rem) >= len(den) and any(c != 0 for c in rem):
            factor = rem[-1] / den[-1]
            shift = len(rem) - len(den)
            for i, c in enumerate(den):
                rem[shift + i] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        if not rem:
            break
        chain.append([-c for c in rem])
    return chain


def _sign_variations(chain, x):
    signs = []
    for poly in chain:
        v = polyval(poly, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots_sturm(coeffs, upper) -> int:
    exact = [Fraction(float(c)) for c in coeffs]
    while exact and exact[-1] == 0:
        exact.pop()
    if len(exact) < 2:
        return 0
    chain = _sturm_chain(exact)
    hi = Fraction(float(upper))
    return _sign_variations(chain, Fraction(0)) - _sign_variations(chain, hi)


def count_nodes(poly, r_max: float, mesh_points: int = 4096) -> int:
    """Sign changes of the polynomial factor on (0, r_max].

    A fine-mesh sign scan, replaced by an exact Sturm count for degree <= 3
    (the two agree for the simple roots produced by the solvers).
    """
    coeffs = [float(c) for c in poly]
    degree = len(coeffs) - 1
    while degree > 0 and coeffs[degree] == 0.0:
        degree -= 1
    if degree <= 0:
        return 0
    if degree <= 3 and coeffs[0] != 0.0:
        return _count_roots_sturm(coeffs[: degree + 1], r_max)
    mesh = np.linspace(r_max / mesh_points, r_max, mesh_points)
    values = polyval(coeffs, mesh)
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.sum(signs[:-1] != signs[1:]))


def _norm_estimate(state: QesState, grid: RadialGrid) -> float:
    """Simpson norm on the grid plus endpoint tail estimates."""
    r = grid.points
    density = state.radial_values(r) ** 2 * r
    total = float(simpson(density, x=r))

    head = gauss_integrate(
        lambda s: state.radial_values(s) ** 2 * s, 0.0, grid.r_min, n=16
    )

    # Beyond r_max the density is dominated by a decaying exponential whose
    # local rate includes the polynomial/power growth; bound the tail by a
    # single exponential majorant.
    p = state.params
    degree = state.level - 1
    r_max = grid.r_max
    rate = (
        2.0 * float(p.omega_l) * r_max
        + 2.0 * float(p.k) / float(p.omega_l)
        - (2.0 * p.abs_m + 1.0 + 2.0 * degree) / r_max
    )
    rate = max(rate, float(p.omega_l) * r_max)
    tail = float(density[-1]) / rate
    return total + head + tail


def verify_state(
    state: QesState,
    params: ModelParams | None = None,
    grid: RadialGrid | None = None,
    tolerances: Tolerances = Tolerances(),
) -> VerificationReport:
    """Residual, normalization, and node-count report for one state.

    The residual is the interior maximum of |(H - E) R| scaled by
    max(|E R|, machine floor) over the grid; normalization error is the
    deviation of the Simpson-plus-tails norm from one.
    """
    params = state.params if params is None else params
    grid = RadialGrid.for_params(params) if grid is None else grid
    if not any(abs(c) > 0 for c in state.poly):
        raise ValueError("state has an identically zero polynomial factor")

    samples = state.radial_values(grid.points)
    residual, interior = radial_operator_apply(
        params.with_z(state.z), state.energy, grid, samples
    )
    floor = float(np.finfo(float).eps) * float(np.max(np.abs(samples)))
    scale = max(abs(state.energy) * float(np.max(np.abs(samples))), floor, 1e-300)
    max_residual = float(np.max(np.abs(residual[interior]))) / scale

    norm_error = abs(_norm_estimate(state, grid) - 1.0)
    nodes = count_nodes(state.poly, grid.r_max)

    passed = (
        max_residual <= tolerances.max_residual
        and norm_error <= tolerances.norm_error
    )
    return VerificationReport(
        state_label=_state_label(state),
        max_residual=max_residual,
        norm_error=norm_error,
        node_count=nodes,
        passed=passed,
    )


def residual_convergence_ratio(
    state: QesState,
    params: ModelParams | None = None,
    n_coarse: int = 4096,
) -> float:
    """Ratio of max residuals on the default grid and its 2x refinement."""
    params = state.params if params is None else params
    coarse = verify_state(state, params, RadialGrid.for_params(params, n=n_coarse))
    fine = verify_state(state, params, RadialGrid.for_params(params, n=2 * n_coarse))
    return coarse.max_residual / fine.max_residual


def cross_validate(j, m: int, omega_l, k, tol: float = 1e-9) -> VerificationReport:
    """Solve by both routes and compare matched roots.

    Roots are matched in sorted order (the minimal-distance assignment for
    two sorted real sequences).  A root-count mismatch after reality
    filtering is reported as a failure, not raised.
    """
    jf = as_half_integer(j)
    level = int(2 * jf) + 1
    if level > 13:
        raise ValueError("cross_validate is intended for levels up to 13")
    label = f"j={jf} m={m} omega_l={float(omega_l):.12g} k={float(k):.12g}"

    diags: list[str] = []
    algebra = sl2.solve_admissible_z(jf, m, omega_l, k, tol, diagnostics=diags)
    power = series.solve_series_states(level, m, omega_l, k, tol, diagnostics=diags)
    if len(algebra) != len(power):
        return VerificationReport(
            state_label=label,
            passed=False,
            notes=tuple(
                diags
                + [
                    f"root-count mismatch: {len(algebra)} from the algebraic "
                    f"route, {len(power)} from the series route"
                ]
            ),
        )
    if not algebra:
        return VerificationReport(
            state_label=label,
            passed=False,
            notes=tuple(diags + ["both routes returned no real roots"]),
        )

    dz = max(abs(a.z - b.z) for a, b in zip(algebra, power))
    de = max(abs(a.energy - b.energy) for a, b in zip(algebra, power))
    dp = max(
        max(abs(ca - cb) for ca, cb in zip(a.poly, b.poly))
        for a, b in zip(algebra, power)
    )
    passed = max(dz, de, dp) <= tol
    return VerificationReport(
        state_label=label,
        cross_method_delta=dz,
        cross_energy_delta=de,
        cross_poly_delta=dp,
        passed=passed,
        notes=tuple(diags),
    )


def scaling_audit(j, m: int, omega_l, k, lam, tol: float = 1e-10) -> VerificationReport:
    """Check the covariance (omega_l, k) -> (lam^2 omega_l, lam^3 k).

    Every admissible strength must scale by lam and every energy by lam^2,
    with the ascending ordering preserved.
    """
    jf = as_half_integer(j)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if is_exact(omega_l) and is_exact(k) and is_exact(lam):
        lam_f = Fraction(lam)
        scaled_omega, scaled_k = lam_f**2 * Fraction(omega_l), lam_f**3 * Fraction(k)
    else:
        lam_f = float(lam)
        scaled_omega, scaled_k = lam_f**2 * float(omega_l), lam_f**3 * float(k)
    label = (
        f"j={jf} m={m} omega_l={float(omega_l):.12g} k={float(k):.12g} "
        f"lambda={float(lam):.12g}"
    )

    base = sl2.solve_admissible_z(jf, m, omega_l, k)
    scaled = sl2.solve_admissible_z(jf, m, scaled_omega, scaled_k)
    if len(base) != len(scaled):
        return VerificationReport(
            state_label=label,
            passed=False,
            notes=(f"root-count mismatch under scaling: {len(base)} vs {len(scaled)}",),
        )

    lam_v = float(lam)

    def rel(a: float, b: float) -> float:
        if a == b:
            return 0.0
        return abs(a - b) / max(abs(a), abs(b), 1e-30)

    dz = max(rel(s.z, lam_v * b.z) for s, b in zip(scaled, base))
    de = max(rel(s.energy, lam_v * lam_v * b.energy) for s, b in zip(scaled, base))
    passed = max(dz, de) <= tol
    return VerificationReport(
        state_label=label,
        cross_method_delta=dz,
        cross_energy_delta=de,
        passed=passed,
    )
