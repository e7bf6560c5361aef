"""Map solved states onto the sextic oscillator with a centrifugal barrier.

The change of variables r = rho^2, theta = 2 phi turns the planar radial
problem into

    -1/2 zeta'' + (4 mt^2 - 1)/(8 rho^2) zeta + (2 omega_l mt - 4E) rho^2 zeta
    + 4k rho^4 zeta + 2 omega_l^2 rho^6 zeta = 4z zeta,

with mt = 2m and zeta(rho) = sqrt(rho) R(rho^2): each solved state is an
exact eigenstate of the sextic problem with eigenvalue exactly 4z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DEFAULT_R_MIN, ModelParams, QesState, RadialGrid, _fd_derivatives

__all__ = [
    "SexticState",
    "to_sextic",
    "sextic_wavefunction",
    "rho_grid_for",
    "sextic_residual",
    "DEFAULT_RHO_POINTS",
]

#: Default rho-grid size.  The mapped wavefunction has a sqrt(rho) cusp at the
#: origin for m = 0, so the geometric grid must be dense enough that the
#: second-difference truncation error of the cusp stays inside the residual
#: budget; 16384 points balances that against eps/h^2 roundoff.
DEFAULT_RHO_POINTS = 16384


@dataclass(frozen=True)
class SexticState:
    """Sextic-oscillator problem solved exactly by one mapped state."""

    m_tilde: int
    centrifugal_coeff: float
    rho2_coeff: float
    rho4_coeff: float
    rho6_coeff: float
    eigenvalue: float
    source: QesState

    def __post_init__(self):
        if self.m_tilde != 2 * self.source.params.m:
            raise ValueError("m_tilde must equal 2 m of the source state")
        if not self.rho6_coeff > 0:
            raise ValueError("the sextic coefficient must be positive")
        if self.eigenvalue != 4.0 * self.source.z:
            raise ValueError("eigenvalue must equal exactly 4 z of the source")

    def to_dict(self) -> dict:
        return {
            "m_tilde": self.m_tilde,
            "coefficients": {
                "centrifugal": self.centrifugal_coeff,
                "rho2": self.rho2_coeff,
                "rho4": self.rho4_coeff,
                "rho6": self.rho6_coeff,
            },
            "eigenvalue": self.eigenvalue,
        }


def to_sextic(state: QesState, params: ModelParams | None = None) -> SexticState:
    """Populate the mapped problem's coefficients from a solved state."""
    params = state.params if params is None else params
    omega = float(params.omega_l)
    m_tilde = 2 * params.m
    return SexticState(
        m_tilde=m_tilde,
        centrifugal_coeff=(4.0 * m_tilde * m_tilde - 1.0) / 8.0,
        rho2_coeff=2.0 * omega * m_tilde - 4.0 * state.energy,
        rho4_coeff=4.0 * float(params.k),
        rho6_coeff=2.0 * omega * omega,
        eigenvalue=4.0 * state.z,
        source=state,
    )


def sextic_wavefunction(sextic: SexticState, rho):
    """Mapped wavefunction sqrt(rho) R(rho^2) on positive rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    return np.sqrt(rho) * sextic.source.radial_values(rho * rho)


def _log_zeta_envelope(params: ModelParams, rho: float) -> float:
    omega = float(params.omega_l)
    delta = float(params.k) / omega
    power = 2 * params.abs_m + 0.5
    return power * math.log(rho) - 0.5 * omega * rho**4 - delta * rho * rho


def rho_grid_for(
    params: ModelParams,
    n: int = DEFAULT_RHO_POINTS,
    rho_min: float | None = None,
    decay: float = 1e-12,
) -> RadialGrid:
    """Geometric rho grid from sqrt(r_min) to the mapped envelope cutoff."""
    rho_min = math.sqrt(DEFAULT_R_MIN) if rho_min is None else rho_min
    power = 2 * params.abs_m + 0.5
    omega = float(params.omega_l)
    delta = float(params.k) / omega
    # Peak of the log envelope: power = 2 omega rho^4 + 2 delta rho^2.
    u_peak = (-delta + math.sqrt(delta * delta + 2.0 * omega * power)) / (2.0 * omega)
    rho_peak = math.sqrt(u_peak)
    target = _log_zeta_envelope(params, rho_peak) + math.log(decay)
    hi = rho_peak + 1.0
    while _log_zeta_envelope(params, hi) > target:
        hi *= 2.0
    lo = rho_peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _log_zeta_envelope(params, mid) > target:
            lo = mid
        else:
            hi = mid
    return RadialGrid.geometric(rho_min, hi, n)


def sextic_residual(sextic: SexticState, grid: RadialGrid | None = None) -> float:
    """Max relative finite-difference residual of the sextic equation.

    Interior maximum of |(H_sextic - 4z) zeta| scaled by max(|4z zeta|,
    machine floor), mirroring the radial verification convention.
    """
    params = sextic.source.params
    grid = rho_grid_for(params) if grid is None else grid
    rho = grid.points
    if rho.size - 2 < 32:
        raise ValueError("rho grid too coarse: need at least 32 interior points")
    zeta = sextic_wavefunction(sextic, rho)
    _, z2 = _fd_derivatives(rho, zeta)
    operator = (
        -0.5 * z2
        + (
            sextic.centrifugal_coeff / (rho * rho)
            + sextic.rho2_coeff * rho * rho
            + sextic.rho4_coeff * rho**4
            + sextic.rho6_coeff * rho**6
        )
        * zeta
    )
    residual = operator - sextic.eigenvalue * zeta
    floor = float(np.finfo(float).eps) * float(np.max(np.abs(zeta)))
    scale = max(abs(sextic.eigenvalue) * float(np.max(np.abs(zeta))), floor, 1e-300)
    return float(np.max(np.abs(residual[1:-1]))) / scale
