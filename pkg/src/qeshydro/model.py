"""Physical parameters, solved states, radial grids, and the radial operator.

Everything here is immutable after construction and purely functional, so it
is safe to evaluate concurrently over grids and parameter sets.

Conventions (atomic units throughout):

* the radial Hamiltonian is
  ``-1/2 d^2/dr^2 - 1/(2r) d/dr + omega_l^2 r^2 / 2 + k r + omega_l m
  - z/r + m^2/(2 r^2)``,
* bound radial functions factor as ``P(r) * r^|m| * exp(-omega_l r^2 / 2
  - (k/omega_l) r)`` with a polynomial ``P``,
* states are normalized in L2((0, inf), r dr) with ``P(0) = 1`` before the
  overall normalization constant is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._polyops import check_integer_m, coerce_couplings, polyval

TWO_PI = 2.0 * math.pi

#: Default grid controls.  The spacing floor guards the second-difference
#: stencil against float cancellation: without it a geometric grid reaches
#: h ~ 2e-6 near r_min where eps/h^2 noise would swamp the residual budget.
DEFAULT_GRID_POINTS = 4096
DEFAULT_R_MIN = 1e-3
ENVELOPE_DECAY = 1e-12
_SPACING_FLOOR_AT_DEFAULT = 1.25e-4

_GAUSS_NODES = {}


class DomainError(ValueError):
    """A structurally inadmissible request (distinct from a usage slip)."""


class GridError(ValueError):
    """The supplied radial grid is unfit for the requested operation."""


@dataclass(frozen=True)
class ModelParams:
    """Couplings and quantum number of the planar model.

    ``z_coulomb`` is present when checking a fully specified model and absent
    (None) when the Coulomb strength is the spectral unknown.
    """

    omega_l: float
    k: float
    m: int
    z_coulomb: float | None = None

    def __post_init__(self):
        if not self.omega_l > 0:
            raise ValueError(f"omega_l must be > 0, got {self.omega_l!r}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k!r}")
        check_integer_m(self.m)

    @property
    def abs_m(self) -> int:
        return abs(self.m)

    @property
    def delta(self):
        """Linear envelope coefficient k / omega_l."""
        omega, k, exact = coerce_couplings(self.omega_l, self.k)
        return k / omega if exact else float(self.k) / float(self.omega_l)

    def require_z(self) -> float:
        if self.z_coulomb is None:
            raise ValueError("z_coulomb is required for this operation")
        return self.z_coulomb

    def with_z(self, z) -> "ModelParams":
        return replace(self, z_coulomb=z)

    def envelope(self, r):
        """Normalizable envelope r^|m| exp(-omega_l r^2/2 - (k/omega_l) r)."""
        r = np.asarray(r, dtype=float)
        omega = float(self.omega_l)
        delta = float(self.k) / omega
        return r**self.abs_m * np.exp(-0.5 * omega * r * r - delta * r)

    def log_envelope(self, r: float) -> float:
        """log of the envelope; requires r > 0 when m != 0."""
        omega = float(self.omega_l)
        delta = float(self.k) / omega
        power = self.abs_m * math.log(r) if self.abs_m else 0.0
        return power - 0.5 * omega * r * r - delta * r


@dataclass(frozen=True)
class GaugeTransform:
    """Envelope coefficients (mu, delta, nu) of the normalizable gauge factor."""

    mu: float
    delta: float
    nu: float


def gauge_transform(params: ModelParams) -> GaugeTransform:
    """Resolve the sign branches so the gauged wavefunction is normalizable.

    The admissible branch is (mu, delta, nu) = (omega_l, k/omega_l, -|m|):
    positive mu kills the Gaussian growth at infinity and nu = -|m| selects
    the regular power law at the origin.
    """
    omega, k, exact = coerce_couplings(params.omega_l, params.k)
    if not omega > 0:
        raise ValueError("omega_l must be > 0")
    return GaugeTransform(mu=omega, delta=k / omega, nu=-params.abs_m)


def level_energy(level: int, m: int, omega_l, k):
    """Energy of the level-n terminating solution:
    omega_l (n + |m| + m) - k^2 / (2 omega_l^2).

    Exact (Fraction) when omega_l and k are rational.
    """
    if level < 1:
        raise DomainError(
            "level must be >= 1: the terminating series admits no level-0 "
            "(ground) state"
        )
    m = check_integer_m(m)
    omega, kk, exact = coerce_couplings(omega_l, k)
    return omega * (level + abs(m) + m) - kk * kk / (2 * omega * omega)


@dataclass(frozen=True)
class QesState:
    """One solved state of the quasi-exactly solvable family.

    ``poly`` holds the coefficients (ascending powers) of the polynomial
    factor with ``poly[0] = 1``; ``norm_constant`` makes the reconstructed
    radial function unit-norm in L2(r dr).
    """

    level: int
    j: float
    z: float
    energy: float
    poly: tuple[float, ...]
    norm_constant: float
    params: ModelParams

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if len(self.poly) != self.level:
            raise ValueError(
                f"poly must have level={self.level} coefficients, "
                f"got {len(self.poly)}"
            )
        if not self.norm_constant > 0:
            raise ValueError("norm_constant must be positive")
        expected = float(level_energy(self.level, self.params.m,
                                      self.params.omega_l, self.params.k))
        if abs(self.energy - expected) > 1e-9 * max(1.0, abs(expected)):
            raise ValueError(
                f"energy {self.energy} inconsistent with level {self.level}"
            )

    @property
    def solved_params(self) -> ModelParams:
        """Parameters with this state's admissible Coulomb strength filled in."""
        return self.params.with_z(self.z)

    def polynomial_values(self, r):
        return np.asarray(polyval(self.poly, np.asarray(r, dtype=float)))

    def radial_values(self, r):
        """Normalized radial function R(r) on positive radii."""
        r = np.asarray(r, dtype=float)
        return self.norm_constant * self.polynomial_values(r) * self.params.envelope(r)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "j": self.j,
            "z": self.z,
            "energy": self.energy,
            "poly": list(self.poly),
            "norm_constant": self.norm_constant,
        }

    @classmethod
    def from_dict(cls, data: dict, params: ModelParams) -> "QesState":
        return cls(
            level=int(data["level"]),
            j=float(data["j"]),
            z=float(data["z"]),
            energy=float(data["energy"]),
            poly=tuple(float(c) for c in data["poly"]),
            norm_constant=float(data["norm_constant"]),
            params=params,
        )


def envelope_r_max(params: ModelParams, decay: float = ENVELOPE_DECAY) -> float:
    """Radius where the envelope has fallen below ``decay`` of its peak.

    Overshoots the crossing by half a decade so the bound holds strictly on
    any grid that ends there.
    """
    omega = float(params.omega_l)
    delta = float(params.k) / omega
    am = params.abs_m
    if am == 0:
        r_peak, log_peak = 0.0, 0.0
    else:
        r_peak = (-delta + math.sqrt(delta * delta + 4.0 * omega * am)) / (2.0 * omega)
        log_peak = params.log_envelope(r_peak)
    target = log_peak + math.log(decay) - 0.5 * math.log(10.0)
    lo = max(r_peak, 1e-12)
    hi = lo + 1.0
    while params.log_envelope(hi) > target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if params.log_envelope(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing positive radii with a named spacing policy."""

    points: np.ndarray
    policy: str
    r_min: float
    r_max: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise GridError("grid needs at least 3 points")
        if pts[0] <= 0:
            raise GridError("radii must be positive")
        if not np.all(np.diff(pts) > 0):
            raise GridError("radii must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def uniform(cls, r_min: float, r_max: float, n: int) -> "RadialGrid":
        return cls(np.linspace(r_min, r_max, n), "uniform", r_min, r_max)

    @classmethod
    def geometric(cls, r_min: float, r_max: float, n: int) -> "RadialGrid":
        return cls(np.geomspace(r_min, r_max, n), "geometric", r_min, r_max)

    @classmethod
    def for_params(
        cls,
        params: ModelParams,
        n: int = DEFAULT_GRID_POINTS,
        r_min: float = DEFAULT_R_MIN,
        decay: float = ENVELOPE_DECAY,
    ) -> "RadialGrid":
        """Default grid: geometric spacing with a roundoff floor.

        r_max is adaptive (envelope below ``decay`` of its peak).  The local
        step is max(growth * r, floor) with floor scaled so that refining the
        point count refines the floor proportionally; this keeps the
        finite-difference residual second-order under grid doubling while
        bounding eps/h^2 roundoff near the origin.
        """
        r_max = envelope_r_max(params, decay)
        floor = _SPACING_FLOOR_AT_DEFAULT * (DEFAULT_GRID_POINTS / n)
        pts = _floored_geometric(r_min, r_max, n, floor)
        return cls(pts, "geometric", r_min, r_max)


def _floored_geometric(r_min: float, r_max: float, n: int, floor: float) -> np.ndarray:
    if (n - 1) * floor >= (r_max - r_min):
        return np.linspace(r_min, r_max, n)

    def uniform_steps(g: float) -> int:
        if g * r_min >= floor:
            return 0
        return min(n - 1, max(0, math.ceil((floor / g - r_min) / floor)))

    def end(g: float) -> float:
        n1 = uniform_steps(g)
        return (r_min + n1 * floor) * (1.0 + g) ** (n - 1 - n1)

    g_hi = (r_max / r_min) ** (1.0 / (n - 1)) - 1.0
    g_lo = 1e-16
    for _ in range(200):
        g_mid = 0.5 * (g_lo + g_hi)
        if end(g_mid) < r_max:
            g_lo = g_mid
        else:
            g_hi = g_mid
    g = 0.5 * (g_lo + g_hi)
    n1 = uniform_steps(g)
    head = r_min + floor * np.arange(n1 + 1)
    tail = head[-1] * (1.0 + g) ** np.arange(1, n - n1)
    pts = np.concatenate([head, tail])
    pts[-1] = r_max
    return pts


def _fd_derivatives(x: np.ndarray, f: np.ndarray):
    """Second-order centered first/second derivatives on a non-uniform grid.

    Endpoints use 3-point one-sided stencils; callers flag them separately.
    """
    f1 = np.empty_like(f)
    f2 = np.empty_like(f)

    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    denom = hm * hp * (hm + hp)
    f1[1:-1] = (hm * hm * f[2:] + (hp * hp - hm * hm) * f[1:-1] - hp * hp * f[:-2]) / denom
    f2[1:-1] = 2.0 * (hm * f[2:] - (hm + hp) * f[1:-1] + hp * f[:-2]) / denom

    h1, h2 = x[1] - x[0], x[2] - x[1]
    f1[0] = (
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0]
        + (h1 + h2) / (h1 * h2) * f[1]
        - h1 / (h2 * (h1 + h2)) * f[2]
    )
    f2[0] = 2.0 * (
        f[0] / (h1 * (h1 + h2)) - f[1] / (h1 * h2) + f[2] / (h2 * (h1 + h2))
    )

    g1, g2 = x[-1] - x[-2], x[-2] - x[-3]
    f1[-1] = (
        (2.0 * g1 + g2) / (g1 * (g1 + g2)) * f[-1]
        - (g1 + g2) / (g1 * g2) * f[-2]
        + g1 / (g2 * (g1 + g2)) * f[-3]
    )
    f2[-1] = 2.0 * (
        f[-1] / (g1 * (g1 + g2)) - f[-2] / (g1 * g2) + f[-3] / (g2 * (g1 + g2))
    )
    return f1, f2


def radial_operator_apply(params: ModelParams, energy: float, grid: RadialGrid,
                          r_samples: np.ndarray):
    """Apply (H - E) to sampled radial function values.

    Returns ``(residual, interior)`` where ``interior`` flags the points
    computed with centered stencils (endpoints use one-sided stencils and are
    flagged False).

    Raises if the Coulomb strength is absent, the grid has fewer than 32
    interior points, or the samples are not finite.
    """
    z = params.require_z()
    x = grid.points
    f = np.asarray(r_samples, dtype=float)
    if f.shape != x.shape:
        raise ValueError("r_samples must match the grid")
    if x.size - 2 < 32:
        raise GridError(
            f"grid too coarse: {x.size - 2} interior points, need at least 32"
        )
    if not np.all(np.isfinite(f)):
        raise ValueError("r_samples must be finite")

    omega = float(params.omega_l)
    k = float(params.k)
    m = params.m
    f1, f2 = _fd_derivatives(x, f)
    potential = (
        0.5 * omega * omega * x * x
        + k * x
        + omega * m
        - z / x
        + 0.5 * m * m / (x * x)
    )
    residual = -0.5 * f2 - 0.5 * f1 / x + (potential - float(energy)) * f
    interior = np.ones_like(x, dtype=bool)
    interior[0] = interior[-1] = False
    return residual, interior


def assemble_full_wavefunction(state: QesState, m: int, r, theta) -> complex:
    """Full wavefunction (2 pi)^(-1/2) e^{i m theta} R(r) at a point."""
    m = check_integer_m(m)
    r = float(r)
    if r <= 0:
        raise ValueError("r must be positive")
    radial = float(state.radial_values(r))
    return radial / math.sqrt(TWO_PI) * complex(math.cos(m * theta), math.sin(m * theta))


def _gauss_nodes(n: int):
    if n not in _GAUSS_NODES:
        x, w = np.polynomial.legendre.leggauss(n)
        _GAUSS_NODES[n] = (x, w)
    return _GAUSS_NODES[n]


def gauss_integrate(fn, a: float, b: float, n: int = 256) -> float:
    """Gauss-Legendre quadrature of fn over [a, b]."""
    x, w = _gauss_nodes(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return float(half * np.sum(w * fn(mid + half * x)))


def l2_norm_constant(params: ModelParams, poly) -> float:
    """Normalization constant for P(r) * envelope under the r dr measure.

    Uses Gauss-Legendre quadrature on [0, r_max]; deliberately a different
    quadrature from the grid-based Simpson rule used in verification, so the
    reported normalization error is a genuine two-method comparison.
    """
    coeffs = [float(c) for c in poly]
    r_max = envelope_r_max(params)

    def integrand(r):
        base = polyval(coeffs, r) * params.envelope(r)
        return base * base * r

    total = gauss_integrate(integrand, 0.0, r_max, n=256)
    if not total > 0:
        raise ValueError("polynomial factor gives zero norm")
    return 1.0 / math.sqrt(total)
