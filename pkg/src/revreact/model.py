"""Domain description, equilibrium algebra and the entropy ratio function.

The reversible reaction A + B <-> C conserves the spatial averages
M1 = avg(a + c) and M2 = avg(b + c).  The unique nonnegative homogeneous
equilibrium compatible with (M1, M2) solves

    c_inf**2 - (1 + M1 + M2) * c_inf + M1 * M2 = 0

with the smaller root, and a_inf = M1 - c_inf, b_inf = M2 - c_inf, so that
a_inf * b_inf = c_inf.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import InvalidArgument, InvalidField, InvalidMass

__all__ = [
    "DomainSpec",
    "ModelParams",
    "EquilibriumState",
    "conserved_masses",
    "equilibrium_state",
    "gamma_ratio",
]

#: relative width |sqrt(x)-sqrt(y)| / sqrt(y) below which the Taylor branch
#: of gamma_ratio is used to avoid 0/0 cancellation
GAMMA_TAYLOR_THRESHOLD = 1e-7


@dataclass(frozen=True)
class DomainSpec:
    """Axis-aligned box domain in dimension N <= 3.

    ``poincare_constant`` is the analytic Neumann Poincare-Wirtinger
    constant (L_max / pi)**2 of the box for the squared L2 deviation norm.
    """

    dimension: int
    lengths: tuple[float, ...]
    volume: float
    poincare_constant: float

    @classmethod
    def box(cls, lengths) -> "DomainSpec":
        lengths = tuple(float(x) for x in np.atleast_1d(lengths))
        n = len(lengths)
        if n not in (1, 2, 3):
            raise InvalidArgument(f"dimension must be 1, 2 or 3, got {n}")
        if any(not math.isfinite(x) or x <= 0.0 for x in lengths):
            raise InvalidArgument(f"axis lengths must be positive, got {lengths}")
        volume = math.prod(lengths)
        p = (max(lengths) / math.pi) ** 2
        return cls(dimension=n, lengths=lengths, volume=volume, poincare_constant=p)


@dataclass(frozen=True)
class ModelParams:
    """Diffusivities of the three species.

    d_a must be positive; at most one of d_b, d_c may vanish (the two
    degenerate regimes), all nonnegative.
    """

    d_a: float
    d_b: float
    d_c: float

    def __post_init__(self):
        for name, d in (("d_a", self.d_a), ("d_b", self.d_b), ("d_c", self.d_c)):
            if not math.isfinite(d) or d < 0.0:
                raise InvalidArgument(f"{name} must be finite and nonnegative, got {d}")
        if self.d_a <= 0.0:
            raise InvalidArgument("d_a must be strictly positive")
        if self.d_b == 0.0 and self.d_c == 0.0:
            raise InvalidArgument("at most one of d_b, d_c may vanish")

    @property
    def mode(self) -> str:
        """Degeneracy mode: 'db0', 'dc0' or 'full'."""
        if self.d_b == 0.0:
            return "db0"
        if self.d_c == 0.0:
            return "dc0"
        return "full"

    def diffusivities(self) -> tuple[float, float, float]:
        return (self.d_a, self.d_b, self.d_c)


@dataclass(frozen=True)
class EquilibriumState:
    """Homogeneous equilibrium (a_inf, b_inf, c_inf) with its conserved masses."""

    a_inf: float
    b_inf: float
    c_inf: float
    M1: float
    M2: float


def conserved_masses(fields, grid, domain) -> tuple[float, float]:
    """Conserved average densities M1 = avg(a+c), M2 = avg(b+c).

    Computed by cell-volume-weighted summation over the structured grid.
    Raises InvalidField on non-finite field data.
    """
    for name, u in (("a", fields.a), ("b", fields.b), ("c", fields.c)):
        if not np.all(np.isfinite(u)):
            raise InvalidField(f"field {name} contains non-finite entries")
    m1 = grid.cell_volume * float(np.sum(fields.a + fields.c)) / domain.volume
    m2 = grid.cell_volume * float(np.sum(fields.b + fields.c)) / domain.volume
    return m1, m2


def equilibrium_state(M1: float, M2: float) -> EquilibriumState:
    """Homogeneous equilibrium for given conserved masses.

    c_inf is the smaller root of c**2 - (1+M1+M2)c + M1*M2, evaluated in the
    cancellation-free form 2*M1*M2 / (S + sqrt(S**2 - 4*M1*M2)); the
    discriminant is expanded as 1 + 2(M1+M2) + (M1-M2)**2 which is positive
    for all admissible masses.
    """
    if not (math.isfinite(M1) and math.isfinite(M2)) or M1 < 0.0 or M2 < 0.0:
        raise InvalidMass(f"masses must be finite and nonnegative, got ({M1}, {M2})")
    s = 1.0 + M1 + M2
    disc = 1.0 + 2.0 * (M1 + M2) + (M1 - M2) ** 2
    c_inf = 2.0 * M1 * M2 / (s + math.sqrt(disc))
    a_inf = M1 - c_inf
    b_inf = M2 - c_inf
    return EquilibriumState(a_inf=a_inf, b_inf=b_inf, c_inf=c_inf, M1=M1, M2=M2)


def riccati_roots(m1, m2):
    """Roots r1 <= r2 of c**2 - (1+m1+m2)c + m1*m2 (vectorized).

    r1 is the pointwise reaction equilibrium; the flow dc/dt = (c-r1)(c-r2)
    relaxes c toward r1.  Always real: the discriminant equals
    1 + 2(m1+m2) + (m1-m2)**2 > 0.
    """
    s = 1.0 + m1 + m2
    sq = np.sqrt(1.0 + 2.0 * (m1 + m2) + (m1 - m2) ** 2)
    r2 = 0.5 * (s + sq)
    r1 = m1 * m2 / r2
    return r1, r2, sq


def gamma_ratio(x, y):
    """Entropy ratio (x*ln(x/y) - x + y) / (sqrt(x) - sqrt(y))**2.

    Equals 2 on the diagonal x == y and 1 in the limit x -> 0.  Near the
    diagonal (relative sqrt-gap below GAMMA_TAYLOR_THRESHOLD) the second
    order expansion 2 + (2/3)e - (1/6)e**2 in e = (sqrt(x)-sqrt(y))/sqrt(y)
    is used to avoid 0/0 cancellation.  Accepts scalars or arrays.
    """
    scalar = np.isscalar(x) and np.isscalar(y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y)) or np.any(y <= 0.0):
        raise InvalidArgument("gamma_ratio requires y > 0")
    if np.any(~np.isfinite(x)) or np.any(x < 0.0):
        raise InvalidArgument("gamma_ratio requires x >= 0")
    x, y = np.broadcast_arrays(x, y)
    sx = np.sqrt(x)
    sy = np.sqrt(y)
    e = (sx - sy) / sy
    out = np.empty_like(e)

    near = np.abs(e) < GAMMA_TAYLOR_THRESHOLD
    en = e[near]
    out[near] = 2.0 + (2.0 / 3.0) * en - (1.0 / 6.0) * en * en

    far = ~near
    if np.any(far):
        xf = x[far]
        yf = y[far]
        d = xf - yf
        with np.errstate(divide="ignore", invalid="ignore"):
            num = xf * np.log1p(d / yf) - d
        num = np.where(xf == 0.0, yf, num)  # continuous limit x -> 0
        den = (sx[far] - sy[far]) ** 2
        out[far] = num / den

    return float(out) if scalar else out
