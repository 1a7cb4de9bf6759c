"""Closed-form limiting spectral laws and the predicted fluctuation covariance.

Everything here is analytic: the Marchenko-Pastur and semicircle densities,
their Stieltjes transforms, and the stationary covariance kernel that the
scaled fluctuations of the Cauchy-smoothed density are expected to follow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

LAW_KINDS = ("marchenko_pastur", "semicircle")


@dataclass(frozen=True)
class LimitingLaw:
    """A limiting eigenvalue law: Marchenko-Pastur (c, u) or semicircle (v)."""

    kind: str
    c: float | None = None
    u: float | None = None
    v: float | None = None

    def __post_init__(self):
        if self.kind == "marchenko_pastur":
            if self.c is None or self.u is None or self.c <= 0 or self.u <= 0:
                raise ValueError("marchenko_pastur requires c > 0 and u > 0")
        elif self.kind == "semicircle":
            if self.v is None or self.v <= 0:
                raise ValueError("semicircle requires v > 0")
        else:
            raise ValueError(f"kind must be one of {LAW_KINDS}, got {self.kind!r}")


def marchenko_pastur(c: float, u: float = 1.0) -> LimitingLaw:
    return LimitingLaw("marchenko_pastur", c=float(c), u=float(u))


def semicircle(v: float = 1.0) -> LimitingLaw:
    return LimitingLaw("semicircle", v=float(v))


def mp_density(lam, c: float, u: float):
    """Absolutely continuous Marchenko-Pastur density at ``lam``.

    Supported on (u^2 (1-sqrt(c))^2, u^2 (1+sqrt(c))^2) with total a.c. mass
    min(1, c); the point mass (1-c) at zero for c < 1 is reported by
    support_and_mass, not here. Out-of-support points return 0.
    """
    if c <= 0 or u <= 0:
        raise ValueError("mp_density requires c > 0 and u > 0")
    lam = np.asarray(lam, dtype=float)
    u2 = u * u
    discriminant = 4.0 * c * u2 * u2 - (lam - u2 * (1.0 + c)) ** 2
    inside = (discriminant > 0.0) & (lam > 0.0)
    out = np.zeros_like(lam)
    denom = 2.0 * math.pi * u2 * np.where(inside, lam, 1.0)
    out = np.where(inside, np.sqrt(np.where(inside, discriminant, 0.0)) / denom, 0.0)
    return out if out.ndim else float(out)


def semicircle_density(lam, v: float):
    """Semicircle density sqrt(4 v^2 - lam^2) / (2 pi v^2) on [-2v, 2v]."""
    if v <= 0:
        raise ValueError("semicircle_density requires v > 0")
    lam = np.asarray(lam, dtype=float)
    discriminant = 4.0 * v * v - lam * lam
    inside = discriminant > 0.0
    out = np.where(inside, np.sqrt(np.where(inside, discriminant, 0.0)) / (2.0 * math.pi * v * v), 0.0)
    return out if out.ndim else float(out)


def density(law: LimitingLaw, lam):
    if law.kind == "marchenko_pastur":
        return mp_density(lam, law.c, law.u)
    return semicircle_density(lam, law.v)


def support_and_mass(law: LimitingLaw):
    """(lower, upper, ac_mass, atom_at_zero) of the law."""
    if law.kind == "marchenko_pastur":
        c, u2 = law.c, law.u * law.u
        sqrt_c = math.sqrt(c)
        lower = u2 * (1.0 - sqrt_c) ** 2
        upper = u2 * (1.0 + sqrt_c) ** 2
        return lower, upper, min(1.0, c), max(0.0, 1.0 - c)
    return -2.0 * law.v, 2.0 * law.v, 1.0, 0.0


def bulk_center(law: LimitingLaw) -> float:
    """Midpoint of the a.c. support: u^2 (1+c) for MP, 0 for the semicircle."""
    if law.kind == "marchenko_pastur":
        return law.u * law.u * (1.0 + law.c)
    return 0.0


def stieltjes(law: LimitingLaw, z: complex) -> complex:
    """Stieltjes transform g(z) = integral of (lam - z)^-1 d(sigma), Im z > 0.

    Includes the atom at zero for Marchenko-Pastur with c < 1. The branch is
    fixed by the Herglotz condition Im g(z) > 0 on the upper half plane, never
    by a square-root cut convention.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("stieltjes requires Im z > 0")
    if law.kind == "semicircle":
        v2 = law.v * law.v
        w = cmath.sqrt(z * z - 4.0 * v2)
        if w.imag < 0:
            w = -w
        return (-z + w) / (2.0 * v2)
    # Marchenko-Pastur: g solves  u^2 z g^2 + (z + u^2 (1 - c)) g + 1 = 0.
    u2 = law.u * law.u
    a = u2 * z
    b = z + u2 * (1.0 - law.c)
    w = cmath.sqrt(b * b - 4.0 * a)
    # stable quadratic roots: avoid cancellation in -b +/- w
    if (b.conjugate() * w).real >= 0.0:
        q = -0.5 * (b + w)
    else:
        q = -0.5 * (b - w)
    roots = (q / a, 1.0 / q)
    return max(roots, key=lambda g: g.imag)


def covariance_kernel(tau1: float, tau2: float) -> float:
    """Predicted covariance of the scaled smoothed-density fluctuations.

    Stationary in tau1 - tau2: (4 - d^2) / (4 + d^2)^2 with d = tau1 - tau2.
    """
    d2 = (tau1 - tau2) ** 2
    return (4.0 - d2) / (4.0 + d2) ** 2


def kernel_matrix(offsets) -> np.ndarray:
    """Kernel evaluated on all pairs of a grid of offsets."""
    t = np.asarray(offsets, dtype=float)
    d2 = (t[:, None] - t[None, :]) ** 2
    return (4.0 - d2) / (4.0 + d2) ** 2


def kernel_asymptote_check(delta: float) -> float:
    """C(0, delta) * delta^2 + 1; tends to 0 as |delta| grows.

    Measures how fast the kernel approaches its far-field form -1/delta^2,
    the large-separation two-point behaviour shared with the orthogonal
    symmetry class. Meaningful for delta != 0.
    """
    return covariance_kernel(0.0, delta) * delta * delta + 1.0
