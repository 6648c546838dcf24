"""Spectral calculus of H_a = -Delta + a|x|^-2 on one spherical-harmonic sector.

On the sector of angular momentum l in R^n, writing u = r^{-(n-1)/2} phi(r) Y_l,
H_a acts on the reduced profile phi as the Bessel operator

    A_nu = -d^2/dr^2 + (nu^2 - 1/4) / r^2,   nu = sqrt((l + (n-2)/2)^2 + a),

and H_0 likewise with nu0 = l + (n-2)/2. Every function of H_a or H_0 is
therefore a diagonal multiplier in the Fourier-Bessel basis of the matching
order, see :mod:`isqlab.hankel`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ContractError, DomainError, RangeError, TruncationError
from .hankel import (
    DEFAULT_RADIUS,
    DEFAULT_SIZE,
    cross_matrix,
    dht_forward,
    dht_inverse,
    evaluate_series,
    radial_grid,
)


@dataclass(frozen=True)
class SectorSpec:
    """One angular sector (n, a, l) of H_a."""

    dimension: int
    coupling: float
    angular_momentum: int

    @property
    def free_order(self):
        return self.angular_momentum + (self.dimension - 2) / 2.0

    @property
    def order(self):
        return math.sqrt(max(self.free_order**2 + self.coupling, 0.0))

    @property
    def critical_coupling(self):
        return -((self.dimension - 2) ** 2) / 4.0

    @property
    def sigma(self):
        return 1.0 + math.sqrt(max((self.dimension - 2) ** 2 / 4.0 + self.coupling, 0.0))

    @property
    def is_critical(self):
        return self.coupling == self.critical_coupling

    @property
    def sobolev_bound(self):
        """min(n/2, 2, sigma), the admissible range |s| < bound."""
        return min(self.dimension / 2.0, 2.0, self.sigma)

    def with_coupling(self, a):
        return make_sector(self.dimension, a, self.angular_momentum)

    def free(self):
        """The same (n, l) sector of H_0."""
        return self.with_coupling(0.0)


def make_sector(n, a, l):
    """Build a :class:`SectorSpec`, validating n >= 3, l >= 0 and a >= -(n-2)^2/4."""
    if int(n) != n or n < 3:
        raise DomainError(f"dimension n={n!r} must be an integer >= 3")
    if int(l) != l or l < 0:
        raise DomainError(f"angular momentum l={l!r} must be a non-negative integer")
    a = float(a)
    if a < -((n - 2) ** 2) / 4.0:
        raise DomainError(f"supercritical coupling a={a!r} < -(n-2)^2/4 = {-((n - 2) ** 2) / 4.0!r}")
    return SectorSpec(int(n), a, int(l))


def sector_grid(sector, operator="adapted", radius=DEFAULT_RADIUS, size=DEFAULT_SIZE):
    """Grid diagonalising H_a (``operator='adapted'``) or H_0 (``'free'``) on the sector."""
    if operator == "adapted":
        return radial_grid(sector.order, radius, size)
    if operator == "free":
        return radial_grid(sector.free_order, radius, size)
    raise ValueError(f"unknown operator {operator!r}")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Normalised samples of a reduced profile phi on a :class:`RadialGrid`."""

    grid: object
    values: np.ndarray
    sector: SectorSpec

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.size,):
            raise ContractError(f"values have shape {v.shape}, grid size is {self.grid.size}")
        if not np.all(np.isfinite(v)):
            raise ContractError("profile values contain NaN or Inf")
        v = np.array(v, dtype=complex if np.iscomplexobj(v) else float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, sector, func, operator="adapted", radius=DEFAULT_RADIUS, size=DEFAULT_SIZE):
        """Sample a reduced profile ``func(r)`` on the sector's grid."""
        grid = sector_grid(sector, operator, radius, size)
        return cls(grid, grid.sample(func), sector)

    @classmethod
    def from_physical(cls, sector, func, operator="adapted", radius=DEFAULT_RADIUS, size=DEFAULT_SIZE):
        """Sample the radial factor u(r) of the physical field u(r) Y_l."""
        h = (sector.dimension - 1) / 2.0
        return cls.from_function(sector, lambda r: r**h * func(r), operator, radius, size)

    @property
    def coefficients(self):
        return dht_forward(self.grid, self.values)

    def replace(self, values):
        return RadialProfile(self.grid, values, self.sector)

    def norm(self):
        """L2 norm, equal to ||u||_{L2(R^n)} for u = r^{-(n-1)/2} phi Y_l."""
        return float(np.linalg.norm(self.values))

    def reduced(self, r=None):
        """phi at the grid nodes, or its Fourier-Bessel interpolant at ``r``."""
        if r is None:
            return self.grid.values(self.values)
        return evaluate_series(self.grid, self.coefficients, r)

    def physical(self, r=None):
        """Radial factor u(r) = r^{-(n-1)/2} phi(r)."""
        rr = self.grid.nodes if r is None else np.asarray(r, dtype=float)
        return self.reduced(r) * rr ** (-(self.sector.dimension - 1) / 2.0)

    def __add__(self, other):
        _same_grid(self, other)
        return self.replace(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.replace(self.values - other.values)

    def __mul__(self, scalar):
        return self.replace(self.values * scalar)

    __rmul__ = __mul__

    def conj(self):
        return self.replace(np.conj(self.values))


def _same_grid(p, q):
    if p.grid is not q.grid or p.sector != q.sector:
        raise ContractError("profiles live on different grids or sectors")


class Multiplier:
    """A function of the spectral variable rho >= 0 (the spectrum of |D_a|).

    Use the module-level constructors :func:`schrodinger`, :func:`half_wave`,
    :func:`cos_wave`, :func:`sinc_wave`, :func:`frac_power`,
    :func:`bessel_weight` and :func:`resolvent`.
    """

    def __init__(self, name, func, unimodular=False, **params):
        self.name = name
        self.params = params
        self.unimodular = unimodular
        self._func = func

    def __call__(self, rho):
        return self._func(np.asarray(rho, dtype=float))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.name}({args})"


def schrodinger(t):
    """e^{-i t rho^2}, i.e. e^{-itH}."""
    return Multiplier("schrodinger", lambda rho: np.exp(-1j * t * rho * rho), True, t=t)


def half_wave(sign, t):
    """e^{-/+ i t rho}; ``sign=+1`` gives e^{-it|D|}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return Multiplier("half_wave", lambda rho: np.exp(-1j * sign * t * rho), True, sign=sign, t=t)


def cos_wave(t):
    return Multiplier("cos_wave", lambda rho: np.cos(t * rho), t=t)


def _sinc(t, rho):
    out = np.empty_like(rho)
    small = rho == 0.0
    out[small] = t
    out[~small] = np.sin(t * rho[~small]) / rho[~small]
    return out


def sinc_wave(t):
    """sin(t rho) / rho, continued by t at rho = 0."""
    return Multiplier("sinc_wave", lambda rho: _sinc(t, rho), t=t)


def frac_power(s):
    """rho^s. Bessel-zero nodes exclude rho = 0, so negative s stays finite."""
    return Multiplier("frac_power", lambda rho: rho**s, s=s)


def bessel_weight(s):
    """(1 + rho^2)^{s/2}."""
    return Multiplier("bessel_weight", lambda rho: (1.0 + rho * rho) ** (s / 2.0), s=s)


def resolvent(z):
    """(rho^2 - z)^{-1}; z must avoid [0, inf)."""
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise DomainError(f"resolvent point z={z!r} lies on the spectrum [0, inf)")
    return Multiplier("resolvent", lambda rho: 1.0 / (rho * rho - z), z=z)


def spectral_tail_radius(profile, s=0.0, tol=1e-4):
    """Smallest rho beyond which the rho^s-weighted coefficient tail is <= tol (relative)."""
    rho = profile.grid.spectral_nodes
    w = np.abs(profile.coefficients * rho**s) ** 2
    total = w.sum()
    if total == 0.0:
        return 0.0
    tail = np.cumsum(w[::-1])[::-1]
    idx = np.flatnonzero(tail > (tol**2) * total)
    return float(rho[idx[-1]]) if idx.size else float(rho[0])


def check_decay(profile, fraction=0.05, tol=1e-10):
    """Raise :class:`TruncationError` unless |phi| is below ``tol`` near r = R."""
    g = profile.grid
    near = g.nodes > (1.0 - fraction) * g.radius
    scale = np.abs(profile.values).max()
    edge = np.abs(profile.values[near]).max() if near.any() else 0.0
    if scale > 0.0 and edge > tol * scale:
        raise TruncationError(
            f"profile does not decay at r = R: edge amplitude {edge:.3e} relative {edge / scale:.3e}",
            residual=edge / scale,
        )
    return edge / scale if scale > 0.0 else 0.0


def cross_expand(profile, target_order, *, tol=1e-7, decay_tol=1e-10, return_residual=False):
    """Re-expand a profile in the Fourier-Bessel basis of ``target_order``.

    The source series is summed exactly at the target nodes. With ``tol`` set,
    the roundtrip back to the source grid is certified: a relative residual
    above ``tol`` raises :class:`AccuracyError`.

    Raises
    ------
    TruncationError
        If the profile does not decay at the truncation radius.
    AccuracyError
        If the roundtrip residual exceeds ``tol``.
    """
    src = profile.grid
    dst = radial_grid(target_order, src.radius, src.size)
    if dst is src:
        return (profile, 0.0) if return_residual else profile
    if decay_tol is not None:
        check_decay(profile, tol=decay_tol)
    out = RadialProfile(dst, cross_matrix(src, dst) @ profile.values, profile.sector)
    residual = None
    if tol is not None or return_residual:
        back = cross_matrix(dst, src) @ out.values
        nrm = np.linalg.norm(profile.values)
        residual = float(np.linalg.norm(back - profile.values) / nrm) if nrm > 0 else 0.0
        if tol is not None and residual > tol:
            raise AccuracyError(
                f"re-expansion from order {src.order:g} to {dst.order:g} has roundtrip residual {residual:.3e} > {tol:.1e}",
                residual=residual,
            )
    return (out, residual) if return_residual else out


def _target_order(sector, operator):
    if operator == "adapted":
        return sector.order
    if operator == "free":
        return sector.free_order
    raise ValueError(f"unknown operator {operator!r}")


def on_operator_grid(sector, profile, operator, tol=1e-7):
    """Return ``profile`` on the grid diagonalising the requested operator."""
    if profile.sector != sector:
        raise ContractError(f"profile belongs to {profile.sector}, not {sector}")
    order = _target_order(sector, operator)
    if profile.grid.order == order:
        return profile
    return cross_expand(profile, order, tol=tol)


def apply_multiplier(sector, multiplier, profile, operator="adapted", *, tol=1e-7):
    """Apply m(|D_a|) (or m(|D|) with ``operator='free'``) to a sector profile.

    The result lives on the grid of the chosen operator; a profile on the
    other grid is re-expanded first (certified to ``tol``).
    """
    p = on_operator_grid(sector, profile, operator, tol=tol)
    g = p.grid
    c = dht_forward(g, p.values) * multiplier(g.spectral_nodes)
    return RadialProfile(g, dht_inverse(g, c), sector)


def spectral_apply(profile, weights):
    """Multiply Fourier-Bessel coefficients by ``weights`` on the profile's own grid."""
    g = profile.grid
    return profile.replace(dht_inverse(g, dht_forward(g, profile.values) * weights))


_FLAVORS = {
    "adapted": ("adapted", False),
    "free": ("free", False),
    "inhomogeneous_adapted": ("adapted", True),
    "inhomogeneous_free": ("free", True),
}


def sobolev_weight(rho, s, inhomogeneous=False):
    if inhomogeneous:
        return (1.0 + rho * rho) ** (s / 2.0)
    return rho**s


def sobolev_norm(profile, s, flavor="adapted", *, tol=1e-7, return_residual=False):
    """Homogeneous or inhomogeneous Sobolev norm of the physical field.

    ``adapted`` is ||(H_a)^{s/2} u||, ``free`` is ||u||_{H^s-dot}; the
    ``inhomogeneous_*`` flavours use (1 + rho^2)^{s/2}. When the profile lives
    on the other grid it is re-expanded, and the roundtrip residual (returned
    with ``return_residual=True``) must not exceed ``tol``.
    """
    if flavor not in _FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if abs(s) > 2.0:
        raise RangeError(f"Sobolev index s={s!r} outside [-2, 2]")
    operator, inhom = _FLAVORS[flavor]
    residual = 0.0
    if s == 0:
        value = profile.norm()
    else:
        order = _target_order(profile.sector, operator)
        p = profile
        if profile.grid.order != order:
            p, residual = cross_expand(profile, order, tol=tol, return_residual=True)
        rho = p.grid.spectral_nodes
        value = float(np.linalg.norm(p.coefficients * sobolev_weight(rho, s, inhom)))
    return (value, residual) if return_residual else value
