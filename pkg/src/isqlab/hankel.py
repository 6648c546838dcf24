"""Unitary Fourier-Bessel (Dirichlet-at-R) discrete Hankel transform.

A reduced radial profile phi on [0, R] is represented by its *normalised
samples* ``sqrt(w_k) * phi(r_k)`` at the nodes ``r_k = j_k R / j_{N+1}``, where
``j_k`` are the positive zeros of J_nu. With this scaling the l2 norm of the
sample vector is the L2(0, R; dr) norm of phi, and the transform matrix

    T[m, k] = 2 J_nu(j_m j_k / j_{N+1}) / (j_{N+1} |J_{nu+1}(j_m)| |J_{nu+1}(j_k)|)

maps samples to Fourier-Bessel coefficients

    c_m = int_0^R phi(r) psi_m(r) dr,  psi_m(r) = sqrt(2 r) J_nu(rho_m r) / (R |J_{nu+1}(j_m)|),

with rho_m = j_m / R. T is symmetric and orthogonal up to rounding, and
diagonalises the Bessel operator -d^2/dr^2 + (nu^2 - 1/4)/r^2 with Dirichlet
condition at R: its eigenvalues are rho_m^2.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .bessel import bessel_zeros, _check_order
from .errors import ContractError, RangeError

DEFAULT_RADIUS = 40.0
DEFAULT_SIZE = 1024
# High orders lose orthogonality of the raw quasi-discrete kernel (about 5e-9
# at nu = 50, N = 1024); beyond this defect the polar factor is used instead.
_POLAR_THRESHOLD = 1e-10


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Sampling nodes and transform for one Bessel order on [0, R].

    Attributes
    ----------
    order : float
        Bessel order nu.
    radius : float
        Truncation radius R.
    size : int
        Number of nodes N.
    zeros : ndarray, shape (N + 1,)
        First N + 1 positive zeros of J_nu.
    nodes : ndarray
        Radial nodes r_k in (0, R).
    spectral_nodes : ndarray
        rho_k = j_k / R.
    weights : ndarray
        Quadrature weights w_k with ``sum(w * |phi(r)|**2) ~ ||phi||^2``.
    transform_matrix : ndarray, shape (N, N)
        The orthogonal matrix T described in the module docstring.
    """

    order: float
    radius: float
    size: int
    zeros: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    spectral_nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    transform_matrix: np.ndarray = field(repr=False)

    @property
    def bandwidth(self):
        """Spectral cutoff P = j_{N+1} / R; nodes are r_k = j_k / P."""
        return self.zeros[-1] / self.radius

    @property
    def key(self):
        return (self.order, self.radius, self.size)

    def sample(self, func):
        """Normalised samples ``sqrt(w_k) * func(r_k)`` of a reduced profile."""
        return np.sqrt(self.weights) * np.asarray(func(self.nodes))

    def values(self, samples):
        """Undo the normalisation: reduced-profile values phi(r_k)."""
        return np.asarray(samples) / np.sqrt(self.weights)

    def basis(self, k, r=None):
        """Fourier-Bessel basis function psi_k (k = 0 .. N-1) at radii ``r``.

        With ``r=None`` returns its normalised samples, i.e. column k of T.
        """
        if r is None:
            return self.transform_matrix[:, k].copy()
        r = np.asarray(r, dtype=float)
        j1 = abs(special.jv(self.order + 1.0, self.zeros[k]))
        return np.sqrt(2.0 * r) * special.jv(self.order, self.spectral_nodes[k] * r) / (self.radius * j1)

    def orthogonality_defect(self):
        """max |T T^T - I|."""
        t = self.transform_matrix
        return float(np.abs(t @ t.T - np.eye(self.size)).max())


@lru_cache(maxsize=12)
def _build(order, radius, size):
    j = bessel_zeros(order, size + 1)
    s = j[-1]
    jk = j[:-1]
    j1 = np.abs(special.jv(order + 1.0, jk))
    p = s / radius
    nodes = jk / p
    t = 2.0 * special.jv(order, np.outer(jk, jk) / s) / (s * np.outer(j1, j1))
    weights = 2.0 / (nodes * p * p * j1 * j1)
    if np.abs(t @ t.T - np.eye(size)).max() > _POLAR_THRESHOLD:
        # nearest orthogonal matrix; T is symmetric so this is Q sign(L) Q^T
        lam, q = np.linalg.eigh(t)
        t = (q * np.sign(lam)) @ q.T
        t = 0.5 * (t + t.T)
    return RadialGrid(
        order=order,
        radius=radius,
        size=size,
        zeros=_readonly(j),
        nodes=_readonly(nodes),
        spectral_nodes=_readonly(jk / radius),
        weights=_readonly(weights),
        transform_matrix=_readonly(t),
    )


def radial_grid(order, radius=DEFAULT_RADIUS, size=DEFAULT_SIZE):
    """Return the (cached, immutable) :class:`RadialGrid` for these parameters."""
    order = _check_order(order)
    radius = float(radius)
    size = int(size)
    if not radius > 0.0:
        raise RangeError(f"radius={radius!r} must be positive")
    if size < 8:
        raise RangeError(f"size={size} must be at least 8")
    return _build(order, radius, size)


def _check_length(grid, vec, what):
    vec = np.asarray(vec)
    if vec.shape != (grid.size,):
        raise ContractError(f"{what} has shape {vec.shape}, grid expects ({grid.size},)")
    return vec


def dht_forward(grid, samples):
    """Normalised samples -> Fourier-Bessel coefficients."""
    return grid.transform_matrix @ _check_length(grid, samples, "samples")


def dht_inverse(grid, coefficients):
    """Fourier-Bessel coefficients -> normalised samples."""
    return grid.transform_matrix.T @ _check_length(grid, coefficients, "coefficients")


def evaluate_series(grid, coefficients, r):
    """Evaluate sum_m c_m psi_m(r) at arbitrary radii ``r`` in [0, R]."""
    c = _check_length(grid, coefficients, "coefficients")
    r = np.asarray(r, dtype=float)
    j1 = np.abs(special.jv(grid.order + 1.0, grid.zeros[:-1]))
    kern = np.sqrt(2.0 * r.ravel())[:, None] * special.jv(
        grid.order, np.outer(r.ravel(), grid.spectral_nodes)
    )
    out = kern @ (c / (grid.radius * j1))
    return out.reshape(r.shape)


def hankel_at(grid, samples, rho):
    """Continuous Hankel transform int sqrt(r rho) J_nu(r rho) phi(r) dr at ``rho``.

    Evaluated with the transform's own quadrature, which is exact for
    band-limited profiles.
    """
    u = _check_length(grid, samples, "samples")
    rho = np.asarray(rho, dtype=float)
    arg = np.outer(rho.ravel(), grid.nodes)
    kern = np.sqrt(arg) * special.jv(grid.order, arg) * np.sqrt(grid.weights)[None, :]
    return (kern @ u).reshape(rho.shape)


def coefficient_scale(grid):
    """Factors s_m with (Hankel transform)(rho_m) = s_m * c_m."""
    j1 = np.abs(special.jv(grid.order + 1.0, grid.zeros[:-1]))
    return grid.radius * j1 * np.sqrt(grid.spectral_nodes / 2.0)


@lru_cache(maxsize=6)
def _cross_matrix(src_key, dst_key):
    src = _build(*src_key)
    dst = _build(*dst_key)
    j1 = np.abs(special.jv(src.order + 1.0, src.zeros[:-1]))
    e = np.sqrt(dst.weights * 2.0 * dst.nodes)[:, None] * special.jv(
        src.order, np.outer(dst.nodes, src.spectral_nodes)
    ) / (src.radius * j1)[None, :]
    m = e @ src.transform_matrix
    m.flags.writeable = False
    return m


def cross_matrix(src, dst):
    """Matrix taking normalised samples on ``src`` to those on ``dst``.

    The source Fourier-Bessel series is summed exactly at the target nodes.
    """
    if src.radius != dst.radius:
        raise ContractError("cross expansion needs grids with the same radius")
    if src.key == dst.key:
        return np.eye(src.size)
    return _cross_matrix(src.key, dst.key)


def diagonalisation_defect(grid, phi, d2phi):
    """Relative max gap between T^T rho^2 T phi and the Bessel operator applied to phi.

    ``phi`` and ``d2phi`` are the profile and its second derivative; the
    profile should be band-limited and vanish near both ends of [0, R].
    """
    r = grid.nodes
    exact = -d2phi(r) + (grid.order**2 - 0.25) / (r * r) * phi(r)
    spectral = grid.values(dht_inverse(grid, grid.spectral_nodes**2 * dht_forward(grid, grid.sample(phi))))
    return float(np.abs(spectral - exact).max() / np.abs(exact).max())
