"""Hardy, Sobolev and norm-equivalence ratios, Kato smoothing norms, weak L^p.

Integrals with the singular weight r^-2 are evaluated on the Fourier-Bessel
interpolant of a profile: the matrix Q[m, k] = int_0^R psi_m psi_k / r^2 dr is
built once per grid by panel Gauss-Legendre quadrature between consecutive
nodes, with a Gauss-Jacobi panel at the origin that absorbs r^{2 nu - 1}.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DomainError, HorizonError, RangeError
from .families import default_family
from .hankel import radial_grid
from .scattering import horizon, sphere_area
from .sector import RadialProfile, check_decay, make_sector, on_operator_grid

_PANEL_POINTS = 10


# ------------------------------------------------------------- quadrature


@lru_cache(maxsize=4)
def _inverse_square_matrix(key, points=_PANEL_POINTS, chunk=256):
    order, radius, size = key
    g = radial_grid(order, radius, size)
    if order == 0.0:
        raise AccuracyError("int |phi|^2 / r^2 diverges at r = 0 for Bessel order 0", residual=math.inf)
    j1 = np.abs(special.jv(order + 1.0, g.zeros[:-1]))
    scale = 1.0 / (radius * j1)
    x, w = special.roots_legendre(points)
    # origin panel: psi_m psi_k / r^2 = r^{2 nu - 1} * smooth
    xj, wj = special.roots_jacobi(points, 0.0, 2.0 * order - 1.0)
    r1 = g.nodes[0]
    r0 = 0.5 * r1 * (xj + 1.0)
    w0 = wj * (0.5 * r1) ** (2.0 * order)

    def smooth_part(r):
        # psi(r) r^{-(nu + 1/2)}, finite at 0
        arg = np.outer(r, g.spectral_nodes)
        return np.sqrt(2.0) * special.jv(order, arg) * r[:, None] ** (-order) * scale

    q = np.zeros((size, size))
    e = smooth_part(r0)
    q += (e * w0[:, None]).T @ e
    edges = np.append(g.nodes, radius)
    for start in range(0, size, chunk):
        a = edges[start : start + chunk]
        b = edges[start + 1 : start + chunk + 1]
        a = a[: b.size]
        half = 0.5 * (b - a)
        r = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
        wr = (half[:, None] * w[None, :]).ravel()
        r = r.ravel()
        psi = np.sqrt(2.0 * r)[:, None] * special.jv(order, np.outer(r, g.spectral_nodes)) * scale
        q += (psi * (wr / (r * r))[:, None]).T @ psi
    q = 0.5 * (q + q.T)
    q.flags.writeable = False
    return q


def inverse_square_matrix(grid):
    """Q with c^H Q c = int_0^R |phi|^2 / r^2 dr for phi = sum c_m psi_m."""
    return _inverse_square_matrix(grid.key)


def inverse_square_integral(profile):
    """int_0^R |phi(r)|^2 / r^2 dr, i.e. || |x|^-1 u ||^2 for the physical field."""
    c = profile.coefficients
    return float(np.real(np.vdot(c, inverse_square_matrix(profile.grid) @ c)))


def gradient_form(profile):
    """||grad u||^2 = sum rho^2 |c|^2 on the free grid of the profile's sector."""
    g = profile.grid
    return float(np.sum(g.spectral_nodes**2 * np.abs(profile.coefficients) ** 2))


# ------------------------------------------------------------------ Hardy


def hardy_constant(n):
    return (n - 2) ** 2 / 4.0


def _hardy(n, profile, const, tol):
    sec = profile.sector
    if sec.dimension != n:
        raise DomainError(f"profile lives in dimension {sec.dimension}, not {n}")
    free = sec.free()
    p = profile if profile.sector == free else RadialProfile(profile.grid, profile.values, free)
    p = on_operator_grid(free, p, "free", tol=tol)
    check_decay(p, tol=1e-8)
    return const * inverse_square_integral(p) / gradient_form(p)


def hardy_ratio(n, profile, tol=1e-7):
    """((n-2)^2/4) int |u|^2/|x|^2 / int |grad u|^2, at most 1 by Hardy's inequality.

    The profile is moved to the free grid of its sector (certified to ``tol``).
    """
    return _hardy(n, profile, hardy_constant(n), tol)


def hardy_perp_ratio(n, l, profile, tol=1e-7):
    """Same ratio with the improved constant n^2/4, valid off the radial sector."""
    if l < 1:
        raise DomainError("the n^2/4 constant holds only on the complement of radial functions (l >= 1)")
    if profile.sector.angular_momentum != l:
        raise DomainError(f"profile has l={profile.sector.angular_momentum}, expected {l}")
    return _hardy(n, profile, n * n / 4.0, tol)


def sphere_eigenvalue(n, l):
    """Eigenvalue l(l + n - 2) of the Laplacian on S^{n-1}."""
    return l * (l + n - 2)


def hardy_ratio_analytic(n, phi, dphi, support, l=0):
    """Hardy ratio of an analytic reduced profile, by adaptive quadrature in t = ln r.

    Used for sharpness families whose support spans many e-folds.
    """
    nu0 = l + (n - 2) / 2.0
    t0, t1 = math.log(support[0]), math.log(support[1])

    def q(f):
        val, _ = integrate.quad(f, t0, t1, limit=500, epsabs=0.0, epsrel=1e-12)
        return val

    m = q(lambda t: float(phi(math.exp(t))) ** 2 / math.exp(t))
    d = q(lambda t: float(dphi(math.exp(t))) ** 2 * math.exp(t))
    grad = d + (nu0 * nu0 - 0.25) * m
    return hardy_constant(n) * m / grad


# -------------------------------------------------------------- Sobolev


def sobolev_constant(n):
    """S_n = n(n-2)|S^n|^{2/n}/4."""
    if n < 3:
        raise DomainError("n must be >= 3")
    return n * (n - 2) * sphere_area(n + 1) ** (2.0 / n) / 4.0


def sobolev_quotient(n, u, du, rmax=math.inf):
    """||grad u||_2^2 / ||u||_{2n/(n-2)}^2 for a radial function given with its derivative."""
    p = 2.0 * n / (n - 2)
    area = sphere_area(n)
    g, _ = integrate.quad(lambda r: du(r) ** 2 * r ** (n - 1), 0.0, rmax, limit=500, epsrel=1e-12)
    m, _ = integrate.quad(lambda r: abs(u(r)) ** p * r ** (n - 1), 0.0, rmax, limit=500, epsrel=1e-12)
    return area * g / (area * m) ** (2.0 / p)


def sobolev_trial_ratio(n, u, du, rmax=math.inf):
    """S_n / (Sobolev quotient of u); at most 1, equal to 1 on the extremals."""
    return sobolev_constant(n) / sobolev_quotient(n, u, du, rmax)


# --------------------------------------------------------------- weak L^p


def strong_lp_norm(values, p, weights):
    return float(np.sum(weights * np.abs(values) ** p) ** (1.0 / p))


def weak_lp_norm(values, p, weights):
    """sup_lambda lambda mu{|f| > lambda}^{1/p} for a grid function with cell measures ``weights``."""
    if not p > 0:
        raise RangeError("p must be positive")
    f = np.abs(np.asarray(values, dtype=complex)).ravel()
    w = np.broadcast_to(np.asarray(weights, dtype=float), f.shape).ravel()
    order = np.argsort(-f)
    f, w = f[order], w[order]
    mu = np.cumsum(w)
    return float(np.max(f * mu ** (1.0 / p))) if f.size else 0.0


# ------------------------------------------------------ norm equivalence


@dataclass
class SweepResult:
    rows: list
    extremes: tuple
    refinement_deltas: tuple = None
    skipped: list = field(default_factory=list)

    @property
    def ratios(self):
        return np.array([r["ratio"] for r in self.rows])

    COLUMNS = ("family_id", "l", "scale", "s", "a", "size", "ratio")


def _sweep_once(n, a, s, family, ls, scales, radius, size):
    rows, skipped = [], []
    for l in ls:
        sec = make_sector(n, a, l)
        for k, make in enumerate(family(sec)):
            for lam in scales:
                fid = getattr(make, "family_id", f"member{k}")

                def f(r, make=make, lam=lam):
                    return make(lam * np.asarray(r))

                pa = RadialProfile.from_function(sec, f, "adapted", radius, size)
                pf = RadialProfile.from_function(sec, f, "free", radius, size)
                try:
                    check_decay(pf, tol=1e-10)
                except AccuracyError as exc:
                    warnings.warn(f"skipping {fid} at scale {lam}: {exc}")
                    skipped.append((fid, l, lam))
                    continue
                na = np.linalg.norm(pa.coefficients * pa.grid.spectral_nodes**s)
                nf = np.linalg.norm(pf.coefficients * pf.grid.spectral_nodes**s)
                rows.append(
                    {"family_id": fid, "l": l, "scale": lam, "s": s, "a": a, "size": size,
                     "ratio": float(na / nf), "_a2": float(na**2), "_f2": float(nf**2)}
                )
    return rows, skipped


def norm_equivalence_sweep(
    n, a, s, family=None, ls=(0, 1, 2), scales=(0.75, 1.0, 1.5), radius=40.0, size=1024, refine=True
):
    """Ratios || |D_a|^s u || / ||u||_{H^s-dot} over a test family, per sector and summed.

    Each member is sampled directly on the adapted and on the free grid. The
    ``summed`` rows (``l='all'``) combine equal-amplitude components over ``ls``.
    With ``refine`` the sweep is repeated with ``2 * size`` nodes and the
    relative change of the extremes is stored in ``refinement_deltas``.
    """
    if abs(s) >= 2.0:
        raise RangeError(f"|s|={abs(s)} must be below 2")
    family = family or (lambda sec: default_family(sec))

    def run(sz):
        rows, skipped = _sweep_once(n, a, s, family, ls, scales, radius, sz)
        summed = {}
        for r in rows:
            key = (r["family_id"], r["scale"])
            acc = summed.setdefault(key, [0.0, 0.0])
            acc[0] += r["_a2"]
            acc[1] += r["_f2"]
        for (fid, lam), (x, y) in summed.items():
            rows.append({"family_id": fid, "l": "all", "scale": lam, "s": s, "a": a, "size": sz,
                         "ratio": math.sqrt(x / y), "_a2": x, "_f2": y})
        for r in rows:
            r.pop("_a2")
            r.pop("_f2")
        vals = [r["ratio"] for r in rows]
        return rows, skipped, (min(vals), max(vals))

    rows, skipped, ext = run(size)
    deltas = None
    if refine:
        rows2, _, ext2 = run(2 * size)
        deltas = tuple(abs(b - a_) / abs(a_) for a_, b in zip(ext, ext2))
        rows = rows + rows2
    return SweepResult(rows=rows, extremes=ext, refinement_deltas=deltas, skipped=skipped)


# ----------------------------------------------------------- Kato smoothing


def _time_nodes(T, levels=10, points=16):
    """Composite Gauss-Legendre on [0, T] with panels refined geometrically toward 0."""
    edges = np.concatenate([[0.0], T * 2.0 ** -np.arange(levels, -1, -1.0)])
    x, w = special.roots_legendre(points)
    a, b = edges[:-1], edges[1:]
    t = (0.5 * (a + b))[:, None] + (0.5 * (b - a))[:, None] * x
    wt = (0.5 * (b - a))[:, None] * w
    return t.ravel(), wt.ravel()


def _kato_sector(profile, T, points):
    sec = profile.sector
    p = on_operator_grid(sec, profile, "adapted")
    g = p.grid
    q = inverse_square_matrix(g)
    c0 = p.coefficients
    t, w = _time_nodes(T, points=points)
    ph = np.exp(-1j * np.outer(t, g.spectral_nodes**2)) * c0
    vals = np.real(np.einsum("tm,tm->t", ph.conj(), ph @ q))
    return float(np.dot(w, vals))


def kato_smoothing_norm(field, T, weight="inverse", *, on_horizon="raise", points=16, return_error=False):
    """|| w e^{-itH_a} u ||_{L^2([0, T] x R^n)} with w = |x|^-1 or |x|^-1 P_n^perp.

    ``field`` is a profile or a dict {l: profile}. The perp weight drops the
    l = 0 component and is the only one allowed at critical coupling.
    With ``return_error`` a second evaluation with more time nodes gives an
    error estimate.
    """
    comps = field if isinstance(field, dict) else {field.sector.angular_momentum: field}
    if weight not in ("inverse", "inverse_perp"):
        raise ValueError(f"unknown weight {weight!r}")
    total = 0.0
    err = 0.0
    for l, p in comps.items():
        if weight == "inverse_perp" and l == 0:
            continue
        if p.sector.is_critical and weight == "inverse":
            raise DomainError("at critical coupling use the weight |x|^-1 P_n^perp")
        t_h = horizon(p, 0.0, "schrodinger")
        if T > t_h:
            if on_horizon == "raise":
                raise HorizonError(f"T={T:g} exceeds the truncation horizon {t_h:.4g}", horizon=t_h)
        v = _kato_sector(p, T, points)
        total += v
        if return_error:
            err += abs(_kato_sector(p, T, points + 8) - v)
    val = math.sqrt(max(total, 0.0))
    if return_error:
        return val, (err / (2.0 * val) if val > 0 else 0.0)
    return val


def kato_doubling_ratio(field, T, weight="inverse", **kw):
    """kato_smoothing_norm(2T) / kato_smoothing_norm(T)."""
    return kato_smoothing_norm(field, 2.0 * T, weight, **kw) / kato_smoothing_norm(field, T, weight, **kw)
