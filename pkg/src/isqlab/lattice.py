"""Finite-difference radial models A (free) and B = A + V on one sector.

Uniform mesh r_k = k h, h = R / (N + 1), Dirichlet at both ends:

    A = -D2 + (nu0^2 - 1/4) / r^2,    B = A + diag(V(r_k)).

Both are symmetric tridiagonal, so every function f(A), f(B) is built from a
full tridiagonal eigendecomposition. The checks mirror an abstract
wave-operator criterion: norm equivalence (H1), a resolvent-difference
compactness proxy (H2), local decay (H4), and wave-operator Cauchy runs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError, RangeError
from .inequalities import sobolev_constant, weak_lp_norm
from .scattering import sphere_area

MAX_SIZE = 4096
HORIZON_FRACTION = 0.8


# --------------------------------------------------------------- potentials


def _smooth_step(x):
    """C^infinity step: 1 for x <= 0, 0 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    a = np.where(x < 1.0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    b = np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
    return np.where(x <= 0.0, 1.0, np.where(x >= 1.0, 0.0, a / (a + b)))


def potential_samples(name, r, **p):
    """(V, r V') on the mesh for a named potential family.

    zero; well(depth, extent); bump(height, extent); inverse_square(a, cap);
    power(c, gamma, cutoff); aubin_talenti(c, n); samples(values[, radial_derivative]).
    The derivative is None when it is not known.
    """
    r = np.asarray(r, dtype=float)
    if name == "zero":
        return np.zeros_like(r), np.zeros_like(r)
    if name == "well":
        d, a = p.get("depth", 1.0), p.get("extent", 1.0)
        return np.where(r < a, -d, 0.0), None
    if name == "bump":
        hgt, a = p.get("height", 1.0), p.get("extent", 2.0)
        x = r / a
        inside = x < 1.0
        v = np.zeros_like(r)
        v[inside] = hgt * np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        dv = np.zeros_like(r)
        dv[inside] = v[inside] * (-2.0 * x[inside] ** 2 / (1.0 - x[inside] ** 2) ** 2)
        return v, dv
    if name == "inverse_square":
        a, cap = p.get("a", 0.1), p.get("cap", 100.0)
        core = r * r < 1.0 / cap
        v = np.where(core, a * cap, a / (r * r))
        return v, np.where(core, 0.0, -2.0 * a / (r * r))
    if name == "power":
        c, g, cut = p.get("c", 1.0), p.get("gamma", 1.0), p.get("cutoff", 5.0)
        chi = _smooth_step(r / cut - 1.0)
        return c * r**-g * chi, None
    if name == "aubin_talenti":
        c, n = p.get("c", 0.5), p["n"]
        v = -c * n * (n - 2) / (1.0 + r * r) ** 2
        return v, -4.0 * r * r / (1.0 + r * r) * v
    if name == "samples":
        v = np.asarray(p["values"], dtype=float)
        dv = p.get("radial_derivative")
        return v, None if dv is None else np.asarray(dv, dtype=float)
    raise ValueError(f"unknown potential family {name!r}")


# ------------------------------------------------------------------- model


@dataclass(frozen=True, eq=False)
class LatticeModel:
    dimension: int
    angular_momentum: int
    size: int
    radius: float
    potential: str
    params: dict
    nodes: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    rdV: np.ndarray = field(repr=False)
    diag_a: np.ndarray = field(repr=False)
    off: np.ndarray = field(repr=False)
    eig_a: tuple = field(repr=False)
    eig_b: tuple = field(repr=False)
    flags: tuple = ()

    @property
    def spacing(self):
        return self.radius / (self.size + 1)

    @property
    def free_order(self):
        return self.angular_momentum + (self.dimension - 2) / 2.0

    def A(self):
        return np.diag(self.diag_a) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def B(self):
        return self.A() + np.diag(self.V)

    def measure(self):
        """Radial cell measures |S^{n-1}| r^{n-1} h for integrals over R^n."""
        return sphere_area(self.dimension) * self.nodes ** (self.dimension - 1) * self.spacing

    @property
    def coercive(self):
        return "non-coercive" not in self.flags


def _eig(d, e):
    lam, q = linalg.eigh_tridiagonal(d, e)
    return lam, q


def build_model(n, l, size, radius, potential="zero", **params):
    """Assemble and diagonalise A and B = A + V on the sector (n, l).

    Non-coercive models (Assumption C violated and a negative eigenvalue of B)
    are still returned, carrying the flag ``'non-coercive'``.
    """
    if n < 3 or l < 0:
        raise DomainError("need n >= 3 and l >= 0")
    if not 8 <= size <= MAX_SIZE:
        raise RangeError(f"size={size} outside [8, {MAX_SIZE}]")
    h = radius / (size + 1)
    r = h * np.arange(1, size + 1)
    nu0 = l + (n - 2) / 2.0
    diag_a = 2.0 / h**2 + (nu0 * nu0 - 0.25) / r**2
    off = -np.ones(size - 1) / h**2
    if potential == "aubin_talenti":
        params = {"n": n, **params}
    v, rdv = potential_samples(potential, r, **params)
    if v.shape != r.shape:
        raise RangeError("potential samples do not match the mesh")
    eig_a = _eig(diag_a, off)
    eig_a = tuple(map(_freeze, eig_a))
    eig_b = eig_a if not np.any(v) else tuple(map(_freeze, _eig(diag_a + v, off)))
    model = LatticeModel(
        n, l, size, float(radius), potential, dict(params), _freeze(r), _freeze(v),
        None if rdv is None else _freeze(rdv), _freeze(diag_a), _freeze(off), eig_a, eig_b,
    )
    flags = []
    margins = assumption_c(model)
    if not margins["pass"] and eig_b[0][0] < 0.0:
        flags.append("non-coercive")
    object.__setattr__(model, "flags", tuple(flags))
    return model


def _freeze(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


def spectral_function(eig, g):
    """Q diag(g(lambda)) Q^T."""
    lam, q = eig
    return (q * g(lam)) @ q.T


def propagator(eig, f, t):
    """e^{-i t f(op)} as a dense matrix."""
    lam, q = eig
    return (q * np.exp(-1j * t * f(lam))) @ q.T


def reconstruction_defect(model):
    """max |Q diag(lambda) Q^T - op| / ||op|| for A and B."""
    out = []
    for eig, op in ((model.eig_a, model.A()), (model.eig_b, model.B())):
        rec = spectral_function(eig, lambda x: x)
        out.append(float(np.abs(rec - op).max() / np.abs(op).max()))
    return tuple(out)


# -------------------------------------------------------------------- (H1)


def _power(lam, s, inhomogeneous):
    base = 1.0 + lam if inhomogeneous else lam
    return np.power(np.maximum(base, 0.0), s)


def check_H1(model, s=1.0, inhomogeneous=False):
    """Norm-equivalence constants (lower, upper) with lower ||A^{s/2} u|| <= ||B^{s/2} u|| <= upper ||A^{s/2} u||.

    Squares of the constants are the extreme generalised eigenvalues of
    (B^s, A^s); ``inhomogeneous`` uses (1 + .)^s instead.
    """
    if abs(s) > 2.0:
        raise RangeError("|s| must be <= 2")
    if s == 0.0:
        return 1.0, 1.0
    if not inhomogeneous and s > 0 and not model.coercive:
        raise DomainError("homogeneous norm equivalence needs a coercive model")
    lam_a, qa = model.eig_a
    if not np.any(model.V):
        return 1.0, 1.0
    bs = spectral_function(model.eig_b, lambda x: _power(x, s, inhomogeneous))
    d = _power(lam_a, -0.5 * s, inhomogeneous)
    m = (qa.T @ bs @ qa) * np.outer(d, d)
    w = linalg.eigvalsh(0.5 * (m + m.T))
    return float(math.sqrt(max(w[0], 0.0))), float(math.sqrt(w[-1]))


# -------------------------------------------------------------------- (H2)


def bracket(lam):
    """<lambda> = (1 + lambda^2)^{1/2}."""
    return np.sqrt(1.0 + lam * lam)


def check_H2(model, s=1.0, r=0.0, z0=-1.0):
    """Singular values of <A>^{s/2} ((A - z0)^{-1} - (B - z0)^{-1}) <A>^{-r/2}, descending."""
    z0 = complex(z0)
    if z0.imag == 0.0 and z0.real >= 0.0:
        raise DomainError("z0 must avoid [0, inf)")
    lam_a, qa = model.eig_a
    ra = spectral_function(model.eig_a, lambda x: 1.0 / (x - z0))
    rb = spectral_function(model.eig_b, lambda x: 1.0 / (x - z0))
    left = spectral_function(model.eig_a, lambda x: bracket(x) ** (s / 2.0))
    right = spectral_function(model.eig_a, lambda x: bracket(x) ** (-r / 2.0))
    k = left @ (ra - rb) @ right
    if z0.imag == 0.0:
        k = k.real
    return linalg.svd(k, compute_uv=False)


def factorization_singular_values(model):
    """Singular values of <A>^{-1/2} (B - A) <A>^{-1}."""
    left = spectral_function(model.eig_a, lambda x: bracket(x) ** -0.5)
    right = spectral_function(model.eig_a, lambda x: 1.0 / bracket(x))
    return linalg.svd((left * model.V) @ right, compute_uv=False)


def tail_index(sv, rel=1e-6):
    """Fraction of singular values above ``rel`` times the largest."""
    sv = np.asarray(sv)
    if sv.size == 0 or sv[0] == 0.0:
        return 0.0
    return float(np.count_nonzero(sv > rel * sv[0]) / sv.size)


# ---------------------------------------------------------------- f and (H4)


_F = {
    "identity": (lambda lam, p: lam, lambda lam, p: np.ones_like(lam)),
    "sqrt": (lambda lam, p: np.sqrt(np.maximum(lam, 0.0)), lambda lam, p: 0.5 / np.sqrt(lam)),
    "power": (lambda lam, p: np.maximum(lam, 0.0) ** p, lambda lam, p: p * lam ** (p - 1.0)),
    "constant": (lambda lam, p: np.full_like(lam, p), lambda lam, p: np.zeros_like(lam)),
}


def spectral_f(name, param=None):
    """(f, f') for a named monotone-function candidate."""
    if name not in _F:
        raise ValueError(f"unknown f {name!r}")
    if name == "power" and param is None:
        param = 0.5
    if name == "constant" and param is None:
        param = 1.0
    f, df = _F[name]
    return (lambda lam: f(np.asarray(lam, dtype=float), param)), (lambda lam: df(np.asarray(lam, dtype=float), param))


def monotone_f_check(name, lam_grid, param=None, step=1e-6):
    """True iff a central finite difference of f is positive at every grid point."""
    lam = np.asarray(lam_grid, dtype=float)
    if np.any(lam <= 0.0):
        raise RangeError("lambda grid must be positive")
    f, _ = spectral_f(name, param)
    d = (f(lam * (1.0 + step)) - f(lam * (1.0 - step))) / (2.0 * step * lam)
    return bool(np.all(d > 0.0)), {"min_derivative": float(d.min()), "points": int(lam.size)}


def group_velocity(model, u, f_name="identity", param=None, tol=1e-4):
    """max 2 sqrt(lambda) f'(lambda) over B-eigenvalues carrying the data's spectral weight."""
    lam, q = model.eig_b
    w = np.abs(q.T @ u) ** 2
    keep = w > tol * tol * w.sum()
    keep &= lam > 0.0
    _, df = spectral_f(f_name, param)
    lk = lam[keep]
    return float(np.max(2.0 * np.sqrt(lk) * df(lk))) if lk.size else 0.0


def lattice_horizon(model, u, f_name="identity", param=None):
    v = group_velocity(model, u, f_name, param)
    return math.inf if v == 0.0 else HORIZON_FRACTION * model.radius / v


def default_probes(model, u=None, centres=None, width=None):
    """Normalised Gaussian bumps used as the finite probe set in (H4).

    With data ``u`` they sit at 1/2, 1 and 3/2 times its centroid and share
    its rms width; otherwise at fixed fractions of R.
    """
    r = model.nodes
    if centres is None and u is not None:
        w = np.abs(u) ** 2
        c = float(np.sum(w * r) / np.sum(w))
        width = width or float(np.sqrt(np.sum(w * (r - c) ** 2) / np.sum(w)))
        centres = (0.5 * c, c, 1.5 * c)
    centres = centres or (0.05 * model.radius, 0.1 * model.radius, 0.2 * model.radius)
    width = width or 0.02 * model.radius
    e = np.array([np.exp(-((r - c) ** 2) / (2.0 * width**2)) for c in centres])
    return e / np.linalg.norm(e, axis=1)[:, None]


def check_H4(model, u, f_name="identity", times=(0.0, 5.0, 10.0, 20.0), probes=None, param=None):
    """Overlaps |<e^{-itf(B)} u, e_j>| for probes e_j along ``times``.

    Returns a dict with the overlap table, its maximum per time, the horizon,
    and the flagged times beyond it.
    """
    f, _ = spectral_f(f_name, param)
    probes = default_probes(model, u) if probes is None else np.atleast_2d(probes)
    lam, q = model.eig_b
    c = q.T @ u
    t_h = lattice_horizon(model, u, f_name, param)
    table = []
    for t in times:
        ut = q @ (np.exp(-1j * t * f(lam)) * c)
        table.append(np.abs(probes.conj() @ ut))
    table = np.array(table)
    return {
        "times": [float(t) for t in times],
        "overlaps": table,
        "max_overlap": table.max(axis=1),
        "horizon": t_h,
        "flagged_times": [float(t) for t in times if t > t_h],
    }


# --------------------------------------------------------------- assumptions


def lp_norm(model, values, p):
    return float(np.sum(model.measure() * np.abs(values) ** p) ** (1.0 / p))


def assumption_c(model):
    """||V_-||_{L^{n/2}} against the Sobolev constant S_n."""
    n = model.dimension
    neg = lp_norm(model, np.maximum(-model.V, 0.0), n / 2.0)
    s_n = sobolev_constant(n)
    return {"norm_v_minus": neg, "sobolev_constant": s_n, "margin": s_n - neg, "pass": bool(neg < s_n)}


def _form_lower_bound(model, w):
    """min <(A + diag(w)) u, u> / <A u, u> over the lattice."""
    lam_a, qa = model.eig_a
    d = lam_a**-0.5
    m = (qa.T @ (w[:, None] * qa)) * np.outer(d, d)
    m = 0.5 * (m + m.T) + np.eye(model.size)
    return float(linalg.eigvalsh(m, subset_by_index=[0, 0])[0])


def assumption_b(model, radial_derivative=None):
    """Weak-norm data and the two form lower bounds delta.

    ``radial_derivative`` is r V'(r) = x . grad V; without it (and without a
    derivative known to the potential family) the status is 'cannot check'.
    """
    rdv = model.rdV if radial_derivative is None else np.asarray(radial_derivative, dtype=float)
    if rdv is None:
        return {"status": "cannot check", "pass": None, "reason": "x . grad V not supplied"}
    n = model.dimension
    mu = model.measure()
    r = model.nodes
    d1 = _form_lower_bound(model, model.V)
    d2 = _form_lower_bound(model, -model.V - rdv)
    out = {
        "status": "checked",
        "weak_V": weak_lp_norm(model.V, n / 2.0, mu),
        "weak_rV": weak_lp_norm(r * model.V, float(n), mu),
        "weak_xdV": weak_lp_norm(rdv, n / 2.0, mu),
        "delta_plus": d1,
        "delta_minus": d2,
    }
    out["pass"] = bool(min(d1, d2) > 0.0)
    return out


def assumption_checks(model, radial_derivative=None):
    return {"C": assumption_c(model), "B": assumption_b(model, radial_derivative)}


# ----------------------------------------------------------- wave operator


def continuous_projection(model, floor_margin=1e-8, participation=0.2):
    """Indices of B-eigenvectors kept by P_c.

    Dropped: every negative eigenvalue (A is positive, so these are bound
    states however extended they look on the box), plus eigenvalues below
    (lowest A eigenvalue + floor_margin) with a participation ratio below
    ``participation``.
    """
    lam, q = model.eig_b
    floor = model.eig_a[0][0] + floor_margin
    pr = 1.0 / (model.size * np.sum(q**4, axis=0))
    drop = (lam < 0.0) | ((lam < floor) & (pr < participation))
    return np.flatnonzero(~drop)


@dataclass
class LatticeScatter:
    f_name: str
    s: float
    schedule: list
    cauchy_residuals: list
    isometry_defect: float
    horizon: float
    flagged_times: list
    limit: np.ndarray = field(repr=False)
    dropped_states: int = 0

    @property
    def final_residual(self):
        trusted = [r for t, r in self.cauchy_residuals if t <= self.horizon]
        return trusted[-1] if trusted else math.nan

    def to_dict(self):
        return {
            "f": self.f_name,
            "s": self.s,
            "schedule": self.schedule,
            "cauchy_residuals": [[float(t), float(r)] for t, r in self.cauchy_residuals],
            "isometry_defect": float(self.isometry_defect),
            "horizon": float(self.horizon),
            "flagged_times": self.flagged_times,
            "dropped_states": self.dropped_states,
        }


def wave_operator_lattice(model, u, f_name="identity", s=1.0, schedule=(5.0, 10.0, 20.0, 40.0), param=None):
    """Cauchy run of e^{itf(A)} e^{-itf(B)} P_c u in the norm ||A^{s/2} . ||.

    Residuals are relative to ||B^{s/2} P_c u||; times past the horizon are
    flagged and excluded from ``final_residual``.
    """
    f, _ = spectral_f(f_name, param)
    lam_b, qb = model.eig_b
    lam_a, qa = model.eig_a
    keep = continuous_projection(model)
    cb = (qb.T @ u)[keep]
    fb = f(lam_b[keep])
    fa = f(lam_a)
    wa = np.power(np.maximum(lam_a, 0.0), s / 2.0)
    n_in = float(np.linalg.norm(np.power(np.maximum(lam_b[keep], 0.0), s / 2.0) * cb))
    x = qa.T @ qb[:, keep]
    outs = []
    for t in schedule:
        ca = np.exp(1j * t * fa) * (x @ (np.exp(-1j * t * fb) * cb))
        outs.append(ca)
    res = [(schedule[k], float(np.linalg.norm(wa * (outs[k] - outs[k - 1])) / n_in)) for k in range(1, len(schedule))]
    t_h = lattice_horizon(model, u, f_name, param)
    trusted = [k for k, t in enumerate(schedule) if t <= t_h]
    last = trusted[-1] if trusted else len(schedule) - 1
    iso = abs(float(np.linalg.norm(wa * outs[last])) - n_in) / n_in
    return LatticeScatter(
        f_name=f_name,
        s=s,
        schedule=[float(t) for t in schedule],
        cauchy_residuals=res,
        isometry_defect=iso,
        horizon=t_h,
        flagged_times=[float(t) for t in schedule if t > t_h],
        limit=qa @ outs[last],
        dropped_states=int(model.size - keep.size),
    )


def wave_packet(model, centre, width, momentum, incoming=True):
    """Normalised Gaussian packet exp(-(r - c)^2 / 2w^2) e^{-+i k r} on the mesh."""
    r = model.nodes
    sign = -1.0 if incoming else 1.0
    u = np.exp(-((r - centre) ** 2) / (2.0 * width**2)) * np.exp(sign * 1j * momentum * r)
    return u / np.linalg.norm(u)


# ----------------------------------------------------------------- report


@dataclass
class CriterionReport:
    h1_constants: tuple
    h1_inhomogeneous: tuple
    h2_singular_values: np.ndarray
    h2_tail_indices: tuple
    h3: str
    h4_decay: dict
    f_monotone: dict
    assumption_margins: dict
    wave_limit: dict
    invariance_residual: float = None
    min_eigenvalue: float = None
    flags: tuple = ()

    def to_dict(self):
        def clean(x):
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            if isinstance(x, np.ndarray):
                return clean(x.tolist())
            if isinstance(x, (np.floating, np.integer, np.bool_)):
                return x.item()
            if isinstance(x, complex):
                return [x.real, x.imag]
            return x

        return clean(
            {
                "h1_constants": self.h1_constants,
                "h1_inhomogeneous": self.h1_inhomogeneous,
                "h2_singular_values": self.h2_singular_values[:64],
                "h2_tail_indices": self.h2_tail_indices,
                "h3": self.h3,
                "h4_decay": {k: v for k, v in self.h4_decay.items() if k != "overlaps"},
                "f_monotone": self.f_monotone,
                "assumption_margins": self.assumption_margins,
                "wave_limit": self.wave_limit,
                "invariance_residual": self.invariance_residual,
                "min_eigenvalue": self.min_eigenvalue,
                "flags": list(self.flags),
            }
        )


def criterion_report(model, u, *, wave_model=None, z0=(-1.0, -1.0 + 1.0j), h4_times=None, schedules=None):
    """Run every check on one model and packet.

    ``schedules`` maps f names ('identity', 'sqrt') to Cauchy schedules; the
    two limits are compared in L2 (the invariance check). The dense (H1)/(H2)
    checks run on ``model``; propagation runs on ``wave_model`` (same
    potential on a larger box, where ``u`` lives) when given.
    """
    schedules = schedules or {"identity": (2.5, 5.0, 10.0, 20.0), "sqrt": (10.0, 20.0, 40.0, 80.0)}
    wm = wave_model or model
    h1 = check_H1(model, 1.0) if model.coercive else (math.nan, math.nan)
    h1i = check_H1(model, 1.0, inhomogeneous=True)
    sv = [check_H2(model, 1.0, 0.0, z) for z in z0]
    lam_grid = np.geomspace(1e-4, model.eig_a[0][-1], 200)
    mono = {name: monotone_f_check(name, lam_grid)[0] for name in ("identity", "sqrt")}
    runs = {name: wave_operator_lattice(wm, u, name, 1.0, sched) for name, sched in schedules.items()}
    lims = [runs[k].limit for k in runs]
    inv = float(np.linalg.norm(lims[0] - lims[-1]) / np.linalg.norm(u)) if len(lims) > 1 else None
    t4 = h4_times or schedules.get("identity")
    return CriterionReport(
        h1_constants=h1,
        h1_inhomogeneous=h1i,
        h2_singular_values=sv[0],
        h2_tail_indices=tuple(tail_index(x) for x in sv),
        h3="structural",
        h4_decay=check_H4(wm, u, "identity", (0.0, *t4)),
        f_monotone=mono,
        assumption_margins=assumption_checks(model),
        wave_limit={k: v.to_dict() for k, v in runs.items()},
        invariance_residual=inv,
        min_eigenvalue=float(model.eig_b[0][0]),
        flags=tuple(sorted(set(model.flags) | set(wm.flags))),
    )
