"""Bessel functions of the first kind of real order and their positive zeros.

Evaluation is delegated to :func:`scipy.special.jv` (AMOS), wrapped with the
range contract used throughout the package. Zeros are located by a sign-change
scan followed by a vectorised, bracket-safeguarded Newton iteration seeded
with McMahon's asymptotic expansion.
"""

import numpy as np
from scipy import special

from .errors import NumericalError, RangeError

#: Largest supported order.
MAX_ORDER = 50.0
#: Largest number of zeros that :func:`bessel_zeros` will return.
MAX_ZEROS = 100_000
#: Largest supported argument, ten times j_{50, MAX_ZEROS}.
MAX_ARGUMENT = 10.0 * np.pi * (MAX_ZEROS + MAX_ORDER / 2 + 1)

# Scan step for bracketing; consecutive zeros of J_nu are more than 3.1 apart
# for every nu >= 0, so one step never straddles two zeros.
_SCAN_STEP = 1.0


def _check_order(order):
    order = float(order)
    if not np.isfinite(order) or order < 0.0 or order > MAX_ORDER:
        raise RangeError(f"order={order!r} outside supported range [0, {MAX_ORDER}]")
    return order


def bessel_j(order, argument):
    """Evaluate J_nu(x) for real ``order`` in [0, 50] and ``argument`` >= 0.

    Parameters
    ----------
    order : float
        Order nu of the Bessel function.
    argument : float or array_like
        Non-negative argument(s), at most :data:`MAX_ARGUMENT`.

    Returns
    -------
    float or ndarray
        J_nu(x), same shape as ``argument``.

    Raises
    ------
    RangeError
        If the order or any argument is outside the supported range.
    """
    order = _check_order(order)
    x = np.asarray(argument, dtype=float)
    if x.size and (not np.all(np.isfinite(x)) or x.min() < 0.0 or x.max() > MAX_ARGUMENT):
        raise RangeError(f"argument outside supported range [0, {MAX_ARGUMENT:.6g}]")
    out = special.jv(order, x)
    return float(out) if out.ndim == 0 else out


def bessel_j_derivative(order, argument):
    """d/dx J_nu(x) via the recurrence (J_{nu-1} - J_{nu+1}) / 2."""
    order = _check_order(order)
    x = np.asarray(argument, dtype=float)
    return 0.5 * (special.jv(order - 1.0, x) - special.jv(order + 1.0, x))


def mcmahon_zeros(order, k):
    """McMahon's large-k asymptotic expansion of the k-th zero of J_nu."""
    k = np.asarray(k, dtype=float)
    mu = 4.0 * order * order
    beta = (k + 0.5 * order - 0.25) * np.pi
    b8 = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8**3)
        - 32.0 * (mu - 1.0) * (83.0 * mu**2 - 982.0 * mu + 3779.0) / (15.0 * b8**5)
    )


def _brackets(order, count):
    """Return arrays (lo, hi) bracketing the first ``count`` zeros."""
    # J_nu > 0 on (0, nu] since j_{nu,1} > nu.
    start = max(order, 1e-3)
    stop = float(mcmahon_zeros(order, count)) + 10.0 + order
    while True:
        xs = np.arange(start, stop + _SCAN_STEP, _SCAN_STEP)
        fs = special.jv(order, xs)
        change = np.flatnonzero(np.signbit(fs[:-1]) != np.signbit(fs[1:]))
        if change.size >= count:
            change = change[:count]
            return xs[change], xs[change + 1]
        stop += 2.0 * np.pi * (count - change.size) + 10.0


def bessel_zeros(order, count, *, max_iter=100):
    """First ``count`` positive zeros of J_nu, in ascending order.

    Parameters
    ----------
    order : float
        Order nu in [0, 50].
    count : int
        Number of zeros, 1 <= count <= :data:`MAX_ZEROS`.

    Returns
    -------
    ndarray of shape (count,)

    Raises
    ------
    RangeError
        For an unsupported order or count.
    NumericalError
        If the safeguarded Newton iteration fails to converge inside a bracket.
    """
    order = _check_order(order)
    count = int(count)
    if count < 1 or count > MAX_ZEROS:
        raise RangeError(f"count={count} outside supported range [1, {MAX_ZEROS}]")

    lo, hi = _brackets(order, count)
    f_lo = special.jv(order, lo)
    x = mcmahon_zeros(order, np.arange(1, count + 1))
    outside = ~((x > lo) & (x < hi))
    x[outside] = 0.5 * (lo[outside] + hi[outside])

    active = np.ones(count, dtype=bool)
    for _ in range(max_iter):
        xa = x[active]
        f = special.jv(order, xa)
        df = 0.5 * (special.jv(order - 1.0, xa) - special.jv(order + 1.0, xa))
        # shrink brackets with the sign of f
        same = np.signbit(f) == np.signbit(f_lo[active])
        lo_a, hi_a, flo_a = lo[active], hi[active], f_lo[active]
        lo_a = np.where(same, xa, lo_a)
        flo_a = np.where(same, f, flo_a)
        hi_a = np.where(same, hi_a, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / df
        xn = xa - step
        bad = ~np.isfinite(xn) | (xn <= lo_a) | (xn >= hi_a)
        xn[bad] = 0.5 * (lo_a[bad] + hi_a[bad])
        done = (np.abs(xn - xa) <= 4.0 * np.finfo(float).eps * xa) | (f == 0.0)
        xn[f == 0.0] = xa[f == 0.0]
        x[active], lo[active], hi[active], f_lo[active] = xn, lo_a, hi_a, flo_a
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    else:
        k = int(np.flatnonzero(active)[0])
        raise NumericalError(
            f"zero {k + 1} of J_{order:g} did not converge; bracket [{lo[k]!r}, {hi[k]!r}]"
        )
    return x
