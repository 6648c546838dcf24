"""Reproducible test-function families, as reduced profiles phi(r).

Every constructor returns a plain callable ``phi(r)``; sample it with
:meth:`isqlab.sector.RadialProfile.from_function`.
"""

import numpy as np


def gaussian(sector, alpha, beta=0, operator="free"):
    """Reduced profile r^{nu + 1/2 + beta} e^{-alpha r^2}.

    With ``operator='free'`` nu = nu0 and the physical field is
    r^{l + beta} e^{-alpha r^2} Y_l. With ``'adapted'`` nu is the order of H_a,
    so the profile is a Gaussian of the H_a spectral representation and is
    band-limited on the adapted grid.
    """
    order = sector.free_order if operator == "free" else sector.order
    p = order + 0.5 + beta

    def phi(r):
        r = np.asarray(r, dtype=float)
        return r**p * np.exp(-alpha * r * r)

    phi.family_id = f"gauss_a{alpha:g}_b{beta:g}" + ("" if operator == "free" else "_adapted")
    return phi


def gaussian_evolved(sector, alpha, t):
    """Closed form of e^{-itH_0} applied to the free Gaussian with beta = 0.

    r^l e^{-alpha r^2} Y_l evolves to (1 + 4i alpha t)^{-(n/2 + l)} r^l e^{-alpha r^2 / (1 + 4i alpha t)} Y_l.
    """
    n, l = sector.dimension, sector.angular_momentum
    z = 1.0 + 4j * alpha * t
    p = sector.free_order + 0.5

    def phi(r):
        r = np.asarray(r, dtype=float)
        return z ** (-(n / 2.0 + l)) * r**p * np.exp(-alpha * r * r / z)

    return phi


def shell(r0, width=1.0, k=0.0, phase=0.0):
    """Gaussian shell exp(-(r - r0)^2 / (2 w^2)) cos(k r + phase).

    For r0 >= 8 w it vanishes to double precision at r = 0, so it is smooth
    in every sector and effectively band-limited in every Bessel basis.
    """

    def phi(r):
        r = np.asarray(r, dtype=float)
        return np.exp(-((r - r0) ** 2) / (2.0 * width * width)) * np.cos(k * r + phase)

    phi.family_id = f"shell_r{r0:g}_w{width:g}_k{k:g}"
    return phi


def shell_second_derivative(r0, width=1.0):
    """phi'' for :func:`shell` with k = 0."""

    def d2(r):
        r = np.asarray(r, dtype=float)
        x = (r - r0) / width
        return (x * x - 1.0) / width**2 * np.exp(-0.5 * x * x)

    return d2


def shell_derivative(r0, width=1.0):
    def d1(r):
        r = np.asarray(r, dtype=float)
        x = (r - r0) / width
        return -x / width * np.exp(-0.5 * x * x)

    return d1


def random_band_limited(seed, packets=5, centre=(12.0, 20.0), width=(0.8, 1.5), k_max=2.0):
    """Random superposition of Gaussian wave packets away from the origin.

    Frequencies stay below about ``k_max + 6 / width``, so the profile is
    band-limited to double precision; the seed fixes it completely.
    """
    rng = np.random.default_rng(seed)
    r0 = rng.uniform(*centre, size=packets)
    w = rng.uniform(*width, size=packets)
    k = rng.uniform(0.0, k_max, size=packets)
    ph = rng.uniform(0.0, 2.0 * np.pi, size=packets)
    amp = rng.normal(size=packets)

    def phi(r):
        r = np.asarray(r, dtype=float)[..., None]
        g = np.exp(-((r - r0) ** 2) / (2.0 * w * w)) * np.cos(k * r + ph)
        return g @ amp

    phi.family_id = f"random_s{seed}"
    return phi


def default_family(sector, seed=0):
    """Six Gaussians (alpha in {0.5, 1, 2}, beta in {0, 1}) and two random profiles."""
    out = [gaussian(sector, a, b) for a in (0.5, 1.0, 2.0) for b in (0, 1)]
    out += [random_band_limited(seed), random_band_limited(seed + 1)]
    return out


def shell_family():
    """Profiles vanishing to double precision at the origin."""
    out = [shell(r0, w) for r0, w in ((10.0, 1.0), (12.0, 1.5), (15.0, 2.0))]
    out += [shell(12.0, 1.0, k=1.5), random_band_limited(0), random_band_limited(1)]
    return out


def log_bump(span, centre=0.0):
    """Hardy near-optimiser phi(r) = sqrt(r) sin^2(pi (ln r - t0) / span) on one log-period.

    Returns ``(phi, dphi, (r_min, r_max))``. The physical field is
    r^{-(n-2)/2} times a bump in ln r, and its Hardy ratio tends to 1 as the
    span grows (see :func:`log_bump_ratio`).
    """
    t0 = centre - span / 2.0
    k = np.pi / span

    def eta(t):
        inside = (t > t0) & (t < t0 + span)
        return np.where(inside, np.sin(k * (t - t0)) ** 2, 0.0)

    def deta(t):
        inside = (t > t0) & (t < t0 + span)
        return np.where(inside, k * np.sin(2.0 * k * (t - t0)), 0.0)

    def phi(r):
        r = np.asarray(r, dtype=float)
        return np.sqrt(r) * eta(np.log(r))

    def dphi(r):
        r = np.asarray(r, dtype=float)
        t = np.log(r)
        return (0.5 * eta(t) + deta(t)) / np.sqrt(r)

    return phi, dphi, (np.exp(t0), np.exp(t0 + span))


def log_bump_ratio(span, n=3):
    """Exact Hardy ratio of :func:`log_bump` in the radial sector of R^n."""
    nu0 = (n - 2) / 2.0
    return 1.0 / (1.0 + 4.0 * np.pi**2 / (3.0 * span**2 * nu0**2))


def aubin_talenti(n, scale=1.0, eps=0.0):
    """Radial Sobolev extremal (1 + (r/scale)^2)^{-(n-2)/2 - eps} and its derivative.

    eps = 0 is the extremal itself; eps > 0 gives a faster-decaying neighbour.
    """
    e = (n - 2) / 2.0 + eps

    def u(r):
        r = np.asarray(r, dtype=float) / scale
        return (1.0 + r * r) ** (-e)

    def du(r):
        r = np.asarray(r, dtype=float) / scale
        return -2.0 * e * r * (1.0 + r * r) ** (-e - 1.0) / scale

    return u, du
