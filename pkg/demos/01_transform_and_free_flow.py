# Fourier-Bessel transform on Bessel-zero nodes, then the free Schrodinger
# flow of a Gaussian checked against its closed form.

import numpy as np

from isqlab.families import gaussian, gaussian_evolved, random_band_limited
from isqlab.hankel import dht_forward, dht_inverse, radial_grid
from isqlab.sector import RadialProfile, apply_multiplier, make_sector, schrodinger

for nu in (0.0, 0.5, 1.3, 2.5):
    g = radial_grid(nu, 40.0, 1024)
    x = g.sample(random_band_limited(1))
    back = dht_inverse(g, dht_forward(g, x))
    print(f"nu={nu:3.1f}  orthogonality {g.orthogonality_defect():.1e}  roundtrip {np.abs(back - x).max():.1e}")

sec = make_sector(3, 0.0, 0)
p = RadialProfile.from_function(sec, gaussian(sec, 1.0), "adapted", 300.0, 1536)
for t in (0.1, 1.0, 10.0):
    q = apply_multiplier(sec, schrodinger(t), p)
    exact = q.grid.sample(gaussian_evolved(sec, 1.0, t))
    print(f"t={t:5.1f}  relative L2 error {np.linalg.norm(q.values - exact) / np.linalg.norm(exact):.1e}")
