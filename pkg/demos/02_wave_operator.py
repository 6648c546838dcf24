# Forward wave operator for a = 1, n = 3, l = 0 on a large box.
# Cauchy residuals shrink along the time ladder and the limit is a pure
# phase times the cross-transform.

from isqlab.families import gaussian
from isqlab.scattering import half_wave_limit, schrodinger_wave_limit
from isqlab.sector import RadialProfile, make_sector

sec = make_sector(3, 1.0, 0)
u = RadialProfile.from_function(sec, gaussian(sec, 0.5), "free", 1100.0, 3000)

rep = schrodinger_wave_limit(sec, 1.0, u, "forward")
for t, r in rep.cauchy_residuals:
    print(f"T={t:5.1f}  residual {r:.4f}")
print("horizon       ", round(rep.horizon_valid_until, 1))
print("fitted phase  ", rep.fitted_phase)
print("candidate     ", rep.candidate_phase)
print("isometry gap  ", rep.isometry_defect)

hw = half_wave_limit(sec, 1.0, u, "forward")
print("half-wave phase", hw.fitted_phase)
print("half-wave vs Schrodinger limit, L2:", round(hw.extra["invariance_residual"], 4))
