# At a = -(n-2)^2/4 the radial channel is a planar free flow in disguise,
# while l >= 1 still scatters.

from isqlab.families import gaussian, shell
from isqlab.scattering import conjugation_constant, critical_decompose, critical_sector
from isqlab.sector import RadialProfile

n = 3
print("c_3 =", conjugation_constant(n))

comps = {}
for l in (0, 1, 2):
    sec = critical_sector(n, l)
    f = gaussian(sec, 0.1) if l == 0 else shell(15.0, 2.0, 1.0)
    comps[l] = RadialProfile.from_function(sec, f, "adapted", 800.0, 2048)

out = critical_decompose(n, 1.0, comps)
for t, r in out["radial_channel"]["residuals"]:
    print(f"radial channel, t={t:4.1f}: conjugation residual {r:.1e}")
for l, rep in out["scattered_channel"].items():
    res = ", ".join(f"{r:.4f}" for _, r in rep.cauchy_residuals)
    print(f"l={l}: residuals {res}  phase {rep.fitted_phase:.4f}  candidate {rep.candidate_phase:.4f}")
