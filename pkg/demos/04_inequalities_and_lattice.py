# Hardy ratios (bounded, and nearly saturated by log-bumps) and the lattice
# checks on a well below the Sobolev threshold and one above it.

from isqlab import lattice
from isqlab.families import log_bump, log_bump_ratio
from isqlab.inequalities import hardy_ratio_analytic, sobolev_constant

for span in (4.0, 16.0, 64.0, 128.0):
    phi, dphi, supp = log_bump(span)
    print(f"span {span:5.0f}: Hardy ratio {hardy_ratio_analytic(3, phi, dphi, supp):.6f}  "
          f"exact {log_bump_ratio(span):.6f}")

print("S_3 =", sobolev_constant(3))
for c in (0.5, 1.2):
    m = lattice.build_model(3, 0, 1000, 100.0, "aubin_talenti", c=c)
    ac = lattice.assumption_c(m)
    print(f"c={c}: ||V_-|| = {ac['norm_v_minus']:.3f}  passes={ac['pass']}  lowest eigenvalue {m.eig_b[0][0]:.2e}")

model = lattice.build_model(3, 0, 1000, 100.0, "aubin_talenti", c=0.5)
wave = lattice.build_model(3, 0, 4000, 200.0, "aubin_talenti", c=0.5)
u = lattice.wave_packet(wave, 15.0, 2.0, 2.0)
rep = lattice.criterion_report(model, u, wave_model=wave)
print("H1 constants", rep.h1_constants)
print("H2 tail indices", rep.h2_tail_indices)
for name, run in rep.wave_limit.items():
    print(name, [round(r, 5) for _, r in run["cauchy_residuals"]], "horizon", round(run["horizon"], 1))
print("sqrt vs identity limit, L2:", rep.invariance_residual)
