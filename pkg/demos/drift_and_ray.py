"""
A random walk of hyperbolic translations and its tracking ray
=============================================================

Two short translations along axes 1 radian apart, chosen by fair coin
flips, drift away from the apex at a linear rate A.  The selection of
times n_1 < n_2 < n_3 turns the orbit into geodesics gamma_i that
converge to a ray, and the orbit stays within 9 A k / 2^(i+1) of it.
"""
import numpy as np

from geoergodic import ergodic as erg
from geoergodic import geometry as geo
from geoergodic import ray as ry

H2 = geo.hyperbolic_plane()
y = geo.origin(H2)
family = erg.MapFamily(H2, [erg.boost(0.004), erg.boost(0.004, 1.0)])
system = erg.SymbolicSystem((0.5, 0.5), seed=7)

# drift, from 200 independent paths
est = erg.drift_estimate(family, system, y, [250, 500, 1000, 2000, 5000], 200)
print(f"A = {est.A:.6f} +- {est.A_se:.1e} ({est.status})")

# one trajectory and the schedule eps_i built from the exact hyperbolic modulus
traj = erg.cocycle_orbit(family, erg.sample_path(system, 5000), y, 5000)
pairs = [ry.alpha_from_condition_one(H2, y, i) for i in range(1, 5)]
sched = ry.epsilon_schedule(est.A, [a for a, _ in pairs], [s for _, s in pairs], traj, est.A_se)
for e in sched.entries:
    print(f"i={e.i}  alpha={e.alpha:.5f}  eps={e.eps:.3e}  p={e.p}")

sel = ry.select_sequences(traj, sched, 5000, depth=3)
for i in range(1, sel.depth + 1):
    lv = sel.level(i)
    print(f"level {i}: K={lv.K} n={lv.n} certified={lv.certified}")

# the limit ray at a few radii, with its error bound R / 2^3
top = traj.distances[sel.level(3).n]
ray = ry.ray_extract(sel, traj, np.linspace(0, top, 6)[1:])
for s in ray.samples:
    print(f"R={s.R:6.3f}  gamma(R)=({s.point.coords[1]:+.4f}, {s.point.coords[2]:+.4f})  +- {s.error_bound:.3f}")

# residuals d(gamma(Ak), a_k y) stay well inside the final bound
entries, _ = ry.residual_audit(sel, ray, traj)
ratio = max(e.residual / e.final_bound for e in entries)
print(f"{len(entries)} residuals audited, largest residual / bound = {ratio:.3f}")
