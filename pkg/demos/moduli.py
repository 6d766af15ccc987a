"""
Sampling moduli of convexity
============================

The sampled modulus is an infimum over admissible pairs, so it can only
overestimate the true value; with enough samples it settles onto the
closed form from above.
"""
import math

from geoergodic import convexity as cx
from geoergodic import geometry as geo

E2, H2 = geo.euclidean(2), geo.hyperbolic_plane()

# flat space: the modulus does not depend on the radius
for eps in (0.5, 1.0, 1.5):
    est = cx.modulus_estimate(E2, geo.origin(E2), 1.0, eps, 100_000, 1)
    print(f"E2   eps={eps}: sampled {est.value:.5f}  exact {float(cx.cat0_modulus(eps)):.5f}")

# hyperbolic balls get more convex as they grow
for r in (0.5, 3.0, 8.0):
    est = cx.modulus_estimate(H2, geo.origin(H2), r, 1.0, 50_000, 2)
    print(f"H2   r={r}: sampled {est.value:.5f}  exact {float(cx.hyperbolic_modulus(r, 1.0)):.5f}")

# the triangle chain keeps at least eps/2 once the radius passes 2 pi / eps
Y = geo.triangle_chain(45)
a = geo.chain_vertex(Y, 2, "b")
for eps in (0.5, 1.0):
    s = 2 * math.pi / eps
    vals = [cx.modulus_estimate(Y, a, k * s, eps, 10_000, 11).value for k in (1, 2, 4)]
    print(f"chain eps={eps}: " + ", ".join(f"{v:.3f}" for v in vals) + f"  (floor {eps / 2})")

# the parameter of a 2-uniformly convex triangle cannot exceed c_2 = 2
k = cx.ohta_k(1.0, geo.triangle_diameter(2), 0.05)
rep = cx.p_uniform_check(geo.spherical_triangle(2), 2.0, k, 50_000, 0)
print(f"Delta_2 with k={k:.4f}: {rep.status} (worst {rep.worst_defect:.1e})")
