"""
Thin spherical triangles and their chain
========================================

Every triangle Delta_n is CAT(1) and uniformly convex, but the apex a_n
drifts towards the north pole as n grows, so no single modulus serves
all of them.  Glued end to end they form a space that fails uniform
convexity and yet satisfies the weaker radius-wise condition.
"""
import math

from geoergodic import convexity as cx
from geoergodic import geometry as geo

# side lengths against their closed forms
for n in (2, 3, 10, 50):
    t = geo.triangle_data(n)
    print(f"n={n:3d}  d(b,c)={t.d_bc:.6f}  d(a,b)={t.d_ab:.6f}  d(a,m)={t.d_a_mid:.6f}"
          f"  worst residual {max(t.residuals().values()):.1e}")

# as n grows the midpoint of bc sits almost a quarter circle away from a_n
r, eps = math.pi / 2, 2 / 3
for delta in (0.5, 0.25, 0.1, 0.05):
    n = cx.non_uniform_witness(delta)
    print(f"delta={delta:<5} first triangle defeating it: n={n}, "
          f"1 - d(a,m)/r = {1 - math.acos(1 / n) / r:.4f}")

# the chain glues b_n to a_{n+1}; distances add up across gluing points
Y = geo.triangle_chain(10)
c2, c3 = geo.chain_vertex(Y, 2, "c"), geo.chain_vertex(Y, 3, "c")
m = geo.midpoint(Y, c2, c3)
print(f"d(c_2, c_3) = {geo.chain_distance(Y, c2, c3):.7f}; midpoint lies in Delta_{m.component + 1}")

# a single triangle is not Busemann convex: the checker finds a witness
rep = cx.busemann_defect(geo.spherical_triangle(2), 20_000, 0)
print(f"Busemann on Delta_2: {rep.status}, worst defect {rep.worst_defect:.4f}")
