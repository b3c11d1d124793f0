"""Curves on the symplectic Stiefel manifold.

Start at a random point U and a unit tangent Delta, then compare the four
curves the package offers: the pseudo-Riemannian geodesic, the Riemannian
geodesic, the Cayley retraction and the quasi-geodesic. All of them leave
U in direction Delta; they differ in cost and in how long they stay on
the manifold in floating point.
"""

import time

import numpy as np

from sympman import matfun as mf
from sympman import sp_stiefel as st

rng = mf.make_rng(7)
n, k = 60, 6
u = mf.rand_stiefel_point(rng, n, k)
d = mf.rand_stiefel_tangent(rng, u)
print(f"U is {u.shape[0]}x{u.shape[1]}, feasibility {mf.feasibility(u):.1e}")
print(f"Delta = U A + H with ||A|| = {np.linalg.norm(d.a):.3f}, ||H|| = {np.linalg.norm(d.h):.3f}")

curves = {
    "pseudo geodesic": st.exp_h_st_reduced,
    "riem geodesic": st.exp_g_st_reduced,
    "cayley": st.cayley_retract,
    "quasi geodesic": st.quasi_geodesic_retract,
}

# each curve passes through U with velocity Delta
eps = 1e-5
print("\ninitial velocity error (central differences)")
for name, curve in curves.items():
    vel = (curve(u, d, eps) - curve(u, d, -eps)) / (2 * eps)
    print(f"  {name:16s} {np.linalg.norm(vel - d.mat):.1e}")

# the reduced formulas only touch 2n x 2k data; the dense versions
# exponentiate a 2n x 2n matrix
print("\nreduced vs dense evaluation at t = 1")
pairs = [
    ("pseudo geodesic", st.exp_h_st_reduced, st.exp_h_st_full),
    ("riem geodesic", st.exp_g_st_reduced, st.exp_g_st_full),
    ("cayley", st.cayley_retract, st.cayley_retract_full),
]
for name, small, big in pairs:
    t0 = time.perf_counter()
    a = small(u, d, 1.0)
    t1 = time.perf_counter()
    b = big(u, d, 1.0)
    t2 = time.perf_counter()
    print(f"  {name:16s} diff {np.linalg.norm(a - b):.1e}   "
          f"reduced {1e3 * (t1 - t0):6.2f} ms   dense {1e3 * (t2 - t1):6.2f} ms")

# walking along the curves
print("\nfeasibility ||U(t)^+ U(t) - I||_F along each curve")
print("  t      " + "  ".join(f"{name:>15s}" for name in curves))
for t in (0.1, 1.0, 10.0, 50.0):
    vals = [mf.feasibility(curve(u, d, t)) for curve in curves.values()]
    print(f"  {t:<6g} " + "  ".join(f"{v:15.2e}" for v in vals))

# the Cayley retraction has a closed-form inverse
v = st.cayley_retract(u, d, 0.8)
back = st.cayley_inverse(u, v)
print(f"\ncayley inverse recovers 0.8*Delta to {np.linalg.norm(back.mat - 0.8 * d.mat):.1e}")
