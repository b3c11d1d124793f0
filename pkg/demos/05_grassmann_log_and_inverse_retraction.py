"""Going back: the geodesic endpoint map and inverse Cayley retractions.

On the symplectic Grassmannian a tangent vector at P is a bracket
Gamma = [Omega, P]. Walking along the pseudo-Riemannian geodesic (or the
Cayley retraction) for unit time lands on F; the log and the inverse
retractions recover Gamma from the pair (P, F).
"""

import numpy as np

from sympman import matfun as mf
from sympman import sp_grassmann as gr

rng = mf.make_rng(5)
n, k = 30, 3
u = mf.rand_stiefel_point(rng, n, k)
p = gr.GrPoint(u)

w = rng.standard_normal(u.shape)
h = w - u @ (mf.symplectic_inverse(u) @ w)
h *= 0.4 / np.linalg.norm(h)
tan = gr.pseudo_tangent(u, h)
gamma = gr.bracket_from_tangent(tan)
print(f"tangency residual of Gamma: {gr.tangent_residual(p, gamma):.1e}")

# geodesic and its endpoint map
f = gr.exp_h_gr(p, tan, 1.0)
print(f"\n||P - F|| after the geodesic step: {gr.projector_distance(p, f):.4f}")
gamma_log = gr.log_h_gr(p, f)
print(f"log recovers Gamma to {np.linalg.norm(gamma_log - gamma):.1e}")

# Cayley retraction and both inverses
f = gr.cayley_retract_gr(u, tan, 1.0)
gamma_inv = gr.cayley_inverse_gr_proj(p, f)
print(f"\nprojector inverse of the Cayley retraction: error {np.linalg.norm(gamma_inv - gamma):.1e}")

# hand the lifted inverse a different basis of the same subspace
om = mf.rand_hamiltonian(rng, k)
other = f.rep @ mf.expm(om / np.linalg.norm(om))
lifted, big_n = gr.cayley_inverse_gr_lifted(u, other, return_n=True)
print(f"lifted inverse: ||H - H_true|| = {np.linalg.norm(lifted.h - h):.1e}, "
      f"N symplectic to {mf.feasibility(big_n):.1e}")

# the log is only guaranteed near P; a distant subspace may or may not be reachable
far = gr.GrPoint(mf.rand_stiefel_point(rng, n, k, scale="cay_one") @ mf.expm(3 * om / np.linalg.norm(om)))
try:
    gr.log_h_gr(p, far)
    print("\nlog of a distant subspace succeeded")
except Exception as exc:
    print(f"\nlog of a distant subspace: {type(exc).__name__}: {exc}")
