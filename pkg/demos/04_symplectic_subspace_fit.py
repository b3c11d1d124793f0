"""Best symplectic subspace for a data matrix.

Given S = A A^+ + noise, find the 2k-dimensional symplectic subspace that
captures S best, f(U) = ||S - U U^+ S||_F^2. The objective depends on U only
through the projector U U^+, so it lives on the symplectic Grassmannian. We
run the descent with the Grassmann metric and, ignoring the quotient, with
the Stiefel metric.
"""

import numpy as np

from sympman import matfun as mf
from sympman import optim as op
from sympman import sp_grassmann as gr

rng = mf.make_rng(12)
n, k = 100, 10

for noise in (0.0, 1.0):
    s, a = op.subspace_data(rng, n, k, noise=noise)
    u0 = mf.rand_stiefel_point(rng, n, k, scale="cay_half")
    print(f"\nnoise level {noise}: f(U0) = {op.subspace_fit_problem(s).objective(u0):.4f}")
    for mode in ("grassmann_g", "stiefel_g"):
        for retraction in ("geodesic", "cayley"):
            prob = op.subspace_fit_problem(s, mode, retraction)
            state = op.descend(prob, u0)
            dist = gr.projector_distance(gr.GrPoint(state.iterate), gr.GrPoint(a))
            print(f"  {mode:12s} {retraction:9s} iters {state.iter + 1:3d}  "
                  f"f {state.fval:.3e}  ||P - P_A||_F {dist:.2e}")

# f only sees the subspace: right-multiplying by N in Sp(2k) changes nothing
prob = op.subspace_fit_problem(s)
om = mf.rand_hamiltonian(rng, k)
big_n = mf.expm(om / np.linalg.norm(om))
print(f"\n|f(U) - f(U N)| = {abs(prob.objective(u0) - prob.objective(u0 @ big_n)):.1e}")
