"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the measured
quantity; the lines are repeated in the pytest terminal summary. Running
this file directly (``python tests/test_acceptance.py``) prints the same
lines without pytest.
"""

import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import ACCEPTANCE_LINES, central_diff, rand_sp, rel_err  # noqa: E402
from sympman import experiments as ex  # noqa: E402
from sympman import matfun as mf  # noqa: E402
from sympman import optim as op  # noqa: E402
from sympman import sp_grassmann as gr  # noqa: E402
from sympman import sp_group as sg  # noqa: E402
from sympman import sp_stiefel as st  # noqa: E402


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def horizontal_h(rng, u):
    w = rng.standard_normal(u.shape)
    h = w - u @ (mf.symplectic_inverse(u) @ w)
    return h / np.linalg.norm(h)


def pseudo_of(tan):
    """Pseudo-horizontal lift of the bracket of a Riemannian-horizontal tangent."""
    u = tan.base
    h = tan.mat + u @ (mf.symplectic_inverse(tan.mat) @ u)
    return gr.pseudo_tangent(u, h)


# 1. reduced formulas agree with their dense counterparts

def criterion_1():
    rng = mf.make_rng(1001)
    start = time.perf_counter()
    worst = {}
    for _ in range(50):
        u = mf.rand_stiefel_point(rng, 16, 2)
        d = mf.rand_stiefel_tangent(rng, u)
        h = horizontal_h(rng, u)
        p = gr.GrPoint(u)
        gp = gr.pseudo_tangent(u, h)
        gm = gr.riem_tangent(u, h)
        gam = gr.bracket_from_tangent(gp)
        t = rng.uniform(0.1, 1.0)
        errs = {
            "exp_h_st": np.linalg.norm(st.exp_h_st_reduced(u, d, t) - st.exp_h_st_full(u, d, t)),
            "exp_g_st": np.linalg.norm(st.exp_g_st_reduced(u, d, t) - st.exp_g_st_full(u, d, t)),
            "cayley_st": np.linalg.norm(st.cayley_retract(u, d, t) - st.cayley_retract_full(u, d, t)),
            "exp_h_gr": np.linalg.norm(gr.exp_h_gr(p, gp, t).proj - gr.exp_h_gr_proj(p, gam, t)),
            "exp_g_gr": np.linalg.norm(gr.exp_g_gr_reduced(u, gm, t).rep
                                       - gr.exp_g_gr_full(u, gm, t).rep),
            "cayley_gr": np.linalg.norm(gr.cayley_retract_gr(u, gp, t).proj
                                        - gr.cayley_retract_gr_proj(p, gam, t)),
        }
        for key, val in errs.items():
            worst[key] = max(worst.get(key, 0.0), val)
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    ok = top <= 1e-8 and elapsed < 30
    return report(1, ok, f"max reduced-vs-full error {top:.2e} (<= 1e-8), {elapsed:.1f}s (< 30s)")


# 2. curve axioms

def _group_curves(rng):
    m = rand_sp(rng, 10, scale=0.5)
    om = mf.rand_hamiltonian(rng, 10)
    x = sg.GroupTangent.from_algebra(m, om)
    x = sg.GroupTangent(m, x.mat / np.linalg.norm(x.mat))
    for name, fn in (("exp_h", sg.exp_h), ("exp_g", sg.exp_g)):
        yield name, m, x.mat, (lambda t, fn=fn: fn(m, x, t))


def _stiefel_curves(rng, n, k):
    u = mf.rand_stiefel_point(rng, n, k)
    d = mf.rand_stiefel_tangent(rng, u)
    for fn in (st.exp_h_st_reduced, st.exp_g_st_reduced, st.cayley_retract,
               st.quasi_geodesic_retract):
        yield fn.__name__, u, d.mat, (lambda t, fn=fn: fn(u, d, t))
    h = horizontal_h(rng, u)
    p = gr.GrPoint(u)
    gp = gr.pseudo_tangent(u, h)
    gm = gr.riem_tangent(u, h)
    gm = gm.scaled(1.0 / np.linalg.norm(gm.mat))
    yield "exp_h_gr", u, gp.mat, lambda t: gr.exp_h_gr(p, gp, t).rep
    yield "exp_g_gr_reduced", u, gm.mat, lambda t: gr.exp_g_gr_reduced(u, gm, t).rep
    yield "cayley_retract_gr", u, gp.mat, lambda t: gr.cayley_retract_gr(u, gp, t).rep


def criterion_2():
    rng = mf.make_rng(1002)
    start_err = vel_err = feas = 0.0
    curves = list(_group_curves(rng)) + list(_stiefel_curves(rng, 50, 5))
    for name, base, delta, curve in curves:
        start_err = max(start_err, np.linalg.norm(curve(0.0) - base))
        vel_err = max(vel_err, rel_err(central_diff(curve, 1e-5), delta))
        for t in (0.5, 1.0, 2.0):
            feas = max(feas, mf.feasibility(curve(t)))
    ok = start_err <= 1e-12 and vel_err <= 1e-6 and feas <= 1e-9
    return report(2, ok, f"{len(curves)} curves: |g(0)-base| {start_err:.1e} (<= 1e-12), "
                         f"velocity rel err {vel_err:.1e} (<= 1e-6), feasibility {feas:.1e} (<= 1e-9)")


# 3. inverse maps

def criterion_3():
    rng = mf.make_rng(1003)
    st_err = gr_err = 0.0
    for _ in range(50):
        u = mf.rand_stiefel_point(rng, 20, 3)
        d = mf.rand_stiefel_tangent(rng, u).scaled(0.5)
        v = st.cayley_retract(u, d, 1.0)
        st_err = max(st_err, np.linalg.norm(st.cayley_inverse(u, v).mat - d.mat))
        st_err = max(st_err, np.linalg.norm(st.cayley_retract(u, st.cayley_inverse(u, v), 1.0) - v))

        p = gr.GrPoint(u)
        gp = gr.pseudo_tangent(u, 0.5 * horizontal_h(rng, u))
        gam0 = gr.bracket_from_tangent(gp)
        # log o exp and exp o log
        f = gr.exp_h_gr(p, gp, 1.0)
        gam = gr.log_h_gr(p, f)
        gr_err = max(gr_err, np.linalg.norm(gam - gam0))
        gr_err = max(gr_err, gr.projector_distance(gr.exp_h_gr(p, gr.hor_lift_pseudo(p, gam)), f))
        # projector-level inverse retraction
        f = gr.cayley_retract_gr(u, gp, 1.0)
        gam = gr.cayley_inverse_gr_proj(p, f)
        gr_err = max(gr_err, np.linalg.norm(gam - gam0))
        gr_err = max(gr_err, gr.projector_distance(
            gr.cayley_retract_gr(u, gr.hor_lift_pseudo(p, gam), 1.0), f))
        # lifted inverse retraction, from a different representative of F
        rep = f.rep @ rand_sp(rng, 3)
        tan = gr.cayley_inverse_gr_lifted(u, rep)
        gr_err = max(gr_err, np.linalg.norm(tan.h - gp.h))
        gr_err = max(gr_err, gr.projector_distance(gr.cayley_retract_gr(u, tan, 1.0), f))
    ok = st_err <= 1e-9 and gr_err <= 1e-7
    return report(3, ok, f"Stiefel Cayley round trip {st_err:.1e} (<= 1e-9), "
                         f"Grassmann log/inverse round trips {gr_err:.1e} (<= 1e-7)")


# 4. gradients

def criterion_4():
    rng = mf.make_rng(1004)
    n, k = 20, 3
    u = mf.rand_stiefel_point(rng, n, k)
    near = op.nearest_symplectic_problem(op.nearest_target(rng, n, k))
    s, _ = op.subspace_data(rng, n, k)
    sub = op.subspace_fit_problem(s)
    compat = slope = 0.0
    cases = [("g_st", near), ("g_st", sub), ("g_gr", sub)]
    for kind, prob in cases:
        egrad = prob.euclid_grad(u)
        if kind == "g_st":
            grad = st.grad_g_st(u, egrad)
        else:
            grad = gr.grad_g_gr(u, egrad)
        for i in range(20):
            if kind == "g_st":
                d = mf.rand_stiefel_tangent(rng, u)
                lhs = st.metric_g_st(grad, d)
            else:
                d = gr.riem_tangent(u, horizontal_h(rng, u))
                lhs = gr.metric_g_gr(grad, d)
            rhs = float(np.sum(egrad * d.mat))
            compat = max(compat, abs(lhs - rhs) / abs(rhs))
            if i < 5:
                eps = 1e-6
                if kind == "g_st":
                    fp = prob.objective(st.cayley_retract(u, d, eps))
                    fm = prob.objective(st.cayley_retract(u, d, -eps))
                else:
                    pd = pseudo_of(d)
                    fp = prob.objective(gr.cayley_retract_gr(u, pd, eps).rep)
                    fm = prob.objective(gr.cayley_retract_gr(u, pd, -eps).rep)
                fd = (fp - fm) / (2 * eps)
                slope = max(slope, abs(fd - lhs) / abs(lhs))
    ok = compat <= 1e-8 and slope <= 1e-4
    return report(4, ok, f"metric compatibility rel err {compat:.1e} (<= 1e-8), "
                         f"finite-difference slope rel err {slope:.1e} (<= 1e-4)")


# 5. feasibility experiment

def criterion_5():
    cfg = ex.ExperimentConfig("feasibility", n=100, k=10, seed=0, runs=10,
                              t_max=1e3, t_samples=500)
    res = ex.run_feasibility(cfg)
    ts = np.array([row[0] for row in res.rows])
    table = np.array([row[1:] for row in res.rows])
    names = res.header[1:]
    cay = table[:, names.index("cayley")]
    cay_max = float(np.max(cay))
    tail = ts >= 1e2
    ratios = {}
    for j, name in enumerate(names):
        if name == "cayley":
            continue
        col = table[tail, j]
        worst = float(np.max(np.where(np.isnan(col), -np.inf, col)))
        ratios[name] = worst / cay_max
    ok = cay_max <= 1e-6 and all(r >= 1e3 for r in ratios.values())
    low = min(ratios.values())
    return report(5, ok, f"Cayley max {cay_max:.1e} (<= 1e-6), smallest expm/Cayley ratio "
                         f"for t >= 1e2 {low:.1e} (>= 1e3)")


# 6. nearest symplectic matrix

def criterion_6():
    cfg = ex.ExperimentConfig("nearest", n=100, k=10, seed=0, runs=10,
                              retractions=("geodesic", "cayley"), metrics=("stiefel",))
    start = time.perf_counter()
    res = ex.run_nearest(cfg)
    elapsed = time.perf_counter() - start
    rows = {r[0]: r for r in res.summary_rows}
    all_conv = all(r[3] == cfg.runs for r in rows.values())
    max_it = max(r[2] for r in rows.values())
    dev = max(r[5] for r in rows.values())
    mono = all(r[6] for r in rows.values())
    ok = all_conv and max_it <= 100 and dev <= 1e-10 and mono and elapsed < 60
    return report(6, ok, f"converged {all_conv}, max iters {max_it} (<= 100), max rel dev "
                         f"{dev:.1e} (<= 1e-10), monotone {mono}, {elapsed:.1f}s (< 60s)")


# 7. subspace fit

def criterion_7():
    cfg = ex.ExperimentConfig("subspace", n=100, k=10, seed=0, runs=10)
    start = time.perf_counter()
    res = ex.run_subspace(cfg)
    clean = ex.run_subspace(ex.ExperimentConfig("subspace", n=100, k=10, seed=0, runs=10,
                                                noise=0.0))
    elapsed = time.perf_counter() - start
    rows = res.summary_rows
    all_conv = all(r[3] == cfg.runs for r in rows)
    max_it = max(r[2] for r in rows)
    dev = max(r[5] for r in rows)
    clean_conv = all(r[3] == cfg.runs for r in clean.summary_rows)
    # the trace holds f(U_k) before each step; the summary holds f after the last step
    clean_f = max(r[4] for r in clean.summary_rows)
    ok = (all_conv and clean_conv and max_it <= 100 and dev <= 1e-8 and clean_f <= 1e-10
          and elapsed < 120)
    return report(7, ok, f"{len(rows)} methods converged {all_conv}, max iters {max_it} "
                         f"(<= 100), max rel dev {dev:.1e} (<= 1e-8), noise-free final f "
                         f"{clean_f:.1e} (<= 1e-10), {elapsed:.1f}s (< 120s)")


# 8. quotient invariance

def criterion_8():
    rng = mf.make_rng(1008)
    worst = 0.0
    s, _ = op.subspace_data(rng, 20, 3)
    prob = op.subspace_fit_problem(s)
    for _ in range(10):
        u = mf.rand_stiefel_point(rng, 20, 3)
        n = rand_sp(rng, 3, scale=1.0)
        un = u @ n
        h = horizontal_h(rng, u)
        p, pn = gr.GrPoint(u), gr.GrPoint(un)
        gp, gpn = gr.pseudo_tangent(u, h), gr.pseudo_tangent(un, h @ n)
        gm, gmn = gr.riem_tangent(u, h), gr.riem_tangent(un, h @ n)
        for t in (0.25, 0.5, 1.0):
            worst = max(worst, gr.projector_distance(gr.exp_h_gr(p, gp, t), gr.exp_h_gr(pn, gpn, t)))
            worst = max(worst, gr.projector_distance(gr.exp_g_gr_reduced(u, gm, t),
                                                     gr.exp_g_gr_reduced(un, gmn, t)))
            worst = max(worst, gr.projector_distance(gr.cayley_retract_gr(u, gp, t),
                                                     gr.cayley_retract_gr(un, gpn, t)))
        f0 = prob.objective(u)
        worst = max(worst, abs(prob.objective(un) - f0) / (1 + abs(f0)))
    ok = worst <= 1e-8
    return report(8, ok, f"max representative dependence {worst:.1e} (<= 1e-8)")


# 9. determinism

def criterion_9():
    commands = [
        ["feasibility", "--n", "20", "--k", "3", "--runs", "3", "--t-samples", "60"],
        ["nearest", "--n", "20", "--k", "3", "--runs", "3"],
        ["subspace", "--n", "20", "--k", "3", "--runs", "3"],
    ]
    identical = True
    with tempfile.TemporaryDirectory() as tmp:
        for cmd in commands:
            blobs = []
            for rep, threads in enumerate(("1", "3")):
                out = os.path.join(tmp, f"{cmd[0]}{rep}.csv")
                env = dict(os.environ, SYMPMAN_THREADS=threads)
                proc = subprocess.run([sys.executable, "-m", "sympman", *cmd, "--out", out],
                                      capture_output=True, env=env)
                if proc.returncode != 0:
                    identical = False
                    continue
                with open(out, "rb") as fh, open(out + ".summary.csv", "rb") as gh:
                    blobs.append(fh.read() + gh.read())
            identical = identical and len(blobs) == 2 and blobs[0] == blobs[1]
    return report(9, identical, f"repeated CLI runs byte-identical: {identical}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
