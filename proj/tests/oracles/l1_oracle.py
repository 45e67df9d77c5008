"""Frozen reference optima for the complex l1-regularized least-squares problem.

    minimize ||R x - g||^2 + eps * sum_l |x_l|   over complex x

solved with a generic conic solver. Writes tests/data/l1_instances.json.
"""
import json
import pathlib

import cvxpy as cp
import numpy as np

rng = np.random.default_rng(20240611)
instances = []
for k in range(24):
    n = int(rng.integers(6, 16))
    l = int(rng.integers(8, 26))
    r = np.exp(1j * rng.uniform(-np.pi, np.pi, size=(n, l)))
    x0 = np.zeros(l, complex)
    support = rng.choice(l, size=int(rng.integers(1, 4)), replace=False)
    x0[support] = rng.uniform(0.5, 2.0, support.size) * np.exp(1j * rng.uniform(-np.pi, np.pi, support.size))
    g = r @ x0 + 0.1 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    eps = float(rng.uniform(0.05, 1.0) * 2 * np.max(np.abs(r.conj().T @ g)))

    x = cp.Variable(l, complex=True)
    problem = cp.Problem(cp.Minimize(cp.sum_squares(r @ x - g) + eps * cp.norm1(x)))
    problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    xv = x.value
    objective = float(np.sum(np.abs(r @ xv - g) ** 2) + eps * np.sum(np.abs(xv)))
    # Dual certificate: u = scaled residual with max |R^H u| <= eps / 2.
    res = g - r @ xv
    u = res * min(1.0, eps / (2 * np.max(np.abs(r.conj().T @ res))))
    dual = float(-np.vdot(u, u).real + 2 * np.vdot(u, g).real)
    gap = (objective - dual) / objective
    assert gap < 1e-7, (k, gap)
    instances.append({
        "n": n, "l": l,
        "r_re": r.real.ravel(order="F").tolist(), "r_im": r.imag.ravel(order="F").tolist(),
        "g_re": g.real.tolist(), "g_im": g.imag.tolist(),
        "epsilon": eps, "objective": objective,
        "support": sorted(int(i) for i in support),
    })

out = pathlib.Path(__file__).resolve().parents[1] / "data" / "l1_instances.json"
out.write_text(json.dumps({"format_version": 1, "instances": instances}, indent=1))
print(f"wrote {len(instances)} instances to {out}")
