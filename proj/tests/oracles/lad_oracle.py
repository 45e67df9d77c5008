"""Frozen least-absolute-deviation plane fits.

    minimize sum_i |a x_i + b y_i + d + z_i|

as a linear program (HiGHS). Writes tests/data/lad_instances.json.
"""
import json
import pathlib

import numpy as np
from scipy.optimize import linprog

rng = np.random.default_rng(77)
instances = []
for k in range(12):
    m = int(rng.integers(40, 501))
    x = rng.uniform(0, 200, m)
    y = rng.uniform(0, 200, m)
    a, b, d = rng.normal(0, 0.05), rng.normal(0, 0.05), rng.uniform(-30, 30)
    z = -(a * x + b * y + d) + rng.normal(0, 0.5, m)
    frac = [0.1, 0.2, 0.3][k % 3]
    bad = rng.choice(m, size=int(round(frac * m)), replace=False)
    z[bad] += rng.uniform(10, 60, bad.size) * rng.choice([-1, 1], bad.size)

    # variables: a, b, d, t_1..t_m ; |A p + z| <= t
    A = np.column_stack([x, y, np.ones(m)])
    c = np.concatenate([np.zeros(3), np.ones(m)])
    a_ub = np.block([[A, -np.eye(m)], [-A, -np.eye(m)]])
    b_ub = np.concatenate([-z, z])
    bounds = [(None, None)] * 3 + [(0, None)] * m
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    p = res.x[:3]
    objective = float(np.sum(np.abs(A @ p + z)))
    instances.append({"x": x.tolist(), "y": y.tolist(), "z": z.tolist(),
                      "outlier_fraction": frac, "a": p[0], "b": p[1], "d": p[2],
                      "objective": objective})

out = pathlib.Path(__file__).resolve().parents[1] / "data" / "lad_instances.json"
out.write_text(json.dumps({"format_version": 1, "instances": instances}))
print(f"wrote {len(instances)} instances to {out}")
