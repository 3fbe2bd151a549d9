"""Time the hot kernels under both backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``SPIRALMIN_NO_NUMBA``. Numba timings exclude the first
(compiling) call.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from spiralmin import _kernels, backend_name, catalog, build, interior_grid
from spiralmin.profile import ProfileParams, integrate_profile
from spiralmin.numgeo import _sample
from spiralmin.numgeo import DEFAULT_STEP, DEFAULT_OUTER_STEP

repeat = int(sys.argv[1])

def best(fn):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

L = catalog()["legendrian_circle"]
params = ProfileParams.auto(1, 1, -1, 1.5)
curve = integrate_profile(params, n_joints=2)
prod = build(L, L, curve, validate=False)
pts = interior_grid(prod, density=10, kind="tensor").points
offs = _kernels.stencil_offsets(3, 2, DEFAULT_STEP, DEFAULT_OUTER_STEP)
F = _sample(prod.evaluate, pts, offs)
tq = np.linspace(curve.t_start, curve.t_end, 200_000)

out = {
    "backend": backend_name(),
    "laplacian_reduce (1000 pts, k=3)": best(
        lambda: _kernels.laplacian_reduce(F, 3, 2, DEFAULT_STEP, DEFAULT_OUTER_STEP)),
    "hermite_eval (200k pts)": best(lambda: _kernels.hermite_eval(curve.knots, curve.coef, tq)),
    "integrate_profile (20 joints)": best(lambda: integrate_profile(params, n_joints=20)),
}
print(json.dumps(out))
"""


def run(no_numba, repeat):
    env = dict(os.environ)
    if no_numba:
        env["SPIRALMIN_NO_NUMBA"] = "1"
    else:
        env.pop("SPIRALMIN_NO_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results here")
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    rows = [k for k in fast if k != "backend"]
    width = max(len(r) for r in rows)
    print(f"{'kernel':<{width}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r:<{width}}  {fast[r]:>10.4g}  {slow[r]:>10.4g}  {slow[r] / fast[r]:>8.1f}")
    print(f"(total wall time {time.perf_counter() - t0:.1f} s)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"numba": fast, "numpy": slow}, fh, indent=2)


if __name__ == "__main__":
    main()
