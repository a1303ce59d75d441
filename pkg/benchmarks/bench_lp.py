#!/usr/bin/env python3
"""Benchmark the active-set LP kernel: numba against the numpy fallback.

The solver source is identical on both paths; the backend is chosen at
import time from INTRINSQ_BACKEND, so each path runs in a fresh
subprocess.  Representative instances mirror the square-function inner
loop: standard unit-ball node sets with quadrature-weighted random
objectives.

Usage: python benchmarks/bench_lp.py [--repeats 20]
"""

import argparse
import json
import os
import subprocess
import sys
import time

SIZES = [(1, 15), (1, 21), (1, 50), (2, 45)]

_WORKER = """
import json, os, sys, time
sys.path.insert(0, {src!r})
import numpy as np
from intrinsq.backend import active_backend
from intrinsq.lp import kernel_geometry, solve_kernel_lp

repeats = {repeats}
out = {{"backend": active_backend(), "rows": []}}
rng = np.random.default_rng(7)
for dim, m in {sizes}:
    nodes, vols, A, b = kernel_geometry(dim, m, 0.5)
    c = rng.normal(size=len(nodes)) * vols
    solve_kernel_lp(A, b, c)  # warm-up / compile
    t0 = time.perf_counter()
    iters = 0
    for _ in range(repeats):
        c = rng.normal(size=len(nodes)) * vols
        _, _, it = solve_kernel_lp(A, b, c)
        iters += it
    dt = (time.perf_counter() - t0) / repeats
    out["rows"].append({{"dim": dim, "m": int(len(nodes)),
                         "ms_per_solve": dt * 1e3,
                         "avg_iters": iters / repeats}})
print(json.dumps(out))
"""


def run_backend(backend: str, repeats: int) -> dict:
    src = os.path.join(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__))), "src")
    env = dict(os.environ, INTRINSQ_BACKEND=backend)
    code = _WORKER.format(src=src, repeats=repeats, sizes=SIZES)
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()
    results = {}
    for backend in ("numpy", "numba"):
        print(f"timing {backend} backend ...", flush=True)
        t0 = time.time()
        results[backend] = run_backend(backend, args.repeats)
        print(f"  done in {time.time() - t0:.1f}s "
              f"(includes interpreter start and compile)")
    print(f"\n{'dim':>4} {'nodes':>6} {'numpy ms':>10} {'numba ms':>10} "
          f"{'speedup':>8}")
    for row_np, row_nb in zip(results["numpy"]["rows"],
                              results["numba"]["rows"]):
        speed = row_np["ms_per_solve"] / row_nb["ms_per_solve"]
        print(f"{row_np['dim']:>4} {row_np['m']:>6} "
              f"{row_np['ms_per_solve']:>10.3f} "
              f"{row_nb['ms_per_solve']:>10.3f} {speed:>7.1f}x")
    if results["numba"]["backend"] != "numba":
        print("warning: numba unavailable; both columns ran the fallback")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
