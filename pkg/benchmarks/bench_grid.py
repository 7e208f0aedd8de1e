"""Time the raster evaluator on the numba and numpy backends.

    python benchmarks/bench_grid.py --resolution 1 --repeat 5

Both backends are checked against each other before timing.
"""
import argparse
import time

import numpy as np

from radioplan import _kernels
from radioplan.config import bundled_config_path, load_config
from radioplan.coverage import evaluate_grid
from radioplan.report import build_scenario


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(bundled_config_path()))
    ap.add_argument("--resolution", type=float, default=1.0, help="grid step in m")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    cfg = load_config(args.config)
    scenario, _, _ = build_scenario(cfg)
    scenario = type(scenario)(scenario.polygon, args.resolution, scenario.bs_sites,
                              scenario.ris_panels, scenario.ntn_overlay, scenario.ue,
                              scenario.coeffs)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])

    ref = evaluate_grid(scenario, backend="numpy")
    print(f"cells: {len(ref)}, sources: {len(ref.source_names)}")
    for b in backends:
        g = evaluate_grid(scenario, backend=b)  # also warms up the JIT
        dev = float(np.max(np.abs(g.sinr - ref.sinr)))
        t = best_of(lambda: evaluate_grid(scenario, backend=b), args.repeat)
        print(f"{b:>6}: {t * 1e3:8.2f} ms  ({len(ref) / t / 1e6:.2f} Mcell/s), "
              f"max |dSINR| vs numpy {dev:.1e} dB")
    if not _kernels.HAVE_NUMBA:
        print("numba not installed; install the 'jit' extra to compare")


if __name__ == "__main__":
    main()
