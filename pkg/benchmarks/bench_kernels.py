"""Time the candidate-metrics kernel and a full coordinate sweep per backend.

    python benchmarks/bench_kernels.py [--repeat 20] [--M 40 --m0 10 --N 4]
"""

import argparse
import timeit

import numpy as np

from fasisac import kernels
from fasisac.ao import fixed_port_baseline
from fasisac.config import SystemConfig
from fasisac.geometry import full_response, steering_phase_step
from fasisac.search import coordinate_sweep, initial_selection


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--M", type=int, default=40)
    ap.add_argument("--m0", type=int, default=10)
    ap.add_argument("--N", type=int, default=4)
    args = ap.parse_args(argv)

    cfg = SystemConfig(M=args.M, m0=args.m0, N=args.N)
    sel = np.array(initial_selection(cfg.M, cfg.m0), dtype=np.int64)
    W = fixed_port_baseline(cfg).W
    G_full, psi = full_response(cfg), steering_phase_step(cfg)
    # widest gap so one call sees many candidates
    cands = np.arange(1, cfg.M + 1, dtype=np.int64)
    cands = cands[(cands == sel[0]) | ~np.isin(cands, sel)]
    cands = cands[cands < sel[1]] if cfg.m0 > 1 else cands

    print(f"M={cfg.M} m0={cfg.m0} N={cfg.N}, {cands.size} candidates per kernel call, "
          f"default backend: {kernels.BACKEND}")
    base = {}
    for name in kernels.available_backends():
        kern = min(timeit.repeat(
            lambda: kernels.candidate_metrics(G_full, W, sel, 0, cands, psi, cfg.sigma2_mW, backend=name),
            number=50, repeat=args.repeat)) / 50
        sweep = min(timeit.repeat(lambda: coordinate_sweep(sel, W, cfg, backend=name),
                                  number=1, repeat=args.repeat))
        base.setdefault("kernel", kern)
        base.setdefault("sweep", sweep)
        print(f"{name:>7}: kernel {kern * 1e6:9.1f} us/call ({base['kernel'] / kern:5.1f}x)  "
              f"sweep {sweep * 1e3:8.3f} ms ({base['sweep'] / sweep:5.1f}x)")


if __name__ == "__main__":
    main()
