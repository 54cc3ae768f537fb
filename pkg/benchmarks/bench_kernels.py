"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--sweeps N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from mcemdsp import _pykernels
from mcemdsp.engine import _REACHABLE_U8
from mcemdsp.genetics import STATE_PROBS
from mcemdsp.sampler import DEFAULT_PAIRS
from mcemdsp.simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset

try:
    from mcemdsp import _ckernels
except ImportError:
    _ckernels = None


def sweep_inputs(n_sweeps, seed=0):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(1, 8, 9)
    pairs = np.array(DEFAULT_PAIRS, dtype=np.int64)
    betas = np.column_stack([rng.beta(alpha[i], alpha[j], n_sweeps) for i, j in pairs])
    log_u = np.log(rng.random((n_sweeps, len(pairs))))
    counts = rng.integers(0, 60, 9).astype(float)
    h = rng.uniform(0.01, 0.05, 9)
    return rng.dirichlet(alpha), counts, h, float(counts.sum()), pairs, betas, log_u


def objective_inputs(n_samples, seed=0):
    rng = np.random.default_rng(seed)
    data = simulate_dataset(DISEASE_MODELS[7], SCENARIOS[4], 500, True, seed=seed)
    a_idx, a_cnt, b_idx, b_cnt = data.term_counts
    z = rng.dirichlet(np.full(9, 5.0), size=n_samples)
    params = np.array([0.05, 1, 3, 3, 2, 2.0])
    return (params, STATE_PROBS, _REACHABLE_U8, a_idx, a_cnt, b_idx, b_cnt, float(len(data)), z, np.empty(0))


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"{label:<32s}{best * 1e3:10.2f} ms")
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweeps", type=int, default=20000)
    ap.add_argument("--samples", type=int, default=10000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    z, counts, h, n, pairs, betas, log_u = sweep_inputs(args.sweeps)
    burn = args.sweeps // 10
    out = np.empty((args.sweeps - burn, 9))
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    times = {}
    for name, mod in backends:
        times["mh", name] = bench(f"mh_sweeps [{name}]",
                                  lambda mod=mod: mod.mh_sweeps(z.copy(), counts, h, n, pairs, betas, log_u,
                                                                burn, 1, out), args.repeat)
    obj = objective_inputs(args.samples)
    for name, mod in backends:
        times["obj", name] = bench(f"theta_objective [{name}]", lambda mod=mod: mod.theta_objective(*obj),
                                   args.repeat)
    if _ckernels:
        for kind in ("mh", "obj"):
            print(f"speed-up {kind}: {times[kind, 'python'] / times[kind, 'cython']:.1f}x")
    else:
        print("compiled extension not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
