"""Time the pure-Python and compiled simulation kernels on the same runs.

Usage::

    python benchmarks/bench_backends.py [--rounds N] [--repeats K]

The benchmark runs the adaptive-learning dynamic on a representative
two-game environment with both kernels, checks that the trajectories agree
exactly (the compiled kernel is required to be a bit-for-bit twin, not an
approximation), and prints per-run wall-clock times with the speedup.

The inner loop being compared is the per-round best-reply computation:
for every agent, a gradient/candidate search over behavioral action
vectors and rational weights against the sampled opponent pool. That is
where essentially all simulation time goes, which is why the kernel
boundary sits there.
"""

import argparse
import math
import statistics
import sys
import time

from prefevo import (
    Environment,
    GameParams,
    PenaltyConfig,
    SimConfig,
    backend,
    run,
)


def make_config(rounds: int, seed: int) -> SimConfig:
    env = Environment.pair(GameParams(kappa=-0.5), GameParams(kappa=0.5),
                           p=0.5)
    return SimConfig(
        env=env,
        pc=PenaltyConfig(eps_r=1e-5, eps_p=0.002),
        rounds=rounds,
        seed=seed,
    )


def time_backend(name: str, rounds: int, repeats: int):
    backend.set_backend(name)
    times = []
    trajs = []
    for rep in range(repeats):
        cfg = make_config(rounds, seed=rep)
        t0 = time.perf_counter()
        traj = run(cfg)
        times.append(time.perf_counter() - t0)
        trajs.append(traj)
    return times, trajs


def same_trajectory(a, b) -> bool:
    if a.final_kind != b.final_kind:
        return False
    if a.populations != b.populations:
        return False
    if a.welfare_last_two != b.welfare_last_two:
        return False
    fa, fb = a.final_mean_alpha, b.final_mean_alpha
    if math.isnan(fa) != math.isnan(fb):
        return False
    return math.isnan(fa) or fa == fb


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=30)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    names = backend.available()
    print(f"backends available: {', '.join(names)}")
    if "compiled" not in names:
        print("compiled kernel not built; timing python only", file=sys.stderr)

    results = {}
    for name in names:
        times, trajs = time_backend(name, args.rounds, args.repeats)
        results[name] = (times, trajs)
        mean = statistics.mean(times)
        print(f"{name:>9}: {mean * 1e3:8.1f} ms/run  "
              f"(min {min(times) * 1e3:.1f}, max {max(times) * 1e3:.1f}, "
              f"{args.repeats} runs x {args.rounds} rounds)")

    if "compiled" in results and "python" in results:
        _, t_py = results["python"]
        _, t_c = results["compiled"]
        agree = all(same_trajectory(a, b) for a, b in zip(t_py, t_c))
        print(f"trajectories identical: {agree}")
        if not agree:
            print("MISMATCH between kernels; benchmark void", file=sys.stderr)
            return 1
        speedup = (statistics.mean(results["python"][0])
                   / statistics.mean(results["compiled"][0]))
        print(f"speedup (python / compiled): {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
