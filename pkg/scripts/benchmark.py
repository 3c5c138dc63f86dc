"""Wall-clock timings for circuit evaluation and parameter-shift Jacobians."""
import argparse
import time

from qcgen.ansatz import build_ansatz, evaluate
from qcgen.gradients import prob_jacobian
from qcgen.sampling import make_rng


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print("what\tqubits\tlayers\tparams\tseconds")
    for n, layers in ((4, 3), (10, 50), (16, 10), (20, 2)):
        a = build_ansatz(n, layers)
        p = make_rng(0).normal(size=a.parameter_count)
        t = _time(lambda: evaluate(a, p), args.repeat)
        print(f"evaluate\t{n}\t{layers}\t{a.parameter_count}\t{t:.4f}", flush=True)
    for n, layers in ((3, 2), (4, 3), (6, 3), (8, 4)):
        a = build_ansatz(n, layers)
        p = make_rng(0).normal(size=a.parameter_count)
        t = _time(lambda: prob_jacobian(a, p), args.repeat)
        print(f"jacobian\t{n}\t{layers}\t{a.parameter_count}\t{t:.4f}", flush=True)


if __name__ == "__main__":
    main()
