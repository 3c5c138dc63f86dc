"""Teacher-student MLE over a range of seeds; writes a CSV of final KL values."""
import argparse
import csv
import sys
import time

import numpy as np

from qcgen.ansatz import build_ansatz, evaluate
from qcgen.datasets import dataset_from_distribution, kl
from qcgen.mle import TrainConfig, train_mle
from qcgen.sampling import make_rng
from qcgen.statevector import probabilities


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=3)
    parser.add_argument("--layers", type=int, default=2)
    parser.add_argument("--teacher-seed", type=int, default=100)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--samples", type=int, default=5000)
    parser.add_argument("--iterations", type=int, default=500)
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--lr", type=float, default=0.05)
    parser.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = parser.parse_args()

    ansatz = build_ansatz(args.qubits, args.layers)
    teacher = make_rng(args.teacher_seed).uniform(0, 2 * np.pi, ansatz.parameter_count)
    target = probabilities(evaluate(ansatz, teacher))

    f = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["seed", "kl", "final_nll", "seconds"])
    for seed in range(args.seeds):
        data = dataset_from_distribution(target, args.samples, seed=10_000 + seed)
        cfg = TrainConfig(iterations=args.iterations, batch_size=args.batch_size, learning_rate=args.lr, seed=seed)
        t0 = time.perf_counter()
        params, hist = train_mle(ansatz, data, cfg)
        w.writerow([seed, kl(target, probabilities(evaluate(ansatz, params))), hist.losses[-1],
                    round(time.perf_counter() - t0, 2)])
        f.flush()
    if f is not sys.stdout:
        f.close()


if __name__ == "__main__":
    main()
