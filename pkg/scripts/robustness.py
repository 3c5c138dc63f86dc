"""JS shift of a trained generator under Gaussian parameter noise, for several noise levels."""
import argparse

import numpy as np

from qcgen.ansatz import evaluate
from qcgen.cli import resolve
from qcgen.datasets import js
from qcgen.io import read_params
from qcgen.qgan import perturb_params
from qcgen.statevector import probabilities


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("params", nargs="?", default="task1_params", help="params file or bundled name")
    parser.add_argument("--sigmas", nargs="+", type=float, default=[0.001, 0.01, 0.05, 0.1, 0.3])
    parser.add_argument("--draws", type=int, default=20)
    args = parser.parse_args()

    ansatz, params, _ = read_params(resolve(args.params, ".txt"))
    base = probabilities(evaluate(ansatz, params))
    print("sigma\tmean_js\tmax_js")
    for sigma in args.sigmas:
        shifts = [js(base, probabilities(evaluate(ansatz, perturb_params(params, sigma, seed))))
                  for seed in range(args.draws)]
        print(f"{sigma:g}\t{np.mean(shifts):.3e}\t{np.max(shifts):.3e}")


if __name__ == "__main__":
    main()
