"""Train the three bundled QGAN tasks and print final divergences.

    python scripts/run_tasks.py --out-dir runs/tasks --seeds 0 1 2
"""
import argparse
import json
from pathlib import Path

from qcgen.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="runs/tasks")
    parser.add_argument("--tasks", nargs="+", default=["task1", "task3", "task2"])
    parser.add_argument("--seeds", nargs="+", type=int, default=[0])
    args = parser.parse_args()

    print("task\tseed\tjs\ttv\tmean\tstd\ttarget_mean\ttarget_std")
    for task in args.tasks:
        for seed in args.seeds:
            out = Path(args.out_dir) / f"{task}-seed{seed}"
            rc = cli_main(["train-qgan", task, "--out-dir", str(out), "--seed", str(seed), "--quiet"])
            if rc:
                print(f"{task}\t{seed}\tfailed (exit {rc})")
                continue
            s = json.loads((out / "summary.json").read_text())
            print(f"{task}\t{seed}\t{s['js']:.5f}\t{s['tv']:.5f}\t{s['mean']:.3f}\t{s['std']:.3f}"
                  f"\t{s['target_mean']:.3f}\t{s['target_std']:.3f}", flush=True)


if __name__ == "__main__":
    main()
