"""Plain-text artifact formats.

* distribution table: ``bitstring<TAB>probability``, one row per outcome,
  sorted by index, after a header row;
* sample/count table: ``bitstring<TAB>count``, rows for nonzero counts;
* params file: header ``# ansatz n_qubits=.. n_layers=.. input_kind=..``
  (plus ``pairs=0-1,1-2,..`` for a non-chain layout)
  followed by one angle (radians) per line;
* history CSVs with fixed column order.

Floats are written with ``repr`` so every file parses back bit-exactly.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .ansatz import LayeredAnsatz, check_params, parse_pairs
from .datasets import Dataset
from .mle import TrainHistory, TrainRecord
from .qgan import QganHistory, QganRecord
from .sampling import Distribution, SampleSet
from .statevector import BitString

MLE_COLUMNS = ("iteration", "loss", "grad_norm", "clip_count")
QGAN_COLUMNS = ("iteration", "d_loss", "g_loss", "js", "kl", "tv")


class FormatError(ValueError):
    pass


def _data_rows(path) -> list[list[str]]:
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split("\t") if "\t" in line else line.split())
    if rows and rows[0][0] == "bitstring":
        rows = rows[1:]
    return rows


def write_distribution(path, dist: Distribution) -> None:
    n = dist.n_bits
    with open(path, "w", encoding="utf-8") as f:
        f.write("bitstring\tprobability\n")
        for i, p in enumerate(dist.probs):
            f.write(f"{BitString.from_index(i, n)}\t{float(p)!r}\n")


def read_distribution(path) -> Distribution:
    rows = _data_rows(path)
    if not rows:
        raise FormatError(f"{path}: no rows")
    n = len(rows[0][0])
    p = np.zeros(2**n)
    for row in rows:
        try:
            p[BitString.from_str(row[0]).index] = float(row[1])
        except (IndexError, ValueError) as e:
            raise FormatError(f"{path}: bad row {row!r}") from e
    return Distribution(p)


def write_counts(path, samples: SampleSet) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("bitstring\tcount\n")
        for bits, count in samples.rows():
            f.write(f"{bits}\t{count}\n")


def read_counts(path) -> SampleSet:
    rows = _data_rows(path)
    if not rows:
        raise FormatError(f"{path}: no rows")
    n = len(rows[0][0])
    counts = {}
    for row in rows:
        try:
            bs = BitString.from_str(row[0])
            c = int(row[1])
        except (IndexError, ValueError) as e:
            raise FormatError(f"{path}: bad row {row!r}") from e
        if bs.n_bits != n or c < 0:
            raise FormatError(f"{path}: bad row {row!r}")
        counts[bs.index] = counts.get(bs.index, 0) + c
    return SampleSet(n, counts)


def read_dataset(path) -> Dataset:
    s = read_counts(path)
    idx = np.repeat(np.array(sorted(s.counts), dtype=np.int64), [s.counts[k] for k in sorted(s.counts)])
    return Dataset(s.n_bits, idx)


def write_params(path, ansatz: LayeredAnsatz, params, **extra) -> None:
    p = check_params(ansatz, params)
    fields = {**ansatz.descriptor(), **extra}
    with open(path, "w", encoding="utf-8") as f:
        f.write("# ansatz " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n")
        for v in p:
            f.write(f"{float(v)!r}\n")


def read_params(path) -> tuple[LayeredAnsatz, np.ndarray, dict]:
    """Returns (ansatz, params, extra header fields)."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise FormatError(f"cannot read params file {path}: {e}") from e
    if not lines or not lines[0].startswith("# ansatz"):
        raise FormatError(f"{path}: missing '# ansatz' header")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0][len("# ansatz"):].split())
        pairs = fields.pop("pairs", None)
        ansatz = LayeredAnsatz(int(fields.pop("n_qubits")), int(fields.pop("n_layers")),
                               fields.pop("input_kind", "zero"),
                               None if pairs is None else parse_pairs(pairs))
        params = np.array([float(x) for x in lines[1:] if x.strip()])
        params = check_params(ansatz, params)
    except (KeyError, ValueError) as e:
        raise FormatError(f"{path}: {e}") from e
    return ansatz, params, fields


def write_mle_history(path, history: TrainHistory) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(MLE_COLUMNS)
        for r in history.records:
            w.writerow([r.iteration, repr(r.loss), repr(r.grad_norm), r.clip_count])


def write_timing(path, history: TrainHistory) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(("iteration", "time_ms"))
        for r in history.records:
            w.writerow([r.iteration, f"{r.time_ms:.3f}"])


def read_mle_history(path) -> TrainHistory:
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    return TrainHistory([
        TrainRecord(int(r["iteration"]), float(r["loss"]), float(r["grad_norm"]),
                    int(r["clip_count"]), float(r.get("time_ms") or 0.0))
        for r in rows
    ])


def write_qgan_history(path, history: QganHistory) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(QGAN_COLUMNS)
        for r in history.records:
            w.writerow([r.iteration] + [repr(getattr(r, c)) for c in QGAN_COLUMNS[1:]])


def read_qgan_history(path) -> QganHistory:
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    return QganHistory([
        QganRecord(int(r["iteration"]), *(float(r[c]) for c in QGAN_COLUMNS[1:])) for r in rows
    ])
