"""Command-line entry point: train-mle, train-qgan, sample, eval.

Exit codes: 0 success, 2 usage/config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .ansatz import build_ansatz, evaluate_batch
from .datasets import (
    Dataset,
    bars_and_stripes_target,
    dataset_from_distribution,
    gaussian_target,
    js,
    kl,
    mean_std,
    tv,
    uniform_target,
)
from .mle import NumericalError, TrainConfig, nll, train_mle
from .qgan import QganConfig, make_discriminator, make_generator, perturb_params, train_qgan
from .sampling import Distribution, make_rng, sample

log = logging.getLogger("qcgen")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def bundled(name: str) -> Path:
    """Path of a file shipped in ``qcgen/configs``."""
    return Path(str(resources.files("qcgen") / "configs" / name))


def resolve(path_or_name: str, suffix: str) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    cand = bundled(path_or_name if path_or_name.endswith(suffix) else path_or_name + suffix)
    if cand.exists():
        return cand
    raise ConfigError(f"no such file or bundled resource: {path_or_name}")


def load_config(path_or_name: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    path = resolve(path_or_name, ".cfg")
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from e
    return cp


def _coerce(dc_type, section: configparser.SectionProxy | dict, seed=None):
    """Build a dataclass from a config section, converting by field default type."""
    kwargs = {}
    known = {f.name: f for f in fields(dc_type)}
    for key, raw in dict(section).items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} for {dc_type.__name__}")
        default = known[key].default
        try:
            if isinstance(default, bool):
                kwargs[key] = str(raw).strip().lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                kwargs[key] = int(raw)
            elif isinstance(default, float):
                kwargs[key] = float(raw)
            else:
                kwargs[key] = str(raw).strip()
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {raw!r}") from e
    if seed is not None:
        kwargs["seed"] = seed
    cfg = dc_type(**kwargs)
    try:
        cfg.validate()
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return cfg


def _ansatz_from(section, prefix="") -> object:
    try:
        return build_ansatz(int(section.get("n_qubits")), int(section.get("n_layers", 1)),
                            section.get("input_kind", "zero"))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {prefix}ansatz section: {e}") from e


def parse_target_spec(spec: str) -> dict:
    """'gaussian:mean=3.5,std=1.2' -> {'kind': 'gaussian', 'mean': '3.5', 'std': '1.2'}"""
    kind, _, rest = spec.partition(":")
    out = {"kind": kind.strip()}
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        if "=" not in tok:
            raise ConfigError(f"bad target parameter {tok!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_target(opts: dict, n_bits: int, input_kind: str = "zero") -> Distribution | None:
    """Target distribution from a [target] section or spec string.

    Kinds: uniform, gaussian (mean, std), bars_and_stripes (rows, cols),
    point (index), teacher (layers, teacher_seed), file (path), data (none).
    """
    kind = opts.get("kind")
    try:
        if kind == "uniform":
            return uniform_target(n_bits)
        if kind == "gaussian":
            mean = opts.get("mean")
            std = opts.get("std")
            return gaussian_target(n_bits, None if mean is None else float(mean),
                                   None if std is None else float(std))
        if kind in ("bars_and_stripes", "bas"):
            rows, cols = int(opts.get("rows", 2)), int(opts.get("cols", 2))
            if rows * cols != n_bits:
                raise ConfigError(f"bars_and_stripes {rows}x{cols} needs {rows * cols} qubits, got {n_bits}")
            return bars_and_stripes_target(rows, cols)
        if kind == "point":
            return Distribution.point_mass(int(opts.get("index", 0)), n_bits)
        if kind == "teacher":
            teacher = build_ansatz(n_bits, int(opts.get("layers", 2)), input_kind)
            tp = make_rng(int(opts.get("teacher_seed", 0))).uniform(0, 2 * np.pi, teacher.parameter_count)
            return Distribution(np.abs(evaluate_batch(teacher, tp)[0, 0]) ** 2)
        if kind == "file":
            d = io.read_distribution(opts["path"])
            if d.n_bits != n_bits:
                raise ConfigError(f"target file has {d.n_bits} bits, model has {n_bits}")
            return d
        if kind == "data":
            return None
    except (KeyError, ValueError) as e:
        raise ConfigError(f"invalid target {opts!r}: {e}") from e
    raise ConfigError(f"unknown or missing target kind {kind!r}")


def _metrics(p: Distribution, target: Distribution | None) -> dict:
    m, s = mean_std(p)
    out = {"mean": m, "std": s}
    if target is not None:
        tm, ts = mean_std(target)
        out.update(kl=kl(target, p), js=js(p, target), tv=tv(p, target), target_mean=tm, target_std=ts)
    return out


def _echo_config(cp: configparser.ConfigParser, path: Path, seed_override) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if seed_override is not None:
            cp["train"]["seed"] = str(seed_override)
        cp.write(f)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _born(ansatz, params) -> Distribution:
    return Distribution(np.abs(evaluate_batch(ansatz, params)[0, 0]) ** 2)


def cmd_train_mle(args) -> int:
    cp = load_config(args.config)
    for sec in ("ansatz", "train", "target"):
        if sec not in cp:
            raise ConfigError(f"config is missing the [{sec}] section")
    ansatz = _ansatz_from(cp["ansatz"])
    config = _coerce(TrainConfig, cp["train"], args.seed)
    topts = dict(cp["target"])
    n_samples = int(topts.pop("n_samples", 1000))
    data_seed = int(topts.pop("data_seed", config.seed))
    data_file = topts.pop("data_file", None)
    target = build_target(topts, ansatz.n_qubits, ansatz.input_kind)
    if data_file:
        data = io.read_dataset(data_file)
    elif target is not None:
        data = dataset_from_distribution(target, n_samples, data_seed)
    else:
        raise ConfigError("target kind 'data' requires data_file")
    if data.n_bits != ansatz.n_qubits:
        raise ConfigError(f"dataset has {data.n_bits} bits, ansatz has {ansatz.n_qubits} qubits")

    log.info("train-mle: %d qubits, %d layers, %d params, %d samples",
             ansatz.n_qubits, ansatz.n_layers, ansatz.parameter_count, len(data))
    params, history = train_mle(ansatz, data, config)
    model = _born(ansatz, params)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(cp, out / "config-echo.txt", args.seed)
    io.write_params(out / "params.txt", ansatz, params)
    io.write_mle_history(out / "history.csv", history)
    io.write_timing(out / "timing.csv", history)
    io.write_distribution(out / "distribution.tsv", model)
    summary = {"final_nll": nll(ansatz, params, data, config.epsilon_clip), "iterations": config.iterations,
               "seed": config.seed, **_metrics(model, target)}
    _write_json(out / "summary.json", summary)
    log.info("final nll %.6f", summary["final_nll"])
    return EXIT_OK


def cmd_train_qgan(args) -> int:
    cp = load_config(args.config)
    for sec in ("ansatz", "train", "target"):
        if sec not in cp:
            raise ConfigError(f"config is missing the [{sec}] section")
    g_ans = _ansatz_from(cp["ansatz"])
    gen = make_generator(g_ans.n_qubits, g_ans.n_layers, g_ans.input_kind)
    # optional; defaults to one readout qubit and two layers
    dsec = cp["discriminator"] if "discriminator" in cp else {}
    try:
        disc = make_discriminator(gen.n_data, int(dsec.get("n_readout", 1)), int(dsec.get("n_layers", 2)))
    except ValueError as e:
        raise ConfigError(f"invalid discriminator section: {e}") from e
    config = _coerce(QganConfig, cp["train"], args.seed)
    target = build_target(dict(cp["target"]), gen.n_data, g_ans.input_kind)
    if target is None:
        raise ConfigError("train-qgan needs a target distribution")

    log.info("train-qgan: generator %d qubits x %d layers, discriminator %d+%d qubits x %d layers",
             gen.n_data, g_ans.n_layers, disc.n_data, disc.n_readout, disc.ansatz.n_layers)
    g_params, d_params, history = train_qgan(gen, disc, target, config)
    model = _born(gen.ansatz, g_params)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(cp, out / "config-echo.txt", args.seed)
    io.write_params(out / "params.txt", gen.ansatz, g_params)
    io.write_params(out / "disc_params.txt", disc.ansatz, d_params, n_readout=disc.n_readout)
    io.write_qgan_history(out / "history.csv", history)
    io.write_distribution(out / "distribution.tsv", model)
    last = history.records[-1]
    summary = {"iterations": config.iterations, "seed": config.seed, "d_loss": last.d_loss,
               "g_loss": last.g_loss, **_metrics(model, target)}
    _write_json(out / "summary.json", summary)
    log.info("final js %.5f tv %.5f", summary["js"], summary["tv"])
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n_samples < 1:
        raise ConfigError(f"--n-samples must be >= 1, got {args.n_samples}")
    ansatz, params, _ = io.read_params(resolve(args.params, ".txt"))
    seed = 0 if args.seed is None else args.seed
    samples = sample(_born(ansatz, params), args.n_samples, seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_counts(out / "samples.tsv", samples)
    if not args.quiet:
        for bits, count in samples.rows():
            print(f"{bits}\t{count}")
    return EXIT_OK


def cmd_eval(args) -> int:
    if not args.target:
        raise ConfigError("eval needs --target (e.g. uniform, gaussian:mean=3.5,std=1.3, bas:rows=2,cols=2)")
    ansatz, params, _ = io.read_params(resolve(args.params, ".txt"))
    target = build_target(parse_target_spec(args.target), ansatz.n_qubits, ansatz.input_kind)
    before = _born(ansatz, params)
    report = {"metrics": _metrics(before, target)}
    if args.perturb is not None:
        if args.perturb < 0:
            raise ConfigError("--perturb must be >= 0")
        seed = 0 if args.seed is None else args.seed
        after = _born(ansatz, perturb_params(params, args.perturb, seed))
        report["perturb_sigma"] = args.perturb
        report["perturbed_metrics"] = _metrics(after, target)
        report["js_shift"] = js(before, after)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory (default: runs/latest)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override the configured seed")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="qcgen", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-mle", parents=[common], help="maximum-likelihood Born machine training")
    p.add_argument("config", help="config file, or a bundled name such as mle_teacher")
    p.set_defaults(func=cmd_train_mle)

    p = sub.add_parser("train-qgan", parents=[common], help="adversarial training (task1/task2/task3)")
    p.add_argument("config", help="config file, or a bundled name such as task1")
    p.set_defaults(func=cmd_train_qgan)

    p = sub.add_parser("sample", parents=[common], help="draw measurement samples from a params file")
    p.add_argument("params")
    p.add_argument("--n-samples", type=int, default=1000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", parents=[common], help="divergence metrics of a params file vs a target")
    p.add_argument("params")
    p.add_argument("--target", help="uniform | gaussian[:mean=..,std=..] | bas[:rows=..,cols=..] | point:index=..")
    p.add_argument("--perturb", type=float, default=None, metavar="SIGMA")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("out_dir", "runs/latest"), ("seed", None), ("quiet", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, io.FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
