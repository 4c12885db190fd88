"""Command-line front end.

Subcommands: synth, process, train, eval, run, amplify, bench.  Exit codes:
0 success, 1 bad configuration (including bad flags), 2 bad input data,
3 internal error.  `run` additionally accepts a key=value config file;
explicit flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .amplify import amplification_table, default_base_trace
from .data import build_hrv_dataset
from .errors import ConfigError, HrvError, ParseError
from .experiment import DEFAULT_MONITOR_LENS_S, ExperimentConfig, run_experiment
from .io import (
    read_dataset_csv,
    read_ppg_csv,
    read_rr_csv,
    write_amplification_csv,
    write_dataset_csv,
    write_hr_csv,
    write_ppg_csv,
    write_rr_csv,
    write_trace_csv,
)
from .metrics import HrvMetricKind, mape
from .models import (
    MlpTrainingConfig,
    ModelKind,
    bench_inference,
    load_model,
    random_search,
    save_model,
    serialized_size,
)
from .sigproc import DEFAULT_SAMPLING_RATE_HZ, ZScoreConfig, ppg_to_hr, smooth, zscore_adjust
from .synth import ACTIVITY_PRESETS, activity_preset, generate_rr_trace, render_ppg


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _metric(text: str) -> HrvMetricKind:
    try:
        return HrvMetricKind(text.lower())
    except ValueError:
        raise ConfigError(f"unknown metric {text!r}; choose rmssd or sdnn") from None


def _model_kind(text: str) -> ModelKind:
    try:
        return ModelKind(text.lower())
    except ValueError:
        raise ConfigError(
            f"unknown model {text!r}; choose dt, rf, knn or mlp"
        ) from None


def _csv_list(text: str) -> tuple[str, ...]:
    items = tuple(part.strip() for part in text.split(",") if part.strip())
    if not items:
        raise ConfigError(f"empty list value {text!r}")
    return items


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in _csv_list(text))
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


# config-file keys accepted by `run`, with their converters
RUN_FILE_KEYS = {
    "out_dir": str,
    "activities": _csv_list,
    "metrics": _csv_list,
    "lengths": _int_list,
    "models": _csv_list,
    "duration_s": float,
    "stride_s": int,
    "budget": int,
    "seed": int,
    "train_fraction": float,
    "val_fraction": float,
    "bench_repetitions": int,
    "clean": _bool,
    "mlp_max_epochs": int,
}


def read_config_file(path) -> dict:
    """key=value lines; # starts a comment; unknown keys are rejected."""
    values = {}
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in RUN_FILE_KEYS:
            known = ", ".join(sorted(RUN_FILE_KEYS))
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}; known: {known}")
        values[key] = RUN_FILE_KEYS[key](raw.strip())
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="ppghrv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth",
                       help="generate a synthetic PPG trace with RR ground truth")
    p.add_argument("--preset", required=True, choices=sorted(ACTIVITY_PRESETS))
    p.add_argument("--duration-s", type=float, default=600.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clean", action="store_true",
                   help="disable motion artifacts and sensor noise")
    p.add_argument("--out-ppg", required=True)
    p.add_argument("--out-rr", required=True)

    p = sub.add_parser("process",
                       help="PPG CSV -> per-second HR CSV (and optionally a dataset)")
    p.add_argument("--ppg", required=True)
    p.add_argument("--sampling-rate-hz", type=float, default=DEFAULT_SAMPLING_RATE_HZ)
    p.add_argument("--z-score", type=float, default=3.0)
    p.add_argument("--out-hr", required=True)
    p.add_argument("--rr", help="RR ground-truth CSV, needed for --out-dataset")
    p.add_argument("--metric", type=_metric, default=HrvMetricKind.RMSSD)
    p.add_argument("--n-s", type=int, default=300)
    p.add_argument("--stride-s", type=int, default=1)
    p.add_argument("--out-dataset")

    p = sub.add_parser("train",
                       help="random hyperparameter search over one model kind")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", type=_model_kind, required=True)
    p.add_argument("--budget", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--val-fraction", type=float, default=0.2)
    p.add_argument("--mlp-max-epochs", type=int, default=500)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval",
                       help="test MAPE of a saved model on a dataset CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out-trace", help="write window_end_s,truth,sigproc,model CSV")

    p = sub.add_parser("run",
                       help="full experiment matrix; see --config")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--out-dir")
    p.add_argument("--activities", type=_csv_list)
    p.add_argument("--metrics", type=_csv_list)
    p.add_argument("--lengths", type=_int_list)
    p.add_argument("--models", type=_csv_list)
    p.add_argument("--duration-s", type=float)
    p.add_argument("--stride-s", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--val-fraction", type=float)
    p.add_argument("--bench-repetitions", type=int)
    p.add_argument("--clean", action="store_true", default=None)
    p.add_argument("--mlp-max-epochs", type=int)

    p = sub.add_parser("amplify",
                       help="RR-to-HRV error amplification table")
    p.add_argument("--levels", type=_csv_list, default=("0", "1", "2", "3", "4", "5"))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-s", type=float, default=60.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench",
                       help="single-prediction latency of a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", help="probe rows come from this dataset CSV")
    p.add_argument("--repetitions", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_synth(args) -> None:
    cfg = activity_preset(args.preset, duration_s=args.duration_s, seed=args.seed)
    if args.clean:
        cfg = replace(cfg, artifact_rate_per_min=0.0, additive_noise_sigma=0.0)
    gt = generate_rr_trace(cfg)
    ppg = render_ppg(gt, cfg)
    write_ppg_csv(args.out_ppg, ppg)
    write_rr_csv(args.out_rr, gt)
    print(f"wrote {len(ppg.samples)} PPG samples to {args.out_ppg}")
    print(f"wrote {gt.beat_times_s.size} beats to {args.out_rr}")


def _cmd_process(args) -> None:
    signal = read_ppg_csv(args.ppg, declared_rate_hz=args.sampling_rate_hz)
    raw = ppg_to_hr(signal)
    shr = smooth(zscore_adjust(raw, ZScoreConfig(z_score=args.z_score)))
    write_hr_csv(args.out_hr, shr)
    print(f"wrote {len(shr)} per-second HRs to {args.out_hr}")
    if args.out_dataset or args.rr:
        if not (args.out_dataset and args.rr):
            raise ConfigError("--out-dataset and --rr must be given together")
        gt = read_rr_csv(args.rr)
        ds = build_hrv_dataset(
            shr, gt, n_s=args.n_s, kind=args.metric, stride_s=args.stride_s
        )
        write_dataset_csv(args.out_dataset, ds)
        print(
            f"wrote {len(ds)} samples (n={args.n_s}s, {args.metric.value}) "
            f"to {args.out_dataset}"
        )


def _cmd_train(args) -> None:
    ds = read_dataset_csv(args.dataset)
    result = random_search(
        ds,
        args.model,
        budget=args.budget,
        seed=args.seed,
        val_fraction=args.val_fraction,
        mlp_cfg=MlpTrainingConfig(max_epochs=args.mlp_max_epochs),
    )
    save_model(result.model, args.out)
    print(f"best hyperparams: {result.best.hyperparams}")
    print(f"validation MAPE: {result.best.val_mape_pct:.4f}%")
    print(f"model bytes: {serialized_size(result.model)}")
    print(f"saved model to {args.out}")


def _cmd_eval(args) -> None:
    model = load_model(args.model)
    ds = read_dataset_csv(args.dataset)
    preds = model.predict_batch(ds.features)
    test_mape = mape(preds, ds.labels)
    sigproc = ds.features[:, -1]  # rough-HRV feature of each window
    print(f"model MAPE: {test_mape:.4f}%")
    print(f"sigproc MAPE: {mape(sigproc, ds.labels):.4f}%")
    if args.out_trace:
        write_trace_csv(
            args.out_trace, ds.window_end_times_s, ds.labels, sigproc, preds
        )
        print(f"wrote trace to {args.out_trace}")


def _cmd_run(args) -> None:
    values = read_config_file(args.config) if args.config else {}
    def pick(name, default=None):
        flag = getattr(args, name)
        if flag is not None:
            return flag
        if name in values:
            return values[name]
        return default

    out_dir = pick("out_dir")
    if not out_dir:
        raise ConfigError("run needs --out-dir (or out_dir in the config file)")
    kwargs = {}
    if pick("activities") is not None:
        kwargs["activities"] = tuple(pick("activities"))
    if pick("metrics") is not None:
        kwargs["metrics"] = tuple(_metric(m) for m in pick("metrics"))
    if pick("lengths") is not None:
        kwargs["monitor_lens_s"] = tuple(pick("lengths"))
    if pick("models") is not None:
        kwargs["models"] = tuple(_model_kind(m) for m in pick("models"))
    for name, key in [
        ("duration_s", "duration_s"),
        ("stride_s", "stride_s"),
        ("budget", "budget"),
        ("seed", "seed"),
        ("train_fraction", "train_fraction"),
        ("val_fraction", "val_fraction"),
        ("bench_repetitions", "bench_repetitions"),
        ("clean", "clean"),
        ("mlp_max_epochs", "mlp_max_epochs"),
    ]:
        value = pick(name)
        if value is not None:
            kwargs[key] = value
    cfg = ExperimentConfig(out_dir=Path(out_dir), **kwargs)
    rows = run_experiment(cfg)
    for r in rows:
        latency = "-" if r.latency_us_mean is None else f"{r.latency_us_mean:.1f}us"
        print(
            f"{r.activity} {r.metric} n={r.n_s}s {r.model}: "
            f"mape={r.mape_pct:.2f}% sigproc={r.sigproc_mape_pct:.2f}% "
            f"bytes={r.model_bytes} latency={latency}"
        )
    print(f"wrote {len(rows)} rows to {Path(out_dir) / 'results.csv'}")


def _cmd_amplify(args) -> None:
    try:
        levels = tuple(float(v) for v in args.levels)
    except ValueError:
        raise ConfigError(f"bad --levels value {args.levels!r}") from None
    rows = amplification_table(
        default_base_trace(args.seed),
        mape_levels_pct=levels,
        trials=args.trials,
        window_s=args.window_s,
        rng_seed=args.seed,
    )
    write_amplification_csv(args.out, rows)
    for r in rows:
        print(
            f"rr={r.rr_mape_pct:g}% -> rmssd={r.rmssd_mape_pct:.2f}% "
            f"sdnn={r.sdnn_mape_pct:.2f}%"
        )
    print(f"wrote {len(rows)} rows to {args.out}")


def _cmd_bench(args) -> None:
    model = load_model(args.model)
    if args.dataset:
        ds = read_dataset_csv(args.dataset)
        probes = list(ds.features[:64])
    else:
        rng = np.random.default_rng(args.seed)
        probes = list(rng.normal(size=(64, model.n_features)))
    stats = bench_inference(model, probes, repetitions=args.repetitions)
    print(f"repetitions: {stats.repetitions}")
    print(f"min: {stats.min_us:.2f}us")
    print(f"mean: {stats.mean_us:.2f}us")
    print(f"p99: {stats.p99_us:.2f}us")


_COMMANDS = {
    "synth": _cmd_synth,
    "process": _cmd_process,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "run": _cmd_run,
    "amplify": _cmd_amplify,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except ParseError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except HrvError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"internal error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
