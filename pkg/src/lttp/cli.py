"""Command-line interface: transform, extract, evaluate, compare, bench, split.

Exit codes: 0 success, 1 validation, 2 I/O, 3 internal. Diagnostics go to
stderr prefixed ``error:`` or ``warning:``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import traceback
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import DEFAULT_LTP_THRESHOLD
from .bench import KernelMismatchError, bench_descriptor, rows_to_csv
from .descriptors import DESCRIPTOR_NAMES, LTTP_NAMES, Descriptor
from .errors import ImageFormatError, MissingImagesError, ValidationError
from .evaluation import (
    COUNTING,
    cmc_curve,
    compare_descriptors,
    extract_codes,
    load_manifest_images,
    split_entries,
)
from .image import GrayImage, load_gray_image, load_manifest, save_gray_image
from .matching import Metric
from .pattern import MODES

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3

# built-in defaults per command; config files may only set these keys
DEFAULTS = {
    "transform": {
        "image": None,
        "descriptor": "lttp-ld",
        "mode": "dense",
        "out": None,
        "ltp_threshold": DEFAULT_LTP_THRESHOLD,
        "ascii": False,
    },
    "extract": {
        "manifest": None,
        "descriptor": "lttp-ld",
        "mode": "dense",
        "out": None,
        "ltp_threshold": DEFAULT_LTP_THRESHOLD,
        "workers": 1,
    },
    "evaluate": {
        "manifest": None,
        "descriptor": list(LTTP_NAMES),
        "metric": ["CS", "SAD"],
        "ranks": [1],
        "mode": "dense",
        "counting": "cumulative",
        "ltp_threshold": DEFAULT_LTP_THRESHOLD,
        "out_json": None,
        "out_csv": None,
        "scores_csv": None,
        "cmc": None,
        "cmc_csv": None,
        "workers": 1,
    },
    "compare": {
        "manifest": None,
        "descriptor": ["lbp", "lgs", "ltp", "lttp-ld", "lttp-lb", "lttp-rd", "lttp-rb"],
        "metric": ["CS", "SAD"],
        "ranks": [1],
        "mode": "dense",
        "counting": "cumulative",
        "ltp_threshold": DEFAULT_LTP_THRESHOLD,
        "out_json": None,
        "out_csv": None,
        "workers": 1,
    },
    "bench": {
        "image": None,
        "size": 128,
        "seed": 0,
        "descriptor": ["lttp-ld"],
        "mode": ["dense"],
        "ltp_threshold": DEFAULT_LTP_THRESHOLD,
        "repetitions": 10,
        "warmup": 2,
        "out": None,
    },
    "split": {
        "input": None,
        "probes_per_subject": 1,
        "seed": 0,
        "out": None,
    },
}


class CliError(Exception):
    def __init__(self, message, code=EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_VALIDATION)


def _add_common(p, multi_descriptor=False, multi_mode=False):
    S = argparse.SUPPRESS
    if multi_descriptor:
        p.add_argument("--descriptor", nargs="+", choices=DESCRIPTOR_NAMES, default=S)
    else:
        p.add_argument("--descriptor", choices=DESCRIPTOR_NAMES, default=S)
    if multi_mode:
        p.add_argument("--mode", nargs="+", choices=MODES, default=S)
    else:
        p.add_argument("--mode", choices=MODES, default=S)
    p.add_argument("--ltp-threshold", type=int, default=S, help="LTP dead-zone width (default 5)")
    p.add_argument("--config", default=S, help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="lttp", description="Local ternary tree pattern descriptors and identification harness.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="write the code image of one input as netpbm")
    p.add_argument("image", nargs="?", default=S)
    p.add_argument("--out", "-o", default=S)
    p.add_argument("--ascii", action="store_true", default=S, help="write P2 instead of P5")
    _add_common(p)

    p = sub.add_parser("extract", help="extract feature vectors for every manifest image")
    p.add_argument("--manifest", "-m", default=S)
    p.add_argument("--out", "-o", default=S, help="output .npz")
    p.add_argument("--workers", type=int, default=S)
    _add_common(p)

    for name in ("evaluate", "compare"):
        p = sub.add_parser(name, help="rank-k identification accuracy" if name == "evaluate" else "descriptor comparison table")
        p.add_argument("--manifest", "-m", default=S)
        p.add_argument("--metric", nargs="+", type=str.upper, choices=[m.value for m in Metric], default=S)
        p.add_argument("--ranks", nargs="+", type=int, default=S)
        p.add_argument("--counting", choices=COUNTING, default=S)
        p.add_argument("--out-json", default=S)
        p.add_argument("--out-csv", default=S)
        p.add_argument("--workers", type=int, default=S)
        if name == "evaluate":
            p.add_argument("--scores-csv", default=S, help="raw score dump (single descriptor only)")
            p.add_argument("--cmc", type=int, default=S, metavar="KMAX")
            p.add_argument("--cmc-csv", default=S)
        _add_common(p, multi_descriptor=True)

    p = sub.add_parser("bench", help="time descriptor kernels")
    p.add_argument("--image", default=S)
    p.add_argument("--size", type=int, default=S, help="side of a random test image when --image is absent")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--repetitions", type=int, default=S)
    p.add_argument("--warmup", type=int, default=S)
    p.add_argument("--out", "-o", default=S)
    _add_common(p, multi_descriptor=True, multi_mode=True)

    p = sub.add_parser("split", help="make a probe/gallery manifest from path,subject rows")
    p.add_argument("input", nargs="?", default=S)
    p.add_argument("--probes-per-subject", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--out", "-o", default=S)
    p.add_argument("--config", default=S)
    return parser


def resolve_config(command: str, flags: dict) -> dict:
    cfg = dict(DEFAULTS[command])
    config_path = flags.pop("config", None)
    if config_path is not None:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CliError(f"config {config_path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise CliError(f"config {config_path}: top level must be an object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise CliError(f"config {config_path}: unknown key(s) {', '.join(unknown)}")
        cfg.update(loaded)
    cfg.update(flags)
    _validate(command, cfg)
    return cfg


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _validate(command: str, cfg: dict) -> None:
    try:
        if "descriptor" in cfg:
            names = _as_list(cfg["descriptor"])
            if not names:
                raise CliError("at least one descriptor is required")
            for n in names:
                Descriptor(n, cfg["ltp_threshold"])
        if "mode" in cfg:
            for m in _as_list(cfg["mode"]):
                if m not in MODES:
                    raise CliError(f"unknown mode {m!r}")
        if "metric" in cfg:
            cfg["metric"] = [Metric.parse(m).value for m in _as_list(cfg["metric"])]
            if not cfg["metric"]:
                raise CliError("at least one metric is required")
        if "ranks" in cfg:
            cfg["ranks"] = [int(k) for k in _as_list(cfg["ranks"])]
            if not cfg["ranks"] or min(cfg["ranks"]) < 1:
                raise CliError("ranks must be positive integers")
        if cfg.get("counting", "cumulative") not in COUNTING:
            raise CliError(f"unknown counting {cfg['counting']!r}")
        for key in ("workers", "repetitions", "size", "probes_per_subject"):
            if key in cfg and (not isinstance(cfg[key], int) or cfg[key] < 1):
                raise CliError(f"{key} must be a positive integer")
    except ValidationError as exc:
        raise CliError(str(exc)) from None
    required = {
        "transform": ("image", "out"),
        "extract": ("manifest", "out"),
        "evaluate": ("manifest",),
        "compare": ("manifest",),
        "split": ("input", "out"),
    }.get(command, ())
    for key in required:
        if cfg.get(key) is None:
            raise CliError(f"missing required option {key.replace('_', '-')}")


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_transform(cfg) -> int:
    img = load_gray_image(cfg["image"])
    d = Descriptor(cfg["descriptor"], cfg["ltp_threshold"])
    planes = d.transform(img, cfg["mode"])
    out = Path(cfg["out"])
    targets = [out] if len(planes) == 1 else [out, out.with_name(f"{out.stem}-lower{out.suffix}")]
    for ti, target in zip(planes, targets):
        save_gray_image(ti.to_gray_image(), target, binary=not cfg["ascii"])
        print(f"{target}: {ti.width}x{ti.height}")
    return EXIT_OK


def cmd_extract(cfg) -> int:
    manifest = load_manifest(cfg["manifest"])
    images = load_manifest_images(manifest, cfg["workers"])
    d = Descriptor(cfg["descriptor"], cfg["ltp_threshold"])
    codes = extract_codes([images[e.path] for e in manifest.entries], d, cfg["mode"], cfg["workers"])
    with open(cfg["out"], "wb") as fh:
        np.savez(
            fh,
            features=codes.astype(np.float64),
            paths=np.array([e.path for e in manifest.entries]),
            subjects=np.array([e.subject for e in manifest.entries]),
            roles=np.array([e.role for e in manifest.entries]),
        )
    print(f"{cfg['out']}: {codes.shape[0]} vectors of length {codes.shape[1] if codes.ndim == 2 else 0}")
    return EXIT_OK


def _cmc_rows(curves) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["descriptor", "metric", "k", "accuracy"])
    for label, metric, curve in curves:
        for k, acc in curve:
            w.writerow([label, metric, k, f"{acc:.2f}"])
    return out.getvalue()


def cmd_evaluate(cfg) -> int:
    manifest = load_manifest(cfg["manifest"])
    descriptors = [Descriptor(n, cfg["ltp_threshold"]) for n in _as_list(cfg["descriptor"])]
    scores_csv = cfg.get("scores_csv")
    if scores_csv and len(descriptors) != 1:
        raise CliError("--scores-csv needs exactly one descriptor")
    cmc_k = cfg.get("cmc")
    score_dumps, curves = [], []

    def on_run(run):
        if scores_csv:
            score_dumps.append(run.scores_csv())
        if cmc_k:
            curves.append((run.descriptor.label, run.metric.value, cmc_curve(run, cmc_k, cfg["counting"])))

    report = compare_descriptors(
        manifest,
        descriptors,
        cfg["metric"],
        cfg["ranks"],
        cfg["mode"],
        cfg["counting"],
        cfg["workers"],
        on_run=on_run,
    )
    sys.stdout.write(report.to_text())
    if cfg.get("out_json"):
        _write(cfg["out_json"], report.to_json())
    if cfg.get("out_csv"):
        _write(cfg["out_csv"], report.to_csv())
    if scores_csv:
        header, *rest = score_dumps
        _write(scores_csv, header + "".join(d.split("\n", 1)[1] for d in rest))
    if cmc_k:
        text = _cmc_rows(curves)
        if cfg.get("cmc_csv"):
            _write(cfg["cmc_csv"], text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(cfg) -> int:
    if cfg.get("image"):
        img = load_gray_image(cfg["image"])
    else:
        rng = np.random.default_rng(cfg["seed"])
        img = GrayImage(rng.integers(0, 256, size=(cfg["size"], cfg["size"]), dtype=np.uint8))
    rows = []
    for name in _as_list(cfg["descriptor"]):
        d = Descriptor(name, cfg["ltp_threshold"])
        for mode in _as_list(cfg["mode"]):
            rows.append(bench_descriptor(d, img, mode, cfg["repetitions"], cfg["warmup"]))
    text = rows_to_csv(rows)
    if cfg.get("out"):
        _write(cfg["out"], text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_split(cfg) -> int:
    text = Path(cfg["input"]).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if not rows or [h.strip().lower() for h in rows[0][:2]] != ["path", "subject"]:
        raise CliError("split input needs a 'path,subject' header")
    entries = [(r[0].strip(), r[1].strip()) for r in rows[1:]]
    if not entries:
        raise CliError("split input has no rows")
    manifest = split_entries(entries, cfg["probes_per_subject"], cfg["seed"])
    _write(cfg["out"], manifest.to_csv())
    print(f"{cfg['out']}: {len(manifest.gallery)} gallery, {len(manifest.probes)} probe")
    return EXIT_OK


COMMANDS = {
    "transform": cmd_transform,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "compare": cmd_evaluate,
    "bench": cmd_bench,
    "split": cmd_split,
}


def _showwarning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    old_showwarning = warnings.showwarning
    warnings.showwarning = _showwarning
    try:
        cfg = resolve_config(command, args)
        return COMMANDS[command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except MissingImagesError as exc:
        for p in exc.paths:
            print(f"error: missing image: {p}", file=sys.stderr)
        return EXIT_IO
    except ImageFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KernelMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        traceback.print_exc(file=sys.stderr)
        print(f"error: internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        warnings.showwarning = old_showwarning
