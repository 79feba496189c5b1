"""Descriptor throughput measurement with a reference-equivalence gate."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .descriptors import Descriptor
from .errors import LttpError, ValidationError
from .image import GrayImage

MIN_REPETITIONS = 10


class KernelMismatchError(LttpError):
    """The vectorised kernel disagrees with the per-pixel reference."""


@dataclass(frozen=True)
class BenchRow:
    descriptor: str
    mode: str
    width: int
    height: int
    sites: int
    repetitions: int
    median_ms: float
    min_ms: float
    max_ms: float
    iqr_ms: float
    mpix_per_s: float


def code_sites(img: GrayImage, mode: str) -> int:
    if mode == "dense":
        return (img.height - 2) * (img.width - 2)
    return (img.height // 3) * (img.width // 3)


def check_against_reference(descriptor: Descriptor, img: GrayImage, mode: str) -> None:
    fast = descriptor.codes(img, mode)
    slow = descriptor.reference_codes(img, mode)
    if not np.array_equal(fast, slow):
        bad = int(np.count_nonzero(fast != slow))
        raise KernelMismatchError(f"{descriptor.label}/{mode}: {bad} code(s) differ from reference")


def bench_descriptor(
    descriptor: Descriptor,
    img: GrayImage,
    mode: str = "dense",
    repetitions: int = MIN_REPETITIONS,
    warmup: int = 2,
    verify: bool = True,
) -> BenchRow:
    if repetitions < MIN_REPETITIONS:
        raise ValidationError(f"need at least {MIN_REPETITIONS} repetitions, got {repetitions}")
    if verify:
        check_against_reference(descriptor, img, mode)
    for _ in range(warmup):
        descriptor.codes(img, mode)
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        descriptor.codes(img, mode)
        samples.append(time.perf_counter() - t0)
    q1, _, q3 = statistics.quantiles(samples, n=4)
    median = statistics.median(samples)
    pixels = img.width * img.height
    return BenchRow(
        descriptor.label,
        mode,
        img.width,
        img.height,
        code_sites(img, mode),
        repetitions,
        median * 1e3,
        min(samples) * 1e3,
        max(samples) * 1e3,
        (q3 - q1) * 1e3,
        pixels / max(median, 1e-12) / 1e6,
    )


def rows_to_csv(rows) -> str:
    out = io.StringIO()
    names = [f.name for f in fields(BenchRow)]
    writer = csv.DictWriter(out, fieldnames=names, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = asdict(r)
        writer.writerow({k: f"{v:.4f}" if isinstance(v, float) else v for k, v in d.items()})
    return out.getvalue()
