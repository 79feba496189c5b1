"""One-to-many identification runs, rank-k accuracy and comparison reports."""

from __future__ import annotations

import csv
import io
import json
import random
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .descriptors import Descriptor, get_descriptor
from .errors import MissingImagesError, ValidationError
from .image import DatasetManifest, GrayImage, ManifestEntry, load_gray_image
from .matching import Metric, RankedList, ranked_from_scores, rank_gallery, score_matrix, scores_to_csv

COUNTING = ("cumulative", "exact")


def _pmap(fn, items, workers: int = 1) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def load_manifest_images(manifest: DatasetManifest, workers: int = 1) -> dict[str, GrayImage]:
    """Decode every image the manifest references, keyed by manifest path.

    All missing files are reported together before anything is decoded.
    """
    paths = sorted({e.path for e in manifest.entries})
    missing = [p for p in paths if not manifest.resolve(ManifestEntry(p, "", "gallery")).is_file()]
    if missing:
        raise MissingImagesError(missing)
    images = _pmap(lambda p: load_gray_image(manifest.resolve(ManifestEntry(p, "", "gallery"))), paths, workers)
    return dict(zip(paths, images))


def extract_codes(images: Sequence[GrayImage], descriptor: Descriptor, mode: str = "dense", workers: int = 1) -> np.ndarray:
    """Stack the flattened uint8 codes of each image into a ``(n, length)`` matrix."""
    codes = _pmap(lambda img: descriptor.codes(img, mode), images, workers)
    lengths = sorted({c.size for c in codes})
    if len(lengths) > 1:
        raise ValidationError(
            f"feature lengths differ across images ({', '.join(map(str, lengths))}); "
            "all images in a run must share one size"
        )
    if not codes:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.stack(codes)


def identify(probe, gallery: Sequence[tuple[str, np.ndarray]], metric, probe_id: str = "") -> tuple[str, RankedList]:
    ranked = rank_gallery(probe, gallery, metric, probe_id)
    return ranked.best.subject, ranked


@dataclass
class IdentificationRun:
    descriptor: Descriptor
    metric: Metric
    mode: str
    manifest: DatasetManifest
    scores: np.ndarray
    ranked_lists: tuple[RankedList, ...]
    gallery_ids: tuple[str, ...]
    probe_ids: tuple[str, ...]
    probe_subjects: tuple[str, ...]

    @property
    def gallery_size(self) -> int:
        return len(self.gallery_ids)

    def correct_ranks(self) -> list[int | None]:
        """Rank of the best same-subject gallery item for each probe."""
        return [rl.rank_of_subject(s) for rl, s in zip(self.ranked_lists, self.probe_subjects)]

    def scores_csv(self) -> str:
        return scores_to_csv(self.ranked_lists, self.gallery_ids)


def run_identification(
    manifest: DatasetManifest,
    descriptor: Descriptor | str,
    metric,
    mode: str = "dense",
    workers: int = 1,
    images: dict[str, GrayImage] | None = None,
    codes: tuple[np.ndarray, np.ndarray] | None = None,
) -> IdentificationRun:
    if isinstance(descriptor, str):
        descriptor = get_descriptor(descriptor)
    metric = Metric.parse(metric)
    gallery, probes = manifest.gallery, manifest.probes
    if not gallery:
        raise ValidationError("manifest has no gallery entries")
    if not probes:
        raise ValidationError("manifest has no probe entries")
    if codes is None:
        if images is None:
            images = load_manifest_images(manifest, workers)
        all_codes = extract_codes([images[e.path] for e in gallery + probes], descriptor, mode, workers)
        codes = all_codes[: len(gallery)], all_codes[len(gallery) :]
    g_codes, p_codes = codes
    subjects = [e.subject for e in gallery]
    rows = _pmap(lambda p: score_matrix(p[None, :], g_codes, metric)[0], list(p_codes), workers)
    scores = np.stack(rows)
    ranked = tuple(ranked_from_scores(row, subjects, metric, e.path) for row, e in zip(scores, probes))
    return IdentificationRun(
        descriptor,
        metric,
        mode,
        manifest,
        scores,
        ranked,
        tuple(e.path for e in gallery),
        tuple(e.path for e in probes),
        tuple(e.subject for e in probes),
    )


def _check_k(k: int, gallery_size: int) -> None:
    if isinstance(k, bool) or int(k) != k or k < 1 or k > gallery_size:
        raise ValidationError(f"rank k={k} out of range 1..{gallery_size}")


def rank_k_accuracy(run: IdentificationRun, k: int, counting: str = "cumulative") -> float:
    """Percentage of probes identified at rank ``k``.

    ``cumulative``: some same-subject gallery item is within the top ``k``.
    ``exact``: the item at position ``k`` itself has the probe's subject.
    """
    if counting not in COUNTING:
        raise ValidationError(f"unknown counting {counting!r}")
    if not run.ranked_lists:
        raise ValidationError("empty probe set")
    _check_k(k, run.gallery_size)
    if counting == "cumulative":
        hits = sum(1 for r in run.correct_ranks() if r is not None and r <= k)
    else:
        hits = sum(1 for rl, s in zip(run.ranked_lists, run.probe_subjects) if rl[k - 1].subject == s)
    return 100.0 * hits / len(run.ranked_lists)


def cmc_curve(run: IdentificationRun, k_max: int, counting: str = "cumulative") -> list[tuple[int, float]]:
    _check_k(k_max, run.gallery_size)
    return [(k, rank_k_accuracy(run, k, counting)) for k in range(1, k_max + 1)]


@dataclass(frozen=True)
class EvalReport:
    """Accuracy table: one row per descriptor, one column per (metric, rank)."""

    descriptors: tuple[str, ...]
    metrics: tuple[str, ...]
    ranks: tuple[int, ...]
    accuracy: dict = field(repr=False)
    mode: str = "dense"
    counting: str = "cumulative"
    probes: int = 0
    gallery: int = 0

    def cell(self, descriptor: str, metric, rank: int) -> float:
        return self.accuracy[(descriptor, Metric.parse(metric).value, rank)]

    def columns(self) -> list[tuple[str, int]]:
        return [(m, k) for k in self.ranks for m in self.metrics]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "counting": self.counting,
            "probes": self.probes,
            "gallery": self.gallery,
            "metrics": list(self.metrics),
            "ranks": list(self.ranks),
            "rows": [
                {
                    "descriptor": d,
                    "accuracy": {
                        m: {str(k): self.accuracy[(d, m, k)] for k in self.ranks} for m in self.metrics
                    },
                }
                for d in self.descriptors
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["descriptor", "metric", "rank", "accuracy"])
        for d in self.descriptors:
            for m, k in self.columns():
                writer.writerow([d, m, k, f"{self.accuracy[(d, m, k)]:.2f}"])
        return out.getvalue()

    def to_text(self) -> str:
        cols = self.columns()
        head = ["descriptor"] + [f"{m}@{k}" for m, k in cols]
        body = [[d] + [f"{self.accuracy[(d, m, k)]:.2f}" for m, k in cols] for d in self.descriptors]
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]

        def fmt(row):
            return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))

        lines = [fmt(head), "  ".join("-" * w for w in widths)] + [fmt(r) for r in body]
        return "\n".join(lines) + "\n"


def compare_descriptors(
    manifest: DatasetManifest,
    descriptors: Iterable[Descriptor | str],
    metrics: Iterable,
    ranks: Iterable[int] = (1,),
    mode: str = "dense",
    counting: str = "cumulative",
    workers: int = 1,
    images: dict[str, GrayImage] | None = None,
    on_run=None,
) -> EvalReport:
    """Evaluate every descriptor x metric pair over the same manifest.

    ``on_run``, if given, is called with each finished IdentificationRun
    (e.g. to dump score matrices or CMC curves).
    """
    descriptors = [get_descriptor(d) if isinstance(d, str) else d for d in descriptors]
    metrics = [Metric.parse(m) for m in metrics]
    ranks = [int(k) for k in ranks]
    if not descriptors:
        raise ValidationError("at least one descriptor is required")
    if not metrics:
        raise ValidationError("at least one metric is required")
    if not ranks:
        raise ValidationError("at least one rank is required")
    if counting not in COUNTING:
        raise ValidationError(f"unknown counting {counting!r}")
    gallery, probes = manifest.gallery, manifest.probes
    if not probes:
        raise ValidationError("manifest has no probe entries")
    if not gallery:
        raise ValidationError("manifest has no gallery entries")
    for k in ranks:
        _check_k(k, len(gallery))
    if images is None:
        images = load_manifest_images(manifest, workers)

    accuracy = {}
    for d in descriptors:
        all_codes = extract_codes([images[e.path] for e in gallery + probes], d, mode, workers)
        codes = all_codes[: len(gallery)], all_codes[len(gallery) :]
        for m in metrics:
            run = run_identification(manifest, d, m, mode, workers, codes=codes)
            if on_run is not None:
                on_run(run)
            for k in ranks:
                accuracy[(d.label, m.value, k)] = round(rank_k_accuracy(run, k, counting), 2)
    return EvalReport(
        tuple(d.label for d in descriptors),
        tuple(m.value for m in metrics),
        tuple(ranks),
        accuracy,
        mode,
        counting,
        len(probes),
        len(gallery),
    )


def split_entries(
    entries: Iterable[tuple[str, str]], probes_per_subject: int = 1, seed: int = 0
) -> DatasetManifest:
    """Assign ``probes_per_subject`` random images of each subject to the probe set.

    At least one image per subject always stays in the gallery, so subjects
    with a single image contribute no probes.
    """
    if probes_per_subject < 1:
        raise ValidationError("probes_per_subject must be >= 1")
    entries = list(entries)
    by_subject = defaultdict(list)
    for path, subject in entries:
        by_subject[subject].append(path)
    rng = random.Random(seed)
    probe_paths = set()
    for subject in sorted(by_subject):
        paths = sorted(by_subject[subject])
        n = min(probes_per_subject, len(paths) - 1)
        if n > 0:
            probe_paths.update(rng.sample(paths, n))
    return DatasetManifest(
        tuple(ManifestEntry(p, s, "probe" if p in probe_paths else "gallery") for p, s in entries)
    )
