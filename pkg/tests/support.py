"""Shared test helpers and the acceptance-criteria result log."""

import time
from contextlib import contextmanager

import numpy as np

from lttp import GrayImage

# window whose tree nodes are A=9 B=9 C=6 D=8 E=8 F=5 G=11 H=7 I=10
WORKED_WINDOW = [[9, 6, 8], [8, 9, 5], [11, 7, 10]]

ACCEPTANCE = {}


@contextmanager
def criterion(number, title, time_limit=None):
    entry = {"title": title, "status": "FAIL", "detail": ""}
    ACCEPTANCE[number] = entry
    t0 = time.perf_counter()
    try:
        yield entry
        elapsed = time.perf_counter() - t0
        entry["elapsed"] = elapsed
        if time_limit is not None:
            assert elapsed < time_limit, f"runtime {elapsed:.2f}s exceeds {time_limit}s"
        entry["status"] = "PASS"
    except BaseException as exc:
        entry.setdefault("elapsed", time.perf_counter() - t0)
        if not entry["detail"]:
            entry["detail"] = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        raise


def random_image(rng, height, width, high=256):
    return GrayImage(rng.integers(0, high, size=(height, width)))


def random_lut(rng, levels):
    """Strictly increasing map from range(levels) into 0..255."""
    return np.sort(rng.choice(256, size=levels, replace=False))


def remap(img, lut):
    return GrayImage(lut[img.pixels])


def remap_set(n_subjects=20, size=32, seed=0, levels=200):
    """Gallery of random textures; each probe is a strictly increasing remap of its gallery image."""
    from lttp.image import make_manifest

    rng = np.random.default_rng(seed)
    images, entries = {}, []
    for s in range(n_subjects):
        g = random_image(rng, size, size, high=levels)
        images[f"g{s:02d}.pgm"] = g
        images[f"p{s:02d}.pgm"] = remap(g, random_lut(rng, levels))
        entries += [(f"g{s:02d}.pgm", f"s{s:02d}", "gallery"), (f"p{s:02d}.pgm", f"s{s:02d}", "probe")]
    return make_manifest(entries), images


def noisy_set(n_subjects=20, size=32, seed=7, spread=10, sigma=30.0, per_subject=1):
    """Subjects share one base texture; probes add Gaussian noise, so rank-1 is imperfect."""
    from lttp.image import make_manifest

    rng = np.random.default_rng(seed)
    base = rng.integers(60, 196, size=(size, size))
    images, entries = {}, []
    for s in range(n_subjects):
        subject = np.clip(base + rng.integers(-spread, spread + 1, size=base.shape), 0, 255)
        for j in range(per_subject):
            g = np.clip(subject + rng.integers(-2, 3, size=base.shape), 0, 255) if j else subject
            images[f"g{s:02d}_{j}.pgm"] = GrayImage(g)
            entries.append((f"g{s:02d}_{j}.pgm", f"s{s:02d}", "gallery"))
        p = np.clip(np.round(subject + rng.normal(0.0, sigma, size=base.shape)), 0, 255)
        images[f"p{s:02d}.pgm"] = GrayImage(p)
        entries.append((f"p{s:02d}.pgm", f"s{s:02d}", "probe"))
    return make_manifest(entries), images


def self_match_set(n_subjects=6, size=12, seed=0):
    from lttp.image import make_manifest

    rng = np.random.default_rng(seed)
    images, entries = {}, []
    for s in range(n_subjects):
        images[f"i{s}.pgm"] = random_image(rng, size, size)
        entries += [(f"i{s}.pgm", f"s{s}", "gallery"), (f"i{s}.pgm", f"s{s}", "probe")]
    return make_manifest(entries), images


def brute_force_accuracy(scores_csv_text, gallery_order, probe_subjects, k):
    """Rank-k accuracy recomputed from a raw score dump, ignoring its rank column."""
    import csv as _csv

    rows = list(_csv.DictReader(scores_csv_text.splitlines()))
    per_probe = {}
    for r in rows:
        per_probe.setdefault(r["probe"], []).append(r)
    hits = 0
    for probe, items in per_probe.items():
        higher = items[0]["metric"] == "CS"
        keyed = [(-float(r["score"]) if higher else float(r["score"]), gallery_order.index(r["gallery"]), r["subject"]) for r in items]
        keyed.sort()
        if probe_subjects[probe] in [subj for _, _, subj in keyed[:k]]:
            hits += 1
    return 100.0 * hits / len(per_probe)
