"""Cosine similarity, sum of absolute differences and gallery ranking."""

from __future__ import annotations

import csv
import enum
import io
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateVectorWarning, ValidationError


class Metric(str, enum.Enum):
    CS = "CS"
    SAD = "SAD"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValidationError(f"unknown metric {value!r}; expected CS or SAD") from None

    @property
    def higher_is_better(self) -> bool:
        return self is Metric.CS


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 1 or b.ndim != 1:
        raise ValidationError("feature vectors must be 1-D")
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValidationError("feature vectors must be non-empty")
    return a, b


def _widen(x: np.ndarray) -> np.ndarray:
    if np.issubdtype(x.dtype, np.integer) or x.dtype == np.bool_:
        return x.astype(np.int64)
    return x.astype(np.float64)


def cosine_similarity(a, b) -> float:
    a, b = _pair(a, b)
    a, b = a.astype(np.float64), b.astype(np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        warnings.warn("cosine similarity of a zero vector; returning 0", DegenerateVectorWarning, stacklevel=2)
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def sad(a, b) -> float:
    a, b = _pair(a, b)
    # integer features are summed exactly before widening
    return float(np.abs(_widen(a) - _widen(b)).sum())


def score_matrix(probes, gallery, metric) -> np.ndarray:
    """Pairwise scores, shape ``(len(probes), len(gallery))``."""
    metric = Metric.parse(metric)
    P, G = np.atleast_2d(np.asarray(probes)), np.atleast_2d(np.asarray(gallery))
    if P.shape[1] != G.shape[1]:
        raise ValidationError(f"length mismatch: probe {P.shape[1]} vs gallery {G.shape[1]}")
    if G.shape[0] == 0:
        raise ValidationError("empty gallery")
    if metric is Metric.CS:
        Pf, Gf = P.astype(np.float64), G.astype(np.float64)
        pn, gn = np.linalg.norm(Pf, axis=1), np.linalg.norm(Gf, axis=1)
        if np.any(pn == 0) or np.any(gn == 0):
            warnings.warn("zero feature vector; its cosine scores are 0", DegenerateVectorWarning, stacklevel=2)
        dots = Pf @ Gf.T
        denom = np.outer(pn, gn)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(denom > 0, dots / np.where(denom > 0, denom, 1.0), 0.0)
        return out
    Pw = P.astype(np.int32) if np.issubdtype(P.dtype, np.integer) else P.astype(np.float64)
    Gw = G.astype(np.int32) if np.issubdtype(G.dtype, np.integer) else G.astype(np.float64)
    out = np.empty((Pw.shape[0], Gw.shape[0]), dtype=np.float64)
    for i, p in enumerate(Pw):
        out[i] = np.abs(Gw - p).sum(axis=1, dtype=np.int64 if Gw.dtype.kind == "i" else np.float64)
    return out


def order_scores(scores, metric) -> np.ndarray:
    """Gallery indices best-first; equal scores keep ascending index order."""
    metric = Metric.parse(metric)
    scores = np.asarray(scores, dtype=np.float64)
    key = -scores if metric.higher_is_better else scores
    return np.argsort(key, kind="stable")


@dataclass(frozen=True)
class MatchScore:
    gallery_index: int
    subject: str
    score: float
    metric: Metric


@dataclass(frozen=True)
class RankedList:
    probe_id: str
    metric: Metric
    matches: tuple[MatchScore, ...]

    def __len__(self):
        return len(self.matches)

    def __getitem__(self, i) -> MatchScore:
        return self.matches[i]

    @property
    def best(self) -> MatchScore:
        return self.matches[0]

    def rank_of_subject(self, subject: str) -> int | None:
        """1-based rank of the first match with ``subject``, or None."""
        for pos, m in enumerate(self.matches, start=1):
            if m.subject == subject:
                return pos
        return None


def ranked_from_scores(scores, subjects: Sequence[str], metric, probe_id: str = "") -> RankedList:
    metric = Metric.parse(metric)
    scores = np.asarray(scores, dtype=np.float64)
    order = order_scores(scores, metric)
    return RankedList(
        probe_id,
        metric,
        tuple(MatchScore(int(i), subjects[i], float(scores[i]), metric) for i in order),
    )


def rank_gallery(probe, gallery: Sequence[tuple[str, np.ndarray]], metric, probe_id: str = "") -> RankedList:
    """Rank every gallery item against ``probe``; the first entry is the identification decision."""
    metric = Metric.parse(metric)
    if len(gallery) == 0:
        raise ValidationError("empty gallery")
    probe = np.asarray(probe)
    for _, vec in gallery:
        _pair(probe, vec)
    subjects = [s for s, _ in gallery]
    scores = score_matrix(probe[None, :], np.stack([np.asarray(v) for _, v in gallery]), metric)[0]
    return ranked_from_scores(scores, subjects, metric, probe_id)


SCORE_CSV_HEADER = ("probe", "gallery", "subject", "metric", "score", "rank")


def scores_to_csv(ranked: Sequence[RankedList], gallery_ids: Sequence[str]) -> str:
    """One row per (probe, gallery item); scores are written losslessly."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCORE_CSV_HEADER)
    for rl in ranked:
        for rank, m in enumerate(rl.matches, start=1):
            writer.writerow([rl.probe_id, gallery_ids[m.gallery_index], m.subject, m.metric.value, repr(m.score), rank])
    return out.getvalue()
