"""LBP, LTP and LGS baseline codes.

All three share the LTTP site layout (dense interior pixels or 3x3 block
centres) and the same tie rule: a zero difference sets the bit.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .image import GrayImage
from .pattern import TransformedImage, neighbor_planes, pack_bits

DEFAULT_LTP_THRESHOLD = 5

# row-major neighbour order, centre skipped
RING = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

# directed edges of the local graph, in visit order; (0, 0) is the target
LGS_EDGES = (
    ((0, 0), (-1, -1)),
    ((-1, -1), (1, -1)),
    ((1, -1), (0, 0)),
    ((0, 0), (0, 1)),
    ((0, 1), (-1, 1)),
    ((-1, 1), (1, 1)),
    ((1, 1), (0, 1)),
    ((0, 1), (0, 0)),
)
LGS_STENCIL = tuple(sorted({p for edge in LGS_EDGES for p in edge}))


def lbp_transform(img: GrayImage, mode: str = "dense") -> TransformedImage:
    planes = neighbor_planes(img, mode)
    center = planes[(0, 0)]
    return TransformedImage(pack_bits([planes[o] >= center for o in RING]), "lbp", mode)


def lbp_histogram(img: GrayImage, mode: str = "dense") -> np.ndarray:
    """256-bin code histogram, for exploratory use; the pipeline uses raw codes."""
    codes = lbp_transform(img, mode).codes
    return np.bincount(codes.ravel(), minlength=256).astype(np.float64)


def check_threshold(t) -> int:
    if isinstance(t, bool) or int(t) != t or t < 0:
        raise ValidationError(f"LTP threshold must be a non-negative integer, got {t!r}")
    return int(t)


def ltp_transform(
    img: GrayImage, t: int = DEFAULT_LTP_THRESHOLD, mode: str = "dense"
) -> tuple[TransformedImage, TransformedImage]:
    """Upper and lower binary planes of the dead-zone ternary pattern.

    A neighbour ``n`` around centre ``c`` is +1 when ``n >= c + t`` and -1
    when ``n <= c - t``; the upper plane holds the +1 bits, the lower plane
    the -1 bits.
    """
    t = check_threshold(t)
    planes = neighbor_planes(img, mode)
    center = planes[(0, 0)]
    upper = pack_bits([planes[o] >= center + t for o in RING])
    lower = pack_bits([planes[o] <= center - t for o in RING])
    return (
        TransformedImage(upper, "ltp-upper", mode),
        TransformedImage(lower, "ltp-lower", mode),
    )


def ltp_feature(img: GrayImage, t: int = DEFAULT_LTP_THRESHOLD, mode: str = "dense") -> np.ndarray:
    upper, lower = ltp_transform(img, t, mode)
    return np.concatenate([upper.feature(), lower.feature()])


def lgs_transform(img: GrayImage, mode: str = "dense") -> TransformedImage:
    planes = neighbor_planes(img, mode)
    return TransformedImage(pack_bits([planes[p] >= planes[q] for p, q in LGS_EDGES]), "lgs", mode)
