"""Local Ternary Tree Pattern codes.

Each interior pixel roots a 9-node ternary tree over its 3x3 neighbourhood::

            A
          / | \\
         B  C  D
         |  /|\\ |
         E F G H I

Neighbours are bound to nodes in row-major window order:

    B C D        (-1,-1) (-1,0) (-1,+1)
    E A F   <->  ( 0,-1) ( 0,0) ( 0,+1)
    G H I        (+1,-1) (+1,0) (+1,+1)

Every edge ``parent -> child`` is labelled 1 when ``parent >= child``. The
eight labels are read in one of four traversal orders and packed with the
first edge in the most significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .image import BLOCK_SIZE, GrayImage, block_grid_shape, require_min_size
from .errors import ValidationError

NODE_OFFSETS = {
    "A": (0, 0),
    "B": (-1, -1),
    "C": (-1, 0),
    "D": (-1, 1),
    "E": (0, -1),
    "F": (0, 1),
    "G": (1, -1),
    "H": (1, 0),
    "I": (1, 1),
}

# canonical edge order (same as the left depth-first traversal)
EDGES = (
    ("A", "B"),
    ("B", "E"),
    ("A", "C"),
    ("C", "F"),
    ("C", "G"),
    ("C", "H"),
    ("A", "D"),
    ("D", "I"),
)

MODES = ("dense", "block")


class Variant(str, enum.Enum):
    LD = "LD"
    LB = "LB"
    RD = "RD"
    RB = "RB"


def _edges(spec: str) -> tuple[tuple[str, str], ...]:
    return tuple((e[0], e[1]) for e in spec.split())


TRAVERSALS = {
    Variant.LD: _edges("AB BE AC CF CG CH AD DI"),
    Variant.LB: _edges("AB AC AD BE CF CG CH DI"),
    Variant.RD: _edges("AD DI AC CH CG CF AB BE"),
    Variant.RB: _edges("AD AC AB DI CH CG CF BE"),
}


class TernaryTree(NamedTuple):
    A: int
    B: int
    C: int
    D: int
    E: int
    F: int
    G: int
    H: int
    I: int  # noqa: E741

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return EDGES


class EdgeLabels(NamedTuple):
    """One bit per tree edge, in canonical edge order."""

    AB: int
    BE: int
    AC: int
    CF: int
    CG: int
    CH: int
    AD: int
    DI: int


def step(x) -> int:
    """1 for non-negative differences, else 0."""
    return 1 if x >= 0 else 0


def build_ternary_tree(window) -> TernaryTree:
    win = np.asarray(window)
    if win.shape != (3, 3):
        raise ValidationError(f"window must be 3x3, got shape {win.shape}")
    return TernaryTree(**{n: int(win[1 + dr, 1 + dc]) for n, (dr, dc) in NODE_OFFSETS.items()})


def label_edges(tree: TernaryTree) -> EdgeLabels:
    return EdgeLabels(*(step(getattr(tree, p) - getattr(tree, c)) for p, c in EDGES))


def encode_lttp(labels: EdgeLabels, variant: Variant | str) -> int:
    code = 0
    for p, c in TRAVERSALS[Variant(variant)]:
        code = (code << 1) | getattr(labels, p + c)
    return code


@dataclass(frozen=True, eq=False)
class TransformedImage:
    """Grid of 8-bit descriptor codes."""

    codes: np.ndarray
    descriptor: str
    mode: str = "dense"

    @property
    def width(self) -> int:
        return self.codes.shape[1]

    @property
    def height(self) -> int:
        return self.codes.shape[0]

    def to_gray_image(self) -> GrayImage:
        return GrayImage(self.codes)

    def feature(self) -> np.ndarray:
        return self.codes.ravel().astype(np.float64)


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    return mode


def neighbor_planes(img: GrayImage, mode: str = "dense") -> dict[tuple[int, int], np.ndarray]:
    """Views of the image shifted by every 3x3 offset, restricted to code sites.

    Dense sites are all interior pixels; block sites are the centres of the
    non-overlapping 3x3 tiles. Planes are int16 so differences never wrap.
    """
    check_mode(mode)
    require_min_size(img)
    px = img.pixels.astype(np.int16)
    if mode == "dense":
        rows, cols, stride = img.height - 2, img.width - 2, 1
    else:
        (rows, cols), stride = block_grid_shape(img.height, img.width), BLOCK_SIZE
    planes = {}
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            r0, c0 = 1 + dr, 1 + dc
            planes[(dr, dc)] = px[
                r0 : r0 + stride * (rows - 1) + 1 : stride,
                c0 : c0 + stride * (cols - 1) + 1 : stride,
            ]
    return planes


def pack_bits(bits) -> np.ndarray:
    """Pack a sequence of 8 boolean planes, first plane most significant."""
    code = np.zeros(bits[0].shape, dtype=np.uint8)
    for b in bits:
        code = (code << 1) | b.astype(np.uint8)
    return code


def lttp_transform(img: GrayImage, variant: Variant | str = Variant.LD, mode: str = "dense") -> TransformedImage:
    variant = Variant(variant)
    planes = neighbor_planes(img, mode)
    node = {n: planes[off] for n, off in NODE_OFFSETS.items()}
    bits = [node[p] >= node[c] for p, c in TRAVERSALS[variant]]
    return TransformedImage(pack_bits(bits), f"lttp-{variant.value.lower()}", mode)


def lttp_feature(img: GrayImage, variant: Variant | str = Variant.LD, mode: str = "dense") -> np.ndarray:
    return lttp_transform(img, variant, mode).feature()
