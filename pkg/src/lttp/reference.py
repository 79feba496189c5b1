"""Straightforward per-pixel implementations used as oracles for the vectorised kernels.

These are deliberately slow: every site builds its window explicitly and
walks the bit order with plain Python integers.
"""

from __future__ import annotations

import numpy as np

from .baselines import LGS_EDGES, RING, check_threshold
from .image import GrayImage, partition_blocks, require_min_size
from .pattern import build_ternary_tree, check_mode, encode_lttp, label_edges


def _windows(img: GrayImage, mode: str):
    """Yield (row, col, 3x3 window) in output order."""
    check_mode(mode)
    require_min_size(img)
    px = img.pixels
    if mode == "dense":
        shape = (img.height - 2, img.width - 2)
        for r in range(shape[0]):
            for c in range(shape[1]):
                yield r, c, px[r : r + 3, c : c + 3]
    else:
        grid = partition_blocks(img)
        for (r0, c0), block in zip(grid.origins, grid.blocks):
            yield r0 // 3, c0 // 3, block


def _output_shape(img: GrayImage, mode: str) -> tuple[int, int]:
    if mode == "dense":
        return img.height - 2, img.width - 2
    return img.height // 3, img.width // 3


def _map_windows(img, mode, fn) -> np.ndarray:
    out = np.zeros(_output_shape(img, mode), dtype=np.uint8)
    for r, c, win in _windows(img, mode):
        out[r, c] = fn([[int(v) for v in row] for row in win])
    return out


def _pack(bits) -> int:
    code = 0
    for b in bits:
        code = code * 2 + (1 if b else 0)
    return code


def lttp_codes(img: GrayImage, variant, mode: str = "dense") -> np.ndarray:
    return _map_windows(img, mode, lambda w: encode_lttp(label_edges(build_ternary_tree(w)), variant))


def lbp_codes(img: GrayImage, mode: str = "dense") -> np.ndarray:
    return _map_windows(img, mode, lambda w: _pack(w[1 + dr][1 + dc] >= w[1][1] for dr, dc in RING))


def ltp_codes(img: GrayImage, t: int = 5, mode: str = "dense") -> tuple[np.ndarray, np.ndarray]:
    t = check_threshold(t)

    def upper(w):
        return _pack(w[1 + dr][1 + dc] - w[1][1] >= t for dr, dc in RING)

    def lower(w):
        return _pack(w[1][1] - w[1 + dr][1 + dc] >= t for dr, dc in RING)

    return _map_windows(img, mode, upper), _map_windows(img, mode, lower)


def lgs_codes(img: GrayImage, mode: str = "dense") -> np.ndarray:
    def code(w):
        bits = []
        for (pr, pc), (qr, qc) in LGS_EDGES:
            bits.append(w[1 + pr][1 + pc] - w[1 + qr][1 + qc] >= 0)
        return _pack(bits)

    return _map_windows(img, mode, code)
