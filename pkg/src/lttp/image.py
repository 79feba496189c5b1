"""Grayscale images, netpbm/raw decoding, dataset manifests and 3x3 block tiling."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ImageFormatError, ManifestError, ManifestWarning, ValidationError

BLOCK_SIZE = 3
ROLES = ("gallery", "probe")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """An 8-bit grayscale image.

    ``pixels`` is a read-only ``(height, width)`` uint8 array.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValidationError(f"expected a 2-D intensity grid, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255 or not np.all(arr == np.round(arr))):
                raise ValidationError("intensities must be integers in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, order="C", copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes | Sequence[int]) -> "GrayImage":
        if isinstance(data, (bytes, bytearray)):
            arr = np.frombuffer(data, dtype=np.uint8)
        else:
            arr = np.asarray(data)
        if arr.size != width * height:
            raise ValidationError(f"data length {arr.size} != {width}x{height}")
        return cls(arr.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def data(self) -> bytes:
        """Row-major intensities."""
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height})"


def require_min_size(img: GrayImage, min_height: int = 3, min_width: int = 3) -> None:
    if img.height < min_height or img.width < min_width:
        raise ValidationError(
            f"image is {img.width}x{img.height}, need at least {min_width}x{min_height}"
        )


# --- netpbm ---------------------------------------------------------------

_MULTI_CHANNEL_MAGIC = {b"P3", b"P6"}
_GRAY_MAGIC = {b"P2", b"P5"}


def _header_tokens(buf: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    tokens = []
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos : pos + 1].isspace():
            pos += 1
        if pos < n and buf[pos : pos + 1] == b"#":
            while pos < n and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not buf[pos : pos + 1].isspace() and buf[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated netpbm header")
        tokens.append(buf[start:pos])
    return tokens, pos


def decode_netpbm(buf: bytes) -> GrayImage:
    magic = buf[:2]
    if magic in _MULTI_CHANNEL_MAGIC:
        raise ImageFormatError("channel count ≠ 1")
    if magic not in _GRAY_MAGIC:
        raise ImageFormatError(f"unsupported netpbm format {magic!r}")
    try:
        (w, h, maxval), pos = _header_tokens(buf, 3, 2)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise ImageFormatError(f"bad netpbm header: {exc}") from None
    if maxval != 255:
        raise ImageFormatError(f"maxval ≠ 255 (got {maxval})")
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"bad dimensions {width}x{height}")
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        pos += 1
        raster = buf[pos : pos + count]
        if len(raster) != count:
            raise ImageFormatError(f"raster truncated: {len(raster)} of {count} bytes")
        return GrayImage.from_bytes(width, height, raster)
    text = buf[pos:]
    # strip comments from the ASCII raster
    lines = [ln.split(b"#", 1)[0] for ln in text.splitlines()]
    try:
        values = np.array([int(t) for ln in lines for t in ln.split()], dtype=np.int64)
    except ValueError:
        raise ImageFormatError("non-integer sample in ASCII raster") from None
    if values.size != count:
        raise ImageFormatError(f"expected {count} samples, found {values.size}")
    if values.size and (values.min() < 0 or values.max() > 255):
        raise ImageFormatError("sample exceeds maxval")
    return GrayImage.from_bytes(width, height, values)


def encode_netpbm(img: GrayImage, binary: bool = True) -> bytes:
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode("ascii")
    if binary:
        return header + img.pixels.tobytes()
    out = io.StringIO()
    for row in img.pixels:
        out.write(" ".join(str(v) for v in row.tolist()))
        out.write("\n")
    return header + out.getvalue().encode("ascii")


def save_gray_image(img: GrayImage, path: str | Path, binary: bool = True) -> None:
    Path(path).write_bytes(encode_netpbm(img, binary=binary))


# --- raw + sidecar --------------------------------------------------------


def _load_raw(path: Path) -> GrayImage:
    sidecar = path.with_suffix(".json")
    if not sidecar.exists():
        raise ImageFormatError(f"raw image {path} has no sidecar {sidecar.name}")
    meta = json.loads(sidecar.read_text(encoding="utf-8"))
    try:
        width, height = int(meta["width"]), int(meta["height"])
    except (KeyError, TypeError, ValueError):
        raise ImageFormatError(f"sidecar {sidecar} needs integer width and height") from None
    if int(meta.get("channels", 1)) != 1:
        raise ImageFormatError("channel count ≠ 1")
    if int(meta.get("maxval", 255)) != 255:
        raise ImageFormatError(f"maxval ≠ 255 (got {meta['maxval']})")
    buf = path.read_bytes()
    if len(buf) != width * height:
        raise ImageFormatError(f"raw size {len(buf)} != {width}x{height}")
    return GrayImage.from_bytes(width, height, buf)


def _load_with_pillow(path: Path) -> GrayImage:
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError:  # pragma: no cover - optional dependency
        raise ImageFormatError(f"unsupported format: {path.name}") from None
    try:
        with Image.open(path) as im:
            im.load()
            mode, bands = im.mode, len(im.getbands())
            if bands != 1 or mode == "P":
                raise ImageFormatError("channel count ≠ 1")
            if mode != "L":
                raise ImageFormatError(f"maxval ≠ 255 (mode {mode})")
            return GrayImage(np.asarray(im))
    except UnidentifiedImageError:
        raise ImageFormatError(f"unsupported format: {path.name}") from None


def load_gray_image(path: str | Path) -> GrayImage:
    """Decode an 8-bit single-channel image.

    Supports binary/ASCII netpbm (P5/P2), headerless ``.raw`` files with a
    ``.json`` sidecar giving ``width`` and ``height``, and, when Pillow is
    installed, any single-channel 8-bit format it can read. Colour inputs
    are rejected rather than converted.
    """
    path = Path(path)
    if path.suffix.lower() == ".raw":
        return _load_raw(path)
    with open(path, "rb") as fh:
        head = fh.read(2)
    if len(head) == 2 and head[:1] == b"P" and head[1:2].isdigit():
        return decode_netpbm(path.read_bytes())
    return _load_with_pillow(path)


# --- manifests ------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    subject: str
    role: str


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    root: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for e in self.entries:
            if e.role not in ROLES:
                raise ManifestError(f"unknown role {e.role!r}")
            if (e.path, e.role) in seen:
                raise ManifestError(f"duplicate entry ({e.path}, {e.role})")
            seen.add((e.path, e.role))

    @property
    def gallery(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.role == "gallery"]

    @property
    def probes(self) -> list[ManifestEntry]:
        return [e for e in self.entries if e.role == "probe"]

    def resolve(self, entry: ManifestEntry) -> Path:
        p = Path(entry.path)
        return p if p.is_absolute() else self.root / p

    def unmatched_probe_subjects(self) -> list[str]:
        gallery_subjects = {e.subject for e in self.gallery}
        return sorted({e.subject for e in self.probes} - gallery_subjects)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["path", "subject", "role"])
        for e in self.entries:
            writer.writerow([e.path, e.subject, e.role])
        return out.getvalue()


def parse_manifest(text: str, root: str | Path = ".") -> DatasetManifest:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ManifestError("empty manifest")
    reader = csv.reader(lines)
    header = [h.strip().lower() for h in next(reader)]
    if header != ["path", "subject", "role"]:
        raise ManifestError(f"missing header 'path,subject,role' (got {','.join(header)!r})")
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise ManifestError(f"row {lineno}: expected 3 fields, got {len(row)}")
        path, subject, role = (c.strip() for c in row)
        if role not in ROLES:
            raise ManifestError(f"row {lineno}: unknown role {role!r}")
        entries.append(ManifestEntry(path, subject, role))
    if not entries:
        raise ManifestError("empty manifest")
    manifest = DatasetManifest(tuple(entries), Path(root))
    missing = manifest.unmatched_probe_subjects()
    if missing:
        warnings.warn(
            f"probe subject(s) without gallery images: {', '.join(missing)}",
            ManifestWarning,
            stacklevel=2,
        )
    return manifest


def load_manifest(path: str | Path) -> DatasetManifest:
    """Read a ``path,subject,role`` CSV; relative image paths resolve against its directory."""
    path = Path(path)
    return parse_manifest(path.read_text(encoding="utf-8"), root=path.parent)


def make_manifest(entries: Iterable[tuple[str, str, str]], root: str | Path = ".") -> DatasetManifest:
    return DatasetManifest(tuple(ManifestEntry(*e) for e in entries), Path(root))


# --- block tiling ---------------------------------------------------------


@dataclass(frozen=True)
class BlockGrid:
    rows: int
    cols: int
    origins: tuple[tuple[int, int], ...]
    blocks: tuple[np.ndarray, ...]
    block_size: int = BLOCK_SIZE


def block_grid_shape(height: int, width: int) -> tuple[int, int]:
    return height // BLOCK_SIZE, width // BLOCK_SIZE


def partition_blocks(img: GrayImage) -> BlockGrid:
    """Tile ``img`` into non-overlapping 3x3 blocks in row-major order.

    Trailing rows/columns that cannot fill a whole block are dropped.
    """
    require_min_size(img)
    rows, cols = block_grid_shape(img.height, img.width)
    origins = tuple((r * BLOCK_SIZE, c * BLOCK_SIZE) for r in range(rows) for c in range(cols))
    blocks = tuple(img.pixels[r : r + BLOCK_SIZE, c : c + BLOCK_SIZE] for r, c in origins)
    return BlockGrid(rows, cols, origins, blocks)
