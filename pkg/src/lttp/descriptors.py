"""Name-based access to every descriptor, used by the pipeline and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import baselines, reference
from .baselines import DEFAULT_LTP_THRESHOLD
from .errors import ValidationError
from .image import GrayImage
from .pattern import TransformedImage, Variant, lttp_transform

LTTP_NAMES = ("lttp-ld", "lttp-lb", "lttp-rd", "lttp-rb")
DESCRIPTOR_NAMES = LTTP_NAMES + ("lbp", "ltp", "lgs")


@dataclass(frozen=True)
class Descriptor:
    name: str
    ltp_threshold: int = DEFAULT_LTP_THRESHOLD

    def __post_init__(self):
        if self.name not in DESCRIPTOR_NAMES:
            raise ValidationError(
                f"unknown descriptor {self.name!r}; expected one of {', '.join(DESCRIPTOR_NAMES)}"
            )
        baselines.check_threshold(self.ltp_threshold)

    @property
    def label(self) -> str:
        if self.name == "ltp":
            return f"ltp(t={self.ltp_threshold})"
        return self.name

    def transform(self, img: GrayImage, mode: str = "dense") -> list[TransformedImage]:
        """Code planes for ``img``; LTP yields two (upper, lower), the rest one."""
        if self.name in LTTP_NAMES:
            return [lttp_transform(img, _variant(self.name), mode)]
        if self.name == "lbp":
            return [baselines.lbp_transform(img, mode)]
        if self.name == "lgs":
            return [baselines.lgs_transform(img, mode)]
        return list(baselines.ltp_transform(img, self.ltp_threshold, mode))

    def codes(self, img: GrayImage, mode: str = "dense") -> np.ndarray:
        """Flattened uint8 codes (planes concatenated in order)."""
        return np.concatenate([t.codes.ravel() for t in self.transform(img, mode)])

    def feature(self, img: GrayImage, mode: str = "dense") -> np.ndarray:
        return self.codes(img, mode).astype(np.float64)

    def reference_codes(self, img: GrayImage, mode: str = "dense") -> np.ndarray:
        if self.name in LTTP_NAMES:
            planes = [reference.lttp_codes(img, _variant(self.name), mode)]
        elif self.name == "lbp":
            planes = [reference.lbp_codes(img, mode)]
        elif self.name == "lgs":
            planes = [reference.lgs_codes(img, mode)]
        else:
            planes = list(reference.ltp_codes(img, self.ltp_threshold, mode))
        return np.concatenate([p.ravel() for p in planes])


def _variant(name: str) -> Variant:
    return Variant(name.split("-", 1)[1].upper())


def get_descriptor(name: str, ltp_threshold: int = DEFAULT_LTP_THRESHOLD) -> Descriptor:
    return Descriptor(name, ltp_threshold)
