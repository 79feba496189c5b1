import numpy as np
import pytest

from lttp import GrayImage
from lttp.bench import KernelMismatchError, bench_descriptor, check_against_reference, code_sites
from lttp.descriptors import DESCRIPTOR_NAMES, Descriptor
from lttp.errors import ValidationError


def test_bench_row_fields():
    img = GrayImage(np.random.default_rng(0).integers(0, 256, (32, 32)))
    row = bench_descriptor(Descriptor("lttp-ld"), img, "dense", repetitions=10, warmup=1)
    assert row.sites == 30 * 30
    assert row.repetitions == 10
    assert row.min_ms <= row.median_ms <= row.max_ms
    assert row.mpix_per_s > 0


def test_block_sites():
    img = GrayImage(np.zeros((128, 128), dtype=np.uint8))
    assert code_sites(img, "block") * 9 <= code_sites(img, "dense")


def test_minimum_repetitions():
    with pytest.raises(ValidationError):
        bench_descriptor(Descriptor("lbp"), GrayImage(np.zeros((8, 8), dtype=np.uint8)), repetitions=5)


@pytest.mark.parametrize("name", DESCRIPTOR_NAMES)
def test_reference_gate_passes(name):
    img = GrayImage(np.random.default_rng(1).integers(0, 256, (20, 23)))
    for mode in ("dense", "block"):
        check_against_reference(Descriptor(name), img, mode)


def test_reference_gate_catches_mismatch(monkeypatch):
    d = Descriptor("lbp")
    img = GrayImage(np.random.default_rng(2).integers(0, 256, (9, 9)))
    monkeypatch.setattr(Descriptor, "codes", lambda self, img, mode="dense": np.zeros(49, dtype=np.uint8))
    with pytest.raises(KernelMismatchError):
        check_against_reference(d, img, "dense")
