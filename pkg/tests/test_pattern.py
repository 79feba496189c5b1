import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lttp import GrayImage, Variant, build_ternary_tree, encode_lttp, label_edges, lttp_feature, lttp_transform
from lttp.errors import ValidationError
from lttp.pattern import EDGES, TRAVERSALS, EdgeLabels, TernaryTree
from lttp.reference import lttp_codes
from support import WORKED_WINDOW, random_image, random_lut, remap

# parent->child value pairs of the worked tree, per traversal
WORKED_SEQUENCES = {
    "LD": "9>9 9>8 9>6 6>5 6>11 6>7 9>8 8>10",
    "LB": "9>9 9>6 9>8 9>8 6>5 6>11 6>7 8>10",
    "RD": "9>8 8>10 9>6 6>7 6>11 6>5 9>9 9>8",
    "RB": "9>8 9>6 9>9 8>10 6>7 6>11 6>5 9>8",
}


def oracle_code(sequence):
    bits = ""
    for pair in sequence.split():
        parent, child = map(int, pair.split(">"))
        bits += "1" if parent - child >= 0 else "0"
    return int(bits, 2)


def test_oracle_values_frozen():
    assert {v: oracle_code(s) for v, s in WORKED_SEQUENCES.items()} == {
        "LD": 242,
        "LB": 248,
        "RD": 167,
        "RB": 227,
    }


def test_build_tree_row_major():
    t = build_ternary_tree([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert t == TernaryTree(A=5, B=1, C=2, D=3, E=4, F=6, G=7, H=8, I=9)


def test_build_tree_constant():
    assert set(build_ternary_tree(np.full((3, 3), 7))) == {7}


def test_build_tree_rejects_bad_shape():
    with pytest.raises(ValidationError):
        build_ternary_tree(np.zeros((3, 4)))


def test_tree_topology():
    t = build_ternary_tree(np.zeros((3, 3)))
    assert len(t) == 9
    assert len(t.edges) == 8
    assert set(EDGES) == {("A", "B"), ("A", "C"), ("A", "D"), ("B", "E"), ("C", "F"), ("C", "G"), ("C", "H"), ("D", "I")}


def test_worked_example_labels():
    t = build_ternary_tree(WORKED_WINDOW)
    assert t == TernaryTree(9, 9, 6, 8, 8, 5, 11, 7, 10)
    assert tuple(label_edges(t)) == (1, 1, 1, 1, 0, 0, 1, 0)


@pytest.mark.parametrize("variant", ["LD", "LB", "RD", "RB"])
def test_worked_example_codes(variant):
    labels = label_edges(build_ternary_tree(WORKED_WINDOW))
    assert encode_lttp(labels, variant) == oracle_code(WORKED_SEQUENCES[variant])


def test_constant_labels_all_ones():
    labels = label_edges(build_ternary_tree(np.full((3, 3), 4)))
    assert tuple(labels) == (1,) * 8
    assert {encode_lttp(labels, v) for v in Variant} == {255}


def test_parent_below_child_gives_zero():
    t = TernaryTree(A=0, B=1, C=1, D=1, E=0, F=0, G=0, H=0, I=0)
    labels = label_edges(t)
    assert (labels.AB, labels.AC, labels.AD) == (0, 0, 0)
    assert (labels.BE, labels.CF, labels.DI) == (1, 1, 1)


def test_traversals_are_permutations():
    for order in TRAVERSALS.values():
        assert sorted(order) == sorted(EDGES)


def test_single_bit_positions():
    # one set label lands at the MSB-first position of that edge in each order
    for variant, order in TRAVERSALS.items():
        for pos, (p, c) in enumerate(order):
            labels = EdgeLabels(**{a + b: int((a, b) == (p, c)) for a, b in EDGES})
            assert encode_lttp(labels, variant) == 1 << (7 - pos)


def test_transform_worked_window_dense():
    ti = lttp_transform(GrayImage(WORKED_WINDOW), "LD", "dense")
    assert ti.codes.tolist() == [[242]]
    assert lttp_feature(GrayImage(WORKED_WINDOW), "LD").tolist() == [242.0]


@pytest.mark.parametrize("mode", ["dense", "block"])
@pytest.mark.parametrize("variant", list(Variant))
def test_constant_image(mode, variant):
    ti = lttp_transform(GrayImage(np.full((5, 5), 33)), variant, mode)
    assert ti.codes.shape == ((3, 3) if mode == "dense" else (1, 1))
    assert np.all(ti.codes == 255)


def test_constant_feature():
    f = lttp_feature(GrayImage(np.full((5, 5), 200)), "RB")
    assert f.dtype == np.float64
    assert f.tolist() == [255.0] * 9


def test_block_mode_6x6_matches_dense_centers():
    rng = np.random.default_rng(3)
    img = random_image(rng, 6, 6)
    for v in Variant:
        block = lttp_transform(img, v, "block").codes
        dense = lttp_transform(img, v, "dense").codes
        assert block.shape == (2, 2)
        # block (i, j) centre pixel (3i+1, 3j+1) is dense index (3i, 3j)
        assert np.array_equal(block, dense[0::3, 0::3])


def test_too_small_image():
    with pytest.raises(ValidationError):
        lttp_transform(GrayImage(np.zeros((2, 3), dtype=np.uint8)))


def test_unknown_mode():
    with pytest.raises(ValidationError):
        lttp_transform(GrayImage(np.zeros((3, 3), dtype=np.uint8)), "LD", "sparse")


def test_determinism():
    rng = np.random.default_rng(5)
    img = random_image(rng, 20, 17)
    copy = GrayImage(img.pixels.copy())
    assert np.array_equal(lttp_feature(img, "LB"), lttp_feature(copy, "LB"))


def _popcounts(window):
    labels = label_edges(build_ternary_tree(window))
    return {bin(encode_lttp(labels, v)).count("1") for v in Variant}


def test_popcount_exhaustive_ternary_windows():
    for values in itertools.product((0, 1, 2), repeat=9):
        assert len(_popcounts(np.array(values).reshape(3, 3))) == 1


@given(arrays(np.uint8, (3, 3)))
def test_popcount_random(window):
    assert len(_popcounts(window)) == 1


shapes = st.tuples(st.integers(3, 14), st.integers(3, 14))


@given(arrays(np.uint8, shapes), st.sampled_from(list(Variant)), st.sampled_from(["dense", "block"]))
@settings(max_examples=60, deadline=None)
def test_matches_reference(pixels, variant, mode):
    img = GrayImage(pixels)
    assert np.array_equal(lttp_transform(img, variant, mode).codes, lttp_codes(img, variant, mode))


@given(arrays(np.uint8, shapes))
@settings(max_examples=60, deadline=None)
def test_dense_block_consistency(pixels):
    img = GrayImage(pixels)
    for v in Variant:
        block = lttp_transform(img, v, "block").codes
        dense = lttp_transform(img, v, "dense").codes
        h, w = block.shape
        assert np.array_equal(block, dense[0 : 3 * h : 3, 0 : 3 * w : 3])


@given(arrays(np.uint8, shapes, elements=st.integers(0, 200)), st.integers(0, 55))
@settings(max_examples=60, deadline=None)
def test_translation_invariance(pixels, c):
    img = GrayImage(pixels)
    shifted = GrayImage(pixels.astype(int) + c)
    for v in Variant:
        assert np.array_equal(lttp_transform(img, v).codes, lttp_transform(shifted, v).codes)


def test_lut_invariance():
    rng = np.random.default_rng(11)
    for _ in range(20):
        levels = int(rng.integers(8, 256))
        img = random_image(rng, 12, 15, high=levels)
        lut = random_lut(rng, levels)
        for v in Variant:
            for mode in ("dense", "block"):
                assert np.array_equal(lttp_transform(img, v, mode).codes, lttp_transform(remap(img, lut), v, mode).codes)


def test_transformed_image_exports_as_gray():
    rng = np.random.default_rng(2)
    ti = lttp_transform(random_image(rng, 8, 9), "RD")
    g = ti.to_gray_image()
    assert (g.width, g.height) == (7, 6)
    assert np.array_equal(g.pixels, ti.codes)
