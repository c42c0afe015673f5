import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from salmetrics import (
    ClassAnnotationSet,
    DegenerateRanks,  # noqa: F401  (namespace smoke: error types importable)
    EmptyDataset,
    InstanceShape,
    ParseError,
    RleCorrupt,
    RleLengthMismatch,
    SchemaError,
    area_fraction,
    class_union_mask,
    decode_rle,
    load_mask_png,
    parse_annotations,
    rasterize_polygon,
    scan_mask_dir,
)
from salmetrics.errors import DegeneratePolygonWarning

from oracles import compress_rle_counts, encode_rle_counts, point_in_polygon_mask


def write_doc(tmp_path, doc, name="ann.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def basic_doc():
    return {
        "images": [{"id": 1, "height": 6, "width": 6}],
        "annotations": [],
        "categories": [{"id": 1, "name": "a"}, {"id": 2, "name": "b"}, {"id": 3, "name": "c"}],
    }


SQUARE = [1.0, 1.0, 4.0, 1.0, 4.0, 4.0, 1.0, 4.0]


class TestParse:
    def test_two_annotations_one_class_grouped(self, tmp_path):
        doc = basic_doc()
        doc["annotations"] = [
            {"id": 1, "image_id": 1, "category_id": 3, "segmentation": [SQUARE], "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 3, "segmentation": [SQUARE], "iscrowd": 0},
        ]
        sets = parse_annotations(write_doc(tmp_path, doc))
        assert len(sets) == 1
        assert sets[0].class_id == 3
        assert len(sets[0].instances) == 2

    def test_two_classes_ordered(self, tmp_path):
        doc = basic_doc()
        doc["annotations"] = [
            {"id": 1, "image_id": 1, "category_id": 2, "segmentation": [SQUARE], "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 1, "segmentation": [SQUARE], "iscrowd": 0},
        ]
        sets = parse_annotations(write_doc(tmp_path, doc))
        assert [s.class_id for s in sets] == [1, 2]

    def test_grouping_count_matches_independent_pass(self, tmp_path):
        rng = np.random.default_rng(11)
        doc = {
            "images": [{"id": i, "height": 8, "width": 8} for i in range(1, 21)],
            "annotations": [],
            "categories": [{"id": c, "name": str(c)} for c in range(1, 6)],
        }
        for k in range(300):
            doc["annotations"].append(
                {
                    "id": k + 1,
                    "image_id": int(rng.integers(1, 21)),
                    "category_id": int(rng.integers(1, 6)),
                    "segmentation": [SQUARE],
                    "iscrowd": 0,
                }
            )
        expected_pairs = {(a["image_id"], a["category_id"]) for a in doc["annotations"]}
        sets = parse_annotations(write_doc(tmp_path, doc))
        assert len(sets) == len(expected_pairs)
        assert {(s.image_id, s.class_id) for s in sets} == expected_pairs

    def test_malformed_json_raises_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            parse_annotations(path)

    def test_missing_arrays_raise_schema_error(self, tmp_path):
        with pytest.raises(SchemaError):
            parse_annotations(write_doc(tmp_path, {"images": []}))

    def test_no_usable_pairs_raises_empty_dataset(self, tmp_path):
        with pytest.raises(EmptyDataset):
            parse_annotations(write_doc(tmp_path, basic_doc()))

    def test_unknown_image_skipped_with_warning(self, tmp_path):
        doc = basic_doc()
        doc["annotations"] = [
            {"id": 1, "image_id": 99, "category_id": 1, "segmentation": [SQUARE], "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 1, "segmentation": [SQUARE], "iscrowd": 0},
        ]
        with pytest.warns(UserWarning, match="unknown image"):
            sets = parse_annotations(write_doc(tmp_path, doc))
        assert len(sets) == 1

    def test_category_filter_and_crowd_flag(self, tmp_path):
        doc = basic_doc()
        rle = {"size": [6, 6], "counts": [6, 6, 24]}
        doc["annotations"] = [
            {"id": 1, "image_id": 1, "category_id": 1, "segmentation": [SQUARE], "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 2, "segmentation": rle, "iscrowd": 1},
        ]
        path = write_doc(tmp_path, doc)
        assert [s.class_id for s in parse_annotations(path)] == [1, 2]
        assert [s.class_id for s in parse_annotations(path, category_filter={2})] == [2]
        assert [s.class_id for s in parse_annotations(path, include_crowd=False)] == [1]


class TestDecodeRle:
    def test_single_background_run(self):
        mask = decode_rle([5 * 7], 5, 7)
        assert not mask.bits.any()

    def test_zero_length_leading_run(self):
        mask = decode_rle([0, 5 * 7], 5, 7)
        assert mask.bits.all()

    def test_column_major_order(self):
        # first run: 3 background pixels down column 0
        mask = decode_rle([3, 1, 8], 4, 3)
        expected = np.zeros((4, 3), dtype=bool)
        expected[3, 0] = True
        assert np.array_equal(mask.bits, expected)

    def test_round_trip_13x7(self):
        rng = np.random.default_rng(21)
        bits = rng.random((13, 7)) < 0.5
        counts = encode_rle_counts(bits)
        assert np.array_equal(decode_rle(counts, 13, 7).bits, bits)

    def test_compressed_round_trip(self):
        rng = np.random.default_rng(22)
        bits = rng.random((13, 7)) < 0.5
        data = compress_rle_counts(encode_rle_counts(bits))
        assert np.array_equal(decode_rle(data, 13, 7).bits, bits)
        assert np.array_equal(decode_rle(data.decode("ascii"), 13, 7).bits, bits)

    def test_length_mismatch(self):
        with pytest.raises(RleLengthMismatch):
            decode_rle([3, 4], 5, 7)

    def test_corrupt_bytes(self):
        with pytest.raises(RleCorrupt):
            decode_rle(b"\x20\x20", 2, 2)  # bytes below the counts alphabet
        with pytest.raises(RleCorrupt):
            decode_rle(bytes([48 + 0x20]), 2, 2)  # continuation with no next chunk

    @settings(deadline=None, max_examples=80)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 64), st.integers(1, 64))
    def test_round_trip_property(self, seed, h, w):
        rng = np.random.default_rng(seed)
        bits = rng.random((h, w)) < rng.uniform(0.05, 0.95)
        counts = encode_rle_counts(bits)
        assert np.array_equal(decode_rle(counts, h, w).bits, bits)
        compressed = compress_rle_counts(counts)
        assert np.array_equal(decode_rle(compressed, h, w).bits, bits)


class TestRasterizePolygon:
    def test_axis_aligned_square(self):
        mask = rasterize_polygon([SQUARE], 6, 6).bits
        expected = np.zeros((6, 6), dtype=bool)
        expected[1:4, 1:4] = True
        assert np.array_equal(mask, expected)

    def test_polygon_outside_grid_is_empty(self):
        # clamping flattens an entirely out-of-bounds triangle onto the border
        tri = [-10.0, -10.0, -4.0, -10.0, -4.0, -4.0]
        with pytest.warns(DegeneratePolygonWarning):
            mask = rasterize_polygon([tri], 6, 6).bits
        assert not mask.any()

    def test_union_of_disjoint_squares(self):
        a = [0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 2.0]
        b = [4.0, 4.0, 6.0, 4.0, 6.0, 6.0, 4.0, 6.0]
        union = rasterize_polygon([a, b], 6, 6).bits
        separate = rasterize_polygon([a], 6, 6).bits | rasterize_polygon([b], 6, 6).bits
        assert np.array_equal(union, separate)

    def test_matches_point_in_polygon_reference(self):
        rng = np.random.default_rng(31)
        from oracles import random_convex_polygon

        for _ in range(20):
            poly = random_convex_polygon(rng, 48, 48, 8)
            got = rasterize_polygon([poly.ravel().tolist()], 48, 48).bits
            ref = point_in_polygon_mask(poly, 48, 48)
            sym = np.logical_xor(got, ref).sum()
            assert sym <= 0.02 * max(1, ref.sum())

    def test_ring_validation(self):
        with pytest.raises(SchemaError):
            rasterize_polygon([[0.0, 0.0, 1.0]], 4, 4)
        with pytest.raises(SchemaError):
            rasterize_polygon([[0.0, 0.0, 1.0, 1.0]], 4, 4)


class TestClassUnionMask:
    def make_set(self, instances):
        return ClassAnnotationSet(
            image_id=1, image_height=6, image_width=6, class_id=1, instances=tuple(instances)
        )

    def test_singleton_union(self):
        inst = InstanceShape(kind="polygon", rings=(tuple(SQUARE),))
        mask = class_union_mask(self.make_set([inst]))
        assert np.array_equal(mask.bits, inst.materialize(6, 6).bits)

    def test_idempotent_or(self):
        inst = InstanceShape(kind="polygon", rings=(tuple(SQUARE),))
        mask = class_union_mask(self.make_set([inst, inst]))
        assert np.array_equal(mask.bits, inst.materialize(6, 6).bits)

    def test_mixed_polygon_and_rle(self):
        poly = InstanceShape(kind="polygon", rings=(tuple(SQUARE),))
        rle = InstanceShape(kind="rle", counts=(6, 6, 24))
        got = class_union_mask(self.make_set([poly, rle]))
        expected = poly.materialize(6, 6).bits | rle.materialize(6, 6).bits
        assert np.array_equal(got.bits, expected)

    def test_order_independent(self):
        poly = InstanceShape(kind="polygon", rings=(tuple(SQUARE),))
        rle = InstanceShape(kind="rle", counts=(6, 6, 24))
        a = class_union_mask(self.make_set([poly, rle]))
        b = class_union_mask(self.make_set([rle, poly]))
        assert np.array_equal(a.bits, b.bits)

    def test_area_fraction_bounds(self):
        poly = InstanceShape(kind="polygon", rings=(tuple(SQUARE),))
        rle = InstanceShape(kind="rle", counts=(0, 8, 28))
        union = class_union_mask(self.make_set([poly, rle]))
        fractions = [
            area_fraction(poly.materialize(6, 6)),
            area_fraction(rle.materialize(6, 6)),
        ]
        assert max(fractions) <= area_fraction(union) <= min(1.0, sum(fractions))

    def test_requires_instances(self):
        with pytest.raises(SchemaError):
            self.make_set([])


class TestMaskPngs:
    def test_load_and_scan(self, tmp_path):
        from salmetrics import BinaryMask, write_mask_png

        bits = np.zeros((5, 4), dtype=bool)
        bits[2, 1] = True
        write_mask_png(BinaryMask(bits), tmp_path / "7_3.png")
        write_mask_png(BinaryMask(bits), tmp_path / "7_12.png")
        entries = scan_mask_dir(tmp_path)
        assert [(e[0], e[1]) for e in entries] == [(7, 3), (7, 12)]
        loaded = load_mask_png(entries[0][2])
        assert np.array_equal(loaded.bits, bits)
