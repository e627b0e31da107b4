"""
Unit tests for dataset generation, ingestion, label noise and augmentation.
"""

import numpy as np
import pytest

from relkd.data import (
    CIFAR10_ASYMMETRIC,
    CsvSchema,
    augment_views,
    build_transition,
    cifar100_asymmetric_map,
    inject_noise,
    load_csv,
    load_idx,
    make_blobs,
)
from relkd.exceptions import ConfigurationError, IngestionError
from relkd.models import AugSpec, Dataset, NoiseSpec, TransitionMatrix
from relkd.numerics import RngStream


def _clean(labels, C):
    labels = np.asarray(labels)
    return Dataset(features=np.zeros((labels.size, 1)), clean_labels=labels, noisy_labels=labels, num_classes=C)


class TestMakeBlobs:
    """Tests for make_blobs."""

    def test_balanced_counts(self):
        ds = make_blobs(100, 4, 2, 1.0, seed=0)
        assert np.bincount(ds.clean_labels, minlength=4).tolist() == [25, 25, 25, 25]

    def test_uneven_counts_differ_by_at_most_one(self):
        counts = np.bincount(make_blobs(10, 3, 2, 1.0, seed=0).clean_labels)
        assert counts.max() - counts.min() <= 1
        assert counts.sum() == 10

    def test_zero_spread_gives_centers(self):
        ds = make_blobs(20, 4, 3, 0.0, seed=5)
        first = ds.features[ds.clean_labels == 0]
        assert np.all(first == first[0])

    def test_starts_clean(self):
        ds = make_blobs(50, 5, 2, 1.0, seed=1)
        np.testing.assert_array_equal(ds.noisy_labels, ds.clean_labels)
        assert ds.noise_fraction == 0.0

    def test_same_seed_bitwise_identical(self):
        a = make_blobs(64, 4, 2, 1.0, seed=3)
        b = make_blobs(64, 4, 2, 1.0, seed=3)
        assert a.features.tobytes() == b.features.tobytes()
        np.testing.assert_array_equal(a.clean_labels, b.clean_labels)

    def test_too_few_rows(self):
        with pytest.raises(ConfigurationError, match="dataset.n_train"):
            make_blobs(3, 4, 2, 1.0, seed=0)

    def test_negative_spread(self):
        with pytest.raises(ConfigurationError):
            make_blobs(10, 2, 2, -1.0, seed=0)


class TestLoadCsv:
    """Tests for load_csv."""

    def test_headerless_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,1.0,0\n1.5,-2.0,1\n0.0,0.0,2\n")
        ds = load_csv(path)
        assert ds.n == 3 and ds.dim == 2 and ds.num_classes == 3
        np.testing.assert_array_equal(ds.clean_labels, [0, 1, 2])
        np.testing.assert_array_equal(ds.features[1], [1.5, -2.0])

    def test_header_detected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x0,x1,label\n0.5,1.0,0\n1.5,-2.0,1\n")
        assert load_csv(path).n == 2

    def test_explicit_class_count(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,0\n1.5,1\n")
        assert load_csv(path, CsvSchema(num_classes=10)).num_classes == 10

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError, match="not found"):
            load_csv(tmp_path / "nope.csv")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(IngestionError, match="Empty"):
            load_csv(path)

    def test_short_row_names_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,1.0,0\n1.5,1\n")
        with pytest.raises(IngestionError) as exc:
            load_csv(path)
        assert exc.value.line == 2

    def test_long_row_is_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,1.0,0\n1.5,1,1,1\n")
        with pytest.raises(IngestionError):
            load_csv(path)

    def test_unparsable_value_names_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y,label\n0.5,1.0,0\n1.5,abc,1\n")
        with pytest.raises(IngestionError) as exc:
            load_csv(path)
        assert exc.value.line == 3

    def test_blank_lines_do_not_shift_reported_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y,label\n\n0.5,1.0,0\n\n\n1.5,abc,1\n")
        with pytest.raises(IngestionError) as exc:
            load_csv(path)
        assert exc.value.line == 6

    def test_non_integer_label(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,1.0,0\n1.5,1.0,0.5\n")
        with pytest.raises(IngestionError, match="Non-integer"):
            load_csv(path)

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,0\n1.5,4\n")
        with pytest.raises(IngestionError, match="outside range") as exc:
            load_csv(path, CsvSchema(num_classes=3))
        assert exc.value.line == 2

    def test_negative_label(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0.5,0\n1.5,-1\n")
        with pytest.raises(IngestionError):
            load_csv(path)


class TestLoadIdx:
    """Tests for the IDX reader."""

    @staticmethod
    def _write(path, code, dims, payload):
        header = bytes([0, 0, code, len(dims)]) + b"".join(d.to_bytes(4, "big") for d in dims)
        path.write_bytes(header + payload)

    def test_images_and_labels(self, tmp_path):
        images = np.array([[[0, 255], [255, 0]], [[255, 255], [0, 0]]], dtype=np.uint8)
        self._write(tmp_path / "img.idx", 0x08, [2, 2, 2], images.tobytes())
        self._write(tmp_path / "lab.idx", 0x08, [2], bytes([1, 0]))
        ds = load_idx(tmp_path / "img.idx", tmp_path / "lab.idx", num_classes=2)
        np.testing.assert_array_equal(ds.features[0], [0.0, 1.0, 1.0, 0.0])
        np.testing.assert_array_equal(ds.clean_labels, [1, 0])

    def test_bad_magic(self, tmp_path):
        (tmp_path / "bad.idx").write_bytes(b"\x01\x02\x03\x04")
        with pytest.raises(IngestionError, match="magic"):
            load_idx(tmp_path / "bad.idx", tmp_path / "bad.idx")

    def test_count_mismatch(self, tmp_path):
        self._write(tmp_path / "img.idx", 0x08, [2, 1], bytes([1, 2]))
        self._write(tmp_path / "lab.idx", 0x08, [3], bytes([0, 1, 0]))
        with pytest.raises(IngestionError):
            load_idx(tmp_path / "img.idx", tmp_path / "lab.idx")


class TestBuildTransition:
    """Tests for build_transition."""

    def test_symmetric_example(self):
        T = build_transition(NoiseSpec("symmetric", 0.3), 4)
        np.testing.assert_allclose(np.diag(T.probs), 0.7)
        np.testing.assert_allclose(T.probs[0, 1:], 0.1)

    def test_pairflip_example(self):
        T = build_transition(NoiseSpec("pairflip", 0.45), 3)
        np.testing.assert_allclose(T.probs, [[0.55, 0.45, 0.0], [0.0, 0.55, 0.45], [0.45, 0.0, 0.55]])

    def test_asymmetric_example(self):
        T = build_transition(NoiseSpec("asymmetric", 0.4, class_map={2: 0}), 3)
        np.testing.assert_allclose(T.probs, [[1, 0, 0], [0, 1, 0], [0.4, 0, 0.6]])

    def test_zero_rate_is_identity(self):
        for kind, cmap in (("symmetric", None), ("pairflip", None), ("asymmetric", {0: 1})):
            T = build_transition(NoiseSpec(kind, 0.0, class_map=cmap), 5)
            np.testing.assert_array_equal(T.probs, np.eye(5))

    @pytest.mark.parametrize("kind,cmap", [("symmetric", None), ("pairflip", None), ("asymmetric", {1: 2, 3: 0})])
    @pytest.mark.parametrize("rate", [0.0, 0.2, 0.45, 1.0])
    def test_row_stochastic(self, kind, cmap, rate):
        T = build_transition(NoiseSpec(kind, rate, class_map=cmap), 6)
        assert np.all(T.probs >= 0)
        np.testing.assert_allclose(T.probs.sum(axis=1), 1.0, atol=1e-12)

    def test_cifar10_preset(self):
        T = build_transition(NoiseSpec("asymmetric", 0.4, preset="cifar10"), 10)
        assert T.probs[9, 1] == pytest.approx(0.4)
        assert T.probs[3, 5] == pytest.approx(0.4) and T.probs[5, 3] == pytest.approx(0.4)
        assert T.probs[0, 0] == 1.0
        assert set(CIFAR10_ASYMMETRIC) == {9, 2, 4, 3, 5}

    def test_cifar100_map_rotates_within_blocks(self):
        cmap = cifar100_asymmetric_map(100)
        assert cmap[0] == 1 and cmap[4] == 0 and cmap[99] == 95
        assert sorted(cmap.values()) == list(range(100))

    def test_rate_out_of_range(self):
        with pytest.raises(ConfigurationError, match="noise.rate"):
            build_transition(NoiseSpec("symmetric", 1.2), 3)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError, match="noise.kind"):
            build_transition(NoiseSpec("flipflop", 0.2), 3)

    def test_duplicate_targets_rejected(self):
        with pytest.raises(ConfigurationError, match="distinct"):
            build_transition(NoiseSpec("asymmetric", 0.2, class_map={0: 2, 1: 2}), 3)

    def test_asymmetric_needs_map(self):
        with pytest.raises(ConfigurationError):
            build_transition(NoiseSpec("asymmetric", 0.2), 3)


class TestInjectNoise:
    """Tests for inject_noise."""

    def test_zero_rate_leaves_labels(self):
        ds = _clean(np.arange(1000) % 4, 4)
        out = inject_noise(ds, build_transition(NoiseSpec("symmetric", 0.0), 4), RngStream(0))
        np.testing.assert_array_equal(out.noisy_labels, ds.clean_labels)

    def test_clean_labels_and_features_unchanged(self):
        ds = make_blobs(200, 4, 2, 1.0, seed=0)
        out = inject_noise(ds, build_transition(NoiseSpec("symmetric", 0.5), 4), RngStream(0))
        np.testing.assert_array_equal(out.clean_labels, ds.clean_labels)
        np.testing.assert_array_equal(out.features, ds.features)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_symmetric_rate_concentrates(self, seed):
        n = 100_000
        ds = _clean(np.arange(n) % 10, 10)
        out = inject_noise(ds, build_transition(NoiseSpec("symmetric", 0.2), 10), RngStream(seed))
        sigma = np.sqrt(n * 0.2 * 0.8)
        assert abs(out.corruption_mask.sum() - 0.2 * n) <= 4 * sigma
        assert abs(out.noise_fraction - 0.2) <= 0.01

    def test_symmetric_spreads_over_other_classes(self):
        n = 100_000
        ds = _clean(np.zeros(n, dtype=np.int64), 5)
        out = inject_noise(ds, build_transition(NoiseSpec("symmetric", 0.4), 5), RngStream(9))
        counts = np.bincount(out.noisy_labels, minlength=5) / n
        np.testing.assert_allclose(counts[1:], 0.1, atol=0.01)

    def test_asymmetric_only_moves_along_map(self):
        cmap = {0: 1, 2: 3}
        ds = _clean(np.arange(20_000) % 5, 5)
        out = inject_noise(ds, build_transition(NoiseSpec("asymmetric", 0.45, class_map=cmap), 5), RngStream(1))
        moved = out.corruption_mask
        assert moved.any()
        for clean, noisy in zip(out.clean_labels[moved], out.noisy_labels[moved]):
            assert cmap[int(clean)] == int(noisy)
        assert not moved[np.isin(out.clean_labels, [1, 3, 4])].any()

    def test_pairflip_goes_to_next_class(self):
        ds = _clean(np.arange(20_000) % 6, 6)
        out = inject_noise(ds, build_transition(NoiseSpec("pairflip", 0.45), 6), RngStream(2))
        moved = out.corruption_mask
        np.testing.assert_array_equal(out.noisy_labels[moved], (out.clean_labels[moved] + 1) % 6)

    def test_rate_one_symmetric_corrupts_every_label(self):
        ds = _clean(np.arange(500) % 3, 3)
        out = inject_noise(ds, build_transition(NoiseSpec("symmetric", 1.0), 3), RngStream(0))
        assert out.corruption_mask.all()

    def test_thread_count_does_not_change_draws(self):
        ds = _clean(np.arange(40_000) % 7, 7)
        T = build_transition(NoiseSpec("symmetric", 0.3), 7)
        one = inject_noise(ds, T, RngStream(4), threads=1)
        four = inject_noise(ds, T, RngStream(4), threads=4)
        np.testing.assert_array_equal(one.noisy_labels, four.noisy_labels)

    def test_class_count_mismatch(self):
        with pytest.raises(ConfigurationError):
            inject_noise(_clean([0, 1], 2), TransitionMatrix(np.eye(3)), RngStream(0))


class TestAugmentViews:
    """Tests for augment_views."""

    def test_views_differ_and_keep_shape(self):
        x = np.ones((8, 5))
        views = augment_views(x, AugSpec(sigma=0.1, mask_frac=0.2), RngStream(0))
        assert views.v.shape == x.shape and views.v_prime.shape == x.shape
        assert not np.array_equal(views.v, views.v_prime)

    def test_identity_settings(self):
        x = np.arange(12.0).reshape(3, 4)
        views = augment_views(x, AugSpec(sigma=0.0, mask_frac=0.0), RngStream(0))
        np.testing.assert_array_equal(views.v, x)
        np.testing.assert_array_equal(views.v_prime, x)

    def test_deterministic(self):
        x = np.ones((4, 3))
        a = augment_views(x, AugSpec(), RngStream(6))
        b = augment_views(x, AugSpec(), RngStream(6))
        np.testing.assert_array_equal(a.v, b.v)

    def test_image_crop_without_padding_only_flips(self):
        img = np.arange(2 * 3 * 1, dtype=np.float64).reshape(1, -1)
        views = augment_views(img, AugSpec(kind="image", image_shape=(2, 3, 1), pad=0), RngStream(0))
        grid = img.reshape(2, 3)
        assert any(np.array_equal(views.v.reshape(2, 3), g) for g in (grid, grid[:, ::-1]))

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            augment_views(np.ones((2, 2)), AugSpec(kind="rotate"), RngStream(0))
