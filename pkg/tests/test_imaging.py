import io

import numpy as np
import pytest

from chaoskit.seqcore import EmptyWindowError, apply_permutation, DnaSequence
from chaoskit.cgr import (
    FcgrMatrix,
    SYMMETRIES,
    cell_center,
    fcgr_count,
    permutation_for_symmetry,
)
from chaoskit.imaging import (
    GrayImage,
    ResolutionError,
    pgm_bytes,
    read_pgm,
    render_cgr,
    render_fcgr,
    write_pgm,
)
from conftest import golden_bytes, random_dna


class TestRenderCgr:
    def test_acgt_r1_all_black(self):
        img = render_cgr("ACGT", 1)
        assert img.width == img.height == 2
        assert img.pixels == bytes([0, 0, 0, 0])

    def test_aaaa_r1_single_black(self):
        img = render_cgr("AAAA", 1)
        # bottom-left quadrant (row 1, col 0) is the A cell
        assert img.pixels == bytes([255, 255, 0, 255])

    def test_some_pixel_always_black(self):
        rng = np.random.default_rng(60)
        for _ in range(10):
            r = int(rng.integers(1, 5))
            s = random_dna(rng, int(rng.integers(r, 50)))
            assert 0 in render_cgr(s, r).pixels

    def test_support_equals_count_support(self):
        rng = np.random.default_rng(61)
        s = random_dna(rng, 300)
        for r in (1, 2, 3, 5):
            img = np.frombuffer(render_cgr(s, r).pixels, dtype=np.uint8).reshape(
                2 ** r, 2 ** r
            )
            counts = fcgr_count(s, r).entries
            assert np.array_equal(img == 0, counts > 0)

    def test_validation(self):
        with pytest.raises(EmptyWindowError):
            render_cgr("AC", 3)
        with pytest.raises(ResolutionError):
            render_cgr("ACGT", 0)
        with pytest.raises(ResolutionError):
            render_cgr("ACGT", 17)

    def test_symmetry_pixel_remap(self):
        # rendering the permuted sequence equals remapping pixels through the
        # matching symmetry's action on cell centres
        rng = np.random.default_rng(62)
        s = random_dna(rng, 400)
        r = 3
        side = 2 ** r
        base = np.frombuffer(render_cgr(s, r).pixels, dtype=np.uint8).reshape(side, side)
        for name, h in SYMMETRIES.items():
            sigma = permutation_for_symmetry(h)
            transformed = np.frombuffer(
                render_cgr(apply_permutation(sigma, DnaSequence.from_string(s)), r).pixels,
                dtype=np.uint8,
            ).reshape(side, side)
            (a, b), (c, d) = h.matrix
            for i in range(side):
                for j in range(side):
                    centre = cell_center(r, i, j)
                    tx = a * centre.num_x + b * centre.num_y
                    ty = c * centre.num_x + d * centre.num_y
                    # invert the centre formula to find the image cell
                    jj = (tx + side - 1) // 2
                    ii = (side - 1 - ty) // 2
                    assert transformed[ii, jj] == base[i, j], name


class TestRenderFcgr:
    def test_extremes(self):
        m = FcgrMatrix(1, np.array([[0, 3], [1, 6]]))
        img = render_fcgr(m, mode="linear")
        arr = img.as_array()
        assert arr[1, 1] == 0  # max count -> black
        assert arr[0, 0] == 255  # zero count -> white

    def test_linear_midpoint(self):
        m = FcgrMatrix(1, np.array([[0, 0], [3, 6]]))
        arr = render_fcgr(m, mode="linear").as_array()
        assert arr[1, 0] == 128  # 255 - floor(255 * 0.5)

    def test_log_formula(self):
        m = FcgrMatrix(1, np.array([[0, 2], [5, 9]]))
        arr = render_fcgr(m, mode="log").as_array()
        expected = 255 - np.floor(255.0 * np.log1p(m.entries) / np.log1p(9)).astype(int)
        assert np.array_equal(arr, expected)

    def test_all_zero_all_white(self):
        m = FcgrMatrix(2, np.zeros((4, 4), dtype=np.int64))
        assert set(render_fcgr(m).pixels) == {255}

    def test_mode_validation(self):
        m = FcgrMatrix(1, np.zeros((2, 2), dtype=np.int64))
        with pytest.raises(ValueError):
            render_fcgr(m, mode="gamma")


class TestPgm:
    def test_one_pixel_white(self):
        img = GrayImage(1, 1, bytes([255]))
        assert pgm_bytes(img) == b"P5\n1 1\n255\n\xff"

    def test_two_by_two(self):
        img = GrayImage(2, 2, bytes([0, 1, 2, 3]))
        data = pgm_bytes(img)
        assert data == b"P5\n2 2\n255\n\x00\x01\x02\x03"

    def test_write_to_stream_and_path(self, tmp_path):
        img = GrayImage(2, 1, bytes([7, 8]))
        sink = io.BytesIO()
        write_pgm(img, sink)
        path = tmp_path / "img.pgm"
        write_pgm(img, str(path))
        assert sink.getvalue() == path.read_bytes()

    def test_read_back(self):
        img = GrayImage(3, 2, bytes(range(6)))
        parsed = read_pgm(pgm_bytes(img))
        assert (parsed.width, parsed.height, parsed.pixels) == (3, 2, img.pixels)

    def test_golden_acg_r1(self):
        assert pgm_bytes(render_cgr("ACG", 1)) == golden_bytes("cgr_acg_r1.pgm")

    def test_golden_fragment_r8(self, fragment01):
        assert pgm_bytes(render_cgr(fragment01, 8)) == golden_bytes(
            "cgr_fragment01_r8.pgm"
        )

    def test_pixel_buffer_validated(self):
        with pytest.raises(ValueError):
            GrayImage(2, 2, bytes(3))


def test_png_export_roundtrip(tmp_path):
    pytest.importorskip("PIL")
    from PIL import Image

    from chaoskit.imaging import write_png

    img = render_cgr("ACGT", 2)
    path = tmp_path / "out.png"
    write_png(img, str(path))
    loaded = Image.open(path)
    assert loaded.size == (4, 4)
    assert bytes(loaded.convert("L").tobytes()) == img.pixels
