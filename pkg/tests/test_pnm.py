import io

import pytest
from hypothesis import given, strategies as st

from stegosampler.pnm import (
    BadHeader,
    BadMagic,
    ImageGrid,
    MaxvalUnsupported,
    ShortData,
    read_image,
    sequence_positions,
    write_image,
)


class TestRead:
    def test_p5_basic(self):
        g = read_image(b"P5 2 2 255\n" + bytes([0, 1, 2, 3]))
        assert (g.width, g.height, g.channels) == (2, 2, 1)
        assert bytes(g.data) == bytes([0, 1, 2, 3])

    def test_p6_single_pixel(self):
        g = read_image(b"P6 1 1 255\n" + bytes([10, 20, 30]))
        assert g.channels == 3
        assert (g.at(0, 0, 0), g.at(0, 0, 1), g.at(0, 0, 2)) == (10, 20, 30)

    def test_comments_and_whitespace(self):
        raw = b"P5 # a comment\n#another\n  2\t1 # w h\n255\n\x05\x06"
        g = read_image(raw)
        assert bytes(g.data) == b"\x05\x06"

    def test_short_data(self):
        with pytest.raises(ShortData):
            read_image(b"P5 2 2 255\n\x00\x01\x02")

    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            read_image(b"P4 2 2 255\n\x00")

    def test_bad_header(self):
        with pytest.raises(BadHeader):
            read_image(b"P5 2 x 255\n\x00")

    def test_maxval(self):
        with pytest.raises(MaxvalUnsupported):
            read_image(b"P5 1 1 65535\n\x00\x00")

    def test_file_object(self):
        g = read_image(io.BytesIO(b"P5 1 1 255\n\x2a"))
        assert g.data[0] == 42


class TestWrite:
    def test_canonical_bytes(self):
        g = ImageGrid(2, 2, 1, bytearray([0, 1, 2, 3]))
        raw = write_image(g)
        assert raw == b"P5\n2 2\n255\n\x00\x01\x02\x03"
        assert len(raw) == 15

    def test_rejects_bad_channels(self):
        with pytest.raises(ValueError):
            ImageGrid(2, 2, 2, bytearray(8))

    def test_file_roundtrip(self, tmp_path):
        g = ImageGrid(3, 1, 3, bytearray(range(9)))
        path = tmp_path / "x.ppm"
        write_image(g, path)
        assert read_image(path).data == g.data


class TestSequence:
    def test_gray_row(self):
        pos = list(sequence_positions(2, 1, 1))
        assert [(p.row, p.col, p.channel) for p in pos] == [(0, 0, 0), (0, 1, 0)]

    def test_rgb_interleave(self):
        pos = list(sequence_positions(1, 1, 3))
        assert [(p.row, p.col, p.channel) for p in pos] == [(0, 0, 0), (0, 0, 1), (0, 0, 2)]

    def test_bijection_28x28(self):
        pos = list(sequence_positions(28, 28, 1))
        assert [p.index for p in pos] == list(range(784))
        assert (pos[-1].row, pos[-1].col) == (27, 27)


@given(
    st.integers(1, 8),
    st.integers(1, 8),
    st.sampled_from([1, 3]),
    st.randoms(use_true_random=False),
)
def test_write_read_identity(w, h, c, rnd):
    data = bytearray(rnd.randrange(256) for _ in range(w * h * c))
    g = ImageGrid(w, h, c, data)
    back = read_image(write_image(g))
    assert (back.width, back.height, back.channels, back.data) == (w, h, c, data)
