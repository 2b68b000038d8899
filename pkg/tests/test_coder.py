from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stegosampler.bitio import BitStream, BitString
from stegosampler.coder import (
    CapacityExceeded,
    CoderState,
    NoParityMass,
    UndecodablePixel,
    embed_image,
    embed_step,
    extract_image,
    extract_step,
    lsb_embed,
    lsb_extract,
    quantize,
)
from stegosampler.models import (
    DegenerateModel,
    FixedModel,
    PixelDistribution,
    UniformModel,
    train_context_model,
)
from stegosampler.pnm import ImageGrid

UNIFORM = PixelDistribution(np.ones(256, dtype=np.int64))


def golden_weights():
    # total 32: rank order is value 0 (14), value 4 (2), then sixteen singles,
    # so value 4 owns the integer subinterval [14, 16) of a full 5-bit register
    w = np.zeros(256, dtype=np.int64)
    w[0] = 14
    w[4] = 2
    for v in list(range(1, 4)) + list(range(5, 18)):
        w[v] = 1
    return PixelDistribution(w)


def stream(bits01="", seed=0):
    return BitStream(BitString(int(bits01, 2) if bits01 else 0, len(bits01)), seed)


class TestQuantize:
    def test_uniform_full_interval(self):
        part = quantize(UNIFORM, CoderState(26))
        # independent oracle: per-symbol floor of width * weight / total
        expect = [(1 << 26) * 1 // 256] * 256
        assert list(np.diff(part.cut)) == expect
        assert part.cut == [k << 18 for k in range(257)]

    def test_point_mass(self):
        state = CoderState(26, low=5, high=900)
        part = quantize(DegenerateModel(7).distribution(None, None), state)
        assert part.order[0] == 7
        assert part.cut == [0, state.width]

    def test_width_two_deficit_to_most_probable(self):
        # all floors are 0 at width 2; the deficit hands both slots to rank 0
        w = np.zeros(256, dtype=np.int64)
        w[10] = 4  # p = 0.4
        w[20] = 3
        w[30] = 3
        half = 1 << 25
        part = quantize(PixelDistribution(w), CoderState(26, low=half - 1, high=half))
        assert part.order[0] == 10
        assert part.cut == [0, 2]

    def test_sort_stable_ties_ascending(self):
        w = np.ones(256, dtype=np.int64)
        w[100] = 5
        w[50] = 5
        part = quantize(PixelDistribution(w), CoderState(26))
        assert list(part.order[:2]) == [50, 100]
        assert list(part.order[2:5]) == [0, 1, 2]


class TestEmbedStep:
    def test_golden_five_bit_vector(self):
        state = CoderState(5)
        rec = embed_step(state, golden_weights(), stream("01111"))
        assert rec.pixel_value == 4
        assert rec.bits_confirmed == 4
        assert (state.low, state.high) == (0, 31)

    def test_point_mass_zero_bits(self):
        state = CoderState(26)
        rec = embed_step(state, DegenerateModel(7).distribution(None, None), stream("1010"))
        assert (rec.pixel_value, rec.bits_confirmed) == (7, 0)
        assert (state.low, state.high) == (0, (1 << 26) - 1)

    def test_uniform_confirms_top_byte(self):
        # brute-force rational oracle: with 256 equal cells the selected pixel
        # is floor(t / 2^prc * 256) and exactly 8 bits become shared prefix
        for byte in (0, 1, 137, 255):
            msg = BitStream(BitString(byte << 18, 26), 3)
            state = CoderState(26)
            rec = embed_step(state, UNIFORM, msg)
            assert rec.pixel_value == int(Fraction(byte << 18, 1 << 26) * 256)
            assert rec.bits_confirmed == 8
            assert msg.confirmed_ptr == 8


class TestExtractStep:
    def test_golden_mirror(self):
        state = CoderState(5)
        prefix, s = extract_step(state, golden_weights(), 4)
        assert (prefix, s) == (0b0111, 4)
        assert (state.low, state.high) == (0, 31)

    def test_point_mass(self):
        state = CoderState(26)
        prefix, s = extract_step(state, DegenerateModel(7).distribution(None, None), 7)
        assert (prefix, s) == (0, 0)

    def test_undecodable(self):
        with pytest.raises(UndecodablePixel):
            extract_step(CoderState(26), DegenerateModel(7).distribution(None, None), 8)

    def test_uniform_image_bits(self):
        state = CoderState(26)
        out = BitString()
        for pixel in [15, 240, 170, 85]:
            prefix, s = extract_step(state, UNIFORM, pixel)
            out.append(prefix, s)
        assert out.to_bytes() == bytes([0x0F, 0xF0, 0xAA, 0x55])


class TestImages:
    def test_uniform_raw_passthrough(self):
        payload = bytes([0x0F, 0xF0, 0xAA, 0x55])
        grid, rep = embed_image(UniformModel(), 2, 2, 1, payload, framed=False, pad_seed=0)
        assert bytes(grid.data) == payload
        assert rep.bits_confirmed == 32
        assert rep.er_per_pixel == 8.0

    def test_degenerate_capacity(self):
        grid, rep = embed_image(DegenerateModel(7), 3, 3, 1, b"", framed=False, pad_seed=0)
        assert bytes(grid.data) == b"\x07" * 9
        assert rep.bits_confirmed == 0
        with pytest.raises(CapacityExceeded):
            embed_image(DegenerateModel(7), 3, 3, 1, b"", framed=True, pad_seed=0)

    def test_framed_roundtrip(self):
        grid, _ = embed_image(UniformModel(), 4, 4, 1, b"hello", pad_seed=5)
        assert extract_image(UniformModel(), grid) == b"hello"

    def test_raw_extract(self):
        grid = ImageGrid(2, 2, 1, bytearray([15, 240, 170, 85]))
        assert extract_image(UniformModel(), grid, framed=False) == bytes(
            [0x0F, 0xF0, 0xAA, 0x55]
        )

    def test_undecodable_image(self):
        grid = ImageGrid(1, 1, 1, bytearray([8]))
        with pytest.raises(UndecodablePixel):
            extract_image(DegenerateModel(7), grid, framed=False)

    def test_prc_range(self):
        with pytest.raises(ValueError):
            embed_image(UniformModel(), 2, 2, 1, b"", prc=7, framed=False)
        with pytest.raises(ValueError):
            embed_image(UniformModel(), 2, 2, 1, b"", prc=63, framed=False)


class TestLsbBaseline:
    def test_lsb_parity_matches_bits(self):
        grid = lsb_embed(UniformModel(), 2, 2, 1, b"\xa0", rng_seed=1, pad_seed=0)
        assert [b & 1 for b in grid.data] == [1, 0, 1, 0]

    def test_lsb_extract(self):
        grid = ImageGrid(2, 2, 1, bytearray([3, 8, 255, 0]))
        bits = lsb_extract(grid)
        assert (bits.value, bits.length) == (0b1010, 4)

    def test_exact_one_bit_per_step(self):
        grid = lsb_embed(UniformModel(), 5, 3, 1, b"\xde\xad", rng_seed=2, pad_seed=9)
        recovered = lsb_extract(grid)
        assert recovered.length == 15
        assert recovered.slice(0, 15) == (0xDEAD >> 1)

    def test_no_parity_mass(self):
        w = np.zeros(256, dtype=np.int64)
        w[2] = 1  # only even values carry weight
        with pytest.raises(NoParityMass):
            lsb_embed(FixedModel(w), 8, 1, 1, b"\xff", rng_seed=0, pad_seed=0)


def weight_arrays():
    return st.lists(st.integers(0, 1000), min_size=256, max_size=256).filter(
        lambda w: sum(w) > 0
    )


@settings(max_examples=60, deadline=None)
@given(weight_arrays(), st.integers(8, 40), st.data())
def test_tiling_property(weights, prc, data):
    low = data.draw(st.integers(0, (1 << prc) - 2))
    high = data.draw(st.integers(low + 1, (1 << prc) - 1))
    part = quantize(PixelDistribution(weights), CoderState(prc, low=low, high=high))
    ws = list(np.diff(part.cut))
    assert sum(ws) == high - low + 1
    assert all(w >= 0 for w in ws)
    assert part.cut == sorted(part.cut)
    assert ws[0] >= 1


@settings(max_examples=25, deadline=None)
@given(
    st.binary(max_size=12),
    st.integers(0, 2**64 - 1),
    st.sampled_from([8, 16, 26, 40]),
    weight_arrays(),
)
def test_fixed_model_roundtrip(payload, seed, prc, weights):
    model = FixedModel(np.array(weights) + 1)  # smoothed: every pixel decodable
    grid, rep = embed_image(model, 16, 16, 1, payload, prc=prc, framed=False, pad_seed=seed)
    bits = BitString.from_bytes(payload)
    recovered = extract_image(model, grid, prc=prc, framed=False)
    n = min(rep.bits_confirmed, bits.length) // 8
    assert recovered[:n] == payload[:n]
    # code-length bound: confirmed tracks the quantized self-information
    assert abs(rep.bits_confirmed - rep.self_information_bits) <= prc


@settings(max_examples=15, deadline=None)
@given(st.binary(min_size=1, max_size=6), st.integers(0, 2**32))
def test_trained_model_framed_roundtrip(payload, seed):
    imgs = [
        ImageGrid(4, 4, 1, bytearray((seed + i * 37 + j) % 256 for j in range(16)))
        for i in range(3)
    ]
    model = train_context_model(imgs, buckets=4)
    grid, _ = embed_image(model, 12, 12, 1, payload, pad_seed=seed)
    assert extract_image(model, grid) == payload


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.binary(min_size=1, max_size=4))
def test_lsb_roundtrip_any_seed(seed, payload):
    model = FixedModel(np.arange(1, 257))
    n = 8 * len(payload)
    grid = lsb_embed(model, n, 1, 1, payload, rng_seed=seed, pad_seed=1)
    assert lsb_extract(grid).to_bytes() == payload
