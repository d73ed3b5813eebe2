import io

import numpy as np
import pytest
from PIL import Image

from spectool import (
    ImageBuffer,
    ParseError,
    ValidationError,
    parse_manifest,
    read_array,
    read_npy,
    serialize_manifest,
    write_array,
    write_npy,
)
from spectool.dataio import encode_like, sniff_format


class TestManifest:
    def test_header_only_is_empty(self):
        assert parse_manifest("path,label,split\n").entries == ()

    def test_two_rows_read_back(self):
        manifest = parse_manifest("path,label,split\na.npy,pos,train\nb.npy,neg,test-ood\n")
        assert len(manifest.entries) == 2
        assert manifest.entries[0].path == "a.npy"
        assert manifest.entries[0].label == "pos"
        assert manifest.entries[0].split == "train"
        assert manifest.entries[1].split == "test-ood"

    def test_unknown_split_names_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_manifest("path,label,split\na.npy,pos,validation\n")

    def test_duplicate_path_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            parse_manifest("path,label,split\na.npy,pos,train\na.npy,neg,train\n")

    def test_comments_blanks_and_crlf(self):
        text = "# generated\r\npath,label,split\r\n\r\na.npy,pos,train\r\n"
        manifest = parse_manifest(text)
        assert len(manifest.entries) == 1
        assert manifest.entries[0].path == "a.npy"

    def test_wrong_field_count_names_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_manifest("path,label,split\na.npy,pos,train\nb.npy,neg\n")

    def test_round_trip(self):
        text = "path,label,split\na.npy,pos,train\nb.npy,neg,test-iid\n"
        manifest = parse_manifest(text)
        assert serialize_manifest(manifest) == text
        assert parse_manifest(serialize_manifest(manifest)) == manifest


class TestNpyContainer:
    def test_float64_identity(self):
        values = np.array([[0.0, 1.0], [1.0, 0.0]])
        image = read_array(write_array(ImageBuffer(values), "float64"))
        assert np.array_equal(image.pixels, values)

    def test_uint8_full_scale(self):
        data = write_npy(np.full((3, 3), 255, dtype=np.uint8))
        assert np.array_equal(read_array(data).pixels, np.ones((3, 3)))

    def test_truncated_payload(self):
        data = write_npy(np.zeros(100))
        with pytest.raises(ParseError, match="truncated"):
            read_npy(data[: len(data) - 400])

    def test_trailing_bytes_rejected(self):
        data = write_npy(np.zeros(4))
        with pytest.raises(ParseError, match="trailing"):
            read_npy(data + b"\x00")

    def test_version_2_rejected(self):
        data = bytearray(write_npy(np.zeros(4)))
        data[6] = 2
        with pytest.raises(ParseError, match="version 2"):
            read_npy(bytes(data))

    def test_magic_mismatch(self):
        with pytest.raises(ParseError, match="magic"):
            read_npy(b"\x93NUMPZ" + b"\x00" * 64)

    def test_unsupported_dtype(self):
        data = io.BytesIO()
        np.save(data, np.zeros(4, dtype=np.int32))
        with pytest.raises(ParseError, match="descr"):
            read_npy(data.getvalue())

    def test_fortran_order_rejected(self):
        arr = np.asfortranarray(np.arange(6.0).reshape(2, 3))
        data = io.BytesIO()
        np.save(data, arr)
        with pytest.raises(ParseError, match="fortran"):
            read_npy(data.getvalue())

    def test_four_dimensions_rejected(self):
        data = io.BytesIO()
        np.save(data, np.zeros((2, 2, 2, 2)))
        with pytest.raises(ParseError, match="1 to 3"):
            read_npy(data.getvalue())

    def test_numpy_reads_our_bytes(self):
        arr = np.arange(12.0).reshape(3, 4)
        loaded = np.load(io.BytesIO(write_npy(arr)))
        assert np.array_equal(loaded, arr)

    def test_we_read_numpy_bytes(self):
        arr = np.arange(12, dtype=np.uint16).reshape(4, 3)
        data = io.BytesIO()
        np.save(data, arr)
        assert np.array_equal(read_npy(data.getvalue()), arr)

    def test_writer_is_byte_stable(self):
        arr = np.linspace(0.0, 1.0, 16).reshape(4, 4)
        assert write_npy(arr) == write_npy(arr.copy())


class TestQuantization:
    def test_round_half_up(self):
        data = write_array(ImageBuffer(np.full((2, 2), 0.5)), "uint8")
        stored = read_npy(data)
        assert (stored == 128).all()
        assert np.allclose(read_array(data).pixels, 128 / 255)

    def test_out_of_range_rejected(self):
        gradient = ImageBuffer(np.array([[-3.2, 0.5], [0.1, 0.9]]))
        with pytest.raises(ValidationError, match=r"\[0, 1\]"):
            write_array(gradient, "uint8")

    def test_clamp_opt_in(self):
        image = ImageBuffer(np.array([[-0.25, 1.25], [0.0, 1.0]]))
        stored = read_npy(write_array(image, "uint8", clamp=True))
        assert stored[0, 0] == 0 and stored[0, 1] == 255

    def test_float_export_never_clamps(self):
        image = ImageBuffer(np.array([[-3.2, 2.5]]))
        assert np.array_equal(read_array(write_array(image, "float64")).pixels, image.pixels)

    @pytest.mark.parametrize("dtype,maxval", [("uint8", 255), ("uint16", 65535)])
    def test_integer_round_trip_tolerance(self, dtype, maxval):
        rng = np.random.default_rng(9)
        values = rng.random((8, 8))
        back = read_array(write_array(ImageBuffer(values), dtype)).pixels
        assert np.abs(back - values).max() <= 0.5 / maxval

    def test_unsupported_dtype_name(self):
        with pytest.raises(ValidationError, match="dtype"):
            write_array(ImageBuffer(np.zeros((2, 2))), "int32")

    def test_float32_round_trip_within_precision(self):
        rng = np.random.default_rng(13)
        values = rng.random((6, 6))
        back = read_array(write_array(ImageBuffer(values), "float32")).pixels
        assert np.abs(back - values).max() < 1e-7


class TestGrayscaleConversion:
    def test_equal_channels_exact(self):
        rng = np.random.default_rng(10)
        channel = rng.random((5, 7))
        rgb = np.stack([channel] * 3, axis=-1)
        image = read_array(write_npy(rgb))
        assert np.array_equal(image.pixels, channel)

    def test_luma_weights(self):
        rgb = np.zeros((1, 3, 3))
        rgb[0, 0] = [1.0, 0.0, 0.0]
        rgb[0, 1] = [0.0, 1.0, 0.0]
        rgb[0, 2] = [0.0, 0.0, 1.0]
        image = read_array(write_npy(rgb))
        assert np.allclose(image.pixels[0], [0.2126, 0.7152, 0.0722], atol=0)

    def test_one_dimensional_rejected_as_image(self):
        with pytest.raises(ParseError, match="1-D"):
            read_array(write_npy(np.zeros(8)))

    def test_bad_channel_count_rejected(self):
        with pytest.raises(ParseError, match="channels-last"):
            read_array(write_npy(np.zeros((4, 4, 2))))


class TestPgm:
    def _pgm8(self, pixels: np.ndarray) -> bytes:
        h, w = pixels.shape
        return f"P5\n{w} {h}\n255\n".encode() + pixels.astype(np.uint8).tobytes()

    def test_read_8bit(self):
        pixels = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
        image = read_array(self._pgm8(pixels))
        assert np.allclose(image.pixels, pixels / 255.0)

    def test_read_16bit_big_endian(self):
        pixels = np.array([[0, 65535], [32768, 1]], dtype=np.uint16)
        data = b"P5\n2 2\n65535\n" + pixels.astype(">u2").tobytes()
        image = read_array(data)
        assert np.allclose(image.pixels, pixels / 65535.0)

    def test_header_comment(self):
        pixels = np.full((2, 2), 100, dtype=np.uint8)
        data = b"P5\n# scanner dump\n2 2\n255\n" + pixels.tobytes()
        assert np.allclose(read_array(data).pixels, 100 / 255.0)

    def test_bad_maxval(self):
        with pytest.raises(ParseError, match="maxval"):
            read_array(b"P5\n2 2\n128\n" + bytes(4))

    def test_truncated(self):
        with pytest.raises(ParseError, match="truncated"):
            read_array(b"P5\n4 4\n255\n" + bytes(3))

    def test_encode_like_round_trip(self):
        pixels = np.arange(12, dtype=np.uint8).reshape(3, 4) * 21
        data = self._pgm8(pixels)
        assert sniff_format(data) == "pgm8"
        again = encode_like(read_array(data), "pgm8")
        assert np.array_equal(read_array(again).pixels, read_array(data).pixels)


class TestPng:
    def _png_bytes(self, arr: np.ndarray) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, format="PNG")
        return buf.getvalue()

    def test_gray8(self):
        pixels = np.arange(16, dtype=np.uint8).reshape(4, 4) * 16
        image = read_array(self._png_bytes(pixels))
        assert np.allclose(image.pixels, pixels / 255.0)

    def test_gray16(self):
        pixels = (np.arange(16, dtype=np.uint16).reshape(4, 4)) * 4000
        image = read_array(self._png_bytes(pixels))
        assert np.allclose(image.pixels, pixels / 65535.0)

    def test_rgb_reduces_to_luma(self):
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[..., 0] = 255
        image = read_array(self._png_bytes(rgb))
        assert np.allclose(image.pixels, 0.2126)

    def test_rgba_rejected(self):
        rgba = np.zeros((2, 2, 4), dtype=np.uint8)
        with pytest.raises(ParseError, match="mode"):
            read_array(self._png_bytes(rgba))

    def test_encode_like_round_trips(self):
        pixels = np.arange(16, dtype=np.uint8).reshape(4, 4) * 16
        data = self._png_bytes(pixels)
        assert sniff_format(data) == "png8"
        again = encode_like(read_array(data), "png8")
        assert np.array_equal(read_array(again).pixels, read_array(data).pixels)

    def test_unknown_payload(self):
        with pytest.raises(ParseError, match="unrecognized"):
            read_array(b"GIF89a such image")
