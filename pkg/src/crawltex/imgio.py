"""Grayscale image decoding, dataset ingestion, and synthetic textures.

Supported on-disk formats are binary PGM (P5, maxval 255) and 8-bit
grayscale PNG. Color inputs are rejected rather than converted so that
pixel intensities always come straight from the source file.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import DatasetError, DecodeError, ParameterError, UnsupportedFormatError

IMAGE_EXTENSIONS = (".pgm", ".png")

TEXTURE_KINDS = ("grating", "checker", "noise", "plateau")


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A finite pixel grid with 8-bit intensities.

    ``pixels`` is a ``(height, width)`` uint8 array; the flattened array is
    the row-major intensity list.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("pixel intensities must be integers")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("pixel intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", np.ascontiguousarray(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def inverted(self) -> "GrayImage":
        """Image with every intensity v replaced by 255 - v."""
        return GrayImage(255 - self.pixels)


@dataclass
class LabeledDataset:
    """Class-labeled image samples.

    ``samples`` pairs either a file path or an in-memory image with its
    label; ``classes`` is the sorted list of distinct labels. Loader
    warnings (skipped files, empty class directories) are kept for
    reporting.
    """

    samples: list
    classes: list
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        known = set(self.classes)
        for _, label in self.samples:
            if label not in known:
                raise ValueError(f"sample label {label!r} not in class list")
        self._cache = {}

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def labels(self) -> list:
        return [label for _, label in self.samples]

    def image(self, index: int) -> GrayImage:
        """Decoded image for sample ``index`` (paths are cached after load)."""
        source, _ = self.samples[index]
        if isinstance(source, GrayImage):
            return source
        if index not in self._cache:
            self._cache[index] = read_image(source)
        return self._cache[index]


def _parse_pgm(data: bytes) -> GrayImage:
    # Header: "P5", width, height, maxval, then one whitespace byte and raw
    # pixels. '#' comments are legal anywhere in the header whitespace.
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            newline = data.find(b"\n", pos)
            if newline < 0:
                raise DecodeError("PGM header comment is unterminated")
            pos = newline + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise DecodeError(f"malformed PGM header near byte {start}")
        fields.append(int(token))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise DecodeError("PGM header not terminated by whitespace")
    pos += 1

    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DecodeError(f"invalid PGM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"PGM maxval {maxval}; only 255 is supported")
    expected = width * height
    raw = data[pos : pos + expected]
    if len(raw) != expected:
        raise DecodeError(f"PGM pixel data truncated ({len(raw)} of {expected} bytes)")
    return GrayImage(np.frombuffer(raw, np.uint8).reshape(height, width).copy())


def _parse_png(data: bytes) -> GrayImage:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise DecodeError(f"invalid PNG data: {exc}") from exc
    if img.mode != "L":
        raise UnsupportedFormatError(
            f"PNG mode {img.mode!r}; only 8-bit grayscale (mode 'L') is supported"
        )
    return GrayImage(np.asarray(img, dtype=np.uint8))


def load_gray(data: bytes) -> GrayImage:
    """Decode PGM (P5, maxval 255) or 8-bit grayscale PNG bytes.

    Pixel values are bit-exact to the source. Color images, palette PNGs,
    and non-8-bit depths raise :class:`UnsupportedFormatError`; anything
    unparseable raises :class:`DecodeError`.
    """
    if data.startswith(b"P5"):
        return _parse_pgm(data)
    if data.startswith(b"\x89PNG\r\n\x1a\n"):
        return _parse_png(data)
    if data[:1] == b"P" and data[1:2] in b"1234567":
        raise UnsupportedFormatError(
            f"PNM type {data[:2].decode('ascii', 'replace')}; only binary P5 is supported"
        )
    raise DecodeError("unrecognized image format (expected PGM P5 or PNG)")


def save_pgm(image: GrayImage) -> bytes:
    """Encode an image as binary PGM; inverse of :func:`load_gray` on PGM."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.tobytes()


def read_image(path) -> GrayImage:
    """Load an image file, reporting the offending path on failure."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return load_gray(data)
    except (DecodeError, UnsupportedFormatError) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def write_pgm(image: GrayImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(image))


def load_dataset(root) -> LabeledDataset:
    """Ingest a directory with one subdirectory per class.

    Labels are subdirectory names, classes are sorted lexicographically,
    and samples are sorted by path so repeated loads yield the same order.
    Files without a supported image extension and classes without any
    usable image are skipped with a warning recorded on the dataset.
    """
    root = os.fspath(root)
    if not os.path.isdir(root):
        raise DatasetError(f"dataset root {root!r} is not a directory")
    class_dirs = sorted(
        entry for entry in os.listdir(root) if os.path.isdir(os.path.join(root, entry))
    )
    if not class_dirs:
        raise DatasetError(f"dataset root {root!r} contains no class directories")

    samples = []
    classes = []
    warnings = []
    for label in class_dirs:
        class_path = os.path.join(root, label)
        paths = []
        for name in sorted(os.listdir(class_path)):
            file_path = os.path.join(class_path, name)
            if not os.path.isfile(file_path):
                continue
            if os.path.splitext(name)[1].lower() not in IMAGE_EXTENSIONS:
                warnings.append(f"skipped non-image file {file_path!r}")
                continue
            paths.append(file_path)
        if not paths:
            warnings.append(f"skipped class {label!r}: no decodable images")
            continue
        classes.append(label)
        samples.extend((path, label) for path in paths)
    if not samples:
        raise DatasetError(f"dataset root {root!r} contains no decodable images")
    return LabeledDataset(samples=samples, classes=classes, warnings=warnings)


def synth_texture(
    kind: str,
    size,
    *,
    frequency: float = 8.0,
    angle: float = 0.0,
    amplitude: float = 127.0,
    value: int = 128,
    period: int = 4,
    seed: int = 0,
) -> GrayImage:
    """Generate a deterministic synthetic texture.

    Kinds: ``grating`` (sinusoid with ``frequency`` cycles across the image
    along ``angle`` radians), ``checker`` (0/255 squares of ``period``
    pixels), ``noise`` (seeded uniform intensities in 128 +/- amplitude),
    and ``plateau`` (constant ``value``).
    """
    width, height = int(size[0]), int(size[1])
    if width < 1 or height < 1:
        raise ParameterError(f"texture size {width}x{height} must be at least 1x1")

    if kind == "plateau":
        if not 0 <= value <= 255:
            raise ParameterError(f"plateau value {value} outside [0, 255]")
        pixels = np.full((height, width), value, np.uint8)
    elif kind == "checker":
        if period < 1:
            raise ParameterError(f"checker period {period} must be >= 1")
        xs = np.arange(width) // period
        ys = np.arange(height) // period
        pixels = (((xs[None, :] + ys[:, None]) % 2) * 255).astype(np.uint8)
    elif kind == "noise":
        lo = max(0, int(round(128 - amplitude)))
        hi = min(255, int(round(128 + amplitude)))
        rng = np.random.default_rng(seed)
        pixels = rng.integers(lo, hi + 1, size=(height, width), dtype=np.int64).astype(np.uint8)
    elif kind == "grating":
        if frequency <= 0:
            raise ParameterError(f"grating frequency {frequency} must be > 0")
        xs = np.arange(width) / width
        ys = np.arange(height) / height
        phase = 2.0 * math.pi * frequency * (
            xs[None, :] * math.cos(angle) + ys[:, None] * math.sin(angle)
        )
        values = 128.0 + amplitude * np.sin(phase)
        pixels = np.clip(np.rint(values), 0, 255).astype(np.uint8)
    else:
        raise ParameterError(f"unknown texture kind {kind!r}")
    return GrayImage(pixels)
