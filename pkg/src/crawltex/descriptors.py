"""Baseline texture descriptors: co-occurrence, Gabor bank, Fourier rings.

These provide the comparison methods for the benchmark harness. Exact
parameterizations are configurable because no single canonical setting
exists; defaults are common literature choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError
from .imgio import GrayImage

# (dy, dx) steps for the four co-occurrence angles 0, 45, 90, 135 degrees.
_GLCM_ANGLES = ((0, 1), (-1, 1), (-1, 0), (-1, -1))

_GABOR_BASE_WAVELENGTH = 4.0
_GABOR_SIGMA_PER_WAVELENGTH = 0.56
_GABOR_ASPECT = 0.5


@dataclass(frozen=True)
class FeatureVector:
    """Descriptor output: values plus the method tag and parameter digest."""

    values: np.ndarray
    method: str
    param_digest: str

    def __post_init__(self):
        values = np.asarray(self.values, np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ParameterError("feature vector must be a non-empty 1-D array")
        if not np.all(np.isfinite(values)):
            raise ParameterError("feature vector contains non-finite entries")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def _quantize(pixels: np.ndarray, levels: int) -> np.ndarray:
    return (pixels.astype(np.int64) * levels) // 256


def _glcm_matrix(quantized: np.ndarray, step, levels: int) -> np.ndarray:
    """Symmetric normalized co-occurrence matrix for one (dy, dx) step."""
    dy, dx = step
    height, width = quantized.shape
    src = quantized[max(0, -dy) : height - max(0, dy), max(0, -dx) : width - max(0, dx)]
    dst = quantized[max(0, dy) : height - max(0, -dy), max(0, dx) : width - max(0, -dx)]
    pairs = np.bincount(
        (src * levels + dst).reshape(-1), minlength=levels * levels
    ).reshape(levels, levels)
    sym = pairs + pairs.T
    return sym / sym.sum()


def _glcm_stats(matrix: np.ndarray):
    levels = matrix.shape[0]
    idx = np.arange(levels, dtype=np.float64)
    diff = idx[:, None] - idx[None, :]

    energy = float((matrix**2).sum())
    contrast = float((matrix * diff**2).sum())
    homogeneity = float((matrix / (1.0 + diff**2)).sum())
    nonzero = matrix[matrix > 0]
    entropy = float(-(nonzero * np.log(nonzero)).sum())

    # Symmetric matrix: row and column marginals coincide.
    marginal = matrix.sum(axis=1)
    mean = float((idx * marginal).sum())
    var = float(((idx - mean) ** 2 * marginal).sum())
    if var <= 1e-15:
        correlation = 1.0
    else:
        correlation = float(
            ((idx[:, None] - mean) * (idx[None, :] - mean) * matrix).sum() / var
        )
    return energy, contrast, correlation, homogeneity, entropy


def glcm_features(image: GrayImage, distances=(1, 2), levels: int = 64) -> FeatureVector:
    """Co-occurrence features at four angles per distance.

    For each (distance, angle in {0, 45, 90, 135} degrees) a symmetric
    normalized co-occurrence matrix is built on ``levels`` intensity bins
    and summarized by energy (angular second moment), contrast,
    correlation, homogeneity, and entropy, concatenated in that order.
    Vector length is 5 * len(distances) * 4.
    """
    distances = tuple(int(d) for d in distances)
    if not distances:
        raise ParameterError("at least one co-occurrence distance is required")
    if any(d < 1 for d in distances):
        raise ParameterError(f"distances must be >= 1, got {distances}")
    if not 2 <= levels <= 256:
        raise ParameterError(f"quantization levels must be in [2, 256], got {levels}")
    largest = max(distances)
    if image.width <= largest or image.height <= largest:
        raise ParameterError(
            f"image {image.width}x{image.height} too small for distance {largest}"
        )

    quantized = _quantize(image.pixels, levels)
    values = []
    for d in distances:
        for dy, dx in _GLCM_ANGLES:
            matrix = _glcm_matrix(quantized, (dy * d, dx * d), levels)
            values.extend(_glcm_stats(matrix))
    digest = "distances=" + "+".join(str(d) for d in distances) + f"|levels={levels}"
    return FeatureVector(np.array(values), "glcm", digest)


def gabor_bank(scales: int, orientations: int):
    """Zero-DC complex Gabor kernels, scale-major then orientation.

    Wavelengths grow by half octaves from 4 px; the Gaussian envelope has
    sigma = 0.56 * wavelength and aspect ratio 0.5. The real (cosine) part
    is made DC-free by subtracting an envelope-shaped offset.
    """
    kernels = []
    for s in range(scales):
        wavelength = _GABOR_BASE_WAVELENGTH * (2.0 ** (s / 2.0))
        sigma = _GABOR_SIGMA_PER_WAVELENGTH * wavelength
        radius = int(math.ceil(3.0 * sigma))
        coords = np.arange(-radius, radius + 1, dtype=np.float64)
        xg, yg = np.meshgrid(coords, coords)
        for j in range(orientations):
            theta = math.pi * j / orientations
            xr = xg * math.cos(theta) + yg * math.sin(theta)
            yr = -xg * math.sin(theta) + yg * math.cos(theta)
            envelope = np.exp(-(xr**2 + (_GABOR_ASPECT * yr) ** 2) / (2.0 * sigma**2))
            real = envelope * np.cos(2.0 * math.pi * xr / wavelength)
            imag = envelope * np.sin(2.0 * math.pi * xr / wavelength)
            real -= envelope * (real.sum() / envelope.sum())
            imag -= envelope * (imag.sum() / envelope.sum())
            kernels.append(real + 1j * imag)
    return kernels


def gabor_features(image: GrayImage, scales: int = 4, orientations: int = 6) -> FeatureVector:
    """Mean and standard deviation of each Gabor response magnitude.

    The bank holds ``scales * orientations`` zero-DC filters; convolution
    uses reflective boundary padding. Length is 2 * scales * orientations.
    """
    if scales < 1 or orientations < 1:
        raise ParameterError(
            f"scales and orientations must be >= 1, got {scales}, {orientations}"
        )
    kernels = gabor_bank(scales, orientations)
    largest = max(k.shape[0] for k in kernels)
    if largest > image.width or largest > image.height:
        raise ParameterError(
            f"largest filter ({largest}px) exceeds image {image.width}x{image.height}"
        )
    pixels = image.pixels.astype(np.float64)
    values = []
    for kernel in kernels:
        pad = kernel.shape[0] // 2
        padded = np.pad(pixels, pad, mode="reflect")
        response = fftconvolve(padded, kernel, mode="valid")
        magnitude = np.abs(response)
        values.append(magnitude.mean())
        values.append(magnitude.std())
    digest = f"scales={scales}|orientations={orientations}"
    return FeatureVector(np.array(values), "gabor", digest)


def fourier_features(image: GrayImage, rings: int = 32) -> FeatureVector:
    """Spectrum energy in concentric radial bands.

    The 2-D DFT of the mean-subtracted image is split into ``rings`` equal
    radial bands (DC excluded); band energies are normalized to sum to 1
    when any energy is present.
    """
    if rings < 1:
        raise ParameterError(f"rings must be >= 1, got {rings}")
    pixels = image.pixels.astype(np.float64)
    spectrum = np.fft.fftshift(np.fft.fft2(pixels - pixels.mean()))
    power = np.abs(spectrum) ** 2

    height, width = power.shape
    cy, cx = height // 2, width // 2
    ys, xs = np.indices(power.shape)
    radius = np.hypot(ys - cy, xs - cx)
    max_radius = radius.max()

    energies = np.zeros(rings)
    if max_radius > 0:
        band = np.minimum((radius / max_radius * rings).astype(np.int64), rings - 1)
        off_dc = radius > 0
        np.add.at(energies, band[off_dc], power[off_dc])
    total = energies.sum()
    if total > 0:
        energies /= total
    return FeatureVector(energies, "fourier", f"rings={rings}")


def features_to_csv(labels, vectors) -> str:
    """CSV text with one ``label,method,param_digest,v0,...`` row per sample."""
    if len(labels) != len(vectors):
        raise ParameterError("labels and vectors must have equal length")
    if not vectors:
        raise ParameterError("no feature rows to export")
    dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise ParameterError("feature vectors must share one length")
    header = "label,method,param_digest," + ",".join(f"v{i}" for i in range(dim))
    lines = [header]
    for label, vec in zip(labels, vectors):
        lines.append(
            f"{label},{vec.method},{vec.param_digest},"
            + ",".join(str(float(v)) for v in vec.values)
        )
    return "\n".join(lines) + "\n"
