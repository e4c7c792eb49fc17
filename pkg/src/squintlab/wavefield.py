"""Array/OFDM geometry, steering vectors, squint matrices, and wideband channel synthesis.

The model is a uniform linear array (ULA) with N antennas at spacing s serving an
OFDM grid of M subcarriers spanning bandwidth B around a center frequency f_c.
Scatterers sit in the radiating near field, so per-antenna path lengths follow the
exact two-dimensional geometry (law of cosines) rather than a planar approximation;
the residual frequency dependence of the per-antenna phases is the "beam squint"
captured by a dedicated N x M phase matrix.

Sign convention: propagation phases are written with +j throughout. Distances in
meters, frequencies in Hz.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, replace
from enum import Enum
from typing import BinaryIO, Iterable, Sequence, TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

if TYPE_CHECKING:  # pragma: no cover - import only for annotations
    from .slicing import SlicingPlan

SPEED_OF_LIGHT = 299792458.0
"""Exact vacuum light speed (m/s)."""

DUMP_MAGIC = b"SQNT"
DUMP_VERSION = 1

ComplexVector = NDArray[np.complex128]
ComplexMatrix = NDArray[np.complex128]


class FieldModel(Enum):
    """Per-path propagation regime."""

    WIDEBAND_NEAR = "wideband-near"
    NARROWBAND_NEAR = "narrowband-near"
    FAR = "far"


#: model_tag value for channels mixing near- and far-field path terms.
HYBRID = "hybrid"


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrayGeometry:
    """ULA description: antenna count, spacing, carrier, wave speed.

    ``spacing_m=None`` selects the default half-wavelength spacing
    s = c / (2 f_c); pass an explicit spacing for anything else.
    """

    num_antennas: int
    center_freq_hz: float
    spacing_m: float | None = None
    wave_speed: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.center_freq_hz <= 0.0:
            raise ValueError("center_freq_hz must be positive")
        if self.wave_speed <= 0.0:
            raise ValueError("wave_speed must be positive")
        if self.spacing_m is None:
            object.__setattr__(self, "spacing_m", self.wavelength_m / 2.0)
        elif self.spacing_m <= 0.0:
            raise ValueError("spacing_m must be positive")

    @property
    def wavelength_m(self) -> float:
        """Carrier wavelength c / f_c."""
        return self.wave_speed / self.center_freq_hz

    @property
    def aperture_m(self) -> float:
        """Physical span (N - 1) s of the array."""
        return (self.num_antennas - 1) * self.spacing_m

    def element_offsets(self) -> NDArray[np.float64]:
        """Signed index offsets of each element from the array center.

        Offset of element n (0-based) is n - (N-1)/2; they sum to zero and are
        half-integers for even N.
        """
        n = self.num_antennas
        return np.arange(n, dtype=np.float64) - (n - 1) / 2.0

    def with_antennas(self, num_antennas: int) -> "ArrayGeometry":
        """Same carrier/spacing with a different element count."""
        return replace(self, num_antennas=num_antennas)


@dataclass(frozen=True)
class CarrierGrid:
    """OFDM subcarrier grid: M subcarriers at spacing df, bandwidth B = M*df."""

    num_subcarriers: int
    subcarrier_spacing_hz: float

    def __post_init__(self) -> None:
        if self.num_subcarriers < 1:
            raise ValueError("num_subcarriers must be >= 1")
        if self.subcarrier_spacing_hz <= 0.0:
            raise ValueError("subcarrier_spacing_hz must be positive")

    @classmethod
    def from_bandwidth(cls, bandwidth_hz: float, num_subcarriers: int) -> "CarrierGrid":
        """Grid with spacing B / M (B = M*df holds exactly)."""
        if num_subcarriers < 1:
            raise ValueError("num_subcarriers must be >= 1")
        return cls(num_subcarriers, bandwidth_hz / num_subcarriers)

    @property
    def bandwidth_hz(self) -> float:
        return self.num_subcarriers * self.subcarrier_spacing_hz

    def subcarrier_offsets(self) -> NDArray[np.float64]:
        """Signed index offsets m - (M-1)/2 of each subcarrier from band center."""
        m = self.num_subcarriers
        return np.arange(m, dtype=np.float64) - (m - 1) / 2.0


@dataclass(frozen=True)
class PathParams:
    """One propagation path: complex gain, sine angle, and the two hop ranges.

    ``scatterer_distance_m`` is the scatterer-to-array-center distance d > 0 and
    ``ue_range_m`` the UE-to-scatterer range r >= 0 (r = 0 marks the LoS path).
    ``sine_angle`` is sin of the departure angle, strictly inside (-1, 1).
    ``loss_amp`` keeps the raw small-scale coefficient rho when the gain was
    derived from one (see :meth:`from_loss_amplitude`); otherwise ``None``.
    """

    gain: complex
    sine_angle: float
    scatterer_distance_m: float
    ue_range_m: float = 0.0
    field_model: FieldModel = FieldModel.WIDEBAND_NEAR
    loss_amp: complex | None = None

    def __post_init__(self) -> None:
        if not -1.0 < self.sine_angle < 1.0:
            raise ValueError("sine_angle must lie strictly inside (-1, 1)")
        if self.scatterer_distance_m <= 0.0:
            raise ValueError("scatterer_distance_m must be positive")
        if self.ue_range_m < 0.0:
            raise ValueError("ue_range_m must be nonnegative")
        if not np.isfinite(self.gain):
            raise ValueError("gain must be finite")

    @property
    def total_range_m(self) -> float:
        """End-to-end path length r + d."""
        return self.ue_range_m + self.scatterer_distance_m

    @classmethod
    def from_loss_amplitude(
        cls,
        loss_amp: complex,
        sine_angle: float,
        scatterer_distance_m: float,
        ue_range_m: float = 0.0,
        field_model: FieldModel = FieldModel.WIDEBAND_NEAR,
        *,
        center_freq_hz: float,
        wave_speed: float = SPEED_OF_LIGHT,
    ) -> "PathParams":
        """Build a path whose gain carries the carrier phase of its length.

        gain = rho * exp(+j (2 pi / c) f_c (r + d)).
        """
        phase = 2.0 * np.pi / wave_speed * center_freq_hz * (ue_range_m + scatterer_distance_m)
        gain = complex(loss_amp) * complex(np.cos(phase), np.sin(phase))
        return cls(gain, sine_angle, scatterer_distance_m, ue_range_m, field_model, complex(loss_amp))


@dataclass(frozen=True, eq=False)
class ChannelTensor:
    """N x M complex channel with the geometry/grid/paths that produced it."""

    entries: ComplexMatrix
    geometry: ArrayGeometry
    grid: CarrierGrid
    paths: tuple[PathParams, ...]
    model_tag: str = HYBRID

    def __post_init__(self) -> None:
        expected = (self.geometry.num_antennas, self.grid.num_subcarriers)
        if self.entries.shape != expected:
            raise ValueError(f"entries shape {self.entries.shape} != {expected}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("entries must be finite")

    @property
    def num_antennas(self) -> int:
        return self.geometry.num_antennas

    @property
    def num_subcarriers(self) -> int:
        return self.grid.num_subcarriers


# ---------------------------------------------------------------------------
# steering / squint operations
# ---------------------------------------------------------------------------


def subcarrier_frequencies(grid: CarrierGrid, center_hz: float) -> NDArray[np.float64]:
    """Absolute subcarrier frequencies center + offset*df (strictly increasing)."""
    return center_hz + grid.subcarrier_offsets() * grid.subcarrier_spacing_hz


def _element_ranges(
    geom: ArrayGeometry, sine_angle: float, distance_m: float,
    offsets: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Exact scatterer-to-element distances for the given index offsets."""
    s = geom.spacing_m
    x = offsets * s
    return np.sqrt(distance_m * distance_m - 2.0 * distance_m * x * sine_angle + x * x)


def scatterer_antenna_distance(
    geom: ArrayGeometry, path: PathParams, antenna_index: int | None = None
) -> float | NDArray[np.float64]:
    """Distance from the path's scatterer to one antenna (or to all, index=None).

    Uses the exact law-of-cosines form
    sqrt(d^2 - 2 d delta s theta + delta^2 s^2); the center element (delta = 0)
    returns d itself. ``antenna_index`` is 0-based.
    """
    offsets = geom.element_offsets()
    ranges = _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, offsets)
    if antenna_index is None:
        return ranges
    if not 0 <= antenna_index < geom.num_antennas:
        raise ValueError("antenna_index out of range")
    return float(ranges[antenna_index])


def near_field_steering(
    geom: ArrayGeometry,
    path: PathParams,
    *,
    element_offsets: NDArray[np.float64] | None = None,
    reference_m: float | None = None,
) -> ComplexVector:
    """Spherical-wave steering vector exp(+j (2 pi/c) f_c (d_n - d_ref)).

    By default the reference is the scatterer-to-center distance d, matching the
    full-array definition; pass ``element_offsets``/``reference_m`` to build the
    steering of a subarray block referenced to its own center.
    """
    if element_offsets is None:
        element_offsets = geom.element_offsets()
    if reference_m is None:
        reference_m = path.scatterer_distance_m
    ranges = _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, element_offsets)
    k = 2.0 * np.pi / geom.wave_speed * geom.center_freq_hz
    return np.exp(1j * k * (ranges - reference_m))


def far_field_steering(
    geom: ArrayGeometry,
    sine_angle: float,
    *,
    element_offsets: NDArray[np.float64] | None = None,
) -> ComplexVector:
    """Planar-wave steering vector exp(+j (2 pi/c) f_c delta s theta)."""
    if not -1.0 < sine_angle < 1.0:
        raise ValueError("sine_angle must lie strictly inside (-1, 1)")
    if element_offsets is None:
        element_offsets = geom.element_offsets()
    k = 2.0 * np.pi / geom.wave_speed * geom.center_freq_hz
    return np.exp(1j * k * element_offsets * geom.spacing_m * sine_angle)


def delay_steering(
    grid: CarrierGrid,
    path: PathParams | float,
    wave_speed: float = SPEED_OF_LIGHT,
) -> ComplexVector:
    """Frequency ramp exp(+j (2 pi/c) delta_m df (r + d)) across the grid.

    ``path`` may be a :class:`PathParams` or the total range r + d in meters.
    """
    total_range = path.total_range_m if isinstance(path, PathParams) else float(path)
    phases = (
        2.0 * np.pi / wave_speed
        * grid.subcarrier_offsets() * grid.subcarrier_spacing_hz
        * total_range
    )
    return np.exp(1j * phases)


def beam_squint_matrix(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    path: PathParams,
    field_mode: str = "near",
    *,
    element_offsets: NDArray[np.float64] | None = None,
) -> ComplexMatrix:
    """N x M matrix of the residual antenna-frequency cross phases.

    Near mode: entry (n, m) = exp(+j (2 pi/c) delta_m df (d_n - d)); far mode
    replaces the range offset d_n - d by delta_n s theta. The center subcarrier
    column (delta_m = 0) is all ones.
    """
    if element_offsets is None:
        element_offsets = geom.element_offsets()
    if field_mode == "near":
        dev = (
            _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, element_offsets)
            - path.scatterer_distance_m
        )
    elif field_mode == "far":
        dev = element_offsets * geom.spacing_m * path.sine_angle
    else:
        raise ValueError("field_mode must be 'near' or 'far'")
    freq_dev = grid.subcarrier_offsets() * grid.subcarrier_spacing_hz
    k = 2.0 * np.pi / geom.wave_speed
    return np.exp(1j * k * np.outer(dev, freq_dev))


# ---------------------------------------------------------------------------
# channel synthesis
# ---------------------------------------------------------------------------

_MODEL_TAGS = (
    FieldModel.WIDEBAND_NEAR.value,
    FieldModel.NARROWBAND_NEAR.value,
    FieldModel.FAR.value,
    HYBRID,
)


def _path_term(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    path: PathParams,
    model: FieldModel,
    freq_dev: NDArray[np.float64],
) -> ComplexMatrix:
    """One path's N x len(freq_dev) contribution under the given regime."""
    k = 2.0 * np.pi / geom.wave_speed
    offsets = geom.element_offsets()
    total = path.total_range_m
    if model is FieldModel.FAR:
        carrier = k * geom.center_freq_hz * offsets * geom.spacing_m * path.sine_angle
        ramp = np.full(geom.num_antennas, total)
    else:
        ranges = _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, offsets)
        carrier = k * geom.center_freq_hz * (ranges - path.scatterer_distance_m)
        if model is FieldModel.WIDEBAND_NEAR:
            # squint folds in: the delay ramp sees each element's true range
            ramp = path.ue_range_m + ranges
        else:
            ramp = np.full(geom.num_antennas, total)
    phases = carrier[:, None] + k * np.outer(ramp, freq_dev)
    return path.gain * np.exp(1j * phases)


def channel_columns(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    model_tag: str = HYBRID,
    subcarrier_indices: Iterable[int] | None = None,
) -> ComplexMatrix:
    """Raw N x M' channel entries, optionally restricted to a subcarrier subset.

    ``model_tag`` forces one regime for every path; ``hybrid`` dispatches on each
    path's own ``field_model``. Entries are the sum of per-path terms, linear in
    the gains.
    """
    if model_tag not in _MODEL_TAGS:
        raise ValueError(f"unknown model_tag {model_tag!r}")
    paths = list(paths)
    if not paths:
        raise ValueError("at least one path is required")
    freq_dev = grid.subcarrier_offsets() * grid.subcarrier_spacing_hz
    if subcarrier_indices is not None:
        idx = np.asarray(list(subcarrier_indices), dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= grid.num_subcarriers):
            raise ValueError("subcarrier index out of range")
        freq_dev = freq_dev[idx]
    out = np.zeros((geom.num_antennas, freq_dev.size), dtype=np.complex128)
    for path in paths:
        model = path.field_model if model_tag == HYBRID else FieldModel(model_tag)
        out += _path_term(geom, grid, path, model, freq_dev)
    return out


def synth_channel(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    model_tag: str = HYBRID,
) -> ChannelTensor:
    """Synthesize the full N x M wideband channel tensor.

    Wideband near paths use the exact per-element ranges at every subcarrier,
    narrowband near paths freeze the squint phases at the band center, and far
    paths use planar steering with the common delay ramp.
    """
    entries = channel_columns(geom, grid, paths, model_tag)
    return ChannelTensor(entries, geom, grid, tuple(paths), model_tag)


def subarray_center_distance(geom: ArrayGeometry, path: PathParams, offset: float) -> float:
    """Scatterer distance to a subarray center sitting ``offset`` elements off-center."""
    return float(
        _element_ranges(
            geom, path.sine_angle, path.scatterer_distance_m,
            np.asarray([offset], dtype=np.float64),
        )[0]
    )


def subarray_channel(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    plan: "SlicingPlan",
    t: int,
) -> ChannelTensor:
    """Channel block of subarray ``t`` (0-based) under ``plan``.

    Near-path steering is referenced to the subarray's own center distance, so
    stacking the blocks over t reproduces the full-array channel only after each
    near-path block is multiplied by the relocation phase
    exp(+j (2 pi/c) f_c (d_sub - d)).
    """
    sizes = plan.subarray_sizes
    if not 0 <= t < len(sizes):
        raise ValueError("subarray index out of range")
    if sum(sizes) != geom.num_antennas:
        raise ValueError("plan does not cover the full array")
    size = sizes[t]
    block_offsets = plan.offsets[t] + (np.arange(size, dtype=np.float64) - (size - 1) / 2.0)
    freq_dev = grid.subcarrier_offsets() * grid.subcarrier_spacing_hz
    k = 2.0 * np.pi / geom.wave_speed
    out = np.zeros((size, grid.num_subcarriers), dtype=np.complex128)
    for path in paths:
        if path.field_model is FieldModel.FAR:
            carrier = k * geom.center_freq_hz * block_offsets * geom.spacing_m * path.sine_angle
            ramp = np.full(size, path.total_range_m)
        else:
            ranges = _element_ranges(
                geom, path.sine_angle, path.scatterer_distance_m, block_offsets
            )
            d_sub = subarray_center_distance(geom, path, plan.offsets[t])
            carrier = k * geom.center_freq_hz * (ranges - d_sub)
            if path.field_model is FieldModel.WIDEBAND_NEAR:
                ramp = path.ue_range_m + ranges
            else:
                ramp = np.full(size, path.total_range_m)
        out += path.gain * np.exp(1j * (carrier[:, None] + k * np.outer(ramp, freq_dev)))
    sub_geom = geom.with_antennas(size)
    return ChannelTensor(out, sub_geom, grid, tuple(paths), HYBRID)


# ---------------------------------------------------------------------------
# on-disk dump
# ---------------------------------------------------------------------------


def write_channel_dump(tensor: ChannelTensor, dest: str | os.PathLike | BinaryIO) -> None:
    """Write the tensor as SQNT binary: 16-byte header + row-major (re, im) f64 pairs."""
    header = struct.pack(
        "<4sHII2s", DUMP_MAGIC, DUMP_VERSION,
        tensor.num_antennas, tensor.num_subcarriers, b"\x00\x00",
    )
    payload = np.ascontiguousarray(tensor.entries, dtype=np.complex128).astype("<c16").tobytes()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    else:
        dest.write(header)
        dest.write(payload)


def read_channel_dump(src: str | os.PathLike | BinaryIO) -> ComplexMatrix:
    """Read a SQNT dump back into an N x M complex matrix."""

    def _read(fh: BinaryIO) -> ComplexMatrix:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError("truncated dump header")
        magic, version, n, m, _ = struct.unpack("<4sHII2s", header)
        if magic != DUMP_MAGIC:
            raise ValueError("bad magic; not a channel dump")
        if version != DUMP_VERSION:
            raise ValueError(f"unsupported dump version {version}")
        raw = fh.read(16 * n * m)
        if len(raw) != 16 * n * m:
            raise ValueError("truncated dump payload")
        return np.frombuffer(raw, dtype="<c16").astype(np.complex128).reshape(n, m)

    if isinstance(src, (str, os.PathLike)):
        with open(src, "rb") as fh:
            return _read(fh)
    return _read(src)
