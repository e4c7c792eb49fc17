"""Precoder construction and spectral-efficiency / array-gain metrics.

Hybrid precoders factor into a frequency-flat analog part (block-diagonal, unit
modulus per phase shifter) and a per-subcarrier digital part normalized so the
cascade has unit power. Spectral efficiency is the subcarrier-averaged
log2(1 + SNR) of the precoded link; the per-subcarrier matched filter gives the
fully digital upper bound every hybrid scheme is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .slicing import SlicingPlan, UserSubband
from .wavefield import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    CarrierGrid,
    ChannelTensor,
    ComplexMatrix,
    ComplexVector,
    FieldModel,
    PathParams,
    _element_ranges,
    beam_squint_matrix,
    far_field_steering,
    near_field_steering,
    subarray_center_distance,
)


class Scheme(Enum):
    """Which construction produced a precoder set (also the CSV curve label)."""

    FULL_ARRAY_MRT = "full-array-mrt"
    NARROWBAND_BASELINE = "narrowband-mrt"
    OPTIMAL = "optimal"
    ANTENNA_SLICING = "antenna-slicing"
    SUBBAND_SLICING = "subband-slicing"


class DegenerateSubcarrierError(ValueError):
    """Channel column orthogonal to every analog beam; no digital MRT exists."""


@dataclass(frozen=True, eq=False)
class PrecoderSet:
    """Analog/digital factorization of one scheme's precoders.

    ``digital`` is (T, M); ``analog`` is the (N, T) block-diagonal matrix, or
    ``None`` for fully digital schemes (then ``digital`` is (N, M) directly).
    """

    scheme: Scheme
    digital: ComplexMatrix
    analog: ComplexMatrix | None = None
    block_sizes: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.analog is not None and self.analog.shape[1] != self.digital.shape[0]:
            raise ValueError("analog/digital dimensions do not chain")

    def combined(self) -> ComplexMatrix:
        """Effective N x M per-subcarrier precoding vectors."""
        if self.analog is None:
            return self.digital
        return self.analog @ self.digital


# ---------------------------------------------------------------------------
# precoder constructions
# ---------------------------------------------------------------------------


def mrt_full_array(geom: ArrayGeometry, path: PathParams) -> ComplexVector:
    """Unit-norm MRT beam (1/sqrt(N)) w(theta, d) matched to one path at carrier."""
    return near_field_steering(geom, path) / np.sqrt(geom.num_antennas)


def narrowband_mrt(geom: ArrayGeometry, paths: Sequence[PathParams]) -> ComplexVector:
    """Frequency-flat full-array MRT matched to the strongest near-field path.

    This is the narrowband baseline: it ignores both beam squint and the weaker
    paths. Falls back to the strongest far-field path if no near path exists.
    """
    near = [p for p in paths if p.field_model is not FieldModel.FAR]
    pool = near if near else list(paths)
    best = max(pool, key=lambda p: abs(p.gain))
    if best.field_model is FieldModel.FAR:
        beam = far_field_steering(geom, best.sine_angle)
    else:
        beam = near_field_steering(geom, best)
    return beam / np.sqrt(geom.num_antennas)


def optimal_receiver(
    geom: ArrayGeometry, grid: CarrierGrid, path: PathParams, m: int
) -> ComplexVector:
    """Per-subcarrier matched beam (1/sqrt(N)) (w element* squint column m).

    Aligns every element's phase at subcarrier m exactly, so the single-path
    beamforming gain is sqrt(N) |g| at every subcarrier. ``m`` is 0-based.
    """
    if not 0 <= m < grid.num_subcarriers:
        raise ValueError("subcarrier index out of range")
    offsets = geom.element_offsets()
    dd = (
        _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, offsets)
        - path.scatterer_distance_m
    )
    freq_dev = float(grid.subcarrier_offsets()[m]) * grid.subcarrier_spacing_hz
    k = 2.0 * np.pi / geom.wave_speed
    phases = k * (geom.center_freq_hz + freq_dev) * dd
    return np.exp(1j * phases) / np.sqrt(geom.num_antennas)


def static_precoder_set(beam: ComplexVector, num_subcarriers: int, scheme: Scheme) -> PrecoderSet:
    """Frequency-flat beam wrapped as a fully digital per-subcarrier set."""
    digital = np.repeat(np.asarray(beam, dtype=np.complex128)[:, None], num_subcarriers, axis=1)
    return PrecoderSet(scheme, digital)


def optimal_precoder_set(channel: ChannelTensor | ComplexMatrix) -> PrecoderSet:
    """Per-subcarrier matched filter h_m / ||h_m|| (zero columns stay zero)."""
    entries = channel.entries if isinstance(channel, ChannelTensor) else np.asarray(channel)
    norms = np.linalg.norm(entries, axis=0)
    digital = np.zeros_like(entries)
    good = norms > 0.0
    digital[:, good] = entries[:, good] / norms[good]
    return PrecoderSet(Scheme.OPTIMAL, digital)


def _block_offsets(plan_offset: float, size: int) -> NDArray[np.float64]:
    return plan_offset + (np.arange(size, dtype=np.float64) - (size - 1) / 2.0)


def analog_slice_precoder(
    geom: ArrayGeometry,
    paths: Sequence[PathParams],
    plan: SlicingPlan,
    t: int,
) -> ComplexVector:
    """Constant-modulus beam of subarray t: its near path plus all far paths.

    Entries are exp(j angle(B_t)) with B_t the gain-weighted sum of the far-path
    planar steerings and the assigned near path's spherical steering, both
    restricted to the subarray's rows (near part referenced to the subarray
    center). ``t`` is 0-based.
    """
    if not 0 <= t < plan.num_subarrays:
        raise ValueError("subarray index out of range")
    size = plan.subarray_sizes[t]
    offsets = _block_offsets(plan.offsets[t], size)
    acc = np.zeros(size, dtype=np.complex128)
    for path in paths:
        if path.field_model is FieldModel.FAR:
            acc += path.gain * far_field_steering(geom, path.sine_angle, element_offsets=offsets)
    near_idx = plan.path_order[plan.path_assignment[t]]
    near = paths[near_idx]
    ref = subarray_center_distance(geom, near, plan.offsets[t])
    acc += near.gain * near_field_steering(geom, near, element_offsets=offsets, reference_m=ref)
    return np.exp(1j * np.angle(acc))


def digital_mrt(channel_column: ComplexVector, analog: ComplexMatrix) -> ComplexVector:
    """Per-subcarrier digital MRT f_D = F^H h / ||F F^H h||.

    The returned vector makes the cascade F f_D unit-norm. Raises
    :class:`DegenerateSubcarrierError` when the column is orthogonal to every
    analog beam (that subcarrier then carries zero rate).
    """
    projected = analog.conj().T @ np.asarray(channel_column)
    denom = float(np.linalg.norm(analog @ projected))
    if denom == 0.0:
        raise DegenerateSubcarrierError("channel column orthogonal to analog beams")
    return projected / denom


def hybrid_gain_amplitudes(
    analog: ComplexMatrix,
    block_sizes: Sequence[int],
    columns: ComplexMatrix,
) -> NDArray[np.float64]:
    """|f_D^H F^H h| per column under per-column digital MRT, vectorized.

    Uses the identity |f_D^H F^H h| = ||F^H h||^2 / ||F F^H h|| with
    ||F F^H h||^2 = sum_t N_t |(F^H h)_t|^2 for a block-diagonal F with
    unit-modulus entries (the two denominator forms of the digital MRT).
    Degenerate columns yield amplitude 0.
    """
    projected = analog.conj().T @ np.asarray(columns)
    weights = np.asarray(block_sizes, dtype=np.float64)[:, None]
    num = np.sum(np.abs(projected) ** 2, axis=0)
    den = np.sqrt(np.sum(weights * np.abs(projected) ** 2, axis=0))
    out = np.zeros_like(num)
    good = den > 0.0
    out[good] = num[good] / den[good]
    return out


def _hybrid_digital(analog: ComplexMatrix, entries: ComplexMatrix) -> ComplexMatrix:
    """Column-wise digital MRT; degenerate columns become zero vectors."""
    num_beams, num_cols = analog.shape[1], entries.shape[1]
    digital = np.zeros((num_beams, num_cols), dtype=np.complex128)
    for m in range(num_cols):
        try:
            digital[:, m] = digital_mrt(entries[:, m], analog)
        except DegenerateSubcarrierError:
            pass
    return digital


def slice_precoder_set(
    channel: ChannelTensor,
    plan: SlicingPlan,
) -> PrecoderSet:
    """Antenna-slicing hybrid set: per-subarray analog beams + digital MRT."""
    geom, paths = channel.geometry, channel.paths
    n = geom.num_antennas
    analog = np.zeros((n, plan.num_subarrays), dtype=np.complex128)
    starts = plan.starts()
    for t, (start, size) in enumerate(zip(starts, plan.subarray_sizes)):
        analog[start : start + size, t] = analog_slice_precoder(geom, paths, plan, t)
    digital = _hybrid_digital(analog, channel.entries)
    return PrecoderSet(Scheme.ANTENNA_SLICING, digital, analog, tuple(plan.subarray_sizes))


def analog_subband_precoder(
    geom: ArrayGeometry,
    user_paths: Sequence[PathParams],
    subband_center_hz: float,
    t: int,
    num_subarrays: int,
) -> ComplexVector:
    """Constant-modulus beam of subarray t, retuned to one user's sub-band.

    Sums the user's near-field path terms evaluated at the sub-band center
    frequency — per element, gain times
    exp(j (2 pi/c) (f_c dd_n + (f_sub - f_c)(r + d_n))) — and keeps only the
    angles. Evaluating the steering at the sub-band frequency (rather than the
    carrier) keeps every element of the block phase-aligned to the channel at
    the sub-band center for any subarray size, and the full-array range
    reference preserves the paths' relative carrier phases.
    """
    if geom.num_antennas % num_subarrays != 0:
        raise ValueError("num_subarrays must divide num_antennas")
    if not 0 <= t < num_subarrays:
        raise ValueError("subarray index out of range")
    size = geom.num_antennas // num_subarrays
    center_offset = -geom.num_antennas / 2.0 + t * size + size / 2.0
    offsets = _block_offsets(center_offset, size)
    k = 2.0 * np.pi / geom.wave_speed
    detune = subband_center_hz - geom.center_freq_hz
    acc = np.zeros(size, dtype=np.complex128)
    for path in user_paths:
        if path.field_model is FieldModel.FAR:
            continue
        ranges = _element_ranges(geom, path.sine_angle, path.scatterer_distance_m, offsets)
        phases = k * geom.center_freq_hz * (ranges - path.scatterer_distance_m)
        phases += k * detune * (path.ue_range_m + ranges)
        acc += path.gain * np.exp(1j * phases)
    if not np.any(acc):
        raise ValueError("user has no near-field paths")
    return np.exp(1j * np.angle(acc))


def subband_precoder_set(
    geom: ArrayGeometry,
    user_paths: Sequence[PathParams],
    subband: UserSubband,
    num_subarrays: int,
    channel_block: ComplexMatrix,
) -> PrecoderSet:
    """Sub-band hybrid set for one user over its own subcarriers."""
    n = geom.num_antennas
    size = n // num_subarrays
    analog = np.zeros((n, num_subarrays), dtype=np.complex128)
    for t in range(num_subarrays):
        analog[t * size : (t + 1) * size, t] = analog_subband_precoder(
            geom, user_paths, subband.center_hz, t, num_subarrays
        )
    digital = _hybrid_digital(analog, np.asarray(channel_block))
    return PrecoderSet(Scheme.SUBBAND_SLICING, digital, analog, (size,) * num_subarrays)


# ---------------------------------------------------------------------------
# gains and spectral efficiency
# ---------------------------------------------------------------------------


def normalized_array_gain(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    path: PathParams,
    m: int | None = None,
) -> float | NDArray[np.float64]:
    """MRT array gain |sum_n q_c(m)_n| / N at subcarrier m (all m when None).

    Equals 1 exactly at the center subcarrier offset and decays as squint
    dephases the elements; always in [0, 1].
    """
    squint = beam_squint_matrix(geom, grid, path, "near")
    gains = np.abs(squint.sum(axis=0)) / geom.num_antennas
    if m is None:
        return gains
    if not 0 <= m < grid.num_subcarriers:
        raise ValueError("subcarrier index out of range")
    return float(gains[m])


def multiuser_gain(
    user_paths: Sequence[PathParams],
    subband: UserSubband,
    m_k: int,
    wave_speed: float = SPEED_OF_LIGHT,
) -> float:
    """Delay-spread gain of a user's multipath sum at local subcarrier m_k.

    |sum_l exp(j dw_l) |g_l|^2| / sqrt(sum_l |g_l|^2), with dw_l the sub-band
    frequency offset times each path's range deviation from the user mean.
    As defined this is an amplitude-like quantity (not capped at 1).
    """
    if not user_paths:
        raise ValueError("at least one path is required")
    if not 0 <= m_k < subband.num_subcarriers:
        raise ValueError("subcarrier index out of range")
    totals = np.asarray([p.total_range_m for p in user_paths])
    powers = np.asarray([abs(p.gain) ** 2 for p in user_paths])
    center = totals.mean()
    offset = m_k - (subband.num_subcarriers - 1) / 2.0
    dw = 2.0 * np.pi / wave_speed * offset * subband.subcarrier_spacing_hz * (totals - center)
    return float(np.abs(np.sum(np.exp(1j * dw) * powers)) / np.sqrt(powers.sum()))


def per_subcarrier_rates(
    channel: ChannelTensor | ComplexMatrix,
    precoders: PrecoderSet,
    power: float,
    noise_power: float,
) -> NDArray[np.float64]:
    """log2(1 + P |f_m^H h_m|^2 / sigma^2) for each subcarrier."""
    if power <= 0.0 or noise_power <= 0.0:
        raise ValueError("power and noise_power must be positive")
    entries = channel.entries if isinstance(channel, ChannelTensor) else np.asarray(channel)
    combined = precoders.combined()
    if combined.shape != entries.shape:
        raise ValueError("precoders do not match the channel dimensions")
    amplitudes = np.abs(np.einsum("nm,nm->m", combined.conj(), entries))
    return np.log2(1.0 + power * amplitudes**2 / noise_power)


def spectral_efficiency(
    channel: ChannelTensor | ComplexMatrix,
    precoders: PrecoderSet,
    power: float,
    noise_power: float,
) -> float:
    """Subcarrier-averaged SE of the precoded link, in bits/s/Hz."""
    return float(np.mean(per_subcarrier_rates(channel, precoders, power, noise_power)))


def se_optimal(
    channel: ChannelTensor | ComplexMatrix, power: float, noise_power: float
) -> float:
    """Fully digital upper bound: per-subcarrier matched filter ||h_m||."""
    if power <= 0.0 or noise_power <= 0.0:
        raise ValueError("power and noise_power must be positive")
    entries = channel.entries if isinstance(channel, ChannelTensor) else np.asarray(channel)
    norms = np.linalg.norm(entries, axis=0)
    return float(np.mean(np.log2(1.0 + power * norms**2 / noise_power)))


# ---------------------------------------------------------------------------
# closed-form cross-checks
# ---------------------------------------------------------------------------


def se_slicing_closed_form(
    power: float,
    noise_power: float,
    gains: Sequence[complex],
    sizes: Sequence[int],
) -> float:
    """Orthogonal-path approximation of the antenna-slicing SE.

    ``gains[t]`` is the complex gain of the path served by subarray t of size
    ``sizes[t]``; SINR = P (sum |g| N^2)^2 / (sum |g|^2 N^3 sigma^2) with the
    per-subarray powers |g_t|^2.
    """
    g2 = np.asarray([abs(g) ** 2 for g in gains], dtype=np.float64)
    n = np.asarray(sizes, dtype=np.float64)
    num = power * (np.sum(g2 * n**2)) ** 2
    den = np.sum(g2 * n**3) * noise_power
    return float(np.log2(1.0 + num / den))


def se_equal_slicing_closed_form(
    power: float,
    noise_power: float,
    gains: Sequence[complex],
    num_antennas: int,
) -> float:
    """Equal-size special case log2(1 + P N sum_t |g_t|^2 / (T sigma^2))."""
    g2 = np.asarray([abs(g) ** 2 for g in gains], dtype=np.float64)
    t = len(g2)
    return float(np.log2(1.0 + power * num_antennas * g2.sum() / (t * noise_power)))


def se_subband_closed_form(
    power: float,
    noise_power: float,
    block_gain_sums: Sequence[float],
    subarray_size: int,
) -> float:
    """Coherent per-subcarrier bound for the sub-band scheme.

    ``block_gain_sums[t]`` is G_t = sum_n |h_n| over subarray t's rows of the
    channel column; SINR = P (sum G^2)^2 / (sum N_s G^2 sigma^2).
    """
    g = np.asarray(block_gain_sums, dtype=np.float64)
    num = power * (np.sum(g**2)) ** 2
    den = np.sum(subarray_size * g**2) * noise_power
    return float(np.log2(1.0 + num / den))


def se_single_path_bound(
    power: float, noise_power: float, gain: complex, num_antennas: int
) -> float:
    """Single-path fully digital bound log2(1 + P N |g|^2 / sigma^2)."""
    return float(np.log2(1.0 + power * num_antennas * abs(gain) ** 2 / noise_power))


def se_closed_forms(
    power: float,
    noise_power: float,
    gains: Sequence[complex],
    sizes: Sequence[int],
    block_gain_sums: Sequence[float] | None = None,
    subarray_size: int | None = None,
) -> dict[str, float]:
    """All applicable closed forms for one scenario, keyed by name."""
    out = {
        "antenna_slicing": se_slicing_closed_form(power, noise_power, gains, sizes),
        "antenna_slicing_equal": se_equal_slicing_closed_form(
            power, noise_power, gains, int(np.sum(sizes))
        ),
    }
    if block_gain_sums is not None and subarray_size is not None:
        out["subband_slicing"] = se_subband_closed_form(
            power, noise_power, block_gain_sums, subarray_size
        )
    return out


# ---------------------------------------------------------------------------
# SNR helpers
# ---------------------------------------------------------------------------


def snr_db(power: float, gain: complex, noise_power: float) -> float:
    """Link SNR 10 log10(P |g|^2 / sigma^2) in dB."""
    if power <= 0.0 or noise_power <= 0.0 or gain == 0:
        raise ValueError("power, noise_power and |gain| must be positive")
    return float(10.0 * np.log10(power * abs(gain) ** 2 / noise_power))


def power_for_snr_db(snr: float, gain: complex, noise_power: float) -> float:
    """Transmit power achieving the given SNR for a path gain (inverse of snr_db)."""
    if noise_power <= 0.0 or gain == 0:
        raise ValueError("noise_power and |gain| must be positive")
    return float(10.0 ** (snr / 10.0) * noise_power / abs(gain) ** 2)
