"""Monte Carlo sweep experiments and CSV emission.

Each experiment draws per-trial channels from counter-based substreams, runs a
fixed set of precoding schemes, and averages spectral efficiency over trials in
ascending-trial order, so the emitted CSV is byte-identical for any worker
count. Trials whose slicing plan is infeasible are skipped and counted in the
result metadata; the remaining trials still form a paired comparison because
every scheme sees the same draws.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .boundaries import antenna_boundary, freq_boundary, is_unbounded
from .precoding import (
    Scheme,
    analog_slice_precoder,
    analog_subband_precoder,
    hybrid_gain_amplitudes,
    narrowband_mrt,
    normalized_array_gain,
    power_for_snr_db,
)
from .scenario import RngStream, ScenarioConfig, sample_scenario, sample_user_paths
from .slicing import InfeasiblePlanError, allocate_subbands, plan_antenna_slices
from .wavefield import ArrayGeometry, CarrierGrid, FieldModel, PathParams, channel_columns

CSV_HEADER = "axis,scheme,se_bits_per_hz,trials,seed,boundary_b_wn_hz,boundary_n_wn"

_AS_SCHEMES = (Scheme.ANTENNA_SLICING, Scheme.NARROWBAND_BASELINE, Scheme.OPTIMAL)
_FS_SCHEMES = (
    Scheme.SUBBAND_SLICING,
    Scheme.ANTENNA_SLICING,
    Scheme.NARROWBAND_BASELINE,
    Scheme.OPTIMAL,
)

_SWEEP_THETA = 0.1
_SWEEP_DISTANCE_M = 10.0
_SWEEP_RANGE_M = 10.0
_SNR_AXIS_DB = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
_BOUNDARY_MULTS = (
    0.25, 0.5, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0, 1.05,
    1.1, 1.15, 1.2, 1.3, 1.5, 2.0, 2.5, 3.0, 3.25,
)
_PATH_AXIS = (1, 2, 3, 4, 5, 6)
_SUBARRAY_AXIS = (2, 4, 8, 16, 32)
_GAIN_MAP_CURVES = (
    (0.1, 20.0), (0.3, 20.0), (0.5, 20.0), (0.8, 20.0),
    (0.1, 10.0), (0.1, 50.0), (0.1, 100.0),
)


def resolve_threads(env: dict | None = None) -> int:
    """Worker count from SQUINTLAB_THREADS (0 or unset means auto)."""
    source = os.environ if env is None else env
    raw = source.get("SQUINTLAB_THREADS", "0")
    try:
        count = int(raw)
    except ValueError as exc:
        raise ValueError(f"SQUINTLAB_THREADS must be an integer, got {raw!r}") from exc
    if count < 0:
        raise ValueError("SQUINTLAB_THREADS must be nonnegative")
    if count == 0:
        return os.cpu_count() or 1
    return count


def _map_trials(trials: int, fn: Callable[[int], object]) -> list:
    """Run fn(0..trials-1), possibly concurrently, collecting in trial order."""
    workers = min(resolve_threads(), trials)
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


# ---------------------------------------------------------------------------
# results container
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.12g}"


@dataclass(frozen=True)
class SweepRow:
    axis: float
    scheme: str
    se: float
    boundary_b_wn_hz: float | None
    boundary_n_wn: float | None


@dataclass(frozen=True)
class SweepResult:
    """Sweep output: rows in emission order plus run metadata."""

    axis_name: str
    rows: tuple[SweepRow, ...]
    trials: int
    seed: int
    meta: dict

    @property
    def axis_values(self) -> tuple[float, ...]:
        seen: dict[float, None] = {}
        for row in self.rows:
            seen.setdefault(row.axis)
        return tuple(seen)

    @property
    def schemes(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.scheme)
        return tuple(seen)

    @property
    def se_per_scheme(self) -> dict[str, tuple[float, ...]]:
        out: dict[str, list[float]] = {s: [] for s in self.schemes}
        for row in self.rows:
            out[row.scheme].append(row.se)
        return {s: tuple(v) for s, v in out.items()}

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            b = "" if row.boundary_b_wn_hz is None else _fmt(row.boundary_b_wn_hz)
            n = "" if row.boundary_n_wn is None else _fmt(row.boundary_n_wn)
            lines.append(
                f"{_fmt(row.axis)},{row.scheme},{_fmt(row.se)},"
                f"{self.trials},{self.seed},{b},{n}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv())


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _finite_min(values) -> float | None:
    finite = [float(v) for v in values if not is_unbounded(v)]
    return min(finite) if finite else None


def _binding_boundaries(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    thr,
) -> tuple[float | None, float | None]:
    """Most restrictive near-mode boundaries over a draw's near-field paths."""
    near = [p for p in paths if p.field_model is not FieldModel.FAR]
    b = _finite_min(freq_boundary(geom, p, thr) for p in near)
    n = _finite_min(
        antenna_boundary(
            grid.bandwidth_hz, p, geom.center_freq_hz, thr, "near",
            spacing_m=geom.spacing_m, wave_speed=geom.wave_speed,
        )
        for p in near
    )
    return b, n


def _mean_or_none(values: Sequence[float | None]) -> float | None:
    kept = [v for v in values if v is not None]
    return float(np.mean(kept)) if kept else None


def _slice_analog(geom: ArrayGeometry, paths, plan) -> np.ndarray:
    """Block-diagonal analog matrix of an antenna-slicing plan."""
    analog = np.zeros((geom.num_antennas, plan.num_subarrays), dtype=np.complex128)
    for t, (start, size) in enumerate(zip(plan.starts(), plan.subarray_sizes)):
        analog[start : start + size, t] = analog_slice_precoder(geom, paths, plan, t)
    return analog


def _single_link_amps(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    thr,
    entries: np.ndarray,
) -> dict[str, np.ndarray]:
    """Per-subcarrier beamforming amplitudes |f^H h| for the three schemes.

    Raises InfeasiblePlanError when no slicing plan exists for the draw.
    """
    plan = plan_antenna_slices(geom, grid, paths, thr)
    analog = _slice_analog(geom, paths, plan)
    beam = narrowband_mrt(geom, paths)
    return {
        Scheme.ANTENNA_SLICING.value: hybrid_gain_amplitudes(
            analog, plan.subarray_sizes, entries
        ),
        Scheme.NARROWBAND_BASELINE.value: np.abs(beam.conj() @ entries),
        Scheme.OPTIMAL.value: np.linalg.norm(entries, axis=0),
    }


def _rates(amps: np.ndarray, power: float, noise_power: float) -> np.ndarray:
    return np.log2(1.0 + power * amps**2 / noise_power)


def _raise_if_empty(completed: int, name: str) -> None:
    if completed == 0:
        raise InfeasiblePlanError(
            f"every trial of {name} drew an infeasible slicing scenario"
        )


# ---------------------------------------------------------------------------
# deterministic single-path experiments
# ---------------------------------------------------------------------------


def _experiment_gain_map(config: ScenarioConfig) -> SweepResult:
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()
    curves = []
    for theta, d in _GAIN_MAP_CURVES:
        path = PathParams(1.0, theta, d, 0.0)
        label = f"eta_theta{theta:g}_d{d:g}"
        eta = np.asarray(normalized_array_gain(geom, grid, path))
        b = freq_boundary(geom, path, thr)
        n = antenna_boundary(
            grid.bandwidth_hz, path, geom.center_freq_hz, thr, "near",
            spacing_m=geom.spacing_m, wave_speed=geom.wave_speed,
        )
        curves.append(
            (label, eta, None if is_unbounded(b) else float(b),
             None if is_unbounded(n) else float(n))
        )
    rows = [
        SweepRow(float(m), label, float(eta[m]), b, n)
        for m in range(grid.num_subcarriers)
        for label, eta, b, n in curves
    ]
    meta = {"experiment": "gain-map", "config": config.to_dict()}
    return SweepResult("subcarrier_index", tuple(rows), 1, config.seed, meta)


def _sweep_trial_gain(config: ScenarioConfig, trial: int) -> complex:
    """CN(0,1) gain draw for the fixed-geometry sweeps."""
    rng = RngStream(config.seed, trial).generator()
    re = rng.standard_normal()
    im = rng.standard_normal()
    return complex((re + 1j * im) / np.sqrt(2.0))


def _fixed_geometry_sweep(
    config: ScenarioConfig,
    axis_name: str,
    axis_values: Sequence[float],
    geoms: Sequence[ArrayGeometry],
    grids: Sequence[CarrierGrid],
    boundary_cols: Sequence[tuple[float | None, float | None]],
    name: str,
) -> SweepResult:
    """Single-path sweep over per-axis (geometry, grid) pairs.

    The path direction and ranges are fixed; only the complex gain is drawn per
    trial, and transmit power is re-anchored to the configured SNR for each
    draw, so the ratio curves are sharp rather than smeared over geometry.
    """
    thr = config.thresholds()
    num_axis = len(axis_values)

    def one_trial(trial: int) -> np.ndarray:
        gain = _sweep_trial_gain(config, trial)
        path = PathParams(gain, _SWEEP_THETA, _SWEEP_DISTANCE_M, _SWEEP_RANGE_M)
        power = power_for_snr_db(config.snr_db, gain, config.noise_power)
        out = np.empty((num_axis, len(_AS_SCHEMES)))
        for i, (geom_i, grid_i) in enumerate(zip(geoms, grids)):
            entries = channel_columns(geom_i, grid_i, [path])
            amps = _single_link_amps(geom_i, grid_i, [path], thr, entries)
            for j, scheme in enumerate(_AS_SCHEMES):
                out[i, j] = float(
                    np.mean(_rates(amps[scheme.value], power, config.noise_power))
                )
        return out

    stacked = np.stack(_map_trials(config.trials, one_trial))
    mean_se = stacked.mean(axis=0)
    rows = [
        SweepRow(float(axis_values[i]), scheme.value, float(mean_se[i, j]),
                 boundary_cols[i][0], boundary_cols[i][1])
        for i in range(num_axis)
        for j, scheme in enumerate(_AS_SCHEMES)
    ]
    meta = {"experiment": name, "config": config.to_dict(), "infeasible_trials": 0}
    return SweepResult(axis_name, tuple(rows), config.trials, config.seed, meta)


def _experiment_sweep_bandwidth(config: ScenarioConfig) -> SweepResult:
    geom, thr = config.geometry(), config.thresholds()
    ref_path = PathParams(1.0, _SWEEP_THETA, _SWEEP_DISTANCE_M, _SWEEP_RANGE_M)
    b_ref = float(freq_boundary(geom, ref_path, thr))
    axis = [b_ref * mult for mult in _BOUNDARY_MULTS]
    grids = [CarrierGrid.from_bandwidth(b, config.num_subcarriers) for b in axis]
    cols = [
        (b_ref, float(antenna_boundary(b, ref_path, geom.center_freq_hz, thr, "near",
                                       spacing_m=geom.spacing_m,
                                       wave_speed=geom.wave_speed)))
        for b in axis
    ]
    return _fixed_geometry_sweep(
        config, "bandwidth_hz", axis, [geom] * len(axis), grids, cols,
        "sweep-bandwidth",
    )


def _experiment_sweep_antennas(config: ScenarioConfig) -> SweepResult:
    thr = config.thresholds()
    ref_path = PathParams(1.0, _SWEEP_THETA, _SWEEP_DISTANCE_M, _SWEEP_RANGE_M)
    n_ref = float(
        antenna_boundary(config.bandwidth_hz, ref_path, config.center_freq_hz, thr,
                         "near")
    )
    axis_n: list[int] = []
    for mult in _BOUNDARY_MULTS:
        n = max(4, int(round(n_ref * mult)))
        if n not in axis_n:
            axis_n.append(n)
    geoms = [ArrayGeometry(n, config.center_freq_hz) for n in axis_n]
    grid = config.grid()
    cols = [
        (float(freq_boundary(g, ref_path, thr)), n_ref)
        for g in geoms
    ]
    return _fixed_geometry_sweep(
        config, "num_antennas", [float(n) for n in axis_n], geoms,
        [grid] * len(axis_n), cols, "sweep-antennas",
    )


# ---------------------------------------------------------------------------
# multipath single-user experiments (antenna-domain slicing)
# ---------------------------------------------------------------------------


def _as_sweep(
    config: ScenarioConfig,
    name: str,
    axis_name: str,
    axis_values: Sequence[float],
    trial_amps: Callable[[int], tuple[dict[str, np.ndarray], tuple] | None],
    se_from_amps: Callable[[dict[str, np.ndarray]], np.ndarray],
) -> SweepResult:
    """Shared reduction: per-trial amplitudes -> per-axis mean SE + boundaries."""

    def one_trial(trial: int):
        try:
            amps, bounds = trial_amps(trial)
        except InfeasiblePlanError:
            return None
        return se_from_amps(amps), bounds

    results = _map_trials(config.trials, one_trial)
    kept = [r for r in results if r is not None]
    _raise_if_empty(len(kept), name)
    mean_se = np.mean(np.stack([se for se, _ in kept]), axis=0)
    b_col = _mean_or_none([b for _, (b, _) in kept])
    n_col = _mean_or_none([n for _, (_, n) in kept])
    rows = [
        SweepRow(float(axis_values[i]), scheme.value, float(mean_se[i, j]), b_col, n_col)
        for i in range(len(axis_values))
        for j, scheme in enumerate(_AS_SCHEMES)
    ]
    meta = {
        "experiment": name,
        "config": config.to_dict(),
        "infeasible_trials": len(results) - len(kept),
        "completed_trials": len(kept),
    }
    return SweepResult(axis_name, tuple(rows), config.trials, config.seed, meta)


def _experiment_se_snr_as(config: ScenarioConfig) -> SweepResult:
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()

    def trial_amps(trial: int):
        paths = sample_scenario(config, trial)
        entries = channel_columns(geom, grid, paths)
        amps = _single_link_amps(geom, grid, paths, thr, entries)
        return amps, _binding_boundaries(geom, grid, paths, thr)

    def se_from_amps(amps: dict[str, np.ndarray]) -> np.ndarray:
        out = np.empty((len(_SNR_AXIS_DB), len(_AS_SCHEMES)))
        for i, snr in enumerate(_SNR_AXIS_DB):
            power = 10.0 ** (snr / 10.0) * config.noise_power
            for j, scheme in enumerate(_AS_SCHEMES):
                out[i, j] = float(
                    np.mean(_rates(amps[scheme.value], power, config.noise_power))
                )
        return out

    return _as_sweep(config, "se-snr-as", "snr_db", _SNR_AXIS_DB,
                     trial_amps, se_from_amps)


def _experiment_se_subcarrier_as(config: ScenarioConfig) -> SweepResult:
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()
    axis = [float(m) for m in range(config.num_subcarriers)]

    def trial_amps(trial: int):
        paths = sample_scenario(config, trial)
        entries = channel_columns(geom, grid, paths)
        amps = _single_link_amps(geom, grid, paths, thr, entries)
        return amps, _binding_boundaries(geom, grid, paths, thr)

    def se_from_amps(amps: dict[str, np.ndarray]) -> np.ndarray:
        out = np.empty((config.num_subcarriers, len(_AS_SCHEMES)))
        for j, scheme in enumerate(_AS_SCHEMES):
            out[:, j] = _rates(amps[scheme.value], config.power, config.noise_power)
        return out

    return _as_sweep(config, "se-subcarrier-as", "subcarrier_index", axis,
                     trial_amps, se_from_amps)


def _experiment_se_paths_as(config: ScenarioConfig) -> SweepResult:
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()
    axis = [float(l) for l in _PATH_AXIS]

    def one_trial(trial: int):
        se = np.full((len(_PATH_AXIS), len(_AS_SCHEMES)), np.nan)
        bounds: list[tuple[float | None, float | None]] = []
        for i, l_n in enumerate(_PATH_AXIS):
            cfg_l = config.replace(num_near_paths=l_n)
            paths = sample_scenario(cfg_l, trial)
            try:
                entries = channel_columns(geom, grid, paths)
                amps = _single_link_amps(geom, grid, paths, thr, entries)
            except InfeasiblePlanError:
                bounds.append((None, None))
                continue
            for j, scheme in enumerate(_AS_SCHEMES):
                se[i, j] = float(
                    np.mean(_rates(amps[scheme.value], config.power,
                                   config.noise_power))
                )
            bounds.append(_binding_boundaries(geom, grid, paths, thr))
        return se, bounds

    results = _map_trials(config.trials, one_trial)
    stacked = np.stack([se for se, _ in results])
    completed = np.sum(~np.isnan(stacked[:, :, 0]), axis=0)
    if int(completed.min()) == 0:
        raise InfeasiblePlanError(
            "an axis point of se-paths-as had no feasible trials"
        )
    mean_se = np.nanmean(stacked, axis=0)
    rows = []
    for i in range(len(_PATH_AXIS)):
        b_col = _mean_or_none([bounds[i][0] for _, bounds in results])
        n_col = _mean_or_none([bounds[i][1] for _, bounds in results])
        for j, scheme in enumerate(_AS_SCHEMES):
            rows.append(SweepRow(axis[i], scheme.value, float(mean_se[i, j]),
                                 b_col, n_col))
    meta = {
        "experiment": "se-paths-as",
        "config": config.to_dict(),
        "infeasible_trials": {
            int(_PATH_AXIS[i]): int(len(results) - completed[i])
            for i in range(len(_PATH_AXIS))
        },
    }
    return SweepResult("num_near_paths", tuple(rows), config.trials, config.seed, meta)


# ---------------------------------------------------------------------------
# multiuser sub-band experiments (frequency-domain slicing)
# ---------------------------------------------------------------------------


def _allocate_adaptive(config: ScenarioConfig, trial: int, num_subarrays: int):
    """Draw users and allocate sub-bands, doubling the user count on infeasibility.

    Growing the user pool re-uses the trial substream, so existing users'
    draws never change; K is capped at M where one-subcarrier sub-bands make
    the allocation always feasible.
    """
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()
    k = min(config.num_users, config.num_subcarriers)
    while True:
        users = sample_user_paths(config, trial, k)
        try:
            plan = allocate_subbands(users, geom, grid, thr, num_subarrays)
        except InfeasiblePlanError:
            if k >= config.num_subcarriers:
                raise
            k = min(2 * k, config.num_subcarriers)
            continue
        return users, plan


def _fs_user_amps(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    thr,
    user_paths: Sequence[PathParams],
    subband,
    num_subarrays: int,
) -> dict[str, np.ndarray]:
    """Per-subcarrier amplitudes of all four schemes on one user's sub-band."""
    idx = subband.global_indices()
    cols = channel_columns(geom, grid, user_paths, subcarrier_indices=idx)
    size = geom.num_antennas // num_subarrays
    fs_analog = np.zeros((geom.num_antennas, num_subarrays), dtype=np.complex128)
    for t in range(num_subarrays):
        fs_analog[t * size : (t + 1) * size, t] = analog_subband_precoder(
            geom, user_paths, subband.center_hz, t, num_subarrays
        )
    as_plan = plan_antenna_slices(geom, grid, user_paths, thr)
    as_analog = _slice_analog(geom, user_paths, as_plan)
    beam = narrowband_mrt(geom, user_paths)
    return {
        Scheme.SUBBAND_SLICING.value: hybrid_gain_amplitudes(
            fs_analog, (size,) * num_subarrays, cols
        ),
        Scheme.ANTENNA_SLICING.value: hybrid_gain_amplitudes(
            as_analog, as_plan.subarray_sizes, cols
        ),
        Scheme.NARROWBAND_BASELINE.value: np.abs(beam.conj() @ cols),
        Scheme.OPTIMAL.value: np.linalg.norm(cols, axis=0),
    }


def _fs_trial_amps(config: ScenarioConfig, trial: int, num_subarrays: int):
    """All users' amplitudes for one trial plus binding boundary columns."""
    geom, grid, thr = config.geometry(), config.grid(), config.thresholds()
    users, plan = _allocate_adaptive(config, trial, num_subarrays)
    per_user = []
    all_near: list[PathParams] = []
    for subband in plan.subbands:
        paths = users[subband.user]
        per_user.append((subband, _fs_user_amps(geom, grid, thr, paths, subband,
                                                num_subarrays)))
        all_near.extend(paths)
    bounds = _binding_boundaries(geom, grid, all_near, thr)
    return per_user, bounds


def _fs_mean_se(per_user, power: float, noise_power: float) -> np.ndarray:
    """(1/K) sum over users of their sub-band-average rate, per scheme."""
    out = np.zeros(len(_FS_SCHEMES))
    for _, amps in per_user:
        for j, scheme in enumerate(_FS_SCHEMES):
            out[j] += float(np.mean(_rates(amps[scheme.value], power, noise_power)))
    return out / len(per_user)


def _fs_sweep(
    config: ScenarioConfig,
    name: str,
    axis_name: str,
    axis_values: Sequence[float],
    trial_fn: Callable[[int], tuple[np.ndarray, tuple, int]],
) -> SweepResult:
    """Shared reduction for the multiuser experiments."""

    def one_trial(trial: int):
        try:
            return trial_fn(trial)
        except InfeasiblePlanError:
            return None

    results = _map_trials(config.trials, one_trial)
    kept = [r for r in results if r is not None]
    _raise_if_empty(len(kept), name)
    mean_se = np.mean(np.stack([se for se, _, _ in kept]), axis=0)
    b_col = _mean_or_none([b for _, (b, _), _ in kept])
    n_col = _mean_or_none([n for _, (_, n), _ in kept])
    rows = [
        SweepRow(float(axis_values[i]), scheme.value, float(mean_se[i, j]),
                 b_col, n_col)
        for i in range(len(axis_values))
        for j, scheme in enumerate(_FS_SCHEMES)
    ]
    meta = {
        "experiment": name,
        "config": config.to_dict(),
        "infeasible_trials": len(results) - len(kept),
        "completed_trials": len(kept),
        "mean_users": float(np.mean([k for _, _, k in kept])),
    }
    return SweepResult(axis_name, tuple(rows), config.trials, config.seed, meta)


def _experiment_se_snr_fs(config: ScenarioConfig) -> SweepResult:
    def trial_fn(trial: int):
        per_user, bounds = _fs_trial_amps(config, trial, config.num_subarrays)
        se = np.empty((len(_SNR_AXIS_DB), len(_FS_SCHEMES)))
        for i, snr in enumerate(_SNR_AXIS_DB):
            power = 10.0 ** (snr / 10.0) * config.noise_power
            se[i] = _fs_mean_se(per_user, power, config.noise_power)
        return se, bounds, len(per_user)

    return _fs_sweep(config, "se-snr-fs", "snr_db", _SNR_AXIS_DB, trial_fn)


def _experiment_se_subcarrier_fs(config: ScenarioConfig) -> SweepResult:
    axis = [float(m) for m in range(config.num_subcarriers)]

    def trial_fn(trial: int):
        per_user, bounds = _fs_trial_amps(config, trial, config.num_subarrays)
        se = np.empty((config.num_subcarriers, len(_FS_SCHEMES)))
        for subband, amps in per_user:
            idx = subband.global_indices()
            for j, scheme in enumerate(_FS_SCHEMES):
                se[idx, j] = _rates(amps[scheme.value], config.power,
                                    config.noise_power)
        return se, bounds, len(per_user)

    return _fs_sweep(config, "se-subcarrier-fs", "subcarrier_index", axis, trial_fn)


def _experiment_se_paths_fs(config: ScenarioConfig) -> SweepResult:
    axis = [float(l) for l in _PATH_AXIS]

    def trial_fn(trial: int):
        se = np.empty((len(_PATH_AXIS), len(_FS_SCHEMES)))
        bound_list = []
        users_seen = []
        for i, l_n in enumerate(_PATH_AXIS):
            cfg_l = config.replace(num_near_paths=l_n)
            per_user, bounds = _fs_trial_amps(cfg_l, trial, config.num_subarrays)
            se[i] = _fs_mean_se(per_user, config.power, config.noise_power)
            bound_list.append(bounds)
            users_seen.append(len(per_user))
        merged = (_mean_or_none([b for b, _ in bound_list]),
                  _mean_or_none([n for _, n in bound_list]))
        return se, merged, int(np.mean(users_seen))

    return _fs_sweep(config, "se-paths-fs", "num_near_paths", axis, trial_fn)


def _experiment_se_subarrays_fs(config: ScenarioConfig) -> SweepResult:
    axis_t = [t for t in _SUBARRAY_AXIS if config.num_antennas % t == 0]
    if not axis_t:
        raise ValueError("no subarray count in the axis divides num_antennas")

    def trial_fn(trial: int):
        se = np.empty((len(axis_t), len(_FS_SCHEMES)))
        bound_list = []
        users_seen = []
        for i, t_count in enumerate(axis_t):
            per_user, bounds = _fs_trial_amps(config, trial, t_count)
            se[i] = _fs_mean_se(per_user, config.power, config.noise_power)
            bound_list.append(bounds)
            users_seen.append(len(per_user))
        merged = (_mean_or_none([b for b, _ in bound_list]),
                  _mean_or_none([n for _, n in bound_list]))
        return se, merged, int(np.mean(users_seen))

    return _fs_sweep(config, "se-subarrays-fs", "num_subarrays",
                     [float(t) for t in axis_t], trial_fn)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

EXPERIMENTS: dict[str, Callable[[ScenarioConfig], SweepResult]] = {
    "gain-map": _experiment_gain_map,
    "sweep-bandwidth": _experiment_sweep_bandwidth,
    "sweep-antennas": _experiment_sweep_antennas,
    "se-snr-as": _experiment_se_snr_as,
    "se-subcarrier-as": _experiment_se_subcarrier_as,
    "se-paths-as": _experiment_se_paths_as,
    "se-snr-fs": _experiment_se_snr_fs,
    "se-subcarrier-fs": _experiment_se_subcarrier_fs,
    "se-paths-fs": _experiment_se_paths_fs,
    "se-subarrays-fs": _experiment_se_subarrays_fs,
}


def run_experiment(name: str, config: ScenarioConfig) -> SweepResult:
    """Run a named experiment; raises ValueError for unknown names."""
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"unknown experiment {name!r}; known: {known}") from None
    return fn(config)
