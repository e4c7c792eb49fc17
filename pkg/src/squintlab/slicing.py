"""Subarray planning and per-user sub-band allocation driven by the boundaries.

Antenna-domain slicing partitions the array into contiguous subarrays, each small
enough that its assigned path stays below the squint threshold over the full
band. Frequency-domain slicing partitions the band into per-user sub-bands, each
narrow enough for a fixed subarray size and for the user's multipath delay
spread. Both planners are deterministic and report infeasibility explicitly
instead of clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .boundaries import (
    SquintThresholds,
    antenna_boundary,
    freq_boundary,
    is_unbounded,
    near_field_threshold,
    subband_phase_limit,
)
from .wavefield import ArrayGeometry, CarrierGrid, FieldModel, PathParams

#: guard applied before floor/ceil so boundary-exact sizes stay strictly inside
_EDGE_EPS = 1e-9


class InfeasiblePlanError(ValueError):
    """No plan satisfies the boundary constraints; details carry the numbers."""

    def __init__(self, message: str, details: dict | None = None) -> None:
        super().__init__(message)
        self.details = details or {}


@dataclass(frozen=True)
class SlicingPlan:
    """Contiguous partition of the array with one near-field path per subarray.

    ``path_assignment[t]`` indexes into ``path_order`` (0-based), which lists the
    near-field paths sorted by descending gain power; ``offsets[t]`` is the
    subarray center's element offset from the array center (units of spacing).
    """

    subarray_sizes: tuple[int, ...]
    path_assignment: tuple[int, ...]
    path_order: tuple[int, ...]
    offsets: tuple[float, ...]
    num_antennas: int

    @property
    def num_subarrays(self) -> int:
        return len(self.subarray_sizes)

    def starts(self) -> tuple[int, ...]:
        """First antenna row of each subarray."""
        acc, out = 0, []
        for size in self.subarray_sizes:
            out.append(acc)
            acc += size
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "subarrays": [
                {"size": size, "path": path, "offset": offset}
                for size, path, offset in zip(
                    self.subarray_sizes, self.path_assignment, self.offsets
                )
            ]
        }


@dataclass(frozen=True)
class UserSubband:
    """One user's contiguous slice of the OFDM grid."""

    user: int
    num_subcarriers: int
    start: int  # global index of the first owned subcarrier
    subcarrier_spacing_hz: float
    center_hz: float

    @property
    def bandwidth_hz(self) -> float:
        return self.num_subcarriers * self.subcarrier_spacing_hz

    def global_indices(self) -> range:
        return range(self.start, self.start + self.num_subcarriers)


@dataclass(frozen=True)
class SubbandPlan:
    """Full-band partition into per-user sub-bands (plus the subarray size used)."""

    subbands: tuple[UserSubband, ...]
    num_subarrays: int
    subarray_size: int

    @property
    def user_bandwidths(self) -> tuple[float, ...]:
        return tuple(sb.bandwidth_hz for sb in self.subbands)

    @property
    def user_subcarriers(self) -> tuple[int, ...]:
        return tuple(sb.num_subcarriers for sb in self.subbands)

    @property
    def user_centers(self) -> tuple[float, ...]:
        return tuple(sb.center_hz for sb in self.subbands)

    def to_json_dict(self) -> dict:
        return {
            "subbands": [
                {
                    "bandwidth_hz": sb.bandwidth_hz,
                    "subcarriers": sb.num_subcarriers,
                    "center_hz": sb.center_hz,
                }
                for sb in self.subbands
            ]
        }


def _near_paths(paths: Sequence[PathParams]) -> list[int]:
    return [i for i, p in enumerate(paths) if p.field_model is not FieldModel.FAR]


# ---------------------------------------------------------------------------
# antenna-domain planner
# ---------------------------------------------------------------------------


def plan_antenna_slices(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    paths: Sequence[PathParams],
    thr: SquintThresholds,
    policy: str = "greedy",
) -> SlicingPlan:
    """Greedy max-size-first partition of the array over the near-field paths.

    Paths are served in descending gain power, cycling when the array can host
    more subarrays than there are paths. Each subarray takes
    min(floor(N_bar), remaining) antennas, shrinking (never below its own
    near-field threshold) when the remainder would be too small to host the next
    path; an irreducible runt folds into the last subarray.
    """
    if policy != "greedy":
        raise ValueError(f"unknown policy {policy!r}")
    near = _near_paths(paths)
    if not near:
        raise InfeasiblePlanError("no near-field paths to serve")
    order = sorted(near, key=lambda i: -abs(paths[i].gain) ** 2)
    num_near = len(order)

    lows, highs = [], []
    for idx in order:
        path = paths[idx]
        n_tilde = near_field_threshold(
            path, geom.center_freq_hz, thr.kappa_a,
            spacing_m=geom.spacing_m, wave_speed=geom.wave_speed,
        )
        n_bar = antenna_boundary(
            grid.bandwidth_hz, path, geom.center_freq_hz, thr, "near",
            spacing_m=geom.spacing_m, wave_speed=geom.wave_speed,
        )
        lows.append(max(1, math.ceil(n_tilde - _EDGE_EPS)))
        highs.append(math.floor(n_bar - _EDGE_EPS))

    n = geom.num_antennas
    if n < lows[0]:
        raise InfeasiblePlanError(
            "array smaller than the strongest path's near-field threshold",
            {"num_antennas": n, "min_size": lows[0]},
        )
    for j in range(num_near):
        if highs[j] < lows[j]:
            raise InfeasiblePlanError(
                "a path admits no compliant subarray size",
                {"path": order[j], "window": (lows[j], highs[j])},
            )

    sizes: list[int] = []
    assign: list[int] = []
    remaining = n
    t = 0
    while remaining > 0:
        j = t % num_near
        if remaining < lows[j]:
            # runt leftover: cannot host a compliant subarray for path j
            sizes[-1] += remaining
            remaining = 0
            break
        size = min(highs[j], remaining)
        leftover = remaining - size
        nxt = (t + 1) % num_near
        if 0 < leftover < lows[nxt]:
            give = min(lows[nxt] - leftover, size - lows[j])
            size -= give
            leftover += give
        sizes.append(size)
        assign.append(j)
        remaining = leftover
        t += 1

    offsets = []
    acc = 0
    for size in sizes:
        offsets.append(-n / 2.0 + acc + size / 2.0)
        acc += size
    return SlicingPlan(tuple(sizes), tuple(assign), tuple(order), tuple(offsets), n)


# ---------------------------------------------------------------------------
# frequency-domain allocator
# ---------------------------------------------------------------------------


def _subcarrier_cap(limit_hz: object, spacing_hz: float, total: int) -> int:
    """Largest sub-band size whose occupied span (M_s - 1) * df stays below limit."""
    if is_unbounded(limit_hz):
        return total
    cap = math.floor(float(limit_hz) / spacing_hz - _EDGE_EPS) + 1
    return max(1, min(total, cap))


def user_subcarrier_cap(
    user_paths: Sequence[PathParams],
    geom: ArrayGeometry,
    grid: CarrierGrid,
    thr: SquintThresholds,
    subarray_size: int,
) -> int:
    """Per-user sub-band size cap from squint (at the subarray scale) and delay spread."""
    sub_geom = geom.with_antennas(subarray_size)
    near = [user_paths[i] for i in _near_paths(user_paths)]
    cap = grid.num_subcarriers
    for path in near:
        cap = min(
            cap,
            _subcarrier_cap(
                freq_boundary(sub_geom, path, thr, "near"),
                grid.subcarrier_spacing_hz,
                grid.num_subcarriers,
            ),
        )
    if near:
        cap = min(
            cap,
            _subcarrier_cap(
                subband_phase_limit(near, thr.kappa_f, geom.wave_speed),
                grid.subcarrier_spacing_hz,
                grid.num_subcarriers,
            ),
        )
    return cap


def allocate_subbands(
    users: Sequence[Sequence[PathParams]],
    geom: ArrayGeometry,
    grid: CarrierGrid,
    thr: SquintThresholds,
    num_subarrays: int,
    policy: str = "equal",
) -> SubbandPlan:
    """Partition the band into per-user sub-bands under per-user caps.

    Caps combine the squint frequency boundary evaluated for one subarray of
    N / num_subarrays antennas with the user's multipath delay-spread limit,
    both discretized to the occupied subcarrier span. Shares start equal (or
    proportional to total path power under policy="proportional"), are clipped
    to the caps, and the leftover subcarriers are handed out round-robin to
    users with slack.
    """
    k_users = len(users)
    if k_users < 1:
        raise ValueError("at least one user is required")
    if geom.num_antennas % num_subarrays != 0:
        raise ValueError("num_subarrays must divide num_antennas")
    if policy not in ("equal", "proportional"):
        raise ValueError(f"unknown policy {policy!r}")
    m_total = grid.num_subcarriers
    if k_users > m_total:
        raise InfeasiblePlanError(
            "more users than subcarriers", {"users": k_users, "subcarriers": m_total}
        )
    size = geom.num_antennas // num_subarrays

    caps = [user_subcarrier_cap(up, geom, grid, thr, size) for up in users]
    if sum(caps) < m_total:
        raise InfeasiblePlanError(
            "per-user caps cannot cover the band",
            {"caps": caps, "required": m_total},
        )

    if policy == "equal":
        shares = [m_total // k_users] * k_users
        for k in range(m_total % k_users):
            shares[k] += 1
    else:
        weights = [sum(abs(p.gain) ** 2 for p in up) for up in users]
        total_w = sum(weights)
        if total_w <= 0.0:
            raise ValueError("proportional policy needs positive total path power")
        raw = [m_total * w / total_w for w in weights]
        shares = [math.floor(x) for x in raw]
        remainder = m_total - sum(shares)
        by_fraction = sorted(range(k_users), key=lambda k: -(raw[k] - shares[k]))
        for k in by_fraction[:remainder]:
            shares[k] += 1
        for k in range(k_users):  # every user owns at least one subcarrier
            if shares[k] == 0:
                shares[k] = 1
        surplus = sum(shares) - m_total
        for k in sorted(range(k_users), key=lambda k: -shares[k]):
            while surplus > 0 and shares[k] > 1:
                shares[k] -= 1
                surplus -= 1

    shares = [min(sh, cap) for sh, cap in zip(shares, caps)]
    deficit = m_total - sum(shares)
    k = 0
    while deficit > 0:
        idx = k % k_users
        if shares[idx] < caps[idx]:
            shares[idx] += 1
            deficit -= 1
        k += 1

    band = grid.bandwidth_hz
    f_c = geom.center_freq_hz
    spacing = grid.subcarrier_spacing_hz
    subbands = []
    start = 0
    for k, count in enumerate(shares):
        width = count * spacing
        center = f_c - band / 2.0 + start * spacing + width / 2.0
        subbands.append(UserSubband(k, count, start, spacing, center))
        start += count
    return SubbandPlan(tuple(subbands), num_subarrays, size)
