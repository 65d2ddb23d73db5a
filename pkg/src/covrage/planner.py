"""Beam planning: cover a sampled gaze trajectory with steered sub-beams.

The planner splits the aperture into interleaved groups (full-width beams),
subdivides them into quadrant blocks when the path is too long for the group
budget, walks the sampled path placing beam centers greedily so that every
sample sits within half a beamwidth of some center, assigns groups to beams
(reinforcing with spares), aligns the phases of adjacent beams where their
coverage discs meet, and composes the per-group weights into one full-array
weight vector.

Phase alignment compares group coefficients in group-local coordinates; the
physical origin offset of each group is cancelled separately by a per-group
correction phasor at composition time, which is what makes several groups
aimed at one direction add up exactly like the undivided aperture.

Everything here is deterministic and pure; plans for independent inputs can be
computed concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .array_model import (
    ArrayConfig,
    Awv,
    SteeringDirection,
    SubArrayLayout,
    array_coefficient,
    beamwidth_uv,
    compose_full_awv,
    origin_phase_correction,
    partition_interleaved,
    partition_localized,
    steering_weights,
)
from .geometry import (
    Quaternion,
    Trajectory,
    UvPoint,
    sample_trajectory,
    trajectory_length,
    uv_to_euler,
)

# Closed-disc slack: a sample exactly on the coverage boundary counts as covered.
COVERAGE_SLACK = 1e-12

# Sampling defaults: consecutive UV spacing at most a tenth of the beam width,
# never fewer than 64 samples.
MIN_TRAJECTORY_SAMPLES = 64
SAMPLES_PER_BEAMWIDTH = 10

# Tail extension is bounded by this multiple of the original sample count.
EXTRAPOLATION_CAP_FACTOR = 4

# Below this coefficient magnitude a beam's phase is numerically meaningless.
SYNC_MAGNITUDE_FLOOR = 1e-12


@dataclass(frozen=True)
class CoverageParams:
    """Effective sub-beam geometry a plan was built against."""

    width: float
    interleaved: int
    subdivisions: int

    def __post_init__(self) -> None:
        if self.width <= 0.0:
            raise ValueError("sub-beam width must be positive")
        if self.interleaved < 1 or self.subdivisions < 0:
            raise ValueError("invalid coverage parameters")

    @property
    def half_width(self) -> float:
        return self.width / 2.0


@dataclass(frozen=True)
class SteeredBeam:
    """One sub-beam: its center, steering, assigned groups, and local weights."""

    center: UvPoint
    direction: SteeringDirection
    sub_ids: tuple[int, ...]
    awv: Awv


@dataclass(frozen=True)
class BeamPlan:
    """Complete plan: centers, overlap points, per-beam shifts, group layout."""

    beam_centers: tuple[UvPoint, ...]
    overlap_points: tuple[UvPoint, ...]
    sync_shifts: tuple[complex, ...]
    layout: SubArrayLayout
    assignment: tuple[tuple[int, ...], ...]
    trajectory: Trajectory
    coverage: CoverageParams
    extrapolated: bool
    sync_skipped: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.beam_centers)
        if n == 0:
            raise ValueError("a plan needs at least one beam")
        if len(self.sync_shifts) != n:
            raise ValueError("one sync shift per beam required")
        if len(self.overlap_points) != n - 1:
            raise ValueError("expected one overlap point between adjacent beams")
        if len(self.assignment) != n:
            raise ValueError("one group set per beam required")

    @property
    def n_beams(self) -> int:
        return len(self.beam_centers)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        """How many groups reinforce each beam."""
        return tuple(len(g) for g in self.assignment)


class CoverResult(NamedTuple):
    centers: tuple[UvPoint, ...]
    overlaps: tuple[UvPoint, ...]
    extrapolated: bool


def required_subbeams(path_length: float, beam_width: float) -> int:
    """Beams needed to cover a path: one extra half-width pads the start."""
    if path_length < 0.0 or beam_width <= 0.0:
        raise ValueError("need a non-negative length and positive width")
    return math.ceil((path_length + 0.5 * beam_width) / beam_width)


def subdivision_level(path_length: float, beam_width: float, n_groups: int) -> int:
    """Smallest quadrant-split depth whose beam budget covers the path.

    Each split quadruples the group count and doubles every beam's width, so
    capacity grows eightfold per level and the loop always terminates.
    """
    if path_length < 0.0 or beam_width <= 0.0 or n_groups < 1:
        raise ValueError("invalid coverage inputs")
    s = 0
    while path_length + 2.0 ** (s - 1) * beam_width > 4.0**s * n_groups * 2.0**s * beam_width:
        s += 1
    return s


def allocate_sub_arrays(n_beams: int, n_groups: int) -> tuple[tuple[int, ...], ...]:
    """Assign groups to beams, spending spare groups on reinforcement.

    The four-group arrangement keeps its special pairings: spares reinforce
    diagonally opposite partners (group offsets (0,0)+(1,1) and (1,0)+(0,1)),
    which keeps the reinforced pattern symmetric. Larger budgets hand out one
    group per beam in order and spread the leftovers round-robin from beam 0.
    """
    if n_beams < 1:
        raise ValueError("at least one beam required")
    if n_beams > n_groups:
        raise ValueError(f"{n_beams} beams exceed the {n_groups} available groups; subdivide first")
    if n_groups == 4:
        return {
            1: ((0, 1, 2, 3),),
            2: ((0, 3), (1, 2)),
            3: ((0, 3), (1,), (2,)),
            4: ((0,), (1,), (2,), (3,)),
        }[n_beams]
    groups = [[k] for k in range(n_beams)]
    for spare in range(n_beams, n_groups):
        groups[(spare - n_beams) % n_beams].append(spare)
    return tuple(tuple(g) for g in groups)


def cover_points(
    points,
    half_width: float,
    *,
    delayed_first: bool = False,
    extrapolation_cap_factor: int = EXTRAPOLATION_CAP_FACTOR,
) -> CoverResult:
    """Place beam centers so every sample lies within half_width of one.

    Walks the samples in order. The first beam sits on the first sample (or,
    with delayed_first, on the farthest sample still covering it). When a
    sample falls outside every placed beam, a candidate center advances along
    the remaining samples and is locked at the last position that still covers
    both the pending uncovered samples and an overlap anchor: the most recent
    sample covered by the previous beam. Each recorded overlap point is
    therefore inside both adjacent beams' discs.

    If the candidate walk runs off the end of the samples, the path is
    extended by repeating the final step vector, so the last beam can land
    ahead of the sampled motion. The extension stops at the lock condition,
    the unit disc, or extrapolation_cap_factor times the sample count,
    whichever comes first.
    """
    pts = [(float(p.u), float(p.v)) for p in points]
    n = len(pts)
    if n == 0:
        raise ValueError("cannot cover an empty trajectory")
    if half_width <= 0.0:
        raise ValueError("half_width must be positive")
    h2 = (half_width + COVERAGE_SLACK) ** 2

    def near(a: tuple[float, float], b: tuple[float, float]) -> bool:
        dx = a[0] - b[0]
        dy = a[1] - b[1]
        return dx * dx + dy * dy <= h2

    for k in range(1, n):
        dx = pts[k][0] - pts[k - 1][0]
        dy = pts[k][1] - pts[k - 1][1]
        if dx * dx + dy * dy >= half_width * half_width:
            raise ValueError(f"sample spacing at index {k} is not below the coverage half-width")

    start = 0
    if delayed_first:
        for j in range(n - 1, -1, -1):
            if near(pts[j], pts[0]):
                start = j
                break
    centers = [pts[start]]
    overlaps: list[tuple[float, float]] = []
    extrapolated = False

    if n >= 2:
        step_x = pts[-1][0] - pts[-2][0]
        step_y = pts[-1][1] - pts[-2][1]
    else:
        step_x = step_y = 0.0
    has_step = step_x * step_x + step_y * step_y > 1e-30
    max_extension = extrapolation_cap_factor * n

    anchor = pts[0]
    i = 1
    while i < n:
        p = pts[i]
        if near(p, centers[-1]):
            anchor = p
            i += 1
            continue
        if any(near(p, c) for c in centers[:-1]):
            i += 1
            continue
        if not near(p, anchor):
            # The anchor went stale behind an older beam; the immediate
            # predecessor is always covered and always within spacing of p.
            anchor = pts[i - 1]
        pending: list[tuple[float, float]] = []
        lock: tuple[float, float] | None = None
        lock_is_extension = False
        consumed = i
        j = i
        while True:
            if j < n:
                cand = pts[j]
                is_extension = False
            else:
                k = j - n
                if not has_step or k >= max_extension:
                    break
                cand = (pts[-1][0] + (k + 1) * step_x, pts[-1][1] + (k + 1) * step_y)
                if cand[0] * cand[0] + cand[1] * cand[1] > 1.0 + COVERAGE_SLACK:
                    break
                is_extension = True
            if not near(cand, anchor):
                break
            if not all(near(cand, q) for q in pending):
                break
            lock = cand
            lock_is_extension = is_extension
            if not is_extension:
                if not any(near(cand, c) for c in centers):
                    pending.append(cand)
                consumed = j + 1
            j += 1
        assert lock is not None  # the first candidate always satisfies both checks
        centers.append(lock)
        overlaps.append(anchor)
        if lock_is_extension:
            extrapolated = True
        anchor = lock
        i = consumed
    return CoverResult(
        tuple(UvPoint(c[0], c[1]) for c in centers),
        tuple(UvPoint(o[0], o[1]) for o in overlaps),
        extrapolated,
    )


def phase_sync(
    beams: Sequence[SteeredBeam],
    overlap_points: Sequence[UvPoint],
    layout: SubArrayLayout,
) -> tuple[tuple[complex, ...], tuple[int, ...]]:
    """Unit shifts aligning each beam's phase with its predecessor at the overlap.

    Coefficients are evaluated in group-local coordinates at the layout's
    effective pitch, so reinforced beams (several groups, identical local
    weights) and single-group beams sync identically. Shifts accumulate down
    the chain: beam k+1 is compared against the already-shifted beam k. The
    first beam is never shifted. Pairs whose coefficient magnitude vanishes at
    the overlap have no usable phase; they keep a unit shift and are reported
    in the second return value.
    """
    if len(overlap_points) != max(len(beams) - 1, 0):
        raise ValueError("expected exactly one overlap point between adjacent beams")
    shifts: list[complex] = [complex(1.0, 0.0)]
    skipped: list[int] = []
    for k, overlap in enumerate(overlap_points):
        e = uv_to_euler(overlap)
        prev = shifts[k] * array_coefficient(beams[k].awv, e.phi, e.theta, layout.spacing_wl)
        nxt = array_coefficient(beams[k + 1].awv, e.phi, e.theta, layout.spacing_wl)
        if abs(prev) < SYNC_MAGNITUDE_FLOOR or abs(nxt) < SYNC_MAGNITUDE_FLOOR:
            shifts.append(complex(1.0, 0.0))
            skipped.append(k)
            continue
        shifts.append((prev / abs(prev)) * (abs(nxt) / nxt))
    return tuple(shifts), tuple(skipped)


def plan_trajectory(
    q1: Quaternion,
    q2: Quaternion,
    ap_dir: UvPoint,
    cfg: ArrayConfig,
    interleave: int = 4,
) -> Trajectory:
    """Sample the apparent AP path densely enough for coverage planning.

    A 64-sample probe estimates the path length and the quadrant-split depth;
    if a tenth of the resulting beam width needs finer spacing, the path is
    resampled at that density.
    """
    m = math.isqrt(interleave)
    width = beamwidth_uv(min(cfg.nx, cfg.ny) // m, m * cfg.spacing_wavelengths)
    probe = sample_trajectory(q1, q2, ap_dir, MIN_TRAJECTORY_SAMPLES)
    length = trajectory_length(probe)
    s = subdivision_level(length, width, interleave)
    n = max(
        MIN_TRAJECTORY_SAMPLES,
        math.ceil(length / (width * 2.0**s / SAMPLES_PER_BEAMWIDTH)) + 1,
    )
    if n == MIN_TRAJECTORY_SAMPLES:
        return probe
    return sample_trajectory(q1, q2, ap_dir, n)


def covrage_plan(
    q1: Quaternion,
    q2: Quaternion,
    ap_dir: UvPoint,
    cfg: ArrayConfig,
    *,
    interleave: int = 4,
    n_samples: int | None = None,
    delayed_first: bool = False,
    sync_override: Sequence[complex] | Callable[[int], Sequence[complex]] | None = None,
) -> tuple[Awv, BeamPlan]:
    """Full pipeline from an orientation pair to a composed weight vector.

    Samples the apparent AP trajectory, picks the quadrant-split depth for its
    length, covers it with beam centers, allocates groups (spares reinforce),
    steers each group, synchronizes adjacent beams, and composes everything
    into one full-array weight vector.

    The placed beam count is authoritative: if it exceeds the group budget the
    split depth is raised and coverage rerun. sync_override replaces the
    computed shifts (one unit phasor per beam, or a callable receiving the
    beam count); the first shift is then taken from the override as well.
    """
    base = partition_interleaved(cfg, interleave)
    base_width = beamwidth_uv(min(base.side_x, base.side_y), base.spacing_wl)
    if n_samples is None:
        traj = plan_trajectory(q1, q2, ap_dir, cfg, interleave)
    else:
        if n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        traj = sample_trajectory(q1, q2, ap_dir, n_samples)
    length = trajectory_length(traj)
    s = subdivision_level(length, base_width, interleave)
    while True:
        layout = base
        for _ in range(s):
            layout = partition_localized(layout)
        width = base_width * 2.0**s
        cover = cover_points(traj, width / 2.0, delayed_first=delayed_first)
        if len(cover.centers) <= layout.n_sub:
            break
        s += 1

    assignment = allocate_sub_arrays(len(cover.centers), layout.n_sub)
    shape = (layout.side_x, layout.side_y)
    beams = []
    for center, subs in zip(cover.centers, assignment):
        direction = SteeringDirection.from_uv(center)
        beams.append(
            SteeredBeam(center, direction, subs, steering_weights(shape, layout.spacing_wl, direction))
        )

    if sync_override is not None:
        given = sync_override(len(beams)) if callable(sync_override) else sync_override
        shifts = tuple(complex(v) for v in given)
        if len(shifts) != len(beams):
            raise ValueError(f"expected {len(beams)} shift overrides, got {len(shifts)}")
        if any(abs(abs(v) - 1.0) > 1e-9 for v in shifts):
            raise ValueError("shift overrides must be unit phasors")
        skipped: tuple[int, ...] = ()
    else:
        shifts, skipped = phase_sync(beams, cover.overlaps, layout)

    sub_awvs: list[Awv | None] = [None] * layout.n_sub
    sub_shifts = np.zeros(layout.n_sub, dtype=complex)
    for beam, shift in zip(beams, shifts):
        for sidx in beam.sub_ids:
            sub_awvs[sidx] = beam.awv
            sub_shifts[sidx] = shift * origin_phase_correction(layout, sidx, beam.direction)
    awv = compose_full_awv(sub_awvs, sub_shifts, layout)
    plan = BeamPlan(
        beam_centers=cover.centers,
        overlap_points=cover.overlaps,
        sync_shifts=shifts,
        layout=layout,
        assignment=assignment,
        trajectory=traj,
        coverage=CoverageParams(width, interleave, s),
        extrapolated=cover.extrapolated,
        sync_skipped=skipped,
    )
    return awv, plan
