"""Scenario evaluation: strategies, ablations, sweeps, and gain maps.

A Scenario bundles everything one run needs: array and link configuration, the
orientation pair, the true AP direction, and which beam strategy to evaluate.
Strategies are the trajectory-covering plan ("covrage") and three single-beam
baselines steering the whole aperture at the path start, at the farthest
sample whose beam still covers the start, or at the halfway sample. Two
ablations modify the covering plan only: no_sync randomizes every beam-level
phase shift (seeded), delayed_first moves the first beam to the farthest
sample still covering the path start.

Sweeps report per-sample receive gain, noise penalty against the pattern's
hemisphere-wide maximum, received power, and the selected rate entry. All
results are deterministic functions of the scenario, including the seeded
random pieces.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .array_model import (
    GAIN_FLOOR_DBI,
    ArrayConfig,
    Awv,
    SteeringDirection,
    beamwidth_uv,
    coefficient_grid,
    coefficient_points,
    peak_gain,
    quantize_phases,
    steering_weights,
)
from .errors import ConfigError, HemisphereError, InvalidUvError
from .geometry import (
    Quaternion,
    Trajectory,
    UvPoint,
    hamilton_product,
    sample_trajectory,
    trajectory_length,
)
from .link_budget import (
    LinkParams,
    McsEntry,
    default_mcs_table,
    path_loss,
    select_mcs,
)
from .planner import BeamPlan, covrage_plan, plan_trajectory

STRATEGIES = ("covrage", "baseline-start", "baseline-edge", "baseline-mid")

# Clamp used by external plotting of gain maps; recorded in CLI output metadata.
DISPLAY_CLAMP_DBI = 30.0


@dataclass(frozen=True)
class Scenario:
    """One evaluation setup: array, link, motion, strategy, and knobs."""

    array: ArrayConfig = ArrayConfig()
    link: LinkParams = LinkParams()
    orientation_start: Quaternion = Quaternion.identity()
    orientation_end: Quaternion = Quaternion.identity()
    ap_direction: UvPoint = UvPoint(0.0, 0.0)
    n_samples: int | None = None
    strategy: str = "covrage"
    no_sync: bool = False
    delayed_first: bool = False
    seed: int = 0
    interleave: int = 4
    phase_bits: int | None = None
    mcs_table: tuple[McsEntry, ...] | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if (self.no_sync or self.delayed_first) and self.strategy != "covrage":
            raise ConfigError("ablations apply to the covrage strategy only")
        if self.n_samples is not None and self.n_samples < 2:
            raise ConfigError("n_samples must be at least 2")
        if self.phase_bits is not None and self.phase_bits < 1:
            raise ConfigError("phase_bits must be at least 1")


@dataclass(frozen=True)
class BeamBuild:
    """A scenario's beam: the weights, the plan when one exists, the path."""

    scenario: Scenario
    awv: Awv
    plan: BeamPlan | None
    trajectory: Trajectory


def scenario_trajectory(sc: Scenario) -> Trajectory:
    """The sampled apparent AP path all strategies of one scenario share."""
    if sc.n_samples is not None:
        return sample_trajectory(
            sc.orientation_start, sc.orientation_end, sc.ap_direction, sc.n_samples
        )
    return plan_trajectory(
        sc.orientation_start, sc.orientation_end, sc.ap_direction, sc.array, sc.interleave
    )


def _baseline_target(sc: Scenario, traj: Trajectory) -> UvPoint:
    pts = np.column_stack([traj.u_array(), traj.v_array()])
    if sc.strategy == "baseline-start":
        return traj[0]
    if sc.strategy == "baseline-edge":
        width = beamwidth_uv(min(sc.array.nx, sc.array.ny), sc.array.spacing_wavelengths)
        dist = np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])
        inside = np.nonzero(dist <= width / 2.0 + 1e-12)[0]
        return traj[int(inside[-1])]
    # halfway along the path by arc length, nearest sample
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return traj[int(np.argmin(np.abs(cum - cum[-1] / 2.0)))]


def build_beam(sc: Scenario) -> BeamBuild:
    """Construct the weight vector a scenario's strategy calls for."""
    traj = scenario_trajectory(sc)
    plan = None
    if sc.strategy == "covrage":
        override = None
        if sc.no_sync:
            rng = np.random.default_rng(sc.seed)
            override = lambda count: np.exp(2j * np.pi * rng.uniform(size=count))
        awv, plan = covrage_plan(
            sc.orientation_start,
            sc.orientation_end,
            sc.ap_direction,
            sc.array,
            interleave=sc.interleave,
            n_samples=len(traj),
            delayed_first=sc.delayed_first,
            sync_override=override,
        )
    else:
        direction = SteeringDirection.from_uv(_baseline_target(sc, traj))
        awv = steering_weights(
            (sc.array.nx, sc.array.ny), sc.array.spacing_wavelengths, direction
        )
    if sc.phase_bits is not None:
        awv = quantize_phases(awv, sc.phase_bits)
    return BeamBuild(sc, awv, plan, traj)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Per-sample link metrics along a trajectory plus pattern-wide context."""

    trajectory: Trajectory
    gain_dbi: np.ndarray
    noise_penalty_db: np.ndarray
    rx_power_dbm: np.ndarray
    mcs: tuple[McsEntry, ...]
    peak_gain_dbi: float
    peak_uv: UvPoint

    def __post_init__(self) -> None:
        n = len(self.trajectory)
        for name in ("gain_dbi", "noise_penalty_db", "rx_power_dbm"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"{name} must hold one value per sample")
            arr.setflags(write=False)
        if len(self.mcs) != n:
            raise ValueError("mcs must hold one entry per sample")

    @property
    def min_gain_dbi(self) -> float:
        return float(self.gain_dbi.min())

    @property
    def max_gain_dbi(self) -> float:
        return float(self.gain_dbi.max())

    @property
    def gain_range_db(self) -> float:
        return float(self.gain_dbi.max() - self.gain_dbi.min())

    @property
    def min_datarate_mbps(self) -> float:
        return min(entry.datarate_mbps for entry in self.mcs)

    @property
    def min_mcs_index(self) -> int:
        return min(self.mcs, key=lambda entry: entry.datarate_mbps).index


def sweep_trajectory(
    awv: Awv,
    trajectory: Trajectory,
    link: LinkParams,
    spacing_wl: float,
    mcs_table: tuple[McsEntry, ...] | None = None,
    peak_resolution: int = 512,
) -> SweepResult:
    """Receive gain, noise penalty, received power, and rate along a path."""
    table = mcs_table if mcs_table is not None else default_mcs_table()
    coeff = coefficient_points(awv, trajectory.u_array(), trajectory.v_array(), spacing_wl)
    power = np.abs(coeff) ** 2
    gains = np.maximum(10.0 * np.log10(np.maximum(power, 1e-300)), GAIN_FLOOR_DBI)
    g_max, peak_uv = peak_gain(awv, spacing_wl, peak_resolution)
    loss = path_loss(link.distance_m, link)
    rx = link.eirp_dbm - loss + gains
    mcs = tuple(select_mcs(float(level), table) for level in rx)
    return SweepResult(
        trajectory=trajectory,
        gain_dbi=gains,
        noise_penalty_db=g_max - gains,
        rx_power_dbm=rx,
        mcs=mcs,
        peak_gain_dbi=g_max,
        peak_uv=peak_uv,
    )


@dataclass(frozen=True, eq=False)
class GainMap:
    """Gain over the sine-space disc on a square grid; NaN outside the disc."""

    axis: np.ndarray
    gain_dbi: np.ndarray

    def __post_init__(self) -> None:
        self.axis.setflags(write=False)
        self.gain_dbi.setflags(write=False)

    @property
    def resolution(self) -> int:
        return len(self.axis)


def gain_map(awv: Awv, resolution: int, spacing_wl: float) -> GainMap:
    """Evaluate the pattern on a resolution-squared grid, indexed [u, v]."""
    if resolution < 16:
        raise ConfigError("gain map resolution must be at least 16")
    axis = np.linspace(-1.0, 1.0, resolution)
    power = np.abs(coefficient_grid(awv, axis, axis, spacing_wl)) ** 2
    gain = np.maximum(10.0 * np.log10(np.maximum(power, 1e-300)), GAIN_FLOOR_DBI)
    gain[axis[:, None] ** 2 + axis[None, :] ** 2 > 1.0] = np.nan
    return GainMap(axis=axis, gain_dbi=gain)


def _rotation_for_length(
    q1: Quaternion,
    axis: tuple[float, float, float],
    ap_dir: UvPoint,
    target: float,
    rel_tol: float = 0.005,
) -> Quaternion | None:
    """End orientation making the sampled path length hit target, else None.

    Bisects the rotation angle about the fixed axis; paths leaving the front
    hemisphere count as overshoot, so the search stays inside valid angles.
    """

    def length_at(angle: float) -> float | None:
        rot = Quaternion.from_axis_angle(axis, angle)
        q2 = hamilton_product(rot.conjugate(), q1)
        try:
            return trajectory_length(sample_trajectory(q1, q2, ap_dir, 64))
        except (HemisphereError, InvalidUvError):
            return None

    hi = 0.25
    l_hi = length_at(hi)
    while l_hi is not None and l_hi < target and hi < 3.0:
        hi *= 1.6
        l_hi = length_at(hi)
    if l_hi is not None and l_hi < target:
        return None
    lo = 0.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        l_mid = length_at(mid)
        if l_mid is None or l_mid > target:
            hi = mid
        else:
            lo = mid
    angle = 0.5 * (lo + hi)
    reached = length_at(angle)
    if reached is None or abs(reached - target) > rel_tol * target:
        return None
    rot = Quaternion.from_axis_angle(axis, angle)
    return hamilton_product(rot.conjugate(), q1)


def random_head_rotation(
    seed: int, target_uv_length: float, ap_dir: UvPoint = UvPoint(0.0, 0.0)
) -> tuple[Quaternion, Quaternion]:
    """Seeded orientation pair whose apparent AP path has the given length.

    The start orientation is a uniform random rotation; rotation axes are
    drawn until one admits the target length without the path leaving the
    front hemisphere. Identical arguments always return the identical pair.
    """
    if target_uv_length < 0.0:
        raise ValueError("target length must be non-negative")
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=4)
    vec /= np.linalg.norm(vec)
    q1 = Quaternion(*vec)
    if target_uv_length == 0.0:
        return q1, q1
    for _ in range(40):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        q2 = _rotation_for_length(q1, tuple(axis), ap_dir, target_uv_length)
        if q2 is not None:
            return q1, q2
    raise ValueError(f"no head rotation found with a length-{target_uv_length} apparent path")


def reference_scenario(name: str) -> Scenario:
    """Two fixed synthesized scenarios used throughout the test battery.

    "a": the AP starts 0.22 from broadside and the head rolls about broadside,
    dragging the apparent AP along a gently curved arc of length 0.30; the
    tail runs past the last covering beam, so planning extends beyond the
    sampled end.
    "b": the AP starts at broadside and runs outward along the u axis with a
    strong curl (the rotation axis leans heavily out of the array plane),
    length 0.35 at 256 samples; its far end lands roughly 33 dB down the
    start-steered pattern.
    """
    q1 = Quaternion.identity()
    if name == "a":
        ap = UvPoint(0.22, 0.0)
        rot = Quaternion.from_axis_angle((0.0, 0.0, 1.0), 0.30 / 0.22)
        return Scenario(orientation_start=q1, orientation_end=rot.conjugate(), ap_direction=ap)
    if name == "b":
        ap = UvPoint(0.0, 0.0)
        norm = math.sqrt(1.0 + 1.7**2)
        axis = (-1.0 / norm, 0.0, 1.7 / norm)
        q2 = _rotation_for_length(q1, axis, ap, 0.35)
        if q2 is None:
            raise RuntimeError("reference rotation construction failed")
        return Scenario(orientation_start=q1, orientation_end=q2, ap_direction=ap, n_samples=256)
    raise ConfigError(f"unknown reference scenario {name!r}")


class CompareRow(NamedTuple):
    strategy: str
    ablation: str
    beam_count: int
    result: SweepResult


def compare_strategies(sc: Scenario, peak_resolution: int = 512) -> list[CompareRow]:
    """Run every strategy plus both ablations on one scenario's trajectory."""
    variants = [
        ("covrage", ""),
        ("baseline-start", ""),
        ("baseline-edge", ""),
        ("baseline-mid", ""),
        ("covrage", "no_sync"),
        ("covrage", "delayed_first"),
    ]
    rows = []
    for strategy, ablation in variants:
        variant = dataclasses.replace(
            sc,
            strategy=strategy,
            no_sync=ablation == "no_sync",
            delayed_first=ablation == "delayed_first",
        )
        built = build_beam(variant)
        result = sweep_trajectory(
            built.awv,
            built.trajectory,
            variant.link,
            variant.array.spacing_wavelengths,
            variant.mcs_table,
            peak_resolution,
        )
        beams = built.plan.n_beams if built.plan is not None else 1
        rows.append(CompareRow(strategy, ablation, beams, result))
    return rows
