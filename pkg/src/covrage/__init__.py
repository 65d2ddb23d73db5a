"""Receive-side beam planning for head-mounted mmWave links.

Splits a planar array into sub-arrays, steers one merged beam per segment of
the predicted head trajectory, phase-aligns the segments at their overlaps,
and scores the result against single-beam baselines over an IEEE 802.11ad
link budget.
"""

__version__ = "0.1.0"

from .array_model import (
    GAIN_FLOOR_DBI,
    ArrayConfig,
    Awv,
    SteeringDirection,
    SubArrayLayout,
    array_coefficient,
    beamwidth_angular,
    beamwidth_uv,
    compose_full_awv,
    directional_gain,
    element_phase_delta,
    full_array_layout,
    origin_phase_correction,
    partition_interleaved,
    partition_localized,
    peak_gain,
    quantize_phases,
    steering_weights,
)
from .errors import ConfigError, CovrageError, HemisphereError, InvalidUvError
from .geometry import (
    EulerAngles,
    Quaternion,
    Trajectory,
    UvPoint,
    apparent_ap_rotation,
    direction_to_uv,
    euler_to_quat,
    euler_to_uv,
    hamilton_product,
    quat_to_euler,
    rotate_vector,
    sample_trajectory,
    slerp_power,
    trajectory_length,
    uv_to_direction,
    uv_to_euler,
)
from .harness import (
    Scenario,
    SweepResult,
    build_beam,
    compare_strategies,
    gain_map,
    random_head_rotation,
    reference_scenario,
    sweep_trajectory,
)
from .link_budget import (
    LINK_LOST,
    LinkParams,
    McsEntry,
    default_mcs_table,
    load_mcs_table,
    noise_penalty,
    path_loss,
    received_power,
    select_mcs,
)
from .planner import (
    BeamPlan,
    SteeredBeam,
    allocate_sub_arrays,
    cover_points,
    covrage_plan,
    phase_sync,
    plan_trajectory,
    required_subbeams,
    subdivision_level,
)

__all__ = [
    "__version__",
    "GAIN_FLOOR_DBI",
    "ArrayConfig",
    "Awv",
    "SteeringDirection",
    "SubArrayLayout",
    "array_coefficient",
    "beamwidth_angular",
    "beamwidth_uv",
    "compose_full_awv",
    "directional_gain",
    "element_phase_delta",
    "full_array_layout",
    "origin_phase_correction",
    "partition_interleaved",
    "partition_localized",
    "peak_gain",
    "quantize_phases",
    "steering_weights",
    "ConfigError",
    "CovrageError",
    "HemisphereError",
    "InvalidUvError",
    "EulerAngles",
    "Quaternion",
    "Trajectory",
    "UvPoint",
    "apparent_ap_rotation",
    "direction_to_uv",
    "euler_to_quat",
    "euler_to_uv",
    "hamilton_product",
    "quat_to_euler",
    "rotate_vector",
    "sample_trajectory",
    "slerp_power",
    "trajectory_length",
    "uv_to_direction",
    "uv_to_euler",
    "Scenario",
    "SweepResult",
    "build_beam",
    "compare_strategies",
    "gain_map",
    "random_head_rotation",
    "reference_scenario",
    "sweep_trajectory",
    "LINK_LOST",
    "LinkParams",
    "McsEntry",
    "default_mcs_table",
    "load_mcs_table",
    "noise_penalty",
    "path_loss",
    "received_power",
    "select_mcs",
    "BeamPlan",
    "SteeredBeam",
    "allocate_sub_arrays",
    "cover_points",
    "covrage_plan",
    "phase_sync",
    "plan_trajectory",
    "required_subbeams",
    "subdivision_level",
]
