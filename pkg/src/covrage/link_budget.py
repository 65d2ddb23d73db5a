"""Link budget: log-distance path loss, received power, MCS selection.

The default profile is a 60 GHz indoor line-of-sight link: loss at the 1 m
reference distance is pinned to 68 dB (the free-space value at 60 GHz rounds
to it) and grows 20 dB per decade. Setting reference_loss_db to None swaps in
the exact free-space reference for the configured frequency instead.

Rate selection compares a received level against per-entry sensitivities from
the IEEE 802.11ad single-carrier set, shipped as a CSV (robust control mode at
27.5 Mbps, then 385 through 4620 Mbps across a 15 dB sensitivity span). Levels
below the control sensitivity yield the LINK_LOST sentinel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .array_model import SPEED_OF_LIGHT, Awv, SteeringDirection, directional_gain, peak_gain
from .errors import ConfigError

MCS_TABLE_RESOURCE = "data/mcs_80211ad.csv"
MCS_TABLE_HEADER = ("index", "sensitivity_dbm", "datarate_mbps")


@dataclass(frozen=True)
class LinkParams:
    """Transmit side and propagation profile of one link."""

    eirp_dbm: float = 30.0
    distance_m: float = 3.0
    frequency_hz: float = 60e9
    path_loss_exponent: float = 2.0
    reference_distance_m: float = 1.0
    # None selects the free-space reference loss for frequency_hz.
    reference_loss_db: float | None = 68.0
    noise_floor_dbm: float | None = None

    def __post_init__(self) -> None:
        if self.distance_m <= 0.0:
            raise ConfigError("link distance must be positive")
        if self.reference_distance_m <= 0.0:
            raise ConfigError("reference distance must be positive")
        if self.frequency_hz <= 0.0:
            raise ConfigError("carrier frequency must be positive")
        if self.path_loss_exponent <= 0.0:
            raise ConfigError("path-loss exponent must be positive")


def friis_reference_loss(frequency_hz: float, distance_m: float = 1.0) -> float:
    """Free-space loss in dB at the given distance."""
    if frequency_hz <= 0.0 or distance_m <= 0.0:
        raise ValueError("frequency and distance must be positive")
    wavelength = SPEED_OF_LIGHT / frequency_hz
    return 20.0 * math.log10(4.0 * math.pi * distance_m / wavelength)


def path_loss(distance_m: float, params: LinkParams) -> float:
    """Log-distance loss in dB: reference loss plus exponent-scaled decades."""
    if distance_m <= 0.0:
        raise ValueError("path loss is undefined for non-positive distances")
    if params.reference_loss_db is None:
        ref = friis_reference_loss(params.frequency_hz, params.reference_distance_m)
    else:
        ref = params.reference_loss_db
    return ref + 10.0 * params.path_loss_exponent * math.log10(distance_m / params.reference_distance_m)


def received_power(params: LinkParams, g_r_dbi: float, distance_m: float | None = None) -> float:
    """Received level in dBm: transmit EIRP minus loss plus receive gain."""
    d = params.distance_m if distance_m is None else distance_m
    return params.eirp_dbm - path_loss(d, params) + g_r_dbi


@dataclass(frozen=True)
class McsEntry:
    """One rate step: usable above its sensitivity."""

    index: int
    sensitivity_dbm: float
    datarate_mbps: float


# Level below every sensitivity, including the control mode's.
LINK_LOST = McsEntry(index=-1, sensitivity_dbm=float("-inf"), datarate_mbps=0.0)


def _validate_table(entries: list[McsEntry], origin: str) -> tuple[McsEntry, ...]:
    if not entries:
        raise ConfigError(f"{origin}: table has no entries")
    for prev, cur in zip(entries, entries[1:]):
        if cur.sensitivity_dbm <= prev.sensitivity_dbm:
            raise ConfigError(
                f"{origin}: sensitivities must increase strictly "
                f"(entry {cur.index} not above entry {prev.index})"
            )
        if cur.datarate_mbps <= prev.datarate_mbps:
            raise ConfigError(
                f"{origin}: datarates must increase strictly "
                f"(entry {cur.index} not above entry {prev.index})"
            )
    return tuple(entries)


def load_mcs_table(source) -> tuple[McsEntry, ...]:
    """Parse a rate table from a CSV path or file-like object.

    Column order is fixed: index, sensitivity_dbm, datarate_mbps. Blank lines
    and lines starting with # are skipped; the header row is required.
    """
    if hasattr(source, "read"):
        text = source.read()
        origin = getattr(source, "name", "<table>")
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        origin = str(source)
    rows = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows or tuple(c.strip() for c in rows[0].split(",")) != MCS_TABLE_HEADER:
        raise ConfigError(f"{origin}: first row must be '{','.join(MCS_TABLE_HEADER)}'")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        cells = [c.strip() for c in row.split(",")]
        if len(cells) != 3:
            raise ConfigError(f"{origin}: row {lineno} needs 3 columns, has {len(cells)}")
        try:
            entries.append(McsEntry(int(cells[0]), float(cells[1]), float(cells[2])))
        except ValueError as exc:
            raise ConfigError(f"{origin}: row {lineno}: {exc}") from None
    return _validate_table(entries, origin)


@lru_cache(maxsize=1)
def default_mcs_table() -> tuple[McsEntry, ...]:
    """The packaged 802.11ad single-carrier table."""
    ref = resources.files("covrage").joinpath(MCS_TABLE_RESOURCE)
    with ref.open("r", encoding="utf-8") as fh:
        return load_mcs_table(fh)


def select_mcs(level_db: float, table: tuple[McsEntry, ...]) -> McsEntry:
    """Highest-rate entry whose sensitivity the level meets, else LINK_LOST.

    The level and the table sensitivities must share a scale (received dBm
    against receiver sensitivities, or any consistent margin convention).
    """
    if not table:
        raise ConfigError("empty rate table")
    best = None
    for entry in table:
        if entry.sensitivity_dbm <= level_db:
            best = entry
    return best if best is not None else LINK_LOST


def noise_penalty(
    awv: Awv,
    aoa: SteeringDirection,
    spacing_wl: float,
    resolution: int = 512,
) -> float:
    """How far the pattern's global maximum sits above the gain at the AoA.

    An isotropic-noise receiver picks up noise best wherever the pattern peaks,
    so this difference is the SNR give-away of pointing gain elsewhere. Found
    by a hemisphere grid search with local refinement; non-negative whenever
    the AoA is inside the hemisphere.
    """
    g_max, _ = peak_gain(awv, spacing_wl, resolution)
    return g_max - directional_gain(awv, aoa.phi, aoa.theta, spacing_wl)
