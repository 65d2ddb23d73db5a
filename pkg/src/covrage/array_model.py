"""Uniform rectangular array model: weights, patterns, gains, sub-array layouts.

Element (x, y) of a half-wavelength-scaled lattice with pitch ``d`` (in carrier
wavelengths) sees the incoming plane wave from yaw/pitch ``(phi, theta)`` with a
phase offset of ``exp(-2j pi d (x u + y v))`` relative to element (0, 0), where
``(u, v)`` are the direction's sine-space coordinates. Conjugating that offset
element-for-element steers the array; summing weight times offset over the
aperture gives the receive coefficient, and ``10 log10 |C|^2`` the gain in dBi.

Sub-array layouts assign every physical element to exactly one group and give it
local coordinates inside that group. Interleaving takes every sqrt(M)-th element,
which multiplies the effective pitch by sqrt(M) while keeping the full aperture,
so each group's beam keeps the full array's width. Localized splitting divides a
group into its four quadrant blocks, halving the side and doubling the beamwidth.

Functions are pure and arrays handed out are marked read-only, so values can be
shared across threads freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geometry import UvPoint, uv_to_euler

SPEED_OF_LIGHT = 299_792_458.0

# Floor applied by directional_gain: far below anything a plot would show, but
# finite so downstream arithmetic stays total.
GAIN_FLOOR_DBI = -40.0

# Half-power width of a uniform aperture, as a fraction of wavelength/aperture.
HALF_POWER_CONSTANT = 0.886


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry of the full receive array."""

    nx: int = 32
    ny: int = 32
    spacing_wavelengths: float = 0.25
    frequency_hz: float = 60e9

    def __post_init__(self) -> None:
        if self.nx < 1 or self.ny < 1:
            raise ConfigError("array dimensions must be positive")
        if self.spacing_wavelengths <= 0.0:
            raise ConfigError("element spacing must be positive")
        if self.frequency_hz <= 0.0:
            raise ConfigError("carrier frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def aperture_m(self) -> float:
        """Physical side length along x in meters."""
        return self.nx * self.spacing_wavelengths * self.wavelength_m


@dataclass(frozen=True)
class SteeringDirection:
    """Yaw/pitch pair a beam is aimed at, restricted to the front hemisphere."""

    phi: float
    theta: float

    def __post_init__(self) -> None:
        lim = math.pi / 2.0 + 1e-12
        if abs(self.phi) > lim or abs(self.theta) > lim:
            raise ConfigError(f"steering ({self.phi}, {self.theta}) is outside the front hemisphere")

    @classmethod
    def from_uv(cls, p: UvPoint) -> "SteeringDirection":
        e = uv_to_euler(p)
        return cls(e.phi, e.theta)

    def uv(self) -> tuple[float, float]:
        return math.cos(self.theta) * math.sin(self.phi), math.sin(self.theta)


class Awv:
    """Antenna weight vector: one unit-magnitude complex weight per element.

    Indexed ``weights[x, y]``. The backing array is frozen at construction.
    """

    __slots__ = ("weights",)

    def __init__(self, weights) -> None:
        w = np.ascontiguousarray(weights, dtype=complex)
        if w.ndim != 2:
            raise ValueError("weights must be a 2-D grid")
        mag = np.abs(w)
        if not np.allclose(mag, 1.0, atol=1e-9, rtol=0.0):
            worst = float(np.abs(mag - 1.0).max())
            raise ValueError(f"analog weights must have unit magnitude (drift {worst:.2e})")
        w.setflags(write=False)
        self.weights = w

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape

    def phases(self) -> np.ndarray:
        return np.angle(self.weights)


@dataclass(frozen=True, eq=False)
class SubArrayLayout:
    """Partition of the full lattice into equal square groups.

    ``sub_index[x, y]`` is the owning group, ``local_x/local_y`` the coordinates
    inside it, ``origins[k]`` the full-array coordinates of group k's local
    (0, 0) element, and ``stride`` the full-lattice step between neighbouring
    local elements (so the effective pitch is ``stride * config pitch``).
    """

    config: ArrayConfig
    interleave_factor: int
    subdivisions: int
    sub_index: np.ndarray
    local_x: np.ndarray
    local_y: np.ndarray
    origins: np.ndarray
    side_x: int
    side_y: int
    stride: int

    def __post_init__(self) -> None:
        for name in ("sub_index", "local_x", "local_y", "origins"):
            getattr(self, name).setflags(write=False)

    @property
    def n_sub(self) -> int:
        return len(self.origins)

    @property
    def spacing_wl(self) -> float:
        """Effective element pitch inside one group, in wavelengths."""
        return self.stride * self.config.spacing_wavelengths

    def f_i(self, x: int, y: int) -> int:
        """Group owning full-array element (x, y)."""
        return int(self.sub_index[x, y])

    def f_c(self, x: int, y: int) -> tuple[int, int]:
        """Local coordinates of full-array element (x, y) inside its group."""
        return int(self.local_x[x, y]), int(self.local_y[x, y])

    def mask(self, k: int) -> np.ndarray:
        return self.sub_index == k


def full_array_layout(cfg: ArrayConfig) -> SubArrayLayout:
    """The trivial layout: the whole aperture as a single group."""
    return partition_interleaved(cfg, 1)


def partition_interleaved(cfg: ArrayConfig, mi: int) -> SubArrayLayout:
    """Split the aperture into ``mi`` interleaved groups (mi a perfect square).

    Group index runs row-major over the (x mod m, y mod m) offsets, so for mi=4
    the groups 0..3 start at offsets (0,0), (1,0), (0,1), (1,1).
    """
    m = math.isqrt(mi)
    if m * m != mi:
        raise ConfigError(f"interleave factor {mi} is not a perfect square")
    if cfg.nx % m or cfg.ny % m:
        raise ConfigError(f"array {cfg.nx}x{cfg.ny} does not divide into {m}x{m} interleaves")
    x = np.arange(cfg.nx)[:, None] + np.zeros(cfg.ny, dtype=int)[None, :]
    y = np.zeros(cfg.nx, dtype=int)[:, None] + np.arange(cfg.ny)[None, :]
    origins = np.array([[k % m, k // m] for k in range(mi)], dtype=int)
    return SubArrayLayout(
        config=cfg,
        interleave_factor=mi,
        subdivisions=0,
        sub_index=(y % m) * m + (x % m),
        local_x=x // m,
        local_y=y // m,
        origins=origins,
        side_x=cfg.nx // m,
        side_y=cfg.ny // m,
        stride=m,
    )


def partition_localized(layout: SubArrayLayout, factor: int = 4) -> SubArrayLayout:
    """Subdivide every group of ``layout`` into its four quadrant blocks.

    Children of group k are k*4 + (0..3), row-major over (half-x, half-y); the
    lattice stride is untouched so the effective pitch stays the same while the
    side halves.
    """
    if factor != 4:
        raise ConfigError("only quadrant subdivision (factor 4) is supported")
    if layout.side_x % 2 or layout.side_y % 2:
        raise ConfigError(f"groups of {layout.side_x}x{layout.side_y} cannot be halved")
    hx, hy = layout.side_x // 2, layout.side_y // 2
    qx = layout.local_x // hx
    qy = layout.local_y // hy
    origins = np.empty((layout.n_sub * 4, 2), dtype=int)
    for k in range(layout.n_sub):
        for q in range(4):
            origins[k * 4 + q] = layout.origins[k] + layout.stride * np.array(
                [(q % 2) * hx, (q // 2) * hy]
            )
    return SubArrayLayout(
        config=layout.config,
        interleave_factor=layout.interleave_factor,
        subdivisions=layout.subdivisions + 1,
        sub_index=layout.sub_index * 4 + qy * 2 + qx,
        local_x=layout.local_x % hx,
        local_y=layout.local_y % hy,
        origins=origins,
        side_x=hx,
        side_y=hy,
        stride=layout.stride,
    )


def _uv_of(phi: float, theta: float) -> tuple[float, float]:
    return math.sin(phi) * math.cos(theta), math.sin(theta)


def element_phase_delta(x: int, y: int, phi: float, theta: float, spacing_wl: float) -> complex:
    """Plane-wave phase offset of element (x, y) relative to (0, 0).

    ``spacing_wl`` is the pitch of the lattice the coordinates are counted on,
    in carrier wavelengths.
    """
    u, v = _uv_of(phi, theta)
    arg = 2.0 * math.pi * spacing_wl * (x * u + y * v)
    return complex(math.cos(arg), -math.sin(arg))


def steering_weights(shape: tuple[int, int], spacing_wl: float, direction: SteeringDirection) -> Awv:
    """Weights that cancel each element's phase offset toward ``direction``.

    Coordinates are local to the addressed (sub-)array; pass its effective pitch.
    """
    nx, ny = shape
    u, v = _uv_of(direction.phi, direction.theta)
    arg = 2.0 * np.pi * spacing_wl * (
        np.arange(nx)[:, None] * u + np.arange(ny)[None, :] * v
    )
    return Awv(np.cos(arg) + 1j * np.sin(arg))


def array_coefficient(
    awv: Awv, phi: float, theta: float, spacing_wl: float, mask: np.ndarray | None = None
) -> complex:
    """Receive coefficient: sum of weight times plane-wave offset over elements.

    ``mask`` restricts the sum to a subset of elements (full-array coordinates),
    which is how per-group coefficients of a composed weight vector are read off.
    """
    nx, ny = awv.shape
    u, v = _uv_of(phi, theta)
    arg = 2.0 * np.pi * spacing_wl * (
        np.arange(nx)[:, None] * u + np.arange(ny)[None, :] * v
    )
    delta = np.cos(arg) - 1j * np.sin(arg)
    term = awv.weights * delta
    if mask is not None:
        term = term[mask]
    return complex(term.sum())


def directional_gain(
    awv: Awv,
    phi: float,
    theta: float,
    spacing_wl: float,
    mask: np.ndarray | None = None,
    floor_dbi: float = GAIN_FLOOR_DBI,
) -> float:
    """Array gain toward (phi, theta) in dBi, floored at ``floor_dbi``."""
    c = array_coefficient(awv, phi, theta, spacing_wl, mask)
    p = (c.real * c.real + c.imag * c.imag)
    if p <= 0.0:
        return floor_dbi
    return max(10.0 * math.log10(p), floor_dbi)


def beamwidth_uv(n_side: int, spacing_wl: float) -> float:
    """Half-power beamwidth in sine space; independent of steering direction."""
    if n_side < 1 or spacing_wl <= 0.0:
        raise ConfigError("beamwidth needs a positive side and pitch")
    return HALF_POWER_CONSTANT / (n_side * spacing_wl)


def beamwidth_angular(n_side: int, spacing_wl: float, alpha: float) -> float:
    """Half-power beamwidth in radians for a beam steered ``alpha`` off broadside.

    Diverges toward the array plane; rejected within 1e-9 of |alpha| = pi/2.
    """
    c = math.cos(alpha)
    if c < 1e-9:
        raise ConfigError("beam degenerates at the array plane")
    return HALF_POWER_CONSTANT / (n_side * spacing_wl * c)


def origin_phase_correction(layout: SubArrayLayout, k: int, direction: SteeringDirection) -> complex:
    """Unit phasor aligning group k's coefficient phase to zero at its steering.

    A group steered via local coordinates is internally coherent but carries the
    plane-wave phase of its origin element; multiplying the group's weights by
    this factor removes it, which is what lets groups aimed at one direction add
    up exactly like the full aperture steered as one.
    """
    u, v = _uv_of(direction.phi, direction.theta)
    ox, oy = layout.origins[k]
    arg = 2.0 * math.pi * layout.config.spacing_wavelengths * (float(ox) * u + float(oy) * v)
    return complex(math.cos(arg), math.sin(arg))


def compose_full_awv(sub_awvs, shifts, layout: SubArrayLayout) -> Awv:
    """Assemble the full weight vector from per-group weights and unit shifts.

    Element (x, y) receives ``shifts[k] * sub_awvs[k][local coords]`` where k is
    its owning group. Shift magnitudes must be 1: analog weights cannot scale.
    """
    if len(sub_awvs) != layout.n_sub or len(shifts) != layout.n_sub:
        raise ValueError(f"layout has {layout.n_sub} groups; got {len(sub_awvs)} weight sets and {len(shifts)} shifts")
    shifts = np.asarray(shifts, dtype=complex)
    if not np.allclose(np.abs(shifts), 1.0, atol=1e-9, rtol=0.0):
        raise ValueError("group-level shifts must be unit phasors")
    cfg = layout.config
    full = np.empty((cfg.nx, cfg.ny), dtype=complex)
    for k in range(layout.n_sub):
        m = layout.mask(k)
        full[m] = shifts[k] * sub_awvs[k].weights[layout.local_x[m], layout.local_y[m]]
    return Awv(full)


def quantize_phases(awv: Awv, bits: int) -> Awv:
    """Snap every weight to the nearest of 2**bits uniformly spaced phases."""
    if bits < 1:
        raise ConfigError("phase quantization needs at least one bit")
    step = 2.0 * np.pi / (2**bits)
    return Awv(np.exp(1j * step * np.round(np.angle(awv.weights) / step)))


def coefficient_points(awv: Awv, u, v, spacing_wl: float) -> np.ndarray:
    """Receive coefficients at paired directions (u[k], v[k])."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if u.shape != v.shape:
        raise ValueError("u and v must pair up")
    nx, ny = awv.shape
    eu = np.exp(-2j * np.pi * spacing_wl * np.outer(np.arange(nx), u))
    ev = np.exp(-2j * np.pi * spacing_wl * np.outer(np.arange(ny), v))
    return np.einsum("xk,xy,yk->k", eu, awv.weights, ev, optimize=True)


def coefficient_grid(awv: Awv, u: np.ndarray, v: np.ndarray, spacing_wl: float) -> np.ndarray:
    """Receive coefficient on the tensor grid u x v; result indexed [u, v].

    The plane-wave offset separates per axis, so this is two small matrix
    products rather than a sum per cell.
    """
    nx, ny = awv.shape
    eu = np.exp(-2j * np.pi * spacing_wl * np.outer(np.arange(nx), np.asarray(u)))
    ev = np.exp(-2j * np.pi * spacing_wl * np.outer(np.arange(ny), np.asarray(v)))
    return eu.T @ (awv.weights @ ev)


def peak_gain(
    awv: Awv, spacing_wl: float, resolution: int = 512
) -> tuple[float, UvPoint]:
    """Maximum gain over the front hemisphere and where it occurs.

    Coarse scan on a resolution^2 UV grid masked to the unit disc, then a few
    shrinking local grid refinements around the best cell.
    """
    if resolution < 16:
        raise ConfigError("peak search needs a grid of at least 16x16")
    axis = np.linspace(-1.0, 1.0, resolution)
    power = np.abs(coefficient_grid(awv, axis, axis, spacing_wl)) ** 2
    power[axis[:, None] ** 2 + axis[None, :] ** 2 > 1.0] = 0.0
    iu, iv = np.unravel_index(int(np.argmax(power)), power.shape)
    best_u, best_v = float(axis[iu]), float(axis[iv])
    best_p = float(power[iu, iv])
    box = 2.0 / (resolution - 1)
    for _ in range(3):
        gu = np.clip(np.linspace(best_u - box, best_u + box, 17), -1.0, 1.0)
        gv = np.clip(np.linspace(best_v - box, best_v + box, 17), -1.0, 1.0)
        local = np.abs(coefficient_grid(awv, gu, gv, spacing_wl)) ** 2
        local[gu[:, None] ** 2 + gv[None, :] ** 2 > 1.0] = 0.0
        ju, jv = np.unravel_index(int(np.argmax(local)), local.shape)
        if local[ju, jv] > best_p:
            best_p = float(local[ju, jv])
            best_u, best_v = float(gu[ju]), float(gv[jv])
        box /= 8.0
    return 10.0 * math.log10(best_p), UvPoint(best_u, best_v)
