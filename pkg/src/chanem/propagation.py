"""Deterministic multipath snapshots: free-space LoS plus image-method
specular reflections off planar facets.

Scenes are desk-scale: an optional infinite ground plane and axis-aligned
vertical rectangles (walls).  Reflection paths are constructed exactly by
mirroring the transmitter across facet planes, walking the chain back from
the receiver, and validating bounds and occlusion per segment.  Each path
carries the Friis free-space amplitude over its total unfolded length times
the product of Fresnel reflection coefficients.
"""

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import InvalidInputError, SceneGeometryError
from .materials import (BUILTIN_MATERIALS, complex_permittivity,
                        evaluate_material, get_material)

GEOM_TOL = 1e-6  # m

TE = "TE"
TM = "TM"

MAX_REFLECTION_DEPTH = 5


def reflection_coefficient(props, incidence_angle, polarization):
    """Fresnel reflection coefficient for a half-space of the given material.

    ``incidence_angle`` is measured from the surface normal, 0 <= angle < pi/2.
    Both polarizations use the sign convention that makes them agree at
    normal incidence: Gamma(0) = (1 - sqrt(eta)) / (1 + sqrt(eta)).
    """
    if not 0.0 <= incidence_angle < math.pi / 2:
        raise InvalidInputError(
            f"incidence angle must be in [0, pi/2), got {incidence_angle}"
        )
    eta = complex_permittivity(props)
    cos_t = math.cos(incidence_angle)
    sin2 = math.sin(incidence_angle) ** 2
    root = cmath.sqrt(eta - sin2)
    if polarization == TE:
        return (cos_t - root) / (cos_t + root)
    if polarization == TM:
        return (root - eta * cos_t) / (root + eta * cos_t)
    raise InvalidInputError(f"polarization must be 'TE' or 'TM', got {polarization!r}")


@dataclass(frozen=True)
class GroundPlane:
    """Infinite horizontal plane z = height."""

    height: float
    material: str = "concrete"

    axis = 2
    polarization = TM  # vertical field bouncing off the ground

    @property
    def value(self):
        return self.height

    def mirror(self, p):
        return np.array([p[0], p[1], 2.0 * self.height - p[2]])

    def contains(self, p, tol=GEOM_TOL):
        return abs(p[2] - self.height) <= tol

    def in_bounds(self, p, tol=GEOM_TOL):
        return True


@dataclass(frozen=True)
class VerticalRectangle:
    """Axis-aligned vertical rectangle: the plane axis is x (0) or y (1)."""

    axis: int          # 0 -> plane x = value, 1 -> plane y = value
    value: float
    u_min: float       # span along the other horizontal axis
    u_max: float
    z_min: float
    z_max: float
    material: str = "concrete"

    polarization = TE  # horizontal field bouncing off a wall

    def __post_init__(self):
        if self.axis not in (0, 1):
            raise SceneGeometryError(f"wall axis must be 0 or 1, got {self.axis}")
        if self.u_max - self.u_min <= GEOM_TOL or self.z_max - self.z_min <= GEOM_TOL:
            raise SceneGeometryError("wall must have positive extent")

    @property
    def u_axis(self):
        return 1 - self.axis

    @classmethod
    def from_endpoints(cls, x1, y1, x2, y2, z_min, z_max, material):
        """Build from two ground-track endpoints; one coordinate must repeat."""
        if abs(x1 - x2) <= GEOM_TOL and abs(y1 - y2) > GEOM_TOL:
            return cls(0, x1, min(y1, y2), max(y1, y2), z_min, z_max, material)
        if abs(y1 - y2) <= GEOM_TOL and abs(x1 - x2) > GEOM_TOL:
            return cls(1, y1, min(x1, x2), max(x1, x2), z_min, z_max, material)
        raise SceneGeometryError(
            f"wall ({x1},{y1})-({x2},{y2}) is not axis-aligned"
        )

    @property
    def corners(self):
        pts = []
        for z in (self.z_min, self.z_max):
            for u in (self.u_min, self.u_max):
                p = [0.0, 0.0, z]
                p[self.axis] = self.value
                p[self.u_axis] = u
                pts.append(tuple(p))
        return pts

    def mirror(self, p):
        q = np.array(p, dtype=float)
        q[self.axis] = 2.0 * self.value - q[self.axis]
        return q

    def contains(self, p, tol=GEOM_TOL):
        return abs(p[self.axis] - self.value) <= tol and self.in_bounds(p, tol)

    def in_bounds(self, p, tol=GEOM_TOL):
        return (self.u_min - tol <= p[self.u_axis] <= self.u_max + tol
                and self.z_min - tol <= p[2] <= self.z_max + tol)


@dataclass
class Scene:
    """Static propagation scene: facets plus a fixed transmitter."""

    facets: list
    tx_position: np.ndarray
    carrier_freq: float
    max_depth: int = 3
    antenna_gain: float = 1.0
    materials: dict = field(default_factory=lambda: dict(BUILTIN_MATERIALS))

    def __post_init__(self):
        self.tx_position = np.asarray(self.tx_position, dtype=float)
        if self.carrier_freq <= 0.0:
            raise InvalidInputError("carrier frequency must be positive")
        if not 0 <= self.max_depth <= MAX_REFLECTION_DEPTH:
            raise InvalidInputError(
                f"max_depth must be in 0..{MAX_REFLECTION_DEPTH}, got {self.max_depth}"
            )
        grounds = [f for f in self.facets if isinstance(f, GroundPlane)]
        if len(grounds) > 1:
            raise SceneGeometryError("at most one ground plane per scene")
        for f in self.facets:
            get_material(f.material, self.materials)  # name must resolve
            if f.contains(self.tx_position, GEOM_TOL):
                raise SceneGeometryError(
                    f"tx position {tuple(self.tx_position)} lies on a facet"
                )

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_freq

    def facet_properties(self):
        """Per-facet EM properties at the carrier frequency."""
        return [
            evaluate_material(get_material(f.material, self.materials),
                              self.carrier_freq)
            for f in self.facets
        ]


@dataclass
class MobilityTrace:
    """Receiver positions sampled at a uniform interval."""

    interval: float
    positions: np.ndarray  # (N, 3)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        if self.interval <= 0.0:
            raise InvalidInputError("trace interval must be positive")
        if len(self.positions) == 0:
            raise InvalidInputError("trace must contain at least one position")
        if np.any(self.positions[:, 2] <= 0.0):
            raise InvalidInputError("all trace heights must be positive")


@dataclass
class DelayProfile:
    """One snapshot's multipath set: complex voltage gains and delays."""

    amps: np.ndarray
    delays: np.ndarray
    snapshot_time: float = 0.0

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        self.delays = np.asarray(self.delays, dtype=np.float64)
        if self.amps.shape != self.delays.shape:
            raise InvalidInputError("amps and delays must have equal length")
        if self.delays.size and (np.any(self.delays < 0.0)
                                 or not np.all(np.isfinite(self.delays))):
            raise InvalidInputError("delays must be finite and >= 0")

    @property
    def n_paths(self):
        return len(self.amps)

    @property
    def paths(self):
        return list(zip(self.amps.tolist(), self.delays.tolist()))


def _plane_param(p0, d, axis, value):
    """Segment parameter t where p0 + t*d crosses the coordinate plane."""
    denom = d[axis]
    if abs(denom) < 1e-15:
        return None
    return (value - p0[axis]) / denom


def _segment_blocked(facets, p0, p1):
    """True if any facet crosses the open interior of segment p0 -> p1.

    Crossings within GEOM_TOL of an endpoint do not block, which exempts the
    reflection points sitting on their own facets.
    """
    d = p1 - p0
    length = float(np.linalg.norm(d))
    if length < GEOM_TOL:
        return False
    eps = GEOM_TOL / length
    for facet in facets:
        t = _plane_param(p0, d, facet.axis, facet.value)
        if t is None or t <= eps or t >= 1.0 - eps:
            continue
        if facet.in_bounds(p0 + t * d):
            return True
    return False


def _reflection_sequences(n_facets, max_depth):
    for depth in range(1, max_depth + 1):
        for seq in itertools.product(range(n_facets), repeat=depth):
            if all(seq[i] != seq[i + 1] for i in range(depth - 1)):
                yield seq


def _walk_reflection_points(scene, seq, rx):
    """Reflection points for a facet sequence, or None if geometrically invalid."""
    images = []
    img = scene.tx_position
    for fi in seq:
        img = scene.facets[fi].mirror(img)
        images.append(img)
    points = []
    q = rx
    for fi, img in zip(reversed(seq), reversed(images)):
        facet = scene.facets[fi]
        d = img - q
        t = _plane_param(q, d, facet.axis, facet.value)
        if t is None or not GEOM_TOL < t < 1.0 - GEOM_TOL:
            return None
        p = q + t * d
        if not facet.in_bounds(p):
            return None
        points.append(p)
        q = p
    points.reverse()  # now ordered tx-side first
    return points


def trace_snapshot(scene, rx_position, snapshot_time=0.0):
    """Compute the multipath delay profile for one receiver position.

    Returns one path per unobstructed specular route with at most
    ``scene.max_depth`` reflections, plus the LoS path when clear.  The
    profile may be empty under total blockage.
    """
    rx = np.asarray(rx_position, dtype=float)
    if rx[2] <= 0.0:
        raise InvalidInputError(f"rx height must be positive, got {rx[2]}")
    tx = scene.tx_position
    if np.linalg.norm(rx - tx) < GEOM_TOL:
        raise InvalidInputError("rx position coincides with tx")
    for facet in scene.facets:
        if facet.contains(rx, GEOM_TOL):
            raise SceneGeometryError(f"rx position {tuple(rx)} lies on a facet")

    props = scene.facet_properties()
    lam = scene.wavelength
    found = []  # (delay, amplitude)

    if not _segment_blocked(scene.facets, tx, rx):
        length = float(np.linalg.norm(rx - tx))
        tau = length / SPEED_OF_LIGHT
        amp = (lam / (4.0 * math.pi * length)
               * cmath.exp(-2j * math.pi * scene.carrier_freq * tau))
        found.append((tau, amp))

    for seq in _reflection_sequences(len(scene.facets), scene.max_depth):
        points = _walk_reflection_points(scene, seq, rx)
        if points is None:
            continue
        chain = [tx] + points + [rx]
        segments = list(zip(chain[:-1], chain[1:]))
        if any(np.linalg.norm(b - a) < GEOM_TOL for a, b in segments):
            continue  # degenerate corner hit
        if any(_segment_blocked(scene.facets, a, b) for a, b in segments):
            continue
        length = float(sum(np.linalg.norm(b - a) for a, b in segments))
        gamma = complex(1.0)
        for (a, b), fi in zip(segments, seq):
            facet = scene.facets[fi]
            d = (b - a) / np.linalg.norm(b - a)
            cos_t = min(abs(float(d[facet.axis])), 1.0)
            angle = math.acos(cos_t)
            gamma *= reflection_coefficient(props[fi], angle, facet.polarization)
        tau = length / SPEED_OF_LIGHT
        amp = (lam / (4.0 * math.pi * length) * gamma
               * cmath.exp(-2j * math.pi * scene.carrier_freq * tau))
        found.append((tau, amp))

    found.sort(key=lambda pa: (pa[0], -abs(pa[1])))
    amps = np.array([a for _, a in found], dtype=np.complex128)
    delays = np.array([t for t, _ in found], dtype=np.float64)
    return DelayProfile(amps=amps, delays=delays, snapshot_time=snapshot_time)


def trace_timeline(scene, trace):
    """One delay profile per trace position, snapshot_time = index * interval."""
    profiles = []
    for i, pos in enumerate(trace.positions):
        try:
            profiles.append(trace_snapshot(scene, pos, snapshot_time=i * trace.interval))
        except (InvalidInputError, SceneGeometryError) as exc:
            raise type(exc)(f"snapshot {i}: {exc}") from exc
    return profiles
