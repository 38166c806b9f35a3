"""Deterministic image-method ray tracer for desk-scale scenes.

Produces multipath traces from first principles so that the rest of the
pipeline can be exercised against geometry with known answers. Mechanisms:
line of sight, specular reflections off planar rectangles up to a configurable
order (image method), and single knife-edge diffraction at marked rectangle
edges, emitted only while the direct path is blocked.

Amplitude model: free-space spreading lambda/(4 pi d) on the unfolded path
length, one real reflection coefficient per bounce, and the standard
knife-edge loss J(nu) for diffraction. Phase is -2 pi L / lambda wrapped to
[-pi, pi). This is an oracle, not a production EM solver: rectangles are
two-sided, materials are frequency-flat, and no polarization is modelled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import SPEED_OF_LIGHT
from .traces import MpcRecord, PathType, TraceSet
from .trajectory import Trajectory

__all__ = [
    "Rectangle",
    "Environment",
    "RtScenario",
    "los_blocked",
    "trace_los",
    "trace_reflections",
    "trace_diffraction",
    "knife_edge_loss_db",
    "fresnel_parameter",
    "generate_trace",
]

_EPS = 1e-9  # segment-parameter slack: endpoints touching a surface do not block


@dataclass(frozen=True)
class Rectangle:
    """Planar parallelogram face: corner plus two edge vectors, meters.

    gamma is the real amplitude reflection coefficient in [0, 1].
    diffracting_edges marks perimeter edges by index: 0 = corner..corner+u,
    1 = corner+u..corner+u+v, 2 = corner+u+v..corner+v, 3 = corner+v..corner.
    """

    corner: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    gamma: float = 0.7
    diffracting_edges: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "corner", np.asarray(self.corner, dtype=float))
        object.__setattr__(self, "edge_u", np.asarray(self.edge_u, dtype=float))
        object.__setattr__(self, "edge_v", np.asarray(self.edge_v, dtype=float))
        n = np.cross(self.edge_u, self.edge_v)
        if np.linalg.norm(n) < 1e-12:
            raise ValueError("edge vectors must not be parallel")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma {self.gamma!r} outside [0, 1]")
        if any(e not in (0, 1, 2, 3) for e in self.diffracting_edges):
            raise ValueError("diffracting edge indices must be in 0..3")

    @property
    def normal(self) -> np.ndarray:
        n = np.cross(self.edge_u, self.edge_v)
        return n / np.linalg.norm(n)

    def edge_points(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        c, u, v = self.corner, self.edge_u, self.edge_v
        loop = (c, c + u, c + u + v, c + v)
        return loop[index], loop[(index + 1) % 4]

    def local_coords(self, point: np.ndarray) -> tuple[float, float]:
        """Solve point = corner + a*u + b*v in the plane's own basis."""
        w = point - self.corner
        uu = float(self.edge_u @ self.edge_u)
        vv = float(self.edge_v @ self.edge_v)
        uv = float(self.edge_u @ self.edge_v)
        det = uu * vv - uv * uv
        uw = float(self.edge_u @ w)
        vw = float(self.edge_v @ w)
        return (vv * uw - uv * vw) / det, (uu * vw - uv * uw) / det

    def contains(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        a, b = self.local_coords(point)
        return -tol <= a <= 1.0 + tol and -tol <= b <= 1.0 + tol


@dataclass(frozen=True)
class Environment:
    """All reflecting/diffracting faces of a scene."""

    rectangles: tuple[Rectangle, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rectangles", tuple(self.rectangles))


def _segment_hit(
    p0: np.ndarray, p1: np.ndarray, rect: Rectangle
) -> tuple[float, np.ndarray] | None:
    """Open-segment vs rectangle crossing; endpoint touches excluded."""
    d = p1 - p0
    n = rect.normal
    denom = float(n @ d)
    if abs(denom) < 1e-15:
        return None  # parallel or in-plane: no crossing
    t = float(n @ (rect.corner - p0)) / denom
    if t <= _EPS or t >= 1.0 - _EPS:
        return None
    point = p0 + t * d
    if rect.contains(point):
        return t, point
    return None


def los_blocked(p_tx: np.ndarray, p_rx: np.ndarray, env: Environment) -> bool:
    """True when any rectangle crosses the open segment tx..rx."""
    p_tx = np.asarray(p_tx, dtype=float)
    p_rx = np.asarray(p_rx, dtype=float)
    return any(_segment_hit(p_tx, p_rx, r) is not None for r in env.rectangles)


def _segment_occluded(
    p0: np.ndarray, p1: np.ndarray, env: Environment
) -> bool:
    return any(_segment_hit(p0, p1, r) is not None for r in env.rectangles)


def _angles_deg(vec: np.ndarray) -> tuple[float, float]:
    """(azimuth, zenith) of a direction vector, degrees; az in [-180, 180)."""
    norm = float(np.linalg.norm(vec))
    az = math.degrees(math.atan2(vec[1], vec[0]))
    if az >= 180.0:
        az = -180.0
    zen = math.degrees(math.acos(max(-1.0, min(1.0, vec[2] / norm))))
    return az, zen


def _wrap_phase(phase: float) -> float:
    """Principal value in [-pi, pi)."""
    out = math.fmod(phase + math.pi, 2.0 * math.pi)
    if out < 0.0:
        out += 2.0 * math.pi
    return out - math.pi


def _path_fields(length: float, f_c_hz: float) -> tuple[float, float, float]:
    """(delay, free-space amplitude gain, carrier phase) for a path length."""
    lam = SPEED_OF_LIGHT / f_c_hz
    return length / SPEED_OF_LIGHT, lam / (4.0 * math.pi * length), _wrap_phase(
        -2.0 * math.pi * length / lam
    )


@dataclass(frozen=True)
class _RawPath:
    """Geometry-only path description before record numbering."""

    path_type: PathType
    length: float
    amp_scale: float  # reflection/diffraction amplitude factor on top of free space
    first_leg: np.ndarray  # direction of departure (not normalized)
    last_leg_back: np.ndarray  # from receiver toward last interaction


def trace_los(
    p_tx: np.ndarray, p_rx: np.ndarray, f_c_hz: float, env: Environment = Environment()
) -> _RawPath | None:
    """Direct path, or None when blocked."""
    p_tx = np.asarray(p_tx, dtype=float)
    p_rx = np.asarray(p_rx, dtype=float)
    if los_blocked(p_tx, p_rx, env):
        return None
    d = p_rx - p_tx
    return _RawPath(PathType.LOS, float(np.linalg.norm(d)), 1.0, d, -d)


def _mirror(point: np.ndarray, rect: Rectangle) -> np.ndarray:
    n = rect.normal
    return point - 2.0 * float(n @ (point - rect.corner)) * n


def trace_reflections(
    p_tx: np.ndarray,
    p_rx: np.ndarray,
    env: Environment,
    f_c_hz: float,
    max_order: int = 4,
) -> list[_RawPath]:
    """Specular paths via the image method, orders 1..max_order.

    A candidate rectangle sequence is valid when every reflection point lands
    inside its rectangle and every leg of the unfolded path clears all faces
    (touching a face at a leg endpoint does not occlude).
    """
    p_tx = np.asarray(p_tx, dtype=float)
    p_rx = np.asarray(p_rx, dtype=float)
    rects = env.rectangles
    paths: list[_RawPath] = []
    for order in range(1, max_order + 1):
        for seq in itertools.product(range(len(rects)), repeat=order):
            if any(a == b for a, b in zip(seq, seq[1:])):
                continue  # same plane twice in a row cannot produce a bounce
            images = []
            img = p_tx
            for idx in seq:
                img = _mirror(img, rects[idx])
                images.append(img)
            # walk backward from the receiver through the image chain
            points: list[np.ndarray] = []
            q = p_rx
            valid = True
            for idx, img in zip(reversed(seq), reversed(images)):
                hit = _segment_hit(q, img, rects[idx])
                if hit is None:
                    valid = False
                    break
                q = hit[1]
                points.append(q)
            if not valid:
                continue
            points.reverse()
            legs = [p_tx, *points, p_rx]
            if any(
                _segment_occluded(a, b, env) for a, b in zip(legs, legs[1:])
            ):
                continue
            length = float(sum(np.linalg.norm(b - a) for a, b in zip(legs, legs[1:])))
            gamma = math.prod(rects[i].gamma for i in seq)
            paths.append(
                _RawPath(
                    PathType.REFLECTION,
                    length,
                    gamma,
                    legs[1] - legs[0],
                    legs[-2] - legs[-1],
                )
            )
    return paths


def fresnel_parameter(
    h_m: float, d1_m: float, d2_m: float, wavelength_m: float
) -> float:
    """Knife-edge Fresnel parameter nu = h * sqrt(2 (d1+d2) / (lambda d1 d2))."""
    return h_m * math.sqrt(2.0 * (d1_m + d2_m) / (wavelength_m * d1_m * d2_m))


def knife_edge_loss_db(nu: float) -> float:
    """Single knife-edge loss in dB; zero below nu = -0.78."""
    if nu <= -0.78:
        return 0.0
    return 6.9 + 20.0 * math.log10(math.sqrt((nu - 0.1) ** 2 + 1.0) + nu - 0.1)


def _min_path_point_on_edge(
    p_tx: np.ndarray, p_rx: np.ndarray, e0: np.ndarray, e1: np.ndarray
) -> np.ndarray:
    """Point on segment e0..e1 minimizing |tx-P| + |P-rx| (ternary search).

    The objective is convex in the edge parameter; iteration stops once the
    bracketing interval is below 1e-9 m along the edge.
    """
    edge = e1 - e0
    edge_len = float(np.linalg.norm(edge))

    def path_len(s: float) -> float:
        p = e0 + s * edge
        return float(np.linalg.norm(p - p_tx) + np.linalg.norm(p_rx - p))

    lo, hi = 0.0, 1.0
    while (hi - lo) * edge_len > 1e-9:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if path_len(m1) < path_len(m2):
            hi = m2
        else:
            lo = m1
    return e0 + 0.5 * (lo + hi) * edge


def trace_diffraction(
    p_tx: np.ndarray, p_rx: np.ndarray, env: Environment, f_c_hz: float
) -> list[_RawPath]:
    """Single knife-edge paths over marked edges; only for blocked links."""
    p_tx = np.asarray(p_tx, dtype=float)
    p_rx = np.asarray(p_rx, dtype=float)
    if not los_blocked(p_tx, p_rx, env):
        return []
    lam = SPEED_OF_LIGHT / f_c_hz
    los_dir = p_rx - p_tx
    los_dir = los_dir / np.linalg.norm(los_dir)
    paths: list[_RawPath] = []
    for rect in env.rectangles:
        owner_blocks = _segment_hit(p_tx, p_rx, rect) is not None
        for edge_idx in rect.diffracting_edges:
            e0, e1 = rect.edge_points(edge_idx)
            point = _min_path_point_on_edge(p_tx, p_rx, e0, e1)
            d1 = float(np.linalg.norm(point - p_tx))
            d2 = float(np.linalg.norm(p_rx - point))
            # clearance of the edge over the direct line; positive when the
            # owning face shadows the link, negative when it merely grazes
            h = float(np.linalg.norm(np.cross(point - p_tx, los_dir)))
            if not owner_blocks:
                h = -h
            nu = fresnel_parameter(h, d1, d2, lam)
            loss = 10.0 ** (-knife_edge_loss_db(nu) / 20.0)
            paths.append(
                _RawPath(
                    PathType.DIFFRACTION,
                    d1 + d2,
                    loss,
                    point - p_tx,
                    point - p_rx,
                )
            )
    return paths


@dataclass(frozen=True)
class RtScenario:
    """A scene, its moving nodes, and the links to trace."""

    environment: Environment
    carrier_hz: float
    trajectories: dict[int, Trajectory]
    links: tuple[tuple[int, int], ...] = field(default_factory=tuple)
    max_reflection_order: int = 4

    def __post_init__(self) -> None:
        if not self.trajectories:
            raise ValueError("at least one trajectory is required")
        times = None
        for node, traj in self.trajectories.items():
            if times is None:
                times = traj.times
            elif traj.times.shape != times.shape or np.any(
                np.abs(traj.times - times) > 1e-9
            ):
                raise ValueError(f"trajectory of node {node} is on a different time grid")
        for tx, rx in self.links:
            for node in (tx, rx):
                if node not in self.trajectories:
                    raise ValueError(f"link references node {node} with no trajectory")

    @property
    def times(self) -> np.ndarray:
        return next(iter(self.trajectories.values())).times


def _record_from_path(
    raw: _RawPath, t: float, tx_id: int, rx_id: int, path_id: int, f_c_hz: float
) -> MpcRecord:
    delay, friis, phase = _path_fields(raw.length, f_c_hz)
    aod_az, aod_zen = _angles_deg(raw.first_leg)
    aoa_az, aoa_zen = _angles_deg(raw.last_leg_back)
    return MpcRecord(
        t=t,
        tx_id=tx_id,
        rx_id=rx_id,
        path_id=path_id,
        path_type=raw.path_type,
        delay=delay,
        gain_mag=friis * raw.amp_scale,
        phase=phase,
        aod_az=aod_az,
        aod_zen=aod_zen,
        aoa_az=aoa_az,
        aoa_zen=aoa_zen,
    )


def trace_link_snapshot(
    p_tx: np.ndarray,
    p_rx: np.ndarray,
    env: Environment,
    f_c_hz: float,
    max_order: int = 4,
) -> list[_RawPath]:
    """All mechanisms for one geometry: LOS, reflections, then diffraction."""
    paths: list[_RawPath] = []
    los = trace_los(p_tx, p_rx, f_c_hz, env)
    if los is not None:
        paths.append(los)
    paths.extend(trace_reflections(p_tx, p_rx, env, f_c_hz, max_order))
    if los is None:
        paths.extend(trace_diffraction(p_tx, p_rx, env, f_c_hz))
    return paths


def generate_trace(scenario: RtScenario) -> TraceSet:
    """Trace every link of the scenario over its snapshot grid.

    Output passes validation by construction: snapshot times are strictly
    increasing, path_ids are fresh per snapshot, and at most one LOS record
    exists per snapshot.
    """
    records: list[MpcRecord] = []
    times = scenario.times
    for k in range(times.size):
        t = float(times[k])
        for tx_id, rx_id in scenario.links:
            p_tx = scenario.trajectories[tx_id].positions[k]
            p_rx = scenario.trajectories[rx_id].positions[k]
            raw_paths = trace_link_snapshot(
                p_tx, p_rx, scenario.environment, scenario.carrier_hz,
                scenario.max_reflection_order,
            )
            for pid, raw in enumerate(raw_paths):
                records.append(
                    _record_from_path(raw, t, tx_id, rx_id, pid, scenario.carrier_hz)
                )
    return TraceSet(tuple(records))
