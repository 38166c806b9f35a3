"""Frequency-domain MIMO channel assembly from multipath records.

For each subband k with offset df_k from the carrier, the channel entry for
rx element u and tx element s is

    H_k[u, s] = sum_p g_p * exp(j phi_p) * exp(-j 2 pi df_k tau_p)
                * exp(j 2 pi nu_p (t_eval - t)) * a_rx[u](aoa_p) * conj(a_tx[s](aod_p))

where g_p, phi_p, tau_p come from the trace record, nu_p is the Doppler shift
recomputed from node velocities, and a_rx / a_tx are steering vectors at the
recorded arrival / departure angles. phase_rad in the trace is the total path
phase at the carrier, so only the subband offset term is applied here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrays import Direction, PlanarArray, direction_unit_vector, steering_vector
from .traces import MpcRecord

__all__ = [
    "SubbandGrid",
    "NodeState",
    "ChannelMatrixSet",
    "doppler_shift",
    "build_channel_matrices",
    "beamformed_power",
]

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class SubbandGrid:
    """Carrier frequency plus K evenly spaced subband centers over bandwidth."""

    carrier_hz: float
    bandwidth_hz: float
    n_subbands: int = 64

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("carrier_hz and bandwidth_hz must be positive")
        if self.n_subbands < 1:
            raise ValueError("n_subbands must be >= 1")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def offsets_hz(self) -> np.ndarray:
        """Subband center offsets from the carrier: (k + 0.5) B/K - B/2."""
        k = np.arange(self.n_subbands)
        return (k + 0.5) * self.bandwidth_hz / self.n_subbands - self.bandwidth_hz / 2


@dataclass(frozen=True)
class NodeState:
    """Position and velocity of one node at one instant, meters and m/s."""

    position: np.ndarray
    velocity: np.ndarray

    @classmethod
    def static(cls, position=(0.0, 0.0, 0.0)) -> "NodeState":
        return cls(np.asarray(position, dtype=float), np.zeros(3))


@dataclass(frozen=True)
class ChannelMatrixSet:
    """Per-subband channel matrices (K, n_rx_elements, n_tx_elements)."""

    matrices: np.ndarray
    grid: SubbandGrid
    time: float


def doppler_shift(
    record: MpcRecord, tx: NodeState, rx: NodeState, wavelength_m: float
) -> float:
    """Doppler shift of one path from node velocities, Hz.

    nu = (v_tx . d_hat - v_rx . a_hat) / wavelength, with d_hat the departure
    direction (from aod angles) and a_hat the propagation direction into the
    receiver, i.e. minus the stored arrival direction.
    """
    d_hat = direction_unit_vector(Direction.from_degrees(record.aod_az, record.aod_zen))
    a_hat = -direction_unit_vector(Direction.from_degrees(record.aoa_az, record.aoa_zen))
    return float(np.dot(tx.velocity, d_hat) - np.dot(rx.velocity, a_hat)) / wavelength_m


def build_channel_matrices(
    records: Sequence[MpcRecord],
    tx_array: PlanarArray,
    rx_array: PlanarArray,
    tx: NodeState,
    rx: NodeState,
    grid: SubbandGrid,
    t_eval: float | None = None,
) -> ChannelMatrixSet:
    """Assemble per-subband channel matrices for one snapshot group.

    records must all share one (t, tx_id, rx_id); an empty group yields
    all-zero matrices. t_eval defaults to the snapshot time; values before
    the snapshot are rejected. The Doppler phase ramp advances linearly
    from the snapshot time to t_eval.
    """
    shape = (grid.n_subbands, rx_array.n_elements, tx_array.n_elements)
    if not records:
        return ChannelMatrixSet(np.zeros(shape, dtype=complex), grid, t_eval or 0.0)

    t = records[0].t
    if any((r.t, r.tx_id, r.rx_id) != (t, records[0].tx_id, records[0].rx_id) for r in records):
        raise ValueError("records must belong to a single (t, tx_id, rx_id) snapshot")
    if t_eval is None:
        t_eval = t
    if t_eval < t - 1e-12:
        raise ValueError(f"t_eval={t_eval!r} precedes snapshot time {t!r}")

    gains = np.array([r.gain_mag for r in records])
    phases = np.array([r.phase for r in records])
    delays = np.array([r.delay for r in records])
    for name, arr in (("gain_mag", gains), ("phase_rad", phases), ("delay_s", delays)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite {name} in snapshot records")

    lam = grid.wavelength_m
    nu = np.array([doppler_shift(r, tx, rx, lam) for r in records])

    a_tx = np.column_stack(
        [
            steering_vector(tx_array, Direction.from_degrees(r.aod_az, r.aod_zen)).vector
            for r in records
        ]
    )  # (N_tx, P)
    a_rx = np.column_stack(
        [
            steering_vector(rx_array, Direction.from_degrees(r.aoa_az, r.aoa_zen)).vector
            for r in records
        ]
    )  # (N_rx, P)

    offsets = grid.offsets_hz()
    # (K, P) per-path complex coefficient on each subband
    coef = (
        gains
        * np.exp(1j * phases)
        * np.exp(1j * 2.0 * math.pi * nu * (t_eval - t))
        * np.exp(-1j * 2.0 * math.pi * np.outer(offsets, delays))
    )
    h = np.einsum("kp,up,sp->kus", coef, a_rx, a_tx.conj(), optimize=True)
    return ChannelMatrixSet(h, grid, t)


def beamformed_power(
    channel: ChannelMatrixSet,
    w_tx: np.ndarray,
    w_rx: np.ndarray,
    p_tx_w: float,
) -> tuple[np.ndarray, float]:
    """Received power through one beam pair: per subband and total, watts.

    P_k = (p_tx / K) * |w_rx^H H_k w_tx|^2. Both weight vectors must have
    unit norm (tolerance 1e-9); transmit power splits evenly over subbands.
    """
    w_tx = np.asarray(w_tx)
    w_rx = np.asarray(w_rx)
    for name, w, n in (("w_tx", w_tx, channel.matrices.shape[2]),
                       ("w_rx", w_rx, channel.matrices.shape[1])):
        if w.shape != (n,):
            raise ValueError(f"{name} must have shape ({n},), got {w.shape}")
        norm = np.linalg.norm(w)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"{name} must have unit norm, got {norm!r}")
    if p_tx_w < 0:
        raise ValueError("p_tx_w must be non-negative")

    amp = w_rx.conj() @ channel.matrices @ w_tx  # (K,)
    per_subband = (p_tx_w / channel.grid.n_subbands) * np.abs(amp) ** 2
    return per_subband, float(per_subband.sum())
