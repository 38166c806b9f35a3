"""Grid codebooks and exhaustive beam-pair sweeps.

Codebook weights are steering vectors scaled to unit norm. The Hermitian
inner products inside the beamformed-power quadratic form supply the
conjugation, so a beam pointed exactly at a path's direction conjugate-matches
that path and attains the full array gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import Direction, PlanarArray, steering_vector
from .channel import ChannelMatrixSet

__all__ = [
    "BeamCodebook",
    "BeamSelection",
    "generate_codebook",
    "sweep_power_table",
    "ideal_beam_sweep",
]


@dataclass(frozen=True)
class BeamCodebook:
    """Beams on a regular azimuth x zenith grid, azimuth-major order."""

    directions: tuple[Direction, ...]
    weights: np.ndarray  # (n_beams, N) complex, rows unit-norm

    def __len__(self) -> int:
        return len(self.directions)


def _grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("grid step must be positive")
    if hi < lo:
        raise ValueError(f"grid upper bound {hi} below lower bound {lo}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def generate_codebook(
    array: PlanarArray,
    az_min_deg: float,
    az_max_deg: float,
    az_step_deg: float,
    zen_min_deg: float = 60.0,
    zen_max_deg: float = 120.0,
    zen_step_deg: float = 10.0,
) -> BeamCodebook:
    """Build a codebook over the az/zen grid; entry count n_az * n_zen."""
    az = _grid_points(az_min_deg, az_max_deg, az_step_deg)
    zen = _grid_points(zen_min_deg, zen_max_deg, zen_step_deg)
    directions: list[Direction] = []
    rows: list[np.ndarray] = []
    scale = 1.0 / math.sqrt(array.n_elements)
    for a in az:
        for z in zen:
            d = Direction.from_degrees(float(a), float(z))
            directions.append(d)
            rows.append(steering_vector(array, d).vector * scale)
    return BeamCodebook(tuple(directions), np.array(rows))


@dataclass(frozen=True)
class BeamSelection:
    """Winning beam pair of a sweep and the received power it achieves."""

    tx_index: int
    rx_index: int
    tx_direction: Direction
    rx_direction: Direction
    power_w: float


def sweep_power_table(
    channel: ChannelMatrixSet,
    tx_codebook: BeamCodebook,
    rx_codebook: BeamCodebook,
    p_tx_w: float,
) -> np.ndarray:
    """Total received power for every (tx beam, rx beam) pair, watts.

    Returns shape (n_tx_beams, n_rx_beams). Matches beamformed_power
    evaluated pairwise, computed with batched matrix products.
    """
    if p_tx_w < 0:
        raise ValueError("p_tx_w must be non-negative")
    h = channel.matrices  # (K, N_rx, N_tx)
    wt = tx_codebook.weights.T  # (N_tx, n_tx)
    wr = rx_codebook.weights.conj()  # (n_rx, N_rx)
    n_rx_b, n_rx = wr.shape
    n_tx, n_tx_b = wt.shape
    # associativity choice: contract the cheaper side first
    right_first = n_rx * n_tx * n_tx_b + n_rx_b * n_rx * n_tx_b
    left_first = n_rx_b * n_rx * n_tx + n_rx_b * n_tx * n_tx_b
    if right_first <= left_first:
        amp = wr @ (h @ wt)  # (K, n_rx_b, n_tx_b)
    else:
        amp = (wr @ h) @ wt
    power = (p_tx_w / channel.grid.n_subbands) * np.abs(amp) ** 2
    return power.sum(axis=0).T  # (n_tx_b, n_rx_b)


def ideal_beam_sweep(
    channel: ChannelMatrixSet,
    tx_codebook: BeamCodebook,
    rx_codebook: BeamCodebook,
    p_tx_w: float,
) -> BeamSelection:
    """Exhaustive sweep over all beam pairs on one snapshot's channel.

    Training is ideal: no airtime is consumed and the channel does not
    change during the sweep. Ties are broken by the total order
    (power desc, tx index asc, rx index asc), so the result does not
    depend on evaluation schedule.
    """
    table = sweep_power_table(channel, tx_codebook, rx_codebook, p_tx_w)
    flat = int(np.argmax(table))  # first occurrence wins: lowest (tx, rx)
    ti, ri = divmod(flat, table.shape[1])
    return BeamSelection(
        tx_index=ti,
        rx_index=ri,
        tx_direction=tx_codebook.directions[ti],
        rx_direction=rx_codebook.directions[ri],
        power_w=float(table[ti, ri]),
    )
