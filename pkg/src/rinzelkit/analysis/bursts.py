"""Spike and burst detection on the dense output of an FHR trajectory."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import optimize

from rinzelkit.solvers.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class BurstSummary:
    spike_times: List[float] = field(default_factory=list)
    burst_sizes: List[int] = field(default_factory=list)
    threshold: float = 0.0
    gap: Optional[float] = None

    @property
    def n_spikes(self) -> int:
        return len(self.spike_times)

    @property
    def n_bursts(self) -> int:
        return len(self.burst_sizes)

    @property
    def mean_spikes_per_burst(self) -> float:
        return float(np.mean(self.burst_sizes)) if self.burst_sizes else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "gap": self.gap,
            "n_spikes": self.n_spikes,
            "n_bursts": self.n_bursts,
            "mean_spikes_per_burst": self.mean_spikes_per_burst,
            "burst_sizes": list(self.burst_sizes),
        }


def spike_times(traj: Trajectory, threshold: float = 0.0, per_step: int = 8) -> List[float]:
    """Upward crossings of u through ``threshold``, refined with Brent on the dense output."""
    times, states = traj.dense_samples(per_step)
    u = states[:, 0] - threshold
    idx = np.nonzero((u[:-1] < 0.0) & (u[1:] >= 0.0))[0]

    def g(t: float) -> float:
        return float(traj(t)[0] - threshold)

    spikes = []
    for i in idx:
        lo, hi = float(times[i]), float(times[i + 1])
        if g(lo) * g(hi) > 0:
            spikes.append(hi)
        else:
            spikes.append(float(optimize.brentq(g, lo, hi)))
    return spikes


def burst_summary(
    traj: Trajectory,
    threshold: float = 0.0,
    gap: Optional[float] = None,
    per_step: int = 8,
) -> BurstSummary:
    """Group spikes into bursts separated by quiet intervals longer than ``gap``.

    Without an explicit ``gap`` the cut is twice the median interspike interval.
    """
    spikes = spike_times(traj, threshold, per_step)
    if not spikes:
        return BurstSummary(threshold=threshold, gap=gap)
    intervals = np.diff(spikes)
    if gap is None and len(intervals):
        gap = 2.0 * float(np.median(intervals))

    sizes = [1]
    for interval in intervals:
        if interval > gap:
            sizes.append(1)
        else:
            sizes[-1] += 1
    logger.debug("Detected %d spikes in %d bursts", len(spikes), len(sizes))
    return BurstSummary(spike_times=spikes, burst_sizes=sizes, threshold=threshold, gap=gap)
