"""Field bundle at one time level and the recorded run history."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .constitutive import Params
from .grid import Grid


@dataclass
class State:
    t: float
    u: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    theta: np.ndarray
    p: np.ndarray

    def copy(self):
        return replace(self, u=self.u.copy(), phi=self.phi.copy(), mu=self.mu.copy(),
                       theta=self.theta.copy(), p=self.p.copy())


@dataclass
class Trajectory:
    """Snapshots (every ``snap_every`` steps) plus one diagnostics row per step."""

    grid: Grid
    params: Params
    snapshots: list = field(default_factory=list)
    records: list = field(default_factory=list)
    fingerprint: str = ""
    bounds: Optional[object] = None
    nominal_dt: float = 0.0

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]
