"""Krauss car-following dynamics on a wrap-around road section.

Each lane is simulated in a lane-local coordinate that always increases in
the driving direction; positions are kept unwrapped (monotone) so that the
leader of the last vehicle is the first vehicle one road-period ahead.
World coordinates are recovered by folding into [-R, R) and applying the
lane's direction sign.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["KraussParams", "LaneTraffic", "krauss_step", "wrap_position"]


@dataclass(frozen=True)
class KraussParams:
    """Per-lane car-following parameters; reaction time equals the step."""

    max_speed: float
    max_accel: float = 5.3
    max_decel: float = 5.3
    dawdle_sigma: float = 0.5
    vehicle_length: float = 11.2
    dt: float = 0.1

    def __post_init__(self):
        if self.max_speed < 0 or self.max_accel <= 0 or self.max_decel <= 0:
            raise ValueError("speeds must be non-negative and accelerations positive")
        if not (0 <= self.dawdle_sigma <= 1):
            raise ValueError("dawdle factor must lie in [0, 1]")
        if self.dt <= 0 or self.vehicle_length <= 0:
            raise ValueError("time step and vehicle length must be positive")


def krauss_step(x, v, params, road_length, rng):
    """Advance one lane by one step; arrays are modified in place.

    ``x`` must be ascending (lane-local, unwrapped). The safe speed bounds
    each follower by what lets it stop behind its leader under maximum
    braking with one step of reaction lag; free-flow acceleration and the
    uniform stochastic slowdown follow the standard Krauss update.
    """
    n = x.size
    if n == 0:
        return x, v
    dt = params.dt
    if n == 1:
        v_des = min(v[0] + params.max_accel * dt, params.max_speed)
    else:
        lead_x = np.roll(x, -1)
        lead_v = np.roll(v, -1)
        lead_x[-1] = x[0] + road_length
        gap = np.maximum(lead_x - x - params.vehicle_length, 0.0)
        b_tau = params.max_decel * dt
        v_safe = -b_tau + np.sqrt(b_tau * b_tau + lead_v * lead_v
                                  + 2.0 * params.max_decel * gap)
        v_des = np.minimum(np.minimum(v + params.max_accel * dt, params.max_speed),
                           v_safe)
    dawdle = rng.uniform(0.0, 1.0, n) * params.dawdle_sigma * params.max_accel * dt
    v_new = np.maximum(v_des - dawdle, 0.0)
    x += v_new * dt
    v[:] = v_new
    return x, v


def wrap_position(pos, half_length):
    """Fold unwrapped coordinates into [-half_length, half_length)."""
    period = 2.0 * half_length
    return (pos + half_length) % period - half_length


@dataclass
class LaneTraffic:
    """State of one lane: axis offset, direction, and its vehicle arrays."""

    y: float
    direction: int  # +1 drives towards +x, -1 towards -x
    params: KraussParams
    x: np.ndarray = field(default_factory=lambda: np.empty(0))
    v: np.ndarray = field(default_factory=lambda: np.empty(0))
    blocking: bool = True

    @classmethod
    def poisson_lane(cls, y, direction, density, half_length, params, rng,
                     blocking=True):
        """Populate with floor(2*R*density) vehicles uniformly at random."""
        count = int(2.0 * half_length * density)
        world = rng.uniform(-half_length, half_length, count)
        local = np.sort(direction * world)
        return cls(
            y=y,
            direction=direction,
            params=params,
            x=local,
            v=np.full(count, params.max_speed),
            blocking=blocking,
        )

    def step(self, half_length, rng):
        krauss_step(self.x, self.v, self.params, 2.0 * half_length, rng)

    def world_positions(self, half_length):
        """Vehicle centre abscissas folded back into [-R, R)."""
        return wrap_position(self.direction * self.x, half_length)

    def insert(self, world_x, speed, half_length):
        """Add one vehicle (used to pin the standard user); returns its index."""
        local = self.direction * world_x
        idx = int(np.searchsorted(self.x, local))
        self.x = np.insert(self.x, idx, local)
        self.v = np.insert(self.v, idx, speed)
        return idx


def stationary_traffic(y, positions, params, blocking=True):
    """Lane with fixed vehicles (diagnostic helper); direction +1, speed 0."""
    order = np.argsort(positions)
    return LaneTraffic(
        y=y,
        direction=1,
        params=params,
        x=np.asarray(positions, dtype=float)[order],
        v=np.zeros(len(positions)),
        blocking=blocking,
    )
