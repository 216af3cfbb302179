"""Event-level Monte Carlo simulator for the highway downlink.

Replicates the modelled system without the analytical approximations: BSs
are dropped uniformly on a finite wrap-around road section, blockages are
rectangles moved by Krauss car-following traffic, LOS is decided by exact
segment-rectangle occlusion, antennas follow the sectored pattern with the
interferers' steering drawn afresh at every snapshot, and fading is sampled
per snapshot (unit-mean gamma for the serving link, exponential for the
interferers). Estimates carry the normal-approximation binomial confidence
interval.

Trials are independent: trial ``i`` uses the RNG substream seeded by
``(seed, i)``, so results are bit-identical under any execution order or
degree of parallelism.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .mobility import KraussParams, LaneTraffic, wrap_position

__all__ = [
    "BlockageStats",
    "Estimate",
    "SimConfig",
    "Snapshot",
    "blockage_event_stats",
    "estimate_association",
    "estimate_outage",
    "estimate_outage_grid",
    "estimate_rate_coverage",
    "is_los",
    "required_half_length",
    "sample_ppp_1d",
    "snapshot_sinr",
]

# z for the 98% two-sided normal-approximation confidence interval.
Z_98 = 2.3263478740408408


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo scale, mobility and sampling parameters."""

    half_length_r: float = 10_000.0
    epsilon: float = 1e-7  # target accuracy; drives the radius rule
    n_trials: int = 50
    seed: int = 1
    snapshot_dt: float = 0.5
    snapshots_per_trial: int = 200
    warmup_s: float = 60.0
    lambda_u: float = 2e-2
    user_max_speed: float = 112.0 / 3.6
    blockage_max_speed: float = 96.0 / 3.6
    max_accel: float = 5.3
    max_decel: float = 5.3
    dawdle_sigma: float = 0.5
    mobility_dt: float = 0.1
    user_vehicle_length: float = 4.8
    temperature_k: float = 290.0
    z_quantile: float = Z_98

    def __post_init__(self):
        if self.half_length_r <= 0:
            raise ValueError("road half-length must be positive")
        if self.n_trials < 1 or self.snapshots_per_trial < 1:
            raise ValueError("need at least one trial and one snapshot per trial")
        if self.snapshot_dt <= 0 or self.mobility_dt <= 0:
            raise ValueError("time steps must be positive")
        if not (0 < self.epsilon < 1):
            raise ValueError("target accuracy must lie in (0, 1)")

    @property
    def samples(self):
        return self.n_trials * self.snapshots_per_trial


def required_half_length(epsilon, alpha_los):
    """Smallest radius honouring the accuracy rule R >= eps^(-1/(a_L - 1))."""
    return epsilon ** (-1.0 / (alpha_los - 1.0))


def check_radius(sim, radio):
    need = required_half_length(sim.epsilon, radio.alpha_los)
    if sim.half_length_r < need:
        warnings.warn(
            f"half-length {sim.half_length_r:.3g} m is below the "
            f"{need:.3g} m required for target accuracy {sim.epsilon:.1e}",
            stacklevel=3,
        )


@dataclass(frozen=True)
class Estimate:
    """Probability estimate with its binomial-proportion confidence interval."""

    value: float
    ci_low: float
    ci_high: float
    n: int

    @classmethod
    def from_counts(cls, successes, n, z=Z_98):
        if n < 1:
            raise ValueError("estimate needs at least one sample")
        p = successes / n
        half = z * math.sqrt(p * (1.0 - p) / n)
        return cls(value=p, ci_low=max(p - half, 0.0), ci_high=min(p + half, 1.0), n=n)

    @property
    def half_width(self):
        return (self.ci_high - self.ci_low) / 2.0


@dataclass(frozen=True)
class BlockageStats:
    event_probability: float
    mean_duration_s: float
    n_events: int


@dataclass(frozen=True)
class Snapshot:
    """One frozen instant: BS layout with steering, traffic, user position."""

    bs_x: np.ndarray
    bs_side: np.ndarray  # +1 upper, -1 bottom
    bs_steer: np.ndarray  # boresight angle towards the road, per BS
    obstacle_lanes: tuple  # of (lane y offset, vehicle centre abscissas)
    user_x: float
    half_length: float


def sample_ppp_1d(density, half_length, rng):
    """Fixed-count PPP sample: floor(2*R*density) uniform points on [-R, R)."""
    if density < 0 or half_length <= 0:
        raise ValueError("density must be >= 0 and half-length positive")
    count = int(2.0 * half_length * density)
    return rng.uniform(-half_length, half_length, count)


def _wrap_delta(delta, half_length):
    period = 2.0 * half_length
    return (delta + half_length) % period - half_length


def _band_interval(x0, y0, x1, y1, band_lo, band_hi):
    """x-extent of the segment (x0,y0)-(x1,y1) inside a horizontal band.

    Returns None when the segment does not reach the band. Exact for the
    highway geometry, where segments are never horizontal inside a band.
    """
    dy = y1 - y0
    if dy == 0.0:
        if band_lo <= y0 <= band_hi:
            return min(x0, x1), max(x0, x1)
        return None
    t0 = (band_lo - y0) / dy
    t1 = (band_hi - y0) / dy
    t_lo, t_hi = min(t0, t1), max(t0, t1)
    t_lo = max(t_lo, 0.0)
    t_hi = min(t_hi, 1.0)
    if t_lo > t_hi:
        return None
    xa = x0 + t_lo * (x1 - x0)
    xb = x0 + t_hi * (x1 - x0)
    return (xa, xb) if xa <= xb else (xb, xa)


def is_los(user, bs, vehicle_lanes, layout):
    """True when no obstacle rectangle cuts the user-BS segment.

    ``vehicle_lanes`` is a sequence of (lane_y, centre_abscissas); each
    vehicle occupies a rectangle of the layout's blockage length and width
    centred on its position.
    """
    half_len = layout.blockage_length / 2.0
    half_wid = layout.blockage_width / 2.0
    x0, y0 = user
    x1, y1 = bs
    for lane_y, centers in vehicle_lanes:
        span = _band_interval(x0, y0, x1, y1, lane_y - half_wid, lane_y + half_wid)
        if span is None:
            continue
        xs = np.asarray(centers)
        if np.any((xs >= span[0] - half_len) & (xs <= span[1] + half_len)):
            return False
    return True


def _classify_los(dx, side, lanes_rel, layout):
    """Vectorized LOS flags for all BSs of a snapshot.

    ``dx`` are user-relative BS abscissas, ``lanes_rel`` holds per-lane
    (y, sorted user-relative centres). Only lanes between the user and each
    BS's road side can occlude. Queries are widened by the wrap period to
    catch rectangles straddling the section boundary.
    """
    hw = layout.half_width
    half_len = layout.blockage_length / 2.0
    half_wid = layout.blockage_width / 2.0
    los = np.ones(dx.shape, dtype=bool)
    for lane_y, xs in lanes_rel:
        if xs.size == 0:
            continue
        same_side = np.sign(lane_y) == side
        if not np.any(same_side):
            continue
        frac_lo = (abs(lane_y) - half_wid) / hw
        frac_hi = (abs(lane_y) + half_wid) / hw
        xa = np.minimum(dx * frac_lo, dx * frac_hi)
        xb = np.maximum(dx * frac_lo, dx * frac_hi)
        lo = xa - half_len
        hi = xb + half_len
        blocked = np.searchsorted(xs, hi, side="right") > np.searchsorted(
            xs, lo, side="left"
        )
        los &= ~(blocked & same_side)
    return los


def _prepare_lanes_rel(snap):
    out = []
    for lane_y, centers in snap.obstacle_lanes:
        rel = np.sort(_wrap_delta(np.asarray(centers) - snap.user_x, snap.half_length))
        if rel.size:
            # Duplicate the ends one period out so boundary rectangles match.
            period = 2.0 * snap.half_length
            rel = np.concatenate((rel - period, rel, rel + period))
        out.append((lane_y, rel))
    return out


def _link_geometry(snap, radio, layout):
    """Relative geometry, LOS flags, path gains and the serving index."""
    dx = _wrap_delta(snap.bs_x - snap.user_x, snap.half_length)
    dy = snap.bs_side * layout.half_width
    r = np.hypot(dx, dy)
    lanes_rel = _prepare_lanes_rel(snap)
    los = _classify_los(dx, snap.bs_side, lanes_rel, layout)
    gain = np.where(
        los,
        radio.c_los * r ** (-radio.alpha_los),
        radio.c_nlos * r ** (-radio.alpha_nlos),
    )
    serving = int(np.argmax(gain))
    return dx, dy, r, los, gain, serving


def snapshot_sinr(snap, radio, layout, rng, unit_fading=False):
    """Draw fading and return the linear SINR at the user for one snapshot."""
    dx, dy, r, los, gain, serving = _link_geometry(snap, radio, layout)
    n = dx.size
    half_bw = radio.beamwidth / 2.0

    # User beam: steered at the serving BS, clamped so the cone never leaves
    # the serving side of the road; opposite-side BSs then always fall into
    # the sidelobe.
    beam_dir = math.atan2(abs(dy[serving]), dx[serving])
    beam_dir = min(max(beam_dir, half_bw), math.pi - half_bw)
    bs_angle = np.arctan2(snap.bs_side[serving] * snap.bs_side * np.abs(dy), dx)
    diff = np.abs(bs_angle - beam_dir)
    diff = np.minimum(diff, 2.0 * math.pi - diff)
    rx_gain = np.where(diff <= half_bw, radio.g_rx_main, radio.g_rx_side)
    rx_gain[serving] = radio.g_rx_main

    # Interferer transmit beams: main lobe iff the user lies inside the
    # snapshot's drawn cone; the serving BS steers at the user.
    to_user = np.arctan2(np.abs(dy), -dx)
    tdiff = np.abs(to_user - snap.bs_steer)
    tdiff = np.minimum(tdiff, 2.0 * math.pi - tdiff)
    tx_gain = np.where(tdiff <= half_bw, radio.g_tx_main, radio.g_tx_side)
    tx_gain[serving] = radio.g_tx_main

    if unit_fading:
        fades = np.ones(n)
    else:
        fades = rng.exponential(1.0, n)
        fades[serving] = rng.gamma(radio.nakagami_m, 1.0 / radio.nakagami_m)

    power = fades * tx_gain * rx_gain * gain
    interference = float(np.sum(power)) - float(power[serving])
    return float(power[serving]) / (radio.noise_sigma + interference)


class _Trial:
    """Road state of one independent replication."""

    def __init__(self, layout, radio, dep, sim, rng, bs_positions=None):
        r_half = sim.half_length_r
        self.layout = layout
        self.radio = radio
        self.sim = sim
        self.rng = rng

        if bs_positions is None:
            self.bs_x = sample_ppp_1d(dep.lambda_bs, r_half, rng)
            if self.bs_x.size == 0:
                raise ValueError(
                    "BS density too small for the simulated section: "
                    f"floor(2*{r_half:g}*{dep.lambda_bs:g}) = 0"
                )
            self.bs_side = np.where(rng.random(self.bs_x.size) < 0.5, 1, -1)
        else:
            self.bs_x = np.asarray([p[0] for p in bs_positions], dtype=float)
            self.bs_side = np.asarray([p[1] for p in bs_positions], dtype=int)

        blockage = KraussParams(
            max_speed=sim.blockage_max_speed,
            max_accel=sim.max_accel,
            max_decel=sim.max_decel,
            dawdle_sigma=sim.dawdle_sigma,
            vehicle_length=layout.blockage_length,
            dt=sim.mobility_dt,
        )
        car = KraussParams(
            max_speed=sim.user_max_speed,
            max_accel=sim.max_accel,
            max_decel=sim.max_decel,
            dawdle_sigma=sim.dawdle_sigma,
            vehicle_length=sim.user_vehicle_length,
            dt=sim.mobility_dt,
        )
        self.lanes = []
        for offset, density in zip(
            layout.obstacle_lane_offsets(), layout.obstacle_densities
        ):
            self.lanes.append(
                LaneTraffic.poisson_lane(offset, 1, density, r_half, blockage, rng)
            )
            self.lanes.append(
                LaneTraffic.poisson_lane(-offset, -1, density, r_half, blockage, rng)
            )
        # The user drives the east-to-west user lane on the road axis; its
        # traffic shapes the user's mobility but never occludes. The
        # west-to-east user lane would interact with nothing and is omitted.
        self.user_lane = LaneTraffic.poisson_lane(
            0.0, -1, sim.lambda_u, r_half, car, rng, blocking=False
        )
        if self.user_lane.x.size == 0:
            self.user_idx = self.user_lane.insert(
                rng.uniform(-r_half, r_half), car.max_speed, r_half
            )
        else:
            self.user_idx = int(rng.integers(self.user_lane.x.size))

    def advance(self, seconds):
        steps = max(int(round(seconds / self.sim.mobility_dt)), 1)
        r_half = self.sim.half_length_r
        for _ in range(steps):
            for lane in self.lanes:
                lane.step(r_half, self.rng)
            self.user_lane.step(r_half, self.rng)

    @property
    def user_x(self):
        return float(
            wrap_position(
                self.user_lane.direction * self.user_lane.x[self.user_idx],
                self.sim.half_length_r,
            )
        )

    def snapshot(self):
        psi = self.radio.beamwidth
        steer = self.rng.uniform(
            psi / 2.0, 2.0 * math.pi - psi / 2.0, self.bs_x.size
        )
        lanes = tuple(
            (lane.y, lane.world_positions(self.sim.half_length_r))
            for lane in self.lanes
            if lane.blocking
        )
        return Snapshot(
            bs_x=self.bs_x,
            bs_side=self.bs_side,
            bs_steer=steer,
            obstacle_lanes=lanes,
            user_x=self.user_x,
            half_length=self.sim.half_length_r,
        )


def _run_trials(layout, radio, dep, sim, per_trial, reduce_init, reduce_add,
                n_workers=1):
    """Execute per-trial work on substreams and fold results in trial order."""

    def one(trial_idx):
        rng = np.random.default_rng([sim.seed, trial_idx])
        return per_trial(_Trial(layout, radio, dep, sim, rng), rng)

    acc = reduce_init()
    if n_workers <= 1:
        for i in range(sim.n_trials):
            acc = reduce_add(acc, one(i))
        return acc
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        for result in pool.map(one, range(sim.n_trials)):
            acc = reduce_add(acc, result)
    return acc


def estimate_outage_grid(thetas, layout, radio, dep, sim, n_workers=1):
    """Outage estimates P[SINR < theta] for an ascending threshold grid."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size == 0 or np.any(np.diff(thetas) <= 0):
        raise ValueError("thresholds must form a non-empty increasing grid")
    check_radius(sim, radio)

    def per_trial(trial, rng):
        trial.advance(sim.warmup_s)
        bins = np.zeros(thetas.size + 1, dtype=np.int64)
        for _ in range(sim.snapshots_per_trial):
            trial.advance(sim.snapshot_dt)
            snap = trial.snapshot()
            sinr = snapshot_sinr(snap, radio, layout, rng)
            bins[np.searchsorted(thetas, sinr, side="right")] += 1
        return bins

    bins = _run_trials(
        layout, radio, dep, sim, per_trial,
        lambda: np.zeros(thetas.size + 1, dtype=np.int64),
        lambda a, b: a + b,
        n_workers,
    )
    outage_counts = np.cumsum(bins)[:-1]  # samples with SINR below each theta
    return [
        Estimate.from_counts(int(c), sim.samples, sim.z_quantile)
        for c in outage_counts
    ]


def estimate_outage(theta, layout, radio, dep, sim, n_workers=1):
    """Monte Carlo estimate of the SINR outage probability at one threshold."""
    return estimate_outage_grid([theta], layout, radio, dep, sim, n_workers)[0]


def estimate_rate_coverage(kappa, layout, radio, dep, sim, n_workers=1):
    """Monte Carlo estimate of P[W*log2(1+SINR) >= kappa]."""
    theta = 2.0 ** (kappa / radio.bandwidth_hz) - 1.0
    if theta <= 0.0:
        return Estimate(value=1.0, ci_low=1.0, ci_high=1.0, n=sim.samples)
    outage = estimate_outage(theta, layout, radio, dep, sim, n_workers)
    return Estimate(
        value=1.0 - outage.value,
        ci_low=1.0 - outage.ci_high,
        ci_high=1.0 - outage.ci_low,
        n=outage.n,
    )


def estimate_association(layout, radio, dep, sim, n_workers=1):
    """Fraction of snapshots whose serving BS is in LOS."""
    check_radius(sim, radio)

    def per_trial(trial, rng):
        trial.advance(sim.warmup_s)
        hits = 0
        for _ in range(sim.snapshots_per_trial):
            trial.advance(sim.snapshot_dt)
            snap = trial.snapshot()
            _, _, _, los, _, serving = _link_geometry(snap, radio, layout)
            hits += bool(los[serving])
        return hits

    hits = _run_trials(
        layout, radio, dep, sim, per_trial, lambda: 0, lambda a, b: a + b, n_workers
    )
    return Estimate.from_counts(hits, sim.samples, sim.z_quantile)


def occlusion_intervals(flags, dt):
    """Durations of maximal runs of True in a boolean occlusion trace."""
    flags = np.asarray(flags, dtype=bool)
    if flags.size == 0:
        return []
    padded = np.concatenate(([False], flags, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return list((ends - starts) * dt)


def blockage_event_stats(layout, radio, dep, sim, bs_positions=None, n_workers=1):
    """Occlusion statistics of the per-side serving rays.

    For each road side, tracks whether the ray from the user to the nearest
    BS of that side is cut by any obstacle rectangle, sampled every mobility
    step. Returns the occluded-time fraction and the mean duration of the
    completed occlusion events. ``bs_positions`` (list of (x, side)) pins
    the BS layout for diagnostics.
    """

    def per_trial(trial, rng):
        trial.advance(sim.warmup_s)
        steps = sim.snapshots_per_trial * max(
            int(round(sim.snapshot_dt / sim.mobility_dt)), 1
        )
        traces = {1: [], -1: []}
        r_half = sim.half_length_r
        for _ in range(steps):
            trial.advance(sim.mobility_dt)
            user_x = trial.user_x
            lanes = [
                (lane.y, np.sort(_wrap_delta(
                    lane.world_positions(r_half) - user_x, r_half)))
                for lane in trial.lanes
                if lane.blocking
            ]
            dx_all = _wrap_delta(trial.bs_x - user_x, r_half)
            for side in (1, -1):
                mask = trial.bs_side == side
                if not np.any(mask):
                    continue
                dx = dx_all[mask]
                nearest = float(dx[np.argmin(np.abs(dx))])
                same = [(y, xs) for y, xs in lanes if np.sign(y) == side]
                clear = is_los(
                    (0.0, 0.0), (nearest, side * layout.half_width), same, layout
                )
                traces[side].append(not clear)
        occluded = sum(sum(t) for t in traces.values())
        total = sum(len(t) for t in traces.values())
        durations = []
        for t in traces.values():
            durations.extend(occlusion_intervals(t, sim.mobility_dt))
        return occluded, total, durations

    def init():
        return (0, 0, [])

    def add(acc, res):
        return (acc[0] + res[0], acc[1] + res[1], acc[2] + res[2])

    def runner(trial_idx):
        rng = np.random.default_rng([sim.seed, trial_idx])
        trial = _Trial(layout, radio, dep, sim, rng, bs_positions=bs_positions)
        return per_trial(trial, rng)

    acc = init()
    if n_workers <= 1:
        for i in range(sim.n_trials):
            acc = add(acc, runner(i))
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for res in pool.map(runner, range(sim.n_trials)):
                acc = add(acc, res)
    occluded, total, durations = acc
    probability = occluded / total if total else 0.0
    mean_duration = float(np.mean(durations)) if durations else 0.0
    return BlockageStats(
        event_probability=probability,
        mean_duration_s=mean_duration,
        n_events=len(durations),
    )
