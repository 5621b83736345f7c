"""Replicator dynamics in mixed-strategy space and in correlated space."""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ParameterError, StepSizeError
from ..models.dynamics import (
    ChainEvidence,
    ChainLeg,
    ConnectionEvidence,
    CorrelatedState,
    CorrelatedTrajectory,
    ProductMatrix,
    StopCondition,
    TrajectoryRecord,
)
from ..models.game import Game, MixedProfile, ProfileSet, PureProfile

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
DEFAULT_T_MAX = 1e4
DEFAULT_OMEGA_FLOOR = 1e-3
# Allowed excursion outside the simplex before renormalization
SIMPLEX_DRIFT = 1e-6
# Rows preallocated for a trajectory; the buffer doubles when full
RECORD_CHUNK = 65536


def replicator_vector_field(game: Game, x: MixedProfile) -> list[np.ndarray]:
    """
    Evaluate the replicator vector field at x.

    Each coordinate is x^i_s (U_i(s; x_-i) - U_i(x)); the result has one array
    per player and every player's derivatives sum to zero.
    """
    x.check_counts(game.strategy_counts)
    sim = ReplicatorSimulator(game)
    flat = sim.field(x.flat)
    return np.split(flat, sim.offsets[1:-1])


class ReplicatorSimulator:
    """Fixed-step RK4 integration of the replicator dynamic for one game."""

    def __init__(
        self,
        game: Game,
        step: float = DEFAULT_STEP,
        t_max: float = DEFAULT_T_MAX,
        record_every: int = 1,
    ):
        if step <= 0:
            raise ParameterError(f"step must be positive, got {step}")
        if t_max <= 0:
            raise ParameterError(f"t_max must be positive, got {t_max}")
        if record_every < 1:
            raise ParameterError(f"record_every must be at least 1, got {record_every}")
        self.game = game
        self.step = step
        self.t_max = t_max
        self.record_every = record_every
        self.counts = game.strategy_counts
        self.offsets = np.cumsum((0, *self.counts))

    def _split(self, flat: np.ndarray) -> list[np.ndarray]:
        return [flat[self.offsets[i] : self.offsets[i + 1]] for i in range(len(self.counts))]

    def field(self, flat: np.ndarray) -> np.ndarray:
        """Vector field on the concatenated per-player coordinates."""
        dists = self._split(flat)
        out = np.empty_like(flat)
        for i, d in enumerate(dists):
            dev = self.game._deviation_payoffs(i, dists)
            out[self.offsets[i] : self.offsets[i + 1]] = d * (dev - dev @ d)
        return out

    def _rk4(self, flat: np.ndarray, h: float) -> np.ndarray:
        k1 = self.field(flat)
        k2 = self.field(flat + 0.5 * h * k1)
        k3 = self.field(flat + 0.5 * h * k2)
        k4 = self.field(flat + h * k3)
        return flat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _renormalize(self, flat: np.ndarray, zero: np.ndarray, t: float) -> np.ndarray:
        if flat.min() < -SIMPLEX_DRIFT:
            raise StepSizeError(
                f"State left the simplex by {-flat.min():.3g} at t={t:.6g}; "
                f"use a step smaller than {self.step:g}",
            )
        for i in range(len(self.counts)):
            lo, hi = self.offsets[i], self.offsets[i + 1]
            total = flat[lo:hi].sum()
            if abs(total - 1.0) > SIMPLEX_DRIFT:
                raise StepSizeError(
                    f"Player {i} mass drifted to {total:.9g} at t={t:.6g}; "
                    f"use a step smaller than {self.step:g}",
                )
        flat = np.clip(flat, 0.0, None)
        flat[zero] = 0.0
        for i in range(len(self.counts)):
            lo, hi = self.offsets[i], self.offsets[i + 1]
            flat[lo:hi] /= flat[lo:hi].sum()
        return flat

    def _mass_index(self, h: ProfileSet) -> np.ndarray:
        return np.array(
            sorted(self.game.profile_index(p) for p in h),
            dtype=int,
        )

    def _products(self, states: np.ndarray) -> np.ndarray:
        """Row k is the product distribution of states[k], profiles in lexicographic order."""
        rows = states.shape[0]
        z = states[:, self.offsets[0] : self.offsets[1]]
        for i in range(1, len(self.counts)):
            block = states[:, self.offsets[i] : self.offsets[i + 1]]
            z = (z[:, :, None] * block[:, None, :]).reshape(rows, -1)
        return z

    def integrate(
        self,
        x0: MixedProfile,
        stop: StopCondition | None = None,
        observe: Mapping[str, ProfileSet] | None = None,
        references: Mapping[str, MixedProfile] | None = None,
    ) -> TrajectoryRecord:
        """
        Integrate from x0 until t_max or until a stop condition fires.

        Coordinates that are exactly zero at the start stay exactly zero; negative
        values from round-off are clipped and each player's vector rescaled after
        every step.

        Args:
            x0: Initial mixed profile
            stop: Optional early-stop tests, evaluated after every step
            observe: Named profile sets whose content mass is recorded
            references: Named points whose sup-norm distance is recorded

        Returns:
            TrajectoryRecord with observables "content:<name>" and "distance:<name>"

        Raises:
            StepSizeError: If a step leaves the simplex by more than 1e-6
        """
        x0.check_counts(self.counts)
        stop = stop or StopCondition.never()
        observe = dict(observe or {})
        references = dict(references or {})

        flat = x0.flat.copy()
        zero = flat == 0.0
        stop_sets = [self._mass_index(h) for h in stop.content_sets]
        stop_refs = [r.flat for r in stop.references]
        for r in stop.references:
            r.check_counts(self.counts)
        observed = {name: self._mass_index(h) for name, h in observe.items()}
        ref_points = {}
        for name, r in references.items():
            r.check_counts(self.counts)
            ref_points[name] = r.flat

        n_steps = max(1, math.ceil(self.t_max / self.step - 1e-9))
        capacity = min(n_steps // self.record_every + 2, RECORD_CHUNK)
        times = np.empty(capacity)
        states = np.empty((capacity, flat.size))
        times[0], states[0] = 0.0, flat
        rows = 1
        reason = "t_max"
        t = 0.0

        for k in range(1, n_steps + 1):
            h = min(self.step, self.t_max - t) if k == n_steps else self.step
            new = self._renormalize(self._rk4(flat, h), zero, t)
            t = self.t_max if k == n_steps else k * self.step

            if stop.displacement_tol is not None:
                if np.max(np.abs(new - flat)) / h < stop.displacement_tol:
                    reason = "settled"
            flat = new
            if stop_sets:
                z = self._products(flat[None, :])[0]
                for j, idx in enumerate(stop_sets):
                    if z[idx].sum() >= stop.content_threshold:
                        reason = f"content:{j}"
                        break
            for j, ref in enumerate(stop_refs):
                if np.max(np.abs(flat - ref)) < stop.radius:
                    reason = f"near:{j}"
                    break

            done = reason != "t_max"
            if done or k == n_steps or k % self.record_every == 0:
                if rows == times.size:
                    times = np.concatenate([times, np.empty_like(times)])
                    states = np.concatenate([states, np.empty_like(states)])
                times[rows], states[rows] = t, flat
                rows += 1
            if done:
                break

        times, state_arr = times[:rows].copy(), states[:rows].copy()
        observables: dict[str, np.ndarray] = {}
        if observed:
            z_rows = self._products(state_arr)
            for name, idx in observed.items():
                observables[f"content:{name}"] = z_rows[:, idx].sum(axis=1)
        for name, ref in ref_points.items():
            observables[f"distance:{name}"] = np.max(np.abs(state_arr - ref), axis=1)

        logger.debug(
            f"Integrated {self.game.shape_label()} game to t={times[-1]:.6g} "
            f"({rows} rows, stop={reason})",
        )
        return TrajectoryRecord(
            strategy_counts=self.counts,
            times=times,
            states=state_arr,
            observables=observables,
            stop_reason=reason,
        )


def integrate(
    game: Game,
    x0: MixedProfile,
    t_max: float = DEFAULT_T_MAX,
    step: float = DEFAULT_STEP,
    stop: StopCondition | None = None,
    record_every: int = 1,
    observe: Mapping[str, ProfileSet] | None = None,
    references: Mapping[str, MixedProfile] | None = None,
) -> TrajectoryRecord:
    """Integrate the replicator dynamic of game from x0; see ReplicatorSimulator.integrate."""
    sim = ReplicatorSimulator(game, step=step, t_max=t_max, record_every=record_every)
    return sim.integrate(x0, stop=stop, observe=observe, references=references)


def product_matrix(game: Game) -> ProductMatrix:
    """
    Build M with M[q, p] = sum_i (u_i(q_i; p_-i) - u_i(p)).

    Rows and columns follow the lexicographic profile order.
    """
    profiles = game.profiles()
    grid = np.array(profiles, dtype=int)
    size = len(profiles)
    entries = np.zeros((size, size))
    for i, m in enumerate(game.strategy_counts):
        u = game.payoffs[i]
        base = u.reshape(-1)
        deviated = np.empty((m, size))
        for s in range(m):
            idx = grid.copy()
            idx[:, i] = s
            deviated[s] = u[tuple(idx.T)]
        entries += deviated[grid[:, i], :] - base[None, :]
    return ProductMatrix(entries, tuple(profiles))


def correlated_vector_field(m: ProductMatrix, z: CorrelatedState) -> np.ndarray:
    """z_p (M z)_p for every profile p."""
    return z.z * (m.entries @ z.z)


def integrate_correlated(
    m: ProductMatrix,
    z0: CorrelatedState,
    t_max: float,
    step: float = DEFAULT_STEP,
    record_every: int = 1,
) -> CorrelatedTrajectory:
    """RK4 on z' = z * (M z), clipped and rescaled to the simplex after each step."""
    if step <= 0 or t_max <= 0:
        raise ParameterError("step and t_max must be positive")
    entries = m.entries
    z = z0.z.copy()
    zero = z == 0.0

    def rhs(v: np.ndarray) -> np.ndarray:
        return v * (entries @ v)

    times = [0.0]
    states = [z.copy()]
    n_steps = max(1, math.ceil(t_max / step - 1e-9))
    for k in range(1, n_steps + 1):
        h = step if k < n_steps else t_max - (n_steps - 1) * step
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h * k2)
        k4 = rhs(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if z.min() < -SIMPLEX_DRIFT:
            raise StepSizeError(
                f"Correlated state left the simplex by {-z.min():.3g}; use a smaller step",
            )
        z = np.clip(z, 0.0, None)
        z[zero] = 0.0
        z /= z.sum()
        if k == n_steps or k % record_every == 0:
            times.append(t_max if k == n_steps else k * step)
            states.append(z.copy())
    return CorrelatedTrajectory(np.array(times), np.array(states))


def estimate_omega_limit(
    tr: TrajectoryRecord,
    tail_fraction: float = 0.1,
    floor: float = DEFAULT_OMEGA_FLOOR,
) -> frozenset[PureProfile]:
    """
    Profiles whose correlated mass exceeds floor anywhere in the trajectory's tail.

    A desk-scale stand-in for the profile support of the omega-limit set.
    """
    if floor <= 0:
        raise ParameterError("floor must be positive")
    rows = tr.tail(tail_fraction)
    z = tr.correlated_states()[rows]
    peak = z.max(axis=0)
    hits = np.flatnonzero(peak > floor)
    return frozenset(
        tuple(int(s) for s in np.unravel_index(int(k), tr.strategy_counts)) for k in hits
    )


def mix(x: MixedProfile, y: MixedProfile, weight: float) -> MixedProfile:
    """(1 - weight) x + weight y, player by player."""
    if not 0.0 <= weight <= 1.0:
        raise ParameterError(f"mix weight must be in [0, 1], got {weight}")
    y.check_counts(x.strategy_counts)
    return MixedProfile.from_weights(
        [(1.0 - weight) * a + weight * b for a, b in zip(x.dists, y.dists)],
    )


def follow_chain(
    game: Game,
    start: MixedProfile,
    waypoints: Sequence[MixedProfile],
    radius: float | Sequence[float],
    nudge: float = 1e-2,
    step: float = 1e-2,
    t_max: float = DEFAULT_T_MAX,
) -> ChainEvidence:
    """
    Follow the flow through a sequence of waypoints.

    Each leg integrates until the state comes within the leg's radius of the next
    waypoint; the following leg restarts from that waypoint moved a fraction
    nudge toward the waypoint after it. The chain stops at the first leg that
    never gets close enough.
    """
    radii = [radius] * len(waypoints) if isinstance(radius, (int, float)) else list(radius)
    if len(radii) != len(waypoints):
        raise ParameterError("One radius per waypoint is required")

    legs: list[ChainLeg] = []
    trajectories: list[TrajectoryRecord] = []
    current = start
    for k, (target, r) in enumerate(zip(waypoints, radii)):
        tr = integrate(
            game,
            current,
            t_max=t_max,
            step=step,
            stop=StopCondition.near(target, radius=r),
        )
        closest, when = tr.closest_approach(target)
        reached = tr.stop_reason == "near:0"
        legs.append(ChainLeg(k, reached, closest, when, r))
        trajectories.append(tr)
        logger.info(
            f"Chain leg {k}: closest approach {closest:.3g} at t={when:.6g} "
            f"(radius {r:g}, {'reached' if reached else 'missed'})",
        )
        if not reached:
            break
        if k + 1 < len(waypoints):
            current = mix(target, waypoints[k + 1], nudge)
    return ChainEvidence(tuple(legs), tuple(trajectories))


def bisect_connection(
    game: Game,
    family: Callable[[float], MixedProfile],
    target: MixedProfile,
    sinks: tuple[ProfileSet, ProfileSet],
    iterations: int = 48,
    capture: float = 0.99,
    step: float = 1e-2,
    t_max: float = 1e3,
    radius: float | None = None,
) -> ConnectionEvidence:
    """
    Bisect a one-parameter family of starts on which sink captures the flow.

    The two ends of the family [0, 1] must be captured by different sinks.
    Trajectories from the shrinking bracket run along the basin boundary, and
    the smallest distance any of them reaches to target is reported. With a
    radius, bisection stops as soon as some run passes that close to target.
    """
    if radius is not None and radius <= 0:
        raise ParameterError("radius must be positive")
    stop = StopCondition.content_at_least(capture, *sinks)

    def run(theta: float) -> tuple[int | None, float]:
        tr = integrate(game, family(theta), t_max=t_max, step=step, stop=stop)
        closest, _ = tr.closest_approach(target)
        sink = int(tr.stop_reason.split(":")[1]) if tr.stop_reason.startswith("content") else None
        return sink, closest

    lo, hi = 0.0, 1.0
    lo_sink, lo_close = run(lo)
    hi_sink, hi_close = run(hi)
    closest = min(lo_close, hi_close)
    if lo_sink is None or hi_sink is None or lo_sink == hi_sink:
        logger.warning(
            f"Family ends are captured by sinks {lo_sink} and {hi_sink}; nothing to bisect",
        )
        return ConnectionEvidence(lo, hi, lo_sink, hi_sink, closest, 0)

    done = 0
    for done in range(1, iterations + 1):
        mid = 0.5 * (lo + hi)
        sink, close = run(mid)
        closest = min(closest, close)
        if sink == lo_sink:
            lo = mid
        elif sink == hi_sink:
            hi = mid
        else:
            logger.debug(f"Start {mid:.12g} captured by neither sink; stopping bisection")
            break
        if radius is not None and closest <= radius:
            logger.debug(f"Passed within {closest:.3g} of the target after {done} bisections")
            break
    logger.info(f"Connection bracket [{lo:.12g}, {hi:.12g}], closest approach {closest:.3g}")
    return ConnectionEvidence(lo, hi, lo_sink, hi_sink, closest, done)


def ensemble(
    game: Game,
    starts: Sequence[MixedProfile],
    t_max: float = DEFAULT_T_MAX,
    step: float = DEFAULT_STEP,
    stop: StopCondition | None = None,
    record_every: int = 1,
    observe: Mapping[str, ProfileSet] | None = None,
    max_workers: int | None = None,
) -> list[TrajectoryRecord]:
    """Integrate many starts in a thread pool; results keep the order of starts."""
    sim = ReplicatorSimulator(game, step=step, t_max=t_max, record_every=record_every)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda x0: sim.integrate(x0, stop=stop, observe=observe), starts))
