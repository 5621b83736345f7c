"""Product matrices, correlated states, stop conditions and trajectories."""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError, ShapeError
from .game import MixedProfile, ProfileSet, PureProfile

CORRELATED_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProductMatrix:
    """M[q, p] = sum_i (u_i(q_i; p_-i) - u_i(p)) over every pair of pure profiles."""

    entries: np.ndarray
    profiles: tuple[PureProfile, ...]

    def __post_init__(self):
        size = len(self.profiles)
        if self.entries.shape != (size, size):
            raise ShapeError(f"Product matrix must be {size}x{size}")
        self.entries.flags.writeable = False

    def index(self, p: PureProfile) -> int:
        return self.profiles.index(p)

    def entry(self, q: PureProfile, p: PureProfile) -> float:
        return float(self.entries[self.index(q), self.index(p)])


@dataclass(frozen=True, eq=False)
class CorrelatedState:
    """A distribution z over pure profiles, in lexicographic profile order."""

    z: np.ndarray

    def __post_init__(self):
        arr = np.array(self.z, dtype=float).reshape(-1)
        if np.any(arr < 0.0):
            raise ParameterError("Correlated state has negative entries")
        if abs(float(arr.sum()) - 1.0) > CORRELATED_TOL:
            raise ParameterError(f"Correlated state sums to {arr.sum()!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "z", arr)

    @classmethod
    def from_mixed(cls, x: MixedProfile) -> "CorrelatedState":
        """The product distribution z_p = prod_i x^i_{p_i}."""
        return cls(x.product_distribution().reshape(-1))

    def mass(self, h: ProfileSet, strategy_counts: Sequence[int]) -> float:
        grid = self.z.reshape(tuple(strategy_counts))
        return float(sum(grid[p] for p in h))


@dataclass(frozen=True)
class StopCondition:
    """When to halt an integration early; any configured test firing stops the run."""

    content_sets: tuple[ProfileSet, ...] = ()
    content_threshold: float = 1.0
    displacement_tol: float | None = None
    references: tuple[MixedProfile, ...] = ()
    radius: float = 1e-3

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("Proximity radius must be positive")
        if self.displacement_tol is not None and self.displacement_tol <= 0:
            raise ParameterError("Displacement tolerance must be positive")
        if self.content_sets and not 0 < self.content_threshold <= 1:
            raise ParameterError("Content threshold must be in (0, 1]")

    @classmethod
    def never(cls) -> "StopCondition":
        return cls()

    @classmethod
    def content_at_least(cls, threshold: float, *sets: ProfileSet) -> "StopCondition":
        """Stop once the correlated mass of any one of the sets reaches threshold."""
        return cls(content_sets=tuple(sets), content_threshold=threshold)

    @classmethod
    def near(cls, *references: MixedProfile, radius: float = 1e-3) -> "StopCondition":
        return cls(references=tuple(references), radius=radius)

    @classmethod
    def settled(cls, tol: float) -> "StopCondition":
        return cls(displacement_tol=tol)

    @property
    def is_active(self) -> bool:
        return (
            bool(self.content_sets)
            or self.displacement_tol is not None
            or bool(self.references)
        )


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Recorded states of one integration, one row per recorded step."""

    strategy_counts: tuple[int, ...]
    times: np.ndarray
    states: np.ndarray
    observables: Mapping[str, np.ndarray] = field(default_factory=dict)
    stop_reason: str = "t_max"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ShapeError("A trajectory needs at least one time stamp")
        if states.shape != (times.size, sum(self.strategy_counts)):
            raise ShapeError(
                f"States of shape {states.shape} do not match {times.size} times",
            )
        if np.any(np.diff(times) <= 0):
            raise ShapeError("Trajectory times must be strictly increasing")
        for name, series in self.observables.items():
            if len(series) != times.size:
                raise ShapeError(f"Observable {name!r} has the wrong length")
        times.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, k: int) -> MixedProfile:
        return MixedProfile.from_flat(self.strategy_counts, self.states[k])

    @property
    def initial_state(self) -> MixedProfile:
        return self.state(0)

    @property
    def final_state(self) -> MixedProfile:
        return self.state(len(self) - 1)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def distances_to(self, reference: MixedProfile) -> np.ndarray:
        reference.check_counts(self.strategy_counts)
        return np.max(np.abs(self.states - reference.flat), axis=1)

    def closest_approach(self, reference: MixedProfile) -> tuple[float, float]:
        """Smallest sup-norm distance to reference and the time it occurs."""
        d = self.distances_to(reference)
        k = int(np.argmin(d))
        return float(d[k]), float(self.times[k])

    def correlated_states(self) -> np.ndarray:
        """Row k is the product distribution of state k, profiles in lexicographic order."""
        offsets = np.cumsum((0, *self.strategy_counts))
        z = self.states[:, offsets[0] : offsets[1]]
        for i in range(1, len(self.strategy_counts)):
            block = self.states[:, offsets[i] : offsets[i + 1]]
            z = (z[:, :, None] * block[:, None, :]).reshape(len(self), -1)
        return z

    def content_mass_series(self, h: ProfileSet) -> np.ndarray:
        z = self.correlated_states()
        cols = [int(np.ravel_multi_index(p, self.strategy_counts)) for p in h]
        return z[:, cols].sum(axis=1)

    def tail(self, fraction: float) -> slice:
        """Rows in the trailing fraction of the recorded steps."""
        if not 0 < fraction <= 1:
            raise ParameterError("tail fraction must be in (0, 1]")
        start = min(len(self) - 1, int(math.floor(len(self) * (1 - fraction))))
        return slice(start, len(self))


@dataclass(frozen=True, eq=False)
class CorrelatedTrajectory:
    """Correlated-space states z(t), one row per recorded step."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final_state(self) -> CorrelatedState:
        return CorrelatedState(self.states[-1])


@dataclass(frozen=True)
class ChainLeg:
    """One leg of a waypoint chain: how close the flow came and when."""

    waypoint: int
    reached: bool
    closest: float
    time: float
    radius: float


@dataclass(frozen=True)
class ChainEvidence:
    legs: tuple[ChainLeg, ...]
    trajectories: tuple[TrajectoryRecord, ...]

    @property
    def complete(self) -> bool:
        return bool(self.legs) and all(leg.reached for leg in self.legs)


@dataclass(frozen=True)
class ConnectionEvidence:
    """Outcome of bisecting a family of starts between two capturing sinks."""

    lower: float
    upper: float
    lower_sink: int | None
    upper_sink: int | None
    closest: float
    iterations: int

    @property
    def bracketed(self) -> bool:
        return (
            self.lower_sink is not None
            and self.upper_sink is not None
            and self.lower_sink != self.upper_sink
        )
