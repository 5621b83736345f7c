"""Normal-form games, profiles, subgames and the content operator."""

import hashlib
import itertools
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..errors import (
    InvalidProfileError,
    InvalidSubgameError,
    ParameterError,
    ShapeError,
)

# Player indices are 0-based throughout; strategy indices too.
PureProfile = tuple[int, ...]
ProfileSet = frozenset[PureProfile]

SUPPORT_THRESHOLD = 1e-9
SIMPLEX_TOL = 1e-12


def profile_set(profiles: Iterable[Sequence[int]]) -> ProfileSet:
    """Build a ProfileSet from any iterable of index sequences."""
    return frozenset(tuple(int(s) for s in p) for p in profiles)


@dataclass(frozen=True)
class Subgame:
    """Each player restricted to a non-empty subset of strategies."""

    strategy_subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        subsets = tuple(tuple(sorted({int(s) for s in sub})) for sub in self.strategy_subsets)
        for i, sub in enumerate(subsets):
            if not sub:
                raise InvalidSubgameError(f"Player {i} has an empty strategy subset")
            if sub[0] < 0:
                raise InvalidSubgameError(f"Player {i} has a negative strategy index")
        object.__setattr__(self, "strategy_subsets", subsets)

    @classmethod
    def full(cls, strategy_counts: Sequence[int]) -> "Subgame":
        """The whole game as a subgame."""
        return cls(tuple(tuple(range(m)) for m in strategy_counts))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(sub) for sub in self.strategy_subsets)

    def validate_for(self, strategy_counts: Sequence[int]) -> None:
        """Raise InvalidSubgameError unless this subgame fits the given game shape."""
        if len(self.strategy_subsets) != len(strategy_counts):
            raise InvalidSubgameError(
                f"Subgame has {len(self.strategy_subsets)} players, game has {len(strategy_counts)}",
            )
        for i, (sub, m) in enumerate(zip(self.strategy_subsets, strategy_counts)):
            if sub[-1] >= m:
                raise InvalidSubgameError(
                    f"Player {i} strategy {sub[-1]} out of range (has {m})",
                )

    def is_full(self, strategy_counts: Sequence[int]) -> bool:
        return all(
            len(sub) == m for sub, m in zip(self.strategy_subsets, strategy_counts)
        )

    def profiles(self) -> list[PureProfile]:
        """All pure profiles of the subgame in lexicographic order."""
        return list(itertools.product(*self.strategy_subsets))

    def contains(self, p: PureProfile) -> bool:
        return all(s in sub for s, sub in zip(p, self.strategy_subsets))

    def is_within(self, other: "Subgame") -> bool:
        return all(
            set(a) <= set(b)
            for a, b in zip(self.strategy_subsets, other.strategy_subsets)
        )

    def to_lists(self) -> list[list[int]]:
        return [list(sub) for sub in self.strategy_subsets]


@dataclass(frozen=True, eq=False)
class MixedProfile:
    """One probability vector per player."""

    dists: tuple[np.ndarray, ...]

    def __post_init__(self):
        checked = []
        for i, d in enumerate(self.dists):
            arr = np.array(d, dtype=float).reshape(-1)
            if arr.size == 0:
                raise ShapeError(f"Player {i} has an empty distribution")
            if not np.all(np.isfinite(arr)):
                raise ParameterError(f"Player {i} distribution has non-finite entries")
            if np.any(arr < 0.0):
                raise ParameterError(f"Player {i} distribution has negative entries")
            total = float(arr.sum())
            if abs(total - 1.0) > SIMPLEX_TOL:
                raise ParameterError(
                    f"Player {i} distribution sums to {total!r}, expected 1",
                )
            arr.flags.writeable = False
            checked.append(arr)
        object.__setattr__(self, "dists", tuple(checked))

    @classmethod
    def from_weights(
        cls,
        weights: Sequence[Sequence[float]],
        normalize: bool = True,
    ) -> "MixedProfile":
        """Build from non-negative weights, rescaling each player's vector to sum to one."""
        dists = []
        for i, w in enumerate(weights):
            arr = np.array(w, dtype=float)
            if normalize:
                total = arr.sum()
                if not np.isfinite(total) or total <= 0.0:
                    raise ParameterError(f"Player {i} weights must have positive total")
                arr = arr / total
            dists.append(arr)
        return cls(tuple(dists))

    @classmethod
    def from_flat(
        cls,
        strategy_counts: Sequence[int],
        flat: Sequence[float] | np.ndarray,
    ) -> "MixedProfile":
        values = np.asarray(flat, dtype=float)
        if values.size != sum(strategy_counts):
            raise ShapeError(
                f"Expected {sum(strategy_counts)} coordinates, got {values.size}",
            )
        splits = np.cumsum(strategy_counts)[:-1]
        return cls(tuple(np.split(values, splits)))

    @classmethod
    def pure(cls, strategy_counts: Sequence[int], p: PureProfile) -> "MixedProfile":
        """Point mass on a pure profile."""
        dists = []
        for i, (s, m) in enumerate(zip(p, strategy_counts)):
            if not 0 <= s < m:
                raise InvalidProfileError(f"Player {i} strategy {s} out of range")
            d = np.zeros(m)
            d[s] = 1.0
            dists.append(d)
        return cls(tuple(dists))

    @classmethod
    def barycenter(
        cls,
        strategy_counts: Sequence[int],
        subgame: Subgame | None = None,
    ) -> "MixedProfile":
        """Uniform mix over every strategy, or over a subgame's strategies."""
        subgame = subgame or Subgame.full(strategy_counts)
        dists = []
        for m, sub in zip(strategy_counts, subgame.strategy_subsets):
            d = np.zeros(m)
            d[list(sub)] = 1.0 / len(sub)
            dists.append(d)
        return cls(tuple(dists))

    @classmethod
    def random(
        cls,
        strategy_counts: Sequence[int],
        rng: np.random.Generator,
    ) -> "MixedProfile":
        """Uniform sample from the product of simplices."""
        return cls.from_weights([rng.dirichlet(np.ones(m)) for m in strategy_counts])

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(d.size for d in self.dists)

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.dists)

    def check_counts(self, strategy_counts: Sequence[int]) -> None:
        if self.strategy_counts != tuple(strategy_counts):
            raise ShapeError(
                f"Mixed profile has shape {self.strategy_counts}, game has {tuple(strategy_counts)}",
            )

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> Subgame:
        """Subgame of coordinates strictly above the threshold."""
        subsets = []
        for i, d in enumerate(self.dists):
            idx = tuple(int(s) for s in np.flatnonzero(d > threshold))
            if not idx:
                raise ParameterError(
                    f"Player {i} has no coordinate above threshold {threshold}",
                )
            subsets.append(idx)
        return Subgame(tuple(subsets))

    def product_distribution(self) -> np.ndarray:
        """Correlated distribution z over pure profiles, shaped like the payoff grid."""
        z = self.dists[0]
        for d in self.dists[1:]:
            z = np.multiply.outer(z, d)
        return np.asarray(z)

    def content_membership(
        self,
        h: ProfileSet,
        threshold: float = SUPPORT_THRESHOLD,
    ) -> bool:
        """True iff every profile spanned by the support lies in h."""
        return all(p in h for p in self.support(threshold).profiles())

    def content_mass(self, h: ProfileSet) -> float:
        """Total correlated mass carried by the profiles of h."""
        z = self.product_distribution()
        return float(sum(z[p] for p in h))

    def distance(self, other: "MixedProfile") -> float:
        """Sup-norm distance between two profiles of the same shape."""
        other.check_counts(self.strategy_counts)
        return float(np.max(np.abs(self.flat - other.flat)))

    def to_lists(self) -> list[list[float]]:
        return [d.tolist() for d in self.dists]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return self.strategy_counts == other.strategy_counts and all(
            np.array_equal(a, b) for a, b in zip(self.dists, other.dists)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Game:
    """An N-player game; payoffs[i][p] is player i's utility at pure profile p."""

    payoffs: np.ndarray
    strategy_names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        arr = np.array(self.payoffs, dtype=float)
        if arr.ndim < 2 or arr.shape[0] != arr.ndim - 1:
            raise ShapeError(
                f"Payoff tensor of shape {arr.shape} is not (N, m_1, ..., m_N)",
            )
        if any(m < 1 for m in arr.shape[1:]):
            raise ShapeError("Every player needs at least one strategy")
        if not np.all(np.isfinite(arr)):
            raise ShapeError("Payoffs must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "payoffs", arr)

        if self.strategy_names is not None:
            names = tuple(tuple(str(n) for n in row) for row in self.strategy_names)
            if len(names) != self.num_players or any(
                len(row) != m for row, m in zip(names, self.strategy_counts)
            ):
                raise ShapeError("strategy_names must match strategy_counts")
            object.__setattr__(self, "strategy_names", names)

    @classmethod
    def from_flat(
        cls,
        strategy_counts: Sequence[int],
        utilities: Sequence[Sequence[float]],
        strategy_names: Sequence[Sequence[str]] | None = None,
    ) -> "Game":
        """Build from N flat payoff lists in lexicographic profile order, player 1 slowest."""
        counts = tuple(int(m) for m in strategy_counts)
        if len(utilities) != len(counts):
            raise ShapeError(
                f"Expected {len(counts)} utility arrays, got {len(utilities)}",
            )
        size = math.prod(counts)
        for i, flat in enumerate(utilities):
            if len(flat) != size:
                raise ShapeError(
                    f"Player {i} has {len(flat)} utilities, expected {size}",
                )
        payoffs = np.array(utilities, dtype=float).reshape((len(counts), *counts))
        names = None if strategy_names is None else tuple(tuple(n) for n in strategy_names)
        return cls(payoffs, names)

    @classmethod
    def from_bimatrix(
        cls,
        row_payoffs: Sequence[Sequence[float]],
        column_payoffs: Sequence[Sequence[float]],
        strategy_names: Sequence[Sequence[str]] | None = None,
    ) -> "Game":
        a = np.array(row_payoffs, dtype=float)
        b = np.array(column_payoffs, dtype=float)
        if a.shape != b.shape or a.ndim != 2:
            raise ShapeError("Row and column payoff matrices must share a 2-D shape")
        names = None if strategy_names is None else tuple(tuple(n) for n in strategy_names)
        return cls(np.stack([a, b]), names)

    @property
    def num_players(self) -> int:
        return self.payoffs.shape[0]

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(int(m) for m in self.payoffs.shape[1:])

    @property
    def num_profiles(self) -> int:
        return math.prod(self.strategy_counts)

    def profiles(self) -> list[PureProfile]:
        """Every pure profile in lexicographic order, player 1 varying slowest."""
        return list(itertools.product(*(range(m) for m in self.strategy_counts)))

    def all_profiles(self) -> ProfileSet:
        return frozenset(self.profiles())

    def profile_index(self, p: PureProfile) -> int:
        self.check_profile(p)
        return int(np.ravel_multi_index(p, self.strategy_counts))

    def check_player(self, i: int) -> None:
        if not 0 <= i < self.num_players:
            raise InvalidProfileError(
                f"Player {i} out of range for a {self.num_players}-player game",
            )

    def check_profile(self, p: Sequence[int]) -> None:
        if len(p) != self.num_players:
            raise InvalidProfileError(
                f"Profile {tuple(p)} has {len(p)} entries, game has {self.num_players} players",
            )
        for i, (s, m) in enumerate(zip(p, self.strategy_counts)):
            if not 0 <= s < m:
                raise InvalidProfileError(
                    f"Player {i} strategy {s} out of range in profile {tuple(p)}",
                )

    def utility_pure(self, i: int, p: PureProfile) -> float:
        """u_i(p) exactly as stored."""
        self.check_player(i)
        self.check_profile(p)
        return float(self.payoffs[(i, *p)])

    def deviation_payoffs(self, i: int, x: MixedProfile) -> np.ndarray:
        """Expected payoff of each pure strategy of player i against x_{-i}."""
        return self._deviation_payoffs(i, x.dists)

    def _deviation_payoffs(self, i: int, dists: Sequence[np.ndarray]) -> np.ndarray:
        t = self.payoffs[i]
        for j in reversed(range(self.num_players)):
            if j != i:
                t = np.tensordot(t, dists[j], axes=([j], [0]))
        return np.asarray(t)

    def utility_mixed(self, i: int, x: MixedProfile) -> float:
        """Expected utility of player i under the product distribution of x."""
        self.check_player(i)
        x.check_counts(self.strategy_counts)
        return float(self.deviation_payoffs(i, x) @ x.dists[i])

    def restrict(self, y: Subgame) -> "RestrictedGame":
        """The subgame y as a standalone game plus its index translation."""
        y.validate_for(self.strategy_counts)
        index = np.ix_(range(self.num_players), *y.strategy_subsets)
        names = None
        if self.strategy_names is not None:
            names = tuple(
                tuple(row[s] for s in sub)
                for row, sub in zip(self.strategy_names, y.strategy_subsets)
            )
        return RestrictedGame(
            game=Game(self.payoffs[index], names),
            subgame=y,
            parent_counts=self.strategy_counts,
        )

    def negate(self) -> "Game":
        return Game(-self.payoffs, self.strategy_names)

    def flat_utilities(self) -> list[list[float]]:
        return [self.payoffs[i].reshape(-1).tolist() for i in range(self.num_players)]

    def profile_label(self, p: PureProfile) -> str:
        """Human label for a profile, using strategy names when present."""
        if self.strategy_names is None:
            return "(" + ",".join(str(s) for s in p) + ")"
        return "(" + ",".join(self.strategy_names[i][s] for i, s in enumerate(p)) + ")"

    def shape_label(self) -> str:
        return "x".join(str(m) for m in self.strategy_counts)

    def digest(self) -> str:
        """SHA-256 of the canonical game file text."""
        canonical = json.dumps(
            GameFile.from_game(self).model_dump(),
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return (
            self.payoffs.shape == other.payoffs.shape
            and bool(np.array_equal(self.payoffs, other.payoffs))
            and self.strategy_names == other.strategy_names
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class RestrictedGame:
    """A subgame re-indexed from zero, with the map back to the parent's indices."""

    game: Game
    subgame: Subgame
    parent_counts: tuple[int, ...]
    translation: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "translation", self.subgame.strategy_subsets)

    def to_parent(self, p: PureProfile) -> PureProfile:
        """Local profile to the parent game's indices."""
        return tuple(self.translation[i][s] for i, s in enumerate(p))

    def to_local(self, p: PureProfile) -> PureProfile:
        if not self.subgame.contains(p):
            raise InvalidProfileError(f"Profile {p} is outside the subgame")
        return tuple(self.translation[i].index(s) for i, s in enumerate(p))

    def embed(self, x: MixedProfile) -> MixedProfile:
        """Local mixed profile placed in the parent's strategy space, zeros elsewhere."""
        x.check_counts(self.game.strategy_counts)
        dists = []
        for d, sub, m in zip(x.dists, self.translation, self.parent_counts):
            full = np.zeros(m)
            full[list(sub)] = d
            dists.append(full)
        return MixedProfile(tuple(dists))

    def project(self, x: MixedProfile) -> MixedProfile:
        """Parent mixed profile read on the subgame's coordinates; mass outside is dropped."""
        x.check_counts(self.parent_counts)
        return MixedProfile.from_weights(
            [d[list(sub)] for d, sub in zip(x.dists, self.translation)],
        )


class GameFile(BaseModel):
    """On-disk game schema; utilities are flat, lexicographic, player 1 slowest."""

    players: int = Field(..., ge=1, description="Number of players N")
    strategy_counts: list[int] = Field(..., description="Strategies per player")
    utilities: list[list[float]] = Field(
        ...,
        description="N flat payoff arrays in lexicographic profile order",
    )
    strategy_names: list[list[str]] | None = Field(
        default=None,
        description="Optional labels per player and strategy",
    )

    @model_validator(mode="after")
    def check_shapes(self):
        """Validate counts, array lengths and finiteness against each other."""
        if len(self.strategy_counts) != self.players:
            raise ValueError(
                f"strategy_counts has {len(self.strategy_counts)} entries, players is {self.players}",
            )
        if any(m < 1 for m in self.strategy_counts):
            raise ValueError("every strategy count must be at least 1")
        if len(self.utilities) != self.players:
            raise ValueError(
                f"utilities has {len(self.utilities)} arrays, players is {self.players}",
            )
        size = math.prod(self.strategy_counts)
        for i, flat in enumerate(self.utilities):
            if len(flat) != size:
                raise ValueError(f"utilities[{i}] has {len(flat)} entries, expected {size}")
            if not all(math.isfinite(v) for v in flat):
                raise ValueError(f"utilities[{i}] contains non-finite values")
        if self.strategy_names is not None:
            if len(self.strategy_names) != self.players or any(
                len(row) != m for row, m in zip(self.strategy_names, self.strategy_counts)
            ):
                raise ValueError("strategy_names must match strategy_counts")
        return self

    @classmethod
    def from_game(cls, game: Game) -> "GameFile":
        return cls(
            players=game.num_players,
            strategy_counts=list(game.strategy_counts),
            utilities=game.flat_utilities(),
            strategy_names=(
                None
                if game.strategy_names is None
                else [list(row) for row in game.strategy_names]
            ),
        )

    def to_game(self) -> Game:
        return Game.from_flat(self.strategy_counts, self.utilities, self.strategy_names)
