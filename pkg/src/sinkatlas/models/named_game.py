"""Named games from the counterexample corpus and their verification results."""

from dataclasses import dataclass, field

from ..errors import VerificationError
from .game import Game, MixedProfile, ProfileSet, PureProfile


@dataclass(frozen=True)
class ExpectedStructure:
    """Structural facts a named game must exhibit."""

    arcs: frozenset[tuple[PureProfile, PureProfile]] = frozenset()
    arcs_complete: bool = True
    sinks: tuple[ProfileSet, ...] = ()
    cavity_kinds: frozenset[str] = frozenset()
    no_path: tuple[tuple[PureProfile, PureProfile], ...] = ()
    pseudoconvex: bool | None = None


@dataclass(frozen=True, eq=False)
class NamedGame:
    """A corpus game with its labelled profiles and expected structure."""

    id: str
    description: str
    game: Game
    expected: ExpectedStructure
    labels: dict[str, PureProfile] = field(default_factory=dict)

    def profile(self, label: str) -> PureProfile:
        return self.labels[label]


@dataclass
class VerificationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationResult:
    """Result of running a named game's scripted checks."""

    game_id: str
    checks: list[VerificationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[VerificationCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> VerificationCheck:
        check = VerificationCheck(name, bool(passed), detail)
        self.checks.append(check)
        return check

    def raise_if_failed(self) -> "VerificationResult":
        """Raise VerificationError naming every failed check; return self otherwise."""
        if not self.passed:
            names = ", ".join(c.name for c in self.failed) or "no checks ran"
            raise VerificationError(f"{self.game_id}: failed checks: {names}")
        return self


@dataclass(frozen=True, eq=False)
class GadgetClassification:
    """The two boundary fixed points of a 2x3 gadget and which one is Nash."""

    x_hat: MixedProfile
    y_hat: MixedProfile
    x_hat_nash: bool
    y_hat_nash: bool

    @property
    def x_hat_row(self) -> float:
        return float(self.x_hat.dists[0][0])

    @property
    def y_hat_row(self) -> float:
        return float(self.y_hat.dists[0][0])

    @property
    def exactly_one_nash(self) -> bool:
        return self.x_hat_nash != self.y_hat_nash

    @property
    def rule_prediction(self) -> str:
        """Which point the row-mass ordering says is Nash."""
        return "x_hat" if self.x_hat_row > self.y_hat_row else "y_hat"

    @property
    def nash_point(self) -> str | None:
        if not self.exactly_one_nash:
            return None
        return "x_hat" if self.x_hat_nash else "y_hat"

    @property
    def nash(self) -> MixedProfile:
        return self.x_hat if self.x_hat_nash else self.y_hat

    @property
    def non_nash(self) -> MixedProfile:
        return self.y_hat if self.x_hat_nash else self.x_hat
