"""Cavities, local-source certificates and equilibrium checks."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from .game import MixedProfile, Subgame

CavityKind = Literal["two-in", "one-in-one-out", "local-source"]

# Letters used in the text report for each cavity shape
KIND_LETTERS: dict[str, str] = {
    "one-in-one-out": "a",
    "two-in": "b",
    "local-source": "c",
}


class Cavity(BaseModel):
    """A 2x2 slice with exactly three of its four profiles inside a sink equilibrium."""

    model_config = ConfigDict(frozen=True)

    sink_id: int = Field(..., description="Sink equilibrium the cavity belongs to")
    players: tuple[int, int] = Field(..., description="The two players that vary")
    subgame: tuple[tuple[int, ...], ...] = Field(
        ...,
        description="Strategy subsets; two of size two, the rest of size one",
    )
    inside: tuple[tuple[int, ...], ...] = Field(..., description="The three in-sink profiles")
    outside: tuple[int, ...] = Field(..., description="The profile outside the sink")
    diagonal: tuple[int, ...] = Field(
        ...,
        description="In-sink profile diagonal to the outside one",
    )
    kind: CavityKind
    signed_sum: float = Field(
        ...,
        description="Sum of the two signed deviation gains away from the diagonal profile",
    )

    @property
    def letter(self) -> str:
        return KIND_LETTERS[self.kind]

    def as_subgame(self) -> Subgame:
        return Subgame(self.subgame)


class CavityVerdict(BaseModel):
    """Pseudoconvexity outcome for one cavity."""

    cavity: Cavity
    pseudoconvex: bool
    boundary: bool = Field(
        default=False,
        description="Signed sum within tie tolerance of zero",
    )


class PseudoconvexityReport(BaseModel):
    """Whether every cavity of a sink equilibrium is pseudoconvex."""

    sink_id: int
    verdict: bool
    strict: bool
    cavity_count: int
    counts_by_kind: dict[str, int]
    failing: list[Cavity] = Field(default_factory=list)
    boundary: list[Cavity] = Field(default_factory=list)


class NashCheck(BaseModel):
    """Nash and quasi-strict verdicts with per-strategy payoff gaps."""

    is_nash: bool
    is_quasi_strict: bool
    tol: float
    margins: list[list[float]] = Field(
        ...,
        description="U_i(x) - U_i(s; x_-i) for every player i and strategy s",
    )

    @property
    def verdict(self) -> bool:
        return self.is_nash and self.is_quasi_strict


class LocalSourceCertificate(BaseModel):
    """Evidence that a point of content(H) looks like a source inside a subgame."""

    sink_id: int
    family: Literal["pure", "mixed"]
    subgame: tuple[tuple[int, ...], ...]
    point: list[list[float]] = Field(..., description="The local source, full strategy space")
    margins: list[list[float]] = Field(
        ...,
        description="Per player, per subgame strategy: U_i(s; x_-i) - U_i(x)",
    )
    min_margin: float = Field(
        ...,
        description="Smallest slack over strategies outside the point's support",
    )

    def mixed_profile(self) -> MixedProfile:
        return MixedProfile.from_weights(self.point, normalize=False)

    def as_subgame(self) -> Subgame:
        return Subgame(self.subgame)


class TransversalEigenvalue(BaseModel):
    """Jacobian eigenvalue along an unused strategy at a boundary fixed point."""

    player: int
    strategy: int
    eigenvalue: float
