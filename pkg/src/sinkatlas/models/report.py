"""Serializable analysis and graph reports."""

from pydantic import BaseModel, Field

from .stability import Cavity, LocalSourceCertificate

NO_CERTIFICATE = "no certificate in searched families"


class GameDigest(BaseModel):
    """Shape and content hash of the analyzed game."""

    players: int
    shape: list[int]
    num_profiles: int
    sha256: str


class ArcEntry(BaseModel):
    tail: list[int]
    head: list[int]
    player: int
    weight: float


class SccEntry(BaseModel):
    profiles: list[list[int]]
    is_sink: bool


class GraphReport(BaseModel):
    """Stable JSON schema for a preference graph."""

    shape: list[int]
    tie_tol: float
    sccs: list[SccEntry]
    arcs: list[ArcEntry]
    degenerate_pairs: list[list[list[int]]] = Field(default_factory=list)


class SinkSummary(BaseModel):
    """One sink equilibrium with its pseudoconvexity breakdown."""

    id: int
    profiles: list[list[int]]
    labels: list[str]
    is_subgame: bool
    is_singleton_pne: bool
    pseudoconvex: bool
    cavity_count: int
    counts_by_kind: dict[str, int]
    failing_cavities: list[Cavity] = Field(default_factory=list)
    boundary_cavities: list[Cavity] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    """Everything `analyze` computes for one game file."""

    game: GameDigest
    tie_tol: float
    strict_pseudoconvex: bool
    sinks: list[SinkSummary] = Field(default_factory=list)
    local_sources: list[LocalSourceCertificate] = Field(default_factory=list)
    local_source_search: str = NO_CERTIFICATE
    genericity_warnings: list[str] = Field(default_factory=list)

    @property
    def pseudoconvex(self) -> bool:
        return all(s.pseudoconvex for s in self.sinks)
