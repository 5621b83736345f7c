"""Data models for sinkatlas game analysis."""

from .dynamics import CorrelatedState, ProductMatrix, StopCondition, TrajectoryRecord
from .game import Game, GameFile, MixedProfile, ProfileSet, PureProfile, Subgame
from .graph import Arc, PreferenceGraph, SinkEquilibrium
from .named_game import NamedGame, VerificationResult
from .report import AnalysisReport
from .stability import Cavity, LocalSourceCertificate

__all__ = [
    "AnalysisReport",
    "Arc",
    "Cavity",
    "CorrelatedState",
    "Game",
    "GameFile",
    "LocalSourceCertificate",
    "MixedProfile",
    "NamedGame",
    "PreferenceGraph",
    "ProductMatrix",
    "ProfileSet",
    "PureProfile",
    "SinkEquilibrium",
    "StopCondition",
    "Subgame",
    "TrajectoryRecord",
    "VerificationResult",
]
