"""Services for building, analyzing and simulating games."""

from .analysis import analyze_game, render_text
from .corpus import corpus_ids, get_named_game, random_game
from .dynamics import integrate, product_matrix
from .game_io import load_game, save_game
from .local_sources import find_local_sources
from .preference_graph import build_graph, export_dot
from .stability import is_pseudoconvex_sink
from .verification import verify_named_game

__all__ = [
    "analyze_game",
    "build_graph",
    "corpus_ids",
    "export_dot",
    "find_local_sources",
    "get_named_game",
    "integrate",
    "is_pseudoconvex_sink",
    "load_game",
    "product_matrix",
    "random_game",
    "render_text",
    "save_game",
    "verify_named_game",
]
