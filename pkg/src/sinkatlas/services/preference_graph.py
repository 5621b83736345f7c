"""Preference graph construction, DOT export and JSON graph reports."""

import logging
from collections.abc import Sequence

import networkx as nx
import pydot

from ..errors import ParameterError
from ..models.game import Game, ProfileSet
from ..models.graph import DegeneratePair, PreferenceGraph
from ..models.report import ArcEntry, GraphReport, SccEntry

logger = logging.getLogger(__name__)

DEFAULT_TIE_TOL = 1e-12

SINK_FILL_COLORS = ("gray80", "lightblue", "khaki", "palegreen", "mistyrose")


def build_graph(game: Game, tie_tol: float = DEFAULT_TIE_TOL) -> PreferenceGraph:
    """
    Build the weighted preference graph of a game.

    Every comparable pair (profiles differing in exactly one player's strategy)
    becomes an arc toward that player's higher payoff, weighted by the payoff
    gain, unless the difference is within tie_tol, in which case the pair is
    recorded as degenerate.

    Args:
        game: The game to analyze
        tie_tol: Non-negative tie tolerance on payoff differences

    Returns:
        PreferenceGraph over all pure profiles
    """
    if tie_tol < 0:
        raise ParameterError(f"tie_tol must be non-negative, got {tie_tol}")

    digraph = nx.DiGraph()
    profiles = game.profiles()
    digraph.add_nodes_from(profiles)
    degenerate: set[DegeneratePair] = set()

    payoffs = game.payoffs
    for p in profiles:
        for i, m in enumerate(game.strategy_counts):
            for s in range(p[i] + 1, m):
                q = p[:i] + (s,) + p[i + 1 :]
                diff = float(payoffs[(i, *q)] - payoffs[(i, *p)])
                if abs(diff) <= tie_tol:
                    degenerate.add(DegeneratePair(p, q, i, diff))
                elif diff > 0:
                    digraph.add_edge(p, q, player=i, weight=diff)
                else:
                    digraph.add_edge(q, p, player=i, weight=-diff)

    logger.debug(
        f"Built preference graph for {game.shape_label()} game: "
        f"{digraph.number_of_nodes()} nodes, {digraph.number_of_edges()} arcs, "
        f"{len(degenerate)} degenerate pairs",
    )
    if degenerate:
        logger.warning(f"Game has {len(degenerate)} tied comparable pairs")
    return PreferenceGraph(game, digraph, frozenset(degenerate), tie_tol)


def comparable_pair_count(strategy_counts: Sequence[int]) -> int:
    """Number of unordered comparable pairs in a game of the given shape."""
    total = 0
    profiles = 1
    for m in strategy_counts:
        profiles *= m
    for m in strategy_counts:
        total += profiles * (m - 1) // 2
    return total


def _node_name(p) -> str:
    return "p" + "_".join(str(s) for s in p)


def _format_weight(w: float) -> str:
    return f"{w:.6g}"


def _dot_string(text: str) -> str:
    """Double-quoted DOT string with backslashes and quotes escaped."""
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    pg: PreferenceGraph,
    highlights: Sequence[ProfileSet] = (),
    graph_name: str = "preference_graph",
) -> str:
    """
    Render the graph as deterministic DOT text.

    Nodes are emitted in profile order and edges sorted by (tail, head);
    profiles in each highlighted set are filled, one color per set, and
    every edge is labelled with its weight.
    """
    dot = pydot.Dot(graph_name, graph_type="digraph")
    dot.set_node_defaults(shape="box", fontname="Helvetica")

    fill = {}
    for k, members in enumerate(highlights):
        for p in members:
            fill[p] = SINK_FILL_COLORS[k % len(SINK_FILL_COLORS)]

    for p in pg.nodes:
        node = pydot.Node(_node_name(p))
        node.set_label(_dot_string(pg.game.profile_label(p)))
        if p in fill:
            node.set_style("filled")
            node.set_fillcolor(fill[p])
        dot.add_node(node)

    for arc in pg.arcs():
        edge = pydot.Edge(_node_name(arc.tail), _node_name(arc.head))
        edge.set_label(f'"{_format_weight(arc.weight)}"')
        edge.set("player", str(arc.player))
        dot.add_edge(edge)

    return dot.to_string()


def graph_report(pg: PreferenceGraph) -> GraphReport:
    """SCCs in topological order with sink flags and every arc weight."""
    sinks = set()
    if not pg.is_degenerate:
        sinks = {sink.profiles for sink in pg.sink_equilibria()}
    sccs = [
        SccEntry(
            profiles=[list(p) for p in sorted(comp)],
            is_sink=comp in sinks,
        )
        for comp in pg.scc_decomposition()
    ]
    arcs = [
        ArcEntry(
            tail=list(arc.tail),
            head=list(arc.head),
            player=arc.player,
            weight=arc.weight,
        )
        for arc in pg.arcs()
    ]
    return GraphReport(
        shape=list(pg.game.strategy_counts),
        tie_tol=pg.tie_tol,
        sccs=sccs,
        arcs=arcs,
        degenerate_pairs=[
            [list(pair.first), list(pair.second)] for pair in sorted(pg.degenerate_pairs)
        ],
    )
