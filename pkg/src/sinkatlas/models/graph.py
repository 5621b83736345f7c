"""Weighted preference graphs and sink equilibria."""

import math
from dataclasses import dataclass

import networkx as nx

from ..errors import GenericityError, InvalidProfileError
from .game import Game, ProfileSet, PureProfile, Subgame


@dataclass(frozen=True, order=True)
class Arc:
    """A unilateral deviation tail -> head that strictly improves the deviator."""

    tail: PureProfile
    head: PureProfile
    player: int
    weight: float


@dataclass(frozen=True, order=True)
class DegeneratePair:
    """A comparable pair whose payoff difference is within the tie tolerance."""

    first: PureProfile
    second: PureProfile
    player: int
    difference: float


@dataclass(frozen=True)
class SinkEquilibrium:
    """A sink strongly connected component of a preference graph."""

    id: int
    profiles: ProfileSet
    is_subgame: bool
    is_singleton_pne: bool

    @property
    def size(self) -> int:
        return len(self.profiles)

    def sorted_profiles(self) -> list[PureProfile]:
        return sorted(self.profiles)


def spans_subgame(profiles: ProfileSet) -> bool:
    """True iff the set equals all profiles of the subgame it spans."""
    n = len(next(iter(profiles)))
    spanned = math.prod(len({p[i] for p in profiles}) for i in range(n))
    return spanned == len(profiles)


class PreferenceGraph:
    """Directed graph on pure profiles; arcs point toward the deviator's higher payoff."""

    def __init__(
        self,
        game: Game,
        digraph: nx.DiGraph,
        degenerate_pairs: frozenset[DegeneratePair],
        tie_tol: float,
        subgame: Subgame | None = None,
    ):
        self.game = game
        self.digraph = digraph
        self.degenerate_pairs = degenerate_pairs
        self.tie_tol = tie_tol
        self.subgame = subgame or Subgame.full(game.strategy_counts)
        self._sccs: list[frozenset[PureProfile]] | None = None

    @property
    def nodes(self) -> list[PureProfile]:
        return sorted(self.digraph.nodes)

    @property
    def num_arcs(self) -> int:
        return self.digraph.number_of_edges()

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degenerate_pairs)

    def arcs(self) -> list[Arc]:
        """Every arc, sorted by tail then head."""
        return sorted(
            Arc(tail, head, data["player"], data["weight"])
            for tail, head, data in self.digraph.edges(data=True)
        )

    def has_arc(self, tail: PureProfile, head: PureProfile) -> bool:
        return self.digraph.has_edge(tail, head)

    def weight(self, tail: PureProfile, head: PureProfile) -> float:
        return float(self.digraph.edges[tail, head]["weight"])

    def signed_difference(self, p: PureProfile, q: PureProfile) -> float:
        """u_i(q) - u_i(p) for the unique player i in which p and q differ."""
        players = [i for i, (a, b) in enumerate(zip(p, q)) if a != b]
        if len(players) != 1:
            raise InvalidProfileError(f"Profiles {p} and {q} are not comparable")
        i = players[0]
        return self.game.utility_pure(i, q) - self.game.utility_pure(i, p)

    def _check_node(self, p: PureProfile) -> None:
        if p not in self.digraph:
            raise InvalidProfileError(f"Profile {p} is not a node of this graph")

    def is_source(self, p: PureProfile) -> bool:
        """All incident arcs leave p."""
        self._check_node(p)
        return self.digraph.in_degree(p) == 0

    def is_sink(self, p: PureProfile) -> bool:
        """All incident arcs enter p."""
        self._check_node(p)
        return self.digraph.out_degree(p) == 0

    def has_path(self, p: PureProfile, q: PureProfile) -> bool:
        self._check_node(p)
        self._check_node(q)
        return nx.has_path(self.digraph, p, q)

    def scc_decomposition(self) -> list[frozenset[PureProfile]]:
        """Strongly connected components in topological order, ties by smallest profile."""
        if self._sccs is None:
            condensed = nx.condensation(self.digraph)
            smallest = {
                n: min(data["members"]) for n, data in condensed.nodes(data=True)
            }
            order = nx.lexicographical_topological_sort(condensed, key=smallest.get)
            self._sccs = [frozenset(condensed.nodes[n]["members"]) for n in order]
        return list(self._sccs)

    def _require_generic(self) -> None:
        if self.degenerate_pairs:
            pair = min(self.degenerate_pairs)
            raise GenericityError(
                f"Tied payoffs for player {pair.player} between "
                f"{self.game.profile_label(pair.first)} and {self.game.profile_label(pair.second)} "
                f"(difference {pair.difference:.3g} within tolerance {self.tie_tol:g})",
                pair=(pair.first, pair.second),
            )

    def _components_without(self, direction: str) -> list[frozenset[PureProfile]]:
        sccs = self.scc_decomposition()
        member_of = {p: k for k, comp in enumerate(sccs) for p in comp}
        closed = []
        for k, comp in enumerate(sccs):
            if direction == "out":
                neighbours = (h for p in comp for h in self.digraph.successors(p))
            else:
                neighbours = (t for p in comp for t in self.digraph.predecessors(p))
            if all(member_of[n] == k for n in neighbours):
                closed.append(comp)
        return sorted(closed, key=min)

    def sink_equilibria(self) -> list[SinkEquilibrium]:
        """Sink SCCs, numbered from 0 in order of their smallest profile."""
        self._require_generic()
        return [
            SinkEquilibrium(
                id=k,
                profiles=comp,
                is_subgame=spans_subgame(comp),
                is_singleton_pne=len(comp) == 1,
            )
            for k, comp in enumerate(self._components_without("out"))
        ]

    def source_equilibria(self) -> list[SinkEquilibrium]:
        """SCCs with no incoming arcs; the sink equilibria of the negated game."""
        self._require_generic()
        return [
            SinkEquilibrium(
                id=k,
                profiles=comp,
                is_subgame=spans_subgame(comp),
                is_singleton_pne=False,
            )
            for k, comp in enumerate(self._components_without("in"))
        ]

    def induced_subgraph(self, y: Subgame) -> "PreferenceGraph":
        """Graph on the profiles of y with the arcs between them, weights unchanged."""
        y.validate_for(self.game.strategy_counts)
        nodes = [p for p in y.profiles() if p in self.digraph]
        sub = nx.DiGraph()
        sub.add_nodes_from(nodes)
        keep = set(nodes)
        sub.add_edges_from(
            (t, h, d) for t, h, d in self.digraph.edges(data=True) if t in keep and h in keep
        )
        pairs = frozenset(
            pair
            for pair in self.degenerate_pairs
            if pair.first in keep and pair.second in keep
        )
        return PreferenceGraph(self.game, sub, pairs, self.tie_tol, subgame=y)
