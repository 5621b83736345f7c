"""Unit tests for preference graphs and sink equilibria."""

import pydot
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinkatlas.errors import GenericityError, InvalidProfileError, ParameterError
from sinkatlas.models.game import Game, Subgame, profile_set
from sinkatlas.services.corpus import get_named_game, random_game
from sinkatlas.services.preference_graph import (
    build_graph,
    comparable_pair_count,
    export_dot,
    graph_report,
)

SHAPES = st.sampled_from([(2, 2), (2, 3), (3, 3), (3, 4), (2, 2, 2), (2, 3, 2)])
SEEDS = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def subgames(draw, strategy_counts):
    """A subgame keeping a non-empty drawn subset of each player's strategies."""
    return Subgame(
        tuple(
            tuple(draw(st.lists(st.integers(0, m - 1), min_size=1, max_size=m, unique=True)))
            for m in strategy_counts
        ),
    )


class TestBuildGraph:
    """Test cases for build_graph."""

    def setup_method(self):
        """Set up test fixtures."""
        self.shapley = get_named_game("shapley").game
        self.pg = build_graph(self.shapley)

    def test_nodes_and_arcs(self):
        """Test a 3x3 graph has nine nodes and one arc per comparable pair."""
        assert len(self.pg.nodes) == 9
        assert self.pg.num_arcs == 18
        assert comparable_pair_count((3, 3)) == 18

    def test_arc_weights(self):
        """Test arc weights are the deviator's payoff gain."""
        assert self.pg.has_arc((0, 0), (1, 0))
        assert self.pg.weight((0, 0), (1, 0)) == 1.0
        assert self.pg.weight((0, 0), (2, 0)) == 2.0
        assert not self.pg.has_arc((1, 0), (0, 0))

    def test_arc_player(self):
        """Test arcs record the deviating player."""
        players = {(a.tail, a.head): a.player for a in self.pg.arcs()}
        assert players[((0, 0), (1, 0))] == 0
        assert players[((0, 0), (0, 1))] == 1

    def test_signed_difference(self):
        """Test the signed difference is antisymmetric."""
        assert self.pg.signed_difference((0, 0), (1, 0)) == 1.0
        assert self.pg.signed_difference((1, 0), (0, 0)) == -1.0

    def test_signed_difference_requires_comparable(self):
        """Test profiles differing in two players are not comparable."""
        with pytest.raises(InvalidProfileError):
            self.pg.signed_difference((0, 0), (1, 1))

    def test_negative_tie_tol(self):
        """Test a negative tie tolerance is rejected."""
        with pytest.raises(ParameterError):
            build_graph(self.shapley, tie_tol=-1.0)

    def test_comparable_pair_count_three_players(self):
        """Test comparable pairs in a 2x2x2 game."""
        assert comparable_pair_count((2, 2, 2)) == 12


class TestSinkEquilibria:
    """Test cases for SCCs and sink equilibria."""

    def test_shapley_single_cycle_sink(self):
        """Test Shapley's game has one sink: the six off-diagonal profiles."""
        sinks = build_graph(get_named_game("shapley").game).sink_equilibria()
        assert len(sinks) == 1
        assert sinks[0].size == 6
        assert (0, 0) not in sinks[0].profiles
        assert not sinks[0].is_singleton_pne
        assert not sinks[0].is_subgame

    def test_shapley_sources(self):
        """Test the diagonal profiles are the source equilibria."""
        sources = build_graph(get_named_game("shapley").game).source_equilibria()
        assert {s.profiles for s in sources} == {
            profile_set([(0, 0)]),
            profile_set([(1, 1)]),
            profile_set([(2, 2)]),
        }

    def test_matching_pennies_whole_game(self):
        """Test matching pennies is one strongly connected sink."""
        game = Game.from_bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
        sinks = build_graph(game).sink_equilibria()
        assert len(sinks) == 1
        assert sinks[0].profiles == game.all_profiles()
        assert sinks[0].is_subgame

    def test_pure_equilibrium_sink(self):
        """Test a strict pure equilibrium is a singleton sink."""
        game = Game.from_bimatrix([[2, 0], [0, 1]], [[2, 0], [0, 1]])
        sinks = build_graph(game).sink_equilibria()
        assert [s.sorted_profiles() for s in sinks] == [[(0, 0)], [(1, 1)]]
        assert all(s.is_singleton_pne for s in sinks)

    def test_degenerate_game_raises(self):
        """Test a tied pair blocks sink computation."""
        game = Game.from_bimatrix([[1, 0], [1, 2]], [[1, 0], [0, 1]])
        pg = build_graph(game)
        assert pg.is_degenerate
        with pytest.raises(GenericityError) as excinfo:
            pg.sink_equilibria()
        assert excinfo.value.pair == ((0, 0), (1, 0))

    def test_tie_within_tolerance(self):
        """Test differences within tie_tol count as ties."""
        game = Game.from_bimatrix([[1, 0], [0, 1]], [[1, 1 + 1e-9], [0, 1]])
        assert not build_graph(game).is_degenerate
        assert build_graph(game, tie_tol=1e-6).is_degenerate

    def test_scc_order_is_topological(self):
        """Test SCCs come in topological order with sinks last."""
        pg = build_graph(get_named_game("shapley").game)
        sccs = pg.scc_decomposition()
        assert len(sccs) == 4
        assert sccs[-1] == pg.sink_equilibria()[0].profiles

    def test_potential_game_is_acyclic(self):
        """Test a potential game has only singleton SCCs."""
        pg = build_graph(random_game((3, 3), "potential", seed=4))
        assert all(len(c) == 1 for c in pg.scc_decomposition())
        assert all(s.is_singleton_pne for s in pg.sink_equilibria())

    def test_no_path_between_sinks(self):
        """Test the three-player game has no path from a to b."""
        named = get_named_game("three_player_fig3")
        pg = build_graph(named.game)
        assert not pg.has_path(named.profile("a"), named.profile("b"))
        assert pg.has_path((2, 2, 1), named.profile("b"))

    def test_induced_subgraph(self):
        """Test the 2x2x2 subgame makes a a source and b a sink."""
        named = get_named_game("three_player_fig3")
        sub = build_graph(named.game).induced_subgraph(Subgame(((0, 1), (0, 1), (0, 1))))
        assert len(sub.nodes) == 8
        assert sub.is_source(named.profile("a"))
        assert sub.is_sink(named.profile("b"))
        with pytest.raises(InvalidProfileError):
            sub.is_source((2, 0, 0))

    @given(SHAPES, SEEDS)
    @settings(max_examples=50, deadline=None)
    def test_negated_game_reverses_arcs(self, shape, seed):
        """Test negating payoffs reverses every arc and turns source components into sinks."""
        game = random_game(shape, "generic", seed)
        pg = build_graph(game)
        negated = build_graph(game.negate())
        assert {(a.head, a.tail) for a in negated.arcs()} == {(a.tail, a.head) for a in pg.arcs()}
        for arc in pg.arcs():
            assert negated.weight(arc.head, arc.tail) == pytest.approx(arc.weight)
        assert {h.profiles for h in negated.sink_equilibria()} == {
            s.profiles for s in pg.source_equilibria()
        }

    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_induced_subgraph_matches_restricted_game(self, data):
        """Test the induced subgraph is the graph of the restricted game, mapped back."""
        shape = data.draw(SHAPES)
        game = random_game(shape, "generic", data.draw(SEEDS))
        y = data.draw(subgames(shape))
        sub = build_graph(game).induced_subgraph(y)
        restricted = game.restrict(y)
        local = build_graph(restricted.game)
        assert sorted(sub.nodes) == sorted(restricted.to_parent(p) for p in local.nodes)
        assert {(a.tail, a.head, a.player) for a in sub.arcs()} == {
            (restricted.to_parent(a.tail), restricted.to_parent(a.head), a.player)
            for a in local.arcs()
        }
        for arc in local.arcs():
            parent = (restricted.to_parent(arc.tail), restricted.to_parent(arc.head))
            assert sub.weight(*parent) == pytest.approx(arc.weight)


class TestExports:
    """Test cases for DOT and JSON graph exports."""

    def setup_method(self):
        """Set up test fixtures."""
        self.pg = build_graph(get_named_game("shapley").game)

    def test_dot_nodes_and_highlight(self):
        """Test the DOT text has every node and fills sink profiles."""
        text = export_dot(self.pg, [self.pg.sink_equilibria()[0].profiles])
        for p in self.pg.nodes:
            assert f"p{p[0]}_{p[1]}" in text
        assert text.count("gray80") == 6
        assert text.startswith("digraph")

    def test_dot_escapes_quoted_names(self):
        """Test strategy names containing quotes still give parseable DOT."""
        game = Game.from_bimatrix(
            [[2, 0], [0, 1]],
            [[2, 0], [0, 1]],
            [['say "hi"', "b"], ["c", "d"]],
        )
        text = export_dot(build_graph(game))
        assert 'label="(say \\"hi\\",c)"' in text
        (parsed,) = pydot.graph_from_dot_data(text)
        assert len(parsed.get_edges()) == 4

    def test_dot_is_deterministic(self):
        """Test repeated exports are identical."""
        assert export_dot(self.pg) == export_dot(build_graph(get_named_game("shapley").game))

    def test_graph_report(self):
        """Test the JSON report lists SCCs with sink flags and every arc."""
        report = graph_report(self.pg)
        assert len(report.arcs) == 18
        assert [s.is_sink for s in report.sccs].count(True) == 1
        assert report.shape == [3, 3]
        assert report.degenerate_pairs == []
