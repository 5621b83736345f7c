"""Unit tests for games, profiles and subgames."""

import numpy as np
import pytest

from sinkatlas.errors import (
    InvalidProfileError,
    InvalidSubgameError,
    ParameterError,
    ShapeError,
)
from sinkatlas.models.game import Game, GameFile, MixedProfile, Subgame, profile_set


def matching_pennies() -> Game:
    return Game.from_bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


class TestGame:
    """Test cases for the Game model."""

    def setup_method(self):
        """Set up test fixtures."""
        self.game = Game.from_flat((2, 3), [[1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1]])

    def test_flat_order_player_one_slowest(self):
        """Test flat utilities follow lexicographic order with player 1 slowest."""
        assert self.game.utility_pure(0, (0, 2)) == 3.0
        assert self.game.utility_pure(0, (1, 0)) == 4.0
        assert self.game.utility_pure(1, (1, 2)) == 1.0
        assert self.game.flat_utilities()[0] == [1, 2, 3, 4, 5, 6]

    def test_shape_properties(self):
        """Test player and profile counts."""
        assert self.game.num_players == 2
        assert self.game.strategy_counts == (2, 3)
        assert self.game.num_profiles == 6
        assert self.game.profiles()[:3] == [(0, 0), (0, 1), (0, 2)]
        assert self.game.shape_label() == "2x3"

    def test_utility_pure_out_of_range(self):
        """Test out-of-range profiles and players raise InvalidProfileError."""
        with pytest.raises(InvalidProfileError):
            self.game.utility_pure(0, (2, 0))
        with pytest.raises(InvalidProfileError):
            self.game.utility_pure(2, (0, 0))
        with pytest.raises(IndexError):
            self.game.utility_pure(0, (0, 0, 0))

    def test_wrong_utility_length(self):
        """Test a flat array of the wrong length is rejected."""
        with pytest.raises(ShapeError):
            Game.from_flat((2, 2), [[1, 2, 3], [1, 2, 3, 4]])

    def test_zero_strategy_count(self):
        """Test a player without strategies is rejected."""
        with pytest.raises(ValueError):
            Game(np.zeros((2, 0, 2)))

    def test_utility_mixed_matches_pure_at_vertex(self):
        """Test mixed utility at a vertex equals the pure payoff."""
        x = MixedProfile.pure((2, 3), (1, 1))
        assert self.game.utility_mixed(0, x) == pytest.approx(5.0)
        assert self.game.utility_mixed(1, x) == pytest.approx(2.0)

    def test_utility_mixed_barycenter(self):
        """Test mixed utility at the barycenter is the payoff average."""
        x = MixedProfile.barycenter((2, 3))
        assert self.game.utility_mixed(0, x) == pytest.approx(3.5)

    def test_deviation_payoffs_three_players(self):
        """Test deviation payoffs contract every other player's mix."""
        payoffs = np.zeros((3, 2, 2, 2))
        payoffs[0, 1, 1, 1] = 8.0
        game = Game(payoffs)
        x = MixedProfile.from_weights([[0.5, 0.5], [0.25, 0.75], [0.5, 0.5]])
        dev = game.deviation_payoffs(0, x)
        assert dev.tolist() == pytest.approx([0.0, 8.0 * 0.75 * 0.5])

    def test_negate(self):
        """Test negation flips every payoff and keeps the shape."""
        neg = self.game.negate()
        assert neg.strategy_counts == self.game.strategy_counts
        assert neg.utility_pure(1, (0, 0)) == -6.0

    def test_restrict(self):
        """Test restriction re-indexes the subgame and translates back."""
        restricted = self.game.restrict(Subgame(((1,), (0, 2))))
        assert restricted.game.strategy_counts == (1, 2)
        assert restricted.game.utility_pure(0, (0, 1)) == 6.0
        assert restricted.to_parent((0, 1)) == (1, 2)
        assert restricted.to_local((1, 2)) == (0, 1)

    def test_restrict_invalid_subgame(self):
        """Test restricting to an out-of-range subgame fails."""
        with pytest.raises(InvalidSubgameError):
            self.game.restrict(Subgame(((0, 2), (0,))))

    def test_digest_is_stable(self):
        """Test equal games share a digest and different games do not."""
        same = Game.from_flat((2, 3), [[1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1]])
        assert self.game.digest() == same.digest()
        assert self.game.digest() != self.game.negate().digest()
        assert len(self.game.digest()) == 64

    def test_profile_label_uses_names(self):
        """Test profile labels use strategy names when present."""
        game = Game.from_bimatrix(
            [[1, 0], [0, 1]],
            [[1, 0], [0, 1]],
            strategy_names=[["U", "D"], ["L", "R"]],
        )
        assert game.profile_label((1, 0)) == "(D,L)"
        assert matching_pennies().profile_label((1, 0)) == "(1,0)"


class TestSubgame:
    """Test cases for Subgame."""

    def test_profiles_and_shape(self):
        """Test profile enumeration and shape."""
        y = Subgame(((0, 2), (1,)))
        assert y.shape == (2, 1)
        assert y.profiles() == [(0, 1), (2, 1)]
        assert y.contains((2, 1))
        assert not y.contains((1, 1))

    def test_subsets_are_sorted(self):
        """Test strategy subsets are normalized to sorted tuples."""
        assert Subgame(((2, 0), (1, 1))).strategy_subsets == ((0, 2), (1,))

    def test_empty_subset_rejected(self):
        """Test an empty strategy subset is invalid."""
        with pytest.raises(InvalidSubgameError):
            Subgame(((0,), ()))

    def test_is_within(self):
        """Test subgame inclusion."""
        assert Subgame(((0,), (1,))).is_within(Subgame(((0, 1), (0, 1))))
        assert not Subgame(((2,), (1,))).is_within(Subgame(((0, 1), (0, 1))))

    def test_full(self):
        """Test the full subgame covers every profile."""
        assert len(Subgame.full((2, 3, 2)).profiles()) == 12


class TestMixedProfile:
    """Test cases for MixedProfile."""

    def test_rejects_bad_sums(self):
        """Test distributions must sum to one."""
        with pytest.raises(ParameterError):
            MixedProfile.from_weights([[0.5, 0.4]], normalize=False)

    def test_rejects_negative_entries(self):
        """Test negative probabilities are rejected."""
        with pytest.raises(ParameterError):
            MixedProfile.from_weights([[1.5, -0.5]], normalize=False)

    def test_from_weights_normalizes(self):
        """Test weights are rescaled per player."""
        x = MixedProfile.from_weights([[1, 3], [2, 2, 4]])
        assert x.dists[0].tolist() == [0.25, 0.75]
        assert x.dists[1].tolist() == [0.25, 0.25, 0.5]

    def test_from_flat_wrong_length(self):
        """Test a flat vector must match the strategy counts."""
        with pytest.raises(ShapeError):
            MixedProfile.from_flat((2, 2), [0.5, 0.5, 1.0])

    def test_support(self):
        """Test support drops coordinates at or below the threshold."""
        x = MixedProfile.from_weights([[0.5, 0.5, 0.0], [1.0, 0.0]])
        assert x.support() == Subgame(((0, 1), (0,)))

    def test_content_membership(self):
        """Test content membership needs every spanned profile inside the set."""
        h = profile_set([(0, 0), (1, 0), (0, 1)])
        assert MixedProfile.from_weights([[0.5, 0.5], [1, 0]]).content_membership(h)
        assert not MixedProfile.from_weights([[0.5, 0.5], [0.5, 0.5]]).content_membership(h)

    def test_content_mass(self):
        """Test content mass sums the product distribution over the set."""
        x = MixedProfile.from_weights([[0.5, 0.5], [0.5, 0.5]])
        h = profile_set([(0, 0), (1, 0), (0, 1)])
        assert x.content_mass(h) == pytest.approx(0.75)

    def test_product_distribution_shape(self):
        """Test the product distribution matches the payoff grid."""
        z = MixedProfile.barycenter((2, 3, 2)).product_distribution()
        assert z.shape == (2, 3, 2)
        assert z.sum() == pytest.approx(1.0)

    def test_barycenter_of_subgame(self):
        """Test the barycenter of a subgame is uniform on its strategies only."""
        x = MixedProfile.barycenter((3, 2), Subgame(((0, 2), (1,))))
        assert x.dists[0].tolist() == [0.5, 0.0, 0.5]
        assert x.dists[1].tolist() == [0.0, 1.0]

    def test_random_is_seeded(self):
        """Test random profiles are reproducible from the seed."""
        a = MixedProfile.random((3, 3), np.random.default_rng(5))
        b = MixedProfile.random((3, 3), np.random.default_rng(5))
        assert a == b

    def test_distance_is_sup_norm(self):
        """Test distance is the largest coordinate difference."""
        x = MixedProfile.from_weights([[0.5, 0.5], [1, 0]])
        y = MixedProfile.from_weights([[0.25, 0.75], [0.9, 0.1]])
        assert x.distance(y) == pytest.approx(0.25)

    def test_embed_and_project(self):
        """Test embedding into a parent game and projecting back."""
        restricted = Game(np.zeros((2, 3, 3))).restrict(Subgame(((0, 2), (1, 2))))
        local = MixedProfile.from_weights([[0.3, 0.7], [0.6, 0.4]])
        full = restricted.embed(local)
        assert full.dists[0].tolist() == pytest.approx([0.3, 0.0, 0.7])
        assert restricted.project(full).flat.tolist() == pytest.approx(local.flat.tolist())


class TestGameFile:
    """Test cases for the GameFile schema."""

    def test_round_trip(self):
        """Test GameFile reproduces the game."""
        game = matching_pennies()
        assert GameFile.from_game(game).to_game() == game

    def test_counts_mismatch(self):
        """Test mismatched players and counts are schema errors."""
        with pytest.raises(ValueError):
            GameFile(players=2, strategy_counts=[2], utilities=[[1, 2], [1, 2]])

    def test_non_finite_utilities(self):
        """Test non-finite utilities are rejected."""
        with pytest.raises(ValueError):
            GameFile(
                players=1,
                strategy_counts=[2],
                utilities=[[1.0, float("nan")]],
            )
