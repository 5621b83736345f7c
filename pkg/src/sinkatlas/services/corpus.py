"""Named counterexample games and random game families."""

import logging
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ConstructionError, GenericityError, ParameterError
from ..models.game import Game, ProfileSet, PureProfile, Subgame, profile_set
from ..models.named_game import ExpectedStructure, GadgetClassification, NamedGame
from .equilibria import fixed_point_2x2, is_quasi_strict_nash
from .preference_graph import build_graph

logger = logging.getLogger(__name__)

GAME_CLASSES: tuple[str, ...] = ("generic", "zero_sum", "potential")


def _arcs(pairs: str) -> frozenset[tuple[PureProfile, PureProfile]]:
    """Parse arcs written as 'tail>head' tokens of digits, e.g. '200>000 00>10'."""
    result = set()
    for token in pairs.split():
        tail, head = token.split(">")
        result.add((tuple(int(c) for c in tail), tuple(int(c) for c in head)))
    return frozenset(result)


def _verify_structure(named: NamedGame) -> NamedGame:
    """Check a freshly built game against its expected arcs and sinks."""
    pg = build_graph(named.game)
    expected = named.expected
    actual = {(arc.tail, arc.head) for arc in pg.arcs()}
    missing = expected.arcs - actual
    if missing:
        raise ConstructionError(
            f"{named.id}: expected arcs missing from the built game: {sorted(missing)[:5]}",
        )
    if expected.arcs_complete and expected.arcs and actual != expected.arcs:
        extra = sorted(actual - expected.arcs)
        raise ConstructionError(f"{named.id}: unexpected arcs in the built game: {extra[:5]}")
    if expected.sinks:
        try:
            sinks = {s.profiles for s in pg.sink_equilibria()}
        except GenericityError as e:
            raise ConstructionError(f"{named.id}: built game is degenerate: {e}")
        if sinks != set(expected.sinks):
            raise ConstructionError(f"{named.id}: sink equilibria differ from the expected ones")
    logger.debug(f"Verified structure of {named.id}: {len(actual)} arcs")
    return named


def make_shapley() -> NamedGame:
    """Shapley's 3x3 game; the off-diagonal profiles form a 6-cycle of unit weights."""
    a = [[1.0 if r == (c + 2) % 3 else -1.0 if r == c else 0.0 for c in range(3)] for r in range(3)]
    b = [[1.0 if c == (r + 2) % 3 else -1.0 if c == r else 0.0 for c in range(3)] for r in range(3)]
    game = Game.from_bimatrix(a, b)
    cycle = profile_set([(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)])
    arcs = _arcs(
        "00>10 00>20 10>20 11>21 11>01 21>01 22>02 22>12 02>12 "
        "00>01 00>02 01>02 11>12 11>10 12>10 22>20 22>21 20>21",
    )
    return _verify_structure(
        NamedGame(
            id="shapley",
            description=DESCRIPTIONS["shapley"],
            game=game,
            expected=ExpectedStructure(
                arcs=arcs,
                sinks=(cycle,),
                cavity_kinds=frozenset({"one-in-one-out"}),
                pseudoconvex=True,
            ),
        ),
    )


def make_cog() -> NamedGame:
    """Symmetric 3x3 game whose seven-profile sink has a local source at a = (0, 0)."""
    u1 = np.array([[0, 1, 1], [1, 0, 0], [-1, 2, -1]], dtype=float)
    game = Game.from_bimatrix(u1, u1.T)
    sink = profile_set([(0, 0), (1, 0), (0, 1), (1, 2), (0, 2), (2, 1), (2, 0)])
    arcs = _arcs(
        "20>00 20>10 00>10 11>01 11>21 01>21 22>12 22>02 12>02 "
        "02>00 02>01 00>01 11>10 11>12 10>12 22>21 22>20 21>20",
    )
    return _verify_structure(
        NamedGame(
            id="cog_fig2",
            description=DESCRIPTIONS["cog_fig2"],
            game=game,
            expected=ExpectedStructure(
                arcs=arcs,
                sinks=(sink,),
                cavity_kinds=frozenset({"local-source", "one-in-one-out", "two-in"}),
                pseudoconvex=False,
            ),
            labels={"a": (0, 0)},
        ),
    )


# Player payoffs of the three-player game, one line of strategies per context.
# u1 is indexed by (t, k) over s, u2 by (s, k) over t, u3 by (s, t) over k.
_THREE_PLAYER_U1 = {
    (0, 0): (0, 1, -1), (1, 0): (1, 0, 2), (2, 0): (1, 0, -1),
    (0, 1): (1, 0, 2), (1, 1): (0, 1, 0.5), (2, 1): (0, 1, -1),
}
_THREE_PLAYER_U2 = {
    (0, 0): (0, 1, -1), (1, 0): (1, 0, 2), (2, 0): (1, 0, -1),
    (0, 1): (1, 0, -1), (1, 1): (0, 1, -1), (2, 1): (1, 0, -1),
}
_THREE_PLAYER_U3 = {
    (0, 0): (0, 1), (1, 0): (1, 0), (0, 1): (1, 0), (1, 1): (0, 1), (2, 0): (1, 0),
    (0, 2): (1, 0), (1, 2): (1, 0), (2, 1): (1, 0), (2, 2): (0, 1),
}  # fmt: skip


def make_three_player() -> NamedGame:
    """
    3x3x2 game with sinks H_a and H_b = {b} and no path from a to b.

    On the 2x2x2 subgame every player gets 1 when an odd number of players
    choose strategy 1 and 0 otherwise, so a = (0,0,0) is a source and
    b = (1,1,1) a sink there.
    """
    payoffs = np.zeros((3, 3, 3, 2))
    for (t, k), line in _THREE_PLAYER_U1.items():
        payoffs[0, :, t, k] = line
    for (s, k), line in _THREE_PLAYER_U2.items():
        payoffs[1, s, :, k] = line
    for (s, t), line in _THREE_PLAYER_U3.items():
        payoffs[2, s, t, :] = line
    game = Game(payoffs)

    h_a = profile_set(
        [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 2, 0),
         (0, 2, 0), (2, 1, 0), (2, 0, 0), (2, 0, 1)],
    )  # fmt: skip
    h_b = profile_set([(1, 1, 1)])
    arcs = _arcs(
        "200>000 200>100 000>100 110>010 110>210 010>210 220>120 220>020 120>020 "
        "101>001 101>201 001>201 011>211 011>111 211>111 221>021 221>121 021>121 "
        "020>000 020>010 000>010 110>100 110>120 100>120 220>210 220>200 210>200 "
        "021>011 021>001 011>001 121>101 121>111 101>111 221>211 221>201 211>201 "
        "000>001 101>100 011>010 110>111 201>200 021>020 121>120 211>210 220>221",
    )
    return _verify_structure(
        NamedGame(
            id="three_player_fig3",
            description=DESCRIPTIONS["three_player_fig3"],
            game=game,
            expected=ExpectedStructure(
                arcs=arcs,
                sinks=(h_a, h_b),
                no_path=(((0, 0, 0), (1, 1, 1)),),
            ),
            labels={"a": (0, 0, 0), "b": (1, 1, 1)},
        ),
    )


THREE_PLAYER_SUBGAME = Subgame(((0, 1), (0, 1), (0, 1)))


class GadgetWeights(BaseModel):
    """
    Payoff parameters of the 2x3 gadget.

    Row-player gains: row 1 beats row 0 by row_gains[0] in column 0, row 0 beats
    row 1 by row_gains[1] in column 1, row 1 beats row 0 by row_gains[2] in
    column 2. Column payoffs must order top: c1 > c0 > c2 and bottom: c2 > c0 > c1.
    """

    row_gains: tuple[float, float, float] = Field(default=(1.0, 1.0, 1.0))
    top: tuple[float, float, float] = Field(default=(1.0, 2.0, 0.0))
    bottom: tuple[float, float, float] = Field(default=(1.0, 0.0, 3.0))


GADGET_LABELS: dict[str, PureProfile] = {
    "r1": (0, 2),
    "r2": (1, 1),
    "s1": (0, 1),
    "s2": (1, 2),
    "a": (0, 0),
    "d": (1, 0),
}

GADGET_ARCS = _arcs("00>10 11>01 02>12 02>00 00>01 02>01 11>10 10>12 11>12")


def gadget_payoffs(weights: GadgetWeights) -> tuple[list[list[float]], list[list[float]]]:
    g0, g1, g2 = weights.row_gains
    if min(weights.row_gains) <= 0:
        raise ConstructionError("Gadget row gains must all be positive")
    t0, t1, t2 = weights.top
    b0, b1, b2 = weights.bottom
    if not t1 > t0 > t2:
        raise ConstructionError("Gadget top row must order column payoffs c1 > c0 > c2")
    if not b2 > b0 > b1:
        raise ConstructionError("Gadget bottom row must order column payoffs c2 > c0 > c1")
    rows = [[0.0, g1, 0.0], [g0, 0.0, g2]]
    cols = [list(weights.top), list(weights.bottom)]
    return rows, cols


def classify_gadget(game: Game, tie_tol: float = 1e-12) -> GadgetClassification:
    """
    Locate the two boundary fixed points of a 2x3 gadget and test both for Nash.

    x_hat mixes columns {0, 1}, y_hat mixes columns {1, 2}; the row player mixes
    in both. Exactly one is a Nash equilibrium, the one with more top-row mass.
    """
    if game.strategy_counts != (2, 3):
        raise ConstructionError(f"A gadget is a 2x3 game, got {game.shape_label()}")
    try:
        x_hat = fixed_point_2x2(game, Subgame(((0, 1), (0, 1))), tie_tol)
        y_hat = fixed_point_2x2(game, Subgame(((0, 1), (1, 2))), tie_tol)
    except GenericityError as e:
        raise ConstructionError(f"Gadget is degenerate: {e}")
    if x_hat is None or y_hat is None:
        raise ConstructionError("Gadget lacks an interior fixed point on one of its faces")
    if abs(x_hat.dists[0][0] - y_hat.dists[0][0]) <= tie_tol:
        raise ConstructionError("Gadget fixed points share their row mix; the game is not generic")
    return GadgetClassification(
        x_hat=x_hat,
        y_hat=y_hat,
        x_hat_nash=is_quasi_strict_nash(game, x_hat).verdict,
        y_hat_nash=is_quasi_strict_nash(game, y_hat).verdict,
    )


def make_gadget_2x3(weights: GadgetWeights | None = None) -> NamedGame:
    """The 2x3 gadget: sources r1, r2, sinks s1, s2 and boundary fixed points x_hat, y_hat."""
    weights = weights or GadgetWeights()
    rows, cols = gadget_payoffs(weights)
    game = Game.from_bimatrix(rows, cols)
    named = _verify_structure(
        NamedGame(
            id="gadget_2x3_fig4b",
            description=DESCRIPTIONS["gadget_2x3_fig4b"],
            game=game,
            expected=ExpectedStructure(arcs=GADGET_ARCS),
            labels=dict(GADGET_LABELS),
        ),
    )
    classify_gadget(game)
    return named


# Rows {0, 1} x columns {0, 1, 2} hold the default gadget. Rows {0, 1, 2} x
# columns {1, 2} hold a transposed copy whose extra row 2 beats the gadget's
# Nash point and leads on to c = (2, 2) and b = (2, 4).
_FIG4_U1 = [
    [0, 1, 0, 0, 0],
    [1, 0, 1, 1, 1],
    [-2, 0.75, 0.75, -1, 2],
    [-1, -1, -1, 2, -1],
]
_FIG4_U2 = [
    [1, 2, 0, 3, -1],
    [1, 0, 3, 4, -1],
    [-1, 0, 1, 0.5, 2],
    [2, 0, -0.5, 1, -1],
]

GADGET_SUBGAME = Subgame(((0, 1), (0, 1, 2)))
TRANSPOSED_SUBGAME = Subgame(((0, 1, 2), (1, 2)))
# Face of the transposed copy holding its Nash point z_hat
RELAY_FACE = Subgame(((0, 2), (1, 2)))


def make_two_player() -> NamedGame:
    """
    4x5 game composed of two gadget copies sharing the face of y_hat.

    Sinks: H_a, eight profiles around a that avoid the gadget sources, and
    H_b = {b}, a strict pure equilibrium with no path from a. Flow escaping a
    passes x_hat, y_hat (Nash in the first copy, not in the second), z_hat and
    c before settling at b. Only the drawn arcs are compared; the remaining
    arcs follow from the payoffs.
    """
    game = Game.from_bimatrix(_FIG4_U1, _FIG4_U2)
    h_a = profile_set(
        [(0, 0), (1, 0), (0, 1), (1, 2), (0, 3), (1, 3), (3, 3), (3, 0)],
    )
    h_b = profile_set([(2, 4)])
    drawn = GADGET_ARCS | _arcs(
        "11>21 21>01 21>22 02>22 22>12 22>24 01>03 12>13 03>13 13>33 33>30 30>00 30>10",
    )
    labels = dict(GADGET_LABELS)
    labels.update({"a'": (2, 1), "c": (2, 2), "b": (2, 4)})
    return _verify_structure(
        NamedGame(
            id="two_player_fig4",
            description=DESCRIPTIONS["two_player_fig4"],
            game=game,
            expected=ExpectedStructure(
                arcs=drawn,
                arcs_complete=False,
                sinks=(h_a, h_b),
                no_path=(((0, 0), (2, 4)),),
            ),
            labels=labels,
        ),
    )


def make_dominance_2x3() -> NamedGame:
    """2x3 game with one SCC; column 1 beats column 2 by exactly one in every row."""
    game = Game.from_bimatrix([[1, 0, 0], [0, 1, 1]], [[0, 2, 1], [2, 1, 0]])
    arcs = _arcs("10>00 01>11 02>12 00>01 00>02 02>01 11>10 12>10 12>11")
    return _verify_structure(
        NamedGame(
            id="dominance_fig6",
            description=DESCRIPTIONS["dominance_fig6"],
            game=game,
            expected=ExpectedStructure(arcs=arcs, sinks=(game.all_profiles(),)),
        ),
    )


DOMINANCE_LIMIT: ProfileSet = profile_set([(0, 0), (0, 1), (1, 0), (1, 1)])

CORPUS: dict[str, Callable[[], NamedGame]] = {
    "shapley": make_shapley,
    "cog_fig2": make_cog,
    "three_player_fig3": make_three_player,
    "two_player_fig4": make_two_player,
    "gadget_2x3_fig4b": make_gadget_2x3,
    "dominance_fig6": make_dominance_2x3,
}

DESCRIPTIONS: dict[str, str] = {
    "shapley": "Shapley's 3x3 game: unique 6-cycle sink, pseudoconvex",
    "cog_fig2": "3x3 game whose sink has a local source at a",
    "three_player_fig3": "3x3x2 game: two sinks, no a->b path, flow from a reaches b",
    "two_player_fig4": "4x5 game of two composed gadgets: two sinks, flow from a reaches b",
    "gadget_2x3_fig4b": "2x3 gadget with two boundary fixed points, exactly one Nash",
    "dominance_fig6": "2x3 strongly connected game with a strictly dominated column",
}


def corpus_ids() -> list[str]:
    return list(CORPUS)


def get_named_game(game_id: str) -> NamedGame:
    """Build a corpus game by id."""
    try:
        factory = CORPUS[game_id]
    except KeyError:
        raise ParameterError(
            f"Unknown game id {game_id!r}; known ids: {', '.join(CORPUS)}",
        )
    return factory()


def parse_shape(text: str) -> tuple[int, ...]:
    """Parse '3x3' or '2x2x2' into strategy counts."""
    try:
        shape = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ParameterError(f"Shape must look like 3x3 or 2x2x2, got {text!r}")
    if not shape or any(m < 1 for m in shape):
        raise ParameterError(f"Every strategy count must be at least 1, got {text!r}")
    return shape


def random_game(shape: Sequence[int], game_class: str, seed: int) -> Game:
    """
    Deterministic random game of the given shape and class.

    generic: independent standard normal payoffs. zero_sum: two players with
    u_2 = -u_1. potential: every player's payoff equals one shared random
    potential, so the preference graph is acyclic.
    """
    shape = tuple(int(m) for m in shape)
    if not shape or any(m < 1 for m in shape):
        raise ParameterError(f"Invalid shape {shape}")
    if game_class not in GAME_CLASSES:
        raise ParameterError(
            f"Unknown game class {game_class!r}; expected one of {', '.join(GAME_CLASSES)}",
        )
    rng = np.random.default_rng(seed)
    n = len(shape)
    if game_class == "generic":
        payoffs = rng.standard_normal((n, *shape))
    elif game_class == "zero_sum":
        if n != 2:
            raise ParameterError(f"zero_sum games need exactly 2 players, got {n}")
        u1 = rng.standard_normal(shape)
        payoffs = np.stack([u1, -u1])
    else:
        potential = rng.standard_normal(shape)
        payoffs = np.stack([potential] * n)
    return Game(payoffs)
