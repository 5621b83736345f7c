"""Scripted structural and numerical checks for the named games."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from ..errors import PreconditionError
from ..models.dynamics import ConnectionEvidence, StopCondition
from ..models.game import Game, MixedProfile, ProfileSet, Subgame
from ..models.graph import PreferenceGraph
from ..models.named_game import NamedGame, VerificationResult
from ..utils.analysis_config import AnalysisConfig
from .corpus import (
    DOMINANCE_LIMIT,
    GADGET_SUBGAME,
    RELAY_FACE,
    TRANSPOSED_SUBGAME,
    classify_gadget,
    get_named_game,
)
from .dynamics import (
    ReplicatorSimulator,
    bisect_connection,
    estimate_omega_limit,
    follow_chain,
    integrate,
    mix,
    product_matrix,
)
from .equilibria import fixed_point_2x2, is_quasi_strict_nash
from .local_sources import escape_start, find_local_sources, subgame_source_check
from .preference_graph import build_graph
from .stability import find_cavities, is_pseudoconvex_sink, lyapunov_zH_derivative, sample_near_content

logger = logging.getLogger(__name__)

ESCAPE_DELTA = 1e-4
ESCAPE_LEVEL = 0.99
ESCAPE_HORIZON = 60.0
LYAPUNOV_EPSILON = 1e-3
LYAPUNOV_SAMPLES = 100
DIAGONAL_SAMPLES = 1000
CONNECTION_OFFSET = 1e-4
CHAIN_NUDGE = 1e-2


def _structural_checks(named: NamedGame, pg: PreferenceGraph, result: VerificationResult) -> None:
    expected = named.expected
    actual = {(arc.tail, arc.head) for arc in pg.arcs()}
    if expected.arcs:
        if expected.arcs_complete:
            result.add("arc set matches", actual == expected.arcs, f"{len(actual)} arcs")
        else:
            missing = expected.arcs - actual
            result.add(
                "drawn arcs present",
                not missing,
                f"{len(expected.arcs) - len(missing)}/{len(expected.arcs)} drawn arcs",
            )

    sinks = pg.sink_equilibria()
    if expected.sinks:
        result.add(
            "sink equilibria",
            {s.profiles for s in sinks} == set(expected.sinks),
            f"{len(sinks)} sinks of sizes {[s.size for s in sinks]}",
        )
    for p, q in expected.no_path:
        result.add(
            f"no path {named.game.profile_label(p)} -> {named.game.profile_label(q)}",
            not pg.has_path(p, q),
        )
    if expected.cavity_kinds:
        kinds = {c.kind for s in sinks for c in find_cavities(pg, s)}
        result.add("cavity kinds", kinds == expected.cavity_kinds, ", ".join(sorted(kinds)))
    if expected.pseudoconvex is not None:
        verdict = all(is_pseudoconvex_sink(pg, s).verdict for s in sinks)
        result.add("pseudoconvex", verdict == expected.pseudoconvex, f"verdict {verdict}")


def _escape_check(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    certs = [
        c
        for s in pg.sink_equilibria()
        for c in find_local_sources(named.game, pg, s, config.nash_tol, config.support_threshold)
    ]
    if not certs:
        result.add("escape from local source", False, "no certificate")
        return
    cert = certs[0]
    h = next(s for s in pg.sink_equilibria() if s.id == cert.sink_id)
    tr = integrate(
        named.game,
        escape_start(cert, ESCAPE_DELTA),
        t_max=ESCAPE_HORIZON,
        step=config.evidence_step,
        observe={"H": h.profiles},
    )
    low = float(tr.observables["content:H"].min())
    result.add(
        f"escape from {cert.family} local source",
        low < ESCAPE_LEVEL,
        f"content mass falls to {low:.4f}",
    )


def _verify_shapley(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    (sink,) = pg.sink_equilibria()
    weights = [arc.weight for arc in pg.arcs() if arc.tail in sink.profiles and arc.head in sink.profiles]
    result.add(
        "cycle arc weights equal 1",
        len(weights) == 6 and all(abs(w - 1.0) <= config.tie_tol for w in weights),
        f"weights {sorted(set(weights))}",
    )
    certs = find_local_sources(named.game, pg, sink, config.nash_tol, config.support_threshold)
    result.add("no local sources in searched families", not certs)

    rng = np.random.default_rng(0)
    matrix = product_matrix(named.game)
    rates = [
        lyapunov_zH_derivative(
            named.game,
            sink,
            sample_near_content(named.game, sink, LYAPUNOV_EPSILON, rng),
            matrix,
        )
        for _ in range(LYAPUNOV_SAMPLES)
    ]
    result.add(
        "content mass increases near content(H)",
        min(rates) > 0,
        f"min derivative {min(rates):.3g} over {LYAPUNOV_SAMPLES} samples",
    )


def _verify_cog(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    (sink,) = pg.sink_equilibria()
    a = named.profile("a")
    certs = find_local_sources(named.game, pg, sink, config.nash_tol, config.support_threshold)
    at_a = [c for c in certs if c.family == "pure" and c.mixed_profile().support().profiles() == [a]]
    result.add("local source at a", bool(at_a), f"{len(certs)} certificates")
    _escape_check(named, pg, config, result)


def diagonal_point(w: float) -> MixedProfile:
    """Every player plays strategy 1 with probability w inside the 2x2x2 subgame."""
    return MixedProfile.from_weights([[1 - w, w, 0.0], [1 - w, w, 0.0], [1 - w, w]])


def _verify_three_player(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    a, b = named.profile("a"), named.profile("b")
    sub = pg.induced_subgraph(Subgame(((0, 1), (0, 1), (0, 1))))
    result.add("a is a source and b a sink of the 2x2x2 subgame", sub.is_source(a) and sub.is_sink(b))

    sim = ReplicatorSimulator(named.game)
    rng = np.random.default_rng(1)
    worst = 0.0
    for w in rng.uniform(0.0, 1.0, DIAGONAL_SAMPLES):
        velocity = sim.field(diagonal_point(w).flat)
        expected = w * (1 - w) * (2 * w - 1) ** 2
        worst = max(worst, abs(velocity[1] - expected), abs(velocity[4] - expected), abs(velocity[7] - expected))
    result.add("diagonal field is w(1-w)(2w-1)^2", worst <= 1e-10, f"max error {worst:.3g}")

    tr = integrate(named.game, diagonal_point(0.2), t_max=10.0, step=config.evidence_step)
    spread = float(np.max(np.abs(tr.states[:, [1, 4, 7]] - tr.states[:, [1]])))
    result.add("diagonal stays invariant", spread <= 1e-8, f"max spread {spread:.3g}")

    x_hat = diagonal_point(0.5)
    target = MixedProfile.pure(named.game.strategy_counts, b)
    chain = follow_chain(
        named.game,
        diagonal_point(0.01),
        [x_hat, target],
        radius=[config.evidence_radius, 1e-3],
        step=config.evidence_step,
        t_max=config.t_max,
    )
    detail = "; ".join(f"leg {leg.waypoint}: {leg.closest:.3g} at t={leg.time:.4g}" for leg in chain.legs)
    result.add("flow from near a reaches b through x_hat", chain.complete, detail)


def _verify_gadget(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    cls = classify_gadget(named.game, config.tie_tol)
    result.add(
        "exactly one of x_hat, y_hat is quasi-strict Nash",
        cls.exactly_one_nash,
        f"x_hat {cls.x_hat_nash}, y_hat {cls.y_hat_nash}",
    )
    result.add(
        "row-mass rule picks the Nash point",
        cls.nash_point == cls.rule_prediction,
        f"x_hat row {cls.x_hat_row:.4g}, y_hat row {cls.y_hat_row:.4g}",
    )
    if not cls.exactly_one_nash:
        return
    evidence = gadget_connection(named, cls.non_nash, config)
    result.add(
        "flow from the non-Nash point passes near the Nash one",
        evidence.bracketed and evidence.closest <= config.evidence_radius,
        f"closest {evidence.closest:.3g} after {evidence.iterations} bisections",
    )


def boundary_connection(
    game: Game,
    start: MixedProfile,
    target: MixedProfile,
    along: Sequence[Sequence[float]],
    transversal: tuple[int, int],
    sinks: tuple[ProfileSet, ProfileSet],
    config: AnalysisConfig,
    offset: float = CONNECTION_OFFSET,
) -> ConnectionEvidence:
    """
    Bisect a half-circle of starts around a non-Nash fixed point on which sink captures them.

    At theta = 0 and theta = 1 the start moves offset along +along and -along,
    a direction inside the fixed point's face. In between it also moves mass
    onto the unused strategy transversal = (player, strategy), the direction
    in which the point is not Nash.
    """
    player, strategy = transversal
    along_arr = [np.asarray(d, dtype=float) for d in along]
    across = [np.zeros_like(d) for d in start.dists]
    across[player] = -start.dists[player]
    across[player][strategy] += 1.0

    def family(theta: float) -> MixedProfile:
        angle = math.pi * theta
        sin = 0.0 if theta in (0.0, 1.0) else math.sin(angle)
        return MixedProfile.from_weights(
            [
                np.clip(d + offset * (math.cos(angle) * a + sin * t), 0.0, None)
                for d, a, t in zip(start.dists, along_arr, across)
            ],
        )

    return bisect_connection(
        game,
        family,
        target,
        sinks,
        step=config.evidence_step,
        radius=config.evidence_radius,
    )


def gadget_connection(
    named: NamedGame, start: MixedProfile, config: AnalysisConfig, offset: float = CONNECTION_OFFSET
) -> ConnectionEvidence:
    """Connection from a gadget's non-Nash fixed point toward the other one."""
    cls = classify_gadget(named.game, config.tie_tol)
    unused = int(np.flatnonzero(start.dists[1] == 0.0)[0])
    if unused == 2:
        along, target = [[-1.0, 1.0], [1.0, -1.0, 0.0]], cls.y_hat
    else:
        along, target = [[1.0, -1.0], [0.0, 1.0, -1.0]], cls.x_hat
    sinks = (
        frozenset([named.profile("s1")]),
        frozenset([named.profile("d"), named.profile("s2")]),
    )
    return boundary_connection(named.game, start, target, along, (1, unused), sinks, config, offset)


def two_player_waypoints(named: NamedGame, config: AnalysisConfig) -> dict[str, MixedProfile]:
    """x_hat and y_hat of the first gadget copy and z_hat of the second, in the 4x5 game."""
    game = named.game
    cls = classify_gadget(game.restrict(GADGET_SUBGAME).game, config.tie_tol)
    first = game.restrict(GADGET_SUBGAME)
    z_hat = fixed_point_2x2(game, RELAY_FACE, config.tie_tol)
    if z_hat is None:
        raise PreconditionError("The relay face has no interior fixed point")
    return {
        "x_hat": first.embed(cls.x_hat),
        "y_hat": first.embed(cls.y_hat),
        "z_hat": z_hat,
    }


def _verify_two_player(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    game = named.game
    counts = game.strategy_counts
    a = named.profile("a")
    h_a = next(s for s in pg.sink_equilibria() if a in s.profiles)
    certs = find_local_sources(game, pg, h_a, config.nash_tol, config.support_threshold)
    at_a = [c for c in certs if c.family == "pure" and c.mixed_profile().support().profiles() == [a]]
    result.add("a is a pure local source of H_a", bool(at_a), f"{len(certs)} certificates")
    if not at_a:
        return
    points = two_player_waypoints(named, config)
    x_hat, y_hat, z_hat = points["x_hat"], points["y_hat"], points["z_hat"]

    tr = integrate(
        game,
        escape_start(at_a[0], ESCAPE_DELTA),
        t_max=ESCAPE_HORIZON,
        step=config.evidence_step,
        stop=StopCondition.near(x_hat, radius=config.evidence_radius),
        observe={"H_a": h_a.profiles},
    )
    low = float(tr.observables["content:H_a"].min())
    result.add(
        "flow from a leaves content(H_a) and reaches x_hat",
        low < ESCAPE_LEVEL and tr.stop_reason == "near:0",
        f"content mass falls to {low:.4f}, stop {tr.stop_reason} at t={tr.final_time:.4g}",
    )

    x_check = subgame_source_check(game, GADGET_SUBGAME, x_hat, config.nash_tol, config.support_threshold)
    result.add("x_hat is a source of the first gadget copy", x_check.verdict)
    first, transposed = game.restrict(GADGET_SUBGAME), game.restrict(TRANSPOSED_SUBGAME)
    y_first = is_quasi_strict_nash(first.game, first.project(y_hat), config.nash_tol)
    y_second = is_quasi_strict_nash(transposed.game, transposed.project(y_hat), config.nash_tol)
    z_second = is_quasi_strict_nash(transposed.game, transposed.project(z_hat), config.nash_tol)
    result.add(
        "y_hat Nash in the first copy only, z_hat Nash in the second",
        y_first.verdict and not y_second.is_nash and z_second.verdict,
        f"y_hat {y_first.verdict}/{y_second.verdict}, z_hat {z_second.verdict}",
    )

    s1, s2, d = named.profile("s1"), named.profile("s2"), named.profile("d")
    first_leg = boundary_connection(
        game,
        x_hat,
        y_hat,
        [[-1.0, 1.0, 0.0, 0.0], [1.0, -1.0, 0.0, 0.0, 0.0]],
        (1, 2),
        (frozenset([s1]), frozenset([d, s2])),
        config,
    )
    result.add(
        "flow from x_hat passes near y_hat",
        first_leg.bracketed and first_leg.closest <= config.evidence_radius,
        f"closest {first_leg.closest:.3g} after {first_leg.iterations} bisections",
    )
    second_leg = boundary_connection(
        game,
        y_hat,
        z_hat,
        [[1.0, -1.0, 0.0, 0.0], [0.0, 1.0, -1.0, 0.0, 0.0]],
        (0, 2),
        (frozenset([s1]), frozenset([s2])),
        config,
    )
    result.add(
        "flow from y_hat passes near z_hat",
        second_leg.bracketed and second_leg.closest <= config.evidence_radius,
        f"closest {second_leg.closest:.3g} after {second_leg.iterations} bisections",
    )

    c = MixedProfile.pure(counts, named.profile("c"))
    b = MixedProfile.pure(counts, named.profile("b"))
    chain = follow_chain(
        game,
        mix(z_hat, c, CHAIN_NUDGE),
        [c, b],
        radius=[1e-3, 1e-3],
        nudge=CHAIN_NUDGE,
        step=config.evidence_step,
        t_max=config.t_max,
    )
    detail = "; ".join(f"leg {leg.waypoint}: {leg.closest:.3g} at t={leg.time:.4g}" for leg in chain.legs)
    result.add("flow from z_hat reaches b through c", chain.complete, detail)


def _verify_dominance(
    named: NamedGame,
    pg: PreferenceGraph,
    config: AnalysisConfig,
    result: VerificationResult,
) -> None:
    sccs = pg.scc_decomposition()
    result.add("single SCC covering all profiles", len(sccs) == 1 and len(sccs[0]) == 6)
    start = MixedProfile.barycenter(named.game.strategy_counts)
    tr = integrate(named.game, start, t_max=50.0, step=config.evidence_step)
    last = float(tr.final_state.dists[1][2])
    result.add("dominated column mass below 1e-4", last < 1e-4, f"{last:.3g} at t={tr.final_time:g}")
    limit = estimate_omega_limit(tr, 0.5, config.omega_floor)
    result.add("omega-limit support is the 2x2 subgame", limit == DOMINANCE_LIMIT, str(sorted(limit)))


VERIFIERS: dict[str, Callable] = {
    "shapley": _verify_shapley,
    "cog_fig2": _verify_cog,
    "three_player_fig3": _verify_three_player,
    "two_player_fig4": _verify_two_player,
    "gadget_2x3_fig4b": _verify_gadget,
    "dominance_fig6": _verify_dominance,
}


def verify_named_game(game_id: str, config: AnalysisConfig | None = None) -> VerificationResult:
    """
    Run every structural and numerical check scripted for a named game.

    Raises:
        ParameterError: If the id is unknown
    """
    config = config or AnalysisConfig()
    named = get_named_game(game_id)
    pg = build_graph(named.game, config.tie_tol)
    result = VerificationResult(game_id)
    _structural_checks(named, pg, result)
    VERIFIERS[game_id](named, pg, config, result)
    for check in result.checks:
        logger.info(f"{game_id}: {check.name}: {'pass' if check.passed else 'FAIL'} {check.detail}")
    return result
