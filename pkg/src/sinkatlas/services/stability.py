"""Cavities, pseudoconvexity and the Lyapunov derivative of a sink's content mass."""

import itertools
import logging
from collections.abc import Iterator

import numpy as np

from ..errors import GenericityError, ParameterError, PreconditionError
from ..models.dynamics import ProductMatrix
from ..models.game import Game, MixedProfile, ProfileSet, PureProfile
from ..models.graph import PreferenceGraph, SinkEquilibrium
from ..models.stability import Cavity, CavityKind, CavityVerdict, PseudoconvexityReport
from .dynamics import mix, product_matrix

logger = logging.getLogger(__name__)


def _with(p: PureProfile, i: int, s: int) -> PureProfile:
    return p[:i] + (s,) + p[i + 1 :]


def iter_slices(strategy_counts: tuple[int, ...]) -> Iterator[tuple[int, int, tuple[int, int], tuple[int, int], PureProfile]]:
    """
    Every 2x2 slice of the game.

    Yields (i, j, (a0, a1), (b0, b1), base) where players i < j vary over the
    strategy pairs and base fixes every other player's pure strategy.
    """
    n = len(strategy_counts)
    for i, j in itertools.combinations(range(n), 2):
        others = [range(m) if k not in (i, j) else (0,) for k, m in enumerate(strategy_counts)]
        for a in itertools.combinations(range(strategy_counts[i]), 2):
            for b in itertools.combinations(range(strategy_counts[j]), 2):
                for base in itertools.product(*others):
                    yield i, j, a, b, tuple(base)


def _classify(out_first: bool, out_second: bool) -> CavityKind:
    if out_first and out_second:
        return "local-source"
    if out_first or out_second:
        return "one-in-one-out"
    return "two-in"


def find_cavities(pg: PreferenceGraph, h: SinkEquilibrium) -> list[Cavity]:
    """
    Every 2x2 slice with exactly three of its four profiles in the sink.

    The cavity kind comes from the two arcs joining the in-sink profile w,
    diagonal to the outside one, with its two in-sink neighbours: both arcs
    into w, one in and one out, or both leaving w.
    """
    game = pg.game
    members = h.profiles
    cavities = []
    for i, j, (a0, a1), (b0, b1), base in iter_slices(game.strategy_counts):
        corners = [_with(_with(base, i, a), j, b) for a in (a0, a1) for b in (b0, b1)]
        outside = [p for p in corners if p not in members]
        if len(outside) != 1:
            continue
        x = outside[0]
        w = _with(_with(x, i, a0 if x[i] == a1 else a1), j, b0 if x[j] == b1 else b1)
        n_i = _with(w, i, x[i])
        n_j = _with(w, j, x[j])
        d_i = pg.signed_difference(w, n_i)
        d_j = pg.signed_difference(w, n_j)
        subsets = tuple(
            (a0, a1) if k == i else (b0, b1) if k == j else (base[k],)
            for k in range(game.num_players)
        )
        cavities.append(
            Cavity(
                sink_id=h.id,
                players=(i, j),
                subgame=subsets,
                inside=tuple(sorted(p for p in corners if p != x)),
                outside=x,
                diagonal=w,
                kind=_classify(pg.has_arc(w, n_i), pg.has_arc(w, n_j)),
                signed_sum=d_i + d_j,
            ),
        )
    logger.debug(f"Sink {h.id}: {len(cavities)} cavities")
    return cavities


def cavity_verdict(pg: PreferenceGraph, c: Cavity, strict: bool = False) -> CavityVerdict:
    """
    Pseudoconvexity of one cavity, with the boundary case flagged.

    The signed sum at the diagonal profile must be below zero; a sum within
    the graph's tie tolerance of zero is a boundary case, accepted unless
    strict is set.

    Raises:
        GenericityError: In strict mode, when the sum is a boundary case
    """
    boundary = abs(c.signed_sum) <= pg.tie_tol
    if boundary and strict:
        raise GenericityError(
            f"Cavity at {pg.game.profile_label(c.diagonal)} has signed sum "
            f"{c.signed_sum:.3g}, within tolerance {pg.tie_tol:g} of zero",
            pair=(c.diagonal, c.outside),
        )
    return CavityVerdict(
        cavity=c,
        pseudoconvex=boundary or c.signed_sum < 0,
        boundary=boundary,
    )


def is_pseudoconvex_cavity(pg: PreferenceGraph, c: Cavity, strict: bool = False) -> bool:
    return cavity_verdict(pg, c, strict).pseudoconvex


def is_pseudoconvex_sink(
    pg: PreferenceGraph,
    h: SinkEquilibrium,
    strict: bool = False,
) -> PseudoconvexityReport:
    """Check every cavity of the sink and break the result down by cavity kind."""
    cavities = find_cavities(pg, h)
    verdicts = [cavity_verdict(pg, c, strict) for c in cavities]
    counts: dict[str, int] = {}
    for c in cavities:
        counts[c.kind] = counts.get(c.kind, 0) + 1
    failing = [v.cavity for v in verdicts if not v.pseudoconvex]
    report = PseudoconvexityReport(
        sink_id=h.id,
        verdict=not failing,
        strict=strict,
        cavity_count=len(cavities),
        counts_by_kind=counts,
        failing=failing,
        boundary=[v.cavity for v in verdicts if v.boundary],
    )
    if failing:
        logger.info(f"Sink {h.id} is not pseudoconvex: {len(failing)} failing cavities")
    return report


def _members(h: SinkEquilibrium | ProfileSet) -> ProfileSet:
    return h.profiles if isinstance(h, SinkEquilibrium) else h


def lyapunov_zH_derivative(
    game: Game,
    h: SinkEquilibrium | ProfileSet,
    x: MixedProfile,
    matrix: ProductMatrix | None = None,
) -> float:
    """
    Time derivative of the sink's content mass along the replicator flow.

    Computed as sum over h in H of z_h (M z)_h with z the product distribution of x.
    """
    x.check_counts(game.strategy_counts)
    matrix = matrix or product_matrix(game)
    z = x.product_distribution().reshape(-1)
    rate = z * (matrix.entries @ z)
    idx = [game.profile_index(p) for p in _members(h)]
    return float(rate[idx].sum())


def _content_anchor(game: Game, members: ProfileSet, rng: np.random.Generator) -> MixedProfile:
    """A point of content(H): a pure member, or a mix along an arc inside H."""
    inside_arcs = []
    for p in sorted(members):
        for i, m in enumerate(game.strategy_counts):
            for s in range(m):
                q = _with(p, i, s)
                if s != p[i] and q in members:
                    inside_arcs.append((p, i, s))
    if not inside_arcs:
        p = sorted(members)[int(rng.integers(len(members)))]
        return MixedProfile.pure(game.strategy_counts, p)
    p, i, s = inside_arcs[int(rng.integers(len(inside_arcs)))]
    t = float(rng.uniform(0.05, 0.95))
    x = MixedProfile.pure(game.strategy_counts, p)
    dists = [d.copy() for d in x.dists]
    dists[i][p[i]] = 1.0 - t
    dists[i][s] = t
    return MixedProfile(tuple(dists))


def sample_near_content(
    game: Game,
    h: SinkEquilibrium | ProfileSet,
    epsilon: float,
    rng: np.random.Generator,
    max_tries: int = 100,
) -> MixedProfile:
    """
    A random mixed profile whose content mass lies in [1 - epsilon, 1).

    Starts from a random point of content(H) and moves toward a random interior
    point, bisecting the step length onto a randomly drawn target mass.
    """
    members = _members(h)
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must be in (0, 1), got {epsilon}")
    if members == game.all_profiles():
        raise PreconditionError("Content of the whole game has mass 1 everywhere")

    for _ in range(max_tries):
        anchor = _content_anchor(game, members, rng)
        interior = MixedProfile.random(game.strategy_counts, rng)
        target = 1.0 - epsilon * float(rng.uniform(1e-3, 1.0))
        if interior.content_mass(members) >= target:
            continue
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mix(anchor, interior, mid).content_mass(members) >= target:
                lo = mid
            else:
                hi = mid
        x = mix(anchor, interior, hi)
        mass = x.content_mass(members)
        if 1.0 - epsilon <= mass < 1.0:
            return x
    raise PreconditionError(f"Could not sample a state within {epsilon:g} of content(H)")
