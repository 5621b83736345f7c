"""Local-source search in two certificate families."""

import itertools
import logging
from typing import Literal

from ..errors import GenericityError
from ..models.game import SUPPORT_THRESHOLD, Game, MixedProfile, PureProfile, Subgame
from ..models.graph import PreferenceGraph, SinkEquilibrium
from ..models.stability import LocalSourceCertificate, NashCheck
from .dynamics import mix
from .equilibria import DEFAULT_NASH_TOL, fixed_point_2x2, is_quasi_strict_nash

logger = logging.getLogger(__name__)


def _slice_around(p: PureProfile, alternatives: dict[int, int]) -> Subgame:
    return Subgame(
        tuple(
            (s, alternatives[k]) if k in alternatives else (s,)
            for k, s in enumerate(p)
        ),
    )


def subgame_source_check(
    game: Game,
    y: Subgame,
    x: MixedProfile,
    tol: float = DEFAULT_NASH_TOL,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> NashCheck:
    """
    Test x as a source of the replicator flow inside subgame y.

    x is read on y's coordinates and checked as a quasi-strict Nash equilibrium
    of the negated restricted game. Margins of strategies outside the support
    are the transversal eigenvalues of x in the original game.
    """
    restricted = game.negate().restrict(y)
    return is_quasi_strict_nash(restricted.game, restricted.project(x), tol, support_threshold)


def certify(
    game: Game,
    h: SinkEquilibrium,
    y: Subgame,
    x: MixedProfile,
    family: Literal["pure", "mixed"],
    tol: float = DEFAULT_NASH_TOL,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> LocalSourceCertificate | None:
    """
    Certify x as a local source of h in y, or return None.

    Checks that x lies in content(h) and in y, that y is not contained in
    content(h), and that x restricted to y is a quasi-strict Nash equilibrium
    of the negated game.
    """
    support = x.support(support_threshold)
    if not support.is_within(y) or not x.content_membership(h.profiles, support_threshold):
        return None
    if all(p in h.profiles for p in y.profiles()):
        return None

    check = subgame_source_check(game, y, x, tol, support_threshold)
    if not check.verdict:
        return None
    local = game.restrict(y).project(x)

    # Negated-game gaps are U_i(s) - U_i(x) in the original game
    out_margins = [
        gap
        for gaps, d in zip(check.margins, local.dists)
        for gap, weight in zip(gaps, d)
        if weight <= support_threshold
    ]
    return LocalSourceCertificate(
        sink_id=h.id,
        family=family,
        subgame=y.strategy_subsets,
        point=x.to_lists(),
        margins=check.margins,
        min_margin=min(out_margins),
    )


def _pure_candidates(game: Game, pg: PreferenceGraph, h: SinkEquilibrium):
    """
    Sources p in h of 2x2 slices that leave h, then of 2x2x2 slices.

    The 2x2x2 slices around p are searched for three or more players whenever
    no 2x2 slice leaving h has p as a source; slices inside h never certify.
    """
    n = game.num_players
    for p in sorted(h.profiles):
        found = False
        for i, j in itertools.combinations(range(n), 2):
            for a in range(game.strategy_counts[i]):
                for b in range(game.strategy_counts[j]):
                    if a == p[i] or b == p[j]:
                        continue
                    y = _slice_around(p, {i: a, j: b})
                    if pg.induced_subgraph(y).is_source(p):
                        if not all(q in h.profiles for q in y.profiles()):
                            found = True
                        yield y, p
        if found or n < 3:
            continue
        for trio in itertools.combinations(range(n), 3):
            ranges = [
                [s for s in range(game.strategy_counts[k]) if s != p[k]] for k in trio
            ]
            for alts in itertools.product(*ranges):
                y = _slice_around(p, dict(zip(trio, alts)))
                if pg.induced_subgraph(y).is_source(p):
                    yield y, p


def _mixed_candidates(game: Game, h: SinkEquilibrium):
    """2x2 fixed points inside content(h), with every one-strategy extension of their subgame."""
    if game.num_players != 2:
        return
    m1, m2 = game.strategy_counts
    for rows in itertools.combinations(range(m1), 2):
        for cols in itertools.combinations(range(m2), 2):
            y0 = Subgame((rows, cols))
            if not all(p in h.profiles for p in y0.profiles()):
                continue
            try:
                x = fixed_point_2x2(game, y0)
            except GenericityError:
                logger.debug(f"Skipping degenerate 2x2 subgame {y0.to_lists()}")
                continue
            if x is None:
                continue
            for r in range(m1):
                if r not in rows:
                    yield Subgame((rows + (r,), cols)), x
            for c in range(m2):
                if c not in cols:
                    yield Subgame((rows, cols + (c,))), x


def find_local_sources(
    game: Game,
    pg: PreferenceGraph,
    h: SinkEquilibrium,
    tol: float = DEFAULT_NASH_TOL,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> list[LocalSourceCertificate]:
    """
    Search for local sources of h.

    Pure candidates are members of h that are sources of a 2x2 slice leaving h
    or, with three or more players and no such 2x2 slice, of a 2x2x2 slice.
    Mixed candidates, in two-player games, are interior fixed points of 2x2
    subgames inside content(h), tested in every 2x3 and 3x2 subgame containing
    them. An empty result means no certificate in these families.
    """
    certificates: list[LocalSourceCertificate] = []
    for y, p in _pure_candidates(game, pg, h):
        x = MixedProfile.pure(game.strategy_counts, p)
        cert = certify(game, h, y, x, "pure", tol, support_threshold)
        if cert is not None:
            certificates.append(cert)
    for y, x in _mixed_candidates(game, h):
        cert = certify(game, h, y, x, "mixed", tol, support_threshold)
        if cert is not None:
            certificates.append(cert)
    logger.debug(f"Sink {h.id}: {len(certificates)} local-source certificates")
    return certificates


def escape_start(cert: LocalSourceCertificate, delta: float = 1e-4) -> MixedProfile:
    """The certified point moved a fraction delta toward the barycenter of its subgame."""
    x = cert.mixed_profile()
    target = MixedProfile.barycenter(x.strategy_counts, cert.as_subgame())
    return mix(x, target, delta)
