"""Nash checks, 2x2 fixed points and transversal eigenvalues."""

import logging

import numpy as np

from ..errors import GenericityError, InvalidSubgameError, PreconditionError
from ..models.game import SUPPORT_THRESHOLD, Game, MixedProfile, Subgame
from ..models.stability import NashCheck, TransversalEigenvalue
from .dynamics import replicator_vector_field

logger = logging.getLogger(__name__)

DEFAULT_NASH_TOL = 1e-9
FIXED_POINT_TOL = 1e-8


def is_quasi_strict_nash(
    game: Game,
    x: MixedProfile,
    tol: float = DEFAULT_NASH_TOL,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> NashCheck:
    """
    Check whether x is a Nash equilibrium and whether it is quasi-strict.

    Nash: every support strategy earns U_i(x) within tol and no strategy beats
    it by more than tol. Quasi-strict: additionally every strategy outside the
    support falls short by more than tol.
    """
    x.check_counts(game.strategy_counts)
    margins: list[list[float]] = []
    is_nash = True
    is_quasi_strict = True
    for i, d in enumerate(x.dists):
        dev = game.deviation_payoffs(i, x)
        value = float(dev @ d)
        gaps = value - dev
        margins.append(gaps.tolist())
        in_support = d > support_threshold
        if np.any(gaps < -tol) or np.any(np.abs(gaps[in_support]) > tol):
            is_nash = False
        if np.any(gaps[~in_support] <= tol):
            is_quasi_strict = False
    return NashCheck(
        is_nash=is_nash,
        is_quasi_strict=is_nash and is_quasi_strict,
        tol=tol,
        margins=margins,
    )


def varying_players(y: Subgame) -> tuple[int, int]:
    """The two players with two strategies in a 2x2 slice; everyone else has one."""
    sizes = y.shape
    players = tuple(i for i, m in enumerate(sizes) if m == 2)
    if len(players) != 2 or any(m not in (1, 2) for m in sizes):
        raise InvalidSubgameError(f"Subgame of shape {sizes} is not a 2x2 slice")
    return players[0], players[1]


def fixed_point_2x2(
    game: Game,
    y: Subgame,
    tie_tol: float = 1e-12,
) -> MixedProfile | None:
    """
    Interior replicator fixed point of a 2x2 slice, if it exists.

    Each of the two varying players mixes so the other is indifferent between
    its two strategies. The point is returned embedded in the full strategy
    space (zeros elsewhere, other players pure) when both weights lie strictly
    inside (0, 1), and None otherwise.

    Raises:
        GenericityError: If an indifference condition has a zero denominator
    """
    y.validate_for(game.strategy_counts)
    i, j = varying_players(y)
    a0, a1 = y.strategy_subsets[i]
    b0, b1 = y.strategy_subsets[j]
    base = [sub[0] for sub in y.strategy_subsets]

    def u(player: int, si: int, sj: int) -> float:
        p = list(base)
        p[i], p[j] = si, sj
        return game.utility_pure(player, tuple(p))

    # Player i's gains from a0 to a1 against b0 and b1 fix j's mix, and vice versa
    di0 = u(i, a1, b0) - u(i, a0, b0)
    di1 = u(i, a1, b1) - u(i, a0, b1)
    dj0 = u(j, a0, b1) - u(j, a0, b0)
    dj1 = u(j, a1, b1) - u(j, a1, b0)
    den_q = di0 - di1
    den_p = dj0 - dj1
    for den, who in ((den_q, i), (den_p, j)):
        if abs(den) <= tie_tol:
            raise GenericityError(
                f"Indifference condition for player {who} is degenerate in subgame {y.to_lists()}",
            )
    q = di0 / den_q
    p = dj0 / den_p
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        return None

    dists = []
    for k, m in enumerate(game.strategy_counts):
        d = np.zeros(m)
        if k == i:
            d[a0], d[a1] = 1.0 - p, p
        elif k == j:
            d[b0], d[b1] = 1.0 - q, q
        else:
            d[base[k]] = 1.0
        dists.append(d)
    return MixedProfile(tuple(dists))


def transversal_eigenvalues(
    game: Game,
    x: MixedProfile,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> list[TransversalEigenvalue]:
    """
    Jacobian eigenvalues along strategies outside the support of a fixed point.

    For an unused strategy s of player i the eigenvalue is u_i(s; x_-i) - U_i(x).

    Raises:
        PreconditionError: If the vector field at x exceeds 1e-8
    """
    velocity = np.concatenate(replicator_vector_field(game, x))
    speed = float(np.max(np.abs(velocity)))
    if speed > FIXED_POINT_TOL:
        raise PreconditionError(
            f"Point is not a fixed point of the replicator dynamic (|x'| = {speed:.3g})",
        )
    result = []
    for i, d in enumerate(x.dists):
        dev = game.deviation_payoffs(i, x)
        value = float(dev @ d)
        for s in np.flatnonzero(d <= support_threshold):
            result.append(
                TransversalEigenvalue(
                    player=i,
                    strategy=int(s),
                    eigenvalue=float(dev[s] - value),
                ),
            )
    return result
