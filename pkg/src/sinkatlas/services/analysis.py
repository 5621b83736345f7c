"""The full analysis pipeline behind `sinkatlas analyze`."""

import logging

from ..models.game import Game
from ..models.report import NO_CERTIFICATE, AnalysisReport, GameDigest, SinkSummary
from ..utils.analysis_config import AnalysisConfig
from .local_sources import find_local_sources
from .preference_graph import build_graph
from .stability import is_pseudoconvex_sink

logger = logging.getLogger(__name__)


def digest_game(game: Game) -> GameDigest:
    return GameDigest(
        players=game.num_players,
        shape=list(game.strategy_counts),
        num_profiles=game.num_profiles,
        sha256=game.digest(),
    )


def analyze_game(game: Game, config: AnalysisConfig | None = None) -> AnalysisReport:
    """
    Build the preference graph, find its sinks, check pseudoconvexity and search for local sources.

    Args:
        game: The game to analyze
        config: Tolerances and the strict-pseudoconvexity switch

    Returns:
        AnalysisReport with one summary per sink equilibrium

    Raises:
        GenericityError: If a comparable pair is tied, or a cavity sum is
            zero within tolerance in strict mode
    """
    config = config or AnalysisConfig()
    pg = build_graph(game, config.tie_tol)
    sinks = pg.sink_equilibria()
    logger.info(f"Found {len(sinks)} sink equilibria in a {game.shape_label()} game")

    summaries = []
    certificates = []
    warnings = []
    for h in sinks:
        pc = is_pseudoconvex_sink(pg, h, strict=config.strict_pseudoconvex)
        for c in pc.boundary:
            warnings.append(
                f"Sink {h.id}: cavity at {game.profile_label(c.diagonal)} has signed sum "
                f"{c.signed_sum:.3g}, zero within tolerance",
            )
        summaries.append(
            SinkSummary(
                id=h.id,
                profiles=[list(p) for p in h.sorted_profiles()],
                labels=[game.profile_label(p) for p in h.sorted_profiles()],
                is_subgame=h.is_subgame,
                is_singleton_pne=h.is_singleton_pne,
                pseudoconvex=pc.verdict,
                cavity_count=pc.cavity_count,
                counts_by_kind=pc.counts_by_kind,
                failing_cavities=pc.failing,
                boundary_cavities=pc.boundary,
            ),
        )
        certificates.extend(
            find_local_sources(game, pg, h, config.nash_tol, config.support_threshold),
        )

    search = (
        f"{len(certificates)} certificate(s) found" if certificates else NO_CERTIFICATE
    )
    return AnalysisReport(
        game=digest_game(game),
        tie_tol=config.tie_tol,
        strict_pseudoconvex=config.strict_pseudoconvex,
        sinks=summaries,
        local_sources=certificates,
        local_source_search=search,
        genericity_warnings=warnings,
    )


def render_text(report: AnalysisReport) -> str:
    """Human-readable summary of an analysis report."""
    lines = [
        f"Game: {report.game.players} players, shape {'x'.join(map(str, report.game.shape))}, "
        f"{report.game.num_profiles} profiles",
        f"SHA-256: {report.game.sha256}",
        f"Sink equilibria: {len(report.sinks)}",
    ]
    for s in report.sinks:
        kind = "pure Nash equilibrium" if s.is_singleton_pne else f"{len(s.profiles)} profiles"
        lines.append(f"  Sink {s.id} ({kind}): {' '.join(s.labels)}")
        breakdown = ", ".join(f"{k}: {n}" for k, n in sorted(s.counts_by_kind.items()))
        lines.append(
            f"    pseudoconvex: {str(s.pseudoconvex).lower()} "
            f"({s.cavity_count} cavities{'; ' + breakdown if breakdown else ''})",
        )
        for c in s.failing_cavities:
            lines.append(
                f"    failing cavity at {c.diagonal}, outside {c.outside}, "
                f"kind {c.kind} ({c.letter}), signed sum {c.signed_sum:.6g}",
            )
    lines.append(f"Pseudoconvex: {str(report.pseudoconvex).lower()}")
    if report.local_sources:
        lines.append(f"Local sources: {len(report.local_sources)}")
        for cert in report.local_sources:
            point = "; ".join(
                ",".join(f"{v:.6g}" for v in d) for d in cert.point
            )
            lines.append(
                f"  sink {cert.sink_id}, {cert.family}, subgame {[list(s) for s in cert.subgame]}: "
                f"[{point}] (margin {cert.min_margin:.3g})",
            )
    else:
        lines.append(f"Local sources: none ({report.local_source_search})")
    for w in report.genericity_warnings:
        lines.append(f"Warning: {w}")
    return "\n".join(lines)
