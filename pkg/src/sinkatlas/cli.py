"""Command-line interface for sinkatlas."""

import logging
import math
from pathlib import Path

import click
import numpy as np
import yaml
from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()
from .errors import (
    GameFileError,
    GenericityError,
    InvalidProfileError,
    InvalidSubgameError,
    ParameterError,
    PreconditionError,
    ShapeError,
    SinkAtlasError,
    StepSizeError,
    VerificationError,
)
from .models.dynamics import StopCondition, TrajectoryRecord
from .models.game import Game, MixedProfile, ProfileSet
from .models.graph import SinkEquilibrium
from .services.analysis import analyze_game, render_text
from .services.corpus import DESCRIPTIONS, corpus_ids, get_named_game, parse_shape, random_game
from .services.dynamics import ReplicatorSimulator, ensemble, estimate_omega_limit
from .services.game_io import load_game, save_game
from .services.preference_graph import build_graph, export_dot, graph_report
from .services.trajectory_io import write_trajectory_csv
from .services.verification import verify_named_game
from .utils.analysis_config import AnalysisConfig, load_analysis_config
from .utils.logging_config import (
    get_logger,
    log_command_end,
    log_command_start,
    log_file_operation,
    setup_logging,
)

EXIT_INPUT_ERROR = 1
EXIT_GENERICITY = 2
EXIT_VERIFICATION_FAILED = 3
MAX_RECORDED_ROWS = 10_000

INPUT_ERRORS = (
    GameFileError,
    ShapeError,
    InvalidProfileError,
    InvalidSubgameError,
    ParameterError,
    PreconditionError,
)


def _report_error(command: str, error: Exception, logger: logging.Logger) -> int:
    """Echo an error with a tip to stderr and return the exit code for it."""
    if isinstance(error, GenericityError):
        logger.error(f"Genericity error: {error}")
        click.echo(f"❌ Genericity Error: {error}", err=True)
        click.echo(
            "💡 Tip: Perturb the tied payoffs, or raise --tie-tol only if the tie is real",
            err=True,
        )
        code = EXIT_GENERICITY
    elif isinstance(error, GameFileError):
        logger.error(f"Game file error: {error}")
        click.echo(f"❌ File Error: {error}", err=True)
        click.echo(
            "💡 Tip: A game file needs 'players', 'strategy_counts' and one flat 'utilities' list per player",
            err=True,
        )
        code = EXIT_INPUT_ERROR
    elif isinstance(error, VerificationError):
        logger.error(f"Verification failed: {error}")
        click.echo(f"❌ Verification Failed: {error}", err=True)
        click.echo("💡 Tip: Rerun with --verbose to log every check, or try a smaller --step", err=True)
        code = EXIT_VERIFICATION_FAILED
    elif isinstance(error, StepSizeError):
        logger.error(f"Step size error: {error}")
        click.echo(f"❌ Integration Error: {error}", err=True)
        click.echo("💡 Tip: Retry with a smaller --step", err=True)
        code = EXIT_INPUT_ERROR
    elif isinstance(error, INPUT_ERRORS):
        logger.error(f"Input error: {error}")
        click.echo(f"❌ Input Error: {error}", err=True)
        click.echo(f"💡 Tip: Run 'sinkatlas {command} --help' for accepted values", err=True)
        code = EXIT_INPUT_ERROR
    elif isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
        logger.error(f"File system error: {error}")
        click.echo(f"❌ File Error: Cannot access file - {error!s}", err=True)
        click.echo("💡 Tip: Check the path and its permissions", err=True)
        code = EXIT_INPUT_ERROR
    else:
        logger.exception(f"Unexpected error in {command} command")
        click.echo(f"❌ Unexpected Error: {error!s}", err=True)
        click.echo("💡 Tip: Rerun with --verbose and check the logs", err=True)
        code = EXIT_INPUT_ERROR
    log_command_end(command, success=False, logger=logger)
    return code


def _config(ctx: click.Context, **overrides) -> AnalysisConfig:
    base: AnalysisConfig = ctx.obj["config"]
    updates = {k: v for k, v in overrides.items() if v is not None}
    return base.model_copy(update=updates) if updates else base


@click.group()
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    help="Enable verbose debug logging to console",
)
@click.version_option(package_name="sinkatlas")
@click.pass_context
def main(ctx, verbose):
    """sinkatlas: preference graphs, sink equilibria and replicator dynamics for normal-form games."""
    setup_logging(verbose=verbose)
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    try:
        ctx.obj["config"] = load_analysis_config()
    except ParameterError as e:
        click.echo(f"❌ Configuration Error: {e}", err=True)
        click.echo("💡 Tip: Check the SINKATLAS_* variables in your environment or .env file", err=True)
        ctx.exit(EXIT_INPUT_ERROR)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON")
@click.option("--yaml", "as_yaml", is_flag=True, help="Print the report as YAML")
@click.option("--tie-tol", type=float, help="Payoff differences at or below this are ties")
@click.option(
    "--strict-pseudoconvex",
    is_flag=True,
    help="Treat a cavity sum of zero as a genericity failure",
)
@click.pass_context
def analyze(ctx, path, as_json, as_yaml, tie_tol, strict_pseudoconvex):
    """Find sink equilibria, check pseudoconvexity and search for local sources."""
    logger = get_logger("cli.analyze")
    log_command_start("analyze", {"path": path, "tie_tol": tie_tol}, logger)

    try:
        config = _config(ctx, tie_tol=tie_tol, strict_pseudoconvex=strict_pseudoconvex or None)
        report = analyze_game(load_game(path), config)
        if as_json:
            click.echo(report.model_dump_json(indent=2))
        elif as_yaml:
            click.echo(
                yaml.safe_dump(report.model_dump(mode="json"), sort_keys=False),
                nl=False,
            )
        else:
            click.echo(render_text(report))
        log_command_end("analyze", success=True, logger=logger)
    except Exception as e:
        ctx.exit(_report_error("analyze", e, logger))


def parse_start(value: str, game: Game) -> MixedProfile:
    """
    Parse a start option value.

    Accepts `barycenter`, `random:<seed>`, or explicit probabilities with
    players separated by `;` and strategies by `,` (a flat comma list also
    works). Explicit vectors are not renormalized.
    """
    counts = game.strategy_counts
    text = value.strip()
    if text == "barycenter":
        return MixedProfile.barycenter(counts)
    if text.startswith("random:"):
        try:
            seed = int(text.split(":", 1)[1])
        except ValueError:
            raise ParameterError(f"random start needs an integer seed, got {value!r}")
        return MixedProfile.random(counts, np.random.default_rng(seed))
    try:
        if ";" in text:
            weights = [[float(v) for v in part.split(",")] for part in text.split(";")]
            if [len(w) for w in weights] != list(counts):
                raise ShapeError(
                    f"Start vector has shape {[len(w) for w in weights]}, game has {list(counts)}",
                )
            return MixedProfile.from_weights(weights, normalize=False)
        return MixedProfile.from_flat(counts, [float(v) for v in text.split(",")])
    except ValueError as e:
        if isinstance(e, SinkAtlasError):
            raise
        raise ParameterError(f"Start vector must be numbers, got {value!r}")


def _sinks_or_none(game: Game, tie_tol: float, logger: logging.Logger) -> list[SinkEquilibrium]:
    try:
        return build_graph(game, tie_tol).sink_equilibria()
    except GenericityError as e:
        logger.warning(f"Skipping per-sink content mass: {e}")
        return []


def _summarize_run(game: Game, tr: TrajectoryRecord, config: AnalysisConfig) -> list[str]:
    final = tr.final_state
    lines = [
        f"Final time: {tr.final_time:.6g} (stop: {tr.stop_reason})",
        "Final state: " + " | ".join(",".join(f"{v:.6g}" for v in d) for d in final.dists),
    ]
    for name in sorted(tr.observables):
        if name.startswith("content:"):
            lines.append(f"Content mass {name.split(':', 1)[1]}: {tr.observables[name][-1]:.6g}")
    z = final.product_distribution()
    nearest = tuple(int(s) for s in np.unravel_index(int(np.argmax(z)), z.shape))
    distance = final.distance(MixedProfile.pure(game.strategy_counts, nearest))
    lines.append(f"Nearest pure profile: {game.profile_label(nearest)} at distance {distance:.3g}")
    limit = estimate_omega_limit(tr, floor=config.omega_floor)
    lines.append(
        "Estimated omega-limit support: " + " ".join(game.profile_label(p) for p in sorted(limit)),
    )
    return lines


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--start", default="barycenter", help="barycenter, random:<seed>, or '0.5,0.5;0.2,0.8'")
@click.option("--step", type=float, help="RK4 step size")
@click.option("--tmax", type=float, help="Integration horizon")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Trajectory CSV path")
@click.option(
    "--record-every",
    type=click.IntRange(min=1),
    help=f"Record every k-th step (default: about {MAX_RECORDED_ROWS} rows)",
)
@click.option("--ensemble", "runs", type=click.IntRange(min=1), help="Number of random starts")
@click.option("--seed", default=0, type=click.IntRange(min=0), help="Seed for --ensemble starts")
@click.option("--stop-settled", type=float, help="Stop once the displacement rate drops below this")
@click.option("--stop-content", type=float, help="Stop once a sink's content mass reaches this")
@click.option("--stop-near", help="Stop within --near-radius of this profile, e.g. '0,1,0;1,0,0'")
@click.option("--near-radius", default=1e-3, type=click.FloatRange(min=0, min_open=True), help="Radius for --stop-near")
@click.pass_context
def simulate(
    ctx, path, start, step, tmax, out, record_every, runs, seed, stop_settled, stop_content, stop_near, near_radius
):
    """Integrate the replicator dynamic and write the trajectory as CSV."""
    logger = get_logger("cli.simulate")
    log_command_start(
        "simulate",
        {"path": path, "start": start, "step": step, "tmax": tmax, "out": out, "ensemble": runs},
        logger,
    )

    try:
        config = _config(ctx, step=step, t_max=tmax)
        game = load_game(path)
        sinks = _sinks_or_none(game, config.tie_tol, logger)
        observe: dict[str, ProfileSet] = {f"sink{h.id}": h.profiles for h in sinks}

        stop = StopCondition(
            content_sets=tuple(h.profiles for h in sinks) if stop_content is not None else (),
            content_threshold=1.0 if stop_content is None else stop_content,
            displacement_tol=stop_settled,
            references=(parse_start(stop_near, game),) if stop_near else (),
            radius=near_radius,
        )
        if record_every is None:
            record_every = max(1, math.ceil(config.t_max / config.step / MAX_RECORDED_ROWS))

        if runs is None:
            sim = ReplicatorSimulator(game, config.step, config.t_max, record_every)
            tr = sim.integrate(parse_start(start, game), stop=stop, observe=observe)
            if out:
                write_trajectory_csv(tr, out)
                click.echo(f"Trajectory written: {out} ({len(tr)} rows)")
            for line in _summarize_run(game, tr, config):
                click.echo(line)
        else:
            rng = np.random.default_rng(seed)
            starts = [MixedProfile.random(game.strategy_counts, rng) for _ in range(runs)]
            records = ensemble(
                game,
                starts,
                t_max=config.t_max,
                step=config.step,
                stop=stop,
                record_every=record_every,
                observe=observe,
            )
            for k, tr in enumerate(records):
                click.echo(f"Run {k}:")
                if out:
                    target = Path(out)
                    run_path = target.with_name(f"{target.stem}_{k}{target.suffix or '.csv'}")
                    write_trajectory_csv(tr, run_path)
                    click.echo(f"  Trajectory written: {run_path}")
                for line in _summarize_run(game, tr, config):
                    click.echo(f"  {line}")
        log_command_end("simulate", success=True, logger=logger)
    except Exception as e:
        ctx.exit(_report_error("simulate", e, logger))


@main.command()
@click.argument("game_id")
@click.option("--step", type=float, help="Step size for the numerical evidence")
@click.pass_context
def verify(ctx, game_id, step):
    """Run the scripted checks of a named counterexample."""
    logger = get_logger("cli.verify")
    log_command_start("verify", {"game_id": game_id, "step": step}, logger)

    try:
        result = verify_named_game(game_id, _config(ctx, evidence_step=step))
    except Exception as e:
        ctx.exit(_report_error("verify", e, logger))

    for check in result.checks:
        mark = "✅" if check.passed else "❌"
        detail = f" ({check.detail})" if check.detail else ""
        click.echo(f"{mark} {check.name}{detail}")

    try:
        result.raise_if_failed()
    except VerificationError as e:
        ctx.exit(_report_error("verify", e, logger))
    click.echo(f"{game_id}: all {len(result.checks)} checks passed")
    log_command_end("verify", success=True, logger=logger)


@main.command()
@click.argument("game_class", metavar="CLASS")
@click.argument("shape")
@click.option("--seed", default=0, type=click.IntRange(min=0), help="Random seed")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Game file to write")
@click.pass_context
def gen(ctx, game_class, shape, seed, out):
    """Generate a random game: generic, zero_sum or potential, e.g. `gen zero_sum 3x3`."""
    logger = get_logger("cli.gen")
    log_command_start("gen", {"class": game_class, "shape": shape, "seed": seed, "out": out}, logger)

    try:
        game = random_game(parse_shape(shape), game_class, seed)
        save_game(game, out)
        click.echo(f"Game written: {out}")
        click.echo(f"Shape {game.shape_label()}, SHA-256 {game.digest()}")
        log_command_end("gen", success=True, logger=logger)
    except Exception as e:
        ctx.exit(_report_error("gen", e, logger))


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="Write DOT here instead of stdout")
@click.option("--json", "as_json", is_flag=True, help="Print SCCs and arc weights as JSON")
@click.option("--tie-tol", type=float, help="Payoff differences at or below this are ties")
@click.pass_context
def graph(ctx, path, dot_path, as_json, tie_tol):
    """Export the preference graph with sink equilibria highlighted."""
    logger = get_logger("cli.graph")
    log_command_start("graph", {"path": path, "dot": dot_path}, logger)

    try:
        config = _config(ctx, tie_tol=tie_tol)
        pg = build_graph(load_game(path), config.tie_tol)
        if as_json:
            click.echo(graph_report(pg).model_dump_json(indent=2))
        else:
            text = export_dot(pg, [h.profiles for h in pg.sink_equilibria()])
            if dot_path:
                Path(dot_path).write_text(text, encoding="utf-8")
                log_file_operation("write", dot_path, logger, nodes=len(pg.nodes))
                click.echo(f"DOT written: {dot_path}")
            else:
                click.echo(text, nl=False)
        log_command_end("graph", success=True, logger=logger)
    except Exception as e:
        ctx.exit(_report_error("graph", e, logger))


@main.group()
def corpus():
    """List and export the named counterexample games."""


@corpus.command("list")
def corpus_list():
    """List named games with a one-line description."""
    for game_id in corpus_ids():
        click.echo(f"{game_id:<20} {DESCRIPTIONS[game_id]}")


@corpus.command("export")
@click.argument("game_id")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Game file to write")
@click.pass_context
def corpus_export(ctx, game_id, out):
    """Write a named game in the game file format."""
    logger = get_logger("cli.corpus")
    log_command_start("corpus export", {"game_id": game_id, "out": out}, logger)

    try:
        save_game(get_named_game(game_id).game, out)
        click.echo(f"Game written: {out}")
        log_command_end("corpus export", success=True, logger=logger)
    except Exception as e:
        ctx.exit(_report_error("corpus export", e, logger))


if __name__ == "__main__":
    main()
