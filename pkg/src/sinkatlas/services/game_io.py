"""Reading and writing game files (JSON or YAML)."""

import json
import logging
from pathlib import Path

import yaml
from pydantic import ValidationError

from ..errors import GameFileError, ShapeError
from ..models.game import Game, GameFile
from ..utils.logging_config import log_file_operation

logger = logging.getLogger(__name__)

YAML_SUFFIXES = (".yaml", ".yml")


def _is_yaml(path: Path) -> bool:
    return path.suffix.lower() in YAML_SUFFIXES


def parse_game_text(text: str, source: str = "<string>", as_yaml: bool = False) -> Game:
    """
    Parse game file text into a Game.

    Args:
        text: File contents
        source: Name used in error messages
        as_yaml: Parse as YAML instead of JSON

    Returns:
        The validated Game

    Raises:
        GameFileError: On syntax errors (with line and column) or schema violations
    """
    if as_yaml:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise GameFileError(
                f"Invalid YAML: {getattr(e, 'problem', None) or e}",
                path=source,
                line=None if mark is None else mark.line + 1,
                column=None if mark is None else mark.column + 1,
            )
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise GameFileError(
                f"Invalid JSON: {e.msg}",
                path=source,
                line=e.lineno,
                column=e.colno,
            )

    if not isinstance(data, dict):
        raise GameFileError("Game file must contain a mapping at the top level", path=source)

    try:
        return GameFile.model_validate(data).to_game()
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "file"
        raise GameFileError(f"Schema error at {where}: {first['msg']}", path=source)
    except ShapeError as e:
        raise GameFileError(str(e), path=source)


def load_game(path: str | Path) -> Game:
    """Load a game from a .json, .yaml or .yml file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise GameFileError("File not found", path=str(path))
    except (OSError, UnicodeDecodeError) as e:
        raise GameFileError(f"Cannot read file: {e}", path=str(path))

    game = parse_game_text(text, source=str(path), as_yaml=_is_yaml(path))
    log_file_operation(
        "read",
        str(path),
        logger,
        shape=game.shape_label(),
        players=game.num_players,
    )
    return game


def game_to_text(game: Game, as_yaml: bool = False) -> str:
    """Canonical text form; JSON keeps repr-exact floats and a fixed key order."""
    data = GameFile.from_game(game).model_dump(exclude_none=True)
    if as_yaml:
        return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)
    return json.dumps(data, indent=2) + "\n"


def save_game(game: Game, path: str | Path) -> Path:
    """Write a game file; YAML when the suffix asks for it, JSON otherwise."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(game_to_text(game, as_yaml=_is_yaml(path)), encoding="utf-8")
    log_file_operation("write", str(path), logger, digest=game.digest()[:12])
    return path
