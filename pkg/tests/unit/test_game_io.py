"""Unit tests for game files and trajectory CSVs."""

import json
import tempfile
from pathlib import Path

import pytest

from sinkatlas.errors import GameFileError
from sinkatlas.models.game import MixedProfile
from sinkatlas.services.corpus import get_named_game, random_game
from sinkatlas.services.dynamics import integrate
from sinkatlas.services.game_io import game_to_text, load_game, parse_game_text, save_game
from sinkatlas.services.trajectory_io import (
    read_trajectory_csv,
    trajectory_frame,
    trajectory_header,
    write_trajectory_csv,
)

SHAPLEY_JSON = """{
  "players": 2,
  "strategy_counts": [3, 3],
  "utilities": [
    [-1, 1, 0, 0, -1, 1, 1, 0, -1],
    [-1, 0, 1, 1, -1, 0, 0, 1, -1]
  ]
}
"""


class TestGameFiles:
    """Test cases for reading and writing game files."""

    def test_parse_json(self):
        """Test a JSON game file parses into the matching game."""
        game = parse_game_text(SHAPLEY_JSON)
        assert game.strategy_counts == (3, 3)
        assert game == get_named_game("shapley").game

    def test_parse_yaml(self):
        """Test YAML files use the same schema."""
        text = "players: 1\nstrategy_counts: [2]\nutilities:\n  - [0.5, 1.5]\n"
        game = parse_game_text(text, as_yaml=True)
        assert game.utility_pure(0, (1,)) == 1.5

    def test_json_syntax_error_has_position(self):
        """Test JSON syntax errors carry line and column."""
        broken = SHAPLEY_JSON.replace('"players": 2,', '"players": 2')
        with pytest.raises(GameFileError) as excinfo:
            parse_game_text(broken, source="broken.json")
        assert excinfo.value.line == 3
        assert excinfo.value.column is not None
        assert "broken.json:3" in str(excinfo.value)

    def test_yaml_syntax_error_has_line(self):
        """Test YAML syntax errors carry a line number."""
        with pytest.raises(GameFileError) as excinfo:
            parse_game_text("players: [1\nstrategy_counts: 2\n", as_yaml=True)
        assert excinfo.value.line is not None

    def test_schema_error_names_field(self):
        """Test schema violations name the offending field."""
        data = json.loads(SHAPLEY_JSON)
        data["utilities"][1] = data["utilities"][1][:5]
        with pytest.raises(GameFileError) as excinfo:
            parse_game_text(json.dumps(data))
        assert "utilities[1]" in str(excinfo.value)

    def test_missing_field(self):
        """Test a missing field is a schema error."""
        with pytest.raises(GameFileError) as excinfo:
            parse_game_text('{"players": 2, "strategy_counts": [2, 2]}')
        assert "utilities" in str(excinfo.value)

    def test_top_level_must_be_mapping(self):
        """Test a list at the top level is rejected."""
        with pytest.raises(GameFileError):
            parse_game_text("[1, 2, 3]")

    def test_missing_file(self):
        """Test a missing file raises GameFileError."""
        with pytest.raises(GameFileError):
            load_game("/nonexistent/game.json")

    def test_save_and_load_round_trip(self):
        """Test a written file reads back value-identical."""
        game = random_game((2, 3, 2), "generic", seed=9)
        with tempfile.TemporaryDirectory() as temp_dir:
            for name in ("game.json", "game.yaml"):
                path = save_game(game, Path(temp_dir) / name)
                assert load_game(path) == game

    def test_output_is_deterministic(self):
        """Test equal games serialize to identical text."""
        a = game_to_text(random_game((3, 3), "zero_sum", seed=7))
        b = game_to_text(random_game((3, 3), "zero_sum", seed=7))
        assert a == b
        assert list(json.loads(a)) == ["players", "strategy_counts", "utilities"]


class TestTrajectoryCsv:
    """Test cases for trajectory CSV files."""

    def setup_method(self):
        """Set up test fixtures."""
        named = get_named_game("shapley")
        self.record = integrate(
            named.game,
            MixedProfile.barycenter((3, 3)),
            t_max=0.5,
            step=0.1,
            observe={"H": named.expected.sinks[0]},
        )

    def test_header(self):
        """Test the header lists time, coordinates and observables."""
        assert trajectory_header(self.record) == [
            "t", "0.0", "0.1", "0.2", "1.0", "1.1", "1.2", "content:H",
        ]  # fmt: skip

    def test_round_trip(self):
        """Test a written CSV reads back at full precision."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = write_trajectory_csv(self.record, Path(temp_dir) / "run.csv")
            lines = path.read_text().splitlines()
            assert len(lines) == len(self.record) + 1
            back = read_trajectory_csv(path)
        assert back.strategy_counts == (3, 3)
        assert back.states.tolist() == self.record.states.tolist()
        assert back.observables["content:H"].tolist() == self.record.observables["content:H"].tolist()

    def test_bad_header(self):
        """Test a CSV without a time column is rejected."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "bad.csv"
            path.write_text("x,0.0\n1,2\n")
            with pytest.raises(GameFileError):
                read_trajectory_csv(path)

    def test_non_numeric_value(self):
        """Test a CSV with a text cell is rejected."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "bad.csv"
            path.write_text("t,0.0,0.1\n0,0.5,oops\n")
            with pytest.raises(GameFileError):
                read_trajectory_csv(path)

    def test_frame_columns(self):
        """Test the data frame carries one column per header entry and one row per step."""
        frame = trajectory_frame(self.record)
        assert frame.columns.tolist() == trajectory_header(self.record)
        assert frame.shape == (len(self.record), 8)
        assert frame["t"].iloc[-1] == pytest.approx(0.5)
