"""Unit tests for CLI functionality."""

import json
import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml
from click.testing import CliRunner

from sinkatlas.cli import EXIT_GENERICITY, EXIT_INPUT_ERROR, MAX_RECORDED_ROWS, main, parse_start
from sinkatlas.errors import ParameterError, ShapeError
from sinkatlas.models.game import Game, MixedProfile
from sinkatlas.services.corpus import corpus_ids, get_named_game
from sinkatlas.services.game_io import save_game
from sinkatlas.services.trajectory_io import read_trajectory_csv

TIED_GAME = json.dumps(
    {
        "players": 2,
        "strategy_counts": [2, 2],
        "utilities": [[1, 0, 1, 2], [1, 0, 0, 1]],
    },
)


class TestCLI:
    """Test cases for CLI commands."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.shapley_path = os.path.join(self.temp_dir.name, "shapley.json")
        save_game(get_named_game("shapley").game, self.shapley_path)

    def teardown_method(self):
        """Clean up temporary files."""
        self.temp_dir.cleanup()

    def test_main_group(self):
        """Test main CLI group."""
        result = self.runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "sink equilibria and replicator dynamics" in result.output
        for command in ("analyze", "simulate", "verify", "gen", "graph", "corpus"):
            assert command in result.output

    def test_analyze_text(self):
        """Test the text report for Shapley's game."""
        result = self.runner.invoke(main, ["analyze", self.shapley_path])
        assert result.exit_code == 0
        assert "Sink equilibria: 1" in result.stdout
        assert "Pseudoconvex: true" in result.stdout

    def test_analyze_json(self):
        """Test --json prints a parseable report."""
        result = self.runner.invoke(main, ["analyze", self.shapley_path, "--json"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert len(data["sinks"]) == 1
        assert data["sinks"][0]["pseudoconvex"] is True
        assert data["game"]["shape"] == [3, 3]

    def test_analyze_yaml(self):
        """Test --yaml prints the same report as YAML."""
        result = self.runner.invoke(main, ["analyze", self.shapley_path, "--yaml"])
        assert result.exit_code == 0
        data = yaml.safe_load(result.stdout)
        assert data["local_sources"] == []

    def test_analyze_strict_exits_with_genericity_code(self):
        """Test strict mode turns Shapley's zero sums into exit code 2."""
        result = self.runner.invoke(main, ["analyze", self.shapley_path, "--strict-pseudoconvex"])
        assert result.exit_code == EXIT_GENERICITY
        assert "Genericity Error" in result.stderr

    def test_analyze_tied_game(self):
        """Test a tied comparable pair exits with code 2."""
        path = Path(self.temp_dir.name) / "tied.json"
        path.write_text(TIED_GAME)
        result = self.runner.invoke(main, ["analyze", str(path)])
        assert result.exit_code == EXIT_GENERICITY
        assert "💡 Tip:" in result.stderr

    def test_analyze_malformed_file(self):
        """Test a malformed file exits with code 1 and a file tip."""
        path = Path(self.temp_dir.name) / "broken.json"
        path.write_text('{"players": 2, "strategy_counts": [2, 2]')
        result = self.runner.invoke(main, ["analyze", str(path)])
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "File Error" in result.stderr
        assert "strategy_counts" in result.stderr

    def test_analyze_missing_file(self):
        """Test a missing file exits with code 1."""
        result = self.runner.invoke(main, ["analyze", "/nonexistent/game.json"])
        assert result.exit_code == EXIT_INPUT_ERROR

    @patch.dict("os.environ", {"SINKATLAS_STEP": "fast"})
    def test_bad_environment(self):
        """Test an invalid SINKATLAS_* variable stops every command."""
        result = self.runner.invoke(main, ["analyze", self.shapley_path])
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "Configuration Error" in result.stderr

    def test_gen_is_deterministic(self):
        """Test gen writes identical files for equal seeds."""
        paths = [os.path.join(self.temp_dir.name, f"g{k}.json") for k in range(2)]
        for path in paths:
            result = self.runner.invoke(main, ["gen", "zero_sum", "3x3", "--seed", "4", "--out", path])
            assert result.exit_code == 0
            assert "Game written:" in result.stdout
            assert "SHA-256" in result.stdout
        assert Path(paths[0]).read_bytes() == Path(paths[1]).read_bytes()

    def test_gen_invalid(self):
        """Test invalid classes and shapes exit with code 1."""
        out = os.path.join(self.temp_dir.name, "g.json")
        assert self.runner.invoke(main, ["gen", "chaotic", "3x3", "--out", out]).exit_code == EXIT_INPUT_ERROR
        assert self.runner.invoke(main, ["gen", "zero_sum", "2x2x2", "--out", out]).exit_code == EXIT_INPUT_ERROR
        assert self.runner.invoke(main, ["gen", "generic", "3by3", "--out", out]).exit_code == EXIT_INPUT_ERROR

    def test_graph_dot_file(self):
        """Test graph --dot writes a DOT file."""
        dot_path = os.path.join(self.temp_dir.name, "shapley.dot")
        result = self.runner.invoke(main, ["graph", self.shapley_path, "--dot", dot_path])
        assert result.exit_code == 0
        assert "DOT written:" in result.stdout
        assert Path(dot_path).read_text().startswith("digraph")

    def test_graph_json(self):
        """Test graph --json lists SCCs and arcs."""
        result = self.runner.invoke(main, ["graph", self.shapley_path, "--json"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert len(data["sccs"]) == 4
        assert len(data["arcs"]) == 18

    def test_corpus_list(self):
        """Test corpus list shows every id."""
        result = self.runner.invoke(main, ["corpus", "list"])
        assert result.exit_code == 0
        for game_id in corpus_ids():
            assert game_id in result.stdout

    def test_corpus_export(self):
        """Test corpus export writes a loadable game file."""
        out = os.path.join(self.temp_dir.name, "cog.yaml")
        result = self.runner.invoke(main, ["corpus", "export", "cog_fig2", "--out", out])
        assert result.exit_code == 0
        data = yaml.safe_load(Path(out).read_text())
        assert data["strategy_counts"] == [3, 3]

    def test_corpus_export_unknown(self):
        """Test exporting an unknown id exits with code 1."""
        out = os.path.join(self.temp_dir.name, "x.json")
        result = self.runner.invoke(main, ["corpus", "export", "nope", "--out", out])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_simulate_writes_csv(self):
        """Test simulate writes one CSV row per step plus a header."""
        out = os.path.join(self.temp_dir.name, "run.csv")
        result = self.runner.invoke(
            main,
            ["simulate", self.shapley_path, "--tmax", "1", "--step", "0.01", "--out", out],
        )
        assert result.exit_code == 0
        assert "Trajectory written:" in result.stdout
        assert "Content mass sink" in result.stdout
        assert "Nearest pure profile:" in result.stdout
        lines = Path(out).read_text().splitlines()
        assert len(lines) == 102
        assert lines[0].startswith("t,")

    def test_simulate_ensemble(self):
        """Test --ensemble writes one numbered CSV per run."""
        out = os.path.join(self.temp_dir.name, "runs.csv")
        result = self.runner.invoke(
            main,
            ["simulate", self.shapley_path, "--tmax", "0.5", "--step", "0.1", "--ensemble", "2", "--out", out],
        )
        assert result.exit_code == 0
        assert os.path.exists(os.path.join(self.temp_dir.name, "runs_0.csv"))
        assert os.path.exists(os.path.join(self.temp_dir.name, "runs_1.csv"))

    def test_simulate_stop_near(self):
        """Test --stop-near halts the run once the flow is within the radius of the target."""
        path = os.path.join(self.temp_dir.name, "coordination.json")
        save_game(Game.from_bimatrix([[2, 0], [0, 1]], [[2, 0], [0, 1]]), path)
        out = os.path.join(self.temp_dir.name, "near.csv")
        result = self.runner.invoke(
            main,
            [
                "simulate", path, "--start", "0.9,0.1;0.9,0.1", "--tmax", "100", "--step", "0.01",
                "--stop-near", "1,0;1,0", "--out", out,
            ],
        )  # fmt: skip
        assert result.exit_code == 0
        assert "stop: near:0" in result.stdout
        record = read_trajectory_csv(out)
        assert record.final_time < 100.0
        assert record.final_state.distance(MixedProfile.pure((2, 2), (0, 0))) < 1e-3

    def test_simulate_caps_recorded_rows(self):
        """Test the default record interval thins a long run to about MAX_RECORDED_ROWS rows."""
        out = os.path.join(self.temp_dir.name, "long.csv")
        result = self.runner.invoke(
            main,
            ["simulate", self.shapley_path, "--tmax", "15000", "--step", "0.5", "--out", out],
        )
        assert result.exit_code == 0
        lines = Path(out).read_text().splitlines()
        assert len(lines) == MAX_RECORDED_ROWS + 2

    def test_simulate_bad_start(self):
        """Test a start vector of the wrong shape exits with code 1."""
        result = self.runner.invoke(main, ["simulate", self.shapley_path, "--start", "0.5,0.5;1"])
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "Input Error" in result.stderr

    def test_verify_dominance(self):
        """Test verify passes for the dominance game."""
        result = self.runner.invoke(main, ["verify", "dominance_fig6"])
        assert result.exit_code == 0
        assert "dominance_fig6: all" in result.stdout
        assert "❌" not in result.stdout

    def test_verify_unknown_id(self):
        """Test verify of an unknown id exits with code 1."""
        result = self.runner.invoke(main, ["verify", "rock_paper_scissors"])
        assert result.exit_code == EXIT_INPUT_ERROR


class TestParseStart:
    """Test cases for start specifications."""

    def setup_method(self):
        """Set up test fixtures."""
        self.game = get_named_game("dominance_fig6").game

    def test_barycenter(self):
        """Test the barycenter keyword."""
        x = parse_start("barycenter", self.game)
        assert x.dists[1].tolist() == [1 / 3, 1 / 3, 1 / 3]

    def test_random_is_seeded(self):
        """Test random starts are reproducible."""
        assert parse_start("random:3", self.game) == parse_start("random:3", self.game)

    def test_per_player(self):
        """Test per-player vectors separated by semicolons."""
        x = parse_start("0.25,0.75;0.2,0.3,0.5", self.game)
        assert x.dists[0].tolist() == [0.25, 0.75]
        assert x.dists[1].tolist() == [0.2, 0.3, 0.5]

    def test_flat(self):
        """Test a flat comma list."""
        x = parse_start("0.5,0.5,0.2,0.3,0.5", self.game)
        assert x.dists[1].tolist() == [0.2, 0.3, 0.5]

    def test_invalid(self):
        """Test malformed starts are rejected."""
        for text in ("random:abc", "a,b;c,d,e"):
            with pytest.raises(ParameterError):
                parse_start(text, self.game)

    def test_wrong_shape(self):
        """Test a per-player vector must match the game's shape."""
        with pytest.raises(ShapeError):
            parse_start("0.5,0.5;1", self.game)
