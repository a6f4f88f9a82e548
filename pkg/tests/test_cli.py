import subprocess
import sys
from pathlib import Path

from conftest import EXAMPLE, EXAMPLE_WIN

EXPECTED_EXAMPLE = """WINNING: no
{2}
{3}
{WIN}
rank 1: play a on {3}
rank 1: play a on {WIN}
rank 2: play a on {2}
"""

EXPECTED_EXAMPLE_WIN = """WINNING: yes
{1}
{2}
{3}
{WIN}
rank 1: play a on {1}
rank 1: play a on {3}
rank 1: play a on {WIN}
rank 2: play a on {2}
"""


def run_cli(*args, stdin=""):
    return subprocess.run(
        [sys.executable, "-m", "alpaga.cli", *args],
        input=stdin,
        capture_output=True,
        text=True,
        cwd=Path(__file__).resolve().parent.parent,
        timeout=180,
    )


class TestSolve:
    def test_example_output_and_exit_code(self):
        proc = run_cli("solve", "games/example.game")
        assert proc.stdout == EXPECTED_EXAMPLE
        assert proc.returncode == 1

    def test_winning_example(self):
        proc = run_cli("solve", "games/example_win.game")
        assert proc.stdout == EXPECTED_EXAMPLE_WIN
        assert proc.returncode == 0

    def test_implicit_solve_subcommand(self):
        proc = run_cli("games/example.game")
        assert proc.stdout == EXPECTED_EXAMPLE

    def test_enumerative_flag_same_output(self):
        default = run_cli("solve", "games/example_win.game")
        enum = run_cli("solve", "-e", "games/example_win.game")
        assert enum.stdout == default.stdout

    def test_byte_identical_across_runs(self):
        for path in ("games/example.game", "games/example_win.game"):
            a = run_cli("solve", path)
            b = run_cli("solve", path)
            assert a.stdout == b.stdout and a.stderr == b.stderr

    def test_timings_flag(self):
        proc = run_cli("solve", "-t", "games/example.game")
        for phase in ("parse", "encode", "solve", "simplify"):
            assert f"time {phase}: " in proc.stdout

    def test_warnings_flag(self, tmp_path):
        partial = EXAMPLE.replace("2, 3, a\n", "")
        f = tmp_path / "partial.game"
        f.write_text(partial)
        quiet = run_cli("solve", str(f))
        assert "warning" not in quiet.stderr
        loud = run_cli("solve", "-v", str(f))
        assert "warning: added transition: 2, SINK, a" in loud.stderr

    def test_no_totalization_rejects_partial(self, tmp_path):
        partial = EXAMPLE.replace("2, 3, a\n", "")
        f = tmp_path / "partial.game"
        f.write_text(partial)
        proc = run_cli("solve", "-n", str(f))
        assert proc.returncode == 2
        assert "transition relation not total" in proc.stderr

    def test_no_simplification_keeps_table(self):
        # simplification shrinks the table on this game; -s keeps it raw
        plain = run_cli("solve", "games/mutex_c8.game").stdout
        raw = run_cli("solve", "-s", "games/mutex_c8.game").stdout
        assert plain.splitlines()[0] == raw.splitlines()[0] == "WINNING: yes"
        count = lambda out: sum(1 for l in out.splitlines() if l.startswith("rank "))
        assert count(raw) > count(plain)

    def test_parse_error_reports_line(self, tmp_path):
        f = tmp_path / "bad.game"
        f.write_text(EXAMPLE.replace("2, 3, a", "2, 3"))
        proc = run_cli("solve", str(f))
        assert proc.returncode == 2
        assert "line 9" in proc.stderr

    def test_missing_file(self):
        proc = run_cli("solve", "games/definitely-not-here.game")
        assert proc.returncode == 2

    def test_stack_trace_with_debug(self, tmp_path):
        f = tmp_path / "bad.game"
        f.write_text("garbage")
        proc = run_cli("solve", "-r", str(f))
        assert "Traceback" in proc.stderr


class TestOracleCommand:
    def test_losing(self):
        proc = run_cli("oracle", "games/example.game")
        assert proc.stdout == "losing\n"
        assert proc.returncode == 1

    def test_winning(self):
        proc = run_cli("oracle", "games/example_win.game")
        assert proc.stdout == "winning\n"
        assert proc.returncode == 0


class TestGenCommand:
    def test_deterministic(self):
        a = run_cli("gen", "--seed", "7", "--n", "5")
        b = run_cli("gen", "--seed", "7", "--n", "5")
        assert a.stdout == b.stdout and a.returncode == 0

    def test_pipe_to_solve_matches_oracle(self, tmp_path):
        for seed in (7, 8, 9):
            gen = run_cli("gen", "--seed", str(seed), "--n", "5", "--max-priority", "2")
            f = tmp_path / f"g{seed}.game"
            f.write_text(gen.stdout)
            solve = run_cli("solve", "-", stdin=gen.stdout)
            oracle = run_cli("oracle", str(f))
            want = "yes" if oracle.stdout.strip() == "winning" else "no"
            assert solve.stdout.splitlines()[0] == f"WINNING: {want}"


class TestRepl:
    def test_scripted_session(self):
        script = "go\n2\ngo\n1\nquit\n"
        proc = run_cli("solve", "-i", "games/example_win.game", stdin=script)
        out = proc.stdout
        assert "knowledge: {1}" in out
        assert "strategy plays: a" in out
        assert "  1) o1" in out and "  2) o2" in out
        assert "knowledge: {2}" in out
        assert "knowledge: {WIN}" in out
        assert "session over: won" in out

    def test_out_of_range_number_keeps_state(self):
        script = "go\n5\ngo\nquit\n"
        proc = run_cli("solve", "-i", "games/example_win.game", stdin=script)
        assert "no observation numbered 5" in proc.stdout
        assert proc.stdout.count("knowledge: {1}") == 2

    def test_unknown_command_hints_help(self):
        proc = run_cli("solve", "-i", "games/example_win.game", stdin="wat\nquit\n")
        assert "type help" in proc.stdout

    def test_losing_game_prints_notice(self):
        proc = run_cli("solve", "-i", "games/example.game", stdin="go\n")
        assert "losing" in proc.stdout

    def test_random_command(self):
        proc = run_cli(
            "solve", "-i", "games/example_win.game", "--seed", "3",
            stdin="random\nrandom\nrandom\nrandom\nrandom\nquit\n",
        )
        assert proc.returncode == 0
        assert "knowledge:" in proc.stdout

    def test_history_command(self):
        script = "2\nhistory\nquit\n"
        proc = run_cli("solve", "-i", "games/example_win.game", stdin=script)
        assert "1. played a, saw o2, knowledge {2}" in proc.stdout
