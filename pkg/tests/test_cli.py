import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from instructgen.cli import main
from instructgen.resources import pneumatic_manifest_path


def run_cli(*argv) -> int:
    return main(list(argv))


class TestWalk:
    def test_writes_one_snapshot_per_step(self, tmp_path, capsys):
        golden = tmp_path / "goldens"
        assert run_cli("walk", "--golden-dir", str(golden)) == 0
        files = sorted(p.name for p in golden.glob("*.txt"))
        assert files == [f"step_{i:02d}.txt" for i in range(1, 7)]
        out = capsys.readouterr().out
        assert "step 1: fixture, small_screw, 4" in out

    def test_check_passes_against_fresh_goldens(self, tmp_path):
        golden = tmp_path / "goldens"
        assert run_cli("walk", "--golden-dir", str(golden)) == 0
        assert run_cli("walk", "--golden-dir", str(golden), "--check") == 0

    def test_runs_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("walk", "--golden-dir", str(a))
        run_cli("walk", "--golden-dir", str(b))
        for path in sorted(a.glob("*.txt")):
            assert path.read_bytes() == (b / path.name).read_bytes()

    def test_check_flags_tampered_golden(self, tmp_path, capsys):
        golden = tmp_path / "goldens"
        run_cli("walk", "--golden-dir", str(golden))
        victim = golden / "step_03.txt"
        victim.write_bytes(victim.read_bytes().replace(b"active=1", b"active=9", 1))
        assert run_cli("walk", "--golden-dir", str(golden), "--check") == 1
        err = capsys.readouterr().err
        assert "step_03.txt" in err and "bytes" in err

    def test_unextractable_step_names_the_step(self, tmp_path, capsys):
        script = tmp_path / "steps.txt"
        script.write_text("Attach the widget to the gizmo.\n", encoding="utf-8")
        code = run_cli("walk", "--steps", str(script), "--golden-dir", str(tmp_path / "g"))
        assert code == 1
        assert "step 1" in capsys.readouterr().err

    def test_missing_manifest_names_the_path(self, tmp_path, capsys):
        code = run_cli(
            "walk", "--manifest", "/nonexistent/manifest.json", "--golden-dir", str(tmp_path)
        )
        assert code == 1
        assert "/nonexistent/manifest.json" in capsys.readouterr().err


class TestDataset:
    def test_seeded_runs_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("dataset", "--n", "50", "--seed", "7", "--out", str(a)) == 0
        assert run_cli("dataset", "--n", "50", "--seed", "7", "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_record_count(self, tmp_path):
        out = tmp_path / "corpus.json"
        assert run_cli("dataset", "--n", "25", "--seed", "1", "--out", str(out)) == 0
        assert len(json.loads(out.read_text(encoding="utf-8"))) == 25

    def test_bad_n_is_data_error(self, tmp_path):
        assert run_cli("dataset", "--n", "0", "--out", str(tmp_path / "x.json")) == 1


class TestValidate:
    def test_bundled_manifest_is_clean(self, capsys):
        assert run_cli("validate") == 0
        assert "ok" in capsys.readouterr().out

    def test_violations_exit_nonzero(self, tmp_path, capsys):
        data = json.loads(pneumatic_manifest_path().read_text(encoding="utf-8"))
        data["components"][1]["name"] = "fixture"  # duplicate
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data), encoding="utf-8")
        assert run_cli("validate", "--manifest", str(bad)) == 1
        assert "duplicate-name" in capsys.readouterr().out


class TestUsageErrors:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            run_cli("walk", "--golden-dir", "x", "--frobnicate")
        assert exc_info.value.code == 2

    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            run_cli()
        assert exc_info.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc_info:
            run_cli("frobnicate")
        assert exc_info.value.code == 2


def _wait_port_line(proc, timeout=15.0) -> int:
    deadline = time.time() + timeout
    while time.time() < deadline:
        line = proc.stdout.readline()
        if not line:
            break
        if line.startswith("listening on :"):
            return int(line.strip().rsplit(":", 1)[1])
    raise AssertionError("server did not announce its port")


class TestServe:
    def test_serves_and_announces_port(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "instructgen.cli", "serve", "--port", "0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
        )
        try:
            port = _wait_port_line(proc)
            body = httpx.get(f"http://127.0.0.1:{port}/steps", timeout=5).json()
            assert len(body["steps"]) == 6
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_missing_manifest_exits_1(self):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "instructgen.cli",
                "serve",
                "--manifest",
                "/nonexistent/manifest.json",
            ],
            capture_output=True,
            text=True,
            timeout=30,
        )
        assert proc.returncode == 1
        assert "/nonexistent/manifest.json" in proc.stderr

    def test_port_in_use_exits_1(self):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "instructgen.cli", "serve", "--port", str(port)],
                capture_output=True,
                text=True,
                timeout=30,
            )
            assert proc.returncode == 1
            assert "cannot bind port" in proc.stderr
        finally:
            blocker.close()
