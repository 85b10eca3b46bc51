"""CLI subcommands, exit codes, and report formats."""

import shutil
from pathlib import Path

import pytest

from amalgam.cli import main

ROOT = Path(__file__).parent.parent
CONFIGS = ROOT / "configs"


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    for name in ("girth6.cls", "girth6-ck.cfg", "triangle.g", "c2-example.act"):
        shutil.copy(CONFIGS / name, tmp_path / name)
    return tmp_path


class TestClassCheck:
    def test_reject_triangle(self, workdir, capsys):
        code = main([
            "class", "check", str(workdir / "triangle.g"),
            "--class", str(workdir / "girth6.cls"),
        ])
        out = capsys.readouterr().out
        assert code == 1
        assert out.startswith("REJECT")
        assert "C3" in out

    def test_accept_six_cycle(self, workdir, capsys):
        g = workdir / "c6.g"
        g.write_text("graph 6\ne 0 1\ne 0 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n")
        code = main(["class", "check", str(g), "--class",
                     str(workdir / "girth6.cls")])
        assert code == 0
        assert "ACCEPT" in capsys.readouterr().out

    def test_bad_graph_file(self, workdir, capsys):
        bad = workdir / "bad.g"
        bad.write_text("e 0 1\n")
        code = main(["class", "check", str(bad), "--class",
                     str(workdir / "girth6.cls")])
        assert code == 2


class TestGenericBuild:
    def test_build_and_reload(self, workdir, capsys):
        out = workdir / "a.gapprox"
        code = main([
            "generic", "build", "--class", str(workdir / "girth6.cls"),
            "--budget", "12", "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        assert text.startswith("graph 12")
        assert "step" in text

    def test_props_verify(self, workdir, capsys):
        code = main([
            "props", "verify", "--class", str(workdir / "girth6.cls"),
            "--budget", "12",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "girth: PASS" in out
        assert "vertex-transitivity: PASS" in out
        assert "assumption:" in out


class TestIndep:
    def test_adjacent_pair(self, workdir, capsys):
        code = main([
            "indep", "0", "1", "--weak",
            "--class", str(workdir / "girth6.cls"), "--budget", "12",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "weakly independent: true; d-independent: false" in out

    def test_distance_two_pair(self, workdir, capsys):
        main([
            "indep", "0", "2",
            "--class", str(workdir / "girth6.cls"), "--budget", "12",
        ])
        out = capsys.readouterr().out
        assert "weakly independent: true; d-independent: true" in out


class TestMeasure:
    def test_decompose_example(self, workdir, capsys):
        code = main(["measure", "decompose", str(workdir / "c2-example.act")])
        out = capsys.readouterr().out
        assert code == 0
        assert "weights 3/5, 2/5" in out
        assert "ergodic: false" in out

    def test_certify_zero(self, workdir, capsys):
        code = main([
            "measure", "certify-zero", "dist=2(x,a)",
            "--class", str(workdir / "girth6.cls"), "--budget", "12",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "square-root-of-zero" in out
        assert out.strip().endswith(
            "= 0 for every invariant Keisler measure on the fragment"
        )

    def test_certify_zero_unknown(self, workdir, capsys):
        code = main([
            "measure", "certify-zero", "!E(x,a)",
            "--class", str(workdir / "girth6.cls"), "--budget", "12",
        ])
        assert code == 0
        assert "UNKNOWN" in capsys.readouterr().out

    def test_er_check_exact(self, capsys):
        code = main(["measure", "er-check"])
        out = capsys.readouterr().out
        assert code == 0
        assert "deviation 0" in out
        assert "pass yes" in out

    def test_er_check_sample(self, capsys):
        code = main(["measure", "er-check", "--sample", "20000", "--seed", "7"])
        assert code == 0
        assert "stderr" in capsys.readouterr().out


class TestRun:
    def test_invalid_budget_exits_two(self, workdir, capsys):
        cfg = workdir / "bad.cfg"
        cfg.write_text("class girth6.cls\nbudget 0\n")
        assert main(["run", str(cfg)]) == 2

    def test_missing_class_exits_two(self, workdir):
        cfg = workdir / "bad2.cfg"
        cfg.write_text("class nope.cls\nbudget 5\n")
        assert main(["run", str(cfg)]) == 2

    def test_full_run_passes(self, workdir, capsys):
        code = main(["run", str(workdir / "girth6-ck.cfg")])
        out = capsys.readouterr().out
        assert code == 0
        assert "overall: PASS" in out
        assert "dist=2(x,v0): NONFORKING ZERO" in out

    def test_records_format(self, workdir, capsys):
        code = main(["run", str(workdir / "girth6-ck.cfg"),
                     "--format", "records"])
        out = capsys.readouterr().out
        assert code == 0
        assert all(line.startswith("record ") for line in out.splitlines() if line)
        assert (workdir / "out" / "report.records").exists()

    def test_reruns_byte_identical(self, workdir, capsys):
        main(["run", str(workdir / "girth6-ck.cfg")])
        first = {
            p.name: p.read_bytes()
            for p in (workdir / "out").iterdir()
        }
        shutil.rmtree(workdir / "out")
        main(["run", str(workdir / "girth6-ck.cfg")])
        second = {
            p.name: p.read_bytes()
            for p in (workdir / "out").iterdir()
        }
        assert first == second
