import json
import subprocess
import sys

import pytest

from artifact import cache
from artifact.cli import run
from artifact.zeta import frobenius_charpoly
from artifact.forms import DiagonalCubicForm


def _run_json(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_envelope_and_disc_example(capsys):
    code, env = _run_json(["disc", "--fermat", "6", "--c", "1,2,3,4,5,6", "--norm", "appendix-code", "--factor"], capsys)
    assert code == 0
    for key in ("tool", "version", "command", "config", "result", "started", "elapsed_seconds", "provenance"):
        assert key in env
    assert env["command"] == "disc"
    assert env["result"]["factorization"] == "3^13 * 996001 * 1898591 * 107541241 * 1722583559"


def test_phi_search_limit_is_inclusive(capsys):
    code, env = _run_json(["lab-phi-search", "--limit", "19999"], capsys)
    assert code == 0
    assert env["result"] == {"max_tested": 19999, "max_discovered": 330}


def test_zeta_low_depth(capsys):
    code, env = _run_json(["zeta", "--fermat", "6", "--c", "1,2,3,4,5,6", "--p", "7", "--depth", "2"], capsys)
    assert code == 0
    assert env["result"]["charpoly"][:3] == [1, 17, 147]


def test_domain_error_exit_code(capsys):
    code = run(["zeta", "--fermat", "6", "--c", "1,2,3,4,5,6", "--p", "3", "--depth", "1"])
    captured = capsys.readouterr()
    assert code == 2
    assert json.loads(captured.out)["error"]["type"]
    assert "artifact:" in captured.err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["disc", "--fermat", "6"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 1


def test_csv_ternary_scan(tmp_path):
    out = tmp_path / "scan.csv"
    assert run(["lab-ternary", "--X", "10", "--scan", "--H", "3", "--samples", "5", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "h,k,X,count,bound,ratio"
    assert len(lines) == 6


def test_selftest_fast(capsys):
    code, env = _run_json(["selftest", "--level", "fast"], capsys)
    assert code == 0
    assert env["result"]["ok"]
    assert all(c["ok"] for c in env["result"]["checks"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "artifact", "lab-phi-search", "--limit", "100"], capture_output=True, text=True, check=True
    )
    assert json.loads(proc.stdout)["result"]["max_tested"] == 100


def test_cache_cold_and_warm_agree(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.CACHE_ENV, str(tmp_path))
    F = DiagonalCubicForm.fermat(6)
    cold = frobenius_charpoly(F, (1, 2, 3, 4, 5, 6), 5, depth=2).to_json()
    assert any(tmp_path.rglob("*.json"))
    warm = frobenius_charpoly(F, (1, 2, 3, 4, 5, 6), 5, depth=2).to_json()
    assert cold == warm


def test_cache_ignores_other_versions(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.CACHE_ENV, str(tmp_path))
    cache.store("probe", (1, 2), {"x": 1})
    assert cache.load("probe", (1, 2)) == {"x": 1}
    monkeypatch.setattr(cache, "CACHE_VERSION", cache.CACHE_VERSION + 1)
    assert cache.load("probe", (1, 2)) is None
    assert cache.cached("probe", (1, 2), lambda: {"x": 2}) == ({"x": 2}, False)
    assert cache.cached("probe", (1, 2), lambda: {"x": 3}) == ({"x": 2}, True)


def test_no_cache_flag(tmp_path, capsys):
    code, env = _run_json(["expsum", "--F", "1,1,1,1", "--c", "1,2,3,4", "--n", "7", "--no-cache", "--cache-dir", str(tmp_path)], capsys)
    cache.set_enabled(True)
    assert code == 0
    assert env["provenance"] == {"cache_dir": str(tmp_path), "cache_enabled": False}


def test_small_x_delta_is_a_domain_error(capsys):
    assert run(["delta-verify", "--F", "1,1,1,1", "--X", "1"]) == 2
    assert "c_Q" in json.loads(capsys.readouterr().out)["error"]["message"]


def test_no_abbreviated_options(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["lab-phi-search", "--lim", "50"])
    assert exc.value.code == 1


def test_second_moment_trend_command(capsys):
    code, env = _run_json(["dirichlet-stat", "--fermat", "4", "--kind", "second-moment-trend", "--Z", "2", "--Y", "8", "--N", "4"], capsys)
    assert code == 0
    assert env["result"]["window_ends"] == list(range(2, 9))
