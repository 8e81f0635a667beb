import csv
import json

import pytest

from nvlab.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def load(path):
    return json.loads(path.read_text())


class TestCensus:
    def test_writes_files_and_inequality_holds(self, tmp_path, capsys):
        code, out, _ = run(capsys, "census", "--Q", 200, "--theta1", 0.2, "--theta2", 0.2, "--out", tmp_path)
        assert code == 0
        s = load(tmp_path / "summary.json")
        assert s["cs_bound"] <= s["weighted_nonvanishing_even"] + 1e-9
        assert s["cs_bound_le_census"] and not s["empty"]
        for key in ("proportion_even", "proportion_odd", "S1", "S2", "reference_value", "mass"):
            assert key in s
        with open(tmp_path / "census.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["q", "parity", "primitive_count", "nonvanishing_count", "weight"]
        assert len(rows) == 2 * s["moduli"]

    def test_doubles_round_trip(self, tmp_path, capsys):
        run(capsys, "moments", "--Q", 80, "--out", tmp_path)
        with open(tmp_path / "moments.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert all(repr(float(r["s2"])) == repr(float(format(float(r["s2"]), ".17g"))) for r in rows)
        raw = (tmp_path / "moments.csv").read_bytes()
        assert b"\r\n" in raw

    def test_invalid_eta_refused(self, tmp_path, capsys):
        code, _, err = run(capsys, "census", "--Q", 200, "--eta1", 0.02, "--out", tmp_path)
        assert code == 2
        assert "7*eta1+eta2<1/12" in err
        assert not (tmp_path / "summary.json").exists()

    def test_progression_needs_force(self, tmp_path, capsys):
        code, _, err = run(capsys, "census", "--Q", 100, "--a", 2, "--D", 3, "--out", tmp_path)
        assert code == 2 and "D<=Q^eta2" in err
        code, _, _ = run(capsys, "census", "--Q", 100, "--a", 2, "--D", 3, "--force", "--out", tmp_path)
        assert code == 0
        assert any("forced" in f for f in load(tmp_path / "summary.json")["flags"])

    def test_empty_window(self, tmp_path, capsys):
        # T = Q makes q = Q the only candidate; an odd progression then leaves nothing
        code, _, _ = run(capsys, "census", "--Q", 100, "--eta1", 1, "--a", 1, "--D", 2, "--force", "--out", tmp_path)
        assert code == 0
        s = load(tmp_path / "summary.json")
        assert s["empty"] and s["moduli"] == 0
        assert (tmp_path / "census.csv").read_text().strip() == "q,parity,primitive_count,nonvanishing_count,weight"

    def test_json_format(self, tmp_path, capsys):
        code, _, _ = run(capsys, "census", "--Q", 60, "--format", "json", "--out", tmp_path)
        assert code == 0 and isinstance(load(tmp_path / "census.json"), list)

    def test_threads_give_identical_files(self, tmp_path, capsys):
        blobs = []
        for t in (1, 4, 8):
            d = tmp_path / f"t{t}"
            run(capsys, "census", "--Q", 150, "--threads", t, "--out", d)
            run(capsys, "moments", "--Q", 150, "--threads", t, "--out", d)
            s, m = load(d / "summary.json"), load(d / "moments.json")
            blobs.append(
                ((d / "census.csv").read_bytes(), (d / "moments.csv").read_bytes(), s["S1"], s["S2"], m["S1"], m["S2"])
            )
        assert blobs[0] == blobs[1] == blobs[2]

    def test_cache_reused(self, tmp_path, capsys):
        cache = tmp_path / "lv.jsonl"
        run(capsys, "census", "--Q", 80, "--cache", cache, "--out", tmp_path / "a")
        n = len(cache.read_text().splitlines())
        run(capsys, "census", "--Q", 80, "--cache", cache, "--out", tmp_path / "b")
        assert len(cache.read_text().splitlines()) == n
        assert (tmp_path / "a" / "census.csv").read_bytes() == (tmp_path / "b" / "census.csv").read_bytes()


class TestMoments:
    def test_report(self, tmp_path, capsys):
        code, _, _ = run(capsys, "moments", "--Q", 120, "--out", tmp_path)
        assert code == 0
        m = load(tmp_path / "moments.json")
        assert m["S2"] >= 0
        assert m["ratio_s2"] == pytest.approx(m["S2"] / m["predict_s2"])
        assert any("lambda3" in f for f in m["flags"])

    def test_config_file_overridden_by_flags(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("Q = 90\ntheta1 = 0.2  # mollifier length\ntheta2 = 0.2\n")
        run(capsys, "moments", "--config", cfg, "--theta2", 0.1, "--out", tmp_path)
        c = load(tmp_path / "moments.json")["config"]
        assert (c["Q"], c["theta1"], c["theta2"]) == (90.0, 0.2, 0.1)

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "moments", "--config", tmp_path / "nope.cfg")
        assert code == 2


class TestOptimize:
    def test_quarter(self, tmp_path, capsys):
        code, _, _ = run(capsys, "optimize", "--theta1", 0.25, "--theta2", 0.25, "--out", tmp_path)
        assert code == 0
        o = load(tmp_path / "optimize.json")
        assert o["ratio"] == pytest.approx(1 / 3, abs=1e-9)
        assert o["p1"][:2] == ["0", "1"] and set(o["p1"][2:]) <= {"0"}
        assert o["c_eta"] == 0 and o["theta_max"] == 0.5

    def test_degree_one(self, tmp_path, capsys):
        run(capsys, "optimize", "--degree", 1, "--out", tmp_path)
        assert load(tmp_path / "optimize.json")["p1"] == ["0", "1"]

    def test_theta_above_max_warns(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "optimize", "--theta1", 0.46, "--eta1", 0.001, "--eta2", 0.001, "--out", tmp_path
        )
        assert code == 0 and "theta_max" in err
        assert load(tmp_path / "optimize.json")["warnings"]

    def test_theta_out_of_range(self, tmp_path, capsys):
        assert run(capsys, "optimize", "--theta1", 0.5, "--out", tmp_path)[0] == 2


class TestTools:
    def test_kernel_table(self, tmp_path, capsys):
        assert run(capsys, "kernel-table", "--points", 20, "--out", tmp_path)[0] == 0
        rows = list(csv.DictReader(open(tmp_path / "kernel_table.csv", newline="")))
        assert len(rows) == 20 and float(rows[0]["Z"]) == pytest.approx(1, abs=1e-2)
        assert load(tmp_path / "kernel.json")["x_star"] > 0

    def test_expsum_bench(self, tmp_path, capsys):
        assert run(capsys, "expsum-bench", "--max-size", 4, "--out", tmp_path)[0] == 0
        rows = list(csv.DictReader(open(tmp_path / "expsum_bench.csv", newline="")))
        assert [r["size"] for r in rows] == ["2", "4"]


class TestSelftest:
    def test_single_suite(self, capsys):
        code, out, _ = run(capsys, "selftest", "--suite", "expsums")
        assert code == 0
        assert out.strip().splitlines() == [l for l in out.strip().splitlines() if l.startswith("PASS expsums")]

    def test_unknown_suite(self, capsys):
        assert run(capsys, "selftest", "--suite", "nope")[0] == 2

    def test_corrupted_cache_fails(self, tmp_path, capsys):
        cache = tmp_path / "lv.jsonl"
        run(capsys, "census", "--Q", 40, "--cache", cache, "--out", tmp_path)
        with open(cache, "a") as fh:
            fh.write("{broken\n")
        code, out, _ = run(capsys, "selftest", "--suite", "cache", "--cache", cache)
        assert code == 1 and out.startswith("FAIL cache")

    @pytest.mark.slow
    def test_default_battery(self, capsys):
        code, out, _ = run(capsys, "selftest")
        assert code == 0
        assert len(out.strip().splitlines()) == 6
