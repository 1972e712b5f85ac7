import json

import numpy as np
import pytest

from primedir import cli, maximal
from primedir.directions import load_direction_set


@pytest.fixture()
def env(tmp_path, monkeypatch):
    monkeypatch.setenv("PD_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


def run(*argv) -> int:
    return cli.main(list(argv))


class TestConstruct:
    def test_writes_valid_file(self, env, capsys):
        out = env / "ds.json"
        assert run("construct", "--n", "8", "--eps", "0.5", "--seed", "7", "--out", str(out)) == 0
        assert "VALID" in capsys.readouterr().out
        ds = load_direction_set(out)
        assert len(ds.vectors) == 8

    def test_same_seed_same_bytes(self, env):
        a, b = env / "a.json", env / "b.json"
        assert run("construct", "--n", "4", "--eps", "1.0", "--seed", "3", "--out", str(a)) == 0
        assert run("construct", "--n", "4", "--eps", "1.0", "--seed", "3", "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_n_one_is_usage_error(self, env):
        assert run("construct", "--n", "1", "--eps", "0.5", "--out", str(env / "x.json")) == 3

    def test_strict_infeasible_is_validation_error(self, env):
        rc = run("construct", "--n", "4", "--eps", "1.0", "--mode", "strict",
                 "--out", str(env / "x.json"))
        assert rc == 2


class TestMultError:
    def test_csv_written(self, env, capsys):
        out = env / "e.csv"
        assert run("mult-error", "--k-list", "10,12", "--grid", "64", "--out", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[1] == "k,D,sup_abs_E,sup_minor_m,argmax_alpha,wall_ms"
        rows = [line.split(",") for line in lines[2:]]
        assert [r[0] for r in rows] == ["10", "12"]
        assert float(rows[0][2]) > float(rows[1][2])  # decreasing sup error

    def test_threads_flag(self, env):
        out = env / "e.csv"
        assert run("mult-error", "--k-list", "10,12", "--grid", "64",
                   "--threads", "2", "--out", str(out)) == 0
        assert len(out.read_text().strip().splitlines()) == 4

    def test_small_d_usage_error(self, env):
        assert run("mult-error", "--k-list", "10", "--d", "16", "--grid", "32",
                   "--out", str(env / "x.csv")) == 3

    def test_cache_created_and_reused(self, env):
        out = env / "e.csv"
        assert run("mult-error", "--k-list", "10", "--grid", "32", "--out", str(out)) == 0
        cache = env / "cache" / "primes_2048.pdpt"
        assert cache.exists()
        stamp = cache.stat().st_mtime_ns
        assert run("mult-error", "--k-list", "10", "--grid", "32", "--out", str(out)) == 0
        assert cache.stat().st_mtime_ns == stamp  # reused, not rebuilt


class TestIncidence:
    def test_scan_and_replay(self, env):
        ds = env / "ds.json"
        rep = env / "rep.json"
        assert run("construct", "--n", "4", "--eps", "1.0", "--seed", "7", "--out", str(ds)) == 0
        assert run("incidence", "--ds", str(ds), "--s", "2", "--out", str(rep)) == 0
        doc = json.loads(rep.read_text())
        assert doc["schema"] == "primedir.overlap_report.v1"
        assert run("incidence", "--ds", str(ds), "--s", "2", "--replay", str(rep)) == 0

    def test_baseline_reaches_family_size(self, env, capsys):
        ds = env / "ds.json"
        rep = env / "rep.json"
        run("construct", "--n", "4", "--eps", "1.0", "--seed", "7", "--out", str(ds))
        capsys.readouterr()
        assert run("incidence", "--ds", str(ds), "--s", "2", "--baseline", "parallel",
                   "--out", str(rep)) == 0
        assert "max_overlap=4" in capsys.readouterr().out

    def test_constructed_below_baseline(self, env):
        ds = env / "ds.json"
        run("construct", "--n", "4", "--eps", "1.0", "--seed", "7", "--out", str(ds))
        rep_c, rep_b = env / "c.json", env / "b.json"
        run("incidence", "--ds", str(ds), "--s", "2", "--out", str(rep_c))
        run("incidence", "--ds", str(ds), "--s", "2", "--baseline", "parallel", "--out", str(rep_b))
        c = json.loads(rep_c.read_text())["max_overlap"]
        b = json.loads(rep_b.read_text())["max_overlap"]
        assert c < b == 4

    def test_r_sweeps(self, env):
        ds = env / "ds.json"
        run("construct", "--n", "4", "--eps", "1.0", "--seed", "7", "--out", str(ds))
        assert run("incidence", "--ds", str(ds), "--s", "2", "--r-sweeps", "3",
                   "--seed", "5", "--out", str(env / "r.json")) == 0

    def test_tampered_ds_is_validation_error(self, env):
        ds = env / "ds.json"
        run("construct", "--n", "4", "--eps", "1.0", "--seed", "7", "--out", str(ds))
        blob = ds.read_text().replace('"kappa": 1', '"kappa": 2')
        bad = env / "bad.json"
        bad.write_text(blob)
        assert run("incidence", "--ds", str(bad), "--s", "2", "--out", str(env / "x.json")) == 2


class TestApply:
    def test_delta_identity_line(self, env, capsys):
        rc = run("apply", "--vectors", "1,0;0,1;1,1;2,1", "--l", "512",
                 "--k-min", "5", "--k-max", "6", "--delta", "--method", "spatial")
        assert rc == 0
        out = capsys.readouterr().out
        assert "delta-spread" in out and "disjoint_precondition=True" in out
        line = next(l for l in out.splitlines() if l.startswith("delta-spread"))
        rel = float(line.split("rel=")[1].split()[0])
        assert rel <= 1e-10

    def test_grid_file_output(self, env):
        out = env / "m.pdgf"
        csv_out = env / "m.csv"
        rc = run("apply", "--vectors", "1,0;0,1", "--l", "32", "--k-min", "5",
                 "--k-max", "6", "--delta", "--out", str(out), "--csv", str(csv_out))
        assert rc == 0
        g = maximal.load_grid_function(out)
        assert g.L == 32
        assert np.abs(g.values.imag).max() == 0.0
        assert len(csv_out.read_text().strip().splitlines()) == 32

    def test_profile_preset(self, env, capsys):
        rc = run("apply", "--profile", "desk-small", "--vectors", "1,0;0,1", "--delta")
        assert rc == 0
        assert "delta-spread" in capsys.readouterr().out

    def test_missing_input_usage(self, env):
        assert run("apply", "--vectors", "1,0", "--k-min", "5", "--k-max", "6") == 3

    def test_input_roundtrip(self, env):
        f = maximal.GridFunction.random(32, np.random.default_rng(0))
        src = env / "f.pdgf"
        maximal.save_grid_function(f, src)
        out = env / "out.pdgf"
        rc = run("apply", "--vectors", "1,0;0,1", "--l", "32", "--k-min", "5",
                 "--k-max", "6", "--input", str(src), "--out", str(out))
        assert rc == 0
        assert maximal.load_grid_function(out).L == 32


class TestNormSweep:
    def test_monotone_table(self, env, capsys):
        out = env / "sweep.csv"
        rc = run("norm-sweep", "--n-list", "2,4,8", "--eps", "0.5", "--seed", "7",
                 "--l", "32", "--k-min", "5", "--k-max", "6", "--trials", "2",
                 "--out", str(out))
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("schema,")
        per_n = {}
        for row in lines[2:]:
            n, fam, ratio, _ = row.split(",", 3)
            per_n.setdefault(int(n), []).append(float(ratio))
        ns = sorted(per_n)
        overall = [max(per_n[n]) for n in ns]
        assert all(b >= a - 1e-12 for a, b in zip(overall, overall[1:]))


class TestSelftest:
    def test_clean_build_exits_zero(self, env, capsys):
        assert run("selftest") == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
