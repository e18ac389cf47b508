import json
import os
import subprocess
import sys

from ecdensity import cli


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "ecdensity.cli", *args],
                          capture_output=True, text=True)


def test_verify_averages_family1(tmp_path):
    out = os.path.join(tmp_path, "avg.csv")
    rc = cli.run(["verify-averages", "--family", "1", "--pmax", "13",
                  "--m1max", "4", "--out", out])
    assert rc == 0
    lines = open(out).read().strip().splitlines()
    assert lines[0] == "family,m1,m2,p,closed,brute,equal"
    assert all(line.endswith(",true") for line in lines[1:])


def test_verify_averages_family2(tmp_path):
    out = os.path.join(tmp_path, "avg2.csv")
    assert cli.run(["verify-averages", "--family", "2", "--pmax", "13",
                    "--out", out]) == 0
    rows = [l.split(",") for l in open(out).read().strip().splitlines()[1:]]
    flags = {r[-1] for r in rows}
    assert "false" not in flags


def test_traces_csv(tmp_path):
    out = os.path.join(tmp_path, "tr.csv")
    assert cli.run(["traces", "--jmax", "12", "--pmax", "5", "--out", out]) == 0
    rows = open(out).read().strip().splitlines()
    assert "12,2,-24,1" in rows


def test_euler_product_json(tmp_path):
    out = os.path.join(tmp_path, "ep.json")
    rc = cli.run(["euler-product", "--family", "2", "--alpha", "0.1+0.2j",
                  "--gamma", "0.05", "--prime-cutoff", "2000", "--out", out])
    assert rc == 0
    payload = json.loads(open(out).read())
    assert set(payload) == {"value_re", "value_im", "tail_bound", "P", "M"}
    assert payload["P"] == 2000


def test_predict_density_csv_and_plot(tmp_path):
    out = os.path.join(tmp_path, "den.csv")
    plot = os.path.join(tmp_path, "den.gp")
    rc = cli.run(["predict-density", "--family", "1", "--X", "1e8",
                  "--tau-min", "0.5", "--tau-max", "1.5", "--tau-steps", "5",
                  "--out", out, "--plot-script", plot])
    assert rc == 0
    lines = open(out).read().strip().splitlines()
    assert lines[0] == "tau,smooth,taylor,catalog,delta_mass"
    assert len(lines) == 6
    assert all(line.endswith(",0.5") for line in lines[1:])
    assert "plot" in open(plot).read()


def test_zeros_json(tmp_path):
    out = os.path.join(tmp_path, "z.json")
    rc = cli.run(["zeros", "--t-param", "1", "--height", "4", "--out", out])
    assert rc == 0
    payload = json.loads(open(out).read())
    assert payload["conductor"] == 1352 and payload["conductor_confirmed"]
    assert payload["central_multiplicity"] == 1
    assert all(g > 0 for g in payload["ordinates"])


def test_empirical_csv(tmp_path):
    out = os.path.join(tmp_path, "emp.csv")
    rc = cli.run(["empirical", "--t-range", "1:1", "--X", "2e6", "--out", out])
    assert rc == 0
    lines = open(out).read().strip().splitlines()
    assert lines[0] == "t,conductor,central_contribution,contribution"
    assert lines[-1].startswith("aggregate")


def test_bsd_json(tmp_path):
    out = os.path.join(tmp_path, "bsd.json")
    rc = cli.run(["bsd", "--t-param", "13", "--x-max", "20000", "--out", out])
    assert rc == 0
    payload = json.loads(open(out).read())
    assert 0.3 < payload["gap"] < 1.7


def test_exit_codes_and_error_json():
    r = run_cli("euler-product", "--family", "7")
    assert r.returncode == 2
    err = [l for l in r.stderr.splitlines() if l.startswith("{")]
    assert err and json.loads(err[-1])["kind"] == "config"
    r = run_cli("--badflag")
    assert r.returncode == 2
    r = run_cli("predict-density", "--format", "yaml")
    assert r.returncode == 2


def test_config_merge_and_override(tmp_path):
    cfg = os.path.join(tmp_path, "run.cfg")
    with open(cfg, "w") as fh:
        fh.write("# defaults\ntraces.jmax = 4\npmax = 5\n")
    out1 = os.path.join(tmp_path, "a.csv")
    assert cli.run(["--config", cfg, "traces", "--out", out1]) == 0
    assert len(open(out1).read().strip().splitlines()) == 1 + 3 * 2
    out2 = os.path.join(tmp_path, "b.csv")
    assert cli.run(["--config", cfg, "traces", "--jmax", "12", "--out", out2]) == 0
    assert len(open(out2).read().strip().splitlines()) == 1 + 3 * 6
    bad = os.path.join(tmp_path, "bad.cfg")
    with open(bad, "w") as fh:
        fh.write("nosuchkey = 3\n")
    assert cli.run(["--config", bad, "traces"]) == 2


def test_deterministic_output(tmp_path):
    outs = []
    for name in ("r1.csv", "r2.csv"):
        path = os.path.join(tmp_path, name)
        assert cli.run(["predict-density", "--family", "1", "--X", "1e8",
                        "--tau-min", "0.2", "--tau-max", "2.0",
                        "--tau-steps", "4", "--out", path]) == 0
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]


def test_empirical_jobs_deterministic(tmp_path):
    outs = []
    for jobs, name in (("1", "j1.csv"), ("2", "j2.csv")):
        path = os.path.join(tmp_path, name)
        rc = run_cli("empirical", "--t-range=-11:1", "--X", "2e6",
                     "--jobs", jobs, "--out", path)
        assert rc.returncode == 0
        outs.append(open(path, "rb").read())
    assert outs[0] == outs[1]


def test_predict_density_json(tmp_path):
    out = os.path.join(tmp_path, "den.json")
    rc = cli.run(["predict-density", "--family", "1", "--X", "1e8",
                  "--tau-min", "0.5", "--tau-max", "1.0", "--tau-steps", "3",
                  "--format", "json", "--test-function", "fejer", "--out", out])
    assert rc == 0
    payload = json.loads(open(out).read())
    assert payload["delta_mass"] == 0.5
    assert len(payload["rows"]) == 3 and len(payload["rows"][0]) == 5
