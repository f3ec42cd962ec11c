"""Smoke tests for the mtqueue command line tool.

usage: smoke.py MTQUEUE MODEL_JSON
"""
import json
import os
import subprocess
import sys
import tempfile

BIN, MODEL = sys.argv[1], sys.argv[2]
failures = []


def run(*args):
    return subprocess.run([BIN, *args], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(f"{'ok  ' if cond else 'FAIL'} {name} {detail}")
    if not cond:
        failures.append(name)


with tempfile.TemporaryDirectory() as tmp:
    out_dir = os.path.join(tmp, "example")
    r = run("example", "--out", out_dir)
    check("example exits 0", r.returncode == 0, r.stderr)
    for name in ("limit_p0.csv", "limit_mean.csv", "report.json"):
        check(f"example writes {name}", os.path.exists(os.path.join(out_dir, name)))
    if r.returncode == 0:
        report = json.load(open(os.path.join(out_dir, "report.json")))
        check("report has W = 1", report["W"] == 1.0)
        check("report is certified", report["certified"] is True)

    r = run("truncate", "--model", MODEL, "--target", "1e-6", "--horizon", "7")
    check("truncate exits 0", r.returncode == 0, r.stderr)
    if r.returncode == 0:
        n = json.loads(r.stdout)["n"]
        check("truncate picks n <= 120", n <= 120, f"n = {n}")

    csv = os.path.join(tmp, "bad.csv")
    r = run("solve", "--model", MODEL, "--n", "20", "--t0", "2", "--t1", "1", "--out", csv)
    check("solve with t1 < t0 exits 3", r.returncode == 3, f"got {r.returncode}")
    check("solve with t1 < t0 writes nothing", not os.path.exists(csv))
    try:
        err = json.loads(r.stderr)
        check("precondition error is JSON", err.get("error") == "precondition", r.stderr)
    except json.JSONDecodeError:
        check("precondition error is JSON", False, r.stderr)

    bad = os.path.join(tmp, "bad_model.json")
    doc = json.load(open(MODEL))
    doc["mu"]["trig"][0]["freq"] = "often"
    json.dump(doc, open(bad, "w"))
    r = run("check", "--model", bad)
    check("bad model exits 2", r.returncode == 2, f"got {r.returncode}")
    check("bad model error names the field", "#/mu/trig/0/freq" in r.stderr, r.stderr)

    a = run("simulate", "--model", MODEL, "--times", "0.5,1", "--paths", "2000", "--seed", "9")
    b = run("simulate", "--model", MODEL, "--times", "0.5,1", "--paths", "2000", "--seed", "9")
    check("simulate is deterministic", a.returncode == 0 and a.stdout == b.stdout)

    outs = []
    for i in range(2):
        path = os.path.join(tmp, f"run{i}.csv")
        r = run("solve", "--model", MODEL, "--n", "40", "--t1", "1", "--out", path)
        outs.append(open(path, "rb").read() if r.returncode == 0 else None)
    check("solve output is byte-identical", outs[0] is not None and outs[0] == outs[1])

    r = run("limit", "--model", MODEL, "--n", "60", "--settle", "6", "--tol", "1e-5")
    check("limit exits 0", r.returncode == 0, r.stderr)

sys.exit(1 if failures else 0)
