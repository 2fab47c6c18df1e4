"""Golden tests for the command-line tool: exit statuses, error codes and outputs."""
import itertools
import json
import os
import subprocess
import sys
import tempfile

import numpy as np
from scipy.optimize import linprog

BIN, ROOT = sys.argv[1], sys.argv[2]
WORK = tempfile.mkdtemp(prefix="boundselect_cli_")
failures = []


def run(*args):
    return subprocess.run([BIN, *args], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  [{detail}]" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def expect_error(name, args, status, code):
    r = run(*args)
    try:
        err = json.loads(r.stderr.strip().splitlines()[-1])
    except (ValueError, IndexError):
        err = {}
    check(name, r.returncode == status and err.get("error") == code
          and err.get("exit_status") == status, f"rc={r.returncode} stderr={r.stderr.strip()}")


def write(name, text):
    path = os.path.join(WORK, name)
    with open(path, "w") as f:
        f.write(text)
    return path


def data(name):
    return os.path.join(ROOT, "data", name)


def config(name):
    return os.path.join(ROOT, "configs", name)


# ci happy path
r = run("ci", "--catalog", "manski-binary", "--data", data("toy.csv"), "--rule", "maxlower",
        "--alpha", "0.05", "--draws", "20000")
check("ci exit 0", r.returncode == 0, r.stderr)
if r.returncode == 0:
    rep = json.loads(r.stdout)
    intervals = rep["selections"][0]["intervals"]
    check("ci reports four intervals", len(intervals) == 4)
    check("ci provenance", rep["provenance"]["version"] == "0.1.0")
    for ci in intervals:
        check(f"ci {ci['kind']} ordered", ci["lower"] <= ci["upper"])

# validation errors
expect_error("missing z column", ["ci", "--catalog", "manski-binary", "--data",
             write("noz.csv", "y,d\n1,0\n0,1\n")], 2, "DATA_SCHEMA")
small = "y,d,z\n" + "1,0,0\n0,1,0\n" + "".join(f"{i % 2},{(i // 2) % 2},1\n" for i in range(40))
expect_error("two observations in a stratum",
             ["ci", "--catalog", "manski-binary", "--data", write("small.csv", small)],
             2, "STRATUM_MIN")
expect_error("missing data file", ["ci", "--catalog", "manski-binary", "--data",
             os.path.join(WORK, "absent.csv")], 2, "FILE_NOT_FOUND")
expect_error("malformed LP JSON", ["lp2spec", "--lp", write("bad.json", "{\"A\": [[1,")],
             2, "JSON_PARSE")
expect_error("malformed config JSON", ["simulate", "--config", write("bad_cfg.json", "{")],
             2, "JSON_PARSE")
expect_error("unknown flag", ["ci", "--bogus"], 2, "CONFIG_INVALID")
expect_error("enumeration cap", ["lp2spec", "--lp", data("balke_pearl_latent.json"), "--cap", "100"],
             3, "LP_ENUM_CAP")

# lp2spec against an independent primal LP solve
r = run("lp2spec", "--lp", data("balke_pearl_latent.json"))
check("lp2spec exit 0", r.returncode == 0, r.stderr)
spec = json.loads(r.stdout)
check("lp2spec vertex summary", "vertex_counts" in spec and "provenance" in spec)
lp = json.load(open(data("balke_pearl_latent.json")))
A = np.array(lp["A"], float)
B = np.array(lp["B"], float)
Eq = np.vstack([B, np.ones(B.shape[1])])
rng = np.random.default_rng(3)
worst = 0.0
for _ in range(25):
    q = rng.dirichlet(np.ones(B.shape[1]))
    p = B @ q
    beq = np.append(p, 1.0)
    lo = linprog(A[0], A_eq=Eq, b_eq=beq, bounds=(0, None), method="highs").fun
    hi = -linprog(-A[0], A_eq=Eq, b_eq=beq, bounds=(0, None), method="highs").fun
    L = max(pc["c"] + np.dot(pc["v"], p) for pc in spec["lower"][0])
    U = min(pc["c"] + np.dot(pc["v"], p) for pc in spec["upper"][0])
    worst = max(worst, abs(L - lo), abs(U - hi))
check("lp2spec matches primal LP", worst <= 1e-8, f"max deviation {worst}")

r = run("lp2spec", "--lp", data("zero_objective_lp.json"))
z = json.loads(r.stdout) if r.returncode == 0 else {}
check("zero objective gives a trivial spec",
      r.returncode == 0 and len(z["lower"][0]) == 1 and len(z["upper"][0]) == 1
      and all(abs(v) < 1e-12 for v in z["lower"][0][0]["v"]) and abs(z["lower"][0][0]["c"]) < 1e-12)

# validate
r = run("validate", "--catalog", "balke-pearl", "--config", config("table1.json"))
check("validate exit 0", r.returncode == 0, r.stderr)

# simulate determinism and outputs
outputs = []
for tag, threads in (("a", "1"), ("b", "1"), ("c", "3")):
    prefix = os.path.join(WORK, "det_" + tag)
    r = run("simulate", "--config", config("table1.json"), "--reps", "50", "--seed", "7",
            "--draws", "5000", "--threads", threads, "--out-prefix", prefix)
    check(f"simulate run {tag}", r.returncode == 0, r.stderr)
    outputs.append([open(prefix + ext, "rb").read() for ext in (".csv", ".json", ".dat")])
check("identical outputs across runs", outputs[0] == outputs[1])
check("identical outputs across thread counts", outputs[0] == outputs[2])
header = outputs[0][0].decode().splitlines()[0]
check("csv provenance header", header.startswith("# boundselect 0.1.0 config_hash=")
      and "seed=7" in header)

prefix = os.path.join(WORK, "fig2")
r = run("simulate", "--config", config("figure2.json"), "--reps", "50", "--draws", "5000",
        "--out-prefix", prefix)
check("figure2 run", r.returncode == 0, r.stderr)
rows = [l.split(",") for l in open(prefix + ".csv").read().splitlines()[2:]]
for dgp in ("calibrated", "uniform", "informative"):
    n = sum(1 for row in rows if row[1] == dgp and row[3] == "length_ratio")
    check(f"figure2 ratio points for {dgp}", n == 15, str(n))
proj = [row for row in rows if row[2] == "projection" and row[3] == "length_ratio"]
check("projection self-ratio is one", all(float(row[5]) == 1.0 for row in proj))

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
