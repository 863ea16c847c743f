# Copyright 2026 The adas-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exit codes and end-to-end plumbing of the sim command line."""

import os
import pathlib
import subprocess
import sys
import tempfile

SIM = sys.argv[1]
ROOT = pathlib.Path(sys.argv[2])

failures = []


def run(*args, env=None):
    return subprocess.run([SIM, *args], capture_output=True, text=True, env=env)


def expect(name, proc, code, needle=None):
    ok = proc.returncode == code and (needle is None or needle in proc.stdout + proc.stderr)
    print(f"{'ok  ' if ok else 'FAIL'} {name}: exit {proc.returncode}")
    if not ok:
        failures.append(name)
        print(proc.stdout[-2000:], proc.stderr[-2000:])


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    expect("run", run("run", "--scenario", "S4", "--fault", "rd", "--interventions",
                      "driver,aeb-indep", "--seed", "7"), 0, "outcome=")
    expect("run scenario file", run("run", "--scenario", str(ROOT / "scenarios" / "s5.toml"),
                                    "--seed", "3", "--out", str(tmp / "one")), 0, "scenario=S5")
    assert (tmp / "one" / "events.csv").exists()
    expect("unknown layer", run("run", "--interventions", "warp"), 2)
    expect("unknown scenario", run("run", "--scenario", "S9"), 2)
    expect("ml without model", run("run", "--interventions", "ml"), 2)
    expect("bad flag", run("run", "--nope"), 2)
    expect("missing config", run("campaign", "--config", str(tmp / "none.toml"), "--out",
                                 str(tmp / "r")), 3)

    bad = tmp / "bad.toml"
    bad.write_text("[campaign]\nrepetitions = -1\n")
    expect("invalid config", run("campaign", "--config", str(bad), "--out", str(tmp / "r")), 2)

    small = tmp / "small.toml"
    small.write_text(
        "[campaign]\nrepetitions = 1\nscenarios = [\"S1\", \"S4\"]\ntimeseries_reps = 1\n"
        "[fault]\nkinds = [\"rd\"]\n"
        "[interventions]\nrows = [\"none\", \"aeb-indep\"]\nt_react_sweep = []\nfriction_sweep = []\n")
    env = dict(os.environ, SIM_THREADS="1")
    expect("campaign", run("campaign", "--config", str(small), "--out", str(tmp / "res"), env=env), 0)
    for name in ("summary.csv", "fault_free.csv", "summary.md", "runs.csv"):
        if not (tmp / "res" / name).exists():
            failures.append("missing " + name)
    expect("report markdown", run("report", "--in", str(tmp / "res"), "--format", "markdown"), 0,
           "| all | aeb-indep |")
    expect("report csv", run("report", "--in", str(tmp / "res"), "--format", "csv"), 0, "group,row")
    expect("report bad format", run("report", "--in", str(tmp / "res"), "--format", "pdf"), 2)
    expect("report missing dir", run("report", "--in", str(tmp / "nothing")), 3)
    expect("bad SIM_THREADS", run("campaign", "--config", str(small), "--out", str(tmp / "r2"),
                                  env=dict(os.environ, SIM_THREADS="zero")), 2)

    expect("train", run("train-predictor", "--traces", str(tmp / "res" / "faultfree"), "--out",
                        str(tmp / "model.bin"), "--min-traces", "1"), 0, "trained on 4 traces")
    expect("train too few", run("train-predictor", "--traces", str(tmp / "res" / "faultfree"),
                                "--out", str(tmp / "m2.bin")), 2)
    expect("run ml", run("run", "--scenario", "S1", "--fault", "rd", "--interventions", "ml",
                         "--model", str(tmp / "model.bin")), 0, "outcome=")
    expect("train missing dir", run("train-predictor", "--traces", str(tmp / "nothing"), "--out",
                                    str(tmp / "m3.bin")), 3)

sys.exit(1 if failures else 0)
