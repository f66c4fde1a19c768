"""Drive the batch front end from Python.

Problem files are plain JSON; the same document can be run through
``stieltjes.cli.main`` (what the console script calls) or handed straight
to ``run_task``.  Reports are byte-deterministic, so diffs between runs
mean the inputs changed.
"""

import json
import tempfile

from stieltjes.cli import emit, main, run_task

problem = {
    "task": "semivariation",
    "space": {
        "dimension": 2,
        "field": "real",
        "seminorms": [{"kind": "weighted-one", "weights": [1.0, 1.0]}],
    },
    "functions": {
        "x": {
            "domain": [0.0, 1.0],
            "breakpoints": [0.0, 0.5, 1.0],
            "coefficients": [[[0.0, 0.0]], [[1.0, -2.0]]],
            "values": [[0.0, 0.0], [1.0, -2.0], [1.0, -2.0]],
        }
    },
    "parameters": {"function": "x"},
}

report = run_task(problem)
print("in-process run_task payload:")
print(json.dumps(report.payload, indent=2, sort_keys=True))

print()
print("table emission (level, mesh, value per trace):")
print(emit(report, "table").decode())

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(problem, fh)
    path = fh.name
print(f"console entry point, reading {path}:")
code = main(["--input", path])
print(f"exit code {code}")
