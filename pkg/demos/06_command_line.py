"""
Running experiments from the command line
=========================================

The ``verify`` command runs a seeded experiment and writes a JSON report
whose records are reproducible bit for bit. The same runner is available
from Python.
"""

import json

from cutpaste.cli import ExperimentConfig, exit_status, report_diff, run

rep = run(ExperimentConfig("decomposition", q=7, m=2, seeds=[1, 2]))
for rec in rep["records"]:
    print(rec["verdict"], rec["check"], rec["anchor"])
print("exit status:", exit_status(rep))

again = run(ExperimentConfig("decomposition", q=7, m=2, seeds=[1, 2]))
print("records identical on rerun:", report_diff(rep, again) == "")

# shell equivalents:
#   verify equality --q 7 --m 3 --seed 1 --seed 2 --ext-degree 1 --ext-degree 2 --out eq.json
#   verify class-table --q 11
#   verify diff eq.json other.json
print(json.dumps(rep["summary"], indent=2))
