"""External float solve: MPS in, ``<name> <value>`` solution file out.

Run as ``python -m infratio.highs_driver problem.mps solution.txt``.  This
is the stand-in for a commercial float solver; the rest of the package only
ever sees the two files.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path


def solve_mps(mps: str | Path, out: str | Path, time_limit: float | None = None,
              method: str = "ipm") -> str:
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", method)
    h.setOptionValue("run_crossover", "on")
    if time_limit is not None:
        h.setOptionValue("time_limit", float(time_limit))
    if h.readModel(str(mps)) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"cannot read {mps}")
    h.run()
    status = h.modelStatusToString(h.getModelStatus()).lower().replace(" ", "_")
    lp = h.getLp()
    sol = h.getSolution()
    with open(out, "w") as fh:
        fh.write(f"status {status}\n")
        if sol.value_valid:
            fh.write(f"objective {h.getInfo().objective_function_value!r}\n")
            for name, v in zip(lp.col_names_, sol.col_value):
                fh.write(f"{name} {v!r}\n")
        if sol.dual_valid:
            for name, v in zip(lp.row_names_, sol.row_dual):
                fh.write(f"{name} {v!r}\n")
    return status


def run_external(mps: str | Path, out: str | Path, time_limit: float | None = None,
                 timeout: float | None = None) -> str:
    """Solve in a child process and return the solver status string."""
    cmd = [sys.executable, "-m", "infratio.highs_driver", str(mps), str(out)]
    if time_limit is not None:
        cmd += ["--time-limit", str(time_limit)]
    subprocess.run(cmd, check=True, timeout=timeout)
    first = Path(out).read_text().split("\n", 1)[0].split()
    return first[1] if len(first) == 2 else "unknown"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="infratio.highs_driver")
    ap.add_argument("mps")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float)
    ap.add_argument("--method", default="ipm", choices=["ipm", "simplex"])
    args = ap.parse_args(argv)
    status = solve_mps(args.mps, args.solution, args.time_limit, args.method)
    return 0 if status == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())
