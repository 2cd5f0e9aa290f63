"""Export the two n = 16 programs for row Q to MPS for an external solver.

    python scripts/export_q.py OUTDIR

A solution file written by any solver in the `<name> <value>` format can
then be certified with `infratio reproduce-table --rows Q --q-solution
OUTDIR/Q-{sym}.sol`.
"""

import resource
import sys
import time
from pathlib import Path

from infratio.access import catalog
from infratio.lp import assemble, export_lp
from infratio.table import table_row


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print(__doc__, file=sys.stderr)
        return 2
    out = Path(argv[0])
    out.mkdir(parents=True, exist_ok=True)
    row = table_row("Q")
    for key, sym in (("without", "none"), ("with", "equalities")):
        t0 = time.monotonic()
        p = assemble(catalog("Q"), row.specs(), sym)
        path = out / f"Q-{key}.mps"
        export_lp(p, "mps", path)
        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
        print(f"{path}: {len(p.columns)} columns, {path.stat().st_size / 2 ** 20:.0f} MiB, "
              f"{time.monotonic() - t0:.1f} s, peak RSS {rss:.0f} MiB")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
