"""CSV traces and JSON sidecars.

Floats are written with ``repr`` so identical runs give byte-identical files
and values round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .runner import IterationRecord

HEADER = IterationRecord.CSV_FIELDS


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_trace(path, trace) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for rec in trace:
            w.writerow([_fmt(getattr(rec, f)) for f in HEADER])


def _parse(v, cast=float):
    return None if v == "" else cast(v)


def read_trace(path) -> list:
    """Load a trace CSV back into :class:`IterationRecord` objects (no ``D_step``)."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"trace {path} lacks columns {sorted(missing)}")
        out = []
        for row in reader:
            out.append(IterationRecord(
                k=int(row["k"]), residual=float(row["residual"]),
                kl_to_truth=_parse(row["kl_to_truth"]), D_to_truth=_parse(row["D_to_truth"]),
                l1_error=_parse(row["l1_error"]), mass=float(row["mass"]),
                ln_ck=float(row["ln_ck"]), clamp_events=int(row["clamp_events"])))
    return out


def write_sidecar(path, meta: dict) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_sidecar(path) -> dict:
    return json.loads(Path(path).read_text())
