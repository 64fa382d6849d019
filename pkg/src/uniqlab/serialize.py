"""Result tables and reproducible CSV/JSON emission.

Every emitted file embeds a hash of the resolved experiment config so a
table can be traced back to the exact run that produced it.  Floats are
written with ``repr``, the shortest representation that round-trips a
double (at most 17 significant digits); line endings are LF.  Re-running
the same config therefore reproduces files byte for byte.
"""

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

ARTIFACT_VERSION = "0.1.0"


def canonical_json(obj) -> str:
    """Deterministic JSON used for hashing: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def _plain(v):
    """Convert numpy scalars/arrays and complexes to JSON-safe values."""
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} cells, table has {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def to_json_obj(self) -> dict:
        return {
            "provenance": _plain(self.provenance),
            "columns": list(self.columns),
            "rows": [[_plain(v) for v in row] for row in self.rows],
        }


def emit(table: ResultTable, path: str, fmt: str) -> None:
    """Write ``table`` to ``path`` as ``csv`` or ``json``."""
    if fmt == "csv":
        emit_csv(table, path)
    elif fmt == "json":
        emit_json(table, path)
    else:
        raise ValueError(f"unknown format {fmt!r} (expected 'csv' or 'json')")


def emit_csv(table: ResultTable, path: str) -> None:
    prov = ",".join(f"{k}={table.provenance[k]}" for k in sorted(table.provenance))
    with open(path, "w", newline="") as fh:
        fh.write(f"# provenance: {prov}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_cell(v) for v in row])


def emit_json(table: ResultTable, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(table.to_json_obj(), fh, sort_keys=True, indent=2)
        fh.write("\n")
