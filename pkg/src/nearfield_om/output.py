"""Sweep results and their CSV / JSON serialisation.

CSV layout: one ``#`` provenance line (tool version, config hash), then a
header of ``name_unit`` tokens, then data rows.  Floats are written with
``repr`` so identical inputs give byte-identical files.  Each data file gets
a sidecar ``<name>.meta.json``.
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__


@dataclass
class SweepResult:
    name: str
    columns: list  # "name_unit" tokens
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, token):
        i = self.columns.index(token)
        return [row[i] for row in self.rows]


def _plain(value):
    # numpy scalars -> Python scalars (np.float64 repr is not a plain number)
    return value.item() if hasattr(value, "item") and not isinstance(value, (str, bytes)) else value


def _cell(value):
    value = _plain(value)
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("nan" if math.isnan(value) else repr(value))
    return str(value)


def _json_value(value):
    value = _plain(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return _json_value(obj)


def provenance(config_hash):
    return {"tool": "nearfield-om", "version": __version__, "config_sha256": config_hash}


def write_result(result, out_dir, fmt, config_hash):
    """Write ``result`` into ``out_dir``; returns the data file path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prov = provenance(config_hash)
    meta = {**prov, "name": result.name, "columns": result.columns, "rows": len(result.rows), **jsonable(result.meta)}
    if fmt == "csv":
        path = out_dir / f"{result.name}.csv"
        lines = [f"# nearfield-om {__version__} config_sha256={config_hash}", ",".join(result.columns)]
        lines += [",".join(_cell(v) for v in row) for row in result.rows]
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    elif fmt == "json":
        path = out_dir / f"{result.name}.json"
        payload = {**meta, "data": [dict(zip(result.columns, map(_json_value, row))) for row in result.rows]}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    sidecar = out_dir / f"{result.name}.meta.json"
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def read_csv(path):
    """Parse a CSV written by :func:`write_result` into (provenance line, columns, rows of floats)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [[_parse(v) for v in line.split(",")] for line in lines[2:]]
    return lines[0], lines[1].split(","), rows


def _parse(token):
    try:
        return float(token)
    except ValueError:
        return token
