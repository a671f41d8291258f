"""CSV and JSON output with ``#``-prefixed metadata headers."""
import csv
import io
import json
import math

import numpy as np

__all__ = ["format_csv", "write_text", "read_csv", "to_json"]


def _plain(x):
    """Convert numpy scalars/arrays and enums into JSON-friendly values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "value") and not isinstance(x, (int, float, str)):
        return x.value
    return x


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return repr(f) if f == 0 else f"{f:.15g}"


def format_csv(columns, meta=None):
    """Render an ordered mapping name -> sequence as CSV text.

    Each metadata item becomes a line ``# key: <json>`` above the header row.
    """
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    n = {len(c) for c in cols}
    if len(n) > 1:
        raise ValueError("columns differ in length")
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {json.dumps(_plain(v), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_text(text, path=None, stream=None):
    if path is None or path == "-":
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_csv(path_or_text):
    """Parse CSV written by :func:`format_csv` into (meta, columns)."""
    text = path_or_text
    if "\n" not in path_or_text:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            meta[k] = json.loads(v)
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    head, data = rows[0], rows[1:]
    cols = {}
    for i, name in enumerate(head):
        vals = [r[i] for r in data]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = vals
    return meta, cols
