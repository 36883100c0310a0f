"""CSV and JSON writers with a stable, versioned schema.

Floats are written with 17 significant digits so that every file is
bit-reproducible and round-trips to the exact double.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_rows(path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_stationary_csv(path, states, probs) -> None:
    """Columns: i_S, i_I, prob (one row per state)."""
    _write_rows(path, ["i_S", "i_I", "prob"],
                ([str(s[0]), str(s[1]), _fmt(p)] for s, p in zip(states, probs)))


def write_summary_csv(path, adoption, residual) -> None:
    """Columns: p_S, p_I, p_A, residual."""
    p_s, p_i, p_a = adoption
    _write_rows(path, ["p_S", "p_I", "p_A", "residual"],
                [[_fmt(p_s), _fmt(p_i), _fmt(p_a), _fmt(residual)]])


def write_gradient_csv(path, states, grad) -> None:
    """Columns: i_S, i_I, g_I, g_S."""
    _write_rows(path, ["i_S", "i_I", "g_I", "g_S"],
                ([str(s[0]), str(s[1]), _fmt(g[0]), _fmt(g[1])]
                 for s, g in zip(states, grad)))


def write_sweep_csv(path, axis_names, rows) -> None:
    """One axis column per swept parameter, then adoption, profit, argmax."""
    header = list(axis_names) + ["p_S", "p_I", "p_A", "profit", "argmax"]

    def encode(row):
        return ([_fmt(v) for v in row.values]
                + [_fmt(row.p_s), _fmt(row.p_i), _fmt(row.p_a),
                   _fmt(row.profit), row.argmax])

    _write_rows(path, header, (encode(row) for row in rows))


def write_metadata(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
