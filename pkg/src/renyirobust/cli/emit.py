"""Serialise a :class:`ResultTable` as CSV, Markdown or JSON.

All three writers are byte-stable: rows follow the table order, floats use
fixed formats and line endings are ``\\n``.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .runner import Cell, ResultTable

CSV_COLUMNS = (
    "analysis", "prior", "c", "epsilon", "class", "a", "d0",
    "value", "std_error", "method", "draws", "flags", "status", "message",
)
FORMATS = ("csv", "markdown", "json")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def fmt_prior(prior) -> str:
    return "" if prior is None else " ".join(fmt(float(v)) for v in prior)


def _method(cell: Cell) -> str:
    if cell.estimate is not None:
        return cell.estimate.method.value
    if cell.calibration is not None:
        return "Solver"
    return ""


def _row(cell: Cell) -> list[str]:
    k, est = cell.key, cell.estimate
    return [
        k.analysis,
        fmt_prior(k.prior),
        fmt(k.c),
        fmt(k.epsilon),
        k.class_tag or "",
        fmt(k.a),
        fmt(k.d0),
        fmt(cell.value),
        fmt(est.std_error) if est is not None else "",
        _method(cell),
        str(est.draws) if est is not None and est.draws else "",
        ";".join(est.flags) if est is not None else "",
        "ok" if cell.ok else "error",
        cell.error or "",
    ]


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cell in table.cells:
        writer.writerow(_row(cell))
    return buf.getvalue()


# --------------------------------------------------------------------------
# markdown
# --------------------------------------------------------------------------


def _row_label(cell: Cell) -> tuple:
    k = cell.key
    if k.prior is None:
        return (("d0", fmt(k.d0)),)
    label = [("prior", f"({', '.join(fmt(float(v)) for v in k.prior)})"), ("c", fmt(k.c))]
    if k.epsilon is not None:
        label.append(("epsilon", fmt(k.epsilon)))
    return tuple(label)


def _col_label(cell: Cell) -> str:
    k = cell.key
    return f"a={fmt(k.a)}" + (f" {k.class_tag}" if k.class_tag else "")


def _md_cell(cell: Cell) -> str:
    if not cell.ok:
        return "error"
    text = fmt(cell.value)
    return f"({text})" if cell.key.analysis == "calibration" else text


def to_markdown(table: ResultTable) -> str:
    out = []
    for analysis in ("curvature", "divergence", "calibration"):
        cells = table.select(analysis)
        if not cells:
            continue
        rows: dict[tuple, dict[str, Cell]] = {}
        columns: list[str] = []
        for cell in cells:
            col = _col_label(cell)
            if col not in columns:
                columns.append(col)
            rows.setdefault(_row_label(cell), {})[col] = cell
        head = [name for name, _ in next(iter(rows))]
        out.append(f"### {analysis}\n")
        out.append("| " + " | ".join(head + columns) + " |")
        out.append("|" + "---|" * (len(head) + len(columns)))
        for label, by_col in rows.items():
            values = [_md_cell(by_col[c]) if c in by_col else "" for c in columns]
            out.append("| " + " | ".join([v for _, v in label] + values) + " |")
        errors = [cell for cell in cells if not cell.ok]
        if errors:
            out.append("")
            for cell in errors:
                where = ", ".join(f"{n}={v}" for n, v in _row_label(cell))
                out.append(f"- {where}, {_col_label(cell)}: {cell.error}")
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


# --------------------------------------------------------------------------
# json
# --------------------------------------------------------------------------


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return x


def _json_cell(cell: Cell) -> dict:
    k, est = cell.key, cell.estimate
    item = {
        "a": k.a,
        "class": k.class_tag,
        "status": "ok" if cell.ok else "error",
        "value": _num(cell.value),
        "display": fmt(cell.value),
        "method": _method(cell),
    }
    if est is not None:
        item.update(std_error=est.std_error, draws=est.draws, flags=list(est.flags), seed=est.seed)
        if est.log_value is not None:
            item["log_value"] = _num(est.log_value)
    if cell.calibration is not None:
        item.update(d0=cell.calibration.d0, solver_iterations=cell.calibration.solver_iterations)
    if cell.error:
        item["message"] = cell.error
    return item


def to_json(table: ResultTable) -> str:
    rows: dict[tuple, dict] = {}
    for cell in table.cells:
        k = cell.key
        rk = (k.analysis, k.prior, k.c, k.epsilon, k.d0 if k.prior is None else None)
        if rk not in rows:
            rows[rk] = {
                "analysis": k.analysis,
                "prior": list(k.prior) if k.prior is not None else None,
                "c": k.c,
                "epsilon": k.epsilon,
                "d0": _num(rk[4]),
                "cells": [],
            }
        rows[rk]["cells"].append(_json_cell(cell))
    doc = {"metadata": table.metadata, "rows": list(rows.values())}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render(table: ResultTable, output_format: str) -> str:
    if output_format == "csv":
        return to_csv(table)
    if output_format == "markdown":
        return to_markdown(table)
    if output_format == "json":
        return to_json(table)
    raise ValueError(f"unknown format {output_format!r}; choose from {FORMATS}")
