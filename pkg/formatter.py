from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List

from exact_linalg import CountingMeasure, SparseIntMatrix
from lamplighter import GElement, HElement, format_g, format_h


def fraction_str(value: Any) -> str:
    return str(Fraction(value))


def float_str(value: float) -> str:
    return f"{value:.12g}"


def to_jsonable(obj: Any) -> Any:
    """Exact rationals become "num/den" strings, floats keep 12 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, float):
        return float(float_str(obj))
    if isinstance(obj, HElement):
        return format_h(obj)
    if isinstance(obj, GElement):
        return format_g(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _value_str(value: Any) -> str:
    return str(value) if isinstance(value, int) else float_str(value)


def csv_table(header: List[str], rows: Iterable[List[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def measure_csv(measure: CountingMeasure) -> str:
    return csv_table(
        ["lambda", "multiplicity", "fraction_num", "fraction_den"],
        ([_value_str(a.value), a.multiplicity, a.fraction.numerator, a.fraction.denominator] for a in measure.pairs),
    )


def measure_json(measure: CountingMeasure, extra: Dict[str, Any] = None) -> str:
    payload = {
        "level": measure.level,
        "dim": measure.dim,
        "pairs": [
            {"lambda": a.value, "multiplicity": a.multiplicity, "fraction": a.fraction} for a in measure.pairs
        ],
        **(extra or {}),
    }
    return dumps(payload)


def atoms_csv(entries: Iterable[Any]) -> str:
    return csv_table(
        ["p", "q", "lambda", "weight_num", "weight_den"],
        ([a.p, a.q, float_str(a.lam), a.weight.numerator, a.weight.denominator] for a in entries),
    )


def kernel_csv(report: Dict[str, Any]) -> str:
    target = fraction_str(report["target"])
    rows = []
    for row in report["rows"]:
        if not row.get("ok"):
            rows.append([row["level"], "", "", target, "", row.get("error", "")])
            continue
        frac = row["fraction"]
        rows.append([row["level"], frac.numerator, frac.denominator, target, float_str(float(row["distance"])), ""])
    return csv_table(["level", "fraction_num", "fraction_den", "target", "distance", "error"], rows)


def export_matrix(m: SparseIntMatrix) -> str:
    """Coordinate text: the dimension, then one "row col value" line per entry in row-major order."""
    lines = [str(m.dim)]
    lines.extend(f"{r} {c} {v}" for r, c, v in m.entries)
    return "\n".join(lines) + "\n"
