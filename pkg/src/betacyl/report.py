"""Serialization helpers: outward-rounded decimals, CSV and JSON emitters."""

from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from fractions import Fraction
from typing import IO, Iterable, Sequence

from .reals import Enclosure

SCHEMA_VERSION = 1
DIGITS = 20


def decimal_bound(x: Fraction, up: bool, digits: int = DIGITS) -> str:
    """x rounded to ``digits`` significant digits, toward +inf if ``up`` else -inf."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    num, den = x.numerator, x.denominator
    e10 = int((abs(num).bit_length() - den.bit_length()) * 0.30102999566398120)
    q = digits - e10
    if q >= 0:
        top, bottom = num * 10 ** q, den
    else:
        top, bottom = num, den * 10 ** -q
    v = -((-top) // bottom) if up else top // bottom
    return str(Decimal(v).scaleb(-q).normalize())


def fmt_exact(x: Fraction) -> str:
    """An exact rendering: integers as-is, other rationals as p/q."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def enclosure_pair(enc: Enclosure, digits: int = DIGITS) -> list[str]:
    return [decimal_bound(enc.lo, False, digits), decimal_bound(enc.hi, True, digits)]


def _cell(value, column: str) -> str:
    if isinstance(value, Fraction):
        return decimal_bound(value, column.endswith("_hi"))
    if isinstance(value, bool):
        return "1" if value else "0"
    if value is None:
        return ""
    return str(value)


def write_csv(rows: Iterable[dict], columns: Sequence[str], out: IO[str]) -> None:
    """Rows as CSV; Fraction cells in *_lo / *_hi columns are rounded outward."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c), c) for c in columns])


def csv_text(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


def _default(obj):
    if isinstance(obj, Fraction):
        return fmt_exact(obj)
    if isinstance(obj, Enclosure):
        return enclosure_pair(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_text(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION}
    body.update(payload)
    return json.dumps(body, indent=2, default=_default) + "\n"
