"""CSV/JSON readers and writers used by the command line.

Numbers are written with 12 significant digits. Lines starting with ``#``
carry metadata and are skipped by every reader.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .geometry import Hyperplane, PointSet, canonicalize
from .trajectories import CurveK

PRECISION = 12


class DataError(ValueError):
    """Input that cannot be read or parsed."""

    exit_code = 3

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


def fmt(x: float) -> str:
    return f"{float(x):.{PRECISION}g}"


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}", str(path)) from exc


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_rows(text: str, source: str = "<input>") -> np.ndarray:
    rows = []
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    for lineno, rec in enumerate(csv.reader(lines)):
        rec = [f.strip() for f in rec]
        if not all(_is_number(f) for f in rec):
            if lineno == 0:
                continue  # header
            raise DataError(f"{source}: non-numeric row {lineno + 1}: {rec}", source)
        rows.append([float(f) for f in rec])
    if not rows:
        raise DataError(f"{source}: no data rows", source)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataError(f"{source}: rows have differing lengths {sorted(widths)}", source)
    return np.array(rows)


def points_from_text(text: str, weights: bool = False, source: str = "<input>") -> PointSet:
    M = parse_rows(text, source)
    try:
        if weights:
            if M.shape[1] < 2:
                raise DataError(f"{source}: weight column requested but only one column", source)
            return PointSet(M[:, :-1], M[:, -1])
        return PointSet(M)
    except DataError:
        raise
    except ValueError as exc:
        raise DataError(f"{source}: {exc}", source) from exc


def read_points(path, weights: bool = False) -> PointSet:
    return points_from_text(read_text(path), weights, str(path))


def read_json(path):
    text = read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})", str(path)) from exc


def hyperplane_from_obj(obj, oriented: bool | None = None) -> Hyperplane:
    if isinstance(obj, dict):
        coeffs = obj["coeffs"]
        flag = bool(obj.get("oriented", False))
    else:
        coeffs, flag = obj, False
    if oriented is not None:
        flag = oriented
    return canonicalize(np.asarray(coeffs, dtype=float), flag)


def hyperplane_to_obj(h: Hyperplane) -> dict:
    return {"coeffs": [float(fmt(c)) for c in h.coeffs], "oriented": h.oriented}


def read_hyperplane(path, oriented: bool | None = None) -> Hyperplane:
    obj = read_json(path)
    try:
        return hyperplane_from_obj(obj, oriented)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a hyperplane: {exc}", str(path)) from exc


def read_hyperplanes(path, oriented: bool | None = None) -> list[Hyperplane]:
    obj = read_json(path)
    try:
        if isinstance(obj, dict) or (obj and not isinstance(obj[0], (list, dict))):
            return [hyperplane_from_obj(obj, oriented)]
        return [hyperplane_from_obj(o, oriented) for o in obj]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise DataError(f"{path}: not a hyperplane list: {exc}", str(path)) from exc


def curve_from_obj(obj) -> CurveK:
    if isinstance(obj, dict):
        obj = obj["vertices"]
    return CurveK(np.asarray(obj, dtype=float))


def curve_to_obj(c: CurveK) -> list:
    return [[float(fmt(x)), float(fmt(y))] for x, y in c.vertices]


def read_curve(path) -> CurveK:
    obj = read_json(path)
    try:
        return curve_from_obj(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a curve: {exc}", str(path)) from exc


def read_curves(path) -> list[CurveK]:
    obj = read_json(path)
    try:
        return [curve_from_obj(o) for o in obj]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a curve list: {exc}", str(path)) from exc


def meta_line(meta: dict) -> str:
    return "# hyperdist " + json.dumps(meta, sort_keys=True, separators=(",", ":"))


def read_meta(text: str) -> dict:
    for ln in text.splitlines():
        if ln.startswith("# hyperdist "):
            return json.loads(ln[len("# hyperdist "):])
    return {}


def csv_table(header: list[str], rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    if meta is not None:
        buf.write(meta_line(meta) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
