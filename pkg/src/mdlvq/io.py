"""Text formats: ring elements, labeling/catalog/sweep CSV files and JSON documents.

Every CSV writer has a matching parser that validates the header and the
column types, so emitted files round-trip exactly.  Output is deterministic:
fixed column order, ``repr`` floats, sorted JSON keys, no timestamps.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError
from .rings import EisensteinInt, GaussianInt, Quaternion

# ---------------------------------------------------------------------------
# Ring elements

_COMPLEX = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*\*?\s*([iw]))?\s*$")
_PURE = re.compile(r"^\s*([+-]?)\s*(\d*)\s*\*?\s*([iw])\s*$")


def format_element(x) -> str:
    return str(x)


def _parse_complex(text: str, unit: str):
    m = _PURE.match(text)
    if m:
        if m.group(3) != unit:
            raise InputError(f"expected unit {unit!r} in {text!r}")
        b = int(m.group(2) or 1)
        return 0, -b if m.group(1) == "-" else b
    m = _COMPLEX.match(text)
    if not m or m.group(1) is None:
        raise InputError(f"cannot parse ring element {text!r}")
    a = int(m.group(1))
    if m.group(2) is None:
        return a, 0
    if m.group(4) != unit:
        raise InputError(f"expected unit {unit!r} in {text!r}")
    b = int(m.group(3) or 1)
    return a, -b if m.group(2) == "-" else b


def parse_element(text: str, kind: str, L: int):
    """Parse a multiplier for the given base lattice.

    Integers ("3"), Gaussian integers ("2+i", "2-3i"), Eisenstein integers
    ("2+w") and quaternions "(w, x, y, z)" with integer or half-odd entries.
    """
    text = str(text).strip()
    if text.startswith("("):
        if not text.endswith(")"):
            raise InputError(f"unterminated quaternion {text!r}")
        parts = [p.strip() for p in text[1:-1].split(",")]
        if len(parts) != 4:
            raise InputError("quaternions need four components")
        try:
            comps = [Fraction(p) for p in parts]
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad quaternion component in {text!r}") from e
        tag = "Hurwitz" if any(c.denominator != 1 for c in comps) else "Lipschitz"
        return Quaternion(*comps, ring_tag=tag)
    if kind == "A2":
        return EisensteinInt(*_parse_complex(text, "w"))
    if kind == "Zn" and L == 2:
        return GaussianInt(*_parse_complex(text, "i"))
    a, b = _parse_complex(text, "i")
    if b:
        raise InputError(f"{text!r} is not a rational integer")
    return a


# ---------------------------------------------------------------------------
# Generic CSV helpers


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    if v is None:
        return ""
    return str(v)


def write_csv(path_or_buf, header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        if len(r) != len(header):
            raise InputError("row length does not match header")
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if path_or_buf is not None:
        Path(path_or_buf).write_text(text)
    return text


def _read_rows(source) -> tuple[list[str], list[list[str]]]:
    # strings with a newline are CSV text; anything else names a file
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        try:
            text = Path(source).read_text()
        except OSError as e:
            raise InputError(f"cannot read {source}: {e}") from e
    else:
        text = str(source)
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows:
        raise InputError("empty CSV")
    return rows[0], rows[1:]


def _bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise InputError(f"bad boolean {s!r}")
    return s == "true"


def _float(s: str) -> float:
    return math.nan if s == "" else float(s)


# ---------------------------------------------------------------------------
# labeling.csv


def labeling_header(L: int) -> list[str]:
    cols = [f"p{i}" for i in range(L)] + [f"a1_{i}" for i in range(L)] + [f"a2_{i}" for i in range(L)]
    return cols + ["class_id", "cost"]


def write_labeling(path, labeling) -> str:
    """One row per point of the labeling cell: point, both labels (base
    coefficients), the edge class id and the exact cost as a fraction."""
    L = labeling.system.base.dim
    rows = []
    for p, a, b, c, k in zip(
        labeling.points.tolist(), labeling.lam1.tolist(), labeling.lam2.tolist(), labeling.coset_ids.tolist(), labeling.costs
    ):
        rows.append(p + a + b + [c, str(Fraction(k))])
    return write_csv(path, labeling_header(L), rows)


def read_labeling(source) -> dict:
    header, rows = _read_rows(source)
    L = (len(header) - 2) // 3
    if header != labeling_header(L):
        raise InputError("labeling.csv header does not match the schema")
    try:
        ints = np.array([[int(v) for v in r[: 3 * L + 1]] for r in rows], dtype=np.int64).reshape(len(rows), 3 * L + 1)
        costs = [Fraction(r[-1]) for r in rows]
    except ValueError as e:
        raise InputError(f"bad labeling.csv value: {e}") from e
    return {
        "points": ints[:, :L],
        "lam1": ints[:, L : 2 * L],
        "lam2": ints[:, 2 * L : 3 * L],
        "class_id": ints[:, 3 * L],
        "cost": costs,
    }


# ---------------------------------------------------------------------------
# catalog.csv

CATALOG_HEADER = ["kind", "L", "N", "witness", "clean"]


def write_catalog(path, rows) -> str:
    return write_csv(path, CATALOG_HEADER, [[r.kind, r.L, r.N, format_element(r.xi), r.clean] for r in rows])


def read_catalog(source) -> list[dict]:
    header, rows = _read_rows(source)
    if header != CATALOG_HEADER:
        raise InputError("catalog.csv header does not match the schema")
    out = []
    for r in rows:
        kind, L = r[0], int(r[1])
        out.append({"kind": kind, "L": L, "N": int(r[2]), "witness": parse_element(r[3], kind, L), "clean": _bool(r[4])})
    return out


# ---------------------------------------------------------------------------
# rd_curve.csv

SWEEP_HEADER = [
    "sweep",
    "gamma1",
    "gamma2",
    "beta",
    "R0",
    "R1",
    "R2",
    "R0_analytic",
    "R1_analytic",
    "R2_analytic",
    "d0",
    "d1",
    "d2",
    "d0_stderr",
    "d1_stderr",
    "d2_stderr",
    "d0_pred",
    "d1_pred",
    "d2_pred",
    "ratio_measured",
    "ratio_excess",
    "ratio_pred",
    "ozarow_d0",
    "gap_db",
]
_SWEEP_TEXT = {"sweep"}


def write_sweep(path, rows: list[dict]) -> str:
    return write_csv(path, SWEEP_HEADER, [[r.get(k) for k in SWEEP_HEADER] for r in rows])


def read_sweep(source) -> list[dict]:
    header, rows = _read_rows(source)
    if header != SWEEP_HEADER:
        raise InputError("rd_curve.csv header does not match the schema")
    out = []
    for r in rows:
        d = {}
        for k, v in zip(header, r):
            d[k] = v if k in _SWEEP_TEXT else _float(v)
        out.append(d)
    return out


# ---------------------------------------------------------------------------
# JSON documents


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (GaussianInt, EisensteinInt, Quaternion)):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def write_json(path, doc) -> str:
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text)
    return text


def system_document(system) -> dict:
    def sub(s):
        if s is None:
            return None
        d = {"index": s.index, "basis": [list(r) for r in s.basis]}
        if s.similarity is not None:
            d["scale_sq"] = s.similarity.scale_sq
        return d

    return {
        "kind": system.base.kind,
        "L": system.base.dim,
        "xi1": format_element(system.xi1),
        "xi2": format_element(system.xi2),
        "N1": system.N1,
        "N2": system.N2,
        "N_cap": system.N_cap,
        "N_join": system.N_join,
        "N_s": system.N_s,
        "N_lcm": system.N_lcm,
        "sub1": sub(system.sub1),
        "sub2": sub(system.sub2),
        "meet": sub(system.meet),
        "join": sub(system.join),
        "product": sub(system.product),
        "lcm_sub": sub(system.lcm_sub),
    }
