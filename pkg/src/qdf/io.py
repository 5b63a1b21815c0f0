"""Reading and writing code files: JSON containers, alist and DEM text."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .codes import ClassicalCode, CssCode, StabiliserCode
from .dem import DemParseError, DetectorModel, format_dem, parse_dem
from .gf2 import BitMatrix


class CodeFormatError(ValueError):
    pass


def code_to_dict(code, **extra: Any) -> dict[str, Any]:
    if isinstance(code, ClassicalCode):
        fmt, mats = "classical", {"G": code.G, "H": code.H}
    elif isinstance(code, CssCode):
        fmt, mats = "css", {"HX": code.HX, "HZ": code.HZ, "LX": code.LX, "LZ": code.LZ}
    elif isinstance(code, StabiliserCode):
        fmt, mats = "stabiliser", {"S": code.S, "L": code.L}
    else:
        raise TypeError(f"cannot serialise {type(code).__name__}")
    out = {"name": code.name, "n": code.n, "k": code.k, "format": fmt,
           "matrices": {key: m.to_strings() for key, m in mats.items()}}
    out.update(extra)
    return out


def _matrix(mats: dict, key: str, cols: int) -> BitMatrix | None:
    if key not in mats or mats[key] is None:
        return None
    return BitMatrix.from_strings(mats[key], cols)


def code_from_dict(d: dict[str, Any]):
    try:
        fmt = d["format"]
        n = int(d["n"])
        mats = d["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeFormatError(f"missing field in code file: {exc}") from exc
    name = d.get("name", "")
    try:
        if fmt == "classical":
            code = ClassicalCode(_matrix(mats, "G", n), _matrix(mats, "H", n), name=name)
        elif fmt == "css":
            code = CssCode(_matrix(mats, "HX", n), _matrix(mats, "HZ", n),
                           _matrix(mats, "LX", n), _matrix(mats, "LZ", n), name=name)
        elif fmt == "stabiliser":
            code = StabiliserCode(_matrix(mats, "S", 2 * n), _matrix(mats, "L", 2 * n), name=name)
        else:
            raise CodeFormatError(f"unknown code format {fmt!r}")
    except CodeFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise CodeFormatError(str(exc)) from exc
    if "k" in d and int(d["k"]) != code.k:
        raise CodeFormatError(f"declared k={d['k']} but matrices give k={code.k}")
    return code


def write_alist(H: BitMatrix) -> str:
    d = H.to_dense()
    m, n = d.shape
    cols = [np.flatnonzero(d[:, j]) + 1 for j in range(n)]
    rows = [np.flatnonzero(d[i]) + 1 for i in range(m)]
    cmax = max((len(c) for c in cols), default=0)
    rmax = max((len(r) for r in rows), default=0)
    pad = lambda xs, w: " ".join(str(int(x)) for x in list(xs) + [0] * (w - len(xs)))
    lines = [f"{n} {m}", f"{cmax} {rmax}",
             " ".join(str(len(c)) for c in cols), " ".join(str(len(r)) for r in rows)]
    lines += [pad(c, cmax) for c in cols]
    lines += [pad(r, rmax) for r in rows]
    return "\n".join(lines) + "\n"


def read_alist(text: str) -> BitMatrix:
    """Parse a MacKay alist check matrix (first line ``columns rows``)."""
    try:
        tok = [int(t) for t in text.split()]
        n, m = tok[0], tok[1]
        pos = 4 + n + m
        d = np.zeros((m, n), np.uint8)
        cmax = tok[2]
        col_w = tok[4 : 4 + n]
        for j in range(n):
            entries = tok[pos : pos + cmax]
            pos += cmax
            nz = [e for e in entries if e]
            if len(nz) != col_w[j]:
                raise CodeFormatError(f"column {j} weight does not match its index list")
            for e in nz:
                d[e - 1, j] = 1
        rmax = tok[3]
        for i in range(m):
            entries = [e for e in tok[pos : pos + rmax] if e]
            pos += rmax
            if sorted(e - 1 for e in entries) != list(np.flatnonzero(d[i])):
                raise CodeFormatError(f"row {i} disagrees with the column lists")
    except (IndexError, ValueError) as exc:
        raise CodeFormatError(f"malformed alist: {exc}") from exc
    return BitMatrix.from_dense(d)


def load_code(path: str | Path):
    """Load a code or detector model, choosing the reader by file suffix."""
    path = Path(path)
    text = path.read_text()
    suffix = path.suffix.lower()
    if suffix == ".json":
        try:
            return code_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CodeFormatError(f"{path}: invalid JSON: {exc}") from exc
    if suffix == ".alist":
        return ClassicalCode(H=read_alist(text), name=path.stem)
    if suffix == ".dem":
        return parse_dem(text, name=path.stem)
    raise CodeFormatError(f"{path}: unknown file type {suffix!r}")


def dump_code(code, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(code_to_dict(code), indent=1) + "\n"
    if fmt == "alist":
        if isinstance(code, ClassicalCode):
            return write_alist(code.H)
        if isinstance(code, DetectorModel):
            return write_alist(code.H)
        raise CodeFormatError("alist export needs a classical code or detector model")
    if fmt == "dem":
        if not isinstance(code, DetectorModel):
            raise CodeFormatError("dem export needs a detector model")
        return format_dem(code)
    raise CodeFormatError(f"unknown format {fmt!r}")


__all__ = ["CodeFormatError", "DemParseError", "code_from_dict", "code_to_dict", "dump_code",
           "load_code", "read_alist", "write_alist"]
