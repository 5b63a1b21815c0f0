"""Benchmark runs: one record per (code, method), aggregate tables and plot data."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .dem import DetectorModel
from .io import load_code
from .methods import JobConfig, run_method
from .results import INF, NoResultError, Status

NO_RESULT = "NoResult"
ERROR = "Error"


@dataclass
class BenchRecord:
    dataset: str
    codeName: str
    n: int
    k: int
    method: str
    status: str
    d_lower: float
    d_upper: float
    trials: int
    trialsAtLowest: int
    elapsed: float
    seed: int

    def __post_init__(self) -> None:
        if self.trialsAtLowest > self.trials:
            raise ValueError("trialsAtLowest cannot exceed trials")

    @property
    def trialSuccessRate(self) -> float:
        return self.trialsAtLowest / self.trials if self.trials else 0.0

    @property
    def timePerTrial(self) -> float | None:
        return self.elapsed / self.trials if self.trials else None

    @property
    def timePerSuccessfulTrial(self) -> float | None:
        return self.elapsed / self.trialsAtLowest if self.trialsAtLowest else None


def _size(code) -> tuple[int, int]:
    if isinstance(code, DetectorModel):
        return code.num_errors, code.num_observables
    return code.n, code.k


def run_job(cfg: JobConfig, dataset: str = "", reference: float | None = None,
            code=None) -> tuple[BenchRecord, list[float]]:
    """Run one job and never raise: failures become the record's status.

    Returns the record and the per-trial weights, which let the caller
    recount ``trialsAtLowest`` once the reference distance is known.
    """
    name = Path(cfg.path).stem if cfg.path else ""
    n = k = 0
    weights: list[float] = []
    try:
        if code is None:
            code = load_code(cfg.path)
        name = getattr(code, "name", "") or name
        n, k = _size(code)
        res = run_method(code, cfg)
    except NoResultError:
        return BenchRecord(dataset, name, n, k, cfg.method, NO_RESULT, 1, INF, 1, 0, 0.0, cfg.seed), [INF]
    except Exception as exc:  # noqa: BLE001 - recorded, never propagated
        rec = BenchRecord(dataset, name, n, k, cfg.method, ERROR, 1, INF, 1, 0, 0.0, cfg.seed)
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec, [INF]
    if res.stats is not None and res.stats.iter_count:
        weights = list(res.stats.trial_weights)
    else:
        weights = [res.d_upper]
    rec = BenchRecord(dataset, name, n, k, cfg.method, str(res.status), res.d_lower, res.d_upper,
                      len(weights), 0, res.elapsed, cfg.seed)
    if reference is not None:
        rec.trialsAtLowest = sum(1 for w in weights if w == reference)
    return rec, weights


def load_manifest(directory: str | Path) -> dict:
    """Dataset index: ``{"name", "members": [{"file", "reference"?}]}``.

    Without ``manifest.json`` every code file in the directory is a member.
    """
    directory = Path(directory)
    path = directory / "manifest.json"
    if path.exists():
        data = json.loads(path.read_text())
        data.setdefault("name", directory.name)
        return data
    files = sorted(p.name for p in directory.iterdir() if p.suffix in (".json", ".alist", ".dem"))
    return {"name": directory.name, "members": [{"file": f} for f in files]}


def run_bench(directory: str | Path, methods: list[str], max_time: float | None = None,
              iters: int | None = None, seed: int = 0, rep: int | None = None, basis: str = "Z",
              threads: int = 1, workers: int = 1) -> list[BenchRecord]:
    """Every method on every manifest member, records in input order.

    The reference distance of a code is the lowest upper bound returned by
    any method (or the manifest's value when lower).
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    jobs = []
    for member in manifest["members"]:
        for method in methods:
            cfg = JobConfig(method, str(directory / member["file"]), max_time, iters, seed, rep, basis, threads)
            jobs.append((member, cfg))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outs = list(pool.map(lambda job: run_job(job[1], manifest["name"]), jobs))
    by_file: dict[str, float] = {}
    for (member, _), (rec, _) in zip(jobs, outs):
        ref = member.get("reference", INF)
        by_file[member["file"]] = min(by_file.get(member["file"], ref), ref, rec.d_upper)
    records = []
    for (member, _), (rec, weights) in zip(jobs, outs):
        ref = by_file[member["file"]]
        rec.trialsAtLowest = sum(1 for w in weights if w == ref) if ref < INF else 0
        records.append(rec)
    return records


FIELDS = [f.name for f in fields(BenchRecord)]


def _num(x: float) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, float) and x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def records_to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in records:
        row = asdict(r)
        w.writerow([_num(row[f]) if isinstance(row[f], float) else row[f] for f in FIELDS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(BenchRecord(
            row["dataset"], row["codeName"], int(row["n"]), int(row["k"]), row["method"], row["status"],
            _parse_bound(row["d_lower"]), _parse_bound(row["d_upper"]), int(row["trials"]),
            int(row["trialsAtLowest"]), float(row["elapsed"]), int(row["seed"])))
    return out


def _parse_bound(s: str) -> float:
    x = float(s)
    return int(x) if x != INF and x.is_integer() else x


REPORT_COLUMNS = ["dataset", "method", "codes", "resultReturned", "completedInTime", "atLowestDistance",
                  "overallSuccessRate", "totalTime", "timePerTrial", "timePerSuccessfulTrial"]
SERIES_COLUMNS = ["dataset", "codeName", "n", "method", "trialSuccessRate", "timePerTrial",
                  "timePerSuccessfulTrial"]


def _blank(x: float | None) -> str:
    return "" if x is None else f"{x:.6g}"


def aggregate(records: list[BenchRecord]) -> list[dict]:
    """Per (dataset, method) table.

    ``completedInTime`` counts Exact and UpperOnly records, i.e. runs that
    finished their work rather than being cut short.  ``atLowestDistance``
    counts records whose upper bound equals the code's reference, which is
    the minimum upper bound over all methods.  ``overallSuccessRate`` is
    that count over the number of codes.
    """
    ref: dict[tuple[str, str], float] = {}
    for r in records:
        key = (r.dataset, r.codeName)
        ref[key] = min(ref.get(key, INF), r.d_upper)
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.dataset, r.method), []).append(r)
    rows = []
    for (dataset, method), rs in groups.items():
        trials = sum(r.trials for r in rs)
        hits = sum(r.trialsAtLowest for r in rs)
        total = sum(r.elapsed for r in rs)
        lowest = sum(1 for r in rs if r.d_upper < INF and r.d_upper == ref[(r.dataset, r.codeName)])
        rows.append({
            "dataset": dataset, "method": method, "codes": len(rs),
            "resultReturned": sum(1 for r in rs if r.d_upper < INF),
            "completedInTime": sum(1 for r in rs if r.status in (Status.EXACT.value, Status.UPPER_ONLY.value)),
            "atLowestDistance": lowest,
            "overallSuccessRate": f"{lowest / len(rs):.6g}",
            "totalTime": f"{total:.6g}",
            "timePerTrial": _blank(total / trials if trials else None),
            "timePerSuccessfulTrial": _blank(total / hits if hits else None),
        })
    return rows


def emit_report(records: list[BenchRecord]) -> tuple[str, str]:
    """Aggregate table CSV and per-code plot-series CSV."""
    if not records:
        raise ValueError("no records to report")
    buf = io.StringIO()
    w = csv.DictWriter(buf, REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(aggregate(records))
    sbuf = io.StringIO()
    sw = csv.writer(sbuf, lineterminator="\n")
    sw.writerow(SERIES_COLUMNS)
    for r in records:
        sw.writerow([r.dataset, r.codeName, r.n, r.method, f"{r.trialSuccessRate:.6g}",
                     _blank(r.timePerTrial), _blank(r.timePerSuccessfulTrial)])
    return buf.getvalue(), sbuf.getvalue()


_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


def render_svg(records: list[BenchRecord], width: int = 640, height: int = 420) -> str:
    """Scatter of code length against log time per successful trial, one colour per method."""
    pts = [(r.n, r.timePerSuccessfulTrial, r.method) for r in records if r.timePerSuccessfulTrial]
    methods = sorted({m for *_, m in pts})
    pad = 50
    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle">n</text>',
           f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" '
           f'text-anchor="middle">log10 time per successful trial (s)</text>']
    if pts:
        xs = [p[0] for p in pts]
        ys = [math.log10(max(p[1], 1e-9)) for p in pts]
        x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
        y0, y1 = min(ys), max(ys) if max(ys) > min(ys) else min(ys) + 1
        for (x, _, m), y in zip(pts, ys):
            cx = pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
            cy = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
            colour = _COLOURS[methods.index(m) % len(_COLOURS)]
            svg.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="{colour}"/>')
        for i, m in enumerate(methods):
            svg.append(f'<text x="{width - pad}" y="{pad + 14 * i}" text-anchor="end" '
                       f'fill="{_COLOURS[i % len(_COLOURS)]}">{m}</text>')
    svg.append("</svg>")
    return "\n".join(svg) + "\n"


__all__ = ["BenchRecord", "JobConfig", "run_job", "run_bench", "emit_report", "records_to_csv",
           "records_from_csv", "render_svg", "load_manifest"]
