"""File formats: atoms, laws, samples, curve export, and report dumps.

All CSV output is deterministic byte for byte: fixed header, stable row
order, and floats written as their shortest round-trip decimal (with
integer-valued floats losing the trailing ``.0``, so curve vertices read
``-4`` rather than ``-4.0``).

Formats:

* atoms:   atom_id,weight,f,g            one row per atom
* law:     atom_id,lambda,u1,v1,u2,v2    single-branch rows repeat the point
                                         and store lambda 1 (left endpoint)
                                         or 0 (right endpoint)
* samples: sample_id,atom_id,u,xi,eta    sample_id is the draw index
* curve:   stage,kind,ax,ay,bx,by        walk order, plus an SVG companion

Reports serialize two ways: a flat key=value text block (summary fields
first, then per-check statistic/threshold/pass triples) and CSV rows
``check,statistic,threshold,pass``.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import InputFormatError
from .filtration import Atom, FiltrationModel
from .geometry import Point2, Segment, curve_segments
from .lifting import Branches, LiftedLaw, SamplePair
from .verification import VerificationReport

__all__ = [
    "format_float",
    "ingest_atoms",
    "write_atoms_csv",
    "read_law_csv",
    "write_law_csv",
    "write_samples_csv",
    "export_curve",
    "report_kv_lines",
    "report_csv_rows",
    "write_report_kv",
    "write_report_csv",
]

#: How far the atom weights may drift from summing to 1 before ingestion
#: rejects the file instead of renormalizing.
WEIGHT_RENORM_TOL = 1e-6

_ATOMS_HEADER = ["atom_id", "weight", "f", "g"]
_LAW_HEADER = ["atom_id", "lambda", "u1", "v1", "u2", "v2"]
_SAMPLES_HEADER = ["sample_id", "atom_id", "u", "xi", "eta"]
_CURVE_HEADER = ["stage", "kind", "ax", "ay", "bx", "by"]


def format_float(value: float) -> str:
    """Shortest decimal that round-trips; integral values drop the ``.0``."""
    if value != value or math.isinf(value):
        return repr(value)
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _parse_float(cell: str, path: str, line: int, field: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise InputFormatError(f"{path}:{line}: {field} is not a number: {cell!r}") from None
    if not math.isfinite(value):
        raise InputFormatError(f"{path}:{line}: {field} must be finite, got {cell!r}")
    return value


def _read_rows(path: str | Path, header: list[str]) -> list[tuple[int, list[str]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    got = [cell.strip() for cell in rows[0]]
    if got != header:
        raise InputFormatError(f"{path}:1: expected header {','.join(header)!r}, got {','.join(got)!r}")
    out: list[tuple[int, list[str]]] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(header):
            raise InputFormatError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        out.append((i, [cell.strip() for cell in row]))
    if not out:
        raise InputFormatError(f"{path}: no data rows")
    return out


def ingest_atoms(path: str | Path) -> FiltrationModel:
    """Load an atoms CSV into a model.

    Weights must be positive and sum to 1 within WEIGHT_RENORM_TOL; an
    in-tolerance drift is renormalized away, anything worse is rejected.
    Errors carry the file name and line number.
    """
    rows = _read_rows(path, _ATOMS_HEADER)
    name = str(path)
    seen: set[str] = set()
    parsed: list[tuple[int, str, float, float, float]] = []
    for line, row in rows:
        atom_id = row[0]
        if not atom_id:
            raise InputFormatError(f"{name}:{line}: atom_id must be nonempty")
        if atom_id in seen:
            raise InputFormatError(f"{name}:{line}: duplicate atom_id {atom_id!r}")
        seen.add(atom_id)
        weight = _parse_float(row[1], name, line, "weight")
        if weight <= 0.0:
            raise InputFormatError(f"{name}:{line}: weight must be positive, got {row[1]!r}")
        f = _parse_float(row[2], name, line, "f")
        g = _parse_float(row[3], name, line, "g")
        parsed.append((line, atom_id, weight, f, g))
    total = math.fsum(p[2] for p in parsed)
    if abs(total - 1.0) > WEIGHT_RENORM_TOL:
        raise InputFormatError(
            f"{name}: atom weights sum to {total!r}, outside 1 +- {WEIGHT_RENORM_TOL}"
        )
    atoms = [Atom(atom_id, weight / total, Point2(f, g)) for _, atom_id, weight, f, g in parsed]
    return FiltrationModel(atoms)


def _open_out(path: str | Path) -> TextIO:
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputFormatError(f"cannot write {path}: {exc}") from exc


def write_atoms_csv(model: FiltrationModel, path: str | Path) -> None:
    with _open_out(path) as fh:
        fh.write(",".join(_ATOMS_HEADER) + "\n")
        for atom in model.atoms:
            fh.write(
                f"{atom.id},{format_float(atom.weight)},"
                f"{format_float(atom.payoff.x)},{format_float(atom.payoff.y)}\n"
            )


def write_law_csv(law: LiftedLaw, path: str | Path) -> None:
    """One row per atom, in the law's own atom order.

    Two-branch atoms store lambda and both points.  Single-branch atoms
    repeat their point in both slots, with lambda 1 when the point sits on a
    negative vertical side (x < 0) and 0 otherwise.
    """
    with _open_out(path) as fh:
        fh.write(",".join(_LAW_HEADER) + "\n")
        for atom_id, branch in law.branches.items():
            if "," in atom_id or "\n" in atom_id or '"' in atom_id:
                raise InputFormatError(f"atom id {atom_id!r} is not CSV-safe")
            if len(branch) == 1:
                _, pt = branch[0]
                lam = 1.0 if pt.x < 0.0 else 0.0
                p1 = p2 = pt
            elif len(branch) == 2:
                (lam, p1), (_, p2) = branch
            else:
                raise InputFormatError(f"atom {atom_id!r}: cannot serialize {len(branch)} branches")
            fh.write(
                f"{atom_id},{format_float(lam)},"
                f"{format_float(p1.x)},{format_float(p1.y)},"
                f"{format_float(p2.x)},{format_float(p2.y)}\n"
            )


def read_law_csv(path: str | Path) -> LiftedLaw:
    """Load a law CSV verbatim.

    A row collapses back to a single branch only when both stored points are
    exactly equal and lambda is exactly 0 or 1 (the writer's convention for
    collapsed laws); everything else is kept as two branches with
    probabilities (lambda, 1 - lambda) for the verifier to judge.
    """
    rows = _read_rows(path, _LAW_HEADER)
    name = str(path)
    branches: dict[str, Branches] = {}
    for line, row in rows:
        atom_id = row[0]
        if not atom_id:
            raise InputFormatError(f"{name}:{line}: atom_id must be nonempty")
        if atom_id in branches:
            raise InputFormatError(f"{name}:{line}: duplicate atom_id {atom_id!r}")
        lam = _parse_float(row[1], name, line, "lambda")
        u1 = _parse_float(row[2], name, line, "u1")
        v1 = _parse_float(row[3], name, line, "v1")
        u2 = _parse_float(row[4], name, line, "u2")
        v2 = _parse_float(row[5], name, line, "v2")
        p1 = Point2(u1, v1)
        p2 = Point2(u2, v2)
        if u1 == u2 and v1 == v2 and lam in (0.0, 1.0):
            branches[atom_id] = ((1.0, p1),)
        else:
            branches[atom_id] = ((lam, p1), (1.0 - lam, p2))
    return LiftedLaw(branches)


def write_samples_csv(samples: Sequence[SamplePair], path: str | Path) -> None:
    with _open_out(path) as fh:
        fh.write(",".join(_SAMPLES_HEADER) + "\n")
        for i, s in enumerate(samples):
            fh.write(
                f"{i},{s.atom_id},{format_float(s.u)},"
                f"{format_float(s.xi)},{format_float(s.eta)}\n"
            )


def _svg_path(points: Iterable[tuple[float, float]]) -> str:
    return " ".join(f"{format_float(x)},{format_float(-y)}" for x, y in points)


def _curve_svg(segments: Sequence[Segment], max_stage: int) -> str:
    big = 2.0 ** (max_stage + 1)
    pad = big * 0.05
    lo = -(big + pad)
    span = 2.0 * (big + pad)
    stroke = big / 200.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{format_float(lo)} {format_float(lo)} '
        f'{format_float(span)} {format_float(span)}">',
    ]
    for n in range(1, max_stage + 1):
        side = 2.0 ** (n + 1)
        half = 2.0 ** n
        ring = [(-side, -side), (-side, -half), (side, side), (side, half)]
        parts.append(
            f'<polygon points="{_svg_path(ring)}" fill="none" '
            f'stroke="#8888aa" stroke-width="{format_float(stroke / 2.0)}"/>'
        )
    walk = [segments[0].a.as_tuple()] + [seg.b.as_tuple() for seg in segments]
    parts.append(
        f'<polyline points="{_svg_path(walk)}" fill="none" '
        f'stroke="#cc3311" stroke-width="{format_float(stroke)}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_curve(max_stage: int, path: str | Path) -> None:
    """Write the curve's segments as CSV plus an SVG companion.

    The CSV lists segments in walk order.  The SVG (same stem, .svg suffix)
    draws the walk over the outlines of the nested parallelograms, y axis
    flipped to match screen coordinates.
    """
    segments = curve_segments(max_stage)
    path = Path(path)
    with _open_out(path) as fh:
        fh.write(",".join(_CURVE_HEADER) + "\n")
        for seg in segments:
            fh.write(
                f"{seg.stage},{seg.kind},"
                f"{format_float(seg.a.x)},{format_float(seg.a.y)},"
                f"{format_float(seg.b.x)},{format_float(seg.b.y)}\n"
            )
    svg_path = path.with_suffix(".svg")
    with _open_out(svg_path) as fh:
        fh.write(_curve_svg(segments, max_stage))


def _kv_bool(flag: bool) -> str:
    return "true" if flag else "false"


def report_kv_lines(report: VerificationReport) -> list[str]:
    """Flat key=value serialization: summary fields, then per-check rows."""
    lines = [
        f"overallPass={_kv_bool(report.overall_pass)}",
        f"maxReconstructionError={format_float(report.max_reconstruction_error)}",
        f"condExpMaxResidual={format_float(report.cond_exp_max_residual)}",
        f"minComonotoneProduct={format_float(report.min_comonotone_product)}",
        f"minNormBoundMargin={format_float(report.min_norm_bound_margin)}",
    ]
    for row in report.rows():
        lines.append(f"check.{row.name}.statistic={format_float(row.statistic)}")
        lines.append(f"check.{row.name}.threshold={format_float(row.threshold)}")
        lines.append(f"check.{row.name}.pass={_kv_bool(row.passed)}")
    return lines


def report_csv_rows(report: VerificationReport) -> list[str]:
    lines = ["check,statistic,threshold,pass"]
    for row in report.rows():
        lines.append(
            f"{row.name},{format_float(row.statistic)},"
            f"{format_float(row.threshold)},{_kv_bool(row.passed)}"
        )
    return lines


def write_report_kv(report: VerificationReport, stream: TextIO) -> None:
    for line in report_kv_lines(report):
        stream.write(line + "\n")


def write_report_csv(report: VerificationReport, path: str | Path) -> None:
    with _open_out(path) as fh:
        for line in report_csv_rows(report):
            fh.write(line + "\n")
