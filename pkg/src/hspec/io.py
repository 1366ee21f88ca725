"""Matrix Market files, JSON reports (schema version 1) and eval input specs."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import NonSquare, ParseError
from .harness import CampaignReport, Counterexample, GenConfig, LawStats
from .laws import ENTRYWISE, LawInput, LawReport, Tolerances
from .matcore import NonnegMatrix, Permutation, Weights, from_rows
from .spectral import Functional

SCHEMA_VERSION = "1"

# --------------------------------------------------------------------------
# Matrix Market


def _parse_number(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line) from None


def _parse_index(tok: str, line: int, bound: int) -> int:
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"not an integer index: {tok!r}", line) from None
    if not 1 <= i <= bound:
        raise ParseError(f"index {i} outside 1..{bound}", line)
    return i


def parse_matrix_market(text: str) -> NonnegMatrix:
    """Parse ``array`` or ``coordinate`` real general Matrix Market text."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 5 or head[0].lower() != "%%matrixmarket" or head[1].lower() != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix <format> real general' header", 1)
    fmt, field, symmetry = (h.lower() for h in head[2:])
    if fmt not in ("array", "coordinate"):
        raise ParseError(f"unsupported format {fmt!r}", 1)
    if field not in ("real", "integer", "double"):
        raise ParseError(f"unsupported field {field!r}", 1)
    if symmetry != "general":
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1)

    body = [
        (k + 1, ln.split())
        for k, ln in enumerate(lines)
        if k > 0 and ln.strip() and not ln.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line", len(lines))
    size_line, size = body[0]
    want = 2 if fmt == "array" else 3
    if len(size) != want:
        raise ParseError(f"size line needs {want} integers", size_line)
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise ParseError("size line needs integers", size_line) from None
    rows, cols = dims[0], dims[1]
    if rows < 1 or cols < 1:
        raise ParseError("dimensions must be positive", size_line)
    if rows != cols:
        raise NonSquare(f"matrix is {rows}x{cols}")
    n = rows
    a = np.zeros((n, n))
    entries = body[1:]
    if fmt == "array":
        values = [(ln, tok) for ln, toks in entries for tok in toks]
        if len(values) != n * n:
            last = entries[-1][0] if entries else size_line
            raise ParseError(f"expected {n * n} values, found {len(values)}", last)
        flat = [_parse_number(tok, ln) for ln, tok in values]
        a[:, :] = np.array(flat).reshape((n, n), order="F")
    else:
        nnz = dims[2]
        if len(entries) != nnz:
            last = entries[-1][0] if entries else size_line
            raise ParseError(f"expected {nnz} entries, found {len(entries)}", last)
        seen = set()
        for ln, toks in entries:
            if len(toks) != 3:
                raise ParseError("coordinate entries are 'row col value'", ln)
            i, j = _parse_index(toks[0], ln, n), _parse_index(toks[1], ln, n)
            if (i, j) in seen:
                raise ParseError(f"duplicate entry ({i}, {j})", ln)
            seen.add((i, j))
            a[i - 1, j - 1] = _parse_number(toks[2], ln)
    return NonnegMatrix(a)


def load_matrix(path) -> NonnegMatrix:
    return parse_matrix_market(Path(path).read_text())


def format_matrix_market(A: NonnegMatrix, fmt: str = "array") -> str:
    n = A.n
    out = [f"%%MatrixMarket matrix {fmt} real general"]
    if fmt == "array":
        out.append(f"{n} {n}")
        out += [repr(float(x)) for x in A.entries.ravel(order="F")]
    elif fmt == "coordinate":
        nz = np.argwhere(A.entries != 0)
        out.append(f"{n} {n} {len(nz)}")
        out += [f"{i + 1} {j + 1} {float(A.entries[i, j])!r}" for i, j in nz]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(out) + "\n"


def save_matrix(A: NonnegMatrix, path, fmt: str = "array") -> None:
    Path(path).write_text(format_matrix_market(A, fmt))


# --------------------------------------------------------------------------
# LawInput <-> JSON


def input_to_dict(inp: LawInput) -> dict:
    d: dict[str, Any] = {"matrices": [K.tolist() for K in inp.matrices]}
    if inp.grid is not None:
        d["grid"] = [[K.tolist() for K in row] for row in inp.grid]
    if inp.weights is not None:
        d["weights"] = list(inp.weights.alphas)
    if inp.tau is not None:
        d["tau"] = list(inp.tau.image)
    if inp.nu is not None:
        d["nu"] = list(inp.nu.image)
    d["exponents"] = dict(inp.exponents)
    d["functional"] = inp.functional.value if inp.functional else None
    if inp.diag_perturbations is not None:
        d["diag_perturbations"] = [list(x) for x in inp.diag_perturbations]
    return d


def _matrix_from(spec, base: Path | None) -> NonnegMatrix:
    if isinstance(spec, str):
        p = Path(spec)
        if base is not None and not p.is_absolute():
            p = base / p
        return load_matrix(p)
    return from_rows(spec)


def input_from_dict(d: dict, base: Path | None = None) -> LawInput:
    """Build a LawInput; matrix entries are inline rows or Matrix Market paths."""
    known = {"law", "matrices", "grid", "weights", "tau", "nu", "exponents", "functional", "diag_perturbations"}
    extra = set(d) - known
    if extra:
        raise ValueError(f"unknown keys in input spec: {sorted(extra)}")
    grid = d.get("grid")
    f = d.get("functional")
    exps = {}
    for k, v in (d.get("exponents") or {}).items():
        exps[k] = int(v) if k in ("m", "l", "depth", "gridsize") else float(v)
    return LawInput(
        matrices=tuple(_matrix_from(m, base) for m in d.get("matrices") or ()),
        grid=tuple(tuple(_matrix_from(m, base) for m in row) for row in grid) if grid else None,
        weights=Weights(tuple(d["weights"])) if d.get("weights") is not None else None,
        tau=Permutation(tuple(d["tau"])) if d.get("tau") else None,
        nu=Permutation(tuple(d["nu"])) if d.get("nu") else None,
        exponents=exps,
        functional=Functional.parse(f) if f not in (None, ENTRYWISE) else None,
        diag_perturbations=(
            tuple(tuple(float(x) for x in v) for v in d["diag_perturbations"])
            if d.get("diag_perturbations") is not None
            else None
        ),
    )


def load_input(path) -> LawInput:
    path = Path(path)
    return input_from_dict(json.loads(path.read_text()), base=path.parent)


def inputs_digest(inp: LawInput) -> str:
    blob = json.dumps(input_to_dict(inp), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --------------------------------------------------------------------------
# reports

_LAW_FIELDS = (
    "law_id", "functional", "mode", "labels", "values", "widths", "links", "gaps", "refs",
    "slack_used", "slack_ratio", "verdict", "failing_link", "worst_gap", "converged",
)


def law_report_to_dict(
    rep: LawReport, inp: LawInput | None = None, seed: int | None = None, shrink_steps: int = 0
) -> dict:
    d = {k: getattr(rep, k) for k in _LAW_FIELDS}
    d["labels"] = list(rep.labels)
    d["values"] = list(rep.values)
    d["widths"] = list(rep.widths)
    d["links"] = [list(x) for x in rep.links]
    d["gaps"] = list(rep.gaps)
    d["refs"] = list(rep.refs)
    if rep.failing_link is None:
        del d["failing_link"]
    d.update(
        schema_version=SCHEMA_VERSION,
        kind="law",
        inputs_digest=inputs_digest(inp) if inp is not None else None,
        seed=seed,
        tool_version=__version__,
    )
    if rep.verdict == "fail" and inp is not None:
        d["counterexample"] = {"input": input_to_dict(inp), "shrink_steps": shrink_steps}
    return d


def law_report_from_dict(d: dict) -> LawReport:
    return LawReport(
        law_id=d["law_id"],
        functional=d["functional"],
        mode=d["mode"],
        labels=tuple(d["labels"]),
        values=tuple(float(x) for x in d["values"]),
        widths=tuple(float(x) for x in d["widths"]),
        links=tuple(tuple(x) for x in d["links"]),
        gaps=tuple(float(x) for x in d["gaps"]),
        refs=tuple(float(x) for x in d["refs"]),
        slack_used=float(d["slack_used"]),
        slack_ratio=float(d["slack_ratio"]),
        verdict=d["verdict"],
        failing_link=d.get("failing_link"),
        worst_gap=float(d["worst_gap"]),
        converged=bool(d.get("converged", True)),
    )


def _cex_to_dict(c: Counterexample, seed: int) -> dict:
    d = law_report_to_dict(c.report, c.input, seed, c.shrink_steps)
    d["trial_index"] = c.trial_index
    d["counterexample"] = {"input": input_to_dict(c.input), "shrink_steps": c.shrink_steps}
    return d


def campaign_to_dict(rep: CampaignReport, include_volatile: bool = False) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": "campaign",
        "seed": rep.seed,
        "trials": rep.trials,
        "tool_version": __version__,
        "config": asdict(rep.config),
        "tolerances": asdict(rep.tolerances),
        "laws": [asdict(r) for r in rep.rows],
        "counterexamples": [_cex_to_dict(c, rep.seed) for c in rep.counterexamples],
        "total_counterexamples": len(rep.counterexamples),
        "verdict": "pass" if rep.passed else "fail",
    }
    if include_volatile:
        d["volatile"] = {"wall_time": rep.wall_time}
    return d


def campaign_from_dict(d: dict) -> CampaignReport:
    cexs = []
    for c in d["counterexamples"]:
        cexs.append(
            Counterexample(
                c["law_id"],
                input_from_dict(c["counterexample"]["input"]),
                law_report_from_dict(c),
                c["counterexample"]["shrink_steps"],
                c.get("trial_index"),
            )
        )
    return CampaignReport(
        seed=d["seed"],
        trials=d["trials"],
        config=GenConfig(**d["config"]),
        tolerances=Tolerances(**d["tolerances"]),
        rows=tuple(LawStats(**r) for r in d["laws"]),
        counterexamples=tuple(cexs),
        wall_time=float(d.get("volatile", {}).get("wall_time", 0.0)),
    )


def report_to_dict(report, **kw) -> dict:
    if isinstance(report, CampaignReport):
        return campaign_to_dict(report, include_volatile=kw.get("include_volatile", False))
    if isinstance(report, Counterexample):
        return _cex_to_dict(report, kw.get("seed"))
    return law_report_to_dict(report, kw.get("inp"), kw.get("seed"))


def dumps(d: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(d, sort_keys=True, indent=2, allow_nan=True) + "\n"


def save_report(report, path, **kw) -> None:
    """Write a LawReport, Counterexample or CampaignReport as schema-v1 JSON.

    Keyword arguments: ``inp`` and ``seed`` for law reports,
    ``include_volatile`` for campaigns (adds wall time under ``volatile``).
    """
    text = dumps(report_to_dict(report, **kw))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def load_report(path):
    d = json.loads(Path(path).read_text())
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema version {d.get('schema_version')!r}")
    if d.get("kind") == "campaign":
        return campaign_from_dict(d)
    return law_report_from_dict(d)


def is_finite_report(d: dict) -> bool:
    return all(math.isfinite(v) for v in d.get("values", []))
