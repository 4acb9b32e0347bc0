"""Report assembly: one machine-readable JSON document and one Markdown
rendering with identical verdicts, plus CSV row dumps.

Determinism: everything under "report" is a pure function of the
configuration and the library version; wall-clock data lives only under
"meta" so byte comparison of the report subtree is meaningful."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "schsym verification report",
    "type": "object",
    "required": ["meta", "report"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["version", "generated_at"],
            "properties": {
                "version": {"type": "string"},
                "generated_at": {"type": "string"},
                "config": {"type": "object"},
            },
        },
        "report": {
            "type": "object",
            "required": ["pass", "suites"],
            "properties": {
                "pass": {"type": "boolean"},
                "suites": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["name", "pass", "rows"],
                        "properties": {
                            "name": {"type": "string"},
                            "pass": {"type": "boolean"},
                            "rows": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["id", "status"],
                                    "properties": {
                                        "id": {"type": "string"},
                                        "status": {
                                            "enum": ["pass", "fail", "derived-candidate"]
                                        },
                                        "detail": {"type": "string"},
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


@dataclass
class SuiteResult:
    name: str
    rows: list[dict] = field(default_factory=list)

    def add(self, row_id: str, ok: bool | None, detail: str = "", **extra):
        status = "derived-candidate" if ok is None else ("pass" if ok else "fail")
        row = {"id": row_id, "status": status, "detail": detail}
        row.update(extra)
        self.rows.append(row)

    @property
    def ok(self) -> bool:
        return all(r["status"] != "fail" for r in self.rows)

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.ok, "rows": self.rows}


def assemble(suites: list[SuiteResult], config: dict | None = None,
             timestamp: str | None = None) -> dict:
    return {
        "meta": {
            "version": __version__,
            "generated_at": timestamp or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "config": config or {},
        },
        "report": {
            "pass": all(s.ok for s in suites),
            "suites": [s.as_dict() for s in suites],
        },
    }


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def to_markdown(doc: dict) -> str:
    out = io.StringIO()
    rep = doc["report"]
    out.write("# Verification report\n\n")
    out.write(f"overall: **{'PASS' if rep['pass'] else 'FAIL'}**  \n")
    out.write(f"version: {doc['meta']['version']}\n\n")
    for suite in rep["suites"]:
        out.write(f"## {suite['name']} — {'PASS' if suite['pass'] else 'FAIL'}\n\n")
        out.write("| check | status | detail |\n|---|---|---|\n")
        for row in suite["rows"]:
            detail = row.get("detail", "").replace("|", "\\|")
            out.write(f"| {row['id']} | {row['status']} | {detail} |\n")
        out.write("\n")
    return out.getvalue()


def write_outputs(doc: dict, outdir: str | Path, fmt: str = "json") -> list[Path]:
    """Write report.json / report.md plus one CSV per suite; returns paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        p = outdir / "report.json"
        p.write_text(to_json(doc))
        written.append(p)
    if fmt in ("markdown", "both"):
        p = outdir / "report.md"
        p.write_text(to_markdown(doc))
        written.append(p)
    for suite in doc["report"]["suites"]:
        p = outdir / f"suite_{suite['name']}.csv"
        keys = sorted({k for row in suite["rows"] for k in row})
        with p.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for row in suite["rows"]:
                w.writerow({k: row.get(k, "") for k in keys})
        written.append(p)
    return written
