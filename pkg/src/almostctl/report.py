"""JSON and fixed-width text rendering of suite reports."""

from __future__ import annotations

import json

from .suites import PAPER_MAP, Report

WITNESS_WIDTH = 72


def report_dict(rep: Report) -> dict:
    cfg = rep.config
    return {
        "suite": rep.suite,
        "config": {"ring": cfg.ring.variant, "field": str(cfg.ring.field),
                   "horizon": cfg.horizon, "seed": cfg.seed, "max_n": cfg.max_n},
        "records": [r.to_dict(cfg.timings) for r in rep.records],
        "coverage": {"anchors": list(PAPER_MAP[rep.suite]), "missing": rep.missing_anchors()},
        "summary": rep.summary,
    }


def to_json(rep: Report) -> str:
    return json.dumps(report_dict(rep), indent=2, sort_keys=True) + "\n"


def _clip(s: str, width: int) -> str:
    return s if len(s) <= width else s[:width - 3] + "..."


def to_text(rep: Report) -> str:
    cfg = rep.config
    rows = []
    for r in rep.records:
        w = str(r.verdict.witness) if r.verdict.witness else ""
        row = [r.id, r.verdict.label(), _clip(w, WITNESS_WIDTH)]
        if cfg.timings:
            row.insert(2, f"{r.duration:.3f}s")
        rows.append(row)
    head = ["check", "verdict", "witness"]
    if cfg.timings:
        head.insert(2, "time")
    widths = [max(len(x[i]) for x in rows + [head]) for i in range(len(head))]

    def fmt(row):
        return "  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip()

    lines = [f"suite {rep.suite}  ring {cfg.ring}  horizon {cfg.horizon}  seed {cfg.seed}",
             fmt(head), fmt(["-" * w for w in widths])]
    lines += [fmt(r) for r in rows]
    s = rep.summary
    lines.append(f"total {s['total']}  certified {s['certified-pass']}  "
                 f"up-to-horizon {s['pass-up-to-horizon']}  fail {s['fail']}")
    missing = rep.missing_anchors()
    if missing:
        lines.append("uncovered anchors: " + "; ".join(missing))
    return "\n".join(lines) + "\n"


def render(rep: Report, fmt: str) -> str:
    return to_json(rep) if fmt == "json" else to_text(rep)
