"""JSON certificates and CSV survey tables."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

from .group import GroupTable, Subgroup
from .theorems import SurveyRow, TheoremOneCertificate

CSV_HEADER = ["label", "p", "order", "breadth", "class", "status", "t2_index", "t2_class", "ms"]


def descriptor(S: Subgroup) -> dict:
    return {"order": S.order, "generator_indices": sorted(int(g) for g in S.generators)}


def certificate_dict(cert: TheoremOneCertificate, G: GroupTable) -> dict:
    steps = []
    for rec in cert.steps:
        step = {"case": rec.case, "n": rec.n, "m": rec.m}
        for name in ("P", "D1", "D2", "D"):
            sub = getattr(rec, name)
            if sub is not None:
                step[name] = descriptor(sub)
        steps.append(step)
    post = cert.postconditions
    return {
        "input": {
            "group_label": G.label,
            "p": G.prime,
            "order": G.order,
            "n": cert.n,
            "m": cert.m,
            "c_list": [descriptor(C) for C in cert.Cs],
        },
        "steps": steps,
        "result": descriptor(cert.result),
        "postconditions": {k: post[k] for k in ("B1", "B2", "B3", "B4", "index_log", "cl_f", "witness_element")},
    }


def emit_certificate(cert: TheoremOneCertificate, G: GroupTable) -> str:
    return json.dumps(certificate_dict(cert, G), indent=2) + "\n"


def survey_csv(rows: Iterable[SurveyRow], timing: bool = True) -> str:
    """CSV with the fixed header; ``timing=False`` blanks the ms column."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        fields = row.as_csv_fields()
        if not timing:
            fields[-1] = ""
        w.writerow(fields)
    return buf.getvalue()


def strip_timing(csv_text: str) -> list[list[str]]:
    """Parsed CSV rows without the ms column, for golden comparisons."""
    return [r[:-1] for r in csv.reader(io.StringIO(csv_text))]


def survey_json(rows: Sequence[SurveyRow]) -> str:
    out = []
    for r in rows:
        out.append({"label": r.label, "p": r.p, "order": r.order, "breadth": r.breadth, "class": r.cls,
                    "status": r.status, "t2_index": r.t2_index, "t2_class": r.t2_class, "error": r.error})
    return json.dumps(out, indent=2) + "\n"
